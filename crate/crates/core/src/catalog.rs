//! JSON catalogs of spaces, morphisms, cycles and decomposition witnesses,
//! plus the hypersurface corpus.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::YPoly;
use crate::geometry::{Chain, ChowModel, LinearMap, Morphism, Resolution, ResolutionPiece, Space};
use crate::milnor::{SingularHypersurfaceData, SingularPoint};
use crate::motivic::{Cycle, DecompositionWitness, Flavor};

pub const SHIPPED_CATALOG: &str = include_str!("../data/catalog.json");
pub const SHIPPED_CORPUS: &str = include_str!("../data/corpus.json");

/// `{source monomial: {target monomial: coefficient}}`.
pub type PushMatrix = BTreeMap<String, BTreeMap<String, YPoly>>;

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub id: String,
    pub factors: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubvarietySpec {
    pub id: String,
    pub ambient: String,
    pub multidegrees: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub singular: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindTag {
    Identity,
    Projection,
    CiEmbedding,
    PointInclusion,
    FiniteModification,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismSpec {
    pub id: String,
    pub kind: KindTag,
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kept: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pushforward: Option<PushMatrix>,
}

/// `coefficient * [chain]`; an empty chain is the identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coefficient: i64,
    pub chain: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionSpec {
    pub space: String,
    pub pieces: Vec<TermSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleSpec {
    pub id: String,
    pub over: String,
    pub flavor: Flavor,
    pub base: Vec<String>,
    pub terms: Vec<TermSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessSpec {
    pub id: String,
    pub target: String,
    pub base: Vec<String>,
    pub left: Vec<TermSpec>,
    pub right: Vec<TermSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogFile {
    pub spaces: Vec<SpaceSpec>,
    pub subvarieties: Vec<SubvarietySpec>,
    pub morphisms: Vec<MorphismSpec>,
    #[serde(default)]
    pub resolutions: Vec<ResolutionSpec>,
    #[serde(default)]
    pub cycles: Vec<CycleSpec>,
    #[serde(default)]
    pub witnesses: Vec<WitnessSpec>,
}

impl CatalogFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::from_json(&e))
    }

    /// Pretty JSON with a trailing newline; the shipped file is stored in this form.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("catalog serializes");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug)]
pub struct Catalog {
    file: CatalogFile,
    spaces: BTreeMap<String, Arc<Space>>,
    morphisms: BTreeMap<String, Arc<Morphism>>,
    cycles: Vec<(String, Cycle)>,
    witnesses: Vec<DecompositionWitness>,
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, id: &str, what: &str) -> Result<&'a T> {
    map.get(id).ok_or_else(|| Error::Catalog(format!("unknown {what} '{id}'")))
}

fn build_morphism(spec: &MorphismSpec, spaces: &BTreeMap<String, Arc<Space>>) -> Result<Morphism> {
    let s = lookup(spaces, &spec.source, "space")?.clone();
    let t = lookup(spaces, &spec.target, "space")?.clone();
    let id = spec.id.clone();
    let need = |v: &Option<Vec<usize>>, field: &str| {
        v.clone()
            .ok_or_else(|| Error::Catalog(format!("morphism {id}: missing '{field}'")))
    };
    let m = match spec.kind {
        KindTag::Identity => {
            if s != t {
                return Err(Error::Catalog(format!("morphism {id}: identity between different spaces")));
            }
            Morphism::identity(s).renamed(id.clone())
        }
        KindTag::Projection => Morphism::projection(id.clone(), s, t, need(&spec.kept, "kept")?)?,
        KindTag::CiEmbedding => Morphism::ci_embedding(id.clone(), s, t)?,
        KindTag::PointInclusion => Morphism::point_inclusion(id.clone(), s, t, need(&spec.fiber, "fiber")?)?,
        KindTag::FiniteModification => {
            let matrix = spec
                .pushforward
                .as_ref()
                .ok_or_else(|| Error::Catalog(format!("morphism {id}: finite modification needs 'pushforward'")))?;
            let push = LinearMap::from_json_map(s.ambient(), t.ambient(), matrix)?;
            Morphism::finite_modification(id.clone(), s, t, push, spec.degree.unwrap_or(1))?
        }
    };
    if spec.kind != KindTag::FiniteModification {
        if let Some(matrix) = &spec.pushforward {
            let given = LinearMap::from_json_map(m.source().ambient(), m.target().ambient(), matrix)?;
            if &given != m.push_map() {
                return Err(Error::Catalog(format!("morphism {id}: pushforward disagrees with its kind")));
            }
        }
    }
    Ok(m)
}

fn build_morphisms(
    file: &CatalogFile,
    spaces: &BTreeMap<String, Arc<Space>>,
    overrides: &BTreeMap<String, LinearMap>,
) -> Result<BTreeMap<String, Arc<Morphism>>> {
    let mut out = BTreeMap::new();
    for spec in &file.morphisms {
        if spaces.contains_key(&spec.id) || out.contains_key(&spec.id) {
            return Err(Error::Catalog(format!("duplicate id '{}'", spec.id)));
        }
        let mut m = build_morphism(spec, spaces)?;
        if let Some(push) = overrides.get(&spec.id) {
            m = m.with_push_override(push.clone())?;
        }
        out.insert(spec.id.clone(), Arc::new(m));
    }
    Ok(out)
}

fn chain_from(
    start: Option<&Arc<Space>>,
    ids: &[String],
    morphisms: &BTreeMap<String, Arc<Morphism>>,
) -> Result<Chain> {
    let steps = ids
        .iter()
        .map(|id| lookup(morphisms, id, "morphism").cloned())
        .collect::<Result<Vec<_>>>()?;
    let start = match (steps.first(), start) {
        (Some(m), _) => m.source().clone(),
        (None, Some(s)) => s.clone(),
        (None, None) => return Err(Error::Catalog("empty chain without a start".into())),
    };
    Chain::from_steps(start, &steps)
}

fn cycle_from(
    x: &Arc<Space>,
    base: &Chain,
    flavor: Flavor,
    terms: &[TermSpec],
    morphisms: &BTreeMap<String, Arc<Morphism>>,
) -> Result<Cycle> {
    let mut c = Cycle::zero(base.clone(), flavor);
    for t in terms {
        let chain = chain_from(Some(x), &t.chain, morphisms)?;
        c.add_term(t.coefficient, chain)?;
    }
    Ok(c)
}

impl Catalog {
    pub fn from_json_str(text: &str) -> Result<Self> {
        Catalog::from_file(CatalogFile::parse(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Catalog::from_json_str(&text)
    }

    pub fn shipped() -> Self {
        Catalog::from_json_str(SHIPPED_CATALOG).expect("shipped catalog is valid")
    }

    pub fn from_file(file: CatalogFile) -> Result<Self> {
        Catalog::build(file, &BTreeMap::new())
    }

    fn build(file: CatalogFile, overrides: &BTreeMap<String, LinearMap>) -> Result<Self> {
        let mut spaces: BTreeMap<String, Arc<Space>> = BTreeMap::new();
        for s in &file.spaces {
            let sp = Space::ambient_space(s.id.clone(), s.factors.clone());
            if spaces.insert(s.id.clone(), Arc::new(sp)).is_some() {
                return Err(Error::Catalog(format!("duplicate id '{}'", s.id)));
            }
        }
        for v in &file.subvarieties {
            let amb = lookup(&spaces, &v.ambient, "space")?;
            if !amb.is_ambient() {
                return Err(Error::Catalog(format!("{}: ambient '{}' is not a product of projective spaces", v.id, v.ambient)));
            }
            let sp = Space::new(v.id.clone(), amb.ambient().clone(), v.multidegrees.clone(), !v.singular)?;
            if spaces.insert(v.id.clone(), Arc::new(sp)).is_some() {
                return Err(Error::Catalog(format!("duplicate id '{}'", v.id)));
            }
        }

        // Decompositions are read off the unresolved morphisms, attached, and
        // every morphism is then rebuilt against the resolved spaces.
        if !file.resolutions.is_empty() {
            let first = build_morphisms(&file, &spaces, overrides)?;
            let mut seen = BTreeSet::new();
            for r in &file.resolutions {
                if !seen.insert(r.space.clone()) {
                    return Err(Error::Catalog(format!("{} has two decompositions", r.space)));
                }
                let x = lookup(&spaces, &r.space, "space")?.clone();
                if x.is_smooth() {
                    return Err(Error::Catalog(format!("decomposition given for smooth {}", r.space)));
                }
                let mut pieces = Vec::new();
                for t in &r.pieces {
                    let chain = chain_from(Some(&x), &t.chain, &first)?;
                    if chain.target().as_ref() != x.as_ref() {
                        return Err(Error::Catalog(format!("decomposition piece of {} ends elsewhere", r.space)));
                    }
                    pieces.push(ResolutionPiece {
                        coeff: t.coefficient,
                        source: chain.source().clone(),
                        push: chain.push_map()?,
                    });
                }
                let resolved = (*x).clone().with_resolution(Resolution { pieces })?;
                spaces.insert(r.space.clone(), Arc::new(resolved));
            }
        }
        let morphisms = build_morphisms(&file, &spaces, overrides)?;

        let mut ids: BTreeSet<String> = spaces.keys().chain(morphisms.keys()).cloned().collect();
        let mut cycles = Vec::new();
        for c in &file.cycles {
            if !ids.insert(c.id.clone()) {
                return Err(Error::Catalog(format!("duplicate id '{}'", c.id)));
            }
            let x = lookup(&spaces, &c.over, "space")?;
            let base = chain_from(Some(x), &c.base, &morphisms)?;
            if base.source().as_ref() != x.as_ref() {
                return Err(Error::Catalog(format!("cycle {}: base does not start at {}", c.id, c.over)));
            }
            cycles.push((c.id.clone(), cycle_from(x, &base, c.flavor, &c.terms, &morphisms)?));
        }
        let mut witnesses = Vec::new();
        for w in &file.witnesses {
            if !ids.insert(w.id.clone()) {
                return Err(Error::Catalog(format!("duplicate id '{}'", w.id)));
            }
            let x = lookup(&spaces, &w.target, "space")?;
            let base = chain_from(Some(x), &w.base, &morphisms)?;
            let left = cycle_from(x, &base, Flavor::Sm, &w.left, &morphisms)?;
            let right = cycle_from(x, &base, Flavor::Sm, &w.right, &morphisms)?;
            witnesses.push(DecompositionWitness::new(w.id.clone(), left, right)?);
        }
        Ok(Catalog {
            file,
            spaces,
            morphisms,
            cycles,
            witnesses,
        })
    }

    /// The same catalog with one morphism's pushforward matrix replaced
    /// (unvalidated); used to build mutated catalogs for negative controls.
    pub fn with_push_override(&self, id: &str, push: LinearMap) -> Result<Catalog> {
        lookup(&self.morphisms, id, "morphism")?;
        let mut overrides = BTreeMap::new();
        overrides.insert(id.to_string(), push);
        Catalog::build(self.file.clone(), &overrides)
    }

    pub fn file(&self) -> &CatalogFile {
        &self.file
    }

    pub fn to_json_string(&self) -> String {
        self.file.to_json_string()
    }

    pub fn space(&self, id: &str) -> Result<&Arc<Space>> {
        lookup(&self.spaces, id, "space")
    }

    pub fn morphism(&self, id: &str) -> Result<&Arc<Morphism>> {
        lookup(&self.morphisms, id, "morphism")
    }

    pub fn cycle(&self, id: &str) -> Result<&Cycle> {
        self.cycles
            .iter()
            .find(|(k, _)| k == id)
            .map(|(_, c)| c)
            .ok_or_else(|| Error::Catalog(format!("unknown cycle '{id}'")))
    }

    pub fn spaces(&self) -> impl Iterator<Item = (&String, &Arc<Space>)> {
        self.spaces.iter()
    }

    /// Morphisms in file order.
    pub fn morphisms(&self) -> impl Iterator<Item = &Arc<Morphism>> {
        self.file.morphisms.iter().map(|m| &self.morphisms[&m.id])
    }

    pub fn cycles(&self) -> &[(String, Cycle)] {
        &self.cycles
    }

    pub fn witnesses(&self) -> &[DecompositionWitness] {
        &self.witnesses
    }

    pub fn chain(&self, start: &str, ids: &[String]) -> Result<Chain> {
        chain_from(Some(self.space(start)?), ids, &self.morphisms)
    }

    pub fn max_dim(&self) -> usize {
        self.spaces.values().map(|s| s.ambient().dim()).max().unwrap_or(0)
    }

    /// `[X -> X]` for a catalog space, over the projection to a point.
    pub fn self_cycle(&self, id: &str, flavor: Flavor) -> Result<Cycle> {
        let x = self.space(id)?;
        Cycle::generator(point_base(x)?, flavor, Chain::identity(x.clone()))
    }
}

fn point_base(x: &Arc<Space>) -> Result<Chain> {
    let pt = Arc::new(Space::ambient_space("pt", Vec::new()));
    Ok(Chain::single(Arc::new(Morphism::projection(
        format!("{}->pt", x.name()),
        x.clone(),
        pt,
        Vec::new(),
    )?)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub name: String,
    pub space: String,
    pub ambient: Vec<u32>,
    pub multidegrees: Vec<Vec<u32>>,
    pub singular_points: Vec<SingularPoint>,
    pub decomposition: Vec<TermSpec>,
}

pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>> {
    serde_json::from_str(text).map_err(|e| Error::from_json(&e))
}

impl Catalog {
    pub fn corpus_entry(&self, e: &CorpusEntry) -> Result<SingularHypersurfaceData> {
        let x = self.space(&e.space)?;
        if x.ambient() != &ChowModel::new(e.ambient.clone()) || x.rows() != e.multidegrees.as_slice() {
            return Err(Error::Catalog(format!("{}: ambient or multidegrees disagree with '{}'", e.name, e.space)));
        }
        let dec = cycle_from(x, &point_base(x)?, Flavor::Sm, &e.decomposition, &self.morphisms)?;
        SingularHypersurfaceData::new(e.name.clone(), x.clone(), e.singular_points.clone(), dec)
    }

    pub fn corpus(&self, text: &str) -> Result<Vec<SingularHypersurfaceData>> {
        parse_corpus(text)?.iter().map(|e| self.corpus_entry(e)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_catalog_round_trips_bit_exactly() {
        let file = CatalogFile::parse(SHIPPED_CATALOG).unwrap();
        assert_eq!(file.to_json_string(), SHIPPED_CATALOG);
        let cat = Catalog::from_file(file).unwrap();
        assert!(cat.morphisms().count() >= 12);
        assert!(cat.cycles().len() >= 8);
    }

    #[test]
    fn shipped_corpus_loads() {
        let cat = Catalog::shipped();
        let corpus = cat.corpus(SHIPPED_CORPUS).unwrap();
        assert!(corpus.len() >= 3);
    }

    #[test]
    fn schema_errors_carry_lines() {
        let err = Catalog::from_json_str("{\n  \"spaces\": [\n    {\"id\": \"P1\", \"factor\": [1]}\n  ]\n}").unwrap_err();
        match err {
            Error::Schema { line, .. } => assert_eq!(line, 3),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn invalid_catalogs_are_rejected() {
        let text = r#"{"spaces":[{"id":"P1","factors":[1]},{"id":"P2","factors":[2]}],"subvarieties":[],
            "morphisms":[{"id":"bad","kind":"projection","source":"P1","target":"P2","kept":[0]}]}"#;
        assert!(matches!(Catalog::from_json_str(text), Err(Error::Catalog(_))));
        let text = r#"{"spaces":[{"id":"P1","factors":[1]}],"subvarieties":[],
            "morphisms":[{"id":"m","kind":"ci-embedding","source":"P1","target":"P3"}]}"#;
        assert!(matches!(Catalog::from_json_str(text), Err(Error::Catalog(_))));
    }

    #[test]
    fn overrides_replace_one_matrix() {
        let cat = Catalog::shipped();
        let m = cat.morphism("i_conic").unwrap();
        let doubled = m.push_map().scale_int(2);
        let bad = cat.with_push_override("i_conic", doubled.clone()).unwrap();
        assert_eq!(bad.morphism("i_conic").unwrap().push_map(), &doubled);
        assert_eq!(bad.morphism("i_cubic").unwrap().push_map(), cat.morphism("i_cubic").unwrap().push_map());
    }
}
