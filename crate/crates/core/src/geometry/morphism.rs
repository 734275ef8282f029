use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::chow::{ChowModel, CohClass, LinearMap, RingMap};
use super::space::Space;
use crate::error::{Error, Result};
use crate::exact::{Exponents, YPoly};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MorphismKind {
    Identity,
    /// Target factor `t` is source factor `kept[t]`.
    Projection { kept: Vec<usize> },
    CiEmbedding,
    /// Source factor `s` maps identically onto target factor `fiber[s]`; all
    /// other target factors receive a point.
    PointInclusion { fiber: Vec<usize> },
    FiniteModification { degree: i64 },
}

impl MorphismKind {
    pub fn label(&self) -> &'static str {
        match self {
            MorphismKind::Identity => "identity",
            MorphismKind::Projection { .. } => "projection",
            MorphismKind::CiEmbedding => "ci-embedding",
            MorphismKind::PointInclusion { .. } => "point-inclusion",
            MorphismKind::FiniteModification { .. } => "finite-modification",
        }
    }
}

/// A proper morphism of the catalog together with its pushforward on ambient
/// Chow models and, when defined, the cohomological pullback.
#[derive(Clone, Debug)]
pub struct Morphism {
    name: String,
    kind: MorphismKind,
    source: Arc<Space>,
    target: Arc<Space>,
    push: LinearMap,
    pull: Option<RingMap>,
}

/// Rows of the target pulled back along a projection.
pub(crate) fn pulled_rows(rows: &[Vec<u32>], kept: &[usize], nsource: usize) -> Vec<Vec<u32>> {
    rows.iter()
        .map(|r| {
            let mut out = vec![0; nsource];
            for (t, &d) in r.iter().enumerate() {
                out[kept[t]] = d;
            }
            out
        })
        .collect()
}

/// Removes `sub` from `rows` as multisets; `None` if `sub` is not contained.
pub(crate) fn multiset_minus(rows: &[Vec<u32>], sub: &[Vec<u32>]) -> Option<Vec<Vec<u32>>> {
    let mut rest = rows.to_vec();
    for r in sub {
        let i = rest.iter().position(|x| x == r)?;
        rest.remove(i);
    }
    Some(rest)
}

fn dropped(kept: &[usize], n: usize) -> Vec<usize> {
    (0..n).filter(|i| !kept.contains(i)).collect()
}

fn projection_push(source: &ChowModel, target: &ChowModel, kept: &[usize]) -> LinearMap {
    let drop = dropped(kept, source.nvars());
    LinearMap::from_fn(source, target, |e| {
        if drop.iter().all(|&d| e[d] == source.factors()[d]) {
            target.monomial(kept.iter().map(|&k| e[k]).collect(), YPoly::one())
        } else {
            target.zero()
        }
    })
}

fn projection_pull(source: &ChowModel, target: &ChowModel, kept: &[usize]) -> RingMap {
    RingMap::new(
        source.clone(),
        target.clone(),
        kept.iter().map(|&k| source.generator(k)).collect(),
    )
    .expect("valid projection")
}

fn inclusion_push(source: &ChowModel, target: &ChowModel, fiber: &[usize]) -> LinearMap {
    LinearMap::from_fn(source, target, |e| {
        let mut f: Exponents = target.top_exponents();
        for (s, &t) in fiber.iter().enumerate() {
            f[t] = e[s];
        }
        target.monomial(f, YPoly::one())
    })
}

fn inclusion_pull(source: &ChowModel, target: &ChowModel, fiber: &[usize]) -> RingMap {
    let gens = (0..target.nvars())
        .map(|t| match fiber.iter().position(|&x| x == t) {
            Some(s) => source.generator(s),
            None => source.zero(),
        })
        .collect();
    RingMap::new(source.clone(), target.clone(), gens).expect("valid inclusion")
}

impl Morphism {
    pub fn identity(space: Arc<Space>) -> Self {
        let m = space.ambient().clone();
        Morphism {
            name: format!("id_{}", space.name()),
            kind: MorphismKind::Identity,
            source: space.clone(),
            target: space,
            push: LinearMap::identity(&m),
            pull: Some(RingMap::identity(&m)),
        }
    }

    pub fn projection(name: impl Into<String>, source: Arc<Space>, target: Arc<Space>, kept: Vec<usize>) -> Result<Self> {
        let name = name.into();
        let ns = source.ambient().nvars();
        let mut seen = vec![false; ns];
        if kept.len() != target.ambient().nvars() {
            return Err(Error::Catalog(format!("{name}: kept list has wrong length")));
        }
        for (t, &k) in kept.iter().enumerate() {
            if k >= ns || seen[k] {
                return Err(Error::Catalog(format!("{name}: invalid kept factor {k}")));
            }
            seen[k] = true;
            if source.ambient().factors()[k] != target.ambient().factors()[t] {
                return Err(Error::Catalog(format!("{name}: factor dimensions differ")));
            }
        }
        let pulled = pulled_rows(target.rows(), &kept, ns);
        if multiset_minus(source.rows(), &pulled).is_none() {
            return Err(Error::Catalog(format!(
                "{name}: source is not contained in the preimage of the target"
            )));
        }
        let push = projection_push(source.ambient(), target.ambient(), &kept);
        let pull = projection_pull(source.ambient(), target.ambient(), &kept);
        Ok(Morphism {
            name,
            kind: MorphismKind::Projection { kept },
            source,
            target,
            push,
            pull: Some(pull),
        })
    }

    pub fn ci_embedding(name: impl Into<String>, source: Arc<Space>, target: Arc<Space>) -> Result<Self> {
        let name = name.into();
        if source.ambient() != target.ambient() {
            return Err(Error::Catalog(format!("{name}: embedding between different ambients")));
        }
        if multiset_minus(source.rows(), target.rows()).is_none() {
            return Err(Error::Catalog(format!("{name}: source equations do not contain the target's")));
        }
        let m = source.ambient().clone();
        Ok(Morphism {
            name,
            kind: MorphismKind::CiEmbedding,
            source,
            target,
            push: LinearMap::identity(&m),
            pull: Some(RingMap::identity(&m)),
        })
    }

    pub fn point_inclusion(name: impl Into<String>, source: Arc<Space>, target: Arc<Space>, fiber: Vec<usize>) -> Result<Self> {
        let name = name.into();
        if !source.is_ambient() {
            return Err(Error::Catalog(format!("{name}: point-inclusion source must be a product of projective spaces")));
        }
        if fiber.len() != source.ambient().nvars() {
            return Err(Error::Catalog(format!("{name}: fiber list has wrong length")));
        }
        let nt = target.ambient().nvars();
        let mut seen = vec![false; nt];
        for (s, &t) in fiber.iter().enumerate() {
            if t >= nt || seen[t] {
                return Err(Error::Catalog(format!("{name}: invalid fiber position {t}")));
            }
            seen[t] = true;
            if source.ambient().factors()[s] != target.ambient().factors()[t] {
                return Err(Error::Catalog(format!("{name}: fiber dimensions differ")));
            }
        }
        if target.rows().iter().any(|r| fiber.iter().any(|&t| r[t] != 0)) {
            return Err(Error::Catalog(format!("{name}: target equations involve the fiber factors")));
        }
        let push = inclusion_push(source.ambient(), target.ambient(), &fiber);
        let pull = inclusion_pull(source.ambient(), target.ambient(), &fiber);
        Ok(Morphism {
            name,
            kind: MorphismKind::PointInclusion { fiber },
            source,
            target,
            push,
            pull: Some(pull),
        })
    }

    /// A finite map with a user-supplied pushforward, validated for dimension
    /// preservation, point multiplicity and degree onto the image.
    pub fn finite_modification(
        name: impl Into<String>,
        source: Arc<Space>,
        target: Arc<Space>,
        push: LinearMap,
        degree: i64,
    ) -> Result<Self> {
        let name = name.into();
        if !source.is_ambient() {
            return Err(Error::Catalog(format!("{name}: finite-modification source must be a product of projective spaces")));
        }
        if push.source() != source.ambient() || push.target() != target.ambient() {
            return Err(Error::Catalog(format!("{name}: pushforward matrix has wrong models")));
        }
        if source.dim() > target.dim() {
            return Err(Error::Catalog(format!("{name}: source dimension exceeds target dimension")));
        }
        let ds = source.ambient().dim();
        let dt = target.ambient().dim();
        for (e, img) in push.images() {
            let hom_dim = ds - e.iter().map(|&a| a as usize).sum::<usize>();
            if img.homological_component(hom_dim) != *img {
                return Err(Error::Catalog(format!("{name}: pushforward does not preserve dimension")));
            }
            debug_assert!(hom_dim <= dt);
        }
        if push.image(&source.ambient().top_exponents()) != target.ambient().point_class() {
            return Err(Error::Catalog(format!("{name}: point class must map to the point class")));
        }
        if source.dim() == target.dim() {
            let img = push.apply(&source.fundamental_class())?;
            if img != target.fundamental_class().scale_int(degree) {
                return Err(Error::Catalog(format!(
                    "{name}: image of the fundamental class is not {degree} times the target class"
                )));
            }
        }
        Ok(Morphism {
            name,
            kind: MorphismKind::FiniteModification { degree },
            source,
            target,
            push,
            pull: None,
        })
    }

    /// Replaces the stored pushforward matrix without revalidation.
    pub fn with_push_override(&self, push: LinearMap) -> Result<Self> {
        if push.source() != self.push.source() || push.target() != self.push.target() {
            return Err(Error::ModelMismatch(format!("{}: override matrix has wrong models", self.name)));
        }
        let mut m = self.clone();
        m.push = push;
        Ok(m)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &MorphismKind {
        &self.kind
    }

    pub fn source(&self) -> &Arc<Space> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Space> {
        &self.target
    }

    pub fn push_map(&self) -> &LinearMap {
        &self.push
    }

    pub fn ring_map(&self) -> Option<&RingMap> {
        self.pull.as_ref()
    }

    /// `dim(f) = dim source - dim target`.
    pub fn rel_dim(&self) -> i64 {
        self.source.dim() as i64 - self.target.dim() as i64
    }

    pub fn codim(&self) -> i64 {
        -self.rel_dim()
    }

    pub fn is_proper(&self) -> bool {
        true
    }

    /// Identity, or a projection whose source is exactly the preimage of its target.
    pub fn is_smooth(&self) -> bool {
        match &self.kind {
            MorphismKind::Identity => true,
            MorphismKind::Projection { kept } => {
                let pulled = pulled_rows(self.target.rows(), kept, self.source.ambient().nvars());
                multiset_minus(self.source.rows(), &pulled).is_some_and(|rest| rest.is_empty())
            }
            _ => false,
        }
    }

    /// Dropped factors of a projection, in source order.
    pub fn dropped_factors(&self) -> Vec<usize> {
        match &self.kind {
            MorphismKind::Projection { kept } => dropped(kept, self.source.ambient().nvars()),
            _ => Vec::new(),
        }
    }

    pub fn pushforward(&self, c: &CohClass) -> Result<CohClass> {
        self.push.apply(c)
    }

    /// Gysin pullback; defined for smooth morphisms only.
    pub fn gysin_pullback(&self, c: &CohClass) -> Result<CohClass> {
        if !self.is_smooth() {
            return Err(Error::UnsupportedPullback(format!(
                "{} ({}) is not smooth",
                self.name,
                self.kind.label()
            )));
        }
        self.cohomology_pullback(c)
    }

    pub fn cohomology_pullback(&self, c: &CohClass) -> Result<CohClass> {
        match &self.pull {
            Some(r) => r.apply(c),
            None => Err(Error::UnsupportedPullback(format!(
                "{} ({}) has no cohomological pullback",
                self.name,
                self.kind.label()
            ))),
        }
    }

    /// Recomputes the structural pushforward; `None` for finite modifications.
    pub fn structural_push(&self) -> Option<LinearMap> {
        let (s, t) = (self.source.ambient(), self.target.ambient());
        match &self.kind {
            MorphismKind::Identity | MorphismKind::CiEmbedding => Some(LinearMap::identity(s)),
            MorphismKind::Projection { kept } => Some(projection_push(s, t, kept)),
            MorphismKind::PointInclusion { fiber } => Some(inclusion_push(s, t, fiber)),
            MorphismKind::FiniteModification { .. } => None,
        }
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} -> {}", self.name, self.source, self.target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(name: &str, f: Vec<u32>) -> Arc<Space> {
        Arc::new(Space::ambient_space(name, f))
    }

    #[test]
    fn projection_push_and_pull() {
        let p1p1 = sp("P1xP1", vec![1, 1]);
        let p1 = sp("P1", vec![1]);
        let f = Morphism::projection("pr", p1p1.clone(), p1.clone(), vec![0]).unwrap();
        assert!(f.is_smooth());
        assert_eq!(f.rel_dim(), 1);
        let pt = p1p1.ambient().point_class();
        assert_eq!(f.pushforward(&pt).unwrap(), p1.ambient().point_class());
        assert!(f.pushforward(&p1p1.ambient().one()).unwrap().is_zero());
        let p1p2 = sp("P1xP2", vec![1, 2]);
        let p2 = sp("P2", vec![2]);
        let g = Morphism::projection("pr2", p1p2.clone(), p2.clone(), vec![1]).unwrap();
        assert_eq!(g.gysin_pullback(&p2.ambient().one()).unwrap(), p1p2.ambient().one());
        assert_eq!(
            g.gysin_pullback(&p2.ambient().point_class()).unwrap(),
            p1p2.ambient().monomial(vec![0, 2], YPoly::one())
        );
    }

    #[test]
    fn embedding_push_is_multiplication_by_fundamental_class() {
        let p2 = sp("P2", vec![2]);
        let cubic = Arc::new(Space::new("cubic", ChowModel::projective(2), vec![vec![3]], true).unwrap());
        let i = Morphism::ci_embedding("i", cubic.clone(), p2).unwrap();
        assert_eq!(i.codim(), 1);
        assert!(!i.is_smooth());
        let pushed = i.pushforward(&cubic.fundamental_class()).unwrap();
        assert_eq!(pushed, cubic.ambient().linear_form(&[3]));
        assert!(matches!(
            i.gysin_pullback(&cubic.ambient().one()),
            Err(Error::UnsupportedPullback(_))
        ));
    }

    #[test]
    fn finite_modification_validation() {
        let p1 = sp("P1", vec![1]);
        let m = ChowModel::projective(2);
        let nodal = Arc::new(Space::new("nodal", m.clone(), vec![vec![3]], false).unwrap());
        let good = LinearMap::from_fn(p1.ambient(), &m, |e| {
            if e[0] == 0 {
                m.linear_form(&[3])
            } else {
                m.point_class()
            }
        });
        assert!(Morphism::finite_modification("nu", p1.clone(), nodal.clone(), good, 1).is_ok());
        let wrong_degree = LinearMap::from_fn(p1.ambient(), &m, |e| {
            if e[0] == 0 {
                m.linear_form(&[2])
            } else {
                m.point_class()
            }
        });
        assert!(Morphism::finite_modification("nu", p1.clone(), nodal.clone(), wrong_degree, 1).is_err());
        let wrong_dim = LinearMap::from_fn(p1.ambient(), &m, |_| m.point_class());
        assert!(Morphism::finite_modification("nu", p1, nodal, wrong_dim, 1).is_err());
    }

    #[test]
    fn point_inclusion_push() {
        let pt = Arc::new(Space::point());
        let p2 = sp("P2", vec![2]);
        let j = Morphism::point_inclusion("j", pt.clone(), p2.clone(), vec![]).unwrap();
        assert_eq!(j.pushforward(&pt.ambient().one()).unwrap(), p2.ambient().point_class());
        assert_eq!(j.rel_dim(), -2);
    }
}
