use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{exponent_key, parse_exponent_key, Exponents, Rational, TruncatedSeries, YPoly};

/// Chow ring of `P^{n_1} x ... x P^{n_k}`: `Q[h_1..h_k] / (h_i^{n_i+1})`.
///
/// A monomial of cohomological degree `d` doubles as the homology class of
/// dimension `dim - d`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct ChowModel {
    factors: Vec<u32>,
}

impl ChowModel {
    pub fn new(factors: Vec<u32>) -> Self {
        ChowModel { factors }
    }

    pub fn point() -> Self {
        ChowModel { factors: Vec::new() }
    }

    pub fn projective(n: u32) -> Self {
        ChowModel { factors: vec![n] }
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn nvars(&self) -> usize {
        self.factors.len()
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|&n| n as usize).sum()
    }

    /// Exponent vector of the point class `h_1^{n_1} ... h_k^{n_k}`.
    pub fn top_exponents(&self) -> Exponents {
        self.factors.clone()
    }

    pub fn admits(&self, exps: &[u32]) -> bool {
        exps.len() == self.factors.len() && exps.iter().zip(&self.factors).all(|(a, n)| a <= n)
    }

    /// All basis monomials, ordered lexicographically.
    pub fn basis(&self) -> Vec<Exponents> {
        let mut out = vec![Vec::new()];
        for &n in &self.factors {
            out = out
                .into_iter()
                .flat_map(|e| {
                    (0..=n).map(move |a| {
                        let mut e2 = e.clone();
                        e2.push(a);
                        e2
                    })
                })
                .collect();
        }
        out
    }

    /// Basis monomials of cohomological degree `d`.
    pub fn basis_in_degree(&self, d: usize) -> Vec<Exponents> {
        self.basis()
            .into_iter()
            .filter(|e| e.iter().map(|&a| a as usize).sum::<usize>() == d)
            .collect()
    }

    pub fn zero(&self) -> CohClass {
        CohClass {
            model: self.clone(),
            poly: TruncatedSeries::zero(self.nvars(), self.dim()),
        }
    }

    pub fn one(&self) -> CohClass {
        self.constant(YPoly::one())
    }

    pub fn constant(&self, c: YPoly) -> CohClass {
        CohClass {
            model: self.clone(),
            poly: TruncatedSeries::constant(self.nvars(), self.dim(), c),
        }
    }

    /// The hyperplane class of factor `i`.
    pub fn generator(&self, i: usize) -> CohClass {
        let mut e = vec![0; self.nvars()];
        e[i] = 1;
        self.monomial(e, YPoly::one())
    }

    pub fn monomial(&self, exps: Exponents, c: YPoly) -> CohClass {
        assert_eq!(exps.len(), self.nvars(), "exponent length mismatch");
        let mut poly = TruncatedSeries::zero(self.nvars(), self.dim());
        if self.admits(&exps) {
            poly.add_term(exps, c);
        }
        CohClass { model: self.clone(), poly }
    }

    pub fn point_class(&self) -> CohClass {
        self.monomial(self.top_exponents(), YPoly::one())
    }

    /// Linear form `sum_i d_i h_i`.
    pub fn linear_form(&self, coeffs: &[u32]) -> CohClass {
        let mut c = self.zero();
        for (i, &d) in coeffs.iter().enumerate() {
            if d != 0 {
                c = c.add(&self.generator(i).scale_int(d as i64)).expect("same model");
            }
        }
        c
    }

    /// Reduces a series in the model's variables modulo the cap relations.
    pub fn class_from_series(&self, s: &TruncatedSeries) -> Result<CohClass> {
        if s.nvars() != self.nvars() {
            return Err(Error::ModelMismatch(format!(
                "series in {} variables for model {self}",
                s.nvars()
            )));
        }
        let mut poly = TruncatedSeries::zero(self.nvars(), self.dim());
        for (e, c) in s.retain_caps(&self.factors).terms() {
            poly.add_term(e.clone(), c.clone());
        }
        Ok(CohClass { model: self.clone(), poly })
    }
}

impl fmt::Display for ChowModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "pt");
        }
        let parts: Vec<String> = self.factors.iter().map(|n| format!("P{n}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// A class in a [`ChowModel`] with `Q[y]` coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CohClass {
    model: ChowModel,
    poly: TruncatedSeries,
}

impl CohClass {
    pub fn model(&self) -> &ChowModel {
        &self.model
    }

    pub fn series(&self) -> &TruncatedSeries {
        &self.poly
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, YPoly> {
        self.poly.terms()
    }

    pub fn coeff(&self, exps: &[u32]) -> YPoly {
        self.poly.coeff(exps)
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    fn check(&self, other: &CohClass) -> Result<()> {
        if self.model != other.model {
            return Err(Error::ModelMismatch(format!("{} vs {}", self.model, other.model)));
        }
        Ok(())
    }

    pub fn add(&self, other: &CohClass) -> Result<CohClass> {
        self.check(other)?;
        Ok(CohClass {
            model: self.model.clone(),
            poly: self.poly.add(&other.poly)?,
        })
    }

    pub fn sub(&self, other: &CohClass) -> Result<CohClass> {
        self.check(other)?;
        Ok(CohClass {
            model: self.model.clone(),
            poly: self.poly.sub(&other.poly)?,
        })
    }

    /// Cup product; also the cap product once one factor is read as homology.
    pub fn mul(&self, other: &CohClass) -> Result<CohClass> {
        self.check(other)?;
        let prod = self.poly.mul(&other.poly)?;
        Ok(CohClass {
            model: self.model.clone(),
            poly: prod.retain_caps(self.model.factors()),
        })
    }

    pub fn neg(&self) -> CohClass {
        CohClass {
            model: self.model.clone(),
            poly: self.poly.neg(),
        }
    }

    pub fn scale(&self, c: &YPoly) -> CohClass {
        CohClass {
            model: self.model.clone(),
            poly: self.poly.scale(c),
        }
    }

    pub fn scale_rational(&self, c: &Rational) -> CohClass {
        CohClass {
            model: self.model.clone(),
            poly: self.poly.scale_rational(c),
        }
    }

    pub fn scale_int(&self, n: i64) -> CohClass {
        self.scale_rational(&Rational::from_int(n))
    }

    pub fn specialize(&self, y0: &Rational) -> CohClass {
        CohClass {
            model: self.model.clone(),
            poly: self.poly.specialize(y0),
        }
    }

    /// Part of cohomological degree `d`.
    pub fn component(&self, d: usize) -> CohClass {
        CohClass {
            model: self.model.clone(),
            poly: self.poly.component(d),
        }
    }

    /// Part of homological dimension `k`.
    pub fn homological_component(&self, k: usize) -> CohClass {
        match self.model.dim().checked_sub(k) {
            Some(d) => self.component(d),
            None => self.model.zero(),
        }
    }

    /// Coefficient of the point class.
    pub fn degree(&self) -> YPoly {
        self.coeff(&self.model.top_exponents())
    }

    pub fn truncate(&self, order: usize) -> CohClass {
        CohClass {
            model: self.model.clone(),
            poly: TruncatedSeries::from_terms(
                self.model.nvars(),
                self.model.dim(),
                self.poly.truncate(order).terms().iter().map(|(e, c)| (e.clone(), c.clone())),
            ),
        }
    }

    /// Inverse of a class with constant term 1 (or any nonzero rational).
    pub fn invert(&self) -> Result<CohClass> {
        let inv = self.poly.invert()?;
        self.model.class_from_series(&inv)
    }

    pub fn pow(&self, n: u32) -> Result<CohClass> {
        let mut acc = self.model.one();
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Renders a monomial such as `h1^2*h2`; generators are `h` on one factor.
    pub fn monomial_name(model: &ChowModel, e: &[u32]) -> String {
        let parts: Vec<String> = e
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0)
            .map(|(i, &a)| {
                let g = if model.nvars() == 1 { "h".to_string() } else { format!("h{}", i + 1) };
                if a == 1 {
                    g
                } else {
                    format!("{g}^{a}")
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    /// One line per nonzero monomial, ordered by degree.
    pub fn table(&self) -> Vec<(String, YPoly)> {
        let mut rows: Vec<(&Exponents, &YPoly)> = self.terms().iter().collect();
        rows.sort_by_key(|(e, _)| (e.iter().sum::<u32>(), (*e).clone()));
        rows.into_iter()
            .map(|(e, c)| (Self::monomial_name(&self.model, e), c.clone()))
            .collect()
    }
}

impl fmt::Display for CohClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .table()
            .into_iter()
            .map(|(m, c)| if m == "1" { format!("({c})") } else { format!("({c})*{m}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct ClassRepr {
    model: Vec<u32>,
    terms: BTreeMap<String, YPoly>,
}

impl Serialize for CohClass {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ClassRepr {
            model: self.model.factors.clone(),
            terms: self.terms().iter().map(|(e, c)| (exponent_key(e), c.clone())).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CohClass {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = ClassRepr::deserialize(deserializer)?;
        let model = ChowModel::new(repr.model);
        let mut c = model.zero();
        for (k, v) in repr.terms {
            let e = parse_exponent_key(&k, model.nvars()).map_err(serde::de::Error::custom)?;
            if !model.admits(&e) {
                return Err(serde::de::Error::custom(format!("monomial {k} outside model {model}")));
            }
            c.poly.add_term(e, v);
        }
        Ok(c)
    }
}

/// Additive map between models given by the images of basis monomials.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LinearMap {
    source: ChowModel,
    target: ChowModel,
    images: BTreeMap<Exponents, CohClass>,
}

impl LinearMap {
    pub fn new(source: ChowModel, target: ChowModel, images: BTreeMap<Exponents, CohClass>) -> Result<Self> {
        for (e, img) in &images {
            if !source.admits(e) {
                return Err(Error::ModelMismatch(format!(
                    "monomial {} outside model {source}",
                    exponent_key(e)
                )));
            }
            if img.model() != &target {
                return Err(Error::ModelMismatch(format!("image in {} expected {target}", img.model())));
            }
        }
        let images = images.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(LinearMap { source, target, images })
    }

    pub fn from_fn(source: &ChowModel, target: &ChowModel, f: impl Fn(&[u32]) -> CohClass) -> Self {
        let images = source
            .basis()
            .into_iter()
            .map(|e| {
                let img = f(&e);
                (e, img)
            })
            .filter(|(_, c)| !c.is_zero())
            .collect();
        LinearMap {
            source: source.clone(),
            target: target.clone(),
            images,
        }
    }

    pub fn identity(model: &ChowModel) -> Self {
        Self::from_fn(model, model, |e| model.monomial(e.to_vec(), YPoly::one()))
    }

    pub fn source(&self) -> &ChowModel {
        &self.source
    }

    pub fn target(&self) -> &ChowModel {
        &self.target
    }

    pub fn images(&self) -> &BTreeMap<Exponents, CohClass> {
        &self.images
    }

    pub fn image(&self, e: &[u32]) -> CohClass {
        self.images.get(e).cloned().unwrap_or_else(|| self.target.zero())
    }

    pub fn apply(&self, c: &CohClass) -> Result<CohClass> {
        if c.model() != &self.source {
            return Err(Error::ModelMismatch(format!(
                "class in {} pushed along a map from {}",
                c.model(),
                self.source
            )));
        }
        let mut out = self.target.zero();
        for (e, coeff) in c.terms() {
            if let Some(img) = self.images.get(e) {
                out = out.add(&img.scale(coeff))?;
            }
        }
        Ok(out)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &LinearMap) -> Result<LinearMap> {
        if self.target != other.source {
            return Err(Error::ModelMismatch(format!(
                "cannot compose maps {} -> {} and {} -> {}",
                self.source, self.target, other.source, other.target
            )));
        }
        let mut images = BTreeMap::new();
        for (e, img) in &self.images {
            let c = other.apply(img)?;
            if !c.is_zero() {
                images.insert(e.clone(), c);
            }
        }
        Ok(LinearMap {
            source: self.source.clone(),
            target: other.target.clone(),
            images,
        })
    }

    pub fn scale_int(&self, n: i64) -> LinearMap {
        LinearMap {
            source: self.source.clone(),
            target: self.target.clone(),
            images: self
                .images
                .iter()
                .map(|(e, c)| (e.clone(), c.scale_int(n)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// Renames source and target variables: `sigma[i]` is the new position of
    /// old source factor `i`, likewise `tau` for the target.
    pub fn permuted(&self, sigma: &[usize], tau: &[usize]) -> LinearMap {
        let src = permute_model(&self.source, sigma);
        let tgt = permute_model(&self.target, tau);
        let images = self
            .images
            .iter()
            .map(|(e, c)| (permute_exps(e, sigma), permute_class(c, &tgt, tau)))
            .collect();
        LinearMap {
            source: src,
            target: tgt,
            images,
        }
    }

    /// Serialized as `{source monomial: target class terms}`.
    pub fn to_json_map(&self) -> BTreeMap<String, BTreeMap<String, YPoly>> {
        self.images
            .iter()
            .map(|(e, c)| {
                (
                    exponent_key(e),
                    c.terms().iter().map(|(f, v)| (exponent_key(f), v.clone())).collect(),
                )
            })
            .collect()
    }

    pub fn from_json_map(
        source: &ChowModel,
        target: &ChowModel,
        map: &BTreeMap<String, BTreeMap<String, YPoly>>,
    ) -> Result<LinearMap> {
        let mut images = BTreeMap::new();
        for (k, terms) in map {
            let e = parse_exponent_key(k, source.nvars())?;
            let mut img = target.zero();
            for (k2, v) in terms {
                let f = parse_exponent_key(k2, target.nvars())?;
                if !target.admits(&f) {
                    return Err(Error::Catalog(format!("monomial {k2} outside model {target}")));
                }
                img = img.add(&target.monomial(f, v.clone()))?;
            }
            images.insert(e, img);
        }
        LinearMap::new(source.clone(), target.clone(), images)
    }
}

pub(crate) fn permute_exps(e: &[u32], sigma: &[usize]) -> Exponents {
    let mut out = vec![0; e.len()];
    for (i, &a) in e.iter().enumerate() {
        out[sigma[i]] = a;
    }
    out
}

pub(crate) fn permute_model(m: &ChowModel, sigma: &[usize]) -> ChowModel {
    ChowModel::new(permute_exps(m.factors(), sigma))
}

pub(crate) fn permute_class(c: &CohClass, model: &ChowModel, sigma: &[usize]) -> CohClass {
    let mut out = model.zero();
    for (e, v) in c.terms() {
        out.poly.add_term(permute_exps(e, sigma), v.clone());
    }
    out
}

/// Ring homomorphism given by images of the target generators, pulling classes
/// on `target` back to `source`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RingMap {
    source: ChowModel,
    target: ChowModel,
    gens: Vec<CohClass>,
}

impl RingMap {
    pub fn new(source: ChowModel, target: ChowModel, gens: Vec<CohClass>) -> Result<Self> {
        if gens.len() != target.nvars() || gens.iter().any(|g| g.model() != &source) {
            return Err(Error::ModelMismatch(format!("bad generator images for {target} -> {source}")));
        }
        Ok(RingMap { source, target, gens })
    }

    pub fn identity(model: &ChowModel) -> Self {
        RingMap {
            source: model.clone(),
            target: model.clone(),
            gens: (0..model.nvars()).map(|i| model.generator(i)).collect(),
        }
    }

    pub fn source(&self) -> &ChowModel {
        &self.source
    }

    pub fn target(&self) -> &ChowModel {
        &self.target
    }

    pub fn gens(&self) -> &[CohClass] {
        &self.gens
    }

    pub fn apply(&self, c: &CohClass) -> Result<CohClass> {
        if c.model() != &self.target {
            return Err(Error::ModelMismatch(format!(
                "class in {} pulled along a map to {}",
                c.model(),
                self.target
            )));
        }
        let mut out = self.source.zero();
        for (e, coeff) in c.terms() {
            let mut m = self.source.constant(coeff.clone());
            for (g, &a) in self.gens.iter().zip(e) {
                if a > 0 {
                    m = m.mul(&g.pow(a)?)?;
                }
            }
            out = out.add(&m)?;
        }
        Ok(out)
    }

    /// Pullback along `self` after `other`: `(other ∘ self)^* = self^* other^*`
    /// where `other` pulls from its target to `self.target`.
    pub fn then(&self, other: &RingMap) -> Result<RingMap> {
        if self.target != other.source {
            return Err(Error::ModelMismatch("ring maps not composable".into()));
        }
        let gens = other.gens.iter().map(|g| self.apply(g)).collect::<Result<Vec<_>>>()?;
        Ok(RingMap {
            source: self.source.clone(),
            target: other.target.clone(),
            gens,
        })
    }
}
