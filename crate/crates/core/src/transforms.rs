//! Characteristic-class transformations evaluated on cycles.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::genus::{hirzebruch_series, multiplicative_class, GenusSeries};
use crate::geometry::{Chain, CohClass};
use crate::ktheory::{chain_relative_tangent, virtual_tangent};
use crate::motivic::{lci_check_chain, Cycle, Flavor, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TangentPolicy {
    /// `g(TV) ∩ [V]`.
    Absolute,
    /// `g(T_{h∘p}) ∩ [V]`.
    Relative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SignPolicy {
    Plain,
    /// `(-1)^{dim X} (relative - absolute)`.
    Milnor,
}

#[derive(Clone, Debug)]
pub struct TransformSpec {
    pub genus: GenusSeries,
    pub tangent: TangentPolicy,
    pub sign: SignPolicy,
}

impl TransformSpec {
    pub fn gamma(genus: GenusSeries) -> Self {
        TransformSpec {
            genus,
            tangent: TangentPolicy::Absolute,
            sign: SignPolicy::Plain,
        }
    }

    pub fn fulton_johnson(genus: GenusSeries) -> Self {
        TransformSpec {
            genus,
            tangent: TangentPolicy::Relative,
            sign: SignPolicy::Plain,
        }
    }

    /// The Milnor policy evaluates both tangent paths, so `tangent` is ignored.
    pub fn milnor(genus: GenusSeries) -> Self {
        TransformSpec {
            genus,
            tangent: TangentPolicy::Relative,
            sign: SignPolicy::Milnor,
        }
    }

    pub fn apply(&self, c: &Cycle) -> Result<CohClass> {
        match (self.sign, self.tangent) {
            (SignPolicy::Milnor, _) => milnor_transform_with(&self.genus, c),
            (SignPolicy::Plain, TangentPolicy::Relative) => fj_class(&self.genus, c),
            (SignPolicy::Plain, TangentPolicy::Absolute) => hirzebruch_class_with(&self.genus, c),
        }
    }
}

/// `p_*(g(TV) ∩ [V])` for a smooth source.
fn smooth_term(g: &GenusSeries, push: &Chain) -> Result<CohClass> {
    let v = push.source();
    let tv = virtual_tangent(v)?;
    let local = multiplicative_class(g, &tv, v.ambient())?.mul(&v.fundamental_class())?;
    push.pushforward(&local)
}

/// Absolute term, routed through the source's decomposition when singular.
fn absolute_term(g: &GenusSeries, term: &Term, allow_decomposition: bool) -> Result<CohClass> {
    let v = term.source();
    if v.is_smooth() {
        return smooth_term(g, &term.push);
    }
    let res = match (allow_decomposition, v.resolution()) {
        (true, Some(res)) => res,
        _ => {
            return Err(Error::NonSmoothSource(format!(
                "{} is singular{}",
                v.name(),
                if allow_decomposition { " and has no decomposition" } else { "" }
            )))
        }
    };
    let mut on_v = v.ambient().zero();
    for piece in &res.pieces {
        let w = &piece.source;
        let local = multiplicative_class(g, &virtual_tangent(w)?, w.ambient())?.mul(&w.fundamental_class())?;
        on_v = on_v.add(&piece.push.apply(&local)?.scale_int(piece.coeff))?;
    }
    term.push.pushforward(&on_v)
}

fn sum_terms(c: &Cycle, mut f: impl FnMut(&Term) -> Result<CohClass>) -> Result<CohClass> {
    let mut acc = c.x().ambient().zero();
    for t in c.terms() {
        acc = acc.add(&f(t)?.scale_int(t.coeff))?;
    }
    Ok(acc)
}

/// `sum_i a_i p_{i*}(g(TV_i) ∩ [V_i])`; every source must be smooth.
pub fn gamma_class(g: &GenusSeries, c: &Cycle) -> Result<CohClass> {
    sum_terms(c, |t| absolute_term(g, t, false))
}

/// As [`gamma_class`], but singular sources are evaluated through their
/// smooth decompositions.
pub fn hirzebruch_class_with(g: &GenusSeries, c: &Cycle) -> Result<CohClass> {
    sum_terms(c, |t| absolute_term(g, t, true))
}

/// `T_{y*}` with the Hirzebruch series truncated at `order`.
pub fn hirzebruch_class(c: &Cycle, order: usize) -> Result<CohClass> {
    hirzebruch_class_with(&hirzebruch_series(order), c)
}

/// `sum_i a_i p_{i*}(g(T_{h∘p_i}) ∩ [V_i])`.
pub fn fj_class(g: &GenusSeries, c: &Cycle) -> Result<CohClass> {
    if c.flavor() != Flavor::Lci {
        return Err(Error::NotLci("relative classes need an l.c.i. cycle".into()));
    }
    sum_terms(c, |t| {
        let cert = lci_check_chain(&t.route);
        if !cert.accepted {
            return Err(Error::NotLci(format!("{}: {cert}", t.route)));
        }
        let v = t.source();
        let tr = chain_relative_tangent(&t.route)?;
        let local = multiplicative_class(g, &tr, v.ambient())?.mul(&v.fundamental_class())?;
        t.push.pushforward(&local)
    })
}

/// `(-1)^{dim X} (T^{FJ}_{y*} - T_{y*})` for a general genus.
pub fn milnor_transform_with(g: &GenusSeries, c: &Cycle) -> Result<CohClass> {
    let fj = fj_class(g, c)?;
    let t = hirzebruch_class_with(g, c)?;
    Ok(fj.sub(&t)?.scale_rational(&Rational::sign_pow(c.x().dim() as i64)))
}

/// The motivic Hirzebruch–Milnor class `MT_{y*}`.
pub fn milnor_transform(c: &Cycle, order: usize) -> Result<CohClass> {
    milnor_transform_with(&hirzebruch_series(order), c)
}

pub fn specialize_class(c: &CohClass, y0: &Rational) -> CohClass {
    c.specialize(y0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::YPoly;
    use crate::genus::{chern_series, todd_series};
    use crate::geometry::{ChowModel, LinearMap, Morphism, Resolution, ResolutionPiece, Space};
    use std::sync::Arc;

    fn to_point(x: &Arc<Space>) -> Chain {
        let pt = Arc::new(Space::point());
        Chain::single(Arc::new(Morphism::projection("c", x.clone(), pt, vec![]).unwrap()))
    }

    fn self_cycle(x: &Arc<Space>, flavor: Flavor) -> Cycle {
        Cycle::generator(to_point(x), flavor, Chain::identity(x.clone())).unwrap()
    }

    fn chi_y_pn(n: usize) -> YPoly {
        (0..=n).fold(YPoly::zero(), |acc, i| acc + YPoly::from_int(-1).pow(i as u32) * YPoly::y().pow(i as u32))
    }

    fn nodal() -> Arc<Space> {
        let m = ChowModel::projective(2);
        let p1 = Arc::new(Space::ambient_space("P1", vec![1]));
        let pt = Arc::new(Space::point());
        let nu = LinearMap::from_fn(p1.ambient(), &m, |e| if e[0] == 0 { m.linear_form(&[3]) } else { m.point_class() });
        let j = LinearMap::from_fn(pt.ambient(), &m, |_| m.point_class());
        let res = Resolution {
            pieces: vec![
                ResolutionPiece { coeff: 1, source: p1, push: nu },
                ResolutionPiece { coeff: -1, source: pt, push: j },
            ],
        };
        Arc::new(Space::new("nodal", m, vec![vec![3]], false).unwrap().with_resolution(res).unwrap())
    }

    #[test]
    fn chi_y_of_projective_spaces() {
        for n in 0..=4u32 {
            let pn = Arc::new(Space::ambient_space(format!("P{n}"), if n == 0 { vec![] } else { vec![n] }));
            let t = hirzebruch_class(&self_cycle(&pn, Flavor::Sm), 6).unwrap();
            assert_eq!(t.degree(), chi_y_pn(n as usize), "n = {n}");
        }
    }

    #[test]
    fn chi_y_of_product() {
        let x = Arc::new(Space::ambient_space("P1xP1", vec![1, 1]));
        let t = hirzebruch_class(&self_cycle(&x, Flavor::Sm), 4).unwrap();
        let one_minus_y = YPoly::from_ints(&[1, -1]);
        assert_eq!(t.degree(), &one_minus_y * &one_minus_y);
    }

    #[test]
    fn chern_specialization_of_p2() {
        let p2 = Arc::new(Space::ambient_space("P2", vec![2]));
        let t = hirzebruch_class(&self_cycle(&p2, Flavor::Sm), 4).unwrap().specialize(&Rational::from_int(-1));
        let m = p2.ambient();
        let expected = m.one().add(&m.linear_form(&[3])).unwrap().add(&m.point_class().scale_int(3)).unwrap();
        assert_eq!(t, expected);
        let l = hirzebruch_class(&self_cycle(&p2, Flavor::Sm), 4).unwrap().specialize(&Rational::one());
        assert_eq!(l.degree(), YPoly::one());
    }

    #[test]
    fn fj_of_smooth_cubic_and_smooth_vanishing() {
        let cubic = Arc::new(Space::new("cubic", ChowModel::projective(2), vec![vec![3]], true).unwrap());
        let c = self_cycle(&cubic, Flavor::Lci);
        let fj = fj_class(&chern_series(4), &c).unwrap();
        assert_eq!(fj, cubic.ambient().linear_form(&[3]));
        assert_eq!(fj.degree(), YPoly::zero());
        assert_eq!(fj_class(&todd_series(4), &c).unwrap(), gamma_class(&todd_series(4), &c).unwrap());
        assert!(milnor_transform(&c, 4).unwrap().is_zero());
    }

    #[test]
    fn identity_base_gives_unit_class() {
        let p1 = Arc::new(Space::ambient_space("P1", vec![1]));
        let c = Cycle::generator(Chain::identity(p1.clone()), Flavor::Lci, Chain::identity(p1.clone())).unwrap();
        assert_eq!(fj_class(&hirzebruch_series(3), &c).unwrap(), p1.ambient().one());
    }

    #[test]
    fn nodal_cubic_milnor_degree() {
        let x = nodal();
        let c = self_cycle(&x, Flavor::Lci);
        let mt = milnor_transform(&c, 4).unwrap();
        assert_eq!(mt.degree(), -YPoly::y());
        assert_eq!(mt.specialize(&Rational::from_int(-1)).degree(), YPoly::one());
        assert!(matches!(gamma_class(&todd_series(2), &c), Err(Error::NonSmoothSource(_))));
    }
}
