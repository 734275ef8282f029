//! Milnor classes of hypersurfaces with isolated singularities.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Rational, YPoly};
use crate::genus::{chern_series, hirzebruch_series};
use crate::geometry::{Chain, CohClass, Morphism, Space};
use crate::motivic::{Cycle, Flavor};
use crate::transforms::{fj_class, hirzebruch_class_with};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularPoint {
    pub label: String,
    pub milnor_number: u64,
}

/// A hypersurface `X`, its isolated singular points with Milnor numbers, and
/// a smooth decomposition representing `[X -> X]`.
#[derive(Clone, Debug)]
pub struct SingularHypersurfaceData {
    pub name: String,
    pub space: Arc<Space>,
    pub singular_points: Vec<SingularPoint>,
    pub decomposition: Cycle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MilnorReport {
    pub name: String,
    pub dim: usize,
    pub fj_class: CohClass,
    pub fj_degree: YPoly,
    pub chi_y: YPoly,
    pub euler_characteristic: Rational,
    pub sum_mu: u64,
    pub classical_milnor_degree: Rational,
    pub hirzebruch_milnor_degree: YPoly,
    pub verdicts: Vec<Verdict>,
}

impl MilnorReport {
    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }
}

fn base_to_point(x: &Arc<Space>) -> Result<Chain> {
    let pt = Arc::new(Space::point());
    Ok(Chain::single(Arc::new(Morphism::projection(
        format!("{}->pt", x.name()),
        x.clone(),
        pt,
        Vec::new(),
    )?)))
}

impl SingularHypersurfaceData {
    pub fn new(
        name: impl Into<String>,
        space: Arc<Space>,
        singular_points: Vec<SingularPoint>,
        decomposition: Cycle,
    ) -> Result<Self> {
        let name = name.into();
        if space.rows().len() != 1 {
            return Err(Error::Domain(format!("{name}: expected a single defining equation")));
        }
        if decomposition.x().as_ref() != space.as_ref() {
            return Err(Error::BaseMismatch(format!("{name}: decomposition lives over {}", decomposition.x().name())));
        }
        if decomposition.s().ambient().nvars() != 0 {
            return Err(Error::BaseMismatch(format!("{name}: decomposition must be over a point")));
        }
        if decomposition.is_empty() {
            return Err(Error::Domain(format!("{name}: missing decomposition")));
        }
        Ok(SingularHypersurfaceData {
            name,
            space,
            singular_points,
            decomposition,
        })
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn sum_mu(&self) -> u64 {
        self.singular_points.iter().map(|p| p.milnor_number).sum()
    }

    /// `[X -> X]` over `X -> pt`, the l.c.i. input of the relative class.
    pub fn lci_cycle(&self) -> Result<Cycle> {
        Cycle::generator(
            base_to_point(&self.space)?,
            Flavor::Lci,
            Chain::identity(self.space.clone()),
        )
    }

    /// Same data with another representative of `[X -> X]`.
    pub fn with_decomposition(&self, decomposition: Cycle) -> Result<Self> {
        SingularHypersurfaceData::new(
            self.name.clone(),
            self.space.clone(),
            self.singular_points.clone(),
            decomposition,
        )
    }
}

fn sign(dim: usize) -> Rational {
    Rational::sign_pow(dim as i64)
}

/// `(-1)^{dim X} (deg c^{FJ}(X) - chi(X))`, with both sides evaluated
/// directly through the Chern genus.
pub fn classical_milnor_degree(d: &SingularHypersurfaceData) -> Result<Rational> {
    let dim = d.dim();
    let g = chern_series(dim.max(1));
    let fj = fj_class(&g, &d.lci_cycle()?)?.degree();
    let chi = hirzebruch_class_with(&g, &d.decomposition)?.degree();
    let diff = (fj - chi).as_constant().ok_or_else(|| Error::Domain("Chern degree depends on y".into()))?;
    Ok(&sign(dim) * &diff)
}

pub fn hirzebruch_milnor_report(d: &SingularHypersurfaceData, order: usize) -> Result<MilnorReport> {
    let dim = d.dim();
    let order = order.max(dim);
    let g = hirzebruch_series(order);
    let fj = fj_class(&g, &d.lci_cycle()?)?;
    let t = hirzebruch_class_with(&g, &d.decomposition)?;
    let fj_degree = fj.degree();
    let chi_y = t.degree();
    let hm = (&fj_degree - &chi_y).scale(&sign(dim));
    let classical = classical_milnor_degree(d)?;
    let minus_one = Rational::from_int(-1);
    let sum_mu = d.sum_mu();

    let codim = d.space.rows().len();
    let top = t.component(codim);
    let verdicts = vec![
        Verdict {
            check: "classical degree equals sum of Milnor numbers".into(),
            passed: classical == Rational::from_int(sum_mu as i64),
        },
        Verdict {
            check: "Hirzebruch-Milnor degree at y=-1 equals classical degree".into(),
            passed: hm.eval(&minus_one) == classical,
        },
        Verdict {
            check: "decomposition has top class [X]".into(),
            passed: top == d.space.fundamental_class(),
        },
    ];
    Ok(MilnorReport {
        name: d.name.clone(),
        dim,
        euler_characteristic: chi_y.eval(&minus_one),
        fj_class: fj,
        fj_degree,
        chi_y,
        sum_mu,
        classical_milnor_degree: classical,
        hirzebruch_milnor_degree: hm,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ChowModel, LinearMap};

    fn nodal_data(mu: u64) -> SingularHypersurfaceData {
        let m = ChowModel::projective(2);
        let x = Arc::new(Space::new("nodal", m.clone(), vec![vec![3]], false).unwrap());
        let p1 = Arc::new(Space::ambient_space("P1", vec![1]));
        let pt = Arc::new(Space::point());
        let push = LinearMap::from_fn(p1.ambient(), &m, |e| if e[0] == 0 { m.linear_form(&[3]) } else { m.point_class() });
        let nu = Arc::new(Morphism::finite_modification("nu", p1, x.clone(), push, 1).unwrap());
        let j = Arc::new(Morphism::point_inclusion("j", pt, x.clone(), vec![]).unwrap());
        let base = base_to_point(&x).unwrap();
        let mut dec = Cycle::zero(base, Flavor::Sm);
        dec.add_term(1, Chain::single(nu)).unwrap();
        dec.add_term(-1, Chain::single(j)).unwrap();
        let pts = vec![SingularPoint {
            label: "node".into(),
            milnor_number: mu,
        }];
        SingularHypersurfaceData::new("nodal cubic", x, pts, dec).unwrap()
    }

    #[test]
    fn nodal_cubic() {
        let d = nodal_data(1);
        assert_eq!(classical_milnor_degree(&d).unwrap(), Rational::one());
        let r = hirzebruch_milnor_report(&d, 4).unwrap();
        assert_eq!(r.fj_degree, YPoly::zero());
        assert_eq!(r.chi_y, -YPoly::y());
        assert_eq!(r.hirzebruch_milnor_degree, -YPoly::y());
        assert!(r.all_passed(), "{:?}", r.verdicts);
    }

    #[test]
    fn wrong_milnor_number_is_flagged() {
        let r = hirzebruch_milnor_report(&nodal_data(2), 4).unwrap();
        assert!(!r.verdicts[0].passed);
        assert!(r.verdicts[1].passed);
    }
}
