//! Virtual bundles as `(rank, total Chern class)` pairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Chain, ChowModel, CohClass, Morphism, MorphismKind, RingMap, Space};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VirtualBundle {
    rank: i64,
    chern: CohClass,
}

impl VirtualBundle {
    pub fn new(rank: i64, chern: CohClass) -> Result<Self> {
        if !chern.series().constant_term().is_one() {
            return Err(Error::Domain("total Chern class must have constant term 1".into()));
        }
        Ok(VirtualBundle { rank, chern })
    }

    pub fn trivial(model: &ChowModel, rank: i64) -> Self {
        VirtualBundle {
            rank,
            chern: model.one(),
        }
    }

    /// The line bundle with first Chern class `sum_i d_i h_i`.
    pub fn line(model: &ChowModel, degrees: &[u32]) -> Self {
        VirtualBundle {
            rank: 1,
            chern: model.one().add(&model.linear_form(degrees)).expect("same model"),
        }
    }

    pub fn rank(&self) -> i64 {
        self.rank
    }

    pub fn chern(&self) -> &CohClass {
        &self.chern
    }

    pub fn model(&self) -> &ChowModel {
        self.chern.model()
    }

    pub fn add(&self, other: &VirtualBundle) -> Result<VirtualBundle> {
        Ok(VirtualBundle {
            rank: self.rank + other.rank,
            chern: self.chern.mul(&other.chern)?,
        })
    }

    pub fn neg(&self) -> Result<VirtualBundle> {
        Ok(VirtualBundle {
            rank: -self.rank,
            chern: self.chern.invert()?,
        })
    }

    pub fn sub(&self, other: &VirtualBundle) -> Result<VirtualBundle> {
        self.add(&other.neg()?)
    }

    pub fn pullback(&self, f: &RingMap) -> Result<VirtualBundle> {
        Ok(VirtualBundle {
            rank: self.rank,
            chern: f.apply(&self.chern)?,
        })
    }
}

/// Tangent bundle of a product of projective spaces, from the Euler sequence.
pub fn ambient_tangent(model: &ChowModel) -> VirtualBundle {
    let mut chern = model.one();
    for (i, &n) in model.factors().iter().enumerate() {
        let f = model.one().add(&model.generator(i)).expect("same model");
        chern = chern.mul(&f.pow(n + 1).expect("same model")).expect("same model");
    }
    VirtualBundle {
        rank: model.dim() as i64,
        chern,
    }
}

pub fn tangent_bundle(m: &Space) -> Result<VirtualBundle> {
    if !m.is_ambient() {
        return Err(Error::Domain(format!("{} is not a product of projective spaces", m.name())));
    }
    Ok(ambient_tangent(m.ambient()))
}

pub fn normal_bundle(x: &Space) -> VirtualBundle {
    let m = x.ambient();
    let mut n = VirtualBundle::trivial(m, 0);
    for row in x.rows() {
        n = n.add(&VirtualBundle::line(m, row)).expect("same model");
    }
    n
}

/// `T_X = TM|_X - N_X M`.
pub fn virtual_tangent(x: &Space) -> Result<VirtualBundle> {
    ambient_tangent(x.ambient()).sub(&normal_bundle(x))
}

/// `T_f = T_source - f^* T_target`.
pub fn relative_tangent(f: &Morphism) -> Result<VirtualBundle> {
    match f.kind() {
        MorphismKind::Identity => Ok(VirtualBundle::trivial(f.source().ambient(), 0)),
        MorphismKind::FiniteModification { .. } => Err(Error::Unsupported(format!(
            "relative tangent of finite modification {}",
            f.name()
        ))),
        _ => {
            let r = f.ring_map().expect("structural morphisms carry a pullback");
            virtual_tangent(f.source())?.sub(&virtual_tangent(f.target())?.pullback(r)?)
        }
    }
}

/// Relative tangent of a composite, `T_source - chain^* T_target`.
pub fn chain_relative_tangent(chain: &Chain) -> Result<VirtualBundle> {
    if chain
        .steps()
        .iter()
        .any(|m| matches!(m.kind(), MorphismKind::FiniteModification { .. }))
    {
        return Err(Error::Unsupported(format!("relative tangent of {chain}")));
    }
    let r = chain.ring_map()?;
    virtual_tangent(chain.source())?.sub(&virtual_tangent(chain.target())?.pullback(&r)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::YPoly;
    use std::sync::Arc;

    fn sp(name: &str, f: Vec<u32>) -> Arc<Space> {
        Arc::new(Space::ambient_space(name, f))
    }

    #[test]
    fn tangent_of_projective_spaces() {
        let t1 = tangent_bundle(&sp("P1", vec![1])).unwrap();
        assert_eq!(t1.rank(), 1);
        assert_eq!(t1.chern(), &t1.model().linear_form(&[2]).add(&t1.model().one()).unwrap());
        let t2 = tangent_bundle(&sp("P2", vec![2])).unwrap();
        assert_eq!(t2.chern().coeff(&[1]), YPoly::from_int(3));
        assert_eq!(t2.chern().coeff(&[2]), YPoly::from_int(3));
        let t11 = tangent_bundle(&sp("P1xP1", vec![1, 1])).unwrap();
        assert_eq!(t11.chern().coeff(&[1, 1]), YPoly::from_int(4));
    }

    #[test]
    fn cubic_has_trivial_first_chern_class() {
        let cubic = Space::new("cubic", ChowModel::projective(2), vec![vec![3]], true).unwrap();
        let t = virtual_tangent(&cubic).unwrap();
        assert_eq!(t.rank(), 1);
        assert_eq!(t.chern().coeff(&[1]), YPoly::zero());
        assert_eq!(t.chern().coeff(&[2]), YPoly::from_int(3));
    }

    #[test]
    fn relative_tangents() {
        let p1p2 = sp("P1xP2", vec![1, 2]);
        let p2 = sp("P2", vec![2]);
        let f = Morphism::projection("pr", p1p2.clone(), p2.clone(), vec![1]).unwrap();
        let t = relative_tangent(&f).unwrap();
        assert_eq!(t.rank(), 1);
        let m = p1p2.ambient();
        assert_eq!(t.chern(), &m.one().add(&m.generator(0)).unwrap().pow(2).unwrap());
        let cubic = Arc::new(Space::new("cubic", ChowModel::projective(2), vec![vec![3]], true).unwrap());
        let i = Morphism::ci_embedding("i", cubic, p2.clone()).unwrap();
        let ti = relative_tangent(&i).unwrap();
        assert_eq!(ti.rank(), -1);
        assert_eq!(ti.chern(), &VirtualBundle::line(p2.ambient(), &[3]).chern().invert().unwrap());
        assert_eq!(relative_tangent(&Morphism::identity(p2.clone())).unwrap().rank(), 0);
    }

    #[test]
    fn presentation_independence() {
        let m = ChowModel::new(vec![1, 2]);
        let e = VirtualBundle::line(&m, &[1, 2]);
        let f = VirtualBundle::line(&m, &[0, 3]);
        let back = e.add(&f).unwrap().sub(&f).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn bundle_json() {
        let m = ChowModel::projective(1);
        let js = serde_json::to_string(&VirtualBundle::line(&m, &[2])).unwrap();
        assert_eq!(js, r#"{"rank":1,"chern":{"model":[1],"terms":{"0":["1"],"1":["2"]}}}"#);
    }
}
