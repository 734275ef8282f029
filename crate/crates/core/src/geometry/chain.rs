use std::fmt;
use std::sync::Arc;

use super::chow::{LinearMap, RingMap};
use super::morphism::{Morphism, MorphismKind};
use super::space::Space;
use super::square::compose;
use super::CohClass;
use crate::error::{Error, Result};

/// A composable sequence of catalog morphisms, kept in fused normal form.
#[derive(Clone, Debug)]
pub struct Chain {
    start: Arc<Space>,
    steps: Vec<Arc<Morphism>>,
}

impl Chain {
    pub fn identity(start: Arc<Space>) -> Self {
        Chain { start, steps: Vec::new() }
    }

    pub fn single(m: Arc<Morphism>) -> Self {
        Chain::identity(m.source().clone()).then(&m).expect("single step is composable")
    }

    pub fn from_steps(start: Arc<Space>, steps: &[Arc<Morphism>]) -> Result<Self> {
        let mut c = Chain::identity(start);
        for m in steps {
            c = c.then(m)?;
        }
        Ok(c)
    }

    /// Appends `m`, fusing adjacent steps where possible.
    pub fn then(&self, m: &Arc<Morphism>) -> Result<Chain> {
        if m.source().as_ref() != self.target().as_ref() {
            return Err(Error::NotComposable(format!(
                "{} does not start at {}",
                m.name(),
                self.target().name()
            )));
        }
        let mut steps = self.steps.clone();
        if !matches!(m.kind(), MorphismKind::Identity) {
            steps.push(m.clone());
        }
        while steps.len() >= 2 {
            let b = steps.pop().expect("len >= 2");
            let a = steps.pop().expect("len >= 2");
            match compose(&a, &b)? {
                Some(fused) => steps.push(fused),
                None => {
                    steps.push(a);
                    steps.push(b);
                    break;
                }
            }
        }
        Ok(Chain {
            start: self.start.clone(),
            steps,
        })
    }

    pub fn concat(&self, other: &Chain) -> Result<Chain> {
        if other.source().as_ref() != self.target().as_ref() {
            return Err(Error::NotComposable(format!(
                "chain from {} cannot follow chain ending at {}",
                other.source().name(),
                self.target().name()
            )));
        }
        let mut c = self.clone();
        for m in &other.steps {
            c = c.then(m)?;
        }
        Ok(c)
    }

    pub fn source(&self) -> &Arc<Space> {
        &self.start
    }

    pub fn target(&self) -> &Arc<Space> {
        self.steps.last().map(|m| m.target()).unwrap_or(&self.start)
    }

    pub fn steps(&self) -> &[Arc<Morphism>] {
        &self.steps
    }

    pub fn is_identity(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn rel_dim(&self) -> i64 {
        self.source().dim() as i64 - self.target().dim() as i64
    }

    pub fn codim(&self) -> i64 {
        -self.rel_dim()
    }

    /// Composite pushforward on ambient models.
    pub fn push_map(&self) -> Result<LinearMap> {
        let mut acc = LinearMap::identity(self.start.ambient());
        for m in &self.steps {
            acc = acc.then(m.push_map())?;
        }
        Ok(acc)
    }

    pub fn pushforward(&self, c: &CohClass) -> Result<CohClass> {
        let mut acc = c.clone();
        for m in &self.steps {
            acc = m.pushforward(&acc)?;
        }
        Ok(acc)
    }

    /// Composite cohomological pullback from the target to the source.
    pub fn ring_map(&self) -> Result<RingMap> {
        let mut acc = RingMap::identity(self.start.ambient());
        for m in &self.steps {
            let r = m.ring_map().ok_or_else(|| {
                Error::UnsupportedPullback(format!("{} has no cohomological pullback", m.name()))
            })?;
            acc = acc.then(r)?;
        }
        Ok(acc)
    }

    pub fn names(&self) -> Vec<String> {
        self.steps.iter().map(|m| m.name().to_string()).collect()
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            return write!(f, "id_{}", self.start.name());
        }
        write!(f, "{}", self.names().join(" ; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ChowModel;

    #[test]
    fn embedding_then_projection_fuses() {
        let p2 = Arc::new(Space::ambient_space("P2", vec![2]));
        let pt = Arc::new(Space::point());
        let cubic = Arc::new(Space::new("cubic", ChowModel::projective(2), vec![vec![3]], true).unwrap());
        let i = Arc::new(Morphism::ci_embedding("i", cubic.clone(), p2.clone()).unwrap());
        let c = Arc::new(Morphism::projection("c", p2.clone(), pt.clone(), vec![]).unwrap());
        let chain = Chain::from_steps(cubic.clone(), &[i.clone(), c]).unwrap();
        assert_eq!(chain.steps().len(), 1);
        assert_eq!(chain.rel_dim(), 1);
        assert!(Chain::from_steps(cubic, &[i.clone(), i]).is_err());
    }

    #[test]
    fn ring_map_composes() {
        let p2 = Arc::new(Space::ambient_space("P2", vec![2]));
        let pt = Arc::new(Space::point());
        let j = Arc::new(Morphism::point_inclusion("j", pt.clone(), p2.clone(), vec![]).unwrap());
        let chain = Chain::single(j);
        let r = chain.ring_map().unwrap();
        assert_eq!(r.gens().len(), 1);
        assert!(r.gens()[0].is_zero());
    }
}
