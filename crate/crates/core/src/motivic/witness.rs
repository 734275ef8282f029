use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::CohClass;
use crate::transforms::hirzebruch_class;

use super::Cycle;

/// A claimed motivic relation `left = right` in the Grothendieck group,
/// checked through the Hirzebruch class of both sides.
#[derive(Clone, Debug)]
pub struct DecompositionWitness {
    pub name: String,
    pub left: Cycle,
    pub right: Cycle,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessOutcome {
    pub name: String,
    pub holds: bool,
    pub left: CohClass,
    pub right: CohClass,
}

impl DecompositionWitness {
    pub fn new(name: impl Into<String>, left: Cycle, right: Cycle) -> Result<Self> {
        if left.x().as_ref() != right.x().as_ref() {
            return Err(Error::BaseMismatch("witness sides live over different spaces".into()));
        }
        Ok(DecompositionWitness {
            name: name.into(),
            left,
            right,
        })
    }

    pub fn check(&self, order: usize) -> Result<WitnessOutcome> {
        let left = hirzebruch_class(&self.left, order)?;
        let right = hirzebruch_class(&self.right, order)?;
        Ok(WitnessOutcome {
            name: self.name.clone(),
            holds: left == right,
            left,
            right,
        })
    }
}
