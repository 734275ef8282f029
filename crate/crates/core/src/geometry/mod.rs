//! Products of projective spaces, complete intersections in them, and the
//! morphisms between those that the engine understands.

mod chain;
mod chow;
mod key;
mod morphism;
mod space;
mod square;

pub use chain::Chain;
pub use chow::{ChowModel, CohClass, LinearMap, RingMap};
pub use key::{matrix_key, MatrixKey};
pub use morphism::{Morphism, MorphismKind};
pub use space::{canonical_source, Resolution, ResolutionPiece, Space, SpaceKey};
pub use square::{compose, fiber_square, product_with, tensor_identity, FiberSquare};

use crate::exact::YPoly;

pub fn fundamental_class(x: &Space) -> CohClass {
    x.fundamental_class()
}

pub fn pushforward(f: &Morphism, c: &CohClass) -> crate::Result<CohClass> {
    f.pushforward(c)
}

pub fn gysin_pullback(f: &Morphism, c: &CohClass) -> crate::Result<CohClass> {
    f.gysin_pullback(c)
}

pub fn degree(c: &CohClass) -> YPoly {
    c.degree()
}
