use super::chow::LinearMap;
use crate::exact::{Exponents, YPoly};

/// Ordered, hashable form of a [`LinearMap`].
pub type MatrixKey = Vec<(Exponents, Vec<(Exponents, YPoly)>)>;

pub fn matrix_key(map: &LinearMap) -> MatrixKey {
    map.images()
        .iter()
        .map(|(e, c)| (e.clone(), c.terms().iter().map(|(f, v)| (f.clone(), v.clone())).collect()))
        .collect()
}
