use std::fmt;
use std::sync::Arc;

use super::chow::{permute_exps, ChowModel, CohClass, LinearMap};
use super::key::{matrix_key, MatrixKey};
use crate::error::{Error, Result};

/// A complete intersection `X ⊂ M` cut out by hypersurfaces of the given
/// multidegrees in a product of projective spaces `M`.
#[derive(Clone, Debug)]
pub struct Space {
    name: String,
    ambient: ChowModel,
    rows: Vec<Vec<u32>>,
    smooth: bool,
    resolution: Option<Arc<Resolution>>,
}

/// One summand `coeff * [V_i -> X]` of a smooth decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolutionPiece {
    pub coeff: i64,
    pub source: Arc<Space>,
    pub push: LinearMap,
}

/// Signed combination of proper maps from smooth spaces representing
/// `[X -> X]` under additivity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolution {
    pub pieces: Vec<ResolutionPiece>,
}

/// Structural identity of a space, up to the chosen ordering of factors.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpaceKey {
    pub ambient: Vec<u32>,
    pub rows: Vec<Vec<u32>>,
    pub smooth: bool,
    pub resolution: Option<Vec<(i64, SpaceKey, MatrixKey)>>,
}

impl PartialEq for Space {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient
            && sorted_rows(&self.rows) == sorted_rows(&other.rows)
            && self.smooth == other.smooth
            && self.resolution == other.resolution
    }
}

impl Eq for Space {}

fn sorted_rows(rows: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut r = rows.to_vec();
    r.sort();
    r
}

impl Space {
    pub fn new(name: impl Into<String>, ambient: ChowModel, rows: Vec<Vec<u32>>, smooth: bool) -> Result<Self> {
        let name = name.into();
        if rows.iter().any(|r| r.len() != ambient.nvars()) {
            return Err(Error::Catalog(format!("space {name}: multidegree length differs from factor count")));
        }
        if rows.iter().any(|r| r.iter().all(|&d| d == 0)) {
            return Err(Error::Catalog(format!("space {name}: zero multidegree row")));
        }
        if rows.len() > ambient.dim() {
            return Err(Error::Catalog(format!("space {name}: more equations than ambient dimension")));
        }
        Ok(Space {
            name,
            ambient,
            rows,
            smooth,
            resolution: None,
        })
    }

    /// The ambient product of projective spaces itself.
    pub fn ambient_space(name: impl Into<String>, factors: Vec<u32>) -> Self {
        Space {
            name: name.into(),
            ambient: ChowModel::new(factors),
            rows: Vec::new(),
            smooth: true,
            resolution: None,
        }
    }

    pub fn point() -> Self {
        Self::ambient_space("pt", Vec::new())
    }

    pub fn with_resolution(mut self, resolution: Resolution) -> Result<Self> {
        for piece in &resolution.pieces {
            if !piece.source.is_smooth() {
                return Err(Error::Catalog(format!(
                    "resolution of {} uses non-smooth {}",
                    self.name, piece.source.name
                )));
            }
            if piece.push.source() != piece.source.ambient() || piece.push.target() != &self.ambient {
                return Err(Error::Catalog(format!("resolution piece of {} has wrong models", self.name)));
            }
        }
        self.resolution = Some(Arc::new(resolution));
        Ok(self)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ambient(&self) -> &ChowModel {
        &self.ambient
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn is_smooth(&self) -> bool {
        self.smooth
    }

    pub fn is_ambient(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn resolution(&self) -> Option<&Arc<Resolution>> {
        self.resolution.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.ambient.dim() - self.rows.len()
    }

    /// `[X]` in the ambient model: the product of the row divisor classes.
    pub fn fundamental_class(&self) -> CohClass {
        let mut c = self.ambient.one();
        for row in &self.rows {
            c = c.mul(&self.ambient.linear_form(row)).expect("same model");
        }
        c
    }

    /// Key after moving factor `i` to position `sigma[i]`.
    pub fn key_under(&self, sigma: &[usize]) -> SpaceKey {
        let mut rows: Vec<Vec<u32>> = self.rows.iter().map(|r| permute_exps(r, sigma)).collect();
        rows.sort();
        let resolution = self.resolution.as_ref().map(|res| {
            let mut pieces: Vec<(i64, SpaceKey, MatrixKey)> = res
                .pieces
                .iter()
                .map(|p| {
                    let (k, m) = canonical_source(&p.source, &p.push, sigma);
                    (p.coeff, k, m)
                })
                .collect();
            pieces.sort();
            pieces
        });
        SpaceKey {
            ambient: permute_exps(self.ambient.factors(), sigma),
            rows,
            smooth: self.smooth,
            resolution,
        }
    }

    pub fn key(&self) -> SpaceKey {
        let id: Vec<usize> = (0..self.ambient.nvars()).collect();
        self.key_under(&id)
    }
}

/// Minimizes `(source key, matrix key)` over orderings of the source factors,
/// with the target factors reordered by `tau`.
pub fn canonical_source(source: &Space, push: &LinearMap, tau: &[usize]) -> (SpaceKey, MatrixKey) {
    use itertools::Itertools;
    let k = source.ambient().nvars();
    (0..k)
        .permutations(k)
        .map(|sigma| {
            (
                source.key_under(&sigma),
                matrix_key(&push.permuted(&sigma, tau)),
            )
        })
        .min()
        .expect("at least one permutation")
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}
