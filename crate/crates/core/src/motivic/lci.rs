use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::Result;
use crate::geometry::{Chain, Morphism, MorphismKind, Space};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Letter {
    /// Regular embedding.
    E,
    /// Smooth morphism.
    P,
}

/// One fused step of a chain and the letters it contributes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub morphism: String,
    pub kind: &'static str,
    pub letters: Vec<Letter>,
}

/// Outcome of the grammatical l.c.i. test.
///
/// When accepted, the chain factors as a regular embedding of codimension
/// `embedding_codim` followed by a smooth morphism of relative dimension
/// `smooth_rel_dim`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LciCertificate {
    pub accepted: bool,
    pub segments: Vec<Segment>,
    pub embedding_codim: i64,
    pub smooth_rel_dim: i64,
    pub obstruction: Option<String>,
}

impl fmt::Display for LciCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word: String = self
            .segments
            .iter()
            .flat_map(|s| s.letters.iter())
            .map(|l| match l {
                Letter::E => 'E',
                Letter::P => 'P',
            })
            .collect();
        match &self.obstruction {
            None => write!(
                f,
                "accepted: word {} = embedding of codim {} then smooth of rel. dim {}",
                if word.is_empty() { "(empty)" } else { &word },
                self.embedding_codim,
                self.smooth_rel_dim
            ),
            Some(o) => write!(f, "rejected at {o}"),
        }
    }
}

/// Classifies every step as `E`, `P`, `E P`, or an obstruction.
///
/// Any word in `E` and `P` is accepted, since `P E` can always be rewritten as
/// `E P` by base change of the smooth factor.
pub fn lci_check_chain(chain: &Chain) -> LciCertificate {
    let mut segments = Vec::new();
    let mut codim = 0i64;
    let mut rel = 0i64;
    let mut obstruction = None;
    for m in chain.steps() {
        let (letters, c, r) = match m.kind() {
            MorphismKind::Identity => (vec![], 0, 0),
            MorphismKind::CiEmbedding => (vec![Letter::E], m.codim(), 0),
            MorphismKind::Projection { .. } => {
                let smooth_part: i64 = m
                    .dropped_factors()
                    .iter()
                    .map(|&d| m.source().ambient().factors()[d] as i64)
                    .sum();
                let extra = smooth_part - m.rel_dim();
                if extra == 0 {
                    (vec![Letter::P], 0, smooth_part)
                } else {
                    (vec![Letter::E, Letter::P], extra, smooth_part)
                }
            }
            MorphismKind::PointInclusion { .. } if m.target().is_smooth() => (vec![Letter::E], m.codim(), 0),
            MorphismKind::PointInclusion { .. } | MorphismKind::FiniteModification { .. } => {
                if obstruction.is_none() {
                    obstruction = Some(format!("{} ({})", m.name(), m.kind().label()));
                }
                (vec![], 0, 0)
            }
        };
        codim += c;
        rel += r;
        segments.push(Segment {
            morphism: m.name().to_string(),
            kind: m.kind().label(),
            letters,
        });
    }
    LciCertificate {
        accepted: obstruction.is_none(),
        segments,
        embedding_codim: if obstruction.is_none() { codim } else { 0 },
        smooth_rel_dim: if obstruction.is_none() { rel } else { 0 },
        obstruction,
    }
}

/// Builds the chain (rejecting non-composable input) and checks it.
pub fn lci_check(start: Arc<Space>, steps: &[Arc<Morphism>]) -> Result<LciCertificate> {
    Ok(lci_check_chain(&Chain::from_steps(start, steps)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::geometry::{ChowModel, LinearMap};

    #[test]
    fn grammar() {
        let p2 = Arc::new(Space::ambient_space("P2", vec![2]));
        let p1 = Arc::new(Space::ambient_space("P1", vec![1]));
        let pt = Arc::new(Space::point());
        let cubic = Arc::new(Space::new("cubic", ChowModel::projective(2), vec![vec![3]], true).unwrap());
        let nodal = Arc::new(Space::new("nodal", ChowModel::projective(2), vec![vec![3]], false).unwrap());
        let i = Arc::new(Morphism::ci_embedding("i", cubic.clone(), p2.clone()).unwrap());
        let c = Arc::new(Morphism::projection("c", p2.clone(), pt.clone(), vec![]).unwrap());

        let id = lci_check(p2.clone(), &[]).unwrap();
        assert!(id.accepted);

        let cert = lci_check(cubic.clone(), &[i.clone(), c.clone()]).unwrap();
        assert!(cert.accepted);
        assert_eq!(cert.embedding_codim, 1);
        assert_eq!(cert.smooth_rel_dim, 2);

        let m = p2.ambient().clone();
        let push = LinearMap::from_fn(p1.ambient(), &m, |e| {
            if e[0] == 0 {
                m.linear_form(&[3])
            } else {
                m.point_class()
            }
        });
        let nu = Arc::new(Morphism::finite_modification("nu", p1.clone(), nodal.clone(), push, 1).unwrap());
        let j = Arc::new(Morphism::ci_embedding("j", nodal.clone(), p2.clone()).unwrap());
        let cert = lci_check(p1.clone(), &[nu, j, c.clone()]).unwrap();
        assert!(!cert.accepted);
        assert!(cert.obstruction.unwrap().starts_with("nu"));

        assert!(matches!(lci_check(cubic, &[c, i]), Err(Error::NotComposable(_))));
    }
}
