use std::sync::Arc;

use super::chow::{ChowModel, LinearMap};
use super::morphism::{pulled_rows, Morphism, MorphismKind};
use super::space::{Resolution, ResolutionPiece, Space};
use crate::error::{Error, Result};

/// Fuses `b ∘ a` into a single catalog morphism when the kinds allow it.
///
/// Fused morphisms are rebuilt from their structure, so their pushforward is
/// recomputed rather than composed from the stored matrices.
pub fn compose(a: &Arc<Morphism>, b: &Arc<Morphism>) -> Result<Option<Arc<Morphism>>> {
    if a.target() != b.source() {
        return Err(Error::NotComposable(format!("{} then {}", a.name(), b.name())));
    }
    if matches!(a.kind(), MorphismKind::Identity) {
        return Ok(Some(b.clone()));
    }
    if matches!(b.kind(), MorphismKind::Identity) {
        return Ok(Some(a.clone()));
    }
    let name = format!("{};{}", a.name(), b.name());
    let (src, tgt) = (a.source().clone(), b.target().clone());
    let fused = match (a.kind(), b.kind()) {
        (MorphismKind::CiEmbedding, MorphismKind::CiEmbedding) => Morphism::ci_embedding(name, src, tgt)?,
        (MorphismKind::Projection { kept: ka }, MorphismKind::Projection { kept: kb }) => {
            let kept = kb.iter().map(|&t| ka[t]).collect();
            Morphism::projection(name, src, tgt, kept)?
        }
        (MorphismKind::CiEmbedding, MorphismKind::Projection { kept }) => {
            Morphism::projection(name, src, tgt, kept.clone())?
        }
        (MorphismKind::Projection { kept }, MorphismKind::CiEmbedding) => {
            Morphism::projection(name, src, tgt, kept.clone())?
        }
        (MorphismKind::PointInclusion { fiber }, MorphismKind::CiEmbedding) => {
            Morphism::point_inclusion(name, src, tgt, fiber.clone())?
        }
        _ => return Ok(None),
    };
    Ok(Some(Arc::new(fused)))
}

/// `P^{fiber} x X` with the fiber factors first.
pub fn product_with(fiber_dims: &[u32], space: &Space) -> Result<Space> {
    if fiber_dims.is_empty() {
        return Ok(space.clone());
    }
    let mut factors = fiber_dims.to_vec();
    factors.extend_from_slice(space.ambient().factors());
    let rows = space
        .rows()
        .iter()
        .map(|r| {
            let mut row = vec![0; fiber_dims.len()];
            row.extend_from_slice(r);
            row
        })
        .collect();
    let name = format!(
        "{}x{}",
        fiber_dims.iter().map(|n| format!("P{n}")).collect::<Vec<_>>().join("x"),
        space.name()
    );
    let mut out = Space::new(name, ChowModel::new(factors.clone()), rows, space.is_smooth())?;
    if let Some(res) = space.resolution() {
        let nf = fiber_dims.len();
        let fiber_pos: Vec<usize> = (0..nf).collect();
        let src_pos: Vec<usize> = (nf..nf + space.ambient().nvars()).collect();
        out = out.with_resolution(pull_resolution(res, fiber_dims, &ChowModel::new(factors), &fiber_pos, &src_pos)?)?;
    }
    Ok(out)
}

/// `id ⊗ map` from `P^{fiber} x M_source` into `target`, sending fiber factor
/// `i` to `fiber_pos[i]` and factor `t` of `map`'s target to `src_pos[t]`.
pub fn tensor_identity(
    map: &LinearMap,
    fiber_dims: &[u32],
    target: &ChowModel,
    fiber_pos: &[usize],
    src_pos: &[usize],
) -> LinearMap {
    let nf = fiber_dims.len();
    let mut factors = fiber_dims.to_vec();
    factors.extend_from_slice(map.source().factors());
    let source = ChowModel::new(factors);
    LinearMap::from_fn(&source, target, |e| {
        let img = map.image(&e[nf..]);
        let mut out = target.zero();
        for (c, v) in img.terms() {
            let mut f = vec![0; target.nvars()];
            for (i, &p) in fiber_pos.iter().enumerate() {
                f[p] = e[i];
            }
            for (t, &p) in src_pos.iter().enumerate() {
                f[p] = c[t];
            }
            out = out.add(&target.monomial(f, v.clone())).expect("same model");
        }
        out
    })
}

fn pull_resolution(
    res: &Resolution,
    fiber_dims: &[u32],
    target: &ChowModel,
    fiber_pos: &[usize],
    src_pos: &[usize],
) -> Result<Resolution> {
    let pieces = res
        .pieces
        .iter()
        .map(|p| {
            Ok(ResolutionPiece {
                coeff: p.coeff,
                source: Arc::new(product_with(fiber_dims, &p.source)?),
                push: tensor_identity(&p.push, fiber_dims, target, fiber_pos, src_pos),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Resolution { pieces })
}

/// The pulled-back square of a smooth `f: X -> Y` and a proper `p: W -> Y`:
/// `p': W' -> X` and `f': W' -> W`.
#[derive(Clone, Debug)]
pub struct FiberSquare {
    pub p_prime: Arc<Morphism>,
    pub f_prime: Arc<Morphism>,
}

impl FiberSquare {
    pub fn w_prime(&self) -> &Arc<Space> {
        self.p_prime.source()
    }
}

pub fn fiber_square(f: &Arc<Morphism>, p: &Arc<Morphism>) -> Result<FiberSquare> {
    if f.target() != p.target() {
        return Err(Error::Catalog(format!("{} and {} do not share a target", f.name(), p.name())));
    }
    if !f.is_smooth() {
        return Err(Error::UnsupportedPullback(format!("{} is not smooth", f.name())));
    }
    let w = p.source().clone();
    let kept = match f.kind() {
        MorphismKind::Identity => {
            return Ok(FiberSquare {
                p_prime: p.clone(),
                f_prime: Arc::new(Morphism::identity(w)),
            })
        }
        MorphismKind::Projection { kept } => kept.clone(),
        _ => unreachable!("smooth morphisms are identities or projections"),
    };
    let x = f.source().clone();
    let nx = x.ambient().nvars();
    let drop = f.dropped_factors();
    let drop_dims: Vec<u32> = drop.iter().map(|&d| x.ambient().factors()[d]).collect();
    let fname = f.name();
    let pname = p.name();
    match p.kind() {
        MorphismKind::Identity => Ok(FiberSquare {
            p_prime: Arc::new(Morphism::identity(x)),
            f_prime: f.clone(),
        }),
        MorphismKind::CiEmbedding => {
            let mut wp = Space::new(
                format!("{}x_{}{}", x.name(), f.target().name(), w.name()),
                x.ambient().clone(),
                pulled_rows(w.rows(), &kept, nx),
                w.is_smooth(),
            )?;
            if let Some(res) = w.resolution() {
                wp = wp.with_resolution(pull_resolution(res, &drop_dims, x.ambient(), &drop, &kept)?)?;
            }
            let wp = Arc::new(wp);
            Ok(FiberSquare {
                p_prime: Arc::new(Morphism::ci_embedding(format!("{pname}'"), wp.clone(), x)?),
                f_prime: Arc::new(Morphism::projection(format!("{fname}'"), wp, w, kept)?),
            })
        }
        MorphismKind::Projection { kept: kp } => {
            let nw = w.ambient().nvars();
            let extra: Vec<usize> = (0..nw).filter(|i| !kp.contains(i)).collect();
            let pos: Vec<usize> = (0..nw)
                .map(|i| match kp.iter().position(|&k| k == i) {
                    Some(t) => kept[t],
                    None => nx + extra.iter().position(|&e| e == i).expect("extra factor"),
                })
                .collect();
            let mut factors = x.ambient().factors().to_vec();
            factors.extend(extra.iter().map(|&e| w.ambient().factors()[e]));
            let model = ChowModel::new(factors);
            let rows = w
                .rows()
                .iter()
                .map(|r| {
                    let mut row = vec![0; model.nvars()];
                    for (i, &d) in r.iter().enumerate() {
                        row[pos[i]] = d;
                    }
                    row
                })
                .collect();
            let mut wp = Space::new(
                format!("{}x_{}{}", x.name(), f.target().name(), w.name()),
                model.clone(),
                rows,
                w.is_smooth(),
            )?;
            if let Some(res) = w.resolution() {
                wp = wp.with_resolution(pull_resolution(res, &drop_dims, &model, &drop, &pos)?)?;
            }
            let wp = Arc::new(wp);
            Ok(FiberSquare {
                p_prime: Arc::new(Morphism::projection(format!("{pname}'"), wp.clone(), x, (0..nx).collect())?),
                f_prime: Arc::new(Morphism::projection(format!("{fname}'"), wp, w, pos)?),
            })
        }
        MorphismKind::PointInclusion { fiber } => {
            let wp = Arc::new(product_with(&drop_dims, &w)?);
            let nd = drop.len();
            let mut fib = drop.clone();
            fib.extend(fiber.iter().map(|&t| kept[t]));
            Ok(FiberSquare {
                p_prime: Arc::new(Morphism::point_inclusion(format!("{pname}'"), wp.clone(), x, fib)?),
                f_prime: Arc::new(Morphism::projection(
                    format!("{fname}'"),
                    wp,
                    w.clone(),
                    (nd..nd + w.ambient().nvars()).collect(),
                )?),
            })
        }
        MorphismKind::FiniteModification { degree } => {
            let wp = Arc::new(product_with(&drop_dims, &w)?);
            let nd = drop.len();
            let push = tensor_identity(p.push_map(), &drop_dims, x.ambient(), &drop, &kept);
            Ok(FiberSquare {
                p_prime: Arc::new(Morphism::finite_modification(format!("{pname}'"), wp.clone(), x, push, *degree)?),
                f_prime: Arc::new(Morphism::projection(
                    format!("{fname}'"),
                    wp,
                    w.clone(),
                    (nd..nd + w.ambient().nvars()).collect(),
                )?),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::YPoly;

    fn sp(name: &str, f: Vec<u32>) -> Arc<Space> {
        Arc::new(Space::ambient_space(name, f))
    }

    #[test]
    fn product_square_with_cubic() {
        let p1p2 = sp("P1xP2", vec![1, 2]);
        let p2 = sp("P2", vec![2]);
        let cubic = Arc::new(Space::new("cubic", ChowModel::projective(2), vec![vec![3]], true).unwrap());
        let f = Arc::new(Morphism::projection("pr", p1p2.clone(), p2.clone(), vec![1]).unwrap());
        let p = Arc::new(Morphism::ci_embedding("i", cubic.clone(), p2.clone()).unwrap());
        let sq = fiber_square(&f, &p).unwrap();
        assert_eq!(sq.w_prime().rows(), &[vec![0, 3]]);
        assert!(matches!(sq.p_prime.kind(), MorphismKind::CiEmbedding));
        assert!(sq.f_prime.is_smooth());
        // f^* p_* = p'_* f'^* on the point class of the cubic's ambient
        let pt = cubic.ambient().point_class();
        let lhs = f.gysin_pullback(&p.pushforward(&pt).unwrap()).unwrap();
        let rhs = sq.p_prime.pushforward(&sq.f_prime.gysin_pullback(&pt).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, p1p2.ambient().monomial(vec![0, 2], YPoly::one()));
    }

    #[test]
    fn identity_square() {
        let p2 = sp("P2", vec![2]);
        let cubic = Arc::new(Space::new("cubic", ChowModel::projective(2), vec![vec![3]], true).unwrap());
        let id = Arc::new(Morphism::identity(p2.clone()));
        let p = Arc::new(Morphism::ci_embedding("i", cubic, p2).unwrap());
        let sq = fiber_square(&id, &p).unwrap();
        assert!(Arc::ptr_eq(&sq.p_prime, &p));
        assert!(matches!(sq.f_prime.kind(), MorphismKind::Identity));
    }

    #[test]
    fn fusion_rules() {
        let p2 = sp("P2", vec![2]);
        let pt = Arc::new(Space::point());
        let cubic = Arc::new(Space::new("cubic", ChowModel::projective(2), vec![vec![3]], true).unwrap());
        let i = Arc::new(Morphism::ci_embedding("i", cubic.clone(), p2.clone()).unwrap());
        let c = Arc::new(Morphism::projection("c", p2.clone(), pt.clone(), vec![]).unwrap());
        let fused = compose(&i, &c).unwrap().unwrap();
        assert!(matches!(fused.kind(), MorphismKind::Projection { .. }));
        assert!(!fused.is_smooth());
        let j = Arc::new(Morphism::point_inclusion("j", pt.clone(), p2.clone(), vec![]).unwrap());
        assert!(compose(&c, &j).unwrap().is_none());
        assert!(compose(&i, &j).is_err());
    }
}
