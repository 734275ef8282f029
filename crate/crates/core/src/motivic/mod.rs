//! Formal combinations of proper maps `[V -> X]`, over a base `X -> S`.

mod lci;
mod witness;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;

pub use lci::{lci_check, lci_check_chain, LciCertificate, Letter, Segment};
pub use witness::{DecompositionWitness, WitnessOutcome};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::geometry::{
    canonical_source, fiber_square, matrix_key, Chain, CohClass, MatrixKey, Morphism, MorphismKind, Space, SpaceKey,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// Smooth sources (or sources with a smooth decomposition); no condition on the base.
    Sm,
    /// Every composite `V -> X -> S` is l.c.i.
    Lci,
}

/// Identity of a term `[V -> X]`: the source up to reordering of its factors
/// together with the induced map on ambient models.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermKey(pub SpaceKey, pub MatrixKey);

#[derive(Clone, Debug)]
pub struct Term {
    pub coeff: i64,
    /// `p: V -> X`.
    pub push: Chain,
    /// `h ∘ p: V -> S`.
    pub route: Chain,
}

impl Term {
    pub fn source(&self) -> &Arc<Space> {
        self.push.source()
    }

    pub fn key(&self) -> Result<TermKey> {
        let map = self.push.push_map()?;
        let tau: Vec<usize> = (0..map.target().nvars()).collect();
        let (k, m) = canonical_source(self.push.source(), &map, &tau);
        Ok(TermKey(k, m))
    }
}

#[derive(Clone, Debug)]
pub struct Cycle {
    base: Chain,
    flavor: Flavor,
    terms: BTreeMap<TermKey, Term>,
}

/// Comparable normal form of a cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleNormalForm {
    pub flavor: Flavor,
    pub base: (SpaceKey, SpaceKey, MatrixKey),
    pub terms: BTreeMap<TermKey, i64>,
}

impl Cycle {
    pub fn zero(base: Chain, flavor: Flavor) -> Self {
        Cycle {
            base,
            flavor,
            terms: BTreeMap::new(),
        }
    }

    /// `[V -> X]` for the chain `push: V -> X`.
    pub fn generator(base: Chain, flavor: Flavor, push: Chain) -> Result<Self> {
        let mut c = Cycle::zero(base, flavor);
        c.add_term(1, push)?;
        Ok(c)
    }

    pub fn add_term(&mut self, coeff: i64, push: Chain) -> Result<()> {
        if push.target().as_ref() != self.x().as_ref() {
            return Err(Error::BaseMismatch(format!(
                "term ends at {}, cycle is over {}",
                push.target().name(),
                self.x().name()
            )));
        }
        let route = push.concat(&self.base)?;
        self.insert(Term { coeff, push, route })
    }

    fn validate(&self, term: &Term) -> Result<()> {
        match self.flavor {
            Flavor::Sm => {
                let v = term.source();
                if !v.is_smooth() && v.resolution().is_none() {
                    return Err(Error::NonSmoothSource(format!(
                        "{} is singular and carries no decomposition",
                        v.name()
                    )));
                }
            }
            Flavor::Lci => {
                let cert = lci_check_chain(&term.route);
                if !cert.accepted {
                    return Err(Error::NotLci(format!("{}: {cert}", term.route)));
                }
            }
        }
        Ok(())
    }

    fn insert(&mut self, term: Term) -> Result<()> {
        if term.coeff == 0 {
            return Ok(());
        }
        self.validate(&term)?;
        let key = term.key()?;
        match self.terms.get_mut(&key) {
            Some(t) => {
                t.coeff += term.coeff;
                if t.coeff == 0 {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, term);
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &Chain {
        &self.base
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// The space `X` the cycle lives over.
    pub fn x(&self) -> &Arc<Space> {
        self.base.source()
    }

    /// The base `S`.
    pub fn s(&self) -> &Arc<Space> {
        self.base.target()
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.terms.values()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn base_key(&self) -> Result<(SpaceKey, SpaceKey, MatrixKey)> {
        Ok((
            self.base.source().key(),
            self.base.target().key(),
            matrix_key(&self.base.push_map()?),
        ))
    }

    fn check_compatible(&self, other: &Cycle) -> Result<()> {
        if self.flavor != other.flavor || self.base_key()? != other.base_key()? {
            return Err(Error::BaseMismatch("cycles over different bases".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Cycle) -> Result<Cycle> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for t in other.terms() {
            out.insert(t.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, n: i64) -> Cycle {
        let mut out = Cycle::zero(self.base.clone(), self.flavor);
        if n != 0 {
            for (k, t) in &self.terms {
                let mut t = t.clone();
                t.coeff *= n;
                out.terms.insert(k.clone(), t);
            }
        }
        out
    }

    pub fn neg(&self) -> Cycle {
        self.scale(-1)
    }

    pub fn sub(&self, other: &Cycle) -> Result<Cycle> {
        self.add(&other.neg())
    }

    pub fn normal_form(&self) -> Result<CycleNormalForm> {
        Ok(CycleNormalForm {
            flavor: self.flavor,
            base: self.base_key()?,
            terms: self.terms.iter().map(|(k, t)| (k.clone(), t.coeff)).collect(),
        })
    }

    pub fn same_as(&self, other: &Cycle) -> Result<bool> {
        Ok(self.normal_form()? == other.normal_form()?)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms()
            .map(|t| {
                json!({
                    "coefficient": t.coeff,
                    "source": t.source().name(),
                    "chain": t.push.names(),
                })
            })
            .collect();
        json!({
            "flavor": self.flavor,
            "over": self.x().name(),
            "base": self.base.names(),
            "terms": terms,
        })
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|t| format!("{}[{} -> {}]", t.coeff, t.source().name(), self.x().name()))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn point_base(y: &Arc<Space>, s: &Arc<Space>) -> Result<Chain> {
    let m = Morphism::projection(format!("{}->pt", y.name()), y.clone(), s.clone(), Vec::new())?;
    Ok(Chain::single(Arc::new(m)))
}

/// `f_*[V -> X] = [V -> Y]`, with `Y -> S` given by `new_base` or derived
/// when `S` is a point or `f` is an identity.
pub fn push_cycle(f: &Arc<Morphism>, c: &Cycle, new_base: Option<&Chain>) -> Result<Cycle> {
    if f.source().as_ref() != c.x().as_ref() {
        return Err(Error::BaseMismatch(format!(
            "{} does not start at {}",
            f.name(),
            c.x().name()
        )));
    }
    let base = match new_base {
        Some(b) => {
            if b.source().as_ref() != f.target().as_ref() || b.target().as_ref() != c.s().as_ref() {
                return Err(Error::BaseMismatch("new base has wrong endpoints".into()));
            }
            let via = Chain::single(f.clone()).concat(b)?;
            if via.push_map()? != c.base().push_map()? {
                return Err(Error::BaseMismatch("new base does not factor the old one".into()));
            }
            b.clone()
        }
        None if c.s().ambient().nvars() == 0 => point_base(f.target(), c.s())?,
        None if matches!(f.kind(), MorphismKind::Identity) => c.base().clone(),
        None => {
            return Err(Error::BaseMismatch(format!(
                "pushing along {} needs an explicit base over {}",
                f.name(),
                c.s().name()
            )))
        }
    };
    let mut out = Cycle::zero(base, c.flavor());
    for t in c.terms() {
        out.insert(Term {
            coeff: t.coeff,
            push: t.push.then(f)?,
            route: t.route.clone(),
        })?;
    }
    Ok(out)
}

/// Pulls a chain `W -> Y` back along a smooth `f: X -> Y`, returning the
/// pulled chain `W' -> X` and the induced smooth map `W' -> W`.
pub fn pull_chain(f: &Arc<Morphism>, push: &Chain) -> Result<(Chain, Arc<Morphism>)> {
    let mut g = f.clone();
    let mut pulled: Vec<Arc<Morphism>> = Vec::new();
    for p in push.steps().iter().rev() {
        let sq = fiber_square(&g, p)?;
        pulled.push(sq.p_prime);
        g = sq.f_prime;
    }
    pulled.reverse();
    let start = g.source().clone();
    Ok((Chain::from_steps(start, &pulled)?, g))
}

/// `f^*[W -> Y] = [W x_Y X -> X]` for smooth `f: X -> Y`.
pub fn pull_cycle(f: &Arc<Morphism>, c: &Cycle) -> Result<Cycle> {
    if !f.is_smooth() {
        return Err(Error::UnsupportedPullback(format!("{} is not smooth", f.name())));
    }
    if f.target().as_ref() != c.x().as_ref() {
        return Err(Error::BaseMismatch(format!("{} does not end at {}", f.name(), c.x().name())));
    }
    let base = Chain::single(f.clone()).concat(c.base())?;
    let mut out = Cycle::zero(base, c.flavor());
    for t in c.terms() {
        let (push, f_prime) = pull_chain(f, &t.push)?;
        let route = Chain::single(f_prime).concat(&t.route)?;
        out.insert(Term {
            coeff: t.coeff,
            push,
            route,
        })?;
    }
    Ok(out)
}

/// `(-1)^{codim f}`.
pub fn twisted_push_sign(f: &Morphism) -> Rational {
    Rational::sign_pow(f.codim())
}

/// `(-1)^{dim f}`.
pub fn twisted_pull_sign(f: &Morphism) -> Rational {
    Rational::sign_pow(f.rel_dim())
}

/// `f_** = (-1)^{codim f} f_*` on classes.
pub fn twisted_push(f: &Morphism, c: &CohClass) -> Result<CohClass> {
    Ok(f.pushforward(c)?.scale_rational(&twisted_push_sign(f)))
}

/// `f^** = (-1)^{dim f} f^*` on classes.
pub fn twisted_pull(f: &Morphism, c: &CohClass) -> Result<CohClass> {
    Ok(f.gysin_pullback(c)?.scale_rational(&twisted_pull_sign(f)))
}
