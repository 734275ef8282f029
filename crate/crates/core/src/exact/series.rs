use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Rational, YPoly};
use crate::error::{Error, Result};

pub type Exponents = Vec<u32>;

fn total_degree(e: &[u32]) -> usize {
    e.iter().map(|&a| a as usize).sum()
}

/// Formats an exponent vector as the comma-separated key used in JSON maps.
pub fn exponent_key(e: &[u32]) -> String {
    e.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

pub fn parse_exponent_key(key: &str, nvars: usize) -> Result<Exponents> {
    let exps: Vec<u32> = if key.is_empty() {
        Vec::new()
    } else {
        key.split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent key {key:?}"))))
            .collect::<Result<_>>()?
    };
    if exps.len() != nvars {
        return Err(Error::Parse(format!(
            "exponent key {key:?} has {} entries, expected {nvars}",
            exps.len()
        )));
    }
    Ok(exps)
}

/// Multivariate power series over `Q[y]`, truncated by total degree.
///
/// Terms of total degree greater than `order` are never stored. Binary
/// operations produce a result truncated to the smaller of the two orders.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TruncatedSeries {
    nvars: usize,
    order: usize,
    terms: BTreeMap<Exponents, YPoly>,
}

impl TruncatedSeries {
    pub fn zero(nvars: usize, order: usize) -> Self {
        TruncatedSeries {
            nvars,
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize, order: usize) -> Self {
        Self::constant(nvars, order, YPoly::one())
    }

    pub fn constant(nvars: usize, order: usize, c: YPoly) -> Self {
        let mut s = Self::zero(nvars, order);
        s.add_term(vec![0; nvars], c);
        s
    }

    /// The variable `x_i`.
    pub fn variable(nvars: usize, order: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, order, e, YPoly::one())
    }

    pub fn monomial(nvars: usize, order: usize, exps: Exponents, c: YPoly) -> Self {
        assert_eq!(exps.len(), nvars, "exponent length mismatch");
        let mut s = Self::zero(nvars, order);
        s.add_term(exps, c);
        s
    }

    /// Builds a univariate series from coefficients of `x^0, x^1, ...`.
    pub fn univariate(order: usize, coeffs: impl IntoIterator<Item = YPoly>) -> Self {
        let mut s = Self::zero(1, order);
        for (k, c) in coeffs.into_iter().enumerate() {
            s.add_term(vec![k as u32], c);
        }
        s
    }

    pub fn from_terms(nvars: usize, order: usize, terms: impl IntoIterator<Item = (Exponents, YPoly)>) -> Self {
        let mut s = Self::zero(nvars, order);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length mismatch");
            s.add_term(e, c);
        }
        s
    }

    /// Adds `c * x^exps` in place, discarding it if above the order.
    pub fn add_term(&mut self, exps: Exponents, c: YPoly) {
        if c.is_zero() || total_degree(&exps) > self.order {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, YPoly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> YPoly {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    /// Coefficient of `x^k` for a univariate series.
    pub fn coeff1(&self, k: u32) -> YPoly {
        self.coeff(&[k])
    }

    pub fn constant_term(&self) -> YPoly {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        TruncatedSeries {
            nvars: self.nvars,
            order,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| total_degree(e) <= order)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Homogeneous component of total degree `k`.
    pub fn component(&self, k: usize) -> Self {
        TruncatedSeries {
            nvars: self.nvars,
            order: self.order,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| total_degree(e) == k)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Keeps only terms whose exponents are bounded entrywise by `caps`.
    pub fn retain_caps(&self, caps: &[u32]) -> Self {
        TruncatedSeries {
            nvars: self.nvars,
            order: self.order,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().zip(caps).all(|(a, c)| a <= c))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    fn check_vars(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::Dimension(format!(
                "series in {} and {} variables",
                self.nvars, other.nvars
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = self.truncate(other.order);
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let order = self.order.min(other.order);
        let mut out = Self::zero(self.nvars, order);
        for (ea, ca) in &self.terms {
            let da = total_degree(ea);
            if da > order {
                continue;
            }
            for (eb, cb) in &other.terms {
                if da + total_degree(eb) > order {
                    continue;
                }
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &YPoly) -> Self {
        let mut out = Self::zero(self.nvars, self.order);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a * c);
        }
        out
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        self.map_coeffs(|a| a.scale(c))
    }

    pub fn map_coeffs(&self, f: impl Fn(&YPoly) -> YPoly) -> Self {
        let mut out = Self::zero(self.nvars, self.order);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), f(a));
        }
        out
    }

    /// Substitutes `y := y0` in every coefficient.
    pub fn specialize(&self, y0: &Rational) -> Self {
        self.map_coeffs(|c| c.specialize(y0))
    }

    /// `exp(a)` for a series with zero constant term.
    ///
    /// Uses the Euler-operator recursion `n E_n = sum_k k a_k E_{n-k}` on
    /// homogeneous components.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::Domain("exp requires a zero constant term".into()));
        }
        let a: Vec<Self> = (0..=self.order).map(|k| self.component(k)).collect();
        let mut e: Vec<Self> = vec![Self::one(self.nvars, self.order)];
        for n in 1..=self.order {
            let mut acc = Self::zero(self.nvars, self.order);
            for k in 1..=n {
                if a[k].is_zero() || e[n - k].is_zero() {
                    continue;
                }
                let term = a[k].mul(&e[n - k])?.scale_rational(&Rational::from_int(k as i64));
                acc = acc.add(&term)?;
            }
            e.push(acc.scale_rational(&Rational::new(1, n as i64)));
        }
        let mut out = Self::zero(self.nvars, self.order);
        for comp in e {
            out = out.add(&comp)?;
        }
        Ok(out)
    }

    /// `log(a)` for a series with constant term 1.
    pub fn log(&self) -> Result<Self> {
        if !self.constant_term().is_one() {
            return Err(Error::Domain("log requires constant term 1".into()));
        }
        let b: Vec<Self> = (0..=self.order).map(|k| self.component(k)).collect();
        let mut l: Vec<Self> = vec![Self::zero(self.nvars, self.order)];
        for n in 1..=self.order {
            let mut acc = Self::zero(self.nvars, self.order);
            for k in 1..n {
                if l[k].is_zero() || b[n - k].is_zero() {
                    continue;
                }
                let term = l[k].mul(&b[n - k])?.scale_rational(&Rational::from_int(k as i64));
                acc = acc.add(&term)?;
            }
            let ln = b[n].sub(&acc.scale_rational(&Rational::new(1, n as i64)))?;
            l.push(ln);
        }
        let mut out = Self::zero(self.nvars, self.order);
        for comp in l {
            out = out.add(&comp)?;
        }
        Ok(out)
    }

    /// Multiplicative inverse; the constant term must be a nonzero rational.
    pub fn invert(&self) -> Result<Self> {
        let c0 = self
            .constant_term()
            .as_constant()
            .filter(|c| !c.is_zero())
            .ok_or_else(|| Error::Domain("invert requires a nonzero rational constant term".into()))?;
        let inv_c0 = c0.recip().expect("nonzero");
        let a: Vec<Self> = (0..=self.order).map(|k| self.component(k)).collect();
        let mut inv: Vec<Self> = vec![Self::constant(self.nvars, self.order, YPoly::constant(inv_c0.clone()))];
        for n in 1..=self.order {
            let mut acc = Self::zero(self.nvars, self.order);
            for k in 1..=n {
                if a[k].is_zero() || inv[n - k].is_zero() {
                    continue;
                }
                acc = acc.add(&a[k].mul(&inv[n - k])?)?;
            }
            inv.push(acc.scale_rational(&(-&inv_c0)));
        }
        let mut out = Self::zero(self.nvars, self.order);
        for comp in inv {
            out = out.add(&comp)?;
        }
        Ok(out)
    }

    pub fn pow(&self, exp: u32) -> Result<Self> {
        let mut acc = Self::one(self.nvars, self.order);
        for _ in 0..exp {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    vars: usize,
    order: usize,
    terms: BTreeMap<String, YPoly>,
}

impl Serialize for TruncatedSeries {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr {
            vars: self.nvars,
            order: self.order,
            terms: self.terms.iter().map(|(e, c)| (exponent_key(e), c.clone())).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TruncatedSeries {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SeriesRepr::deserialize(deserializer)?;
        let mut s = TruncatedSeries::zero(repr.vars, repr.order);
        for (k, c) in repr.terms {
            let e = parse_exponent_key(&k, repr.vars).map_err(serde::de::Error::custom)?;
            s.add_term(e, c);
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> YPoly {
        YPoly::constant(Rational::new(n, d))
    }

    fn uni(order: usize, c: &[(i64, i64)]) -> TruncatedSeries {
        TruncatedSeries::univariate(order, c.iter().map(|&(n, d)| q(n, d)))
    }

    /// Schoolbook product of coefficient lists, independent of the series code.
    fn brute_force_product(a: &[Rational], b: &[Rational], order: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); order + 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if i + j <= order {
                    out[i + j] += &(x * y);
                }
            }
        }
        out
    }

    #[test]
    fn difference_of_squares() {
        let a = uni(3, &[(1, 1), (1, 1)]);
        let b = uni(3, &[(1, 1), (-1, 1)]);
        assert_eq!(a.mul(&b).unwrap(), uni(3, &[(1, 1), (0, 1), (-1, 1)]));
    }

    #[test]
    fn identity_element() {
        let a = uni(4, &[(2, 1), (1, 3), (0, 1), (5, 7)]);
        assert_eq!(a.mul(&TruncatedSeries::one(1, 4)).unwrap(), a);
    }

    #[test]
    fn todd_square_matches_brute_force() {
        let t = [Rational::one(), Rational::new(1, 2), Rational::new(1, 12)];
        let expected = brute_force_product(&t, &t, 2);
        // 1/4 + 2 * 1/12 = 5/12
        assert_eq!(expected[2], Rational::new(5, 12));
        let s = uni(2, &[(1, 1), (1, 2), (1, 12)]);
        let sq = s.mul(&s).unwrap();
        for k in 0..=2 {
            assert_eq!(sq.coeff1(k as u32), YPoly::constant(expected[k].clone()));
        }
    }

    #[test]
    fn exp_log_examples() {
        let zero = TruncatedSeries::zero(1, 5);
        assert_eq!(zero.exp().unwrap(), TruncatedSeries::one(1, 5));
        let x = TruncatedSeries::variable(1, 3, 0);
        assert_eq!(x.exp().unwrap(), uni(3, &[(1, 1), (1, 1), (1, 2), (1, 6)]));
        let one_plus_x = uni(3, &[(1, 1), (1, 1)]);
        assert_eq!(one_plus_x.log().unwrap(), uni(3, &[(0, 1), (1, 1), (-1, 2), (1, 3)]));
        let one_plus_x4 = uni(4, &[(1, 1), (1, 1)]);
        assert_eq!(one_plus_x4.log().unwrap().exp().unwrap(), one_plus_x4);
        assert_eq!(TruncatedSeries::one(2, 3).log().unwrap(), TruncatedSeries::zero(2, 3));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(TruncatedSeries::one(1, 3).invert().unwrap(), TruncatedSeries::one(1, 3));
        let a = uni(2, &[(1, 1), (3, 1)]);
        assert_eq!(a.invert().unwrap(), uni(2, &[(1, 1), (-3, 1), (9, 1)]));
    }

    #[test]
    fn domain_errors() {
        let a = uni(2, &[(1, 1), (1, 1)]);
        assert!(matches!(a.exp(), Err(Error::Domain(_))));
        assert!(matches!(uni(2, &[(2, 1)]).log(), Err(Error::Domain(_))));
        let y_const = TruncatedSeries::constant(1, 2, YPoly::y());
        assert!(matches!(y_const.invert(), Err(Error::Domain(_))));
        assert!(matches!(TruncatedSeries::zero(1, 2).invert(), Err(Error::Domain(_))));
        let b = TruncatedSeries::one(2, 2);
        assert!(matches!(a.mul(&b), Err(Error::Dimension(_))));
    }

    #[test]
    fn order_is_minimum_of_operands() {
        let a = uni(5, &[(1, 1), (1, 1)]);
        let b = uni(2, &[(1, 1), (1, 1)]);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.order(), 2);
        assert_eq!(p, uni(2, &[(1, 1), (2, 1), (1, 1)]));
    }

    #[test]
    fn serde_round_trip() {
        let s = TruncatedSeries::from_terms(
            2,
            3,
            [(vec![0, 0], YPoly::one()), (vec![1, 2], YPoly::from_ints(&[1, -1]))],
        );
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(js, r#"{"vars":2,"order":3,"terms":{"0,0":["1"],"1,2":["1","-1"]}}"#);
        assert_eq!(serde_json::from_str::<TruncatedSeries>(&js).unwrap(), s);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn coeff() -> impl Strategy<Value = YPoly> {
            prop::collection::vec((-4i64..=4, 1i64..=3), 0..3)
                .prop_map(|c| YPoly::from_coeffs(c.into_iter().map(|(n, d)| Rational::new(n, d)).collect()))
        }

        fn series(order: usize) -> impl Strategy<Value = TruncatedSeries> {
            prop::collection::vec(((0u32..3, 0u32..3), coeff()), 0..6).prop_map(move |ts| {
                TruncatedSeries::from_terms(2, order, ts.into_iter().map(|((a, b), c)| (vec![a, b], c)))
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn ring_laws(a in series(3), b in series(3), c in series(3)) {
                prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
                prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
                prop_assert_eq!(
                    a.mul(&b.add(&c).unwrap()).unwrap(),
                    a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
                );
            }

            #[test]
            fn exp_log_inverse(a in series(3)) {
                let nilpotent = a.sub(&a.component(0)).unwrap();
                let back = nilpotent.exp().unwrap().log().unwrap();
                prop_assert_eq!(back, nilpotent);
            }

            #[test]
            fn invert_is_inverse(a in series(3), c in 1i64..5) {
                let unit = a.sub(&a.component(0)).unwrap().add(&TruncatedSeries::constant(2, 3, YPoly::from_int(c))).unwrap();
                prop_assert_eq!(unit.mul(&unit.invert().unwrap()).unwrap(), TruncatedSeries::one(2, 3));
            }
        }
    }
}
