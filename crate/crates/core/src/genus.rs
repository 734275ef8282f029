//! Characteristic power series and their multiplicative classes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Rational, TruncatedSeries, YPoly};
use crate::geometry::{ChowModel, CohClass};
use crate::ktheory::VirtualBundle;

/// A normalized one-variable power series `g(x) = 1 + g_1 x + ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenusSeries {
    name: String,
    series: TruncatedSeries,
}

impl GenusSeries {
    pub fn new(name: impl Into<String>, series: TruncatedSeries) -> Result<Self> {
        if series.nvars() != 1 {
            return Err(Error::Dimension("genus series must be univariate".into()));
        }
        if !series.constant_term().is_one() {
            return Err(Error::Domain("genus series must start with 1".into()));
        }
        Ok(GenusSeries {
            name: name.into(),
            series,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn series(&self) -> &TruncatedSeries {
        &self.series
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    pub fn coeff(&self, k: u32) -> YPoly {
        self.series.coeff1(k)
    }

    pub fn coefficients(&self) -> Vec<YPoly> {
        (0..=self.order() as u32).map(|k| self.coeff(k)).collect()
    }

    pub fn specialize(&self, y0: &Rational) -> GenusSeries {
        GenusSeries {
            name: format!("{}[y={y0}]", self.name),
            series: self.series.specialize(y0),
        }
    }

    /// `(k, coefficient)` rows for text output.
    pub fn table(&self) -> Vec<(u32, YPoly)> {
        (0..=self.order() as u32).map(|k| (k, self.coeff(k))).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct GenusRepr {
    name: String,
    coefficients: Vec<YPoly>,
}

impl Serialize for GenusSeries {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GenusRepr {
            name: self.name.clone(),
            coefficients: self.coefficients(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GenusSeries {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = GenusRepr::deserialize(deserializer)?;
        let order = repr.coefficients.len().saturating_sub(1);
        GenusSeries::new(repr.name, TruncatedSeries::univariate(order, repr.coefficients))
            .map_err(serde::de::Error::custom)
    }
}

/// Coefficients of `u / (1 - e^{-u})` up to `u^order`.
fn todd_coefficients(order: usize) -> Result<Vec<Rational>> {
    // (1 - e^{-u}) / u = sum_k (-1)^k u^k / (k+1)!
    let mut fact = Rational::one();
    let mut coeffs = Vec::with_capacity(order + 1);
    for k in 0..=order {
        fact *= &Rational::from_int(k as i64 + 1);
        coeffs.push(YPoly::constant(Rational::sign_pow(k as i64) * fact.recip().expect("nonzero")));
    }
    let inv = TruncatedSeries::univariate(order, coeffs).invert()?;
    Ok((0..=order as u32)
        .map(|k| inv.coeff1(k).as_constant().expect("rational series"))
        .collect())
}

pub fn todd_series(order: usize) -> GenusSeries {
    let t = todd_coefficients(order).expect("invertible");
    GenusSeries::new("todd", TruncatedSeries::univariate(order, t.into_iter().map(YPoly::constant)))
        .expect("normalized")
}

/// `x(1+y) / (1 - e^{-x(1+y)}) - xy`, expanded in `u = x(1+y)` first so every
/// coefficient stays polynomial in `y`.
pub fn hirzebruch_series(order: usize) -> GenusSeries {
    let t = todd_coefficients(order).expect("invertible");
    let one_plus_y = YPoly::from_ints(&[1, 1]);
    let coeffs = t.iter().enumerate().map(|(k, tk)| {
        let c = one_plus_y.pow(k as u32).scale(tk);
        if k == 1 {
            c - YPoly::y()
        } else {
            c
        }
    });
    GenusSeries::new("hirzebruch", TruncatedSeries::univariate(order, coeffs)).expect("normalized")
}

/// `1 + x`: the total Chern class.
pub fn chern_series(order: usize) -> GenusSeries {
    GenusSeries::new("chern", TruncatedSeries::univariate(order, [YPoly::one(), YPoly::one()])).expect("normalized")
}

/// `x / tanh x`.
pub fn l_series(order: usize) -> GenusSeries {
    let h = hirzebruch_series(order).specialize(&Rational::one());
    GenusSeries::new("l", h.series).expect("normalized")
}

pub fn specialize_genus(g: &GenusSeries, y0: &Rational) -> GenusSeries {
    g.specialize(y0)
}

/// Power sums `p_1..p_n` from graded pieces `e_1..e_n` via Newton's identities
/// `p_k = sum_{i<k} (-1)^{i-1} e_i p_{k-i} + (-1)^{k-1} k e_k`.
///
/// `e[0]` is ignored; the output has `p[0] = 0`.
pub fn power_sums_from_elementary(e: &[TruncatedSeries]) -> Result<Vec<TruncatedSeries>> {
    let n = e.len().saturating_sub(1);
    let zero = match e.first() {
        Some(s) => TruncatedSeries::zero(s.nvars(), s.order()),
        None => return Ok(Vec::new()),
    };
    let mut p = vec![zero.clone()];
    for k in 1..=n {
        let mut acc = e[k].scale_rational(&(Rational::from_int(k as i64) * Rational::sign_pow(k as i64 - 1)));
        for i in 1..k {
            let term = e[i].mul(&p[k - i])?.scale_rational(&Rational::sign_pow(i as i64 - 1));
            acc = acc.add(&term)?;
        }
        p.push(acc);
    }
    Ok(p)
}

/// `prod_i g(alpha_i)` for the roots of the total Chern class `chern`,
/// computed as `exp(sum_k b_k p_k)` with `log g = sum_k b_k x^k`.
pub fn multiplicative_series(g: &GenusSeries, chern: &TruncatedSeries, caps: Option<&[u32]>) -> Result<TruncatedSeries> {
    if !chern.constant_term().is_one() {
        return Err(Error::Domain("total Chern class must have constant term 1".into()));
    }
    let n = chern.order().min(g.order());
    let c = chern.truncate(n);
    let reduce = |s: TruncatedSeries| match caps {
        Some(caps) => s.retain_caps(caps),
        None => s,
    };
    let e: Vec<TruncatedSeries> = (0..=n).map(|k| c.component(k)).collect();
    let p = power_sums_from_elementary(&e)?;
    let b = g.series.truncate(n).log()?;
    let mut sum = TruncatedSeries::zero(c.nvars(), n);
    for k in 1..=n {
        let bk = b.coeff1(k as u32);
        if !bk.is_zero() {
            sum = sum.add(&reduce(p[k].scale(&bk)))?;
        }
    }
    Ok(reduce(sum.exp()?))
}

/// The class `g(E)` of a virtual bundle in the ring `model`.
pub fn multiplicative_class(g: &GenusSeries, e: &VirtualBundle, model: &ChowModel) -> Result<CohClass> {
    if e.model() != model {
        return Err(Error::Dimension(format!("bundle lives on {}, not {model}", e.model())));
    }
    let s = multiplicative_series(g, e.chern().series(), Some(model.factors()))?;
    model.class_from_series(&s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Space;
    use crate::ktheory::tangent_bundle;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn binom(n: u64, k: u64) -> i64 {
        (1..=k).fold(1u64, |acc, i| acc * (n + 1 - i) / i) as i64
    }

    /// Bernoulli numbers with `B_1 = -1/2` from `sum_{j<=m} C(m+1, j) B_j = 0`.
    fn bernoulli(n: usize) -> Vec<Rational> {
        let mut b = vec![Rational::one()];
        for m in 1..=n {
            let mut s = Rational::zero();
            for (j, bj) in b.iter().enumerate() {
                s += &(Rational::from_int(binom(m as u64 + 1, j as u64)) * bj);
            }
            b.push(-(s / Rational::from_int(m as i64 + 1)));
        }
        b
    }

    fn factorial(n: usize) -> Rational {
        (1..=n as i64).fold(Rational::one(), |acc, k| acc * Rational::from_int(k))
    }

    /// Power series quotient by schoolbook long division.
    fn divide(a: &[Rational], b: &[Rational], n: usize) -> Vec<Rational> {
        let mut q: Vec<Rational> = Vec::new();
        for k in 0..=n {
            let mut s = a.get(k).cloned().unwrap_or_default();
            for (j, qj) in q.iter().enumerate() {
                if let Some(bk) = b.get(k - j) {
                    s -= &(qj * bk);
                }
            }
            q.push(s / b[0].clone());
        }
        q
    }

    #[test]
    fn todd_matches_bernoulli() {
        let b = bernoulli(10);
        let td = todd_series(10);
        for k in 0..=10 {
            // u/(1-e^{-u}) = sum (-1)^k B_k u^k / k!
            let expected = Rational::sign_pow(k as i64) * b[k].clone() / factorial(k);
            assert_eq!(td.coeff(k as u32), YPoly::constant(expected), "k = {k}");
        }
        assert_eq!(td.coeff(2), YPoly::constant(r(1, 12)));
        assert_eq!(td.coeff(3), YPoly::zero());
        assert_eq!(td.coeff(4), YPoly::constant(r(-1, 720)));
    }

    #[test]
    fn hirzebruch_low_coefficients() {
        let h = hirzebruch_series(4);
        assert_eq!(h.coeff(1), YPoly::from_coeffs(vec![r(1, 2), r(-1, 2)]));
        assert_eq!(h.coeff(2), YPoly::from_coeffs(vec![r(1, 12), r(1, 6), r(1, 12)]));
        for k in 0..=4 {
            assert!(h.coeff(k).degree().unwrap_or(0) <= k as usize);
        }
    }

    #[test]
    fn specializations() {
        let h = hirzebruch_series(10);
        assert_eq!(h.specialize(&r(-1, 1)).series(), chern_series(10).series());
        assert_eq!(h.specialize(&Rational::zero()).series(), todd_series(10).series());
        let cosh: Vec<Rational> = (0..=11).map(|k| if k % 2 == 0 { factorial(k).recip().unwrap() } else { Rational::zero() }).collect();
        let sinh_over_x: Vec<Rational> = (0..=11)
            .map(|k| if k % 2 == 0 { factorial(k + 1).recip().unwrap() } else { Rational::zero() })
            .collect();
        let coth = divide(&cosh, &sinh_over_x, 10);
        let l = h.specialize(&Rational::one());
        for (k, c) in coth.iter().enumerate() {
            assert_eq!(l.coeff(k as u32), YPoly::constant(c.clone()));
        }
        assert_eq!(l.coeff(2), YPoly::constant(r(1, 3)));
        assert_eq!(l.coeff(4), YPoly::constant(r(-1, 45)));
    }

    #[test]
    fn newton_identities_on_split_roots() {
        // roots 1, 2, 3: e = (1, 6, 11, 6), p_k = 1 + 2^k + 3^k
        let e: Vec<TruncatedSeries> = [1, 6, 11, 6]
            .iter()
            .map(|&v| TruncatedSeries::constant(1, 4, YPoly::from_int(v)))
            .collect();
        let p = power_sums_from_elementary(&e).unwrap();
        for k in 1..=3u32 {
            let expected = 1 + 2i64.pow(k) + 3i64.pow(k);
            assert_eq!(p[k as usize].constant_term(), YPoly::from_int(expected));
        }
    }

    #[test]
    fn todd_of_p2() {
        let p2 = Space::ambient_space("P2", vec![2]);
        let t = tangent_bundle(&p2).unwrap();
        let td = multiplicative_class(&todd_series(4), &t, p2.ambient()).unwrap();
        assert_eq!(td.coeff(&[0]), YPoly::one());
        assert_eq!(td.coeff(&[1]), YPoly::constant(r(3, 2)));
        assert_eq!(td.coeff(&[2]), YPoly::one());
        assert_eq!(td.degree(), YPoly::one());
    }

    #[test]
    fn split_bundle_product_oracle() {
        // c = prod_j (1 + L_j) with line classes L_j: g(E) = prod_j g(L_j)
        let m = ChowModel::new(vec![1, 2]);
        let lines = [[1u32, 0], [0, 1], [2, 1], [1, 3]];
        let g = hirzebruch_series(5);
        let mut chern = m.one();
        let mut expected = m.one();
        for l in lines {
            let lf = m.linear_form(&l);
            chern = chern.mul(&m.one().add(&lf).unwrap()).unwrap();
            let mut gl = m.zero();
            for k in 0..=3u32 {
                gl = gl.add(&lf.pow(k).unwrap().scale(&g.coeff(k))).unwrap();
            }
            expected = expected.mul(&gl).unwrap();
        }
        let e = VirtualBundle::new(lines.len() as i64, chern).unwrap();
        assert_eq!(multiplicative_class(&g, &e, &m).unwrap(), expected);
    }

    #[test]
    fn zero_bundle_and_chern_genus() {
        let m = ChowModel::projective(3);
        let g = hirzebruch_series(4);
        let zero = VirtualBundle::trivial(&m, 0);
        assert_eq!(multiplicative_class(&g, &zero, &m).unwrap(), m.one());
        let p3 = Space::ambient_space("P3", vec![3]);
        let t = tangent_bundle(&p3).unwrap();
        let c = multiplicative_class(&g.specialize(&r(-1, 1)), &t, &m).unwrap();
        assert_eq!(&c, t.chern());
        let other = ChowModel::projective(2);
        assert!(matches!(multiplicative_class(&g, &t, &other), Err(Error::Dimension(_))));
    }

    #[test]
    fn genus_json() {
        let js = serde_json::to_string(&todd_series(2)).unwrap();
        assert_eq!(js, r#"{"name":"todd","coefficients":[["1"],["1/2"],["1/12"]]}"#);
        let back: GenusSeries = serde_json::from_str(&js).unwrap();
        assert_eq!(back, todd_series(2));
    }
}
