use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Rational;

/// Polynomial in the parameter `y` with rational coefficients.
///
/// `coeffs[i]` is the coefficient of `y^i`; trailing zeros are always
/// stripped so that structural equality is value equality.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct YPoly {
    coeffs: Vec<Rational>,
}

impl YPoly {
    fn normalize(mut self) -> Self {
        while self.coeffs.last().is_some_and(Rational::is_zero) {
            self.coeffs.pop();
        }
        self
    }

    pub fn zero() -> Self {
        YPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        YPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        YPoly { coeffs: vec![c] }.normalize()
    }

    pub fn from_int(n: i64) -> Self {
        YPoly::constant(Rational::from_int(n))
    }

    /// The indeterminate `y`.
    pub fn y() -> Self {
        YPoly {
            coeffs: vec![Rational::zero(), Rational::one()],
        }
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        YPoly { coeffs }.normalize()
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        YPoly::from_coeffs(coeffs.iter().map(|&c| Rational::from_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// Degree in `y`, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// The value as a rational if the polynomial has `y`-degree at most 0.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.coeffs.len() {
            0 => Some(Rational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return YPoly::zero();
        }
        YPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Horner evaluation at `y = y0`.
    pub fn eval(&self, y0: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * y0) + c;
        }
        acc
    }

    /// Substitutes `y := y0`, returning a constant polynomial.
    pub fn specialize(&self, y0: &Rational) -> Self {
        YPoly::constant(self.eval(y0))
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = YPoly::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }
}

impl From<Rational> for YPoly {
    fn from(c: Rational) -> Self {
        YPoly::constant(c)
    }
}

impl Add<&YPoly> for &YPoly {
    type Output = YPoly;
    fn add(self, rhs: &YPoly) -> YPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| &self.coeff(i) + &rhs.coeff(i)).collect();
        YPoly { coeffs }.normalize()
    }
}

impl Sub<&YPoly> for &YPoly {
    type Output = YPoly;
    fn sub(self, rhs: &YPoly) -> YPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| &self.coeff(i) - &rhs.coeff(i)).collect();
        YPoly { coeffs }.normalize()
    }
}

impl Mul<&YPoly> for &YPoly {
    type Output = YPoly;
    fn mul(self, rhs: &YPoly) -> YPoly {
        if self.is_zero() || rhs.is_zero() {
            return YPoly::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += &(a * b);
            }
        }
        YPoly { coeffs }.normalize()
    }
}

impl Neg for &YPoly {
    type Output = YPoly;
    fn neg(self) -> YPoly {
        YPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<YPoly> for YPoly {
            type Output = YPoly;
            fn $method(self, rhs: YPoly) -> YPoly {
                $trait::$method(&self, &rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for YPoly {
    type Output = YPoly;
    fn neg(self) -> YPoly {
        -&self
    }
}

impl fmt::Display for YPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (neg, abs) = if c.is_negative() { (true, -c) } else { (false, c.clone()) };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match (i, abs.is_one()) {
                (0, _) => write!(f, "{abs}")?,
                (1, true) => write!(f, "y")?,
                (1, false) => write!(f, "{abs}*y")?,
                (_, true) => write!(f, "y^{i}")?,
                (_, false) => write!(f, "{abs}*y^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for YPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "YPoly({self})")
    }
}

impl Serialize for YPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.coeffs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for YPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let coeffs = Vec::<Rational>::deserialize(deserializer)?;
        Ok(YPoly::from_coeffs(coeffs))
    }
}
