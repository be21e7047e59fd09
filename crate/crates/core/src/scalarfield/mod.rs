//! Exact arithmetic over Q(q^(1/2)): the rational function field in
//! `x = q^(1/2)`, q-integers and q-binomials, classical limits, and closed-form
//! recognition of contraction series as products of q-shifted linear factors.

mod poly;
mod qscalar;
mod recognize;

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use poly::Poly;
pub use qscalar::{QScalar, QScalarJson};
pub use recognize::{
    berlekamp_massey, log_coefficients, recognize_product, BmField, FactoredPrefactor, LinearFactor, RecognizeBounds,
};

/// Rational exponent or pairing value.
pub type Rat = Ratio<i64>;

/// A half-integer, stored as twice its value.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Half(i64);

impl Half {
    pub const ZERO: Half = Half(0);

    pub fn from_twice(t: i64) -> Self {
        Half(t)
    }

    pub fn from_int(n: i64) -> Self {
        Half(2 * n)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn to_rat(self) -> Rat {
        Rat::new(self.0, 2)
    }

    /// Converts a rational with denominator dividing 2.
    pub fn from_rat(r: Rat) -> Option<Self> {
        let t = r * Rat::from_integer(2);
        t.is_integer().then(|| Half(t.to_integer()))
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn abs(self) -> Self {
        Half(self.0.abs())
    }

    /// All half-integers in `[lo, hi]`.
    pub fn range(lo: Half, hi: Half) -> impl Iterator<Item = Half> {
        (lo.0..=hi.0).map(Half)
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl fmt::Debug for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Add for Half {
    type Output = Half;
    fn add(self, rhs: Half) -> Half {
        Half(self.0 + rhs.0)
    }
}

impl Sub for Half {
    type Output = Half;
    fn sub(self, rhs: Half) -> Half {
        Half(self.0 - rhs.0)
    }
}

impl Neg for Half {
    type Output = Half;
    fn neg(self) -> Half {
        Half(-self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("q-binomial requires 0 <= k <= m, got m = {m}, k = {k}")]
    BinomialDomain { m: i64, k: i64 },
    #[error("pole at q = 1 in {0}")]
    PoleAtOne(String),
    #[error("no product form found: {0}")]
    NoMatch(String),
}

/// The q-integer `[m] = (q^m - q^-m)/(q - q^-1)`.
pub fn qint(m: i64) -> QScalar {
    if m == 0 {
        return QScalar::zero();
    }
    let sign = m.signum();
    let m = m.abs();
    // [m] = q^(m-1) + q^(m-3) + ... + q^(1-m)
    let terms: Vec<(i64, i64)> = (0..m).map(|k| (2 * (m - 1 - 2 * k), sign)).collect();
    QScalar::laurent(&terms)
}

/// `[m]! = [m][m-1]...[1]`, with `[0]! = 1`.
pub fn qfactorial(m: i64) -> QScalar {
    (1..=m).fold(QScalar::one(), |acc, k| &acc * &qint(k))
}

/// Gaussian binomial `[m]!/([k]![m-k]!)`.
pub fn qbinom(m: i64, k: i64) -> Result<QScalar, ScalarError> {
    if m < 0 || k < 0 || k > m {
        return Err(ScalarError::BinomialDomain { m, k });
    }
    Ok(&qfactorial(m) / &(&qfactorial(k) * &qfactorial(m - k)))
}

/// Value at q = 1 after cancelling common factors of (x - 1).
pub fn limit_q1(f: &QScalar) -> Result<BigRational, ScalarError> {
    let one = BigRational::one();
    let mut num = f.numer().clone();
    let mut den = f.denom().clone();
    loop {
        let dv = den.eval_rational(&one);
        let nv = num.eval_rational(&one);
        if !dv.is_zero() {
            return Ok(nv / dv);
        }
        if !nv.is_zero() {
            return Err(ScalarError::PoleAtOne(f.render()));
        }
        num = num.div_x_minus_one();
        den = den.div_x_minus_one();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(m: i64) -> QScalar {
        QScalar::q_int_pow(m)
    }

    #[test]
    fn qint_small_values() {
        assert!(qint(0).is_zero());
        assert_eq!(qint(2), &q(1) + &q(-1));
        for m in 1..=6 {
            assert_eq!(qint(-m), -qint(m));
            let def = &(&q(m) - &q(-m)) / &(&q(1) - &q(-1));
            assert_eq!(qint(m), def);
        }
    }

    #[test]
    fn qbinom_values() {
        for m in 0..6 {
            assert!(qbinom(m, 0).unwrap().is_one());
        }
        assert_eq!(qbinom(2, 1).unwrap(), qint(2));
        // [4][3]/[2] = q^4 + q^2 + 2 + q^-2 + q^-4, expanded by hand
        let b = qbinom(4, 2).unwrap();
        assert_eq!(b, &(&qint(4) * &qint(3)) / &qint(2));
        assert_eq!(b, QScalar::laurent(&[(8, 1), (4, 1), (0, 2), (-4, 1), (-8, 1)]));
        assert!(b.as_laurent().is_some());
        assert!(qbinom(2, 3).is_err());
    }

    #[test]
    fn qbinom_symmetry_and_pascal() {
        for m in 1..=8 {
            for k in 0..=m {
                let b = qbinom(m, k).unwrap();
                assert_eq!(b, qbinom(m, m - k).unwrap());
                assert!(b.as_laurent().is_some());
                if k >= 1 && k < m {
                    // [m,k] = q^-k [m-1,k] + q^(m-k) [m-1,k-1]
                    let rhs = &(&q(-k) * &qbinom(m - 1, k).unwrap())
                        + &(&q(m - k) * &qbinom(m - 1, k - 1).unwrap());
                    assert_eq!(b, rhs);
                }
            }
        }
    }

    #[test]
    fn classical_limits() {
        for m in 1..=5 {
            assert_eq!(limit_q1(&qint(m)).unwrap(), BigRational::from_integer(m.into()));
        }
        assert!(limit_q1(&(&q(1) - &q(-1))).unwrap().is_zero());
        let f = &(&QScalar::one() - &q(1)) / &(&QScalar::one() - &q(2));
        assert_eq!(limit_q1(&f).unwrap(), BigRational::new(1.into(), 2.into()));
        let pole = (&q(1) - &q(-1)).inv();
        assert!(matches!(limit_q1(&pole), Err(ScalarError::PoleAtOne(_))));
    }

    #[test]
    fn half_display() {
        assert_eq!(Half::from_twice(3).to_string(), "3/2");
        assert_eq!(Half::from_int(-2).to_string(), "-2");
        assert_eq!(Half::from_rat(Rat::new(5, 2)), Some(Half::from_twice(5)));
        assert_eq!(Half::from_rat(Rat::new(1, 3)), None);
    }
}
