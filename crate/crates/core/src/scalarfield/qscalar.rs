use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::poly::{gcd, Poly};
use super::Half;

/// Exact element of Q(x), where x = q^(1/2).
///
/// Canonical form: numerator and denominator are integer polynomials, coprime
/// over Q, with coprime contents and a positive leading denominator
/// coefficient. Equality is structural on this form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QScalar {
    num: Poly,
    den: Poly,
}

impl QScalar {
    pub fn zero() -> Self {
        QScalar { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        QScalar { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_int(n: i64) -> Self {
        QScalar::from_bigint(BigInt::from(n))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        QScalar { num: Poly::constant(n), den: Poly::one() }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        QScalar::from_parts(Poly::constant(r.numer().clone()), Poly::constant(r.denom().clone()))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        QScalar::from_parts(Poly::from_i64s(&[n]), Poly::from_i64s(&[d]))
    }

    /// `x^k` for any integer k.
    pub fn x_pow(k: i64) -> Self {
        if k >= 0 {
            QScalar { num: Poly::monomial(BigInt::one(), k as usize), den: Poly::one() }
        } else {
            QScalar { num: Poly::one(), den: Poly::monomial(BigInt::one(), (-k) as usize) }
        }
    }

    /// `q^a` for a half-integer a.
    pub fn q_pow(a: Half) -> Self {
        QScalar::x_pow(a.twice())
    }

    /// `q^m` for an integer m.
    pub fn q_int_pow(m: i64) -> Self {
        QScalar::x_pow(2 * m)
    }

    /// Laurent polynomial `sum c_k x^k` given as (exponent, coefficient) pairs.
    pub fn laurent(terms: &[(i64, i64)]) -> Self {
        let mut acc = QScalar::zero();
        for &(k, c) in terms {
            acc = &acc + &(&QScalar::x_pow(k) * &QScalar::from_int(c));
        }
        acc
    }

    pub fn from_parts(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut s = QScalar { num, den };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = Poly::one();
            return;
        }
        if !self.den.is_one() {
            let g = gcd(&self.num, &self.den);
            if !g.is_one() {
                self.num = self.num.div_exact(&g).expect("gcd divides numerator");
                self.den = self.den.div_exact(&g).expect("gcd divides denominator");
            }
        }
        let mut c = self.num.content().gcd(&self.den.content());
        if self.den.lead().unwrap().is_negative() {
            c = -c;
        }
        if !c.is_one() {
            self.num = self.num.div_exact_scalar(&c);
            self.den = self.den.div_exact_scalar(&c);
        }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        QScalar::from_parts(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: i64) -> Self {
        if e < 0 {
            return self.inv().pow(-e);
        }
        let mut acc = QScalar::one();
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Substitutes a rational value for x. Returns `None` at a pole.
    pub fn eval(&self, x: &BigRational) -> Option<BigRational> {
        let d = self.den.eval_rational(x);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval_rational(x) / d)
    }

    /// Returns the rational constant if the value does not depend on q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num.degree().unwrap_or(0) == 0 && self.den.degree() == Some(0) {
            let n = self.num.coeffs().first().cloned().unwrap_or_default();
            Some(BigRational::new(n, self.den.coeffs()[0].clone()))
        } else {
            None
        }
    }

    /// If the value is a Laurent polynomial in x, returns its (exponent,
    /// coefficient) terms in increasing exponent order.
    pub fn as_laurent(&self) -> Option<Vec<(i64, BigRational)>> {
        if !self.den.is_monomial() {
            return None;
        }
        let shift = self.den.order().unwrap() as i64;
        let d = BigRational::from_integer(self.den.lead().unwrap().clone());
        Some(
            self.num
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (k as i64 - shift, BigRational::from_integer(c.clone()) / &d))
                .collect(),
        )
    }

    /// Canonical text rendering in powers of q (half-integer powers allowed).
    pub fn render(&self) -> String {
        let n = render_poly_in_q(&self.num);
        if self.den.is_one() {
            return n;
        }
        let n = if self.num.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 {
            format!("({n})")
        } else {
            n
        };
        format!("{}/({})", n, render_poly_in_q(&self.den))
    }

    pub fn to_json(&self) -> QScalarJson {
        QScalarJson {
            num: self.num.coeffs().iter().map(|c| c.to_string()).collect(),
            den: self.den.coeffs().iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn from_json(j: &QScalarJson) -> Option<Self> {
        let parse = |v: &[String]| -> Option<Poly> {
            v.iter().map(|s| s.parse::<BigInt>().ok()).collect::<Option<Vec<_>>>().map(Poly::from_coeffs)
        };
        let den = parse(&j.den)?;
        if den.is_zero() {
            return None;
        }
        Some(QScalar::from_parts(parse(&j.num)?, den))
    }
}

/// JSON form: coefficient arrays in x = q^(1/2), lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QScalarJson {
    pub num: Vec<String>,
    pub den: Vec<String>,
}

fn render_q_power(k: usize) -> String {
    match k {
        0 => String::new(),
        2 => "q".to_string(),
        k if k % 2 == 0 => format!("q^{}", k / 2),
        k => format!("q^({}/2)", k),
    }
}

fn render_poly_in_q(p: &Poly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        let mono = render_q_power(k);
        let body = if mono.is_empty() {
            mag.to_string()
        } else if mag.is_one() {
            mono
        } else {
            format!("{mag}*{mono}")
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}

impl fmt::Display for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QScalar({})", self.render())
    }
}

impl Default for QScalar {
    fn default() -> Self {
        QScalar::zero()
    }
}

impl<'a> Add<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn add(self, rhs: &QScalar) -> QScalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return QScalar::from_parts(self.num.add(&rhs.num), self.den.clone());
        }
        QScalar::from_parts(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }
}

impl<'a> Sub<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn sub(self, rhs: &QScalar) -> QScalar {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn mul(self, rhs: &QScalar) -> QScalar {
        if self.is_zero() || rhs.is_zero() {
            return QScalar::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return QScalar::from_parts(self.num.mul(&rhs.num), Poly::one());
        }
        // cross-cancel before multiplying to keep degrees small
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        let n1 = self.num.div_exact(&g1).unwrap();
        let d2 = rhs.den.div_exact(&g1).unwrap();
        let n2 = rhs.num.div_exact(&g2).unwrap();
        let d1 = self.den.div_exact(&g2).unwrap();
        QScalar::from_parts(n1.mul(&n2), d1.mul(&d2))
    }
}

impl<'a> Div<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn div(self, rhs: &QScalar) -> QScalar {
        self * &rhs.inv()
    }
}

impl Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        QScalar { num: self.num.neg(), den: self.den.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<QScalar> for QScalar {
            type Output = QScalar;
            fn $m(self, rhs: QScalar) -> QScalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a QScalar> for QScalar {
            type Output = QScalar;
            fn $m(self, rhs: &QScalar) -> QScalar {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        -&self
    }
}

impl Zero for QScalar {
    fn zero() -> Self {
        QScalar::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for QScalar {
    fn one() -> Self {
        QScalar::one()
    }
}

impl std::iter::Sum for QScalar {
    fn sum<I: Iterator<Item = QScalar>>(iter: I) -> Self {
        iter.fold(QScalar::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_is_unique() {
        let a = QScalar::from_parts(Poly::from_i64s(&[-2, 0, 2]), Poly::from_i64s(&[-4, 4]));
        let b = QScalar::from_parts(Poly::from_i64s(&[1, 1]), Poly::from_i64s(&[2]));
        assert_eq!(a, b);
        let c = QScalar::from_parts(Poly::from_i64s(&[1]), Poly::from_i64s(&[-3]));
        assert_eq!(c, QScalar::from_ratio(-1, 3));
    }

    #[test]
    fn field_identities() {
        let a = QScalar::laurent(&[(2, 1), (-2, -1)]);
        let b = QScalar::laurent(&[(1, 3), (0, 1)]);
        assert_eq!(&(&a * &b) / &b, a);
        assert_eq!(&(&a + &b) - &b, a);
        assert_eq!((&a * &a.inv()), QScalar::one());
    }

    #[test]
    fn renders_half_powers() {
        assert_eq!(QScalar::x_pow(1).render(), "q^(1/2)");
        let s = &QScalar::q_int_pow(2) - &QScalar::one();
        assert_eq!((&s / &QScalar::q_int_pow(1)).render(), "(q^2 - 1)/(q)");
        assert_eq!(QScalar::zero().render(), "0");
    }

    #[test]
    fn json_round_trip() {
        let s = &QScalar::laurent(&[(3, 2), (0, -1)]) / &QScalar::laurent(&[(1, 1), (0, 5)]);
        assert_eq!(QScalar::from_json(&s.to_json()).unwrap(), s);
    }
}
