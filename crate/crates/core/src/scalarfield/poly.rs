//! Dense univariate polynomials over the integers in the variable `x = q^(1/2)`.
//!
//! Coefficients are stored low degree first with no trailing zeros; the zero
//! polynomial is the empty vector.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<BigInt>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>())
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// `c * x^k`.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64s(cs: &[i64]) -> Self {
        Poly::from_coeffs(cs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// Lowest index with a nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// True when the polynomial has exactly one nonzero coefficient.
    pub fn is_monomial(&self) -> bool {
        self.coeffs.iter().filter(|c| !c.is_zero()).count() == 1
    }

    pub fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    pub fn shift_down(&self, k: usize) -> Poly {
        debug_assert!(self.order().is_none_or(|o| o >= k));
        if k >= self.coeffs.len() {
            return Poly::zero();
        }
        Poly::from_coeffs(self.coeffs[k..].to_vec())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i);
            let b = other.coeffs.get(i);
            out.push(match (a, b) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Poly::from_coeffs(out)
    }

    pub fn neg(&self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Divides every coefficient by `c`; the division must be exact.
    pub fn div_exact_scalar(&self, c: &BigInt) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|a| a / c).collect() }
    }

    /// Gcd of the coefficients (nonnegative); zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = self.content();
        if self.lead().unwrap().is_negative() {
            c = -c;
        }
        self.div_exact_scalar(&c)
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default()
    }

    /// Exact division over the integers; `None` if `divisor` does not divide
    /// `self` with an integral quotient.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let dd = divisor.degree().unwrap();
        let ds = self.degree().unwrap();
        if ds < dd {
            return None;
        }
        let lead = divisor.lead().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); ds - dd + 1];
        for k in (0..=ds - dd).rev() {
            let top = &rem[k + dd];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(lead);
            if !r.is_zero() {
                return None;
            }
            for (i, c) in divisor.coeffs.iter().enumerate() {
                if !c.is_zero() {
                    rem[k + i] -= &q * c;
                }
            }
            quot[k] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Poly::from_coeffs(quot))
    }

    /// Pseudo-remainder of `self` by `divisor`.
    fn pseudo_rem(&self, divisor: &Poly) -> Poly {
        let dd = divisor.degree().unwrap();
        let lead = divisor.lead().unwrap().clone();
        let mut rem = self.clone();
        while let Some(dr) = rem.degree() {
            if dr < dd {
                break;
            }
            let top = rem.lead().unwrap().clone();
            rem = rem.scale(&lead).sub(&divisor.shift_up(dr - dd).scale(&top));
        }
        rem
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// Divides by `(x - 1)` once; requires `self(1) == 0`.
    pub fn div_x_minus_one(&self) -> Poly {
        // synthetic division by the root 1
        let n = self.coeffs.len();
        let mut out = vec![BigInt::zero(); n.saturating_sub(1)];
        let mut carry = BigInt::zero();
        for k in (1..n).rev() {
            carry += &self.coeffs[k];
            out[k - 1] = carry.clone();
        }
        debug_assert!((carry + &self.coeffs[0]).is_zero());
        Poly::from_coeffs(out)
    }

    /// Compares by degree then coefficients; used only for canonical ordering.
    pub fn canonical_cmp(&self, other: &Poly) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

/// Primitive gcd over the rationals (positive leading coefficient).
/// Returns the zero polynomial only when both inputs vanish.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.primitive();
    }
    if b.is_zero() {
        return a.primitive();
    }
    let oa = a.order().unwrap();
    let ob = b.order().unwrap();
    let xk = oa.min(ob);
    let a = a.shift_down(oa);
    let b = b.shift_down(ob);
    let core = if a.degree() == Some(0) || b.degree() == Some(0) {
        Poly::one()
    } else {
        let (pa, pb) = (a.primitive(), b.primitive());
        if pa == pb {
            pa
        } else {
            heuristic_gcd(&pa, &pb).unwrap_or_else(|| prs_gcd(&pa, &pb))
        }
    };
    core.shift_up(xk)
}

/// Primitive-remainder-sequence gcd of two primitive polynomials.
fn prs_gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut u, mut v) = if a.degree() >= b.degree() { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    while !v.is_zero() {
        let r = u.pseudo_rem(&v);
        u = v;
        v = r.primitive();
    }
    u.primitive()
}

/// Gcd by evaluation at a large integer and ξ-adic reconstruction. The
/// candidate is accepted only after exact trial division of both inputs.
fn heuristic_gcd(a: &Poly, b: &Poly) -> Option<Poly> {
    let bound = a.max_abs_coeff().min(b.max_abs_coeff());
    let mut xi: BigInt = bound * 2 + 29;
    for _ in 0..6 {
        let h = a.eval_int(&xi).gcd(&b.eval_int(&xi));
        let cand = interpolate_xi_adic(&h, &xi).primitive();
        if !cand.is_zero() && a.div_exact(&cand).is_some() && b.div_exact(&cand).is_some() {
            return Some(cand);
        }
        xi = (&xi * 73794) / 27011 + 1;
    }
    None
}

fn interpolate_xi_adic(h: &BigInt, xi: &BigInt) -> Poly {
    let mut coeffs = Vec::new();
    let mut h = h.clone();
    let half = xi / 2;
    while !h.is_zero() {
        let mut g = h.mod_floor(xi);
        if g > half {
            g -= xi;
        }
        coeffs.push(g.clone());
        h = (h - g) / xi;
    }
    Poly::from_coeffs(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[i64]) -> Poly {
        Poly::from_i64s(cs)
    }

    #[test]
    fn gcd_of_cyclotomic_products() {
        // (x^2-1)(x^2+1) and (x^2-1)(x+3)
        let a = p(&[-1, 0, 1]).mul(&p(&[1, 0, 1]));
        let b = p(&[-1, 0, 1]).mul(&p(&[3, 1]));
        assert_eq!(gcd(&a, &b), p(&[-1, 0, 1]));
        assert_eq!(prs_gcd(&a.primitive(), &b.primitive()), p(&[-1, 0, 1]));
    }

    #[test]
    fn gcd_strips_common_x_powers() {
        let a = p(&[0, 0, 2, 2]);
        let b = p(&[0, 4, 4]);
        assert_eq!(gcd(&a, &b), p(&[0, 1, 1]));
    }

    #[test]
    fn exact_division() {
        let a = p(&[-1, 0, 0, 1]);
        assert_eq!(a.div_exact(&p(&[-1, 1])), Some(p(&[1, 1, 1])));
        assert_eq!(a.div_exact(&p(&[1, 2])), None);
        assert_eq!(a.div_x_minus_one(), p(&[1, 1, 1]));
    }
}
