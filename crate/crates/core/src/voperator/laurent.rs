//! Laurent polynomials in `u = q^r` with half-integer exponents and integer
//! coefficients. They describe how an exponential's mode coefficients depend
//! on the mode degree r.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::scalarfield::{Half, QScalar};

/// `Σ c_k u^(k/2)`, keyed by twice the exponent.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Laurent(BTreeMap<i64, i64>);

impl Laurent {
    pub fn zero() -> Self {
        Laurent(BTreeMap::new())
    }

    /// `c u^(twice/2)`.
    pub fn mono(twice: i64, c: i64) -> Self {
        let mut m = BTreeMap::new();
        if c != 0 {
            m.insert(twice, c);
        }
        Laurent(m)
    }

    /// `[a r]/[r] = u^(a-1) + u^(a-3) + ... + u^(1-a)` for a ≥ 1.
    pub fn sym(a: i64) -> Self {
        let mut l = Laurent::zero();
        for m in 0..a {
            l.add_mono(2 * (a - 1 - 2 * m), 1);
        }
        l
    }

    /// `u^a - u^-a` for integer a.
    pub fn antisym(a: i64) -> Self {
        let mut l = Laurent::mono(2 * a, 1);
        l.add_mono(-2 * a, -1);
        l
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.0.iter().map(|(&k, &c)| (k, c))
    }

    pub fn coefficient(&self, twice: i64) -> i64 {
        self.0.get(&twice).copied().unwrap_or(0)
    }

    fn add_mono(&mut self, twice: i64, c: i64) {
        if c == 0 {
            return;
        }
        let e = self.0.entry(twice).or_insert(0);
        *e += c;
        if *e == 0 {
            self.0.remove(&twice);
        }
    }

    pub fn add(&self, o: &Laurent) -> Laurent {
        let mut r = self.clone();
        for (&k, &c) in &o.0 {
            r.add_mono(k, c);
        }
        r
    }

    pub fn neg(&self) -> Laurent {
        Laurent(self.0.iter().map(|(&k, &c)| (k, -c)).collect())
    }

    pub fn sub(&self, o: &Laurent) -> Laurent {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Laurent) -> Laurent {
        let mut r = Laurent::zero();
        for (&k1, &c1) in &self.0 {
            for (&k2, &c2) in &o.0 {
                r.add_mono(k1 + k2, c1 * c2);
            }
        }
        r
    }

    /// Multiplies by `u^t`.
    pub fn shift(&self, t: Half) -> Laurent {
        Laurent(self.0.iter().map(|(&k, &c)| (k + t.twice(), c)).collect())
    }

    /// Exact division; `None` if the quotient is not a Laurent polynomial
    /// with integer coefficients.
    pub fn div_exact(&self, d: &Laurent) -> Option<Laurent> {
        if self.is_zero() {
            return Some(Laurent::zero());
        }
        let (&dlow, _) = d.0.iter().next()?;
        let (&dhigh, &dlead) = d.0.iter().next_back()?;
        let mut rem = self.clone();
        let mut q = Laurent::zero();
        // Exponents live on a lattice of step 1 in the key; long division
        // from the top. Bounded by the span of the dividend.
        while let Some((&rhigh, &rlead)) = rem.0.iter().next_back() {
            let (&rlow, _) = rem.0.iter().next().unwrap();
            if rhigh - rlow < dhigh - dlow {
                return None;
            }
            if rlead % dlead != 0 {
                return None;
            }
            let c = rlead / dlead;
            let k = rhigh - dhigh;
            q.add_mono(k, c);
            for (&dk, &dc) in &d.0 {
                rem.add_mono(dk + k, -c * dc);
            }
        }
        Some(q)
    }

    /// Value at `u = q^r`: `Σ c x^(k r)` with `x = q^(1/2)`.
    pub fn eval(&self, r: i64) -> QScalar {
        let terms: Vec<(i64, i64)> = self.0.iter().map(|(&k, &c)| (k * r, c)).collect();
        QScalar::laurent(&terms)
    }
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.0.iter().map(|(&k, &c)| format!("{c}u^{}", Half::from_twice(k))).collect();
        f.write_str(&parts.join(" + "))
    }
}

impl Zero for Laurent {
    fn zero() -> Self {
        Laurent::zero()
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Add for Laurent {
    type Output = Laurent;
    fn add(self, o: Laurent) -> Laurent {
        Laurent::add(&self, &o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sym_and_division() {
        let s3 = Laurent::sym(3);
        assert_eq!(s3.coefficient(4), 1);
        assert_eq!(s3.coefficient(0), 1);
        assert_eq!(s3.coefficient(-4), 1);
        // (u^3 - u^-3) = (u - u^-1) S_3
        let prod = Laurent::antisym(1).mul(&s3);
        assert_eq!(prod, Laurent::antisym(3));
        assert_eq!(Laurent::antisym(3).div_exact(&Laurent::antisym(1)), Some(s3));
        assert_eq!(Laurent::antisym(2).div_exact(&Laurent::antisym(3)), None);
    }

    #[test]
    fn eval_matches_qscalar() {
        let l = Laurent::mono(1, 2).add(&Laurent::mono(-4, -1));
        let v = l.eval(3);
        assert_eq!(v, &(&QScalar::x_pow(3) * &QScalar::from_int(2)) - &QScalar::x_pow(-12));
    }
}
