//! The q-Heisenberg algebra: modes a_j(r) and a_i*(l), their brackets, and
//! the Fock space K(1) as polynomials in the creation modes a_j(-r).

mod oracle;

use std::collections::BTreeMap;
use std::fmt;


use rand::Rng;
use serde::Serialize;

use crate::lattice::cartan_entry;
use crate::scalarfield::{qint, QScalar};

pub use oracle::{
    fock_apply, oracle_operators, oracle_sweep, sequential_apply, symbolic_apply, OracleCheck, OracleConfig, State, ZSeries,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    /// a_j(r)
    Plain,
    /// a_i*(l)
    Star,
}

/// A Heisenberg mode with a nonzero degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Mode {
    pub family: Family,
    pub index: usize,
    pub degree: i64,
}

impl Mode {
    pub fn plain(index: usize, degree: i64) -> Self {
        assert!(degree != 0, "mode degree must be nonzero");
        Mode { family: Family::Plain, index, degree }
    }

    pub fn star(index: usize, degree: i64) -> Self {
        assert!(degree != 0, "mode degree must be nonzero");
        Mode { family: Family::Star, index, degree }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let star = if self.family == Family::Star { "*" } else { "" };
        write!(f, "a_{}{}({})", self.index, star, self.degree)
    }
}

/// `[a_i(r), a_j(-r)] = [a_ij r][c r]/r`.
pub fn plain_bracket(i: usize, j: usize, r: i64, c: i64) -> QScalar {
    let a = cartan_entry(i, j);
    if a == 0 {
        return QScalar::zero();
    }
    &(&qint(a * r) * &qint(c * r)) / &QScalar::from_int(r)
}

/// The coefficient m_i^(j) of a_j(l) in a_i*(l).
pub fn astar_coeff(n: usize, i: usize, j: usize, l: i64) -> QScalar {
    let (a, b) = if j <= i { (j, n - i + 1) } else { (i, n - j + 1) };
    let num = &qint(a as i64 * l) * &qint(b as i64 * l);
    let den = &qint((n as i64 + 1) * l) * &qint(l);
    &num / &den
}

/// Bracket of two modes at level c.
pub fn bracket(n: usize, m1: &Mode, m2: &Mode, c: i64) -> QScalar {
    if m1.degree + m2.degree != 0 {
        return QScalar::zero();
    }
    let r = m1.degree;
    match (m1.family, m2.family) {
        (Family::Plain, Family::Plain) => plain_bracket(m1.index, m2.index, r, c),
        (Family::Star, Family::Plain) => (1..=n)
            .map(|p| &astar_coeff(n, m1.index, p, r) * &plain_bracket(p, m2.index, r, c))
            .sum(),
        (Family::Plain, Family::Star) => -bracket(n, m2, m1, c),
        (Family::Star, Family::Star) => (1..=n)
            .map(|p| &astar_coeff(n, m2.index, p, m2.degree) * &bracket(n, m1, &Mode::plain(p, m2.degree), c))
            .sum(),
    }
}

/// The matrix `B_kl(r) = [a_k(r), a_l(-r)]` at level 1 (0-based indices).
pub fn bracket_matrix(n: usize, r: i64) -> Vec<Vec<QScalar>> {
    (1..=n).map(|k| (1..=n).map(|l| plain_bracket(k, l, r, 1)).collect()).collect()
}

/// A monomial in the creation modes: sorted list of (mode index, degree r),
/// standing for the product of the a_mode(-r).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<(u16, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn from_factors(mut f: Vec<(u16, u32)>) -> Self {
        f.sort_unstable();
        Monomial(f)
    }

    pub fn factors(&self) -> &[(u16, u32)] {
        &self.0
    }

    /// Total degree Σ r.
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, r)| r).sum()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut v = Vec::with_capacity(self.0.len() + o.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&o.0);
        Monomial::from_factors(v)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.0.iter().map(|&(k, r)| format!("a_{}(-{r})", k + 1)).collect();
        f.write_str(&parts.join("·"))
    }
}

/// A finitely supported vector of K(1).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FockVector {
    terms: BTreeMap<Monomial, QScalar>,
}

impl FockVector {
    pub fn zero() -> Self {
        FockVector::default()
    }

    pub fn vacuum() -> Self {
        Self::monomial(Monomial::one(), QScalar::one())
    }

    pub fn monomial(m: Monomial, c: QScalar) -> Self {
        let mut v = FockVector::zero();
        v.add_term(m, c);
        v
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &QScalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn coefficient(&self, m: &Monomial) -> QScalar {
        self.terms.get(m).cloned().unwrap_or_else(QScalar::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: QScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add_assign(&mut self, o: &FockVector) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn scale(&self, c: &QScalar) -> FockVector {
        if c.is_zero() {
            return FockVector::zero();
        }
        FockVector { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    /// Product in the symmetric algebra, keeping only degrees ≤ `max_deg`.
    pub fn mul_truncated(&self, o: &FockVector, max_deg: u32) -> FockVector {
        let mut out = FockVector::zero();
        for (m1, c1) in &self.terms {
            let d1 = m1.degree();
            for (m2, c2) in &o.terms {
                if d1 + m2.degree() <= max_deg {
                    out.add_term(m1.mul(m2), c1 * c2);
                }
            }
        }
        out
    }

    /// Action of the annihilation mode a_k(r), r > 0, as a derivation.
    pub fn annihilate(&self, k: usize, r: u32) -> FockVector {
        let mut out = FockVector::zero();
        for (m, c) in &self.terms {
            for (pos, &(l, s)) in m.0.iter().enumerate() {
                if s != r {
                    continue;
                }
                let b = plain_bracket(k, l as usize + 1, r as i64, 1);
                if b.is_zero() {
                    continue;
                }
                let mut rest = m.0.clone();
                rest.remove(pos);
                out.add_term(Monomial(rest), c * &b);
            }
        }
        out
    }

    /// A random vector with at most `terms` monomials of degree ≤ `max_deg`
    /// and small integer coefficients.
    pub fn random<R: Rng>(rng: &mut R, n: usize, max_deg: u32, terms: usize) -> FockVector {
        let mut v = FockVector::zero();
        for _ in 0..terms {
            let deg = rng.gen_range(0..=max_deg);
            let mut factors = Vec::new();
            let mut left = deg;
            while left > 0 {
                let r = rng.gen_range(1..=left);
                factors.push((rng.gen_range(0..n) as u16, r));
                left -= r;
            }
            let c = rng.gen_range(-3i64..=3);
            if c != 0 {
                v.add_term(Monomial::from_factors(factors), QScalar::from_int(c));
            }
        }
        if v.is_zero() {
            v = FockVector::vacuum();
        }
        v
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("({})·{}", c.render(), m)).collect();
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_brackets() {
        for r in 1..=4 {
            let b = bracket(1, &Mode::plain(1, r), &Mode::plain(1, -r), 1);
            assert_eq!(b, &(&qint(2 * r) * &qint(r)) / &QScalar::from_int(r));
            let anti = bracket(1, &Mode::plain(1, -r), &Mode::plain(1, r), 1);
            assert_eq!(anti, -b);
            assert!(bracket(2, &Mode::plain(1, r), &Mode::plain(2, -r - 1), 1).is_zero());
        }
    }

    #[test]
    fn astar_examples() {
        for l in 1..=4 {
            assert_eq!(astar_coeff(1, 1, 1, l), &qint(l) / &qint(2 * l));
        }
        assert_eq!(astar_coeff(2, 1, 2, 1), QScalar::one() / &qint(3));
    }

    #[test]
    fn star_bracket_is_diagonal() {
        for n in 1..=3 {
            for i in 1..=n {
                for j in 1..=n {
                    for l in -4i64..=4 {
                        for k in -4i64..=4 {
                            if l == 0 || k == 0 {
                                continue;
                            }
                            let b = bracket(n, &Mode::star(i, l), &Mode::plain(j, k), 1);
                            if i == j && l + k == 0 {
                                let expect = &(&qint(l) * &qint(l)) / &QScalar::from_int(l);
                                assert_eq!(b, expect, "n={n} i={i} l={l}");
                            } else {
                                assert!(b.is_zero());
                            }
                            let back = bracket(n, &Mode::plain(j, k), &Mode::star(i, l), 1);
                            assert_eq!(back, -b);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn annihilation_on_vacuum_vanishes() {
        let v = FockVector::vacuum();
        for r in 1..=3 {
            assert!(v.annihilate(1, r).is_zero());
        }
        let m = FockVector::monomial(Monomial::from_factors(vec![(0, 2), (0, 2)]), QScalar::one());
        // a_1(2) a_1(-2)^2 = 2 [4][2]/2 a_1(-2)
        let got = m.annihilate(1, 2);
        let b = plain_bracket(1, 1, 2, 1);
        let expect = FockVector::monomial(Monomial::from_factors(vec![(0, 2)]), &b * &QScalar::from_int(2));
        assert_eq!(got, expect);
    }
}
