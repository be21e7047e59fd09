//! Closed-form recognition of contraction exponentials.
//!
//! A contraction `exp(sum_r c_r w^r)` equals `prod_k (1 - q^(a_k) w)^(e_k)`
//! exactly when `r c_r = -sum_k e_k q^(a_k r)` for every r. The right side is
//! an exponential sum, so the sequence `r c_r` satisfies a linear recurrence
//! whose characteristic roots are the powers `q^(a_k)`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::{Half, QScalar, Rat, ScalarError};

/// Field operations needed by [`berlekamp_massey`].
pub trait BmField: Clone + PartialEq + Zero + One {
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    fn div_ref(&self, o: &Self) -> Self;
}

impl BmField for BigRational {
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn div_ref(&self, o: &Self) -> Self {
        self / o
    }
}

impl BmField for QScalar {
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn div_ref(&self, o: &Self) -> Self {
        self / o
    }
}

/// Berlekamp–Massey over a field. Returns the connection polynomial
/// `C = [1, c_1, .., c_L]` of the shortest recurrence
/// `sum_i c_i s_(n-i) = 0` generating the whole input.
pub fn berlekamp_massey<F: BmField>(seq: &[F]) -> Vec<F> {
    let mut c = vec![F::one()];
    let mut b = vec![F::one()];
    let mut len = 0usize;
    let mut m = 1usize;
    let mut bd = F::one();
    for n in 0..seq.len() {
        let mut d = seq[n].clone();
        for i in 1..=len {
            if i < c.len() {
                d = d.sub_ref(&c[i].mul_ref(&seq[n - i]).mul_ref(&(F::zero().sub_ref(&F::one()))));
            }
        }
        if d.is_zero() {
            m += 1;
            continue;
        }
        let coef = d.div_ref(&bd);
        let prev = c.clone();
        if c.len() < b.len() + m {
            c.resize(b.len() + m, F::zero());
        }
        for (i, bi) in b.iter().enumerate() {
            c[i + m] = c[i + m].sub_ref(&coef.mul_ref(bi));
        }
        if 2 * len <= n {
            len = n + 1 - len;
            b = prev;
            bd = d;
            m = 1;
        } else {
            m += 1;
        }
    }
    c.truncate(len + 1);
    while c.len() < len + 1 {
        c.push(F::zero());
    }
    c
}

/// One factor `(z1 - q^a z2)^e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LinearFactor {
    pub a: Half,
    pub e: i32,
}

/// `constant * z1^z1exp * z2^z2exp * prod_k (z1 - q^(a_k) z2)^(e_k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactoredPrefactor {
    pub constant: QScalar,
    pub z1exp: Rat,
    pub z2exp: Rat,
    factors: Vec<LinearFactor>,
}

impl FactoredPrefactor {
    pub fn one() -> Self {
        FactoredPrefactor {
            constant: QScalar::one(),
            z1exp: Rat::zero(),
            z2exp: Rat::zero(),
            factors: Vec::new(),
        }
    }

    pub fn new(constant: QScalar, z1exp: Rat, z2exp: Rat, factors: &[LinearFactor]) -> Self {
        let mut p = FactoredPrefactor { constant, z1exp, z2exp, factors: Vec::new() };
        for f in factors {
            p.push_factor(f.a, f.e);
        }
        p
    }

    /// Builds `(c1 z1 - c2 z2)` with `c1 = q^(b1)`, `c2 = q^(b2)` raised to `e`.
    pub fn linear(b1: Half, b2: Half, e: i32) -> Self {
        let constant = QScalar::q_pow(b1).pow(e as i64);
        FactoredPrefactor::new(
            constant,
            Rat::zero(),
            Rat::zero(),
            &[LinearFactor { a: b2 - b1, e }],
        )
    }

    pub fn factors(&self) -> &[LinearFactor] {
        &self.factors
    }

    fn push_factor(&mut self, a: Half, e: i32) {
        if e == 0 {
            return;
        }
        match self.factors.binary_search_by(|f| f.a.cmp(&a)) {
            Ok(i) => {
                self.factors[i].e += e;
                if self.factors[i].e == 0 {
                    self.factors.remove(i);
                }
            }
            Err(i) => self.factors.insert(i, LinearFactor { a, e }),
        }
    }

    pub fn mul(&self, other: &FactoredPrefactor) -> FactoredPrefactor {
        let mut p = self.clone();
        p.constant = &p.constant * &other.constant;
        p.z1exp += other.z1exp;
        p.z2exp += other.z2exp;
        for f in &other.factors {
            p.push_factor(f.a, f.e);
        }
        p
    }

    pub fn inv(&self) -> FactoredPrefactor {
        FactoredPrefactor {
            constant: self.constant.inv(),
            z1exp: -self.z1exp,
            z2exp: -self.z2exp,
            factors: self.factors.iter().map(|f| LinearFactor { a: f.a, e: -f.e }).collect(),
        }
    }

    pub fn div(&self, other: &FactoredPrefactor) -> FactoredPrefactor {
        self.mul(&other.inv())
    }

    /// Exponent of `(z1 - q^a z2)`; negative for poles.
    pub fn exponent_at(&self, a: Half) -> i32 {
        self.factors.iter().find(|f| f.a == a).map_or(0, |f| f.e)
    }

    /// Shifts with `e_k < 0`, i.e. the locations of poles `z1 = q^a z2`.
    pub fn pole_shifts(&self) -> Vec<Half> {
        self.factors.iter().filter(|f| f.e < 0).map(|f| f.a).collect()
    }

    /// Substitutes `z1 -> q^t z1`. Requires `t * z1exp` to be a half-integer.
    pub fn shift_first(&self, t: Half) -> Option<FactoredPrefactor> {
        let zpow = Half::from_rat(t.to_rat() * self.z1exp)?;
        let mut constant = &self.constant * &QScalar::q_pow(zpow);
        let mut factors = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            // (q^t z1 - q^a z2)^e = q^(t e) (z1 - q^(a-t) z2)^e
            constant = &constant * &QScalar::q_pow(t).pow(f.e as i64);
            factors.push(LinearFactor { a: f.a - t, e: f.e });
        }
        Some(FactoredPrefactor { constant, z1exp: self.z1exp, z2exp: self.z2exp, factors })
    }

    /// Rewrites `F(z2, z1)` in the variables `(z1, z2)`.
    pub fn swapped(&self) -> FactoredPrefactor {
        let mut constant = self.constant.clone();
        let mut factors = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            // (z2 - q^a z1)^e = (-q^a)^e (z1 - q^-a z2)^e
            let c = -&QScalar::q_pow(f.a);
            constant = &constant * &c.pow(f.e as i64);
            factors.push(LinearFactor { a: -f.a, e: f.e });
        }
        factors.sort();
        FactoredPrefactor { constant, z1exp: self.z2exp, z2exp: self.z1exp, factors }
    }

    /// Value of `[(z1 - z2) F]` on the diagonal `z1 = z2 = z`, as
    /// `(scalar, power of z)`. Requires a simple pole at `a = 0`.
    pub fn diagonal_residue(&self) -> Option<(QScalar, Rat)> {
        if self.exponent_at(Half::ZERO) != -1 {
            return None;
        }
        let mut scalar = self.constant.clone();
        let mut zpow = self.z1exp + self.z2exp;
        for f in &self.factors {
            if f.a == Half::ZERO {
                continue;
            }
            let lin = &QScalar::one() - &QScalar::q_pow(f.a);
            scalar = &scalar * &lin.pow(f.e as i64);
            zpow += Rat::from_integer(f.e as i64);
        }
        Some((scalar, zpow))
    }

    /// Total degree shift contributed by the linear factors.
    pub fn factor_degree(&self) -> i64 {
        self.factors.iter().map(|f| f.e as i64).sum()
    }

    /// Coefficients `f_0..f_order` of `prod_k (1 - q^(a_k) w)^(e_k)` expanded
    /// in nonnegative powers of `w = z2/z1`.
    pub fn w_series(&self, order: usize) -> Vec<QScalar> {
        let mut acc = vec![QScalar::zero(); order + 1];
        acc[0] = QScalar::one();
        for f in &self.factors {
            let single = binomial_series(f.a, f.e, order);
            acc = mul_series(&acc, &single, order);
        }
        acc
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        if !self.constant.is_one() || (self.factors.is_empty() && self.z1exp.is_zero() && self.z2exp.is_zero()) {
            parts.push(if self.constant.numer().coeffs().len() > 1 || !self.constant.denom().is_one() {
                format!("({})", self.constant.render())
            } else {
                self.constant.render()
            });
        }
        for (var, e) in [("z1", self.z1exp), ("z2", self.z2exp)] {
            if !e.is_zero() {
                parts.push(if e.is_one() { var.to_string() } else { format!("{var}^({e})") });
            }
        }
        for f in &self.factors {
            let coef = match f.a.twice() {
                0 => String::new(),
                2 => "q*".to_string(),
                t if t % 2 == 0 => format!("q^{}*", t / 2),
                t => format!("q^({t}/2)*"),
            };
            let base = format!("(z1 - {coef}z2)");
            parts.push(if f.e == 1 { base } else { format!("{base}^({})", f.e) });
        }
        parts.join(" ")
    }
}

impl fmt::Display for FactoredPrefactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn mul_series(a: &[QScalar], b: &[QScalar], order: usize) -> Vec<QScalar> {
    let mut out = vec![QScalar::zero(); order + 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(order + 1 - i) {
            if !bj.is_zero() {
                out[i + j] = &out[i + j] + &(ai * bj);
            }
        }
    }
    out
}

/// `(1 - q^a w)^e` to the given order (generalized binomial series).
fn binomial_series(a: Half, e: i32, order: usize) -> Vec<QScalar> {
    let mut out = Vec::with_capacity(order + 1);
    let mut binom = BigRational::one();
    let qa = QScalar::q_pow(a);
    let mut qpow = QScalar::one();
    for m in 0..=order {
        let sign = if m % 2 == 0 { 1 } else { -1 };
        let c = &QScalar::from_rational(&(binom.clone() * BigRational::from_integer(sign.into()))) * &qpow;
        out.push(c);
        // C(e, m+1) = C(e, m) (e - m)/(m + 1)
        binom *= BigRational::new(BigInt::from(e as i64 - m as i64), BigInt::from(m as i64 + 1));
        qpow = &qpow * &qa;
    }
    out
}

/// Bounds for [`recognize_product`].
#[derive(Clone, Copy, Debug)]
pub struct RecognizeBounds {
    pub amax: Half,
    pub emax: i32,
    pub n_terms: usize,
}

impl RecognizeBounds {
    /// Defaults for rank n: `amax = n + 3`, `emax = 2`, 16 terms.
    pub fn for_rank(n: usize) -> Self {
        RecognizeBounds { amax: Half::from_int(n as i64 + 3), emax: 2, n_terms: 16 }
    }
}

/// Finds the factored form `prod_k (1 - q^(a_k) w)^(e_k)` whose logarithm has
/// coefficients `c_r` (given for r = 1..N, `c[0]` is `c_1`).
///
/// The recurrence is found by Berlekamp–Massey on the sequence `r c_r`
/// specialised at a rational point, its roots are matched against the q-powers
/// `q^a` with `|a| <= amax`, and the fitted form is then verified symbolically
/// against every input term.
pub fn recognize_product(c: &[QScalar], bounds: &RecognizeBounds) -> Result<Vec<LinearFactor>, ScalarError> {
    let seq: Vec<QScalar> = c
        .iter()
        .enumerate()
        .map(|(i, ci)| ci * &QScalar::from_int(i as i64 + 1))
        .collect();
    if seq.iter().all(QScalar::is_zero) {
        return Ok(Vec::new());
    }
    let mut last_err = String::new();
    for x0 in [2i64, 3, 5] {
        match recognize_at(&seq, bounds, x0) {
            Ok(f) => return Ok(f),
            Err(e) => last_err = e,
        }
    }
    Err(ScalarError::NoMatch(last_err))
}

fn recognize_at(seq: &[QScalar], bounds: &RecognizeBounds, x0: i64) -> Result<Vec<LinearFactor>, String> {
    let x0 = BigRational::from_integer(x0.into());
    let spec: Vec<BigRational> = seq
        .iter()
        .map(|s| s.eval(&x0).ok_or_else(|| "pole at specialisation point".to_string()))
        .collect::<Result<_, _>>()?;
    let conn = berlekamp_massey(&spec);
    let order = conn.len() - 1;
    if seq.len() < 2 * order + 2 {
        return Err(format!("recurrence order {order} needs more than {} terms", seq.len()));
    }
    // roots rho of X^L + c_1 X^(L-1) + ... + c_L
    let mut roots = Vec::new();
    for a in Half::range(-bounds.amax, bounds.amax) {
        let rho = pow_rational(&x0, a.twice());
        let mut acc = BigRational::zero();
        for ci in &conn {
            acc = acc * &rho + ci;
        }
        if acc.is_zero() {
            roots.push((a, rho));
        }
    }
    if roots.len() != order {
        return Err(format!("found {} q-power roots for a recurrence of order {order}", roots.len()));
    }
    // s_r = sum_k d_k rho_k^r, r = 1..L
    let mut mat: Vec<Vec<BigRational>> = (1..=order)
        .map(|r| {
            let mut row: Vec<BigRational> = roots.iter().map(|(_, rho)| pow_rational(rho, r as i64)).collect();
            row.push(spec[r - 1].clone());
            row
        })
        .collect();
    let d = solve_square(&mut mat).ok_or("singular Vandermonde system")?;
    let mut factors = Vec::new();
    for ((a, _), dk) in roots.iter().zip(d) {
        if !dk.is_integer() {
            return Err(format!("non-integral exponent {dk} at q^{a}"));
        }
        let e = -dk.to_integer();
        if e.abs() > BigInt::from(bounds.emax) || e.is_zero() {
            return Err(format!("exponent {e} at q^{a} out of range"));
        }
        factors.push(LinearFactor { a: *a, e: e.to_i32().unwrap() });
    }
    // exact verification: r c_r = -sum e_k q^(a_k r)
    for (i, s) in seq.iter().enumerate() {
        let r = i as i64 + 1;
        let mut rhs = QScalar::zero();
        for f in &factors {
            rhs = &rhs - &(&QScalar::from_int(f.e as i64) * &QScalar::x_pow(f.a.twice() * r));
        }
        if &rhs != s {
            return Err(format!("fitted form disagrees at r = {r}"));
        }
    }
    Ok(factors)
}

fn pow_rational(x: &BigRational, k: i64) -> BigRational {
    if k >= 0 {
        num_traits::pow(x.clone(), k as usize)
    } else {
        num_traits::pow(x.recip(), (-k) as usize)
    }
}

/// Solves an augmented square system in place; `None` if singular.
fn solve_square(m: &mut [Vec<BigRational>]) -> Option<Vec<BigRational>> {
    let n = m.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col].clone();
        for k in col..=n {
            m[col][k] = &m[col][k] / &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for k in col..=n {
                    let v = &m[col][k] * &f;
                    m[r][k] = &m[r][k] - &v;
                }
            }
        }
    }
    Some(m.iter().map(|row| row[n].clone()).collect())
}

/// Expands `prod (1 - q^a w)^e` into the log coefficients `c_1..c_n`.
pub fn log_coefficients(factors: &[LinearFactor], n: usize) -> Vec<QScalar> {
    (1..=n as i64)
        .map(|r| {
            let mut s = QScalar::zero();
            for f in factors {
                s = &s - &(&QScalar::from_int(f.e as i64) * &QScalar::x_pow(f.a.twice() * r));
            }
            &s / &QScalar::from_int(r)
        })
        .collect()
}

impl LinearFactor {
    pub fn new(a: Half, e: i32) -> Self {
        LinearFactor { a, e }
    }

    pub fn is_pole(&self) -> bool {
        self.e.is_negative()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bounds() -> RecognizeBounds {
        RecognizeBounds { amax: Half::from_int(4), emax: 2, n_terms: 16 }
    }

    #[test]
    fn single_factor_log_series() {
        // c_r = -q^r / r  <->  (1 - q w)
        let c: Vec<QScalar> = (1..=16).map(|r| &(-&QScalar::q_int_pow(r)) / &QScalar::from_int(r)).collect();
        assert_eq!(recognize_product(&c, &bounds()).unwrap(), vec![LinearFactor::new(Half::from_int(1), 1)]);
        // c_r = q^(2r) / r  <->  (1 - q^2 w)^-1
        let c: Vec<QScalar> = (1..=16).map(|r| &QScalar::q_int_pow(2 * r) / &QScalar::from_int(r)).collect();
        assert_eq!(recognize_product(&c, &bounds()).unwrap(), vec![LinearFactor::new(Half::from_int(2), -1)]);
    }

    #[test]
    fn rejects_non_q_power_roots() {
        let c: Vec<QScalar> = (1..=16).map(|r| &QScalar::from_int(3i64.pow(r as u32 % 5)) / &QScalar::from_int(r)).collect();
        assert!(recognize_product(&c, &bounds()).is_err());
    }

    #[test]
    fn berlekamp_massey_over_qscalar_agrees() {
        // s_r = q^r + q^(-r/2): connection polynomial (1 - q X)(1 - q^(-1/2) X)
        let seq: Vec<QScalar> = (1..=8).map(|r| &QScalar::x_pow(2 * r) + &QScalar::x_pow(-r)).collect();
        let conn = berlekamp_massey(&seq);
        assert_eq!(conn.len(), 3);
        let qa = QScalar::x_pow(2);
        let qb = QScalar::x_pow(-1);
        assert_eq!(conn[1], -(&qa + &qb));
        assert_eq!(conn[2], &qa * &qb);
    }

    #[test]
    fn shift_and_swap() {
        // (z1 - q z2)^-1 under z1 -> q z1 becomes q^-1 (z1 - z2)^-1
        let p = FactoredPrefactor::linear(Half::ZERO, Half::from_int(1), -1);
        let s = p.shift_first(Half::from_int(1)).unwrap();
        assert_eq!(s.factors(), &[LinearFactor::new(Half::ZERO, -1)]);
        assert_eq!(s.constant, QScalar::q_int_pow(-1));
        // (z2 - q z1) = -q (z1 - q^-1 z2)
        let w = FactoredPrefactor::linear(Half::ZERO, Half::from_int(1), 1).swapped();
        assert_eq!(w.factors(), &[LinearFactor::new(Half::from_int(-1), 1)]);
        assert_eq!(w.constant, -QScalar::q_int_pow(1));
    }

    #[test]
    fn w_series_inverts() {
        let p = FactoredPrefactor::new(
            QScalar::one(),
            Rat::zero(),
            Rat::zero(),
            &[LinearFactor::new(Half::from_twice(3), 1), LinearFactor::new(Half::from_int(-1), -2)],
        );
        let s = p.w_series(6);
        let t = p.inv().w_series(6);
        let prod = mul_series(&s, &t, 6);
        assert!(prod[0].is_one());
        assert!(prod[1..].iter().all(QScalar::is_zero));
    }

    fn arb_factors() -> impl Strategy<Value = Vec<LinearFactor>> {
        proptest::collection::btree_map(-8i64..=8, prop_oneof![Just(-1i32), Just(1i32)], 0..=4)
            .prop_map(|m| m.into_iter().map(|(a, e)| LinearFactor::new(Half::from_twice(a), e)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn recognition_inverts_expansion(factors in arb_factors()) {
            let c = log_coefficients(&factors, 16);
            let got = recognize_product(&c, &bounds()).unwrap();
            prop_assert_eq!(got, factors);
        }
    }
}
