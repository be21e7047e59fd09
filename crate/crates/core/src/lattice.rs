//! Root and weight lattices of sl_{n+1} and the twisted group algebra C{P}.
//!
//! Weights are stored in the fundamental-weight basis λ_1..λ_n. The group
//! algebra uses the generator basis e^(α_2), .., e^(α_n), e^(λ_n); its
//! multiplication sign comes from reordering a concatenated word into the
//! canonical generator order.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::Zero;

use serde::{Deserialize, Serialize};

use crate::scalarfield::Rat;

/// A weight in λ-coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector {
    coords: Vec<i64>,
}

impl LatticeVector {
    pub fn zero(n: usize) -> Self {
        LatticeVector { coords: vec![0; n] }
    }

    pub fn from_coords(coords: Vec<i64>) -> Self {
        LatticeVector { coords }
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// Fundamental weight λ_i (1-based); λ_0 = 0.
    pub fn lambda(n: usize, i: usize) -> Self {
        let mut v = Self::zero(n);
        if i >= 1 {
            v.coords[i - 1] = 1;
        }
        v
    }

    /// Simple root α_j (1-based): the j-th column of the Cartan matrix.
    pub fn alpha(n: usize, j: usize) -> Self {
        LatticeVector { coords: (1..=n).map(|i| cartan_entry(i, j)).collect() }
    }

    pub fn scale(&self, k: i64) -> Self {
        LatticeVector { coords: self.coords.iter().map(|c| c * k).collect() }
    }

    /// Coordinates in the simple-root basis, if the weight lies in the root
    /// lattice.
    pub fn root_coords(&self) -> Option<Vec<i64>> {
        let n = self.rank();
        // c_j = sum_i (A^-1)_{ji} coords_i; entries of A^-1 are k/(n+1)
        (1..=n)
            .map(|j| {
                let s: Rat = (1..=n).map(|i| inverse_cartan(n, j, i) * Rat::from_integer(self.coords[i - 1])).sum();
                s.is_integer().then(|| s.to_integer())
            })
            .collect()
    }

    /// Human-readable label such as `λ1-α1-α2` relative to a base weight.
    pub fn label_relative(&self, base: &LatticeVector, base_name: &str) -> String {
        let diff = base - self;
        match diff.root_coords() {
            Some(c) => {
                let mut s = base_name.to_string();
                for (j, k) in c.iter().enumerate() {
                    let name = format!("α{}", j + 1);
                    match *k {
                        0 => {}
                        1 => s.push_str(&format!("-{name}")),
                        -1 => s.push_str(&format!("+{name}")),
                        k if k > 0 => s.push_str(&format!("-{k}{name}")),
                        k => s.push_str(&format!("+{}{name}", -k)),
                    }
                }
                s
            }
            None => self.to_string(),
        }
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Add<&LatticeVector> for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, o: &LatticeVector) -> LatticeVector {
        debug_assert_eq!(self.rank(), o.rank());
        LatticeVector { coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect() }
    }
}

impl Sub<&LatticeVector> for &LatticeVector {
    type Output = LatticeVector;
    fn sub(self, o: &LatticeVector) -> LatticeVector {
        debug_assert_eq!(self.rank(), o.rank());
        LatticeVector { coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        self.scale(-1)
    }
}

impl Add for LatticeVector {
    type Output = LatticeVector;
    fn add(self, o: LatticeVector) -> LatticeVector {
        &self + &o
    }
}

impl Sub for LatticeVector {
    type Output = LatticeVector;
    fn sub(self, o: LatticeVector) -> LatticeVector {
        &self - &o
    }
}

impl Neg for LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        self.scale(-1)
    }
}

/// Cartan matrix entry a_ij of A_n (1-based).
pub fn cartan_entry(i: usize, j: usize) -> i64 {
    match i.abs_diff(j) {
        0 => 2,
        1 => -1,
        _ => 0,
    }
}

/// (λ_i, λ_j) = (A^-1)_ij = min(i,j)(n+1-max(i,j))/(n+1).
pub fn inverse_cartan(n: usize, i: usize, j: usize) -> Rat {
    let (lo, hi) = (i.min(j) as i64, i.max(j) as i64);
    Rat::new(lo * (n as i64 + 1 - hi), n as i64 + 1)
}

/// The symmetric bilinear form on P.
pub fn pairing(mu: &LatticeVector, nu: &LatticeVector) -> Rat {
    let n = mu.rank();
    debug_assert_eq!(n, nu.rank());
    let mut s = Rat::zero();
    for (i, &a) in mu.coords.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in nu.coords.iter().enumerate() {
            if b != 0 {
                s += inverse_cartan(n, i + 1, j + 1) * Rat::from_integer(a * b);
            }
        }
    }
    s
}

/// A basis element of C{P} in generator coordinates (m_2, .., m_n, m_{n+1})
/// for the ordered product (e^(α_2))^(m_2) ... (e^(α_n))^(m_n) (e^(λ_n))^(m_{n+1}).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupWord {
    gen_coords: Vec<i64>,
}

impl fmt::Debug for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.gen_coords.len();
        let mut parts = Vec::new();
        for (k, &m) in self.gen_coords.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let g = if k + 1 == n { format!("λ{n}") } else { format!("α{}", k + 2) };
            parts.push(if m == 1 { format!("e^{g}") } else { format!("(e^{g})^{m}") });
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

impl GroupWord {
    pub fn identity(n: usize) -> Self {
        GroupWord { gen_coords: vec![0; n] }
    }

    pub fn from_gen_coords(gen_coords: Vec<i64>) -> Self {
        GroupWord { gen_coords }
    }

    pub fn gen_coords(&self) -> &[i64] {
        &self.gen_coords
    }

    pub fn is_identity(&self) -> bool {
        self.gen_coords.iter().all(|&m| m == 0)
    }

    /// The weight μ = Σ m_k α_k + m_{n+1} λ_n.
    pub fn to_lattice(&self) -> LatticeVector {
        let n = self.gen_coords.len();
        let mut v = LatticeVector::zero(n);
        for (k, &m) in self.gen_coords.iter().enumerate() {
            if m != 0 {
                v = &v + &generator(n, k).scale(m);
            }
        }
        v
    }
}

/// The k-th generator (0-based) of C{P} as a weight.
fn generator(n: usize, k: usize) -> LatticeVector {
    if k + 1 == n {
        LatticeVector::lambda(n, n)
    } else {
        LatticeVector::alpha(n, k + 2)
    }
}

/// Parity of the exchange e^(g_a) e^(g_b) = (-1)^c e^(g_b) e^(g_a) for distinct
/// generators; a letter commutes with itself.
fn exchange_parity(n: usize, a: usize, b: usize) -> i64 {
    if a == b {
        return 0;
    }
    let (lo, hi) = (a.min(b), a.max(b));
    if hi + 1 == n {
        // α_(lo+2) against λ_n
        i64::from(lo + 2 == n)
    } else {
        cartan_entry(lo + 2, hi + 2).rem_euclid(2)
    }
}

/// Product of two canonical words: returns the reordering sign and the
/// canonical word of the concatenation.
pub fn group_mul(u: &GroupWord, v: &GroupWord) -> (i8, GroupWord) {
    let n = u.gen_coords.len();
    debug_assert_eq!(n, v.gen_coords.len());
    // Moving each letter of v leftwards past the letters of u with a larger
    // generator index produces one exchange per pair of letters.
    let mut parity = 0i64;
    for (b, &mb) in u.gen_coords.iter().enumerate() {
        if mb == 0 {
            continue;
        }
        for (a, &ma) in v.gen_coords.iter().enumerate().take(b) {
            parity += mb * ma * exchange_parity(n, a, b);
        }
    }
    let w = GroupWord { gen_coords: u.gen_coords.iter().zip(&v.gen_coords).map(|(a, b)| a + b).collect() };
    (if parity.rem_euclid(2) == 0 { 1 } else { -1 }, w)
}

/// Sign relating e^μ e^ν to e^ν e^μ.
pub fn commutation_sign(u: &GroupWord, v: &GroupWord) -> i8 {
    let (s1, _) = group_mul(u, v);
    let (s2, _) = group_mul(v, u);
    s1 * s2
}

/// Generator-basis coordinates of a weight.
pub fn to_gen_coords(mu: &LatticeVector) -> GroupWord {
    let n = mu.rank();
    if n == 1 {
        return GroupWord { gen_coords: mu.coords.clone() };
    }
    // Solve Σ_j m_j α_j + m λ_n = μ row by row, with m_1 = 0:
    // row 1 gives m_2, row k (2 <= k < n) gives m_(k+1), row n gives m.
    let mut m = vec![0i64; n + 1];
    m[2] = -mu.coords[0];
    for k in 2..n {
        m[k + 1] = -m[k - 1] + 2 * m[k] - mu.coords[k - 1];
    }
    let m_lambda = mu.coords[n - 1] + m[n - 1] - 2 * m[n];
    let mut gen_coords: Vec<i64> = m[2..=n].to_vec();
    gen_coords.push(m_lambda);
    let w = GroupWord { gen_coords };
    debug_assert_eq!(&w.to_lattice(), mu);
    w
}

/// Determinant of the generator basis in λ-coordinates (must be ±1).
pub fn generator_determinant(n: usize) -> Rat {
    let mut mat: Vec<Vec<Rat>> = (0..n)
        .map(|row| (0..n).map(|k| Rat::from_integer(generator(n, k).coords[row])).collect())
        .collect();
    let mut det = Rat::from_integer(1);
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !mat[r][col].is_zero()) else {
            return Rat::zero();
        };
        if piv != col {
            mat.swap(piv, col);
            det = -det;
        }
        det *= mat[col][col];
        for r in col + 1..n {
            let f = mat[r][col] / mat[col][col];
            for c in col..n {
                let v = mat[col][c] * f;
                mat[r][c] -= v;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pairing_values() {
        for n in 1..=4 {
            for i in 1..=n {
                for j in 1..=n {
                    let ai = LatticeVector::alpha(n, i);
                    let aj = LatticeVector::alpha(n, j);
                    assert_eq!(pairing(&ai, &aj), Rat::from_integer(cartan_entry(i, j)));
                    let li = LatticeVector::lambda(n, i);
                    assert_eq!(pairing(&li, &aj), Rat::from_integer(i64::from(i == j)));
                    assert_eq!(pairing(&li, &aj), pairing(&aj, &li));
                }
            }
        }
        assert_eq!(pairing(&LatticeVector::lambda(1, 1), &LatticeVector::lambda(1, 1)), Rat::new(1, 2));
        assert_eq!(pairing(&LatticeVector::lambda(2, 1), &LatticeVector::lambda(2, 1)), Rat::new(2, 3));
        assert_eq!(pairing(&LatticeVector::lambda(2, 1), &LatticeVector::lambda(2, 2)), Rat::new(1, 3));
    }

    #[test]
    fn generator_basis_is_unimodular() {
        for n in 1..=6 {
            assert_eq!(generator_determinant(n).abs(), Rat::from_integer(1));
        }
    }

    #[test]
    fn gen_coords_examples() {
        assert_eq!(to_gen_coords(&LatticeVector::alpha(1, 1)).gen_coords(), &[2]);
        assert_eq!(to_gen_coords(&LatticeVector::lambda(2, 1)).gen_coords(), &[-1, 2]);
        assert!(to_gen_coords(&LatticeVector::zero(3)).is_identity());
    }

    #[test]
    fn gen_coords_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = rng.gen_range(1..=5);
            let v = LatticeVector::from_coords((0..n).map(|_| rng.gen_range(-5..=5)).collect());
            assert_eq!(to_gen_coords(&v).to_lattice(), v);
        }
    }

    #[test]
    fn exchange_relations() {
        for n in 2..=4 {
            for i in 1..=n {
                let ei = to_gen_coords(&LatticeVector::alpha(n, i));
                for j in 1..=n {
                    let ej = to_gen_coords(&LatticeVector::alpha(n, j));
                    let expect = if cartan_entry(i, j) % 2 == 0 { 1 } else { -1 };
                    assert_eq!(commutation_sign(&ei, &ej), expect, "n={n} i={i} j={j}");
                }
                let ln = to_gen_coords(&LatticeVector::lambda(n, n));
                // α_1 is not a generator; through its generator expansion it
                // picks up the parity of its α_n-coefficient, which is -n.
                let expect = match i {
                    1 if n % 2 == 1 => -1,
                    _ if i == n => -1,
                    _ => 1,
                };
                assert_eq!(commutation_sign(&ei, &ln), expect, "n={n} i={i} {ei}");
            }
        }
        let id = GroupWord::identity(3);
        let w = to_gen_coords(&LatticeVector::lambda(3, 2));
        assert_eq!(group_mul(&id, &w), (1, w.clone()));
    }

    #[test]
    fn group_mul_associative() {
        for n in 1..=3 {
            let gens: Vec<GroupWord> = (0..n)
                .flat_map(|k| {
                    let mut a = vec![0; n];
                    a[k] = 1;
                    let mut b = vec![0; n];
                    b[k] = -1;
                    [GroupWord::from_gen_coords(a), GroupWord::from_gen_coords(b)]
                })
                .collect();
            for a in &gens {
                for b in &gens {
                    for c in &gens {
                        let (s1, ab) = group_mul(a, b);
                        let (s2, l) = group_mul(&ab, c);
                        let (s3, bc) = group_mul(b, c);
                        let (s4, r) = group_mul(a, &bc);
                        assert_eq!((s1 * s2, l), (s3 * s4, r));
                    }
                }
            }
        }
    }
}
