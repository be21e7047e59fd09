//! The fundamental modules L(λ_i) of U_q(sl_(n+1)), realized on the i-th
//! exterior power of the vector representation: basis e_S for i-subsets S of
//! {1..n+1}, with e_j moving j+1 to j and f_j moving j to j+1.

use serde::Serialize;

use super::matrix::Matrix;
use super::RepError;
use crate::lattice::{cartan_entry, LatticeVector};
use crate::scalarfield::{qbinom, QScalar};

#[derive(Clone, Debug)]
pub struct FDModule {
    pub n: usize,
    pub i: usize,
    /// Sorted i-subsets; index 0 is {1..i}, the highest weight vector.
    pub subsets: Vec<Vec<usize>>,
    pub weights: Vec<LatticeVector>,
    pub e: Vec<Matrix>,
    pub f: Vec<Matrix>,
    pub k: Vec<Matrix>,
    pub kinv: Vec<Matrix>,
}

/// One named matrix identity and whether it held.
#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub name: String,
    pub pass: bool,
}

fn subsets(m: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for s in start..=m {
            cur.push(s);
            rec(s + 1, m, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, m, size, &mut Vec::new(), &mut out);
    out
}

/// Weight of e_S in fundamental-weight coordinates.
fn subset_weight(n: usize, s: &[usize]) -> LatticeVector {
    let coords = (1..=n).map(|j| s.contains(&j) as i64 - s.contains(&(j + 1)) as i64).collect();
    LatticeVector::from_coords(coords)
}

/// Builds L(λ_i) for 1 ≤ i ≤ n.
pub fn fd_module(n: usize, i: usize) -> Result<FDModule, RepError> {
    if n == 0 || i == 0 || i > n {
        return Err(RepError::IndexOutOfRange { index: i, n });
    }
    let subsets = subsets(n + 1, i);
    let dim = subsets.len();
    let index = |s: &Vec<usize>| subsets.iter().position(|t| t == s).expect("subset present");
    let weights: Vec<LatticeVector> = subsets.iter().map(|s| subset_weight(n, s)).collect();
    let mut e = Vec::with_capacity(n);
    let mut f = Vec::with_capacity(n);
    let mut k = Vec::with_capacity(n);
    let mut kinv = Vec::with_capacity(n);
    for j in 1..=n {
        let mut ej = Matrix::zero(dim);
        let mut fj = Matrix::zero(dim);
        for (c, s) in subsets.iter().enumerate() {
            if s.contains(&(j + 1)) && !s.contains(&j) {
                let mut t: Vec<usize> = s.iter().map(|&x| if x == j + 1 { j } else { x }).collect();
                t.sort_unstable();
                ej.set(index(&t), c, QScalar::one());
            }
            if s.contains(&j) && !s.contains(&(j + 1)) {
                let mut t: Vec<usize> = s.iter().map(|&x| if x == j { j + 1 } else { x }).collect();
                t.sort_unstable();
                fj.set(index(&t), c, QScalar::one());
            }
        }
        let kd: Vec<QScalar> = weights.iter().map(|w| QScalar::q_int_pow(w.coords()[j - 1])).collect();
        let kj = Matrix::diagonal(kd);
        kinv.push(kj.diagonal_inverse());
        k.push(kj);
        e.push(ej);
        f.push(fj);
    }
    Ok(FDModule { n, i, subsets, weights, e, f, k, kinv })
}

impl FDModule {
    pub fn dim(&self) -> usize {
        self.subsets.len()
    }

    pub fn highest(&self) -> Vec<QScalar> {
        let mut v = vec![QScalar::zero(); self.dim()];
        v[0] = QScalar::one();
        v
    }

    /// Position of the basis vector with the given weight.
    pub fn index_of_weight(&self, w: &LatticeVector) -> Option<usize> {
        self.weights.iter().position(|x| x == w)
    }

    /// `f_(seq_k) ... f_(seq_1) v_λ`, applying `seq` from first to last.
    pub fn fpath_vector(&self, seq: &[usize]) -> Vec<QScalar> {
        let mut v = self.highest();
        for &j in seq {
            v = self.f[j - 1].apply(&v);
        }
        v
    }

    /// Checks the defining relations of U_q(sl_(n+1)) as matrix identities.
    pub fn check_relations(&self) -> Vec<RelationCheck> {
        let n = self.n;
        let d = self.dim();
        let id = Matrix::identity(d);
        let qq = &QScalar::q_int_pow(1) - &QScalar::q_int_pow(-1);
        let mut out = Vec::new();
        let mut push = |name: String, pass: bool| out.push(RelationCheck { name, pass });
        for a in 0..n {
            push(format!("K{0} K{0}^-1 = 1", a + 1), self.k[a].mul(&self.kinv[a]) == id && self.kinv[a].mul(&self.k[a]) == id);
            for b in 0..n {
                let (ia, jb) = (a + 1, b + 1);
                push(format!("K{ia} K{jb} = K{jb} K{ia}"), self.k[a].commutator(&self.k[b]).is_zero());
                let c = QScalar::q_int_pow(cartan_entry(ia, jb));
                let conj_e = self.k[a].mul(&self.e[b]).mul(&self.kinv[a]);
                push(format!("K{ia} e{jb} K{ia}^-1 = q^(a{ia}{jb}) e{jb}"), conj_e == self.e[b].scale(&c));
                let conj_f = self.k[a].mul(&self.f[b]).mul(&self.kinv[a]);
                push(format!("K{ia} f{jb} K{ia}^-1 = q^(-a{ia}{jb}) f{jb}"), conj_f == self.f[b].scale(&c.inv()));
                let lhs = self.e[a].commutator(&self.f[b]);
                let rhs = if a == b { self.k[a].sub(&self.kinv[a]).scale(&qq.inv()) } else { Matrix::zero(d) };
                push(format!("[e{ia}, f{jb}]"), lhs == rhs);
                if a != b {
                    let m = (1 - cartan_entry(ia, jb)) as u32;
                    for (gens, name) in [(&self.e, "e"), (&self.f, "f")] {
                        let mut total = Matrix::zero(d);
                        for s in 0..=m {
                            let coef = qbinom(m as i64, s as i64).expect("valid q-binomial");
                            let coef = if s % 2 == 1 { -coef } else { coef };
                            let term = gens[a].pow(m - s).mul(&gens[b]).mul(&gens[a].pow(s));
                            total = total.add(&term.scale(&coef));
                        }
                        push(format!("Serre {name}{ia} {name}{jb}"), total.is_zero());
                    }
                }
            }
        }
        out
    }
}

/// Nonvanishing of `f_(seq_k) ... f_(seq_1) v_(λ_i)` by the pairing recursion:
/// each step needs `(μ, -α_j) = -1` for the current weight μ.
pub fn fpath_by_pairing(n: usize, i: usize, seq: &[usize]) -> bool {
    let mut mu = LatticeVector::lambda(n, i);
    for &j in seq {
        if mu.coords()[j - 1] != 1 {
            return false;
        }
        mu = &mu - &LatticeVector::alpha(n, j);
    }
    true
}

/// Nonvanishing of `e_j f_(seq) v_(λ_i)` by the pairing recursion.
pub fn epath_by_pairing(n: usize, i: usize, seq: &[usize], j: usize) -> bool {
    if !fpath_by_pairing(n, i, seq) {
        return false;
    }
    let mut mu = LatticeVector::lambda(n, i);
    for &s in seq {
        mu = &mu - &LatticeVector::alpha(n, s);
    }
    mu.coords()[j - 1] == -1
}

/// `f_(seq) v_(λ_i) ≠ 0`, computed by both the pairing recursion and the
/// matrices; disagreement is an error.
pub fn nonzero_fpath(module: &FDModule, seq: &[usize]) -> Result<bool, RepError> {
    if let Some(&j) = seq.iter().find(|&&j| j == 0 || j > module.n) {
        return Err(RepError::IndexOutOfRange { index: j, n: module.n });
    }
    let by_pairing = fpath_by_pairing(module.n, module.i, seq);
    let by_matrix = module.fpath_vector(seq).iter().any(|x| !x.is_zero());
    if by_pairing != by_matrix {
        return Err(RepError::OracleMismatch(format!("f-path {seq:?}: pairing {by_pairing}, matrices {by_matrix}")));
    }
    Ok(by_pairing)
}

/// `e_j f_(seq) v_(λ_i) ≠ 0` by both routes.
pub fn nonzero_epath(module: &FDModule, seq: &[usize], j: usize) -> Result<bool, RepError> {
    let by_pairing = epath_by_pairing(module.n, module.i, seq, j);
    let v = module.e[j - 1].apply(&module.fpath_vector(seq));
    let by_matrix = v.iter().any(|x| !x.is_zero());
    if by_pairing != by_matrix {
        return Err(RepError::OracleMismatch(format!("e{j} after f-path {seq:?}: pairing {by_pairing}, matrices {by_matrix}")));
    }
    Ok(by_pairing)
}

/// All index sequences of length ≤ `max_len` over 1..=n.
pub fn all_sequences(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &layer {
            for j in 1..=n {
                let mut t = s.clone();
                t.push(j);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_and_relations() {
        for n in 1..=3 {
            for i in 1..=n {
                let m = fd_module(n, i).unwrap();
                let binom = (1..=i).fold(1usize, |acc, k| acc * (n + 2 - k) / k);
                assert_eq!(m.dim(), binom);
                assert_eq!(m.weights[0], LatticeVector::lambda(n, i));
                for c in m.check_relations() {
                    assert!(c.pass, "n={n} i={i}: {}", c.name);
                }
            }
        }
        assert_eq!(fd_module(1, 1).unwrap().dim(), 2);
    }

    #[test]
    fn path_examples() {
        let m = fd_module(2, 1).unwrap();
        assert!(nonzero_fpath(&m, &[1, 2]).unwrap());
        assert!(!nonzero_fpath(&m, &[1, 1]).unwrap());
        assert!(nonzero_fpath(&m, &[]).unwrap());
        for j in 1..=2 {
            assert_eq!(nonzero_fpath(&m, &[j]).unwrap(), j == 1);
        }
        assert!(nonzero_epath(&m, &[1], 1).unwrap());
        assert!(!nonzero_epath(&m, &[1], 2).unwrap());
    }

    #[test]
    fn oracles_agree_exhaustively() {
        for n in 1..=3 {
            for i in 1..=n {
                let m = fd_module(n, i).unwrap();
                for seq in all_sequences(n, 6) {
                    nonzero_fpath(&m, &seq).unwrap();
                    for j in 1..=n {
                        nonzero_epath(&m, &seq, j).unwrap();
                    }
                }
            }
        }
    }
}
