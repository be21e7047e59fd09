//! Truncated evaluation of vertex operators on K(1) ⊗ C{Q}, used as an
//! independent check on the symbolic composition engine.
//!
//! An annihilation exponential `exp(Σ h_k(r) a_k(r) z^-r)` acts on the
//! symmetric algebra as the translation
//! `a_l(-r) -> a_l(-r) + z^-r Σ_k h_k(r) [a_k(r), a_l(-r)]`; a creation
//! exponential is expanded with `m E_m = Σ_r r g_r E_(m-r)`.
//!
//! Every coefficient of `A(z1) B(z2) v` has output Fock degree
//! `deg v + b + a` where b and a are the z2- and z1-powers relative to their
//! offsets, so both sides are compared on the window `b ≤ zcutoff` and output
//! degree `≤ out_degree`, where each coefficient is a finite computation.

use std::collections::{BTreeMap, HashMap};

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{bracket_matrix, FockVector, Monomial};
use crate::lattice::{group_mul, pairing, to_gen_coords, GroupWord, LatticeVector};
use crate::scalarfield::{qint, Half, QScalar, Rat};
use crate::voperator::{compose, make_fj, make_koyama, Content, EngineError, FjKind, VOTerm};

/// A basis state of the group algebra tensored with a Fock vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct State {
    pub group: GroupWord,
    pub fock: FockVector,
}

/// Coefficients keyed by the exponent of each variable and the group word.
pub type ZSeries = BTreeMap<(Vec<Rat>, GroupWord), FockVector>;

#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    /// Window on the z2-power above its offset.
    pub zcutoff: i64,
    /// Largest output Fock degree compared.
    pub out_degree: u32,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { zcutoff: 6, out_degree: 2 }
    }
}

fn add_into(out: &mut ZSeries, key: (Vec<Rat>, GroupWord), v: FockVector) {
    if v.is_zero() {
        return;
    }
    let e = out.entry(key.clone()).or_default();
    e.add_assign(&v);
    if e.is_zero() {
        out.remove(&key);
    }
}

/// Mode coefficients `content_k(q^r) / [(n+1) r]`.
fn mode_coeffs(n: usize, content: &Content, r: i64) -> Vec<QScalar> {
    let den = qint((n as i64 + 1) * r);
    content.iter().map(|l| if l.is_zero() { QScalar::zero() } else { &l.eval(r) / &den }).collect()
}

/// Homogeneous pieces E_0..E_max of a creation exponential.
fn creation_powers(n: usize, content: &Content, max: u32) -> Vec<FockVector> {
    let mut g: Vec<FockVector> = vec![FockVector::zero()];
    for r in 1..=max as i64 {
        let c = mode_coeffs(n, content, r);
        let mut v = FockVector::zero();
        for (k, ck) in c.iter().enumerate() {
            v.add_term(Monomial::from_factors(vec![(k as u16, r as u32)]), ck.clone());
        }
        g.push(v);
    }
    let mut e = vec![FockVector::vacuum()];
    for m in 1..=max as usize {
        let mut acc = FockVector::zero();
        for r in 1..=m {
            let term = g[r].mul_truncated(&e[m - r], m as u32);
            acc.add_assign(&term.scale(&QScalar::from_int(r as i64)));
        }
        e.push(acc.scale(&QScalar::from_ratio(1, m as i64)));
    }
    e
}

/// Translation data: for each variable, mode l and degree r, the shift of
/// a_l(-r) (coefficient of z_v^-r).
fn translations(n: usize, parts: &[&Content], max_r: u32) -> Vec<Vec<Vec<QScalar>>> {
    // [v][r-1][l]
    parts
        .iter()
        .map(|content| {
            (1..=max_r as i64)
                .map(|r| {
                    let h = mode_coeffs(n, content, r);
                    let b = bracket_matrix(n, r);
                    (0..n)
                        .map(|l| (0..n).map(|k| &h[k] * &b[k][l]).fold(QScalar::zero(), |a, x| &a + &x))
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Partial expansions keyed by (kept factors, z-shift per variable).
type Branches = BTreeMap<(Vec<(u16, u32)>, Vec<i64>), QScalar>;

/// Expands the annihilation translation on every monomial of a vector,
/// keeping pieces of Fock degree ≤ `keep_max`. The expansion of a monomial
/// without its coefficient depends only on its factor list, so expansions
/// are cached by prefix and monomials sharing a prefix reuse the work.
fn translate_vector(v: &FockVector, shifts: &[Vec<Vec<QScalar>>], keep_max: u32) -> BTreeMap<Vec<i64>, FockVector> {
    let nv = shifts.len();
    let mut root = Branches::new();
    root.insert((Vec::new(), vec![0; nv]), QScalar::one());
    let mut cache: HashMap<Vec<(u16, u32)>, Branches> = HashMap::new();
    cache.insert(Vec::new(), root);
    let mut out: BTreeMap<Vec<i64>, FockVector> = BTreeMap::new();
    for (m, coef) in v.terms() {
        let factors = m.factors();
        let mut known = (0..=factors.len()).rev().find(|&k| cache.contains_key(&factors[..k])).unwrap_or(0);
        while known < factors.len() {
            let next = extend_branches(&cache[&factors[..known]], factors[known], shifts, keep_max);
            known += 1;
            cache.insert(factors[..known].to_vec(), next);
        }
        for ((kept, zs), c) in &cache[factors] {
            out.entry(zs.clone()).or_default().add_term(Monomial::from_factors(kept.clone()), c * coef);
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// One step of the translation: the factor a_l(-r) is either kept or
/// replaced by its shift in one of the variables.
fn extend_branches(acc: &Branches, (l, r): (u16, u32), shifts: &[Vec<Vec<QScalar>>], keep_max: u32) -> Branches {
    let mut next = Branches::new();
    let mut push = |key: (Vec<(u16, u32)>, Vec<i64>), c: QScalar| {
        let e = next.entry(key).or_insert_with(QScalar::zero);
        *e = &*e + &c;
    };
    for ((kept, zs), c) in acc {
        let kdeg: u32 = kept.iter().map(|&(_, s)| s).sum();
        if kdeg + r <= keep_max {
            let mut k2 = kept.clone();
            k2.push((l, r));
            push((k2, zs.clone()), c.clone());
        }
        for (v, sv) in shifts.iter().enumerate() {
            let s = &sv[r as usize - 1][l as usize];
            if s.is_zero() {
                continue;
            }
            let mut z2 = zs.clone();
            z2[v] -= r as i64;
            push((kept.clone(), z2), c * s);
        }
    }
    next.retain(|_, c| !c.is_zero());
    next
}

/// Applies a (possibly multi-variable) operator to a state. `creation_max[v]`
/// bounds the creation degree expanded in variable v; outputs of Fock degree
/// above `out_degree` are dropped.
pub fn fock_apply(
    term: &VOTerm,
    state: &State,
    creation_max: &[u32],
    out_degree: u32,
) -> Result<ZSeries, EngineError> {
    let n = term.n();
    let shape = &term.shape;
    let beta: LatticeVector = state.group.to_lattice();
    // diagonal operators act on the incoming weight
    let kp = pairing(&shape.kweight, &beta);
    if !kp.is_integer() {
        return Err(EngineError::NonIntegralWeightExponent(kp));
    }
    let mut scalar = &term.scalar * &QScalar::x_pow(kp.to_integer());
    if shape.sign_op != 0 {
        let sp = pairing(&LatticeVector::lambda(n, n), &beta) * Rat::from_integer(shape.sign_op);
        if !sp.is_integer() {
            return Err(EngineError::NonIntegralSignExponent(sp));
        }
        if sp.to_integer().rem_euclid(2) == 1 {
            scalar = -scalar;
        }
    }
    let offsets: Vec<Rat> = shape.parts.iter().map(|p| pairing(&p.zpartial, &beta) + p.zexp).collect();
    let (sign, group) = group_mul(&shape.group, &state.group);
    if sign < 0 {
        scalar = -scalar;
    }
    let max_r = state.fock.max_degree().max(1);
    let ann: Vec<&Content> = shape.parts.iter().map(|p| &p.annihilation).collect();
    let shifts = translations(n, &ann, max_r);
    let annihilated = translate_vector(&state.fock, &shifts, out_degree);
    let powers: Vec<Vec<FockVector>> = shape
        .parts
        .iter()
        .zip(creation_max)
        .map(|(p, &mx)| creation_powers(n, &p.creation, mx))
        .collect();
    let mut out = ZSeries::new();
    for (zs, v) in annihilated {
        if v.is_zero() {
            continue;
        }
        // multiply in creation pieces variable by variable
        let mut partial: Vec<(Vec<i64>, FockVector)> = vec![(zs, v)];
        for (var, pw) in powers.iter().enumerate() {
            let mut next = Vec::new();
            for (zk, fv) in &partial {
                for (m, em) in pw.iter().enumerate() {
                    if em.is_zero() {
                        continue;
                    }
                    let prod = fv.mul_truncated(em, out_degree);
                    if prod.is_zero() {
                        continue;
                    }
                    let mut z2 = zk.clone();
                    z2[var] += m as i64;
                    next.push((z2, prod));
                }
            }
            partial = next;
        }
        for (zk, fv) in partial {
            let key: Vec<Rat> = zk.iter().zip(&offsets).map(|(&a, &o)| o + Rat::from_integer(a)).collect();
            add_into(&mut out, (key, group.clone()), fv.scale(&scalar));
        }
    }
    Ok(out)
}

/// `A(z1) (B(z2) v)` on the comparison window.
pub fn sequential_apply(a: &VOTerm, b: &VOTerm, state: &State, cfg: &OracleConfig) -> Result<ZSeries, EngineError> {
    let dv = state.fock.max_degree();
    let b_cre = cfg.zcutoff as u32 + dv;
    let sb = fock_apply(b, state, &[b_cre], dv + cfg.zcutoff as u32)?;
    let b_off = b_offset(b, state);
    let mut out = ZSeries::new();
    for ((zb, g), fv) in sb {
        if zb[0] - b_off > Rat::from_integer(cfg.zcutoff) {
            continue;
        }
        let inner = State { group: g, fock: fv };
        for ((za, g2), f2) in fock_apply(a, &inner, &[cfg.out_degree], cfg.out_degree)? {
            add_into(&mut out, (vec![za[0], zb[0]], g2), f2);
        }
    }
    Ok(out)
}

fn b_offset(b: &VOTerm, state: &State) -> Rat {
    let p = b.part();
    pairing(&p.zpartial, &state.group.to_lattice()) + p.zexp
}

/// `F(z1, z2) :A(z1) B(z2): v` on the comparison window, with F expanded in
/// nonnegative powers of z2/z1.
pub fn symbolic_apply(a: &VOTerm, b: &VOTerm, state: &State, cfg: &OracleConfig) -> Result<ZSeries, EngineError> {
    let comp = compose(a, b)?;
    let f = comp.prefactor();
    let dv = state.fock.max_degree();
    let margin = f.z2exp.abs().ceil().to_integer() as u32;
    let order = cfg.zcutoff as u32 + dv + margin;
    let nv = fock_apply(&comp.nord, state, &[cfg.out_degree, order], cfg.out_degree)?;
    let series = f.w_series(order as usize);
    let z1base = f.z1exp + Rat::from_integer(f.factor_degree());
    let b_off = b_offset(b, state);
    let limit = b_off + Rat::from_integer(cfg.zcutoff);
    let mut out = ZSeries::new();
    for ((zk, g), fv) in nv {
        for (m, fm) in series.iter().enumerate() {
            if fm.is_zero() {
                continue;
            }
            let z2 = zk[1] + f.z2exp + Rat::from_integer(m as i64);
            if z2 > limit {
                break;
            }
            let z1 = zk[0] + z1base - Rat::from_integer(m as i64);
            add_into(&mut out, (vec![z1, z2], g.clone()), fv.scale(&(&f.constant * fm)));
        }
    }
    Ok(out)
}

impl State {
    pub fn vacuum(n: usize) -> Self {
        State { group: GroupWord::identity(n), fock: FockVector::vacuum() }
    }

    pub fn is_vacuum(&self) -> bool {
        self.group.is_identity() && self.fock == FockVector::vacuum()
    }

    pub fn scalar_one() -> QScalar {
        QScalar::one()
    }

    /// A random state with root-lattice group part `Σ c_j α_j`, `c_j ∈ {-1, 0, 1}`,
    /// and a Fock vector of degree ≤ `degree` with up to four monomials.
    pub fn random<R: Rng>(rng: &mut R, n: usize, degree: u32) -> Self {
        let mut beta = LatticeVector::zero(n);
        for j in 1..=n {
            let c = rng.gen_range(-1i64..=1);
            beta = &beta + &LatticeVector::alpha(n, j).scale(c);
        }
        State { group: to_gen_coords(&beta), fock: FockVector::random(rng, n, degree, 4) }
    }
}

/// One ordered pair compared on a set of states.
#[derive(Clone, Debug, Serialize)]
pub struct OracleCheck {
    pub a: String,
    pub b: String,
    pub states: usize,
    /// Number of (z-exponent, group word) coefficients compared.
    pub coefficients: usize,
    pub pass: bool,
}

/// The operators x_j^±, ψ_j, φ_j and Y_i at rank n, with display names.
pub fn oracle_operators(n: usize) -> Vec<(String, VOTerm, bool)> {
    let mut out = Vec::new();
    for (kind, name) in [(FjKind::XPlus, "x+"), (FjKind::XMinus, "x-"), (FjKind::Psi, "psi"), (FjKind::Phi, "phi")] {
        for j in 1..=n {
            out.push((format!("{name}[{j}]"), make_fj(n, kind, j, Half::ZERO), false));
        }
    }
    for i in 1..=n {
        out.push((format!("Y[{i}]"), make_koyama(n, i, Half::ZERO), true));
    }
    out
}

/// Compares `symbolic_apply` with `sequential_apply` for every ordered pair
/// of [`oracle_operators`] except two Koyama operators, on `states` seeded
/// random states of Fock degree ≤ `state_degree`.
pub fn oracle_sweep(n: usize, states: usize, state_degree: u32, cfg: &OracleConfig, seed: u64) -> Result<Vec<OracleCheck>, EngineError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample: Vec<State> = (0..states).map(|_| State::random(&mut rng, n, state_degree)).collect();
    let ops = oracle_operators(n);
    let pairs: Vec<(usize, usize)> =
        (0..ops.len()).flat_map(|a| (0..ops.len()).map(move |b| (a, b))).filter(|&(a, b)| !(ops[a].2 && ops[b].2)).collect();
    pairs
        .par_iter()
        .map(|&(a, b)| {
            let (an, at, _) = &ops[a];
            let (bn, bt, _) = &ops[b];
            let mut coefficients = 0;
            let mut pass = true;
            for st in &sample {
                let s1 = sequential_apply(at, bt, st, cfg)?;
                let s2 = symbolic_apply(at, bt, st, cfg)?;
                coefficients += s1.len().max(s2.len());
                pass &= s1 == s2;
            }
            Ok(OracleCheck { a: an.clone(), b: bn.clone(), states: sample.len(), coefficients, pass })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn annihilation_exponential_fixes_vacuum() {
        let psi = make_fj(2, FjKind::Psi, 1, Half::ZERO);
        let out = fock_apply(&psi, &State::vacuum(2), &[4], 4).unwrap();
        assert_eq!(out.len(), 1);
        let ((z, _), v) = out.into_iter().next().unwrap();
        assert_eq!(z, vec![Rat::zero()]);
        assert_eq!(v, FockVector::vacuum());
    }

    #[test]
    fn x_minus_on_vacuum_first_order() {
        let xm = make_fj(1, FjKind::XMinus, 1, Half::ZERO);
        let out = fock_apply(&xm, &State::vacuum(1), &[1], 1).unwrap();
        let key1 = (vec![Rat::from_integer(1)], crate::lattice::to_gen_coords(&-LatticeVector::alpha(1, 1)));
        let v = &out[&key1];
        // coefficient of a_1(-1) z: -q^(1/2)/[1]
        let m = Monomial::from_factors(vec![(0, 1)]);
        assert_eq!(v.coefficient(&m), -QScalar::x_pow(1));
    }

    #[test]
    fn oracle_matches_on_small_pair() {
        let n = 1;
        let a = make_fj(n, FjKind::XMinus, 1, Half::ZERO);
        let b = make_koyama(n, 1, Half::ZERO);
        let st = State { group: GroupWord::identity(n), fock: FockVector::monomial(Monomial::from_factors(vec![(0, 1)]), QScalar::one()) };
        let cfg = OracleConfig { zcutoff: 3, out_degree: 2 };
        let s1 = sequential_apply(&a, &b, &st, &cfg).unwrap();
        let s2 = symbolic_apply(&a, &b, &st, &cfg).unwrap();
        assert!(!s1.is_empty());
        assert_eq!(s1, s2);
    }
}
