//! The algebra U_q(sl_(n+1))_z generated by ē_j = e_j w_j, f_j and
//! k̄_j = (K_j - K_j^-1) w_j with w_j = exp((M_j - M_j^-1) z_j), acting on
//! L(λ_i)[[z_1..z_n]], and the basis C_i of the submodule L(λ_i)_z.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::basis::Head;
use super::fdmodule::FDModule;
use super::matrix::{rank, Matrix};
use super::RepError;
use crate::lattice::LatticeVector;
use crate::scalarfield::{limit_q1, Half, QScalar};
use crate::voperator::FjKind;

/// A vector of L(λ_i) with coefficients in truncated power series: maps the
/// exponent vector of z_1..z_n to a module vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZSeriesVector {
    pub zorder: u32,
    pub coeffs: BTreeMap<Vec<u32>, Vec<QScalar>>,
}

impl ZSeriesVector {
    pub fn zero(zorder: u32) -> Self {
        ZSeriesVector { zorder, coeffs: BTreeMap::new() }
    }

    pub fn constant(n: usize, zorder: u32, v: Vec<QScalar>) -> Self {
        let mut s = ZSeriesVector::zero(zorder);
        s.add_at(vec![0; n], &v);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add_at(&mut self, exps: Vec<u32>, v: &[QScalar]) {
        if exps.iter().any(|&e| e > self.zorder) {
            return;
        }
        let slot = self.coeffs.entry(exps.clone()).or_insert_with(|| vec![QScalar::zero(); v.len()]);
        for (a, b) in slot.iter_mut().zip(v) {
            *a = &*a + b;
        }
        if slot.iter().all(QScalar::is_zero) {
            self.coeffs.remove(&exps);
        }
    }

    pub fn sub(&self, o: &ZSeriesVector) -> ZSeriesVector {
        let mut r = self.clone();
        for (e, v) in &o.coeffs {
            let neg: Vec<QScalar> = v.iter().map(|x| -x.clone()).collect();
            r.add_at(e.clone(), &neg);
        }
        r
    }

    pub fn scale(&self, c: &QScalar) -> ZSeriesVector {
        let mut r = ZSeriesVector::zero(self.zorder);
        for (e, v) in &self.coeffs {
            let s: Vec<QScalar> = v.iter().map(|x| x * c).collect();
            r.add_at(e.clone(), &s);
        }
        r
    }

    /// Applies a matrix to every coefficient.
    pub fn map_matrix(&self, m: &Matrix) -> ZSeriesVector {
        let mut r = ZSeriesVector::zero(self.zorder);
        for (e, v) in &self.coeffs {
            r.add_at(e.clone(), &m.apply(v));
        }
        r
    }

    /// Multiplies by the scalar series `Σ_r s_r z_j^r` (variable j, 1-based).
    pub fn mul_series(&self, j: usize, s: &[QScalar]) -> ZSeriesVector {
        let mut r = ZSeriesVector::zero(self.zorder);
        for (e, v) in &self.coeffs {
            for (k, c) in s.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mut e2 = e.clone();
                e2[j - 1] += k as u32;
                let w: Vec<QScalar> = v.iter().map(|x| x * c).collect();
                r.add_at(e2, &w);
            }
        }
        r
    }

    /// Coordinates at `q^(1/2) = x0`, listed over the given exponent keys.
    pub fn specialize(&self, keys: &[Vec<u32>], dim: usize, x0: &BigRational) -> Vec<BigRational> {
        let mut out = Vec::with_capacity(keys.len() * dim);
        for k in keys {
            match self.coeffs.get(k) {
                Some(v) => out.extend(v.iter().map(|c| c.eval(x0).expect("no pole at the specialization"))),
                None => out.extend((0..dim).map(|_| BigRational::zero())),
            }
        }
        out
    }
}

/// `e(u, z) = exp((q^u - q^-u) z)` truncated at `z^zorder`.
pub fn e_series(u: i64, zorder: u32) -> Vec<QScalar> {
    let c = &QScalar::q_int_pow(u) - &QScalar::q_int_pow(-u);
    (0..=zorder as i64).map(|r| &c.pow(r) / &qfactorial_plain(r)).collect()
}

fn qfactorial_plain(r: i64) -> QScalar {
    QScalar::from_int((1..=r).product::<i64>().max(1))
}

/// Exponent matrix of L_j: `L_j = Π_k K_k^(m_jk)`.
pub fn l_exponents(n: usize, j: usize) -> Vec<i64> {
    (1..=n)
        .map(|k| if k <= j { (k * (n + 1 - j)) as i64 } else { (j * (n + 1 - k)) as i64 })
        .collect()
}

/// Module data for U_q(sl_(n+1))_z acting on L(λ_i)[[z]].
#[derive(Clone, Debug)]
pub struct Uqz {
    pub module: FDModule,
    pub zorder: u32,
    pub l: Vec<Matrix>,
    pub m: Vec<Matrix>,
    /// q-exponent of M_j on each basis vector.
    pub m_exp: Vec<Vec<i64>>,
}

fn k_power(module: &FDModule, k: usize, e: i64) -> Matrix {
    if e >= 0 {
        module.k[k].pow(e as u32)
    } else {
        module.kinv[k].pow((-e) as u32)
    }
}

fn diagonal_q_exponent(m: &Matrix, k: usize) -> i64 {
    let terms = m.get(k, k).as_laurent().expect("Laurent entry");
    assert!(terms.len() == 1 && terms[0].1.is_one(), "diagonal entry is a power of q");
    assert!(terms[0].0 % 2 == 0, "integral power of q");
    terms[0].0 / 2
}

/// Builds L_j, M_j and the action data on L(λ_i) truncated at `zorder`.
pub fn build_uqz(module: FDModule, zorder: u32) -> Uqz {
    let n = module.n;
    let dim = module.dim();
    let l: Vec<Matrix> = (1..=n)
        .map(|j| {
            l_exponents(n, j)
                .iter()
                .enumerate()
                .fold(Matrix::identity(dim), |acc, (k, &e)| acc.mul(&k_power(&module, k, e)))
        })
        .collect();
    let base = Matrix::identity(dim).scale(&QScalar::q_int_pow(-((n as i64 + 1) * (n as i64 + 1))));
    let m: Vec<Matrix> = (1..=n)
        .map(|j| if j == 1 || j == n { base.clone() } else { base.mul(&l[j - 2]).mul(&l[j]) })
        .collect();
    let m_exp = m.iter().map(|mj| (0..dim).map(|k| diagonal_q_exponent(mj, k)).collect()).collect();
    Uqz { module, zorder, l, m, m_exp }
}

impl Uqz {
    pub fn n(&self) -> usize {
        self.module.n
    }

    /// `w_j` applied literally as `Σ_r (M_j - M_j^-1)^r / r! z_j^r`.
    pub fn apply_w(&self, j: usize, v: &ZSeriesVector) -> ZSeriesVector {
        let d = self.m[j - 1].sub(&self.m[j - 1].diagonal_inverse());
        let mut out = ZSeriesVector::zero(self.zorder);
        let mut power = Matrix::identity(self.module.dim());
        for r in 0..=self.zorder {
            let coef = qfactorial_plain(r as i64).inv();
            let term = v.map_matrix(&power.scale(&coef));
            let mut series = vec![QScalar::zero(); r as usize + 1];
            series[r as usize] = QScalar::one();
            let shifted = term.mul_series(j, &series);
            for (e, c) in &shifted.coeffs {
                out.add_at(e.clone(), c);
            }
            power = power.mul(&d);
        }
        out
    }

    pub fn apply_ebar(&self, j: usize, v: &ZSeriesVector) -> ZSeriesVector {
        self.apply_w(j, v).map_matrix(&self.module.e[j - 1])
    }

    pub fn apply_f(&self, j: usize, v: &ZSeriesVector) -> ZSeriesVector {
        v.map_matrix(&self.module.f[j - 1])
    }

    pub fn apply_kbar(&self, j: usize, v: &ZSeriesVector) -> ZSeriesVector {
        let k = self.module.k[j - 1].sub(&self.module.kinv[j - 1]);
        self.apply_w(j, v).map_matrix(&k)
    }

    /// Action of a generator: x^+ ↦ ē_j, x^- ↦ f_j, ψ ↦ k̄_j.
    pub fn apply(&self, g: Head, v: &ZSeriesVector) -> ZSeriesVector {
        match g.kind {
            FjKind::XPlus => self.apply_ebar(g.j, v),
            FjKind::XMinus => self.apply_f(g.j, v),
            FjKind::Psi => self.apply_kbar(g.j, v),
            FjKind::Phi => ZSeriesVector::zero(self.zorder),
        }
    }

    /// The vector `v_S Π e(u, z_j)` of a label.
    pub fn vector(&self, c: &CLabel) -> ZSeriesVector {
        let n = self.n();
        let mut v = vec![QScalar::zero(); self.module.dim()];
        v[c.index] = QScalar::one();
        let mut s = ZSeriesVector::constant(n, self.zorder, v);
        for ef in &c.efactors {
            s = s.mul_series(ef.j, &e_series(ef.u, self.zorder));
        }
        s
    }

    /// The same action computed on labels: every generator maps a basis
    /// label to a multiple of a basis label.
    pub fn act(&self, g: Head, c: &CLabel) -> Option<(CLabel, QScalar)> {
        let j = g.j;
        let u = self.m_exp[j - 1][c.index];
        let mut efactors = c.efactors.clone();
        let (index, scalar) = match g.kind {
            FjKind::XMinus => self.module.f[j - 1].column_single(c.index)?,
            FjKind::XPlus => {
                efactors.push(EFactor { j, u });
                self.module.e[j - 1].column_single(c.index)?
            }
            FjKind::Psi => {
                let a = self.module.weights[c.index].coords()[j - 1];
                if a == 0 {
                    return None;
                }
                efactors.push(EFactor { j, u });
                (c.index, &QScalar::q_int_pow(a) - &QScalar::q_int_pow(-a))
            }
            FjKind::Phi => return None,
        };
        efactors.sort();
        Some((CLabel { index, efactors }, scalar))
    }

    /// Checks `w_j v = v e(u, z_j)` on every basis vector.
    pub fn check_w_eigen(&self) -> Vec<(String, bool)> {
        let n = self.n();
        let mut out = Vec::new();
        for j in 1..=n {
            for k in 0..self.module.dim() {
                let c = CLabel { index: k, efactors: Vec::new() };
                let lhs = self.apply_w(j, &self.vector(&c));
                let rhs = self.vector(&CLabel { index: k, efactors: vec![EFactor { j, u: self.m_exp[j - 1][k] }] });
                out.push((format!("w{j} v{:?} = v e({}, z{j})", self.module.subsets[k], self.m_exp[j - 1][k]), lhs == rhs));
            }
        }
        out
    }

    /// `f_(j+1) M_j = q^(n+1) M_j f_(j+1)` for 2 ≤ j ≤ n-1.
    pub fn check_m_exchange(&self) -> Vec<(String, bool)> {
        let n = self.n();
        let c = QScalar::q_int_pow(n as i64 + 1);
        (2..n)
            .map(|j| {
                let lhs = self.module.f[j].mul(&self.m[j - 1]);
                let rhs = self.m[j - 1].mul(&self.module.f[j]).scale(&c);
                (format!("f{} M{j} = q^{} M{j} f{}", j + 1, n + 1, j + 1), lhs == rhs)
            })
            .collect()
    }

    /// Classical limits of the coefficient matrices of ē_j, f_j and
    /// k̄_j/(q - q^-1) against the Chevalley generators e_j, f_j, h_j.
    pub fn check_classical_limits(&self) -> Result<Vec<(String, bool)>, RepError> {
        let n = self.n();
        let dim = self.module.dim();
        let qq = (&QScalar::q_int_pow(1) - &QScalar::q_int_pow(-1)).inv();
        let mut out = Vec::new();
        for j in 1..=n {
            let chev_e = self.module.e[j - 1].clone();
            let chev_f = self.module.f[j - 1].clone();
            let chev_h = Matrix::diagonal(
                self.module.weights.iter().map(|w| QScalar::from_int(w.coords()[j - 1])).collect(),
            );
            let d = self.m[j - 1].sub(&self.m[j - 1].diagonal_inverse());
            let kdiff = self.module.k[j - 1].sub(&self.module.kinv[j - 1]).scale(&qq);
            let mut ok_e = true;
            let mut ok_h = true;
            for r in 0..=self.zorder {
                let w_r = d.pow(r).scale(&qfactorial_plain(r as i64).inv());
                let (expect_e, expect_h) =
                    if r == 0 { (chev_e.clone(), chev_h.clone()) } else { (Matrix::zero(dim), Matrix::zero(dim)) };
                ok_e &= limits_equal(&self.module.e[j - 1].mul(&w_r), &expect_e)?;
                ok_h &= limits_equal(&kdiff.mul(&w_r), &expect_h)?;
            }
            out.push((format!("lim ē{j} = e{j}"), ok_e));
            out.push((format!("lim f{j} = f{j}"), limits_equal(&self.module.f[j - 1], &chev_f)?));
            out.push((format!("lim k̄{j}/(q - q^-1) = h{j}"), ok_h));
            let h = chev_e.commutator(&chev_f);
            out.push((format!("[e{j}, f{j}] = h{j} at q = 1"), limits_equal(&h, &chev_h)?));
        }
        Ok(out)
    }
}

fn limits_equal(a: &Matrix, b: &Matrix) -> Result<bool, RepError> {
    for r in 0..a.dim() {
        for c in 0..a.dim() {
            let la = limit_q1(a.get(r, c)).map_err(|e| RepError::StructureMismatch(e.to_string()))?;
            let lb = limit_q1(b.get(r, c)).map_err(|e| RepError::StructureMismatch(e.to_string()))?;
            if la != lb {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A factor e(u, z_j).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EFactor {
    pub j: usize,
    pub u: i64,
}

/// A vector `v_S Π e(u, z_j)` of the basis C: the module basis index and the
/// factors sorted by j, then u.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CLabel {
    pub index: usize,
    pub efactors: Vec<EFactor>,
}

impl CLabel {
    /// `o(c) = (-u_1, ..., -u_s)` with the factors in canonical order.
    pub fn order_key(&self) -> Vec<i64> {
        self.canonical().iter().map(|e| -e.u).collect()
    }

    /// `t(c) = (j_1, ..., j_s)`.
    pub fn type_key(&self) -> Vec<usize> {
        self.efactors.iter().map(|e| e.j).collect()
    }

    /// Factors with `u_l ≥ u_m` for `l ≤ m` within each j.
    pub fn canonical(&self) -> Vec<EFactor> {
        let mut v = self.efactors.clone();
        v.sort_by(|a, b| a.j.cmp(&b.j).then(b.u.cmp(&a.u)));
        v
    }
}

/// Caps bounding the enumerated part of an infinite basis.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Caps {
    pub path_max: usize,
    /// Maximal number of ψ or e-factors.
    pub factors: usize,
    /// Optional bound on the number of factors per variable.
    pub per_variable: Option<usize>,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { path_max: 6, factors: 2, per_variable: None }
    }
}

impl Caps {
    pub fn admits(&self, fpath_len: usize, js: &[usize]) -> bool {
        if fpath_len > self.path_max || js.len() > self.factors {
            return false;
        }
        match self.per_variable {
            None => true,
            Some(cap) => {
                let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
                for &j in js {
                    *counts.entry(j).or_default() += 1;
                }
                counts.values().all(|&c| c <= cap)
            }
        }
    }
}

/// An element of C_i with an f-path for its module vector.
#[derive(Clone, Debug)]
pub struct CElement {
    pub label: CLabel,
    pub fpath: Vec<usize>,
    pub weight: LatticeVector,
}

/// Result of a generator on a C_i element.
#[derive(Clone, Debug)]
pub struct CAction {
    pub from: CLabel,
    pub head: Head,
    pub to: Option<(CLabel, QScalar)>,
}

#[derive(Clone, Debug)]
pub struct LzBasis {
    pub n: usize,
    pub i: usize,
    pub caps: Caps,
    pub elements: Vec<CElement>,
    pub actions: Vec<CAction>,
}

impl LzBasis {
    pub fn find(&self, label: &CLabel) -> Option<&CElement> {
        self.elements.iter().find(|e| &e.label == label)
    }
}

/// Canonical f-paths from v_λ to every module basis vector.
fn module_fpaths(module: &FDModule) -> Vec<Option<Vec<usize>>> {
    let mut paths: Vec<Option<Vec<usize>>> = vec![None; module.dim()];
    paths[0] = Some(Vec::new());
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        for j in 1..=module.n {
            if let Some((t, _)) = module.f[j - 1].column_single(k) {
                if paths[t].is_none() {
                    let mut p = paths[k].clone().expect("visited");
                    p.push(j);
                    paths[t] = Some(p);
                    queue.push_back(t);
                }
            }
        }
    }
    paths
}

/// Enumerates C_i within the caps by applying ē_j, f_j, k̄_j to v_λ.
pub fn build_lz_basis(uqz: &Uqz, caps: Caps) -> LzBasis {
    let n = uqz.n();
    let paths = module_fpaths(&uqz.module);
    let heads = Head::module_heads(n);
    let start = CLabel { index: 0, efactors: Vec::new() };
    let mut seen = BTreeSet::from([start.clone()]);
    let mut elements = Vec::new();
    let mut actions = Vec::new();
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        let fpath = paths[c.index].clone().unwrap_or_default();
        elements.push(CElement { label: c.clone(), fpath, weight: uqz.module.weights[c.index].clone() });
        for &h in &heads {
            let to = uqz.act(h, &c);
            if let Some((t, _)) = &to {
                let len = paths[t.index].as_ref().map_or(usize::MAX, Vec::len);
                if caps.admits(len, &t.type_key()) && seen.insert(t.clone()) {
                    queue.push_back(t.clone());
                }
            }
            actions.push(CAction { from: c.clone(), head: h, to });
        }
    }
    elements.sort_by(|a, b| (a.fpath.len(), &a.fpath, &a.label).cmp(&(b.fpath.len(), &b.fpath, &b.label)));
    LzBasis { n, i: uqz.module.i, caps, elements, actions }
}

/// Rank of the C_i vectors specialized at `q^(1/2) = x0`.
pub fn lz_rank(uqz: &Uqz, elements: &[CElement], x0: &BigRational) -> usize {
    let vectors: Vec<ZSeriesVector> = elements.iter().map(|e| uqz.vector(&e.label)).collect();
    let keys: Vec<Vec<u32>> =
        vectors.iter().flat_map(|v| v.coeffs.keys().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
    let rows = vectors.iter().map(|v| v.specialize(&keys, uqz.module.dim(), x0)).collect();
    rank(rows)
}

impl fmt::Display for CLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.index)?;
        for e in self.canonical() {
            write!(f, " e({},z{})", e.u, e.j)?;
        }
        Ok(())
    }
}

/// Half-integer shift dictionary `u_l - u_m = -(n+1)(t_l - t_m)`.
pub fn u_difference(n: usize, tl: Half, tm: Half) -> Option<i64> {
    let d = (tl - tm).to_rat() * num_rational::Ratio::from_integer(-(n as i64 + 1));
    d.is_integer().then(|| d.to_integer())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repmod::fd_module;

    #[test]
    fn w_acts_by_exponentials() {
        for n in 1..=3 {
            for i in 1..=n {
                let u = build_uqz(fd_module(n, i).unwrap(), 3);
                for (name, ok) in u.check_w_eigen() {
                    assert!(ok, "{name}");
                }
            }
        }
    }

    #[test]
    fn exchange_at_rank_four() {
        let u = build_uqz(fd_module(4, 1).unwrap(), 1);
        let checks = u.check_m_exchange();
        assert_eq!(checks.len(), 2);
        for (name, ok) in checks {
            assert!(ok, "{name}");
        }
    }

    #[test]
    fn classical_limits() {
        for n in 1..=3 {
            for i in 1..=n {
                let u = build_uqz(fd_module(n, i).unwrap(), 2);
                for (name, ok) in u.check_classical_limits().unwrap() {
                    assert!(ok, "n={n} i={i}: {name}");
                }
            }
        }
    }

    #[test]
    fn label_action_matches_series_action() {
        for (n, i) in [(1, 1), (2, 1), (2, 2), (3, 2)] {
            let u = build_uqz(fd_module(n, i).unwrap(), 3);
            let basis = build_lz_basis(&u, Caps { path_max: 6, factors: 2, per_variable: None });
            for a in &basis.actions {
                let lhs = u.apply(a.head, &u.vector(&a.from));
                let rhs = match &a.to {
                    None => ZSeriesVector::zero(3),
                    Some((t, s)) => u.vector(t).scale(s),
                };
                assert_eq!(lhs, rhs, "n={n} i={i} {} on {}", a.head, a.from);
            }
        }
    }

    #[test]
    fn lz_basis_is_independent() {
        let x0 = BigRational::new(3.into(), 2.into());
        for (n, i) in [(1, 1), (2, 1), (2, 2), (3, 1)] {
            let u = build_uqz(fd_module(n, i).unwrap(), 3);
            let basis = build_lz_basis(&u, Caps::default());
            assert_eq!(lz_rank(&u, &basis.elements, &x0), basis.elements.len(), "n={n} i={i}");
        }
    }

    #[test]
    fn sl2_lz_basis_is_a_tower() {
        let u = build_uqz(fd_module(1, 1).unwrap(), 3);
        let basis = build_lz_basis(&u, Caps::default());
        assert_eq!(basis.elements.len(), 6);
        let us: BTreeSet<i64> = basis.elements.iter().flat_map(|e| e.label.efactors.iter().map(|f| f.u)).collect();
        assert_eq!(us.len(), 1);
    }
}
