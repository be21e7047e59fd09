//! The bases B_i^- and B_i of ⟨Y_i(z)⟩, found by applying bullet products to
//! Y_i(z) and reading every result as a multiple of `b^-(z) Π ψ_j(z q^t)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::RepError;
use crate::lattice::LatticeVector;
use crate::products::bullet;
use crate::scalarfield::{Half, QScalar};
use crate::voperator::{compose, make_fj, make_koyama, FjKind, Laurent, VOTerm, VOTermJson};

/// A generator acting by the bullet product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Head {
    pub kind: FjKind,
    pub j: usize,
}

impl Head {
    pub fn term(self, n: usize) -> VOTerm {
        make_fj(n, self.kind, self.j, Half::ZERO)
    }

    /// All 4n heads x_j^-, x_j^+, ψ_j, φ_j.
    pub fn all(n: usize) -> Vec<Head> {
        let mut v = Vec::new();
        for kind in [FjKind::XMinus, FjKind::XPlus, FjKind::Psi, FjKind::Phi] {
            for j in 1..=n {
                v.push(Head { kind, j });
            }
        }
        v
    }

    /// The heads matching the generators ē_j, f_j, k̄_j.
    pub fn module_heads(n: usize) -> Vec<Head> {
        Head::all(n).into_iter().filter(|h| h.kind != FjKind::Phi).collect()
    }
}

impl fmt::Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            FjKind::XMinus => "x-",
            FjKind::XPlus => "x+",
            FjKind::Psi => "psi",
            FjKind::Phi => "phi",
        };
        write!(f, "{k}[{}]", self.j)
    }
}

/// The factor ψ_j(z q^t).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PsiFactor {
    pub j: usize,
    pub t: Half,
}

/// Identifies a vector of B_(i,ψ)^-: the weight of its x^- chain and its
/// ψ-factors sorted by (j, t).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisLabel {
    pub weight: LatticeVector,
    pub psi: Vec<PsiFactor>,
}

/// An element of B_i^-: a nonzero x^- bullet chain applied to Y_i(z).
#[derive(Clone, Debug)]
pub struct BMinusElement {
    /// Indices in order of application (first applied first).
    pub fpath: Vec<usize>,
    /// Shifts t_l at which each step's zeroth product is nonzero.
    pub shifts: Vec<Half>,
    pub weight: LatticeVector,
    pub term: VOTerm,
}

/// An element of B_i with the bullet word that produces it.
#[derive(Clone, Debug)]
pub struct BasisElementB {
    pub fpath: Vec<usize>,
    pub label: BasisLabel,
    /// `b^-(z) Π ψ_j(z q^t)` as a normal-ordered operator.
    pub term: VOTerm,
    /// Heads applied to Y_i(z), first applied first.
    pub word: Vec<Head>,
    /// The word evaluates to `word_scalar · term`.
    pub word_scalar: QScalar,
}

/// Result of acting with a head on a basis element.
#[derive(Clone, Debug)]
pub struct BasisAction {
    pub from: BasisLabel,
    pub head: Head,
    /// `None` when the bullet product vanishes.
    pub to: Option<(BasisLabel, QScalar)>,
}

/// All basis elements within the ψ-degree cap and the actions among them.
#[derive(Clone, Debug)]
pub struct YBasis {
    pub n: usize,
    pub i: usize,
    pub psi_max: usize,
    pub bminus: Vec<BMinusElement>,
    pub elements: Vec<BasisElementB>,
    pub actions: Vec<BasisAction>,
}

impl YBasis {
    pub fn find(&self, label: &BasisLabel) -> Option<&BasisElementB> {
        self.elements.iter().find(|e| &e.label == label)
    }

    pub fn fpath_of(&self, weight: &LatticeVector) -> Option<&[usize]> {
        self.bminus.iter().find(|b| &b.weight == weight).map(|b| b.fpath.as_slice())
    }
}

fn bullet_single(head: &VOTerm, b: &VOTerm) -> Result<Option<VOTerm>, RepError> {
    let s = bullet(head, b)?;
    if s.is_zero() {
        return Ok(None);
    }
    s.single()
        .map(Some)
        .ok_or_else(|| RepError::NotBasisForm(format!("bullet produced {} terms: {}", s.len(), s.render())))
}

/// B_i^- by breadth-first search over x^- chains, one element per weight.
pub fn enumerate_bminus(n: usize, i: usize) -> Result<Vec<BMinusElement>, RepError> {
    if i == 0 || i > n {
        return Err(RepError::IndexOutOfRange { index: i, n });
    }
    let y = make_koyama(n, i, Half::ZERO);
    let mut out = vec![BMinusElement { fpath: Vec::new(), shifts: Vec::new(), weight: y.wt(), term: y }];
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for idx in frontier {
            for j in 1..=n {
                let head = make_fj(n, FjKind::XMinus, j, Half::ZERO);
                let parent = out[idx].clone();
                let Some(term) = bullet_single(&head, &parent.term)? else {
                    continue;
                };
                let w = term.wt();
                if out.iter().any(|b| b.weight == w) {
                    continue;
                }
                let t = term.atoms[0].first().map_or(Half::ZERO, |a| a.shift);
                let mut fpath = parent.fpath.clone();
                fpath.push(j);
                let mut shifts = parent.shifts.clone();
                shifts.push(t);
                out.push(BMinusElement { fpath, shifts, weight: w, term });
                next.push(out.len() - 1);
            }
        }
        frontier = next;
    }
    Ok(out)
}

/// `a(z) Π ψ_j(z q^t)` in normal order.
pub fn psi_product(a: &VOTerm, psi: &[PsiFactor]) -> Result<VOTerm, RepError> {
    let n = a.n();
    let mut acc = a.clone();
    for p in psi {
        let c = compose(&acc, &make_fj(n, FjKind::Psi, p.j, p.t))?;
        let f = c.prefactor();
        if !f.factors().is_empty() || !f.z1exp.is_zero() || !f.z2exp.is_zero() {
            return Err(RepError::NotBasisForm(format!("ψ product has prefactor {f}")));
        }
        let term = c.nord.collapse(Zero::zero());
        let s = &term.scalar * &f.constant;
        acc = term.with_scalar(s);
    }
    Ok(acc)
}

/// Writes `term = scalar · b^-(z) Π ψ_j(z q^t)`.
pub fn decompose(term: &VOTerm, bminus: &[BMinusElement]) -> Result<(BasisLabel, VOTerm, QScalar), RepError> {
    let n = term.n();
    let w = term.wt();
    let base = bminus
        .iter()
        .find(|b| b.weight == w)
        .ok_or_else(|| RepError::NotBasisForm(format!("no x^- chain of weight {w}")))?;
    let (tp, bp) = (term.part(), base.term.part());
    if tp.creation != bp.creation {
        return Err(RepError::NotBasisForm(format!("creation part differs from the chain of weight {w}")));
    }
    let d = Laurent::antisym(1).mul(&Laurent::sym(n as i64 + 1));
    let mut psi = Vec::new();
    for k in 0..n {
        let residual = tp.annihilation[k].sub(&bp.annihilation[k]);
        let quo = residual
            .div_exact(&d)
            .ok_or_else(|| RepError::NotBasisForm(format!("annihilation residual {residual} in mode {}", k + 1)))?;
        for (twice, c) in quo.terms() {
            if c < 0 {
                return Err(RepError::NotBasisForm(format!("negative ψ multiplicity in mode {}", k + 1)));
            }
            for _ in 0..c {
                psi.push(PsiFactor { j: k + 1, t: Half::from_twice(-twice) });
            }
        }
    }
    psi.sort();
    let basis = psi_product(&base.term, &psi)?;
    if basis.shape != term.shape {
        return Err(RepError::NotBasisForm(format!("{} does not match {}", term.render(), basis.render())));
    }
    let scalar = &term.scalar / &basis.scalar;
    Ok((BasisLabel { weight: w, psi }, basis, scalar))
}

/// Enumerates B_i up to ψ-degree `psi_max`, recording every head action.
pub fn enumerate_ybasis(n: usize, i: usize, psi_max: usize) -> Result<YBasis, RepError> {
    let bminus = enumerate_bminus(n, i)?;
    let y = bminus[0].term.clone();
    let start = BasisElementB {
        fpath: Vec::new(),
        label: BasisLabel { weight: y.wt(), psi: Vec::new() },
        term: y,
        word: Vec::new(),
        word_scalar: QScalar::one(),
    };
    let heads = Head::all(n);
    let mut elements = vec![start];
    let mut seen: BTreeSet<BasisLabel> = elements.iter().map(|e| e.label.clone()).collect();
    let mut actions = Vec::new();
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let jobs: Vec<(usize, Head)> = frontier.iter().flat_map(|&f| heads.iter().map(move |&h| (f, h))).collect();
        let results: Vec<Result<Option<(BasisLabel, VOTerm, QScalar)>, RepError>> = jobs
            .par_iter()
            .map(|&(f, h)| match bullet_single(&h.term(n), &elements[f].term)? {
                None => Ok(None),
                Some(t) => decompose(&t, &bminus).map(Some),
            })
            .collect();
        let mut next = Vec::new();
        for (&(f, h), r) in jobs.iter().zip(results) {
            let r = r?;
            let from = elements[f].label.clone();
            let Some((label, basis, scalar)) = r else {
                actions.push(BasisAction { from, head: h, to: None });
                continue;
            };
            actions.push(BasisAction { from, head: h, to: Some((label.clone(), scalar.clone())) });
            if label.psi.len() > psi_max || seen.contains(&label) {
                continue;
            }
            seen.insert(label.clone());
            let parent = &elements[f];
            let mut word = parent.word.clone();
            word.push(h);
            let fpath = bminus.iter().find(|b| b.weight == label.weight).map(|b| b.fpath.clone()).unwrap_or_default();
            let e = BasisElementB { fpath, label, term: basis, word, word_scalar: &parent.word_scalar * &scalar };
            elements.push(e);
            next.push(elements.len() - 1);
        }
        frontier = next;
    }
    elements.sort_by(|a, b| (a.fpath.len(), &a.fpath, &a.label.psi).cmp(&(b.fpath.len(), &b.fpath, &b.label.psi)));
    Ok(YBasis { n, i, psi_max, bminus, elements, actions })
}

/// All elements of B_i with ψ-degree ≤ `psi_max`.
pub fn enumerate_basis(n: usize, i: usize, psi_max: usize) -> Result<Vec<BasisElementB>, RepError> {
    Ok(enumerate_ybasis(n, i, psi_max)?.elements)
}

impl BasisElementB {
    /// `x-[j_r] . ... . x-[j_1] . Y[i] psi[j,t]^m ...`.
    pub fn render(&self, i: usize) -> String {
        let mut s = String::new();
        for j in self.fpath.iter().rev() {
            s.push_str(&format!("x-[{j}] . "));
        }
        s.push_str(&format!("Y[{i}]"));
        let mut counts: BTreeMap<PsiFactor, usize> = BTreeMap::new();
        for p in &self.label.psi {
            *counts.entry(*p).or_default() += 1;
        }
        for (p, m) in counts {
            s.push_str(&format!(" psi[{},{}]", p.j, p.t));
            if m > 1 {
                s.push_str(&format!("^{m}"));
            }
        }
        s
    }

    pub fn to_json(&self, i: usize) -> BasisElementJson {
        BasisElementJson {
            text: self.render(i),
            fpath: self.fpath.clone(),
            weight: self.label.weight.coords().to_vec(),
            psi: self.label.psi.iter().map(|p| (p.j, p.t.to_string())).collect(),
            word: self.word.iter().map(|h| h.to_string()).collect(),
            word_scalar: self.word_scalar.render(),
            term: self.term.to_json(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BasisElementJson {
    pub text: String,
    pub fpath: Vec<usize>,
    pub weight: Vec<i64>,
    pub psi: Vec<(usize, String)>,
    pub word: Vec<String>,
    pub word_scalar: String,
    pub term: VOTermJson,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repmod::{fd_module, nonzero_fpath};

    #[test]
    fn bminus_matches_module_dimension() {
        for n in 1..=3 {
            for i in 1..=n {
                let b = enumerate_bminus(n, i).unwrap();
                let m = fd_module(n, i).unwrap();
                assert_eq!(b.len(), m.dim(), "n={n} i={i}");
                for e in &b {
                    assert!(nonzero_fpath(&m, &e.fpath).unwrap());
                    assert!(m.index_of_weight(&e.weight).is_some());
                }
            }
        }
    }

    #[test]
    fn sl2_basis_is_example() {
        let b = enumerate_basis(1, 1, 2).unwrap();
        let h = Half::from_twice(3);
        let mut got: Vec<(usize, Vec<PsiFactor>)> = b.iter().map(|e| (e.fpath.len(), e.label.psi.clone())).collect();
        got.sort();
        let mut expect = Vec::new();
        for len in 0..=1 {
            for l in 0..=2 {
                expect.push((len, vec![PsiFactor { j: 1, t: h }; l]));
            }
        }
        expect.sort();
        assert_eq!(got, expect);
    }

    #[test]
    fn sl3_basis_is_example() {
        let b = enumerate_basis(2, 1, 2).unwrap();
        let mut got: Vec<(Vec<usize>, Vec<PsiFactor>)> = b.iter().map(|e| (e.fpath.clone(), e.label.psi.clone())).collect();
        got.sort();
        let mut expect = Vec::new();
        for fpath in [vec![], vec![1], vec![1, 2]] {
            for l in 0..=2usize {
                for m in 0..=(2 - l) {
                    if fpath.is_empty() && m > 0 && l == 0 {
                        continue;
                    }
                    let mut psi = vec![PsiFactor { j: 1, t: Half::from_twice(3) }; l];
                    psi.extend(vec![PsiFactor { j: 2, t: Half::from_twice(5) }; m]);
                    expect.push((fpath.clone(), psi));
                }
            }
        }
        expect.sort();
        assert_eq!(got, expect);
    }
}
