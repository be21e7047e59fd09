//! Exhaustive checks of the bullet action on ⟨Y_i(z)⟩ against the module
//! L(λ_i): the path lemmas, the table of shifts, the Drinfeld relation and
//! the triviality of ⟨Y_0(z)⟩.

use rayon::prelude::*;
use serde::Serialize;

use super::basis::{enumerate_bminus, enumerate_ybasis, Head};
use super::fdmodule::{all_sequences, fd_module, nonzero_epath, nonzero_fpath};
use super::RepError;
use crate::products::{bullet_on, candidate_shifts, scan_shifts};
use crate::scalarfield::{Half, QScalar};
use crate::voperator::{identity_term, make_koyama, FjKind, OperatorSum};

/// A disagreement between a bullet chain and the module.
#[derive(Clone, Debug, Serialize)]
pub struct LemmaMismatch {
    pub lemma: &'static str,
    pub seq: Vec<usize>,
    /// Index of the extra head, absent for the pure x^- chain.
    pub head: Option<usize>,
    pub bullet_nonzero: bool,
    pub module_nonzero: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaSweep {
    pub n: usize,
    pub i: usize,
    pub max_len: usize,
    pub sequences: usize,
    /// Number of equivalences compared (x-Y, x+Y, ψ).
    pub checks: usize,
    /// Number of path-condition versus matrix comparisons.
    pub oracle_checks: usize,
    pub mismatches: Vec<LemmaMismatch>,
}

impl LemmaSweep {
    pub fn pass(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares, for every sequence of length ≤ `max_len`, the chains
/// `x_(j_k)^- • ... • x_(j_1)^- • Y_i`, followed by x_j^+ or ψ_j, with
/// `f_(j_k)...f_(j_1) v` and `e_j f... v`, `f_j f... v` in L(λ_i).
///
/// Chains are built incrementally along the sequence tree; a vanishing chain
/// stays zero under further bullets.
pub fn sweep_lemmas(n: usize, i: usize, max_len: usize) -> Result<LemmaSweep, RepError> {
    let module = fd_module(n, i)?;
    let seqs = all_sequences(n, max_len);
    let mut chains: std::collections::HashMap<Vec<usize>, OperatorSum> = std::collections::HashMap::new();
    chains.insert(Vec::new(), OperatorSum::from_term(make_koyama(n, i, Half::ZERO)));
    let mut sweep = LemmaSweep { n, i, max_len, sequences: seqs.len(), checks: 0, oracle_checks: 0, mismatches: Vec::new() };
    for seq in &seqs {
        let chain = match seq.split_last() {
            None => chains[seq].clone(),
            Some((&j, prefix)) => {
                let parent = &chains[prefix];
                let c = if parent.is_zero() { OperatorSum::zero() } else { bullet_on(&Head { kind: FjKind::XMinus, j }.term(n), parent)? };
                chains.insert(seq.clone(), c.clone());
                c
            }
        };
        let mut record = |lemma, head, bullet_nonzero: bool, module_nonzero: bool| {
            if bullet_nonzero != module_nonzero {
                sweep.mismatches.push(LemmaMismatch { lemma, seq: seq.clone(), head, bullet_nonzero, module_nonzero });
            }
        };
        let fpath = nonzero_fpath(&module, seq)?;
        record("x-Y", None, !chain.is_zero(), fpath);
        let heads: Vec<(usize, bool, bool, bool, bool)> = (1..=n)
            .into_par_iter()
            .map(|j| -> Result<_, RepError> {
                let (plus, psi) = if chain.is_zero() {
                    (false, false)
                } else {
                    let plus = !bullet_on(&Head { kind: FjKind::XPlus, j }.term(n), &chain)?.is_zero();
                    let psi = !bullet_on(&Head { kind: FjKind::Psi, j }.term(n), &chain)?.is_zero();
                    (plus, psi)
                };
                let e = nonzero_epath(&module, seq, j)?;
                let mut longer = seq.clone();
                longer.push(j);
                let f = nonzero_fpath(&module, &longer)?;
                Ok((j, plus, psi, e, f))
            })
            .collect::<Result<_, _>>()?;
        for (j, plus, psi, e, f) in heads {
            record("x+Y", Some(j), plus, e);
            record("psi-Y", Some(j), psi, e || f);
        }
        sweep.checks += 1 + 2 * n;
        sweep.oracle_checks += 1 + 2 * n;
    }
    Ok(sweep)
}

/// One row of the table of shifts: a head acting on an element of B_i^-.
#[derive(Clone, Debug, Serialize)]
pub struct ShiftRow {
    pub fpath: Vec<usize>,
    pub shifts: Vec<Half>,
    pub head: String,
    /// `t_(r_0) + 1`, `+ 3/2` or `+ 2` for x^-, ψ and x^+.
    pub predicted: Half,
    pub candidates: Vec<Half>,
    pub nonzero: Vec<Half>,
    pub off_candidate: Vec<Half>,
    pub pass: bool,
}

/// The shift predicted for a head on the chain with indices `fpath` and
/// shifts `shifts`: `t_(r_0)` plus 1, 3/2 or 2, where r_0 is the last step
/// whose index is adjacent to the head's.
pub fn predicted_shift(head: Head, fpath: &[usize], shifts: &[Half]) -> Option<Half> {
    let r0 = fpath.iter().rposition(|&p| p.abs_diff(head.j) == 1);
    let t0 = r0.map_or(Half::ZERO, |r| shifts[r]);
    let step = match head.kind {
        FjKind::XMinus => Half::from_int(1),
        FjKind::Psi => Half::from_twice(3),
        FjKind::XPlus => Half::from_int(2),
        FjKind::Phi => return None,
    };
    Some(Half::from_twice(t0.twice() + step.twice()))
}

/// Scans `a(z q^t)_0 b(z)` for t in `[-window, window]` for every head x_j^-,
/// ψ_j, x_j^+ and every b in B_i^-.
pub fn shift_table(n: usize, i: usize, window: i64) -> Result<Vec<ShiftRow>, RepError> {
    let bminus = enumerate_bminus(n, i)?;
    let heads: Vec<Head> = Head::module_heads(n);
    let jobs: Vec<(usize, Head)> = (0..bminus.len()).flat_map(|b| heads.iter().map(move |&h| (b, h))).collect();
    jobs.par_iter()
        .map(|&(b, head)| {
            let el = &bminus[b];
            let a = head.term(n);
            let scan = scan_shifts(&a, &el.term, Half::from_int(-window), Half::from_int(window))?;
            let candidates: Vec<Half> = candidate_shifts(&a, &el.term)?.into_iter().map(|c| c.t).collect();
            let predicted = predicted_shift(head, &el.fpath, &el.shifts).expect("module heads exclude φ");
            let pass = scan.off_candidate.is_empty()
                && (scan.nonzero.is_empty() || (scan.nonzero == vec![predicted] && candidates.contains(&predicted)));
            Ok(ShiftRow {
                fpath: el.fpath.clone(),
                shifts: el.shifts.clone(),
                head: head.to_string(),
                predicted,
                candidates,
                nonzero: scan.nonzero,
                off_candidate: scan.off_candidate,
                pass,
            })
        })
        .collect()
}

/// The Drinfeld relation on one basis element for one pair (j_1, j_2).
#[derive(Clone, Debug, Serialize)]
pub struct DrinfeldCheck {
    pub element: String,
    pub j1: usize,
    pub j2: usize,
    /// Whether the commutator side is nonzero.
    pub nonzero: bool,
    /// Whether φ_j • a vanishes (only recorded for j_1 = j_2).
    pub phi_vanishes: bool,
    pub pass: bool,
}

/// `x_(j1)^+ • x_(j2)^- • a − x_(j2)^- • x_(j1)^+ • a = δ (ψ_(j1) − φ_(j1)) • a / (q − q^-1)`
/// for every a in B_i with ψ-degree ≤ `psi_max`.
pub fn drinfeld_checks(n: usize, i: usize, psi_max: usize) -> Result<Vec<DrinfeldCheck>, RepError> {
    let yb = enumerate_ybasis(n, i, psi_max)?;
    let c = (&QScalar::q_int_pow(1) - &QScalar::q_int_pow(-1)).inv();
    let jobs: Vec<(usize, usize, usize)> =
        (0..yb.elements.len()).flat_map(|e| (1..=n).flat_map(move |j1| (1..=n).map(move |j2| (e, j1, j2)))).collect();
    jobs.par_iter()
        .map(|&(e, j1, j2)| {
            let el = &yb.elements[e];
            let a = OperatorSum::from_term(el.term.clone());
            let plus = Head { kind: FjKind::XPlus, j: j1 }.term(n);
            let minus = Head { kind: FjKind::XMinus, j: j2 }.term(n);
            let lhs = bullet_on(&plus, &bullet_on(&minus, &a)?)?.sub(&bullet_on(&minus, &bullet_on(&plus, &a)?)?);
            let (rhs, phi_vanishes) = if j1 == j2 {
                let psi = bullet_on(&Head { kind: FjKind::Psi, j: j1 }.term(n), &a)?;
                let phi = bullet_on(&Head { kind: FjKind::Phi, j: j1 }.term(n), &a)?;
                (psi.sub(&phi).scale(&c), phi.is_zero())
            } else {
                (OperatorSum::zero(), true)
            };
            Ok(DrinfeldCheck {
                element: el.render(i),
                j1,
                j2,
                nonzero: !lhs.is_zero(),
                phi_vanishes,
                pass: lhs == rhs && phi_vanishes,
            })
        })
        .collect()
}

/// The heads whose bullet product with the constant operator 1 is nonzero.
pub fn vacuum_survivors(n: usize) -> Result<Vec<Head>, RepError> {
    let one = OperatorSum::from_term(identity_term(n));
    let mut out = Vec::new();
    for h in Head::all(n) {
        if !bullet_on(&h.term(n), &one)?.is_zero() {
            out.push(h);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_sweep_small() {
        for n in 1..=2 {
            for i in 1..=n {
                let s = sweep_lemmas(n, i, 4).unwrap();
                assert!(s.pass(), "{:?}", s.mismatches);
            }
        }
    }

    #[test]
    fn shift_table_rank_two() {
        for row in shift_table(2, 1, 6).unwrap() {
            assert!(row.pass, "{row:?}");
        }
    }

    #[test]
    fn predicted_shifts() {
        let h = |kind, j| Head { kind, j };
        assert_eq!(predicted_shift(h(FjKind::XMinus, 1), &[], &[]), Some(Half::from_int(1)));
        assert_eq!(predicted_shift(h(FjKind::Psi, 1), &[], &[]), Some(Half::from_twice(3)));
        assert_eq!(predicted_shift(h(FjKind::XPlus, 2), &[1], &[Half::from_int(1)]), Some(Half::from_int(3)));
        assert_eq!(predicted_shift(h(FjKind::Phi, 1), &[], &[]), None);
    }

    #[test]
    fn drinfeld_sl2() {
        for c in drinfeld_checks(1, 1, 1).unwrap() {
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn constant_operator_is_annihilated() {
        for n in 1..=3 {
            assert!(vacuum_survivors(n).unwrap().is_empty());
        }
    }
}
