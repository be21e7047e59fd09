//! Linear independence of capped sets of vectors `b^-(z) Π ψ_j(z q^t)`,
//! evidenced by the rank of their evaluations on random Fock states.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::basis::{enumerate_bminus, psi_product, BasisLabel, PsiFactor};
use super::matrix::{rank_mod_p, reduce_mod_p, RANK_PRIME};
use super::RepError;
use crate::heisenberg::{fock_apply, Monomial, State};
use crate::lattice::GroupWord;
use crate::scalarfield::{Half, QScalar, Rat};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct IndependenceConfig {
    pub psi_max: usize,
    /// Range of the shifts t, inclusive, in steps of 1/2.
    pub t_lo: Half,
    pub t_hi: Half,
    pub states: usize,
    /// Fock degree of the random states, creation order and output degree.
    pub zcutoff: u32,
    pub seed: u64,
}

impl Default for IndependenceConfig {
    fn default() -> Self {
        IndependenceConfig {
            psi_max: 2,
            t_lo: Half::ZERO,
            t_hi: Half::from_int(2),
            states: 20,
            zcutoff: 6,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IndependenceReport {
    pub n: usize,
    pub i: usize,
    pub rows: usize,
    pub columns: usize,
    pub rank: usize,
    /// The value of q^(1/2) at which the rank was computed, modulo `prime`.
    pub specialization: String,
    pub prime: u64,
}

impl IndependenceReport {
    pub fn full_rank(&self) -> bool {
        self.rank == self.rows
    }
}

/// All multisets of at most `k` factors ψ_j(z q^t), j ascending and t
/// ascending within each j.
fn psi_multisets(n: usize, k: usize, t_lo: Half, t_hi: Half) -> Vec<Vec<PsiFactor>> {
    let singles: Vec<PsiFactor> =
        (1..=n).flat_map(|j| Half::range(t_lo, t_hi).map(move |t| PsiFactor { j, t })).collect();
    let mut out = vec![Vec::new()];
    let mut layer: Vec<(usize, Vec<PsiFactor>)> = vec![(0, Vec::new())];
    for _ in 0..k {
        let mut next = Vec::new();
        for (start, m) in &layer {
            for (idx, p) in singles.iter().enumerate().skip(*start) {
                let mut m2 = m.clone();
                m2.push(*p);
                next.push((idx, m2));
            }
        }
        out.extend(next.iter().map(|(_, m)| m.clone()));
        layer = next;
    }
    out
}

type Column = (usize, Vec<Rat>, GroupWord, Monomial);

/// Rank of the evaluation matrix of the capped B_{i,ψ}^- at `q^(1/2) = x0`,
/// computed modulo a prime; full rank there implies full rank over Q(q^(1/2)).
pub fn independence_rank(n: usize, i: usize, cfg: IndependenceConfig, x0: &BigRational) -> Result<IndependenceReport, RepError> {
    let bminus = enumerate_bminus(n, i)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let states: Vec<State> = (0..cfg.states).map(|_| State::random(&mut rng, n, cfg.zcutoff)).collect();
    let mut elements = Vec::new();
    for b in &bminus {
        for psi in psi_multisets(n, cfg.psi_max, cfg.t_lo, cfg.t_hi) {
            let term = psi_product(&b.term, &psi)?;
            elements.push((BasisLabel { weight: b.weight.clone(), psi }, term));
        }
    }
    let evaluations: Vec<Result<BTreeMap<Column, QScalar>, RepError>> = elements
        .par_iter()
        .map(|(_, term)| {
            let mut row = BTreeMap::new();
            for (s, state) in states.iter().enumerate() {
                let out = fock_apply(term, state, &[cfg.zcutoff], cfg.zcutoff)?;
                for ((z, g), v) in out {
                    for (m, c) in v.terms() {
                        row.insert((s, z.clone(), g.clone(), m.clone()), c.clone());
                    }
                }
            }
            Ok(row)
        })
        .collect();
    let rows: Vec<BTreeMap<Column, QScalar>> = evaluations.into_iter().collect::<Result<_, _>>()?;
    let columns: Vec<&Column> = rows.iter().flat_map(|r| r.keys()).collect::<BTreeSet<_>>().into_iter().collect();
    let reduce = |v: &QScalar| -> Result<u64, RepError> {
        v.eval(x0)
            .as_ref()
            .and_then(reduce_mod_p)
            .ok_or_else(|| RepError::StructureMismatch(format!("specialization {x0} mod {RANK_PRIME} hits a pole")))
    };
    let matrix: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| columns.iter().map(|c| r.get(*c).map_or(Ok(0), reduce)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    let rank = rank_mod_p(matrix);
    Ok(IndependenceReport { n, i, rows: rows.len(), columns: columns.len(), rank, specialization: x0.to_string(), prime: RANK_PRIME })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multisets_are_counted() {
        let m = psi_multisets(1, 2, Half::ZERO, Half::from_int(2));
        assert_eq!(m.len(), 1 + 5 + 15);
        let m = psi_multisets(2, 1, Half::ZERO, Half::ZERO);
        assert_eq!(m.len(), 3);
    }

    #[test]
    fn sl2_capped_set_is_independent() {
        let x0 = BigRational::new(3.into(), 2.into());
        let cfg = IndependenceConfig { psi_max: 1, states: 6, ..IndependenceConfig::default() };
        let r = independence_rank(1, 1, cfg, &x0).unwrap();
        assert_eq!(r.rows, 12);
        assert!(r.full_rank(), "{r:?}");
    }
}
