//! Acceptance checks, one PASS/FAIL line each. Runs as a plain binary so the
//! lines are visible in `cargo test` output; exits nonzero if any fails.

use std::collections::BTreeSet;
use std::error::Error;
use std::time::Instant;

use num_rational::BigRational;
use qvertex::heisenberg::{oracle_sweep, OracleConfig};
use qvertex::products::bullet;
use qvertex::repmod::{
    build_lz_basis, build_omega, build_uqz, drinfeld_checks, enumerate_basis, enumerate_ybasis, fd_module, figure_caps,
    figure_sl2, figure_sl3, independence_rank, shift_table, sweep_lemmas, vacuum_survivors, ActionGraph, Caps,
    IndependenceConfig,
};
use qvertex::scalarfield::Half;
use qvertex::voperator::{make_fj, make_koyama, verify_relations, FjKind};

type Outcome = Result<(bool, String), Box<dyn Error>>;
type Criterion = (&'static str, fn() -> Outcome);

/// 1. All fifteen contraction relations at n = 2 and n = 3.
fn contraction_derivation() -> Outcome {
    let mut labels = BTreeSet::new();
    let mut instances = 0;
    let mut failures = Vec::new();
    for n in [2, 3] {
        for c in verify_relations(n)? {
            labels.insert(c.label);
            instances += 1;
            if !c.pass {
                failures.push(format!("n={n} {} ({},{}): expected {} derived {}", c.label, c.i, c.j, c.expected, c.derived));
            }
        }
    }
    let pass = failures.is_empty() && labels.len() == 15;
    Ok((pass, format!("{} relations, {instances} instances, {} mismatches {failures:?}", labels.len(), failures.len())))
}

/// 2. Symbolic composition against sequential Fock application.
fn oracle_equivalence() -> Outcome {
    let cfg = OracleConfig { zcutoff: 6, out_degree: 2 };
    let checks = oracle_sweep(2, 10, 2, &cfg, 7)?;
    let failed: Vec<String> = checks.iter().filter(|c| !c.pass).map(|c| format!("{} ∘ {}", c.a, c.b)).collect();
    let coefficients: usize = checks.iter().map(|c| c.coefficients).sum();
    Ok((
        failed.is_empty() && checks.len() == 96,
        format!("{} ordered pairs × 10 states, {coefficients} coefficients, failures {failed:?}", checks.len()),
    ))
}

/// 3. The table of shifts and the off-candidate scan.
fn bullet_mechanics() -> Outcome {
    let mut rows = 0;
    let mut in_scope = 0;
    let mut failed = Vec::new();
    for n in 1..=3 {
        for r in shift_table(n, 1, 6)? {
            rows += 1;
            if !r.nonzero.is_empty() {
                in_scope += 1;
            }
            if !r.pass {
                failed.push(format!("n={n} {} on {:?}: predicted {} nonzero {:?}", r.head, r.fpath, r.predicted, r.nonzero));
            }
        }
    }
    Ok((failed.is_empty(), format!("{rows} head/element pairs, {in_scope} in scope, t ∈ [-6, 6], failures {failed:?}")))
}

/// 4. The path lemmas against the module, with both module oracles.
fn lemma_sweeps() -> Outcome {
    let mut checks = 0;
    let mut mismatches = Vec::new();
    for n in 1..=3 {
        for i in 1..=n {
            let s = sweep_lemmas(n, i, 6)?;
            checks += s.checks;
            mismatches.extend(s.mismatches.iter().map(|m| format!("n={n} i={i} {} {:?} {:?}", m.lemma, m.seq, m.head)));
        }
    }
    Ok((mismatches.is_empty(), format!("{checks} equivalences over sequences of length ≤ 6, mismatches {mismatches:?}")))
}

/// 5. The Drinfeld relation on B_1 with ψ-degree ≤ 2.
fn drinfeld_analogue() -> Outcome {
    let mut total = 0;
    let mut commuting = 0;
    let mut failed = Vec::new();
    for n in [1, 2] {
        for c in drinfeld_checks(n, 1, 2)? {
            total += 1;
            if c.j1 != c.j2 {
                commuting += 1;
            }
            if !c.pass {
                failed.push(format!("n={n} j1={} j2={} on {}", c.j1, c.j2, c.element));
            }
        }
    }
    Ok((failed.is_empty(), format!("{total} identities ({commuting} with j1 ≠ j2), φ-terms zero, failures {failed:?}")))
}

type LabelSet = BTreeSet<(Vec<usize>, Vec<(usize, Half)>)>;

fn basis_labels(n: usize) -> Result<LabelSet, Box<dyn Error>> {
    Ok(enumerate_basis(n, 1, 2)?
        .into_iter()
        .map(|e| {
            let mut psi: Vec<(usize, Half)> = e.label.psi.iter().map(|p| (p.j, p.t)).collect();
            psi.sort();
            (e.fpath, psi)
        })
        .collect())
}

fn powers(l: usize, m: usize) -> Vec<(usize, Half)> {
    let mut v = vec![(1, Half::from_twice(3)); l];
    v.extend(vec![(2, Half::from_twice(5)); m]);
    v
}

/// 6. The bases of the two worked examples, with ψ-degree ≤ 2.
fn basis_reproduction() -> Outcome {
    let mut easy = LabelSet::new();
    for fpath in [vec![], vec![1]] {
        for l in 0..=2 {
            easy.insert((fpath.clone(), powers(l, 0)));
        }
    }
    let mut hard = LabelSet::new();
    for fpath in [vec![], vec![1], vec![1, 2]] {
        for l in 0..=2 {
            for m in 0..=2 - l {
                if fpath.is_empty() && m > 0 && l == 0 {
                    continue;
                }
                hard.insert((fpath.clone(), powers(l, m)));
            }
        }
    }
    let y = make_koyama(2, 1, Half::ZERO);
    let psi2_kills = bullet(&make_fj(2, FjKind::Psi, 2, Half::ZERO), &y)?.is_zero();
    let (got_easy, got_hard) = (basis_labels(1)?, basis_labels(2)?);
    Ok((
        got_easy == easy && got_hard == hard && psi2_kills,
        format!("n=1: {} elements, n=2: {} elements, ψ_2 • Y_1 = 0: {psi2_kills}", got_easy.len(), got_hard.len()),
    ))
}

/// 7. Rank of the capped B_(1,ψ)^- evaluation matrix.
fn independence_evidence() -> Outcome {
    let cfg = IndependenceConfig { t_hi: Half::from_int(1), ..IndependenceConfig::default() };
    let r = independence_rank(1, 1, cfg, &BigRational::new(3.into(), 2.into()))?;
    Ok((
        r.full_rank() && r.rows == 20,
        format!("n=1, ψ-degree ≤ 2, t ∈ {{0, 1/2, 1}}: rank {}/{} over {} columns at zcutoff 6", r.rank, r.rows, r.columns),
    ))
}

/// 8. U_q(sl_(n+1))_z: eigenvectors of w_j, exchange, classical limits.
fn algebra_uqz() -> Outcome {
    let mut checks = Vec::new();
    for n in 1..=3 {
        for i in 1..=n {
            let u = build_uqz(fd_module(n, i)?, 3);
            checks.extend(u.check_w_eigen());
            checks.extend(u.check_classical_limits()?);
        }
    }
    let exchange = build_uqz(fd_module(4, 1)?, 3).check_m_exchange();
    let exchange_ok = exchange.len() == 2 && exchange.iter().all(|c| c.1);
    let failed: Vec<&String> = checks.iter().filter(|c| !c.1).map(|c| &c.0).collect();
    Ok((
        failed.is_empty() && exchange_ok,
        format!("{} matrix identities, exchange at n=4: {} checks, failures {failed:?}", checks.len(), exchange.len()),
    ))
}

/// 9. Ω, the drawn figures and the commutative diagrams.
fn isomorphism_omega() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for (n, i) in [(1, 1), (2, 1), (2, 2)] {
        let r = build_omega(n, i, Caps::default(), 3)?;
        pass &= r.structure_ok();
        let nonzero = r.comparisons.iter().filter(|c| c.scalar_ratio.is_some()).count();
        notes.push(format!(
            "n={n} i={i}: {} pairs, {} diagrams, scalars equal {}/{nonzero}",
            r.pairs.len(),
            r.diagrams.len(),
            r.scalar_agreements()
        ));
    }
    for (n, figure) in [(1, figure_sl2()), (2, figure_sl3())] {
        let caps = figure_caps(n);
        let module = ActionGraph::module(&build_lz_basis(&build_uqz(fd_module(n, 1)?, 3), caps));
        let bullet = ActionGraph::bullet(&enumerate_ybasis(n, 1, caps.factors)?, caps);
        let ok = module.isomorphic(&figure) && bullet.isomorphic(&figure);
        pass &= ok;
        notes.push(format!("figure n={n}: {} nodes, {} edges, isomorphic {ok}", figure.node_count(), figure.edge_count()));
    }
    Ok((pass, notes.join("; ")))
}

/// 10. Every head annihilates the constant operator.
fn vacuum_is_trivial() -> Outcome {
    let survivors = vacuum_survivors(3)?;
    let small = vacuum_survivors(1)?.len() + vacuum_survivors(2)?.len();
    Ok((survivors.is_empty() && small == 0, format!("12 heads at n=3 (and 4, 8 at n=1, 2), nonzero: {survivors:?}")))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("contraction derivation", contraction_derivation),
        ("oracle equivalence", oracle_equivalence),
        ("bullet mechanics", bullet_mechanics),
        ("lemma sweeps", lemma_sweeps),
        ("drinfeld analogue", drinfeld_analogue),
        ("basis reproduction", basis_reproduction),
        ("independence evidence", independence_evidence),
        ("algebra U_q(sl)_z", algebra_uqz),
        ("isomorphism Ω", isomorphism_omega),
        ("Y_0 is trivial", vacuum_is_trivial),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} criterion {:>2} {name}: {detail} [{:.1} s]",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            start.elapsed().as_secs_f64()
        );
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
