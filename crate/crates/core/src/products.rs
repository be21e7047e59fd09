//! Zeroth products at coincident simple poles and the bullet product
//!
//! ```text
//! a(z) • b(z) = Σ_t (1/(z q^t))^((wt a, wt b) + 1) q^t a(z q^t)_0 b(z).
//! ```
//!
//! With `a(z1) b(z2) = F(z1, z2) :a(z1) b(z2):` and F having only simple
//! poles, the r-th product vanishes for r ≥ 1 and the zeroth product is the
//! residue `[(z1 - z2) F :a b:]` on the diagonal when F has a pole at
//! `z1 = z2`, and zero otherwise. Shifting a by t moves a pole at
//! `z1 = q^a z2` to `z1 = q^(a-t) z2`, so only the pole locations of the
//! unshifted composition can contribute.

use rayon::prelude::*;
use serde::Serialize;

use crate::lattice::pairing;
use crate::scalarfield::{Half, QScalar, Rat};
use crate::voperator::{compose, contraction_factors, make_species, Atom, Composition, EngineError, OperatorSum, VOTerm};

/// A shift t at which `a(z q^t)_0 b(z)` may be nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShiftCandidate {
    pub t: Half,
    /// Pole order of the unshifted prefactor at `z1 = q^t z2`.
    pub order: i32,
    /// The constituents of b whose contraction with a has a pole there.
    pub source: Vec<Atom>,
}

fn check_simple_poles(c: &Composition) -> Result<(), EngineError> {
    for (_, _, f) in &c.pairs {
        for lf in f.factors() {
            if lf.e < -1 {
                return Err(EngineError::HigherOrderPole { order: -lf.e, at: lf.a });
            }
        }
    }
    let total = c.prefactor();
    if let Some(lf) = total.factors().iter().find(|lf| lf.e < -1) {
        return Err(EngineError::HigherOrderPole { order: -lf.e, at: lf.a });
    }
    Ok(())
}

/// The residue term of a composition, or `None` without a pole at z1 = z2.
fn residue(c: &Composition) -> Option<VOTerm> {
    let (scalar, zpow) = c.prefactor().diagonal_residue()?;
    let term = c.nord.collapse(zpow);
    let s = &term.scalar * &scalar;
    Some(term.with_scalar(s))
}

/// Li's r-th product `a(z)_r b(z)` for one-variable operators.
pub fn rth_product(a: &VOTerm, b: &VOTerm, r: i64) -> Result<OperatorSum, EngineError> {
    if r < 0 {
        return Err(EngineError::NegativeR(r));
    }
    if a.num_vars() != 1 {
        return Err(EngineError::NotSingleVariable(a.num_vars()));
    }
    if b.num_vars() != 1 {
        return Err(EngineError::NotSingleVariable(b.num_vars()));
    }
    let c = compose(a, b)?;
    check_simple_poles(&c)?;
    if r > 0 {
        return Ok(OperatorSum::zero());
    }
    Ok(residue(&c).map_or_else(OperatorSum::zero, OperatorSum::from_term))
}

/// `a(z q^t)_0 b(z)`.
pub fn zeroth_product_at(a: &VOTerm, t: Half, b: &VOTerm) -> Result<OperatorSum, EngineError> {
    rth_product(&a.shifted(t)?, b, 0)
}

/// Pole shifts of the composition of a (unshifted) with b.
pub fn candidate_shifts(a: &VOTerm, b: &VOTerm) -> Result<Vec<ShiftCandidate>, EngineError> {
    let c = compose(a, b)?;
    check_simple_poles(&c)?;
    let f = c.prefactor();
    let n = a.n();
    let ann = &a.part().annihilation;
    let mut out = Vec::new();
    for lf in f.factors().iter().filter(|lf| lf.e < 0) {
        let mut source = Vec::new();
        for atom in b.atoms.iter().flatten() {
            let piece = make_species(n, atom.species, atom.shift);
            let factors = contraction_factors(n, ann, &piece.part().creation)?;
            if factors.iter().any(|g| g.a == lf.a && g.e < 0) {
                source.push(*atom);
            }
        }
        out.push(ShiftCandidate { t: lf.a, order: -lf.e, source });
    }
    Ok(out)
}

/// The weight factor `z^-(p+1) q^(t - t(p+1))` of the bullet sum at shift t.
fn bullet_weight(t: Half, p: Rat) -> Result<(Rat, QScalar), EngineError> {
    let p1 = p + Rat::from_integer(1);
    let xexp = Rat::from_integer(t.twice()) * (Rat::from_integer(1) - p1);
    if !xexp.is_integer() {
        return Err(EngineError::NonIntegralWeightExponent(xexp));
    }
    Ok((-p1, QScalar::x_pow(xexp.to_integer())))
}

/// The bullet product of two operators.
pub fn bullet(a: &VOTerm, b: &VOTerm) -> Result<OperatorSum, EngineError> {
    let p = pairing(&a.wt(), &b.wt());
    let mut out = OperatorSum::zero();
    for cand in candidate_shifts(a, b)? {
        let z0 = zeroth_product_at(a, cand.t, b)?;
        if z0.is_zero() {
            continue;
        }
        let (zshift, scalar) = bullet_weight(cand.t, p)?;
        for mut term in z0.terms() {
            term.shape.parts[0].zexp += zshift;
            term.scalar = &term.scalar * &scalar;
            out.push(term);
        }
    }
    Ok(out)
}

/// Bilinear extension of [`bullet`].
pub fn bullet_sum(a: &OperatorSum, b: &OperatorSum) -> Result<OperatorSum, EngineError> {
    let mut out = OperatorSum::zero();
    for ta in a.terms() {
        for tb in b.terms() {
            out = out.add(&bullet(&ta, &tb)?);
        }
    }
    Ok(out)
}

/// Left bullet action of a single operator on a sum.
pub fn bullet_on(a: &VOTerm, b: &OperatorSum) -> Result<OperatorSum, EngineError> {
    bullet_sum(&OperatorSum::from_term(a.clone()), b)
}

/// Outcome of scanning `a(z q^t)_0 b(z)` over a window of shifts.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ShiftScan {
    pub candidates: Vec<Half>,
    /// Shifts with a nonzero zeroth product.
    pub nonzero: Vec<Half>,
    /// Nonzero shifts that were not predicted by [`candidate_shifts`].
    pub off_candidate: Vec<Half>,
}

/// Evaluates the zeroth product at every t in `[lo, hi] ∩ ½Z`.
pub fn scan_shifts(a: &VOTerm, b: &VOTerm, lo: Half, hi: Half) -> Result<ShiftScan, EngineError> {
    let candidates: Vec<Half> = candidate_shifts(a, b)?.into_iter().map(|c| c.t).collect();
    let ts: Vec<Half> = Half::range(lo, hi).collect();
    let results: Vec<Result<(Half, bool), EngineError>> =
        ts.par_iter().map(|&t| zeroth_product_at(a, t, b).map(|s| (t, !s.is_zero()))).collect();
    let mut scan = ShiftScan { candidates, ..ShiftScan::default() };
    for r in results {
        let (t, nz) = r?;
        if nz {
            scan.nonzero.push(t);
            if !scan.candidates.contains(&t) {
                scan.off_candidate.push(t);
            }
        }
    }
    Ok(scan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeVector;
    use crate::scalarfield::FactoredPrefactor;
    use crate::voperator::{make_fj, make_koyama, FjKind};
    use num_rational::BigRational;
    use num_traits::One;

    fn h(t: i64) -> Half {
        Half::from_twice(t)
    }

    fn xm(n: usize, j: usize) -> VOTerm {
        make_fj(n, FjKind::XMinus, j, Half::ZERO)
    }

    fn single(s: &OperatorSum) -> VOTerm {
        s.single().expect("single term")
    }

    #[test]
    fn x_minus_on_koyama_only_at_shift_one() {
        for n in 1..=3 {
            for i in 1..=n {
                let y = make_koyama(n, i, Half::ZERO);
                for j in 1..=n {
                    let scan = scan_shifts(&xm(n, j), &y, h(-12), h(12)).unwrap();
                    assert!(scan.off_candidate.is_empty());
                    let expect = if i == j { vec![Half::from_int(1)] } else { vec![] };
                    assert_eq!(scan.nonzero, expect, "n={n} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn higher_products_and_errors() {
        let y = make_koyama(2, 1, Half::ZERO);
        let a = xm(2, 1).shifted(Half::from_int(1)).unwrap();
        assert!(!rth_product(&a, &y, 0).unwrap().is_zero());
        assert!(rth_product(&a, &y, 1).unwrap().is_zero());
        assert_eq!(rth_product(&a, &y, -1), Err(EngineError::NegativeR(-1)));
    }

    #[test]
    fn phi_products_vanish() {
        let n = 2;
        let y = make_koyama(n, 1, Half::ZERO);
        let b = single(&bullet(&xm(n, 1), &y).unwrap());
        for j in 1..=n {
            let phi = make_fj(n, FjKind::Phi, j, Half::ZERO);
            for target in [&y, &b] {
                assert!(candidate_shifts(&phi, target).unwrap().is_empty());
                let scan = scan_shifts(&phi, target, h(-12), h(12)).unwrap();
                assert!(scan.nonzero.is_empty());
                assert!(bullet(&phi, target).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn shift_consequences() {
        let n = 2;
        let y = make_koyama(n, 1, Half::ZERO);
        let b1 = single(&bullet(&xm(n, 1), &y).unwrap());
        let ts = |a: &VOTerm, b: &VOTerm| -> Vec<Half> { candidate_shifts(a, b).unwrap().into_iter().map(|c| c.t).collect() };
        assert_eq!(ts(&xm(n, 1), &y), vec![Half::from_int(1)]);
        assert_eq!(ts(&make_fj(n, FjKind::Psi, 1, Half::ZERO), &y), vec![h(3)]);
        assert!(ts(&xm(n, 2), &b1).contains(&Half::from_int(2)));
        let plus = make_fj(n, FjKind::XPlus, 1, Half::ZERO);
        assert!(ts(&plus, &b1).contains(&Half::from_int(2)));
        let scan = scan_shifts(&plus, &b1, h(-12), h(12)).unwrap();
        assert_eq!(scan.nonzero, vec![Half::from_int(2)]);
        let src = &candidate_shifts(&xm(n, 1), &y).unwrap()[0].source;
        assert_eq!(src.len(), 1);
    }

    #[test]
    fn psi_two_kills_koyama_one() {
        let n = 2;
        let y = make_koyama(n, 1, Half::ZERO);
        assert!(bullet(&make_fj(n, FjKind::Psi, 2, Half::ZERO), &y).unwrap().is_zero());
        let xb = bullet(&xm(n, 1), &y).unwrap();
        assert_eq!(xb.len(), 1);
        assert_eq!(single(&xb).wt(), &LatticeVector::lambda(n, 1) - &LatticeVector::alpha(n, 1));
    }

    #[test]
    fn drinfeld_relation_on_koyama() {
        let n = 1;
        let y = OperatorSum::from_term(make_koyama(n, 1, Half::ZERO));
        let plus = make_fj(n, FjKind::XPlus, 1, Half::ZERO);
        let minus = xm(n, 1);
        let psi = make_fj(n, FjKind::Psi, 1, Half::ZERO);
        let phi = make_fj(n, FjKind::Phi, 1, Half::ZERO);
        let lhs = bullet_on(&plus, &bullet_on(&minus, &y).unwrap())
            .unwrap()
            .sub(&bullet_on(&minus, &bullet_on(&plus, &y).unwrap()).unwrap());
        let rhs = bullet_on(&psi, &y).unwrap().sub(&bullet_on(&phi, &y).unwrap());
        let c = (&QScalar::q_pow(Half::from_int(1)) - &QScalar::q_pow(Half::from_int(-1))).inv();
        assert!(!lhs.is_zero());
        assert_eq!(lhs, rhs.scale(&c));
    }

    /// Laurent coefficients in z0 of `ι(p(1+z0, 1)^-1) (p F)(1+z0, 1)` from
    /// `z0^lo` up to `z0^(lo+len-1)`, expanding every factor directly.
    fn iota_expansion(f: &FactoredPrefactor, len: usize) -> (i64, Vec<QScalar>) {
        let mut lo = 0i64;
        let mut series = vec![QScalar::zero(); len];
        series[0] = f.constant.clone();
        let mul = |a: &[QScalar], b: &[QScalar]| -> Vec<QScalar> {
            let mut out = vec![QScalar::zero(); a.len()];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate().take(a.len() - i) {
                    out[i + j] = &out[i + j] + &(x * y);
                }
            }
            out
        };
        // (1 + z0)^s for rational s
        let power = |s: Rat, scale: &QScalar| -> Vec<QScalar> {
            let mut v = Vec::with_capacity(len);
            let mut c = BigRational::one();
            let sb = BigRational::new(s.numer().to_owned().into(), s.denom().to_owned().into());
            for k in 0..len {
                v.push(&QScalar::from_rational(&c) * &scale.pow(k as i64));
                let kb = BigRational::from_integer((k as i64).into());
                c = c * (&sb - &kb) / (kb + BigRational::one());
            }
            v
        };
        series = mul(&series, &power(f.z1exp, &QScalar::one()));
        for lf in f.factors() {
            if lf.a == Half::ZERO {
                lo += lf.e as i64;
                continue;
            }
            // (1 - q^a + z0)^e = (1 - q^a)^e (1 + z0/(1 - q^a))^e
            let d = &QScalar::one() - &QScalar::q_pow(lf.a);
            let pre = d.pow(lf.e as i64);
            let p = power(Rat::from_integer(lf.e as i64), &d.inv());
            series = mul(&series, &p).into_iter().map(|x| &x * &pre).collect();
        }
        (lo, series)
    }

    #[test]
    fn iota_expansion_agrees_with_residue_rule() {
        let n = 2;
        let y = make_koyama(n, 1, Half::ZERO);
        let b1 = single(&bullet(&xm(n, 1), &y).unwrap());
        let cases = [
            (xm(n, 1).shifted(Half::from_int(1)).unwrap(), y.clone()),
            (make_fj(n, FjKind::Psi, 1, h(3)), y.clone()),
            (xm(n, 2).shifted(Half::from_int(2)).unwrap(), b1.clone()),
            (make_fj(n, FjKind::XPlus, 1, Half::from_int(2)), b1.clone()),
            (xm(n, 1), b1),
        ];
        for (a, b) in &cases {
            let c = compose(a, b).unwrap();
            let f = c.prefactor();
            let (lo, series) = iota_expansion(&f, 9);
            assert!(lo >= -1, "only simple poles expected");
            let coeff = |k: i64| -> QScalar {
                let idx = k - lo;
                if idx < 0 {
                    QScalar::zero()
                } else {
                    series[idx as usize].clone()
                }
            };
            assert!(coeff(-2).is_zero());
            match f.diagonal_residue() {
                Some((s, _)) => assert_eq!(coeff(-1), s),
                None => assert!(coeff(-1).is_zero()),
            }
        }
    }

    #[test]
    fn bullet_is_bilinear_and_adds_weights() {
        let n = 2;
        let y = make_koyama(n, 1, Half::ZERO);
        let two = QScalar::from_int(2);
        let c = QScalar::q_pow(h(1));
        let a = OperatorSum::from_term(xm(n, 1)).scale(&c);
        let b = OperatorSum::from_term(y.clone()).scale(&two);
        let lhs = bullet_sum(&a, &b).unwrap();
        let rhs = bullet(&xm(n, 1), &y).unwrap().scale(&(&c * &two));
        assert_eq!(lhs, rhs);
        let t = single(&lhs);
        assert_eq!(t.wt(), &xm(n, 1).wt() + &y.wt());
    }
}
