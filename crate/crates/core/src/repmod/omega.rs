//! The isomorphism Ω: L(λ_i)_z → ⟨Y_i(z)⟩ on capped bases, with a report
//! comparing the generator actions on C_i with the bullet actions on B_i.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::basis::{enumerate_ybasis, BasisLabel, Head, YBasis};
use super::fdmodule::fd_module;
use super::uqz::{build_lz_basis, build_uqz, CLabel, Caps, LzBasis, Uqz};
use super::RepError;
use crate::products::bullet_on;
use crate::scalarfield::{Half, QScalar};
use crate::voperator::{FjKind, OperatorSum};

/// Tie-breaking rule for condition (2) across t(·) patterns of equal weight.
pub const TIE_BREAK: &str = "classes are keyed by (weight, t); within a class both sides are sorted by o(·) \
lexicographically and paired in order; classes are listed by weight, then t, then o";

/// One generator applied to one capped element on both sides.
#[derive(Clone, Debug)]
pub struct ActionComparison {
    pub c: CLabel,
    pub generator: Head,
    pub module: Option<(CLabel, QScalar)>,
    pub bullet: Option<(BasisLabel, QScalar)>,
    /// Whether the two results are both zero or both nonzero.
    pub pattern_match: bool,
    /// `Ω(g·c) = x·Ω(c)` up to scalars; `None` when the image leaves the caps.
    pub image_match: Option<bool>,
    /// Module scalar divided by bullet scalar, when both are nonzero.
    pub scalar_ratio: Option<QScalar>,
}

/// One commutative square of the kind drawn for f_j c ≠ 0.
#[derive(Clone, Debug, Serialize)]
pub struct DiagramCheck {
    pub side: &'static str,
    pub element: String,
    pub j: usize,
    pub identity: &'static str,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct OmegaReport {
    pub n: usize,
    pub i: usize,
    pub caps: Caps,
    pub lz: LzBasis,
    pub ybasis: YBasis,
    pub pairs: Vec<(CLabel, BasisLabel)>,
    /// `u_l - u_m = -(n+1)(t_l - t_m)` for factors with equal j, per pair.
    pub dictionary_ok: bool,
    pub comparisons: Vec<ActionComparison>,
    pub diagrams: Vec<DiagramCheck>,
}

impl OmegaReport {
    pub fn image(&self, c: &CLabel) -> Option<&BasisLabel> {
        self.pairs.iter().find(|(x, _)| x == c).map(|(_, b)| b)
    }

    pub fn structure_ok(&self) -> bool {
        self.dictionary_ok
            && self.comparisons.iter().all(|a| a.pattern_match && a.image_match != Some(false))
            && self.diagrams.iter().all(|d| d.pass)
    }

    pub fn scalar_agreements(&self) -> usize {
        self.comparisons.iter().filter(|a| a.scalar_ratio.as_ref().is_some_and(QScalar::is_one)).count()
    }

    pub fn to_json(&self) -> OmegaReportJson {
        let cname = |c: &CLabel| format!("{}", CLabelDisplay(self, c));
        OmegaReportJson {
            schema: "qvertex.omega.v1",
            n: self.n,
            i: self.i,
            caps: self.caps,
            tie_break: TIE_BREAK,
            structure_ok: self.structure_ok(),
            dictionary_ok: self.dictionary_ok,
            scalar_agreements: self.scalar_agreements(),
            pairs: self
                .pairs
                .iter()
                .map(|(c, b)| OmegaPairJson { c: cname(c), b: render_blabel(self, b) })
                .collect(),
            actions: self
                .comparisons
                .iter()
                .map(|a| ActionJson {
                    c: cname(&a.c),
                    generator: module_name(a.generator),
                    head: a.generator.to_string(),
                    module: a.module.as_ref().map(|(c, s)| format!("{} * {}", s.render(), cname(c))),
                    bullet: a.bullet.as_ref().map(|(b, s)| format!("{} * {}", s.render(), render_blabel(self, b))),
                    pattern_match: a.pattern_match,
                    image_match: a.image_match,
                    scalar_ratio: a.scalar_ratio.as_ref().map(QScalar::render),
                })
                .collect(),
            diagrams: self.diagrams.clone(),
        }
    }

    pub fn render(&self) -> String {
        let j = self.to_json();
        let mut s = format!(
            "omega n={} i={} factors<={} path<={}\ntie-break: {}\n",
            self.n, self.i, self.caps.factors, self.caps.path_max, TIE_BREAK
        );
        for p in &j.pairs {
            s.push_str(&format!("  {}  |->  {}\n", p.c, p.b));
        }
        for a in &j.actions {
            let m = a.module.as_deref().unwrap_or("0");
            let b = a.bullet.as_deref().unwrap_or("0");
            let img = match (a.image_match, &a.module) {
                (Some(true), _) => "image ok",
                (Some(false), _) => "IMAGE MISMATCH",
                (None, None) => "zero",
                (None, Some(_)) => "beyond caps",
            };
            let ratio = a.scalar_ratio.as_deref().map_or(String::new(), |r| format!(", ratio {r}"));
            let pat = if a.pattern_match { "pattern ok" } else { "PATTERN MISMATCH" };
            s.push_str(&format!("  {} {}: {} | {} {}: {} [{pat}, {img}{ratio}]\n", a.generator, a.c, m, a.head, a.c, b));
        }
        let passed = self.diagrams.iter().filter(|d| d.pass).count();
        s.push_str(&format!("diagrams: {passed}/{} commute\n", self.diagrams.len()));
        s.push_str(&format!(
            "scalars: {}/{} nonzero actions agree exactly\n",
            self.scalar_agreements(),
            self.comparisons.iter().filter(|a| a.scalar_ratio.is_some()).count()
        ));
        s.push_str(&format!("structure: {}\n", if self.structure_ok() { "PASS" } else { "FAIL" }));
        s
    }
}

struct CLabelDisplay<'a>(&'a OmegaReport, &'a CLabel);

impl std::fmt::Display for CLabelDisplay<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let e = self.0.lz.find(self.1);
        let path = e.map(|e| e.fpath.clone()).unwrap_or_default();
        for j in path.iter().rev() {
            write!(f, "f{j} ")?;
        }
        write!(f, "v")?;
        for x in self.1.canonical() {
            write!(f, " e({},z{})", x.u, x.j)?;
        }
        Ok(())
    }
}

fn render_blabel(r: &OmegaReport, b: &BasisLabel) -> String {
    match r.ybasis.find(b) {
        Some(e) => e.render(r.i),
        None => {
            let mut s = format!("wt {:?}", b.weight.coords());
            for p in &b.psi {
                s.push_str(&format!(" psi[{},{}]", p.j, p.t));
            }
            s
        }
    }
}

/// Name of the module generator matching a head.
pub fn module_name(h: Head) -> String {
    match h.kind {
        FjKind::XPlus => format!("ebar{}", h.j),
        FjKind::XMinus => format!("f{}", h.j),
        FjKind::Psi => format!("kbar{}", h.j),
        FjKind::Phi => format!("phi{}", h.j),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaPairJson {
    pub c: String,
    pub b: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ActionJson {
    pub c: String,
    pub generator: String,
    pub head: String,
    pub module: Option<String>,
    pub bullet: Option<String>,
    pub pattern_match: bool,
    pub image_match: Option<bool>,
    pub scalar_ratio: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaReportJson {
    pub schema: &'static str,
    pub n: usize,
    pub i: usize,
    pub caps: Caps,
    pub tie_break: &'static str,
    pub structure_ok: bool,
    pub dictionary_ok: bool,
    pub scalar_agreements: usize,
    pub pairs: Vec<OmegaPairJson>,
    pub actions: Vec<ActionJson>,
    pub diagrams: Vec<DiagramCheck>,
}

type ClassKey = (Vec<i64>, Vec<usize>);

fn b_type(b: &BasisLabel) -> Vec<usize> {
    b.psi.iter().map(|p| p.j).collect()
}

fn b_order(b: &BasisLabel) -> Vec<Half> {
    b.psi.iter().map(|p| p.t).collect()
}

/// Pairs C_i with B_i class by class: conditions (1) and (2).
fn match_bases(lz: &LzBasis, yb: &YBasis, caps: Caps) -> Result<Vec<(CLabel, BasisLabel)>, RepError> {
    let mut cs: BTreeMap<ClassKey, Vec<CLabel>> = BTreeMap::new();
    for e in &lz.elements {
        let key = (e.weight.coords().to_vec(), e.label.canonical().iter().map(|x| x.j).collect());
        cs.entry(key).or_default().push(e.label.clone());
    }
    let mut bs: BTreeMap<ClassKey, Vec<BasisLabel>> = BTreeMap::new();
    for e in &yb.elements {
        let js = b_type(&e.label);
        if caps.admits(e.fpath.len(), &js) {
            bs.entry((e.label.weight.coords().to_vec(), js)).or_default().push(e.label.clone());
        }
    }
    if cs.keys().ne(bs.keys()) {
        return Err(RepError::StructureMismatch(format!(
            "classes (weight, t) differ: module {:?} vs bullet {:?}",
            cs.keys().collect::<Vec<_>>(),
            bs.keys().collect::<Vec<_>>()
        )));
    }
    let mut pairs = Vec::new();
    for (key, mut cv) in cs {
        let mut bv = bs.remove(&key).unwrap_or_default();
        if cv.len() != bv.len() {
            return Err(RepError::StructureMismatch(format!(
                "class {key:?} has {} module and {} bullet elements",
                cv.len(),
                bv.len()
            )));
        }
        cv.sort_by_key(CLabel::order_key);
        bv.sort_by_key(b_order);
        pairs.extend(cv.into_iter().zip(bv));
    }
    Ok(pairs)
}

fn dictionary_holds(n: usize, c: &CLabel, b: &BasisLabel) -> bool {
    let cf = c.canonical();
    cf.len() == b.psi.len()
        && (0..cf.len()).all(|l| {
            (0..cf.len()).all(|m| {
                cf[l].j != cf[m].j
                    || (cf[l].u - cf[m].u) * 2 == -(n as i64 + 1) * (b.psi[l].t.twice() - b.psi[m].t.twice())
            })
        })
}

fn qq() -> QScalar {
    &QScalar::q_int_pow(1) - &QScalar::q_int_pow(-1)
}

fn module_diagrams(uqz: &Uqz, c: &CLabel, name: &str) -> Vec<DiagramCheck> {
    let mut out = Vec::new();
    let h = qq().inv();
    for j in 1..=uqz.n() {
        let f = Head { kind: FjKind::XMinus, j };
        let e = Head { kind: FjKind::XPlus, j };
        let k = Head { kind: FjKind::Psi, j };
        let v = uqz.vector(c);
        let fv = uqz.apply(f, &v);
        if fv.is_zero() {
            continue;
        }
        let hv = uqz.apply(k, &v).scale(&h);
        let lhs = uqz.apply(f, &hv);
        let rhs = uqz.apply(k, &fv).scale(&(-h.clone()));
        out.push(DiagramCheck { side: "module", element: name.to_string(), j, identity: "f(hbar c) = -hbar(f c)", pass: lhs == rhs });
        let efv = uqz.apply(e, &fv);
        out.push(DiagramCheck { side: "module", element: name.to_string(), j, identity: "ebar(f c) = hbar c", pass: efv == hv });
    }
    out
}

fn bullet_diagrams(yb: &YBasis, b: &BasisLabel, name: &str) -> Result<Vec<DiagramCheck>, RepError> {
    let n = yb.n;
    let Some(el) = yb.find(b) else { return Ok(Vec::new()) };
    let bs = OperatorSum::from_term(el.term.clone());
    let h = qq().inv();
    let mut out = Vec::new();
    for j in 1..=n {
        let xm = Head { kind: FjKind::XMinus, j }.term(n);
        let xp = Head { kind: FjKind::XPlus, j }.term(n);
        let psi = Head { kind: FjKind::Psi, j }.term(n);
        let fb = bullet_on(&xm, &bs)?;
        if fb.is_zero() {
            continue;
        }
        let hb = bullet_on(&psi, &bs)?.scale(&h);
        let lhs = bullet_on(&xm, &hb)?;
        let rhs = bullet_on(&psi, &fb)?.scale(&(-h.clone()));
        out.push(DiagramCheck { side: "bullet", element: name.to_string(), j, identity: "x- . (psi/(q-q^-1) . b) = -psi/(q-q^-1) . (x- . b)", pass: lhs == rhs });
        let efb = bullet_on(&xp, &fb)?;
        out.push(DiagramCheck { side: "bullet", element: name.to_string(), j, identity: "x+ . (x- . b) = psi/(q-q^-1) . b", pass: efb == hb });
    }
    Ok(out)
}

/// Builds Ω on the capped bases and compares the two actions.
pub fn build_omega(n: usize, i: usize, caps: Caps, zorder: u32) -> Result<OmegaReport, RepError> {
    let uqz = build_uqz(fd_module(n, i)?, zorder);
    let lz = build_lz_basis(&uqz, caps);
    let ybasis = enumerate_ybasis(n, i, caps.factors)?;
    let pairs = match_bases(&lz, &ybasis, caps)?;
    let dictionary_ok = pairs.iter().all(|(c, b)| dictionary_holds(n, c, b));
    let omega: BTreeMap<&CLabel, &BasisLabel> = pairs.iter().map(|(c, b)| (c, b)).collect();
    let bullet_actions: BTreeMap<(&BasisLabel, Head), &Option<(BasisLabel, QScalar)>> =
        ybasis.actions.iter().map(|a| ((&a.from, a.head), &a.to)).collect();
    let mut comparisons = Vec::new();
    for (c, b) in &pairs {
        for h in Head::module_heads(n) {
            let module = uqz.act(h, c);
            let bullet = bullet_actions
                .get(&(b, h))
                .map(|x| (*x).clone())
                .ok_or_else(|| RepError::StructureMismatch(format!("no bullet action {h} recorded on {b:?}")))?;
            let pattern_match = module.is_some() == bullet.is_some();
            if !pattern_match {
                return Err(RepError::StructureMismatch(format!(
                    "{} on {c} is {} but {h} on its image is {}",
                    module_name(h),
                    if module.is_some() { "nonzero" } else { "zero" },
                    if bullet.is_some() { "nonzero" } else { "zero" }
                )));
            }
            let (image_match, scalar_ratio) = match (&module, &bullet) {
                (Some((c2, s1)), Some((b2, s2))) => {
                    let image = omega.get(c2).map(|x| *x == b2);
                    (image, Some(s1 / s2))
                }
                _ => (None, None),
            };
            comparisons.push(ActionComparison { c: c.clone(), generator: h, module, bullet, pattern_match, image_match, scalar_ratio });
        }
    }
    let mut report = OmegaReport { n, i, caps, lz, ybasis, pairs, dictionary_ok, comparisons, diagrams: Vec::new() };
    let names: Vec<(String, String)> = report
        .pairs
        .iter()
        .map(|(c, b)| (CLabelDisplay(&report, c).to_string(), render_blabel(&report, b)))
        .collect();
    let mut diagrams = Vec::new();
    for ((c, _), (cn, _)) in report.pairs.iter().zip(&names) {
        diagrams.extend(module_diagrams(&uqz, c, cn));
    }
    let bullet_side: Vec<Result<Vec<DiagramCheck>, RepError>> = report
        .pairs
        .par_iter()
        .zip(names.par_iter())
        .map(|((_, b), (_, bn))| bullet_diagrams(&report.ybasis, b, bn))
        .collect();
    for r in bullet_side {
        diagrams.extend(r?);
    }
    report.diagrams = diagrams;
    Ok(report)
}
