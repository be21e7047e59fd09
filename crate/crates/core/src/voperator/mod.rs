//! Normal-ordered generalized vertex operators and their composition.
//!
//! A [`VOTerm`] in variables z_1..z_m is
//!
//! ```text
//! scalar · Π_v E_-(z_v) E_+(z_v) ⊗ e^γ · x^((κ, β)) · (-1)^(s (λ_n, β)) · Π_v z_v^((μ_v, β) + c_v)
//! ```
//!
//! acting on a state of weight β, with x = q^(1/2). The exponentials are
//! recorded by their *content*: for every mode k a Laurent polynomial P_k(u)
//! such that the coefficient of a_k(-r) z^r (creation) or a_k(r) z^-r
//! (annihilation) equals `P_k(q^r) / [(n+1) r]`.
//!
//! Composition contracts the annihilation content of the left operator with
//! the creation content of the right one. With `D(u) = (u^(n+1) - u^-(n+1))^2`
//! one has `r c_r = N(u)/D(u)` at `u = q^r`, where
//! `N = Σ_kl P_k Q_l (u^(a_kl) - u^-(a_kl))(u - u^-1)`. When the quotient is a
//! Laurent polynomial `-Σ e_a u^a`, the contraction is `Π (1 - q^a z2/z1)^(e_a)`.

mod laurent;
mod relations;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::lattice::{cartan_entry, group_mul, pairing, to_gen_coords, GroupWord, LatticeVector};
use crate::scalarfield::{FactoredPrefactor, Half, LinearFactor, QScalar, QScalarJson, Rat};

pub use laurent::Laurent;
pub use relations::{relation_table, verify_relations, IndexCondition, Operand, Relation, RelationCheck, RelationForm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("contraction is not a finite product of q-shifted linear factors: {0}")]
    ContractionUnrecognized(String),
    #[error("sign operator meets non-integral pairing {0}")]
    NonIntegralSignExponent(Rat),
    #[error("weight operator meets non-integral exponent {0}")]
    NonIntegralWeightExponent(Rat),
    #[error("shift {shift} of an operator with z-exponent {zexp} is not a half-integral q-power")]
    NonIntegralShift { shift: Half, zexp: Rat },
    #[error("pole of order {order} at z1 = q^({at}) z2; only simple poles are supported")]
    HigherOrderPole { order: i32, at: Half },
    #[error("r-th products with negative r = {0} are not supported")]
    NegativeR(i64),
    #[error("operator acts in {0} variables where one was expected")]
    NotSingleVariable(usize),
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
}

/// Frenkel–Jing and Koyama operator species.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Species {
    XPlus(usize),
    XMinus(usize),
    Psi(usize),
    Phi(usize),
    Koyama(usize),
}

impl Species {
    pub fn index(self) -> usize {
        match self {
            Species::XPlus(j) | Species::XMinus(j) | Species::Psi(j) | Species::Phi(j) | Species::Koyama(j) => j,
        }
    }

    pub fn name(self) -> String {
        match self {
            Species::XPlus(j) => format!("x+[{j}]"),
            Species::XMinus(j) => format!("x-[{j}]"),
            Species::Psi(j) => format!("psi[{j}]"),
            Species::Phi(j) => format!("phi[{j}]"),
            Species::Koyama(i) => format!("Y[{i}]"),
        }
    }
}

/// The kinds accepted by [`make_fj`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FjKind {
    XPlus,
    XMinus,
    Psi,
    Phi,
}

/// A provenance label: an operator species at a q-shift of its variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Atom {
    pub species: Species,
    pub shift: Half,
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shift == Half::ZERO {
            write!(f, "{}", self.species.name())
        } else {
            let name = self.species.name();
            write!(f, "{},{}]", &name[..name.len() - 1], self.shift)
        }
    }
}

/// Per-mode content of one exponential block.
pub type Content = Vec<Laurent>;

fn content_zero(n: usize) -> Content {
    vec![Laurent::zero(); n]
}

fn content_add(a: &Content, b: &Content) -> Content {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

fn content_shift(a: &Content, t: Half) -> Content {
    a.iter().map(|x| x.shift(t)).collect()
}

fn content_is_zero(a: &Content) -> bool {
    a.iter().all(Laurent::is_zero)
}

/// The operator data attached to one variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarPart {
    pub creation: Content,
    pub annihilation: Content,
    /// μ in the factor z^((μ, β)).
    pub zpartial: LatticeVector,
    /// Constant z-exponent.
    pub zexp: Rat,
}

/// Everything except the scalar: two terms with equal shapes are merged.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shape {
    pub n: usize,
    /// Exponent of a formal primitive 2(n+1)-th root of unity.
    pub tag: i64,
    pub group: GroupWord,
    /// κ in the factor x^((κ, β)); K_j contributes 2α_j.
    pub kweight: LatticeVector,
    /// s in the factor (-1)^(s (λ_n, β)).
    pub sign_op: i64,
    pub parts: Vec<VarPart>,
}

/// A normal-ordered vertex operator with a scalar and provenance labels.
#[derive(Clone, Debug)]
pub struct VOTerm {
    pub shape: Shape,
    pub scalar: QScalar,
    /// Per-variable provenance; ignored by equality.
    pub atoms: Vec<Vec<Atom>>,
}

impl PartialEq for VOTerm {
    fn eq(&self, o: &Self) -> bool {
        self.shape == o.shape && self.scalar == o.scalar
    }
}

impl Eq for VOTerm {}

fn s_plus(n: usize) -> Laurent {
    Laurent::sym(n as i64 + 1)
}

/// Frenkel–Jing operator x_j^±, ψ_j or φ_j at `z q^t`.
pub fn make_fj(n: usize, kind: FjKind, j: usize, t: Half) -> VOTerm {
    assert!((1..=n).contains(&j), "index {j} out of range 1..={n}");
    let big = s_plus(n);
    let mut creation = content_zero(n);
    let mut annihilation = content_zero(n);
    let alpha = LatticeVector::alpha(n, j);
    let tt = t.twice();
    let (group, zpartial, kweight, species) = match kind {
        FjKind::XMinus => {
            creation[j - 1] = Laurent::mono(1 + tt, -1).mul(&big);
            annihilation[j - 1] = Laurent::mono(1 - tt, 1).mul(&big);
            (to_gen_coords(&-&alpha), -&alpha, alpha.scale(-tt), Species::XMinus(j))
        }
        FjKind::XPlus => {
            creation[j - 1] = Laurent::mono(-1 + tt, 1).mul(&big);
            annihilation[j - 1] = Laurent::mono(-1 - tt, -1).mul(&big);
            (to_gen_coords(&alpha), alpha.clone(), alpha.scale(tt), Species::XPlus(j))
        }
        FjKind::Psi => {
            annihilation[j - 1] = Laurent::mono(2 - tt, 1).add(&Laurent::mono(-2 - tt, -1)).mul(&big);
            (GroupWord::identity(n), LatticeVector::zero(n), alpha.scale(2), Species::Psi(j))
        }
        FjKind::Phi => {
            creation[j - 1] = Laurent::mono(2 + tt, -1).add(&Laurent::mono(-2 + tt, 1)).mul(&big);
            (GroupWord::identity(n), LatticeVector::zero(n), alpha.scale(-2), Species::Phi(j))
        }
    };
    VOTerm {
        shape: Shape {
            n,
            tag: 0,
            group,
            kweight,
            sign_op: 0,
            parts: vec![VarPart { creation, annihilation, zpartial, zexp: Rat::zero() }],
        },
        scalar: QScalar::one(),
        atoms: vec![vec![Atom { species, shift: t }]],
    }
}

/// Koyama operator Y_i at `z q^t`.
pub fn make_koyama(n: usize, i: usize, t: Half) -> VOTerm {
    assert!((1..=n).contains(&i), "index {i} out of range 1..={n}");
    let tt = t.twice();
    let mut creation = content_zero(n);
    let mut annihilation = content_zero(n);
    for k in 1..=n {
        // m_i^(k)(r) [(n+1) r] [r] = [a r][b r]
        let (a, b) = if k <= i { (k, n - i + 1) } else { (i, n - k + 1) };
        let s = Laurent::sym(a as i64).mul(&Laurent::sym(b as i64));
        creation[k - 1] = Laurent::mono(1 + tt, 1).mul(&s);
        annihilation[k - 1] = Laurent::mono(1 - tt, -1).mul(&s);
    }
    let lambda = LatticeVector::lambda(n, i);
    VOTerm {
        shape: Shape {
            n,
            tag: 0,
            group: to_gen_coords(&lambda),
            kweight: lambda.scale(tt),
            sign_op: if i == n { 0 } else { i as i64 },
            parts: vec![VarPart { creation, annihilation, zpartial: lambda, zexp: Rat::zero() }],
        },
        scalar: QScalar::one(),
        atoms: vec![vec![Atom { species: Species::Koyama(i), shift: t }]],
    }
}

/// Builds any species.
pub fn make_species(n: usize, s: Species, t: Half) -> VOTerm {
    match s {
        Species::XPlus(j) => make_fj(n, FjKind::XPlus, j, t),
        Species::XMinus(j) => make_fj(n, FjKind::XMinus, j, t),
        Species::Psi(j) => make_fj(n, FjKind::Psi, j, t),
        Species::Phi(j) => make_fj(n, FjKind::Phi, j, t),
        Species::Koyama(i) => make_koyama(n, i, t),
    }
}

/// The identity operator (Y_0 = 1).
pub fn identity_term(n: usize) -> VOTerm {
    VOTerm {
        shape: Shape {
            n,
            tag: 0,
            group: GroupWord::identity(n),
            kweight: LatticeVector::zero(n),
            sign_op: 0,
            parts: vec![VarPart {
                creation: content_zero(n),
                annihilation: content_zero(n),
                zpartial: LatticeVector::zero(n),
                zexp: Rat::zero(),
            }],
        },
        scalar: QScalar::one(),
        atoms: vec![Vec::new()],
    }
}

/// `(u^(n+1) - u^-(n+1))^2`.
fn contraction_denominator(n: usize) -> Laurent {
    let d = Laurent::antisym(n as i64 + 1);
    d.mul(&d)
}

/// Contraction numerator N(u) (see the module docs).
pub fn contraction_numerator(ann: &Content, cre: &Content) -> Laurent {
    let mut total = Laurent::zero();
    let v = Laurent::antisym(1);
    for (k, p) in ann.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        for (l, qv) in cre.iter().enumerate() {
            let a = cartan_entry(k + 1, l + 1);
            if a == 0 || qv.is_zero() {
                continue;
            }
            total = total.add(&p.mul(qv).mul(&Laurent::antisym(a)).mul(&v));
        }
    }
    total
}

/// The contraction coefficients `c_1..c_N` computed directly from the mode
/// brackets, for use with [`crate::scalarfield::recognize_product`].
pub fn contraction_series(n: usize, ann: &Content, cre: &Content, terms: usize) -> Vec<QScalar> {
    (1..=terms as i64)
        .map(|r| {
            let denom = crate::scalarfield::qint((n as i64 + 1) * r);
            let bm = crate::heisenberg::bracket_matrix(n, r);
            let mut c = QScalar::zero();
            for (k, p) in ann.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                let pk = &p.eval(r) / &denom;
                for (l, qv) in cre.iter().enumerate() {
                    if qv.is_zero() || bm[k][l].is_zero() {
                        continue;
                    }
                    let ql = &qv.eval(r) / &denom;
                    c = &c + &(&(&pk * &ql) * &bm[k][l]);
                }
            }
            c
        })
        .collect()
}

/// Factored form of `exp(Σ c_r (z2/z1)^r)` as `z1^(-Σe) Π (z1 - q^a z2)^e`.
pub fn contraction_factors(n: usize, ann: &Content, cre: &Content) -> Result<Vec<LinearFactor>, EngineError> {
    let num = contraction_numerator(ann, cre);
    let quo = num.div_exact(&contraction_denominator(n)).ok_or_else(|| {
        EngineError::ContractionUnrecognized(format!("N(u) = {num} is not divisible by D(u)"))
    })?;
    Ok(quo.terms().map(|(k, c)| LinearFactor::new(Half::from_twice(k), -(c as i32))).collect())
}

/// Result of composing two operators.
#[derive(Clone, Debug)]
pub struct Composition {
    /// Factored contraction per pair (variable of the left operator, variable
    /// of the right operator), in the numbering of `nord`, including the
    /// z-power cross term.
    pub pairs: Vec<(usize, usize, FactoredPrefactor)>,
    /// Scalar cross terms from the weight and sign operators.
    pub cross: QScalar,
    /// Sign from reordering the group words into canonical form.
    pub cocycle: i8,
    /// The normal-ordered product with canonical group word.
    pub nord: VOTerm,
}

impl Composition {
    /// The prefactor F with `A(z1) B(z2) = F(z1, z2) nord(z1, z2)`.
    pub fn prefactor(&self) -> FactoredPrefactor {
        let mut f = self.relation_prefactor();
        if self.cocycle < 0 {
            f.constant = -f.constant;
        }
        f
    }

    /// The prefactor relative to the normal-ordered product that keeps the
    /// group part as the uncanonicalized product e^(γ_A) e^(γ_B).
    pub fn relation_prefactor(&self) -> FactoredPrefactor {
        let mut f = FactoredPrefactor::one();
        for (_, _, p) in &self.pairs {
            f = f.mul(p);
        }
        f.constant = &f.constant * &self.cross;
        f
    }
}

/// x^((κ, γ)) as a q-scalar.
fn weight_factor(kweight: &LatticeVector, gamma: &LatticeVector) -> Result<QScalar, EngineError> {
    let p = pairing(kweight, gamma);
    if !p.is_integer() {
        return Err(EngineError::NonIntegralWeightExponent(p));
    }
    Ok(QScalar::x_pow(p.to_integer()))
}

/// (-1)^(s (λ_n, γ)).
fn sign_factor(n: usize, s: i64, gamma: &LatticeVector) -> Result<i64, EngineError> {
    if s == 0 {
        return Ok(1);
    }
    let p = pairing(&LatticeVector::lambda(n, n), gamma) * Rat::from_integer(s);
    if !p.is_integer() {
        return Err(EngineError::NonIntegralSignExponent(p));
    }
    Ok(if p.to_integer().rem_euclid(2) == 0 { 1 } else { -1 })
}

/// Composes `A(z_1..z_a) B(z_(a+1)..z_(a+b))` into prefactor and normal order.
pub fn compose(a: &VOTerm, b: &VOTerm) -> Result<Composition, EngineError> {
    let n = a.shape.n;
    if n != b.shape.n {
        return Err(EngineError::RankMismatch(n, b.shape.n));
    }
    let gamma_b = b.shape.group.to_lattice();
    let offset = a.shape.parts.len();
    let mut pairs = Vec::new();
    for (ia, pa) in a.shape.parts.iter().enumerate() {
        let zcross = pairing(&pa.zpartial, &gamma_b);
        for (jb, pb) in b.shape.parts.iter().enumerate() {
            let factors = if content_is_zero(&pa.annihilation) || content_is_zero(&pb.creation) {
                Vec::new()
            } else {
                contraction_factors(n, &pa.annihilation, &pb.creation)?
            };
            let degree: i64 = factors.iter().map(|f| f.e as i64).sum();
            let z1exp = if jb == 0 { zcross } else { Rat::zero() } - Rat::from_integer(degree);
            pairs.push((ia, offset + jb, FactoredPrefactor::new(QScalar::one(), z1exp, Rat::zero(), &factors)));
        }
    }
    let mut cross = weight_factor(&a.shape.kweight, &gamma_b)?;
    if sign_factor(n, a.shape.sign_op, &gamma_b)? < 0 {
        cross = -cross;
    }
    let (cocycle, group) = group_mul(&a.shape.group, &b.shape.group);
    let mut parts = a.shape.parts.clone();
    parts.extend(b.shape.parts.iter().cloned());
    let mut atoms = a.atoms.clone();
    atoms.extend(b.atoms.iter().cloned());
    let nord = VOTerm {
        shape: Shape {
            n,
            tag: (a.shape.tag + b.shape.tag).rem_euclid(2 * (n as i64 + 1)),
            group,
            kweight: &a.shape.kweight + &b.shape.kweight,
            sign_op: a.shape.sign_op + b.shape.sign_op,
            parts,
        },
        scalar: &a.scalar * &b.scalar,
        atoms,
    };
    Ok(Composition { pairs, cross, cocycle, nord })
}

impl VOTerm {
    pub fn n(&self) -> usize {
        self.shape.n
    }

    pub fn num_vars(&self) -> usize {
        self.shape.parts.len()
    }

    /// wt: the weight of the group part.
    pub fn wt(&self) -> LatticeVector {
        self.shape.group.to_lattice()
    }

    pub fn with_scalar(mut self, c: QScalar) -> Self {
        self.scalar = c;
        self
    }

    pub fn scaled(&self, c: &QScalar) -> Self {
        let mut t = self.clone();
        t.scalar = &t.scalar * c;
        t
    }

    fn single(&self) -> Result<&VarPart, EngineError> {
        if self.shape.parts.len() != 1 {
            return Err(EngineError::NotSingleVariable(self.shape.parts.len()));
        }
        Ok(&self.shape.parts[0])
    }

    pub fn part(&self) -> &VarPart {
        &self.shape.parts[0]
    }

    /// Substitutes `z -> z q^t` in a one-variable operator.
    pub fn shifted(&self, t: Half) -> Result<VOTerm, EngineError> {
        let p = self.single()?;
        let tt = Rat::from_integer(t.twice());
        let xexp = tt * p.zexp;
        if !xexp.is_integer() {
            return Err(EngineError::NonIntegralShift { shift: t, zexp: p.zexp });
        }
        let part = VarPart {
            creation: content_shift(&p.creation, t),
            annihilation: content_shift(&p.annihilation, -t),
            zpartial: p.zpartial.clone(),
            zexp: p.zexp,
        };
        let mut shape = self.shape.clone();
        shape.kweight = &shape.kweight + &p.zpartial.scale(t.twice());
        shape.parts = vec![part];
        Ok(VOTerm {
            shape,
            scalar: &self.scalar * &QScalar::x_pow(xexp.to_integer()),
            atoms: vec![self.atoms[0].iter().map(|a| Atom { species: a.species, shift: a.shift + t }).collect()],
        })
    }

    /// Sets every variable equal to one variable z, multiplying by `z^zpow`.
    pub fn collapse(&self, zpow: Rat) -> VOTerm {
        let n = self.shape.n;
        let mut part = VarPart {
            creation: content_zero(n),
            annihilation: content_zero(n),
            zpartial: LatticeVector::zero(n),
            zexp: zpow,
        };
        for p in &self.shape.parts {
            part.creation = content_add(&part.creation, &p.creation);
            part.annihilation = content_add(&part.annihilation, &p.annihilation);
            part.zpartial = &part.zpartial + &p.zpartial;
            part.zexp += p.zexp;
        }
        let mut shape = self.shape.clone();
        shape.parts = vec![part];
        VOTerm { shape, scalar: self.scalar.clone(), atoms: vec![self.atoms.concat()] }
    }

    /// Whether the one-variable operator has only nonnegative powers of z on
    /// every state (no annihilation part and nonnegative z-exponents).
    pub fn creation_only(&self) -> bool {
        self.shape.parts.iter().all(|p| content_is_zero(&p.annihilation))
    }

    pub fn render(&self) -> String {
        let vars: Vec<String> = if self.shape.parts.len() == 1 {
            vec!["z".into()]
        } else {
            (1..=self.shape.parts.len()).map(|v| format!("z{v}")).collect()
        };
        let mut out = Vec::new();
        if !self.scalar.is_one() {
            out.push(format!("({})", self.scalar.render()));
        }
        for (v, p) in self.shape.parts.iter().enumerate() {
            if !p.zexp.is_zero() {
                out.push(format!("{}^({})", vars[v], p.zexp));
            }
        }
        for (v, atoms) in self.atoms.iter().enumerate() {
            for a in atoms {
                let s = if self.shape.parts.len() == 1 { a.to_string() } else { format!("{a}({})", vars[v]) };
                out.push(s);
            }
        }
        if out.is_empty() {
            out.push("1".into());
        }
        out.join(" ")
    }

    pub fn to_json(&self) -> VOTermJson {
        VOTermJson {
            scalar: self.scalar.to_json(),
            scalar_text: self.scalar.render(),
            tag: self.shape.tag,
            group: self.shape.group.gen_coords().to_vec(),
            wt: self.wt().coords().to_vec(),
            kweight: self.shape.kweight.coords().to_vec(),
            sign_op: self.shape.sign_op,
            parts: self
                .shape
                .parts
                .iter()
                .zip(&self.atoms)
                .map(|(p, atoms)| VarPartJson {
                    zexp: p.zexp.to_string(),
                    zpartial: p.zpartial.coords().to_vec(),
                    creation: p.creation.iter().map(|l| l.terms().collect()).collect(),
                    annihilation: p.annihilation.iter().map(|l| l.terms().collect()).collect(),
                    atoms: atoms.iter().map(|a| a.to_string()).collect(),
                })
                .collect(),
        }
    }
}

impl fmt::Display for VOTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VarPartJson {
    pub zexp: String,
    pub zpartial: Vec<i64>,
    pub creation: Vec<Vec<(i64, i64)>>,
    pub annihilation: Vec<Vec<(i64, i64)>>,
    pub atoms: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VOTermJson {
    pub scalar: QScalarJson,
    pub scalar_text: String,
    pub tag: i64,
    pub group: Vec<i64>,
    pub wt: Vec<i64>,
    pub kweight: Vec<i64>,
    pub sign_op: i64,
    pub parts: Vec<VarPartJson>,
}

/// A finite linear combination of operators, merged by shape.
#[derive(Clone, Debug, Default)]
pub struct OperatorSum {
    terms: BTreeMap<Shape, (QScalar, Vec<Vec<Atom>>)>,
}

/// Equality ignores provenance labels.
impl PartialEq for OperatorSum {
    fn eq(&self, o: &Self) -> bool {
        self.terms.len() == o.terms.len()
            && self.terms.iter().zip(&o.terms).all(|((s1, (c1, _)), (s2, (c2, _)))| s1 == s2 && c1 == c2)
    }
}

impl Eq for OperatorSum {}

impl OperatorSum {
    pub fn zero() -> Self {
        OperatorSum::default()
    }

    pub fn from_term(t: VOTerm) -> Self {
        let mut s = OperatorSum::zero();
        s.push(t);
        s
    }

    pub fn push(&mut self, t: VOTerm) {
        if t.scalar.is_zero() {
            return;
        }
        match self.terms.entry(t.shape) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert((t.scalar, t.atoms));
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = &e.get().0 + &t.scalar;
                if s.is_zero() {
                    e.remove();
                } else {
                    e.get_mut().0 = s;
                }
            }
        }
    }

    pub fn add(&self, o: &OperatorSum) -> OperatorSum {
        let mut r = self.clone();
        for t in o.terms() {
            r.push(t);
        }
        r
    }

    pub fn scale(&self, c: &QScalar) -> OperatorSum {
        let mut r = OperatorSum::zero();
        for t in self.terms() {
            r.push(t.scaled(c));
        }
        r
    }

    pub fn sub(&self, o: &OperatorSum) -> OperatorSum {
        self.add(&o.scale(&-QScalar::one()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = VOTerm> + '_ {
        self.terms.iter().map(|(shape, (c, atoms))| VOTerm { shape: shape.clone(), scalar: c.clone(), atoms: atoms.clone() })
    }

    /// The single term, if there is exactly one.
    pub fn single(&self) -> Option<VOTerm> {
        if self.terms.len() == 1 {
            self.terms().next()
        } else {
            None
        }
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self.terms().map(|t| t.render()).collect();
        parts.join(" + ")
    }

    pub fn to_json(&self) -> Vec<VOTermJson> {
        self.terms().map(|t| t.to_json()).collect()
    }
}

impl fmt::Display for OperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalarfield::{recognize_product, RecognizeBounds};

    fn h(t: i64) -> Half {
        Half::from_twice(t)
    }

    #[test]
    fn species_shapes() {
        let psi = make_fj(2, FjKind::Psi, 1, Half::ZERO);
        assert!(content_is_zero(&psi.part().creation));
        let phi = make_fj(2, FjKind::Phi, 1, Half::ZERO);
        assert!(content_is_zero(&phi.part().annihilation));
        let xm = make_fj(2, FjKind::XMinus, 2, Half::ZERO);
        assert_eq!(xm.wt(), -LatticeVector::alpha(2, 2));
        assert_eq!(make_koyama(3, 3, Half::ZERO).shape.sign_op, 0);
        assert_eq!(make_koyama(3, 2, Half::ZERO).shape.sign_op, 2);
        assert_eq!(make_koyama(3, 2, Half::ZERO).wt(), LatticeVector::lambda(3, 2));
    }

    #[test]
    fn laurent_contraction_agrees_with_bracket_sums() {
        let n = 2;
        let ops = [
            make_fj(n, FjKind::XMinus, 1, Half::ZERO),
            make_fj(n, FjKind::XPlus, 2, h(1)),
            make_fj(n, FjKind::Psi, 1, h(-3)),
            make_koyama(n, 1, Half::ZERO),
        ];
        for a in &ops {
            for b in &ops {
                if matches!(a.atoms[0][0].species, Species::Koyama(_)) && matches!(b.atoms[0][0].species, Species::Koyama(_)) {
                    continue;
                }
                let fast = contraction_factors(n, &a.part().annihilation, &b.part().creation).unwrap();
                let c = contraction_series(n, &a.part().annihilation, &b.part().creation, 16);
                let slow = recognize_product(&c, &RecognizeBounds::for_rank(n)).unwrap();
                assert_eq!(fast, slow);
            }
        }
    }

    #[test]
    fn x_minus_against_x_minus() {
        let a = make_fj(2, FjKind::XMinus, 1, Half::ZERO);
        let c = compose(&a, &a).unwrap();
        let f = c.relation_prefactor();
        let expect = FactoredPrefactor::new(
            QScalar::one(),
            Rat::zero(),
            Rat::zero(),
            &[LinearFactor::new(Half::ZERO, 1), LinearFactor::new(Half::from_int(2), 1)],
        );
        assert_eq!(f, expect);
    }

    #[test]
    fn x_minus_against_koyama() {
        for n in 1..=3 {
            for i in 1..=n {
                let a = make_fj(n, FjKind::XMinus, i, Half::ZERO);
                let f = compose(&a, &make_koyama(n, i, Half::ZERO)).unwrap().relation_prefactor();
                let expect = FactoredPrefactor::new(
                    QScalar::one(),
                    Rat::zero(),
                    Rat::zero(),
                    &[LinearFactor::new(Half::from_int(1), -1)],
                );
                assert_eq!(f, expect, "n={n} i={i}");
            }
        }
    }

    #[test]
    fn koyama_pair_is_not_a_finite_product() {
        let y = make_koyama(2, 1, Half::ZERO);
        assert!(matches!(compose(&y, &y), Err(EngineError::ContractionUnrecognized(_)) | Err(EngineError::NonIntegralSignExponent(_))));
    }

    #[test]
    fn shift_then_collapse_identity() {
        // :x+(z q^(t+1)) x-(z q^t): has the content of psi(z q^(t+1/2))
        let n = 2;
        for tt in -2..=2 {
            let t = h(tt);
            let xp = make_fj(n, FjKind::XPlus, 1, t + Half::from_int(1));
            let xm = make_fj(n, FjKind::XMinus, 1, t);
            let c = compose(&xp, &xm).unwrap();
            let col = c.nord.collapse(Rat::zero());
            let psi = make_fj(n, FjKind::Psi, 1, t + h(1));
            assert_eq!(col.part().creation, psi.part().creation);
            assert_eq!(col.part().annihilation, psi.part().annihilation);
            assert!(col.shape.group.is_identity());
        }
    }
}
