//! Operator expressions: parsing, rendering and evaluation.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := scalar "*" term | chain
//! scalar  := "-"? int ("/" int)? | "q^" shift | "q^(" shift ")"
//! chain   := primary (("." | "_" int) chain)?
//! primary := op | "(" expr ")"
//! op      := ("x+" | "x-" | "psi" | "phi" | "Y") "[" int ("," shift)? "]"
//! shift   := "-"? int ("/" "2")?
//! ```
//!
//! `a . b` is the bullet product and `a _r b` Li's r-th product; both are
//! right-associative.

use std::fmt;

use thiserror::Error;

use crate::products::{bullet_sum, rth_product};
use crate::scalarfield::{Half, QScalar, Rat};
use crate::voperator::{make_fj, make_koyama, EngineError, FjKind, OperatorSum};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("index {index} at byte {offset} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize, offset: usize },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// A scalar coefficient literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coeff {
    Rational(Rat),
    QPow(Half),
}

impl Coeff {
    pub fn value(self) -> QScalar {
        match self {
            Coeff::Rational(r) => QScalar::from_ratio(*r.numer(), *r.denom()),
            Coeff::QPow(h) => QScalar::q_pow(h),
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Rational(r) => write!(f, "{r}"),
            Coeff::QPow(h) => write!(f, "q^({h})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Koyama { i: usize, t: Half },
    Fj { kind: FjKind, j: usize, t: Half },
    Bullet(Box<Expr>, Box<Expr>),
    RthProduct(Box<Expr>, Box<Expr>, u32),
    Scale(Coeff, Box<Expr>),
    Sum(Vec<Expr>),
}

fn kind_name(kind: FjKind) -> &'static str {
    match kind {
        FjKind::XPlus => "x+",
        FjKind::XMinus => "x-",
        FjKind::Psi => "psi",
        FjKind::Phi => "phi",
    }
}

fn op_text(name: &str, idx: usize, t: Half) -> String {
    if t == Half::ZERO {
        format!("{name}[{idx}]")
    } else {
        format!("{name}[{idx},{t}]")
    }
}

impl Expr {
    /// Canonical text; parsing it gives back the same tree.
    pub fn render(&self) -> String {
        match self {
            Expr::Sum(terms) => terms.iter().map(Expr::render_term).collect::<Vec<_>>().join(" + "),
            _ => self.render_term(),
        }
    }

    fn render_term(&self) -> String {
        match self {
            Expr::Scale(c, e) => format!("{c} * {}", e.render_term()),
            _ => self.render_chain(),
        }
    }

    fn render_chain(&self) -> String {
        match self {
            Expr::Bullet(a, b) => format!("{} . {}", a.render_primary(), b.render_chain()),
            Expr::RthProduct(a, b, r) => format!("{} _{r} {}", a.render_primary(), b.render_chain()),
            _ => self.render_primary(),
        }
    }

    fn render_primary(&self) -> String {
        match self {
            Expr::Koyama { i, t } => op_text("Y", *i, *t),
            Expr::Fj { kind, j, t } => op_text(kind_name(*kind), *j, *t),
            _ => format!("({})", self.render()),
        }
    }

    /// Evaluates the expression to a sum of normal-ordered operators.
    pub fn eval(&self, n: usize) -> Result<OperatorSum, ExprError> {
        Ok(match self {
            Expr::Koyama { i, t } => OperatorSum::from_term(make_koyama(n, *i, *t)),
            Expr::Fj { kind, j, t } => OperatorSum::from_term(make_fj(n, *kind, *j, *t)),
            Expr::Bullet(a, b) => bullet_sum(&a.eval(n)?, &b.eval(n)?)?,
            Expr::RthProduct(a, b, r) => {
                let (a, b) = (a.eval(n)?, b.eval(n)?);
                let mut out = OperatorSum::zero();
                for ta in a.terms() {
                    for tb in b.terms() {
                        out = out.add(&rth_product(&ta, &tb, *r as i64)?);
                    }
                }
                out
            }
            Expr::Scale(c, e) => e.eval(n)?.scale(&c.value()),
            Expr::Sum(terms) => {
                let mut out = OperatorSum::zero();
                for t in terms {
                    out = out.add(&t.eval(n)?);
                }
                out
            }
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Parses an expression for rank n.
pub fn parse_expr(text: &str, n: usize) -> Result<Expr, ExprError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, n };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ExprError {
        ExprError::Syntax { offset: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn starts_with(&mut self, s: &str) -> bool {
        self.skip_ws();
        self.src[self.pos..].starts_with(s.as_bytes())
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), ExprError> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{s}'")))
        }
    }

    fn int(&mut self) -> Result<i64, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| ExprError::Syntax { offset: start, message: "integer too large".into() })
    }

    fn signed_int(&mut self) -> Result<i64, ExprError> {
        let neg = self.eat("-");
        let v = self.int()?;
        Ok(if neg { -v } else { v })
    }

    fn shift(&mut self) -> Result<Half, ExprError> {
        let v = self.signed_int()?;
        if self.eat("/") {
            let at = self.pos;
            if self.int()? != 2 {
                return Err(ExprError::Syntax { offset: at, message: "shifts are integers or halves".into() });
            }
            Ok(Half::from_twice(v))
        } else {
            Ok(Half::from_int(v))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat("+") {
                terms.push(self.term()?);
            } else if self.peek() == Some(b'-') {
                self.pos += 1;
                let t = self.term()?;
                terms.push(Expr::Scale(Coeff::Rational(Rat::from_integer(-1)), Box::new(t)));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().expect("one term") } else { Expr::Sum(terms) })
    }

    fn scalar(&mut self) -> Result<Option<Coeff>, ExprError> {
        let save = self.pos;
        if self.eat("q^") {
            let h = if self.eat("(") {
                let h = self.shift()?;
                self.expect(")")?;
                h
            } else {
                self.shift()?
            };
            self.expect("*")?;
            return Ok(Some(Coeff::QPow(h)));
        }
        match self.peek() {
            Some(c) if c == b'-' || c.is_ascii_digit() => {
                let num = self.signed_int()?;
                let den = if self.eat("/") { self.int()? } else { 1 };
                if den == 0 {
                    return Err(self.error("zero denominator"));
                }
                self.expect("*")?;
                Ok(Some(Coeff::Rational(Rat::new(num, den))))
            }
            _ => {
                self.pos = save;
                Ok(None)
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        match self.scalar()? {
            Some(c) => Ok(Expr::Scale(c, Box::new(self.term()?))),
            None => self.chain(),
        }
    }

    fn chain(&mut self) -> Result<Expr, ExprError> {
        let lhs = self.primary()?;
        if self.eat(".") {
            let rhs = self.chain()?;
            Ok(Expr::Bullet(Box::new(lhs), Box::new(rhs)))
        } else if self.eat("_") {
            let r = self.int()? as u32;
            let rhs = self.chain()?;
            Ok(Expr::RthProduct(Box::new(lhs), Box::new(rhs), r))
        } else {
            Ok(lhs)
        }
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        if self.eat("(") {
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(e);
        }
        let kind = if self.eat("x+") {
            Some(FjKind::XPlus)
        } else if self.eat("x-") {
            Some(FjKind::XMinus)
        } else if self.eat("psi") {
            Some(FjKind::Psi)
        } else if self.eat("phi") {
            Some(FjKind::Phi)
        } else if self.eat("Y") {
            None
        } else {
            return Err(self.error("expected an operator or '('"));
        };
        self.expect("[")?;
        self.skip_ws();
        let at = self.pos;
        let idx = self.int()? as usize;
        if idx == 0 || idx > self.n {
            return Err(ExprError::IndexOutOfRange { index: idx, n: self.n, offset: at });
        }
        let t = if self.eat(",") { self.shift()? } else { Half::ZERO };
        self.expect("]")?;
        Ok(match kind {
            Some(kind) => Expr::Fj { kind, j: idx, t },
            None => Expr::Koyama { i: idx, t },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y(i: usize) -> Expr {
        Expr::Koyama { i, t: Half::ZERO }
    }

    #[test]
    fn parses_the_basic_forms() {
        assert_eq!(parse_expr("Y[1]", 2).unwrap(), y(1));
        let e = parse_expr("x-[1] . Y[1]", 2).unwrap();
        assert_eq!(e, Expr::Bullet(Box::new(Expr::Fj { kind: FjKind::XMinus, j: 1, t: Half::ZERO }), Box::new(y(1))));
        assert_eq!(
            parse_expr("x-[7] . Y[1]", 2),
            Err(ExprError::IndexOutOfRange { index: 7, n: 2, offset: 3 })
        );
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        assert!(matches!(parse_expr("x-[1] . ", 2), Err(ExprError::Syntax { offset: 8, .. })));
        assert!(matches!(parse_expr("x*[1]", 2), Err(ExprError::Syntax { offset: 0, .. })));
        assert!(matches!(parse_expr("psi[1,1/3]", 2), Err(ExprError::Syntax { offset: 8, .. })));
        assert!(matches!(parse_expr("Y[1] Y[2]", 2), Err(ExprError::Syntax { offset: 5, .. })));
    }

    #[test]
    fn shifts_and_scalars() {
        let e = parse_expr("-3/2 * q^(1/2) * psi[2,-5/2]", 2).unwrap();
        assert_eq!(e.render(), "-3/2 * q^(1/2) * psi[2,-5/2]");
        let e = parse_expr("Y[1] - x+[1,2] _0 Y[1]", 1).unwrap();
        assert_eq!(e.render(), "Y[1] + -1 * x+[1,2] _0 Y[1]");
    }

    #[test]
    fn evaluation() {
        assert!(parse_expr("psi[2] . Y[1]", 2).unwrap().eval(2).unwrap().is_zero());
        let a = parse_expr("x-[1,1] _0 Y[1]", 2).unwrap().eval(2).unwrap();
        assert_eq!(a.len(), 1);
        let b = parse_expr("x-[1] . Y[1] - x-[1] . Y[1]", 2).unwrap().eval(2).unwrap();
        assert!(b.is_zero());
    }
}
