use proptest::prelude::*;
use qvertex::cli::{parse_expr, Coeff, Expr, ExprError};
use qvertex::scalarfield::{Half, Rat};
use qvertex::voperator::FjKind;

const CORPUS: [&str; 50] = [
    "Y[1]",
    "Y[2]",
    "Y[3,1/2]",
    "x-[1]",
    "x+[2]",
    "psi[3]",
    "phi[1]",
    "x-[1,1]",
    "x-[2,-3/2]",
    "psi[1,3/2]",
    "psi[2,5/2]",
    "phi[3,-1]",
    "x+[1,2]",
    "x-[1] . Y[1]",
    "x-[2] . x-[1] . Y[1]",
    "x-[3] . x-[2] . x-[1] . Y[1]",
    "x+[1] . x-[1] . Y[1]",
    "psi[1] . Y[1]",
    "psi[2] . Y[1]",
    "phi[1] . x-[1] . Y[1]",
    "x+[2] . x-[2] . x-[1] . Y[1]",
    "x-[1,1] _0 Y[1]",
    "x-[1,1] _1 Y[1]",
    "x+[1,2] _0 x-[1] . Y[1]",
    "psi[1,3/2] _0 Y[1]",
    "(x-[1] . Y[1])",
    "x-[2] . (x-[1] . Y[1])",
    "(x-[1] . Y[2]) . Y[1]",
    "Y[1] + Y[2]",
    "Y[1] - Y[2]",
    "x-[1] . Y[1] + psi[1] . Y[1]",
    "x+[1] . x-[1] . Y[1] - x-[1] . x+[1] . Y[1]",
    "2 * Y[1]",
    "-1 * Y[1]",
    "3/2 * x-[1] . Y[1]",
    "q^(1/2) * Y[1]",
    "q^3 * psi[1] . Y[1]",
    "q^-1/2 * Y[2]",
    "2 * q^(-1) * x-[1] . Y[1]",
    "-5/3 * q^(3/2) * Y[1] + Y[2]",
    "(Y[1] + Y[2]) . Y[3]",
    "x-[1] . (Y[1] + 2 * Y[2])",
    "(Y[1] + Y[2]) + Y[3]",
    "Y[1] + (Y[2] + Y[3])",
    "  x-[1]   .Y[1]  ",
    "x-[1]._0 Y[1]",
    "psi[1,3/2] _0 x-[1] . Y[1] - q^(1/2) * Y[1]",
    "(x+[1] . x-[1] . Y[1] - x-[1] . x+[1] . Y[1]) + -1 * psi[1] . Y[1]",
    "phi[2,1] _2 psi[3,-5/2] _0 Y[3]",
    "1/2 * (x-[1] . Y[1] + x-[2] . Y[1])",
];

#[test]
fn corpus_round_trips() {
    let mut parsed = 0;
    for text in CORPUS {
        match parse_expr(text, 3) {
            Ok(e) => {
                let again = parse_expr(&e.render(), 3).unwrap_or_else(|err| panic!("{text} -> {} : {err}", e.render()));
                assert_eq!(again, e, "{text}");
                assert_eq!(again.render(), e.render());
                parsed += 1;
            }
            Err(err) => {
                // "x-[1]._0" is the only entry meant to be rejected
                assert_eq!(text, "x-[1]._0 Y[1]", "{err}");
                assert!(matches!(err, ExprError::Syntax { .. }));
            }
        }
    }
    assert_eq!(parsed, 49);
}

fn leaf() -> impl Strategy<Value = Expr> {
    let shift = (-6i64..=6).prop_map(Half::from_twice);
    let kind = prop_oneof![Just(FjKind::XPlus), Just(FjKind::XMinus), Just(FjKind::Psi), Just(FjKind::Phi)];
    prop_oneof![
        (1usize..=3, shift.clone()).prop_map(|(i, t)| Expr::Koyama { i, t }),
        (kind, 1usize..=3, shift).prop_map(|(kind, j, t)| Expr::Fj { kind, j, t }),
    ]
}

fn coeff() -> impl Strategy<Value = Coeff> {
    prop_oneof![
        (-9i64..=9, 1i64..=5).prop_map(|(a, b)| Coeff::Rational(Rat::new(a, b))),
        (-6i64..=6).prop_map(|t| Coeff::QPow(Half::from_twice(t))),
    ]
}

fn tree() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Bullet(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone(), 0u32..3).prop_map(|(a, b, r)| Expr::RthProduct(Box::new(a), Box::new(b), r)),
            (coeff(), inner.clone()).prop_map(|(c, e)| Expr::Scale(c, Box::new(e))),
            proptest::collection::vec(inner, 2..4).prop_map(Expr::Sum),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn rendered_trees_reparse(e in tree()) {
        let text = e.render();
        let back = parse_expr(&text, 3).unwrap();
        prop_assert_eq!(back.render(), text);
    }
}
