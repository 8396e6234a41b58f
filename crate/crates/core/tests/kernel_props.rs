use std::collections::HashMap;

use jetlie::expr::{
    frac, linear_solve, parse, Expr, Monomial, Poly, QuadValue, Quadratic, Rational, Symbol,
};
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

const SEED: [u8; 32] = *b"jetlie kernel property seed 0001";

fn runner() -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases: 1000,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::from_seed(RngAlgorithm::ChaCha, &SEED),
    )
}

fn pool() -> Vec<Symbol> {
    vec![
        Symbol::X,
        Symbol::T,
        Symbol::U,
        Symbol::jet(1, 0),
        Symbol::jet(0, 1),
        Symbol::jet(2, 0),
        Symbol::jet(3, 0),
        Symbol::ALPHA,
        Symbol::BETA,
    ]
}

fn kernel() -> Poly {
    parse("2*b*u[3,0]^2 + a").unwrap().as_poly().unwrap()
}

fn coeff() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=3).prop_map(|(n, d)| frac(n, d))
}

fn monomial() -> impl Strategy<Value = Monomial> {
    let n = pool().len();
    prop::collection::vec((0..n, 1u32..=2), 0..=3).prop_map(move |pairs| {
        let p = pool();
        pairs.into_iter().fold(Monomial::one(), |m, (i, e)| {
            m.mul(&Monomial::power(p[i], e))
        })
    })
}

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec((coeff(), monomial()), 0..=4).prop_map(|terms| {
        let mut p = Poly::zero();
        for (c, m) in terms {
            p.add_term(m, c);
        }
        p
    })
}

/// `p0 + p1 R^(k/2)` with an optional radical part.
fn expr() -> impl Strategy<Value = Expr> {
    (
        poly(),
        poly(),
        prop::sample::select(vec![0, -3, -1, 1, 2, 3]),
    )
        .prop_map(|(p0, p1, k)| {
            let base = Expr::from_poly(p0);
            if k == 0 {
                base
            } else {
                &base + &(&Expr::from_poly(p1) * &Expr::radical(&kernel(), k).unwrap())
            }
        })
}

fn point() -> impl Strategy<Value = HashMap<Symbol, Rational>> {
    prop::collection::vec(coeff(), pool().len()).prop_map(|v| pool().into_iter().zip(v).collect())
}

fn rebase(v: QuadValue, r: &Rational) -> QuadValue {
    QuadValue { r: r.clone(), ..v }
}

/// Values of two expressions in a common extension, or `None` at a pole.
fn eval_pair(a: &Expr, b: &Expr, p: &HashMap<Symbol, Rational>) -> Option<(QuadValue, QuadValue)> {
    let r = kernel().eval(p).unwrap();
    let (x, y) = (a.eval_quadratic(p).ok()?, b.eval_quadratic(p).ok()?);
    Some((rebase(x, &r), rebase(y, &r)))
}

fn same(a: &QuadValue, b: &QuadValue) -> bool {
    a.add(&b.mul(&QuadValue::rational(frac(-1, 1), a.r.clone())))
        .is_zero()
}

#[test]
fn normal_form_is_sound_for_products_and_sums() {
    runner()
        .run(&(expr(), expr(), point()), |(e1, e2, p)| {
            let r = kernel().eval(&p).unwrap();
            if r.is_zero() {
                return Ok(());
            }
            let (prod, sum) = (&e1 * &e2, &e1 + &e2);
            let Some((v1, v2)) = eval_pair(&e1, &e2, &p) else {
                return Ok(());
            };
            let (vp, vs) = eval_pair(&prod, &sum, &p).unwrap();
            prop_assert!(same(&vp, &v1.mul(&v2)));
            prop_assert!(same(&vs, &v1.add(&v2)));
            Ok(())
        })
        .unwrap();
}

#[test]
fn zero_normal_form_evaluates_to_zero() {
    runner()
        .run(&(expr(), expr(), point()), |(e1, e2, p)| {
            // (e1 + e2)^2 - e1^2 - 2 e1 e2 - e2^2 normalizes to zero.
            let s = &e1 + &e2;
            let z =
                &(&(&(&s * &s) - &(&e1 * &e1)) - &(&e1 * &e2).scale(&frac(2, 1))) - &(&e2 * &e2);
            prop_assert!(z.is_zero());
            if let Ok(v) = z.eval_quadratic(&p) {
                prop_assert!(v.is_zero());
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn partial_derivatives_commute() {
    let n = pool().len();
    runner()
        .run(&(expr(), 0..n, 0..n), |(e, i, j)| {
            let (s1, s2) = (pool()[i], pool()[j]);
            prop_assert_eq!(e.diff(s1).diff(s2), e.diff(s2).diff(s1));
            Ok(())
        })
        .unwrap();
}

#[test]
fn print_parse_round_trip() {
    runner()
        .run(&expr(), |e| {
            let text = e.to_string();
            let back = parse(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
            prop_assert_eq!(&back, &e);
            prop_assert_eq!(back.to_string(), text);
            Ok(())
        })
        .unwrap();
}

#[test]
fn linear_solve_returns_null_vectors() {
    let unknowns: Vec<Symbol> = (1..=4).map(Symbol::Unknown).collect();
    let system = prop::collection::vec(prop::collection::vec(poly(), 4), 1..=4);
    runner()
        .run(&system, |rows| {
            let exprs: Vec<Expr> = rows
                .iter()
                .map(|row| {
                    let mut p = Poly::zero();
                    for (c, s) in row.iter().zip(&unknowns) {
                        p.add_assign_ref(&(c * &Poly::var(*s)));
                    }
                    Expr::from_poly(p)
                })
                .collect();
            let sol = linear_solve(&exprs, &unknowns).unwrap();
            prop_assert!(sol.rank + sol.dimension() == unknowns.len());
            for v in &sol.basis {
                let b: HashMap<Symbol, Expr> = unknowns
                    .iter()
                    .zip(v)
                    .map(|(s, c)| (*s, Expr::from_poly(c.clone())))
                    .collect();
                for e in &exprs {
                    prop_assert!(e.substitute(&b).unwrap().is_zero());
                }
            }
            Ok(())
        })
        .unwrap();
}
