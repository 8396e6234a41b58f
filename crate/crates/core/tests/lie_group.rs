use jetlie::expr::{frac, parse, rat, Expr, Rational};
use jetlie::fields::{commutator, PointVectorField};
use jetlie::group::{
    derived_point_algebra, equation_invariance, flow, reduce, transform_solution, GroupParam,
    ReductionRep,
};
use jetlie::jet::{Equation, JetSpace};
use jetlie::lie::{
    adjoint_exp, apply_witness, apply_witness_2d, is_automorphism, normalize_1d, normalize_2d,
    spe_table, Representative1d,
};
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

fn p(s: &str) -> Expr {
    parse(s).unwrap()
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::from_seed(RngAlgorithm::ChaCha, b"jetlie lie algebra property seed"),
    )
}

fn coeff() -> impl Strategy<Value = Rational> {
    prop_oneof![
        1 => Just(rat(0)),
        3 => (-9i64..=9, 1i64..=5).prop_map(|(n, d)| frac(n, d)),
    ]
}

fn element() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(coeff(), 3).prop_filter("nonzero", |v| v.iter().any(|c| !c.is_zero()))
}

#[test]
fn normalization_witnesses_reproduce_representatives() {
    let table = spe_table();
    runner(1000)
        .run(&element(), |c| {
            let n = normalize_1d(&c, &table).unwrap();
            let image = apply_witness(&c, &n.steps, &table).unwrap();
            prop_assert_eq!(&image, &n.representative.coefficients());
            // Idempotence on representatives.
            let again = normalize_1d(&image, &table).unwrap();
            prop_assert_eq!(&again.representative, &n.representative);
            prop_assert!(again.steps.is_empty());
            // Orbit invariants: the c3 = 0 stratum and the sign of c1 c2 there.
            prop_assert_eq!(n.translation_stratum, c[2].is_zero());
            if c[2].is_zero() {
                let s = (&c[0] * &c[1]).signum();
                let r = n.representative.coefficients();
                prop_assert_eq!((&r[0] * &r[1]).signum(), s);
            } else {
                prop_assert_eq!(&n.representative, &Representative1d::Scaling);
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn subalgebra_pairs_normalize_with_witness() {
    let table = spe_table();
    let pair = (element(), element(), 0usize..3);
    runner(300)
        .run(&pair, |(h1, h2, kind)| {
            // Pairs inside span{v1, v2}, span{v1, v3} or span{v2, v3} are closed.
            let mut a = h1.clone();
            let mut b = h2.clone();
            let zero_slot = [2, 1, 0][kind];
            a[zero_slot] = rat(0);
            b[zero_slot] = rat(0);
            let det_ok =
                (0..3).any(|i| (i + 1..3).any(|j| !(&a[i] * &b[j] - &a[j] * &b[i]).is_zero()));
            prop_assume!(det_ok);
            let n = normalize_2d(&a, &b, &table).unwrap();
            let out = apply_witness_2d(&a, &b, &n, &table).unwrap();
            prop_assert_eq!(out, n.representative.pair());
            Ok(())
        })
        .unwrap();
}

#[test]
fn adjoint_maps_are_automorphisms() {
    let table = spe_table();
    for i in 0..3 {
        let m = adjoint_exp(i, &table).unwrap();
        assert!(is_automorphism(&m, &table));
        assert!(m.is_identity_at_zero());
    }
}

fn affine_field() -> impl Strategy<Value = PointVectorField> {
    let comp = prop::collection::vec(-3i64..=3, 4)
        .prop_map(|v| p(&format!("{}*x + {}*t + {}*u + {}", v[0], v[1], v[2], v[3])));
    (comp.clone(), comp.clone(), comp).prop_map(|(a, b, c)| PointVectorField::new(a, b, c))
}

#[test]
fn commutators_satisfy_jacobi() {
    runner(200)
        .run(
            &(affine_field(), affine_field(), affine_field()),
            |(a, b, c)| {
                let br = |v: &PointVectorField, w: &PointVectorField| commutator(v, w).unwrap();
                let sum = br(&a, &br(&b, &c))
                    .add(&br(&b, &br(&c, &a)))
                    .add(&br(&c, &br(&a, &b)));
                prop_assert!(sum.is_zero());
                Ok(())
            },
        )
        .unwrap();
}

#[test]
fn flows_of_the_derived_algebra() {
    let jets = JetSpace::spe();
    let alg = derived_point_algebra(&jets).unwrap();
    for v in &alg.fields {
        let g = flow(v).unwrap();
        assert!(g.satisfies_group_law());
        assert!(g.is_identity_at_zero());
        equation_invariance(&g, jets.equation()).unwrap();
    }
    let g3 = flow(&alg.fields[2]).unwrap();
    let inv = equation_invariance(&g3, jets.equation()).unwrap();
    // Weight count: u_xt and each monomial of F gain e^((k_u - k_x - k_t) eps).
    assert_eq!(inv.k, 1);
}

#[test]
fn transformed_translation_solutions() {
    let g = flow(&PointVectorField::from_ints(0, 1, 0)).unwrap();
    let f = p("x^2*t + 3*t^2 - x");
    let out = transform_solution(&g, &f, &GroupParam::Symbolic).unwrap();
    assert_eq!(out, p("x^2*(t - eps) + 3*(t - eps)^2 - x"));
    let id = flow(&PointVectorField::zero()).unwrap();
    assert_eq!(
        transform_solution(&id, &f, &GroupParam::Value(rat(4))).unwrap(),
        f
    );
}

#[test]
fn traveling_wave_reductions_match_hand_substitution() {
    let eq = Equation::spe();
    // u = w(t - A x): u_x = -A w', u_t = w', u_xt = -A w'', u_xx = A^2 w''.
    let r = reduce(&eq, &ReductionRep::TravelingA(p("A"))).unwrap();
    assert_eq!(
        r.ode(),
        p("-A*w[2] - a*w - 2*b*A^2*w*w[1]^2 - b*A^2*w^2*w[2]")
    );
    assert!(r.back_substitution.is_zero());
    // u = w(x - B t): u_x = w', u_xt = -B w'', u_xx = w''.
    let r = reduce(&eq, &ReductionRep::TravelingB(p("B"))).unwrap();
    assert_eq!(r.ode(), p("-B*w[2] - a*w - 2*b*w*w[1]^2 - b*w^2*w[2]"));
    assert!(r.back_substitution.is_zero());
}
