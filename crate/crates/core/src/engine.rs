//! The linearized symmetry condition `D_x D_t Q - F'[Q] = 0` on the solution
//! manifold: residuals, determining systems, finite-ansatz solving and
//! bounded nonexistence checks.

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{
    solve_combination, Expr, ExprError, FuncId, Monomial, Poly, Quadratic, Rational, Symbol,
};
use crate::fields::{jet_order_of, Characteristic};
use crate::jet::{JetError, JetSpace};

/// Default bound on the number of basis monomials of an ansatz.
pub const DEFAULT_BASIS_LIMIT: usize = 2000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("characteristic of order {order} needs jet order {needed}, above the cap {max}")]
    OrderCap { order: u32, needed: u32, max: u32 },
    #[error("collection symbol {0} is an argument of Q and is not free")]
    ArityConflict(String),
    #[error("{0} is not a valid argument of Q")]
    BadArgument(String),
    #[error("ansatz basis has {size} elements, above the limit {limit}")]
    BasisTooLarge { size: usize, limit: usize },
    #[error("order {0} is outside the supported range 1..=4")]
    UnsupportedOrder(u32),
    #[error("could not find {0} sample points avoiding the singular locus")]
    Sampling(usize),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Value of `D_x D_t Q - F'[Q]` on the reduced jet manifold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residual {
    pub value: Expr,
    pub is_zero: bool,
    pub free_coordinates: Vec<Symbol>,
    /// The summands `D_x D_t Q` and `-(dF/du_s) D_x^s Q`, before addition.
    pub pieces: Vec<Expr>,
}

/// Computes the summands of the residual of `q`.
pub fn residual_pieces(jets: &JetSpace, q: &Expr) -> Result<Vec<Expr>, EngineError> {
    let order = jet_order_of(q);
    if order + 2 > jets.max_order() {
        return Err(EngineError::OrderCap {
            order,
            needed: order + 2,
            max: jets.max_order(),
        });
    }
    let q = jets.to_manifold(q)?;
    let dxdt = jets.total_dx(&jets.total_dt(&q)?)?;
    let mut pieces = vec![dxdt];
    let rhs = jets.equation().rhs();
    let mut dx = vec![q];
    for s in jets.equation().jet_symbols() {
        let Symbol::Jet(i, _) = s else { unreachable!() };
        while dx.len() <= i as usize {
            let next = jets.total_dx(dx.last().unwrap())?;
            dx.push(next);
        }
        let coeff = rhs.diff(s);
        pieces.push(-coeff.checked_mul(&dx[i as usize])?);
    }
    Ok(pieces)
}

/// The residual of a characteristic.
pub fn residual(jets: &JetSpace, q: &Characteristic) -> Result<Residual, EngineError> {
    residual_of(jets, &q.q)
}

pub fn residual_of(jets: &JetSpace, q: &Expr) -> Result<Residual, EngineError> {
    let pieces = residual_pieces(jets, q)?;
    let mut value = Expr::zero();
    for p in &pieces {
        value = value.checked_add(p)?;
    }
    let free_coordinates = value.symbols().into_iter().filter(Symbol::is_jet).collect();
    Ok(Residual {
        is_zero: value.is_zero(),
        value,
        free_coordinates,
        pieces,
    })
}

/// Outcome of evaluating a residual at random rational points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpotCheck {
    pub seed: u64,
    pub points: usize,
    pub nonzero_points: usize,
    /// The symbolic verdict is consistent with the sampled values.
    pub agrees: bool,
    /// First sampled point with a nonzero value, as `(symbol, value)` pairs.
    pub witness: Option<Vec<(String, String)>>,
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let mut n: i64 = 0;
    while n == 0 {
        n = rng.gen_range(-9..=9);
    }
    Rational::new(n.into(), rng.gen_range(1i64..=4).into())
}

/// Evaluates the sum of `pieces` exactly in `Q(sqrt(R(p)))` at `points`
/// seeded random rational points and compares with `symbolic_zero`.
pub fn spot_check(
    pieces: &[Expr],
    symbolic_zero: bool,
    seed: u64,
    points: usize,
) -> Result<SpotCheck, EngineError> {
    let symbols: BTreeSet<Symbol> = pieces.iter().flat_map(|p| p.symbols()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    let mut attempts = 0;
    let mut nonzero = 0;
    let mut witness = None;
    while done < points {
        attempts += 1;
        if attempts > 20 * points.max(1) {
            return Err(EngineError::Sampling(points));
        }
        let point: HashMap<Symbol, Rational> = symbols
            .iter()
            .map(|&s| (s, random_rational(&mut rng)))
            .collect();
        let mut a = Rational::zero();
        let mut b = Rational::zero();
        let mut r = None;
        let mut singular = false;
        for p in pieces {
            match p.eval_quadratic(&point) {
                Ok(v) => {
                    a += v.a;
                    if !v.b.is_zero() {
                        b += v.b;
                        r = Some(v.r);
                    }
                }
                Err(ExprError::DivisionByZero) => {
                    singular = true;
                    break;
                }
                Err(e) => return Err(e.into()),
            }
        }
        if singular {
            continue;
        }
        done += 1;
        let value = crate::expr::QuadValue {
            a,
            b,
            r: r.unwrap_or_else(Rational::one),
        };
        if !value.is_zero() {
            nonzero += 1;
            if witness.is_none() {
                witness = Some(
                    symbols
                        .iter()
                        .map(|s| (s.to_string(), point[s].to_string()))
                        .collect(),
                );
            }
        }
    }
    let agrees = if symbolic_zero {
        nonzero == 0
    } else {
        nonzero > 0
    };
    Ok(SpotCheck {
        seed,
        points,
        nonzero_points: nonzero,
        agrees,
        witness,
    })
}

/// One coefficient equation of a determining system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterminingEquation {
    /// Monomial in the collection symbols whose coefficient this is.
    pub monomial: Monomial,
    pub power: i32,
    pub equation: Expr,
}

#[derive(Clone, Debug)]
pub struct DeterminingSystem {
    pub function: FuncId,
    pub arity: Vec<Symbol>,
    pub collected_by: Vec<Symbol>,
    pub equations: Vec<DeterminingEquation>,
}

impl DeterminingSystem {
    /// Whether some equation equals `e` up to a nonzero rational factor.
    pub fn contains(&self, e: &Expr) -> bool {
        let target = normalize_equation(e);
        self.equations.iter().any(|d| d.equation == target)
    }

    /// Index of an equation containing every term of `e`, up to one common
    /// nonzero rational factor.
    pub fn containing_terms(&self, e: &Expr) -> Option<usize> {
        let t = e.as_poly()?;
        let (m0, c0) = t.terms().next()?;
        self.equations.iter().position(|d| {
            let Some(p) = d.equation.as_poly() else {
                return false;
            };
            let k = p.coeff(m0);
            if k.is_zero() {
                return false;
            }
            let ratio = k / c0;
            t.terms().all(|(m, c)| p.coeff(m) == &ratio * c)
        })
    }
}

/// Divides a homogeneous equation by its non-opaque monomial content and
/// rational content, with a positive leading coefficient.
fn normalize_equation(e: &Expr) -> Expr {
    let Some(p) = e.as_poly() else {
        return e.clone();
    };
    if p.is_zero() {
        return e.clone();
    }
    let (content, _) = p
        .monomial_content()
        .partition(|s| !matches!(s, Symbol::Opaque(_)));
    let p = p.map_monomials(|m| Poly::term(Rational::one(), m.div(&content).unwrap()));
    let (_, _, prim) = p.content();
    Expr::from_poly(prim)
}

/// The opaque-function determining system of `Q(arity)`, split into the
/// coefficients of the monomials in `collect_in`.
pub fn determining_system(
    jets: &JetSpace,
    arity: &[Symbol],
    collect_in: &[Symbol],
) -> Result<DeterminingSystem, EngineError> {
    for s in arity {
        let ok = match *s {
            Symbol::Var(_) => true,
            Symbol::Jet(i, j) => i == 0 || j == 0,
            _ => false,
        };
        if !ok {
            return Err(EngineError::BadArgument(s.to_string()));
        }
    }
    if let Some(s) = collect_in.iter().find(|s| arity.contains(s)) {
        return Err(EngineError::ArityConflict(s.to_string()));
    }
    let function = FuncId::declare("Q", arity).map_err(EngineError::BadArgument)?;
    let q = Expr::symbol(Symbol::opaque(function, &[]));
    let res = residual_of(jets, &q)?;
    let mut equations = Vec::new();
    for (monomial, power, coeff) in res.value.collect(|s| collect_in.contains(&s)) {
        equations.push(DeterminingEquation {
            monomial,
            power,
            equation: normalize_equation(&coeff),
        });
    }
    Ok(DeterminingSystem {
        function,
        arity: arity.to_vec(),
        collected_by: collect_in.to_vec(),
        equations,
    })
}

/// Symmetry characteristics found inside the span of an ansatz basis.
#[derive(Clone, Debug)]
pub struct AnsatzSolution {
    pub basis: Vec<Expr>,
    pub characteristics: Vec<Characteristic>,
    /// Polynomials in the parameters assumed nonzero by the elimination.
    pub assumptions: Vec<Poly>,
    /// Every returned characteristic was re-checked to have zero residual.
    pub verified: bool,
    pub equations: usize,
    pub rank: usize,
}

impl AnsatzSolution {
    pub fn dimension(&self) -> usize {
        self.characteristics.len()
    }
}

/// Solves the symmetry condition for `Q = sum_k c_k basis_k`.
pub fn ansatz_solve(jets: &JetSpace, basis: &[Expr]) -> Result<AnsatzSolution, EngineError> {
    let columns: Vec<Expr> = basis
        .par_iter()
        .map(|b| residual_of(jets, b).map(|r| r.value))
        .collect::<Result<_, _>>()?;
    let unknowns: Vec<Symbol> = (1..=basis.len() as u32).map(Symbol::Unknown).collect();
    let sol = solve_combination(&columns, unknowns)?;
    // Dependencies among the basis elements give null combinations; keep an
    // independent set of the resulting characteristics.
    let mut kept: Vec<Expr> = Vec::new();
    for v in &sol.basis {
        let mut q = Expr::zero();
        for (c, b) in v.iter().zip(basis) {
            if !c.is_zero() {
                q = &q + &b.mul_poly(c);
            }
        }
        if !q.is_zero() && (kept.is_empty() || span_coordinates(&kept, &q)?.is_none()) {
            kept.push(q);
        }
    }
    let characteristics: Vec<Characteristic> = kept.into_iter().map(Characteristic::new).collect();
    let checks: Vec<bool> = characteristics
        .par_iter()
        .map(|c| residual(jets, c).map(|r| r.is_zero))
        .collect::<Result<_, _>>()?;
    Ok(AnsatzSolution {
        basis: basis.to_vec(),
        characteristics,
        assumptions: sol.assumptions,
        verified: checks.into_iter().all(|b| b),
        equations: sol.equations,
        rank: sol.rank,
    })
}

/// Membership of `q` in the span of `span`: returns `(d, n)` with
/// `d q = sum_k n_k span_k`, `d` a nonzero polynomial in the parameters.
pub fn span_coordinates(span: &[Expr], q: &Expr) -> Result<Option<(Poly, Vec<Poly>)>, EngineError> {
    let mut columns = vec![q.clone()];
    columns.extend(span.iter().map(|s| -s));
    let unknowns: Vec<Symbol> = (0..columns.len() as u32).map(Symbol::Unknown).collect();
    let sol = solve_combination(&columns, unknowns)?;
    Ok(sol
        .basis
        .iter()
        .find(|v| !v[0].is_zero())
        .map(|v| (v[0].clone(), v[1..].to_vec())))
}

/// The weight `c*` for which `x u_x - t u_t - c u` has zero residual.
pub fn scaling_weight(jets: &JetSpace) -> Result<Option<Rational>, EngineError> {
    let base = crate::expr::parse("x*u[1,0] - t*u[0,1]").expect("static expression");
    let u = Expr::symbol(Symbol::U);
    let a = residual_of(jets, &base)?.value;
    let b = residual_of(jets, &-u)?.value;
    let sol = solve_combination(&[a, b], vec![Symbol::Unknown(0), Symbol::Unknown(1)])?;
    for v in &sol.basis {
        if let (Some(v0), Some(v1)) = (v[0].as_constant(), v[1].as_constant()) {
            if !v0.is_zero() {
                return Ok(Some(v1 / v0));
            }
        }
    }
    Ok(None)
}

/// Reduced jet coordinates of order at most `order`, starting with `u`.
pub fn reduced_jets(order: u16) -> Vec<Symbol> {
    let mut out = vec![Symbol::U];
    out.extend((1..=order).map(|i| Symbol::jet(i, 0)));
    out.extend((1..=order).map(|j| Symbol::jet(0, j)));
    out
}

/// All monomials in `symbols` of total degree at most `degree`, including 1.
pub fn monomials_up_to(symbols: &[Symbol], degree: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    let mut frontier = vec![(Monomial::one(), 0usize)];
    for _ in 0..degree {
        let mut next = Vec::new();
        for (m, start) in &frontier {
            for (k, &s) in symbols.iter().enumerate().skip(*start) {
                next.push((m.mul(&Monomial::var(s)), k));
            }
        }
        out.extend(next.iter().map(|(m, _)| m.clone()));
        frontier = next;
    }
    out
}

/// `{1, x, t}` times every jet monomial of order at most `order` and degree at
/// most `degree`.
pub fn polynomial_basis(order: u16, degree: u32) -> Vec<Expr> {
    let jets = reduced_jets(order);
    let mut out = Vec::new();
    for pre in [
        Monomial::one(),
        Monomial::var(Symbol::X),
        Monomial::var(Symbol::T),
    ] {
        for m in monomials_up_to(&jets, degree) {
            out.push(Expr::from_poly(Poly::term(Rational::one(), pre.mul(&m))));
        }
    }
    out
}

/// The ten monomials of first-order characteristics affine in `u_x`, `u_t`
/// with affine point components.
pub fn point_affine_basis() -> Vec<Expr> {
    [
        "u[1,0]", "u[0,1]", "x*u[1,0]", "x*u[0,1]", "t*u[1,0]", "t*u[0,1]", "u", "x*u", "t*u", "1",
    ]
    .iter()
    .map(|s| crate::expr::parse(s).expect("static basis"))
    .collect()
}

/// The radical kernel `2 b u_xxx^2 + a`.
pub fn third_order_kernel() -> Poly {
    crate::expr::parse("2*b*u[3,0]^2 + a")
        .expect("static kernel")
        .as_poly()
        .expect("polynomial")
}

/// Extra third-order monomials: high-degree terms and radical multiples.
pub fn third_order_extras() -> Vec<Expr> {
    let mut out: Vec<Expr> = ["u[2,0]^6*u[3,0]", "u[1,0]*u[2,0]^4", "u[1,0]^3", "u[0,3]"]
        .iter()
        .map(|s| crate::expr::parse(s).expect("static basis"))
        .collect();
    let r = third_order_kernel();
    for (m, k) in [
        ("1", -1),
        ("u[3,0]", -1),
        ("1", 1),
        ("u[3,0]", -3),
        ("u[3,0]^3", -3),
    ] {
        let m = crate::expr::parse(m).expect("static basis");
        out.push(&m * &Expr::radical(&r, k).expect("nonzero kernel"));
    }
    out
}

fn dedup(basis: Vec<Expr>) -> Vec<Expr> {
    let mut seen = std::collections::HashSet::new();
    basis
        .into_iter()
        .filter(|e| seen.insert(e.clone()))
        .collect()
}

/// The ansatz basis used by the bounded nonexistence check.
pub fn bounded_basis(order: u16, degree: u32) -> Vec<Expr> {
    let mut b = polynomial_basis(order, degree);
    if order == 3 {
        b.extend(third_order_extras());
    }
    dedup(b)
}

/// Result of an ansatz-bounded nonexistence check.
#[derive(Clone, Debug)]
pub struct NonexistenceReport {
    pub order: u16,
    pub degree: u32,
    pub basis_size: usize,
    pub lower_basis_size: usize,
    pub solution: AnsatzSolution,
    pub lower_dimension: usize,
    pub new_dimensions: usize,
}

impl NonexistenceReport {
    pub const LABEL: &'static str = "ansatz-bounded";
}

/// Solves over the full order/degree basis and over the basis of strictly
/// lower order, and reports the difference of dimensions.
pub fn bounded_nonexistence(
    jets: &JetSpace,
    order: u16,
    degree: u32,
    limit: usize,
) -> Result<NonexistenceReport, EngineError> {
    if !(1..=4).contains(&order) {
        return Err(EngineError::UnsupportedOrder(order as u32));
    }
    let basis = if order == 1 {
        point_affine_basis()
    } else {
        bounded_basis(order, degree)
    };
    if basis.len() > limit {
        return Err(EngineError::BasisTooLarge {
            size: basis.len(),
            limit,
        });
    }
    let lower: Vec<Expr> = if order == 1 {
        basis
            .iter()
            .filter(|e| jet_order_of(e) == 0)
            .cloned()
            .collect()
    } else {
        basis
            .iter()
            .filter(|e| jet_order_of(e) < order as u32)
            .cloned()
            .collect()
    };
    let solution = ansatz_solve(jets, &basis)?;
    let lower_dimension = if lower.is_empty() {
        0
    } else {
        ansatz_solve(jets, &lower)?.dimension()
    };
    Ok(NonexistenceReport {
        order,
        degree,
        basis_size: basis.len(),
        lower_basis_size: lower.len(),
        new_dimensions: solution.dimension() - lower_dimension,
        lower_dimension,
        solution,
    })
}

/// Splits a first-order characteristic space into point and proper contact
/// parts by counting generators that are not affine in `u_x`, `u_t`.
pub fn proper_contact_count(chars: &[Characteristic]) -> usize {
    let (ux, ut) = (Symbol::jet(1, 0), Symbol::jet(0, 1));
    chars
        .iter()
        .filter(|c| {
            let second = [
                c.q.diff(ux).diff(ux),
                c.q.diff(ux).diff(ut),
                c.q.diff(ut).diff(ut),
            ];
            second.iter().any(|e| !e.is_zero())
        })
        .count()
}
