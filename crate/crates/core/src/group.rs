//! One-parameter groups of affine point symmetries, their action on the
//! equation and on explicit solutions, and reductions to ODEs.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::engine::{
    ansatz_solve, point_affine_basis, residual_of, scaling_weight, span_coordinates, EngineError,
};
use crate::expoly::{ExpPoly, NVARS};
use crate::expr::{Expr, ExprError, Monomial, Param, Poly, Rational, Symbol};
use crate::fields::{characteristic_of, PointVectorField};
use crate::jet::{Equation, JetSpace};
use crate::lie::{exp_mat_mul, exp_matrix, ExpMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("component {0} is not affine in (x, t, u) with rational coefficients")]
    NonAffine(String),
    #[error("the affine system has eigenvalues that are not integers")]
    NonIntegerSpectrum,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("not a symmetry: pullback minus {lambda} times the equation is {residual}")]
    NotSymmetry { lambda: String, residual: String },
    #[error("{0} is not a polynomial in x and t")]
    NotRepresentable(String),
    #[error("substituted equation is not a function of the invariant: {0}")]
    NotInvariant(String),
    #[error("point symmetry algebra is not of the expected form: {0}")]
    UnexpectedAlgebra(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

const COORDS: [Symbol; 3] = [Symbol::X, Symbol::T, Symbol::U];
const COORD_NAMES: [&str; 3] = ["x", "t", "u"];

/// The flow `exp(eps v)` of an affine point field, as a 4x4 matrix acting on
/// `(x, t, u, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    pub generator: PointVectorField,
    pub matrix: ExpMatrix,
}

fn affine_row(c: &Expr) -> Result<Vec<Rational>, GroupError> {
    let bad = || GroupError::NonAffine(c.to_string());
    let p = c.as_poly().ok_or_else(bad)?;
    let mut row = vec![Rational::zero(); 4];
    for (m, q) in p.terms() {
        let slot = match m.factors() {
            [] => 3,
            [(s, 1)] => COORDS.iter().position(|c| c == s).ok_or_else(bad)?,
            _ => return Err(bad()),
        };
        row[slot] = q.clone();
    }
    Ok(row)
}

/// Solves `d(x, t, u)/d eps = (xi, tau, eta)` exactly.
pub fn flow(v: &PointVectorField) -> Result<GroupElement, GroupError> {
    let mut n: Vec<Vec<Rational>> = v
        .components()
        .iter()
        .map(|c| affine_row(c))
        .collect::<Result<_, _>>()?;
    n.push(vec![Rational::zero(); 4]);
    let matrix = exp_matrix(&n, 0).ok_or(GroupError::NonIntegerSpectrum)?;
    Ok(GroupElement {
        generator: v.clone(),
        matrix,
    })
}

fn identity4() -> ExpMatrix {
    (0..4)
        .map(|i| {
            (0..4)
                .map(|j| {
                    if i == j {
                        ExpPoly::one()
                    } else {
                        ExpPoly::zero()
                    }
                })
                .collect()
        })
        .collect()
}

fn map_entries(m: &ExpMatrix, f: impl Fn(&ExpPoly) -> ExpPoly) -> ExpMatrix {
    m.iter().map(|r| r.iter().map(&f).collect()).collect()
}

/// How the group parameter is instantiated when leaving exponential
/// polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupParam {
    /// Keep `eps` as a symbol; valid when no exponentials occur.
    Symbolic,
    /// A rational value of `eps`; valid when no exponentials occur or it is 0.
    Value(Rational),
    /// A positive rational value of `e^eps`; valid when no powers of `eps`
    /// occur.
    Exp(Rational),
}

/// Converts an exponential polynomial in the first parameter to an `Expr`.
pub fn instantiate(p: &ExpPoly, param: &GroupParam) -> Option<Expr> {
    let eps = Expr::symbol(Symbol::Param(Param::Eps));
    let mut out = Expr::zero();
    for (m, q) in p.terms() {
        if m.pow[1..].iter().any(|&k| k != 0) || m.exp[1..].iter().any(|&k| k != 0) {
            return None;
        }
        let term = match param {
            GroupParam::Symbolic => {
                if m.exp[0] != 0 {
                    return None;
                }
                eps.pow(m.pow[0] as i32).ok()?.scale(q)
            }
            GroupParam::Value(e) => {
                if m.exp[0] != 0 && !e.is_zero() {
                    return None;
                }
                Expr::rational(q * num_traits::pow(e.clone(), m.pow[0] as usize))
            }
            GroupParam::Exp(l) => {
                if m.pow[0] != 0 || l <= &Rational::zero() {
                    return None;
                }
                let pw = num_traits::pow(l.clone(), m.exp[0].unsigned_abs() as usize);
                Expr::rational(if m.exp[0] >= 0 { q * pw } else { q / pw })
            }
        };
        out = &out + &term;
    }
    Some(out)
}

impl GroupElement {
    pub fn identity(generator: PointVectorField) -> Self {
        GroupElement {
            generator,
            matrix: identity4(),
        }
    }

    /// `(coefficients of x, t, u, 1)` in the image of coordinate `k`.
    pub fn image(&self, k: usize) -> &[ExpPoly] {
        &self.matrix[k]
    }

    pub fn image_string(&self, k: usize) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (j, c) in self.matrix[k].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let c_text = c.to_string();
            let single = c.terms().count() == 1;
            let piece = if j == 3 {
                c_text
            } else if c.as_constant().is_some_and(|q| q.is_one()) {
                COORD_NAMES[j].to_string()
            } else if single {
                format!("{c_text}*{}", COORD_NAMES[j])
            } else {
                format!("({c_text})*{}", COORD_NAMES[j])
            };
            parts.push(piece);
        }
        if parts.is_empty() {
            return "0".into();
        }
        let mut s = parts[0].clone();
        for p in &parts[1..] {
            match p.strip_prefix('-') {
                Some(rest) => {
                    s.push_str(" - ");
                    s.push_str(rest);
                }
                None => {
                    s.push_str(" + ");
                    s.push_str(p);
                }
            }
        }
        s
    }

    /// `g(eps) g(eps2) = g(eps + eps2)`.
    pub fn satisfies_group_law(&self) -> bool {
        let second = map_entries(&self.matrix, |c| c.rename(0, 1));
        let product = exp_mat_mul(&self.matrix, &second);
        product == map_entries(&self.matrix, |c| c.shift(0, 1))
    }

    pub fn is_identity_at_zero(&self) -> bool {
        let zero: [Rational; NVARS] = std::array::from_fn(|_| Rational::zero());
        self.matrix.iter().enumerate().all(|(i, r)| {
            r.iter().enumerate().all(|(j, c)| {
                c.eval(&zero)
                    == Some(if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    })
            })
        })
    }

    /// For maps `x -> p x + s1`, `t -> q t + s2`, `u -> r u + s3`, returns
    /// `([p, q, r], [s1, s2, s3])`.
    pub fn diagonal_form(&self) -> Option<([ExpPoly; 3], [ExpPoly; 3])> {
        for i in 0..3 {
            for j in 0..3 {
                if i != j && !self.matrix[i][j].is_zero() {
                    return None;
                }
            }
        }
        let d = std::array::from_fn(|i| self.matrix[i][i].clone());
        let s = std::array::from_fn(|i| self.matrix[i][3].clone());
        Some((d, s))
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(x, t, u) -> ({}, {}, {})",
            self.image_string(0),
            self.image_string(1),
            self.image_string(2)
        )
    }
}

/// The exponent `k` when `p = e^(k eps)` exactly.
fn pure_exponent(p: &ExpPoly) -> Option<i32> {
    let mut it = p.terms();
    let (m, q) = it.next()?;
    if it.next().is_some() || !q.is_one() || m.pow.iter().any(|&k| k != 0) {
        return None;
    }
    m.exp[1..].iter().all(|&k| k == 0).then_some(m.exp[0])
}

/// `Delta o g = lambda Delta` with `lambda = e^(k eps)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariance {
    pub k: i32,
    pub lambda: ExpPoly,
}

fn residual_string(terms: &BTreeMap<Monomial, ExpPoly>) -> String {
    let parts: Vec<String> = terms
        .iter()
        .rev()
        .map(|(m, c)| {
            let mono = Expr::from_poly(Poly::term(Rational::one(), m.clone()));
            format!("({c})*{mono}")
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Pulls `u_xt - F` back through the prolongation of a diagonal affine map and
/// returns the conformal factor.
pub fn equation_invariance(g: &GroupElement, eq: &Equation) -> Result<Invariance, GroupError> {
    let (d, s) = g.diagonal_form().ok_or_else(|| {
        GroupError::Unsupported("only maps of the form x -> p x + s are handled".into())
    })?;
    let mut k = [0i32; 3];
    for i in 0..3 {
        k[i] = pure_exponent(&d[i]).ok_or_else(|| {
            GroupError::Unsupported(format!("scaling factor {} of {}", d[i], COORD_NAMES[i]))
        })?;
    }
    // u_{x^i} -> e^((k_u - i k_x) eps) u_{x^i}, u -> r u + s3; u_xt scales by
    // e^((k_u - k_x - k_t) eps).
    let lam_k = k[2] - k[0] - k[1];
    let lambda = ExpPoly::exp(0, lam_k);
    let f = eq
        .rhs()
        .as_poly()
        .ok_or_else(|| GroupError::Unsupported("radical right-hand side".into()))?;
    let mut pulled: BTreeMap<Monomial, ExpPoly> = BTreeMap::new();
    let mut push = |m: Monomial, c: ExpPoly| {
        let e = pulled.entry(m.clone()).or_insert_with(ExpPoly::zero);
        *e = &*e + &c;
        if e.is_zero() {
            pulled.remove(&m);
        }
    };
    for (m, q) in f.terms() {
        let mut factor = ExpPoly::constant(q.clone());
        let mut rest = Monomial::one();
        let mut udeg = 0;
        for &(sym, e) in m.factors() {
            match sym {
                Symbol::Jet(0, 0) => udeg = e,
                Symbol::Jet(i, 0) => {
                    let w = ExpPoly::exp(0, k[2] - i as i32 * k[0]);
                    for _ in 0..e {
                        factor = &factor * &w;
                    }
                    rest = rest.mul(&Monomial::power(sym, e));
                }
                _ => rest = rest.mul(&Monomial::power(sym, e)),
            }
        }
        // (r u + s3)^udeg
        let r = ExpPoly::exp(0, k[2]);
        let mut binom = Rational::one();
        for j in 0..=udeg {
            let mut c = &factor * &ExpPoly::constant(binom.clone());
            for _ in 0..j {
                c = &c * &r;
            }
            for _ in j..udeg {
                c = &c * &s[2];
            }
            push(rest.mul(&Monomial::power(Symbol::U, j)), c);
            binom = binom * Rational::from_integer((udeg - j).into())
                / Rational::from_integer((j + 1).into());
        }
    }
    // lambda Delta - Delta o g = F o g - lambda F
    for (m, q) in f.terms() {
        push(m.clone(), lambda.scale(&-q.clone()));
    }
    if pulled.is_empty() {
        Ok(Invariance { k: lam_k, lambda })
    } else {
        Err(GroupError::NotSymmetry {
            lambda: lambda.to_string(),
            residual: residual_string(&pulled),
        })
    }
}

/// Image of the graph `u = f(x, t)` under `g`, written again as a function of
/// `(x, t)`.
pub fn transform_solution(
    g: &GroupElement,
    f: &Expr,
    param: &GroupParam,
) -> Result<Expr, GroupError> {
    if f.kernel().is_some()
        || f.symbols().iter().any(|s| {
            s.is_jet() || matches!(s, Symbol::Opaque(_) | Symbol::OdeVar | Symbol::OdeFn(_))
        })
    {
        return Err(GroupError::NotRepresentable(f.to_string()));
    }
    let (d, s) = g.diagonal_form().ok_or_else(|| {
        GroupError::Unsupported("only maps of the form x -> p x + s are handled".into())
    })?;
    let inst = |p: &ExpPoly| {
        instantiate(p, param).ok_or_else(|| {
            GroupError::Unsupported(format!("{p} cannot be instantiated with {param:?}"))
        })
    };
    let mut bindings = HashMap::new();
    for i in 0..2 {
        let p = inst(&d[i])?
            .as_rational()
            .filter(|p| !p.is_zero())
            .ok_or_else(|| {
                GroupError::Unsupported(format!("scaling {} is not a constant", d[i]))
            })?;
        // x = (x' - s) / p
        let back = (&Expr::symbol(COORDS[i]) - &inst(&s[i])?).scale(&p.recip());
        bindings.insert(COORDS[i], back);
    }
    let moved = f.substitute(&bindings)?;
    Ok(&(&moved * &inst(&d[2])?) + &inst(&s[2])?)
}

/// The point symmetry algebra found by the solver, in the basis
/// `d/dx`, `d/dt`, `x d/dx - t d/dt + c* u d/du`.
#[derive(Clone, Debug)]
pub struct PointAlgebra {
    pub weight: Rational,
    pub fields: [PointVectorField; 3],
    pub dimension: usize,
    pub assumptions: Vec<Poly>,
}

pub fn derived_point_algebra(jets: &JetSpace) -> Result<PointAlgebra, GroupError> {
    let sol = ansatz_solve(jets, &point_affine_basis())?;
    let weight = scaling_weight(jets)?
        .ok_or_else(|| GroupError::UnexpectedAlgebra("no scaling generator".into()))?;
    let x = Expr::symbol(Symbol::X);
    let t = Expr::symbol(Symbol::T);
    let fields = [
        PointVectorField::from_ints(1, 0, 0),
        PointVectorField::from_ints(0, 1, 0),
        PointVectorField::new(
            x,
            -&t,
            &Expr::rational(weight.clone()) * &Expr::symbol(Symbol::U),
        ),
    ];
    let span: Vec<Expr> = sol.characteristics.iter().map(|c| c.q.clone()).collect();
    for v in &fields {
        let q = characteristic_of(v).q;
        if !residual_of(jets, &q)?.is_zero || span_coordinates(&span, &q)?.is_none() {
            return Err(GroupError::UnexpectedAlgebra(format!(
                "{v} is not in the solution space"
            )));
        }
    }
    if sol.dimension() != 3 {
        return Err(GroupError::UnexpectedAlgebra(format!(
            "dimension {} instead of 3",
            sol.dimension()
        )));
    }
    Ok(PointAlgebra {
        weight,
        fields,
        dimension: sol.dimension(),
        assumptions: sol.assumptions,
    })
}

/// Representatives that can be reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReductionRep {
    /// `v1 + a v2`.
    TravelingA(Expr),
    /// `b v1 + v2`.
    TravelingB(Expr),
    /// `x d/dx - t d/dt + weight u d/du`.
    Scaling(i32),
}

impl fmt::Display for ReductionRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReductionRep::TravelingA(a) => write!(f, "v1 + ({a})*v2"),
            ReductionRep::TravelingB(b) => write!(f, "({b})*v1 + v2"),
            ReductionRep::Scaling(_) => f.write_str("v3"),
        }
    }
}

/// The ODE `lhs = rhs` in `z`, `w(z)` obtained from an invariant ansatz.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedOde {
    pub representative: String,
    /// `z` in terms of `x`, `t`.
    pub invariant: Expr,
    /// `u` in terms of `x`, `t`, `w`.
    pub similarity: Expr,
    pub lhs: Expr,
    pub rhs: Expr,
    /// Monomial `M` in `x`, `t` with `(u_xt - F)|_ansatz = M ode(z(x, t))`.
    pub multiplier: Expr,
    /// `(u_xt - F)|_ansatz - M ode(z(x, t))`, zero when the reduction is
    /// consistent.
    pub back_substitution: Expr,
}

impl ReducedOde {
    pub fn ode(&self) -> Expr {
        &self.lhs - &self.rhs
    }
}

impl fmt::Display for ReducedOde {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

/// Derivative along `var` of an expression in `x`, `t`, `w^(k)(z(x, t))`.
fn ansatz_derivative(e: &Expr, var: Symbol, z: &Poly) -> Expr {
    let dz = z.diff(var);
    e.derive(&mut |s| match s {
        s if s == var => Poly::one(),
        Symbol::OdeFn(k) => &Poly::var(Symbol::OdeFn(k + 1)) * &dz,
        _ => Poly::zero(),
    })
}

fn is_xt(s: Symbol) -> bool {
    matches!(s, Symbol::Var(_))
}

/// Divides by the common `x`, `t` monomial and rewrites powers of `x t` as
/// powers of `z`.
fn to_invariant(p: &Poly, content: &Monomial, monomial_z: bool) -> Result<Poly, GroupError> {
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        let q = m
            .div(content)
            .ok_or_else(|| GroupError::NotInvariant(Expr::from_poly(p.clone()).to_string()))?;
        let (xt, rest) = q.partition(is_xt);
        let (ex, et) = (xt.exponent(Symbol::X), xt.exponent(Symbol::T));
        if !(xt.is_one() || (monomial_z && ex == et)) {
            return Err(GroupError::NotInvariant(
                Expr::from_poly(p.clone()).to_string(),
            ));
        }
        out.add_term(rest.mul(&Monomial::power(Symbol::OdeVar, ex)), c.clone());
    }
    Ok(out)
}

/// Substitutes the invariant ansatz of `rep` into `u_xt = F`.
pub fn reduce(eq: &Equation, rep: &ReductionRep) -> Result<ReducedOde, GroupError> {
    let x = Expr::symbol(Symbol::X);
    let t = Expr::symbol(Symbol::T);
    let w = Expr::symbol(Symbol::OdeFn(0));
    let (z, u, monomial_z) = match rep {
        ReductionRep::TravelingA(a) => (&t - &(a * &x), w.clone(), false),
        ReductionRep::TravelingB(b) => (&x - &(b * &t), w.clone(), false),
        ReductionRep::Scaling(c) => {
            let c = *c;
            let prefactor = if c >= 0 { x.pow(c)? } else { t.pow(-c)? };
            (&x * &t, &prefactor * &w, true)
        }
    };
    let zp = z
        .as_poly()
        .ok_or_else(|| GroupError::NotRepresentable(z.to_string()))?;
    let mut xs = vec![u.clone()];
    let order = eq
        .jet_symbols()
        .iter()
        .map(|s| match s {
            Symbol::Jet(i, _) => *i,
            _ => 0,
        })
        .max()
        .unwrap_or(0);
    for _ in 0..order {
        let next = ansatz_derivative(xs.last().unwrap(), Symbol::X, &zp);
        xs.push(next);
    }
    let uxt = ansatz_derivative(&ansatz_derivative(&u, Symbol::X, &zp), Symbol::T, &zp);
    let bindings: HashMap<Symbol, Expr> = xs
        .iter()
        .enumerate()
        .map(|(i, e)| (Symbol::jet(i as u16, 0), e.clone()))
        .collect();
    let f_sub = eq.rhs().substitute(&bindings)?;
    let delta = &uxt - &f_sub;
    let poly = |e: &Expr| {
        e.as_poly()
            .ok_or_else(|| GroupError::NotRepresentable(e.to_string()))
    };
    let (dp, lp, rp) = (poly(&delta)?, poly(&uxt)?, poly(&f_sub)?);
    let content = dp
        .terms()
        .map(|(m, _)| m.partition(is_xt).0)
        .reduce(|a, b| a.gcd(&b))
        .unwrap_or_else(Monomial::one);
    let lhs = Expr::from_poly(to_invariant(&lp, &content, monomial_z)?);
    let rhs = Expr::from_poly(to_invariant(&rp, &content, monomial_z)?);
    let multiplier = Expr::from_poly(Poly::term(Rational::one(), content));
    let mut zb = HashMap::new();
    zb.insert(Symbol::OdeVar, z.clone());
    let ode_xt = (&lhs - &rhs).substitute(&zb)?;
    let back_substitution = &delta - &(&multiplier * &ode_xt);
    Ok(ReducedOde {
        representative: rep.to_string(),
        invariant: z,
        similarity: u,
        lhs,
        rhs,
        multiplier,
        back_substitution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, rat};

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn translation_flows() {
        let g = flow(&PointVectorField::from_ints(1, 0, 0)).unwrap();
        assert_eq!(g.to_string(), "(x, t, u) -> (x + eps, t, u)");
        let g = flow(&PointVectorField::from_ints(0, 1, 0)).unwrap();
        assert_eq!(g.to_string(), "(x, t, u) -> (x, t + eps, u)");
        assert!(g.satisfies_group_law() && g.is_identity_at_zero());
    }

    #[test]
    fn scaling_flow() {
        let v = PointVectorField::new(p("x"), p("-t"), p("u"));
        let g = flow(&v).unwrap();
        assert_eq!(
            g.to_string(),
            "(x, t, u) -> (exp(eps)*x, exp(-eps)*t, exp(eps)*u)"
        );
        assert!(g.satisfies_group_law());
        let inv = equation_invariance(&g, &Equation::spe()).unwrap();
        assert_eq!(inv.k, 1);
    }

    #[test]
    fn mixed_affine_flow() {
        // d/deps (x, u) = (1, x): u -> u + eps x + eps^2/2
        let v = PointVectorField::new(p("1"), p("0"), p("x"));
        let g = flow(&v).unwrap();
        assert!(g.satisfies_group_law() && g.is_identity_at_zero());
        assert_eq!(g.image_string(2), "eps*x + u + 1/2*eps^2");
    }

    #[test]
    fn non_symmetries() {
        let eq = Equation::spe();
        for v in [
            PointVectorField::new(p("0"), p("0"), p("u")),
            PointVectorField::new(p("x"), p("0"), p("0")),
            PointVectorField::from_ints(0, 0, 1),
        ] {
            let g = flow(&v).unwrap();
            assert!(
                matches!(
                    equation_invariance(&g, &eq),
                    Err(GroupError::NotSymmetry { .. })
                ),
                "{v}"
            );
        }
        let g = flow(&PointVectorField::from_ints(1, 0, 0)).unwrap();
        assert_eq!(equation_invariance(&g, &eq).unwrap().k, 0);
    }

    #[test]
    fn transformed_solutions() {
        let g = flow(&PointVectorField::from_ints(1, 0, 0)).unwrap();
        let out = transform_solution(&g, &p("x*t"), &GroupParam::Symbolic).unwrap();
        assert_eq!(out, p("(x - eps)*t"));
        let g = flow(&PointVectorField::new(p("x"), p("-t"), p("u"))).unwrap();
        let out = transform_solution(&g, &p("x*t + x"), &GroupParam::Exp(rat(2))).unwrap();
        // u' = 2 f(x/2, 2t)
        assert_eq!(out, p("2*x*t + x"));
        assert!(transform_solution(&g, &p("x"), &GroupParam::Symbolic).is_err());
    }

    #[test]
    fn traveling_wave_reduction() {
        let eq = Equation::spe();
        let r = reduce(&eq, &ReductionRep::TravelingA(p("2"))).unwrap();
        assert_eq!(r.lhs, p("-2*w[2]"));
        assert_eq!(r.rhs, p("a*w + 8*b*w*w[1]^2 + 4*b*w^2*w[2]"));
        assert!(r.back_substitution.is_zero());
        let r = reduce(&eq, &ReductionRep::TravelingA(p("0"))).unwrap();
        assert!(r.lhs.is_zero());
        assert_eq!(r.rhs, p("a*w"));
    }

    #[test]
    fn scaling_reduction() {
        let r = reduce(&Equation::spe(), &ReductionRep::Scaling(1)).unwrap();
        assert_eq!(r.multiplier, p("x"));
        assert_eq!(r.lhs, p("2*w[1] + z*w[2]"));
        assert_eq!(
            r.rhs,
            p("a*w + 2*b*w*(w + z*w[1])^2 + b*z*w^2*(2*w[1] + z*w[2])")
        );
        assert!(r.back_substitution.is_zero());
    }

    #[test]
    fn derived_algebra() {
        let alg = derived_point_algebra(&JetSpace::spe()).unwrap();
        assert_eq!(alg.weight, rat(1));
        assert_eq!(alg.dimension, 3);
    }
}
