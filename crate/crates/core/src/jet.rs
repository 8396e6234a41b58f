//! The reduced jet space of `u_xt = F(u, u_x, u_xx, ...)`.
//!
//! Reduced coordinates are `x`, `t`, `u`, the pure derivatives `u_{x^i}` and
//! `u_{t^j}`. Mixed derivatives are eliminated through the equation and its
//! differential consequences, and total derivatives are taken on the
//! solution manifold.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use thiserror::Error;

use crate::expr::{frac, Expr, ExprError, Poly, Symbol, Var};

/// Reduced forms of `u_{x^i t^j}` keyed by `(i, j)`.
type MixedCache = HashMap<(u16, u16), Arc<Poly>>;

/// Default cap on `i + j` for jet coordinates.
pub const DEFAULT_MAX_ORDER: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("jet coordinate {coord} exceeds the order cap {max}")]
    OrderCap { coord: String, max: u32 },
    #[error("{0} is not a mixed coordinate")]
    NotMixed(String),
    #[error("equation right-hand side {rhs} may only involve parameters, u and pure x-derivatives (found {symbol})")]
    InvalidRhs { rhs: String, symbol: String },
    #[error("equation right-hand side must be polynomial, got {0}")]
    RadicalRhs(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

fn coord_name(i: u16, j: u16) -> String {
    Symbol::jet(i, j).to_string()
}

/// Total derivative on the free jet space (no equation imposed).
///
/// `x` and `t` differentiate to one, `u_{x^i t^j}` to the next jet coordinate
/// and opaque functions by the chain rule over their arguments.
pub fn free_total(e: &Expr, var: Var) -> Expr {
    e.derive(&mut |s| free_image(s, var))
}

fn free_image(s: Symbol, var: Var) -> Poly {
    match s {
        Symbol::Var(v) if v == var => Poly::one(),
        Symbol::Jet(i, j) => match var {
            Var::X => Poly::var(Symbol::jet(i + 1, j)),
            Var::T => Poly::var(Symbol::jet(i, j + 1)),
        },
        Symbol::Opaque(d) => opaque_image(d, &mut |a| free_image(a, var)),
        _ => Poly::zero(),
    }
}

/// Chain rule through an opaque function: `D Q = sum_k Q_{arg_k} * D arg_k`.
fn opaque_image(d: crate::expr::OpaqueDeriv, image: &mut dyn FnMut(Symbol) -> Poly) -> Poly {
    let mut out = Poly::zero();
    for (slot, arg) in d.func.args().into_iter().enumerate() {
        let da = image(arg);
        if !da.is_zero() {
            out.add_assign_ref(&(&Poly::var(Symbol::Opaque(d.bump(slot))) * &da));
        }
    }
    out
}

/// An evolution-type equation `u_xt = F` with `F` polynomial in `u` and its
/// pure x-derivatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    rhs: Expr,
}

impl Equation {
    pub fn new(rhs: Expr) -> Result<Self, JetError> {
        if rhs.kernel().is_some() {
            return Err(JetError::RadicalRhs(rhs.to_string()));
        }
        for s in rhs.symbols() {
            let ok = match s {
                Symbol::Param(_) => true,
                Symbol::Jet(_, j) => j == 0,
                _ => false,
            };
            if !ok {
                return Err(JetError::InvalidRhs {
                    rhs: rhs.to_string(),
                    symbol: s.to_string(),
                });
            }
        }
        Ok(Equation { rhs })
    }

    /// `F = alpha u + (beta/3) D_x^2 (u^3)`, fully expanded.
    pub fn expand(alpha: &Expr, beta: &Expr) -> Self {
        let u = Expr::symbol(Symbol::U);
        let cube = &(&u * &u) * &u;
        let dd = free_total(&free_total(&cube, Var::X), Var::X);
        let rhs = &(alpha * &u) + &(beta * &dd).scale(&frac(1, 3));
        Equation::new(rhs).expect("alpha and beta are constants or parameters")
    }

    /// The short pulse equation with symbolic `a`, `b`.
    pub fn spe() -> Self {
        Self::expand(&Expr::symbol(Symbol::ALPHA), &Expr::symbol(Symbol::BETA))
    }

    pub fn rhs(&self) -> &Expr {
        &self.rhs
    }

    /// The jet coordinates `u_{x^i}` that occur in `F`, in increasing order.
    pub fn jet_symbols(&self) -> Vec<Symbol> {
        self.rhs
            .symbols()
            .into_iter()
            .filter(Symbol::is_jet)
            .collect()
    }

    /// `u_xt - F` as an expression on the free jet space.
    pub fn defect(&self) -> Expr {
        &Expr::symbol(Symbol::jet(1, 1)) - &self.rhs
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u[1,1] = {}", self.rhs)
    }
}

/// The reduced jet manifold of an [`Equation`], with memoized elimination of
/// mixed coordinates.
#[derive(Debug)]
pub struct JetSpace {
    equation: Equation,
    max_order: u32,
    memo: Option<RwLock<MixedCache>>,
}

impl JetSpace {
    pub fn new(equation: Equation, max_order: u32) -> Self {
        JetSpace {
            equation,
            max_order,
            memo: Some(RwLock::new(HashMap::new())),
        }
    }

    /// A jet space that recomputes every reduction.
    pub fn uncached(equation: Equation, max_order: u32) -> Self {
        JetSpace {
            equation,
            max_order,
            memo: None,
        }
    }

    pub fn spe() -> Self {
        Self::new(Equation::spe(), DEFAULT_MAX_ORDER)
    }

    pub fn equation(&self) -> &Equation {
        &self.equation
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    fn check(&self, i: u16, j: u16) -> Result<(), JetError> {
        if i as u32 + j as u32 > self.max_order {
            return Err(JetError::OrderCap {
                coord: coord_name(i, j),
                max: self.max_order,
            });
        }
        Ok(())
    }

    /// `u_{x^i t^j}` for `i, j >= 1` expressed in reduced coordinates.
    pub fn reduce_mixed(&self, i: u16, j: u16) -> Result<Expr, JetError> {
        if i == 0 || j == 0 {
            return Err(JetError::NotMixed(coord_name(i, j)));
        }
        Ok(Expr::from_poly((*self.mixed(i, j)?).clone()))
    }

    fn mixed(&self, i: u16, j: u16) -> Result<Arc<Poly>, JetError> {
        self.check(i, j)?;
        if let Some(memo) = &self.memo {
            if let Some(p) = memo.read().expect("jet memo poisoned").get(&(i, j)) {
                return Ok(p.clone());
            }
        }
        let value = if (i, j) == (1, 1) {
            self.equation.rhs.as_poly().expect("rhs is polynomial")
        } else if i >= 2 {
            let prev = self.mixed(i - 1, j)?;
            self.total_poly(&prev, Var::X)?
        } else {
            let prev = self.mixed(1, j - 1)?;
            self.total_poly(&prev, Var::T)?
        };
        let value = Arc::new(value);
        if let Some(memo) = &self.memo {
            memo.write()
                .expect("jet memo poisoned")
                .insert((i, j), value.clone());
        }
        Ok(value)
    }

    fn image(&self, s: Symbol, var: Var) -> Result<Poly, JetError> {
        Ok(match (s, var) {
            (Symbol::Var(v), _) if v == var => Poly::one(),
            (Symbol::Jet(i, j), Var::X) => {
                if j == 0 {
                    self.check(i + 1, 0)?;
                    Poly::var(Symbol::jet(i + 1, 0))
                } else {
                    (*self.mixed(i + 1, j)?).clone()
                }
            }
            (Symbol::Jet(i, j), Var::T) => {
                if i == 0 {
                    self.check(0, j + 1)?;
                    Poly::var(Symbol::jet(0, j + 1))
                } else {
                    (*self.mixed(i, j + 1)?).clone()
                }
            }
            (Symbol::Opaque(d), _) => {
                let mut err = None;
                let out = opaque_image(d, &mut |a| match self.image(a, var) {
                    Ok(p) => p,
                    Err(e) => {
                        err.get_or_insert(e);
                        Poly::zero()
                    }
                });
                if let Some(e) = err {
                    return Err(e);
                }
                out
            }
            _ => Poly::zero(),
        })
    }

    fn total_poly(&self, p: &Poly, var: Var) -> Result<Poly, JetError> {
        let err = RefCell::new(None);
        let out = p.derive(&mut |s| {
            self.image(s, var).unwrap_or_else(|e| {
                err.borrow_mut().get_or_insert(e);
                Poly::zero()
            })
        });
        match err.into_inner() {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }

    fn total(&self, e: &Expr, var: Var) -> Result<Expr, JetError> {
        let err = RefCell::new(None);
        let out = e.derive(&mut |s| {
            self.image(s, var).unwrap_or_else(|e| {
                err.borrow_mut().get_or_insert(e);
                Poly::zero()
            })
        });
        match err.into_inner() {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }

    /// Total x-derivative on the solution manifold.
    pub fn total_dx(&self, e: &Expr) -> Result<Expr, JetError> {
        self.total(e, Var::X)
    }

    /// Total t-derivative on the solution manifold.
    pub fn total_dt(&self, e: &Expr) -> Result<Expr, JetError> {
        self.total(e, Var::T)
    }

    /// Replaces every mixed coordinate of `e` by its reduction.
    pub fn to_manifold(&self, e: &Expr) -> Result<Expr, JetError> {
        let mut bindings = HashMap::new();
        for s in e.symbols() {
            if let Symbol::Jet(i, j) = s {
                if i > 0 && j > 0 {
                    bindings.insert(s, self.reduce_mixed(i, j)?);
                }
            }
        }
        if bindings.is_empty() {
            return Ok(e.clone());
        }
        Ok(e.substitute(&bindings)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, rat, FuncId};

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn spe_expansion() {
        assert_eq!(
            *Equation::spe().rhs(),
            p("a*u + 2*b*u*u[1,0]^2 + b*u^2*u[2,0]")
        );
        let special = Equation::expand(&Expr::int(1), &Expr::rational(frac(1, 2)));
        assert_eq!(*special.rhs(), p("u + u*u[1,0]^2 + u^2*u[2,0]/2"));
        assert_eq!(*Equation::expand(&p("a"), &Expr::zero()).rhs(), p("a*u"));
    }

    #[test]
    fn rejects_t_derivatives_in_rhs() {
        assert!(matches!(
            Equation::new(p("u[0,1]")),
            Err(JetError::InvalidRhs { .. })
        ));
        assert!(matches!(
            Equation::new(p("x*u")),
            Err(JetError::InvalidRhs { .. })
        ));
    }

    #[test]
    fn first_reductions() {
        let j = JetSpace::spe();
        assert_eq!(j.reduce_mixed(1, 1).unwrap(), *j.equation().rhs());
        assert_eq!(
            j.reduce_mixed(2, 1).unwrap(),
            p("a*u[1,0] + 2*b*u[1,0]^3 + 6*b*u*u[1,0]*u[2,0] + b*u^2*u[3,0]")
        );
        assert!(matches!(j.reduce_mixed(0, 3), Err(JetError::NotMixed(_))));
        assert!(matches!(
            j.reduce_mixed(7, 6),
            Err(JetError::OrderCap { .. })
        ));
    }

    #[test]
    fn linear_case_closed_form() {
        let j = JetSpace::new(Equation::expand(&p("a"), &Expr::zero()), 12);
        for i in 1..6u16 {
            for k in 1..6u16 {
                let expected = if i >= k {
                    Expr::symbol(Symbol::jet(i - k, 0))
                } else {
                    Expr::symbol(Symbol::jet(0, k - i))
                };
                let expected = &p("a").pow(i.min(k) as i32).unwrap() * &expected;
                assert_eq!(j.reduce_mixed(i, k).unwrap(), expected, "u[{i},{k}]");
            }
        }
    }

    #[test]
    fn total_derivative_examples() {
        let j = JetSpace::spe();
        assert_eq!(j.total_dx(&p("u")).unwrap(), p("u[1,0]"));
        assert_eq!(j.total_dx(&p("u[0,1]")).unwrap(), *j.equation().rhs());
        assert_eq!(
            j.total_dt(&p("u[1,0]")).unwrap(),
            j.total_dx(&p("u[0,1]")).unwrap()
        );
        assert_eq!(j.total_dx(&p("x*t")).unwrap(), p("t"));
    }

    #[test]
    fn opaque_chain_rule() {
        let args = [
            Symbol::X,
            Symbol::T,
            Symbol::U,
            Symbol::jet(1, 0),
            Symbol::jet(0, 1),
        ];
        let q = FuncId::declare("Q", &args).unwrap();
        let j = JetSpace::spe();
        let got = j.total_dx(&Expr::symbol(Symbol::opaque(q, &[]))).unwrap();
        let sym = |slots: &[usize]| Expr::symbol(Symbol::opaque(q, slots));
        let expected = &(&(&sym(&[0]) + &(&p("u[1,0]") * &sym(&[2])))
            + &(&p("u[2,0]") * &sym(&[3])))
            + &(j.equation().rhs() * &sym(&[4]));
        assert_eq!(got, expected);
    }

    #[test]
    fn memo_is_transparent() {
        let cached = JetSpace::spe();
        let fresh = JetSpace::uncached(Equation::spe(), 12);
        for (i, k) in [(1, 3), (3, 1), (2, 2), (4, 1), (1, 4)] {
            assert_eq!(
                cached.reduce_mixed(i, k).unwrap(),
                fresh.reduce_mixed(i, k).unwrap()
            );
            assert_eq!(
                cached.reduce_mixed(i, k).unwrap(),
                fresh.reduce_mixed(i, k).unwrap()
            );
        }
    }

    #[test]
    fn consistency_with_reduction() {
        let j = JetSpace::spe();
        for i in 1..5u16 {
            let e = Expr::symbol(Symbol::jet(i, 0));
            assert_eq!(j.total_dt(&e).unwrap(), j.reduce_mixed(i, 1).unwrap());
            let e = Expr::symbol(Symbol::jet(0, i));
            assert_eq!(j.total_dx(&e).unwrap(), j.reduce_mixed(1, i).unwrap());
        }
    }

    #[test]
    fn mixed_partials_commute_on_manifold() {
        let j = JetSpace::spe();
        for s in [
            "u[1,0]*u[0,2]",
            "x*u^2*u[0,1]",
            "t*u[2,0]^2 + u[0,3]",
            "u[0,1]^2*u[3,0]",
        ] {
            let e = p(s);
            let xt = j.total_dx(&j.total_dt(&e).unwrap()).unwrap();
            let tx = j.total_dt(&j.total_dx(&e).unwrap()).unwrap();
            assert_eq!(xt, tx, "{s}");
        }
    }

    #[test]
    fn free_total_matches_rational_parameter_expansion() {
        let e = p("u^3");
        let d = free_total(&e, Var::X);
        assert_eq!(d, p("3*u^2*u[1,0]"));
        assert_eq!(free_total(&p("x*u[0,1]"), Var::T), p("x*u[0,2]"));
        assert_eq!(free_total(&Expr::rational(rat(4)), Var::T), Expr::zero());
    }
}
