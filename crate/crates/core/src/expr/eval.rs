use std::collections::HashMap;

use num_traits::{One, Signed, ToPrimitive, Zero};

use super::expression::{rat_powi, Expr};
use super::poly::Poly;
use super::symbol::Symbol;
use super::{ExprError, Rational};

/// An element `a + b sqrt(r)` of the quadratic extension `Q(sqrt(r))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadValue {
    pub a: Rational,
    pub b: Rational,
    pub r: Rational,
}

/// Exact square root of a nonnegative rational, if it is one.
pub fn rational_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer(), x.denom());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == *n && &sd * &sd == *d).then(|| Rational::new(sn, sd))
}

impl QuadValue {
    pub fn rational(a: Rational, r: Rational) -> Self {
        QuadValue {
            a,
            b: Rational::zero(),
            r,
        }
    }

    pub fn add(&self, o: &QuadValue) -> QuadValue {
        debug_assert_eq!(self.r, o.r);
        QuadValue {
            a: &self.a + &o.a,
            b: &self.b + &o.b,
            r: self.r.clone(),
        }
    }

    pub fn mul(&self, o: &QuadValue) -> QuadValue {
        QuadValue {
            a: &self.a * &o.a + &self.b * &o.b * &self.r,
            b: &self.a * &o.b + &self.b * &o.a,
            r: self.r.clone(),
        }
    }

    /// Exact zero test in the extension.
    pub fn is_zero(&self) -> bool {
        match rational_sqrt(&self.r) {
            Some(s) => (&self.a + &self.b * s).is_zero(),
            None => self.a.is_zero() && self.b.is_zero(),
        }
    }

    /// The value as a rational, when it is one.
    pub fn to_rational(&self) -> Option<Rational> {
        if self.b.is_zero() {
            return Some(self.a.clone());
        }
        rational_sqrt(&self.r).map(|s| &self.a + &self.b * s)
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let r = self.r.to_f64().unwrap_or(f64::NAN);
        a + b * r.sqrt()
    }
}

/// Evaluation entry points.
pub trait Quadratic {
    /// Exact value in `Q(sqrt(R(point)))`.
    fn eval_quadratic(&self, point: &HashMap<Symbol, Rational>) -> Result<QuadValue, ExprError>;
    /// Exact rational value; the radicand must evaluate to a rational square.
    fn eval_at(&self, point: &HashMap<Symbol, Rational>) -> Result<Rational, ExprError>;
    /// Floating evaluation (f64 precision).
    fn eval_f64(&self, point: &HashMap<Symbol, Rational>) -> Result<f64, ExprError>;
}

fn eval_poly(p: &Poly, point: &HashMap<Symbol, Rational>) -> Result<Rational, ExprError> {
    p.eval(point).map_err(|s| ExprError::Unbound(s.to_string()))
}

impl Quadratic for Expr {
    fn eval_quadratic(&self, point: &HashMap<Symbol, Rational>) -> Result<QuadValue, ExprError> {
        let r = match self.kernel() {
            Some(k) => eval_poly(k, point)?,
            None => Rational::one(),
        };
        let mut acc = QuadValue::rational(Rational::zero(), r.clone());
        for part in self.parts() {
            let v = eval_poly(&part.poly, point)?;
            if part.power != 0 && r.is_zero() {
                if part.power < 0 {
                    return Err(ExprError::DivisionByZero);
                }
                continue;
            }
            let par = part.power.rem_euclid(2);
            let scale = rat_powi(&r, (part.power - par) / 2);
            let term = if par == 0 {
                QuadValue::rational(v * scale, r.clone())
            } else {
                QuadValue {
                    a: Rational::zero(),
                    b: v * scale,
                    r: r.clone(),
                }
            };
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    fn eval_at(&self, point: &HashMap<Symbol, Rational>) -> Result<Rational, ExprError> {
        let q = self.eval_quadratic(point)?;
        if q.b.is_zero() {
            return Ok(q.a);
        }
        if q.r.is_negative() {
            return Err(ExprError::NegativeRadicand(q.r.to_string()));
        }
        q.to_rational()
            .ok_or_else(|| ExprError::Irrational(q.r.to_string()))
    }

    fn eval_f64(&self, point: &HashMap<Symbol, Rational>) -> Result<f64, ExprError> {
        let q = self.eval_quadratic(point)?;
        if !q.b.is_zero() && q.r.is_negative() {
            return Err(ExprError::NegativeRadicand(q.r.to_string()));
        }
        Ok(q.to_f64())
    }
}
