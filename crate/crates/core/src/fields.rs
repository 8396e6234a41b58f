//! Point and contact vector fields, characteristics and brackets.

use std::fmt;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{linear_solve, Expr, ExprError, Rational, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a contact characteristic (order {1} > 1)")]
    NotContact(String, u32),
    #[error("field {0} is not a point field; brackets are only defined for point fields")]
    NotPoint(String),
    #[error("bracket [v{i}, v{j}] = {bracket} does not lie in the span of the basis")]
    NotClosed { i: usize, j: usize, bracket: String },
    #[error("structure constant of [v{i}, v{j}] is not rational")]
    Irrational { i: usize, j: usize },
    #[error("basis fields are linearly dependent")]
    Dependent,
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Components `(xi, tau, eta)` along `d/dx`, `d/dt`, `d/du`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointVectorField {
    pub xi: Expr,
    pub tau: Expr,
    pub eta: Expr,
}

fn is_point_symbol(s: Symbol) -> bool {
    matches!(s, Symbol::Var(_) | Symbol::Param(_) | Symbol::Jet(0, 0))
}

impl PointVectorField {
    pub fn new(xi: Expr, tau: Expr, eta: Expr) -> Self {
        PointVectorField { xi, tau, eta }
    }

    pub fn from_ints(xi: i64, tau: i64, eta: i64) -> Self {
        Self::new(Expr::int(xi), Expr::int(tau), Expr::int(eta))
    }

    pub fn components(&self) -> [&Expr; 3] {
        [&self.xi, &self.tau, &self.eta]
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|c| c.is_zero())
    }

    /// True when all components depend on `x`, `t`, `u` (and parameters) only.
    pub fn is_point(&self) -> bool {
        self.components()
            .iter()
            .all(|c| c.symbols().into_iter().all(is_point_symbol))
    }

    /// Applies the field as a derivation to `f`.
    pub fn apply(&self, f: &Expr) -> Expr {
        let terms = [
            (&self.xi, f.diff(Symbol::X)),
            (&self.tau, f.diff(Symbol::T)),
            (&self.eta, f.diff(Symbol::U)),
        ];
        terms
            .iter()
            .fold(Expr::zero(), |acc, (c, d)| &acc + &(*c * d))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.xi + &o.xi, &self.tau + &o.tau, &self.eta + &o.eta)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.xi.scale(c), self.tau.scale(c), self.eta.scale(c))
    }
}

impl fmt::Display for PointVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.xi, self.tau, self.eta)
    }
}

/// An evolutionary characteristic `Q` with its jet order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Characteristic {
    pub q: Expr,
    pub order: u32,
}

impl Characteristic {
    pub fn new(q: Expr) -> Self {
        let order = jet_order_of(&q);
        Characteristic { q, order }
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.q.fmt(f)
    }
}

/// Highest jet order among the symbols of `e`, including opaque arguments.
pub fn jet_order_of(e: &Expr) -> u32 {
    e.symbols()
        .into_iter()
        .map(|s| match s {
            Symbol::Opaque(d) => d
                .func
                .args()
                .iter()
                .map(Symbol::jet_order)
                .max()
                .unwrap_or(0),
            s => s.jet_order(),
        })
        .max()
        .unwrap_or(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Point,
    Contact,
}

/// The field recovered from a first-order characteristic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContactField {
    pub field: PointVectorField,
    pub eta_x: Expr,
    pub eta_t: Expr,
    pub kind: FieldKind,
}

/// `Q = xi u_x + tau u_t - eta`.
pub fn characteristic_of(v: &PointVectorField) -> Characteristic {
    let ux = Expr::symbol(Symbol::jet(1, 0));
    let ut = Expr::symbol(Symbol::jet(0, 1));
    Characteristic::new(&(&(&v.xi * &ux) + &(&v.tau * &ut)) - &v.eta)
}

/// Recovers `(xi, tau, eta)` and `(eta^x, eta^t)` from a characteristic of
/// order at most one.
pub fn point_field_of(q: &Characteristic) -> Result<ContactField, FieldError> {
    if q.order > 1 {
        return Err(FieldError::NotContact(q.q.to_string(), q.order));
    }
    let (ux_s, ut_s) = (Symbol::jet(1, 0), Symbol::jet(0, 1));
    let (ux, ut) = (Expr::symbol(ux_s), Expr::symbol(ut_s));
    let xi = q.q.diff(ux_s);
    let tau = q.q.diff(ut_s);
    let eta = &(&(&ux * &xi) + &(&ut * &tau)) - &q.q;
    let qu = q.q.diff(Symbol::U);
    let eta_x = -(&q.q.diff(Symbol::X) + &(&ux * &qu));
    let eta_t = -(&q.q.diff(Symbol::T) + &(&ut * &qu));
    let field = PointVectorField::new(xi, tau, eta);
    let kind = if field.is_point() {
        FieldKind::Point
    } else {
        FieldKind::Contact
    };
    Ok(ContactField {
        field,
        eta_x,
        eta_t,
        kind,
    })
}

/// Lie bracket `[v, w]^k = v(w^k) - w(v^k)` of point fields.
pub fn commutator(
    v: &PointVectorField,
    w: &PointVectorField,
) -> Result<PointVectorField, FieldError> {
    for f in [v, w] {
        if !f.is_point() {
            return Err(FieldError::NotPoint(f.to_string()));
        }
    }
    let comp = |a: &Expr, b: &Expr| &v.apply(b) - &w.apply(a);
    Ok(PointVectorField::new(
        comp(&v.xi, &w.xi),
        comp(&v.tau, &w.tau),
        comp(&v.eta, &w.eta),
    ))
}

/// Structure constants `c[i][j][k]` with `[v_i, v_j] = sum_k c[i][j][k] v_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureTable {
    constants: Vec<Vec<Vec<Rational>>>,
}

impl StructureTable {
    /// Builds a table from the brackets `[v_i, v_j]` for `i < j`.
    pub fn from_upper(dim: usize, upper: &[((usize, usize), Vec<Rational>)]) -> Self {
        let mut constants = vec![vec![vec![Rational::zero(); dim]; dim]; dim];
        for ((i, j), c) in upper {
            assert_eq!(c.len(), dim);
            constants[*i][*j] = c.clone();
            constants[*j][*i] = c.iter().map(|x| -x).collect();
        }
        StructureTable { constants }
    }

    pub fn dim(&self) -> usize {
        self.constants.len()
    }

    /// Coordinates of `[v_i, v_j]`.
    pub fn bracket(&self, i: usize, j: usize) -> &[Rational] {
        &self.constants[i][j]
    }

    /// Bracket of two elements given in basis coordinates.
    pub fn bracket_of(&self, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let n = self.dim();
        let mut out = vec![Rational::zero(); n];
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[j].is_zero() {
                    continue;
                }
                let f = &a[i] * &b[j];
                for (k, c) in self.constants[i][j].iter().enumerate() {
                    out[k] += &f * c;
                }
            }
        }
        out
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| {
                self.constants[i][j]
                    .iter()
                    .zip(&self.constants[j][i])
                    .all(|(a, b)| (a + b).is_zero())
            })
        })
    }

    pub fn satisfies_jacobi(&self) -> bool {
        let n = self.dim();
        let e = |i: usize| {
            let mut v = vec![Rational::zero(); n];
            v[i] = Rational::from_integer(1.into());
            v
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let a = self.bracket_of(&self.bracket_of(&e(i), &e(j)), &e(k));
                    let b = self.bracket_of(&self.bracket_of(&e(j), &e(k)), &e(i));
                    let c = self.bracket_of(&self.bracket_of(&e(k), &e(i)), &e(j));
                    if (0..n).any(|m| !(&(&a[m] + &b[m]) + &c[m]).is_zero()) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Decomposes `target` in the span of `basis`, exactly.
pub fn decompose(
    target: &PointVectorField,
    basis: &[PointVectorField],
) -> Result<Option<Vec<Rational>>, FieldError> {
    let n = basis.len();
    let unknowns: Vec<Symbol> = (0..=n as u32).map(Symbol::Unknown).collect();
    let mut system = Vec::with_capacity(3);
    for comp in 0..3 {
        let mut e = &Expr::symbol(unknowns[0]) * target.components()[comp];
        for (k, b) in basis.iter().enumerate() {
            e = &e - &(&Expr::symbol(unknowns[k + 1]) * b.components()[comp]);
        }
        system.push(e);
    }
    let sol = linear_solve(&system, &unknowns)?;
    let mut found = None;
    for v in &sol.basis {
        if v[0].is_zero() {
            return Err(FieldError::Dependent);
        }
        found = Some(v);
    }
    let Some(v) = found else {
        return Ok(None);
    };
    let d0 = v[0].as_constant().ok_or(FieldError::Dependent)?;
    let mut out = Vec::with_capacity(n);
    for p in &v[1..] {
        match p.as_constant() {
            Some(c) => out.push(c / &d0),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// Structure table of a basis of point fields, with closure verified.
pub fn structure_table(basis: &[PointVectorField]) -> Result<StructureTable, FieldError> {
    let n = basis.len();
    let mut upper = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let b = commutator(&basis[i], &basis[j])?;
            match decompose(&b, basis) {
                Ok(Some(c)) => upper.push(((i, j), c)),
                Ok(None) => {
                    return Err(FieldError::NotClosed {
                        i: i + 1,
                        j: j + 1,
                        bracket: b.to_string(),
                    })
                }
                Err(FieldError::Dependent) if b.is_zero() => {
                    upper.push(((i, j), vec![Rational::zero(); n]))
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(StructureTable::from_upper(n, &upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, rat};

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn field(a: &str, b: &str, c: &str) -> PointVectorField {
        PointVectorField::new(p(a), p(b), p(c))
    }

    #[test]
    fn characteristics_of_basic_fields() {
        assert_eq!(
            characteristic_of(&PointVectorField::from_ints(1, 0, 0)).q,
            p("u[1,0]")
        );
        assert_eq!(
            characteristic_of(&field("x", "-t", "3*u")).q,
            p("x*u[1,0] - t*u[0,1] - 3*u")
        );
        assert_eq!(characteristic_of(&field("0", "0", "u")).q, p("-u"));
    }

    #[test]
    fn contact_conditions() {
        let c = point_field_of(&Characteristic::new(p("u[1,0]"))).unwrap();
        assert_eq!(c.field, PointVectorField::from_ints(1, 0, 0));
        assert_eq!(c.kind, FieldKind::Point);

        let c = point_field_of(&Characteristic::new(p("x*u[1,0] - t*u[0,1] - 3*u"))).unwrap();
        assert_eq!(c.field, field("x", "-t", "3*u"));
        assert_eq!(c.eta_x, p("2*u[1,0]"));
        assert_eq!(c.eta_t, p("4*u[0,1]"));

        let c = point_field_of(&Characteristic::new(p("u[1,0]^2"))).unwrap();
        assert_eq!(c.field, field("2*u[1,0]", "0", "u[1,0]^2"));
        assert_eq!(c.kind, FieldKind::Contact);

        assert!(matches!(
            point_field_of(&Characteristic::new(p("u[2,0]"))),
            Err(FieldError::NotContact(_, 2))
        ));
    }

    #[test]
    fn published_brackets() {
        let v1 = PointVectorField::from_ints(1, 0, 0);
        let v2 = PointVectorField::from_ints(0, 1, 0);
        let v3 = field("x", "-t", "3*u");
        assert!(commutator(&v1, &v2).unwrap().is_zero());
        assert_eq!(commutator(&v1, &v3).unwrap(), v1);
        assert_eq!(commutator(&v3, &v2).unwrap(), v2);
        assert!(matches!(
            commutator(&v1, &field("u[1,0]", "0", "0")),
            Err(FieldError::NotPoint(_))
        ));
    }

    #[test]
    fn tables() {
        let v1 = PointVectorField::from_ints(1, 0, 0);
        let v2 = PointVectorField::from_ints(0, 1, 0);
        for w in ["u", "3*u", "-2*u"] {
            let t = structure_table(&[v1.clone(), v2.clone(), field("x", "-t", w)]).unwrap();
            assert_eq!(t.bracket(0, 2), &[rat(1), rat(0), rat(0)]);
            assert_eq!(t.bracket(1, 2), &[rat(0), rat(-1), rat(0)]);
            assert_eq!(t.bracket(0, 1), &[rat(0), rat(0), rat(0)]);
            assert!(t.is_antisymmetric() && t.satisfies_jacobi());
        }
        let t = structure_table(&[v1.clone(), v2.clone()]).unwrap();
        assert!(t.bracket(0, 1).iter().all(Zero::is_zero));
        let t = structure_table(&[v1.clone(), field("x", "0", "0")]).unwrap();
        assert_eq!(t.bracket(0, 1), &[rat(1), rat(0)]);
        assert!(matches!(
            structure_table(&[v1, field("x^2", "0", "0")]),
            Err(FieldError::NotClosed { .. })
        ));
    }
}
