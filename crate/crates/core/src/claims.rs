//! Published symmetry claims for the short pulse equation, kept as fixtures
//! to be checked rather than trusted.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::expr::{parse, rat, Expr, FuncId, Rational, Symbol};
use crate::fields::PointVectorField;

/// Reading of the ambiguous symbol `u_{x^3}` (and `u_{t^3}`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Interp {
    /// Third derivative `u[3,0]`.
    Third,
    /// Cube of the first derivative `u[1,0]^3`.
    Cubed,
}

impl Interp {
    pub const BOTH: [Interp; 2] = [Interp::Third, Interp::Cubed];

    /// Rewrites third-order symbols according to the reading.
    pub fn apply(self, e: &Expr) -> Expr {
        match self {
            Interp::Third => e.clone(),
            Interp::Cubed => {
                let mut b = HashMap::new();
                b.insert(Symbol::jet(3, 0), parse("u[1,0]^3").expect("static"));
                b.insert(Symbol::jet(0, 3), parse("u[0,1]^3").expect("static"));
                e.substitute(&b).expect("single kernel is preserved")
            }
        }
    }
}

impl fmt::Display for Interp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Interp::Third => "third",
            Interp::Cubed => "cubed",
        })
    }
}

/// Selection of readings on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InterpChoice {
    #[default]
    Third,
    Cubed,
    Both,
}

impl InterpChoice {
    pub fn readings(self) -> Vec<Interp> {
        match self {
            InterpChoice::Third => vec![Interp::Third],
            InterpChoice::Cubed => vec![Interp::Cubed],
            InterpChoice::Both => Interp::BOTH.to_vec(),
        }
    }
}

impl FromStr for InterpChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "third" => Ok(InterpChoice::Third),
            "cubed" => Ok(InterpChoice::Cubed),
            "both" => Ok(InterpChoice::Both),
            _ => Err(format!(
                "unknown reading {s:?}, expected third, cubed or both"
            )),
        }
    }
}

/// The claimed weight of `u` in the scaling generator.
pub fn claimed_scaling_weight() -> Rational {
    rat(3)
}

/// The claimed scaling characteristic `x u_x - t u_t - 3 u`.
pub const CLAIMED_SCALING_CHARACTERISTIC: &str = "x*u[1,0] - t*u[0,1] - 3*u";

/// The claimed point generators `d/dx`, `d/dt`, `x d/dx - t d/dt + 3 u d/du`.
pub fn claimed_point_fields() -> [PointVectorField; 3] {
    [
        PointVectorField::from_ints(1, 0, 0),
        PointVectorField::from_ints(0, 1, 0),
        PointVectorField::new(
            parse("x").unwrap(),
            parse("-t").unwrap(),
            parse("3*u").unwrap(),
        ),
    ]
}

/// The claimed one-parameter groups, as printed by [`crate::group::GroupElement`].
pub const CLAIMED_FLOWS: [&str; 3] = [
    "(x, t, u) -> (x + eps, t, u)",
    "(x, t, u) -> (x, t + eps, u)",
    "(x, t, u) -> (exp(eps)*x, exp(-eps)*t, exp(3*eps)*u)",
];

/// `v4 = u_{x^3} / sqrt(2 b u_{x^3}^2 + a)`.
pub const V4: &str = "u[3,0]/sqrt(2*b*u[3,0]^2 + a)";

/// `v5 = u_{x^3} - b^3 u_xx^6 u_{x^3} - 3/2 a b^2 u_x u_xx^4 - a^2 b u_x^3`.
pub const V5: &str = "u[3,0] - b^3*u[2,0]^6*u[3,0] - 3/2*a*b^2*u[1,0]*u[2,0]^4 - a^2*b*u[1,0]^3";

/// The `c3` part of the claimed third-order family, whose leading term is
/// `u_{t^3}` instead of `u_{x^3}`.
pub const V5_TIME: &str =
    "u[0,3] - b^3*u[2,0]^6*u[3,0] - 3/2*a*b^2*u[1,0]*u[2,0]^4 - a^2*b*u[1,0]^3";

/// The claimed most general third-order characteristic, with `c1..c5` the
/// unknowns `Unknown(1..=5)`.
pub const CLAIMED_THIRD_ORDER_FAMILY: &str = "(c1*t + c2)*u[0,1] + 3*c1*u - c1*x*u[1,0] \
     + c3*u[0,3] - c3*b^3*u[2,0]^6*u[3,0] - 3/2*c3*a*b^2*u[1,0]*u[2,0]^4 \
     - (c3*b*a^2*u[1,0]^2 - c5)*u[1,0] + c4*u[3,0]/sqrt(2*b*u[3,0]^2 + a)";

/// A named candidate characteristic under one reading.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub name: String,
    pub interp: Interp,
    pub q: Expr,
}

/// `v4`, `v5` and the `u_{t^3}` variant under the given readings.
pub fn local_candidates(readings: &[Interp]) -> Vec<Candidate> {
    let mut out = Vec::new();
    for (name, text) in [("v4", V4), ("v5", V5), ("v5-time", V5_TIME)] {
        let base = parse(text).expect("static candidate");
        for &interp in readings {
            out.push(Candidate {
                name: name.to_string(),
                interp,
                q: interp.apply(&base),
            });
        }
    }
    out
}

/// The members of the claimed third-order family obtained by setting one
/// constant to 1 and the others to 0.
pub fn claimed_family_members() -> Vec<(String, Expr)> {
    let family = parse(CLAIMED_THIRD_ORDER_FAMILY).expect("static family");
    (1..=5)
        .map(|k| {
            let b: HashMap<Symbol, Expr> = (1..=5)
                .map(|j| (Symbol::Unknown(j), Expr::int((j == k) as i64)))
                .collect();
            (
                format!("c{k}"),
                family.substitute(&b).expect("substitution"),
            )
        })
        .collect()
}

/// Arguments `(x, t, u, u_x, u_t)` of the first-order determining system.
pub fn first_order_arity() -> [Symbol; 5] {
    [
        Symbol::X,
        Symbol::T,
        Symbol::U,
        Symbol::jet(1, 0),
        Symbol::jet(0, 1),
    ]
}

/// Collection coordinates `(u_xx, u_tt)` of the first-order determining system.
pub fn first_order_collection() -> [Symbol; 2] {
    [Symbol::jet(2, 0), Symbol::jet(0, 2)]
}

/// The claimed second-order equations `Q_{u_x u_x} = 0`, `Q_{u_x u_t} = 0`,
/// `Q_{u_t u_t} = 0` for `Q(x, t, u, u_x, u_t)`.
pub fn claimed_second_order_equations(f: FuncId) -> Vec<(String, Expr)> {
    [
        ("Q_{u_x,u_x} = 0", [3, 3]),
        ("Q_{u_x,u_t} = 0", [3, 4]),
        ("Q_{u_t,u_t} = 0", [4, 4]),
    ]
    .into_iter()
    .map(|(name, slots)| (name.to_string(), Expr::symbol(Symbol::opaque(f, &slots))))
    .collect()
}

/// The claimed leading terms `u_t Q_{u,u_x} + a u Q_{u_x,u_x} + Q_{t,u_x}` of a
/// mixed equation.
pub fn claimed_mixed_terms(f: FuncId) -> Expr {
    let q = |slots: &[usize]| Expr::symbol(Symbol::opaque(f, slots));
    let ut = Expr::symbol(Symbol::jet(0, 1));
    let au = parse("a*u").expect("static");
    &(&(&ut * &q(&[2, 3])) + &(&au * &q(&[3, 3]))) + &q(&[1, 3])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubed_reading_rewrites_the_kernel() {
        let v4 = Interp::Cubed.apply(&parse(V4).unwrap());
        assert_eq!(v4, parse("u[1,0]^3/sqrt(2*b*u[1,0]^6 + a)").unwrap());
        let t = Interp::Cubed.apply(&parse(V5_TIME).unwrap());
        assert!(t.contains(Symbol::jet(0, 1)) && !t.contains(Symbol::jet(0, 3)));
    }

    #[test]
    fn family_members() {
        let m = claimed_family_members();
        assert_eq!(m[0].1, parse("t*u[0,1] + 3*u - x*u[1,0]").unwrap());
        assert_eq!(m[1].1, parse("u[0,1]").unwrap());
        assert_eq!(m[2].1, parse(V5_TIME).unwrap());
        assert_eq!(m[3].1, parse(V4).unwrap());
        assert_eq!(m[4].1, parse("u[1,0]").unwrap());
        assert_eq!(local_candidates(&Interp::BOTH).len(), 6);
    }
}
