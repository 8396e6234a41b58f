use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use jetlie::claims::InterpChoice;
use jetlie::engine::DEFAULT_BASIS_LIMIT;
use jetlie::expr::{Expr, Rational, Symbol};
use jetlie::jet::{Equation, JetSpace, DEFAULT_MAX_ORDER};
use num_traits::Zero;
use serde::Serialize;

use crate::CliError;

/// An equation parameter, kept symbolic or fixed to a nonzero rational.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum ParamValue {
    #[default]
    Symbolic,
    Value(Rational),
}

impl FromStr for ParamValue {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if matches!(s, "sym" | "a" | "b" | "alpha" | "beta") {
            return Ok(ParamValue::Symbolic);
        }
        let v: Rational = s
            .parse()
            .map_err(|_| format!("expected a rational such as 2 or -1/3, or 'sym', got {s:?}"))?;
        if v.is_zero() {
            return Err("equation parameters must be nonzero".into());
        }
        Ok(ParamValue::Value(v))
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Symbolic => f.write_str("sym"),
            ParamValue::Value(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?}, expected text or json")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub alpha: ParamValue,
    pub beta: ParamValue,
    pub max_order: u32,
    pub interp: InterpChoice,
    pub format: Format,
    pub seed: u64,
    pub basis_limit: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            alpha: ParamValue::Symbolic,
            beta: ParamValue::Symbolic,
            max_order: DEFAULT_MAX_ORDER,
            interp: InterpChoice::Third,
            format: Format::Text,
            seed: 11,
            basis_limit: DEFAULT_BASIS_LIMIT,
        }
    }
}

/// The configuration as echoed in every report.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub alpha: String,
    pub beta: String,
    pub max_order: u32,
    pub interp: InterpChoice,
    pub format: Format,
    pub seed: u64,
    pub basis_limit: usize,
}

impl RunConfig {
    fn param_expr(v: &ParamValue, symbol: Symbol) -> Expr {
        match v {
            ParamValue::Symbolic => Expr::symbol(symbol),
            ParamValue::Value(r) => Expr::rational(r.clone()),
        }
    }

    pub fn equation(&self) -> Equation {
        Equation::expand(
            &Self::param_expr(&self.alpha, Symbol::ALPHA),
            &Self::param_expr(&self.beta, Symbol::BETA),
        )
    }

    pub fn jets(&self) -> JetSpace {
        JetSpace::new(self.equation(), self.max_order)
    }

    /// Replaces `a`, `b` in `e` by their configured values.
    pub fn specialize(&self, e: &Expr) -> Result<Expr, CliError> {
        let mut b = HashMap::new();
        for (v, s) in [(&self.alpha, Symbol::ALPHA), (&self.beta, Symbol::BETA)] {
            if let ParamValue::Value(r) = v {
                b.insert(s, Expr::rational(r.clone()));
            }
        }
        if b.is_empty() {
            return Ok(e.clone());
        }
        e.substitute(&b)
            .map_err(|err| CliError::Input(format!("cannot specialize {e}: {err}")))
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            alpha: self.alpha.to_string(),
            beta: self.beta.to_string(),
            max_order: self.max_order,
            interp: self.interp,
            format: self.format,
            seed: self.seed,
            basis_limit: self.basis_limit,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameters() {
        assert_eq!("sym".parse::<ParamValue>(), Ok(ParamValue::Symbolic));
        assert!(matches!(
            "-2/3".parse::<ParamValue>(),
            Ok(ParamValue::Value(_))
        ));
        assert!("0".parse::<ParamValue>().is_err());
        assert!("x".parse::<ParamValue>().is_err());
    }

    #[test]
    fn specialized_equation() {
        let cfg = RunConfig {
            alpha: ParamValue::Value(Rational::from_integer(2.into())),
            ..RunConfig::default()
        };
        assert!(!cfg.equation().rhs().contains(Symbol::ALPHA));
        assert!(cfg.equation().rhs().contains(Symbol::BETA));
    }
}
