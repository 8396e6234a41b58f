//! Symbols of the expression kernel.
//!
//! Every symbol is a small `Copy` value with a global total order. Opaque
//! function derivatives refer to a function declaration kept in a process-wide
//! interning table, so that `Q_{u,u_x}` knows its argument list when the chain
//! rule is applied.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{OnceLock, RwLock};

/// Largest number of arguments an opaque function may be declared with.
pub const MAX_ARITY: usize = 14;

/// Model parameters of the equation and free constants of optimal-system
/// representatives.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Param {
    Alpha,
    Beta,
    /// The `a` of a representative `v1 + a v2`.
    RepA,
    /// The `b` of a representative `b v1 + v2`.
    RepB,
    /// A one-parameter group parameter.
    Eps,
}

impl Param {
    pub const ALL: [Param; 5] = [
        Param::Alpha,
        Param::Beta,
        Param::RepA,
        Param::RepB,
        Param::Eps,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Param::Alpha => "a",
            Param::Beta => "b",
            Param::RepA => "A",
            Param::RepB => "B",
            Param::Eps => "eps",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    X,
    T,
}

/// Handle to an interned opaque function declaration.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FuncId(u16);

#[derive(Clone, Debug, PartialEq, Eq)]
struct FuncDecl {
    name: String,
    args: Vec<Symbol>,
}

fn registry() -> &'static RwLock<Vec<FuncDecl>> {
    static REGISTRY: OnceLock<RwLock<Vec<FuncDecl>>> = OnceLock::new();
    REGISTRY.get_or_init(|| RwLock::new(Vec::new()))
}

impl FuncId {
    /// Declares (or looks up) the opaque function `name(args...)`.
    pub fn declare(name: &str, args: &[Symbol]) -> Result<FuncId, String> {
        if args.len() > MAX_ARITY {
            return Err(format!(
                "opaque function {name} has {} arguments, at most {MAX_ARITY} are supported",
                args.len()
            ));
        }
        if let Some(bad) = args.iter().find(|s| matches!(s, Symbol::Opaque(_))) {
            return Err(format!("opaque function argument {bad} is itself opaque"));
        }
        let decl = FuncDecl {
            name: name.to_string(),
            args: args.to_vec(),
        };
        {
            let table = registry().read().expect("opaque registry poisoned");
            if let Some(pos) = table.iter().position(|d| *d == decl) {
                return Ok(FuncId(pos as u16));
            }
        }
        let mut table = registry().write().expect("opaque registry poisoned");
        if let Some(pos) = table.iter().position(|d| *d == decl) {
            return Ok(FuncId(pos as u16));
        }
        table.push(decl);
        Ok(FuncId((table.len() - 1) as u16))
    }

    pub fn name(self) -> String {
        registry().read().expect("opaque registry poisoned")[self.0 as usize]
            .name
            .clone()
    }

    pub fn args(self) -> Vec<Symbol> {
        registry().read().expect("opaque registry poisoned")[self.0 as usize]
            .args
            .clone()
    }

    fn cmp_decl(self, other: FuncId) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        let table = registry().read().expect("opaque registry poisoned");
        let (a, b) = (&table[self.0 as usize], &table[other.0 as usize]);
        a.name.cmp(&b.name).then_with(|| a.args.cmp(&b.args))
    }
}

/// A partial derivative `Q_{multi-index}` of an opaque function.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct OpaqueDeriv {
    pub func: FuncId,
    pub index: [u8; MAX_ARITY],
}

impl OpaqueDeriv {
    pub fn new(func: FuncId) -> Self {
        OpaqueDeriv {
            func,
            index: [0; MAX_ARITY],
        }
    }

    /// The derivative with respect to argument slot `slot`.
    pub fn bump(mut self, slot: usize) -> Self {
        self.index[slot] += 1;
        self
    }

    pub fn order(&self) -> u32 {
        self.index.iter().map(|&k| k as u32).sum()
    }
}

impl PartialOrd for OpaqueDeriv {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OpaqueDeriv {
    fn cmp(&self, other: &Self) -> Ordering {
        self.func
            .cmp_decl(other.func)
            .then_with(|| self.order().cmp(&other.order()))
            .then_with(|| other.index.cmp(&self.index))
    }
}

/// A symbol of the expression kernel.
///
/// The derived order (variant order, then fields) is the global symbol order
/// used for monomial ordering.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Symbol {
    Param(Param),
    /// Unknown constant `c_k`.
    Unknown(u32),
    Var(Var),
    /// Jet coordinate `u_{x^i t^j}`.
    Jet(u16, u16),
    Opaque(OpaqueDeriv),
    /// Similarity variable `z` of a reduced ODE.
    OdeVar,
    /// `w^{(k)}(z)`.
    OdeFn(u16),
}

impl Symbol {
    pub const X: Symbol = Symbol::Var(Var::X);
    pub const T: Symbol = Symbol::Var(Var::T);
    pub const U: Symbol = Symbol::Jet(0, 0);
    pub const ALPHA: Symbol = Symbol::Param(Param::Alpha);
    pub const BETA: Symbol = Symbol::Param(Param::Beta);

    pub fn jet(i: u16, j: u16) -> Symbol {
        Symbol::Jet(i, j)
    }

    pub fn is_jet(&self) -> bool {
        matches!(self, Symbol::Jet(..))
    }

    pub fn is_param(&self) -> bool {
        matches!(self, Symbol::Param(_))
    }

    /// Jet order of a jet coordinate, zero for everything else.
    pub fn jet_order(&self) -> u32 {
        match *self {
            Symbol::Jet(i, j) => i as u32 + j as u32,
            _ => 0,
        }
    }

    /// Opaque derivative of `func` with respect to the listed argument slots.
    pub fn opaque(func: FuncId, slots: &[usize]) -> Symbol {
        let mut d = OpaqueDeriv::new(func);
        for &s in slots {
            d = d.bump(s);
        }
        Symbol::Opaque(d)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Symbol::Param(p) => f.write_str(p.name()),
            Symbol::Unknown(k) => write!(f, "c{k}"),
            Symbol::Var(Var::X) => f.write_str("x"),
            Symbol::Var(Var::T) => f.write_str("t"),
            Symbol::Jet(0, 0) => f.write_str("u"),
            Symbol::Jet(i, j) => write!(f, "u[{i},{j}]"),
            Symbol::Opaque(d) => {
                let args = d.func.args();
                write!(f, "{}", d.func.name())?;
                if d.order() > 0 {
                    let mut parts = Vec::new();
                    for (slot, arg) in args.iter().enumerate() {
                        for _ in 0..d.index[slot] {
                            parts.push(arg.to_string());
                        }
                    }
                    write!(f, "[{}]", parts.join(","))?;
                }
                Ok(())
            }
            Symbol::OdeVar => f.write_str("z"),
            Symbol::OdeFn(0) => f.write_str("w"),
            Symbol::OdeFn(k) => write!(f, "w[{k}]"),
        }
    }
}
