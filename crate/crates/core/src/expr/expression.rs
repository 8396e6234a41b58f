use std::collections::{BTreeSet, HashMap};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::monomial::Monomial;
use super::poly::Poly;
use super::symbol::Symbol;
use super::{ExprError, Rational};

/// One stratum `poly * R^(power/2)` of an expression.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Part {
    pub power: i32,
    pub poly: Poly,
}

/// Canonical exact expression.
///
/// Invariants: at most one part per parity of `power`; every part is nonzero
/// and its polynomial is not divisible by the kernel; the kernel is present
/// iff some part has a nonzero power; without a kernel there is a single part
/// of power zero (or none for the zero expression).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Expr {
    kernel: Option<Arc<Poly>>,
    parts: SmallVec<[Part; 2]>,
}

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

impl Expr {
    pub fn zero() -> Self {
        Expr {
            kernel: None,
            parts: SmallVec::new(),
        }
    }

    pub fn one() -> Self {
        Self::rational(Rational::one())
    }

    pub fn int(n: i64) -> Self {
        Self::rational(Rational::from_integer(n.into()))
    }

    pub fn rational(c: Rational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn symbol(s: Symbol) -> Self {
        Self::from_poly(Poly::var(s))
    }

    pub fn from_poly(p: Poly) -> Self {
        let mut parts = SmallVec::new();
        if !p.is_zero() {
            parts.push(Part { power: 0, poly: p });
        }
        Expr {
            kernel: None,
            parts,
        }
    }

    /// `r^(k/2)` with `r` brought to canonical kernel form.
    pub fn radical(r: &Poly, k: i32) -> Result<Expr, ExprError> {
        if r.is_zero() {
            return match k.cmp(&0) {
                std::cmp::Ordering::Greater => Ok(Expr::zero()),
                std::cmp::Ordering::Equal => Ok(Expr::one()),
                std::cmp::Ordering::Less => Err(ExprError::DivisionByZero),
            };
        }
        let (f, kernel) = canonical_kernel(r);
        let scale = rat_powi(&f, k);
        match kernel {
            None => Ok(Expr::rational(scale)),
            Some(kern) => Ok(assemble(
                Some(Arc::new(kern)),
                vec![(k, Poly::constant(scale))],
            )),
        }
    }

    /// `sqrt(e)` for a radical-free `e`.
    pub fn sqrt(e: &Expr) -> Result<Expr, ExprError> {
        let p = e
            .as_poly()
            .ok_or_else(|| ExprError::NestedRadical(e.to_string()))?;
        Expr::radical(&p, 1)
    }

    pub fn kernel(&self) -> Option<&Poly> {
        self.kernel.as_deref()
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    /// The underlying polynomial when no radical is involved.
    pub fn as_poly(&self) -> Option<Poly> {
        if self.kernel.is_some() {
            return None;
        }
        Some(
            self.parts
                .first()
                .map(|p| p.poly.clone())
                .unwrap_or_default(),
        )
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.as_poly().and_then(|p| p.as_constant())
    }

    /// Iterates over `(monomial, radical power k, coefficient)`, meaning
    /// `coefficient * monomial * R^(k/2)`.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i32, &Rational)> {
        self.parts
            .iter()
            .flat_map(|p| p.poly.terms().map(move |(m, c)| (m, p.power, c)))
    }

    pub fn term_count(&self) -> usize {
        self.parts.iter().map(|p| p.poly.len()).sum()
    }

    /// All symbols occurring, including those of the kernel.
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out: BTreeSet<Symbol> = self.parts.iter().flat_map(|p| p.poly.symbols()).collect();
        if let Some(k) = &self.kernel {
            out.extend(k.symbols());
        }
        out
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.parts.iter().any(|p| p.poly.contains(s))
            || self.kernel.as_ref().is_some_and(|k| k.contains(s))
    }

    pub fn checked_add(&self, rhs: &Expr) -> Result<Expr, ExprError> {
        let kernel = merge_kernel(self, rhs)?;
        let raw = self
            .parts
            .iter()
            .chain(rhs.parts.iter())
            .map(|p| (p.power, p.poly.clone()))
            .collect();
        Ok(assemble(kernel, raw))
    }

    pub fn checked_sub(&self, rhs: &Expr) -> Result<Expr, ExprError> {
        self.checked_add(&-rhs)
    }

    pub fn checked_mul(&self, rhs: &Expr) -> Result<Expr, ExprError> {
        let kernel = merge_kernel(self, rhs)?;
        let mut raw = Vec::with_capacity(self.parts.len() * rhs.parts.len());
        for a in &self.parts {
            for b in &rhs.parts {
                raw.push((a.power + b.power, &a.poly * &b.poly));
            }
        }
        Ok(assemble(kernel, raw))
    }

    /// Multiplicative inverse of `c * R^(k/2)`.
    pub fn invert(&self) -> Result<Expr, ExprError> {
        if self.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        match self.parts.as_slice() {
            [part] => match part.poly.as_constant() {
                Some(c) => Ok(assemble(
                    self.kernel.clone(),
                    vec![(-part.power, Poly::constant(c.recip()))],
                )),
                None => Err(ExprError::NotInvertible(self.to_string())),
            },
            _ => Err(ExprError::NotInvertible(self.to_string())),
        }
    }

    pub fn checked_div(&self, rhs: &Expr) -> Result<Expr, ExprError> {
        self.checked_mul(&rhs.invert()?)
    }

    pub fn pow(&self, n: i32) -> Result<Expr, ExprError> {
        let base = if n < 0 { self.invert()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Expr::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.checked_mul(&sq)?;
            }
        }
        Ok(acc)
    }

    pub fn scale(&self, c: &Rational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            kernel: self.kernel.clone(),
            parts: self
                .parts
                .iter()
                .map(|p| Part {
                    power: p.power,
                    poly: p.poly.scale(c),
                })
                .collect(),
        }
    }

    /// Multiplies by a polynomial (never changes the kernel).
    pub fn mul_poly(&self, p: &Poly) -> Expr {
        let raw = self
            .parts
            .iter()
            .map(|part| (part.power, &part.poly * p))
            .collect();
        assemble(self.kernel.clone(), raw)
    }

    /// Applies a derivation given by the (polynomial) images of symbols.
    /// `R^(k/2)` differentiates to `(k/2) R' R^((k-2)/2)`.
    pub fn derive(&self, image: &mut impl FnMut(Symbol) -> Poly) -> Expr {
        let mut raw = Vec::with_capacity(2 * self.parts.len());
        let dk = self.kernel.as_ref().map(|k| k.derive(image));
        for part in &self.parts {
            raw.push((part.power, part.poly.derive(image)));
            if part.power != 0 {
                if let Some(dk) = &dk {
                    let half = Rational::new(part.power.into(), 2.into());
                    raw.push((part.power - 2, (&part.poly * dk).scale(&half)));
                }
            }
        }
        assemble(self.kernel.clone(), raw)
    }

    /// Partial derivative with respect to a non-opaque symbol.
    pub fn diff(&self, s: Symbol) -> Expr {
        self.derive(&mut |t| super::poly::partial_image(t, s))
    }

    /// Simultaneous substitution of symbols by expressions.
    pub fn substitute(&self, bindings: &HashMap<Symbol, Expr>) -> Result<Expr, ExprError> {
        let mut powers: HashMap<(Symbol, u32), Expr> = HashMap::new();
        let mut subst_poly = |p: &Poly| -> Result<Expr, ExprError> {
            let mut acc = Expr::zero();
            for (m, c) in p.terms() {
                let mut t = Expr::rational(c.clone());
                let mut kept = Monomial::one();
                for &(s, e) in m.factors() {
                    match bindings.get(&s) {
                        Some(b) => {
                            let pw = match powers.entry((s, e)) {
                                std::collections::hash_map::Entry::Occupied(o) => o.into_mut(),
                                std::collections::hash_map::Entry::Vacant(v) => {
                                    v.insert(b.pow(e as i32)?)
                                }
                            };
                            t = t.checked_mul(pw)?;
                        }
                        None => kept = kept.mul(&Monomial::power(s, e)),
                    }
                }
                t = t.mul_poly(&Poly::term(Rational::one(), kept));
                acc = acc.checked_add(&t)?;
            }
            Ok(acc)
        };
        let mut acc = Expr::zero();
        let kernel = match &self.kernel {
            Some(k) => {
                let kk = subst_poly(k)?;
                Some(
                    kk.as_poly()
                        .ok_or_else(|| ExprError::NestedRadical(kk.to_string()))?,
                )
            }
            None => None,
        };
        for part in &self.parts {
            let mut t = subst_poly(&part.poly)?;
            if part.power != 0 {
                let r = Expr::radical(kernel.as_ref().unwrap(), part.power)?;
                t = t.checked_mul(&r)?;
            }
            acc = acc.checked_add(&t)?;
        }
        Ok(acc)
    }

    /// Splits into the coefficient expressions of the monomials in the
    /// symbols selected by `pred`, part by part.
    pub fn collect(&self, pred: impl Fn(Symbol) -> bool + Copy) -> Vec<(Monomial, i32, Expr)> {
        let mut out = Vec::new();
        for part in &self.parts {
            for (m, coeff) in part.poly.collect(pred) {
                out.push((m, part.power, Expr::from_poly(coeff)));
            }
        }
        out
    }
}

fn merge_kernel(a: &Expr, b: &Expr) -> Result<Option<Arc<Poly>>, ExprError> {
    match (&a.kernel, &b.kernel) {
        (None, k) | (k, None) => Ok(k.clone()),
        (Some(x), Some(y)) if Arc::ptr_eq(x, y) || x == y => Ok(Some(x.clone())),
        (Some(x), Some(y)) => Err(ExprError::KernelConflict {
            first: Expr::from_poly((**x).clone()).to_string(),
            second: Expr::from_poly((**y).clone()).to_string(),
        }),
    }
}

/// Brings a list of `(power, poly)` strata over `kernel` to canonical form.
pub(crate) fn assemble(kernel: Option<Arc<Poly>>, raw: Vec<(i32, Poly)>) -> Expr {
    let Some(kern) = kernel else {
        let mut sum = Poly::zero();
        for (k, p) in raw {
            debug_assert_eq!(k, 0, "radical power without a kernel");
            sum.add_assign_ref(&p);
        }
        return Expr::from_poly(sum);
    };
    let mut parts: SmallVec<[Part; 2]> = SmallVec::new();
    if let Some(c) = kern.as_constant() {
        // A constant kernel folds into the coefficients: R^(k/2) = c^(k div 2) * R^(k mod 2 / 2).
        let mut strata = [Poly::zero(), Poly::zero()];
        for (k, p) in raw {
            let par = k.rem_euclid(2);
            let f = rat_powi(&c, (k - par) / 2);
            strata[par as usize].add_assign_ref(&p.scale(&f));
        }
        for (par, poly) in strata.into_iter().enumerate() {
            if !poly.is_zero() {
                parts.push(Part {
                    power: par as i32,
                    poly,
                });
            }
        }
    } else {
        for par in 0..2 {
            let group: Vec<&(i32, Poly)> = raw
                .iter()
                .filter(|(k, p)| k.rem_euclid(2) == par && !p.is_zero())
                .collect();
            let Some(min) = group.iter().map(|(k, _)| *k).min() else {
                continue;
            };
            let mut acc = Poly::zero();
            let mut kpow: Vec<Poly> = vec![Poly::one()];
            for (k, p) in group {
                let j = ((k - min) / 2) as usize;
                while kpow.len() <= j {
                    let next = &kpow[kpow.len() - 1] * &kern;
                    kpow.push(next);
                }
                if j == 0 {
                    acc.add_assign_ref(p);
                } else {
                    acc.add_assign_ref(&(p * &kpow[j]));
                }
            }
            if acc.is_zero() {
                continue;
            }
            let mut power = min;
            if par == 0 && power > 0 {
                // Nonnegative even powers are plain polynomials.
                acc = &acc * &kern.pow((power / 2) as u32);
                power = 0;
            }
            while par == 1 || power < 0 {
                let Some(q) = acc.div_exact(&kern) else { break };
                acc = q;
                power += 2;
            }
            parts.push(Part { power, poly: acc });
        }
    }
    if parts.iter().all(|p| p.power == 0) {
        return Expr {
            kernel: None,
            parts,
        };
    }
    Expr {
        kernel: Some(kern),
        parts,
    }
}

/// Writes `r = f^2 * k` with `f > 0` rational and `k` a primitive polynomial
/// with positive leading coefficient times a squarefree integer (sign kept in
/// the kernel). Returns `None` for the kernel when it is the constant 1.
pub(crate) fn canonical_kernel(r: &Poly) -> (Rational, Option<Poly>) {
    let (sign, g, prim) = r.content();
    // g = n/d = (n d) / d^2
    let nd = g.numer() * g.denom();
    let (sq, free) = square_split(&nd);
    let f = Rational::new(sq, g.denom().clone());
    let kern = prim.scale(&Rational::from_integer(free * BigInt::from(sign)));
    if kern == Poly::one() {
        (f, None)
    } else {
        (f, Some(kern))
    }
}

/// `n = s^2 * q` with `q` squarefree as far as trial division up to 10^5
/// detects (the residual cofactor is tested for being a perfect square).
fn square_split(n: &BigInt) -> (BigInt, BigInt) {
    let mut s = BigInt::one();
    let mut q = BigInt::one();
    let mut m = n.abs();
    let mut p = BigInt::from(2u32);
    let limit = BigInt::from(100_000u32);
    while &p * &p <= m && p <= limit {
        let mut e = 0u32;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        for _ in 0..e / 2 {
            s *= &p;
        }
        if e % 2 == 1 {
            q *= &p;
        }
        p += 1;
    }
    let r = m.sqrt();
    if &r * &r == m {
        s *= r;
    } else {
        q *= m;
    }
    (s, q)
}

pub(crate) fn rat_powi(x: &Rational, k: i32) -> Rational {
    if k >= 0 {
        num_traits::pow(x.clone(), k as usize)
    } else {
        num_traits::pow(x.recip(), (-k) as usize)
    }
}

impl From<Poly> for Expr {
    fn from(p: Poly) -> Self {
        Expr::from_poly(p)
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Self {
        Expr::symbol(s)
    }
}

impl From<Rational> for Expr {
    fn from(c: Rational) -> Self {
        Expr::rational(c)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

// The operator impls panic on a radical-kernel conflict; code paths that may
// mix kernels from user input use the `checked_*` methods.

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        self.checked_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self.checked_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        &self + &rhs
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        &self - &rhs
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        &self * &rhs
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            kernel: self.kernel.clone(),
            parts: self
                .parts
                .iter()
                .map(|p| Part {
                    power: p.power,
                    poly: -&p.poly,
                })
                .collect(),
        }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}
