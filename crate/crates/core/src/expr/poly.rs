use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use super::symbol::Symbol;
use super::Rational;

/// Sparse multivariate polynomial over the rationals, terms keyed by monomial
/// in graded lexicographic order.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> Self {
        Self::constant(Rational::from_integer(n.into()))
    }

    pub fn var(s: Symbol) -> Self {
        Self::term(Rational::one(), Monomial::var(s))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Rational)> {
        self.terms.into_iter()
    }

    /// Rational value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &Poly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// `self += c * m * other`.
    pub fn add_scaled(&mut self, c: &Rational, m: &Monomial, other: &Poly) {
        if c.is_zero() {
            return;
        }
        for (om, oc) in &other.terms {
            self.add_term(m.mul(om), c * oc);
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_term(&self, c: &Rational, m: &Monomial) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (lm, lc) = d.leading()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((m, c)) = rem.leading() {
            let qm = m.div(&lm)?;
            let qc = c / &lc;
            rem.add_scaled(&-qc.clone(), &qm, d);
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.terms.keys().flat_map(|m| m.symbols()).collect()
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.terms.keys().any(|m| m.exponent(s) > 0)
    }

    /// Applies the derivation determined by the images of the symbols.
    pub fn derive(&self, image: &mut impl FnMut(Symbol) -> Poly) -> Poly {
        let mut cache: HashMap<Symbol, Poly> = HashMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            for &(s, e) in m.factors() {
                let img = cache.entry(s).or_insert_with(|| image(s));
                if img.is_zero() {
                    continue;
                }
                let (_, rest) = m.split_off(s);
                let cof = rest.mul(&Monomial::power(s, e - 1));
                out.add_scaled(&(c * Rational::from_integer(e.into())), &cof, img);
            }
        }
        out
    }

    /// Partial derivative; opaque symbols follow the chain rule over their
    /// declared argument list.
    pub fn diff(&self, target: Symbol) -> Poly {
        self.derive(&mut |s| partial_image(s, target))
    }

    pub fn eval(&self, point: &HashMap<Symbol, Rational>) -> Result<Rational, Symbol> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for &(s, e) in m.factors() {
                let x = point.get(&s).ok_or(s)?;
                v *= pow_rat(x, e);
            }
            acc += v;
        }
        Ok(acc)
    }

    /// Positive rational `g` and primitive integer polynomial `p` with
    /// positive leading coefficient such that `self = sign * g * p`.
    pub fn content(&self) -> (i8, Rational, Poly) {
        if self.is_zero() {
            return (1, Rational::one(), Poly::zero());
        }
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        let g = Rational::new(num, den);
        let mut p = self.scale(&g.recip());
        let sign = if p.leading().unwrap().1.is_negative() {
            p = -p;
            -1
        } else {
            1
        };
        (sign, g, p)
    }

    /// Greatest common monomial divisor of all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        it.fold(first.clone(), |g, m| g.gcd(m))
    }

    /// Groups terms by the part of each monomial made of symbols selected by
    /// `pred`; the coefficient polynomials carry the remaining symbols.
    pub fn collect(&self, pred: impl Fn(Symbol) -> bool) -> BTreeMap<Monomial, Poly> {
        let mut out: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (key, rest) = m.partition(&pred);
            out.entry(key).or_default().add_term(rest, c.clone());
        }
        out
    }

    pub fn map_monomials(&self, f: impl Fn(&Monomial) -> Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_scaled(c, &Monomial::one(), &f(m));
        }
        out
    }
}

pub(crate) fn partial_image(s: Symbol, target: Symbol) -> Poly {
    if s == target {
        return Poly::one();
    }
    if let Symbol::Opaque(d) = s {
        if let Some(slot) = d.func.args().iter().position(|&a| a == target) {
            return Poly::var(Symbol::Opaque(d.bump(slot)));
        }
    }
    Poly::zero()
}

pub(crate) fn pow_rat(x: &Rational, e: u32) -> Rational {
    num_traits::pow(x.clone(), e as usize)
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (mut big, small) = if self.len() >= rhs.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        big.add_assign_ref(small);
        big
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let (a, b) = if self.len() <= rhs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut out = Poly::zero();
        for (m, c) in &a.terms {
            out.add_scaled(c, m, b);
        }
        out
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(mut self) -> Poly {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -self.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> Poly {
        Poly::var(Symbol::U)
    }
    fn ux() -> Poly {
        Poly::var(Symbol::jet(1, 0))
    }

    #[test]
    fn exact_division() {
        let r = &(&Poly::var(Symbol::BETA) * &ux().pow(2)).scale(&Rational::from_integer(2.into()))
            + &Poly::var(Symbol::ALPHA);
        let p = &r * &(&u() + &ux());
        assert_eq!(p.div_exact(&r).unwrap(), &u() + &ux());
        assert!((&p + &Poly::one()).div_exact(&r).is_none());
    }

    #[test]
    fn content_splits_sign_and_scale() {
        let p = (&u().scale(&Rational::new((-4).into(), 3.into()))
            + &ux().scale(&Rational::new(2.into(), 9.into())))
            .clone();
        let (s, g, q) = p.content();
        assert_eq!(&q.scale(&g).scale(&Rational::from_integer(s.into())), &p);
        assert!(q.leading().unwrap().1.is_positive());
    }

    #[test]
    fn diff_power_rule() {
        let p = &(&u().pow(2) * &ux().pow(2)) * &Poly::var(Symbol::BETA);
        let d = p.diff(Symbol::jet(1, 0));
        let expected = (&(&u().pow(2) * &ux()) * &Poly::var(Symbol::BETA))
            .scale(&Rational::from_integer(2.into()));
        assert_eq!(d, expected);
    }
}
