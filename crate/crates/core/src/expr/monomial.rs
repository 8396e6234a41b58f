use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

use super::symbol::Symbol;

/// A power product of symbols, stored sorted by symbol with positive
/// exponents. The empty product is the unit monomial.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(SmallVec<[(Symbol, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(s: Symbol) -> Self {
        Self::power(s, 1)
    }

    pub fn power(s: Symbol, e: u32) -> Self {
        if e == 0 {
            return Self::one();
        }
        let mut v = SmallVec::new();
        v.push((s, e));
        Monomial(v)
    }

    /// Builds a monomial from arbitrary (symbol, exponent) pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Symbol, u32)>) -> Self {
        let mut m = Self::one();
        for (s, e) in pairs {
            m = m.mul(&Self::power(s, e));
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, s: Symbol) -> u32 {
        self.0
            .binary_search_by(|(t, _)| t.cmp(&s))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn factors(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.0.iter().map(|&(s, _)| s)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    pub fn pow(&self, e: u32) -> Monomial {
        if e == 0 {
            return Self::one();
        }
        Monomial(self.0.iter().map(|&(s, k)| (s, k * e)).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().all(|&(s, e)| other.exponent(s) >= e)
    }

    /// `self / other`, if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        let out = self
            .0
            .iter()
            .filter_map(|&(s, e)| {
                let r = e - other.exponent(s);
                (r > 0).then_some((s, r))
            })
            .collect();
        Some(Monomial(out))
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .filter_map(|&(s, e)| {
                    let m = e.min(other.exponent(s));
                    (m > 0).then_some((s, m))
                })
                .collect(),
        )
    }

    /// Removes `s` entirely, returning its exponent and the cofactor.
    pub fn split_off(&self, s: Symbol) -> (u32, Monomial) {
        let e = self.exponent(s);
        let rest = self.0.iter().copied().filter(|&(t, _)| t != s).collect();
        (e, Monomial(rest))
    }

    /// Splits into the part made of symbols satisfying `pred` and the rest.
    pub fn partition(&self, pred: impl Fn(Symbol) -> bool) -> (Monomial, Monomial) {
        let (yes, no): (SmallVec<_>, SmallVec<_>) =
            self.0.iter().copied().partition(|(s, _)| pred(*s));
        (Monomial(yes), Monomial(no))
    }

    fn lex_cmp(&self, other: &Monomial) -> Ordering {
        // Earlier symbols are the more significant variables.
        let (a, b) = (&self.0, &other.0);
        let n = a.len().min(b.len());
        for k in 0..n {
            match a[k].0.cmp(&b[k].0) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match a[k].1.cmp(&b[k].1) {
                    Ordering::Equal => {}
                    o => return o,
                },
            }
        }
        a.len().cmp(&b.len())
    }
}

/// Graded lexicographic order.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.lex_cmp(other))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        for (k, (s, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_is_multiplicative() {
        let x = Monomial::var(Symbol::X);
        let u = Monomial::var(Symbol::U);
        let ux = Monomial::var(Symbol::jet(1, 0));
        assert!(x.mul(&u) > ux);
        assert!(x > u);
        let w = Monomial::var(Symbol::BETA);
        assert_eq!(x.cmp(&u), x.mul(&w).cmp(&u.mul(&w)));
    }

    #[test]
    fn div_and_gcd() {
        let m = Monomial::from_pairs([(Symbol::U, 2), (Symbol::X, 1)]);
        let d = Monomial::var(Symbol::U);
        assert_eq!(
            m.div(&d).unwrap(),
            Monomial::from_pairs([(Symbol::U, 1), (Symbol::X, 1)])
        );
        assert!(d.div(&m).is_none());
        assert_eq!(
            m.gcd(&Monomial::power(Symbol::U, 5)),
            Monomial::power(Symbol::U, 2)
        );
    }
}
