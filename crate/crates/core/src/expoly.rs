//! Exponential polynomials `sum q * eps^p * e^(k eps)` in a few group
//! parameters, with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::expr::Rational;

/// Number of independent parameters an [`ExpPoly`] may use.
pub const NVARS: usize = 3;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct ExpMono {
    pub pow: [u32; NVARS],
    pub exp: [i32; NVARS],
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct ExpPoly {
    terms: BTreeMap<ExpMono, Rational>,
}

impl ExpPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(ExpMono::default(), c);
        p
    }

    /// The parameter `eps_v`.
    pub fn eps(v: usize) -> Self {
        let mut m = ExpMono::default();
        m.pow[v] = 1;
        Self::from_mono(m)
    }

    /// `e^(k eps_v)`.
    pub fn exp(v: usize, k: i32) -> Self {
        let mut m = ExpMono::default();
        m.exp[v] = k;
        Self::from_mono(m)
    }

    fn from_mono(m: ExpMono) -> Self {
        let mut p = Self::zero();
        p.add_term(m, Rational::one());
        p
    }

    fn add_term(&mut self, m: ExpMono, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExpMono, &Rational)> {
        self.terms.iter()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (*m == ExpMono::default()).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        for (m, q) in &self.terms {
            out.add_term(*m, q * c);
        }
        out
    }

    /// Replaces `eps_v` by `-eps_v`.
    pub fn negate_var(&self, v: usize) -> Self {
        let mut out = Self::zero();
        for (m, q) in &self.terms {
            let mut n = *m;
            n.exp[v] = -n.exp[v];
            let sign = if m.pow[v] % 2 == 1 {
                -q.clone()
            } else {
                q.clone()
            };
            out.add_term(n, sign);
        }
        out
    }

    /// Replaces `eps_v` by `eps_v + eps_w`.
    pub fn shift(&self, v: usize, w: usize) -> Self {
        let mut out = Self::zero();
        for (m, q) in &self.terms {
            let p = m.pow[v];
            let mut binom = Rational::one();
            for k in 0..=p {
                let mut n = *m;
                n.pow[v] = p - k;
                n.pow[w] += k;
                n.exp[w] += m.exp[v];
                out.add_term(n, q * &binom);
                binom = binom * Rational::from_integer((p - k).into())
                    / Rational::from_integer((k + 1).into());
            }
        }
        out
    }

    /// Renames `eps_v` to `eps_w` (which must not occur).
    pub fn rename(&self, v: usize, w: usize) -> Self {
        let mut out = Self::zero();
        for (m, q) in &self.terms {
            let mut n = *m;
            n.pow[w] = m.pow[v];
            n.exp[w] = m.exp[v];
            n.pow[v] = 0;
            n.exp[v] = 0;
            out.add_term(n, q.clone());
        }
        out
    }

    /// `int_0^eps f(s) ds` in the variable `v`.
    pub fn integrate(&self, v: usize) -> Self {
        let mut out = Self::zero();
        for (m, q) in &self.terms {
            out = &out + &integrate_mono(m, v).scale(q);
        }
        out
    }

    /// Evaluates with `eps_v = eps[v]` and `e^(eps_v) = lambda[v]`; the caller
    /// guarantees the two are consistent.
    pub fn eval_with(&self, eps: &[Rational; NVARS], lambda: &[Rational; NVARS]) -> Rational {
        let mut acc = Rational::zero();
        for (m, q) in &self.terms {
            let mut t = q.clone();
            for v in 0..NVARS {
                t *= num_traits::pow(eps[v].clone(), m.pow[v] as usize);
                let l = &lambda[v];
                let k = m.exp[v];
                let pw = num_traits::pow(l.clone(), k.unsigned_abs() as usize);
                t = if k >= 0 { t * pw } else { t / pw };
            }
            acc += t;
        }
        acc
    }

    /// Evaluates at rational parameters; `None` when an exponential of a
    /// nonzero value would be needed.
    pub fn eval(&self, eps: &[Rational; NVARS]) -> Option<Rational> {
        for m in self.terms.keys() {
            for v in 0..NVARS {
                if m.exp[v] != 0 && !eps[v].is_zero() {
                    return None;
                }
            }
        }
        let ones: [Rational; NVARS] = std::array::from_fn(|_| Rational::one());
        Some(self.eval_with(eps, &ones))
    }

    pub fn display_with<'a>(&'a self, names: &'a [&'a str]) -> impl fmt::Display + 'a {
        Named { p: self, names }
    }
}

fn integrate_mono(m: &ExpMono, v: usize) -> ExpPoly {
    // int_0^e s^p e^(c s) ds, other variables are constants.
    let p = m.pow[v];
    let c = m.exp[v];
    let mut base = *m;
    base.pow[v] = 0;
    base.exp[v] = 0;
    let rest = ExpPoly::from_mono(base);
    if c == 0 {
        let mut n = ExpMono::default();
        n.pow[v] = p + 1;
        let t = ExpPoly::from_mono(n).scale(&Rational::new(1.into(), (p + 1).into()));
        return &t * &rest;
    }
    let cr = Rational::from_integer(c.into());
    let mut acc = &ExpPoly::exp(v, c) - &ExpPoly::one();
    acc = acc.scale(&cr.recip());
    for k in 1..=p {
        let mut n = ExpMono::default();
        n.pow[v] = k;
        n.exp[v] = c;
        let lead = ExpPoly::from_mono(n).scale(&cr.recip());
        let kr = Rational::from_integer(k.into());
        acc = &lead - &acc.scale(&(kr / &cr));
    }
    &acc * &rest
}

impl Add for &ExpPoly {
    type Output = ExpPoly;
    fn add(self, o: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        for (m, q) in &o.terms {
            out.add_term(*m, q.clone());
        }
        out
    }
}

impl Sub for &ExpPoly {
    type Output = ExpPoly;
    fn sub(self, o: &ExpPoly) -> ExpPoly {
        self + &(-o)
    }
}

impl Neg for &ExpPoly {
    type Output = ExpPoly;
    fn neg(self) -> ExpPoly {
        self.scale(&-Rational::one())
    }
}

impl Mul for &ExpPoly {
    type Output = ExpPoly;
    fn mul(self, o: &ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for (a, p) in &self.terms {
            for (b, q) in &o.terms {
                let mut m = *a;
                for v in 0..NVARS {
                    m.pow[v] += b.pow[v];
                    m.exp[v] += b.exp[v];
                }
                out.add_term(m, p * q);
            }
        }
        out
    }
}

struct Named<'a> {
    p: &'a ExpPoly,
    names: &'a [&'a str],
}

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, q)) in self.p.terms.iter().rev().enumerate() {
            let mut factors = Vec::new();
            for v in 0..NVARS {
                let name = self.names.get(v).copied().unwrap_or("eps");
                match m.pow[v] {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    p => factors.push(format!("{name}^{p}")),
                }
                match m.exp[v] {
                    0 => {}
                    1 => factors.push(format!("exp({name})")),
                    -1 => factors.push(format!("exp(-{name})")),
                    e => factors.push(format!("exp({e}*{name})")),
                }
            }
            let neg = q.is_negative();
            let mag = q.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{mag}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_with(&["eps", "eps2", "eps3"]).fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{frac, rat};

    #[test]
    fn integration_of_exponentials() {
        // int_0^e s e^s ds = e e^e - e^e + 1
        let mut m = ExpMono::default();
        m.pow[0] = 1;
        m.exp[0] = 1;
        let got = integrate_mono(&m, 0);
        let mut a = ExpMono::default();
        a.pow[0] = 1;
        a.exp[0] = 1;
        let expected = &(&ExpPoly::from_mono(a) - &ExpPoly::exp(0, 1)) + &ExpPoly::one();
        assert_eq!(got, expected);
        assert_eq!(
            ExpPoly::eps(0).integrate(0),
            ExpPoly::eps(0).pow_test(2).scale(&frac(1, 2))
        );
    }

    #[test]
    fn shift_is_additive() {
        let f = &(&ExpPoly::eps(0) * &ExpPoly::exp(0, 2)) + &ExpPoly::eps(0);
        let s = f.shift(0, 1);
        let at = |a: i64, b: i64| s.eval_with(&[rat(a), rat(b), rat(0)], &[rat(3), rat(5), rat(1)]);
        // eps0 + eps1 with e^eps0 = 3, e^eps1 = 5: (a+b)*225 + (a+b)
        assert_eq!(at(1, 2), rat(3 * 225 + 3));
        assert_eq!(
            f.negate_var(0).eval(&[rat(0), rat(0), rat(0)]),
            Some(rat(0))
        );
    }

    #[test]
    fn display() {
        let f = &ExpPoly::exp(0, -1).scale(&rat(2)) - &ExpPoly::eps(0);
        assert_eq!(f.to_string(), "-eps + 2*exp(-eps)");
    }

    impl ExpPoly {
        fn pow_test(&self, n: u32) -> ExpPoly {
            (0..n).fold(ExpPoly::one(), |acc, _| &acc * self)
        }
    }
}
