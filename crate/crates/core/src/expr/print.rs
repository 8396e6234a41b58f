use std::fmt::{self, Write};

use num_traits::{One, Signed};

use super::expression::Expr;
use super::monomial::Monomial;
use super::poly::Poly;
use super::Rational;

/// Writes `c*m` without sign; returns whether the coefficient was negative.
fn write_term(out: &mut String, m: &Monomial, c: &Rational, force_coeff: bool) -> bool {
    let neg = c.is_negative();
    let a = c.abs();
    if m.is_one() {
        write!(out, "{a}").unwrap();
    } else if a.is_one() && !force_coeff {
        write!(out, "{m}").unwrap();
    } else {
        write!(out, "{a}*{m}").unwrap();
    }
    neg
}

/// Terms in descending monomial order, joined with ` + ` / ` - `.
fn write_poly(out: &mut String, p: &Poly) {
    if p.is_zero() {
        out.push('0');
        return;
    }
    for (k, (m, c)) in p.terms().rev().enumerate() {
        let mut t = String::new();
        let neg = write_term(&mut t, m, c, false);
        match (k, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&t);
    }
}

pub(crate) fn poly_string(p: &Poly) -> String {
    let mut s = String::new();
    write_poly(&mut s, p);
    s
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&poly_string(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let kernel = self.kernel().map(poly_string);
        let mut out = String::new();
        for (idx, part) in self.parts().iter().enumerate() {
            if part.power == 0 {
                if idx > 0 {
                    let mut body = String::new();
                    write_poly(&mut body, &part.poly);
                    push_signed(&mut out, &body);
                } else {
                    write_poly(&mut out, &part.poly);
                }
                continue;
            }
            let root = match part.power.unsigned_abs() {
                1 => format!("sqrt({})", kernel.as_deref().unwrap()),
                k => format!("sqrt({})^{k}", kernel.as_deref().unwrap()),
            };
            let op = if part.power < 0 { '/' } else { '*' };
            let mut body = String::new();
            if part.poly.len() == 1 {
                let (m, c) = part.poly.terms().next().unwrap();
                let mut t = String::new();
                let neg = write_term(&mut t, m, c, false);
                if neg {
                    body.push('-');
                }
                body.push_str(&t);
            } else {
                body.push('(');
                write_poly(&mut body, &part.poly);
                body.push(')');
            }
            write!(body, "{op}{root}").unwrap();
            if idx > 0 {
                push_signed(&mut out, &body);
            } else {
                out.push_str(&body);
            }
        }
        f.write_str(&out)
    }
}

fn push_signed(out: &mut String, body: &str) {
    match body.strip_prefix('-') {
        Some(rest) => {
            out.push_str(" - ");
            out.push_str(rest);
        }
        None => {
            out.push_str(" + ");
            out.push_str(body);
        }
    }
}
