//! Null spaces of linear homogeneous systems whose coefficients are
//! polynomials in the model parameters.
//!
//! Elimination runs over Laurent polynomials in the parameters: monomial
//! pivots are units and are divided out directly. When a column has no
//! monomial entry the elimination falls back to a division-free step with a
//! polynomial pivot. Every pivot that is not a rational constant is returned
//! as a nonvanishing assumption.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::expression::Expr;
use super::monomial::Monomial;
use super::poly::Poly;
use super::symbol::{Param, Symbol};
use super::{ExprError, Rational};

const NPARAM: usize = Param::ALL.len();
type Exps = [i32; NPARAM];

/// Laurent polynomial in the parameters.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
struct LPoly(BTreeMap<Exps, Rational>);

impl LPoly {
    fn from_term(e: Exps, c: Rational) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(e, c);
        }
        LPoly(m)
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn as_monomial(&self) -> Option<(Exps, &Rational)> {
        (self.0.len() == 1).then(|| {
            let (e, c) = self.0.iter().next().unwrap();
            (*e, c)
        })
    }

    fn add_term(&mut self, e: Exps, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.0.entry(e).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.0.remove(&e);
        }
    }

    fn add_scaled(&mut self, k: &LPoly, other: &LPoly) {
        for (e1, c1) in &k.0 {
            for (e2, c2) in &other.0 {
                self.add_term(add_exps(e1, e2), c1 * c2);
            }
        }
    }

    fn mul(&self, other: &LPoly) -> LPoly {
        let mut out = LPoly::default();
        out.add_scaled(self, other);
        out
    }

    fn neg(&self) -> LPoly {
        LPoly(self.0.iter().map(|(e, c)| (*e, -c.clone())).collect())
    }

    fn mul_mono(&self, e: &Exps, c: &Rational) -> LPoly {
        LPoly(
            self.0
                .iter()
                .map(|(k, v)| (add_exps(k, e), v * c))
                .collect(),
        )
    }

    fn to_poly(&self) -> Poly {
        let mut p = Poly::zero();
        for (e, c) in &self.0 {
            debug_assert!(e.iter().all(|&k| k >= 0));
            let m = Monomial::from_pairs(
                Param::ALL
                    .iter()
                    .zip(e.iter())
                    .filter(|(_, &k)| k > 0)
                    .map(|(p, &k)| (Symbol::Param(*p), k as u32)),
            );
            p.add_term(m, c.clone());
        }
        p
    }

    fn from_poly(p: &Poly) -> LPoly {
        let mut out = LPoly::default();
        for (m, c) in p.terms() {
            out.add_term(param_exps(m), c.clone());
        }
        out
    }
}

fn add_exps(a: &Exps, b: &Exps) -> Exps {
    let mut out = *a;
    for (o, k) in out.iter_mut().zip(b) {
        *o += k;
    }
    out
}

fn param_exps(m: &Monomial) -> Exps {
    let mut e = [0; NPARAM];
    for &(s, k) in m.factors() {
        match s {
            Symbol::Param(p) => e[p.index()] = k as i32,
            _ => unreachable!("non-parameter symbol in a coefficient"),
        }
    }
    e
}

type Row = BTreeMap<usize, LPoly>;

/// Null-space basis of a linear homogeneous system.
#[derive(Clone, Debug)]
pub struct LinearSolution {
    pub unknowns: Vec<Symbol>,
    /// Basis vectors; entries are polynomials in the parameters.
    pub basis: Vec<Vec<Poly>>,
    /// Each polynomial is assumed nonzero.
    pub assumptions: Vec<Poly>,
    pub rank: usize,
    pub equations: usize,
}

impl LinearSolution {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// The basis vector as an expression `sum_k v_k * unknown_k`.
    pub fn vector_expr(&self, k: usize) -> Expr {
        let mut p = Poly::zero();
        for (v, s) in self.basis[k].iter().zip(&self.unknowns) {
            p.add_assign_ref(&(v * &Poly::var(*s)));
        }
        Expr::from_poly(p)
    }
}

/// Splits a coefficient monomial into the parameter part and the rest.
fn split_params(m: &Monomial) -> (Monomial, Monomial) {
    m.partition(|s| s.is_param())
}

/// Solves `system = 0` for the listed unknown constants.
///
/// Each expression must be linear and homogeneous in the unknowns; terms are
/// collected over every symbol that is neither an unknown nor a parameter.
pub fn linear_solve(system: &[Expr], unknowns: &[Symbol]) -> Result<LinearSolution, ExprError> {
    let col_of: HashMap<Symbol, usize> =
        unknowns.iter().enumerate().map(|(k, s)| (*s, k)).collect();
    let mut rows: BTreeMap<(usize, i32, Monomial), Row> = BTreeMap::new();
    for (idx, e) in system.iter().enumerate() {
        for (m, power, c) in e.terms() {
            let (unk, rest) = m.partition(|s| col_of.contains_key(&s));
            let col = match unk.factors() {
                [(s, 1)] => col_of[s],
                _ => {
                    let t = Expr::from_poly(Poly::term(c.clone(), m.clone()));
                    return Err(ExprError::NotLinear(t.to_string()));
                }
            };
            let (params, key) = split_params(&rest);
            rows.entry((idx, power, key))
                .or_default()
                .entry(col)
                .or_default()
                .add_term(param_exps(&params), c.clone());
        }
    }
    Ok(eliminate(rows.into_values().collect(), unknowns.to_vec()))
}

/// Solves `sum_k c_k * columns[k] = 0` for the coefficients `c_k`, collecting
/// over all non-parameter symbols. The columns must share one radical kernel.
pub fn solve_combination(
    columns: &[Expr],
    unknowns: Vec<Symbol>,
) -> Result<LinearSolution, ExprError> {
    assert_eq!(columns.len(), unknowns.len());
    let mut kernel: Option<&Poly> = None;
    for c in columns {
        if let Some(k) = c.kernel() {
            match kernel {
                Some(prev) if prev != k => {
                    return Err(ExprError::KernelConflict {
                        first: prev.to_string(),
                        second: k.to_string(),
                    })
                }
                _ => kernel = Some(k),
            }
        }
    }
    // Align strata of equal parity at their lowest power.
    let mut min_power = [i32::MAX; 2];
    for c in columns {
        for part in c.parts() {
            let par = part.power.rem_euclid(2) as usize;
            min_power[par] = min_power[par].min(part.power);
        }
    }
    let mut kpow: Vec<Poly> = vec![Poly::one()];
    let mut rows: BTreeMap<(i32, Monomial), Row> = BTreeMap::new();
    for (col, c) in columns.iter().enumerate() {
        for part in c.parts() {
            let par = part.power.rem_euclid(2);
            let shift = ((part.power - min_power[par as usize]) / 2) as usize;
            let poly = if shift == 0 {
                part.poly.clone()
            } else {
                let k = kernel.expect("radical power without kernel");
                while kpow.len() <= shift {
                    let next = &kpow[kpow.len() - 1] * k;
                    kpow.push(next);
                }
                &part.poly * &kpow[shift]
            };
            for (m, coeff) in poly.terms() {
                let (params, key) = split_params(m);
                rows.entry((par, key))
                    .or_default()
                    .entry(col)
                    .or_default()
                    .add_term(param_exps(&params), coeff.clone());
            }
        }
    }
    Ok(eliminate(rows.into_values().collect(), unknowns))
}

fn row_normalize(row: &mut Row) {
    // Divide by the rational content and the Laurent monomial content.
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    let mut min = [i32::MAX; NPARAM];
    for p in row.values() {
        for (e, c) in &p.0 {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
            for (m, k) in min.iter_mut().zip(e) {
                *m = (*m).min(*k);
            }
        }
    }
    if num.is_zero() {
        return;
    }
    let g = Rational::new(den, num);
    let shift = min.map(|k| -k);
    for p in row.values_mut() {
        *p = p.mul_mono(&shift, &g);
    }
}

fn eliminate(mut rows: Vec<Row>, unknowns: Vec<Symbol>) -> LinearSolution {
    rows.retain(|r| !r.is_empty());
    let equations = rows.len();
    let n = unknowns.len();
    let mut pivot_of_row: Vec<Option<usize>> = vec![None; rows.len()];
    let mut pivot_rows: Vec<(usize, usize)> = Vec::new(); // (row, column)
    let mut assumptions: Vec<Poly> = Vec::new();
    let note = |p: Poly, assumptions: &mut Vec<Poly>| {
        if !p.is_constant() && !assumptions.contains(&p) {
            assumptions.push(p);
        }
    };

    for col in 0..n {
        let candidate = rows
            .iter()
            .enumerate()
            .filter(|(r, row)| pivot_of_row[*r].is_none() && row.contains_key(&col))
            .min_by_key(|(r, row)| {
                let e = &row[&col];
                (e.as_monomial().is_none(), e.0.len(), row.len(), *r)
            })
            .map(|(r, _)| r);
        let Some(pr) = candidate else { continue };
        pivot_of_row[pr] = Some(col);
        pivot_rows.push((pr, col));
        let piv = rows[pr][&col].clone();
        match piv.as_monomial() {
            Some((e, c)) => {
                for (p, &k) in Param::ALL.iter().zip(e.iter()) {
                    if k != 0 {
                        note(Poly::var(Symbol::Param(*p)), &mut assumptions);
                    }
                }
                let inv_e = e.map(|k| -k);
                let inv_c = c.recip();
                for v in rows[pr].values_mut() {
                    *v = v.mul_mono(&inv_e, &inv_c);
                }
                let prow = rows[pr].clone();
                for (r, row) in rows.iter_mut().enumerate() {
                    if r == pr {
                        continue;
                    }
                    let Some(a) = row.get(&col).cloned() else {
                        continue;
                    };
                    let na = a.neg();
                    for (k, v) in &prow {
                        let slot = row.entry(*k).or_default();
                        slot.add_scaled(&na, v);
                        if slot.is_zero() {
                            row.remove(k);
                        }
                    }
                }
            }
            None => {
                let (_, _, prim) = piv.to_poly_laurent_free().content();
                note(prim, &mut assumptions);
                let prow = rows[pr].clone();
                for (r, row) in rows.iter_mut().enumerate() {
                    if r == pr {
                        continue;
                    }
                    let Some(a) = row.get(&col).cloned() else {
                        continue;
                    };
                    let na = a.neg();
                    let mut next = Row::new();
                    for (k, v) in row.iter() {
                        let p = v.mul(&piv);
                        if !p.is_zero() {
                            next.insert(*k, p);
                        }
                    }
                    for (k, v) in &prow {
                        let slot = next.entry(*k).or_default();
                        slot.add_scaled(&na, v);
                        if slot.is_zero() {
                            next.remove(k);
                        }
                    }
                    row_normalize(&mut next);
                    *row = next;
                }
            }
        }
    }

    let pivot_cols: HashMap<usize, usize> = pivot_rows.iter().map(|&(r, c)| (c, r)).collect();
    let mut basis = Vec::new();
    for f in (0..n).filter(|c| !pivot_cols.contains_key(c)) {
        let relevant: Vec<(usize, usize)> = pivot_rows
            .iter()
            .copied()
            .filter(|&(r, _)| rows[r].contains_key(&f))
            .collect();
        let mut factors: Vec<LPoly> = Vec::new();
        for &(r, c) in &relevant {
            let p = &rows[r][&c];
            if p.as_monomial().is_none() && !factors.contains(p) {
                factors.push(p.clone());
            }
        }
        let product = |skip: Option<&LPoly>| -> LPoly {
            let mut acc = LPoly::from_term([0; NPARAM], Rational::one());
            for p in &factors {
                if Some(p) != skip {
                    acc = acc.mul(p);
                }
            }
            acc
        };
        let mut vec: Vec<LPoly> = vec![LPoly::default(); n];
        vec[f] = product(None);
        for &(r, c) in &relevant {
            let p = &rows[r][&c];
            let cof = match p.as_monomial() {
                Some((e, k)) => product(None).mul_mono(&e.map(|x| -x), &k.recip()),
                None => product(Some(p)),
            };
            vec[c] = rows[r][&f].mul(&cof).neg();
        }
        basis.push(tidy_vector(vec, &factors));
    }

    LinearSolution {
        unknowns,
        basis,
        assumptions,
        rank: pivot_rows.len(),
        equations,
    }
}

impl LPoly {
    /// Shifts exponents to be nonnegative and converts to a polynomial.
    fn to_poly_laurent_free(&self) -> Poly {
        let mut min = [0; NPARAM];
        for e in self.0.keys() {
            for (m, k) in min.iter_mut().zip(e) {
                *m = (*m).min(*k);
            }
        }
        self.mul_mono(&min.map(|k| -k), &Rational::one()).to_poly()
    }
}

/// Clears Laurent denominators, common factors and rational content; the
/// first nonzero entry is made positive.
fn tidy_vector(mut vec: Vec<LPoly>, factors: &[LPoly]) -> Vec<Poly> {
    let mut row: Row = vec
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(k, v)| (k, v.clone()))
        .collect();
    row_normalize(&mut row);
    for v in vec.iter_mut() {
        *v = LPoly::default();
    }
    for (k, v) in row {
        vec[k] = v;
    }
    let mut polys: Vec<Poly> = vec.iter().map(LPoly::to_poly).collect();
    for f in factors {
        let fp = f.to_poly_laurent_free();
        loop {
            let divided: Option<Vec<Poly>> = polys
                .iter()
                .map(|p| {
                    if p.is_zero() {
                        Some(Poly::zero())
                    } else {
                        p.div_exact(&fp)
                    }
                })
                .collect();
            match divided {
                Some(d) if !fp.is_constant() => polys = d,
                _ => break,
            }
        }
    }
    // Renormalize after factor removal.
    let mut row: Row = polys
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(k, p)| (k, LPoly::from_poly(p)))
        .collect();
    row_normalize(&mut row);
    let sign = row
        .values()
        .next()
        .and_then(|p| p.0.values().next_back())
        .map(|c| c.is_negative())
        .unwrap_or(false);
    let mut out = vec![Poly::zero(); vec.len()];
    for (k, v) in row {
        let p = v.to_poly();
        out[k] = if sign { -p } else { p };
    }
    out
}
