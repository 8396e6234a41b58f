//! Adjoint representation, exact exponentials and optimal systems for a
//! three-dimensional algebra with `[v1, v3] = v1`, `[v2, v3] = -v2`.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::expoly::{ExpPoly, NVARS};
use crate::expr::Rational;
use crate::fields::StructureTable;

pub type RatMatrix = Vec<Vec<Rational>>;
pub type ExpMatrix = Vec<Vec<ExpPoly>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("ad(v{0}) has eigenvalues that are not integers")]
    NonIntegerEigenvalues(usize),
    #[error("generator index {0} is out of range")]
    BadIndex(usize),
    #[error("the zero element has no normal form")]
    ZeroElement,
    #[error("expected a vector of length {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("the structure table is not of the form [v1,v3] = v1, [v2,v3] = -v2")]
    UnsupportedAlgebra,
    #[error("elements do not span a two-dimensional space")]
    NotTwoDimensional,
    #[error("not a subalgebra: the bracket {bracket} is not in the span")]
    NotSubalgebra { bracket: String },
}

fn zeros(n: usize) -> RatMatrix {
    vec![vec![Rational::zero(); n]; n]
}

fn identity(n: usize) -> RatMatrix {
    let mut m = zeros(n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rational::one();
    }
    m
}

fn mat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                out[i][j] += &a[i][k] * &b[k][j];
            }
        }
    }
    out
}

pub fn exp_mat_mul(a: &ExpMatrix, b: &ExpMatrix) -> ExpMatrix {
    let n = a.len();
    let mut out = vec![vec![ExpPoly::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                out[i][j] = &out[i][j] + &(&a[i][k] * &b[k][j]);
            }
        }
    }
    out
}

#[cfg(test)]
fn lift(m: &RatMatrix) -> ExpMatrix {
    m.iter()
        .map(|r| r.iter().map(|c| ExpPoly::constant(c.clone())).collect())
        .collect()
}

/// Matrix of `w -> [v_i, w]` acting on coefficient columns.
pub fn ad_matrix(i: usize, table: &StructureTable) -> Result<RatMatrix, LieError> {
    let n = table.dim();
    if i >= n {
        return Err(LieError::BadIndex(i + 1));
    }
    let mut m = zeros(n);
    for j in 0..n {
        for (k, c) in table.bracket(i, j).iter().enumerate() {
            m[k][j] = c.clone();
        }
    }
    Ok(m)
}

/// Characteristic polynomial coefficients `c_0..c_n` (monic) by
/// Faddeev-LeVerrier.
pub fn char_poly(a: &RatMatrix) -> Vec<Rational> {
    let n = a.len();
    let mut c = vec![Rational::zero(); n + 1];
    c[n] = Rational::one();
    let mut m = zeros(n);
    for k in 1..=n {
        let mut next = mat_mul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &c[n - k + 1];
        }
        m = next;
        let am = mat_mul(a, &m);
        let tr: Rational = (0..n).map(|i| am[i][i].clone()).sum();
        c[n - k] = -tr / Rational::from_integer((k as i64).into());
    }
    c
}

/// Integer roots with multiplicity, if the polynomial splits over the
/// integers.
pub fn integer_roots(coeffs: &[Rational]) -> Option<Vec<i64>> {
    let mut p: Vec<Rational> = coeffs.to_vec();
    let mut roots = Vec::new();
    while p.len() > 1 && p[0].is_zero() {
        roots.push(0);
        p.remove(0);
    }
    while p.len() > 1 {
        let lead = p.last().unwrap().clone();
        let c0 = (&p[0] / &lead).abs();
        // Roots of a monic rational polynomial that are integers divide the
        // numerator of the constant term once denominators are cleared.
        let den_lcm = p.iter().fold(num_bigint::BigInt::one(), |acc, q| {
            num_integer::Integer::lcm(&acc, (q / &lead).denom())
        });
        let bound = (c0 * Rational::from_integer(den_lcm)).to_integer();
        let bound: i64 = i64::try_from(bound).ok()?;
        let mut found = None;
        for d in 1..=bound.max(1) {
            if bound % d != 0 {
                continue;
            }
            for r in [d, -d] {
                if horner(&p, r).is_zero() {
                    found = Some(r);
                    break;
                }
            }
            if found.is_some() {
                break;
            }
        }
        let r = found?;
        roots.push(r);
        p = deflate(&p, r);
    }
    roots.sort();
    Some(roots)
}

fn horner(p: &[Rational], r: i64) -> Rational {
    let x = Rational::from_integer(r.into());
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * &x + c)
}

fn deflate(p: &[Rational], r: i64) -> Vec<Rational> {
    let x = Rational::from_integer(r.into());
    let n = p.len() - 1;
    let mut q = vec![Rational::zero(); n];
    let mut carry = Rational::zero();
    for k in (0..n).rev() {
        carry = &carry * &x + &p[k + 1];
        q[k] = carry.clone();
    }
    q
}

/// `exp(eps * A)` for a matrix with integer eigenvalues, by Putzer's
/// algorithm, in the parameter `eps_var`.
pub fn exp_matrix(a: &RatMatrix, eps_var: usize) -> Option<ExpMatrix> {
    let n = a.len();
    let lambdas = integer_roots(&char_poly(a))?;
    let mut r: Vec<ExpPoly> = Vec::with_capacity(n);
    for (k, &l) in lambdas.iter().enumerate() {
        let l = i32::try_from(l).ok()?;
        let rk = if k == 0 {
            ExpPoly::exp(eps_var, l)
        } else {
            // r_k = e^(l eps) int_0^eps e^(-l s) r_{k-1}(s) ds
            let inner = &ExpPoly::exp(eps_var, -l) * &r[k - 1];
            &ExpPoly::exp(eps_var, l) * &inner.integrate(eps_var)
        };
        r.push(rk);
    }
    let mut out = vec![vec![ExpPoly::zero(); n]; n];
    let mut p = identity(n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if !p[i][j].is_zero() {
                    out[i][j] = &out[i][j] + &r[k].scale(&p[i][j]);
                }
            }
        }
        let mut shifted = a.clone();
        for (i, row) in shifted.iter_mut().enumerate() {
            row[i] -= Rational::from_integer(lambdas[k].into());
        }
        p = mat_mul(&p, &shifted);
    }
    Some(out)
}

/// `Ad(exp(eps v_i))` on coefficient vectors, as a matrix in `eps`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjointMap {
    pub index: usize,
    pub matrix: ExpMatrix,
}

/// `Ad(exp(eps v_i)) = exp(-eps ad(v_i))`, the Lie series
/// `w - eps [v_i, w] + eps^2/2 [v_i, [v_i, w]] - ...`.
pub fn adjoint_exp(i: usize, table: &StructureTable) -> Result<AdjointMap, LieError> {
    let ad = ad_matrix(i, table)?;
    let neg: RatMatrix = ad.iter().map(|r| r.iter().map(|c| -c).collect()).collect();
    let matrix = exp_matrix(&neg, 0).ok_or(LieError::NonIntegerEigenvalues(i + 1))?;
    Ok(AdjointMap { index: i, matrix })
}

fn zero_eps() -> [Rational; NVARS] {
    std::array::from_fn(|_| Rational::zero())
}

impl AdjointMap {
    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    /// The matrix at a rational parameter, when it is rational there.
    pub fn at(&self, eps: &Rational) -> Option<RatMatrix> {
        let mut e = zero_eps();
        e[0] = eps.clone();
        self.matrix
            .iter()
            .map(|r| r.iter().map(|c| c.eval(&e)).collect::<Option<Vec<_>>>())
            .collect()
    }

    /// The matrix at `e^eps = lambda`, valid for entries without polynomial
    /// parts in `eps`.
    pub fn at_exp(&self, lambda: &Rational) -> Option<RatMatrix> {
        let mut l: [Rational; NVARS] = std::array::from_fn(|_| Rational::one());
        l[0] = lambda.clone();
        let e = zero_eps();
        let mut out = Vec::new();
        for row in &self.matrix {
            let mut r = Vec::new();
            for c in row {
                if c.terms().any(|(m, _)| m.pow[0] > 0) {
                    return None;
                }
                r.push(c.eval_with(&e, &l));
            }
            out.push(r);
        }
        Some(out)
    }

    pub fn apply(&self, eps: &Rational, c: &[Rational]) -> Option<Vec<Rational>> {
        Some(mat_vec(&self.at(eps)?, c))
    }

    /// `M(eps) M(-eps)`, which must be the identity.
    pub fn inverse_product(&self) -> ExpMatrix {
        let neg: ExpMatrix = self
            .matrix
            .iter()
            .map(|r| r.iter().map(|c| c.negate_var(0)).collect())
            .collect();
        exp_mat_mul(&self.matrix, &neg)
    }

    /// Entry-wise comparison with `target(eps)` and `target(-eps)`.
    pub fn sign_matching(&self, target: &ExpMatrix) -> Option<i8> {
        if self.matrix == *target {
            return Some(1);
        }
        let flipped: ExpMatrix = target
            .iter()
            .map(|r| r.iter().map(|c| c.negate_var(0)).collect())
            .collect();
        (self.matrix == flipped).then_some(-1)
    }

    pub fn is_identity_at_zero(&self) -> bool {
        self.at(&Rational::zero()) == Some(identity(self.dim()))
    }
}

pub fn mat_vec(m: &RatMatrix, c: &[Rational]) -> Vec<Rational> {
    m.iter()
        .map(|row| row.iter().zip(c).map(|(a, b)| a * b).sum())
        .collect()
}

fn exp_mat_vec(m: &ExpMatrix, c: &[ExpPoly]) -> Vec<ExpPoly> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(c)
                .fold(ExpPoly::zero(), |acc, (a, b)| &acc + &(a * b))
        })
        .collect()
}

/// Checks `[M x, M y] = M [x, y]` on all pairs of basis vectors, with the
/// parameter kept symbolic.
pub fn is_automorphism(map: &AdjointMap, table: &StructureTable) -> bool {
    let n = table.dim();
    let col = |j: usize| -> Vec<ExpPoly> { (0..n).map(|i| map.matrix[i][j].clone()).collect() };
    let bracket = |a: &[ExpPoly], b: &[ExpPoly]| -> Vec<ExpPoly> {
        let mut out = vec![ExpPoly::zero(); n];
        for i in 0..n {
            for j in 0..n {
                let f = &a[i] * &b[j];
                if f.is_zero() {
                    continue;
                }
                for (k, c) in table.bracket(i, j).iter().enumerate() {
                    out[k] = &out[k] + &f.scale(c);
                }
            }
        }
        out
    };
    for i in 0..n {
        for j in 0..n {
            let lhs = bracket(&col(i), &col(j));
            let br: Vec<ExpPoly> = table
                .bracket(i, j)
                .iter()
                .map(|c| ExpPoly::constant(c.clone()))
                .collect();
            let rhs = exp_mat_vec(&map.matrix, &br);
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// The three coefficient maps `F1`, `F2`, `F3` of the published adjoint table.
pub fn published_adjoint_maps() -> [ExpMatrix; 3] {
    let c = |n: i64| ExpPoly::constant(Rational::from_integer(n.into()));
    let e = ExpPoly::eps(0);
    let f1 = vec![
        vec![c(1), c(0), e.clone()],
        vec![c(0), c(1), c(0)],
        vec![c(0), c(0), c(1)],
    ];
    let f2 = vec![
        vec![c(1), c(0), c(0)],
        vec![c(0), c(1), e],
        vec![c(0), c(0), c(1)],
    ];
    let f3 = vec![
        vec![ExpPoly::exp(0, -1), c(0), c(0)],
        vec![c(0), ExpPoly::exp(0, 1), c(0)],
        vec![c(0), c(0), c(1)],
    ];
    [f1, f2, f3]
}

/// True when the table is `[v1,v3] = v1`, `[v2,v3] = -v2`, `[v1,v2] = 0`.
pub fn is_spe_algebra(table: &StructureTable) -> bool {
    let r = |n: i64| Rational::from_integer(n.into());
    table.dim() == 3
        && table.bracket(0, 1) == [r(0), r(0), r(0)]
        && table.bracket(0, 2) == [r(1), r(0), r(0)]
        && table.bracket(1, 2) == [r(0), r(-1), r(0)]
}

/// The structure table `[v1,v3] = v1`, `[v2,v3] = -v2`.
pub fn spe_table() -> StructureTable {
    let r = |n: i64| Rational::from_integer(n.into());
    StructureTable::from_upper(
        3,
        &[
            ((0, 1), vec![r(0), r(0), r(0)]),
            ((0, 2), vec![r(1), r(0), r(0)]),
            ((1, 2), vec![r(0), r(-1), r(0)]),
        ],
    )
}

/// One step of a normalization witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WitnessStep {
    /// Apply `Ad(exp(eps v_generator))`. `table_eps` is the parameter of the
    /// same map written in the published table form.
    Adjoint {
        generator: usize,
        #[serde(serialize_with = "ser_rat")]
        eps: Rational,
        #[serde(serialize_with = "ser_rat")]
        table_eps: Rational,
    },
    /// Multiply by a nonzero scalar.
    Scale {
        #[serde(serialize_with = "ser_rat")]
        factor: Rational,
    },
}

fn ser_rat<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl fmt::Display for WitnessStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessStep::Adjoint {
                generator,
                eps,
                table_eps,
            } => write!(
                f,
                "Ad(exp({eps} v{generator})) [table form F{generator} with eps = {table_eps}]"
            ),
            WitnessStep::Scale { factor } => write!(f, "scale by {factor}"),
        }
    }
}

/// One-dimensional representatives `v1 + a v2`, `b v1 + v2`, `v3`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Representative1d {
    /// `v1 + a v2`.
    TranslationA {
        #[serde(serialize_with = "ser_rat")]
        a: Rational,
    },
    /// `b v1 + v2`.
    TranslationB {
        #[serde(serialize_with = "ser_rat")]
        b: Rational,
    },
    /// `v3`.
    Scaling,
}

impl Representative1d {
    pub fn coefficients(&self) -> Vec<Rational> {
        let (z, o) = (Rational::zero(), Rational::one());
        match self {
            Representative1d::TranslationA { a } => vec![o, a.clone(), z],
            Representative1d::TranslationB { b } => vec![b.clone(), o, z],
            Representative1d::Scaling => vec![z.clone(), z, o],
        }
    }
}

impl fmt::Display for Representative1d {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Representative1d::TranslationA { a } => write!(f, "v1 + ({a})*v2"),
            Representative1d::TranslationB { b } => write!(f, "({b})*v1 + v2"),
            Representative1d::Scaling => f.write_str("v3"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Normalized1d {
    pub representative: Representative1d,
    pub steps: Vec<WitnessStep>,
    /// Sign of `a` (or of `b`) in the translation families; the finer real
    /// class reachable with `Ad(exp(eps v3))` and positive rescaling.
    pub fine_sign: Option<i8>,
    /// Whether the element lies in the stratum `c3 = 0`.
    pub translation_stratum: bool,
}

/// Replays a witness on `c`.
pub fn apply_witness(
    c: &[Rational],
    steps: &[WitnessStep],
    table: &StructureTable,
) -> Result<Vec<Rational>, LieError> {
    let mut v = c.to_vec();
    for s in steps {
        match s {
            WitnessStep::Adjoint { generator, eps, .. } => {
                let map = adjoint_exp(generator - 1, table)?;
                v = map
                    .apply(eps, &v)
                    .ok_or(LieError::NonIntegerEigenvalues(*generator))?;
            }
            WitnessStep::Scale { factor } => {
                v = v.iter().map(|x| x * factor).collect();
            }
        }
    }
    Ok(v)
}

/// Parameter of the published table map matching `Ad(exp(eps v_i))`.
fn table_eps(generator: usize, eps: &Rational, table: &StructureTable) -> Rational {
    let map = adjoint_exp(generator - 1, table).expect("valid generator");
    match map.sign_matching(&published_adjoint_maps()[generator - 1]) {
        Some(-1) => -eps,
        _ => eps.clone(),
    }
}

/// Brings a nonzero element to one of `v1 + a v2`, `b v1 + v2`, `v3`.
pub fn normalize_1d(c: &[Rational], table: &StructureTable) -> Result<Normalized1d, LieError> {
    if !is_spe_algebra(table) {
        return Err(LieError::UnsupportedAlgebra);
    }
    if c.len() != 3 {
        return Err(LieError::Dimension {
            expected: 3,
            got: c.len(),
        });
    }
    if c.iter().all(Zero::is_zero) {
        return Err(LieError::ZeroElement);
    }
    let mut steps = Vec::new();
    let (c1, c2, c3) = (&c[0], &c[1], &c[2]);
    let adjoint = |generator: usize, eps: Rational| WitnessStep::Adjoint {
        generator,
        table_eps: table_eps(generator, &eps, table),
        eps,
    };
    let representative;
    let mut fine_sign = None;
    let scale;
    if !c3.is_zero() {
        // Ad(exp(eps v1)) sends c1 to c1 - eps c3; Ad(exp(eps v2)) sends c2
        // to c2 + eps c3.
        let e1 = c1 / c3;
        if !e1.is_zero() {
            steps.push(adjoint(1, e1));
        }
        let e2 = -(c2 / c3);
        if !e2.is_zero() {
            steps.push(adjoint(2, e2));
        }
        scale = c3.recip();
        representative = Representative1d::Scaling;
    } else if !c1.is_zero() {
        let a = c2 / c1;
        fine_sign = Some(sign(&a));
        scale = c1.recip();
        representative = Representative1d::TranslationA { a };
    } else {
        scale = c2.recip();
        fine_sign = Some(0);
        representative = Representative1d::TranslationB {
            b: Rational::zero(),
        };
    }
    if !scale.is_one() {
        steps.push(WitnessStep::Scale { factor: scale });
    }
    Ok(Normalized1d {
        representative,
        steps,
        fine_sign,
        translation_stratum: c3.is_zero(),
    })
}

fn sign(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Representative2d {
    V1V2,
    V1V3,
    V2V3,
}

impl Representative2d {
    pub fn pair(&self) -> [Vec<Rational>; 2] {
        let e = |i: usize| {
            let mut v = vec![Rational::zero(); 3];
            v[i] = Rational::one();
            v
        };
        match self {
            Representative2d::V1V2 => [e(0), e(1)],
            Representative2d::V1V3 => [e(0), e(2)],
            Representative2d::V2V3 => [e(1), e(2)],
        }
    }
}

impl fmt::Display for Representative2d {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Representative2d::V1V2 => "{v1, v2}",
            Representative2d::V1V3 => "{v1, v3}",
            Representative2d::V2V3 => "{v2, v3}",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Normalized2d {
    pub representative: Representative2d,
    /// `basis_change[r]` gives the new `r`-th element as a combination of the
    /// input pair.
    #[serde(serialize_with = "ser_mat")]
    pub basis_change: RatMatrix,
    pub steps: Vec<WitnessStep>,
}

fn ser_mat<S: serde::Serializer>(m: &RatMatrix, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.len()))?;
    for row in m {
        let r: Vec<String> = row.iter().map(|c| c.to_string()).collect();
        seq.serialize_element(&r)?;
    }
    seq.end()
}

fn combine(m: &[Rational], a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter()
        .zip(b)
        .map(|(x, y)| &m[0] * x + &m[1] * y)
        .collect()
}

/// Coordinates `(s, t)` with `s a + t b = target`, if any.
fn in_span(a: &[Rational], b: &[Rational], target: &[Rational]) -> Option<(Rational, Rational)> {
    // Pick two coordinates with a nonzero 2x2 minor.
    for i in 0..3 {
        for j in i + 1..3 {
            let det = &a[i] * &b[j] - &a[j] * &b[i];
            if det.is_zero() {
                continue;
            }
            let s = (&target[i] * &b[j] - &target[j] * &b[i]) / &det;
            let t = (&a[i] * &target[j] - &a[j] * &target[i]) / &det;
            let ok = (0..3).all(|k| &s * &a[k] + &t * &b[k] == target[k]);
            return ok.then_some((s, t));
        }
    }
    None
}

fn vector_string(v: &[Rational]) -> String {
    let mut parts = Vec::new();
    for (k, c) in v.iter().enumerate() {
        if !c.is_zero() {
            parts.push(format!("({c})*v{}", k + 1));
        }
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

/// Brings a two-dimensional subalgebra to one of `{v1, v2}`, `{v1, v3}`,
/// `{v2, v3}`.
pub fn normalize_2d(
    h1: &[Rational],
    h2: &[Rational],
    table: &StructureTable,
) -> Result<Normalized2d, LieError> {
    if !is_spe_algebra(table) {
        return Err(LieError::UnsupportedAlgebra);
    }
    for h in [h1, h2] {
        if h.len() != 3 {
            return Err(LieError::Dimension {
                expected: 3,
                got: h.len(),
            });
        }
    }
    let rank2 = (0..3).any(|i| (i + 1..3).any(|j| !(&h1[i] * &h2[j] - &h1[j] * &h2[i]).is_zero()));
    if !rank2 {
        return Err(LieError::NotTwoDimensional);
    }
    let br = table.bracket_of(h1, h2);
    if in_span(h1, h2, &br).is_none() {
        return Err(LieError::NotSubalgebra {
            bracket: vector_string(&br),
        });
    }
    let (z, o) = (Rational::zero(), Rational::one());
    // Basis (f, e) of the span with f3 = 0 and e3 = 1 when possible.
    let (change, f, e) = if h1[2].is_zero() && h2[2].is_zero() {
        (
            vec![vec![o.clone(), z.clone()], vec![z.clone(), o.clone()]],
            h1.to_vec(),
            h2.to_vec(),
        )
    } else {
        let (p, q) = (h1[2].clone(), h2[2].clone());
        // f = q h1 - p h2 has no v3 component; e = h/c3 for a row with c3 != 0.
        let fm = vec![q.clone(), -p.clone()];
        let em = if !p.is_zero() {
            vec![p.recip(), z.clone()]
        } else {
            vec![z.clone(), q.recip()]
        };
        let f = combine(&fm, h1, h2);
        let e = combine(&em, h1, h2);
        (vec![fm, em], f, e)
    };
    let mut steps = Vec::new();
    let (representative, change) = if e[2].is_zero() {
        // Both elements lie in span{v1, v2}; invert to the standard basis.
        let det = &f[0] * &e[1] - &f[1] * &e[0];
        let inv = [
            [&e[1] / &det, -(&f[1] / &det)],
            [-(&e[0] / &det), &f[0] / &det],
        ];
        let row = |r: usize| {
            vec![
                &inv[r][0] * &change[0][0] + &inv[r][1] * &change[1][0],
                &inv[r][0] * &change[0][1] + &inv[r][1] * &change[1][1],
            ]
        };
        (Representative2d::V1V2, vec![row(0), row(1)])
    } else if f[1].is_zero() {
        // f = r v1: normalize to v1, remove the v1 part of e, then kill its v2
        // part with Ad(exp(eps v2)) (which fixes v1).
        let r = f[0].clone();
        let fm: Vec<Rational> = change[0].iter().map(|c| c / &r).collect();
        let em: Vec<Rational> = change[1]
            .iter()
            .zip(&fm)
            .map(|(c, d)| c - &e[0] * d)
            .collect();
        let eps = -e[1].clone();
        if !eps.is_zero() {
            steps.push(WitnessStep::Adjoint {
                generator: 2,
                table_eps: table_eps(2, &eps, table),
                eps,
            });
        }
        (Representative2d::V1V3, vec![fm, em])
    } else if f[0].is_zero() {
        let s = f[1].clone();
        let fm: Vec<Rational> = change[0].iter().map(|c| c / &s).collect();
        let em: Vec<Rational> = change[1]
            .iter()
            .zip(&fm)
            .map(|(c, d)| c - &e[1] * d)
            .collect();
        let eps = e[0].clone();
        if !eps.is_zero() {
            steps.push(WitnessStep::Adjoint {
                generator: 1,
                table_eps: table_eps(1, &eps, table),
                eps,
            });
        }
        (Representative2d::V2V3, vec![fm, em])
    } else {
        return Err(LieError::NotSubalgebra {
            bracket: vector_string(&br),
        });
    };
    Ok(Normalized2d {
        representative,
        basis_change: change,
        steps,
    })
}

/// Applies the in-span change and the witness maps to a pair.
pub fn apply_witness_2d(
    h1: &[Rational],
    h2: &[Rational],
    n: &Normalized2d,
    table: &StructureTable,
) -> Result<[Vec<Rational>; 2], LieError> {
    let a = combine(&n.basis_change[0], h1, h2);
    let b = combine(&n.basis_change[1], h1, h2);
    Ok([
        apply_witness(&a, &n.steps, table)?,
        apply_witness(&b, &n.steps, table)?,
    ])
}
