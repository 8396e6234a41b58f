//! Implementations of the `jetlie` subcommands. Each returns a [`Report`]
//! whose exit code encodes the mathematical verdict.

use jetlie::claims::{
    claimed_family_members, claimed_mixed_terms, claimed_point_fields, claimed_scaling_weight,
    claimed_second_order_equations, first_order_arity, first_order_collection, Interp,
    CLAIMED_FLOWS, CLAIMED_SCALING_CHARACTERISTIC, V4, V5, V5_TIME,
};
use jetlie::engine::{
    ansatz_solve, bounded_nonexistence, determining_system, point_affine_basis,
    proper_contact_count, residual_of, scaling_weight, span_coordinates, spot_check,
    AnsatzSolution, NonexistenceReport,
};
use jetlie::expoly::ExpPoly;
use jetlie::expr::{parse, Expr, Poly, Rational, Symbol};
use jetlie::fields::{structure_table, PointVectorField, StructureTable};
use jetlie::group::{
    derived_point_algebra, equation_invariance, flow, reduce as reduce_equation, GroupError,
    PointAlgebra, ReductionRep,
};
use jetlie::lie::{
    adjoint_exp, apply_witness, apply_witness_2d, is_automorphism, normalize_1d, normalize_2d,
    published_adjoint_maps, ExpMatrix, LieError, Representative1d, WitnessStep,
};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::report::{ClaimDiff, Report};
use crate::CliError;

/// Number of random points in a numeric cross-check.
pub const SPOT_POINTS: usize = 100;
/// Residuals longer than this are abbreviated in text output.
const TEXT_LIMIT: usize = 240;

fn parse_expr(text: &str) -> Result<Expr, CliError> {
    parse(text).map_err(|e| CliError::Input(format!("cannot parse {text:?}: {e}")))
}

fn parse_rational(text: &str) -> Result<Rational, CliError> {
    text.trim()
        .parse()
        .map_err(|_| CliError::Input(format!("expected a rational number, got {text:?}")))
}

fn parse_symbol(text: &str) -> Result<Symbol, CliError> {
    let e = parse_expr(text)?;
    let bad = || CliError::Input(format!("{text:?} is not a single coordinate"));
    let p = e.as_poly().ok_or_else(bad)?;
    let mut terms = p.terms();
    let (m, c) = terms.next().ok_or_else(bad)?;
    match (terms.next(), m.factors()) {
        (None, [(s, 1)]) if c.is_one() => Ok(*s),
        _ => Err(bad()),
    }
}

/// Splits at commas outside brackets and parentheses.
fn split_top(text: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if ch == sep && depth == 0 {
            out.push(cur.trim().to_string());
            cur.clear();
        } else {
            cur.push(ch);
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn abbreviate(e: &Expr) -> String {
    let s = e.to_string();
    if s.len() <= TEXT_LIMIT {
        s
    } else {
        let cut = s
            .char_indices()
            .take_while(|(i, _)| *i < TEXT_LIMIT)
            .last()
            .map_or(0, |(i, c)| i + c.len_utf8());
        format!("{} ... ({} terms)", &s[..cut], e.term_count())
    }
}

/// The first printed term of `e`.
pub fn leading_term(e: &Expr) -> Option<Expr> {
    let part = e.parts().first()?;
    let (m, c) = part.poly.terms().next_back()?;
    let mono = Expr::from_poly(Poly::term(c.clone(), m.clone()));
    if part.power == 0 {
        return Some(mono);
    }
    let r = Expr::radical(e.kernel()?, part.power).ok()?;
    Some(&mono * &r)
}

/// `c1 v1 + c2 v2 + c3 v3` written with `v` names.
pub fn combination(v: &[Rational]) -> String {
    let mut out = String::new();
    for (k, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let name = format!("v{}", k + 1);
        let neg = *c < Rational::zero();
        let a = if neg { -c } else { c.clone() };
        let body = if a.is_one() {
            name
        } else {
            format!("{a}*{name}")
        };
        match (out.is_empty(), neg) {
            (true, true) => out.push('-'),
            (true, false) => {}
            (false, true) => out.push_str(" - "),
            (false, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

fn rationals_json(v: &[Rational]) -> Value {
    json!(v.iter().map(|c| c.to_string()).collect::<Vec<_>>())
}

fn verdict_word(zero: bool) -> &'static str {
    if zero {
        "symmetry"
    } else {
        "not a symmetry"
    }
}

// ---------------------------------------------------------------- verify

struct VerifyItem {
    target: String,
    reading: Option<Interp>,
    q: Expr,
    claim: Option<String>,
}

fn aliases() -> Vec<(String, Expr)> {
    let mut out: Vec<(String, Expr)> = [("v4", V4), ("v5", V5), ("v5-time", V5_TIME)]
        .into_iter()
        .map(|(n, t)| (n.to_string(), parse(t).expect("static")))
        .collect();
    out.extend(claimed_family_members());
    out.push((
        "scaling".into(),
        parse(CLAIMED_SCALING_CHARACTERISTIC).expect("static"),
    ));
    out
}

fn has_third_order(e: &Expr) -> bool {
    e.contains(Symbol::jet(3, 0)) || e.contains(Symbol::jet(0, 3))
}

fn verify_items(cfg: &RunConfig, targets: &[String]) -> Result<Vec<VerifyItem>, CliError> {
    let known = aliases();
    let mut items = Vec::new();
    for target in targets {
        let (base, claim) = match known.iter().find(|(n, _)| n == target) {
            Some((n, e)) => (e.clone(), Some(n.clone())),
            None => {
                let e = parse_expr(target)?;
                let claim = known.iter().find(|(_, k)| *k == e).map(|(n, _)| n.clone());
                (e, claim)
            }
        };
        let mut seen: Vec<Expr> = Vec::new();
        for reading in cfg.interp.readings() {
            let q = cfg.specialize(&reading.apply(&base))?;
            if seen.contains(&q) {
                continue;
            }
            seen.push(q.clone());
            items.push(VerifyItem {
                target: target.clone(),
                reading: has_third_order(&base).then_some(reading),
                q,
                claim: claim.clone(),
            });
        }
    }
    Ok(items)
}

/// `verify`: residual of each characteristic, with a numeric cross-check.
/// Exit code 0 when every residual vanishes and 1 otherwise.
pub fn verify(cfg: &RunConfig, targets: &[String]) -> Result<Report, CliError> {
    if targets.is_empty() {
        return Err(CliError::Input(
            "verify needs at least one characteristic".into(),
        ));
    }
    let items = verify_items(cfg, targets)?;
    let jets = cfg.jets();
    let outcomes: Vec<_> = items
        .par_iter()
        .map(|it| {
            let r = residual_of(&jets, &it.q)?;
            let s = spot_check(&r.pieces, r.is_zero, cfg.seed, SPOT_POINTS)?;
            Ok::<_, CliError>((r, s))
        })
        .collect::<Result<_, _>>()?;

    let mut report = Report::new("verify", cfg.echo());
    let mut results = Vec::new();
    let mut all_zero = true;
    for (it, (r, s)) in items.iter().zip(&outcomes) {
        all_zero &= r.is_zero;
        let reading = it.reading.map(|i| i.to_string());
        let lead = leading_term(&r.value);
        let label = match &reading {
            Some(i) => format!("{} [{i}]", it.target),
            None => it.target.clone(),
        };
        report.line(format!("{label}: {}", verdict_word(r.is_zero)));
        report.line(format!("  Q = {}", abbreviate(&it.q)));
        if !r.is_zero {
            report.line(format!("  residual = {}", abbreviate(&r.value)));
            if let Some(l) = &lead {
                report.line(format!("  leading term = {l}"));
            }
        }
        report.line(format!(
            "  spot check: {}/{} nonzero points, seed {}, {}",
            s.nonzero_points,
            s.points,
            s.seed,
            if s.agrees { "agrees" } else { "DISAGREES" }
        ));
        results.push(json!({
            "target": it.target,
            "reading": reading,
            "characteristic": it.q.to_string(),
            "verdict": verdict_word(r.is_zero),
            "is_zero": r.is_zero,
            "residual": r.value.to_string(),
            "residual_terms": r.value.term_count(),
            "leading_term": lead.map(|l| l.to_string()),
            "free_coordinates": r.free_coordinates.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "spot_check": s,
        }));
        if let Some(name) = &it.claim {
            let item = match &reading {
                Some(i) => format!("{name} = {} ({i} reading)", abbreviate(&it.q)),
                None => format!("{name} = {}", abbreviate(&it.q)),
            };
            report.claim(ClaimDiff::new(
                item,
                "symmetry",
                verdict_word(r.is_zero),
                r.is_zero,
            ));
        }
    }
    report.result = json!({ "verdicts": results, "all_symmetries": all_zero });
    report.exit_code = if all_zero { 0 } else { 1 };
    Ok(report)
}

// ---------------------------------------------------------------- solve

fn solution_json(sol: &AnsatzSolution) -> Value {
    json!({
        "basis_size": sol.basis.len(),
        "dimension": sol.dimension(),
        "characteristics": sol.characteristics.iter().map(|c| c.q.to_string()).collect::<Vec<_>>(),
        "verified": sol.verified,
        "equations": sol.equations,
        "rank": sol.rank,
        "assumptions": sol.assumptions.iter().map(|p| format!("{p} != 0")).collect::<Vec<_>>(),
    })
}

fn solution_lines(report: &mut Report, sol: &AnsatzSolution) {
    report.line(format!(
        "basis size {}, {} equations, rank {}",
        sol.basis.len(),
        sol.equations,
        sol.rank
    ));
    report.line(format!("dimension {}", sol.dimension()));
    for (k, c) in sol.characteristics.iter().enumerate() {
        report.line(format!("  Q{} = {}", k + 1, abbreviate(&c.q)));
    }
    report.line(format!(
        "re-verified: {}",
        if sol.verified { "yes" } else { "NO" }
    ));
    if !sol.assumptions.is_empty() {
        let a: Vec<String> = sol
            .assumptions
            .iter()
            .map(|p| format!("{p} != 0"))
            .collect();
        report.line(format!("pivot assumptions: {}", a.join(", ")));
    }
}

fn span_of(sol: &AnsatzSolution) -> Vec<Expr> {
    sol.characteristics.iter().map(|c| c.q.clone()).collect()
}

fn solve_point_affine(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let jets = cfg.jets();
    let sol = ansatz_solve(&jets, &point_affine_basis())?;
    report.line("point-affine ansatz: first-order characteristics affine in u_x, u_t");
    solution_lines(report, &sol);
    let span = span_of(&sol);
    let weight = scaling_weight(&jets)?;
    let mut scaling = Value::Null;
    if let Some(c) = &weight {
        let q = parse_expr(&format!("x*u[1,0] - t*u[0,1] - ({c})*u"))?;
        let r = residual_of(&jets, &q)?;
        let in_span = span_coordinates(&span, &q)?.is_some();
        report.line(format!("scaling generator: {q}"));
        report.line(format!(
            "  weight c* = {c}, residual {}, in solution space: {}",
            if r.is_zero { "0" } else { "nonzero" },
            in_span
        ));
        scaling = json!({
            "weight": c.to_string(),
            "characteristic": q.to_string(),
            "residual_zero": r.is_zero,
            "in_span": in_span,
        });
    } else {
        report.line("no scaling generator of the form x u_x - t u_t - c u");
    }
    let translations: Vec<bool> = ["u[1,0]", "u[0,1]"]
        .iter()
        .map(|t| Ok(span_coordinates(&span, &parse_expr(t)?)?.is_some()))
        .collect::<Result<_, CliError>>()?;
    let claimed_c = claimed_scaling_weight();
    report.claim(ClaimDiff::new(
        "dimension of the point symmetry algebra",
        "3",
        sol.dimension().to_string(),
        sol.dimension() == 3,
    ));
    report.claim(ClaimDiff::new(
        "scaling weight c* in x u_x - t u_t - c* u",
        claimed_c.to_string(),
        weight.as_ref().map_or("none".into(), |w| w.to_string()),
        weight.as_ref() == Some(&claimed_c),
    ));
    let claimed_q = parse_expr(CLAIMED_SCALING_CHARACTERISTIC)?;
    let claimed_r = residual_of(&jets, &cfg.specialize(&claimed_q)?)?;
    report.claim(ClaimDiff::new(
        format!("{claimed_q} is a symmetry"),
        "symmetry",
        verdict_word(claimed_r.is_zero),
        claimed_r.is_zero,
    ));
    let fields: Vec<String> = claimed_point_fields()
        .iter()
        .map(|f| f.to_string())
        .collect();
    report.result = json!({
        "basis": "point-affine",
        "solution": solution_json(&sol),
        "scaling": scaling,
        "contains_translations": translations,
        "claimed_generators": fields,
    });
    Ok(())
}

fn default_degree(order: u16) -> u32 {
    if order == 4 {
        2
    } else {
        3
    }
}

fn family_comparison(
    cfg: &RunConfig,
    report: &mut Report,
    sol: &AnsatzSolution,
) -> Result<Value, CliError> {
    let jets = cfg.jets();
    let span = span_of(sol);
    let mut rows = Vec::new();
    report.line("claimed third-order family, one constant at a time:");
    for (name, q) in claimed_family_members() {
        for reading in cfg.interp.readings() {
            if reading == Interp::Cubed && !has_third_order(&q) {
                continue;
            }
            let qq = cfg.specialize(&reading.apply(&q))?;
            let r = residual_of(&jets, &qq)?;
            let in_span = span_coordinates(&span, &qq)?.is_some();
            let tag = if has_third_order(&q) {
                format!("{name} [{reading}]")
            } else {
                name.clone()
            };
            report.line(format!(
                "  {tag}: {}, in ansatz span: {in_span}",
                verdict_word(r.is_zero)
            ));
            report.claim(ClaimDiff::new(
                format!("family member {tag}"),
                "symmetry",
                verdict_word(r.is_zero),
                r.is_zero,
            ));
            rows.push(json!({
                "member": name,
                "reading": reading,
                "characteristic": qq.to_string(),
                "is_zero": r.is_zero,
                "in_span": in_span,
            }));
        }
    }
    Ok(json!(rows))
}

fn solve_order(
    cfg: &RunConfig,
    report: &mut Report,
    order: u16,
    degree: Option<u32>,
) -> Result<(), CliError> {
    let degree = degree.unwrap_or_else(|| default_degree(order));
    let r: NonexistenceReport = bounded_nonexistence(&cfg.jets(), order, degree, cfg.basis_limit)?;
    report.line(format!(
        "order-{order} ansatz, jet degree <= {degree} ({})",
        NonexistenceReport::LABEL
    ));
    solution_lines(report, &r.solution);
    report.line(format!(
        "lower-order dimension {} (basis {}), new dimensions {}",
        r.lower_dimension, r.lower_basis_size, r.new_dimensions
    ));
    let mut extra = Value::Null;
    match order {
        1 => {
            let contact = proper_contact_count(&r.solution.characteristics);
            report.line(format!("proper contact generators: {contact}"));
            report.claim(ClaimDiff::new(
                "first-order symmetries beyond point symmetries",
                "0",
                contact.to_string(),
                contact == 0,
            ));
            extra = json!({ "proper_contact": contact });
        }
        3 => extra = family_comparison(cfg, report, &r.solution)?,
        _ => {}
    }
    if order == 2 || order == 4 {
        report.claim(ClaimDiff::new(
            format!(
                "new order-{order} generators ({})",
                NonexistenceReport::LABEL
            ),
            "0",
            r.new_dimensions.to_string(),
            r.new_dimensions == 0,
        ));
    }
    report.result = json!({
        "basis": format!("order-{order}"),
        "label": NonexistenceReport::LABEL,
        "order": order,
        "degree": degree,
        "lower_basis_size": r.lower_basis_size,
        "lower_dimension": r.lower_dimension,
        "new_dimensions": r.new_dimensions,
        "solution": solution_json(&r.solution),
        "comparison": extra,
    });
    Ok(())
}

/// `solve`: finite-ansatz solution of the symmetry condition.
pub fn solve(cfg: &RunConfig, args: &[String], degree: Option<u32>) -> Result<Report, CliError> {
    let mut report = Report::new("solve", cfg.echo());
    let first = args
        .first()
        .ok_or_else(|| CliError::Input("solve needs a basis name or monomials".into()))?;
    if args.len() == 1 && first == "point-affine" {
        solve_point_affine(cfg, &mut report)?;
        return Ok(report);
    }
    if args.len() == 1 {
        if let Some(n) = first.strip_prefix("order-") {
            let order: u16 = n
                .parse()
                .ok()
                .filter(|o| (1..=4).contains(o))
                .ok_or_else(|| CliError::Input(format!("unknown basis {first:?}")))?;
            solve_order(cfg, &mut report, order, degree)?;
            return Ok(report);
        }
    }
    let mut basis = Vec::new();
    for s in args {
        for piece in s.split(';').filter(|p| !p.trim().is_empty()) {
            basis.push(cfg.specialize(&parse_expr(piece)?)?);
        }
    }
    if basis.len() > cfg.basis_limit {
        return Err(CliError::Input(format!(
            "ansatz basis has {} elements, above the limit {}",
            basis.len(),
            cfg.basis_limit
        )));
    }
    let sol = ansatz_solve(&cfg.jets(), &basis)?;
    report.line("user ansatz");
    solution_lines(&mut report, &sol);
    report.result = json!({ "basis": "custom", "solution": solution_json(&sol) });
    Ok(report)
}

// ---------------------------------------------------------------- determining

/// `determining`: the opaque-function determining system of `Q(arity)`.
pub fn determining(
    cfg: &RunConfig,
    arity: Option<&str>,
    collect: Option<&str>,
) -> Result<Report, CliError> {
    let args: Vec<Symbol> = match arity {
        Some(a) => split_top(a, ',')
            .iter()
            .map(|s| parse_symbol(s))
            .collect::<Result<_, _>>()?,
        None => first_order_arity().to_vec(),
    };
    let coll: Vec<Symbol> = match collect {
        Some(c) => split_top(c, ',')
            .iter()
            .map(|s| parse_symbol(s))
            .collect::<Result<_, _>>()?,
        None => first_order_collection().to_vec(),
    };
    let sys = determining_system(&cfg.jets(), &args, &coll)?;
    let mut report = Report::new("determining", cfg.echo());
    let names: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    let cnames: Vec<String> = coll.iter().map(|s| s.to_string()).collect();
    report.line(format!(
        "Q({}), collected in {}: {} equations",
        names.join(", "),
        cnames.join(", "),
        sys.equations.len()
    ));
    let mut eqs = Vec::new();
    for (k, d) in sys.equations.iter().enumerate() {
        let coef = Expr::from_poly(Poly::term(Rational::one(), d.monomial.clone()));
        report.line(format!(
            "  E{} [coefficient of {coef}]: {} = 0",
            k + 1,
            d.equation
        ));
        eqs.push(json!({
            "monomial": coef.to_string(),
            "radical_power": d.power,
            "equation": d.equation.to_string(),
        }));
    }
    if args == first_order_arity() && coll == first_order_collection() {
        for (name, e) in claimed_second_order_equations(sys.function) {
            let found = sys.contains(&e);
            report.claim(ClaimDiff::new(
                format!("equation {name}"),
                "present",
                if found { "present" } else { "absent" },
                found,
            ));
        }
        let mixed = claimed_mixed_terms(sys.function);
        let hit = sys.containing_terms(&mixed);
        report.claim(ClaimDiff::new(
            format!("equation beginning {mixed}"),
            "present",
            hit.map_or("absent".into(), |i| format!("present as E{}", i + 1)),
            hit.is_some(),
        ));
    }
    report.result = json!({
        "function": sys.function.name(),
        "arity": names,
        "collected_by": cnames,
        "equations": eqs,
    });
    Ok(report)
}

// ---------------------------------------------------------------- algebra

fn algebra(cfg: &RunConfig) -> Result<(PointAlgebra, StructureTable), CliError> {
    let alg = derived_point_algebra(&cfg.jets())?;
    let table = structure_table(&alg.fields)?;
    Ok((alg, table))
}

fn basis_lines(report: &mut Report, alg: &PointAlgebra) -> Value {
    let mut out = Vec::new();
    for (k, f) in alg.fields.iter().enumerate() {
        report.line(format!("v{} = {f}", k + 1));
        out.push(f.to_string());
    }
    json!(out)
}

/// The commutator table as rows of cell strings, header included.
pub fn table_cells(table: &StructureTable) -> Vec<Vec<String>> {
    let n = table.dim();
    let mut rows = vec![std::iter::once("[ , ]".to_string())
        .chain((1..=n).map(|j| format!("v{j}")))
        .collect::<Vec<_>>()];
    for i in 0..n {
        let mut row = vec![format!("v{}", i + 1)];
        row.extend((0..n).map(|j| combination(table.bracket(i, j))));
        rows.push(row);
    }
    rows
}

fn grid(rows: &[Vec<String>]) -> Vec<String> {
    let width = rows.iter().flatten().map(|c| c.len()).max().unwrap_or(0) + 2;
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|c| format!("{c:<width$}"))
                .collect::<String>()
                .trim_end()
                .to_string()
        })
        .collect()
}

/// `table`: the commutator table of the derived point algebra.
pub fn table(cfg: &RunConfig) -> Result<Report, CliError> {
    let (alg, table) = algebra(cfg)?;
    let mut report = Report::new("table", cfg.echo());
    let basis = basis_lines(&mut report, &alg);
    report.line("");
    let cells = table_cells(&table);
    for l in grid(&cells) {
        report.line(l);
    }
    let published = jetlie::lie::spe_table();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let (d, c) = (table.bracket(i, j), published.bracket(i, j));
        report.claim(ClaimDiff::new(
            format!("[v{}, v{}]", i + 1, j + 1),
            combination(c),
            combination(d),
            d == c,
        ));
    }
    report.result = json!({
        "basis": basis,
        "weight": alg.weight.to_string(),
        "table": cells,
        "antisymmetric": table.is_antisymmetric(),
        "jacobi": table.satisfies_jacobi(),
    });
    Ok(report)
}

/// `(c1, c2, c3) -> (...)` for a coefficient matrix in `eps`.
pub fn map_string(m: &ExpMatrix) -> String {
    let rows: Vec<String> = m
        .iter()
        .map(|row| {
            let mut out = String::new();
            for (j, e) in row.iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                let text = e.to_string();
                let single = !text[1..].contains(" + ") && !text[1..].contains(" - ");
                let (neg, body) = match text.strip_prefix('-') {
                    Some(rest) if single => (true, rest.to_string()),
                    _ if single => (false, text.clone()),
                    _ => (false, format!("({text})")),
                };
                let c = format!("c{}", j + 1);
                let term = if body == "1" {
                    c
                } else {
                    format!("{body}*{c}")
                };
                match (out.is_empty(), neg) {
                    (true, true) => out.push('-'),
                    (true, false) => {}
                    (false, true) => out.push_str(" - "),
                    (false, false) => out.push_str(" + "),
                }
                out.push_str(&term);
            }
            if out.is_empty() {
                "0".into()
            } else {
                out
            }
        })
        .collect();
    format!("(c1, c2, c3) -> ({})", rows.join(", "))
}

fn is_identity(m: &ExpMatrix) -> bool {
    m.iter().enumerate().all(|(i, r)| {
        r.iter().enumerate().all(|(j, e)| {
            if i == j {
                *e == ExpPoly::one()
            } else {
                e.is_zero()
            }
        })
    })
}

/// `adjoint`: closed forms of `Ad(exp(eps v_i))` on coefficient vectors.
pub fn adjoint(cfg: &RunConfig) -> Result<Report, CliError> {
    let (alg, table) = algebra(cfg)?;
    let mut report = Report::new("adjoint", cfg.echo());
    let basis = basis_lines(&mut report, &alg);
    report.line("Ad(exp(eps v_i)) acting on c1 v1 + c2 v2 + c3 v3:");
    let published = published_adjoint_maps();
    let mut maps = Vec::new();
    for (i, claimed) in published.iter().enumerate() {
        let m = adjoint_exp(i, &table)?;
        let auto = is_automorphism(&m, &table);
        let ident = m.is_identity_at_zero();
        let inverse = is_identity(&m.inverse_product());
        let text = map_string(&m.matrix);
        report.line(format!("  F{}: {text}", i + 1));
        report.line(format!(
            "      automorphism: {auto}, identity at eps = 0: {ident}, F(eps) F(-eps) = 1: {inverse}"
        ));
        let sign = m.sign_matching(claimed);
        let derived = match sign {
            Some(1) => text.clone(),
            Some(_) => format!("{text} (equals the claimed form after eps -> -eps)"),
            None => text.clone(),
        };
        report.claim(ClaimDiff::new(
            format!("F{}", i + 1),
            map_string(claimed),
            derived,
            sign == Some(1),
        ));
        maps.push(json!({
            "generator": i + 1,
            "map": text,
            "automorphism": auto,
            "identity_at_zero": ident,
            "inverse_ok": inverse,
            "claimed_sign": sign,
        }));
    }
    report.result = json!({ "basis": basis, "maps": maps });
    Ok(report)
}

fn witness_lines(report: &mut Report, steps: &[WitnessStep]) {
    report.line("witness:");
    if steps.is_empty() {
        report.line("  (none, already a representative)");
    }
    for s in steps {
        report.line(format!("  {s}"));
    }
}

/// `normalize`: optimal-system representative of one element (3 numbers) or
/// of a two-dimensional subalgebra (6 numbers), with witness maps.
pub fn normalize(cfg: &RunConfig, numbers: &[String]) -> Result<Report, CliError> {
    let c: Vec<Rational> = numbers
        .iter()
        .map(|s| parse_rational(s))
        .collect::<Result<_, _>>()?;
    let (_, table) = algebra(cfg)?;
    let mut report = Report::new("normalize", cfg.echo());
    match c.len() {
        3 => {
            if c.iter().all(|x| x.is_zero()) {
                return Err(CliError::Input(
                    "the zero element has no representative".into(),
                ));
            }
            let n = normalize_1d(&c, &table)?;
            let image = apply_witness(&c, &n.steps, &table)?;
            let replay = image == n.representative.coefficients();
            report.line(format!("element: {}", combination(&c)));
            report.line(format!("representative: {}", n.representative));
            witness_lines(&mut report, &n.steps);
            report.line(format!("witness reproduces the representative: {replay}"));
            report.result = json!({
                "dimension": 1,
                "element": rationals_json(&c),
                "representative": n.representative,
                "representative_text": n.representative.to_string(),
                "steps": n.steps,
                "witness_reproduces": replay,
                "translation_stratum": n.translation_stratum,
                "fine_sign": n.fine_sign,
            });
            if !replay {
                report.exit_code = 1;
            }
        }
        6 => {
            let (h1, h2) = (&c[..3], &c[3..]);
            report.line(format!(
                "pair: span{{{}, {}}}",
                combination(h1),
                combination(h2)
            ));
            match normalize_2d(h1, h2, &table) {
                Ok(n) => {
                    let out = apply_witness_2d(h1, h2, &n, &table)?;
                    let replay = out == n.representative.pair();
                    report.line(format!("representative: {}", n.representative));
                    witness_lines(&mut report, &n.steps);
                    report.line(format!("witness reproduces the representative: {replay}"));
                    report.result = json!({
                        "dimension": 2,
                        "subalgebra": true,
                        "representative": n.representative,
                        "representative_text": n.representative.to_string(),
                        "normalized": n,
                        "witness_reproduces": replay,
                    });
                    if !replay {
                        report.exit_code = 1;
                    }
                }
                Err(LieError::NotSubalgebra { bracket }) => {
                    report.line(format!(
                        "not a subalgebra: the bracket {bracket} leaves the span"
                    ));
                    report.result = json!({
                        "dimension": 2,
                        "subalgebra": false,
                        "bracket": bracket,
                    });
                    report.exit_code = 1;
                }
                Err(e) => return Err(e.into()),
            }
        }
        n => {
            return Err(CliError::Input(format!(
                "normalize takes 3 or 6 numbers, got {n}"
            )))
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------- reduce

/// Parses `v1+2v2`, `v1 + A*v2`, `-1/2*v1+v3` into coefficients.
pub fn parse_combination(text: &str) -> Result<[Expr; 3], CliError> {
    let bad = |m: &str| CliError::Input(format!("cannot read {text:?} as a combination: {m}"));
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = [Expr::zero(), Expr::zero(), Expr::zero()];
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        if (ch == '+' || ch == '-') && i > 0 && !s[..i].ends_with(['*', '/', '(']) {
            terms.push(&s[start..i]);
            start = i;
        }
    }
    terms.push(&s[start..]);
    for term in terms {
        let pos = term.rfind('v').ok_or_else(|| bad("missing v1, v2 or v3"))?;
        let k: usize = term[pos + 1..]
            .parse()
            .ok()
            .filter(|k| (1..=3).contains(k))
            .ok_or_else(|| bad("generators are v1, v2, v3"))?;
        let coef = term[..pos].trim_end_matches('*');
        let coef = coef.strip_prefix('+').unwrap_or(coef);
        let c = match coef {
            "" => Expr::one(),
            "-" => Expr::int(-1),
            _ => parse_expr(coef)?,
        };
        if c.symbols().iter().any(|s| !s.is_param()) {
            return Err(bad("coefficients are numbers or the constants A, B"));
        }
        out[k - 1] = &out[k - 1] + &c;
    }
    Ok(out)
}

fn representative_of(
    c: &[Expr; 3],
    table: &StructureTable,
    weight: &Rational,
) -> Result<(ReductionRep, String, Value), CliError> {
    let rational: Option<Vec<Rational>> = c.iter().map(|e| e.as_rational()).collect();
    if let Some(r) = rational {
        if r.iter().all(|x| x.is_zero()) {
            return Err(CliError::Input("the zero element has no reduction".into()));
        }
        let n = normalize_1d(&r, table)?;
        let rep = match &n.representative {
            Representative1d::TranslationA { a } => {
                ReductionRep::TravelingA(Expr::rational(a.clone()))
            }
            Representative1d::TranslationB { b } => {
                ReductionRep::TravelingB(Expr::rational(b.clone()))
            }
            Representative1d::Scaling => {
                if !weight.is_integer() {
                    return Err(CliError::Unsupported(format!(
                        "scaling reduction needs an integer weight, got {weight}"
                    )));
                }
                let w: i32 = weight
                    .to_integer()
                    .try_into()
                    .map_err(|_| CliError::Unsupported("weight out of range".into()))?;
                ReductionRep::Scaling(w)
            }
        };
        let label = combination(&n.representative.coefficients());
        let witness = json!({
            "representative": label,
            "steps": n.steps,
        });
        return Ok((rep, label, witness));
    }
    // Symbolic coefficients: only the literal families are accepted.
    if c[2].is_zero() && c[0] == Expr::one() {
        let r = ReductionRep::TravelingA(c[1].clone());
        return Ok((r.clone(), r.to_string(), Value::Null));
    }
    if c[2].is_zero() && c[1] == Expr::one() {
        let r = ReductionRep::TravelingB(c[0].clone());
        return Ok((r.clone(), r.to_string(), Value::Null));
    }
    Err(CliError::Unsupported(
        "symbolic coefficients are supported only in v1 + A*v2 and B*v1 + v2".into(),
    ))
}

/// `reduce`: the ODE satisfied by invariant solutions of a representative.
pub fn reduce(cfg: &RunConfig, rep: &str) -> Result<Report, CliError> {
    let c = parse_combination(rep)?;
    let (alg, table) = algebra(cfg)?;
    let (r, label, witness) = representative_of(&c, &table, &alg.weight)?;
    let ode = reduce_equation(&cfg.equation(), &r)?;
    let mut report = Report::new("reduce", cfg.echo());
    report.line(format!("element: {rep}"));
    report.line(format!("representative: {label}"));
    report.line(format!("invariant: z = {}", ode.invariant));
    report.line(format!("ansatz: u = {}", ode.similarity));
    report.line(format!("reduced equation: {ode}"));
    report.line(format!("multiplier: {}", ode.multiplier));
    report.line(format!(
        "back-substitution residual: {}",
        ode.back_substitution
    ));
    report.result = json!({
        "representative": label,
        "normalization": witness,
        "invariant": ode.invariant.to_string(),
        "similarity": ode.similarity.to_string(),
        "lhs": ode.lhs.to_string(),
        "rhs": ode.rhs.to_string(),
        "ode": ode.to_string(),
        "multiplier": ode.multiplier.to_string(),
        "back_substitution": ode.back_substitution.to_string(),
    });
    if !ode.back_substitution.is_zero() {
        report.exit_code = 1;
    }
    Ok(report)
}

// ---------------------------------------------------------------- flow

fn parse_field(text: &str) -> Result<PointVectorField, CliError> {
    let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
    let parts = split_top(inner, ',');
    if parts.len() != 3 {
        return Err(CliError::Input(format!(
            "a field is three components xi, tau, eta, got {text:?}"
        )));
    }
    Ok(PointVectorField::new(
        parse_expr(&parts[0])?,
        parse_expr(&parts[1])?,
        parse_expr(&parts[2])?,
    ))
}

/// `flow`: one-parameter groups and the conformal factor of the equation.
pub fn flow_cmd(cfg: &RunConfig, field: Option<&str>) -> Result<Report, CliError> {
    let mut report = Report::new("flow", cfg.echo());
    let (fields, derived): (Vec<PointVectorField>, bool) = match field {
        Some(f) => (vec![parse_field(f)?], false),
        None => (derived_point_algebra(&cfg.jets())?.fields.to_vec(), true),
    };
    let eq = cfg.equation();
    let mut rows = Vec::new();
    let mut all_symmetric = true;
    for (k, v) in fields.iter().enumerate() {
        let g = flow(v)?;
        let name = if derived {
            format!("G{}", k + 1)
        } else {
            "G".to_string()
        };
        report.line(format!("{name}: generator {v}"));
        report.line(format!("  {g}"));
        let law = g.satisfies_group_law();
        let ident = g.is_identity_at_zero();
        report.line(format!("  group law: {law}, identity at eps = 0: {ident}"));
        let inv = match equation_invariance(&g, &eq) {
            Ok(i) => {
                report.line(format!(
                    "  equation invariant, factor lambda = {} (k = {})",
                    i.lambda, i.k
                ));
                json!({ "invariant": true, "lambda": i.lambda.to_string(), "k": i.k })
            }
            Err(GroupError::NotSymmetry { lambda, residual }) => {
                all_symmetric = false;
                report.line(format!(
                    "  not a symmetry: with lambda = {lambda} the pullback leaves {residual}"
                ));
                json!({ "invariant": false, "lambda": lambda, "residual": residual })
            }
            Err(GroupError::Unsupported(m)) => {
                all_symmetric = false;
                report.line(format!("  invariance not decided: {m}"));
                json!({ "invariant": Value::Null, "reason": m })
            }
            Err(e) => return Err(e.into()),
        };
        if derived {
            report.claim(ClaimDiff::new(
                name.clone(),
                CLAIMED_FLOWS[k],
                g.to_string(),
                g.to_string() == CLAIMED_FLOWS[k],
            ));
        }
        rows.push(json!({
            "name": name,
            "generator": v.to_string(),
            "map": g.to_string(),
            "group_law": law,
            "identity_at_zero": ident,
            "invariance": inv,
        }));
    }
    report.result = json!({ "flows": rows });
    report.exit_code = if all_symmetric { 0 } else { 1 };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use jetlie::expr::rat;

    #[test]
    fn combinations_print_compactly() {
        assert_eq!(combination(&[rat(1), rat(0), rat(0)]), "v1");
        assert_eq!(combination(&[rat(0), rat(-1), rat(0)]), "-v2");
        assert_eq!(combination(&[rat(2), rat(-1), rat(0)]), "2*v1 - v2");
        assert_eq!(combination(&[rat(0), rat(0), rat(0)]), "0");
    }

    #[test]
    fn combinations_parse() {
        let c = parse_combination("v1+2v2").unwrap();
        assert_eq!(c, [Expr::one(), Expr::int(2), Expr::zero()]);
        let c = parse_combination("-1/2*v1 - v3").unwrap();
        assert_eq!(c[0], parse("-1/2").unwrap());
        assert_eq!(c[2], Expr::int(-1));
        let c = parse_combination("B*v1 + v2").unwrap();
        assert_eq!(c[0], parse("B").unwrap());
        assert!(parse_combination("x*v1").is_err());
        assert!(parse_combination("v4").is_err());
    }

    #[test]
    fn leading_term_of_radical_expression() {
        let e = parse("u[1,0] + 2*x/sqrt(2*b*u[3,0]^2 + a)").unwrap();
        let l = leading_term(&e).unwrap();
        assert_eq!(l.term_count(), 1);
        assert!(leading_term(&Expr::zero()).is_none());
    }

    #[test]
    fn fields_split_at_top_level() {
        let f = parse_field("(1, 0, x*u)").unwrap();
        assert_eq!(
            f,
            PointVectorField::new(Expr::one(), Expr::zero(), parse("x*u").unwrap())
        );
        assert!(parse_field("1, 0").is_err());
    }
}
