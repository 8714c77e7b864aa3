use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;
use std::time::Duration;

use erdos::assignment::{is_erdos_with, max_delta_matrix, MaxTraceMethod};
use erdos::birkhoff::{decompose as birkhoff, reduce_affine, reduce_linear, ConvexDecomposition};
use erdos::canonical::canonical_form;
use erdos::enumerate::{enumerate_erdos, Counters, EnumerationConfig, EnumerationError};
use erdos::gram::{count_bound, half_identity_family};
use erdos::linalg::{affine_independent, linear_independent};
use erdos::surd::{omega2 as omega2_values, omega2_classes, Surd};
use erdos::textfmt::parse_bistochastic;
use erdos::{BistochasticMatrix, Permutation, Rational};
use serde::Serialize;

use crate::output::{json, spaced, Format, Table};
use crate::{exit, Ctx, Failure, Method, Reduce};

type Outcome = Result<(String, u8), Failure>;

const WITNESS_CAP: usize = 100;

fn read_matrix(path: &Path) -> Result<BistochasticMatrix, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::input(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?
    };
    parse_bistochastic(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn emit<P: Serialize>(ctx: &Ctx, command: &str, n: usize, payload: P, table: impl FnOnce(&P, &mut Table)) -> String {
    match ctx.format {
        Format::Json => json(command, n, payload),
        Format::Table => {
            let mut t = Table::new(ctx.approx);
            t.meta("command", command).meta("n", n);
            table(&payload, &mut t);
            t.finish()
        }
    }
}

#[derive(Serialize)]
struct Approx {
    frob_sq: f64,
    maxtr: f64,
    delta: f64,
}

#[derive(Serialize)]
struct VerifyPayload {
    matrix: BistochasticMatrix,
    is_erdos: bool,
    frob_sq: Rational,
    maxtr: Rational,
    delta: Rational,
    method: &'static str,
    witnesses: Vec<Permutation>,
    witness_count: usize,
    witnesses_complete: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    approx: Option<Approx>,
}

pub fn verify(ctx: &Ctx, file: &Path, method: Method) -> Outcome {
    let a = read_matrix(file)?;
    let (m, label) = match method {
        Method::Auto => (MaxTraceMethod::Auto, "auto"),
        Method::Brute => (MaxTraceMethod::Brute, "brute"),
        Method::Hungarian => (MaxTraceMethod::Hungarian, "hungarian"),
    };
    let v = is_erdos_with(&a, m).map_err(Failure::usage)?;
    let cert = v.certificate;
    let witness_count = cert.witnesses.len();
    let payload = VerifyPayload {
        approx: ctx.approx.then(|| Approx {
            frob_sq: v.frob_sq.to_f64(),
            maxtr: cert.value.to_f64(),
            delta: v.delta.to_f64(),
        }),
        matrix: a,
        is_erdos: v.is_erdos,
        frob_sq: v.frob_sq,
        maxtr: cert.value,
        delta: v.delta,
        method: label,
        witnesses: cert.witnesses.into_iter().take(WITNESS_CAP).collect(),
        witness_count,
        witnesses_complete: cert.complete_witnesses,
    };
    let code = if payload.is_erdos { exit::OK } else { exit::VERDICT_FALSE };
    let text = emit(ctx, "verify", payload.matrix.n(), payload, |p, t| {
        t.matrix(&p.matrix)
            .value("frob_sq", &p.frob_sq)
            .value("maxtr", &p.maxtr)
            .value("delta", &p.delta);
        t.meta("witness_count", p.witness_count);
        if !p.witnesses_complete {
            t.meta("witness_note", format!("the {} method reports a single optimum", p.method));
        } else if p.witnesses.len() < p.witness_count {
            t.meta("witness_note", format!("first {} shown", p.witnesses.len()));
        }
        t.meta("witnesses", spaced(&p.witnesses))
            .meta("verdict", if p.is_erdos { "erdos" } else { "not erdos" });
    });
    Ok((text, code))
}

#[derive(Serialize)]
struct ClassEntry<'a> {
    matrix: &'a BistochasticMatrix,
    support: &'a [Permutation],
    weights: &'a [Rational],
    value: &'a Rational,
    frob_sq: &'a Rational,
    sources: u64,
}

#[derive(Serialize)]
struct EnumeratePayload<'a> {
    max_support: usize,
    complete: bool,
    class_count: usize,
    classes: Vec<ClassEntry<'a>>,
    counters: &'a Counters,
    elapsed_ms: u128,
    workers: usize,
    frontier: &'a [Vec<Permutation>],
    #[serde(skip_serializing_if = "Option::is_none")]
    orbit_counts: Option<&'a BTreeMap<usize, usize>>,
}

pub fn enumerate(
    ctx: &Ctx,
    n: usize,
    max_support: Option<usize>,
    budget: Option<Duration>,
    workers: Option<usize>,
    prefilter: bool,
) -> Outcome {
    let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |w| w.get()));
    let config = EnumerationConfig { max_support, budget, workers, prefilter, ..EnumerationConfig::new(n) };
    let report = enumerate_erdos(&config).map_err(|e| match e {
        EnumerationError::NOutOfRange(_)
        | EnumerationError::InvalidMaxSupport { .. }
        | EnumerationError::NoWorkers => Failure::usage(e),
        other => Failure::input(other),
    })?;
    let payload = EnumeratePayload {
        max_support: report.max_support,
        complete: report.complete,
        class_count: report.classes.len(),
        classes: report
            .classes
            .iter()
            .map(|c| ClassEntry {
                matrix: &c.canonical,
                support: &c.support,
                weights: &c.weights,
                value: &c.common_value,
                frob_sq: &c.frob_sq,
                sources: c.sources,
            })
            .collect(),
        counters: &report.counters,
        elapsed_ms: report.elapsed.as_millis(),
        workers,
        frontier: &report.frontier,
        orbit_counts: report.orbit_counts.as_ref(),
    };
    let code = if report.complete { exit::OK } else { exit::TRUNCATED };
    let text = emit(ctx, "enumerate", n, payload, |p, t| {
        let c = p.counters;
        t.meta("max_support", p.max_support)
            .meta("complete", p.complete)
            .meta("classes", p.class_count)
            .meta("sets_visited", c.sets_visited)
            .meta("rejected_dependent", c.rejected_dependent)
            .meta("rejected_negative", c.rejected_negative)
            .meta("rejected_maxtr", c.rejected_maxtr);
        if c.skipped_equivalent > 0 {
            t.meta("skipped_equivalent", c.skipped_equivalent);
        }
        if let Some(orbits) = p.orbit_counts {
            let parts = orbits.iter().map(|(m, k)| format!("{m}:{k}"));
            t.meta("family_orbits", spaced(parts));
        }
        t.meta("elapsed_ms", p.elapsed_ms);
        if !p.frontier.is_empty() {
            let roots = p.frontier.iter().map(|r| format!("{{{}}}", r.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",")));
            t.meta("unexplored", spaced(roots));
        }
        for (i, class) in p.classes.iter().enumerate() {
            t.blank()
                .meta("class", format!("{} of {}", i + 1, p.class_count))
                .value("value", class.value)
                .meta("support", spaced(class.support))
                .meta("weights", spaced(class.weights))
                .meta("sources", class.sources)
                .matrix(class.matrix);
        }
    });
    Ok((text, code))
}

#[derive(Serialize)]
struct DecomposePayload {
    matrix: BistochasticMatrix,
    reduce: &'static str,
    term_count: usize,
    terms: ConvexDecomposition,
    affinely_independent: bool,
    linearly_independent: bool,
}

#[derive(Serialize)]
struct DecomposeFailure {
    matrix: BistochasticMatrix,
    reduce: &'static str,
    outcome: String,
}

pub fn decompose(ctx: &Ctx, file: &Path, reduce: Reduce) -> Outcome {
    let a = read_matrix(file)?;
    let n = a.n();
    let raw = birkhoff(&a);
    let (label, reduced) = match reduce {
        Reduce::None => ("none", Ok(raw)),
        Reduce::Affine => ("affine", Ok(reduce_affine(&raw))),
        Reduce::Linear => ("linear", reduce_linear(&raw)),
    };
    let d = match reduced {
        Ok(d) => d,
        Err(e) => {
            let payload = DecomposeFailure { matrix: a, reduce: label, outcome: e.to_string() };
            let text = emit(ctx, "decompose", n, payload, |p, t| {
                t.matrix(&p.matrix).meta("reduce", p.reduce).meta("outcome", &p.outcome);
            });
            return Ok((text, exit::VERDICT_FALSE));
        }
    };
    if d.reconstruct() != a {
        return Err(Failure::input("internal error: decomposition does not reconstruct the input"));
    }
    let support = d.support();
    let payload = DecomposePayload {
        term_count: d.len(),
        affinely_independent: affine_independent(&support),
        linearly_independent: linear_independent(&support),
        terms: d,
        matrix: a,
        reduce: label,
    };
    let text = emit(ctx, "decompose", n, payload, |p, t| {
        t.matrix(&p.matrix)
            .meta("reduce", p.reduce)
            .meta("terms", p.term_count)
            .meta("affinely_independent", p.affinely_independent)
            .meta("linearly_independent", p.linearly_independent);
        for term in p.terms.terms() {
            t.meta("term", format!("{} {}", term.coef, term.perm));
        }
    });
    Ok((text, exit::OK))
}

#[derive(Serialize)]
struct CanonPayload {
    matrix: BistochasticMatrix,
    canonical: BistochasticMatrix,
}

pub fn canon(ctx: &Ctx, file: &Path) -> Outcome {
    let a = read_matrix(file)?;
    let canonical = canonical_form(&a).map_err(Failure::input)?;
    let n = a.n();
    let text = emit(ctx, "canon", n, CanonPayload { matrix: a, canonical }, |p, t| {
        t.matrix(&p.canonical);
    });
    Ok((text, exit::OK))
}

#[derive(Serialize)]
struct FamilyEntry {
    perm: Permutation,
    cycle_type: String,
    fixed_points: usize,
    matrix: BistochasticMatrix,
    frob_sq: Rational,
    is_erdos: bool,
}

#[derive(Serialize)]
struct FamilyPayload {
    count: usize,
    members: Vec<FamilyEntry>,
}

pub fn family(ctx: &Ctx, n: usize) -> Outcome {
    if !(1..=8).contains(&n) {
        return Err(Failure::usage(format!("family needs 1 <= n <= 8, got {n}")));
    }
    let members: Vec<FamilyEntry> = half_identity_family(n)
        .into_iter()
        .map(|m| FamilyEntry {
            cycle_type: m.perm.cycle_type().to_string(),
            perm: m.perm,
            fixed_points: m.fixed_points,
            matrix: m.matrix,
            frob_sq: m.frob_sq,
            is_erdos: m.is_erdos,
        })
        .collect();
    let all = members.iter().all(|m| m.is_erdos);
    let payload = FamilyPayload { count: members.len(), members };
    let text = emit(ctx, "family", n, payload, |p, t| {
        t.meta("count", p.count);
        for m in &p.members {
            t.blank()
                .meta("perm", &m.perm)
                .meta("cycle_type", &m.cycle_type)
                .meta("fixed_points", m.fixed_points)
                .value("frob_sq", &m.frob_sq)
                .meta("verdict", if m.is_erdos { "erdos" } else { "not erdos" })
                .matrix(&m.matrix);
        }
    });
    Ok((text, if all { exit::OK } else { exit::VERDICT_FALSE }))
}

pub fn bound(ctx: &Ctx, n: usize) -> Outcome {
    if !(2..=12).contains(&n) {
        return Err(Failure::usage(format!("bound needs 2 <= n <= 12, got {n}")));
    }
    let b = count_bound(n);
    let text = emit(ctx, "bound", n, &b, |p, t| {
        t.meta("total", &p.total).meta("equivalence", &p.equivalence);
    });
    Ok((text, exit::OK))
}

#[derive(Serialize)]
struct Omega2Payload {
    alpha: Rational,
    values: Vec<Surd>,
    classes: Vec<Surd>,
    class_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    approx: Option<Vec<f64>>,
}

pub fn omega2(ctx: &Ctx, alpha: &str) -> Outcome {
    let alpha: Rational = alpha.parse().map_err(|e| Failure::usage(format!("alpha: {e}")))?;
    let values = omega2_values(&alpha).map_err(Failure::usage)?;
    let classes = omega2_classes(&alpha).map_err(Failure::usage)?;
    let payload = Omega2Payload {
        approx: ctx.approx.then(|| values.iter().map(Surd::to_f64).collect()),
        alpha,
        class_count: classes.len(),
        values,
        classes,
    };
    let text = emit(ctx, "omega2", 2, payload, |p, t| {
        t.value("alpha", &p.alpha).meta("classes", p.class_count);
        for (i, v) in p.values.iter().enumerate() {
            match &p.approx {
                Some(a) => t.meta("p", format!("{v}  (~{})", a[i])),
                None => t.meta("p", v),
            };
        }
    });
    Ok((text, exit::OK))
}

#[derive(Serialize)]
struct MaxDeltaPayload {
    matrix: BistochasticMatrix,
    delta: Rational,
    bound: Rational,
}

pub fn maxdelta(ctx: &Ctx, n: usize) -> Outcome {
    if !(1..=12).contains(&n) {
        return Err(Failure::usage(format!("maxdelta needs 1 <= n <= 12, got {n}")));
    }
    let matrix = max_delta_matrix(n);
    let delta = erdos::assignment::delta(&matrix);
    let bound = Rational::new(n as i64 - 1, 4);
    let code = if delta == bound { exit::OK } else { exit::VERDICT_FALSE };
    let text = emit(ctx, "maxdelta", n, MaxDeltaPayload { matrix, delta, bound }, |p, t| {
        t.matrix(&p.matrix).value("delta", &p.delta).value("bound", &p.bound);
    });
    Ok((text, code))
}
