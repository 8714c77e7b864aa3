//! Exhaustive search for Erdős matrices up to `PAQ`-equivalence.
//!
//! Every Erdős class has a representative whose support contains the identity
//! and is linearly independent, and such a support determines the matrix.
//! The search walks those supports depth-first in rank order, carrying an
//! incremental echelon basis so each extension costs one elimination pass.
//!
//! Each node is screened in exact integer arithmetic: with `M y = 1` solved as
//! `y = u / d`, the weights are nonnegative iff `u ≥ 0`, and the candidate is
//! Erdős iff `Σ uᵢ·⟨Pᵢ, P_σ⟩ ≤ d` for every `σ`. Survivors go through the
//! rational [`pipeline`] and are deduplicated by [`canonical_form`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::canonical::{canonical_form, set_canonical_key, CanonError, SetKey};
use crate::gram::{pipeline, GramError, PipelineOutcome};
use crate::linalg::{perm_vector, try_bareiss_solve, BistochasticMatrix, IncrementalBasis};
use crate::perm::{enumerate_sn, Permutation};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("n must be between 2 and 6, got {0}")]
    NOutOfRange(usize),
    #[error("max support must be between 1 and {limit}, got {given}")]
    InvalidMaxSupport { given: usize, limit: usize },
    #[error("worker count must be positive")]
    NoWorkers,
    #[error("could not start worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Canon(#[from] CanonError),
    #[error(transparent)]
    Gram(#[from] GramError),
}

#[derive(Debug, Clone)]
pub struct EnumerationConfig {
    pub n: usize,
    /// Largest support size explored; `None` means `(n−1)²+1`.
    pub max_support: Option<usize>,
    pub budget: Option<Duration>,
    pub workers: usize,
    /// Skip the pipeline on families equivalent to one already seen in the
    /// same shard, and count family orbits per size.
    pub prefilter: bool,
    /// Screen nodes with the integer test before the rational pipeline.
    pub fast_path: bool,
}

impl EnumerationConfig {
    pub fn new(n: usize) -> Self {
        EnumerationConfig { n, max_support: None, budget: None, workers: 1, prefilter: false, fast_path: true }
    }
}

pub fn carath_bound(n: usize) -> usize {
    (n - 1) * (n - 1) + 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErdosClass {
    pub canonical: BistochasticMatrix,
    /// Minimal support found, by size and then rank order. It starts with the
    /// identity, so `Σ weightsᵢ·supportᵢ` is a member of the class that is
    /// equivalent to `canonical` but usually not equal to it.
    pub support: Vec<Permutation>,
    pub weights: Vec<Rational>,
    pub common_value: Rational,
    pub frob_sq: Rational,
    /// Distinct supports whose candidate landed in this class.
    pub sources: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Counters {
    pub sets_visited: u64,
    pub rejected_dependent: u64,
    pub rejected_negative: u64,
    pub rejected_maxtr: u64,
    /// Nodes skipped by the prefilter.
    pub skipped_equivalent: u64,
}

impl Counters {
    fn absorb(&mut self, o: &Counters) {
        self.sets_visited += o.sets_visited;
        self.rejected_dependent += o.rejected_dependent;
        self.rejected_negative += o.rejected_negative;
        self.rejected_maxtr += o.rejected_maxtr;
        self.skipped_equivalent += o.skipped_equivalent;
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnumerationReport {
    pub n: usize,
    pub max_support: usize,
    /// Sorted by canonical form.
    pub classes: Vec<ErdosClass>,
    pub counters: Counters,
    pub elapsed: Duration,
    pub complete: bool,
    /// Roots of shards that were not fully explored.
    pub frontier: Vec<Vec<Permutation>>,
    /// Family orbits per support size among visited nodes (prefilter only).
    pub orbit_counts: Option<BTreeMap<usize, usize>>,
}

pub fn enumerate_erdos(config: &EnumerationConfig) -> Result<EnumerationReport, EnumerationError> {
    let n = config.n;
    if !(2..=6).contains(&n) {
        return Err(EnumerationError::NOutOfRange(n));
    }
    let limit = carath_bound(n);
    let max_support = config.max_support.unwrap_or(limit);
    if !(1..=limit).contains(&max_support) {
        return Err(EnumerationError::InvalidMaxSupport { given: max_support, limit });
    }
    if config.workers == 0 {
        return Err(EnumerationError::NoWorkers);
    }
    let start = Instant::now();
    let search = Search::new(n, max_support, config, start);

    // Levels 0 and 1 run here; each independent level-2 node is a shard.
    let mut head = Partial::default();
    let mut basis = IncrementalBasis::<i128>::new(n * n);
    basis.push(&search.vecs[0]);
    let mut stack = vec![0usize];
    let mut shards: Vec<Vec<usize>> = Vec::new();
    search.evaluate(&stack, &mut head)?;
    head.counters.sets_visited += 1;
    if max_support >= 2 {
        for j in 1..search.perms.len() {
            if !basis.push(&search.vecs[j]) {
                head.counters.rejected_dependent += 1;
                continue;
            }
            stack.push(j);
            head.counters.sets_visited += 1;
            search.evaluate(&stack, &mut head)?;
            if max_support >= 3 {
                for k in j + 1..search.perms.len() {
                    if basis.is_independent_of(&search.vecs[k]) {
                        shards.push(vec![0, j, k]);
                    } else {
                        head.counters.rejected_dependent += 1;
                    }
                }
            }
            stack.pop();
            basis.truncate(1);
        }
    }
    log::info!("n={n}: {} shards across {} workers", shards.len(), config.workers);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| EnumerationError::Pool(e.to_string()))?;
    let results: Vec<Result<Partial, EnumerationError>> =
        pool.install(|| shards.par_iter().map(|root| search.run_shard(root)).collect());

    let mut total = head;
    for r in results {
        total.absorb(r?);
    }
    let mut classes: Vec<ErdosClass> = total.classes.into_values().collect();
    classes.sort_by(|a, b| a.canonical.as_matrix().entries().cmp(b.canonical.as_matrix().entries()));
    let frontier: Vec<Vec<Permutation>> = total
        .frontier
        .iter()
        .map(|root| root.iter().map(|&i| search.perms[i].clone()).collect())
        .collect();
    let orbit_counts = config
        .prefilter
        .then(|| total.orbits.iter().map(|(&m, keys)| (m, keys.len())).collect());
    let report = EnumerationReport {
        n,
        max_support,
        classes,
        counters: total.counters,
        elapsed: start.elapsed(),
        complete: frontier.is_empty(),
        frontier,
        orbit_counts,
    };
    log::info!(
        "n={n}: {} classes, {} sets visited in {:?}{}",
        report.classes.len(),
        report.counters.sets_visited,
        report.elapsed,
        if report.complete { "" } else { " (truncated)" }
    );
    Ok(report)
}

#[derive(Default)]
struct Partial {
    classes: BTreeMap<Vec<Rational>, ErdosClass>,
    counters: Counters,
    frontier: Vec<Vec<usize>>,
    orbits: BTreeMap<usize, BTreeSet<SetKey>>,
    /// Integer form of already-classified matrices → class key.
    seen_matrices: HashMap<Vec<i128>, Vec<Rational>>,
}

impl Partial {
    fn absorb(&mut self, other: Partial) {
        self.counters.absorb(&other.counters);
        self.frontier.extend(other.frontier);
        for (m, keys) in other.orbits {
            self.orbits.entry(m).or_default().extend(keys);
        }
        for (key, class) in other.classes {
            merge_class(&mut self.classes, key, class);
        }
    }
}

fn support_key(c: &ErdosClass) -> (usize, Vec<usize>) {
    (c.support.len(), c.support.iter().map(Permutation::rank).collect())
}

fn merge_class(into: &mut BTreeMap<Vec<Rational>, ErdosClass>, key: Vec<Rational>, class: ErdosClass) {
    match into.get_mut(&key) {
        None => {
            into.insert(key, class);
        }
        Some(existing) => {
            let sources = existing.sources + class.sources;
            if support_key(&class) < support_key(existing) {
                *existing = class;
            }
            existing.sources = sources;
        }
    }
}

struct Search {
    n: usize,
    max_support: usize,
    perms: Vec<Permutation>,
    vecs: Vec<Vec<i128>>,
    /// `agree[i * n! + j] = ⟨Pᵢ, Pⱼ⟩`.
    agree: Vec<u8>,
    deadline: Option<Instant>,
    prefilter: bool,
    fast_path: bool,
}

impl Search {
    fn new(n: usize, max_support: usize, config: &EnumerationConfig, start: Instant) -> Self {
        let perms = enumerate_sn(n).expect("n <= 6");
        let vecs = perms.iter().map(|p| perm_vector(p, false)).collect();
        let agree = perms
            .iter()
            .flat_map(|a| perms.iter().map(move |b| a.agreement_count(b).expect("same n") as u8))
            .collect();
        Search {
            n,
            max_support,
            perms,
            vecs,
            agree,
            deadline: config.budget.map(|b| start + b),
            prefilter: config.prefilter,
            fast_path: config.fast_path,
        }
    }

    fn out_of_time(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn run_shard(&self, root: &[usize]) -> Result<Partial, EnumerationError> {
        let mut out = Partial::default();
        let mut basis = IncrementalBasis::<i128>::new(self.n * self.n);
        for &i in root {
            basis.push(&self.vecs[i]);
        }
        let mut stack = root.to_vec();
        if !self.visit(&mut stack, &mut basis, &mut out)? {
            out.frontier.push(root.to_vec());
        }
        Ok(out)
    }

    /// Returns `false` if the deadline cut the subtree short.
    fn visit(
        &self,
        stack: &mut Vec<usize>,
        basis: &mut IncrementalBasis<i128>,
        out: &mut Partial,
    ) -> Result<bool, EnumerationError> {
        if self.out_of_time() {
            return Ok(false);
        }
        out.counters.sets_visited += 1;
        self.evaluate(stack, out)?;
        if stack.len() >= self.max_support {
            return Ok(true);
        }
        let rank = basis.rank();
        for j in stack[stack.len() - 1] + 1..self.perms.len() {
            if !basis.push(&self.vecs[j]) {
                out.counters.rejected_dependent += 1;
                continue;
            }
            stack.push(j);
            let finished = self.visit(stack, basis, out)?;
            stack.pop();
            basis.truncate(rank);
            if !finished {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn evaluate(&self, stack: &[usize], out: &mut Partial) -> Result<(), EnumerationError> {
        let family: Vec<Permutation> = stack.iter().map(|&i| self.perms[i].clone()).collect();
        if self.prefilter {
            let key = set_canonical_key(&family)?;
            if !out.orbits.entry(stack.len()).or_default().insert(key) {
                out.counters.skipped_equivalent += 1;
                return Ok(());
            }
        }
        let mut matrix_key = None;
        if self.fast_path {
            match self.screen(stack) {
                Screen::Negative => {
                    out.counters.rejected_negative += 1;
                    return Ok(());
                }
                Screen::Maxtr => {
                    out.counters.rejected_maxtr += 1;
                    return Ok(());
                }
                Screen::Survivor(u) => {
                    let key = self.integer_matrix(stack, &u);
                    if let Some(class_key) = out.seen_matrices.get(&key) {
                        let class = out.classes.get_mut(class_key).expect("cached class exists");
                        self.record_repeat(class, stack, &u);
                        return Ok(());
                    }
                    matrix_key = Some(key);
                }
                Screen::Overflow => {}
            }
        }
        match pipeline(&family)? {
            PipelineOutcome::Accepted(acc) => {
                let canonical = canonical_form(&acc.matrix)?;
                let (support, weights): (Vec<_>, Vec<_>) = family
                    .into_iter()
                    .zip(acc.solution.x)
                    .filter(|(_, w)| !w.is_zero())
                    .unzip();
                let class = ErdosClass {
                    canonical: canonical.clone(),
                    support,
                    weights,
                    common_value: acc.solution.common_value,
                    frob_sq: acc.verdict.frob_sq,
                    sources: 1,
                };
                let class_key = canonical.into_matrix().entries().to_vec();
                if let Some(k) = matrix_key {
                    out.seen_matrices.insert(k, class_key.clone());
                }
                merge_class(&mut out.classes, class_key, class);
            }
            PipelineOutcome::Rejected(reason) => {
                assert!(
                    !self.fast_path,
                    "integer screen passed {stack:?} but the rational pipeline rejected it ({reason:?})"
                );
                use crate::gram::RejectReason::*;
                match reason {
                    Dependent => out.counters.rejected_dependent += 1,
                    NegativeWeight => out.counters.rejected_negative += 1,
                    MaxtrExceeded => out.counters.rejected_maxtr += 1,
                }
            }
        }
        Ok(())
    }

    fn screen(&self, stack: &[usize]) -> Screen {
        let nf = self.perms.len();
        let m = stack.len();
        let mut rows: Vec<Vec<i128>> = stack
            .iter()
            .map(|&a| {
                stack
                    .iter()
                    .map(|&b| self.agree[a * nf + b] as i128)
                    .chain([1])
                    .collect()
            })
            .collect();
        let Some(solved) = try_bareiss_solve(&mut rows, m) else {
            return Screen::Overflow;
        };
        let (mut d, x) = solved.expect("independent supports have a positive definite Gram matrix");
        let mut u: Vec<i128> = x.into_iter().map(|r| r[0]).collect();
        if d < 0 {
            d = -d;
            u.iter_mut().for_each(|v| *v = -*v);
        }
        if u.iter().any(|&v| v < 0) {
            return Screen::Negative;
        }
        for sigma in 0..nf {
            let s: i128 = stack.iter().zip(&u).map(|(&a, &ua)| ua * self.agree[a * nf + sigma] as i128).sum();
            if s > d {
                return Screen::Maxtr;
            }
        }
        Screen::Survivor(u)
    }

    /// `Σ uₖ·Pₖ` with the common factor removed; equal keys mean equal matrices.
    fn integer_matrix(&self, stack: &[usize], u: &[i128]) -> Vec<i128> {
        let n = self.n;
        let mut e = vec![0i128; n * n];
        for (&k, &uk) in stack.iter().zip(u) {
            for (i, &j) in self.perms[k].images().iter().enumerate() {
                e[i * n + j] += uk;
            }
        }
        let g = e.iter().fold(0i128, |g, &v| gcd(g, v));
        e.iter_mut().for_each(|v| *v /= g);
        e
    }

    fn record_repeat(&self, class: &mut ErdosClass, stack: &[usize], u: &[i128]) {
        class.sources += 1;
        let (support, kept): (Vec<Permutation>, Vec<i128>) = stack
            .iter()
            .zip(u)
            .filter(|(_, &w)| w != 0)
            .map(|(&k, &w)| (self.perms[k].clone(), w))
            .unzip();
        let key = (support.len(), support.iter().map(Permutation::rank).collect::<Vec<_>>());
        if key < support_key(class) {
            let total: i128 = kept.iter().sum();
            class.weights = kept.iter().map(|&w| Rational::new(w, total)).collect();
            class.support = support;
        }
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

enum Screen {
    Negative,
    Maxtr,
    Survivor(Vec<i128>),
    Overflow,
}
