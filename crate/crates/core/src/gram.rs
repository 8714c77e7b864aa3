//! Gram systems of permutation sets and the candidate pipeline.
//!
//! For permutations `P₁…P_m` with Gram matrix `M_ij = ⟨Pᵢ, Pⱼ⟩_F`, an Erdős
//! matrix supported on them with positive weights `x` must satisfy
//! `M x = ⟨M x, x⟩·1`. When the set is linearly independent `M` is positive
//! definite and the only solution with `Σxᵢ = 1` is `x = M⁻¹1 / ⟨1, M⁻¹1⟩`.
//! [`pipeline`] solves for it, assembles `A = Σ xᵢPᵢ` and confirms
//! `maxTr(A) = ‖A‖²_F` over all of `S_n`.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::assignment::{frob_sq, is_erdos, ErdosVerdict};
use crate::linalg::{
    affine_independent, linear_independent, solve_integer_ones, BistochasticMatrix, LinalgError,
    RationalMatrix,
};
use crate::perm::{conjugacy_class_reps, factorial, Permutation};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GramError {
    #[error("empty permutation set")]
    Empty,
    #[error("permutation {0} appears twice")]
    Duplicate(Permutation),
    #[error("permutations of different sizes")]
    MixedSizes,
    #[error("permutation set is not linearly independent")]
    Dependent,
    #[error("candidate weight {value} at position {index} is negative")]
    NegativeWeight { index: usize, value: Rational },
    #[error("internal consistency fault: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Independence {
    Linear,
    /// Affinely but not linearly independent. Permutation matrices all lie in
    /// the hyperplane "first row sums to 1", so this never occurs for them.
    AffineOnly,
    Dependent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramSystem {
    perms: Vec<Permutation>,
    gram: Vec<Vec<i64>>,
    independence: Independence,
}

impl GramSystem {
    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn independence(&self) -> Independence {
        self.independence
    }

    pub fn m(&self) -> usize {
        self.perms.len()
    }

    pub fn n(&self) -> usize {
        self.perms[0].len()
    }

    pub fn gram_matrix(&self) -> RationalMatrix {
        RationalMatrix::from_integers(&self.gram)
    }
}

pub fn build_gram(perms: &[Permutation]) -> Result<GramSystem, GramError> {
    let n = perms.first().ok_or(GramError::Empty)?.len();
    for (k, p) in perms.iter().enumerate() {
        if p.len() != n {
            return Err(GramError::MixedSizes);
        }
        if perms[..k].contains(p) {
            return Err(GramError::Duplicate(p.clone()));
        }
    }
    let gram = perms
        .iter()
        .map(|a| {
            perms
                .iter()
                .map(|b| a.agreement_count(b).expect("sizes checked") as i64)
                .collect()
        })
        .collect();
    let independence = match (linear_independent(perms), affine_independent(perms)) {
        (true, _) => Independence::Linear,
        (false, true) => Independence::AffineOnly,
        (false, false) => Independence::Dependent,
    };
    Ok(GramSystem { perms: perms.to_vec(), gram, independence })
}

/// Solution of `M x = c·1`, `Σxᵢ = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateSolution {
    pub x: Vec<Rational>,
    /// `c = ⟨M x, x⟩`; equals `‖Σ xᵢPᵢ‖²_F`.
    pub common_value: Rational,
    pub nonneg: bool,
}

pub fn solve_candidate(g: &GramSystem) -> Result<CandidateSolution, GramError> {
    if g.independence != Independence::Linear {
        return Err(GramError::Dependent);
    }
    let (_det, u) = solve_integer_ones(&g.gram).map_err(|e| match e {
        LinalgError::Singular => GramError::Dependent,
        other => GramError::Inconsistent(other.to_string()),
    })?;
    // x = M⁻¹1 / ⟨1, M⁻¹1⟩ = u / Σu, the determinant cancels.
    let total: num_bigint::BigInt = u.iter().sum();
    if total.is_zero() {
        return Err(GramError::Inconsistent("⟨1, M⁻¹1⟩ = 0 for a positive definite M".into()));
    }
    let x: Vec<Rational> = u.into_iter().map(|ui| Rational::new(ui, total.clone())).collect();
    let candidate = checked_candidate(g, x)?;
    Ok(candidate)
}

/// Recomputes `⟨Mx, x⟩` and checks it against every coordinate of `Mx`.
fn checked_candidate(g: &GramSystem, x: Vec<Rational>) -> Result<CandidateSolution, GramError> {
    let mx = g
        .gram_matrix()
        .mul_vec(&x)
        .map_err(|e| GramError::Inconsistent(e.to_string()))?;
    let common: Rational = mx.iter().zip(&x).map(|(a, b)| a * b).sum();
    if let Some(i) = mx.iter().position(|v| *v != common) {
        return Err(GramError::Inconsistent(format!(
            "(Mx)[{i}] = {} but ⟨Mx, x⟩ = {common}",
            mx[i]
        )));
    }
    let total: Rational = x.iter().sum();
    if !total.is_one() {
        return Err(GramError::Inconsistent(format!("weights sum to {total}")));
    }
    let nonneg = x.iter().all(|v| !v.is_negative());
    Ok(CandidateSolution { x, common_value: common, nonneg })
}

/// Solves the principal subsystem on `keep` and extends by zero. Returns the
/// extension only if it also solves the full system `M x = c·1`.
pub fn solve_extended(g: &GramSystem, keep: &[usize]) -> Result<Option<CandidateSolution>, GramError> {
    let sub: Vec<Permutation> = keep.iter().map(|&i| g.perms[i].clone()).collect();
    let sub_solution = solve_candidate(&build_gram(&sub)?)?;
    let mut x = vec![Rational::zero(); g.m()];
    for (&i, v) in keep.iter().zip(sub_solution.x) {
        x[i] = v;
    }
    match checked_candidate(g, x) {
        Ok(c) => Ok(Some(c)),
        Err(GramError::Inconsistent(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `A = Σ xᵢ·Pᵢ`.
pub fn assemble(g: &GramSystem, x: &CandidateSolution) -> Result<BistochasticMatrix, GramError> {
    if let Some((index, value)) = x.x.iter().enumerate().find(|(_, v)| v.is_negative()) {
        return Err(GramError::NegativeWeight { index, value: value.clone() });
    }
    BistochasticMatrix::convex_combination(x.x.iter().zip(&g.perms))
        .map_err(|e| GramError::Inconsistent(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    Dependent,
    NegativeWeight,
    MaxtrExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcceptedCandidate {
    pub matrix: BistochasticMatrix,
    pub solution: CandidateSolution,
    pub verdict: ErdosVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PipelineOutcome {
    Accepted(Box<AcceptedCandidate>),
    Rejected(RejectReason),
}

impl PipelineOutcome {
    pub fn accepted(&self) -> Option<&AcceptedCandidate> {
        match self {
            PipelineOutcome::Accepted(a) => Some(a),
            PipelineOutcome::Rejected(_) => None,
        }
    }
}

/// Gram system → candidate → assembled matrix → full maximal-trace check.
///
/// The last step is needed: the candidate only equalises `⟨A, Pᵢ⟩` over the
/// chosen `Pᵢ`, while `maxTr` ranges over all of `S_n`.
pub fn pipeline(perms: &[Permutation]) -> Result<PipelineOutcome, GramError> {
    let g = build_gram(perms)?;
    if g.independence != Independence::Linear {
        return Ok(PipelineOutcome::Rejected(RejectReason::Dependent));
    }
    let solution = solve_candidate(&g)?;
    if !solution.nonneg {
        return Ok(PipelineOutcome::Rejected(RejectReason::NegativeWeight));
    }
    let matrix = assemble(&g, &solution)?;
    let verdict = is_erdos(&matrix);
    if verdict.frob_sq != solution.common_value {
        return Err(GramError::Inconsistent(format!(
            "‖A‖² = {} but ⟨Mx, x⟩ = {}",
            verdict.frob_sq, solution.common_value
        )));
    }
    if !verdict.is_erdos {
        return Ok(PipelineOutcome::Rejected(RejectReason::MaxtrExceeded));
    }
    Ok(PipelineOutcome::Accepted(Box::new(AcceptedCandidate { matrix, solution, verdict })))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HalfIdentityMember {
    pub perm: Permutation,
    pub fixed_points: usize,
    pub matrix: BistochasticMatrix,
    pub frob_sq: Rational,
    pub is_erdos: bool,
}

/// `½(Iₙ + P)` for one `P` per conjugacy class, each verified Erdős with
/// `‖A‖²_F = (n + fixed points)/2`.
pub fn half_identity_family(n: usize) -> Vec<HalfIdentityMember> {
    let half = Rational::new(1, 2);
    let id = Permutation::identity(n);
    conjugacy_class_reps(n)
        .expect("n >= 1")
        .into_iter()
        .map(|p| {
            let matrix = BistochasticMatrix::convex_combination([(&half, &id), (&half, &p)])
                .expect("average of two permutation matrices");
            let verdict = is_erdos(&matrix);
            HalfIdentityMember {
                fixed_points: p.fixed_points(),
                frob_sq: frob_sq(&matrix),
                is_erdos: verdict.is_erdos,
                matrix,
                perm: p,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountBound {
    /// `Σ_{j=1}^{(n−1)²+1} C(n!, j)`: all Erdős matrices.
    #[serde(serialize_with = "as_decimal")]
    pub total: BigUint,
    /// `Σ_{j=0}^{(n−1)²} C(n!−1, j)`: Erdős matrices up to equivalence.
    #[serde(serialize_with = "as_decimal")]
    pub equivalence: BigUint,
}

pub fn count_bound(n: usize) -> CountBound {
    assert!(n >= 2, "bounds are stated for n >= 2");
    let nf = factorial(n) as u64;
    let top = ((n - 1) * (n - 1)) as u64;
    CountBound {
        total: binomial_sum(nf, 1, top + 1),
        equivalence: binomial_sum(nf - 1, 0, top),
    }
}

fn as_decimal<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn binomial_sum(n: u64, from: u64, to: u64) -> BigUint {
    let mut sum = BigUint::zero();
    let mut c = BigUint::one(); // C(n, 0)
    for j in 0..=to.min(n) {
        if j >= from {
            sum += &c;
        }
        c = c * (n - j) / (j + 1);
    }
    sum
}
