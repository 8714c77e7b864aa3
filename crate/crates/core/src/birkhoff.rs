//! Birkhoff–von Neumann decompositions and support reduction.
//!
//! [`decompose`] runs the greedy Birkhoff loop. [`reduce_affine`] shrinks a
//! decomposition along affine dependencies until its support is affinely
//! independent (so at most `(n−1)²+1` terms remain). [`reduce_linear`] then
//! guarantees a linearly independent support with re-solved weights.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    kernel_vector, linear_independent, BistochasticError, BistochasticMatrix, RationalMatrix,
};
use crate::perm::Permutation;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BirkhoffError {
    #[error("decomposition has no terms")]
    Empty,
    #[error("coefficient {coef} of {perm} is not positive")]
    NonPositive { coef: Rational, perm: Permutation },
    #[error("coefficients sum to {0}, not 1")]
    BadSum(Rational),
    #[error("permutation {0} appears twice")]
    Duplicate(Permutation),
    #[error("permutations of different sizes")]
    MixedSizes,
    #[error("no linearly independent sub-support reconstructs the matrix with nonnegative weights")]
    NoLinearSupport,
    #[error("{0}")]
    NotBistochastic(#[from] BistochasticError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub coef: Rational,
    pub perm: Permutation,
}

/// `A = Σ coefᵢ·P_{permᵢ}` with positive coefficients summing to one and
/// distinct permutations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ConvexDecomposition {
    terms: Vec<Term>,
}

impl ConvexDecomposition {
    pub fn new(terms: Vec<Term>) -> Result<Self, BirkhoffError> {
        let first = terms.first().ok_or(BirkhoffError::Empty)?;
        let n = first.perm.len();
        let mut sum = Rational::zero();
        for (k, t) in terms.iter().enumerate() {
            if t.perm.len() != n {
                return Err(BirkhoffError::MixedSizes);
            }
            if !t.coef.is_positive() {
                return Err(BirkhoffError::NonPositive { coef: t.coef.clone(), perm: t.perm.clone() });
            }
            if terms[..k].iter().any(|o| o.perm == t.perm) {
                return Err(BirkhoffError::Duplicate(t.perm.clone()));
            }
            sum += &t.coef;
        }
        if !sum.is_one() {
            return Err(BirkhoffError::BadSum(sum));
        }
        Ok(ConvexDecomposition { terms })
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Rational, Permutation)>) -> Result<Self, BirkhoffError> {
        Self::new(pairs.into_iter().map(|(coef, perm)| Term { coef, perm }).collect())
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n(&self) -> usize {
        self.terms[0].perm.len()
    }

    pub fn support(&self) -> Vec<Permutation> {
        self.terms.iter().map(|t| t.perm.clone()).collect()
    }

    pub fn weights(&self) -> Vec<Rational> {
        self.terms.iter().map(|t| t.coef.clone()).collect()
    }

    pub fn reconstruct(&self) -> BistochasticMatrix {
        BistochasticMatrix::convex_combination(self.terms.iter().map(|t| (&t.coef, &t.perm)))
            .expect("valid decomposition reconstructs a bistochastic matrix")
    }
}

/// Greedy Birkhoff loop: repeatedly take the lexicographically smallest
/// permutation inside the positive support and peel off its minimal entry.
pub fn decompose(a: &BistochasticMatrix) -> ConvexDecomposition {
    let n = a.n();
    let mut rest = a.as_matrix().clone();
    let mut terms = Vec::new();
    loop {
        let support: Vec<Vec<bool>> = (0..n)
            .map(|i| (0..n).map(|j| rest.get(i, j).is_positive()).collect())
            .collect();
        if support.iter().all(|r| r.iter().all(|&b| !b)) {
            break;
        }
        let perm = lex_smallest_matching(&support)
            .expect("a positive multiple of a bistochastic matrix has a perfect matching");
        let coef = (0..n)
            .map(|i| rest.get(i, perm.apply(i)).clone())
            .min()
            .expect("n >= 1");
        for i in 0..n {
            let j = perm.apply(i);
            let v = rest.get(i, j) - &coef;
            rest.set(i, j, v);
        }
        terms.push(Term { coef, perm });
    }
    ConvexDecomposition::new(terms).expect("greedy loop yields a convex decomposition")
}

/// Smallest permutation (one-line order) with `support[i][σ(i)]` for all `i`.
fn lex_smallest_matching(support: &[Vec<bool>]) -> Option<Permutation> {
    let n = support.len();
    let mut used = vec![false; n];
    let mut images = Vec::with_capacity(n);
    for i in 0..n {
        let j = (0..n).find(|&j| {
            if used[j] || !support[i][j] {
                return false;
            }
            used[j] = true;
            let ok = has_perfect_matching(support, i + 1, &used);
            used[j] = false;
            ok
        })?;
        used[j] = true;
        images.push(j);
    }
    Permutation::new(images).ok()
}

/// Kuhn's augmenting-path matching of rows `first_row..n` into unused columns.
fn has_perfect_matching(support: &[Vec<bool>], first_row: usize, used: &[bool]) -> bool {
    let n = support.len();
    let mut owner: Vec<Option<usize>> = vec![None; n];

    fn augment(
        row: usize,
        support: &[Vec<bool>],
        used: &[bool],
        owner: &mut [Option<usize>],
        visited: &mut [bool],
    ) -> bool {
        for j in 0..support.len() {
            if used[j] || !support[row][j] || visited[j] {
                continue;
            }
            visited[j] = true;
            if owner[j].map_or(true, |r| augment(r, support, used, owner, visited)) {
                owner[j] = Some(row);
                return true;
            }
        }
        false
    }

    (first_row..n).all(|row| {
        let mut visited = vec![false; n];
        augment(row, support, used, &mut owner, &mut visited)
    })
}

fn augmented_columns(perms: &[Permutation]) -> RationalMatrix {
    let n = perms[0].len();
    let mut m = RationalMatrix::zeros(n * n + 1, perms.len());
    for (c, p) in perms.iter().enumerate() {
        for i in 0..n {
            m.set(i * n + p.apply(i), c, Rational::one());
        }
        m.set(n * n, c, Rational::one());
    }
    m
}

/// Shrinks along affine dependencies until the support is affinely independent.
///
/// For a dependency `β` (`Σβᵢ = 0`, `Σβᵢ Pᵢ = 0`) take
/// `α = max{t : t|βᵢ| ≤ cᵢ ∀i}`, orient `β` so the binding index has
/// `βᵢ < 0`, and move to `cᵢ + αβᵢ`; the binding term drops to zero.
pub fn reduce_affine(d: &ConvexDecomposition) -> ConvexDecomposition {
    let mut terms = d.terms.clone();
    while let Some(mut beta) = kernel_vector(&augmented_columns(
        &terms.iter().map(|t| t.perm.clone()).collect::<Vec<_>>(),
    )) {
        let (binding, alpha) = terms
            .iter()
            .zip(&beta)
            .enumerate()
            .filter(|(_, (_, b))| !b.is_zero())
            .map(|(i, (t, b))| (i, &t.coef / b.abs()))
            .min_by(|x, y| x.1.cmp(&y.1))
            .expect("dependency vector is nonzero");
        if beta[binding].is_positive() {
            beta.iter_mut().for_each(|b| *b = -&*b);
        }
        for (t, b) in terms.iter_mut().zip(&beta) {
            t.coef += &alpha * b;
        }
        debug_assert!(terms[binding].coef.is_zero());
        terms.retain(|t| t.coef.is_positive());
    }
    ConvexDecomposition::new(terms).expect("shrink step preserves the convex combination")
}

/// Reduces to a linearly independent support with weights re-solved exactly
/// from the Gram system `M w = (⟨A, Pᵢ⟩)ᵢ`.
pub fn reduce_linear(d: &ConvexDecomposition) -> Result<ConvexDecomposition, BirkhoffError> {
    let target = d.reconstruct();
    let reduced = reduce_affine(d);
    let mut support = reduced.support();
    if !linear_independent(&support) {
        // Greedy maximal linearly independent subset, in support order.
        let mut kept: Vec<Permutation> = Vec::new();
        for p in support {
            kept.push(p);
            if !linear_independent(&kept) {
                kept.pop();
            }
        }
        support = kept;
    }
    let weights = solve_weights(&target, &support).ok_or(BirkhoffError::NoLinearSupport)?;
    let pairs: Vec<_> = weights
        .into_iter()
        .zip(support)
        .filter(|(w, _)| !w.is_zero())
        .collect();
    let out = ConvexDecomposition::from_pairs(pairs).map_err(|_| BirkhoffError::NoLinearSupport)?;
    if out.reconstruct() != target {
        return Err(BirkhoffError::NoLinearSupport);
    }
    Ok(out)
}

/// Exact weights `w` with `Σ wᵢ Pᵢ = A` on a linearly independent support,
/// if they exist and are nonnegative.
fn solve_weights(a: &BistochasticMatrix, support: &[Permutation]) -> Option<Vec<Rational>> {
    let m = support.len();
    let mut gram = RationalMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let g = support[i].agreement_count(&support[j]).ok()?;
            gram.set(i, j, Rational::from(g as i64));
        }
    }
    let rhs: Vec<Rational> = support.iter().map(|p| a.diagonal_sum(p)).collect();
    let w = gram.solve(&rhs).ok()?;
    if w.iter().any(Rational::is_negative) {
        return None;
    }
    Some(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::affine_independent;
    use crate::perm::enumerate_sn;
    use crate::rational::rat;

    fn cyc(n: usize, cs: &[&[usize]]) -> Permutation {
        Permutation::from_cycles(n, cs).unwrap()
    }

    #[test]
    fn permutation_matrix_is_single_term() {
        let p = cyc(4, &[&[1, 3, 2]]);
        let d = decompose(&p.to_matrix());
        assert_eq!(d.terms(), &[Term { coef: Rational::one(), perm: p }]);
    }

    #[test]
    fn uniform_three() {
        let j3 = BistochasticMatrix::uniform(3);
        let d = decompose(&j3);
        assert_eq!(d.len(), 3);
        assert!(d.weights().iter().all(|w| *w == rat(1, 3)));
        assert_eq!(d.reconstruct(), j3);
    }

    #[test]
    fn r_matrix_reconstructs() {
        let r = BistochasticMatrix::from_scaled_integers(rat(1, 5), &[[3, 0, 2], [0, 3, 2], [2, 2, 1]]).unwrap();
        let d = decompose(&r);
        assert_eq!(d.reconstruct(), r);
        assert!(d.len() <= 5);
    }

    #[test]
    fn validation() {
        let id = Permutation::identity(2);
        let sw = cyc(2, &[&[1, 2]]);
        assert_eq!(ConvexDecomposition::new(vec![]), Err(BirkhoffError::Empty));
        assert!(matches!(
            ConvexDecomposition::from_pairs([(rat(1, 2), id.clone()), (rat(1, 3), sw.clone())]),
            Err(BirkhoffError::BadSum(_))
        ));
        assert!(matches!(
            ConvexDecomposition::from_pairs([(Rational::one(), id.clone()), (Rational::zero(), sw)]),
            Err(BirkhoffError::NonPositive { .. })
        ));
        assert_eq!(
            ConvexDecomposition::from_pairs([(rat(1, 2), id.clone()), (rat(1, 2), id.clone())]),
            Err(BirkhoffError::Duplicate(id))
        );
    }

    #[test]
    fn affine_reduction_of_dependent_square() {
        let support = [
            Permutation::identity(4),
            cyc(4, &[&[1, 2]]),
            cyc(4, &[&[3, 4]]),
            cyc(4, &[&[1, 2], &[3, 4]]),
        ];
        // I − P₁₂ − P₃₄ + P₁₂P₃₄ = 0; equal weights tie on both negative
        // coefficients, so two terms leave at once.
        let d = ConvexDecomposition::from_pairs(support.iter().map(|p| (rat(1, 4), p.clone()))).unwrap();
        let r = reduce_affine(&d);
        assert_eq!(r.len(), 2);
        assert_eq!(r.reconstruct(), d.reconstruct());
        assert!(affine_independent(&r.support()));
        assert_eq!(reduce_affine(&r), r);

        let weights = [rat(1, 10), rat(2, 10), rat(3, 10), rat(4, 10)];
        let d = ConvexDecomposition::from_pairs(weights.into_iter().zip(support.iter().cloned())).unwrap();
        let r = reduce_affine(&d);
        assert_eq!(r.len(), 3);
        assert_eq!(r.reconstruct(), d.reconstruct());
        assert!(!r.support().contains(&support[0]));
    }

    #[test]
    fn linear_reduction_of_full_s3() {
        let s3 = enumerate_sn(3).unwrap();
        let d = ConvexDecomposition::from_pairs(s3.into_iter().map(|p| (rat(1, 6), p))).unwrap();
        let r = reduce_linear(&d).unwrap();
        assert!(r.len() <= 5);
        assert!(linear_independent(&r.support()));
        assert_eq!(r.reconstruct(), BistochasticMatrix::uniform(3));
        assert_eq!(reduce_linear(&r).unwrap(), r);
    }

    #[test]
    fn s_support_is_already_linear() {
        let support = [
            Permutation::identity(3),
            cyc(3, &[&[1, 2]]),
            cyc(3, &[&[2, 3]]),
            cyc(3, &[&[1, 2, 3]]),
        ];
        let d = ConvexDecomposition::from_pairs(support.iter().map(|p| (rat(1, 4), p.clone()))).unwrap();
        assert_eq!(reduce_linear(&d).unwrap(), d);
        let expected = BistochasticMatrix::from_scaled_integers(
            rat(1, 4),
            &[[2, 2, 0], [1, 1, 2], [1, 1, 2]],
        )
        .unwrap();
        assert_eq!(d.reconstruct(), expected);
    }
}
