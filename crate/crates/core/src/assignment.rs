//! Maximal trace, the Marcus–Ree gap `Δ(A) = maxTr(A) − ‖A‖²_F`, and the
//! Erdős test `Δ(A) = 0`.
//!
//! Two exact routes to `maxTr`: brute force over all of `S_n` (the reference,
//! and the only route that reports every optimal permutation) and a
//! Kuhn–Munkres solver with rational potentials that returns one optimum.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{BistochasticMatrix, RationalMatrix};
use crate::perm::{enumerate_sn_capped, PermError, Permutation, DEFAULT_SN_CAP};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssignmentError {
    #[error("brute-force maximal trace needs n <= {cap}, got {n}")]
    BruteCapExceeded { n: usize, cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaxTraceMethod {
    Brute,
    Hungarian,
    /// Brute force up to n = 8, Hungarian beyond.
    #[default]
    Auto,
}

/// `maxTr(A)` together with optimal permutations.
///
/// From [`MaxTraceMethod::Brute`] the witness list is complete and sorted by
/// rank; from the Hungarian route it holds exactly one witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaxTraceCertificate {
    pub value: Rational,
    pub witnesses: Vec<Permutation>,
    pub complete_witnesses: bool,
}

pub fn maxtr(a: &BistochasticMatrix, method: MaxTraceMethod) -> Result<MaxTraceCertificate, AssignmentError> {
    let n = a.n();
    match method {
        MaxTraceMethod::Brute => maxtr_brute(a),
        MaxTraceMethod::Hungarian => Ok(maxtr_hungarian(a.as_matrix())),
        MaxTraceMethod::Auto if n <= DEFAULT_SN_CAP => maxtr_brute(a),
        MaxTraceMethod::Auto => Ok(maxtr_hungarian(a.as_matrix())),
    }
}

fn maxtr_brute(a: &BistochasticMatrix) -> Result<MaxTraceCertificate, AssignmentError> {
    let n = a.n();
    let perms = enumerate_sn_capped(n, DEFAULT_SN_CAP).map_err(|e| match e {
        PermError::CapExceeded { n, cap } => AssignmentError::BruteCapExceeded { n, cap },
        other => unreachable!("{other}"),
    })?;
    let mut best: Option<Rational> = None;
    let mut witnesses = Vec::new();
    for p in perms {
        let v = a.diagonal_sum(&p);
        match best.as_ref().map(|b| v.cmp(b)) {
            None | Some(std::cmp::Ordering::Greater) => {
                best = Some(v);
                witnesses.clear();
                witnesses.push(p);
            }
            Some(std::cmp::Ordering::Equal) => witnesses.push(p),
            Some(std::cmp::Ordering::Less) => {}
        }
    }
    Ok(MaxTraceCertificate {
        value: best.expect("S_n is nonempty"),
        witnesses,
        complete_witnesses: true,
    })
}

/// Kuhn–Munkres with exact potentials on cost `−A`; O(n³) rational operations.
/// Works for any square rational matrix.
pub fn maxtr_hungarian(a: &RationalMatrix) -> MaxTraceCertificate {
    let n = a.rows();
    assert!(a.is_square() && n > 0, "maximal trace needs a nonempty square matrix");
    let cost = |i: usize, j: usize| -a.get(i - 1, j - 1);

    // 1-indexed potentials; column 0 is the virtual start.
    let mut u = vec![Rational::zero(); n + 1];
    let mut v = vec![Rational::zero(); n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0usize;
        let mut minv: Vec<Option<Rational>> = vec![None; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta: Option<Rational> = None;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost(i0, j) - &u[i0] - &v[j];
                if minv[j].as_ref().map_or(true, |m| reduced < *m) {
                    minv[j] = Some(reduced);
                    way[j] = j0;
                }
                let mj = minv[j].as_ref().unwrap();
                if delta.as_ref().map_or(true, |d| mj < d) {
                    delta = Some(mj.clone());
                    j1 = j;
                }
            }
            let delta = delta.expect("an unused column always remains");
            for j in 0..=n {
                if used[j] {
                    u[row_of_col[j]] += &delta;
                    v[j] -= &delta;
                } else if let Some(m) = minv[j].as_mut() {
                    *m -= &delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut images = vec![0usize; n];
    for j in 1..=n {
        images[row_of_col[j] - 1] = j - 1;
    }
    let sigma = Permutation::new(images).expect("assignment is a bijection");
    let value = (0..n).map(|i| a.get(i, sigma.apply(i))).sum();
    MaxTraceCertificate { value, witnesses: vec![sigma], complete_witnesses: false }
}

/// `‖A‖²_F`.
pub fn frob_sq(a: &BistochasticMatrix) -> Rational {
    a.as_matrix().entries().iter().map(Rational::square).sum()
}

/// `maxTr(A) − ‖A‖²_F`, nonnegative on bistochastic matrices.
pub fn delta(a: &BistochasticMatrix) -> Rational {
    let cert = maxtr(a, MaxTraceMethod::Auto).expect("auto never exceeds the brute cap");
    cert.value - frob_sq(a)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErdosVerdict {
    pub is_erdos: bool,
    pub frob_sq: Rational,
    pub delta: Rational,
    pub certificate: MaxTraceCertificate,
}

/// True iff `‖A‖²_F = maxTr(A)` exactly.
pub fn is_erdos(a: &BistochasticMatrix) -> ErdosVerdict {
    is_erdos_with(a, MaxTraceMethod::Auto).expect("auto never exceeds the brute cap")
}

pub fn is_erdos_with(a: &BistochasticMatrix, method: MaxTraceMethod) -> Result<ErdosVerdict, AssignmentError> {
    let certificate = maxtr(a, method)?;
    let frob = frob_sq(a);
    let delta = &certificate.value - &frob;
    Ok(ErdosVerdict { is_erdos: delta.is_zero(), frob_sq: frob, delta, certificate })
}

/// `½Iₙ + ½Jₙ`: diagonal `½ + 1/(2n)`, off-diagonal `1/(2n)`.
pub fn max_delta_matrix(n: usize) -> BistochasticMatrix {
    assert!(n >= 1);
    let off = Rational::new(1, 2 * n as i64);
    let diag = Rational::new(1, 2) + &off;
    let mut m = RationalMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, if i == j { diag.clone() } else { off.clone() });
        }
    }
    BistochasticMatrix::new(m).expect("rows sum to ½ + n/(2n)")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn r_matrix() -> BistochasticMatrix {
        BistochasticMatrix::from_scaled_integers(rat(1, 5), &[[3, 0, 2], [0, 3, 2], [2, 2, 1]]).unwrap()
    }

    #[test]
    fn uniform_has_every_witness() {
        let cert = maxtr(&BistochasticMatrix::uniform(4), MaxTraceMethod::Brute).unwrap();
        assert_eq!(cert.value, Rational::one());
        assert_eq!(cert.witnesses.len(), 24);
        assert!(cert.complete_witnesses);
    }

    #[test]
    fn r_matrix_values() {
        let r = r_matrix();
        let cert = maxtr(&r, MaxTraceMethod::Brute).unwrap();
        assert_eq!(cert.value, rat(7, 5));
        assert!(cert.witnesses.contains(&Permutation::identity(3)));
        assert_eq!(frob_sq(&r), rat(7, 5));
        assert!(is_erdos(&r).is_erdos);
        assert_eq!(maxtr(&r, MaxTraceMethod::Hungarian).unwrap().value, rat(7, 5));
    }

    #[test]
    fn non_symmetric_four_by_four() {
        // Brute force over the 24 permutations, done by hand: best is row 1 on
        // a 3/6 column and rows 2-4 on 1/6, 2/6, 2/6 → 8/6.
        let a = BistochasticMatrix::from_scaled_integers(
            rat(1, 6),
            &[[3, 3, 0, 0], [1, 1, 2, 2], [1, 1, 2, 2], [1, 1, 2, 2]],
        )
        .unwrap();
        assert_eq!(maxtr(&a, MaxTraceMethod::Brute).unwrap().value, rat(4, 3));
        assert_eq!(frob_sq(&a), rat(4, 3));
        assert_eq!(delta(&a), Rational::zero());
    }

    #[test]
    fn frob_examples() {
        assert_eq!(frob_sq(&BistochasticMatrix::identity(5)), Rational::from(5));
        assert_eq!(frob_sq(&BistochasticMatrix::uniform(3)), Rational::one());
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(&BistochasticMatrix::uniform(3)), Rational::zero());
        assert_eq!(delta(&max_delta_matrix(2)), rat(1, 4));
        assert_eq!(delta(&BistochasticMatrix::identity(4)), Rational::zero());
        let v = is_erdos(&max_delta_matrix(3));
        assert!(!v.is_erdos);
        assert_eq!(v.delta, rat(1, 2));
    }

    #[test]
    fn max_delta_matrix_values() {
        assert_eq!(
            max_delta_matrix(2),
            BistochasticMatrix::from_scaled_integers(rat(1, 4), &[[3, 1], [1, 3]]).unwrap()
        );
        assert_eq!(max_delta_matrix(1), BistochasticMatrix::identity(1));
        for n in 2..=6 {
            assert_eq!(delta(&max_delta_matrix(n)), rat(n as i64 - 1, 4));
        }
    }

    #[test]
    fn half_identity_plus_permutation_is_erdos() {
        for p in crate::perm::enumerate_sn(4).unwrap() {
            let a = BistochasticMatrix::convex_combination([
                (&rat(1, 2), &Permutation::identity(4)),
                (&rat(1, 2), &p),
            ])
            .unwrap();
            assert!(is_erdos(&a).is_erdos, "{p}");
        }
    }

    #[test]
    fn brute_cap() {
        assert_eq!(
            maxtr(&BistochasticMatrix::identity(9), MaxTraceMethod::Brute),
            Err(AssignmentError::BruteCapExceeded { n: 9, cap: 8 })
        );
        let big = maxtr(&BistochasticMatrix::identity(12), MaxTraceMethod::Auto).unwrap();
        assert_eq!(big.value, Rational::from(12));
        assert_eq!(big.witnesses, vec![Permutation::identity(12)]);
    }
}
