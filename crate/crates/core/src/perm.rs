//! Permutations of `{0, …, n-1}` in one-line notation.
//!
//! Internally 0-indexed; rendered 1-indexed, both as cycles (`(12)(34)`) and
//! as JSON image lists (`[2,1,4,3]`). The lexicographic rank of the one-line
//! notation is the stable integer id used by the enumerator.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::linalg::BistochasticMatrix;

/// Largest `n` for which all of `S_n` is materialised.
pub const DEFAULT_SN_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("not a permutation of 0..{n}: {images:?}")]
    NotBijective { n: usize, images: Vec<usize> },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("refusing to enumerate S_{n}: cap is {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("n must be at least 1")]
    Empty,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(PermError::NotBijective { n, images });
            }
        }
        Ok(Permutation { images })
    }

    /// Builds from a 1-indexed image list, the JSON form.
    pub fn from_one_indexed(images: &[usize]) -> Result<Self, PermError> {
        let n = images.len();
        let shifted = images
            .iter()
            .map(|&i| i.checked_sub(1).unwrap_or(n))
            .collect();
        Self::new(shifted)
    }

    /// Builds from disjoint 1-indexed cycles, e.g. `from_cycles(4, &[&[1, 2], &[3, 4]])`.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (k, &p) in cycle.iter().enumerate() {
                let next = cycle[(k + 1) % cycle.len()];
                if p == 0 || p > n || next == 0 || next > n || touched[p - 1] {
                    return Err(PermError::NotBijective { n, images });
                }
                touched[p - 1] = true;
                images[p - 1] = next - 1;
            }
        }
        Self::new(images)
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Self, PermError> {
        check_same(self, other)?;
        Ok(Permutation {
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        })
    }

    pub fn fixed_points(&self) -> usize {
        self.images.iter().enumerate().filter(|(i, j)| i == *j).count()
    }

    /// Positions where the two agree; the Frobenius inner product of the
    /// two permutation matrices.
    pub fn agreement_count(&self, other: &Permutation) -> Result<usize, PermError> {
        check_same(self, other)?;
        Ok(self
            .images
            .iter()
            .zip(&other.images)
            .filter(|(a, b)| a == b)
            .count())
    }

    /// Disjoint cycles, each starting at its smallest point, ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut j = self.images[start];
            while j != start {
                seen[j] = true;
                cycle.push(j);
                j = self.images[j];
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_type(&self) -> CycleType {
        let mut parts: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        CycleType { parts }
    }

    /// Lexicographic rank of the one-line notation among all of `S_n`.
    pub fn rank(&self) -> usize {
        let n = self.len();
        let mut rank = 0usize;
        for i in 0..n {
            let smaller_later = self.images[i + 1..]
                .iter()
                .filter(|&&v| v < self.images[i])
                .count();
            rank = rank * (n - i) + smaller_later;
        }
        rank
    }

    /// Inverse of [`Permutation::rank`]; `rank < n!` is required.
    pub fn unrank(n: usize, mut rank: usize) -> Self {
        let mut pool: Vec<usize> = (0..n).collect();
        let mut fact: Vec<usize> = vec![1; n.max(1)];
        for i in 1..n {
            fact[i] = fact[i - 1] * i;
        }
        let mut images = Vec::with_capacity(n);
        for i in (0..n).rev() {
            let idx = rank / fact[i];
            rank %= fact[i];
            images.push(pool.remove(idx));
        }
        Permutation { images }
    }

    /// 0/1 matrix with a one at `(i, self(i))` in every row.
    ///
    /// With this layout `Σ_i A[i][σ(i)] = ⟨A, P_σ⟩`, the trace of `P_σ` is the
    /// number of fixed points, and `P_a · P_b = P_{b ∘ a}`.
    pub fn to_matrix(&self) -> BistochasticMatrix {
        BistochasticMatrix::from_permutation(self)
    }
}

fn check_same(a: &Permutation, b: &Permutation) -> Result<(), PermError> {
    if a.len() != b.len() {
        return Err(PermError::DimensionMismatch(a.len(), b.len()));
    }
    Ok(())
}

impl fmt::Display for Permutation {
    /// Cycle notation, 1-indexed, fixed points omitted; identity is `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.len() > 9 { " " } else { "" };
        let mut any = false;
        for cycle in self.cycles().into_iter().filter(|c| c.len() > 1) {
            any = true;
            let body: Vec<String> = cycle.iter().map(|p| (p + 1).to_string()).collect();
            write!(f, "({})", body.join(sep))?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one: Vec<usize> = self.images.iter().map(|i| i + 1).collect();
        write!(f, "{one:?}")
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.images.iter().map(|i| i + 1))
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let images = Vec::<usize>::deserialize(d)?;
        Permutation::from_one_indexed(&images).map_err(serde::de::Error::custom)
    }
}

/// Cycle lengths sorted non-increasing; an integer partition of `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CycleType {
    parts: Vec<usize>,
}

impl CycleType {
    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(usize::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// All partitions of `n` as non-increasing part lists, in increasing
/// lexicographic order (`[1,1,…]` first, `[n]` last).
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(remaining: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in 1..=max_part.min(remaining) {
            prefix.push(part);
            go(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// One permutation per cycle type of `S_n`: cycles laid out left to right,
/// longest first, on the smallest available points.
pub fn conjugacy_class_reps(n: usize) -> Result<Vec<Permutation>, PermError> {
    if n == 0 {
        return Err(PermError::Empty);
    }
    Ok(partitions(n)
        .into_iter()
        .map(|parts| {
            let mut images = Vec::with_capacity(n);
            let mut start = 0;
            for len in parts {
                for k in 0..len {
                    images.push(start + (k + 1) % len);
                }
                start += len;
            }
            Permutation { images }
        })
        .collect())
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// All of `S_n` in lexicographic order, so index equals rank.
pub fn enumerate_sn(n: usize) -> Result<Vec<Permutation>, PermError> {
    enumerate_sn_capped(n, DEFAULT_SN_CAP)
}

pub fn enumerate_sn_capped(n: usize, cap: usize) -> Result<Vec<Permutation>, PermError> {
    if n == 0 {
        return Err(PermError::Empty);
    }
    if n > cap {
        return Err(PermError::CapExceeded { n, cap });
    }
    let mut out = Vec::with_capacity(factorial(n));
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(Permutation { images: current.clone() });
        if !next_permutation(&mut current) {
            break;
        }
    }
    Ok(out)
}

fn next_permutation(a: &mut [usize]) -> bool {
    let Some(i) = a.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = a.iter().rposition(|&x| x > a[i]).unwrap();
    a.swap(i, j);
    a[i + 1..].reverse();
    true
}
