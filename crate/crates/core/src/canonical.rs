//! Orbit representatives under `A ∼ PAQ`, for matrices and for permutation
//! families.

use thiserror::Error;

use crate::linalg::{BistochasticMatrix, RationalMatrix};
use crate::perm::{enumerate_sn, Permutation};
use crate::rational::Rational;

/// Largest `n` for which the brute-force canonicalizers run.
pub const CANONICAL_CAP: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonError {
    #[error("canonical forms are brute force and need n <= {cap}, got {n}")]
    CapExceeded { n: usize, cap: usize },
    #[error("permutations of different sizes")]
    MixedSizes,
    #[error("empty permutation family")]
    Empty,
}

fn check_cap(n: usize) -> Result<(), CanonError> {
    if n > CANONICAL_CAP {
        return Err(CanonError::CapExceeded { n, cap: CANONICAL_CAP });
    }
    Ok(())
}

/// Lexicographically least row-major flattening of `PAQ` over all row and
/// column permutations.
///
/// For a fixed row order the best column order sorts the columns as
/// top-to-bottom vectors, so only the `n!` row orders are searched.
pub fn canonical_form(a: &BistochasticMatrix) -> Result<BistochasticMatrix, CanonError> {
    let n = a.n();
    check_cap(n)?;
    let mut best: Option<Vec<Rational>> = None;
    for rp in enumerate_sn(n).expect("n within cap") {
        let mut cols: Vec<Vec<&Rational>> =
            (0..n).map(|j| (0..n).map(|i| a.get(rp.apply(i), j)).collect()).collect();
        cols.sort();
        let flat: Vec<&Rational> = (0..n).flat_map(|i| cols.iter().map(move |c| c[i])).collect();
        if best.as_ref().map_or(true, |b| flat.iter().copied().lt(b.iter())) {
            best = Some(flat.into_iter().cloned().collect());
        }
    }
    let m = RationalMatrix::from_entries(n, n, best.expect("S_n is nonempty"));
    Ok(BistochasticMatrix::new_unchecked(m))
}

/// Orbit key of a permutation family under `{gᵢ} ↦ {p∘gᵢ∘q}`, restricted to
/// the `(p, q)` that keep the identity in the image.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetKey(Vec<usize>);

impl SetKey {
    pub fn ranks(&self) -> &[usize] {
        &self.0
    }
}

/// The image of `{gᵢ}` under `g ↦ p∘g∘q` contains the identity exactly when
/// `q = (p∘g_k)⁻¹` for some `k`, which makes the image the conjugate of
/// `{gᵢ∘g_k⁻¹}` by `p`. The key is the least sorted rank list over all
/// `(p, k)`.
pub fn set_canonical_key(perms: &[Permutation]) -> Result<SetKey, CanonError> {
    let n = perms.first().ok_or(CanonError::Empty)?.len();
    if perms.iter().any(|p| p.len() != n) {
        return Err(CanonError::MixedSizes);
    }
    check_cap(n)?;
    let sn = enumerate_sn(n).expect("n within cap");
    let mut best: Option<Vec<usize>> = None;
    let mut ranks = Vec::with_capacity(perms.len());
    for gk in perms {
        let gk_inv = gk.inverse();
        let shifted: Vec<Permutation> =
            perms.iter().map(|g| g.compose(&gk_inv).expect("sizes checked")).collect();
        for p in &sn {
            let p_inv = p.inverse();
            ranks.clear();
            ranks.extend(shifted.iter().map(|h| {
                p.compose(h).and_then(|ph| ph.compose(&p_inv)).expect("sizes checked").rank()
            }));
            ranks.sort_unstable();
            if best.as_ref().map_or(true, |b| ranks < *b) {
                best = Some(ranks.clone());
            }
        }
    }
    Ok(SetKey(best.expect("family is nonempty")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn cyc(n: usize, cs: &[&[usize]]) -> Permutation {
        Permutation::from_cycles(n, cs).unwrap()
    }

    fn half_plus(p: &Permutation) -> BistochasticMatrix {
        let id = Permutation::identity(p.len());
        BistochasticMatrix::convex_combination([(&rat(1, 2), &id), (&rat(1, 2), p)]).unwrap()
    }

    #[test]
    fn canonical_examples() {
        let j3 = BistochasticMatrix::uniform(3);
        assert_eq!(canonical_form(&j3).unwrap(), j3);

        let i_plus_j2 = BistochasticMatrix::from_scaled_integers(rat(1, 2), &[[2, 0, 0], [0, 1, 1], [0, 1, 1]]).unwrap();
        let sigma = half_plus(&cyc(3, &[&[1, 2]]));
        assert_eq!(canonical_form(&sigma).unwrap(), canonical_form(&i_plus_j2).unwrap());
        assert_ne!(
            canonical_form(&half_plus(&cyc(3, &[&[1, 2, 3]]))).unwrap(),
            canonical_form(&sigma).unwrap()
        );
        // Zeros come first, so the identity canonicalizes to the anti-diagonal.
        assert_eq!(
            canonical_form(&BistochasticMatrix::identity(3)).unwrap(),
            cyc(3, &[&[1, 3]]).to_matrix()
        );
        assert_eq!(
            canonical_form(&BistochasticMatrix::identity(7)),
            Err(CanonError::CapExceeded { n: 7, cap: 6 })
        );
    }

    #[test]
    fn canonical_is_idempotent_and_orbit_invariant() {
        let a = BistochasticMatrix::from_scaled_integers(
            rat(1, 6),
            &[[3, 3, 0, 0], [1, 1, 2, 2], [1, 1, 2, 2], [1, 1, 2, 2]],
        )
        .unwrap();
        let c = canonical_form(&a).unwrap();
        assert_eq!(canonical_form(&c).unwrap(), c);
        for (p, q) in enumerate_sn(4).unwrap().iter().zip(enumerate_sn(4).unwrap().iter().rev()) {
            assert_eq!(canonical_form(&a.permute(p, q)).unwrap(), c);
        }
        assert_ne!(canonical_form(&a.transpose()).unwrap(), c);
    }

    #[test]
    fn set_keys() {
        let id = Permutation::identity(3);
        let (s, g, r) = (cyc(3, &[&[1, 2]]), cyc(3, &[&[2, 3]]), cyc(3, &[&[1, 2, 3]]));
        let key = |v: &[&Permutation]| set_canonical_key(&v.iter().map(|&p| p.clone()).collect::<Vec<_>>()).unwrap();
        assert_eq!(key(&[&id, &s]), key(&[&id, &g]));
        assert_ne!(key(&[&id, &s]), key(&[&id, &r]));
        let r2 = r.compose(&r).unwrap();
        assert_ne!(key(&[&id, &s, &g]), key(&[&id, &r, &r2]));
        // Order of the family does not matter.
        assert_eq!(key(&[&s, &id, &g]), key(&[&id, &g, &s]));
        assert_eq!(set_canonical_key(&[]), Err(CanonError::Empty));
    }
}
