//! Real quadratic surds `a + b·√d` and the `n = 2` α-Erdős solutions.
//!
//! A 2×2 bistochastic matrix is `[[p, 1−p], [1−p, p]]`, with
//! `Δ₂(p) = max{2p, 2(1−p)} − 2(p² + (1−p)²)`. For `0 ≤ α ≤ 1/4` the
//! solutions of `Δ₂(p) = α` are `(1 ± √(1−4α))/4` and `(3 ± √(1−4α))/4`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurdError {
    #[error("alpha must lie in [0, 1/4], got {0}")]
    AlphaOutOfRange(Rational),
    #[error("p must lie in [0, 1], got {0}")]
    POutOfRange(Surd),
}

/// `a + b·√d` with `d` square-free; rationals are stored as `(a, 0, 0)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Surd {
    a: Rational,
    b: Rational,
    d: BigUint,
}

/// Trial division stops here; a leftover cofactor is only checked for being
/// a perfect square, which settles square-freeness below `2^60`.
const TRIAL_LIMIT: u32 = 1 << 20;

/// Splits `d = s²·f`, returning `(s, f)` with `f` square-free.
fn square_free_split(d: &BigUint) -> (BigUint, BigUint) {
    let mut rest = d.clone();
    let mut s = BigUint::one();
    let mut f = BigUint::one();
    let mut p = 2u32;
    while p < TRIAL_LIMIT && BigUint::from(p) * p <= rest {
        let bp = BigUint::from(p);
        let mut k = 0u32;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            k += 1;
        }
        s *= bp.pow(k / 2);
        if k % 2 == 1 {
            f *= &bp;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let r = rest.sqrt();
    if &r * &r == rest {
        s *= r;
    } else {
        f *= rest;
    }
    (s, f)
}

impl Surd {
    pub fn new(a: Rational, b: Rational, d: impl Into<BigUint>) -> Self {
        let d = d.into();
        if b.is_zero() || d.is_zero() {
            return Surd::rational(a);
        }
        let (s, f) = square_free_split(&d);
        let b = b * Rational::from(BigInt::from(s));
        if f.is_one() {
            return Surd::rational(a + b);
        }
        Surd { a, b, d: f }
    }

    pub fn rational(a: Rational) -> Self {
        Surd { a, b: Rational::zero(), d: BigUint::zero() }
    }

    /// `√r` for a nonnegative rational `r = P/Q`, as `(1/Q)·√(PQ)`.
    pub fn sqrt_of(r: &Rational) -> Option<Self> {
        if r.is_negative() {
            return None;
        }
        let pq = (r.numer() * r.denom()).to_biguint().expect("nonnegative");
        Some(Surd::new(Rational::zero(), Rational::from(BigInt::one()) / Rational::from(r.denom().clone()), pq))
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn d(&self) -> &BigUint {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.a.clone())
    }

    pub fn signum(&self) -> Ordering {
        let sa = self.a.signum();
        let sb = self.b.signum();
        if sb == Ordering::Equal || sa == sb {
            return if sa == Ordering::Equal { sb } else { sa };
        }
        if sa == Ordering::Equal {
            return sb;
        }
        // Opposite signs: the larger of a² and b²d wins. They cannot tie
        // because d is square-free and greater than 1.
        let d = Rational::from(BigInt::from(self.d.clone()));
        match self.a.square().cmp(&(self.b.square() * d)) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    /// Exact comparison; `None` when the radicands differ.
    pub fn cmp_exact(&self, other: &Surd) -> Option<Ordering> {
        Some((self.try_sub(other)?).signum())
    }

    fn radicand_with(&self, other: &Surd) -> Option<BigUint> {
        match (self.is_rational(), other.is_rational()) {
            (true, _) => Some(other.d.clone()),
            (_, true) => Some(self.d.clone()),
            _ if self.d == other.d => Some(self.d.clone()),
            _ => None,
        }
    }

    pub fn try_add(&self, other: &Surd) -> Option<Surd> {
        let d = self.radicand_with(other)?;
        Some(Surd::new(&self.a + &other.a, &self.b + &other.b, d))
    }

    pub fn try_sub(&self, other: &Surd) -> Option<Surd> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Surd) -> Option<Surd> {
        let d = self.radicand_with(other)?;
        let dr = Rational::from(BigInt::from(d.clone()));
        let a = &self.a * &other.a + &self.b * &other.b * dr;
        let b = &self.a * &other.b + &self.b * &other.a;
        Some(Surd::new(a, b, d))
    }

    pub fn to_f64(&self) -> f64 {
        let d: f64 = self.d.to_string().parse().unwrap_or(f64::INFINITY);
        self.a.to_f64() + self.b.to_f64() * d.sqrt()
    }
}

impl From<Rational> for Surd {
    fn from(a: Rational) -> Self {
        Surd::rational(a)
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd { a: -&self.a, b: -&self.b, d: self.d.clone() }
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        -&self
    }
}

macro_rules! surd_op {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait<&Surd> for &Surd {
            type Output = Surd;
            /// Panics if both operands are irrational with different radicands.
            fn $method(self, rhs: &Surd) -> Surd {
                self.$try(rhs).expect("surds with different radicands")
            }
        }
        impl $trait<Surd> for Surd {
            type Output = Surd;
            fn $method(self, rhs: Surd) -> Surd {
                (&self).$method(&rhs)
            }
        }
    };
}
surd_op!(Add, add, try_add);
surd_op!(Sub, sub, try_sub);
surd_op!(Mul, mul, try_mul);

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.a);
        }
        let op = if self.b.is_negative() { '-' } else { '+' };
        write!(f, "{} {op} {}*sqrt({})", self.a, self.b.abs(), self.d)
    }
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Surd {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn check_alpha(alpha: &Rational) -> Result<(), SurdError> {
    if alpha.is_negative() || *alpha > Rational::new(1, 4) {
        return Err(SurdError::AlphaOutOfRange(alpha.clone()));
    }
    Ok(())
}

/// Every `p ∈ [0, 1]` with `Δ₂(p) = α`, ascending, duplicates merged.
pub fn omega2(alpha: &Rational) -> Result<Vec<Surd>, SurdError> {
    check_alpha(alpha)?;
    let root = Surd::sqrt_of(&(Rational::one() - Rational::from(4) * alpha)).expect("1 − 4α ≥ 0");
    let quarter = Surd::rational(Rational::new(1, 4));
    let mut out: Vec<Surd> = Vec::with_capacity(4);
    for base in [1, 3] {
        for sign in [-1, 1] {
            let p = (Surd::rational(Rational::from(base)) + Surd::rational(Rational::from(sign)) * root.clone())
                * quarter.clone();
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out.sort_by(|x, y| x.cmp_exact(y).expect("one radicand throughout"));
    Ok(out)
}

/// One representative per class of [`omega2`] under `p ∼ 1 − p` (the one
/// at most ½).
pub fn omega2_classes(alpha: &Rational) -> Result<Vec<Surd>, SurdError> {
    let half = Surd::rational(Rational::new(1, 2));
    Ok(omega2(alpha)?
        .into_iter()
        .filter(|p| p.cmp_exact(&half).expect("one radicand") != Ordering::Greater)
        .collect())
}

/// `Δ₂(p) = max{2p, 2(1−p)} − 2(p² + (1−p)²)`, exactly.
pub fn delta2_of_p(p: &Surd) -> Result<Surd, SurdError> {
    let zero = Surd::rational(Rational::zero());
    let one = Surd::rational(Rational::one());
    let two = Surd::rational(Rational::from(2));
    if p.cmp_exact(&zero) == Some(Ordering::Less) || p.cmp_exact(&one) == Some(Ordering::Greater) {
        return Err(SurdError::POutOfRange(p.clone()));
    }
    let q = &one - p;
    let larger = if p.cmp_exact(&q).expect("same radicand") == Ordering::Less { &q } else { p };
    let squares = &(p * p) + &(&q * &q);
    Ok(&(&two * larger) - &(&two * &squares))
}

pub fn delta2_rational(p: &Rational) -> Result<Rational, SurdError> {
    Ok(delta2_of_p(&Surd::rational(p.clone()))?
        .to_rational()
        .expect("rational input stays rational"))
}
