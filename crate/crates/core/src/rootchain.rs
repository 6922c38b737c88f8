//! Competition for the root once a train reaches the bottom of its stem.
//!
//! `p_up[i]` (`p_down[i]`) is the chance that a train with `i` mutants left
//! in the stem eventually places a mutant into some reservoir, given the root
//! currently is (is not) a mutant. Index 0 means the train is used up.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{invalid, Result};
use crate::scalar::{rational_from_f64, to_f64};

#[derive(Debug, Clone, PartialEq)]
pub struct RootChainSolution {
    pub branches: usize,
    pub r: BigRational,
    /// Other branches assumed to hold a mutant at the base of their stem.
    pub competing: usize,
    pub p_up: Vec<BigRational>,
    pub p_down: Vec<BigRational>,
}

impl RootChainSolution {
    pub fn len(&self) -> usize {
        self.p_up.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn up(&self, i: usize) -> f64 {
        to_f64(&self.p_up[i])
    }

    pub fn down(&self, i: usize) -> f64 {
        to_f64(&self.p_down[i])
    }
}

fn check(branches: usize, r: f64) -> Result<BigRational> {
    if branches < 2 {
        return invalid(format!("root chain needs B >= 2 branches, got {branches}"));
    }
    if !(r > 0.0) {
        return invalid(format!("fitness r must be positive, got {r}"));
    }
    rational_from_f64(r).ok_or_else(|| crate::Error::InvalidParameter(format!("fitness r must be finite, got {r}")))
}

/// Iterates the 2x2 recursion from `(r/(B+r), 0)` up to `length`.
pub fn solve_root_chain(branches: usize, r: f64, length: usize) -> Result<RootChainSolution> {
    let r = check(branches, r)?;
    Ok(iterate(branches, r, length, 0))
}

/// Exact-input variant of [`solve_root_chain`].
pub fn solve_root_chain_exact(branches: usize, r: &BigRational, length: usize) -> Result<RootChainSolution> {
    if branches < 2 || *r <= BigRational::zero() {
        return invalid("root chain needs B >= 2 and r > 0");
    }
    Ok(iterate(branches, r.clone(), length, 0))
}

/// Worst case for the lower bound: `competing` other branches permanently
/// hold a mutant at their stem base and fight for the root, and offspring
/// landing in an occupied branch are ignored.
pub fn solve_competing_root_chain(branches: usize, r: f64, length: usize, competing: usize) -> Result<RootChainSolution> {
    let r = check(branches, r)?;
    if competing >= branches {
        return invalid(format!("competing branches {competing} must be below B = {branches}"));
    }
    Ok(iterate(branches, r, length, competing))
}

fn iterate(branches: usize, r: BigRational, length: usize, competing: usize) -> RootChainSolution {
    let one = BigRational::one();
    let b = BigRational::from_integer(branches.into());
    let d = BigRational::from_integer(competing.into());
    // effective branch weight B + d(r - 1)
    let bd = &b + &d * (&r - &one);
    let denom = &bd + BigRational::from_integer(2.into()) * &r + &r * &r;
    let m11 = (&r + &one) / &denom;
    let m12 = (&bd - &one) / &denom;
    let m21 = &r / &denom;
    let m22 = (&r + &bd) / &denom;
    let push = &r * (&b - &d) / &b;

    let mut p_up = vec![&r / (&b + &r)];
    let mut p_down = vec![BigRational::zero()];
    for i in 1..=length {
        let u = &push + &p_up[i - 1];
        let w = &p_down[i - 1];
        p_up.push(&m11 * &u + &m12 * w);
        p_down.push(&m21 * &u + &m22 * w);
    }
    RootChainSolution { branches, r, competing, p_up, p_down }
}

/// `(1+r)/((B+2r+1)(B+r)) + (H-1)(r+1)/(2B+4r+2)`
pub fn epsilon4_plus(branches: usize, r: f64, stem: usize) -> Result<f64> {
    if branches < 2 {
        return invalid(format!("epsilon4+ needs B >= 2, got {branches}"));
    }
    let b = branches as f64;
    let h = stem as f64;
    Ok((1.0 + r) / ((b + 2.0 * r + 1.0) * (b + r)) + (h - 1.0) * (r + 1.0) / (2.0 * b + 4.0 * r + 2.0))
}

/// `(2 delta r + r^2 + 3r + H(r^2 + r)) / (2B)`
pub fn epsilon4_minus(branches: usize, r: f64, stem: usize, delta: usize) -> Result<f64> {
    if branches < 2 {
        return invalid(format!("epsilon4- needs B >= 2, got {branches}"));
    }
    let (b, h, d) = (branches as f64, stem as f64, delta as f64);
    Ok((2.0 * d * r + r * r + 3.0 * r + h * (r * r + r)) / (2.0 * b))
}

/// `((1 - e4-) l r^2 / B, (1 + e4+) l r^2 / B)`, the envelope on `p_down[l]`.
pub fn seeding_envelope(branches: usize, r: f64, stem: usize, delta: usize, length: usize) -> Result<(f64, f64)> {
    let lo = epsilon4_minus(branches, r, stem, delta)?;
    let hi = epsilon4_plus(branches, r, stem)?;
    let base = length as f64 * r * r / branches as f64;
    Ok(((1.0 - lo) * base, (1.0 + hi) * base))
}
