//! Mutant trains in a stem: expected length on arrival at the root end,
//! simple bounds, collision bound, and two independent checks (a grid
//! dynamic program and direct simulation of the condensed train process).
//!
//! A train is described by its front `A` and the resident position `Z` just
//! behind it. In the condensed process the front advances with probability
//! `r/(1+r)` and the tail with `alpha = 1/(1+r)`. The train starts at
//! `(2, 1)`, vanishes once `Z >= A`, and arrives when `A = H`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scalar::{binomial, rational_from_f64, to_f64, Scalar};

/// Stems longer than this are evaluated in log space.
pub const EXACT_STEM_LIMIT: usize = 200;
/// The grid oracle runs in exact rationals up to this stem length.
pub const DP_EXACT_LIMIT: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrainState {
    /// Position of the leading mutant.
    pub front: usize,
    /// Position of the resident directly behind the train.
    pub tail: usize,
}

impl TrainState {
    pub const INITIAL: TrainState = TrainState { front: 2, tail: 1 };

    pub fn length(&self) -> usize {
        self.front.saturating_sub(self.tail)
    }

    pub fn is_extinct(&self) -> bool {
        self.tail >= self.front
    }
}

/// Tail-advance probability `alpha = 1/(1+r)` of the condensed process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepBias {
    pub alpha: f64,
}

impl StepBias {
    pub fn new(r: f64) -> Result<Self> {
        check_r(r)?;
        Ok(Self { alpha: 1.0 / (1.0 + r) })
    }

    pub fn front(&self) -> f64 {
        1.0 - self.alpha
    }

    /// `0 < alpha < 1/2` exactly when the mutant is beneficial.
    pub fn favours_front(&self) -> bool {
        self.alpha < 0.5
    }
}

fn check_r(r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return invalid(format!("fitness r must be positive and finite, got {r}"));
    }
    Ok(())
}

fn check_stem(stem: usize) -> Result<()> {
    if stem < 2 {
        return invalid(format!("train length needs a stem of at least 2 nodes, got H = {stem}"));
    }
    Ok(())
}

/// Expected train length `T` on arrival, extinct trains counting as zero.
/// Exact for `H <= 200`, log-space above (relative error below 1e-9).
pub fn expected_train_length(r: f64, stem: usize) -> Result<f64> {
    check_r(r)?;
    check_stem(stem)?;
    if stem <= EXACT_STEM_LIMIT {
        let r = rational_from_f64(r).expect("finite");
        Ok(to_f64(&expected_train_length_exact(&r, stem)?))
    } else {
        expected_train_length_log_space(r, stem)
    }
}

/// Reflection-principle sum
/// `T = (1-a)^(H-2) sum_{z=1}^{H-1} (H-z) a^(z-1) [C(H+z-4, z-1) - C(H+z-4, z-2)]`
/// with `a = 1/(1+r)`, evaluated over the common denominator `(1+r)^(2H-4)`.
pub fn expected_train_length_exact(r: &BigRational, stem: usize) -> Result<BigRational> {
    check_stem(stem)?;
    if *r <= BigRational::zero() {
        return invalid("fitness r must be positive");
    }
    // r = p/q, a = q/(p+q), 1-a = p/(p+q)
    let p = r.numer().clone();
    let q = r.denom().clone();
    let b = &p + &q;
    let h = stem as i64;
    let mut sum = BigInt::zero();
    let mut a_pow = BigInt::one(); // q^(z-1)
    for z in 1..h {
        let ballot = BigInt::from(binomial(h + z - 4, z - 1)) - BigInt::from(binomial(h + z - 4, z - 2));
        if !ballot.is_zero() {
            let b_pow = num_traits::pow(b.clone(), (h - 1 - z) as usize);
            sum += BigInt::from(h - z) * &a_pow * b_pow * ballot;
        }
        a_pow *= &q;
    }
    let numer = num_traits::pow(p, (h - 2) as usize) * sum;
    let denom = num_traits::pow(b, (2 * h - 4) as usize);
    Ok(BigRational::new(numer, denom))
}

/// Log-space evaluation of the same sum, using
/// `C(n,k) - C(n,k-1) = C(n,k) (H-z-1)/(H-2)` for `n = H+z-4`, `k = z-1`.
pub fn expected_train_length_log_space(r: f64, stem: usize) -> Result<f64> {
    check_r(r)?;
    check_stem(stem)?;
    if stem == 2 {
        return Ok(1.0);
    }
    let h = stem as f64;
    let ln_alpha = -(1.0 + r).ln();
    let ln_front = r.ln() + ln_alpha;
    let mut ln_binom = 0.0f64; // ln C(H-3, 0)
    let mut terms = Vec::with_capacity(stem);
    for z in 1..stem - 1 {
        let zf = z as f64;
        let ln_term = (h - zf).ln() + (zf - 1.0) * ln_alpha + ln_binom + ((h - zf - 1.0) / (h - 2.0)).ln();
        terms.push(ln_term);
        // C(n+1, k+1) = C(n, k) (n+1)/(k+1) with n = H+z-4, k = z-1
        ln_binom += (h + zf - 3.0).ln() - zf.ln();
    }
    let peak = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ln_sum = peak + terms.iter().map(|t| (t - peak).exp()).sum::<f64>().ln();
    Ok(((h - 2.0) * ln_front + ln_sum).exp())
}

/// `((H-1)(1-1/r)^2, H)`, valid for beneficial mutants.
pub fn train_length_bounds(r: f64, stem: usize) -> Result<(f64, f64)> {
    check_r(r)?;
    check_stem(stem)?;
    if r <= 1.0 {
        return invalid(format!("train length bounds need r > 1, got {r}"));
    }
    let gap = 1.0 - 1.0 / r;
    Ok(((stem as f64 - 1.0) * gap * gap, stem as f64))
}

/// Expected arrival length by forward propagation of probability mass over
/// the `(A, Z)` grid. No path counting is involved.
pub fn train_dp_oracle(r: f64, stem: usize) -> Result<f64> {
    check_r(r)?;
    check_stem(stem)?;
    if stem <= DP_EXACT_LIMIT {
        let r = rational_from_f64(r).expect("finite");
        Ok(to_f64(&train_dp_oracle_exact(&r, stem)?))
    } else {
        let front = r / (1.0 + r);
        Ok(grid_expectation(front, 1.0 - front, stem))
    }
}

pub fn train_dp_oracle_exact(r: &BigRational, stem: usize) -> Result<BigRational> {
    check_stem(stem)?;
    if *r <= BigRational::zero() {
        return invalid("fitness r must be positive");
    }
    let one = BigRational::one();
    let front = r / (&one + r);
    let tail = &one - &front;
    Ok(grid_expectation(front, tail, stem))
}

fn grid_expectation<T: Scalar>(front: T, tail: T, stem: usize) -> T {
    let start = TrainState::INITIAL;
    if start.front == stem {
        return T::from_usize(start.length());
    }
    // every event raises A + Z by one, so propagate layer by layer
    let mut layer: HashMap<TrainState, T> = HashMap::from([(start, T::one())]);
    let mut expected = T::zero();
    while !layer.is_empty() {
        let mut next: HashMap<TrainState, T> = HashMap::with_capacity(layer.len() + 1);
        for (s, mass) in layer {
            let advanced = TrainState { front: s.front + 1, tail: s.tail };
            let w = mass.clone() * front.clone();
            if advanced.front == stem {
                expected = expected + w * T::from_usize(advanced.length());
            } else {
                let e = next.entry(advanced).or_insert_with(T::zero);
                *e = e.clone() + w;
            }
            let eroded = TrainState { front: s.front, tail: s.tail + 1 };
            if !eroded.is_extinct() {
                let e = next.entry(eroded).or_insert_with(T::zero);
                *e = e.clone() + mass * tail.clone();
            }
        }
        layer = next;
    }
    expected
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub runs: u64,
}

/// Monte Carlo of the condensed train process: sample mean of the arrival
/// length with a normal 95% interval.
pub fn simulate_train<R: Rng + ?Sized>(r: f64, stem: usize, rng: &mut R, runs: u64) -> Result<TrainEstimate> {
    let bias = StepBias::new(r)?;
    check_stem(stem)?;
    if runs == 0 {
        return invalid("simulate_train needs at least one run");
    }
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    for _ in 0..runs {
        let mut s = TrainState::INITIAL;
        while s.front < stem {
            if rng.random::<f64>() < bias.alpha {
                s.tail += 1;
                if s.is_extinct() {
                    break;
                }
            } else {
                s.front += 1;
            }
        }
        let len = if s.is_extinct() { 0.0 } else { s.length() as f64 };
        sum += len;
        sum_sq += len * len;
    }
    let n = runs as f64;
    let mean = sum / n;
    let var = if runs > 1 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    let std_err = (var / n).sqrt();
    Ok(TrainEstimate { mean, std_err, ci_lo: mean - 1.96 * std_err, ci_hi: mean + 1.96 * std_err, runs })
}

/// Upper bound `H r^2 / (L + r - 1 + r^2)` on the chance that a second train
/// enters a stem that is still occupied.
pub fn collision_probability_bound(r: f64, reservoir: usize, stem: usize) -> Result<f64> {
    check_r(r)?;
    if reservoir < 1 {
        return invalid("collision bound needs L >= 1");
    }
    let r2 = r * r;
    Ok(stem as f64 * r2 / (reservoir as f64 + r - 1.0 + r2))
}
