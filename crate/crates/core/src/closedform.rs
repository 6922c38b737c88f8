//! Closed-form fixation probabilities, superstar bounds and the finite-size
//! error terms that go with them.

use num_integer::Roots;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rootchain::{epsilon4_minus, epsilon4_plus};
use crate::trainkinetics::{collision_probability_bound, expected_train_length};

fn check_r(r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return invalid(format!("fitness r must be positive and finite, got {r}"));
    }
    Ok(())
}

/// `(1 - r^-s) / (1 - r^-(s n))`; `n` may be infinite.
fn geometric_fixation(r: f64, s: f64, n: f64) -> Result<f64> {
    check_r(r)?;
    if !(n >= 1.0) {
        return invalid(format!("population size must be at least 1, got {n}"));
    }
    let x = s * r.ln();
    if x == 0.0 {
        return Ok(1.0 / n);
    }
    if n.is_infinite() {
        return Ok(if x > 0.0 { -(-x).exp_m1() } else { 0.0 });
    }
    let den = (-n * x).exp_m1();
    if den.is_infinite() {
        return Ok(0.0);
    }
    Ok((-x).exp_m1() / den)
}

/// Fixation probability of one mutant in a well-mixed population of `n`.
pub fn moran_fixation(r: f64, n: usize) -> Result<f64> {
    geometric_fixation(r, 1.0, n as f64)
}

/// Same as [`moran_fixation`] with `n` possibly `f64::INFINITY`.
pub fn moran_fixation_limit(r: f64, n: f64) -> Result<f64> {
    geometric_fixation(r, 1.0, n)
}

/// `log10` of [`moran_fixation`], usable where the value underflows
/// (deleterious mutants in large populations).
pub fn moran_fixation_log10(r: f64, n: usize) -> Result<f64> {
    check_r(r)?;
    if n < 1 {
        return invalid("population size must be at least 1");
    }
    let (x, nf) = (r.ln(), n as f64);
    let ln = if x == 0.0 {
        -nf.ln()
    } else if x > 0.0 {
        (-(-x).exp_m1()).ln() - (-(-nf * x).exp_m1()).ln()
    } else {
        // (1/r - 1) / (r^-n - 1) = e^{-n y} (e^y - 1) / (1 - e^{-n y}) with y = -ln r
        let y = -x;
        y.exp_m1().ln() - nf * y - (-(-nf * y).exp_m1()).ln()
    };
    Ok(ln / std::f64::consts::LN_10)
}

/// Large-star approximation: the mutant behaves as if it had fitness `r^2`.
pub fn star_fixation_approx(r: f64, n: f64) -> Result<f64> {
    if !(n >= 2.0) {
        return invalid(format!("star needs at least 2 nodes, got {n}"));
    }
    geometric_fixation(r, 2.0, n)
}

/// The historical superstar formula with `k = H + 2`. Known to be wrong for
/// `H >= 3`; kept for comparison only.
pub fn claimed_superstar_fixation(r: f64, n: f64, stem: usize) -> Result<f64> {
    if stem < 2 {
        return invalid(format!("stem length must be at least 2, got {stem}"));
    }
    geometric_fixation(r, (stem + 2) as f64, n)
}

pub const CLAIMED_FORMULA_NOTE: &str = "invalidated for H >= 3";

/// Counter-example bound for `H = 3`: `1 - (1+r)/(2r^5 + r + 1)`.
pub fn diaz_upper_bound_h3(r: f64) -> Result<f64> {
    check_r(r)?;
    Ok(1.0 - (1.0 + r) / (2.0 * r.powi(5) + r + 1.0))
}

fn beneficial(r: f64) -> Result<()> {
    check_r(r)?;
    if r <= 1.0 {
        return invalid(format!("needs a beneficial mutant r > 1, got {r} (see deleterious_upper_bound)"));
    }
    Ok(())
}

/// Chance to go from one to two reservoir mutants: `r^4 T / (1 + r^4 T)`.
pub fn reservoir_growth_bias(r: f64, stem: usize) -> Result<f64> {
    beneficial(r)?;
    let x = r.powi(4) * expected_train_length(r, stem)?;
    Ok(x / (1.0 + x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticBounds {
    pub lower: f64,
    pub upper: f64,
    /// `T` replaced by its lower bound `(H-1)(1-1/r)^2`.
    pub lower_t_free: f64,
    /// `T` replaced by its upper bound `H`.
    pub upper_t_free: f64,
}

/// `B, L -> infinity` limits `(1 - 1/(r^4 T), 1 - 1/(1 + r^4 T))`.
pub fn asymptotic_superstar_bounds(r: f64, stem: usize) -> Result<AsymptoticBounds> {
    beneficial(r)?;
    let r4 = r.powi(4);
    let t = expected_train_length(r, stem)?;
    let gap = 1.0 - 1.0 / r;
    Ok(AsymptoticBounds {
        lower: 1.0 - 1.0 / (r4 * t),
        upper: reservoir_growth_bias(r, stem)?,
        lower_t_free: 1.0 - 1.0 / (r4 * (stem as f64 - 1.0) * gap * gap),
        upper_t_free: 1.0 - 1.0 / (1.0 + r4 * stem as f64),
    })
}

/// `delta = floor(sqrt(B))`, so that `sqrt(B) - 1 < delta <= sqrt(B)`.
pub fn default_delta(branches: usize) -> usize {
    branches.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Epsilons {
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub e4_minus: f64,
    pub e4_plus: f64,
    /// May underflow to zero; see `e5_log10`.
    pub e5: f64,
    pub e5_log10: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorLedger {
    pub epsilons: Epsilons,
    pub gamma: f64,
    pub delta: usize,
    /// Train length the ledger was built from.
    pub t: f64,
    /// False when `gamma <= 1` or a factor `1 - e` in gamma is not positive;
    /// the bounds mean nothing then.
    pub valid: bool,
}

fn superstar_dims(branches: usize, reservoir: usize, stem: usize) -> Result<()> {
    if branches < 2 || reservoir < 1 || stem < 2 {
        return invalid(format!("bounds need B >= 2, L >= 1, H >= 2; got B={branches} L={reservoir} H={stem}"));
    }
    Ok(())
}

/// `ln((gamma-1)(BL-delta) - 1) - delta ln(gamma)`, or `None` if the
/// bracket is not positive.
fn ln_epsilon5(gamma: f64, delta: usize, capacity: f64) -> Option<f64> {
    let bracket = (gamma - 1.0) * (capacity - delta as f64) - 1.0;
    (bracket > 0.0).then(|| bracket.ln() - delta as f64 * gamma.ln())
}

fn epsilon5(gamma: f64, delta: usize, capacity: f64) -> (f64, f64) {
    match ln_epsilon5(gamma, delta, capacity) {
        Some(l) => (l.exp(), l / std::f64::consts::LN_10),
        None => {
            let v = gamma.powf(-(delta as f64)) * ((gamma - 1.0) * (capacity - delta as f64) - 1.0);
            (v, v.abs().log10())
        }
    }
}

/// Every finite-size error term together with the forward bias
/// `gamma = r^4 T (1-e1)(1-e3)(1-e4-) - e2`.
pub fn error_ledger(r: f64, branches: usize, reservoir: usize, stem: usize, delta: usize) -> Result<ErrorLedger> {
    check_r(r)?;
    superstar_dims(branches, reservoir, stem)?;
    let (b, l, h) = (branches as f64, reservoir as f64, stem as f64);
    let t = expected_train_length(r, stem)?;
    let e0 = (1.0 + h * b) / (b * l + 1.0 + h * b);
    let e1 = (r - 1.0) / (l + r - 1.0);
    let e2 = 1.0 / (1.0 + b * l * l);
    let e3 = collision_probability_bound(r, reservoir, stem)?;
    let e4_minus = epsilon4_minus(branches, r, stem, delta)?;
    let e4_plus = epsilon4_plus(branches, r, stem)?;
    let gamma = r.powi(4) * t * (1.0 - e1) * (1.0 - e3) * (1.0 - e4_minus) - e2;
    let (e5, e5_log10) = if gamma > 0.0 { epsilon5(gamma, delta, b * l) } else { (f64::NAN, f64::NAN) };
    Ok(ErrorLedger {
        epsilons: Epsilons { e0, e1, e2, e3, e4_minus, e4_plus, e5, e5_log10 },
        gamma,
        delta,
        t,
        valid: gamma > 1.0 && e1 < 1.0 && e3 < 1.0 && e4_minus < 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub r: f64,
    pub branches: usize,
    pub reservoir: usize,
    pub stem: usize,
    pub ledger: ErrorLedger,
    pub lower_finite: f64,
    pub upper_finite: f64,
    pub asymptotic: AsymptoticBounds,
}

/// Finite `(lower, upper)` sandwich for a superstar. Fails with
/// [`Error::InvalidRegime`] when `gamma <= 1`.
pub fn finite_superstar_bounds(r: f64, branches: usize, reservoir: usize, stem: usize, delta: usize) -> Result<(f64, f64)> {
    let rep = bounds_report(r, branches, reservoir, stem, Some(delta))?;
    Ok((rep.lower_finite, rep.upper_finite))
}

/// Full report; `delta` defaults to `floor(sqrt(B))`.
pub fn bounds_report(r: f64, branches: usize, reservoir: usize, stem: usize, delta: Option<usize>) -> Result<BoundsReport> {
    beneficial(r)?;
    let delta = delta.unwrap_or_else(|| default_delta(branches));
    if delta < 1 {
        return invalid("delta must be a positive integer");
    }
    let ledger = error_ledger(r, branches, reservoir, stem, delta)?;
    if !ledger.valid {
        return Err(Error::InvalidRegime { gamma: ledger.gamma });
    }
    let capacity = branches * reservoir;
    if delta >= capacity {
        return invalid(format!("delta = {delta} must be below BL = {capacity}"));
    }
    let eps = &ledger.epsilons;
    let lower_finite = (1.0 - eps.e0) * martingale_absorption(ledger.gamma, delta, capacity)?;
    let b = branches as f64;
    let upper_finite = 1.0 - (b - 1.0) / ((b + r - 1.0) * ledger.t * r.powi(4) * (1.0 + eps.e4_plus) + b - 1.0);
    Ok(BoundsReport {
        r,
        branches,
        reservoir,
        stem,
        ledger,
        lower_finite,
        upper_finite,
        asymptotic: asymptotic_superstar_bounds(r, stem)?,
    })
}

/// Walk on `0..=BL` with bias `gamma` below `delta` and none above, and the
/// martingale `Q` that makes it fair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MartingaleSpec {
    pub gamma: f64,
    pub delta: usize,
    pub capacity: usize,
}

impl MartingaleSpec {
    pub fn new(gamma: f64, delta: usize, capacity: usize) -> Result<Self> {
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(Error::InvalidRegime { gamma });
        }
        if delta < 1 || delta >= capacity {
            return invalid(format!("need 1 <= delta < BL, got delta={delta} BL={capacity}"));
        }
        Ok(Self { gamma, delta, capacity })
    }

    /// Slope of the linear part, `gamma^-delta (1 - gamma)`.
    pub fn slope(&self) -> f64 {
        self.gamma.powf(-(self.delta as f64)) * (1.0 - self.gamma)
    }

    /// Intercept of the linear part, `gamma^-delta (1 - delta(1 - gamma))`.
    pub fn intercept(&self) -> f64 {
        self.gamma.powf(-(self.delta as f64)) * (1.0 - self.delta as f64 * (1.0 - self.gamma))
    }

    pub fn q(&self, k: usize) -> f64 {
        if k < self.delta {
            self.gamma.powf(-(k as f64))
        } else {
            self.slope() * k as f64 + self.intercept()
        }
    }

    pub fn epsilon5(&self) -> f64 {
        epsilon5(self.gamma, self.delta, self.capacity as f64).0
    }

    /// Chance of reaching `BL` before `0` from `1`.
    pub fn absorption(&self) -> f64 {
        (1.0 - 1.0 / self.gamma) / (1.0 + self.epsilon5())
    }
}

/// `(1 - 1/gamma) / (1 + e5)`.
pub fn martingale_absorption(gamma: f64, delta: usize, capacity: usize) -> Result<f64> {
    Ok(MartingaleSpec::new(gamma, delta, capacity)?.absorption())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeleteriousBound {
    /// Bias in favour of the residents, built from fitness `1/r`.
    pub gamma: f64,
    pub delta: usize,
    /// Resident train length `T(1/r, H)`.
    pub t: f64,
    /// `gamma^(1-delta)`; may underflow, see `bound_log10`.
    pub bound: f64,
    pub bound_log10: f64,
    /// `gamma^-delta (gamma-1) / (1 + e5)`, the form before the last relaxation.
    pub tight: f64,
    pub tight_log10: f64,
}

/// Upper bound on the fixation of a deleterious mutant. The resident bias
/// uses `r^-4 T(1/r, H)`; the finite-size corrections to it are left out.
pub fn deleterious_upper_bound(r: f64, branches: usize, reservoir: usize, stem: usize, delta: usize) -> Result<DeleteriousBound> {
    check_r(r)?;
    if r >= 1.0 {
        return invalid(format!("deleterious bound needs r < 1, got {r}"));
    }
    superstar_dims(branches, reservoir, stem)?;
    let inv = 1.0 / r;
    let t = expected_train_length(inv, stem)?;
    let gamma = inv.powi(4) * t;
    let capacity = branches * reservoir;
    if delta < 1 || delta >= capacity {
        return invalid(format!("need 1 <= delta < BL, got delta={delta} BL={capacity}"));
    }
    let lg = gamma.log10();
    let bound_log10 = (1.0 - delta as f64) * lg;
    let (e5, _) = epsilon5(gamma, delta, capacity as f64);
    let tight_log10 = -(delta as f64) * lg + (gamma - 1.0).log10() - e5.ln_1p() / std::f64::consts::LN_10;
    Ok(DeleteriousBound {
        gamma,
        delta,
        t,
        bound: 10f64.powf(bound_log10),
        bound_log10,
        tight: 10f64.powf(tight_log10),
        tight_log10,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn moran_values() {
        assert!(close(moran_fixation(1.0, 10).unwrap(), 0.1, 1e-15));
        assert!(close(moran_fixation(2.0, 6).unwrap(), 32.0 / 63.0, 1e-15));
        assert!(close(moran_fixation_limit(2.0, f64::INFINITY).unwrap(), 0.5, 1e-15));
        assert!(close(moran_fixation(2.0, 10_000).unwrap(), 0.5, 1e-15));
        assert_eq!(moran_fixation(0.5, 100_000).unwrap(), 0.0);
        assert!(close(moran_fixation(0.5, 3).unwrap(), (1.0 - 2.0) / (1.0 - 8.0), 1e-15));
        // continuous through r = 1
        let near = moran_fixation(1.0 + 1e-9, 10).unwrap();
        assert!(close(near, 0.1, 1e-8));
        for (r, n) in [(0.5, 3), (2.0, 6), (1.0, 10), (0.9, 40)] {
            let direct = moran_fixation(r, n).unwrap().log10();
            assert!((moran_fixation_log10(r, n).unwrap() - direct).abs() < 1e-12);
        }
        let tiny = moran_fixation_log10(0.5, 42_001).unwrap();
        assert!((tiny + 42_001.0 * 2f64.log10()).abs() < 1e-6);
        assert!(moran_fixation(0.0, 3).is_err());
        assert!(moran_fixation(2.0, 0).is_err());
    }

    #[test]
    fn star_and_claimed() {
        assert!(close(star_fixation_approx(2.0, 101.0).unwrap(), 0.75, 1e-12));
        assert!(close(star_fixation_approx(1.0, 50.0).unwrap(), 0.02, 1e-15));
        assert!(close(star_fixation_approx(2.0, f64::INFINITY).unwrap(), 0.75, 1e-15));
        assert!(close(claimed_superstar_fixation(2.0, f64::INFINITY, 2).unwrap(), 0.9375, 1e-15));
        assert!(close(claimed_superstar_fixation(2.0, f64::INFINITY, 3).unwrap(), 0.96875, 1e-15));
        assert!(close(claimed_superstar_fixation(1.0, 40.0, 5).unwrap(), 1.0 / 40.0, 1e-15));
        assert!(claimed_superstar_fixation(2.0, 10.0, 1).is_err());
    }

    #[test]
    fn diaz_and_contradiction() {
        assert!(close(diaz_upper_bound_h3(2.0).unwrap(), 1.0 - 3.0 / 67.0, 1e-15));
        assert!(close(diaz_upper_bound_h3(1.0).unwrap(), 0.5, 1e-15));
        assert!(diaz_upper_bound_h3(1e6).unwrap() >= 1.0 - 1e-15);
        let mut r = 1.43;
        while r <= 5.0 {
            let claimed = claimed_superstar_fixation(r, f64::INFINITY, 3).unwrap();
            assert!(claimed > diaz_upper_bound_h3(r).unwrap(), "r={r}");
            r += 0.01;
        }
    }

    #[test]
    fn growth_bias() {
        assert!(close(reservoir_growth_bias(2.0, 2).unwrap(), 16.0 / 17.0, 1e-15));
        assert!(close(reservoir_growth_bias(2.0, 3).unwrap(), 64.0 / 67.0, 1e-15));
        assert!(close(reservoir_growth_bias(2.0, 3).unwrap(), diaz_upper_bound_h3(2.0).unwrap(), 1e-15));
        assert!(reservoir_growth_bias(2.0, 400).unwrap() > reservoir_growth_bias(2.0, 50).unwrap());
        assert!(reservoir_growth_bias(1.0, 3).is_err());
    }

    #[test]
    fn asymptotic_pair() {
        let a = asymptotic_superstar_bounds(2.0, 50).unwrap();
        assert!(close(a.lower, 0.995283, 1e-6) && close(a.upper, 0.995306, 1e-6));
        assert!(a.lower_t_free <= a.lower && a.upper <= a.upper_t_free);
        let a = asymptotic_superstar_bounds(2.0, 2).unwrap();
        assert!(close(a.lower, 15.0 / 16.0, 1e-15) && close(a.upper, 16.0 / 17.0, 1e-15));
        for h in 2..40 {
            for r in [1.1, 2.0, 5.0] {
                let a = asymptotic_superstar_bounds(r, h).unwrap();
                assert!(a.lower < a.upper);
                assert_eq!(a.upper, reservoir_growth_bias(r, h).unwrap());
            }
        }
        assert!(asymptotic_superstar_bounds(0.9, 5).is_err());
    }

    #[test]
    fn ledger_plug_ins() {
        let l = error_ledger(2.0, 5000, 5000, 50, 70).unwrap();
        let e = l.epsilons;
        assert!(close(e.e0, 250_001.0 / 25_250_001.0, 1e-15));
        assert!(close(e.e2, 1.0 / (1.0 + 1.25e11), 1e-25));
        assert!(close(e.e3, 200.0 / 5005.0, 1e-15));
        assert!(close(e.e4_minus, 0.059, 1e-15));
        assert!(e.e5_log10 < -150.0 && e.e5 < 1e-150);
        assert!(l.valid && l.gamma > 1.0);
        assert!(close(default_delta(5000) as f64, 70.0, 0.0));
        assert_eq!(default_delta(100), 10);
        assert_eq!(default_delta(99), 9);
    }

    #[test]
    fn finite_bounds_shape() {
        let (lo, hi) = finite_superstar_bounds(2.0, 5000, 5000, 50, 70).unwrap();
        assert!(close(hi, 0.995375, 1e-6));
        assert!(lo < hi && lo > 0.98);
        // error terms above one make gamma meaningless even if it exceeds one
        let l = error_ledger(1.1, 2, 1, 3, 1).unwrap();
        assert!(l.gamma > 1.0 && !l.valid);
        match bounds_report(1.01, 100, 10, 2, Some(10)) {
            Err(Error::InvalidRegime { gamma }) => assert!(gamma <= 1.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn finite_bounds_converge() {
        let asym = asymptotic_superstar_bounds(2.0, 50).unwrap();
        let mut last = f64::INFINITY;
        for b in [100usize, 1000, 10_000, 100_000] {
            let rep = bounds_report(2.0, b, b, 50, None);
            let gap = match rep {
                Ok(rep) => {
                    assert!(rep.lower_finite <= rep.upper_finite);
                    (rep.lower_finite - asym.lower).abs().max((rep.upper_finite - asym.upper).abs())
                }
                Err(Error::InvalidRegime { .. }) => 1.0,
                Err(e) => panic!("{e}"),
            };
            assert!(gap <= last, "B={b}");
            last = gap;
        }
        assert!(last < 0.02);
    }

    /// Hitting probability of the two-regime walk by a direct tridiagonal solve.
    fn hitting_oracle(gamma: f64, delta: usize, cap: usize) -> f64 {
        // h(0)=0, h(cap)=1, h(k) = a_k h(k+1) + (1-a_k) h(k-1)
        // Thomas algorithm on -(1-a) h(k-1) + h(k) - a h(k+1) = 0
        let n = cap - 1;
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 0..n {
            let k = i + 1;
            let fwd = if k < delta { gamma / (1.0 + gamma) } else { 0.5 };
            let back = 1.0 - fwd;
            let rhs = if k + 1 == cap { fwd } else { 0.0 };
            let (lower, upper) = (-back, -fwd);
            let (cp, dp) = if i == 0 { (0.0, 0.0) } else { (c[i - 1], d[i - 1]) };
            let denom = 1.0 - lower * cp;
            c[i] = upper / denom;
            d[i] = (rhs - lower * dp) / denom;
        }
        let mut h = vec![0.0; n];
        h[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            h[i] = d[i] - c[i] * h[i + 1];
        }
        h[0]
    }

    #[test]
    fn martingale_matches_linear_solve() {
        for (g, d, cap) in [(1.7, 5, 30), (3.0, 1, 12), (1.2, 9, 50), (5.0, 4, 400)] {
            let m = MartingaleSpec::new(g, d, cap).unwrap();
            assert_eq!(m.q(0), 1.0);
            assert!(close(m.q(1), 1.0 / g, 1e-15) || d == 1);
            // the two pieces agree at delta
            assert!(close(m.slope() * d as f64 + m.intercept(), g.powf(-(d as f64)), 1e-14));
            let p = martingale_absorption(g, d, cap).unwrap();
            let via_q = (m.q(1) - m.q(0)) / (m.q(cap) - m.q(0));
            assert!(close(p, via_q, 1e-12));
            assert!(close(p, hitting_oracle(g, d, cap), 1e-12), "{g} {d} {cap}");
        }
        assert!(close(martingale_absorption(212.0, 70, 25_000_000).unwrap(), 1.0 - 1.0 / 212.0, 1e-15));
        assert!(martingale_absorption(1e12, 3, 100).unwrap() > 1.0 - 1e-11);
        assert!(martingale_absorption(1.0, 3, 10).is_err());
        assert!(martingale_absorption(2.0, 10, 10).is_err());
    }

    #[test]
    fn deleterious() {
        let d = deleterious_upper_bound(0.5, 5000, 5000, 50, 70).unwrap();
        assert!(close(d.gamma, 16.0 * expected_train_length(2.0, 50).unwrap(), 1e-9));
        assert!(close(d.bound_log10, -160.5, 0.1), "{}", d.bound_log10);
        assert!(d.tight_log10 <= d.bound_log10);
        let one = deleterious_upper_bound(0.5, 200, 200, 10, 1).unwrap();
        assert!(close(one.bound, 1.0, 1e-15));
        let mut last = f64::INFINITY;
        for delta in 1..40 {
            let b = deleterious_upper_bound(0.5, 200, 200, 10, delta).unwrap();
            assert!(b.bound_log10 < last);
            last = b.bound_log10;
        }
        assert!(deleterious_upper_bound(1.0, 10, 10, 3, 2).is_err());
    }

    #[test]
    fn deterministic() {
        let a = bounds_report(2.0, 5000, 5000, 50, Some(70)).unwrap();
        let b = bounds_report(2.0, 5000, 5000, 50, Some(70)).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
