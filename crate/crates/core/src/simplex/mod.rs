//! FTRL play distribution for the hybrid regularizer
//!
//! The regularizer at round `t` is separable, `F_t(x) = Σ f_t(x_i)` with
//!
//! ```text
//! f_t(x) = -2·w·√x + η⁻¹·x·ln x,     w = √t
//! ```
//!
//! and the play distribution is `argmin_{x ∈ Δ} ⟨x, L⟩ + F_t(x)`. At the
//! minimizer every coordinate satisfies `f_t'(x_i) = c - L_i` for one scalar
//! multiplier `c`, so the solve reduces to inverting `f_t'` per coordinate and
//! a one dimensional root-find on `c` for normalization.

mod oracle;

pub use oracle::grid_oracle;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Accuracy of a single inversion of `f_t'`, relative to `max(1, |y|)`.
pub const INVERSION_TOL: f64 = 1e-12;
/// Maximum allowed `|Σ x_i - 1|` of a returned distribution.
pub const NORMALIZATION_TOL: f64 = 1e-10;
/// Maximum allowed KKT residual of a returned distribution, relative to
/// `max(1, max_i |c - L_i|)` (the scale of the inverted derivative values).
pub const CERTIFICATE_TOL: f64 = 1e-8;

/// Accepted deviation from 1 when wrapping externally produced probabilities.
const DISTRIBUTION_SUM_TOL: f64 = 1e-9;
const MAX_ITERATIONS: usize = 200;
// the multiplier search stops well inside NORMALIZATION_TOL
const SUM_TARGET: f64 = 1e-13;

/// Coefficients of the per-coordinate potential `f_t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    weight: f64,
    inv_eta: f64,
}

impl PotentialParams {
    pub fn new(weight: f64, inv_eta: f64) -> Result<Self> {
        let valid =
            weight.is_finite() && inv_eta.is_finite() && weight >= 0.0 && inv_eta >= 0.0 && weight + inv_eta > 0.0;
        if !valid {
            return Err(Error::InvalidParams { weight, inv_eta });
        }
        Ok(Self { weight, inv_eta })
    }

    /// Parameters used at (1-indexed) round `t`: Tsallis weight `√t`.
    pub fn for_round(t: usize, inv_eta: f64) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidArgument("rounds are 1-indexed".into()));
        }
        Self::new((t as f64).sqrt(), inv_eta)
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn inv_eta(&self) -> f64 {
        self.inv_eta
    }

    /// `f_t(x)`, with the `x ln x` term continuously extended to 0 at `x = 0`.
    pub fn value(&self, x: f64) -> f64 {
        let tsallis = -2.0 * self.weight * x.sqrt();
        if x == 0.0 || self.inv_eta == 0.0 {
            tsallis
        } else {
            tsallis + self.inv_eta * x * x.ln()
        }
    }

    /// `f_t'(x) = -w·x^{-1/2} + η⁻¹·(ln x + 1)`.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn derivative(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(x));
        }
        Ok(self.derivative_unchecked(x))
    }

    fn derivative_unchecked(&self, x: f64) -> f64 {
        let mut d = 0.0;
        if self.weight > 0.0 {
            d -= self.weight / x.sqrt();
        }
        if self.inv_eta > 0.0 {
            d += self.inv_eta * (x.ln() + 1.0);
        }
        d
    }

    /// `f_t''(x) = ½·w·x^{-3/2} + η⁻¹/x`, always positive.
    pub fn second_derivative(&self, x: f64) -> f64 {
        0.5 * self.weight * x.powf(-1.5) + self.inv_eta / x
    }

    /// Solves `f_t'(x) = y` for `x > 0`.
    ///
    /// Pure Tsallis (`η⁻¹ = 0`) uses the closed form `(w / -y)²`. Otherwise a
    /// safeguarded Newton iteration runs on `u = ln x`: the map `u ↦ f_t'(e^u)`
    /// is increasing and concave, so a bracket is grown around the initial
    /// guess and Newton steps leaving it are replaced by bisection.
    pub fn invert_derivative(&self, y: f64) -> Result<f64> {
        if !y.is_finite() {
            return Err(Error::NonFinite("derivative target"));
        }
        if self.inv_eta == 0.0 {
            if y >= 0.0 {
                return Err(Error::Range(y));
            }
            let x = (self.weight / -y).powi(2);
            return if x > 0.0 { Ok(x) } else { Err(Error::Underflow { arm: 0 }) };
        }

        let tol = INVERSION_TOL * y.abs().max(1.0);
        // evaluated in log space so that roots beyond f64 range still bracket
        let residual = |u: f64| {
            let tsallis = if self.weight > 0.0 { -self.weight * (-0.5 * u).exp() } else { 0.0 };
            tsallis + self.inv_eta * (u + 1.0) - y
        };
        let slope = |u: f64| 0.5 * self.weight * (-0.5 * u).exp() + self.inv_eta;

        let guess = if self.weight > 0.0 && y < 0.0 { 2.0 * (self.weight / -y).ln() } else { y / self.inv_eta - 1.0 };
        let (mut lo, mut hi) = bracket_log_root(guess, &residual)?;
        let mut u = guess.clamp(lo, hi);

        for _ in 0..MAX_ITERATIONS {
            let h = residual(u);
            if h.abs() <= tol {
                return finish_inversion(u);
            }
            if h < 0.0 {
                lo = u;
            } else {
                hi = u;
            }
            // bracket collapsed to adjacent floats: this is as close as f64 gets
            if hi - lo <= 4.0 * f64::EPSILON * u.abs().max(1.0) {
                return finish_inversion(u);
            }
            let step = u - h / slope(u);
            u = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
        }
        Err(Error::NonConvergence { what: "derivative inversion", iterations: MAX_ITERATIONS })
    }
}

fn finish_inversion(u: f64) -> Result<f64> {
    let x = u.exp();
    if x == 0.0 {
        Err(Error::Underflow { arm: 0 })
    } else if !x.is_finite() {
        Err(Error::NonFinite("inverse overflows f64"))
    } else {
        Ok(x)
    }
}

/// Grows a bracket `[lo, hi]` in log space with `h(lo) < 0 ≤ h(hi)`.
fn bracket_log_root(start: f64, h: &impl Fn(f64) -> f64) -> Result<(f64, f64)> {
    let h0 = h(start);
    let mut width = 1.0;
    for _ in 0..MAX_ITERATIONS {
        if h0 < 0.0 {
            let hi = start + width;
            if h(hi) >= 0.0 {
                return Ok((start, hi));
            }
        } else {
            let lo = start - width;
            if h(lo) < 0.0 {
                return Ok((lo, start));
            }
        }
        width *= 2.0;
    }
    Err(Error::NonConvergence { what: "derivative bracket", iterations: MAX_ITERATIONS })
}

/// A strictly positive probability vector over `k ≥ 2` arms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplexDistribution {
    probs: Vec<f64>,
}

impl SimplexDistribution {
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::Dimension(format!("need at least 2 arms, got {}", probs.len())));
        }
        if let Some(arm) = probs.iter().position(|&p| !(p > 0.0) || !p.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "probability of arm {arm} is {}, must be positive",
                probs[arm]
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > DISTRIBUTION_SUM_TOL {
            return Err(Error::InvalidArgument(format!("probabilities sum to {total}")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        Self::new(vec![1.0 / k as f64; k])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn k(&self) -> usize {
        self.probs.len()
    }

    /// Inverse-CDF draw over arms in index order for a uniform `u ∈ [0, 1)`.
    pub fn sample(&self, u: f64) -> usize {
        let mut cumulative = 0.0;
        for (arm, &p) in self.probs.iter().enumerate() {
            cumulative += p;
            if u < cumulative {
                return arm;
            }
        }
        // rounding left the total just under u
        self.probs.len() - 1
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Evidence that a distribution satisfies the simplex-constrained optimality
/// conditions: `f_t'(x_i) + L_i = multiplier` for every arm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KktCertificate {
    pub multiplier: f64,
    pub max_residual: f64,
}

pub fn potential_derivative(x: f64, params: PotentialParams) -> Result<f64> {
    params.derivative(x)
}

pub fn invert_derivative(y: f64, params: PotentialParams) -> Result<f64> {
    params.invert_derivative(y)
}

/// Computes `argmin_{x ∈ Δ} ⟨x, losses⟩ + F_t(x)` together with its KKT
/// certificate.
///
/// Losses are shifted so their minimum is zero before solving; the solution is
/// invariant under constant shifts, and the shift keeps magnitudes bounded as
/// cumulative losses grow. The multiplier `c` is bracketed analytically: at
/// `c = f'(1/k)` every coordinate is at most `1/k`, and at `c = f'(1)` the
/// best arm alone has mass one.
pub fn solve_distribution(losses: &[f64], params: PotentialParams) -> Result<(SimplexDistribution, KktCertificate)> {
    let k = losses.len();
    if k < 2 {
        return Err(Error::Dimension(format!("need at least 2 arms, got {k}")));
    }
    if losses.iter().any(|l| !l.is_finite()) {
        return Err(Error::NonFinite("losses"));
    }
    let offset = losses.iter().copied().fold(f64::INFINITY, f64::min);
    let shifted: Vec<f64> = losses.iter().map(|l| l - offset).collect();

    let mut probs = vec![0.0; k];
    let evaluate = |c: f64, probs: &mut [f64]| -> Result<(f64, f64)> {
        let mut total = 0.0;
        let mut slope = 0.0;
        for (arm, (x, &l)) in probs.iter_mut().zip(&shifted).enumerate() {
            *x = params.invert_derivative(c - l).map_err(|e| match e {
                Error::Underflow { .. } => Error::Underflow { arm },
                other => other,
            })?;
            total += *x;
            slope += 1.0 / params.second_derivative(*x);
        }
        Ok((total - 1.0, slope))
    };

    let mut lo = params.derivative_unchecked(1.0 / k as f64);
    let mut hi = params.derivative_unchecked(1.0);
    // the sum is convex and increasing in c, so Newton from the right stays right
    let mut c = hi;
    let mut best: Option<(f64, f64)> = None;
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let (excess, slope) = evaluate(c, &mut probs)?;
        if best.is_none_or(|(_, e)| excess.abs() < e.abs()) {
            best = Some((c, excess));
        }
        if excess.abs() <= SUM_TARGET {
            converged = true;
            break;
        }
        if excess < 0.0 {
            lo = c;
        } else {
            hi = c;
        }
        if hi - lo <= 4.0 * f64::EPSILON * c.abs().max(1.0) {
            converged = true;
            break;
        }
        let step = c - excess / slope;
        c = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
    }
    if !converged {
        return Err(Error::NonConvergence { what: "normalization multiplier", iterations: MAX_ITERATIONS });
    }
    let (c, excess) = best.expect("at least one evaluation");
    if excess.abs() > NORMALIZATION_TOL {
        return Err(Error::NonConvergence { what: "normalization multiplier", iterations: MAX_ITERATIONS });
    }
    evaluate(c, &mut probs)?;

    let max_residual =
        probs.iter().zip(&shifted).map(|(&x, &l)| (params.derivative_unchecked(x) + l - c).abs()).fold(0.0, f64::max);
    let scale = shifted.iter().map(|l| (c - l).abs()).fold(1.0, f64::max);
    let certificate = KktCertificate { multiplier: c + offset, max_residual };
    if max_residual > CERTIFICATE_TOL * scale {
        return Err(Error::NonConvergence { what: "KKT certificate", iterations: MAX_ITERATIONS });
    }
    Ok((SimplexDistribution { probs }, certificate))
}

/// `⟨x, losses⟩ + F_t(x)`.
pub fn objective_value(x: &SimplexDistribution, losses: &[f64], params: PotentialParams) -> Result<f64> {
    if x.k() != losses.len() {
        return Err(Error::Dimension(format!("distribution has {} arms, losses have {}", x.k(), losses.len())));
    }
    Ok(primal_objective(x.probs(), losses, params))
}

pub(crate) fn primal_objective(x: &[f64], losses: &[f64], params: PotentialParams) -> f64 {
    x.iter().zip(losses).map(|(&xi, &li)| xi * li + params.value(xi)).sum()
}
