//! Mesh-search reference minimizer for two and three arms.
//!
//! Independent of the multiplier/inversion path in the parent module: it only
//! evaluates the primal objective on lattice points of the simplex. A full
//! lattice at 1e-5 spacing over the 2-simplex has ~5·10⁹ points, so the search
//! is exhaustive at a coarse spacing and then repeatedly zooms into a window
//! around the incumbent at ten times finer spacing. A window whose minimum
//! lands on its edge is recentred and rescanned.

use super::{primal_objective, PotentialParams, SimplexDistribution};
use crate::error::{Error, Result};

const COARSE: f64 = 1e-2;
const HALF_WINDOW: i64 = 60;
const MAX_RECENTRES: usize = 1000;

pub fn grid_oracle(losses: &[f64], params: PotentialParams, resolution: f64) -> Result<SimplexDistribution> {
    let k = losses.len();
    if !(2..=3).contains(&k) {
        return Err(Error::Dimension(format!("grid oracle supports 2 or 3 arms, got {k}")));
    }
    if !(resolution > 0.0 && resolution <= 1e-3) {
        return Err(Error::InvalidArgument(format!("grid resolution must lie in (0, 1e-3], got {resolution}")));
    }
    if losses.iter().any(|l| !l.is_finite()) {
        return Err(Error::NonFinite("losses"));
    }

    let dims = k - 1;
    let objective = |free: &[f64]| -> Option<f64> {
        let mut x = [0.0; 3];
        x[..dims].copy_from_slice(free);
        x[dims] = 1.0 - free.iter().sum::<f64>();
        if x[..k].iter().any(|&v| v <= 0.0) {
            return None;
        }
        Some(primal_objective(&x[..k], losses, params))
    };

    // exhaustive pass on the coarse lattice
    let mut spacing = COARSE;
    let steps = (1.0 / spacing).round() as i64;
    let mut best: Option<([f64; 2], f64)> = None;
    for i in 1..steps {
        let jmax = if dims == 1 { 1 } else { steps - i };
        for j in 0..jmax {
            let free = [i as f64 * spacing, j as f64 * spacing];
            if let Some(v) = objective(&free[..dims]) {
                if best.is_none_or(|(_, b)| v < b) {
                    best = Some((free, v));
                }
            }
        }
    }
    let (mut center, mut center_value) = best.ok_or_else(|| Error::InvalidArgument("empty coarse lattice".into()))?;

    while spacing > resolution {
        spacing = (spacing / 10.0).max(resolution);
        let mut recentres = 0;
        loop {
            let (arg, value, on_edge) = scan_window(center, spacing, dims, &objective);
            let improved = value < center_value;
            if improved {
                center = arg;
                center_value = value;
            }
            if !(improved && on_edge) {
                break;
            }
            recentres += 1;
            if recentres > MAX_RECENTRES {
                return Err(Error::NonConvergence { what: "grid oracle", iterations: MAX_RECENTRES });
            }
        }
    }

    let mut probs = center[..dims].to_vec();
    probs.push(1.0 - center[..dims].iter().sum::<f64>());
    SimplexDistribution::new(probs)
}

/// Minimizes over `center + spacing·(i, j)`, `|i|, |j| ≤ HALF_WINDOW`.
/// Also reports whether the minimizer sits on the window edge.
fn scan_window(
    center: [f64; 2],
    spacing: f64,
    dims: usize,
    objective: &impl Fn(&[f64]) -> Option<f64>,
) -> ([f64; 2], f64, bool) {
    let mut best = (center, f64::INFINITY, false);
    let js: Vec<i64> = if dims == 1 { vec![0] } else { (-HALF_WINDOW..=HALF_WINDOW).collect() };
    for i in -HALF_WINDOW..=HALF_WINDOW {
        for &j in &js {
            let free = [center[0] + i as f64 * spacing, center[1] + j as f64 * spacing];
            if let Some(v) = objective(&free[..dims]) {
                if v < best.1 {
                    let edge = i.abs() == HALF_WINDOW || j.abs() == HALF_WINDOW;
                    best = (free, v, edge);
                }
            }
        }
    }
    best
}
