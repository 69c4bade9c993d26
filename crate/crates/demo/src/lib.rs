//! Browser bindings for `ftrl-delay`. Each export has a plain Rust twin
//! returning JSON so the logic is testable natively.

use ftrl_delay::bench::{self, DelaySpec, ExperimentConfig};
use ftrl_delay::ledger::{DelayLedger, Tuning};
use ftrl_delay::simplex::{solve_distribution, PotentialParams};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest horizon the page may request; keeps a tab responsive.
pub const MAX_ROUNDS: usize = 50_000;
const MAX_POINTS: usize = 400;

#[derive(Serialize)]
struct Solved {
    probs: Vec<f64>,
    multiplier: f64,
    max_residual: f64,
}

/// FTRL distribution for cumulative losses `losses` at round `t`.
pub fn solve_json(losses: &[f64], t: usize, inv_eta: f64) -> ftrl_delay::Result<String> {
    let params = PotentialParams::for_round(t, inv_eta)?;
    let (x, cert) = solve_distribution(losses, params)?;
    Ok(to_json(&Solved { probs: x.probs().to_vec(), multiplier: cert.multiplier, max_residual: cert.max_residual }))
}

#[derive(Serialize)]
struct Curve {
    tuner: Tuning,
    regret: f64,
    final_inv_eta: f64,
    skipped: usize,
    cum_regret: Vec<f64>,
    inv_eta: Vec<f64>,
}

#[derive(Serialize)]
struct Comparison {
    n: usize,
    k: usize,
    total_delay: u64,
    best_arm: usize,
    rounds: Vec<usize>,
    curves: Vec<Curve>,
}

fn sample_points(n: usize) -> Vec<usize> {
    let step = n.div_ceil(MAX_POINTS).max(1);
    let mut rounds: Vec<usize> = (step..=n).step_by(step).collect();
    if rounds.last() != Some(&n) {
        rounds.push(n);
    }
    rounds
}

/// Plays all three tuners on one generated instance and returns regret and
/// `η⁻¹` curves thinned to at most a few hundred points.
pub fn compare_json(n: usize, k: usize, delays: &str, seed: u64) -> ftrl_delay::Result<String> {
    if n > MAX_ROUNDS {
        return Err(ftrl_delay::Error::InvalidArgument(format!("n = {n} exceeds the demo limit {MAX_ROUNDS}")));
    }
    let spec: DelaySpec = delays.parse()?;
    if matches!(spec, DelaySpec::File(_)) {
        return Err(ftrl_delay::Error::InvalidArgument("file instances are not available in the browser".into()));
    }
    let config = ExperimentConfig::generated(n, k, Tuning::Simple, spec, vec![seed])?;
    let instance = config.instance(seed)?;
    let rounds = sample_points(n);
    let mut curves = Vec::new();
    let mut best_arm = 0;
    for tuner in Tuning::ALL {
        let report = bench::play(&instance, tuner, &mut bench::action_rng(seed), |_| {})?;
        best_arm = report.best_arm;
        curves.push(Curve {
            tuner,
            regret: report.regret,
            final_inv_eta: report.final_inv_eta,
            skipped: report.skipped.len(),
            cum_regret: rounds.iter().map(|&t| report.rows[t - 1].cum_regret).collect(),
            inv_eta: rounds.iter().map(|&t| report.rows[t - 1].inv_eta).collect(),
        });
    }
    Ok(to_json(&Comparison { n, k, total_delay: instance.total_delay(), best_arm, rounds, curves }))
}

#[derive(Serialize)]
struct LedgerRow {
    round: usize,
    outstanding: usize,
    truncated: usize,
    simple_inv_eta: f64,
    advanced_inv_eta: f64,
    deactivated: Vec<usize>,
}

/// Round-by-round ledger of both tuners for a hand-written delay list
/// (`delays[t-1]` is the delay of round `t`).
pub fn ledger_json(delays: &[usize], k: usize) -> ftrl_delay::Result<String> {
    let n = delays.len();
    if n > MAX_ROUNDS {
        return Err(ftrl_delay::Error::InvalidArgument(format!("{n} rounds exceed the demo limit {MAX_ROUNDS}")));
    }
    let mut simple = DelayLedger::new(Tuning::Simple, k)?;
    let mut advanced = DelayLedger::new(Tuning::Advanced, k)?;
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    let mut rows = Vec::with_capacity(n);
    for t in 1..=n {
        let arrival = t.checked_add(delays[t - 1]).filter(|&a| a <= n).ok_or_else(|| {
            ftrl_delay::Error::InvalidInstance(format!(
                "round {t} with delay {} arrives after round {n}",
                delays[t - 1]
            ))
        })?;
        let a = simple.begin_round(t)?;
        let b = advanced.begin_round(t)?;
        rows.push(LedgerRow {
            round: t,
            outstanding: a.outstanding,
            truncated: b.outstanding,
            simple_inv_eta: a.inv_eta,
            advanced_inv_eta: b.inv_eta,
            deactivated: b.deactivated,
        });
        simple.register_round(t)?;
        advanced.register_round(t)?;
        due[arrival].push(t);
        for &s in &due[t] {
            simple.record_arrival(s, t)?;
            advanced.record_arrival(s, t)?;
        }
    }
    Ok(to_json(&rows))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("demo payloads always serialize")
}

fn js(e: ftrl_delay::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn solve(losses: Vec<f64>, t: usize, inv_eta: f64) -> Result<String, JsError> {
    solve_json(&losses, t, inv_eta).map_err(js)
}

#[wasm_bindgen]
pub fn compare(n: usize, k: usize, delays: &str, seed: u64) -> Result<String, JsError> {
    compare_json(n, k, delays, seed).map_err(js)
}

#[wasm_bindgen]
pub fn ledger(delays: Vec<usize>, k: usize) -> Result<String, JsError> {
    ledger_json(&delays, k).map_err(js)
}
