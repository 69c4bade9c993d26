//! Oblivious delayed-feedback environment.
//!
//! Losses and delays are materialized before the first round. Playing arm
//! `A_t` at round `t` schedules the tuple `(t, A_t, ℓ_{t,A_t})` for delivery at
//! the end of round `t + d_t`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledger::RoundRate;

/// Format tag written into instance files.
pub const INSTANCE_FORMAT: &str = "ftrl-delay-instance";
pub const INSTANCE_VERSION: u32 = 1;

/// A delivered observation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub origin_round: usize,
    pub arm: usize,
    pub loss: f64,
    pub arrival_round: usize,
}

/// Loss matrix (`n × k`, row `t - 1` is round `t`) and delay schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    n: usize,
    k: usize,
    delays: Vec<usize>,
    losses: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    format: String,
    version: u32,
    #[serde(flatten)]
    instance: Instance,
}

impl Instance {
    pub fn new(losses: Vec<Vec<f64>>, delays: Vec<usize>) -> Result<Self> {
        let n = losses.len();
        let k = losses.first().map_or(0, Vec::len);
        let instance = Self { n, k, delays, losses };
        instance.validate()?;
        Ok(instance)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInstance(msg));
        if self.n == 0 {
            return bad("horizon n must be at least 1".into());
        }
        if self.k < 2 {
            return bad(format!("need at least 2 arms, got {}", self.k));
        }
        if self.losses.len() != self.n || self.delays.len() != self.n {
            return bad(format!("n = {} but {} loss rows and {} delays", self.n, self.losses.len(), self.delays.len()));
        }
        for (i, row) in self.losses.iter().enumerate() {
            if row.len() != self.k {
                return bad(format!("round {} has {} losses, expected {}", i + 1, row.len(), self.k));
            }
            if let Some(l) = row.iter().find(|l| !(0.0..=1.0).contains(*l)) {
                return bad(format!("round {} has loss {l} outside [0, 1]", i + 1));
            }
        }
        for (i, &d) in self.delays.iter().enumerate() {
            let t = i + 1;
            if t + d > self.n {
                return bad(format!("round {t} has delay {d} past the horizon {}", self.n));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn delays(&self) -> &[usize] {
        &self.delays
    }

    pub fn losses(&self) -> &[Vec<f64>] {
        &self.losses
    }

    /// `ℓ_{t,arm}` for 1-indexed `t`.
    pub fn loss(&self, t: usize, arm: usize) -> f64 {
        self.losses[t - 1][arm]
    }

    /// `D = Σ_t d_t`.
    pub fn total_delay(&self) -> u64 {
        self.delays.iter().map(|&d| d as u64).sum()
    }

    /// Cumulative loss of every arm over the whole game.
    pub fn arm_totals(&self) -> Vec<f64> {
        let mut totals = vec![0.0; self.k];
        for row in &self.losses {
            for (acc, l) in totals.iter_mut().zip(row) {
                *acc += l;
            }
        }
        totals
    }

    pub fn to_json(&self) -> Result<String> {
        let file = InstanceFile { format: INSTANCE_FORMAT.into(), version: INSTANCE_VERSION, instance: self.clone() };
        serde_json::to_string_pretty(&file)
            .map_err(|e| Error::Parse { what: "instance".into(), message: e.to_string() })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let parse_err = |message: String| Error::Parse { what: "instance".into(), message };
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
        if file.format != INSTANCE_FORMAT {
            return Err(parse_err(format!("unexpected format tag `{}`", file.format)));
        }
        if file.version != INSTANCE_VERSION {
            return Err(parse_err(format!("unsupported version {}", file.version)));
        }
        file.instance.validate()?;
        Ok(file.instance)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|source| Error::Io { path: path.into(), source })
    }
}

/// `d_t = min(d, n - t)`.
pub fn uniform_delays(n: usize, d: usize) -> Vec<usize> {
    (1..=n).map(|t| d.min(n - t)).collect()
}

/// Length `⌊√(k·n / ln k)⌋` of the long-delay prefix of the unbalanced
/// schedule.
pub fn unbalanced_prefix(n: usize, k: usize) -> usize {
    let m = ((k * n) as f64 / (k as f64).ln()).sqrt().floor() as usize;
    m.min(n)
}

/// `d_t = n - t` on the prefix, zero afterwards.
pub fn unbalanced_delays(n: usize, k: usize) -> Vec<usize> {
    let m = unbalanced_prefix(n, k);
    (1..=n).map(|t| if t <= m { n - t } else { 0 }).collect()
}

pub fn gen_zero(losses: Vec<Vec<f64>>) -> Result<Instance> {
    let n = losses.len();
    Instance::new(losses, vec![0; n])
}

pub fn gen_uniform(d: usize, losses: Vec<Vec<f64>>) -> Result<Instance> {
    let n = losses.len();
    Instance::new(losses, uniform_delays(n, d))
}

pub fn gen_unbalanced(losses: Vec<Vec<f64>>) -> Result<Instance> {
    let n = losses.len();
    let k = losses.first().map_or(0, Vec::len);
    if k < 2 {
        return Err(Error::InvalidInstance(format!("need at least 2 arms, got {k}")));
    }
    Instance::new(losses, unbalanced_delays(n, k))
}

/// Independent Bernoulli losses, `ℓ_{t,i} ~ Bernoulli(means[i])`, drawn row by
/// row and arm by arm.
pub fn gen_stochastic_losses<R: Rng + ?Sized>(n: usize, means: &[f64], rng: &mut R) -> Result<Vec<Vec<f64>>> {
    if let Some(m) = means.iter().find(|m| !(0.0..=1.0).contains(*m)) {
        return Err(Error::InvalidArgument(format!("Bernoulli mean {m} outside [0, 1]")));
    }
    Ok((0..n)
        .map(|_| {
            means
                .iter()
                .map(|&mu| {
                    let u: f64 = rng.gen();
                    if u < mu {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect())
}

/// The running game: records the learner's actions and releases observations
/// when they are due.
#[derive(Debug)]
pub struct DelayedEnv<'a> {
    instance: &'a Instance,
    round: usize,
    queue: BTreeMap<usize, Vec<Observation>>,
    actions: Vec<usize>,
}

impl<'a> DelayedEnv<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        Self { instance, round: 0, queue: BTreeMap::new(), actions: Vec::with_capacity(instance.n()) }
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn actions(&self) -> &[usize] {
        &self.actions
    }

    pub fn is_finished(&self) -> bool {
        self.round == self.instance.n()
    }

    /// Plays `arm` at the next round and returns every observation whose
    /// arrival round is this round, in origin order.
    pub fn step(&mut self, arm: usize) -> Result<Vec<Observation>> {
        if self.is_finished() {
            return Err(Error::HorizonExceeded { n: self.instance.n() });
        }
        if arm >= self.instance.k() {
            return Err(Error::InvalidArgument(format!("arm {arm} out of range for k = {}", self.instance.k())));
        }
        let t = self.round + 1;
        let loss = self.instance.loss(t, arm);
        let arrival_round = t + self.instance.delays()[t - 1];
        self.queue.entry(arrival_round).or_default().push(Observation { origin_round: t, arm, loss, arrival_round });
        self.round = t;
        self.actions.push(arm);
        Ok(self.queue.remove(&t).unwrap_or_default())
    }
}

/// One row of the per-round trace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundRecord {
    pub round: usize,
    pub arm: usize,
    pub loss: f64,
    pub cum_loss: f64,
    /// Regret of the length-`round` prefix game against its best fixed arm.
    pub cum_regret: f64,
    pub inv_eta: f64,
    pub outstanding: usize,
    pub deactivated: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegretReport {
    pub rows: Vec<RoundRecord>,
    /// Lowest-index arm with minimal total loss.
    pub best_arm: usize,
    pub learner_loss: f64,
    pub best_arm_loss: f64,
    /// Pseudo-regret `Σ ℓ_{t,A_t} - min_i Σ ℓ_{t,i}`.
    pub regret: f64,
    pub total_delay: u64,
    /// `𝔇_n` or `𝔇̃_n`, filled in from the ledger.
    pub cumulative_outstanding: u64,
    pub final_inv_eta: f64,
    pub skipped: Vec<usize>,
}

impl RegretReport {
    /// Copies the ledger's per-round decisions into the trace.
    pub fn attach_rates(&mut self, rates: &[RoundRate], skipped: Vec<usize>) -> Result<()> {
        if rates.len() != self.rows.len() {
            return Err(Error::Dimension(format!("{} rates for {} rounds", rates.len(), self.rows.len())));
        }
        for (row, rate) in self.rows.iter_mut().zip(rates) {
            row.inv_eta = rate.inv_eta;
            row.outstanding = rate.outstanding;
            row.deactivated = rate.deactivated.clone();
        }
        if let Some(last) = rates.last() {
            self.cumulative_outstanding = last.cumulative;
            self.final_inv_eta = last.inv_eta;
        }
        self.skipped = skipped;
        Ok(())
    }
}

pub fn compute_regret(instance: &Instance, actions: &[usize]) -> Result<RegretReport> {
    if actions.len() != instance.n() {
        return Err(Error::Dimension(format!("{} actions for horizon {}", actions.len(), instance.n())));
    }
    let k = instance.k();
    let mut arm_cum = vec![0.0; k];
    let mut cum_loss = 0.0;
    let mut rows = Vec::with_capacity(actions.len());
    for (i, (&arm, row)) in actions.iter().zip(instance.losses()).enumerate() {
        if arm >= k {
            return Err(Error::InvalidArgument(format!("arm {arm} out of range for k = {k}")));
        }
        for (acc, l) in arm_cum.iter_mut().zip(row) {
            *acc += l;
        }
        let loss = row[arm];
        cum_loss += loss;
        let best = arm_cum.iter().copied().fold(f64::INFINITY, f64::min);
        rows.push(RoundRecord {
            round: i + 1,
            arm,
            loss,
            cum_loss,
            cum_regret: cum_loss - best,
            inv_eta: 0.0,
            outstanding: 0,
            deactivated: Vec::new(),
        });
    }
    let (best_arm, best_arm_loss) =
        arm_cum
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    Ok(RegretReport {
        rows,
        best_arm,
        learner_loss: cum_loss,
        best_arm_loss,
        regret: cum_loss - best_arm_loss,
        total_delay: instance.total_delay(),
        cumulative_outstanding: 0,
        final_inv_eta: 0.0,
        skipped: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn flat(n: usize, k: usize) -> Vec<Vec<f64>> {
        vec![vec![0.5; k]; n]
    }

    #[test]
    fn zero_delay_returns_own_observation() {
        let inst = gen_zero(flat(5, 2)).unwrap();
        let mut env = DelayedEnv::new(&inst);
        for t in 1..=5 {
            let got = env.step(t % 2).unwrap();
            assert_eq!(got, vec![Observation { origin_round: t, arm: t % 2, loss: 0.5, arrival_round: t }]);
        }
        assert!(matches!(env.step(0), Err(Error::HorizonExceeded { n: 5 })));
    }

    #[test]
    fn delays_two_one_zero() {
        let inst = Instance::new(flat(3, 2), vec![2, 1, 0]).unwrap();
        let mut env = DelayedEnv::new(&inst);
        assert!(env.step(0).unwrap().is_empty());
        assert!(env.step(1).unwrap().is_empty());
        let got: Vec<usize> = env.step(0).unwrap().iter().map(|o| o.origin_round).collect();
        assert_eq!(got, vec![1, 2, 3]);
    }

    #[test]
    fn step_rejects_bad_arm() {
        let inst = gen_zero(flat(2, 2)).unwrap();
        let mut env = DelayedEnv::new(&inst);
        assert!(env.step(2).is_err());
        assert_eq!(env.round(), 0);
    }

    #[test]
    fn uniform_generator_totals() {
        assert_eq!(gen_uniform(0, flat(50, 3)).unwrap().total_delay(), 0);
        assert_eq!(gen_uniform(10, flat(100, 2)).unwrap().total_delay(), 945);
        let clipped = gen_uniform(1_000_000, flat(10, 2)).unwrap();
        assert_eq!(clipped.total_delay(), 45);
        assert_eq!(clipped.delays(), &[9, 8, 7, 6, 5, 4, 3, 2, 1, 0]);
    }

    #[test]
    fn unbalanced_generator() {
        assert_eq!(unbalanced_prefix(10_000, 4), 169);
        let inst = gen_unbalanced(flat(10_000, 4)).unwrap();
        let expected: u64 = (1..=169u64).map(|t| 10_000 - t).sum();
        assert_eq!(inst.total_delay(), expected);
        assert_eq!(inst.delays()[168], 10_000 - 169);
        assert_eq!(inst.delays()[169], 0);
        // prefix covers everything when n is tiny
        assert_eq!(unbalanced_prefix(1, 2), 1);
        assert_eq!(unbalanced_delays(1, 2), vec![0]);
    }

    #[test]
    fn bernoulli_extremes_and_validation() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let zeros = gen_stochastic_losses(20, &[0.0, 0.0], &mut rng).unwrap();
        assert!(zeros.iter().flatten().all(|&l| l == 0.0));
        let ones = gen_stochastic_losses(20, &[1.0, 1.0], &mut rng).unwrap();
        assert!(ones.iter().flatten().all(|&l| l == 1.0));
        assert!(gen_stochastic_losses(5, &[0.5, 1.2], &mut rng).is_err());
        assert!(gen_stochastic_losses(5, &[-0.1, 0.5], &mut rng).is_err());

        let inst = gen_zero(ones).unwrap();
        assert_eq!(compute_regret(&inst, &[1; 20]).unwrap().regret, 0.0);
    }

    #[test]
    fn bernoulli_column_means() {
        let n = 20_000;
        let means = [0.1, 0.4, 0.6, 0.95];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let losses = gen_stochastic_losses(n, &means, &mut rng).unwrap();
        for (i, &mu) in means.iter().enumerate() {
            let mean = losses.iter().map(|r| r[i]).sum::<f64>() / n as f64;
            assert!((mean - mu).abs() <= 3.0 * (mu * (1.0 - mu) / n as f64).sqrt(), "arm {i}: {mean}");
        }
    }

    #[test]
    fn regret_basics() {
        let losses: Vec<Vec<f64>> = vec![vec![0.0, 1.0]; 7];
        let inst = gen_zero(losses).unwrap();
        let r = compute_regret(&inst, &[0; 7]).unwrap();
        assert_eq!((r.regret, r.best_arm), (0.0, 0));
        let r = compute_regret(&inst, &[1; 7]).unwrap();
        assert_eq!(r.regret, 7.0);
        assert_eq!(r.rows.last().unwrap().cum_regret, 7.0);
        assert!(compute_regret(&inst, &[0; 6]).is_err());
        assert!(compute_regret(&inst, &[0, 0, 0, 0, 0, 0, 2]).is_err());
    }

    #[test]
    fn ties_pick_lowest_index() {
        let inst = gen_zero(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let r = compute_regret(&inst, &[0, 0]).unwrap();
        assert_eq!(r.best_arm, 2);
        let inst = gen_zero(vec![vec![0.0, 0.0, 1.0]]).unwrap();
        assert_eq!(compute_regret(&inst, &[2]).unwrap().best_arm, 0);
    }

    #[test]
    fn instance_validation() {
        assert!(Instance::new(vec![], vec![]).is_err());
        assert!(Instance::new(vec![vec![0.5]], vec![0]).is_err());
        assert!(Instance::new(vec![vec![0.5, 1.5]], vec![0]).is_err());
        assert!(Instance::new(vec![vec![0.5, 0.5], vec![0.5]], vec![0, 0]).is_err());
        assert!(Instance::new(vec![vec![0.5, 0.5]; 3], vec![0, 2, 0]).is_err());
        assert!(Instance::new(vec![vec![0.5, 0.5]; 3], vec![0, 0]).is_err());
    }

    #[test]
    fn instance_file_round_trip_and_schema() {
        let inst = Instance::new(vec![vec![0.0, 0.25], vec![1.0, 0.5]], vec![1, 0]).unwrap();
        let text = inst.to_json().unwrap();
        assert!(text.contains("\"format\": \"ftrl-delay-instance\""));
        assert_eq!(Instance::from_json(&text).unwrap(), inst);

        let wrong_version = text.replace("\"version\": 1", "\"version\": 2");
        assert!(Instance::from_json(&wrong_version).is_err());
        let bad_delay =
            r#"{"format":"ftrl-delay-instance","version":1,"n":2,"k":2,"delays":[2,0],"losses":[[0,0],[0,0]]}"#;
        assert!(matches!(Instance::from_json(bad_delay), Err(Error::InvalidInstance(_))));
        let lying_n =
            r#"{"format":"ftrl-delay-instance","version":1,"n":3,"k":2,"delays":[0,0],"losses":[[0,0],[0,0]]}"#;
        assert!(Instance::from_json(lying_n).is_err());
    }
}
