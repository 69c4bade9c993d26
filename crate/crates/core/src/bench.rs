//! Experiment runner behind the `ftrl-bench` binary.
//!
//! A run plays one game per seed. Each seed drives two independent ChaCha8
//! streams: stream 0 draws the oblivious loss matrix, stream 1 the learner's
//! actions. Results depend only on `(config, seed)`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env::{self, compute_regret, DelayedEnv, Instance, RegretReport};
use crate::error::{Error, Result};
use crate::ledger::Tuning;
use crate::policy::{ActionSample, FtrlPolicy};

/// The only generator the runner speaks.
pub const GENERATOR_ID: &str = "chacha8";
const LOSS_STREAM: u64 = 0;
const ACTION_STREAM: u64 = 1;

pub const CSV_HEADER: &str = "round,arm,loss,cum_loss,cum_regret,inv_eta,outstanding,deactivated_round";

/// Where the delay schedule comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DelaySpec {
    Zero,
    Uniform(usize),
    Unbalanced,
    /// Full instance (losses and delays) read from a file.
    File(PathBuf),
}

impl FromStr for DelaySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("unknown delay generator `{s}`"));
        match s.split_once(':') {
            None if s == "zero" => Ok(DelaySpec::Zero),
            None if s == "unbalanced" => Ok(DelaySpec::Unbalanced),
            Some(("uniform", d)) => d.trim().parse().map(DelaySpec::Uniform).map_err(|_| bad()),
            Some(("file", path)) if !path.is_empty() => Ok(DelaySpec::File(path.into())),
            _ => Err(bad()),
        }
    }
}

impl std::fmt::Display for DelaySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DelaySpec::Zero => f.write_str("zero"),
            DelaySpec::Uniform(d) => write!(f, "uniform:{d}"),
            DelaySpec::Unbalanced => f.write_str("unbalanced"),
            DelaySpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// Parses `--seeds`: a bare count `N` means seeds `0..N`, a comma list is
/// taken literally.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::InvalidConfig(format!("cannot parse seeds `{s}`"));
    if s.contains(',') {
        s.split(',').filter(|p| !p.trim().is_empty()).map(|p| p.trim().parse().map_err(|_| bad())).collect()
    } else {
        let count: u64 = s.trim().parse().map_err(|_| bad())?;
        Ok((0..count).collect())
    }
}

pub fn parse_means(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| p.trim().parse().map_err(|_| Error::InvalidConfig(format!("cannot parse means `{s}`"))))
        .collect()
}

/// Default Bernoulli means: arm 0 at 0.4, every other arm at 0.6.
pub fn default_means(k: usize) -> Vec<f64> {
    (0..k).map(|i| if i == 0 { 0.4 } else { 0.6 }).collect()
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k: usize,
    pub tuner: Tuning,
    pub delays: DelaySpec,
    pub means: Vec<f64>,
    pub seeds: Vec<u64>,
    pub generator: String,
    pub out_dir: Option<PathBuf>,
    pub check_bounds: bool,
    // loaded once when `delays` is a file
    file_instance: Option<Instance>,
}

/// On-disk (TOML) form of a config; every field optional so command-line
/// flags can fill the gaps.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub tuner: Option<String>,
    pub delay_gen: Option<String>,
    pub means: Option<Vec<f64>>,
    pub seeds: Option<SeedsField>,
    pub generator: Option<String>,
    pub out: Option<PathBuf>,
    pub check_bounds: Option<bool>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum SeedsField {
    Count(u64),
    List(Vec<u64>),
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
        toml::from_str(&text).map_err(|e| Error::Parse { what: path.display().to_string(), message: e.to_string() })
    }

    /// Overlays `other` on top of `self`.
    pub fn merge(self, other: ConfigFile) -> ConfigFile {
        ConfigFile {
            n: other.n.or(self.n),
            k: other.k.or(self.k),
            tuner: other.tuner.or(self.tuner),
            delay_gen: other.delay_gen.or(self.delay_gen),
            means: other.means.or(self.means),
            seeds: other.seeds.or(self.seeds),
            generator: other.generator.or(self.generator),
            out: other.out.or(self.out),
            check_bounds: other.check_bounds.or(self.check_bounds),
        }
    }

    pub fn into_config(self) -> Result<ExperimentConfig> {
        let tuner = self.tuner.as_deref().unwrap_or("simple").parse()?;
        let delays = self.delay_gen.as_deref().unwrap_or("zero").parse()?;
        let seeds = match self.seeds {
            None => vec![0],
            Some(SeedsField::Count(c)) => (0..c).collect(),
            Some(SeedsField::List(l)) => l,
        };
        ExperimentConfig::new(ExperimentConfig {
            n: self.n.unwrap_or(0),
            k: self.k.unwrap_or(0),
            tuner,
            delays,
            means: self.means.unwrap_or_default(),
            seeds,
            generator: self.generator.unwrap_or_else(|| GENERATOR_ID.into()),
            out_dir: self.out,
            check_bounds: self.check_bounds.unwrap_or(false),
            file_instance: None,
        })
    }
}

impl ExperimentConfig {
    /// Config for a generated instance with default means and seed list.
    pub fn generated(n: usize, k: usize, tuner: Tuning, delays: DelaySpec, seeds: Vec<u64>) -> Result<Self> {
        Self::new(Self {
            n,
            k,
            tuner,
            delays,
            means: Vec::new(),
            seeds,
            generator: GENERATOR_ID.into(),
            out_dir: None,
            check_bounds: false,
            file_instance: None,
        })
    }

    /// Validates the fields, loads file instances and fills defaults: `n` and
    /// `k` from a file instance when zero, means from [`default_means`] when
    /// empty.
    pub fn new(mut config: Self) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if config.generator != GENERATOR_ID {
            return bad(format!("unsupported generator `{}`, only `{GENERATOR_ID}`", config.generator));
        }
        if config.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if let DelaySpec::File(path) = &config.delays {
            let instance = Instance::load(path)?;
            if config.n != 0 && config.n != instance.n() {
                return bad(format!("n = {} but the instance file has n = {}", config.n, instance.n()));
            }
            if config.k != 0 && config.k != instance.k() {
                return bad(format!("k = {} but the instance file has k = {}", config.k, instance.k()));
            }
            if !config.means.is_empty() {
                return bad("means cannot be combined with a file instance".into());
            }
            config.n = instance.n();
            config.k = instance.k();
            config.file_instance = Some(instance);
        } else {
            if config.means.is_empty() {
                config.means = default_means(config.k);
            }
            if config.means.len() != config.k {
                return bad(format!("{} means given for k = {}", config.means.len(), config.k));
            }
            if config.means.iter().any(|m| !(0.0..=1.0).contains(m)) {
                return bad("means must lie in [0, 1]".into());
            }
        }
        if config.k < 2 {
            return bad(format!("k must be at least 2, got {}", config.k));
        }
        if config.n < 1 {
            return bad("n must be at least 1".into());
        }
        Ok(config)
    }

    pub fn with_tuner(&self, tuner: Tuning) -> Self {
        Self { tuner, ..self.clone() }
    }

    pub fn with_means(mut self, means: Vec<f64>) -> Result<Self> {
        self.means = means;
        Self::new(self)
    }

    /// The oblivious instance played under `seed`.
    pub fn instance(&self, seed: u64) -> Result<Instance> {
        if let Some(instance) = &self.file_instance {
            return Ok(instance.clone());
        }
        let mut rng = stream(seed, LOSS_STREAM);
        let losses = env::gen_stochastic_losses(self.n, &self.means, &mut rng)?;
        match self.delays {
            DelaySpec::Zero => env::gen_zero(losses),
            DelaySpec::Uniform(d) => env::gen_uniform(d, losses),
            DelaySpec::Unbalanced => env::gen_unbalanced(losses),
            DelaySpec::File(_) => unreachable!("file instances are loaded in ExperimentConfig::new"),
        }
    }
}

fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generator for the learner's draws under `seed`.
pub fn action_rng(seed: u64) -> ChaCha8Rng {
    stream(seed, ACTION_STREAM)
}

/// Plays one full game and returns its trace. `observer` sees every action
/// sample as it is drawn.
pub fn play(
    instance: &Instance,
    tuning: Tuning,
    rng: &mut ChaCha8Rng,
    mut observer: impl FnMut(&ActionSample),
) -> Result<RegretReport> {
    let mut policy = FtrlPolicy::new(instance.k(), tuning)?;
    let mut game = DelayedEnv::new(instance);
    let mut rates = Vec::with_capacity(instance.n());
    for t in 1..=instance.n() {
        let sample = policy.act(rng)?;
        observer(&sample);
        rates.push(policy.last_rate().cloned().expect("rate recorded by act"));
        let delivered = game.step(sample.arm)?;
        policy.ingest(t, &delivered)?;
    }
    let mut report = compute_regret(instance, game.actions())?;
    report.attach_rates(&rates, policy.ledger().skipped_set())?;
    Ok(report)
}

pub fn run_seed(config: &ExperimentConfig, seed: u64) -> Result<RegretReport> {
    let instance = config.instance(seed)?;
    play(&instance, config.tuner, &mut action_rng(seed), |_| {})
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub regret: f64,
    pub learner_loss: f64,
    pub best_arm: usize,
    pub total_delay: u64,
    pub cumulative_outstanding: u64,
    pub final_inv_eta: f64,
    pub skipped: Vec<usize>,
    /// `D_S̄ = Σ_{t ∉ S} d_t` for this seed's skip set.
    pub unskipped_delay: u64,
    pub max_deactivations_per_round: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub tuner: Tuning,
    pub generator: String,
    pub delay_gen: String,
    pub n: usize,
    pub k: usize,
    pub mean_regret: f64,
    /// Sample standard deviation across seeds (zero for a single seed).
    pub std_regret: f64,
    pub seeds: Vec<SeedSummary>,
    pub bounds: Option<BoundCheck>,
}

pub struct Experiment {
    pub config: ExperimentConfig,
    /// One report per seed, in config seed order.
    pub reports: Vec<(u64, RegretReport)>,
    pub summary: Summary,
}

/// Runs every seed (in parallel with the `parallel` feature) and
/// summarizes. Bounds are checked when the config asks for it.
pub fn run(config: &ExperimentConfig) -> Result<Experiment> {
    let one = |&seed: &u64| run_seed(config, seed).map(|r| (seed, r));
    #[cfg(feature = "parallel")]
    let reports: Vec<(u64, RegretReport)> = {
        use rayon::prelude::*;
        config.seeds.par_iter().map(one).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let reports: Vec<(u64, RegretReport)> = config.seeds.iter().map(one).collect::<Result<_>>()?;

    let reference = config.instance(config.seeds[0])?;
    let mut summary = summarize(config, &reference, &reports);
    if config.check_bounds {
        summary.bounds = Some(check_bounds(&summary, &reference));
    }
    Ok(Experiment { config: config.clone(), reports, summary })
}

fn summarize(config: &ExperimentConfig, instance: &Instance, reports: &[(u64, RegretReport)]) -> Summary {
    let seeds: Vec<SeedSummary> = reports
        .iter()
        .map(|(seed, r)| SeedSummary {
            seed: *seed,
            regret: r.regret,
            learner_loss: r.learner_loss,
            best_arm: r.best_arm,
            total_delay: r.total_delay,
            cumulative_outstanding: r.cumulative_outstanding,
            final_inv_eta: r.final_inv_eta,
            skipped: r.skipped.clone(),
            unskipped_delay: unskipped_delay(instance.delays(), &r.skipped),
            max_deactivations_per_round: r.rows.iter().map(|row| row.deactivated.len()).max().unwrap_or(0),
        })
        .collect();
    let (mean_regret, std_regret) = mean_std(seeds.iter().map(|s| s.regret));
    Summary {
        tuner: config.tuner,
        generator: config.generator.clone(),
        delay_gen: config.delays.to_string(),
        n: config.n,
        k: config.k,
        mean_regret,
        std_regret,
        seeds,
        bounds: None,
    }
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let count = values.clone().count();
    if count == 0 {
        return (0.0, 0.0);
    }
    let mean = values.clone().sum::<f64>() / count as f64;
    if count == 1 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
    (mean, var.sqrt())
}

/// `Σ_{t ∉ skipped} d_t` (1-indexed rounds).
pub fn unskipped_delay(delays: &[usize], skipped: &[usize]) -> u64 {
    let skipped_total: u64 = skipped.iter().map(|&s| delays[s - 1] as u64).sum();
    delays.iter().map(|&d| d as u64).sum::<u64>() - skipped_total
}

/// `4√(kn) + √(8·D·ln k)`.
pub fn delay_bound(k: usize, n: usize, total_delay: u64) -> f64 {
    4.0 * ((k * n) as f64).sqrt() + (8.0 * total_delay as f64 * (k as f64).ln()).sqrt()
}

/// `4√(kn) + 10·max{|S| + √(D_S̄·ln k), 2·ln k}` for one candidate set `S`.
pub fn skipping_bound(k: usize, n: usize, skipped: usize, unskipped_delay: u64) -> f64 {
    let log_k = (k as f64).ln();
    let candidate = skipped as f64 + (unskipped_delay as f64 * log_k).sqrt();
    4.0 * ((k * n) as f64).sqrt() + 10.0 * candidate.max(2.0 * log_k)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub mean_regret: f64,
    pub total_delay: u64,
    pub delay_bound: f64,
    pub delay_margin: f64,
    /// `None` when the bound does not cover the tuner that was run.
    pub delay_pass: Option<bool>,
    /// Smallest skip-set candidate `|S| + √(D_S̄·ln k)` among the seeds.
    pub skipping_candidate: f64,
    pub skipping_bound: f64,
    pub skipping_margin: f64,
    pub skipping_pass: Option<bool>,
}

impl BoundCheck {
    /// False only when an applicable bound was violated.
    pub fn passed(&self) -> bool {
        self.delay_pass != Some(false) && self.skipping_pass != Some(false)
    }
}

/// Evaluates both regret bounds from the instance's true delays. The second
/// bound minimizes over every seed's realized skip set (the empty set when
/// the tuner never skips).
///
/// The first bound covers the simple tuner, and the baseline when `D = 0`
/// (it then plays identically); the second covers the advanced tuner.
pub fn check_bounds(summary: &Summary, instance: &Instance) -> BoundCheck {
    let (k, n) = (instance.k(), instance.n());
    let total_delay = instance.total_delay();
    let delay_bound = delay_bound(k, n, total_delay);

    let log_k = (k as f64).ln();
    let candidates = summary.seeds.iter().map(|s| (s.skipped.len(), unskipped_delay(instance.delays(), &s.skipped)));
    let (skipped, rest) = candidates
        .min_by(|a, b| {
            let va = a.0 as f64 + (a.1 as f64 * log_k).sqrt();
            let vb = b.0 as f64 + (b.1 as f64 * log_k).sqrt();
            va.total_cmp(&vb)
        })
        .unwrap_or((0, total_delay));
    let skipping_candidate = skipped as f64 + (rest as f64 * log_k).sqrt();
    let skipping_bound = skipping_bound(k, n, skipped, rest);

    let mean = summary.mean_regret;
    let delay_applies = match summary.tuner {
        Tuning::Simple => true,
        Tuning::Tsallis => total_delay == 0,
        Tuning::Advanced => false,
    };
    let skipping_applies = summary.tuner == Tuning::Advanced;
    BoundCheck {
        mean_regret: mean,
        total_delay,
        delay_bound,
        delay_margin: delay_bound - mean,
        delay_pass: delay_applies.then_some(mean <= delay_bound),
        skipping_candidate,
        skipping_bound,
        skipping_margin: skipping_bound - mean,
        skipping_pass: skipping_applies.then_some(mean <= skipping_bound),
    }
}

/// Renders a report in the fixed CSV schema.
pub fn report_csv(report: &RegretReport) -> String {
    let mut out = String::with_capacity(48 * (report.rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &report.rows {
        let deactivated = row.deactivated.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(";");
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            row.round, row.arm, row.loss, row.cum_loss, row.cum_regret, row.inv_eta, row.outstanding, deactivated
        )
        .expect("writing to a String");
    }
    out
}

pub fn summary_json(summary: &Summary) -> String {
    serde_json::to_string_pretty(summary).expect("summary is always serializable")
}

/// Writes `seed_<seed>.csv` per seed and `summary.json` into `dir`.
pub fn write_outputs(experiment: &Experiment, dir: &Path) -> Result<()> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    for (seed, report) in &experiment.reports {
        let path = dir.join(format!("seed_{seed}.csv"));
        fs::write(&path, report_csv(report)).map_err(io(&path))?;
    }
    let path = dir.join("summary.json");
    let mut file = fs::File::create(&path).map_err(io(&path))?;
    file.write_all(summary_json(&experiment.summary).as_bytes()).map_err(io(&path))?;
    file.write_all(b"\n").map_err(io(&path))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delay_spec_parsing() {
        assert_eq!("zero".parse::<DelaySpec>().unwrap(), DelaySpec::Zero);
        assert_eq!("uniform:25".parse::<DelaySpec>().unwrap(), DelaySpec::Uniform(25));
        assert_eq!("unbalanced".parse::<DelaySpec>().unwrap(), DelaySpec::Unbalanced);
        assert_eq!("file:a/b.json".parse::<DelaySpec>().unwrap(), DelaySpec::File("a/b.json".into()));
        for bad in ["uniform", "uniform:x", "file:", "poisson:3", ""] {
            assert!(bad.parse::<DelaySpec>().is_err(), "{bad}");
        }
        assert_eq!(DelaySpec::Uniform(7).to_string(), "uniform:7");
    }

    #[test]
    fn seeds_parsing() {
        assert_eq!(parse_seeds("3").unwrap(), vec![0, 1, 2]);
        assert_eq!(parse_seeds("5,9,2").unwrap(), vec![5, 9, 2]);
        assert_eq!(parse_seeds("7,").unwrap(), vec![7]);
        assert!(parse_seeds("x").is_err());
        assert_eq!(parse_means("0.4, 0.6").unwrap(), vec![0.4, 0.6]);
        assert!(parse_means("0.4,a").is_err());
    }

    #[test]
    fn bound_formulas() {
        assert_eq!(delay_bound(4, 100, 0), 4.0 * 20.0);
        // 4·√80000 + √(8·499675·ln 4), mpmath
        assert!((delay_bound(4, 20_000, 499_675) - 3_485.425_454_010_422).abs() < 1e-9);
        let log4 = 4f64.ln();
        assert_eq!(skipping_bound(4, 100, 0, 0), 80.0 + 10.0 * 2.0 * log4);
        assert!((skipping_bound(4, 100, 3, 400) - (80.0 + 10.0 * (3.0 + (400.0 * log4).sqrt()))).abs() < 1e-12);
        assert_eq!(unskipped_delay(&[5, 0, 3, 1], &[1, 3]), 1);
    }

    #[test]
    fn config_validation() {
        let ok = ExperimentConfig::generated(10, 3, Tuning::Simple, DelaySpec::Zero, vec![1]).unwrap();
        assert_eq!(ok.means, vec![0.4, 0.6, 0.6]);
        assert!(ExperimentConfig::generated(10, 1, Tuning::Simple, DelaySpec::Zero, vec![1]).is_err());
        assert!(ExperimentConfig::generated(0, 2, Tuning::Simple, DelaySpec::Zero, vec![1]).is_err());
        assert!(ExperimentConfig::generated(10, 2, Tuning::Simple, DelaySpec::Zero, vec![]).is_err());
        assert!(ok.clone().with_means(vec![0.5, 0.5]).is_err());
        assert!(ok.clone().with_means(vec![0.5, 0.5, 1.5]).is_err());
        let mut wrong_gen = ok;
        wrong_gen.generator = "mt19937".into();
        assert!(ExperimentConfig::new(wrong_gen).is_err());
        assert!(matches!(
            ExperimentConfig::generated(5, 2, Tuning::Simple, DelaySpec::File("/nonexistent.json".into()), vec![0]),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn config_file_merge() {
        let file: ConfigFile = toml::from_str("n = 50\nk = 3\ntuner = \"advanced\"\nseeds = [4, 5]\n").unwrap();
        let flags = ConfigFile { k: Some(2), delay_gen: Some("uniform:3".into()), ..Default::default() };
        let config = file.merge(flags).into_config().unwrap();
        assert_eq!((config.n, config.k, config.tuner), (50, 2, Tuning::Advanced));
        assert_eq!(config.delays, DelaySpec::Uniform(3));
        assert_eq!(config.seeds, vec![4, 5]);
        let counted: ConfigFile = toml::from_str("n = 5\nk = 2\nseeds = 3").unwrap();
        assert_eq!(counted.into_config().unwrap().seeds, vec![0, 1, 2]);
        assert!(toml::from_str::<ConfigFile>("bogus = 1").is_err());
    }

    #[test]
    fn csv_rows_and_summary_agree() {
        let config = ExperimentConfig::generated(300, 3, Tuning::Advanced, DelaySpec::Uniform(20), vec![0, 1]).unwrap();
        let exp = run(&config).unwrap();
        for (_, report) in &exp.reports {
            let csv = report_csv(report);
            let lines: Vec<&str> = csv.lines().collect();
            assert_eq!(lines[0], CSV_HEADER);
            assert_eq!(lines.len(), 301);
            let last: f64 = lines[300].split(',').nth(4).unwrap().parse().unwrap();
            assert_eq!(last, report.regret);
        }
        assert_eq!(exp.summary.seeds.len(), 2);
        assert_eq!(exp.summary.seeds[0].seed, 0);
    }

    #[test]
    fn tsallis_bound_applies_only_without_delay() {
        let config = ExperimentConfig::generated(50, 2, Tuning::Tsallis, DelaySpec::Uniform(2), vec![0]).unwrap();
        let exp = run(&config).unwrap();
        let check = check_bounds(&exp.summary, &config.instance(0).unwrap());
        assert_eq!(check.delay_pass, None);
        assert_eq!(check.skipping_pass, None);
        assert!(check.passed());
    }

    #[test]
    fn failing_bound_flags() {
        let config = ExperimentConfig::generated(20, 2, Tuning::Simple, DelaySpec::Zero, vec![0]).unwrap();
        let mut summary = run(&config).unwrap().summary;
        summary.mean_regret = 1e9;
        let check = check_bounds(&summary, &config.instance(0).unwrap());
        assert_eq!(check.delay_pass, Some(false));
        assert!(!check.passed());
        assert!(check.delay_margin < 0.0);
    }
}
