//! Outstanding-observation bookkeeping and learning-rate tuning.
//!
//! Delays are never given to the ledger. It learns `d_s` only when the
//! observation from round `s` arrives, and at the start of round `t` any
//! still-missing round satisfies `d_s ≥ t - s`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arrival status of every round acted on so far (1-indexed rounds).
#[derive(Clone, Debug, Default)]
pub struct ArrivalTable {
    arrivals: Vec<Option<usize>>,
    pending: usize,
}

impl ArrivalTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of registered rounds.
    pub fn rounds(&self) -> usize {
        self.arrivals.len()
    }

    /// Registers round `s`, which must be the next round.
    pub fn register(&mut self, s: usize) -> Result<()> {
        if s != self.arrivals.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "round {s} registered out of order, expected {}",
                self.arrivals.len() + 1
            )));
        }
        self.arrivals.push(None);
        self.pending += 1;
        Ok(())
    }

    /// Flags the observation from round `s` as arrived at the end of round `t`
    /// and returns its delay `t - s`.
    pub fn record_arrival(&mut self, s: usize, t: usize) -> Result<usize> {
        let slot = s.checked_sub(1).and_then(|i| self.arrivals.get_mut(i)).ok_or(Error::UnknownRound { round: s })?;
        if let Some(arrived_at) = *slot {
            return Err(Error::DuplicateArrival { round: s, arrived_at });
        }
        if t < s {
            return Err(Error::ArrivalBeforeOrigin { origin: s, arrival: t });
        }
        *slot = Some(t);
        self.pending -= 1;
        Ok(t - s)
    }

    pub fn arrival_round(&self, s: usize) -> Option<usize> {
        s.checked_sub(1).and_then(|i| self.arrivals.get(i)).copied().flatten()
    }

    /// Whether the observation of round `s` is still missing at the start of
    /// round `t`.
    pub fn is_outstanding_at(&self, s: usize, t: usize) -> bool {
        s >= 1 && s < t && s <= self.arrivals.len() && self.arrival_round(s).is_none_or(|a| a >= t)
    }

    /// Registered rounds `s < t` whose observation has not arrived strictly
    /// before round `t`.
    pub fn outstanding_count(&self, t: usize) -> usize {
        (1..t.min(self.arrivals.len() + 1)).filter(|&s| self.is_outstanding_at(s, t)).count()
    }

    /// Registered rounds whose observation has not arrived yet.
    pub fn pending(&self) -> usize {
        self.pending
    }
}

/// Which learning-rate rule drives the negentropy part of the regularizer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tuning {
    /// `η_t⁻¹ = √(2𝔇_t / ln k)`.
    Simple,
    /// Skipping tuner, `η_t⁻¹ = √(𝔇̃_t / ln k)`.
    Advanced,
    /// `η_t⁻¹ = 0`: plain Tsallis-INF, used as a baseline.
    Tsallis,
}

impl Tuning {
    pub const ALL: [Tuning; 3] = [Tuning::Simple, Tuning::Advanced, Tuning::Tsallis];

    pub fn name(self) -> &'static str {
        match self {
            Tuning::Simple => "simple",
            Tuning::Advanced => "advanced",
            Tuning::Tsallis => "tsallis",
        }
    }
}

impl fmt::Display for Tuning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tuning {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(Tuning::Simple),
            "advanced" => Ok(Tuning::Advanced),
            "tsallis" | "tsallis-baseline" => Ok(Tuning::Tsallis),
            other => Err(Error::InvalidConfig(format!("unknown tuner `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimpleTunerState {
    cum_outstanding: u64,
    log_k: f64,
}

impl SimpleTunerState {
    pub fn new(k: usize) -> Result<Self> {
        Ok(Self { cum_outstanding: 0, log_k: log_arms(k)? })
    }

    /// Adds `𝔡_t` to `𝔇` and returns `η_t⁻¹ = √(2𝔇_t / ln k)`.
    pub fn begin_round(&mut self, outstanding: usize) -> f64 {
        self.cum_outstanding += outstanding as u64;
        (2.0 * self.cum_outstanding as f64 / self.log_k).sqrt()
    }

    pub fn cum_outstanding(&self) -> u64 {
        self.cum_outstanding
    }
}

/// State of the skipping tuner.
///
/// Indicators are stored as the round each index was deactivated at rather
/// than as a full table: `a_s^t = 0` exactly when `s` was deactivated at some
/// round `r < t`.
#[derive(Clone, Debug)]
pub struct AdvancedTunerState {
    log_k: f64,
    cum_truncated: u64,
    deactivated_at: Vec<Option<usize>>,
    skipped: BTreeSet<usize>,
    // active rounds still waiting for their observation
    active_pending: BTreeSet<usize>,
    // active rounds already observed, keyed by (delay, round)
    active_arrived: BTreeSet<(usize, usize)>,
}

impl AdvancedTunerState {
    pub fn new(k: usize) -> Result<Self> {
        Ok(Self {
            log_k: log_arms(k)?,
            cum_truncated: 0,
            deactivated_at: Vec::new(),
            skipped: BTreeSet::new(),
            active_pending: BTreeSet::new(),
            active_arrived: BTreeSet::new(),
        })
    }

    fn register(&mut self, s: usize) {
        debug_assert_eq!(s, self.deactivated_at.len() + 1);
        self.deactivated_at.push(None);
        self.active_pending.insert(s);
    }

    fn on_arrival(&mut self, s: usize, delay: usize) {
        if self.active_pending.remove(&s) {
            self.active_arrived.insert((delay, s));
        }
    }

    /// One pass of the advanced update at the start of round `t`; all rounds
    /// `s < t` must be registered and their arrivals through `t - 1` recorded.
    ///
    /// Returns `(η_t⁻¹, 𝔡̃_t, deactivated indices)`.
    fn begin_round(&mut self, t: usize) -> (f64, usize, Vec<usize>) {
        let truncated = self.active_pending.len();
        self.cum_truncated += truncated as u64;
        let inv_eta = (self.cum_truncated as f64 / self.log_k).sqrt();

        // min{d_s, t - s} is t - s while s is missing and d_s once it arrived
        let mut deactivated = Vec::new();
        while let Some(&s) = self.active_pending.first() {
            if ((t - s) as f64) <= inv_eta {
                break;
            }
            self.active_pending.pop_first();
            deactivated.push(s);
        }
        while let Some(&(delay, s)) = self.active_arrived.last() {
            if (delay as f64) <= inv_eta {
                break;
            }
            self.active_arrived.pop_last();
            deactivated.push(s);
        }
        deactivated.sort_unstable();
        for &s in &deactivated {
            self.deactivated_at[s - 1] = Some(t);
            self.skipped.insert(s);
        }
        (inv_eta, truncated, deactivated)
    }

    /// The indicator `a_s^t`.
    pub fn is_active(&self, s: usize, t: usize) -> bool {
        match s.checked_sub(1).and_then(|i| self.deactivated_at.get(i)) {
            Some(Some(r)) => t <= *r,
            _ => true,
        }
    }

    pub fn deactivation_round(&self, s: usize) -> Option<usize> {
        s.checked_sub(1).and_then(|i| self.deactivated_at.get(i)).copied().flatten()
    }

    pub fn cum_truncated(&self) -> u64 {
        self.cum_truncated
    }

    pub fn skipped_set(&self) -> &BTreeSet<usize> {
        &self.skipped
    }
}

#[derive(Clone, Debug)]
enum TunerState {
    Simple(SimpleTunerState),
    Advanced(AdvancedTunerState),
    // tracks 𝔇_t for diagnostics but always plays η⁻¹ = 0
    Tsallis(SimpleTunerState),
}

/// What the ledger decided at the start of one round.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundRate {
    pub round: usize,
    pub inv_eta: f64,
    /// `𝔡_t` for the simple and baseline tuners, `𝔡̃_t` for the advanced one.
    pub outstanding: usize,
    /// `𝔇_t` or `𝔇̃_t`.
    pub cumulative: u64,
    pub deactivated: Vec<usize>,
}

/// Arrival table plus the tuner that turns it into `η_t⁻¹`.
#[derive(Clone, Debug)]
pub struct DelayLedger {
    table: ArrivalTable,
    tuner: TunerState,
    next_round: usize,
}

impl DelayLedger {
    pub fn new(tuning: Tuning, k: usize) -> Result<Self> {
        let tuner = match tuning {
            Tuning::Simple => TunerState::Simple(SimpleTunerState::new(k)?),
            Tuning::Advanced => TunerState::Advanced(AdvancedTunerState::new(k)?),
            Tuning::Tsallis => TunerState::Tsallis(SimpleTunerState::new(k)?),
        };
        Ok(Self { table: ArrivalTable::new(), tuner, next_round: 1 })
    }

    pub fn tuning(&self) -> Tuning {
        match self.tuner {
            TunerState::Simple(_) => Tuning::Simple,
            TunerState::Advanced(_) => Tuning::Advanced,
            TunerState::Tsallis(_) => Tuning::Tsallis,
        }
    }

    /// Computes `η_t⁻¹` for round `t`, which must follow the last registered
    /// round.
    pub fn begin_round(&mut self, t: usize) -> Result<RoundRate> {
        if t != self.next_round || self.table.rounds() + 1 != t {
            return Err(Error::InvalidArgument(format!(
                "round {t} started out of order, expected {}",
                self.table.rounds() + 1
            )));
        }
        self.next_round += 1;
        let outstanding = self.table.pending();
        Ok(match &mut self.tuner {
            TunerState::Simple(state) => {
                let inv_eta = state.begin_round(outstanding);
                RoundRate { round: t, inv_eta, outstanding, cumulative: state.cum_outstanding(), deactivated: vec![] }
            }
            TunerState::Tsallis(state) => {
                state.begin_round(outstanding);
                RoundRate {
                    round: t,
                    inv_eta: 0.0,
                    outstanding,
                    cumulative: state.cum_outstanding(),
                    deactivated: vec![],
                }
            }
            TunerState::Advanced(state) => {
                let (inv_eta, truncated, deactivated) = state.begin_round(t);
                RoundRate { round: t, inv_eta, outstanding: truncated, cumulative: state.cum_truncated(), deactivated }
            }
        })
    }

    /// Marks round `t` as acted on; call after `begin_round(t)`.
    pub fn register_round(&mut self, t: usize) -> Result<()> {
        if t + 1 != self.next_round {
            return Err(Error::InvalidArgument(format!("round {t} registered before it began")));
        }
        self.table.register(t)?;
        if let TunerState::Advanced(state) = &mut self.tuner {
            state.register(t);
        }
        Ok(())
    }

    pub fn record_arrival(&mut self, s: usize, t: usize) -> Result<usize> {
        let delay = self.table.record_arrival(s, t)?;
        if let TunerState::Advanced(state) = &mut self.tuner {
            state.on_arrival(s, delay);
        }
        Ok(delay)
    }

    pub fn outstanding_count(&self, t: usize) -> usize {
        self.table.outstanding_count(t)
    }

    pub fn table(&self) -> &ArrivalTable {
        &self.table
    }

    /// The skip set `S`; always empty for tuners that never skip.
    pub fn skipped_set(&self) -> Vec<usize> {
        match &self.tuner {
            TunerState::Advanced(state) => state.skipped_set().iter().copied().collect(),
            _ => Vec::new(),
        }
    }

    pub fn advanced_state(&self) -> Option<&AdvancedTunerState> {
        match &self.tuner {
            TunerState::Advanced(state) => Some(state),
            _ => None,
        }
    }

    /// `𝔇_t` (or `𝔇̃_t`) after the most recent round.
    pub fn cumulative(&self) -> u64 {
        match &self.tuner {
            TunerState::Simple(s) | TunerState::Tsallis(s) => s.cum_outstanding(),
            TunerState::Advanced(s) => s.cum_truncated(),
        }
    }
}

fn log_arms(k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::Dimension(format!("need at least 2 arms, got {k}")));
    }
    Ok((k as f64).ln())
}
