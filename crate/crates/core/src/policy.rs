//! The FTRL loop: tune, solve, sample, and fold in delayed observations.

use std::collections::HashMap;

use rand::Rng;
use serde::Serialize;

use crate::env::Observation;
use crate::error::{Error, Result};
use crate::ledger::{DelayLedger, RoundRate, Tuning};
use crate::simplex::{solve_distribution, KktCertificate, PotentialParams, SimplexDistribution};

/// The action drawn at one round.
#[derive(Clone, Debug, Serialize)]
pub struct ActionSample {
    pub round: usize,
    pub distribution: SimplexDistribution,
    pub arm: usize,
    pub prob_of_arm: f64,
}

/// Importance-weighted estimate `ℓ_{s,A_s} / x_{s,A_s}` on arm `A_s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LossEstimate {
    pub origin_round: usize,
    pub arm: usize,
    pub value: f64,
}

impl LossEstimate {
    fn from_parts(origin_round: usize, arm: usize, loss: f64, prob: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&loss) {
            return Err(Error::InvalidLoss(loss));
        }
        if !(prob > 0.0 && prob <= 1.0) {
            return Err(Error::InvalidArgument(format!("sampling probability {prob} not in (0, 1]")));
        }
        Ok(Self { origin_round, arm, value: loss / prob })
    }
}

pub fn make_estimate(sample: &ActionSample, observed_loss: f64) -> Result<LossEstimate> {
    LossEstimate::from_parts(sample.round, sample.arm, observed_loss, sample.prob_of_arm)
}

/// One learner instance for a `k`-armed game.
#[derive(Clone, Debug)]
pub struct FtrlPolicy {
    cum_obs_loss: Vec<f64>,
    round: usize,
    ledger: DelayLedger,
    // origin round -> (arm, probability it was drawn with), until arrival
    pending_probs: HashMap<usize, (usize, f64)>,
    last_rate: Option<RoundRate>,
    last_certificate: Option<KktCertificate>,
}

impl FtrlPolicy {
    pub fn new(k: usize, tuning: Tuning) -> Result<Self> {
        Ok(Self {
            cum_obs_loss: vec![0.0; k],
            round: 0,
            ledger: DelayLedger::new(tuning, k)?,
            pending_probs: HashMap::new(),
            last_rate: None,
            last_certificate: None,
        })
    }

    pub fn k(&self) -> usize {
        self.cum_obs_loss.len()
    }

    /// Rounds acted so far; the next call to [`act`](Self::act) plays round
    /// `round() + 1`.
    pub fn round(&self) -> usize {
        self.round
    }

    /// `L̂ᵒᵇˢ`: the sum of all estimates ingested so far.
    pub fn cum_obs_loss(&self) -> &[f64] {
        &self.cum_obs_loss
    }

    pub fn ledger(&self) -> &DelayLedger {
        &self.ledger
    }

    pub fn last_rate(&self) -> Option<&RoundRate> {
        self.last_rate.as_ref()
    }

    pub fn last_certificate(&self) -> Option<&KktCertificate> {
        self.last_certificate.as_ref()
    }

    /// Distribution for the next round, without advancing any state.
    pub fn peek_distribution(&self, inv_eta: f64) -> Result<SimplexDistribution> {
        let params = PotentialParams::for_round(self.round + 1, inv_eta)?;
        Ok(solve_distribution(&self.cum_obs_loss, params)?.0)
    }

    /// Plays the next round with a single uniform draw from `rng`.
    pub fn act<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<ActionSample> {
        let t = self.round + 1;
        let rate = self.ledger.begin_round(t)?;
        let params = PotentialParams::for_round(t, rate.inv_eta)?;
        let (distribution, certificate) = solve_distribution(&self.cum_obs_loss, params)?;
        let u: f64 = rng.gen();
        let arm = distribution.sample(u);
        let prob_of_arm = distribution.probs()[arm];

        self.ledger.register_round(t)?;
        self.pending_probs.insert(t, (arm, prob_of_arm));
        self.round = t;
        self.last_rate = Some(rate);
        self.last_certificate = Some(certificate);
        Ok(ActionSample { round: t, distribution, arm, prob_of_arm })
    }

    /// Folds in the observations delivered at the end of round `t`, which must
    /// be the round just played. They take effect from round `t + 1`.
    pub fn ingest(&mut self, t: usize, observations: &[Observation]) -> Result<Vec<LossEstimate>> {
        if t != self.round {
            return Err(Error::InvalidArgument(format!(
                "ingest at round {t} but the policy is at round {}",
                self.round
            )));
        }
        let mut estimates = Vec::with_capacity(observations.len());
        for obs in observations {
            if obs.arrival_round != t {
                return Err(Error::InvalidArgument(format!(
                    "observation from round {} is due at {}, not {t}",
                    obs.origin_round, obs.arrival_round
                )));
            }
            let &(arm, prob) = match self.pending_probs.get(&obs.origin_round) {
                Some(entry) => entry,
                None => {
                    return Err(match self.ledger.table().arrival_round(obs.origin_round) {
                        Some(arrived_at) => Error::DuplicateArrival { round: obs.origin_round, arrived_at },
                        None => Error::UnknownRound { round: obs.origin_round },
                    })
                }
            };
            if arm != obs.arm {
                return Err(Error::InvalidArgument(format!(
                    "observation from round {} reports arm {} but arm {arm} was played",
                    obs.origin_round, obs.arm
                )));
            }
            let estimate = LossEstimate::from_parts(obs.origin_round, arm, obs.loss, prob)?;
            self.ledger.record_arrival(obs.origin_round, t)?;
            self.pending_probs.remove(&obs.origin_round);
            self.cum_obs_loss[arm] += estimate.value;
            estimates.push(estimate);
        }
        Ok(estimates)
    }
}
