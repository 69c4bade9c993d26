use ftrl_delay::env::{unbalanced_delays, uniform_delays};
use ftrl_delay::ledger::{DelayLedger, RoundRate, Tuning};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn drive(tuning: Tuning, k: usize, delays: &[usize]) -> (DelayLedger, Vec<RoundRate>) {
    let n = delays.len();
    let mut ledger = DelayLedger::new(tuning, k).unwrap();
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    let mut rates = Vec::with_capacity(n);
    for t in 1..=n {
        rates.push(ledger.begin_round(t).unwrap());
        ledger.register_round(t).unwrap();
        due[t + delays[t - 1]].push(t);
        for &s in &due[t] {
            ledger.record_arrival(s, t).unwrap();
        }
    }
    (ledger, rates)
}

struct NaiveRound {
    inv_eta: f64,
    truncated: usize,
    deactivated: Vec<usize>,
}

/// The skipping rule written out directly with the delays known and a full
/// scan over `s < t` every round.
fn naive_advanced(k: usize, delays: &[usize]) -> Vec<NaiveRound> {
    let n = delays.len();
    let log_k = (k as f64).ln();
    let mut active = vec![true; n + 1];
    let mut cum = 0u64;
    let mut out = Vec::with_capacity(n);
    for t in 1..=n {
        let truncated = (1..t).filter(|&s| active[s] && s + delays[s - 1] >= t).count();
        cum += truncated as u64;
        let inv_eta = (cum as f64 / log_k).sqrt();
        let mut deactivated = Vec::new();
        for s in 1..t {
            if active[s] && (delays[s - 1].min(t - s) as f64) > inv_eta {
                active[s] = false;
                deactivated.push(s);
            }
        }
        out.push(NaiveRound { inv_eta, truncated, deactivated });
    }
    out
}

fn random_schedule(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    (1..=n).map(|t| rng.gen_range(0..=n - t)).collect()
}

/// Mostly-zero delays with occasional long bursts.
fn bursty_schedule(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    (1..=n)
        .map(|t| if rng.gen_bool(0.1) { rng.gen_range(0..=n - t) } else { rng.gen_range(0..=3usize.min(n - t)) })
        .collect()
}

fn schedule() -> impl Strategy<Value = Vec<usize>> {
    (1usize..150).prop_flat_map(|n| (1..=n).map(|t| 0..=n - t).collect::<Vec<_>>())
}

#[test]
fn advanced_matches_naive_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..300 {
        let n = rng.gen_range(1..200);
        let k = [2, 3, 5, 8][case % 4];
        let delays = if case % 2 == 0 { random_schedule(&mut rng, n) } else { bursty_schedule(&mut rng, n) };
        let (_, fast) = drive(Tuning::Advanced, k, &delays);
        let naive = naive_advanced(k, &delays);
        for (a, b) in fast.iter().zip(&naive) {
            assert_eq!(a.outstanding, b.truncated, "case {case} round {}", a.round);
            assert_eq!(a.inv_eta, b.inv_eta, "case {case} round {}", a.round);
            assert_eq!(a.deactivated, b.deactivated, "case {case} round {}", a.round);
        }
    }
}

#[test]
fn unbalanced_schedule_skips_long_prefix() {
    let n = 2000;
    let k = 4;
    let delays = unbalanced_delays(n, k);
    let (ledger, rates) = drive(Tuning::Advanced, k, &delays);
    let (_, simple) = drive(Tuning::Simple, k, &delays);
    let skipped = ledger.skipped_set();
    assert!(!skipped.is_empty());
    assert!(skipped.iter().all(|&s| delays[s - 1] > 0));
    assert!(rates.last().unwrap().inv_eta < simple.last().unwrap().inv_eta);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn outstanding_sum_is_total_delay(delays in schedule(), k in 2usize..9) {
        let (ledger, rates) = drive(Tuning::Simple, k, &delays);
        let total: u64 = delays.iter().map(|&d| d as u64).sum();
        prop_assert_eq!(rates.iter().map(|r| r.outstanding as u64).sum::<u64>(), total);
        prop_assert_eq!(ledger.cumulative(), total);
    }

    #[test]
    fn outstanding_matches_definition(delays in schedule()) {
        let (_, rates) = drive(Tuning::Simple, 2, &delays);
        for r in &rates {
            let t = r.round;
            let by_definition = (1..t).filter(|&s| s + delays[s - 1] >= t).count();
            prop_assert_eq!(r.outstanding, by_definition);
        }
    }

    #[test]
    fn truncated_never_exceeds_outstanding(delays in schedule(), k in 2usize..9) {
        let (_, simple) = drive(Tuning::Simple, k, &delays);
        let (_, advanced) = drive(Tuning::Advanced, k, &delays);
        for (s, a) in simple.iter().zip(&advanced) {
            prop_assert!(a.outstanding <= s.outstanding);
        }
    }

    #[test]
    fn rates_are_proper(delays in schedule(), k in 2usize..9) {
        for tuning in [Tuning::Simple, Tuning::Advanced] {
            let (_, rates) = drive(tuning, k, &delays);
            for w in rates.windows(2) {
                prop_assert!(w[1].inv_eta >= w[0].inv_eta);
                prop_assert!(w[1].cumulative >= w[0].cumulative);
            }
        }
    }

    #[test]
    fn skipping_guarantees(delays in schedule(), k in 2usize..9) {
        let (ledger, rates) = drive(Tuning::Advanced, k, &delays);
        prop_assert!(rates.iter().all(|r| r.deactivated.len() <= 1));
        let skipped = ledger.skipped_set().len() as f64;
        let bound = 2.0 * (ledger.cumulative() as f64 * (k as f64).ln()).sqrt();
        prop_assert!(skipped <= bound, "|S| = {} > {}", skipped, bound);
    }

    #[test]
    fn indicators_only_turn_off(delays in schedule(), k in 2usize..9) {
        let (ledger, _) = drive(Tuning::Advanced, k, &delays);
        let state = ledger.advanced_state().unwrap();
        let n = delays.len();
        for s in 1..=n {
            let mut was_active = true;
            for t in 1..=n + 1 {
                let now = state.is_active(s, t);
                prop_assert!(was_active || !now);
                was_active = now;
            }
        }
    }
}

#[test]
fn uniform_delay_total() {
    for (n, d) in [(100, 10), (37, 0), (10, 1_000_000), (500, 25)] {
        let delays = uniform_delays(n, d);
        let (ledger, _) = drive(Tuning::Simple, 3, &delays);
        assert_eq!(ledger.cumulative(), delays.iter().map(|&d| d as u64).sum::<u64>());
    }
}
