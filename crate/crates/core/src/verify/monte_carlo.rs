//! Empirical reconstruction rates for random grid test sets.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::random::{sample, RandomLevels};
use crate::verify::{scan_pairs, FamilyGrid, MeasureVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialLog {
    pub trial: usize,
    /// One seed per copy.
    pub seeds: Vec<u64>,
    pub collisions: usize,
    pub min_separation: f64,
    pub success: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub seed: u64,
    pub copies: usize,
    pub trials: usize,
    pub successes: usize,
    /// `None` when no trial ran.
    pub rate: Option<f64>,
    pub instances: usize,
    pub levels: RandomLevels,
    pub logs: Vec<TrialLog>,
}

/// Copy seeds of one trial, drawn from the master seed on the trial's stream.
pub fn trial_seeds(seed: u64, trial: usize, copies: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    (0..copies).map(|_| rng.next_u64()).collect()
}

/// A trial succeeds when no two grid instances share a measure vector
/// (exact comparison) over `copies` independent random sets.
pub fn monte_carlo_reconstruction(
    grid: &FamilyGrid,
    levels: &RandomLevels,
    copies: usize,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloReport> {
    if levels.dim != 1 || grid.dim() != 1 {
        return Err(Error::Dimension {
            expected: 1,
            got: levels.dim.max(grid.dim()),
        });
    }
    if copies == 0 {
        return Err(Error::InvalidArgument(
            "at least one copy is required".into(),
        ));
    }
    let bodies: Vec<IntervalSet> = (0..grid.len())
        .map(|i| grid.exact_instance(i))
        .collect::<Result<_>>()?;
    let (blo, bhi) = (levels.box_lo[0], levels.box_hi[0]);
    for body in &bodies {
        if let Some((lo, hi)) = body.hull() {
            if lo < Dyadic::from_int(blo) || hi > Dyadic::from_int(bhi) {
                return Err(Error::WindowExceeded {
                    need_lo: lo.to_f64(),
                    need_hi: hi.to_f64(),
                    window_lo: blo as f64,
                    window_hi: bhi as f64,
                });
            }
        }
    }
    let logs: Vec<TrialLog> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let seeds = trial_seeds(seed, trial, copies);
            let sets: Vec<IntervalSet> = seeds
                .iter()
                .map(|&s| {
                    sample(levels, s)
                        .to_interval_set()
                        .expect("one-dimensional")
                })
                .collect();
            let cums: Vec<_> = sets.iter().map(|s| s.cumulative()).collect();
            let vectors: Vec<MeasureVector> = bodies
                .iter()
                .map(|b| {
                    let exact: Vec<Dyadic> = cums
                        .iter()
                        .map(|c| b.intervals().map(|(lo, hi)| c.between(lo, hi)).sum())
                        .collect();
                    MeasureVector {
                        values: exact.iter().map(|v| v.to_f64()).collect(),
                        errors: vec![0.0; copies],
                        exact: Some(exact),
                    }
                })
                .collect();
            let scan = scan_pairs(&vectors);
            TrialLog {
                trial,
                seeds,
                collisions: scan.collisions,
                min_separation: scan.min_separation,
                success: scan.collisions == 0,
            }
        })
        .collect();
    let successes = logs.iter().filter(|l| l.success).count();
    Ok(MonteCarloReport {
        seed,
        copies,
        trials,
        successes,
        rate: (trials > 0).then(|| successes as f64 / trials as f64),
        instances: bodies.len(),
        levels: levels.clone(),
        logs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_grid() -> FamilyGrid {
        FamilyGrid::intervals(
            (Dyadic::ZERO, Dyadic::ONE),
            (Dyadic::ONE, Dyadic::from_int(2)),
            Dyadic::new(1, 3),
        )
        .unwrap()
    }

    #[test]
    fn zero_trials() {
        let r = monte_carlo_reconstruction(
            &small_grid(),
            &RandomLevels::interval_default(0, 3),
            5,
            0,
            1,
        )
        .unwrap();
        assert_eq!((r.trials, r.rate, r.logs.len()), (0, None, 0));
    }

    #[test]
    fn reproducible() {
        let lv = RandomLevels::interval_default(0, 3);
        let a = monte_carlo_reconstruction(&small_grid(), &lv, 2, 3, 11).unwrap();
        let b = monte_carlo_reconstruction(&small_grid(), &lv, 2, 3, 11).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.logs[0].seeds, a.logs[1].seeds);
    }

    #[test]
    fn box_is_checked() {
        let r = monte_carlo_reconstruction(
            &small_grid(),
            &RandomLevels::interval_default(0, 2),
            1,
            1,
            1,
        );
        assert!(matches!(r, Err(Error::WindowExceeded { .. })));
    }
}
