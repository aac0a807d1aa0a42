//! Upper bounds for `K(ε, g) = inf { Var(h) : ‖g − h‖₁ < ε }` on step data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::StepProfile;

/// Which strategy produced a [`KBound`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KStrategy {
    Truncation,
    Regularized,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KBound {
    pub epsilon: f64,
    pub variation_bound: f64,
    pub witness: StepProfile,
    pub strategy: KStrategy,
}

impl KBound {
    /// Re-check `‖g − witness‖₁ < ε` and `Var(witness) = variation_bound`.
    pub fn verify(&self, g: &StepProfile) -> bool {
        g.l1_distance(&self.witness) < self.epsilon
            && self.witness.variation() == self.variation_bound
    }
}

struct Candidate {
    l1: f64,
    var: f64,
    values: Vec<f64>,
}

/// Caches the regularized approximants of one step function so that many
/// `ε` queries are cheap.
pub struct KEstimator {
    g: StepProfile,
    widths: Vec<f64>,
    /// (|v|, width) sorted by |v| descending
    by_magnitude: Vec<(f64, f64)>,
    candidates: Vec<Candidate>,
}

const LAMBDA_STEPS: usize = 96;

impl KEstimator {
    pub fn new(g: &StepProfile) -> Self {
        let g = g.simplified();
        let widths: Vec<f64> = g.widths().collect();
        let mut by_magnitude: Vec<(f64, f64)> = g
            .values()
            .iter()
            .zip(&widths)
            .map(|(v, w)| (v.abs(), *w))
            .collect();
        by_magnitude.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut est = KEstimator {
            g,
            widths,
            by_magnitude,
            candidates: Vec::new(),
        };
        est.build_candidates();
        est
    }

    pub fn profile(&self) -> &StepProfile {
        &self.g
    }

    fn build_candidates(&mut self) {
        let vals = self.g.values();
        if vals.is_empty() {
            return;
        }
        self.candidates.push(Candidate {
            l1: 0.0,
            var: self.g.variation(),
            values: vals.to_vec(),
        });
        let zero = vec![0.0; vals.len()];
        self.candidates.push(Candidate {
            l1: self.g.l1_norm(),
            var: 0.0,
            values: zero,
        });
        let total: f64 = self.widths.iter().sum();
        let wmin = self.widths.iter().copied().fold(f64::INFINITY, f64::min);
        let (lo, hi) = ((wmin * 1e-3).ln(), total.ln());
        let mut levels: Vec<f64> = vals.to_vec();
        levels.push(0.0);
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        for k in 0..LAMBDA_STEPS {
            let lambda = (lo + (hi - lo) * k as f64 / (LAMBDA_STEPS - 1) as f64).exp();
            let u = tv_l1_chain(vals, &self.widths, &levels, lambda);
            let l1: f64 = u
                .iter()
                .zip(vals)
                .zip(&self.widths)
                .map(|((a, b), w)| w * (a - b).abs())
                .sum();
            let var = crate::profile::variation_of(&u);
            self.candidates.push(Candidate { l1, var, values: u });
        }
    }

    /// Truncation level `n` and the resulting `(‖g − g_n‖₁, Var(g_n))` for
    /// the least `n` with error below `eps`.
    fn truncation(&self, eps: f64) -> Option<(f64, f64, f64)> {
        // L(n) = Σ w (|v| − n)_+ is piecewise linear and decreasing
        let mut acc_w = 0.0;
        let mut acc = 0.0; // Σ w |v| over the pieces above the current level
        let mut n_star = 0.0;
        let mut found = false;
        for (i, &(m, w)) in self.by_magnitude.iter().enumerate() {
            acc_w += w;
            acc += w * m;
            let next = self.by_magnitude.get(i + 1).map_or(0.0, |p| p.0);
            // on [next, m]: L(n) = acc − acc_w · n
            let l_next = acc - acc_w * next;
            if l_next >= eps {
                n_star = (acc - eps) / acc_w;
                found = true;
                break;
            }
        }
        let n = if found {
            let mut n = n_star.max(0.0);
            for _ in 0..64 {
                if self.trunc_error(n) < eps {
                    break;
                }
                n = n * (1.0 + 1e-12) + f64::MIN_POSITIVE.max(1e-300);
            }
            n
        } else {
            0.0
        };
        let err = self.trunc_error(n);
        if err >= eps {
            return None;
        }
        Some((n, err, self.g.clamped(n).variation()))
    }

    fn trunc_error(&self, n: f64) -> f64 {
        self.by_magnitude
            .iter()
            .map(|&(m, w)| w * (m - n).max(0.0))
            .sum()
    }

    /// Upper bound for `K(eps, g)`; non-increasing in `eps`.
    pub fn bound(&self, eps: f64) -> f64 {
        self.best(eps).map_or(0.0, |(v, _)| v)
    }

    fn best(&self, eps: f64) -> Option<(f64, Choice)> {
        if self.g.is_empty() {
            return None;
        }
        let mut best: Option<(f64, Choice)> = None;
        for (i, c) in self.candidates.iter().enumerate() {
            if c.l1 < eps && best.as_ref().map_or(true, |b| c.var < b.0) {
                best = Some((c.var, Choice::Candidate(i)));
            }
        }
        if let Some((n, _, var)) = self.truncation(eps) {
            if best.as_ref().map_or(true, |b| var < b.0) {
                best = Some((var, Choice::Truncate(n)));
            }
        }
        best
    }

    pub fn kbound(&self, eps: f64) -> Result<KBound> {
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be positive, got {eps}"
            )));
        }
        let Some((var, choice)) = self.best(eps) else {
            return Ok(KBound {
                epsilon: eps,
                variation_bound: 0.0,
                witness: StepProfile::zero(),
                strategy: KStrategy::Truncation,
            });
        };
        let (witness, strategy) = match choice {
            Choice::Candidate(i) => (
                self.g.with_values(self.candidates[i].values.clone()),
                KStrategy::Regularized,
            ),
            Choice::Truncate(n) => (self.g.clamped(n), KStrategy::Truncation),
        };
        debug_assert_eq!(witness.variation(), var);
        Ok(KBound {
            epsilon: eps,
            variation_bound: witness.variation(),
            witness,
            strategy,
        })
    }
}

enum Choice {
    Candidate(usize),
    Truncate(f64),
}

/// `k_upper` as a one-shot call.
pub fn k_upper(g: &StepProfile, eps: f64) -> Result<KBound> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {eps}"
        )));
    }
    KEstimator::new(g).kbound(eps)
}

/// Minimizes `Σ w_i |u_i − v_i| + λ·TV(0, u_1, …, u_m, 0)` over
/// `u_i ∈ levels` by dynamic programming along the chain.
fn tv_l1_chain(vals: &[f64], widths: &[f64], levels: &[f64], lambda: f64) -> Vec<f64> {
    let m = vals.len();
    let k = levels.len();
    let zero = levels.iter().position(|&v| v == 0.0).unwrap();
    let mut back = vec![0u32; m * k];
    // cost of the state before the first piece: only level 0
    let mut prev: Vec<f64> = levels.iter().map(|&l| lambda * l.abs()).collect();
    let mut prev_arg: Vec<u32> = vec![zero as u32; k];
    let mut cur = vec![0.0; k];
    for i in 0..m {
        // prev already includes the transition into level j (min over predecessors)
        for j in 0..k {
            cur[j] = prev[j] + widths[i] * (levels[j] - vals[i]).abs();
            back[i * k + j] = prev_arg[j];
        }
        // transition to the next piece: L1 distance transform
        let (mut t, mut targ): (Vec<f64>, Vec<u32>) = (cur.clone(), (0..k as u32).collect());
        for j in 1..k {
            let c = t[j - 1] + lambda * (levels[j] - levels[j - 1]);
            if c < t[j] {
                t[j] = c;
                targ[j] = targ[j - 1];
            }
        }
        for j in (0..k - 1).rev() {
            let c = t[j + 1] + lambda * (levels[j + 1] - levels[j]);
            if c < t[j] {
                t[j] = c;
                targ[j] = targ[j + 1];
            }
        }
        prev = t;
        prev_arg = targ;
    }
    // close with the jump back to zero: the state after the last piece is
    // level 0, reached from argmin prev_arg[zero]
    let mut j = prev_arg[zero] as usize;
    let mut u = vec![0.0; m];
    for i in (0..m).rev() {
        u[i] = levels[j];
        j = back[i * k + j] as usize;
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::variation::variation_and_derivative;
    use crate::profile::Profile;

    fn brute_force(vals: &[f64], widths: &[f64], levels: &[f64], lambda: f64) -> f64 {
        let m = vals.len();
        let k = levels.len();
        let mut best = f64::INFINITY;
        let mut idx = vec![0usize; m];
        loop {
            let u: Vec<f64> = idx.iter().map(|&j| levels[j]).collect();
            let c: f64 = u
                .iter()
                .zip(vals)
                .zip(widths)
                .map(|((a, b), w)| w * (a - b).abs())
                .sum::<f64>()
                + lambda * crate::profile::variation_of(&u);
            best = best.min(c);
            let mut p = 0;
            loop {
                if p == m {
                    return best;
                }
                idx[p] += 1;
                if idx[p] < k {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
        }
    }

    #[test]
    fn chain_dp_matches_enumeration() {
        let vals = [3.0, -1.0, 2.5, 0.5];
        let widths = [0.5, 1.0, 0.25, 2.0];
        let mut levels: Vec<f64> = vals.to_vec();
        levels.push(0.0);
        levels.sort_by(f64::total_cmp);
        for &lambda in &[0.01, 0.2, 0.7, 3.0] {
            let u = tv_l1_chain(&vals, &widths, &levels, lambda);
            let c: f64 = u
                .iter()
                .zip(&vals)
                .zip(&widths)
                .map(|((a, b), w)| w * (a - b).abs())
                .sum::<f64>()
                + lambda * crate::profile::variation_of(&u);
            let b = brute_force(&vals, &widths, &levels, lambda);
            assert!((c - b).abs() < 1e-12, "lambda {lambda}: {c} vs {b}");
        }
    }

    #[test]
    fn bounded_derivative_needs_no_more_than_its_variation() {
        let (_, d) = variation_and_derivative(&Profile::tent());
        for &eps in &[1.0, 0.1, 1e-6] {
            let kb = k_upper(&d, eps).unwrap();
            assert!(kb.variation_bound <= 4.0);
            assert!(kb.verify(&d));
        }
    }

    #[test]
    fn inverse_square_root_truncation_rate() {
        // x^{-1/2} on (0,1] by geometric steps: exact piece averages
        let m = 60;
        let mut xs: Vec<f64> = (0..=m).map(|k| 2f64.powi(-(m - k) as i32)).collect();
        xs[0] = 0.0;
        let vals: Vec<f64> = xs
            .windows(2)
            .map(|w| 2.0 * (w[1].sqrt() - w[0].sqrt()) / (w[1] - w[0]))
            .collect();
        let g = StepProfile::new(xs, vals).unwrap();
        let est = KEstimator::new(&g);
        for &eps in &[0.1, 0.01, 0.001] {
            let kb = est.kbound(eps).unwrap();
            assert!(kb.verify(&g));
            assert!(
                kb.variation_bound <= 2.0 / eps * 1.1,
                "eps {eps}: {}",
                kb.variation_bound
            );
        }
    }

    #[test]
    fn zero_and_bad_epsilon() {
        let kb = k_upper(&StepProfile::zero(), 0.1).unwrap();
        assert_eq!(kb.variation_bound, 0.0);
        assert!(k_upper(&StepProfile::zero(), 0.0).is_err());
    }

    #[test]
    fn monotone_in_epsilon() {
        let xs: Vec<f64> = (0..=40).map(|k| k as f64 / 40.0).collect();
        let vals: Vec<f64> = (0..40)
            .map(|k| ((k * 37 % 11) as f64 - 5.0) * (1.0 + k as f64 / 7.0))
            .collect();
        let g = StepProfile::new(xs, vals).unwrap();
        let est = KEstimator::new(&g);
        let mut prev = 0.0;
        for k in 0..60 {
            let eps = 10f64.powf(-5.0 + k as f64 / 10.0);
            let b = est.bound(eps);
            if k > 0 {
                assert!(b <= prev, "not monotone at eps {eps}");
            }
            prev = b;
        }
    }
}
