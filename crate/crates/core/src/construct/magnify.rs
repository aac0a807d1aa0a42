//! Test sets making `b ↦ ∫_T f((x − b)/a) dx` strictly increasing for every
//! scale `a ≥ 1`.

use serde::{Deserialize, Serialize};

use crate::analysis::{variation_and_derivative, KEstimator};
use crate::construct::normal::Normalization;
use crate::construct::quantizer::{tiled_quantizer, ShellBudget, ShellRecord};
use crate::construct::target::{default_c1, SmoothTarget};
use crate::error::{Error, Result};
use crate::interval::{IntervalSet, Window};
use crate::numeric::fit_slope;
use crate::profile::Profile;

/// Tolerances on `ε` used to fit `log K` against `ε^{−1/3}`.
pub const GROWTH_EPSILONS: [f64; 10] = [1e-1, 5e-2, 2e-2, 1e-2, 5e-3, 2e-3, 1e-3, 5e-4, 2e-4, 1e-4];

const SCALE_CELLS: usize = 512;
const RATIO_SAMPLES: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagnifyConfig {
    /// Largest scale the certificate covers.
    pub a_max: f64,
    /// Largest `|b|` the certificate covers.
    pub b_max: f64,
    /// Admissible slope of `log K` against `ε^{−1/3}`.
    pub growth_bound: f64,
    pub c1: Option<f64>,
}

impl Default for MagnifyConfig {
    fn default() -> Self {
        MagnifyConfig {
            a_max: 8.0,
            b_max: 4.0,
            growth_bound: 2.0,
            c1: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub epsilons: Vec<f64>,
    pub k_bounds: Vec<f64>,
    pub slope: f64,
    pub bound: f64,
}

impl GrowthFit {
    pub fn of(est: &KEstimator, bound: f64) -> GrowthFit {
        let epsilons = GROWTH_EPSILONS.to_vec();
        let k_bounds: Vec<f64> = epsilons.iter().map(|&e| est.bound(e)).collect();
        let xs: Vec<f64> = epsilons.iter().map(|e| e.powf(-1.0 / 3.0)).collect();
        let ys: Vec<f64> = k_bounds.iter().map(|k| k.max(1e-300).ln()).collect();
        GrowthFit {
            epsilons,
            k_bounds,
            slope: fit_slope(&xs, &ys),
            bound,
        }
    }

    pub fn passes(&self) -> bool {
        self.slope <= self.bound
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagnifyShell {
    pub shell: usize,
    pub delta: f64,
    /// Point `y` at which the far-regime budget was evaluated, if it applies.
    pub far_point: Option<f64>,
    pub far_budget: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagnifyCertificate {
    pub target: SmoothTarget,
    pub normalization: Normalization,
    pub window: Window,
    pub unit_window: Window,
    pub config: MagnifyConfig,
    /// Largest `|x|` in normalized coordinates that the budgets cover.
    pub x_max: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub big_c3: f64,
    pub h0: f64,
    pub growth: GrowthFit,
    pub shells: Vec<MagnifyShell>,
    pub quantizer: Vec<ShellRecord>,
    pub absolutely_continuous: bool,
}

impl MagnifyCertificate {
    /// Re-checks the stored budget inequalities.
    pub fn consistent(&self) -> bool {
        self.growth.passes()
            && (self.h0 - self.c2 / (24.0 * self.big_c3)).abs() <= 1e-15 * self.h0.max(1.0)
            && self
                .shells
                .iter()
                .all(|s| s.delta <= self.h0 && s.far_budget.is_none_or(|b| s.delta <= b))
            && self
                .quantizer
                .iter()
                .all(|q| (q.blocks as f64) * q.delta > 4.0)
    }
}

#[derive(Clone, Debug)]
pub struct MagnifyTestSet {
    pub set: IntervalSet,
    pub certificate: MagnifyCertificate,
}

/// `Φ′(t)·t·ln²t` minimized over `t ∈ [lo, hi]` on a dense grid.
fn ratio_floor(target: &SmoothTarget, lo: f64, hi: f64) -> f64 {
    let hi = hi.max(lo);
    (0..=RATIO_SAMPLES)
        .map(|i| {
            let t = lo * (hi / lo).powf(i as f64 / RATIO_SAMPLES as f64);
            let l = t.ln();
            target.dphi(t) * t * l * l
        })
        .fold(f64::INFINITY, f64::min)
}

/// Far-regime budget `c₃/(32y ln²(4y)) / K(c₃/(16y ln²(4y)))`.
fn far_budget(est: &KEstimator, c3: f64, y: f64) -> f64 {
    let l = (4.0 * y).ln();
    let m = y * l * l;
    (c3 / (32.0 * m)) / est.bound(c3 / (16.0 * m)).max(1e-300)
}

pub fn magnify_test_set(
    f: &Profile,
    window: &Window,
    cfg: &MagnifyConfig,
) -> Result<MagnifyTestSet> {
    if !(cfg.a_max >= 1.0) || !(cfg.b_max >= 0.0) || !(cfg.growth_bound > 0.0) {
        return Err(Error::InvalidArgument(
            "magnify needs a_max ≥ 1, b_max ≥ 0 and a positive growth bound".into(),
        ));
    }
    let c1 = cfg.c1.unwrap_or_else(default_c1);
    let target = SmoothTarget::log_squared(c1)?;
    let (norm, unit) = Normalization::of(f)?;
    let (_, deriv) = variation_and_derivative(&unit);
    let est = KEstimator::new(&deriv);
    let growth = GrowthFit::of(&est, cfg.growth_bound);
    if !growth.passes() {
        return Err(Error::GrowthCertificate {
            slope: growth.slope,
            bound: growth.bound,
        });
    }
    let w = norm.half_width.to_f64();
    let x_max = (cfg.b_max + cfg.a_max * norm.center.to_f64().abs()) / w;
    let c2 = ratio_floor(&target, 3.0, 3.0 * cfg.a_max);
    let c3 = ratio_floor(&target, 4.0, (2.0 * x_max).max(4.0));

    // C₃ ≥ K(c₂/(12 ln²(3a)))·ln²(3a)/a on every cell of a geometric grid
    let mut big_c3 = 0.0f64;
    let scales: Vec<f64> = (0..=SCALE_CELLS)
        .map(|i| cfg.a_max.powf(i as f64 / SCALE_CELLS as f64))
        .collect();
    for cell in scales.windows(2) {
        let (a0, a1) = (cell[0], cell[1]);
        let l = (3.0 * a1).ln();
        let k = est.bound(c2 / (12.0 * l * l));
        big_c3 = big_c3.max(k * l * l / a0);
    }
    if scales.len() == 1 {
        let l = 3f64.ln();
        big_c3 = est.bound(c2 / (12.0 * l * l)) * l * l;
    }
    let big_c3 = big_c3.max(1e-12);
    let h0 = c2 / (24.0 * big_c3);

    let uw = norm.scaled_window(window)?;
    let reach = uw
        .lo
        .floor()
        .unsigned_abs()
        .max(uw.hi.ceil().unsigned_abs()) as usize;
    let y_max = x_max / 2.0;
    let mut shells = Vec::with_capacity(reach + 1);
    for k in 0..=reach {
        // shell k meets u ∈ (y, 3y] for some y ∈ (1, y_max] with y < k + 1
        let far = y_max > 1.0 && (k as f64) < 3.0 * y_max && k >= 1;
        let (far_point, far_budget_v) = if far {
            let y = ((k + 1) as f64).min(y_max);
            (Some(y), Some(far_budget(&est, c3, y)))
        } else {
            (None, None)
        };
        let delta = far_budget_v.map_or(h0, |b| b.min(h0)).min(0.25);
        shells.push(MagnifyShell {
            shell: k,
            delta,
            far_point,
            far_budget: far_budget_v,
        });
    }
    let budget = ShellBudget::new(shells.iter().map(|s| s.delta).collect())?;
    let q = tiled_quantizer(&target, &budget, &uw)?;
    let set = norm.scaled_set(&q.set, window)?;
    let certificate = MagnifyCertificate {
        target,
        normalization: norm,
        window: *window,
        unit_window: uw,
        config: *cfg,
        x_max,
        c1,
        c2,
        c3,
        big_c3,
        h0,
        growth,
        shells,
        quantizer: q.shells,
        absolutely_continuous: f.is_continuous(),
    };
    Ok(MagnifyTestSet { set, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::sliding::{grid, sliding_integral};

    #[test]
    fn tent_small_horizon() {
        let cfg = MagnifyConfig {
            a_max: 2.0,
            b_max: 2.0,
            ..MagnifyConfig::default()
        };
        let w = Window::from_ints(-5, 5).unwrap();
        let m = magnify_test_set(&Profile::tent(), &w, &cfg).unwrap();
        assert!(m.certificate.consistent());
        assert!(m.certificate.c2 > 0.0 && m.certificate.c3 >= m.certificate.c2);
        let bs = grid(-2.0, 2.0, 1.0 / 32.0);
        for a in [1.0, 1.5, 2.0] {
            let v = sliding_integral(&Profile::tent(), &m.set, &w, a, &bs).unwrap();
            assert!(v.windows(2).all(|p| p[1] > p[0]), "a = {a}");
        }
    }

    #[test]
    fn growth_failure_is_reported() {
        let cfg = MagnifyConfig {
            growth_bound: 1e-9,
            ..MagnifyConfig::default()
        };
        let w = Window::from_ints(-4, 4).unwrap();
        let disk = crate::shapes::Shape::disk(1.0)
            .radon_profile(&crate::shapes::Direction::axis(2, 0), 257)
            .unwrap();
        assert!(matches!(
            magnify_test_set(&disk, &w, &cfg),
            Err(Error::GrowthCertificate { .. })
        ));
    }
}
