//! Test sets making `b ↦ ∫_T f(x − b) dx` strictly increasing.

use serde::{Deserialize, Serialize};

use crate::analysis::{variation_and_derivative, KEstimator};
use crate::construct::normal::Normalization;
use crate::construct::quantizer::{tiled_quantizer, ShellBudget, ShellRecord};
use crate::construct::target::SmoothTarget;
use crate::error::Result;
use crate::interval::{IntervalSet, Window};
use crate::profile::Profile;

pub const DEFAULT_RATE: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranslateShell {
    pub shell: usize,
    /// `min Φ′` on `[−k−2, k+2]`.
    pub min_dphi: f64,
    pub epsilon: f64,
    pub k_bound: f64,
    /// Windowed discrepancy allowed for `|x|` in this shell.
    pub h: f64,
    /// Quantizer budget on this shell.
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranslateCertificate {
    pub target: SmoothTarget,
    pub normalization: Normalization,
    pub window: Window,
    pub unit_window: Window,
    pub shells: Vec<TranslateShell>,
    pub quantizer: Vec<ShellRecord>,
    /// The slope bound needs an absolutely continuous profile; jumps void it.
    pub absolutely_continuous: bool,
}

impl TranslateCertificate {
    /// Re-checks every stored budget inequality.
    pub fn consistent(&self) -> bool {
        let n = self.shells.len();
        self.shells.iter().enumerate().all(|(k, s)| {
            let next_h = self.shells[(k + 1).min(n - 1)].h;
            s.h * 4.0 * s.k_bound <= s.min_dphi * (1.0 + 1e-12)
                && s.epsilon <= s.min_dphi / 4.0
                && s.delta <= next_h / 2.0
                && (k == 0 || s.h <= self.shells[k - 1].h)
        }) && self.quantizer.iter().all(|q| {
            let d = self.shells[q.shell.min(n - 1)].delta;
            q.delta == d && (q.blocks as f64) * d > 4.0
        })
    }

    /// Lower bound for `d/db ∫_T f(x − b) dx` while `b` stays in normalized
    /// shell `k` (original units).
    pub fn slope_floor(&self, k: usize) -> f64 {
        let s = &self.shells[k.min(self.shells.len() - 1)];
        self.normalization.mass / self.normalization.half_width.to_f64() * s.min_dphi / 4.0
    }
}

#[derive(Clone, Debug)]
pub struct TranslateTestSet {
    pub set: IntervalSet,
    pub certificate: TranslateCertificate,
}

pub fn translate_test_set(f: &Profile, window: &Window) -> Result<TranslateTestSet> {
    translate_test_set_with(f, window, DEFAULT_RATE)
}

pub fn translate_test_set_with(
    f: &Profile,
    window: &Window,
    rate: f64,
) -> Result<TranslateTestSet> {
    let target = SmoothTarget::logistic(rate)?;
    let (norm, unit) = Normalization::of(f)?;
    let (_, deriv) = variation_and_derivative(&unit);
    let est = KEstimator::new(&deriv);
    let uw = norm.unit_window(window)?;
    let reach = uw
        .lo
        .floor()
        .unsigned_abs()
        .max(uw.hi.ceil().unsigned_abs()) as usize;
    let mut shells: Vec<TranslateShell> = Vec::with_capacity(reach + 1);
    let mut h_prev = 0.5f64;
    for k in 0..=reach {
        let m = target.dphi(k as f64 + 2.0);
        let epsilon = m / 4.0;
        let k_bound = est.bound(epsilon).max(1.0);
        let h = (m / (4.0 * k_bound)).min(h_prev);
        h_prev = h;
        shells.push(TranslateShell {
            shell: k,
            min_dphi: m,
            epsilon,
            k_bound,
            h,
            delta: 0.0,
        });
    }
    for k in 0..shells.len() {
        let next = shells[(k + 1).min(reach)].h;
        shells[k].delta = next / 2.0;
    }
    let budget = ShellBudget::new(shells.iter().map(|s| s.delta).collect())?;
    let q = tiled_quantizer(&target, &budget, &uw)?;
    let set = norm.from_unit_set(&q.set, window)?;
    let certificate = TranslateCertificate {
        target,
        normalization: norm,
        window: *window,
        unit_window: uw,
        shells,
        quantizer: q.shells,
        absolutely_continuous: f.is_continuous(),
    };
    Ok(TranslateTestSet { set, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::sliding::{grid, sliding_integral};
    use crate::error::Error;

    #[test]
    fn tent_is_monotone() {
        let w = Window::from_ints(-6, 6).unwrap();
        let t = translate_test_set(&Profile::tent(), &w).unwrap();
        assert!(t.certificate.consistent());
        let bs = grid(-4.0, 4.0, 1.0 / 64.0);
        let vals = sliding_integral(&Profile::tent(), &t.set, &w, 1.0, &bs).unwrap();
        let min_inc = vals
            .windows(2)
            .map(|v| v[1] - v[0])
            .fold(f64::INFINITY, f64::min);
        assert!(min_inc > 0.0, "{min_inc}");
        let far = sliding_integral(&Profile::tent(), &t.set, &w, 1.0, &[5.5]);
        assert!(matches!(far, Err(Error::WindowExceeded { .. })));
    }

    #[test]
    fn shifted_wide_profile() {
        let f = Profile::new(vec![1.0, 2.0, 3.0, 4.0], vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let w = Window::from_ints(-10, 16).unwrap();
        let t = translate_test_set(&f, &w).unwrap();
        let bs = grid(-8.0, 9.0, 1.0 / 16.0);
        let vals = sliding_integral(&f, &t.set, &w, 1.0, &bs).unwrap();
        assert!(vals.windows(2).all(|v| v[1] > v[0]));
    }

    #[test]
    fn zero_profile_rejected() {
        let w = Window::from_ints(-6, 6).unwrap();
        assert!(matches!(
            translate_test_set(&Profile::zero(), &w),
            Err(Error::ZeroProfile)
        ));
    }
}
