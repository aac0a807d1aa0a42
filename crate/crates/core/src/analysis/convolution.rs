//! Numerical check of `(p ∗ q)′ = p′ ∗ q` for piecewise-linear `p` and
//! piecewise-constant `q`.

use crate::analysis::variation::variation_and_derivative;
use crate::profile::{Profile, StepProfile};

pub const DIFF_STEP: f64 = 1e-4;

/// `(p ∗ q)(x)` from the antiderivative of `p`.
pub fn convolve(p: &Profile, q: &StepProfile, x: f64) -> f64 {
    let Some((lo, _)) = p.support() else {
        return 0.0;
    };
    let big_p = |t: f64| p.integral_between(lo, t);
    q.pieces()
        .map(|(a, b, v)| v * (big_p(x - a) - big_p(x - b)))
        .sum()
}

/// `(g ∗ q)(x)` for two step functions, by interval overlaps.
pub fn convolve_steps(g: &StepProfile, q: &StepProfile, x: f64) -> f64 {
    let mut s = 0.0;
    for (c, d, u) in g.pieces() {
        // g(x − y) ≠ 0 for y ∈ (x − d, x − c]
        for (a, b, v) in q.pieces() {
            let len = (x - c).min(b) - (x - d).max(a);
            if len > 0.0 {
                s += u * v * len;
            }
        }
    }
    s
}

/// Max over `samples` of `|central difference of p∗q − p′∗q|`.
pub fn convolution_identity_check(p: &Profile, q: &StepProfile, samples: &[f64]) -> f64 {
    let (_, dp) = variation_and_derivative(p);
    samples
        .iter()
        .map(|&x| {
            let h = DIFF_STEP;
            let fd = (convolve(p, q, x + h) - convolve(p, q, x - h)) / (2.0 * h);
            (fd - convolve_steps(&dp, q, x)).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples() -> Vec<f64> {
        (0..1000).map(|k| -1.5 + (k as f64 + 0.5) * 0.004).collect()
    }

    #[test]
    fn tent_with_unit_indicator() {
        let q = StepProfile::indicator(0.0, 1.0).unwrap();
        assert!(convolution_identity_check(&Profile::tent(), &q, &samples()) <= 1e-6);
        let m = StepProfile::indicator(-1.0, 0.0).unwrap();
        assert!(convolution_identity_check(&Profile::tent(), &m, &samples()) <= 1e-6);
    }

    #[test]
    fn zero_kernel() {
        assert_eq!(
            convolution_identity_check(&Profile::tent(), &StepProfile::zero(), &samples()),
            0.0
        );
    }

    #[test]
    fn closed_form_value() {
        // (tent ∗ χ_[0,1])(0) = ∫_0^1 tent(−y) dy = 1/2
        let q = StepProfile::indicator(0.0, 1.0).unwrap();
        assert!((convolve(&Profile::tent(), &q, 0.0) - 0.5).abs() < 1e-15);
    }
}
