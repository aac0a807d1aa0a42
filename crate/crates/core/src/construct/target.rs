//! Smooth increasing targets `Φ : R → (0, 1)` approximated by indicators.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{integrate, integrate_composite};

/// Something whose block integrals a quantizer can follow.
pub trait Target: Sync {
    fn phi(&self, x: f64) -> f64;

    /// `∫_lo^hi Φ`.
    fn integral(&self, lo: f64, hi: f64) -> f64 {
        integrate(|x| self.phi(x), lo, hi)
    }

    /// `∫ Φ` over `[lo + k·w, lo + (k+1)·w]` for `k < n`.
    fn block_integrals(&self, lo: f64, w: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|k| self.integral(lo + w * k as f64, lo + w * (k + 1) as f64))
            .collect()
    }
}

/// An arbitrary function, integrated by Gauss–Legendre.
pub struct FnTarget<F>(pub F);

impl<F: Fn(f64) -> f64 + Sync> Target for FnTarget<F> {
    fn phi(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SmoothTarget {
    /// `Φ(x) = 1 / (1 + e^{−rate·x})`.
    Logistic { rate: f64 },
    /// `Φ′(x) = c₁ / (s ln² s)` with `s = (e² + x²)^{1/2}`, `Φ(0) = 1/2`.
    LogSquaredDecay { c1: f64 },
}

/// `∫_0^∞ dx / (s ln² s)`; substituting `x = e·sinh w` gives
/// `∫_0^∞ dw / (1 + ln cosh w)²`.
pub fn log_squared_total() -> f64 {
    static CELL: OnceLock<f64> = OnceLock::new();
    *CELL.get_or_init(|| {
        let w_max = 60.0;
        let head = integrate_composite(lsd_w_integrand, 0.0, w_max, 600);
        // ln cosh w = w − ln 2 up to e^{−2w}
        head + 1.0 / (1.0 + w_max - std::f64::consts::LN_2)
    })
}

fn lsd_w_integrand(w: f64) -> f64 {
    let lc = w + (-2.0 * w).exp().ln_1p() - std::f64::consts::LN_2;
    1.0 / ((1.0 + lc) * (1.0 + lc))
}

/// `∫_0^x dt / (s ln² s)` for `x ≥ 0`.
fn lsd_partial(x: f64) -> f64 {
    let w = (x / std::f64::consts::E).asinh();
    let pieces = ((w * 8.0).ceil() as usize).max(1);
    integrate_composite(lsd_w_integrand, 0.0, w, pieces)
}

/// Default `c₁` keeping `Φ` inside `(0.05, 0.95)`.
pub fn default_c1() -> f64 {
    0.45 / log_squared_total()
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

impl SmoothTarget {
    pub fn logistic(rate: f64) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "logistic rate {rate} must be positive"
            )));
        }
        Ok(SmoothTarget::Logistic { rate })
    }

    pub fn log_squared(c1: f64) -> Result<Self> {
        let cap = 0.5 / log_squared_total();
        if !(c1 > 0.0 && c1 < cap) {
            return Err(Error::InvalidArgument(format!(
                "c1 must lie in (0, {cap}) so that Φ stays in (0, 1)"
            )));
        }
        Ok(SmoothTarget::LogSquaredDecay { c1 })
    }

    pub fn dphi(&self, x: f64) -> f64 {
        match *self {
            SmoothTarget::Logistic { rate } => {
                let e = (-rate * x.abs()).exp();
                rate * e / ((1.0 + e) * (1.0 + e))
            }
            SmoothTarget::LogSquaredDecay { c1 } => {
                let s = (std::f64::consts::E * std::f64::consts::E + x * x).sqrt();
                let l = s.ln();
                c1 / (s * l * l)
            }
        }
    }

    /// `min Φ′` over `[lo, hi]`; `Φ′` decreases in `|x|`.
    pub fn min_dphi(&self, lo: f64, hi: f64) -> f64 {
        if lo <= 0.0 && hi >= 0.0 {
            self.dphi(lo).min(self.dphi(hi))
        } else {
            self.dphi(if lo > 0.0 { hi } else { lo })
        }
    }
}

impl Target for SmoothTarget {
    fn phi(&self, x: f64) -> f64 {
        match *self {
            SmoothTarget::Logistic { rate } => 1.0 / (1.0 + (-rate * x).exp()),
            SmoothTarget::LogSquaredDecay { c1 } => 0.5 + x.signum() * c1 * lsd_partial(x.abs()),
        }
    }

    fn integral(&self, lo: f64, hi: f64) -> f64 {
        match *self {
            SmoothTarget::Logistic { rate } => (softplus(rate * hi) - softplus(rate * lo)) / rate,
            SmoothTarget::LogSquaredDecay { .. } => {
                let pieces = ((hi - lo).abs().ceil() as usize).max(1) * 4;
                integrate_composite(|x| self.phi(x), lo, hi, pieces)
            }
        }
    }

    /// Steps `Φ` across the blocks with a two-point rule on `Φ′`, re-anchoring
    /// periodically, and integrates each block by the corrected trapezoid rule.
    fn block_integrals(&self, lo: f64, w: f64, n: usize) -> Vec<f64> {
        if let SmoothTarget::Logistic { .. } = self {
            return (0..n)
                .map(|k| self.integral(lo + w * k as f64, lo + w * (k + 1) as f64))
                .collect();
        }
        const ANCHOR: usize = 4096;
        let g = 0.5 / 3f64.sqrt();
        let mut out = Vec::with_capacity(n);
        let mut x0 = lo;
        let mut f0 = self.phi(x0);
        let mut d0 = self.dphi(x0);
        for k in 0..n {
            let x1 = lo + w * (k + 1) as f64;
            let f1 = if (k + 1) % ANCHOR == 0 {
                self.phi(x1)
            } else {
                let m = 0.5 * (x0 + x1);
                let h = x1 - x0;
                f0 + 0.5 * h * (self.dphi(m - g * h) + self.dphi(m + g * h))
            };
            let d1 = self.dphi(x1);
            let h = x1 - x0;
            out.push(0.5 * h * (f0 + f1) - h * h / 12.0 * (d1 - d0));
            x0 = x1;
            f0 = f1;
            d0 = d1;
        }
        out
    }
}
