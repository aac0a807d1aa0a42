//! Partial integrals of `|p̂(r)|² |r|^power` from a dense FFT.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::profile::Profile;

pub const FFT_SAMPLES: usize = 1 << 20;
pub const PLATEAU_RATIO: f64 = 1.05;
pub const GROWTH_RATIO: f64 = 1.5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    pub cutoffs: Vec<f64>,
    pub partials: Vec<f64>,
    /// `partials[last] / partials[last-1]`
    pub last_ratio: f64,
}

impl SpectralReport {
    pub fn plateaus(&self) -> bool {
        self.last_ratio < PLATEAU_RATIO
    }

    pub fn grows(&self) -> bool {
        self.last_ratio > GROWTH_RATIO
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("cutoff,partial\n");
        for (c, v) in self.cutoffs.iter().zip(&self.partials) {
            s.push_str(&format!("{c},{v}\n"));
        }
        s
    }
}

/// `I(R) = ∫_{|r|≤R} |p̂(r)|² |r|^power dr` with `p̂(r) = ∫ p(x) e^{−2πirx} dx`,
/// sampled on [`FFT_SAMPLES`] points spanning four support widths.
pub fn ac_diagnostic(p: &Profile, power: f64, cutoffs: &[f64]) -> SpectralReport {
    ac_diagnostic_with(p, power, cutoffs, FFT_SAMPLES)
}

pub fn ac_diagnostic_with(
    p: &Profile,
    power: f64,
    cutoffs: &[f64],
    samples: usize,
) -> SpectralReport {
    let partials = match p.support() {
        None => vec![0.0; cutoffs.len()],
        Some((a, b)) => {
            let width = b - a;
            let span = 4.0 * width;
            let start = a - 1.5 * width;
            let n = samples;
            let dx = span / n as f64;
            let mut buf: Vec<Complex<f64>> = (0..n)
                .map(|j| {
                    let x = start + (j as f64 + 0.5) * dx;
                    Complex::new(p.eval(x), 0.0)
                })
                .collect();
            FftPlanner::new().plan_fft_forward(n).process(&mut buf);
            let dr = 1.0 / span;
            // (|r|, weight) for each frequency bin, sorted by |r|
            let mut bins: Vec<(f64, f64)> = buf
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    let kk = if k <= n / 2 {
                        k as f64
                    } else {
                        k as f64 - n as f64
                    };
                    let r = (kk * dr).abs();
                    let mag = c.norm_sqr() * dx * dx;
                    let w = if power == 0.0 { 1.0 } else { r.powf(power) };
                    (r, mag * w * dr)
                })
                .collect();
            bins.sort_by(|x, y| x.0.total_cmp(&y.0));
            let mut out = Vec::with_capacity(cutoffs.len());
            let mut acc = 0.0;
            let mut i = 0;
            for &c in cutoffs {
                while i < bins.len() && bins[i].0 <= c {
                    acc += bins[i].1;
                    i += 1;
                }
                out.push(acc);
            }
            out
        }
    };
    let last_ratio = match partials.len() {
        0 | 1 => 1.0,
        k if partials[k - 2] > 0.0 => partials[k - 1] / partials[k - 2],
        k if partials[k - 1] > 0.0 => f64::INFINITY,
        _ => 1.0,
    };
    SpectralReport {
        cutoffs: cutoffs.to_vec(),
        partials,
        last_ratio,
    }
}

/// Cutoffs `start, 2·start, …` (`count` values).
pub fn doubling_cutoffs(start: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| start * 2f64.powi(k as i32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: usize = 1 << 16;

    #[test]
    fn plancherel_at_power_zero() {
        let t = Profile::tent();
        let rep = ac_diagnostic_with(&t, 0.0, &[1e9], N);
        // ‖tent‖₂² = 2/3
        assert!((rep.partials[0] - 2.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn indicator_grows_and_tent_plateaus() {
        let cut = doubling_cutoffs(16.0, 5);
        let ind = Profile::indicator(0.0, 1.0, 1.0).unwrap();
        let r = ac_diagnostic_with(&ind, 2.0, &cut, N);
        assert!(r.grows(), "{:?}", r.partials);
        let t = ac_diagnostic_with(&Profile::tent(), 2.0, &cut, N);
        assert!(t.plateaus(), "{:?}", t.partials);
        assert!(t.partials.windows(2).all(|w| w[1] >= w[0]));
    }
}
