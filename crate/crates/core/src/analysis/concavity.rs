use serde::Serialize;

use crate::profile::Profile;

pub const CONCAVITY_TOLERANCE: f64 = -1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConcavityReport {
    pub is_concave: bool,
    /// Most negative three-point defect, relative to the largest value.
    pub worst_margin: f64,
}

/// Three-point concavity of `p^{1/(d−1)}` across the convex hull of the
/// support, on the breakpoint grid refined four times.
pub fn concavity_check(p: &Profile, d: usize) -> ConcavityReport {
    assert!(d >= 2, "dimension must be at least 2");
    let Some((lo, hi)) = p.support() else {
        return ConcavityReport {
            is_concave: true,
            worst_margin: 0.0,
        };
    };
    let k = 1.0 / (d - 1) as f64;
    let mut xs: Vec<f64> = p.breakpoints().to_vec();
    xs.dedup();
    let mut grid = Vec::with_capacity(4 * xs.len());
    for w in xs.windows(2) {
        for j in 0..4 {
            grid.push(w[0] + (w[1] - w[0]) * j as f64 / 4.0);
        }
    }
    grid.push(hi);
    let q = |x: f64| -> f64 {
        let v = if x == lo {
            p.eval(x)
        } else if x == hi {
            p.eval_left(x)
        } else {
            p.eval(x).min(p.eval_left(x))
        };
        v.powf(k)
    };
    let qs: Vec<f64> = grid.iter().map(|&x| q(x)).collect();
    let top = qs.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return ConcavityReport {
            is_concave: true,
            worst_margin: 0.0,
        };
    }
    let mut worst = 0.0f64;
    for i in 1..grid.len().saturating_sub(1) {
        let (x0, x1, x2) = (grid[i - 1], grid[i], grid[i + 1]);
        let chord = ((x2 - x1) * qs[i - 1] + (x1 - x0) * qs[i + 1]) / (x2 - x0);
        worst = worst.min((qs[i] - chord) / top);
    }
    ConcavityReport {
        is_concave: worst >= CONCAVITY_TOLERANCE,
        worst_margin: worst,
    }
}
