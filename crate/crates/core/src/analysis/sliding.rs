//! Integrals of a scaled, shifted profile over an interval set.
//!
//! `F_a(b) = ∫_T p((x − b)/a) dx`. On every linear piece of the integrand
//! only the measure and first moment of `T` over a range are needed, so a
//! [`MomentTable`] answers each piece with two binary searches.

use crate::error::{Error, Result};
use crate::interval::{IntervalSet, Window};
use crate::profile::Profile;

const STRIDE: usize = 32;

/// Range moments of an interval set, exact on whole intervals.
pub struct MomentTable<'a> {
    set: &'a IntervalSet,
    scale: f64,
    /// Exact prefix sums of `hi - lo` at every `STRIDE`-th interval.
    m0: Vec<i128>,
    /// Exact prefix sums of `hi² - lo²` (in units of `2^{-2e}`).
    m1: Vec<i128>,
}

impl<'a> MomentTable<'a> {
    pub fn new(set: &'a IntervalSet) -> Self {
        let ends = set.raw_ends();
        let n = set.len();
        let mut m0 = Vec::with_capacity(n / STRIDE + 2);
        let mut m1 = Vec::with_capacity(n / STRIDE + 2);
        let (mut a0, mut a1) = (0i128, 0i128);
        for k in 0..n {
            if k % STRIDE == 0 {
                m0.push(a0);
                m1.push(a1);
            }
            let (lo, hi) = (ends[2 * k] as i128, ends[2 * k + 1] as i128);
            a0 += hi - lo;
            a1 += (hi - lo) * (hi + lo);
        }
        m0.push(a0);
        m1.push(a1);
        MomentTable {
            set,
            scale: 2f64.powi(-(set.exp() as i32)),
            m0,
            m1,
        }
    }

    pub fn set(&self) -> &IntervalSet {
        self.set
    }

    /// Exact sums over intervals `[0, k)`, returned as (m0, m1) numerators.
    fn prefix(&self, k: usize) -> (i128, i128) {
        let ends = self.set.raw_ends();
        let c = k / STRIDE;
        let (mut a0, mut a1) = (self.m0[c], self.m1[c]);
        for j in c * STRIDE..k {
            let (lo, hi) = (ends[2 * j] as i128, ends[2 * j + 1] as i128);
            a0 += hi - lo;
            a1 += (hi - lo) * (hi + lo);
        }
        (a0, a1)
    }

    /// Number of intervals whose upper end is at most `y`.
    fn below(&self, y: f64) -> usize {
        let ends = self.set.raw_ends();
        let ys = y / self.scale;
        let n = self.set.len();
        let (mut lo, mut hi) = (0usize, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if (ends[2 * mid + 1] as f64) <= ys {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// `(∫_{T∩[y0,y1]} 1, ∫_{T∩[y0,y1]} (x − y0) dx)`.
    pub fn range_moments(&self, y0: f64, y1: f64) -> (f64, f64) {
        if !(y1 > y0) || self.set.is_empty() {
            return (0.0, 0.0);
        }
        let ends = self.set.raw_ends();
        let s = self.scale;
        let n = self.set.len();
        let i0 = self.below(y0);
        let i1 = self.below(y1);
        let (mut m0, mut m1) = (0.0, 0.0);
        let mut add = |lo: f64, hi: f64| {
            let (a, b) = (lo.max(y0), hi.min(y1));
            if b > a {
                m0 += b - a;
                m1 += 0.5 * (b - a) * ((a - y0) + (b - y0));
            }
        };
        if i0 < n {
            add(ends[2 * i0] as f64 * s, ends[2 * i0 + 1] as f64 * s);
        }
        if i1 < n && i1 != i0 {
            add(ends[2 * i1] as f64 * s, ends[2 * i1 + 1] as f64 * s);
        }
        if i1 > i0 + 1 {
            // whole intervals i0+1 .. i1-1
            let (p0, p1) = self.prefix(i0 + 1);
            let (q0, q1) = self.prefix(i1);
            let d0 = (q0 - p0) as f64 * s;
            let d1 = (q1 - p1) as f64 * (0.5 * s * s);
            m0 += d0;
            m1 += d1 - y0 * d0;
        }
        (m0, m1)
    }
}

fn check_scale(a: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::NonPositiveScale(a.to_string()));
    }
    Ok(())
}

/// `F_a(b)` for one `b`, with the support check against `window`.
pub fn sliding_value(
    p: &Profile,
    table: &MomentTable,
    window: &Window,
    a: f64,
    b: f64,
) -> Result<f64> {
    check_scale(a)?;
    let Some((s0, s1)) = p.support() else {
        return Ok(0.0);
    };
    window.require(b + a * s0, b + a * s1)?;
    let mut total = 0.0;
    for seg in p.segments() {
        let x0 = b + a * seg.x0;
        let x1 = b + a * seg.x1;
        let (m0, m1) = table.range_moments(x0, x1);
        let slope = (seg.y1 - seg.y0) / (x1 - x0);
        total += seg.y0 * m0 + slope * m1;
    }
    Ok(total)
}

/// `F_a(b)` at every `b` in `b_grid`.
pub fn sliding_integral(
    p: &Profile,
    t: &IntervalSet,
    window: &Window,
    a: f64,
    b_grid: &[f64],
) -> Result<Vec<f64>> {
    let table = MomentTable::new(t);
    b_grid
        .iter()
        .map(|&b| sliding_value(p, &table, window, a, b))
        .collect()
}

/// Values `lo, lo + step, …` up to `hi` inclusive.
pub fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| lo + step * k as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Dyadic;

    fn window() -> Window {
        Window::from_ints(-16, 16).unwrap()
    }

    #[test]
    fn tent_half_and_full_mass() {
        let t = IntervalSet::normalize([(Dyadic::ZERO, Dyadic::from_int(10))]);
        let f = sliding_integral(&Profile::tent(), &t, &window(), 1.0, &[0.0]).unwrap();
        assert!((f[0] - 0.5).abs() < 1e-15);
        let full = window().as_set();
        let g =
            sliding_integral(&Profile::tent(), &full, &window(), 3.0, &[-2.0, 0.3, 5.0]).unwrap();
        for v in g {
            assert!((v - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tent_tail_closed_form() {
        let t = IntervalSet::normalize([(Dyadic::ZERO, Dyadic::from_int(10))]);
        let bs = grid(-1.0, 1.0, 1.0 / 16.0);
        let f = sliding_integral(&Profile::tent(), &t, &window(), 1.0, &bs).unwrap();
        for (b, v) in bs.iter().zip(&f) {
            // mass of the tent centred at b to the right of 0
            let exact = if *b <= 0.0 {
                0.5 * (1.0 + b) * (1.0 + b)
            } else {
                1.0 - 0.5 * (1.0 - b) * (1.0 - b)
            };
            assert!((v - exact).abs() < 1e-14, "b={b}");
        }
        assert!(f.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn many_intervals_match_direct_sum() {
        let pairs: Vec<(i64, i64)> = (0..500).map(|k| (3 * k, 3 * k + 1 + k % 2)).collect();
        let t = IntervalSet::from_nums(6, &pairs);
        let table = MomentTable::new(&t);
        for &(y0, y1) in &[(0.1, 20.3), (1.0 / 64.0, 2.0), (5.5, 5.51), (-3.0, 40.0)] {
            let (m0, m1) = table.range_moments(y0, y1);
            let (mut e0, mut e1) = (0.0, 0.0);
            for (lo, hi) in t.intervals_f64() {
                let (a, b) = (lo.max(y0), hi.min(y1));
                if b > a {
                    e0 += b - a;
                    e1 += 0.5 * ((b - y0).powi(2) - (a - y0).powi(2));
                }
            }
            assert!(
                (m0 - e0).abs() < 1e-12 && (m1 - e1).abs() < 1e-11,
                "{y0} {y1}"
            );
        }
    }

    #[test]
    fn window_and_scale_errors() {
        let t = IntervalSet::empty();
        let w = Window::from_ints(-2, 2).unwrap();
        assert!(matches!(
            sliding_integral(&Profile::tent(), &t, &w, 1.0, &[1.5]),
            Err(Error::WindowExceeded { .. })
        ));
        assert!(sliding_integral(&Profile::tent(), &t, &w, 0.0, &[0.0]).is_err());
    }
}
