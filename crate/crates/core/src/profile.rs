//! Piecewise-linear and piecewise-constant functions on the line.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A compactly supported, non-negative, piecewise-linear function.
///
/// Breakpoints are non-decreasing; a repeated breakpoint encodes a jump.
/// The function is zero outside `[xs[0], xs[last]]`, so a positive first
/// or last value is a jump at the support boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Known bound on the L1 distance to the function this profile stands for.
    approx_error: f64,
}

/// One linear piece `[x0, x1]` with endpoint values, `x0 < x1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Segment {
    pub fn slope(&self) -> f64 {
        (self.y1 - self.y0) / (self.x1 - self.x0)
    }

    pub fn at(&self, x: f64) -> f64 {
        self.y0 + (x - self.x0) * self.slope()
    }

    /// Integral over `[lo, hi] ∩ [x0, x1]`.
    pub fn integral_between(&self, lo: f64, hi: f64) -> f64 {
        let a = lo.max(self.x0);
        let b = hi.min(self.x1);
        if b <= a {
            return 0.0;
        }
        0.5 * (b - a) * (self.at(a) + self.at(b))
    }
}

impl Profile {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidArgument(
                "breakpoint and value counts differ".into(),
            ));
        }
        if xs.len() == 1 {
            return Err(Error::InvalidArgument(
                "a profile needs at least two breakpoints".into(),
            ));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite profile data".into()));
        }
        if xs.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument(
                "breakpoints must be non-decreasing".into(),
            ));
        }
        if ys.iter().any(|&y| y < 0.0) {
            return Err(Error::InvalidArgument(
                "profile values must be non-negative".into(),
            ));
        }
        if xs.len() >= 2 && xs[0] == xs[xs.len() - 1] {
            return Err(Error::InvalidArgument(
                "profile support is a single point".into(),
            ));
        }
        Ok(Profile {
            xs,
            ys,
            approx_error: 0.0,
        })
    }

    pub fn zero() -> Self {
        Profile {
            xs: Vec::new(),
            ys: Vec::new(),
            approx_error: 0.0,
        }
    }

    /// `max(0, 1 - |x|)`.
    pub fn tent() -> Self {
        Profile::new(vec![-1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]).unwrap()
    }

    /// `height` on `[lo, hi]`, zero elsewhere.
    pub fn indicator(lo: f64, hi: f64, height: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::InvalidArgument("indicator needs lo < hi".into()));
        }
        Profile::new(vec![lo, hi], vec![height, height])
    }

    /// Piecewise-constant profile from disjoint ascending `(lo, hi, height)`.
    pub fn from_steps(pieces: &[(f64, f64, f64)]) -> Result<Self> {
        let mut xs = Vec::with_capacity(4 * pieces.len());
        let mut ys = Vec::with_capacity(4 * pieces.len());
        for &(lo, hi, v) in pieces {
            if !(lo < hi) {
                continue;
            }
            if let Some(&last) = xs.last() {
                if lo < last {
                    return Err(Error::InvalidArgument("step pieces overlap".into()));
                }
                if lo > last {
                    xs.push(last);
                    ys.push(0.0);
                    xs.push(lo);
                    ys.push(0.0);
                }
            }
            xs.push(lo);
            ys.push(v);
            xs.push(hi);
            ys.push(v);
        }
        if xs.is_empty() {
            return Ok(Profile::zero());
        }
        Profile::new(xs, ys)
    }

    pub fn with_error(mut self, err: f64) -> Self {
        self.approx_error = err;
        self
    }

    pub fn approx_error(&self) -> f64 {
        self.approx_error
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.ys
    }

    pub fn is_zero(&self) -> bool {
        self.ys.iter().all(|&y| y == 0.0)
    }

    /// No jumps, including at the ends of the support.
    pub fn is_continuous(&self) -> bool {
        let n = self.ys.len();
        n == 0
            || (self.ys[0] == 0.0
                && self.ys[n - 1] == 0.0
                && self
                    .xs
                    .windows(2)
                    .zip(self.ys.windows(2))
                    .all(|(x, y)| x[0] < x[1] || y[0] == y[1]))
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        if self.xs.is_empty() {
            None
        } else {
            Some((self.xs[0], self.xs[self.xs.len() - 1]))
        }
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.xs
            .windows(2)
            .zip(self.ys.windows(2))
            .filter_map(|(x, y)| {
                (x[0] < x[1]).then_some(Segment {
                    x0: x[0],
                    x1: x[1],
                    y0: y[0],
                    y1: y[1],
                })
            })
    }

    /// Right-continuous evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_side(x, true)
    }

    pub fn eval_left(&self, x: f64) -> f64 {
        self.eval_side(x, false)
    }

    fn eval_side(&self, x: f64, right: bool) -> f64 {
        let n = self.xs.len();
        if n == 0 {
            return 0.0;
        }
        let (lo, hi) = (self.xs[0], self.xs[n - 1]);
        if x < lo || x > hi || (right && x == hi) || (!right && x == lo) {
            return 0.0;
        }
        // i: first breakpoint strictly greater (right) or >= (left)
        let i = if right {
            self.xs.partition_point(|&v| v <= x)
        } else {
            self.xs.partition_point(|&v| v < x)
        };
        if right {
            let (x0, x1, y0, y1) = (self.xs[i - 1], self.xs[i], self.ys[i - 1], self.ys[i]);
            if x == x0 {
                return y0;
            }
            y0 + (x - x0) * (y1 - y0) / (x1 - x0)
        } else {
            let (x0, x1, y0, y1) = (self.xs[i - 1], self.xs[i], self.ys[i - 1], self.ys[i]);
            if x == x1 {
                return y1;
            }
            y0 + (x - x0) * (y1 - y0) / (x1 - x0)
        }
    }

    pub fn integral(&self) -> f64 {
        self.segments()
            .map(|s| 0.5 * (s.x1 - s.x0) * (s.y0 + s.y1))
            .sum()
    }

    pub fn integral_between(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        self.segments()
            .filter(|s| s.x1 > lo && s.x0 < hi)
            .map(|s| s.integral_between(lo, hi))
            .sum()
    }

    /// `t ↦ p(t - s)`.
    pub fn shifted(&self, s: f64) -> Profile {
        Profile {
            xs: self.xs.iter().map(|x| x + s).collect(),
            ys: self.ys.clone(),
            approx_error: self.approx_error,
        }
    }

    /// `t ↦ c · p(t / r)` for `r > 0`, `c ≥ 0`.
    pub fn rescaled(&self, r: f64, c: f64) -> Profile {
        assert!(r > 0.0 && c >= 0.0);
        Profile {
            xs: self.xs.iter().map(|x| x * r).collect(),
            ys: self.ys.iter().map(|y| y * c).collect(),
            approx_error: self.approx_error * r * c,
        }
    }

    /// `t ↦ p(-t)`.
    pub fn reflected(&self) -> Profile {
        Profile {
            xs: self.xs.iter().rev().map(|x| -x).collect(),
            ys: self.ys.iter().rev().copied().collect(),
            approx_error: self.approx_error,
        }
    }

    pub fn max_value(&self) -> f64 {
        self.ys.iter().copied().fold(0.0, f64::max)
    }

    /// Rows `breakpoint,value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("breakpoint,value\n");
        for (x, y) in self.xs.iter().zip(&self.ys) {
            writeln!(s, "{x},{y}").unwrap();
        }
        s
    }
}

/// A compactly supported piecewise-constant function.
///
/// `values[i]` holds on `[xs[i], xs[i+1])`; zero outside `[xs[0], xs[last])`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepProfile {
    xs: Vec<f64>,
    values: Vec<f64>,
}

impl StepProfile {
    pub fn new(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() && xs.is_empty() {
            return Ok(StepProfile::zero());
        }
        if xs.len() != values.len() + 1 {
            return Err(Error::InvalidArgument(
                "step profile needs one more breakpoint than values".into(),
            ));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument(
                "step breakpoints must be strictly increasing".into(),
            ));
        }
        if xs.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite step data".into()));
        }
        Ok(StepProfile { xs, values })
    }

    pub fn zero() -> Self {
        StepProfile {
            xs: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn indicator(lo: f64, hi: f64) -> Result<Self> {
        StepProfile::new(vec![lo, hi], vec![1.0])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.xs.windows(2).map(|w| w[1] - w[0])
    }

    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.xs
            .windows(2)
            .zip(&self.values)
            .map(|(w, &v)| (w[0], w[1], v))
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.values.is_empty() || x < self.xs[0] || x >= self.xs[self.xs.len() - 1] {
            return 0.0;
        }
        let i = self.xs.partition_point(|&v| v <= x);
        self.values[i - 1]
    }

    /// Total variation, counting the jumps from and back to zero at the ends.
    pub fn variation(&self) -> f64 {
        variation_of(&self.values)
    }

    pub fn l1_norm(&self) -> f64 {
        self.pieces().map(|(a, b, v)| (b - a) * v.abs()).sum()
    }

    pub fn integral(&self) -> f64 {
        self.pieces().map(|(a, b, v)| (b - a) * v).sum()
    }

    /// `‖self − other‖₁` by merging breakpoints.
    pub fn l1_distance(&self, other: &StepProfile) -> f64 {
        let mut pts: Vec<f64> = self.xs.iter().chain(&other.xs).copied().collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts.windows(2)
            .map(|w| {
                let m = 0.5 * (w[0] + w[1]);
                (w[1] - w[0]) * (self.eval(m) - other.eval(m)).abs()
            })
            .sum()
    }

    /// Same breakpoints, values replaced.
    pub fn with_values(&self, values: Vec<f64>) -> StepProfile {
        assert_eq!(values.len(), self.values.len());
        StepProfile {
            xs: self.xs.clone(),
            values,
        }
    }

    /// `min(n, max(-n, g))`.
    pub fn clamped(&self, n: f64) -> StepProfile {
        self.with_values(self.values.iter().map(|v| v.clamp(-n, n)).collect())
    }

    /// Merge adjacent pieces carrying equal values.
    pub fn simplified(&self) -> StepProfile {
        if self.values.is_empty() {
            return self.clone();
        }
        let mut xs = vec![self.xs[0]];
        let mut vals: Vec<f64> = Vec::new();
        for (i, &v) in self.values.iter().enumerate() {
            if vals.last() == Some(&v) {
                *xs.last_mut().unwrap() = self.xs[i + 1];
            } else {
                vals.push(v);
                xs.push(self.xs[i + 1]);
            }
        }
        StepProfile { xs, values: vals }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("lo,hi,value\n");
        for (a, b, v) in self.pieces() {
            writeln!(s, "{a},{b},{v}").unwrap();
        }
        s
    }
}

pub(crate) fn variation_of(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let inner: f64 = values.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    inner + values[0].abs() + values[values.len() - 1].abs()
}
