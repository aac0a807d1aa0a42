//! Measure vectors, monotonicity and injectivity checks.

pub mod monte_carlo;
pub mod search;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::interval::{Cumulative, IntervalSet};
use crate::random::GridSet;
use crate::shapes::{Pose, Shape};
use crate::slab::{SlabMeasurer, SlabTestSet};

pub use monte_carlo::{monte_carlo_reconstruction, MonteCarloReport, TrialLog};
pub use search::{interval_counterexample, Counterexample};

/// Quadrature-backed pairs need a separation above this multiple of their error.
pub const ERROR_FACTOR: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "set", rename_all = "snake_case")]
pub enum TestSet {
    Interval(IntervalSet),
    Slab(SlabTestSet),
    Grid(GridSet),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Violation,
    Indeterminate,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Violation => 2,
            Status::Indeterminate => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureVector {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    /// Present when every component was computed exactly.
    pub exact: Option<Vec<Dyadic>>,
}

enum Prepared<'a> {
    Exact(IntervalSet),
    Slab(SlabMeasurer<'a>),
}

/// A one-dimensional body as an exact interval set, if it has one.
fn exact_body(e: &Shape, pose: &Pose) -> Result<IntervalSet> {
    let base = match e {
        Shape::IntervalUnion { set } => set.clone(),
        Shape::Box { lo, hi } if lo.len() == 1 => {
            let conv = |x: f64| {
                Dyadic::from_f64_exact(x)
                    .ok_or_else(|| Error::InvalidArgument("non-dyadic box".into()))
            };
            IntervalSet::normalize([(conv(lo[0])?, conv(hi[0])?)])
        }
        _ => {
            return Err(Error::InvalidArgument(
                "exact measures need a one-dimensional interval body".into(),
            ))
        }
    };
    let conv = |x: f64| {
        Dyadic::from_f64_exact(x)
            .ok_or_else(|| Error::InvalidArgument(format!("pose component {x} is not dyadic")))
    };
    base.affine(conv(pose.scale)?, conv(pose.translation[0])?)
}

fn exact_measure(body: &IntervalSet, t: &Cumulative) -> Dyadic {
    body.intervals().map(|(lo, hi)| t.between(lo, hi)).sum()
}

/// Evaluates measure vectors of many poses of one body against fixed tests.
pub struct Measurer<'a> {
    shape: Shape,
    tests: Vec<Prepared<'a>>,
}

impl<'a> Measurer<'a> {
    pub fn new(e: &Shape, tests: &'a [TestSet], resolution: usize) -> Result<Self> {
        let mut prepared = Vec::with_capacity(tests.len());
        for t in tests {
            prepared.push(match t {
                TestSet::Interval(s) => Prepared::Exact(s.clone()),
                TestSet::Grid(g) => Prepared::Exact(g.to_interval_set()?),
                TestSet::Slab(s) => Prepared::Slab(SlabMeasurer::new(e, s, resolution)?),
            });
        }
        Ok(Measurer {
            shape: e.clone(),
            tests: prepared,
        })
    }

    pub fn measure(&self, pose: &Pose) -> Result<MeasureVector> {
        let needs_body = self.tests.iter().any(|t| matches!(t, Prepared::Exact(_)));
        let body = if needs_body {
            Some(exact_body(&self.shape, pose)?)
        } else {
            None
        };
        self.measure_with(pose, body.as_ref())
    }

    fn measure_with(&self, pose: &Pose, body: Option<&IntervalSet>) -> Result<MeasureVector> {
        let mut values = Vec::with_capacity(self.tests.len());
        let mut errors = Vec::with_capacity(self.tests.len());
        let mut exact = Some(Vec::with_capacity(self.tests.len()));
        for t in &self.tests {
            match t {
                Prepared::Exact(s) => {
                    let m = exact_measure(body.expect("body prepared"), &s.cumulative());
                    values.push(m.to_f64());
                    errors.push(0.0);
                    if let Some(v) = exact.as_mut() {
                        v.push(m);
                    }
                }
                Prepared::Slab(m) => {
                    let r = m.measure(pose)?;
                    values.push(r.value);
                    errors.push(r.error);
                    exact = None;
                }
            }
        }
        Ok(MeasureVector {
            values,
            errors,
            exact,
        })
    }
}

/// Component `i` is the measure of the posed body inside test `i`.
pub fn measure_vector(
    e: &Shape,
    pose: &Pose,
    tests: &[TestSet],
    resolution: usize,
) -> Result<MeasureVector> {
    Measurer::new(e, tests, resolution)?.measure(pose)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub min_increment: f64,
    /// Indices `i` with `v[i] − v[i−1] ≤ 0`.
    pub violations: Vec<usize>,
    pub exact: bool,
}

impl MonotonicityReport {
    pub fn status(&self) -> Status {
        if self.violations.is_empty() {
            Status::Pass
        } else {
            Status::Violation
        }
    }
}

pub fn monotonicity_report(values: &[f64]) -> MonotonicityReport {
    let mut min_increment = f64::INFINITY;
    let mut violations = Vec::new();
    for (i, w) in values.windows(2).enumerate() {
        let d = w[1] - w[0];
        min_increment = min_increment.min(d);
        if !(d > 0.0) {
            violations.push(i + 1);
        }
    }
    MonotonicityReport {
        min_increment,
        violations,
        exact: false,
    }
}

pub fn monotonicity_report_exact(values: &[Dyadic]) -> MonotonicityReport {
    let mut min: Option<Dyadic> = None;
    let mut violations = Vec::new();
    for (i, w) in values.windows(2).enumerate() {
        let d = w[1] - w[0];
        min = Some(min.map_or(d, |m| m.min(d)));
        if !d.is_positive() {
            violations.push(i + 1);
        }
    }
    MonotonicityReport {
        min_increment: min.map_or(f64::INFINITY, |m| m.to_f64()),
        violations,
        exact: true,
    }
}

/// Exact `λ((E + x) ∩ T)` for each shift `x`.
pub fn translation_values(e: &IntervalSet, t: &IntervalSet, shifts: &[Dyadic]) -> Vec<Dyadic> {
    let cum = t.cumulative();
    shifts
        .iter()
        .map(|&x| {
            e.intervals()
                .map(|(lo, hi)| cum.between(lo + x, hi + x))
                .sum()
        })
        .collect()
}

/// Equally spaced dyadic parameter values `lo, lo + step, …` (`count` of them).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: Dyadic,
    pub step: Dyadic,
    pub count: usize,
}

impl Axis {
    /// `lo, lo + step, …` up to and including `hi` when it lies on the grid.
    pub fn range(lo: Dyadic, hi: Dyadic, step: Dyadic) -> Result<Axis> {
        if !step.is_positive() || hi < lo {
            return Err(Error::InvalidArgument(
                "axis needs step > 0 and hi ≥ lo".into(),
            ));
        }
        let mut count = 1usize;
        let mut x = lo + step;
        while x <= hi {
            count += 1;
            x = x + step;
            if count > 1 << 24 {
                return Err(Error::InvalidArgument("axis too long".into()));
            }
        }
        Ok(Axis { lo, step, count })
    }

    pub fn value(&self, i: usize) -> Dyadic {
        self.lo + self.step * Dyadic::from_int(i as i64)
    }

    pub fn values(&self) -> Vec<Dyadic> {
        (0..self.count).map(|i| self.value(i)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    /// `[x, x + L]`, axes `(x, L)`.
    Interval,
    /// `E + v`, one axis per coordinate.
    Translate { shape: Shape },
    /// `rE + v`, axes `(r, v₁, …, v_d)`.
    Magnify { shape: Shape },
}

/// A finite parameter grid, enumerated with the first axis slowest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyGrid {
    pub kind: FamilyKind,
    pub axes: Vec<Axis>,
}

impl FamilyGrid {
    pub fn new(kind: FamilyKind, axes: Vec<Axis>) -> Result<Self> {
        let want = match &kind {
            FamilyKind::Interval => 2,
            FamilyKind::Translate { shape } => shape.dim(),
            FamilyKind::Magnify { shape } => shape.dim() + 1,
        };
        if axes.len() != want {
            return Err(Error::Dimension {
                expected: want,
                got: axes.len(),
            });
        }
        match &kind {
            FamilyKind::Interval if !axes[1].lo.is_positive() => {
                return Err(Error::InvalidArgument(
                    "interval lengths must be positive".into(),
                ))
            }
            FamilyKind::Magnify { .. } if axes[0].lo < Dyadic::ONE => {
                return Err(Error::InvalidArgument(
                    "magnifications must be at least 1".into(),
                ))
            }
            _ => {}
        }
        Ok(FamilyGrid { kind, axes })
    }

    /// `[x, x + L]` for `x ∈ [x0, x1]`, `L ∈ [l0, l1]`, common step.
    pub fn intervals(x: (Dyadic, Dyadic), len: (Dyadic, Dyadic), step: Dyadic) -> Result<Self> {
        FamilyGrid::new(
            FamilyKind::Interval,
            vec![
                Axis::range(x.0, x.1, step)?,
                Axis::range(len.0, len.1, step)?,
            ],
        )
    }

    /// `E + v` for `v` in the cube `[lo, hi]^d`.
    pub fn translates(shape: Shape, lo: Dyadic, hi: Dyadic, step: Dyadic) -> Result<Self> {
        let d = shape.dim();
        let axis = Axis::range(lo, hi, step)?;
        FamilyGrid::new(FamilyKind::Translate { shape }, vec![axis; d])
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn params(&self, idx: usize) -> Vec<Dyadic> {
        let mut out = vec![Dyadic::ZERO; self.axes.len()];
        let mut rest = idx;
        for (k, a) in self.axes.iter().enumerate().rev() {
            out[k] = a.value(rest % a.count);
            rest /= a.count;
        }
        out
    }

    pub fn base_shape(&self) -> Shape {
        match &self.kind {
            FamilyKind::Interval => Shape::interval(Dyadic::ZERO, Dyadic::ONE),
            FamilyKind::Translate { shape } | FamilyKind::Magnify { shape } => shape.clone(),
        }
    }

    /// Pose of instance `idx` relative to [`FamilyGrid::base_shape`].
    pub fn pose(&self, idx: usize) -> Pose {
        let p = self.params(idx);
        let f: Vec<f64> = p.iter().map(|v| v.to_f64()).collect();
        match &self.kind {
            FamilyKind::Interval => Pose {
                translation: vec![f[0]],
                scale: f[1],
            },
            FamilyKind::Translate { .. } => Pose::translate(f),
            FamilyKind::Magnify { .. } => Pose {
                translation: f[1..].to_vec(),
                scale: f[0],
            },
        }
    }

    /// Exact body of instance `idx` for one-dimensional families.
    pub fn exact_instance(&self, idx: usize) -> Result<IntervalSet> {
        let p = self.params(idx);
        match &self.kind {
            FamilyKind::Interval => Ok(IntervalSet::normalize([(p[0], p[0] + p[1])])),
            FamilyKind::Translate { shape } => {
                exact_body(shape, &Pose::translate(vec![0.0])).map(|s| s.shift(p[0]))
            }
            FamilyKind::Magnify { shape } => {
                exact_body(shape, &Pose::identity(1))?.affine(p[0], p[1])
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.base_shape().dim()
    }
}

/// Measure vectors of every grid instance, in enumeration order.
pub fn grid_vectors(
    grid: &FamilyGrid,
    tests: &[TestSet],
    resolution: usize,
) -> Result<Vec<MeasureVector>> {
    use rayon::prelude::*;
    let shape = grid.base_shape();
    let m = Measurer::new(&shape, tests, resolution)?;
    let needs_body = m.tests.iter().any(|t| matches!(t, Prepared::Exact(_)));
    (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let body = if needs_body {
                Some(grid.exact_instance(i)?)
            } else {
                None
            };
            m.measure_with(&grid.pose(i), body.as_ref())
        })
        .collect()
}

/// Result of the all-pairs sweep over measure vectors.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PairScan {
    pub min_separation: f64,
    pub witness: Option<(usize, usize)>,
    pub collisions: usize,
    pub first_collision: Option<(usize, usize)>,
    pub indeterminate: usize,
    pub first_indeterminate: Option<(usize, usize)>,
    pub max_error: f64,
    pub exact: bool,
}

impl PairScan {
    pub fn status(&self) -> Status {
        if self.collisions > 0 {
            Status::Violation
        } else if self.indeterminate > 0 {
            Status::Indeterminate
        } else {
            Status::Pass
        }
    }
}

fn ordered(i: usize, j: usize) -> (usize, usize) {
    (i.min(j), i.max(j))
}

/// ℓ∞ sweep over all pairs, pruned by sorting on the first component.
pub fn scan_pairs(vs: &[MeasureVector]) -> PairScan {
    let n = vs.len();
    let exact = vs.iter().all(|v| v.exact.is_some());
    let max_error = vs
        .iter()
        .flat_map(|v| v.errors.iter().copied())
        .fold(0.0, f64::max);
    let mut scan = PairScan {
        min_separation: f64::INFINITY,
        exact,
        max_error,
        ..PairScan::default()
    };
    if n < 2 || vs[0].values.is_empty() {
        if n >= 2 {
            // no tests: every pair collides
            scan.min_separation = 0.0;
            scan.collisions = n * (n - 1) / 2;
            scan.first_collision = Some((0, 1));
            scan.witness = Some((0, 1));
        }
        return scan;
    }
    let mut order: Vec<usize> = (0..n).collect();
    if exact {
        order.sort_by(|&a, &b| {
            vs[a].exact.as_ref().unwrap()[0]
                .cmp(&vs[b].exact.as_ref().unwrap()[0])
                .then(a.cmp(&b))
        });
    } else {
        order.sort_by(|&a, &b| vs[a].values[0].total_cmp(&vs[b].values[0]).then(a.cmp(&b)));
    }
    let flag_band = if exact {
        0.0
    } else {
        2.0 * ERROR_FACTOR * max_error
    };
    let note = |slot: &mut Option<(usize, usize)>, pair: (usize, usize)| {
        if slot.is_none_or(|s| pair < s) {
            *slot = Some(pair);
        }
    };
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[pos + 1..] {
            let gap0 = if exact {
                (vs[j].exact.as_ref().unwrap()[0] - vs[i].exact.as_ref().unwrap()[0]).to_f64()
            } else {
                vs[j].values[0] - vs[i].values[0]
            };
            if gap0 > scan.min_separation.max(flag_band) {
                break;
            }
            let pair = ordered(i, j);
            let dist = if exact {
                let (a, b) = (vs[i].exact.as_ref().unwrap(), vs[j].exact.as_ref().unwrap());
                a.iter().zip(b).map(|(x, y)| (*x - *y).abs()).max().unwrap()
            } else {
                Dyadic::ZERO
            };
            let d = if exact {
                dist.to_f64()
            } else {
                vs[i]
                    .values
                    .iter()
                    .zip(&vs[j].values)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max)
            };
            if d < scan.min_separation
                || (d == scan.min_separation && scan.witness.is_none_or(|w| pair < w))
            {
                scan.min_separation = d;
                scan.witness = Some(pair);
            }
            if exact {
                if dist.is_zero() {
                    scan.collisions += 1;
                    note(&mut scan.first_collision, pair);
                }
            } else {
                let err = vs[i]
                    .errors
                    .iter()
                    .zip(&vs[j].errors)
                    .map(|(a, b)| a + b)
                    .fold(0.0, f64::max);
                if d <= ERROR_FACTOR * err {
                    scan.indeterminate += 1;
                    note(&mut scan.first_indeterminate, pair);
                }
            }
        }
    }
    scan
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub instances: usize,
    pub tests: usize,
    #[serde(flatten)]
    pub scan: PairScan,
    pub grid: FamilyGrid,
    pub seed: Option<u64>,
    pub runtime_ms: f64,
    pub status: Status,
}

pub fn injectivity_report(
    grid: &FamilyGrid,
    tests: &[TestSet],
    resolution: usize,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let vs = grid_vectors(grid, tests, resolution)?;
    let scan = scan_pairs(&vs);
    let status = scan.status();
    Ok(VerificationReport {
        instances: vs.len(),
        tests: tests.len(),
        scan,
        grid: grid.clone(),
        seed: None,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        status,
    })
}
