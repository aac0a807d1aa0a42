//! Bodies in `R^d` and their section-measure profiles.

use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::numeric::{abs_det, dot, factorial, integrate, norm, unit_ball_volume};
use crate::profile::Profile;

/// A unit vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Direction(Vec<f64>);

impl Direction {
    pub fn new(v: Vec<f64>) -> Result<Self> {
        let n = norm(&v);
        if v.is_empty() || !n.is_finite() || (n - 1.0).abs() > 1e-12 {
            return Err(Error::NonUnitDirection { norm: n });
        }
        Ok(Direction(v))
    }

    /// Scale a non-zero vector to unit length.
    pub fn normalized(v: Vec<f64>) -> Result<Self> {
        let n = norm(&v);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NonUnitDirection { norm: n });
        }
        Ok(Direction(v.into_iter().map(|x| x / n).collect()))
    }

    pub fn axis(d: usize, i: usize) -> Self {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        Direction(v)
    }

    /// `(cos φ, sin φ)`.
    pub fn planar(phi: f64) -> Self {
        Direction(vec![phi.cos(), phi.sin()])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        dot(&self.0, x)
    }

    /// Index of the axis this direction points along, if any.
    pub fn axis_index(&self) -> Option<usize> {
        let nz: Vec<usize> = (0..self.0.len()).filter(|&i| self.0[i] != 0.0).collect();
        (nz.len() == 1).then(|| nz[0])
    }
}

impl TryFrom<Vec<f64>> for Direction {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Direction::new(v)
    }
}

impl From<Direction> for Vec<f64> {
    fn from(d: Direction) -> Vec<f64> {
        d.0
    }
}

/// Translation and magnification `x ↦ r·x + v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub translation: Vec<f64>,
    pub scale: f64,
}

impl Pose {
    pub fn new(translation: Vec<f64>, scale: f64) -> Result<Self> {
        if !(scale >= 1.0) || !scale.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "magnification {scale} must be at least 1"
            )));
        }
        if translation.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite translation".into()));
        }
        Ok(Pose { translation, scale })
    }

    pub fn translate(translation: Vec<f64>) -> Self {
        Pose {
            translation,
            scale: 1.0,
        }
    }

    pub fn identity(d: usize) -> Self {
        Pose {
            translation: vec![0.0; d],
            scale: 1.0,
        }
    }
}

/// A bounded body with positive measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    /// Simple polygon, vertices counterclockwise.
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
    Simplex {
        vertices: Vec<Vec<f64>>,
    },
    IntervalUnion {
        set: IntervalSet,
    },
    /// Union of cubes `∏ [c_i/n, (c_i+1)/n)`.
    GridShape {
        dim: usize,
        n: u32,
        cells: Vec<Vec<i64>>,
    },
}

impl Shape {
    pub fn disk(radius: f64) -> Shape {
        Shape::Ball {
            center: vec![0.0, 0.0],
            radius,
        }
    }

    pub fn unit_square() -> Shape {
        Shape::Box {
            lo: vec![0.0, 0.0],
            hi: vec![1.0, 1.0],
        }
    }

    pub fn interval(lo: Dyadic, hi: Dyadic) -> Shape {
        Shape::IntervalUnion {
            set: IntervalSet::normalize([(lo, hi)]),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Shape::Ball { center, .. } => center.len(),
            Shape::Box { lo, .. } => lo.len(),
            Shape::Polygon { .. } => 2,
            Shape::Simplex { vertices } => vertices.len().saturating_sub(1),
            Shape::IntervalUnion { .. } => 1,
            Shape::GridShape { dim, .. } => *dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Shape::Ball { center, radius } => {
                if center.is_empty() {
                    return Err(Error::InvalidArgument("ball needs a center".into()));
                }
                if !(*radius > 0.0) {
                    return Err(Error::ZeroMeasure);
                }
            }
            Shape::Box { lo, hi } => {
                if lo.len() != hi.len() || lo.is_empty() {
                    return Err(Error::Dimension {
                        expected: lo.len(),
                        got: hi.len(),
                    });
                }
                if lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
                    return Err(Error::ZeroMeasure);
                }
            }
            Shape::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return Err(Error::ZeroMeasure);
                }
                let a = signed_area(vertices);
                if a == 0.0 {
                    return Err(Error::ZeroMeasure);
                }
                if a < 0.0 {
                    return Err(Error::InvalidArgument(
                        "polygon vertices must be counterclockwise".into(),
                    ));
                }
            }
            Shape::Simplex { vertices } => {
                let d = self.dim();
                if d == 0 || vertices.iter().any(|v| v.len() != d) {
                    return Err(Error::InvalidArgument(
                        "simplex needs d+1 points in R^d".into(),
                    ));
                }
                if self.volume() <= 0.0 {
                    return Err(Error::ZeroMeasure);
                }
            }
            Shape::IntervalUnion { set } => {
                if set.is_empty() {
                    return Err(Error::ZeroMeasure);
                }
            }
            Shape::GridShape { dim, n, cells } => {
                if cells.is_empty() || *n == 0 {
                    return Err(Error::ZeroMeasure);
                }
                if let Some(c) = cells.iter().find(|c| c.len() != *dim) {
                    return Err(Error::Dimension {
                        expected: *dim,
                        got: c.len(),
                    });
                }
            }
        }
        let bad = match self {
            Shape::Ball { center, radius } => center.iter().chain([radius]).any(|v| !v.is_finite()),
            Shape::Box { lo, hi } => lo.iter().chain(hi).any(|v| !v.is_finite()),
            Shape::Polygon { vertices } => vertices.iter().flatten().any(|v| !v.is_finite()),
            Shape::Simplex { vertices } => vertices.iter().flatten().any(|v| !v.is_finite()),
            _ => false,
        };
        if bad {
            return Err(Error::InvalidArgument(
                "non-finite shape coordinates".into(),
            ));
        }
        Ok(())
    }

    pub fn volume(&self) -> f64 {
        match self {
            Shape::Ball { center, radius } => {
                unit_ball_volume(center.len()) * radius.powi(center.len() as i32)
            }
            Shape::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| b - a).product(),
            Shape::Polygon { vertices } => signed_area(vertices).abs(),
            Shape::Simplex { vertices } => {
                let d = vertices.len() - 1;
                let m: Vec<Vec<f64>> = vertices[1..]
                    .iter()
                    .map(|v| v.iter().zip(&vertices[0]).map(|(a, b)| a - b).collect())
                    .collect();
                abs_det(m) / factorial(d)
            }
            Shape::IntervalUnion { set } => set.measure().to_f64(),
            Shape::GridShape { dim, n, cells } => {
                let mut c = cells.clone();
                c.sort();
                c.dedup();
                c.len() as f64 / (*n as f64).powi(*dim as i32)
            }
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            Shape::Ball { .. } | Shape::Box { .. } | Shape::Simplex { .. } => true,
            Shape::Polygon { vertices } => polygon_is_convex(vertices),
            Shape::IntervalUnion { set } => set.len() == 1,
            Shape::GridShape { .. } => false,
        }
    }

    /// Vertices of a polytope variant.
    pub fn vertices(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            Shape::Box { lo, hi } => {
                let d = lo.len();
                Some(
                    (0..1usize << d)
                        .map(|mask| {
                            (0..d)
                                .map(|i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] })
                                .collect()
                        })
                        .collect(),
                )
            }
            Shape::Polygon { vertices } => Some(vertices.iter().map(|v| v.to_vec()).collect()),
            Shape::Simplex { vertices } => Some(vertices.clone()),
            Shape::IntervalUnion { set } if set.len() == 1 => {
                let (lo, hi) = set.hull().unwrap();
                Some(vec![vec![lo.to_f64()], vec![hi.to_f64()]])
            }
            _ => None,
        }
    }

    /// Image under `x ↦ r·x + v`.
    pub fn transformed(&self, r: f64, v: &[f64]) -> Result<Shape> {
        if v.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: v.len(),
            });
        }
        if !(r > 0.0) {
            return Err(Error::NonPositiveScale(r.to_string()));
        }
        let map = |p: &[f64]| -> Vec<f64> { p.iter().zip(v).map(|(x, t)| r * x + t).collect() };
        Ok(match self {
            Shape::Ball { center, radius } => Shape::Ball {
                center: map(center),
                radius: r * radius,
            },
            Shape::Box { lo, hi } => Shape::Box {
                lo: map(lo),
                hi: map(hi),
            },
            Shape::Polygon { vertices } => Shape::Polygon {
                vertices: vertices
                    .iter()
                    .map(|p| [r * p[0] + v[0], r * p[1] + v[1]])
                    .collect(),
            },
            Shape::Simplex { vertices } => Shape::Simplex {
                vertices: vertices.iter().map(|p| map(p)).collect(),
            },
            Shape::IntervalUnion { set } => {
                let rd = Dyadic::from_f64_exact(r).ok_or_else(|| {
                    Error::InvalidArgument("interval unions need a dyadic scale".into())
                })?;
                let vd = Dyadic::from_f64_exact(v[0]).ok_or_else(|| {
                    Error::InvalidArgument("interval unions need a dyadic shift".into())
                })?;
                Shape::IntervalUnion {
                    set: set.affine(rd, vd)?,
                }
            }
            Shape::GridShape { .. } => {
                return Err(Error::InvalidArgument(
                    "grid shapes cannot be transformed".into(),
                ))
            }
        })
    }

    /// Section measures `t ↦ λ^{d-1}(E ∩ {⟨x,θ⟩ = t})` as a piecewise-linear
    /// profile. `resolution` is the sample count for the curved variants.
    pub fn radon_profile(&self, theta: &Direction, resolution: usize) -> Result<Profile> {
        self.validate()?;
        let d = self.dim();
        if theta.dim() != d {
            return Err(Error::Dimension {
                expected: d,
                got: theta.dim(),
            });
        }
        let th = theta.as_slice();
        let n = norm(th);
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::NonUnitDirection { norm: n });
        }
        let resolution = resolution.max(8);
        match self {
            Shape::Ball { center, radius } => {
                Ok(ball_profile(d, dot(center, th), *radius, resolution))
            }
            Shape::Box { lo, hi } => Ok(box_profile(lo, hi, th, resolution)),
            Shape::Polygon { vertices } => polygon_profile(vertices, th),
            Shape::Simplex { vertices } => simplex_profile(vertices, th, resolution, self.volume()),
            Shape::IntervalUnion { set } => {
                let sign = th[0].signum();
                let mut pieces: Vec<(f64, f64, f64)> = set
                    .intervals_f64()
                    .map(|(a, b)| {
                        if sign > 0.0 {
                            (a, b, 1.0)
                        } else {
                            (-b, -a, 1.0)
                        }
                    })
                    .collect();
                pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
                Profile::from_steps(&pieces)
            }
            Shape::GridShape { dim, n, cells } => grid_profile(*dim, *n, cells, th, resolution),
        }
    }
}

fn signed_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|i| {
            let (p, q) = (v[i], v[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
        / 2.0
}

fn polygon_is_convex(v: &[[f64; 2]]) -> bool {
    let n = v.len();
    (0..n).all(|i| {
        let (a, b, c) = (v[i], v[(i + 1) % n], v[(i + 2) % n]);
        (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]) >= -1e-12
    })
}

/// Chebyshev–Lobatto samples of the section function of a ball.
fn ball_profile(d: usize, c: f64, r: f64, resolution: usize) -> Profile {
    if d == 1 {
        return Profile::indicator(c - r, c + r, 1.0).unwrap();
    }
    let w = unit_ball_volume(d - 1);
    let k = (d - 1) as f64 / 2.0;
    let f = move |t: f64| w * (r * r - (t - c) * (t - c)).max(0.0).powf(k);
    let m = resolution;
    let xs: Vec<f64> = (0..m)
        .map(|j| {
            if j == 0 {
                c - r
            } else if j == m - 1 {
                c + r
            } else {
                c - r * (std::f64::consts::PI * j as f64 / (m - 1) as f64).cos()
            }
        })
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let p = Profile::new(xs, ys).unwrap();
    let err = if d <= 3 {
        // concave section function: the interpolant lies below it
        (unit_ball_volume(d) * r.powi(d as i32) - p.integral()).max(0.0)
    } else {
        interpolation_error(&p, &f)
    };
    p.with_error(err)
}

/// `∫ |f − p|` by Gauss–Legendre on each linear piece.
fn interpolation_error(p: &Profile, f: &impl Fn(f64) -> f64) -> f64 {
    p.segments()
        .map(|s| integrate(|x| (f(x) - s.at(x)).abs(), s.x0, s.x1))
        .sum()
}

/// Density of `Σ U_i` with `U_i` uniform on `[0, w_i]`, all `w_i > 0`.
fn uniform_sum_density(ws: &[f64], t: f64) -> f64 {
    let k = ws.len();
    let total: f64 = ws.iter().sum();
    if t <= 0.0 || t >= total {
        return 0.0;
    }
    let mut s = 0.0;
    for mask in 0..1usize << k {
        let mut shift = 0.0;
        let mut sign = 1.0;
        for (i, w) in ws.iter().enumerate() {
            if mask >> i & 1 == 1 {
                shift += w;
                sign = -sign;
            }
        }
        let u = t - shift;
        if u > 0.0 {
            s += sign * u.powi(k as i32 - 1);
        }
    }
    let prod: f64 = ws.iter().product();
    (s / (factorial(k - 1) * prod)).max(0.0)
}

fn box_profile(lo: &[f64], hi: &[f64], th: &[f64], resolution: usize) -> Profile {
    let vol: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    let mut base = 0.0;
    let mut ws = Vec::new();
    for i in 0..lo.len() {
        let len = hi[i] - lo[i];
        if th[i].abs() <= 1e-15 {
            continue;
        }
        base += th[i] * if th[i] > 0.0 { lo[i] } else { hi[i] };
        ws.push(th[i].abs() * len);
    }
    let total: f64 = ws.iter().sum();
    match ws.len() {
        0 => unreachable!("unit direction has a non-zero component"),
        1 => Profile::indicator(base, base + total, vol / total).unwrap(),
        2 => {
            let (a, b) = (ws[0].min(ws[1]), ws[0].max(ws[1]));
            let h = vol / b;
            if a == b {
                Profile::new(vec![base, base + a, base + total], vec![0.0, h, 0.0]).unwrap()
            } else {
                Profile::new(
                    vec![base, base + a, base + b, base + total],
                    vec![0.0, h, h, 0.0],
                )
                .unwrap()
            }
        }
        _ => {
            let mut knots: Vec<f64> = Vec::new();
            for mask in 0..1usize << ws.len() {
                let s: f64 = ws
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, w)| w)
                    .sum();
                knots.push(base + s);
            }
            let f = move |t: f64| vol * uniform_sum_density(&ws, t - base);
            sampled_profile(knots, resolution, &f)
        }
    }
}

/// Sample `f` on the knots plus a uniform grid and attach the L1 error.
fn sampled_profile(mut knots: Vec<f64>, resolution: usize, f: &impl Fn(f64) -> f64) -> Profile {
    knots.sort_by(f64::total_cmp);
    let (a, b) = (knots[0], knots[knots.len() - 1]);
    let width = b - a;
    let mut xs = knots.clone();
    xs.extend((1..resolution).map(|j| a + width * j as f64 / resolution as f64));
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|p, q| (*p - *q).abs() <= 1e-14 * width);
    let nudge = width * 1e-13;
    let last = xs.len() - 1;
    let ys: Vec<f64> = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let y = if i == 0 {
                f(x + nudge)
            } else if i == last {
                f(x - nudge)
            } else {
                f(x)
            };
            y.max(0.0)
        })
        .collect();
    let p = Profile::new(xs, ys).unwrap();
    let err = interpolation_error(&p, f);
    p.with_error(err)
}

/// Total length of `{x ∈ P : ⟨x,θ⟩ = t}` for a level `t` that avoids all
/// vertex levels.
fn polygon_chord(v: &[[f64; 2]], th: &[f64], t: f64) -> f64 {
    let perp = [-th[1], th[0]];
    let n = v.len();
    let mut us = Vec::new();
    for i in 0..n {
        let (p, q) = (v[i], v[(i + 1) % n]);
        let sp = p[0] * th[0] + p[1] * th[1] - t;
        let sq = q[0] * th[0] + q[1] * th[1] - t;
        if (sp < 0.0) != (sq < 0.0) {
            let lam = sp / (sp - sq);
            let x = [p[0] + lam * (q[0] - p[0]), p[1] + lam * (q[1] - p[1])];
            us.push(x[0] * perp[0] + x[1] * perp[1]);
        }
    }
    us.sort_by(f64::total_cmp);
    us.chunks_exact(2).map(|c| c[1] - c[0]).sum()
}

fn polygon_profile(v: &[[f64; 2]], th: &[f64]) -> Result<Profile> {
    let mut levels: Vec<f64> = v.iter().map(|p| p[0] * th[0] + p[1] * th[1]).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let m = levels.len();
    // chord length is affine between consecutive vertex levels
    let mut right = vec![0.0; m];
    let mut left = vec![0.0; m];
    for k in 0..m - 1 {
        let (a, b) = (levels[k], levels[k + 1]);
        let (t1, t2) = (a + (b - a) / 3.0, a + 2.0 * (b - a) / 3.0);
        let (c1, c2) = (polygon_chord(v, th, t1), polygon_chord(v, th, t2));
        let slope = (c2 - c1) / (t2 - t1);
        right[k] = (c1 - slope * (t1 - a)).max(0.0);
        left[k + 1] = (c2 + slope * (b - t2)).max(0.0);
    }
    let scale = v.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
    let mut xs = Vec::with_capacity(2 * m);
    let mut ys = Vec::with_capacity(2 * m);
    for k in 0..m {
        if k == 0 || k == m - 1 || (left[k] - right[k]).abs() > 1e-12 * scale {
            xs.push(levels[k]);
            ys.push(left[k]);
            xs.push(levels[k]);
            ys.push(right[k]);
        } else {
            xs.push(levels[k]);
            ys.push(0.5 * (left[k] + right[k]));
        }
    }
    // drop the zero one-sided values outside the support
    xs.remove(0);
    ys.remove(0);
    xs.pop();
    ys.pop();
    Profile::new(xs, ys)
}

/// Cox–de Boor value of the order-`d` B-spline on `knots` (d+1 knots).
fn bspline(knots: &[f64], t: f64) -> f64 {
    let m = knots.len() - 1;
    let mut n: Vec<f64> = (0..m)
        .map(|i| {
            if knots[i] <= t && t < knots[i + 1] {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    for j in 1..m {
        for i in 0..m - j {
            let a = knots[i + j] - knots[i];
            let b = knots[i + j + 1] - knots[i + 1];
            let l = if a > 0.0 {
                (t - knots[i]) / a * n[i]
            } else {
                0.0
            };
            let r = if b > 0.0 {
                (knots[i + j + 1] - t) / b * n[i + 1]
            } else {
                0.0
            };
            n[i] = l + r;
        }
    }
    n[0]
}

fn simplex_profile(v: &[Vec<f64>], th: &[f64], resolution: usize, vol: f64) -> Result<Profile> {
    let d = v.len() - 1;
    if d == 1 {
        let (a, b) = (v[0][0] * th[0], v[1][0] * th[0]);
        return Profile::indicator(a.min(b), a.max(b), 1.0);
    }
    if d == 2 {
        let mut tri: Vec<[f64; 2]> = v.iter().map(|p| [p[0], p[1]]).collect();
        if signed_area(&tri) < 0.0 {
            tri.reverse();
        }
        return polygon_profile(&tri, th);
    }
    let mut knots: Vec<f64> = v.iter().map(|p| dot(p, th)).collect();
    knots.sort_by(f64::total_cmp);
    let span = knots[d] - knots[0];
    let scale = vol * d as f64 / span;
    let ks = knots.clone();
    let f = move |t: f64| scale * bspline(&ks, t);
    Ok(sampled_profile(knots, resolution, &f))
}

fn grid_profile(
    dim: usize,
    n: u32,
    cells: &[Vec<i64>],
    th: &[f64],
    resolution: usize,
) -> Result<Profile> {
    let mut cells = cells.to_vec();
    cells.sort();
    cells.dedup();
    let h = 1.0 / n as f64;
    let dir = Direction(th.to_vec());
    if let Some(j) = dir.axis_index() {
        let sign = th[j].signum();
        let mut idx: Vec<i64> = cells
            .iter()
            .map(|c| if sign > 0.0 { c[j] } else { -c[j] - 1 })
            .collect();
        idx.sort_unstable();
        let face = h.powi(dim as i32 - 1);
        let mut pieces = Vec::new();
        let mut i = 0;
        while i < idx.len() {
            let k = idx[i];
            let mut cnt = 0;
            while i < idx.len() && idx[i] == k {
                cnt += 1;
                i += 1;
            }
            pieces.push((k as f64 * h, (k + 1) as f64 * h, cnt as f64 * face));
        }
        return Profile::from_steps(&pieces);
    }
    if dim == 1 {
        unreachable!("a one-dimensional unit direction is an axis");
    }
    let boxes: Vec<Profile> = cells
        .iter()
        .map(|c| {
            let lo: Vec<f64> = c.iter().map(|&k| k as f64 * h).collect();
            let hi: Vec<f64> = c.iter().map(|&k| (k + 1) as f64 * h).collect();
            box_profile(&lo, &hi, th, resolution)
        })
        .collect();
    let mut xs: Vec<f64> = boxes
        .iter()
        .flat_map(|p| p.breakpoints().iter().copied())
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let ys: Vec<f64> = xs
        .iter()
        .map(|&x| boxes.iter().map(|p| p.eval(x)).sum())
        .collect();
    let err: f64 = boxes.iter().map(|p| p.approx_error()).sum();
    Ok(Profile::new(xs, ys)?.with_error(err))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_and_ball_center_values() {
        let disk = Shape::disk(1.0);
        let p = disk.radon_profile(&Direction::planar(0.3), 257).unwrap();
        assert!((p.eval(0.0) - 2.0).abs() < 1e-12);
        assert!((p.integral() - std::f64::consts::PI).abs() < 1e-4);
        let ball = Shape::Ball {
            center: vec![0.0; 3],
            radius: 1.0,
        };
        let q = ball.radon_profile(&Direction::axis(3, 2), 257).unwrap();
        assert!((q.eval(0.0) - std::f64::consts::PI).abs() < 1e-12);
        assert!(q.approx_error() < 1e-3);
    }

    #[test]
    fn square_sections() {
        let sq = Shape::unit_square();
        let p = sq.radon_profile(&Direction::axis(2, 0), 16).unwrap();
        assert_eq!(p.eval(0.5), 1.0);
        assert_eq!(p.integral(), 1.0);
        let diag = Direction::normalized(vec![1.0, 1.0]).unwrap();
        let q = sq.radon_profile(&diag, 16).unwrap();
        assert!((q.eval(std::f64::consts::FRAC_1_SQRT_2) - 2f64.sqrt()).abs() < 1e-12);
        assert!((q.integral() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polygon_breakpoints_at_vertex_levels() {
        let l = Shape::Polygon {
            vertices: vec![
                [0.0, 0.0],
                [2.0, 0.0],
                [2.0, 1.0],
                [1.0, 1.0],
                [1.0, 2.0],
                [0.0, 2.0],
            ],
        };
        let th = Direction::normalized(vec![2.0, 1.0]).unwrap();
        let p = l.radon_profile(&th, 8).unwrap();
        assert!((p.integral() - 3.0).abs() < 1e-12);
        let mut levels: Vec<f64> = l.vertices().unwrap().iter().map(|v| th.dot(v)).collect();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        let mut bps = p.breakpoints().to_vec();
        bps.dedup();
        assert_eq!(bps, levels);
    }

    #[test]
    fn triangle_and_tetrahedron() {
        let tri = Shape::Simplex {
            vertices: vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
        };
        let p = tri.radon_profile(&Direction::axis(2, 0), 8).unwrap();
        assert!((p.integral() - 0.5).abs() < 1e-15);
        assert!((p.eval(0.0) - 1.0).abs() < 1e-15);
        let tet = Shape::Simplex {
            vertices: vec![
                vec![0.0, 0.0, 0.0],
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
        };
        let th = Direction::normalized(vec![1.0, 2.0, 3.0]).unwrap();
        let q = tet.radon_profile(&th, 400).unwrap();
        assert!((q.integral() - 1.0 / 6.0).abs() < 1e-5);
        // axis direction: section is a triangle of area (1-t)^2/2
        let r = tet.radon_profile(&Direction::axis(3, 2), 400).unwrap();
        assert!((r.eval(0.5) - 0.125).abs() < 1e-9);
    }

    #[test]
    fn box_in_three_dimensions() {
        let b = Shape::Box {
            lo: vec![0.0; 3],
            hi: vec![1.0, 2.0, 3.0],
        };
        let th = Direction::normalized(vec![1.0, 1.0, 1.0]).unwrap();
        let p = b.radon_profile(&th, 600).unwrap();
        assert!((p.integral() - 6.0).abs() < 1e-5 * 6.0);
    }

    #[test]
    fn grid_and_interval_profiles() {
        let g = Shape::GridShape {
            dim: 2,
            n: 2,
            cells: vec![vec![0, 0], vec![0, 1], vec![1, 0]],
        };
        let p = g.radon_profile(&Direction::axis(2, 0), 8).unwrap();
        assert_eq!(p.eval(0.25), 1.0);
        assert_eq!(p.eval(0.75), 0.5);
        let q = g.radon_profile(&Direction::planar(0.4), 8).unwrap();
        assert!((q.integral() - 0.75).abs() < 1e-12);
        let s = Shape::interval(Dyadic::ZERO, Dyadic::ONE);
        let r = s
            .radon_profile(&Direction::new(vec![-1.0]).unwrap(), 8)
            .unwrap();
        assert_eq!(r.eval(-0.5), 1.0);
    }

    #[test]
    fn argument_errors() {
        let disk = Shape::disk(1.0);
        assert!(matches!(
            disk.radon_profile(&Direction(vec![1.0, 1.0]), 8),
            Err(Error::NonUnitDirection { .. })
        ));
        assert!(Direction::new(vec![0.6, 0.8]).is_ok());
        assert!(matches!(
            Shape::disk(0.0).radon_profile(&Direction::axis(2, 0), 8),
            Err(Error::ZeroMeasure)
        ));
        assert!(Pose::new(vec![0.0], 0.5).is_err());
    }

    #[test]
    fn json_shape_round_trip() {
        let s = Shape::Polygon {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
        };
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"kind\":\"polygon\""));
        assert_eq!(serde_json::from_str::<Shape>(&text).unwrap(), s);
        assert!(serde_json::from_str::<Direction>("[1.0, 1.0]").is_err());
    }
}
