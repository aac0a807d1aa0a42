//! Pairs of intervals that two test sets cannot tell apart.
//!
//! On a product of pieces (where membership in `A` and `B` is constant at
//! both endpoints) the map `f(x, y) = (λ(A ∩ [x,y]), λ(B ∩ [x,y]))` is affine
//! with Jacobian columns `−χ(x)` and `χ(y)`. Where these are dependent the
//! map has a kernel direction and moving along it gives an exact pair.
//! Otherwise images of distinct cells are intersected directly.

use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::interval::{IntervalSet, Window};

/// Cell pairs examined by the overlap search before giving up.
const MAX_CELL_PAIRS: usize = 1 << 24;
/// Lengths are rounded up to this grid before strict comparisons.
const LENGTH_EXP: u32 = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    /// Left endpoint moves inside a gap of `A ∪ B`.
    LeftGap,
    /// Right endpoint moves inside a gap of `A ∪ B`.
    RightGap,
    /// Both endpoints move together through pieces of equal membership.
    Diagonal,
    /// Images of two cells overlap.
    Overlap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub first: [f64; 2],
    pub second: [f64; 2],
    /// Exact endpoints when the pair was found in dyadic arithmetic.
    pub exact: Option<[[Dyadic; 2]; 2]>,
    /// `(λ(A ∩ I), λ(B ∩ I))` for each interval.
    pub measures: [[f64; 2]; 2],
    pub discrepancy: [f64; 2],
    /// `max(|x − x′|, |y − y′|)`.
    pub separation: f64,
    pub method: SearchMethod,
    pub pieces: usize,
}

#[derive(Clone, Copy, Debug)]
struct Piece {
    lo: Dyadic,
    hi: Dyadic,
    label: (bool, bool),
}

struct Ctx<'a> {
    a: crate::interval::Cumulative<'a>,
    b: crate::interval::Cumulative<'a>,
}

impl Ctx<'_> {
    fn exact(&self, lo: Dyadic, hi: Dyadic) -> [Dyadic; 2] {
        [self.a.between(lo, hi), self.b.between(lo, hi)]
    }

    fn approx(&self, lo: f64, hi: f64) -> [f64; 2] {
        [
            self.a.below_f64(hi) - self.a.below_f64(lo),
            self.b.below_f64(hi) - self.b.below_f64(lo),
        ]
    }
}

fn pieces(a: &IntervalSet, b: &IntervalSet, lo: Dyadic, hi: Dyadic) -> Vec<Piece> {
    let mut cuts: Vec<Dyadic> = vec![lo, hi];
    for s in [a, b] {
        for (l, h) in s.intervals() {
            cuts.extend([l, h].into_iter().filter(|c| *c > lo && *c < hi));
        }
    }
    cuts.sort();
    cuts.dedup();
    cuts.windows(2)
        .map(|w| {
            let mid = (w[0] + w[1]).half();
            Piece {
                lo: w[0],
                hi: w[1],
                label: (a.contains(mid), b.contains(mid)),
            }
        })
        .collect()
}

/// A candidate exact pair `([x, y], [x + s, y + s′])` with its free room.
struct Candidate {
    room: Dyadic,
    first: [Dyadic; 2],
    second: [Dyadic; 2],
    method: SearchMethod,
}

fn kernel_candidates(ps: &[Piece], lo: Dyadic, hi: Dyadic, m: Dyadic) -> Vec<Candidate> {
    let mut out = Vec::new();
    for (i, p) in ps.iter().enumerate() {
        let plen = p.hi - p.lo;
        if p.label == (false, false) {
            let room = plen.min(hi - p.lo - m);
            if room.is_positive() {
                let s = room.half();
                out.push(Candidate {
                    room,
                    first: [p.lo, hi],
                    second: [p.lo + s, hi],
                    method: SearchMethod::LeftGap,
                });
            }
            let room = plen.min(p.hi - lo - m);
            if room.is_positive() {
                let s = room.half();
                out.push(Candidate {
                    room,
                    first: [lo, p.hi - s],
                    second: [lo, p.hi],
                    method: SearchMethod::RightGap,
                });
            }
        }
        for q in &ps[i..] {
            if q.label != p.label {
                continue;
            }
            let room = plen.min(q.hi - q.lo).min(q.hi - p.lo - m);
            if room.is_positive() {
                let s = room.half();
                out.push(Candidate {
                    room,
                    first: [p.lo, q.hi - s],
                    second: [p.lo + s, q.hi],
                    method: SearchMethod::Diagonal,
                });
            }
        }
    }
    out
}

type Pt = [f64; 2];

fn cross(o: Pt, a: Pt, b: Pt) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn area(poly: &[Pt]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| cross([0.0, 0.0], poly[i], poly[(i + 1) % n]))
        .sum::<f64>()
        / 2.0
}

fn ccw(mut poly: Vec<Pt>) -> Vec<Pt> {
    if area(&poly) < 0.0 {
        poly.reverse();
    }
    poly
}

/// Keeps the part of `poly` where `g ≥ 0` for affine `g`.
fn clip_half(poly: &[Pt], g: impl Fn(Pt) -> f64) -> Vec<Pt> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        let (gp, gq) = (g(p), g(q));
        if gp >= 0.0 {
            out.push(p);
        }
        if (gp >= 0.0) != (gq >= 0.0) {
            let t = gp / (gp - gq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

/// Intersection of two counterclockwise convex polygons.
fn intersect(subject: &[Pt], clip: &[Pt]) -> Vec<Pt> {
    let mut out = subject.to_vec();
    for i in 0..clip.len() {
        if out.is_empty() {
            break;
        }
        let (a, b) = (clip[i], clip[(i + 1) % clip.len()]);
        out = clip_half(&out, |p| cross(a, b, p));
    }
    out
}

/// Affine map of one cell: `f(x, y) = base + y·cy − x·cx`.
struct Cell {
    domain: Vec<Pt>,
    image: Vec<Pt>,
    bbox: [f64; 4],
    base: Pt,
    cx: Pt,
    cy: Pt,
}

impl Cell {
    fn eval(&self, p: Pt) -> Pt {
        [
            self.base[0] + p[1] * self.cy[0] - p[0] * self.cx[0],
            self.base[1] + p[1] * self.cy[1] - p[0] * self.cx[1],
        ]
    }

    fn invert(&self, z: Pt) -> Pt {
        // [−cx cy] (x, y)ᵀ = z − base
        let (a, b, c, d) = (-self.cx[0], self.cy[0], -self.cx[1], self.cy[1]);
        let det = a * d - b * c;
        let (r0, r1) = (z[0] - self.base[0], z[1] - self.base[1]);
        [(d * r0 - b * r1) / det, (a * r1 - c * r0) / det]
    }
}

fn build_cells(ps: &[Piece], ctx: &Ctx, m: f64) -> Vec<Cell> {
    let ind = |l: (bool, bool)| [l.0 as u8 as f64, l.1 as u8 as f64];
    let mut cells = Vec::new();
    for (i, p) in ps.iter().enumerate() {
        for q in &ps[i..] {
            let (cx, cy) = (ind(p.label), ind(q.label));
            if cx[0] * cy[1] - cx[1] * cy[0] == 0.0 {
                continue;
            }
            let (x0, x1, y0, y1) = (p.lo.to_f64(), p.hi.to_f64(), q.lo.to_f64(), q.hi.to_f64());
            let rect = vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]];
            let domain = clip_half(&rect, |z| z[1] - z[0] - m);
            if domain.len() < 3 || area(&domain) <= 0.0 {
                continue;
            }
            let f0 = ctx.approx(x0, y0);
            let base = [
                f0[0] - y0 * cy[0] + x0 * cx[0],
                f0[1] - y0 * cy[1] + x0 * cx[1],
            ];
            let mut cell = Cell {
                domain,
                image: Vec::new(),
                bbox: [0.0; 4],
                base,
                cx,
                cy,
            };
            cell.image = ccw(cell.domain.iter().map(|&z| cell.eval(z)).collect());
            let xs = cell.image.iter().map(|z| z[0]);
            let ys = cell.image.iter().map(|z| z[1]);
            cell.bbox = [
                xs.clone().fold(f64::INFINITY, f64::min),
                xs.fold(f64::NEG_INFINITY, f64::max),
                ys.clone().fold(f64::INFINITY, f64::min),
                ys.fold(f64::NEG_INFINITY, f64::max),
            ];
            cells.push(cell);
        }
    }
    cells
}

fn overlap_search(ps: &[Piece], ctx: &Ctx, m: f64, tol: f64) -> Result<Option<(Pt, Pt)>> {
    let cells = build_cells(ps, ctx, m);
    let mut examined = 0usize;
    for (i, c1) in cells.iter().enumerate() {
        for c2 in &cells[i + 1..] {
            examined += 1;
            if examined > MAX_CELL_PAIRS {
                return Err(Error::SearchExhausted { grid: ps.len() });
            }
            let (a, b) = (c1.bbox, c2.bbox);
            if a[1] <= b[0] || b[1] <= a[0] || a[3] <= b[2] || b[3] <= a[2] {
                continue;
            }
            let common = intersect(&c1.image, &c2.image);
            if common.len() < 3 || area(&common) <= 1e-24 {
                continue;
            }
            let k = common.len() as f64;
            let z = [
                common.iter().map(|p| p[0]).sum::<f64>() / k,
                common.iter().map(|p| p[1]).sum::<f64>() / k,
            ];
            let (p1, p2) = (c1.invert(z), c2.invert(z));
            let sep = (p1[0] - p2[0]).abs().max((p1[1] - p2[1]).abs());
            if p1[1] - p1[0] > m && p2[1] - p2[0] > m && sep >= 100.0 * tol {
                return Ok(Some((p1, p2)));
            }
        }
    }
    Ok(None)
}

/// Two distinct intervals of length above `min_length` inside the box
/// `[lo + 1, hi − 1]` of `window` whose measures in `A` and in `B` agree
/// within `tol`.
pub fn interval_counterexample(
    a: &IntervalSet,
    b: &IntervalSet,
    window: &Window,
    min_length: f64,
    tol: f64,
) -> Result<Counterexample> {
    if !(min_length > 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidArgument(
            "min_length and tol must be positive".into(),
        ));
    }
    let lo = window.lo + Dyadic::ONE;
    let hi = window.hi - Dyadic::ONE;
    let m = Dyadic::from_f64_exact(min_length)
        .ok_or_else(|| Error::InvalidArgument("min_length out of range".into()))?
        .ceil_to(LENGTH_EXP);
    if hi - lo <= m {
        return Err(Error::SearchExhausted { grid: 0 });
    }
    let ps = pieces(a, b, lo, hi);
    let ctx = Ctx {
        a: a.cumulative(),
        b: b.cumulative(),
    };
    let sep_floor = Dyadic::from_f64_exact(100.0 * tol).unwrap_or(Dyadic::ZERO);

    let best = kernel_candidates(&ps, lo, hi, m)
        .into_iter()
        .filter(|c| c.room.half() >= sep_floor)
        .max_by(|x, y| x.room.cmp(&y.room));
    if let Some(c) = best {
        let (m1, m2) = (
            ctx.exact(c.first[0], c.first[1]),
            ctx.exact(c.second[0], c.second[1]),
        );
        let to = |p: [Dyadic; 2]| [p[0].to_f64(), p[1].to_f64()];
        let out = Counterexample {
            first: to(c.first),
            second: to(c.second),
            exact: Some([c.first, c.second]),
            measures: [to(m1), to(m2)],
            discrepancy: [
                (m1[0] - m2[0]).abs().to_f64(),
                (m1[1] - m2[1]).abs().to_f64(),
            ],
            separation: (c.first[0] - c.second[0])
                .abs()
                .max((c.first[1] - c.second[1]).abs())
                .to_f64(),
            method: c.method,
            pieces: ps.len(),
        };
        return checked(out, m, tol);
    }

    match overlap_search(&ps, &ctx, m.to_f64(), tol)? {
        Some((p1, p2)) => {
            let (m1, m2) = (ctx.approx(p1[0], p1[1]), ctx.approx(p2[0], p2[1]));
            let out = Counterexample {
                first: p1,
                second: p2,
                exact: None,
                measures: [m1, m2],
                discrepancy: [(m1[0] - m2[0]).abs(), (m1[1] - m2[1]).abs()],
                separation: (p1[0] - p2[0]).abs().max((p1[1] - p2[1]).abs()),
                method: SearchMethod::Overlap,
                pieces: ps.len(),
            };
            checked(out, m, tol)
        }
        None => Err(Error::SearchExhausted { grid: ps.len() }),
    }
}

fn checked(c: Counterexample, m: Dyadic, tol: f64) -> Result<Counterexample> {
    let m = m.to_f64();
    let ok = c.first[1] - c.first[0] > m
        && c.second[1] - c.second[0] > m
        && c.discrepancy.iter().all(|d| *d <= tol)
        && c.separation >= 100.0 * tol;
    if ok {
        Ok(c)
    } else {
        Err(Error::SearchExhausted { grid: c.pieces })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(pairs: &[(f64, f64)]) -> IntervalSet {
        IntervalSet::normalize(pairs.iter().map(|&(l, h)| {
            (
                Dyadic::from_f64_exact(l).unwrap(),
                Dyadic::from_f64_exact(h).unwrap(),
            )
        }))
    }

    fn recheck(a: &IntervalSet, b: &IntervalSet, c: &Counterexample, tol: f64) {
        let ca = a.cumulative();
        let cb = b.cumulative();
        let m =
            |s: &crate::interval::Cumulative, i: [f64; 2]| s.below_f64(i[1]) - s.below_f64(i[0]);
        assert!((m(&ca, c.first) - m(&ca, c.second)).abs() <= tol);
        assert!((m(&cb, c.first) - m(&cb, c.second)).abs() <= tol);
        assert_ne!(c.first, c.second);
    }

    #[test]
    fn empty_sets() {
        let w = Window::from_ints(-16, 16).unwrap();
        let e = IntervalSet::empty();
        let c = interval_counterexample(&e, &e, &w, 1.0, 1e-9).unwrap();
        assert_eq!(c.measures, [[0.0; 2]; 2]);
        assert!(c.first[1] - c.first[0] > 1.0);
        recheck(&e, &e, &c, 1e-9);
    }

    #[test]
    fn half_line() {
        let w = Window::from_ints(-16, 16).unwrap();
        let a = set(&[(0.0, 16.0)]);
        let c = interval_counterexample(&a, &IntervalSet::empty(), &w, 1.0, 1e-9).unwrap();
        assert_eq!(c.discrepancy, [0.0, 0.0]);
        recheck(&a, &IntervalSet::empty(), &c, 1e-9);
    }

    #[test]
    fn random_sets() {
        let w = Window::from_ints(-32, 32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let mut gen = || {
                let mut pts: Vec<f64> = (0..40)
                    .map(|_| (rng.gen_range(-30.0..30.0f64) * 1024.0).round() / 1024.0)
                    .collect();
                pts.sort_by(f64::total_cmp);
                set(&pts.chunks(2).map(|c| (c[0], c[1])).collect::<Vec<_>>())
            };
            let (a, b) = (gen(), gen());
            let c = interval_counterexample(&a, &b, &w, 1.0, 1e-9).unwrap();
            recheck(&a, &b, &c, 1e-9);
        }
    }

    #[test]
    fn overlapping_images() {
        // box [0, 3]: A = [0,1) ∪ [2,3), B = [1,3), no kernel direction fits
        let w = Window::from_ints(-1, 4).unwrap();
        let a = set(&[(0.0, 1.0), (2.0, 3.0)]);
        let b = set(&[(1.0, 3.0)]);
        let c = interval_counterexample(&a, &b, &w, 1.5, 1e-9).unwrap();
        assert_eq!(c.method, SearchMethod::Overlap);
        assert!(c.first[1] - c.first[0] > 1.5 && c.second[1] - c.second[0] > 1.5);
        recheck(&a, &b, &c, 1e-9);
    }

    #[test]
    fn injective_box_is_exhausted() {
        // on [−1, 1] with length > 1 the map is (−x, y): injective
        let w = Window::from_ints(-2, 2).unwrap();
        let a = set(&[(-2.0, 0.0)]);
        let b = set(&[(0.0, 2.0)]);
        assert!(matches!(
            interval_counterexample(&a, &b, &w, 1.0, 1e-9),
            Err(Error::SearchExhausted { .. })
        ));
    }
}
