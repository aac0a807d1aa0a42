//! Diameter directions of anisotropically squeezed convex bodies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric::{dot, norm};
use crate::shapes::{Direction, Shape};

const RESTARTS: usize = 64;
const ASCENT_TOL: f64 = 1e-10;
const RESTART_SEED: u64 = 0x6469_616d;

/// Orthonormal rows; the last row is `target`.
fn frame(target: &[f64]) -> Vec<Vec<f64>> {
    let d = target.len();
    let mut rows: Vec<Vec<f64>> = vec![target.to_vec()];
    for i in 0..d {
        if rows.len() == d {
            break;
        }
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        for r in &rows {
            let c = dot(&v, r);
            for k in 0..d {
                v[k] -= c * r[k];
            }
        }
        let n = norm(&v);
        if n > 1e-8 {
            rows.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    rows.rotate_left(1);
    rows
}

fn apply(rows: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    rows.iter().map(|r| dot(r, x)).collect()
}

fn apply_t(rows: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let d = y.len();
    (0..d)
        .map(|k| rows.iter().zip(y).map(|(r, c)| r[k] * c).sum())
        .collect()
}

/// Orient so the last coordinate is non-negative (first non-zero coordinate
/// positive when the last one vanishes).
fn orient(mut u: Vec<f64>) -> Vec<f64> {
    let d = u.len();
    let flip = if u[d - 1] != 0.0 {
        u[d - 1] < 0.0
    } else {
        u.iter().find(|v| **v != 0.0).is_some_and(|v| *v < 0.0)
    };
    if flip {
        for v in &mut u {
            *v = -*v;
        }
    }
    u
}

fn lex_greater(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return x > y;
        }
    }
    false
}

/// Diameter direction of the body squeezed by `δ` across `target`, pulled
/// back through the squeeze. Ties between equally long pairs go to the
/// lexicographically largest oriented direction.
pub fn diameter_direction(e: &Shape, squeeze: f64, target: &Direction) -> Result<Direction> {
    e.validate()?;
    if !e.is_convex() {
        return Err(Error::NonConvex);
    }
    let d = e.dim();
    if d < 2 {
        return Err(Error::InvalidArgument(
            "diameter directions need dimension at least 2".into(),
        ));
    }
    if target.dim() != d {
        return Err(Error::Dimension {
            expected: d,
            got: target.dim(),
        });
    }
    if !(squeeze > 0.0 && squeeze <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "squeeze {squeeze} outside (0, 1]"
        )));
    }
    let rows = frame(target.as_slice());
    let squeeze_vec = |mut y: Vec<f64>| {
        for v in y.iter_mut().take(d - 1) {
            *v *= squeeze;
        }
        y
    };
    let theta = match e.vertices() {
        Some(vs) => {
            let pts: Vec<Vec<f64>> = vs.iter().map(|v| squeeze_vec(apply(&rows, v))).collect();
            polytope_diameter(&pts)
        }
        None => match e {
            Shape::Ball { .. } => ellipsoid_diameter(d, squeeze),
            _ => return Err(Error::NonConvex),
        },
    };
    let pulled = orient(squeeze_vec(theta));
    let n = norm(&pulled);
    let world = apply_t(&rows, &pulled.iter().map(|v| v / n).collect::<Vec<_>>());
    Direction::normalized(world)
}

fn polytope_diameter(pts: &[Vec<f64>]) -> Vec<f64> {
    let mut best_len = -1.0;
    let mut best: Vec<f64> = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let diff: Vec<f64> = pts[i].iter().zip(&pts[j]).map(|(a, b)| a - b).collect();
            let len = norm(&diff);
            if len == 0.0 {
                continue;
            }
            let u = orient(diff.iter().map(|v| v / len).collect());
            let tie = (len - best_len).abs() <= 1e-12 * len.max(1.0);
            if (!tie && len > best_len) || (tie && lex_greater(&u, &best)) {
                if !tie {
                    best_len = len;
                }
                best = u;
            }
        }
    }
    best
}

/// Width of the squeezed ball in direction `u` is proportional to `|Φu|`;
/// maximize over the sphere by projected gradient ascent.
fn ellipsoid_diameter(d: usize, squeeze: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(RESTART_SEED);
    let width = |u: &[f64]| -> f64 {
        u.iter()
            .enumerate()
            .map(|(k, v)| {
                if k + 1 < d {
                    squeeze * squeeze * v * v
                } else {
                    v * v
                }
            })
            .sum::<f64>()
            .sqrt()
    };
    let mut best_w = -1.0;
    let mut best: Vec<f64> = Vec::new();
    for _ in 0..RESTARTS {
        let mut u: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let n = norm(&u);
        u.iter_mut().for_each(|v| *v /= n);
        let mut w = width(&u);
        for _ in 0..10_000 {
            // gradient of |Φu|² is 2Φ²u
            let g: Vec<f64> = u
                .iter()
                .enumerate()
                .map(|(k, v)| if k + 1 < d { squeeze * squeeze * v } else { *v })
                .collect();
            let mut next: Vec<f64> = u.iter().zip(&g).map(|(a, b)| a + 0.5 * b).collect();
            let n = norm(&next);
            next.iter_mut().for_each(|v| *v /= n);
            let nw = width(&next);
            let done = nw - w <= ASCENT_TOL;
            if nw >= w {
                u = next;
                w = nw;
            }
            if done {
                break;
            }
        }
        let u = orient(u);
        let tie = (w - best_w).abs() <= ASCENT_TOL;
        if (!tie && w > best_w) || (tie && lex_greater(&u, &best)) {
            if !tie {
                best_w = w;
            }
            best = u;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_diagonal() {
        let th = diameter_direction(&Shape::unit_square(), 1.0, &Direction::axis(2, 1)).unwrap();
        let s = th.as_slice();
        assert!((s[0].abs() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((s[1].abs() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn squeezed_square_is_nearly_vertical() {
        let th = diameter_direction(&Shape::unit_square(), 0.125, &Direction::axis(2, 1)).unwrap();
        let s = th.as_slice();
        assert!((s[0].powi(2) + (s[1] - 1.0).powi(2)).sqrt() < 0.05);
    }

    #[test]
    fn disk_any_unit_direction() {
        let th = diameter_direction(&Shape::disk(1.0), 1.0, &Direction::axis(2, 1)).unwrap();
        assert!((norm(th.as_slice()) - 1.0).abs() < 1e-12);
        let again = diameter_direction(&Shape::disk(1.0), 1.0, &Direction::axis(2, 1)).unwrap();
        assert_eq!(th, again);
        let sq = diameter_direction(&Shape::disk(1.0), 0.25, &Direction::axis(2, 1)).unwrap();
        assert!((sq.as_slice()[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn non_convex_rejected() {
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
        assert!(matches!(
            diameter_direction(&l, 1.0, &Direction::axis(2, 1)),
            Err(Error::NonConvex)
        ));
    }
}
