//! Slab test sets `V = {a : ⟨a,θ⟩ ∈ T}` and their intersection measures.

use serde::{Deserialize, Serialize};

use crate::analysis::sliding::{sliding_value, MomentTable};
use crate::error::{Error, Result};
use crate::interval::{IntervalSet, Window};
use crate::profile::Profile;
use crate::shapes::{Direction, Pose, Shape};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlabTestSet {
    pub theta: Direction,
    pub set: IntervalSet,
    pub window: Window,
    /// Stands for the whole space; `theta` and `set` are then unused.
    #[serde(default)]
    pub full_space: bool,
}

pub fn slab_lift(theta: Vec<f64>, set: IntervalSet, window: Window) -> Result<SlabTestSet> {
    Ok(SlabTestSet {
        theta: Direction::new(theta)?,
        set,
        window,
        full_space: false,
    })
}

impl SlabTestSet {
    pub fn full_space(d: usize) -> SlabTestSet {
        SlabTestSet {
            theta: Direction::axis(d, 0),
            set: IntervalSet::empty(),
            window: Window::from_ints(-1, 1).unwrap(),
            full_space: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.theta.dim()
    }

    pub fn contains(&self, a: &[f64]) -> bool {
        if self.full_space {
            return true;
        }
        let t = self.theta.dot(a);
        self.set.intervals_f64().any(|(lo, hi)| lo <= t && t < hi)
    }
}

/// A measured value with an absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub error: f64,
}

/// Evaluates `λ^d((rE + v) ∩ V)` repeatedly for one slab and one body.
pub struct SlabMeasurer<'a> {
    slab: &'a SlabTestSet,
    table: Option<MomentTable<'a>>,
    profile: Profile,
    volume: f64,
    dim: usize,
}

impl<'a> SlabMeasurer<'a> {
    pub fn new(e: &Shape, slab: &'a SlabTestSet, resolution: usize) -> Result<Self> {
        if e.dim() != slab.dim() {
            return Err(Error::Dimension {
                expected: slab.dim(),
                got: e.dim(),
            });
        }
        let (table, profile) = if slab.full_space {
            (None, Profile::zero())
        } else {
            (
                Some(MomentTable::new(&slab.set)),
                e.radon_profile(&slab.theta, resolution)?,
            )
        };
        Ok(SlabMeasurer {
            slab,
            table,
            profile,
            volume: e.volume(),
            dim: e.dim(),
        })
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn measure(&self, pose: &Pose) -> Result<Measured> {
        if pose.translation.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: pose.translation.len(),
            });
        }
        let r = pose.scale;
        let rd = r.powi(self.dim as i32);
        let Some(table) = &self.table else {
            return Ok(Measured {
                value: rd * self.volume,
                error: 0.0,
            });
        };
        let b = self.slab.theta.dot(&pose.translation);
        let f = sliding_value(&self.profile, table, &self.slab.window, r, b)?;
        let value = r.powi(self.dim as i32 - 1) * f;
        let error = rd * self.profile.approx_error() + 1e-12 * value.abs().max(1e-300);
        Ok(Measured { value, error })
    }
}

/// `λ^d((rE + v) ∩ V) = r^{d−1} ∫_T p((t − ⟨v,θ⟩)/r) dt` with `p` the section
/// profile of `E` along `θ`.
pub fn intersection_measure(
    e: &Shape,
    pose: &Pose,
    v: &SlabTestSet,
    resolution: usize,
) -> Result<Measured> {
    SlabMeasurer::new(e, v, resolution)?.measure(pose)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Dyadic;

    fn slab(theta: Vec<f64>, lo: i64, hi: i64) -> SlabTestSet {
        let set = IntervalSet::normalize([(Dyadic::from_int(lo), Dyadic::from_int(hi))]);
        slab_lift(theta, set, Window::from_ints(-16, 16).unwrap()).unwrap()
    }

    #[test]
    fn square_against_axis_slab() {
        let v = slab(vec![1.0, 0.0], 0, 1);
        let sq = Shape::unit_square();
        let m = intersection_measure(&sq, &Pose::identity(2), &v, 16).unwrap();
        assert!((m.value - 1.0).abs() < 1e-15);
        let m2 =
            intersection_measure(&sq, &Pose::new(vec![0.0, 0.0], 2.0).unwrap(), &v, 16).unwrap();
        assert!((m2.value - 2.0).abs() < 1e-15);
        assert!(v.contains(&[0.5, 100.0]) && !v.contains(&[1.0, 0.0]));
    }

    #[test]
    fn full_space_scales_volume() {
        let fs = SlabTestSet::full_space(2);
        let m = intersection_measure(
            &Shape::disk(1.0),
            &Pose::new(vec![3.0, 1.0], 1.5).unwrap(),
            &fs,
            64,
        )
        .unwrap();
        assert!((m.value - 2.25 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn offset_disk_half_plane() {
        // disk at (1/2, 0) meets {x ≥ 0} in the disk minus a cap of height 1/2
        let v = slab(vec![1.0, 0.0], 0, 16);
        let m = intersection_measure(
            &Shape::disk(1.0),
            &Pose::translate(vec![0.5, 0.0]),
            &v,
            4097,
        )
        .unwrap();
        let cap = (0.5f64).acos() - 0.5 * (1.0 - 0.25f64).sqrt();
        let exact = std::f64::consts::PI - cap;
        assert!((m.value - exact).abs() < 1e-6, "{} vs {}", m.value, exact);
        assert!((m.value - exact).abs() <= m.error);
    }

    #[test]
    fn empty_and_bad_slabs() {
        let e = slab_lift(
            vec![0.0, 1.0],
            IntervalSet::empty(),
            Window::from_ints(-4, 4).unwrap(),
        )
        .unwrap();
        let m = intersection_measure(&Shape::disk(1.0), &Pose::identity(2), &e, 64).unwrap();
        assert_eq!(m.value, 0.0);
        assert!(slab_lift(
            vec![1.0, 1.0],
            IntervalSet::empty(),
            Window::from_ints(-4, 4).unwrap()
        )
        .is_err());
        let far = intersection_measure(&Shape::disk(1.0), &Pose::translate(vec![0.0, 3.5]), &e, 64);
        assert!(matches!(far, Err(Error::WindowExceeded { .. })));
    }
}
