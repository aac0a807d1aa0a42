use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::interval::{IntervalSet, Window};
use crate::profile::Profile;

const CENTER_EXP: u32 = 20;

/// Affine change of variables `x = w·u + c` taking the profile to one
/// supported in `[−1, 1]` with unit mass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub center: Dyadic,
    /// A power of two.
    pub half_width: Dyadic,
    pub mass: f64,
}

impl Normalization {
    pub fn of(f: &Profile) -> Result<(Normalization, Profile)> {
        let (s0, s1) = f.support().ok_or(Error::ZeroProfile)?;
        let mass = f.integral();
        if f.is_zero() || !(mass > 0.0) {
            return Err(Error::ZeroProfile);
        }
        if f.values().iter().any(|&y| y < 0.0) {
            return Err(Error::InvalidArgument(
                "profile takes negative values".into(),
            ));
        }
        let (center, _) = Dyadic::snap(0.5 * (s0 + s1), CENTER_EXP);
        let c = center.to_f64();
        let reach = (s1 - c).max(c - s0).max(f64::MIN_POSITIVE);
        let j = reach.log2().ceil() as i32;
        let mut half_width = if j >= 0 {
            Dyadic::from_int(1 << j)
        } else {
            Dyadic::pow2_neg((-j) as u32)
        };
        if half_width.to_f64() < reach {
            half_width = half_width + half_width;
        }
        let w = half_width.to_f64();
        let g = f.shifted(-c).rescaled(1.0 / w, w / mass);
        Ok((
            Normalization {
                center,
                half_width,
                mass,
            },
            g,
        ))
    }

    pub fn to_unit(&self, x: f64) -> f64 {
        (x - self.center.to_f64()) / self.half_width.to_f64()
    }

    /// Normalized window rounded outward to integers.
    pub fn unit_window(&self, window: &Window) -> Result<Window> {
        let lo = self.to_unit(window.lo.to_f64()).floor() as i64;
        let hi = self.to_unit(window.hi.to_f64()).ceil() as i64;
        Window::from_ints(lo, hi)
    }

    /// Maps a normalized set back and clips it to `window`.
    pub fn from_unit_set(&self, t: &IntervalSet, window: &Window) -> Result<IntervalSet> {
        Ok(t.affine(self.half_width, self.center)?.restrict(window))
    }
}

impl Normalization {
    /// `window / w` rounded outward to integers (no recentring).
    pub fn scaled_window(&self, window: &Window) -> Result<Window> {
        let w = self.half_width.to_f64();
        Window::from_ints(
            (window.lo.to_f64() / w).floor() as i64,
            (window.hi.to_f64() / w).ceil() as i64,
        )
    }

    /// `w·t` clipped to `window`.
    pub fn scaled_set(&self, t: &IntervalSet, window: &Window) -> Result<IntervalSet> {
        Ok(t.affine(self.half_width, crate::dyadic::Dyadic::ZERO)?
            .restrict(window))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_profile_has_unit_mass() {
        let f = Profile::indicator(3.0, 6.0, 2.0).unwrap();
        let (n, g) = Normalization::of(&f).unwrap();
        assert!((g.integral() - 1.0).abs() < 1e-14);
        let (lo, hi) = g.support().unwrap();
        assert!(lo >= -1.0 && hi <= 1.0);
        assert_eq!(n.half_width, Dyadic::from_int(2));
        assert!(Normalization::of(&Profile::zero()).is_err());
    }
}
