//! Slab families reconstructing translates (or magnified translates) of a
//! fixed body.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    ac_diagnostic, concavity_check, spectral::doubling_cutoffs, variation_and_derivative,
    KEstimator,
};
use crate::construct::magnify::{magnify_test_set, GrowthFit, MagnifyCertificate, MagnifyConfig};
use crate::construct::translate::{translate_test_set, TranslateCertificate};
use crate::error::{Error, Result};
use crate::interval::Window;
use crate::numeric::{dot, norm};
use crate::profile::Profile;
use crate::shapes::{Direction, Shape};
use crate::slab::SlabTestSet;

pub const DEFAULT_SEED: u64 = 0x7465_7374;
pub const CANDIDATES_PER_DIRECTION: usize = 64;
/// Directions are snapped to angles `2π·k / 2^ANGLE_BITS` in the plane and
/// to coordinates on the `2^-ANGLE_BITS` grid otherwise.
pub const ANGLE_BITS: i32 = 10;
const SPECTRAL_POWER: f64 = 2.0;
/// Doubling cutoffs `1024 … 16384` for the plateau test.
pub const SCREEN_CUTOFF_START: f64 = 1024.0;
pub const SCREEN_CUTOFF_COUNT: usize = 5;
const INDEPENDENCE_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyMode {
    Translate,
    Magnify,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyConfig {
    pub resolution: usize,
    /// Translations `v` with `|v| ≤ reach` are covered.
    pub reach: f64,
    /// Largest magnification covered in magnify mode.
    pub a_max: f64,
    pub seed: u64,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        FamilyConfig {
            resolution: 256,
            reach: 2.0,
            a_max: 8.0,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MemberCertificate {
    Translate(Box<TranslateCertificate>),
    Magnify(Box<MagnifyCertificate>),
    FullSpace,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Screening {
    pub theta: Direction,
    pub spectral_ratio: f64,
    pub concave: Option<bool>,
    pub growth_slope: Option<f64>,
    pub accepted: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Family {
    pub slabs: Vec<SlabTestSet>,
    pub certificates: Vec<MemberCertificate>,
    pub screened: Vec<Screening>,
}

fn snap_direction(raw: &[f64]) -> Option<Direction> {
    let d = raw.len();
    if d == 2 {
        let steps = 2f64.powi(ANGLE_BITS);
        let k = (raw[1].atan2(raw[0]) / std::f64::consts::TAU * steps).round();
        return Some(Direction::planar(k / steps * std::f64::consts::TAU));
    }
    let g = 2f64.powi(ANGLE_BITS);
    let snapped: Vec<f64> = raw.iter().map(|x| (x * g).round() / g).collect();
    (norm(&snapped) > 0.0)
        .then(|| Direction::normalized(snapped).ok())
        .flatten()
}

fn candidates(d: usize, seed: u64, count: usize) -> Vec<Direction> {
    let mut out: Vec<Direction> = (0..d).map(|i| Direction::axis(d, i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < d + count {
        let raw: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let n = norm(&raw);
        if !(n > 0.1 && n <= 1.0) {
            continue;
        }
        if let Some(dir) = snap_direction(&raw) {
            out.push(dir);
        }
    }
    out
}

/// Component of `v` orthogonal to the span of `basis` (orthonormal).
fn residual(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut r = v.to_vec();
    for b in basis {
        let c = dot(&r, b);
        r.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
    }
    r
}

/// Integer window covering `⟨x, θ⟩` for `x ∈ rE + v`, `1 ≤ r ≤ a_max`, `|v| ≤ reach`.
fn covering_window(p: &Profile, reach: f64, a_max: f64) -> Result<Window> {
    let (s0, s1) = p.support().ok_or(Error::ZeroMeasure)?;
    let lo = (a_max * s0.min(0.0)).min(s0) - reach - 1.0;
    let hi = (a_max * s1.max(0.0)).max(s1) + reach + 1.0;
    Window::from_ints(lo.floor() as i64, hi.ceil() as i64)
}

fn screen(
    e: &Shape,
    theta: &Direction,
    mode: FamilyMode,
    cfg: &FamilyConfig,
) -> Result<(Profile, Screening)> {
    let p = e.radon_profile(theta, cfg.resolution)?;
    let rep = ac_diagnostic(
        &p,
        SPECTRAL_POWER,
        &doubling_cutoffs(SCREEN_CUTOFF_START, SCREEN_CUTOFF_COUNT),
    );
    let concave = e
        .is_convex()
        .then(|| concavity_check(&p, e.dim()).is_concave);
    let mut accepted = rep.plateaus() && concave != Some(false) && p.is_continuous();
    let growth_slope = if mode == FamilyMode::Magnify && accepted {
        let (_, g) = variation_and_derivative(&p);
        let fit = GrowthFit::of(&KEstimator::new(&g), MagnifyConfig::default().growth_bound);
        accepted = fit.passes();
        Some(fit.slope)
    } else {
        None
    };
    let s = Screening {
        theta: theta.clone(),
        spectral_ratio: rep.last_ratio,
        concave,
        growth_slope,
        accepted,
    };
    Ok((p, s))
}

/// `d` slabs (translate) or `d` slabs plus the whole space (magnify).
pub fn family_test_sets(e: &Shape, mode: FamilyMode, cfg: &FamilyConfig) -> Result<Family> {
    e.validate()?;
    let d = e.dim();
    let pool = candidates(d, cfg.seed, CANDIDATES_PER_DIRECTION * d);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut chosen: Vec<(Direction, Profile)> = Vec::new();
    let mut screened = Vec::new();
    for theta in &pool {
        if chosen.len() == d {
            break;
        }
        let r = residual(theta.as_slice(), &basis);
        let rn = norm(&r);
        if rn < INDEPENDENCE_TOL {
            continue;
        }
        let (p, s) = screen(e, theta, mode, cfg)?;
        let ok = s.accepted;
        screened.push(s);
        if ok {
            basis.push(r.iter().map(|x| x / rn).collect());
            chosen.push((theta.clone(), p));
        }
    }
    if chosen.len() < d {
        return Err(Error::NoAdmissibleDirections {
            candidates: pool.len(),
        });
    }
    let mut slabs = Vec::with_capacity(d + 1);
    let mut certificates = Vec::with_capacity(d + 1);
    for (theta, p) in chosen {
        match mode {
            FamilyMode::Translate => {
                let window = covering_window(&p, cfg.reach, 1.0)?;
                let t = translate_test_set(&p, &window)?;
                slabs.push(SlabTestSet {
                    theta,
                    set: t.set,
                    window,
                    full_space: false,
                });
                certificates.push(MemberCertificate::Translate(Box::new(t.certificate)));
            }
            FamilyMode::Magnify => {
                let window = covering_window(&p, cfg.reach, cfg.a_max)?;
                let mcfg = MagnifyConfig {
                    a_max: cfg.a_max,
                    b_max: cfg.reach,
                    ..MagnifyConfig::default()
                };
                let t = magnify_test_set(&p, &window, &mcfg)?;
                slabs.push(SlabTestSet {
                    theta,
                    set: t.set,
                    window,
                    full_space: false,
                });
                certificates.push(MemberCertificate::Magnify(Box::new(t.certificate)));
            }
        }
    }
    if mode == FamilyMode::Magnify {
        slabs.push(SlabTestSet::full_space(d));
        certificates.push(MemberCertificate::FullSpace);
    }
    Ok(Family {
        slabs,
        certificates,
        screened,
    })
}
