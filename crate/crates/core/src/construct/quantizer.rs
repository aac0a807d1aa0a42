//! Block-by-block quantization of a smooth target by an indicator.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construct::target::Target;
use crate::error::{Error, Result};
use crate::interval::{Builder, IntervalSet, Window};

/// The trimming length `h` is snapped to this dyadic grid.
pub const TRIM_EXP: u32 = 44;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellBudget(Vec<f64>);

impl ShellBudget {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument(
                "shell budget needs at least one value".into(),
            ));
        }
        if let Some(v) = values.iter().find(|v| !(**v > 0.0 && **v < 1.0)) {
            return Err(Error::InvalidArgument(format!(
                "shell budget value {v} outside (0, 1)"
            )));
        }
        Ok(ShellBudget(values))
    }

    pub fn constant(v: f64) -> Result<Self> {
        Self::new(vec![v])
    }

    /// `δ(k)`; shells past the table reuse the last value.
    pub fn get(&self, k: usize) -> f64 {
        self.0[k.min(self.0.len() - 1)]
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Least power of two exceeding `4/δ(k)`.
    pub fn blocks(&self, k: usize) -> u64 {
        let q = (4.0 / self.get(k)).floor() as u64 + 1;
        q.next_power_of_two()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellRecord {
    /// Left end of the unit interval.
    pub origin: i64,
    /// Shell index `⌊|x|⌋` for `x` inside the interval.
    pub shell: usize,
    pub blocks: u64,
    pub delta: f64,
    /// Length trimmed from the left end.
    pub trim: f64,
    /// `∫(χ_T − Φ)` over the interval after trimming.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct Quantized {
    pub set: IntervalSet,
    pub shells: Vec<ShellRecord>,
}

fn shell_index(origin: i64) -> usize {
    if origin >= 0 {
        origin as usize
    } else {
        (-origin - 1) as usize
    }
}

/// Runs the keep/skip rule on `[origin, origin + 1]` with `n = 2^n_exp`
/// blocks, returning interval numerators at [`TRIM_EXP`].
fn quantize_unit(
    target: &dyn Target,
    origin: i64,
    n_exp: u32,
    delta: f64,
) -> (Vec<(i64, i64)>, ShellRecord) {
    assert!(n_exp >= 1 && n_exp < TRIM_EXP);
    let n = 1u64 << n_exp;
    let inv = 1.0 / n as f64;
    let blocks = target.block_integrals(origin as f64, inv, n as usize);
    let mut kept = Vec::with_capacity(blocks.len());
    // quadrature rounding must not turn an exact tie into a keep
    let tol = 1e-13 * inv;
    let legal = |v: f64| v >= -tol && v <= inv + tol;
    let mut s = 0.0;
    for c in blocks {
        let skip = s - c;
        let keep = s + inv - c;
        let take = if legal(skip) {
            false
        } else if legal(keep) {
            true
        } else {
            let viol = |v: f64| if v < 0.0 { -v } else { v - inv };
            viol(keep) < viol(skip)
        };
        s = if take { keep } else { skip };
        kept.push(take);
    }
    let trim_num = ((s.clamp(0.0, inv) * 2f64.powi(TRIM_EXP as i32)).round() as i64)
        .min(1i64 << (TRIM_EXP - n_exp));
    let trim = trim_num as f64 / 2f64.powi(TRIM_EXP as i32);
    let base = origin << TRIM_EXP;
    let step = 1i64 << (TRIM_EXP - n_exp);
    let mut out: Vec<(i64, i64)> = Vec::new();
    for (k, &take) in kept.iter().enumerate() {
        if !take {
            continue;
        }
        let mut lo = base + k as i64 * step;
        let hi = lo + step;
        if k == 0 {
            lo += trim_num;
        }
        match out.last_mut() {
            Some(last) if last.1 == lo => last.1 = hi,
            _ if lo < hi => out.push((lo, hi)),
            _ => {}
        }
    }
    // the first block is always kept, so the trim lands inside it
    debug_assert!(kept.first().copied().unwrap_or(true));
    let rec = ShellRecord {
        origin,
        shell: shell_index(origin),
        blocks: n,
        delta,
        trim,
        residual: s - trim,
    };
    (out, rec)
}

/// Quantizes `Φ` on `[0, 1]` with `n` blocks.
pub fn greedy_quantizer(target: &dyn Target, n: u64) -> Result<Quantized> {
    if n < 2 || !n.is_power_of_two() || n >= 1 << (TRIM_EXP - 1) {
        return Err(Error::InvalidArgument(format!(
            "block count {n} must be a power of two in [2, 2^43)"
        )));
    }
    let (pairs, rec) = quantize_unit(target, 0, n.trailing_zeros(), 4.0 / n as f64);
    let mut b = Builder::with_capacity(TRIM_EXP, pairs.len());
    for (lo, hi) in pairs {
        b.push(lo, hi);
    }
    Ok(Quantized {
        set: b.finish(),
        shells: vec![rec],
    })
}

/// Quantizes `Φ` independently on every unit interval of an integer window;
/// the interval `[k, k+1]` or `[−k−1, −k]` uses budget `δ(k)`.
pub fn tiled_quantizer(
    target: &dyn Target,
    budget: &ShellBudget,
    window: &Window,
) -> Result<Quantized> {
    let (lo, hi) = (window.lo, window.hi);
    if lo.exp() != 0 || hi.exp() != 0 {
        return Err(Error::InvalidArgument(
            "tiled quantizer needs integer window endpoints".into(),
        ));
    }
    let origins: Vec<i64> = (lo.floor()..hi.floor()).collect();
    let runs: Vec<(Vec<(i64, i64)>, ShellRecord)> = origins
        .par_iter()
        .map(|&o| {
            let k = shell_index(o);
            let n = budget.blocks(k);
            if n >= 1 << (TRIM_EXP - 1) {
                return Err(Error::InvalidArgument(format!(
                    "budget δ({k}) = {} needs too many blocks",
                    budget.get(k)
                )));
            }
            Ok(quantize_unit(target, o, n.trailing_zeros(), budget.get(k)))
        })
        .collect::<Result<_>>()?;
    let total: usize = runs.iter().map(|r| r.0.len()).sum();
    let mut b = Builder::with_capacity(TRIM_EXP, total);
    let mut shells = Vec::with_capacity(runs.len());
    for (pairs, rec) in runs {
        for (l, h) in pairs {
            b.push(l, h);
        }
        shells.push(rec);
    }
    Ok(Quantized {
        set: b.finish(),
        shells,
    })
}
