//! Multi-level random grid sets `A = A₁ △ ⋯ △ A_L`.

use std::collections::HashMap;
use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::interval::{Builder, IntervalSet};

const MAGIC: &[u8; 4] = b"GSET";
const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    /// Fine cubes per unit length.
    pub n: u64,
    /// Coarse cells per unit length.
    pub g: u64,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomLevels {
    pub dim: usize,
    /// Integer box `[lo_k, hi_k)` per coordinate.
    pub box_lo: Vec<i64>,
    pub box_hi: Vec<i64>,
    pub levels: Vec<Level>,
}

impl RandomLevels {
    pub fn new(dim: usize, box_lo: Vec<i64>, box_hi: Vec<i64>, levels: Vec<Level>) -> Result<Self> {
        if dim == 0 || box_lo.len() != dim || box_hi.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: box_lo.len().min(box_hi.len()),
            });
        }
        if box_lo.iter().zip(&box_hi).any(|(a, b)| a >= b) {
            return Err(Error::InvalidArgument("empty bounding box".into()));
        }
        if levels.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one level is required".into(),
            ));
        }
        for (i, l) in levels.iter().enumerate() {
            let lvl = i + 1;
            if !l.n.is_power_of_two() || !l.g.is_power_of_two() {
                return Err(Error::Divisibility {
                    level: lvl,
                    detail: format!("n = {} and g = {} must be powers of two", l.n, l.g),
                });
            }
            if l.n % l.g != 0 {
                return Err(Error::Divisibility {
                    level: lvl,
                    detail: format!("g = {} does not divide n = {}", l.g, l.n),
                });
            }
            if i > 0 && l.g % levels[i - 1].n != 0 {
                return Err(Error::Divisibility {
                    level: lvl,
                    detail: format!(
                        "previous n = {} does not divide g = {}",
                        levels[i - 1].n,
                        l.g
                    ),
                });
            }
            if !(l.p > 0.0 && l.p < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "p at level {lvl} must lie in (0, 1)"
                )));
            }
            if i > 0 && l.p >= levels[i - 1].p {
                return Err(Error::InvalidArgument(format!(
                    "p must strictly decrease (level {lvl})"
                )));
            }
        }
        if levels.iter().map(|l| l.p).sum::<f64>() >= 1.0 {
            return Err(Error::InvalidArgument(
                "the p values must sum to less than 1".into(),
            ));
        }
        let finest = levels.last().unwrap().n as f64;
        let cells: f64 = box_lo
            .iter()
            .zip(&box_hi)
            .map(|(a, b)| (b - a) as f64 * finest)
            .product();
        if cells > 2f64.powi(62) {
            return Err(Error::InvalidArgument(
                "finest grid too large to index".into(),
            ));
        }
        Ok(RandomLevels {
            dim,
            box_lo,
            box_hi,
            levels,
        })
    }

    /// Interval-family defaults on `[lo, hi)`: `n = (256, 65536)`, `g = (32, 256)`, `p = (1/2, 1/4)`.
    pub fn interval_default(lo: i64, hi: i64) -> Self {
        let levels = vec![
            Level {
                n: 256,
                g: 32,
                p: 0.5,
            },
            Level {
                n: 65536,
                g: 256,
                p: 0.25,
            },
        ];
        RandomLevels::new(1, vec![lo], vec![hi], levels).expect("default levels are valid")
    }

    fn extent(&self, k: usize) -> u64 {
        (self.box_hi[k] - self.box_lo[k]) as u64
    }

    /// Fine cubes per coarse cell along one axis.
    fn ratio(&self, i: usize) -> u64 {
        self.levels[i].n / self.levels[i].g
    }

    /// Largest count `⌊p (n/g)^d⌋` drawn in one coarse cell.
    pub fn max_count(&self, i: usize) -> u64 {
        let q = (self.ratio(i) as f64).powi(self.dim as i32);
        (self.levels[i].p * q).floor() as u64
    }

    pub fn finest(&self) -> u64 {
        self.levels.last().unwrap().n
    }
}

/// Selected fine cubes of one level, as sorted linear indices into the
/// level grid of the box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSelection {
    pub level: usize,
    pub cubes: Vec<u64>,
}

fn cell_rng(seed: u64, level: usize, cell: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((level as u64) << 48) | cell);
    rng
}

/// `m` distinct values from `0..total` by a partial Fisher–Yates shuffle.
fn distinct(rng: &mut ChaCha8Rng, total: u64, m: u64) -> Vec<u64> {
    let mut swapped: HashMap<u64, u64> = HashMap::new();
    let mut out = Vec::with_capacity(m as usize);
    for i in 0..m {
        let j = rng.gen_range(i..total);
        let vj = *swapped.get(&j).unwrap_or(&j);
        let vi = *swapped.get(&i).unwrap_or(&i);
        swapped.insert(j, vi);
        out.push(vj);
    }
    out
}

/// Samples level `i` (0-based): every coarse cell draws `m` uniformly from
/// `0..=⌊p (n/g)^d⌋` and then `m` distinct fine cubes inside itself.
pub fn sample_level(levels: &RandomLevels, i: usize, seed: u64) -> LevelSelection {
    let d = levels.dim;
    let lvl = levels.levels[i];
    let q = levels.ratio(i);
    let coarse: Vec<u64> = (0..d).map(|k| levels.extent(k) * lvl.g).collect();
    let fine: Vec<u64> = (0..d).map(|k| levels.extent(k) * lvl.n).collect();
    let cells: u64 = coarse.iter().product();
    let per_cell = q.pow(d as u32);
    let max_m = levels.max_count(i);
    let mut cubes: Vec<u64> = (0..cells)
        .into_par_iter()
        .flat_map_iter(|cell| {
            let mut rng = cell_rng(seed, i, cell);
            let m = rng.gen_range(0..=max_m);
            let mut origin = vec![0u64; d];
            let mut rest = cell;
            for k in (0..d).rev() {
                origin[k] = (rest % coarse[k]) * q;
                rest /= coarse[k];
            }
            let fine = fine.clone();
            distinct(&mut rng, per_cell, m)
                .into_iter()
                .map(move |local| {
                    let mut lin = 0u64;
                    let mut rest = local;
                    let mut offs = vec![0u64; d];
                    for k in (0..d).rev() {
                        offs[k] = rest % q;
                        rest /= q;
                    }
                    for k in 0..d {
                        lin = lin * fine[k] + origin[k] + offs[k];
                    }
                    lin
                })
        })
        .collect();
    cubes.sort_unstable();
    LevelSelection { level: i, cubes }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSet {
    pub levels: RandomLevels,
    pub seed: u64,
    pub selections: Vec<LevelSelection>,
}

pub fn sample(levels: &RandomLevels, seed: u64) -> GridSet {
    let selections = (0..levels.levels.len())
        .map(|i| sample_level(levels, i, seed))
        .collect();
    GridSet {
        levels: levels.clone(),
        seed,
        selections,
    }
}

pub fn assemble(levels: &RandomLevels, selections: Vec<LevelSelection>, seed: u64) -> GridSet {
    GridSet {
        levels: levels.clone(),
        seed,
        selections,
    }
}

impl GridSet {
    fn coords(&self, i: usize, lin: u64) -> Vec<u64> {
        let d = self.levels.dim;
        let n = self.levels.levels[i].n;
        let mut c = vec![0u64; d];
        let mut rest = lin;
        for k in (0..d).rev() {
            let f = self.levels.extent(k) * n;
            c[k] = rest % f;
            rest /= f;
        }
        c
    }

    /// Finest-grid cells of `A₁ △ ⋯ △ A_L`, as sorted linear indices.
    pub fn finest_cells(&self) -> Vec<u64> {
        let d = self.levels.dim;
        let nl = self.levels.finest();
        let fine: Vec<u64> = (0..d).map(|k| self.levels.extent(k) * nl).collect();
        let mut parity: HashMap<u64, bool> = HashMap::new();
        for sel in &self.selections {
            let s = nl / self.levels.levels[sel.level].n;
            for &cube in &sel.cubes {
                let c = self.coords(sel.level, cube);
                let count = s.pow(d as u32);
                for local in 0..count {
                    let mut rest = local;
                    let mut lin = 0u64;
                    let mut offs = vec![0u64; d];
                    for k in (0..d).rev() {
                        offs[k] = rest % s;
                        rest /= s;
                    }
                    for k in 0..d {
                        lin = lin * fine[k] + c[k] * s + offs[k];
                    }
                    let e = parity.entry(lin).or_insert(false);
                    *e = !*e;
                }
            }
        }
        let mut out: Vec<u64> = parity
            .into_iter()
            .filter(|(_, v)| *v)
            .map(|(k, _)| k)
            .collect();
        out.sort_unstable();
        out
    }

    /// Whether the point lies in the assembled set (parity of the levels
    /// containing it).
    pub fn contains(&self, x: &[f64]) -> bool {
        let d = self.levels.dim;
        let mut inside = false;
        for sel in &self.selections {
            let n = self.levels.levels[sel.level].n;
            let mut lin = 0u64;
            for (k, &xk) in x.iter().enumerate().take(d) {
                let rel = xk - self.levels.box_lo[k] as f64;
                let f = self.levels.extent(k) * n;
                if rel < 0.0 || rel >= self.levels.extent(k) as f64 {
                    return false;
                }
                lin = lin * f + ((rel * n as f64).floor() as u64).min(f - 1);
            }
            if sel.cubes.binary_search(&lin).is_ok() {
                inside = !inside;
            }
        }
        inside
    }

    fn level_set(&self, sel: &LevelSelection) -> IntervalSet {
        let n = self.levels.levels[sel.level].n;
        let exp = n.trailing_zeros();
        let base = self.levels.box_lo[0] << exp;
        let mut b = Builder::with_capacity(exp, sel.cubes.len());
        for &c in &sel.cubes {
            b.push(base + c as i64, base + c as i64 + 1);
        }
        b.finish()
    }

    /// The assembled set for `d = 1`.
    pub fn to_interval_set(&self) -> Result<IntervalSet> {
        if self.levels.dim != 1 {
            return Err(Error::Dimension {
                expected: 1,
                got: self.levels.dim,
            });
        }
        Ok(self.selections.iter().fold(IntervalSet::empty(), |acc, s| {
            acc.symmdiff(&self.level_set(s))
        }))
    }

    /// Exact measure: cell count over `n_L^d`.
    pub fn measure(&self) -> Dyadic {
        if self.levels.dim == 1 {
            return self.to_interval_set().expect("dimension checked").measure();
        }
        let cells = self.finest_cells().len() as i128;
        let e = self.levels.finest().trailing_zeros() * self.levels.dim as u32;
        Dyadic::new(cells, e)
    }

    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        let lv = &self.levels;
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&(lv.dim as u32).to_le_bytes())?;
        w.write_all(&(lv.levels.len() as u32).to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        for k in 0..lv.dim {
            w.write_all(&lv.box_lo[k].to_le_bytes())?;
            w.write_all(&lv.box_hi[k].to_le_bytes())?;
        }
        for l in &lv.levels {
            w.write_all(&l.n.to_le_bytes())?;
            w.write_all(&l.g.to_le_bytes())?;
            w.write_all(&l.p.to_le_bytes())?;
        }
        for s in &self.selections {
            w.write_all(&(s.cubes.len() as u64).to_le_bytes())?;
            for c in &s.cubes {
                w.write_all(&c.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<GridSet> {
        fn take<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
            let mut b = [0u8; N];
            r.read_exact(&mut b)
                .map_err(|e| Error::Parse(format!("truncated grid set: {e}")))?;
            Ok(b)
        }
        if &take::<4, _>(&mut r)? != MAGIC {
            return Err(Error::Parse("not a grid set file".into()));
        }
        let version = u32::from_le_bytes(take(&mut r)?);
        if version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported grid set version {version}"
            )));
        }
        let dim = u32::from_le_bytes(take(&mut r)?) as usize;
        let count = u32::from_le_bytes(take(&mut r)?) as usize;
        if dim > 64 || count > 64 {
            return Err(Error::Parse("implausible grid set header".into()));
        }
        let seed = u64::from_le_bytes(take(&mut r)?);
        let mut box_lo = Vec::with_capacity(dim);
        let mut box_hi = Vec::with_capacity(dim);
        for _ in 0..dim {
            box_lo.push(i64::from_le_bytes(take(&mut r)?));
            box_hi.push(i64::from_le_bytes(take(&mut r)?));
        }
        let mut levels = Vec::with_capacity(count);
        for _ in 0..count {
            let n = u64::from_le_bytes(take(&mut r)?);
            let g = u64::from_le_bytes(take(&mut r)?);
            let p = f64::from_le_bytes(take(&mut r)?);
            levels.push(Level { n, g, p });
        }
        let levels = RandomLevels::new(dim, box_lo, box_hi, levels)?;
        let mut selections = Vec::with_capacity(count);
        for level in 0..count {
            let len = u64::from_le_bytes(take(&mut r)?) as usize;
            let mut cubes = Vec::with_capacity(len.min(1 << 24));
            for _ in 0..len {
                cubes.push(u64::from_le_bytes(take(&mut r)?));
            }
            if cubes.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Parse(format!(
                    "level {} cube indices not strictly increasing",
                    level + 1
                )));
            }
            selections.push(LevelSelection { level, cubes });
        }
        Ok(GridSet {
            levels,
            seed,
            selections,
        })
    }
}

/// `r = ⌊2·dim_P / (d − b)⌋ + 1`.
pub fn required_copies(dim_p: f64, d: usize, b: f64) -> Result<u64> {
    if !(b < d as f64) {
        return Err(Error::CopyCount { b, d });
    }
    if !(dim_p >= 0.0) || !(b >= 0.0) {
        return Err(Error::InvalidArgument(
            "dim_P and b must be non-negative".into(),
        ));
    }
    Ok((2.0 * dim_p / (d as f64 - b)).floor() as u64 + 1)
}
