//! Finite unions of half-open intervals with dyadic endpoints.
//!
//! An [`IntervalSet`] stores all endpoints as `i64` numerators over one
//! common power-of-two denominator. The common exponent is the least one
//! that makes every endpoint integral, so equal sets compare equal.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

/// A finite union of disjoint half-open intervals `[lo, hi)`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntervalSet {
    exp: u32,
    /// Flattened `[lo0, hi0, lo1, hi1, ...]`, strictly increasing.
    ends: Vec<i64>,
}

/// Truncation horizon for a locally finite construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl Window {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidArgument(format!(
                "window [{lo}, {hi}] is empty"
            )));
        }
        Ok(Window { lo, hi })
    }

    pub fn from_ints(lo: i64, hi: i64) -> Result<Self> {
        Window::new(Dyadic::from_int(lo), Dyadic::from_int(hi))
    }

    pub fn width(&self) -> Dyadic {
        self.hi - self.lo
    }

    pub fn contains_range(&self, lo: f64, hi: f64) -> bool {
        lo >= self.lo.to_f64() && hi <= self.hi.to_f64()
    }

    /// Error unless `[lo, hi]` lies inside the window.
    pub fn require(&self, lo: f64, hi: f64) -> Result<()> {
        if self.contains_range(lo, hi) {
            Ok(())
        } else {
            Err(Error::WindowExceeded {
                need_lo: lo,
                need_hi: hi,
                window_lo: self.lo.to_f64(),
                window_hi: self.hi.to_f64(),
            })
        }
    }

    pub fn as_set(&self) -> IntervalSet {
        IntervalSet::normalize([(self.lo, self.hi)])
    }
}

impl Serialize for Window {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        encode_pair(self.lo, self.hi).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Window {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let q = <[i64; 4]>::deserialize(d)?;
        let (lo, hi) = decode_pair(q).map_err(D::Error::custom)?;
        Window::new(lo, hi).map_err(D::Error::custom)
    }
}

/// Set-theoretic combination of two interval sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolOp {
    Intersect,
    Union,
    SymmDiff,
    Difference,
}

impl BoolOp {
    fn keep(self, a: bool, b: bool) -> bool {
        match self {
            BoolOp::Intersect => a && b,
            BoolOp::Union => a || b,
            BoolOp::SymmDiff => a != b,
            BoolOp::Difference => a && !b,
        }
    }
}

fn to_i64(v: i128) -> i64 {
    i64::try_from(v).expect("interval endpoint exceeds 63-bit numerator range")
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    /// Build from arbitrary pairs: degenerate pairs are dropped, overlapping
    /// or touching intervals merged.
    pub fn normalize<I: IntoIterator<Item = (Dyadic, Dyadic)>>(raw: I) -> Self {
        let pairs: Vec<(Dyadic, Dyadic)> = raw.into_iter().filter(|(lo, hi)| lo < hi).collect();
        let exp = pairs
            .iter()
            .map(|(a, b)| a.exp().max(b.exp()))
            .max()
            .unwrap_or(0);
        let mut nums: Vec<(i64, i64)> = pairs
            .iter()
            .map(|(a, b)| (to_i64(a.scaled_num(exp)), to_i64(b.scaled_num(exp))))
            .collect();
        nums.sort_unstable();
        let mut b = Builder::new(exp);
        for (lo, hi) in nums {
            b.push_unordered_tail(lo, hi);
        }
        b.finish()
    }

    /// Build from pairs of integers over `2^exp`.
    pub fn from_nums(exp: u32, pairs: &[(i64, i64)]) -> Self {
        let mut v: Vec<(i64, i64)> = pairs.iter().copied().filter(|(a, b)| a < b).collect();
        v.sort_unstable();
        let mut b = Builder::new(exp);
        for (lo, hi) in v {
            b.push_unordered_tail(lo, hi);
        }
        b.finish()
    }

    pub fn is_empty(&self) -> bool {
        self.ends.is_empty()
    }

    /// Number of maximal intervals.
    pub fn len(&self) -> usize {
        self.ends.len() / 2
    }

    pub fn exp(&self) -> u32 {
        self.exp
    }

    /// Raw flattened endpoint numerators over `2^exp()`.
    pub fn raw_ends(&self) -> &[i64] {
        &self.ends
    }

    pub fn intervals(&self) -> impl Iterator<Item = (Dyadic, Dyadic)> + '_ {
        let e = self.exp;
        self.ends
            .chunks_exact(2)
            .map(move |c| (Dyadic::new(c[0] as i128, e), Dyadic::new(c[1] as i128, e)))
    }

    pub fn intervals_f64(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let s = 2f64.powi(-(self.exp as i32));
        self.ends
            .chunks_exact(2)
            .map(move |c| (c[0] as f64 * s, c[1] as f64 * s))
    }

    pub fn measure(&self) -> Dyadic {
        let total: i128 = self
            .ends
            .chunks_exact(2)
            .map(|c| (c[1] - c[0]) as i128)
            .sum();
        Dyadic::new(total, self.exp)
    }

    pub fn hull(&self) -> Option<(Dyadic, Dyadic)> {
        if self.is_empty() {
            return None;
        }
        let e = self.exp;
        Some((
            Dyadic::new(self.ends[0] as i128, e),
            Dyadic::new(*self.ends.last().unwrap() as i128, e),
        ))
    }

    pub fn contains(&self, x: Dyadic) -> bool {
        let e = self.exp.max(x.exp());
        let xs = x.scaled_num(e);
        let shift = e - self.exp;
        // count endpoints <= x
        let idx = self.ends.partition_point(|&v| ((v as i128) << shift) <= xs);
        idx % 2 == 1
    }

    fn rescaled(&self, exp: u32) -> Vec<i64> {
        debug_assert!(exp >= self.exp);
        let k = exp - self.exp;
        if k == 0 {
            return self.ends.clone();
        }
        self.ends
            .iter()
            .map(|&v| to_i64(crate::dyadic::shl_checked(v as i128, k)))
            .collect()
    }

    pub fn boolean(&self, other: &IntervalSet, op: BoolOp) -> IntervalSet {
        let exp = self.exp.max(other.exp);
        let a = self.rescaled(exp);
        let b = other.rescaled(exp);
        let (mut i, mut j) = (0usize, 0usize);
        let mut in_a = false;
        let mut in_b = false;
        let mut out = Builder::new(exp);
        let mut open: Option<i64> = None;
        while i < a.len() || j < b.len() {
            let x = match (a.get(i), b.get(j)) {
                (Some(&u), Some(&v)) => u.min(v),
                (Some(&u), None) => u,
                (None, Some(&v)) => v,
                (None, None) => unreachable!(),
            };
            while i < a.len() && a[i] == x {
                in_a = !in_a;
                i += 1;
            }
            while j < b.len() && b[j] == x {
                in_b = !in_b;
                j += 1;
            }
            let keep = op.keep(in_a, in_b);
            match (open, keep) {
                (None, true) => open = Some(x),
                (Some(lo), false) => {
                    out.push(lo, x);
                    open = None;
                }
                _ => {}
            }
        }
        out.finish()
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        self.boolean(other, BoolOp::Intersect)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        self.boolean(other, BoolOp::Union)
    }

    pub fn symmdiff(&self, other: &IntervalSet) -> IntervalSet {
        self.boolean(other, BoolOp::SymmDiff)
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        self.boolean(other, BoolOp::Difference)
    }

    /// The image `{scale * s + shift : s in self}`; `scale` must be positive.
    pub fn affine(&self, scale: Dyadic, shift: Dyadic) -> Result<IntervalSet> {
        if !scale.is_positive() {
            return Err(Error::NonPositiveScale(scale.to_string()));
        }
        let exp = (self.exp + scale.exp()).max(shift.exp());
        let k = exp - (self.exp + scale.exp());
        let sh = shift.scaled_num(exp);
        let ends = self
            .ends
            .iter()
            .map(|&v| {
                let m = (v as i128)
                    .checked_mul(scale.num())
                    .expect("affine overflow");
                to_i64(crate::dyadic::shl_checked(m, k) + sh)
            })
            .collect();
        let mut s = IntervalSet { exp, ends };
        s.canonicalize();
        Ok(s)
    }

    /// Translate by a dyadic amount.
    pub fn shift(&self, by: Dyadic) -> IntervalSet {
        self.affine(Dyadic::ONE, by)
            .expect("unit scale is positive")
    }

    pub fn restrict(&self, window: &Window) -> IntervalSet {
        self.intersect(&window.as_set())
    }

    /// Exact measure of `self ∩ [lo, hi)`.
    pub fn measure_in(&self, lo: Dyadic, hi: Dyadic) -> Dyadic {
        if lo >= hi {
            return Dyadic::ZERO;
        }
        self.intersect(&IntervalSet::normalize([(lo, hi)]))
            .measure()
    }

    fn canonicalize(&mut self) {
        if self.ends.is_empty() {
            self.exp = 0;
            return;
        }
        let tz = self
            .ends
            .iter()
            .map(|&v| if v == 0 { u32::MAX } else { v.trailing_zeros() })
            .min()
            .unwrap()
            .min(self.exp);
        if tz > 0 {
            for v in &mut self.ends {
                *v >>= tz;
            }
            self.exp -= tz;
        }
    }

    /// Cumulative measure table for repeated exact queries.
    pub fn cumulative(&self) -> Cumulative<'_> {
        let mut prefix = Vec::with_capacity(self.len() + 1);
        let mut acc = 0i128;
        prefix.push(0);
        for c in self.ends.chunks_exact(2) {
            acc += (c[1] - c[0]) as i128;
            prefix.push(acc);
        }
        Cumulative { set: self, prefix }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("interval set serializes")
    }
}

/// Exact `y ↦ λ(S ∩ (-∞, y))` backed by prefix sums.
pub struct Cumulative<'a> {
    set: &'a IntervalSet,
    prefix: Vec<i128>,
}

impl Cumulative<'_> {
    pub fn below(&self, y: Dyadic) -> Dyadic {
        let s = self.set;
        if s.is_empty() {
            return Dyadic::ZERO;
        }
        let e = s.exp.max(y.exp());
        let shift = e - s.exp;
        let ys = y.scaled_num(e);
        let scaled = |v: i64| crate::dyadic::shl_checked(v as i128, shift);
        let idx = partition_intervals(&s.ends, s.len(), |lo| scaled(lo) < ys);
        if idx == 0 {
            return Dyadic::ZERO;
        }
        let last = idx - 1;
        let lo = scaled(s.ends[2 * last]);
        let hi = scaled(s.ends[2 * last + 1]);
        let full = crate::dyadic::shl_checked(self.prefix[last], shift);
        let partial = ys.min(hi) - lo;
        Dyadic::new(full + partial, e)
    }

    /// Exact `λ(S ∩ [lo, hi))`.
    pub fn between(&self, lo: Dyadic, hi: Dyadic) -> Dyadic {
        if hi <= lo {
            return Dyadic::ZERO;
        }
        self.below(hi) - self.below(lo)
    }

    /// Float version of [`Cumulative::below`].
    pub fn below_f64(&self, y: f64) -> f64 {
        let s = self.set;
        let scale = 2f64.powi(-(s.exp as i32));
        let n = s.len();
        let idx = partition_intervals(&s.ends, n, |lo| (lo as f64) * scale < y);
        if idx == 0 {
            return 0.0;
        }
        let last = idx - 1;
        let lo = s.ends[2 * last] as f64 * scale;
        let hi = s.ends[2 * last + 1] as f64 * scale;
        self.prefix[last] as f64 * scale + (y.min(hi) - lo)
    }
}

fn partition_intervals(ends: &[i64], n: usize, pred: impl Fn(i64) -> bool) -> usize {
    let (mut lo, mut hi) = (0usize, n);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(ends[2 * mid]) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Incremental construction of an [`IntervalSet`] at a fixed exponent from
/// intervals supplied in increasing order.
#[derive(Debug)]
pub struct Builder {
    exp: u32,
    ends: Vec<i64>,
}

impl Builder {
    pub fn new(exp: u32) -> Self {
        Builder {
            exp,
            ends: Vec::new(),
        }
    }

    pub fn with_capacity(exp: u32, intervals: usize) -> Self {
        Builder {
            exp,
            ends: Vec::with_capacity(2 * intervals),
        }
    }

    pub fn exp(&self) -> u32 {
        self.exp
    }

    /// Append `[lo, hi)`; `lo` must not precede the last pushed endpoint.
    pub fn push(&mut self, lo: i64, hi: i64) {
        if lo >= hi {
            return;
        }
        if let Some(last) = self.ends.last_mut() {
            assert!(lo >= *last, "builder intervals out of order");
            if lo == *last {
                *last = hi;
                return;
            }
        }
        self.ends.push(lo);
        self.ends.push(hi);
    }

    fn push_unordered_tail(&mut self, lo: i64, hi: i64) {
        if let Some(last) = self.ends.last_mut() {
            if lo <= *last {
                if hi > *last {
                    *last = hi;
                }
                return;
            }
        }
        self.ends.push(lo);
        self.ends.push(hi);
    }

    pub fn finish(self) -> IntervalSet {
        let mut s = IntervalSet {
            exp: self.exp,
            ends: self.ends,
        };
        s.ends.shrink_to_fit();
        s.canonicalize();
        s
    }
}

fn encode_pair(lo: Dyadic, hi: Dyadic) -> [i64; 4] {
    [
        to_i64(lo.num()),
        lo.exp() as i64,
        to_i64(hi.num()),
        hi.exp() as i64,
    ]
}

fn decode_pair(q: [i64; 4]) -> std::result::Result<(Dyadic, Dyadic), String> {
    let ok = |e: i64| (0..=120).contains(&e);
    if !ok(q[1]) || !ok(q[3]) {
        return Err("exponent out of range".into());
    }
    Ok((
        Dyadic::new(q[0] as i128, q[1] as u32),
        Dyadic::new(q[2] as i128, q[3] as u32),
    ))
}

impl Serialize for IntervalSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<[i64; 4]> = self
            .intervals()
            .map(|(lo, hi)| encode_pair(lo, hi))
            .collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<[i64; 4]>::deserialize(d)?;
        let mut pairs = Vec::with_capacity(v.len());
        for q in v {
            let (lo, hi) = decode_pair(q).map_err(D::Error::custom)?;
            if lo > hi {
                return Err(D::Error::custom("interval with lo > hi"));
            }
            pairs.push((lo, hi));
        }
        Ok(IntervalSet::normalize(pairs))
    }
}

impl fmt::Debug for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (lo, hi)) in self.intervals().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if i >= 16 {
                write!(f, "... ({} intervals)", self.len())?;
                break;
            }
            write!(f, "[{lo}, {hi})")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: i64) -> Dyadic {
        Dyadic::from_int(n)
    }

    fn q(n: i128, e: u32) -> Dyadic {
        Dyadic::new(n, e)
    }

    fn set(pairs: &[(Dyadic, Dyadic)]) -> IntervalSet {
        IntervalSet::normalize(pairs.iter().copied())
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(set(&[(d(0), d(1)), (d(1), d(2))]), set(&[(d(0), d(2))]));
        assert_eq!(set(&[(d(0), d(1)), (q(1, 1), d(3))]), set(&[(d(0), d(3))]));
        let s = set(&[(d(2), d(2)), (d(0), d(1))]);
        assert_eq!(s.len(), 1);
        assert_eq!(s.hull(), Some((d(0), d(1))));
    }

    #[test]
    fn measure_examples() {
        assert_eq!(set(&[(d(0), d(1)), (d(2), d(3))]).measure(), d(2));
        assert_eq!(IntervalSet::empty().measure(), Dyadic::ZERO);
        assert_eq!(set(&[(d(0), q(1, 2))]).measure(), q(1, 2));
    }

    #[test]
    fn boolean_examples() {
        let s = set(&[(d(0), d(2))]);
        let t = set(&[(d(1), d(3))]);
        assert_eq!(s.intersect(&t), set(&[(d(1), d(2))]));
        assert_eq!(s.symmdiff(&t), set(&[(d(0), d(1)), (d(2), d(3))]));
        assert_eq!(s.union(&IntervalSet::empty()), s);
        assert_eq!(s.difference(&t), set(&[(d(0), d(1))]));
    }

    #[test]
    fn affine_examples() {
        let s = set(&[(d(0), d(1))]);
        assert_eq!(s.affine(d(2), d(3)).unwrap(), set(&[(d(3), d(5))]));
        assert_eq!(s.affine(d(1), d(0)).unwrap(), s);
        let u = set(&[(d(0), d(1)), (d(2), d(3))]);
        assert_eq!(u.affine(q(1, 1), d(0)).unwrap().measure(), d(1));
        assert!(matches!(
            s.affine(d(0), d(0)),
            Err(Error::NonPositiveScale(_))
        ));
        assert!(s.affine(d(-1), d(0)).is_err());
    }

    #[test]
    fn contains_and_cumulative() {
        let s = set(&[(d(0), d(1)), (d(2), q(7, 1))]);
        assert!(s.contains(d(0)));
        assert!(!s.contains(d(1)));
        assert!(s.contains(q(5, 1)));
        let c = s.cumulative();
        assert_eq!(c.below(d(-1)), Dyadic::ZERO);
        assert_eq!(c.below(q(1, 1)), q(1, 1));
        assert_eq!(c.below(q(5, 1)), q(3, 1));
        assert_eq!(c.below(d(10)), q(5, 1));
        assert_eq!(c.between(q(1, 1), d(3)), q(3, 1));
        assert!((c.below_f64(2.25) - 1.25).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let s = set(&[(q(-3, 2), d(1)), (d(2), q(7, 1))]);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, "[[-3,2,1,0],[2,0,7,1]]");
        let back: IntervalSet = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let w = Window::from_ints(0, 8).unwrap();
        let wt = serde_json::to_string(&w).unwrap();
        assert_eq!(serde_json::from_str::<Window>(&wt).unwrap(), w);
    }

    #[test]
    fn window_rules() {
        assert!(Window::from_ints(1, 1).is_err());
        let w = Window::from_ints(0, 8).unwrap();
        assert!(w.require(0.0, 8.0).is_ok());
        assert!(matches!(
            w.require(-0.5, 1.0),
            Err(Error::WindowExceeded { .. })
        ));
    }
}
