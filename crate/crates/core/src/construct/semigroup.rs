//! Test sets for finite unions of intervals: `T = A ∪ (A + G)` with `G` the
//! additive semigroup of the component lengths and `A ∩ (A + G) = ∅`.

use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::interval::{IntervalSet, Window};

const MAX_SEMIGROUP_GRID: i128 = 1 << 26;

/// `{Σ kᵢ aᵢ} \ {0}` intersected with `(0, bound]`, ascending.
pub fn semigroup(lengths: &[Dyadic], bound: Dyadic) -> Result<Vec<Dyadic>> {
    if lengths.is_empty() {
        return Err(Error::InvalidArgument(
            "semigroup needs at least one length".into(),
        ));
    }
    if let Some(l) = lengths.iter().find(|l| !l.is_positive()) {
        return Err(Error::InvalidArgument(format!(
            "length {l} is not positive"
        )));
    }
    if !bound.is_positive() {
        return Ok(Vec::new());
    }
    let e = lengths.iter().map(|l| l.exp()).max().unwrap();
    let top = bound.floor_to(e).scaled_num(e);
    if top > MAX_SEMIGROUP_GRID {
        return Err(Error::InvalidArgument(format!(
            "semigroup grid of {top} points is too large"
        )));
    }
    let steps: Vec<usize> = lengths.iter().map(|l| l.scaled_num(e) as usize).collect();
    let top = top as usize;
    let mut reach = vec![false; top + 1];
    reach[0] = true;
    for x in 1..=top {
        reach[x] = steps.iter().any(|&s| s <= x && reach[x - s]);
    }
    Ok((1..=top)
        .filter(|&x| reach[x])
        .map(|x| Dyadic::new(x as i128, e))
        .collect())
}

fn infeasible(rho: Dyadic, min_g: Dyadic) -> Error {
    Error::InfeasibleResolution {
        rho: rho.to_string(),
        min_g: min_g.to_string(),
    }
}

/// Cells of length `ρ/2` tile the window; each cell receives the first free
/// aligned subcell avoiding every earlier piece shifted by an element of `G`.
/// Returns `A` with `A ∩ (A + g) = ∅` for all `g ∈ G` and positive measure
/// in every subinterval of length `ρ`.
pub fn avoidance_set(g: &[Dyadic], window: &Window, rho: Dyadic) -> Result<IntervalSet> {
    if !rho.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "resolution {rho} must be positive"
        )));
    }
    if let Some(bad) = g.iter().find(|x| !x.is_positive()) {
        return Err(Error::InvalidArgument(format!(
            "semigroup element {bad} is not positive"
        )));
    }
    if let Some(&min_g) = g.iter().min() {
        if rho >= min_g {
            return Err(infeasible(rho, min_g));
        }
    }
    let width = window.width();
    let relevant: Vec<Dyadic> = g.iter().copied().filter(|x| *x < width).collect();
    let cell = rho.half();
    let mut e = [cell.exp(), window.lo.exp(), window.hi.exp()]
        .into_iter()
        .chain(relevant.iter().map(|x| x.exp()))
        .max()
        .unwrap();
    let need = 4 * relevant.len() as i128 + 4;
    while cell.scaled_num(e) < need {
        e += 1;
    }
    if e > 60 {
        return Err(Error::InvalidArgument("avoidance grid is too fine".into()));
    }
    let lo = window.lo.scaled_num(e) as i64;
    let hi = window.hi.scaled_num(e) as i64;
    let cn = cell.scaled_num(e) as i64;
    let gn: Vec<i64> = relevant.iter().map(|x| x.scaled_num(e) as i64).collect();
    let mut pieces: Vec<i64> = Vec::new();
    let mut start = lo;
    while start < hi {
        let end = (start + cn).min(hi);
        let mut forbidden: Vec<i64> = Vec::new();
        for &s in &gn {
            // earlier pieces a with a + s inside [start, end)
            let (from, to) = (start - s, end - s);
            if to <= lo {
                continue;
            }
            let first = ((from - lo).max(0) / cn) as usize;
            let last = (((to - 1 - lo) / cn) as usize).min(pieces.len().saturating_sub(1));
            for &a in pieces.iter().take(last + 1).skip(first) {
                if a >= from && a < to {
                    forbidden.push(a + s);
                }
            }
        }
        forbidden.sort_unstable();
        let mut pick = start;
        for f in forbidden {
            if f == pick {
                pick += 1;
            } else if f > pick {
                break;
            }
        }
        if pick >= end {
            if end - start == cn {
                return Err(Error::InvalidArgument(
                    "avoidance cell has no free subcell".into(),
                ));
            }
        } else {
            pieces.push(pick);
        }
        start = end;
    }
    let pairs: Vec<(i64, i64)> = pieces.iter().map(|&a| (a, a + 1)).collect();
    Ok(IntervalSet::from_nums(e, &pairs))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnionTestSet {
    pub set: IntervalSet,
    pub avoidance: IntervalSet,
    pub semigroup: Vec<Dyadic>,
    pub resolution: Dyadic,
    pub window: Window,
    /// Monotonicity is guaranteed for translation steps of at least this size.
    pub min_step: Dyadic,
}

/// `T = (A ∪ (A + G)) ∩ window` for the semigroup generated by `lengths`.
pub fn union_test_set(lengths: &[Dyadic], window: &Window, rho: Dyadic) -> Result<UnionTestSet> {
    let g = semigroup(lengths, window.width())?;
    let a = avoidance_set(&g, window, rho)?;
    let mut pairs: Vec<(Dyadic, Dyadic)> = a.intervals().collect();
    for &s in &g {
        pairs.extend(
            a.intervals()
                .map(|(l, h)| (l + s, h + s))
                .filter(|(l, _)| *l < window.hi),
        );
    }
    let set = IntervalSet::normalize(pairs).restrict(window);
    Ok(UnionTestSet {
        set,
        avoidance: a,
        semigroup: g,
        resolution: rho,
        window: *window,
        min_step: rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i128, e: u32) -> Dyadic {
        Dyadic::new(n, e)
    }

    #[test]
    fn semigroup_examples() {
        let one = Dyadic::ONE;
        assert_eq!(
            semigroup(&[one], q(7, 1)).unwrap(),
            vec![q(1, 0), q(2, 0), q(3, 0)]
        );
        let g = semigroup(&[one, q(3, 1)], q(4, 0)).unwrap();
        let expect: Vec<Dyadic> = [2, 3, 4, 5, 6, 7, 8].iter().map(|&k| q(k, 1)).collect();
        assert_eq!(g, expect);
        assert!(semigroup(&[q(2, 0)], one).unwrap().is_empty());
        assert!(semigroup(&[], one).is_err());
    }

    /// Exact postcondition check via boolean operations.
    fn check_avoidance(a: &IntervalSet, g: &[Dyadic], window: &Window, rho: Dyadic) {
        for &s in g {
            assert!(
                a.intersect(&a.shift(s)).restrict(window).is_empty(),
                "A meets A+{s}"
            );
        }
        // every length-ρ subinterval contains a full cell of length ρ/2, so
        // checking intervals starting on the ρ/4 grid is exhaustive
        let step = rho.half().half();
        let mut x = window.lo;
        while x + rho <= window.hi {
            assert!(a.measure_in(x, x + rho).is_positive(), "empty at {x}");
            x = x + step;
        }
        assert!(a.difference(&window.as_set()).is_empty());
    }

    #[test]
    fn integers_window_two() {
        let w = Window::from_ints(0, 2).unwrap();
        let g = semigroup(&[Dyadic::ONE], w.width()).unwrap();
        let rho = q(1, 4);
        let a = avoidance_set(&g, &w, rho).unwrap();
        check_avoidance(&a, &g, &w, rho);
    }

    #[test]
    fn shift_leaving_window() {
        let w = Window::new(Dyadic::ZERO, q(1, 1)).unwrap();
        let a = avoidance_set(&[Dyadic::ONE], &w, q(1, 2)).unwrap();
        check_avoidance(&a, &[Dyadic::ONE], &w, q(1, 2));
        assert!(matches!(
            avoidance_set(&[q(1, 1)], &w, q(1, 1)),
            Err(Error::InfeasibleResolution { .. })
        ));
    }

    #[test]
    fn mixed_lengths() {
        let w = Window::from_ints(0, 12).unwrap();
        let t = union_test_set(&[Dyadic::ONE, q(3, 1)], &w, q(1, 4)).unwrap();
        check_avoidance(&t.avoidance, &t.semigroup, &w, q(1, 4));
        assert!(t.avoidance.difference(&t.set).is_empty());
    }

    #[test]
    fn unit_interval_monotone_exactly() {
        let w = Window::from_ints(0, 8).unwrap();
        let rho = q(1, 4);
        let t = union_test_set(&[Dyadic::ONE], &w, rho).unwrap();
        let mut prev = None;
        let mut x = Dyadic::ZERO;
        while x <= Dyadic::from_int(6) {
            let m = t.set.measure_in(x, x + Dyadic::ONE);
            if let Some(p) = prev {
                assert!(m > p, "not increasing at {x}");
            }
            prev = Some(m);
            x = x + rho;
        }
    }
}
