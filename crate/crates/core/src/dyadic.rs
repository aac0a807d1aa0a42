//! Exact dyadic rationals `num / 2^exp`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A dyadic rational `num / 2^exp` kept in canonical form: when `exp > 0`
/// the numerator is odd, and zero is always `0 / 2^0`.
///
/// All arithmetic is exact. Overflow of the 128-bit numerator panics.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(into = "(i128, u32)", try_from = "(i128, u32)")]
pub struct Dyadic {
    num: i128,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    pub fn new(num: i128, exp: u32) -> Self {
        let mut d = Dyadic { num, exp };
        d.canonicalize();
        d
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic {
            num: n as i128,
            exp: 0,
        }
    }

    /// `2^-k`.
    pub fn pow2_neg(k: u32) -> Self {
        Dyadic { num: 1, exp: k }
    }

    pub fn num(&self) -> i128 {
        self.num
    }

    pub fn exp(&self) -> u32 {
        self.exp
    }

    fn canonicalize(&mut self) {
        if self.num == 0 {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().min(self.exp);
        self.num >>= tz;
        self.exp -= tz;
    }

    /// Numerator of `self` over the denominator `2^exp`; requires `exp >= self.exp()`.
    pub fn scaled_num(&self, exp: u32) -> i128 {
        debug_assert!(exp >= self.exp);
        shl_checked(self.num, exp - self.exp)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / 2f64.powi(self.exp as i32)
    }

    /// Exact conversion of a finite float (every finite `f64` is dyadic).
    pub fn from_f64_exact(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Self::ZERO);
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i128 } else { 1 };
        let biased = ((bits >> 52) & 0x7ff) as i32;
        let frac = (bits & ((1u64 << 52) - 1)) as i128;
        let (mant, e) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1i128 << 52), biased - 1075)
        };
        if e >= 0 {
            if e > 70 {
                return None;
            }
            Some(Dyadic::new(sign * (mant << e), 0))
        } else {
            let k = (-e) as u32;
            let mut d = Dyadic {
                num: sign * mant,
                exp: 0,
            };
            // reduce before storing a huge exponent
            let tz = d.num.trailing_zeros().min(k);
            d.num >>= tz;
            let k = k - tz;
            if k > 120 {
                return None;
            }
            d.exp = k;
            Some(d)
        }
    }

    /// Round `x` to the nearest multiple of `2^-exp`, returning the snapped
    /// value and the absolute snap error.
    pub fn snap(x: f64, exp: u32) -> (Self, f64) {
        let scaled = (x * 2f64.powi(exp as i32)).round();
        let d = Dyadic::new(scaled as i128, exp);
        (d, (d.to_f64() - x).abs())
    }

    /// Largest multiple of `2^-exp` not exceeding `self`.
    pub fn floor_to(&self, exp: u32) -> Self {
        if self.exp <= exp {
            return *self;
        }
        let shift = self.exp - exp;
        Dyadic::new(self.num >> shift, exp)
    }

    /// Smallest multiple of `2^-exp` not below `self`.
    pub fn ceil_to(&self, exp: u32) -> Self {
        -(-*self).floor_to(exp)
    }

    pub fn floor(&self) -> i64 {
        (self.num >> self.exp) as i64
    }

    pub fn ceil(&self) -> i64 {
        -((-*self).floor())
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_positive(&self) -> bool {
        self.num > 0
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            num: self.num.abs(),
            exp: self.exp,
        }
    }

    pub fn half(&self) -> Self {
        Dyadic::new(self.num, self.exp + 1)
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// True when `self` is an integer power of two (positive).
    pub fn is_power_of_two(&self) -> bool {
        self.num > 0 && (self.num & (self.num - 1)) == 0
    }
}

pub(crate) fn shl_checked(v: i128, k: u32) -> i128 {
    if v == 0 {
        return 0;
    }
    assert!(k < 127, "dyadic exponent overflow");
    let r = v
        .checked_mul(1i128 << k)
        .expect("dyadic numerator overflow");
    r
}

fn align(a: &Dyadic, b: &Dyadic) -> (i128, i128, u32) {
    let e = a.exp.max(b.exp);
    (a.scaled_num(e), b.scaled_num(e), e)
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let (a, b, e) = align(&self, &rhs);
        Dyadic::new(a.checked_add(b).expect("dyadic numerator overflow"), e)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        let (a, b, e) = align(&self, &rhs);
        Dyadic::new(a.checked_sub(b).expect("dyadic numerator overflow"), e)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        let num = self
            .num
            .checked_mul(rhs.num)
            .expect("dyadic numerator overflow");
        Dyadic::new(num, self.exp + rhs.exp)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -self.num,
            exp: self.exp,
        }
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::ZERO, |a, b| a + b)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = align(self, other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for Dyadic {
    fn from(n: i64) -> Self {
        Dyadic::from_int(n)
    }
}

impl From<Dyadic> for (i128, u32) {
    fn from(d: Dyadic) -> Self {
        (d.num, d.exp)
    }
}

impl TryFrom<(i128, u32)> for Dyadic {
    type Error = String;
    fn try_from((num, exp): (i128, u32)) -> std::result::Result<Self, String> {
        if exp > 120 {
            return Err(format!("exponent {exp} too large"));
        }
        Ok(Dyadic::new(num, exp))
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

/// Outcome of parsing a command-line number into a dyadic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Parsed {
    pub value: Dyadic,
    /// Absolute snap error; zero when the text denoted a dyadic exactly.
    pub snap_error: f64,
}

/// Default resolution for snapping non-dyadic input: `2^-32`.
pub const DEFAULT_SNAP_EXP: u32 = 32;

/// Parse `p/2^k`, `p/q` with `q` a power of two, an integer, or a decimal
/// (snapped to `2^-snap_exp` when not exactly dyadic).
pub fn parse_dyadic(text: &str, snap_exp: u32) -> Result<Parsed> {
    let t = text.trim();
    let bad = || Error::Parse(format!("not a number: {text:?}"));
    if let Some((p, q)) = t.split_once('/') {
        let p: i128 = p.trim().parse().map_err(|_| bad())?;
        let q = q.trim();
        let k = if let Some(k) = q.strip_prefix("2^") {
            k.parse::<u32>().map_err(|_| bad())?
        } else {
            let q: u128 = q.parse().map_err(|_| bad())?;
            if q == 0 || (q & (q - 1)) != 0 {
                let x = p as f64 / q as f64;
                let (value, snap_error) = Dyadic::snap(x, snap_exp);
                return Ok(Parsed { value, snap_error });
            }
            q.trailing_zeros()
        };
        return Ok(Parsed {
            value: Dyadic::new(p, k),
            snap_error: 0.0,
        });
    }
    if let Ok(n) = t.parse::<i64>() {
        return Ok(Parsed {
            value: Dyadic::from_int(n),
            snap_error: 0.0,
        });
    }
    // decimal: exact when the decimal expansion is dyadic
    let x: f64 = t.parse().map_err(|_| bad())?;
    let (value, snap_error) = Dyadic::snap(x, snap_exp);
    let exact = decimal_is_exact(t, &value);
    Ok(Parsed {
        value,
        snap_error: if exact {
            0.0
        } else {
            snap_error.max(f64::MIN_POSITIVE)
        },
    })
}

fn decimal_is_exact(text: &str, value: &Dyadic) -> bool {
    // compare text * 10^digits with value * 10^digits exactly
    let (neg, body) = match text.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if fp.len() > 30 || !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return false;
    }
    let digits = format!("{ip}{fp}");
    let Ok(mut n) = digits.parse::<i128>() else {
        return false;
    };
    if neg {
        n = -n;
    }
    let scale = 10i128.pow(fp.len() as u32);
    // value.num / 2^exp == n / scale  <=>  value.num * scale == n * 2^exp
    let lhs = value.num.checked_mul(scale);
    let rhs = if value.exp < 100 {
        n.checked_mul(1i128 << value.exp.min(126))
    } else {
        None
    };
    matches!((lhs, rhs), (Some(a), Some(b)) if a == b)
}

impl FromStr for Dyadic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let p = parse_dyadic(s, DEFAULT_SNAP_EXP)?;
        if p.snap_error > 0.0 {
            return Err(Error::Parse(format!("{s:?} is not a dyadic rational")));
        }
        Ok(p.value)
    }
}
