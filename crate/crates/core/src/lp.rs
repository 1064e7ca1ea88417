//! ℓp exponents and metrics.
//!
//! An exponent is either a finite rational `p ≥ 1` or `∞`. The Hölder
//! conjugate is computed exactly in rational arithmetic, so
//! `conjugate(conjugate(p)) == p` holds without rounding. Floating point
//! only enters when a norm is actually evaluated.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// An extended-real norm exponent in `[1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(Ratio<u64>),
    Infinity,
}

impl Exponent {
    pub const ONE: Exponent = Exponent::Finite(Ratio::new_raw(1, 1));
    pub const TWO: Exponent = Exponent::Finite(Ratio::new_raw(2, 1));

    pub fn integer(p: u64) -> Result<Self> {
        Self::ratio(p, 1)
    }

    pub fn ratio(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::domain("exponent denominator must be nonzero"));
        }
        let r = Ratio::new(numer, denom);
        if r < Ratio::from_integer(1) {
            return Err(Error::domain(format!(
                "exponent {numer}/{denom} is below 1"
            )));
        }
        Ok(Exponent::Finite(r))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn is_one(&self) -> bool {
        *self == Self::ONE
    }

    /// Floating-point value of a finite exponent, `None` for ∞.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Exponent::Finite(r) => Some(*r.numer() as f64 / *r.denom() as f64),
            Exponent::Infinity => None,
        }
    }

    /// ℓp norm of `v` under this exponent.
    pub fn norm(&self, v: &[f64]) -> f64 {
        self.norm_iter(v.iter().copied())
    }

    /// ℓp norm of `a - b`.
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        self.norm_iter(a.iter().zip(b).map(|(x, y)| x - y))
    }

    fn norm_iter<I>(&self, it: I) -> f64
    where
        I: Iterator<Item = f64> + Clone,
    {
        match self {
            Exponent::Infinity => it.fold(0.0, |m, x| m.max(x.abs())),
            Exponent::Finite(r) if *r == Ratio::from_integer(1) => it.map(f64::abs).sum(),
            Exponent::Finite(r) if *r == Ratio::from_integer(2) => {
                it.map(|x| x * x).sum::<f64>().sqrt()
            }
            Exponent::Finite(_) => {
                let p = self.as_f64().unwrap();
                // scale by the max entry so large p cannot overflow or underflow
                let scale = it.clone().fold(0.0, |m: f64, x| m.max(x.abs()));
                if scale == 0.0 {
                    return 0.0;
                }
                let s: f64 = it.map(|x| (x.abs() / scale).powf(p)).sum();
                scale * s.powf(1.0 / p)
            }
        }
    }
}

/// Hölder conjugate `q` with `1/p + 1/q = 1`.
pub fn conjugate(p: Exponent) -> Exponent {
    match p {
        Exponent::Infinity => Exponent::ONE,
        Exponent::Finite(r) if r == Ratio::from_integer(1) => Exponent::Infinity,
        Exponent::Finite(r) => {
            // p/(p-1) = a/(a-b) for p = a/b
            let (a, b) = (*r.numer(), *r.denom());
            Exponent::Finite(Ratio::new(a, a - b))
        }
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Exponent::Infinity, Exponent::Infinity) => Ordering::Equal,
            (Exponent::Infinity, _) => Ordering::Greater,
            (_, Exponent::Infinity) => Ordering::Less,
            (Exponent::Finite(a), Exponent::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Infinity => write!(f, "inf"),
            Exponent::Finite(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Exponent::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// Accepts `inf`, `∞`, integers (`4`), fractions (`3/2`) and
    /// terminating decimals (`2.5`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "inf" | "∞" | "infinity") {
            return Ok(Exponent::Infinity);
        }
        let bad = || Error::domain(format!("cannot parse exponent `{s}`"));
        if let Some((n, d)) = s.split_once('/') {
            let n: u64 = n.trim().parse().map_err(|_| bad())?;
            let d: u64 = d.trim().parse().map_err(|_| bad())?;
            return Self::ratio(n, d);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.len() > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let denom = 10u64.pow(frac.len() as u32);
            let int: u64 = int.parse().map_err(|_| bad())?;
            let frac: u64 = if frac.is_empty() {
                0
            } else {
                frac.parse().map_err(|_| bad())?
            };
            let numer = int
                .checked_mul(denom)
                .and_then(|v| v.checked_add(frac))
                .ok_or_else(bad)?;
            return Self::ratio(numer, denom);
        }
        Self::integer(s.parse().map_err(|_| bad())?)
    }
}

/// Perturbation metric `ℓp` together with its dual exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LpMetric {
    p: Exponent,
    q: Exponent,
}

impl LpMetric {
    pub fn new(p: Exponent) -> Self {
        Self { p, q: conjugate(p) }
    }

    pub fn l1() -> Self {
        Self::new(Exponent::ONE)
    }

    pub fn l2() -> Self {
        Self::new(Exponent::TWO)
    }

    pub fn linf() -> Self {
        Self::new(Exponent::Infinity)
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    /// The Hölder conjugate of `p`.
    pub fn q(&self) -> Exponent {
        self.q
    }

    /// Dual norm `‖w‖_q`, the rate at which a half space with normal `w`
    /// expands under this metric.
    pub fn dual_norm(&self, w: &[f64]) -> f64 {
        self.q.norm(w)
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        self.p.distance(a, b)
    }
}

impl fmt::Display for LpMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l{}", self.p)
    }
}

impl FromStr for LpMetric {
    type Err = Error;

    /// Parses `l1`, `l2`, `l4`, `linf`, or `l<exponent>` in general.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let body = s
            .strip_prefix('l')
            .or_else(|| s.strip_prefix('L'))
            .ok_or_else(|| Error::domain(format!("metric `{s}` must start with `l`")))?;
        Ok(Self::new(body.parse()?))
    }
}

impl Serialize for LpMetric {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
