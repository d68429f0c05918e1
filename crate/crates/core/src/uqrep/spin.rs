use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A spin `s` in `(1/2) Z_{>=0}`, stored as the integer `2s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Spin(u32);

impl Spin {
    pub const ZERO: Spin = Spin(0);
    pub const HALF: Spin = Spin(1);

    pub const fn from_twice(twice: u32) -> Self {
        Spin(twice)
    }

    pub const fn integer(n: u32) -> Self {
        Spin(2 * n)
    }

    pub const fn twice(self) -> u32 {
        self.0
    }

    pub const fn dim(self) -> usize {
        self.0 as usize + 1
    }

    pub const fn is_integer(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub const fn as_integer(self) -> Option<u32> {
        if self.is_integer() {
            Some(self.0 / 2)
        } else {
            None
        }
    }

    /// Twice the weights `-s, ..., s` in ascending order.
    pub fn twice_weights(self) -> impl Iterator<Item = i64> {
        let s = self.0 as i64;
        (0..=s).map(move |k| -s + 2 * k)
    }

    /// Spins `|n - m|, ..., n + m` occurring in `H_n (x) H_m`.
    pub fn tensor_range(n: Spin, m: Spin) -> impl Iterator<Item = Spin> {
        let lo = n.0.abs_diff(m.0);
        (0..=(n.0 + m.0 - lo) / 2).map(move |k| Spin(lo + 2 * k))
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for Spin {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("not a nonnegative half-integer: {s:?}"));
        let s = s.trim();
        if let Some(num) = s.strip_suffix("/2") {
            let n: u32 = num.trim().parse().map_err(|_| bad())?;
            return Ok(Spin(n));
        }
        if let Ok(n) = s.parse::<u32>() {
            return Ok(Spin(2 * n));
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        let t = 2.0 * x;
        if x < 0.0 || t.fract() != 0.0 {
            return Err(bad());
        }
        Ok(Spin(t as u32))
    }
}

impl From<Spin> for String {
    fn from(s: Spin) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for Spin {
    type Error = Error;
    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}
