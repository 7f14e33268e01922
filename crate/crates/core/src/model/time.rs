use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A non-negative time value in integer milliseconds.
///
/// All timestamps and durations in the engine use this type so that
/// comparisons are exact and serialized values are byte-stable.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Millis(pub u64);

impl Millis {
    pub const ZERO: Millis = Millis(0);

    pub fn from_secs(secs: u64) -> Millis {
        Millis(secs * 1000)
    }

    pub fn as_ms(self) -> u64 {
        self.0
    }

    pub fn saturating_sub(self, other: Millis) -> Millis {
        Millis(self.0.saturating_sub(other.0))
    }

    /// Converts floating-point seconds, rejecting values that are negative,
    /// non-finite, or not on the millisecond grid.
    pub fn from_secs_f64(secs: f64) -> Result<Millis> {
        if !secs.is_finite() || secs < 0.0 {
            return Err(Error::InvalidTime(secs.to_string(), "must be a finite non-negative number"));
        }
        let ms = (secs * 1000.0).round();
        if (ms - secs * 1000.0).abs() > 1e-6 * ms.max(1.0) || ms > u64::MAX as f64 / 2.0 {
            return Err(Error::InvalidTime(secs.to_string(), "not representable at millisecond resolution"));
        }
        Ok(Millis(ms as u64))
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / 1000.0
    }
}

impl Add for Millis {
    type Output = Millis;
    fn add(self, rhs: Millis) -> Millis {
        Millis(self.0 + rhs.0)
    }
}

impl Sub for Millis {
    type Output = Millis;
    fn sub(self, rhs: Millis) -> Millis {
        Millis(self.0 - rhs.0)
    }
}

/// Always three decimals: `43707.000`.
impl fmt::Display for Millis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:03}", self.0 / 1000, self.0 % 1000)
    }
}

/// Accepts decimal seconds (`43707`, `43707.5`, `43707.000`) or clock time
/// `HH:MM:SS(.mmm)`, which is read as seconds since midnight.
impl FromStr for Millis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Millis> {
        if s.contains(':') {
            parse_clock(s)
        } else {
            parse_decimal(s)
        }
    }
}

impl Serialize for Millis {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        // Emitted as a JSON number with exactly three decimals.
        let raw = serde_json::value::RawValue::from_string(self.to_string())
            .map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

fn parse_digits(s: &str, original: &str) -> Result<u64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::InvalidTime(original.to_string(), "expected digits"));
    }
    s.parse::<u64>()
        .map_err(|_| Error::InvalidTime(original.to_string(), "value out of range"))
}

fn parse_fraction(frac: &str, original: &str) -> Result<u64> {
    if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::InvalidTime(original.to_string(), "expected fractional digits"));
    }
    if frac.len() > 3 {
        return Err(Error::InvalidTime(
            original.to_string(),
            "more than three decimals (finer than millisecond resolution)",
        ));
    }
    let mut ms = frac.parse::<u64>().unwrap_or(0);
    for _ in frac.len()..3 {
        ms *= 10;
    }
    Ok(ms)
}

fn parse_decimal(s: &str) -> Result<Millis> {
    let (whole, frac) = match s.split_once('.') {
        Some((w, f)) => (w, Some(f)),
        None => (s, None),
    };
    let secs = parse_digits(whole, s)?;
    let ms = match frac {
        Some(f) => parse_fraction(f, s)?,
        None => 0,
    };
    secs.checked_mul(1000)
        .and_then(|v| v.checked_add(ms))
        .map(Millis)
        .ok_or_else(|| Error::InvalidTime(s.to_string(), "value out of range"))
}

fn parse_clock(s: &str) -> Result<Millis> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidTime(s.to_string(), "clock time must be HH:MM:SS(.mmm)"));
    }
    let hours = parse_digits(parts[0], s)?;
    let minutes = parse_digits(parts[1], s)?;
    let (sec_str, frac) = match parts[2].split_once('.') {
        Some((w, f)) => (w, Some(f)),
        None => (parts[2], None),
    };
    let seconds = parse_digits(sec_str, s)?;
    if parts[1].len() != 2 || sec_str.len() != 2 || minutes >= 60 || seconds >= 60 {
        return Err(Error::InvalidTime(s.to_string(), "minutes and seconds must be two digits below 60"));
    }
    let ms = match frac {
        Some(f) => parse_fraction(f, s)?,
        None => 0,
    };
    hours
        .checked_mul(3600)
        .and_then(|h| h.checked_add(minutes * 60 + seconds))
        .and_then(|v| v.checked_mul(1000))
        .and_then(|v| v.checked_add(ms))
        .map(Millis)
        .ok_or_else(|| Error::InvalidTime(s.to_string(), "value out of range"))
}

/// A closed time interval `[start, end]` with `end >= start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TimeInterval {
    start: Millis,
    end: Millis,
}

impl TimeInterval {
    pub fn new(start: Millis, end: Millis) -> Result<TimeInterval> {
        if end < start {
            return Err(Error::InvertedInterval { start: start.to_string(), end: end.to_string() });
        }
        Ok(TimeInterval { start, end })
    }

    pub fn from_ms(start: u64, end: u64) -> Result<TimeInterval> {
        TimeInterval::new(Millis(start), Millis(end))
    }

    pub fn point(t: Millis) -> TimeInterval {
        TimeInterval { start: t, end: t }
    }

    pub fn start(&self) -> Millis {
        self.start
    }

    pub fn end(&self) -> Millis {
        self.end
    }

    pub fn duration(&self) -> Millis {
        self.end - self.start
    }

    pub fn is_point(&self) -> bool {
        self.start == self.end
    }

    /// Closed-interval containment of a time point.
    pub fn contains(&self, t: Millis) -> bool {
        self.start <= t && t <= self.end
    }

    pub fn contains_interval(&self, other: &TimeInterval) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn intersection(&self, other: &TimeInterval) -> Option<TimeInterval> {
        let start = self.start.max(other.start);
        let end = self.end.min(other.end);
        (start <= end).then_some(TimeInterval { start, end })
    }

    /// Smallest interval covering both.
    pub fn hull(&self, other: &TimeInterval) -> TimeInterval {
        TimeInterval { start: self.start.min(other.start), end: self.end.max(other.end) }
    }
}

impl fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end)
    }
}
