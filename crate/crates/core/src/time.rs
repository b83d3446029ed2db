//! Discrete time: nanosecond timestamps and exact period arithmetic.

use std::fmt;

pub const NANOS_PER_SEC: u64 = 1_000_000_000;

/// Nanoseconds since monitor start.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(pub u64);

impl Timestamp {
    pub const ZERO: Timestamp = Timestamp(0);

    pub fn from_secs(secs: u64) -> Self {
        Timestamp(secs * NANOS_PER_SEC)
    }

    pub fn from_millis(ms: u64) -> Self {
        Timestamp(ms * 1_000_000)
    }

    pub fn nanos(self) -> u64 {
        self.0
    }

    /// Parses seconds given as a decimal number, rounding to the nearest
    /// nanosecond. Plain decimals are converted exactly; exponent notation
    /// goes through `f64`.
    pub fn parse_secs(text: &str) -> Result<Timestamp, String> {
        let text = text.trim();
        if let Some((mantissa, scale)) = parse_decimal(text) {
            let ns = scale_to_nanos(mantissa, scale)
                .ok_or_else(|| format!("timestamp `{text}` out of range"))?;
            return Ok(Timestamp(ns));
        }
        let secs: f64 = text
            .parse()
            .map_err(|_| format!("invalid timestamp `{text}`"))?;
        if !secs.is_finite() || secs < 0.0 {
            return Err(format!("invalid timestamp `{text}`"));
        }
        let ns = (secs * NANOS_PER_SEC as f64).round();
        if ns > u64::MAX as f64 {
            return Err(format!("timestamp `{text}` out of range"));
        }
        Ok(Timestamp(ns as u64))
    }

    /// Shortest exact decimal rendering in seconds (`6`, `0.7`, `1.000000001`).
    pub fn secs_string(self) -> String {
        let whole = self.0 / NANOS_PER_SEC;
        let frac = self.0 % NANOS_PER_SEC;
        if frac == 0 {
            return whole.to_string();
        }
        let digits = format!("{frac:09}");
        format!("{whole}.{}", digits.trim_end_matches('0'))
    }

    pub fn checked_add(self, d: Duration) -> Option<Timestamp> {
        self.0.checked_add(d.0).map(Timestamp)
    }

    pub fn saturating_sub(self, d: Duration) -> Timestamp {
        Timestamp(self.0.saturating_sub(d.0))
    }

    pub fn since(self, earlier: Timestamp) -> Duration {
        Duration(self.0.saturating_sub(earlier.0))
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}s", self.secs_string())
    }
}

/// A span of time in nanoseconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Duration(pub u64);

impl Duration {
    pub fn from_secs(secs: u64) -> Self {
        Duration(secs * NANOS_PER_SEC)
    }

    pub fn nanos(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Duration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}s", Timestamp(self.0).secs_string())
    }
}

/// Time units accepted after a numeric literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeUnit {
    Hertz,
    Seconds,
    Millis,
    Micros,
    Nanos,
    Minutes,
}

impl TimeUnit {
    pub fn from_suffix(s: &str) -> Option<TimeUnit> {
        Some(match s {
            "Hz" => TimeUnit::Hertz,
            "s" => TimeUnit::Seconds,
            "ms" => TimeUnit::Millis,
            "us" => TimeUnit::Micros,
            "ns" => TimeUnit::Nanos,
            "min" => TimeUnit::Minutes,
            _ => return None,
        })
    }

    pub fn suffix(self) -> &'static str {
        match self {
            TimeUnit::Hertz => "Hz",
            TimeUnit::Seconds => "s",
            TimeUnit::Millis => "ms",
            TimeUnit::Micros => "us",
            TimeUnit::Nanos => "ns",
            TimeUnit::Minutes => "min",
        }
    }
}

/// Converts `<decimal><unit>` into an exact, positive period in nanoseconds.
/// Frequencies whose period is not a whole number of nanoseconds are rejected.
pub fn period_from_literal(digits: &str, unit: TimeUnit) -> Result<Duration, String> {
    let (mantissa, scale) =
        parse_decimal(digits).ok_or_else(|| format!("invalid number `{digits}`"))?;
    if mantissa == 0 {
        return Err(format!("`{digits}{}` is not a positive duration", unit.suffix()));
    }
    let pow = 10u128.pow(scale);
    let (num, den): (u128, u128) = match unit {
        TimeUnit::Hertz => (NANOS_PER_SEC as u128 * pow, mantissa),
        TimeUnit::Seconds => (mantissa * NANOS_PER_SEC as u128, pow),
        TimeUnit::Millis => (mantissa * 1_000_000, pow),
        TimeUnit::Micros => (mantissa * 1_000, pow),
        TimeUnit::Nanos => (mantissa, pow),
        TimeUnit::Minutes => (mantissa * 60 * NANOS_PER_SEC as u128, pow),
    };
    if num % den != 0 {
        return Err(format!(
            "`{digits}{}` does not correspond to a whole number of nanoseconds",
            unit.suffix()
        ));
    }
    let ns = num / den;
    if ns == 0 || ns > u64::MAX as u128 {
        return Err(format!("`{digits}{}` is out of range", unit.suffix()));
    }
    Ok(Duration(ns as u64))
}

/// Splits `123.4500` into mantissa `1234500` and scale `4`. Returns `None`
/// for anything that is not a plain unsigned decimal.
pub fn parse_decimal(text: &str) -> Option<(u128, u32)> {
    let (int, frac) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if int.len() + frac.len() > 36 {
        return None;
    }
    let mut mantissa: u128 = 0;
    for b in int.bytes().chain(frac.bytes()) {
        mantissa = mantissa * 10 + (b - b'0') as u128;
    }
    Some((mantissa, frac.len() as u32))
}

fn scale_to_nanos(mantissa: u128, scale: u32) -> Option<u64> {
    let ns = if scale <= 9 {
        mantissa.checked_mul(10u128.pow(9 - scale))?
    } else {
        let div = 10u128.checked_pow(scale - 9)?;
        let q = mantissa / div;
        let r = mantissa % div;
        // round half up
        if r * 2 >= div {
            q + 1
        } else {
            q
        }
    };
    u64::try_from(ns).ok()
}
