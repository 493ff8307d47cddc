use std::sync::atomic::{AtomicI64, Ordering};

use chrono::{DateTime, Utc};

/// Source of assessment timestamps.
pub trait Clock: Send + Sync + std::fmt::Debug {
    fn now(&self) -> DateTime<Utc>;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

/// Deterministic clock for tests: returns `start`, then advances by `step_ms`
/// on every read. A zero step yields identical timestamps.
#[derive(Debug)]
pub struct ManualClock {
    next_ms: AtomicI64,
    step_ms: i64,
}

impl ManualClock {
    pub fn new(start: DateTime<Utc>, step_ms: i64) -> Self {
        ManualClock {
            next_ms: AtomicI64::new(start.timestamp_millis()),
            step_ms,
        }
    }

    pub fn starting_at_millis(start_ms: i64, step_ms: i64) -> Self {
        ManualClock {
            next_ms: AtomicI64::new(start_ms),
            step_ms,
        }
    }

    pub fn set(&self, at: DateTime<Utc>) {
        self.next_ms.store(at.timestamp_millis(), Ordering::SeqCst);
    }
}

impl Clock for ManualClock {
    fn now(&self) -> DateTime<Utc> {
        let ms = self.next_ms.fetch_add(self.step_ms, Ordering::SeqCst);
        DateTime::from_timestamp_millis(ms).expect("manual clock out of range")
    }
}

/// Drops sub-millisecond precision.
pub fn truncate_millis(t: DateTime<Utc>) -> DateTime<Utc> {
    DateTime::from_timestamp_millis(t.timestamp_millis()).unwrap_or(t)
}

/// RFC 3339 with exactly three fractional digits and a `Z` suffix. Only the
/// canonical spelling is accepted on input.
pub mod rfc3339_millis {
    use chrono::{DateTime, SecondsFormat, Utc};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&t.to_rfc3339_opts(SecondsFormat::Millis, true))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let text = String::deserialize(d)?;
        let t = DateTime::parse_from_rfc3339(&text)
            .map(|t| t.with_timezone(&Utc))
            .map_err(serde::de::Error::custom)?;
        if t.to_rfc3339_opts(SecondsFormat::Millis, true) != text {
            return Err(serde::de::Error::custom(format!(
                "timestamp {text:?} is not canonical UTC RFC 3339 with milliseconds"
            )));
        }
        Ok(t)
    }
}
