use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::ga::GAParams;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackConfig {
    pub ga: GAParams,
    pub migration_enabled: bool,
    /// Generations between migration checkpoints.
    pub migration_period: u64,
    #[serde(with = "secs")]
    pub wall_clock_budget: Duration,
    /// Per-block generation cap; the effective cap is the smaller of this and
    /// `ga.max_generations`.
    pub generation_budget: u64,
    /// Bound of each block's migrant queue; the oldest message is dropped on
    /// overflow.
    pub inbox_capacity: usize,
    /// Run all blocks on the calling thread in lockstep.
    pub sequential: bool,
}

impl Default for AttackConfig {
    fn default() -> Self {
        AttackConfig {
            ga: GAParams::default(),
            migration_enabled: true,
            migration_period: 5,
            wall_clock_budget: Duration::from_secs(300),
            generation_budget: 50_000,
            inbox_capacity: 64,
            sequential: false,
        }
    }
}

impl AttackConfig {
    pub fn validate(&self) -> Result<()> {
        self.ga.validate()?;
        if self.migration_period == 0 {
            return Err(Error::InvalidParameter("migration_period must be at least 1".into()));
        }
        if self.generation_budget == 0 || self.wall_clock_budget.is_zero() {
            return Err(Error::InvalidParameter("budgets must be positive".into()));
        }
        if self.inbox_capacity == 0 {
            return Err(Error::InvalidParameter("inbox_capacity must be at least 1".into()));
        }
        Ok(())
    }

    pub fn max_generations(&self) -> u64 {
        self.generation_budget.min(self.ga.max_generations)
    }

    /// Sets one `[attack]` key from its config-file spelling.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value.trim().parse().map_err(|_| Error::Parse(format!("{key}: cannot parse {value:?}")))
        }
        match key {
            "migration" | "migration_enabled" => self.migration_enabled = num(key, value)?,
            "migration_period" => self.migration_period = num(key, value)?,
            "time_limit" | "wall_clock_budget" => {
                let s: f64 = num(key, value)?;
                self.wall_clock_budget = Duration::try_from_secs_f64(s)
                    .map_err(|_| Error::Parse(format!("{key}: {value:?} is not a duration in seconds")))?;
            }
            "generations" | "generation_budget" => self.generation_budget = num(key, value)?,
            "inbox_capacity" => self.inbox_capacity = num(key, value)?,
            "sequential" => self.sequential = num(key, value)?,
            _ => return Err(Error::Parse(format!("unknown [attack] key {key:?}"))),
        }
        Ok(())
    }
}

/// Durations as fractional seconds.
pub(crate) mod secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Duration::try_from_secs_f64(f64::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cfg = AttackConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.migration_period, 5);
        assert_eq!(cfg.wall_clock_budget, Duration::from_secs(300));
        assert_eq!(cfg.max_generations(), 50_000);
    }

    #[test]
    fn rejects_zero_period_and_budgets() {
        assert!(AttackConfig { migration_period: 0, ..Default::default() }.validate().is_err());
        assert!(AttackConfig { generation_budget: 0, ..Default::default() }.validate().is_err());
        assert!(AttackConfig { wall_clock_budget: Duration::ZERO, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn keys_and_json() {
        let mut cfg = AttackConfig::default();
        cfg.set("time_limit", "1.5").unwrap();
        cfg.set("migration", "false").unwrap();
        cfg.set("generations", "200").unwrap();
        assert_eq!(cfg.wall_clock_budget, Duration::from_millis(1500));
        assert!(!cfg.migration_enabled);
        assert_eq!(cfg.max_generations(), 200);
        assert!(cfg.set("time_limit", "-1").is_err());
        assert!(cfg.set("bogus", "1").is_err());

        let text = serde_json::to_string(&cfg).unwrap();
        assert!(text.contains("\"wall_clock_budget\":1.5"));
        assert_eq!(serde_json::from_str::<AttackConfig>(&text).unwrap(), cfg);
    }
}
