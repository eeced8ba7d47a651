use std::path::Path;
use std::str::FromStr;
use std::time::Duration;

use ini::Ini;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::instance::DensityRange;
use crate::ga::GAParams;
use crate::lattice::ReductionParams;
use crate::pga::AttackConfig;
use crate::{Error, Result};

/// One named parameter varied over a list of values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub field: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub key_lengths: Vec<usize>,
    pub block_counts: Vec<usize>,
    pub trials_per_cell: usize,
    /// GA fields varied over their cartesian product; empty means defaults.
    pub parameter_grid: Vec<GridAxis>,
    /// Per-attack limit; overrides the attack's own wall-clock budget.
    #[serde(with = "crate::pga::secs")]
    pub time_limit: Duration,
    pub master_seed: u64,
    pub attack: AttackConfig,
    pub density_buckets: Vec<DensityRange>,
    /// Size of the comparison suite; defaults to one round of trials per
    /// (key length, density bucket) cell.
    pub instances: Option<usize>,
    pub lll: ReductionParams,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            key_lengths: vec![16, 24, 32],
            block_counts: vec![1],
            trials_per_cell: 20,
            parameter_grid: Vec::new(),
            time_limit: Duration::from_secs(1800),
            master_seed: 0,
            attack: AttackConfig::default(),
            density_buckets: DensityRange::buckets(),
            instances: None,
            lll: ReductionParams::default(),
        }
    }
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::Parse(format!("{key}: cannot parse {s:?}"))))
        .collect()
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Parse(format!("{key}: cannot parse {value:?}")))
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        self.attack.validate()?;
        if self.trials_per_cell == 0 {
            return Err(Error::InvalidParameter("trials_per_cell must be at least 1".into()));
        }
        if self.key_lengths.is_empty() || self.key_lengths.iter().any(|&n| n == 0 || n % 8 != 0) {
            return Err(Error::InvalidParameter("key lengths must be positive multiples of 8".into()));
        }
        if self.block_counts.is_empty() || self.block_counts.contains(&0) {
            return Err(Error::InvalidParameter("block counts must be positive".into()));
        }
        if self.density_buckets.is_empty() {
            return Err(Error::InvalidParameter("at least one density bucket is needed".into()));
        }
        if self.time_limit.is_zero() {
            return Err(Error::InvalidParameter("time_limit must be positive".into()));
        }
        for (_, params) in self.settings()? {
            params.validate()?;
        }
        Ok(())
    }

    /// The attack configuration actually run.
    pub fn attack_config(&self, ga: GAParams) -> AttackConfig {
        AttackConfig { ga, wall_clock_budget: self.time_limit, ..self.attack.clone() }
    }

    /// Every point of the parameter grid with its label.
    pub fn settings(&self) -> Result<Vec<(String, GAParams)>> {
        let mut points = vec![(Vec::<String>::new(), self.attack.ga.clone())];
        for axis in &self.parameter_grid {
            let mut next = Vec::new();
            for (labels, params) in &points {
                for value in &axis.values {
                    let mut p = params.clone();
                    p.set(&axis.field, value)?;
                    let mut l = labels.clone();
                    l.push(format!("{}={}", axis.field, value.trim()));
                    next.push((l, p));
                }
            }
            points = next;
        }
        Ok(points
            .into_iter()
            .map(|(l, p)| (if l.is_empty() { "default".to_string() } else { l.join(";") }, p))
            .collect())
    }

    /// Sets one `[bench]` key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if let Some(field) = key.strip_prefix("grid.") {
            let values: Vec<String> = list(key, value)?;
            GAParams::default().set(field, values.first().map_or("", String::as_str))?;
            self.parameter_grid.retain(|a| a.field != field);
            self.parameter_grid.push(GridAxis { field: field.to_string(), values });
            return Ok(());
        }
        match key {
            "key_lengths" | "n" => self.key_lengths = list(key, value)?,
            "block_counts" | "blocks" => self.block_counts = list(key, value)?,
            "trials" | "trials_per_cell" => self.trials_per_cell = num(key, value)?,
            "time_limit" => {
                let s: f64 = num(key, value)?;
                self.time_limit = Duration::try_from_secs_f64(s)
                    .map_err(|_| Error::Parse(format!("{key}: {value:?} is not a duration in seconds")))?;
            }
            "seed" | "master_seed" => self.master_seed = num(key, value)?,
            "densities" | "density_buckets" => self.density_buckets = list(key, value)?,
            "instances" => self.instances = Some(num(key, value)?),
            "lovasz_delta" => self.lll = ReductionParams::new(num::<BigRational>(key, value)?)?,
            _ => return Err(Error::Parse(format!("unknown [bench] key {key:?}"))),
        }
        Ok(())
    }

    /// Applies a config file with `[ga]`, `[attack]` and `[bench]` sections
    /// of `key = value` lines.
    pub fn apply_config(&mut self, text: &str) -> Result<()> {
        let ini = Ini::load_from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
        for (section, props) in ini.iter() {
            for (key, value) in props.iter() {
                match section {
                    Some("ga") => self.attack.ga.set(key, value)?,
                    Some("attack") => self.attack.set(key, value)?,
                    Some("bench") => self.set(key, value)?,
                    Some(other) => return Err(Error::Parse(format!("config: unknown section [{other}]"))),
                    None => return Err(Error::Parse(format!("config: {key:?} is outside any section"))),
                }
            }
        }
        Ok(())
    }

    pub fn load_config(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_config(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        ExperimentSpec::default().validate().unwrap();
        assert!(ExperimentSpec { key_lengths: vec![12], ..Default::default() }.validate().is_err());
        assert!(ExperimentSpec { trials_per_cell: 0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn config_sections() {
        let mut spec = ExperimentSpec::default();
        spec.apply_config(
            "[ga]\npop_size = 40\np_m = 0.1\n\n[attack]\nmigration_period = 3\n\n[bench]\nn = 24, 32\nblocks = 1,2\n\
             trials = 5\nseed = 7\ndensities = 0.6-0.7, 0.9-1.0\ninstances = 40\nlovasz_delta = 99/100\n\
             grid.p_s = 0.1, 0.3\n",
        )
        .unwrap();
        assert_eq!(spec.attack.ga.pop_size, 40);
        assert_eq!(spec.attack.ga.p_m, 0.1);
        assert_eq!(spec.attack.migration_period, 3);
        assert_eq!(spec.key_lengths, vec![24, 32]);
        assert_eq!(spec.block_counts, vec![1, 2]);
        assert_eq!((spec.trials_per_cell, spec.master_seed, spec.instances), (5, 7, Some(40)));
        assert_eq!(spec.density_buckets.len(), 2);
        assert_eq!(spec.lll, ReductionParams::strong());
        let settings = spec.settings().unwrap();
        assert_eq!(settings.iter().map(|s| s.0.as_str()).collect::<Vec<_>>(), ["p_s=0.1", "p_s=0.3"]);
        assert_eq!(settings[0].1.pop_size, 40);
        spec.validate().unwrap();
    }

    #[test]
    fn config_errors() {
        let mut spec = ExperimentSpec::default();
        assert!(spec.apply_config("pop_size = 3\n").is_err());
        assert!(spec.apply_config("[nope]\na = 1\n").is_err());
        assert!(spec.apply_config("[ga]\nnope = 1\n").is_err());
        assert!(spec.apply_config("[bench]\ngrid.nope = 1\n").is_err());
        assert!(spec.apply_config("[bench]\nlovasz_delta = 1/5\n").is_err());
    }

    #[test]
    fn grid_is_a_cartesian_product() {
        let mut spec = ExperimentSpec::default();
        spec.set("grid.pop_size", "20,40").unwrap();
        spec.set("grid.p_m", "0.05,0.1,0.2").unwrap();
        let settings = spec.settings().unwrap();
        assert_eq!(settings.len(), 6);
        assert_eq!(settings[5].0, "pop_size=40;p_m=0.2");
        assert_eq!((settings[5].1.pop_size, settings[5].1.p_m), (40, 0.2));
    }
}
