use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Share of the population sent through the improving heuristic each
/// generation, kept as an exact ratio so `floor(size * num / den)` is exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeuristicFraction {
    num: u32,
    den: u32,
}

impl HeuristicFraction {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if den == 0 || num > den {
            return Err(Error::InvalidParameter(format!("heuristic fraction {num}/{den} not in [0, 1]")));
        }
        Ok(HeuristicFraction { num, den })
    }

    pub fn of(&self, size: usize) -> usize {
        size * self.num as usize / self.den as usize
    }
}

impl Default for HeuristicFraction {
    fn default() -> Self {
        HeuristicFraction { num: 1, den: 3 }
    }
}

impl fmt::Display for HeuristicFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for HeuristicFraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("heuristic fraction must look like 1/3, got {s:?}"));
        let (num, den) = s.trim().split_once('/').ok_or_else(bad)?;
        HeuristicFraction::new(num.trim().parse().map_err(|_| bad())?, den.trim().parse().map_err(|_| bad())?)
    }
}

impl Serialize for HeuristicFraction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for HeuristicFraction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GAParams {
    pub pop_size: usize,
    /// Mating (crossover) probability.
    pub p_c: f64,
    /// Mutation probability per chromosome.
    pub p_m: f64,
    /// Probability of roulette-wheel selection; elitist otherwise.
    pub p_s: f64,
    pub heuristic_iters: usize,
    pub heuristic_fraction: HeuristicFraction,
    pub init_oversample: usize,
    pub max_generations: u64,
    /// Offspring (and improved chromosomes) already present in the
    /// population are discarded instead of appended.
    #[serde(default = "yes")]
    pub distinct_offspring: bool,
}

fn yes() -> bool {
    true
}

impl Default for GAParams {
    fn default() -> Self {
        GAParams {
            pop_size: 100,
            p_c: 0.8,
            p_m: 0.05,
            p_s: 0.3,
            heuristic_iters: 300,
            heuristic_fraction: HeuristicFraction::default(),
            init_oversample: 10,
            max_generations: 50_000,
            distinct_offspring: true,
        }
    }
}

impl GAParams {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p_c", self.p_c), ("p_m", self.p_m), ("p_s", self.p_s)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("{name} = {p} is not a probability")));
            }
        }
        if self.pop_size < 2 {
            return Err(Error::InvalidParameter("pop_size must be at least 2".into()));
        }
        if self.init_oversample < 1 {
            return Err(Error::InvalidParameter("init_oversample must be at least 1".into()));
        }
        Ok(())
    }

    /// Sets one field from its config-file spelling.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value.trim().parse().map_err(|_| Error::Parse(format!("{key}: cannot parse {value:?}")))
        }
        match key {
            "pop_size" => self.pop_size = num(key, value)?,
            "p_c" => self.p_c = num(key, value)?,
            "p_m" => self.p_m = num(key, value)?,
            "p_s" => self.p_s = num(key, value)?,
            "heuristic_iters" => self.heuristic_iters = num(key, value)?,
            "heuristic_fraction" => self.heuristic_fraction = value.parse()?,
            "init_oversample" => self.init_oversample = num(key, value)?,
            "max_generations" => self.max_generations = num(key, value)?,
            "distinct_offspring" => self.distinct_offspring = num(key, value)?,
            _ => return Err(Error::Parse(format!("unknown [ga] key {key:?}"))),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_is_exact() {
        let third = HeuristicFraction::default();
        assert_eq!(third.of(300), 100);
        assert_eq!(third.of(302), 100);
        assert_eq!("2/5".parse::<HeuristicFraction>().unwrap().of(10), 4);
        assert!("3/2".parse::<HeuristicFraction>().is_err());
        assert!("1/0".parse::<HeuristicFraction>().is_err());
        assert!("0.3".parse::<HeuristicFraction>().is_err());
    }

    #[test]
    fn defaults_validate() {
        GAParams::default().validate().unwrap();
        assert!(GAParams { p_m: 1.5, ..GAParams::default() }.validate().is_err());
        assert!(GAParams { pop_size: 1, ..GAParams::default() }.validate().is_err());
        assert!(GAParams { init_oversample: 0, ..GAParams::default() }.validate().is_err());
    }

    #[test]
    fn set_from_config_keys() {
        let mut p = GAParams::default();
        p.set("pop_size", "40").unwrap();
        p.set("p_s", " 0.25").unwrap();
        p.set("heuristic_fraction", "1/2").unwrap();
        assert_eq!(p.pop_size, 40);
        assert_eq!(p.p_s, 0.25);
        assert_eq!(p.heuristic_fraction.of(10), 5);
        assert!(p.set("p_x", "1").is_err());
        assert!(p.set("p_c", "lots").is_err());
    }

    #[test]
    fn json_shape() {
        let text = serde_json::to_string(&GAParams::default()).unwrap();
        assert!(text.contains("\"heuristic_fraction\":\"1/3\""));
        let back: GAParams = serde_json::from_str(&text).unwrap();
        assert_eq!(back, GAParams::default());
    }
}
