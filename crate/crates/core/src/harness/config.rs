use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::fmt_g;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    Recoverability,
    Runtime,
}

impl FromStr for SweepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "recoverability" => Ok(SweepMode::Recoverability),
            "runtime" => Ok(SweepMode::Runtime),
            _ => param(format!("unknown mode {s:?} (expected recoverability or runtime)")),
        }
    }
}

impl fmt::Display for SweepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepMode::Recoverability => "recoverability",
            SweepMode::Runtime => "runtime",
        })
    }
}

/// How the seed-length multiplier `C` is chosen for a `theta_T` value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CRule {
    /// `3/(1 - 2 alpha) + delta/alpha`
    Theory,
    Fixed(f64),
}

impl FromStr for CRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "theory" {
            return Ok(CRule::Theory);
        }
        match s.strip_prefix("fixed:").map(str::parse::<f64>) {
            Some(Ok(c)) if c > 0.0 => Ok(CRule::Fixed(c)),
            _ => param(format!("unknown C rule {s:?} (expected theory or fixed:<C>)")),
        }
    }
}

impl fmt::Display for CRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CRule::Theory => f.write_str("theory"),
            CRule::Fixed(c) => write!(f, "fixed:{}", fmt_g(*c)),
        }
    }
}

/// Parameters of a recoverability or runtime sweep.
///
/// The config file is flat `key = value` text; `#` starts a comment and list
/// values are comma separated:
///
/// ```text
/// mode = recoverability
/// theta_T = 0.05, 0.10, 0.159
/// gamma = 0.5
/// k_min = 20
/// k_max = 36
/// k_step = 2
/// iterations = 30
/// seed = 42
/// ```
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub mode: SweepMode,
    pub theta_list: Vec<f64>,
    pub gamma_list: Vec<f64>,
    pub k_min: usize,
    pub k_max: usize,
    pub k_step: usize,
    pub iterations: usize,
    pub sigma: u8,
    pub master_seed: u64,
    pub c_rule: CRule,
    /// Added to `C * alpha` through `delta / alpha` in the theory rule.
    pub delta: f64,
    /// Added to the `m'` exponent `(2 C alpha + 1) / 2`.
    pub epsilon: f64,
    pub strict: bool,
    /// Extend before the first and after the last anchor. Defaults to off for
    /// recoverability and on for runtime sweeps.
    pub include_ends: bool,
    /// Rayon workers; 0 uses the default pool. Runtime sweeps always use one.
    pub workers: usize,
}

impl SweepConfig {
    pub fn recoverability() -> Self {
        SweepConfig {
            mode: SweepMode::Recoverability,
            theta_list: vec![0.05, 0.10, 0.159],
            gamma_list: vec![0.5],
            k_min: 20,
            k_max: 36,
            k_step: 2,
            iterations: 100,
            sigma: 4,
            master_seed: 0,
            c_rule: CRule::Theory,
            delta: 0.0,
            epsilon: 0.0,
            strict: false,
            include_ends: false,
            workers: 0,
        }
    }

    pub fn runtime() -> Self {
        SweepConfig {
            mode: SweepMode::Runtime,
            theta_list: vec![0.10],
            gamma_list: vec![0.5],
            k_min: 26,
            k_max: 44,
            k_step: 1,
            include_ends: true,
            ..Self::recoverability()
        }
    }

    pub fn k_values(&self) -> Vec<usize> {
        (self.k_min..=self.k_max).step_by(self.k_step.max(1)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta_list.is_empty() || self.gamma_list.is_empty() {
            return param("theta_T and gamma lists must be non-empty");
        }
        if self.k_min == 0 || self.k_min > self.k_max || self.k_step == 0 {
            return param(format!("bad k range {}..={} step {}", self.k_min, self.k_max, self.k_step));
        }
        if self.iterations == 0 {
            return param("iterations must be at least 1");
        }
        if self.sigma < 2 {
            return param("sigma must be at least 2");
        }
        for &t in &self.theta_list {
            if !(0.0..0.5).contains(&t) {
                return param(format!("theta_T = {t} out of range"));
            }
            if self.strict && t >= crate::seqgen::STRICT_THETA_LIMIT {
                return param(format!(
                    "strict mode requires theta_T below {}, got {t}",
                    crate::seqgen::STRICT_THETA_LIMIT
                ));
            }
        }
        for &g in &self.gamma_list {
            if !(g > 0.0 && g < 1.0) {
                return param(format!("gamma = {g} out of range"));
            }
        }
        Ok(())
    }

    /// Parses `key = value` text on top of the defaults for the mode given in
    /// the text (recoverability when absent).
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(Error::Parse {
                line: lineno + 1,
                msg: format!("expected key = value, got {line:?}"),
            })?;
            pairs.push((lineno + 1, key.trim().to_string(), value.trim().to_string()));
        }
        let mode = match pairs.iter().find(|p| p.1 == "mode") {
            Some(p) => p.2.parse()?,
            None => SweepMode::Recoverability,
        };
        let mut cfg = match mode {
            SweepMode::Recoverability => Self::recoverability(),
            SweepMode::Runtime => Self::runtime(),
        };
        for (line, key, value) in pairs {
            cfg.set(&key, &value).map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T>
        where
            T::Err: fmt::Display,
        {
            v.parse().map_err(|e| Error::Param(format!("{key}: {e}")))
        }
        fn list(key: &str, v: &str) -> Result<Vec<f64>> {
            v.split(',').map(|x| num(key, x.trim())).collect()
        }
        fn flag(key: &str, v: &str) -> Result<bool> {
            match v {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                _ => param(format!("{key}: expected true or false, got {v:?}")),
            }
        }
        match key {
            "mode" => self.mode = value.parse()?,
            "theta_T" | "theta_t" => self.theta_list = list(key, value)?,
            "gamma" => self.gamma_list = list(key, value)?,
            "k_min" => self.k_min = num(key, value)?,
            "k_max" => self.k_max = num(key, value)?,
            "k_step" => self.k_step = num(key, value)?,
            "iterations" => self.iterations = num(key, value)?,
            "sigma" => self.sigma = num(key, value)?,
            "seed" | "master_seed" => self.master_seed = num(key, value)?,
            "c_rule" => self.c_rule = value.parse()?,
            "delta" => self.delta = num(key, value)?,
            "epsilon" => self.epsilon = num(key, value)?,
            "strict" => self.strict = flag(key, value)?,
            "include_ends" => self.include_ends = flag(key, value)?,
            "workers" => self.workers = num(key, value)?,
            _ => return param(format!("unknown config key {key:?}")),
        }
        Ok(())
    }

    /// The config as `key = value` text that [`SweepConfig::parse`] reads back.
    pub fn to_text(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|&x| fmt_g(x)).collect::<Vec<_>>().join(", ");
        format!(
            "mode = {}\ntheta_T = {}\ngamma = {}\nk_min = {}\nk_max = {}\nk_step = {}\niterations = {}\n\
             sigma = {}\nseed = {}\nc_rule = {}\ndelta = {}\nepsilon = {}\nstrict = {}\n\
             include_ends = {}\nworkers = {}\n",
            self.mode,
            join(&self.theta_list),
            join(&self.gamma_list),
            self.k_min,
            self.k_max,
            self.k_step,
            self.iterations,
            self.sigma,
            self.master_seed,
            self.c_rule,
            fmt_g(self.delta),
            fmt_g(self.epsilon),
            self.strict,
            self.include_ends,
            self.workers
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_round_trip() {
        let cfg = SweepConfig::parse(
            "# desk sweep\nmode = recoverability\ntheta_T = 0.05, 0.1\ngamma=0.5\nk_min = 20\nk_max = 24\n\
             k_step = 2\niterations = 3\nseed = 9\n",
        )
        .unwrap();
        assert_eq!(cfg.theta_list, vec![0.05, 0.1]);
        assert_eq!(cfg.k_values(), vec![20, 22, 24]);
        assert_eq!(cfg.master_seed, 9);
        assert!(!cfg.include_ends);
        assert_eq!(SweepConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn runtime_defaults() {
        let cfg = SweepConfig::parse("mode = runtime\n").unwrap();
        assert!(cfg.include_ends);
        assert_eq!(cfg.theta_list, vec![0.10]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match SweepConfig::parse("gamma = 0.5\nbogus = 1\n") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(SweepConfig::parse("k_min = 30\nk_max = 20\n").is_err());
        assert!(SweepConfig::parse("strict = true\ntheta_T = 0.2\n").is_err());
        assert_eq!(
            SweepConfig::parse("c_rule = fixed:3.5\n").unwrap().c_rule,
            CRule::Fixed(3.5)
        );
    }
}
