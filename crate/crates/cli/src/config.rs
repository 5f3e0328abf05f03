//! Run configuration: defaults, then a `key=value` file, then `PSUM_*`
//! environment variables, then command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

pub const ENV_PREFIX: &str = "PSUM_";

/// Keys accepted in a config file or as `PSUM_<KEY>` variables.
pub const KEYS: [&str; 9] = [
    "seed",
    "format",
    "workers",
    "timing",
    "baseline",
    "expsum_eps",
    "dio_eps",
    "term_budget",
    "sieve_limit",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(format!("format must be csv or json, got `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub format: Format,
    /// 0 lets rayon pick.
    pub workers: usize,
    pub timing: bool,
    pub baseline: PathBuf,
    pub expsum_eps: f64,
    pub dio_eps: f64,
    /// Largest number of terms a single exponential sum may visit.
    pub term_budget: u64,
    /// Largest x or limit accepted by the sieve-backed commands.
    pub sieve_limit: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 20_240_601,
            format: Format::Csv,
            workers: 0,
            timing: false,
            baseline: PathBuf::from("psum_baseline.json"),
            expsum_eps: psum_core::expsum::DEFAULT_EPSILON,
            dio_eps: psum_core::dio::DEFAULT_DIO_EPSILON,
            term_budget: psum_core::expsum::TERM_BUDGET,
            sieve_limit: psum_core::floor::BLOCKED_BUDGET,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .trim()
        .parse()
        .map_err(|_| format!("bad value `{value}` for `{key}`"))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "seed" => self.seed = parse(key, value)?,
            "format" => self.format = value.trim().parse()?,
            "workers" => self.workers = parse(key, value)?,
            "timing" => self.timing = parse(key, value)?,
            "baseline" => self.baseline = PathBuf::from(value.trim()),
            "expsum_eps" => self.expsum_eps = parse(key, value)?,
            "dio_eps" => self.dio_eps = parse(key, value)?,
            "term_budget" => self.term_budget = parse(key, value)?,
            "sieve_limit" => self.sieve_limit = parse(key, value)?,
            _ => return Err(format!("unknown config key `{key}`")),
        }
        Ok(())
    }

    /// Lines are `key = value`; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), String> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("{origin}:{}: expected key=value", i + 1))?;
            self.set(k.trim(), v).map_err(|e| format!("{origin}:{}: {e}", i + 1))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        self.apply_text(&text, &path.display().to_string())
    }

    pub fn apply_env<I>(&mut self, vars: I) -> Result<(), String>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        for (name, value) in vars {
            if let Some(key) = name.strip_prefix(ENV_PREFIX) {
                let key = key.to_ascii_lowercase();
                if KEYS.contains(&key.as_str()) {
                    self.set(&key, &value).map_err(|e| format!("{name}: {e}"))?;
                }
            }
        }
        Ok(())
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail
    pub fn validate(&self) -> Result<(), String> {
        if self.term_budget == 0 || self.sieve_limit == 0 {
            return Err("budgets must be positive".into());
        }
        if !(self.expsum_eps > 0.0) || !(self.dio_eps >= 0.0) {
            return Err("expsum_eps must be positive and dio_eps nonnegative".into());
        }
        Ok(())
    }

    /// Canonical `key=value` lines of every setting that can change results.
    pub fn canonical(&self) -> BTreeMap<&'static str, String> {
        BTreeMap::from([
            ("seed", self.seed.to_string()),
            ("expsum_eps", self.expsum_eps.to_string()),
            ("dio_eps", self.dio_eps.to_string()),
            ("term_budget", self.term_budget.to_string()),
            ("sieve_limit", self.sieve_limit.to_string()),
        ])
    }

    /// SHA-256 over the canonical settings and the invocation, hex encoded.
    pub fn hash(&self, invocation: &str) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.canonical() {
            h.update(format!("{k}={v}\n"));
        }
        h.update(invocation);
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}
