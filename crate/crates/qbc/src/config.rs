//! Flat key-value experiment configuration.
//!
//! Files are TOML restricted to top-level scalars and arrays of scalars.
//! Command-line flags override file values. The canonical form is the
//! key-sorted JSON object of every setting that affects results; its SHA-256
//! is the config hash stamped on every output.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use qbc_core::codes::{self, Bit, BitString, BuiltinCode, LinearCode};
use qbc_core::protocol::ProtocolParams;
use qbc_core::seeding::trial_rng;
use qbc_core::strategies::ResendStrategy;
use rand::Rng;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Every key the commands understand.
pub const KNOWN_KEYS: &[&str] = &[
    "alice",
    "allow_symmetric",
    "bit",
    "bob",
    "code",
    "code_file",
    "codes",
    "codewords_out",
    "convention",
    "cycles",
    "cycles_grid",
    "defense",
    "epsilon",
    "f",
    "f_grid",
    "format",
    "legitimate_only",
    "m",
    "modes",
    "out",
    "phase_defense",
    "r",
    "R",
    "R_grid",
    "s_over_n",
    "search_ancilla",
    "search_trials",
    "seed",
    "strategy",
    "table",
    "theta_points",
    "tol_determinism",
    "tol_fbs",
    "tol_invariance",
    "tol_orthogonality",
    "tol_phase",
    "tol_sigma",
    "trials",
    "unitaries",
];

/// Keys that only choose where and how results are written.
const PRESENTATION_KEYS: &[&str] = &["format", "out"];

/// Stream index used to draw a default `r`, apart from every trial stream.
const MASK_STREAM: u64 = u64::MAX;

#[derive(Clone, Debug, Default)]
pub struct Config {
    values: BTreeMap<String, Value>,
    base_dir: PathBuf,
}

fn bad(key: &str, what: &str) -> CliError {
    CliError::Config(format!("key `{key}`: {what}"))
}

impl Config {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base_dir: PathBuf) -> CliResult<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?;
        let mut values = BTreeMap::new();
        for (key, value) in table {
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!("unknown key `{key}`")));
            }
            let flat = match &value {
                toml::Value::Table(_) | toml::Value::Datetime(_) => false,
                toml::Value::Array(items) => items
                    .iter()
                    .all(|v| !matches!(v, toml::Value::Table(_) | toml::Value::Array(_) | toml::Value::Datetime(_))),
                _ => true,
            };
            if !flat {
                return Err(bad(&key, "only scalars and flat arrays are allowed"));
            }
            let json = serde_json::to_value(&value).map_err(|e| bad(&key, &e.to_string()))?;
            values.insert(key, json);
        }
        Ok(Self { values, base_dir })
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.values.insert(key.to_string(), value);
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    /// Settings that affect results, as a key-sorted JSON object.
    pub fn canonical(&self) -> Value {
        Value::Object(
            self.values
                .iter()
                .filter(|(k, _)| !PRESENTATION_KEYS.contains(&k.as_str()))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        )
    }

    pub fn canonical_json(&self) -> String {
        self.canonical().to_string()
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }

    pub fn resolve_path(&self, p: &str) -> PathBuf {
        let path = Path::new(p);
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn f64_opt(&self, key: &str) -> CliResult<Option<f64>> {
        self.values
            .get(key)
            .map(|v| v.as_f64().ok_or_else(|| bad(key, "expected a number")))
            .transpose()
    }

    pub fn f64_or(&self, key: &str, default: f64) -> CliResult<f64> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    pub fn u64_or(&self, key: &str, default: u64) -> CliResult<u64> {
        self.values
            .get(key)
            .map(|v| v.as_u64().ok_or_else(|| bad(key, "expected a non-negative integer")))
            .transpose()
            .map(|v| v.unwrap_or(default))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> CliResult<usize> {
        Ok(self.u64_or(key, default as u64)? as usize)
    }

    pub fn bool_or(&self, key: &str, default: bool) -> CliResult<bool> {
        self.values
            .get(key)
            .map(|v| v.as_bool().ok_or_else(|| bad(key, "expected true or false")))
            .transpose()
            .map(|v| v.unwrap_or(default))
    }

    pub fn str_opt(&self, key: &str) -> CliResult<Option<&str>> {
        self.values
            .get(key)
            .map(|v| v.as_str().ok_or_else(|| bad(key, "expected a string")))
            .transpose()
    }

    fn list(&self, key: &str) -> CliResult<Option<&Vec<Value>>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(Value::Array(items)) => {
                if items.is_empty() {
                    return Err(bad(key, "grid is empty"));
                }
                Ok(Some(items))
            }
            Some(_) => Err(bad(key, "expected an array")),
        }
    }

    pub fn f64_list_or(&self, key: &str, default: Vec<f64>) -> CliResult<Vec<f64>> {
        match self.list(key)? {
            None => Ok(default),
            Some(items) => items
                .iter()
                .map(|v| v.as_f64().ok_or_else(|| bad(key, "expected numbers")))
                .collect(),
        }
    }

    pub fn usize_list_or(&self, key: &str, default: Vec<usize>) -> CliResult<Vec<usize>> {
        match self.list(key)? {
            None => Ok(default),
            Some(items) => items
                .iter()
                .map(|v| v.as_u64().map(|x| x as usize).ok_or_else(|| bad(key, "expected integers")))
                .collect(),
        }
    }

    pub fn str_list_or(&self, key: &str, default: Vec<String>) -> CliResult<Vec<String>> {
        match self.list(key)? {
            None => Ok(default),
            Some(items) => items
                .iter()
                .map(|v| v.as_str().map(str::to_string).ok_or_else(|| bad(key, "expected strings")))
                .collect(),
        }
    }

    pub fn seed(&self) -> CliResult<u64> {
        self.u64_or("seed", 0)
    }

    pub fn trials(&self, default: u64) -> CliResult<u64> {
        let t = self.u64_or("trials", default)?;
        if t == 0 {
            return Err(bad("trials", "must be positive"));
        }
        Ok(t)
    }

    /// The code named by `code` or read from `code_file`.
    pub fn code(&self, default: BuiltinCode) -> CliResult<NamedCode> {
        match (self.str_opt("code")?, self.str_opt("code_file")?) {
            (Some(_), Some(_)) => Err(CliError::Config("set only one of `code` and `code_file`".into())),
            (Some(name), None) => NamedCode::builtin(name),
            (None, Some(file)) => NamedCode::from_file(&self.resolve_path(file)),
            (None, None) => Ok(NamedCode::from(default)),
        }
    }

    /// `r` from the config, or a seeded draw of a nonzero mask that splits
    /// the code into two nonempty classes.
    pub fn mask(&self, code: &LinearCode) -> CliResult<BitString> {
        if let Some(text) = self.str_opt("r")? {
            let r: BitString = text.parse().map_err(|e: qbc_core::Error| bad("r", &e.to_string()))?;
            if r.len() != code.n() {
                return Err(bad("r", &format!("length {} does not match n = {}", r.len(), code.n())));
            }
            if r.is_zero() {
                return Err(CliError::Config(qbc_core::Error::ZeroMask.to_string()));
            }
            return Ok(r);
        }
        let mut rng = trial_rng(self.seed()?, MASK_STREAM);
        let n = code.n();
        let top = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        for _ in 0..10_000 {
            let word = rng.random_range(1..=top);
            let r = BitString::from_word(n, word)?;
            let split = codes::coset_split(code, &r)?;
            if !split.class(Bit::Zero).is_empty() && !split.class(Bit::One).is_empty() {
                return Ok(r);
            }
        }
        Err(CliError::Config("no mask splits this code; set `r` explicitly".into()))
    }

    pub fn strategy(&self) -> CliResult<ResendStrategy> {
        let label = self.str_opt("strategy")?.unwrap_or("blind_guess_on_time");
        ResendStrategy::from_label(label).map_err(|e| bad("strategy", &e.to_string()))
    }

    /// Protocol parameters for `code`, reflectivity `r_value` and intercept
    /// probability `f`.
    pub fn params(&self, code: &LinearCode, r_value: f64, f: f64) -> CliResult<ProtocolParams> {
        let mask = self.mask(code)?;
        let eps = self.f64_opt("epsilon")?;
        let seed = self.seed()?;
        let params = if self.bool_or("allow_symmetric", false)? {
            ProtocolParams::symmetric_allowed(code.clone(), mask, r_value, f, eps, seed)?
        } else {
            ProtocolParams::new(code.clone(), mask, r_value, f, eps, seed)?
        };
        Ok(params
            .with_strategy(self.strategy()?)
            .with_phase_defense(self.bool_or("phase_defense", false)?))
    }
}

/// A code with the label used in outputs.
#[derive(Clone, Debug)]
pub struct NamedCode {
    pub name: String,
    pub code: LinearCode,
}

impl From<BuiltinCode> for NamedCode {
    fn from(b: BuiltinCode) -> Self {
        Self {
            name: b.name().to_string(),
            code: b.code(),
        }
    }
}

impl NamedCode {
    pub fn builtin(name: &str) -> CliResult<Self> {
        BuiltinCode::from_name(name)
            .map(Self::from)
            .map_err(|e| bad("code", &e.to_string()))
    }

    /// Generator matrix file: one row per line of '0'/'1' characters. Blank
    /// lines are ignored.
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let rows: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        let code = LinearCode::from_text_rows(&rows)?;
        Ok(Self {
            name: path.display().to_string(),
            code,
        })
    }
}
