//! Run configuration: flags, an optional `key = value` file, and the
//! `ROTOSPEC_PRECISION_BITS` environment variable.

use std::collections::BTreeMap;
use std::path::Path;

use rotospec::arith::{PrecisionPolicy, Rational, DEFAULT_PRECISION};
use rotospec::rotation::number::parse_rational;
use rotospec::spectrum::{BetaRule, CriterionConfig};
use rotospec::{Error, Result};

pub const PRECISION_ENV: &str = "ROTOSPEC_PRECISION_BITS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(Error::Parse(format!("unknown format {other:?}"))),
        }
    }
}

/// Values read from a config file. Every field is optional.
#[derive(Clone, Debug, Default)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

const KNOWN_KEYS: &[&str] = &[
    "precision_bits",
    "horizon",
    "alpha_grid",
    "beta",
    "format",
    "x",
    "lambda",
    "space",
];

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", i + 1)))?;
            let k = k.trim();
            if !KNOWN_KEYS.contains(&k) {
                return Err(Error::Parse(format!("config line {}: unknown key {k:?}", i + 1)));
            }
            values.insert(k.to_string(), v.trim().to_string());
        }
        Ok(FileConfig { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::Parse(format!("config key {key}: bad value {v:?}")))
            })
            .transpose()
    }
}

/// Settings shared by every command after merging flags over the file.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub precision_bits: u32,
    pub horizon: Option<u64>,
    pub alpha_grid: Option<Vec<Rational>>,
    pub beta: Option<Rational>,
    pub format: Format,
    pub timing: bool,
    pub file: FileConfig,
}

pub struct GlobalFlags<'a> {
    pub precision_bits: Option<u32>,
    pub horizon: Option<u64>,
    pub alpha_grid: Option<&'a str>,
    pub beta: Option<&'a str>,
    pub format: Option<Format>,
    pub timing: bool,
}

pub fn parse_grid(s: &str) -> Result<Vec<Rational>> {
    let v = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_rational)
        .collect::<Result<Vec<_>>>()?;
    if v.is_empty() {
        return Err(Error::Parse("empty alpha grid".into()));
    }
    Ok(v)
}

impl RunConfig {
    /// Flags beat the file, the file beats the environment.
    pub fn resolve(flags: GlobalFlags<'_>, file: FileConfig, env: Option<String>) -> Result<Self> {
        let env_bits = env
            .map(|v| {
                v.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("{PRECISION_ENV}: bad value {v:?}")))
            })
            .transpose()?;
        let precision_bits = flags
            .precision_bits
            .or(file.parsed("precision_bits")?)
            .or(env_bits)
            .unwrap_or(DEFAULT_PRECISION);
        if !(16..=1 << 20).contains(&precision_bits) {
            return Err(Error::Parse(format!(
                "precision_bits must lie in [16, 2^20], got {precision_bits}"
            )));
        }
        let alpha_grid = match flags.alpha_grid.or(file.get("alpha_grid")) {
            Some(s) => Some(parse_grid(s)?),
            None => None,
        };
        let beta = match flags.beta.or(file.get("beta")) {
            Some(s) => Some(parse_rational(s)?),
            None => None,
        };
        Ok(RunConfig {
            precision_bits,
            horizon: flags.horizon.or(file.parsed("horizon")?),
            alpha_grid,
            beta,
            format: flags.format.or(file.parsed("format")?).unwrap_or(Format::Json),
            timing: flags.timing,
            file,
        })
    }

    pub fn policy(&self) -> PrecisionPolicy {
        PrecisionPolicy::with_start(self.precision_bits)
    }

    pub fn criterion(&self) -> CriterionConfig {
        let mut cfg = CriterionConfig::default();
        if let Some(g) = &self.alpha_grid {
            cfg.alpha_grid = g.clone();
        }
        if let Some(b) = &self.beta {
            cfg.beta_rule = BetaRule::Fixed(b.clone());
        }
        if let Some(n) = self.horizon {
            cfg.horizon = n;
        }
        cfg
    }

    /// A descriptor from the flag, else from the file.
    pub fn descriptor(&self, flag: Option<&str>, key: &str) -> Result<String> {
        flag.or(self.file.get(key))
            .map(str::to_string)
            .ok_or_else(|| Error::Parse(format!("missing --{key}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(bits: Option<u32>) -> GlobalFlags<'static> {
        GlobalFlags {
            precision_bits: bits,
            horizon: None,
            alpha_grid: None,
            beta: None,
            format: None,
            timing: false,
        }
    }

    #[test]
    fn precedence() {
        let file = FileConfig::parse("precision_bits = 200\nformat = text # comment\n").unwrap();
        let r = RunConfig::resolve(flags(Some(300)), file.clone(), Some("400".into())).unwrap();
        assert_eq!(r.precision_bits, 300);
        let r = RunConfig::resolve(flags(None), file, Some("400".into())).unwrap();
        assert_eq!((r.precision_bits, r.format), (200, Format::Text));
        let r = RunConfig::resolve(flags(None), FileConfig::default(), Some("400".into())).unwrap();
        assert_eq!(r.precision_bits, 400);
        let r = RunConfig::resolve(flags(None), FileConfig::default(), None).unwrap();
        assert_eq!(r.precision_bits, DEFAULT_PRECISION);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(FileConfig::parse("colour = red").is_err());
        assert!(FileConfig::parse("no equals sign").is_err());
        assert!(RunConfig::resolve(flags(None), FileConfig::default(), Some("lots".into())).is_err());
    }
}
