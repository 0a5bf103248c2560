use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::decoder::DecodeMode;
use crate::error::{Error, Result};

/// Channel family for an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// q-PSK over AWGN; the grid is SNR per information symbol in dB.
    Psk,
    /// q-ary symmetric channel; the grid is the crossover probability.
    Qsc,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "psk" => Ok(Scheme::Psk),
            "qsc" => Ok(Scheme::Qsc),
            other => Err(Error::Config(format!("unknown scheme `{other}` (expected psk or qsc)"))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Psk => "psk",
            Scheme::Qsc => "qsc",
        })
    }
}

/// Which codeword each trial transmits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Policy {
    #[default]
    AllZero,
    RandomCodeword,
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all-zero" | "zero" => Ok(Policy::AllZero),
            "random-codeword" | "random" => Ok(Policy::RandomCodeword),
            other => Err(Error::Config(format!("unknown policy `{other}`"))),
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::AllZero => "all-zero",
            Policy::RandomCodeword => "random-codeword",
        })
    }
}

/// Where the code comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeSource {
    /// The shipped ternary Golay matrix.
    Golay,
    File(PathBuf),
}

impl CodeSource {
    pub fn load(&self) -> Result<crate::code::Code> {
        match self {
            CodeSource::Golay => Ok(crate::code::Code::ternary_golay()),
            CodeSource::File(p) => crate::code::Code::load(p),
        }
    }
}

impl fmt::Display for CodeSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeSource::Golay => f.write_str("golay"),
            CodeSource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

/// Monte Carlo experiment settings.
///
/// The text form is one `key = value` per line with `#` comments. Keys:
/// `code`, `scheme`, `snr` (PSK grid in dB), `eps` (QSC grid), `trials`,
/// `seed`, `mode`, `policy`, `workers`, `output`. Grids are comma-separated
/// values or `start:stop:step`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub code: CodeSource,
    pub scheme: Scheme,
    pub snr_db: Vec<f64>,
    pub eps: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub mode: DecodeMode,
    pub policy: Policy,
    /// Zero means the rayon default.
    pub workers: usize,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            code: CodeSource::Golay,
            scheme: Scheme::Psk,
            snr_db: Vec::new(),
            eps: Vec::new(),
            trials: 1000,
            seed: 1,
            mode: DecodeMode::Float,
            policy: Policy::AllZero,
            workers: 0,
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let cfg = Self::read(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Like [`ExperimentConfig::load`] but without validation, so that
    /// overrides can still fill in missing keys.
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse_partial(&text)?;
        // Relative code paths resolve against the config file.
        if let (CodeSource::File(p), Some(dir)) = (&cfg.code, path.parent()) {
            if p.is_relative() {
                cfg.code = CodeSource::File(dir.join(p));
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg = Self::parse_partial(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse_partial(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(k + 1, format!("expected `key = value`, got `{line}`")))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::parse(k + 1, e.to_string()))?;
        }
        Ok(cfg)
    }

    /// Sets one field from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let int = |v: &str| {
            v.parse::<u64>()
                .map_err(|_| Error::Config(format!("`{key}` expects a nonnegative integer, got `{v}`")))
        };
        match key {
            "code" => {
                self.code = if value == "golay" {
                    CodeSource::Golay
                } else {
                    CodeSource::File(PathBuf::from(value))
                }
            }
            "scheme" => self.scheme = value.parse()?,
            "snr" => self.snr_db = parse_grid(value)?,
            "eps" => self.eps = parse_grid(value)?,
            "trials" => self.trials = int(value)?,
            "seed" => self.seed = int(value)?,
            "mode" => self.mode = value.parse()?,
            "policy" => self.policy = value.parse()?,
            "workers" => self.workers = int(value)? as usize,
            "output" => self.output = Some(PathBuf::from(value)),
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.grid().is_empty() {
            let key = match self.scheme {
                Scheme::Psk => "snr",
                Scheme::Qsc => "eps",
            };
            return Err(Error::Config(format!("`{key}` grid is empty")));
        }
        Ok(())
    }

    /// The grid for the configured scheme.
    pub fn grid(&self) -> &[f64] {
        match self.scheme {
            Scheme::Psk => &self.snr_db,
            Scheme::Qsc => &self.eps,
        }
    }
}

/// `a,b,c` or `start:stop:step`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::Config(format!("bad number `{}` in grid", s.trim())))
    };
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if step <= 0.0 || stop < start {
            return Err(Error::Config(format!("bad range `{text}`")));
        }
        return Ok(crate::analysis::snr_grid(start, stop, step));
    }
    text.split(',').filter(|s| !s.trim().is_empty()).map(num).collect()
}
