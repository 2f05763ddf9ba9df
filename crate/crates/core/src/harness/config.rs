use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gallery::ChainDef;
use crate::model::Limits;
use crate::rational::{parse_rational, Rational};
use crate::sampler::{CertificateSource, Mode, SamplerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::Parse(format!("unknown format {other:?}"))),
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mixture" => Ok(Self::Mixture),
            "reject" => Ok(Self::Reject),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

impl FromStr for CertificateSource {
    type Err = Error;

    /// `brute`, `gap`, `ell1` or `user:T`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(Self::Brute),
            "gap" => Ok(Self::Gap),
            "ell1" => Ok(Self::Ell1),
            _ => match s.strip_prefix("user:") {
                Some(t) => t
                    .parse()
                    .map(Self::User)
                    .map_err(|e| Error::Parse(format!("bad user time {t:?}: {e}"))),
                None => Err(Error::Parse(format!("unknown certificate source {s:?}"))),
            },
        }
    }
}

/// Everything one harness run needs.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub chain: ChainDef,
    pub start: usize,
    pub mode: Mode,
    pub cert: CertificateSource,
    pub eps: Option<Rational>,
    pub n: u64,
    pub seed: u64,
    pub significance: f64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub limits: Limits,
}

impl ExperimentConfig {
    pub fn new(chain: ChainDef) -> Self {
        Self {
            chain,
            start: 0,
            mode: Mode::Mixture,
            cert: CertificateSource::Brute,
            eps: None,
            n: 100_000,
            seed: 0,
            significance: 1e-3,
            out: None,
            format: OutputFormat::Json,
            limits: Limits::from_env(),
        }
    }

    pub fn with_eps_text(mut self, text: &str) -> Result<Self> {
        self.eps = Some(parse_rational(text)?);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Parse("draw count must be at least 1".into()));
        }
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return Err(Error::Parse(format!("significance {} outside (0,1)", self.significance)));
        }
        Ok(())
    }

    pub fn sampler_config(&self) -> SamplerConfig {
        SamplerConfig {
            mode: self.mode,
            source: self.cert.clone(),
            eps: self.eps.clone(),
            limits: self.limits,
        }
    }
}
