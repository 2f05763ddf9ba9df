use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use perfect_sampler::gallery::ChainDef;
use perfect_sampler::harness::{self, ExperimentConfig, OutputFormat};
use perfect_sampler::{CertificateSource, Error, Limits, Mode, Result};

#[derive(Parser)]
#[command(version, about = "Exact perfect sampling from finite Markov chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw samples and print JSON lines (or CSV).
    Sample(Common),
    /// Check the exact identities and run a goodness-of-fit test.
    Verify(Common),
    /// Exact distance trajectory and certificates.
    Mixing {
        #[command(flatten)]
        common: Common,
        /// Time indices for the trajectory, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,4,8")]
        times: Vec<u64>,
        /// Complete-graph sizes for the τ_U(1/n)/τ(1/4) table.
        #[arg(long, value_delimiter = ',')]
        ratio_study: Vec<usize>,
    },
    /// Steps, bits and oracle-rate statistics.
    Bench(Common),
}

#[derive(Args)]
struct Common {
    /// Chain-definition JSON: a file path or an inline document.
    #[arg(long)]
    chain: String,
    #[arg(long, default_value = "mixture")]
    mode: String,
    /// brute | gap | ell1 | user:T
    #[arg(long, default_value = "brute")]
    cert: String,
    /// Target accuracy as num/den; defaults to 1/|Ω|^4.
    #[arg(long)]
    eps: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    start: usize,
    #[arg(long, default_value_t = 1e-3)]
    significance: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: String,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::new(ChainDef::load(&self.chain)?);
        cfg.mode = self.mode.parse::<Mode>()?;
        cfg.cert = self.cert.parse::<CertificateSource>()?;
        if let Some(e) = &self.eps {
            cfg = cfg.with_eps_text(e)?;
        }
        cfg.n = self.n;
        cfg.seed = self.seed;
        cfg.start = self.start;
        cfg.significance = self.significance;
        cfg.out = self.out.clone();
        cfg.format = self.format.parse::<OutputFormat>()?;
        cfg.limits = Limits::from_env();
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(cfg: &ExperimentConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Resource(format!("writing {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Resource(format!("stdout: {e}"))),
    }
}

fn run(cli: Cli) -> Result<bool> {
    let started = Instant::now();
    let ok = match cli.command {
        Command::Sample(c) => {
            let cfg = c.config()?;
            let out = harness::cmd_sample(&cfg)?;
            emit(&cfg, &out.render(cfg.format))?;
            true
        }
        Command::Verify(c) => {
            let cfg = c.config()?;
            let report = harness::cmd_verify(&cfg)?;
            emit(&cfg, &harness::render_json(&report))?;
            if let Some(state) = report.offending_state {
                eprintln!("exact identity failed at state {state}");
            }
            report.passed()
        }
        Command::Mixing { common, times, ratio_study } => {
            let cfg = common.config()?;
            let report = harness::cmd_mixing(&cfg, &times, &ratio_study)?;
            emit(&cfg, &report.render(cfg.format))?;
            report.certificate_holds
        }
        Command::Bench(c) => {
            let cfg = c.config()?;
            let report = harness::cmd_bench(&cfg)?;
            emit(&cfg, &harness::render_json(&report))?;
            true
        }
    };
    eprintln!("wall-clock: {:.3}s", started.elapsed().as_secs_f64());
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
