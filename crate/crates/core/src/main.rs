//! Command-line front end. Every subcommand emits machine-readable
//! output: single results as JSON objects, tables as CSV or a JSON
//! array, so plot scripts in any language can consume them directly.
//!
//! Exit codes: 0 success, 2 invalid parameters or usage, 3 root
//! isolation failure, 1 I/O failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;

use macsig::{
    error_probability, find_boundaries, optimal_allocation, region_map, render_region,
    render_sweep, run_sweep, simulate, Error, GridAxis, ModelParams, OutputFormat, RegionMapSpec,
    SchemeSel, SimConfig, SweepSpec,
};

#[derive(Parser)]
#[command(
    name = "macsig",
    version,
    about = "Optimal binary signaling for a two-sensor Gaussian multiple-access detection network"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the operating point and print the prior thresholds.
    ///
    /// Needs only --p1, --eps1, --eps2; the result does not depend on the
    /// channel noise or the power caps.
    Classify {
        #[command(flatten)]
        params: ParamFlags,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Compute the cap-constrained optimal power allocation.
    Optimize {
        #[command(flatten)]
        params: ParamFlags,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Locate the MAP decision boundaries for a given amplitude pair.
    Boundaries {
        #[command(flatten)]
        params: ParamFlags,
        /// Sensor 1 amplitude scale.
        #[arg(long)]
        alloc1: Option<f64>,
        /// Sensor 2 amplitude scale.
        #[arg(long)]
        alloc2: Option<f64>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Evaluate the exact error probability for a given amplitude pair.
    Pe {
        #[command(flatten)]
        params: ParamFlags,
        /// Sensor 1 amplitude scale.
        #[arg(long)]
        alloc1: Option<f64>,
        /// Sensor 2 amplitude scale.
        #[arg(long)]
        alloc2: Option<f64>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Tabulate schemes over a one- or two-axis grid.
    ///
    /// Amplitude axes steer the free `optimal` design; the named
    /// reference schemes keep their defining allocation. A log-spaced n0
    /// axis yields rows uniform in SNR dB.
    Sweep {
        #[command(flatten)]
        params: ParamFlags,
        /// Grid axis `var:min:max:points[:log]` with var one of alloc1,
        /// alloc2, n0. Repeat once for a second (inner) axis.
        #[arg(long = "grid", value_name = "SPEC")]
        grids: Vec<String>,
        /// Scheme to evaluate (optimal, both-max, sensor1-only,
        /// sensor2-only, symmetric-max, orth-symmetric, orth-asymmetric);
        /// repeatable.
        #[arg(long = "scheme", value_name = "NAME")]
        schemes: Vec<String>,
        /// Monte Carlo trials per row; 0 emits a theory-only table.
        #[arg(long)]
        trials: Option<u64>,
        /// Base seed; each row derives its own stream from it.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Output format: csv (default) or json.
        #[arg(long, value_name = "csv|json")]
        format: Option<String>,
    },
    /// Classify every cell of an (eps1, eps2) grid at a fixed prior.
    RegionMap {
        #[command(flatten)]
        params: ParamFlags,
        /// Cells per axis over (0, 0.5); only the half with eps1 <= eps2
        /// is emitted.
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Output format: csv (default) or json.
        #[arg(long, value_name = "csv|json")]
        format: Option<String>,
    },
    /// Run a seeded Monte Carlo simulation of one scheme.
    Simulate {
        #[command(flatten)]
        params: ParamFlags,
        /// Scheme to simulate (same names as sweep).
        #[arg(long, value_name = "NAME")]
        scheme: Option<String>,
        /// Sensor 1 amplitude override (skewed-design schemes only).
        #[arg(long)]
        alloc1: Option<f64>,
        /// Sensor 2 amplitude override (skewed-design schemes only).
        #[arg(long)]
        alloc2: Option<f64>,
        /// Monte Carlo trials (default 500000).
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

/// Model parameters, each optional on the command line so a config file
/// can supply it. Flags win over the file; anything still missing is a
/// usage error for the subcommands that need it.
#[derive(Args, Debug, Default)]
struct ParamFlags {
    /// Prior probability of source bit 1, in (0, 0.5].
    #[arg(long)]
    p1: Option<f64>,
    /// Sensor 1 crossover probability, in (0, 0.5).
    #[arg(long)]
    eps1: Option<f64>,
    /// Sensor 2 crossover probability, in [eps1, 0.5).
    #[arg(long)]
    eps2: Option<f64>,
    /// One-sided noise spectral level; the channel noise variance is n0/2.
    #[arg(long)]
    n0: Option<f64>,
    /// Sensor 1 mean transmit power cap.
    #[arg(long)]
    p1max: Option<f64>,
    /// Sensor 2 mean transmit power cap.
    #[arg(long)]
    p2max: Option<f64>,
    /// TOML file supplying any parameter not given as a flag.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

/// Keys a config file may define. Unknown keys are rejected so typos
/// cannot silently fall back to other sources.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    p1: Option<f64>,
    eps1: Option<f64>,
    eps2: Option<f64>,
    n0: Option<f64>,
    p1max: Option<f64>,
    p2max: Option<f64>,
    alloc1: Option<f64>,
    alloc2: Option<f64>,
    trials: Option<u64>,
    seed: Option<u64>,
}

/// Flag and config values merged, flags first.
struct Resolved {
    p1: Option<f64>,
    eps1: Option<f64>,
    eps2: Option<f64>,
    n0: Option<f64>,
    p1max: Option<f64>,
    p2max: Option<f64>,
    alloc1: Option<f64>,
    alloc2: Option<f64>,
    trials: Option<u64>,
    seed: Option<u64>,
}

enum CliError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Lib(e) => e.to_string(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(Error::Convergence(_)) => 3,
            CliError::Lib(Error::Io(_)) => 1,
            CliError::Lib(_) => 2,
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Classify { params, out } => {
            let r = params.resolve()?;
            let p = r.channel_free_params()?;
            let text = serde_json::to_string_pretty(&p.classify()).map_err(Error::from)?;
            write_output(out.as_deref(), text)
        }
        Command::Optimize { params, out } => {
            let r = params.resolve()?;
            let p = r.full_params()?;
            let alloc = optimal_allocation(&p)?;
            let text = serde_json::to_string_pretty(&alloc).map_err(Error::from)?;
            write_output(out.as_deref(), text)
        }
        Command::Boundaries { params, alloc1, alloc2, out } => {
            let r = params.resolve()?;
            let p = r.point_params()?;
            let (a1, a2) = r.alloc(alloc1, alloc2)?;
            let b = find_boundaries(&p, a1, a2)?;
            let text = serde_json::to_string_pretty(&json!({
                "case": p.classify().case,
                "alloc1": a1,
                "alloc2": a2,
                "roots": b.roots(),
                "root_count": b.roots().len(),
            }))
            .map_err(Error::from)?;
            write_output(out.as_deref(), text)
        }
        Command::Pe { params, alloc1, alloc2, out } => {
            let r = params.resolve()?;
            let p = r.point_params()?;
            let (a1, a2) = r.alloc(alloc1, alloc2)?;
            let b = error_probability(&p, a1, a2)?;
            let text = serde_json::to_string_pretty(&json!({
                "case": p.classify().case,
                "alloc1": a1,
                "alloc2": a2,
                "pe": b.pe,
                "roots": b.boundaries.roots(),
                "root_count": b.boundaries.roots().len(),
            }))
            .map_err(Error::from)?;
            write_output(out.as_deref(), text)
        }
        Command::Sweep { params, grids, schemes, trials, seed, out, format } => {
            let r = params.resolve()?;
            let axes = grids
                .iter()
                .map(|g| GridAxis::parse(g))
                .collect::<Result<Vec<_>, _>>()?;
            let schemes = schemes
                .iter()
                .map(|s| SchemeSel::parse(s))
                .collect::<Result<Vec<_>, _>>()?;
            let trials = trials.or(r.trials).unwrap_or(500_000);
            let seed = if trials > 0 {
                seed.or(r.seed)
                    .ok_or_else(|| CliError::Usage("missing required parameter --seed".into()))?
            } else {
                seed.or(r.seed).unwrap_or(0)
            };
            let spec = SweepSpec {
                params: r.full_params()?,
                axes,
                schemes,
                trials,
                seed,
                format: parse_format(format.as_deref())?,
                out,
            };
            let rows = run_sweep(&spec)?;
            let text = render_sweep(spec.format, &rows)?;
            write_output(spec.out.as_deref(), text)
        }
        Command::RegionMap { params, resolution, out, format } => {
            let r = params.resolve()?;
            let spec = RegionMapSpec {
                p1: require("p1", r.p1)?,
                resolution: resolution.ok_or_else(|| {
                    CliError::Usage("missing required parameter --resolution".into())
                })?,
            };
            let cells = region_map(&spec)?;
            let text = render_region(parse_format(format.as_deref())?, &cells)?;
            write_output(out.as_deref(), text)
        }
        Command::Simulate { params, scheme, alloc1, alloc2, trials, seed, out } => {
            let r = params.resolve()?;
            let token = scheme
                .ok_or_else(|| CliError::Usage("missing required parameter --scheme".into()))?;
            let sel = SchemeSel::parse(&token)?;
            let p = r.full_params()?;
            let mut alloc = match sel {
                SchemeSel::Optimal => {
                    let a = optimal_allocation(&p)?;
                    (a.p1_star, a.p2_star)
                }
                SchemeSel::Sensor1Only => (p.p1max().sqrt(), 0.0),
                SchemeSel::Sensor2Only => (0.0, p.p2max().sqrt()),
                _ => (p.p1max().sqrt(), p.p2max().sqrt()),
            };
            let (a1, a2) = (alloc1.or(r.alloc1), alloc2.or(r.alloc2));
            if (a1.is_some() || a2.is_some()) && !sel.is_asym_design() {
                return Err(CliError::Usage(
                    "--alloc1/--alloc2 apply to the shared-channel skewed design only".into(),
                ));
            }
            if let Some(v) = a1 {
                alloc.0 = v;
            }
            if let Some(v) = a2 {
                alloc.1 = v;
            }
            let config = SimConfig {
                trials: trials.or(r.trials).unwrap_or(500_000),
                seed: seed
                    .or(r.seed)
                    .ok_or_else(|| CliError::Usage("missing required parameter --seed".into()))?,
                scheme: sel.sim_scheme(),
                alloc,
            };
            let report = simulate(&p, &config)?;
            let text = serde_json::to_string_pretty(&report).map_err(Error::from)?;
            write_output(out.as_deref(), text)
        }
    }
}

impl ParamFlags {
    fn resolve(&self) -> Result<Resolved, CliError> {
        let cfg = match &self.config {
            None => ConfigFile::default(),
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::Lib(Error::Io(format!("{}: {e}", path.display())))
                })?;
                toml::from_str(&text).map_err(|e| {
                    CliError::Usage(format!("config {}: {e}", path.display()))
                })?
            }
        };
        Ok(Resolved {
            p1: self.p1.or(cfg.p1),
            eps1: self.eps1.or(cfg.eps1),
            eps2: self.eps2.or(cfg.eps2),
            n0: self.n0.or(cfg.n0),
            p1max: self.p1max.or(cfg.p1max),
            p2max: self.p2max.or(cfg.p2max),
            alloc1: cfg.alloc1,
            alloc2: cfg.alloc2,
            trials: cfg.trials,
            seed: cfg.seed,
        })
    }
}

impl Resolved {
    /// All six model parameters, for commands whose output depends on all
    /// of them.
    fn full_params(&self) -> Result<ModelParams, CliError> {
        Ok(ModelParams::new(
            require("p1", self.p1)?,
            require("eps1", self.eps1)?,
            require("eps2", self.eps2)?,
            require("n0", self.n0)?,
            require("p1max", self.p1max)?,
            require("p2max", self.p2max)?,
        )?)
    }

    /// Prior and sensor noise only; channel noise and caps do not affect
    /// the result, so placeholders stand in unless given.
    fn channel_free_params(&self) -> Result<ModelParams, CliError> {
        Ok(ModelParams::new(
            require("p1", self.p1)?,
            require("eps1", self.eps1)?,
            require("eps2", self.eps2)?,
            self.n0.unwrap_or(1.0),
            self.p1max.unwrap_or(1.0),
            self.p2max.unwrap_or(1.0),
        )?)
    }

    /// Everything but the caps, for fixed-amplitude evaluations that
    /// ignore them.
    fn point_params(&self) -> Result<ModelParams, CliError> {
        Ok(ModelParams::new(
            require("p1", self.p1)?,
            require("eps1", self.eps1)?,
            require("eps2", self.eps2)?,
            require("n0", self.n0)?,
            self.p1max.unwrap_or(1.0),
            self.p2max.unwrap_or(1.0),
        )?)
    }

    fn alloc(&self, flag1: Option<f64>, flag2: Option<f64>) -> Result<(f64, f64), CliError> {
        Ok((
            require("alloc1", flag1.or(self.alloc1))?,
            require("alloc2", flag2.or(self.alloc2))?,
        ))
    }
}

fn require(name: &str, v: Option<f64>) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("missing required parameter --{name} (flag or config)")))
}

fn parse_format(token: Option<&str>) -> Result<OutputFormat, CliError> {
    Ok(OutputFormat::parse(token.unwrap_or("csv"))?)
}

/// Prints to stdout or writes the file, always ending with one newline so
/// both paths produce identical bytes.
fn write_output(out: Option<&Path>, mut text: String) -> Result<(), CliError> {
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Lib(Error::Io(format!("{}: {e}", path.display())))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use macsig::Case;

    #[test]
    fn exit_codes_map_error_kinds() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::Lib(Error::Domain("x")).exit_code(), 2);
        assert_eq!(
            CliError::Lib(Error::Case { required: Case::III, actual: Case::I }).exit_code(),
            2
        );
        assert_eq!(CliError::Lib(Error::Scheme("x")).exit_code(), 2);
        assert_eq!(
            CliError::Lib(Error::Cap { sensor: 2, amplitude: 2.0, cap: 1.0 }).exit_code(),
            2
        );
        assert_eq!(CliError::Lib(Error::Convergence("x".into())).exit_code(), 3);
        assert_eq!(CliError::Lib(Error::Io("x".into())).exit_code(), 1);
    }
}
