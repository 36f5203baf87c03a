//! Grid sweeps and case-region maps: the tabular data behind error-rate
//! curves, theory-vs-simulation overlays, allocation heatmaps, and case
//! classification maps.
//!
//! A sweep walks one or two axes (an amplitude scale or the noise level),
//! evaluates each named scheme at every grid point, and emits one row per
//! (grid point, scheme) in a fixed order. Closed-form error probability
//! is filled in where the theory applies (the shared-channel skewed
//! design); every scheme can additionally be simulated. Row-level
//! convergence or cap failures are flagged in a status column and the
//! sweep continues, so one pathological grid point cannot sink a long run.

use std::path::PathBuf;

use serde::Serialize;

use crate::errors::{Error, Result};
use crate::model::{Case, ModelParams};
use crate::pe::{error_probability, optimal_allocation};
use crate::rng::mix_seed;
use crate::sim::{simulate, Scheme, SimConfig};

/// Quantity a sweep axis varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisVar {
    /// Sensor 1 amplitude scale.
    Alloc1,
    /// Sensor 2 amplitude scale.
    Alloc2,
    /// Channel noise level. A log-spaced grid is uniform in SNR dB.
    N0,
}

/// One sweep axis: `values()` yields `points` values from `min` to `max`
/// inclusive, linearly or log-spaced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub var: AxisVar,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub log: bool,
}

impl GridAxis {
    /// Parses the CLI grid syntax `var:min:max:points[:log]`, e.g.
    /// `alloc2:0.05:2.3:30` or `n0:0.05:12.6:37:log`.
    pub fn parse(token: &str) -> Result<Self> {
        let parts: Vec<&str> = token.split(':').collect();
        if !(parts.len() == 4 || parts.len() == 5) {
            return Err(Error::Domain("grid must have the form var:min:max:points[:log]"));
        }
        let var = match parts[0] {
            "alloc1" => AxisVar::Alloc1,
            "alloc2" => AxisVar::Alloc2,
            "n0" => AxisVar::N0,
            _ => return Err(Error::Domain("grid variable must be alloc1, alloc2, or n0")),
        };
        let min: f64 =
            parts[1].parse().map_err(|_| Error::Domain("grid min must be a number"))?;
        let max: f64 =
            parts[2].parse().map_err(|_| Error::Domain("grid max must be a number"))?;
        let points: usize =
            parts[3].parse().map_err(|_| Error::Domain("grid points must be an integer"))?;
        let log = match parts.get(4) {
            None => false,
            Some(&"log") => true,
            Some(_) => return Err(Error::Domain("grid spacing suffix must be `log`")),
        };
        let axis = Self { var, min, max, points, log };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::Domain("grid needs at least 2 points"));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Error::Domain("grid requires finite min < max"));
        }
        if self.log && self.min <= 0.0 {
            return Err(Error::Domain("log-spaced grid requires min > 0"));
        }
        if self.var == AxisVar::N0 && self.min <= 0.0 {
            return Err(Error::Domain("n0 grid requires positive values"));
        }
        if self.var != AxisVar::N0 && self.min < 0.0 {
            return Err(Error::Domain("amplitude grid requires nonnegative values"));
        }
        Ok(())
    }

    /// Grid values with both endpoints exact.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|k| {
                if k == 0 {
                    self.min
                } else if k == n - 1 {
                    self.max
                } else if self.log {
                    let t = k as f64 / (n - 1) as f64;
                    (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp()
                } else {
                    self.min + (self.max - self.min) * k as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

/// Named curve a sweep can trace. The first four ride the shared-channel
/// skewed design (closed-form theory available) and differ only in how
/// the amplitudes are chosen; the last three are simulation-only
/// baselines at full cap power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeSel {
    Optimal,
    BothMax,
    Sensor1Only,
    Sensor2Only,
    SymmetricMax,
    OrthSymmetric,
    OrthAsymmetric,
}

impl SchemeSel {
    pub fn parse(token: &str) -> Result<Self> {
        Ok(match token {
            "optimal" => SchemeSel::Optimal,
            "both-max" => SchemeSel::BothMax,
            "sensor1-only" => SchemeSel::Sensor1Only,
            "sensor2-only" => SchemeSel::Sensor2Only,
            "symmetric-max" => SchemeSel::SymmetricMax,
            "orth-symmetric" => SchemeSel::OrthSymmetric,
            "orth-asymmetric" => SchemeSel::OrthAsymmetric,
            _ => {
                return Err(Error::Domain(
                    "scheme must be one of optimal, both-max, sensor1-only, sensor2-only, \
                     symmetric-max, orth-symmetric, orth-asymmetric",
                ))
            }
        })
    }

    pub fn token(self) -> &'static str {
        match self {
            SchemeSel::Optimal => "optimal",
            SchemeSel::BothMax => "both-max",
            SchemeSel::Sensor1Only => "sensor1-only",
            SchemeSel::Sensor2Only => "sensor2-only",
            SchemeSel::SymmetricMax => "symmetric-max",
            SchemeSel::OrthSymmetric => "orth-symmetric",
            SchemeSel::OrthAsymmetric => "orth-asymmetric",
        }
    }

    /// Simulator family backing this curve.
    pub fn sim_scheme(self) -> Scheme {
        match self {
            SchemeSel::Optimal
            | SchemeSel::BothMax
            | SchemeSel::Sensor1Only
            | SchemeSel::Sensor2Only => Scheme::MacOptimalAsym,
            SchemeSel::SymmetricMax => Scheme::MacSymmetricMax,
            SchemeSel::OrthSymmetric => Scheme::OrthSymmetricBpsk,
            SchemeSel::OrthAsymmetric => Scheme::OrthAsymmetricBpsk,
        }
    }

    /// Whether the closed-form error probability applies (and the
    /// allocation is free to vary).
    pub fn is_asym_design(self) -> bool {
        self.sim_scheme() == Scheme::MacOptimalAsym
    }
}

/// Output serialization for tabular commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(token: &str) -> Result<Self> {
        match token {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Domain("format must be csv or json")),
        }
    }
}

/// Full description of one sweep.
///
/// Amplitude axes steer the `optimal` scheme away from its policy
/// allocation, exploring the free skewed design around the optimum. The
/// other schemes name a fixed allocation rule, so their rows ignore
/// amplitude axes and trace flat reference curves.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub params: ModelParams,
    /// One or two axes; with two, the first is the outer loop.
    pub axes: Vec<GridAxis>,
    pub schemes: Vec<SchemeSel>,
    /// Trials per row; 0 disables simulation (theory-only sweep).
    pub trials: u64,
    pub seed: u64,
    pub format: OutputFormat,
    /// Output file; `None` means standard output.
    pub out: Option<PathBuf>,
}

/// Row completeness marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    /// Root isolation failed; theoretical columns are empty.
    ConvergenceError,
    /// Requested allocation exceeds a power cap; simulated columns are
    /// empty.
    CapError,
}

impl RowStatus {
    fn token(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::ConvergenceError => "convergence_error",
            RowStatus::CapError => "cap_error",
        }
    }
}

/// One output row. Column order matches the CSV header.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub scheme: &'static str,
    pub n0: f64,
    pub snr_db: f64,
    pub alloc1: f64,
    pub alloc2: f64,
    pub pe_theory: Option<f64>,
    pub pe_sim: Option<f64>,
    pub ci95: Option<f64>,
    pub roots: Option<usize>,
    pub status: RowStatus,
}

/// Runs the sweep and returns rows in deterministic grid order: outer
/// axis, then inner axis, then schemes in the order given. Each row's
/// simulation seed derives from `(seed, row index)`, so the same spec
/// reproduces the same table bit for bit, independent of thread count.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    validate_spec(spec)?;
    let combos = grid_combos(&spec.axes);
    let mut rows = Vec::with_capacity(combos.len() * spec.schemes.len());
    for combo in &combos {
        for &scheme in &spec.schemes {
            let index = rows.len() as u64;
            rows.push(row_for(spec, combo, scheme, mix_seed(spec.seed, index))?);
        }
    }
    Ok(rows)
}

fn validate_spec(spec: &SweepSpec) -> Result<()> {
    if spec.axes.is_empty() || spec.axes.len() > 2 {
        return Err(Error::Domain("sweep needs one or two grid axes"));
    }
    for axis in &spec.axes {
        axis.validate()?;
    }
    if spec.axes.len() == 2 && spec.axes[0].var == spec.axes[1].var {
        return Err(Error::Domain("sweep axes must differ"));
    }
    if spec.schemes.is_empty() {
        return Err(Error::Domain("sweep needs at least one scheme"));
    }
    Ok(())
}

fn grid_combos(axes: &[GridAxis]) -> Vec<Vec<(AxisVar, f64)>> {
    let first = axes[0].values();
    match axes.get(1) {
        None => first.into_iter().map(|v| vec![(axes[0].var, v)]).collect(),
        Some(second) => {
            let inner = second.values();
            let mut out = Vec::with_capacity(first.len() * inner.len());
            for &a in &first {
                for &b in &inner {
                    out.push(vec![(axes[0].var, a), (second.var, b)]);
                }
            }
            out
        }
    }
}

fn row_for(
    spec: &SweepSpec,
    combo: &[(AxisVar, f64)],
    scheme: SchemeSel,
    row_seed: u64,
) -> Result<SweepRow> {
    let mut n0 = spec.params.n0();
    for &(var, value) in combo {
        if var == AxisVar::N0 {
            n0 = value;
        }
    }
    let params = spec.params.with_n0(n0)?;
    let mut status = RowStatus::Ok;

    let (alloc, pe_theory, roots) = if scheme.is_asym_design() {
        let mut alloc = match scheme {
            SchemeSel::Optimal => {
                let a = optimal_allocation(&params)?;
                (a.p1_star, a.p2_star)
            }
            SchemeSel::BothMax => (params.p1max().sqrt(), params.p2max().sqrt()),
            SchemeSel::Sensor1Only => (params.p1max().sqrt(), 0.0),
            SchemeSel::Sensor2Only => (0.0, params.p2max().sqrt()),
            _ => unreachable!(),
        };
        if scheme == SchemeSel::Optimal {
            for &(var, value) in combo {
                match var {
                    AxisVar::Alloc1 => alloc.0 = value,
                    AxisVar::Alloc2 => alloc.1 = value,
                    AxisVar::N0 => {}
                }
            }
        }
        match error_probability(&params, alloc.0, alloc.1) {
            Ok(b) => (alloc, Some(b.pe), Some(b.boundaries.roots().len())),
            Err(Error::Convergence(_)) => {
                status = RowStatus::ConvergenceError;
                (alloc, None, None)
            }
            Err(e) => return Err(e),
        }
    } else {
        ((params.p1max().sqrt(), params.p2max().sqrt()), None, None)
    };

    let (pe_sim, ci95) = if spec.trials > 0 && status != RowStatus::ConvergenceError {
        let config = SimConfig {
            trials: spec.trials,
            seed: row_seed,
            scheme: scheme.sim_scheme(),
            alloc,
        };
        match simulate(&params, &config) {
            Ok(r) => (Some(r.pe_hat), Some(r.ci95_halfwidth)),
            Err(Error::Cap { .. }) => {
                status = RowStatus::CapError;
                (None, None)
            }
            Err(Error::Convergence(_)) => {
                status = RowStatus::ConvergenceError;
                (None, None)
            }
            Err(e) => return Err(e),
        }
    } else {
        (None, None)
    };

    Ok(SweepRow {
        scheme: scheme.token(),
        n0,
        snr_db: params.snr_db(),
        alloc1: alloc.0,
        alloc2: alloc.1,
        pe_theory,
        pe_sim,
        ci95,
        roots,
        status,
    })
}

/// Case-region map request: classify the `(eps1, eps2)` plane at a fixed
/// prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionMapSpec {
    pub p1: f64,
    pub resolution: usize,
}

/// One cell of a case-region map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionCell {
    pub eps1: f64,
    pub eps2: f64,
    pub case: Case,
}

/// Classifies cell centers of a `resolution x resolution` grid over
/// `(eps1, eps2)` in `(0, 0.5)^2`, keeping only the ordered half
/// `eps1 <= eps2`. Cell centers sit at `(k + 0.5) * 0.5 / resolution`.
pub fn region_map(spec: &RegionMapSpec) -> Result<Vec<RegionCell>> {
    if spec.resolution < 2 {
        return Err(Error::Domain("region map resolution must be at least 2"));
    }
    let step = 0.5 / spec.resolution as f64;
    let mut cells = Vec::new();
    for i in 0..spec.resolution {
        let eps1 = (i as f64 + 0.5) * step;
        for j in i..spec.resolution {
            let eps2 = (j as f64 + 0.5) * step;
            let params = ModelParams::new(spec.p1, eps1, eps2, 1.0, 1.0, 1.0)?;
            cells.push(RegionCell { eps1, eps2, case: params.classify().case });
        }
    }
    Ok(cells)
}

/// Exact decimal for a float: 17 significant digits round-trip every f64.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub const SWEEP_CSV_HEADER: [&str; 10] = [
    "scheme", "n0", "snr_db", "alloc1", "alloc2", "pe_theory", "pe_sim", "ci95", "roots",
    "status",
];

/// Serializes sweep rows as CSV with a header row; floats carry 17
/// significant digits so the file re-parses to the exact values.
pub fn sweep_to_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.scheme.to_string(),
            fmt_f64(r.n0),
            fmt_f64(r.snr_db),
            fmt_f64(r.alloc1),
            fmt_f64(r.alloc2),
            fmt_opt(r.pe_theory),
            fmt_opt(r.pe_sim),
            fmt_opt(r.ci95),
            r.roots.map(|n| n.to_string()).unwrap_or_default(),
            r.status.token().to_string(),
        ])?;
    }
    finish_csv(w)
}

pub fn sweep_to_json(rows: &[SweepRow]) -> Result<String> {
    Ok(serde_json::to_string_pretty(rows)?)
}

pub fn render_sweep(format: OutputFormat, rows: &[SweepRow]) -> Result<String> {
    match format {
        OutputFormat::Csv => sweep_to_csv(rows),
        OutputFormat::Json => sweep_to_json(rows),
    }
}

pub fn render_region(format: OutputFormat, cells: &[RegionCell]) -> Result<String> {
    match format {
        OutputFormat::Csv => region_to_csv(cells),
        OutputFormat::Json => region_to_json(cells),
    }
}

pub fn region_to_csv(cells: &[RegionCell]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["eps1", "eps2", "case"])?;
    for c in cells {
        w.write_record([fmt_f64(c.eps1), fmt_f64(c.eps2), c.case.to_string()])?;
    }
    finish_csv(w)
}

pub fn region_to_json(cells: &[RegionCell]) -> Result<String> {
    Ok(serde_json::to_string_pretty(cells)?)
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}
