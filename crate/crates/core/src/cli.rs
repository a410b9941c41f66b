//! Declarative experiments: config parsing, result files, plot data.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::lab::{
    fit_loglog, fit_scaling, sweep, Axis, Grid, MeasureOptions, Pairing, ScalingFit, SweepTable,
};
use crate::oracles::NoiseSchedule;
use crate::rng::RngState;
use crate::scenarios::{build_instance, catalog, scenario_info, Instance, Params};
use crate::solvers::{AveragingScheme, SolverConfig, StepSchedule};

/// Column order of `results.csv`.
pub const RESULTS_COLUMNS: [&str; 14] = [
    "experiment_id",
    "scenario",
    "T",
    "epsilon",
    "delta",
    "mu",
    "trials",
    "pairing",
    "deviation_mean",
    "deviation_stderr",
    "subopt_mean",
    "subopt_max",
    "oracle_calls",
    "wallclock_s",
];

const NOISE_OVERRIDES: [&str; 3] = ["none", "gaussian_iid", "rademacher_coordinate"];

/// Replacements for the scenario's own oracle.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleOverrides {
    /// Replace the noise with one of `none`, `gaussian_iid`,
    /// `rademacher_coordinate`, keeping the scenario's δ.
    #[serde(default)]
    pub noise: Option<String>,
    /// Random schedules searched by `exact_vs_adversary`.
    #[serde(default)]
    pub adversary_search_n: Option<usize>,
}

/// Solver fields left `null` take the scenario's prescribed value.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverDescriptor {
    #[serde(default)]
    pub schedule: Option<String>,
    #[serde(default)]
    pub averaging: Option<String>,
    /// Step size of the `constant` schedule.
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub batch_size: Option<usize>,
    /// Projection radius `D`.
    #[serde(default)]
    pub projection: Option<f64>,
}

fn default_trials() -> usize {
    crate::lab::DEFAULT_TRIALS
}

fn default_tolerance() -> f64 {
    0.05
}

/// An experiment as read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment_id: String,
    pub scenario: String,
    /// Scenario parameters shared by every grid point.
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub oracle_overrides: OracleOverrides,
    #[serde(default)]
    pub solver: SolverDescriptor,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub pairing: Pairing,
    /// Defaults to `results/<experiment_id>`.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// A row fails when mean suboptimality exceeds `ε·(1 + tolerance)`.
    #[serde(default = "default_tolerance")]
    pub accuracy_tolerance: f64,
    /// Stop starting rows once this many oracle calls were spent.
    #[serde(default)]
    pub max_oracle_calls: Option<u64>,
}

impl ExperimentConfig {
    /// The config with every default written out.
    pub fn canonical(&self) -> ExperimentConfig {
        let mut c = self.clone();
        if c.output_dir.is_none() {
            c.output_dir = Some(PathBuf::from("results").join(&c.experiment_id));
        }
        c.oracle_overrides
            .adversary_search_n
            .get_or_insert(crate::lab::DEFAULT_ADVERSARY_SEARCH);
        c
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(&self.canonical()).expect("config serializes") + "\n"
    }

    /// Hex SHA-256 of [`canonical_json`](Self::canonical_json).
    pub fn config_hash(&self) -> String {
        hex(&Sha256::digest(self.canonical_json().as_bytes()))
    }

    pub fn output_dir(&self) -> PathBuf {
        self.canonical()
            .output_dir
            .expect("canonical form sets output_dir")
    }

    fn validate(&self) -> Result<()> {
        if self.experiment_id.is_empty() {
            return Err(Error::Config("experiment_id must not be empty".into()));
        }
        scenario_info(&self.scenario).map_err(config_err)?;
        if let Some(s) = &self.solver.schedule {
            if !StepSchedule::IDS.contains(&s.as_str()) {
                return Err(config_err(Error::unknown(
                    "schedule",
                    s,
                    &StepSchedule::IDS,
                )));
            }
        }
        if let Some(a) = &self.solver.averaging {
            if !AveragingScheme::IDS.contains(&a.as_str()) {
                return Err(config_err(Error::unknown(
                    "averaging",
                    a,
                    &AveragingScheme::IDS,
                )));
            }
        }
        if let Some(n) = &self.oracle_overrides.noise {
            if !NOISE_OVERRIDES.contains(&n.as_str()) {
                return Err(config_err(Error::unknown(
                    "noise override",
                    n,
                    &NOISE_OVERRIDES,
                )));
            }
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(self.accuracy_tolerance >= 0.0) {
            return Err(Error::Config(
                "accuracy_tolerance must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

fn config_err(e: Error) -> Error {
    Error::Config(e.to_string())
}

fn hex(bytes: &[u8]) -> String {
    bytes
        .iter()
        .fold(String::with_capacity(2 * bytes.len()), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// Parses and validates a JSON config. Unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let c: ExperimentConfig =
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    c.validate()?;
    Ok(c)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

/// Builds the instance and solver for one parameter point.
pub fn build_point(config: &ExperimentConfig, params: &Params) -> Result<(Instance, SolverConfig)> {
    let mut inst = build_instance(&config.scenario, params)?;
    if let Some(noise) = &config.oracle_overrides.noise {
        let delta = inst.oracle.delta();
        inst.oracle.schedule = match noise.as_str() {
            "none" => NoiseSchedule::None,
            "gaussian_iid" => NoiseSchedule::GaussianIid { delta },
            _ => NoiseSchedule::RademacherCoordinate {
                delta,
                offset: 0,
                end: inst.dim(),
            },
        };
    }
    let solver = solver_for(&config.solver, &inst)?;
    Ok((inst, solver))
}

fn solver_for(d: &SolverDescriptor, inst: &Instance) -> Result<SolverConfig> {
    let mut s = inst.solver.clone();
    let meta = inst.cost().meta;
    let horizon = s.horizon;
    let need = |name: &str, v: Option<f64>| {
        v.ok_or_else(|| {
            Error::Incompatible(format!(
                "scenario `{}` does not define {name}",
                inst.scenario_id
            ))
        })
    };
    let mu = meta.strong_convexity_mu;
    if let Some(id) = &d.schedule {
        s.schedule = match id.as_str() {
            "constant" => StepSchedule::Constant {
                eta: d
                    .eta
                    .ok_or_else(|| Error::param("eta", "required by the constant schedule"))?,
            },
            "slowed" => StepSchedule::Slowed {
                epsilon: need("epsilon", inst.params.get("epsilon").copied())?,
                horizon,
            },
            "smooth_sc" => StepSchedule::SmoothSc {
                l: need("L", meta.smoothness_l)?,
                mu,
            },
            "sc_classic" => StepSchedule::ScClassic { mu },
            "sc_det" => StepSchedule::ScDet { mu },
            "inverse_L" => StepSchedule::InverseL {
                l: need("L", meta.smoothness_l)?,
            },
            other => return Err(Error::unknown("schedule", other, &StepSchedule::IDS)),
        };
    } else if d.eta.is_some() {
        return Err(Error::param("eta", "only used with schedule `constant`"));
    }
    if let Some(id) = &d.averaging {
        s.averaging = match id.as_str() {
            "last" => AveragingScheme::Last,
            "uniform" => AveragingScheme::Uniform,
            "shifted_linear" => AveragingScheme::ShiftedLinear {
                k: StepSchedule::smooth_sc_k(need("L", meta.smoothness_l)?, mu),
            },
            "sc_linear" => AveragingScheme::ScLinear,
            "sc_linear_det" => AveragingScheme::ScLinearDet,
            other => return Err(Error::unknown("averaging", other, &AveragingScheme::IDS)),
        };
    }
    if let Some(b) = d.batch_size {
        s.batch_size = b;
    }
    if d.projection.is_some() {
        s.radius = d.projection;
    }
    Ok(s)
}

/// Outcome recorded in the manifest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    AccuracyFailed,
    Truncated,
    InvariantFailed,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Ok | RunStatus::Truncated => 0,
            RunStatus::AccuracyFailed => 3,
            RunStatus::InvariantFailed => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultManifest {
    pub experiment_id: String,
    pub artifact_version: String,
    pub config_hash: String,
    pub started_at: String,
    pub finished_at: Option<String>,
    pub wallclock_s: Option<f64>,
    pub rng_algorithm: String,
    pub files: Vec<String>,
    pub status: RunStatus,
    pub rows: usize,
    pub accuracy_failed_rows: Vec<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Write measured per-row timings into `results.csv`; off by default so
    /// that reruns are byte-identical.
    pub record_wallclock: bool,
}

/// A fit per grid axis, or the reason it could not be made.
#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum FitEntry {
    Fit(ScalingFit),
    Skipped { axis: Axis, error: String },
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Runs the sweep described by `config` and writes `results.csv`,
/// `fits.json` and `manifest.json` into its output directory.
pub fn run_experiment(config: &ExperimentConfig, opts: &RunOptions) -> Result<ResultManifest> {
    config.validate()?;
    let dir = config.output_dir();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let manifest_path = dir.join("manifest.json");
    let mut manifest = ResultManifest {
        experiment_id: config.experiment_id.clone(),
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: config.config_hash(),
        started_at: timestamp(),
        finished_at: None,
        wallclock_s: None,
        rng_algorithm: crate::rng::ALGORITHM_ID.to_string(),
        files: Vec::new(),
        status: RunStatus::Truncated,
        rows: 0,
        accuracy_failed_rows: Vec::new(),
    };
    // left in place if the run is interrupted
    write_file(
        &manifest_path,
        &(serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n"),
    )?;

    let clock = Instant::now();
    let table = run_table(config)?;
    let elapsed = clock.elapsed().as_secs_f64();

    let results = results_csv(config, &table, opts.record_wallclock.then_some(elapsed))?;
    write_file(&dir.join("results.csv"), &results)?;
    let fits = fits_for(&table, config.grid.keys().copied());
    write_file(
        &dir.join("fits.json"),
        &(serde_json::to_string_pretty(&fits).expect("fits serialize") + "\n"),
    )?;
    write_file(&dir.join("config.json"), &config.canonical_json())?;

    manifest.accuracy_failed_rows = table
        .rows
        .iter()
        .filter(|r| r.accuracy_failed)
        .map(|r| r.index)
        .collect();
    manifest.rows = table.rows.len();
    manifest.status = if table.truncated {
        RunStatus::Truncated
    } else if !manifest.accuracy_failed_rows.is_empty() {
        RunStatus::AccuracyFailed
    } else {
        RunStatus::Ok
    };
    manifest.files = ["results.csv", "fits.json", "config.json", "manifest.json"]
        .map(String::from)
        .to_vec();
    manifest.finished_at = Some(timestamp());
    manifest.wallclock_s = Some(elapsed);
    write_file(
        &manifest_path,
        &(serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n"),
    )?;
    Ok(manifest)
}

/// The sweep of `config` without touching the file system.
pub fn run_table(config: &ExperimentConfig) -> Result<SweepTable> {
    let opts = MeasureOptions {
        trials: config.trials,
        pairing: config.pairing,
        adversary_search_n: config
            .oracle_overrides
            .adversary_search_n
            .unwrap_or(crate::lab::DEFAULT_ADVERSARY_SEARCH),
    };
    let rng = RngState::new(config.master_seed);
    let build = |p: &Params| build_point(config, p);
    if config.grid.is_empty() {
        // a single point: sweep over the axis values already in `params`
        let (inst, _) = build(&config.params)?;
        let t = *inst
            .params
            .get("T")
            .ok_or_else(|| Error::Config("scenario has no T parameter".into()))?;
        let grid = Grid::from([(Axis::T, vec![t])]);
        return sweep(
            build,
            &config.params,
            &grid,
            &opts,
            config.accuracy_tolerance,
            &rng,
            config.max_oracle_calls,
        );
    }
    sweep(
        build,
        &config.params,
        &config.grid,
        &opts,
        config.accuracy_tolerance,
        &rng,
        config.max_oracle_calls,
    )
}

/// Fits every axis with at least 3 grid values.
pub fn fits_for(table: &SweepTable, axes: impl IntoIterator<Item = Axis>) -> Vec<FitEntry> {
    axes.into_iter()
        .map(|axis| match fit_scaling(table, axis) {
            Ok(f) => FitEntry::Fit(f),
            Err(e) => FitEntry::Skipped {
                axis,
                error: e.to_string(),
            },
        })
        .collect()
}

/// Renders a sweep table in the frozen `results.csv` schema.
pub fn results_csv(
    config: &ExperimentConfig,
    table: &SweepTable,
    wallclock: Option<f64>,
) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
    w.write_record(RESULTS_COLUMNS).map_err(csv_err)?;
    let per_row = wallclock.map_or(0.0, |s| s / table.rows.len().max(1) as f64);
    for row in &table.rows {
        let p = |k: &str| row.params.get(k).map_or(String::new(), |v| num(*v));
        let (sm, sx) = row.accuracy.map_or((String::new(), String::new()), |a| {
            (num(a.mean), num(a.max))
        });
        w.write_record([
            config.experiment_id.clone(),
            table.scenario_id.clone(),
            p("T"),
            p("epsilon"),
            p("delta"),
            p("mu"),
            row.deviation.trials.to_string(),
            row.deviation.pairing.id().to_string(),
            num(row.deviation.mean_sq_dev),
            num(row.deviation.stderr),
            sm,
            sx,
            row.oracle_calls.to_string(),
            num(per_row),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Scenario catalog as pretty JSON.
pub fn list_catalog() -> String {
    serde_json::to_string_pretty(catalog()).expect("catalog serializes")
}

/// Plot-ready log–log data read back from a `results.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotData {
    pub axis: Axis,
    pub points: Vec<(f64, f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub dropped_zero_rows: usize,
}

impl PlotData {
    /// CSV with a `# dropped_zero_rows=k` comment line.
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "# dropped_zero_rows={}\n# slope={}\nlog_axis,log_dev,fit_line\n",
            self.dropped_zero_rows,
            num(self.slope)
        );
        for (x, y, f) in &self.points {
            let _ = writeln!(s, "{},{},{}", num(*x), num(*y), num(*f));
        }
        s
    }

    /// A minimal SVG scatter of the points with the fitted line.
    pub fn to_svg(&self) -> String {
        let (w, h, pad) = (480.0, 360.0, 40.0);
        let bounds = |f: fn(&(f64, f64, f64)) -> f64, g: fn(&(f64, f64, f64)) -> f64| {
            let vals = self.points.iter().map(f).chain(self.points.iter().map(g));
            vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
        };
        let (x0, x1) = bounds(|p| p.0, |p| p.0);
        let (y0, y1) = bounds(|p| p.1, |p| p.2);
        let sx = |x: f64| pad + (x - x0) / (x1 - x0).max(1e-12) * (w - 2.0 * pad);
        let sy = |y: f64| h - pad - (y - y0) / (y1 - y0).max(1e-12) * (h - 2.0 * pad);
        let mut s =
            format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\">\n");
        let _ = writeln!(s, "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>");
        let line: Vec<String> = self
            .points
            .iter()
            .map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.2)))
            .collect();
        let _ = writeln!(
            s,
            "<polyline fill=\"none\" stroke=\"gray\" points=\"{}\"/>",
            line.join(" ")
        );
        for p in &self.points {
            let _ = writeln!(
                s,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"black\"/>",
                sx(p.0),
                sy(p.1)
            );
        }
        let _ = writeln!(
            s,
            "<text x=\"{pad}\" y=\"20\" font-size=\"12\">log dev vs log {}: slope {:.3}</text>",
            self.axis, self.slope
        );
        s.push_str("</svg>\n");
        s
    }
}

/// Reads `results.csv` and fits `log deviation_mean` against `log axis`.
pub fn emit_plotdata(path: &Path, axis: Axis) -> Result<PlotData> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let csv_err = |e: csv::Error| Error::InvalidInput(format!("{}: {e}", path.display()));
    let headers = r.headers().map_err(csv_err)?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::InvalidInput(format!("{}: missing column `{name}`", path.display()))
        })
    };
    let (ia, id) = (col(axis.param())?, col("deviation_mean")?);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut dropped = 0;
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let parse = |i: usize| -> Result<f64> {
            rec[i].parse().map_err(|_| {
                Error::InvalidInput(format!("{}: bad number `{}`", path.display(), &rec[i]))
            })
        };
        let (x, y) = (parse(ia)?, parse(id)?);
        if y > 0.0 {
            xs.push(x);
            ys.push(y);
        } else {
            dropped += 1;
        }
    }
    let mut distinct = xs.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} distinct {axis} values with positive deviation, need 3 ({dropped} zero rows dropped)",
            distinct.len()
        )));
    }
    let (slope, intercept, _) = fit_loglog(&xs, &ys)?;
    let points = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x.ln(), y.ln(), intercept + slope * x.ln()))
        .collect();
    Ok(PlotData {
        axis,
        points,
        slope,
        intercept,
        dropped_zero_rows: dropped,
    })
}
