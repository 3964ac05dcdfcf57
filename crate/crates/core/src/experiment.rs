//! Experiment configuration, the parameter report, and resumable exponent sweeps.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bp::BpParameters;
use crate::degree::{realize_sequence, BiDegreeDistribution, DegreeAtom};
use crate::error::{Error, Result};
use crate::gw::least_squares;
use crate::graph::sample_dcm;
use crate::rate::{analyze, ExtReal, ExponentReport, RateSample};
use crate::seed::derive_seed;
use crate::walk::{empirical_tail, hitting_matrix, stationary_with, StationaryOptions, ALL_PAIRS_MAX};

pub const SWEEP_HEADER: &str = "n,seed,pi_min,pi_max,support_frac,exp_obs,t_hit_hat,status";
pub const DEFAULT_RATE_POINTS: usize = 101;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistributionSource {
    File { file: PathBuf },
    Inline { pmf: Vec<DegreeAtom> },
}

impl DistributionSource {
    pub fn load(&self) -> Result<BiDegreeDistribution> {
        match self {
            DistributionSource::File { file } => BiDegreeDistribution::from_json_file(file),
            DistributionSource::Inline { pmf } => {
                BiDegreeDistribution::new(pmf.iter().map(|a| ((a.in_deg, a.out_deg), a.p)))
            }
        }
    }
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Measurements {
    #[serde(default = "yes")]
    pub pi_min: bool,
    #[serde(default = "yes")]
    pub pi_max: bool,
    /// Exact maximal hitting time (only for n within the dense-solve limit).
    #[serde(default)]
    pub t_hit: bool,
    #[serde(default)]
    pub cover: bool,
    #[serde(default)]
    pub empirical_tail: Vec<f64>,
}

impl Default for Measurements {
    fn default() -> Self {
        Measurements { pi_min: true, pi_max: true, t_hit: false, cover: false, empirical_tail: Vec::new() }
    }
}

fn default_tol() -> f64 {
    1e-12
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub distribution: DistributionSource,
    pub n_ladder: Vec<usize>,
    pub seeds_per_n: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub measurements: Measurements,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_ladder.is_empty() {
            return Err(Error::Config("n ladder is empty".into()));
        }
        if self.n_ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("n ladder must be strictly increasing".into()));
        }
        if self.n_ladder[0] == 0 {
            return Err(Error::Config("n must be positive".into()));
        }
        if self.seeds_per_n == 0 {
            return Err(Error::Config("seeds_per_n must be at least 1".into()));
        }
        if self.measurements.empirical_tail.iter().any(|a| !(*a >= 0.0)) {
            return Err(Error::Config("empirical tail exponents must be non-negative".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config("tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamsReport {
    pub lambda: f64,
    pub nu: f64,
    pub s_minus: f64,
    pub nu_hat: f64,
    #[serde(rename = "H_hat")]
    pub h_hat: Option<f64>,
    #[serde(rename = "H_plus")]
    pub h_plus: Option<f64>,
    pub t_ent_coeff: Option<f64>,
    pub a0: Option<f64>,
    pub phi_a0: ExtReal,
    pub exponent: f64,
    pub degenerate: bool,
    pub rate_table: Vec<RateSample>,
}

impl ParamsReport {
    pub fn new(params: &BpParameters, report: &ExponentReport) -> Self {
        ParamsReport {
            lambda: params.lambda,
            nu: params.nu,
            s_minus: params.s_minus,
            nu_hat: params.nu_hat,
            h_hat: params.h_hat,
            h_plus: params.h_plus,
            t_ent_coeff: params.t_ent_coeff,
            a0: report.a0,
            phi_a0: report.phi_a0,
            exponent: report.exponent,
            degenerate: report.degenerate,
            rate_table: report.rate_table.clone(),
        }
    }
}

/// Deterministic parameter report for a distribution.
pub fn run_params(dist: &BiDegreeDistribution, rate_points: usize) -> Result<ParamsReport> {
    let (params, report) = analyze(dist, rate_points)?;
    Ok(ParamsReport::new(&params, &report))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    NoAttractiveScc,
    Numerical,
    Realization,
}

impl CellStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::NoAttractiveScc => "no_attractive_scc",
            CellStatus::Numerical => "numerical",
            CellStatus::Realization => "realization",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [CellStatus::Ok, CellStatus::NoAttractiveScc, CellStatus::Numerical, CellStatus::Realization]
            .into_iter()
            .find(|c| c.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub seed: u64,
    pub pi_min: Option<f64>,
    pub pi_max: Option<f64>,
    pub support_frac: Option<f64>,
    pub exp_obs: Option<f64>,
    pub t_hit_hat: Option<f64>,
    pub status: CellStatus,
    #[serde(skip)]
    pub tails: Vec<(f64, f64)>,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.17e}")).unwrap_or_default()
}

impl SweepRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n,
            self.seed,
            fmt_opt(self.pi_min),
            fmt_opt(self.pi_max),
            fmt_opt(self.support_frac),
            fmt_opt(self.exp_obs),
            fmt_opt(self.t_hit_hat),
            self.status.as_str()
        )
    }

    /// Parses one data line; `line` is 1-based for error messages.
    pub fn parse_csv_line(text: &str, line: usize) -> Result<Self> {
        let fields: Vec<&str> = text.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::Parse { line, column: 1, msg: format!("expected 8 fields, found {}", fields.len()) });
        }
        let col = |i: usize| fields[..i].iter().map(|f| f.len() + 1).sum::<usize>() + 1;
        let int = |i: usize| -> Result<u64> {
            fields[i].parse().map_err(|_| Error::Parse { line, column: col(i), msg: format!("bad integer `{}`", fields[i]) })
        };
        let real = |i: usize| -> Result<Option<f64>> {
            if fields[i].is_empty() {
                return Ok(None);
            }
            fields[i]
                .parse()
                .map(Some)
                .map_err(|_| Error::Parse { line, column: col(i), msg: format!("bad number `{}`", fields[i]) })
        };
        let status = CellStatus::parse(fields[7])
            .ok_or_else(|| Error::Parse { line, column: col(7), msg: format!("unknown status `{}`", fields[7]) })?;
        Ok(SweepRow {
            n: int(0)? as usize,
            seed: int(1)?,
            pi_min: real(2)?,
            pi_max: real(3)?,
            support_frac: real(4)?,
            exp_obs: real(5)?,
            t_hit_hat: real(6)?,
            status,
            tails: Vec::new(),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of log(1/π_min) against log n, with standard error.
    pub fit: Option<(f64, f64)>,
    pub fit_points: usize,
    pub reused: usize,
}

impl SweepSummary {
    /// Median of `exp_obs` over successful rows at `n`.
    pub fn median_exponent(&self, n: usize) -> Option<f64> {
        let mut v: Vec<f64> = self.rows.iter().filter(|r| r.n == n).filter_map(|r| r.exp_obs).collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let k = v.len();
        Some(if k % 2 == 1 { v[k / 2] } else { 0.5 * (v[k / 2 - 1] + v[k / 2]) })
    }

    pub fn fit_line(&self) -> String {
        match self.fit {
            Some((s, e)) => format!("#fit,slope={s:.17e},stderr={e:.17e},points={}", self.fit_points),
            None => format!("#fit,slope=NA,stderr=NA,points={}", self.fit_points),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(SWEEP_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.to_csv_line());
            s.push('\n');
        }
        s.push_str(&self.fit_line());
        s.push('\n');
        s
    }
}

/// Seed of the `index`-th replicate at size `n`.
pub fn cell_seed(master: u64, n: usize, index: usize) -> u64 {
    derive_seed(master, n as u64, index as u64)
}

/// Runs one (n, seed) cell.
pub fn run_cell(dist: &BiDegreeDistribution, n: usize, seed: u64, cfg: &ExperimentConfig) -> SweepRow {
    let mut row = SweepRow {
        n,
        seed,
        pi_min: None,
        pi_max: None,
        support_frac: None,
        exp_obs: None,
        t_hit_hat: None,
        status: CellStatus::Ok,
        tails: Vec::new(),
    };
    let seq = match realize_sequence(dist, n) {
        Ok(s) => s,
        Err(_) => {
            row.status = CellStatus::Realization;
            return row;
        }
    };
    let g = match sample_dcm(&seq, seed) {
        Ok(g) => g,
        Err(_) => {
            row.status = CellStatus::Realization;
            return row;
        }
    };
    let opts = StationaryOptions { tol: cfg.tol, direct_check_max: 0, ..Default::default() };
    let res = match stationary_with(&g, &opts) {
        Ok(r) => r,
        Err(Error::NonUnique(_)) => {
            row.status = CellStatus::NoAttractiveScc;
            return row;
        }
        Err(_) => {
            row.status = CellStatus::Numerical;
            return row;
        }
    };
    let m = &cfg.measurements;
    row.support_frac = Some(res.support.len() as f64 / n as f64);
    row.exp_obs = Some(res.exponent_observed());
    if m.pi_min {
        row.pi_min = Some(res.pi_min);
    }
    if m.pi_max {
        row.pi_max = Some(res.pi_max);
    }
    if m.t_hit && n <= ALL_PAIRS_MAX {
        match hitting_matrix(&g) {
            Ok(h) => row.t_hit_hat = Some(h.t_hit().0),
            Err(_) => row.status = CellStatus::Numerical,
        }
    }
    row.tails = m.empirical_tail.iter().map(|&a| (a, empirical_tail(&res, a))).collect();
    row
}

fn read_existing(path: &Path) -> Result<BTreeMap<(usize, u64), SweepRow>> {
    let mut out = BTreeMap::new();
    let Ok(f) = File::open(path) else {
        return Ok(out);
    };
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        if i == 0 || line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        // A row cut short by an interrupted run is recomputed.
        if let Ok(row) = SweepRow::parse_csv_line(&line, i + 1) {
            out.insert((row.n, row.seed), row);
        }
    }
    Ok(out)
}

fn now_secs() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Runs every (n, seed) cell. With an output path, rows are appended as they
/// finish (so an interrupted run resumes), then the file is rewritten sorted
/// by (n, seed) with the fit as a trailing comment line. Timestamps go to a
/// `.log` sidecar only.
pub fn run_exponent_sweep(cfg: &ExperimentConfig) -> Result<SweepSummary> {
    cfg.validate()?;
    let dist = cfg.distribution.load()?;
    let mut cells: Vec<(usize, u64)> = cfg
        .n_ladder
        .iter()
        .flat_map(|&n| (0..cfg.seeds_per_n).map(move |i| (n, cell_seed(cfg.master_seed, n, i))))
        .collect();
    cells.sort_unstable();

    let existing = match &cfg.output {
        Some(p) => read_existing(p)?,
        None => BTreeMap::new(),
    };
    let todo: Vec<(usize, u64)> = cells.iter().copied().filter(|c| !existing.contains_key(c)).collect();
    let reused = cells.len() - todo.len();

    let sink = match &cfg.output {
        Some(p) => {
            let fresh = existing.is_empty();
            let mut f = OpenOptions::new().create(true).write(true).truncate(fresh).append(!fresh).open(p)?;
            if fresh {
                writeln!(f, "{SWEEP_HEADER}")?;
            } else {
                // Rewrite only the reusable rows so the append stream starts clean.
                let mut tmp = String::from(SWEEP_HEADER);
                tmp.push('\n');
                for r in existing.values() {
                    tmp.push_str(&r.to_csv_line());
                    tmp.push('\n');
                }
                std::fs::write(p, tmp)?;
                f = OpenOptions::new().append(true).open(p)?;
            }
            let log = OpenOptions::new().create(true).append(true).open(sidecar(p))?;
            Some(Mutex::new((f, log)))
        }
        None => None,
    };

    let fresh_rows: Vec<SweepRow> = todo
        .par_iter()
        .map(|&(n, seed)| {
            let start = Instant::now();
            let row = run_cell(&dist, n, seed, cfg);
            if let Some(sink) = &sink {
                let mut guard = sink.lock().unwrap();
                let (f, log) = &mut *guard;
                let _ = writeln!(f, "{}", row.to_csv_line()).and_then(|_| f.flush());
                let _ = writeln!(
                    log,
                    "{} n={} seed={} status={} secs={:.3}",
                    now_secs(),
                    n,
                    seed,
                    row.status.as_str(),
                    start.elapsed().as_secs_f64()
                );
            }
            row
        })
        .collect();

    let mut all: BTreeMap<(usize, u64), SweepRow> = existing;
    let mut tails = Vec::new();
    for r in fresh_rows {
        for &(a, v) in &r.tails {
            tails.push((r.n, r.seed, a, v));
        }
        all.insert((r.n, r.seed), r);
    }
    let rows: Vec<SweepRow> = cells.iter().filter_map(|c| all.remove(c)).collect();
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.status == CellStatus::Ok)
        .filter_map(|r| r.pi_min.map(|p| ((r.n as f64).ln(), (1.0 / p).ln())))
        .collect();
    let distinct_n = rows.iter().filter(|r| r.status == CellStatus::Ok).map(|r| r.n).collect::<std::collections::BTreeSet<_>>();
    let fit = if distinct_n.len() >= 2 { least_squares(&pts) } else { None };
    let summary = SweepSummary { rows, fit, fit_points: pts.len(), reused };

    if let Some(p) = &cfg.output {
        drop(sink);
        let tmp = p.with_extension("csv.tmp");
        std::fs::write(&tmp, summary.to_csv())?;
        std::fs::rename(&tmp, p)?;
        if !cfg.measurements.empirical_tail.is_empty() && !tails.is_empty() {
            tails.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
            let mut s = String::from("n,seed,alpha,tail\n");
            for (n, seed, a, v) in tails {
                s.push_str(&format!("{n},{seed},{a},{v:.17e}\n"));
            }
            std::fs::write(p.with_extension("tail.csv"), s)?;
        }
    }
    Ok(summary)
}

fn sidecar(p: &Path) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".log");
    PathBuf::from(s)
}
