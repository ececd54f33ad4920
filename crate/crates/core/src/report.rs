//! Sweeps over quantum numbers, reconciliation of the analytic, oracle and
//! eigensolver routes, and CSV/JSON serialization.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, Provenance, UncertaintyRecord};
use crate::eigen::{self, EigenResult};
use crate::model::{predicted_node_count, validate_state, StateIndex, SystemKind, SystemSpec};
use crate::nodes::{self, count_nodes, NodePolicy};
use crate::oracle::{self, default_grid, GridSpec};
use crate::{Error, Result};

/// Slack allowed below ℏ/2 before a row counts as violating the bound.
pub const BOUND_SLACK: f64 = 1e-12;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

pub const CSV_HEADER: &str = "system,level,nodes_predicted,nodes_counted,energy,delta_q,delta_p,product,bound,satisfied,path,disagreement";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub spec: SystemSpec<f64>,
    pub lo: i64,
    pub hi: i64,
    /// Sorted, without duplicates.
    pub paths: Vec<Provenance>,
    pub grid_points: Option<usize>,
    pub tolerance: f64,
    pub parallel: bool,
    /// Self-test hook: lowers the first path's product at this level by ℏ/4.
    pub corrupt_level: Option<i64>,
}

impl SweepConfig {
    pub fn new(spec: SystemSpec<f64>, lo: i64, hi: i64, paths: &[Provenance]) -> Result<Self> {
        let mut paths = paths.to_vec();
        paths.sort();
        paths.dedup();
        let cfg = Self { spec, lo, hi, paths, grid_points: None, tolerance: DEFAULT_TOLERANCE, parallel: true, corrupt_level: None };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_grid_points(mut self, points: Option<usize>) -> Result<Self> {
        self.grid_points = points;
        self.validate()?;
        Ok(self)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        self.tolerance = tolerance;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lo > self.hi {
            return Err(Error::Config(format!("empty level range {}:{}", self.lo, self.hi)));
        }
        for level in [self.lo, self.hi] {
            validate_state(&self.spec, StateIndex::new(level)).map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.paths.is_empty() {
            return Err(Error::Config("at least one path must be selected".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Config(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if let Some(points) = self.grid_points {
            default_grid(&self.spec, self.hi, Some(points)).map_err(|e| Error::Config(e.to_string()))?;
        }
        if let Some(level) = self.corrupt_level {
            if !(self.lo..=self.hi).contains(&level) {
                return Err(Error::Config(format!("corrupted level {level} outside {}:{}", self.lo, self.hi)));
            }
        }
        Ok(())
    }

    fn max_abs_level(&self) -> i64 {
        self.lo.abs().max(self.hi.abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub system: SystemKind,
    pub level: i64,
    pub nodes_predicted: usize,
    pub nodes_counted: Option<usize>,
    pub energy: f64,
    /// Δx, or Δθ for ring rows.
    pub delta_q: f64,
    /// Δp, or ΔL_z for ring rows.
    pub delta_p: f64,
    pub product: f64,
    pub bound: f64,
    /// `None` for ring rows, where no bound is asserted.
    pub satisfied: Option<bool>,
    pub path: Provenance,
    pub disagreement: Option<f64>,
}

impl SweepRow {
    fn from_record(kind: SystemKind, level: i64, r: &UncertaintyRecord<f64>) -> Self {
        Self {
            system: kind,
            level,
            nodes_predicted: r.nodes_predicted,
            nodes_counted: r.nodes_counted,
            energy: r.energy,
            delta_q: r.delta_q,
            delta_p: r.delta_p,
            product: r.product,
            bound: r.bound,
            satisfied: None,
            path: r.provenance,
            disagreement: None,
        }
    }

    fn fields(&self) -> [f64; 4] {
        [self.energy, self.delta_q, self.delta_p, self.product]
    }
}

/// `|a − b| / max(|b|, 1)`, maximized over energy, Δq, Δp and product.
pub fn relative_disagreement(a: &SweepRow, reference: &SweepRow) -> f64 {
    a.fields().iter().zip(reference.fields()).fold(0.0, |acc, (x, r)| acc.max((x - r).abs() / r.abs().max(1.0)))
}

/// Measured node count of the closed-form state sampled on `grid`.
fn analytic_nodes(spec: &SystemSpec<f64>, level: i64, grid: &GridSpec<f64>) -> Result<usize> {
    let psi = oracle::sample_state(spec, level, grid)?;
    Ok(count_nodes(&psi.real_part(), grid, NodePolicy::for_grid(grid))?.count)
}

fn eigen_record(cfg: &SweepConfig, solved: &EigenResult<f64>, level: i64) -> Result<UncertaintyRecord<f64>> {
    let spec = &cfg.spec;
    match spec.kind() {
        SystemKind::Ring => {
            let psi = eigen::ring_lz_eigenstate(solved, level, spec.hbar())?;
            let mut r = oracle::sampled_uncertainties(spec, &psi, predicted_node_count(spec, StateIndex::new(level)), Provenance::Eigen)?;
            let am = level.unsigned_abs() as usize;
            r.energy = if am == 0 { solved.energies[0] } else { 0.5 * (solved.energies[2 * am - 1] + solved.energies[2 * am]) };
            Ok(r)
        }
        SystemKind::Box => eigen::eigen_uncertainties(spec, solved, (level - 1) as usize),
        SystemKind::Oscillator => eigen::eigen_uncertainties(spec, solved, level as usize),
    }
}

fn eigen_grid(cfg: &SweepConfig) -> Result<GridSpec<f64>> {
    default_grid(&cfg.spec, cfg.max_abs_level(), cfg.grid_points)
}

fn solve_for_sweep(cfg: &SweepConfig) -> Result<Option<EigenResult<f64>>> {
    if !cfg.paths.contains(&Provenance::Eigen) {
        return Ok(None);
    }
    let grid = eigen_grid(cfg)?;
    let h = eigen::build_hamiltonian(&cfg.spec, &grid)?;
    let k = eigen::levels_needed(cfg.spec.kind(), cfg.max_abs_level());
    eigen::solve_lowest(&h, k).map(Some).map_err(|e| e.at_level(cfg.hi))
}

fn level_rows(cfg: &SweepConfig, solved: Option<&EigenResult<f64>>, level: i64) -> Result<Vec<SweepRow>> {
    let spec = &cfg.spec;
    let kind = spec.kind();
    let grid = default_grid(spec, level, cfg.grid_points)?;
    let mut rows = Vec::with_capacity(cfg.paths.len());
    for path in &cfg.paths {
        let record = match path {
            Provenance::Analytic => {
                let mut r = analytic::uncertainties(spec, level)?;
                r.nodes_counted = Some(analytic_nodes(spec, level, &grid)?);
                r
            }
            Provenance::Oracle => oracle::oracle_uncertainties(spec, StateIndex::new(level), Some(&grid))?,
            Provenance::Eigen => eigen_record(cfg, solved.expect("eigenpairs solved before the sweep"), level)?,
        };
        rows.push(SweepRow::from_record(kind, level, &record));
    }
    Ok(rows)
}

/// One row per (level, path), ordered by level then path.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let solved = solve_for_sweep(cfg)?;
    let levels: Vec<i64> = (cfg.lo..=cfg.hi).collect();
    let eval = |&level: &i64| level_rows(cfg, solved.as_ref(), level).map_err(|e| e.at_level(level));
    let per_level: Vec<Result<Vec<SweepRow>>> =
        if cfg.parallel { levels.par_iter().map(eval).collect() } else { levels.iter().map(eval).collect() };

    let mut rows = Vec::with_capacity(levels.len() * cfg.paths.len());
    for result in per_level {
        let mut level_rows = result?;
        if Some(level_rows[0].level) == cfg.corrupt_level {
            level_rows[0].product -= cfg.spec.hbar() / 4.0;
        }
        let reference = level_rows[0].clone();
        let disagreement =
            (level_rows.len() > 1).then(|| level_rows[1..].iter().fold(0.0, |acc: f64, r| acc.max(relative_disagreement(r, &reference))));
        for row in &mut level_rows {
            row.satisfied = (row.system != SystemKind::Ring).then_some(row.product >= row.bound - BOUND_SLACK);
            row.disagreement = disagreement;
        }
        rows.extend(level_rows);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOutcome {
    pub rows: Vec<SweepRow>,
    pub failures: Vec<String>,
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs the sweep and checks the Heisenberg bound (box and oscillator), the
/// node laws and cross-path agreement within `cfg.tolerance`.
pub fn verify(cfg: &SweepConfig) -> Result<VerifyOutcome> {
    if cfg.paths.len() < 2 {
        return Err(Error::Config("verify needs at least two paths to compare".into()));
    }
    let rows = run_sweep(cfg)?;
    let mut failures = Vec::new();
    for r in &rows {
        let at = format!("{} level {} path {}", r.system, r.level, r.path.tag());
        if r.satisfied == Some(false) {
            failures.push(format!("{at}: product {:e} below bound {:e}", r.product, r.bound));
        }
        if r.nodes_counted != Some(r.nodes_predicted) {
            failures.push(format!("{at}: counted {:?} nodes, predicted {}", r.nodes_counted, r.nodes_predicted));
        }
        if let Some(d) = r.disagreement {
            if d > cfg.tolerance && r.path == cfg.paths[0] {
                failures.push(format!("{at}: paths disagree by {d:e} (tolerance {:e})", cfg.tolerance));
            }
        }
    }
    Ok(VerifyOutcome { rows, failures })
}

// ---------------------------------------------------------------------------
// serialization

/// `v` with 12 significant digits: fixed notation for exponents in
/// `[-4, 12)`, scientific otherwise.
pub fn format_sig12(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.11e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-4..12).contains(&exp) {
        format!("{v:.*}", (11 - exp) as usize)
    } else {
        sci
    }
}

pub trait CsvRecord {
    fn header() -> &'static str;
    fn csv_line(&self) -> String;
}

impl CsvRecord for SweepRow {
    fn header() -> &'static str {
        CSV_HEADER
    }

    fn csv_line(&self) -> String {
        let satisfied = match self.satisfied {
            Some(true) => "true",
            Some(false) => "false",
            None => "n/a",
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.system,
            self.level,
            self.nodes_predicted,
            self.nodes_counted.map(|c| c.to_string()).unwrap_or_default(),
            format_sig12(self.energy),
            format_sig12(self.delta_q),
            format_sig12(self.delta_p),
            format_sig12(self.product),
            format_sig12(self.bound),
            satisfied,
            self.path.tag(),
            self.disagreement.map(format_sig12).unwrap_or_default(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub path: Provenance,
    pub lower: f64,
    pub upper: f64,
    pub points: usize,
    pub boundary: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub disagreement: f64,
    pub bound_slack: f64,
    pub normalization: f64,
    pub resolution: f64,
    pub zero_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub system: SystemKind,
    pub units: BTreeMap<String, f64>,
    pub grids: Vec<GridInfo>,
    pub tolerances: Tolerances,
    pub version: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub conventions: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<R> {
    pub metadata: Metadata,
    pub rows: Vec<R>,
}

fn grid_info(path: Provenance, grid: &GridSpec<f64>, note: Option<String>) -> GridInfo {
    GridInfo {
        path,
        lower: grid.lower(),
        upper: grid.upper(),
        points: grid.points(),
        boundary: format!("{:?}", grid.boundary()).to_lowercase(),
        note,
    }
}

pub fn metadata(
    spec: &SystemSpec<f64>,
    max_level: i64,
    grid_points: Option<usize>,
    paths: &[Provenance],
    tolerance: f64,
) -> Result<Metadata> {
    let mut grids = Vec::new();
    for &path in paths {
        let grid = default_grid(spec, max_level, grid_points)?;
        let note = match (spec.kind(), path) {
            (SystemKind::Oscillator, Provenance::Analytic | Provenance::Oracle) => {
                Some("half-width max(8*sqrt(2n+1), 12)*sqrt(hbar/(m*omega)) per level; bounds shown for the highest level".to_string())
            }
            (_, Provenance::Analytic) => Some("used for node counting only".to_string()),
            _ => None,
        };
        grids.push(grid_info(path, &grid, note));
    }
    let mut conventions = BTreeMap::new();
    if spec.kind() == SystemKind::Ring {
        conventions.insert(
            "delta_q".to_string(),
            "delta_theta: naive interval standard deviation on the branch [0, 2pi); convention-dependent".to_string(),
        );
        conventions.insert("satisfied".to_string(), "no bound asserted for ring rows".to_string());
        conventions.insert("nodes".to_string(), "sign changes of Re(psi) over one period".to_string());
    }
    Ok(Metadata {
        system: spec.kind(),
        units: spec.parameters().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        grids,
        tolerances: Tolerances {
            disagreement: tolerance,
            bound_slack: BOUND_SLACK,
            normalization: oracle::NORMALIZATION_TOL,
            resolution: oracle::RESOLUTION_TOL,
            zero_threshold: nodes::ZERO_THRESHOLD,
        },
        version: env!("CARGO_PKG_VERSION").to_string(),
        conventions,
    })
}

pub fn sweep_metadata(cfg: &SweepConfig) -> Result<Metadata> {
    metadata(&cfg.spec, cfg.max_abs_level(), cfg.grid_points, &cfg.paths, cfg.tolerance)
}

/// Serializes rows as CSV (header plus one line per row) or as a JSON
/// object `{metadata, rows}`.
pub fn emit<R: CsvRecord + Serialize>(rows: &[R], format: Format, metadata: &Metadata) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Output("no rows to emit".into()));
    }
    match format {
        Format::Csv => {
            let mut out = String::with_capacity(128 * (rows.len() + 1));
            out.push_str(R::header());
            out.push('\n');
            for r in rows {
                let _ = writeln!(out, "{}", r.csv_line());
            }
            Ok(out)
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Borrowed<'a, R> {
                metadata: &'a Metadata,
                rows: &'a [R],
            }
            let mut s = serde_json::to_string_pretty(&Borrowed { metadata, rows }).map_err(|e| Error::Output(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
    }
}

pub fn parse_json_report<R: for<'de> Deserialize<'de>>(text: &str) -> Result<Report<R>> {
    serde_json::from_str(text).map_err(|e| Error::Output(e.to_string()))
}

// ---------------------------------------------------------------------------
// eigensolve and nodes tables

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRow {
    pub system: SystemKind,
    pub index: usize,
    /// `n`, or `|m|` for the ring.
    pub level: i64,
    pub energy: f64,
    pub exact: f64,
    /// Absolute error where the exact energy is zero.
    pub relative_error: f64,
    pub residual: f64,
    pub nodes_predicted: usize,
    pub nodes_counted: usize,
}

impl CsvRecord for EigenRow {
    fn header() -> &'static str {
        "system,index,level,energy,exact,relative_error,residual,nodes_predicted,nodes_counted"
    }

    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.system,
            self.index,
            self.level,
            format_sig12(self.energy),
            format_sig12(self.exact),
            format_sig12(self.relative_error),
            format_sig12(self.residual),
            self.nodes_predicted,
            self.nodes_counted
        )
    }
}

/// The `k` lowest finite-difference levels against the closed-form energies.
pub fn eigensolve_table(spec: &SystemSpec<f64>, k: usize, grid_points: Option<usize>) -> Result<Vec<EigenRow>> {
    if k == 0 {
        return Err(Error::Config("need at least one level".into()));
    }
    let kind = spec.kind();
    let top = eigen::level_for_index(kind, k - 1);
    let grid = default_grid(spec, top, grid_points).map_err(|e| Error::Config(e.to_string()))?;
    let h = eigen::build_hamiltonian(spec, &grid)?;
    let solved = eigen::solve_lowest(&h, k)?;
    (0..k)
        .map(|index| {
            let level = eigen::level_for_index(kind, index);
            let exact = analytic::energy(spec, level)?;
            let energy = solved.energies[index];
            let state = &solved.states[index];
            let nodes = count_nodes(&state.real_part(), &grid, NodePolicy::for_grid(&grid))?;
            Ok(EigenRow {
                system: kind,
                index,
                level,
                energy,
                exact,
                relative_error: if exact == 0.0 { (energy - exact).abs() } else { (energy - exact).abs() / exact.abs() },
                residual: solved.residuals[index],
                nodes_predicted: predicted_node_count(spec, StateIndex::new(level)),
                nodes_counted: nodes.count,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRow {
    pub system: SystemKind,
    pub level: i64,
    pub path: Provenance,
    pub nodes_predicted: usize,
    pub nodes_counted: usize,
    pub boundary_excluded: usize,
    pub locations: Vec<f64>,
}

impl CsvRecord for NodeRow {
    fn header() -> &'static str {
        "system,level,path,nodes_predicted,nodes_counted,boundary_excluded,locations"
    }

    fn csv_line(&self) -> String {
        let locations: Vec<String> = self.locations.iter().map(|&x| format_sig12(x)).collect();
        format!(
            "{},{},{},{},{},{},{}",
            self.system,
            self.level,
            self.path.tag(),
            self.nodes_predicted,
            self.nodes_counted,
            self.boundary_excluded,
            locations.join(";")
        )
    }
}

/// Node reports of sampled states; `path` selects closed-form samples
/// (analytic/oracle) or finite-difference eigenvectors (eigen).
pub fn node_table(cfg: &SweepConfig) -> Result<Vec<NodeRow>> {
    cfg.validate()?;
    let solved = solve_for_sweep(cfg)?;
    let spec = &cfg.spec;
    let mut rows = Vec::new();
    for level in cfg.lo..=cfg.hi {
        for &path in &cfg.paths {
            let (psi, grid) = match path {
                Provenance::Eigen => {
                    let solved = solved.as_ref().expect("eigenpairs solved before the sweep");
                    let psi = match spec.kind() {
                        SystemKind::Ring => eigen::ring_lz_eigenstate(solved, level, spec.hbar()),
                        SystemKind::Box => Ok(solved.states[(level - 1) as usize].clone()),
                        SystemKind::Oscillator => Ok(solved.states[level as usize].clone()),
                    }
                    .map_err(|e| e.at_level(level))?;
                    let grid = *psi.grid();
                    (psi, grid)
                }
                _ => {
                    let grid = default_grid(spec, level, cfg.grid_points)?;
                    (oracle::sample_state(spec, level, &grid).map_err(|e| e.at_level(level))?, grid)
                }
            };
            let report = count_nodes(&psi.real_part(), &grid, NodePolicy::for_grid(&grid)).map_err(|e| e.at_level(level))?;
            rows.push(NodeRow {
                system: spec.kind(),
                level,
                path,
                nodes_predicted: predicted_node_count(spec, StateIndex::new(level)),
                nodes_counted: report.count,
                boundary_excluded: report.boundary_excluded,
                locations: report.locations,
            });
        }
    }
    Ok(rows)
}
