//! Experiment orchestration: disorder draws, the two-stage quench over a
//! (realization, T0) job list, saturation growth, Haar baselines, and the
//! files written for each run.

pub mod config;
pub mod table;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use config::{
    averaged_saturation_times, default_t0_grid, Case, ExperimentConfig, InitialStateKind, PhenoParams, Predict,
    SATURATION_TIME,
};
pub use table::{standard_error, ResultTable, Row};

use crate::entropy::{hcee, wre, EntanglementRecord, WrePath, LN_6PI};
use crate::error::{Error, Result};
use crate::evolve::{cache, diagonalize_where, prepare_structured, EigenSystem, Propagator};
use crate::exec::Exec;
use crate::hilbert::{haar_random, make_random_half_filled, make_xy_alternating, PureState, SubsetMask};
use crate::liom::{
    fit_gge, g_av, gge_probabilities, gge_saturation_entropies_with, m_av, nn_connected, scrooge_wre_with,
    GgeFitRecord, GgePrediction, ScroogeEstimate, SignConvention,
};
use crate::models::{build_pheno_diagonal, build_xxz_matrix, sample_pheno, sample_xxz, DisorderRealization};
use crate::rng::SeededRng;

pub const PREP_STREAM: u64 = 0;

pub fn target_stream(k: usize) -> u64 {
    1 + k as u64
}

pub fn state_stream(k: usize) -> u64 {
    (1 << 32) + k as u64
}

pub fn scrooge_stream(k: usize, t0_index: usize) -> u64 {
    (2 << 32) + ((k as u64) << 20) + t0_index as u64
}

pub const HAAR_STREAM: u64 = 3 << 32;

const NORM_TOLERANCE: f64 = 1e-10;
const ENTROPY_TOLERANCE: f64 = 1e-9;

/// Per-realization inputs of the quench.
#[derive(Clone, Debug)]
pub struct Realization {
    pub index: usize,
    pub psi0: PureState,
    pub convention: SignConvention,
    pub target: Propagator,
    pub disorder: DisorderRealization,
}

/// Everything sampled and diagonalized before the job list runs.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub prep: Propagator,
    pub prep_disorder: DisorderRealization,
    pub realizations: Vec<Realization>,
}

fn initial_state(config: &ExperimentConfig, k: usize) -> Result<PureState> {
    match config.initial_state_kind {
        InitialStateKind::RandomZHalfFilled => {
            make_random_half_filled(&mut SeededRng::new(config.seed, state_stream(k)), config.n_sites)
        }
        InitialStateKind::XyAlternating => make_xy_alternating(config.n_sites),
    }
}

fn sector_signature(sectors: &[bool]) -> String {
    sectors.iter().enumerate().filter(|(_, &b)| b).map(|(n, _)| n.to_string()).collect::<Vec<_>>().join("-")
}

fn cached_diagonalize(
    matrix: &crate::models::HamiltonianMatrix,
    sectors: &[bool],
    disorder: &DisorderRealization,
    cache_dir: Option<&Path>,
) -> Result<EigenSystem> {
    let keep = |s: &crate::hilbert::Sector| sectors[s.n_up];
    let Some(dir) = cache_dir else {
        return diagonalize_where(matrix, keep);
    };
    let mut h = Sha256::new();
    h.update(disorder.hash());
    h.update(sector_signature(sectors));
    let key = hex::encode(h.finalize());
    let path = dir.join(format!("{key}.eig"));
    if let Some(eig) = cache::load(&path, &key)? {
        log::debug!("eigen cache hit {}", path.display());
        return Ok(eig);
    }
    let eig = diagonalize_where(matrix, keep)?;
    std::fs::create_dir_all(dir)?;
    cache::save(&path, &eig, &key)?;
    Ok(eig)
}

impl Experiment {
    /// Samples the preparation and target Hamiltonians and diagonalizes them
    /// on the magnetization sectors the initial states occupy.
    pub fn setup(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let l = config.n_sites;
        let psi0s = (0..config.realizations).map(|k| initial_state(config, k)).collect::<Result<Vec<_>>>()?;
        let mut sectors = vec![false; l + 1];
        for psi in &psi0s {
            for (n, w) in psi.sector_weights().into_iter().enumerate() {
                sectors[n] |= w > 0.0;
            }
        }
        let cache_dir = config.eigen_cache_dir.as_deref();

        let prep_spec = sample_xxz(&mut SeededRng::new(config.seed, PREP_STREAM), l, config.jz, config.w_prep)?;
        let prep_disorder = DisorderRealization::from_xxz(&prep_spec, config.seed, PREP_STREAM);
        let prep_eig = cached_diagonalize(&build_xxz_matrix(&prep_spec)?, &sectors, &prep_disorder, cache_dir)?;
        let prep = Propagator::Spectral(prep_eig);

        let targets = config.exec.map(config.realizations, |k| -> Result<(Propagator, DisorderRealization)> {
            let stream = target_stream(k);
            let mut rng = SeededRng::new(config.seed, stream);
            match config.case {
                Case::I | Case::III => {
                    let w = config.target_w().ok_or_else(|| Error::InvalidInput("missing target W".into()))?;
                    let spec = sample_xxz(&mut rng, l, config.jz, w)?;
                    let disorder = DisorderRealization::from_xxz(&spec, config.seed, stream);
                    let eig = cached_diagonalize(&build_xxz_matrix(&spec)?, &sectors, &disorder, cache_dir)?;
                    Ok((Propagator::Spectral(eig), disorder))
                }
                Case::II => {
                    let p = config.pheno;
                    let spec = sample_pheno(&mut rng, l, p.j0, p.xi, p.g0)?;
                    let disorder = DisorderRealization::from_pheno(&spec, config.seed, stream);
                    Ok((Propagator::Diagonal(build_pheno_diagonal(&spec)?), disorder))
                }
            }
        });
        let realizations = targets
            .into_iter()
            .zip(psi0s)
            .enumerate()
            .map(|(index, (t, psi0))| {
                let (target, disorder) = t?;
                Ok(Realization { index, convention: SignConvention::from_reference(&psi0), psi0, target, disorder })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { config: config.clone(), prep, prep_disorder, realizations })
    }

    /// Disorder hashes keyed by `prep` and `target_<k>`.
    pub fn disorder_hashes(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("prep".to_string(), self.prep_disorder.hash());
        for r in &self.realizations {
            m.insert(format!("target_{}", r.index), r.disorder.hash());
        }
        m
    }

    fn jobs(&self) -> Vec<(usize, usize)> {
        let n_t0 = self.config.t0_grid.len();
        (0..self.realizations.len()).flat_map(|k| (0..n_t0).map(move |i| (k, i))).collect()
    }

    fn inner_exec(&self, n_jobs: usize) -> Exec {
        if n_jobs > 1 {
            Exec::Sequential
        } else {
            self.config.exec
        }
    }

    fn measure(&self, state: &PureState, t: f64, exec: Exec) -> Result<EntanglementRecord> {
        let c = &self.config;
        check_norm(state)?;
        let rec = EntanglementRecord::measure(state, t, &c.n_list, c.wre_path, c.wre_fast_cap, exec)?;
        check_bounds(&rec, c.n_sites)?;
        Ok(rec)
    }

    fn saturation(&self, r: &Realization, ini: &PureState, exec: Exec) -> Result<EntanglementRecord> {
        let states = r.target.evolve_many(ini, &self.config.saturation_times)?;
        let recs = states
            .iter()
            .zip(&self.config.saturation_times)
            .map(|(s, &t)| self.measure(s, t, exec))
            .collect::<Result<Vec<_>>>()?;
        EntanglementRecord::mean(&recs).ok_or_else(|| Error::InvalidInput("no saturation times".into()))
    }

    fn predict(&self, k: usize, t0_index: usize, ini: &PureState, exec: Exec) -> Option<Prediction> {
        let c = &self.config;
        if !c.predict.gge() {
            return None;
        }
        let targets_m = ini.magnetizations();
        let targets_c = nn_connected(ini);
        let params = match fit_gge(&targets_m, &targets_c) {
            Ok(p) => p,
            Err(e) => {
                log::warn!("GGE fit failed for realization {k}, T0 = {}: {e}", c.t0_grid[t0_index]);
                return None;
            }
        };
        let ens = gge_probabilities(&params);
        let gge = gge_saturation_entropies_with(&ens, exec);
        let scrooge = if c.predict.scrooge() {
            let mut rng = SeededRng::new(c.seed, scrooge_stream(k, t0_index));
            match scrooge_wre_with(&ens, &mut rng, c.scrooge_samples, exec) {
                Ok(s) => Some(s),
                Err(e) => {
                    log::warn!("Scrooge estimate failed for realization {k}: {e}");
                    None
                }
            }
        } else {
            None
        };
        Some(Prediction { fit: GgeFitRecord { targets_m, targets_c, params }, gge, scrooge })
    }

    fn run_job(&self, k: usize, t0_index: usize, trace: bool, exec: Exec) -> Result<JobResult> {
        let r = &self.realizations[k];
        let t0 = self.config.t0_grid[t0_index];
        let ini = prepare_structured(&r.psi0, &self.prep, t0)?;
        let start = self.measure(&ini, 0.0, exec)?;
        let saturated = self.saturation(r, &ini, exec)?;
        let records = if trace {
            let states = r.target.evolve_many(&ini, &self.config.time_grid)?;
            states
                .iter()
                .zip(&self.config.time_grid)
                .map(|(s, &t)| {
                    let mut rec = self.measure(s, t, exec)?;
                    rec.normalize(&start, &saturated);
                    Ok(rec)
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        Ok(JobResult {
            realization: k,
            t0_index,
            m_av: m_av(&ini, &r.convention)?,
            g_av: g_av(&ini, &r.convention)?,
            prediction: self.predict(k, t0_index, &ini, exec),
            start,
            saturated,
            records,
        })
    }

    fn run_jobs(&self, trace: bool) -> (Vec<JobResult>, Vec<Aborted>) {
        let jobs = self.jobs();
        let inner = self.inner_exec(jobs.len());
        let results = self.config.exec.map(jobs.len(), |j| {
            let (k, i) = jobs[j];
            self.run_job(k, i, trace, inner)
        });
        let mut done = Vec::new();
        let mut aborted: Vec<Aborted> = Vec::new();
        for ((k, i), res) in jobs.iter().zip(results) {
            match res {
                Ok(r) => done.push(r),
                Err(e) => {
                    let t0 = self.config.t0_grid[*i];
                    log::error!("realization {k} aborted at T0 = {t0}: {e}");
                    if !aborted.iter().any(|a| a.realization == *k) {
                        aborted.push(Aborted { realization: *k, t0, message: e.to_string() });
                    }
                }
            }
        }
        done.retain(|r| !aborted.iter().any(|a| a.realization == r.realization));
        (done, aborted)
    }

    /// Time traces for every (realization, T0), r-normalized against the
    /// t = 0 value and the saturation estimate.
    pub fn dynamics(&self) -> Outcome {
        let (results, aborted) = self.run_jobs(true);
        let mut table = self.empty_table();
        for res in &results {
            for rec in &res.records {
                let mut row = RowBuilder::new(&table, res.realization, self.config.t0_grid[res.t0_index]);
                row.record(rec, &self.config.n_list);
                row.common(res);
                table.rows.push(row.finish());
            }
        }
        Outcome { table, fits: fit_records(&results), aborted }
    }

    /// Saturation growth `Delta S = S(inf) - S(0)` for every (realization, T0).
    pub fn growth(&self) -> Outcome {
        let (results, aborted) = self.run_jobs(false);
        let mut table = self.empty_table();
        for res in &results {
            let mut row = RowBuilder::new(&table, res.realization, self.config.t0_grid[res.t0_index]);
            row.record(&res.saturated, &self.config.n_list);
            row.common(res);
            row.set("S_HC_0", Some(res.start.s_hc));
            row.set("S_W_0", res.start.s_w);
            row.set("dS_HC", Some(res.saturated.s_hc - res.start.s_hc));
            row.set("dS_W", res.saturated.s_w.zip(res.start.s_w).map(|(a, b)| a - b));
            table.rows.push(row.finish());
        }
        Outcome { table, fits: fit_records(&results), aborted }
    }

    fn empty_table(&self) -> ResultTable {
        ResultTable::new(self.config.case, self.config.n_sites, table::value_columns(&self.config.n_list))
    }
}

#[derive(Clone, Debug)]
struct Prediction {
    fit: GgeFitRecord,
    gge: GgePrediction,
    scrooge: Option<ScroogeEstimate>,
}

#[derive(Clone, Debug)]
struct JobResult {
    realization: usize,
    t0_index: usize,
    m_av: f64,
    g_av: f64,
    prediction: Option<Prediction>,
    start: EntanglementRecord,
    saturated: EntanglementRecord,
    records: Vec<EntanglementRecord>,
}

/// A realization dropped after an invariant violation or solver failure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aborted {
    pub realization: usize,
    #[serde(rename = "T0")]
    pub t0: f64,
    pub message: String,
}

/// GGE fit of one (realization, T0) job.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitEntry {
    pub realization: usize,
    #[serde(rename = "T0")]
    pub t0: f64,
    #[serde(flatten)]
    pub record: GgeFitRecord,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub table: ResultTable,
    pub fits: Vec<(usize, usize, GgeFitRecord)>,
    pub aborted: Vec<Aborted>,
}

fn fit_records(results: &[JobResult]) -> Vec<(usize, usize, GgeFitRecord)> {
    results
        .iter()
        .filter_map(|r| r.prediction.as_ref().map(|p| (r.realization, r.t0_index, p.fit.clone())))
        .collect()
}

struct RowBuilder<'a> {
    table: &'a ResultTable,
    row: Row,
}

impl<'a> RowBuilder<'a> {
    fn new(table: &'a ResultTable, realization: usize, t0: f64) -> Self {
        let values = vec![None; table.columns.len()];
        Self { table, row: Row { realization: Some(realization), t0, values } }
    }

    fn set(&mut self, column: &str, v: Option<f64>) {
        if let Some(k) = self.table.column_index(column) {
            self.row.values[k] = v;
        }
    }

    fn record(&mut self, rec: &EntanglementRecord, n_list: &[usize]) {
        self.set("t", Some(rec.t));
        self.set("S_HC", Some(rec.s_hc));
        self.set("S_W", rec.s_w);
        self.set("r_HC", rec.r_hc);
        self.set("r_W", rec.r_w);
        for (i, n) in n_list.iter().enumerate() {
            self.set(&format!("S_{n}Q"), Some(rec.s_nq[i].1));
            self.set(&format!("r_{n}Q"), rec.r_nq[i]);
        }
    }

    fn common(&mut self, res: &JobResult) {
        self.set("m_av", Some(res.m_av));
        self.set("G_av", Some(res.g_av));
        if let Some(p) = &res.prediction {
            self.set("S_HC_pred_gge", Some(p.gge.s_hc));
            self.set("S_W_pred_gge", Some(p.gge.s_w));
            if let Some(s) = &p.scrooge {
                self.set("S_W_pred_scrooge", Some(s.mean));
                self.set("S_W_pred_scrooge_stderr", Some(s.std_error));
            }
        }
    }

    fn finish(self) -> Row {
        self.row
    }
}

fn check_norm(state: &PureState) -> Result<()> {
    let drift = (state.norm() - 1.0).abs();
    if drift > NORM_TOLERANCE {
        return Err(Error::Invariant(format!("norm drift {drift:e} exceeds {NORM_TOLERANCE:e}")));
    }
    Ok(())
}

fn check_range(name: &str, s: f64, lo: f64, hi: f64) -> Result<()> {
    if !(s >= lo - ENTROPY_TOLERANCE && s <= hi + ENTROPY_TOLERANCE) {
        return Err(Error::Invariant(format!("{name} = {s} outside [{lo}, {hi}]")));
    }
    Ok(())
}

fn check_bounds(rec: &EntanglementRecord, l: usize) -> Result<()> {
    let ln2 = std::f64::consts::LN_2;
    check_range("S_HC", rec.s_hc, 0.0, (l / 2) as f64 * ln2)?;
    for &(n, s) in &rec.s_nq {
        check_range(&format!("S_{n}Q"), s, 0.0, n.min(l - n) as f64 * ln2)?;
    }
    if let Some(s) = rec.s_w {
        let lo = l as f64 * (LN_6PI - ln2);
        check_range("S_W", s, lo, l as f64 * LN_6PI)?;
    }
    Ok(())
}

/// Haar-random reference values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HaarBaseline {
    #[serde(rename = "L")]
    pub n_sites: usize,
    pub n_samples: usize,
    pub purity_hc: f64,
    pub purity_hc_stderr: f64,
    #[serde(rename = "S_HC")]
    pub s_hc: f64,
    #[serde(rename = "S_HC_stderr")]
    pub s_hc_stderr: f64,
    #[serde(rename = "S_W")]
    pub s_w: Option<f64>,
    #[serde(rename = "S_W_stderr")]
    pub s_w_stderr: Option<f64>,
}

/// Average purity of a subsystem of dimension `d_a` in a Haar state of
/// dimension `d_a d_b`.
pub fn haar_mean_purity(d_a: f64, d_b: f64) -> f64 {
    (d_a + d_b) / (d_a * d_b + 1.0)
}

pub fn haar_baseline(rng: &mut SeededRng, n_sites: usize, n_samples: usize) -> Result<HaarBaseline> {
    haar_baseline_with(rng, n_sites, n_samples, WrePath::Naive, Exec::default())
}

pub fn haar_baseline_with(
    rng: &mut SeededRng,
    n_sites: usize,
    n_samples: usize,
    path: WrePath,
    exec: Exec,
) -> Result<HaarBaseline> {
    if n_samples < 10 {
        return Err(Error::InvalidInput(format!("Haar baseline needs at least 10 samples, got {n_samples}")));
    }
    if n_sites < 2 || !n_sites.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("Haar baseline needs even L >= 2, got {n_sites}")));
    }
    let streams: Vec<SeededRng> = (0..n_samples).map(|_| rng.fork()).collect();
    let samples = exec.map(n_samples, |i| -> Result<(f64, f64, Option<f64>)> {
        let psi = haar_random(&mut streams[i].clone(), n_sites)?;
        let p = crate::entropy::subset_purity(&psi, SubsetMask::half_chain(n_sites));
        let s_w = wre(&psi, path, crate::entropy::DEFAULT_WRE_FAST_CAP, Exec::Sequential)?;
        Ok((p, hcee(&psi)?, s_w))
    });
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;
    let n = n_samples as f64;
    let purities: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let s_hc: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let s_w: Option<Vec<f64>> = samples.iter().map(|s| s.2).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n;
    Ok(HaarBaseline {
        n_sites,
        n_samples,
        purity_hc: mean(&purities),
        purity_hc_stderr: standard_error(&purities).unwrap_or(0.0),
        s_hc: mean(&s_hc),
        s_hc_stderr: standard_error(&s_hc).unwrap_or(0.0),
        s_w: s_w.as_deref().map(mean),
        s_w_stderr: s_w.as_deref().and_then(standard_error),
    })
}

/// Reproducibility record written next to every run's outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: ExperimentConfig,
    pub exec: String,
    pub disorder_hashes: BTreeMap<String, String>,
    pub software_version: String,
    pub started_unix_seconds: u64,
    pub wall_clock_seconds: f64,
    /// sha256 of each output file, keyed by file name.
    pub outputs: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aborted: Vec<Aborted>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(std::fs::read(path)?)))
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Files written by a run.
#[derive(Clone, Debug)]
pub struct RunOutputs {
    pub table: PathBuf,
    pub aggregate: Option<PathBuf>,
    pub manifest: PathBuf,
    pub outcome: Outcome,
}

struct Writer {
    dir: PathBuf,
    outputs: BTreeMap<String, String>,
}

impl Writer {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), outputs: BTreeMap::new() })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, bytes)?;
        self.outputs.insert(name.to_string(), hex::encode(Sha256::digest(bytes)));
        Ok(path)
    }
}

fn stem(kind: &str, config: &ExperimentConfig) -> String {
    format!("{kind}_case{}_L{}", config.case.label(), config.n_sites)
}

fn write_run(kind: &str, exp: &Experiment, outcome: Outcome, aggregate: bool, started: (u64, Instant)) -> Result<RunOutputs> {
    let config = &exp.config;
    let mut w = Writer::new(&config.output_dir)?;
    let base = stem(kind, config);
    let table = w.write(&format!("{base}.csv"), &outcome.table.to_csv_bytes()?)?;
    let aggregate = if aggregate {
        Some(w.write(&format!("{base}_aggregate.csv"), &outcome.table.aggregate().to_csv_bytes()?)?)
    } else {
        None
    };
    w.write("disorder/prep.json", exp.prep_disorder.to_json()?.as_bytes())?;
    for r in &exp.realizations {
        w.write(&format!("disorder/target_{}.json", r.index), r.disorder.to_json()?.as_bytes())?;
    }
    if !outcome.fits.is_empty() {
        let entries: Vec<FitEntry> = outcome
            .fits
            .iter()
            .map(|(k, i, rec)| FitEntry { realization: *k, t0: config.t0_grid[*i], record: rec.clone() })
            .collect();
        w.write(&format!("{base}_gge_fits.json"), serde_json::to_string_pretty(&entries)?.as_bytes())?;
    }
    let manifest = RunManifest {
        command: kind.to_string(),
        config: config.clone(),
        exec: format!("{:?}", config.exec),
        disorder_hashes: exp.disorder_hashes(),
        software_version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix_seconds: started.0,
        wall_clock_seconds: started.1.elapsed().as_secs_f64(),
        outputs: w.outputs.clone(),
        aborted: outcome.aborted.clone(),
    };
    let manifest_path = config.output_dir.join(format!("{base}_manifest.json"));
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;
    if !outcome.aborted.is_empty() {
        let which: Vec<String> = outcome.aborted.iter().map(|a| a.realization.to_string()).collect();
        return Err(Error::Invariant(format!(
            "realizations {} aborted; see {}",
            which.join(", "),
            manifest_path.display()
        )));
    }
    Ok(RunOutputs { table, aggregate, manifest: manifest_path, outcome })
}

pub fn compute_dynamics(config: &ExperimentConfig) -> Result<Outcome> {
    Ok(Experiment::setup(config)?.dynamics())
}

pub fn compute_growth(config: &ExperimentConfig) -> Result<Outcome> {
    Ok(Experiment::setup(config)?.growth())
}

/// Runs the dynamics sweep and writes the trace CSV, disorder records and
/// manifest to `config.output_dir`.
pub fn run_dynamics(config: &ExperimentConfig) -> Result<RunOutputs> {
    let started = (unix_now(), Instant::now());
    let exp = Experiment::setup(config)?;
    let outcome = exp.dynamics();
    write_run("dynamics", &exp, outcome, false, started)
}

/// Runs the growth sweep and writes per-realization and aggregate CSVs.
pub fn run_growth_sweep(config: &ExperimentConfig) -> Result<RunOutputs> {
    let started = (unix_now(), Instant::now());
    let exp = Experiment::setup(config)?;
    let outcome = exp.growth();
    write_run("growth", &exp, outcome, true, started)
}

/// Computes a Haar baseline on the dedicated stream and writes it as JSON.
pub fn run_haar_baseline(
    seed: u64,
    n_sites: usize,
    n_samples: usize,
    path: WrePath,
    exec: Exec,
    output_dir: &Path,
) -> Result<(HaarBaseline, PathBuf)> {
    let base = haar_baseline_with(&mut SeededRng::new(seed, HAAR_STREAM), n_sites, n_samples, path, exec)?;
    std::fs::create_dir_all(output_dir)?;
    let p = output_dir.join(format!("haar_baseline_L{n_sites}.json"));
    std::fs::write(&p, serde_json::to_string_pretty(&base)?)?;
    Ok((base, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(case: Case) -> ExperimentConfig {
        ExperimentConfig {
            case,
            n_sites: 6,
            t0_grid: vec![0.0, 1.0, 4.5],
            time_grid: vec![0.0, 1.0, 10.0],
            realizations: 2,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn product_state_row_at_zero() {
        let out = compute_dynamics(&small(Case::I)).unwrap();
        let t = &out.table;
        assert_eq!(t.rows.len(), 2 * 3 * 3);
        assert_eq!(t.value(0, "t"), Some(0.0));
        assert_eq!(t.rows[0].t0, 0.0);
        assert!(t.value(0, "S_HC").unwrap().abs() < 1e-12);
        let expected = 6.0 * (LN_6PI - std::f64::consts::LN_2);
        assert!((t.value(0, "S_W").unwrap() - expected).abs() < 1e-10);
        assert!(t.value(0, "r_HC").unwrap().abs() < 1e-9);
        assert_eq!(t.value(0, "m_av"), Some(0.5));
        assert_eq!(t.value(0, "S_W_pred_gge"), None);
    }

    #[test]
    fn growth_rows_and_predictions() {
        let cfg = ExperimentConfig { predict: Predict::Both, scrooge_samples: 8, ..small(Case::II) };
        let out = compute_growth(&cfg).unwrap();
        let t = &out.table;
        assert_eq!(t.rows.len(), 6);
        assert!(out.aborted.is_empty());
        for i in 0..t.rows.len() {
            let ds = t.value(i, "dS_HC").unwrap();
            let s_inf = t.value(i, "S_HC").unwrap();
            let s0 = t.value(i, "S_HC_0").unwrap();
            assert!((ds - (s_inf - s0)).abs() < 1e-15);
            assert!(t.value(i, "S_W_pred_gge").is_some());
            assert!(t.value(i, "S_W_pred_scrooge_stderr").is_some());
            assert_eq!(t.value(i, "t"), Some(SATURATION_TIME));
        }
        assert_eq!(out.fits.len(), 6);
    }

    #[test]
    fn deterministic_across_policies() {
        let cfg = small(Case::III);
        let a = compute_growth(&ExperimentConfig { exec: Exec::Sequential, ..cfg.clone() }).unwrap();
        let b = compute_growth(&ExperimentConfig { exec: Exec::Parallel, ..cfg }).unwrap();
        assert_eq!(a.table.to_csv_bytes().unwrap(), b.table.to_csv_bytes().unwrap());
    }

    #[test]
    fn haar_baseline_small() {
        let b = haar_baseline(&mut SeededRng::new(1, HAAR_STREAM), 2, 2000).unwrap();
        assert!((b.purity_hc - 0.8).abs() < 5.0 * b.purity_hc_stderr);
        assert!(haar_baseline(&mut SeededRng::new(1, 0), 2, 5).is_err());
    }

    #[test]
    fn run_writes_files_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig { output_dir: dir.path().to_path_buf(), ..small(Case::I) };
        let out = run_growth_sweep(&cfg).unwrap();
        let m: RunManifest = serde_json::from_str(&std::fs::read_to_string(&out.manifest).unwrap()).unwrap();
        let name = out.table.file_name().unwrap().to_str().unwrap();
        assert_eq!(m.outputs[name], sha256_file(&out.table).unwrap());
        assert_eq!(m.disorder_hashes.len(), 3);
        assert!(dir.path().join("disorder/target_1.json").exists());
        let back = ResultTable::read_csv(&out.table).unwrap();
        assert_eq!(back, out.outcome.table);
    }
}
