//! Experiment runner behind the `solstream` binary: single train/eval
//! runs, cross-validated hyperparameter grid search, sparsity sweeps,
//! synthetic dataset generation, and regret traces — all emitting
//! deterministic machine-readable reports.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{make_baseline, Baseline, BaselineConfig, BaselineKind};
use crate::data::{
    generate_synthetic, permutation, permuted, read_libsvm, write_libsvm, DatasetMeta,
    SparseExample, SyntheticSpec,
};
use crate::error::{Error, Result};
use crate::eval::{
    evaluate, metrics, offline_comparator, regret_trace, train_online, ImbalanceSpec, Metrics,
    RegretTrace,
};
use crate::learner::{
    hinge_loss, make_learner, AlgoKind, Learner, LearnerConfig, OnlineModel, Prediction,
    RoundOutcome,
};
use crate::sparse::DenseWeights;

/// An algorithm choice: one of the dual-averaging learners or one of the
/// comparison baselines, with its hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub enum AlgoSpec {
    Sol(LearnerConfig),
    Base(BaselineConfig),
}

impl AlgoSpec {
    /// Resolves a CLI algorithm name to a default-configured spec.
    pub fn from_cli_name(name: &str) -> Result<AlgoSpec> {
        let spec = match name {
            "fsol" => AlgoSpec::Sol(LearnerConfig::new(AlgoKind::Fsol)),
            "ssol" => AlgoSpec::Sol(LearnerConfig::new(AlgoKind::SsolFull)),
            "ssol-diag" => AlgoSpec::Sol(LearnerConfig::new(AlgoKind::SsolDiag)),
            "cs-fsol" => AlgoSpec::Sol(LearnerConfig::new(AlgoKind::CsFsol)),
            "cs-ssol" => AlgoSpec::Sol(LearnerConfig::new(AlgoKind::CsSsolFull)),
            "cs-ssol-diag" => AlgoSpec::Sol(LearnerConfig::new(AlgoKind::CsSsolDiag)),
            "stg" => AlgoSpec::Base(BaselineConfig::new(BaselineKind::Stg)),
            "fobos" => AlgoSpec::Base(BaselineConfig::new(BaselineKind::Fobos)),
            "ada-fobos" => AlgoSpec::Base(BaselineConfig::new(BaselineKind::AdaFobos)),
            "ada-rda" => AlgoSpec::Base(BaselineConfig::new(BaselineKind::AdaRda)),
            "cs-ogd" => AlgoSpec::Base(BaselineConfig::new(BaselineKind::CsOgd)),
            "cpa" => AlgoSpec::Base(BaselineConfig::new(BaselineKind::Cpa)),
            "paum" => AlgoSpec::Base(BaselineConfig::new(BaselineKind::Paum)),
            other => {
                return Err(Error::Config(format!(
                    "unknown algorithm {other:?}; expected one of fsol, ssol, ssol-diag, \
                     cs-fsol, cs-ssol, cs-ssol-diag, stg, fobos, ada-fobos, ada-rda, \
                     cs-ogd, cpa, paum"
                )))
            }
        };
        Ok(spec)
    }

    pub fn name(&self) -> &'static str {
        match self {
            AlgoSpec::Sol(cfg) => cfg.kind.name(),
            AlgoSpec::Base(cfg) => cfg.kind.name(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            AlgoSpec::Sol(cfg) => cfg.validate(),
            AlgoSpec::Base(cfg) => cfg.validate(),
        }
    }

    pub fn lambda(&self) -> f64 {
        match self {
            AlgoSpec::Sol(cfg) => cfg.lambda,
            AlgoSpec::Base(cfg) => cfg.lambda,
        }
    }

    pub fn set_lambda(&mut self, lambda: f64) {
        match self {
            AlgoSpec::Sol(cfg) => cfg.lambda = lambda,
            AlgoSpec::Base(cfg) => cfg.lambda = lambda,
        }
    }

    pub fn eta(&self) -> f64 {
        match self {
            AlgoSpec::Sol(cfg) => cfg.eta,
            AlgoSpec::Base(cfg) => cfg.eta,
        }
    }

    pub fn set_eta(&mut self, eta: f64) {
        match self {
            AlgoSpec::Sol(cfg) => cfg.eta = eta,
            AlgoSpec::Base(cfg) => cfg.eta = eta,
        }
    }

    pub fn costs(&self) -> (f64, f64) {
        match self {
            AlgoSpec::Sol(cfg) => (cfg.c_pos, cfg.c_neg),
            AlgoSpec::Base(cfg) => (cfg.c_pos, cfg.c_neg),
        }
    }

    pub fn set_costs(&mut self, c_pos: f64, c_neg: f64) {
        match self {
            AlgoSpec::Sol(cfg) => {
                cfg.c_pos = c_pos;
                cfg.c_neg = c_neg;
            }
            AlgoSpec::Base(cfg) => {
                cfg.c_pos = c_pos;
                cfg.c_neg = c_neg;
            }
        }
    }

    pub fn is_cost_sensitive(&self) -> bool {
        match self {
            AlgoSpec::Sol(cfg) => cfg.kind.is_cost_sensitive(),
            AlgoSpec::Base(cfg) => cfg.kind.is_cost_sensitive(),
        }
    }

    /// The algorithm's second hyperparameter, reported in the `r` column:
    /// damping r for the second-order learners, δ for the adaptive
    /// baselines, τ₊ for the uneven-margin perceptron, the aggressiveness
    /// base C (= c_neg) for the passive-aggressive kind; 0 when none.
    pub fn secondary(&self) -> f64 {
        match self {
            AlgoSpec::Sol(cfg) if cfg.kind.is_second_order() => cfg.r,
            AlgoSpec::Sol(_) => 0.0,
            AlgoSpec::Base(cfg) => match cfg.kind {
                BaselineKind::AdaFobos | BaselineKind::AdaRda => cfg.delta,
                BaselineKind::Paum => cfg.tau_pos,
                BaselineKind::Cpa => cfg.c_neg,
                _ => 0.0,
            },
        }
    }

    pub fn has_secondary(&self) -> bool {
        match self {
            AlgoSpec::Sol(cfg) => cfg.kind.is_second_order(),
            AlgoSpec::Base(cfg) => matches!(
                cfg.kind,
                BaselineKind::AdaFobos
                    | BaselineKind::AdaRda
                    | BaselineKind::Paum
                    | BaselineKind::Cpa
            ),
        }
    }

    /// Sets the secondary parameter. For the passive-aggressive kind the
    /// value rescales both caps, preserving the configured c₊/c₋ ratio.
    pub fn set_secondary(&mut self, v: f64) {
        match self {
            AlgoSpec::Sol(cfg) if cfg.kind.is_second_order() => cfg.r = v,
            AlgoSpec::Sol(_) => {}
            AlgoSpec::Base(cfg) => match cfg.kind {
                BaselineKind::AdaFobos | BaselineKind::AdaRda => cfg.delta = v,
                BaselineKind::Paum => cfg.tau_pos = v,
                BaselineKind::Cpa => {
                    let ratio = cfg.c_pos / cfg.c_neg;
                    cfg.c_neg = v;
                    cfg.c_pos = v * ratio;
                }
                _ => {}
            },
        }
    }

    pub fn build(&self, ambient_dim_hint: usize) -> Result<AnyModel> {
        match self {
            AlgoSpec::Sol(cfg) => Ok(AnyModel::Sol(make_learner(*cfg, ambient_dim_hint)?)),
            AlgoSpec::Base(cfg) => Ok(AnyModel::Base(make_baseline(*cfg)?)),
        }
    }
}

/// Learner-or-baseline behind one dispatchable model type.
#[derive(Debug, Clone)]
pub enum AnyModel {
    Sol(Learner),
    Base(Baseline),
}

impl OnlineModel for AnyModel {
    fn predict(&self, x: &crate::sparse::SparseVector) -> Prediction {
        match self {
            AnyModel::Sol(m) => m.predict(x),
            AnyModel::Base(m) => m.predict(x),
        }
    }

    fn learn(&mut self, ex: &SparseExample) -> Result<RoundOutcome> {
        match self {
            AnyModel::Sol(m) => m.learn(ex),
            AnyModel::Base(m) => m.learn(ex),
        }
    }

    fn final_weights(&self) -> DenseWeights {
        match self {
            AnyModel::Sol(m) => m.final_weights(),
            AnyModel::Base(m) => m.final_weights(),
        }
    }

    fn rounds(&self) -> u64 {
        match self {
            AnyModel::Sol(m) => m.rounds(),
            AnyModel::Base(m) => m.rounds(),
        }
    }

    fn update_count(&self) -> u64 {
        match self {
            AnyModel::Sol(m) => m.update_count(),
            AnyModel::Base(m) => m.update_count(),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            AnyModel::Sol(m) => m.name(),
            AnyModel::Base(m) => m.name(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    TrainEval,
    GridSearch,
    SparsitySweep,
    SynthGen,
    Regret,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Files {
        train: PathBuf,
        test: Option<PathBuf>,
    },
    Synthetic(SyntheticSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Full description of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub task: Task,
    pub algo: AlgoSpec,
    pub data: DataSource,
    pub lambda_grid: Vec<f64>,
    pub seeds: Vec<u64>,
    pub folds: usize,
    pub passes: usize,
    pub imbalance: ImbalanceSpec,
    pub checkpoints: Vec<usize>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    /// Excludes wall-clock columns so identical specs give byte-identical files.
    pub deterministic: bool,
}

impl ExperimentSpec {
    pub fn new(task: Task, algo: AlgoSpec, data: DataSource) -> Self {
        ExperimentSpec {
            task,
            algo,
            data,
            lambda_grid: vec![],
            seeds: (0..5).collect(),
            folds: 5,
            passes: 1,
            imbalance: ImbalanceSpec::balanced(),
            checkpoints: vec![],
            out: None,
            format: OutputFormat::Csv,
            deterministic: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.algo.validate()?;
        self.imbalance.validate()?;
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        if self.passes < 1 {
            return Err(Error::Config("passes must be at least 1".into()));
        }
        match self.task {
            Task::GridSearch => {
                if self.folds < 2 {
                    return Err(Error::Config(format!(
                        "grid search needs at least 2 folds, got {}",
                        self.folds
                    )));
                }
            }
            Task::SparsitySweep => {
                if self.lambda_grid.is_empty() {
                    return Err(Error::Config("sparsity sweep needs a non-empty lambda grid".into()));
                }
                for &l in &self.lambda_grid {
                    if !(l >= 0.0 && l.is_finite()) {
                        return Err(Error::Config(format!("invalid lambda {l} in grid")));
                    }
                }
            }
            Task::SynthGen => {
                if !matches!(self.data, DataSource::Synthetic(_)) {
                    return Err(Error::Config(
                        "synthetic generation needs a synthetic data spec".into(),
                    ));
                }
                if self.out.is_none() {
                    return Err(Error::Config(
                        "synthetic generation needs an output directory".into(),
                    ));
                }
            }
            Task::Regret => {
                if self.checkpoints.is_empty() {
                    return Err(Error::Config("regret needs at least one checkpoint".into()));
                }
                if self.checkpoints.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::Config("checkpoints must be strictly increasing".into()));
                }
            }
            Task::TrainEval => {}
        }
        if let DataSource::Synthetic(s) = &self.data {
            s.validate()?;
        }
        Ok(())
    }
}

/// One output line: a per-seed result or a mean/std aggregate (seed column
/// "mean"/"std", or "cv" for grid-search cells).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub algorithm: String,
    pub lambda: f64,
    pub eta: f64,
    /// Secondary hyperparameter; see `AlgoSpec::secondary`.
    pub r: f64,
    pub c_pos: f64,
    pub c_neg: f64,
    pub seed: String,
    pub achieved_sparsity: f64,
    pub test_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weighted_sum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_time_seconds: Option<f64>,
    pub updates_count: f64,
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

const CSV_COLUMNS: [&str; 12] = [
    "algorithm",
    "lambda",
    "eta",
    "r",
    "c_pos",
    "c_neg",
    "seed",
    "achieved_sparsity",
    "test_error",
    "weighted_sum",
    "train_time_seconds",
    "updates_count",
];

pub fn csv_header(deterministic: bool) -> String {
    let cols: Vec<&str> = CSV_COLUMNS
        .iter()
        .copied()
        .filter(|&c| !(deterministic && c == "train_time_seconds"))
        .collect();
    cols.join(",")
}

fn csv_row(row: &ReportRow, deterministic: bool) -> String {
    let mut cells = vec![
        row.algorithm.clone(),
        fmt_float(row.lambda),
        fmt_float(row.eta),
        fmt_float(row.r),
        fmt_float(row.c_pos),
        fmt_float(row.c_neg),
        row.seed.clone(),
        fmt_float(row.achieved_sparsity),
        fmt_float(row.test_error),
        row.weighted_sum.map(fmt_float).unwrap_or_default(),
    ];
    if !deterministic {
        cells.push(row.train_time_seconds.map(fmt_float).unwrap_or_default());
    }
    // integer-valued counts print without an exponent; aggregates keep one
    if row.updates_count.fract() == 0.0 && row.updates_count.abs() < 2f64.powi(53) {
        cells.push(format!("{}", row.updates_count as i64));
    } else {
        cells.push(fmt_float(row.updates_count));
    }
    cells.join(",")
}

pub fn render_csv(rows: &[ReportRow], deterministic: bool) -> String {
    let mut out = csv_header(deterministic);
    out.push('\n');
    for row in rows {
        out.push_str(&csv_row(row, deterministic));
        out.push('\n');
    }
    out
}

pub fn render_json(rows: &[ReportRow]) -> Result<String> {
    let mut s = serde_json::to_string_pretty(rows)
        .map_err(|e| Error::Data(format!("report serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn render_regret_csv(trace: &RegretTrace) -> String {
    let mut out = String::from("t,online_cum_loss,comparator_cum_loss,regret,regret_over_t\n");
    for p in &trace.checkpoints {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.t,
            fmt_float(p.online_cum),
            fmt_float(p.comparator_cum),
            fmt_float(p.regret),
            fmt_float(p.regret_over_t)
        ));
    }
    out
}

pub fn render_regret_json(trace: &RegretTrace) -> Result<String> {
    let mut s = serde_json::to_string_pretty(trace)
        .map_err(|e| Error::Data(format!("trace serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Winning grid-search cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestParams {
    pub algorithm: String,
    pub eta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub secondary: Option<f64>,
    /// CV mean of the selection metric (lower is better).
    pub cv_score: f64,
}

/// Everything a finished experiment hands back.
#[derive(Debug, Clone)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    pub best: Option<BestParams>,
    pub regret: Option<RegretTrace>,
    /// Files written (empty when no output path was given).
    pub written: Vec<PathBuf>,
    /// The rendered report body, for stdout printing when nothing was written.
    pub rendered: Option<String>,
}

/// Loaded (or generated) experiment data.
pub struct LoadedData {
    pub train: Vec<SparseExample>,
    pub test: Vec<SparseExample>,
    pub ambient_dim: usize,
}

pub fn load_data(source: &DataSource) -> Result<LoadedData> {
    match source {
        DataSource::Files { train, test } => {
            let train_set = read_libsvm(train)?;
            let test_set = match test {
                Some(p) => read_libsvm(p)?,
                None => train_set.clone(),
            };
            let dim = DatasetMeta::from_examples(&train_set)
                .ambient_dim
                .max(DatasetMeta::from_examples(&test_set).ambient_dim);
            if train_set.is_empty() {
                return Err(Error::Data(format!(
                    "training set {} is empty",
                    train.display()
                )));
            }
            Ok(LoadedData {
                train: train_set,
                test: test_set,
                ambient_dim: dim.max(1),
            })
        }
        DataSource::Synthetic(spec) => {
            let data = generate_synthetic(spec)?;
            Ok(LoadedData {
                train: data.train,
                test: data.test,
                ambient_dim: spec.ambient_dim,
            })
        }
    }
}

/// Result of one trained-and-scored cell.
struct CellResult {
    lambda: f64,
    seed: u64,
    sparsity: f64,
    metrics: Metrics,
    updates: u64,
    train_seconds: f64,
}

/// Trains one fresh model (single permutation per seed, `passes` repeats)
/// and scores the frozen weights on the test set.
fn run_cell(
    algo: &AlgoSpec,
    lambda: f64,
    seed: u64,
    passes: usize,
    data: &LoadedData,
    imbalance: &ImbalanceSpec,
) -> Result<CellResult> {
    let mut algo = algo.clone();
    algo.set_lambda(lambda);
    let mut model = algo.build(data.ambient_dim)?;
    let mut seconds = 0.0;
    let mut updates = 0;
    for _ in 0..passes {
        let log = train_online(&mut model, permuted(&data.train, seed))?;
        seconds += log.train_seconds;
        updates = model.update_count();
    }
    let w = model.final_weights();
    let conf = evaluate(&w, &data.test);
    let m = metrics(&conf, imbalance)?;
    Ok(CellResult {
        lambda,
        seed,
        sparsity: w.sparsity(data.ambient_dim),
        metrics: m,
        updates,
        train_seconds: seconds,
    })
}

fn row_from_cell(spec: &ExperimentSpec, cell: &CellResult) -> ReportRow {
    let (c_pos, c_neg) = spec.algo.costs();
    ReportRow {
        algorithm: spec.algo.name().to_string(),
        lambda: cell.lambda,
        eta: spec.algo.eta(),
        r: spec.algo.secondary(),
        c_pos,
        c_neg,
        seed: cell.seed.to_string(),
        achieved_sparsity: cell.sparsity,
        test_error: cell.metrics.error_rate,
        weighted_sum: cell.metrics.weighted_sum,
        train_time_seconds: (!spec.deterministic).then_some(cell.train_seconds),
        updates_count: cell.updates as f64,
    }
}

/// Mean and std rows over one group of per-seed rows.
fn summary_rows(group: &[ReportRow]) -> Vec<ReportRow> {
    let first = &group[0];
    let stat = |f: &dyn Fn(&ReportRow) -> f64| {
        let xs: Vec<f64> = group.iter().map(f).collect();
        crate::eval::mean_std(&xs)
    };
    let (sp_m, sp_s) = stat(&|r| r.achieved_sparsity);
    let (er_m, er_s) = stat(&|r| r.test_error);
    let (up_m, up_s) = stat(&|r| r.updates_count);
    let ws = group
        .iter()
        .map(|r| r.weighted_sum)
        .collect::<Option<Vec<f64>>>()
        .map(|xs| crate::eval::mean_std(&xs));
    let tt = group
        .iter()
        .map(|r| r.train_time_seconds)
        .collect::<Option<Vec<f64>>>()
        .map(|xs| crate::eval::mean_std(&xs));
    let base = |seed: &str| ReportRow {
        algorithm: first.algorithm.clone(),
        lambda: first.lambda,
        eta: first.eta,
        r: first.r,
        c_pos: first.c_pos,
        c_neg: first.c_neg,
        seed: seed.to_string(),
        achieved_sparsity: 0.0,
        test_error: 0.0,
        weighted_sum: None,
        train_time_seconds: None,
        updates_count: 0.0,
    };
    let mut mean = base("mean");
    mean.achieved_sparsity = sp_m;
    mean.test_error = er_m;
    mean.updates_count = up_m;
    mean.weighted_sum = ws.map(|(m, _)| m);
    mean.train_time_seconds = tt.map(|(m, _)| m);
    let mut std = base("std");
    std.achieved_sparsity = sp_s;
    std.test_error = er_s;
    std.updates_count = up_s;
    std.weighted_sum = ws.map(|(_, s)| s);
    std.train_time_seconds = tt.map(|(_, s)| s);
    vec![mean, std]
}

/// Seeded permutation used to deal examples into folds: position j of the
/// permutation belongs to fold j mod `folds`. A pure function of
/// (n, folds, seed) via the permutation of (n, seed).
pub fn cv_permutation(n: usize, seed: u64) -> Vec<usize> {
    permutation(n, seed)
}

/// One grid-search cell with its cross-validated scores.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCell {
    pub eta: f64,
    pub secondary: Option<f64>,
    /// CV mean selection metric: error rate, or 1 − weighted sum for
    /// cost-sensitive algorithms. Lower is better.
    pub score: f64,
    pub mean_error: f64,
    pub mean_weighted_sum: Option<f64>,
    pub mean_sparsity: f64,
    pub mean_updates: f64,
}

#[derive(Debug, Clone)]
pub struct GridSearchResult {
    /// The input spec with the winning η (and secondary parameter) set.
    pub best: AlgoSpec,
    pub best_cell: GridCell,
    pub cells: Vec<GridCell>,
}

fn pow2_grid(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|e| 2f64.powi(e)).collect()
}

/// λ = 0 cross-validated search: η over {2⁻¹..2⁹}, the secondary parameter
/// (when the algorithm has one) over {2⁻⁵..2⁵}. Ties break toward smaller
/// η, then smaller secondary. Selection metric: CV mean error rate, or
/// 1 − weighted sum for cost-sensitive algorithms.
pub fn grid_search(
    algo: &AlgoSpec,
    train: &[SparseExample],
    ambient_dim: usize,
    folds: usize,
    seed: u64,
    imbalance: &ImbalanceSpec,
) -> Result<GridSearchResult> {
    if train.is_empty() {
        return Err(Error::Data("grid search needs a non-empty training set".into()));
    }
    if folds < 2 || folds > train.len() {
        return Err(Error::Config(format!(
            "fold count {folds} invalid for {} examples",
            train.len()
        )));
    }
    let eta_grid = pow2_grid(-1, 9);
    let secondary_grid: Vec<Option<f64>> = if algo.has_secondary() {
        pow2_grid(-5, 5).into_iter().map(Some).collect()
    } else {
        vec![None]
    };
    let perm = cv_permutation(train.len(), seed);
    let cs = algo.is_cost_sensitive();

    // (eta, secondary) in tie-break order: smaller eta first, then smaller
    // secondary; the strict-min scan below then lands on the right cell.
    let mut params: Vec<(f64, Option<f64>)> = Vec::new();
    for &eta in &eta_grid {
        for &sec in &secondary_grid {
            params.push((eta, sec));
        }
    }

    let cells: Vec<GridCell> = params
        .par_iter()
        .map(|&(eta, sec)| -> Result<GridCell> {
            let mut cand = algo.clone();
            cand.set_eta(eta);
            cand.set_lambda(0.0);
            if let Some(v) = sec {
                cand.set_secondary(v);
            }
            let mut scores = Vec::with_capacity(folds);
            let mut errors = Vec::with_capacity(folds);
            let mut sums: Option<Vec<f64>> = Some(Vec::with_capacity(folds));
            let mut sparsities = Vec::with_capacity(folds);
            let mut updates = Vec::with_capacity(folds);
            for fold in 0..folds {
                let mut model = cand.build(ambient_dim)?;
                let train_stream = perm
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| j % folds != fold)
                    .map(|(_, &i)| &train[i]);
                for ex in train_stream {
                    model.learn(ex)?;
                }
                let holdout: Vec<SparseExample> = perm
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| j % folds == fold)
                    .map(|(_, &i)| train[i].clone())
                    .collect();
                let w = model.final_weights();
                let conf = evaluate(&w, &holdout);
                let m = metrics(&conf, imbalance)?;
                // cost-sensitive selection wants the weighted sum; fall back
                // to error rate when a fold lacks one class entirely
                let score = if cs {
                    m.weighted_sum.map(|s| 1.0 - s).unwrap_or(m.error_rate)
                } else {
                    m.error_rate
                };
                scores.push(score);
                errors.push(m.error_rate);
                match (&mut sums, m.weighted_sum) {
                    (Some(v), Some(s)) => v.push(s),
                    (slot, _) => *slot = None,
                }
                sparsities.push(w.sparsity(ambient_dim));
                updates.push(model.update_count() as f64);
            }
            let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
            Ok(GridCell {
                eta,
                secondary: sec,
                score: mean(&scores),
                mean_error: mean(&errors),
                mean_weighted_sum: sums.as_deref().map(mean),
                mean_sparsity: mean(&sparsities),
                mean_updates: mean(&updates),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best_idx = 0;
    for (i, cell) in cells.iter().enumerate() {
        if cell.score < cells[best_idx].score {
            best_idx = i;
        }
    }
    let best_cell = cells[best_idx].clone();
    let mut best = algo.clone();
    best.set_eta(best_cell.eta);
    if let Some(v) = best_cell.secondary {
        best.set_secondary(v);
    }
    Ok(GridSearchResult {
        best,
        best_cell,
        cells,
    })
}

fn write_out(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, body)?;
    Ok(())
}

/// Executes the experiment and (when an output path is set) writes the
/// report. Row order never depends on thread scheduling.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Report> {
    spec.validate()?;
    match spec.task {
        Task::TrainEval => {
            let data = load_data(&spec.data)?;
            let rows = run_rows(spec, &data, &[spec.algo.lambda()])?;
            finish_report(spec, rows, None, None)
        }
        Task::SparsitySweep => {
            let data = load_data(&spec.data)?;
            let rows = run_rows(spec, &data, &spec.lambda_grid)?;
            finish_report(spec, rows, None, None)
        }
        Task::GridSearch => {
            let data = load_data(&spec.data)?;
            let result = grid_search(
                &spec.algo,
                &data.train,
                data.ambient_dim,
                spec.folds,
                spec.seeds[0],
                &spec.imbalance,
            )?;
            let (c_pos, c_neg) = spec.algo.costs();
            let rows: Vec<ReportRow> = result
                .cells
                .iter()
                .map(|cell| ReportRow {
                    algorithm: spec.algo.name().to_string(),
                    lambda: 0.0,
                    eta: cell.eta,
                    r: cell.secondary.unwrap_or_else(|| spec.algo.secondary()),
                    c_pos,
                    c_neg,
                    seed: "cv".to_string(),
                    achieved_sparsity: cell.mean_sparsity,
                    test_error: cell.mean_error,
                    weighted_sum: cell.mean_weighted_sum,
                    train_time_seconds: None,
                    updates_count: cell.mean_updates,
                })
                .collect();
            let best = BestParams {
                algorithm: spec.algo.name().to_string(),
                eta: result.best_cell.eta,
                secondary: result.best_cell.secondary,
                cv_score: result.best_cell.score,
            };
            finish_report(spec, rows, Some(best), None)
        }
        Task::Regret => {
            let data = load_data(&spec.data)?;
            let seed = spec.seeds[0];
            let mut model = spec.algo.build(data.ambient_dim)?;
            let stream: Vec<&SparseExample> = permuted(&data.train, seed).collect();
            let mut online_losses = Vec::with_capacity(stream.len());
            for ex in &stream {
                online_losses.push(model.learn(ex)?.loss);
            }
            // comparator: best fixed weights for the cost-weighted hinge
            // total (no L1 term — regret is about the losses themselves)
            let (c_pos, c_neg) = spec.algo.costs();
            let w_star = offline_comparator(&data.train, 0.0, c_pos, c_neg)?;
            let comparator_losses: Vec<f64> = stream
                .iter()
                .map(|ex| {
                    let c = if ex.y == crate::data::Label::Pos { c_pos } else { c_neg };
                    hinge_loss(ex.x.dot(&w_star), ex.y, c)
                })
                .collect();
            let trace = regret_trace(&online_losses, &comparator_losses, &spec.checkpoints)?;
            finish_report(spec, vec![], None, Some(trace))
        }
        Task::SynthGen => {
            let DataSource::Synthetic(synth) = &spec.data else {
                unreachable!("validated above")
            };
            let out = spec.out.as_ref().expect("validated above");
            std::fs::create_dir_all(out)?;
            let data = generate_synthetic(synth)?;
            let train_path = out.join("train.svm");
            let test_path = out.join("test.svm");
            write_libsvm(&train_path, &data.train)?;
            write_libsvm(&test_path, &data.test)?;
            #[derive(Serialize)]
            struct Meta<'a> {
                spec: &'a SyntheticSpec,
                train: DatasetMeta,
                test: DatasetMeta,
            }
            let meta = Meta {
                spec: synth,
                train: DatasetMeta::from_examples(&data.train),
                test: DatasetMeta::from_examples(&data.test),
            };
            let meta_path = out.join("meta.json");
            let mut body = serde_json::to_string_pretty(&meta)
                .map_err(|e| Error::Data(format!("meta serialization failed: {e}")))?;
            body.push('\n');
            write_out(&meta_path, &body)?;
            Ok(Report {
                rows: vec![],
                best: None,
                regret: None,
                written: vec![train_path, test_path, meta_path],
                rendered: None,
            })
        }
    }
}

/// Runs the (λ grid × seeds) cells in parallel and assembles ordered rows:
/// per-seed rows for each λ ascending, followed by that λ's mean/std rows.
fn run_rows(spec: &ExperimentSpec, data: &LoadedData, grid: &[f64]) -> Result<Vec<ReportRow>> {
    let mut lambdas: Vec<f64> = grid.to_vec();
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup();
    let cells: Vec<(f64, u64)> = lambdas
        .iter()
        .flat_map(|&l| spec.seeds.iter().map(move |&s| (l, s)))
        .collect();
    let results: Vec<CellResult> = cells
        .par_iter()
        .map(|&(lambda, seed)| run_cell(&spec.algo, lambda, seed, spec.passes, data, &spec.imbalance))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for &lambda in &lambdas {
        let mut group: Vec<ReportRow> = results
            .iter()
            .filter(|c| c.lambda == lambda)
            .map(|c| row_from_cell(spec, c))
            .collect();
        group.sort_by_key(|r| r.seed.parse::<u64>().unwrap_or(u64::MAX));
        let summaries = summary_rows(&group);
        rows.extend(group);
        rows.extend(summaries);
    }
    Ok(rows)
}

fn finish_report(
    spec: &ExperimentSpec,
    rows: Vec<ReportRow>,
    best: Option<BestParams>,
    regret: Option<RegretTrace>,
) -> Result<Report> {
    let rendered = match (&regret, spec.format) {
        (Some(trace), OutputFormat::Csv) => render_regret_csv(trace),
        (Some(trace), OutputFormat::Json) => render_regret_json(trace)?,
        (None, OutputFormat::Csv) => render_csv(&rows, spec.deterministic),
        (None, OutputFormat::Json) => render_json(&rows)?,
    };
    let mut written = Vec::new();
    if let Some(out) = &spec.out {
        write_out(out, &rendered)?;
        written.push(out.clone());
    }
    Ok(Report {
        rows,
        best,
        regret,
        written,
        rendered: Some(rendered),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Label;
    use crate::sparse::SparseVector;

    fn toy_file(dir: &std::path::Path, name: &str, body: &str) -> PathBuf {
        let path = dir.join(name);
        std::fs::write(&path, body).unwrap();
        path
    }

    #[test]
    fn algo_names_round_trip() {
        for name in [
            "fsol",
            "ssol",
            "ssol-diag",
            "cs-fsol",
            "cs-ssol",
            "cs-ssol-diag",
            "stg",
            "fobos",
            "ada-fobos",
            "ada-rda",
            "cs-ogd",
            "cpa",
            "paum",
        ] {
            let spec = AlgoSpec::from_cli_name(name).unwrap();
            assert_eq!(spec.name(), name);
        }
        assert!(AlgoSpec::from_cli_name("svm").is_err());
    }

    #[test]
    fn secondary_parameter_mapping() {
        let mut s = AlgoSpec::from_cli_name("ssol").unwrap();
        s.set_secondary(4.0);
        assert_eq!(s.secondary(), 4.0);
        let AlgoSpec::Sol(cfg) = &s else { panic!() };
        assert_eq!(cfg.r, 4.0);

        let mut s = AlgoSpec::from_cli_name("ada-rda").unwrap();
        s.set_secondary(0.25);
        let AlgoSpec::Base(cfg) = &s else { panic!() };
        assert_eq!(cfg.delta, 0.25);

        let mut s = AlgoSpec::from_cli_name("cpa").unwrap();
        s.set_costs(3.0, 1.0);
        s.set_secondary(2.0);
        let AlgoSpec::Base(cfg) = &s else { panic!() };
        assert_eq!(cfg.c_neg, 2.0);
        assert_eq!(cfg.c_pos, 6.0); // ratio 3:1 preserved

        assert!(!AlgoSpec::from_cli_name("fsol").unwrap().has_secondary());
        assert!(!AlgoSpec::from_cli_name("stg").unwrap().has_secondary());
    }

    #[test]
    fn csv_header_exact() {
        assert_eq!(
            csv_header(false),
            "algorithm,lambda,eta,r,c_pos,c_neg,seed,achieved_sparsity,test_error,\
             weighted_sum,train_time_seconds,updates_count"
        );
        assert_eq!(
            csv_header(true),
            "algorithm,lambda,eta,r,c_pos,c_neg,seed,achieved_sparsity,test_error,\
             weighted_sum,updates_count"
        );
    }

    #[test]
    fn float_format_is_17_significant_digits() {
        assert_eq!(fmt_float(0.25), "2.5000000000000000e-1");
        assert_eq!(fmt_float(1.0), "1.0000000000000000e0");
        let v = 0.1 + 0.2;
        assert_eq!(fmt_float(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn train_eval_toy_hand_trace() {
        // +1 and −1 on the same single feature: after two rounds θ returns
        // to zero, so the final model predicts +1 everywhere → error 1/2.
        let dir = tempfile::tempdir().unwrap();
        let train = toy_file(dir.path(), "toy.svm", "+1 1:1\n-1 1:1\n");
        let mut algo = AlgoSpec::from_cli_name("fsol").unwrap();
        algo.set_eta(1.0);
        algo.set_lambda(0.1);
        let mut spec = ExperimentSpec::new(
            Task::TrainEval,
            algo,
            DataSource::Files {
                train,
                test: None,
            },
        );
        spec.seeds = vec![0, 1, 2];
        spec.deterministic = true;
        let report = run_experiment(&spec).unwrap();
        // 3 per-seed rows + mean + std
        assert_eq!(report.rows.len(), 5);
        for row in &report.rows[..3] {
            assert_eq!(row.test_error, 0.5);
            assert_eq!(row.updates_count, 2.0);
            assert_eq!(row.achieved_sparsity, 1.0);
            assert_eq!(row.weighted_sum, Some(0.5));
        }
        assert_eq!(report.rows[3].seed, "mean");
        assert_eq!(report.rows[3].test_error, 0.5);
        assert_eq!(report.rows[4].seed, "std");
        assert_eq!(report.rows[4].test_error, 0.0);
    }

    #[test]
    fn sweep_row_count_and_order() {
        let dir = tempfile::tempdir().unwrap();
        let body = (0..20)
            .map(|i| {
                let y = if i % 3 == 0 { "-1" } else { "+1" };
                format!("{y} {}:{}.5\n", i % 4 + 1, i % 2 + 1)
            })
            .collect::<String>();
        let train = toy_file(dir.path(), "s.svm", &body);
        let mut spec = ExperimentSpec::new(
            Task::SparsitySweep,
            AlgoSpec::from_cli_name("fsol").unwrap(),
            DataSource::Files { train, test: None },
        );
        spec.lambda_grid = vec![0.1, 0.0];
        spec.seeds = vec![0, 1];
        spec.deterministic = true;
        let report = run_experiment(&spec).unwrap();
        // 2 λ × (2 seeds + mean + std)
        assert_eq!(report.rows.len(), 8);
        assert_eq!(report.rows[0].lambda, 0.0);
        assert_eq!(report.rows[0].seed, "0");
        assert_eq!(report.rows[2].seed, "mean");
        assert_eq!(report.rows[4].lambda, 0.1);
    }

    #[test]
    fn grid_search_cell_counts() {
        let train: Vec<SparseExample> = (0..40)
            .map(|i| {
                let v = if i % 2 == 0 { 1.0 } else { -1.0 };
                SparseExample {
                    y: if v > 0.0 { Label::Pos } else { Label::Neg },
                    x: SparseVector::new(vec![(i % 5, v), (5, 1.0)]).unwrap(),
                }
            })
            .collect();
        // no secondary parameter: 11 cells
        let res = grid_search(
            &AlgoSpec::from_cli_name("fsol").unwrap(),
            &train,
            6,
            5,
            0,
            &ImbalanceSpec::balanced(),
        )
        .unwrap();
        assert_eq!(res.cells.len(), 11);
        // with a secondary parameter: 121 cells
        let res = grid_search(
            &AlgoSpec::from_cli_name("ssol-diag").unwrap(),
            &train,
            6,
            5,
            0,
            &ImbalanceSpec::balanced(),
        )
        .unwrap();
        assert_eq!(res.cells.len(), 121);
    }

    #[test]
    fn grid_search_single_point_degenerate() {
        // two examples, two folds, one algorithm without secondary: the
        // winning cell must be one of the 11, and reruns agree
        let train = vec![
            SparseExample {
                y: Label::Pos,
                x: SparseVector::new(vec![(0, 1.0)]).unwrap(),
            },
            SparseExample {
                y: Label::Neg,
                x: SparseVector::new(vec![(0, -1.0)]).unwrap(),
            },
        ];
        let algo = AlgoSpec::from_cli_name("fsol").unwrap();
        let a = grid_search(&algo, &train, 1, 2, 7, &ImbalanceSpec::balanced()).unwrap();
        let b = grid_search(&algo, &train, 1, 2, 7, &ImbalanceSpec::balanced()).unwrap();
        assert_eq!(a.best_cell, b.best_cell);
        assert_eq!(a.cells, b.cells);
    }

    #[test]
    fn grid_search_tie_breaks_to_smallest_eta() {
        // perfectly separable with huge margin: every cell scores 0,
        // so the winner must be the smallest η (and smallest secondary)
        let train: Vec<SparseExample> = (0..10)
            .map(|i| {
                let y = if i % 2 == 0 { 1.0 } else { -1.0 };
                SparseExample {
                    y: if y > 0.0 { Label::Pos } else { Label::Neg },
                    x: SparseVector::new(vec![(0, 10.0 * y)]).unwrap(),
                }
            })
            .collect();
        let res = grid_search(
            &AlgoSpec::from_cli_name("fsol").unwrap(),
            &train,
            1,
            2,
            0,
            &ImbalanceSpec::balanced(),
        )
        .unwrap();
        assert_eq!(res.best_cell.eta, 0.5);

        let res = grid_search(
            &AlgoSpec::from_cli_name("ssol-diag").unwrap(),
            &train,
            1,
            2,
            0,
            &ImbalanceSpec::balanced(),
        )
        .unwrap();
        assert_eq!(res.best_cell.eta, 0.5);
        assert_eq!(res.best_cell.secondary, Some(2f64.powi(-5)));
    }

    #[test]
    fn cv_permutation_is_seeded_function() {
        assert_eq!(cv_permutation(50, 3), cv_permutation(50, 3));
        // every index appears exactly once
        let mut p = cv_permutation(50, 3);
        p.sort_unstable();
        assert_eq!(p, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn synth_gen_writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("synth");
        let mut spec = ExperimentSpec::new(
            Task::SynthGen,
            AlgoSpec::from_cli_name("fsol").unwrap(),
            DataSource::Synthetic(SyntheticSpec::desk(30, 10, 5)),
        );
        spec.out = Some(out.clone());
        let report = run_experiment(&spec).unwrap();
        assert_eq!(report.written.len(), 3);
        let train = read_libsvm(out.join("train.svm")).unwrap();
        assert_eq!(train.len(), 30);
        let meta: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out.join("meta.json")).unwrap())
                .unwrap();
        assert_eq!(meta["train"]["n_examples"], 30);
        assert_eq!(meta["spec"]["seed"], 5);
    }

    #[test]
    fn regret_task_emits_checkpoints() {
        let mut spec = ExperimentSpec::new(
            Task::Regret,
            AlgoSpec::from_cli_name("fsol").unwrap(),
            DataSource::Synthetic(SyntheticSpec::desk(200, 10, 9)),
        );
        spec.checkpoints = vec![50, 100, 200];
        spec.deterministic = true;
        let report = run_experiment(&spec).unwrap();
        let trace = report.regret.unwrap();
        assert_eq!(trace.checkpoints.len(), 3);
        assert_eq!(trace.online_cum.len(), 200);
        let rendered = report.rendered.unwrap();
        assert!(rendered.starts_with("t,online_cum_loss"));
        assert_eq!(rendered.lines().count(), 4);
    }

    #[test]
    fn deterministic_reports_are_byte_identical() {
        let mut spec = ExperimentSpec::new(
            Task::SparsitySweep,
            AlgoSpec::from_cli_name("ssol-diag").unwrap(),
            DataSource::Synthetic(SyntheticSpec::desk(80, 40, 3)),
        );
        spec.lambda_grid = vec![0.0, 0.05, 0.5];
        spec.seeds = vec![0, 1, 2];
        spec.deterministic = true;
        let a = run_experiment(&spec).unwrap().rendered.unwrap();
        let b = run_experiment(&spec).unwrap().rendered.unwrap();
        assert_eq!(a, b);
        assert!(!a.contains("train_time_seconds"));

        spec.format = OutputFormat::Json;
        let a = run_experiment(&spec).unwrap().rendered.unwrap();
        let b = run_experiment(&spec).unwrap().rendered.unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn spec_validation_catches_bad_shapes() {
        let algo = AlgoSpec::from_cli_name("fsol").unwrap();
        let synth = DataSource::Synthetic(SyntheticSpec::desk(10, 5, 0));

        let mut spec = ExperimentSpec::new(Task::SparsitySweep, algo.clone(), synth.clone());
        assert!(spec.validate().is_err()); // empty grid
        spec.lambda_grid = vec![0.1];
        assert!(spec.validate().is_ok());

        let mut spec = ExperimentSpec::new(Task::GridSearch, algo.clone(), synth.clone());
        spec.folds = 1;
        assert!(spec.validate().is_err());

        let mut spec = ExperimentSpec::new(Task::Regret, algo.clone(), synth.clone());
        spec.checkpoints = vec![100, 50];
        assert!(spec.validate().is_err());

        let spec = ExperimentSpec::new(Task::SynthGen, algo.clone(), synth.clone());
        assert!(spec.validate().is_err()); // no out dir

        let mut spec = ExperimentSpec::new(Task::TrainEval, algo, synth);
        spec.seeds = vec![];
        assert!(spec.validate().is_err());
    }
}
