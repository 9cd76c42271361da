//! Evaluation: online mistake accounting, cost-weighted metrics for
//! imbalanced streams, an offline comparator oracle for empirical regret,
//! and parallel sparsity/error sweeps.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{permuted, Label, SparseExample};
use crate::error::{Error, Result};
use crate::learner::{hinge_loss, OnlineModel};
use crate::sparse::DenseWeights;

/// Mistake counts split by true class: class totals T₊/T₋ and the number of
/// false negatives (m_pos) / false positives (m_neg).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub t_pos: u64,
    pub t_neg: u64,
    pub m_pos: u64,
    pub m_neg: u64,
}

impl ConfusionCounts {
    pub fn record(&mut self, y: Label, predicted: Label) {
        match y {
            Label::Pos => {
                self.t_pos += 1;
                if predicted == Label::Neg {
                    self.m_pos += 1;
                }
            }
            Label::Neg => {
                self.t_neg += 1;
                if predicted == Label::Pos {
                    self.m_neg += 1;
                }
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.t_pos + self.t_neg
    }

    pub fn mistakes(&self) -> u64 {
        self.m_pos + self.m_neg
    }
}

/// Class weighting μ₊/μ₋ for the weighted-accuracy sum, plus (optionally)
/// known class totals for deriving the cost ratio ρ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImbalanceSpec {
    pub mu_pos: f64,
    pub mu_neg: f64,
    pub t_pos: Option<u64>,
    pub t_neg: Option<u64>,
}

impl Default for ImbalanceSpec {
    fn default() -> Self {
        ImbalanceSpec::balanced()
    }
}

impl ImbalanceSpec {
    /// μ₊ = μ₋ = 1/2: the weighted sum becomes balanced accuracy.
    pub fn balanced() -> Self {
        ImbalanceSpec {
            mu_pos: 0.5,
            mu_neg: 0.5,
            t_pos: None,
            t_neg: None,
        }
    }

    pub fn with_totals(mut self, t_pos: u64, t_neg: u64) -> Self {
        self.t_pos = Some(t_pos);
        self.t_neg = Some(t_neg);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = (0.0..=1.0).contains(&self.mu_pos)
            && (0.0..=1.0).contains(&self.mu_neg)
            && (self.mu_pos + self.mu_neg - 1.0).abs() <= 1e-12;
        if !ok {
            return Err(Error::Config(format!(
                "class weights must lie in [0,1] and sum to 1, got {} and {}",
                self.mu_pos, self.mu_neg
            )));
        }
        Ok(())
    }
}

/// Aggregate rates from a confusion table. Per-class rates are `None` when
/// the corresponding class is absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub error_rate: f64,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    /// μ₊·(T₊−M₊)/T₊ + μ₋·(T₋−M₋)/T₋; balanced accuracy at μ = 1/2.
    pub weighted_sum: Option<f64>,
}

pub fn metrics(conf: &ConfusionCounts, spec: &ImbalanceSpec) -> Result<Metrics> {
    spec.validate()?;
    if conf.total() == 0 {
        return Err(Error::Data("empty confusion table: nothing evaluated".into()));
    }
    let error_rate = conf.mistakes() as f64 / conf.total() as f64;
    let sensitivity =
        (conf.t_pos > 0).then(|| (conf.t_pos - conf.m_pos) as f64 / conf.t_pos as f64);
    let specificity =
        (conf.t_neg > 0).then(|| (conf.t_neg - conf.m_neg) as f64 / conf.t_neg as f64);
    let weighted_sum = match (sensitivity, specificity) {
        (Some(se), Some(sp)) => Some(spec.mu_pos * se + spec.mu_neg * sp),
        _ => None,
    };
    Ok(Metrics {
        error_rate,
        sensitivity,
        specificity,
        weighted_sum,
    })
}

/// Cost ratio ρ = μ₊T₋/(μ₋T₊); callers map it to c₊ = ρ, c₋ = 1.
pub fn rho_from_priors(spec: &ImbalanceSpec) -> Result<f64> {
    spec.validate()?;
    let (Some(t_pos), Some(t_neg)) = (spec.t_pos, spec.t_neg) else {
        return Err(Error::Config(
            "rho needs known class totals; fill t_pos/t_neg first".into(),
        ));
    };
    if t_pos == 0 || t_neg == 0 {
        return Err(Error::Config("class totals must be positive to derive rho".into()));
    }
    if spec.mu_neg <= 0.0 {
        return Err(Error::Config("mu_neg must be positive to derive rho".into()));
    }
    Ok(spec.mu_pos * t_neg as f64 / (spec.mu_neg * t_pos as f64))
}

/// Per-round record of one online training pass.
#[derive(Debug, Clone, Default)]
pub struct TrainLog {
    /// Suffered (cost-weighted) hinge loss per round.
    pub losses: Vec<f64>,
    /// Online prediction mistakes (before each update).
    pub online_mistakes: u64,
    /// Rounds with a fired update.
    pub updates: u64,
    /// Wall time of the learn loop only.
    pub train_seconds: f64,
}

/// Runs one online pass: for each example predict, reveal, update.
pub fn train_online<'a, M: OnlineModel>(
    model: &mut M,
    stream: impl IntoIterator<Item = &'a SparseExample>,
) -> Result<TrainLog> {
    let mut log = TrainLog::default();
    let start = Instant::now();
    for ex in stream {
        let outcome = model.learn(ex)?;
        if outcome.predicted != ex.y {
            log.online_mistakes += 1;
        }
        if outcome.updated {
            log.updates += 1;
        }
        log.losses.push(outcome.loss);
    }
    log.train_seconds = start.elapsed().as_secs_f64();
    Ok(log)
}

/// Scores a frozen weight vector on a labeled set.
pub fn evaluate(w: &DenseWeights, test: &[SparseExample]) -> ConfusionCounts {
    let mut conf = ConfusionCounts::default();
    for ex in test {
        let predicted = Label::from_margin(ex.x.dot(w));
        conf.record(ex.y, predicted);
    }
    conf
}

/// Fixed optimization budget for the offline comparator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparatorConfig {
    /// Full-batch passes.
    pub epochs: usize,
    /// Step size at epoch k is `alpha0 / sqrt(k)`.
    pub alpha0: f64,
}

impl Default for ComparatorConfig {
    fn default() -> Self {
        ComparatorConfig {
            epochs: 400,
            alpha0: 1.0,
        }
    }
}

/// Total objective Σ_t c_{y_t}·[1 − y_t·w·x_t]₊ + λ‖w‖₁.
pub fn l1_hinge_objective(
    w: &DenseWeights,
    data: &[SparseExample],
    lambda: f64,
    c_pos: f64,
    c_neg: f64,
) -> f64 {
    let hinge: f64 = data
        .iter()
        .map(|ex| {
            let c = if ex.y == Label::Pos { c_pos } else { c_neg };
            hinge_loss(ex.x.dot(w), ex.y, c)
        })
        .sum();
    let l1: f64 = w.values().iter().map(|v| v.abs()).sum();
    hinge + lambda * l1
}

/// Deterministic offline approximation of argmin_w Σ c_y ℓ(w) + λ‖w‖₁:
/// full-batch subgradient steps on the hinge term with an exact shrinkage
/// step for the L1 term, decaying step size, best iterate kept by objective.
pub fn offline_comparator(
    data: &[SparseExample],
    lambda: f64,
    c_pos: f64,
    c_neg: f64,
) -> Result<DenseWeights> {
    offline_comparator_with(data, lambda, c_pos, c_neg, ComparatorConfig::default())
}

pub fn offline_comparator_with(
    data: &[SparseExample],
    lambda: f64,
    c_pos: f64,
    c_neg: f64,
    cfg: ComparatorConfig,
) -> Result<DenseWeights> {
    if data.is_empty() {
        return Err(Error::Data("comparator needs a non-empty dataset".into()));
    }
    if lambda < 0.0 || c_pos <= 0.0 || c_neg <= 0.0 {
        return Err(Error::Config(
            "comparator requires lambda >= 0 and positive class costs".into(),
        ));
    }
    let n = data.len() as f64;
    let mut w = DenseWeights::new();
    let mut best = w.clone();
    let mut best_obj = l1_hinge_objective(&w, data, lambda, c_pos, c_neg);
    for k in 1..=cfg.epochs {
        let alpha = cfg.alpha0 / (k as f64).sqrt();
        // mean subgradient of the hinge term
        let mut grad = DenseWeights::new();
        for ex in data {
            if ex.y.sign() * ex.x.dot(&w) < 1.0 {
                let c = if ex.y == Label::Pos { c_pos } else { c_neg };
                grad.scaled_add(&ex.x, -c * ex.y.sign() / n);
            }
        }
        let mut next = w.clone();
        next.scaled_add_dense(&grad, -alpha);
        w = next.soft_threshold(alpha * lambda / n);
        let obj = l1_hinge_objective(&w, data, lambda, c_pos, c_neg);
        if obj < best_obj {
            best_obj = obj;
            best = w.clone();
        }
    }
    Ok(best)
}

/// Checkpointed empirical regret: R_T = Σ_{t≤T} (online loss − comparator loss).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretPoint {
    pub t: usize,
    pub online_cum: f64,
    pub comparator_cum: f64,
    pub regret: f64,
    pub regret_over_t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretTrace {
    /// Cumulative online loss after each round.
    pub online_cum: Vec<f64>,
    /// Cumulative comparator loss after each round.
    pub comparator_cum: Vec<f64>,
    pub checkpoints: Vec<RegretPoint>,
}

pub fn regret_trace(
    online_losses: &[f64],
    comparator_losses: &[f64],
    checkpoints: &[usize],
) -> Result<RegretTrace> {
    if online_losses.len() != comparator_losses.len() {
        return Err(Error::Data(format!(
            "loss series lengths differ: {} online vs {} comparator",
            online_losses.len(),
            comparator_losses.len()
        )));
    }
    let cum = |xs: &[f64]| -> Vec<f64> {
        xs.iter()
            .scan(0.0, |acc, &x| {
                *acc += x;
                Some(*acc)
            })
            .collect()
    };
    let online_cum = cum(online_losses);
    let comparator_cum = cum(comparator_losses);
    let mut points = Vec::with_capacity(checkpoints.len());
    for &t in checkpoints {
        if t == 0 || t > online_cum.len() {
            return Err(Error::Data(format!(
                "checkpoint {t} outside 1..={}",
                online_cum.len()
            )));
        }
        let regret = online_cum[t - 1] - comparator_cum[t - 1];
        points.push(RegretPoint {
            t,
            online_cum: online_cum[t - 1],
            comparator_cum: comparator_cum[t - 1],
            regret,
            regret_over_t: regret / t as f64,
        });
    }
    Ok(RegretTrace {
        online_cum,
        comparator_cum,
        checkpoints: points,
    })
}

/// One sweep cell: a (λ, seed) training run scored on the test set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub lambda: f64,
    pub seed: u64,
    pub achieved_sparsity: f64,
    pub test_error: f64,
    pub weighted_sum: Option<f64>,
    pub updates: u64,
    pub train_seconds: f64,
}

/// Mean ± sample std over seeds for one λ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub lambda: f64,
    pub mean_sparsity: f64,
    pub std_sparsity: f64,
    pub mean_error: f64,
    pub std_error: f64,
}

pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Trains one fresh model per (λ, seed) cell — single pass over a seeded
/// permutation — and scores the frozen final weights on `test`. Cells run
/// in parallel; results are sorted by (λ, seed) so output order never
/// depends on scheduling.
pub fn sparsity_sweep<M, F>(
    factory: F,
    train: &[SparseExample],
    test: &[SparseExample],
    ambient_dim: usize,
    lambda_grid: &[f64],
    seeds: &[u64],
    imbalance: &ImbalanceSpec,
) -> Result<(Vec<SweepPoint>, Vec<SweepSummary>)>
where
    M: OnlineModel,
    F: Fn(f64) -> Result<M> + Sync,
{
    if lambda_grid.is_empty() {
        return Err(Error::Config("lambda grid must be non-empty".into()));
    }
    if seeds.is_empty() {
        return Err(Error::Config("at least one seed is required".into()));
    }
    let cells: Vec<(f64, u64)> = lambda_grid
        .iter()
        .flat_map(|&l| seeds.iter().map(move |&s| (l, s)))
        .collect();
    let mut points = cells
        .par_iter()
        .map(|&(lambda, seed)| -> Result<SweepPoint> {
            let mut model = factory(lambda)?;
            let log = train_online(&mut model, permuted(train, seed))?;
            let w = model.final_weights();
            let conf = evaluate(&w, test);
            let m = metrics(&conf, imbalance)?;
            Ok(SweepPoint {
                lambda,
                seed,
                achieved_sparsity: w.sparsity(ambient_dim),
                test_error: m.error_rate,
                weighted_sum: m.weighted_sum,
                updates: log.updates,
                train_seconds: log.train_seconds,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    points.sort_by(|a, b| {
        a.lambda
            .total_cmp(&b.lambda)
            .then(a.seed.cmp(&b.seed))
    });

    let mut summaries = Vec::with_capacity(lambda_grid.len());
    let mut grid_sorted: Vec<f64> = lambda_grid.to_vec();
    grid_sorted.sort_by(f64::total_cmp);
    grid_sorted.dedup();
    for lambda in grid_sorted {
        let group: Vec<&SweepPoint> = points
            .iter()
            .filter(|p| p.lambda == lambda)
            .collect();
        let sparsities: Vec<f64> = group.iter().map(|p| p.achieved_sparsity).collect();
        let errors: Vec<f64> = group.iter().map(|p| p.test_error).collect();
        let (mean_sparsity, std_sparsity) = mean_std(&sparsities);
        let (mean_error, std_error) = mean_std(&errors);
        summaries.push(SweepSummary {
            lambda,
            mean_sparsity,
            std_sparsity,
            mean_error,
            std_error,
        });
    }
    Ok((points, summaries))
}
