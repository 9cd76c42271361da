//! The sparse online learner family: first-order and second-order
//! dual-averaging updates with L1 soft-thresholding, plus cost-sensitive
//! variants of each.
//!
//! One round = predict on x, reveal y, suffer hinge loss, update. The
//! first-order learner keeps only the subgradient sum θ; the second-order
//! learners additionally maintain A⁻¹ (full matrix or diagonal) and derive
//! the iterate from u = A⁻¹θ before thresholding.

use serde::{Deserialize, Serialize};

use crate::data::{Label, SparseExample};
use crate::error::{Error, Result};
use crate::sparse::{DenseWeights, SparseVector, SymMatrix};

/// Learner family member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlgoKind {
    Fsol,
    SsolFull,
    SsolDiag,
    CsFsol,
    CsSsolFull,
    CsSsolDiag,
}

impl AlgoKind {
    pub fn is_second_order(self) -> bool {
        !matches!(self, AlgoKind::Fsol | AlgoKind::CsFsol)
    }

    pub fn is_cost_sensitive(self) -> bool {
        matches!(
            self,
            AlgoKind::CsFsol | AlgoKind::CsSsolFull | AlgoKind::CsSsolDiag
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            AlgoKind::Fsol => "fsol",
            AlgoKind::SsolFull => "ssol",
            AlgoKind::SsolDiag => "ssol-diag",
            AlgoKind::CsFsol => "cs-fsol",
            AlgoKind::CsSsolFull => "cs-ssol",
            AlgoKind::CsSsolDiag => "cs-ssol-diag",
        }
    }
}

/// Regularization path for the per-round threshold λ_t.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LambdaSchedule {
    /// λ_t = η·λ, the first-order default.
    ConstEtaLambda,
    /// λ_t = λ/t, the second-order default.
    InvT,
    /// λ_t = λ.
    Constant,
}

impl LambdaSchedule {
    pub fn default_for(kind: AlgoKind) -> Self {
        if kind.is_second_order() {
            LambdaSchedule::InvT
        } else {
            LambdaSchedule::ConstEtaLambda
        }
    }
}

/// Hyperparameters for one learner instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub kind: AlgoKind,
    pub eta: f64,
    pub lambda: f64,
    /// Second-order damping; ignored by first-order kinds.
    pub r: f64,
    pub c_pos: f64,
    pub c_neg: f64,
    pub schedule: LambdaSchedule,
    /// Hard ceiling on the ambient dimension for the full-matrix kinds,
    /// which cost O(d²) per round. Beyond it the diagonal kinds apply.
    pub full_dim_cap: usize,
}

pub const DEFAULT_FULL_DIM_CAP: usize = 4096;

impl LearnerConfig {
    pub fn new(kind: AlgoKind) -> Self {
        LearnerConfig {
            kind,
            eta: 1.0,
            lambda: 0.0,
            r: 1.0,
            c_pos: 1.0,
            c_neg: 1.0,
            schedule: LambdaSchedule::default_for(kind),
            full_dim_cap: DEFAULT_FULL_DIM_CAP,
        }
    }

    pub fn eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn r(mut self, r: f64) -> Self {
        self.r = r;
        self
    }

    pub fn costs(mut self, c_pos: f64, c_neg: f64) -> Self {
        self.c_pos = c_pos;
        self.c_neg = c_neg;
        self
    }

    pub fn schedule(mut self, schedule: LambdaSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn full_dim_cap(mut self, cap: usize) -> Self {
        self.full_dim_cap = cap;
        self
    }

    pub fn cost_for(&self, y: Label) -> f64 {
        match y {
            Label::Pos => self.c_pos,
            Label::Neg => self.c_neg,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::Config(format!("eta must be positive, got {}", self.eta)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!(
                "lambda must be non-negative, got {}",
                self.lambda
            )));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::Config(format!("r must be positive, got {}", self.r)));
        }
        if !(self.c_pos > 0.0 && self.c_pos.is_finite())
            || !(self.c_neg > 0.0 && self.c_neg.is_finite())
        {
            return Err(Error::Config(format!(
                "class costs must be positive, got c_pos={} c_neg={}",
                self.c_pos, self.c_neg
            )));
        }
        if !self.kind.is_cost_sensitive() && (self.c_pos != 1.0 || self.c_neg != 1.0) {
            return Err(Error::Config(format!(
                "{} is cost-insensitive and requires c_pos = c_neg = 1 (got {} and {}); \
                 use the cs- variant for class weighting",
                self.kind.name(),
                self.c_pos,
                self.c_neg
            )));
        }
        if self.full_dim_cap == 0 {
            return Err(Error::Config("full_dim_cap must be positive".into()));
        }
        Ok(())
    }
}

/// The inverse second-moment proxy A⁻¹, shaped per kind.
#[derive(Debug, Clone, PartialEq)]
pub enum AInv {
    /// First-order kinds carry none.
    None,
    Full(SymMatrix),
    /// Growable diagonal; coordinates never touched stay at 1.
    Diag(Vec<f64>),
}

/// Everything a learner carries between rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    /// Accumulated (cost-scaled) subgradient sum θ_t.
    pub theta: DenseWeights,
    /// The iterate w_t materialized on the most recent round.
    pub w: DenseWeights,
    pub a_inv: AInv,
    /// Round counter; 1 before any example is processed.
    pub t: u64,
}

impl ModelState {
    /// The diagonal of A⁻¹, padded with ones to `dim`; None for first-order.
    pub fn a_inv_diagonal(&self, dim: usize) -> Option<Vec<f64>> {
        match &self.a_inv {
            AInv::None => None,
            AInv::Full(m) => Some((0..dim).map(|i| m.get(i, i)).collect()),
            AInv::Diag(a) => Some((0..dim).map(|i| a.get(i).copied().unwrap_or(1.0)).collect()),
        }
    }
}

/// Outcome of one prediction, before the label is revealed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub margin: f64,
    pub label: Label,
}

/// Outcome of one full online round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundOutcome {
    pub margin: f64,
    pub predicted: Label,
    /// Cost-weighted hinge loss c_y·[1 − y·margin]₊.
    pub loss: f64,
    /// True iff loss > 0 and the subgradient update fired.
    pub updated: bool,
}

/// Hinge loss with class cost: c_y·max(1 − y·margin, 0).
pub fn hinge_loss(margin: f64, y: Label, c_y: f64) -> f64 {
    c_y * (1.0 - y.sign() * margin).max(0.0)
}

/// The per-round threshold λ_t.
pub fn lambda_schedule(cfg: &LearnerConfig, t: u64) -> f64 {
    debug_assert!(t >= 1);
    match cfg.schedule {
        LambdaSchedule::ConstEtaLambda => cfg.eta * cfg.lambda,
        LambdaSchedule::InvT => cfg.lambda / t as f64,
        LambdaSchedule::Constant => cfg.lambda,
    }
}

/// Shared contract for learners and baselines: predict, learn, expose a
/// frozen weight vector for offline evaluation.
pub trait OnlineModel {
    /// Margin and label from the current working weights; does not mutate.
    fn predict(&self, x: &SparseVector) -> Prediction;
    /// Processes one labeled example: predict, suffer loss, update.
    fn learn(&mut self, ex: &SparseExample) -> Result<RoundOutcome>;
    /// The classifier to evaluate with after training.
    fn final_weights(&self) -> DenseWeights;
    /// Examples processed so far.
    fn rounds(&self) -> u64;
    /// Rounds on which the error-driven update fired.
    fn update_count(&self) -> u64;
    fn name(&self) -> &'static str;
}

/// One learner instance: config plus evolving state.
#[derive(Debug, Clone)]
pub struct Learner {
    cfg: LearnerConfig,
    state: ModelState,
    last_lambda: f64,
    updates: u64,
}

/// Builds the initial state: θ = 0, t = 1, A⁻¹ = I for second-order kinds.
/// `ambient_dim_hint` pre-sizes second-order storage; 0 means grow on demand.
pub fn make_learner(cfg: LearnerConfig, ambient_dim_hint: usize) -> Result<Learner> {
    cfg.validate()?;
    let a_inv = match cfg.kind {
        AlgoKind::Fsol | AlgoKind::CsFsol => AInv::None,
        AlgoKind::SsolFull | AlgoKind::CsSsolFull => {
            if ambient_dim_hint > cfg.full_dim_cap {
                return Err(full_cap_error(ambient_dim_hint, cfg.full_dim_cap));
            }
            AInv::Full(SymMatrix::identity(ambient_dim_hint))
        }
        AlgoKind::SsolDiag | AlgoKind::CsSsolDiag => AInv::Diag(vec![1.0; ambient_dim_hint]),
    };
    let last_lambda = lambda_schedule(&cfg, 1);
    Ok(Learner {
        cfg,
        state: ModelState {
            theta: DenseWeights::new(),
            w: DenseWeights::new(),
            a_inv,
            t: 1,
        },
        last_lambda,
        updates: 0,
    })
}

fn full_cap_error(dim: usize, cap: usize) -> Error {
    Error::Config(format!(
        "ambient dimension {dim} exceeds the full-matrix cap {cap} (O(d²) cost); \
         use the diagonal kind (ssol-diag / cs-ssol-diag) for high-dimensional data"
    ))
}

impl Learner {
    pub fn new(cfg: LearnerConfig, ambient_dim_hint: usize) -> Result<Self> {
        make_learner(cfg, ambient_dim_hint)
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.cfg
    }

    pub fn state(&self) -> &ModelState {
        &self.state
    }

    /// λ_t used on the most recent round (λ₁ if none yet).
    pub fn last_lambda(&self) -> f64 {
        self.last_lambda
    }

    /// Materializes the iterate from the current θ (and A⁻¹) with the most
    /// recent λ_t — the classifier a single training pass hands to test time.
    pub fn materialize(&self) -> DenseWeights {
        let lambda_t = self.last_lambda;
        match &self.state.a_inv {
            AInv::None => self.state.theta.soft_threshold(lambda_t),
            AInv::Full(m) => {
                DenseWeights::from_vec(m.mul_dense(&self.state.theta)).soft_threshold(lambda_t)
            }
            AInv::Diag(a) => {
                let u: Vec<f64> = self
                    .state
                    .theta
                    .values()
                    .iter()
                    .enumerate()
                    .map(|(i, &th)| a.get(i).copied().unwrap_or(1.0) * th)
                    .collect();
                DenseWeights::from_vec(u).soft_threshold(lambda_t)
            }
        }
    }

    fn finish_round(
        &mut self,
        w: DenseWeights,
        lambda_t: f64,
        x: &SparseVector,
        y: Label,
    ) -> Result<RoundOutcome> {
        let margin = x.dot(&w);
        if !margin.is_finite() {
            return Err(Error::Numeric(format!(
                "margin diverged to {margin} at round {}",
                self.state.t
            )));
        }
        let predicted = Label::from_margin(margin);
        let c_y = self.cfg.cost_for(y);
        let loss = hinge_loss(margin, y, c_y);
        let updated = loss > 0.0;
        if updated {
            self.state.theta.scaled_add(x, self.cfg.eta * c_y * y.sign());
            self.updates += 1;
        }
        self.state.w = w;
        self.last_lambda = lambda_t;
        self.state.t += 1;
        Ok(RoundOutcome {
            margin,
            predicted,
            loss,
            updated,
        })
    }

    /// w_t = sign(θ)⊙[|θ|−λ_t]₊; update θ on positive loss.
    fn fsol_step(&mut self, x: &SparseVector, y: Label) -> Result<RoundOutcome> {
        let lambda_t = lambda_schedule(&self.cfg, self.state.t);
        let w = self.state.theta.soft_threshold(lambda_t);
        self.finish_round(w, lambda_t, x, y)
    }

    /// Rank-one A⁻¹ refresh (every round), then u = A⁻¹θ, w = T_λ(u).
    fn ssol_full_step(&mut self, x: &SparseVector, y: Label) -> Result<RoundOutcome> {
        let lambda_t = lambda_schedule(&self.cfg, self.state.t);
        let AInv::Full(m) = &mut self.state.a_inv else {
            unreachable!("full kind carries a full matrix")
        };
        if let Some(max) = x.max_index() {
            let need = max + 1;
            if need > self.cfg.full_dim_cap {
                return Err(full_cap_error(need, self.cfg.full_dim_cap));
            }
            if need > m.dim() {
                m.grow(need);
            }
            let v = m.mul_sparse(x);
            let denom = self.cfg.r + x.dot_slice(&v);
            m.rank_one_subtract(&v, denom);
        }
        let u = DenseWeights::from_vec(m.mul_dense(&self.state.theta));
        let w = u.soft_threshold(lambda_t);
        self.finish_round(w, lambda_t, x, y)
    }

    /// Per-coordinate A⁻¹ refresh on x's support, then u_i = a_i·θ_i.
    fn ssol_diag_step(&mut self, x: &SparseVector, y: Label) -> Result<RoundOutcome> {
        let lambda_t = lambda_schedule(&self.cfg, self.state.t);
        let AInv::Diag(a) = &mut self.state.a_inv else {
            unreachable!("diag kind carries a diagonal")
        };
        if let Some(max) = x.max_index() {
            if max + 1 > a.len() {
                a.resize(max + 1, 1.0);
            }
            // Denominator uses the pre-round diagonal in full.
            let mut denom = self.cfg.r;
            for (i, xi) in x.iter() {
                denom += xi * (a[i] * xi);
            }
            for (i, xi) in x.iter() {
                let v = a[i] * xi;
                a[i] -= v * v / denom;
            }
        }
        let u: Vec<f64> = self
            .state
            .theta
            .values()
            .iter()
            .enumerate()
            .map(|(i, &th)| a.get(i).copied().unwrap_or(1.0) * th)
            .collect();
        let w = DenseWeights::from_vec(u).soft_threshold(lambda_t);
        self.finish_round(w, lambda_t, x, y)
    }
}

impl OnlineModel for Learner {
    fn predict(&self, x: &SparseVector) -> Prediction {
        let margin = x.dot(&self.state.w);
        Prediction {
            margin,
            label: Label::from_margin(margin),
        }
    }

    fn learn(&mut self, ex: &SparseExample) -> Result<RoundOutcome> {
        match self.cfg.kind {
            AlgoKind::Fsol | AlgoKind::CsFsol => self.fsol_step(&ex.x, ex.y),
            AlgoKind::SsolFull | AlgoKind::CsSsolFull => self.ssol_full_step(&ex.x, ex.y),
            AlgoKind::SsolDiag | AlgoKind::CsSsolDiag => self.ssol_diag_step(&ex.x, ex.y),
        }
    }

    fn final_weights(&self) -> DenseWeights {
        self.materialize()
    }

    fn rounds(&self) -> u64 {
        self.state.t - 1
    }

    fn update_count(&self) -> u64 {
        self.updates
    }

    fn name(&self) -> &'static str {
        self.cfg.kind.name()
    }
}
