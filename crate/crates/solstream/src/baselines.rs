//! Comparison algorithms: truncated gradient, forward-backward splitting,
//! adaptive-gradient variants, cost-sensitive gradient descent, a
//! passive-aggressive learner, and a perceptron with uneven margins.
//!
//! These exist so sweeps can put the sparse dual-averaging learners next to
//! standard online methods under one driver contract. Update rules are the
//! textbook formulations, fixed here so runs are deterministic and testable.

use serde::{Deserialize, Serialize};

use crate::data::{Label, SparseExample};
use crate::error::{Error, Result};
use crate::learner::{hinge_loss, OnlineModel, Prediction, RoundOutcome};
use crate::sparse::{soft_threshold_scalar, DenseWeights, SparseVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaselineKind {
    /// Truncated gradient: hinge gradient steps, periodic soft truncation.
    Stg,
    /// Forward-backward splitting: gradient step then soft-threshold each round.
    Fobos,
    /// Per-coordinate adaptive FOBOS.
    AdaFobos,
    /// Per-coordinate adaptive regularized dual averaging.
    AdaRda,
    /// Cost-sensitive online gradient descent (no sparsification).
    CsOgd,
    /// Cost-sensitive passive-aggressive (no sparsification).
    Cpa,
    /// Perceptron with uneven per-class margins (no sparsification).
    Paum,
}

impl BaselineKind {
    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::Stg => "stg",
            BaselineKind::Fobos => "fobos",
            BaselineKind::AdaFobos => "ada-fobos",
            BaselineKind::AdaRda => "ada-rda",
            BaselineKind::CsOgd => "cs-ogd",
            BaselineKind::Cpa => "cpa",
            BaselineKind::Paum => "paum",
        }
    }

    pub fn is_cost_sensitive(self) -> bool {
        matches!(self, BaselineKind::CsOgd | BaselineKind::Cpa | BaselineKind::Paum)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub kind: BaselineKind,
    pub eta: f64,
    pub lambda: f64,
    /// Truncation period K for the truncated-gradient kind.
    pub k_period: usize,
    /// Damping δ for the adaptive kinds.
    pub delta: f64,
    /// Per-class margin requirements for the uneven-margin perceptron.
    pub tau_pos: f64,
    pub tau_neg: f64,
    /// Class weights; double as the aggressiveness caps C₊/C₋ for the
    /// passive-aggressive kind.
    pub c_pos: f64,
    pub c_neg: f64,
}

impl BaselineConfig {
    pub fn new(kind: BaselineKind) -> Self {
        BaselineConfig {
            kind,
            eta: 1.0,
            lambda: 0.0,
            k_period: 10,
            delta: 1.0,
            tau_pos: 1.0,
            tau_neg: 0.0,
            c_pos: 1.0,
            c_neg: 1.0,
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

    pub fn k_period(mut self, k: usize) -> Self {
        self.k_period = k;
        self
    }

    pub fn delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn margins(mut self, tau_pos: f64, tau_neg: f64) -> Self {
        self.tau_pos = tau_pos;
        self.tau_neg = tau_neg;
        self
    }

    pub fn costs(mut self, c_pos: f64, c_neg: f64) -> Self {
        self.c_pos = c_pos;
        self.c_neg = c_neg;
        self
    }

    fn cost_for(&self, y: Label) -> f64 {
        match y {
            Label::Pos => self.c_pos,
            Label::Neg => self.c_neg,
        }
    }

    fn margin_for(&self, y: Label) -> f64 {
        match y {
            Label::Pos => self.tau_pos,
            Label::Neg => self.tau_neg,
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
        if self.k_period < 1 {
            return Err(Error::Config("k_period must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::Config(format!("delta must be positive, got {}", self.delta)));
        }
        if !(self.c_pos > 0.0 && self.c_pos.is_finite())
            || !(self.c_neg > 0.0 && self.c_neg.is_finite())
        {
            return Err(Error::Config(format!(
                "class costs must be positive, got c_pos={} c_neg={}",
                self.c_pos, self.c_neg
            )));
        }
        if !self.tau_pos.is_finite() || !self.tau_neg.is_finite() {
            return Err(Error::Config("margins must be finite".into()));
        }
        Ok(())
    }
}

/// One baseline instance. `w` is the working weight vector for every kind;
/// the adaptive kinds additionally carry gradient accumulators.
#[derive(Debug, Clone)]
pub struct Baseline {
    cfg: BaselineConfig,
    w: DenseWeights,
    /// Σ g_i for the dual-averaging kind.
    pub(crate) grad_sum: DenseWeights,
    /// Σ g_i² for the adaptive kinds.
    pub(crate) grad_sq: DenseWeights,
    t: u64,
    updates: u64,
}

pub fn make_baseline(cfg: BaselineConfig) -> Result<Baseline> {
    cfg.validate()?;
    Ok(Baseline {
        cfg,
        w: DenseWeights::new(),
        grad_sum: DenseWeights::new(),
        grad_sq: DenseWeights::new(),
        t: 1,
        updates: 0,
    })
}

impl Baseline {
    pub fn new(cfg: BaselineConfig) -> Result<Self> {
        make_baseline(cfg)
    }

    pub fn config(&self) -> &BaselineConfig {
        &self.cfg
    }

    pub fn weights(&self) -> &DenseWeights {
        &self.w
    }

    fn step(&mut self, x: &SparseVector, y: Label) -> Result<RoundOutcome> {
        let margin = x.dot(&self.w);
        if !margin.is_finite() {
            return Err(Error::Numeric(format!(
                "margin diverged to {margin} at round {}",
                self.t
            )));
        }
        let predicted = Label::from_margin(margin);
        let c_y = if self.cfg.kind.is_cost_sensitive() {
            self.cfg.cost_for(y)
        } else {
            1.0
        };
        let loss = hinge_loss(margin, y, c_y);
        let eta = self.cfg.eta;
        let mut updated = false;

        match self.cfg.kind {
            BaselineKind::Stg => {
                if loss > 0.0 {
                    self.w.scaled_add(x, eta * y.sign());
                    updated = true;
                }
                if self.t.is_multiple_of(self.cfg.k_period as u64) {
                    let cut = eta * self.cfg.lambda * self.cfg.k_period as f64;
                    let truncated = self.w.soft_threshold(cut);
                    self.w = truncated;
                }
            }
            BaselineKind::Fobos => {
                if loss > 0.0 {
                    self.w.scaled_add(x, eta * y.sign());
                    updated = true;
                }
                self.w = self.w.soft_threshold(eta * self.cfg.lambda);
            }
            BaselineKind::AdaFobos => {
                if loss > 0.0 {
                    // g = −y·x on hinge violation; accumulate squares first,
                    // then take the adaptively scaled step.
                    for (i, xi) in x.iter() {
                        let g = -y.sign() * xi;
                        let gsq = self.grad_sq.get(i) + g * g;
                        self.grad_sq.set(i, gsq);
                        let scale = self.cfg.delta + gsq.sqrt();
                        self.w.set(i, self.w.get(i) + eta * y.sign() * xi / scale);
                    }
                    updated = true;
                }
                // per-coordinate threshold over the working support
                for i in 0..self.w.dim() {
                    let wi = self.w.get(i);
                    if wi == 0.0 {
                        continue;
                    }
                    let scale = self.cfg.delta + self.grad_sq.get(i).sqrt();
                    self.w
                        .set(i, soft_threshold_scalar(wi, eta * self.cfg.lambda / scale));
                }
            }
            BaselineKind::AdaRda => {
                if loss > 0.0 {
                    for (i, xi) in x.iter() {
                        let g = -y.sign() * xi;
                        self.grad_sum.set(i, self.grad_sum.get(i) + g);
                        self.grad_sq.set(i, self.grad_sq.get(i) + g * g);
                    }
                    updated = true;
                }
                let t = self.t as f64;
                let dim = self.grad_sum.dim();
                for i in 0..dim {
                    let gbar = self.grad_sum.get(i);
                    if gbar == 0.0 && self.w.get(i) == 0.0 {
                        continue;
                    }
                    let scale = eta * t / (self.cfg.delta + self.grad_sq.get(i).sqrt());
                    let mag = (gbar.abs() / t - self.cfg.lambda).max(0.0);
                    self.w.set(i, -gbar.signum() * scale * mag);
                }
            }
            BaselineKind::CsOgd => {
                if loss > 0.0 {
                    self.w.scaled_add(x, eta * c_y * y.sign());
                    updated = true;
                }
            }
            BaselineKind::Cpa => {
                if loss > 0.0 {
                    let sq = x.sq_l2_norm();
                    if sq > 0.0 {
                        let tau = (loss / sq).min(self.cfg.cost_for(y));
                        self.w.scaled_add(x, tau * y.sign());
                        updated = true;
                    }
                }
            }
            BaselineKind::Paum => {
                if y.sign() * margin <= self.cfg.margin_for(y) {
                    self.w.scaled_add(x, eta * y.sign());
                    updated = true;
                }
            }
        }

        self.t += 1;
        if updated {
            self.updates += 1;
        }
        Ok(RoundOutcome {
            margin,
            predicted,
            loss,
            updated,
        })
    }
}

impl OnlineModel for Baseline {
    fn predict(&self, x: &SparseVector) -> Prediction {
        let margin = x.dot(&self.w);
        Prediction {
            margin,
            label: Label::from_margin(margin),
        }
    }

    fn learn(&mut self, ex: &SparseExample) -> Result<RoundOutcome> {
        self.step(&ex.x, ex.y)
    }

    fn final_weights(&self) -> DenseWeights {
        self.w.clone()
    }

    fn rounds(&self) -> u64 {
        self.t - 1
    }

    fn update_count(&self) -> u64 {
        self.updates
    }

    fn name(&self) -> &'static str {
        self.cfg.kind.name()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sv(entries: &[(usize, f64)]) -> SparseVector {
        SparseVector::new(entries.to_vec()).unwrap()
    }

    fn ex(y: Label, entries: &[(usize, f64)]) -> SparseExample {
        SparseExample { y, x: sv(entries) }
    }

    fn random_stream(n: usize, dim: usize, seed: u64) -> Vec<SparseExample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let nnz = rng.random_range(1..=dim.min(3));
                let mut idx: Vec<usize> = (0..dim).collect();
                for i in 0..nnz {
                    let j = rng.random_range(i..dim);
                    idx.swap(i, j);
                }
                idx.truncate(nnz);
                idx.sort_unstable();
                let entries: Vec<(usize, f64)> =
                    idx.into_iter().map(|i| (i, rng.random_range(-2.0..2.0))).collect();
                SparseExample {
                    y: if rng.random_bool(0.5) { Label::Pos } else { Label::Neg },
                    x: SparseVector::new(entries).unwrap(),
                }
            })
            .collect()
    }

    #[test]
    fn fobos_threshold_example() {
        // w = (0.5, −0.1) post-gradient, ηλ = 0.2 → (0.3, 0)
        let w = DenseWeights::from_vec(vec![0.5, -0.1]);
        assert_eq!(w.soft_threshold(0.2).values(), &[0.3, 0.0]);
    }

    #[test]
    fn fobos_with_zero_lambda_is_plain_ogd() {
        let fobos = BaselineConfig::new(BaselineKind::Fobos).eta(0.3).lambda(0.0);
        let ogd = BaselineConfig::new(BaselineKind::CsOgd).eta(0.3);
        let mut a = make_baseline(fobos).unwrap();
        let mut b = make_baseline(ogd).unwrap();
        for e in random_stream(300, 6, 11) {
            let oa = a.learn(&e).unwrap();
            let ob = b.learn(&e).unwrap();
            assert_eq!(oa, ob);
        }
        assert_eq!(a.weights(), b.weights());
    }

    #[test]
    fn cs_ogd_with_equal_costs_matches_scaled_eta() {
        // c₊ = c₋ = 2 at η is the same trajectory as c = 1 at 2η: the loss
        // threshold test (loss > 0) is cost-invariant and steps match.
        let cs = BaselineConfig::new(BaselineKind::CsOgd).eta(0.25).costs(2.0, 2.0);
        let plain = BaselineConfig::new(BaselineKind::CsOgd).eta(0.5);
        let mut a = make_baseline(cs).unwrap();
        let mut b = make_baseline(plain).unwrap();
        for e in random_stream(300, 6, 19) {
            a.learn(&e).unwrap();
            b.learn(&e).unwrap();
            assert_eq!(a.weights(), b.weights());
        }
    }

    #[test]
    fn ada_rda_zero_gradient_keeps_w_zero() {
        let cfg = BaselineConfig::new(BaselineKind::AdaRda).eta(1.0);
        let mut m = make_baseline(cfg).unwrap();
        // margin 0, y = +1: loss 1 > 0 → gradient recorded; but before any
        // example w is exactly 0
        assert_eq!(m.weights().nnz(), 0);
        let o = m.learn(&ex(Label::Pos, &[(0, 1.0)])).unwrap();
        assert_eq!(o.margin, 0.0);
        assert!(m.weights().get(0) > 0.0);
    }

    #[test]
    fn ada_rda_frozen_accumulator_reduction() {
        // With λ = 0 the closed form is w_i = −η·ḡ_i/(δ + √G_i). After one
        // round with x = e₀, y = +1: ḡ = −1, G = 1, so w₀ = η/(δ + 1).
        let cfg = BaselineConfig::new(BaselineKind::AdaRda).eta(0.8).delta(0.5);
        let mut m = make_baseline(cfg).unwrap();
        m.learn(&ex(Label::Pos, &[(0, 1.0)])).unwrap();
        let want = 0.8 / (0.5 + 1.0);
        assert!((m.weights().get(0) - want).abs() < 1e-15);

        // Second round, same example: margin = w₀ < 1 → loss > 0 again.
        // ḡ = −2, G = 2, t = 2 → w₀ = η·2/(δ+√2)·(2/2 − 0)... the t factors
        // cancel: w₀ = η·|ḡ|/(δ+√G).
        m.learn(&ex(Label::Pos, &[(0, 1.0)])).unwrap();
        let want = 0.8 * 2.0 / (0.5 + 2.0f64.sqrt());
        assert!((m.weights().get(0) - want).abs() < 1e-15);
    }

    #[test]
    fn ada_rda_lambda_zeroes_small_average_gradients() {
        // λ larger than |ḡ|/t forces the coordinate to exactly zero.
        let cfg = BaselineConfig::new(BaselineKind::AdaRda).eta(1.0).lambda(2.0);
        let mut m = make_baseline(cfg).unwrap();
        m.learn(&ex(Label::Pos, &[(0, 1.0)])).unwrap();
        assert_eq!(m.weights().get(0), 0.0);
    }

    #[test]
    fn paum_margin_example() {
        let cfg = BaselineConfig::new(BaselineKind::Paum).eta(0.7).margins(1.0, 0.0);
        let mut m = make_baseline(cfg).unwrap();
        // y·margin = 0 ≤ τ₊ = 1 → update even though prediction is correct
        let o = m.learn(&ex(Label::Pos, &[(0, 1.0)])).unwrap();
        assert_eq!(o.predicted, Label::Pos);
        assert!(o.updated);
        assert_eq!(m.weights().get(0), 0.7);
    }

    #[test]
    fn paum_respects_per_class_margins() {
        let cfg = BaselineConfig::new(BaselineKind::Paum).eta(1.0).margins(1.0, 0.0);
        let mut m = make_baseline(cfg).unwrap();
        m.learn(&ex(Label::Pos, &[(0, 1.0)])).unwrap(); // w = (1)
        // negative example with margin −1: y·margin = 1 > τ₋ = 0 → no update
        let o = m.learn(&ex(Label::Neg, &[(0, -1.0)])).unwrap();
        assert!(!o.updated);
        // positive with margin exactly 1: 1 ≤ τ₊ → update fires
        let o = m.learn(&ex(Label::Pos, &[(0, 1.0)])).unwrap();
        assert!(o.updated);
    }

    #[test]
    fn cpa_step_is_capped_and_skips_zero_norm() {
        let cfg = BaselineConfig::new(BaselineKind::Cpa).costs(0.1, 0.1);
        let mut m = make_baseline(cfg).unwrap();
        // loss 1, ‖x‖² = 1 → τ = min(0.1, 1) = 0.1
        let o = m.learn(&ex(Label::Pos, &[(0, 1.0)])).unwrap();
        assert!(o.updated);
        assert!((m.weights().get(0) - 0.1).abs() < 1e-15);

        // empty x: ‖x‖² = 0 → no update even though loss = 1
        let o = m
            .learn(&SparseExample { y: Label::Pos, x: SparseVector::empty() })
            .unwrap();
        assert_eq!(o.loss, 0.1); // c₊·[1−0]₊
        assert!(!o.updated);
    }

    #[test]
    fn cpa_uncapped_step_clears_the_loss() {
        let cfg = BaselineConfig::new(BaselineKind::Cpa).costs(100.0, 100.0);
        let mut m = make_baseline(cfg).unwrap();
        m.learn(&ex(Label::Pos, &[(0, 2.0)])).unwrap();
        // τ = ℓ/‖x‖² = 1/4 → margin after update = 2·(1/4)·2 = 1 exactly
        let o = m.learn(&ex(Label::Pos, &[(0, 2.0)])).unwrap();
        assert_eq!(o.loss, 0.0);
    }

    #[test]
    fn stg_truncates_on_period_only() {
        let cfg = BaselineConfig::new(BaselineKind::Stg).eta(1.0).lambda(0.02).k_period(3);
        let mut m = make_baseline(cfg).unwrap();
        // rounds 1, 2: no truncation (t not divisible by 3)
        m.learn(&ex(Label::Pos, &[(0, 0.1)])).unwrap();
        assert_eq!(m.weights().get(0), 0.1);
        m.learn(&ex(Label::Pos, &[(1, 0.1)])).unwrap();
        assert_eq!(m.weights().get(1), 0.1);
        // round 3: gradient step then truncation by ηλK = 0.06
        m.learn(&ex(Label::Pos, &[(2, 0.1)])).unwrap();
        for i in 0..3 {
            assert!((m.weights().get(i) - 0.04).abs() < 1e-15, "coord {i}");
        }
    }

    #[test]
    fn sparsifying_baselines_actually_sparsify() {
        let stream = random_stream(500, 8, 23);
        for kind in [BaselineKind::Fobos, BaselineKind::AdaFobos, BaselineKind::AdaRda] {
            let cfg = BaselineConfig::new(kind).eta(0.5).lambda(0.4);
            let mut m = make_baseline(cfg).unwrap();
            for e in &stream {
                m.learn(e).unwrap();
            }
            let none = {
                let cfg = BaselineConfig::new(kind).eta(0.5).lambda(0.0);
                let mut m0 = make_baseline(cfg).unwrap();
                for e in &stream {
                    m0.learn(e).unwrap();
                }
                m0.final_weights().nnz()
            };
            assert!(
                m.final_weights().nnz() <= none,
                "{kind:?}: heavy lambda should not densify"
            );
        }
    }

    #[test]
    fn no_update_when_margin_satisfied() {
        // every kind must leave w untouched on a confidently correct round
        // (PAUM gets a margin above its τ)
        for kind in [
            BaselineKind::Stg,
            BaselineKind::Fobos,
            BaselineKind::AdaFobos,
            BaselineKind::AdaRda,
            BaselineKind::CsOgd,
            BaselineKind::Cpa,
            BaselineKind::Paum,
        ] {
            let cfg = BaselineConfig::new(kind).eta(1.0).lambda(0.0);
            let mut m = make_baseline(cfg).unwrap();
            m.learn(&ex(Label::Pos, &[(0, 2.0)])).unwrap();
            let before = m.weights().clone();
            let o = m.learn(&ex(Label::Pos, &[(0, 2.0)])).unwrap();
            assert!(o.loss == 0.0, "{kind:?}");
            assert!(!o.updated, "{kind:?}");
            assert_eq!(m.weights(), &before, "{kind:?}");
        }
    }

    #[test]
    fn validation_rejects_bad_configs() {
        assert!(BaselineConfig::new(BaselineKind::Stg).k_period(0).validate().is_err());
        assert!(BaselineConfig::new(BaselineKind::AdaRda).delta(0.0).validate().is_err());
        assert!(BaselineConfig::new(BaselineKind::Fobos).eta(-1.0).validate().is_err());
        assert!(BaselineConfig::new(BaselineKind::Cpa).costs(0.0, 1.0).validate().is_err());
        assert!(BaselineConfig::new(BaselineKind::Paum).validate().is_ok());
    }
}
