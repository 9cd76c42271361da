//! Cost-sensitive learning on a 1:99 stream with unflagged positives.
//!
//! The regime where per-class costs actually matter is not "few positives,
//! clean labels" — a separable stream stays separable after subsampling, and
//! the plain hinge learner handles it fine. The interesting case is when
//! most true positives enter the stream labeled negative (only a handful get
//! flagged), so the majority class actively pulls the boundary the wrong
//! way. Upweighting the few flagged positives by ρ = μ₊T₋/(μ₋T₊) lets them
//! out-pull the mislabeled mass.
//!
//! This example builds that stream: subsample to 1600:8400, then keep the
//! positive label on only 100 of the 1600 — the rest become "negatives" as
//! far as training can tell. Evaluation uses the clean test split.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use solstream::data::{
    generate_synthetic, permuted, subsample_imbalanced, Label, SparseExample, SyntheticSpec,
};
use solstream::eval::{evaluate, metrics, rho_from_priors, train_online, ImbalanceSpec};
use solstream::learner::{make_learner, AlgoKind, LearnerConfig, OnlineModel};

/// Relabels all but `keep` of the positives as negative, in a seeded
/// random order.
fn hide_positives(examples: &mut [SparseExample], keep: usize, seed: u64) {
    let mut pos: Vec<usize> = (0..examples.len())
        .filter(|&i| examples[i].y == Label::Pos)
        .collect();
    pos.shuffle(&mut ChaCha12Rng::seed_from_u64(seed));
    for &i in &pos[keep.min(pos.len())..] {
        examples[i].y = Label::Neg;
    }
}

fn main() -> solstream::Result<()> {
    // tight class overlap, no junk dimensions: the difficulty comes from the
    // hidden positives, not from feature noise
    let spec = SyntheticSpec {
        n_noise: 0,
        noise_var: 0.0,
        mean_range: (-0.05, 0.05),
        ..SyntheticSpec::desk(60_000, 2_000, 33)
    };
    let data = generate_synthetic(&spec)?;

    let (n_pos, n_neg, flagged) = (1_600, 8_400, 100);
    let observed_neg = (n_pos - flagged + n_neg) as u64;
    let imb = ImbalanceSpec::balanced().with_totals(flagged as u64, observed_neg);
    let rho = rho_from_priors(&imb)?;
    println!(
        "stream: {flagged} flagged positives / {observed_neg} apparent negatives \
         ({} of them hidden positives)",
        n_pos - flagged
    );
    println!("cost ratio rho = {rho}\n");

    let configs = [
        (AlgoKind::Fsol, 0.5, 1.0, (1.0, 1.0)),
        (AlgoKind::CsFsol, 0.05, 1.0, (rho, 1.0)),
        (AlgoKind::CsSsolFull, 0.5, 1.0, (rho, 1.0)),
    ];
    for (kind, eta, r, (c_pos, c_neg)) in configs {
        let cfg = LearnerConfig::new(kind)
            .eta(eta)
            .r(r)
            .lambda(0.0)
            .costs(c_pos, c_neg);
        let mut accs = Vec::new();
        for seed in 0..3u64 {
            let mut train = subsample_imbalanced(&data.train, n_pos, n_neg, seed)?;
            hide_positives(&mut train, flagged, seed ^ 0x5eed);
            let mut model = make_learner(cfg, spec.ambient_dim)?;
            train_online(&mut model, permuted(&train, seed))?;
            let m = metrics(
                &evaluate(&model.final_weights(), &data.test),
                &ImbalanceSpec::balanced(),
            )?;
            accs.push(m.weighted_sum.unwrap());
        }
        let mean = accs.iter().sum::<f64>() / accs.len() as f64;
        println!(
            "{:<14} balanced accuracy {:.4}  (seeds: {})",
            kind.name(),
            mean,
            accs.iter().map(|a| format!("{a:.3}")).collect::<Vec<_>>().join(" ")
        );
    }
    Ok(())
}
