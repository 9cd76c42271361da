//! Average regret over time against the best fixed comparator in
//! hindsight. On a learnable stream R_T/T should shrink as T grows.

use solstream::data::{generate_synthetic, permuted, SyntheticSpec};
use solstream::eval::{offline_comparator, regret_trace};
use solstream::learner::{hinge_loss, make_learner, AlgoKind, LearnerConfig, OnlineModel};

fn main() -> solstream::Result<()> {
    let spec = SyntheticSpec::desk(8_000, 0, 1);
    let data = generate_synthetic(&spec)?;
    let stream: Vec<_> = permuted(&data.train, 0).collect();

    let cfg = LearnerConfig::new(AlgoKind::Fsol).eta(0.25).lambda(0.0);
    let mut model = make_learner(cfg, spec.ambient_dim)?;
    let mut online = Vec::with_capacity(stream.len());
    for ex in &stream {
        online.push(model.learn(ex)?.loss);
    }

    // best fixed weight vector for the same loss, found offline
    let w_star = offline_comparator(&data.train, 0.0, 1.0, 1.0)?;
    let fixed: Vec<f64> = stream
        .iter()
        .map(|ex| hinge_loss(ex.x.dot(&w_star), ex.y, 1.0))
        .collect();

    let trace = regret_trace(&online, &fixed, &[1_000, 2_000, 4_000, 8_000])?;
    println!("{:>6} {:>12} {:>12} {:>12} {:>10}", "T", "online", "fixed", "regret", "R_T/T");
    for p in &trace.checkpoints {
        println!(
            "{:>6} {:>12.2} {:>12.2} {:>12.2} {:>10.4}",
            p.t, p.online_cum, p.comparator_cum, p.regret, p.regret_over_t
        );
    }
    Ok(())
}
