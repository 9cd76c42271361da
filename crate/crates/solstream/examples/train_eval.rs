//! Train a first-order sparse online learner on a synthetic stream and
//! report test metrics.
//!
//! ```bash
//! cargo run --release --example train_eval
//! ```

use solstream::data::{generate_synthetic, permuted, SyntheticSpec};
use solstream::eval::{evaluate, metrics, train_online, ImbalanceSpec};
use solstream::learner::{make_learner, AlgoKind, LearnerConfig, OnlineModel};

fn main() -> solstream::Result<()> {
    let spec = SyntheticSpec::desk(5_000, 1_000, 42);
    let data = generate_synthetic(&spec)?;

    let cfg = LearnerConfig::new(AlgoKind::Fsol).eta(0.5).lambda(0.02);
    let mut model = make_learner(cfg, spec.ambient_dim)?;

    let log = train_online(&mut model, permuted(&data.train, 0))?;
    println!(
        "trained {} rounds, {} updates, {} online mistakes",
        model.rounds(),
        model.update_count(),
        log.online_mistakes
    );

    let w = model.final_weights();
    let conf = evaluate(&w, &data.test);
    let m = metrics(&conf, &ImbalanceSpec::balanced())?;
    println!(
        "test error {:.4}  sparsity {:.3}  ({} of {} weights active)",
        m.error_rate,
        w.sparsity(spec.ambient_dim),
        w.nnz(),
        spec.ambient_dim
    );
    if let (Some(se), Some(sp)) = (m.sensitivity, m.specificity) {
        println!("sensitivity {se:.4}  specificity {sp:.4}");
    }
    Ok(())
}
