//! Compare the full-matrix and diagonal second-order learners against the
//! first-order one on the same stream.
//!
//! The full variant maintains an exact inverse of a second-moment proxy via
//! rank-one downdates (O(d²) per round), the diagonal variant keeps only
//! the diagonal (O(nnz) per round). On low-dimensional streams they behave
//! similarly; only the diagonal scales to large feature spaces.

use solstream::data::{generate_synthetic, permuted, SyntheticSpec};
use solstream::eval::{evaluate, metrics, train_online, ImbalanceSpec};
use solstream::learner::{make_learner, AlgoKind, LearnerConfig, OnlineModel};

fn main() -> solstream::Result<()> {
    let spec = SyntheticSpec::desk(4_000, 1_000, 3);
    let data = generate_synthetic(&spec)?;

    for kind in [AlgoKind::Fsol, AlgoKind::SsolFull, AlgoKind::SsolDiag] {
        let cfg = match kind {
            AlgoKind::Fsol => LearnerConfig::new(kind).eta(0.5).lambda(0.01),
            _ => LearnerConfig::new(kind).eta(16.0).r(16.0).lambda(0.0001),
        };
        let mut model = make_learner(cfg, spec.ambient_dim)?;
        train_online(&mut model, permuted(&data.train, 0))?;
        let w = model.final_weights();
        let m = metrics(&evaluate(&w, &data.test), &ImbalanceSpec::balanced())?;
        println!(
            "{:<10}  error {:.4}  sparsity {:.3}  updates {}",
            model.name(),
            m.error_rate,
            w.sparsity(spec.ambient_dim),
            model.update_count()
        );
    }

    // the full-matrix learner refuses absurd dimensions up front; use the
    // diagonal variant (or raise the cap) for wide streams
    let wide = LearnerConfig::new(AlgoKind::SsolFull);
    match make_learner(wide, 1_000_000) {
        Err(e) => println!("\nfull second-order at d=1e6: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
