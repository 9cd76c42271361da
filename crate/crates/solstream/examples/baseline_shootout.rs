//! Run every algorithm in the crate once over the same synthetic stream.

use solstream::bench::AlgoSpec;
use solstream::data::{generate_synthetic, permuted, SyntheticSpec};
use solstream::eval::{evaluate, metrics, train_online, ImbalanceSpec};
use solstream::learner::OnlineModel;

const ALGOS: [&str; 13] = [
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
];

fn main() -> solstream::Result<()> {
    let spec = SyntheticSpec::desk(4_000, 1_000, 11);
    let data = generate_synthetic(&spec)?;

    println!(
        "{:<14} {:>8} {:>9} {:>9}",
        "algorithm", "error", "sparsity", "updates"
    );
    for name in ALGOS {
        let mut algo = AlgoSpec::from_cli_name(name)?;
        algo.set_eta(0.5);
        algo.set_lambda(0.01);
        let mut model = algo.build(spec.ambient_dim)?;
        train_online(&mut model, permuted(&data.train, 0))?;
        let w = model.final_weights();
        let m = metrics(&evaluate(&w, &data.test), &ImbalanceSpec::balanced())?;
        println!(
            "{:<14} {:>8.4} {:>9.3} {:>9}",
            name,
            m.error_rate,
            w.sparsity(spec.ambient_dim),
            model.update_count()
        );
    }
    Ok(())
}
