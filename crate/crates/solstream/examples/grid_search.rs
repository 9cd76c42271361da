//! Cross-validated hyperparameter search at λ = 0: the learning rate η
//! over {2⁻¹..2⁹} and, for algorithms that have one, the secondary
//! parameter over {2⁻⁵..2⁵}. Ties break toward the smaller values.

use solstream::bench::{grid_search, AlgoSpec};
use solstream::data::{generate_synthetic, SyntheticSpec};
use solstream::eval::ImbalanceSpec;

fn main() -> solstream::Result<()> {
    let spec = SyntheticSpec::desk(1_000, 0, 17);
    let data = generate_synthetic(&spec)?;

    for name in ["fsol", "ssol-diag"] {
        let algo = AlgoSpec::from_cli_name(name)?;
        let result = grid_search(
            &algo,
            &data.train,
            spec.ambient_dim,
            5,
            0,
            &ImbalanceSpec::balanced(),
        )?;
        let b = &result.best_cell;
        println!(
            "{name}: {} cells, best eta {} secondary {:?} -> cv error {:.4}",
            result.cells.len(),
            b.eta,
            b.secondary,
            b.score
        );
    }
    Ok(())
}
