//! Estimate a two-qubit state from simulated measurements in all five bases.

use qubit_mubs::tomography::{self, DensityMatrix};
use rand::SeedableRng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bases = tomography::mub_family(2)?;
    let rho = DensityMatrix::random_mixed(2, &mut rand_chacha::ChaCha8Rng::seed_from_u64(5));

    let exact = tomography::simulate(&rho, &bases, None, 0, false)?;
    println!("exact probabilities: trace distance {:.1e}", exact.trace_distance);

    for shots in [100, 1_000, 10_000, 100_000] {
        let raw = tomography::simulate(&rho, &bases, Some(shots), 1, false)?;
        let proj = tomography::simulate(&rho, &bases, Some(shots), 1, true)?;
        println!(
            "N={shots:>6}: trace distance {:.4} (raw, min eigenvalue {:+.4}), {:.4} projected, fidelity {:.4}",
            raw.trace_distance, raw.raw_min_eigenvalue, proj.trace_distance, proj.fidelity
        );
    }

    let sweep = tomography::sweep(2, &[1_000, 10_000, 100_000], 50)?;
    println!("median trace distance {:?}, log-log slope {:.3}", sweep.median_trace_distance, sweep.log_log_slope);
    Ok(())
}
