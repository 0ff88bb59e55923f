//! Matrix-free application of U_m via the fast Walsh-Hadamard transform.

use std::time::Instant;

use qubit_mubs::fast::{self, CycleReduction, StateVector};
use qubit_mubs::verify;
use rand::SeedableRng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // one qubit: |0> runs through the z, x and y bases
    let mut v = StateVector::basis(1, 0);
    for k in 0..=3 {
        let a = v.amps();
        println!("U_1^{k}|0> = ({:.3}, {:.3})", a[0], a[1]);
        v = fast::apply_generator(1, &v)?;
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    for m in [12, 16, 24] {
        let v = StateVector::random(m, &mut rng);
        let start = Instant::now();
        let w = fast::apply_generator(m, &v)?;
        let dt = start.elapsed().as_secs_f64();
        println!("m={m}: |U v| - |v| = {:.1e}, {:.1} Mamp/s", w.norm() - v.norm(), (1u64 << m) as f64 / dt / 1e6);
    }

    // powers are reduced modulo the cycle length only after an exact check
    let report = verify::verify_cycle_exact(4)?;
    let r = fast::apply_power(4, 1_000_000, &StateVector::basis(4, 3), CycleReduction::IfVerified(&report))?;
    println!("U_4^{}: applied {} times (reduced: {})", r.requested, r.applied, r.reduced);
    Ok(())
}
