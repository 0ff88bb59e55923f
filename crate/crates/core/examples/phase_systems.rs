//! Three routes to the phase vector P_m, and the generator trace.

use qubit_mubs::gf2;
use qubit_mubs::phase::{self, BitIndex};
use rand::SeedableRng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for m in [1, 2, 4] {
        let p = phase::phase_vector(&gf2::build(m)?)?;
        println!("P_{m} = diag({})", p.entries().iter().map(|e| e.token()).collect::<Vec<_>>().join(", "));
    }

    // P_8 from the quadratic form and from V_4
    let direct = phase::phase_vector(&gf2::build(8)?)?;
    let chopped = phase::chop(&phase::v_matrix(4)?);
    println!("\nP_8 from B_8 == chop(V_4): {}", direct == chopped);

    // far beyond anything materializable
    let m = 256;
    let b = gf2::build(m)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let agree = (0..1000).all(|_| {
        let j = BitIndex::random(m, &mut rng);
        phase::phase_from_b(&b, &j).ok() == phase::chop_recursion_phase(m, &j).ok()
    });
    println!("m=256, 1000 random labels, quadratic form == chop recursion: {agree}");

    for m in [1, 2, 4, 8, 16] {
        println!("tr V_{m} = {}", phase::trace_v(m)?);
    }
    for m in [6, 12] {
        println!("tr V_{m} = {} (tripled)", phase::trace_v(m)?);
    }
    Ok(())
}
