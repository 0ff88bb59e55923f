//! Build the GF(2) matrices B_m and look at their gate census.
//!
//! cargo run --example stabilizer_matrices -- 8

use qubit_mubs::gf2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(4);
    let b = gf2::build(m)?;
    println!("construction: {:?}", gf2::construction_for(m)?);
    if m <= 32 {
        print!("{}", gf2::dump(&b));
    }
    let c = gf2::gate_census(&b);
    println!("{} Phase + {} CPhase gates ({} nonzeros)", c.n_phase, c.n_cphase, b.count_ones());

    println!("\nsize  phase  cphase");
    for m in gf2::DOUBLING_SIZES.iter().chain(&gf2::TRIPLING_SIZES) {
        let c = gf2::gate_census(&gf2::build(*m)?);
        println!("{m:>4}  {:>5}  {:>6}", c.n_phase, c.n_cphase);
    }
    Ok(())
}
