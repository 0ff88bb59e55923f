//! Compile U_m into Phase, CPhase and Hadamard gates and check the netlist.

use qubit_mubs::{circuit, gf2};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(4);
    let g = circuit::compile(&gf2::build(m)?)?;
    let text = circuit::emit(&g);
    print!("{text}");
    assert_eq!(circuit::parse(&text)?, g);

    if m <= 8 {
        let r = circuit::check_against_generator(&g, 1e-12, false)?;
        println!("# max |evaluate - U_{m}| = {:e} ({})", r.max_deviation, if r.passed { "pass" } else { "fail" });
    }
    Ok(())
}
