//! Verify the cycle of 2^m + 1 bases with the tier that covers m.
//!
//! cargo run --release --example verify_cycle -- 8

use qubit_mubs::verify;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sizes: Vec<usize> = match std::env::args().nth(1) {
        Some(s) => vec![s.parse()?],
        None => vec![1, 2, 4, 6, 12, 24],
    };
    for m in sizes {
        let r = verify::verify_auto(m)?;
        println!(
            "m={m:>2}  {:?}  {}  bases={}  pairs={}  {:.2}s",
            r.mode, r.status, r.bases, r.entries_checked, r.wall_time_s
        );
    }
    Ok(())
}
