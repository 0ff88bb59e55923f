//! Exact arithmetic over Z[i] with power-of-sqrt(2) scales.

use qubit_mubs::exact::GaussianInt;
use qubit_mubs::phase;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x: GaussianInt = "3+4i".parse()?;
    let y: GaussianInt = "1-2i".parse()?;
    println!("({x}) * ({y}) = {}", &x * &y);
    println!("norm: {} * {} = {}", x.norm_sqr(), y.norm_sqr(), (&x * &y).norm_sqr());

    let two_i = GaussianInt::new(0, 2);
    println!("|2i|^2 = 2^2: {}", two_i.has_norm_pow2(2));

    let u = phase::u_matrix(2)?;
    print!("U_2 =\n{}", u.dump());
    let mut w = u.clone();
    for k in 2..=5 {
        w = w.matmul(&u)?;
        println!("U_2^{k} is the identity: {}", w.is_identity());
    }
    Ok(())
}
