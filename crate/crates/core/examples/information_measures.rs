//! Divergence, dispersion, `C_X` and the three reference exponents of a
//! small binary pair, plus the tilted family that connects them.
//!
//! ```text
//! cargo run --example information_measures
//! ```

use bht::bounds::exponent_triple;
use bht::distribution::{solve_tilt_rate, tilt_rate, tilted};
use bht::{make_pair, DiscreteDistribution};

fn main() -> bht::Result<()> {
    let p = DiscreteDistribution::new(vec![0.5, 0.5])?;
    let q = DiscreteDistribution::new(vec![0.25, 0.75])?;
    let pair = make_pair(p, q)?;

    println!("D(P||Q) = {:.12}", pair.divergence());
    println!("V(P||Q) = {:.12}", pair.dispersion());
    println!("C_X     = {:.12}", pair.c_x());
    println!("D(Q||P) = {:.12}", pair.reverse_divergence());

    println!("\n   t   P_t(0)    D(P_t||P)");
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let pt = tilted(&pair, t)?;
        println!("{t:>5.2}  {:.6}  {:.6}", pt.masses()[0], tilt_rate(&pair, t)?);
    }

    let rate = pair.divergence() / 4.0;
    let t_star = solve_tilt_rate(&pair, rate)?;
    let e = exponent_triple(&pair, rate, 0.05, 100)?;
    println!("\nrate r = {rate:.6} is reached at t* = {t_star:.9}");
    println!("Stein    {:.6}", e.stein);
    println!("Nakagawa {:.6}  (epsilon_n = e^(-rn))", e.nakagawa);
    println!("Strassen {:.6}  (epsilon = 0.05, n = 100)", e.strassen);
    Ok(())
}
