//! Sweeps the bracket `LB ≤ β_n(ε_n) ≤ UB` over `n` for a synthetic model and
//! prints it as CSV.

use bht::bounds::Measures;
use bht::distribution::synthesize_pair;
use bht::report::bounds_csv;
use bht::EpsilonSchedule;

fn main() -> bht::Result<()> {
    let pair = synthesize_pair(4, 0.6, 0.02, 3)?;
    let measures = Measures::from_pair(&pair);
    println!("# D = {:.6}, C_X = {:.6}", measures.d, measures.c_x);
    let ns: Vec<u64> = (1..=10).map(|k| 25 * k).collect();
    print!("{}", bounds_csv(measures, &EpsilonSchedule::Reciprocal, &ns)?);
    Ok(())
}
