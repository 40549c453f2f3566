//! Width of the bracket for three vanishing schedules at `D = 1`.
//!
//! Most entries are far below the smallest positive `f64`; they are carried
//! as logarithms and printed from there.

use bht::bounds::Measures;
use bht::report::{gap_table_csv, parse_range};
use bht::schedule::parse_schedule_list;

fn main() -> bht::Result<()> {
    let schedules = parse_schedule_list("recip,logrecip,pow:0.1")?;
    let ns = parse_range("150:750:100")?;
    for c_x in [0.5, 2.0] {
        println!("# C_X = {c_x}");
        print!("{}", gap_table_csv(Measures::scalar(1.0, c_x), &schedules, &ns)?);
    }
    Ok(())
}
