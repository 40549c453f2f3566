//! The `ε_n` families, their text syntax and where each becomes admissible.

use bht::schedule::{epsilon_at, is_subexponential, parse_schedule_list};

fn main() -> bht::Result<()> {
    let schedules = parse_schedule_list("const:0.1;recip;pow:0.1;logrecip;exp:0.2;list:0.5,0.3,0.2")?;
    let ns = [1u64, 2, 3, 10, 100];
    print!("{:<16}", "schedule");
    for n in ns {
        print!("{:>12}", format!("n={n}"));
    }
    println!("{:>16}", "subexponential");
    for s in &schedules {
        print!("{:<16}", s.to_string());
        for n in ns {
            match epsilon_at(s, n) {
                Ok(e) => print!("{e:>12.4e}"),
                Err(_) => print!("{:>12}", "-"),
            }
        }
        let sub = is_subexponential(s)
            .map(|b| b.to_string())
            .unwrap_or_else(|_| "undecidable".into());
        println!("{sub:>16}");
    }
    Ok(())
}
