//! Synthesizes a model with a prescribed divergence and round-trips it
//! through the JSON file format used by the `bht` binary.

use bht::distribution::{synthesize_pair, ModelFile};

fn main() -> bht::Result<()> {
    let pair = synthesize_pair(5, 0.25, 0.01, 42)?;
    let json = ModelFile::from_pair(&pair).to_json();
    println!("{json}");
    let back = ModelFile::parse(&json)?;
    println!("D = {:.10} (target 0.25), C_X = {:.6}", back.divergence(), back.c_x());
    Ok(())
}
