//! Lowest case-3 resonance at the four tabulated couplings, as CSV.

use anharmonic::resonance::{case3_resonance, table1_csv, ResonanceConfig, DEFAULT_WINDOW};
use anharmonic::ExactCoeff;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = ResonanceConfig::default();
    let rows = ["0.10", "0.12", "0.13", "0.14"]
        .iter()
        .map(|l| case3_resonance(&ExactCoeff::from_decimal_str(l)?, 30, DEFAULT_WINDOW, &config).map_err(Into::into))
        .collect::<Result<Vec<_>, Box<dyn std::error::Error>>>()?;
    print!("{}", table1_csv(&rows));
    Ok(())
}
