//! Stratified random draws checked against the grid oracle.

use bitrade::cli::config::SweepOptions;
use bitrade::cli::sweep::{run_sweep, summarize};

fn main() -> bitrade::Result<()> {
    let opts = SweepOptions { draws: 1400, seed: 7, oracle_grid: 100, ..Default::default() };
    let rows = run_sweep(&opts)?;
    let s = summarize(&rows);
    for (zone, n) in &s.zone_counts {
        println!("{zone:<16} {n}");
    }
    println!(
        "fixed-point failures {}, lemma failures {}, oracle failures {}/{}",
        s.fixed_point_failures, s.lemma_failures, s.oracle_failures, s.oracle_checked
    );
    let worst = rows.iter().filter_map(|r| r.oracle).map(|(gap, tol)| gap / tol).fold(0.0, f64::max);
    println!("largest payoff gap relative to the oracle tolerance: {worst:.3}");
    Ok(())
}
