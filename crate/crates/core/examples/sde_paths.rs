//! Sample paths under small multiplicative noise, started on the h4 locus.

use bitrade::stochastic::{ensemble, stationary_locus, NoiseSpec, ShockMode};
use bitrade::{price_space_loci, ModelParams, PriceState};

fn main() -> bitrade::Result<()> {
    let params = ModelParams::new(2.0, 4.0, 2.0, 3.0, 0.5)?;
    let loci = price_space_loci(&params)?;
    let start = PriceState::new(1.5, loci.h4(1.5)?)?;
    let locus = stationary_locus(&params, 2000)?;
    for sigma in [0.01, 0.05, 0.2] {
        let noise = NoiseSpec::new(sigma, sigma, 1, ShockMode::Symmetric)?;
        let paths = ensemble(&start, &params, &noise, 1e-2, 10.0, 20)?;
        let worst = paths.iter().map(|p| p.max_locus_distance(&locus)).fold(0.0, f64::max);
        let near = paths.iter().map(|p| p.excursion_stats(&start, &[0.1]).fraction_within[0].1).sum::<f64>() / 20.0;
        let reflections: usize = paths.iter().map(|p| p.reflections.len()).sum();
        println!(
            "sigma {sigma:<5} max distance from locus {worst:.4}, time within 0.1 of start {:.0}%, reflections {reflections}",
            100.0 * near
        );
    }
    Ok(())
}
