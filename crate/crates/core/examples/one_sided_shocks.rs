//! One-sided shocks move the state along the stationary locus.

use bitrade::stochastic::{one_sided_drift_experiment, NoiseSpec, ShockMode};
use bitrade::{price_space_loci, ModelParams, PriceState};

fn main() -> bitrade::Result<()> {
    let params = ModelParams::new(2.0, 4.0, 2.0, 3.0, 0.5)?;
    let loci = price_space_loci(&params)?;
    let on_h4 = PriceState::new(1.5, loci.h4(1.5)?)?;
    let on_h3 = PriceState::new(loci.h3(1.6)?, 1.6)?;
    for (name, start) in [("h4", on_h4), ("h3", on_h3)] {
        for mode in [ShockMode::PositiveOnly, ShockMode::NegativeOnly] {
            let mut toward = 0;
            let mut drift = 0.0;
            for seed in 0..20 {
                let r = one_sided_drift_experiment(&start, &params, &NoiseSpec::new(0.05, 0.05, seed, mode)?, 1e-2, 10.0)?;
                toward += r.toward_e as usize;
                drift += r.locus_drift / 20.0;
            }
            println!("{name} start, {mode:?}: mean arc drift {drift:+.3}, toward the fixed point in {toward}/20 seeds");
        }
    }
    Ok(())
}
