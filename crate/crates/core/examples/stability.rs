//! Probes around stationary points: paths started near an h4 point stay
//! close but settle elsewhere on the locus; paths near the zone III fixed
//! point from inside zone III return to it.

use bitrade::continuous::{stability_probe, ProbeConfig};
use bitrade::{price_space_loci, ModelParams, PriceState};

fn main() -> bitrade::Result<()> {
    let params = ModelParams::new(2.0, 4.0, 2.0, 3.0, 0.5)?;
    let loci = price_space_loci(&params)?;
    let p1 = 1.5;
    let on_h4 = PriceState::new(p1, loci.h4(p1)?)?;
    let r = stability_probe(&on_h4, &params, &ProbeConfig::default())?;
    println!("h4 point {on_h4:?}");
    println!("  bounded {} (max excursion {:.4}), asymptotic {}", r.bounded, r.max_excursion, r.asymptotic);
    for p in r.probes.iter().take(4) {
        println!("  start ({:.4}, {:.4}) -> limit ({:.6}, {:.6})", p.start.p1, p.start.p2, p.limit.p1, p.limit.p2);
    }

    let e = loci.e_tilde();
    let cfg = ProbeConfig { sector: Some((std::f64::consts::PI, 1.5 * std::f64::consts::PI)), n_probes: 5, ..Default::default() };
    let r = stability_probe(&e, &params, &cfg)?;
    println!("zone III fixed point {e:?}, probes from below-left");
    println!("  bounded {}, asymptotic {}", r.bounded, r.asymptotic);
    Ok(())
}
