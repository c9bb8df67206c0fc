//! Discrete price adjustment: one-step settlement, a trade steady state and
//! an infinite approach to a limit.

use bitrade::discrete::{g_map, iterate, limit_k, switch_steps};
use bitrade::{ModelParams, PriceState};

fn show(label: &str, params: ModelParams, p0: PriceState) -> bitrade::Result<()> {
    let tr = iterate(&p0, &params, 10_000, 1e-12)?;
    println!("{label}: {:?}, converged at {:?}", tr.classification, tr.converged_at);
    for r in tr.records.iter().take(4) {
        let ev: Vec<String> = r.events.iter().flatten().map(|e| format!("{:?}{} -> {:.6}", e.direction, e.region, e.to)).collect();
        println!("  t={:<3} p=({:.6}, {:.6}) zone {:<12} {}", r.t, r.prices.p1, r.prices.p2, r.equilibrium.zone_tag(), ev.join(", "));
    }
    if tr.records.len() > 4 {
        let l = tr.last();
        println!("  ... t={} p=({:.12}, {:.12})", l.t, l.prices.p1, l.prices.p2);
    }
    Ok(())
}

fn main() -> bitrade::Result<()> {
    let m = |y1, y2| ModelParams::new(y1, y2, 2.0, 3.0, 0.5);
    show("zone III", m(4.0, 6.0)?, PriceState::new(1.0, 1.0)?)?;
    show("zone II-3", m(2.0, 6.0)?, PriceState::new(2.0, 1.0)?)?;

    let params = m(2.0, 4.0)?;
    let p0 = PriceState::new(2.0, 1.0)?;
    show("zone II-2", params, p0)?;
    let k = limit_k(&p0, &params)?;
    println!("  limit k = {k:.15}, g(k) - k = {:.1e}", g_map(k, p0.p2, &params) - k);

    let params = m(1.0, 8.0)?;
    let p0 = PriceState::new(4.0, 2.0)?;
    println!("\nfrom {p0:?} p1 drops below p2 - rho after {} adjustment(s)", switch_steps(&p0, &params)?);
    Ok(())
}
