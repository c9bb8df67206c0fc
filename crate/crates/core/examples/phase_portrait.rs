//! Continuous-time field on a grid, and two integrated trajectories: one
//! approaching the h4 locus and one sliding along `p2 = p1 + rho`.

use std::collections::BTreeMap;

use bitrade::continuous::{integrate, phase_portrait, ContinuousEventKind, Method};
use bitrade::{ModelParams, PriceState};

fn main() -> bitrade::Result<()> {
    let params = ModelParams::new(2.0, 4.0, 2.0, 3.0, 0.5)?;
    let grid = phase_portrait(&params, (0.1, 3.0), (0.1, 3.0), 50, 50)?;
    let mut by_zone: BTreeMap<&str, (usize, f64)> = BTreeMap::new();
    for pt in &grid {
        let e = by_zone.entry(pt.zone.as_str()).or_default();
        e.0 += 1;
        e.1 = e.1.max(pt.f[0].abs().max(pt.f[1].abs()));
    }
    println!("{} grid points", grid.len());
    for (zone, (n, fmax)) in by_zone {
        println!("  {zone:<16} {n:>5} points, max |f| {fmax:.3}");
    }

    let tr = integrate(&PriceState::new(2.0, 1.0)?, &params, 1e-3, 40.0, Method::Rk4)?;
    let l = tr.last();
    println!("\nfrom (2, 1): {:?} at t = {:.3}, p = ({:.9}, {:.9})", tr.terminal, l.t, l.prices.p1, l.prices.p2);

    let params = ModelParams::new(1.0, 3.6, 3.0, 1.0, 0.5)?;
    let tr = integrate(&PriceState::new(1.2, 1.65)?, &params, 1e-3, 2.0, Method::Rk4)?;
    for e in &tr.events {
        if let ContinuousEventKind::SlidingStart { line } = e.kind {
            println!("from (1.2, 1.65): sliding on {line:?} from t = {:.4}", e.t);
        }
    }
    let l = tr.last();
    println!("  at t = {:.1}: p = ({:.6}, {:.6}), p2 - p1 = {:.12}", l.t, l.prices.p1, l.prices.p2, l.prices.p2 - l.prices.p1);
    Ok(())
}
