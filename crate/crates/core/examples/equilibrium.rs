//! Closed-form equilibria next to the brute-force grid search.

use bitrade::{brute_force_nash, check_fixed_point, solve_nash_any, ModelParams, PriceState};

fn main() -> bitrade::Result<()> {
    let cases = [
        ("no trade", (4.0, 6.0, 2.0, 3.0, 0.5), (1.0, 1.0)),
        ("II imports the surplus of good 1", (2.0, 6.0, 2.0, 3.0, 0.5), (2.0, 1.0)),
        ("II imports with leftover income", (2.0, 4.0, 2.0, 3.0, 0.5), (2.0, 1.0)),
        ("regions swapped", (1.0, 5.0, 2.0, 3.0, 0.5), (0.4, 1.9)),
    ];
    for (name, (y1, y2, q1, q2, rho), (p1, p2)) in cases {
        let params = ModelParams::new(y1, y2, q1, q2, rho)?;
        let prices = PriceState::new(p1, p2)?;
        let eq = solve_nash_any(&prices, &params)?;
        let fp = check_fixed_point(&eq.profile, &prices, &params)?;
        let grid = brute_force_nash(&prices, &params, 200)?;
        println!("{name}");
        println!("  zone {:<10} kind {:?}", eq.zone_tag(), eq.kind);
        println!("  profile {:?}", eq.profile.as_array());
        println!("  payoffs {:?}, grid search {:?} (tolerance {:.3})", eq.payoffs, grid.payoffs, grid.tolerance);
        println!("  best-reply deviation {:.1e}", fp.max_deviation);
    }
    Ok(())
}
