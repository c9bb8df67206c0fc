//! Zone labels, line residuals and the stationary loci of an economy.

use bitrade::{delta_p_branch, line_values, price_space_loci, solve_nash_any, ModelParams, PriceState};

fn main() -> bitrade::Result<()> {
    let params = ModelParams::new(2.0, 4.0, 2.0, 3.0, 0.5)?;
    println!("{:>6} {:>6}  {:<24} {:<12} residuals (a1, a2, l1, l2, l3, l4)", "p1", "p2", "zone", "branch");
    for (p1, p2) in [(0.5, 0.5), (2.0, 1.0), (3.0, 0.5), (1.2, 1.0), (0.8, 2.0), (1.5, 1.5)] {
        let p = PriceState::new(p1, p2)?;
        // Labels of states with p2 q2 > p1 q1 refer to the economy with regions exchanged.
        let zone = solve_nash_any(&p, &params)?.zone_tag();
        let r = line_values(&p, &params)?;
        println!(
            "{p1:>6.2} {p2:>6.2}  {zone:<24} {:<12} ({:.2}, {:.2}, {:.2}, {:.2}, {:.2}, {:.2})",
            format!("{:?}", delta_p_branch(&p, &params)),
            r.a1,
            r.a2,
            r.l1,
            r.l2,
            r.l3,
            r.l4
        );
    }

    let loci = price_space_loci(&params)?;
    let e = loci.e_tilde();
    println!("\nfixed point of zone III: ({:.4}, {:.4})", e.p1, e.p2);
    println!("h4 meets the p1 axis at {:.6}, h3 meets the p2 axis at {:.6}", loci.p1_star, loci.p2_star);
    for p1 in [1.0, 1.5, 2.0, 2.5] {
        println!("  h4({p1}) = {:.6}", loci.h4(p1)?);
    }
    Ok(())
}
