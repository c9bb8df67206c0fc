//! Property tests over random economies and prices.

use proptest::prelude::*;

use bitrade::discrete::{step, Direction};
use bitrade::zones::ZoneLabel as Z;
use bitrade::{
    aggregates, best_reply_1, best_reply_2, check_fixed_point, check_lemmas, classify, feasible, line_values,
    payoff1, payoff2, price_space_loci, solve_nash, solve_nash_any, ModelParams, PriceState, StrategyProfile, EPS,
};

fn params() -> impl Strategy<Value = ModelParams> {
    (0.5..10.0, 0.5..10.0, 0.5..5.0, 0.5..5.0, 0.05..2.0)
        .prop_map(|(y1, y2, q1, q2, rho)| ModelParams::new(y1, y2, q1, q2, rho).unwrap())
}

fn prices() -> impl Strategy<Value = PriceState> {
    (0.05..5.0, 0.05..5.0).prop_map(|(p1, p2)| PriceState::new(p1, p2).unwrap())
}

/// Economy and prices in the canonical labelling.
fn canonical() -> impl Strategy<Value = (ModelParams, PriceState)> {
    (params(), prices()).prop_map(|(m, p)| if p.p2 * m.q2 > p.p1 * m.q1 { (m.swapped(), p.swapped()) } else { (m, p) })
}

fn profile() -> impl Strategy<Value = StrategyProfile> {
    (0.0..6.0, 0.0..6.0, 0.0..6.0, 0.0..6.0).prop_map(|(a, b, c, d)| StrategyProfile::new(a, b, c, d))
}

/// Shrink a profile until both budgets hold.
fn make_feasible(s: StrategyProfile, p: &PriceState, m: &ModelParams) -> StrategyProfile {
    let spend1 = s.alpha * p.p1 + s.beta * p.p2_import(m);
    let spend2 = s.gamma * p.p1_import(m) + s.delta * p.p2;
    let k1 = if spend1 > m.y1 { m.y1 / spend1 } else { 1.0 };
    let k2 = if spend2 > m.y2 { m.y2 / spend2 } else { 1.0 };
    StrategyProfile::new(s.alpha * k1, s.beta * k1, s.gamma * k2, s.delta * k2)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn payoffs_bounded_and_concave(m in params(), a in profile(), b in profile(), t in 0.0..1.0f64) {
        for s in [a, b] {
            let (u1, u2) = (payoff1(&s, &m), payoff2(&s, &m));
            prop_assert!(u1 >= 0.0 && u1 <= m.q1 + m.q2);
            prop_assert!(u2 >= 0.0 && u2 <= m.q1 + m.q2);
        }
        // Concave in the consumer's own orders, the other's held fixed.
        let mix = |x: f64, y: f64| t * x + (1.0 - t) * y;
        let s1 = StrategyProfile::new(mix(a.alpha, b.alpha), mix(a.beta, b.beta), a.gamma, a.delta);
        let b1 = StrategyProfile::new(b.alpha, b.beta, a.gamma, a.delta);
        prop_assert!(payoff1(&s1, &m) >= t * payoff1(&a, &m) + (1.0 - t) * payoff1(&b1, &m) - 1e-12);
        let s2 = StrategyProfile::new(a.alpha, a.beta, mix(a.gamma, b.gamma), mix(a.delta, b.delta));
        let b2 = StrategyProfile::new(a.alpha, a.beta, b.gamma, b.delta);
        prop_assert!(payoff2(&s2, &m) >= t * payoff2(&a, &m) + (1.0 - t) * payoff2(&b2, &m) - 1e-12);
    }

    #[test]
    fn aggregates_are_consistent(m in params(), p in prices(), s in profile()) {
        let s = make_feasible(s, &p, &m);
        prop_assert!(feasible(&s, &p, &m));
        let a = aggregates(&s, &p, &m).unwrap();
        prop_assert!(a.q1_cons <= m.q1 + EPS && a.q2_cons <= m.q2 + EPS);
        prop_assert!(close(a.y1_cons + a.y1_res, m.y1 + p.p1 * s.alpha, 1e-12));
        prop_assert!(close(a.y2_cons + a.y2_res, m.y2 + p.p2 * s.delta, 1e-12));
        let (u1, u2) = a.unspent(&m);
        prop_assert!(u1 >= -EPS && u2 >= -EPS);
        let sw = aggregates(&s.swapped(), &p.swapped(), &m.swapped()).unwrap();
        prop_assert_eq!(sw, a.swapped());
    }

    #[test]
    fn labels_match_residual_signs((m, p) in canonical()) {
        let r = line_values(&p, &m).unwrap();
        let label = classify(&p, &m).unwrap();
        // Re-evaluating gives the same label.
        prop_assert_eq!(classify(&p, &m).unwrap(), label);
        let margin = [r.a1, r.a2].iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
        prop_assume!(margin > EPS);
        let expected_home = match label {
            Z::III => Some((true, true)),
            Z::II1 | Z::II2 | Z::II3 => Some((false, true)),
            Z::IV1 | Z::IV2 => Some((true, false)),
            Z::I1 | Z::I2 | Z::I3 | Z::Z1_1 | Z::Z1_2 | Z::Z1_3 | Z::Z1_4 => Some((false, false)),
            _ => None,
        };
        prop_assert_eq!(expected_home, Some((r.a1 > 0.0, r.a2 > 0.0)));
    }

    #[test]
    fn line_geometry(m in params(), p in prices(), dy1 in -3.0..3.0f64, dy2 in -3.0..3.0f64) {
        // l1 and l4 differ by a constant in income space, as do l2 and l3.
        let shifted = ModelParams { y1: m.y1 + dy1, y2: m.y2 + dy2, ..m };
        let (Ok(r), Ok(s)) = (line_values(&p, &m), line_values(&p, &shifted)) else { return Ok(()) };
        prop_assert!(close(r.l1 - r.l4, s.l1 - s.l4, 1e-9));
        prop_assert!(close(r.l2 - r.l3, s.l2 - s.l3, 1e-9));
        // The income point equal to supply values lies on both l3 and l4.
        let e = ModelParams { y1: p.p1 * m.q1, y2: p.p2 * m.q2, ..m };
        let r = line_values(&p, &e).unwrap();
        prop_assert!(r.l3.abs() < 1e-9 && r.l4.abs() < 1e-9);
        // Above l1 exactly when p1 is below p1*, above l2 when p2 is below p2*.
        let l = price_space_loci(&m).unwrap();
        let r = line_values(&p, &m).unwrap();
        if (p.p1 - l.p1_star).abs() > 1e-9 {
            prop_assert_eq!(r.l1 > 0.0, p.p1 < l.p1_star);
        }
        if (p.p2 - l.p2_star).abs() > 1e-9 {
            prop_assert_eq!(r.l2 > 0.0, p.p2 < l.p2_star);
        }
    }

    #[test]
    fn equilibrium_is_a_fixed_point((m, p) in canonical()) {
        let eq = solve_nash(&p, &m).unwrap();
        prop_assert!(feasible(&eq.profile, &p, &m));
        prop_assert!(check_fixed_point(&eq.profile, &p, &m).unwrap().ok);
        prop_assert!(check_lemmas(&eq.profile, &p, &m).all());
        let r1 = best_reply_1((eq.profile.gamma, eq.profile.delta), &p, &m).unwrap();
        let r2 = best_reply_2((eq.profile.alpha, eq.profile.beta), &p, &m).unwrap();
        let u1 = payoff1(&StrategyProfile::new(r1.home, r1.foreign, eq.profile.gamma, eq.profile.delta), &m);
        let u2 = payoff2(&StrategyProfile::new(eq.profile.alpha, eq.profile.beta, r2.foreign, r2.home), &m);
        prop_assert!(close(u1, eq.payoffs.0, 1e-9) && close(u2, eq.payoffs.1, 1e-9));
    }

    #[test]
    fn no_feasible_deviation_gains((m, p) in canonical(), dev in profile()) {
        let eq = solve_nash(&p, &m).unwrap();
        let s = eq.profile;
        let d = make_feasible(StrategyProfile::new(dev.alpha, dev.beta, s.gamma, s.delta), &p, &m);
        let d1 = StrategyProfile::new(d.alpha, d.beta, s.gamma, s.delta);
        prop_assert!(payoff1(&d1, &m) <= eq.payoffs.0 + 1e-9);
        let d = make_feasible(StrategyProfile::new(s.alpha, s.beta, dev.gamma, dev.delta), &p, &m);
        let d2 = StrategyProfile::new(s.alpha, s.beta, d.gamma, d.delta);
        prop_assert!(payoff2(&d2, &m) <= eq.payoffs.1 + 1e-9);
    }

    #[test]
    fn relabelling_regions_commutes(m in params(), p in prices()) {
        let eq = solve_nash_any(&p, &m).unwrap();
        let sw = solve_nash_any(&p.swapped(), &m.swapped()).unwrap();
        prop_assert!(eq.profile.max_abs_diff(&sw.profile.swapped()) < 1e-9);
        prop_assert!(close(eq.payoffs.0, sw.payoffs.1, 1e-12) && close(eq.payoffs.1, sw.payoffs.0, 1e-12));
    }

    #[test]
    fn discrete_step_moves_each_price_one_way((m, p) in canonical()) {
        let (next, eq, events) = step(&p, &m).unwrap();
        let a = eq.aggregates;
        for (i, e) in events.iter().enumerate() {
            let (pi, qi, qc, yres, ni) = if i == 0 {
                (p.p1, m.q1, a.q1_cons, a.y1_res, next.p1)
            } else {
                (p.p2, m.q2, a.q2_cons, a.y2_res, next.p2)
            };
            match e {
                None => prop_assert_eq!(ni, pi),
                Some(ev) => {
                    prop_assert_eq!(ev.region as usize, i + 1);
                    match ev.direction {
                        // Value of supply at the new price equals the value sold at the old one.
                        Direction::Down => {
                            prop_assert!(ni <= pi);
                            prop_assert!(ni == 0.0 || close(ni * qi, pi * qc, 1e-12));
                        }
                        // Unspent local income buys the whole supply at the new price.
                        Direction::Up => {
                            prop_assert!(ni >= pi);
                            prop_assert!(close(ni * qi, yres, 1e-12));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn field_and_discrete_step_agree_in_sign((m, p) in canonical()) {
        let (next, eq, _) = step(&p, &m).unwrap();
        let f = bitrade::continuous::drift_from_profile(&eq.profile, &p, &m);
        for (fi, d) in [(f[0], next.p1 - p.p1), (f[1], next.p2 - p.p2)] {
            if d.abs() > 1e-7 && fi.abs() > 1e-7 {
                prop_assert_eq!(fi > 0.0, d > 0.0, "field {} step {}", fi, d);
            }
        }
    }
}
