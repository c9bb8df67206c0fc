use bitrade::rng::Rng;
use bitrade::stochastic::{
    ensemble, euler_maruyama, euler_maruyama_driven, one_sided_drift_experiment, stationary_locus, NoiseSpec,
    ShockMode,
};
use bitrade::{price_space_loci, Error, ModelParams, PriceState};

fn zone_three_params() -> ModelParams {
    ModelParams::new(4.0, 6.0, 2.0, 3.0, 0.5).unwrap()
}

/// Fine Wiener increments for one seed, `n` steps of size `dt`.
fn increments(seed: u64, n: usize, dt: f64) -> Vec<[f64; 2]> {
    let mut rng = Rng::new(seed);
    (0..n).map(|_| [rng.normal() * dt.sqrt(), rng.normal() * dt.sqrt()]).collect()
}

/// Sum consecutive pairs: the same Brownian path seen at twice the step.
fn coarsen(dw: &[[f64; 2]]) -> Vec<[f64; 2]> {
    dw.chunks(2).map(|c| [c[0][0] + c[1][0], c[0][1] + c[1][1]]).collect()
}

#[test]
fn weak_error_is_first_order() {
    // In zone III the field is linear, so the mean solves the noiseless
    // equation exactly and the weak error of Euler-Maruyama is known.
    let m = zone_three_params();
    let p0 = PriceState::new(1.0, 1.2).unwrap();
    let e = m.e_tilde();
    let horizon: f64 = 1.0;
    let exact = e.p1 + (p0.p1 - e.p1) * (-horizon).exp();
    let fine_dt: f64 = 0.025;
    let n = (horizon / fine_dt).round() as usize;
    let mut sums = [0.0; 3];
    let seeds = 100;
    for seed in 0..seeds {
        let fine = increments(seed, n, fine_dt);
        let mid = coarsen(&fine);
        let coarse = coarsen(&mid);
        for (k, (dt, dw)) in [(4.0 * fine_dt, &coarse), (2.0 * fine_dt, &mid), (fine_dt, &fine)].into_iter().enumerate() {
            let path = euler_maruyama_driven(&p0, &m, (0.05, 0.05), dt, dw).unwrap();
            assert!((path.last().t - horizon).abs() < 1e-12);
            sums[k] += path.last().prices.p1;
        }
    }
    // Coupled levels share their sampling noise, so differences between
    // levels isolate the discretisation error, which halves with the step.
    let means: Vec<f64> = sums.iter().map(|s| s / seeds as f64).collect();
    let (d1, d2) = (means[0] - means[1], means[1] - means[2]);
    assert!((1.6..2.4).contains(&(d1 / d2)), "means {means:?}");
    // The step-size bias of the finest level has the size the noiseless scheme predicts.
    let h = fine_dt;
    let bias = (e.p1 + (p0.p1 - e.p1) * (1.0 - h).powi(n as i32) - exact).abs();
    assert!((d2.abs() - bias).abs() < 0.25 * bias, "{d2} vs {bias}");
}

#[test]
fn coupled_paths_converge_strongly() {
    let m = zone_three_params();
    let p0 = PriceState::new(1.0, 1.2).unwrap();
    let fine = increments(3, 1024, 1.0 / 1024.0);
    let mut dw = fine.clone();
    let mut dt = 1.0 / 1024.0;
    let reference = euler_maruyama_driven(&p0, &m, (0.2, 0.2), dt, &fine).unwrap().last().prices;
    let mut prev = 0.0;
    for _ in 0..4 {
        dw = coarsen(&dw);
        dt *= 2.0;
        let gap = euler_maruyama_driven(&p0, &m, (0.2, 0.2), dt, &dw).unwrap().last().prices.distance(&reference);
        assert!(gap >= prev * 0.9, "gap shrank when coarsening: {gap} after {prev}");
        prev = gap;
    }
    assert!(prev < 0.1);
}

#[test]
fn ensemble_matches_single_paths() {
    let m = ModelParams::new(2.0, 4.0, 2.0, 3.0, 0.5).unwrap();
    let p0 = PriceState::new(1.5, 1.0).unwrap();
    let noise = NoiseSpec::new(0.1, 0.05, 40, ShockMode::Symmetric).unwrap();
    let paths = ensemble(&p0, &m, &noise, 1e-2, 2.0, 6).unwrap();
    for (i, path) in paths.iter().enumerate() {
        let single = euler_maruyama(&p0, &m, &noise.with_seed(40 + i as u64), 1e-2, 2.0).unwrap();
        assert_eq!(path, &single);
    }
    assert_ne!(paths[0], paths[1]);
}

#[test]
fn prices_stay_nonnegative_under_large_noise() {
    let m = ModelParams::new(2.0, 4.0, 2.0, 3.0, 0.5).unwrap();
    let p0 = PriceState::new(0.2, 0.1).unwrap();
    let mut reflected = 0;
    for seed in 0..20 {
        let noise = NoiseSpec::new(3.0, 3.0, seed, ShockMode::Symmetric).unwrap();
        let path = euler_maruyama(&p0, &m, &noise, 5e-2, 5.0).unwrap();
        assert!(path.samples.iter().all(|s| s.prices.p1 >= 0.0 && s.prices.p2 >= 0.0));
        for r in &path.reflections {
            assert!(r.region == 1 || r.region == 2);
            assert!(path.samples.iter().any(|s| s.t == r.t));
        }
        reflected += path.reflections.len();
    }
    assert!(reflected > 0, "noise this large should overshoot zero at least once");
}

#[test]
fn distance_from_locus_scales_with_noise() {
    let m = ModelParams::new(2.0, 4.0, 2.0, 3.0, 0.5).unwrap();
    let loci = price_space_loci(&m).unwrap();
    let locus = stationary_locus(&m, 2000).unwrap();
    let start = PriceState::new(1.5, loci.h4(1.5).unwrap()).unwrap();
    let worst = |sigma: f64| {
        (0..10u64)
            .map(|s| {
                let n = NoiseSpec::new(sigma, sigma, s, ShockMode::Symmetric).unwrap();
                euler_maruyama(&start, &m, &n, 1e-2, 5.0).unwrap().max_locus_distance(&locus)
            })
            .fold(0.0, f64::max)
    };
    let (small, large) = (worst(0.002), worst(0.02));
    assert!(small < large, "{small} vs {large}");
    assert!(large < 0.2);
}

#[test]
fn excursion_fractions_grow_with_radius() {
    let m = ModelParams::new(2.0, 4.0, 2.0, 3.0, 0.5).unwrap();
    let p0 = m.e_tilde();
    let noise = NoiseSpec::new(0.05, 0.05, 11, ShockMode::Symmetric).unwrap();
    let path = euler_maruyama(&p0, &m, &noise, 1e-2, 10.0).unwrap();
    let stats = path.excursion_stats(&p0, &[0.01, 0.05, 0.1, 10.0]);
    let fr: Vec<f64> = stats.fraction_within.iter().map(|(_, f)| *f).collect();
    assert!(fr.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(*fr.last().unwrap(), 1.0);
    assert!(stats.max_distance > 0.0 && stats.max_distance < 10.0);
}

#[test]
fn one_sided_shocks_only_push_one_way() {
    // At the zone III fixed point the field vanishes, so the first step
    // moves prices in the direction of the shocks.
    let m = zone_three_params();
    let e = m.e_tilde();
    for (mode, sign) in [(ShockMode::PositiveOnly, 1.0), (ShockMode::NegativeOnly, -1.0)] {
        for seed in 0..10 {
            let noise = NoiseSpec::new(0.1, 0.1, seed, mode).unwrap();
            let path = euler_maruyama(&e, &m, &noise, 1e-2, 1e-2).unwrap();
            let p = path.last().prices;
            assert!((p.p1 - e.p1) * sign >= 0.0 && (p.p2 - e.p2) * sign >= 0.0);
        }
    }
}

#[test]
fn drift_experiment_needs_one_sided_noise() {
    let m = zone_three_params();
    let noise = NoiseSpec::new(0.1, 0.1, 0, ShockMode::Symmetric).unwrap();
    let err = one_sided_drift_experiment(&m.e_tilde(), &m, &noise, 1e-2, 1.0).unwrap_err();
    assert!(matches!(err, Error::PreconditionViolated(_)));
}

#[test]
fn invalid_noise_is_rejected() {
    assert!(NoiseSpec::new(-0.1, 0.1, 0, ShockMode::Symmetric).is_err());
    assert!(NoiseSpec::new(0.1, f64::NAN, 0, ShockMode::Symmetric).is_err());
    let m = zone_three_params();
    let p0 = PriceState::new(1.0, 1.0).unwrap();
    assert!(euler_maruyama_driven(&p0, &m, (0.1, 0.1), 0.0, &[[0.0, 0.0]]).is_err());
}
