//! Prices under multiplicative noise.
//!
//! ```text
//! dpi = fi(p) dt + sigma_i pi dWi
//! ```
//!
//! with `f` the continuous-time field and `W1`, `W2` independent Wiener
//! processes. Paths are generated by the Euler-Maruyama scheme with
//! increments `dW ~ N(0, dt)`. One-sided shock modes replace each increment
//! by its absolute value or its negative.
//!
//! Gaussians come from ChaCha20 seeded with the 64-bit seed, turned into
//! uniforms with 53-bit resolution and then into normals by Box-Muller, two
//! per step in the order `(dW1, dW2)`. A seed therefore fixes the path on
//! every platform.
//!
//! Noise can push a price below zero only through discretisation (the
//! diffusion vanishes at zero), so such steps are reflected and logged.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::continuous::{check_integrator_input, kind_at, kind_field, stationary_set, time_grid};
use crate::error::{Error, Result};
use crate::model::{ModelParams, PriceState};
use crate::rng::Rng;
use crate::zones::price_space_loci;

/// Prices above this are treated as a blow-up.
pub const PRICE_CEILING: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShockMode {
    #[default]
    Symmetric,
    PositiveOnly,
    NegativeOnly,
}

impl ShockMode {
    fn apply(self, dw: f64) -> f64 {
        match self {
            ShockMode::Symmetric => dw,
            ShockMode::PositiveOnly => dw.abs(),
            ShockMode::NegativeOnly => -dw.abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma1: f64,
    pub sigma2: f64,
    pub seed: u64,
    pub shock_mode: ShockMode,
}

impl NoiseSpec {
    pub fn new(sigma1: f64, sigma2: f64, seed: u64, shock_mode: ShockMode) -> Result<Self> {
        let n = Self { sigma1, sigma2, seed, shock_mode };
        n.validate()?;
        Ok(n)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma1.is_finite() && self.sigma2.is_finite() && self.sigma1 >= 0.0 && self.sigma2 >= 0.0) {
            return Err(Error::Domain(format!(
                "volatilities must be finite and >= 0, got ({}, {})",
                self.sigma1, self.sigma2
            )));
        }
        Ok(())
    }

    /// Same noise with another seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdeSample {
    pub t: f64,
    pub prices: PriceState,
}

/// A step that left the positive quadrant and was mirrored back.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reflection {
    pub t: f64,
    pub region: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcursionStats {
    pub reference: PriceState,
    pub max_distance: f64,
    /// `(radius, fraction of samples within radius)`.
    pub fraction_within: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub samples: Vec<SdeSample>,
    pub reflections: Vec<Reflection>,
}

impl SamplePath {
    pub fn last(&self) -> &SdeSample {
        self.samples.last().expect("paths are never empty")
    }

    pub fn excursion_stats(&self, reference: &PriceState, radii: &[f64]) -> ExcursionStats {
        let d: Vec<f64> = self.samples.iter().map(|s| s.prices.distance(reference)).collect();
        let n = d.len() as f64;
        ExcursionStats {
            reference: *reference,
            max_distance: d.iter().copied().fold(0.0, f64::max),
            fraction_within: radii.iter().map(|&r| (r, d.iter().filter(|&&x| x <= r).count() as f64 / n)).collect(),
        }
    }

    /// Largest distance of the path from the stationary locus.
    pub fn max_locus_distance(&self, locus: &StationaryLocus) -> f64 {
        self.samples.iter().map(|s| locus.project(&s.prices).distance).fold(0.0, f64::max)
    }
}

/// Euler-Maruyama path on the shared time grid `t_n = n dt`.
pub fn euler_maruyama(
    prices0: &PriceState,
    params: &ModelParams,
    noise: &NoiseSpec,
    dt: f64,
    horizon: f64,
) -> Result<SamplePath> {
    check_integrator_input(prices0, params, dt, horizon)?;
    noise.validate()?;
    let ts = time_grid(dt, horizon);
    let mut rng = Rng::new(noise.seed);
    let increments = ts.windows(2).map(|w| {
        let sq = (w[1] - w[0]).sqrt();
        let dw1 = noise.shock_mode.apply(rng.normal() * sq);
        let dw2 = noise.shock_mode.apply(rng.normal() * sq);
        [dw1, dw2]
    });
    drive(prices0, params, (noise.sigma1, noise.sigma2), &ts, increments)
}

/// Euler-Maruyama path driven by given Wiener increments, one pair per step of size `dt`.
///
/// Lets callers couple paths across step sizes by summing fine increments.
pub fn euler_maruyama_driven(
    prices0: &PriceState,
    params: &ModelParams,
    sigma: (f64, f64),
    dt: f64,
    increments: &[[f64; 2]],
) -> Result<SamplePath> {
    let horizon = dt * increments.len() as f64;
    check_integrator_input(prices0, params, dt, horizon)?;
    NoiseSpec { sigma1: sigma.0, sigma2: sigma.1, seed: 0, shock_mode: ShockMode::Symmetric }.validate()?;
    let ts: Vec<f64> = (0..=increments.len()).map(|i| i as f64 * dt).collect();
    drive(prices0, params, sigma, &ts, increments.iter().copied())
}

fn drive(
    prices0: &PriceState,
    params: &ModelParams,
    sigma: (f64, f64),
    ts: &[f64],
    increments: impl Iterator<Item = [f64; 2]>,
) -> Result<SamplePath> {
    let mut p = *prices0;
    let mut samples = Vec::with_capacity(ts.len());
    let mut reflections = Vec::new();
    samples.push(SdeSample { t: 0.0, prices: p });
    for (w, [dw1, dw2]) in ts.windows(2).zip(increments) {
        let h = w[1] - w[0];
        let f = kind_field(kind_at(&p, params)?, &p, params);
        p = PriceState {
            p1: p.p1 + h * f[0] + sigma.0 * p.p1 * dw1,
            p2: p.p2 + h * f[1] + sigma.1 * p.p2 * dw2,
        };
        if p.p1 < 0.0 {
            p.p1 = -p.p1;
            reflections.push(Reflection { t: w[1], region: 1 });
        }
        if p.p2 < 0.0 {
            p.p2 = -p.p2;
            reflections.push(Reflection { t: w[1], region: 2 });
        }
        if !(p.p1 <= PRICE_CEILING && p.p2 <= PRICE_CEILING) {
            return Err(Error::NonFinite { t: w[1] });
        }
        samples.push(SdeSample { t: w[1], prices: p });
    }
    Ok(SamplePath { samples, reflections })
}

/// Paths `i = 0..n` with seeds `noise.seed + i`, computed in parallel.
pub fn ensemble(
    prices0: &PriceState,
    params: &ModelParams,
    noise: &NoiseSpec,
    dt: f64,
    horizon: f64,
    n: usize,
) -> Result<Vec<SamplePath>> {
    (0..n)
        .into_par_iter()
        .map(|i| euler_maruyama(prices0, params, &noise.with_seed(noise.seed.wrapping_add(i as u64)), dt, horizon))
        .collect()
}

// ---------------------------------------------------------------------------
// Stationary locus as a curve
// ---------------------------------------------------------------------------

/// The stationary set as one polyline through the zone III fixed point,
/// parametrised by signed arc length: negative along `h3`, positive along
/// `h4`, zero at the fixed point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryLocus {
    pub e_tilde: PriceState,
    pub points: Vec<PriceState>,
    pub arc: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocusProjection {
    pub point: PriceState,
    pub arc: f64,
    pub distance: f64,
}

pub fn stationary_locus(params: &ModelParams, resolution: usize) -> Result<StationaryLocus> {
    let set = stationary_set(params, resolution)?;
    let loci = price_space_loci(params)?;
    let mut points: Vec<PriceState> = vec![PriceState { p1: 0.0, p2: loci.p2_star }];
    points.extend(set.h3.iter().skip(1).rev());
    points.push(set.e_tilde);
    points.extend(set.h4.iter().skip(1));
    points.push(PriceState { p1: loci.p1_star, p2: 0.0 });

    let centre = set.h3.len();
    let mut arc = vec![0.0; points.len()];
    for i in centre + 1..points.len() {
        arc[i] = arc[i - 1] + points[i].distance(&points[i - 1]);
    }
    for i in (0..centre).rev() {
        arc[i] = arc[i + 1] - points[i].distance(&points[i + 1]);
    }
    Ok(StationaryLocus { e_tilde: set.e_tilde, points, arc })
}

impl StationaryLocus {
    /// Nearest point of the polyline.
    pub fn project(&self, p: &PriceState) -> LocusProjection {
        let mut best = LocusProjection { point: self.points[0], arc: self.arc[0], distance: f64::INFINITY };
        for i in 0..self.points.len() - 1 {
            let (a, b) = (self.points[i], self.points[i + 1]);
            let (dx, dy) = (b.p1 - a.p1, b.p2 - a.p2);
            let len2 = dx * dx + dy * dy;
            let s = if len2 > 0.0 { (((p.p1 - a.p1) * dx + (p.p2 - a.p2) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
            let q = PriceState { p1: a.p1 + s * dx, p2: a.p2 + s * dy };
            let d = q.distance(p);
            if d < best.distance {
                best = LocusProjection { point: q, arc: self.arc[i] + s * (self.arc[i + 1] - self.arc[i]), distance: d };
            }
        }
        best
    }
}

// ---------------------------------------------------------------------------
// One-sided shocks
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub start: LocusProjection,
    /// Projection of the end of the path; its arc is the mean over the last
    /// tenth of the samples, which smooths out the final excursion.
    pub end: LocusProjection,
    /// Signed displacement along the locus.
    pub locus_drift: f64,
    /// The end lies closer to the zone III fixed point, in arc length, than the start.
    pub toward_e: bool,
    pub max_locus_distance: f64,
}

/// Run one path with one-sided shocks and measure how far it moved along the stationary locus.
pub fn one_sided_drift_experiment(
    prices0: &PriceState,
    params: &ModelParams,
    noise: &NoiseSpec,
    dt: f64,
    horizon: f64,
) -> Result<DriftReport> {
    if noise.shock_mode == ShockMode::Symmetric {
        return Err(Error::PreconditionViolated("drift experiment needs one-sided shocks".into()));
    }
    let path = euler_maruyama(prices0, params, noise, dt, horizon)?;
    let locus = stationary_locus(params, 2000)?;
    let start = locus.project(prices0);
    let tail = &path.samples[path.samples.len() - path.samples.len().div_ceil(10)..];
    let projections: Vec<LocusProjection> = tail.iter().map(|s| locus.project(&s.prices)).collect();
    let mean_arc = projections.iter().map(|p| p.arc).sum::<f64>() / projections.len() as f64;
    let end = LocusProjection { arc: mean_arc, ..locus.project(&path.last().prices) };
    let max_locus_distance = path.max_locus_distance(&locus);
    Ok(DriftReport {
        start,
        end,
        locus_drift: end.arc - start.arc,
        toward_e: end.arc.abs() < start.arc.abs(),
        max_locus_distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuous::{integrate, Method};

    fn params() -> ModelParams {
        ModelParams::new(2.0, 4.0, 2.0, 3.0, 0.5).unwrap()
    }

    #[test]
    fn zero_noise_is_euler() {
        let m = params();
        let p0 = PriceState::new(2.0, 1.0).unwrap();
        let path = euler_maruyama(&p0, &m, &NoiseSpec::new(0.0, 0.0, 3, ShockMode::Symmetric).unwrap(), 1e-2, 5.0).unwrap();
        let det = integrate(&p0, &m, 1e-2, 5.0, Method::Euler).unwrap();
        for (a, b) in path.samples.iter().zip(&det.samples) {
            assert_eq!(a.t, b.t);
            assert_eq!(a.prices, b.prices);
        }
    }

    #[test]
    fn seeded_paths_repeat() {
        let m = params();
        let p0 = PriceState::new(2.0, 1.0).unwrap();
        let n = NoiseSpec::new(0.2, 0.1, 99, ShockMode::Symmetric).unwrap();
        let a = euler_maruyama(&p0, &m, &n, 1e-2, 3.0).unwrap();
        let b = euler_maruyama(&p0, &m, &n, 1e-2, 3.0).unwrap();
        assert_eq!(a, b);
        let c = euler_maruyama(&p0, &m, &n.with_seed(100), 1e-2, 3.0).unwrap();
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn locus_arc_is_signed() {
        let m = params();
        let locus = stationary_locus(&m, 200).unwrap();
        let e = locus.project(&m.e_tilde());
        assert!(e.arc.abs() < 1e-12 && e.distance < 1e-12);
        let loci = price_space_loci(&m).unwrap();
        let p1 = 0.5 * (m.y1 / m.q1 + loci.p1_star);
        let on_h4 = locus.project(&PriceState { p1, p2: loci.h4(p1).unwrap() });
        assert!(on_h4.arc > 0.0 && on_h4.distance < 1e-4);
        let p2 = 0.5 * (m.y2 / m.q2 + loci.p2_star);
        let on_h3 = locus.project(&PriceState { p1: loci.h3(p2).unwrap(), p2 });
        assert!(on_h3.arc < 0.0 && on_h3.distance < 1e-4);
    }

    #[test]
    fn bad_inputs() {
        let m = params();
        let p0 = PriceState::new(2.0, 1.0).unwrap();
        assert!(NoiseSpec::new(-1.0, 0.0, 0, ShockMode::Symmetric).is_err());
        let sym = NoiseSpec::new(0.1, 0.1, 0, ShockMode::Symmetric).unwrap();
        assert!(matches!(
            one_sided_drift_experiment(&p0, &m, &sym, 1e-2, 1.0),
            Err(Error::PreconditionViolated(_))
        ));
        assert!(euler_maruyama(&p0, &m, &sym, 0.0, 1.0).is_err());
    }
}
