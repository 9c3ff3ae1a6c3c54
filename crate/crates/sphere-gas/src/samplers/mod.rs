//! Random configuration generators.
//!
//! Four ways to put N points on the sphere:
//!
//! * [`sample_uniform`] — independent uniform points;
//! * [`sample_gaf_zeros`] — zeros of the elliptic (spherical GAF) random
//!   polynomial Σ √(N choose k)·ξ_k z^k, projected to the sphere;
//! * [`sample_spherical_ensemble`] — eigenvalues of A⁻¹B for independent
//!   complex Gaussian matrices, projected to the sphere;
//! * [`mcmc_coulomb`] — the Coulomb gas e^{−β H_N} via single-site Metropolis
//!   with an adaptive proposal scale and optional annealing.
//!
//! Every sampler is deterministic in its seed. Replica runs derive per-chain
//! seeds from the master seed with [`chain_seed`], so results do not depend on
//! scheduling.

pub mod roots;

use crate::energy::{delta_energy_points, log_energy_points, Configuration};
use crate::error::{Error, Result};
use crate::geometry::{
    geodesic_step, plane_to_sphere, random_tangent_unit, PlanePoint, SpherePoint,
};
use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

/// Retries before a sampler gives up on degenerate draws.
const MAX_ATTEMPTS: u32 = 8;

/// Full energy recomputation period of the Metropolis chain, to stop the
/// incremental energy from drifting over long runs.
const RESYNC_PERIOD: u64 = 1 << 16;

/// Proposals per adaptation window during burn-in.
const ADAPT_WINDOW: u32 = 100;

/// One annealing stage: run `steps` single-site proposals at inverse
/// temperature `beta`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AnnealingStage {
    pub beta: f64,
    pub steps: u64,
}

/// Parameters of a Coulomb-gas chain targeting e^{−β H_N}.
#[derive(Debug, Clone, Serialize)]
pub struct GibbsParams {
    pub n: usize,
    /// Inverse temperature of the target measure; the bounds this crate
    /// checks assume β ≥ 1, so smaller values are rejected.
    pub beta: f64,
    /// Total number of single-site proposals, across all annealing stages.
    pub steps: u64,
    /// Proposals during which the proposal scale adapts; sampling statistics
    /// start after this point.
    pub burn_in: u64,
    /// Initial cap on the geodesic-step parameter t ∈ (0, 1); adapted during
    /// burn-in toward `target_acceptance`, frozen afterwards.
    pub proposal_t: f64,
    pub target_acceptance: f64,
    pub seed: u64,
    /// Optional annealing schedule. Stage temperatures must be nondecreasing,
    /// start at whatever the caller likes (typically 1), end exactly at
    /// `beta`, and their step counts must sum to `steps`.
    pub annealing: Option<Vec<AnnealingStage>>,
}

impl GibbsParams {
    pub fn new(n: usize, beta: f64, steps: u64, burn_in: u64, seed: u64) -> Self {
        Self {
            n,
            beta,
            steps,
            burn_in,
            proposal_t: 0.5,
            target_acceptance: 0.3,
            seed,
            annealing: None,
        }
    }

    /// Adds a geometric schedule β_k = β^{k/(stages−1)}, k = 0, …, stages−1,
    /// splitting `steps` evenly with the remainder on the final stage.
    pub fn with_geometric_annealing(mut self, stages: usize) -> Self {
        assert!(stages >= 2, "an annealing schedule needs at least 2 stages");
        let base = self.steps / stages as u64;
        let mut sched: Vec<AnnealingStage> = (0..stages)
            .map(|k| AnnealingStage {
                beta: self.beta.powf(k as f64 / (stages - 1) as f64),
                steps: base,
            })
            .collect();
        sched[stages - 1].steps = self.steps - base * (stages as u64 - 1);
        // Rounding of the exponent must not leave the final stage off-target.
        sched[stages - 1].beta = self.beta;
        self.annealing = Some(sched);
        self
    }

    /// The default annealed-chain setup: eight geometric stages from β = 1 to
    /// `beta`, with burn-in covering the ramp plus a fifth of the final stage.
    pub fn annealed(n: usize, beta: f64, steps: u64, seed: u64) -> Self {
        let mut p = Self::new(n, beta, steps, 0, seed).with_geometric_annealing(8);
        let final_steps = p.annealing.as_ref().unwrap().last().unwrap().steps;
        p.burn_in = (p.steps - final_steps) + final_steps / 5;
        p
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::TooFewPoints(self.n));
        }
        if !(self.beta >= 1.0) || !self.beta.is_finite() {
            return Err(Error::OutOfRange {
                name: "beta",
                value: self.beta,
                range: "[1, inf)",
            });
        }
        if self.steps == 0 || self.steps <= self.burn_in {
            return Err(Error::InvalidParameter(format!(
                "need steps > burn_in >= 0, got steps = {}, burn_in = {}",
                self.steps, self.burn_in
            )));
        }
        if !(self.proposal_t > 0.0 && self.proposal_t < 1.0) {
            return Err(Error::OutOfRange {
                name: "proposal_t",
                value: self.proposal_t,
                range: "(0, 1)",
            });
        }
        if !(self.target_acceptance > 0.0 && self.target_acceptance < 1.0) {
            return Err(Error::OutOfRange {
                name: "target_acceptance",
                value: self.target_acceptance,
                range: "(0, 1)",
            });
        }
        if let Some(stages) = &self.annealing {
            if stages.is_empty() {
                return Err(Error::InvalidParameter(
                    "annealing schedule must not be empty".into(),
                ));
            }
            let mut prev = 0.0;
            let mut total = 0u64;
            for s in stages {
                if !(s.beta >= 1.0) || s.beta < prev {
                    return Err(Error::InvalidParameter(
                        "annealing temperatures must be nondecreasing and >= 1".into(),
                    ));
                }
                prev = s.beta;
                total += s.steps;
            }
            let last = stages.last().unwrap().beta;
            if (last - self.beta).abs() > 1e-12 * self.beta.max(1.0) {
                return Err(Error::InvalidParameter(format!(
                    "final annealing stage runs at beta = {last}, expected {}",
                    self.beta
                )));
            }
            if total != self.steps {
                return Err(Error::InvalidParameter(format!(
                    "annealing stages cover {total} proposals, expected steps = {}",
                    self.steps
                )));
            }
        }
        Ok(())
    }

    fn schedule(&self) -> Vec<AnnealingStage> {
        self.annealing.clone().unwrap_or_else(|| {
            vec![AnnealingStage {
                beta: self.beta,
                steps: self.steps,
            }]
        })
    }
}

/// Chain-run summary.
#[derive(Debug, Clone, Serialize)]
pub struct ChainDiagnostics {
    pub acceptance_rate: f64,
    /// Downsampled (proposal index, energy) pairs; always contains the initial
    /// and final energies.
    pub energy_trace: Vec<(u64, f64)>,
    pub final_proposal_t: f64,
    pub best_energy_seen: f64,
    /// Proposal index from which samples count as post-burn-in: after
    /// `burn_in` and inside the final annealing stage.
    pub record_from: u64,
}

impl ChainDiagnostics {
    /// Recorded energies from the sampling (post-burn-in, final-temperature)
    /// phase.
    pub fn post_burn_in_energies(&self) -> Vec<f64> {
        self.energy_trace
            .iter()
            .filter(|(s, _)| *s >= self.record_from)
            .map(|(_, h)| *h)
            .collect()
    }
}

/// Derives the seed of chain `index` from a master seed (SplitMix64 over the
/// master offset by the golden-ratio increment per index).
pub fn chain_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn uniform_point<R: Rng + ?Sized>(rng: &mut R) -> SpherePoint {
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        let z: f64 = rng.sample(StandardNormal);
        if let Ok(p) = SpherePoint::normalized(x, y, z) {
            return p;
        }
    }
}

fn uniform_points<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<SpherePoint> {
    (0..n).map(|_| uniform_point(rng)).collect()
}

/// N independent uniform points.
pub fn sample_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Configuration> {
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    Configuration::new(uniform_points(n, rng))
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) / std::f64::consts::SQRT_2
}

/// One draw of elliptic-polynomial noise: the coefficients √(N choose k)·ξ_k
/// rescaled so the largest modulus is 1, truncated to the effective degree.
/// Leading noise with |ξ_k| < 1e−12 counts as zero, and each missing root
/// sits at the point at infinity.
struct EllipticDraw {
    coeffs: Vec<Complex64>,
}

fn draw_elliptic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Option<EllipticDraw> {
    let xi: Vec<Complex64> = (0..=n).map(|_| complex_gaussian(rng)).collect();
    let mut degree = n;
    while degree > 0 && xi[degree].norm() < 1e-12 {
        degree -= 1;
    }
    if degree == 0 {
        return None;
    }
    // log √(N choose k), accumulated incrementally; √(N choose k) itself
    // overflows near N ≈ 1030, so all scaling happens in log space.
    let mut half_ln_binom = vec![0.0f64; n + 1];
    for k in 0..n {
        half_ln_binom[k + 1] =
            half_ln_binom[k] + 0.5 * (((n - k) as f64).ln() - ((k + 1) as f64).ln());
    }
    let log_mods: Vec<f64> = xi
        .iter()
        .zip(&half_ln_binom)
        .map(|(x, hb)| {
            let m = x.norm();
            if m > 0.0 {
                hb + m.ln()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let shift = log_mods[..=degree]
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let coeffs: Vec<Complex64> = (0..=degree)
        .map(|k| {
            let m = xi[k].norm();
            if m > 0.0 && log_mods[k].is_finite() {
                (xi[k] / m) * (log_mods[k] - shift).exp()
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Some(EllipticDraw { coeffs })
}

fn gaf_from_draw(n: usize, draw: &EllipticDraw) -> Result<Configuration> {
    let planar = roots::aberth_ehrlich(&draw.coeffs)?;
    let mut points: Vec<SpherePoint> = planar
        .into_iter()
        .map(|z| plane_to_sphere(PlanePoint::Finite(z)))
        .collect();
    points.resize(n, SpherePoint::NORTH_POLE);
    Configuration::new(points)
}

/// Zeros of the spherical Gaussian analytic function of degree `n`, projected
/// onto the sphere. Returns the configuration together with the number of
/// noise redraws the root finder forced.
pub fn sample_gaf_zeros_counted<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<(Configuration, u32)> {
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    let mut resamples = 0;
    for _ in 0..MAX_ATTEMPTS {
        let Some(draw) = draw_elliptic(n, rng) else {
            resamples += 1;
            continue;
        };
        match gaf_from_draw(n, &draw) {
            Ok(c) => return Ok((c, resamples)),
            Err(Error::RootFinderStalled) => {
                resamples += 1;
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::SamplerFailed {
        attempts: MAX_ATTEMPTS,
        reason: "elliptic-polynomial root finding kept stalling".into(),
    })
}

/// [`sample_gaf_zeros_counted`] without the retry counter.
pub fn sample_gaf_zeros<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Configuration> {
    sample_gaf_zeros_counted(n, rng).map(|(c, _)| c)
}

fn complex_gaussian_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Mat<Complex64> {
    let buf: Vec<Complex64> = (0..n * n).map(|_| complex_gaussian(rng)).collect();
    Mat::from_fn(n, n, |i, j| buf[i * n + j])
}

fn one_norm(m: &Mat<Complex64>) -> f64 {
    let (rows, cols) = (m.nrows(), m.ncols());
    (0..cols)
        .map(|j| (0..rows).map(|i| m.get(i, j).norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// The spherical ensemble: the `n` generalized eigenvalues of (A, B) for
/// independent standard complex Gaussian matrices, i.e. the spectrum of A⁻¹B,
/// projected onto the sphere. A draw with a badly conditioned A (1-norm
/// condition estimate above 1e12) is redrawn and counted.
pub fn sample_spherical_ensemble_counted<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<(Configuration, u32)> {
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    let mut resamples = 0;
    for _ in 0..MAX_ATTEMPTS {
        let a = complex_gaussian_matrix(n, rng);
        let b = complex_gaussian_matrix(n, rng);
        let lu = PartialPivLu::new(a.as_ref());
        let a_inv = lu.solve(Mat::<Complex64>::identity(n, n));
        let cond = one_norm(&a) * one_norm(&a_inv);
        if !cond.is_finite() || cond > 1e12 {
            resamples += 1;
            continue;
        }
        let x = lu.solve(&b);
        let eigenvalues: Vec<Complex64> = match x.eigenvalues() {
            Ok(e) => e,
            Err(_) => {
                resamples += 1;
                continue;
            }
        };
        let points: Vec<SpherePoint> = eigenvalues
            .into_iter()
            .map(|z| plane_to_sphere(PlanePoint::Finite(z)))
            .collect();
        return Ok((Configuration::new(points)?, resamples));
    }
    Err(Error::SamplerFailed {
        attempts: MAX_ATTEMPTS,
        reason: "kept drawing numerically singular matrices".into(),
    })
}

/// [`sample_spherical_ensemble_counted`] without the retry counter.
pub fn sample_spherical_ensemble<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Configuration> {
    sample_spherical_ensemble_counted(n, rng).map(|(c, _)| c)
}

/// Single-site Metropolis targeting P_{N,β} ∝ e^{−β H_N}.
///
/// Each proposal picks a site uniformly, draws a step parameter t uniformly in
/// (0, t_max], moves along a uniformly random tangent direction, and accepts
/// with probability min(1, e^{−βΔH}) using the O(N) incremental energy.
/// During burn-in, t_max adapts toward the target acceptance rate and is
/// frozen afterwards, so the post-burn-in kernel is exactly reversible.
/// Annealing stages run sequentially, passing the state forward.
pub fn mcmc_coulomb(params: &GibbsParams) -> Result<(Configuration, ChainDiagnostics)> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut points = uniform_points(params.n, &mut rng);
    let mut energy = log_energy_points(&points)?;

    let schedule = params.schedule();
    let final_stage_start = params.steps - schedule.last().unwrap().steps;
    let record_from = params.burn_in.max(final_stage_start);
    let stride = (params.steps / 4096).max(1);

    let mut trace = vec![(0u64, energy)];
    let mut best = energy;
    let mut accepted = 0u64;
    let mut t_max = params.proposal_t;
    let mut window_total = 0u32;
    let mut window_accepted = 0u32;
    let mut global = 0u64;

    for stage in &schedule {
        for _ in 0..stage.steps {
            global += 1;
            let site = rng.random_range(0..params.n);
            let t = (1.0 - rng.random::<f64>()) * t_max;
            let dir = random_tangent_unit(points[site], &mut rng);
            let candidate = geodesic_step(&dir, t).expect("unit tangent, t in (0, 1)");

            let mut accept = false;
            // A coincident candidate has infinite energy and is rejected
            // outright.
            if let Ok(delta) = delta_energy_points(&points, site, &candidate) {
                if delta <= 0.0 || rng.random::<f64>() < (-stage.beta * delta).exp() {
                    points[site] = candidate;
                    energy += delta;
                    accept = true;
                }
            }
            if accept {
                accepted += 1;
                if energy < best {
                    best = energy;
                }
            }

            if global <= params.burn_in {
                window_total += 1;
                if accept {
                    window_accepted += 1;
                }
                if window_total == ADAPT_WINDOW {
                    let rate = window_accepted as f64 / window_total as f64;
                    t_max = (t_max * (0.4 * (rate - params.target_acceptance)).exp())
                        .clamp(1e-6, 0.999);
                    window_total = 0;
                    window_accepted = 0;
                }
            }

            if global % RESYNC_PERIOD == 0 {
                energy = log_energy_points(&points)?;
            }
            if global % stride == 0 || global == params.steps {
                trace.push((global, energy));
            }
        }
    }

    let diagnostics = ChainDiagnostics {
        acceptance_rate: accepted as f64 / params.steps as f64,
        energy_trace: trace,
        final_proposal_t: t_max,
        best_energy_seen: best,
        record_from,
    };
    Ok((Configuration::new(points)?, diagnostics))
}

/// Runs `n_chains` independent chains with per-chain seeds derived from the
/// master seed by [`chain_seed`]. The result order is by chain index
/// regardless of scheduling.
pub fn run_replicas(
    params: &GibbsParams,
    n_chains: usize,
) -> Result<Vec<(Configuration, ChainDiagnostics)>> {
    if n_chains == 0 {
        return Err(Error::InvalidParameter("need at least one chain".into()));
    }
    params.validate()?;
    (0..n_chains)
        .into_par_iter()
        .map(|i| {
            let mut p = params.clone();
            p.seed = chain_seed(params.seed, i as u64);
            mcmc_coulomb(&p)
        })
        .collect()
}
