//! The logarithmic pair energy and its derived quantities.
//!
//! The energy of a configuration (x_1, …, x_N) on the sphere is
//!
//! ```text
//! H_N = Σ_{i≠j} log(1 / ‖x_i − x_j‖),
//! ```
//!
//! summed over ordered pairs, so each unordered pair counts twice. That
//! convention is normative for the whole crate: every closed-form mean below
//! and every bound in [`crate::verify`] uses it.
//!
//! Coincident points would make the energy infinite; they raise
//! [`Error::CoincidentPoints`] instead of returning an IEEE infinity, so
//! callers (the Metropolis sampler in particular) must reject them
//! explicitly.

use crate::error::{Error, Result};
use crate::geometry::{SpherePoint, TangentVector};
use rayon::prelude::*;
use std::f64::consts::LN_2;

/// Two points closer than this (squared chordal distance) count as coincident.
const COINCIDENT_DIST_SQ: f64 = 1e-300;

/// Euler–Mascheroni constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Γ(1/3), used by the closed form of the conjectured N-coefficient.
const GAMMA_ONE_THIRD: f64 = 2.678_938_534_707_747_6;

/// An ordered list of N ≥ 2 points on the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    points: Vec<SpherePoint>,
}

impl Configuration {
    pub fn new(points: Vec<SpherePoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::TooFewPoints(points.len()));
        }
        Ok(Self { points })
    }

    /// Builds a configuration from raw coordinate triples, rescaling each onto
    /// the sphere.
    pub fn from_coords(rows: &[[f64; 3]]) -> Result<Self> {
        let points = rows
            .iter()
            .map(|r| SpherePoint::normalized(r[0], r[1], r[2]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &SpherePoint {
        &self.points[i]
    }

    /// Returns a copy with point `k` replaced.
    pub fn with_point(&self, k: usize, p: SpherePoint) -> Self {
        let mut points = self.points.clone();
        points[k] = p;
        Self { points }
    }
}

/// Per-point decomposition of the energy.
///
/// `per_point[i] = 2 Σ_{j≠i} log(1/‖x_i − x_j‖)`, i.e. the full ordered-pair
/// contribution of point i, so `total = ½ Σ_i per_point[i]`.
#[derive(Debug, Clone)]
pub struct EnergyBreakdown {
    pub total: f64,
    pub per_point: Vec<f64>,
    pub min_separation: f64,
}

#[inline]
fn pair_dist_sq(points: &[SpherePoint], i: usize, j: usize) -> Result<f64> {
    let d2 = points[i].dist_sq(&points[j]);
    if d2 < COINCIDENT_DIST_SQ {
        return Err(Error::CoincidentPoints { i, j });
    }
    Ok(d2)
}

pub(crate) fn log_energy_points(points: &[SpherePoint]) -> Result<f64> {
    let n = points.len();
    let mut total = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in (i + 1)..n {
            row += pair_dist_sq(points, i, j)?.ln();
        }
        total += row;
    }
    Ok(-total)
}

/// H_N of a configuration, summed in a fixed deterministic order.
pub fn log_energy(c: &Configuration) -> Result<f64> {
    log_energy_points(c.points())
}

/// H_N with the row sums computed in parallel and combined by pairwise (tree)
/// summation. Deterministic for a fixed input, but the summation order differs
/// from [`log_energy`]; agreement is guaranteed only to ~1e−9 relative.
pub fn log_energy_parallel(c: &Configuration) -> Result<f64> {
    let points = c.points();
    let n = points.len();
    let rows: Vec<Result<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = 0.0;
            for j in (i + 1)..n {
                row += pair_dist_sq(points, i, j)?.ln();
            }
            Ok(row)
        })
        .collect();
    let mut values = Vec::with_capacity(n);
    for row in rows {
        values.push(row?);
    }
    Ok(-pairwise_sum(&values))
}

/// Sums a slice by recursive halving.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

/// Energy of raw points in R³ (not necessarily on the sphere). The
/// second-derivative checks evaluate the energy along chords that leave the
/// sphere when the direction family is rescaled.
pub(crate) fn log_energy_raw(rows: &[[f64; 3]]) -> Result<f64> {
    let n = rows.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = rows[i][0] - rows[j][0];
            let dy = rows[i][1] - rows[j][1];
            let dz = rows[i][2] - rows[j][2];
            let d2 = dx * dx + dy * dy + dz * dz;
            if d2 < COINCIDENT_DIST_SQ {
                return Err(Error::CoincidentPoints { i, j });
            }
            total += d2.ln();
        }
    }
    Ok(-total)
}

/// Full per-point decomposition, plus the separation distance, in one pass.
pub fn log_energy_breakdown(c: &Configuration) -> Result<EnergyBreakdown> {
    let points = c.points();
    let n = points.len();
    let mut per_point = vec![0.0f64; n];
    let mut min_d2 = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            let d2 = pair_dist_sq(points, i, j)?;
            let term = d2.ln();
            per_point[i] -= term;
            per_point[j] -= term;
            min_d2 = min_d2.min(d2);
        }
    }
    let total = 0.5 * pairwise_sum(&per_point);
    Ok(EnergyBreakdown {
        total,
        per_point,
        min_separation: min_d2.sqrt(),
    })
}

pub(crate) fn delta_energy_points(
    points: &[SpherePoint],
    k: usize,
    p_new: &SpherePoint,
) -> Result<f64> {
    // Accumulates Π d² for both the old and new placements and takes a single
    // log at the end, rescaling whenever the running product nears the f64
    // range limits.
    let mut log_old = 0.0;
    let mut prod_old = 1.0f64;
    let mut log_new = 0.0;
    let mut prod_new = 1.0f64;
    for j in 0..points.len() {
        if j == k {
            continue;
        }
        let d2_old = pair_dist_sq(points, k, j)?;
        let d2_new = p_new.dist_sq(&points[j]);
        if d2_new < COINCIDENT_DIST_SQ {
            return Err(Error::CoincidentPoints { i: k, j });
        }
        prod_old *= d2_old;
        prod_new *= d2_new;
        if !(1e-280..=1e280).contains(&prod_old) {
            log_old += prod_old.ln();
            prod_old = 1.0;
        }
        if !(1e-280..=1e280).contains(&prod_new) {
            log_new += prod_new.ln();
            prod_new = 1.0;
        }
    }
    log_old += prod_old.ln();
    log_new += prod_new.ln();
    Ok(log_old - log_new)
}

/// H_N(c with point k moved to `p_new`) − H_N(c), from the 2(N−1) affected
/// ordered pairs. Matches a full recomputation to better than 1e−9 relative.
pub fn delta_energy_move(c: &Configuration, k: usize, p_new: &SpherePoint) -> Result<f64> {
    if k >= c.len() {
        return Err(Error::InvalidParameter(format!(
            "point index {k} out of range for n = {}",
            c.len()
        )));
    }
    delta_energy_points(c.points(), k, p_new)
}

/// Riemannian gradient of H_N: the Euclidean gradient
/// ∇_{x_i} H = −2 Σ_{j≠i} (x_i − x_j)/‖x_i − x_j‖² projected onto the tangent
/// plane at each x_i.
pub fn riemannian_gradient(c: &Configuration) -> Result<Vec<TangentVector>> {
    let points = c.points();
    let n = points.len();
    let mut grads = vec![[0.0f64; 3]; n];
    for i in 0..n {
        let pi = points[i].coords();
        for j in (i + 1)..n {
            let d2 = pair_dist_sq(points, i, j)?;
            let pj = points[j].coords();
            let scale = 2.0 / d2;
            for k in 0..3 {
                let d = (pi[k] - pj[k]) * scale;
                grads[i][k] -= d;
                grads[j][k] += d;
            }
        }
    }
    Ok(points
        .iter()
        .zip(grads)
        .map(|(p, g)| TangentVector::new_unchecked(*p, project_tangent(p, g), false))
        .collect())
}

/// Removes the radial component twice; the second pass knocks the residual of
/// the first below the tangency tolerance even for large gradients.
fn project_tangent(p: &SpherePoint, mut v: [f64; 3]) -> [f64; 3] {
    let a = p.coords();
    for _ in 0..2 {
        let dot = a[0] * v[0] + a[1] * v[1] + a[2] * v[2];
        for k in 0..3 {
            v[k] -= dot * a[k];
        }
    }
    v
}

/// Largest per-point gradient norm, the stopping statistic of the minimizer.
pub fn gradient_inf_norm(grads: &[TangentVector]) -> f64 {
    grads.iter().map(|g| g.norm()).fold(0.0, f64::max)
}

/// Minimal chordal distance over unordered pairs. Zero is a legal return for
/// degenerate configurations.
pub fn min_separation(c: &Configuration) -> f64 {
    let points = c.points();
    let n = points.len();
    let mut min_d2 = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            min_d2 = min_d2.min(points[i].dist_sq(&points[j]));
        }
    }
    min_d2.sqrt()
}

/// The constants of the large-N expansion of the minimal energy.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticConstants {
    /// Continuous minimal energy V_log(S²) = 1/2 − log 2.
    pub v_log: f64,
    /// Best known upper bound for the N-coefficient,
    /// 2 log 2 + ½ log(2/3) + 3 log(√π / Γ(1/3)), conjecturally an equality.
    pub c_log_upper: f64,
    /// Tightest known lower bound for the N-coefficient.
    pub c_log_lower: f64,
    /// Euler's constant γ.
    pub euler_gamma: f64,
}

impl AsymptoticConstants {
    pub fn standard() -> Self {
        let pi_sqrt = std::f64::consts::PI.sqrt();
        Self {
            v_log: 0.5 - LN_2,
            c_log_upper: 2.0 * LN_2
                + 0.5 * (2.0f64 / 3.0).ln()
                + 3.0 * (pi_sqrt / GAMMA_ONE_THIRD).ln(),
            c_log_lower: -0.223_282_352_6,
            euler_gamma: EULER_GAMMA,
        }
    }
}

/// The expansion V_log·N² − ½·N·log N + c_log·N, with the o(N) remainder
/// omitted. Because that remainder is uncontrolled, this is a sanity band for
/// finite N, not a test oracle.
pub fn asymptotic_min_estimate(n: usize, c_log: f64) -> f64 {
    assert!(n >= 2, "the expansion needs n >= 2");
    let nf = n as f64;
    let v = AsymptoticConstants::standard().v_log;
    v * nf * nf - 0.5 * nf * nf.ln() + c_log * nf
}

/// Mean energy of N uniform independent points: V_log·N² + (log 2 − ½)·N.
pub fn mean_energy_uniform(n: usize) -> f64 {
    assert!(n >= 2);
    let nf = n as f64;
    let v = AsymptoticConstants::standard().v_log;
    v * nf * nf + (LN_2 - 0.5) * nf
}

/// Mean energy of the zeros of the spherical Gaussian analytic function:
/// V_log·N² − ½·N·log N + (log 2 − ½)·N.
pub fn mean_energy_gaf(n: usize) -> f64 {
    assert!(n >= 2);
    let nf = n as f64;
    mean_energy_uniform(n) - 0.5 * nf * nf.ln()
}

/// Mean energy of the spherical ensemble:
/// V_log·N² − ½·N·log N + (log 2 − γ/2)·N − ¼, up to an O(1/N) remainder
/// that is omitted here.
pub fn mean_energy_dpp(n: usize) -> f64 {
    assert!(n >= 2);
    let nf = n as f64;
    let v = AsymptoticConstants::standard().v_log;
    v * nf * nf - 0.5 * nf * nf.ln() + (LN_2 - EULER_GAMMA / 2.0) * nf - 0.25
}
