//! Numerical verification of the concentration bounds for the Coulomb gas.
//!
//! The quantities checked here, for a gas at inverse temperature β ≥ 1 on N
//! points:
//!
//! * the admissible constant C_β = N(log β + 8 log N) and the sharper
//!   pre-rounding bound −N(1 + log β + 2 log N + log 20) on
//!   log Z + β·min H;
//! * the deviation exponent κ = c(β/N)log N − log β − 8 log N, giving
//!   P(H − min H > c log N) ≤ e^{−κN};
//! * the mean bound E[H] − min H ≤ (N/β)(log β + 8 log N);
//! * the perturbation bound: moving every point of a minimizer by at most
//!   arcsin(s/(√5·N^{3/2})) raises the energy by at most s², for
//!   0 < s ≤ √(5N)/2;
//! * the second-derivative chain behind it: along
//!   θ(t) = √(1−t²)·x* + t·v with unit tangent directions v_i,
//!   g̈(t) ≤ 10N³ and g(t) − g(0) ≤ 5t²N³ for 0 < t ≤ 1/(2N).
//!
//! Every "H − min" comparison uses the ledger value Ĥ_min ≥ min H, so the
//! deviation checks can only under-report violations; each report says so.

use crate::energy::{
    gradient_inf_norm, log_energy, log_energy_raw, riemannian_gradient, Configuration,
};
use crate::error::{Error, Result};
use crate::geometry::{geodesic_step, random_tangent_unit, SpherePoint};
use crate::minimize::Ledger;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Slack added to the perturbation-bound comparison to absorb rounding and
/// the residual gradient of a numerically converged minimizer.
const PERTURB_TOL: f64 = 1e-9;

/// Relative tolerance on the finite-difference comparison against 10N³.
const SECOND_DERIV_REL_TOL: f64 = 1e-4;

const LEDGER_NOTE: &str = "H_min is the ledger value, an upper bound for the true minimum; \
deviation statistics are conservative.";

/// A serialized check outcome; every verification artifact renders to this
/// shape.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub schema_version: u32,
    pub check: String,
    pub n: Option<usize>,
    pub beta: Option<f64>,
    pub params: serde_json::Value,
    pub theoretical_bound: f64,
    pub empirical_value: f64,
    pub ci: Option<[f64; 2]>,
    pub pass: bool,
    pub note: String,
}

/// The headline quantities for a gas at (n, β) and deviation constant c.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremQuantities {
    pub n: usize,
    pub beta: f64,
    pub c: f64,
    /// κ = c(β/N)·log N − log β − 8·log N.
    pub kappa: f64,
    /// −κN; reported in log space because e^{−κN} underflows fast.
    pub log_prob_bound: f64,
    pub prob_bound: f64,
    /// (N/β)(log β + 8 log N).
    pub mean_bound: f64,
    /// C_β = N(log β + 8 log N).
    pub c_beta_sphere: f64,
    /// δ = c·log N.
    pub delta: f64,
    /// κ ≤ 0 makes the probability bound vacuous.
    pub trivial_bound: bool,
}

fn check_domain(n: usize, beta: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    if !(beta >= 1.0) || !beta.is_finite() {
        return Err(Error::OutOfRange {
            name: "beta",
            value: beta,
            range: "[1, inf)",
        });
    }
    Ok(())
}

pub fn theorem_quantities(n: usize, beta: f64, c: f64) -> Result<TheoremQuantities> {
    check_domain(n, beta)?;
    if !(c > 0.0) {
        return Err(Error::OutOfRange {
            name: "c",
            value: c,
            range: "(0, inf)",
        });
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let ln_b = beta.ln();
    let kappa = c * (beta / nf) * ln_n - ln_b - 8.0 * ln_n;
    let log_prob_bound = -kappa * nf;
    Ok(TheoremQuantities {
        n,
        beta,
        c,
        kappa,
        log_prob_bound,
        prob_bound: log_prob_bound.exp(),
        mean_bound: (nf / beta) * (ln_b + 8.0 * ln_n),
        c_beta_sphere: nf * (ln_b + 8.0 * ln_n),
        delta: c * ln_n,
        trivial_bound: kappa <= 0.0,
    })
}

/// The pre-rounding lower bound on log Z + β·min H:
/// −N(1 + log β + 2 log N + log 20), attained by optimizing the cap radius at
/// s = √(N/β) (admissible exactly because β ≥ 1). Always at least
/// −C_β = −N(log β + 8 log N) for N ≥ 2.
pub fn tight_log_z_lower_bound(n: usize, beta: f64) -> Result<f64> {
    check_domain(n, beta)?;
    let nf = n as f64;
    let value = -nf * (1.0 + beta.ln() + 2.0 * nf.ln() + 20f64.ln());
    let rounded = -nf * (beta.ln() + 8.0 * nf.ln());
    assert!(
        value >= rounded,
        "rounding step must only weaken the bound: {value} < {rounded}"
    );
    Ok(value)
}

/// Largest admissible perturbation amplitude for n points: √(5n)/2.
pub fn max_perturbation_s(n: usize) -> f64 {
    (5.0 * n as f64).sqrt() / 2.0
}

/// A perturbation experiment around a ledger minimizer.
#[derive(Debug, Clone, Serialize)]
pub struct PerturbationTestSpec {
    pub n: usize,
    /// Amplitude in (0, √(5n)/2]; every point moves by at most
    /// arcsin(s/(√5·n^{3/2})) and the energy may rise by at most s².
    pub s: f64,
    pub trials: usize,
    pub seed: u64,
    /// Inputs whose gradient inf-norm exceeds this are rejected as
    /// non-minimizers (ten times the default optimizer tolerance).
    pub max_grad_inf: f64,
}

impl PerturbationTestSpec {
    pub fn new(n: usize, s: f64, trials: usize, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewPoints(n));
        }
        let s_max = max_perturbation_s(n);
        if !(s > 0.0 && s <= s_max) {
            return Err(Error::InvalidParameter(format!(
                "s = {s} outside (0, {s_max}] for n = {n}"
            )));
        }
        if trials == 0 {
            return Err(Error::InvalidParameter("trials must be positive".into()));
        }
        Ok(Self {
            n,
            s,
            trials,
            seed,
            max_grad_inf: 1e-9 * n as f64,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PerturbationReport {
    pub n: usize,
    pub s: f64,
    /// Step parameter t = s/(√5·n^{3/2}); the geodesic radius is arcsin(t).
    pub t: f64,
    pub minimizer_energy: f64,
    /// Energy budget H(x*) + s² (before the comparison slack).
    pub budget: f64,
    pub trials_interior: usize,
    pub trials_boundary: usize,
    pub violations: usize,
    /// max over trials of H(perturbed) − budget; negative when all pass.
    pub worst_excess: f64,
    pub pass: bool,
}

fn require_minimizer(config: &Configuration, limit: f64) -> Result<f64> {
    let grad_inf = gradient_inf_norm(&riemannian_gradient(config)?);
    if grad_inf > limit {
        return Err(Error::NotAMinimizer { grad_inf, limit });
    }
    Ok(grad_inf)
}

/// Randomized check of the perturbation bound H(x) ≤ H(x*) + s² over the
/// product of geodesic balls of radius arcsin(t) around the minimizer, plus
/// the exact-boundary family where every point moves by the full radius.
pub fn check_perturbation_bound(
    minimizer: &Configuration,
    spec: &PerturbationTestSpec,
) -> Result<PerturbationReport> {
    if minimizer.len() != spec.n {
        return Err(Error::InvalidParameter(format!(
            "minimizer has {} points but the perturbation spec expects n = {}",
            minimizer.len(),
            spec.n
        )));
    }
    require_minimizer(minimizer, spec.max_grad_inf)?;
    let nf = spec.n as f64;
    let t = spec.s / (5f64.sqrt() * nf.powf(1.5));
    let radius = t.asin();
    let h0 = log_energy(minimizer)?;
    let budget = h0 + spec.s * spec.s;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut violations = 0usize;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut run_trial = |boundary: bool, rng: &mut ChaCha8Rng| -> Result<()> {
        let points: Vec<SpherePoint> = minimizer
            .points()
            .iter()
            .map(|p| {
                let dir = random_tangent_unit(*p, rng);
                let param = if boundary {
                    t
                } else {
                    (rng.random::<f64>() * radius).sin()
                };
                geodesic_step(&dir, param)
            })
            .collect::<Result<_>>()?;
        let h = log_energy(&Configuration::new(points)?)?;
        let excess = h - budget;
        if excess > worst_excess {
            worst_excess = excess;
        }
        if excess > PERTURB_TOL {
            violations += 1;
        }
        Ok(())
    };
    for _ in 0..spec.trials {
        run_trial(false, &mut rng)?;
    }
    for _ in 0..spec.trials {
        run_trial(true, &mut rng)?;
    }

    Ok(PerturbationReport {
        n: spec.n,
        s: spec.s,
        t,
        minimizer_energy: h0,
        budget,
        trials_interior: spec.trials,
        trials_boundary: spec.trials,
        violations,
        worst_excess,
        pass: violations == 0,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SecondDerivativeEntry {
    pub t: f64,
    /// Largest finite-difference g̈(t) over the direction families, with each
    /// v_i a unit tangent vector (the convention the 10N³ bound is checked
    /// against).
    pub gddot_unit_max: f64,
    /// Same statistic with the direction family rescaled by 1/√N, the
    /// alternative reading of a unit direction in the product space; reported
    /// for comparison, not asserted.
    pub gddot_scaled_max: f64,
    /// max over directions of g(t) − g(0).
    pub taylor_gap_max: f64,
    /// 5t²N³.
    pub taylor_bound: f64,
    /// min over directions of g(t) − g(0); a minimizer keeps this ≥ 0.
    pub min_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SecondDerivativeReport {
    pub n: usize,
    /// 10N³.
    pub bound: f64,
    pub directions: usize,
    pub entries: Vec<SecondDerivativeEntry>,
    pub pass: bool,
}

/// Finite-difference check of g̈(t) ≤ 10N³ and g(t) − g(0) ≤ 5t²N³ along
/// random tangent direction families, on a grid of t in (0, 1/(2N)].
pub fn check_second_derivative_bound(
    minimizer: &Configuration,
    t_grid: &[f64],
    directions: usize,
    seed: u64,
) -> Result<SecondDerivativeReport> {
    let n = minimizer.len();
    let nf = n as f64;
    let t_cap = 1.0 / (2.0 * nf);
    if t_grid.is_empty() {
        return Err(Error::InvalidParameter("empty t grid".into()));
    }
    for &t in t_grid {
        if !(t > 0.0 && t <= t_cap) {
            return Err(Error::OutOfRange {
                name: "t",
                value: t,
                range: "(0, 1/(2n)]",
            });
        }
    }
    if directions == 0 {
        return Err(Error::InvalidParameter(
            "need at least one direction family".into(),
        ));
    }
    require_minimizer(minimizer, 1e-9 * nf)?;

    let bound = 10.0 * nf * nf * nf;
    let base: Vec<[f64; 3]> = minimizer.points().iter().map(|p| p.coords()).collect();
    let g0 = log_energy(minimizer)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut entries: Vec<SecondDerivativeEntry> = t_grid
        .iter()
        .map(|&t| SecondDerivativeEntry {
            t,
            gddot_unit_max: f64::NEG_INFINITY,
            gddot_scaled_max: f64::NEG_INFINITY,
            taylor_gap_max: f64::NEG_INFINITY,
            taylor_bound: 5.0 * t * t * nf * nf * nf,
            min_gap: f64::INFINITY,
        })
        .collect();

    for _ in 0..directions {
        let dirs: Vec<[f64; 3]> = minimizer
            .points()
            .iter()
            .map(|p| random_tangent_unit(*p, &mut rng).components())
            .collect();
        let eval_unit = |t: f64| -> Result<f64> {
            let rows: Vec<[f64; 3]> = base
                .iter()
                .zip(&dirs)
                .map(|(x, v)| chord_point(x, v, t, 1.0))
                .collect();
            log_energy_raw(&rows)
        };
        let scale = 1.0 / nf.sqrt();
        let eval_scaled = |t: f64| -> Result<f64> {
            let rows: Vec<[f64; 3]> = base
                .iter()
                .zip(&dirs)
                .map(|(x, v)| chord_point(x, v, t, scale))
                .collect();
            log_energy_raw(&rows)
        };

        for entry in entries.iter_mut() {
            let t = entry.t;
            let g_t = eval_unit(t)?;
            let gap = g_t - g0;
            entry.taylor_gap_max = entry.taylor_gap_max.max(gap);
            entry.min_gap = entry.min_gap.min(gap);
            let dd_unit = second_difference(&eval_unit, t, g_t)?;
            let dd_scaled = second_difference(&eval_scaled, t, eval_scaled(t)?)?;
            entry.gddot_unit_max = entry.gddot_unit_max.max(dd_unit);
            entry.gddot_scaled_max = entry.gddot_scaled_max.max(dd_scaled);
        }
    }

    let pass = entries.iter().all(|e| {
        e.gddot_unit_max <= bound * (1.0 + SECOND_DERIV_REL_TOL)
            && e.taylor_gap_max <= e.taylor_bound + PERTURB_TOL
            && e.min_gap >= -PERTURB_TOL
    });
    Ok(SecondDerivativeReport {
        n,
        bound,
        directions,
        entries,
        pass,
    })
}

/// θ_i(t) = √(1−t²)·x_i + t·scale·v_i. With scale = 1 and unit tangent v_i
/// this stays on the sphere; smaller scales trace a chord inside it.
fn chord_point(x: &[f64; 3], v: &[f64; 3], t: f64, scale: f64) -> [f64; 3] {
    let c = (1.0 - t * t).sqrt();
    [
        c * x[0] + t * scale * v[0],
        c * x[1] + t * scale * v[1],
        c * x[2] + t * scale * v[2],
    ]
}

/// Central second difference with h = 1e−4·t, Richardson-extrapolated for
/// t < 1e−3 where the plain stencil loses accuracy.
fn second_difference(eval: &dyn Fn(f64) -> Result<f64>, t: f64, g_t: f64) -> Result<f64> {
    let stencil = |h: f64| -> Result<f64> {
        let plus = eval(t + h)?;
        let minus = eval(t - h)?;
        Ok((plus - 2.0 * g_t + minus) / (h * h))
    };
    let h = 1e-4 * t;
    if t < 1e-3 {
        let d_h = stencil(h)?;
        let d_half = stencil(h / 2.0)?;
        Ok((4.0 * d_half - d_h) / 3.0)
    } else {
        stencil(h)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DeviationReport {
    pub n: usize,
    pub c: f64,
    pub ledger_energy: f64,
    /// The deviation window c·log n.
    pub window: f64,
    pub samples: usize,
    pub violations: usize,
    pub rate: f64,
    /// 95% Wilson interval for the violation rate.
    pub ci: [f64; 2],
    /// log of the theoretical bound e^{−κn}, when β is supplied.
    pub log_theoretical_bound: Option<f64>,
    /// Samples strictly below the ledger value: ledger-update events, not
    /// failures.
    pub improvements: usize,
    pub best_energy_seen: f64,
    pub note: String,
}

/// Fraction of samples with H − Ĥ_min(n) > c·log n, against the theoretical
/// rate e^{−κn} when the sampling β is supplied.
pub fn empirical_deviation_rate(
    samples: &[Configuration],
    n: usize,
    c: f64,
    beta: Option<f64>,
    ledger: &Ledger,
) -> Result<DeviationReport> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples supplied".into()));
    }
    let ledger_energy = ledger.energy(n).ok_or(Error::MissingLedgerEntry(n))?;
    let window = c * (n as f64).ln();
    let mut violations = 0usize;
    let mut improvements = 0usize;
    let mut best = f64::INFINITY;
    for sample in samples {
        if sample.len() != n {
            return Err(Error::InvalidParameter(format!(
                "sample has {} points, expected {n}",
                sample.len()
            )));
        }
        let h = log_energy(sample)?;
        if h - ledger_energy > window {
            violations += 1;
        }
        if h < ledger_energy {
            improvements += 1;
        }
        if h < best {
            best = h;
        }
    }
    let rate = violations as f64 / samples.len() as f64;
    let log_theoretical_bound = match beta {
        Some(b) => Some(theorem_quantities(n, b, c)?.log_prob_bound),
        None => None,
    };
    Ok(DeviationReport {
        n,
        c,
        ledger_energy,
        window,
        samples: samples.len(),
        violations,
        rate,
        ci: wilson_interval(violations, samples.len()),
        log_theoretical_bound,
        improvements,
        best_energy_seen: best,
        note: LEDGER_NOTE.into(),
    })
}

/// 95% Wilson score interval for a binomial proportion.
fn wilson_interval(successes: usize, trials: usize) -> [f64; 2] {
    let z = 1.959_963_984_540_054; // 97.5% normal quantile
    let nf = trials as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    [(center - half).max(0.0), (center + half).min(1.0)]
}

#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub n: usize,
    pub beta: f64,
    pub samples: usize,
    pub mean_energy: f64,
    /// mean(H) − Ĥ_min(n).
    pub gap: f64,
    pub std_err: f64,
    /// (n/β)(log β + 8 log n).
    pub bound: f64,
    pub pass: bool,
    pub note: String,
}

/// Sample-mean energy gap against the mean bound, passed when
/// gap ≤ bound + 3·SE.
pub fn mean_energy_gap(
    samples: &[Configuration],
    n: usize,
    beta: f64,
    ledger: &Ledger,
) -> Result<GapReport> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples supplied".into()));
    }
    check_domain(n, beta)?;
    let ledger_energy = ledger.energy(n).ok_or(Error::MissingLedgerEntry(n))?;
    let energies: Vec<f64> = samples.iter().map(log_energy).collect::<Result<Vec<_>>>()?;
    let k = energies.len() as f64;
    let mean = energies.iter().sum::<f64>() / k;
    let var = if energies.len() > 1 {
        energies
            .iter()
            .map(|e| (e - mean) * (e - mean))
            .sum::<f64>()
            / (k - 1.0)
    } else {
        0.0
    };
    let std_err = (var / k).sqrt();
    let nf = n as f64;
    let bound = (nf / beta) * (beta.ln() + 8.0 * nf.ln());
    let gap = mean - ledger_energy;
    Ok(GapReport {
        n,
        beta,
        samples: samples.len(),
        mean_energy: mean,
        gap,
        std_err,
        bound,
        pass: gap <= bound + 3.0 * std_err,
        note: LEDGER_NOTE.into(),
    })
}

impl TheoremQuantities {
    pub fn to_check_report(&self) -> CheckReport {
        CheckReport {
            schema_version: crate::SCHEMA_VERSION,
            check: "theorem-quantities".into(),
            n: Some(self.n),
            beta: Some(self.beta),
            params: serde_json::json!({ "c": self.c }),
            theoretical_bound: self.mean_bound,
            empirical_value: self.kappa,
            ci: None,
            pass: true,
            note: if self.trivial_bound {
                "kappa <= 0: the probability bound is trivial at these parameters".into()
            } else {
                format!("log probability bound = {:.6}", self.log_prob_bound)
            },
        }
    }
}

impl PerturbationReport {
    pub fn to_check_report(&self) -> CheckReport {
        CheckReport {
            schema_version: crate::SCHEMA_VERSION,
            check: "perturbation-bound".into(),
            n: Some(self.n),
            beta: None,
            params: serde_json::json!({
                "s": self.s,
                "t": self.t,
                "trials_interior": self.trials_interior,
                "trials_boundary": self.trials_boundary,
            }),
            theoretical_bound: self.budget,
            empirical_value: self.budget + self.worst_excess,
            ci: None,
            pass: self.pass,
            note: LEDGER_NOTE.into(),
        }
    }
}

impl SecondDerivativeReport {
    pub fn to_check_report(&self) -> CheckReport {
        let worst = self
            .entries
            .iter()
            .map(|e| e.gddot_unit_max)
            .fold(f64::NEG_INFINITY, f64::max);
        CheckReport {
            schema_version: crate::SCHEMA_VERSION,
            check: "second-derivative-bound".into(),
            n: Some(self.n),
            beta: None,
            params: serde_json::json!({
                "directions": self.directions,
                "t_grid": self.entries.iter().map(|e| e.t).collect::<Vec<_>>(),
            }),
            theoretical_bound: self.bound,
            empirical_value: worst,
            ci: None,
            pass: self.pass,
            note: "unit tangent directions asserted; 1/sqrt(N)-scaled directions reported".into(),
        }
    }
}

impl DeviationReport {
    pub fn to_check_report(&self) -> CheckReport {
        CheckReport {
            schema_version: crate::SCHEMA_VERSION,
            check: "deviation-rate".into(),
            n: Some(self.n),
            beta: None,
            params: serde_json::json!({
                "c": self.c,
                "samples": self.samples,
                "improvements": self.improvements,
            }),
            theoretical_bound: self.log_theoretical_bound.map_or(f64::NAN, f64::exp),
            empirical_value: self.rate,
            ci: Some(self.ci),
            pass: true,
            note: self.note.clone(),
        }
    }
}

impl GapReport {
    pub fn to_check_report(&self) -> CheckReport {
        CheckReport {
            schema_version: crate::SCHEMA_VERSION,
            check: "mean-energy-gap".into(),
            n: Some(self.n),
            beta: Some(self.beta),
            params: serde_json::json!({ "samples": self.samples }),
            theoretical_bound: self.bound,
            empirical_value: self.gap,
            ci: Some([self.gap - 3.0 * self.std_err, self.gap + 3.0 * self.std_err]),
            pass: self.pass,
            note: self.note.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minimize::{LedgerSource, MinimumLedgerEntry};
    use std::f64::consts::LN_2;

    #[test]
    fn kappa_at_beta_equal_n() {
        // At β = n and c = 10: κ = log n and the mean bound is 9 log n.
        for n in [2usize, 10, 100] {
            let q = theorem_quantities(n, n as f64, 10.0).unwrap();
            let ln_n = (n as f64).ln();
            assert!((q.kappa - ln_n).abs() < 1e-12);
            assert!((q.mean_bound - 9.0 * ln_n).abs() < 1e-12);
            assert!((q.log_prob_bound + n as f64 * ln_n).abs() < 1e-9);
            assert!(!q.trivial_bound);
            assert!((q.delta - 10.0 * ln_n).abs() < 1e-12);
        }
    }

    #[test]
    fn beta_one_is_usually_trivial() {
        let q = theorem_quantities(50, 1.0, 10.0).unwrap();
        // κ = 10·log(50)/50 − 8·log 50 < 0.
        assert!(q.kappa < 0.0);
        assert!(q.trivial_bound);
        assert!(q.prob_bound > 1.0);
    }

    #[test]
    fn c_beta_sphere_example() {
        let q = theorem_quantities(2, 1.0, 1.0).unwrap();
        assert!((q.c_beta_sphere - 16.0 * LN_2).abs() < 1e-12);
        assert!((q.c_beta_sphere - 11.0904).abs() < 1e-4);
    }

    #[test]
    fn tight_bound_examples() {
        let v = tight_log_z_lower_bound(2, 1.0).unwrap();
        let expected = -2.0 * (1.0 + 2.0 * LN_2 + 20f64.ln());
        assert!((v - expected).abs() < 1e-12);
        assert!(v >= -16.0 * LN_2);
        // Monotone decreasing in beta.
        assert!(
            tight_log_z_lower_bound(8, 2.0).unwrap() > tight_log_z_lower_bound(8, 4.0).unwrap()
        );
        // Strictly above the rounded bound on a grid.
        for n in (2..=1000).step_by(7) {
            let nf = n as f64;
            let tight = tight_log_z_lower_bound(n, 1.0).unwrap();
            let rounded = -nf * 8.0 * nf.ln();
            assert!(tight > rounded);
        }
    }

    #[test]
    fn domain_checks() {
        assert!(theorem_quantities(1, 2.0, 1.0).is_err());
        assert!(theorem_quantities(4, 0.5, 1.0).is_err());
        assert!(theorem_quantities(4, 2.0, 0.0).is_err());
        assert!(tight_log_z_lower_bound(4, 0.3).is_err());
        assert!(PerturbationTestSpec::new(4, 0.0, 10, 0).is_err());
        assert!(PerturbationTestSpec::new(4, 10.0, 10, 0).is_err());
    }

    fn antipodal() -> Configuration {
        Configuration::new(vec![SpherePoint::NORTH_POLE, SpherePoint::SOUTH_POLE]).unwrap()
    }

    #[test]
    fn perturbation_on_the_antipodal_pair() {
        let spec = PerturbationTestSpec::new(2, 1.0, 500, 7).unwrap();
        let report = check_perturbation_bound(&antipodal(), &spec).unwrap();
        assert!(report.pass, "worst excess {}", report.worst_excess);
        assert_eq!(report.violations, 0);
        assert!((report.budget - (-2.0 * LN_2 + 1.0)).abs() < 1e-12);
        // Tiny s: the perturbed configuration is essentially the minimizer.
        let spec = PerturbationTestSpec::new(2, 1e-9, 50, 7).unwrap();
        let report = check_perturbation_bound(&antipodal(), &spec).unwrap();
        assert!(report.pass);
        assert!(report.worst_excess <= 0.0);
    }

    #[test]
    fn perturbation_rejects_non_minimizers() {
        let skew = Configuration::new(vec![
            SpherePoint::NORTH_POLE,
            SpherePoint::new(1.0, 0.0, 0.0).unwrap(),
        ])
        .unwrap();
        let spec = PerturbationTestSpec::new(2, 0.5, 10, 0).unwrap();
        assert!(matches!(
            check_perturbation_bound(&skew, &spec),
            Err(Error::NotAMinimizer { .. })
        ));
    }

    #[test]
    fn second_derivative_on_the_antipodal_pair() {
        // For n = 2 the bound is g̈ ≤ 80 on t ∈ (0, 1/4].
        let grid = [0.05, 0.1, 0.2, 0.25];
        let report = check_second_derivative_bound(&antipodal(), &grid, 4, 99).unwrap();
        assert!(report.pass);
        assert_eq!(report.bound, 80.0);
        for e in &report.entries {
            assert!(e.gddot_unit_max <= 80.0 * (1.0 + 1e-4));
            assert!(e.min_gap >= -1e-9);
            assert!(e.taylor_gap_max <= e.taylor_bound + 1e-9);
        }
        // Grid domain is enforced.
        assert!(check_second_derivative_bound(&antipodal(), &[0.3], 1, 0).is_err());
        assert!(check_second_derivative_bound(&antipodal(), &[], 1, 0).is_err());
    }

    #[test]
    fn deviation_rate_trivial_cases() {
        let mut ledger = Ledger::in_memory();
        let c = antipodal();
        let h = log_energy(&c).unwrap();
        ledger
            .update(
                MinimumLedgerEntry::new(2, h, &c, LedgerSource::Analytic),
                &c,
            )
            .unwrap();
        // Samples identical to the ledger configuration never violate.
        let samples = vec![c.clone(), c.clone(), c.clone()];
        let report = empirical_deviation_rate(&samples, 2, 10.0, Some(2.0), &ledger).unwrap();
        assert_eq!(report.violations, 0);
        assert_eq!(report.rate, 0.0);
        assert_eq!(report.improvements, 0);
        assert!(report.ci[0] <= 0.0 + 1e-12);
        // Missing ledger entry is an explicit error.
        assert!(matches!(
            empirical_deviation_rate(&samples, 2, 10.0, None, &Ledger::in_memory()),
            Err(Error::MissingLedgerEntry(2))
        ));
    }

    #[test]
    fn deviation_rate_flags_improvements() {
        let mut ledger = Ledger::in_memory();
        let worse = Configuration::new(vec![
            SpherePoint::NORTH_POLE,
            SpherePoint::new(1.0, 0.0, 0.0).unwrap(),
        ])
        .unwrap();
        let h_worse = log_energy(&worse).unwrap();
        ledger
            .update(
                MinimumLedgerEntry::new(2, h_worse, &worse, LedgerSource::Optimizer),
                &worse,
            )
            .unwrap();
        let report = empirical_deviation_rate(&[antipodal()], 2, 10.0, None, &ledger).unwrap();
        assert_eq!(report.improvements, 1);
        assert!(report.best_energy_seen < h_worse);
    }

    #[test]
    fn mean_gap_of_the_minimizer_is_zero() {
        let mut ledger = Ledger::in_memory();
        let c = antipodal();
        let h = log_energy(&c).unwrap();
        ledger
            .update(
                MinimumLedgerEntry::new(2, h, &c, LedgerSource::Analytic),
                &c,
            )
            .unwrap();
        let report = mean_energy_gap(&[c.clone(), c], 2, 2.0, &ledger).unwrap();
        assert!(report.pass);
        assert!(report.gap.abs() < 1e-12);
        assert_eq!(report.std_err, 0.0);
        let ln2 = LN_2;
        assert!((report.bound - (2.0 / 2.0) * (ln2 + 8.0 * ln2)).abs() < 1e-12);
    }

    #[test]
    fn wilson_interval_sanity() {
        let [lo, hi] = wilson_interval(0, 100);
        assert!(lo <= 1e-15);
        assert!(hi < 0.05);
        let [lo, hi] = wilson_interval(50, 100);
        assert!(lo < 0.5 && 0.5 < hi);
        let [_, hi] = wilson_interval(100, 100);
        assert!(hi >= 1.0 - 1e-15);
    }
}
