//! Gibbs measures over finite state spaces.
//!
//! For a state space with reference weights μ and energy H, the Gibbs measure
//! at inverse temperature β is P_β ∝ e^{−βH} μ. On a finite space its
//! partition function, deviation probabilities, and mean energy can be
//! enumerated exactly, which makes the two concentration statements
//! machine-checkable to rounding error:
//!
//! * if log Z_β ≥ −β·inf H − C_β, then P_β(H − inf H > δ) ≤ e^{−βδ + C_β};
//! * under the same hypothesis, E_β[H] − inf H ≤ C_β/β (and ≤ e^{C_β}/β).
//!
//! These checks are the discrete instantiation of the bounds the sphere-level
//! modules rely on analytically.
//!
//! All partition sums run in log space with a max shift; β up to 1e6 must not
//! overflow.

use crate::error::{Error, Result};

/// A finite reference space: M ≥ 1 states with energies and strictly positive
/// weights summing to one. Energies may be +∞ (zero Gibbs mass) but the
/// minimum must be finite.
#[derive(Debug, Clone)]
pub struct DiscreteGibbsSystem<S = usize> {
    states: Vec<S>,
    energies: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteGibbsSystem<usize> {
    /// System with states labeled by their index.
    pub fn from_energies(energies: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let states = (0..energies.len()).collect();
        Self::new(states, energies, weights)
    }

    /// Same, with the uniform reference measure.
    pub fn uniform_reference(energies: Vec<f64>) -> Result<Self> {
        let m = energies.len();
        if m == 0 {
            return Err(Error::InvalidParameter(
                "a Gibbs system needs at least one state".into(),
            ));
        }
        let w = 1.0 / m as f64;
        Self::from_energies(energies, vec![w; m])
    }
}

impl<S> DiscreteGibbsSystem<S> {
    pub fn new(states: Vec<S>, energies: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let m = states.len();
        if m == 0 {
            return Err(Error::InvalidParameter(
                "a Gibbs system needs at least one state".into(),
            ));
        }
        if energies.len() != m || weights.len() != m {
            return Err(Error::InvalidParameter(format!(
                "mismatched lengths: {} states, {} energies, {} weights",
                m,
                energies.len(),
                weights.len()
            )));
        }
        if energies
            .iter()
            .any(|e| e.is_nan() || *e == f64::NEG_INFINITY)
        {
            return Err(Error::InvalidParameter(
                "energies must be real or +inf".into(),
            ));
        }
        let inf = energies.iter().cloned().fold(f64::INFINITY, f64::min);
        if !inf.is_finite() {
            return Err(Error::InvalidParameter(
                "the minimal energy must be finite".into(),
            ));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter(
                "weights must be strictly positive".into(),
            ));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "weights must sum to 1, got {sum}"
            )));
        }
        Ok(Self {
            states,
            energies,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn inf_energy(&self) -> f64 {
        self.energies.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Exactly enumerated quantities of a Gibbs measure at one β.
#[derive(Debug, Clone, Copy)]
pub struct GibbsQuantities {
    pub beta: f64,
    pub log_z: f64,
    pub mean_energy: f64,
    pub inf_energy: f64,
    /// The tightest admissible constant: C_β = −log Z_β − β·inf H. Always ≥ 0,
    /// and zero exactly when the energy is constant on the support.
    pub c_beta_tight: f64,
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::OutOfRange {
            name: "beta",
            value: beta,
            range: "(0, inf)",
        });
    }
    Ok(())
}

/// log Σ_m w_m e^{−β E_m} and the derived quantities, via max-shifted
/// log-sum-exp.
pub fn compute_quantities<S>(sys: &DiscreteGibbsSystem<S>, beta: f64) -> Result<GibbsQuantities> {
    check_beta(beta)?;
    let log_terms: Vec<f64> = sys
        .energies()
        .iter()
        .zip(sys.weights())
        .map(|(e, w)| {
            if e.is_finite() {
                w.ln() - beta * e
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let shift = log_terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = log_terms.iter().map(|t| (t - shift).exp()).sum();
    let log_z = shift + sum.ln();
    let mut mean = 0.0;
    for (t, e) in log_terms.iter().zip(sys.energies()) {
        let p = (t - log_z).exp();
        if p > 0.0 {
            mean += p * e;
        }
    }
    let inf_energy = sys.inf_energy();
    // Mathematically ≥ 0; clamp the rounding residue so the invariant is exact.
    let c_beta_tight = (-log_z - beta * inf_energy).max(0.0);
    Ok(GibbsQuantities {
        beta,
        log_z,
        mean_energy: mean,
        inf_energy,
        c_beta_tight,
    })
}

/// Per-state Gibbs probabilities w_m e^{−β E_m} / Z_β.
pub fn state_probabilities<S>(sys: &DiscreteGibbsSystem<S>, beta: f64) -> Result<Vec<f64>> {
    let q = compute_quantities(sys, beta)?;
    Ok(sys
        .energies()
        .iter()
        .zip(sys.weights())
        .map(|(e, w)| {
            if e.is_finite() {
                (w.ln() - beta * e - q.log_z).exp()
            } else {
                0.0
            }
        })
        .collect())
}

/// Exact P_β(H − inf H > δ).
pub fn deviation_probability<S>(
    sys: &DiscreteGibbsSystem<S>,
    beta: f64,
    delta: f64,
) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            range: "(0, inf)",
        });
    }
    let probs = state_probabilities(sys, beta)?;
    let inf = sys.inf_energy();
    Ok(sys
        .energies()
        .iter()
        .zip(&probs)
        .filter(|(e, _)| **e - inf > delta)
        .map(|(_, p)| p)
        .sum())
}

/// Comparison slack on the float comparisons of the lemma checks.
const LEMMA_EPS: f64 = 1e-12;

fn check_c_beta<S>(
    sys: &DiscreteGibbsSystem<S>,
    beta: f64,
    c_beta: f64,
) -> Result<GibbsQuantities> {
    let q = compute_quantities(sys, beta)?;
    if c_beta < q.c_beta_tight - LEMMA_EPS {
        return Err(Error::InvalidParameter(format!(
            "C_beta = {c_beta} is not admissible: it must be at least -log Z - beta*inf H = {}",
            q.c_beta_tight
        )));
    }
    Ok(q)
}

/// Outcome of the deviation-bound check over a grid of δ values.
#[derive(Debug, Clone)]
pub struct ConcentrationReport {
    pub beta: f64,
    pub c_beta: f64,
    pub checked: usize,
    pub violations: usize,
    /// min over the grid of (bound − probability); tiny negative values within
    /// the comparison slack still count as passing.
    pub worst_slack: f64,
    pub pass: bool,
}

/// Checks P_β(H − inf H > δ) ≤ e^{−βδ + C_β} for every δ in the grid.
///
/// `c_beta` must be admissible, i.e. at least the tight constant reported by
/// [`compute_quantities`].
pub fn verify_concentration_lemma<S>(
    sys: &DiscreteGibbsSystem<S>,
    beta: f64,
    c_beta: f64,
    delta_grid: &[f64],
) -> Result<ConcentrationReport> {
    check_c_beta(sys, beta, c_beta)?;
    let mut worst_slack = f64::INFINITY;
    let mut violations = 0;
    for &delta in delta_grid {
        let prob = deviation_probability(sys, beta, delta)?;
        // The bound may overflow to +inf for small βδ relative to C_β; the
        // comparison stays meaningful because prob ≤ 1.
        let bound = (-beta * delta + c_beta).exp();
        let slack = bound - prob;
        if prob > bound + LEMMA_EPS * bound.max(1.0) {
            violations += 1;
        }
        if slack < worst_slack {
            worst_slack = slack;
        }
    }
    Ok(ConcentrationReport {
        beta,
        c_beta,
        checked: delta_grid.len(),
        violations,
        worst_slack,
        pass: violations == 0,
    })
}

/// Outcome of the mean-energy bound check.
#[derive(Debug, Clone)]
pub struct ExpectationReport {
    pub beta: f64,
    pub c_beta: f64,
    pub gap: f64,
    /// C_β/β − (E_β[H] − inf H).
    pub slack_tight: f64,
    /// e^{C_β}/β − (E_β[H] − inf H), evaluated in log space; +∞ when the bound
    /// itself overflows.
    pub slack_exponential: f64,
    pub pass: bool,
}

/// Checks E_β[H] − inf H ≤ C_β/β, and the weaker bound e^{C_β}/β.
pub fn verify_expectation_lemma<S>(
    sys: &DiscreteGibbsSystem<S>,
    beta: f64,
    c_beta: f64,
) -> Result<ExpectationReport> {
    let q = check_c_beta(sys, beta, c_beta)?;
    let gap = q.mean_energy - q.inf_energy;
    let tight_bound = c_beta / beta;
    let slack_tight = tight_bound - gap;
    let log_exp_bound = c_beta - beta.ln();
    let slack_exponential = if log_exp_bound > 700.0 {
        f64::INFINITY
    } else {
        log_exp_bound.exp() - gap
    };
    let tol = LEMMA_EPS * tight_bound.abs().max(1.0);
    let pass = slack_tight >= -tol && slack_exponential >= -tol;
    Ok(ExpectationReport {
        beta,
        c_beta,
        gap,
        slack_tight,
        slack_exponential,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_state() -> DiscreteGibbsSystem {
        DiscreteGibbsSystem::from_energies(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn constant_energy_system() {
        let sys = DiscreteGibbsSystem::from_energies(vec![2.5; 4], vec![0.25; 4]).unwrap();
        let q = compute_quantities(&sys, 3.0).unwrap();
        assert!((q.log_z + 3.0 * 2.5).abs() < 1e-12);
        assert_eq!(q.c_beta_tight, 0.0);
        assert!((q.mean_energy - 2.5).abs() < 1e-12);
        assert_eq!(deviation_probability(&sys, 3.0, 0.5).unwrap(), 0.0);
        let r = verify_expectation_lemma(&sys, 3.0, 0.0).unwrap();
        assert!(r.pass);
        assert!(r.gap.abs() < 1e-12);
    }

    #[test]
    fn two_state_enumeration() {
        let sys = two_state();
        let q = compute_quantities(&sys, 1.0).unwrap();
        let expect = ((1.0 + (-1.0f64).exp()) / 2.0).ln();
        assert!((q.log_z - expect).abs() < 1e-14);
        let p = deviation_probability(&sys, 1.0, 0.5).unwrap();
        let e1 = (-1.0f64).exp();
        assert!((p - e1 / (1.0 + e1)).abs() < 1e-14);
        // δ beyond the energy range has zero mass.
        assert_eq!(deviation_probability(&sys, 1.0, 5.0).unwrap(), 0.0);
    }

    #[test]
    fn large_beta_concentrates_on_minimizer() {
        let sys =
            DiscreteGibbsSystem::from_energies(vec![-1.0, 0.3, 2.0], vec![0.2, 0.5, 0.3]).unwrap();
        let q = compute_quantities(&sys, 1e3).unwrap();
        assert!((q.mean_energy - q.inf_energy).abs() < 1e-9);
        // No overflow at very large beta.
        let q6 = compute_quantities(&sys, 1e6).unwrap();
        assert!(q6.log_z.is_finite());
        assert!(q6.c_beta_tight >= 0.0);
    }

    #[test]
    fn infinite_energy_states_carry_no_mass() {
        let sys =
            DiscreteGibbsSystem::from_energies(vec![0.0, f64::INFINITY, 1.0], vec![0.4, 0.3, 0.3])
                .unwrap();
        let probs = state_probabilities(&sys, 2.0).unwrap();
        assert_eq!(probs[1], 0.0);
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_systems_rejected() {
        assert!(DiscreteGibbsSystem::from_energies(vec![], vec![]).is_err());
        assert!(DiscreteGibbsSystem::from_energies(vec![0.0], vec![0.5]).is_err());
        assert!(DiscreteGibbsSystem::from_energies(vec![0.0, 1.0], vec![1.5, -0.5]).is_err());
        assert!(DiscreteGibbsSystem::from_energies(
            vec![f64::INFINITY, f64::INFINITY],
            vec![0.5, 0.5]
        )
        .is_err());
        let sys = two_state();
        assert!(compute_quantities(&sys, 0.0).is_err());
        assert!(deviation_probability(&sys, 1.0, 0.0).is_err());
        // An inadmissible constant violates the hypothesis of the lemma.
        assert!(verify_concentration_lemma(&sys, 1.0, 0.0, &[0.5]).is_err());
    }

    #[test]
    fn concentration_bound_at_trivial_delta() {
        // δ = C_β/β makes the bound exactly one, which any probability passes.
        let sys = two_state();
        let q = compute_quantities(&sys, 2.0).unwrap();
        let delta = q.c_beta_tight / 2.0;
        let r = verify_concentration_lemma(&sys, 2.0, q.c_beta_tight, &[delta]).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn random_sweep_both_lemmas() {
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        for _ in 0..200 {
            let m = 1 + (rng.random::<u64>() % 20) as usize;
            let energies: Vec<f64> = (0..m).map(|_| (rng.random::<f64>() - 0.3) * 10.0).collect();
            let raw: Vec<f64> = (0..m).map(|_| rng.random::<f64>() + 1e-3).collect();
            let total: f64 = raw.iter().sum();
            let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
            let sys = DiscreteGibbsSystem::from_energies(energies, weights).unwrap();
            let beta = 0.1 * (1000.0f64).powf(rng.random::<f64>());
            let q = compute_quantities(&sys, beta).unwrap();
            let range = sys
                .energies()
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max)
                - q.inf_energy;
            let deltas: Vec<f64> = (1..=8)
                .map(|k| (range.max(1e-3)) * k as f64 / 4.0)
                .collect();
            let r = verify_concentration_lemma(&sys, beta, q.c_beta_tight, &deltas).unwrap();
            assert!(r.pass, "violations at beta {beta}");
            let e = verify_expectation_lemma(&sys, beta, q.c_beta_tight).unwrap();
            assert!(e.pass);
        }
    }

    #[test]
    fn log_z_is_convex_in_beta() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let energies: Vec<f64> = (0..12).map(|_| rng.random::<f64>() * 4.0 - 1.0).collect();
        let sys = DiscreteGibbsSystem::uniform_reference(energies).unwrap();
        let betas: Vec<f64> = (1..40).map(|k| 0.1 * k as f64).collect();
        let logz: Vec<f64> = betas
            .iter()
            .map(|b| compute_quantities(&sys, *b).unwrap().log_z)
            .collect();
        for w in logz.windows(3) {
            assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-9);
        }
        // Rough bound: log Z_β ≤ −β inf H.
        for (b, lz) in betas.iter().zip(&logz) {
            assert!(*lz <= -b * sys.inf_energy() + 1e-12);
        }
    }
}
