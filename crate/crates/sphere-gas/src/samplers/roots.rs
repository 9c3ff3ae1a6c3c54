//! Aberth–Ehrlich simultaneous root refinement for complex polynomials.
//!
//! Works on coefficient slices `c[0] + c[1] z + … + c[d] z^d` with `c[d] ≠ 0`.
//! Callers are expected to scale coefficients so the largest modulus is about
//! one; root locations are invariant under global coefficient scaling.

use crate::error::{Error, Result};
use num_complex::Complex64;

const MAX_ITERS: usize = 400;
const CORRECTION_TOL: f64 = 1e-13;

/// All `d` roots of the degree-`d` polynomial with the given coefficients,
/// low order first. Exact zero trailing coefficients (roots at the origin)
/// are deflated; a zero leading coefficient is the caller's bug.
pub fn aberth_ehrlich(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let degree = coeffs.len().saturating_sub(1);
    if degree == 0 {
        return Ok(Vec::new());
    }
    if coeffs[degree].norm() == 0.0 {
        return Err(Error::InvalidParameter(
            "leading coefficient must be nonzero".into(),
        ));
    }

    let zeros_at_origin = coeffs
        .iter()
        .take_while(|c| c.norm() == 0.0)
        .count()
        .min(degree);
    let work = &coeffs[zeros_at_origin..];
    let d = work.len() - 1;
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros_at_origin];
    if d == 0 {
        return Ok(roots);
    }
    if d == 1 {
        roots.push(-work[0] / work[1]);
        return Ok(roots);
    }

    let rev: Vec<Complex64> = work.iter().rev().cloned().collect();

    // Start on a circle whose radius is the geometric mean of the root moduli,
    // |c_0 / c_d|^{1/d}, with an angular offset to break symmetry.
    let radius = ((work[0].norm().ln() - work[d].norm().ln()) / d as f64)
        .exp()
        .clamp(1e-6, 1e6);
    let mut z: Vec<Complex64> = (0..d)
        .map(|j| Complex64::from_polar(radius, std::f64::consts::TAU * j as f64 / d as f64 + 0.4))
        .collect();

    for _ in 0..MAX_ITERS {
        let mut max_step = 0.0f64;
        for j in 0..d {
            let w = newton_ratio(work, &rev, z[j]);
            let mut sum = Complex64::new(0.0, 0.0);
            for k in 0..d {
                if k != j {
                    let diff = z[j] - z[k];
                    if diff.norm_sqr() > 0.0 {
                        sum += diff.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - w * sum;
            let step = if denom.norm_sqr() > 1e-60 {
                w / denom
            } else {
                w
            };
            z[j] -= step;
            let rel = step.norm() / (1.0 + z[j].norm());
            if rel > max_step {
                max_step = rel;
            }
        }
        if max_step < CORRECTION_TOL {
            roots.extend(z);
            return Ok(roots);
        }
    }
    Err(Error::RootFinderStalled)
}

/// p(z)/p'(z), evaluated through the reversed polynomial when |z| > 1 so that
/// high powers of z never overflow.
fn newton_ratio(coeffs: &[Complex64], rev: &[Complex64], z: Complex64) -> Complex64 {
    let d = coeffs.len() - 1;
    if z.norm_sqr() <= 1.0 {
        let (p, dp) = horner_with_derivative(coeffs, z);
        if p.norm_sqr() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if dp.norm_sqr() == 0.0 {
            // At an exact critical point, nudge instead of dividing by zero.
            return Complex64::new(1e-12, 1e-12);
        }
        p / dp
    } else {
        // With q(u) = Σ c_{d−k} u^k and u = 1/z: p(z) = z^d q(u) and
        // p(z)/p'(z) = z² q / (d·z·q − q').
        let u = z.inv();
        let (q, dq) = horner_with_derivative(rev, u);
        if q.norm_sqr() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let denom = z * q * d as f64 - dq;
        if denom.norm_sqr() == 0.0 {
            return Complex64::new(1e-12, 1e-12);
        }
        z * z * q / denom
    }
}

fn horner_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Expands `lead`·Π (z − r_i) into coefficients, low order first. Used to
/// validate root sets against the input coefficients (Vieta round trip).
pub fn poly_from_roots(roots: &[Complex64], lead: Complex64) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (k, ck) in c.iter().enumerate() {
            next[k + 1] += *ck;
            next[k] -= *ck * *r;
        }
        c = next;
    }
    for ck in &mut c {
        *ck *= lead;
    }
    c
}
