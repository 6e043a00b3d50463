//! Closed-form purities for Gaussian in-states and the constant-amplitude
//! approximations.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kinematics::MassPartition;

/// Tolerance on `|t|^2 + |r|^2 = 1` accepted by [`approx_cr`].
pub const UNITARITY_TOL: f64 = 1e-10;

fn check_sigmas(sigma1: f64, sigma2: f64) -> Result<()> {
    for (name, v) in [("sigma1", sigma1), ("sigma2", sigma2)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::invalid(name, format!("must be positive and finite, got {v}")));
        }
    }
    Ok(())
}

/// Purity of the reflected Gaussian in-state `phi_in(reflect(p))`.
///
/// Depends on the widths only through their ratio; equals one for equal
/// masses or when `m1 / sigma1^2 == m2 / sigma2^2`.
pub fn reflected_gaussian_purity(mp: &MassPartition, sigma1: f64, sigma2: f64) -> Result<f64> {
    check_sigmas(sigma1, sigma2)?;
    let (mu1, mu2) = (mp.mu1(), mp.mu2());
    let (s1, s2) = (sigma1 * sigma1, sigma2 * sigma2);
    // 1 / p^2 - 1 = 4 (mu1 - mu2)^2 (mu1 s2 - mu2 s1)^2 / (s1 s2); both
    // ridges zero a factor, so they come out as exactly 1
    let excess = 4.0 * (mu1 - mu2).powi(2) * (mu1 * s2 - mu2 * s1).powi(2) / (s1 * s2);
    Ok(1.0 / (1.0 + excess).sqrt())
}

/// Same quantity in terms of `mu1` and `c = sigma2 / sigma1`.
pub fn reflected_gaussian_purity_ratio(mu1: f64, c: f64) -> Result<f64> {
    if !(mu1 > 0.0 && mu1 < 1.0) {
        return Err(Error::invalid("mu1", format!("must lie in (0, 1), got {mu1}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid("c", format!("must be positive and finite, got {c}")));
    }
    let excess = 4.0 * (2.0 * mu1 - 1.0).powi(2) * (mu1 * c * c - (1.0 - mu1)).powi(2) / (c * c);
    Ok(1.0 / (1.0 + excess).sqrt())
}

/// Whether `m1 / sigma1^2` and `m2 / sigma2^2` agree to relative tolerance
/// `tol`.
pub fn schulman_satisfied(mp: &MassPartition, sigma1: f64, sigma2: f64, tol: f64) -> Result<bool> {
    check_sigmas(sigma1, sigma2)?;
    let x1 = mp.m1() / (sigma1 * sigma1);
    let x2 = mp.m2() / (sigma2 * sigma2);
    Ok((x1 - x2).abs() <= tol * 0.5 * (x1 + x2))
}

/// Coarse approximation: `T^2 + R^2`.
pub fn approx_c(transmission: f64, reflection: f64) -> Result<f64> {
    let ok = |v: f64| (-UNITARITY_TOL..=1.0 + UNITARITY_TOL).contains(&v);
    if !ok(transmission) || !ok(reflection) || (transmission + reflection - 1.0).abs() > UNITARITY_TOL {
        return Err(Error::NonUnitary(transmission + reflection - 1.0));
    }
    Ok(transmission * transmission + reflection * reflection)
}

/// Constant amplitudes plus reflection distortion:
/// `|t|^4 + |r|^4 * reflected_purity`.
pub fn approx_cr(t: Complex64, r: Complex64, reflected_purity: f64) -> Result<f64> {
    let (tt, rr) = (t.norm_sqr(), r.norm_sqr());
    if (tt + rr - 1.0).abs() > UNITARITY_TOL {
        return Err(Error::NonUnitary(tt + rr - 1.0));
    }
    if !(reflected_purity > 0.0 && reflected_purity <= 1.0) {
        return Err(Error::invalid("reflected_purity", format!("must lie in (0, 1], got {reflected_purity}")));
    }
    Ok(tt * tt + rr * rr * reflected_purity)
}
