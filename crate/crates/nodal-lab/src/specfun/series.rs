//! Power-series evaluation of J0, J1, Y0, Y1 and the entire part of the
//! Green's-function split. Harmonic numbers are accumulated incrementally in
//! the working precision; no closed form is substituted.

use super::{SeriesPolicy, SpecfunError, BesselSet, EULER_GAMMA};
use num_complex::Complex64;
use std::f64::consts::FRAC_2_PI;

/// J0(z) = sum_k (-1)^k (z^2/4)^k / (k!)^2, with the largest term magnitude
/// reported for cancellation tracking.
pub(super) fn j0_series(z: Complex64, policy: &SeriesPolicy) -> (Complex64, f64) {
    let q = -z * z / 4.0;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut max_term = 1.0f64;
    for k in 1..=policy.series_terms {
        term *= q / ((k * k) as f64);
        sum += term;
        max_term = max_term.max(term.norm());
        if term.norm() < policy.tail_tolerance * sum.norm().max(1e-300) && k > 4 {
            break;
        }
    }
    (sum, max_term)
}

/// J1(z) = (z/2) sum_k (-1)^k (z^2/4)^k / (k! (k+1)!).
pub(super) fn j1_series(z: Complex64, policy: &SeriesPolicy) -> (Complex64, f64) {
    let (s, max_term) = j1_over_z_series_tracked(z, policy);
    (z * s, max_term * z.norm())
}

/// J1(z)/z as an even entire series; value 1/2 at z = 0.
pub(super) fn j1_over_z_series(z: Complex64, policy: &SeriesPolicy) -> Complex64 {
    j1_over_z_series_tracked(z, policy).0
}

fn j1_over_z_series_tracked(z: Complex64, policy: &SeriesPolicy) -> (Complex64, f64) {
    let q = -z * z / 4.0;
    let mut term = Complex64::new(0.5, 0.0);
    let mut sum = term;
    let mut max_term = 0.5f64;
    for k in 1..=policy.series_terms {
        term *= q / ((k * (k + 1)) as f64);
        sum += term;
        max_term = max_term.max(term.norm());
        if term.norm() < policy.tail_tolerance * sum.norm().max(1e-300) && k > 4 {
            break;
        }
    }
    (sum, max_term)
}

/// V(z) = sum_{m>=1} (-1)^m H_m (z/2)^{2m} / (m!)^2 with H_m the m-th
/// harmonic number. The entire part of -Y^(0) is -log(lambda) J0 + V.
pub(super) fn v_entire_series(z: Complex64, policy: &SeriesPolicy) -> (Complex64, f64) {
    let q = -z * z / 4.0;
    let mut pow = Complex64::new(1.0, 0.0); // (-1)^m (z/2)^{2m} / (m!)^2
    let mut h = 0.0f64;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut max_term = 0.0f64;
    for m in 1..=policy.series_terms {
        pow *= q / ((m * m) as f64);
        h += 1.0 / m as f64;
        let term = h * pow;
        sum += term;
        max_term = max_term.max(term.norm());
        if term.norm() < policy.tail_tolerance * sum.norm().max(1e-300) && m > 4 {
            break;
        }
    }
    (sum, max_term)
}

/// z V'(z) = sum_{m>=1} (-1)^m H_m 2m (z/2)^{2m} / (m!)^2.
pub(super) fn zvprime_series(z: Complex64, policy: &SeriesPolicy) -> Complex64 {
    let q = -z * z / 4.0;
    let mut pow = Complex64::new(1.0, 0.0);
    let mut h = 0.0f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for m in 1..=policy.series_terms {
        pow *= q / ((m * m) as f64);
        h += 1.0 / m as f64;
        let term = (2 * m) as f64 * h * pow;
        sum += term;
        if term.norm() < policy.tail_tolerance * sum.norm().max(1e-300) && m > 4 {
            break;
        }
    }
    sum
}

/// Full set {J0, J1, Y0, Y1} by power series, principal branch of log z.
///
/// Y0(z) = (2/pi) [(log(z/2)+gamma) J0(z) - V(z)]
/// Y1(z) = (2/pi) (log(z/2)+gamma) J1(z) - 2/(pi z)
///         - (1/pi) sum_{k>=0} (-1)^k (H_k + H_{k+1}) (z/2)^{2k+1} / (k!(k+1)!)
pub(super) fn bessel_set_series(
    z: Complex64,
    policy: &SeriesPolicy,
) -> Result<BesselSet, SpecfunError> {
    if super::on_negative_axis(z) {
        return Err(SpecfunError::BranchCut { z });
    }
    let (j0, j0_max) = j0_series(z, policy);
    let (j1, _) = j1_series(z, policy);
    let log_half = (z / 2.0).ln() + EULER_GAMMA;
    let (v, _) = v_entire_series(z, policy);
    let y0 = FRAC_2_PI * (log_half * j0 - v);
    super::precision_guard(z, j0, j0_max)?;

    // Harmonic-pair series for Y1.
    let q = -z * z / 4.0;
    let half_z = z / 2.0;
    let mut pow = half_z; // (-1)^k (z/2)^{2k+1} / (k!(k+1)!)
    let mut hk = 0.0f64;
    let mut hk1 = 1.0f64;
    let mut sum = (hk + hk1) * pow;
    for k in 1..=policy.series_terms {
        pow *= q / ((k * (k + 1)) as f64);
        hk += 1.0 / k as f64;
        hk1 += 1.0 / (k + 1) as f64;
        let term = (hk + hk1) * pow;
        sum += term;
        if term.norm() < policy.tail_tolerance * sum.norm().max(1e-300) && k > 4 {
            break;
        }
    }
    let y1 = FRAC_2_PI * log_half * j1 - FRAC_2_PI / z - sum / std::f64::consts::PI;
    Ok(BesselSet { j0, j1, y0, y1 })
}
