//! Continuation of an eigenfunction to the complexification of a strictly
//! interior curve, by complexifying the layer-potential representation over
//! the boundary: the double layer with the outgoing kernel for Neumann
//! data, the single layer for Dirichlet data. The distance factor keeps a
//! positive real part of r^2 throughout, so the principal square root is a
//! global branch and the integrand stays single-valued.

use super::{ContinuationError, ContinuationParams, ContinuationResult};
use crate::geometry::AnalyticCurve;
use crate::modes::{BoundaryCondition, EigenMode};
use crate::specfun::{bessel_set, SeriesPolicy};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Minimum squared distance between the interior curve and the boundary,
/// sampled; the positivity floor C_0 of the branch condition.
pub(crate) fn squared_distance_floor(boundary: &AnalyticCurve, interior: &AnalyticCurve) -> f64 {
    let n = 256;
    let mut min = f64::INFINITY;
    for i in 0..n {
        let s = 2.0 * PI * i as f64 / n as f64;
        let qb = boundary.q(Complex64::new(s, 0.0));
        for j in 0..n {
            let x = 2.0 * PI * j as f64 / n as f64;
            let qc = interior.q(Complex64::new(x, 0.0));
            let d = (qb - qc).norm_sqr();
            if d < min {
                min = d;
            }
        }
    }
    min
}

fn hankel_pair(
    z: Complex64,
    policy: &SeriesPolicy,
) -> Result<(Complex64, Complex64), ContinuationError> {
    // H0, H1 of the first kind; both needed only once per node
    let s = bessel_set(z, policy)?;
    Ok((s.hankel1_0(), s.hankel1_1()))
}

/// phi^C(q_C^C(t)): the eigenfunction continued to the complexified
/// interior curve at parameter t.
///
/// Neumann: (lambda/8) oint H1(lambda r) r [q'/(q - z) - conj(q)'/(conj(q) - z*)] u ds
/// Dirichlet: -(i/4) oint H0(lambda r) u |q'| ds
///
/// with z = q_C^C(t), z* = q_C^*(t) and r the principal square root of
/// (q(s) - z)(conj(q(s)) - z*). The trapezoid node count doubles until the
/// value settles to `params.interior_target` relative.
pub fn continue_interior(
    mode: &EigenMode,
    boundary: &AnalyticCurve,
    interior: &AnalyticCurve,
    t: Complex64,
    params: &ContinuationParams,
) -> Result<ContinuationResult, ContinuationError> {
    let c0 = squared_distance_floor(boundary, interior);
    if !(c0 > 0.0) {
        return Err(ContinuationError::BranchUnsafe(
            "interior curve touches the boundary".into(),
        ));
    }
    let z = interior.eval_q(t)?;
    let zs = interior.eval_qstar(t)?;
    // |Im q_C^C(t)|^2 < C_0 (the complexified point stays within the
    // branch-safe tube)
    let im_point = (z - zs.conj()) / 2.0;
    let imsq = im_point.norm_sqr();
    if imsq >= c0 {
        return Err(ContinuationError::BranchUnsafe(format!(
            "|Im q^C(t)|^2 = {imsq:.3e} reaches the distance floor C0 = {c0:.3e}"
        )));
    }
    let lambda = mode.lambda;
    let policy = &params.policy;

    let integrand = |s: f64| -> Result<Complex64, ContinuationError> {
        let sc = Complex64::new(s, 0.0);
        let q = boundary.q(sc);
        let qp = boundary.q_prime(sc);
        let dq = q - z;
        let dqs = q.conj() - zs;
        let rsq = dq * dqs;
        if rsq.re <= 0.0 {
            return Err(ContinuationError::BranchUnsafe(format!(
                "Re r^2 = {:.3e} <= 0 at s = {s}",
                rsq.re
            )));
        }
        let r = rsq.sqrt();
        let u = mode.trace.eval_real(s);
        match mode.bc {
            BoundaryCondition::Neumann => {
                let (_, h1) = hankel_pair(lambda * r, policy)?;
                Ok((lambda / 8.0)
                    * h1
                    * r
                    * (qp / dq - qp.conj() / dqs)
                    * u)
            }
            BoundaryCondition::Dirichlet => {
                let (h0, _) = hankel_pair(lambda * r, policy)?;
                Ok(-Complex64::new(0.0, 0.25) * h0 * u * qp.norm())
            }
        }
    };

    let mut n = ((8.0 * lambda).ceil() as usize).max(64);
    let eval_n = |n: usize| -> Result<Complex64, ContinuationError> {
        let h = 2.0 * PI / n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            acc += integrand(j as f64 * h)?;
        }
        Ok(acc * h)
    };
    let mut value = eval_n(n)?;
    let mut points = n;
    for round in 0..=params.volterra_rounds {
        n *= 2;
        let refined = eval_n(n)?;
        points += n;
        let residual = (refined - value).norm() / refined.norm().max(1e-300);
        value = refined;
        if residual <= params.interior_target {
            return Ok(ContinuationResult {
                value,
                quadrature_points: points,
                residual,
                branch_audit: 0,
                flagged: false,
            });
        }
        if round == params.volterra_rounds {
            return Err(ContinuationError::QuadratureStalled {
                rounds: round + 1,
                last: residual,
            });
        }
    }
    unreachable!()
}
