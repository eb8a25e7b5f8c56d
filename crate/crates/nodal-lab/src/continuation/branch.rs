//! The branch L(s, t) of log r^2(s, t): continuous in s away from the slit,
//! anchored at the principal value far from Re t, tracked by phase
//! unwrapping with adaptive midpoint insertion.
//!
//! With the slit at parameter 0, Im L tends to 0 as Im t -> 0 for
//! s > Re t and to -+2 pi (sign of Im t) for s < Re t.

use super::ContinuationError;
use crate::geometry::AnalyticCurve;
use num_complex::Complex64;

/// One branch value L(s, t) with exp(L) = r^2(s, t).
#[derive(Debug, Clone, Copy)]
pub struct LogBranch {
    pub s: f64,
    pub t: Complex64,
    pub value: Complex64,
}

const MAX_INSERT_DEPTH: usize = 48;
/// A single tracking step may rotate the phase by at most this much.
const STEP_LIMIT: f64 = std::f64::consts::FRAC_PI_2;

/// Tracked phases of r^2(s, t) at the given nodes.
///
/// `nodes` must be strictly decreasing; the first node is the anchor, where
/// the phase is taken principal (callers put the anchor at the point of the
/// parameter circle farthest from Re t, where r^2 is close to the positive
/// real axis). Returns the unwrapped args and the number of adaptive
/// insertions (the branch audit).
pub(super) fn sweep_args(
    curve: &AnalyticCurve,
    t: Complex64,
    nodes: &[f64],
    rsq: &[Complex64],
) -> Result<(Vec<f64>, usize), ContinuationError> {
    debug_assert_eq!(nodes.len(), rsq.len());
    let mut args = Vec::with_capacity(nodes.len());
    let mut audit = 0usize;
    if nodes.is_empty() {
        return Ok((args, audit));
    }
    let mut phase = rsq[0].arg();
    args.push(phase);
    for i in 1..nodes.len() {
        let dphi = delta_arg(
            curve,
            t,
            nodes[i - 1],
            nodes[i],
            rsq[i - 1],
            rsq[i],
            0,
            &mut audit,
        )?;
        phase += dphi;
        args.push(phase);
    }
    Ok((args, audit))
}

/// Phase increment of r^2 from s_hi to s_lo, bisecting until each step
/// rotates by less than pi/2.
#[allow(clippy::too_many_arguments)]
fn delta_arg(
    curve: &AnalyticCurve,
    t: Complex64,
    s_hi: f64,
    s_lo: f64,
    r_hi: Complex64,
    r_lo: Complex64,
    depth: usize,
    audit: &mut usize,
) -> Result<f64, ContinuationError> {
    let ratio = r_lo / r_hi;
    let step = ratio.arg();
    if step.abs() < STEP_LIMIT && ratio.norm() > 0.0 && ratio.is_finite() {
        return Ok(step);
    }
    if depth >= MAX_INSERT_DEPTH || (s_hi - s_lo).abs() < 1e-13 {
        return Err(ContinuationError::UnwrapAmbiguity {
            s: s_lo,
            width: (s_hi - s_lo).abs(),
            jump: step.abs(),
        });
    }
    *audit += 1;
    let mid = 0.5 * (s_hi + s_lo);
    let r_mid = curve.r_squared_raw(Complex64::new(mid, 0.0), t);
    let a = delta_arg(curve, t, s_hi, mid, r_hi, r_mid, depth + 1, audit)?;
    let b = delta_arg(curve, t, mid, s_lo, r_mid, r_lo, depth + 1, audit)?;
    Ok(a + b)
}

/// L(s, t) with the slit at parameter 0: tracked along s downward from the
/// anchor s = 2 pi. Requires Re t in the open interval (0, 2 pi) and
/// (s, t) away from the real coincidence point.
pub fn log_branch(
    curve: &AnalyticCurve,
    s: f64,
    t: Complex64,
) -> Result<LogBranch, ContinuationError> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let x0 = t.re;
    if !(x0 > 0.0 && x0 < two_pi) {
        return Err(ContinuationError::BadGrid(format!(
            "Re t = {x0} must lie strictly inside (0, 2 pi) for the slit at 0"
        )));
    }
    if t.im == 0.0 && (s - x0).abs() < 1e-12 {
        return Err(ContinuationError::BranchUnsafe(format!(
            "coincidence point s = Re t = {s} on the real axis"
        )));
    }
    // node ladder from 2 pi down to s, denser near Re t
    let mut nodes: Vec<f64> = Vec::new();
    let coarse = 64;
    for j in 0..=coarse {
        let v = two_pi - (two_pi - s) * j as f64 / coarse as f64;
        nodes.push(v);
    }
    // extra nodes geometrically close to the swing at Re t
    if s < x0 {
        let mut d = (two_pi - x0).min(x0 - s).min(0.5);
        while d > 1e-6 {
            nodes.push(x0 + d);
            nodes.push(x0 - d);
            d /= 2.0;
        }
    }
    nodes.retain(|v| *v >= s - 1e-15 && *v <= two_pi + 1e-15);
    nodes.sort_by(|a, b| b.partial_cmp(a).unwrap());
    nodes.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    if (nodes.last().copied().unwrap_or(f64::NAN) - s).abs() > 1e-12 {
        nodes.push(s);
    }
    let rsq: Vec<Complex64> = nodes
        .iter()
        .map(|&v| curve.r_squared_raw(Complex64::new(v, 0.0), t))
        .collect();
    let (args, _) = sweep_args(curve, t, &nodes, &rsq)?;
    let last = *args.last().expect("nonempty ladder");
    let mag = rsq.last().unwrap().norm();
    Ok(LogBranch {
        s,
        t,
        value: Complex64::new(mag.ln(), last),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn branch_limits_on_the_circle() {
        let circle = AnalyticCurve::circle(1.0);
        let x0 = 2.0;
        // s > Re t: Im L -> 0 as Im t -> 0+
        for &xi in &[1e-3, 1e-5] {
            let t = Complex64::new(x0, xi);
            let right = log_branch(&circle, 4.0, t).unwrap();
            assert!(right.value.im.abs() < 20.0 * xi, "right side {}", right.value.im);
            // s < Re t: Im L -> -2 pi as Im t -> 0+
            let left = log_branch(&circle, 0.7, t).unwrap();
            assert!(
                (left.value.im + 2.0 * PI).abs() < 40.0 * xi,
                "left side {}",
                left.value.im
            );
            // and +2 pi from below
            let below = log_branch(&circle, 0.7, t.conj()).unwrap();
            assert!((below.value.im - 2.0 * PI).abs() < 40.0 * xi);
        }
    }

    #[test]
    fn branch_exponentiates_to_rsq() {
        let curve = AnalyticCurve::ellipse(0.7).unwrap();
        for i in 0..16 {
            for j in 0..4 {
                let s = (2.0 * PI) * (i as f64 + 0.5) / 16.0;
                let t = Complex64::new(2.3, -0.12 + 0.08 * j as f64);
                if t.im == 0.0 && (s - t.re).abs() < 0.2 {
                    continue;
                }
                let lb = log_branch(&curve, s, t).unwrap();
                let rsq = curve.r_squared_raw(Complex64::new(s, 0.0), t);
                assert!(
                    (lb.value.exp() - rsq).norm() <= 1e-10 * rsq.norm().max(1e-12),
                    "exp(L) != r^2 at s={s}"
                );
            }
        }
    }

    #[test]
    fn branch_integral_identity_on_circle() {
        // int_0^{2 pi} L(s, t) ds = -2 pi i t for Im t > 0 (slit at 0)
        let circle = AnalyticCurve::circle(1.0);
        let t = Complex64::new(2.4, 0.2);
        let n = 4096;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let s = 2.0 * PI * (j as f64 + 0.5) / n as f64;
            acc += log_branch(&circle, s, t).unwrap().value;
        }
        acc *= 2.0 * PI / n as f64;
        let expect = -2.0 * PI * Complex64::i() * t;
        // midpoint rule only: the panel-based integration is checked to
        // 1e-8 by the acceptance suite
        assert!((acc - expect).norm() < 1e-4, "integral {acc} vs {expect}");
    }
}
