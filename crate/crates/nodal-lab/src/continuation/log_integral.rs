//! Holomorphic continuation of the logarithmic integral
//! `(Lf)(t) = int_0^{2 pi} f(s) log r^2(s, t) ds` by two independent routes:
//!
//! 1. branch + path correction: `int f(s) L(s, t) ds +- 2 pi i int_0^t f`,
//!    the path running along the real axis to Re t and then vertically,
//!    with the sign chosen by the sign of Im t;
//! 2. mean-subtracted integration by parts:
//!    `-int [q'/(q - q(t)) + q*'/(q* - q*(t))] (F(s) - F(t)) ds
//!     + <f> int log[(q(s)-q(t))(q*(s)-q*(t)) / ((e^{is}-e^{it})(e^{-is}-e^{-it}))] ds`,
//!    where F is the primitive of f - <f> and the last logarithm is
//!    branch-unambiguous.
//!
//! The two values must agree; a discrepancy beyond tolerance aborts with
//! `BranchMismatch` rather than averaging.

use super::branch::sweep_args;
use super::{ContinuationError, ContinuationParams};
use crate::geometry::AnalyticCurve;
use crate::quadrature::{gauss_legendre, graded_panels, panel_nodes};
use num_complex::Complex64;

/// Periodic analytic integrand supplied with its own holomorphic extension
/// (needed on the vertical leg of the path correction).
pub trait AnalyticFn {
    fn at_complex(&self, t: Complex64) -> Complex64;
    fn at_real(&self, s: f64) -> Complex64 {
        self.at_complex(Complex64::new(s, 0.0))
    }
    /// Largest relevant Fourier index, used to size analysis grids.
    fn bandwidth(&self) -> usize;
}

/// Trigonometric polynomial sum c_k e^{ikt} with complex coefficients.
#[derive(Debug, Clone)]
pub struct TrigPolynomial {
    coeffs: Vec<Complex64>,
    k_max: i64,
}

impl TrigPolynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        assert!(coeffs.len() % 2 == 1);
        let k_max = (coeffs.len() / 2) as i64;
        TrigPolynomial { coeffs, k_max }
    }

    pub fn coefficient(&self, k: i64) -> Complex64 {
        if k.abs() > self.k_max {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.k_max) as usize]
        }
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        let ep = (Complex64::i() * t).exp();
        let em = Complex64::new(1.0, 0.0) / ep;
        let mut pos = Complex64::new(0.0, 0.0);
        let mut neg = Complex64::new(0.0, 0.0);
        for k in (1..=self.k_max).rev() {
            pos = (pos + self.coefficient(k)) * ep;
            neg = (neg + self.coefficient(-k)) * em;
        }
        pos + neg + self.coefficient(0)
    }

    /// Primitive of self - mean, holomorphic and single-valued on the
    /// annulus, normalized to F(0) = 0.
    pub fn primitive_of_fluctuation(&self) -> TrigPolynomial {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.coeffs.len()];
        let mut at_zero = Complex64::new(0.0, 0.0);
        for k in -self.k_max..=self.k_max {
            if k != 0 {
                let c = self.coefficient(k) / Complex64::new(0.0, k as f64);
                coeffs[(k + self.k_max) as usize] = c;
                at_zero += c;
            }
        }
        coeffs[self.k_max as usize] = -at_zero;
        TrigPolynomial::new(coeffs)
    }

    pub fn mean(&self) -> Complex64 {
        self.coefficient(0)
    }
}

impl AnalyticFn for TrigPolynomial {
    fn at_complex(&self, t: Complex64) -> Complex64 {
        self.eval(t)
    }
    fn bandwidth(&self) -> usize {
        self.k_max as usize
    }
}

impl AnalyticFn for crate::modes::Trace {
    fn at_complex(&self, t: Complex64) -> Complex64 {
        self.eval_complex(t)
    }
    fn bandwidth(&self) -> usize {
        self.k_max() as usize
    }
}

/// Both continuation values with their discrepancy.
#[derive(Debug, Clone, Copy)]
pub struct LogIntegralValue {
    pub main: Complex64,
    pub alternative: Complex64,
    pub discrepancy: f64,
}

impl LogIntegralValue {
    pub fn value(&self) -> Complex64 {
        self.main
    }
}

fn mesh_for(
    x0: f64,
    im_t: f64,
    bandwidth: usize,
    params: &ContinuationParams,
) -> Vec<crate::quadrature::Panel> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let max_w = (params.osc_budget / (bandwidth.max(1) as f64 + 2.0)).min(0.45);
    let min_w = params.min_panel.min((im_t.abs() / 4.0).max(1e-6));
    graded_panels(0.0, two_pi, x0, min_w, max_w)
}

/// Continuation of `int_0^{2 pi} f(s) log r^2(s, t) ds` by both formulas.
///
/// Requires Re t strictly inside (0, 2 pi) (the slit convention) and the
/// analyticity tube of the curve to contain t.
pub fn log_integral(
    curve: &AnalyticCurve,
    f: &dyn AnalyticFn,
    t: Complex64,
    params: &ContinuationParams,
) -> Result<LogIntegralValue, ContinuationError> {
    let two_pi = 2.0 * std::f64::consts::PI;
    if !(t.re > 0.0 && t.re < two_pi) {
        return Err(ContinuationError::BadGrid(format!(
            "Re t = {} must lie strictly inside (0, 2 pi)",
            t.re
        )));
    }
    if t.im.abs() >= curve.margin() {
        return Err(ContinuationError::BranchUnsafe(format!(
            "|Im t| = {} outside the analyticity margin {}",
            t.im.abs(),
            curve.margin()
        )));
    }
    if t.im == 0.0 {
        // real restriction: direct quadrature of f log |q(s) - q(t)|^2,
        // the log singularity absorbed by the graded mesh
        let panels = graded_panels(0.0, two_pi, t.re, 1e-12, 0.2);
        let q_t = curve.q(t);
        let qs_t = curve.qstar(t);
        let value =
            crate::quadrature::integrate_panels(&panels, params.panel_order, |s| {
                let sc = Complex64::new(s, 0.0);
                let r2 = ((curve.q(sc) - q_t) * (curve.qstar(sc) - qs_t)).norm();
                f.at_real(s) * r2.max(1e-300).ln()
            });
        return Ok(LogIntegralValue {
            main: value,
            alternative: value,
            discrepancy: 0.0,
        });
    }
    let main = main_formula(curve, f, t, params)?;
    let alternative = alternative_formula(curve, f, t, params)?;
    let scale = main.norm().max(alternative.norm()).max(1.0);
    let discrepancy = (main - alternative).norm() / scale;
    if discrepancy > 1e-8 {
        return Err(ContinuationError::BranchMismatch {
            main,
            alt: alternative,
            diff: discrepancy,
        });
    }
    Ok(LogIntegralValue {
        main,
        alternative,
        discrepancy,
    })
}

/// Branch + path-correction route.
fn main_formula(
    curve: &AnalyticCurve,
    f: &dyn AnalyticFn,
    t: Complex64,
    params: &ContinuationParams,
) -> Result<Complex64, ContinuationError> {
    let x0 = t.re;
    let panels = mesh_for(x0, t.im, f.bandwidth(), params);
    let nodes = panel_nodes(&panels, params.panel_order);

    // int f L: tracked branch at the mesh nodes, swept from the anchor 2 pi
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| nodes[b].0.partial_cmp(&nodes[a].0).unwrap());
    let mut desc_s: Vec<f64> = Vec::with_capacity(nodes.len() + 1);
    desc_s.push(2.0 * std::f64::consts::PI);
    for &i in &order {
        desc_s.push(nodes[i].0);
    }
    let rsq: Vec<Complex64> = desc_s
        .iter()
        .map(|&s| curve.r_squared_raw(Complex64::new(s, 0.0), t))
        .collect();
    let (args, _) = sweep_args(curve, t, &desc_s, &rsq)?;
    let mut log_term = Complex64::new(0.0, 0.0);
    for (rank, &i) in order.iter().enumerate() {
        let l = Complex64::new(rsq[rank + 1].norm().ln(), args[rank + 1]);
        log_term += nodes[i].1 * f.at_real(nodes[i].0) * l;
    }

    // path correction +- 2 pi i int_0^t f, real leg then vertical leg
    let sgn = if t.im >= 0.0 { 1.0 } else { -1.0 };
    let real_leg_panels = graded_panels(
        0.0,
        x0,
        x0,
        params.min_panel.max(1e-6),
        (params.osc_budget / (f.bandwidth().max(1) as f64 + 2.0)).min(0.45),
    );
    let real_leg = crate::quadrature::integrate_panels(&real_leg_panels, params.panel_order, |s| {
        f.at_real(s)
    });
    let vertical = vertical_leg(f, x0, t.im, params);
    let correction = sgn
        * 2.0
        * std::f64::consts::PI
        * Complex64::i()
        * (real_leg + Complex64::i() * vertical);
    Ok(log_term + correction)
}

fn vertical_leg(f: &dyn AnalyticFn, x0: f64, xi: f64, params: &ContinuationParams) -> Complex64 {
    if xi == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let n = (2.0 * (f.bandwidth() as f64) * xi.abs()).ceil() as usize + 16;
    let rule = gauss_legendre(n.min(96).max(params.panel_order));
    let half = xi / 2.0;
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in rule.0.iter().zip(&rule.1) {
        let sigma = half + half * x;
        acc += *w * f.at_complex(Complex64::new(x0, sigma));
    }
    acc * half
}

/// Mean-subtracted integration-by-parts route.
fn alternative_formula(
    curve: &AnalyticCurve,
    f: &dyn AnalyticFn,
    t: Complex64,
    params: &ContinuationParams,
) -> Result<Complex64, ContinuationError> {
    // Fourier analysis of f on a grid oversampling its bandwidth
    let k_max = f.bandwidth().max(4) as i64;
    let n = (4 * (k_max as usize + 1)).next_power_of_two();
    let samples: Vec<Complex64> = (0..n)
        .map(|j| f.at_real(2.0 * std::f64::consts::PI * j as f64 / n as f64))
        .collect();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); (2 * k_max + 1) as usize];
    for k in -k_max..=k_max {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &u) in samples.iter().enumerate() {
            let phase = -2.0 * std::f64::consts::PI * (k as f64) * (j as f64) / n as f64;
            acc += u * Complex64::new(phase.cos(), phase.sin());
        }
        coeffs[(k + k_max) as usize] = acc / n as f64;
    }
    let poly = TrigPolynomial::new(coeffs);
    let prim = poly.primitive_of_fluctuation();
    let mean = poly.mean();
    let f_t = prim.eval(t);

    let q_t = curve.q(t);
    let qs_t = curve.qstar(t);
    let panels = mesh_for(t.re, t.im, f.bandwidth(), params);

    // -int [q'/(q - q(t)) + q*'/(q* - q*(t))] (F(s) - F(t)) ds
    let cauchy = crate::quadrature::integrate_panels(&panels, params.panel_order, |s| {
        let sc = Complex64::new(s, 0.0);
        let kern = curve.q_prime(sc) / (curve.q(sc) - q_t)
            + curve.qstar_prime(sc) / (curve.qstar(sc) - qs_t);
        kern * (prim.eval(sc) - f_t)
    });

    // <f> int log[(q(s)-q(t))(q*(s)-q*(t)) / ((e^is - e^it)(e^-is - e^-it))] ds
    let ratio_term = if mean.norm() > 0.0 {
        mean * ratio_log_integral(curve, t, params)?
    } else {
        Complex64::new(0.0, 0.0)
    };
    Ok(-cauchy + ratio_term)
}

/// Integral of the branch-unambiguous logarithm of r^2_curve / r^2_circle,
/// tracked continuously in s (total winding zero).
fn ratio_log_integral(
    curve: &AnalyticCurve,
    t: Complex64,
    params: &ContinuationParams,
) -> Result<Complex64, ContinuationError> {
    let panels = mesh_for(t.re, t.im, 8, params);
    let nodes = panel_nodes(&panels, params.panel_order);
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| nodes[b].0.partial_cmp(&nodes[a].0).unwrap());
    let e_it = (Complex64::i() * t).exp();
    let ratio_at = |s: f64| -> Complex64 {
        let sc = Complex64::new(s, 0.0);
        let e_is = Complex64::new(0.0, s).exp();
        let num = (curve.q(sc) - curve.q(t)) * (curve.qstar(sc) - curve.qstar(t));
        let den = (e_is - e_it) * (e_is.inv() - e_it.inv());
        num / den
    };
    let mut values: Vec<Complex64> = Vec::with_capacity(order.len());
    let mut prev = ratio_at(2.0 * std::f64::consts::PI);
    let mut phase = prev.arg();
    let mut prev_s = 2.0 * std::f64::consts::PI;
    for &i in &order {
        let s = nodes[i].0;
        let (dphi, cur) = track_ratio(&ratio_at, prev_s, s, prev, 0)?;
        phase += dphi;
        values.push(Complex64::new(cur.norm().ln(), phase));
        prev = cur;
        prev_s = s;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (rank, &i) in order.iter().enumerate() {
        acc += nodes[i].1 * values[rank];
    }
    Ok(acc)
}

fn track_ratio(
    f: &dyn Fn(f64) -> Complex64,
    s_hi: f64,
    s_lo: f64,
    v_hi: Complex64,
    depth: usize,
) -> Result<(f64, Complex64), ContinuationError> {
    let v_lo = f(s_lo);
    let step = (v_lo / v_hi).arg();
    if step.abs() < std::f64::consts::FRAC_PI_2 {
        return Ok((step, v_lo));
    }
    if depth > 48 || (s_hi - s_lo).abs() < 1e-13 {
        return Err(ContinuationError::UnwrapAmbiguity {
            s: s_lo,
            width: (s_hi - s_lo).abs(),
            jump: step.abs(),
        });
    }
    let mid = 0.5 * (s_hi + s_lo);
    let (d1, v_mid) = track_ratio(f, s_hi, mid, v_hi, depth + 1)?;
    let (d2, v_lo) = track_ratio(f, mid, s_lo, v_mid, depth + 1)?;
    Ok((d1 + d2, v_lo))
}
