//! Boundary self-continuation: the holomorphic extension of the trace of an
//! eigenmode along its own curve, assembled from the jump formula
//!
//!   u(t) = -(1/2pi) int u dA/dn log r^2 ds
//!          - (1/pi) int u A dlog(r)/dn ds + (1/pi) int u dB/dn ds
//!
//! with A = J0(lambda r), B the entire part of the Green's-function split,
//! and d/dn the (non-unit, interior) normal derivative in the source
//! parameter for Neumann data, in the field parameter for Dirichlet data
//! (with the jump sign flipped). The logarithmic term continues through the
//! tracked branch L(s, t) plus the path correction +-2 pi i int_0^t, whose
//! real leg joins the right-hand side and whose vertical leg is the
//! Volterra obstruction: the kernel is entire because r J1(lambda r)
//! vanishes to second order at the coincidence point, and the system is
//! solved by product-trapezoid forward substitution with node doubling.
//!
//! The slit of the branch construction is placed at Re t - pi, so the
//! anchor of the phase tracking sits at the parameter point farthest from
//! the singularity; periodicity of the result (checked by the tests) is the
//! slit-independence witness.

use super::{ContinuationError, ContinuationParams, ContinuationResult};
use crate::geometry::AnalyticCurve;
use crate::modes::{BoundaryCondition, EigenMode};
use crate::quadrature::{graded_panels, panel_nodes};
use crate::specfun::green_kernels;
use num_complex::Complex64;
use std::f64::consts::PI;

/// A real-leg quadrature node with its cached curve and trace data.
struct SNode {
    s: f64,
    w: f64,
    q: Complex64,
    qp: Complex64,
    qs: Complex64,
    qsp: Complex64,
    u: Complex64,
    /// s < x0, i.e. on the path leg of the correction integral
    left: bool,
}

struct ColumnCache {
    x0: f64,
    nodes: Vec<SNode>,
    /// indices of nodes sorted by decreasing s (anchor first implicit)
    desc: Vec<usize>,
    anchor: f64,
}

/// A vertical-leg point with curve data (for the Volterra kernel).
#[derive(Clone, Copy)]
struct VNode {
    q: Complex64,
    qp: Complex64,
    qs: Complex64,
    qsp: Complex64,
}

#[derive(Debug, Clone, Copy)]
struct Diag {
    quadrature_points: usize,
    residual: f64,
    branch_audit: usize,
    flagged: bool,
}

/// Continuation engine bound to one (curve, mode) pair. Evaluations along a
/// vertical parameter segment share all curve caches and the forward
/// substitution, so a column of values costs about as much as its top point.
pub struct ContinuationEngine<'a> {
    pub curve: &'a AnalyticCurve,
    pub mode: &'a EigenMode,
    pub params: ContinuationParams,
}

impl<'a> ContinuationEngine<'a> {
    pub fn new(curve: &'a AnalyticCurve, mode: &'a EigenMode, params: ContinuationParams) -> Self {
        ContinuationEngine {
            curve,
            mode,
            params,
        }
    }

    fn jump_sign(&self) -> f64 {
        match self.mode.bc {
            BoundaryCondition::Neumann => 1.0,
            BoundaryCondition::Dirichlet => -1.0,
        }
    }

    /// Quadrature mesh and cached node data for the column through x0,
    /// slit at x0 - pi. `finest_sigma` is the smallest nonzero |Im t| the
    /// mesh must resolve.
    fn build_cache(&self, x0: f64, slit_offset: f64, finest_sigma: f64) -> ColumnCache {
        let a = x0 + slit_offset;
        let lambda = self.mode.lambda;
        let max_w = (self.params.osc_budget / lambda.max(4.0)).min(0.45);
        let min_w = self
            .params
            .min_panel
            .min((finest_sigma / 4.0).max(1e-9))
            .max(1e-9);
        let panels = graded_panels(a, a + 2.0 * PI, x0, min_w, max_w);
        let raw = panel_nodes(&panels, self.params.panel_order);
        let nodes: Vec<SNode> = raw
            .iter()
            .map(|&(s, w)| {
                let sc = Complex64::new(s, 0.0);
                SNode {
                    s,
                    w,
                    q: self.curve.q(sc),
                    qp: self.curve.q_prime(sc),
                    qs: self.curve.qstar(sc),
                    qsp: self.curve.qstar_prime(sc),
                    u: Complex64::new(self.mode.trace.eval_real(s), 0.0),
                    left: s < x0,
                }
            })
            .collect();
        let mut desc: Vec<usize> = (0..nodes.len()).collect();
        desc.sort_by(|&i, &j| nodes[j].s.partial_cmp(&nodes[i].s).unwrap());
        ColumnCache {
            x0,
            nodes,
            desc,
            anchor: a + 2.0 * PI,
        }
    }

    /// Right-hand side of the Volterra system at t = x0 + i sigma: all
    /// real-domain integrals of the trace, including the real path leg.
    /// At sigma = 0 this is the full boundary value (the system is empty).
    fn rhs_at(
        &self,
        cache: &ColumnCache,
        sigma: f64,
        audit: &mut usize,
    ) -> Result<Complex64, ContinuationError> {
        let lambda = self.mode.lambda;
        let t = Complex64::new(cache.x0, sigma);
        let q_t = self.curve.q(t);
        let qs_t = self.curve.qstar(t);
        let qp_t = self.curve.q_prime(t);
        let qsp_t = self.curve.qstar_prime(t);
        let source_side = self.mode.bc == BoundaryCondition::Neumann;
        let ihalf = Complex64::new(0.0, 0.5);
        let lam2 = lambda * lambda;

        // kernels at every node
        let n = cache.nodes.len();
        let mut mk = vec![Complex64::new(0.0, 0.0); n];
        let mut a_dn = vec![Complex64::new(0.0, 0.0); n];
        let mut b_dn = vec![Complex64::new(0.0, 0.0); n];
        let mut rsq = vec![Complex64::new(0.0, 0.0); n];
        for (i, node) in cache.nodes.iter().enumerate() {
            let dq = node.q - q_t;
            let dqs = node.qs - qs_t;
            let r2 = dq * dqs;
            rsq[i] = r2;
            let z = lambda * r2.sqrt();
            let g = green_kernels(lambda, z, &self.params.policy)?;
            let (bracket, dlr) = if source_side {
                (
                    node.qp * dqs - node.qsp * dq,
                    ihalf * (node.qp / dq - node.qsp / dqs),
                )
            } else {
                (
                    -qp_t * dqs + qsp_t * dq,
                    ihalf * (-qp_t / dq + qsp_t / dqs),
                )
            };
            mk[i] = -lam2 * g.j1_over * ihalf * bracket;
            a_dn[i] = g.j0 * dlr;
            b_dn[i] = g.b_factor * dlr;
        }

        // tracked branch of log r^2 along descending s from the anchor
        let anchor_rsq = self
            .curve
            .r_squared_raw(Complex64::new(cache.anchor, 0.0), t);
        let mut desc_s = Vec::with_capacity(n + 1);
        let mut desc_rsq = Vec::with_capacity(n + 1);
        desc_s.push(cache.anchor);
        desc_rsq.push(anchor_rsq);
        for &i in &cache.desc {
            desc_s.push(cache.nodes[i].s);
            desc_rsq.push(rsq[i]);
        }
        let (args, steps) = super::branch::sweep_args(self.curve, t, &desc_s, &desc_rsq)?;
        *audit += steps;
        let mut log_values = vec![0.0f64; n];
        for (rank, &i) in cache.desc.iter().enumerate() {
            log_values[i] = args[rank + 1];
        }

        let mut i_log = Complex64::new(0.0, 0.0);
        let mut i_a = Complex64::new(0.0, 0.0);
        let mut i_b = Complex64::new(0.0, 0.0);
        let mut i_k1 = Complex64::new(0.0, 0.0);
        for (i, node) in cache.nodes.iter().enumerate() {
            let wu = node.w * node.u;
            let l = Complex64::new(rsq[i].norm().max(1e-300).ln(), log_values[i]);
            i_log += wu * mk[i] * l;
            i_a += wu * a_dn[i];
            i_b += wu * b_dn[i];
            if node.left {
                i_k1 += wu * mk[i];
            }
        }
        let sgn = if sigma == 0.0 { 0.0 } else { sigma.signum() };
        let rhs = self.jump_sign()
            * (-i_log / (2.0 * PI) - i_a / PI + i_b / PI
                - sgn * Complex64::i() * i_k1);
        Ok(rhs)
    }

    /// Volterra kernel entry: the entire double-layer factor between two
    /// points of the vertical segment.
    fn vertical_kernel(&self, src: &VNode, field_t: Complex64, field: &VNode) -> Result<Complex64, ContinuationError> {
        let lambda = self.mode.lambda;
        let dq = src.q - field.q;
        let dqs = src.qs - field.qs;
        let r2 = dq * dqs;
        let z = lambda * r2.sqrt();
        let g = green_kernels(lambda, z, &self.params.policy)?;
        let _ = field_t;
        let ihalf = Complex64::new(0.0, 0.5);
        let bracket = if self.mode.bc == BoundaryCondition::Neumann {
            src.qp * dqs - src.qsp * dq
        } else {
            -field.qp * dqs + field.qsp * dq
        };
        Ok(-lambda * lambda * g.j1_over * ihalf * bracket)
    }

    /// Solves the column through x0 for levels sigma = k h, k = 0..=n,
    /// h signed. Internal node doubling until the top level changes by
    /// less than the configured target. Returns the values at the
    /// requested levels.
    fn solve_side(
        &self,
        cache: &ColumnCache,
        h: f64,
        n_levels: usize,
        rhs_memo: &mut Vec<Option<Complex64>>,
        memo_denom: &mut usize,
        audit: &mut usize,
    ) -> Result<(Vec<Complex64>, Diag), ContinuationError> {
        let x0 = cache.x0;
        let sigma_top = h * n_levels as f64;
        let sgn = sigma_top.signum();
        let sj = self.jump_sign();
        let mut refine = 1usize; // internal grid: n_levels * refine intervals
        let mut prev_top: Option<Complex64> = None;
        let mut residual = f64::INFINITY;
        let mut points = 0usize;
        loop {
            let m = n_levels * refine;
            let dh = h / refine as f64;
            // memoized RHS levels on the dyadic ladder
            if *memo_denom < refine {
                let scale = refine / *memo_denom;
                let mut grown: Vec<Option<Complex64>> =
                    vec![None; rhs_memo.len().saturating_sub(1) * scale + 1];
                for (k, v) in rhs_memo.iter().enumerate() {
                    grown[k * scale] = *v;
                }
                *rhs_memo = grown;
                *memo_denom = refine;
            }
            let vnodes: Vec<VNode> = (0..=m)
                .map(|k| {
                    let t = Complex64::new(x0, dh * k as f64);
                    VNode {
                        q: self.curve.q(t),
                        qp: self.curve.q_prime(t),
                        qs: self.curve.qstar(t),
                        qsp: self.curve.qstar_prime(t),
                    }
                })
                .collect();
            let mut v = vec![Complex64::new(0.0, 0.0); m + 1];
            for k in 0..=m {
                let memo_idx = k * (*memo_denom / refine);
                let rhs = match rhs_memo[memo_idx] {
                    Some(r) => r,
                    None => {
                        let r = self.rhs_at(cache, dh * k as f64, audit)?;
                        points += cache.nodes.len();
                        rhs_memo[memo_idx] = Some(r);
                        r
                    }
                };
                if k == 0 {
                    v[0] = rhs;
                    continue;
                }
                let field_t = Complex64::new(x0, dh * k as f64);
                // product trapezoid over [0, sigma_k], lower-triangular
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..k {
                    let weight = if j == 0 { 0.5 } else { 1.0 };
                    let kernel = self.vertical_kernel(&vnodes[j], field_t, &vnodes[k])?;
                    acc += weight * kernel * v[j];
                }
                let diag_kernel = self.vertical_kernel(&vnodes[k], field_t, &vnodes[k])?;
                let denom = Complex64::new(1.0, 0.0) - sj * sgn * dh * 0.5 * diag_kernel;
                v[k] = (rhs + sj * sgn * dh * acc) / denom;
            }
            let top = v[m];
            if let Some(prev) = prev_top {
                residual = (top - prev).norm() / top.norm().max(1e-300);
                if residual <= self.params.volterra_target {
                    let out: Vec<Complex64> = (0..=n_levels).map(|k| v[k * refine]).collect();
                    return Ok((
                        out,
                        Diag {
                            quadrature_points: points,
                            residual,
                            branch_audit: *audit,
                            flagged: false,
                        },
                    ));
                }
            }
            prev_top = Some(top);
            if refine >= (1 << self.params.volterra_rounds) {
                let out: Vec<Complex64> = (0..=n_levels).map(|k| v[k * refine]).collect();
                return Ok((
                    out,
                    Diag {
                        quadrature_points: points,
                        residual,
                        branch_audit: *audit,
                        flagged: true,
                    },
                ));
            }
            refine *= 2;
        }
    }

    /// Values u^C(x0 + i k step) for k = -n_down ..= n_up, sharing one
    /// column cache. Index 0 of the returned vector is k = -n_down.
    pub fn column(
        &self,
        x0: f64,
        step: f64,
        n_up: usize,
        n_down: usize,
    ) -> Result<(Vec<ContinuationResult>, f64), ContinuationError> {
        if !(step > 0.0) {
            return Err(ContinuationError::BadGrid("step must be positive".into()));
        }
        let top = step * n_up.max(n_down) as f64;
        if top >= self.curve.margin() {
            return Err(ContinuationError::BranchUnsafe(format!(
                "column reaches |Im t| = {top}, beyond the margin {}",
                self.curve.margin()
            )));
        }
        let cache = self.build_cache(x0, -PI, step / (1 << self.params.volterra_rounds) as f64);
        let mut audit = 0usize;
        let mut up_memo: Vec<Option<Complex64>> = vec![None; n_up + 1];
        let mut up_denom = 1usize;
        let mut down_memo: Vec<Option<Complex64>> = vec![None; n_down + 1];
        let mut down_denom = 1usize;
        let base = self.rhs_at(&cache, 0.0, &mut audit)?;
        up_memo[0] = Some(base);
        if n_down > 0 {
            down_memo[0] = Some(base);
        }
        let (ups, diag_up) = if n_up > 0 {
            self.solve_side(&cache, step, n_up, &mut up_memo, &mut up_denom, &mut audit)?
        } else {
            (
                vec![base],
                Diag {
                    quadrature_points: cache.nodes.len(),
                    residual: 0.0,
                    branch_audit: audit,
                    flagged: false,
                },
            )
        };
        let (downs, diag_down) = if n_down > 0 {
            self.solve_side(
                &cache,
                -step,
                n_down,
                &mut down_memo,
                &mut down_denom,
                &mut audit,
            )?
        } else {
            (vec![base], diag_up)
        };
        let mut out = Vec::with_capacity(n_up + n_down + 1);
        for k in (1..=n_down).rev() {
            out.push(ContinuationResult {
                value: downs[k],
                quadrature_points: diag_down.quadrature_points,
                residual: diag_down.residual.min(1.0),
                branch_audit: diag_down.branch_audit,
                flagged: diag_down.flagged,
            });
        }
        out.push(ContinuationResult {
            value: base,
            quadrature_points: cache.nodes.len(),
            residual: 0.0,
            branch_audit: audit,
            flagged: false,
        });
        for k in 1..=n_up {
            out.push(ContinuationResult {
                value: ups[k],
                quadrature_points: diag_up.quadrature_points,
                residual: diag_up.residual.min(1.0),
                branch_audit: diag_up.branch_audit,
                flagged: diag_up.flagged,
            });
        }
        Ok((out, cache.x0))
    }

    /// Single-point evaluation.
    pub fn eval(&self, t: Complex64) -> Result<ContinuationResult, ContinuationError> {
        let xi = t.im;
        if xi.abs() < 1e-13 {
            let cache = self.build_cache(t.re, -PI, 1e-4);
            let mut audit = 0usize;
            let value = self.rhs_at(&cache, 0.0, &mut audit)?;
            return Ok(ContinuationResult {
                value,
                quadrature_points: cache.nodes.len(),
                residual: 0.0,
                branch_audit: audit,
                flagged: false,
            });
        }
        let lambda = self.mode.lambda;
        let m0 = ((4.0 * lambda * xi.abs()).ceil() as usize + 16).max(24);
        let (column, _) = if xi > 0.0 {
            self.column(t.re, xi / m0 as f64, m0, 0)?
        } else {
            self.column(t.re, -xi / m0 as f64, 0, m0)?
        };
        let idx = if xi > 0.0 { column.len() - 1 } else { 0 };
        Ok(column[idx])
    }
}

/// Holomorphic extension of the mode's trace at t by Millar continuation
/// with Volterra inversion along the vertical segment through Re t.
///
/// The product-trapezoid node count doubles until the value changes by less
/// than `params.volterra_target` relative; failure to converge within the
/// allowed rounds flags the result. With `params.self_check` the boundary
/// quadrature is re-run on a refined mesh and the larger discrepancy is
/// reported in `residual`.
pub fn volterra_solve(
    curve: &AnalyticCurve,
    mode: &EigenMode,
    t: Complex64,
    params: &ContinuationParams,
) -> Result<ContinuationResult, ContinuationError> {
    let engine = ContinuationEngine::new(curve, mode, params.clone());
    let mut result = engine.eval(t)?;
    if params.self_check {
        let mut refined = params.clone();
        refined.min_panel = params.min_panel / 4.0;
        refined.osc_budget = params.osc_budget * 0.7;
        refined.panel_order = params.panel_order + 8;
        refined.self_check = false;
        let engine2 = ContinuationEngine::new(curve, mode, refined);
        let check = engine2.eval(t)?;
        let diff = (check.value - result.value).norm() / result.value.norm().max(1e-300);
        result.residual = result.residual.max(diff);
        result.quadrature_points += check.quadrature_points;
        if diff > 10.0 * params.volterra_target.max(1e-9) {
            result.flagged = true;
        }
    }
    Ok(result)
}

/// The right-hand side of the Volterra equation at t: every term of the
/// continuation formula that only integrates the trace over the real
/// domain, with the slit of the branch at parameter 0 and the path
/// correction leg running along [0, Re t]. Requires Re t inside (0, 2 pi).
pub fn millar_rhs(
    curve: &AnalyticCurve,
    mode: &EigenMode,
    t: Complex64,
    params: &ContinuationParams,
) -> Result<Complex64, ContinuationError> {
    let two_pi = 2.0 * PI;
    if !(t.re > 0.0 && t.re < two_pi) {
        return Err(ContinuationError::BadGrid(format!(
            "Re t = {} must lie strictly inside (0, 2 pi)",
            t.re
        )));
    }
    let engine = ContinuationEngine::new(curve, mode, params.clone());
    let cache = engine.build_cache(t.re, -t.re, t.im.abs().max(1e-6));
    let mut audit = 0usize;
    engine.rhs_at(&cache, t.im, &mut audit)
}

/// Empirical growth table of the continued trace over the annulus
/// [0, 2 pi] x i [-eps, eps].
#[derive(Debug, Clone)]
pub struct GrowthProfile {
    pub lambda: f64,
    /// (Im t, max over Re t of log |u^C|)
    pub rows: Vec<(f64, f64)>,
    /// Fitted exponential rate: log max |u^C| ~ rate * |Im t| + const,
    /// i.e. rate = C-hat * lambda in the envelope normalization.
    pub fitted_rate: f64,
}

/// Scans the annulus on an (n_x x 2 n_xi + 1) grid and fits the growth
/// envelope. The fit uses the rows with |Im t| >= fit_from.
pub fn growth_profile(
    curve: &AnalyticCurve,
    mode: &EigenMode,
    epsilon: f64,
    n_x: usize,
    n_xi: usize,
    fit_from: f64,
    params: &ContinuationParams,
) -> Result<GrowthProfile, ContinuationError> {
    if n_x == 0 || n_xi == 0 || !(epsilon > 0.0) {
        return Err(ContinuationError::BadGrid(
            "growth profile needs a nonempty grid".into(),
        ));
    }
    let engine = ContinuationEngine::new(curve, mode, params.clone());
    let step = epsilon / n_xi as f64;
    let mut max_log = vec![f64::NEG_INFINITY; 2 * n_xi + 1];
    for jx in 0..n_x {
        let x0 = 2.0 * PI * (jx as f64 + 0.5) / n_x as f64;
        let (column, _) = engine.column(x0, step, n_xi, n_xi)?;
        for (row, res) in column.iter().enumerate() {
            let lv = res.value.norm().max(1e-300).ln();
            if lv > max_log[row] {
                max_log[row] = lv;
            }
        }
    }
    let rows: Vec<(f64, f64)> = (0..=2 * n_xi)
        .map(|row| ((row as f64 - n_xi as f64) * step, max_log[row]))
        .collect();
    // least squares log max ~ a + rate |xi| over the outer rows
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut count = 0.0;
    for &(xi, y) in &rows {
        if xi.abs() >= fit_from && y.is_finite() {
            let x = xi.abs();
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            count += 1.0;
        }
    }
    if count < 2.0 {
        return Err(ContinuationError::BadGrid(
            "growth fit window contains fewer than two rows".into(),
        ));
    }
    let rate = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    Ok(GrowthProfile {
        lambda: mode.lambda,
        rows,
        fitted_rate: rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::{disc_mode, Parity};

    fn disc_oracle(mode: &EigenMode, t: Complex64) -> Complex64 {
        // the trace's own holomorphic extension (trigonometric polynomial)
        mode.trace.eval_complex(t)
    }

    #[test]
    fn real_axis_restriction_reproduces_trace() {
        let curve = AnalyticCurve::circle(1.0);
        let mode = disc_mode(2, 1, BoundaryCondition::Neumann, Parity::Sin).unwrap();
        let params = ContinuationParams::default();
        for &x in &[0.37, 1.9, 3.3, 5.1] {
            let got = volterra_solve(&curve, &mode, Complex64::new(x, 0.0), &params)
                .unwrap()
                .value;
            let expect = mode.trace.eval_real(x);
            assert!(
                (got - expect).norm() < 1e-7,
                "restriction at {x}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn continuation_matches_disc_oracle_above_and_below() {
        let curve = AnalyticCurve::circle(1.0);
        let mode = disc_mode(3, 1, BoundaryCondition::Neumann, Parity::Sin).unwrap();
        let params = ContinuationParams::default();
        for &(x, y) in &[(1.2, 0.04), (2.8, -0.03), (5.5, 0.05)] {
            let t = Complex64::new(x, y);
            let got = volterra_solve(&curve, &mode, t, &params).unwrap().value;
            let expect = disc_oracle(&mode, t);
            assert!(
                (got - expect).norm() < 1e-6 * expect.norm().max(1.0),
                "at {t}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn dirichlet_continuation_matches_oracle() {
        let curve = AnalyticCurve::circle(1.0);
        let mode = disc_mode(2, 1, BoundaryCondition::Dirichlet, Parity::Sin).unwrap();
        let params = ContinuationParams::default();
        let t = Complex64::new(2.0, 0.05);
        let got = volterra_solve(&curve, &mode, t, &params).unwrap().value;
        let expect = disc_oracle(&mode, t);
        assert!(
            (got - expect).norm() < 1e-6 * expect.norm().max(1.0),
            "{got} vs {expect}"
        );
        // and on the real axis
        let x = Complex64::new(0.9, 0.0);
        let got = volterra_solve(&curve, &mode, x, &params).unwrap().value;
        assert!((got.re - mode.trace.eval_real(0.9)).abs() < 1e-7);
    }

    #[test]
    fn model_kernel_regression() {
        // the forward-substitution core inverts (I - K) for the model
        // kernel K(y, s) = e^{lambda (y - s)}: resolvent e^{(lambda+1)(y-s)}
        let lambda = 3.0;
        let m = 512;
        let y_top = 0.8;
        let h = y_top / m as f64;
        let rhs_fn = |y: f64| (0.7 * y).sin() + 1.0;
        // solve (I - K) u = rhs by product trapezoid
        let mut u = vec![0.0f64; m + 1];
        for k in 0..=m {
            let y = h * k as f64;
            let mut acc = 0.0;
            for (j, uj) in u.iter().enumerate().take(k) {
                let w = if j == 0 { 0.5 } else { 1.0 };
                acc += w * (lambda * (y - h * j as f64)).exp() * uj;
            }
            let denom = 1.0 - 0.5 * h; // kernel at coincidence is 1
            u[k] = (rhs_fn(y) + h * acc) / denom;
        }
        // exact solution u = rhs + int_0^y e^{(lambda+1)(y-s)} rhs(s) ds
        let y = y_top;
        let quad = {
            let n = 4000;
            let hh = y / n as f64;
            let mut acc = 0.0;
            for j in 0..=n {
                let s = hh * j as f64;
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                acc += w * ((lambda + 1.0) * (y - s)).exp() * rhs_fn(s);
            }
            acc * hh
        };
        let exact = rhs_fn(y) + quad;
        assert!(
            (u[m] - exact).abs() < 1e-5 * exact.abs(),
            "{} vs {exact}",
            u[m]
        );
    }
}
