//! Zero and critical-point counting on real boundaries and complex annuli,
//! Schiffer and goodness ratios, and the scaling experiments.
//!
//! Complex zeros are counted by the argument principle over rectangles
//! [a, b] x i[-rho, rho] in the parameter strip, with the logarithmic
//! derivative formed from 4th-order central differences in the vertical
//! direction (holomorphy makes the direction immaterial, and vertical
//! stencils ride along the Volterra columns for free). Jensen's formula
//! provides the independent cross-check.

use crate::continuation::{
    continue_interior, ContinuationEngine, ContinuationError, ContinuationParams,
};
use crate::geometry::{AnalyticCurve, GeometryError};
use crate::modes::{BoundaryCondition, EigenMode, ModesError};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, thiserror::Error)]
pub enum CountingError {
    #[error("zero count changes under sample doubling: {coarse} vs {fine}")]
    UnresolvedOscillation { coarse: usize, fine: usize },
    #[error("winding number {winding} stays non-integer after {retries} contour perturbations")]
    NonIntegerWinding { winding: f64, retries: usize },
    #[error("|f| = {value:.3e} below the log floor at a quadrature node (t = {t})")]
    LogSingularity { t: Complex64, value: f64 },
    #[error("restriction to the interior curve is numerically zero (norm {0:.3e})")]
    ZeroRestriction(f64),
    #[error("tangential derivative vanishes identically (Schiffer-degenerate trace)")]
    DegenerateTrace,
    #[error("empty mode family")]
    EmptyFamily,
    #[error(transparent)]
    Continuation(#[from] ContinuationError),
    #[error(transparent)]
    Modes(#[from] ModesError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

// ---------------------------------------------------------------------
// real-axis zero counting
// ---------------------------------------------------------------------

/// Result of scanning a trace for boundary nodal points.
#[derive(Debug, Clone)]
pub struct ZeroScan {
    /// zeros with a sign change, refined by bisection
    pub sign_changes: usize,
    /// near-zeros of |u| without a sign change (tangential contacts)
    pub tangential: usize,
    /// refined sign-change locations in [0, 2 pi)
    pub locations: Vec<f64>,
}

fn scan_zeros_of(eval: &dyn Fn(f64) -> f64, samples: usize) -> ZeroScan {
    let n = samples;
    let grid: Vec<f64> = (0..n)
        .map(|j| 2.0 * PI * (j as f64 + 0.5) / n as f64)
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&s| eval(s)).collect();
    let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let floor = 1e-13 * scale.max(1e-300);
    let mut locations = Vec::new();
    let mut tangential = 0usize;
    for j in 0..n {
        let k = (j + 1) % n;
        let (a, b) = (vals[j], vals[k]);
        if a.abs() <= floor {
            continue; // attributed to the neighboring interval
        }
        if b.abs() > floor && a.signum() != b.signum() {
            // bisection refinement to 1e-10 isolation
            let mut lo = grid[j];
            let mut hi = if k == 0 { grid[k] + 2.0 * PI } else { grid[k] };
            let mut f_lo = a;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if hi - lo < 1e-12 {
                    break;
                }
                let fm = eval(mid.rem_euclid(2.0 * PI));
                if fm == 0.0 {
                    lo = mid;
                    break;
                }
                if f_lo.signum() != fm.signum() {
                    hi = mid;
                } else {
                    lo = mid;
                    f_lo = fm;
                }
            }
            locations.push((0.5 * (lo + hi)).rem_euclid(2.0 * PI));
        } else if b.abs() > floor {
            // tangential contact: local dip of |u| below 1e-9 scale
            let prev = vals[(j + n - 1) % n].abs();
            let here = vals[j].abs();
            let next = b.abs();
            if here < prev && here <= next && here < 1e-9 * scale.max(1.0) {
                tangential += 1;
            }
        }
    }
    locations.sort_by(|a, b| a.partial_cmp(b).unwrap());
    locations.dedup_by(|a, b| (*a - *b).abs() < 1e-10);
    ZeroScan {
        sign_changes: locations.len(),
        tangential,
        locations,
    }
}

/// Number of boundary nodal points of the trace: sign changes on the real
/// parameter circle, bisection-refined, validated by sample doubling.
pub fn real_boundary_zeros(mode: &EigenMode) -> Result<ZeroScan, CountingError> {
    real_boundary_zeros_scaled(mode, 1.0)
}

/// Same scan at a resolution multiple (the 2x-resolution stability checks).
pub fn real_boundary_zeros_scaled(mode: &EigenMode, scale: f64) -> Result<ZeroScan, CountingError> {
    let n = (crate::modes::default_samples(mode.lambda) as f64 * scale) as usize;
    let eval = |s: f64| mode.trace.eval_real(s);
    let coarse = scan_zeros_of(&eval, n);
    let fine = scan_zeros_of(&eval, 2 * n);
    if coarse.sign_changes != fine.sign_changes {
        return Err(CountingError::UnresolvedOscillation {
            coarse: coarse.sign_changes,
            fine: fine.sign_changes,
        });
    }
    Ok(fine)
}

/// Number of boundary critical points. Neumann: zeros of the tangential
/// derivative of the trace (spectral differentiation); Dirichlet: zeros of
/// the normal-derivative trace itself. A trace whose derivative vanishes
/// identically (radial modes) is reported as Schiffer-degenerate.
pub fn critical_point_count(mode: &EigenMode) -> Result<ZeroScan, CountingError> {
    critical_point_count_scaled(mode, 1.0)
}

/// Critical-point scan at a resolution multiple.
pub fn critical_point_count_scaled(
    mode: &EigenMode,
    scale: f64,
) -> Result<ZeroScan, CountingError> {
    let target = match mode.bc {
        BoundaryCondition::Neumann => mode.trace.derivative(),
        BoundaryCondition::Dirichlet => mode.trace.clone(),
    };
    let coeff_scale: f64 = (-target.k_max()..=target.k_max())
        .map(|k| target.coefficient(k).norm())
        .fold(0.0, f64::max);
    let trace_scale: f64 = (-mode.trace.k_max()..=mode.trace.k_max())
        .map(|k| mode.trace.coefficient(k).norm())
        .fold(0.0, f64::max);
    if coeff_scale < 1e-12 * trace_scale.max(1.0) {
        return Err(CountingError::DegenerateTrace);
    }
    let n = (crate::modes::default_samples(mode.lambda) as f64 * scale) as usize;
    let eval = |s: f64| target.eval_real(s);
    let coarse = scan_zeros_of(&eval, n);
    let fine = scan_zeros_of(&eval, 2 * n);
    if coarse.sign_changes != fine.sign_changes {
        return Err(CountingError::UnresolvedOscillation {
            coarse: coarse.sign_changes,
            fine: fine.sign_changes,
        });
    }
    Ok(fine)
}

/// Asymptotic Schiffer ratio ||d u / ds|| / ||u|| in L2 of the boundary
/// (trapezoid norms, arclength measure). Zero is a valid output.
pub fn schiffer_ratio(mode: &EigenMode, curve: &AnalyticCurve) -> f64 {
    let derivative = mode.trace.derivative();
    let num = derivative.rms_on(curve);
    let den = mode.trace.rms_on(curve);
    if den == 0.0 {
        return 0.0;
    }
    num / den
}

/// Goodness ratio ||phi||_{L2(boundary)} / ||phi||_{L2(C)} for an interior
/// curve C, the interior restriction evaluated by the continued layer
/// potential at real parameters.
pub fn goodness_ratio(
    mode: &EigenMode,
    boundary: &AnalyticCurve,
    interior: &AnalyticCurve,
    params: &ContinuationParams,
) -> Result<f64, CountingError> {
    let boundary_norm = match mode.bc {
        BoundaryCondition::Neumann => mode.trace.rms_on(boundary),
        // the Dirichlet eigenfunction itself vanishes on the boundary
        BoundaryCondition::Dirichlet => 0.0,
    };
    let n = crate::modes::default_samples(mode.lambda).min(1024);
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..n {
        let s = 2.0 * PI * j as f64 / n as f64;
        let v = continue_interior(mode, boundary, interior, Complex64::new(s, 0.0), params)?;
        let speed = interior.q_prime(Complex64::new(s, 0.0)).norm();
        num += v.value.norm_sqr() * speed;
        den += speed;
    }
    let interior_norm = (num / den).sqrt();
    if interior_norm < 1e-12 {
        return Err(CountingError::ZeroRestriction(interior_norm));
    }
    Ok(boundary_norm / interior_norm)
}

// ---------------------------------------------------------------------
// argument principle on strip rectangles
// ---------------------------------------------------------------------

/// Rectangle [x0, x1] x i[-rho, rho] in the parameter strip with node
/// counts per side.
#[derive(Debug, Clone, Copy)]
pub struct Contour {
    pub x0: f64,
    pub x1: f64,
    pub rho: f64,
    /// trapezoid nodes along each horizontal side
    pub nodes_x: usize,
    /// vertical grid intervals between 0 and rho (the Volterra ladder)
    pub nodes_y: usize,
}

impl Contour {
    pub fn full_annulus(rho: f64, nodes_x: usize, nodes_y: usize) -> Self {
        Contour {
            x0: 0.0,
            x1: 2.0 * PI,
            rho,
            nodes_x,
            nodes_y,
        }
    }
}

/// Holomorphic map on the parameter strip evaluated along vertical columns;
/// the access pattern of both the continuation pipeline and the counting
/// contours.
pub trait StripMap {
    /// Values at x + i k step for k = -n_down ..= n_up (index 0 of the
    /// result is k = -n_down).
    fn column(
        &self,
        x: f64,
        step: f64,
        n_up: usize,
        n_down: usize,
    ) -> Result<Vec<Complex64>, CountingError>;

    /// Whether f(conj t) = conj(f(t)); the winding integral then derives
    /// the lower half-strip from the upper by reflection.
    fn conjugate_symmetric(&self) -> bool {
        false
    }
}

impl StripMap for ContinuationEngine<'_> {
    fn column(
        &self,
        x: f64,
        step: f64,
        n_up: usize,
        n_down: usize,
    ) -> Result<Vec<Complex64>, CountingError> {
        let (results, _) = ContinuationEngine::column(self, x, step, n_up, n_down)?;
        Ok(results.into_iter().map(|r| r.value).collect())
    }

    fn conjugate_symmetric(&self) -> bool {
        self.mode.trace.is_real_valued()
    }
}

/// Adapter for closed-form test functions.
pub struct ClosureMap<F: Fn(Complex64) -> Complex64>(pub F);

impl<F: Fn(Complex64) -> Complex64> StripMap for ClosureMap<F> {
    fn column(
        &self,
        x: f64,
        step: f64,
        n_up: usize,
        n_down: usize,
    ) -> Result<Vec<Complex64>, CountingError> {
        Ok((-(n_down as i64)..=n_up as i64)
            .map(|k| (self.0)(Complex64::new(x, k as f64 * step)))
            .collect())
    }
}

/// Raw winding number (1/2 pi i) oint f'/f dt around the contour, f' by
/// 4th-order central differences in the vertical direction with step tied
/// to the vertical grid.
fn winding_number(f: &dyn StripMap, contour: &Contour) -> Result<f64, CountingError> {
    let Contour {
        x0,
        x1,
        rho,
        nodes_x,
        nodes_y,
    } = *contour;
    let k_top = nodes_y.max(4);
    let g = rho / k_top as f64;
    let dx = (x1 - x0) / nodes_x as f64;
    // for a full-period strip the two vertical sides carry equal values in
    // opposite directions; their contributions cancel by periodicity
    let full_period = (x1 - x0 - 2.0 * PI).abs() < 1e-9;

    // log-derivative at a column (values indexed -n_lv..n_lv) and level k
    let n_lv = k_top + 2;
    let ld = |vals: &[Complex64], k: i64, x: f64| -> Result<Complex64, CountingError> {
        let at = |j: i64| vals[(j + n_lv as i64) as usize];
        let fp = (at(k - 2) - 8.0 * at(k - 1) + 8.0 * at(k + 1) - at(k + 2))
            / (12.0 * g * Complex64::i());
        let v = fp / at(k);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(CountingError::LogSingularity {
                t: Complex64::new(x, k as f64 * g),
                value: at(k).norm(),
            })
        }
    };

    let symmetric = f.conjugate_symmetric();
    let mut integral = Complex64::new(0.0, 0.0);
    for jx in 0..=nodes_x {
        let x = x0 + dx * jx as f64;
        let vals = if symmetric {
            // Schwarz reflection: solve the upper half only and mirror
            let upper = f.column(x, g, n_lv, 0)?;
            let mut full = Vec::with_capacity(2 * n_lv + 1);
            for k in (1..=n_lv).rev() {
                full.push(upper[k].conj());
            }
            full.extend(upper);
            full
        } else {
            f.column(x, g, n_lv, n_lv)?
        };
        let w_end = if jx == 0 || jx == nodes_x { 0.5 } else { 1.0 };
        // bottom side (left to right) at -rho, top side (right to left)
        let bottom = ld(&vals, -(k_top as i64), x)?;
        let top = ld(&vals, k_top as i64, x)?;
        integral += w_end * dx * (bottom - top);
        // vertical sides: upward at x1, downward at x0
        if !full_period && (jx == 0 || jx == nodes_x) {
            let sign = if jx == nodes_x { 1.0 } else { -1.0 };
            let mut side = Complex64::new(0.0, 0.0);
            for k in -(k_top as i64)..=(k_top as i64) {
                let w = if k.unsigned_abs() as usize == k_top {
                    0.5
                } else {
                    1.0
                };
                side += w * ld(&vals, k, x)?;
            }
            integral += sign * Complex64::i() * g * side;
        }
    }
    let w = integral / (2.0 * PI * Complex64::i());
    Ok(w.re)
}

/// Zeros of f inside the contour by the argument principle: the raw winding
/// must sit within 0.25 of an integer; otherwise the contour is nudged
/// outward by half a vertical cell and retried (a zero close to the contour
/// is the usual cause). Returns the count and the final raw winding.
pub fn count_zeros_argument_principle(
    f: &dyn StripMap,
    contour: &Contour,
) -> Result<(usize, f64), CountingError> {
    let mut c = *contour;
    let full_period = (c.x1 - c.x0 - 2.0 * PI).abs() < 1e-9;
    let mut last = f64::NAN;
    for _retry in 0..3 {
        match winding_number(f, &c) {
            Ok(w) => {
                last = w;
                let rounded = w.round();
                if (w - rounded).abs() <= 0.25 && rounded >= -0.25 {
                    return Ok((rounded.max(0.0) as usize, w));
                }
            }
            Err(CountingError::LogSingularity { .. }) => {}
            Err(e) => return Err(e),
        }
        // nudge outward by half a cell and densify; a partial contour also
        // slides its vertical sides off any nearby zero
        let g = c.rho / c.nodes_y.max(4) as f64;
        c.rho += 0.5 * g;
        if !full_period {
            let dx = (c.x1 - c.x0) / c.nodes_x as f64;
            c.x0 -= 0.31 * dx;
            c.x1 += 0.31 * dx;
        }
        c.nodes_x = c.nodes_x * 3 / 2;
        c.nodes_y += 2;
    }
    Err(CountingError::NonIntegerWinding {
        winding: last,
        retries: 3,
    })
}

// ---------------------------------------------------------------------
// Jensen route
// ---------------------------------------------------------------------

/// Mean of log |f| over the horizontal line Im t = rho.
fn log_mean(f: &dyn StripMap, rho: f64, nodes: usize, offset: f64) -> Result<f64, CountingError> {
    let mut acc = 0.0;
    let (n_up, n_down) = if rho >= 0.0 { (1, 0) } else { (0, 1) };
    let step = rho.abs().max(1e-12);
    for j in 0..nodes {
        let x = 2.0 * PI * (j as f64 + offset) / nodes as f64;
        let vals = f.column(x, step, n_up, n_down)?;
        let v = if rho >= 0.0 { vals[n_down + n_up] } else { vals[0] };
        let mag = v.norm();
        if mag < 1e-13 {
            return Err(CountingError::LogSingularity {
                t: Complex64::new(x, rho),
                value: mag,
            });
        }
        acc += mag.ln();
    }
    Ok(acc / nodes as f64)
}

/// Jensen count M_f(eps) + M_f(-eps) - 2 M_f(0), which integrates the
/// sub-annulus zero counts over rho in [0, eps]. Quadrature nodes that land
/// on a zero of |f| trigger a grid shift (up to three).
pub fn jensen_count(f: &dyn StripMap, epsilon: f64, nodes: usize) -> Result<f64, CountingError> {
    let mut offset = 0.5;
    let mut last_err = None;
    for _ in 0..3 {
        let attempt = (|| -> Result<f64, CountingError> {
            let hi = log_mean(f, epsilon, nodes, offset)?;
            let lo = log_mean(f, -epsilon, nodes, offset)?;
            let mid = log_mean(f, 0.0, nodes, offset)?;
            Ok(hi + lo - 2.0 * mid)
        })();
        match attempt {
            Ok(v) => return Ok(v),
            Err(CountingError::LogSingularity { .. }) => {
                last_err = Some(attempt.unwrap_err());
                offset += 0.237; // irrational-ish shift off the zero set
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap())
}

// ---------------------------------------------------------------------
// flat-strip Green's function proxy for the zero-count envelope
// ---------------------------------------------------------------------

/// Max over inner half-annulus pairs of the Dirichlet Green's function of
/// the periodic flat strip {|Im t| < eps} (one horizontal period image each
/// side; further images are exponentially negligible). This is the
/// comparison constant nu(eps) < 0 of the envelope bound
/// n(A(eps/2)) <= max log |u^C| / |nu(eps)|, a documented proxy for the
/// annulus Green's function of the complexified curve.
pub fn strip_green_max(eps: f64) -> f64 {
    // p maps the strip to the upper half plane; G is the half-plane
    // Green's function pulled back.
    let p = |z: Complex64| ((z + Complex64::new(0.0, eps)) * (PI / (2.0 * eps))).exp();
    let green = |z: Complex64, w: Complex64| -> f64 {
        let num = (p(z) - p(w)).norm();
        let den = (p(z) - p(w).conj()).norm();
        (num / den).ln() / (2.0 * PI)
    };
    let mut best = f64::NEG_INFINITY;
    let ny = 9;
    let nx = 33;
    for iy in 0..ny {
        for jy in 0..ny {
            let y = -eps / 2.0 + eps * iy as f64 / (ny - 1) as f64;
            let eta = -eps / 2.0 + eps * jy as f64 / (ny - 1) as f64;
            for jx in 1..nx {
                let dx = PI * jx as f64 / (nx - 1) as f64;
                let z = Complex64::new(0.0, y);
                let w = Complex64::new(dx, eta);
                let gsum = green(z, w)
                    + green(z, w + Complex64::new(2.0 * PI, 0.0))
                    + green(z, w - Complex64::new(2.0 * PI, 0.0));
                if gsum > best {
                    best = gsum;
                }
            }
        }
    }
    best.min(-f64::MIN_POSITIVE)
}

// ---------------------------------------------------------------------
// per-mode record and the scaling experiment
// ---------------------------------------------------------------------

/// One row of the experiment report (the CSV schema).
#[derive(Debug, Clone, serde::Serialize)]
pub struct CountRecord {
    pub mode_id: String,
    pub m: u32,
    pub n: u32,
    pub bc: String,
    pub lambda: f64,
    pub epsilon: f64,
    pub n_real: Option<usize>,
    pub n_complex: Option<usize>,
    pub n_crit: Option<usize>,
    /// tangential (no-sign-change) real zeros, reported alongside
    pub n_tangential: Option<usize>,
    pub schiffer_ratio: Option<f64>,
    pub goodness_ratio: Option<f64>,
    pub max_log_mod: Option<f64>,
    pub status: String,
}

impl CountRecord {
    pub fn csv_header() -> &'static str {
        "mode_id,m,n,bc,lambda,epsilon,n_real,n_complex,n_crit,schiffer_ratio,goodness_ratio,max_log_mod,status"
    }

    pub fn to_csv_row(&self) -> String {
        fn opt_usize(v: &Option<usize>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        fn opt_f64(v: &Option<f64>) -> String {
            v.map(|x| format!("{:.12e}", x)).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{:.12e},{:.12e},{},{},{},{},{},{},{}",
            self.mode_id,
            self.m,
            self.n,
            self.bc,
            self.lambda,
            self.epsilon,
            opt_usize(&self.n_real),
            opt_usize(&self.n_complex),
            opt_usize(&self.n_crit),
            opt_f64(&self.schiffer_ratio),
            opt_f64(&self.goodness_ratio),
            opt_f64(&self.max_log_mod),
            self.status
        )
    }
}

pub fn write_csv(records: &[CountRecord]) -> String {
    let mut out = String::from(CountRecord::csv_header());
    out.push('\n');
    for r in records {
        out.push_str(&r.to_csv_row());
        out.push('\n');
    }
    out
}

/// What the per-mode counting pass should compute.
#[derive(Debug, Clone)]
pub struct CountOptions {
    pub epsilon: f64,
    pub with_complex: bool,
    pub with_critical: bool,
    pub with_goodness: Option<AnalyticCurve>,
    pub params: ContinuationParams,
    /// Multiplies every grid density (sample counts, contour nodes, panel
    /// budgets); integer counts must be invariant under doubling it.
    pub resolution_scale: f64,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            epsilon: 0.05,
            with_complex: false,
            with_critical: true,
            with_goodness: None,
            params: ContinuationParams::default(),
            resolution_scale: 1.0,
        }
    }
}

impl CountOptions {
    fn scaled_params(&self) -> ContinuationParams {
        let mut p = self.params.clone();
        if self.resolution_scale != 1.0 {
            p.osc_budget /= self.resolution_scale;
            p.min_panel /= self.resolution_scale;
        }
        p
    }
}

/// Full counting pass over one mode; failures are captured in the record
/// status instead of aborting the batch.
pub fn count_mode(mode: &EigenMode, curve: &AnalyticCurve, opts: &CountOptions) -> CountRecord {
    let mut record = CountRecord {
        mode_id: mode.id(),
        m: mode.m,
        n: mode.n,
        bc: mode.bc.to_string(),
        lambda: mode.lambda,
        epsilon: opts.epsilon,
        n_real: None,
        n_complex: None,
        n_crit: None,
        n_tangential: None,
        schiffer_ratio: None,
        goodness_ratio: None,
        max_log_mod: None,
        status: "ok".into(),
    };
    let mut failures: Vec<String> = Vec::new();

    match real_boundary_zeros_scaled(mode, opts.resolution_scale) {
        Ok(scan) => {
            record.n_real = Some(scan.sign_changes);
            record.n_tangential = Some(scan.tangential);
        }
        Err(e) => failures.push(format!("n_real: {e}")),
    }
    if opts.with_critical {
        match critical_point_count_scaled(mode, opts.resolution_scale) {
            Ok(scan) => record.n_crit = Some(scan.sign_changes),
            Err(CountingError::DegenerateTrace) => {
                failures.push("n_crit: degenerate".into());
            }
            Err(e) => failures.push(format!("n_crit: {e}")),
        }
    }
    record.schiffer_ratio = Some(schiffer_ratio(mode, curve));
    if opts.with_complex {
        let engine = ContinuationEngine::new(curve, mode, opts.scaled_params());
        let nodes_x = ((2.5 * mode.m.max(4) as f64 * opts.resolution_scale) as usize + 48).min(600);
        let nodes_y = (((4.0 * mode.lambda * opts.epsilon * opts.resolution_scale).ceil() as usize)
            + 8)
        .max(12);
        let contour = Contour::full_annulus(opts.epsilon, nodes_x, nodes_y);
        match count_zeros_argument_principle(&engine, &contour) {
            Ok((count, _)) => record.n_complex = Some(count),
            Err(e) => failures.push(format!("n_complex: {e}")),
        }
        match crate::continuation::growth_profile(
            curve,
            mode,
            opts.epsilon,
            24.min(nodes_x),
            4,
            0.0,
            &opts.scaled_params(),
        ) {
            Ok(profile) => {
                let max_log = profile
                    .rows
                    .iter()
                    .map(|r| r.1)
                    .fold(f64::NEG_INFINITY, f64::max);
                record.max_log_mod = Some(max_log);
            }
            Err(e) => failures.push(format!("max_log_mod: {e}")),
        }
    }
    if let Some(interior) = &opts.with_goodness {
        match goodness_ratio(mode, curve, interior, &opts.scaled_params()) {
            Ok(r) => record.goodness_ratio = Some(r),
            Err(CountingError::ZeroRestriction(_)) => {
                failures.push("goodness: zero-restriction".into())
            }
            Err(e) => failures.push(format!("goodness: {e}")),
        }
    }
    if !failures.is_empty() {
        record.status = failures.join("; ").replace(',', ";");
    }
    record
}

/// Scaling report over a mode family.
#[derive(Debug, Clone)]
pub struct ScalingReport {
    pub records: Vec<CountRecord>,
    /// least-squares slope of n_real against lambda
    pub slope_real: f64,
    /// sup over the family of n_complex / lambda (when computed)
    pub sup_complex_ratio: Option<f64>,
    /// modes with n_real / lambda > 1.8
    pub whispering_saturation: Vec<String>,
}

/// Runs the counting pass over a family of modes with increasing lambda,
/// fits the linear growth of the real counts, and flags whispering-gallery
/// saturation. Per-mode failures are retained in the records.
pub fn scaling_experiment(
    family: &[(EigenMode, AnalyticCurve)],
    opts: &CountOptions,
) -> Result<ScalingReport, CountingError> {
    if family.is_empty() {
        return Err(CountingError::EmptyFamily);
    }
    let records: Vec<CountRecord> = family
        .iter()
        .map(|(mode, curve)| count_mode(mode, curve, opts))
        .collect();
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter_map(|r| r.n_real.map(|n| (r.lambda, n as f64)))
        .collect();
    let slope_real = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    } else {
        f64::NAN
    };
    let sup_complex_ratio = records
        .iter()
        .filter_map(|r| r.n_complex.map(|n| n as f64 / r.lambda))
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
    let whispering_saturation = records
        .iter()
        .filter(|r| r.n_real.is_some_and(|n| n as f64 / r.lambda > 1.8))
        .map(|r| r.mode_id.clone())
        .collect();
    Ok(ScalingReport {
        records,
        slope_real,
        sup_complex_ratio,
        whispering_saturation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::{disc_mode, Parity};

    #[test]
    fn disc_sin_mode_real_zero_count() {
        for m in [1u32, 3, 7] {
            let mode = disc_mode(m, 1, BoundaryCondition::Neumann, Parity::Sin).unwrap();
            let scan = real_boundary_zeros(&mode).unwrap();
            assert_eq!(scan.sign_changes, 2 * m as usize, "m = {m}");
            assert_eq!(scan.tangential, 0);
        }
    }

    #[test]
    fn radial_mode_has_no_zeros_and_degenerate_critical_set() {
        let mode = disc_mode(0, 2, BoundaryCondition::Neumann, Parity::Cos).unwrap();
        let scan = real_boundary_zeros(&mode).unwrap();
        assert_eq!(scan.sign_changes, 0);
        assert!(matches!(
            critical_point_count(&mode),
            Err(CountingError::DegenerateTrace)
        ));
        let circle = AnalyticCurve::circle(1.0);
        assert_eq!(schiffer_ratio(&mode, &circle), 0.0);
    }

    #[test]
    fn critical_points_of_sin_modes() {
        let mode = disc_mode(4, 2, BoundaryCondition::Neumann, Parity::Sin).unwrap();
        let scan = critical_point_count(&mode).unwrap();
        assert_eq!(scan.sign_changes, 8);
        // Dirichlet: the normal-derivative trace itself
        let dir = disc_mode(3, 1, BoundaryCondition::Dirichlet, Parity::Sin).unwrap();
        let scan = critical_point_count(&dir).unwrap();
        assert_eq!(scan.sign_changes, 6);
    }

    #[test]
    fn schiffer_ratio_is_angular_momentum() {
        let circle = AnalyticCurve::circle(1.0);
        for m in [2u32, 5, 9] {
            let mode = disc_mode(m, 1, BoundaryCondition::Neumann, Parity::Sin).unwrap();
            let r = schiffer_ratio(&mode, &circle);
            assert!((r - m as f64).abs() < 1e-9, "m = {m}: {r}");
        }
    }

    #[test]
    fn synthetic_argument_principle_counts() {
        // f(t) = sin(3t) (cos t - cos w): 6 real zeros plus the pair
        // {w, 2 pi - w}
        let w = Complex64::new(1.0, 0.04);
        let f = ClosureMap(move |t: Complex64| (3.0 * t).sin() * (t.cos() - w.cos()));
        let contour = Contour::full_annulus(0.1, 160, 16);
        let (count, raw) = count_zeros_argument_principle(&f, &contour).unwrap();
        assert_eq!(count, 8, "raw winding {raw}");
        assert!((raw - 8.0).abs() < 0.05);
        // zero-free function
        let g = ClosureMap(|t: Complex64| t.cos() + 3.0);
        let (count, _) = count_zeros_argument_principle(&g, &contour).unwrap();
        assert_eq!(count, 0);
    }

    #[test]
    fn partitioned_contours_add_up() {
        let w = Complex64::new(2.0, 0.03);
        let f = ClosureMap(move |t: Complex64| (2.0 * t).sin() * (t.cos() - w.cos()));
        let whole = Contour::full_annulus(0.09, 160, 16);
        let (total, _) = count_zeros_argument_principle(&f, &whole).unwrap();
        // split at x = 1.1 and x = 1.1 + 2 pi (off the zeros of sin 2t)
        let left = Contour {
            x0: 1.1,
            x1: 3.6,
            rho: 0.09,
            nodes_x: 100,
            nodes_y: 16,
        };
        let right = Contour {
            x0: 3.6,
            x1: 1.1 + 2.0 * PI,
            rho: 0.09,
            nodes_x: 100,
            nodes_y: 16,
        };
        let (a, _) = count_zeros_argument_principle(&f, &left).unwrap();
        let (b, _) = count_zeros_argument_principle(&f, &right).unwrap();
        assert_eq!(a + b, total);
    }

    #[test]
    fn jensen_matches_planted_zeros() {
        // all zeros of sin(2t) are real: jensen integral = 4 eps
        let f = ClosureMap(|t: Complex64| (2.0 * t).sin());
        let eps = 0.08;
        let j = jensen_count(&f, eps, 2048).unwrap();
        assert!((j - 4.0 * eps).abs() < 0.02, "jensen {j} vs {}", 4.0 * eps);
        // zero-free: jensen 0
        let g = ClosureMap(|t: Complex64| t.sin() + 4.0);
        let j0 = jensen_count(&g, eps, 512).unwrap();
        assert!(j0.abs() < 1e-8);
        // derivative consistency at eps: d/d eps jensen ~ n(A(eps)) = 4
        let delta = 0.004;
        let jp = jensen_count(&f, eps + delta, 2048).unwrap();
        let jm = jensen_count(&f, eps - delta, 2048).unwrap();
        let deriv = (jp - jm) / (2.0 * delta);
        let contour = Contour::full_annulus(eps, 96, 12);
        let (count, _) = count_zeros_argument_principle(&f, &contour).unwrap();
        assert!(
            (deriv - count as f64).abs() < 0.5,
            "d jensen {deriv} vs count {count}"
        );
    }

    #[test]
    fn strip_green_proxy_is_negative() {
        let nu = strip_green_max(0.1);
        assert!(nu < 0.0);
    }

    #[test]
    fn scaling_experiment_empty_family_errors() {
        assert!(matches!(
            scaling_experiment(&[], &CountOptions::default()),
            Err(CountingError::EmptyFamily)
        ));
    }

    #[test]
    fn count_mode_disc_record() {
        let curve = AnalyticCurve::circle(1.0);
        let mode = disc_mode(2, 1, BoundaryCondition::Neumann, Parity::Sin).unwrap();
        let opts = CountOptions::default();
        let rec = count_mode(&mode, &curve, &opts);
        assert_eq!(rec.status, "ok");
        assert_eq!(rec.n_real, Some(4));
        assert_eq!(rec.n_crit, Some(4));
        assert!((rec.schiffer_ratio.unwrap() - 2.0).abs() < 1e-9);
        let csv = write_csv(&[rec]);
        assert!(csv.starts_with(CountRecord::csv_header()));
        assert_eq!(csv.lines().count(), 2);
    }
}
