//! Ellipse eigenmodes by two-parameter shooting on the separated system
//!
//!   G'' + (h - c^2 cos^2 phi) G = 0   (angular, 2 pi periodic),
//!   F'' + (c^2 cosh^2 rho - h) F = 0  (radial, on [0, rho_max]),
//!
//! in elliptical coordinates (x, y) = (a cos phi cosh rho, a sin phi sinh rho)
//! for the ellipse x^2 + y^2/(1 - a^2) = 1, where c = a lambda,
//! rho_max = acosh(1/a) and h is the separation constant. The parameter
//! relation c = a lambda is fixed by requiring the circle limit a -> 0 to
//! reproduce disc eigenvalues, which the tests verify.
//!
//! Periodicity of G is imposed through its parity classes: even/odd about
//! phi = 0 and about phi = pi/2 reduce the period condition to a boundary
//! condition at pi/2 for a quarter-interval shoot, integrated by the same
//! adaptive 8th-order scheme as the radial equation. Smoothness across the
//! focal segment rho = 0 pairs even angular classes with F'(0) = 0 and odd
//! classes with F(0) = 0.

use super::{
    default_samples, real_bessel, BoundaryCondition, EigenMode, ModeKind, ModesError, Parity,
    RootKind, Trace,
};
use crate::geometry::AnalyticCurve;
use std::sync::OnceLock;

/// 4-stage Gauss-Legendre collocation coefficients (classical order 8).
struct Gl4 {
    c: [f64; 4],
    b: [f64; 4],
    a: [[f64; 4]; 4],
}

fn gl4() -> &'static Gl4 {
    static CELL: OnceLock<Gl4> = OnceLock::new();
    CELL.get_or_init(|| {
        let s30 = 30.0f64.sqrt();
        let x_in = ((3.0 - 2.0 * (6.0f64 / 5.0).sqrt()) / 7.0).sqrt();
        let x_out = ((3.0 + 2.0 * (6.0f64 / 5.0).sqrt()) / 7.0).sqrt();
        let c = [
            0.5 * (1.0 - x_out),
            0.5 * (1.0 - x_in),
            0.5 * (1.0 + x_in),
            0.5 * (1.0 + x_out),
        ];
        let w_out = (18.0 - s30) / 36.0;
        let w_in = (18.0 + s30) / 36.0;
        let b = [w_out / 2.0, w_in / 2.0, w_in / 2.0, w_out / 2.0];
        // collocation: sum_j a_ij c_j^q = c_i^{q+1}/(q+1), q = 0..3
        let mut a = [[0.0; 4]; 4];
        for i in 0..4 {
            let mut m = [[0.0f64; 5]; 4];
            for (j, row) in m.iter_mut().enumerate() {
                // row j is equation q = j over unknowns a_i*
                for (k, ck) in c.iter().enumerate() {
                    row[k] = ck.powi(j as i32);
                }
                row[4] = c[i].powi(j as i32 + 1) / (j as f64 + 1.0);
            }
            solve4(&mut m);
            for j in 0..4 {
                a[i][j] = m[j][4];
            }
        }
        Gl4 { c, b, a }
    })
}

// Gaussian elimination on a 4x5 augmented system, partial pivoting.
fn solve4(m: &mut [[f64; 5]; 4]) {
    for col in 0..4 {
        let mut piv = col;
        for r in col + 1..4 {
            if m[r][col].abs() > m[piv][col].abs() {
                piv = r;
            }
        }
        m.swap(col, piv);
        for r in 0..4 {
            if r != col {
                let f = m[r][col] / m[col][col];
                for k in col..5 {
                    m[r][k] -= f * m[col][k];
                }
            }
        }
    }
    for r in 0..4 {
        m[r][4] /= m[r][r];
    }
}

/// One implicit Gauss-4 step for y'' = w(x) y, state (y, y'). The stage
/// equations are linear, so they are solved exactly by an 8x8 elimination.
fn gl4_step<W: Fn(f64) -> f64>(w: &W, x: f64, h: f64, y: [f64; 2]) -> [f64; 2] {
    let tab = gl4();
    let wv: Vec<f64> = tab.c.iter().map(|ci| w(x + ci * h)).collect();
    // unknowns u = (K1x, K1y, ..., K4x, K4y)
    let mut m = [[0.0f64; 9]; 8];
    for i in 0..4 {
        let rx = 2 * i;
        let ry = 2 * i + 1;
        m[rx][rx] += 1.0;
        m[ry][ry] += 1.0;
        for j in 0..4 {
            m[rx][2 * j + 1] -= h * tab.a[i][j];
            m[ry][2 * j] -= h * wv[i] * tab.a[i][j];
        }
        m[rx][8] = y[1];
        m[ry][8] = wv[i] * y[0];
    }
    solve8(&mut m);
    let mut out = y;
    for i in 0..4 {
        out[0] += h * tab.b[i] * m[2 * i][8];
        out[1] += h * tab.b[i] * m[2 * i + 1][8];
    }
    out
}

fn solve8(m: &mut [[f64; 9]; 8]) {
    for col in 0..8 {
        let mut piv = col;
        for r in col + 1..8 {
            if m[r][col].abs() > m[piv][col].abs() {
                piv = r;
            }
        }
        m.swap(col, piv);
        let d = m[col][col];
        for r in 0..8 {
            if r != col && m[r][col] != 0.0 {
                let f = m[r][col] / d;
                for k in col..9 {
                    m[r][k] -= f * m[col][k];
                }
            }
        }
    }
    for r in 0..8 {
        m[r][8] /= m[r][r];
    }
}

const RTOL: f64 = 1e-10;
const MAX_STEPS: usize = 400_000;

/// Adaptive integration of y'' = w(x) y from x0 to x1 (x1 > x0), recording
/// the state at every requested sample point along the way. Error control
/// by step doubling on the order-8 scheme.
fn integrate_sampled<W: Fn(f64) -> f64>(
    w: &W,
    x0: f64,
    x1: f64,
    y0: [f64; 2],
    samples: &[f64],
    out: &mut Vec<[f64; 2]>,
) -> Result<[f64; 2], ModesError> {
    let mut x = x0;
    let mut y = y0;
    let mut h = (x1 - x0) / 64.0;
    let mut next_sample = 0usize;
    out.clear();
    let mut steps = 0usize;
    while x < x1 - 1e-14 * (x1 - x0).abs() {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(ModesError::ShootingDiverged(format!(
                "step budget exhausted at x = {x}"
            )));
        }
        let mut target = x1;
        if next_sample < samples.len() {
            target = target.min(samples[next_sample]);
        }
        if target <= x + 1e-15 {
            // sample point coincides with current x
            out.push(y);
            next_sample += 1;
            continue;
        }
        let mut hh = h.min(target - x);
        loop {
            let big = gl4_step(w, x, hh, y);
            let half = gl4_step(w, x, hh / 2.0, y);
            let two = gl4_step(w, x + hh / 2.0, hh / 2.0, half);
            let scale = two[0].abs() + two[1].abs() + y[0].abs() + y[1].abs() + 1e-280;
            let err = ((big[0] - two[0]).abs() + (big[1] - two[1]).abs()) / scale;
            if !err.is_finite() {
                return Err(ModesError::ShootingDiverged(format!(
                    "non-finite state at x = {x}"
                )));
            }
            if err <= RTOL {
                x += hh;
                y = two;
                let grow = if err > 0.0 {
                    0.9 * (RTOL / err).powf(1.0 / 9.0)
                } else {
                    2.0
                };
                h = (hh * grow.clamp(0.5, 2.0)).min((x1 - x0) / 8.0);
                break;
            }
            hh *= (0.9 * (RTOL / err).powf(1.0 / 9.0)).clamp(0.1, 0.7);
            if hh < 1e-13 * (x1 - x0) {
                return Err(ModesError::ShootingDiverged(format!(
                    "step underflow at x = {x}"
                )));
            }
        }
        while next_sample < samples.len() && samples[next_sample] <= x + 1e-14 {
            out.push(y);
            next_sample += 1;
        }
    }
    while next_sample < samples.len() {
        out.push(y);
        next_sample += 1;
    }
    Ok(y)
}

/// Sign changes of y over the sampled interior points.
fn count_zeros(values: &[[f64; 2]]) -> usize {
    let mut zeros = 0;
    for w in values.windows(2) {
        if w[0][0] != 0.0 && w[0][0].signum() != w[1][0].signum() {
            zeros += 1;
        }
    }
    zeros
}

#[derive(Clone, Copy)]
struct AngularClass {
    parity: Parity,
    m: u32,
}

impl AngularClass {
    fn initial(&self) -> [f64; 2] {
        match self.parity {
            Parity::Cos => [1.0, 0.0],
            Parity::Sin => [0.0, 1.0],
        }
    }
    /// true when the class is even about pi/2 (condition G'(pi/2) = 0)
    fn even_about_half(&self) -> bool {
        match self.parity {
            Parity::Cos => self.m % 2 == 0,
            Parity::Sin => self.m % 2 == 1,
        }
    }
    fn index(&self) -> usize {
        match self.parity {
            Parity::Cos => (self.m / 2) as usize,
            Parity::Sin => ((self.m - 1) / 2) as usize,
        }
    }
}

/// Angular shooting score at separation constant h; also returns the
/// interior zero count of G on (0, pi/2) for Sturm indexing.
fn angular_score(c2: f64, h: f64, class: AngularClass) -> Result<(f64, usize), ModesError> {
    let w = move |phi: f64| c2 * phi.cos() * phi.cos() - h;
    let ns = (4 * class.index() + 24).max(24);
    let grid: Vec<f64> = (1..ns)
        .map(|j| std::f64::consts::FRAC_PI_2 * j as f64 / ns as f64)
        .collect();
    let mut vals = Vec::new();
    let end = integrate_sampled(&w, 0.0, std::f64::consts::FRAC_PI_2, class.initial(), &grid, &mut vals)?;
    let score = if class.even_about_half() { end[1] } else { end[0] };
    Ok((score, count_zeros(&vals)))
}

/// Separation constant for the angular class at parameter c^2: the
/// class-index-th root of the quarter-interval condition, located by scan
/// plus bisection and confirmed by its Sturm zero count.
fn solve_angular(c2: f64, class: AngularClass, seed: Option<f64>) -> Result<f64, ModesError> {
    let severity = |h: f64| -> Result<f64, ModesError> { Ok(angular_score(c2, h, class)?.0) };
    let target = class.index();
    // fast path: polish a previous value
    if let Some(h0) = seed {
        let half = 0.5 + 0.02 * h0.abs();
        if let Some(root) = bracket_and_bisect(&severity, h0 - half, h0 + half, 24)? {
            let (_, zeros) = angular_score(c2, root, class)?;
            if zeros == target {
                return Ok(root);
            }
        }
    }
    let cap = (2.0 * class.m as f64 + 8.0).powi(2) + c2;
    let mut step = 1.0;
    for _ in 0..3 {
        let mut h = -1.0;
        let mut found = 0usize;
        let mut prev = severity(h)?;
        while h < cap {
            let h2 = h + step;
            let cur = severity(h2)?;
            // a scan point may land exactly on a root (c = 0 does)
            let crossing = cur == 0.0 || (prev != 0.0 && prev.signum() != cur.signum());
            if crossing {
                if found == target {
                    let root = if cur == 0.0 {
                        h2
                    } else {
                        bisect_fn(&severity, h, h2)?
                    };
                    let (_, zeros) = angular_score(c2, root, class)?;
                    if zeros == target {
                        return Ok(root);
                    }
                    break; // mis-indexed: rescan finer
                }
                found += 1;
            }
            h = h2;
            prev = cur;
        }
        step /= 4.0;
    }
    Err(ModesError::IndexNotFound(format!(
        "angular class (parity {:?}, m = {}) at c^2 = {c2}",
        class.parity, class.m
    )))
}

fn bracket_and_bisect(
    f: &dyn Fn(f64) -> Result<f64, ModesError>,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<Option<f64>, ModesError> {
    let mut prev_x = lo;
    let mut prev = f(lo)?;
    for j in 1..=n {
        let x = lo + (hi - lo) * j as f64 / n as f64;
        let cur = f(x)?;
        if prev != 0.0 && prev.signum() != cur.signum() {
            return Ok(Some(bisect_fn(f, prev_x, x)?));
        }
        prev_x = x;
        prev = cur;
    }
    Ok(None)
}

fn bisect_fn(
    f: &dyn Fn(f64) -> Result<f64, ModesError>,
    mut a: f64,
    mut b: f64,
) -> Result<f64, ModesError> {
    let mut fa = f(a)?;
    for _ in 0..80 {
        let mid = 0.5 * (a + b);
        if (b - a).abs() < 1e-12 * mid.abs().max(1.0) {
            return Ok(mid);
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fa.signum() != fm.signum() {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    Ok(0.5 * (a + b))
}

#[derive(Clone, Copy)]
struct RadialShot {
    score: f64,
    zeros: usize,
    h: f64,
}

/// Radial shot at frequency lambda: solves the angular problem for h(c),
/// integrates F out to rho_max and scores the boundary condition.
fn radial_shot(
    a: f64,
    lambda: f64,
    class: AngularClass,
    bc: BoundaryCondition,
    n_hint: u32,
    h_seed: Option<f64>,
) -> Result<RadialShot, ModesError> {
    let c2 = (a * lambda) * (a * lambda);
    let h = solve_angular(c2, class, h_seed)?;
    let rho_max = (1.0 / a).acosh();
    let w = move |rho: f64| {
        let ch = rho.cosh();
        h - c2 * ch * ch
    };
    let y0 = class.initial(); // even class: F'(0)=0; odd: F(0)=0
    let ns = (16 * n_hint as usize + 32).max(48);
    let grid: Vec<f64> = (1..ns).map(|j| rho_max * j as f64 / ns as f64).collect();
    let mut vals = Vec::new();
    let end = integrate_sampled(&w, 0.0, rho_max, y0, &grid, &mut vals)?;
    let score = match bc {
        BoundaryCondition::Neumann => end[1],
        BoundaryCondition::Dirichlet => end[0],
    };
    Ok(RadialShot {
        score,
        zeros: count_zeros(&vals),
        h,
    })
}

/// Eigenvalue near the guess: scans a window for a sign change of the
/// radial score whose converged root has the requested interior zero count,
/// then bisects to ~1e-11 relative.
fn radial_root_near(
    a: f64,
    guess: f64,
    class: AngularClass,
    bc: BoundaryCondition,
    n: u32,
    target_zeros: usize,
    h_seed: &mut Option<f64>,
) -> Result<(f64, f64), ModesError> {
    let mut width = 0.035 * guess.max(1.0);
    for _ in 0..3 {
        let lo = (guess - width).max(1e-3);
        let hi = guess + width;
        let steps = 25usize;
        let mut prev_lambda = lo;
        let mut prev = radial_shot(a, lo, class, bc, n, *h_seed)?;
        *h_seed = Some(prev.h);
        for j in 1..=steps {
            let lam = lo + (hi - lo) * j as f64 / steps as f64;
            let cur = radial_shot(a, lam, class, bc, n, *h_seed)?;
            *h_seed = Some(cur.h);
            if prev.score != 0.0 && prev.score.signum() != cur.score.signum() {
                // bisect in lambda
                let mut x0 = prev_lambda;
                let mut x1 = lam;
                let mut f0 = prev.score;
                let mut last = cur;
                for _ in 0..80 {
                    let mid = 0.5 * (x0 + x1);
                    if (x1 - x0) < 1e-11 * mid {
                        break;
                    }
                    let shot = radial_shot(a, mid, class, bc, n, *h_seed)?;
                    *h_seed = Some(shot.h);
                    if f0.signum() != shot.score.signum() {
                        x1 = mid;
                    } else {
                        x0 = mid;
                        f0 = shot.score;
                    }
                    last = shot;
                }
                let root = 0.5 * (x0 + x1);
                if last.zeros == target_zeros {
                    return Ok((root, last.h));
                }
            }
            prev_lambda = lam;
            prev = cur;
        }
        width *= 2.0;
    }
    Err(ModesError::IndexNotFound(format!(
        "radial root near lambda = {guess} (a = {a}, n = {n})"
    )))
}

/// Ellipse eigenmode for eccentricity parameter a in (0, 1), indices
/// (m <= 40, n <= 40), located by continuation from the circle limit in ten
/// eccentricity steps. The boundary trace is sampled from the angular
/// factor (Neumann) or the scaled normal derivative (Dirichlet) and
/// normalized on the boundary ellipse.
pub fn ellipse_mode(
    a: f64,
    m: u32,
    n: u32,
    bc: BoundaryCondition,
    parity: Parity,
) -> Result<EigenMode, ModesError> {
    if !(a > 0.0 && a < 1.0) {
        return Err(ModesError::BadIndex(format!("eccentricity parameter a = {a} outside (0,1)")));
    }
    if m > 40 || n == 0 || n > 40 {
        return Err(ModesError::BadIndex(format!("indices (m, n) = ({m}, {n}) outside m <= 40, 1 <= n <= 40")));
    }
    if m == 0 && parity == Parity::Sin {
        return Err(ModesError::BadIndex("sin parity vanishes at m = 0".into()));
    }
    let class = AngularClass { parity, m };
    let kind = match bc {
        BoundaryCondition::Neumann => RootKind::Critical,
        BoundaryCondition::Dirichlet => RootKind::Zero,
    };
    // circle-limit seed, continued in eccentricity. With the convention
    // that j'_{0,1} is the first positive critical point, the radial factor
    // of the (0, n) Neumann disc mode has n interior zeros; all other
    // families have n - 1.
    let mut lambda = real_bessel::bessel_root(m, n, kind)?.value;
    let target_zeros = if m == 0 && bc == BoundaryCondition::Neumann {
        n as usize
    } else {
        (n - 1) as usize
    };
    let mut h_seed = None;
    let mut h_final = 0.0;
    for step in 1..=10 {
        let a_step = a * step as f64 / 10.0;
        let (root, h) = radial_root_near(a_step, lambda, class, bc, n, target_zeros, &mut h_seed)?;
        lambda = root;
        h_final = h;
    }

    // residuals of both shooting conditions at the converged parameters
    let c2 = (a * lambda) * (a * lambda);
    let (ang_res, _) = angular_score(c2, h_final, class)?;
    let shot = radial_shot(a, lambda, class, bc, n, Some(h_final))?;
    let scale = lambda.max(1.0);
    if ang_res.abs() > 1e-8 * scale || shot.score.abs() > 1e-8 * scale {
        return Err(ModesError::ShootingDiverged(format!(
            "boundary residuals too large: angular {ang_res:.2e}, radial {:.2e}",
            shot.score
        )));
    }

    // sample the angular factor on a quarter period and unfold by parity
    let mut nsamp = default_samples(lambda);
    nsamp = nsamp.div_ceil(4) * 4;
    let quarter = nsamp / 4;
    let w_ang = move |phi: f64| c2 * phi.cos() * phi.cos() - h_final;
    let grid: Vec<f64> = (1..=quarter)
        .map(|j| std::f64::consts::FRAC_PI_2 * j as f64 / quarter as f64)
        .collect();
    let mut vals = Vec::new();
    integrate_sampled(&w_ang, 0.0, std::f64::consts::FRAC_PI_2, class.initial(), &grid, &mut vals)?;
    let mut g_quarter: Vec<f64> = Vec::with_capacity(quarter + 1);
    g_quarter.push(class.initial()[0]);
    g_quarter.extend(vals.iter().map(|v| v[0]));

    let eta_half = if class.even_about_half() { 1.0 } else { -1.0 };
    let eta_zero = match parity {
        Parity::Cos => 1.0,
        Parity::Sin => -1.0,
    };
    let mut g_full = vec![0.0f64; nsamp];
    for (j, slot) in g_full.iter_mut().enumerate().take(nsamp / 2 + 1) {
        *slot = if j <= quarter {
            g_quarter[j]
        } else {
            eta_half * g_quarter[nsamp / 2 - j]
        };
    }
    for j in nsamp / 2 + 1..nsamp {
        g_full[j] = eta_zero * g_full[nsamp - j];
    }

    let b_axis = (1.0 - a * a).sqrt();
    let samples: Vec<f64> = match bc {
        BoundaryCondition::Neumann => g_full,
        BoundaryCondition::Dirichlet => {
            // normal derivative picks up the metric factor 1/h_rho
            let rho_max = (1.0 / a).acosh();
            let ch2 = rho_max.cosh().powi(2);
            g_full
                .iter()
                .enumerate()
                .map(|(j, g)| {
                    let phi = 2.0 * std::f64::consts::PI * j as f64 / nsamp as f64;
                    g / (a * (ch2 - phi.cos().powi(2)).sqrt())
                })
                .collect()
        }
    };

    let mut mode = EigenMode {
        lambda,
        bc,
        trace: Trace::from_samples(&samples),
        kind: ModeKind::Ellipse { ecc: a, parity },
        m,
        n,
    };
    let boundary = AnalyticCurve::ellipse(b_axis)
        .map_err(|e| ModesError::ShootingDiverged(format!("boundary curve: {e}")))?;
    mode.normalize_on(&boundary)?;
    Ok(mode)
}
