//! Quadrature building blocks: periodic trapezoid (spectral for analytic
//! periodic integrands), Gauss-Legendre rules with cached nodes, and graded
//! panel meshes refined geometrically toward near-singular parameter points.

use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Periodic trapezoid rule for `int_0^{2 pi} f(s) ds` with n nodes.
pub fn trapezoid_periodic<F: FnMut(f64) -> Complex64>(n: usize, mut f: F) -> Complex64 {
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        acc += f(j as f64 * h);
    }
    acc * h
}

/// Gauss-Legendre nodes and weights on [-1, 1], computed once by Newton
/// iteration on the Legendre recurrence and cached per order.
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("gauss cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(compute_gauss_legendre(n)))
        .clone()
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(z) by upward recurrence
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// One integration panel [a, b].
#[derive(Debug, Clone, Copy)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
}

/// Panels covering [a, b] whose widths grow geometrically away from the
/// grading point x0 (clamped into the interval): the panel touching x0 has
/// width ~min_w and widths double up to max_w. Near-singular integrands with
/// length scale min_w at x0 are resolved at fixed Gauss order per panel.
pub fn graded_panels(a: f64, b: f64, x0: f64, min_w: f64, max_w: f64) -> Vec<Panel> {
    assert!(b > a && min_w > 0.0 && max_w >= min_w);
    let x0 = x0.clamp(a, b);
    let mut panels = Vec::new();
    // left of x0, built rightward then reversed
    let mut left = Vec::new();
    let mut pos = x0;
    let mut w = min_w;
    while pos > a + 1e-300 {
        let nxt = (pos - w).max(a);
        left.push(Panel { a: nxt, b: pos });
        pos = nxt;
        w = (w * 2.0).min(max_w);
    }
    left.reverse();
    panels.extend(left);
    let mut pos = x0;
    let mut w = min_w;
    while pos < b - 1e-300 {
        let nxt = (pos + w).min(b);
        panels.push(Panel { a: pos, b: nxt });
        pos = nxt;
        w = (w * 2.0).min(max_w);
    }
    panels
}

/// Gauss-Legendre integration of f over a panel list.
pub fn integrate_panels<F: FnMut(f64) -> Complex64>(
    panels: &[Panel],
    order: usize,
    mut f: F,
) -> Complex64 {
    let rule = gauss_legendre(order);
    let (nodes, weights) = (&rule.0, &rule.1);
    let mut total = Complex64::new(0.0, 0.0);
    for p in panels {
        let mid = 0.5 * (p.a + p.b);
        let half = 0.5 * (p.b - p.a);
        let mut panel_acc = Complex64::new(0.0, 0.0);
        for (x, w) in nodes.iter().zip(weights) {
            panel_acc += *w * f(mid + half * x);
        }
        total += panel_acc * half;
    }
    total
}

/// All Gauss nodes of a panel mesh with their final weights, for callers
/// that evaluate several integrands on one shared mesh.
pub fn panel_nodes(panels: &[Panel], order: usize) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(order);
    let (nodes, weights) = (&rule.0, &rule.1);
    let mut out = Vec::with_capacity(panels.len() * order);
    for p in panels {
        let mid = 0.5 * (p.a + p.b);
        let half = 0.5 * (p.b - p.a);
        for (x, w) in nodes.iter().zip(weights) {
            out.push((mid + half * x, w * half));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for &n in &[2usize, 8, 16, 24] {
            let rule = gauss_legendre(n);
            // int_{-1}^1 x^{2n-2} dx = 2/(2n-1), the highest exact power
            let p = 2 * n - 2;
            let got: f64 = rule
                .0
                .iter()
                .zip(&rule.1)
                .map(|(x, w)| w * x.powi(p as i32))
                .sum();
            let expect = 2.0 / (p as f64 + 1.0);
            assert!((got - expect).abs() < 1e-13, "order {n}: {got} vs {expect}");
        }
    }

    #[test]
    fn trapezoid_is_spectral_on_periodic_analytic() {
        let exact = 2.0 * PI * f64::exp(1.0) * 0.0 + 2.0 * PI * bessel_i0(1.0);
        // int_0^{2pi} e^{cos s} ds = 2 pi I0(1)
        let got = trapezoid_periodic(32, |s| Complex64::new(s.cos().exp(), 0.0));
        assert!((got.re - exact).abs() < 1e-12);
    }

    fn bessel_i0(x: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..30 {
            term *= x * x / (4.0 * (k * k) as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn graded_panels_cover_interval() {
        let panels = graded_panels(0.0, 2.0 * PI, 1.3, 1e-4, 0.5);
        let mut pos = 0.0;
        for p in &panels {
            assert!((p.a - pos).abs() < 1e-12);
            assert!(p.b > p.a);
            pos = p.b;
        }
        assert!((pos - 2.0 * PI).abs() < 1e-12);
        // smallest panels sit at the grading point
        let smallest = panels
            .iter()
            .min_by(|p, q| (p.b - p.a).partial_cmp(&(q.b - q.a)).unwrap())
            .unwrap();
        assert!(smallest.a <= 1.3 && smallest.b >= 1.3 - 2e-4);
    }

    #[test]
    fn panels_resolve_near_singularity() {
        // int_0^1 x0.../ (x^2 + eps^2) style spike around x0
        let eps = 1e-3;
        let x0 = 0.4;
        let panels = graded_panels(0.0, 1.0, x0, eps / 4.0, 0.25);
        let got = integrate_panels(&panels, 16, |x| {
            Complex64::new(eps / ((x - x0) * (x - x0) + eps * eps), 0.0)
        });
        // exact: atan((1-x0)/eps) + atan(x0/eps)
        let exact = ((1.0 - x0) / eps).atan() + (x0 / eps).atan();
        assert!((got.re - exact).abs() < 1e-10, "{} vs {exact}", got.re);
    }

    #[test]
    fn panel_nodes_match_integrate() {
        let panels = graded_panels(0.0, 1.0, 0.2, 1e-3, 0.3);
        let f = |x: f64| Complex64::new((3.0 * x).sin(), x);
        let a = integrate_panels(&panels, 16, f);
        let nodes = panel_nodes(&panels, 16);
        let b: Complex64 = nodes.iter().map(|&(x, w)| w * f(x)).sum();
        assert!((a - b).norm() < 1e-14);
    }
}
