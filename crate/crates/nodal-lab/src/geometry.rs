//! Closed real-analytic plane curves as truncated complex Fourier series,
//! their holomorphic complexification, and the complexified squared distance
//! together with the normal-derivative kernel factors.
//!
//! The plane is identified with the complex numbers. A curve is
//! `q(s) = sum_{k=-K}^{K} c_k e^{iks}` with period 2*pi; `q` extends
//! holomorphically to the strip `[0, 2 pi] + i [-margin, margin]`, and the
//! conjugate parametrization extends as `q*(t) = sum conj(c_k) e^{-ikt}`,
//! which restricts to `conj(q)` on the real axis. The complexified squared
//! distance is `r^2(s, t) = (q(s) - q(t)) (q*(s) - q*(t))`.

use num_complex::Complex64;

/// Cap applied to the analyticity half-width when coefficients terminate
/// exactly (entire parametrizations such as circles and ellipses).
const MARGIN_CAP: f64 = 2.0;

/// Sampling resolution for the construction-time immersion/simplicity checks.
const VALIDATION_SAMPLES: usize = 512;

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("parameter {t} leaves the analyticity tube (|Im t| > {margin})")]
    OutOfTube { t: Complex64, margin: f64 },
    #[error("coincident parameters: kernel denominator vanishes at s = {s}, t = {t}")]
    DiagonalSingularity { s: f64, t: Complex64 },
    #[error("Re r^2 = {re} below the prescribed floor {floor}; principal square root unsafe")]
    BranchUnsafe { re: f64, floor: f64 },
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("curve file: {0}")]
    ParseError(String),
}

/// Closed analytic curve stored as Fourier coefficients c_k, k in [-K, K].
#[derive(Debug, Clone)]
pub struct AnalyticCurve {
    /// Coefficient slab; index i holds c_{i - k_max}.
    coeffs: Vec<Complex64>,
    k_max: i64,
    margin: f64,
    arc_length_flag: bool,
    length: f64,
}

impl AnalyticCurve {
    /// Builds and validates a curve from centered coefficients
    /// (`coeffs[i]` is c_{i - K} for `coeffs.len() = 2K + 1`).
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self, GeometryError> {
        if coeffs.len() % 2 == 0 || coeffs.is_empty() {
            return Err(GeometryError::InvalidCurve(
                "coefficient list must have odd length 2K+1".into(),
            ));
        }
        let k_max = (coeffs.len() / 2) as i64;
        let max_mag = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if max_mag == 0.0 {
            return Err(GeometryError::InvalidCurve("all coefficients vanish".into()));
        }
        let edge = coeffs[0].norm().max(coeffs[coeffs.len() - 1].norm());
        if k_max >= 1 && edge > 1e-12 * max_mag {
            return Err(GeometryError::InvalidCurve(format!(
                "outermost coefficient {:.3e} exceeds 1e-12 of the largest ({:.3e}); \
                 truncation is not faithful to an analytic curve",
                edge, max_mag
            )));
        }
        let mut curve = AnalyticCurve {
            coeffs,
            k_max,
            margin: 0.0,
            arc_length_flag: false,
            length: 0.0,
        };
        curve.margin = curve.estimate_margin();
        curve.validate_immersed_and_simple()?;
        let (len, flat) = curve.measure_length();
        curve.length = len;
        curve.arc_length_flag = flat;
        Ok(curve)
    }

    /// Circle of the given radius about the origin (counterclockwise).
    pub fn circle(radius: f64) -> Self {
        // pad one zero ring so the decay invariant is satisfied exactly
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 5];
        coeffs[3] = Complex64::new(radius, 0.0); // c_1
        AnalyticCurve::new(coeffs).expect("circle is a valid curve")
    }

    /// Ellipse with semi-axes 1 and b in (0, 1]:
    /// q(s) = cos s + i b sin s, i.e. c_1 = (1+b)/2, c_{-1} = (1-b)/2.
    pub fn ellipse(b: f64) -> Result<Self, GeometryError> {
        if !(b > 0.0 && b <= 1.0) {
            return Err(GeometryError::InvalidCurve(format!(
                "ellipse semi-minor axis {b} outside (0, 1]"
            )));
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 5];
        coeffs[3] = Complex64::new((1.0 + b) / 2.0, 0.0);
        coeffs[1] = Complex64::new((1.0 - b) / 2.0, 0.0);
        AnalyticCurve::new(coeffs)
    }

    /// Same curve with the parameter origin rotated by s0:
    /// eval_q(rotated, t) = eval_q(original, t + s0).
    pub fn rotated(&self, s0: f64) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (i, c) in coeffs.iter_mut().enumerate() {
            let k = i as i64 - self.k_max;
            *c *= Complex64::new(0.0, k as f64 * s0).exp();
        }
        AnalyticCurve {
            coeffs,
            ..self.clone()
        }
    }

    pub fn k_max(&self) -> i64 {
        self.k_max
    }

    pub fn coefficient(&self, k: i64) -> Complex64 {
        if k.abs() > self.k_max {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.k_max) as usize]
        }
    }

    /// Analyticity half-width estimate from the coefficient decay slope.
    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// Arclength of one period.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Whether |q'| is constant (arclength parametrization).
    pub fn arc_length_flag(&self) -> bool {
        self.arc_length_flag
    }

    fn estimate_margin(&self) -> f64 {
        // least squares on ln max(|c_k|, |c_-k|) against k
        let max_mag = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut pts: Vec<(f64, f64)> = Vec::new();
        for k in 1..=self.k_max {
            let m = self.coefficient(k).norm().max(self.coefficient(-k).norm());
            if m > 1e-280 * max_mag {
                pts.push((k as f64, (m / max_mag).ln()));
            }
        }
        if pts.len() < 2 {
            return MARGIN_CAP;
        }
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        if !slope.is_finite() || slope >= 0.0 {
            return MARGIN_CAP;
        }
        (-slope).min(MARGIN_CAP)
    }

    fn validate_immersed_and_simple(&self) -> Result<(), GeometryError> {
        let n = VALIDATION_SAMPLES;
        let scale = self.coeffs.iter().map(|c| c.norm()).sum::<f64>();
        let pts: Vec<Complex64> = (0..n)
            .map(|i| self.q_real(2.0 * std::f64::consts::PI * i as f64 / n as f64))
            .collect();
        for i in 0..n {
            let s = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            if self.q_prime(Complex64::new(s, 0.0)).norm() < 1e-9 * scale {
                return Err(GeometryError::InvalidCurve(format!(
                    "immersion fails near s = {s}: |q'| ~ 0"
                )));
            }
        }
        // simplicity heuristic: the 512-gon must be a simple polygon
        let seg = |i: usize| (pts[i], pts[(i + 1) % n]);
        for i in 0..n {
            let (a1, a2) = seg(i);
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (b1, b2) = seg(j);
                if segments_cross(a1, a2, b1, b2) {
                    return Err(GeometryError::InvalidCurve(format!(
                        "sampled polygon self-intersects between segments {i} and {j}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn measure_length(&self) -> (f64, bool) {
        let n = 1024;
        let mut len = 0.0;
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..n {
            let s = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let speed = self.q_prime(Complex64::new(s, 0.0)).norm();
            len += speed;
            lo = lo.min(speed);
            hi = hi.max(speed);
        }
        len *= 2.0 * std::f64::consts::PI / n as f64;
        (len, (hi - lo) <= 1e-10 * hi)
    }

    fn tube_check(&self, t: Complex64) -> Result<(), GeometryError> {
        if t.im.abs() > self.margin {
            return Err(GeometryError::OutOfTube {
                t,
                margin: self.margin,
            });
        }
        Ok(())
    }

    #[inline]
    fn q_real(&self, s: f64) -> Complex64 {
        self.q(Complex64::new(s, 0.0))
    }

    /// q^C(t) = sum c_k e^{ikt}, no tube check (internal hot path).
    #[inline]
    pub(crate) fn q(&self, t: Complex64) -> Complex64 {
        // Horner in e^{it} for k >= 0 and e^{-it} for k < 0.
        let ep = (Complex64::i() * t).exp();
        let em = Complex64::new(1.0, 0.0) / ep;
        let mut pos = Complex64::new(0.0, 0.0);
        for k in (1..=self.k_max).rev() {
            pos = (pos + self.coefficient(k)) * ep;
        }
        let mut neg = Complex64::new(0.0, 0.0);
        for k in (1..=self.k_max).rev() {
            neg = (neg + self.coefficient(-k)) * em;
        }
        pos + neg + self.coefficient(0)
    }

    /// q'(t) = sum ik c_k e^{ikt}.
    #[inline]
    pub(crate) fn q_prime(&self, t: Complex64) -> Complex64 {
        let ep = (Complex64::i() * t).exp();
        let em = Complex64::new(1.0, 0.0) / ep;
        let mut pos = Complex64::new(0.0, 0.0);
        for k in (1..=self.k_max).rev() {
            pos = (pos + Complex64::new(0.0, k as f64) * self.coefficient(k)) * ep;
        }
        let mut neg = Complex64::new(0.0, 0.0);
        for k in (1..=self.k_max).rev() {
            neg = (neg + Complex64::new(0.0, -k as f64) * self.coefficient(-k)) * em;
        }
        pos + neg
    }

    /// q*(t) = sum conj(c_k) e^{-ikt}; equals conj(q(t)) for real t.
    #[inline]
    pub(crate) fn qstar(&self, t: Complex64) -> Complex64 {
        let em = (-Complex64::i() * t).exp();
        let ep = Complex64::new(1.0, 0.0) / em;
        let mut pos = Complex64::new(0.0, 0.0);
        for k in (1..=self.k_max).rev() {
            pos = (pos + self.coefficient(k).conj()) * em;
        }
        let mut neg = Complex64::new(0.0, 0.0);
        for k in (1..=self.k_max).rev() {
            neg = (neg + self.coefficient(-k).conj()) * ep;
        }
        pos + neg + self.coefficient(0).conj()
    }

    /// d/dt q*(t) = sum -ik conj(c_k) e^{-ikt}.
    #[inline]
    pub(crate) fn qstar_prime(&self, t: Complex64) -> Complex64 {
        let em = (-Complex64::i() * t).exp();
        let ep = Complex64::new(1.0, 0.0) / em;
        let mut pos = Complex64::new(0.0, 0.0);
        for k in (1..=self.k_max).rev() {
            pos = (pos + Complex64::new(0.0, -k as f64) * self.coefficient(k).conj()) * em;
        }
        let mut neg = Complex64::new(0.0, 0.0);
        for k in (1..=self.k_max).rev() {
            neg = (neg + Complex64::new(0.0, k as f64) * self.coefficient(-k).conj()) * ep;
        }
        pos + neg
    }

    /// Holomorphic parametrization with tube validation.
    pub fn eval_q(&self, t: Complex64) -> Result<Complex64, GeometryError> {
        self.tube_check(t)?;
        Ok(self.q(t))
    }

    /// Holomorphic extension of the conjugate parametrization.
    pub fn eval_qstar(&self, t: Complex64) -> Result<Complex64, GeometryError> {
        self.tube_check(t)?;
        Ok(self.qstar(t))
    }

    pub fn eval_q_prime(&self, t: Complex64) -> Result<Complex64, GeometryError> {
        self.tube_check(t)?;
        Ok(self.q_prime(t))
    }

    /// r^2(s, t) = (q(s) - q(t)) (q*(s) - q*(t)); real and >= 0 for real
    /// parameters.
    pub fn r_squared(&self, s: Complex64, t: Complex64) -> Result<Complex64, GeometryError> {
        self.tube_check(s)?;
        self.tube_check(t)?;
        Ok(self.r_squared_raw(s, t))
    }

    #[inline]
    pub(crate) fn r_squared_raw(&self, s: Complex64, t: Complex64) -> Complex64 {
        (self.q(s) - self.q(t)) * (self.qstar(s) - self.qstar(t))
    }

    /// Principal square root of r^2, guarded by a positivity floor on its
    /// real part so the branch stays well-defined along paths.
    pub fn principal_r(
        &self,
        s: Complex64,
        t: Complex64,
        floor: f64,
    ) -> Result<Complex64, GeometryError> {
        let rsq = self.r_squared(s, t)?;
        if rsq.re < floor {
            return Err(GeometryError::BranchUnsafe { re: rsq.re, floor });
        }
        Ok(rsq.sqrt())
    }

    /// Normal derivative of log r at q(s) in the convention of the display
    ///
    ///   d/dn log r = (-i/2) [ q'(s)/(q(s)-q(t)) - conj(q)'(s)/(conj(q)(s)-q*(t)) ],
    ///
    /// the non-unit normal; for a counterclockwise curve this direction is
    /// the outward normal -i q'(s). `unit` divides by |q'(s)| for the
    /// unit-normal convention. The kernels of the layer potentials use the
    /// negated (interior) variant, pinned against the disc oracle.
    pub fn normal_log_derivative(
        &self,
        s: f64,
        t: Complex64,
        unit: bool,
    ) -> Result<Complex64, GeometryError> {
        self.tube_check(t)?;
        let sc = Complex64::new(s, 0.0);
        let scale = self.q_prime(sc).norm();
        let dq = self.q(sc) - self.q(t);
        let dqs = self.qstar(sc) - self.qstar(t);
        if dq.norm() < 1e-14 * scale.max(1.0) || dqs.norm() < 1e-14 * scale.max(1.0) {
            return Err(GeometryError::DiagonalSingularity { s, t });
        }
        let v = Complex64::new(0.0, -0.5)
            * (self.q_prime(sc) / dq - self.qstar_prime(sc) / dqs);
        Ok(if unit { v / scale } else { v })
    }

    /// Interior-normal d/dn log r at complex parameter s; equals minus the
    /// display convention above. The layer-potential kernels inline this
    /// combination; it is exposed for the orientation tests.
    #[inline]
    #[allow(dead_code)]
    pub(crate) fn dlogr_dn_interior(&self, s: Complex64, t: Complex64) -> Complex64 {
        Complex64::new(0.0, 0.5)
            * (self.q_prime(s) / (self.q(s) - self.q(t))
                - self.qstar_prime(s) / (self.qstar(s) - self.qstar(t)))
    }

    /// Writes the curve exchange format: first line K, then one line
    /// "k re(c_k) im(c_k)" per coefficient. Floats use the shortest
    /// round-trip representation, so read-back is exact.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.k_max);
        for k in -self.k_max..=self.k_max {
            let c = self.coefficient(k);
            out.push_str(&format!("{} {} {}\n", k, c.re, c.im));
        }
        out
    }

    /// Parses the exchange format produced by [`AnalyticCurve::to_text`].
    pub fn from_text(text: &str) -> Result<Self, GeometryError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let k_max: i64 = lines
            .next()
            .ok_or_else(|| GeometryError::ParseError("empty file".into()))?
            .trim()
            .parse()
            .map_err(|e| GeometryError::ParseError(format!("bad K line: {e}")))?;
        if k_max < 0 || k_max > 4096 {
            return Err(GeometryError::ParseError(format!("unreasonable K = {k_max}")));
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (2 * k_max + 1) as usize];
        let mut seen = 0usize;
        for line in lines {
            let mut it = line.split_whitespace();
            let k: i64 = it
                .next()
                .ok_or_else(|| GeometryError::ParseError("missing k".into()))?
                .parse()
                .map_err(|e| GeometryError::ParseError(format!("bad k: {e}")))?;
            let re: f64 = it
                .next()
                .ok_or_else(|| GeometryError::ParseError("missing re".into()))?
                .parse()
                .map_err(|e| GeometryError::ParseError(format!("bad re: {e}")))?;
            let im: f64 = it
                .next()
                .ok_or_else(|| GeometryError::ParseError("missing im".into()))?
                .parse()
                .map_err(|e| GeometryError::ParseError(format!("bad im: {e}")))?;
            if k.abs() > k_max {
                return Err(GeometryError::ParseError(format!("k = {k} exceeds K = {k_max}")));
            }
            coeffs[(k + k_max) as usize] = Complex64::new(re, im);
            seen += 1;
        }
        if seen != (2 * k_max + 1) as usize {
            return Err(GeometryError::ParseError(format!(
                "expected {} coefficient lines, found {seen}",
                2 * k_max + 1
            )));
        }
        AnalyticCurve::new(coeffs)
    }
}

/// Complexified parameter annulus A(eps) = { e^{-eps} < |e^{it}| < e^{eps} },
/// stored as the strip [0, 2 pi] + i [-eps, eps] over a concrete curve.
#[derive(Debug, Clone)]
pub struct AnnulusRegion {
    pub epsilon: f64,
    pub curve: AnalyticCurve,
}

impl AnnulusRegion {
    pub fn new(curve: AnalyticCurve, epsilon: f64) -> Result<Self, GeometryError> {
        if !(epsilon > 0.0) || epsilon >= curve.margin() {
            return Err(GeometryError::InvalidCurve(format!(
                "epsilon {epsilon} outside (0, margin = {})",
                curve.margin()
            )));
        }
        Ok(AnnulusRegion { epsilon, curve })
    }

    /// Default half-width: half of the estimated analyticity margin.
    pub fn with_default_epsilon(curve: AnalyticCurve) -> Self {
        let eps = curve.margin() / 2.0;
        AnnulusRegion {
            epsilon: eps,
            curve,
        }
    }
}

// orientation-based proper intersection test for the simplicity heuristic
fn segments_cross(a1: Complex64, a2: Complex64, b1: Complex64, b2: Complex64) -> bool {
    let orient = |p: Complex64, q: Complex64, r: Complex64| -> f64 {
        (q.re - p.re) * (r.im - p.im) - (q.im - p.im) * (r.re - p.re)
    };
    let d1 = orient(b1, b2, a1);
    let d2 = orient(b1, b2, a2);
    let d3 = orient(a1, a2, b1);
    let d4 = orient(a1, a2, b2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn circle_real_parameter() {
        let circle = AnalyticCurve::circle(1.0);
        for &th in &[0.0, 0.7, PI, 5.0] {
            let q = circle.eval_q(c(th, 0.0)).unwrap();
            assert!((q - c(th.cos(), th.sin())).norm() < 1e-15);
        }
    }

    #[test]
    fn circle_complex_parameter() {
        // q(theta + i xi) = e^{i theta - xi}
        let circle = AnalyticCurve::circle(1.0);
        let t = c(0.9, 0.3);
        let q = circle.eval_q(t).unwrap();
        let expect = (Complex64::i() * t).exp();
        assert!((q - expect).norm() < 1e-15);
        // q*(theta + i xi) = e^{-i theta + xi}
        let qs = circle.eval_qstar(t).unwrap();
        let expect_star = (-Complex64::i() * t).exp();
        assert!((qs - expect_star).norm() < 1e-15);
    }

    #[test]
    fn ellipse_matches_trigonometric_form() {
        let e = AnalyticCurve::ellipse(0.6).unwrap();
        for i in 0..16 {
            let s = 2.0 * PI * i as f64 / 16.0;
            let q = e.eval_q(c(s, 0.0)).unwrap();
            assert!((q - c(s.cos(), 0.6 * s.sin())).norm() < 1e-14);
        }
    }

    #[test]
    fn qstar_conjugate_relations() {
        let e = AnalyticCurve::ellipse(0.35).unwrap();
        for i in 0..8 {
            let s = 2.0 * PI * i as f64 / 8.0;
            let qs = e.eval_qstar(c(s, 0.0)).unwrap();
            assert!((qs - e.eval_q(c(s, 0.0)).unwrap().conj()).norm() < 1e-14);
        }
        let t = c(0.3, 0.1);
        let lhs = e.eval_qstar(t.conj()).unwrap();
        let rhs = e.eval_q(t).unwrap().conj();
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn r_squared_circle_closed_form() {
        // 4 sin^2((theta - s + i xi)/2)
        let circle = AnalyticCurve::circle(1.0);
        let s = c(1.1, 0.0);
        let t = c(2.4, 0.07);
        let got = circle.r_squared(s, t).unwrap();
        let w = (t - s) / 2.0;
        let expect = 4.0 * w.sin() * w.sin();
        assert!((got - expect).norm() < 1e-12);
    }

    #[test]
    fn r_squared_real_locus() {
        let e = AnalyticCurve::ellipse(0.8).unwrap();
        let got = e.r_squared(c(0.4, 0.0), c(2.0, 0.0)).unwrap();
        assert!(got.im.abs() < 1e-13);
        assert!(got.re > 0.0);
        let zero = e.r_squared(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(zero.norm() < 1e-28);
    }

    #[test]
    fn principal_r_squares_back() {
        let e = AnalyticCurve::ellipse(0.7).unwrap();
        for &(s, t) in &[(0.3, 2.0), (1.0, 4.5), (5.7, 2.2)] {
            let t = c(t, 0.08);
            let r = e.principal_r(c(s, 0.0), t, 1e-6).unwrap();
            let rsq = e.r_squared(c(s, 0.0), t).unwrap();
            assert!((r * r - rsq).norm() < 1e-13 * rsq.norm().max(1.0));
        }
    }

    #[test]
    fn principal_r_floor_guard() {
        let circle = AnalyticCurve::circle(1.0);
        let err = circle.principal_r(c(1.0, 0.0), c(1.0 + 1e-8, 0.0), 0.5);
        assert!(matches!(err, Err(GeometryError::BranchUnsafe { .. })));
    }

    #[test]
    fn interior_curve_distance_floor() {
        // C = circle radius 1/2 inside the unit circle: min Re r^2 > 0.2
        // over real s, |Im t| <= 0.1
        let boundary = AnalyticCurve::circle(1.0);
        let inner = AnalyticCurve::circle(0.5);
        let mut min_re = f64::INFINITY;
        for i in 0..64 {
            let s = 2.0 * PI * i as f64 / 64.0;
            for j in 0..32 {
                let x = 2.0 * PI * j as f64 / 32.0;
                for &xi in &[-0.1, 0.0, 0.1] {
                    let z = inner.q(c(x, xi));
                    let zs = inner.qstar(c(x, xi));
                    let qb = boundary.q(c(s, 0.0));
                    let rsq = (qb - z) * (qb.conj() - zs);
                    min_re = min_re.min(rsq.re);
                }
            }
        }
        assert!(min_re > 0.2, "min Re r^2 = {min_re}");
    }

    #[test]
    fn normal_log_derivative_circle_display() {
        // (-i/2)[ i e^{is}/(e^{is} - e^{it}) + i e^{-is}/(e^{-is} - e^{-it}) ]
        let circle = AnalyticCurve::circle(1.0);
        let s = 0.8;
        let t = c(2.1, 0.05);
        let got = circle.normal_log_derivative(s, t, false).unwrap();
        let es = c(0.0, s).exp();
        let et = (Complex64::i() * t).exp();
        let expect = c(0.0, -0.5)
            * (Complex64::i() * es / (es - et)
                - (-Complex64::i() * es.inv()) / (es.inv() - et.inv()));
        assert!((got - expect).norm() < 1e-12);
    }

    #[test]
    fn cauchy_kernel_bounded_near_diagonal() {
        // q'(s)/(q(s)-q(t)) - 1/(s-t) stays bounded as s -> t (real)
        let e = AnalyticCurve::ellipse(0.75).unwrap();
        let t = 1.3;
        let mut prev = None;
        for &ds in &[1e-2, 1e-3, 1e-4, 1e-5] {
            let s = t + ds;
            let v = e.q_prime(c(s, 0.0)) / (e.q(c(s, 0.0)) - e.q(c(t, 0.0)))
                - 1.0 / c(s - t, 0.0);
            assert!(v.norm() < 10.0, "unbounded remainder {v}");
            if let Some(p) = prev {
                let diff: Complex64 = v - p;
                assert!(diff.norm() < 0.5);
            }
            prev = Some(v);
        }
    }

    #[test]
    fn normal_log_derivative_interior_sign_on_circle() {
        // interior variant at real parameters equals -1/2 on the unit circle
        let circle = AnalyticCurve::circle(1.0);
        let v = circle.dlogr_dn_interior(c(0.3, 0.0), c(2.0, 0.0));
        assert!((v - c(-0.5, 0.0)).norm() < 1e-13);
        // and is minus the display convention
        let disp = circle.normal_log_derivative(0.3, c(2.0, 0.0), false).unwrap();
        assert!((disp + v).norm() < 1e-13);
    }

    #[test]
    fn holomorphy_of_q_and_rsq() {
        // discrete Cauchy-Riemann residual below 1e-8 inside the strip
        let e = AnalyticCurve::ellipse(0.55).unwrap();
        let h = 1e-5;
        for i in 0..6 {
            let t = c(0.3 + i as f64, 0.04);
            let fx = (e.q(t + c(h, 0.0)) - e.q(t - c(h, 0.0))) / (2.0 * h);
            let fy = (e.q(t + c(0.0, h)) - e.q(t - c(0.0, h))) / (2.0 * h);
            assert!((fx - fy / Complex64::i()).norm() < 1e-8);
            let s = c(1.9, 0.0);
            let gx = (e.r_squared_raw(s, t + c(h, 0.0)) - e.r_squared_raw(s, t - c(h, 0.0)))
                / (2.0 * h);
            let gy = (e.r_squared_raw(s, t + c(0.0, h)) - e.r_squared_raw(s, t - c(0.0, h)))
                / (2.0 * h);
            assert!((gx - gy / Complex64::i()).norm() < 1e-8);
        }
    }

    #[test]
    fn periodicity() {
        let e = AnalyticCurve::ellipse(0.4).unwrap();
        let t = c(1.0, 0.09);
        let p = c(2.0 * PI, 0.0);
        assert!((e.q(t + p) - e.q(t)).norm() < 1e-12);
        assert!((e.qstar(t + p) - e.qstar(t)).norm() < 1e-12);
        assert!((e.r_squared_raw(c(0.5, 0.0), t + p) - e.r_squared_raw(c(0.5, 0.0), t)).norm() < 1e-12);
    }

    #[test]
    fn rotation_permutes_parameter() {
        let e = AnalyticCurve::ellipse(0.62).unwrap();
        let s0 = 1.234;
        let rot = e.rotated(s0);
        let t = c(0.8, 0.05);
        assert!((rot.q(t) - e.q(t + s0)).norm() < 1e-13);
    }

    #[test]
    fn out_of_tube_rejected() {
        let e = AnalyticCurve::ellipse(0.5).unwrap();
        let err = e.eval_q(c(0.0, e.margin() + 0.1));
        assert!(matches!(err, Err(GeometryError::OutOfTube { .. })));
    }

    #[test]
    fn file_round_trip_exact() {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 9];
        coeffs[5] = c(0.93, 0.0012345678901234567);
        coeffs[3] = c(0.07, -0.001);
        coeffs[6] = c(0.011, 0.002);
        coeffs[4] = c(0.01, 0.0);
        let curve = AnalyticCurve::new(coeffs).unwrap();
        let text = curve.to_text();
        let back = AnalyticCurve::from_text(&text).unwrap();
        for k in -4..=4 {
            let a = curve.coefficient(k);
            let b = back.coefficient(k);
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn self_intersecting_curve_rejected() {
        // a limacon with an inner loop: q(s) = e^{is} + 0.8 e^{2is} ... pad zeros
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 7];
        coeffs[4] = c(1.0, 0.0); // c_1
        coeffs[5] = c(0.8, 0.0); // c_2
        let res = AnalyticCurve::new(coeffs);
        assert!(res.is_err());
    }

    #[test]
    fn annulus_epsilon_validation() {
        let e = AnalyticCurve::ellipse(0.5).unwrap();
        let m = e.margin();
        assert!(AnnulusRegion::new(e.clone(), m * 2.0).is_err());
        let region = AnnulusRegion::with_default_epsilon(e);
        assert!(region.epsilon > 0.0 && region.epsilon < m);
    }
}
