//! Ground-truth eigenmodes: closed-form disc modes, shooting-method ellipse
//! modes, and externally supplied boundary traces.
//!
//! A mode stores its frequency lambda (eigenvalue lambda^2), boundary
//! condition, and the boundary Cauchy trace u(s) on the parameter circle:
//! the restriction of the eigenfunction for Neumann, the (interior) normal
//! derivative for Dirichlet. Traces are held as trigonometric polynomials,
//! which makes their holomorphic extension, spectral derivative and L2 norm
//! exact for band-limited data.
//!
//! L2 norms of traces are root mean squares with respect to normalized
//! arclength measure, so a unit-norm trace attains modulus >= 1 somewhere on
//! the real curve.

pub mod ellipse;
pub mod real_bessel;

use crate::geometry::AnalyticCurve;
use num_complex::Complex64;

pub use ellipse::ellipse_mode;
pub use real_bessel::{bessel_root, BesselRoot, RootKind};

#[derive(Debug, thiserror::Error)]
pub enum ModesError {
    #[error("no sign change found bracketing root {n} of order {m}")]
    RootNotBracketed { m: u32, n: u32 },
    #[error("trace is numerically zero; cannot normalize")]
    NormalizationError,
    #[error("trace is identically degenerate: {0}")]
    DegenerateTrace(String),
    #[error("shooting integration failed: {0}")]
    ShootingDiverged(String),
    #[error("no eigenvalue found in the search window: {0}")]
    IndexNotFound(String),
    #[error("trace file: {0}")]
    ParseError(String),
    #[error("bad mode index: {0}")]
    BadIndex(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    Neumann,
    Dirichlet,
}

impl std::fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryCondition::Neumann => write!(f, "neumann"),
            BoundaryCondition::Dirichlet => write!(f, "dirichlet"),
        }
    }
}

impl std::str::FromStr for BoundaryCondition {
    type Err = ModesError;
    fn from_str(s: &str) -> Result<Self, ModesError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "neumann" => Ok(BoundaryCondition::Neumann),
            "dirichlet" => Ok(BoundaryCondition::Dirichlet),
            other => Err(ModesError::ParseError(format!(
                "unknown boundary condition '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Sin,
    Cos,
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Parity::Sin => write!(f, "sin"),
            Parity::Cos => write!(f, "cos"),
        }
    }
}

impl std::str::FromStr for Parity {
    type Err = ModesError;
    fn from_str(s: &str) -> Result<Self, ModesError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sin" => Ok(Parity::Sin),
            "cos" => Ok(Parity::Cos),
            other => Err(ModesError::ParseError(format!("unknown parity '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum ModeKind {
    Disc { parity: Parity },
    Ellipse { ecc: f64, parity: Parity },
    External,
}

/// Boundary trace as a trigonometric polynomial sum c_k e^{iks}.
#[derive(Debug, Clone)]
pub struct Trace {
    coeffs: Vec<Complex64>,
    k_max: i64,
    /// Raw samples retained for externally loaded traces so file round
    /// trips are bit-exact.
    raw_samples: Option<Vec<f64>>,
}

impl Trace {
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        assert!(coeffs.len() % 2 == 1, "centered coefficient list");
        let k_max = (coeffs.len() / 2) as i64;
        Trace {
            coeffs,
            k_max,
            raw_samples: None,
        }
    }

    /// Discrete Fourier analysis of uniform real samples on [0, 2 pi);
    /// conjugate symmetry is enforced so the trace is real on the real axis.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let k_max = ((n - 1) / 2) as i64;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (2 * k_max + 1) as usize];
        for k in 0..=k_max {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &u) in samples.iter().enumerate() {
                let phase = -2.0 * std::f64::consts::PI * (k as f64) * (j as f64) / n as f64;
                acc += u * Complex64::new(phase.cos(), phase.sin());
            }
            acc /= n as f64;
            coeffs[(k + k_max) as usize] = acc;
            coeffs[(-k + k_max) as usize] = acc.conj();
        }
        let mut t = Trace {
            coeffs,
            k_max,
            raw_samples: Some(samples.to_vec()),
        };
        t.trim();
        t
    }

    fn trim(&mut self) {
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return;
        }
        let mut k = self.k_max;
        while k > 0 {
            let edge = self.coefficient(k).norm().max(self.coefficient(-k).norm());
            if edge > 1e-15 * max {
                break;
            }
            k -= 1;
        }
        if k < self.k_max {
            let lo = (self.k_max - k) as usize;
            let hi = (self.k_max + k) as usize;
            self.coeffs = self.coeffs[lo..=hi].to_vec();
            self.k_max = k;
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

    /// Value on the real parameter axis.
    #[inline]
    pub fn eval_real(&self, s: f64) -> f64 {
        self.eval_complex(Complex64::new(s, 0.0)).re
    }

    /// Holomorphic extension sum c_k e^{ikt}. This is the trace's own
    /// continuation; the layer-potential pipeline never calls it, it serves
    /// as the closed-form oracle and for synthetic test functions.
    #[inline]
    pub fn eval_complex(&self, t: Complex64) -> Complex64 {
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

    /// Spectral derivative d/ds.
    pub fn derivative(&self) -> Trace {
        let mut coeffs = self.coeffs.clone();
        for (i, c) in coeffs.iter_mut().enumerate() {
            let k = i as i64 - self.k_max;
            *c *= Complex64::new(0.0, k as f64);
        }
        Trace {
            coeffs,
            k_max: self.k_max,
            raw_samples: None,
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for c in self.coeffs.iter_mut() {
            *c *= factor;
        }
        if let Some(samples) = self.raw_samples.as_mut() {
            for u in samples.iter_mut() {
                *u *= factor;
            }
        }
    }

    /// Root mean square over the parameter circle by trapezoid quadrature,
    /// refined once to verify 1e-10 relative agreement.
    pub fn rms_parameter(&self) -> f64 {
        let rms_n = |n: usize| -> f64 {
            let mut acc = 0.0;
            for j in 0..n {
                let v = self.eval_real(2.0 * std::f64::consts::PI * j as f64 / n as f64);
                acc += v * v;
            }
            (acc / n as f64).sqrt()
        };
        let n0 = (4 * (self.k_max.max(8) as usize)).next_power_of_two();
        let a = rms_n(n0);
        let b = rms_n(2 * n0);
        debug_assert!(
            (a - b).abs() <= 1e-10 * b.max(1e-300),
            "trapezoid norm unconverged"
        );
        b
    }

    /// Root mean square with respect to normalized arclength on the curve.
    pub fn rms_on(&self, curve: &AnalyticCurve) -> f64 {
        let n = (4 * (self.k_max.max(32) as usize)).next_power_of_two();
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..n {
            let s = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            let speed = curve.q_prime(Complex64::new(s, 0.0)).norm();
            let v = self.eval_real(s);
            num += v * v * speed;
            den += speed;
        }
        (num / den).sqrt()
    }

    pub fn max_abs(&self, samples: usize) -> f64 {
        (0..samples)
            .map(|j| {
                self.eval_real(2.0 * std::f64::consts::PI * j as f64 / samples as f64)
                    .abs()
            })
            .fold(0.0, f64::max)
    }

    /// Whether the trace is real-valued on the real axis (conjugate
    /// symmetric coefficients).
    pub fn is_real_valued(&self) -> bool {
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return true;
        }
        (0..=self.k_max).all(|k| {
            (self.coefficient(-k) - self.coefficient(k).conj()).norm() <= 1e-12 * max
        })
    }

    pub fn samples(&self, n: usize) -> Vec<f64> {
        if let Some(raw) = &self.raw_samples {
            if raw.len() == n {
                return raw.clone();
            }
        }
        (0..n)
            .map(|j| self.eval_real(2.0 * std::f64::consts::PI * j as f64 / n as f64))
            .collect()
    }
}

/// Eigenmode with boundary Cauchy trace.
#[derive(Debug, Clone)]
pub struct EigenMode {
    pub lambda: f64,
    pub bc: BoundaryCondition,
    pub trace: Trace,
    pub kind: ModeKind,
    pub m: u32,
    pub n: u32,
}

impl EigenMode {
    /// Normalizes the trace to unit RMS on the given curve. Idempotent:
    /// an already-normalized trace is left untouched bit for bit.
    pub fn normalize_on(&mut self, curve: &AnalyticCurve) -> Result<(), ModesError> {
        let norm = self.trace.rms_on(curve);
        if !(norm > 1e-140) {
            return Err(ModesError::NormalizationError);
        }
        if (norm - 1.0).abs() > 1e-12 {
            self.trace.scale(1.0 / norm);
        }
        Ok(())
    }

    fn normalize_parameter(&mut self) -> Result<(), ModesError> {
        let norm = self.trace.rms_parameter();
        if !(norm > 1e-140) {
            return Err(ModesError::NormalizationError);
        }
        if (norm - 1.0).abs() > 1e-12 {
            self.trace.scale(1.0 / norm);
        }
        Ok(())
    }

    pub fn id(&self) -> String {
        match &self.kind {
            ModeKind::Disc { parity } => {
                format!("disc-m{}-n{}-{}-{}", self.m, self.n, self.bc, parity)
            }
            ModeKind::Ellipse { ecc, parity } => format!(
                "ellipse-a{:.4}-m{}-n{}-{}-{}",
                ecc, self.m, self.n, self.bc, parity
            ),
            ModeKind::External => format!("external-lambda{:.6}", self.lambda),
        }
    }
}

/// Closed-form disc mode on the unit circle.
///
/// Neumann: lambda = j'_{m,n}, trace proportional to sin/cos(m theta);
/// Dirichlet: lambda = j_{m,n}, trace is the interior normal derivative,
/// again proportional to sin/cos(m theta). Normalized to unit RMS.
pub fn disc_mode(
    m: u32,
    n: u32,
    bc: BoundaryCondition,
    parity: Parity,
) -> Result<EigenMode, ModesError> {
    if m == 0 && parity == Parity::Sin {
        return Err(ModesError::BadIndex(
            "sin parity is identically zero at m = 0; use cos".into(),
        ));
    }
    let kind = match bc {
        BoundaryCondition::Neumann => RootKind::Critical,
        BoundaryCondition::Dirichlet => RootKind::Zero,
    };
    let root = bessel_root(m, n, kind)?;
    let lambda = root.value;
    let amplitude = match bc {
        BoundaryCondition::Neumann => real_bessel::jm(m as usize, lambda),
        BoundaryCondition::Dirichlet => -lambda * real_bessel::jm_prime(m as usize, lambda),
    };
    if amplitude.abs() < 1e-14 {
        return Err(ModesError::DegenerateTrace(format!(
            "boundary factor vanishes for (m, n) = ({m}, {n})"
        )));
    }
    let k = m as i64;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); (2 * k + 1) as usize];
    if m == 0 {
        coeffs[0] = Complex64::new(amplitude, 0.0);
    } else {
        match parity {
            Parity::Sin => {
                coeffs[(2 * k) as usize] = Complex64::new(0.0, -amplitude / 2.0);
                coeffs[0] = Complex64::new(0.0, amplitude / 2.0);
            }
            Parity::Cos => {
                coeffs[(2 * k) as usize] = Complex64::new(amplitude / 2.0, 0.0);
                coeffs[0] = Complex64::new(amplitude / 2.0, 0.0);
            }
        }
    }
    let mut mode = EigenMode {
        lambda,
        bc,
        trace: Trace::from_coeffs(coeffs),
        kind: ModeKind::Disc { parity },
        m,
        n,
    };
    mode.normalize_parameter()?;
    Ok(mode)
}

/// Parses a trace file: header "lambda bc N", then N lines "s u(s)" on the
/// uniform grid s_j = 2 pi j / N. The mode is normalized on load.
pub fn load_trace(text: &str) -> Result<EigenMode, ModesError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| ModesError::ParseError("empty trace file".into()))?;
    let mut it = header.split_whitespace();
    let lambda: f64 = it
        .next()
        .ok_or_else(|| ModesError::ParseError("missing lambda".into()))?
        .parse()
        .map_err(|e| ModesError::ParseError(format!("bad lambda: {e}")))?;
    if !(lambda > 0.0) {
        return Err(ModesError::ParseError(format!(
            "lambda = {lambda} must be positive"
        )));
    }
    let bc: BoundaryCondition = it
        .next()
        .ok_or_else(|| ModesError::ParseError("missing boundary condition".into()))?
        .parse()?;
    let n: usize = it
        .next()
        .ok_or_else(|| ModesError::ParseError("missing sample count".into()))?
        .parse()
        .map_err(|e| ModesError::ParseError(format!("bad sample count: {e}")))?;
    if n < 64 {
        return Err(ModesError::ParseError(format!(
            "need at least 64 samples, got {n}"
        )));
    }
    let mut samples = Vec::with_capacity(n);
    for (j, line) in lines.enumerate() {
        let mut it = line.split_whitespace();
        let s: f64 = it
            .next()
            .ok_or_else(|| ModesError::ParseError(format!("line {j}: missing s")))?
            .parse()
            .map_err(|e| ModesError::ParseError(format!("line {j}: bad s: {e}")))?;
        let u: f64 = it
            .next()
            .ok_or_else(|| ModesError::ParseError(format!("line {j}: missing u")))?
            .parse()
            .map_err(|e| ModesError::ParseError(format!("line {j}: bad u: {e}")))?;
        let expect = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
        if (s - expect).abs() > 1e-8 {
            return Err(ModesError::ParseError(format!(
                "line {j}: s = {s} is not on the uniform grid (expected {expect})"
            )));
        }
        samples.push(u);
    }
    if samples.len() != n {
        return Err(ModesError::ParseError(format!(
            "expected {n} samples, found {}",
            samples.len()
        )));
    }
    if samples.iter().all(|u| *u == 0.0) {
        return Err(ModesError::NormalizationError);
    }
    let mut mode = EigenMode {
        lambda,
        bc,
        trace: Trace::from_samples(&samples),
        kind: ModeKind::External,
        m: 0,
        n: 0,
    };
    mode.normalize_parameter()?;
    Ok(mode)
}

/// Writes the trace file format read by [`load_trace`]; floats use the
/// shortest round-trip representation.
pub fn save_trace(mode: &EigenMode, n: usize) -> String {
    let mut out = format!("{} {} {}\n", mode.lambda, mode.bc, n);
    let samples = mode.trace.samples(n);
    for (j, u) in samples.iter().enumerate() {
        let s = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
        out.push_str(&format!("{} {}\n", s, u));
    }
    out
}

/// Default sample count resolving oscillation at frequency lambda.
pub fn default_samples(lambda: f64) -> usize {
    (16 * (lambda.ceil() as usize)).max(256)
}
