//! Complex-argument Bessel and Hankel functions of orders 0 and 1, and the
//! split of the 2-d Helmholtz fundamental solution into the Riemann function
//! `A = J0(lambda*r)` and an entire part `B`.
//!
//! Evaluation strategy: power series below `SeriesPolicy::cutoff_radius`,
//! large-argument expansions of the Hankel integral representation above it,
//! with a convergent quadrature of that representation as fallback whenever
//! the expansion cannot certify the requested tail tolerance. All functions
//! are pure; identical inputs give bit-identical outputs.

mod largearg;
mod series;

use num_complex::Complex64;

pub use largearg::hankel_integral_rep;

/// Euler's constant, 20 significant digits.
pub const EULER_GAMMA: f64 = 0.57721566490153286061;

/// Relative size of the largest series term at which more than half of the
/// f64 significand has been cancelled away.
const HALF_SIGNIFICAND_LOSS: f64 = 6.7e7;

/// Bessel order supported by this module (the layer-potential kernels never
/// need more).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselOrder {
    Zero,
    One,
}

/// Switch point and truncation controls for series evaluation.
#[derive(Debug, Clone)]
pub struct SeriesPolicy {
    /// |z| at which evaluation switches from power series to large-argument
    /// expansion.
    pub cutoff_radius: f64,
    /// Maximum number of series terms.
    pub series_terms: usize,
    /// Bound required of the last retained term at the cutoff radius.
    pub tail_tolerance: f64,
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        // Both regimes overlap to ~1e-10 at |z| = 12 with 60 terms.
        SeriesPolicy {
            cutoff_radius: 12.0,
            series_terms: 60,
            tail_tolerance: 1e-14,
        }
    }
}

impl SeriesPolicy {
    /// Checks the truncation invariant: the magnitude of the last retained
    /// J0 term at |z| = cutoff_radius must be below `tail_tolerance`.
    pub fn validate(&self) -> Result<(), SpecfunError> {
        if !(self.cutoff_radius > 0.0) || self.series_terms < 1 || !(self.tail_tolerance > 0.0) {
            return Err(SpecfunError::BadPolicy);
        }
        let x = self.cutoff_radius;
        let mut term = 1.0f64;
        for k in 1..=self.series_terms {
            term *= (x * x / 4.0) / ((k * k) as f64);
        }
        if term >= self.tail_tolerance {
            return Err(SpecfunError::BadPolicy);
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SpecfunError {
    /// Argument on the closed negative real axis where log z has no
    /// principal value.
    #[error("argument {z} lies on the branch cut (-inf, 0]")]
    BranchCut { z: Complex64 },
    /// Intermediate or final quantity outside the representable range.
    #[error("overflow evaluating special function at z = {z}")]
    Overflow { z: Complex64 },
    /// Alternating-series cancellation ate more than half the significand.
    #[error("precision loss {loss:.2e} at z = {z} exceeds half the significand")]
    Precision { z: Complex64, loss: f64 },
    #[error("series policy violates its truncation invariant")]
    BadPolicy,
}

fn check_argument(z: Complex64) -> Result<(), SpecfunError> {
    if !z.re.is_finite() || !z.im.is_finite() || z.norm() >= 1e4 {
        return Err(SpecfunError::Overflow { z });
    }
    if z.im.abs() > 600.0 {
        return Err(SpecfunError::Overflow { z });
    }
    Ok(())
}

fn on_negative_axis(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0
}

/// Values of J0, J1, Y0, Y1 at one argument. The kernels of the layer
/// potentials consume all four at every quadrature node, so they are
/// computed together.
#[derive(Debug, Clone, Copy)]
pub struct BesselSet {
    pub j0: Complex64,
    pub j1: Complex64,
    pub y0: Complex64,
    pub y1: Complex64,
}

impl BesselSet {
    pub fn hankel1_0(&self) -> Complex64 {
        self.j0 + Complex64::i() * self.y0
    }
    pub fn hankel1_1(&self) -> Complex64 {
        self.j1 + Complex64::i() * self.y1
    }
}

/// Evaluates the full set {J0, J1, Y0, Y1} at z.
///
/// Requires z off the closed negative real axis. Below the policy cutoff the
/// power series are used; above it the set is recombined from the two Hankel
/// expansions, reflecting arguments with Re z < 0 through the half-turn
/// identities J_n(-z) = (-1)^n J_n(z), Y_n(-z) = (-1)^n (Y_n(z) +- 2i J_n(z)).
pub fn bessel_set(z: Complex64, policy: &SeriesPolicy) -> Result<BesselSet, SpecfunError> {
    check_argument(z)?;
    if on_negative_axis(z) {
        return Err(SpecfunError::BranchCut { z });
    }
    if z.norm() <= policy.cutoff_radius {
        series::bessel_set_series(z, policy)
    } else if z.re >= 0.0 {
        largearg::bessel_set_large(z, policy)
    } else {
        let w = -z;
        let s = largearg::bessel_set_large(w, policy)?;
        let two_i = Complex64::new(0.0, 2.0);
        // z = w * e^{+i pi} for Im z >= 0, w * e^{-i pi} for Im z < 0.
        let (y0, y1) = if z.im >= 0.0 {
            (s.y0 + two_i * s.j0, -(s.y1 + two_i * s.j1))
        } else {
            (s.y0 - two_i * s.j0, -(s.y1 - two_i * s.j1))
        };
        Ok(BesselSet {
            j0: s.j0,
            j1: -s.j1,
            y0,
            y1,
        })
    }
}

/// Bessel function of the first kind, order 0 or 1, complex argument.
///
/// Entire in z; for real z agrees with the real Bessel function.
pub fn bessel_j(
    order: BesselOrder,
    z: Complex64,
    policy: &SeriesPolicy,
) -> Result<Complex64, SpecfunError> {
    check_argument(z)?;
    if z.norm() <= policy.cutoff_radius {
        let (value, max_term) = match order {
            BesselOrder::Zero => series::j0_series(z, policy),
            BesselOrder::One => series::j1_series(z, policy),
        };
        precision_guard(z, value, max_term)?;
        return Ok(value);
    }
    // J is entire: reflect rather than refusing the negative half-plane.
    let w = if z.re < 0.0 { -z } else { z };
    let s = largearg::bessel_set_large(w, policy)?;
    let v = match order {
        BesselOrder::Zero => s.j0,
        BesselOrder::One => {
            if z.re < 0.0 {
                -s.j1
            } else {
                s.j1
            }
        }
    };
    Ok(v)
}

/// Bessel function of the second kind, order 0 or 1, principal branch of
/// log z.
pub fn bessel_y(
    order: BesselOrder,
    z: Complex64,
    policy: &SeriesPolicy,
) -> Result<Complex64, SpecfunError> {
    let s = bessel_set(z, policy)?;
    Ok(match order {
        BesselOrder::Zero => s.y0,
        BesselOrder::One => s.y1,
    })
}

/// Outgoing Hankel function H^(1)_n(z) = J_n(z) + i Y_n(z).
///
/// Above the cutoff with Re z >= 0 the function is evaluated from its own
/// expansion rather than as J + iY, so the exponentially small values on the
/// upper imaginary side are not lost to cancellation.
pub fn hankel1(
    order: BesselOrder,
    z: Complex64,
    policy: &SeriesPolicy,
) -> Result<Complex64, SpecfunError> {
    check_argument(z)?;
    if on_negative_axis(z) {
        return Err(SpecfunError::BranchCut { z });
    }
    let n = match order {
        BesselOrder::Zero => 0,
        BesselOrder::One => 1,
    };
    if z.norm() <= policy.cutoff_radius {
        let s = series::bessel_set_series(z, policy)?;
        return Ok(match order {
            BesselOrder::Zero => s.hankel1_0(),
            BesselOrder::One => s.hankel1_1(),
        });
    }
    if z.re >= 0.0 {
        largearg::hankel_large(n, largearg::HankelKind::First, z, policy)
    } else {
        // H^(1)_n(w e^{+-i pi}) = -e^{-+ n pi i} H^(2)_n(w).
        let w = -z;
        let h2 = largearg::hankel_large(n, largearg::HankelKind::Second, w, policy)?;
        let sign = if n == 0 { -1.0 } else { 1.0 };
        Ok(sign * h2)
    }
}

/// J1(z)/z, entire and even; the removable factor in the double-layer
/// kernels.
pub fn j1_over_z(z: Complex64, policy: &SeriesPolicy) -> Result<Complex64, SpecfunError> {
    check_argument(z)?;
    if z.norm() <= policy.cutoff_radius {
        Ok(series::j1_over_z_series(z, policy))
    } else {
        let j1 = bessel_j(BesselOrder::One, z, policy)?;
        Ok(j1 / z)
    }
}

/// Splits the fundamental solution -Y^(0)(lambda r) = A log(1/r) + B.
///
/// `A = J0(lambda r)` is the Riemann function. `B` is entire in r^2 and
/// carries the -J0(lambda r) log(lambda) term; concretely
/// `B = -log(lambda) J0(z) + V(z)` at `z = lambda r`, where
/// `V(z) = sum_{m>=1} (-1)^m (1 + 1/2 + ... + 1/m) (z/2)^{2m} / (m!)^2`.
/// Equivalently `V(z) = (log(z/2) + gamma) J0(z) - (pi/2) Y0(z)`, which is
/// how it is evaluated above the series cutoff.
pub fn green_split(
    lambda: f64,
    r: Complex64,
    policy: &SeriesPolicy,
) -> Result<(Complex64, Complex64), SpecfunError> {
    if !(lambda > 0.0) {
        return Err(SpecfunError::Overflow {
            z: Complex64::new(lambda, 0.0),
        });
    }
    let z = lambda * r;
    check_argument(z)?;
    let a = bessel_j(BesselOrder::Zero, z, policy)?;
    let b = if z.norm() <= policy.cutoff_radius {
        let (v, max_term) = series::v_entire_series(z, policy);
        precision_guard(z, v, max_term).ok();
        -lambda.ln() * a + v
    } else {
        if on_negative_axis(z) {
            return Err(SpecfunError::BranchCut { z });
        }
        let s = bessel_set(z, policy)?;
        let v = ((z / 2.0).ln() + EULER_GAMMA) * s.j0 - std::f64::consts::FRAC_PI_2 * s.y0;
        -lambda.ln() * a + v
    };
    Ok((a, b))
}

/// z d/dz of the entire part B at z = lambda r:
/// `log(lambda) z J1(z) + z V'(z)`. Multiplied by d(log r)/dn this is the
/// normal derivative of B appearing in the boundary jump formula.
pub fn green_b_dn_factor(
    lambda: f64,
    z: Complex64,
    policy: &SeriesPolicy,
) -> Result<Complex64, SpecfunError> {
    check_argument(z)?;
    if z.norm() <= policy.cutoff_radius {
        let (j1, _) = series::j1_series(z, policy);
        let zvp = series::zvprime_series(z, policy);
        Ok(lambda.ln() * z * j1 + zvp)
    } else {
        if on_negative_axis(z) {
            return Err(SpecfunError::BranchCut { z });
        }
        let s = bessel_set(z, policy)?;
        // z V'(z) = J0(z) - (log(z/2)+gamma) z J1(z) + (pi/2) z Y1(z)
        let zvp = s.j0 - ((z / 2.0).ln() + EULER_GAMMA) * z * s.j1
            + std::f64::consts::FRAC_PI_2 * z * s.y1;
        Ok(lambda.ln() * z * s.j1 + zvp)
    }
}

/// The kernel factors of the layer potentials at z = lambda r: the Riemann
/// function J0(z), the removable factor J1(z)/z, and z dB/dz for the entire
/// part. All three are even in z, so the branch of the square root feeding
/// z is immaterial.
#[derive(Debug, Clone, Copy)]
pub struct GreenKernels {
    pub j0: Complex64,
    pub j1_over: Complex64,
    pub b_factor: Complex64,
}

pub fn green_kernels(
    lambda: f64,
    z: Complex64,
    policy: &SeriesPolicy,
) -> Result<GreenKernels, SpecfunError> {
    check_argument(z)?;
    if z.norm() <= policy.cutoff_radius {
        let (j0, _) = series::j0_series(z, policy);
        let j1_over = series::j1_over_z_series(z, policy);
        let zvp = series::zvprime_series(z, policy);
        Ok(GreenKernels {
            j0,
            j1_over,
            b_factor: lambda.ln() * z * z * j1_over + zvp,
        })
    } else {
        let s = bessel_set(z, policy)?;
        let zj1 = z * s.j1;
        let zvp = s.j0 - ((z / 2.0).ln() + EULER_GAMMA) * zj1
            + std::f64::consts::FRAC_PI_2 * z * s.y1;
        Ok(GreenKernels {
            j0: s.j0,
            j1_over: s.j1 / z,
            b_factor: lambda.ln() * zj1 + zvp,
        })
    }
}

fn precision_guard(z: Complex64, value: Complex64, max_term: f64) -> Result<(), SpecfunError> {
    let scale = value.norm();
    if scale == 0.0 {
        return Ok(());
    }
    let loss = max_term / scale;
    if loss > HALF_SIGNIFICAND_LOSS {
        return Err(SpecfunError::Precision { z, loss });
    }
    Ok(())
}
