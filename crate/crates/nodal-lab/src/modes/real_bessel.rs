//! Real-argument Bessel functions J_m for arbitrary order by Miller's
//! downward recurrence, and the bracketed-bisection root finders for zeros
//! j_{m,n} and critical points j'_{m,n}.

use super::ModesError;

/// J_0 .. J_{n_max} at real x >= 0 by downward recurrence with
/// normalization J_0 + 2 sum J_{2k} = 1.
pub fn bessel_j_sequence(n_max: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut out = vec![0.0; n_max + 1];
        out[0] = 1.0;
        return out;
    }
    let top = (n_max as f64).max(x);
    let start = n_max.max(x as usize) + 20 + (8.0 * top.sqrt()) as usize;
    let start = if start % 2 == 0 { start } else { start + 1 };
    let mut jp = 0.0f64; // J_{k+1}
    let mut j = 1e-300f64; // J_k
    let mut out = vec![0.0; n_max + 1];
    let mut norm = 0.0f64; // accumulates J_0 + 2 sum_{k>=1} J_{2k}
    for k in (0..=start).rev() {
        let jm = (2.0 * (k as f64 + 1.0) / x) * j - jp;
        jp = j;
        j = jm;
        // j now holds J_k, jp holds J_{k+1}
        if k <= n_max {
            out[k] = j;
        }
        if k % 2 == 0 {
            norm += if k == 0 { j } else { 2.0 * j };
        }
        if j.abs() > 1e250 {
            // renormalize mid-recurrence to dodge overflow
            let scale = 1e-250;
            j *= scale;
            jp *= scale;
            norm *= scale;
            for v in out.iter_mut() {
                *v *= scale;
            }
        }
    }
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

/// J_m(x) for a single order.
pub fn jm(m: usize, x: f64) -> f64 {
    bessel_j_sequence(m, x)[m]
}

/// J_m'(x) = (J_{m-1}(x) - J_{m+1}(x))/2, with J_0' = -J_1.
pub fn jm_prime(m: usize, x: f64) -> f64 {
    if m == 0 {
        -jm(1, x)
    } else {
        let seq = bessel_j_sequence(m + 1, x);
        0.5 * (seq[m - 1] - seq[m + 1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    /// zero of J_m
    Zero,
    /// critical point of J_m
    Critical,
}

/// A located Bessel root j_{m,n} or j'_{m,n}.
#[derive(Debug, Clone, Copy)]
pub struct BesselRoot {
    pub m: u32,
    pub n: u32,
    pub value: f64,
    pub kind: RootKind,
}

/// n-th positive zero or critical point of J_m (n >= 1), bisected to
/// ~1e-12 relative. The scan starts just above m since no sign change of
/// J_m or J_m' occurs below the transition point.
pub fn bessel_root(m: u32, n: u32, kind: RootKind) -> Result<BesselRoot, ModesError> {
    if n < 1 {
        return Err(ModesError::BadIndex(format!("root index n = {n} must be >= 1")));
    }
    let f = |x: f64| -> f64 {
        match kind {
            RootKind::Zero => jm(m as usize, x),
            RootKind::Critical => jm_prime(m as usize, x),
        }
    };
    let mut x = if m == 0 { 0.05 } else { m as f64 + 1e-9 };
    let step = std::f64::consts::PI / 8.0;
    let mut found = 0u32;
    let mut fx = f(x);
    let budget = (n as f64 * 16.0 + m as f64 * 4.0 + 400.0) as usize;
    for _ in 0..budget {
        let x2 = x + step;
        let fx2 = f(x2);
        if fx == 0.0 {
            found += 1;
            if found == n {
                return Ok(BesselRoot { m, n, value: x, kind });
            }
        } else if fx.signum() != fx2.signum() {
            found += 1;
            if found == n {
                let root = bisect(&f, x, x2);
                return Ok(BesselRoot { m, n, value: root, kind });
            }
        }
        x = x2;
        fx = fx2;
    }
    Err(ModesError::RootNotBracketed { m, n })
}

fn bisect(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..100 {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 || (b - a) < 1e-12 * mid.abs() {
            return mid;
        }
        if fa.signum() != fm.signum() {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_matches_complex_series() {
        use crate::specfun::{bessel_j, BesselOrder, SeriesPolicy};
        let p = SeriesPolicy::default();
        for &x in &[0.5, 2.0, 7.5, 11.0] {
            let seq = bessel_j_sequence(3, x);
            let j0 = bessel_j(BesselOrder::Zero, num_complex::Complex64::new(x, 0.0), &p)
                .unwrap()
                .re;
            let j1 = bessel_j(BesselOrder::One, num_complex::Complex64::new(x, 0.0), &p)
                .unwrap()
                .re;
            assert!((seq[0] - j0).abs() < 1e-12, "J0({x})");
            assert!((seq[1] - j1).abs() < 1e-12, "J1({x})");
        }
    }

    #[test]
    fn high_order_value() {
        // J_10(10) = 0.20748610663335885 (Abramowitz & Stegun 9.4)
        assert!((jm(10, 10.0) - 0.2074861066333589).abs() < 1e-12);
    }

    #[test]
    fn first_roots() {
        let j01 = bessel_root(0, 1, RootKind::Zero).unwrap().value;
        assert!((j01 - 2.404825558).abs() < 1e-8);
        let jp11 = bessel_root(1, 1, RootKind::Critical).unwrap().value;
        assert!((jp11 - 1.841183781).abs() < 1e-8);
        let j11 = bessel_root(1, 1, RootKind::Zero).unwrap().value;
        assert!((j11 - 3.831705970).abs() < 1e-8);
        assert!(jp11 < j11, "interlacing j'_{{1,1}} < j_{{1,1}}");
    }

    #[test]
    fn root_residuals_and_interlacing() {
        for m in [0u32, 1, 3, 12, 40] {
            let mut prev = 0.0;
            for n in 1..=4u32 {
                let z = bessel_root(m, n, RootKind::Zero).unwrap().value;
                let c = bessel_root(m, n, RootKind::Critical).unwrap().value;
                assert!(jm(m as usize, z).abs() < 1e-11, "J_{m}({z})");
                assert!(jm_prime(m as usize, c).abs() < 1e-11, "J_{m}'({c})");
                // j'_{m,n} < j_{m,n} < j'_{m,n+1} for m >= 1; at m = 0 the
                // first positive critical point sits above the first zero
                if m >= 1 {
                    assert!(c < z, "interlacing fails at m={m} n={n}");
                } else {
                    assert!(z < c, "m = 0 ordering fails at n={n}");
                }
                assert!(z > prev, "monotonicity fails at m={m} n={n}");
                prev = z;
            }
        }
    }

    #[test]
    fn first_critical_point_exceeds_order() {
        // j'_{m,1} > m via the sign J_m'(m) > 0
        for m in 1..=50usize {
            assert!(jm_prime(m, m as f64) > 0.0, "J_{m}'({m}) <= 0");
        }
    }
}
