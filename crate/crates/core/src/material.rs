//! Dispersive (Lorentz-type) permittivity model of the resonators, the
//! permittivity contrast against the background, and the background
//! wavenumber conventions.
//!
//! Everything here is nondimensional: callers pre-scale physical
//! constants to a consistent unit system before building a [`Material`].

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Relative magnitude of the pole guard, applied against |beta|.
pub const POLE_GUARD_REL: f64 = 1e-12;

/// Convention used for the background wavenumber k0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum K0Convention {
    /// k0 = omega * eps0 * mu0
    #[default]
    Product,
    /// k0 = omega * sqrt(eps0 * mu0)
    SqrtProduct,
}

/// Dispersive material parameters. All six are strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    pub eps0: f64,
    pub mu0: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub eta: f64,
}

/// A frequency paired with the fixed interior wavenumber parameter.
///
/// The interior wavenumber is never solved from a dispersion relation;
/// it stays a caller-supplied constant throughout the pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePair {
    pub omega: Complex64,
    pub k: f64,
}

impl WavePair {
    pub fn new(omega: Complex64, k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::domain("WavePair", format!("k = {k} not finite")));
        }
        Ok(WavePair { omega, k })
    }
}

impl Material {
    pub fn new(eps0: f64, mu0: f64, alpha: f64, beta: f64, gamma: f64, eta: f64) -> Result<Self> {
        let m = Material {
            eps0,
            mu0,
            alpha,
            beta,
            gamma,
            eta,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eps0", self.eps0),
            ("mu0", self.mu0),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("eta", self.eta),
        ] {
            if v.is_nan() || v <= 0.0 || !v.is_finite() {
                return Err(Error::domain(
                    "Material",
                    format!("parameter {name} = {v} must be strictly positive and finite"),
                ));
            }
        }
        Ok(())
    }

    /// Denominator of the dispersive term: beta - omega^2 + eta k^2 - i gamma omega.
    pub fn dispersion_denominator(&self, omega: Complex64, k: f64) -> Complex64 {
        self.beta - omega * omega + self.eta * k * k - Complex64::i() * self.gamma * omega
    }

    /// eps(omega, k) = eps0 + alpha / (beta - omega^2 + eta k^2 - i gamma omega)
    pub fn permittivity(&self, omega: Complex64, k: f64) -> Result<Complex64> {
        let den = self.dispersion_denominator(omega, k);
        let guard = POLE_GUARD_REL * self.beta.abs();
        if den.norm() < guard {
            return Err(Error::Pole {
                magnitude: den.norm(),
                guard,
            });
        }
        Ok(self.eps0 + self.alpha / den)
    }

    /// Permittivity contrast xi(omega, k) = mu0 (eps - eps0).
    pub fn contrast(&self, omega: Complex64, k: f64) -> Result<Complex64> {
        let den = self.dispersion_denominator(omega, k);
        let guard = POLE_GUARD_REL * self.beta.abs();
        if den.norm() < guard {
            return Err(Error::Pole {
                magnitude: den.norm(),
                guard,
            });
        }
        Ok(self.mu0 * self.alpha / den)
    }

    /// Background wavenumber for the chosen convention.
    pub fn background_wavenumber(&self, omega: Complex64, convention: K0Convention) -> Complex64 {
        match convention {
            K0Convention::Product => omega * self.eps0 * self.mu0,
            K0Convention::SqrtProduct => omega * (self.eps0 * self.mu0).sqrt(),
        }
    }

    /// Lossless uncoupled resonance estimate sqrt(beta + eta k^2).
    ///
    /// Used as the default frequency at which the coupling pairings are
    /// frozen; it only depends on the material and k, so the forward and
    /// inverse pipelines agree on it without further negotiation.
    pub fn reference_omega(&self, k: f64) -> f64 {
        (self.beta + self.eta * k * k).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn static_limit() {
        let m = Material::new(2.0, 1.5, 3.0, 4.0, 0.5, 0.25).unwrap();
        let e = m.permittivity(c(0.0, 0.0), 0.0).unwrap();
        assert_abs_diff_eq!(e.re, 2.0 + 3.0 / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn lossless_pole_detected() {
        // gamma -> 0 limit represented by a gamma small enough that the
        // real pole omega^2 = beta + eta k^2 trips the guard
        let m = Material {
            eps0: 1.0,
            mu0: 1.0,
            alpha: 2.0,
            beta: 4.0,
            gamma: 1e-18,
            eta: 1.0,
        };
        let omega = c((4.0f64 + 1.0).sqrt(), 0.0);
        assert!(matches!(
            m.permittivity(omega, 1.0),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn rational_value() {
        // eps0=1, alpha=2, beta=4, gamma=1, eta=0, omega=1, k=0:
        // 1 + 2/(3 - i) = 1.6 + 0.2i  (exact rational arithmetic)
        let m = Material::new(1.0, 1.0, 2.0, 4.0, 1.0, 1e-30).unwrap();
        let e = m.permittivity(c(1.0, 0.0), 0.0).unwrap();
        assert_abs_diff_eq!(e.re, 1.6, epsilon = 1e-14);
        assert_abs_diff_eq!(e.im, 0.2, epsilon = 1e-14);
    }

    #[test]
    fn contrast_is_scaled_difference() {
        let m = Material::new(1.0, 2.0, 2.0, 4.0, 1.0, 1e-30).unwrap();
        let x = m.contrast(c(1.0, 0.0), 0.0).unwrap();
        assert_abs_diff_eq!(x.re, 1.2, epsilon = 1e-14);
        assert_abs_diff_eq!(x.im, 0.4, epsilon = 1e-14);
        // definition consistency at arbitrary points
        for (w, k) in [(c(0.3, -0.1), 0.7), (c(2.0, 0.0), 0.0), (c(5.0, -0.4), 1.3)] {
            let lhs = m.contrast(w, k).unwrap();
            let rhs = m.mu0 * (m.permittivity(w, k).unwrap() - m.eps0);
            assert_abs_diff_eq!(lhs.re, rhs.re, epsilon = 1e-13);
            assert_abs_diff_eq!(lhs.im, rhs.im, epsilon = 1e-13);
        }
    }

    #[test]
    fn background_wavenumber_conventions() {
        let m = Material::new(3.0, 0.5, 1.0, 1.0, 1.0, 1.0).unwrap();
        let w = c(2.0, 0.0);
        assert_abs_diff_eq!(
            m.background_wavenumber(w, K0Convention::Product).re,
            3.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            m.background_wavenumber(w, K0Convention::SqrtProduct).re,
            2.0 * 1.5f64.sqrt(),
            epsilon = 1e-15
        );
        assert_eq!(
            m.background_wavenumber(c(0.0, 0.0), K0Convention::Product),
            c(0.0, 0.0)
        );
        // unit parameters make both conventions agree
        let u = Material::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(
            u.background_wavenumber(c(1.0, 0.0), K0Convention::Product),
            u.background_wavenumber(c(1.0, 0.0), K0Convention::SqrtProduct)
        );
    }

    #[test]
    fn reflection_symmetry() {
        // eps(-conj(omega)) = conj(eps(omega)) for real k
        let m = Material::new(1.0, 1.0, 5.0, 9.0, 0.4, 0.3).unwrap();
        for (re, im) in [(1.0, -0.2), (3.0, 0.5), (0.2, -1.0), (7.5, -0.01)] {
            let w = c(re, im);
            let e1 = m.permittivity(-w.conj(), 0.8).unwrap();
            let e2 = m.permittivity(w, 0.8).unwrap().conj();
            assert_abs_diff_eq!(e1.re, e2.re, epsilon = 1e-13);
            assert_abs_diff_eq!(e1.im, e2.im, epsilon = 1e-13);
        }
    }

    #[test]
    fn positive_loss_for_real_positive_omega() {
        let m = Material::new(1.0, 1.0, 5.0, 9.0, 0.4, 0.3).unwrap();
        for w in [0.1, 1.0, 2.99, 3.01, 10.0] {
            assert!(m.permittivity(c(w, 0.0), 1.0).unwrap().im > 0.0);
        }
    }

    #[test]
    fn contrast_vanishes_at_large_frequency() {
        let m = Material::new(1.0, 1.0, 5.0, 9.0, 0.4, 0.3).unwrap();
        let w_ref = c(3.2, 0.0);
        let far = m.contrast(w_ref * 1e6, 1.0).unwrap().norm();
        let near = m.contrast(w_ref, 1.0).unwrap().norm();
        assert!(far < near);
        assert!(far < 1e-9);
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(Material::new(0.0, 1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(Material::new(1.0, 1.0, -2.0, 1.0, 1.0, 1.0).is_err());
        assert!(Material::new(1.0, 1.0, 1.0, 1.0, f64::NAN, 1.0).is_err());
    }
}
