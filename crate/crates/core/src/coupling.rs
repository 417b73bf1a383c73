//! Operator pairings against normalised indicator modes, the self
//! eigenvalues, and the dilute linearisation constants.
//!
//! Off-diagonal disk pairings integrate the kernels with a tensor-product
//! Gauss-Legendre rule in polar coordinates (4 nested dimensions). Self
//! terms and the distance-free dilute integrals share a singular surface
//! at coincident points, so they are reduced through the exact
//! pair-distance density of the domain and integrated with the
//! double-exponential rule, which resolves the log / 1/r endpoints to
//! near machine precision.

use crate::error::{Error, Result};
use crate::material::{K0Convention, Material};
use crate::quad::{ball_self_mean, disk_self_mean, GaussLegendre};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// gamma-hat default: e^gamma_E / 2, the small-argument constant of the
/// order-zero Hankel expansion.
pub const GAMMA_HAT_DEFAULT: f64 = 0.890_536_208_995_098_9;

pub const DEFAULT_QUAD_ORDER: usize = 24;

/// A circular resonator in unscaled coordinates. With `Dim::Three` the
/// same data is read as a sphere centred in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disk {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Disk {
    pub fn new(center: [f64; 2], radius: f64) -> Result<Self> {
        if radius.is_nan() || radius <= 0.0 || !radius.is_finite() {
            return Err(Error::domain(
                "Disk",
                format!("radius {radius} must be > 0"),
            ));
        }
        Ok(Disk { center, radius })
    }

    pub fn center_distance(&self, other: &Disk) -> f64 {
        let dx = self.center[0] - other.center[0];
        let dy = self.center[1] - other.center[1];
        dx.hypot(dy)
    }

    /// Planar area (2D) of the resonator.
    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    /// Ball volume when interpreted in three dimensions.
    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * PI * self.radius.powi(3)
    }

    fn is_same(&self, other: &Disk) -> bool {
        self.center == other.center && self.radius == other.radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Dim {
    Two,
    Three,
}

impl TryFrom<u8> for Dim {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            2 => Ok(Dim::Two),
            3 => Ok(Dim::Three),
            other => Err(format!("dim must be 2 or 3, got {other}")),
        }
    }
}

impl From<Dim> for u8 {
    fn from(d: Dim) -> u8 {
        match d {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }
}

/// A scaled arrangement of resonators: unscaled disks plus the
/// characteristic size delta.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub disks: Vec<Disk>,
    pub delta: f64,
    pub dim: Dim,
}

impl Configuration {
    pub fn new(disks: Vec<Disk>, delta: f64, dim: Dim) -> Result<Self> {
        let c = Configuration { disks, delta, dim };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.disks.is_empty() {
            return Err(Error::domain(
                "Configuration",
                "needs at least one resonator",
            ));
        }
        if self.delta.is_nan() || self.delta <= 0.0 || !self.delta.is_finite() {
            return Err(Error::domain(
                "Configuration",
                format!("delta {} must be > 0", self.delta),
            ));
        }
        for d in &self.disks {
            if d.radius.is_nan() || d.radius <= 0.0 {
                return Err(Error::domain("Configuration", "disk radius must be > 0"));
            }
        }
        for i in 0..self.disks.len() {
            for j in (i + 1)..self.disks.len() {
                let dist = self.disks[i].center_distance(&self.disks[j]);
                let rsum = self.disks[i].radius + self.disks[j].radius;
                if dist <= rsum {
                    return Err(Error::Overlap {
                        dist,
                        radius_sum: rsum,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.disks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.disks.is_empty()
    }

    /// Place three disks of radius `rho` at pairwise centre distances
    /// (a1, a2, a3) = (|c1-c2|, |c2-c3|, |c1-c3|). Fails when the
    /// distances violate the triangle inequality or disks overlap.
    pub fn from_distances(rho: f64, a1: f64, a2: f64, a3: f64, delta: f64) -> Result<Self> {
        if a3 > a1 + a2 || a3 < (a1 - a2).abs() {
            return Err(Error::domain(
                "Configuration",
                format!("distances ({a1}, {a2}, {a3}) do not close a triangle"),
            ));
        }
        // D1 at origin, D2 on the x-axis, D3 from the law of cosines
        let x3 = (a1 * a1 + a3 * a3 - a2 * a2) / (2.0 * a1);
        let y3sq = a3 * a3 - x3 * x3;
        let y3 = y3sq.max(0.0).sqrt();
        Configuration::new(
            vec![
                Disk::new([0.0, 0.0], rho)?,
                Disk::new([a1, 0.0], rho)?,
                Disk::new([x3, y3], rho)?,
            ],
            delta,
            Dim::Two,
        )
    }
}

/// How the off-diagonal pairings are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingMode {
    /// Full quadrature of the asymptotic kernels.
    #[default]
    Quadrature,
    /// Linearised S + Q dist(D_i, D_j); requires identical radii.
    Dilute,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingOpts {
    pub gamma_hat: f64,
    pub order: usize,
    pub mode: PairingMode,
    pub k0_convention: K0Convention,
    /// Frequency at which delta*k0 is frozen. Defaults to the material's
    /// lossless uncoupled estimate sqrt(beta + eta k^2).
    pub reference_omega: Option<f64>,
}

impl Default for CouplingOpts {
    fn default() -> Self {
        CouplingOpts {
            gamma_hat: GAMMA_HAT_DEFAULT,
            order: DEFAULT_QUAD_ORDER,
            mode: PairingMode::Quadrature,
            k0_convention: K0Convention::default(),
            reference_omega: None,
        }
    }
}

/// All pairings of a configuration at one frozen delta*k0.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSet {
    /// Row-major N x N matrix: N_ij off the diagonal, the self
    /// eigenvalue (nu in 2D, lambda in 3D) on the diagonal.
    pub n_pairs: Vec<Vec<Complex64>>,
    pub gamma_hat: f64,
    pub s_const: Complex64,
    pub q_const: Complex64,
    /// Frozen delta * k0 the pairings were evaluated at.
    pub delta_k0: Complex64,
    pub delta: f64,
    pub dim: Dim,
}

impl CouplingSet {
    pub fn n(&self) -> usize {
        self.n_pairs.len()
    }

    pub fn pairing(&self, i: usize, j: usize) -> Complex64 {
        self.n_pairs[i][j]
    }

    pub fn self_eigenvalue(&self, i: usize) -> Complex64 {
        self.n_pairs[i][i]
    }
}

fn check_pair_geometry(di: &Disk, dj: &Disk) -> Result<PairKind> {
    if di.is_same(dj) {
        return Ok(PairKind::SelfTerm);
    }
    let dist = di.center_distance(dj);
    let rsum = di.radius + dj.radius;
    if dist <= rsum {
        return Err(Error::Overlap {
            dist,
            radius_sum: rsum,
        });
    }
    Ok(PairKind::Cross(dist))
}

enum PairKind {
    SelfTerm,
    Cross(f64),
}

/// log(gamma_hat * delta * k0); principal branch for complex k0, with
/// the real branch validated to stay positive.
fn log_gdk(delta: f64, k0: Complex64, gamma_hat: f64) -> Result<Complex64> {
    let z = gamma_hat * delta * k0;
    if z.im == 0.0 {
        if z.re <= 0.0 {
            return Err(Error::domain(
                "pairing_khat",
                format!("gamma_hat * delta * k0 = {} must be > 0", z.re),
            ));
        }
        Ok(Complex64::new(z.re.ln(), 0.0))
    } else {
        Ok(z.ln())
    }
}

/// Constant-kernel pairing of K-hat: -(1/2 pi) log(gamma_hat delta k0) sqrt(|D_i||D_j|).
pub fn pairing_khat(
    di: &Disk,
    dj: &Disk,
    delta: f64,
    k0: Complex64,
    gamma_hat: f64,
) -> Result<Complex64> {
    let l = log_gdk(delta, k0, gamma_hat)?;
    Ok(-l / (2.0 * PI) * (di.area() * dj.area()).sqrt())
}

/// Double-disk quadrature of a real radial kernel over two disjoint disks
/// at centre distance `d`, in polar coordinates, divided by sqrt of areas.
fn cross_pairing_real<F: Fn(f64) -> f64 + Sync>(
    kernel: F,
    rho_i: f64,
    rho_j: f64,
    d: f64,
    order: usize,
) -> f64 {
    let gl = GaussLegendre::order(order);
    let (r1, wr1) = gl.mapped(0.0, rho_i);
    let (r2, wr2) = gl.mapped(0.0, rho_j);
    let (t, wt) = gl.mapped(0.0, 2.0 * PI);
    let cos_t: Vec<f64> = t.iter().map(|&a| a.cos()).collect();
    let sin_t: Vec<f64> = t.iter().map(|&a| a.sin()).collect();

    let mut total = 0.0;
    for (i1, &ra) in r1.iter().enumerate() {
        for (a1, (&ca, &sa)) in cos_t.iter().zip(&sin_t).enumerate() {
            let xa = ra * ca;
            let ya = ra * sa;
            let wa = wr1[i1] * wt[a1] * ra;
            let mut inner = 0.0;
            for (i2, &rb) in r2.iter().enumerate() {
                for (a2, (&cb, &sb)) in cos_t.iter().zip(&sin_t).enumerate() {
                    let dx = xa - (rb * cb + d);
                    let dy = ya - rb * sb;
                    let s = dx.hypot(dy);
                    inner += kernel(s) * rb * wr2[i2] * wt[a2];
                }
            }
            total += wa * inner;
        }
    }
    total / (PI * rho_i * rho_i * PI * rho_j * rho_j).sqrt()
}

/// R^(0)-type pairing: -(1/2 pi) double integral of log|x-y|, normalised.
pub fn pairing_static(di: &Disk, dj: &Disk, order: usize) -> Result<Complex64> {
    let v = match check_pair_geometry(di, dj)? {
        PairKind::SelfTerm => {
            let rho = di.radius;
            di.area() * disk_self_mean(|s| -s.ln() / (2.0 * PI), rho)
        }
        PairKind::Cross(d) => {
            cross_pairing_real(|s| -s.ln() / (2.0 * PI), di.radius, dj.radius, d, order)
        }
    };
    if !v.is_finite() {
        return Err(Error::Quadrature {
            what: "pairing_static",
            estimate: f64::INFINITY,
            tol: 0.0,
        });
    }
    Ok(Complex64::new(v, 0.0))
}

/// R^(1)-type pairing: -(i/4 pi) double integral of 1/|x-y|, normalised.
pub fn pairing_deriv(di: &Disk, dj: &Disk, order: usize) -> Result<Complex64> {
    let v = match check_pair_geometry(di, dj)? {
        PairKind::SelfTerm => {
            let rho = di.radius;
            di.area() * disk_self_mean(|s| 1.0 / (4.0 * PI * s), rho)
        }
        PairKind::Cross(d) => {
            cross_pairing_real(|s| 1.0 / (4.0 * PI * s), di.radius, dj.radius, d, order)
        }
    };
    if !v.is_finite() {
        return Err(Error::Quadrature {
            what: "pairing_deriv",
            estimate: f64::INFINITY,
            tol: 0.0,
        });
    }
    Ok(Complex64::new(0.0, -v))
}

/// Off-diagonal pairing of the asymptotic operator:
/// K-hat + R^(0) + (delta k0)^2 log(delta k0 gamma-hat) R^(1).
pub fn coupling_n(
    di: &Disk,
    dj: &Disk,
    delta: f64,
    k0: Complex64,
    gamma_hat: f64,
    order: usize,
) -> Result<Complex64> {
    let khat = pairing_khat(di, dj, delta, k0, gamma_hat)?;
    let stat = pairing_static(di, dj, order)?;
    let derv = pairing_deriv(di, dj, order)?;
    let dk0 = delta * k0;
    let weight = dk0 * dk0 * log_gdk(delta, k0, gamma_hat)?;
    Ok(khat + stat + weight * derv)
}

/// Mean of e^{i lambda s} / (4 pi s) over two disjoint balls at centre
/// distance d, reduced to nested one-dimensional rules through sphere
/// averages of the radial kernel (the innermost s-integral is analytic).
fn ball_cross_mean_helmholtz(
    rho_i: f64,
    rho_j: f64,
    d: f64,
    lambda: Complex64,
    order: usize,
) -> Complex64 {
    let gl = GaussLegendre::order(order);
    let (rx, wrx) = gl.mapped(0.0, rho_i);
    let (ry, wry) = gl.mapped(0.0, rho_j);
    let small = lambda.norm() < 1e-14;
    let phase_integral = |a: f64, b: f64| -> Complex64 {
        if small {
            Complex64::new((b - a) / (4.0 * PI), 0.0)
        } else {
            let il = Complex64::i() * lambda;
            ((il * b).exp() - (il * a).exp()) / (4.0 * PI * il)
        }
    };
    let mut total = Complex64::new(0.0, 0.0);
    for (i, &rxv) in rx.iter().enumerate() {
        let dens_x = 3.0 * rxv * rxv / rho_i.powi(3);
        let (tt, wt) = gl.mapped(d - rxv, d + rxv);
        for (j, &ryv) in ry.iter().enumerate() {
            let dens_y = 3.0 * ryv * ryv / rho_j.powi(3);
            let mut mid = Complex64::new(0.0, 0.0);
            for (m, &t) in tt.iter().enumerate() {
                let sphere_mean = phase_integral((t - ryv).abs(), t + ryv) / (2.0 * t * ryv);
                mid += wt[m] * (t / (2.0 * rxv * d)) * sphere_mean;
            }
            total += wrx[i] * wry[j] * dens_x * dens_y * mid;
        }
    }
    total
}

/// 3D pairing of the full Helmholtz operator against indicators:
/// sqrt(|D_i||D_j|) * mean of e^{i delta k0 s}/(4 pi s).
pub fn pairing_helmholtz_3d(
    di: &Disk,
    dj: &Disk,
    delta_k0: Complex64,
    order: usize,
) -> Result<Complex64> {
    let v = match check_pair_geometry(di, dj)? {
        PairKind::SelfTerm => {
            let rho = di.radius;
            let re = ball_self_mean(|s| (delta_k0.re * s).cos() / (4.0 * PI * s), rho);
            let im = ball_self_mean(|s| (delta_k0.re * s).sin() / (4.0 * PI * s), rho);
            // frozen delta k0 is real in every supported path
            di.volume() * Complex64::new(re, im)
        }
        PairKind::Cross(d) => {
            (di.volume() * dj.volume()).sqrt()
                * ball_cross_mean_helmholtz(di.radius, dj.radius, d, delta_k0, order)
        }
    };
    if !v.is_finite() {
        return Err(Error::Quadrature {
            what: "pairing_helmholtz_3d",
            estimate: f64::INFINITY,
            tol: 0.0,
        });
    }
    Ok(v)
}

/// Self eigenvalue of the single-resonator potential: nu (2D, asymptotic
/// kernel split) or lambda (3D, full kernel at the frozen delta k0).
pub fn self_eigenvalue(
    di: &Disk,
    delta: f64,
    k0: Complex64,
    gamma_hat: f64,
    dim: Dim,
    order: usize,
) -> Result<Complex64> {
    match dim {
        Dim::Two => {
            let khat = pairing_khat(di, di, delta, k0, gamma_hat)?;
            let stat = pairing_static(di, di, order)?;
            let derv = pairing_deriv(di, di, order)?;
            let dk0 = delta * k0;
            let weight = dk0 * dk0 * log_gdk(delta, k0, gamma_hat)?;
            Ok(khat + stat + weight * derv)
        }
        Dim::Three => pairing_helmholtz_3d(di, di, delta * k0, order),
    }
}

/// Dilute linearisation constants of the off-diagonal pairings:
/// N_ij ~ S + Q dist(D_i, D_j) for identical disks of radius rho.
pub fn dilute_constants(
    rho: f64,
    delta: f64,
    k0: Complex64,
    gamma_hat: f64,
) -> Result<(Complex64, Complex64)> {
    if rho.is_nan() || delta.is_nan() || rho <= 0.0 || delta <= 0.0 {
        return Err(Error::domain(
            "dilute_constants",
            "rho and delta must be > 0",
        ));
    }
    let l = log_gdk(delta, k0, gamma_hat)?;
    let dk0 = delta * k0;
    let weight = dk0 * dk0 * l;
    // distance-free integrals over the two unit polar domains, reduced
    // through the pair-distance density; mean |A| scales linearly in rho
    let mean_a = disk_self_mean(|s| s, rho);
    let k_ij = -l / (2.0 * PI) * (PI * rho * rho);
    let r0 = Complex64::new(-(rho * rho / 2.0) * (mean_a - 1.0), 0.0);
    let r1 = Complex64::new(0.0, -(rho * rho / 4.0) * (2.0 - mean_a));
    let s = k_ij + r0 + weight * r1;
    let q = Complex64::new(-rho * rho / 2.0, 0.0) - Complex64::i() * (rho * rho / 4.0) * weight;
    Ok((s, q))
}

/// Assemble every pairing of a configuration at one frozen delta k0.
///
/// The off-diagonal entries are independent and evaluated in parallel;
/// results land in pre-assigned slots so the output does not depend on
/// scheduling order.
pub fn build_coupling_set(
    config: &Configuration,
    material: &Material,
    k: f64,
    opts: &CouplingOpts,
) -> Result<CouplingSet> {
    config.validate()?;
    material.validate()?;
    let omega_ref = opts
        .reference_omega
        .unwrap_or_else(|| material.reference_omega(k));
    let k0 = material.background_wavenumber(Complex64::new(omega_ref, 0.0), opts.k0_convention);
    build_coupling_set_at_k0(config, k0, opts)
}

/// Same as [`build_coupling_set`] with the background wavenumber supplied
/// directly (used by the per-frequency re-evaluation mode).
pub fn build_coupling_set_at_k0(
    config: &Configuration,
    k0: Complex64,
    opts: &CouplingOpts,
) -> Result<CouplingSet> {
    let n = config.len();
    let delta = config.delta;
    let rho0 = config.disks[0].radius;
    let (s_const, q_const) = dilute_constants(rho0, delta, k0, opts.gamma_hat)?;

    if opts.mode == PairingMode::Dilute {
        let identical = config.disks.iter().all(|d| d.radius == rho0);
        if !identical {
            return Err(Error::domain(
                "build_coupling_set",
                "dilute mode requires identical radii",
            ));
        }
        if config.dim == Dim::Three {
            return Err(Error::domain(
                "build_coupling_set",
                "dilute mode is a 2D linearisation",
            ));
        }
    }

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i..n {
            pairs.push((i, j));
        }
    }
    let entries: Vec<((usize, usize), Result<Complex64>)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let di = &config.disks[i];
            let dj = &config.disks[j];
            let v = if i == j {
                self_eigenvalue(di, delta, k0, opts.gamma_hat, config.dim, opts.order)
            } else {
                match (config.dim, opts.mode) {
                    (Dim::Two, PairingMode::Quadrature) => {
                        coupling_n(di, dj, delta, k0, opts.gamma_hat, opts.order)
                    }
                    (Dim::Two, PairingMode::Dilute) => {
                        Ok(s_const + q_const * di.center_distance(dj))
                    }
                    (Dim::Three, _) => pairing_helmholtz_3d(di, dj, delta * k0, opts.order),
                }
            };
            ((i, j), v)
        })
        .collect();

    let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for ((i, j), v) in entries {
        let v = v?;
        m[i][j] = v;
        m[j][i] = v;
    }
    Ok(CouplingSet {
        n_pairs: m,
        gamma_hat: opts.gamma_hat,
        s_const,
        q_const,
        delta_k0: delta * k0,
        delta,
        dim: config.dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn disk(x: f64, y: f64, r: f64) -> Disk {
        Disk::new([x, y], r).unwrap()
    }

    #[test]
    fn khat_closed_forms() {
        let d1 = disk(0.0, 0.0, 0.3);
        let d2 = disk(2.0, 0.0, 0.3);
        // gamma_hat * delta * k0 = 1 kills the log
        let v = pairing_khat(&d1, &d2, 0.5, Complex64::new(2.0, 0.0), 1.0).unwrap();
        assert_abs_diff_eq!(v.norm(), 0.0, epsilon = 1e-15);
        // log e = 1 with unit areas
        let r_unit = (1.0f64 / PI).sqrt();
        let u1 = disk(0.0, 0.0, r_unit);
        let u2 = disk(3.0, 0.0, r_unit);
        let v = pairing_khat(&u1, &u2, 1.0, Complex64::new(std::f64::consts::E, 0.0), 1.0).unwrap();
        assert_abs_diff_eq!(v.re, -1.0 / (2.0 * PI), epsilon = 1e-14);
        // rho = 0.1 disks, gamma_hat delta k0 = 0.01
        let s1 = disk(0.0, 0.0, 0.1);
        let s2 = disk(1.0, 0.0, 0.1);
        let v = pairing_khat(&s1, &s2, 1.0, Complex64::new(0.01, 0.0), 1.0).unwrap();
        assert_abs_diff_eq!(
            v.re,
            -(0.01f64.ln()) / (2.0 * PI) * PI * 0.01,
            epsilon = 1e-15
        );
    }

    #[test]
    fn khat_rejects_nonpositive_real_branch() {
        let d1 = disk(0.0, 0.0, 0.3);
        assert!(pairing_khat(&d1, &d1, 1.0, Complex64::new(-1.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn static_self_matches_mean_log_identity() {
        // -(1/2 pi)(pi rho^2)(log rho - 1/4)
        for rho in [0.05, 0.1, 0.5] {
            let d = disk(0.4, -0.2, rho);
            let v = pairing_static(&d, &d, DEFAULT_QUAD_ORDER).unwrap();
            let exact = -(PI * rho * rho) / (2.0 * PI) * (rho.ln() - 0.25);
            assert_abs_diff_eq!(v.re, exact, epsilon = 1e-8 * exact.abs().max(1.0));
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn static_cross_matches_harmonic_mean_value() {
        // log|x-y| averaged over two disjoint disks is exactly log d
        for (rho, d, tol) in [(0.1, 1.3, 1e-12), (0.25, 0.8, 1e-8), (0.02, 5.0, 1e-12)] {
            let d1 = disk(0.0, 0.0, rho);
            let d2 = disk(d, 0.0, rho);
            let v = pairing_static(&d1, &d2, DEFAULT_QUAD_ORDER).unwrap();
            let exact = -(PI * rho * rho) / (2.0 * PI) * d.ln();
            assert!(
                (v.re - exact).abs() <= tol * exact.abs(),
                "rho {rho} d {d}: rel {}",
                (v.re - exact).abs() / exact.abs()
            );
        }
    }

    #[test]
    fn static_translation_invariance() {
        let d1 = disk(0.0, 0.0, 0.1);
        let d2 = disk(1.1, 0.4, 0.15);
        let shift = [3.7, -2.2];
        let e1 = disk(shift[0], shift[1], 0.1);
        let e2 = disk(1.1 + shift[0], 0.4 + shift[1], 0.15);
        let a = pairing_static(&d1, &d2, 20).unwrap();
        let b = pairing_static(&e1, &e2, 20).unwrap();
        assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-12);
    }

    #[test]
    fn deriv_pairing_structure() {
        let d1 = disk(0.0, 0.0, 0.1);
        let d2 = disk(1.0, 0.0, 0.1);
        let v = pairing_deriv(&d1, &d2, DEFAULT_QUAD_ORDER).unwrap();
        assert_eq!(v.re, 0.0);
        assert!(v.im < 0.0);
        // far-field point approximation at d = 100 rho
        let far = disk(10.0, 0.0, 0.1);
        let v = pairing_deriv(&d1, &far, DEFAULT_QUAD_ORDER).unwrap();
        let point = -(PI * 0.1 * 0.1) / (4.0 * PI * 10.0);
        assert!((v.im - point).abs() / point.abs() < 1e-3);
    }

    #[test]
    fn deriv_self_matches_closed_form() {
        // E[1/|x-y|] over a disk of radius rho is 16/(3 pi rho):
        // pairing = -(i/4 pi) * area * E = -i (4 rho)/(3 pi)
        let rho = 0.35;
        let d = disk(0.0, 0.0, rho);
        let v = pairing_deriv(&d, &d, DEFAULT_QUAD_ORDER).unwrap();
        assert_abs_diff_eq!(v.im, -4.0 * rho / (3.0 * PI), epsilon = 1e-10);
    }

    #[test]
    fn overlap_rejected() {
        let d1 = disk(0.0, 0.0, 0.5);
        let d2 = disk(0.7, 0.0, 0.5);
        assert!(matches!(
            pairing_static(&d1, &d2, 8),
            Err(Error::Overlap { .. })
        ));
    }

    #[test]
    fn coupling_n_symmetry_and_log_reduction() {
        let d1 = disk(0.0, 0.0, 0.1);
        let d2 = disk(0.9, 0.3, 0.12);
        let k0 = Complex64::new(4.0, 0.0);
        let a = coupling_n(&d1, &d2, 0.02, k0, GAMMA_HAT_DEFAULT, DEFAULT_QUAD_ORDER).unwrap();
        let b = coupling_n(&d2, &d1, 0.02, k0, GAMMA_HAT_DEFAULT, DEFAULT_QUAD_ORDER).unwrap();
        assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        // gamma_hat delta k0 = 1: only the static term survives
        let v = coupling_n(
            &d1,
            &d2,
            0.5,
            Complex64::new(2.0, 0.0),
            1.0,
            DEFAULT_QUAD_ORDER,
        )
        .unwrap();
        let s = pairing_static(&d1, &d2, DEFAULT_QUAD_ORDER).unwrap();
        assert_abs_diff_eq!((v - s).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn coupling_n_matches_high_order_refinement() {
        let d1 = disk(0.0, 0.0, 0.1);
        let d2 = disk(1.0, 0.0, 0.1);
        let k0 = Complex64::new(1.0, 0.0);
        let delta = 0.05; // delta k0 = 0.05
        let g = GAMMA_HAT_DEFAULT;
        let prod = coupling_n(&d1, &d2, delta, k0, g, DEFAULT_QUAD_ORDER).unwrap();
        let refined = coupling_n(&d1, &d2, delta, k0, g, 64).unwrap();
        assert!((prod - refined).norm() <= 1e-8 * refined.norm());
    }

    #[test]
    fn quadrature_order_doubling_is_converged() {
        let d1 = disk(0.0, 0.0, 0.1);
        let d2 = disk(0.6, -0.5, 0.14);
        let a = pairing_static(&d1, &d2, DEFAULT_QUAD_ORDER).unwrap();
        let b = pairing_static(&d1, &d2, 2 * DEFAULT_QUAD_ORDER).unwrap();
        assert!((a - b).norm() < 1e-9 * b.norm().max(1e-12));
        let a = pairing_deriv(&d1, &d2, DEFAULT_QUAD_ORDER).unwrap();
        let b = pairing_deriv(&d1, &d2, 2 * DEFAULT_QUAD_ORDER).unwrap();
        assert!((a - b).norm() < 1e-9 * b.norm().max(1e-12));
    }

    #[test]
    fn self_eigenvalue_reduces_to_static_when_logs_vanish() {
        // gamma_hat * delta * k0 = 1 kills both the K-hat term and the
        // (delta k0)^2 log weight, leaving exactly the static self term
        let d = disk(0.0, 0.0, 0.25);
        let nu = self_eigenvalue(
            &d,
            0.5,
            Complex64::new(2.0, 0.0),
            1.0,
            Dim::Two,
            DEFAULT_QUAD_ORDER,
        )
        .unwrap();
        let stat = pairing_static(&d, &d, DEFAULT_QUAD_ORDER).unwrap();
        assert_abs_diff_eq!((nu - stat).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn dilute_constants_limits() {
        // (delta k0)^2 log -> 0 leaves Q -> -rho^2/2
        let (_, q) =
            dilute_constants(0.3, 1e-6, Complex64::new(1.0, 0.0), GAMMA_HAT_DEFAULT).unwrap();
        assert_abs_diff_eq!(q.re, -0.045, epsilon = 1e-9);
        assert_abs_diff_eq!(q.im, 0.0, epsilon = 1e-9);
        // rho = 1 and weight = 4 gives Q = -1/2 - i
        // (weight enters Q only through (delta k0)^2 log(delta k0 gamma_hat))
        // pick delta k0 and gamma_hat so the weight is exactly 4:
        // (dk0)^2 ln(dk0 g) = 4 with dk0 = 2, g chosen so ln(2 g) = 1 -> g = e/2
        let g = std::f64::consts::E / 2.0;
        let (_, q) = dilute_constants(1.0, 2.0, Complex64::new(1.0, 0.0), g).unwrap();
        assert_abs_diff_eq!(q.re, -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(q.im, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn dilute_linearity_near_unit_separation() {
        // the linearisation is a tangent at unit separation; within
        // [0.5, 1.5] it tracks the quadrature pairing to 5% relative
        let rho = 0.01;
        let delta = 0.01;
        let k0 = Complex64::new(1.0, 0.0);
        let (s, q) = dilute_constants(rho, delta, k0, GAMMA_HAT_DEFAULT).unwrap();
        for d in [0.5, 0.75, 1.0, 1.25, 1.5] {
            let d1 = disk(0.0, 0.0, rho);
            let d2 = disk(d, 0.0, rho);
            let full =
                coupling_n(&d1, &d2, delta, k0, GAMMA_HAT_DEFAULT, DEFAULT_QUAD_ORDER).unwrap();
            let lin = s + q * d;
            assert!(
                (full - lin).norm() / full.norm() < 0.05,
                "d = {d}: rel dev {}",
                (full - lin).norm() / full.norm()
            );
        }
    }

    #[test]
    fn lemma_small_circle_shift_bound() {
        // | |R e^{it} + d| - (|R e^{it}| + d) | <= c R uniformly in t
        let d = 2.0;
        for r in [0.1, 0.05, 0.025] {
            let mut worst: f64 = 0.0;
            for i in 0..720 {
                let t = 2.0 * PI * i as f64 / 720.0;
                let a = Complex64::new(r * t.cos(), r * t.sin());
                let lhs = (a + d).norm();
                let rhs = a.norm() + d;
                worst = worst.max((lhs - rhs).abs());
            }
            assert!(worst <= 2.05 * r, "R = {r}: worst {worst}");
        }
    }

    #[test]
    fn build_set_single_disk() {
        let cfg = Configuration::new(vec![disk(0.0, 0.0, 0.2)], 0.05, Dim::Two).unwrap();
        let mat = Material::new(1.0, 1.0, 50.0, 25.0, 0.1, 0.2).unwrap();
        let set = build_coupling_set(&cfg, &mat, 1.0, &CouplingOpts::default()).unwrap();
        assert_eq!(set.n(), 1);
        let nu = self_eigenvalue(
            &cfg.disks[0],
            0.05,
            mat.background_wavenumber(
                Complex64::new(mat.reference_omega(1.0), 0.0),
                K0Convention::Product,
            ),
            GAMMA_HAT_DEFAULT,
            Dim::Two,
            DEFAULT_QUAD_ORDER,
        )
        .unwrap();
        assert_abs_diff_eq!((set.self_eigenvalue(0) - nu).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn build_set_equilateral_and_scalene() {
        let mat = Material::new(1.0, 1.0, 50.0, 25.0, 0.1, 0.2).unwrap();
        let h = 3.0f64.sqrt() / 2.0;
        let eq = Configuration::new(
            vec![disk(0.0, 0.0, 0.2), disk(1.0, 0.0, 0.2), disk(0.5, h, 0.2)],
            0.05,
            Dim::Two,
        )
        .unwrap();
        let set = build_coupling_set(&eq, &mat, 1.0, &CouplingOpts::default()).unwrap();
        assert!((set.pairing(0, 1) - set.pairing(1, 2)).norm() < 1e-10);
        assert!((set.pairing(1, 2) - set.pairing(2, 0)).norm() < 1e-10);

        let sc = Configuration::from_distances(0.2, 0.9, 1.1, 1.0, 0.05).unwrap();
        let set = build_coupling_set(&sc, &mat, 1.0, &CouplingOpts::default()).unwrap();
        // all off-diagonals distinct and equal to the pairwise evaluation
        let k0 = mat.background_wavenumber(
            Complex64::new(mat.reference_omega(1.0), 0.0),
            K0Convention::Product,
        );
        for (i, j) in [(0usize, 1usize), (1, 2), (0, 2)] {
            let direct = coupling_n(
                &sc.disks[i],
                &sc.disks[j],
                0.05,
                k0,
                GAMMA_HAT_DEFAULT,
                DEFAULT_QUAD_ORDER,
            )
            .unwrap();
            assert!((set.pairing(i, j) - direct).norm() < 1e-14);
        }
        assert!((set.pairing(0, 1) - set.pairing(1, 2)).norm() > 1e-6);
        assert!((set.pairing(1, 2) - set.pairing(0, 2)).norm() > 1e-6);
    }

    #[test]
    fn from_distances_recovers_geometry() {
        let cfg = Configuration::from_distances(0.1, 0.9, 1.1, 1.0, 0.05).unwrap();
        assert_abs_diff_eq!(
            cfg.disks[0].center_distance(&cfg.disks[1]),
            0.9,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            cfg.disks[1].center_distance(&cfg.disks[2]),
            1.1,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            cfg.disks[0].center_distance(&cfg.disks[2]),
            1.0,
            epsilon = 1e-12
        );
        assert!(Configuration::from_distances(0.1, 3.0, 1.0, 1.0, 0.05).is_err());
    }
}
