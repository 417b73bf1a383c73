//! Inverse design: from three target frequencies to the admissible
//! characteristic size and the one-parameter family of separation
//! distances for three identical circular resonators.
//!
//! The whole pipeline lives inside the dilute linearisation
//! N_ij = S + Q dist(D_i, D_j): the size condition fixes delta, the
//! first two cubic equations fix the invariants X and Y, and each
//! choice of alpha3 then determines (alpha1, alpha2) up to sign
//! branches and the triangle condition.

use crate::coupling::{
    build_coupling_set, dilute_constants, self_eigenvalue, Configuration, CouplingOpts, Dim, Disk,
    PairingMode,
};
use crate::error::{Error, Result};
use crate::material::Material;
use crate::spectrum::{b_factor, three_particle_frequencies};
use num_complex::Complex64;
use rayon::prelude::*;

/// Relative tolerance below which a nominally real distance may carry
/// imaginary part (quadrature noise leaks a little when the size
/// condition holds only approximately).
pub const FILTER_TOL_DEFAULT: f64 = 1e-6;

/// Three prescribed resonant frequencies plus the fixed material data.
#[derive(Debug, Clone)]
pub struct DesignTargets {
    /// Targets sorted by ascending real part.
    pub omegas: [Complex64; 3],
    pub k: f64,
    pub material: Material,
    pub rho: f64,
}

impl DesignTargets {
    pub fn new(omegas: [Complex64; 3], k: f64, material: Material, rho: f64) -> Result<Self> {
        material.validate()?;
        if rho.is_nan() || rho <= 0.0 {
            return Err(Error::domain(
                "DesignTargets",
                format!("rho {rho} must be > 0"),
            ));
        }
        let mut sorted = omegas;
        sorted.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        for i in 0..3 {
            for j in (i + 1)..3 {
                let sep = (sorted[i] - sorted[j]).norm();
                if sep <= 1e-12 * sorted[i].norm().max(1.0) {
                    return Err(Error::DegenerateTargets {
                        detail: format!("targets {i} and {j} coincide ({})", sorted[i]),
                    });
                }
            }
        }
        Ok(DesignTargets {
            omegas: sorted,
            k,
            material,
            rho,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct InverseOpts {
    pub gamma_hat: f64,
    pub order: usize,
    pub k0_convention: crate::material::K0Convention,
    /// Frequency at which delta*k0 is frozen; defaults to the material's
    /// reference sqrt(beta + eta k^2) so forward and inverse agree.
    pub reference_omega: Option<f64>,
    pub filter_tol: f64,
}

impl Default for InverseOpts {
    fn default() -> Self {
        InverseOpts {
            gamma_hat: crate::coupling::GAMMA_HAT_DEFAULT,
            order: crate::coupling::DEFAULT_QUAD_ORDER,
            k0_convention: crate::material::K0Convention::default(),
            reference_omega: None,
            filter_tol: FILTER_TOL_DEFAULT,
        }
    }
}

impl InverseOpts {
    fn coupling_opts(&self, mode: PairingMode) -> CouplingOpts {
        CouplingOpts {
            gamma_hat: self.gamma_hat,
            order: self.order,
            mode,
            k0_convention: self.k0_convention,
            reference_omega: self.reference_omega,
        }
    }

    fn frozen_k0(&self, targets: &DesignTargets) -> Complex64 {
        let w = self
            .reference_omega
            .unwrap_or_else(|| targets.material.reference_omega(targets.k));
        targets
            .material
            .background_wavenumber(Complex64::new(w, 0.0), self.k0_convention)
    }
}

/// One admissible geometry: characteristic size, the distance triple,
/// the sign branch that produced it, and its round-trip quality.
#[derive(Debug, Clone, Copy)]
pub struct DesignSolution {
    pub delta: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    /// Signs (inner, outer) of the nested radicals that produced alpha2.
    pub branch: (i8, i8),
    pub triangle_ok: bool,
    /// Relative errors of the forward-solved frequencies against the
    /// targets, matched in ascending real part.
    pub residuals: [f64; 3],
    /// Residuals of the three cubic equations with X, Y rebuilt from the
    /// emitted distances.
    pub cubic_residuals: [f64; 3],
}

/// Family output plus the shared scalars and per-point diagnostics.
#[derive(Debug, Clone)]
pub struct DesignFamily {
    pub delta: f64,
    /// Imaginary mismatch of the size condition at the solved delta.
    pub imag_mismatch: f64,
    pub x_target: Complex64,
    pub y_target: Complex64,
    pub s_const: Complex64,
    pub q_const: Complex64,
    /// Residual of the third cubic equation at (X, Y): the consistency
    /// check that the size condition was supposed to enforce.
    pub third_equation_residual: f64,
    pub solutions: Vec<DesignSolution>,
    pub diagnostics: Vec<String>,
}

/// Right-hand side of the size condition: the value delta^2 nu(delta)
/// must take, assembled exactly from the printed products
/// omega^4 xi^2 and omega^6 xi^3.
pub fn delta_condition_target(targets: &DesignTargets) -> Result<Complex64> {
    let m = &targets.material;
    let k = targets.k;
    let mut u = [Complex64::new(0.0, 0.0); 3];
    for (i, w) in targets.omegas.iter().enumerate() {
        let xi = m.contrast(*w, k)?;
        if xi.norm() == 0.0 {
            return Err(Error::DegenerateTargets {
                detail: format!("xi({w}) = 0"),
            });
        }
        u[i] = w * w * xi;
    }
    let [u1, u2, u3] = u;
    let bracket1 = u1 * u1 * u3 * u3 * u3 - u1 * u1 * u1 * u3 * u3 + u2 * u2 * u2 * u3 * u3
        - u1 * u1 * u2 * u2 * u2
        + u1 * u1 * u1 * u2 * u2
        - u2 * u2 * u3 * u3 * u3;
    let bracket2 =
        u1 * u2 * u2 + u2 * u3 * u3 + u1 * u1 * u3 - u1 * u3 * u3 - u2 * u2 * u3 - u1 * u1 * u2;
    let scale = u.iter().map(|z| z.norm()).fold(0.0, f64::max).powi(3);
    if bracket2.norm() <= 1e-14 * scale {
        return Err(Error::DegenerateTargets {
            detail: format!("elimination denominator vanished (|{bracket2}|)"),
        });
    }
    let prod = u1 * u2 * u3;
    if prod.norm() == 0.0 {
        return Err(Error::DegenerateTargets {
            detail: "u1 u2 u3 = 0".into(),
        });
    }
    Ok(-bracket1 / (3.0 * prod * bracket2))
}

/// Self eigenvalue of one rho-disk at scale delta under the frozen k0.
pub fn nu_of_delta(targets: &DesignTargets, delta: f64, opts: &InverseOpts) -> Result<Complex64> {
    let disk = Disk::new([0.0, 0.0], targets.rho)?;
    let k0 = opts.frozen_k0(targets);
    self_eigenvalue(&disk, delta, k0, opts.gamma_hat, Dim::Two, opts.order)
}

#[derive(Debug, Clone, Copy)]
pub struct DeltaSolution {
    pub delta: f64,
    /// Re(delta^2 nu(delta) - target), the quantity the bisection drives
    /// to zero.
    pub real_residual: f64,
    /// Im(delta^2 nu(delta) - target); generally nonzero because a single
    /// real parameter cannot match a complex equation. Reported, never
    /// hidden.
    pub imag_mismatch: f64,
}

/// Bisection on the real part of delta^2 nu(delta) - target over the
/// given bracket.
pub fn solve_delta(
    targets: &DesignTargets,
    bracket: [f64; 2],
    opts: &InverseOpts,
) -> Result<DeltaSolution> {
    let t = delta_condition_target(targets)?;
    let f = |d: f64| -> Result<f64> {
        let nu = nu_of_delta(targets, d, opts)?;
        Ok((d * d * nu - t).re)
    };
    let (mut lo, mut hi) = (bracket[0], bracket[1]);
    if lo.is_nan() || hi.is_nan() || lo <= 0.0 || hi <= lo {
        return Err(Error::domain(
            "solve_delta",
            format!("bad bracket [{lo}, {hi}]"),
        ));
    }
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo * f_hi > 0.0 {
        return Err(Error::NoBracket { lo, hi, f_lo, f_hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_lo * f_mid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
        if hi - lo <= 1e-16 * hi {
            break;
        }
    }
    let delta = 0.5 * (lo + hi);
    let full = delta * delta * nu_of_delta(targets, delta, opts)? - t;
    if full.re.abs() > 1e-8 * (1.0 + t.norm()) {
        return Err(Error::NoConvergence {
            iterations: 200,
            last: Complex64::new(delta, 0.0),
        });
    }
    Ok(DeltaSolution {
        delta,
        real_residual: full.re,
        imag_mismatch: full.im,
    })
}

/// The invariants X = N12 N23 N13 and Y = N12^2 + N23^2 + N13^2 solving
/// the first two cubic equations for the B values b1, b2.
pub fn xy_targets(b1: Complex64, b2: Complex64) -> Result<(Complex64, Complex64)> {
    let sep = (b1 - b2).norm();
    if sep <= 1e-12 * b1.norm().max(b2.norm()) {
        return Err(Error::DegenerateB { separation: sep });
    }
    if b1.norm() == 0.0 || b2.norm() == 0.0 {
        return Err(Error::DegenerateB { separation: sep });
    }
    let x = (b2 * b2 * (b2 - b1) - (b2 * b2 * b2 - b1 * b1 * b1))
        / (2.0 * b1 * b2 * b2 * (b2 * b1 * b1 - b1 * b1 * b1));
    let y = (b2 * b2 * b2 - b1 * b1 * b1) / (b1 * b1 * b2 * b2 * (b2 - b1));
    Ok((x, y))
}

/// A surviving candidate for alpha2 at a fixed alpha3.
#[derive(Debug, Clone, Copy)]
pub struct Alpha2Candidate {
    pub branch: (i8, i8),
    pub value: f64,
}

/// All four (inner, outer) sign branches of the alpha2 radical, filtered
/// to near-real values describing disjoint disks.
pub fn alpha2_of_alpha3(
    alpha3: f64,
    s: Complex64,
    q: Complex64,
    x: Complex64,
    y: Complex64,
    rho: f64,
    filter_tol: f64,
) -> Result<Vec<Alpha2Candidate>> {
    let n3 = s + q * alpha3;
    if n3.norm() <= 1e-14 * s.norm().max(1.0) {
        return Err(Error::DegenerateFactor {
            what: "S + Q alpha3",
            magnitude: n3.norm(),
        });
    }
    let c = n3 * n3 * (n3 * n3 - y);
    let inner = (c * c - 4.0 * x * x * n3 * n3).sqrt();
    let mut out = Vec::new();
    let mut reasons = Vec::new();
    for s_in in [1i8, -1i8] {
        let z = (-c + f64::from(s_in) * inner) / (2.0 * n3 * n3);
        let root = z.sqrt();
        for s_out in [1i8, -1i8] {
            let val = (-s + f64::from(s_out) * root) / q;
            let tol = filter_tol * (1.0 + val.norm());
            if val.im.abs() >= tol {
                reasons.push(format!(
                    "branch ({s_in:+},{s_out:+}): imaginary part {:.3e}",
                    val.im
                ));
                continue;
            }
            if val.re <= 2.0 * rho {
                reasons.push(format!(
                    "branch ({s_in:+},{s_out:+}): alpha2 {:.6e} <= 2 rho",
                    val.re
                ));
                continue;
            }
            out.push(Alpha2Candidate {
                branch: (s_in, s_out),
                value: val.re,
            });
        }
    }
    if out.is_empty() {
        return Err(Error::AllBranchesRejected { reasons });
    }
    Ok(out)
}

/// alpha1 from the product constraint (S + Q a1)(S + Q a2)(S + Q a3) = X.
pub fn alpha1_of_alpha3(
    alpha3: f64,
    alpha2: f64,
    s: Complex64,
    q: Complex64,
    x: Complex64,
    filter_tol: f64,
) -> Result<f64> {
    let f2 = s + q * alpha2;
    let f3 = s + q * alpha3;
    for (name, f) in [("S + Q alpha2", f2), ("S + Q alpha3", f3)] {
        if f.norm() <= 1e-14 * s.norm().max(1.0) {
            return Err(Error::DegenerateFactor {
                what: match name {
                    "S + Q alpha2" => "S + Q alpha2",
                    _ => "S + Q alpha3",
                },
                magnitude: f.norm(),
            });
        }
    }
    let val = (x / (f2 * f3) - s) / q;
    let tol = filter_tol * (1.0 + val.norm());
    if val.im.abs() >= tol {
        return Err(Error::ComplexLeak {
            what: "alpha1",
            imag: val.im.abs(),
            tol,
        });
    }
    Ok(val.re)
}

/// Triangle realisability of the distance triple:
/// |a3 - a2| <= a1 <= |a3 + a2|.
pub fn triangle_filter(alpha1: f64, alpha2: f64, alpha3: f64) -> bool {
    (alpha3 - alpha2).abs() <= alpha1 && alpha1 <= (alpha3 + alpha2).abs()
}

/// Log-spaced default grid for alpha3: 64 points over [4 rho, 100 rho].
pub fn default_alpha3_grid(rho: f64) -> Vec<f64> {
    let n = 64;
    let lo = (4.0 * rho).ln();
    let hi = (100.0 * rho).ln();
    (0..n)
        .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Run the full pipeline: solve delta, fix (X, Y), then walk the alpha3
/// grid emitting every admissible branch. Grid points are independent
/// and processed in parallel; output is sorted by (alpha3, branch).
pub fn design_family(
    targets: &DesignTargets,
    alpha3_grid: &[f64],
    delta_bracket: [f64; 2],
    opts: &InverseOpts,
) -> Result<DesignFamily> {
    let sol = solve_delta(targets, delta_bracket, opts)?;
    let delta = sol.delta;
    let nu = nu_of_delta(targets, delta, opts)?;
    let k0 = opts.frozen_k0(targets);
    let (s, q) = dilute_constants(targets.rho, delta, k0, opts.gamma_hat)?;
    let m = &targets.material;
    let b: Vec<Complex64> = targets
        .omegas
        .iter()
        .map(|&w| b_factor(m, w, targets.k, delta, nu))
        .collect::<Result<_>>()?;
    let (x, y) = xy_targets(b[0], b[1])?;
    let third = (2.0 * b[2] * b[2] * b[2] * x + b[2] * b[2] * y - 1.0).norm();

    let per_point: Vec<(f64, std::result::Result<Vec<DesignSolution>, String>)> = alpha3_grid
        .par_iter()
        .map(|&a3| {
            let r = evaluate_point(targets, a3, delta, s, q, x, y, b.as_slice(), opts);
            (a3, r)
        })
        .collect();

    let mut family = DesignFamily {
        delta,
        imag_mismatch: sol.imag_mismatch,
        x_target: x,
        y_target: y,
        s_const: s,
        q_const: q,
        third_equation_residual: third,
        solutions: Vec::new(),
        diagnostics: Vec::new(),
    };
    for (a3, r) in per_point {
        match r {
            Ok(sols) => family.solutions.extend(sols),
            Err(msg) => family.diagnostics.push(format!("alpha3 = {a3:.6e}: {msg}")),
        }
    }
    family.solutions.sort_by(|p, r| {
        (p.alpha3, p.branch)
            .partial_cmp(&(r.alpha3, r.branch))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(family)
}

#[allow(clippy::too_many_arguments)]
fn evaluate_point(
    targets: &DesignTargets,
    alpha3: f64,
    delta: f64,
    s: Complex64,
    q: Complex64,
    x: Complex64,
    y: Complex64,
    b: &[Complex64],
    opts: &InverseOpts,
) -> std::result::Result<Vec<DesignSolution>, String> {
    let cands = alpha2_of_alpha3(alpha3, s, q, x, y, targets.rho, opts.filter_tol)
        .map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    let mut reasons = Vec::new();
    for cand in cands {
        let alpha2 = cand.value;
        let alpha1 = match alpha1_of_alpha3(alpha3, alpha2, s, q, x, opts.filter_tol) {
            Ok(v) => v,
            Err(e) => {
                reasons.push(format!("branch {:?}: {e}", cand.branch));
                continue;
            }
        };
        if alpha1 <= 2.0 * targets.rho {
            reasons.push(format!(
                "branch {:?}: alpha1 {alpha1:.6e} <= 2 rho",
                cand.branch
            ));
            continue;
        }
        if !triangle_filter(alpha1, alpha2, alpha3) {
            reasons.push(format!(
                "branch {:?}: ({alpha1:.4e}, {alpha2:.4e}, {alpha3:.4e}) fails the triangle condition",
                cand.branch
            ));
            continue;
        }
        // d-system residuals with X, Y rebuilt from the emitted distances
        let n1 = s + q * alpha1;
        let n2 = s + q * alpha2;
        let n3 = s + q * alpha3;
        let xh = n1 * n2 * n3;
        let yh = n1 * n1 + n2 * n2 + n3 * n3;
        let mut cubic_residuals = [0.0; 3];
        for (i, &bi) in b.iter().enumerate() {
            cubic_residuals[i] = (2.0 * bi * bi * bi * xh + bi * bi * yh - 1.0).norm();
        }
        if cubic_residuals.iter().any(|r| !r.is_finite()) {
            reasons.push(format!(
                "branch {:?}: non-finite cubic residual",
                cand.branch
            ));
            continue;
        }
        let mut solution = DesignSolution {
            delta,
            alpha1,
            alpha2,
            alpha3,
            branch: cand.branch,
            triangle_ok: true,
            residuals: [f64::NAN; 3],
            cubic_residuals,
        };
        match verify_design(&solution, targets, opts) {
            Ok(res) => solution.residuals = res,
            Err(e) => {
                reasons.push(format!(
                    "branch {:?}: forward verification failed: {e}",
                    cand.branch
                ));
                continue;
            }
        }
        out.push(solution);
    }
    if out.is_empty() {
        return Err(reasons.join("; "));
    }
    Ok(out)
}

/// Forward-solve the designed geometry (dilute pairings, same frozen k0
/// convention) and compare against the targets, matched by ascending
/// real part.
pub fn verify_design(
    solution: &DesignSolution,
    targets: &DesignTargets,
    opts: &InverseOpts,
) -> Result<[f64; 3]> {
    let cfg = Configuration::from_distances(
        targets.rho,
        solution.alpha1,
        solution.alpha2,
        solution.alpha3,
        solution.delta,
    )?;
    let set = build_coupling_set(
        &cfg,
        &targets.material,
        targets.k,
        &opts.coupling_opts(PairingMode::Dilute),
    )?;
    let rs = three_particle_frequencies(&set, &targets.material, targets.k)?;
    let mut out = [0.0; 3];
    for (slot, (root, target)) in out.iter_mut().zip(rs.roots.iter().zip(&targets.omegas)) {
        *slot = (root.omega - target).norm() / target.norm().max(1e-300);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::GAMMA_HAT_DEFAULT;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_material() -> Material {
        Material::new(1.0, 1.0, 50.0, 25.0, 0.1, 0.2).unwrap()
    }

    /// Forward-generate a target triple from a known geometry in the
    /// dilute model; returns (targets, delta_star).
    fn forward_targets(rho: f64, a: [f64; 3], delta: f64) -> (DesignTargets, f64) {
        let mat = sample_material();
        let k = 1.0;
        let cfg = Configuration::from_distances(rho, a[0], a[1], a[2], delta).unwrap();
        let set = build_coupling_set(
            &cfg,
            &mat,
            k,
            &InverseOpts::default().coupling_opts(PairingMode::Dilute),
        )
        .unwrap();
        let rs = three_particle_frequencies(&set, &mat, k).unwrap();
        let omegas = [rs.roots[0].omega, rs.roots[1].omega, rs.roots[2].omega];
        (DesignTargets::new(omegas, k, mat, rho).unwrap(), delta)
    }

    #[test]
    fn rejects_coincident_targets() {
        let m = sample_material();
        let w = c(5.0, -0.05);
        assert!(matches!(
            DesignTargets::new([w, w, c(5.1, -0.05)], 1.0, m, 0.1),
            Err(Error::DegenerateTargets { .. })
        ));
    }

    #[test]
    fn delta_condition_matches_symmetric_form() {
        // the printed product form equals (u1 u2 + u1 u3 + u2 u3)/(3 u1 u2 u3)
        let (targets, _) = forward_targets(0.2, [0.9, 1.1, 1.0], 0.06);
        let t = delta_condition_target(&targets).unwrap();
        let m = &targets.material;
        let u: Vec<Complex64> = targets
            .omegas
            .iter()
            .map(|&w| w * w * m.contrast(w, targets.k).unwrap())
            .collect();
        let simple = (u[0] * u[1] + u[0] * u[2] + u[1] * u[2]) / (3.0 * u[0] * u[1] * u[2]);
        assert!((t - simple).norm() < 1e-12 * simple.norm());
    }

    #[test]
    fn delta_condition_swap_invariance() {
        let (targets, _) = forward_targets(0.2, [0.9, 1.1, 1.0], 0.06);
        let t = delta_condition_target(&targets).unwrap();
        let swapped = DesignTargets {
            omegas: [targets.omegas[0], targets.omegas[2], targets.omegas[1]],
            ..targets.clone()
        };
        let t2 = delta_condition_target(&swapped).unwrap();
        assert!((t - t2).norm() < 1e-12 * t.norm());
    }

    #[test]
    fn delta_condition_consistency_with_generator() {
        let (targets, dstar) = forward_targets(0.2, [0.9, 1.1, 1.0], 0.06);
        let t = delta_condition_target(&targets).unwrap();
        let nu = nu_of_delta(&targets, dstar, &InverseOpts::default()).unwrap();
        let lhs = dstar * dstar * nu;
        assert!((lhs - t).norm() < 1e-6 * t.norm(), "{lhs} vs {t}");
    }

    #[test]
    fn solve_delta_round_trip_and_bracket_errors() {
        let (targets, dstar) = forward_targets(0.2, [0.9, 1.1, 1.0], 0.06);
        let opts = InverseOpts::default();
        let sol = solve_delta(&targets, [1e-3, 0.3], &opts).unwrap();
        assert!(
            (sol.delta - dstar).abs() < 1e-6 * dstar,
            "recovered {}",
            sol.delta
        );
        assert!(sol.real_residual.abs() < 1e-8 * (1.0 + 1.0));
        assert!(sol.imag_mismatch.abs() < 1e-10);
        // bracket excluding the root
        assert!(matches!(
            solve_delta(&targets, [0.2, 0.3], &opts),
            Err(Error::NoBracket { .. })
        ));
    }

    #[test]
    fn xy_targets_satisfy_both_equations() {
        for (b1, b2) in [
            (c(20.0, 1.0), c(-9.0, 0.4)),
            (c(0.5, -0.2), c(1.0, 1.0)),
            (c(3.0, 0.0), c(6.0, 0.0)), // (b, 2b) scaling case
        ] {
            let (x, y) = xy_targets(b1, b2).unwrap();
            let r1 = (2.0 * b1 * b1 * b1 * x + b1 * b1 * y - 1.0).norm();
            let r2 = (2.0 * b2 * b2 * b2 * x + b2 * b2 * y - 1.0).norm();
            assert!(r1 < 1e-10 && r2 < 1e-10, "residuals {r1} {r2}");
        }
        assert!(matches!(
            xy_targets(c(1.0, 0.5), c(1.0, 0.5)),
            Err(Error::DegenerateB { .. })
        ));
    }

    #[test]
    fn alpha2_rejects_degenerate_pivot() {
        // S + Q alpha3 = 0
        let s = c(0.02, 0.0);
        let q = c(-0.02, 0.0);
        assert!(matches!(
            alpha2_of_alpha3(1.0, s, q, c(1e-6, 0.0), c(1e-3, 0.0), 0.01, 1e-6),
            Err(Error::DegenerateFactor { .. })
        ));
    }

    #[test]
    fn triangle_filter_cases() {
        assert!(!triangle_filter(3.0, 1.0, 1.0));
        assert!(triangle_filter(1.0, 1.0, 1.0));
        assert!(triangle_filter(2.0, 1.5, 1.0));
        // symmetry under alpha2 <-> alpha3
        for (a1, a2, a3) in [(1.2, 0.7, 1.4), (0.5, 2.0, 2.3), (2.0, 1.0, 0.9)] {
            assert_eq!(triangle_filter(a1, a2, a3), triangle_filter(a1, a3, a2));
        }
    }

    #[test]
    fn round_trip_recovers_geometry() {
        let rho = 0.2;
        let a = [0.9, 1.1, 1.0];
        let (targets, dstar) = forward_targets(rho, a, 0.06);
        let opts = InverseOpts::default();
        let sol = solve_delta(&targets, [1e-3, 0.3], &opts).unwrap();
        let nu = nu_of_delta(&targets, sol.delta, &opts).unwrap();
        let k0 = opts.frozen_k0(&targets);
        let (s, q) = dilute_constants(rho, sol.delta, k0, GAMMA_HAT_DEFAULT).unwrap();
        let m = &targets.material;
        let b1 = b_factor(m, targets.omegas[0], targets.k, sol.delta, nu).unwrap();
        let b2 = b_factor(m, targets.omegas[1], targets.k, sol.delta, nu).unwrap();
        let (x, y) = xy_targets(b1, b2).unwrap();
        // the generating alpha2 appears among the branches at alpha3 = 1.0
        let cands = alpha2_of_alpha3(a[2], s, q, x, y, rho, opts.filter_tol).unwrap();
        let hit = cands
            .iter()
            .find(|cand| (cand.value - a[1]).abs() < 1e-6 * a[1]);
        assert!(hit.is_some(), "candidates {cands:?}");
        let alpha2 = hit.unwrap().value;
        let alpha1 = alpha1_of_alpha3(a[2], alpha2, s, q, x, opts.filter_tol).unwrap();
        assert_abs_diff_eq!(alpha1, a[0], epsilon = 1e-6 * a[0]);
        // product check
        let lhs = (s + q * alpha1) * (s + q * alpha2) * (s + q * a[2]);
        assert!((lhs - x).norm() < 1e-8 * x.norm());
        assert_abs_diff_eq!(sol.delta, dstar, epsilon = 1e-6 * dstar);
    }

    #[test]
    fn family_contains_generator_and_passes_filters() {
        let rho = 0.2;
        let a = [0.9, 1.1, 1.0];
        let (targets, dstar) = forward_targets(rho, a, 0.06);
        let opts = InverseOpts::default();
        let mut grid = vec![0.85, 0.95, 1.0, 1.05, 1.2];
        grid.push(2.0); // wide point likely rejected or far from generator
        let family = design_family(&targets, &grid, [1e-3, 0.3], &opts).unwrap();
        assert!(family.third_equation_residual < 1e-7);
        assert!((family.delta - dstar).abs() < 1e-6 * dstar);
        // every emitted solution passes the filters and the cubic system
        for sol in &family.solutions {
            assert!(sol.triangle_ok);
            assert!(sol.alpha1 > 2.0 * rho && sol.alpha2 > 2.0 * rho);
            for r in sol.cubic_residuals {
                assert!(r < 1e-7, "cubic residual {r}");
            }
        }
        // the generating geometry is present at alpha3 = 1.0
        let gen = family
            .solutions
            .iter()
            .find(|s| (s.alpha3 - 1.0).abs() < 1e-12 && (s.alpha2 - 1.1).abs() < 1e-5)
            .expect("generator not found in family");
        assert!((gen.alpha1 - 0.9).abs() < 1e-5 * 0.9);
        for r in gen.residuals {
            assert!(r < 1e-5, "round-trip residual {r}");
        }
    }

    #[test]
    fn branch_union_contains_every_positive_quadratic_solution() {
        // brute-force scan: the underlying constraint at fixed alpha3 is
        // a quartic in n2 = S + Q alpha2 (real instance):
        //   n3^2 n2^4 - n3^2 (Y - n3^2) n2^2 + X^2 = 0,
        // equivalently n2^2 in { z : n3^2 z^2 - n3^2 (Y - n3^2) z + X^2 = 0 }.
        // Every real-positive alpha2 crossing must appear among the four
        // (+-, +-) branches.
        let s = Complex64::new(0.05, 0.0);
        let q = Complex64::new(-0.02, 0.0);
        let (a1, a2, a3) = (0.9, 1.1, 1.0);
        let (n1, n2, n3) = (s + q * a1, s + q * a2, s + q * a3);
        let x = n1 * n2 * n3;
        let y = n1 * n1 + n2 * n2 + n3 * n3;
        let quartic = |alpha2: f64| -> f64 {
            let n = (s + q * alpha2).re;
            let n3r = n3.re;
            n3r * n3r * n.powi(4) - n3r * n3r * (y.re - n3r * n3r) * n * n + x.re * x.re
        };
        // dense sign-change scan on alpha2 in (0, 20]
        let mut crossings = Vec::new();
        let grid: Vec<f64> = (1..200_000).map(|i| 1e-4 * i as f64).collect();
        for w in grid.windows(2) {
            let (f0, f1) = (quartic(w[0]), quartic(w[1]));
            if f0 == 0.0 || f0 * f1 < 0.0 {
                // bisect for the crossing
                let (mut lo, mut hi) = (w[0], w[1]);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if quartic(lo) * quartic(mid) <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                crossings.push(0.5 * (lo + hi));
            }
        }
        assert!(!crossings.is_empty());
        let cands = alpha2_of_alpha3(a3, s, q, x, y, 1e-9, 1e-6).unwrap();
        for root in crossings {
            let hit = cands
                .iter()
                .any(|c| (c.value - root).abs() < 1e-6 * root.max(1.0));
            assert!(hit, "scan root {root} missing from branches {cands:?}");
        }
    }

    #[test]
    fn degenerate_pivot_grid_points_are_reported() {
        let rho = 0.2;
        let (targets, _) = forward_targets(rho, [0.9, 1.1, 1.0], 0.06);
        let opts = InverseOpts::default();
        // locate the real-axis zero of Re(S + Q alpha3)
        let sol = solve_delta(&targets, [1e-3, 0.3], &opts).unwrap();
        let k0 = opts.frozen_k0(&targets);
        let (s, q) = dilute_constants(rho, sol.delta, k0, GAMMA_HAT_DEFAULT).unwrap();
        let alpha3_zero = -(s.re / q.re);
        assert!(alpha3_zero > 0.0);
        let family = design_family(&targets, &[alpha3_zero, 1.0], [1e-3, 0.3], &opts).unwrap();
        // the near-singular point yields no solution and is reported
        assert!(family
            .solutions
            .iter()
            .all(|sln| (sln.alpha3 - alpha3_zero).abs() > 1e-9));
        assert!(
            family
                .diagnostics
                .iter()
                .any(|d| d.contains(&format!("{alpha3_zero:.6e}"))),
            "diagnostics: {:?}",
            family.diagnostics
        );
        // the healthy point still produces the generator
        assert!(family
            .solutions
            .iter()
            .any(|sln| (sln.alpha3 - 1.0).abs() < 1e-12));
    }

    #[test]
    fn verify_design_rejects_degenerate_triangle() {
        let (targets, dstar) = forward_targets(0.2, [0.9, 1.1, 1.0], 0.06);
        let bad = DesignSolution {
            delta: dstar,
            alpha1: 5.0,
            alpha2: 1.0,
            alpha3: 1.0,
            branch: (1, 1),
            triangle_ok: false,
            residuals: [0.0; 3],
            cubic_residuals: [0.0; 3],
        };
        assert!(verify_design(&bad, &targets, &InverseOpts::default()).is_err());
    }

    #[test]
    fn perturbing_alpha1_grows_residuals_monotonically() {
        let (targets, dstar) = forward_targets(0.2, [0.9, 1.1, 1.0], 0.06);
        let opts = InverseOpts::default();
        let mut worst = Vec::new();
        for pert in [0.01, 0.05, 0.10] {
            let sol = DesignSolution {
                delta: dstar,
                alpha1: 0.9 * (1.0 + pert),
                alpha2: 1.1,
                alpha3: 1.0,
                branch: (1, 1),
                triangle_ok: true,
                residuals: [0.0; 3],
                cubic_residuals: [0.0; 3],
            };
            let r = verify_design(&sol, &targets, &opts).unwrap();
            worst.push(r.iter().cloned().fold(0.0, f64::max));
        }
        assert!(worst[0] < worst[1] && worst[1] < worst[2], "{worst:?}");
    }
}
