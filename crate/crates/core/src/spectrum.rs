//! Resonance matrix assembly, determinant root search, and the closed
//! one-, two- and three-particle solvers.

use crate::coupling::{build_coupling_set_at_k0, Configuration, CouplingOpts, CouplingSet};
use crate::error::{Error, Result};
use crate::material::Material;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

/// Modified modulo: the unique r in (0, n] with m = t n + r, t >= 0.
pub fn modmod(m: usize, n: usize) -> Result<usize> {
    if m == 0 || n == 0 {
        return Err(Error::domain(
            "modmod",
            format!("inputs ({m}, {n}) must be >= 1"),
        ));
    }
    Ok((m - 1) % n + 1)
}

/// The rank-one response factor of one resonator:
/// B = delta^2 omega^2 xi / (1 - delta^2 omega^2 xi nu).
///
/// Its pole is the single-particle resonance condition.
pub fn b_factor(
    mat: &Material,
    omega: Complex64,
    k: f64,
    delta: f64,
    nu: Complex64,
) -> Result<Complex64> {
    let xi = mat.contrast(omega, k)?;
    let q = delta * delta * omega * omega * xi;
    let den = Complex64::new(1.0, 0.0) - q * nu;
    let guard = 1e-12 * (1.0 + (q * nu).norm());
    if den.norm() < guard {
        return Err(Error::Pole {
            magnitude: den.norm(),
            guard,
        });
    }
    Ok(q / den)
}

/// Everything needed to evaluate the resonance matrix at a frequency.
#[derive(Debug, Clone)]
pub struct ResonanceMatrixSpec {
    pub coupling: CouplingSet,
    pub material: Material,
    pub k: f64,
}

impl ResonanceMatrixSpec {
    pub fn n(&self) -> usize {
        self.coupling.n()
    }
}

/// Assemble the N x N resonance matrix at `omega`.
///
/// Row i carries the successor pairing on the diagonal; the successor
/// column gets the squared pairing and every other column the plain
/// product, all scaled by -B_i.
pub fn assemble_matrix(spec: &ResonanceMatrixSpec, omega: Complex64) -> Result<DMatrix<Complex64>> {
    let n = spec.n();
    if n < 2 {
        return Err(Error::domain(
            "assemble_matrix",
            "needs N >= 2 (single resonator handled by the scalar pole condition)",
        ));
    }
    let set = &spec.coupling;
    let delta = set.delta;
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        let succ = modmod(i + 2, n)? - 1;
        let b_i = b_factor(&spec.material, omega, spec.k, delta, set.self_eigenvalue(i))?;
        let p_is = set.pairing(i, succ);
        for j in 0..n {
            m[(i, j)] = if j == i {
                p_is
            } else if j == succ {
                -b_i * p_is * p_is
            } else {
                -b_i * set.pairing(i, j) * p_is
            };
        }
    }
    Ok(m)
}

/// |det L(omega)| scaled by the matrix max-norm to the N-th power, so the
/// tolerance stays meaningful across sizes and couplings.
pub fn normalized_det_residual(spec: &ResonanceMatrixSpec, omega: Complex64) -> Result<f64> {
    let m = assemble_matrix(spec, omega)?;
    let norm = m.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    if norm == 0.0 {
        return Ok(0.0);
    }
    let det = m.clone().lu().determinant();
    Ok(det.norm() / norm.powi(m.nrows() as i32))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MullerOpts {
    /// Tolerance on the normalised |det|.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for MullerOpts {
    fn default() -> Self {
        MullerOpts {
            tol: 1e-10,
            max_iter: 100,
        }
    }
}

/// One Muller attempt from a three-point seed spread around the guess.
fn muller_attempt<F>(
    f: &F,
    guess: Complex64,
    spread: f64,
    opts: &MullerOpts,
) -> (Complex64, usize, bool)
where
    F: Fn(Complex64) -> Complex64,
{
    let mut x0 = guess;
    let mut x1 = guess * (1.0 + spread);
    let mut x2 = guess * (1.0 - spread);
    let mut f0 = f(x0);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut best = (f2.norm(), x2, 0usize);
    for it in 0..opts.max_iter {
        let d01 = x1 - x0;
        if d01.norm() == 0.0 {
            break;
        }
        let q = (x2 - x1) / d01;
        let a = q * f2 - q * (1.0 + q) * f1 + q * q * f0;
        let b = (2.0 * q + 1.0) * f2 - (1.0 + q) * (1.0 + q) * f1 + q * q * f0;
        let c = (1.0 + q) * f2;
        let disc = (b * b - 4.0 * a * c).sqrt();
        let den = if (b + disc).norm() >= (b - disc).norm() {
            b + disc
        } else {
            b - disc
        };
        if den.norm() == 0.0 || !den.is_finite() {
            break;
        }
        let mut step = -(x2 - x1) * 2.0 * c / den;
        // keep the quadratic extrapolation on a leash; the determinant
        // flattens away from the root cluster and can fling iterates out
        let cap = (0.05 * x2.norm()).max(4.0 * (x2 - x1).norm());
        if step.norm() > cap {
            step *= cap / step.norm();
        }
        let x3 = x2 + step;
        let f3 = f(x3);
        if f3.norm() < best.0 {
            best = (f3.norm(), x3, it + 1);
        }
        x0 = x1;
        x1 = x2;
        x2 = x3;
        f0 = f1;
        f1 = f2;
        f2 = f3;
        if f2.norm() < opts.tol {
            return (x2, it + 1, true);
        }
        if (x2 - x1).norm() <= 1e-15 * x2.norm() {
            return (best.1, it + 1, best.0 < opts.tol);
        }
    }
    (best.1, opts.max_iter, best.0 < opts.tol)
}

/// Muller's method with a restart ladder: if the parabola stalls, retry
/// from the best iterate with a wider three-point spread. A converged
/// run that drifted far outside its own seed triple (clustered roots
/// closer than the spread) is refined once with a tighter triple so the
/// root closest to the guess wins.
pub fn muller<F>(f: F, guess: Complex64, opts: &MullerOpts) -> Result<(Complex64, usize)>
where
    F: Fn(Complex64) -> Complex64,
{
    let mut start = guess;
    let mut spent = 0usize;
    for spread in [1e-4, 3e-3, 2e-2] {
        let (x, used, ok) = muller_attempt(&f, start, spread, opts);
        spent += used;
        if ok {
            if (x - start).norm() > spread * start.norm() {
                let (xr, used_r, ok_r) = muller_attempt(&f, start, 1e-6, opts);
                spent += used_r;
                if ok_r && (xr - start).norm() < (x - start).norm() {
                    return Ok((xr, spent));
                }
            }
            return Ok((x, spent));
        }
        if x.is_finite() {
            start = x;
        }
    }
    Err(Error::NoConvergence {
        iterations: spent,
        last: start,
    })
}

/// Branch labels attached to computed resonances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchLabel {
    OmegaS1,
    OmegaMon2,
    OmegaDip2,
    Omega1Of3,
    Omega2Of3,
    Omega3Of3,
    DetRoot,
}

impl BranchLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            BranchLabel::OmegaS1 => "omega_s1",
            BranchLabel::OmegaMon2 => "omega_mon2",
            BranchLabel::OmegaDip2 => "omega_dip2",
            BranchLabel::Omega1Of3 => "omega_1_3",
            BranchLabel::Omega2Of3 => "omega_2_3",
            BranchLabel::Omega3Of3 => "omega_3_3",
            BranchLabel::DetRoot => "det_root",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub omega: Complex64,
    /// Normalised determinant (or defining-equation) residual at omega.
    pub residual: f64,
    pub label: BranchLabel,
    pub iterations: usize,
    pub multiplicity: u8,
}

#[derive(Debug, Clone, Default)]
pub struct ResonanceSet {
    pub roots: Vec<Resonance>,
    /// Per-guess failures, reported without aborting the search.
    pub failures: Vec<String>,
}

impl ResonanceSet {
    fn sort(&mut self) {
        self.roots.sort_by(|a, b| {
            (a.omega.re, a.omega.im)
                .partial_cmp(&(b.omega.re, b.omega.im))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
    }

    pub fn omegas(&self) -> Vec<Complex64> {
        self.roots.iter().map(|r| r.omega).collect()
    }
}

/// Hunt det L(omega) = 0 from a list of initial guesses; roots are
/// deduplicated at relative radius 1e-7 and sorted by real part.
pub fn det_resonances(
    spec: &ResonanceMatrixSpec,
    guesses: &[Complex64],
    opts: &MullerOpts,
) -> Result<ResonanceSet> {
    if guesses.is_empty() {
        return Err(Error::domain(
            "det_resonances",
            "needs at least one initial guess",
        ));
    }
    let f = |w: Complex64| -> Complex64 {
        match det_value_normalized(spec, w) {
            Ok(v) => v,
            Err(_) => Complex64::new(f64::MAX, 0.0),
        }
    };
    type GuessOutcome = (Complex64, std::result::Result<(Complex64, usize), Error>);
    let outcomes: Vec<GuessOutcome> = guesses
        .par_iter()
        .map(|&g| (g, muller(f, g, opts)))
        .collect();

    let mut set = ResonanceSet::default();
    for (guess, out) in outcomes {
        match out {
            Ok((omega, iterations)) => {
                let residual = normalized_det_residual(spec, omega)?;
                if residual < opts.tol {
                    set.roots.push(Resonance {
                        omega,
                        residual,
                        label: BranchLabel::DetRoot,
                        iterations,
                        multiplicity: 1,
                    });
                }
            }
            Err(e) => set.failures.push(format!("guess {guess}: {e}")),
        }
    }
    dedup_roots(&mut set.roots, 1e-7);
    set.sort();
    Ok(set)
}

/// Re-assembles the coupling set at k0(omega) on every evaluation.
/// Slow; kept as a cross-check of the frozen-k0 assumption.
pub fn det_resonances_per_omega(
    config: &Configuration,
    material: &Material,
    k: f64,
    copts: &CouplingOpts,
    guesses: &[Complex64],
    opts: &MullerOpts,
) -> Result<ResonanceSet> {
    if guesses.is_empty() {
        return Err(Error::domain(
            "det_resonances",
            "needs at least one initial guess",
        ));
    }
    let eval = |w: Complex64| -> Result<f64> {
        let k0 = material.background_wavenumber(w, copts.k0_convention);
        let coupling = build_coupling_set_at_k0(config, k0, copts)?;
        let spec = ResonanceMatrixSpec {
            coupling,
            material: *material,
            k,
        };
        normalized_det_residual(&spec, w)
    };
    let f = |w: Complex64| -> Complex64 {
        match det_value_per_omega(config, material, k, copts, w) {
            Ok(v) => v,
            Err(_) => Complex64::new(f64::MAX, 0.0),
        }
    };
    let mut set = ResonanceSet::default();
    for &g in guesses {
        match muller(f, g, opts) {
            Ok((omega, iterations)) => {
                let residual = eval(omega)?;
                if residual < opts.tol {
                    set.roots.push(Resonance {
                        omega,
                        residual,
                        label: BranchLabel::DetRoot,
                        iterations,
                        multiplicity: 1,
                    });
                }
            }
            Err(e) => set.failures.push(format!("guess {g}: {e}")),
        }
    }
    dedup_roots(&mut set.roots, 1e-7);
    set.sort();
    Ok(set)
}

fn det_value_normalized(spec: &ResonanceMatrixSpec, w: Complex64) -> Result<Complex64> {
    let m = assemble_matrix(spec, w)?;
    let norm = m.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    if norm == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let det = m.clone().lu().determinant();
    Ok(det / Complex64::new(norm, 0.0).powi(m.nrows() as i32))
}

fn det_value_per_omega(
    config: &Configuration,
    material: &Material,
    k: f64,
    copts: &CouplingOpts,
    w: Complex64,
) -> Result<Complex64> {
    let k0 = material.background_wavenumber(w, copts.k0_convention);
    let coupling = build_coupling_set_at_k0(config, k0, copts)?;
    let spec = ResonanceMatrixSpec {
        coupling,
        material: *material,
        k,
    };
    det_value_normalized(&spec, w)
}

fn dedup_roots(roots: &mut Vec<Resonance>, rel_radius: f64) {
    let mut kept: Vec<Resonance> = Vec::new();
    roots.sort_by(|a, b| {
        a.residual
            .partial_cmp(&b.residual)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    for r in roots.iter() {
        if !kept
            .iter()
            .any(|k| (k.omega - r.omega).norm() <= rel_radius * k.omega.norm().max(1e-300))
        {
            kept.push(*r);
        }
    }
    *roots = kept;
}

/// Roots of the three-particle cubic in B with multiplicity flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicRoots {
    pub roots: [Complex64; 3],
    pub multiplicity: [u8; 3],
    pub residuals: [f64; 3],
    /// True when the leading coefficient underflowed and only the
    /// quadratic pair is meaningful (third root duplicated).
    pub degenerate: bool,
}

/// Solve 2 n12 n23 n31 B^3 + (n12^2 + n23^2 + n31^2) B^2 - 1 = 0 for B.
pub fn three_particle_cubic(n12: Complex64, n23: Complex64, n31: Complex64) -> Result<CubicRoots> {
    let lead = 2.0 * n12 * n23 * n31;
    let quad = n12 * n12 + n23 * n23 + n31 * n31;
    let scale = lead.norm().max(quad.norm());
    if scale == 0.0 {
        return Err(Error::domain("three_particle_cubic", "all pairings vanish"));
    }
    let poly = |b: Complex64| lead * b * b * b + quad * b * b - 1.0;
    let coeff_scale = 1.0 + lead.norm() + quad.norm();

    if lead.norm() < 1e-14 * quad.norm() {
        // quadratic fallback: quad B^2 = 1
        if quad.norm() == 0.0 {
            return Err(Error::DegenerateCubic {
                magnitude: lead.norm(),
            });
        }
        let b = (Complex64::new(1.0, 0.0) / quad).sqrt();
        let roots = [b, -b, b];
        let residuals = [poly(b).norm(), poly(-b).norm(), poly(b).norm()];
        return Ok(CubicRoots {
            roots,
            multiplicity: [1, 1, 1],
            residuals,
            degenerate: true,
        });
    }

    // monic form z^3 + c2 z^2 + c1 z + c0, solved by Durand-Kerner and
    // polished with a Newton step per root
    let c2 = quad / lead;
    let c1 = Complex64::new(0.0, 0.0);
    let c0 = Complex64::new(-1.0, 0.0) / lead;
    let p = |z: Complex64| ((z + c2) * z + c1) * z + c0;
    let dp = |z: Complex64| (3.0 * z + 2.0 * c2) * z + c1;
    let seed = Complex64::new(0.4, 0.9);
    let mut z = [seed, seed * seed, seed * seed * seed];
    for _ in 0..200 {
        let mut moved = 0.0f64;
        for i in 0..3 {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                continue;
            }
            let step = p(z[i]) / denom;
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-16 * z.iter().map(|v| v.norm()).fold(1.0, f64::max) {
            break;
        }
    }
    for zi in &mut z {
        for _ in 0..3 {
            let d = dp(*zi);
            if d.norm() > 0.0 {
                let corr = p(*zi) / d;
                if corr.is_finite() && corr.norm() < 0.5 * (zi.norm() + 1.0) {
                    *zi -= corr;
                }
            }
        }
    }
    // multiplicity by clustering at a scale-aware radius
    let rscale = z.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    let mut mult = [1u8; 3];
    for i in 0..3 {
        mult[i] = (0..3)
            .filter(|&j| (z[i] - z[j]).norm() <= 1e-6 * rscale)
            .count() as u8;
    }
    let residuals = [
        poly(z[0]).norm() / coeff_scale,
        poly(z[1]).norm() / coeff_scale,
        poly(z[2]).norm() / coeff_scale,
    ];
    Ok(CubicRoots {
        roots: z,
        multiplicity: mult,
        residuals,
        degenerate: false,
    })
}

/// Both branches of the frequency quadratic for a given B root:
/// [mu0 alpha delta^2 + B(1 + mu0 alpha delta^2 nu)] w^2 + i B gamma w - B(beta + eta k^2) = 0.
pub fn omega_from_b(
    mat: &Material,
    b: Complex64,
    delta: f64,
    nu: Complex64,
    k: f64,
) -> Result<(Complex64, Complex64)> {
    let mad = mat.mu0 * mat.alpha * delta * delta;
    let a = mad + b + b * mad * nu;
    if a.norm() < 1e-300 {
        return Err(Error::DegenerateDenominator {
            magnitude: a.norm(),
        });
    }
    let disc = -b * b * mat.gamma * mat.gamma + 4.0 * (b * mat.beta + b * mat.eta * k * k) * a;
    let sq = disc.sqrt();
    let ig = Complex64::i() * b * mat.gamma;
    Ok(((-ig + sq) / (2.0 * a), (-ig - sq) / (2.0 * a)))
}

/// The physically labelled branch: positive real part when available.
pub fn physical_branch(pair: (Complex64, Complex64)) -> Complex64 {
    if pair.0.re > 0.0 {
        pair.0
    } else if pair.1.re > 0.0 {
        pair.1
    } else if pair.0.re >= pair.1.re {
        pair.0
    } else {
        pair.1
    }
}

/// Closed-form single-particle resonance of the pole condition
/// 1 = delta^2 w^2 xi nu, i.e. (1 + delta^2 mu0 alpha nu) w^2 + i gamma w - (beta + eta k^2) = 0.
pub fn single_particle_closed_form(
    mat: &Material,
    nu: Complex64,
    delta: f64,
    k: f64,
) -> Result<Complex64> {
    let a = 1.0 + delta * delta * mat.mu0 * mat.alpha * nu;
    if a.norm() < 1e-300 {
        return Err(Error::DegenerateDenominator {
            magnitude: a.norm(),
        });
    }
    let disc = Complex64::new(-mat.gamma * mat.gamma, 0.0) + 4.0 * (mat.beta + mat.eta * k * k) * a;
    let sq = disc.sqrt();
    let ig = Complex64::new(0.0, mat.gamma);
    Ok(physical_branch((
        (-ig + sq) / (2.0 * a),
        (-ig - sq) / (2.0 * a),
    )))
}

/// Muller root of the scalar pole condition 1 - delta^2 w^2 xi(w) nu = 0.
pub fn single_particle_resonance(
    mat: &Material,
    nu: Complex64,
    delta: f64,
    k: f64,
    guess: Option<Complex64>,
    opts: &MullerOpts,
) -> Result<Resonance> {
    let g = match guess {
        Some(g) => g,
        None => single_particle_closed_form(mat, nu, delta, k)?,
    };
    let f = |w: Complex64| -> Complex64 {
        match mat.contrast(w, k) {
            Ok(xi) => Complex64::new(1.0, 0.0) - delta * delta * w * w * xi * nu,
            Err(_) => Complex64::new(f64::MAX, 0.0),
        }
    };
    let (omega, iterations) = muller(f, g, opts)?;
    Ok(Resonance {
        omega,
        residual: f(omega).norm(),
        label: BranchLabel::OmegaS1,
        iterations,
        multiplicity: 1,
    })
}

fn require_identical(set: &CouplingSet) -> Result<Complex64> {
    let nu = set.self_eigenvalue(0);
    for i in 1..set.n() {
        if (set.self_eigenvalue(i) - nu).norm() > 1e-10 * nu.norm().max(1e-300) {
            return Err(Error::domain(
                "spectrum",
                "closed-form solvers need identical resonators (equal self eigenvalues)",
            ));
        }
    }
    Ok(nu)
}

/// The two hybridised frequencies of a pair of identical resonators:
/// B N12 = +-1; the monopole is the lower real part.
pub fn two_particle_resonances(
    set: &CouplingSet,
    mat: &Material,
    k: f64,
) -> Result<(Complex64, Complex64)> {
    if set.n() != 2 {
        return Err(Error::domain(
            "two_particle_resonances",
            "needs exactly two resonators",
        ));
    }
    let nu = require_identical(set)?;
    let n12 = set.pairing(0, 1);
    if n12.norm() == 0.0 {
        return Err(Error::domain(
            "two_particle_resonances",
            "vanishing pairing",
        ));
    }
    let delta = set.delta;
    let w_plus = physical_branch(omega_from_b(mat, 1.0 / n12, delta, nu, k)?);
    let w_minus = physical_branch(omega_from_b(mat, -1.0 / n12, delta, nu, k)?);
    if w_plus.re <= w_minus.re {
        Ok((w_plus, w_minus))
    } else {
        Ok((w_minus, w_plus))
    }
}

/// Closed-form three-particle frequencies: cubic in B, then the
/// frequency quadratic, labelled in ascending real part.
pub fn three_particle_frequencies(
    set: &CouplingSet,
    mat: &Material,
    k: f64,
) -> Result<ResonanceSet> {
    if set.n() != 3 {
        return Err(Error::domain(
            "three_particle_frequencies",
            "needs exactly three resonators",
        ));
    }
    let nu = require_identical(set)?;
    let delta = set.delta;
    let cubic = three_particle_cubic(set.pairing(0, 1), set.pairing(1, 2), set.pairing(2, 0))?;
    let mut res: Vec<(Complex64, u8)> = Vec::with_capacity(3);
    for (b, m) in cubic.roots.iter().zip(cubic.multiplicity.iter()) {
        let w = physical_branch(omega_from_b(mat, *b, delta, nu, k)?);
        res.push((w, *m));
    }
    res.sort_by(|a, b| {
        (a.0.re, a.0.im)
            .partial_cmp(&(b.0.re, b.0.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let spec = ResonanceMatrixSpec {
        coupling: set.clone(),
        material: *mat,
        k,
    };
    let labels = [
        BranchLabel::Omega1Of3,
        BranchLabel::Omega2Of3,
        BranchLabel::Omega3Of3,
    ];
    let mut out = ResonanceSet::default();
    for (idx, (w, mult)) in res.into_iter().enumerate() {
        out.roots.push(Resonance {
            omega: w,
            residual: normalized_det_residual(&spec, w)?,
            label: labels[idx],
            iterations: 0,
            multiplicity: mult,
        });
    }
    Ok(out)
}

/// Initial det-search guesses from the eigen-shift structure: for each
/// characteristic shift c of the pairing matrix, the pole condition with
/// nu + c gives a closed-form frequency estimate.
pub fn default_guesses(set: &CouplingSet, mat: &Material, k: f64) -> Result<Vec<Complex64>> {
    let nu = set.self_eigenvalue(0);
    let delta = set.delta;
    let n = set.n();
    let mut shifts: Vec<Complex64> = Vec::new();
    match n {
        2 => {
            let p = set.pairing(0, 1);
            shifts.push(p);
            shifts.push(-p);
        }
        3 => {
            let cubic =
                three_particle_cubic(set.pairing(0, 1), set.pairing(1, 2), set.pairing(2, 0))?;
            for b in cubic.roots {
                if b.norm() > 0.0 {
                    shifts.push(1.0 / b);
                }
            }
        }
        _ => {
            // row-sum estimates bracket the eigenvalue range of the
            // pairing matrix
            let mut mean = Complex64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        mean += set.pairing(i, j);
                    }
                }
            }
            mean /= (n * (n - 1)) as f64;
            shifts.push(mean * (n as f64 - 1.0));
            shifts.push(-mean);
            shifts.push(mean);
        }
    }
    let mut out = Vec::new();
    for c in shifts {
        out.push(single_particle_closed_form(mat, nu + c, delta, k)?);
    }
    Ok(out)
}
