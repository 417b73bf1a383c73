//! The size-sweep dataset: one-, two- and three-particle resonances on
//! congruent geometry across a grid of characteristic sizes, so the
//! hybridisation interleaving can be read off a single file.

use crate::coupling::{build_coupling_set, Configuration, CouplingOpts, Dim, Disk};
use crate::error::{Error, Result};
use crate::material::Material;
use crate::spectrum::{
    single_particle_resonance, three_particle_frequencies, two_particle_resonances, MullerOpts,
};
use num_complex::Complex64;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub delta: f64,
    pub omega_s1: Complex64,
    pub omega_mon2: Complex64,
    pub omega_dip2: Complex64,
    pub omega_1_3: Complex64,
    pub omega_2_3: Complex64,
    pub omega_3_3: Complex64,
}

/// Geometric grid of n points from lo to hi inclusive.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if lo.is_nan() || hi.is_nan() || lo <= 0.0 || hi <= lo || n < 2 {
        return Err(Error::domain(
            "geometric_grid",
            format!("need 0 < lo < hi and n >= 2, got ({lo}, {hi}, {n})"),
        ));
    }
    let ratio = (hi / lo).powf(1.0 / (n as f64 - 1.0));
    Ok((0..n).map(|i| lo * ratio.powi(i as i32)).collect())
}

/// Median of the three pairwise centre distances; the two-particle
/// companion system is placed at this separation.
fn median_side(cfg: &Configuration) -> f64 {
    let mut sides = [
        cfg.disks[0].center_distance(&cfg.disks[1]),
        cfg.disks[1].center_distance(&cfg.disks[2]),
        cfg.disks[0].center_distance(&cfg.disks[2]),
    ];
    sides.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sides[1]
}

/// Run the N = 1, 2, 3 pipelines at one delta.
pub fn sweep_row(
    base: &Configuration,
    material: &Material,
    k: f64,
    delta: f64,
    copts: &CouplingOpts,
    mopts: &MullerOpts,
) -> Result<SweepRow> {
    if base.len() != 3 {
        return Err(Error::domain(
            "sweep",
            "sweep geometry needs exactly three disks",
        ));
    }
    let rho = base.disks[0].radius;
    if base.disks.iter().any(|d| d.radius != rho) {
        return Err(Error::domain(
            "sweep",
            "sweep geometry needs identical radii",
        ));
    }

    let three = Configuration {
        disks: base.disks.clone(),
        delta,
        dim: Dim::Two,
    };
    let kappa = median_side(base);
    let two = Configuration::new(
        vec![Disk::new([0.0, 0.0], rho)?, Disk::new([kappa, 0.0], rho)?],
        delta,
        Dim::Two,
    )?;

    let set3 = build_coupling_set(&three, material, k, copts)?;
    let set2 = build_coupling_set(&two, material, k, copts)?;
    let nu = set3.self_eigenvalue(0);

    let s1 = single_particle_resonance(material, nu, delta, k, None, mopts)?;
    let (mon, dip) = two_particle_resonances(&set2, material, k)?;
    let rs3 = three_particle_frequencies(&set3, material, k)?;

    Ok(SweepRow {
        delta,
        omega_s1: s1.omega,
        omega_mon2: mon,
        omega_dip2: dip,
        omega_1_3: rs3.roots[0].omega,
        omega_2_3: rs3.roots[1].omega,
        omega_3_3: rs3.roots[2].omega,
    })
}

/// Sweep the grid in parallel; rows come back in delta order.
pub fn sweep(
    base: &Configuration,
    material: &Material,
    k: f64,
    grid: &[f64],
    copts: &CouplingOpts,
    mopts: &MullerOpts,
) -> Result<Vec<SweepRow>> {
    let mut rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|&d| sweep_row(base, material, k, d, copts, mopts))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.delta.partial_cmp(&b.delta).unwrap());
    Ok(rows)
}
