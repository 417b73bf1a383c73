//! Structured output: JSON with complex numbers as [re, im] pairs, and
//! CSV with '.' decimals, ',' separators and LF line endings. Both are
//! byte-deterministic for a given input.

use crate::coupling::{CouplingSet, Dim};
use crate::inverse::DesignFamily;
use crate::spectrum::ResonanceSet;
use crate::sweep::SweepRow;
use num_complex::Complex64;
use serde_json::{json, Value};

fn c2(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn resonances_to_json(set: &ResonanceSet) -> Value {
    json!({
        "roots": set.roots.iter().map(|r| json!({
            "label": r.label.as_str(),
            "omega": c2(r.omega),
            "residual": r.residual,
            "iterations": r.iterations,
            "multiplicity": r.multiplicity,
        })).collect::<Vec<_>>(),
        "failures": set.failures,
    })
}

pub fn resonances_to_csv(set: &ResonanceSet) -> String {
    let mut out = String::from("label,re_omega,im_omega,residual,iterations,multiplicity\n");
    for r in &set.roots {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.label.as_str(),
            r.omega.re,
            r.omega.im,
            r.residual,
            r.iterations,
            r.multiplicity
        ));
    }
    out
}

pub fn coupling_to_json(set: &CouplingSet) -> Value {
    json!({
        "n_pairs": set
            .n_pairs
            .iter()
            .map(|row| row.iter().map(|&z| c2(z)).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "gamma_hat": set.gamma_hat,
        "s_const": c2(set.s_const),
        "q_const": c2(set.q_const),
        "delta_k0": c2(set.delta_k0),
        "delta": set.delta,
        "dim": match set.dim { Dim::Two => 2, Dim::Three => 3 },
    })
}

pub fn coupling_to_csv(set: &CouplingSet) -> String {
    let mut out = String::from("kind,i,j,re,im\n");
    let n = set.n();
    for i in 0..n {
        for j in 0..n {
            let kind = if i == j { "self" } else { "pair" };
            let z = set.pairing(i, j);
            out.push_str(&format!("{kind},{i},{j},{},{}\n", z.re, z.im));
        }
    }
    out.push_str(&format!(
        "s_const,,,{},{}\n",
        set.s_const.re, set.s_const.im
    ));
    out.push_str(&format!(
        "q_const,,,{},{}\n",
        set.q_const.re, set.q_const.im
    ));
    out.push_str(&format!(
        "delta_k0,,,{},{}\n",
        set.delta_k0.re, set.delta_k0.im
    ));
    out
}

pub const SWEEP_CSV_HEADER: &str = "delta,re_omega_s1,re_omega_mon2,re_omega_dip2,re_omega_1_3,re_omega_2_3,re_omega_3_3,im_omega_s1,im_omega_mon2,im_omega_dip2,im_omega_1_3,im_omega_2_3,im_omega_3_3";

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.delta,
            r.omega_s1.re,
            r.omega_mon2.re,
            r.omega_dip2.re,
            r.omega_1_3.re,
            r.omega_2_3.re,
            r.omega_3_3.re,
            r.omega_s1.im,
            r.omega_mon2.im,
            r.omega_dip2.im,
            r.omega_1_3.im,
            r.omega_2_3.im,
            r.omega_3_3.im,
        ));
    }
    out
}

pub fn sweep_to_json(rows: &[SweepRow]) -> Value {
    json!(rows
        .iter()
        .map(|r| json!({
            "delta": r.delta,
            "omega_s1": c2(r.omega_s1),
            "omega_mon2": c2(r.omega_mon2),
            "omega_dip2": c2(r.omega_dip2),
            "omega_1_3": c2(r.omega_1_3),
            "omega_2_3": c2(r.omega_2_3),
            "omega_3_3": c2(r.omega_3_3),
        }))
        .collect::<Vec<_>>())
}

fn branch_str(b: (i8, i8)) -> String {
    let sign = |s: i8| if s >= 0 { '+' } else { '-' };
    format!("{}{}", sign(b.0), sign(b.1))
}

pub fn family_to_json(f: &DesignFamily) -> Value {
    json!({
        "delta": f.delta,
        "imag_mismatch": f.imag_mismatch,
        "x_target": c2(f.x_target),
        "y_target": c2(f.y_target),
        "s_const": c2(f.s_const),
        "q_const": c2(f.q_const),
        "third_equation_residual": f.third_equation_residual,
        "solutions": f.solutions.iter().map(|s| json!({
            "alpha3": s.alpha3,
            "branch": branch_str(s.branch),
            "alpha1": s.alpha1,
            "alpha2": s.alpha2,
            "delta": s.delta,
            "residuals": s.residuals.to_vec(),
            "cubic_residuals": s.cubic_residuals.to_vec(),
            "triangle_ok": s.triangle_ok,
        })).collect::<Vec<_>>(),
        "diagnostics": f.diagnostics,
    })
}

pub fn family_to_csv(f: &DesignFamily) -> String {
    let mut out = String::from("alpha3,branch,alpha1,alpha2,delta,max_residual,triangle_ok\n");
    for s in &f.solutions {
        let max_res = s.residuals.iter().cloned().fold(0.0f64, f64::max);
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            s.alpha3,
            branch_str(s.branch),
            s.alpha1,
            s.alpha2,
            s.delta,
            max_res,
            s.triangle_ok
        ));
    }
    out
}
