use std::fmt::Write as _;
use std::f64::consts::PI;

use crate::algebra::{C64, ZERO};
use crate::bell::{catalog_svetlichny_r2, local_bound_with_budget, BellInequality};
use crate::{Error, Result};

use super::{optimize_measurements, quantum_value_from, stabilizer_value, OptimizerConfig};

/// One row of a stabilizer/quantum gap scan.
#[derive(Clone, Debug, PartialEq)]
pub struct GapRow {
    pub param: f64,
    pub local: f64,
    pub stab: f64,
    pub quantum: f64,
    /// `quantum - stab`.
    pub gap: f64,
}

/// `from, from + step, …` up to `to` inclusive (with a small slack for
/// rounding), each value rounded to 1e-9 so it prints cleanly.
pub fn param_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(from.is_finite() && to.is_finite() && step.is_finite()) || step <= 0.0 || to < from {
        return Err(Error::invalid(format!("invalid range {from}..{to} step {step}")));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(Error::invalid(format!("range has {count} points, limit is 100000")));
    }
    Ok((0..count).map(|i| ((from + step * i as f64) * 1e9).round() / 1e9).collect())
}

pub fn gap_scan(
    family: &(dyn Fn(f64) -> Result<BellInequality> + Sync),
    params: &[f64],
    cfg: &OptimizerConfig,
) -> Result<Vec<GapRow>> {
    params
        .iter()
        .map(|&param| {
            let ineq = family(param)?;
            let local = local_bound_with_budget(&ineq, cfg.enumeration_budget)?;
            let stab = stabilizer_value(&ineq, cfg)?;
            let quantum = quantum_value_from(&ineq, cfg, Some(&stab))?.value;
            let stab = stab.value;
            Ok(GapRow { param, local, stab, quantum, gap: quantum - stab })
        })
        .collect()
}

pub fn scan_csv(rows: &[GapRow]) -> String {
    let mut out = String::from("param,local,stab,quantum,gap\n");
    for r in rows {
        let _ = writeln!(out, "{},{:.10},{:.10},{:.10},{:.10}", r.param, r.local, r.stab, r.quantum, r.gap);
    }
    out
}

/// `sinθ sinφ|001⟩ + sinθ cosφ|010⟩ + cosθ|100⟩`.
pub fn w_state(theta: f64, phi: f64) -> Vec<C64> {
    let mut v = vec![ZERO; 8];
    v[1] = C64::new(theta.sin() * phi.sin(), 0.0);
    v[2] = C64::new(theta.sin() * phi.cos(), 0.0);
    v[4] = C64::new(theta.cos(), 0.0);
    v
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeatCell {
    pub theta: f64,
    pub phi: f64,
    pub value: f64,
}

/// Optimized `S_3 + R_2` over the generalized W family, θ-major order.
pub fn w_heatmap(thetas: &[f64], phis: &[f64], cfg: &OptimizerConfig) -> Result<Vec<HeatCell>> {
    let ineq = catalog_svetlichny_r2();
    let mut cells = Vec::with_capacity(thetas.len() * phis.len());
    for &theta in thetas {
        for &phi in phis {
            let value = optimize_measurements(&ineq, &w_state(theta, phi), cfg)?.value;
            cells.push(HeatCell { theta, phi, value });
        }
    }
    Ok(cells)
}

/// Angles are written in units of π.
pub fn heatmap_csv(cells: &[HeatCell]) -> String {
    let mut out = String::from("theta,phi,value\n");
    for c in cells {
        let _ = writeln!(out, "{:.6},{:.6},{:.10}", c.theta / PI, c.phi / PI, c.value);
    }
    out
}
