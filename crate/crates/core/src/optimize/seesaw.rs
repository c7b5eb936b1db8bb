//! Monotone coordinate ascent over measurement bases and, optionally, the
//! state.
//!
//! With every basis but `V = V_i^s` held fixed, the Bell value is
//! `const + Σ_a v_a† F_a v_a`, where `v_a` is column `a` of `V` and
//! `F_a = Σ_{x: x_i = s} Σ_{a_{-i}} I^a_x χ χ†` collects the state rotated by
//! the other parties' bases (`χ` is the slice along site `i`).

use nalgebra::SymmetricEigen;

use crate::algebra::{apply_local, kron, strides, ComplexMatrix, C64, ZERO};
use crate::bell::BellInequality;

use super::measurement::{bloch_basis, MeasurementSet};

/// Inner polar-ascent steps per qudit basis update.
const POLAR_STEPS: usize = 20;

#[derive(Clone, Debug)]
pub(crate) struct RunOutcome {
    pub value: f64,
    pub state: Vec<C64>,
    pub measurements: MeasurementSet,
    pub iterations: usize,
    pub converged: bool,
    /// Largest decrease seen between consecutive objective evaluations;
    /// zero for a monotone run.
    pub max_decrease: f64,
}

fn slack(value: f64) -> f64 {
    1e-9 * (1.0 + value.abs())
}

fn rotate_all(state: &[C64], dims: &[usize], meas: &MeasurementSet, x: &[usize], skip: Option<usize>) -> Vec<C64> {
    let mut t = state.to_vec();
    for (site, &xi) in x.iter().enumerate() {
        if Some(site) != skip {
            t = apply_local(&t, dims, site, &meas.bases[site][xi].adjoint());
        }
    }
    t
}

/// Bell value of `state` under `meas`; same arithmetic as evaluating the
/// Born-rule behavior, without the validation.
pub(crate) fn bell_value(ineq: &BellInequality, state: &[C64], meas: &MeasurementSet) -> f64 {
    let sc = &ineq.scenario;
    let na = sc.outcome_count();
    let mut total = 0.0;
    for xf in 0..sc.setting_count() {
        let x = crate::algebra::digits(xf, &sc.settings);
        let t = rotate_all(state, &sc.outcomes, meas, &x, None);
        let row = &ineq.coeffs[xf * na..(xf + 1) * na];
        total += row.iter().zip(&t).map(|(c, z)| c * z.norm_sqr()).sum::<f64>();
    }
    total
}

/// The operators `F_a` for party `party`, setting `setting`.
pub(crate) fn environment(
    ineq: &BellInequality,
    state: &[C64],
    meas: &MeasurementSet,
    party: usize,
    setting: usize,
) -> Vec<ComplexMatrix> {
    let sc = &ineq.scenario;
    let dims = &sc.outcomes;
    let d = dims[party];
    let stride = strides(dims)[party];
    let na = sc.outcome_count();
    let mut f = vec![ComplexMatrix::zeros(d, d); d];
    let mut chi = vec![ZERO; d];
    for xf in 0..sc.setting_count() {
        let x = crate::algebra::digits(xf, &sc.settings);
        if x[party] != setting {
            continue;
        }
        let t = rotate_all(state, dims, meas, &x, Some(party));
        let row = &ineq.coeffs[xf * na..(xf + 1) * na];
        for base in (0..na).filter(|idx| idx / stride % d == 0) {
            for (k, c) in chi.iter_mut().enumerate() {
                *c = t[base + k * stride];
            }
            for (a, fa) in f.iter_mut().enumerate() {
                let w = row[base + a * stride];
                if w == 0.0 {
                    continue;
                }
                for r in 0..d {
                    let left = chi[r] * w;
                    for c in 0..d {
                        fa[(r, c)] += left * chi[c].conj();
                    }
                }
            }
        }
    }
    f
}

/// `Σ_a Re v_a† F_a v_a`.
pub(crate) fn local_objective(f: &[ComplexMatrix], v: &ComplexMatrix) -> f64 {
    f.iter()
        .enumerate()
        .map(|(a, fa)| {
            let col = v.column(a);
            (col.adjoint() * fa * col)[(0, 0)].re
        })
        .sum()
}

/// Exact maximizer for qubits: `u = v/|v|` with `v_k = tr(σ_k (F_0 - F_1))`.
fn qubit_update(f: &[ComplexMatrix], current: &ComplexMatrix) -> ComplexMatrix {
    let g = &f[0] - &f[1];
    let g01 = g[(0, 1)];
    let v = [2.0 * g01.re, -2.0 * g01.im, g[(0, 0)].re - g[(1, 1)].re];
    let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if len < 1e-300 {
        return current.clone();
    }
    let u = [v[0] / len, v[1] / len, v[2] / len];
    let n = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    bloch_basis([u[0] / n, u[1] / n, u[2] / n]).unwrap_or_else(|_| current.clone())
}

/// Best cyclic relabeling of the columns, then polar ascent on the convex
/// quadratic `Σ_a v_a† (F_a + c) v_a` (`c` a Gershgorin shift making every
/// term positive semidefinite). Each polar step cannot decrease the objective.
fn qudit_update(f: &[ComplexMatrix], current: &ComplexMatrix) -> ComplexMatrix {
    let d = current.nrows();
    let mut best = current.clone();
    let mut best_obj = local_objective(f, current);
    for shift in 1..d {
        let cand = ComplexMatrix::from_fn(d, d, |r, c| current[(r, (c + shift) % d)]);
        let obj = local_objective(f, &cand);
        if obj > best_obj {
            best = cand;
            best_obj = obj;
        }
    }
    let lower = f
        .iter()
        .flat_map(|fa| {
            (0..d).map(move |r| fa[(r, r)].re - (0..d).filter(|&c| c != r).map(|c| fa[(r, c)].norm()).sum::<f64>())
        })
        .fold(f64::INFINITY, f64::min);
    let c = (-lower).max(0.0) + 1e-3;
    for _ in 0..POLAR_STEPS {
        let g = ComplexMatrix::from_fn(d, d, |r, col| {
            let v = best.column(col);
            (f[col].row(r) * v)[(0, 0)] + v[r] * c
        });
        let svd = g.svd(true, true);
        let (Some(w), Some(zt)) = (svd.u, svd.v_t) else {
            break;
        };
        let cand = w * zt;
        let obj = local_objective(f, &cand);
        if obj <= best_obj + 1e-15 * (1.0 + best_obj.abs()) {
            if obj > best_obj {
                best = cand;
            }
            break;
        }
        best = cand;
        best_obj = obj;
    }
    best
}

/// One pass over every (party, setting) pair. Returns the largest local decrease.
fn sweep(ineq: &BellInequality, state: &[C64], meas: &mut MeasurementSet) -> f64 {
    let mut worst: f64 = 0.0;
    for party in 0..ineq.scenario.parties() {
        for setting in 0..ineq.scenario.settings[party] {
            let f = environment(ineq, state, meas, party, setting);
            let current = &meas.bases[party][setting];
            let before = local_objective(&f, current);
            let next = if current.nrows() == 2 { qubit_update(&f, current) } else { qudit_update(&f, current) };
            let after = local_objective(&f, &next);
            debug_assert!(after >= before - slack(before), "see-saw step decreased {before} -> {after}");
            worst = worst.max(before - after);
            if after >= before {
                meas.bases[party][setting] = next;
            }
        }
    }
    worst
}

/// `B = Σ_x W_x diag(I_x) W_x†` with `W_x = ⊗_j V_j^{x_j}`.
pub(crate) fn bell_operator(ineq: &BellInequality, meas: &MeasurementSet) -> ComplexMatrix {
    let sc = &ineq.scenario;
    let na = sc.outcome_count();
    let mut b = ComplexMatrix::zeros(na, na);
    for xf in 0..sc.setting_count() {
        let x = crate::algebra::digits(xf, &sc.settings);
        let factors: Vec<ComplexMatrix> = x.iter().enumerate().map(|(j, &xj)| meas.bases[j][xj].clone()).collect();
        let w = kron(&factors).expect("non-empty party list");
        let row = &ineq.coeffs[xf * na..(xf + 1) * na];
        let scaled = ComplexMatrix::from_fn(na, na, |r, c| w[(r, c)] * row[c]);
        b += scaled * w.adjoint();
    }
    b
}

/// Eigenvector of the largest eigenvalue; among (numerically) degenerate
/// candidates, the one whose absolute values are lexicographically largest.
pub(crate) fn top_eigenvector(b: &ComplexMatrix) -> Vec<C64> {
    let hermitian = (b + b.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(hermitian);
    let top = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut best: Option<Vec<C64>> = None;
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda < top - 1e-12 * (1.0 + top.abs()) {
            continue;
        }
        let v: Vec<C64> = eig.eigenvectors.column(i).iter().copied().collect();
        let better = match &best {
            None => true,
            Some(cur) => {
                let key = |u: &[C64]| u.iter().map(|z| z.norm()).collect::<Vec<f64>>();
                key(&v).partial_cmp(&key(cur)) == Some(std::cmp::Ordering::Greater)
            }
        };
        if better {
            best = Some(v);
        }
    }
    best.expect("matrix has at least one eigenvalue")
}

/// See-saw over measurements for a fixed state.
pub(crate) fn run_measurements(
    ineq: &BellInequality,
    state: &[C64],
    mut meas: MeasurementSet,
    max_iters: usize,
    tol: f64,
) -> RunOutcome {
    let mut value = bell_value(ineq, state, &meas);
    let mut max_decrease: f64 = 0.0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iters {
        iterations += 1;
        max_decrease = max_decrease.max(sweep(ineq, state, &mut meas));
        let next = bell_value(ineq, state, &meas);
        debug_assert!(next >= value - slack(value), "see-saw sweep decreased {value} -> {next}");
        max_decrease = max_decrease.max(value - next);
        let change = (next - value).abs();
        value = next;
        if change < tol {
            converged = true;
            break;
        }
    }
    RunOutcome { value, state: state.to_vec(), measurements: meas, iterations, converged, max_decrease }
}

/// Alternates a measurement sweep with the optimal state for the current
/// measurements.
pub(crate) fn run_joint(
    ineq: &BellInequality,
    mut state: Vec<C64>,
    mut meas: MeasurementSet,
    max_iters: usize,
    tol: f64,
) -> RunOutcome {
    let mut value = bell_value(ineq, &state, &meas);
    let mut max_decrease: f64 = 0.0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iters {
        iterations += 1;
        max_decrease = max_decrease.max(sweep(ineq, &state, &mut meas));
        let mid = bell_value(ineq, &state, &meas);
        let candidate = top_eigenvector(&bell_operator(ineq, &meas));
        let cand_value = bell_value(ineq, &candidate, &meas);
        if cand_value >= mid {
            state = candidate;
        }
        let next = bell_value(ineq, &state, &meas);
        debug_assert!(next >= value - slack(value), "joint see-saw decreased {value} -> {next}");
        max_decrease = max_decrease.max(value - next);
        let change = (next - value).abs();
        value = next;
        if change < tol {
            converged = true;
            break;
        }
    }
    RunOutcome { value, state, measurements: meas, iterations, converged, max_decrease }
}
