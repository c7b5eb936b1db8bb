//! Brute-force census of pure stabilizer states.
//!
//! Enumerates every Lagrangian (maximal isotropic) subspace of `F_d^{2n}`,
//! i.e. every maximal abelian subgroup of the Pauli group modulo phases, and
//! every joint eigenspace of each. Slow by design; it exists as an oracle for
//! the count `d^n Π_{i=1}^n (d^i + 1)`.

use std::collections::BTreeSet;

use crate::algebra::{displacement, kron, matrix_power, ComplexMatrix, PrimeModulus, C64};
use crate::{Error, Result};

/// A Pauli label `(x_1..x_n, z_1..z_n)`.
type Label = Vec<u32>;

fn symplectic(d: u32, n: usize, v: &[u32], w: &[u32]) -> u32 {
    let mut s = 0u64;
    for i in 0..n {
        s += v[i] as u64 * w[n + i] as u64 + (d - w[i]) as u64 * v[n + i] as u64;
    }
    (s % d as u64) as u32
}

fn span(d: u32, basis: &[Label]) -> BTreeSet<Label> {
    let len = basis[0].len();
    let mut out = BTreeSet::new();
    let count = (d as usize).pow(basis.len() as u32);
    for idx in 0..count {
        let mut v = vec![0u32; len];
        let mut rest = idx;
        for b in basis {
            let c = (rest % d as usize) as u32;
            rest /= d as usize;
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi = (*vi + c * bi) % d;
            }
        }
        out.insert(v);
    }
    out
}

fn all_labels(d: u32, n: usize) -> Vec<Label> {
    let len = 2 * n;
    let count = (d as usize).pow(len as u32);
    (1..count)
        .map(|mut idx| {
            let mut v = vec![0u32; len];
            for slot in v.iter_mut().rev() {
                *slot = (idx % d as usize) as u32;
                idx /= d as usize;
            }
            v
        })
        .collect()
}

/// Every Lagrangian subspace as a generator list, deduplicated by element set.
pub fn lagrangian_subspaces(d: PrimeModulus, n: usize) -> Vec<Vec<Label>> {
    let dv = d.get();
    let labels = all_labels(dv, n);
    let mut seen: BTreeSet<BTreeSet<Label>> = BTreeSet::new();
    let mut out = Vec::new();
    let mut stack: Vec<Vec<Label>> = vec![Vec::new()];
    while let Some(basis) = stack.pop() {
        if basis.len() == n {
            let elems = span(dv, &basis);
            if seen.insert(elems) {
                out.push(basis);
            }
            continue;
        }
        let current = if basis.is_empty() { BTreeSet::new() } else { span(dv, &basis) };
        let last = basis.last().cloned();
        for v in &labels {
            // generators in increasing order prune most duplicate bases
            if last.as_ref().is_some_and(|l| v <= l) || current.contains(v) {
                continue;
            }
            if basis.iter().all(|b| symplectic(dv, n, b, v) == 0) {
                let mut next = basis.clone();
                next.push(v.clone());
                stack.push(next);
            }
        }
    }
    out
}

fn pauli_matrix(d: PrimeModulus, n: usize, v: &[u32]) -> Result<ComplexMatrix> {
    let factors: Vec<ComplexMatrix> = (0..n)
        .map(|i| displacement(d, d.element(v[i] as i64), d.element(v[n + i] as i64)))
        .collect();
    kron(&factors)
}

/// All pure stabilizer states on `n` qudits of dimension `d`, deduplicated
/// up to global phase.
pub fn stabilizer_states(d: PrimeModulus, n: usize) -> Result<Vec<Vec<C64>>> {
    if n == 0 || n > 3 {
        return Err(Error::invalid("census supports 1 to 3 qudits"));
    }
    let dim = d.size().pow(n as u32);
    let inv_d = 1.0 / d.get() as f64;
    let mut states: Vec<Vec<C64>> = Vec::new();
    for basis in lagrangian_subspaces(d, n) {
        let gens: Vec<ComplexMatrix> = basis.iter().map(|v| pauli_matrix(d, n, v)).collect::<Result<_>>()?;
        let powers: Vec<Vec<ComplexMatrix>> =
            gens.iter().map(|g| (0..d.get()).map(|t| matrix_power(g, t)).collect()).collect();
        let sectors = d.size().pow(n as u32);
        for sector in 0..sectors {
            let mut proj = ComplexMatrix::identity(dim, dim);
            let mut rest = sector;
            for pw in &powers {
                let s = (rest % d.size()) as i64;
                rest /= d.size();
                let mut p = ComplexMatrix::zeros(dim, dim);
                for (t, m) in pw.iter().enumerate() {
                    p += m * (d.root(-s * t as i64) * inv_d);
                }
                proj = proj * p;
            }
            let Some(col) = (0..dim).max_by(|&a, &b| proj[(a, a)].re.total_cmp(&proj[(b, b)].re)) else {
                continue;
            };
            let v: Vec<C64> = proj.column(col).iter().copied().collect();
            let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm < 1e-6 {
                continue;
            }
            let v: Vec<C64> = v.into_iter().map(|z| z / nrm).collect();
            let duplicate = states.iter().any(|s| crate::algebra::inner(s, &v).norm() > 1.0 - 1e-9);
            if !duplicate {
                states.push(v);
            }
        }
    }
    Ok(states)
}

/// `d^n Π_{i=1}^n (d^i + 1)`.
pub fn stabilizer_state_count(d: PrimeModulus, n: usize) -> u64 {
    let d = d.get() as u64;
    (1..=n as u32).fold(d.pow(n as u32), |acc, i| acc * (d.pow(i) + 1))
}
