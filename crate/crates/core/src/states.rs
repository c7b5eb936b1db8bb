//! Graph states, their stabilizer generators, expectation values and
//! reduced-state purities.
//!
//! A graph state is built two independent ways: by applying controlled-phase
//! gates to `|+⟩^{⊗n}` ([`graph_state_by_gates`]) and from the closed-form
//! phase polynomial `d^{-n/2} ω^{Σ_{i<j} A_ij a_i a_j}` ([`build_graph_state`]).
//! Each serves as an oracle for the other.

use crate::algebra::{
    apply_local, clock_matrix, digits, kron, matrix_power, shift_matrix, strides, ComplexMatrix, PrimeModulus,
    C64, ONE, ZERO,
};
use crate::graphs::{AdjacencyMatrix, ClassRepresentative};
use crate::{Error, Result};

/// A dense graph-state vector, site order equal to party order.
#[derive(Clone, Debug)]
pub struct GraphState {
    pub dims: Vec<PrimeModulus>,
    pub amplitudes: Vec<C64>,
    pub source: ClassRepresentative,
}

impl GraphState {
    /// Closed-form construction for a direct sum of cluster graphs.
    pub fn from_class(class: &ClassRepresentative) -> Self {
        let dims: Vec<usize> = class.dims.iter().map(|d| d.size()).collect();
        let total: usize = dims.iter().product();
        let norm = 1.0 / (total as f64).sqrt();
        let amplitudes = (0..total)
            .map(|idx| {
                let a = digits(idx, &dims);
                let mut amp = C64::new(norm, 0.0);
                for part in &class.parts {
                    let d = part.adjacency.modulus();
                    let mut exponent = 0i64;
                    for (i, j, w) in part.adjacency.edges() {
                        exponent += w as i64 * a[part.sites[i]] as i64 * a[part.sites[j]] as i64;
                    }
                    amp *= d.root(exponent);
                }
                amp
            })
            .collect();
        GraphState { dims: class.dims.clone(), amplitudes, source: class.clone() }
    }

    pub fn local_dims(&self) -> Vec<usize> {
        self.dims.iter().map(|d| d.size()).collect()
    }
}

pub fn build_graph_state(a: &AdjacencyMatrix) -> GraphState {
    GraphState::from_class(&ClassRepresentative::single(a.clone()))
}

/// `CP = Σ_j |j⟩⟨j| ⊗ Z^j`, diagonal with entries `ω^{jk}`.
pub fn cp_gate(d: PrimeModulus) -> ComplexMatrix {
    let n = d.size();
    ComplexMatrix::from_fn(n * n, n * n, |r, c| {
        if r == c {
            d.root(((r / n) * (r % n)) as i64)
        } else {
            ZERO
        }
    })
}

fn apply_two_site(state: &[C64], dims: &[usize], i: usize, j: usize, op: &ComplexMatrix) -> Vec<C64> {
    let s = strides(dims);
    let (di, dj) = (dims[i], dims[j]);
    let mut out = vec![ZERO; state.len()];
    for (idx, slot) in out.iter_mut().enumerate() {
        let ai = idx / s[i] % di;
        let aj = idx / s[j] % dj;
        let base = idx - ai * s[i] - aj * s[j];
        let row = ai * dj + aj;
        let mut acc = ZERO;
        for bi in 0..di {
            for bj in 0..dj {
                let m = op[(row, bi * dj + bj)];
                if m != ZERO {
                    acc += m * state[base + bi * s[i] + bj * s[j]];
                }
            }
        }
        *slot = acc;
    }
    out
}

/// Gate-sequence construction: `Π_{i<j} CP_ij^{A_ij} |+⟩^{⊗n}`.
pub fn graph_state_by_gates(a: &AdjacencyMatrix) -> Vec<C64> {
    let d = a.modulus();
    let n = a.n();
    let dims = vec![d.size(); n];
    let total: usize = dims.iter().product();
    let mut state = vec![C64::new(1.0 / (total as f64).sqrt(), 0.0); total];
    let cp = cp_gate(d);
    for (i, j, w) in a.edges() {
        let gate = matrix_power(&cp, w);
        state = apply_two_site(&state, &dims, i, j, &gate);
    }
    state
}

/// A tensor product of single-site operators.
#[derive(Clone, Debug)]
pub struct PauliString {
    pub factors: Vec<ComplexMatrix>,
}

impl PauliString {
    pub fn apply(&self, state: &[C64]) -> Vec<C64> {
        let dims: Vec<usize> = self.factors.iter().map(|f| f.nrows()).collect();
        self.factors
            .iter()
            .enumerate()
            .fold(state.to_vec(), |acc, (site, f)| apply_local(&acc, &dims, site, f))
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        kron(&self.factors).expect("non-empty Pauli string")
    }
}

/// Generators `g_i = X_i Π_j Z_j^{A_ij}` of a graph state's stabilizer group.
///
/// The exponent sign follows from `X|j⟩ = |j+1⟩` and `CP = diag(ω^{jk})`.
#[derive(Clone, Debug)]
pub struct StabilizerGenerators {
    pub dims: Vec<PrimeModulus>,
    pub generators: Vec<PauliString>,
}

pub fn stabilizer_generators(a: &AdjacencyMatrix) -> StabilizerGenerators {
    class_stabilizer_generators(&ClassRepresentative::single(a.clone()))
}

pub fn class_stabilizer_generators(class: &ClassRepresentative) -> StabilizerGenerators {
    let dims = class.dims.clone();
    let mut generators = Vec::with_capacity(dims.len());
    for part in &class.parts {
        let d = part.adjacency.modulus();
        let x = shift_matrix(d);
        let z = clock_matrix(d);
        for (vi, &site) in part.sites.iter().enumerate() {
            let mut factors: Vec<ComplexMatrix> =
                dims.iter().map(|dd| ComplexMatrix::identity(dd.size(), dd.size())).collect();
            factors[site] = x.clone();
            for (vj, &other) in part.sites.iter().enumerate() {
                let w = part.adjacency.weight(vi, vj);
                if w != 0 {
                    factors[other] = matrix_power(&z, w);
                }
            }
            generators.push((site, PauliString { factors }));
        }
    }
    generators.sort_by_key(|(site, _)| *site);
    StabilizerGenerators { dims, generators: generators.into_iter().map(|(_, g)| g).collect() }
}

/// `⟨ψ|O|ψ⟩`.
pub fn expectation(state: &[C64], observable: &ComplexMatrix) -> Result<C64> {
    if observable.nrows() != state.len() || observable.ncols() != state.len() {
        return Err(Error::invalid(format!(
            "observable is {}x{}, state has {} amplitudes",
            observable.nrows(),
            observable.ncols(),
            state.len()
        )));
    }
    let mut acc = ZERO;
    for (r, bra) in state.iter().enumerate() {
        let mut row = ZERO;
        for (c, ket) in state.iter().enumerate() {
            row += observable[(r, c)] * ket;
        }
        acc += bra.conj() * row;
    }
    Ok(acc)
}

/// `tr_{rest} |ψ⟩⟨ψ|` on the sites in `keep` (kept in ascending order).
pub fn reduced_density_matrix(state: &[C64], dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    if state.len() != dims.iter().product::<usize>() {
        return Err(Error::invalid("state length does not match dims"));
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::invalid("keep must be a non-empty set of valid sites"));
    }
    let rest: Vec<usize> = (0..dims.len()).filter(|s| !keep.contains(s)).collect();
    let kdims: Vec<usize> = keep.iter().map(|&s| dims[s]).collect();
    let rdims: Vec<usize> = rest.iter().map(|&s| dims[s]).collect();
    let kdim: usize = kdims.iter().product();
    let rdim: usize = rdims.iter().product();
    let ks = strides(&kdims);
    let rs = strides(&rdims);
    // Ψ[k, r] reshaped over mixed radices
    let mut psi = ComplexMatrix::zeros(kdim, rdim);
    for (idx, amp) in state.iter().enumerate() {
        let a = digits(idx, dims);
        let k: usize = keep.iter().zip(&ks).map(|(&s, st)| a[s] * st).sum();
        let r: usize = rest.iter().zip(&rs).map(|(&s, st)| a[s] * st).sum();
        psi[(k, r)] = *amp;
    }
    Ok(&psi * psi.adjoint())
}

/// `tr(ρ_keep²)`.
pub fn reduced_purity(state: &[C64], dims: &[usize], keep: &[usize]) -> Result<f64> {
    if keep.len() >= dims.len() {
        return Err(Error::invalid("keep must be a strict subset of the sites"));
    }
    let rho = reduced_density_matrix(state, dims, keep)?;
    Ok(rho.iter().map(|z| z.norm_sqr()).sum())
}

/// Computational basis vector `|a⟩`.
pub fn basis_state(dims: &[usize], a: &[usize]) -> Vec<C64> {
    let total: usize = dims.iter().product();
    let idx: usize = a.iter().zip(strides(dims)).map(|(x, s)| x * s).sum();
    let mut v = vec![ZERO; total];
    v[idx] = ONE;
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{inner, norm, MATRIX_TOL};
    use crate::graphs::{cluster_representatives, enumerate_classes};
    use rand::{Rng, SeedableRng};

    fn p(d: u32) -> PrimeModulus {
        PrimeModulus::new(d).unwrap()
    }

    fn dist(a: &[C64], b: &[C64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
    }

    fn random_adjacency(n: usize, d: PrimeModulus, rng: &mut impl Rng) -> AdjacencyMatrix {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j, rng.random_range(0..d.get() as i64)));
            }
        }
        AdjacencyMatrix::from_edges(n, d, &edges).unwrap()
    }

    #[test]
    fn cp_gate_examples() {
        let cz = cp_gate(p(2));
        let expected = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, ONE, ONE, -ONE]));
        assert!(crate::algebra::max_abs_diff(&cz, &expected) < MATRIX_TOL);

        let cp3 = cp_gate(p(3));
        assert!(crate::algebra::is_unitary(&cp3, MATRIX_TOL));
        assert!(crate::algebra::max_abs_diff(&matrix_power(&cp3, 3), &ComplexMatrix::identity(9, 9)) < MATRIX_TOL);
        for j in 0..3 {
            for k in 0..3 {
                assert!((cp3[(j * 3 + k, j * 3 + k)] - cp3[(k * 3 + j, k * 3 + j)]).norm() < MATRIX_TOL);
            }
        }
    }

    #[test]
    fn small_graph_states() {
        let s = build_graph_state(&AdjacencyMatrix::empty(1, p(2)));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(dist(&s.amplitudes, &[C64::new(h, 0.0), C64::new(h, 0.0)]) < 1e-12);

        let edge = AdjacencyMatrix::from_edges(2, p(2), &[(0, 1, 1)]).unwrap();
        let s = build_graph_state(&edge);
        let half = C64::new(0.5, 0.0);
        assert!(dist(&s.amplitudes, &[half, half, half, -half]) < 1e-12);
    }

    #[test]
    fn generator_examples() {
        let x = shift_matrix(p(2));
        let z = clock_matrix(p(2));
        let id = ComplexMatrix::identity(2, 2);
        let g = stabilizer_generators(&AdjacencyMatrix::empty(2, p(2)));
        assert!(crate::algebra::max_abs_diff(&g.generators[0].to_matrix(), &kron(&[x.clone(), id.clone()]).unwrap()) < MATRIX_TOL);
        assert!(crate::algebra::max_abs_diff(&g.generators[1].to_matrix(), &kron(&[id, x.clone()]).unwrap()) < MATRIX_TOL);

        let edge = AdjacencyMatrix::from_edges(2, p(2), &[(0, 1, 1)]).unwrap();
        let g = stabilizer_generators(&edge);
        assert!(crate::algebra::max_abs_diff(&g.generators[0].to_matrix(), &kron(&[x.clone(), z.clone()]).unwrap()) < MATRIX_TOL);
        assert!(crate::algebra::max_abs_diff(&g.generators[1].to_matrix(), &kron(&[z, x]).unwrap()) < MATRIX_TOL);
    }

    #[test]
    fn generators_commute_and_have_prime_order() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let a = random_adjacency(3, p(3), &mut rng);
            let g = stabilizer_generators(&a);
            let mats: Vec<_> = g.generators.iter().map(|s| s.to_matrix()).collect();
            for (i, gi) in mats.iter().enumerate() {
                assert!(crate::algebra::max_abs_diff(&matrix_power(gi, 3), &ComplexMatrix::identity(27, 27)) < MATRIX_TOL);
                for gj in &mats[i + 1..] {
                    let comm = gi * gj - gj * gi;
                    assert!(comm.iter().all(|z| z.norm() < MATRIX_TOL));
                }
            }
        }
    }

    #[test]
    fn representatives_are_stabilized() {
        for (n, d) in [(2, 2), (3, 2), (2, 3), (2, 5)] {
            let cat = enumerate_classes(n, p(d)).unwrap();
            for rep in &cat.representatives {
                let s = build_graph_state(rep);
                assert!((norm(&s.amplitudes) - 1.0).abs() < 1e-12);
                for g in stabilizer_generators(rep).generators {
                    assert!(dist(&g.apply(&s.amplitudes), &s.amplitudes) < 1e-9);
                }
            }
        }
    }

    #[test]
    fn closed_form_matches_gate_sequence() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for (n, d) in [(2, 2), (3, 2), (4, 2), (3, 3), (2, 5), (3, 5), (2, 7)] {
            for _ in 0..5 {
                let a = random_adjacency(n, p(d), &mut rng);
                let closed = build_graph_state(&a).amplitudes;
                let gates = graph_state_by_gates(&a);
                assert!(closed.iter().zip(&gates).all(|(x, y)| (x - y).norm() < 1e-12));
            }
        }
    }

    #[test]
    fn direct_sum_is_tensor_product() {
        let a1 = AdjacencyMatrix::from_edges(2, p(3), &[(0, 1, 2)]).unwrap();
        let a2 = AdjacencyMatrix::from_edges(3, p(3), &[(0, 1, 1), (1, 2, 1)]).unwrap();
        let sum = AdjacencyMatrix::from_edges(5, p(3), &[(0, 1, 2), (2, 3, 1), (3, 4, 1)]).unwrap();
        let s1 = build_graph_state(&a1).amplitudes;
        let s2 = build_graph_state(&a2).amplitudes;
        let joint = build_graph_state(&sum).amplitudes;
        let prod: Vec<C64> = s1.iter().flat_map(|x| s2.iter().map(move |y| x * y)).collect();
        assert!(dist(&joint, &prod) < 1e-12);
    }

    #[test]
    fn expectation_examples() {
        let plus = build_graph_state(&AdjacencyMatrix::empty(1, p(2))).amplitudes;
        assert!((expectation(&plus, &shift_matrix(p(2))).unwrap() - ONE).norm() < 1e-12);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = vec![C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)];
        let z = clock_matrix(p(2));
        let id = ComplexMatrix::identity(2, 2);
        let zz = kron(&[z.clone(), z.clone()]).unwrap();
        let zi = kron(&[z, id]).unwrap();
        assert!((expectation(&bell, &zz).unwrap() - ONE).norm() < 1e-12);
        assert!(expectation(&bell, &zi).unwrap().norm() < 1e-12);
        assert!(expectation(&bell, &ComplexMatrix::identity(2, 2)).is_err());

        let mut ghz = vec![ZERO; 8];
        ghz[0] = C64::new(h, 0.0);
        ghz[7] = C64::new(h, 0.0);
        let x = shift_matrix(p(2));
        let xxx = kron(&[x.clone(), x.clone(), x]).unwrap();
        assert!((expectation(&ghz, &xxx).unwrap() - ONE).norm() < 1e-12);
    }

    #[test]
    fn purity_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = vec![C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)];
        assert!((reduced_purity(&bell, &[2, 2], &[0]).unwrap() - 0.5).abs() < 1e-12);
        assert!((reduced_purity(&bell, &[2, 2], &[1]).unwrap() - 0.5).abs() < 1e-12);

        let product = vec![C64::new(h, 0.0), C64::new(h, 0.0), ZERO, ZERO];
        assert!((reduced_purity(&product, &[2, 2], &[0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((reduced_purity(&product, &[2, 2], &[1]).unwrap() - 1.0).abs() < 1e-12);

        assert!(reduced_purity(&bell, &[2, 2], &[0, 1]).is_err());
        assert!(reduced_purity(&bell, &[2, 2], &[]).is_err());
    }

    #[test]
    fn clusters_factorize() {
        for dims in [vec![2, 2, 3], vec![3, 2, 3, 2], vec![5, 2, 5]] {
            let primes: Vec<_> = dims.iter().map(|&d| p(d)).collect();
            let sizes: Vec<usize> = dims.iter().map(|&d| d as usize).collect();
            let fam = cluster_representatives(&primes).unwrap();
            for rep in fam.representatives() {
                let s = GraphState::from_class(&rep);
                for c in &fam.clusters {
                    let purity = reduced_purity(&s.amplitudes, &sizes, &c.sites).unwrap();
                    assert!((purity - 1.0).abs() < 1e-9, "{dims:?} {rep}");
                }
                for g in class_stabilizer_generators(&rep).generators {
                    assert!(dist(&g.apply(&s.amplitudes), &s.amplitudes) < 1e-9);
                }
            }
        }
    }

    #[test]
    fn reduced_matrix_is_a_state() {
        let a = AdjacencyMatrix::from_edges(3, p(3), &[(0, 1, 1), (1, 2, 2)]).unwrap();
        let s = build_graph_state(&a);
        let rho = reduced_density_matrix(&s.amplitudes, &s.local_dims(), &[2, 0]).unwrap();
        assert!((rho.trace() - ONE).norm() < 1e-12);
        assert!(crate::algebra::is_hermitian(&rho, 1e-12));
        let v = basis_state(&[2, 3], &[1, 2]);
        assert_eq!(inner(&v, &v), ONE);
        assert_eq!(v[5], ONE);
    }
}
