use magicwit::algebra::{kron, PrimeModulus, C64};
use magicwit::bell::{catalog_cglmp, catalog_chsh, local_bound};
use magicwit::graphs::AdjacencyMatrix;
use magicwit::optimize::{haar_unitary, optimize_measurements, stabilizer_value, OptimizerConfig};
use magicwit::states::build_graph_state;
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cfg() -> OptimizerConfig {
    OptimizerConfig { restarts: 16, seed: 4, jobs: 1, ..OptimizerConfig::default() }
}

// The optimum over measurements cannot see local unitaries on the state.
#[test]
fn measurement_optimum_is_local_unitary_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for d in [2u32, 3] {
        let m = PrimeModulus::new(d).unwrap();
        let ineq = if d == 2 { catalog_chsh() } else { catalog_cglmp(m) };
        let edge = AdjacencyMatrix::from_edges(2, m, &[(0, 1, 1)]).unwrap();
        let psi = build_graph_state(&edge).amplitudes;
        let u = kron(&[haar_unitary(d as usize, &mut rng), haar_unitary(d as usize, &mut rng)]).unwrap();
        let rotated: Vec<C64> = (&u * DVector::from_vec(psi.clone())).iter().copied().collect();

        let a = optimize_measurements(&ineq, &psi, &cfg()).unwrap().value;
        let b = optimize_measurements(&ineq, &rotated, &cfg()).unwrap().value;
        assert!((a - b).abs() < 1e-6, "d={d}: {a} vs {b}");
    }
}

#[test]
fn value_ordering_on_catalog() {
    for ineq in [catalog_chsh(), catalog_cglmp(PrimeModulus::new(3).unwrap())] {
        let local = local_bound(&ineq).unwrap();
        let stab = stabilizer_value(&ineq, &cfg()).unwrap().value;
        assert!(local <= stab + 1e-9, "{}: {local} > {stab}", ineq.name);
        assert!(local <= 2.0 + 1e-9 && stab > 2.0, "{}", ineq.name);
    }
}
