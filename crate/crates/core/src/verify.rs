//! Acceptance checks, shared by `magicwit verify` and the acceptance test
//! target. Each check returns a [`CheckResult`] instead of panicking so that
//! callers can print a full report.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::PrimeModulus;
use crate::bell::{
    catalog_cglmp, catalog_chsh, catalog_svetlichny_r2, catalog_tilted_chsh, correlators_from_behavior, evaluate,
    fourier_coefficients, local_bound, Behavior, BellInequality, Scenario,
};
use crate::census::{stabilizer_state_count, stabilizer_states};
use crate::graphs::{cluster_representatives, enumerate_classes, matrix_count, AdjacencyMatrix};
use crate::optimize::{
    gap_scan, param_grid, quantum_value, scan_csv, stabilizer_value, w_heatmap, OptimizationReport, OptimizerConfig,
};
use crate::states::{build_graph_state, graph_state_by_gates, reduced_purity, stabilizer_generators, GraphState};
use crate::Result;

/// Deliberate corruptions used to confirm that a check can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Scales every CGLMP coefficient by 1.01.
    CorruptCglmp,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    /// Only the fast checks (1, 6, 7 and a reduced 8).
    pub quick: bool,
    pub fault: Option<Fault>,
    pub seed: u64,
    /// Worker threads for the optimizer; 0 uses every core.
    pub jobs: usize,
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

pub const CHECK_NAMES: [&str; 8] = [
    "orbit counts",
    "stabilizer-state census",
    "tilted CHSH",
    "CGLMP table",
    "tripartite S3+R2",
    "distinct-prime corollary",
    "property suites",
    "determinism",
];

/// Ids run by `quick` mode.
pub const QUICK_CHECKS: [u8; 4] = [1, 6, 7, 8];

fn config(opts: &VerifyOptions) -> OptimizerConfig {
    OptimizerConfig { seed: opts.seed, jobs: opts.jobs, ..OptimizerConfig::default() }
}

pub fn run_all(opts: &VerifyOptions) -> Vec<CheckResult> {
    (1..=8u8)
        .filter(|id| !opts.quick || QUICK_CHECKS.contains(id))
        .map(|id| run_check(id, opts))
        .collect()
}

pub fn run_check(id: u8, opts: &VerifyOptions) -> CheckResult {
    let start = Instant::now();
    let outcome = match id {
        1 => check_orbits(),
        2 => check_census(),
        3 => check_tilted(opts),
        4 => check_cglmp(opts),
        5 => check_tripartite(opts),
        6 => check_corollary(opts),
        7 => check_properties(opts),
        8 => check_determinism(opts),
        _ => Ok((false, format!("no check with id {id}"))),
    };
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    if let Some(limit) = time_limit(id) {
        if elapsed > limit {
            passed = false;
            detail.push_str(&format!("; exceeded time limit of {}s", limit.as_secs()));
        }
    }
    let name = CHECK_NAMES.get(usize::from(id).wrapping_sub(1)).copied().unwrap_or("unknown");
    CheckResult { id, name, passed, detail, elapsed }
}

fn time_limit(id: u8) -> Option<Duration> {
    match id {
        1 => Some(Duration::from_secs(1)),
        2 | 3 => Some(Duration::from_secs(60)),
        4 => Some(Duration::from_secs(600)),
        5 => Some(Duration::from_secs(300)),
        _ => None,
    }
}

type Outcome = Result<(bool, String)>;

fn p(d: u32) -> PrimeModulus {
    PrimeModulus::new(d).expect("literal prime")
}

fn check_orbits() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, d, classes) in [(2usize, 2u32, 2usize), (3, 2, 5), (2, 3, 2)] {
        let cat = enumerate_classes(n, p(d))?;
        // orbits partition the d^{n(n-1)/2} adjacency matrices
        let total = u128::from(cat.total());
        let expected_total = matrix_count(n, p(d));
        ok &= cat.len() == classes && total == expected_total;
        parts.push(format!("(n={n},d={d}) classes {} orbit total {total}/{expected_total}", cat.len()));
    }
    Ok((ok, parts.join(", ")))
}

fn check_census() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [2, 3] {
        let found = stabilizer_states(p(2), n)?.len() as u64;
        let formula = stabilizer_state_count(p(2), n);
        ok &= found == formula;
        parts.push(format!("n={n}: {found} states (formula {formula})"));
    }
    Ok((ok, parts.join(", ")))
}

fn check_tilted(opts: &VerifyOptions) -> Outcome {
    let cfg = config(opts);
    let mut ok = true;
    let mut worst_stab: f64 = 0.0;
    let mut worst_q: f64 = 0.0;
    for i in 0..8 {
        let alpha = 0.25 * i as f64;
        let ineq = catalog_tilted_chsh(alpha)?;
        let stab = stabilizer_value(&ineq, &cfg)?.value;
        let q = quantum_value(&ineq, &cfg)?.value;
        let stab_cf = (8f64).sqrt().max(2.0 + alpha);
        let q_cf = (8.0 + 2.0 * alpha * alpha).sqrt();
        worst_stab = worst_stab.max((stab - stab_cf).abs());
        worst_q = worst_q.max((q - q_cf).abs());
        let gap_expected = q_cf - stab_cf > 1e-6;
        let gap_seen = q - stab > 1e-6;
        ok &= (stab - stab_cf).abs() < 1e-5 && (q - q_cf).abs() < 1e-5 && gap_expected == gap_seen;
    }
    Ok((ok, format!("max |stab - closed form| {worst_stab:.2e}, max |quantum - closed form| {worst_q:.2e}")))
}

fn cglmp_for(d: u32, fault: Option<Fault>) -> BellInequality {
    let mut ineq = catalog_cglmp(p(d));
    if fault == Some(Fault::CorruptCglmp) {
        ineq.coeffs.iter_mut().for_each(|c| *c *= 1.01);
    }
    ineq
}

fn check_cglmp(opts: &VerifyOptions) -> Outcome {
    let cfg = config(opts);
    let mut ok = true;
    let mut parts = Vec::new();
    for (d, stab_ref, q_ref, stab_tol) in [(3, 2.8729, 2.9149, 5e-4), (5, 2.9105, 3.0157, 1e-3), (7, 2.9272, 3.0776, 1e-3)] {
        let ineq = cglmp_for(d, opts.fault);
        let stab = stabilizer_value(&ineq, &cfg)?.value;
        let q = quantum_value(&ineq, &cfg)?.value;
        ok &= (stab - stab_ref).abs() < stab_tol && (q - q_ref).abs() < 1e-3;
        parts.push(format!("d={d}: stab {stab:.4} quantum {q:.4}"));
    }
    Ok((ok, parts.join(", ")))
}

/// θ grid for the W-state scan: 7 equally spaced points in [0, π/2] plus the
/// W point `arccos(1/√3)`.
pub fn w_theta_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (0..7).map(|i| PI / 2.0 * i as f64 / 6.0).collect();
    g.push((1.0 / 3f64.sqrt()).acos());
    g
}

pub fn w_phi_grid() -> Vec<f64> {
    (0..7).map(|i| PI / 2.0 * i as f64 / 6.0).collect()
}

fn check_tripartite(opts: &VerifyOptions) -> Outcome {
    let cfg = config(opts);
    let ineq = catalog_svetlichny_r2();
    let classes = cluster_representatives(&ineq.scenario.prime_dims()?)?.count();
    let stab = stabilizer_value(&ineq, &cfg)?.value;
    let cells = w_heatmap(&w_theta_grid(), &w_phi_grid(), &cfg)?;
    let peak = cells.iter().max_by(|a, b| a.value.total_cmp(&b.value)).expect("non-empty grid");
    let w_theta = (1.0 / 3f64.sqrt()).acos();
    let at_w = peak.theta == w_theta && (peak.phi - PI / 4.0).abs() < 1e-12;
    let biseparable = cells.iter().filter(|c| c.theta == 0.0 || c.phi == 0.0 || c.phi == PI / 2.0);
    let worst_bisep = biseparable.map(|c| c.value).fold(f64::NEG_INFINITY, f64::max);
    let ok = classes == 5
        && (stab - 6.0).abs() < 1e-5
        && (peak.value - 7.26).abs() < 0.02
        && at_w
        && worst_bisep <= 6.0 + 1e-6;
    Ok((
        ok,
        format!(
            "stab {stab:.6} over {classes} classes, peak {:.4} at (θ,φ)=({:.4}π,{:.4}π), biseparable max {worst_bisep:.6}",
            peak.value,
            peak.theta / PI,
            peak.phi / PI
        ),
    ))
}

fn random_inequality(sc: &Scenario, rng: &mut impl Rng) -> Result<BellInequality> {
    let coeffs = (0..sc.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    BellInequality::new("random", sc.clone(), coeffs)
}

fn random_behavior(sc: &Scenario, rng: &mut impl Rng) -> Result<Behavior> {
    let na = sc.outcome_count();
    let mut p = Vec::with_capacity(sc.len());
    for _ in 0..sc.setting_count() {
        let raw: Vec<f64> = (0..na).map(|_| rng.random::<f64>()).collect();
        let s: f64 = raw.iter().sum();
        p.extend(raw.into_iter().map(|v| v / s));
    }
    Behavior::new(sc.clone(), p)
}

fn check_corollary(opts: &VerifyOptions) -> Outcome {
    let cfg = OptimizerConfig { restarts: 8, ..config(opts) };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x6);
    let sc = Scenario::new(vec![2, 3], vec![2, 2])?;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..20 {
        let ineq = random_inequality(&sc, &mut rng)?;
        let stab = stabilizer_value(&ineq, &cfg)?.value;
        worst = worst.max(stab - local_bound(&ineq)?);
    }
    Ok((worst <= 1e-6, format!("max (stab - local) over 20 inequalities: {worst:.2e}")))
}

fn check_properties(opts: &VerifyOptions) -> Outcome {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x7);

    let mut dft_err: f64 = 0.0;
    for (outcomes, settings) in [(vec![2, 2], vec![2, 2]), (vec![3, 3], vec![2, 2]), (vec![2, 2, 2], vec![2, 2, 2])] {
        let sc = Scenario::new(outcomes, settings)?;
        for _ in 0..100 {
            let ineq = random_inequality(&sc, &mut rng)?;
            let b = random_behavior(&sc, &mut rng)?;
            let via = fourier_coefficients(&ineq).pair(&correlators_from_behavior(&b))?;
            dft_err = dft_err.max((via.re - evaluate(&ineq, &b)?).abs()).max(via.im.abs());
        }
    }
    if dft_err >= 1e-9 {
        failures.push(format!("DFT round trip {dft_err:.2e}"));
    }

    let mut fix_err: f64 = 0.0;
    for (n, d) in [(2, 2), (3, 2), (2, 3), (2, 5)] {
        for rep in enumerate_classes(n, p(d))?.representatives {
            let s = build_graph_state(&rep).amplitudes;
            for g in stabilizer_generators(&rep).generators {
                let gs = g.apply(&s);
                let dist = gs.iter().zip(&s).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
                fix_err = fix_err.max(dist);
            }
        }
    }
    if fix_err >= 1e-9 {
        failures.push(format!("stabilizer fixed point {fix_err:.2e}"));
    }

    let mut gate_err: f64 = 0.0;
    for (n, d) in [(3usize, 2u32), (4, 2), (3, 3), (2, 5), (2, 7)] {
        for _ in 0..10 {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    edges.push((i, j, rng.random_range(0..i64::from(d))));
                }
            }
            let a = AdjacencyMatrix::from_edges(n, p(d), &edges)?;
            let closed = build_graph_state(&a).amplitudes;
            let gates = graph_state_by_gates(&a);
            gate_err = closed.iter().zip(&gates).map(|(x, y)| (x - y).norm()).fold(gate_err, f64::max);
        }
    }
    if gate_err >= 1e-12 {
        failures.push(format!("closed form vs gates {gate_err:.2e}"));
    }

    let mut purity_err: f64 = 0.0;
    for dims in [vec![2u32, 2, 3], vec![3, 2, 3, 2]] {
        let primes: Vec<PrimeModulus> = dims.iter().map(|&d| p(d)).collect();
        let sizes: Vec<usize> = dims.iter().map(|&d| d as usize).collect();
        let family = cluster_representatives(&primes)?;
        for rep in family.representatives() {
            let s = GraphState::from_class(&rep);
            for c in &family.clusters {
                purity_err = purity_err.max((reduced_purity(&s.amplitudes, &sizes, &c.sites)? - 1.0).abs());
            }
        }
    }
    if purity_err >= 1e-9 {
        failures.push(format!("cluster purity {purity_err:.2e}"));
    }

    // sandwich, which also exercises the see-saw on every catalog entry
    let cfg = config(opts);
    let catalog = vec![
        catalog_chsh(),
        catalog_tilted_chsh(0.5)?,
        catalog_tilted_chsh(1.5)?,
        catalog_cglmp(p(3)),
        catalog_svetlichny_r2(),
    ];
    let mut max_decrease: f64 = 0.0;
    let mut sandwich = Vec::new();
    for ineq in &catalog {
        let local = local_bound(ineq)?;
        let stab = stabilizer_value(ineq, &cfg)?;
        let q = quantum_value(ineq, &cfg)?;
        max_decrease = max_decrease.max(decrease(&stab)).max(decrease(&q));
        if !(local <= stab.value + 1e-6 && stab.value <= q.value + 1e-6) {
            sandwich.push(format!("{}: {local:.6} / {:.6} / {:.6}", ineq.name, stab.value, q.value));
        }
    }
    if !sandwich.is_empty() {
        failures.push(format!("sandwich violated for {}", sandwich.join("; ")));
    }
    if max_decrease > 1e-9 {
        failures.push(format!("see-saw decreased by {max_decrease:.2e}"));
    }

    let detail = if failures.is_empty() {
        format!(
            "DFT {dft_err:.1e}, fixed point {fix_err:.1e}, gates {gate_err:.1e}, purity {purity_err:.1e}, \
             see-saw max decrease {max_decrease:.1e}, sandwich ok on {} inequalities",
            catalog.len()
        )
    } else {
        failures.join(", ")
    };
    Ok((failures.is_empty(), detail))
}

fn decrease(r: &OptimizationReport) -> f64 {
    r.max_decrease()
}

fn check_determinism(opts: &VerifyOptions) -> Outcome {
    let (step, restarts) = if opts.quick { (0.5, 4) } else { (0.25, 16) };
    let params = param_grid(0.0, 2.0, step)?;
    let family = |alpha: f64| catalog_tilted_chsh(alpha);
    let mut outputs = Vec::new();
    for jobs in [1, 8, 1, 8] {
        let cfg = OptimizerConfig { restarts, jobs, seed: opts.seed, ..OptimizerConfig::default() };
        outputs.push(scan_csv(&gap_scan(&family, &params, &cfg)?));
    }
    let identical = outputs.windows(2).all(|w| w[0] == w[1]);
    Ok((identical, format!("{} rows, jobs 1 vs 8 run twice, byte-identical: {identical}", params.len())))
}
