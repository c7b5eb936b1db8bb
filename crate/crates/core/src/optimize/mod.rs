//! Measurement and state optimization: the stabilizer value over
//! local-Clifford class representatives, the fixed-dimension quantum value,
//! and parameter scans.
//!
//! Every restart draws from its own ChaCha8 stream (`seed`, stream index), so
//! results do not depend on how restarts are scheduled across workers. The
//! reduction keeps the first restart (in task order) attaining the maximum.

mod measurement;
mod scan;
pub(crate) mod seesaw;

pub use measurement::{basis_bloch, bloch_basis, haar_unitary, MeasurementSet};
pub use scan::{gap_scan, heatmap_csv, param_grid, scan_csv, w_heatmap, w_state, GapRow, HeatCell};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::algebra::C64;
use crate::bell::BellInequality;
use crate::graphs::{cluster_representatives_with_budget, ClassRepresentative};
use crate::states::GraphState;
use crate::{Error, Result, DEFAULT_ENUMERATION_BUDGET};

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Absolute objective change below which a run counts as converged.
    pub tol: f64,
    pub seed: u64,
    /// Worker threads; 0 uses every available core.
    pub jobs: usize,
    pub enumeration_budget: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 64,
            max_iters: 500,
            tol: 1e-9,
            seed: 0,
            jobs: 0,
            enumeration_budget: DEFAULT_ENUMERATION_BUDGET,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::invalid("restarts must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be positive"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::invalid("tol must be a positive number"));
        }
        if self.enumeration_budget == 0 {
            return Err(Error::invalid("enumeration budget must be positive"));
        }
        Ok(())
    }
}

/// One restart's outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct RestartTrace {
    /// Index into the class list for stabilizer runs, 0 otherwise.
    pub class_index: usize,
    pub restart: usize,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Largest objective decrease observed; 0 on a monotone run.
    pub max_decrease: f64,
}

#[derive(Clone, Debug)]
pub struct OptimizationReport {
    pub value: f64,
    pub best_state: Vec<C64>,
    pub best_measurements: MeasurementSet,
    /// The graph-state class attaining `value` (stabilizer runs only).
    pub best_class: Option<ClassRepresentative>,
    pub restarts: Vec<RestartTrace>,
    pub seed: u64,
    /// Whether the best restart met the tolerance within `max_iters`.
    pub converged: bool,
}

impl OptimizationReport {
    pub fn max_decrease(&self) -> f64 {
        self.restarts.iter().map(|t| t.max_decrease).fold(0.0, f64::max)
    }
}

pub(crate) fn restart_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn run_parallel<T: Send>(jobs: usize, count: usize, task: impl Fn(usize) -> T + Sync + Send) -> Result<Vec<T>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| (0..count).into_par_iter().map(task).collect()))
}

fn reduce(
    runs: Vec<(RestartTrace, seesaw::RunOutcome)>,
    classes: Option<&[ClassRepresentative]>,
    seed: u64,
) -> OptimizationReport {
    let mut best = 0;
    for (i, (t, _)) in runs.iter().enumerate() {
        if t.value > runs[best].0.value {
            best = i;
        }
    }
    let best_class = classes.map(|c| c[runs[best].0.class_index].clone());
    let converged = runs[best].0.converged;
    let value = runs[best].0.value;
    let mut traces = Vec::with_capacity(runs.len());
    let mut winner = None;
    for (i, (t, outcome)) in runs.into_iter().enumerate() {
        traces.push(t);
        if i == best {
            winner = Some(outcome);
        }
    }
    let winner = winner.expect("at least one restart");
    OptimizationReport {
        value,
        best_state: winner.state,
        best_measurements: winner.measurements,
        best_class,
        restarts: traces,
        seed,
        converged,
    }
}

fn trace(class_index: usize, restart: usize, o: &seesaw::RunOutcome) -> RestartTrace {
    RestartTrace {
        class_index,
        restart,
        value: o.value,
        iterations: o.iterations,
        converged: o.converged,
        max_decrease: o.max_decrease,
    }
}

fn check_state(ineq: &BellInequality, state: &[C64]) -> Result<()> {
    let dim = ineq.scenario.outcome_count();
    if state.len() != dim {
        return Err(Error::invalid(format!(
            "state has {} amplitudes, the inequality acts on dimension {dim}",
            state.len()
        )));
    }
    let norm = crate::algebra::norm(state);
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("state has norm {norm}, expected 1")));
    }
    Ok(())
}

/// Best Bell value over projective measurements for a fixed state.
pub fn optimize_measurements(ineq: &BellInequality, state: &[C64], cfg: &OptimizerConfig) -> Result<OptimizationReport> {
    cfg.validate()?;
    check_state(ineq, state)?;
    let sc = &ineq.scenario;
    let runs = run_parallel(cfg.jobs, cfg.restarts, |r| {
        let mut rng = restart_rng(cfg.seed, r as u64);
        let meas = MeasurementSet::haar_random(&sc.outcomes, &sc.settings, &mut rng);
        let o = seesaw::run_measurements(ineq, state, meas, cfg.max_iters, cfg.tol);
        (trace(0, r, &o), o)
    })?;
    Ok(reduce(runs, None, cfg.seed))
}

/// Maximum over every direct sum of per-cluster LC-class representatives of
/// the best value over measurements.
pub fn stabilizer_value(ineq: &BellInequality, cfg: &OptimizerConfig) -> Result<OptimizationReport> {
    cfg.validate()?;
    let dims = ineq.scenario.prime_dims()?;
    let family = cluster_representatives_with_budget(&dims, cfg.enumeration_budget)?;
    let classes: Vec<ClassRepresentative> = family.representatives().collect();
    let states: Vec<GraphState> = classes.iter().map(GraphState::from_class).collect();
    let sc = &ineq.scenario;
    let per = cfg.restarts;
    let runs = run_parallel(cfg.jobs, classes.len() * per, |task| {
        let (c, r) = (task / per, task % per);
        let mut rng = restart_rng(cfg.seed, ((c as u64) << 32) | r as u64);
        let meas = MeasurementSet::haar_random(&sc.outcomes, &sc.settings, &mut rng);
        let o = seesaw::run_measurements(ineq, &states[c].amplitudes, meas, cfg.max_iters, cfg.tol);
        (trace(c, r, &o), o)
    })?;
    Ok(reduce(runs, Some(&classes), cfg.seed))
}

fn random_state(dim: usize, rng: &mut impl Rng) -> Vec<C64> {
    let v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let n = crate::algebra::norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

/// Best value over all states of `⊗ C^{d_i}` and all projective measurements.
/// A lower bound on the true optimum, which may need larger local spaces.
pub fn quantum_value(ineq: &BellInequality, cfg: &OptimizerConfig) -> Result<OptimizationReport> {
    quantum_value_from(ineq, cfg, None)
}

/// [`quantum_value`] with one extra run started from `warm` (typically the
/// stabilizer optimum). The see-saw never decreases, so the result is at
/// least `warm.value`.
pub fn quantum_value_from(
    ineq: &BellInequality,
    cfg: &OptimizerConfig,
    warm: Option<&OptimizationReport>,
) -> Result<OptimizationReport> {
    cfg.validate()?;
    ineq.scenario.prime_dims()?;
    if let Some(w) = warm {
        check_state(ineq, &w.best_state)?;
        w.best_measurements.validate(1e-8)?;
        if w.best_measurements.dims() != ineq.scenario.outcomes || w.best_measurements.settings() != ineq.scenario.settings {
            return Err(Error::invalid("warm-start measurements do not match the scenario"));
        }
    }
    let sc = &ineq.scenario;
    let count = cfg.restarts + usize::from(warm.is_some());
    let runs = run_parallel(cfg.jobs, count, |r| {
        let (state, meas) = match warm {
            Some(w) if r == cfg.restarts => (w.best_state.clone(), w.best_measurements.clone()),
            _ => {
                let mut rng = restart_rng(cfg.seed, r as u64);
                let state = random_state(sc.outcome_count(), &mut rng);
                (state, MeasurementSet::haar_random(&sc.outcomes, &sc.settings, &mut rng))
            }
        };
        let o = seesaw::run_joint(ineq, state, meas, cfg.max_iters, cfg.tol);
        (trace(0, r, &o), o)
    })?;
    Ok(reduce(runs, None, cfg.seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ZERO;
    use crate::bell::{behavior_from_state, catalog_chsh, catalog_tilted_chsh, evaluate};

    fn quick(seed: u64) -> OptimizerConfig {
        OptimizerConfig { restarts: 8, seed, jobs: 2, ..OptimizerConfig::default() }
    }

    fn bell_pair() -> Vec<C64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        vec![C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)]
    }

    #[test]
    fn config_validation() {
        assert!(OptimizerConfig::default().validate().is_ok());
        assert!(OptimizerConfig { restarts: 0, ..Default::default() }.validate().is_err());
        assert!(OptimizerConfig { tol: 0.0, ..Default::default() }.validate().is_err());
        assert!(OptimizerConfig { max_iters: 0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn chsh_values() {
        let r = optimize_measurements(&catalog_chsh(), &bell_pair(), &quick(1)).unwrap();
        assert!((r.value - 8f64.sqrt()).abs() < 1e-6);
        let re = evaluate(&catalog_chsh(), &behavior_from_state(&r.best_state, &r.best_measurements).unwrap()).unwrap();
        assert!((re - r.value).abs() < 1e-8);
        assert_eq!(r.restarts.len(), 8);

        let q = quantum_value(&catalog_chsh(), &quick(2)).unwrap();
        assert!((q.value - 8f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn product_state_reaches_local_bound() {
        let mut zero = vec![ZERO; 4];
        zero[0] = C64::new(1.0, 0.0);
        for alpha in [0.3, 1.2] {
            let r = optimize_measurements(&catalog_tilted_chsh(alpha).unwrap(), &zero, &quick(3)).unwrap();
            assert!((r.value - (2.0 + alpha)).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_mismatched_state() {
        assert!(optimize_measurements(&catalog_chsh(), &[C64::new(1.0, 0.0)], &quick(0)).is_err());
        assert!(optimize_measurements(&catalog_chsh(), &[ZERO; 4], &quick(0)).is_err());
    }

    #[test]
    fn deterministic_across_workers() {
        let ineq = catalog_tilted_chsh(0.9).unwrap();
        let a = stabilizer_value(&ineq, &OptimizerConfig { jobs: 1, ..quick(7) }).unwrap();
        let b = stabilizer_value(&ineq, &OptimizerConfig { jobs: 4, ..quick(7) }).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.restarts, b.restarts);
        assert_eq!(a.best_class, b.best_class);
    }

    #[test]
    fn warm_start_dominates_stabilizer_value() {
        for alpha in [1.5, 2.0] {
            let ineq = catalog_tilted_chsh(alpha).unwrap();
            let cfg = quick(5);
            let stab = stabilizer_value(&ineq, &cfg).unwrap();
            let q = quantum_value_from(&ineq, &cfg, Some(&stab)).unwrap();
            assert!(q.value >= stab.value, "alpha={alpha}: {} < {}", q.value, stab.value);
            assert_eq!(q.restarts.len(), cfg.restarts + 1);
        }
        let mut bad = stabilizer_value(&catalog_chsh(), &quick(0)).unwrap();
        bad.best_state.pop();
        assert!(quantum_value_from(&catalog_chsh(), &quick(0), Some(&bad)).is_err());
    }
}
