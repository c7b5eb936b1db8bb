//! Bell inequalities in probability form, behaviors, the correlator (Fourier)
//! picture and classical local bounds.
//!
//! Tables are flat vectors indexed by `x_flat * A + a_flat`, where `A = Π d_i`
//! and both multi-indices are mixed-radix with party 0 most significant.

mod catalog;

pub use catalog::{catalog_cglmp, catalog_chsh, catalog_svetlichny_r2, catalog_tilted_chsh, TILTED_CHSH_ALPHA_MAX};

use std::f64::consts::TAU;

use crate::algebra::{apply_local, digits, PrimeModulus, C64, ZERO};
use crate::optimize::MeasurementSet;
use crate::{Error, Result, DEFAULT_ENUMERATION_BUDGET};

/// Shape shared by inequalities, behaviors and correlator tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub outcomes: Vec<usize>,
    pub settings: Vec<usize>,
}

impl Scenario {
    pub fn new(outcomes: Vec<usize>, settings: Vec<usize>) -> Result<Self> {
        if outcomes.is_empty() || outcomes.len() != settings.len() {
            return Err(Error::invalid(format!(
                "need one outcome count and one setting count per party, got {} and {}",
                outcomes.len(),
                settings.len()
            )));
        }
        if outcomes.iter().any(|&d| d < 2) {
            return Err(Error::invalid("every party needs at least two outcomes"));
        }
        if settings.contains(&0) {
            return Err(Error::invalid("every party needs at least one setting"));
        }
        Ok(Scenario { outcomes, settings })
    }

    pub fn parties(&self) -> usize {
        self.outcomes.len()
    }

    pub fn outcome_count(&self) -> usize {
        self.outcomes.iter().product()
    }

    pub fn setting_count(&self) -> usize {
        self.settings.iter().product()
    }

    pub fn len(&self) -> usize {
        self.outcome_count() * self.setting_count()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, a: &[usize], x: &[usize]) -> usize {
        let mut xf = 0;
        for (xi, mi) in x.iter().zip(&self.settings) {
            xf = xf * mi + xi;
        }
        let mut af = 0;
        for (ai, di) in a.iter().zip(&self.outcomes) {
            af = af * di + ai;
        }
        xf * self.outcome_count() + af
    }

    /// Outcome dimensions as primes, required by the optimizer.
    pub fn prime_dims(&self) -> Result<Vec<PrimeModulus>> {
        self.outcomes.iter().map(|&d| PrimeModulus::new(d as u32)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BellInequality {
    pub name: String,
    pub scenario: Scenario,
    /// `I^a_x`, indexed as described in the module docs.
    pub coeffs: Vec<f64>,
    /// Local bound quoted alongside the definition, if any.
    pub known_local: Option<f64>,
}

impl BellInequality {
    pub fn new(name: impl Into<String>, scenario: Scenario, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != scenario.len() {
            return Err(Error::invalid(format!(
                "coefficient table has {} entries, scenario needs {}",
                coeffs.len(),
                scenario.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("coefficients must be finite"));
        }
        Ok(BellInequality { name: name.into(), scenario, coeffs, known_local: None })
    }

    pub fn coeff(&self, a: &[usize], x: &[usize]) -> f64 {
        self.coeffs[self.scenario.index(a, x)]
    }

    /// Relabels the outcomes of `party` under setting `setting`: outcome `a`
    /// becomes `perm[a]`.
    pub fn relabel_outcomes(&self, party: usize, setting: usize, perm: &[usize]) -> Result<Self> {
        let sc = &self.scenario;
        check_perm(perm, sc.outcomes[party])?;
        let mut out = self.clone();
        for_each_entry(sc, |a, x, idx| {
            if x[party] == setting {
                let mut b = a.to_vec();
                b[party] = perm[a[party]];
                out.coeffs[sc.index(&b, x)] = self.coeffs[idx];
            }
        });
        Ok(out)
    }

    /// Relabels the settings of `party`: setting `x` becomes `perm[x]`.
    pub fn relabel_settings(&self, party: usize, perm: &[usize]) -> Result<Self> {
        let sc = &self.scenario;
        check_perm(perm, sc.settings[party])?;
        let mut out = self.clone();
        for_each_entry(sc, |a, x, idx| {
            let mut y = x.to_vec();
            y[party] = perm[x[party]];
            out.coeffs[sc.index(a, &y)] = self.coeffs[idx];
        });
        Ok(out)
    }
}

fn check_perm(perm: &[usize], len: usize) -> Result<()> {
    let mut seen = vec![false; len];
    if perm.len() != len {
        return Err(Error::invalid("permutation has the wrong length"));
    }
    for &p in perm {
        if p >= len || seen[p] {
            return Err(Error::invalid("not a permutation"));
        }
        seen[p] = true;
    }
    Ok(())
}

fn for_each_entry(sc: &Scenario, mut f: impl FnMut(&[usize], &[usize], usize)) {
    let na = sc.outcome_count();
    for xf in 0..sc.setting_count() {
        let x = digits(xf, &sc.settings);
        for af in 0..na {
            let a = digits(af, &sc.outcomes);
            f(&a, &x, xf * na + af);
        }
    }
}

/// A conditional probability table `p(a|x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Behavior {
    pub scenario: Scenario,
    pub p: Vec<f64>,
}

impl Behavior {
    pub fn new(scenario: Scenario, p: Vec<f64>) -> Result<Self> {
        if p.len() != scenario.len() {
            return Err(Error::invalid("probability table has the wrong size"));
        }
        if p.iter().any(|&v| !(v >= -1e-12)) {
            return Err(Error::invalid("probabilities must be nonnegative"));
        }
        let na = scenario.outcome_count();
        for block in p.chunks(na) {
            let s: f64 = block.iter().sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(Error::invalid(format!("probabilities for one setting sum to {s}")));
            }
        }
        Ok(Behavior { scenario, p })
    }

    /// The deterministic behavior in which party `i` outputs `strategy[i][x_i]`.
    pub fn deterministic(scenario: Scenario, strategy: &[Vec<usize>]) -> Result<Self> {
        if strategy.len() != scenario.parties() {
            return Err(Error::invalid("one response function per party required"));
        }
        let mut p = vec![0.0; scenario.len()];
        for xf in 0..scenario.setting_count() {
            let x = digits(xf, &scenario.settings);
            let a: Vec<usize> = strategy.iter().zip(&x).map(|(s, &xi)| s[xi]).collect();
            p[scenario.index(&a, &x)] = 1.0;
        }
        Behavior::new(scenario, p)
    }

    pub fn uniform(scenario: Scenario) -> Self {
        let v = 1.0 / scenario.outcome_count() as f64;
        let p = vec![v; scenario.len()];
        Behavior { scenario, p }
    }
}

/// Complex table over `(k, x)` with `k ∈ ⊕ F_{d_i}`, same layout as the
/// probability tables. Holds either the coefficients `Ĩ^k_x` or the
/// correlators `C^k_x`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelatorForm {
    pub scenario: Scenario,
    pub coeffs: Vec<C64>,
}

impl CorrelatorForm {
    pub fn get(&self, k: &[usize], x: &[usize]) -> C64 {
        self.coeffs[self.scenario.index(k, x)]
    }

    /// `Σ_{k,x} self^k_x · other^k_x`.
    pub fn pair(&self, other: &CorrelatorForm) -> Result<C64> {
        if self.scenario != other.scenario {
            return Err(Error::invalid("correlator tables have different shapes"));
        }
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum())
    }

    /// Inverse of [`fourier_coefficients`]: `I^a_x = Σ_k Ĩ^k_x e^{2πi k·a/d}`.
    /// Fails when the result is not real.
    pub fn to_inequality(&self, name: impl Into<String>) -> Result<BellInequality> {
        let values = block_dft(&self.scenario, &self.coeffs, 1.0, 1.0);
        if values.iter().any(|z| z.im.abs() > 1e-9) {
            return Err(Error::invalid("correlator coefficients do not define a real inequality"));
        }
        BellInequality::new(name, self.scenario.clone(), values.iter().map(|z| z.re).collect())
    }
}

/// Per-setting multidimensional DFT: `out^k = scale · Σ_a e^{sign·2πi k·a/d} in^a`.
fn block_dft(sc: &Scenario, input: &[C64], sign: f64, scale: f64) -> Vec<C64> {
    let na = sc.outcome_count();
    let tuples: Vec<Vec<usize>> = (0..na).map(|i| digits(i, &sc.outcomes)).collect();
    let phase = |k: &[usize], a: &[usize]| {
        let t: f64 = k
            .iter()
            .zip(a)
            .zip(&sc.outcomes)
            .map(|((&ki, &ai), &d)| ((ki * ai) % d) as f64 / d as f64)
            .sum();
        C64::from_polar(1.0, sign * TAU * t)
    };
    let mut out = vec![ZERO; input.len()];
    for (block_in, block_out) in input.chunks(na).zip(out.chunks_mut(na)) {
        for (kf, slot) in block_out.iter_mut().enumerate() {
            let mut acc = ZERO;
            for (af, v) in block_in.iter().enumerate() {
                if *v != ZERO {
                    acc += phase(&tuples[kf], &tuples[af]) * v;
                }
            }
            *slot = acc * scale;
        }
    }
    out
}

/// `Ĩ^k_x = (Π d_i)^{-1} Σ_a e^{-2πi Σ k_i a_i/d_i} I^a_x`, so that
/// `Σ Ĩ^k_x C^k_x = Σ I^a_x p(a|x)` with the correlators of
/// [`correlators_from_behavior`].
pub fn fourier_coefficients(ineq: &BellInequality) -> CorrelatorForm {
    let input: Vec<C64> = ineq.coeffs.iter().map(|&c| C64::new(c, 0.0)).collect();
    let scale = 1.0 / ineq.scenario.outcome_count() as f64;
    CorrelatorForm { scenario: ineq.scenario.clone(), coeffs: block_dft(&ineq.scenario, &input, -1.0, scale) }
}

/// `C^k_x = Σ_a e^{2πi Σ k_i a_i/d_i} p(a|x)`.
pub fn correlators_from_behavior(p: &Behavior) -> CorrelatorForm {
    let input: Vec<C64> = p.p.iter().map(|&c| C64::new(c, 0.0)).collect();
    CorrelatorForm { scenario: p.scenario.clone(), coeffs: block_dft(&p.scenario, &input, 1.0, 1.0) }
}

/// Born-rule behavior of `state` under the projective measurements `m`.
pub fn behavior_from_state(state: &[C64], m: &MeasurementSet) -> Result<Behavior> {
    m.validate(crate::algebra::MATRIX_TOL)?;
    let dims = m.dims();
    if state.len() != dims.iter().product::<usize>() {
        return Err(Error::invalid(format!(
            "state has {} amplitudes, measurements act on dimension {}",
            state.len(),
            dims.iter().product::<usize>()
        )));
    }
    let scenario = Scenario::new(dims.clone(), m.settings())?;
    let mut p = Vec::with_capacity(scenario.len());
    for xf in 0..scenario.setting_count() {
        let x = digits(xf, &scenario.settings);
        let mut t = state.to_vec();
        for (site, &xi) in x.iter().enumerate() {
            t = apply_local(&t, &dims, site, &m.bases[site][xi].adjoint());
        }
        p.extend(t.iter().map(|z| z.norm_sqr()));
    }
    Behavior::new(scenario, p)
}

/// `Σ_{a,x} I^a_x p(a|x)`.
pub fn evaluate(ineq: &BellInequality, p: &Behavior) -> Result<f64> {
    if ineq.scenario != p.scenario {
        return Err(Error::invalid(format!(
            "inequality shape {:?}/{:?} does not match behavior shape {:?}/{:?}",
            ineq.scenario.outcomes, ineq.scenario.settings, p.scenario.outcomes, p.scenario.settings
        )));
    }
    Ok(ineq.coeffs.iter().zip(&p.p).map(|(c, q)| c * q).sum())
}

/// Number of deterministic local strategies, `Π d_i^{m_i}`, saturating.
pub fn strategy_count(sc: &Scenario) -> u128 {
    sc.outcomes.iter().zip(&sc.settings).fold(1u128, |acc, (&d, &m)| {
        (d as u128).checked_pow(m as u32).and_then(|v| acc.checked_mul(v)).unwrap_or(u128::MAX)
    })
}

pub fn local_bound(ineq: &BellInequality) -> Result<f64> {
    local_bound_with_budget(ineq, DEFAULT_ENUMERATION_BUDGET)
}

/// Maximum over deterministic strategies. All parties but the last are
/// enumerated; the last party responds optimally to each of its settings.
pub fn local_bound_with_budget(ineq: &BellInequality, budget: u64) -> Result<f64> {
    let sc = &ineq.scenario;
    let required = strategy_count(sc);
    if required > budget as u128 {
        return Err(Error::ResourceLimit { what: "local strategy enumeration", required, budget: budget as u128 });
    }
    let n = sc.parties();
    let last_d = sc.outcomes[n - 1];
    let last_m = sc.settings[n - 1];
    // radices of the enumerated response functions: d_i repeated m_i times
    let radices: Vec<usize> =
        (0..n - 1).flat_map(|i| std::iter::repeat_n(sc.outcomes[i], sc.settings[i])).collect();
    let offsets: Vec<usize> = (0..n - 1).scan(0, |acc, i| {
        let o = *acc;
        *acc += sc.settings[i];
        Some(o)
    }).collect();
    let count: usize = radices.iter().product();
    let settings: Vec<Vec<usize>> = (0..sc.setting_count()).map(|xf| digits(xf, &sc.settings)).collect();
    let mut best = f64::NEG_INFINITY;
    let mut a = vec![0usize; n];
    let mut per_last = vec![0.0; last_m * last_d];
    for code in 0..count {
        let f = digits(code, &radices);
        per_last.iter_mut().for_each(|v| *v = 0.0);
        for x in &settings {
            for i in 0..n - 1 {
                a[i] = f[offsets[i] + x[i]];
            }
            for al in 0..last_d {
                a[n - 1] = al;
                per_last[x[n - 1] * last_d + al] += ineq.coeff(&a, x);
            }
        }
        let value: f64 = per_last
            .chunks(last_d)
            .map(|c| c.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .sum();
        best = best.max(value);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_behavior(sc: &Scenario, rng: &mut impl Rng) -> Behavior {
        let na = sc.outcome_count();
        let mut p = Vec::with_capacity(sc.len());
        for _ in 0..sc.setting_count() {
            let raw: Vec<f64> = (0..na).map(|_| rng.random::<f64>()).collect();
            let s: f64 = raw.iter().sum();
            p.extend(raw.into_iter().map(|v| v / s));
        }
        Behavior::new(sc.clone(), p).unwrap()
    }

    fn random_inequality(sc: &Scenario, rng: &mut impl Rng) -> BellInequality {
        let coeffs = (0..sc.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        BellInequality::new("random", sc.clone(), coeffs).unwrap()
    }

    #[test]
    fn dft_of_constant_is_delta() {
        let sc = Scenario::new(vec![3, 2], vec![2, 1]).unwrap();
        let ineq = BellInequality::new("ones", sc.clone(), vec![1.0; sc.len()]).unwrap();
        let f = fourier_coefficients(&ineq);
        for (i, z) in f.coeffs.iter().enumerate() {
            let expected = if i % sc.outcome_count() == 0 { 1.0 } else { 0.0 };
            assert!((z - C64::new(expected, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn round_trip_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (outcomes, settings) in [(vec![2, 2], vec![2, 2]), (vec![3, 3], vec![2, 2]), (vec![2, 2, 2], vec![2, 2, 2])] {
            let sc = Scenario::new(outcomes, settings).unwrap();
            for _ in 0..100 {
                let ineq = random_inequality(&sc, &mut rng);
                let p = random_behavior(&sc, &mut rng);
                let direct = evaluate(&ineq, &p).unwrap();
                let via = fourier_coefficients(&ineq).pair(&correlators_from_behavior(&p)).unwrap();
                assert!((via.re - direct).abs() < 1e-9 && via.im.abs() < 1e-9);
            }
            let ineq = random_inequality(&sc, &mut rng);
            let back = fourier_coefficients(&ineq).to_inequality("back").unwrap();
            assert!(back.coeffs.iter().zip(&ineq.coeffs).all(|(a, b)| (a - b).abs() < 1e-12));
        }
    }

    #[test]
    fn hermitian_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sc = Scenario::new(vec![3, 5], vec![2, 2]).unwrap();
        let f = fourier_coefficients(&random_inequality(&sc, &mut rng));
        for xf in 0..sc.setting_count() {
            let x = digits(xf, &sc.settings);
            for kf in 0..sc.outcome_count() {
                let k = digits(kf, &sc.outcomes);
                let neg: Vec<usize> = k.iter().zip(&sc.outcomes).map(|(&ki, &d)| (d - ki) % d).collect();
                assert!((f.get(&k, &x) - f.get(&neg, &x).conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn correlator_examples() {
        let sc = Scenario::new(vec![3, 3], vec![1, 1]).unwrap();
        let c = correlators_from_behavior(&Behavior::uniform(sc.clone()));
        for (i, z) in c.coeffs.iter().enumerate() {
            assert!((z.norm() - if i == 0 { 1.0 } else { 0.0 }).abs() < 1e-12);
        }

        let mut p = vec![0.0; 9];
        for a in 0..3 {
            p[a * 3 + a] = 1.0 / 3.0;
        }
        let c = correlators_from_behavior(&Behavior::new(sc, p).unwrap());
        for k in 0..3 {
            for l in 0..3 {
                let expected = if (k + l) % 3 == 0 { 1.0 } else { 0.0 };
                assert!((c.get(&[k, l], &[0, 0]) - C64::new(expected, 0.0)).norm() < 1e-12);
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sc = Scenario::new(vec![2, 2], vec![2, 2]).unwrap();
        let b = random_behavior(&sc, &mut rng);
        let c = correlators_from_behavior(&b);
        let x = [1, 0];
        let mut e = 0.0;
        for a1 in 0..2 {
            for a2 in 0..2 {
                e += if (a1 + a2) % 2 == 0 { 1.0 } else { -1.0 } * b.p[sc.index(&[a1, a2], &x)];
            }
        }
        assert!((c.get(&[1, 1], &x).re - e).abs() < 1e-12);
    }

    #[test]
    fn evaluate_examples() {
        let sc = Scenario::new(vec![2, 2], vec![2, 2]).unwrap();
        let zero = BellInequality::new("zero", sc.clone(), vec![0.0; 16]).unwrap();
        assert_eq!(evaluate(&zero, &Behavior::uniform(sc.clone())).unwrap(), 0.0);

        let det = Behavior::deterministic(sc.clone(), &[vec![0, 0], vec![0, 0]]).unwrap();
        for alpha in [0.0, 0.5, 1.3] {
            let t = catalog_tilted_chsh(alpha).unwrap();
            assert!((evaluate(&t, &det).unwrap() - (alpha + 2.0)).abs() < 1e-12);
        }

        let other = Scenario::new(vec![3, 3], vec![2, 2]).unwrap();
        assert!(evaluate(&zero, &Behavior::uniform(other)).is_err());
    }

    #[test]
    fn behavior_validation() {
        let sc = Scenario::new(vec![2], vec![1]).unwrap();
        assert!(Behavior::new(sc.clone(), vec![0.5, 0.4]).is_err());
        assert!(Behavior::new(sc.clone(), vec![1.5, -0.5]).is_err());
        assert!(Behavior::new(sc, vec![0.25, 0.75]).is_ok());
        assert!(Scenario::new(vec![2, 1], vec![1, 1]).is_err());
        assert!(Scenario::new(vec![2, 2], vec![1]).is_err());
    }

    #[test]
    fn local_bound_examples() {
        assert!((local_bound(&catalog_chsh()).unwrap() - 2.0).abs() < 1e-12);
        for alpha in [0.0, 0.5, 1.0] {
            assert!((local_bound(&catalog_tilted_chsh(alpha).unwrap()).unwrap() - (2.0 + alpha)).abs() < 1e-12);
        }
        assert!((local_bound(&catalog_svetlichny_r2()).unwrap() - 6.0).abs() < 1e-12);
        for d in [2, 3, 5, 7] {
            let c = catalog_cglmp(PrimeModulus::new(d).unwrap());
            assert!((local_bound(&c).unwrap() - 2.0).abs() < 1e-9, "d={d}");
        }
        let big = Scenario::new(vec![7, 7, 7], vec![3, 3, 3]).unwrap();
        let ineq = BellInequality::new("big", big.clone(), vec![0.0; big.len()]).unwrap();
        assert!(matches!(local_bound(&ineq), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn local_bound_matches_full_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let sc = Scenario::new(vec![2, 3], vec![2, 3]).unwrap();
        for _ in 0..5 {
            let ineq = random_inequality(&sc, &mut rng);
            let mut best = f64::NEG_INFINITY;
            for code in 0..(4 * 27) {
                let f = digits(code, &[2, 2, 3, 3, 3]);
                let det = Behavior::deterministic(sc.clone(), &[f[..2].to_vec(), f[2..].to_vec()]).unwrap();
                best = best.max(evaluate(&ineq, &det).unwrap());
            }
            assert!((local_bound(&ineq).unwrap() - best).abs() < 1e-12);
        }
    }

    #[test]
    fn local_bound_relabeling_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let catalog = vec![
            catalog_chsh(),
            catalog_tilted_chsh(0.7).unwrap(),
            catalog_cglmp(PrimeModulus::new(3).unwrap()),
            catalog_svetlichny_r2(),
        ];
        for ineq in catalog {
            let base = local_bound(&ineq).unwrap();
            for _ in 0..10 {
                let sc = &ineq.scenario;
                let party = rng.random_range(0..sc.parties());
                let mut relabeled = if rng.random_bool(0.5) {
                    let mut perm: Vec<usize> = (0..sc.outcomes[party]).collect();
                    let (shift, last) = (rng.random_range(0..perm.len()), perm.len() - 1);
                    perm.rotate_left(shift);
                    perm.swap(0, last);
                    ineq.relabel_outcomes(party, rng.random_range(0..sc.settings[party]), &perm).unwrap()
                } else {
                    let mut perm: Vec<usize> = (0..sc.settings[party]).collect();
                    perm.reverse();
                    ineq.relabel_settings(party, &perm).unwrap()
                };
                relabeled.name.clear();
                assert!((local_bound(&relabeled).unwrap() - base).abs() < 1e-9, "{}", ineq.name);
            }
        }
    }
}
