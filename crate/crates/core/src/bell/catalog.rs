use crate::algebra::{PrimeModulus, C64};

use super::{BellInequality, CorrelatorForm, Scenario};
use crate::{Error, Result};

/// Largest accepted tilting parameter; at α = 2 the quantum, stabilizer and
/// local values all equal 4.
pub const TILTED_CHSH_ALPHA_MAX: f64 = 2.0;

fn sign(bit: usize) -> f64 {
    if bit % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `α⟨A_1^0⟩ + Σ_{x1,x2} (-1)^{x1 x2} ⟨A_1^{x1} A_2^{x2}⟩`.
///
/// The marginal `⟨A_1^0⟩` is spread evenly over Bob's two settings.
pub fn catalog_tilted_chsh(alpha: f64) -> Result<BellInequality> {
    if !(0.0..=TILTED_CHSH_ALPHA_MAX).contains(&alpha) {
        return Err(Error::invalid(format!("tilting parameter {alpha} outside [0, 2]")));
    }
    let sc = Scenario::new(vec![2, 2], vec![2, 2])?;
    let mut coeffs = vec![0.0; sc.len()];
    for x1 in 0..2 {
        for x2 in 0..2 {
            for a1 in 0..2 {
                for a2 in 0..2 {
                    let mut c = sign(x1 * x2) * sign(a1 + a2);
                    if x1 == 0 {
                        c += 0.5 * alpha * sign(a1);
                    }
                    coeffs[sc.index(&[a1, a2], &[x1, x2])] = c;
                }
            }
        }
    }
    let name = if alpha == 0.0 { "chsh".to_string() } else { format!("tilted-chsh(alpha={alpha})") };
    let mut ineq = BellInequality::new(name, sc, coeffs)?;
    ineq.known_local = Some(2.0 + alpha);
    Ok(ineq)
}

pub fn catalog_chsh() -> BellInequality {
    catalog_tilted_chsh(0.0).expect("alpha = 0 is valid")
}

/// CGLMP with two settings per party and `d` outcomes, local bound 2.
///
/// Built in the correlator picture,
/// `Σ_x Σ_{l=1}^{d-1} ⟨(A_1^x)^l \bar{(A_2^x)^l}⟩` with
/// `\bar{(A_2^x)^l} = c_l (A_2^x)^{d-l} + c_l^* ω^{x' l} (A_2^{x'})^{d-l}`,
/// `x' = x+1 mod 2` and `c_l = Σ_k α_k (ω^{-kl} - ω^{(k+1)l})`, then mapped to
/// probability form. The weights `α_k = 1 - 2k/(d-1)` reproduce the standard
/// normalization (maximally entangled value 2.8729 and optimum 2.9149 at d = 3).
pub fn catalog_cglmp(d: PrimeModulus) -> BellInequality {
    let n = d.size();
    let sc = Scenario::new(vec![n, n], vec![2, 2]).expect("valid scenario");
    let alpha: Vec<f64> = (0..n / 2).map(|k| 1.0 - 2.0 * k as f64 / (n as f64 - 1.0)).collect();
    let c: Vec<C64> = (0..n)
        .map(|l| {
            alpha
                .iter()
                .enumerate()
                .map(|(k, &a)| (d.root(-((k * l) as i64)) - d.root(((k + 1) * l) as i64)) * a)
                .sum()
        })
        .collect();
    let mut coeffs = vec![C64::new(0.0, 0.0); sc.len()];
    let scale = 1.0 / n as f64;
    for x in 0..2 {
        let xp = (x + 1) % 2;
        for l in 1..n {
            let k = [l, (n - l) % n];
            coeffs[sc.index(&k, &[x, x])] += c[l] * scale;
            coeffs[sc.index(&k, &[x, xp])] += c[l].conj() * d.root((xp * l) as i64) * scale;
        }
    }
    let form = CorrelatorForm { scenario: sc, coeffs };
    let mut ineq = form.to_inequality(format!("cglmp(d={n})")).expect("CGLMP coefficients are real");
    ineq.known_local = Some(2.0);
    ineq
}

/// `S_3 + R_2 ≤ 6` on three qubits with two settings each.
///
/// `S_3` is the Svetlichny polynomial: `+⟨A^iA^jA^k⟩` when `i+j+k ∈ {0, 1}`
/// and `-` when it is 2 or 3. `R_2 = Σ_i ⟨A_1^i A_2^{i⊕1} + A_1^i A_3^{i⊕1} + A_2^i A_3^{i⊕1}⟩`;
/// each two-body term is spread over the spectator's settings.
pub fn catalog_svetlichny_r2() -> BellInequality {
    let sc = Scenario::new(vec![2, 2, 2], vec![2, 2, 2]).expect("valid scenario");
    let mut coeffs = vec![0.0; sc.len()];
    let outcomes: Vec<[usize; 3]> =
        (0..8).map(|i| [i >> 2 & 1, i >> 1 & 1, i & 1]).collect();
    for xf in 0..8 {
        let x = [xf >> 2 & 1, xf >> 1 & 1, xf & 1];
        let w = if x.iter().sum::<usize>() <= 1 { 1.0 } else { -1.0 };
        for a in &outcomes {
            coeffs[sc.index(a, &x)] += w * sign(a.iter().sum());
        }
    }
    for (p, q) in [(0, 1), (0, 2), (1, 2)] {
        let r = 3 - p - q;
        for i in 0..2 {
            for xr in 0..2 {
                let mut x = [0; 3];
                x[p] = i;
                x[q] = i ^ 1;
                x[r] = xr;
                for a in &outcomes {
                    coeffs[sc.index(a, &x)] += 0.5 * sign(a[p] + a[q]);
                }
            }
        }
    }
    let mut ineq = BellInequality::new("svetlichny-r2", sc, coeffs).expect("valid table");
    ineq.known_local = Some(6.0);
    ineq
}
