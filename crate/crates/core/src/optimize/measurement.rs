use rand::Rng;
use rand_distr::StandardNormal;

use crate::algebra::{is_unitary, ComplexMatrix, C64, ONE, ZERO};
use crate::{Error, Result};

/// Projective measurements for every party and setting.
///
/// `bases[i][x]` is a unitary whose column `a` spans the range of the
/// projector `M^{(i)}_{a|x}`. The associated order-`d` observable is
/// `U = V diag(ω^0, …, ω^{d-1}) V†`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSet {
    pub bases: Vec<Vec<ComplexMatrix>>,
}

impl MeasurementSet {
    pub fn new(bases: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        let m = MeasurementSet { bases };
        m.validate(crate::algebra::MATRIX_TOL)?;
        Ok(m)
    }

    /// Every party measures in the computational basis for every setting.
    pub fn computational(dims: &[usize], settings: &[usize]) -> Self {
        let bases = dims
            .iter()
            .zip(settings)
            .map(|(&d, &m)| vec![ComplexMatrix::identity(d, d); m])
            .collect();
        MeasurementSet { bases }
    }

    pub fn haar_random(dims: &[usize], settings: &[usize], rng: &mut impl Rng) -> Self {
        let bases = dims
            .iter()
            .zip(settings)
            .map(|(&d, &m)| (0..m).map(|_| haar_unitary(d, rng)).collect())
            .collect();
        MeasurementSet { bases }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.bases.iter().map(|b| b[0].nrows()).collect()
    }

    pub fn settings(&self) -> Vec<usize> {
        self.bases.iter().map(|b| b.len()).collect()
    }

    /// Checks that every basis is a square unitary of a consistent size.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.bases.is_empty() {
            return Err(Error::invalid("measurement set has no parties"));
        }
        for (i, party) in self.bases.iter().enumerate() {
            let Some(first) = party.first() else {
                return Err(Error::invalid(format!("party {i} has no settings")));
            };
            for (x, v) in party.iter().enumerate() {
                if v.nrows() != first.nrows() || !v.is_square() || !is_unitary(v, tol) {
                    return Err(Error::invalid(format!(
                        "basis of party {i}, setting {x} does not define a projective measurement"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `M^{(i)}_{a|x} = v_a v_a†`.
    pub fn projector(&self, party: usize, setting: usize, a: usize) -> ComplexMatrix {
        let v = self.bases[party][setting].column(a);
        &v * v.adjoint()
    }

    /// `U_i^x = Σ_a ω^a M_{a|x}`.
    pub fn unitary(&self, party: usize, setting: usize) -> ComplexMatrix {
        let v = &self.bases[party][setting];
        let d = v.nrows();
        let diag = ComplexMatrix::from_fn(d, d, |r, c| {
            if r == c {
                crate::algebra::root_of_unity(d as u64, r as i64)
            } else {
                ZERO
            }
        });
        v * diag * v.adjoint()
    }

    /// Qubit measurements from unit Bloch vectors: `M_{a|x} = (1 + (-1)^a u·σ)/2`.
    pub fn from_bloch(vectors: &[Vec<[f64; 3]>]) -> Result<Self> {
        let bases = vectors
            .iter()
            .map(|party| party.iter().map(|u| bloch_basis(*u)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(MeasurementSet { bases })
    }

    /// Bloch vectors of the outcome-0 projectors. Fails unless every party is a qubit.
    pub fn to_bloch(&self) -> Result<Vec<Vec<[f64; 3]>>> {
        self.bases
            .iter()
            .map(|party| {
                party
                    .iter()
                    .map(|v| {
                        if v.nrows() != 2 {
                            return Err(Error::invalid("Bloch form exists for qubits only"));
                        }
                        Ok(basis_bloch(v))
                    })
                    .collect()
            })
            .collect()
    }
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let z = ComplexMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    });
    let qr = z.qr();
    let (mut q, r) = qr.unpack();
    for c in 0..d {
        let rc = r[(c, c)];
        let phase = if rc.norm() > 0.0 { rc / rc.norm() } else { ONE };
        for row in 0..d {
            q[(row, c)] *= phase;
        }
    }
    q
}

pub fn bloch_basis(u: [f64; 3]) -> Result<ComplexMatrix> {
    let len = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    if (len - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!("Bloch vector has length {len}, expected 1")));
    }
    let theta = u[2].clamp(-1.0, 1.0).acos();
    let phi = u[1].atan2(u[0]);
    let (s, c) = (theta / 2.0).sin_cos();
    let e = C64::from_polar(1.0, phi);
    Ok(ComplexMatrix::from_row_slice(2, 2, &[C64::new(c, 0.0), -e.conj() * s, e * s, C64::new(c, 0.0)]))
}

pub fn basis_bloch(v: &ComplexMatrix) -> [f64; 3] {
    let (a, b) = (v[(0, 0)], v[(1, 0)]);
    let ab = a.conj() * b;
    [2.0 * ab.re, 2.0 * ab.im, a.norm_sqr() - b.norm_sqr()]
}
