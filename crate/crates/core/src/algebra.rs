//! Prime-field arithmetic and dense complex kernels for generalized Pauli
//! (displacement) operators.
//!
//! Conventions used throughout the crate:
//!
//! * `X|j⟩ = |j+1⟩`, `Z|j⟩ = ω^j|j⟩` with `ω = e^{2πi/d}`; these satisfy
//!   `ZX = ω XZ`.
//! * `D(a1, a2) = ω^{a1·a2/2} X^{a1} Z^{a2}`, the half taken as the field
//!   inverse of 2 for odd `d` and through `ω₂ = i` for qubits. With this
//!   choice the group law reads `D(a) D(b) = ω^{-S(a,b)/2} D(a+b)` where
//!   `S(a,b) = a1·b2 − a2·b1`.
//! * Multi-site vectors are stored with site 0 as the most significant digit.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

pub type C64 = Complex64;

/// Dense complex matrix; carrier for Paulis, measurement bases, density matrices.
pub type ComplexMatrix = DMatrix<C64>;

/// Entrywise tolerance used by all matrix predicates.
pub const MATRIX_TOL: f64 = 1e-10;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// A prime local dimension `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeModulus(u32);

impl PrimeModulus {
    pub fn new(d: u32) -> Result<Self> {
        if is_prime(d) {
            Ok(PrimeModulus(d))
        } else {
            Err(Error::invalid(format!("{d} is not a prime")))
        }
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn size(self) -> usize {
        self.0 as usize
    }

    /// `ω = e^{2πi/d}`.
    pub fn omega(self) -> C64 {
        self.root(1)
    }

    /// `ω^k`, with `k` reduced mod `d` before evaluating the exponential.
    pub fn root(self, k: i64) -> C64 {
        root_of_unity(self.0 as u64, k)
    }

    pub fn element(self, value: i64) -> FieldElement {
        FieldElement::new(value, self)
    }

    pub fn elements(self) -> impl Iterator<Item = FieldElement> {
        (0..self.0).map(move |v| FieldElement { value: v, modulus: self })
    }

    /// Nonzero field elements.
    pub fn units(self) -> impl Iterator<Item = FieldElement> {
        (1..self.0).map(move |v| FieldElement { value: v, modulus: self })
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Deterministic trial division; local dimensions are tiny.
pub fn is_prime(d: u32) -> bool {
    if d < 2 {
        return false;
    }
    let mut p = 2u32;
    while (p as u64) * (p as u64) <= d as u64 {
        if d % p == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// `e^{2πik/n}` with `k` reduced mod `n`.
pub fn root_of_unity(n: u64, k: i64) -> C64 {
    let r = k.rem_euclid(n as i64);
    if r == 0 {
        return ONE;
    }
    C64::from_polar(1.0, 2.0 * PI * r as f64 / n as f64)
}

/// An element of `F_d`, always stored reduced into `[0, d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    modulus: PrimeModulus,
}

impl FieldElement {
    pub fn new(value: i64, modulus: PrimeModulus) -> Self {
        FieldElement {
            value: value.rem_euclid(modulus.0 as i64) as u32,
            modulus,
        }
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> PrimeModulus {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, mut e: u64) -> Self {
        let d = self.modulus.0 as u64;
        let mut base = self.value as u64;
        let mut acc = 1u64 % d;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % d;
            }
            base = base * base % d;
            e >>= 1;
        }
        FieldElement { value: acc as u32, modulus: self.modulus }
    }

    pub fn inverse(self) -> Result<Self> {
        field_inverse(self)
    }

    fn check(self, other: Self) {
        assert_eq!(self.modulus, other.modulus, "mixed field moduli");
    }
}

/// Multiplicative inverse in `F_d`.
pub fn field_inverse(x: FieldElement) -> Result<FieldElement> {
    if x.is_zero() {
        return Err(Error::invalid("zero has no inverse"));
    }
    Ok(x.pow(x.modulus.0 as u64 - 2))
}

impl Add for FieldElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.check(rhs);
        FieldElement::new(self.value as i64 + rhs.value as i64, self.modulus)
    }
}

impl Sub for FieldElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.check(rhs);
        FieldElement::new(self.value as i64 - rhs.value as i64, self.modulus)
    }
}

impl Mul for FieldElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.check(rhs);
        FieldElement::new(self.value as i64 * rhs.value as i64, self.modulus)
    }
}

impl Neg for FieldElement {
    type Output = Self;
    fn neg(self) -> Self {
        FieldElement::new(-(self.value as i64), self.modulus)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Generalized X: `|j⟩ ↦ |j+1 mod d⟩`.
pub fn shift_matrix(d: PrimeModulus) -> ComplexMatrix {
    let n = d.size();
    ComplexMatrix::from_fn(n, n, |r, c| if r == (c + 1) % n { ONE } else { ZERO })
}

/// Generalized Z: `diag(ω^0, …, ω^{d-1})`.
pub fn clock_matrix(d: PrimeModulus) -> ComplexMatrix {
    let n = d.size();
    ComplexMatrix::from_fn(n, n, |r, c| if r == c { d.root(r as i64) } else { ZERO })
}

/// `D(a1, a2) = ω^{a1·a2/2} X^{a1} Z^{a2}`.
pub fn displacement(d: PrimeModulus, a1: FieldElement, a2: FieldElement) -> ComplexMatrix {
    assert_eq!(a1.modulus(), d);
    assert_eq!(a2.modulus(), d);
    lifted_displacement(d, a1.value() as i64, a2.value() as i64)
}

/// Displacement with integer labels.
///
/// For odd `d` this depends only on the labels mod `d`. For `d = 2` the
/// phase `i^{a1·a2}` depends on the labels mod 4, which is why the qubit
/// group law only closes on unreduced labels.
pub fn lifted_displacement(d: PrimeModulus, a1: i64, a2: i64) -> ComplexMatrix {
    let phase = if d.get() == 2 {
        root_of_unity(4, a1 * a2)
    } else {
        let half = field_inverse(d.element(2)).expect("2 is a unit for odd d");
        d.root((d.element(a1) * d.element(a2) * half).value() as i64)
    };
    let n = d.size();
    // X^{a1} Z^{a2} |j⟩ = ω^{a2 j} |j + a1⟩
    let shift = a1.rem_euclid(n as i64) as usize;
    ComplexMatrix::from_fn(n, n, |r, c| {
        if r == (c + shift) % n {
            phase * d.root(a2 * c as i64)
        } else {
            ZERO
        }
    })
}

/// Kronecker product in list order (first factor most significant).
pub fn kron(ms: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let (first, rest) = ms
        .split_first()
        .ok_or_else(|| Error::invalid("kron of an empty list"))?;
    if ms.iter().any(|m| m.nrows() == 0 || m.ncols() == 0) {
        return Err(Error::invalid("kron factor with a zero dimension"));
    }
    Ok(rest.iter().fold(first.clone(), |acc, m| acc.kronecker(m)))
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn matrix_power(m: &ComplexMatrix, k: u32) -> ComplexMatrix {
    assert!(m.is_square());
    let mut acc = identity(m.nrows());
    for _ in 0..k {
        acc = &acc * m;
    }
    acc
}

/// Largest entrywise modulus of `a - b`; infinite on shape mismatch.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn is_unitary(m: &ComplexMatrix, tol: f64) -> bool {
    m.is_square() && max_abs_diff(&(m.adjoint() * m), &identity(m.nrows())) <= tol
}

pub fn is_hermitian(m: &ComplexMatrix, tol: f64) -> bool {
    m.is_square() && max_abs_diff(m, &m.adjoint()) <= tol
}

/// Hilbert–Schmidt inner product `tr(A† B)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Row-major strides of a mixed-radix register, site 0 most significant.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Digits of a flat index in the mixed radix `dims`.
pub fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for i in (0..dims.len()).rev() {
        out[i] = index % dims[i];
        index /= dims[i];
    }
    out
}

/// Applies a single-site operator to a multi-site state vector.
pub fn apply_local(state: &[C64], dims: &[usize], site: usize, op: &ComplexMatrix) -> Vec<C64> {
    let d = dims[site];
    debug_assert_eq!(op.shape(), (d, d));
    debug_assert_eq!(state.len(), dims.iter().product::<usize>());
    let stride = strides(dims)[site];
    let block = stride * d;
    let mut out = vec![ZERO; state.len()];
    for base in (0..state.len()).step_by(block) {
        for inner in 0..stride {
            let off = base + inner;
            for r in 0..d {
                let mut acc = ZERO;
                for c in 0..d {
                    acc += op[(r, c)] * state[off + c * stride];
                }
                out[off + r * stride] = acc;
            }
        }
    }
    out
}

/// `⟨u|v⟩`.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}
