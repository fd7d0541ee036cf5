//! Statevector engine and the Ry variational form.
//!
//! Qubit `q` of an `n`-qubit register is the `q`-th tensor factor from the
//! left, i.e. bit `n - 1 - q` of the basis-state index. This matches the
//! ordering used by [`crate::basis::place`] and by Pauli labels.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{OperatorMatrix, ZERO};

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amplitudes }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, len: dim });
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amplitudes })
    }

    /// Wraps raw amplitudes; the length must be a power of two. The vector is
    /// not renormalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        Ok(Self { n_qubits: dim.trailing_zeros() as usize, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// `‖self − other‖₂`.
    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    fn mask(&self, qubit: usize) -> Result<usize> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange { qubit, n_qubits: self.n_qubits });
        }
        Ok(1 << (self.n_qubits - 1 - qubit))
    }

    /// In-place `Ry(θ) = [[cos θ/2, −sin θ/2], [sin θ/2, cos θ/2]]` on `qubit`.
    pub fn ry_in_place(&mut self, qubit: usize, theta: f64) -> Result<()> {
        let mask = self.mask(qubit)?;
        let (s, c) = (theta / 2.0).sin_cos();
        for i in 0..self.amplitudes.len() {
            if i & mask == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | mask];
                self.amplitudes[i] = a0 * c - a1 * s;
                self.amplitudes[i | mask] = a0 * s + a1 * c;
            }
        }
        Ok(())
    }

    /// In-place controlled-Z between two distinct qubits.
    pub fn cz_in_place(&mut self, control: usize, target: usize) -> Result<()> {
        let both = self.mask(control)? | self.mask(target)?;
        if control == target {
            return Err(Error::InvalidConfig(format!("CZ needs distinct qubits, got {control} twice")));
        }
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if i & both == both {
                *a = -*a;
            }
        }
        Ok(())
    }
}

pub fn apply_ry(state: &StateVector, qubit: usize, theta: f64) -> Result<StateVector> {
    let mut out = state.clone();
    out.ry_in_place(qubit, theta)?;
    Ok(out)
}

pub fn apply_cz(state: &StateVector, control: usize, target: usize) -> Result<StateVector> {
    let mut out = state.clone();
    out.cz_in_place(control, target)?;
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Entanglement {
    /// CZ on every pair `i < j`.
    #[default]
    Full,
}

/// Ry variational form: a rotation layer followed by `depth` blocks of
/// [entangler, rotation layer].
#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzConfig {
    pub n_qubits: usize,
    pub depth: usize,
    pub entanglement: Entanglement,
    pub params: Vec<f64>,
}

impl AnsatzConfig {
    pub fn new(n_qubits: usize, depth: usize, params: Vec<f64>) -> Result<Self> {
        let cfg = Self { n_qubits, depth, entanglement: Entanglement::Full, params };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn zeros(n_qubits: usize, depth: usize) -> Self {
        Self { n_qubits, depth, entanglement: Entanglement::Full, params: vec![0.0; parameter_count(n_qubits, depth)] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 || self.n_qubits > 20 {
            return Err(Error::InvalidConfig(format!("unsupported qubit count {}", self.n_qubits)));
        }
        let expected = parameter_count(self.n_qubits, self.depth);
        if self.params.len() != expected {
            return Err(Error::InvalidConfig(format!(
                "ansatz with {} qubits and depth {} needs {expected} parameters, got {}",
                self.n_qubits,
                self.depth,
                self.params.len()
            )));
        }
        Ok(())
    }

    pub fn with_params(&self, params: Vec<f64>) -> Self {
        Self { params, ..self.clone() }
    }
}

/// `n_qubits · (depth + 1)`.
pub fn parameter_count(n_qubits: usize, depth: usize) -> usize {
    n_qubits * (depth + 1)
}

pub fn ansatz_state(cfg: &AnsatzConfig) -> Result<StateVector> {
    cfg.validate()?;
    let n = cfg.n_qubits;
    let mut state = StateVector::zero(n);
    let mut params = cfg.params.iter().copied();
    for layer in 0..=cfg.depth {
        if layer > 0 {
            match cfg.entanglement {
                Entanglement::Full => {
                    for i in 0..n {
                        for j in i + 1..n {
                            state.cz_in_place(i, j)?;
                        }
                    }
                }
            }
        }
        for q in 0..n {
            state.ry_in_place(q, params.next().expect("parameter count validated"))?;
        }
    }
    Ok(state)
}

/// Largest imaginary residue tolerated in `⟨ψ|H|ψ⟩`.
pub const EXPECTATION_IMAG_TOL: f64 = 1e-10;

/// `⟨ψ|H|ψ⟩` for Hermitian `H`.
pub fn expectation(state: &StateVector, h: &OperatorMatrix) -> Result<f64> {
    if h.dim() != state.dim() {
        return Err(Error::DimensionMismatch { expected: state.dim(), found: h.dim() });
    }
    let h_psi = h.apply(state.amplitudes());
    let value: Complex64 = state.amplitudes().iter().zip(&h_psi).map(|(a, b)| a.conj() * b).sum();
    let scale = 1.0 + value.re.abs();
    if value.im.abs() > EXPECTATION_IMAG_TOL * scale {
        return Err(Error::NotHermitian { deviation: value.im.abs(), tolerance: EXPECTATION_IMAG_TOL });
    }
    Ok(value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn close(a: &StateVector, b: &[Complex64]) -> bool {
        a.amplitudes().iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-14)
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn ry_examples() {
        let zero = StateVector::zero(1);
        assert_eq!(apply_ry(&zero, 0, 0.0).unwrap(), zero);
        assert!(close(&apply_ry(&zero, 0, PI).unwrap(), &[c(0.0), c(1.0)]));
        assert!(close(&apply_ry(&zero, 0, PI / 2.0).unwrap(), &[c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]));
        assert!(matches!(apply_ry(&zero, 1, 0.3), Err(Error::QubitOutOfRange { .. })));
    }

    #[test]
    fn ry_acts_on_leftmost_factor_for_qubit_zero() {
        let s = apply_ry(&StateVector::zero(2), 0, PI).unwrap();
        // |10⟩ = index 2
        assert!((s.amplitudes()[2] - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn cz_examples() {
        let s00 = StateVector::zero(2);
        assert_eq!(apply_cz(&s00, 0, 1).unwrap(), s00);
        let s11 = StateVector::basis(2, 3).unwrap();
        assert!(close(&apply_cz(&s11, 0, 1).unwrap(), &[c(0.0), c(0.0), c(0.0), c(-1.0)]));
        let mixed = apply_ry(&apply_ry(&s00, 0, 0.7).unwrap(), 1, -1.1).unwrap();
        let twice = apply_cz(&apply_cz(&mixed, 1, 0).unwrap(), 0, 1).unwrap();
        assert_eq!(twice, mixed);
        assert!(apply_cz(&s00, 0, 0).is_err());
        assert!(matches!(apply_cz(&s00, 0, 2), Err(Error::QubitOutOfRange { .. })));
    }

    #[test]
    fn ansatz_examples() {
        let zero = ansatz_state(&AnsatzConfig::zeros(4, 3)).unwrap();
        assert_eq!(zero, StateVector::zero(4));
        let one = ansatz_state(&AnsatzConfig::new(1, 0, vec![PI]).unwrap()).unwrap();
        assert!(close(&one, &[c(0.0), c(1.0)]));
        assert_eq!(parameter_count(8, 3), 32);
        assert!(AnsatzConfig::new(2, 1, vec![0.0; 3]).is_err());
    }

    #[test]
    fn expectation_examples() {
        let z = OperatorMatrix::pauli_z();
        assert_eq!(expectation(&StateVector::zero(1), &z).unwrap(), 1.0);
        let s = apply_ry(&StateVector::zero(1), 0, 0.9).unwrap();
        assert!((expectation(&s, &OperatorMatrix::identity(2)).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(expectation(&s, &OperatorMatrix::identity(4)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn ground_eigenvector_expectation_matches_eigenvalue() {
        use crate::hamiltonian::{build, HamiltonianSpec};
        use crate::operator::hermitian_eig;
        let built = build(&HamiltonianSpec::landau_cartesian(2.0)).unwrap();
        let eig = hermitian_eig(&built.matrix).unwrap();
        let state = StateVector::from_amplitudes(eig.vector(0)).unwrap();
        assert!((expectation(&state, &built.matrix).unwrap() - 1.0).abs() < 1e-9);
    }

    mod props {
        use super::*;
        use crate::operator::hermitian_eigenvalues;
        use proptest::prelude::*;

        fn params(n: usize) -> impl Strategy<Value = Vec<f64>> {
            proptest::collection::vec(-PI..PI, n)
        }

        fn random_hermitian(entries: &[(f64, f64)], n: usize) -> OperatorMatrix {
            let a = OperatorMatrix::from_fn(n, |i, j| {
                let (re, im) = entries[i * n + j];
                Complex64::new(re, im)
            });
            a.hermitian_part()
        }

        proptest! {
            #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

            #[test]
            fn ansatz_is_normalized(p in params(parameter_count(8, 3))) {
                let s = ansatz_state(&AnsatzConfig::new(8, 3, p).unwrap()).unwrap();
                prop_assert!((s.norm() - 1.0).abs() < 1e-12);
            }

            #[test]
            fn gates_preserve_norm(p in params(parameter_count(3, 2)), theta in -10.0f64..10.0, q in 0usize..3) {
                let s = ansatz_state(&AnsatzConfig::new(3, 2, p).unwrap()).unwrap();
                let r = apply_ry(&s, q, theta).unwrap();
                prop_assert!((r.norm() - 1.0).abs() < 1e-12);
                let z = apply_cz(&r, q, (q + 1) % 3).unwrap();
                prop_assert!((z.norm() - 1.0).abs() < 1e-12);
            }

            #[test]
            fn ansatz_is_deterministic(p in params(parameter_count(4, 3))) {
                let cfg = AnsatzConfig::new(4, 3, p).unwrap();
                prop_assert_eq!(ansatz_state(&cfg).unwrap(), ansatz_state(&cfg).unwrap());
            }

            #[test]
            fn variational_bound(
                p in params(parameter_count(3, 3)),
                entries in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64),
            ) {
                let h = random_hermitian(&entries, 8);
                let lmin = hermitian_eigenvalues(&h).unwrap()[0];
                let s = ansatz_state(&AnsatzConfig::new(3, 3, p).unwrap()).unwrap();
                prop_assert!(expectation(&s, &h).unwrap() >= lmin - 1e-9);
            }
        }
    }
}
