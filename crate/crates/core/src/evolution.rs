//! Pauli decomposition, Trotterized and exact evolution, transition
//! amplitudes, and the single-vertex scattering sandwich.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::basis::{grid_point, grid_points, qubits_for, sylvester_f};
use crate::circuits::StateVector;
use crate::error::{Error, Result};
use crate::hamiltonian::{Basis, BuiltHamiltonian, HamiltonianKind};
use crate::operator::{OperatorMatrix, Propagator, HERMITIAN_TOL, ONE};

/// Terms with `|c| < PRUNE_RELATIVE · max|c|` are dropped.
pub const PRUNE_RELATIVE: f64 = 1e-12;

/// `i^k`.
fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => ONE,
        1 => Complex64::new(0.0, 1.0),
        2 => -ONE,
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Sign `(−1)^{popcount(a & b)}`.
fn parity_sign(a: usize, b: usize) -> f64 {
    if (a & b).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// One Pauli string `c · P`, stored with its bit masks. Bit `n − 1 − q`
/// of `x_mask`/`z_mask` describes qubit `q` (leftmost label character).
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub label: String,
    pub coeff: f64,
    x_mask: usize,
    z_mask: usize,
}

impl PauliTerm {
    pub fn new(label: &str, coeff: f64) -> Result<Self> {
        let n = label.len();
        let (mut x_mask, mut z_mask) = (0, 0);
        for (q, ch) in label.chars().enumerate() {
            let bit = 1usize << (n - 1 - q);
            match ch {
                'I' => {}
                'X' => x_mask |= bit,
                'Z' => z_mask |= bit,
                'Y' => {
                    x_mask |= bit;
                    z_mask |= bit;
                }
                other => return Err(Error::InvalidConfig(format!("bad Pauli character {other:?} in {label:?}"))),
            }
        }
        Ok(Self { label: label.to_string(), coeff, x_mask, z_mask })
    }

    fn from_masks(n: usize, x_mask: usize, z_mask: usize, coeff: f64) -> Self {
        let label = (0..n)
            .map(|q| {
                let bit = 1usize << (n - 1 - q);
                match (x_mask & bit != 0, z_mask & bit != 0) {
                    (false, false) => 'I',
                    (true, false) => 'X',
                    (false, true) => 'Z',
                    (true, true) => 'Y',
                }
            })
            .collect();
        Self { label, coeff, x_mask, z_mask }
    }

    /// `i^{#Y}`: the phase relating `P` to `X^x Z^z`.
    fn phase(&self) -> Complex64 {
        i_pow((self.x_mask & self.z_mask).count_ones())
    }

    /// `ψ ← exp(−iθP) ψ = cos θ ψ − i sin θ P ψ`.
    fn exp_apply(&self, theta: f64, psi: &mut [Complex64]) {
        let (s, c) = theta.sin_cos();
        let minus_i_sin = Complex64::new(0.0, -s);
        let phase = self.phase();
        let (x, z) = (self.x_mask, self.z_mask);
        if x == 0 {
            // Diagonal: P|k⟩ = ±|k⟩.
            let plus = Complex64::new(c, -s);
            let minus = Complex64::new(c, s);
            for (k, a) in psi.iter_mut().enumerate() {
                *a *= if parity_sign(z, k) > 0.0 { plus } else { minus };
            }
            return;
        }
        let top = 1usize << (usize::BITS - 1 - x.leading_zeros());
        for k in 0..psi.len() {
            if k & top != 0 {
                continue;
            }
            let l = k ^ x;
            // P|k⟩ = phase·(−1)^{z·k}|l⟩ and P|l⟩ = phase·(−1)^{z·l}|k⟩.
            let (a, b) = (psi[k], psi[l]);
            let pk = phase * parity_sign(z, k);
            let pl = phase * parity_sign(z, l);
            psi[l] = b * c + minus_i_sin * pk * a;
            psi[k] = a * c + minus_i_sin * pl * b;
        }
    }
}

/// Real-coefficient Pauli expansion of a Hermitian matrix, sorted by label.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTermList {
    pub n_qubits: usize,
    pub terms: Vec<PauliTerm>,
}

impl PauliTermList {
    pub fn new(n_qubits: usize, mut terms: Vec<PauliTerm>) -> Result<Self> {
        for t in &terms {
            if t.label.len() != n_qubits {
                return Err(Error::DimensionMismatch { expected: n_qubits, found: t.label.len() });
            }
        }
        terms.sort_by(|a, b| a.label.cmp(&b.label));
        if terms.windows(2).any(|w| w[0].label == w[1].label) {
            return Err(Error::InvalidConfig("duplicate Pauli label".into()));
        }
        Ok(Self { n_qubits, terms })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `label`, zero when absent.
    pub fn coeff(&self, label: &str) -> f64 {
        self.terms.binary_search_by(|t| t.label.as_str().cmp(label)).map_or(0.0, |i| self.terms[i].coeff)
    }

    /// `Σ c_s P_s` as a dense matrix.
    pub fn reconstruct(&self) -> OperatorMatrix {
        let dim = 1usize << self.n_qubits;
        let mut out = OperatorMatrix::zeros(dim);
        for t in &self.terms {
            let ph = t.phase() * t.coeff;
            for k in 0..dim {
                let l = k ^ t.x_mask;
                let v = out.get(l, k) + ph * parity_sign(t.z_mask, k);
                out.set(l, k, v);
            }
        }
        out
    }
}

/// In-place Walsh–Hadamard transform: `v_z ← Σ_k (−1)^{z·k} v_k`.
fn walsh_hadamard(v: &mut [Complex64]) {
    let mut h = 1;
    while h < v.len() {
        for block in (0..v.len()).step_by(2 * h) {
            for k in block..block + h {
                let (a, b) = (v[k], v[k + h]);
                v[k] = a + b;
                v[k + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// `c_s = Tr(P_s H) / 2^n` for every Pauli string, in `O(n·4^n)`.
///
/// For a fixed X-pattern `x`, `Tr(P_{x,z} H) = i^{|x∧z|} Σ_k (−1)^{z·k} H[k, k⊕x]`,
/// so one Walsh–Hadamard transform yields every `z` at once.
pub fn pauli_decompose(h: &OperatorMatrix) -> Result<PauliTermList> {
    let dim = h.dim();
    let n = qubits_for(dim)?;
    let deviation = h.hermiticity_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation, tolerance: HERMITIAN_TOL });
    }
    let m = h.as_dmatrix();
    let norm = 1.0 / dim as f64;
    let blocks: Vec<Vec<(usize, usize, f64)>> = (0..dim)
        .into_par_iter()
        .map(|x| {
            let mut v: Vec<Complex64> = (0..dim).map(|k| m[(k, k ^ x)]).collect();
            walsh_hadamard(&mut v);
            v.iter()
                .enumerate()
                .map(|(z, s)| (x, z, (i_pow((x & z).count_ones()) * s * norm).re))
                .filter(|&(_, _, c)| c != 0.0)
                .collect()
        })
        .collect();
    let max = blocks.iter().flatten().fold(0.0f64, |acc, t| acc.max(t.2.abs()));
    let cutoff = PRUNE_RELATIVE * max;
    let terms = blocks
        .into_iter()
        .flatten()
        .filter(|t| t.2.abs() >= cutoff)
        .map(|(x, z, c)| PauliTerm::from_masks(n, x, z, c))
        .collect();
    PauliTermList::new(n, terms)
}

/// First-order product `[Π_s exp(−i c_s P_s t/n_steps)]^{n_steps} ψ₀`, terms in
/// label order.
pub fn trotter_evolve(terms: &PauliTermList, t: f64, n_steps: usize, psi0: &StateVector) -> Result<StateVector> {
    if n_steps == 0 {
        return Err(Error::InvalidConfig("trotter steps must be at least 1".into()));
    }
    if psi0.n_qubits() != terms.n_qubits {
        return Err(Error::DimensionMismatch { expected: terms.n_qubits, found: psi0.n_qubits() });
    }
    let mut psi = psi0.clone();
    if t == 0.0 {
        return Ok(psi);
    }
    let dt = t / n_steps as f64;
    for _ in 0..n_steps {
        for term in &terms.terms {
            term.exp_apply(term.coeff * dt, psi.amplitudes_mut());
        }
    }
    Ok(psi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exact,
    Trotter(usize),
}

/// Prepared evolution `ψ ↦ U(t) ψ` for one Hamiltonian.
pub enum Evolver {
    Exact(Propagator),
    Trotter { terms: PauliTermList, steps: usize },
}

impl Evolver {
    pub fn new(h: &OperatorMatrix, method: Method) -> Result<Self> {
        match method {
            Method::Exact => {
                let deviation = h.hermiticity_deviation();
                if deviation > HERMITIAN_TOL {
                    return Err(Error::NotHermitian { deviation, tolerance: HERMITIAN_TOL });
                }
                Ok(Self::Exact(Propagator::new(h)?))
            }
            Method::Trotter(steps) => {
                if steps == 0 {
                    return Err(Error::InvalidConfig("trotter steps must be at least 1".into()));
                }
                Ok(Self::Trotter { terms: pauli_decompose(h)?, steps })
            }
        }
    }

    pub fn evolve(&self, t: f64, psi: &StateVector) -> Result<StateVector> {
        match self {
            Self::Exact(p) => {
                if p.eigensystem().eigenvalues.len() != psi.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: p.eigensystem().eigenvalues.len(),
                        found: psi.dim(),
                    });
                }
                StateVector::from_amplitudes(p.apply(t, psi.amplitudes()))
            }
            Self::Trotter { terms, steps } => trotter_evolve(terms, t, *steps, psi),
        }
    }
}

/// `K(t) = ⟨ψ_f|U(t)|ψ_i⟩` for each final state over a time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionSeries {
    pub times: Vec<f64>,
    pub labels: Vec<String>,
    /// `amplitudes[f][t]`.
    pub amplitudes: Vec<Vec<Complex64>>,
}

impl TransitionSeries {
    pub fn probability(&self, f: usize, t: usize) -> f64 {
        self.amplitudes[f][t].norm_sqr()
    }

    /// Largest `| |K|² − |K'|² |` over all entries.
    pub fn max_probability_deviation(&self, other: &TransitionSeries) -> Result<f64> {
        if self.times.len() != other.times.len() || self.amplitudes.len() != other.amplitudes.len() {
            return Err(Error::DimensionMismatch { expected: self.times.len(), found: other.times.len() });
        }
        let mut worst = 0.0f64;
        for (a, b) in self.amplitudes.iter().zip(&other.amplitudes) {
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((x.norm_sqr() - y.norm_sqr()).abs());
            }
        }
        Ok(worst)
    }

    /// `t,re_<label>,im_<label>,prob_<label>,…`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for l in &self.labels {
            let _ = write!(out, ",re_{l},im_{l},prob_{l}");
        }
        out.push('\n');
        for (ti, t) in self.times.iter().enumerate() {
            let _ = write!(out, "{t}");
            for amps in &self.amplitudes {
                let a = amps[ti];
                let _ = write!(out, ",{},{},{}", a.re, a.im, a.norm_sqr());
            }
            out.push('\n');
        }
        out
    }
}

const NORM_TOL: f64 = 1e-10;

fn require_normalized(psi: &StateVector) -> Result<()> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidConfig(format!("state is not normalized (norm {norm})")));
    }
    Ok(())
}

/// Transition amplitudes from `psi_i` to each of `finals` at every time in
/// `times`. Time points are evaluated in parallel.
pub fn transition_series(
    h: &BuiltHamiltonian,
    psi_i: &StateVector,
    finals: &[(String, StateVector)],
    times: &[f64],
    method: Method,
) -> Result<TransitionSeries> {
    let matrix = h.objective()?;
    require_normalized(psi_i)?;
    for (_, f) in finals {
        require_normalized(f)?;
        if f.dim() != psi_i.dim() {
            return Err(Error::DimensionMismatch { expected: psi_i.dim(), found: f.dim() });
        }
    }
    if psi_i.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: psi_i.dim() });
    }
    let evolver = Evolver::new(matrix, method)?;
    let columns: Vec<Vec<Complex64>> = times
        .par_iter()
        .map(|&t| {
            let psi_t = evolver.evolve(t, psi_i)?;
            Ok(finals.iter().map(|(_, f)| f.inner(&psi_t)).collect())
        })
        .collect::<Result<_>>()?;
    let amplitudes = (0..finals.len()).map(|f| columns.iter().map(|col| col[f]).collect()).collect();
    Ok(TransitionSeries { times: times.to_vec(), labels: finals.iter().map(|(l, _)| l.clone()).collect(), amplitudes })
}

/// Grid index whose value is the smallest positive grid point (the even
/// grid has no point at zero).
pub fn origin_index(n: usize) -> usize {
    n / 2
}

/// Position-basis state on the `[n, n]` register at grid indices `(ix, iy)`.
pub fn position_state(ix: usize, iy: usize, n: usize) -> Result<StateVector> {
    for i in [ix, iy] {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
    }
    StateVector::basis(qubits_for(n * n)?, ix * n + iy)
}

/// Momentum eigenstate `k`: column `k` of `F†`, so that
/// `pos_p(n)·|k⟩ = x_k |k⟩` with `x_k` the `k`-th position grid value.
pub fn momentum_state(k: usize, n: usize) -> Result<StateVector> {
    if k >= n {
        return Err(Error::IndexOutOfRange { index: k, len: n });
    }
    let f = sylvester_f(n)?;
    StateVector::from_amplitudes((0..n).map(|j| f.get(k, j).conj()).collect())
}

/// `⟨p₁| exp(i p₂ X̂) |p₃⟩` between momentum states `k1`, `k3` on an
/// `n`-point grid. `X̂` is diagonal, so the phase is applied exactly.
pub fn vertex_amplitude(k1: usize, p2: f64, k3: usize, n: usize) -> Result<Complex64> {
    let bra = momentum_state(k1, n)?;
    let ket = momentum_state(k3, n)?;
    Ok(grid_points(n)
        .iter()
        .zip(bra.amplitudes().iter().zip(ket.amplitudes()))
        .map(|(x, (b, k))| b.conj() * Complex64::from_polar(1.0, p2 * x) * k)
        .sum())
}

/// [`vertex_amplitude`] through the Pauli/Trotter path, as a cross-check.
pub fn vertex_amplitude_trotter(k1: usize, p2: f64, k3: usize, n: usize) -> Result<Complex64> {
    let generator = OperatorMatrix::from_real_diagonal(&grid_points(n).iter().map(|x| -p2 * x).collect::<Vec<_>>());
    let terms = pauli_decompose(&generator)?;
    let moved = trotter_evolve(&terms, 1.0, 1, &momentum_state(k3, n)?)?;
    Ok(momentum_state(k1, n)?.inner(&moved))
}

/// Kinematic peak location `x_{k3} − x_{k1}`.
pub fn kinematic_p2(k1: usize, k3: usize, n: usize) -> f64 {
    grid_point(k3, n) - grid_point(k1, n)
}

/// `p₂` values spanning every momentum difference on the grid,
/// `subdivisions` points per grid spacing.
pub fn p2_scan_grid(n: usize, subdivisions: usize) -> Vec<f64> {
    let spacing = grid_point(1, n) - grid_point(0, n);
    let half = (n - 1) as i64 * subdivisions as i64;
    let step = spacing / subdivisions as f64;
    (-half..=half).map(|m| m as f64 * step).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct VertexScan {
    pub p2: Vec<f64>,
    pub abs_amplitude: Vec<f64>,
}

impl VertexScan {
    /// Every scan point within `tol` of the maximum. The lattice is periodic
    /// in `p₂`, so a peak and its wrapped images all qualify.
    pub fn argmax(&self, tol: f64) -> Vec<f64> {
        let max = self.abs_amplitude.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.p2.iter().zip(&self.abs_amplitude).filter(|(_, a)| **a >= max - tol).map(|(p, _)| *p).collect()
    }

    /// `p2,abs_amplitude` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p2,abs_amplitude\n");
        for (p, a) in self.p2.iter().zip(&self.abs_amplitude) {
            let _ = writeln!(out, "{p},{a}");
        }
        out
    }
}

pub fn scan_vertex(k1: usize, k3: usize, n: usize, p2: &[f64]) -> Result<VertexScan> {
    let abs_amplitude = p2.iter().map(|&p| vertex_amplitude(k1, p, k3, n).map(|a| a.norm())).collect::<Result<_>>()?;
    Ok(VertexScan { p2: p2.to_vec(), abs_amplitude })
}

/// Diagonal of `x ⊗ I` on a position-basis Landau Cartesian register.
fn vertex_positions(h: &BuiltHamiltonian) -> Result<Vec<f64>> {
    if h.spec.kind != HamiltonianKind::LandauCartesian || h.spec.basis != Basis::Position {
        return Err(Error::InvalidSpec(
            "vertex insertion needs a landau_cartesian hamiltonian in the position basis".into(),
        ));
    }
    let n = h.spec.truncation();
    let xs = grid_points(n);
    Ok((0..n * n).map(|k| xs[k / n]).collect())
}

/// `U(T − τ) · exp(i p₂ X̂) · U(τ) · ψ₀`.
pub fn scattering_process(
    h_free: &BuiltHamiltonian,
    p2: f64,
    tau: f64,
    total_t: f64,
    psi0: &StateVector,
    method: Method,
) -> Result<StateVector> {
    if !(tau > 0.0 && tau < total_t) {
        return Err(Error::InvalidTimes(format!("need 0 < tau < total_T, got tau = {tau}, total_T = {total_t}")));
    }
    let xs = vertex_positions(h_free)?;
    if psi0.dim() != xs.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), found: psi0.dim() });
    }
    let evolver = Evolver::new(h_free.objective()?, method)?;
    let mut psi = evolver.evolve(tau, psi0)?;
    for (a, x) in psi.amplitudes_mut().iter_mut().zip(&xs) {
        *a *= Complex64::from_polar(1.0, p2 * x);
    }
    evolver.evolve(total_t - tau, &psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{pos_p, pos_q};
    use crate::hamiltonian::{build, HamiltonianSpec, Variant};
    use crate::operator::{evolve_unitary, kron};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n_qubits: usize, seed: u64) -> OperatorMatrix {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let dim = 1 << n_qubits;
        OperatorMatrix::from_fn(dim, |_, _| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
            .hermitian_part()
    }

    fn rel_err(a: &OperatorMatrix, b: &OperatorMatrix) -> f64 {
        (a - b).frobenius_norm() / b.frobenius_norm()
    }

    /// Oracle: `Tr(P H)/2^n` with `P` materialized by Kronecker products.
    fn brute_coeff(h: &OperatorMatrix, label: &str) -> f64 {
        let mut p = OperatorMatrix::identity(1);
        for ch in label.chars() {
            let s = match ch {
                'I' => OperatorMatrix::identity(2),
                'X' => OperatorMatrix::pauli_x(),
                'Y' => OperatorMatrix::pauli_y(),
                _ => OperatorMatrix::pauli_z(),
            };
            p = kron(&p, &s);
        }
        (p.matmul(h).trace() / h.dim() as f64).re
    }

    fn state_distance(a: &StateVector, b: &StateVector) -> f64 {
        a.distance(b)
    }

    #[test]
    fn decompose_examples() {
        let z = pauli_decompose(&OperatorMatrix::pauli_z()).unwrap();
        assert_eq!(z.len(), 1);
        assert_eq!(z.terms[0].label, "Z");
        assert!((z.terms[0].coeff - 1.0).abs() < 1e-15);

        let h = OperatorMatrix::from_row_major(&[ONE, ONE, ONE, -ONE]).unwrap();
        let d = pauli_decompose(&h).unwrap();
        assert_eq!(d.len(), 2);
        assert!((d.coeff("X") - 1.0).abs() < 1e-15 && (d.coeff("Z") - 1.0).abs() < 1e-15);

        let y = pauli_decompose(&OperatorMatrix::pauli_y()).unwrap();
        assert!((y.coeff("Y") - 1.0).abs() < 1e-15);
    }

    #[test]
    fn decompose_matches_brute_force_traces() {
        let h = random_hermitian(3, 4);
        let d = pauli_decompose(&h).unwrap();
        for t in &d.terms {
            assert!((t.coeff - brute_coeff(&h, &t.label)).abs() < 1e-13, "{}", t.label);
        }
        assert!((d.coeff("XIY") - brute_coeff(&h, "XIY")).abs() < 1e-13);
        assert!((d.coeff("ZYX") - brute_coeff(&h, "ZYX")).abs() < 1e-13);
    }

    #[test]
    fn label_order_follows_tensor_order() {
        let h = kron(&OperatorMatrix::pauli_x(), &OperatorMatrix::pauli_z());
        let d = pauli_decompose(&h).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.terms[0].label, "XZ");
    }

    #[test]
    fn round_trip_one_to_six_qubits() {
        for n in 1..=6 {
            let h = random_hermitian(n, n as u64);
            let d = pauli_decompose(&h).unwrap();
            assert!(rel_err(&d.reconstruct(), &h) < 1e-12, "n = {n}");
            assert!(d.terms.windows(2).all(|w| w[0].label < w[1].label));
        }
    }

    #[test]
    fn decompose_rejects_bad_input() {
        assert!(matches!(pauli_decompose(&OperatorMatrix::identity(3)), Err(Error::NotPowerOfTwo(3))));
        let mut a = OperatorMatrix::zeros(2);
        a.set(0, 1, ONE);
        assert!(matches!(pauli_decompose(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn pauli_exponential_matches_matrix_exponential() {
        for label in ["X", "Y", "Z", "XY", "YZ", "ZZ", "IX", "YYX"] {
            let n = label.len();
            let term = PauliTerm::new(label, 0.37).unwrap();
            let list = PauliTermList::new(n, vec![term]).unwrap();
            let h = list.reconstruct();
            let mut r = ChaCha8Rng::seed_from_u64(1);
            let amps: Vec<Complex64> =
                (0..1 << n).map(|_| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))).collect();
            let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            let psi = StateVector::from_amplitudes(amps.iter().map(|a| a / norm).collect()).unwrap();
            let exact = StateVector::from_amplitudes(evolve_unitary(&h, 1.3).unwrap().apply(psi.amplitudes())).unwrap();
            for steps in [1, 3] {
                let trotter = trotter_evolve(&list, 1.3, steps, &psi).unwrap();
                assert!(state_distance(&trotter, &exact) < 1e-12, "{label}");
            }
        }
    }

    #[test]
    fn trotter_zero_time_and_errors() {
        let list = pauli_decompose(&random_hermitian(2, 3)).unwrap();
        let psi = StateVector::zero(2);
        assert_eq!(trotter_evolve(&list, 0.0, 5, &psi).unwrap(), psi);
        assert!(trotter_evolve(&list, 1.0, 0, &psi).is_err());
        assert!(matches!(trotter_evolve(&list, 1.0, 1, &StateVector::zero(3)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn trotter_first_order_on_x_plus_z() {
        let h = &OperatorMatrix::pauli_x() + &OperatorMatrix::pauli_z();
        let list = pauli_decompose(&h).unwrap();
        let psi = StateVector::zero(1);
        let t = 1.0;
        let exact = StateVector::from_amplitudes(evolve_unitary(&h, t).unwrap().apply(psi.amplitudes())).unwrap();
        let errors: Vec<f64> = [16, 32, 64, 128]
            .iter()
            .map(|&s| state_distance(&trotter_evolve(&list, t, s, &psi).unwrap(), &exact))
            .collect();
        for w in errors.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((order - 1.0).abs() < 0.2, "order {order}");
        }
    }

    #[test]
    fn evolution_preserves_norm() {
        let h = random_hermitian(4, 11);
        let mut psi = StateVector::zero(4);
        psi = crate::circuits::apply_ry(&psi, 2, 0.4).unwrap();
        for method in [Method::Exact, Method::Trotter(7)] {
            let out = Evolver::new(&h, method).unwrap().evolve(2.3, &psi).unwrap();
            assert!((out.norm() - 1.0).abs() < 1e-10);
        }
    }

    fn landau_position() -> BuiltHamiltonian {
        build(&HamiltonianSpec::landau_cartesian(2.0).with_truncation(4).with_basis(Basis::Position)).unwrap()
    }

    #[test]
    fn transition_series_basics() {
        let h = landau_position();
        let n = 4;
        let psi = position_state(origin_index(n), origin_index(n), n).unwrap();
        let finals: Vec<(String, StateVector)> =
            (0..n * n).map(|k| (format!("s{k}"), StateVector::basis(4, k).unwrap())).collect();
        let times = [0.0, 0.3, 0.9];
        let series = transition_series(&h, &psi, &finals, &times, Method::Exact).unwrap();
        for (f, (_, state)) in finals.iter().enumerate() {
            assert!((series.amplitudes[f][0] - state.inner(&psi)).norm() < 1e-12);
        }
        for t in 0..times.len() {
            let total: f64 = (0..finals.len()).map(|f| series.probability(f, t)).sum();
            assert!((total - 1.0).abs() < 1e-10);
        }
        let csv = series.to_csv();
        assert!(csv.starts_with("t,re_s0,im_s0,prob_s0,re_s1"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn stationary_state_keeps_unit_overlap() {
        let h = landau_position();
        let eig = crate::operator::hermitian_eig(&h.matrix).unwrap();
        let ground = StateVector::from_amplitudes(eig.vector(0)).unwrap();
        let finals = vec![("g".to_string(), ground.clone())];
        let series = transition_series(&h, &ground, &finals, &[0.0, 0.5, 1.0, 7.0], Method::Exact).unwrap();
        assert!(series.amplitudes[0].iter().all(|k| (k.norm() - 1.0).abs() < 1e-10));
    }

    #[test]
    fn momentum_states_are_orthonormal_eigenvectors() {
        let n = 16;
        let p = pos_p(n).unwrap();
        let q = pos_q(n).unwrap();
        let states: Vec<StateVector> = (0..n).map(|k| momentum_state(k, n).unwrap()).collect();
        for (j, a) in states.iter().enumerate() {
            assert!((a.norm() - 1.0).abs() < 1e-14);
            for (k, b) in states.iter().enumerate() {
                let expected = if j == k { 1.0 } else { 0.0 };
                assert!((a.inner(b) - Complex64::new(expected, 0.0)).norm() < 1e-12);
            }
            let pa = p.apply(a.amplitudes());
            let xk = q.get(j, j).re;
            for (u, v) in pa.iter().zip(a.amplitudes()) {
                assert!((u - v * xk).norm() < 1e-12);
            }
        }
        assert!(matches!(momentum_state(16, 16), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn vertex_delta_and_unitarity() {
        let n = 16;
        for k1 in 0..n {
            for k3 in 0..n {
                let zero = vertex_amplitude(k1, 0.0, k3, n).unwrap();
                let expected = if k1 == k3 { 1.0 } else { 0.0 };
                assert!((zero - Complex64::new(expected, 0.0)).norm() < 1e-12);
                let p2 = kinematic_p2(k1, k3, n);
                assert!((vertex_amplitude(k1, p2, k3, n).unwrap().norm() - 1.0).abs() < 1e-10);
                for other in 0..n {
                    if other != k1 {
                        assert!(vertex_amplitude(other, p2, k3, n).unwrap().norm() < 1e-10);
                    }
                }
            }
        }
        for p2 in [0.0, 0.37, -2.2, 5.0] {
            let total: f64 = (0..n).map(|k1| vertex_amplitude(k1, p2, 5, n).unwrap().norm_sqr()).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn vertex_scan_peaks_at_kinematic_value() {
        let n = 16;
        let grid = p2_scan_grid(n, 4);
        let spacing = grid_point(1, n) - grid_point(0, n);
        for (k1, k3) in [(0, 0), (3, 9), (15, 0), (7, 6)] {
            let scan = scan_vertex(k1, k3, n, &grid).unwrap();
            let peaks = scan.argmax(1e-10);
            let target = kinematic_p2(k1, k3, n);
            assert!(peaks.iter().any(|p| (p - target).abs() < 1e-9));
            // Any other maximizer is a wrapped image, a whole period 2n·spacing/2 away.
            for p in peaks {
                let shifts = (p - target) / (n as f64 * spacing);
                assert!((shifts - shifts.round()).abs() < 1e-9);
            }
        }
        assert_eq!(scan_vertex(2, 2, n, &grid).unwrap().argmax(1e-10), vec![0.0]);
    }

    #[test]
    fn vertex_trotter_cross_check() {
        for (k1, k3, p2) in [(1, 4, 0.8), (5, 5, -1.3), (0, 15, 2.0)] {
            let a = vertex_amplitude(k1, p2, k3, 16).unwrap();
            let b = vertex_amplitude_trotter(k1, p2, k3, 16).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn scattering_limits() {
        let h = build(&HamiltonianSpec::landau_cartesian(0.0).with_truncation(4).with_basis(Basis::Position)).unwrap();
        let psi0 = position_state(1, 2, 4).unwrap();
        let evolver = Evolver::new(&h.matrix, Method::Exact).unwrap();

        let plain = evolver.evolve(1.5, &psi0).unwrap();
        let free = scattering_process(&h, 0.0, 0.4, 1.5, &psi0, Method::Exact).unwrap();
        assert!(free.distance(&plain) < 1e-10);

        let xs = vertex_positions(&h).unwrap();
        let kick = |s: &StateVector| {
            let mut out = s.clone();
            for (a, x) in out.amplitudes_mut().iter_mut().zip(&xs) {
                *a *= Complex64::from_polar(1.0, 0.9 * x);
            }
            out
        };
        let early = scattering_process(&h, 0.9, 1e-12, 1.5, &psi0, Method::Exact).unwrap();
        assert!(early.distance(&evolver.evolve(1.5, &kick(&psi0)).unwrap()) < 1e-9);
        let late = scattering_process(&h, 0.9, 1.5 - 1e-12, 1.5, &psi0, Method::Exact).unwrap();
        assert!(late.distance(&kick(&evolver.evolve(1.5, &psi0).unwrap())) < 1e-9);
        assert!((late.norm() - 1.0).abs() < 1e-10);

        for (tau, total) in [(0.0, 1.0), (1.0, 1.0), (2.0, 1.0)] {
            assert!(matches!(
                scattering_process(&h, 0.1, tau, total, &psi0, Method::Exact),
                Err(Error::InvalidTimes(_))
            ));
        }
        let polar = build(&HamiltonianSpec::landau_polar(2.0, 0).with_variant(Variant::HermitianPart)).unwrap();
        assert!(scattering_process(&polar, 0.1, 0.2, 1.0, &StateVector::zero(4), Method::Exact).is_err());
    }
}
