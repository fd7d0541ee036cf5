//! Variational ground-state search over the Ry ansatz.
//!
//! Every gate in the Ry form is real, so ansatz states are real vectors and
//! `⟨ψ|H|ψ⟩ = ψᵀ Re(H) ψ` for Hermitian `H`. The objective therefore works on
//! the real symmetric part of `H` and never touches complex amplitudes.
//! A consequence worth knowing: the reachable minimum is the lowest
//! eigenvalue of `Re(H)`, which can sit above `λ_min(H)` when the true ground
//! state is intrinsically complex.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::{parameter_count, AnsatzConfig};
use crate::error::{Error, Result};
use crate::hamiltonian::{build, BuiltHamiltonian, HamiltonianSpec};
use crate::operator::{OperatorMatrix, HERMITIAN_TOL};

pub const DEFAULT_MAX_ITER: usize = 600;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_SEED: u64 = 7;
/// Consecutive accepted steps with `|ΔE| < tolerance` needed to stop.
pub const STALL_WINDOW: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "method", deny_unknown_fields)]
pub enum Gradient {
    /// Exact reverse-mode derivative of the statevector.
    #[default]
    Analytic,
    CentralDifference {
        step: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitialParams {
    /// Uniform in `[−π, π]` from the seeded generator.
    #[default]
    Random,
    /// All zeros. A stationary point for many Hamiltonians.
    Zeros,
    /// Whatever the ansatz template carries.
    Template,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSettings {
    /// Iteration budget per start.
    pub max_iter: usize,
    pub tolerance: f64,
    pub seed: u64,
    /// Extra random starts after the first.
    pub restarts: usize,
    pub gradient: Gradient,
    pub initial: InitialParams,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            max_iter: DEFAULT_MAX_ITER,
            tolerance: DEFAULT_TOLERANCE,
            seed: DEFAULT_SEED,
            restarts: 0,
            gradient: Gradient::Analytic,
            initial: InitialParams::Random,
        }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be positive".into()));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::InvalidConfig(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if let Gradient::CentralDifference { step } = self.gradient {
            if !(step.is_finite() && step > 0.0) {
                return Err(Error::InvalidConfig(format!("gradient step must be positive, got {step}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TracePoint {
    /// Accepted optimizer steps so far, counted across restarts.
    pub iteration: usize,
    pub energy: f64,
    /// Objective evaluations so far; a gradient counts as one evaluation
    /// when analytic and as `2·params` when finite-differenced.
    pub evaluations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VqeResult {
    pub energy: f64,
    pub params: Vec<f64>,
    pub trace: Vec<TracePoint>,
    pub evaluations: usize,
    pub iterations: usize,
    /// False when any start ran out of iterations before the stall criterion.
    pub converged: bool,
}

impl VqeResult {
    /// `iteration,energy,evaluations` rows.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,energy,evaluations\n");
        for p in &self.trace {
            let _ = writeln!(out, "{},{},{}", p.iteration, p.energy, p.evaluations);
        }
        out
    }
}

/// Energy landscape `θ ↦ ψ(θ)ᵀ S ψ(θ)` for a fixed Hamiltonian and ansatz shape.
#[derive(Clone, Debug)]
pub struct Objective {
    s: DMatrix<f64>,
    n_qubits: usize,
    depth: usize,
    /// Sign pattern of one all-pairs CZ layer.
    cz_signs: Vec<f64>,
}

impl Objective {
    /// Fails on dimension mismatch or a non-Hermitian `h`.
    pub fn new(h: &OperatorMatrix, n_qubits: usize, depth: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if h.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: h.dim() });
        }
        if !h.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::NotHermitian { deviation: h.hermiticity_deviation(), tolerance: HERMITIAN_TOL });
        }
        let re = h.real_part();
        let s = (&re + re.transpose()) * 0.5;
        let cz_signs = (0..dim)
            .map(|i| {
                let k = (i as u32).count_ones();
                if (k * k.saturating_sub(1) / 2).is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        Ok(Self { s, n_qubits, depth, cz_signs })
    }

    pub fn n_params(&self) -> usize {
        parameter_count(self.n_qubits, self.depth)
    }

    fn check(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_params() {
            return Err(Error::InvalidConfig(format!("expected {} parameters, got {}", self.n_params(), theta.len())));
        }
        Ok(())
    }

    fn ry(&self, psi: &mut [f64], qubit: usize, theta: f64) {
        let mask = 1usize << (self.n_qubits - 1 - qubit);
        let (s, c) = (theta / 2.0).sin_cos();
        for i in 0..psi.len() {
            if i & mask == 0 {
                let (a0, a1) = (psi[i], psi[i | mask]);
                psi[i] = c * a0 - s * a1;
                psi[i | mask] = s * a0 + c * a1;
            }
        }
    }

    fn entangle(&self, psi: &mut [f64]) {
        for (a, s) in psi.iter_mut().zip(&self.cz_signs) {
            *a *= s;
        }
    }

    /// Real amplitudes of the ansatz state.
    pub fn state(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.check(theta)?;
        let mut psi = vec![0.0; 1 << self.n_qubits];
        psi[0] = 1.0;
        for layer in 0..=self.depth {
            if layer > 0 {
                self.entangle(&mut psi);
            }
            for q in 0..self.n_qubits {
                self.ry(&mut psi, q, theta[layer * self.n_qubits + q]);
            }
        }
        Ok(psi)
    }

    pub fn energy(&self, theta: &[f64]) -> Result<f64> {
        let psi = DVector::from_vec(self.state(theta)?);
        Ok(psi.dot(&(&self.s * &psi)))
    }

    /// Energy and its exact gradient from one forward and one reverse sweep.
    pub fn energy_and_gradient(&self, theta: &[f64]) -> Result<(f64, Vec<f64>)> {
        let psi_v = DVector::from_vec(self.state(theta)?);
        let lambda_v = &self.s * &psi_v;
        let energy = psi_v.dot(&lambda_v);
        let mut psi: Vec<f64> = psi_v.data.into();
        let mut lambda: Vec<f64> = lambda_v.data.into();
        let mut grad = vec![0.0; theta.len()];
        let mut mu = vec![0.0; psi.len()];
        for layer in (0..=self.depth).rev() {
            for q in (0..self.n_qubits).rev() {
                let k = layer * self.n_qubits + q;
                self.ry(&mut psi, q, -theta[k]);
                // dRy(θ)/dθ = ½ Ry(θ + π)
                mu.copy_from_slice(&psi);
                self.ry(&mut mu, q, theta[k] + PI);
                grad[k] = lambda.iter().zip(&mu).map(|(l, m)| l * m).sum::<f64>();
                self.ry(&mut lambda, q, -theta[k]);
            }
            if layer > 0 {
                self.entangle(&mut psi);
                self.entangle(&mut lambda);
            }
        }
        Ok((energy, grad))
    }

    /// Central-difference gradient with step `h`.
    pub fn finite_difference_gradient(&self, theta: &[f64], h: f64) -> Result<Vec<f64>> {
        self.check(theta)?;
        let mut x = theta.to_vec();
        let mut grad = Vec::with_capacity(theta.len());
        for k in 0..theta.len() {
            x[k] = theta[k] + h;
            let up = self.energy(&x)?;
            x[k] = theta[k] - h;
            let down = self.energy(&x)?;
            x[k] = theta[k];
            grad.push((up - down) / (2.0 * h));
        }
        Ok(grad)
    }
}

struct Counter<'a> {
    objective: &'a Objective,
    gradient: Gradient,
    evaluations: usize,
}

impl Counter<'_> {
    fn energy(&mut self, x: &[f64]) -> Result<f64> {
        self.evaluations += 1;
        self.objective.energy(x)
    }

    fn energy_and_gradient(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        match self.gradient {
            Gradient::Analytic => {
                self.evaluations += 1;
                self.objective.energy_and_gradient(x)
            }
            Gradient::CentralDifference { step } => {
                self.evaluations += 1 + 2 * x.len();
                Ok((self.objective.energy(x)?, self.objective.finite_difference_gradient(x, step)?))
            }
        }
    }
}

struct RunOutcome {
    energy: f64,
    params: Vec<f64>,
    converged: bool,
}

const ARMIJO_C1: f64 = 1e-4;
const MIN_STEP: f64 = 1e-12;
const GRAD_FLOOR: f64 = 1e-12;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// BFGS with Armijo backtracking. Appends one trace point per accepted step.
fn bfgs(
    counter: &mut Counter,
    start: Vec<f64>,
    settings: &OptimizerSettings,
    trace: &mut Vec<TracePoint>,
    iteration: &mut usize,
) -> Result<RunOutcome> {
    let n = start.len();
    let mut x = start;
    let (mut f, mut g) = counter.energy_and_gradient(&x)?;
    trace.push(TracePoint { iteration: *iteration, energy: f, evaluations: counter.evaluations });
    let mut hinv = DMatrix::<f64>::identity(n, n);
    let mut stall = 0;
    let mut fresh = true;
    for _ in 0..settings.max_iter {
        if dot(&g, &g).sqrt() < GRAD_FLOOR {
            return Ok(RunOutcome { energy: f, params: x, converged: true });
        }
        let gv = DVector::from_column_slice(&g);
        let mut d: Vec<f64> = (-(&hinv * &gv)).data.into();
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            hinv.fill_with_identity();
            d = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let mut step = 1.0;
        let mut accepted = None;
        while step >= MIN_STEP {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + step * di).collect();
            let ft = counter.energy(&trial)?;
            if ft <= f + ARMIJO_C1 * step * slope {
                accepted = Some(trial);
                break;
            }
            step *= 0.5;
        }
        let Some(x_new) = accepted else {
            if fresh {
                // Steepest descent cannot decrease f at machine precision.
                return Ok(RunOutcome { energy: f, params: x, converged: true });
            }
            hinv.fill_with_identity();
            fresh = true;
            continue;
        };
        let (f_new, g_new) = counter.energy_and_gradient(&x_new)?;
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-14 {
            let sv = DVector::from_vec(s);
            let yv = DVector::from_vec(y);
            let rho = 1.0 / sy;
            let hy = &hinv * &yv;
            let yhy = yv.dot(&hy);
            // H ← H − ρ(H y sᵀ + s yᵀ H) + (ρ² yᵀHy + ρ) s sᵀ
            hinv -= (&hy * sv.transpose() + &sv * hy.transpose()) * rho;
            hinv += (&sv * sv.transpose()) * (rho * rho * yhy + rho);
            fresh = false;
        }
        *iteration += 1;
        let delta = f - f_new;
        x = x_new;
        f = f_new;
        g = g_new;
        trace.push(TracePoint { iteration: *iteration, energy: f, evaluations: counter.evaluations });
        stall = if delta.abs() < settings.tolerance { stall + 1 } else { 0 };
        if stall >= STALL_WINDOW {
            return Ok(RunOutcome { energy: f, params: x, converged: true });
        }
    }
    Ok(RunOutcome { energy: f, params: x, converged: false })
}

/// Minimizes `⟨ψ(θ)|h|ψ(θ)⟩` over the ansatz described by `ansatz`.
///
/// With `restarts > 0` further random starts run after the first and their
/// traces are appended; the result keeps the best endpoint.
pub fn minimize_operator(h: &OperatorMatrix, ansatz: &AnsatzConfig, settings: &OptimizerSettings) -> Result<VqeResult> {
    settings.validate()?;
    let objective = Objective::new(h, ansatz.n_qubits, ansatz.depth)?;
    let n_params = objective.n_params();
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut counter = Counter { objective: &objective, gradient: settings.gradient, evaluations: 0 };
    let mut trace = Vec::new();
    let mut iteration = 0;
    let mut best: Option<RunOutcome> = None;
    let mut converged = true;
    for run in 0..=settings.restarts {
        let start = match (settings.initial, run) {
            (InitialParams::Zeros, 0) => vec![0.0; n_params],
            (InitialParams::Template, 0) => {
                ansatz.validate()?;
                ansatz.params.clone()
            }
            _ => (0..n_params).map(|_| rng.random_range(-PI..PI)).collect(),
        };
        let outcome = bfgs(&mut counter, start, settings, &mut trace, &mut iteration)?;
        converged &= outcome.converged;
        if best.as_ref().is_none_or(|b| outcome.energy < b.energy) {
            best = Some(outcome);
        }
    }
    let best = best.expect("at least one start");
    Ok(VqeResult {
        energy: best.energy,
        params: best.params,
        trace,
        evaluations: counter.evaluations,
        iterations: iteration,
        converged,
    })
}

/// [`minimize_operator`] on a built Hamiltonian. Non-Hermitian builds are
/// refused with a message naming the variants that fix them.
pub fn minimize(h: &BuiltHamiltonian, ansatz: &AnsatzConfig, settings: &OptimizerSettings) -> Result<VqeResult> {
    let matrix = h.objective()?;
    if ansatz.n_qubits != h.qubits {
        return Err(Error::DimensionMismatch { expected: h.qubits, found: ansatz.n_qubits });
    }
    minimize_operator(matrix, ansatz, settings)
}

/// One independent run of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCell {
    pub hamiltonian: HamiltonianSpec,
    pub depth: usize,
}

/// Runs every cell in parallel. Each cell uses `settings` unchanged, so a
/// cell's result depends only on (cell, seed). Failures stay in their slot.
pub fn sweep(cells: &[SweepCell], settings: &OptimizerSettings) -> Result<Vec<Result<VqeResult>>> {
    if cells.is_empty() {
        return Err(Error::InvalidConfig("sweep grid is empty".into()));
    }
    Ok(cells
        .par_iter()
        .map(|cell| {
            let h = build(&cell.hamiltonian)?;
            minimize(&h, &AnsatzConfig::zeros(h.qubits, cell.depth), settings)
        })
        .collect())
}
