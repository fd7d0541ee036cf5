//! Closed-form references: Landau spectra, propagation kernels, and the
//! Wu-Yang radial equation.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Kernels are rejected when `|sin(B T / 2)|` falls below this.
pub const SINGULAR_SINE: f64 = 1e-9;

/// `|B| (n + ½)`.
pub fn landau_energy(b_field: f64, n: u32) -> f64 {
    b_field.abs() * (n as f64 + 0.5)
}

/// `(n + 1 − m) B / 2`.
pub fn polar_energy(b_field: f64, n: u32, m: i64) -> f64 {
    (n as f64 + 1.0 - m as f64) * b_field / 2.0
}

/// Endpoints and time for a propagation-kernel evaluation.
///
/// Cartesian kernels read `(x, y)` and optionally `z`; polar kernels read
/// `(rho, phi)` from the same slots via [`KernelQuery::polar`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelQuery {
    pub initial: (f64, f64),
    pub final_: (f64, f64),
    /// `(z_i, z_f)`; `None` restricts the Cartesian kernel to the plane.
    pub z: Option<(f64, f64)>,
    pub t: f64,
    pub b_field: f64,
    pub m_max: u32,
}

impl KernelQuery {
    pub fn cartesian(initial: (f64, f64), final_: (f64, f64), t: f64, b_field: f64) -> Self {
        Self { initial, final_, z: None, t, b_field, m_max: 0 }
    }

    pub fn polar(initial: (f64, f64), final_: (f64, f64), t: f64, b_field: f64, m_max: u32) -> Self {
        Self { initial, final_, z: None, t, b_field, m_max }
    }

    fn half_angle(&self) -> Result<(f64, f64)> {
        let half = self.b_field * self.t / 2.0;
        let sine = half.sin();
        // BT/2 → 0 is a removable singularity; only nonzero multiples of π are poles.
        if self.t == 0.0 || (half.abs() > 1e-6 && sine.abs() <= SINGULAR_SINE) {
            return Err(Error::SingularTime { t: self.t, sine });
        }
        Ok((half, sine))
    }
}

/// `x / sin x`, continuous through zero.
fn x_over_sin(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 + x * x / 6.0
    } else {
        x / x.sin()
    }
}

/// `x / tan x`, continuous through zero.
fn x_over_tan(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 3.0
    } else {
        x / x.tan()
    }
}

/// Magnetic-field kernel in Cartesian coordinates, transcribed as
///
/// `K = (1/2πT)^{d/2} · (BT/2)/sin(BT/2) · e^{iΔz²/2T}
///      · exp[ i (BT/2)/tan(BT/2) · (Δx² + Δy² + B (y_f x_i − x_f y_i)) ]`
///
/// with `d = 3` when `z` endpoints are given. Without them the free
/// z-factor `(1/2πT)^{1/2} e^{iΔz²/2T}` is dropped, leaving `d = 2`.
pub fn kernel_cartesian(q: &KernelQuery) -> Result<Complex64> {
    let (half, _) = q.half_angle()?;
    let (xi, yi) = q.initial;
    let (xf, yf) = q.final_;
    let t = q.t;
    let (dims, z_phase) = match q.z {
        Some((zi, zf)) => (3.0, (zf - zi).powi(2) / (2.0 * t)),
        None => (2.0, 0.0),
    };
    let prefactor = (1.0 / (2.0 * PI * t)).powf(dims / 2.0) * x_over_sin(half);
    let bracket = (xf - xi).powi(2) + (yf - yi).powi(2) + q.b_field * (yf * xi - xf * yi);
    let phase = z_phase + x_over_tan(half) * bracket;
    Ok(Complex64::from_polar(prefactor, phase))
}

/// `B → 0` limit of [`kernel_cartesian`]:
/// `(1/2πT)^{d/2} · e^{iΔz²/2T} · exp[i (Δx² + Δy²)]`.
pub fn kernel_free(q: &KernelQuery) -> Result<Complex64> {
    if q.t == 0.0 {
        return Err(Error::SingularTime { t: 0.0, sine: 0.0 });
    }
    let (xi, yi) = q.initial;
    let (xf, yf) = q.final_;
    let (dims, z_phase) = match q.z {
        Some((zi, zf)) => (3.0, (zf - zi).powi(2) / (2.0 * q.t)),
        None => (2.0, 0.0),
    };
    let prefactor = (1.0 / (2.0 * PI * q.t)).powf(dims / 2.0);
    Ok(Complex64::from_polar(prefactor, z_phase + (xf - xi).powi(2) + (yf - yi).powi(2)))
}

/// Modified Bessel function `I_ν(z)` for complex `z` by its power series
/// `Σ_k (z/2)^{2k+ν} / (k! (k+ν)!)`, stopped once the term ratio drops
/// below 1e-16.
pub fn bessel_i(nu: u32, z: Complex64) -> Complex64 {
    let half = z / 2.0;
    let mut term = Complex64::new(1.0, 0.0);
    for k in 1..=nu {
        term *= half / k as f64;
    }
    if term == Complex64::new(0.0, 0.0) {
        return term;
    }
    let quarter = half * half;
    let mut sum = term;
    for k in 1..500u32 {
        term *= quarter / (k as f64 * (k + nu) as f64);
        sum += term;
        if term.norm() <= 1e-16 * sum.norm() {
            break;
        }
    }
    sum
}

/// Magnetic-field kernel in polar coordinates with the angular-momentum sum
/// truncated to `|m| ≤ m_max`:
///
/// `K = (1/2πi) · (B/2)/sin(BT/2) · e^{−B(ρ_f²+ρ_i²)/4}
///      · e^{i B(ρ_f²+ρ_i²)/4 · e^{−iBT/2}/sin(BT/2)}
///      · Σ_m e^{im(φ_f − φ_i + BT/2)} I_{|m|}(−i (B/2) ρ_f ρ_i / sin(BT/2))`
pub fn kernel_polar(q: &KernelQuery) -> Result<Complex64> {
    let (half, sine) = q.half_angle()?;
    if q.b_field == 0.0 {
        return Err(Error::SingularTime { t: q.t, sine: 0.0 });
    }
    if q.m_max < 1 {
        return Err(Error::InvalidConfig("kernel_polar needs m_max >= 1".into()));
    }
    let b = q.b_field;
    let (rho_i, phi_i) = q.initial;
    let (rho_f, phi_f) = q.final_;
    let radial = rho_f * rho_f + rho_i * rho_i;
    let i = Complex64::new(0.0, 1.0);
    let prefactor = (b / 2.0) / sine / (2.0 * PI * i);
    let gaussian = (-b / 4.0 * radial).exp();
    let twist = (i * (b / 4.0) * radial * Complex64::from_polar(1.0, -half) / sine).exp();
    let arg = -i * (b / 2.0) * rho_f * rho_i / sine;
    let angle = phi_f - phi_i + half;
    let mut sum = Complex64::new(0.0, 0.0);
    for m in -(q.m_max as i64)..=(q.m_max as i64) {
        sum += Complex64::from_polar(1.0, m as f64 * angle) * bessel_i(m.unsigned_abs() as u32, arg);
    }
    Ok(prefactor * gaussian * twist * sum)
}

/// Small-`r` expansion `1 − r² + (3/10) r⁴`.
pub fn wu_yang_series_small(r: f64) -> f64 {
    1.0 - r * r + 0.3 * r.powi(4)
}

/// Derivative of [`wu_yang_series_small`].
pub fn wu_yang_series_small_prime(r: f64) -> f64 {
    -2.0 * r + 1.2 * r.powi(3)
}

/// Large-`r` expansion `1 − 1/r + (3/4)/r²`.
pub fn wu_yang_series_large(r: f64) -> f64 {
    1.0 - 1.0 / r + 0.75 / (r * r)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WuYangSample {
    pub r: f64,
    pub g: f64,
    pub gprime: f64,
}

/// `g'' = g (g² − 1) / r²` by classic fourth-order Runge-Kutta on a uniform
/// grid of `steps` intervals. Returns `steps + 1` samples including both ends.
pub fn wu_yang_solve(
    r_start: f64,
    r_end: f64,
    steps: usize,
    g_start: f64,
    gprime_start: f64,
) -> Result<Vec<WuYangSample>> {
    if !(r_start.is_finite() && r_start > 0.0) || !r_end.is_finite() {
        return Err(Error::StepUnderflow(format!("r_start must be positive, got {r_start}")));
    }
    if steps < 10 {
        return Err(Error::StepUnderflow(format!("need at least 10 steps, got {steps}")));
    }
    let h = (r_end - r_start) / steps as f64;
    if !(h.is_finite() && h > 0.0) || h <= f64::EPSILON * r_end.abs() {
        return Err(Error::StepUnderflow(format!("step {h:e} on [{r_start}, {r_end}]")));
    }
    let rhs = |r: f64, g: f64, gp: f64| (gp, g * (g * g - 1.0) / (r * r));
    let mut out = Vec::with_capacity(steps + 1);
    let (mut g, mut gp) = (g_start, gprime_start);
    out.push(WuYangSample { r: r_start, g, gprime: gp });
    for k in 0..steps {
        let r = r_start + k as f64 * h;
        let (k1g, k1p) = rhs(r, g, gp);
        let (k2g, k2p) = rhs(r + h / 2.0, g + h / 2.0 * k1g, gp + h / 2.0 * k1p);
        let (k3g, k3p) = rhs(r + h / 2.0, g + h / 2.0 * k2g, gp + h / 2.0 * k2p);
        let (k4g, k4p) = rhs(r + h, g + h * k3g, gp + h * k3p);
        g += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
        gp += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        out.push(WuYangSample { r: r_start + (k + 1) as f64 * h, g, gprime: gp });
    }
    Ok(out)
}

/// RK4 error at `r_end` for `steps` and `2·steps` intervals, measured
/// against a run with `64·steps` intervals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HalvingReport {
    pub coarse_error: f64,
    pub fine_error: f64,
    pub ratio: f64,
}

pub fn wu_yang_step_halving(
    r_start: f64,
    r_end: f64,
    steps: usize,
    g_start: f64,
    gprime_start: f64,
) -> Result<HalvingReport> {
    let end = |s: usize| -> Result<f64> {
        Ok(wu_yang_solve(r_start, r_end, s, g_start, gprime_start)?.last().expect("non-empty").g)
    };
    let reference = end(64 * steps)?;
    let coarse_error = (end(steps)? - reference).abs();
    let fine_error = (end(2 * steps)? - reference).abs();
    Ok(HalvingReport { coarse_error, fine_error, ratio: coarse_error / fine_error })
}
