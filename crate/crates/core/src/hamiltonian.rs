//! Hamiltonians of a charged particle in a constant magnetic field (Cartesian
//! and polar oscillator bases, plus a position-grid Cartesian form) and of a
//! particle with SU(2) worldline fermions in a monopole-like background.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{fermion_factor, osc_p, osc_q, place, pos_p, pos_q, qubits_for};
use crate::error::{Error, Result};
use crate::operator::{
    general_eigenvalues, hermitian_eigenvalues, kron, matrix_function, matrix_function_complex, OperatorMatrix,
    HERMITIAN_TOL,
};

/// Default spectral floor for inverse powers of radial operators.
pub const DEFAULT_FLOOR: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianKind {
    LandauCartesian,
    LandauPolar,
    MonopoleSu2,
}

impl HamiltonianKind {
    pub fn default_truncation(self) -> usize {
        match self {
            HamiltonianKind::LandauCartesian | HamiltonianKind::LandauPolar => 16,
            HamiltonianKind::MonopoleSu2 => 4,
        }
    }
}

impl fmt::Display for HamiltonianKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HamiltonianKind::LandauCartesian => "landau_cartesian",
            HamiltonianKind::LandauPolar => "landau_polar",
            HamiltonianKind::MonopoleSu2 => "monopole_su2",
        })
    }
}

/// Construction variant. `Literal` follows the printed operator products;
/// the others are alternatives for the places where those products are not
/// Hermitian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Variant {
    #[default]
    Literal,
    /// Worldline fermions replaced by Hermitian factors `(ψ + ψ†)/√2`.
    MajoranaFermions,
    /// `(H + H†) / 2` of the literal matrix.
    HermitianPart,
    /// Field strength taken as the scalar `-g_m / r_ref²`.
    ScalarB { r_ref: f64 },
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Literal => f.write_str("literal"),
            Variant::MajoranaFermions => f.write_str("majorana_fermions"),
            Variant::HermitianPart => f.write_str("hermitian_part"),
            Variant::ScalarB { r_ref } => write!(f, "scalar_b(r_ref={r_ref})"),
        }
    }
}

/// Single-particle basis for the bosonic coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    #[default]
    Oscillator,
    Position,
}

fn default_b_field() -> f64 {
    2.0
}

fn default_floor() -> f64 {
    DEFAULT_FLOOR
}

fn is_default_basis(b: &Basis) -> bool {
    *b == Basis::Oscillator
}

/// Declarative description of which Hamiltonian to build.
///
/// For `monopole_su2`, `b_field` is the monopole coupling `g_m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianSpec {
    pub kind: HamiltonianKind,
    #[serde(default = "default_b_field")]
    pub b_field: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boson_trunc: Option<usize>,
    #[serde(default)]
    pub angular_m: i64,
    #[serde(default)]
    pub variant: Variant,
    #[serde(default = "default_floor")]
    pub floor: f64,
    #[serde(default, skip_serializing_if = "is_default_basis")]
    pub basis: Basis,
}

impl HamiltonianSpec {
    pub fn new(kind: HamiltonianKind) -> Self {
        Self {
            kind,
            b_field: default_b_field(),
            boson_trunc: None,
            angular_m: 0,
            variant: Variant::Literal,
            floor: DEFAULT_FLOOR,
            basis: Basis::Oscillator,
        }
    }

    pub fn landau_cartesian(b_field: f64) -> Self {
        Self { b_field, ..Self::new(HamiltonianKind::LandauCartesian) }
    }

    pub fn landau_polar(b_field: f64, angular_m: i64) -> Self {
        Self { b_field, angular_m, ..Self::new(HamiltonianKind::LandauPolar) }
    }

    pub fn monopole(g_m: f64, variant: Variant) -> Self {
        Self { b_field: g_m, variant, ..Self::new(HamiltonianKind::MonopoleSu2) }
    }

    pub fn with_truncation(mut self, n: usize) -> Self {
        self.boson_trunc = Some(n);
        self
    }

    pub fn with_basis(mut self, basis: Basis) -> Self {
        self.basis = basis;
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serialization is infallible")
    }

    pub fn truncation(&self) -> usize {
        self.boson_trunc.unwrap_or_else(|| self.kind.default_truncation())
    }

    /// Qubit count of the assembled matrix.
    pub fn qubits(&self) -> Result<usize> {
        let per_boson = qubits_for(self.truncation())?;
        Ok(match self.kind {
            HamiltonianKind::LandauCartesian => 2 * per_boson,
            HamiltonianKind::LandauPolar => per_boson,
            HamiltonianKind::MonopoleSu2 => 3 * per_boson + 3,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.truncation();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidSpec(format!("boson_trunc must be a power of two >= 2, got {n}")));
        }
        if !self.b_field.is_finite() {
            return Err(Error::InvalidSpec("b_field must be finite".into()));
        }
        if !(self.floor.is_finite() && self.floor >= 0.0) {
            return Err(Error::InvalidSpec("floor must be finite and non-negative".into()));
        }
        match self.variant {
            Variant::MajoranaFermions | Variant::ScalarB { .. } if self.kind != HamiltonianKind::MonopoleSu2 => {
                return Err(Error::InvalidSpec(format!("variant {} only applies to monopole_su2", self.variant)));
            }
            Variant::ScalarB { r_ref } if !(r_ref.is_finite() && r_ref > 0.0) => {
                return Err(Error::InvalidSpec("scalar_b r_ref must be positive".into()));
            }
            _ => {}
        }
        if self.angular_m != 0 && self.kind != HamiltonianKind::LandauPolar {
            return Err(Error::InvalidSpec("angular_m only applies to landau_polar".into()));
        }
        if self.basis == Basis::Position && self.kind != HamiltonianKind::LandauCartesian {
            return Err(Error::InvalidSpec("position basis is only available for landau_cartesian".into()));
        }
        // Qubit budget: at most 9 qubits (512×512).
        let qubits = self.qubits()?;
        if qubits > 9 {
            return Err(Error::InvalidSpec(format!("{qubits} qubits exceeds the 512x512 limit")));
        }
        Ok(())
    }
}

/// Assembled Hamiltonian with its build metadata.
#[derive(Clone, Debug)]
pub struct BuiltHamiltonian {
    pub matrix: OperatorMatrix,
    pub spec: HamiltonianSpec,
    /// Hermitian to [`HERMITIAN_TOL`] as measured after assembly.
    pub hermitian: bool,
    pub qubits: usize,
}

impl BuiltHamiltonian {
    fn new(matrix: OperatorMatrix, spec: HamiltonianSpec) -> Result<Self> {
        let qubits = qubits_for(matrix.dim())?;
        let hermitian = matrix.is_hermitian(HERMITIAN_TOL);
        Ok(Self { matrix, spec, hermitian, qubits })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Full spectrum. Non-Hermitian matrices report their eigenvalues ordered
    /// by real part.
    pub fn spectrum(&self) -> Result<Vec<Complex64>> {
        if self.hermitian {
            Ok(hermitian_eigenvalues(&self.matrix)?.into_iter().map(|l| Complex64::new(l, 0.0)).collect())
        } else {
            general_eigenvalues(&self.matrix)
        }
    }

    /// Lowest eigenvalue (real part for non-Hermitian matrices).
    pub fn lowest_eigenvalue(&self) -> Result<f64> {
        Ok(self.spectrum()?[0].re)
    }

    /// Hermitian matrix suitable as a variational objective.
    pub fn objective(&self) -> Result<&OperatorMatrix> {
        if self.hermitian {
            Ok(&self.matrix)
        } else {
            Err(Error::NonHermitianObjective(format!(
                "{} with variant {} is not Hermitian (relative deviation {:.3e}); \
                 rebuild with variant hermitian_part (or majorana_fermions for monopole_su2)",
                self.spec.kind,
                self.spec.variant,
                self.matrix.hermiticity_deviation()
            )))
        }
    }
}

/// Builds the Hamiltonian described by `spec`.
pub fn build(spec: &HamiltonianSpec) -> Result<BuiltHamiltonian> {
    spec.validate()?;
    match spec.kind {
        HamiltonianKind::LandauCartesian => build_landau_cartesian(spec),
        HamiltonianKind::LandauPolar => build_landau_polar(spec),
        HamiltonianKind::MonopoleSu2 => build_monopole_su2(spec),
    }
}

fn require_kind(spec: &HamiltonianSpec, kind: HamiltonianKind) -> Result<()> {
    if spec.kind != kind {
        return Err(Error::InvalidSpec(format!("expected kind {kind}, got {}", spec.kind)));
    }
    spec.validate()
}

fn finish(matrix: OperatorMatrix, spec: &HamiltonianSpec) -> Result<BuiltHamiltonian> {
    let matrix = match spec.variant {
        Variant::HermitianPart => matrix.hermitian_part(),
        _ => matrix,
    };
    BuiltHamiltonian::new(matrix, spec.clone())
}

/// `½(p_x + (B/2) y)² + ½(p_y − (B/2) x)²`.
///
/// In the oscillator basis the operators are built with one extra level per
/// factor, squared, and compressed back to `N` levels. Each quadratic term
/// then equals the truncation of its untruncated counterpart, which keeps the
/// compressed spectrum bounded below by the lowest Landau level.
pub fn build_landau_cartesian(spec: &HamiltonianSpec) -> Result<BuiltHamiltonian> {
    require_kind(spec, HamiltonianKind::LandauCartesian)?;
    let n = spec.truncation();
    let b = spec.b_field;
    let matrix = match spec.basis {
        Basis::Oscillator => {
            let padded = n + 1;
            let h = cartesian_products(&osc_q(padded)?, &osc_p(padded)?, b)?;
            h.select(&leading_grid_indices(n, padded))
        }
        Basis::Position => cartesian_products(&pos_q(n)?, &pos_p(n)?, b)?,
    };
    finish(matrix, spec)
}

/// Same Hamiltonian formed with plain `N`-level matrix products and no
/// compression step. Kept for comparison; its spectrum dips below the lowest
/// Landau level because `Q·Q` and `P·P` lose their last diagonal entry.
pub fn landau_cartesian_truncated_products(b_field: f64, n: usize) -> Result<OperatorMatrix> {
    cartesian_products(&osc_q(n)?, &osc_p(n)?, b_field)
}

/// Expanded form `½(p_x²+p_y²) + ½(B/2)²(x²+y²) − (B/2)(x p_y − y p_x)`
/// built with the same padding and compression as [`build_landau_cartesian`].
pub fn landau_cartesian_expanded(b_field: f64, n: usize) -> Result<OperatorMatrix> {
    let padded = n + 1;
    let (q, p) = (osc_q(padded)?, osc_p(padded)?);
    let dims = [padded, padded];
    let x = place(&q, 0, &dims)?;
    let y = place(&q, 1, &dims)?;
    let px = place(&p, 0, &dims)?;
    let py = place(&p, 1, &dims)?;
    let half_b = b_field / 2.0;
    let kinetic = (&(&px * &px) + &(&py * &py)).scale(0.5);
    let confining = (&(&x * &x) + &(&y * &y)).scale(0.5 * half_b * half_b);
    let angular = &(&x * &py) - &(&y * &px);
    let h = &(&kinetic + &confining) - &angular.scale(half_b);
    Ok(h.select(&leading_grid_indices(n, padded)))
}

fn cartesian_products(q: &OperatorMatrix, p: &OperatorMatrix, b: f64) -> Result<OperatorMatrix> {
    let m = q.dim();
    let dims = [m, m];
    let x = place(q, 0, &dims)?;
    let y = place(q, 1, &dims)?;
    let px = place(p, 0, &dims)?;
    let py = place(p, 1, &dims)?;
    let a = &px + &y.scale(b / 2.0);
    let c = &py - &x.scale(b / 2.0);
    Ok((&(&a * &a) + &(&c * &c)).scale(0.5))
}

/// Row-major indices `(i, j)` with `i, j < n` inside an `m × m` product grid.
fn leading_grid_indices(n: usize, m: usize) -> Vec<usize> {
    (0..n).flat_map(|i| (0..n).map(move |j| i * m + j)).collect()
}

/// `½ ρ^{-1/2} p ρ p ρ^{-1/2} + ½(B/2)² ρ² + ½ m² ρ^{-2} − (B/2) m` with
/// `ρ = Q` and `p = P` from the oscillator basis.
///
/// Powers of the indefinite coordinate use the principal branch
/// (`λ^{-1/2} = −i|λ|^{-1/2}` for `λ < 0`). The result is not Hermitian but
/// has a real spectrum equal to the radial Landau energies, each doubled by
/// the two half-lines of the grid.
pub fn build_landau_polar(spec: &HamiltonianSpec) -> Result<BuiltHamiltonian> {
    require_kind(spec, HamiltonianKind::LandauPolar)?;
    let n = spec.truncation();
    let rho = osc_q(n)?;
    let p = osc_p(n)?;
    let inv_sqrt = matrix_function_complex(&rho, principal_inv_sqrt, spec.floor)?;
    finish(polar_assembly(&rho, &inv_sqrt, &p, spec)?, spec)
}

/// Radial Hamiltonian with `ρ = |Q|` taken as the spectral absolute value.
/// Hermitian, but its ground energy sits well below the continuum value at
/// `N = 16`; kept for comparison with [`build_landau_polar`].
pub fn landau_polar_spectral_abs(spec: &HamiltonianSpec) -> Result<OperatorMatrix> {
    require_kind(spec, HamiltonianKind::LandauPolar)?;
    let n = spec.truncation();
    let rho = matrix_function(&osc_q(n)?, f64::abs, 0.0)?;
    let inv_sqrt = matrix_function(&rho, |l| l.abs().powf(-0.5), spec.floor)?;
    polar_assembly(&rho, &inv_sqrt, &osc_p(n)?, spec)
}

fn principal_inv_sqrt(lambda: f64) -> Complex64 {
    let mag = lambda.abs().powf(-0.5);
    if lambda >= 0.0 {
        Complex64::new(mag, 0.0)
    } else {
        Complex64::new(0.0, -mag)
    }
}

fn polar_assembly(
    rho: &OperatorMatrix,
    inv_sqrt: &OperatorMatrix,
    p: &OperatorMatrix,
    spec: &HamiltonianSpec,
) -> Result<OperatorMatrix> {
    let half_b = spec.b_field / 2.0;
    let kinetic = &(&(&(&(inv_sqrt * p) * rho) * p) * inv_sqrt) * 0.5;
    let mut h = &kinetic + &(rho * rho).scale(0.5 * half_b * half_b);
    if spec.angular_m != 0 {
        let m = spec.angular_m as f64;
        let inv_sq = matrix_function(rho, |l| l.powi(-2), spec.floor)?;
        h += &inv_sq.scale(0.5 * m * m);
        h += &OperatorMatrix::identity(rho.dim()).scale(-half_b * m);
    }
    Ok(h)
}

/// Sum of Kronecker products `Σ_k B_k ⊗ F_k` over a bosonic and a fermionic
/// factor. Squaring stays in factored form, which keeps the 512×512 assembly
/// down to small products.
#[derive(Clone, Debug)]
struct KronSum {
    terms: Vec<(OperatorMatrix, OperatorMatrix)>,
}

impl KronSum {
    fn square(&self) -> KronSum {
        let mut terms = Vec::with_capacity(self.terms.len() * self.terms.len());
        for (b1, f1) in &self.terms {
            for (b2, f2) in &self.terms {
                terms.push((b1 * b2, f1 * f2));
            }
        }
        KronSum { terms }
    }

    fn dense(&self) -> OperatorMatrix {
        let mut it = self.terms.iter();
        let (b0, f0) = it.next().expect("non-empty Kronecker sum");
        let mut acc = kron(b0, f0);
        for (b, f) in it {
            acc += &kron(b, f);
        }
        acc
    }
}

/// `½ Σ_i (p_i + B(…))²` with worldline fermions, `B = −g_m (r²)^{-1}`.
pub fn build_monopole_su2(spec: &HamiltonianSpec) -> Result<BuiltHamiltonian> {
    require_kind(spec, HamiltonianKind::MonopoleSu2)?;
    let n = spec.truncation();
    let g_m = spec.b_field;
    let (q, p) = (osc_q(n)?, osc_p(n)?);
    let boson_dims = [n, n, n];
    let coord: Vec<OperatorMatrix> = (0..3).map(|s| place(&q, s, &boson_dims)).collect::<Result<_>>()?;
    let mom: Vec<OperatorMatrix> = (0..3).map(|s| place(&p, s, &boson_dims)).collect::<Result<_>>()?;
    let boson_dim = n * n * n;

    let single = match spec.variant {
        Variant::MajoranaFermions => {
            let psi = fermion_factor();
            (&psi + &psi.adjoint()).scale(std::f64::consts::FRAC_1_SQRT_2)
        }
        _ => fermion_factor(),
    };
    let fermion_dims = [2, 2, 2];
    let psi: Vec<OperatorMatrix> = (0..3).map(|s| place(&single, s, &fermion_dims)).collect::<Result<_>>()?;

    let field = match spec.variant {
        Variant::ScalarB { r_ref } => OperatorMatrix::identity(boson_dim).scale(-g_m / (r_ref * r_ref)),
        _ => {
            let r2 = &(&(&coord[0] * &coord[0]) + &(&coord[1] * &coord[1])) + &(&coord[2] * &coord[2]);
            matrix_function(&r2, |l| 1.0 / l, spec.floor)?.scale(-g_m)
        }
    };

    let (x, y, z) = (&coord[0], &coord[1], &coord[2]);
    let psi12 = &psi[0] * &psi[1];
    let psi23 = &psi[1] * &psi[2];
    let psi31 = &psi[2] * &psi[0];
    let ident8 = OperatorMatrix::identity(8);
    // (p_x + B(−y ψ¹ψ² + z ψ³ψ¹)), (p_y + B(−z ψ²ψ³ + x ψ¹ψ²)), (p_z + B(−x ψ³ψ¹ + y ψ²ψ³))
    let couplings = [
        (&mom[0], [(y, &psi12, -1.0), (z, &psi31, 1.0)]),
        (&mom[1], [(z, &psi23, -1.0), (x, &psi12, 1.0)]),
        (&mom[2], [(x, &psi31, -1.0), (y, &psi23, 1.0)]),
    ];
    let mut h = OperatorMatrix::zeros(boson_dim * 8);
    for (momentum, pairs) in couplings {
        let mut terms = vec![(momentum.clone(), ident8.clone())];
        for (position, fermions, sign) in pairs {
            terms.push(((&field * position).scale(sign), fermions.clone()));
        }
        h += &KronSum { terms }.square().dense();
    }
    finish(h.scale(0.5), spec)
}

/// Reference ground energies for the monopole at `g_m = 2` and `g_m = 0.2`.
pub const MONOPOLE_TABLE_TARGETS: [(f64, f64); 2] = [(2.0, -2.538_547_86), (0.2, 0.311_200_22)];

/// Agreement required between a variant's lowest eigenvalue and a target.
pub const VARIANT_MATCH_TOL: f64 = 1e-3;

#[derive(Clone, Debug, Serialize)]
pub struct VariantRow {
    pub variant: Variant,
    pub g_m: f64,
    pub lowest: f64,
    pub hermitian: bool,
    pub target: Option<f64>,
    pub deviation: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VariantReport {
    pub rows: Vec<VariantRow>,
    /// Variants matching every available target within [`VARIANT_MATCH_TOL`].
    pub matching: Vec<Variant>,
    /// Hermitian variant with the smallest worst-case deviation; used as the
    /// monopole default for variational runs.
    pub closest: Variant,
}

/// Variants compared by [`variant_selection_report`].
pub fn candidate_variants() -> Vec<Variant> {
    vec![Variant::Literal, Variant::HermitianPart, Variant::MajoranaFermions, Variant::ScalarB { r_ref: 1.0 }]
}

/// Lowest eigenvalue of every candidate monopole variant at each coupling,
/// compared against the reference values where one exists.
pub fn variant_selection_report(couplings: &[f64]) -> Result<VariantReport> {
    let mut rows = Vec::new();
    for variant in candidate_variants() {
        for &g_m in couplings {
            let built = build(&HamiltonianSpec::monopole(g_m, variant))?;
            let lowest = built.lowest_eigenvalue()?;
            let target = MONOPOLE_TABLE_TARGETS.iter().find(|(g, _)| (g - g_m).abs() < 1e-12).map(|&(_, value)| value);
            rows.push(VariantRow {
                variant,
                g_m,
                lowest,
                hermitian: built.hermitian,
                target,
                deviation: target.map(|t| (lowest - t).abs()),
            });
        }
    }
    let worst = |v: Variant| -> Option<f64> {
        rows.iter()
            .filter(|r| r.variant == v)
            .filter_map(|r| r.deviation)
            .fold(None, |acc, d| Some(acc.map_or(d, |a: f64| a.max(d))))
    };
    let matching =
        candidate_variants().into_iter().filter(|&v| worst(v).is_some_and(|d| d <= VARIANT_MATCH_TOL)).collect();
    let closest = candidate_variants()
        .into_iter()
        .filter(|&v| rows.iter().filter(|r| r.variant == v).all(|r| r.hermitian))
        .filter_map(|v| worst(v).map(|d| (v, d)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(v, _)| v)
        .unwrap_or(Variant::HermitianPart);
    Ok(VariantReport { rows, matching, closest })
}

impl VariantReport {
    /// Markdown table for the docs directory.
    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| variant | g_m | lowest eigenvalue | Hermitian | reference | deviation |\n");
        out.push_str("|---|---|---|---|---|---|\n");
        for r in &self.rows {
            out.push_str(&format!(
                "| {} | {} | {:.8} | {} | {} | {} |\n",
                r.variant,
                r.g_m,
                r.lowest,
                r.hermitian,
                r.target.map_or("-".into(), |t| format!("{t:.8}")),
                r.deviation.map_or("-".into(), |d| format!("{d:.3e}")),
            ));
        }
        let matching: Vec<String> = self.matching.iter().map(ToString::to_string).collect();
        out.push_str(&format!(
            "\nmatching within {VARIANT_MATCH_TOL:e}: {}\nclosest Hermitian variant: {}\n",
            if matching.is_empty() { "none".to_string() } else { matching.join(", ") },
            self.closest
        ));
        out
    }
}
