//! Command-line driver: JSON experiment config in, CSV out.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Deserialize;

use crate::analytic::{wu_yang_series_small, wu_yang_series_small_prime, wu_yang_solve, wu_yang_step_halving};
use crate::circuits::{AnsatzConfig, Entanglement, StateVector};
use crate::error::{Error, Result};
use crate::evolution::{
    kinematic_p2, origin_index, p2_scan_grid, scan_vertex, transition_series, Method, TransitionSeries,
};
use crate::hamiltonian::{
    build, variant_selection_report, BuiltHamiltonian, HamiltonianKind, HamiltonianSpec, Variant,
};
use crate::vqe::{minimize, OptimizerSettings};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "worldline", version, about = "Worldline Hamiltonians on a statevector simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON experiment config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file for the CSV (or Markdown for `variants`); stdout if absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides `optimizer.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides `hamiltonian.variant`: literal, hermitian_part,
    /// majorana_fermions, scalar_b or scalar_b=<r_ref>.
    #[arg(long, global = true, value_parser = parse_variant)]
    pub variant: Option<Variant>,
    /// Suppress the summary line.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, Subcommand, PartialEq, Eq)]
pub enum Command {
    /// Sorted eigenvalues (`index,eigenvalue`).
    Spectrum,
    /// Variational ground-state search; writes the convergence trace.
    Vqe,
    /// Exact and Trotterized transition amplitudes over a time grid.
    Eoh,
    /// Vertex-operator amplitude scan over p2.
    Scatter,
    /// Radial Wu-Yang trajectory with series comparison.
    Wuyang,
    /// Monopole variant comparison table.
    Variants,
}

pub fn parse_variant(s: &str) -> std::result::Result<Variant, String> {
    match s {
        "literal" => Ok(Variant::Literal),
        "hermitian_part" => Ok(Variant::HermitianPart),
        "majorana_fermions" => Ok(Variant::MajoranaFermions),
        "scalar_b" => Ok(Variant::ScalarB { r_ref: 1.0 }),
        _ => match s.strip_prefix("scalar_b=") {
            Some(r) => {
                r.parse::<f64>().map(|r_ref| Variant::ScalarB { r_ref }).map_err(|e| format!("bad r_ref {r:?}: {e}"))
            }
            None => Err(format!("unknown variant {s:?}")),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnsatzSection {
    pub depth: usize,
    pub entangler: Entanglement,
}

impl Default for AnsatzSection {
    fn default() -> Self {
        Self { depth: 3, entangler: Entanglement::Full }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionMethod {
    #[default]
    Both,
    Exact,
    Trotter,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionSection {
    pub t_max: f64,
    pub t_points: usize,
    pub trotter_steps: usize,
    pub method: EvolutionMethod,
    /// Flat basis index of the initial state. Defaults to the grid point
    /// nearest the origin for `landau_cartesian`, index 0 otherwise.
    pub initial: Option<usize>,
    /// Flat basis indices of the final states; all basis states if absent.
    pub finals: Option<Vec<usize>>,
}

impl Default for EvolutionSection {
    fn default() -> Self {
        Self {
            t_max: 1.0,
            t_points: 21,
            trotter_steps: 100,
            method: EvolutionMethod::Both,
            initial: None,
            finals: None,
        }
    }
}

impl EvolutionSection {
    pub fn times(&self) -> Vec<f64> {
        if self.t_points == 1 {
            return vec![self.t_max];
        }
        (0..self.t_points).map(|i| self.t_max * i as f64 / (self.t_points - 1) as f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct P2Scan {
    /// Scan points per grid spacing.
    pub subdivisions: usize,
}

impl Default for P2Scan {
    fn default() -> Self {
        Self { subdivisions: 8 }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScatterSection {
    pub qubits: usize,
    pub p1: usize,
    pub p3: usize,
    pub p2_scan: P2Scan,
}

impl Default for ScatterSection {
    fn default() -> Self {
        Self { qubits: 4, p1: 0, p3: 0, p2_scan: P2Scan::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Default)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum WuYangStart {
    /// Small-r series value and slope at `r_start`.
    #[default]
    Series,
    Given {
        g: f64,
        gprime: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WuYangSection {
    pub r_start: f64,
    pub r_end: f64,
    pub steps: usize,
    pub start: WuYangStart,
}

impl Default for WuYangSection {
    fn default() -> Self {
        Self { r_start: 0.05, r_end: 0.1, steps: 20, start: WuYangStart::Series }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VariantsSection {
    pub couplings: Vec<f64>,
}

impl Default for VariantsSection {
    fn default() -> Self {
        Self { couplings: vec![2.0, 0.2] }
    }
}

/// Top-level JSON document. Every section is optional; commands read only
/// the sections they need.
#[derive(Clone, Debug, PartialEq, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub hamiltonian: Option<HamiltonianSpec>,
    pub ansatz: AnsatzSection,
    pub optimizer: OptimizerSettings,
    pub evolution: EvolutionSection,
    pub scatter: ScatterSection,
    pub wuyang: WuYangSection,
    pub variants: VariantsSection,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn spec(&self) -> Result<&HamiltonianSpec> {
        self.hamiltonian.as_ref().ok_or_else(|| Error::InvalidConfig("config has no hamiltonian section".into()))
    }
}

/// What a command produced: the file body and a one-line summary.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub body: String,
    pub summary: String,
}

fn run_spectrum(cfg: &ExperimentConfig) -> Result<Report> {
    let h = build(cfg.spec()?)?;
    let spectrum = h.spectrum()?;
    let mut body = String::from(if h.hermitian { "index,eigenvalue\n" } else { "index,eigenvalue,imag\n" });
    for (k, l) in spectrum.iter().enumerate() {
        if h.hermitian {
            let _ = writeln!(body, "{k},{}", l.re);
        } else {
            let _ = writeln!(body, "{k},{},{}", l.re, l.im);
        }
    }
    let summary = format!("lambda_min={:.9} dim={} hermitian={}", spectrum[0].re, h.dim(), h.hermitian);
    Ok(Report { body, summary })
}

fn run_vqe(cfg: &ExperimentConfig) -> Result<Report> {
    let h = build(cfg.spec()?)?;
    h.objective()?;
    let lambda_min = h.lowest_eigenvalue()?;
    let ansatz = AnsatzConfig { entanglement: cfg.ansatz.entangler, ..AnsatzConfig::zeros(h.qubits, cfg.ansatz.depth) };
    let r = minimize(&h, &ansatz, &cfg.optimizer)?;
    let summary = format!(
        "energy={:.9}, lambda_min={:.9}, gap={:.3e}, iterations={}, evaluations={}, converged={}",
        r.energy,
        lambda_min,
        r.energy - lambda_min,
        r.iterations,
        r.evaluations,
        r.converged
    );
    Ok(Report { body: r.trace_csv(), summary })
}

fn state_label(h: &BuiltHamiltonian, k: usize) -> String {
    if h.spec.kind == HamiltonianKind::LandauCartesian {
        let n = h.spec.truncation();
        format!("x{}_y{}", k / n, k % n)
    } else {
        format!("s{k}")
    }
}

fn prefixed(prefix: &str, s: TransitionSeries) -> TransitionSeries {
    TransitionSeries { labels: s.labels.iter().map(|l| format!("{prefix}_{l}")).collect(), ..s }
}

fn run_eoh(cfg: &ExperimentConfig) -> Result<Report> {
    let h = build(cfg.spec()?)?;
    let ev = &cfg.evolution;
    if ev.t_points == 0 {
        return Err(Error::InvalidConfig("t_points must be at least 1".into()));
    }
    if !(ev.t_max.is_finite() && ev.t_max >= 0.0) {
        return Err(Error::InvalidConfig(format!("t_max must be non-negative, got {}", ev.t_max)));
    }
    let dim = h.dim();
    let initial = ev.initial.unwrap_or_else(|| {
        if h.spec.kind == HamiltonianKind::LandauCartesian {
            let n = h.spec.truncation();
            origin_index(n) * n + origin_index(n)
        } else {
            0
        }
    });
    let psi = StateVector::basis(h.qubits, initial)?;
    let final_indices = ev.finals.clone().unwrap_or_else(|| (0..dim).collect());
    let finals = final_indices
        .iter()
        .map(|&k| Ok((state_label(&h, k), StateVector::basis(h.qubits, k)?)))
        .collect::<Result<Vec<_>>>()?;
    let times = ev.times();
    let exact = match ev.method {
        EvolutionMethod::Both | EvolutionMethod::Exact => {
            Some(transition_series(&h, &psi, &finals, &times, Method::Exact)?)
        }
        EvolutionMethod::Trotter => None,
    };
    let trotter = match ev.method {
        EvolutionMethod::Both | EvolutionMethod::Trotter => {
            Some(transition_series(&h, &psi, &finals, &times, Method::Trotter(ev.trotter_steps))?)
        }
        EvolutionMethod::Exact => None,
    };
    let mut summary = format!("initial={} finals={} t_points={}", state_label(&h, initial), finals.len(), times.len());
    if let (Some(a), Some(b)) = (&exact, &trotter) {
        let _ = write!(
            summary,
            " trotter_steps={} max_deviation={:.3e}",
            ev.trotter_steps,
            a.max_probability_deviation(b)?
        );
    }
    let mut combined: Option<TransitionSeries> = None;
    for (prefix, series) in [("exact", exact), ("trotter", trotter)] {
        let Some(series) = series else { continue };
        let series = prefixed(prefix, series);
        combined = Some(match combined {
            None => series,
            Some(mut c) => {
                c.labels.extend(series.labels);
                c.amplitudes.extend(series.amplitudes);
                c
            }
        });
    }
    let body = combined.expect("at least one method").to_csv();
    Ok(Report { body, summary })
}

fn run_scatter(cfg: &ExperimentConfig) -> Result<Report> {
    let sc = &cfg.scatter;
    if sc.qubits == 0 || sc.qubits > 12 {
        return Err(Error::InvalidConfig(format!("scatter.qubits must be in 1..=12, got {}", sc.qubits)));
    }
    if sc.p2_scan.subdivisions == 0 {
        return Err(Error::InvalidConfig("p2_scan.subdivisions must be positive".into()));
    }
    let n = 1usize << sc.qubits;
    let grid = p2_scan_grid(n, sc.p2_scan.subdivisions);
    let scan = scan_vertex(sc.p1, sc.p3, n, &grid)?;
    let predicted = kinematic_p2(sc.p1, sc.p3, n);
    let peaks = scan.argmax(1e-10);
    let hit = peaks.iter().any(|p| (p - predicted).abs() < 1e-9);
    let peaks: Vec<String> = peaks.iter().map(|p| format!("{p:.9}")).collect();
    let summary = format!("argmax=[{}] kinematic_p2={predicted:.9} peak_matches={hit}", peaks.join(";"));
    Ok(Report { body: scan.to_csv(), summary })
}

fn run_wuyang(cfg: &ExperimentConfig) -> Result<Report> {
    let wy = &cfg.wuyang;
    let (g0, gp0) = match wy.start {
        WuYangStart::Series => (wu_yang_series_small(wy.r_start), wu_yang_series_small_prime(wy.r_start)),
        WuYangStart::Given { g, gprime } => (g, gprime),
    };
    let traj = wu_yang_solve(wy.r_start, wy.r_end, wy.steps, g0, gp0)?;
    let mut body = String::from("r,g,gprime,series_g,series_diff\n");
    let mut max_diff = 0.0f64;
    for s in &traj {
        let series = wu_yang_series_small(s.r);
        let diff = s.g - series;
        max_diff = max_diff.max(diff.abs());
        let _ = writeln!(body, "{},{},{},{},{}", s.r, s.g, s.gprime, series, diff);
    }
    let halving = wu_yang_step_halving(wy.r_start, wy.r_end, wy.steps, g0, gp0)?;
    let summary = format!(
        "max_series_diff={max_diff:.3e} rk4_error={:.3e} halving_ratio={:.3}",
        halving.coarse_error, halving.ratio
    );
    Ok(Report { body, summary })
}

fn run_variants(cfg: &ExperimentConfig) -> Result<Report> {
    if cfg.variants.couplings.is_empty() {
        return Err(Error::InvalidConfig("variants.couplings is empty".into()));
    }
    let report = variant_selection_report(&cfg.variants.couplings)?;
    let matching: Vec<String> = report.matching.iter().map(ToString::to_string).collect();
    let summary = format!("matching=[{}] closest={}", matching.join(";"), report.closest);
    Ok(Report { body: report.to_markdown(), summary })
}

/// Runs `command` on an already-loaded config with flag overrides applied.
pub fn execute(command: Command, cfg: &ExperimentConfig) -> Result<Report> {
    match command {
        Command::Spectrum => run_spectrum(cfg),
        Command::Vqe => run_vqe(cfg),
        Command::Eoh => run_eoh(cfg),
        Command::Scatter => run_scatter(cfg),
        Command::Wuyang => run_wuyang(cfg),
        Command::Variants => run_variants(cfg),
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_config_error() {
        EXIT_CONFIG
    } else {
        EXIT_NUMERIC
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.optimizer.seed = seed;
    }
    if let Some(variant) = cli.variant {
        match cfg.hamiltonian.as_mut() {
            Some(spec) => spec.variant = variant,
            None => return Err(Error::InvalidConfig("--variant given but config has no hamiltonian".into())),
        }
    }
    if let Some(out) = &cli.out {
        cfg.output = Some(out.clone());
    }
    if let Some(spec) = &cfg.hamiltonian {
        spec.validate()?;
    }
    cfg.optimizer.validate()?;
    Ok(cfg)
}

/// Full CLI entry point. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    let outcome = load_config(&cli).and_then(|cfg| {
        let report = execute(cli.command, &cfg)?;
        Ok((cfg, report))
    });
    let (cfg, report) = match outcome {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let summary_sink: &mut dyn Write = match &cfg.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &report.body) {
                let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                return EXIT_CONFIG;
            }
            stdout
        }
        None => {
            let _ = stdout.write_all(report.body.as_bytes());
            stderr
        }
    };
    if !cli.quiet {
        let _ = writeln!(summary_sink, "{}", report.summary);
    }
    EXIT_OK
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("worldline").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn variant_flag_parsing() {
        assert_eq!(parse_variant("hermitian_part").unwrap(), Variant::HermitianPart);
        assert_eq!(parse_variant("scalar_b").unwrap(), Variant::ScalarB { r_ref: 1.0 });
        assert_eq!(parse_variant("scalar_b=2.5").unwrap(), Variant::ScalarB { r_ref: 2.5 });
        assert!(parse_variant("hermitian").is_err());
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(ExperimentConfig::from_json(r#"{"hamiltonain": {}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"optimizer": {"max_iters": 5}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"evolution": {"t_max": 1.0, "steps": 3}}"#).is_err());
        let cfg = ExperimentConfig::from_json(r#"{"hamiltonian": {"kind": "landau_cartesian"}}"#).unwrap();
        assert_eq!(cfg.ansatz.depth, 3);
        assert_eq!(cfg.optimizer.max_iter, 600);
    }

    #[test]
    fn time_grid() {
        let ev = EvolutionSection { t_max: 0.0, t_points: 1, ..EvolutionSection::default() };
        assert_eq!(ev.times(), vec![0.0]);
        let ev = EvolutionSection { t_max: 1.0, t_points: 5, ..EvolutionSection::default() };
        assert_eq!(ev.times(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn spectrum_summary() {
        let cfg =
            ExperimentConfig::from_json(r#"{"hamiltonian": {"kind": "landau_cartesian", "b_field": 2.0}}"#).unwrap();
        let r = execute(Command::Spectrum, &cfg).unwrap();
        assert!(r.summary.starts_with("lambda_min=1.000000000"));
        assert!(r.body.starts_with("index,eigenvalue\n0,"));
        assert_eq!(r.body.lines().count(), 257);
    }

    #[test]
    fn zero_field_spectrum_is_non_negative() {
        let cfg =
            ExperimentConfig::from_json(r#"{"hamiltonian": {"kind": "landau_cartesian", "b_field": 0.0}}"#).unwrap();
        let r = execute(Command::Spectrum, &cfg).unwrap();
        let first: f64 = r.body.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
        assert!(first >= -1e-9);
    }

    #[test]
    fn eoh_at_time_zero_gives_overlaps() {
        let cfg = ExperimentConfig::from_json(
            r#"{"hamiltonian": {"kind": "landau_cartesian", "boson_trunc": 4, "basis": "position"},
                "evolution": {"t_max": 0.0, "t_points": 1}}"#,
        )
        .unwrap();
        let r = execute(Command::Eoh, &cfg).unwrap();
        let row: Vec<f64> = r.body.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        // initial is x2_y2 = flat index 10; prob columns sit at 3 + 3k.
        for k in 0..16 {
            let expected = if k == 10 { 1.0 } else { 0.0 };
            assert!((row[3 + 3 * k] - expected).abs() < 1e-12);
            assert!((row[48 + 3 + 3 * k] - expected).abs() < 1e-12);
        }
        let dev: f64 = r.summary.split("max_deviation=").nth(1).unwrap().parse().unwrap();
        assert!(dev < 1e-12);
    }

    #[test]
    fn scatter_peak_for_equal_momenta_is_zero() {
        let cfg = ExperimentConfig::from_json(r#"{"scatter": {"qubits": 4, "p1": 6, "p3": 6}}"#).unwrap();
        let r = execute(Command::Scatter, &cfg).unwrap();
        assert!(r.summary.contains("argmax=[0.000000000]"));
        assert!(r.summary.contains("peak_matches=true"));
        assert!(r.body.starts_with("p2,abs_amplitude\n"));
    }

    #[test]
    fn wuyang_fixed_point_start() {
        let cfg = ExperimentConfig::from_json(
            r#"{"wuyang": {"r_start": 0.5, "r_end": 3.0, "steps": 100, "start": {"given": {"g": 1.0, "gprime": 0.0}}}}"#,
        )
        .unwrap();
        let r = execute(Command::Wuyang, &cfg).unwrap();
        for line in r.body.lines().skip(1) {
            let g: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert_eq!(g, 1.0);
        }
    }

    #[test]
    fn exit_codes() {
        let (code, _, err) = run_capture(&["spectrum"]);
        assert_eq!(code, EXIT_CONFIG);
        assert!(err.contains("no hamiltonian"));
        let (code, _, _) = run_capture(&["frobnicate"]);
        assert_eq!(code, EXIT_CONFIG);
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("spectrum"));
        let (code, _, err) = run_capture(&["spectrum", "--config", "/nonexistent/config.json"]);
        assert_eq!(code, EXIT_CONFIG);
        assert!(err.contains("cannot read"));
    }

    #[test]
    fn scatter_without_config_runs() {
        let (code, out, err) = run_capture(&["scatter"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.starts_with("p2,abs_amplitude"));
        assert!(err.contains("peak_matches=true"));
        let (_, out, err) = run_capture(&["scatter", "--quiet"]);
        assert!(!out.is_empty() && err.is_empty());
    }
}
