//! JSON-configured batch scenarios that drive the other modules and write
//! CSV/JSON artifacts plus a `manifest.json`.
//!
//! ```json
//! { "kind": "peakon", "grid": { "n": 256, "L": 40.0 },
//!   "params": { "q": [0.0], "p": [1.0], "dt": 0.001, "t_end": 5.0 },
//!   "output_dir": "out/peakon", "seed": 7 }
//! ```
//!
//! Every kind-specific parameter block is parsed and checked by
//! [`ScenarioConfig::validate`] before any computation starts. Outputs
//! contain no timestamps, so the same config and seed give the same bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ch::{ChParams, ChSolver, RhsForm, DEFAULT_SLOPE_CEILING};
use crate::error::{Error, Result};
use crate::field::{Field, Grid1D, Spectral};
use crate::linear_sw::{evolve_dalembert, limit_bundle, SurfaceProfile};
use crate::output::{field_csv, InvariantLog};
use crate::peakon::{
    evolve_logged, hamiltonian, mollified_field, momentum, sample_field, PeakonEnsemble,
};
use crate::scaling::{audit_limit_system, from_long_wave, to_long_wave, ScalingParams};
use crate::variational::{
    verify_variational_identity, DiffeoPath, Lagrangian, RandomPerturbationSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    ChEvolution,
    Peakon,
    LinearSw,
    VariationalCheck,
    ScalingDemo,
    CrossValidation,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::ChEvolution => "ch_evolution",
            ScenarioKind::Peakon => "peakon",
            ScenarioKind::LinearSw => "linear_sw",
            ScenarioKind::VariationalCheck => "variational_check",
            ScenarioKind::ScalingDemo => "scaling_demo",
            ScenarioKind::CrossValidation => "cross_validation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    #[serde(rename = "L")]
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub grid: GridSpec,
    #[serde(default = "empty_object")]
    pub params: serde_json::Value,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

fn empty_object() -> serde_json::Value {
    serde_json::Value::Object(Default::default())
}

/// Initial condition for `ch_evolution`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialProfile {
    /// `amplitude * sech^2((x - center) / width)`.
    Sech2 {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: f64,
    },
    /// `amplitude * sin(2 pi mode x / L)`.
    Sine { amplitude: f64, mode: usize },
    /// Band-limited peakon of speed `c` at `center`.
    Peakon {
        c: f64,
        #[serde(default)]
        center: f64,
    },
}

impl InitialProfile {
    fn field(&self, grid: Grid1D) -> Result<Field> {
        match *self {
            InitialProfile::Sech2 {
                amplitude,
                width,
                center,
            } => {
                positive("width", width)?;
                Field::from_fn(grid, |x| amplitude / ((x - center) / width).cosh().powi(2))
            }
            InitialProfile::Sine { amplitude, mode } => {
                let k = 2.0 * std::f64::consts::PI * mode as f64 / grid.length();
                Field::from_fn(grid, |x| amplitude * (k * x).sin())
            }
            InitialProfile::Peakon { c, center } => {
                mollified_field(&PeakonEnsemble::new(vec![center], vec![c])?, grid)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChEvolutionParams {
    pub kappa: f64,
    pub dt: f64,
    pub t_end: f64,
    pub initial: InitialProfile,
    #[serde(default)]
    pub form: RhsForm,
    #[serde(default = "yes")]
    pub dealias: bool,
    #[serde(default)]
    pub filter: bool,
    #[serde(default = "default_ceiling")]
    pub slope_ceiling: f64,
    /// Invariants are logged every this many steps.
    #[serde(default = "default_log_every")]
    pub log_every: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeakonParams {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_log_every")]
    pub log_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gaussian {
    pub amplitude: f64,
    pub width: f64,
    #[serde(default)]
    pub center: f64,
}

impl Gaussian {
    fn field(&self, grid: Grid1D) -> Result<Field> {
        positive("width", self.width)?;
        let Gaussian {
            amplitude,
            width,
            center,
        } = *self;
        Field::from_fn(grid, |x| {
            amplitude * (-((x - center) / width).powi(2)).exp()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearSwParams {
    pub right: Gaussian,
    #[serde(default)]
    pub left: Option<Gaussian>,
    #[serde(default)]
    pub c0: f64,
    pub t_end: f64,
    /// Number of `z` levels on `[0, 1]` for the audit.
    #[serde(default = "default_nz")]
    pub nz: usize,
    #[serde(default = "default_audit_dt")]
    pub audit_dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariationalParams {
    /// Path `gamma = x + alpha sin(x' - t) + beta cos(2 x' + t)` in the
    /// scaled coordinate `x' = 2 pi x / L`.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    #[serde(rename = "T", default = "one")]
    pub horizon: f64,
    #[serde(rename = "K")]
    pub steps: usize,
    pub eps: f64,
    #[serde(default = "default_modes")]
    pub modes: usize,
    #[serde(default = "default_pert_amplitude")]
    pub perturbation_amplitude: f64,
    /// Use the elevation Lagrangian with this offset.
    #[serde(default)]
    pub c0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingDemoParams {
    pub h0: f64,
    pub lambda: f64,
    pub a: f64,
    #[serde(default = "default_g")]
    pub g: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_p0")]
    pub p0: f64,
    #[serde(default = "default_nz")]
    pub nz: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossValidationParams {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default)]
    pub form: RhsForm,
}

fn yes() -> bool {
    true
}
fn one() -> f64 {
    1.0
}
fn default_ceiling() -> f64 {
    DEFAULT_SLOPE_CEILING
}
fn default_log_every() -> usize {
    100
}
fn default_nz() -> usize {
    11
}
fn default_audit_dt() -> f64 {
    1e-5
}
fn default_alpha() -> f64 {
    0.05
}
fn default_modes() -> usize {
    4
}
fn default_pert_amplitude() -> f64 {
    0.1
}
fn default_g() -> f64 {
    9.81
}
fn default_rho() -> f64 {
    1000.0
}
fn default_p0() -> f64 {
    101_325.0
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive, got {v}")))
    }
}

/// A config whose kind-specific parameters have been parsed and checked.
#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    ChEvolution(ChEvolutionParams),
    Peakon(PeakonParams),
    LinearSw(LinearSwParams),
    VariationalCheck(VariationalParams),
    ScalingDemo(ScalingDemoParams),
    CrossValidation(CrossValidationParams),
}

fn parse_params<T: DeserializeOwned>(kind: ScenarioKind, value: &serde_json::Value) -> Result<T> {
    serde_json::from_value(value.clone())
        .map_err(|e| Error::Config(format!("params for {}: {e}", kind.name())))
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn grid(&self) -> Result<Grid1D> {
        Grid1D::new(self.grid.n, self.grid.length).map_err(config_err)
    }

    /// Parse and check the kind-specific parameters without computing anything.
    pub fn validate(&self) -> Result<Scenario> {
        self.grid()?;
        let kind = self.kind;
        let scenario = match kind {
            ScenarioKind::ChEvolution => {
                let p: ChEvolutionParams = parse_params(kind, &self.params)?;
                ChParams {
                    kappa: p.kappa,
                    dt: p.dt,
                    t_end: p.t_end,
                    dealias: p.dealias,
                    filter: p.filter,
                    slope_ceiling: p.slope_ceiling,
                }
                .validate()
                .map_err(config_err)?;
                if let InitialProfile::Sech2 { width, .. } = p.initial {
                    positive("initial.width", width)?;
                }
                Scenario::ChEvolution(p)
            }
            ScenarioKind::Peakon => {
                let p: PeakonParams = parse_params(kind, &self.params)?;
                PeakonEnsemble::new(p.q.clone(), p.p.clone()).map_err(config_err)?;
                positive("dt", p.dt)?;
                non_negative("t_end", p.t_end)?;
                Scenario::Peakon(p)
            }
            ScenarioKind::LinearSw => {
                let p: LinearSwParams = parse_params(kind, &self.params)?;
                positive("right.width", p.right.width)?;
                if let Some(left) = &p.left {
                    positive("left.width", left.width)?;
                }
                if p.nz < 3 {
                    return Err(Error::Config("nz must be at least 3".into()));
                }
                positive("audit_dt", p.audit_dt)?;
                if !p.t_end.is_finite() || !p.c0.is_finite() {
                    return Err(Error::Config("t_end and c0 must be finite".into()));
                }
                Scenario::LinearSw(p)
            }
            ScenarioKind::VariationalCheck => {
                let p: VariationalParams = parse_params(kind, &self.params)?;
                positive("T", p.horizon)?;
                positive("eps", p.eps)?;
                if p.steps < 4 {
                    return Err(Error::Config("K must be at least 4".into()));
                }
                if p.modes == 0 {
                    return Err(Error::Config("modes must be at least 1".into()));
                }
                let scale = 2.0 * std::f64::consts::PI / self.grid.length;
                if (p.alpha.abs() + 2.0 * p.beta.abs()) * scale >= 1.0 {
                    return Err(Error::Config("alpha and beta fold the path".into()));
                }
                Scenario::VariationalCheck(p)
            }
            ScenarioKind::ScalingDemo => {
                let p: ScalingDemoParams = parse_params(kind, &self.params)?;
                ScalingParams::new(p.h0, p.lambda, p.a, p.g, p.rho, p.p0).map_err(config_err)?;
                if p.nz < 3 {
                    return Err(Error::Config("nz must be at least 3".into()));
                }
                Scenario::ScalingDemo(p)
            }
            ScenarioKind::CrossValidation => {
                let p: CrossValidationParams = parse_params(kind, &self.params)?;
                PeakonEnsemble::new(p.q.clone(), p.p.clone()).map_err(config_err)?;
                positive("dt", p.dt)?;
                non_negative("t_end", p.t_end)?;
                Scenario::CrossValidation(p)
            }
        };
        Ok(scenario)
    }

    /// SHA-256 of the canonical JSON form of the config.
    /// SHA-256 of the canonical JSON, ignoring where outputs go.
    pub fn hash(&self) -> String {
        let located = ScenarioConfig {
            output_dir: None,
            ..self.clone()
        };
        let canonical = serde_json::to_vec(&located).expect("config always serializes");
        hex::encode(Sha256::digest(canonical))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be >= 0, got {v}")))
    }
}

/// Headline metrics and the files a run produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub kind: ScenarioKind,
    pub metrics: BTreeMap<String, f64>,
    pub artifacts: Vec<String>,
}

impl SummaryReport {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied()
    }
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    kind: ScenarioKind,
    config_hash: String,
    seed: u64,
    versions: BTreeMap<&'static str, &'static str>,
    metrics: &'a BTreeMap<String, f64>,
    artifacts: &'a [String],
}

struct Outputs {
    dir: PathBuf,
    metrics: BTreeMap<String, f64>,
    artifacts: Vec<String>,
}

impl Outputs {
    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        fs::write(self.dir.join(name), contents)?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }
}

/// Validate, execute and write all artifacts into `config.output_dir`
/// (default `output/<kind>`).
pub fn run(config: &ScenarioConfig) -> Result<SummaryReport> {
    let scenario = config.validate()?;
    let grid = config.grid()?;
    let dir = config
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("output").join(config.kind.name()));
    fs::create_dir_all(&dir)?;
    let mut out = Outputs {
        dir,
        metrics: BTreeMap::new(),
        artifacts: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    match &scenario {
        Scenario::ChEvolution(p) => run_ch(grid, p, &mut out)?,
        Scenario::Peakon(p) => run_peakon(grid, p, &mut out)?,
        Scenario::LinearSw(p) => run_linear_sw(grid, p, &mut out)?,
        Scenario::VariationalCheck(p) => run_variational(grid, p, &mut rng, &mut out)?,
        Scenario::ScalingDemo(p) => run_scaling(grid, p, &mut out)?,
        Scenario::CrossValidation(p) => run_cross_validation(grid, p, &mut out)?,
    }
    let manifest = Manifest {
        kind: config.kind,
        config_hash: config.hash(),
        seed: config.seed,
        versions: BTreeMap::from([("wavelab", env!("CARGO_PKG_VERSION"))]),
        metrics: &out.metrics,
        artifacts: &out.artifacts,
    };
    fs::write(
        out.dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    out.artifacts.push("manifest.json".into());
    Ok(SummaryReport {
        kind: config.kind,
        metrics: out.metrics,
        artifacts: out.artifacts,
    })
}

fn run_ch(grid: Grid1D, p: &ChEvolutionParams, out: &mut Outputs) -> Result<()> {
    let params = ChParams {
        kappa: p.kappa,
        dt: p.dt,
        t_end: p.t_end,
        dealias: p.dealias,
        filter: p.filter,
        slope_ceiling: p.slope_ceiling,
    };
    let solver = ChSolver::new(grid, params, p.form)?;
    let state = solver.prepare(p.initial.field(grid)?)?;
    out.write("u_initial.csv", &field_csv(&state.u))?;
    let initial = solver.invariants(&state.u)?;
    let mut log = InvariantLog::default();
    log.push(0.0, initial.as_array());
    let every = p.log_every.max(1);
    let result = solver.run(state, |k, s| {
        if k % every == 0 {
            log.push(s.t, solver.invariants(&s.u)?.as_array());
        }
        Ok(())
    });
    // keep the partial log on a halt
    out.write("invariants.csv", &log.to_csv())?;
    let end = result?;
    out.write("u_final.csv", &field_csv(&end.u))?;
    let drift = solver.invariants(&end.u)?.relative_drift(&initial);
    out.metric("drift_H0", drift[0]);
    out.metric("drift_H1", drift[1]);
    out.metric("drift_H2", drift[2]);
    out.metric("max_slope", solver.max_slope(&end.u)?);
    out.metric("t_final", end.t);
    Ok(())
}

fn run_peakon(grid: Grid1D, p: &PeakonParams, out: &mut Outputs) -> Result<()> {
    let ens = PeakonEnsemble::new(p.q.clone(), p.p.clone())?;
    let (h0, m0) = (hamiltonian(&ens), momentum(&ens));
    let (end, log) = evolve_logged(&ens, p.dt, p.t_end, p.log_every)?;
    out.write("trajectory.csv", &log.to_csv())?;
    out.write("field_final.csv", &field_csv(&sample_field(&end, grid)?))?;
    for (i, (q, m)) in end.q().iter().zip(end.p()).enumerate() {
        out.metric(&format!("q{}_final", i + 1), *q);
        out.metric(&format!("p{}_final", i + 1), *m);
    }
    out.metric("drift_H", relative(hamiltonian(&end), h0));
    out.metric("drift_P", relative(momentum(&end), m0));
    Ok(())
}

fn relative(now: f64, then: f64) -> f64 {
    if then != 0.0 {
        ((now - then) / then).abs()
    } else {
        (now - then).abs()
    }
}

fn run_linear_sw(grid: Grid1D, p: &LinearSwParams, out: &mut Outputs) -> Result<()> {
    let f = p.right.field(grid)?;
    let g = match &p.left {
        Some(left) => left.field(grid)?,
        None => Field::zeros(grid),
    };
    let prof = SurfaceProfile::new(f, g, p.c0)?;
    let eta = evolve_dalembert(&prof, p.t_end)?;
    out.write("eta_final.csv", &field_csv(&eta))?;

    let z: Vec<f64> = (0..p.nz).map(|i| i as f64 / (p.nz - 1) as f64).collect();
    let snaps = [-1.0, 0.0, 1.0]
        .map(|s| limit_bundle(&prof, p.t_end + s * p.audit_dt, &z))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let report = audit_limit_system([&snaps[0], &snaps[1], &snaps[2]], 1.0)?;
    out.write("audit.json", &report.to_json())?;
    out.metric("max_residual", report.max_residual());

    // two half steps against one full step
    let spectral = Spectral::new(grid);
    let half = 0.5 * p.t_end;
    let mid = SurfaceProfile::new(
        spectral.translate(prof.f(), half)?,
        spectral.translate(prof.g_left(), -half)?,
        p.c0,
    )?;
    let composed = evolve_dalembert(&mid, half)?;
    out.metric("semigroup_gap", composed.linf_distance(&eta)?);
    Ok(())
}

fn run_variational(
    grid: Grid1D,
    p: &VariationalParams,
    rng: &mut ChaCha8Rng,
    out: &mut Outputs,
) -> Result<()> {
    let scale = 2.0 * std::f64::consts::PI / grid.length();
    let (alpha, beta) = (p.alpha, p.beta);
    let path = DiffeoPath::from_fn(grid, p.horizon, p.steps, |t, x| {
        x + alpha * (scale * x - t).sin() + beta * (2.0 * scale * x + t).cos()
    })?;
    let recipe = RandomPerturbationSpec::draw(p.modes, p.perturbation_amplitude, rng);
    let pert = recipe.sample(grid, p.horizon, p.steps)?;
    let lagrangian = match p.c0 {
        Some(c0) => Lagrangian::Elevation { c0 },
        None => Lagrangian::Velocity,
    };
    let report = verify_variational_identity(&path, &pert, p.eps, lagrangian)?;
    out.write("variation.json", &report.to_json())?;
    out.metric("D_fd", report.d_fd);
    out.metric("D_el", report.d_el);
    out.metric("D_mid", report.d_mid);
    out.metric("rel_gap", report.rel_gap);
    out.metric("eps_used", report.eps);
    Ok(())
}

fn run_scaling(grid: Grid1D, p: &ScalingDemoParams, out: &mut Outputs) -> Result<()> {
    let params = ScalingParams::new(p.h0, p.lambda, p.a, p.g, p.rho, p.p0)?;
    let z: Vec<f64> = (0..p.nz).map(|i| i as f64 / (p.nz - 1) as f64).collect();
    let f = Field::from_fn(grid, |x| (-x * x).exp())?;
    let limit = limit_bundle(&SurfaceProfile::right_moving(f, 0.0)?, 0.0, &z)?;
    let physical = from_long_wave(&limit, &params)?;
    let back = to_long_wave(
        &from_long_wave(&to_long_wave(&physical, &params)?, &params)?,
        &params,
    )?;
    let round_trip = from_long_wave(&back, &params)?.max_relative_gap(&physical)?;
    out.metric("eps", params.eps());
    out.metric("delta", params.delta());
    out.metric("round_trip", round_trip);
    out.write(
        "scaling.json",
        &serde_json::to_string_pretty(&serde_json::json!({
            "eps": params.eps(),
            "delta": params.delta(),
            "wave_speed": params.wave_speed(),
            "round_trip": round_trip,
        }))?,
    )?;
    Ok(())
}

fn run_cross_validation(grid: Grid1D, p: &CrossValidationParams, out: &mut Outputs) -> Result<()> {
    let ens = PeakonEnsemble::new(p.q.clone(), p.p.clone())?;
    let (ode, _) = evolve_logged(&ens, p.dt, p.t_end, usize::MAX)?;
    let ode_field = sample_field(&ode, grid)?;
    let solver = ChSolver::new(grid, ChParams::new(0.0, p.dt, p.t_end)?, p.form)?;
    let pde = solver.run(solver.prepare(mollified_field(&ens, grid)?)?, |_, _| Ok(()))?;
    out.write("ode_field.csv", &field_csv(&ode_field))?;
    out.write("pde_field.csv", &field_csv(&pde.u))?;
    out.metric("linf_gap", ode_field.linf_distance(&pde.u)?);
    Ok(())
}
