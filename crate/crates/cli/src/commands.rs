use std::path::Path;

use qmetro::battery::{qfi_battery, BatteryConfig, PropertyResult};
use qmetro::fisher::{self, QfiResult};
use qmetro::metrology::{self, apply_noise, crb_consistency, CrbReport, ErrorPropagation, NoiseChannel, Scenario};
use qmetro::numerics::trace_product;
use qmetro::states;
use qmetro::witness::{self, AvgQfiReport, DepthCertificate, WitnessReport};
use qmetro::{random, Axis, QuantumState, Representation, SqueezingSpec};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::output::emit_json;
use crate::statefile::{read_state, write_state, Kind, RepName};
use crate::{
    QfiArgs, RepArg, ScenarioArgs, ScenarioId, SelftestArgs, StateArgs, StateKind, WitnessArgs,
};

/// Relative slack for the inequalities checked before a report is accepted.
const CHECK_TOL: f64 = 1e-9;

fn representation(rep: RepArg, n: usize) -> Representation {
    match rep {
        RepArg::Full => Representation::Full(n),
        RepArg::Symmetric => Representation::Symmetric(n),
    }
}

fn parse_axis(s: &str) -> CliResult<Axis> {
    s.parse::<Axis>().map_err(|e| CliError::usage(e.to_string()))
}

pub fn build_state(a: &StateArgs) -> CliResult<QuantumState> {
    let default_rep = if a.kind == StateKind::Singlet { RepArg::Full } else { RepArg::Symmetric };
    let rep = representation(a.rep.unwrap_or(default_rep), a.n);
    let state = match a.kind {
        StateKind::Polarized => states::polarized(a.n, parse_axis(&a.axis)?, rep)?,
        StateKind::Coherent => states::coherent(a.n, a.polar, a.azimuth, rep)?,
        StateKind::Ghz => states::ghz(a.n, parse_axis(&a.axis)?, rep)?,
        StateKind::Dicke => {
            let m = a.m.ok_or_else(|| CliError::usage("dicke states need -m"))?;
            states::dicke(a.n, m, rep)?
        }
        StateKind::Singlet => {
            if !rep.is_full() {
                return Err(CliError::usage("the singlet has no symmetric component; use --rep full"));
            }
            states::singlet_pi(a.n)?
        }
        StateKind::Squeezed => {
            let lambda = a.lambda.ok_or_else(|| CliError::usage("squeezed states need --lambda"))?;
            let gs = states::squeezed_ground_state(SqueezingSpec::new(a.n, lambda)?)?.state;
            if rep.is_full() {
                gs.to_full()?
            } else {
                gs
            }
        }
        StateKind::Mixed => states::maximally_mixed(rep)?,
        StateKind::Random => {
            let mut rng = random::rng(a.seed);
            let label = format!("random(seed={})", a.seed);
            if a.rank == 0 {
                rep.check_vector()?;
                QuantumState::pure(rep, random::pure_state(rep.dim(), &mut rng), label)?
            } else {
                rep.check_density()?;
                QuantumState::density(rep, random::density(rep.dim(), a.rank, &mut rng), label)?
            }
        }
    };
    match a.noise.0 {
        Some(channel) => Ok(apply_noise(&state, &channel)?),
        None => Ok(state),
    }
}

pub fn state(a: &StateArgs) -> CliResult<()> {
    write_state(&build_state(a)?, a.out.as_deref())
}

#[derive(Debug, Serialize)]
struct InputEcho {
    state: String,
    label: String,
    representation: RepName,
    n_qubits: usize,
    kind: Kind,
}

impl InputEcho {
    fn new(path: &Path, state: &QuantumState) -> Self {
        let representation = if state.rep().is_full() { RepName::Full } else { RepName::Symmetric };
        InputEcho {
            state: path.display().to_string(),
            label: state.label().into(),
            representation,
            n_qubits: state.n(),
            kind: if state.is_pure() { Kind::Pure } else { Kind::Density },
        }
    }
}

#[derive(Debug, Serialize)]
struct SldReport {
    /// `Tr(ϱL²)`, equal to the Fisher information.
    trace_rho_l2: f64,
    matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Serialize)]
struct SkewSandwich {
    skew_information: f64,
    /// `4I ≤ F_Q ≤ 4Var`.
    lower: f64,
    qfi: f64,
    upper: f64,
    holds: bool,
}

#[derive(Debug, Serialize)]
struct QfiReport {
    command: &'static str,
    input: InputEcho,
    generator: String,
    qfi: QfiResult,
    four_variance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    chi_squared: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    depth_certificate: Option<DepthCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sld: Option<SldReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wigner_yanase: Option<SkewSandwich>,
    #[serde(skip_serializing_if = "Option::is_none")]
    zeno_time: Option<f64>,
}

fn slack(x: f64) -> f64 {
    CHECK_TOL * x.abs().max(1.0)
}

pub fn qfi(a: &QfiArgs) -> CliResult<()> {
    let state = read_state(&a.state)?;
    let op = a.generator.build(state.rep())?;
    let q = fisher::qfi(&state, &op)?;
    let four_var = 4.0 * state.variance(&op);
    let mut problems = Vec::new();
    if q.value > four_var + slack(four_var) {
        problems.push(format!("F_Q = {} exceeds 4Var = {four_var}", q.value));
    }
    let n = state.n();
    let (chi_squared, depth_certificate) = if a.generator.is_collective() {
        let chi = if q.value > 0.0 { n as f64 / q.value } else { f64::INFINITY };
        match witness::depth_certificate(q.value, n) {
            Ok(c) => (Some(chi), Some(c)),
            Err(e) => {
                problems.push(e.to_string());
                (Some(chi), None)
            }
        }
    } else {
        (None, None)
    };
    let sld = if a.sld {
        let l = fisher::sld(&state, &op)?;
        let l2 = &l * &l;
        let trace = trace_product(&state.density_matrix(), &l2).re;
        if (trace - q.value).abs() > 1e-8 * q.value.abs().max(1.0) {
            problems.push(format!("Tr(rho L^2) = {trace} differs from F_Q = {}", q.value));
        }
        let matrix = (0..l.nrows()).map(|r| (0..l.ncols()).map(|c| [l[(r, c)].re, l[(r, c)].im]).collect()).collect();
        Some(SldReport { trace_rho_l2: trace, matrix })
    } else {
        None
    };
    let wigner_yanase = if a.wy {
        let i = fisher::wigner_yanase(&state, &op)?;
        let holds = 4.0 * i <= q.value + slack(q.value) && q.value <= four_var + slack(four_var);
        if !holds {
            problems.push(format!("4I = {} <= F_Q = {} <= 4Var = {four_var} fails", 4.0 * i, q.value));
        }
        Some(SkewSandwich { skew_information: i, lower: 4.0 * i, qfi: q.value, upper: four_var, holds })
    } else {
        None
    };
    let zeno_time = a.zeno.then(|| fisher::zeno_time_from_qfi(q.value));
    let report = QfiReport {
        command: "qfi",
        input: InputEcho::new(&a.state, &state),
        generator: op.provenance().to_string(),
        qfi: q,
        four_variance: four_var,
        chi_squared,
        depth_certificate,
        sld,
        wigner_yanase,
        zeno_time,
    };
    emit_json(a.out.as_deref(), &report)?;
    match problems.into_iter().next() {
        Some(p) => Err(CliError::Invariant(p)),
        None => Ok(()),
    }
}

#[derive(Debug, Serialize)]
struct WitnessFile {
    command: &'static str,
    input: InputEcho,
    witnesses: Vec<WitnessReport>,
    violated: Vec<String>,
    /// From the largest single-axis Fisher information.
    depth_certificate: DepthCertificate,
    avg_qfi: AvgQfiReport,
}

pub const WITNESS_IDS: [&str; 9] =
    ["xi_s", "xi_os", "xi_singlet", "ossi_a", "ossi_b", "ossi_c", "ossi_d", "qfi_separable", "avg_qfi_separable"];

pub fn witness(a: &WitnessArgs) -> CliResult<()> {
    for c in &a.criteria {
        if !WITNESS_IDS.contains(&c.as_str()) {
            return Err(CliError::usage(format!("unknown criterion '{c}', known: {}", WITNESS_IDS.join(", "))));
        }
    }
    let state = read_state(&a.state)?;
    let all = witness::all_witnesses(&state)?;
    let fq_max = all
        .iter()
        .find(|w| w.id == "qfi_separable")
        .and_then(|w| w.value)
        .expect("all_witnesses reports the Fisher-information criterion");
    let depth_certificate = witness::depth_certificate(fq_max, state.n()).map_err(|e| CliError::Invariant(e.to_string()))?;
    let witnesses: Vec<WitnessReport> =
        if a.criteria.is_empty() { all } else { all.into_iter().filter(|w| a.criteria.contains(&w.id)).collect() };
    let violated = witnesses.iter().filter(|w| w.verdict.is_violated()).map(|w| w.id.clone()).collect();
    let report = WitnessFile {
        command: "witness",
        input: InputEcho::new(&a.state, &state),
        witnesses,
        violated,
        depth_certificate,
        avg_qfi: witness::avg_qfi(&state)?,
    };
    emit_json(a.out.as_deref(), &report)
}

#[derive(Debug, Serialize)]
struct ScenarioReport {
    command: &'static str,
    scenario: String,
    n: usize,
    representation: String,
    theta0: f64,
    noise: Option<NoiseChannel>,
    generator: String,
    observable: String,
    error_propagation: ErrorPropagation,
    precision_inv: f64,
    shot_noise: f64,
    heisenberg: f64,
    crb: CrbReport,
    /// For the gradient scheme: the same probe under the homogeneous field.
    #[serde(skip_serializing_if = "Option::is_none")]
    homogeneous: Option<ErrorPropagation>,
}

fn build_scenario(a: &ScenarioArgs) -> CliResult<Scenario> {
    let rep = if a.noise.0.is_some() { Representation::Full(a.n) } else { representation(a.rep, a.n) };
    if let Some(path) = &a.probe {
        if a.id != ScenarioId::Ramsey {
            return Err(CliError::usage("--probe is only supported for the ramsey scenario"));
        }
        return Ok(Scenario::ramsey_with(read_state(path)?)?);
    }
    let s = match a.id {
        ScenarioId::Ramsey => Scenario::ramsey(a.n, rep)?,
        ScenarioId::GhzParity => Scenario::ghz_parity(a.n, rep)?,
        ScenarioId::Dicke => Scenario::dicke(a.n, rep)?,
        ScenarioId::Squeezed => {
            let gs = states::squeezed_ground_state(SqueezingSpec::new(a.n, a.lambda)?)?.state;
            let probe = if rep.is_full() { gs.to_full()? } else { gs };
            let mut s = Scenario::ramsey_with(probe)?;
            s.id = "squeezed".into();
            s
        }
        ScenarioId::Gradient => Scenario::gradient(a.n)?,
    };
    match a.noise.0 {
        Some(channel) => Ok(s.with_probe(apply_noise(&s.probe, &channel)?)?),
        None => Ok(s),
    }
}

pub fn scenario(a: &ScenarioArgs) -> CliResult<()> {
    let s = build_scenario(a)?.at(a.theta0);
    let e = metrology::error_propagation(&s)?;
    let crb = crb_consistency(&s)?;
    let nf = s.n() as f64;
    let homogeneous = if a.id == ScenarioId::Gradient && a.probe.is_none() && a.noise.0.is_none() {
        Some(metrology::gradient_scenario(s.n(), a.theta0)?.homogeneous)
    } else {
        None
    };
    let mut problems = Vec::new();
    if !crb.holds {
        problems.push(format!("(dtheta)^2 = {:?} below 1/F_Q = {}", crb.delta_theta_sq, crb.bound));
    }
    if a.id != ScenarioId::Gradient && e.precision_inv() > nf * nf + 1e-6 {
        problems.push(format!("precision {} above N^2 = {}", e.precision_inv(), nf * nf));
    }
    let report = ScenarioReport {
        command: "scenario",
        scenario: s.id.clone(),
        n: s.n(),
        representation: s.rep().to_string(),
        theta0: s.theta0,
        noise: a.noise.0,
        generator: s.generator.provenance().to_string(),
        observable: s.observable.provenance().to_string(),
        error_propagation: e,
        precision_inv: e.precision_inv(),
        shot_noise: nf,
        heisenberg: nf * nf,
        crb,
        homogeneous,
    };
    emit_json(a.out.as_deref(), &report)?;
    match problems.into_iter().next() {
        Some(p) => Err(CliError::Invariant(p)),
        None => Ok(()),
    }
}

#[derive(Debug, Serialize)]
struct SelftestReport {
    command: &'static str,
    config: BatteryConfig,
    properties: Vec<PropertyResult>,
    passed: bool,
}

pub fn selftest(a: &SelftestArgs) -> CliResult<()> {
    if a.samples == 0 {
        return Err(CliError::usage("--samples must be positive"));
    }
    let config = BatteryConfig { samples: a.samples, seed: a.seed };
    let properties = qfi_battery(&config)?;
    let passed = properties.iter().all(PropertyResult::passed);
    for p in &properties {
        eprintln!(
            "{} {:<9} {} failures / {} samples, worst {:.3e} (tol {:.0e})",
            if p.passed() { "PASS" } else { "FAIL" },
            p.id,
            p.failures,
            p.samples,
            p.worst,
            p.tolerance
        );
    }
    let first_failure = properties.iter().find(|p| !p.passed()).map(|p| format!("property '{}': {}", p.id, p.description));
    emit_json(a.out.as_deref(), &SelftestReport { command: "selftest", config, properties, passed })?;
    match first_failure {
        Some(f) => Err(CliError::Invariant(f)),
        None => Ok(()),
    }
}

