use crate::config::{Format, RunConfig};
use crate::output::{state_columns, state_row, write_json, write_text, Cell, Table, SCHEMA_VERSION};
use crate::LabError;
use noetherlab_core::analysis::{classify, max_jump};
use noetherlab_core::catalog::{catalog, CatalogObject};
use noetherlab_core::dynamics::{integrate, Chart, Dynamics, PhaseState, Trajectory};
use noetherlab_core::noether::{euler_residual, reconstruct_integral, sample_curve_points};
use noetherlab_core::sampling::{admissible, random_states};
use noetherlab_core::symmetry::{max_residual_2nd, Verdict};
use noetherlab_core::systems::{ReferencePoint, SystemDef, Valuedness};
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

const POLICY: ReferencePoint = ReferencePoint::OuterTurning;
/// Diagnostics run from the configured start and two neighbours whose
/// radial (or first) velocity differs by this much; `L` is unchanged.
const DIAGNOSE_SPREAD: f64 = 0.05;
const DEFAULT_CHECK_POINTS: usize = 100;
const DEFAULT_ENDPOINTS: usize = 20;
const DEFAULT_GENERATORS: [&str; 4] = ["Xhat_L", "Xhat_E", "Xhat_Theta", "Xhat_T"];

#[derive(Debug, Clone, Serialize)]
pub struct SystemInfo {
    pub kind: String,
    pub potential: Option<String>,
    pub parameters: BTreeMap<String, f64>,
}

fn system_info(cfg: &RunConfig) -> SystemInfo {
    SystemInfo { kind: cfg.system.kind.clone(), potential: cfg.system.potential.clone(), parameters: cfg.parameters() }
}

fn require_task(cfg: &RunConfig, tasks: &[&str], command: &str) -> Result<(), LabError> {
    if tasks.iter().any(|t| cfg.wants(t)) {
        Ok(())
    } else {
        Err(LabError::Config(format!("`tasks` has no entry for `{command}` (expected one of {})", tasks.join(", "))))
    }
}

fn run(cfg: &RunConfig, sys: &SystemDef, s0: &PhaseState) -> Result<Trajectory, LabError> {
    integrate(sys, s0, s0.t + cfg.horizon, &cfg.integrator_options()).map_err(LabError::runtime)
}

fn emit(cfg: &RunConfig, stem: &str, table: &Table) -> Result<(), LabError> {
    match cfg.output.format {
        Format::Csv => write_text(&cfg.output.dir, &format!("{stem}.csv"), &table.to_csv()),
        Format::Json => write_json(&cfg.output.dir, &format!("{stem}.json"), &table.to_json()),
    }
}

#[derive(Serialize)]
struct Stats {
    schema: u32,
    command: &'static str,
    system: SystemInfo,
    chart: &'static str,
    initial: [f64; 5],
    horizon: f64,
    steps: usize,
    rejected: usize,
    samples: usize,
    events: usize,
}

pub fn simulate(cfg: &RunConfig) -> Result<(), LabError> {
    require_task(cfg, &["simulate", "integrals"], "simulate")?;
    let sys = cfg.system()?;
    let s0 = cfg.initial_state()?;
    let traj = run(cfg, &sys, &s0)?.with_events(&sys, &sys.natural_events());
    let cols = state_columns(traj.chart);
    let mut header = vec!["t".to_string()];
    header.extend(cols.iter().map(|c| c.to_string()));

    let rows = traj.samples.iter().map(|s| state_row(s).iter().map(|x| Cell::Num(*x)).collect()).collect();
    emit(cfg, "samples", &Table { header: header.clone(), rows })?;

    let mut ev_header = vec!["t".to_string(), "kind".into(), "direction".into()];
    ev_header.extend(cols.iter().map(|c| c.to_string()));
    let rows = traj
        .events
        .iter()
        .map(|e| {
            let mut row = vec![Cell::Num(e.t), Cell::Text(e.kind.label().into()), Cell::Text(e.direction.to_string())];
            row.extend(state_row(&e.state)[1..].iter().map(|x| Cell::Num(*x)));
            row
        })
        .collect();
    emit(cfg, "events", &Table { header: ev_header, rows })?;

    if cfg.wants("integrals") {
        let integrals = sys.first_integrals(POLICY);
        let mut header = vec!["t".to_string()];
        header.extend(integrals.iter().map(|i| i.name.clone()));
        let rows = traj
            .samples
            .iter()
            .map(|s| {
                let mut row = vec![Cell::Num(s.t)];
                row.extend(integrals.iter().map(|i| i.value(s).map_or(Cell::Missing, Cell::Num)));
                row
            })
            .collect();
        emit(cfg, "integrals", &Table { header, rows })?;
    }

    let stats = Stats {
        schema: SCHEMA_VERSION,
        command: "simulate",
        system: system_info(cfg),
        chart: if traj.chart == Chart::Polar { "polar" } else { "cartesian" },
        initial: state_row(&s0),
        horizon: cfg.horizon,
        steps: traj.stats.steps,
        rejected: traj.stats.rejected,
        samples: traj.samples.len(),
        events: traj.events.len(),
    };
    write_json(&cfg.output.dir, "stats.json", &stats)
}

#[derive(Debug, Clone, Serialize)]
pub struct JumpRecord {
    t: f64,
    kind: &'static str,
    magnitude: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegralReport {
    name: String,
    time_explicit: bool,
    valuedness: &'static str,
    drift: f64,
    max_jump: f64,
    jumps: Vec<JumpRecord>,
    apsidal_angle: Option<f64>,
    /// Absent for time-explicit integrals, whose jumps are a whole period.
    classification: Option<&'static str>,
    evaluation_failures: usize,
    singular_events: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    schema: u32,
    command: &'static str,
    system: SystemInfo,
    horizon: f64,
    starts: Vec<[f64; 5]>,
    commensurate: Option<[u64; 2]>,
    integrals: Vec<IntegralReport>,
}

fn valuedness_label(v: Valuedness) -> &'static str {
    match v {
        Valuedness::SingleValued => "real",
        Valuedness::ModPi => "mod_pi",
        Valuedness::Mod2Pi => "mod_2pi",
    }
}

fn diagnostic_starts(s0: &PhaseState) -> [PhaseState; 3] {
    let nudge = |d: f64| {
        let mut s = *s0;
        s.v[0] += d;
        s
    };
    [*s0, nudge(-DIAGNOSE_SPREAD), nudge(DIAGNOSE_SPREAD)]
}

pub fn diagnose_report(cfg: &RunConfig) -> Result<Report, LabError> {
    let sys = cfg.system()?;
    let starts = diagnostic_starts(&cfg.initial_state()?);
    let runs = starts.iter().map(|s| run(cfg, &sys, s)).collect::<Result<Vec<_>, _>>()?;
    let mut commensurate = None;
    let integrals = sys
        .first_integrals(POLICY)
        .iter()
        .map(|i| {
            let r = classify(&sys, i, &runs);
            commensurate = r.commensurate.map(|(p, q)| [p, q]);
            IntegralReport {
                name: r.integral.clone(),
                time_explicit: i.time_explicit,
                valuedness: valuedness_label(i.valuedness),
                drift: r.drift,
                max_jump: max_jump(&r),
                jumps: r.jumps.iter().map(|j| JumpRecord { t: j.event.t, kind: j.event.kind.label(), magnitude: j.magnitude }).collect(),
                apsidal_angle: r.apsidal_angle,
                classification: (!i.time_explicit).then(|| r.classification.label()),
                evaluation_failures: r.evaluation_failures,
                singular_events: r.singular_events,
            }
        })
        .collect();
    Ok(Report {
        schema: SCHEMA_VERSION,
        command: "diagnose",
        system: system_info(cfg),
        horizon: cfg.horizon,
        starts: starts.iter().map(state_row).collect(),
        commensurate,
        integrals,
    })
}

pub fn diagnose(cfg: &RunConfig) -> Result<(), LabError> {
    require_task(cfg, &["diagnose"], "diagnose")?;
    let report = diagnose_report(cfg)?;
    write_json(&cfg.output.dir, "report.json", &report)
}

#[derive(Serialize)]
struct CheckRecord {
    name: String,
    kind: &'static str,
    test: &'static str,
    residual: f64,
    verdict: &'static str,
    /// Whether the catalog expects this entry to pass for these parameters.
    expected_pass: bool,
}

#[derive(Serialize)]
struct Checks {
    schema: u32,
    command: &'static str,
    system: SystemInfo,
    seed: u64,
    points: usize,
    entries: Vec<CheckRecord>,
}

pub fn check(cfg: &RunConfig) -> Result<(), LabError> {
    require_task(cfg, &["check-symmetry", "check-multiplier"], "check")?;
    if cfg.check.entries.is_empty() {
        return Err(LabError::Config("`check.entries` is empty".into()));
    }
    let sys = cfg.system()?;
    let all = catalog(&sys, POLICY);
    let mut chosen = Vec::new();
    for name in &cfg.check.entries {
        let entry = all.iter().find(|e| &e.name == name).ok_or_else(|| {
            let known: Vec<&str> = all.iter().map(|e| e.name.as_str()).collect();
            LabError::Config(format!("unknown catalog entry `{name}` for {} (known: {})", sys.label(), known.join(", ")))
        })?;
        let task = match entry.object {
            CatalogObject::Generator(_) => "check-symmetry",
            CatalogObject::Multiplier(_) => "check-multiplier",
        };
        if !cfg.wants(task) {
            return Err(LabError::Config(format!("entry `{name}` needs task `{task}`")));
        }
        chosen.push(entry);
    }
    let n = cfg.check.points.unwrap_or(DEFAULT_CHECK_POINTS);
    let states = random_states(&sys, cfg.seed, n);
    let curve_points = sample_curve_points(sys.chart(), cfg.seed, n, &|s| admissible(&sys, s));
    let mut entries = Vec::new();
    for e in chosen {
        let (kind, test, residual) = match &e.object {
            CatalogObject::Generator(g) => ("generator", "determining_residual_2nd", max_residual_2nd(g, &sys, &states)),
            CatalogObject::Multiplier(m) => ("multiplier", "euler_residual", euler_residual(m, &sys, &curve_points)),
        };
        let residual = residual.map_err(|err| LabError::Runtime(format!("{}: {err}", e.name)))?;
        entries.push(CheckRecord {
            name: e.name.clone(),
            kind,
            test,
            residual,
            verdict: Verdict::of(residual).label(),
            expected_pass: e.expected,
        });
    }
    let out = Checks { schema: SCHEMA_VERSION, command: "check", system: system_info(cfg), seed: cfg.seed, points: n, entries };
    write_json(&cfg.output.dir, "checks.json", &out)
}

#[derive(Serialize)]
struct EndpointRecord {
    endpoint: [f64; 5],
    reconstructed: Option<f64>,
    closed_form: Option<f64>,
    error: Option<String>,
}

#[derive(Serialize)]
struct GeneratorRecord {
    name: String,
    integral: Option<String>,
    /// Spread of `reconstructed − (closed_form − closed_form(basepoint))`,
    /// taken modulo the integral's period.
    offset_spread: Option<f64>,
    endpoints: Vec<EndpointRecord>,
}

#[derive(Serialize)]
struct Reconstruction {
    schema: u32,
    command: &'static str,
    system: SystemInfo,
    seed: u64,
    basepoint: [f64; 5],
    generators: Vec<GeneratorRecord>,
}

/// Endpoints on the basepoint's sheet: the signs of both velocities agree,
/// so multivalued integrals stay on one branch along the straight path.
fn sheet_endpoints(sys: &SystemDef, base: &PhaseState, seed: u64, n: usize) -> Vec<PhaseState> {
    let same = |a: f64, b: f64| (a > 0.0) == (b > 0.0);
    random_states(sys, seed, 50 * n)
        .into_iter()
        .filter(|s| sys.chart() == Chart::Cartesian || (same(s.v[0], base.v[0]) && same(s.v[1], base.v[1])))
        .map(|s| PhaseState { t: base.t, ..s })
        .take(n)
        .collect()
}

pub fn reconstruct(cfg: &RunConfig) -> Result<(), LabError> {
    require_task(cfg, &["reconstruct"], "reconstruct")?;
    let sys = cfg.system()?;
    let base = cfg.initial_state()?;
    let names: Vec<String> = if cfg.reconstruct.generators.is_empty() {
        DEFAULT_GENERATORS.iter().map(|s| s.to_string()).collect()
    } else {
        cfg.reconstruct.generators.clone()
    };
    let all = catalog(&sys, POLICY);
    let integrals = sys.first_integrals(POLICY);
    let ends = sheet_endpoints(&sys, &base, cfg.seed, cfg.reconstruct.endpoints.unwrap_or(DEFAULT_ENDPOINTS));
    let mut generators = Vec::new();
    for name in &names {
        let g = match all.iter().find(|e| &e.name == name).map(|e| &e.object) {
            Some(CatalogObject::Generator(g)) => g,
            Some(CatalogObject::Multiplier(_)) => return Err(LabError::Config(format!("`{name}` is a multiplier, not a generator"))),
            None => return Err(LabError::Config(format!("unknown catalog entry `{name}` for {}", sys.label()))),
        };
        let integral = integrals.iter().find(|i| Some(i.name.as_str()) == name.strip_prefix("Xhat_"));
        let i0 = integral.and_then(|i| i.value(&base).ok());
        let mut offsets = Vec::new();
        let endpoints = ends
            .iter()
            .map(|e| {
                let rec = reconstruct_integral(g, &sys, e, &base);
                let closed = integral.and_then(|i| i.value(e).ok());
                if let (Ok(r), Some(c), Some(c0), Some(i)) = (&rec, closed, i0, integral) {
                    offsets.push((r - i.valuedness.difference(c, c0), i.valuedness));
                }
                EndpointRecord {
                    endpoint: state_row(e),
                    reconstructed: rec.as_ref().ok().copied(),
                    closed_form: closed,
                    error: rec.err().map(|err| err.to_string()),
                }
            })
            .collect();
        let offset_spread = offsets.first().map(|&(first, v)| offsets.iter().map(|(o, _)| v.difference(*o, first).abs()).fold(0.0, f64::max));
        generators.push(GeneratorRecord { name: name.clone(), integral: integral.map(|i| i.name.clone()), offset_spread, endpoints });
    }
    let out = Reconstruction { schema: SCHEMA_VERSION, command: "reconstruct", system: system_info(cfg), seed: cfg.seed, basepoint: state_row(&base), generators };
    write_json(&cfg.output.dir, "reconstruct.json", &out)
}

#[derive(Serialize)]
struct SweepPoint {
    value: f64,
    report: Option<Report>,
    error: Option<String>,
}

#[derive(Serialize)]
struct Sweep {
    schema: u32,
    command: &'static str,
    parameter: String,
    points: Vec<SweepPoint>,
}

/// Diagnose once per parameter value on a pool of scoped worker threads.
/// Each worker owns its configuration copy; results keep the input order.
pub fn sweep(cfg: &RunConfig) -> Result<(), LabError> {
    require_task(cfg, &["diagnose"], "sweep")?;
    let spec = cfg.sweep.clone().ok_or_else(|| LabError::Config("missing `[sweep]` table".into()))?;
    let configs = spec.values.iter().map(|&v| cfg.with_parameter(&spec.parameter, v)).collect::<Result<Vec<_>, _>>()?;
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(configs.len());
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<Report, LabError>>>> = Mutex::new(vec![None; configs.len()]);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(c) = configs.get(k) else { break };
                let r = diagnose_report(c);
                results.lock().unwrap()[k] = Some(r);
            });
        }
    });
    let points = spec
        .values
        .iter()
        .zip(results.into_inner().unwrap())
        .map(|(&value, r)| match r.expect("every index is claimed by a worker") {
            Ok(report) => SweepPoint { value, report: Some(report), error: None },
            Err(e) => SweepPoint { value, report: None, error: Some(e.to_string()) },
        })
        .collect();
    let out = Sweep { schema: SCHEMA_VERSION, command: "sweep", parameter: spec.parameter, points };
    write_json(&cfg.output.dir, "sweep.json", &out)
}
