use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use grn_core::bundled;
use grn_core::dynamics::verify::{random_state, trial_rng};
use grn_core::dynamics::{
    detect_oscillation, integrate, verify_invariance, InvarianceReport, Integrator, OscillationReport, SimConfig,
    Trajectory, VectorField,
};
use grn_core::io::NetworkDocument;
use grn_core::lift::{
    build_mult_lift, build_sum_lift, enumerate_mult_lift_multiplicities, enumerate_sum_supports, LiftTemplate,
    SupportChoice, WeightFill,
};
use grn_core::synchrony::{
    detect_spurious, quotient, Decoupling, QuotientResult, RowProductConstraint, SynchronyChecker, Tolerance, Witness,
};
use grn_core::{GenePartition, GrnNetwork, ModelKind, NodeKind, RegulatoryFamily};
use serde::Serialize;
use serde_json::json;

use crate::args::{Cli, Command, FillKind, Format, GlobalArgs};
use crate::diag::{CliResult, Diagnostic};
use crate::output::{emit, emit_json, to_json};

pub fn dispatch(cli: &Cli) -> CliResult<()> {
    let g = &cli.global;
    if !(g.tolerance.is_finite() && g.tolerance >= 0.0) {
        return Err(Diagnostic::new("usage", format!("tolerance {} must be finite and nonnegative", g.tolerance))
            .at(json!({ "argument": "--tolerance" })));
    }
    let trajectory = matches!(cli.command, Command::Simulate { .. });
    if g.format == Some(Format::Csv) && !trajectory {
        return Err(Diagnostic::new("usage", "--format csv applies to trajectories only")
            .at(json!({ "argument": "--format" })));
    }
    match &cli.command {
        Command::Validate { network } => validate(g, network),
        Command::Synchrony {
            network,
            enumerate: _,
            partition,
        } => synchrony(g, network, partition.as_deref()),
        Command::Quotient { network, partition } => quotient_cmd(g, network, partition),
        Command::Lifts {
            quotient,
            sizes,
            enumerate_mults,
            fill,
            max_count,
        } => lifts(g, quotient, sizes, *enumerate_mults, *fill, *max_count),
        Command::Simulate {
            network,
            horizon,
            dt,
            init,
            integrator,
            stride,
        } => simulate(g, network, *horizon, *dt, init.as_deref(), integrator, *stride),
        Command::Verify {
            network,
            partition,
            trials,
            horizon,
            dt,
        } => verify(g, network, partition, *trials, *horizon, *dt),
        Command::Examples { list: _, show } => examples(g, show.as_deref()),
    }
}

struct Loaded {
    name: String,
    net: GrnNetwork,
}

/// Reads a network from a file, falling back to the bundled examples.
fn load(arg: &str) -> CliResult<Loaded> {
    let path = Path::new(arg);
    let text = if path.is_file() {
        fs::read_to_string(path).map_err(|e| Diagnostic::from(e).in_file(arg))?
    } else if let Some(source) = bundled::source(arg) {
        source.to_string()
    } else {
        return Err(Diagnostic::new(
            "not_found",
            format!("'{arg}' is neither a file nor a bundled example ({})", bundled::NAMES.join(", ")),
        )
        .at(json!({ "argument": arg })));
    };
    let doc: NetworkDocument = serde_json::from_str(&text).map_err(|e| Diagnostic::from(e).in_file(arg))?;
    let name = doc.name.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| arg.to_string())
    });
    let net = doc.into_network().map_err(|e| Diagnostic::from(e).in_file(arg))?;
    net.ensure_valid().map_err(|e| Diagnostic::from(e).in_file(arg))?;
    Ok(Loaded { name, net })
}

fn family(g: &GlobalArgs) -> CliResult<RegulatoryFamily> {
    RegulatoryFamily::parse(&g.regfamily).map_err(|e| Diagnostic::from(e).at(json!({ "argument": "--regfamily" })))
}

fn partition(text: &str, n: usize) -> CliResult<GenePartition> {
    GenePartition::parse(text, n).map_err(|e| Diagnostic::from(e).at(json!({ "argument": "--partition" })))
}

fn checker<'a>(g: &GlobalArgs, net: &'a GrnNetwork, family: &RegulatoryFamily) -> SynchronyChecker<'a> {
    SynchronyChecker::new(net)
        .with_tolerance(Tolerance::uniform(g.tolerance))
        .with_family(family)
}

/// Model caveats worth recording next to a result.
fn notes(net: &GrnNetwork, model: ModelKind, family: &RegulatoryFamily) -> Vec<String> {
    let mut out = Vec::new();
    if model.is_multiplicative() {
        for i in (0..net.n()).filter(|&i| !net.has_inputs(i)) {
            out.push(format!("gene {} has no inputs; its {model} drive is taken as 0", i + 1));
        }
    }
    if !family.is_hill_like() {
        out.push(format!(
            "{family} is not Hill-like; structural verdicts are candidates to be confirmed numerically"
        ));
    }
    out
}

fn one_based(class_map: &[usize]) -> Vec<usize> {
    class_map.iter().map(|k| k + 1).collect()
}

#[derive(Serialize)]
struct ValidateReport<'a> {
    network: &'a str,
    valid: bool,
    n: usize,
    dimension: NodeKind,
    model: ModelKind,
    regfamily: String,
    activation_edges: usize,
    repression_edges: usize,
    gene_equivalence: GenePartition,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
}

fn validate(g: &GlobalArgs, network: &str) -> CliResult<()> {
    let Loaded { name, net } = load(network)?;
    let family = family(g)?;
    VectorField::new(&net, g.model, &family).map_err(|e| Diagnostic::from(e).in_file(network))?;
    let count = |w: &grn_core::Matrix<f64>| w.as_slice().iter().filter(|&&x| x != 0.0).count();
    let report = ValidateReport {
        network: &name,
        valid: true,
        n: net.n(),
        dimension: net.node_kind().unwrap_or(NodeKind::Two),
        model: g.model,
        regfamily: family.to_string(),
        activation_edges: count(net.w_plus()),
        repression_edges: count(net.w_minus()),
        gene_equivalence: net.gene_equivalence_partition(),
        notes: notes(&net, g.model, &family),
    };
    match g.format {
        Some(Format::Text) => emit(
            g.out.as_deref(),
            &format!("{name}: valid ({} genes, {} model)\n", report.n, g.model),
        ),
        _ => emit_json(g.out.as_deref(), &report),
    }
}

#[derive(Serialize)]
struct QuotientOut {
    /// Gene to quotient gene, 1-based.
    class_map: Vec<usize>,
    network: NetworkDocument,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    weight_constraints: Vec<RowProductConstraint>,
}

impl QuotientOut {
    fn new(q: QuotientResult, name: &str) -> Self {
        Self {
            class_map: one_based(&q.class_map),
            network: NetworkDocument::from_network(&q.quotient, Some(&format!("{name}-quotient"))),
            weight_constraints: q.weight_constraints,
        }
    }
}

#[derive(Serialize)]
struct PartitionEntry {
    partition: String,
    classes: GenePartition,
    is_synchrony: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    decouplings: Vec<Decoupling>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quotient: Option<QuotientOut>,
}

#[derive(Serialize)]
struct SynchronyReport<'a> {
    network: &'a str,
    model: ModelKind,
    regfamily: String,
    tolerance: f64,
    theorem_guaranteed: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
    mode: &'static str,
    count: usize,
    verdicts: Vec<PartitionEntry>,
}

fn synchrony(g: &GlobalArgs, network: &str, requested: Option<&str>) -> CliResult<()> {
    let Loaded { name, net } = load(network)?;
    let family = family(g)?;
    let checker = checker(g, &net, &family);
    let (mode, partitions) = match requested {
        Some(text) => ("partition", vec![partition(text, net.n())?]),
        None => ("enumerate", checker.enumerate(g.model, grn_core::synchrony::DEFAULT_MAX_GENES)?),
    };
    let mut verdicts = Vec::with_capacity(partitions.len());
    for p in partitions {
        let verdict = checker.check(&p, g.model)?;
        let (quotient_out, decouplings) = if verdict.is_synchrony {
            let q = quotient(&checker, &p, g.model)?;
            let decouplings = if g.model == ModelKind::Sum {
                detect_spurious(&net, &p, &family)?.decouplings
            } else {
                Vec::new()
            };
            (Some(QuotientOut::new(q, &name)), decouplings)
        } else {
            (None, Vec::new())
        };
        verdicts.push(PartitionEntry {
            partition: p.to_string(),
            classes: p,
            is_synchrony: verdict.is_synchrony,
            witnesses: verdict.witnesses,
            decouplings,
            quotient: quotient_out,
        });
    }
    let report = SynchronyReport {
        network: &name,
        model: g.model,
        regfamily: family.to_string(),
        tolerance: g.tolerance,
        theorem_guaranteed: family.is_hill_like(),
        notes: notes(&net, g.model, &family),
        mode,
        count: verdicts.iter().filter(|v| v.is_synchrony).count(),
        verdicts,
    };
    match g.format {
        Some(Format::Text) => {
            let mut text = String::new();
            for v in &report.verdicts {
                if v.is_synchrony {
                    let _ = writeln!(text, "{}  synchrony", v.partition);
                } else {
                    let _ = writeln!(text, "{}  not synchrony", v.partition);
                    for w in &v.witnesses {
                        let _ = writeln!(text, "  {}", w.describe());
                    }
                }
                for d in &v.decouplings {
                    let _ = writeln!(
                        text,
                        "  decoupling: genes {:?} ignore class {:?} (constant drive {})",
                        d.target_genes, d.source_genes, d.drive
                    );
                }
            }
            emit(g.out.as_deref(), &text)
        }
        _ => emit_json(g.out.as_deref(), &report),
    }
}

#[derive(Serialize)]
struct QuotientReport {
    partition: String,
    model: ModelKind,
    #[serde(flatten)]
    quotient: QuotientOut,
}

#[derive(Serialize)]
struct ConstraintSidecar<'a> {
    partition: &'a str,
    model: ModelKind,
    class_map: &'a [usize],
    weight_constraints: &'a [RowProductConstraint],
}

fn quotient_cmd(g: &GlobalArgs, network: &str, text: &str) -> CliResult<()> {
    let Loaded { name, net } = load(network)?;
    let family = family(g)?;
    let p = partition(text, net.n())?;
    let q = quotient(&checker(g, &net, &family), &p, g.model)?;
    let report = QuotientReport {
        partition: p.to_string(),
        model: g.model,
        quotient: QuotientOut::new(q, &name),
    };
    match g.out.as_deref() {
        Some(path) => {
            emit_json(Some(path), &report.quotient.network)?;
            let sidecar = path.with_extension("constraints.json");
            emit_json(
                Some(&sidecar),
                &ConstraintSidecar {
                    partition: &report.partition,
                    model: g.model,
                    class_map: &report.quotient.class_map,
                    weight_constraints: &report.quotient.weight_constraints,
                },
            )
        }
        None if g.format == Some(Format::Text) => {
            let mut out = format!("quotient of {name} by {}\n", report.partition);
            for c in &report.quotient.weight_constraints {
                let _ = writeln!(out, "  row {}: product of weights = {}", c.row, c.product);
            }
            emit(None, &out)
        }
        None => emit_json(None, &report),
    }
}

#[derive(Serialize)]
struct LiftsReport<'a> {
    quotient: &'a str,
    model: ModelKind,
    sizes: &'a [usize],
    total: u128,
    template: &'static str,
    lifts: Vec<String>,
}

fn lifts(
    g: &GlobalArgs,
    source: &str,
    sizes: &[usize],
    enumerate: bool,
    fill: FillKind,
    max_count: u128,
) -> CliResult<()> {
    let dir = g
        .out
        .as_deref()
        .ok_or_else(|| Diagnostic::new("usage", "lifts writes a directory: pass --out <dir>").at(json!({ "argument": "--out" })))?;
    let Loaded { name, net: q } = load(source)?;
    if g.model == ModelKind::Prod {
        return Err(Diagnostic::new("usage", "lifts support the sum and mult models").at(json!({ "argument": "--model" })));
    }
    let template = LiftTemplate::new(&q, sizes, g.model)?;
    let fill = match fill {
        FillKind::Uniform => WeightFill::Uniform,
        FillKind::Random => WeightFill::Random,
    };
    let seed = |k: usize| g.seed.wrapping_add(k as u64);
    let (total, networks) = match (g.model, enumerate) {
        (ModelKind::Sum, false) => (1, vec![build_sum_lift(&q, sizes, &SupportChoice::Full, &fill, seed(0))?]),
        (ModelKind::Sum, true) => {
            let supports = enumerate_sum_supports(&q, sizes, max_count)?;
            let total = supports.count_total();
            let nets = supports
                .enumerate()
                .map(|(k, s)| build_sum_lift(&q, sizes, &SupportChoice::Explicit(s), &fill, seed(k)))
                .collect::<grn_core::Result<Vec<_>>>()?;
            (total, nets)
        }
        (_, false) => {
            let mut pairs = enumerate_mult_lift_multiplicities(&q, sizes, u128::MAX)?;
            let total = pairs.count_total();
            let first = pairs.next().ok_or_else(|| Diagnostic::new("size_cap", "no multiplicity pair"))?;
            (total, vec![build_mult_lift(&q, sizes, &first, &fill, seed(0))?])
        }
        (_, true) => {
            let pairs = enumerate_mult_lift_multiplicities(&q, sizes, max_count)?;
            let total = pairs.count_total();
            let nets = pairs
                .enumerate()
                .map(|(k, pair)| build_mult_lift(&q, sizes, &pair, &fill, seed(k)))
                .collect::<grn_core::Result<Vec<_>>>()?;
            (total, nets)
        }
    };
    fs::create_dir_all(dir).map_err(|e| Diagnostic::from(e).in_file(&dir.display().to_string()))?;
    let width = networks.len().to_string().len().max(3);
    let mut files = Vec::with_capacity(networks.len());
    for (k, lift) in networks.iter().enumerate() {
        let file = format!("lift-{:0width$}.json", k + 1);
        let doc = NetworkDocument::from_network(lift, Some(&format!("{name}-lift-{}", k + 1)));
        emit_json(Some(&dir.join(&file)), &doc)?;
        files.push(file);
    }
    emit_json(Some(&dir.join("template.json")), &template)?;
    let report = LiftsReport {
        quotient: &name,
        model: g.model,
        sizes,
        total,
        template: "template.json",
        lifts: files,
    };
    match g.format {
        Some(Format::Text) => emit(
            None,
            &format!("{} of {total} lifts written to {}\n", report.lifts.len(), dir.display()),
        ),
        _ => emit_json(None, &report),
    }
}

fn initial_state(spec: Option<&str>, seed: u64, genes: usize, dim: usize) -> CliResult<Vec<f64>> {
    let random = |seed: u64| random_state(genes, dim, &mut trial_rng(seed, 0));
    let Some(spec) = spec else {
        return Ok(random(seed));
    };
    if let Some(rest) = spec.strip_prefix("random") {
        return match rest.strip_prefix(':') {
            None if rest.is_empty() => Ok(random(seed)),
            Some(s) => s.parse().map(random).map_err(|_| {
                Diagnostic::new("usage", format!("invalid seed in --init '{spec}'")).at(json!({ "argument": "--init" }))
            }),
            None => Err(Diagnostic::new("usage", format!("unknown --init '{spec}'")).at(json!({ "argument": "--init" }))),
        };
    }
    let text = fs::read_to_string(spec).map_err(|e| Diagnostic::from(e).in_file(spec))?;
    let state: Vec<f64> = serde_json::from_str(&text).map_err(|e| Diagnostic::from(e).in_file(spec))?;
    if state.len() != genes * dim {
        return Err(Diagnostic::from(grn_core::GrnError::DimensionMismatch {
            expected: genes * dim,
            actual: state.len(),
        })
        .in_file(spec));
    }
    Ok(state)
}

#[derive(Serialize)]
struct GeneOscillation {
    gene: usize,
    #[serde(flatten)]
    report: OscillationReport,
}

#[derive(Serialize)]
struct SimulationReport<'a> {
    network: &'a str,
    model: ModelKind,
    regfamily: String,
    integrator: Integrator,
    dt: f64,
    horizon: f64,
    header: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_negative: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
    oscillation: Vec<GeneOscillation>,
    times: &'a [f64],
    states: &'a [Vec<f64>],
}

fn table(traj: &Trajectory, sep: char) -> String {
    let mut out = String::from("t");
    for h in traj.header() {
        out.push(sep);
        out.push_str(&h);
    }
    out.push('\n');
    for (t, state) in traj.times.iter().zip(&traj.states) {
        let _ = write!(out, "{t}");
        for x in state {
            let _ = write!(out, "{sep}{x}");
        }
        out.push('\n');
    }
    out
}

fn simulate(
    g: &GlobalArgs,
    network: &str,
    horizon: f64,
    dt: f64,
    init: Option<&str>,
    integrator: &str,
    stride: usize,
) -> CliResult<()> {
    let Loaded { name, net } = load(network)?;
    let family = family(g)?;
    let integrator: Integrator = integrator
        .parse()
        .map_err(|e: grn_core::GrnError| Diagnostic::from(e).at(json!({ "argument": "--integrator" })))?;
    let config = SimConfig::new(g.model, family.clone(), horizon)
        .with_dt(dt)
        .with_integrator(integrator)
        .with_record_stride(stride);
    config.validate()?;
    let x0 = initial_state(init, g.seed, net.n(), net.node_dim())?;
    let traj = integrate(&net, &config, &x0)?;
    match g.format.unwrap_or(Format::Csv) {
        Format::Csv => emit(g.out.as_deref(), &table(&traj, ',')),
        Format::Text => emit(g.out.as_deref(), &table(&traj, '\t')),
        Format::Json => {
            let report = SimulationReport {
                network: &name,
                model: g.model,
                regfamily: family.to_string(),
                integrator,
                dt,
                horizon,
                header: traj.header(),
                min_negative: traj.min_negative,
                notes: notes(&net, g.model, &family),
                oscillation: (0..net.n())
                    .map(|i| GeneOscillation {
                        gene: i + 1,
                        report: detect_oscillation(&traj, i, 0.5),
                    })
                    .collect(),
                times: &traj.times,
                states: &traj.states,
            };
            emit_json(g.out.as_deref(), &report)
        }
    }
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    network: &'a str,
    model: ModelKind,
    regfamily: String,
    horizon: f64,
    dt: f64,
    seed: u64,
    structural_synchrony: bool,
    #[serde(flatten)]
    report: InvarianceReport,
}

fn verify(g: &GlobalArgs, network: &str, text: &str, trials: usize, horizon: f64, dt: f64) -> CliResult<()> {
    let Loaded { name, net } = load(network)?;
    let family = family(g)?;
    let p = partition(text, net.n())?;
    let config = SimConfig::new(g.model, family.clone(), horizon).with_dt(dt);
    config.validate()?;
    let report = verify_invariance(&net, &p, &config, trials, g.seed)?;
    let out = VerifyReport {
        network: &name,
        model: g.model,
        regfamily: family.to_string(),
        horizon,
        dt,
        seed: g.seed,
        structural_synchrony: checker(g, &net, &family).holds(&p, g.model),
        report,
    };
    match g.format {
        Some(Format::Text) => emit(
            g.out.as_deref(),
            &format!(
                "{}: {} (max defect {:.3e} over {} trials)\n",
                p,
                to_json(&out.report.verdict)?.trim().trim_matches('"'),
                out.report.max_defect,
                out.report.trials
            ),
        ),
        _ => emit_json(g.out.as_deref(), &out),
    }
}

#[derive(Serialize)]
struct ExampleEntry {
    name: &'static str,
    n: usize,
    dimension: NodeKind,
    description: Option<String>,
}

fn examples(g: &GlobalArgs, show: Option<&str>) -> CliResult<()> {
    if let Some(name) = show {
        let source = bundled::source(name).ok_or_else(|| {
            Diagnostic::new("not_found", format!("unknown example '{name}'; known: {}", bundled::NAMES.join(", ")))
                .at(json!({ "argument": "--show" }))
        })?;
        return emit(g.out.as_deref(), source);
    }
    let entries = bundled::NAMES
        .iter()
        .map(|&name| {
            let doc = bundled::document(name)?;
            Ok(ExampleEntry {
                name,
                n: doc.n,
                dimension: doc.dimension,
                description: doc.description,
            })
        })
        .collect::<grn_core::Result<Vec<_>>>()?;
    match g.format {
        Some(Format::Text) => {
            let mut out = String::new();
            for e in &entries {
                let _ = writeln!(out, "{:<20} {}", e.name, e.description.as_deref().unwrap_or(""));
            }
            emit(g.out.as_deref(), &out)
        }
        _ => emit_json(g.out.as_deref(), &entries),
    }
}
