mod report;
mod svg;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use poisson_lab::foliation::{trace_leaf, Leg};
use poisson_lab::gallery::{self, EntryKind};
use poisson_lab::submersion::SubmersionSpec;
use poisson_lab::{
    classify, identity_suite, load_structure, submersion_report, CheckId, ClassifyOptions, DefectReport, Error,
    Expect, LoadOptions, Status, Structure,
};
use serde::Serialize;

use report::{Conventions, ExpectationRow, ReportDocument};

const EXIT_LOAD: u8 = 2;
const EXIT_CHECK: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(name = "poisson-lab", version, about = "Classify Riemann–Poisson and Kähler–Poisson structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the classification checks on a structure.
    Check(CheckArgs),
    /// Trace a path inside a symplectic leaf.
    Leaf(LeafArgs),
    /// Check a submersion between two structures.
    Submersion(SubmersionArgs),
    /// Run the identity suite on a structure.
    Identities(IdentityArgs),
    /// List gallery entries.
    List,
    /// Show a gallery entry and its expected checks.
    Describe { id: String },
    /// Print the source text of a gallery entry.
    Export {
        id: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, env = "POISSON_LAB_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Omit wall-clock fields so output is byte-identical across runs.
    #[arg(long)]
    reproducible: bool,
}

#[derive(Args)]
struct CheckArgs {
    /// Gallery id or path to a structure file.
    structure: String,
    /// Comma-separated subset of checks.
    #[arg(long, value_delimiter = ',')]
    checks: Vec<String>,
    #[arg(long)]
    allow_non_poisson: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct IdentityArgs {
    structure: String,
    #[arg(long)]
    allow_non_poisson: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SubmersionArgs {
    /// Gallery id or path to a submersion file.
    spec: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct LeafArgs {
    structure: String,
    /// Starting point, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    start: Vec<f64>,
    /// Coordinate whose Hamiltonian field is followed for `--t`.
    #[arg(long, requires = "t", conflicts_with = "schedule")]
    ham: Option<String>,
    #[arg(long)]
    t: Option<f64>,
    /// Legs `coord:duration`, comma separated, followed in order.
    #[arg(long, value_delimiter = ',')]
    schedule: Vec<String>,
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Coordinate plane for the SVG, e.g. `y,z`; defaults to the two
    /// coordinates that vary most along the path.
    #[arg(long, value_delimiter = ',')]
    plane: Vec<String>,
    #[arg(long)]
    allow_non_poisson: bool,
}

enum Failure {
    Load(String),
    Check,
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::Format { .. }
            | Error::Validation { .. }
            | Error::UnknownEntry(_)
            | Error::SingularG { .. }
            | Error::DimensionMismatch { .. }
            | Error::RankDeficient { .. }
            | Error::NotClosed { .. }
            | Error::DegenerateCosymplectic => Failure::Load(e.to_string()),
            other => Failure::Internal(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn internal(e: impl std::fmt::Display) -> Failure {
    Failure::Internal(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(a) => cmd_check(a),
        Command::Leaf(a) => cmd_leaf(a),
        Command::Submersion(a) => cmd_submersion(a),
        Command::Identities(a) => cmd_identities(a),
        Command::List => cmd_list(),
        Command::Describe { id } => cmd_describe(&id),
        Command::Export { id, out } => cmd_export(&id, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(EXIT_CHECK),
        Err(Failure::Load(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_LOAD)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}

/// A structure from a file path or the gallery, validated under `opts`.
fn resolve_structure(arg: &str, opts: LoadOptions) -> Result<(Structure, Option<gallery::GalleryEntry>), Failure> {
    if Path::new(arg).is_file() {
        let text = std::fs::read_to_string(arg).map_err(|e| Failure::Load(format!("{arg}: {e}")))?;
        return Ok((load_structure(&text, opts)?, None));
    }
    let entry = gallery::get(arg)?;
    match &entry.kind {
        EntryKind::Structure(s) => {
            s.validate(opts)?;
            Ok((s.clone(), Some(entry)))
        }
        EntryKind::Submersion(_) => Err(Failure::Load(format!("`{arg}` is a submersion; use the submersion command"))),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Outcome {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| internal(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(internal)
        }
    }
}

fn document<R: Serialize>(
    target: &str,
    common: &Common,
    reports: Vec<R>,
    expectations: Vec<ExpectationRow>,
    started: Instant,
) -> ReportDocument<R> {
    ReportDocument {
        tool: "poisson-lab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command_line: std::env::args().skip(1).collect(),
        target: target.into(),
        seed: common.seed,
        samples: common.samples,
        tolerance: common.tol,
        conventions: Conventions::default(),
        reports,
        expectations,
        wall_time_s: (!common.reproducible).then(|| started.elapsed().as_secs_f64()),
    }
}

fn fmt_defect(v: Option<f64>) -> String {
    v.map_or("-".into(), |x| format!("{x:.3e}"))
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Skipped => "skipped",
    }
}

fn cmd_check(a: CheckArgs) -> Outcome {
    let started = Instant::now();
    let opts = LoadOptions { allow_non_poisson: a.allow_non_poisson };
    let (s, entry) = resolve_structure(&a.structure, opts)?;
    let selected: Vec<CheckId> = if a.checks.is_empty() {
        CheckId::ALL.to_vec()
    } else {
        a.checks
            .iter()
            .map(|n| CheckId::from_name(n.trim()).ok_or_else(|| Failure::Load(format!("unknown check `{n}`"))))
            .collect::<Result<_, _>>()?
    };
    let copts = ClassifyOptions { samples: a.common.samples, seed: a.common.seed, tol: a.common.tol, ..Default::default() };
    let mut report: DefectReport = classify(&s, &copts)?;
    report.checks.retain(|c| selected.contains(&c.id));

    let expect = |id: CheckId| entry.as_ref().and_then(|e| e.expectation(id));
    let expectations: Vec<ExpectationRow> = report
        .checks
        .iter()
        .filter_map(|c| {
            let e = expect(c.id)?;
            let matches = match (e, c.status) {
                (Expect::Measure, _) | (_, Status::Skipped) => None,
                (Expect::Pass, st) => Some(st == Status::Pass),
                (Expect::Fail, st) => Some(st == Status::Fail),
            };
            Some(ExpectationRow {
                check: c.id.name().into(),
                expected: format!("{e:?}").to_lowercase(),
                status: status_name(c.status).into(),
                matches,
            })
        })
        .collect();
    let failed = report
        .checks
        .iter()
        .any(|c| c.status == Status::Fail && expect(c.id) != Some(Expect::Measure));

    let text = match a.common.format {
        Format::Json => {
            let doc = document(&a.structure, &a.common, vec![report], expectations, started);
            serde_json::to_string_pretty(&doc).map_err(internal)? + "\n"
        }
        Format::Text => {
            let mut t = format!(
                "{}  rank {}  points {}  (rank-skipped {}, errors {})\n",
                report.structure, report.rank, report.points, report.rank_skipped, report.error_points
            );
            for c in &report.checks {
                let tag = match expect(c.id) {
                    Some(e) => format!("expected {}", format!("{e:?}").to_lowercase()),
                    None => String::new(),
                };
                t.push_str(&format!(
                    "  {:<20} {:<8} {:>11}  {tag}\n",
                    c.id.name(),
                    status_name(c.status),
                    fmt_defect(c.max_defect)
                ));
            }
            t
        }
    };
    emit(&text, a.common.out.as_deref())?;
    if failed {
        Err(Failure::Check)
    } else {
        Ok(())
    }
}

fn cmd_identities(a: IdentityArgs) -> Outcome {
    let started = Instant::now();
    let (s, _) = resolve_structure(&a.structure, LoadOptions { allow_non_poisson: a.allow_non_poisson })?;
    let mut report = identity_suite(&s, a.common.samples, a.common.seed)?;
    // the suite's own tolerance is fixed; --tol re-judges the recorded defects
    for r in &mut report.records {
        r.tolerance = a.common.tol;
        if let Some(v) = r.max_defect {
            r.status = if v < a.common.tol { Status::Pass } else { Status::Fail };
        }
    }
    let passed = report.passed();
    let text = match a.common.format {
        Format::Json => {
            let doc = document(&a.structure, &a.common, vec![report], Vec::new(), started);
            serde_json::to_string_pretty(&doc).map_err(internal)? + "\n"
        }
        Format::Text => {
            let mut t = format!("{}  points {}\n", report.structure, report.points);
            for r in &report.records {
                t.push_str(&format!(
                    "  {:<26} {:<8} {:>11}\n",
                    r.name,
                    status_name(r.status),
                    fmt_defect(r.max_defect)
                ));
            }
            t
        }
    };
    emit(&text, a.common.out.as_deref())?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn cmd_submersion(a: SubmersionArgs) -> Outcome {
    let started = Instant::now();
    let sub = if Path::new(&a.spec).is_file() {
        let text = std::fs::read_to_string(&a.spec).map_err(|e| Failure::Load(format!("{}: {e}", a.spec)))?;
        SubmersionSpec::parse(&text, &gallery::structure)?
    } else {
        gallery::submersion(&a.spec).map_err(|e| match e {
            Error::Invalid(m) => Failure::Load(m),
            other => other.into(),
        })?
    };
    sub.validate(LoadOptions::default())?;
    let report = submersion_report(&sub, a.common.samples, a.common.seed, a.common.tol)?;
    let passed = report.passed();
    let text = match a.common.format {
        Format::Json => {
            let doc = document(&a.spec, &a.common, vec![report], Vec::new(), started);
            serde_json::to_string_pretty(&doc).map_err(internal)? + "\n"
        }
        Format::Text => {
            let mut t = format!("{}  points {}\n", report.name, report.points);
            for c in &report.checks {
                t.push_str(&format!(
                    "  {:<24} {:<9} {:<8} {:>11}\n",
                    c.name,
                    format!("{:?}", c.role).to_lowercase(),
                    status_name(c.status),
                    fmt_defect(c.max_defect)
                ));
            }
            if let Some(c) = report.cosymplectic {
                t.push_str(&format!("  cosymplectic conditions {:.3e}\n", c.max()));
            }
            t
        }
    };
    emit(&text, a.common.out.as_deref())?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn coord_index(s: &Structure, name: &str) -> Result<usize, Failure> {
    let name = name.trim();
    s.coords
        .iter()
        .position(|c| c == name)
        .or_else(|| name.parse::<usize>().ok().filter(|k| (1..=s.dim).contains(k)).map(|k| k - 1))
        .ok_or_else(|| Failure::Load(format!("unknown coordinate `{name}`")))
}

fn cmd_leaf(a: LeafArgs) -> Outcome {
    let (s, _) = resolve_structure(&a.structure, LoadOptions { allow_non_poisson: a.allow_non_poisson })?;
    if a.start.len() != s.dim {
        return Err(Failure::Load(format!("start point needs {} coordinates, got {}", s.dim, a.start.len())));
    }
    let mut legs = Vec::new();
    if let Some(h) = &a.ham {
        legs.push(Leg { coord: coord_index(&s, h)?, duration: a.t.unwrap_or(0.0) });
    }
    for item in &a.schedule {
        let (c, d) = item
            .split_once(':')
            .ok_or_else(|| Failure::Load(format!("schedule leg `{item}` is not coord:duration")))?;
        let duration = d.trim().parse().map_err(|_| Failure::Load(format!("bad duration in `{item}`")))?;
        legs.push(Leg { coord: coord_index(&s, c)?, duration });
    }
    let trace = trace_leaf(&s, &a.start, &legs, a.h).map_err(|e| match e {
        Error::LeftValidityBox { .. } => Failure::Load(format!("start point: {e}")),
        other => other.into(),
    })?;
    emit(&trace.to_csv(&s.coords), a.out.as_deref())?;

    if let Some(path) = &a.svg {
        let (i, j) = match a.plane.as_slice() {
            [] => widest_pair(&trace.points, s.dim),
            [x, y] => (coord_index(&s, x)?, coord_index(&s, y)?),
            _ => return Err(Failure::Load("--plane takes two coordinates".into())),
        };
        let pts: Vec<(f64, f64)> = trace.points.iter().map(|p| (p[i], p[j])).collect();
        let title = format!("{} from ({})", s.name, join(&a.start));
        std::fs::write(path, svg::render(&title, (&s.coords[i], &s.coords[j]), &pts))
            .map_err(|e| internal(format!("{}: {e}", path.display())))?;
    }
    if !trace.max_drift.is_empty() {
        eprintln!("max casimir drift {}", join(&trace.max_drift));
    }
    match trace.left_box_at {
        Some(t) => Err(internal(format!("path left the validity box at t = {t}; output truncated"))),
        None => Ok(()),
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn widest_pair(points: &[Vec<f64>], n: usize) -> (usize, usize) {
    if n < 2 {
        return (0, 0);
    }
    let mut spread: Vec<(f64, usize)> = (0..n)
        .map(|k| {
            let (lo, hi) = points
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p[k]), b.max(p[k])));
            (hi - lo, k)
        })
        .collect();
    spread.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let (a, b) = (spread[0].1, spread[1].1);
    (a.min(b), a.max(b))
}

fn cmd_list() -> Outcome {
    let mut text = String::new();
    for id in gallery::list() {
        let e = gallery::get(&id)?;
        let kind = match e.kind {
            EntryKind::Structure(_) => "structure",
            EntryKind::Submersion(_) => "submersion",
        };
        text.push_str(&format!("{id:<34} {kind:<10} {}\n", e.summary));
    }
    emit(&text, None)
}

fn cmd_describe(id: &str) -> Outcome {
    let e = gallery::get(id)?;
    let mut t = format!("{}\n  {}\n", e.id, e.summary);
    match &e.kind {
        EntryKind::Structure(s) => {
            t.push_str(&format!("  structure on coordinates ({}), dim {}\n", s.coords.join(", "), s.dim));
            if e.requires_override {
                t.push_str("  needs --allow-non-poisson\n");
            }
        }
        EntryKind::Submersion(sub) => {
            t.push_str(&format!("  submersion {} -> {}\n", sub.p.name, sub.m.name));
        }
    }
    if !e.expected.is_empty() {
        t.push_str("  expected checks:\n");
        for (c, x) in &e.expected {
            t.push_str(&format!("    {:<20} {}\n", c.name(), format!("{x:?}").to_lowercase()));
        }
    }
    emit(&t, None)
}

fn cmd_export(id: &str, out: Option<&Path>) -> Outcome {
    let e = gallery::get(id)?;
    emit(&e.text, out)
}
