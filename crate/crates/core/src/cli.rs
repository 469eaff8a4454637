//! Command-line front end. `run_args` is the whole program minus process
//! exit, so tests can drive it in-process.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::{
    self, corollary37, flatness, row_labels, structure_residuals, Cor37, CurvatureReport, Level,
    Verdict,
};
use crate::duality::{dual_pde, DualError, DualPde, SolutionFamily};
use crate::fibration::{fibration_report, FibrationReport, Group};
use crate::jetframe::{JetError, PdeSystem};
use crate::samples;

pub const EXIT_FLAT: i32 = 0;
pub const EXIT_NOT_FLAT: i32 = 1;
pub const EXIT_NOT_INTEGRABLE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_INPUT: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Toml {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("{path}: {field}: {msg}")]
    Field {
        path: PathBuf,
        field: &'static str,
        msg: String,
    },
    #[error(transparent)]
    Curvature(#[from] curvature::CurvatureError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io { .. } | CliError::Toml { .. } | CliError::Field { .. } => EXIT_INPUT,
            CliError::Curvature(_) => EXIT_INTERNAL,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Check,
    Dual,
    VerifyStructure,
    Fibration,
    Selftest,
}

/// A validated job.
#[derive(Clone, Debug, PartialEq)]
pub struct JobConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub level: Option<u8>,
    pub group: Option<Group>,
    pub samples: usize,
}

impl JobConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let needs_input = matches!(
            self.command,
            Command::Check | Command::Dual | Command::VerifyStructure
        );
        if needs_input != self.input.is_some() {
            return Err(CliError::Usage(if needs_input {
                "an input file is required".into()
            } else {
                "this command takes no input file".into()
            }));
        }
        if (self.command == Command::VerifyStructure) != self.level.is_some() {
            return Err(CliError::Usage("--level goes with verify-structure only".into()));
        }
        if let Some(l) = self.level {
            if !(9..=11).contains(&l) {
                return Err(CliError::Usage(format!("--level must be 9, 10 or 11, got {l}")));
            }
        }
        if (self.command == Command::Fibration) != self.group.is_some() {
            return Err(CliError::Usage("--group goes with fibration only".into()));
        }
        Ok(())
    }
}

#[derive(Parser, Debug)]
#[command(name = "pdeflat", version, about = "Flatness of y_{x_i x_j} = f_ij under lifted scale transformations")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Decide flatness of the system in a TOML file with keys f11, f12, f22.
    Check { file: PathBuf },
    /// Dual equation of a solution family (keys h, optional [inverse] x1, x2).
    Dual { file: PathBuf },
    /// Check one structure equation identity for a system.
    VerifyStructure {
        #[arg(long, value_parser = clap::value_parser!(u8).range(9..=11))]
        level: u8,
        file: PathBuf,
    },
    /// Subgroup dimensions, decompositions and orbit probes.
    Fibration {
        #[arg(long, value_parser = ["sl4", "scale", "compact"])]
        group: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Run the property suites on generated inputs.
    Selftest {
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

impl From<Cli> for JobConfig {
    fn from(cli: Cli) -> JobConfig {
        let mut job = JobConfig {
            command: Command::Selftest,
            input: None,
            format: cli.format,
            seed: 42,
            level: None,
            group: None,
            samples: 100,
        };
        match cli.command {
            Cmd::Check { file } => {
                job.command = Command::Check;
                job.input = Some(file);
            }
            Cmd::Dual { file } => {
                job.command = Command::Dual;
                job.input = Some(file);
            }
            Cmd::VerifyStructure { level, file } => {
                job.command = Command::VerifyStructure;
                job.level = Some(level);
                job.input = Some(file);
            }
            Cmd::Fibration {
                group,
                seed,
                samples,
            } => {
                job.command = Command::Fibration;
                job.group = group.parse().ok();
                job.seed = seed;
                job.samples = samples;
            }
            Cmd::Selftest { seed } => job.seed = seed,
        }
        job
    }
}

/// Exit status plus what goes to stdout and stderr.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                // --help, --version
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    run(&JobConfig::from(cli))
}

pub fn run(job: &JobConfig) -> Outcome {
    let result = job.validate().and_then(|()| match job.command {
        Command::Check => run_check(job),
        Command::Dual => run_dual(job),
        Command::VerifyStructure => run_verify(job),
        Command::Fibration => Ok(run_fibration(job)),
        Command::Selftest => Ok(run_selftest(job)),
    });
    match result {
        Ok(o) => o,
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemDoc {
    f11: String,
    f12: String,
    f22: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InverseDoc {
    x1: String,
    x2: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyDoc {
    h: String,
    inverse: Option<InverseDoc>,
}

fn read_doc<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    toml::from_str(&text).map_err(|source| CliError::Toml {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_system(path: &Path) -> Result<PdeSystem, CliError> {
    let doc: SystemDoc = read_doc(path)?;
    let c = crate::jetframe::jet_chart();
    let field = |name: &'static str, text: &str| {
        crate::symexpr::parse(text, c).map_err(|e| CliError::Field {
            path: path.to_path_buf(),
            field: name,
            msg: e.to_string(),
        })
    };
    let sys = PdeSystem::new(
        field("f11", &doc.f11)?,
        field("f12", &doc.f12)?,
        field("f22", &doc.f22)?,
    );
    sys.map_err(|e: JetError| CliError::Field {
        path: path.to_path_buf(),
        field: "f11",
        msg: e.to_string(),
    })
}

pub fn load_family(path: &Path) -> Result<SolutionFamily, CliError> {
    let doc: FamilyDoc = read_doc(path)?;
    let inv = doc.inverse.as_ref().map(|i| (i.x1.as_str(), i.x2.as_str()));
    SolutionFamily::parse(&doc.h, inv).map_err(|e: DualError| CliError::Field {
        path: path.to_path_buf(),
        field: match e {
            DualError::BadInverse(..) => "inverse",
            _ => "h",
        },
        msg: e.to_string(),
    })
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Flat => EXIT_FLAT,
        Verdict::NotFlat => EXIT_NOT_FLAT,
        Verdict::NotIntegrable => EXIT_NOT_INTEGRABLE,
    }
}

#[derive(Serialize)]
struct Cor37Doc {
    conditions: [bool; 5],
    verdict: Verdict,
    agrees: bool,
}

#[derive(Serialize)]
struct CheckDoc {
    #[serde(flatten)]
    report: curvature::ReportDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    corollary37: Option<Cor37Doc>,
}

fn cor37_doc(sys: &PdeSystem, report: &CurvatureReport) -> Option<Cor37Doc> {
    if !sys.is_z_free() {
        return None;
    }
    let Cor37 {
        conditions,
        verdict,
    } = corollary37(&sys.f11, &sys.f12, &sys.f22).ok()?;
    Some(Cor37Doc {
        conditions,
        verdict,
        agrees: verdict == report.verdict,
    })
}

fn render_report(out: &mut String, report: &CurvatureReport, cor: Option<&Cor37Doc>) {
    let _ = writeln!(out, "verdict: {}", report.verdict);
    let _ = writeln!(out, "A = {}", report.a);
    let _ = writeln!(out, "B = {}", report.b);
    for s in report.m.iter().chain(&report.s) {
        let tag = if s.id.is_test() { "  [test]" } else { "" };
        let _ = writeln!(out, "{} = {} * ({}){tag}", s.id, s.factor, s.base);
    }
    if !report.witnesses.is_empty() {
        let w: Vec<String> = report.witnesses.iter().map(|w| w.to_string()).collect();
        let _ = writeln!(out, "witnesses: {}", w.join(", "));
    }
    if let Some(c) = cor {
        let _ = writeln!(
            out,
            "z-free fast path: conditions {:?} -> {}, agrees: {}",
            c.conditions, c.verdict, c.agrees
        );
    }
}

fn json(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

pub fn run_check(job: &JobConfig) -> Result<Outcome, CliError> {
    let sys = load_system(job.input.as_deref().expect("validated"))?;
    let report = flatness(&sys);
    let cor = cor37_doc(&sys, &report);
    let stdout = match job.format {
        Format::Json => json(&CheckDoc {
            report: report.to_doc(),
            corollary37: cor,
        }),
        Format::Text => {
            let mut out = String::new();
            render_report(&mut out, &report, cor.as_ref());
            out
        }
    };
    Ok(Outcome {
        code: verdict_code(report.verdict),
        stdout,
        stderr: String::new(),
    })
}

#[derive(Serialize)]
struct DualDoc {
    #[serde(rename = "F11")]
    f11: String,
    #[serde(rename = "F12")]
    f12: String,
    #[serde(rename = "F22")]
    f22: String,
    open: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    dual_check: Option<curvature::ReportDoc>,
}

/// Exit status follows the flatness verdict of the dual system; an open
/// elimination (x-variables left, no inverse) exits with the input code.
pub fn run_dual(job: &JobConfig) -> Result<Outcome, CliError> {
    let fam = load_family(job.input.as_deref().expect("validated"))?;
    let d: DualPde = dual_pde(&fam).map_err(|e| CliError::Field {
        path: job.input.clone().unwrap_or_default(),
        field: "h",
        msg: e.to_string(),
    })?;
    let report = d.as_system().map(|s| flatness(&s));
    let code = report.as_ref().map_or(EXIT_INPUT, |r| verdict_code(r.verdict));
    let stdout = match job.format {
        Format::Json => json(&DualDoc {
            f11: d.f11.to_string(),
            f12: d.f12.to_string(),
            f22: d.f22.to_string(),
            open: d.open,
            dual_check: report.as_ref().map(CurvatureReport::to_doc),
        }),
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "F11 = {}", d.f11);
            let _ = writeln!(out, "F12 = {}", d.f12);
            let _ = writeln!(out, "F22 = {}", d.f22);
            match &report {
                Some(r) => {
                    let _ = writeln!(out, "dual system (X, Y, Z renamed to x, y, z):");
                    render_report(&mut out, r, None);
                }
                None => {
                    let _ = writeln!(
                        out,
                        "open: x1 or x2 remain; supply [inverse] x1, x2 to eliminate them"
                    );
                }
            }
            out
        }
    };
    Ok(Outcome {
        code,
        stdout,
        stderr: String::new(),
    })
}

#[derive(Serialize)]
struct RowDoc {
    row: &'static str,
    holds: bool,
    residual: String,
}

#[derive(Serialize)]
struct StructureDoc {
    level: u8,
    holds: bool,
    rows: Vec<RowDoc>,
}

/// Exit 0 when every row vanishes, 1 otherwise, 2 when level 11 is asked
/// of a non-integrable system.
pub fn run_verify(job: &JobConfig) -> Result<Outcome, CliError> {
    let sys = load_system(job.input.as_deref().expect("validated"))?;
    let n = job.level.expect("validated");
    let level = Level::try_from(n)?;
    let residuals = match structure_residuals(&sys, level) {
        Ok(r) => r,
        Err(e @ curvature::CurvatureError::NotIntegrable { .. }) => {
            return Ok(Outcome {
                code: EXIT_NOT_INTEGRABLE,
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
            })
        }
        Err(e) => return Err(e.into()),
    };
    let rows: Vec<RowDoc> = row_labels(level)
        .into_iter()
        .zip(&residuals)
        .map(|(row, r)| RowDoc {
            row,
            holds: r.is_zero(),
            residual: r.to_string(),
        })
        .collect();
    let holds = rows.iter().all(|r| r.holds);
    let stdout = match job.format {
        Format::Json => json(&StructureDoc {
            level: n,
            holds,
            rows,
        }),
        Format::Text => {
            let mut out = format!("level {n}: {}\n", if holds { "holds" } else { "FAILS" });
            for r in &rows {
                if r.holds {
                    let _ = writeln!(out, "  {}: 0", r.row);
                } else {
                    let _ = writeln!(out, "  {}: residual {}", r.row, r.residual);
                }
            }
            out
        }
    };
    Ok(Outcome {
        code: if holds { 0 } else { 1 },
        stdout,
        stderr: String::new(),
    })
}

fn render_fibration(out: &mut String, r: &FibrationReport) {
    let _ = writeln!(out, "group {} (seed {}, {} samples)", r.group, r.seed, r.samples);
    let _ = writeln!(out, "Lie algebra dimensions:");
    for d in &r.dimensions {
        let _ = writeln!(out, "  {:<28} dim {:>2}  (expected {})", d.space, d.dim, d.expected);
    }
    let _ = writeln!(out, "quotients:");
    for d in &r.quotients {
        let _ = writeln!(
            out,
            "  {:<28} dim {:>2}  (expected {}, {})",
            d.space,
            d.dim,
            d.expected,
            d.model.unwrap_or("")
        );
    }
    let _ = writeln!(out, "decompositions:");
    for d in &r.decompositions {
        let signs: Vec<String> = d.sign_factors.iter().map(|(k, v)| format!("{k}:{v}")).collect();
        let _ = writeln!(
            out,
            "  {:<28} residual {:.2e}  defect {:.2e}  failures {}{}",
            d.subgroup,
            d.max_residual,
            d.max_defect,
            d.failures,
            if signs.is_empty() {
                String::new()
            } else {
                format!("  signs {}", signs.join(" "))
            }
        );
        if let Some(w) = &d.witness {
            let _ = writeln!(out, "    witness: {w}");
        }
    }
    let _ = writeln!(out, "probes:");
    for p in &r.probes {
        let _ = writeln!(
            out,
            "  {:<32} {}  worst {:.2e} ({} samples)",
            p.name,
            if p.passed { "ok  " } else { "FAIL" },
            p.worst,
            p.samples
        );
        if let Some(w) = &p.witness {
            let _ = writeln!(out, "    witness: {w}");
        }
    }
    let _ = writeln!(out, "{}", if r.pass { "all probes pass" } else { "SOME PROBES FAIL" });
}

pub fn run_fibration(job: &JobConfig) -> Outcome {
    let group = job.group.expect("validated");
    let r = fibration_report(group, job.seed, job.samples);
    let stdout = match job.format {
        Format::Json => json(&r),
        Format::Text => {
            let mut out = String::new();
            render_fibration(&mut out, &r);
            out
        }
    };
    Outcome {
        code: if r.pass { 0 } else { 1 },
        stdout,
        stderr: String::new(),
    }
}

#[derive(Serialize)]
struct SuiteDoc {
    name: &'static str,
    cases: usize,
    failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
}

#[derive(Serialize)]
struct SelftestDoc {
    seed: u64,
    suites: Vec<SuiteDoc>,
    pass: bool,
}

struct Suite {
    doc: SuiteDoc,
}

impl Suite {
    fn new(name: &'static str) -> Suite {
        Suite {
            doc: SuiteDoc {
                name,
                cases: 0,
                failures: 0,
                witness: None,
            },
        }
    }

    fn case(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.doc.cases += 1;
        if !ok {
            self.doc.failures += 1;
            self.doc.witness.get_or_insert_with(what);
        }
    }
}

/// Structure equations, the curvature relations, the z-free fast path and
/// the fibration probes on seeded inputs.
pub fn run_selftest(job: &JobConfig) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(job.seed);
    let mut structure = Suite::new("structure equations (levels 9, 10 random; 11 integrable)");
    for _ in 0..20 {
        let sys = samples::random_system(&mut rng, 2, 2);
        for level in [Level::Nine, Level::Ten] {
            let ok = curvature::verify_structure_eq(&sys, level).unwrap_or(false);
            structure.case(ok, || format!("{level:?}: {sys}"));
        }
    }
    let mut pool: Vec<PdeSystem> = (0..10).map(|_| samples::hessian_system(&mut rng)).collect();
    pool.push(PdeSystem::parse("z1", "0", "z2").expect("static system"));
    let mut relations = Suite::new("curvature relations on integrable systems");
    for sys in &pool {
        let ok = curvature::verify_structure_eq(sys, Level::Eleven).unwrap_or(false);
        structure.case(ok, || format!("Eleven: {sys}"));
        let ok = curvature::verify_prop35(sys).unwrap_or(false);
        relations.case(ok, || sys.to_string());
    }
    let mut cor = Suite::new("z-free fast path agrees with curvature verdict");
    for _ in 0..100 {
        let (p, q, r) = samples::random_z_free(&mut rng, 3);
        let sys = PdeSystem::new(p.clone(), q.clone(), r.clone()).expect("jet chart");
        let fast = corollary37(&p, &q, &r).map(|c| c.verdict);
        let ok = fast.as_ref().ok() == Some(&flatness(&sys).verdict);
        cor.case(ok, || sys.to_string());
    }
    let mut fib = Suite::new("fibration probes");
    for g in [Group::Sl4, Group::Scale, Group::Compact] {
        let r = fibration_report(g, job.seed, 100);
        fib.case(r.pass, || format!("group {g}"));
    }
    let suites: Vec<SuiteDoc> = [structure, relations, cor, fib].into_iter().map(|s| s.doc).collect();
    let pass = suites.iter().all(|s| s.failures == 0);
    let stdout = match job.format {
        Format::Json => json(&SelftestDoc {
            seed: job.seed,
            suites,
            pass,
        }),
        Format::Text => {
            let mut out = String::new();
            for s in &suites {
                let _ = writeln!(
                    out,
                    "{} {} ({} cases, {} failures)",
                    if s.failures == 0 { "ok  " } else { "FAIL" },
                    s.name,
                    s.cases,
                    s.failures
                );
                if let Some(w) = &s.witness {
                    let _ = writeln!(out, "    witness: {w}");
                }
            }
            out
        }
    };
    Outcome {
        code: if pass { 0 } else { 1 },
        stdout,
        stderr: String::new(),
    }
}
