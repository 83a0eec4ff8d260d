//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 bad input,
//! 3 an internal invariant was violated.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::atlas::{generic_arrangement, load_atlas, validate_atlas, AtlasError, StrataAtlas};
use crate::complexes::{build, ComplexError, ComplexSelector};
use crate::logforms::{DEFAULT_DEGREE_BOUND, DEFAULT_TRIALS};
use crate::mhs::{compute_table, MhsError};
use crate::pairings::PairingError;
use crate::suites::{run_suite, LogformsOptions, SuiteError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

pub const FIXTURES: [(&str, &str); 4] = [
    ("p1_2pts", include_str!("../fixtures/p1_2pts.json")),
    ("triangle", include_str!("../fixtures/triangle.json")),
    ("p1_1pt", include_str!("../fixtures/p1_1pt.json")),
    ("elliptic_1pt", include_str!("../fixtures/elliptic_1pt.json")),
];

pub fn builtin_fixture(name: &str) -> Option<&'static str> {
    let stem = name.strip_suffix(".json").unwrap_or(name);
    FIXTURES.iter().find(|(n, _)| *n == stem).map(|(_, doc)| *doc)
}

#[derive(Debug, Parser)]
#[command(name = "nc-hodge", version, about = "Mixed Hodge numbers of normal crossing configurations")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write an atlas document for a builtin family.
    #[command(alias = "generate")]
    Gen {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Print the mixed Hodge table of a complex.
    Compute {
        #[command(flatten)]
        source: SourceArgs,
        /// x, d, log, xd, xd-tilde, locd, locd-tilde, dlogd or nbhd:<label>.
        #[arg(long = "complex")]
        complex: String,
        #[arg(long)]
        degree: Option<i32>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run a verification suite.
    Verify {
        #[command(flatten)]
        source: SourceArgs,
        /// consistency, fujiki, les, cup, logforms or all.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Coefficient degree bound for the logforms generators.
        #[arg(long = "degree-bound", default_value_t = DEFAULT_DEGREE_BOUND)]
        degree_bound: u32,
        /// Random trials per chart for the logforms suite.
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        /// Largest chart dimension for the logforms suite.
        #[arg(long = "max-n", default_value_t = 4)]
        max_n: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long, default_value = "generic")]
    pub family: String,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub hyperplanes: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Atlas file, or the name of a builtin fixture.
    #[arg(long)]
    pub config: Option<String>,
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub hyperplanes: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Result of one run: the exit code, what goes to stdout and to stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, message: impl Into<String>) -> Self {
        let mut stderr = message.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Outcome {
            code,
            stdout: String::new(),
            stderr,
        }
    }
}

/// Parses arguments and runs; parse errors map to exit code 2.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Outcome::ok(text)
            } else {
                Outcome::fail(code, text)
            }
        }
    }
}

pub fn run(cfg: &RunConfig) -> Outcome {
    match &cfg.command {
        Command::Gen { family, output } => run_generate(family, output.as_deref()),
        Command::Compute {
            source,
            complex,
            degree,
            out,
        } => run_compute(source, complex, *degree, out),
        Command::Verify {
            source,
            suite,
            seed,
            degree_bound,
            trials,
            max_n,
            out,
        } => {
            let opts = LogformsOptions {
                seed: *seed,
                trials: *trials,
                max_n: *max_n,
                degree_bound: *degree_bound,
            };
            run_verify(source, suite, &opts, out)
        }
    }
}

fn generic(family: &str, dim: Option<usize>, hyperplanes: Option<usize>) -> Result<StrataAtlas, AtlasError> {
    if family != "generic" {
        return Err(AtlasError::BadParams(format!("unknown family `{family}`; only `generic` is built in")));
    }
    let n = dim.ok_or_else(|| AtlasError::BadParams("--dim is required".into()))?;
    let m = hyperplanes.ok_or_else(|| AtlasError::BadParams("--hyperplanes is required".into()))?;
    generic_arrangement(n, m)
}

fn write_output(text: &str, output: Option<&Path>) -> Outcome {
    match output {
        None => Outcome::ok(text.to_string()),
        Some(path) => match std::fs::write(path, text) {
            Ok(()) => Outcome::ok(String::new()),
            Err(e) => Outcome::fail(EXIT_INPUT, format!("cannot write {}: {e}", path.display())),
        },
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

pub fn run_generate(family: &FamilyArgs, output: Option<&Path>) -> Outcome {
    match generic(&family.family, family.dim, family.hyperplanes) {
        Ok(atlas) => write_output(&with_newline(atlas.to_json()), output),
        Err(e) => Outcome::fail(EXIT_INPUT, e.to_string()),
    }
}

/// Loads the atlas named by `--config` or `--family`; `None` if neither is given.
pub fn load_source(source: &SourceArgs) -> Result<Option<StrataAtlas>, String> {
    if let Some(config) = &source.config {
        let path = Path::new(config);
        let doc = if path.exists() {
            std::fs::read_to_string(path).map_err(|e| format!("cannot read {config}: {e}"))?
        } else if let Some(doc) = builtin_fixture(config) {
            doc.to_string()
        } else {
            return Err(format!("no atlas file or builtin fixture named `{config}`"));
        };
        return load_atlas(&doc).map(Some).map_err(|e| format!("{config}: {e}"));
    }
    if source.family.is_some() || source.dim.is_some() || source.hyperplanes.is_some() {
        let family = source.family.as_deref().unwrap_or("generic");
        return generic(family, source.dim, source.hyperplanes)
            .map(Some)
            .map_err(|e| e.to_string());
    }
    Ok(None)
}

/// Loads and validates; invalid atlases are input errors.
fn validated(source: &SourceArgs) -> Result<Option<StrataAtlas>, Outcome> {
    let atlas = load_source(source).map_err(|e| Outcome::fail(EXIT_INPUT, e))?;
    if let Some(a) = &atlas {
        let report = validate_atlas(a);
        if !report.is_valid() {
            let lines: Vec<String> = report
                .violations
                .iter()
                .map(|v| format!("invalid atlas: {} at {}: {}", v.check, v.location, v.witness))
                .collect();
            return Err(Outcome::fail(EXIT_INPUT, lines.join("\n")));
        }
    }
    Ok(atlas)
}

fn complex_exit(e: &ComplexError) -> i32 {
    match e {
        ComplexError::EmptyDivisor | ComplexError::UnknownStratum(_) | ComplexError::UnknownSelector(_) => EXIT_INPUT,
        ComplexError::Atlas(_) => EXIT_INPUT,
        ComplexError::NotAComplex { .. } | ComplexError::InvalidBlock { .. } | ComplexError::NotChainMap { .. } => {
            EXIT_INTERNAL
        }
    }
}

fn pairing_exit(e: &PairingError) -> i32 {
    match e {
        PairingError::Complex(c) => complex_exit(c),
        PairingError::EmptyDivisor | PairingError::DegreeOutOfRange(..) => EXIT_INPUT,
        PairingError::Mhs(_) | PairingError::Linalg(_) | PairingError::NotAdditive(_) => EXIT_INTERNAL,
    }
}

pub fn run_compute(source: &SourceArgs, complex: &str, degree: Option<i32>, out: &OutputArgs) -> Outcome {
    let atlas = match validated(source) {
        Ok(Some(a)) => a,
        Ok(None) => return Outcome::fail(EXIT_INPUT, "compute needs an atlas (--config or --family)"),
        Err(o) => return o,
    };
    let selector = match ComplexSelector::parse(complex) {
        Ok(s) => s,
        Err(e) => return Outcome::fail(EXIT_INPUT, e.to_string()),
    };
    let rows = match build(&atlas, &selector) {
        Ok(r) => r,
        Err(e) => return Outcome::fail(complex_exit(&e), e.to_string()),
    };
    let table = match compute_table(&rows) {
        Ok(t) => t,
        Err(e @ MhsError::Linalg { .. }) => return Outcome::fail(EXIT_INTERNAL, e.to_string()),
    };
    let table = match degree {
        Some(m) => table.restricted_to(m),
        None => table,
    };
    let text = match out.format {
        Format::Text => table.to_text(),
        Format::Json => table.to_json(),
    };
    write_output(&with_newline(text), out.output.as_deref())
}

pub fn run_verify(source: &SourceArgs, suite: &str, opts: &LogformsOptions, out: &OutputArgs) -> Outcome {
    let atlas = match validated(source) {
        Ok(a) => a,
        Err(o) => return o,
    };
    let report = match run_suite(suite, atlas.as_ref(), opts) {
        Ok(r) => r,
        Err(SuiteError::Pairing(e)) => return Outcome::fail(pairing_exit(&e), e.to_string()),
        Err(e) => return Outcome::fail(EXIT_INPUT, e.to_string()),
    };
    let text = match out.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    };
    let mut outcome = write_output(&with_newline(text), out.output.as_deref());
    if outcome.code == EXIT_OK && !report.passed() {
        outcome.code = EXIT_CHECK_FAILED;
        let failed = report.failures().count();
        outcome.stderr = format!("{failed} of {} checks failed\n", report.checks.len());
    }
    outcome
}
