//! Batch runner: each verb loads a spec, runs one engine operation on a
//! window and emits a report.

mod report;
mod verbs;

use std::io::{IsTerminal, Read};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::examples::{self, Loaded};
use crate::novikov::{exp_int, parse_exp};
use crate::window::Window;

pub use report::{Record, Report};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Z,
    Z2,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Records,
}

/// Complexes whose energy spectral sequence `pages` can show.
#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PageSpace {
    Bar,
    Cyclic,
    Sym,
    Hochschild,
}

#[derive(Debug, Parser)]
#[command(name = "obstructa", version, about = "Windowed homology of filtered A-infinity algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
    /// Energy ceiling (rational).
    #[arg(long, global = true)]
    pub emax: Option<String>,
    /// Base word-length bound.
    #[arg(long, global = true)]
    pub lmax: Option<usize>,
    /// Largest operation arity used.
    #[arg(long, global = true)]
    pub kmax: Option<usize>,
    /// Degree range `a..b` reported.
    #[arg(long, global = true)]
    pub degrees: Option<String>,
    /// Extra length allowed per unit of minimal energy.
    #[arg(long, global = true)]
    pub slope: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "z")]
    pub mode: Mode,
    /// Spec file; `-` or omitted with piped input reads stdin.
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Spec validation, A-infinity relations and unit relations.
    Validate,
    /// Bar complex on words of positive length.
    Bar,
    /// Cyclic homology.
    Cyclic,
    /// Graded-symmetric bar complex.
    Sym,
    /// Hochschild homology of the spec's bimodule (diagonal for an algebra).
    Hochschild,
    /// Hochschild homology on the reduced complex.
    ReducedHochschild,
    /// Module Chevalley-Eilenberg homology.
    Ce,
    /// Cyclic Chevalley-Eilenberg homology.
    CyclicCe,
    /// Chain homology against cohomology of the dual, per degree.
    DualCe,
    /// Cyclic bicomplex identities and the planted-sign-error suite.
    BicomplexCheck,
    /// Connes operator identities, (b,B) and Tsygan totals, Connes sequence.
    BbComplex {
        /// Largest number of diagonals or columns.
        #[arg(long, default_value_t = 3)]
        diagonals: u32,
    },
    /// The cyclic cycle built from unit and curvature.
    Alpha,
    /// The bar cycle built from unit and curvature.
    Gamma,
    /// Solve for a bounding cochain and check its consequences.
    McCheck,
    /// Emit the deformation by a solved bounding cochain as a spec.
    Deform,
    /// Primary obstruction, vanishing certificate and sampled witnesses.
    Vanish {
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Pages 1 and 2 of the energy spectral sequence.
    Pages {
        #[arg(long, value_enum, default_value = "bar")]
        space: PageSpace,
    },
    /// Emit a shipped example as spec JSON.
    Example { name: String },
}

impl Verb {
    fn name(&self) -> &'static str {
        match self {
            Verb::Validate => "validate",
            Verb::Bar => "bar",
            Verb::Cyclic => "cyclic",
            Verb::Sym => "sym",
            Verb::Hochschild => "hochschild",
            Verb::ReducedHochschild => "reduced-hochschild",
            Verb::Ce => "ce",
            Verb::CyclicCe => "cyclic-ce",
            Verb::DualCe => "dual-ce",
            Verb::BicomplexCheck => "bicomplex-check",
            Verb::BbComplex { .. } => "bb-complex",
            Verb::Alpha => "alpha",
            Verb::Gamma => "gamma",
            Verb::McCheck => "mc-check",
            Verb::Deform => "deform",
            Verb::Vanish { .. } => "vanish",
            Verb::Pages { .. } => "pages",
            Verb::Example { .. } => "example",
        }
    }

    /// Cycles built from the curvature grow in length with energy.
    fn default_slope(&self) -> usize {
        match self {
            Verb::Alpha | Verb::Gamma | Verb::BbComplex { .. } => 2,
            _ => 1,
        }
    }
}

/// What a run produces: the text to emit and the exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Resource { .. } => 3,
        Error::Refused(_) => 1,
        _ => 2,
    }
}

impl Cli {
    pub fn window(&self) -> Result<Window> {
        let emax = match &self.emax {
            Some(t) => parse_exp(t).ok_or_else(|| Error::Usage(format!("--emax: cannot read {:?} as a rational", t)))?,
            None => exp_int(3),
        };
        let mut w = Window::new(self.lmax.unwrap_or(3), emax).with_slope(self.slope.unwrap_or(self.verb.default_slope()));
        if let Some(k) = self.kmax {
            w = w.with_kmax(k);
        }
        if let Some(d) = &self.degrees {
            let (lo, hi) = parse_degrees(d)?;
            w = w.with_degrees(lo, hi);
        }
        Ok(w)
    }

    fn spec_text(&self) -> Result<String> {
        match &self.spec {
            Some(p) if p.as_os_str() != "-" => {
                std::fs::read_to_string(p).map_err(|e| Error::Usage(format!("cannot read spec {}: {}", p.display(), e)))
            }
            Some(_) => read_stdin(),
            None if !std::io::stdin().is_terminal() => read_stdin(),
            None => Err(Error::Usage("no spec: pass --spec <path> or pipe one in".into())),
        }
    }

    /// The spec, converted to the requested grading.
    pub fn load(&self) -> Result<Loaded> {
        let loaded = examples::parse(&self.spec_text()?)?;
        match (self.mode, loaded) {
            (Mode::Z, l) => Ok(l),
            (Mode::Z2, Loaded::Algebra(a)) => Ok(Loaded::Algebra(a.to_z2())),
            (Mode::Z2, _) => Err(Error::Usage("--mode z2 needs an algebra spec".into())),
        }
    }
}

fn read_stdin() -> Result<String> {
    let mut s = String::new();
    std::io::stdin().read_to_string(&mut s)?;
    Ok(s)
}

fn parse_degrees(text: &str) -> Result<(i64, i64)> {
    let bad = || Error::Usage(format!("--degrees: expected a..b, got {:?}", text));
    let (lo, hi) = text.split_once("..").ok_or_else(bad)?;
    let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Run one command line and collect its output.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    run_cli(&cli)
}

pub fn run_cli(cli: &Cli) -> Outcome {
    let produced = match &cli.verb {
        Verb::Example { name } => examples::build(name).map(|a| (examples::to_json(&a.to_file()), 0)),
        Verb::Deform => verbs::deform(cli),
        _ => verbs::dispatch(cli).map(|r| (r.render(cli.format), if r.failed { 1 } else { 0 })),
    };
    let (body, code) = match produced {
        Ok(x) => x,
        Err(e) => return Outcome { code: exit_code(&e), stdout: String::new(), stderr: format!("error: {}\n", e) },
    };
    match &cli.out {
        Some(path) => match std::fs::write(path, &body) {
            Ok(()) => Outcome { code, stdout: String::new(), stderr: String::new() },
            Err(e) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {}: {}\n", path.display(), e) },
        },
        None => Outcome { code, stdout: body, stderr: String::new() },
    }
}
