//! The `tautring` command line: argument parsing, result caching and dispatch.
//!
//! Exit codes: `0` success, `1` a hard property failed, `2` usage or
//! configuration error, `3` the rewriting budget ran out.

mod cache;
mod commands;

use std::ffi::OsString;
use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use cache::{CachedOutput, ResultCache};

use crate::error::Error;
use crate::forest::SetSMode;
use crate::rewrite::{Evaluator, KappaTable, NormalizerConfig, DEFAULT_MAX_STEPS};
use crate::taut::RingContext;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NONTERMINATION: i32 = 3;

/// Environment variable overriding the cache root.
pub const CACHE_ENV: &str = "TAUTRING_CACHE_DIR";

#[derive(Parser, Debug)]
#[command(name = "tautring", version, about = "Tautological rings of curves with rational tails")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Genus (at least 2).
    #[arg(long, global = true, default_value_t = 2, value_parser = clap::value_parser!(u32).range(2..))]
    pub g: u32,
    /// Number of markings.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=31))]
    pub n: u32,
    /// File of `partition=rational` lines; required for genus 4 and above.
    #[arg(long, global = true)]
    pub kappa_table: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Complement)]
    pub set_s_mode: ModeArg,
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_STEPS, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_rewrite_steps: u64,
    /// Worker threads for matrix assembly.
    #[arg(long, global = true, default_value_t = default_parallelism(), value_parser = clap::value_parser!(u32).range(1..))]
    pub parallelism: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Cache root (defaults to the platform cache directory).
    #[arg(long, global = true, env = CACHE_ENV)]
    pub cache_dir: Option<PathBuf>,
    /// Neither read nor write the cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
}

fn default_parallelism() -> u32 {
    std::thread::available_parallelism().map_or(1, |n| n.get() as u32)
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// List the standard monomials of degree k.
    Enumerate {
        #[arg(long)]
        k: u32,
    },
    /// Pairing matrix between degrees k and g-2+n-k with block reports.
    Pairing {
        #[arg(long)]
        k: u32,
        /// Only report the diagonal block with this D-part, e.g. `D(1,2,3)`.
        #[arg(long)]
        dpart: Option<String>,
    },
    /// Run every structural check for (g, n).
    Verify,
    /// Normalize a polynomial read from standard input.
    Normalize {
        /// Write the rewrite certificate here, one step per line.
        #[arg(long)]
        emit_certificate: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Complement,
    Literal,
}

impl From<ModeArg> for SetSMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Complement => SetSMode::Complement,
            ModeArg::Literal => SetSMode::Literal,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl Format {
    fn as_str(self) -> &'static str {
        match self {
            Format::Text => "text",
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Everything a command needs after validation.
pub struct RunConfig {
    pub ctx: RingContext,
    pub mode: SetSMode,
    pub kappa: KappaTable,
    pub normalizer: NormalizerConfig,
    pub format: Format,
}

impl RunConfig {
    pub fn from_args(args: &CommonArgs) -> Result<Self, Error> {
        let ctx = RingContext::new(args.g, args.n)?;
        let kappa = KappaTable::resolve(args.g, args.kappa_table.as_deref())?;
        Ok(RunConfig {
            ctx,
            mode: args.set_s_mode.into(),
            kappa,
            normalizer: NormalizerConfig { max_steps: args.max_rewrite_steps, ..Default::default() },
            format: args.format,
        })
    }

    pub fn evaluator(&self) -> Result<Evaluator, Error> {
        Evaluator::with_config(self.ctx, self.kappa.clone(), self.normalizer)
    }
}

/// Exit code for an engine error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NonTermination { .. } => EXIT_NONTERMINATION,
        Error::Entry { source, .. } => exit_code(source),
        Error::InvalidContext(_)
        | Error::InvalidGenerator(_)
        | Error::Parse { .. }
        | Error::DegreeOutOfRange { .. }
        | Error::WrongDegree { .. }
        | Error::MissingKappaEntry { .. }
        | Error::KappaTable(_)
        | Error::InvalidRelation(_)
        | Error::Io(_) => EXIT_USAGE,
        Error::ResidualExceptional(_) | Error::ProportionalityFailure { .. } => EXIT_PROPERTY,
    }
}

/// Result of one invocation: bytes for stdout and stderr plus the exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn default_cache_root() -> Option<PathBuf> {
    let base = std::env::var_os("XDG_CACHE_HOME")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))?;
    Some(base.join("tautring"))
}

/// Runs the CLI on explicit arguments and standard input text.
pub fn run<I, T>(argv: I, stdin: impl FnOnce() -> std::io::Result<String>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text }
            } else {
                Outcome { code, stdout: text, stderr: String::new() }
            };
        }
    };
    let fail = |e: Error| Outcome { code: exit_code(&e), stdout: String::new(), stderr: format!("error: {e}\n") };
    let cfg = match RunConfig::from_args(&cli.common) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let input = match &cli.command {
        Command::Normalize { .. } => match stdin() {
            Ok(s) => Some(s),
            Err(e) => {
                return Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: reading stdin: {e}\n") }
            }
        },
        _ => None,
    };

    let cache = match (&cli.common.cache_dir, cli.common.no_cache) {
        (_, true) => None,
        (Some(dir), false) => Some(ResultCache::new(dir)),
        (None, false) => default_cache_root().map(ResultCache::new),
    };
    let cacheable = !matches!(cli.command, Command::Normalize { emit_certificate: Some(_) });
    let key = cache_key(&cfg, &cli.command, input.as_deref());
    if let (Some(cache), true) = (&cache, cacheable) {
        if let Some(hit) = cache.get(&key) {
            return Outcome { code: hit.code, stdout: hit.body, stderr: String::new() };
        }
    }

    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.common.parallelism as usize).build() {
        Ok(p) => p,
        Err(e) => return Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {e}\n") },
    };
    let result = pool.install(|| commands::dispatch(&cfg, &cli.command, input.as_deref()));
    match result {
        Ok((code, body)) => {
            let mut stderr = String::new();
            if let (Some(cache), true) = (&cache, cacheable) {
                if let Err(e) = cache.put(&key, &CachedOutput { code, body: body.clone() }) {
                    stderr = format!("warning: could not write cache in {}: {e}\n", cache.root().display());
                }
            }
            Outcome { code, stdout: body, stderr }
        }
        Err(e) => fail(e),
    }
}

fn cache_key(cfg: &RunConfig, cmd: &Command, input: Option<&str>) -> String {
    let (name, params) = match cmd {
        Command::Enumerate { k } => ("enumerate", format!("k={k}")),
        Command::Pairing { k, dpart } => ("pairing", format!("k={k};dpart={}", dpart.as_deref().unwrap_or(""))),
        Command::Verify => ("verify", String::new()),
        Command::Normalize { .. } => ("normalize", format!("stdin={}", input.unwrap_or(""))),
    };
    ResultCache::key(&[
        ("version", env!("CARGO_PKG_VERSION").to_string()),
        ("g", cfg.ctx.g().to_string()),
        ("n", cfg.ctx.n().to_string()),
        ("mode", cfg.mode.to_string()),
        ("kappa", cfg.kappa.digest()),
        ("max_steps", cfg.normalizer.max_steps.to_string()),
        ("format", cfg.format.as_str().to_string()),
        ("command", name.to_string()),
        ("params", params),
    ])
}

/// Entry point used by the binary.
pub fn main_with_env() -> i32 {
    let out = run(std::env::args_os(), || {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    });
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.code
}
