//! Command-line interface.
//!
//! Exit codes: 0 success or related, 1 not related, 2 input error,
//! 3 state bound exceeded or inconclusive.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::{Matrix2, Vector2};

use crate::equivalence::{bisimilar, check_bisim_phi, naive_bisim, render_report, Isometry, Verdict};
use crate::error::Error;
use crate::futs::build_ctmc;
use crate::futs::export::{to_dot, to_tsv};
use crate::model::{ActionId, LocSet, ModelComponent, ModelDefinition};
use crate::num::g17;
use crate::parser::load;
use crate::rates::exit_rate_in;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_RELATED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BOUND: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "paloma", version, about = "Analyse located Markovian agent models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate a model.
    Check { model: PathBuf },
    /// Generate the CTMC of a system.
    Ctmc {
        model: PathBuf,
        #[arg(long)]
        system: String,
        #[arg(long, env = "PALOMA_BOUND", default_value_t = 10_000,
              value_parser = clap::value_parser!(u64).range(1..))]
        bound: u64,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Context-aware exit rate of an action.
    Rate {
        model: PathBuf,
        #[arg(long)]
        system: String,
        /// Action with its type glyph: `!!m`, `??m`, `!m`, `?m` or `m`.
        #[arg(long, allow_hyphen_values = true)]
        action: String,
        /// Restrict to components at these locations (repeatable).
        #[arg(long = "loc")]
        locations: Vec<String>,
        /// `empty` or the name of a system.
        #[arg(long, default_value = "empty")]
        context: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide bisimilarity of two systems in a context.
    Bisim {
        model: PathBuf,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long, default_value = "empty")]
        context: String,
        #[arg(long, value_enum, default_value_t = Mode::Isometry)]
        mode: Mode,
        /// Row-major `a,b,c,d` for `--mode fixed-phi`.
        #[arg(long, allow_hyphen_values = true)]
        matrix: Option<String>,
        /// `x,y` for `--mode fixed-phi`.
        #[arg(long, allow_hyphen_values = true)]
        offset: Option<String>,
        #[arg(long, env = "PALOMA_BOUND", default_value_t = 10_000,
              value_parser = clap::value_parser!(u64).range(1..))]
        bound: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Tsv,
    Dot,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Isometry,
    Naive,
    FixedPhi,
}

struct Failed(i32);

type Outcome = Result<i32, Failed>;

/// Runs the CLI with explicit streams and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) | Err(Failed(code)) => code,
    }
}

fn fail(err: &mut dyn Write, msg: impl std::fmt::Display, code: i32) -> Failed {
    let _ = writeln!(err, "error: {msg}");
    Failed(code)
}

fn read_model(path: &Path, err: &mut dyn Write) -> Result<ModelDefinition, Failed> {
    let text = fs::read_to_string(path)
        .map_err(|e| fail(err, format!("cannot read {}: {e}", path.display()), EXIT_INPUT))?;
    match load(&text) {
        Ok((def, warnings)) => {
            for w in warnings {
                let _ = writeln!(err, "{}: {w}", path.display());
            }
            Ok(def)
        }
        Err(diags) => {
            for d in diags {
                let _ = writeln!(err, "{}: {d}", path.display());
            }
            Err(Failed(EXIT_INPUT))
        }
    }
}

fn system<'d>(def: &'d ModelDefinition, name: &str, err: &mut dyn Write) -> Result<&'d ModelComponent, Failed> {
    def.system(name)
        .ok_or_else(|| fail(err, Error::UnknownSystem(name.to_string()), EXIT_INPUT))
}

fn context(def: &ModelDefinition, name: &str, err: &mut dyn Write) -> Result<ModelComponent, Failed> {
    if name == "empty" {
        Ok(ModelComponent::empty())
    } else {
        system(def, name, err).cloned()
    }
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failed> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| fail(err, format!("cannot write {}: {e}", p.display()), EXIT_INPUT)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| fail(err, format!("cannot write output: {e}"), EXIT_INPUT)),
    }
}

fn numbers<const N: usize>(flag: &str, text: Option<&str>, err: &mut dyn Write) -> Result<[f64; N], Failed> {
    let text = text.ok_or_else(|| fail(err, format!("--mode fixed-phi requires --{flag}"), EXIT_INPUT))?;
    let parsed: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    match parsed {
        Ok(v) if v.len() == N => Ok(v.try_into().expect("length checked")),
        _ => Err(fail(
            err,
            format!("--{flag} expects {N} comma-separated numbers, got `{text}`"),
            EXIT_INPUT,
        )),
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Check { model } => {
            let def = read_model(&model, err)?;
            let _ = writeln!(
                out,
                "ok: {} locations, {} equations, {} systems",
                def.locations.len(),
                def.equations.len(),
                def.systems.len()
            );
            Ok(EXIT_OK)
        }
        Command::Ctmc {
            model,
            system: name,
            bound,
            format,
            out: path,
        } => {
            let def = read_model(&model, err)?;
            let sys = system(&def, &name, err)?;
            let ctmc = match build_ctmc(&def, sys, bound as usize) {
                Ok(c) => c,
                Err(e @ Error::BoundExceeded { .. }) => return Err(fail(err, e, EXIT_BOUND)),
                Err(e) => return Err(fail(err, e, EXIT_INPUT)),
            };
            let text = match format {
                Format::Tsv => to_tsv(&def, &ctmc),
                Format::Dot => to_dot(&def, &ctmc),
            };
            emit(&text, path.as_deref(), out, err)?;
            Ok(EXIT_OK)
        }
        Command::Rate {
            model,
            system: name,
            action,
            locations,
            context: ctx,
            out: path,
        } => {
            let def = read_model(&model, err)?;
            let p = system(&def, &name, err)?;
            let ctx = context(&def, &ctx, err)?;
            let a: ActionId = action.parse().map_err(|e| fail(err, e, EXIT_INPUT))?;
            let locs = if locations.is_empty() {
                None
            } else {
                let mut set = LocSet::new();
                for l in &locations {
                    let id = def
                        .loc_by_name(l)
                        .ok_or_else(|| fail(err, Error::UnknownLocation(l.clone()), EXIT_INPUT))?;
                    set.insert(id);
                }
                Some(set)
            };
            let r = exit_rate_in(&def, &a, locs.as_ref(), &ctx, p);
            emit(&format!("{}\n", g17(r)), path.as_deref(), out, err)?;
            Ok(EXIT_OK)
        }
        Command::Bisim {
            model,
            left,
            right,
            context: ctx,
            mode,
            matrix,
            offset,
            bound,
            out: path,
        } => {
            let def = read_model(&model, err)?;
            let p = system(&def, &left, err)?;
            let q = system(&def, &right, err)?;
            let ctx = context(&def, &ctx, err)?;
            let bound = bound as usize;
            let result = match mode {
                Mode::Isometry => bisimilar(&def, p, q, &ctx, bound),
                Mode::Naive => naive_bisim(&def, p, q, &ctx, bound),
                Mode::FixedPhi => {
                    let [a, b, c, d] = numbers::<4>("matrix", matrix.as_deref(), err)?;
                    let [x, y] = numbers::<2>("offset", offset.as_deref(), err)?;
                    let phi = Isometry::new(Matrix2::new(a, b, c, d), Vector2::new(x, y))
                        .map_err(|e| fail(err, e, EXIT_INPUT))?;
                    check_bisim_phi(&def, p, q, &ctx, &phi, bound)
                }
            };
            emit(&render_report(&def, &result), path.as_deref(), out, err)?;
            Ok(match result.verdict {
                Verdict::Related => EXIT_OK,
                Verdict::NotRelated => EXIT_NOT_RELATED,
                Verdict::Inconclusive => EXIT_BOUND,
            })
        }
    }
}
