//! Command-line front end.
//!
//! [`run`] writes everything to the given writer and returns the process
//! exit code: 0 on success, 2 for a Hard verdict. Library and data errors are
//! returned as `Err` and map to exit code 3 in the binary; usage errors from
//! clap map to 1.

pub mod demo;
pub mod files;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::algebra::Backend;
use crate::dichotomy::{classify, Outcome, Problem, Verdict};
use crate::entanglement;
use crate::error::{Error, Result};
use crate::eval::{effective_signature_bruteforce, evaluate, Method};
use crate::families::family_tags;
use crate::gadgets::{
    binary_escape, extract_hard_core, pr_binary_extract, symmetrize, ternary_extract,
    triangle_recipe, unary_chain_recipe, ChainSign, GadgetRecipe, Isotropic,
};
use crate::grids::effective_signature;
use crate::signatures::Signature;

pub use demo::DemoGraph;
pub use files::{read_grid, read_signatures, GridFile, NamedSignature};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_HARD: i32 = 2;
pub const EXIT_DATA: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Exact,
    Float,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Exact => Backend::Exact,
            BackendArg::Float => Backend::Float,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IsotropicArg {
    K,
    Kx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
}

#[derive(Debug, Parser)]
#[command(
    name = "holant",
    version,
    about = "Exact holant evaluation, gadgets and classification"
)]
pub struct Cli {
    /// Arithmetic backend for every value read or computed.
    #[arg(
        long,
        global = true,
        value_enum,
        env = "HOLANT_BACKEND",
        default_value = "exact"
    )]
    pub backend: BackendArg,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub output: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Holant value of a closed grid, or the effective signature of a gadget.
    Eval {
        grid: PathBuf,
        #[arg(long, default_value = "auto")]
        method: Method,
    },
    /// Runs a classifier on the signatures of a file.
    Classify {
        #[arg(long)]
        problem: Problem,
        file: PathBuf,
    },
    /// Entanglement type of each signature.
    Entangle { file: PathBuf },
    /// Family memberships of each signature.
    Families { file: PathBuf },
    /// Builds a gadget and emits it as a replayable grid file.
    Gadget {
        #[command(subcommand)]
        kind: GadgetCommand,
        /// Writes the grid file here instead of standard output.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    Demo {
        #[command(subcommand)]
        kind: DemoCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum GadgetCommand {
    /// A non-decomposable ternary gadget.
    Ternary {
        file: PathBuf,
        #[arg(long)]
        name: Option<String>,
    },
    /// An entangled binary on two chosen arguments, other arguments pinned.
    Binary {
        file: PathBuf,
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        first: usize,
        #[arg(long)]
        second: usize,
    },
    /// A binary outside the isotropic matching closure.
    Escape {
        file: PathBuf,
        #[arg(long)]
        name: Option<String>,
        #[arg(long, value_enum, default_value = "k")]
        isotropic: IsotropicArg,
    },
    /// The triangle of three copies of a ternary signature.
    Triangle {
        file: PathBuf,
        #[arg(long)]
        name: Option<String>,
        #[arg(long, default_value_t = 0)]
        rotation: usize,
    },
    /// A symmetric ternary gadget.
    Symmetrize {
        file: PathBuf,
        #[arg(long)]
        name: Option<String>,
        /// Name of a binary helper signature in the same file.
        #[arg(long)]
        helper: Option<String>,
    },
    /// The hard-core gadget of a whole family.
    HardCore { file: PathBuf },
    /// A unary chain [1, length·z ± 1] from a link [z, 1, 0].
    Chain {
        file: PathBuf,
        #[arg(long)]
        name: Option<String>,
        #[arg(long, value_enum, default_value = "plus")]
        sign: SignArg,
        #[arg(long, default_value_t = 1)]
        length: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum DemoCommand {
    /// Counts perfect matchings of a bundled graph.
    Matchings { graph: DemoGraph },
}

fn values_json(f: &Signature) -> Value {
    json!({
        "arity": f.arity(),
        "values": f.values().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
    })
}

fn pick<'a>(
    sigs: &'a [NamedSignature],
    name: Option<&str>,
    path: &Path,
) -> Result<&'a NamedSignature> {
    match name {
        Some(n) => sigs
            .iter()
            .find(|s| s.name == n)
            .ok_or_else(|| Error::Parse(format!("{}: no signature named '{n}'", path.display()))),
        None => sigs
            .first()
            .ok_or_else(|| Error::Parse(format!("{}: no signatures", path.display()))),
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Parse(format!("output: {e}"))
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let backend = Backend::from(cli.backend);
    let json = cli.output == OutputFormat::Json;
    match &cli.command {
        Command::Eval { grid, method } => {
            let loaded = read_grid(grid, backend)?;
            let g = &loaded.gadget;
            if g.dangling.is_empty() {
                let chosen = match method {
                    Method::Auto => crate::eval::auto_method(&g.grid),
                    m => *m,
                };
                let v = &evaluate(&g.grid, chosen)? * &loaded.scale;
                if json {
                    writeln!(
                        out,
                        "{}",
                        json!({"method": chosen.to_string(), "value": v.to_string()})
                    )
                    .map_err(io)?;
                } else {
                    writeln!(out, "{v}").map_err(io)?;
                }
            } else {
                let eff = match method {
                    Method::Brute => effective_signature_bruteforce(g)?,
                    Method::Contract | Method::Auto => effective_signature(g)?,
                    m => {
                        return Err(Error::Precondition(format!(
                        "method {m} evaluates closed grids only; this grid has {} dangling edges",
                        g.dangling.len()
                    )))
                    }
                };
                let eff = eff.scale(&loaded.scale);
                if json {
                    writeln!(out, "{}", json!({"signature": values_json(&eff)})).map_err(io)?;
                } else {
                    writeln!(out, "{eff}").map_err(io)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Classify { problem, file } => {
            let sigs = read_signatures(file, backend)?;
            let family: Vec<Signature> = sigs.iter().map(|s| s.signature.clone()).collect();
            let verdict = classify(*problem, &family)?;
            write_verdict(out, &verdict, json)?;
            Ok(if verdict.is_polytime() {
                EXIT_OK
            } else {
                EXIT_HARD
            })
        }
        Command::Entangle { file } => {
            let sigs = read_signatures(file, backend)?;
            let mut rows = Vec::new();
            for s in &sigs {
                let class = entanglement::classify(&s.signature)?;
                if json {
                    rows.push(json!({
                        "name": s.name,
                        "tag": class.tag.to_string(),
                        "factors": class.factors,
                        "witness": class.witness.map(|m| m.to_string()),
                    }));
                } else {
                    writeln!(out, "{}: {}", s.name, class.tag).map_err(io)?;
                }
            }
            if json {
                writeln!(out, "{}", Value::Array(rows)).map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Families { file } => {
            let sigs = read_signatures(file, backend)?;
            let mut rows = Vec::new();
            for s in &sigs {
                let tags = family_tags(&s.signature)?;
                if json {
                    let map: serde_json::Map<String, Value> = tags
                        .iter()
                        .map(|(t, b)| (t.to_string(), Value::Bool(*b)))
                        .collect();
                    rows.push(json!({"name": s.name, "tags": map}));
                } else {
                    let line: Vec<String> = tags
                        .iter()
                        .map(|(t, b)| format!("{t}={}", if *b { 1 } else { 0 }))
                        .collect();
                    writeln!(out, "{}: {}", s.name, line.join(" ")).map_err(io)?;
                }
            }
            if json {
                writeln!(out, "{}", Value::Array(rows)).map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Gadget { kind, out: path } => {
            let (recipe, notes) = build_gadget(kind, backend)?;
            let grid = GridFile::from_recipe(&recipe)?;
            let text =
                serde_json::to_string_pretty(&grid).map_err(|e| Error::Parse(e.to_string()))?;
            match path {
                Some(p) => {
                    std::fs::write(p, format!("{text}\n"))
                        .map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
                    if json {
                        writeln!(
                            out,
                            "{}",
                            json!({"file": p.display().to_string(), "result": values_json(&recipe.result), "notes": notes})
                        )
                        .map_err(io)?;
                    } else {
                        for n in &notes {
                            writeln!(out, "{n}").map_err(io)?;
                        }
                        writeln!(out, "result: {}", recipe.result).map_err(io)?;
                        writeln!(out, "wrote {}", p.display()).map_err(io)?;
                    }
                }
                None => writeln!(out, "{text}").map_err(io)?,
            }
            Ok(EXIT_OK)
        }
        Command::Demo {
            kind: DemoCommand::Matchings { graph },
        } => {
            let (n, edges) = graph.edges();
            let grid = demo::matching_grid(n, &edges);
            let v = evaluate(&grid, Method::Contract)?;
            if json {
                writeln!(
                    out,
                    "{}",
                    json!({"graph": graph.name(), "matchings": v.to_string()})
                )
                .map_err(io)?;
            } else {
                writeln!(out, "{v}").map_err(io)?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn write_verdict(out: &mut dyn Write, v: &Verdict, json: bool) -> Result<()> {
    let witness = match &v.outcome {
        Outcome::Hard { witness } => witness.as_ref(),
        Outcome::PolyTime { .. } => None,
    };
    if json {
        let cases: Vec<Value> = v
            .cases
            .iter()
            .map(|c| {
                json!({
                    "case": c.case.tag(),
                    "holds": c.holds,
                    "transform": c.transform.as_ref().map(|m| m.to_string()),
                    "failing": c.failing,
                    "detail": c.detail,
                })
            })
            .collect();
        let (verdict, case, transform) = match &v.outcome {
            Outcome::PolyTime { case, transform } => (
                "PolyTime",
                Some(case.tag()),
                transform.as_ref().map(|m| m.to_string()),
            ),
            Outcome::Hard { .. } => ("Hard", None, None),
        };
        let doc = json!({
            "problem": v.problem.tag(),
            "verdict": verdict,
            "case": case,
            "transform": transform,
            "witness": witness.map(values_json),
            "approximate": v.approximate,
            "planar": v.planar,
            "cases": cases,
            "trace": v.trace,
        });
        writeln!(out, "{doc}").map_err(io)?;
        return Ok(());
    }
    writeln!(out, "{v}").map_err(io)?;
    for c in &v.cases {
        let mark = if c.holds { "holds" } else { "fails" };
        write!(out, "  {} {mark}", c.case).map_err(io)?;
        if let Some(m) = &c.transform {
            write!(out, " transform={m}").map_err(io)?;
        }
        if let Some(k) = c.failing {
            write!(out, " failing={k}").map_err(io)?;
        }
        if !c.detail.is_empty() {
            write!(out, ": {}", c.detail).map_err(io)?;
        }
        writeln!(out).map_err(io)?;
    }
    if let Some(w) = witness {
        writeln!(out, "witness: {w}").map_err(io)?;
    }
    for t in &v.trace {
        writeln!(out, "trace: {t}").map_err(io)?;
    }
    Ok(())
}

/// The recipe a gadget subcommand asks for, with notes for the text output.
pub fn build_gadget(kind: &GadgetCommand, backend: Backend) -> Result<(GadgetRecipe, Vec<String>)> {
    let load =
        |file: &PathBuf, name: &Option<String>| -> Result<(Vec<NamedSignature>, Signature)> {
            let sigs = read_signatures(file, backend)?;
            let f = pick(&sigs, name.as_deref(), file)?.signature.clone();
            Ok((sigs, f))
        };
    match kind {
        GadgetCommand::Ternary { file, name } => {
            let (_, f) = load(file, name)?;
            Ok((ternary_extract(&f)?.1, Vec::new()))
        }
        GadgetCommand::Binary {
            file,
            name,
            first,
            second,
        } => {
            let (_, f) = load(file, name)?;
            let (_, unaries) = pr_binary_extract(&f, *first, *second)?;
            Ok((binary_recipe(&f, *first, *second, &unaries)?, Vec::new()))
        }
        GadgetCommand::Escape {
            file,
            name,
            isotropic,
        } => {
            let (_, f) = load(file, name)?;
            let which = match isotropic {
                IsotropicArg::K => Isotropic::K,
                IsotropicArg::Kx => Isotropic::KX,
            };
            Ok((binary_escape(&f, which)?.1, Vec::new()))
        }
        GadgetCommand::Triangle {
            file,
            name,
            rotation,
        } => {
            let (_, f) = load(file, name)?;
            Ok((
                triangle_recipe(&GadgetRecipe::start(&f), *rotation)?,
                Vec::new(),
            ))
        }
        GadgetCommand::Symmetrize { file, name, helper } => {
            let (sigs, f) = load(file, name)?;
            let h = match helper {
                Some(h) => Some(pick(&sigs, Some(h), file)?.signature.clone()),
                None => None,
            };
            let (sym, recipe) = symmetrize(&f, h.as_ref())?;
            Ok((recipe, vec![format!("symmetric: {sym}")]))
        }
        GadgetCommand::HardCore { file } => {
            let sigs = read_signatures(file, backend)?;
            let family: Vec<Signature> = sigs.into_iter().map(|s| s.signature).collect();
            let outcome = extract_hard_core(&family)?;
            let mut notes = vec![format!("kind: {}", outcome.kind)];
            let d: Vec<String> = outcome
                .trace
                .distances
                .iter()
                .enumerate()
                .filter_map(|(k, d)| d.map(|d| format!("D{k}={d}")))
                .collect();
            if !d.is_empty() {
                notes.push(format!("distances: {}", d.join(" ")));
            }
            notes.extend(outcome.trace.cases.iter().map(|c| format!("case: {c}")));
            let recipe = outcome.trace.recipe.clone().ok_or_else(|| {
                Error::Precondition(format!("no hard-core gadget: {}", outcome.kind))
            })?;
            Ok((recipe, notes))
        }
        GadgetCommand::Chain {
            file,
            name,
            sign,
            length,
        } => {
            let (_, f) = load(file, name)?;
            let sign = match sign {
                SignArg::Plus => ChainSign::Plus,
                SignArg::Minus => ChainSign::Minus,
            };
            Ok((unary_chain_recipe(&f, sign, *length)?, Vec::new()))
        }
    }
}

/// Pins every argument of `f` other than `first` and `second` with the given
/// unaries (in increasing slot order) and orders the survivors as requested.
fn binary_recipe(
    f: &Signature,
    first: usize,
    second: usize,
    unaries: &[Signature],
) -> Result<GadgetRecipe> {
    let mut r = GadgetRecipe::start(f);
    let rest: Vec<usize> = (0..f.arity())
        .filter(|&s| s != first && s != second)
        .collect();
    for (slot, u) in rest.iter().zip(unaries).rev() {
        r.contract(*slot, u)?;
    }
    if first > second {
        r.reorder(&[1, 0])?;
    }
    Ok(r)
}

/// Entry point for the binary: parses `args` and returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DATA
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signatures::named::*;

    #[test]
    fn binary_recipe_matches_extraction() {
        let f = Signature::from_ints(&[0, 1, 1, 0, 1, 0, 0, 2, 1, 0, 3, 0, 0, 0, 0, 1]);
        for (a, b) in [(0, 3), (3, 1), (2, 0)] {
            let (g, unaries) = pr_binary_extract(&f, a, b).unwrap();
            let r = binary_recipe(&f, a, b, &unaries).unwrap();
            assert_eq!(r.result, g);
            assert!(r.verify().unwrap());
        }
        let (g, u) = pr_binary_extract(&one(3), 1, 0).unwrap();
        assert_eq!(binary_recipe(&one(3), 1, 0, &u).unwrap().result, g);
    }

    #[test]
    fn usage_errors_exit_one() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(
            main_with_args(["holant", "eval", "--bogus", "x"], &mut out, &mut err),
            EXIT_USAGE
        );
        assert_eq!(
            main_with_args(["holant", "--help"], &mut out, &mut err),
            EXIT_OK
        );
        assert_eq!(
            main_with_args(["holant", "eval", "/nonexistent.json"], &mut out, &mut err),
            EXIT_DATA
        );
    }
}
