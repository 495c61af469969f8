//! Command-line front end.
//!
//! Exit codes: 0 success/true, 1 semantic false or empty result, 2 input
//! error (bad files, parse failures, level mismatches), 3 disagreement
//! between the two evaluation paths of `oracle`.

use std::collections::BTreeMap;
use std::error::Error;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hierlog::{
    check_bisimulation, check_simulation, eval_fol, export_smtlib, largest_bisimulation,
    largest_simulation, point_vars, refines, satisfies, satisfying_points, standard_translation,
    translate_model, translate_signature, EquivError, FamilyDocument, FamilyKind, Formula,
    Hierarchy, LayeredModel, ModelDocument, SimVerdict, Verdict, WorldTuple,
};

#[derive(Parser)]
#[command(
    name = "hierlog",
    version,
    about = "Layered hybrid modal logic toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Layered,
    Hierarchical,
}

impl Mode {
    fn kind(self) -> FamilyKind {
        match self {
            Mode::Layered => FamilyKind::Layered,
            Mode::Hierarchical => FamilyKind::Hierarchical,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Smtlib,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file against the layering invariants
    Validate { model: PathBuf },

    /// Evaluate a formula (or a file of formulas) on a model
    Check {
        model: PathBuf,
        /// Formula in the surface syntax
        #[arg(
            long,
            required_unless_present = "formulas",
            conflicts_with = "formulas"
        )]
        formula: Option<String>,
        /// File with one formula per line; `#` starts a comment
        #[arg(long)]
        formulas: Option<PathBuf>,
        /// Evaluation level
        #[arg(long)]
        level: usize,
        /// Point as comma-separated world ids; omit to list satisfying points
        #[arg(long)]
        at: Option<String>,
    },

    /// Report whether every relation projects onto the one below it
    Hierarchical { model: PathBuf },

    /// Largest bisimulation between two models, or check a given family
    Bisim {
        model_a: PathBuf,
        model_b: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Family file to check instead of computing the largest one
        #[arg(long)]
        check: Option<PathBuf>,
    },

    /// Largest simulation from the first model to the second, or check one
    Sim {
        model_a: PathBuf,
        model_b: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Family file to check instead of computing the largest one
        #[arg(long)]
        check: Option<PathBuf>,
    },

    /// Test whether the second model refines the first
    Refine {
        abstract_model: PathBuf,
        concrete_model: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
    },

    /// Print the first-order translation of a formula
    Translate {
        /// Model file supplying the signature (and axioms for --with-model)
        model: PathBuf,
        #[arg(long)]
        formula: String,
        /// Translation level
        #[arg(long)]
        level: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Append the finite-model axiomatization (smtlib only)
        #[arg(long)]
        with_model: bool,
    },

    /// Evaluate a formula both directly and through the translation
    Oracle {
        model: PathBuf,
        #[arg(long)]
        formula: String,
        /// Evaluation level
        #[arg(long)]
        level: usize,
        /// Point as comma-separated world ids
        #[arg(long)]
        at: String,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

type Fallible<T> = Result<T, Box<dyn Error>>;

fn load_model(path: &Path) -> Fallible<LayeredModel> {
    let text = fs::read_to_string(path)?;
    let doc: ModelDocument = serde_json::from_str(&text)?;
    Ok(doc.into_model()?)
}

fn parse_point(raw: &str, level: usize) -> Fallible<WorldTuple> {
    let ids: Vec<String> = raw.split(',').map(|s| s.trim().to_string()).collect();
    if ids.len() != level + 1 || ids.iter().any(String::is_empty) {
        return Err(format!(
            "point {raw:?} does not name a level-{level} chain ({} ids expected)",
            level + 1
        )
        .into());
    }
    Ok(WorldTuple::new(ids))
}

/// Formula sources for `check`: the text of each plus whether output
/// lines need labelling (more than one formula).
fn formula_sources(
    formula: Option<String>,
    formulas: Option<PathBuf>,
) -> Fallible<(Vec<String>, bool)> {
    match (formula, formulas) {
        (Some(one), None) => Ok((vec![one], false)),
        (None, Some(path)) => {
            let mut out = Vec::new();
            for line in fs::read_to_string(&path)?.lines() {
                let src = line.split('#').next().unwrap_or("").trim();
                if !src.is_empty() {
                    out.push(src.to_string());
                }
            }
            if out.is_empty() {
                return Err(format!("no formulas in {}", path.display()).into());
            }
            Ok((out, true))
        }
        _ => unreachable!("clap enforces exactly one source"),
    }
}

fn run(command: Command) -> Fallible<u8> {
    match command {
        Command::Validate { model } => {
            let m = load_model(&model)?;
            if m.is_valid() {
                println!("ok");
                Ok(0)
            } else {
                for v in m.violations() {
                    println!("{v}");
                }
                Ok(1)
            }
        }

        Command::Check {
            model,
            formula,
            formulas,
            level,
            at,
        } => {
            let m = load_model(&model)?;
            let (sources, labelled) = formula_sources(formula, formulas)?;
            let mut all_hold = true;
            for src in &sources {
                let f = Formula::parse(src, m.sig())?;
                match &at {
                    Some(raw) => {
                        let point = parse_point(raw, level)?;
                        let holds = satisfies(&m, &point, &f)?;
                        if labelled {
                            println!("{src}: {holds}");
                        } else {
                            println!("{holds}");
                        }
                        all_hold &= holds;
                    }
                    None => {
                        let points = satisfying_points(&m, &f, level)?;
                        if labelled {
                            println!("# {src}");
                        }
                        for p in &points {
                            println!("{p}");
                        }
                        all_hold &= !points.is_empty();
                    }
                }
            }
            Ok(if all_hold { 0 } else { 1 })
        }

        Command::Hierarchical { model } => {
            let m = load_model(&model)?;
            match m.hierarchy()? {
                Hierarchy::Hierarchical => {
                    println!("hierarchical");
                    Ok(0)
                }
                Hierarchy::NotHierarchical {
                    level,
                    pair: (a, b),
                    missing_from_lower,
                } => {
                    let gap = if missing_from_lower {
                        "missing from the relation below"
                    } else {
                        "not covered from above"
                    };
                    println!("not hierarchical: level {level}, pair ({a},{b}) {gap}");
                    Ok(1)
                }
            }
        }

        Command::Bisim {
            model_a,
            model_b,
            mode,
            check,
        } => run_family(&model_a, &model_b, mode, check, false),

        Command::Sim {
            model_a,
            model_b,
            mode,
            check,
        } => run_family(&model_a, &model_b, mode, check, true),

        Command::Refine {
            abstract_model,
            concrete_model,
            mode,
        } => {
            let m = load_model(&abstract_model)?;
            let n = load_model(&concrete_model)?;
            match refines(&m, &n, mode.kind()) {
                Ok(SimVerdict::Total) => {
                    println!("refines");
                    Ok(0)
                }
                Ok(verdict) => {
                    println!("does not refine: {verdict}");
                    Ok(1)
                }
                Err(e @ (EquivError::SignatureMismatch | EquivError::NotHierarchical { .. })) => {
                    println!("does not refine: {e}");
                    Ok(1)
                }
                Err(e) => Err(e.into()),
            }
        }

        Command::Translate {
            model,
            formula,
            level,
            format,
            with_model,
        } => {
            if with_model && format == Format::Text {
                return Err("--with-model requires --format smtlib".into());
            }
            let m = load_model(&model)?;
            let f = Formula::parse(&formula, m.sig())?;
            let sentence = standard_translation(&f, level, &point_vars(level))?;
            match format {
                Format::Text => println!("{sentence}"),
                Format::Smtlib => {
                    let fsig = translate_signature(m.sig())?;
                    let fm = if with_model {
                        Some(translate_model(&m)?)
                    } else {
                        None
                    };
                    print!("{}", export_smtlib(&fsig, &sentence, fm.as_ref())?);
                }
            }
            Ok(0)
        }

        Command::Oracle {
            model,
            formula,
            level,
            at,
        } => {
            let m = load_model(&model)?;
            let f = Formula::parse(&formula, m.sig())?;
            let point = parse_point(&at, level)?;
            let direct = satisfies(&m, &point, &f)?;
            let vars = point_vars(level);
            let sentence = standard_translation(&f, level, &vars)?;
            let assignment: BTreeMap<String, String> = vars
                .iter()
                .map(|v| v.name.clone())
                .zip(point.ids().iter().cloned())
                .collect();
            let translated = eval_fol(&translate_model(&m)?, &assignment, &sentence)?;
            println!("satisfies: {direct}");
            println!("translation: {translated}");
            if direct == translated {
                println!("AGREE");
                Ok(if direct { 0 } else { 1 })
            } else {
                println!("DISAGREE");
                Ok(3)
            }
        }
    }
}

fn run_family(
    model_a: &Path,
    model_b: &Path,
    mode: Mode,
    check: Option<PathBuf>,
    simulation: bool,
) -> Fallible<u8> {
    let ma = load_model(model_a)?;
    let mb = load_model(model_b)?;
    let kind = mode.kind();
    match check {
        None => {
            let family = if simulation {
                largest_simulation(&ma, &mb, kind)?
            } else {
                largest_bisimulation(&ma, &mb, kind)?
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&FamilyDocument::from_family(&family))?
            );
            Ok(if family.is_empty() { 1 } else { 0 })
        }
        Some(path) => {
            let doc: FamilyDocument = serde_json::from_str(&fs::read_to_string(&path)?)?;
            let family = doc.into_family()?;
            let verdict = if simulation {
                check_simulation(&ma, &mb, &family, kind)?
            } else {
                check_bisimulation(&ma, &mb, &family, kind)?
            };
            match verdict {
                Verdict::Holds => {
                    println!("holds");
                    Ok(0)
                }
                Verdict::Violated(v) => {
                    println!("{v}");
                    Ok(1)
                }
            }
        }
    }
}
