//! `mvcml`: decide, evaluate and certify many-valued coalgebraic modal
//! logic from the command line.
//!
//! Exit status is 0 for an affirmative answer, 1 for a negative answer
//! (a witness is printed) and 2 for an error, reported on one line as
//! `error: <kind>: <message>`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use mvcml_core::algebra::ResiduatedLattice;
use mvcml_core::decision::{Decider, StageCache, Verdict};
use mvcml_core::functor::{Budget, FunctorKind};
use mvcml_core::lifting::{
    check_alpha_preservation, check_naturality, FamilyRange, NaturalityOptions, PredicateLifting, PreservationBounds,
};
use mvcml_core::proofkit::{check_derivation, one_step_soundness_report, Derivation, ModalAxiomSet, SoundnessBounds};
use mvcml_core::report::{Status, ValidationReport};
use mvcml_core::semantics::{
    check_lemma1, check_truth_lemma, eval_model, eval_step, Iota0, Logic, SessionConfig, TModel,
};
use mvcml_core::syntax::Formula;
use mvcml_core::Error;

#[derive(Parser)]
#[command(name = "mvcml", version, about = "Many-valued coalgebraic modal logic workbench")]
struct Cli {
    #[command(flatten)]
    session: SessionArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SessionArgs {
    /// Emit a JSON report on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// JSON session file: algebra, functor, props, budget, cache_dir, iota0.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Built-in algebra (`boolean`, `L3`, `lukasiewicz:4`, `G3`) or an algebra file.
    #[arg(long, global = true)]
    algebra: Option<String>,
    /// `powerset`, `fuzzyhom`, `neighborhood`, `selection`, `distribution:<q>`.
    #[arg(long, global = true)]
    functor: Option<String>,
    /// Comma-separated proposition symbols.
    #[arg(long, global = true, value_delimiter = ',')]
    props: Option<Vec<String>>,
    /// Largest set enumerated in full.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Directory for cached stage towers.
    #[arg(long, global = true, env = "MVCML_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Is the formula valid?
    Valid { formula: String },
    /// Is the formula satisfiable? Prints a witnessing stage element.
    Sat { formula: String },
    /// Do the premises entail the formula? The last argument is the conclusion.
    Entails {
        #[arg(required = true, num_args = 1..)]
        formulas: Vec<String>,
    },
    /// Evaluate a formula on a model file.
    Eval {
        #[arg(long)]
        model: PathBuf,
        formula: String,
    },
    /// Enumerate a stage of the final sequence.
    Stage {
        n: usize,
        /// Print every element.
        #[arg(long)]
        dump: bool,
        /// Formula evaluated at each dumped element (repeatable).
        #[arg(long = "formula")]
        formulas: Vec<String>,
    },
    /// Modal depth of a formula.
    Rank { formula: String },
    #[command(subcommand)]
    Check(CheckCommand),
    /// List the modalities shipped for the functor.
    Liftings,
    /// Check the residuated-lattice axioms of an algebra file or built-in.
    ValidateAlgebra { file: String },
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Model semantics against stage semantics along σ.
    TruthLemma {
        #[arg(long)]
        model: PathBuf,
        formula: String,
    },
    /// The ι maps at stage n: inductive against closed form, and sections of γ.
    Lemma1 { n: usize },
    /// Naturality of a shipped modality.
    Naturality {
        lifting: String,
        #[arg(long, default_value_t = 2)]
        bound: usize,
        #[arg(long, default_value_t = 2_000)]
        sample: u64,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
    /// α-preservation of a unary modality.
    Preservation {
        lifting: String,
        #[arg(long)]
        alpha: String,
        /// Restrict the right-hand family to singletons.
        #[arg(long)]
        singletons: bool,
        #[arg(long, default_value_t = 2)]
        set_size: usize,
        #[arg(long, default_value_t = 2)]
        family_size: usize,
    },
    /// One-step soundness premises for an axiom file at stage n.
    Axioms {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Rule shapes and strata of a derivation file.
    Derivation {
        file: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        /// Axiom file referenced by `axiom` nodes.
        #[arg(long)]
        axioms: Option<PathBuf>,
    },
}

/// What a command produced: the exit status plus text and JSON renderings.
struct Outcome {
    affirmative: bool,
    text: String,
    json: Value,
}

impl Outcome {
    fn verdict(yes: &str, no: &str, v: &Verdict) -> Outcome {
        let mut text = if v.answer { yes } else { no }.to_string();
        if let Some(w) = &v.witness {
            text.push_str(&format!("\nwitness: {}", w.decoded));
            for (f, val) in &w.values {
                text.push_str(&format!("\n  {f} = {val}"));
            }
            if let Some(m) = &w.model {
                text.push_str(&format!("\nmodel: {m}"));
            }
        }
        Outcome {
            affirmative: v.answer,
            text,
            json: json!({ "answer": if v.answer { yes } else { no }, "verdict": v }),
        }
    }

    fn report(r: &ValidationReport) -> Outcome {
        Outcome {
            affirmative: r.passed(),
            text: r.to_string().trim_end().to_string(),
            json: to_value(r),
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_algebra(spec: &str) -> Result<ResiduatedLattice, Error> {
    let path = Path::new(spec);
    if path.is_file() {
        ResiduatedLattice::load_json(&read(path)?)
    } else {
        ResiduatedLattice::builtin_from_spec(spec)
    }
}

struct Session {
    logic: Logic,
    iota0: Iota0,
    cache: Option<StageCache>,
}

impl Session {
    fn open(args: &SessionArgs) -> Result<Session, Error> {
        let mut config = match &args.config {
            Some(p) => serde_json::from_str::<SessionConfig>(&read(p)?)?,
            None => SessionConfig::default(),
        };
        if let Some(a) = &args.algebra {
            config.algebra = a.clone();
        }
        if let Some(f) = &args.functor {
            config.functor = FunctorKind::parse(f)?;
        }
        if let Some(p) = &args.props {
            config.props = p.clone();
        }
        if let Some(b) = args.budget {
            config.budget = Some(Budget { max_elements: b });
        }
        let cache_dir = args.cache_dir.clone().or(config.cache_dir.map(PathBuf::from));
        let logic = Logic::new(
            load_algebra(&config.algebra)?,
            config.functor,
            config.props,
            config.budget.unwrap_or_default(),
        )?;
        Ok(Session {
            logic,
            iota0: config.iota0.unwrap_or_default(),
            cache: cache_dir.map(StageCache::new),
        })
    }

    fn decider(self) -> Decider {
        Decider::new(self.logic, self.iota0, self.cache)
    }

    fn lifting(&self, name: &str) -> Result<Box<dyn PredicateLifting>, Error> {
        let f = self.logic.parse_modality_name(name)?;
        Ok(Box::new(self.logic.registry().resolve(&f)?))
    }
}

trait ModalityName {
    fn parse_modality_name(&self, name: &str) -> Result<String, Error>;
}

impl ModalityName for Logic {
    /// Normalizes `M[0.5]` to `M[1/2]` by round-tripping through the parser.
    fn parse_modality_name(&self, name: &str) -> Result<String, Error> {
        if !name.contains('[') {
            return Ok(name.to_string());
        }
        let arity = self
            .registry()
            .list()
            .into_iter()
            .find(|l| name.starts_with(l.name.split('[').next().unwrap_or_default()))
            .map_or(1, |l| l.arity);
        let args = vec!["0"; arity].join(", ");
        match self.parse(&format!("{name}({args})"))? {
            Formula::Modal(n, _) => Ok(n),
            _ => Err(Error::UnknownModality(name.to_string())),
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    let session = Session::open(&cli.session)?;
    let lg = &session.logic;
    Ok(match cli.command {
        Command::Valid { formula } => {
            let phi = lg.parse(&formula)?;
            Outcome::verdict("VALID", "NOT VALID", &session.decider().validity(&phi)?)
        }
        Command::Sat { formula } => {
            let phi = lg.parse(&formula)?;
            Outcome::verdict("SATISFIABLE", "UNSATISFIABLE", &session.decider().satisfiable(&phi)?)
        }
        Command::Entails { mut formulas } => {
            let conclusion = lg.parse(&formulas.pop().expect("clap requires one"))?;
            let premises = formulas.iter().map(|f| lg.parse(f)).collect::<Result<Vec<_>, _>>()?;
            Outcome::verdict("ENTAILED", "NOT ENTAILED", &session.decider().consequence(&premises, &conclusion)?)
        }
        Command::Eval { model, formula } => {
            let phi = lg.parse(&formula)?;
            let m = TModel::from_json(lg, &read(&model)?)?;
            let v = eval_model(lg, &m, &phi)?;
            let labels: Vec<&str> = v.values().iter().map(|x| lg.label(*x)).collect();
            Outcome {
                affirmative: true,
                text: labels.iter().enumerate().map(|(s, l)| format!("s{s}: {l}")).collect::<Vec<_>>().join("\n"),
                json: json!({ "formula": lg.print(&phi), "values": labels }),
            }
        }
        Command::Stage { n, dump, formulas } => {
            let phis = formulas.iter().map(|f| lg.parse(f)).collect::<Result<Vec<_>, _>>()?;
            let decider = session.decider();
            let tower = decider.tower(n)?;
            let lg = decider.logic();
            let size = tower.size(n);
            let tables = phis.iter().map(|f| eval_step(&tower, n, f)).collect::<Result<Vec<_>, _>>()?;
            let mut text = format!("stage {n}: {size} elements");
            let mut rows = Vec::new();
            if dump {
                for t in 0..size {
                    let vals: Vec<(String, String)> = phis
                        .iter()
                        .zip(&tables)
                        .map(|(f, tb)| (lg.print(f), lg.label(tb.get(t as usize)).to_string()))
                        .collect();
                    let mut line = format!("{t}\t{}", tower.describe(n, t));
                    for (f, v) in &vals {
                        line.push_str(&format!("\t{f} = {v}"));
                    }
                    text.push('\n');
                    text.push_str(&line);
                    rows.push(json!({ "id": t, "element": tower.describe(n, t), "values": vals }));
                }
            }
            Outcome {
                affirmative: true,
                text,
                json: json!({ "stage": n, "elements": size, "dump": if dump { Value::from(rows) } else { Value::Null } }),
            }
        }
        Command::Rank { formula } => {
            let r = lg.parse(&formula)?.rank();
            Outcome {
                affirmative: true,
                text: r.to_string(),
                json: json!({ "rank": r }),
            }
        }
        Command::Liftings => {
            let list = lg.registry().list();
            Outcome {
                affirmative: true,
                text: list
                    .iter()
                    .map(|l| format!("{}\tarity {}\t{}\t{}", l.name, l.arity, l.functor, l.formula))
                    .collect::<Vec<_>>()
                    .join("\n"),
                json: to_value(&list),
            }
        }
        Command::ValidateAlgebra { file } => {
            let path = Path::new(&file);
            let lat = if path.is_file() {
                ResiduatedLattice::from_file(serde_json::from_str(&read(path)?)?)?
            } else {
                ResiduatedLattice::builtin_from_spec(&file)?
            };
            Outcome::report(&lat.validate().report(&lat))
        }
        Command::Check(c) => check(session, c)?,
    })
}

fn check(session: Session, c: CheckCommand) -> Result<Outcome, Error> {
    let lg = &session.logic;
    Ok(match c {
        CheckCommand::TruthLemma { model, formula } => {
            let phi = lg.parse(&formula)?;
            let m = TModel::from_json(lg, &read(&model)?)?;
            let n = phi.rank();
            let decider = session.decider();
            // enumerated stage only when it fits the budget
            let tower = match decider.tower(n) {
                Ok(t) => Some(t),
                Err(Error::Budget { .. }) => None,
                Err(e) => return Err(e),
            };
            Outcome::report(&check_truth_lemma(decider.logic(), &m, &phi, tower.as_deref())?)
        }
        CheckCommand::Lemma1 { n } => {
            let decider = session.decider();
            Outcome::report(&check_lemma1(&*decider.tower(n)?, n)?)
        }
        CheckCommand::Naturality { lifting, bound, sample, seed } => {
            let l = session.lifting(&lifting)?;
            let opts = NaturalityOptions {
                bound,
                sample,
                seed,
                ..NaturalityOptions::default()
            };
            Outcome::report(&check_naturality(l.as_ref(), lg.functor(), &opts)?)
        }
        CheckCommand::Preservation { lifting, alpha, singletons, set_size, family_size } => {
            let l = session.lifting(&lifting)?;
            let a = lg
                .lattice()
                .resolve(&alpha)
                .ok_or_else(|| Error::InvalidParameter(format!("`{alpha}` is not an element of {}", lg.lattice().name())))?;
            let bounds = PreservationBounds {
                set_size,
                family_size,
                right: if singletons { FamilyRange::Singletons } else { FamilyRange::Any },
            };
            Outcome::report(&check_alpha_preservation(l.as_ref(), lg.functor(), a, &bounds, lg.budget())?)
        }
        CheckCommand::Axioms { file, n } => {
            let axioms = ModalAxiomSet::from_json(lg, &read(&file)?)?;
            let liftings = axioms
                .modalities()
                .iter()
                .map(|m| lg.registry().resolve(m))
                .collect::<Result<Vec<_>, _>>()?;
            let refs: Vec<&dyn PredicateLifting> = liftings.iter().map(|l| l as &dyn PredicateLifting).collect();
            let decider = session.decider();
            let tower = decider.tower(n)?;
            Outcome::report(&one_step_soundness_report(&tower, &axioms, &refs, n, &SoundnessBounds::default())?)
        }
        CheckCommand::Derivation { file, n, axioms } => {
            let axioms = match axioms {
                Some(p) => ModalAxiomSet::from_json(lg, &read(&p)?)?,
                None => ModalAxiomSet::new([])?,
            };
            let tree = Derivation::from_json(lg, &read(&file)?)?;
            Outcome::report(&check_derivation(lg, &axioms, &tree, n)?)
        }
    })
}

/// Writes a line to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let as_json = cli.session.json;
    match run(cli) {
        Ok(out) => {
            if as_json {
                let status = if out.affirmative { Status::Pass } else { Status::Fail };
                let doc = json!({ "status": status, "result": out.json });
                emit(&serde_json::to_string_pretty(&doc).expect("json"));
            } else {
                emit(&out.text);
            }
            ExitCode::from(if out.affirmative { 0 } else { 1 })
        }
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            if as_json {
                emit(&json!({ "status": "error", "error": { "kind": e.kind(), "message": message } }).to_string());
            }
            eprintln!("error: {}: {message}", e.kind());
            ExitCode::from(2)
        }
    }
}
