//! Command-line front end.
//!
//! Exit status: 0 holds or success, 1 fails (a witness is written), 2 unknown
//! or budget exhausted, 3 for any error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::arrow::{arrow_check, ramsey_table, ArrowQuery, Mode, Outcome, DEFAULT_CEILING};
use crate::blueprints::{
    check_coherence, check_indiscernible, em_model, extract_blueprint, Blueprint, BlueprintDoc,
    OutputStructure, OutputStructureDoc, TermTable,
};
use crate::colorings::{find_type_homogeneous, random_coloring, Coloring, ColoringDoc};
use crate::error::{Error, Result};
use crate::reductions::{reduce_ceq, reduce_chicolor, verify_report, ReductionReport};
use crate::structures::{make_canonical, BignessLevel, ClassKind, FinStructure, StructureDoc};
use crate::tuples::sub_tuples;
use crate::types::{enumerate_types, tuple_type};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "sprbench", version, about = "Finite structural partition relations, blueprints and term models")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count and list the increasing types of a class.
    Types {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        arity: usize,
        /// Bigness level of the structure the types are read from (at least the arity).
        #[arg(long, default_value_t = 0)]
        mu: u32,
    },
    /// Decide one instance of the arrow relation on the canonical structure.
    Arrow {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        lambda: u32,
        #[arg(long)]
        mu: u32,
        #[arg(long)]
        arity: usize,
        #[arg(long)]
        colors: u32,
        #[command(flatten)]
        mode: ModeArgs,
        /// Where a refuting coloring is written.
        #[arg(long, default_value = "witness.json")]
        out: PathBuf,
    },
    /// Verdicts for every ambient level from mu to lambda-max.
    Table {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        mu: u32,
        #[arg(long)]
        arity: usize,
        #[arg(long)]
        colors: u32,
        #[arg(long)]
        lambda_max: u32,
        #[command(flatten)]
        mode: ModeArgs,
        #[arg(long, default_value = "table.json")]
        out: PathBuf,
    },
    /// Run a coloring reduction on a given or seeded random coloring.
    Reduce {
        #[arg(long, value_enum)]
        kind: ReductionKind,
        /// File with {"structure": ..., "coloring": ...}; without it a random coloring is drawn.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Blocks of the colored chain for a random chicolor input.
        #[arg(long, default_value_t = 40)]
        lambda: u32,
        #[arg(long, default_value_t = 2)]
        chi: u32,
        /// Class count and class size for a random ceq input.
        #[arg(long, default_value_t = 6)]
        classes: usize,
        #[arg(long, default_value_t = 6)]
        class_size: usize,
        #[arg(long, default_value_t = 2)]
        arity: usize,
        #[arg(long, default_value_t = 2)]
        colors: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        mu: u32,
        /// Search-node budget per oracle call.
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        #[arg(long, default_value = "reduction.json")]
        out: PathBuf,
    },
    /// Extract a blueprint from a target structure.
    Extract {
        /// File with {"index": ..., "target": ..., "map": [...]}.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 0)]
        depth: usize,
        /// Comma-separated, non-increasing bigness levels, one per arity.
        #[arg(long, value_delimiter = ',')]
        levels: Vec<u32>,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        #[arg(long, default_value = "blueprint.json")]
        out: PathBuf,
    },
    /// Build the term model of a blueprint over an index structure.
    Em {
        /// Index structure file.
        #[arg(long)]
        index: PathBuf,
        /// Blueprint file, or an extraction report holding one.
        #[arg(long)]
        blueprint: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value = "em.json")]
        out: PathBuf,
    },
    /// Re-verify any file written by the other commands.
    Check { file: PathBuf },
}

#[derive(Args, Debug)]
struct ClassArgs {
    #[arg(long, value_enum)]
    class: ClassName,
    #[arg(long, default_value_t = 2)]
    chi: u32,
    #[arg(long, default_value_t = 2)]
    height: u32,
    /// Hypergraph arity bound.
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Hypergraph color count.
    #[arg(long, default_value_t = 2)]
    sigma: u32,
}

impl ClassArgs {
    fn kind(&self) -> Result<ClassKind> {
        let kind = match self.class {
            ClassName::Or => ClassKind::Or,
            ClassName::ChiOr => ClassKind::ChiOr { chi: self.chi },
            ClassName::ChiColor => ClassKind::ChiColor { chi: self.chi },
            ClassName::NTree => ClassKind::NTree { height: self.height },
            ClassName::Ceq => ClassKind::Ceq,
            ClassName::OrderedGraph => ClassKind::OrderedGraph,
            ClassName::Hypergraph => ClassKind::Hypergraph { arity_bound: self.k, colors: self.sigma },
        };
        kind.validate()?;
        Ok(kind)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClassName {
    Or,
    #[value(name = "chi_or", alias = "chi-or")]
    ChiOr,
    #[value(name = "chi_color", alias = "chi-color")]
    ChiColor,
    #[value(name = "n_tree", alias = "n-tree")]
    NTree,
    Ceq,
    #[value(name = "ordered_graph", alias = "ordered-graph", alias = "og")]
    OrderedGraph,
    #[value(name = "hypergraph", alias = "hg")]
    Hypergraph,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeName {
    Exhaustive,
    Randomized,
    #[value(alias = "counterexample-search")]
    Counterexample,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReductionKind {
    Chicolor,
    Ceq,
}

#[derive(Args, Debug)]
struct ModeArgs {
    #[arg(long, value_enum, default_value_t = ModeName::Exhaustive)]
    mode: ModeName,
    /// Colorings drawn in randomized mode.
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Proposed flips in counterexample mode.
    #[arg(long, default_value_t = 100_000)]
    budget: u64,
    /// Largest number of colorings exhaustive mode will enumerate.
    #[arg(long, default_value_t = DEFAULT_CEILING)]
    ceiling: u128,
}

impl ModeArgs {
    fn mode(&self) -> Mode {
        match self.mode {
            ModeName::Exhaustive => Mode::Exhaustive,
            ModeName::Randomized => Mode::Randomized { samples: self.samples, seed: self.seed },
            ModeName::Counterexample => Mode::CounterexampleSearch { budget: self.budget, seed: self.seed },
        }
    }
}

struct Report {
    code: i32,
    json: Value,
    text: String,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return code;
        }
    };
    let invocation: Vec<String> = std::iter::once("sprbench".to_string())
        .chain(args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()))
        .collect();
    match execute(&cli) {
        Ok(mut report) => {
            if let Value::Object(map) = &mut report.json {
                map.insert("tool".into(), json!("sprbench"));
                map.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
                map.insert("invocation".into(), json!(invocation));
            }
            let _ = if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report.json).expect("values serialize"))
            } else {
                write!(out, "{}", report.text)
            };
            report.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

/// JSON written to files: the payload plus tool name and version.
fn write_artifact(path: &Path, kind: &str, mut payload: Value) -> Result<()> {
    if let Value::Object(map) = &mut payload {
        map.insert("kind".into(), json!(kind));
        map.insert("tool".into(), json!("sprbench"));
        map.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    }
    let mut text = serde_json::to_string_pretty(&payload)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

fn field<T: serde::de::DeserializeOwned>(v: &Value, key: &str, path: &Path) -> Result<T> {
    let inner = v.get(key).ok_or_else(|| Error::Schema(format!("{}: missing field `{key}`", path.display())))?;
    serde_json::from_value(inner.clone()).map_err(|e| Error::Schema(format!("{}: field `{key}`: {e}", path.display())))
}

fn execute(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Types { class, arity, mu } => types_cmd(class.kind()?, *arity, *mu),
        Command::Arrow { class, lambda, mu, arity, colors, mode, out } => {
            let mut q = ArrowQuery::new(class.kind()?, *lambda, *mu, *arity, *colors, mode.mode());
            q.ceiling = mode.ceiling;
            arrow_cmd(&q, out)
        }
        Command::Table { class, mu, arity, colors, lambda_max, mode, out } => {
            table_cmd(class.kind()?, *mu, *arity, *colors, *lambda_max, mode, out)
        }
        Command::Reduce { kind, input, lambda, chi, classes, class_size, arity, colors, seed, mu, budget, out } => {
            let (base, col) = match input {
                Some(path) => {
                    let v = read_json(path)?;
                    let base = FinStructure::from_doc(&field::<StructureDoc>(&v, "structure", path)?)?;
                    let col = Coloring::from_doc(&base, &field::<ColoringDoc>(&v, "coloring", path)?)?;
                    (base, col)
                }
                None => {
                    let base = match kind {
                        ReductionKind::Chicolor => make_canonical(ClassKind::ChiColor { chi: *chi }, BignessLevel(*lambda))?,
                        ReductionKind::Ceq => FinStructure::ceq_with_sizes(&vec![*class_size; *classes]),
                    };
                    let col = random_coloring(&base, *arity, *colors, *seed)?;
                    (base, col)
                }
            };
            let report = match kind {
                ReductionKind::Chicolor => reduce_chicolor(&col, BignessLevel(*mu), *budget)?,
                ReductionKind::Ceq => reduce_ceq(&col, BignessLevel(*mu), *budget)?,
            };
            reduce_cmd(&base, &col, report, out)
        }
        Command::Extract { input, n_max, depth, levels, budget, out } => {
            let v = read_json(input)?;
            let index = FinStructure::from_doc(&field::<StructureDoc>(&v, "index", input)?)?;
            let target = OutputStructure::from_doc(&field::<OutputStructureDoc>(&v, "target", input)?)?;
            let map: Vec<u32> = field(&v, "map", input)?;
            let levels: Vec<BignessLevel> = levels.iter().map(|&l| BignessLevel(l)).collect();
            extract_cmd(&index, &target, &map, *n_max, *depth, &levels, *budget, out)
        }
        Command::Em { index, blueprint, depth, out } => {
            let index = FinStructure::from_json(&std::fs::read_to_string(index)?)?;
            let v = read_json(blueprint)?;
            let doc: BlueprintDoc = match v.get("blueprint") {
                Some(_) => field(&v, "blueprint", blueprint)?,
                None => serde_json::from_value(v).map_err(|e| Error::Schema(format!("{}: {e}", blueprint.display())))?,
            };
            let b = Blueprint::from_doc(&doc)?;
            em_cmd(&index, &b, depth.unwrap_or(b.depth), out)
        }
        Command::Check { file } => check_cmd(file),
    }
}

fn types_cmd(class: ClassKind, arity: usize, mu: u32) -> Result<Report> {
    let types = enumerate_types(class, arity, BignessLevel(mu))?;
    let mut text = format!("{} increasing {arity}-types of {class}\n", types.len());
    for t in &types {
        text.push_str(&format!("  {}  {}\n", t.code_base64(), t.describe()));
    }
    let listed: Vec<Value> = types.iter().map(|t| json!({"code": t.code_base64(), "description": t.describe()})).collect();
    Ok(Report {
        code: EXIT_OK,
        json: json!({"command": "types", "class": class, "arity": arity, "count": types.len(), "types": listed}),
        text,
    })
}

fn outcome_code(o: &Outcome) -> i32 {
    match o {
        Outcome::Holds => EXIT_OK,
        Outcome::Fails(_) => EXIT_FAILS,
        Outcome::Unknown => EXIT_UNKNOWN,
    }
}

fn arrow_cmd(q: &ArrowQuery, out: &Path) -> Result<Report> {
    let v = arrow_check(q)?;
    let mut text = format!(
        "({}) -> ({})^{}_{} in {}: {}\n  colorings examined: {}, all covered: {}, work: {}\n",
        q.lambda.0,
        q.mu.0,
        q.arity,
        q.colors,
        q.class,
        v.outcome.name(),
        v.colorings_examined,
        v.all_covered,
        v.work
    );
    if let Outcome::Fails(w) = &v.outcome {
        write_artifact(
            out,
            "witness",
            json!({"structure": w.base().to_doc(), "coloring": w.to_doc(), "level": q.mu.0}),
        )?;
        text.push_str(&format!("  witness written to {}\n", out.display()));
    }
    Ok(Report {
        code: outcome_code(&v.outcome),
        json: json!({
            "command": "arrow",
            "class": q.class,
            "lambda": q.lambda.0,
            "mu": q.mu.0,
            "arity": q.arity,
            "colors": q.colors,
            "verdict": v.to_doc(),
        }),
        text,
    })
}

fn table_cmd(class: ClassKind, mu: u32, arity: usize, colors: u32, lambda_max: u32, mode: &ModeArgs, out: &Path) -> Result<Report> {
    let table = ramsey_table(class, mu, arity, colors, lambda_max, mode.mode(), mode.ceiling)?;
    let mut text = format!("{:>8}  {:<8}  {:>12}\n", "lambda", "outcome", "examined");
    let mut rows = Vec::new();
    for (lambda, v) in &table.rows {
        text.push_str(&format!("{:>8}  {:<8}  {:>12}\n", lambda.0, v.outcome.name(), v.colorings_examined));
        let witness = match &v.outcome {
            Outcome::Fails(w) => Some(w.to_doc()),
            _ => None,
        };
        rows.push(json!({"lambda": lambda.0, "outcome": v.outcome.name(), "witness": witness}));
    }
    let least = table.least_holds.map(|l| l.0);
    match least {
        Some(l) => text.push_str(&format!("least holding lambda: {l}\n")),
        None => text.push_str("no holding lambda in range\n"),
    }
    let payload = json!({"class": class, "mu": mu, "arity": arity, "colors": colors, "rows": rows, "least_holds": least});
    write_artifact(out, "table", payload.clone())?;
    let code = if least.is_some() { EXIT_OK } else if table.rows.iter().all(|(_, v)| matches!(v.outcome, Outcome::Fails(_))) { EXIT_FAILS } else { EXIT_UNKNOWN };
    let mut json = payload;
    json["command"] = json!("table");
    Ok(Report { code, json, text })
}

fn reduce_cmd(base: &FinStructure, col: &Coloring, report: Option<ReductionReport>, out: &Path) -> Result<Report> {
    let Some(report) = report else {
        return Ok(Report {
            code: EXIT_UNKNOWN,
            json: json!({"command": "reduce", "found": false}),
            text: "no homogeneous set found within the budget\n".into(),
        });
    };
    write_artifact(out, "reduction", json!({"structure": base.to_doc(), "coloring": col.to_doc(), "report": report}))?;
    let text = format!(
        "{} reduction: {}-element type-homogeneous set {:?}\n  witness has {} types, {} search nodes, written to {}\n",
        report.reduction,
        report.subset.len(),
        report.subset,
        report.witness.len(),
        report.nodes,
        out.display()
    );
    Ok(Report { code: EXIT_OK, json: json!({"command": "reduce", "found": true, "report": report}), text })
}

#[allow(clippy::too_many_arguments)]
fn extract_cmd(
    index: &FinStructure,
    target: &OutputStructure,
    map: &[u32],
    n_max: usize,
    depth: usize,
    levels: &[BignessLevel],
    budget: u64,
    out: &Path,
) -> Result<Report> {
    let Some(ex) = extract_blueprint(index, target, map, n_max, depth, levels, budget)? else {
        return Ok(Report {
            code: EXIT_UNKNOWN,
            json: json!({"command": "extract", "found": false}),
            text: "no refinement found within the budget\n".into(),
        });
    };
    let doc = ex.blueprint.to_doc()?;
    write_artifact(
        out,
        "blueprint",
        json!({"index": index.to_doc(), "target": target.to_doc(), "map": map, "subset": ex.subset, "blueprint": doc}),
    )?;
    let text = format!(
        "blueprint with {} diagrams on a refined set of {} elements, written to {}\n",
        ex.blueprint.diagrams.len(),
        ex.subset.len(),
        out.display()
    );
    Ok(Report {
        code: EXIT_OK,
        json: json!({"command": "extract", "found": true, "subset": ex.subset, "blueprint": doc}),
        text,
    })
}

fn em_cmd(index: &FinStructure, b: &Blueprint, depth: usize, out: &Path) -> Result<Report> {
    let m = em_model(index, b, depth)?;
    let model = m.to_doc();
    write_artifact(
        out,
        "em_model",
        json!({"index": index.to_doc(), "blueprint": b.to_doc()?, "depth": depth, "model": model}),
    )?;
    let text = format!(
        "term model with {} elements over {} generators, written to {}\n",
        m.structure.size,
        m.generators.len(),
        out.display()
    );
    Ok(Report { code: EXIT_OK, json: json!({"command": "em", "model": model}), text })
}

fn verified(what: String) -> Result<Report> {
    Ok(Report { code: EXIT_OK, json: json!({"command": "check", "verified": true, "what": what}), text: format!("verified: {what}\n") })
}

fn rejected(what: String) -> Result<Report> {
    Ok(Report {
        code: EXIT_FAILS,
        json: json!({"command": "check", "verified": false, "reason": what}),
        text: format!("not verified: {what}\n"),
    })
}

fn check_cmd(path: &Path) -> Result<Report> {
    let v = read_json(path)?;
    let kind: String = field(&v, "kind", path)?;
    match kind.as_str() {
        "witness" => {
            let base = FinStructure::from_doc(&field::<StructureDoc>(&v, "structure", path)?)?;
            let col = Coloring::from_doc(&base, &field::<ColoringDoc>(&v, "coloring", path)?)?;
            let level = BignessLevel(field(&v, "level", path)?);
            let res = find_type_homogeneous(&col, level, u64::MAX)?;
            match res.found {
                None => verified(format!("no {}-big type-homogeneous subset exists", level.0)),
                Some((set, _)) => rejected(format!("type-homogeneous subset {set:?} exists")),
            }
        }
        "table" => {
            let class: ClassKind = field(&v, "class", path)?;
            let mu: u32 = field(&v, "mu", path)?;
            let rows: Vec<Value> = field(&v, "rows", path)?;
            let mut checked = 0;
            for row in &rows {
                let Some(w) = row.get("witness").filter(|w| !w.is_null()) else { continue };
                let lambda: u32 = field(row, "lambda", path)?;
                let base = make_canonical(class, BignessLevel(lambda))?;
                let doc: ColoringDoc = serde_json::from_value(w.clone())?;
                let col = Coloring::from_doc(&base, &doc)?;
                if find_type_homogeneous(&col, BignessLevel(mu), u64::MAX)?.found.is_some() {
                    return rejected(format!("witness at lambda={lambda} has a homogeneous subset"));
                }
                checked += 1;
            }
            verified(format!("{checked} witnesses refute their rows"))
        }
        "reduction" => {
            let base = FinStructure::from_doc(&field::<StructureDoc>(&v, "structure", path)?)?;
            let col = Coloring::from_doc(&base, &field::<ColoringDoc>(&v, "coloring", path)?)?;
            let report: ReductionReport = field(&v, "report", path)?;
            match verify_report(&col, &report) {
                Ok(()) => verified(format!("{}-element subset is {}-big and type-homogeneous", report.subset.len(), report.level)),
                Err(e) => rejected(e.to_string()),
            }
        }
        "blueprint" => {
            let index = FinStructure::from_doc(&field::<StructureDoc>(&v, "index", path)?)?;
            let target = OutputStructure::from_doc(&field::<OutputStructureDoc>(&v, "target", path)?)?;
            let map: Vec<u32> = field(&v, "map", path)?;
            let subset: Vec<usize> = field(&v, "subset", path)?;
            let b = Blueprint::from_doc(&field::<BlueprintDoc>(&v, "blueprint", path)?)?;
            if let Some(viol) = check_coherence(&b)?.first() {
                return rejected(format!("incoherent at {:?} on {}", viol.subset, viol.atom));
            }
            if map.len() != index.size() || subset.iter().any(|&i| i >= index.size()) {
                return rejected("map or subset does not fit the index".into());
            }
            for k in 1..=b.n_max.min(subset.len()) {
                let table = TermTable::new(&target.signature, k, b.depth)?;
                for t in sub_tuples(&subset, k) {
                    let elems: Vec<u32> = t.iter().map(|&i| map[i]).collect();
                    let d = target.diagram(&table, &elems)?;
                    if b.diagrams.get(&tuple_type(&index, &t)?) != Some(&d) {
                        return rejected(format!("image of {t:?} does not match its diagram"));
                    }
                }
            }
            verified(format!("coherent blueprint with {} diagrams matches the target on the refined set", b.diagrams.len()))
        }
        "em_model" => {
            let index = FinStructure::from_doc(&field::<StructureDoc>(&v, "index", path)?)?;
            let b = Blueprint::from_doc(&field::<BlueprintDoc>(&v, "blueprint", path)?)?;
            let depth: usize = field(&v, "depth", path)?;
            let m = em_model(&index, &b, depth)?;
            if serde_json::to_value(m.to_doc())? != v["model"] {
                return rejected("stored model differs from the regenerated one".into());
            }
            if let Some(f) = check_indiscernible(&index, &m.structure, &m.generator_assignment(), b.n_max, depth)? {
                return rejected(format!("generators {:?} and {:?} differ on {}", f.first, f.second, f.atom));
            }
            verified(format!("term model with {} elements regenerates and its generators are indiscernible", m.structure.size))
        }
        other => Err(Error::Schema(format!("{}: unknown artifact kind `{other}`", path.display()))),
    }
}
