//! Batch front-end: balls, definition comparisons, automorphism reports,
//! mashups, structure trees and the corpus suite.
//!
//! Exit codes: 0 success, 2 validation error, 3 resource cap exceeded,
//! 4 inconclusive classification.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use freeprod::automorphism::{
    is_sheet_preserving, validate, verify_on_ball, AutError, AutomorphismSpec,
};
use freeprod::battery::{
    auto_battery, corpus, find_factor_swap_witness, find_stabiliser_witness, named_factor,
    valency_violations,
};
use freeprod::equivalence::{compare_definitions, Definition, EquivError, RootedFactors};
use freeprod::graph::{cayley_graph, FiniteGraph, GraphJson, GroupTable};
use freeprod::product::{Factor, FactorSystem, FactorVertex, GraphProduct, ProductError, Word};
use freeprod::structure_tree::{
    build_structure_tree, decompose_norm_one, norm_and_classify, Classification, TreeError,
    TreeNode,
};

#[derive(Parser)]
#[command(
    name = "freeprod",
    version,
    about = "Free products of graphs: balls, automorphisms, structure trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export a ball of the free product.
    Ball {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        out: OutputArgs,
        /// Centre word (labels separated by spaces or commas); defaults to ∅.
        #[arg(long)]
        center: Option<String>,
    },
    /// Compare the ball of several free-product definitions.
    Compare {
        #[command(flatten)]
        system: SystemArgs,
        /// Definitions: 1 words, 2 mswz, 3 pisanski-tucker, 4 quenell.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        defs: Vec<String>,
        #[arg(long, default_value_t = 3)]
        radius: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Verify and classify an automorphism spec.
    Auto {
        #[command(flatten)]
        system: SystemArgs,
        /// Spec JSON file.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 4)]
        radius: usize,
        /// Emit the σ∘β decomposition when the norm is one.
        #[arg(long)]
        decompose: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Export a ball of the graph product over a commutation graph.
    Mashup {
        #[command(flatten)]
        system: SystemArgs,
        /// `edgeless`, `complete`, or a graph JSON file on the factor indices.
        #[arg(long, default_value = "edgeless")]
        base: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Export the structure-tree window of a ball.
    StructureTree {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the corpus batteries and print one line per check.
    Suite {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random specs per corpus system.
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 3)]
        radius: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SystemArgs {
    /// Factors: graph JSON files, `group:<file>` for a group table, or names
    /// such as `C3`, `K4`, `P3`, `S2`, `T1`, `tree:<d>`.
    #[arg(long, num_args = 1.., required = true)]
    factors: Vec<String>,
    /// Initial vertices, comma separated; labels or indices.
    #[arg(long)]
    init: Option<String>,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, default_value_t = 2)]
    radius: usize,
    #[arg(long, default_value_t = 50_000, value_parser = clap::value_parser!(u64).range(1..))]
    cap: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<ProductError> for Failure {
    fn from(e: ProductError) -> Self {
        let code = if matches!(e, ProductError::CapExceeded { .. }) {
            3
        } else {
            2
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<AutError> for Failure {
    fn from(e: AutError) -> Self {
        match e {
            AutError::Product(p) => p.into(),
            other => Failure::validation(other.to_string()),
        }
    }
}

impl From<TreeError> for Failure {
    fn from(e: TreeError) -> Self {
        match e {
            TreeError::Aut(a) => a.into(),
            other => Failure::validation(other.to_string()),
        }
    }
}

impl From<EquivError> for Failure {
    fn from(e: EquivError) -> Self {
        match e {
            EquivError::Product(p) => p.into(),
            other => Failure::validation(other.to_string()),
        }
    }
}

type Outcome = Result<u8, Failure>;

/// A factor with the root recorded in its file, if any.
fn load_factor(arg: &str) -> Result<(Factor, Option<usize>), Failure> {
    if let Some(path) = arg.strip_prefix("group:") {
        let text = read(Path::new(path))?;
        let group: GroupTable =
            serde_json::from_str(&text).map_err(|e| Failure::validation(format!("{path}: {e}")))?;
        let g = cayley_graph(&group).map_err(|e| Failure::validation(format!("{path}: {e}")))?;
        return Ok((Factor::finite(g), Some(group.identity())));
    }
    if let Some(f) = named_factor(arg) {
        return Ok((f, None));
    }
    let text = read(Path::new(arg))?;
    let doc: GraphJson =
        serde_json::from_str(&text).map_err(|e| Failure::validation(format!("{arg}: {e}")))?;
    let g = doc
        .to_graph()
        .map_err(|e| Failure::validation(format!("{arg}: {e}")))?;
    Ok((Factor::finite(g), doc.root))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::validation(format!("{}: {e}", path.display())))
}

fn load_system(args: &SystemArgs) -> Result<FactorSystem, Failure> {
    let mut factors = Vec::new();
    let mut roots = Vec::new();
    for a in &args.factors {
        let (f, r) = load_factor(a)?;
        roots.push(r);
        factors.push(f);
    }
    let init: Vec<FactorVertex> = match &args.init {
        Some(text) => {
            let names: Vec<&str> = text.split(',').map(str::trim).collect();
            if names.len() != factors.len() {
                return Err(Failure::validation(format!(
                    "--init names {} vertices for {} factors",
                    names.len(),
                    factors.len()
                )));
            }
            names
                .iter()
                .zip(&factors)
                .enumerate()
                .map(|(i, (n, f))| {
                    f.resolve(n)
                        .ok_or_else(|| Failure::validation(format!("factor {i} has no vertex {n}")))
                })
                .collect::<Result<_, _>>()?
        }
        None => factors
            .iter()
            .zip(&roots)
            .map(|(f, r)| {
                r.map(FactorVertex::Index)
                    .unwrap_or_else(|| f.base_vertex())
            })
            .collect(),
    };
    Ok(FactorSystem::new(factors, init)?)
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => {
            fs::write(p, text).map_err(|e| Failure::validation(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialise");
    s.push('\n');
    s
}

fn cmd_ball(system: &SystemArgs, out: &OutputArgs, center: &Option<String>) -> Outcome {
    let fs = load_system(system)?;
    let c = match center {
        Some(t) => fs
            .parse_word(t)
            .ok_or_else(|| Failure::validation(format!("cannot parse word {t}")))?,
        None => Word::empty(),
    };
    let ball = fs.ball_with_cap(&c, out.radius, out.cap as usize)?;
    let text = match out.format {
        Format::Json => pretty(&serde_json::to_value(ball.to_json()).expect("balls serialise")),
        Format::Dot => ball.to_dot(|w| fs.word_text(w)),
    };
    emit(&out.output, &text)?;
    Ok(0)
}

fn parse_definition(s: &str) -> Result<Definition, Failure> {
    Ok(match s.trim() {
        "1" | "words" => Definition::Words,
        "2" | "mswz" => Definition::Mswz,
        "3" | "pt" | "pisanski-tucker" => Definition::PisanskiTucker,
        "4" | "quenell" => Definition::Quenell,
        other => return Err(Failure::validation(format!("unknown definition {other}"))),
    })
}

fn cmd_compare(
    system: &SystemArgs,
    defs: &[String],
    radius: usize,
    output: &Option<PathBuf>,
) -> Outcome {
    let fs = load_system(system)?;
    let mut graphs = Vec::new();
    let mut roots = Vec::new();
    for (i, f) in fs.factors().iter().enumerate() {
        let g = f
            .graph()
            .ok_or_else(|| Failure::validation(format!("factor {i} must be finite here")))?;
        graphs.push(g.clone());
        roots.push(fs.init()[i].index().expect("finite factor"));
    }
    let rooted = RootedFactors::new(graphs, roots)?;
    let defs: Vec<Definition> = defs
        .iter()
        .map(|d| parse_definition(d))
        .collect::<Result<_, _>>()?;
    let reports = compare_definitions(&rooted, &defs, radius)?;
    emit(
        output,
        &pretty(&serde_json::to_value(reports).expect("reports serialise")),
    )?;
    Ok(0)
}

fn cmd_auto(
    system: &SystemArgs,
    spec: &Path,
    radius: usize,
    decompose: bool,
    output: &Option<PathBuf>,
) -> Outcome {
    let fs = load_system(system)?;
    let text = read(spec)?;
    let spec: AutomorphismSpec = serde_json::from_str(&text)
        .map_err(|e| Failure::validation(format!("{}: {e}", spec.display())))?;
    validate(&fs, &spec)?;
    let report = verify_on_ball(&fs, &spec, radius)?;
    let (sheets, colours) = is_sheet_preserving(&fs, &spec, radius)?;
    let mut code = 0;
    let (classification, decomposition) = if !report.passed || !sheets {
        (
            json!({ "error": "not a sheet-preserving automorphism on the ball" }),
            Value::Null,
        )
    } else {
        let c = norm_and_classify(&fs, &spec, radius)?;
        if matches!(c, Classification::Inconclusive { .. }) {
            code = 4;
        }
        let d = if decompose && c.norm() == Some(1) {
            let (sigma, beta) = decompose_norm_one(&fs, &spec, radius)?;
            json!({ "sigma": sigma, "beta": beta })
        } else {
            Value::Null
        };
        (c.to_json(), d)
    };
    let doc = json!({
        "verify": report,
        "sheet_preserving": sheets,
        "colour_preserving": colours,
        "classification": classification,
        "decomposition": decomposition,
    });
    emit(output, &pretty(&doc))?;
    Ok(code)
}

fn cmd_mashup(system: &SystemArgs, base: &str, out: &OutputArgs) -> Outcome {
    let fs = load_system(system)?;
    let n = fs.n();
    let b = match base {
        "edgeless" => FiniteGraph::empty(n),
        "complete" => FiniteGraph::complete(n),
        path => {
            let doc: GraphJson = serde_json::from_str(&read(Path::new(path))?)
                .map_err(|e| Failure::validation(format!("{path}: {e}")))?;
            doc.to_graph()
                .map_err(|e| Failure::validation(format!("{path}: {e}")))?
        }
    };
    let labels = fs.clone();
    let product = GraphProduct::new(fs, b)?;
    let ball = product.ball(out.radius, out.cap as usize)?;
    let text = match out.format {
        Format::Json => pretty(&serde_json::to_value(ball.to_json()).expect("balls serialise")),
        Format::Dot => ball.to_dot(|w| labels.word_text(w)),
    };
    emit(&out.output, &text)?;
    Ok(0)
}

fn tree_dot(fs: &FactorSystem, nodes: &[TreeNode], edges: &[(usize, usize)]) -> String {
    let mut out = String::from("graph structure_tree {\n");
    for (i, n) in nodes.iter().enumerate() {
        let (label, shape) = match n {
            TreeNode::Vertex(w) => (fs.word_text(w), "circle"),
            TreeNode::Sheet(s) => (
                format!("S({}, {})", fs.word_text(&s.anchor), s.colour),
                "box",
            ),
        };
        let _ = writeln!(
            out,
            "  n{i} [label=\"{}\", shape={shape}];",
            label.replace('"', "\\\"")
        );
    }
    for (a, b) in edges {
        let _ = writeln!(out, "  n{a} -- n{b};");
    }
    out.push_str("}\n");
    out
}

fn cmd_structure_tree(system: &SystemArgs, out: &OutputArgs) -> Outcome {
    let fs = load_system(system)?;
    // The window holds the ball, so the cap applies to the ball first.
    fs.ball_with_cap(&Word::empty(), out.radius, out.cap as usize)?;
    let tw = build_structure_tree(&fs, out.radius)?;
    let text = match out.format {
        Format::Json => pretty(&tw.to_json()),
        Format::Dot => tree_dot(&fs, &tw.nodes, &tw.edges),
    };
    emit(&out.output, &text)?;
    Ok(0)
}

fn cmd_suite(seed: u64, count: usize, radius: usize, output: &Option<PathBuf>) -> Outcome {
    let mut checks = Vec::new();
    let mut record = |name: String, ok: bool, detail: Value| {
        println!("{} {name}", if ok { "PASS" } else { "FAIL" });
        checks.push(json!({ "check": name, "passed": ok, "detail": detail }));
    };
    for (i, s) in corpus().into_iter().enumerate() {
        let v = valency_violations(&s.system, radius)?;
        record(
            format!("{} valency", s.name),
            v == 0,
            json!({ "violations": v }),
        );
        let rep = auto_battery(
            s.name,
            &s.system,
            count,
            radius,
            seed.wrapping_add(i as u64),
        )?;
        record(
            format!("{} automorphisms", s.name),
            rep.passed(),
            serde_json::to_value(&rep).expect("serialise"),
        );
    }
    let names = ["T1", "C3", "C4", "K4"];
    for (i, a) in names.iter().enumerate() {
        for b in &names[i..] {
            let graphs = [a, b].map(|n| {
                named_factor(n)
                    .and_then(|f| f.graph().cloned())
                    .expect("finite")
            });
            let rooted = RootedFactors::new(graphs.to_vec(), vec![0, 0])?;
            let reports = compare_definitions(&rooted, &Definition::ALL, radius)?;
            let ok = reports.iter().all(|r| r.isomorphic);
            record(format!("{a}*{b} definitions"), ok, json!(reports.len()));
        }
    }
    let star = corpus()
        .into_iter()
        .find(|s| s.name == "S2*C3")
        .expect("corpus system")
        .system;
    let swap = corpus()
        .into_iter()
        .find(|s| s.name == "C3*C3*T1")
        .expect("corpus system")
        .system;
    for k in 1..=radius {
        let w = find_stabiliser_witness(&star, 1, &[0, 2, 1], k)?;
        record(
            format!("S2*C3 stabiliser witness level {k}"),
            w.is_some(),
            json!(w.map(|w| w.spec)),
        );
        let w = find_factor_swap_witness(&swap, 0, 1, k)?;
        record(
            format!("C3*C3*T1 factor-swap witness level {k}"),
            w.is_some(),
            json!(w.map(|w| w.spec)),
        );
    }
    let failed = checks.iter().filter(|c| c["passed"] == false).count();
    if output.is_some() {
        emit(
            output,
            &pretty(&json!({ "seed": seed, "checks": checks, "failed": failed })),
        )?;
    }
    println!(
        "{} of {} checks passed",
        checks.len() - failed,
        checks.len()
    );
    Ok(if failed == 0 { 0 } else { 2 })
}

fn run(cli: Cli) -> Outcome {
    match &cli.command {
        Command::Ball {
            system,
            out,
            center,
        } => cmd_ball(system, out, center),
        Command::Compare {
            system,
            defs,
            radius,
            output,
        } => cmd_compare(system, defs, *radius, output),
        Command::Auto {
            system,
            spec,
            radius,
            decompose,
            output,
        } => cmd_auto(system, spec, *radius, *decompose, output),
        Command::Mashup { system, base, out } => cmd_mashup(system, base, out),
        Command::StructureTree { system, out } => cmd_structure_tree(system, out),
        Command::Suite {
            seed,
            count,
            radius,
            output,
        } => cmd_suite(*seed, *count, *radius, output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
