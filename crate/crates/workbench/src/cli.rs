//! The `mttwb` command line.
//!
//! Exit codes: 0 success, 1 negative verdict or semantic error, 64 usage,
//! 65 unreadable or malformed input, 70 internal error. `difftest` uses
//! 0 equal, 1 counterexample, 2 any error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path as FsPath, PathBuf};

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::analysis::{self, ParamRenaming};
use crate::att::{format_cycle, Att};
use crate::constructions;
use crate::difftest::{self, DiffOutcome};
use crate::dynfv;
use crate::format::{self, print_rho, print_stage};
use crate::mtt::{Mtt, RhsLabel};
use crate::relabel::{Pipeline, Stage, Trel};
use crate::syntax::parse_tree;
use crate::tree::{Path, Tree};

pub const SCHEMA: u64 = 1;

#[derive(Parser, Debug)]
#[command(name = "mttwb", version, about = "Macro and attributed tree transducer workbench")]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a pipeline on input trees.
    Eval {
        #[command(flatten)]
        sources: Sources,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Run a static or bounded check.
    #[command(subcommand)]
    Check(Check),
    /// Build one transducer from another and print it.
    Convert(ConvertArgs),
    /// Compare two pipelines on every input up to a size bound.
    Difftest {
        /// Pipeline file: one or more documents applied in order.
        left: PathBuf,
        right: PathBuf,
        #[arg(long, default_value_t = 6)]
        bound: usize,
    },
    /// Export the attribute dependency graph of an ATT on one input as DOT.
    Graph {
        /// Relabelings to run first, then the ATT last.
        #[command(flatten)]
        sources: Sources,
        #[command(flatten)]
        input: InputArgs,
        /// Write the graph here instead of stdout.
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
        /// Include instances not reachable from the root attribute.
        #[arg(long)]
        full: bool,
    },
}

/// Stage files; their order on the command line is the pipeline order.
#[derive(Args, Debug, Default)]
struct Sources {
    #[arg(long, value_name = "FILE")]
    mtt: Vec<PathBuf>,
    #[arg(long, value_name = "FILE")]
    att: Vec<PathBuf>,
    #[arg(long, value_name = "FILE")]
    brel: Vec<PathBuf>,
    #[arg(long, value_name = "FILE")]
    trel: Vec<PathBuf>,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// An input tree, e.g. `#(a(e))`.
    #[arg(long, value_name = "TREE", required_unless_present = "input_file", conflicts_with = "input_file")]
    input: Option<String>,
    /// A file with one input tree per line.
    #[arg(long, value_name = "FILE")]
    input_file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Check {
    /// Search for a parameter renaming, or check a given one.
    Fv {
        #[arg(long, value_name = "FILE")]
        mtt: PathBuf,
        #[arg(long, value_name = "FILE")]
        rho: Option<PathBuf>,
    },
    /// Whether parameter positions shared by two states always agree
    Consistency {
        #[arg(long, value_name = "FILE")]
        mtt: PathBuf,
    },
    /// Whether every rule keeps all parameters of its state
    Nondeleting {
        #[arg(long, value_name = "FILE")]
        mtt: PathBuf,
    },
    /// Whether no rule's right-hand side is a bare parameter
    Nonerasing {
        #[arg(long, value_name = "FILE")]
        mtt: PathBuf,
    },
    /// Whether some input makes the attribute dependencies cyclic
    Circular {
        #[arg(long, value_name = "FILE")]
        att: PathBuf,
    },
    /// Bounded search for two call trees with different argument values.
    Dynfv {
        #[arg(long, value_name = "FILE")]
        mtt: PathBuf,
        #[arg(long, default_value_t = 6)]
        bound: usize,
        /// Relabeling files run before the MTT.
        #[arg(long, value_name = "FILE", num_args = 1..)]
        lookaround: Vec<PathBuf>,
    },
    /// Whether the node at `--path` of the rule for (state, symbol) can reach the output.
    Importance {
        #[arg(long, value_name = "FILE")]
        mtt: PathBuf,
        #[arg(long)]
        state: String,
        #[arg(long)]
        symbol: String,
        /// Dot-separated child indices; `root` for the whole right-hand side.
        #[arg(long)]
        path: String,
    },
    /// Whether parameter `--param` of `--state` appears in every output.
    Permanent {
        #[arg(long, value_name = "FILE")]
        mtt: PathBuf,
        #[arg(long)]
        state: String,
        #[arg(long)]
        param: usize,
    },
}

#[derive(Args, Debug)]
struct ConvertArgs {
    #[arg(long, value_enum)]
    to: Target,
    #[arg(long, value_name = "FILE")]
    mtt: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    att: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    trel: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    rho: Option<PathBuf>,
    /// Pipeline files for `--to gadget`.
    pipelines: Vec<PathBuf>,
    /// Write here instead of stdout.
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Target {
    Consistent,
    Att,
    AttDirect,
    FromAtt,
    Nondeleting,
    Nonerasing,
    DynfvAtt,
    Product,
    Gadget,
}

impl Target {
    fn name(self) -> String {
        self.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
    Semantic(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 64,
            Failure::Data(_) => 65,
            Failure::Semantic(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Semantic(m) => m,
        }
    }
}

fn semantic(e: impl std::fmt::Display) -> Failure {
    Failure::Semantic(e.to_string())
}

/// What a command prints, and how it exits.
struct Report {
    text: String,
    json: Value,
    code: i32,
}

impl Report {
    fn ok(text: String, json: Value) -> Report {
        Report { text, json, code: 0 }
    }

    fn verdict(pass: bool, text: String, json: Value) -> Report {
        Report { text, json, code: if pass { 0 } else { 1 } }
    }
}

/// Parses `args` (program name first), runs the command and returns its exit code.
pub fn run<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run_with<I, O, E>(args: I, out: &mut O, err: &mut E) -> i32
where
    I: IntoIterator<Item = OsString>,
    O: Write,
    E: Write,
{
    let matches = match Cli::command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    64
                }
            };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return 64;
        }
    };
    let is_difftest = matches!(cli.command, Command::Difftest { .. });
    let json = cli.json;
    let result = catch_unwind(AssertUnwindSafe(|| dispatch(cli, &matches)));
    match result {
        Ok(Ok(report)) => {
            if json {
                let mut v = report.json;
                if let Value::Object(map) = &mut v {
                    map.insert("schema".into(), json!(SCHEMA));
                }
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).unwrap_or_default());
            } else {
                let _ = write!(out, "{}", report.text);
                if !report.text.is_empty() && !report.text.ends_with('\n') {
                    let _ = writeln!(out);
                }
            }
            report.code
        }
        Ok(Err(f)) => {
            let code = if is_difftest { 2 } else { f.code() };
            if json {
                let v = json!({ "schema": SCHEMA, "error": f.message(), "exit": code });
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).unwrap_or_default());
            }
            let _ = writeln!(err, "mttwb: {}", f.message());
            code
        }
        Err(_) => {
            let _ = writeln!(err, "mttwb: internal error");
            if is_difftest {
                2
            } else {
                70
            }
        }
    }
}

fn dispatch(cli: Cli, matches: &ArgMatches) -> Result<Report, Failure> {
    let leaf = leaf_matches(matches);
    match cli.command {
        Command::Eval { input, .. } => eval(&ordered_stages(leaf)?, &input),
        Command::Check(c) => check(c),
        Command::Convert(c) => convert(c),
        Command::Difftest { left, right, bound } => run_difftest(&left, &right, bound),
        Command::Graph { input, dot, full, .. } => graph(&ordered_stages(leaf)?, &input, dot.as_deref(), full),
    }
}

fn leaf_matches(m: &ArgMatches) -> &ArgMatches {
    match m.subcommand() {
        Some((_, sub)) => leaf_matches(sub),
        None => m,
    }
}

/// `--mtt/--att/--brel/--trel` files in command-line order.
fn ordered_stages(m: &ArgMatches) -> Result<Vec<Stage>, Failure> {
    let mut files: Vec<(usize, &str, PathBuf)> = Vec::new();
    for id in ["mtt", "att", "brel", "trel"] {
        if let (Some(ix), Some(vals)) = (m.indices_of(id), m.get_many::<PathBuf>(id)) {
            files.extend(ix.zip(vals).map(|(i, p)| (i, id, p.clone())));
        }
    }
    if files.is_empty() {
        return Err(Failure::Usage("give at least one of --mtt, --att, --brel, --trel".into()));
    }
    files.sort_by_key(|f| f.0);
    files
        .into_iter()
        .map(|(_, kind, path)| {
            let text = read(&path)?;
            let parsed = match kind {
                "mtt" => format::parse_mtt(&text).map(Stage::Mtt),
                "att" => format::parse_att(&text).map(Stage::Att),
                "brel" => format::parse_brel(&text).map(Stage::Brel),
                _ => format::parse_trel(&text).map(Stage::Trel),
            };
            parsed.map_err(|e| data_error(&path, e))
        })
        .collect()
}

fn read(path: &FsPath) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Data(format!("cannot read {}: {e}", path.display())))
}

fn data_error(path: &FsPath, e: impl std::fmt::Display) -> Failure {
    Failure::Data(format!("{}: {e}", path.display()))
}

fn load_mtt(path: &FsPath) -> Result<Mtt, Failure> {
    format::parse_mtt(&read(path)?).map_err(|e| data_error(path, e))
}

fn load_att(path: &FsPath) -> Result<Att, Failure> {
    format::parse_att(&read(path)?).map_err(|e| data_error(path, e))
}

fn load_trel(path: &FsPath) -> Result<Trel, Failure> {
    format::parse_trel(&read(path)?).map_err(|e| data_error(path, e))
}

/// Every document of every file, in order.
fn load_pipeline(paths: &[PathBuf]) -> Result<Pipeline, Failure> {
    let mut stages = Vec::new();
    for p in paths {
        stages.extend(format::parse_documents(&read(p)?).map_err(|e| data_error(p, e))?);
    }
    Pipeline::new(stages).map_err(|e| Failure::Data(e.to_string()))
}

fn make_pipeline(stages: Vec<Stage>) -> Result<Pipeline, Failure> {
    Pipeline::new(stages).map_err(|e| Failure::Data(e.to_string()))
}

fn inputs(args: &InputArgs, p: &Pipeline) -> Result<Vec<Tree>, Failure> {
    let (text, origin) = match (&args.input, &args.input_file) {
        (Some(t), _) => (t.clone(), "--input".to_string()),
        (None, Some(f)) => (read(f)?, f.display().to_string()),
        (None, None) => return Err(Failure::Usage("give --input or --input-file".into())),
    };
    let lines: Vec<&str> = if args.input.is_some() {
        vec![text.trim()]
    } else {
        text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with("//")).collect()
    };
    lines
        .into_iter()
        .map(|l| parse_tree(l, p.input()).map_err(|e| Failure::Data(format!("{origin}: {e}"))))
        .collect()
}

fn eval(stages: &[Stage], input: &InputArgs) -> Result<Report, Failure> {
    let p = make_pipeline(stages.to_vec())?;
    let mut text = String::new();
    let mut results = Vec::new();
    for s in inputs(input, &p)? {
        let t = p.apply(&s).map_err(semantic)?;
        let _ = writeln!(text, "{t}");
        results.push(json!({ "input": s.to_string(), "output": t.to_string() }));
    }
    Ok(Report::ok(text, json!({ "command": "eval", "results": results })))
}

fn check(c: Check) -> Result<Report, Failure> {
    match c {
        Check::Fv { mtt, rho } => {
            let m = load_mtt(&mtt)?;
            match rho {
                Some(path) => {
                    let rho = format::parse_rho(&read(&path)?, &m).map_err(|e| data_error(&path, e))?;
                    let v = analysis::check_fv(&m, &rho).map_err(semantic)?;
                    let text = match &v {
                        None => "fv: the renaming works\n".to_string(),
                        Some(v) => format!("fv: violated: {v}\n"),
                    };
                    let witness = v.as_ref().map(|v| v.to_string());
                    Ok(Report::verdict(v.is_none(), text, check_json("fv", v.is_none(), witness, Some(&rho))))
                }
                None => match analysis::find_rho(&m).map_err(semantic)? {
                    Some(rho) => Ok(Report::ok(print_rho(&rho), check_json("fv", true, None, Some(&rho)))),
                    None => Ok(Report::verdict(
                        false,
                        "fv: no parameter renaming works\n".into(),
                        check_json("fv", false, None, None),
                    )),
                },
            }
        }
        Check::Consistency { mtt } => {
            let m = load_mtt(&mtt)?;
            let v = analysis::is_consistent(&m).map_err(semantic)?;
            let text = match &v {
                None => "consistent\n".to_string(),
                Some(v) => format!("inconsistent: {v}\n"),
            };
            let w = v.as_ref().map(|v| v.to_string());
            Ok(Report::verdict(v.is_none(), text, check_json("consistency", v.is_none(), w, None)))
        }
        Check::Nondeleting { mtt } => {
            let m = load_mtt(&mtt)?;
            let w = analysis::deletion_witness(&m).map(|e| e.to_string());
            let text = match &w {
                None => "nondeleting\n".to_string(),
                Some(w) => format!("deleting: {w}\n"),
            };
            Ok(Report::verdict(w.is_none(), text, check_json("nondeleting", w.is_none(), w.clone(), None)))
        }
        Check::Nonerasing { mtt } => {
            let m = load_mtt(&mtt)?;
            let w = m
                .rules()
                .find(|(_, _, rhs)| matches!(rhs.label(), RhsLabel::Param(_)))
                .map(|(q, sigma, rhs)| format!("rule ({},{}) is {rhs}", q.name(), sigma.name()));
            let pass = w.is_none();
            let text = match &w {
                None => "nonerasing\n".to_string(),
                Some(w) => format!("erasing: {w}\n"),
            };
            Ok(Report::verdict(pass, text, check_json("nonerasing", pass, w, None)))
        }
        Check::Circular { att } => {
            let a = load_att(&att)?;
            match a.is_circular() {
                None => Ok(Report::ok("noncircular\n".into(), check_json("circular", true, None, None))),
                Some(w) => {
                    let cycle = format_cycle(&w.cycle);
                    let text = format!("circular on {}: {cycle}\n", w.input);
                    let mut j = check_json("circular", false, Some(w.input.to_string()), None);
                    j["cycle"] = json!(cycle);
                    Ok(Report::verdict(false, text, j))
                }
            }
        }
        Check::Dynfv { mtt, bound, lookaround } => {
            let m = load_mtt(&mtt)?;
            let la = if lookaround.is_empty() { None } else { Some(load_pipeline(&lookaround)?) };
            let v = dynfv::check_dynamic_fv(&m, la.as_ref(), bound).map_err(semantic)?;
            let mut j = check_json("dynfv", v.passed(), None, None);
            j["bound"] = json!(bound);
            match &v {
                dynfv::DynFvVerdict::NoViolationUpTo { inputs, .. } => {
                    j["verdict"] = json!("no-violation-up-to-bound");
                    j["inputs"] = json!(inputs);
                }
                dynfv::DynFvVerdict::Violation(w) => {
                    j["witness"] = json!({
                        "source": w.source.to_string(),
                        "input": w.input.to_string(),
                        "node": w.node.to_string(),
                        "state": w.state,
                        "j": w.j,
                        "first": w.first.to_string(),
                        "second": w.second.to_string(),
                        "first_value": w.first_value.to_string(),
                        "second_value": w.second_value.to_string(),
                    });
                }
            }
            Ok(Report::verdict(v.passed(), format!("dynfv: {v}\n"), j))
        }
        Check::Importance { mtt, state, symbol, path } => {
            let m = load_mtt(&mtt)?;
            let v: Path = path.parse().map_err(Failure::Usage)?;
            let imp = analysis::is_important(&m, &state, &symbol, &v).map_err(semantic)?;
            let text = format!("{v} in rule ({state},{symbol}) is {}important\n", if imp { "" } else { "not " });
            Ok(Report::verdict(imp, text, check_json("importance", imp, None, None)))
        }
        Check::Permanent { mtt, state, param } => {
            let m = load_mtt(&mtt)?;
            let p = analysis::is_permanent(&m, &state, param).map_err(semantic)?;
            let text = format!("y{param} of {state} is {}permanent\n", if p { "" } else { "not " });
            Ok(Report::verdict(p, text, check_json("permanent", p, None, None)))
        }
    }
}

fn check_json(check: &str, pass: bool, witness: Option<String>, rho: Option<&ParamRenaming>) -> Value {
    let mut v = json!({ "check": check, "verdict": if pass { "pass" } else { "fail" } });
    if let Some(w) = witness {
        v["witness"] = json!(w);
    }
    if let Some(r) = rho {
        v["rho"] = json!(print_rho(r).lines().collect::<Vec<_>>());
    }
    v
}

fn rho_for(m: &Mtt, rho: Option<&PathBuf>) -> Result<ParamRenaming, Failure> {
    match rho {
        Some(path) => format::parse_rho(&read(path)?, m).map_err(|e| data_error(path, e)),
        None => analysis::find_rho(m)
            .map_err(semantic)?
            .ok_or_else(|| Failure::Semantic(format!("{} has no parameter renaming with the FV property", m.name()))),
    }
}

fn need<'a>(p: &'a Option<PathBuf>, flag: &str, target: Target) -> Result<&'a PathBuf, Failure> {
    p.as_ref().ok_or_else(|| Failure::Usage(format!("--to {} needs --{flag}", target.name())))
}

fn convert(c: ConvertArgs) -> Result<Report, Failure> {
    let t = c.to;
    if t != Target::Gadget && !c.pipelines.is_empty() {
        return Err(Failure::Usage("positional pipeline files are only read by --to gadget".into()));
    }
    let mut notes: Vec<String> = Vec::new();
    let (source, docs): (String, Vec<Stage>) = match t {
        Target::Consistent | Target::Att | Target::AttDirect => {
            let path = need(&c.mtt, "mtt", t)?;
            let m = load_mtt(path)?;
            let rho = rho_for(&m, c.rho.as_ref())?;
            notes.extend(print_rho(&rho).lines().map(|l| format!("rho {l}")));
            let doc: Stage = match t {
                Target::Consistent => constructions::expand_to_consistent(&m, &rho).map_err(semantic)?.into(),
                Target::Att => constructions::fv_to_att(&m, &rho).map_err(semantic)?.into(),
                _ => constructions::omega_direct(&m, &rho).map_err(semantic)?.into(),
            };
            (path.display().to_string(), vec![doc])
        }
        Target::FromAtt => {
            let path = need(&c.att, "att", t)?;
            let a = load_att(path)?;
            let m = constructions::att_to_consistent_mtt(&a).map_err(semantic)?;
            (path.display().to_string(), vec![m.into()])
        }
        Target::Nondeleting | Target::Nonerasing => {
            let path = need(&c.mtt, "mtt", t)?;
            let m = load_mtt(path)?;
            let nf = if t == Target::Nondeleting {
                constructions::nondeleting_nf(&m)
            } else {
                constructions::nonerasing_nf(&m)
            }
            .map_err(semantic)?;
            if let Some(rho) = &nf.renaming {
                notes.extend(print_rho(rho).lines().map(|l| format!("rho {l}")));
            }
            (path.display().to_string(), vec![nf.lookahead.into(), nf.core.into()])
        }
        Target::DynfvAtt => {
            let path = need(&c.mtt, "mtt", t)?;
            let m = load_mtt(path)?;
            let trel = dynfv::build_state_annotating_trel(&m);
            let a = dynfv::build_dynfv_att(&m).map_err(semantic)?;
            let order: Vec<String> = m.states().iter().map(|q| q.name().to_string()).collect();
            notes.push(format!("state order: {}", order.join(" ")));
            notes.push("reached-state sets are collected in post-order".into());
            (path.display().to_string(), vec![trel.into(), a.into()])
        }
        Target::Product => {
            let tp = need(&c.trel, "trel", t)?;
            let mp = need(&c.mtt, "mtt", t)?;
            let m = constructions::trel_mtt_product(&load_trel(tp)?, &load_mtt(mp)?).map_err(semantic)?;
            (format!("{} and {}", tp.display(), mp.display()), vec![m.into()])
        }
        Target::Gadget => {
            let [l, r] = c.pipelines.as_slice() else {
                return Err(Failure::Usage("--to gadget needs exactly two pipeline files".into()));
            };
            let p1 = load_pipeline(std::slice::from_ref(l))?;
            let p2 = load_pipeline(std::slice::from_ref(r))?;
            let (pre, m) = dynfv::equivalence_gadget(&p1, &p2).map_err(semantic)?;
            let mut docs = pre.into_stages();
            docs.push(m.into());
            (format!("{} and {}", l.display(), r.display()), docs)
        }
    };

    let mut text = format!("// generated by mttwb convert --to {} from {source}\n", t.name());
    for n in &notes {
        let _ = writeln!(text, "// {n}");
    }
    for d in &docs {
        text.push_str(&print_stage(d));
    }
    // Output must always re-read cleanly.
    format::parse_documents(&text).map_err(|e| Failure::Semantic(format!("generated output does not re-parse: {e}")))?;
    let j = json!({
        "command": "convert",
        "construction": t.name(),
        "source": source,
        "documents": docs.iter().map(|d| json!({ "kind": d.kind(), "name": d.name() })).collect::<Vec<_>>(),
    });
    match &c.output {
        Some(path) => {
            fs::write(path, &text).map_err(|e| Failure::Semantic(format!("cannot write {}: {e}", path.display())))?;
            Ok(Report::ok(format!("wrote {}\n", path.display()), j))
        }
        None => Ok(Report::ok(text, j)),
    }
}

fn run_difftest(left: &FsPath, right: &FsPath, bound: usize) -> Result<Report, Failure> {
    let p1 = load_pipeline(&[left.to_path_buf()])?;
    let p2 = load_pipeline(&[right.to_path_buf()])?;
    let r = difftest::equivalent_up_to(&p1, &p2, bound).map_err(semantic)?;
    let mut j = json!({ "command": "difftest", "bound": r.bound, "tested": r.tested });
    let code = match &r.outcome {
        DiffOutcome::Equal => {
            j["outcome"] = json!("equal-up-to-bound");
            0
        }
        DiffOutcome::Counterexample { input, out1, out2 } => {
            j["outcome"] = json!("counterexample");
            j["input"] = json!(input.to_string());
            j["out1"] = json!(out1.to_string());
            j["out2"] = json!(out2.to_string());
            1
        }
        DiffOutcome::StageError { input, pipeline, error } => {
            j["outcome"] = json!("stage-error");
            j["input"] = json!(input.to_string());
            j["pipeline"] = json!(pipeline);
            j["error"] = json!(error.to_string());
            2
        }
    };
    Ok(Report { text: format!("{r}\n"), json: j, code })
}

fn graph(stages: &[Stage], input: &InputArgs, dot: Option<&FsPath>, full: bool) -> Result<Report, Failure> {
    let Some((Stage::Att(a), pre)) = stages.split_last() else {
        return Err(Failure::Usage("graph needs an --att as the last stage".into()));
    };
    let pipeline = make_pipeline(stages.to_vec())?;
    let prefix = if pre.is_empty() { None } else { Some(make_pipeline(pre.to_vec())?) };
    let mut text = String::new();
    let mut graphs = Vec::new();
    for s in inputs(input, &pipeline)? {
        let s = match &prefix {
            Some(p) => p.apply(&s).map_err(semantic)?,
            None => s,
        };
        let g = if full { a.full_dependency_graph(&s) } else { a.dependency_graph(&s) };
        let cycle = g.shortest_cycle().map(|c| format_cycle(&c));
        graphs.push(json!({ "input": s.to_string(), "edges": g.edge_count(), "cycle": cycle }));
        text.push_str(&g.to_dot());
    }
    let j = json!({ "command": "graph", "graphs": graphs });
    match dot {
        Some(path) => {
            fs::write(path, &text).map_err(|e| Failure::Semantic(format!("cannot write {}: {e}", path.display())))?;
            Ok(Report::ok(format!("wrote {}\n", path.display()), j))
        }
        None => Ok(Report::ok(text, j)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(name: &str) -> String {
        format!("{}/samples/{name}", env!("CARGO_MANIFEST_DIR"))
    }

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("mttwb").chain(args.iter().copied()).map(OsString::from);
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn eval_abcd() {
        let (code, out, _) = run_str(&["eval", "--mtt", &sample("abcd.mtt"), "--input", "#(a(a(e)))"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "a(a(b(b(c(c(d(d(e))))))))");
    }

    #[test]
    fn check_fv_prints_renaming() {
        let (code, out, _) = run_str(&["check", "fv", "--mtt", &sample("abcd.mtt")]);
        assert_eq!(code, 0);
        assert_eq!(out, "q1 1 -> 1\nq2 1 -> 2\n");
    }

    #[test]
    fn check_circular_exits_one() {
        let (code, out, _) = run_str(&["check", "circular", "--att", &sample("loop.att")]);
        assert_eq!(code, 1);
        assert!(out.starts_with("circular on a(e):"), "{out}");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_str(&["frobnicate"]).0, 64);
        assert_eq!(run_str(&["eval", "--input", "e"]).0, 64);
        assert_eq!(run_str(&["eval", "--mtt", "/nonexistent.mtt", "--input", "e"]).0, 65);
        assert_eq!(run_str(&["eval", "--mtt", &sample("abcd.mtt"), "--input", "zz"]).0, 65);
        assert_eq!(run_str(&["--help"]).0, 0);
    }

    #[test]
    fn json_reports_carry_the_schema() {
        let (code, out, _) = run_str(&["--json", "check", "consistency", "--mtt", &sample("abcd.mtt")]);
        assert_eq!(code, 1);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["check"], "consistency");
        assert_eq!(v["verdict"], "fail");
    }

    #[test]
    fn stages_keep_command_line_order() {
        let m = ["--mtt", "a.mtt", "--brel", "b.brel", "--mtt", "c.mtt"];
        let matches = Cli::command()
            .try_get_matches_from(["mttwb", "eval"].iter().chain(m.iter()).chain(["--input", "e"].iter()))
            .unwrap();
        let leaf = leaf_matches(&matches);
        let mut files: Vec<(usize, String)> = Vec::new();
        for id in ["mtt", "brel"] {
            let ix = leaf.indices_of(id).unwrap();
            files.extend(ix.zip(leaf.get_many::<PathBuf>(id).unwrap()).map(|(i, p)| (i, p.display().to_string())));
        }
        files.sort();
        let names: Vec<&str> = files.iter().map(|f| f.1.as_str()).collect();
        assert_eq!(names, ["a.mtt", "b.brel", "c.mtt"]);
    }
}
