//! Command line front end.
//!
//! One binary, one subcommand per library entry point. Human-readable
//! output goes to standard output, diagnostics to standard error, and
//! `--json` replaces standard output with a single machine-readable run
//! report. Exit codes: 0 success, 1 bad input, 2 property violation.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use muig::gen::{random_representation, GenParams};
use muig::maxcut::{
    counterexample, maxcut, maxcut_bounded_columns, maxcut_bruteforce, MaxcutOptions,
};
use muig::{
    build_expr_columns, build_expr_groups, build_model, build_model_checked,
    build_model_per_component, cut_size, cwd_upper_bounds, eval_expression, graph_of_model,
    graph_of_representation, group_structure, model_to_intervals, parse_sexpr, validate_model,
    Cut, Graph, Representation, UBubbleModel, VertexId,
};

#[derive(Parser)]
#[command(name = "muig", version, about = "Mixed unit interval graph toolkit")]
struct Cli {
    /// Emit one machine-readable run report on standard output.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads where an algorithm supports them. Never changes any
    /// result, only how fast it arrives.
    #[arg(long, global = true, value_name = "N")]
    parallel: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the bubble model of an interval representation (.muir file).
    BuildModel {
        input: PathBuf,
        /// Write the model JSON here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Build each connected component separately and stack the models.
        #[arg(long)]
        per_component: bool,
        /// Re-verify the construction invariants after every insertion.
        #[arg(long)]
        debug_properties: bool,
    },
    /// Exact maximum cut of a model.
    Maxcut {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = Algo::Dp)]
        algo: Algo,
        /// Heavy-column size threshold; only meaningful for the dp algorithm.
        #[arg(long)]
        threshold: Option<usize>,
        /// Also report one optimal cut.
        #[arg(long)]
        with_cut: bool,
    },
    /// Emit a clique-width expression for a model.
    Cwd {
        model: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        /// Write the expression here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a clique-width expression file to a graph.
    EvalExpr { expr: PathBuf },
    /// Clique-width upper bounds of a model.
    Bounds { model: PathBuf },
    /// Check a model file: structural validity plus the interval roundtrip.
    Verify { model: PathBuf },
    /// Draw a seeded random representation and write it as .muir.
    Gen {
        /// Number of intervals.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Left endpoints land on multiples of 1/GRID.
        #[arg(long, default_value_t = 4)]
        grid: i64,
        /// Draw weights for the ++, +-, -+, -- kinds.
        #[arg(long, value_parser = parse_kinds, default_value = "1,1,1,1")]
        kinds: KindWeights,
        /// Chance of repeating the previous left endpoint and kind.
        #[arg(long, default_value_t = 0.2)]
        twin_rate: f64,
        /// Left endpoints range over [0, WINDOW].
        #[arg(long, default_value_t = 3)]
        window: i64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Reproduce the two-column model where the refuted cut recurrence fails.
    Counterexample,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Brute,
    Dp,
    Bounded,
}

impl Algo {
    fn as_str(self) -> &'static str {
        match self {
            Algo::Brute => "brute",
            Algo::Dp => "dp",
            Algo::Bounded => "bounded",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Columns,
    Groups,
}

impl Method {
    fn as_str(self) -> &'static str {
        match self {
            Method::Columns => "columns",
            Method::Groups => "groups",
        }
    }
}

#[derive(Clone)]
struct KindWeights([u32; 4]);

fn parse_kinds(s: &str) -> Result<KindWeights, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err("expected four comma-separated weights".into());
    }
    let mut weights = [0u32; 4];
    for (slot, part) in weights.iter_mut().zip(parts) {
        *slot = part.trim().parse().map_err(|_| format!("bad weight {part:?}"))?;
    }
    if weights.iter().all(|&w| w == 0) {
        return Err("at least one weight must be positive".into());
    }
    Ok(KindWeights(weights))
}

/// Exit code 1: the user handed us something unusable. Exit code 2: an
/// internal cross-check failed, which means a bug, not bad input.
enum Failure {
    Input(anyhow::Error),
    Property(anyhow::Error),
}

type CmdResult<T> = Result<T, Failure>;

fn bad_input(err: anyhow::Error) -> Failure {
    Failure::Input(err)
}

fn violated(err: anyhow::Error) -> Failure {
    Failure::Property(err)
}

struct Outcome {
    result: Value,
    human: Vec<String>,
    exit: i32,
}

impl Outcome {
    fn ok(result: Value, human: Vec<String>) -> Outcome {
        Outcome { result, human, exit: 0 }
    }
}

#[derive(Serialize)]
struct RunReport {
    subcommand: &'static str,
    inputs: Vec<String>,
    parameters: Value,
    result: Value,
    elapsed_ms: u64,
    version: &'static str,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    std::process::exit(run(cli));
}

fn run(cli: Cli) -> i32 {
    let started = Instant::now();
    let (subcommand, inputs, parameters) = describe(&cli);
    match execute(&cli) {
        Ok(outcome) => {
            if cli.json {
                let report = RunReport {
                    subcommand,
                    inputs,
                    parameters,
                    result: outcome.result,
                    elapsed_ms: started.elapsed().as_millis() as u64,
                    version: env!("CARGO_PKG_VERSION"),
                };
                println!("{}", serde_json::to_string(&report).expect("report serializes"));
            } else {
                for line in &outcome.human {
                    println!("{line}");
                }
            }
            outcome.exit
        }
        Err(Failure::Input(err)) => {
            eprintln!("error: {err:#}");
            1
        }
        Err(Failure::Property(err)) => {
            eprintln!("error: {err:#}");
            2
        }
    }
}

fn describe(cli: &Cli) -> (&'static str, Vec<String>, Value) {
    let path = |p: &Path| p.display().to_string();
    match &cli.command {
        Command::BuildModel { input, output, per_component, debug_properties } => (
            "build-model",
            vec![path(input)],
            json!({
                "output": output.as_deref().map(path),
                "per_component": per_component,
                "debug_properties": debug_properties,
            }),
        ),
        Command::Maxcut { model, algo, threshold, with_cut } => (
            "maxcut",
            vec![path(model)],
            json!({
                "algo": algo.as_str(),
                "threshold": threshold,
                "with_cut": with_cut,
                "parallel": cli.parallel,
            }),
        ),
        Command::Cwd { model, method, output } => (
            "cwd",
            vec![path(model)],
            json!({ "method": method.as_str(), "output": output.as_deref().map(path) }),
        ),
        Command::EvalExpr { expr } => ("eval-expr", vec![path(expr)], json!({})),
        Command::Bounds { model } => ("bounds", vec![path(model)], json!({})),
        Command::Verify { model } => ("verify", vec![path(model)], json!({})),
        Command::Gen { n, seed, grid, kinds, twin_rate, window, output } => (
            "gen",
            Vec::new(),
            json!({
                "n": n,
                "seed": seed,
                "grid": grid,
                "kinds": kinds.0,
                "twin_rate": twin_rate,
                "window": window,
                "output": path(output),
            }),
        ),
        Command::Counterexample => ("counterexample", Vec::new(), json!({})),
    }
}

fn execute(cli: &Cli) -> CmdResult<Outcome> {
    match &cli.command {
        Command::BuildModel { input, output, per_component, debug_properties } => {
            cmd_build_model(input, output.as_deref(), *per_component, *debug_properties)
        }
        Command::Maxcut { model, algo, threshold, with_cut } => {
            cmd_maxcut(model, *algo, *threshold, *with_cut, cli.parallel)
        }
        Command::Cwd { model, method, output } => cmd_cwd(model, *method, output.as_deref()),
        Command::EvalExpr { expr } => cmd_eval_expr(expr),
        Command::Bounds { model } => cmd_bounds(model),
        Command::Verify { model } => cmd_verify(model),
        Command::Gen { n, seed, grid, kinds, twin_rate, window, output } => {
            cmd_gen(*n, *seed, *grid, kinds, *twin_rate, *window, output)
        }
        Command::Counterexample => cmd_counterexample(),
    }
}

fn read_text(path: &Path) -> CmdResult<String> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(bad_input)
}

fn write_text(path: &Path, text: &str) -> CmdResult<()> {
    fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(bad_input)
}

/// Loads and fully validates a model file; any defect is an input error.
fn load_model(path: &Path) -> CmdResult<UBubbleModel> {
    let text = read_text(path)?;
    let model = UBubbleModel::from_json(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(bad_input)?;
    let violations = validate_model(&model);
    if let Some(first) = violations.first() {
        return Err(bad_input(anyhow!(
            "{}: invalid model ({first}{})",
            path.display(),
            if violations.len() > 1 {
                format!(" and {} more", violations.len() - 1)
            } else {
                String::new()
            }
        )));
    }
    Ok(model)
}

fn graph_counts(g: &Graph) -> (usize, usize) {
    (g.vertex_count(), g.edge_count())
}

fn cmd_build_model(
    input: &Path,
    output: Option<&Path>,
    per_component: bool,
    debug_properties: bool,
) -> CmdResult<Outcome> {
    let text = read_text(input)?;
    let rep = Representation::parse_muir(&text)
        .with_context(|| format!("parsing {}", input.display()))
        .map_err(bad_input)?;
    if rep.is_empty() {
        return Err(bad_input(anyhow!("{}: no intervals", input.display())));
    }
    let model = if debug_properties {
        build_model_checked(&rep).map_err(|err| match err {
            muig::build::BuildError::Representation(e) => bad_input(e.into()),
            muig::build::BuildError::Property(e) => violated(e.into()),
        })?
    } else if per_component {
        build_model_per_component(&rep).map_err(|e| bad_input(e.into()))?
    } else {
        build_model(&rep).map_err(|e| bad_input(e.into()))?
    };
    let violations = validate_model(&model);
    if !violations.is_empty() {
        return Err(violated(anyhow!("construction produced an invalid model: {}", violations[0])));
    }
    let (n, m) = graph_counts(&graph_of_model(&model));
    let json_text = model.to_json();
    let mut result = json!({
        "columns": model.column_count(),
        "rows": model.max_rows(),
        "vertices": n,
        "edges": m,
    });
    let human;
    if let Some(out) = output {
        write_text(out, &json_text)?;
        result["path"] = json!(out.display().to_string());
        human = vec![format!(
            "wrote model to {} ({} columns, {} rows, {} vertices, {} edges)",
            out.display(),
            model.column_count(),
            model.max_rows(),
            n,
            m
        )];
    } else {
        result["model"] =
            serde_json::from_str(&json_text).expect("model JSON parses back");
        human = vec![json_text];
    }
    Ok(Outcome::ok(result, human))
}

fn cmd_maxcut(
    path: &Path,
    algo: Algo,
    threshold: Option<usize>,
    with_cut: bool,
    parallel: Option<usize>,
) -> CmdResult<Outcome> {
    if threshold.is_some() && algo != Algo::Dp {
        return Err(bad_input(anyhow!("--threshold only applies to --algo dp")));
    }
    let model = load_model(path)?;
    let graph = graph_of_model(&model);
    let (n, m) = graph_counts(&graph);
    let (value, cut, used_threshold, parts) = match algo {
        Algo::Brute => {
            if n > 26 {
                return Err(bad_input(anyhow!(
                    "exhaustive search handles at most 26 vertices, this model has {n}"
                )));
            }
            let (value, cut) = maxcut_bruteforce(&graph, with_cut);
            (value, cut, None, None)
        }
        Algo::Dp => {
            let res = maxcut(&model, &MaxcutOptions { threshold, with_cut, parallel });
            (res.value, res.cut, res.threshold, Some(res.parts))
        }
        Algo::Bounded => {
            let res = maxcut_bounded_columns(&model, with_cut);
            (res.value, res.cut, None, Some(res.parts))
        }
    };
    let members: Option<Vec<VertexId>> =
        cut.map(|c| c.members.into_iter().collect());
    if let Some(ids) = &members {
        let check = cut_size(&graph, &Cut::new(ids.iter().copied()))
            .expect("witness uses model vertices");
        if check != value {
            return Err(violated(anyhow!(
                "witness cut crosses {check} edges but the reported value is {value}"
            )));
        }
    }
    let mut result = json!({
        "algo": algo.as_str(),
        "value": value,
        "vertices": n,
        "edges": m,
        "threshold": used_threshold,
        "parts": parts,
    });
    let mut human = vec![format!("maxcut value: {value}")];
    human.push(match (algo, used_threshold, parts) {
        (Algo::Dp, Some(t), Some(p)) => format!("algorithm: dp (threshold {t}, {p} parts)"),
        (Algo::Bounded, _, Some(p)) => format!("algorithm: bounded ({p} parts)"),
        _ => "algorithm: brute".to_string(),
    });
    if let Some(ids) = members {
        human.push(format!(
            "cut: {}",
            ids.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
        ));
        result["cut"] = json!(ids);
    }
    Ok(Outcome::ok(result, human))
}

fn cmd_cwd(path: &Path, method: Method, output: Option<&Path>) -> CmdResult<Outcome> {
    let model = load_model(path)?;
    let expr = match method {
        Method::Columns => build_expr_columns(&model),
        Method::Groups => build_expr_groups(&model),
    };
    let (evaluated, width) = eval_expression(&expr)
        .map_err(|e| violated(anyhow!("emitted expression does not evaluate: {e}")))?;
    if evaluated != graph_of_model(&model) {
        return Err(violated(anyhow!("emitted expression evaluates to the wrong graph")));
    }
    let bound = match method {
        Method::Columns => model.column_count() + 3,
        Method::Groups => group_structure(&model).phi + 2,
    };
    if width > bound {
        return Err(violated(anyhow!("expression width {width} exceeds the bound {bound}")));
    }
    let nodes = expr.node_count();
    let text = expr.to_sexpr();
    let mut result = json!({
        "method": method.as_str(),
        "width": width,
        "nodes": nodes,
        "vertices": evaluated.vertex_count(),
        "edges": evaluated.edge_count(),
    });
    let human;
    if let Some(out) = output {
        write_text(out, &text)?;
        result["path"] = json!(out.display().to_string());
        human = vec![format!(
            "wrote expression to {} (method {}, width {width}, {nodes} nodes)",
            out.display(),
            method.as_str()
        )];
    } else {
        eprintln!("method {}: width {width}, {nodes} nodes", method.as_str());
        result["expression"] = json!(text);
        human = vec![text];
    }
    Ok(Outcome::ok(result, human))
}

fn cmd_eval_expr(path: &Path) -> CmdResult<Outcome> {
    let text = read_text(path)?;
    let expr = parse_sexpr(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(bad_input)?;
    let (graph, width) = eval_expression(&expr)
        .with_context(|| format!("evaluating {}", path.display()))
        .map_err(bad_input)?;
    let (n, m) = graph_counts(&graph);
    let result = json!({ "vertices": n, "edges": m, "width": width });
    let human = vec![format!("{n} vertices, {m} edges, width {width}")];
    Ok(Outcome::ok(result, human))
}

fn cmd_bounds(path: &Path) -> CmdResult<Outcome> {
    let model = load_model(path)?;
    let report = cwd_upper_bounds(&model);
    let result = serde_json::to_value(&report).expect("report serializes");
    let human = vec![
        format!(
            "columns: {}, rows: {}, alpha: {}, omega: {}, phi: {}",
            report.columns, report.rows, report.alpha, report.omega, report.phi
        ),
        format!(
            "upper bounds: columns {}, rows {}, alpha {}, phi {}, omega {}",
            report.from_columns,
            report.from_rows,
            report.from_alpha,
            report.from_phi,
            report.from_omega
        ),
        format!("best: {}", report.best),
    ];
    Ok(Outcome::ok(result, human))
}

fn cmd_verify(path: &Path) -> CmdResult<Outcome> {
    let text = read_text(path)?;
    let model = UBubbleModel::from_json(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(bad_input)?;
    let violations: Vec<String> =
        validate_model(&model).iter().map(|v| v.to_string()).collect();
    let here = graph_of_model(&model);
    let roundtrip = match graph_of_representation(&model_to_intervals(&model)) {
        Ok(back) => back == here,
        Err(_) => false,
    };
    let ok = violations.is_empty() && roundtrip;
    let (n, m) = graph_counts(&here);
    let result = json!({
        "valid": violations.is_empty(),
        "violations": violations,
        "roundtrip": roundtrip,
        "vertices": n,
        "edges": m,
        "ok": ok,
    });
    let mut human: Vec<String> =
        violations.iter().map(|v| format!("violation: {v}")).collect();
    human.push(format!("structure: {}", if violations.is_empty() { "ok" } else { "FAILED" }));
    human.push(format!("roundtrip: {}", if roundtrip { "ok" } else { "FAILED" }));
    human.push(format!("verdict: {}", if ok { "ok" } else { "FAILED" }));
    Ok(Outcome { result, human, exit: if ok { 0 } else { 2 } })
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    n: usize,
    seed: u64,
    grid: i64,
    kinds: &KindWeights,
    twin_rate: f64,
    window: i64,
    output: &Path,
) -> CmdResult<Outcome> {
    if n == 0 {
        return Err(bad_input(anyhow!("--n must be at least 1")));
    }
    if grid < 1 {
        return Err(bad_input(anyhow!("--grid must be at least 1")));
    }
    if window < 0 {
        return Err(bad_input(anyhow!("--window must be nonnegative")));
    }
    if !(0.0..=1.0).contains(&twin_rate) {
        return Err(bad_input(anyhow!("--twin-rate must lie in [0, 1]")));
    }
    let params = GenParams {
        n,
        seed,
        grid_denominator: grid,
        kind_weights: kinds.0,
        twin_rate,
        window,
    };
    let rep = random_representation(&params);
    write_text(output, &rep.to_muir())?;
    let result = json!({
        "n": n,
        "seed": seed,
        "path": output.display().to_string(),
    });
    let human = vec![format!("wrote {n} intervals to {}", output.display())];
    Ok(Outcome::ok(result, human))
}

fn cmd_counterexample() -> CmdResult<Outcome> {
    let report = counterexample();
    if report.bruteforce != report.dp {
        return Err(violated(anyhow!(
            "exhaustive search says {} but the dp says {}",
            report.bruteforce,
            report.dp
        )));
    }
    let result = json!({
        "brute": report.bruteforce,
        "dp": report.dp,
        "claimed": report.claimed,
        "witness": report.witness,
    });
    let human = vec![
        format!("brute={}", report.bruteforce),
        format!("dp={}", report.dp),
        format!("claimed={}", report.claimed),
        format!(
            "witness={}",
            report.witness.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
        ),
    ];
    Ok(Outcome::ok(result, human))
}
