//! `veldkamp`: build polar spaces and their Veldkamp quadrangles, run the
//! verification suites, compute flat quotients and Moufang certificates.
//!
//! Exit codes: 0 all checks passed, 1 a requested check failed, 2 bad input
//! or unmet precondition, 3 a size cap was exceeded, 4 a theorem was violated.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use veldkamp::correspondence::{cone_in, polar_to_veldkamp};
use veldkamp::d3::verify_d3;
use veldkamp::moufang::{certify_moufang, verify_commutator_relations};
use veldkamp::presets;
use veldkamp::propositions::run_suite;
use veldkamp::quotient::flat_quotient;
use veldkamp::spaces::{LambdaSpace, DEFAULT_VECTOR_CAP};
use veldkamp::veldkamp::VeldkampGraph;
use veldkamp::Error;

#[derive(Parser)]
#[command(
    name = "veldkamp",
    version,
    about = "Polar spaces, Veldkamp quadrangles, flat quotients and root groups"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Refuse spaces with more vectors than this.
    #[arg(long, global = true, default_value_t = DEFAULT_VECTOR_CAP)]
    max_vectors: u128,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the singular points and lines of a space and write `space.json` and `graph.json`.
    Build {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: PathBuf,
        /// Write the cone at this point (by catalog id) as the graph instead of the full `Γ_S`.
        #[arg(long)]
        cone: Option<usize>,
        /// Also write `graph.dot`.
        #[arg(long)]
        dot: bool,
    },
    /// Check a graph file; prints a JSON report.
    Verify {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
    /// Compute the flat quotient of a green graph and write `quotient.json`.
    Quotient {
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        dot: bool,
    },
    /// Certify the Moufang condition and check the commutator relations of the root groups.
    Moufang {
        #[command(flatten)]
        input: OptionalInput,
        /// Check the D3 quadrangle over GF(p) instead.
        #[arg(long, value_name = "P", conflicts_with_all = ["preset", "lambda"])]
        d3: Option<u8>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Input {
    #[arg(long)]
    preset: Option<String>,
    /// A JSON descriptor file.
    #[arg(long)]
    lambda: Option<PathBuf>,
}

#[derive(Args)]
#[group(multiple = false)]
struct OptionalInput {
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    lambda: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Axioms,
    Propositions,
    All,
}

/// A command's outcome: the JSON to print and whether every check passed.
struct Report {
    json: Value,
    passed: bool,
}

fn load_lambda(preset: &Option<String>, lambda: &Option<PathBuf>) -> veldkamp::Result<LambdaSpace> {
    match (preset, lambda) {
        (Some(name), None) => presets::lambda(name),
        (None, Some(path)) => LambdaSpace::from_json(&fs::read_to_string(path)?),
        _ => Err(Error::invalid("give exactly one of --preset and --lambda")),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> veldkamp::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), text)?;
    Ok(())
}

fn read_graph(path: &Path) -> veldkamp::Result<VeldkampGraph> {
    VeldkampGraph::from_json(&fs::read_to_string(path)?)
}

fn build(
    input: &Input,
    cap: u128,
    out: &Path,
    cone: Option<usize>,
    dot: bool,
) -> veldkamp::Result<Report> {
    let l = load_lambda(&input.preset, &input.lambda)?;
    let catalog = l.enumerate_singular(cap)?;
    let s = catalog.line_space();
    let full = polar_to_veldkamp(&s)?;
    let graph = match cone {
        None => full,
        Some(d) if d < s.num_points() => {
            let rank = s.rank()?;
            if rank < 3 {
                return Err(Error::precondition(format!(
                    "cones need rank ≥ 3, this space has rank {rank}"
                )));
            }
            cone_in(&s, &full, d).graph
        }
        Some(d) => {
            return Err(Error::invalid(format!(
                "no point {d}; the space has {} points",
                s.num_points()
            )))
        }
    };
    write(out, "space.json", &catalog.to_json()?)?;
    write(out, "graph.json", &graph.to_json()?)?;
    if dot {
        write(out, "graph.dot", &graph.to_dot())?;
    }
    Ok(Report {
        json: json!({
            "points": s.num_points(),
            "lines": s.num_lines(),
            "graph": {"vertices": graph.n(), "points": graph.points().len(), "lines": graph.lines().len()},
            "cone": cone,
        }),
        passed: true,
    })
}

fn verify(path: &Path, suite: Suite) -> veldkamp::Result<Report> {
    let g = read_graph(path)?;
    let mut json = json!({
        "vertices": g.n(),
        "green": g.is_green(),
        "flat": g.is_flat(),
    });
    let mut passed = true;
    if matches!(suite, Suite::Axioms | Suite::All) {
        let axioms = g.check_axioms();
        passed &= axioms.all_passed();
        json["axioms"] = serde_json::to_value(&axioms)?;
        if axioms.connected_bipartite.passed
            && axioms.unique_straight_paths.passed
            && axioms.straight_closure.passed
        {
            json["generalized_quadrangle"] = json!(g.is_generalized_polygon()?);
        }
    }
    if matches!(suite, Suite::Propositions | Suite::All) {
        let checks = run_suite(&g)?;
        passed &= checks.iter().all(|c| c.passed);
        json["propositions"] = serde_json::to_value(&checks)?;
    }
    json["passed"] = json!(passed);
    Ok(Report { json, passed })
}

fn quotient(path: &Path, out: &Path, dot: bool) -> veldkamp::Result<Report> {
    let g = read_graph(path)?;
    let q = flat_quotient(&g)?;
    write(out, "quotient.json", &q.to_json()?)?;
    if dot {
        write(out, "quotient.dot", &q.graph.to_dot())?;
    }
    Ok(Report {
        json: json!({
            "input_vertices": g.n(),
            "quotient_vertices": q.graph.n(),
            "point_classes": q.point_classes.histogram(),
            "line_classes": q.line_classes.histogram(),
            "weeds": q.weed_count,
            "flat": q.graph.is_flat(),
        }),
        passed: true,
    })
}

fn moufang(input: &OptionalInput, cap: u128, d3: Option<u8>) -> veldkamp::Result<Report> {
    if let Some(p) = d3 {
        let r = verify_d3(p)?;
        return Ok(Report {
            passed: r.passed,
            json: serde_json::to_value(&r)?,
        });
    }
    let l = load_lambda(&input.preset, &input.lambda)?;
    let cert = certify_moufang(&l, cap)?;
    let relations = verify_commutator_relations(&l)?;
    Ok(Report {
        passed: cert.passed,
        json: json!({"certificate": cert, "relations": relations}),
    })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CapExceeded { .. } => 3,
        Error::TheoremViolation { .. } => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let (result, out) = match &cli.command {
        Command::Build {
            input,
            out,
            cone,
            dot,
        } => (build(input, cli.max_vectors, out, *cone, *dot), None),
        Command::Verify { graph, suite } => (verify(graph, *suite), None),
        Command::Quotient { graph, out, dot } => (quotient(graph, out, *dot), None),
        Command::Moufang { input, d3, out } => {
            (moufang(input, cli.max_vectors, *d3), out.as_deref())
        }
    };
    match result {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report.json).expect("reports serialize");
            if let Some(dir) = out {
                if let Err(e) = write(dir, "certificate.json", &text) {
                    eprintln!("error: {e}");
                    return ExitCode::from(exit_code(&e));
                }
            }
            println!("{text}");
            ExitCode::from(if report.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
