//! `mtw`: command-line front end for metric-tree widths.
//!
//! Exit codes: 0 success, 1 domain error or failing suite, 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use num_traits::Signed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use metric_widths::harness::{self, RandomInstanceSpec};
use metric_widths::io::{self, json as js};
use metric_widths::radial::{ball_width, region_width, RadialBall, RadialRegion};
use metric_widths::widths::{
    self, brute_force_tn_width, compact_width, p1_check, p1_witness, tn_width, width_sequence, WidthProblem,
};
use metric_widths::{format_rational, parse_rational, MetricTree, Rational, TreePoint};

#[derive(Parser)]
#[command(name = "mtw", version, about = "Tn-widths and compact widths on finite metric trees")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Output::Json, global = true)]
    output: Output,
    /// Add floating-point approximations next to exact values.
    #[arg(long, global = true)]
    approx: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Plain,
}

#[derive(Args)]
struct TreeArg {
    /// Tree file: TSV edge list or Newick.
    #[arg(long)]
    tree: PathBuf,
}

#[derive(Args)]
struct SetArgs {
    #[command(flatten)]
    tree: TreeArg,
    /// Points file (`V id` or `E u v offset` per line).
    #[arg(long)]
    points: PathBuf,
}

#[derive(Args)]
struct ToleranceArg {
    /// Bisection tolerance, a positive rational or decimal literal.
    #[arg(long, env = "MTW_DEFAULT_TOLERANCE", default_value = "1e-9", value_parser = positive_rational)]
    tolerance: (String, Rational),
}

#[derive(Subcommand)]
enum Command {
    /// Check a tree file and summarize it.
    Validate(TreeArg),
    /// Convex hull of a point set.
    Hull(SetArgs),
    /// Final points of a point set.
    FinalPoints(SetArgs),
    /// Tn-dimension of the hull of a point set.
    Dimension(SetArgs),
    /// Tn-width of a point set.
    Width {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[command(flatten)]
        tolerance: ToleranceArg,
        /// Also run the brute-force oracle at this grid resolution.
        #[arg(long, value_parser = positive_rational)]
        brute_force: Option<(String, Rational)>,
    },
    /// Tn-widths for n = 1..=n-max.
    WidthSeq {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n_max: u64,
        #[command(flatten)]
        tolerance: ToleranceArg,
    },
    /// Compact width of a point set.
    CompactWidth {
        #[command(flatten)]
        set: SetArgs,
        #[command(flatten)]
        tolerance: ToleranceArg,
    },
    /// Radial-metric computations.
    Radial {
        #[command(subcommand)]
        command: RadialCommand,
    },
    /// Ball-absorption witness for two points, optionally checked by sampling.
    P1Witness {
        #[command(flatten)]
        tree: TreeArg,
        /// First point, e.g. "V u" or "E u v 1/2".
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, value_parser = positive_rational)]
        epsilon: (String, Rational),
        #[arg(long, value_parser = positive_rational)]
        r: (String, Rational),
        /// Check the inclusion for this theta by sampling.
        #[arg(long, value_parser = positive_rational)]
        theta: Option<(String, Rational)>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Run a property suite.
    Check {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 10)]
        max_vertices: usize,
        #[arg(long, default_value_t = 6)]
        max_points: usize,
    },
    /// Generate a random tree (and optionally points).
    Gen {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        min_vertices: usize,
        #[arg(long, default_value_t = 10)]
        max_vertices: usize,
        #[arg(long, value_enum, default_value_t = TreeFormat::Tsv)]
        format: TreeFormat,
        /// Write this many random points to the given file.
        #[arg(long, requires = "points_out")]
        points: Option<usize>,
        #[arg(long)]
        points_out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum RadialCommand {
    /// Tn-width of a radial ball, with its certificate.
    BallWidth {
        #[arg(long, value_parser = positive_rational)]
        r: (String, Rational),
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value = "1e-3", value_parser = positive_rational)]
        epsilon: (String, Rational),
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..))]
        dim: u64,
        #[arg(long)]
        open: bool,
    },
    /// Width of an unbounded region: always infinite.
    Unbounded {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TreeFormat {
    Tsv,
    Newick,
}

fn positive_rational(s: &str) -> Result<(String, Rational), String> {
    let r = parse_rational(s).map_err(|e| e.to_string())?;
    if !r.is_positive() {
        return Err(format!("`{s}` must be positive"));
    }
    Ok((s.to_string(), r))
}

fn load_set(set: &SetArgs) -> Result<(MetricTree, Vec<TreePoint>)> {
    let tree = io::read_tree_file(&set.tree.tree)?;
    let points = io::read_points_file(&tree, &set.points)?;
    if points.is_empty() {
        return Err(widths::WidthError::EmptyInput.into());
    }
    Ok((tree, points))
}

/// Printed result: JSON body plus the plain-text rendering.
struct Report {
    op: &'static str,
    body: Value,
    plain: String,
    approx: Vec<(&'static str, Rational)>,
    ok: bool,
}

impl Report {
    fn new(op: &'static str, body: Value, plain: String) -> Self {
        Self {
            op,
            body,
            plain,
            approx: Vec::new(),
            ok: true,
        }
    }
}

fn plain_points(tree: &MetricTree, points: &[TreePoint]) -> String {
    points.iter().map(|p| tree.encode_point(p)).collect::<Vec<_>>().join("\n")
}

fn run(command: Command) -> Result<Report> {
    Ok(match command {
        Command::Validate(t) => {
            let tree = io::read_tree_file(&t.tree)?;
            let leaves: Vec<&str> = tree.leaves().into_iter().map(|v| tree.name(v)).collect();
            let body = json!({
                "vertices": tree.vertex_count(),
                "edges": tree.edge_count(),
                "total_length": js::rational(&tree.total_length()),
                "leaves": leaves,
                "max_dimension": tree.max_dimension(),
            });
            let plain = format!(
                "valid tree: {} vertices, {} edges, total length {}",
                tree.vertex_count(),
                tree.edge_count(),
                format_rational(&tree.total_length())
            );
            let mut r = Report::new("validate", body, plain);
            r.approx.push(("total_length", tree.total_length()));
            r
        }
        Command::Hull(set) => {
            let (tree, points) = load_set(&set)?;
            let hull = tree.convex_hull(&points)?;
            let mut r = Report::new("hull", js::subtree(&tree, &hull), plain_points(&tree, &hull.final_points(&tree)));
            r.approx.push(("length", hull.length()));
            r
        }
        Command::FinalPoints(set) => {
            let (tree, points) = load_set(&set)?;
            let finals = tree.final_points(&tree.convex_hull(&points)?);
            Report::new(
                "final_points",
                json!({ "final_points": js::points(&tree, &finals) }),
                plain_points(&tree, &finals),
            )
        }
        Command::Dimension(set) => {
            let (tree, points) = load_set(&set)?;
            let dim = tree.tn_dimension(&tree.convex_hull(&points)?);
            Report::new("dimension", json!({ "dimension": dim }), dim.to_string())
        }
        Command::Width {
            set,
            n,
            tolerance,
            brute_force,
        } => {
            let (tree, points) = load_set(&set)?;
            let problem = WidthProblem::new(&tree, points.clone(), n as usize)?;
            let w = tn_width(&problem, &tolerance.tolerance.1)?;
            let mut body = js::width_result(&tree, &w, &tolerance.tolerance.0);
            let mut plain = format!(
                "{}\n{}",
                if w.exact { format_rational(&w.hi) } else { format!("[{}, {}]", format_rational(&w.lo), format_rational(&w.hi)) },
                plain_points(&tree, &w.witness_final_points)
            );
            if let Some((_, res)) = brute_force {
                let b = brute_force_tn_width(&tree, &points, n as usize, &res)?;
                plain.push_str(&format!("\nbrute force: {}", format_rational(&b.value)));
                body["brute_force"] = js::brute_force(&tree, &b);
            }
            let mut r = Report::new("tn_width", body, plain);
            r.approx = vec![("lo", w.lo.clone()), ("hi", w.hi.clone())];
            r
        }
        Command::WidthSeq { set, n_max, tolerance } => {
            let (tree, points) = load_set(&set)?;
            let seq = width_sequence(&tree, &points, n_max as usize, &tolerance.tolerance.1)?;
            let entries: Vec<Value> = seq
                .iter()
                .map(|w| js::width_result(&tree, w, &tolerance.tolerance.0))
                .collect();
            let plain = seq
                .iter()
                .map(|w| {
                    format!(
                        "{}\t{}{}",
                        w.n,
                        format_rational(&w.hi),
                        if w.star_convention_applied { "*" } else { "" }
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            Report::new(
                "width_sequence",
                json!({ "sequence": entries, "tolerance": tolerance.tolerance.0 }),
                plain,
            )
        }
        Command::CompactWidth { set, tolerance } => {
            let (tree, points) = load_set(&set)?;
            let c = compact_width(&tree, &points, &tolerance.tolerance.1)?;
            Report::new("compact_width", js::compact_width(&tree, &c), format_rational(&c.value))
        }
        Command::Radial { command } => match command {
            RadialCommand::BallWidth {
                r,
                n,
                epsilon,
                dim,
                open,
            } => {
                let ball = RadialBall::new(r.1.clone(), open, dim as usize)?;
                let cert = ball_width(&ball, n as usize, &epsilon.1)?;
                let value = region_width(&RadialRegion::Ball(ball), n as usize)?;
                let mut body = js::ball_width(&cert);
                body["value"] = json!(value.to_string());
                body["epsilon"] = json!(epsilon.0);
                let mut rep = Report::new("radial_ball_width", body, value.to_string());
                rep.approx.push(("value", r.1));
                rep
            }
            RadialCommand::Unbounded { n } => {
                let value = region_width(&RadialRegion::Unbounded, n as usize)?;
                Report::new(
                    "radial_unbounded_width",
                    json!({ "n": n, "value": value.to_string() }),
                    value.to_string(),
                )
            }
        },
        Command::P1Witness {
            tree,
            x,
            y,
            epsilon,
            r,
            theta,
            samples,
            seed,
        } => {
            let tree = io::read_tree_file(&tree.tree)?;
            let x = io::parse_point(&tree, &x).context("--x")?;
            let y = io::parse_point(&tree, &y).context("--y")?;
            let w = p1_witness(&tree, &x, &y, &epsilon.1, &r.1)?;
            let report = theta
                .map(|(_, t)| p1_check(&tree, &w, &t, samples, seed))
                .transpose()?;
            let ok = report.as_ref().is_none_or(|r| r.passed());
            let mut plain = format!("delta\t{}\nz\t{}", format_rational(&w.delta), tree.encode_point(&w.z));
            if let Some(rep) = &report {
                plain.push_str(&format!(
                    "\ncheck\t{} ({} of {} samples in the intersection)",
                    if rep.passed() { "pass" } else { "FAIL" },
                    rep.in_intersection,
                    rep.samples
                ));
            }
            let mut rep = Report::new("p1_witness", js::p1(&tree, &w, report.as_ref()), plain);
            rep.ok = ok;
            rep
        }
        Command::Check {
            suite,
            seed,
            trials,
            samples,
            max_vertices,
            max_points,
        } => {
            let spec = RandomInstanceSpec {
                seed,
                trials,
                samples,
                max_vertices,
                max_points,
                ..Default::default()
            };
            let report = harness::run_suite(&suite, &spec)?;
            let plain = format!(
                "{}: {} ({} trials, {} failures)",
                report.suite,
                if report.passed { "pass" } else { "FAIL" },
                report.trials,
                report.failures.len()
            );
            let mut rep = Report::new("check", js::suite_report(&report), plain);
            rep.ok = report.passed;
            rep
        }
        Command::Gen { .. } => unreachable!("handled before dispatch"),
    })
}

fn generate(
    seed: u64,
    min_vertices: usize,
    max_vertices: usize,
    format: TreeFormat,
    points: Option<usize>,
    points_out: Option<PathBuf>,
) -> Result<String> {
    let spec = RandomInstanceSpec {
        seed,
        min_vertices,
        max_vertices,
        ..Default::default()
    };
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tree = harness::random_tree(&spec, &mut rng);
    if let (Some(k), Some(path)) = (points, points_out) {
        if k == 0 {
            return Err(anyhow!("--points must be at least 1"));
        }
        let pts = harness::random_points(
            &RandomInstanceSpec {
                min_points: k,
                max_points: k,
                ..spec.clone()
            },
            &tree,
            &mut rng,
        );
        std::fs::write(&path, io::emit_points(&tree, &pts)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(match format {
        TreeFormat::Tsv => io::emit_tree_tsv(&tree),
        TreeFormat::Newick => format!("{}\n", io::emit_newick(&tree)),
    })
}

fn parse_cli() -> Cli {
    Cli::try_parse().unwrap_or_else(|e| {
        if !e.use_stderr() {
            e.exit();
        }
        let text = e.render().to_string();
        if text.contains("Usage:") {
            e.exit();
        }
        let mut cmd = Cli::command();
        for arg in std::env::args().skip(1) {
            if let Some(sub) = cmd.find_subcommand(&arg) {
                cmd = sub.clone().bin_name(format!("{} {arg}", cmd.get_bin_name().unwrap_or("mtw")));
            }
        }
        eprint!("{text}");
        eprintln!("\n{}", cmd.render_usage());
        std::process::exit(2)
    })
}

fn main() -> ExitCode {
    let cli = parse_cli();
    if let Command::Gen {
        seed,
        min_vertices,
        max_vertices,
        format,
        points,
        points_out,
    } = cli.command
    {
        return match generate(seed, min_vertices, max_vertices, format, points, points_out) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        };
    }
    match run(cli.command) {
        Ok(report) => {
            match cli.output {
                Output::Json => {
                    let mut body = js::envelope(report.op, report.body);
                    if cli.approx {
                        let entries: Vec<(&str, &Rational)> = report.approx.iter().map(|(k, v)| (*k, v)).collect();
                        body = js::with_approx(body, &entries);
                    }
                    print!("{}", js::render(&body));
                }
                Output::Plain => {
                    println!("{}", report.plain);
                    if cli.approx {
                        for (k, v) in &report.approx {
                            println!("{k} ~ {}", metric_widths::rational::to_f64(v));
                        }
                    }
                }
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
