use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use khova_cli::pipeline::{analyze, batch_verify, Expected, Options, PipelineError, RunReport, Which};
use khova_cli::render::{report_latex, report_text};
use khova_cli::table::{bundled_table, load_knot_table};
use khova_core::complex::{ChainComplex, Reduction};
use khova_core::diagram::{parse_braid_word, parse_pd_code, EdgeLabel, KnotDiagram};
use khova_core::gradedalg::Field;
use khova_core::hypercube::{build_hypercube, DEFAULT_MAX_CROSSINGS};
use serde_json::json;

#[derive(Parser)]
#[command(name = "khova", version, about = "Khovanov homology and Jones superpolynomials of knot diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Jones polynomials, homology tables and superpolynomials of one diagram.
    Compute {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        which: WhichArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Dump the cube of resolutions.
    Hypercube {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long, env = "KHOVA_MAX_CROSSINGS", default_value_t = DEFAULT_MAX_CROSSINGS)]
        max_crossings: usize,
    },
    /// Dump chain groups and differential block shapes.
    Complex {
        #[command(flatten)]
        input: Input,
        /// Build the complex reduced at the marked edge.
        #[arg(long)]
        reduced: bool,
        #[arg(long)]
        marked: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long, env = "KHOVA_MAX_CROSSINGS", default_value_t = DEFAULT_MAX_CROSSINGS)]
        max_crossings: usize,
    },
    /// Check every knot of a table (the bundled one by default).
    Verify {
        /// NDJSON table with records {name, pd, jones}.
        #[arg(long)]
        table: Option<PathBuf>,
        /// Worker threads; defaults to the number of cores.
        #[arg(long)]
        jobs: Option<usize>,
        /// Extra marked edges tried per knot.
        #[arg(long, default_value_t = 2)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Input {
    /// Braid word, e.g. "1,-2,1,-2".
    #[arg(long, allow_hyphen_values = true, conflicts_with = "pd", requires = "strands")]
    braid: Option<String>,
    #[arg(long)]
    strands: Option<usize>,
    /// File with PD records X(a,b,c,d)+/-, or "-" for stdin.
    #[arg(long)]
    pd: Option<PathBuf>,
    /// Name shown in the report.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args)]
#[group(multiple = false)]
struct WhichArgs {
    #[arg(long)]
    reduced: bool,
    #[arg(long)]
    unreduced: bool,
    #[arg(long)]
    both: bool,
}

#[derive(Args)]
struct Common {
    /// Edge marked for the reduced theory; defaults to the smallest label.
    #[arg(long)]
    marked: Option<String>,
    /// Coefficient field: q for the rationals, or a prime.
    #[arg(long, default_value = "q", value_parser = parse_field)]
    field: Field,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long, env = "KHOVA_MAX_CROSSINGS", default_value_t = DEFAULT_MAX_CROSSINGS)]
    max_crossings: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Latex,
}

fn parse_field(s: &str) -> Result<Field, String> {
    let f = match s {
        "q" | "Q" => Field::Rational,
        _ => Field::Prime(s.trim_start_matches(['F', 'f']).parse().map_err(|_| format!("unknown field {s:?}"))?),
    };
    f.check().map_err(|e| e.to_string())
}

struct Failure {
    kind: &'static str,
    message: String,
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure { kind: e.kind(), message: e.to_string() }
    }
}

fn fail(kind: &'static str, message: impl ToString) -> Failure {
    Failure { kind, message: message.to_string() }
}

fn read_input(input: &Input) -> Result<(String, KnotDiagram), Failure> {
    match (&input.braid, &input.pd) {
        (Some(w), None) => {
            let k = input.strands.ok_or_else(|| fail("usage", "--braid needs --strands"))?;
            let d = parse_braid_word(w, k).map_err(|e| fail("diagram", e))?;
            Ok((input.name.clone().unwrap_or_else(|| format!("braid [{w}] on {k} strands")), d))
        }
        (None, Some(path)) => {
            let text = if path.as_os_str() == "-" {
                let mut s = String::new();
                std::io::stdin().read_to_string(&mut s).map_err(|e| fail("io", e))?;
                s
            } else {
                std::fs::read_to_string(path).map_err(|e| fail("io", format!("{}: {e}", path.display())))?
            };
            let d = parse_pd_code(&text).map_err(|e| fail("diagram", e))?;
            Ok((input.name.clone().unwrap_or_else(|| path.display().to_string()), d))
        }
        _ => Err(fail("usage", "give exactly one of --braid or --pd")),
    }
}

fn parse_marked(m: &Option<String>) -> Result<Option<EdgeLabel>, Failure> {
    m.as_deref().map(|s| s.parse().map_err(|e| fail("diagram", e))).transpose()
}

fn emit_report(r: &RunReport, format: Format) {
    match format {
        Format::Text => print!("{}", report_text(r)),
        Format::Json => println!("{}", serde_json::to_string_pretty(r).expect("report serializes")),
        Format::Latex => print!("{}", report_latex(r)),
    }
}

fn status(passed: bool) -> ExitCode {
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Compute { input, which, common } => {
            let (name, d) = read_input(&input)?;
            let which = if which.reduced {
                Which::Reduced
            } else if which.unreduced {
                Which::Unreduced
            } else {
                Which::Both
            };
            let opts = Options {
                which,
                marked: parse_marked(&common.marked)?,
                field: common.field,
                max_crossings: common.max_crossings,
                invariance_samples: 0,
            };
            let report = analyze(&name, &d, &opts, &Expected::default())?;
            let run = RunReport::new(vec![report], None);
            emit_report(&run, common.format);
            Ok(status(run.passed()))
        }
        Command::Hypercube { input, format, max_crossings } => {
            let (_, d) = read_input(&input)?;
            let hc = build_hypercube(&d, max_crossings).map_err(PipelineError::from)?;
            let dump = hc.dump(&d);
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&dump).expect("dump serializes")),
                _ => {
                    println!("{} crossings, r_c = {}", dump.crossings, dump.r_c);
                    for v in &dump.vertices {
                        let cycles: Vec<String> = v.cycles.iter().map(|c| c.join(" ")).collect();
                        println!("{} |r - r_c| = {}: ({})", v.label, v.distance, cycles.join(") ("));
                    }
                    for e in &dump.edges {
                        let sign = if e.sign < 0 { "-" } else { "+" };
                        let show = |cs: &Vec<Vec<String>>| {
                            cs.iter().map(|c| c.join(" ")).collect::<Vec<_>>().join(" | ")
                        };
                        println!(
                            "{} {sign} {} -> {} {}: {} => {}",
                            e.star, e.from, e.to, e.kind, show(&e.consumed), show(&e.produced)
                        );
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Complex { input, reduced, marked, format, max_crossings } => {
            let (_, d) = read_input(&input)?;
            let hc = build_hypercube(&d, max_crossings).map_err(PipelineError::from)?;
            let red = if reduced {
                let m = match parse_marked(&marked)? {
                    Some(l) => d
                        .edge_index(&l)
                        .ok_or_else(|| fail("diagram", format!("marked edge {l} is not an edge of the diagram")))?,
                    None => d.marked_edge(),
                };
                Reduction::Reduced(m)
            } else {
                Reduction::Unreduced
            };
            let c = ChainComplex::build(&hc, red).map_err(PipelineError::from)?;
            let dump = c.dump(&d);
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&dump).expect("dump serializes")),
                _ => {
                    for g in &dump.groups {
                        println!("C{}: dim {}, qdim {}", g.degree, g.dim, g.qdim);
                    }
                    for b in &dump.blocks {
                        println!("d{} at q^{}: {}x{}, {} nonzero", b.degree, b.qdeg, b.rows, b.cols, b.nnz);
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { table, jobs, samples, common } => {
            if let Some(n) = jobs {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build_global()
                    .map_err(|e| fail("usage", e))?;
            }
            let entries = match &table {
                Some(p) => load_knot_table(p).map_err(|e| fail("table", e))?,
                None => bundled_table(),
            };
            let opts = Options {
                which: Which::Both,
                marked: parse_marked(&common.marked)?,
                field: common.field,
                max_crossings: common.max_crossings,
                invariance_samples: samples,
            };
            let report = batch_verify(&entries, &opts);
            emit_report(&report, common.format);
            Ok(status(report.passed()))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("{}", json!({ "error": f.kind, "message": f.message }));
            ExitCode::from(2)
        }
    }
}
