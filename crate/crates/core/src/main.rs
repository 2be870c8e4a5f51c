use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use anterial::adjust::{select_adjustment, AdjustmentProblem};
use anterial::causal::{do_graph, parallel_worlds_swig, phi, swaig};
use anterial::classes::classify;
use anterial::gaussian::{
    gibbs_sample, joint_law, markov_report, sample_coupled, sample_equilibrium, EquilibriumSystem, GaussianModel, MarkovData, MarkovRow,
    Provenance,
};
use anterial::inducing::maximize;
use anterial::io;
use anterial::separation::{connecting_walk, separated};
use anterial::transforms::{alpha_c, alpha_m};
use anterial::MixedGraph;

#[derive(Parser)]
#[command(name = "anterial", version, about = "Causal graphical modelling on anterial graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct GraphOut {
    /// Write the graph JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write Graphviz DOT here.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Equilibrium,
    Gibbs,
    Coupled,
}

#[derive(clap::Args)]
struct Sampling {
    #[arg(long, default_value_t = 10000)]
    n: usize,
    #[arg(long, value_enum, default_value_t = Mode::Equilibrium)]
    mode: Mode,
    /// Gibbs sweeps discarded before each record.
    #[arg(long, default_value_t = 10000)]
    burn_in: usize,
    /// Defaults to $ANTERIAL_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Graph-class report with witnesses.
    Validate { graph: PathBuf },
    /// Whether `given` separates `a` from `b`, with a connecting walk otherwise.
    Separate {
        graph: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value = "")]
        given: String,
    },
    /// Marginalise the listed nodes out.
    Marginalize {
        graph: PathBuf,
        #[arg(long)]
        over: String,
        #[command(flatten)]
        out: GraphOut,
    },
    /// Condition on the listed nodes.
    Condition {
        graph: PathBuf,
        #[arg(long)]
        on: String,
        #[command(flatten)]
        out: GraphOut,
    },
    /// Add edges until every non-adjacent pair has a separating set.
    Maximize {
        graph: PathBuf,
        #[command(flatten)]
        out: GraphOut,
    },
    /// Graph after intervening on the listed nodes.
    Intervene {
        graph: PathBuf,
        #[arg(long)]
        on: String,
        #[command(flatten)]
        out: GraphOut,
    },
    /// Joint graph of the observational and intervened worlds.
    Counterfactual {
        graph: PathBuf,
        #[arg(long)]
        on: String,
        #[command(flatten)]
        out: GraphOut,
    },
    /// Counterfactual graph with the observational posterior marginalised out.
    Swaig {
        graph: PathBuf,
        #[arg(long)]
        on: String,
        #[command(flatten)]
        out: GraphOut,
    },
    /// Parallel-worlds single-world graph of a DAG; `--on` is ordered.
    PwSwig {
        graph: PathBuf,
        #[arg(long)]
        on: String,
        #[command(flatten)]
        out: GraphOut,
    },
    /// Minimal separating set between the bounds.
    Adjust {
        graph: PathBuf,
        #[arg(long)]
        treatment: String,
        #[arg(long)]
        outcome: String,
        #[arg(long, default_value = "")]
        lower: String,
        #[arg(long)]
        upper: String,
        /// Drop intervened labels from the upper bound.
        #[arg(long)]
        observational_only: bool,
    },
    /// Sample a model to CSV.
    Simulate {
        model: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
        /// Interventions as `label=value`, comma separated.
        #[arg(long = "do", default_value = "")]
        interventions: String,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pairwise tests of `a _||_ b | ant(a, b)` against graph separation.
    MarkovReport {
        model: PathBuf,
        /// Graph to test; defaults to the model's corresponding graph.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Use the closed-form law instead of samples.
        #[arg(long)]
        exact: bool,
        /// Read samples from this CSV instead of simulating.
        #[arg(long, conflicts_with = "exact")]
        data: Option<PathBuf>,
        #[command(flatten)]
        sampling: Sampling,
        /// Also write the rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Graph read off a model's equations.
    CorrespondingGraph {
        model: PathBuf,
        #[command(flatten)]
        out: GraphOut,
    },
}

enum Failure {
    Usage(String),
    Domain(anterial::Error),
    /// Domain outcome that is reported with its own body.
    Report(Value),
}

impl From<anterial::Error> for Failure {
    fn from(e: anterial::Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome = Result<String, Failure>;

/// Splits a comma-separated label list, keeping commas inside parentheses
/// so that `3^do(1,2)` stays one label.
fn split_labels(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let (mut depth, mut cur) = (0i32, String::new());
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    out.push(cur);
    out.into_iter().map(|l| l.trim().to_string()).filter(|l| !l.is_empty()).collect()
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<MixedGraph, Failure> {
    Ok(io::graph_from_json(&read(path)?)?)
}

fn load_system(path: &Path) -> Result<EquilibriumSystem, Failure> {
    Ok(GaussianModel::from_json(&read(path)?)?.compile()?)
}

fn ids(g: &MixedGraph, list: &str) -> Result<Vec<usize>, Failure> {
    Ok(g.ids_of(&split_labels(list))?)
}

fn emit_graph(g: &MixedGraph, out: &GraphOut) -> Outcome {
    if let Some(p) = &out.dot {
        write(p, &io::to_dot(g))?;
    }
    let text = io::graph_to_json(g) + "\n";
    match &out.out {
        Some(p) => write(p, &text).map(|_| String::new()),
        None => Ok(text),
    }
}

fn seed(arg: Option<u64>) -> Result<u64, Failure> {
    if let Some(s) = arg {
        return Ok(s);
    }
    match std::env::var("ANTERIAL_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Usage(format!("ANTERIAL_SEED must be an unsigned integer, got `{v}`"))),
        Err(_) => Ok(0),
    }
}

fn parse_interventions(sys: &EquilibriumSystem, text: &str) -> Result<Vec<(usize, f64)>, Failure> {
    split_labels(text)
        .iter()
        .map(|item| {
            let (label, value) = item.rsplit_once('=').ok_or_else(|| Failure::Usage(format!("intervention `{item}` is not label=value")))?;
            let value: f64 = value.trim().parse().map_err(|_| Failure::Usage(format!("intervention value `{value}` is not a number")))?;
            Ok((sys.id(label.trim())?, value))
        })
        .collect()
}

fn draw(sys: &EquilibriumSystem, sampling: &Sampling, values: &[(usize, f64)]) -> Result<anterial::gaussian::SampleMatrix, Failure> {
    let seed = seed(sampling.seed)?;
    Ok(match sampling.mode {
        Mode::Coupled => sample_coupled(sys, values, sampling.n, seed)?,
        Mode::Equilibrium => sample_equilibrium(&sys.intervene(values)?, sampling.n, seed)?,
        Mode::Gibbs => gibbs_sample(&sys.intervene(values)?, sampling.n, sampling.burn_in, seed)?,
    })
}

fn markov_csv(rows: &[MarkovRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["a", "b", "given", "implied", "partial_correlation", "p_value", "independent"]).expect("write to memory");
    for r in rows {
        w.write_record([
            r.a.clone(),
            r.b.clone(),
            r.given.join(" "),
            r.implied.to_string(),
            io::format_f64(r.partial_correlation),
            r.p_value.map(io::format_f64).unwrap_or_default(),
            r.independent.map(|b| b.to_string()).unwrap_or_default(),
        ])
        .expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("CSV is UTF-8")
}

fn run(cmd: Cmd) -> Outcome {
    match cmd {
        Cmd::Validate { graph } => {
            let g = load_graph(&graph)?;
            Ok(io::to_json(&io::class_report_value(&g, &classify(&g))) + "\n")
        }
        Cmd::Separate { graph, a, b, given } => {
            let g = load_graph(&graph)?;
            let (a, b, z) = (ids(&g, &a)?, ids(&g, &b)?, ids(&g, &given)?);
            let body = if separated(&g, &a, &b, &z)? {
                json!({"result": "separated"})
            } else {
                let walk = connecting_walk(&g, &a, &b, &z).expect("connected sets have a walk");
                json!({"result": "connected", "walk": g.labels_of(&walk)})
            };
            Ok(io::to_json(&body) + "\n")
        }
        Cmd::Marginalize { graph, over, out } => {
            let g = load_graph(&graph)?;
            emit_graph(&alpha_m(&g, &ids(&g, &over)?)?, &out)
        }
        Cmd::Condition { graph, on, out } => {
            let g = load_graph(&graph)?;
            emit_graph(&alpha_c(&g, &ids(&g, &on)?)?, &out)
        }
        Cmd::Maximize { graph, out } => emit_graph(&maximize(&load_graph(&graph)?)?, &out),
        Cmd::Intervene { graph, on, out } => {
            let g = load_graph(&graph)?;
            emit_graph(&do_graph(&g, &ids(&g, &on)?)?, &out)
        }
        Cmd::Counterfactual { graph, on, out } => {
            let g = load_graph(&graph)?;
            emit_graph(&phi(&g, &ids(&g, &on)?)?, &out)
        }
        Cmd::Swaig { graph, on, out } => {
            let g = load_graph(&graph)?;
            emit_graph(&swaig(&g, &ids(&g, &on)?)?, &out)
        }
        Cmd::PwSwig { graph, on, out } => {
            let g = load_graph(&graph)?;
            emit_graph(&parallel_worlds_swig(&g, &ids(&g, &on)?)?, &out)
        }
        Cmd::Adjust { graph, treatment, outcome, lower, upper, observational_only } => {
            let mut p = AdjustmentProblem {
                graph: load_graph(&graph)?,
                treatment: split_labels(&treatment),
                outcome: split_labels(&outcome),
                lower: split_labels(&lower),
                upper: split_labels(&upper),
            };
            if observational_only {
                p = p.observational_only();
            }
            let r = select_adjustment(&p)?;
            let body = serde_json::to_value(&r).expect("result is serialisable");
            match r.set() {
                Some(_) => Ok(io::to_json(&body) + "\n"),
                None => Err(Failure::Report(body)),
            }
        }
        Cmd::Simulate { model, sampling, interventions, out } => {
            let sys = load_system(&model)?;
            let values = parse_interventions(&sys, &interventions)?;
            let text = io::samples_to_csv(&draw(&sys, &sampling, &values)?);
            match out {
                Some(p) => write(&p, &text).map(|_| String::new()),
                None => Ok(text),
            }
        }
        Cmd::MarkovReport { model, graph, exact, data, sampling, csv } => {
            let sys = load_system(&model)?;
            let g = match graph {
                Some(p) => load_graph(&p)?,
                None => sys.corresponding_graph()?,
            };
            let rows = if exact {
                markov_report(&g, MarkovData::Law(&joint_law(&sys)))?
            } else if let Some(p) = data {
                let provenance = match sampling.mode {
                    Mode::Equilibrium => Provenance::Equilibrium,
                    Mode::Gibbs => Provenance::Gibbs,
                    Mode::Coupled => Provenance::Coupled,
                };
                markov_report(&g, MarkovData::Samples(&io::samples_from_csv(&read(&p)?, provenance)?))?
            } else {
                markov_report(&g, MarkovData::Samples(&draw(&sys, &sampling, &[])?))?
            };
            if let Some(p) = csv {
                write(&p, &markov_csv(&rows))?;
            }
            Ok(io::to_json(&json!({ "graph": io::graph_value(&g), "rows": rows })) + "\n")
        }
        Cmd::CorrespondingGraph { model, out } => emit_graph(&load_system(&model)?.corresponding_graph()?, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.cmd) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(e)) => {
            println!("{}", io::to_json(&json!({"error": e.code(), "message": e.to_string()})));
            ExitCode::from(2)
        }
        Err(Failure::Report(body)) => {
            println!("{}", io::to_json(&body));
            ExitCode::from(2)
        }
    }
}
