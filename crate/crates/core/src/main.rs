use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use sfembed::bounds::sphere_bounds;
use sfembed::embedding::{read_embedding, write_embedding};
use sfembed::generator::{generate_pa, PaConfig};
use sfembed::graph::{load_edge_list, write_edge_list, Graph};
use sfembed::pipeline::{self, align_embedding, derive_seed, EmbedConfig, FitOutcome, Method, Stream};
use sfembed::powerlaw::fit_power_law;
use sfembed::reconstruct::{reconstruct_edges, sweep_epsilon, EpsilonGrid};
use sfembed::tasks::{self, LinkPredictionConfig, LogisticConfig};
use sfembed::walker::generate_walks;
use sfembed::Embedding;

#[derive(Parser, Debug)]
#[command(name = "sfembed", version, about = "Scale-free-property-preserving network embedding")]
struct Cli {
    /// Where to write the run manifest (default: next to the main output).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
enum Command {
    /// Generate a preferential-attachment graph.
    Generate(GenerateArgs),
    /// Embed a graph.
    Embed(EmbedArgs),
    /// Sweep ε over an embedding and correlate reconstructed degrees.
    Reconstruct(ReconstructArgs),
    /// Fit a power law to a degree sequence.
    Fit(FitArgs),
    /// Sphere-packing bounds in dimension k.
    Bounds(BoundsArgs),
    /// Link prediction from embedding differences.
    Linkpred(LinkpredArgs),
    /// Vertex classification from embedding rows.
    Classify(ClassifyArgs),
    /// Generate or load, embed, reconstruct and fit in one run.
    Pipeline(PipelineArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
struct MethodArgs {
    #[arg(long, value_parser = parse_method, default_value = "dp-spectral")]
    method: Method,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 200)]
    dim: usize,
    /// Walks started from every vertex.
    #[arg(long, default_value_t = 10)]
    walks: usize,
    /// Vertices per walk.
    #[arg(long, default_value_t = 40)]
    walk_length: usize,
    #[arg(long, default_value_t = 5)]
    window: usize,
    #[arg(long, default_value_t = 1)]
    epochs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Single-threaded, bit-reproducible training.
    #[arg(long)]
    deterministic: bool,
    /// Worker threads (ignored with --deterministic).
    #[arg(long)]
    workers: Option<usize>,
    /// Eigenpair residual tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

impl MethodArgs {
    fn config(&self) -> EmbedConfig {
        let workers = if self.deterministic {
            1
        } else {
            self.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        };
        EmbedConfig {
            method: self.method,
            k: self.dim,
            beta: self.beta,
            seed: self.seed,
            tol: self.tol,
            walks_per_vertex: self.walks,
            walk_length: self.walk_length,
            window: self.window,
            epochs: self.epochs,
            deterministic: self.deterministic,
            workers,
        }
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|_| format!("expected one of {}", Method::ALL.map(Method::name).join(", ")))
}

#[derive(Args, Debug, Clone, Serialize)]
struct GridArgs {
    #[arg(long, default_value_t = 0.01)]
    eps_start: f64,
    #[arg(long, default_value_t = 1.0)]
    eps_end: f64,
    #[arg(long, default_value_t = 0.01)]
    eps_step: f64,
}

impl GridArgs {
    fn grid(&self) -> EpsilonGrid {
        EpsilonGrid { start: self.eps_start, end: self.eps_end, step: self.eps_step }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
struct EmbedArgs {
    #[command(flatten)]
    method: MethodArgs,
    /// Input edge list.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Also write the walk corpus (walk methods only).
    #[arg(long)]
    corpus_out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct ReconstructArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    embedding: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
    /// Sweep table output.
    #[arg(long)]
    out: PathBuf,
    /// Edge list reconstructed at the best ε.
    #[arg(long)]
    edges_out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct FitArgs {
    /// Edge list whose degrees are fitted.
    #[arg(long, conflicts_with = "degrees", required_unless_present = "degrees")]
    graph: Option<PathBuf>,
    /// File with one degree per line.
    #[arg(long)]
    degrees: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct BoundsArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct LinkpredArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    embedding: PathBuf,
    /// Fraction of edges sampled as positive pairs.
    #[arg(long, default_value_t = 0.01)]
    fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct ClassifyArgs {
    #[arg(long)]
    embedding: PathBuf,
    /// Lines of "vertex_label class_id".
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct PipelineArgs {
    #[command(flatten)]
    method: MethodArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Input edge list; otherwise a graph is generated from --n and --m.
    #[arg(long, conflicts_with_all = ["n", "m"])]
    graph: Option<PathBuf>,
    #[arg(long, requires = "m")]
    n: Option<usize>,
    #[arg(long, requires = "n")]
    m: Option<usize>,
    /// Directory receiving the embedding, sweep table and report.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
struct ReplayArgs {
    /// Manifest of an earlier run.
    path: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    subcommand: String,
    argv: Vec<String>,
    resolved: serde_json::Value,
    seeds: serde_json::Value,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    version: String,
    duration_secs: f64,
}

/// What a command touched, for the manifest.
#[derive(Default)]
struct RunRecord {
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    seeds: serde_json::Map<String, serde_json::Value>,
}

impl RunRecord {
    fn seed(&mut self, name: &str, value: u64) {
        self.seeds.insert(name.to_string(), value.into());
    }
}

fn create(path: &Path, record: &mut RunRecord) -> anyhow::Result<BufWriter<File>> {
    record.outputs.push(path.to_path_buf());
    Ok(BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?))
}

fn open(path: &Path, record: &mut RunRecord) -> anyhow::Result<BufReader<File>> {
    record.inputs.push(path.to_path_buf());
    Ok(BufReader::new(File::open(path).with_context(|| format!("cannot open {}", path.display()))?))
}

fn load_graph(path: &Path, record: &mut RunRecord) -> anyhow::Result<Graph> {
    load_edge_list(open(path, record)?).with_context(|| format!("reading {}", path.display()))
}

fn load_aligned(g: &Graph, path: &Path, record: &mut RunRecord) -> anyhow::Result<Embedding> {
    let (labels, emb) = read_embedding(open(path, record)?).with_context(|| format!("reading {}", path.display()))?;
    Ok(align_embedding(g, &labels, &emb)?)
}

/// Writes `text` to `out` when given, otherwise to stdout.
fn emit(text: &str, out: Option<&Path>, record: &mut RunRecord) -> anyhow::Result<()> {
    match out {
        Some(p) => {
            let mut w = create(p, record)?;
            writeln!(w, "{text}")?;
            w.flush()?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn record_method_seeds(cfg: &EmbedConfig, record: &mut RunRecord) {
    record.seed("seed", cfg.seed);
    if cfg.method.is_spectral() {
        record.seed("spectral", derive_seed(cfg.seed, Stream::Spectral));
    } else {
        record.seed("walks", derive_seed(cfg.seed, Stream::Walks));
        record.seed("skipgram", derive_seed(cfg.seed, Stream::SkipGram));
    }
}

fn run_command(cmd: &Command, record: &mut RunRecord) -> anyhow::Result<()> {
    match cmd {
        Command::Generate(a) => {
            let seed = derive_seed(a.seed, Stream::Generate);
            record.seed("seed", a.seed);
            record.seed("generate", seed);
            let g = generate_pa(&PaConfig { n: a.n, m: a.m, seed })?;
            write_edge_list(&g, create(&a.out, record)?)?;
            log::info!("wrote {} vertices, {} edges", g.n(), g.num_edges());
        }
        Command::Embed(a) => {
            let cfg = a.method.config();
            record_method_seeds(&cfg, record);
            let g = load_graph(&a.input, record)?;
            if let Some(path) = &a.corpus_out {
                if cfg.method.is_spectral() {
                    bail!("--corpus-out needs a walk method");
                }
                generate_walks(&g, &cfg.walks())?.write(g.labels(), create(path, record)?)?;
            }
            let out = pipeline::embed(&g, &cfg)?;
            write_embedding(&out.embedding, g.labels(), create(&a.out, record)?)?;
        }
        Command::Reconstruct(a) => {
            let g = load_graph(&a.graph, record)?;
            let emb = load_aligned(&g, &a.embedding, record)?;
            let sweep = sweep_epsilon(&emb, &g.degrees(), &a.grid.grid())?;
            sweep.write_table(create(&a.out, record)?)?;
            let best = sweep.best();
            match best.pearson() {
                Some(p) => println!("best epsilon {} pearson {p:.6}", best.epsilon),
                None => println!("no epsilon gives a non-constant reconstructed degree sequence"),
            }
            if let Some(path) = &a.edges_out {
                let mut w = create(path, record)?;
                for (i, j) in reconstruct_edges(&emb, best.epsilon)? {
                    writeln!(w, "{} {}", g.label(i), g.label(j))?;
                }
                w.flush()?;
            }
        }
        Command::Fit(a) => {
            let degrees: Vec<usize> = match (&a.graph, &a.degrees) {
                (Some(p), _) => load_graph(p, record)?.degrees(),
                (None, Some(p)) => {
                    let text = io::read_to_string(open(p, record)?)?;
                    text.split_whitespace()
                        .map(|t| t.parse().with_context(|| format!("bad degree {t:?}")))
                        .collect::<anyhow::Result<_>>()?
                }
                (None, None) => unreachable!("clap requires one input"),
            };
            let fit = fit_power_law(&degrees)?;
            let text = format!("alpha: {}\nd_min: {}\nks: {}\nn_tail: {}", fit.alpha, fit.d_min, fit.ks, fit.n_tail);
            emit(&text, a.out.as_deref(), record)?;
        }
        Command::Bounds(a) => {
            let report = sphere_bounds(a.dim)?;
            emit(&report.to_string(), a.out.as_deref(), record)?;
        }
        Command::Linkpred(a) => {
            let g = load_graph(&a.graph, record)?;
            let emb = load_aligned(&g, &a.embedding, record)?;
            let seed = derive_seed(a.seed, Stream::Tasks);
            record.seed("seed", a.seed);
            record.seed("tasks", seed);
            let cfg = LinkPredictionConfig {
                sample_fraction: a.fraction,
                seed,
                logistic: LogisticConfig { seed, ..Default::default() },
            };
            let report = tasks::link_prediction_eval(&emb, &g, &cfg)?;
            emit(&report.to_string(), a.out.as_deref(), record)?;
        }
        Command::Classify(a) => {
            let (row_labels, emb) = read_embedding(open(&a.embedding, record)?)?;
            let labels = tasks::read_labels(open(&a.labels, record)?)?;
            let rows = tasks::resolve_labels(&row_labels, &labels)?;
            let seed = derive_seed(a.seed, Stream::Tasks);
            record.seed("seed", a.seed);
            record.seed("tasks", seed);
            let report = tasks::vertex_classification_eval(&emb, &rows, &LogisticConfig { seed, ..Default::default() })?;
            emit(&report.to_string(), a.out.as_deref(), record)?;
        }
        Command::Pipeline(a) => {
            let cfg = a.method.config();
            record_method_seeds(&cfg, record);
            std::fs::create_dir_all(&a.out_dir).with_context(|| format!("cannot create {}", a.out_dir.display()))?;
            let g = match (&a.graph, a.n, a.m) {
                (Some(p), _, _) => load_graph(p, record)?,
                (None, Some(n), Some(m)) => {
                    let seed = derive_seed(a.method.seed, Stream::Generate);
                    record.seed("generate", seed);
                    let g = generate_pa(&PaConfig { n, m, seed })?;
                    write_edge_list(&g, create(&a.out_dir.join("graph.edges"), record)?)?;
                    g
                }
                _ => bail!("pipeline needs --graph or both --n and --m"),
            };
            let out = pipeline::run_pipeline(&g, &cfg, &a.grid.grid())?;
            write_embedding(&out.embedding, g.labels(), create(&a.out_dir.join("embedding.txt"), record)?)?;
            out.sweep.write_table(create(&a.out_dir.join("sweep.csv"), record)?)?;
            let mut w = create(&a.out_dir.join("report.json"), record)?;
            serde_json::to_writer_pretty(&mut w, &out.report)?;
            writeln!(w)?;
            w.flush()?;
            let r = &out.report;
            println!(
                "best epsilon {} pearson {} | K-S original {} reconstructed {}",
                r.best.epsilon,
                r.best.pearson.map_or("NA".into(), |p| format!("{p:.4}")),
                fmt_ks(&r.original_fit),
                fmt_ks(&r.reconstructed_fit)
            );
        }
        Command::Replay(_) => unreachable!("replay is resolved before dispatch"),
    }
    Ok(())
}

fn fmt_ks(f: &FitOutcome) -> String {
    f.fit().map_or_else(|| "NA".to_string(), |f| format!("{:.4}", f.ks))
}

fn default_manifest(cmd: &Command) -> PathBuf {
    let primary = match cmd {
        Command::Generate(a) => Some(a.out.clone()),
        Command::Embed(a) => Some(a.out.clone()),
        Command::Reconstruct(a) => Some(a.out.clone()),
        Command::Fit(a) => a.out.clone(),
        Command::Bounds(a) => a.out.clone(),
        Command::Linkpred(a) => a.out.clone(),
        Command::Classify(a) => a.out.clone(),
        Command::Pipeline(a) => return a.out_dir.join("manifest.json"),
        Command::Replay(_) => None,
    };
    match primary {
        Some(p) => {
            let mut s = p.into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        }
        None => PathBuf::from(format!("sfembed-{}.manifest.json", subcommand_name(cmd))),
    }
}

fn subcommand_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Generate(_) => "generate",
        Command::Embed(_) => "embed",
        Command::Reconstruct(_) => "reconstruct",
        Command::Fit(_) => "fit",
        Command::Bounds(_) => "bounds",
        Command::Linkpred(_) => "linkpred",
        Command::Classify(_) => "classify",
        Command::Pipeline(_) => "pipeline",
        Command::Replay(_) => "replay",
    }
}

fn execute(cli: Cli, argv: Vec<String>) -> anyhow::Result<()> {
    if let Command::Replay(r) = &cli.command {
        let manifest: Manifest = serde_json::from_reader(BufReader::new(
            File::open(&r.path).with_context(|| format!("cannot open {}", r.path.display()))?,
        ))
        .with_context(|| format!("reading manifest {}", r.path.display()))?;
        let replayed = Cli::try_parse_from(&manifest.argv).context("manifest holds an invalid command line")?;
        if matches!(replayed.command, Command::Replay(_)) {
            bail!("a manifest cannot replay another replay");
        }
        return execute(replayed, manifest.argv);
    }

    let start = Instant::now();
    let mut record = RunRecord::default();
    run_command(&cli.command, &mut record)?;
    let manifest = Manifest {
        subcommand: subcommand_name(&cli.command).to_string(),
        argv,
        resolved: serde_json::to_value(&cli.command)?,
        seeds: serde_json::Value::Object(record.seeds),
        inputs: record.inputs,
        outputs: record.outputs,
        version: env!("CARGO_PKG_VERSION").to_string(),
        duration_secs: start.elapsed().as_secs_f64(),
    };
    let path = cli.manifest.clone().unwrap_or_else(|| default_manifest(&cli.command));
    let mut w = BufWriter::new(File::create(&path).with_context(|| format!("cannot create {}", path.display()))?);
    serde_json::to_writer_pretty(&mut w, &manifest)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match execute(cli, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
