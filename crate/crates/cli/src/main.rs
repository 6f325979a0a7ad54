use std::fs;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use catnav_core::analytics::analyze;
use catnav_core::index::{save_index, search_categories, search_speeches};
use catnav_core::navigator::{read_log_dir, Condition, System, Task};
use catnav_core::simulator::{simulate_batch, Policy, PolicyKind, SimulationSpec};
use catnav_core::spn::edge_weights;
use catnav_core::{Collection, Execution};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "catnav", version, about = "Exploratory search over a category hierarchy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Data {
    /// Speeches as JSON lines.
    #[arg(long)]
    corpus: PathBuf,
    /// Directory with categories.tsv, edges.tsv, memberships.tsv and optionally root.txt.
    #[arg(long)]
    hierarchy: PathBuf,
    /// Prebuilt index from `catnav index`; rebuilt in memory when absent.
    #[arg(long)]
    index: Option<PathBuf>,
}

impl Data {
    fn load(&self) -> Result<Collection> {
        Collection::load(&self.corpus, &self.hierarchy, self.index.as_deref()).with_context(|| {
            format!(
                "loading corpus {} and hierarchy {}",
                self.corpus.display(),
                self.hierarchy.display()
            )
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Speeches,
    Categories,
}

#[derive(Clone, Copy, ValueEnum)]
enum SystemArg {
    Baseline,
    Spn,
}

#[derive(Clone, Copy, ValueEnum)]
enum TaskArg {
    Broad,
    Focused,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a corpus and hierarchy and print a summary.
    Ingest {
        #[command(flatten)]
        data: Data,
    },
    /// Build the speech and category indexes and write them to --out.
    Index {
        #[command(flatten)]
        data: Data,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank speeches or categories for a query.
    Search {
        #[command(flatten)]
        data: Data,
        #[arg(long)]
        q: String,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Target::Speeches)]
        target: Target,
    },
    /// Edge weights and sibling ranks below the frontier categories.
    Spn {
        #[command(flatten)]
        data: Data,
        #[arg(long)]
        q: String,
        /// Comma-separated category ids; defaults to the hierarchy root.
        #[arg(long, value_delimiter = ',')]
        frontier: Vec<String>,
    },
    /// Run the HTTP JSON API.
    Serve {
        #[command(flatten)]
        data: Data,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
    },
    /// Write simulated session logs to --out.
    Simulate {
        #[command(flatten)]
        data: Data,
        #[arg(long, default_value = "depth_first")]
        policy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Task query; also picks the starting root.
        #[arg(long, default_value = "")]
        q: String,
        /// Number of sessions, seeded seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        sessions: u64,
        #[arg(long, default_value_t = 20)]
        budget: u32,
        #[arg(long, value_enum, default_value_t = SystemArg::Spn)]
        system: SystemArg,
        #[arg(long, value_enum, default_value_t = TaskArg::Broad)]
        task: TaskArg,
        #[arg(long, default_value_t = 1.0)]
        temperature: f64,
        #[arg(long, default_value_t = 0.3)]
        backtrack_probability: f64,
    },
    /// Summarize a directory of session logs.
    Analyze {
        #[arg(long)]
        logs: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Ingest { data } => ingest(&data),
        Command::Index { data, out } => {
            let c = data.load()?;
            save_index(&out, &c.index, &c.categories).with_context(|| format!("writing {}", out.display()))?;
            println!(
                "indexed {} speeches, {} terms, {} categories into {}",
                c.index.doc_count(),
                c.index.collection().vocabulary_size(),
                c.graph.len(),
                out.display()
            );
            Ok(())
        }
        Command::Search { data, q, k, target } => {
            let c = data.load()?;
            let hits = match target {
                Target::Speeches => search_speeches(&c.index, &q, k)?,
                Target::Categories => search_categories(&c.categories, &q, k)?,
            };
            for (rank, (id, score)) in hits.iter().enumerate() {
                println!("{}\t{id}\t{score:.6}", rank + 1);
            }
            Ok(())
        }
        Command::Spn { data, q, frontier } => {
            let c = data.load()?;
            let frontier = if frontier.is_empty() {
                vec![c.graph.root().to_string()]
            } else {
                frontier
            };
            let map = edge_weights(&c.index, &c.corpus, &c.graph, &q, &frontier)?;
            println!("parent\tchild\trank\tweight\tscore");
            for e in &map.edges {
                println!("{}\t{}\t{}\t{:.6}\t{:.6}", e.parent, e.child, e.rank, e.weight, e.score);
            }
            Ok(())
        }
        Command::Serve { data, port, host } => {
            let c = Arc::new(data.load()?);
            let addr = SocketAddr::new(host, port);
            let rt = tokio::runtime::Runtime::new()?;
            eprintln!("serving {} speeches on http://{addr}", c.corpus.len());
            rt.block_on(catnav_service::serve(c, addr)).context("server stopped")?;
            Ok(())
        }
        Command::Simulate {
            data,
            policy,
            seed,
            out,
            q,
            sessions,
            budget,
            system,
            task,
            temperature,
            backtrack_probability,
        } => {
            let c = data.load()?;
            let kind: PolicyKind = policy.parse()?;
            let condition = Condition::new(
                match system {
                    SystemArg::Baseline => System::Baseline,
                    SystemArg::Spn => System::Spn,
                },
                match task {
                    TaskArg::Broad => Task::Broad,
                    TaskArg::Focused => Task::Focused,
                },
            );
            let specs: Vec<SimulationSpec> = (seed..seed + sessions)
                .map(|s| {
                    let p = Policy {
                        kind,
                        budget,
                        backtrack_probability,
                        temperature,
                        seed: s,
                    };
                    SimulationSpec::new(p, q.clone(), condition)
                })
                .collect();
            let logs = simulate_batch(&c, &specs, Execution::default())?;
            fs::create_dir_all(&out)?;
            for log in &logs {
                let path = out.join(log.file_name());
                log.write(&path).with_context(|| format!("writing {}", path.display()))?;
            }
            println!("wrote {} session logs to {}", logs.len(), out.display());
            Ok(())
        }
        Command::Analyze { logs, out } => analyze_dir(&logs, &out),
    }
}

fn ingest(data: &Data) -> Result<()> {
    let c = data.load()?;
    let (g, corpus) = (&c.graph, &c.corpus);
    let unmentioned = (0..g.entity_count())
        .filter(|&i| !corpus.mentions_entity(g.entity_at(i)))
        .count();
    let unreachable = g
        .categories()
        .iter()
        .filter(|cat| matches!(g.depth(&cat.id), Ok(None)))
        .count();
    println!("speeches\t{}", corpus.len());
    println!("debates\t{}", corpus.debates().len());
    println!("entities mentioned\t{}", corpus.entities().len());
    if let Some((from, to)) = corpus.date_range() {
        println!("dates\t{from}..{to}");
    }
    println!("categories\t{}", g.len());
    println!("edges\t{}", g.edges().count());
    println!("root\t{}", g.root());
    println!("member entities never mentioned\t{unmentioned}");
    println!("categories unreachable from root\t{unreachable}");
    Ok(())
}

fn analyze_dir(logs: &Path, out: &Path) -> Result<()> {
    if !logs.is_dir() {
        bail!("log directory {} does not exist", logs.display());
    }
    let sessions = read_log_dir(logs).with_context(|| format!("reading logs from {}", logs.display()))?;
    let analysis = analyze(&sessions)?;
    fs::create_dir_all(out)?;
    let files = [
        ("report.tsv", analysis.report.to_tsv()),
        ("report.json", analysis.report.to_json()),
        ("jumps.tsv", analysis.jump_series()),
        ("levels.tsv", analysis.level_series()),
        ("edge_ranks.tsv", analysis.edge_rank_series()),
    ];
    for (name, text) in files {
        fs::write(out.join(name), text).with_context(|| format!("writing {name}"))?;
    }
    print!("{}", analysis.report.to_tsv());
    eprintln!("analyzed {} sessions into {}", sessions.len(), out.display());
    Ok(())
}
