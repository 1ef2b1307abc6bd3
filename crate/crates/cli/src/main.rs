mod cache;
mod commands;
mod ingest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cache::{write_atomic, Cache};

#[derive(Parser, Debug)]
#[command(name = "stratops", version, about = "Operads, cobar complexes and stratification tables of moduli of curves")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Recompute even if a cached result exists.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Write to this file (atomically) instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OperadName {
    Comm,
    Assoc,
    Lie,
    CobarLiec,
    Toy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    Edge,
    Unsigned,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AutPolicy {
    DegreeZero,
    Reject,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Rooted trees with n labelled leaves.
    Trees {
        #[arg(long)]
        n: usize,
        /// Internal edges; all counts when omitted.
        #[arg(long)]
        edges: Option<usize>,
        #[arg(long)]
        count: bool,
    },
    /// Stable graphs of type (g, n).
    Graphs {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_edges: Option<usize>,
        #[arg(long)]
        count: bool,
    },
    /// Operad axiom check on basis elements.
    Axioms {
        #[arg(long, value_enum, conflicts_with = "file")]
        operad: Option<OperadName>,
        /// Operad table (JSON).
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        max_arity: usize,
    },
    /// Dimensions of free algebras on d generators.
    FreeDims {
        #[arg(long, value_enum)]
        operad: OperadName,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        max_arity: usize,
    },
    /// The cobar complex in one arity.
    Cobar {
        #[arg(long)]
        cooperad: String,
        #[arg(long)]
        arity: usize,
        #[arg(long, value_enum, default_value_t = Convention::Edge)]
        convention: Convention,
    },
    /// Homology of the cobar complex, by internal-edge count.
    CobarHomology {
        #[arg(long)]
        cooperad: String,
        #[arg(long)]
        arity: usize,
    },
    /// First page of the stratification spectral sequence.
    E1 {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: usize,
        /// Extra open Betti numbers, CSV with header g,n,k,dim.
        #[arg(long)]
        betti: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = AutPolicy::DegreeZero)]
        aut: AutPolicy,
    },
    /// Betti numbers of the genus-zero compactification.
    BettiPredict {
        #[arg(long)]
        n: usize,
    },
    /// The q = 0 row against the cobar complex of Lie^c.
    MiddleRow {
        #[arg(long)]
        n: usize,
    },
    /// First page of the logarithmic sequence.
    DualE1 {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: usize,
        /// Compactified Betti numbers for g > 0, CSV with header g,n,k,dim.
        #[arg(long)]
        compact_betti: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = AutPolicy::DegreeZero)]
        aut: AutPolicy,
    },
    /// A∞ relations for a map family (JSON).
    CheckAinf {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
    },
    /// A∞ relations plus shuffle vanishing.
    CheckCinf {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
    },
    /// Pages of a filtered operad (the built-in toy unless --file is given).
    Er {
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        r: usize,
    },
    /// The slice (r-1)p + rq = k(n-1) of a page.
    Dk {
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        k: i64,
        /// Tabulate on the genus-zero moduli tables instead (r = 1).
        #[arg(long)]
        moduli: Option<usize>,
    },
    /// C∞ structure induced on an algebra over the toy moduli operad.
    PipelineCinf {
        /// Map family whose m2 is used; the built-in dg toy when omitted.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        max_n: usize,
    },
}

impl Command {
    fn inputs(&self) -> Vec<&PathBuf> {
        match self {
            Command::Axioms { file, .. }
            | Command::E1 { betti: file, .. }
            | Command::DualE1 { compact_betti: file, .. }
            | Command::Er { file, .. }
            | Command::Dk { file, .. }
            | Command::PipelineCinf { file, .. } => file.iter().collect(),
            Command::CheckAinf { file, .. } | Command::CheckCinf { file, .. } => vec![file],
            _ => vec![],
        }
    }
}

/// A rendered result; `ok` is false when a check failed.
pub struct Output {
    pub json: serde_json::Value,
    pub csv: String,
    pub text: String,
    pub ok: bool,
}

impl Output {
    fn render(&self, format: Format) -> String {
        let mut s = match format {
            Format::Json => serde_json::to_string_pretty(&self.json).expect("values serialize"),
            Format::Csv => self.csv.clone(),
            Format::Text => self.text.clone(),
        };
        if !s.ends_with('\n') {
            s.push('\n');
        }
        s
    }
}

fn run(cli: &Cli) -> anyhow::Result<(String, bool)> {
    let cache = Cache::from_env(!cli.no_cache);
    let mut parts = vec![format!("{:?}", cli.command), format!("{:?}", cli.format)];
    for path in cli.command.inputs() {
        parts.push(std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?);
    }
    let key = Cache::key(&parts.iter().map(String::as_str).collect::<Vec<_>>());
    if let Some(hit) = cache.get(&key) {
        if let Some((flag, body)) = hit.split_once('\n') {
            return Ok((body.to_string(), flag == "ok"));
        }
    }
    let out = commands::execute(&cli.command)?;
    let body = out.render(cli.format);
    cache.put(&key, &format!("{}\n{body}", if out.ok { "ok" } else { "fail" }));
    Ok((body, out.ok))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((body, ok)) => {
            match &cli.output {
                Some(path) => {
                    if let Err(e) = write_atomic(path, &body) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{body}"),
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
