//! `lgs`: solve, verify and encode loose graph simulation problems.
//!
//! Exit status: 0 when a witness is found or verification passes, 1 when
//! the answer is negative, 2 on usage, I/O or schema errors.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lgs::algebra::normal_form;
use lgs::candidate::{check_all, CandidateSubgraph};
use lgs::dot::{guest_dot, witness_dot};
use lgs::encode::{encode_gs, encode_rlpm, encode_rlsgi, encode_sgi};
use lgs::graph::{tensor_product, HostGraph};
use lgs::guest::Guest;
use lgs::io::{self as files, Document};
use lgs::regex::parse_regex;
use lgs::solver::oracle::{gs_oracle, rlpm_oracle, rlsgi_oracle, sgi_oracle, OracleCaps};
use lgs::solver::{greatest_lgs, solve_emptiness_with, SolverOptions};

#[derive(Parser)]
#[command(
    name = "lgs",
    version,
    about = "Loose graph simulations: solver, verifier and encoders"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Where to write the result (`-` for stdout).
    #[arg(short, long, default_value = "-")]
    out: PathBuf,
    /// Also write a Graphviz rendering here.
    #[arg(long, value_name = "PATH")]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct Caps {
    /// Largest query the exhaustive oracles accept.
    #[arg(long, default_value_t = OracleCaps::default().query_nodes)]
    max_query_nodes: usize,
    /// Largest host the oracles accept.
    #[arg(long, default_value_t = OracleCaps::default().host_nodes)]
    max_host_nodes: usize,
}

impl Caps {
    fn get(&self) -> OracleCaps {
        OracleCaps {
            query_nodes: self.max_query_nodes,
            host_nodes: self.max_host_nodes,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Find some LGS of GUEST in HOST.
    Solve {
        guest: PathBuf,
        host: PathBuf,
        /// Worker threads (0 = sequential); defaults to LGS_THREADS.
        #[arg(long)]
        threads: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Compute the greatest LGS; GUEST must have no unique or exclusive nodes.
    Greatest {
        guest: PathBuf,
        host: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Check WITNESS against the five LGS conditions.
    Verify {
        guest: PathBuf,
        host: PathBuf,
        witness: PathBuf,
    },
    /// Translate a classical matching query into a guest.
    #[command(subcommand)]
    Encode(Encode),
    /// Answer a classical matching query directly.
    #[command(subcommand)]
    Oracle(Oracle),
    /// The tensor product of two graphs, written as a witness file.
    Product {
        left: PathBuf,
        right: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Rewrite a guest as a sum of products of elementary guests.
    Normalform {
        guest: PathBuf,
        #[arg(short, long, default_value = "-")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum Encode {
    /// Subgraph isomorphism query (a host file).
    Sgi {
        query: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Graph simulation query (a host file).
    Gs {
        query: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Regular path query, given as an ε-free expression.
    Rlpm {
        regex: String,
        #[command(flatten)]
        output: Output,
    },
    /// Regular-language subgraph isomorphism (a decorated-graph file).
    Rlsgi {
        query: PathBuf,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum Oracle {
    /// Injective label-preserving embedding, by backtracking.
    Sgi {
        query: PathBuf,
        host: PathBuf,
        #[command(flatten)]
        caps: Caps,
    },
    /// Prints the maximal simulation when every query node is related.
    Gs {
        query: PathBuf,
        host: PathBuf,
        #[command(flatten)]
        caps: Caps,
    },
    /// Some host path spells a word of the expression.
    Rlpm {
        regex: String,
        host: PathBuf,
        #[command(flatten)]
        caps: Caps,
    },
    /// Injective node map whose edges map to paths in their languages.
    Rlsgi {
        query: PathBuf,
        host: PathBuf,
        #[command(flatten)]
        caps: Caps,
    },
}

fn read_text(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .context("reading stdin")?;
        Ok(text)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if path.as_os_str() == "-" {
        io::stdout()
            .write_all(text.as_bytes())
            .context("writing stdout")
    } else {
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }
}

fn load<T>(path: &Path, read: impl FnOnce(&str) -> Result<T, files::IoError>) -> Result<T> {
    let text = read_text(path)?;
    read(&text).with_context(|| format!("in {}", path.display()))
}

fn load_guest(path: &Path) -> Result<Guest> {
    load(path, files::read_guest)
}

fn load_host(path: &Path) -> Result<HostGraph> {
    load(path, files::read_host)
}

/// The underlying graph of a host or guest file.
fn load_graph(path: &Path) -> Result<HostGraph> {
    match load(path, files::read_document)? {
        Document::Host(h) => Ok(h),
        Document::Guest(g) => Ok(g.graph().clone()),
        Document::GuestExpr(e) => Ok(lgs::algebra::eval(&e)?.graph().clone()),
        other => bail!(
            "{}: expected a host or guest file, found kind `{}`",
            path.display(),
            other.kind()
        ),
    }
}

fn emit_witness(w: &CandidateSubgraph, output: &Output) -> Result<()> {
    write_text(&output.out, &files::write_witness(w))?;
    if let Some(dot) = &output.dot {
        write_text(dot, &witness_dot(w))?;
    }
    Ok(())
}

fn emit_guest(g: &Guest, output: &Output) -> Result<()> {
    write_text(&output.out, &files::write_guest(g))?;
    if let Some(dot) = &output.dot {
        write_text(dot, &guest_dot(g))?;
    }
    Ok(())
}

fn verdict(found: bool, what: &str) -> ExitCode {
    if found {
        println!("{what}: yes");
        ExitCode::SUCCESS
    } else {
        println!("{what}: no");
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve {
            guest,
            host,
            threads,
            output,
        } => {
            let (g, h) = (load_guest(&guest)?, load_host(&host)?);
            let options = match threads {
                Some(n) => SolverOptions { threads: Some(n) },
                None => SolverOptions::from_env(),
            };
            match solve_emptiness_with(&g, &h, &options) {
                Some(w) => {
                    emit_witness(&w, &output)?;
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    eprintln!("no loose graph simulation exists");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Greatest {
            guest,
            host,
            output,
        } => {
            let (g, h) = (load_guest(&guest)?, load_host(&host)?);
            match greatest_lgs(&g, &h)? {
                Some(w) => {
                    emit_witness(&w, &output)?;
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    eprintln!("no loose graph simulation exists");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Verify {
            guest,
            host,
            witness,
        } => {
            let (g, h) = (load_guest(&guest)?, load_host(&host)?);
            let w = load(&witness, files::read_witness)?;
            match check_all(&g, &h, &w) {
                Ok(report) => {
                    print!("{report}");
                    Ok(if report.passed() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    })
                }
                Err(e) => {
                    println!("not a subgraph of the product: {e}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Encode(enc) => {
            let (g, output) = match enc {
                Encode::Sgi { query, output } => (encode_sgi(&load_host(&query)?), output),
                Encode::Gs { query, output } => (encode_gs(&load_host(&query)?), output),
                Encode::Rlpm { regex, output } => (encode_rlpm(&parse_regex(&regex)?)?, output),
                Encode::Rlsgi { query, output } => {
                    (encode_rlsgi(&load(&query, files::read_decorated)?)?, output)
                }
            };
            emit_guest(&g, &output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle(oracle) => match oracle {
            Oracle::Sgi { query, host, caps } => {
                let found = sgi_oracle(&load_host(&query)?, &load_host(&host)?, &caps.get())?;
                Ok(verdict(found, "subgraph isomorphism"))
            }
            Oracle::Gs { query, host, caps } => {
                let rel = gs_oracle(&load_host(&query)?, &load_host(&host)?, &caps.get())?;
                if let Some(rel) = &rel {
                    for (u, v) in rel {
                        println!("{u} {v}");
                    }
                }
                Ok(verdict(rel.is_some(), "graph simulation"))
            }
            Oracle::Rlpm { regex, host, caps } => {
                let found = rlpm_oracle(&parse_regex(&regex)?, &load_host(&host)?, &caps.get())?;
                Ok(verdict(found, "regular path match"))
            }
            Oracle::Rlsgi { query, host, caps } => {
                let q = load(&query, files::read_decorated)?;
                let found = rlsgi_oracle(&q, &load_host(&host)?, &caps.get())?;
                Ok(verdict(found, "regular subgraph isomorphism"))
            }
        },
        Command::Product {
            left,
            right,
            output,
        } => {
            let product = tensor_product(&load_graph(&left)?, &load_graph(&right)?);
            emit_witness(&CandidateSubgraph::from_product(&product), &output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Normalform { guest, out } => {
            let g = load_guest(&guest)?;
            write_text(&out, &files::write_guest_expr(&normal_form(&g)))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
