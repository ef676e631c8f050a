//! Command-line front end for the even FC-type Artin group toolkit.

use std::fs;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use evenfc::intersect::{intersect_traced, intersect_many, Trace};
use evenfc::kernel::{kernel_rewrite, vertex_kernel_graph};
use evenfc::oracle::selftest;
use evenfc::parabolic::ParabolicSubgroup;
use evenfc::solve::{is_equal, is_trivial};
use evenfc::{ArtinGraph, VertexId, VertexSet, Word};

#[derive(Parser)]
#[command(name = "evenfc", version, about = "Even FC-type Artin group calculator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputOpts {
    /// Emit JSON instead of text
    #[arg(long, global = false)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a graph file defines an even FC-type Artin group
    Validate {
        graph: String,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Decide whether two words are equal in the group
    Eq {
        graph: String,
        left: String,
        right: String,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Decide whether a word is trivial
    Triv {
        graph: String,
        word: String,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Decide membership of a word in a parabolic subgroup
    Member {
        graph: String,
        word: String,
        /// Support of the parabolic, comma-separated vertex names
        #[arg(long)]
        support: String,
        /// Conjugator word (defaults to the identity)
        #[arg(long, default_value = "1")]
        conj: String,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Intersect two parabolic subgroups
    Intersect {
        graph: String,
        /// Parabolic spec: "support" or "conjugator ; support", e.g. "x a^-1 ; a,b"
        p: String,
        q: String,
        /// Include the reduction trace in the output
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Intersect a family of parabolic subgroups
    IntersectMany {
        graph: String,
        /// Parabolic specs, each "support" or "conjugator ; support"
        #[arg(required = true)]
        parabolics: Vec<String>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Present the kernel of the retraction killing one vertex
    Kernel {
        graph: String,
        /// The vertex whose retraction kernel is presented
        vertex: String,
        /// Rewrite this kernel word over the kernel graph generators
        #[arg(long)]
        rewrite: Option<String>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Cross-check the solver against the brute-force oracle
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        vertices: usize,
        #[arg(long = "max-len", default_value_t = 6)]
        max_len: usize,
        #[arg(long, default_value_t = 50)]
        cases: usize,
        #[command(flatten)]
        out: OutputOpts,
    },
}

fn load_graph(path: &str) -> Result<ArtinGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading `{path}`"))?;
    ArtinGraph::parse(&text).map_err(|e| anyhow!("{e}"))
}

fn parse_support(graph: &ArtinGraph, text: &str) -> Result<VertexSet> {
    let mut set = VertexSet::new();
    for name in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let v = VertexId::new(name).map_err(|e| anyhow!("{e}"))?;
        if !graph.contains(&v) {
            bail!("unknown vertex `{name}`");
        }
        set.insert(v);
    }
    Ok(set)
}

fn parse_parabolic(graph: &ArtinGraph, spec: &str) -> Result<ParabolicSubgroup> {
    let (conj_text, support_text) = match spec.split_once(';') {
        Some((c, s)) => (c.trim(), s.trim()),
        None => ("1", spec.trim()),
    };
    let conj = Word::parse(graph, conj_text).map_err(|e| anyhow!("{e}"))?;
    let support = parse_support(graph, support_text)?;
    ParabolicSubgroup::new(conj, support).map_err(|e| anyhow!("{e}"))
}

fn support_names(s: &VertexSet) -> Vec<String> {
    s.iter().map(|v| v.to_string()).collect()
}

fn emit_bool(json: bool, label: &str, value: bool) {
    if json {
        println!("{}", json!({ "result": value }));
    } else {
        println!("{label}");
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate { graph, out } => {
            let text = fs::read_to_string(&graph).with_context(|| format!("reading `{graph}`"))?;
            let raw = ArtinGraph::parse_raw(&text).map_err(|e| anyhow!("{e}"))?;
            match evenfc::graph::validate(&raw) {
                Ok(g) => {
                    if out.json {
                        println!(
                            "{}",
                            json!({ "result": "valid", "vertices": support_names(g.vertices()) })
                        );
                    } else {
                        println!("valid even FC");
                    }
                    Ok(())
                }
                Err(report) => {
                    if out.json {
                        println!("{}", json!({ "result": "invalid", "report": report.to_string() }));
                    } else {
                        print!("{report}");
                    }
                    bail!("graph is not even FC-type");
                }
            }
        }
        Command::Eq { graph, left, right, out } => {
            let g = load_graph(&graph)?;
            let u = Word::parse(&g, &left).map_err(|e| anyhow!("{e}"))?;
            let v = Word::parse(&g, &right).map_err(|e| anyhow!("{e}"))?;
            let eq = is_equal(&u, &v).map_err(|e| anyhow!("{e}"))?;
            emit_bool(out.json, if eq { "equal" } else { "not equal" }, eq);
            Ok(())
        }
        Command::Triv { graph, word, out } => {
            let g = load_graph(&graph)?;
            let w = Word::parse(&g, &word).map_err(|e| anyhow!("{e}"))?;
            let t = is_trivial(&w).map_err(|e| anyhow!("{e}"))?;
            emit_bool(out.json, if t { "trivial" } else { "nontrivial" }, t);
            Ok(())
        }
        Command::Member { graph, word, support, conj, out } => {
            let g = load_graph(&graph)?;
            let w = Word::parse(&g, &word).map_err(|e| anyhow!("{e}"))?;
            let p = parse_parabolic(&g, &format!("{conj} ; {support}"))?;
            let m = p.member(&w).map_err(|e| anyhow!("{e}"))?;
            emit_bool(out.json, if m { "member" } else { "not a member" }, m);
            Ok(())
        }
        Command::Intersect { graph, p, q, trace, out } => {
            let g = load_graph(&graph)?;
            let p = parse_parabolic(&g, &p)?;
            let q = parse_parabolic(&g, &q)?;
            let (r, steps) = intersect_traced(&p, &q).map_err(|e| anyhow!("{e}"))?;
            print_parabolic(&r, if trace { Some(&steps) } else { None }, out.json);
            Ok(())
        }
        Command::IntersectMany { graph, parabolics, out } => {
            let g = load_graph(&graph)?;
            let family: Result<Vec<_>> =
                parabolics.iter().map(|s| parse_parabolic(&g, s)).collect();
            let r = intersect_many(&family?).map_err(|e| anyhow!("{e}"))?;
            print_parabolic(&r, None, out.json);
            Ok(())
        }
        Command::Kernel { graph, vertex, rewrite, out } => {
            let g = load_graph(&graph)?;
            let x = VertexId::new(&vertex).map_err(|e| anyhow!("{e}"))?;
            let mut ctx = vertex_kernel_graph(&g, &x).map_err(|e| anyhow!("{e}"))?;
            let rewritten = match &rewrite {
                Some(text) => {
                    let w = Word::parse(&g, text).map_err(|e| anyhow!("{e}"))?;
                    Some(kernel_rewrite(&mut ctx, &w).map_err(|e| anyhow!("{e}"))?)
                }
                None => None,
            };
            let delta = ctx.delta();
            let link = ctx.link().clone();
            if out.json {
                let edges: Vec<_> = delta
                    .edges()
                    .map(|(u, v, m)| json!([u.to_string(), v.to_string(), m]))
                    .collect();
                let sigmas: Vec<_> = link
                    .iter()
                    .map(|u| {
                        let s = ctx.sigma(u).expect("link vertex");
                        json!({ "generator": u.to_string(), "sigma": s.to_string() })
                    })
                    .collect();
                println!(
                    "{}",
                    json!({
                        "result": "ok",
                        "vertices": support_names(delta.vertices()),
                        "edges": edges,
                        "sigma": sigmas,
                        "rewritten": rewritten.map(|w| w.to_string()),
                    })
                );
            } else {
                println!("kernel graph vertices: {}", support_names(delta.vertices()).join(" "));
                for (u, v, m) in delta.edges() {
                    println!("edge {u} {v} {m}");
                }
                for u in &link {
                    println!("sigma_{u} = {}", ctx.sigma(u).expect("link vertex"));
                }
                if let Some(w) = rewritten {
                    println!("rewritten: {w}");
                }
            }
            Ok(())
        }
        Command::Selftest { seed, vertices, max_len, cases, out } => {
            let report =
                selftest(seed, vertices, max_len, cases).map_err(|e| anyhow!("{e}"))?;
            if out.json {
                println!(
                    "{}",
                    json!({
                        "result": if report.disagreements.is_empty() { "ok" } else { "disagreement" },
                        "cases": report.cases,
                        "decisive": report.decisive,
                        "unknown": report.unknown,
                        "agreements": report.agreements,
                        "disagreements": report.disagreements,
                    })
                );
            } else {
                println!(
                    "cases {} decisive {} unknown {} agreements {}",
                    report.cases, report.decisive, report.unknown, report.agreements
                );
                for d in &report.disagreements {
                    println!("disagreement: {d}");
                }
            }
            if report.disagreements.is_empty() {
                Ok(())
            } else {
                bail!("oracle and solver disagree")
            }
        }
    }
}

fn print_parabolic(p: &ParabolicSubgroup, trace: Option<&Trace>, json: bool) {
    if json {
        println!(
            "{}",
            json!({
                "result": "ok",
                "support": support_names(p.support()),
                "conjugator": p.conjugator().to_string(),
                "trace": trace.map(|t| t.steps.clone()),
            })
        );
    } else {
        println!("support: {{{}}}", support_names(p.support()).join(","));
        println!("conjugator: {}", p.conjugator());
        if let Some(t) = trace {
            for step in &t.steps {
                println!("trace: {step}");
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
