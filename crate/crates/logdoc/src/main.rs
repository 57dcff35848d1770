//! Command-line interface: index documents into a knowledge base, answer
//! queries by variable-depth retrieval, inspect parses, and explain
//! retrieval traces.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use logdoc::config::ConfigFile;
use logdoc::kbfile::{load_kb, save_kb};
use logdoc::records::{build_records, load_trace, render_trace, save_traces};
use logdoc::resources::{load_isa, load_resources, ResourcePaths};
use logdoc_core::chart::{self, dump_chart, full_analyses};
use logdoc_core::retrieval::{answer_query, index_document, render_passage, RetrievalError};
use logdoc_core::semantics::{compose, SchemeTables};
use logdoc_core::{tokenize, KnowledgeBase};

const EXIT_NO_RESULTS: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_DUPLICATE_DOC: u8 = 3;
const EXIT_UNKNOWN_TRACE: u8 = 4;

#[derive(Parser)]
#[command(name = "logdoc", version, about = "Logic-based passage retrieval")]
struct Cli {
    /// Config file (also read from $LOGDOC_CONFIG)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct ResourceArgs {
    #[arg(long)]
    grammar: Option<PathBuf>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    postulates: Option<PathBuf>,
    #[arg(long)]
    specs: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse documents into logical axioms and store them in the knowledge base
    Index {
        #[arg(long)]
        kb: PathBuf,
        /// Document id of the first file; subsequent files count upward
        #[arg(long)]
        doc_id: u64,
        #[command(flatten)]
        resources: ResourceArgs,
        /// Document files, one document each
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Answer a query over the knowledge base by variable-depth retrieval
    Query {
        #[arg(long)]
        kb: PathBuf,
        #[command(flatten)]
        resources: ResourceArgs,
        #[arg(long)]
        isa: Option<PathBuf>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        o: Option<usize>,
        #[arg(long)]
        escalate_in_band: bool,
        /// Output format: human or records (line-delimited JSON)
        #[arg(long, default_value = "human")]
        format: String,
        query: String,
    },
    /// Print ranked analyses with preference values and the survivor set
    Parse {
        #[command(flatten)]
        resources: ResourceArgs,
        /// Retained value cohorts per constituent (0 disables pruning)
        #[arg(long)]
        n_best: Option<usize>,
        #[arg(long)]
        no_prune: bool,
        /// Also dump the chart, one edge per line
        #[arg(long)]
        chart: bool,
        text: String,
    },
    /// Show the resolution steps behind a trace id from `query --format records`
    Explain {
        #[arg(long)]
        kb: PathBuf,
        trace_id: String,
    },
}

fn resource_paths(args: &ResourceArgs, cfg: &ConfigFile) -> ResourcePaths {
    ResourcePaths {
        grammar: args.grammar.clone().or_else(|| cfg.paths.grammar.clone()),
        lexicon: args.lexicon.clone().or_else(|| cfg.paths.lexicon.clone()),
        postulates: args.postulates.clone().or_else(|| cfg.paths.postulates.clone()),
        specs: args.specs.clone().or_else(|| cfg.paths.specs.clone()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match ConfigFile::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match run(cli.command, &cfg) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn run(command: Command, cfg: &ConfigFile) -> Result<ExitCode> {
    match command {
        Command::Index { kb, doc_id, resources, files } => {
            let rs = match load_resources(&resource_paths(&resources, cfg)) {
                Ok(rs) => rs,
                Err(e) => {
                    eprint!("{e}");
                    return Ok(ExitCode::from(EXIT_CONFIG));
                }
            };
            let score = cfg.score_config(None, false)?;
            let tables = SchemeTables::default();
            let kb_path = kb.as_path();
            let mut base = load_kb(kb_path)?;
            for (i, file) in files.iter().enumerate() {
                let text = std::fs::read_to_string(file)
                    .with_context(|| format!("reading {}", file.display()))?;
                let document = doc_id + i as u64;
                match index_document(&mut base, document, &text, &rs, &tables, &score) {
                    Ok(report) => println!("{report}"),
                    Err(RetrievalError::Kb(e))
                        if matches!(e, logdoc_core::kb::KbError::DuplicateDocument(_)) =>
                    {
                        eprintln!("error: {e}");
                        return Ok(ExitCode::from(EXIT_DUPLICATE_DOC));
                    }
                    Err(e) => return Err(anyhow::anyhow!("{e}")),
                }
            }
            save_kb(kb_path, &base)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Query { kb, resources, isa, m, n, o, escalate_in_band, format, query } => {
            let rs = match load_resources(&resource_paths(&resources, cfg)) {
                Ok(rs) => rs,
                Err(e) => {
                    eprint!("{e}");
                    return Ok(ExitCode::from(EXIT_CONFIG));
                }
            };
            let isa_path = isa.or_else(|| cfg.paths.isa.clone());
            let hierarchy = match load_isa(isa_path.as_deref()) {
                Ok(h) => h,
                Err(e) => {
                    eprint!("{e}");
                    return Ok(ExitCode::from(EXIT_CONFIG));
                }
            };
            let vd = cfg.vd_config(m, n, o, escalate_in_band)?;
            let score = cfg.score_config(None, false)?;
            let tables = SchemeTables::default();
            let base = load_kb(&kb)?;
            // postulates from the resource file join the rules stored in the kb
            let base = with_postulates(base, &rs);
            let outcome = match answer_query(&base, &query, &rs, &hierarchy, &tables, &vd, &score)
            {
                Ok(o) => o,
                Err(RetrievalError::EmptyQuery) => {
                    eprintln!("error: empty query");
                    return Ok(ExitCode::from(EXIT_CONFIG));
                }
                Err(e) => return Err(anyhow::anyhow!("{e}")),
            };
            match format.as_str() {
                "human" => {
                    for p in &outcome.passages {
                        println!("{}", render_passage(p));
                    }
                }
                "records" => {
                    let (records, traces) = build_records(&outcome.passages, &base, &query);
                    save_traces(&kb, &traces)?;
                    for r in &records {
                        println!("{}", serde_json::to_string(r)?);
                    }
                }
                other => anyhow::bail!("unknown format `{other}` (use human or records)"),
            }
            if outcome.passages.is_empty() {
                Ok(ExitCode::from(EXIT_NO_RESULTS))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }

        Command::Parse { resources, n_best, no_prune, chart: dump, text } => {
            let rs = match load_resources(&resource_paths(&resources, cfg)) {
                Ok(rs) => rs,
                Err(e) => {
                    eprint!("{e}");
                    return Ok(ExitCode::from(EXIT_CONFIG));
                }
            };
            let score = cfg.score_config(n_best, no_prune)?;
            let tables = SchemeTables::default();
            let tokens = tokenize(&text);
            let parsed = chart::parse(&tokens, &rs, &score);
            let ranked = full_analyses(&parsed);
            let survivors = chart::filter_readings(&ranked, &score);
            println!("{} tokens, {} edges, {} full analyses", tokens.len(), parsed.edge_count(), ranked.len());
            for a in &ranked {
                let e = parsed.edge(a.root);
                let marker = if survivors.iter().any(|s| s.root == a.root) { "*" } else { " " };
                println!("{marker} #{} {:.4} {}", a.reading + 1, a.value, e.category);
                match compose(a, &parsed, &tables) {
                    Ok(lfs) => {
                        for lf in lfs {
                            for (atom, level) in lf.atoms.iter().zip(&lf.levels) {
                                println!("      [{level}] {atom}");
                            }
                        }
                    }
                    Err(e) => println!("      (no logical form: {e})"),
                }
            }
            if dump {
                print!("{}", dump_chart(&parsed));
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Explain { kb, trace_id } => {
            match load_trace(&kb, &trace_id)? {
                Some(t) => {
                    print!("{}", render_trace(&t));
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    eprintln!("error: unknown trace id `{trace_id}`");
                    Ok(ExitCode::from(EXIT_UNKNOWN_TRACE))
                }
            }
        }
    }
}

fn with_postulates(mut kb: KnowledgeBase, rs: &logdoc_core::ResourceSet) -> KnowledgeBase {
    for p in &rs.postulates {
        kb.add_rule(p.name.clone(), p.clause.clone());
    }
    kb
}
