use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use ontoforge::compiler::{compile_tools, emit_manifest, generate_plan, CompileError, Plan, PlanError};
use ontoforge::eval::{self, category_summary, project_records, records_to_json, Counts, EvalError, RecordSchema};
use ontoforge::grounder::{
    build_label_index, discover_label_predicates, fetch_labels_from_endpoint, ground_directory, ground_graph,
    GroundError, GroundOptions, LabelIndex, Mode, DEFAULT_TAU,
};
use ontoforge::mcp::{serve, Client, ClientError, ProcessEndpoint, Server};
use ontoforge::rdf::vocab::rdfs;
use ontoforge::rdf::{parse_turtle, serialize_turtle, Graph, Iri, RdfError};
use ontoforge::runner::{run_plan, FinalStatus, RepairTable, RunError, Trace};
use ontoforge::runtime::{validate_graph, Enforcement, RuntimeError, Session};
use ontoforge::schema::{extract_schema, SchemaError, SchemaModel};

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path}: {message}")]
    Json { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Rdf(#[from] RdfError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Parser)]
#[command(
    name = "ontoforge",
    version,
    about = "Ontology-compiled tools for constrained knowledge graph construction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a T-Box into manifest.json and plan.json.
    Compile {
        #[arg(long)]
        tbox: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve the compiled tools over JSON-RPC on stdin/stdout.
    Serve {
        #[arg(long)]
        tbox: PathBuf,
        #[arg(long)]
        doc_id: String,
        #[arg(long)]
        workdir: PathBuf,
        #[arg(long)]
        no_feedback: bool,
    },
    /// Replay a tool-call trace through a spawned server and print the run report.
    RunPlan {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        repairs: Option<PathBuf>,
        #[arg(long)]
        tbox: PathBuf,
        #[arg(long)]
        doc_id: String,
        #[arg(long)]
        workdir: PathBuf,
        #[arg(long)]
        no_feedback: bool,
    },
    /// Check a graph against a T-Box; exits 1 when violations are found.
    Validate {
        #[arg(long)]
        tbox: PathBuf,
        #[arg(long)]
        graph: PathBuf,
    },
    /// Build a label index from a reference graph or a SPARQL endpoint.
    BuildIndex {
        #[arg(long, conflicts_with = "endpoint", required_unless_present = "endpoint")]
        reference: Option<PathBuf>,
        #[arg(long)]
        endpoint: Option<String>,
        /// Reference classes whose instances are indexed.
        #[arg(long, value_delimiter = ',', required = true)]
        classes: Vec<String>,
        /// Label predicates; defaults to all string-valued predicates found
        /// on the reference instances (rdfs:label for endpoints).
        #[arg(long, value_delimiter = ',')]
        predicates: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Align local instances to reference IRIs.
    Ground {
        /// A Turtle file or a directory of them.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        index: PathBuf,
        /// Local classes whose instances are grounded.
        #[arg(long, value_delimiter = ',', required = true)]
        classes: Vec<String>,
        #[arg(long, default_value = "sameas")]
        mode: String,
        #[arg(long, default_value_t = DEFAULT_TAU)]
        tau: f64,
        /// Output file (for a file input) or directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Project a graph into JSON records.
    Project {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score predicted record files against gold ones.
    Evaluate {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        /// Directory for metrics.json and scores.csv; without it the
        /// metrics JSON goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Micro and macro scores from a CSV of per-category counts
    /// (columns: category,tp,fp,fn).
    Aggregate {
        #[arg(long)]
        counts: PathBuf,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Json {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn load_schema(tbox: &Path) -> Result<SchemaModel, CliError> {
    Ok(extract_schema(&parse_turtle(&read(tbox)?)?)?)
}

fn load_graph(path: &Path) -> Result<Graph, CliError> {
    Ok(parse_turtle(&read(path)?)?)
}

fn iris(values: &[String]) -> Result<Vec<Iri>, CliError> {
    Ok(values.iter().map(Iri::new).collect::<Result<_, _>>()?)
}

fn enforcement(no_feedback: bool) -> Enforcement {
    if no_feedback {
        Enforcement::NoFeedback
    } else {
        Enforcement::Feedback
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Compile { tbox, out } => {
            let schema = load_schema(&tbox)?;
            let tools = compile_tools(&schema)?;
            let plan = generate_plan(&schema, &tools)?;
            fs::create_dir_all(&out).map_err(|e| CliError::Io {
                path: out.clone(),
                message: e.to_string(),
            })?;
            write(&out.join("manifest.json"), &emit_manifest(&tools).to_json())?;
            write(&out.join("plan.json"), &plan.to_json())?;
            log::info!("compiled {} tools into {}", tools.tools.len(), out.display());
        }
        Command::Serve {
            tbox,
            doc_id,
            workdir,
            no_feedback,
        } => {
            let schema = load_schema(&tbox)?;
            let tools = compile_tools(&schema)?;
            let session = Session::new(schema, tools, &doc_id, enforcement(no_feedback))?.with_workdir(&workdir)?;
            let mut server = Server::new(session);
            serve(&mut server, io::stdin().lock(), io::stdout().lock()).map_err(|e| CliError::Io {
                path: PathBuf::from("<stdio>"),
                message: e.to_string(),
            })?;
        }
        Command::RunPlan {
            plan,
            trace,
            repairs,
            tbox,
            doc_id,
            workdir,
            no_feedback,
        } => {
            let plan: Plan = read_json(&plan)?;
            let trace: Trace = read_json(&trace)?;
            let repairs: RepairTable = match repairs {
                Some(p) => read_json(&p)?,
                None => RepairTable::default(),
            };
            let manifest = emit_manifest(&compile_tools(&load_schema(&tbox)?)?);
            repairs.validate(&manifest)?;
            let exe = std::env::current_exe().map_err(|e| CliError::Usage(e.to_string()))?;
            let mut args = vec![
                "serve".to_string(),
                "--tbox".into(),
                tbox.display().to_string(),
                "--doc-id".into(),
                doc_id,
                "--workdir".into(),
                workdir.display().to_string(),
            ];
            if no_feedback {
                args.push("--no-feedback".into());
            }
            let mut client = Client::new(ProcessEndpoint::spawn(exe, &args)?);
            client.initialize()?;
            let report = run_plan(&plan, &trace, &repairs, &mut client)?;
            client.into_endpoint().shutdown()?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            if report.final_status == FinalStatus::Incomplete {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Validate { tbox, graph } => {
            let schema = load_schema(&tbox)?;
            let reports = validate_graph(&load_graph(&graph)?, &schema);
            println!("{}", serde_json::to_string_pretty(&reports).expect("reports serialize"));
            if !reports.is_empty() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::BuildIndex {
            reference,
            endpoint,
            classes,
            predicates,
            out,
        } => {
            let classes: BTreeSet<Iri> = iris(&classes)?.into_iter().collect();
            let predicates = iris(&predicates)?;
            let index = match (reference, endpoint) {
                (Some(path), _) => {
                    let graph = load_graph(&path)?;
                    let predicates = if predicates.is_empty() {
                        discover_label_predicates(&graph, &classes)
                            .into_iter()
                            .map(|c| c.predicate)
                            .collect()
                    } else {
                        predicates
                    };
                    build_label_index(&graph, &classes, &predicates)
                }
                (None, Some(url)) => {
                    let predicates = if predicates.is_empty() {
                        vec![Iri::new(rdfs::LABEL)?]
                    } else {
                        predicates
                    };
                    fetch_labels_from_endpoint(&url, &classes, &predicates)?
                }
                (None, None) => return Err(CliError::Usage("give --reference or --endpoint".into())),
            };
            index.save(&out)?;
            log::info!("indexed {} labels into {}", index.len(), out.display());
        }
        Command::Ground {
            input,
            index,
            classes,
            mode,
            tau,
            out,
        } => {
            let index = LabelIndex::load(&index)?;
            let classes: BTreeSet<Iri> = iris(&classes)?.into_iter().collect();
            let mode: Mode = mode.parse()?;
            let options = GroundOptions {
                tau,
                ..GroundOptions::default()
            };
            if input.is_dir() {
                let results = ground_directory(&input, &out, &index, &classes, mode, &options)?;
                log::info!("grounded {} files", results.len());
            } else {
                let (grounded, map) = ground_graph(&load_graph(&input)?, &index, &classes, mode, &options);
                write(&out, &serialize_turtle(&grounded))?;
                write(&out.with_extension("grounding.json"), &map.to_json())?;
                log::info!("grounded {} instances", map.len());
            }
        }
        Command::Project { graph, schema, out } => {
            let schema = RecordSchema::from_json(&read(&schema)?)?;
            let records = project_records(&load_graph(&graph)?, &schema)?;
            let text = records_to_json(&records);
            match out {
                Some(p) => write(&p, &text)?,
                None => print!("{text}"),
            }
        }
        Command::Evaluate {
            pred,
            gold,
            schema,
            out,
        } => {
            let schema = RecordSchema::from_json(&read(&schema)?)?;
            let evaluation = eval::evaluate_dirs(&pred, &gold, &schema)?;
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir).map_err(|e| CliError::Io {
                        path: dir.clone(),
                        message: e.to_string(),
                    })?;
                    write(&dir.join("metrics.json"), &evaluation.to_json())?;
                    write(&dir.join("scores.csv"), &evaluation.to_csv())?;
                }
                None => print!("{}", evaluation.to_json()),
            }
        }
        Command::Aggregate { counts } => {
            let mut reader = csv::Reader::from_path(&counts).map_err(|e| CliError::Io {
                path: counts.clone(),
                message: e.to_string(),
            })?;
            let mut per_category = BTreeMap::new();
            for row in reader.records() {
                let row = row.map_err(|e| CliError::Io {
                    path: counts.clone(),
                    message: e.to_string(),
                })?;
                let num = |i: usize| -> Result<u64, CliError> {
                    row.get(i)
                        .and_then(|v| v.trim().parse().ok())
                        .ok_or_else(|| CliError::Usage(format!("bad count in row {row:?}")))
                };
                let category = row.get(0).unwrap_or_default().to_string();
                per_category.insert(category, Counts::new(num(1)?, num(2)?, num(3)?));
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&category_summary(&per_category)).expect("summary serializes")
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ONTOFORGE_LOG", "warn"))
        .target(env_logger::Target::Stderr)
        .init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
