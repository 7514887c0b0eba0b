//! Command-line interface.
//!
//! Exit codes: 0 success, 1 validation error, 2 resource-cap rejection,
//! 3 reference-diff failure (`table1` only). Errors go to standard error as
//! single-line JSON.

use crate::cost::{build_cost_table, ground_state_capped, RamseyInstance, DEFAULT_QUBIT_CAP};
use crate::driver::{
    find_ramsey, run_table1, Decision, DecisionMode, RunRecord, SweepOptions, SweepReport,
    Table1Check, RUN_RECORD_CSV_HEADER, TABLE1_CSV_HEADER,
};
use crate::error::Error;
use crate::evolution::{default_runtime, default_steps, evolve, EvolutionConfig, Integrator};
use crate::graph::edge_slots;
use crate::hamiltonian::{emit_terms, spectral_gap, GapSample, GAP_QUBIT_CAP};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

pub const SCHEMA: &str = "ramsey-aqc/1";

#[derive(Parser)]
#[command(
    name = "ramsey-aqc",
    version,
    about = "Two-color Ramsey numbers by simulated adiabatic quantum evolution"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum OutputFormat {
    Json,
    Csv,
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s.to_ascii_lowercase().as_str() {
        "json" => Ok(OutputFormat::Json),
        "csv" => Ok(OutputFormat::Csv),
        other => Err(format!("{other:?} is not json or csv")),
    }
}

fn parse_integrator(s: &str) -> Result<Integrator, String> {
    Integrator::from_str(s).map_err(|e| e.to_string())
}

fn parse_mode(s: &str) -> Result<DecisionMode, String> {
    DecisionMode::from_str(s).map_err(|e| e.to_string())
}

#[derive(Args)]
struct InstanceArgs {
    /// Clique order m
    #[arg(long)]
    m: usize,
    /// Independent-set order n
    #[arg(long)]
    n: usize,
    /// Vertex count N
    #[arg(long = "N")]
    n_vertices: usize,
}

#[derive(Args)]
struct OutputArgs {
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, default_value = "json", value_parser = parse_format)]
    format: OutputFormat,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact classical ground-state energy and degeneracy
    Oracle {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Include up to this many minimizing graphs as bit strings
        #[arg(long)]
        witnesses: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// One adiabatic evolution run, printed as a run record
    Evolve {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Runtime T (default: 5 up to 15 qubits, 8 above)
        #[arg(long = "T")]
        t_final: Option<f64>,
        /// Step count (default: 1000 T)
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value = "rk4", value_parser = parse_integrator)]
        integrator: Integrator,
        /// Write a per-step trace CSV (t,s,overlap_gs,norm) here
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Incremental-N sweep determining R(m,n)
    Ramsey {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Runtime T for every N (default: per-N rule)
        #[arg(long = "T")]
        t_final: Option<f64>,
        /// Step count for every N (default: 1000 T)
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value = "rk4", value_parser = parse_integrator)]
        integrator: Integrator,
        /// Decision mode: exact (oracle) or sample (k measurements)
        #[arg(long, default_value = "exact", value_parser = parse_mode)]
        mode: DecisionMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Per-run failure probability for the repeat bound
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 0.999)]
        delta: f64,
        /// Starting N (must stay strictly below R(m,n))
        #[arg(long = "start-N")]
        start_n: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Write the projector-product term list of the problem Hamiltonian
    ExportTerms {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Destination file
        #[arg(long)]
        out: PathBuf,
    },
    /// Two lowest eigenvalues of H(s) on a uniform schedule grid (L <= 15)
    Gap {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Number of schedule samples in [0, 1]
        #[arg(long, default_value_t = 11)]
        samples: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Reproduce all embedded reference rows and diff against them
    Table1 {
        /// Step count for every row (default: 1000 T)
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value = "rk4", value_parser = parse_integrator)]
        integrator: Integrator,
        #[command(flatten)]
        output: OutputArgs,
    },
}

struct Failure {
    kind: &'static str,
    message: String,
    code: i32,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (kind, code) = match &e {
            Error::CapExceeded { .. } | Error::CapBeforeThreshold { .. } => ("resource", 2),
            Error::Io(_) => ("io", 1),
            _ => ("validation", 1),
        };
        Failure {
            kind,
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            kind: "io",
            code: 1,
            message: e.to_string(),
        }
    }
}

/// The cap check runs before instance construction so an oversized `--N`
/// is reported as a resource rejection (exit 2), not a validation error.
fn instance_capped(
    m: usize,
    n: usize,
    n_vertices: usize,
    cap: usize,
) -> Result<RamseyInstance, Error> {
    if n_vertices >= 2 {
        let l = edge_slots(n_vertices);
        if l > cap {
            return Err(Error::CapExceeded { l, cap });
        }
    }
    RamseyInstance::new(m, n, n_vertices)
}

#[derive(Serialize)]
struct Doc<T: Serialize> {
    schema: &'static str,
    #[serde(flatten)]
    body: T,
}

fn json_doc<T: Serialize>(body: T) -> String {
    serde_json::to_string(&Doc {
        schema: SCHEMA,
        body,
    })
    .expect("serializable output")
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, content.as_bytes())?,
        None => println!("{}", content.trim_end()),
    }
    Ok(())
}

/// Runs the CLI on explicit arguments and returns the process exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_thread_pool();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let first_line = e
                .to_string()
                .lines()
                .next()
                .unwrap_or("bad usage")
                .to_string();
            report(&Failure {
                kind: "validation",
                code: 1,
                message: first_line,
            });
            return 1;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            report(&f);
            f.code
        }
    }
}

fn report(f: &Failure) {
    #[derive(Serialize)]
    struct ErrorDoc<'a> {
        schema: &'static str,
        kind: &'a str,
        error: &'a str,
    }
    let line = serde_json::to_string(&ErrorDoc {
        schema: SCHEMA,
        kind: f.kind,
        error: &f.message,
    })
    .expect("serializable error");
    eprintln!("{line}");
}

fn init_thread_pool() {
    if let Ok(v) = std::env::var("RAMSEY_AQC_THREADS") {
        if let Ok(count) = v.trim().parse::<usize>() {
            if count > 0 {
                // Ignore failure: the global pool may already exist.
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(count)
                    .build_global();
            }
        }
    }
}

fn run(cli: Cli) -> Result<i32, Failure> {
    match cli.cmd {
        Cmd::Oracle {
            inst,
            witnesses,
            output,
        } => {
            let instance = instance_capped(inst.m, inst.n, inst.n_vertices, DEFAULT_QUBIT_CAP)?;
            let table = build_cost_table(&instance)?;
            let oracle = ground_state_capped(&table, witnesses.unwrap_or(0));

            #[derive(Serialize)]
            struct OracleDoc {
                m: usize,
                n: usize,
                #[serde(rename = "N")]
                n_vertices: usize,
                e_gs: u32,
                degeneracy: u64,
                #[serde(skip_serializing_if = "Option::is_none")]
                witnesses: Option<Vec<String>>,
            }
            let doc = OracleDoc {
                m: inst.m,
                n: inst.n,
                n_vertices: inst.n_vertices,
                e_gs: oracle.e_gs,
                degeneracy: oracle.degeneracy,
                witnesses: witnesses
                    .map(|_| oracle.witnesses.iter().map(|w| w.to_string()).collect()),
            };
            let content = match output.format {
                OutputFormat::Json => json_doc(&doc),
                OutputFormat::Csv => format!(
                    "m,n,N,e_gs,degeneracy\n{},{},{},{},{}\n",
                    doc.m, doc.n, doc.n_vertices, doc.e_gs, doc.degeneracy
                ),
            };
            emit(&output.out, &content)?;
            Ok(0)
        }

        Cmd::Evolve {
            inst,
            t_final,
            steps,
            integrator,
            trace,
            output,
        } => {
            let instance = instance_capped(inst.m, inst.n, inst.n_vertices, DEFAULT_QUBIT_CAP)?;
            let table = build_cost_table(&instance)?;
            let t = t_final.unwrap_or_else(|| default_runtime(instance.qubits()));
            let cfg = EvolutionConfig {
                t_final: t,
                n_steps: steps.unwrap_or_else(|| default_steps(t)),
                integrator,
                renorm_check: 1e-6,
                trace_every: trace.as_ref().map(|_| 1),
            };
            let res = evolve(&table, &cfg)?;
            if let Some(path) = trace {
                let mut csv = String::from("t,s,overlap_gs,norm\n");
                for p in &res.trace {
                    csv.push_str(&format!("{},{},{},{}\n", p.t, p.s, p.overlap_gs, p.norm));
                }
                fs::write(path, csv)?;
            }
            let record = RunRecord {
                m: inst.m,
                n: inst.n,
                n_vertices: inst.n_vertices,
                l_qubits: instance.qubits(),
                t_final: t,
                steps: cfg.n_steps,
                integrator,
                e_gs: res.e_gs,
                degeneracy: res.degeneracy,
                p_success: res.p_success,
                decision: if res.e_gs > 0 {
                    Decision::Threshold
                } else {
                    Decision::Continue
                },
                samples: None,
                sample_min: None,
                sample_mismatch: None,
            };

            #[derive(Serialize)]
            struct EvolveDoc<'a> {
                #[serde(flatten)]
                record: &'a RunRecord,
                norm_drift: f64,
                wall_time_s: f64,
            }
            let content = match output.format {
                OutputFormat::Json => json_doc(EvolveDoc {
                    record: &record,
                    norm_drift: res.norm_drift,
                    wall_time_s: res.wall_time_s,
                }),
                OutputFormat::Csv => {
                    format!("{RUN_RECORD_CSV_HEADER}\n{}\n", record.csv_row())
                }
            };
            emit(&output.out, &content)?;
            Ok(0)
        }

        Cmd::Ramsey {
            m,
            n,
            t_final,
            steps,
            integrator,
            mode,
            seed,
            epsilon,
            delta,
            start_n,
            output,
        } => {
            let opts = SweepOptions {
                t_override: t_final,
                steps_override: steps,
                integrator,
                mode,
                seed,
                epsilon,
                delta,
                start_n,
                ..SweepOptions::default()
            };
            let report: SweepReport = find_ramsey(m, n, &opts)?;
            let content = match output.format {
                OutputFormat::Json => json_doc(&report),
                OutputFormat::Csv => {
                    let mut csv = String::from(RUN_RECORD_CSV_HEADER);
                    csv.push('\n');
                    for rec in &report.records {
                        csv.push_str(&rec.csv_row());
                        csv.push('\n');
                    }
                    csv
                }
            };
            emit(&output.out, &content)?;
            Ok(0)
        }

        Cmd::ExportTerms { inst, out } => {
            let instance = RamseyInstance::new(inst.m, inst.n, inst.n_vertices)?;
            let terms = emit_terms(&instance);
            let mut buf = Vec::new();
            terms.export(&mut buf)?;
            fs::write(out, buf)?;
            Ok(0)
        }

        Cmd::Gap {
            inst,
            samples,
            output,
        } => {
            if samples < 2 {
                return Err(Error::invalid("samples", "need at least 2 grid points").into());
            }
            let instance = instance_capped(inst.m, inst.n, inst.n_vertices, GAP_QUBIT_CAP)?;
            let grid: Vec<f64> = (0..samples)
                .map(|i| i as f64 / (samples - 1) as f64)
                .collect();
            let gaps = spectral_gap(&instance, &grid)?;
            let min_gap = gaps
                .iter()
                .map(GapSample::gap)
                .fold(f64::INFINITY, f64::min);

            #[derive(Serialize)]
            struct GapDoc {
                m: usize,
                n: usize,
                #[serde(rename = "N")]
                n_vertices: usize,
                #[serde(rename = "L")]
                l_qubits: usize,
                samples: Vec<GapSample>,
                min_gap: f64,
            }
            let content = match output.format {
                OutputFormat::Json => json_doc(GapDoc {
                    m: inst.m,
                    n: inst.n,
                    n_vertices: inst.n_vertices,
                    l_qubits: instance.qubits(),
                    samples: gaps,
                    min_gap,
                }),
                OutputFormat::Csv => {
                    let mut csv = String::from("s,e0,e1\n");
                    for g in &gaps {
                        csv.push_str(&format!("{},{},{}\n", g.s, g.e0, g.e1));
                    }
                    csv
                }
            };
            emit(&output.out, &content)?;
            Ok(0)
        }

        Cmd::Table1 {
            steps,
            integrator,
            output,
        } => {
            let checks: Vec<Table1Check> = run_table1(steps, integrator)?;
            let all_pass = checks.iter().all(|c| c.pass);

            #[derive(Serialize)]
            struct Table1Doc {
                integrator: Integrator,
                all_pass: bool,
                rows: Vec<Table1Check>,
            }
            let content = match output.format {
                OutputFormat::Json => json_doc(Table1Doc {
                    integrator,
                    all_pass,
                    rows: checks,
                }),
                OutputFormat::Csv => {
                    let mut csv = String::from(TABLE1_CSV_HEADER);
                    csv.push('\n');
                    for c in &checks {
                        csv.push_str(&c.csv_row());
                        csv.push('\n');
                    }
                    csv
                }
            };
            emit(&output.out, &content)?;
            if all_pass {
                Ok(0)
            } else {
                Err(Failure {
                    kind: "acceptance",
                    code: 3,
                    message: "reproduced rows differ from the reference table".into(),
                })
            }
        }
    }
}
