//! The incremental-N Ramsey algorithm: start strictly below R(m,n), run one
//! adiabatic evolution per N, and stop at the first N whose measured (or
//! certified) ground energy is positive.

use crate::cost::{
    build_cost_table_capped, ground_state_capped, known_ramsey, lower_bound, RamseyInstance,
    DEFAULT_QUBIT_CAP,
};
use crate::error::{Error, Result};
use crate::evolution::{
    default_runtime, default_steps, evolve, measure_sample, EvolutionConfig, Integrator,
};
use crate::graph::edge_slots;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// How the per-N energy decision is made.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecisionMode {
    /// Decide from the oracle's exact ground energy.
    Exact,
    /// Decide from the minimum of k measurement samples.
    Sample,
}

impl FromStr for DecisionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(DecisionMode::Exact),
            "sample" => Ok(DecisionMode::Sample),
            other => Err(Error::invalid(
                "mode",
                format!("{other:?} is not exact or sample"),
            )),
        }
    }
}

impl fmt::Display for DecisionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecisionMode::Exact => "exact",
            DecisionMode::Sample => "sample",
        })
    }
}

/// Outcome of one N: continue the sweep or stop at the threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Decision {
    Continue,
    Threshold,
}

/// One AQE run inside a sweep.
#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub m: usize,
    pub n: usize,
    #[serde(rename = "N")]
    pub n_vertices: usize,
    #[serde(rename = "L")]
    pub l_qubits: usize,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub steps: usize,
    pub integrator: Integrator,
    pub e_gs: u32,
    pub degeneracy: u64,
    pub p_success: f64,
    pub decision: Decision,
    /// Sampled energies (sample mode only); the minimum is the decision value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_min: Option<u32>,
    /// Set when the sampled minimum disagrees with the oracle energy.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_mismatch: Option<bool>,
}

/// Fixed CSV column order for run records.
pub const RUN_RECORD_CSV_HEADER: &str =
    "m,n,N,L,T,steps,integrator,e_gs,degeneracy,p_success,decision";

impl RunRecord {
    pub fn csv_row(&self) -> String {
        let decision = match self.decision {
            Decision::Continue => "CONTINUE",
            Decision::Threshold => "THRESHOLD",
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.m,
            self.n,
            self.n_vertices,
            self.l_qubits,
            self.t_final,
            self.steps,
            self.integrator,
            self.e_gs,
            self.degeneracy,
            self.p_success,
            decision
        )
    }
}

/// A completed sweep: records in increasing N, the last one at threshold.
#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub m: usize,
    pub n: usize,
    pub mode: DecisionMode,
    pub records: Vec<RunRecord>,
    pub ramsey_number: usize,
}

/// Sweep configuration; `None` fields fall back to the per-N defaults
/// (T = 5 up to 15 qubits else 8, steps = 1000 T).
#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    pub t_override: Option<f64>,
    pub steps_override: Option<usize>,
    pub integrator: Integrator,
    pub mode: DecisionMode,
    pub seed: u64,
    /// Per-run failure probability for the repeat bound; `None` uses
    /// 1 - p_success from the exact projection of the current run.
    pub epsilon: Option<f64>,
    pub delta: f64,
    pub start_n: Option<usize>,
    pub qubit_cap: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            t_override: None,
            steps_override: None,
            integrator: Integrator::Rk4,
            mode: DecisionMode::Exact,
            seed: 0,
            epsilon: None,
            delta: 0.999,
            start_n: None,
            qubit_cap: DEFAULT_QUBIT_CAP,
        }
    }
}

/// Number of repetitions so that, with probability at least `delta`, one of
/// the runs measures the true ground energy when each run fails with
/// probability `epsilon`: ceil(ln(1 - delta) / ln(epsilon)), at least 1.
pub fn k_repeats(epsilon: f64, delta: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 0.999) {
        return Err(Error::invalid(
            "epsilon",
            format!("{epsilon} outside (0, 0.999)"),
        ));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("delta", format!("{delta} outside (0, 1)")));
    }
    // The offset absorbs roundoff when the ratio lands on an integer,
    // e.g. (0.1, 0.9) where 1 - delta is not exactly representable.
    let k = ((1.0 - delta).ln() / epsilon.ln() - 1e-9).ceil();
    Ok((k as usize).max(1))
}

/// Runs the incremental-N loop from a strict lower bound until the first
/// positive energy, returning every per-N record.
pub fn find_ramsey(m: usize, n: usize, opts: &SweepOptions) -> Result<SweepReport> {
    RamseyInstance::new(m, n, 2)?; // validates m, n
    if let Some(eps) = opts.epsilon {
        k_repeats(eps, opts.delta)?; // validate up front
    }
    let start = match opts.start_n {
        Some(s) => {
            if s < 1 {
                return Err(Error::invalid("start-N", "must be at least 1"));
            }
            if let Some(r) = known_ramsey(m, n) {
                if s >= r {
                    return Err(Error::invalid(
                        "start-N",
                        format!("{s} is not strictly below R({m},{n}) = {r}"),
                    ));
                }
            }
            s
        }
        None => lower_bound(m, n),
    };

    let mut records = Vec::new();
    for cand in start.. {
        let l = edge_slots(cand);
        if l > opts.qubit_cap {
            return Err(Error::CapExceeded {
                l,
                cap: opts.qubit_cap,
            });
        }
        let inst = RamseyInstance::new(m, n, cand)?;
        let table = build_cost_table_capped(&inst, opts.qubit_cap)?;
        let oracle = ground_state_capped(&table, 0);
        let t_final = opts.t_override.unwrap_or_else(|| default_runtime(l));
        let cfg = EvolutionConfig {
            t_final,
            n_steps: opts
                .steps_override
                .unwrap_or_else(|| default_steps(t_final)),
            integrator: opts.integrator,
            renorm_check: 1e-6,
            trace_every: None,
        };
        let run = evolve(&table, &cfg)?;

        let (energy, samples, sample_min, sample_mismatch) = match opts.mode {
            DecisionMode::Exact => (oracle.e_gs, None, None, None),
            DecisionMode::Sample => {
                let eps = opts
                    .epsilon
                    .unwrap_or(1.0 - run.p_success)
                    .clamp(1e-9, 0.998);
                let k = k_repeats(eps, opts.delta)?;
                let draws = measure_sample(
                    &run.final_state,
                    &table,
                    opts.seed.wrapping_add(cand as u64),
                    k,
                )?;
                let e_min = *draws.iter().min().expect("k >= 1");
                let mismatch = e_min != oracle.e_gs;
                (e_min, Some(draws), Some(e_min), Some(mismatch))
            }
        };
        let decision = if energy > 0 {
            Decision::Threshold
        } else {
            Decision::Continue
        };
        records.push(RunRecord {
            m,
            n,
            n_vertices: cand,
            l_qubits: l,
            t_final,
            steps: cfg.n_steps,
            integrator: opts.integrator,
            e_gs: oracle.e_gs,
            degeneracy: oracle.degeneracy,
            p_success: run.p_success,
            decision,
            samples,
            sample_min,
            sample_mismatch,
        });
        if decision == Decision::Threshold {
            return Ok(SweepReport {
                m,
                n,
                mode: opts.mode,
                records,
                ramsey_number: cand,
            });
        }
    }
    unreachable!("loop either returns or errors at the cap")
}

/// One reference row of the embedded simulation results.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Table1Row {
    pub m: usize,
    pub n: usize,
    #[serde(rename = "N")]
    pub n_vertices: usize,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub e_gs: u32,
    pub degeneracy: u64,
    pub p_success: f64,
}

/// Embedded reference results: ground energy, degeneracy, runtime, and
/// success probability for the R(2,5), R(2,6), R(3,3), R(2,7) families.
pub const TABLE1: [Table1Row; 12] = [
    Table1Row {
        m: 2,
        n: 5,
        n_vertices: 3,
        t_final: 5.0,
        e_gs: 0,
        degeneracy: 1,
        p_success: 0.591,
    },
    Table1Row {
        m: 2,
        n: 5,
        n_vertices: 4,
        t_final: 5.0,
        e_gs: 0,
        degeneracy: 1,
        p_success: 0.349,
    },
    Table1Row {
        m: 2,
        n: 5,
        n_vertices: 5,
        t_final: 5.0,
        e_gs: 1,
        degeneracy: 11,
        p_success: 0.518,
    },
    Table1Row {
        m: 2,
        n: 6,
        n_vertices: 4,
        t_final: 5.0,
        e_gs: 0,
        degeneracy: 1,
        p_success: 0.349,
    },
    Table1Row {
        m: 2,
        n: 6,
        n_vertices: 5,
        t_final: 5.0,
        e_gs: 0,
        degeneracy: 1,
        p_success: 0.173,
    },
    Table1Row {
        m: 2,
        n: 6,
        n_vertices: 6,
        t_final: 5.0,
        e_gs: 1,
        degeneracy: 16,
        p_success: 0.286,
    },
    Table1Row {
        m: 3,
        n: 3,
        n_vertices: 4,
        t_final: 5.0,
        e_gs: 0,
        degeneracy: 18,
        p_success: 0.769,
    },
    Table1Row {
        m: 3,
        n: 3,
        n_vertices: 5,
        t_final: 5.0,
        e_gs: 0,
        degeneracy: 12,
        p_success: 0.194,
    },
    Table1Row {
        m: 3,
        n: 3,
        n_vertices: 6,
        t_final: 5.0,
        e_gs: 2,
        degeneracy: 1760,
        p_success: 0.693,
    },
    Table1Row {
        m: 2,
        n: 7,
        n_vertices: 5,
        t_final: 8.0,
        e_gs: 0,
        degeneracy: 1,
        p_success: 0.865,
    },
    Table1Row {
        m: 2,
        n: 7,
        n_vertices: 6,
        t_final: 8.0,
        e_gs: 0,
        degeneracy: 1,
        p_success: 0.805,
    },
    Table1Row {
        m: 2,
        n: 7,
        n_vertices: 7,
        t_final: 8.0,
        e_gs: 1,
        degeneracy: 22,
        p_success: 0.938,
    },
];

/// Acceptance tolerance on reproduced success probabilities.
pub const TABLE1_PS_TOL: f64 = 0.01;

/// One reproduced row diffed against its reference.
#[derive(Clone, Debug, Serialize)]
pub struct Table1Check {
    pub m: usize,
    pub n: usize,
    #[serde(rename = "N")]
    pub n_vertices: usize,
    #[serde(rename = "L")]
    pub l_qubits: usize,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub steps: usize,
    pub integrator: Integrator,
    pub e_gs_expected: u32,
    pub e_gs: u32,
    pub degeneracy_expected: u64,
    pub degeneracy: u64,
    pub p_success_expected: f64,
    pub p_success: f64,
    pub pass: bool,
}

pub const TABLE1_CSV_HEADER: &str = "m,n,N,L,T,steps,integrator,e_gs_expected,e_gs,\
degeneracy_expected,degeneracy,p_success_expected,p_success,pass";

impl Table1Check {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.m,
            self.n,
            self.n_vertices,
            self.l_qubits,
            self.t_final,
            self.steps,
            self.integrator,
            self.e_gs_expected,
            self.e_gs,
            self.degeneracy_expected,
            self.degeneracy,
            self.p_success_expected,
            self.p_success,
            self.pass
        )
    }
}

/// Re-runs every embedded reference row and diffs energies (exact),
/// degeneracies (exact), and success probabilities (within
/// [`TABLE1_PS_TOL`]).
pub fn run_table1(
    steps_override: Option<usize>,
    integrator: Integrator,
) -> Result<Vec<Table1Check>> {
    let mut out = Vec::with_capacity(TABLE1.len());
    for row in &TABLE1 {
        let inst = RamseyInstance::new(row.m, row.n, row.n_vertices)?;
        let table = build_cost_table_capped(&inst, DEFAULT_QUBIT_CAP)?;
        let cfg = EvolutionConfig {
            t_final: row.t_final,
            n_steps: steps_override.unwrap_or_else(|| default_steps(row.t_final)),
            integrator,
            renorm_check: 1e-6,
            trace_every: None,
        };
        let run = evolve(&table, &cfg)?;
        let pass = run.e_gs == row.e_gs
            && run.degeneracy == row.degeneracy
            && (run.p_success - row.p_success).abs() <= TABLE1_PS_TOL;
        out.push(Table1Check {
            m: row.m,
            n: row.n,
            n_vertices: row.n_vertices,
            l_qubits: inst.qubits(),
            t_final: row.t_final,
            steps: cfg.n_steps,
            integrator,
            e_gs_expected: row.e_gs,
            e_gs: run.e_gs,
            degeneracy_expected: row.degeneracy,
            degeneracy: run.degeneracy,
            p_success_expected: row.p_success,
            p_success: run.p_success,
            pass,
        });
    }
    Ok(out)
}
