//! Time-dependent Schrodinger integration under H(t) = (1 - t/T) H_i + (t/T) H_P
//! from the uniform superposition to t = T, with hbar = 1 and a linear
//! schedule, and the success probability of measuring the ground energy.
//!
//! Two independent integrators are provided and must agree at converged
//! settings: classical RK4 on the matrix-free applicator, and a symmetric
//! (second-order) split-step propagator whose H_i exponential is applied
//! exactly in the Hadamard basis and whose H_P exponential is a diagonal
//! phase.

use crate::cost::{ground_state_capped, CostTable};
use crate::error::{Error, Result};
use crate::hamiltonian::StateVector;
use crate::kernels;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

/// Integration scheme for the Schrodinger dynamics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    Rk4,
    Trotter2,
}

impl fmt::Display for Integrator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Integrator::Rk4 => "rk4",
            Integrator::Trotter2 => "trotter2",
        })
    }
}

impl FromStr for Integrator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rk4" => Ok(Integrator::Rk4),
            "trotter2" => Ok(Integrator::Trotter2),
            other => Err(Error::invalid(
                "integrator",
                format!("{other:?} is not rk4 or trotter2"),
            )),
        }
    }
}

/// Default step count: dt = 0.001, at least one step.
pub fn default_steps(t_final: f64) -> usize {
    ((1000.0 * t_final).ceil() as usize).max(1)
}

/// Default runtime used by the driver: 5.0 up to 15 qubits, 8.0 above.
pub fn default_runtime(l_qubits: usize) -> f64 {
    if l_qubits <= 15 {
        5.0
    } else {
        8.0
    }
}

/// Parameters of one evolution run.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EvolutionConfig {
    /// Total runtime T (dimensionless, hbar = 1).
    pub t_final: f64,
    pub n_steps: usize,
    pub integrator: Integrator,
    /// Allowed |norm - 1| at the end of the run.
    pub renorm_check: f64,
    /// Record a trace point every this many steps.
    #[serde(skip)]
    pub trace_every: Option<usize>,
}

impl EvolutionConfig {
    pub fn new(t_final: f64) -> Self {
        EvolutionConfig {
            t_final,
            n_steps: default_steps(t_final),
            integrator: Integrator::Rk4,
            renorm_check: 1e-6,
            trace_every: None,
        }
    }

    pub fn with_steps(mut self, n_steps: usize) -> Self {
        self.n_steps = n_steps;
        self
    }

    pub fn with_integrator(mut self, integrator: Integrator) -> Self {
        self.integrator = integrator;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.t_final.is_nan() || self.t_final <= 0.0 {
            return Err(Error::invalid("T", "runtime must be positive"));
        }
        if self.n_steps == 0 {
            return Err(Error::invalid("steps", "need at least one step"));
        }
        if self.renorm_check.is_nan() || self.renorm_check <= 0.0 {
            return Err(Error::invalid("renorm_check", "tolerance must be positive"));
        }
        Ok(())
    }
}

/// One sampled point of the P(t) curve.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TracePoint {
    pub t: f64,
    pub s: f64,
    pub overlap_gs: f64,
    pub norm: f64,
}

/// Output of one evolution run.
#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub final_state: StateVector,
    /// Probability that an energy measurement at T yields the ground energy.
    pub p_success: f64,
    /// |norm(psi(T)) - 1|.
    pub norm_drift: f64,
    /// Oracle ground energy of the table.
    pub e_gs: u32,
    /// Oracle ground-space dimension.
    pub degeneracy: u64,
    pub config: EvolutionConfig,
    pub trace: Vec<TracePoint>,
    pub wall_time_s: f64,
}

/// Uniform superposition over all 2^L basis states.
pub fn initial_state(l_qubits: usize) -> StateVector {
    let dim = 1usize << l_qubits;
    vec![Complex64::new(1.0 / (dim as f64).sqrt(), 0.0); dim]
}

/// Integrates from the uniform superposition to t = T.
pub fn evolve(table: &CostTable, cfg: &EvolutionConfig) -> Result<EvolutionResult> {
    evolve_from(table, cfg, initial_state(table.qubits()))
}

/// Integrates from a caller-supplied initial state.
pub fn evolve_from(
    table: &CostTable,
    cfg: &EvolutionConfig,
    mut psi: StateVector,
) -> Result<EvolutionResult> {
    cfg.validate()?;
    if psi.len() != table.len() {
        return Err(Error::LengthMismatch {
            expected: table.len(),
            got: psi.len(),
        });
    }
    let started = Instant::now();
    let oracle = ground_state_capped(table, 0);
    let mut trace = Vec::new();
    let mut record = |psi: &StateVector, step: usize, cfg: &EvolutionConfig| {
        if let Some(every) = cfg.trace_every {
            if step.is_multiple_of(every.max(1)) || step == cfg.n_steps {
                let t = cfg.t_final * step as f64 / cfg.n_steps as f64;
                trace.push(TracePoint {
                    t,
                    s: (t / cfg.t_final).clamp(0.0, 1.0),
                    overlap_gs: kernels::masked_prob(psi, table.values(), oracle.e_gs),
                    norm: kernels::norm_sq(psi).sqrt(),
                });
            }
        }
    };

    record(&psi, 0, cfg);
    match cfg.integrator {
        Integrator::Rk4 => rk4_evolve(table, cfg, &mut psi, &mut record),
        Integrator::Trotter2 => trotter_evolve(table, cfg, &mut psi, &mut record),
    }

    let norm_drift = (kernels::norm_sq(&psi).sqrt() - 1.0).abs();
    if norm_drift > cfg.renorm_check {
        return Err(Error::NormDrift {
            drift: norm_drift,
            tol: cfg.renorm_check,
        });
    }
    let p_success = kernels::masked_prob(&psi, table.values(), oracle.e_gs);
    Ok(EvolutionResult {
        final_state: psi,
        p_success,
        norm_drift,
        e_gs: oracle.e_gs,
        degeneracy: oracle.degeneracy,
        config: *cfg,
        trace,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

/// Classical RK4 on dpsi/dt = -i H(t) psi, H evaluated at substep times.
fn rk4_evolve<R>(table: &CostTable, cfg: &EvolutionConfig, psi: &mut StateVector, record: &mut R)
where
    R: FnMut(&StateVector, usize, &EvolutionConfig),
{
    let dim = psi.len();
    let dt = cfg.t_final / cfg.n_steps as f64;
    let s_at = |t: f64| (t / cfg.t_final).clamp(0.0, 1.0);
    let mut k = vec![Complex64::default(); dim];
    let mut acc = vec![Complex64::default(); dim];
    let mut tmp = vec![Complex64::default(); dim];
    let minus_i = Complex64::new(0.0, -1.0);

    for step in 0..cfg.n_steps {
        let t = dt * step as f64;
        // k1
        kernels::apply_h_into(s_at(t), table.values(), psi, &mut k);
        acc.copy_from_slice(&k);
        kernels::combine_into(&mut tmp, psi, minus_i * (dt / 2.0), &k);
        // k2
        kernels::apply_h_into(s_at(t + dt / 2.0), table.values(), &tmp, &mut k);
        kernels::axpy(&mut acc, Complex64::new(2.0, 0.0), &k);
        kernels::combine_into(&mut tmp, psi, minus_i * (dt / 2.0), &k);
        // k3
        kernels::apply_h_into(s_at(t + dt / 2.0), table.values(), &tmp, &mut k);
        kernels::axpy(&mut acc, Complex64::new(2.0, 0.0), &k);
        kernels::combine_into(&mut tmp, psi, minus_i * dt, &k);
        // k4
        kernels::apply_h_into(s_at(t + dt), table.values(), &tmp, &mut k);
        kernels::axpy(&mut acc, Complex64::new(1.0, 0.0), &k);

        kernels::axpy(psi, minus_i * (dt / 6.0), &acc);
        record(psi, step + 1, cfg);
    }
}

/// Symmetric split-step propagator:
/// exp(-i(1-s)H_i dt/2) exp(-i s H_P dt) exp(-i(1-s)H_i dt/2) per step,
/// with s at the step midpoint. The H_i exponential is exact in the
/// Hadamard basis; adjacent half-exponentials of consecutive steps are
/// merged, which leaves the operator product unchanged (W W = I).
fn trotter_evolve<R>(
    table: &CostTable,
    cfg: &EvolutionConfig,
    psi: &mut StateVector,
    record: &mut R,
) where
    R: FnMut(&StateVector, usize, &EvolutionConfig),
{
    let l = table.qubits();
    let dt = cfg.t_final / cfg.n_steps as f64;
    let s_mid = |step: usize| (((step as f64 + 0.5) * dt) / cfg.t_final).clamp(0.0, 1.0);
    let theta = |step: usize| (1.0 - s_mid(step)) * dt / 2.0;
    let max_h = table.values().iter().copied().max().unwrap_or(0);

    // exp(-i theta H_i) = W diag(exp(-i theta popcount)) W / 2^L; the
    // normalization is folded into the phase table.
    let xphase = |psi: &mut StateVector, th: f64| {
        let scale = 1.0 / (1u64 << l) as f64;
        let lut: Vec<Complex64> = (0..=l)
            .map(|j| Complex64::from_polar(scale, -th * j as f64))
            .collect();
        kernels::fwht_inplace(psi);
        kernels::phase_by_popcount(psi, &lut);
        kernels::fwht_inplace(psi);
    };
    let zphase = |psi: &mut StateVector, step: usize| {
        let th = s_mid(step) * dt;
        let lut: Vec<Complex64> = (0..=max_h)
            .map(|v| Complex64::from_polar(1.0, -th * v as f64))
            .collect();
        kernels::phase_by_table(psi, table.values(), &lut);
    };

    if cfg.trace_every.is_none() {
        // Merged form: one H_i exponential between consecutive H_P phases.
        xphase(psi, theta(0));
        for step in 0..cfg.n_steps {
            zphase(psi, step);
            let th = if step + 1 < cfg.n_steps {
                theta(step) + theta(step + 1)
            } else {
                theta(step)
            };
            xphase(psi, th);
        }
        record(psi, cfg.n_steps, cfg);
    } else {
        // Unmerged form so every step boundary is observable.
        for step in 0..cfg.n_steps {
            xphase(psi, theta(step));
            zphase(psi, step);
            xphase(psi, theta(step));
            record(psi, step + 1, cfg);
        }
    }
}

/// Runs the same evolution at each step count; successive differences in
/// `p_success` expose the integrator's convergence order.
pub fn convergence_study(
    table: &CostTable,
    t_final: f64,
    steps_list: &[usize],
    integrator: Integrator,
) -> Result<Vec<(usize, f64)>> {
    if steps_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("steps_list", "must be strictly ascending"));
    }
    let mut out = Vec::with_capacity(steps_list.len());
    for &n_steps in steps_list {
        let cfg = EvolutionConfig {
            t_final,
            n_steps,
            integrator,
            renorm_check: 1e-6,
            trace_every: None,
        };
        out.push((n_steps, evolve(table, &cfg)?.p_success));
    }
    Ok(out)
}

/// Step-doubling outcome: the first step count whose doubling changes
/// `p_success` by less than `tol`.
#[derive(Clone, Copy, Debug)]
pub struct Convergence {
    pub n_steps: usize,
    pub p_success: f64,
    pub last_delta: f64,
    pub converged: bool,
}

/// Doubles the step count from `start_steps` until `p_success` moves by
/// less than `tol`, or `max_steps` is exceeded (flagged, not an error).
pub fn converge_steps(
    table: &CostTable,
    t_final: f64,
    integrator: Integrator,
    start_steps: usize,
    tol: f64,
    max_steps: usize,
) -> Result<Convergence> {
    let mut n = start_steps.max(1);
    let cfg = EvolutionConfig {
        t_final,
        n_steps: n,
        integrator,
        renorm_check: 1e-6,
        trace_every: None,
    };
    let mut p_prev = evolve(table, &cfg)?.p_success;
    let mut last_delta = f64::INFINITY;
    while n * 2 <= max_steps {
        n *= 2;
        let cfg = EvolutionConfig {
            t_final,
            n_steps: n,
            integrator,
            renorm_check: 1e-6,
            trace_every: None,
        };
        let p = evolve(table, &cfg)?.p_success;
        last_delta = (p - p_prev).abs();
        if last_delta < tol {
            return Ok(Convergence {
                n_steps: n,
                p_success: p,
                last_delta,
                converged: true,
            });
        }
        p_prev = p;
    }
    Ok(Convergence {
        n_steps: n,
        p_success: p_prev,
        last_delta,
        converged: false,
    })
}

/// Draws `k` basis states with probability |psi(x)|^2 and reports the table
/// energy of each; reproducible for a fixed seed.
pub fn measure_sample(
    psi: &[Complex64],
    table: &CostTable,
    seed: u64,
    k: usize,
) -> Result<Vec<u32>> {
    if k == 0 {
        return Err(Error::invalid("k", "need at least one draw"));
    }
    if psi.len() != table.len() {
        return Err(Error::LengthMismatch {
            expected: table.len(),
            got: psi.len(),
        });
    }
    let norm = kernels::norm_sq(psi).sqrt();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized {
            deviation: (norm - 1.0).abs(),
        });
    }
    let mut cumulative = Vec::with_capacity(psi.len());
    let mut acc = 0.0f64;
    for a in psi {
        acc += a.norm_sqr();
        cumulative.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let u: f64 = rng.gen::<f64>() * total;
        let idx = cumulative.partition_point(|&c| c <= u).min(psi.len() - 1);
        out.push(table.values()[idx]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{build_cost_table, ground_state, RamseyInstance};
    use crate::hamiltonian::apply_hi;

    fn table_for(m: usize, n: usize, nv: usize) -> CostTable {
        build_cost_table(&RamseyInstance::new(m, n, nv).unwrap()).unwrap()
    }

    #[test]
    fn initial_state_is_uniform_ground_state() {
        let psi = initial_state(1);
        assert!((psi[0].re - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!((psi[1].re - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        let psi = initial_state(3);
        assert!(psi.iter().all(|a| (a.re - 1.0 / 8f64.sqrt()).abs() < 1e-15));
        // <init|H_i|init> = 0.
        let h = apply_hi(&psi, 3).unwrap();
        let e: Complex64 = psi.iter().zip(&h).map(|(a, b)| a.conj() * b).sum();
        assert!(e.norm() < 1e-14);
    }

    #[test]
    fn zero_time_reproduces_uniform_weight() {
        let table = table_for(3, 3, 4);
        let oracle = ground_state(&table);
        let cfg = EvolutionConfig::new(1e-9);
        assert_eq!(cfg.n_steps, 1);
        for integ in [Integrator::Rk4, Integrator::Trotter2] {
            let res = evolve(&table, &cfg.with_integrator(integ)).unwrap();
            let expect = oracle.degeneracy as f64 / 64.0;
            assert!(
                (res.p_success - expect).abs() < 1e-9,
                "{integ}: {} vs {expect}",
                res.p_success
            );
        }
    }

    #[test]
    fn trotter_merged_matches_plain_splitting() {
        // Reference: naive per-step splitting via the traced (unmerged) path.
        let table = table_for(2, 5, 4);
        let base = EvolutionConfig::new(3.0)
            .with_steps(40)
            .with_integrator(Integrator::Trotter2);
        let merged = evolve(&table, &base).unwrap();
        let mut traced = base;
        traced.trace_every = Some(1);
        let unmerged = evolve(&table, &traced).unwrap();
        for (a, b) in merged.final_state.iter().zip(&unmerged.final_state) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn integrators_agree_on_small_instance() {
        let table = table_for(3, 3, 4);
        let rk4 = evolve(&table, &EvolutionConfig::new(5.0).with_steps(2000)).unwrap();
        let trot = evolve(
            &table,
            &EvolutionConfig::new(5.0)
                .with_steps(4000)
                .with_integrator(Integrator::Trotter2),
        )
        .unwrap();
        assert!(
            (rk4.p_success - trot.p_success).abs() < 1e-3,
            "rk4 {} vs trotter {}",
            rk4.p_success,
            trot.p_success
        );
        assert!(rk4.norm_drift < 1e-6);
        assert!(trot.norm_drift < 1e-9);
    }

    #[test]
    fn adiabatic_limit_unique_ground_state() {
        // (N=3, m=2, n=5): unique ground state (empty graph), L = 3.
        let table = table_for(2, 5, 3);
        let slow = evolve(&table, &EvolutionConfig::new(50.0)).unwrap();
        let fast = evolve(&table, &EvolutionConfig::new(5.0)).unwrap();
        assert!(slow.p_success > 0.99, "T=50 gave {}", slow.p_success);
        assert!(slow.p_success > fast.p_success);
    }

    #[test]
    fn global_phase_does_not_change_p_success() {
        let table = table_for(3, 3, 4);
        let cfg = EvolutionConfig::new(2.0).with_steps(500);
        let base = evolve(&table, &cfg).unwrap();
        let phase = Complex64::from_polar(1.0, 1.234);
        let rotated: StateVector = initial_state(6).iter().map(|a| a * phase).collect();
        let res = evolve_from(&table, &cfg, rotated).unwrap();
        assert!((res.p_success - base.p_success).abs() < 1e-12);
    }

    #[test]
    fn rk4_norm_drift_flagged_at_huge_steps() {
        let table = table_for(3, 3, 4);
        let cfg = EvolutionConfig::new(5.0).with_steps(4);
        match evolve(&table, &cfg) {
            Err(Error::NormDrift { drift, tol }) => {
                assert!(drift > tol);
            }
            other => panic!("expected norm-drift failure, got {other:?}"),
        }
    }

    #[test]
    fn convergence_orders() {
        let table = table_for(3, 3, 4);
        // RK4: halving dt shrinks the p_success increment ~16x.
        let pts = convergence_study(&table, 5.0, &[100, 200, 400, 800], Integrator::Rk4).unwrap();
        let d1 = (pts[1].1 - pts[0].1).abs();
        let d2 = (pts[2].1 - pts[1].1).abs();
        let d3 = (pts[3].1 - pts[2].1).abs();
        let r12 = d1 / d2;
        let r23 = d2 / d3;
        assert!(
            (8.0..40.0).contains(&r12) && (8.0..40.0).contains(&r23),
            "rk4 ratios {r12:.1} {r23:.1} (diffs {d1:e} {d2:e} {d3:e})"
        );
        // Symmetric splitting: ~4x.
        let pts =
            convergence_study(&table, 5.0, &[100, 200, 400, 800], Integrator::Trotter2).unwrap();
        let d1 = (pts[1].1 - pts[0].1).abs();
        let d2 = (pts[2].1 - pts[1].1).abs();
        let d3 = (pts[3].1 - pts[2].1).abs();
        let r12 = d1 / d2;
        let r23 = d2 / d3;
        assert!(
            (2.5..7.0).contains(&r12) && (2.5..7.0).contains(&r23),
            "trotter ratios {r12:.1} {r23:.1} (diffs {d1:e} {d2:e} {d3:e})"
        );
        assert!(convergence_study(&table, 5.0, &[200, 100], Integrator::Rk4).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_exact_on_basis_states() {
        let table = table_for(2, 2, 2);
        // psi = |1>: every draw reports table[1].
        let mut psi = vec![Complex64::default(); 2];
        psi[1] = Complex64::new(1.0, 0.0);
        let draws = measure_sample(&psi, &table, 42, 10).unwrap();
        assert_eq!(draws, vec![table.values()[1]; 10]);

        // Uniform over the all-ones table: every draw is 1.
        let draws = measure_sample(&initial_state(1), &table, 7, 16).unwrap();
        assert!(draws.iter().all(|&e| e == 1));

        let a = measure_sample(&initial_state(1), &table, 123, 64).unwrap();
        let b = measure_sample(&initial_state(1), &table, 123, 64).unwrap();
        assert_eq!(a, b);

        let unnorm = vec![Complex64::new(1.0, 0.0); 2];
        assert!(matches!(
            measure_sample(&unnorm, &table, 1, 1),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn trace_records_overlap_curve() {
        let table = table_for(2, 5, 3);
        let mut cfg = EvolutionConfig::new(5.0).with_steps(100);
        cfg.trace_every = Some(10);
        let res = evolve(&table, &cfg).unwrap();
        assert_eq!(res.trace.len(), 11);
        assert!((res.trace[0].overlap_gs - res.degeneracy as f64 / 8.0).abs() < 1e-12);
        let last = res.trace.last().unwrap();
        assert!((last.overlap_gs - res.p_success).abs() < 1e-12);
        assert!((last.norm - 1.0).abs() < 1e-6);
        assert!((last.t - 5.0).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        let table = table_for(2, 2, 2);
        assert!(evolve(&table, &EvolutionConfig::new(-1.0)).is_err());
        assert!(evolve(&table, &EvolutionConfig::new(1.0).with_steps(0)).is_err());
    }
}
