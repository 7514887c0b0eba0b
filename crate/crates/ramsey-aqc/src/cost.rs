//! Cost function `h(G)`, full cost tables, and the exact classical oracle.
//!
//! The cost of an N-vertex graph under an `(m, n)` instance is the number of
//! m-cliques plus the number of n-independent sets. The table of all 2^L
//! costs is the diagonal of the problem Hamiltonian; its minimum is zero
//! exactly when N is still below the Ramsey number R(m,n).

use crate::error::{Error, Result};
use crate::graph::{edge_index, edge_slots, GraphBits};
use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

/// Largest register size the in-memory table builder accepts.
pub const DEFAULT_QUBIT_CAP: usize = 24;

/// Witness lists are truncated to this many graphs; degeneracy stays exact.
pub const DEFAULT_WITNESS_CAP: usize = 10_000;

/// Problem instance: find whether some N-vertex graph avoids both an
/// m-clique and an n-independent set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RamseyInstance {
    m: usize,
    n: usize,
    n_vertices: usize,
}

impl RamseyInstance {
    pub fn new(m: usize, n: usize, n_vertices: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid("m", "clique order must be at least 2"));
        }
        if n < 2 {
            return Err(Error::invalid(
                "n",
                "independent-set order must be at least 2",
            ));
        }
        if n_vertices < 1 {
            return Err(Error::invalid("N", "vertex count must be at least 1"));
        }
        if edge_slots(n_vertices) > 64 {
            return Err(Error::invalid("N", "more than 64 edge slots"));
        }
        Ok(RamseyInstance { m, n, n_vertices })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Register size L = N(N-1)/2.
    pub fn qubits(&self) -> usize {
        edge_slots(self.n_vertices)
    }
}

/// All `k`-element vertex subsets of `{1, ..., n}` in lexicographic order.
pub(crate) fn vertex_subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    (1..=n).combinations(k)
}

/// Qubit positions of all vertex pairs inside `subset` (1-based vertices).
pub(crate) fn subset_edge_positions(subset: &[usize], n_vertices: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(subset.len() * (subset.len() - 1) / 2);
    for (a, &vj) in subset.iter().enumerate() {
        for &vi in &subset[a + 1..] {
            let (hi, lo) = if vi > vj { (vi, vj) } else { (vj, vi) };
            out.push(edge_index(hi, lo, n_vertices).expect("subset pair in range") as u32);
        }
    }
    out.sort_unstable();
    out
}

/// Number of m-cliques in `g`: over every m-vertex subset, the product of
/// the edge bits on its internal pairs, summed.
pub fn count_cliques(g: &GraphBits, m: usize) -> u64 {
    let n = g.n_vertices();
    if m > n {
        return 0;
    }
    let bits = g.bits();
    vertex_subsets(n, m)
        .filter(|s| {
            subset_edge_positions(s, n)
                .iter()
                .all(|&p| (bits >> p) & 1 == 1)
        })
        .count() as u64
}

/// Number of n-independent sets in `g`: the same sum with every edge bit
/// complemented.
pub fn count_independent(g: &GraphBits, n_set: usize) -> u64 {
    let n = g.n_vertices();
    if n_set > n {
        return 0;
    }
    let bits = g.bits();
    vertex_subsets(n, n_set)
        .filter(|s| {
            subset_edge_positions(s, n)
                .iter()
                .all(|&p| (bits >> p) & 1 == 0)
        })
        .count() as u64
}

/// Cost h(G) = (number of m-cliques) + (number of n-independent sets).
pub fn cost(g: &GraphBits, inst: &RamseyInstance) -> Result<u32> {
    if g.len() != inst.qubits() {
        return Err(Error::LengthMismatch {
            expected: inst.qubits(),
            got: g.len(),
        });
    }
    Ok((count_cliques(g, inst.m) + count_independent(g, inst.n)) as u32)
}

/// Diagonal of the problem Hamiltonian: `values[basis_index(g)] = h(g)`.
#[derive(Clone, Debug)]
pub struct CostTable {
    inst: RamseyInstance,
    values: Vec<u32>,
}

impl CostTable {
    pub fn instance(&self) -> &RamseyInstance {
        &self.inst
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Register size L.
    pub fn qubits(&self) -> usize {
        self.inst.qubits()
    }
}

/// Precomputed subset bit masks: a clique term fires when all mask bits are
/// set, an independent-set term when all mask bits are clear.
struct SubsetMasks {
    clique: Vec<u64>,
    indep: Vec<u64>,
}

fn subset_masks(inst: &RamseyInstance) -> SubsetMasks {
    let n = inst.n_vertices;
    let to_mask = |s: &Vec<usize>| {
        subset_edge_positions(s, n)
            .iter()
            .fold(0u64, |acc, &p| acc | (1u64 << p))
    };
    SubsetMasks {
        clique: vertex_subsets(n, inst.m).map(|s| to_mask(&s)).collect(),
        indep: vertex_subsets(n, inst.n).map(|s| to_mask(&s)).collect(),
    }
}

/// Builds the full 2^L cost table.
pub fn build_cost_table(inst: &RamseyInstance) -> Result<CostTable> {
    build_cost_table_capped(inst, DEFAULT_QUBIT_CAP)
}

/// [`build_cost_table`] with an explicit qubit cap.
pub fn build_cost_table_capped(inst: &RamseyInstance, cap: usize) -> Result<CostTable> {
    let l = inst.qubits();
    if l > cap {
        return Err(Error::CapExceeded { l, cap });
    }
    let masks = subset_masks(inst);
    let mut values = vec![0u32; 1usize << l];
    values
        .par_chunks_mut(1 << 12)
        .enumerate()
        .for_each(|(chunk_id, chunk)| {
            let base = (chunk_id << 12) as u64;
            for (off, v) in chunk.iter_mut().enumerate() {
                let g = base + off as u64;
                let mut h = 0u32;
                for &cm in &masks.clique {
                    h += u32::from(g & cm == cm);
                }
                for &im in &masks.indep {
                    h += u32::from(g & im == 0);
                }
                *v = h;
            }
        });
    Ok(CostTable {
        inst: *inst,
        values,
    })
}

/// Exact ground-state summary of a cost table or streaming scan.
#[derive(Clone, Debug, Serialize)]
pub struct OracleResult {
    /// Minimal cost over all graphs.
    pub e_gs: u32,
    /// Number of basis states attaining the minimum.
    pub degeneracy: u64,
    /// Minimizing graphs, in basis-index order, truncated to the witness cap.
    #[serde(skip)]
    pub witnesses: Vec<GraphBits>,
}

/// Minimum, multiplicity, and capped witness list of a cost table.
pub fn ground_state(table: &CostTable) -> OracleResult {
    ground_state_capped(table, DEFAULT_WITNESS_CAP)
}

/// [`ground_state`] with an explicit witness cap.
pub fn ground_state_capped(table: &CostTable, witness_cap: usize) -> OracleResult {
    let n = table.inst.n_vertices;
    let parts: Vec<(u32, u64, Vec<usize>)> = table
        .values
        .par_chunks(1 << 14)
        .enumerate()
        .map(|(chunk_id, chunk)| {
            let base = chunk_id << 14;
            let mut min = u32::MAX;
            let mut count = 0u64;
            let mut wit = Vec::new();
            for (off, &v) in chunk.iter().enumerate() {
                if v < min {
                    min = v;
                    count = 1;
                    wit.clear();
                    wit.push(base + off);
                } else if v == min {
                    count += 1;
                    if wit.len() < witness_cap {
                        wit.push(base + off);
                    }
                }
            }
            (min, count, wit)
        })
        .collect();

    let mut min = u32::MAX;
    let mut count = 0u64;
    let mut indices: Vec<usize> = Vec::new();
    for (pmin, pcount, pwit) in parts {
        if pmin < min {
            min = pmin;
            count = pcount;
            indices.clear();
            indices.extend(pwit);
        } else if pmin == min {
            count += pcount;
            indices.extend(pwit);
        }
    }
    indices.truncate(witness_cap);
    OracleResult {
        e_gs: min,
        degeneracy: count,
        witnesses: indices
            .into_iter()
            .map(|i| GraphBits::from_basis_index(i, n).expect("index within register"))
            .collect(),
    }
}

/// Ground-state scan without materializing the table, recomputing each cost
/// from per-subset pair positions. Cross-checks the table path.
pub fn ground_state_streaming(inst: &RamseyInstance, witness_cap: usize) -> Result<OracleResult> {
    let l = inst.qubits();
    if l > DEFAULT_QUBIT_CAP {
        return Err(Error::CapExceeded {
            l,
            cap: DEFAULT_QUBIT_CAP,
        });
    }
    let n = inst.n_vertices;
    let clique_pairs: Vec<Vec<u32>> = vertex_subsets(n, inst.m)
        .map(|s| subset_edge_positions(&s, n))
        .collect();
    let indep_pairs: Vec<Vec<u32>> = vertex_subsets(n, inst.n)
        .map(|s| subset_edge_positions(&s, n))
        .collect();

    let total = 1u64 << l;
    let chunk = 1u64 << 14;
    let n_chunks = total.div_ceil(chunk);
    let parts: Vec<(u32, u64, Vec<u64>)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * chunk;
            let hi = (lo + chunk).min(total);
            let mut min = u32::MAX;
            let mut count = 0u64;
            let mut wit = Vec::new();
            for g in lo..hi {
                let mut h = 0u32;
                for pairs in &clique_pairs {
                    h += u32::from(pairs.iter().all(|&p| (g >> p) & 1 == 1));
                }
                for pairs in &indep_pairs {
                    h += u32::from(pairs.iter().all(|&p| (g >> p) & 1 == 0));
                }
                if h < min {
                    min = h;
                    count = 1;
                    wit.clear();
                    wit.push(g);
                } else if h == min {
                    count += 1;
                    if wit.len() < witness_cap {
                        wit.push(g);
                    }
                }
            }
            (min, count, wit)
        })
        .collect();

    let mut min = u32::MAX;
    let mut count = 0u64;
    let mut indices: Vec<u64> = Vec::new();
    for (pmin, pcount, pwit) in parts {
        if pmin < min {
            min = pmin;
            count = pcount;
            indices.clear();
            indices.extend(pwit);
        } else if pmin == min {
            count += pcount;
            indices.extend(pwit);
        }
    }
    indices.truncate(witness_cap);
    Ok(OracleResult {
        e_gs: min,
        degeneracy: count,
        witnesses: indices
            .into_iter()
            .map(|b| GraphBits::new(n, b).expect("bits within register"))
            .collect(),
    })
}

/// Classical realization of the incremental-N loop: the smallest N at or
/// above `n_start` whose minimum cost is positive.
pub fn classical_ramsey(m: usize, n: usize, n_start: usize) -> Result<usize> {
    let start = n_start.max(1);
    for cand in start.. {
        if edge_slots(cand) > DEFAULT_QUBIT_CAP {
            return Err(Error::CapBeforeThreshold { last_n: cand - 1 });
        }
        let inst = RamseyInstance::new(m, n, cand)?;
        let oracle = ground_state_streaming(&inst, 1)?;
        if oracle.e_gs > 0 {
            return Ok(cand);
        }
    }
    unreachable!("loop either returns or errors at the cap")
}

/// Known two-color Ramsey numbers with both orders at most 5, plus the
/// R(2,s) = s family.
pub fn known_ramsey(m: usize, n: usize) -> Option<usize> {
    let (a, b) = if m <= n { (m, n) } else { (n, m) };
    match (a, b) {
        (2, s) => Some(s),
        (3, 3) => Some(6),
        (3, 4) => Some(9),
        (3, 5) => Some(14),
        (4, 4) => Some(18),
        (4, 5) => Some(25),
        _ => None,
    }
}

/// A strict lower bound for R(m,n): the best of the known-value table minus
/// one, the probabilistic union bound, and the monotonicity floor.
pub fn lower_bound(m: usize, n: usize) -> usize {
    let table = known_ramsey(m, n).map(|r| r - 1).unwrap_or(1);
    let floor = m.max(n) - 1;
    table.max(union_bound(m, n)).max(floor).max(1)
}

/// Largest N with C(N,m) 2^(1-C(m,2)) + C(N,n) 2^(1-C(n,2)) < 1; such an N
/// admits a graph with no m-clique and no n-independent set.
fn union_bound(m: usize, n: usize) -> usize {
    let weight = |k: usize| 2f64.powi(1 - (k * (k - 1) / 2) as i32);
    let mut best = 1usize;
    for cand in 1..=512usize {
        let e = binomial(cand, m) * weight(m) + binomial(cand, n) * weight(n);
        if e < 1.0 {
            best = cand;
        } else {
            break;
        }
    }
    best
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut acc = 1f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{decode, encode, AdjacencyMatrix};
    use proptest::prelude::*;

    fn five_cycle() -> GraphBits {
        GraphBits::from_edge_list(5, "2 1\n3 2\n4 3\n5 4\n5 1\n").unwrap()
    }

    #[test]
    fn clique_counts() {
        assert_eq!(count_cliques(&GraphBits::complete(3), 3), 1);
        assert_eq!(count_cliques(&GraphBits::complete(6), 3), 20);
        assert_eq!(count_cliques(&five_cycle(), 2), 5);
        assert_eq!(count_cliques(&GraphBits::complete(3), 5), 0); // m > N
    }

    #[test]
    fn independent_set_counts() {
        assert_eq!(count_independent(&GraphBits::empty(5), 5), 1);
        assert_eq!(count_independent(&GraphBits::complete(6), 3), 0);
        // Non-edges of the 5-cycle: C(5,2) - 5 = 5.
        assert_eq!(count_independent(&five_cycle(), 2), 5);
    }

    #[test]
    fn cost_examples() {
        let r33 = RamseyInstance::new(3, 3, 5).unwrap();
        assert_eq!(cost(&five_cycle(), &r33).unwrap(), 0);
        let r33_6 = RamseyInstance::new(3, 3, 6).unwrap();
        assert_eq!(cost(&GraphBits::complete(6), &r33_6).unwrap(), 20);
        let r25 = RamseyInstance::new(2, 5, 5).unwrap();
        assert_eq!(cost(&GraphBits::empty(5), &r25).unwrap(), 1);
        // Length mismatch is rejected.
        assert!(cost(&GraphBits::empty(4), &r25).is_err());
    }

    #[test]
    fn table_n2() {
        let inst = RamseyInstance::new(2, 2, 2).unwrap();
        let table = build_cost_table(&inst).unwrap();
        assert_eq!(table.values(), &[1, 1]);
    }

    #[test]
    fn table_n3_r33() {
        let inst = RamseyInstance::new(3, 3, 3).unwrap();
        let table = build_cost_table(&inst).unwrap();
        let ones: Vec<usize> = table
            .values()
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 1)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(ones, vec![0, 7]); // empty graph and K_3
        assert!(table
            .values()
            .iter()
            .enumerate()
            .all(|(i, &v)| v == u32::from(i == 0 || i == 7)));
    }

    #[test]
    fn table_matches_direct_cost() {
        for (m, n, nv) in [(2, 2, 3), (3, 3, 4), (2, 4, 4), (3, 2, 4)] {
            let inst = RamseyInstance::new(m, n, nv).unwrap();
            let table = build_cost_table(&inst).unwrap();
            for idx in 0..table.len() {
                let g = GraphBits::from_basis_index(idx, nv).unwrap();
                assert_eq!(table.values()[idx], cost(&g, &inst).unwrap());
            }
        }
    }

    #[test]
    fn table_cap_is_enforced() {
        let inst = RamseyInstance::new(3, 3, 8).unwrap(); // L = 28
        assert!(matches!(
            build_cost_table(&inst),
            Err(Error::CapExceeded { l: 28, cap: 24 })
        ));
    }

    #[test]
    fn ground_state_small_paper_rows() {
        let t = build_cost_table(&RamseyInstance::new(2, 5, 5).unwrap()).unwrap();
        let o = ground_state(&t);
        assert_eq!((o.e_gs, o.degeneracy), (1, 11));

        let t = build_cost_table(&RamseyInstance::new(3, 3, 4).unwrap()).unwrap();
        let o = ground_state(&t);
        assert_eq!((o.e_gs, o.degeneracy), (0, 18));

        let t = build_cost_table(&RamseyInstance::new(3, 3, 6).unwrap()).unwrap();
        let o = ground_state(&t);
        assert_eq!((o.e_gs, o.degeneracy), (2, 1760));
    }

    #[test]
    fn witnesses_attain_the_minimum() {
        let inst = RamseyInstance::new(3, 3, 5).unwrap();
        let table = build_cost_table(&inst).unwrap();
        let o = ground_state(&table);
        assert_eq!(o.degeneracy, 12); // labeled 5-cycles
        assert_eq!(o.witnesses.len(), 12);
        for w in &o.witnesses {
            assert_eq!(cost(w, &inst).unwrap(), o.e_gs);
        }
        let capped = ground_state_capped(&table, 3);
        assert_eq!(capped.witnesses.len(), 3);
        assert_eq!(capped.degeneracy, 12);
    }

    #[test]
    fn streaming_matches_table_scan() {
        for (m, n, nv) in [(2, 5, 5), (3, 3, 5), (3, 3, 6), (2, 6, 6)] {
            let inst = RamseyInstance::new(m, n, nv).unwrap();
            let table = ground_state(&build_cost_table(&inst).unwrap());
            let stream = ground_state_streaming(&inst, DEFAULT_WITNESS_CAP).unwrap();
            assert_eq!(table.e_gs, stream.e_gs);
            assert_eq!(table.degeneracy, stream.degeneracy);
            assert_eq!(table.witnesses, stream.witnesses);
        }
    }

    #[test]
    fn classical_loop_finds_thresholds() {
        assert_eq!(classical_ramsey(2, 2, 1).unwrap(), 2);
        assert_eq!(classical_ramsey(2, 5, 3).unwrap(), 5);
        assert_eq!(classical_ramsey(3, 3, 4).unwrap(), 6);
    }

    #[test]
    fn classical_loop_cap() {
        // R(3,4) = 9 needs L = 36 > 24: must fail at the cap, not hang.
        assert!(matches!(
            classical_ramsey(3, 4, 8),
            Err(Error::CapBeforeThreshold { .. })
        ));
    }

    #[test]
    fn lower_bounds() {
        assert_eq!(lower_bound(2, 2), 1);
        assert_eq!(lower_bound(2, 5), 4);
        assert_eq!(lower_bound(3, 3), 5);
        assert_eq!(lower_bound(2, 6), 5);
        assert_eq!(lower_bound(2, 7), 6);
        // Beyond the table the union bound and floor still apply.
        let lb = lower_bound(6, 6);
        assert!(lb >= 5);
        // Never at or above a known Ramsey number.
        for (m, n) in [(2, 2), (2, 5), (2, 7), (3, 3), (3, 4), (3, 5), (4, 4)] {
            assert!(lower_bound(m, n) < known_ramsey(m, n).unwrap());
        }
    }

    fn permute(g: &GraphBits, perm: &[usize]) -> GraphBits {
        // perm maps old vertex (1-based) -> new vertex (1-based)
        let n = g.n_vertices();
        let a = decode(g);
        let mut rows = vec![vec![0u8; n]; n];
        for i in 1..=n {
            for j in 1..=n {
                rows[perm[i - 1] - 1][perm[j - 1] - 1] = a.entry(i, j);
            }
        }
        encode(&AdjacencyMatrix::new(rows).unwrap())
    }

    #[test]
    fn complement_symmetry_exhaustive_small() {
        for nv in 2..=4usize {
            for (m, n) in [(2, 2), (2, 3), (3, 3), (3, 4)] {
                let fwd = RamseyInstance::new(m, n, nv).unwrap();
                let rev = RamseyInstance::new(n, m, nv).unwrap();
                for idx in 0..(1usize << edge_slots(nv)) {
                    let g = GraphBits::from_basis_index(idx, nv).unwrap();
                    assert_eq!(
                        cost(&g, &fwd).unwrap(),
                        cost(&g.complement(), &rev).unwrap()
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn complement_symmetry_sampled(
            nv in 5usize..=7,
            m in 2usize..=4,
            n in 2usize..=4,
            raw in any::<u64>(),
        ) {
            let g = GraphBits::new(nv, raw & ((1u64 << edge_slots(nv)) - 1)).unwrap();
            let fwd = RamseyInstance::new(m, n, nv).unwrap();
            let rev = RamseyInstance::new(n, m, nv).unwrap();
            prop_assert_eq!(
                cost(&g, &fwd).unwrap(),
                cost(&g.complement(), &rev).unwrap()
            );
        }

        #[test]
        fn relabeling_invariance(
            nv in 4usize..=7,
            m in 2usize..=4,
            n in 2usize..=4,
            raw in any::<u64>(),
            perm_seed in any::<u64>(),
        ) {
            let g = GraphBits::new(nv, raw & ((1u64 << edge_slots(nv)) - 1)).unwrap();
            // Fisher-Yates from the seed.
            let mut perm: Vec<usize> = (1..=nv).collect();
            let mut state = perm_seed | 1;
            for i in (1..nv).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (state >> 33) as usize % (i + 1);
                perm.swap(i, j);
            }
            let inst = RamseyInstance::new(m, n, nv).unwrap();
            prop_assert_eq!(
                cost(&g, &inst).unwrap(),
                cost(&permute(&g, &perm), &inst).unwrap()
            );
        }

        #[test]
        fn edge_monotonicity(nv in 3usize..=6, raw in any::<u64>(), slot in any::<usize>()) {
            let l = edge_slots(nv);
            let g = GraphBits::new(nv, raw & ((1u64 << l) - 1)).unwrap();
            let pos = slot % l;
            let with_edge = GraphBits::new(nv, g.bits() | (1u64 << pos)).unwrap();
            for k in 2..=nv {
                prop_assert!(count_cliques(&with_edge, k) >= count_cliques(&g, k));
                prop_assert!(count_independent(&with_edge, k) <= count_independent(&g, k));
            }
        }
    }
}
