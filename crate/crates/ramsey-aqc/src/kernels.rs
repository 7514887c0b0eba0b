//! Low-level sweeps over 2^L-element state vectors.
//!
//! Every kernel is elementwise or pair-disjoint, so results are bit-identical
//! for any worker count; sums are reduced over fixed-size chunks in index
//! order. Vectors shorter than [`PAR_THRESHOLD`] are processed sequentially.

use num_complex::Complex64;
use rayon::prelude::*;

pub(crate) const PAR_THRESHOLD: usize = 1 << 16;
const GRAIN: usize = 1 << 14;

pub(crate) trait Scalar:
    Copy
    + Send
    + Sync
    + std::ops::AddAssign
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
{
    fn scale(self, c: f64) -> Self;
}

impl Scalar for f64 {
    #[inline(always)]
    fn scale(self, c: f64) -> f64 {
        self * c
    }
}

impl Scalar for Complex64 {
    #[inline(always)]
    fn scale(self, c: f64) -> Complex64 {
        Complex64::new(self.re * c, self.im * c)
    }
}

/// `out[x] += coef * psi[x ^ (1 << l)]`, one pass per qubit `l`.
pub(crate) fn neighbor_acc<T: Scalar>(psi: &[T], out: &mut [T], coef: f64) {
    debug_assert_eq!(psi.len(), out.len());
    debug_assert!(psi.len().is_power_of_two());
    if coef == 0.0 {
        return;
    }
    let l_qubits = psi.len().trailing_zeros() as usize;
    for l in 0..l_qubits {
        neighbor_pass(psi, out, 1usize << l, coef);
    }
}

fn neighbor_pass<T: Scalar>(psi: &[T], out: &mut [T], half: usize, coef: f64) {
    let block = half * 2;
    if psi.len() < PAR_THRESHOLD {
        for (o, p) in out.chunks_exact_mut(block).zip(psi.chunks_exact(block)) {
            let (olo, ohi) = o.split_at_mut(half);
            for i in 0..half {
                olo[i] += p[half + i].scale(coef);
                ohi[i] += p[i].scale(coef);
            }
        }
    } else if psi.len() / block >= 8 {
        out.par_chunks_mut(block)
            .zip(psi.par_chunks(block))
            .for_each(|(o, p)| {
                let (olo, ohi) = o.split_at_mut(half);
                for i in 0..half {
                    olo[i] += p[half + i].scale(coef);
                    ohi[i] += p[i].scale(coef);
                }
            });
    } else {
        // Few huge blocks: split each block and parallelize inside.
        for (o, p) in out.chunks_exact_mut(block).zip(psi.chunks_exact(block)) {
            let (olo, ohi) = o.split_at_mut(half);
            let (plo, phi) = p.split_at(half);
            olo.par_chunks_mut(GRAIN)
                .zip(phi.par_chunks(GRAIN))
                .for_each(|(oc, pc)| {
                    for i in 0..oc.len() {
                        oc[i] += pc[i].scale(coef);
                    }
                });
            ohi.par_chunks_mut(GRAIN)
                .zip(plo.par_chunks(GRAIN))
                .for_each(|(oc, pc)| {
                    for i in 0..oc.len() {
                        oc[i] += pc[i].scale(coef);
                    }
                });
        }
    }
}

/// `out[x] = (a + b * table[x]) * psi[x]`.
pub(crate) fn diag_combine<T: Scalar>(psi: &[T], out: &mut [T], table: &[u32], a: f64, b: f64) {
    debug_assert_eq!(psi.len(), out.len());
    debug_assert_eq!(psi.len(), table.len());
    let body = |o: &mut [T], p: &[T], t: &[u32]| {
        for i in 0..o.len() {
            o[i] = p[i].scale(a + b * t[i] as f64);
        }
    };
    if psi.len() < PAR_THRESHOLD {
        body(out, psi, table);
    } else {
        out.par_chunks_mut(GRAIN)
            .zip(psi.par_chunks(GRAIN))
            .zip(table.par_chunks(GRAIN))
            .for_each(|((o, p), t)| body(o, p, t));
    }
}

/// Single application of the interpolated Hamiltonian:
/// `out = [(1-s) * H_i + s * H_P] psi` with `H_P = diag(table)`.
pub(crate) fn apply_h_into<T: Scalar>(s: f64, table: &[u32], psi: &[T], out: &mut [T]) {
    let l = psi.len().trailing_zeros() as f64;
    diag_combine(psi, out, table, (1.0 - s) * l / 2.0, s);
    neighbor_acc(psi, out, -(1.0 - s) / 2.0);
}

/// In-place unnormalized Walsh-Hadamard transform (self-inverse up to 2^L).
pub(crate) fn fwht_inplace(psi: &mut [Complex64]) {
    debug_assert!(psi.len().is_power_of_two());
    let l_qubits = psi.len().trailing_zeros() as usize;
    for l in 0..l_qubits {
        fwht_pass(psi, 1usize << l);
    }
}

fn fwht_pass(psi: &mut [Complex64], half: usize) {
    let block = half * 2;
    let butterfly = |lo: &mut [Complex64], hi: &mut [Complex64]| {
        for i in 0..lo.len() {
            let a = lo[i];
            let b = hi[i];
            lo[i] = a + b;
            hi[i] = a - b;
        }
    };
    if psi.len() < PAR_THRESHOLD {
        for chunk in psi.chunks_exact_mut(block) {
            let (lo, hi) = chunk.split_at_mut(half);
            butterfly(lo, hi);
        }
    } else if psi.len() / block >= 8 {
        psi.par_chunks_mut(block).for_each(|chunk| {
            let (lo, hi) = chunk.split_at_mut(half);
            butterfly(lo, hi);
        });
    } else {
        for chunk in psi.chunks_exact_mut(block) {
            let (lo, hi) = chunk.split_at_mut(half);
            lo.par_chunks_mut(GRAIN)
                .zip(hi.par_chunks_mut(GRAIN))
                .for_each(|(lc, hc)| butterfly(lc, hc));
        }
    }
}

/// `psi[x] *= lut[popcount(x)]`.
pub(crate) fn phase_by_popcount(psi: &mut [Complex64], lut: &[Complex64]) {
    let body = |chunk: &mut [Complex64], base: usize| {
        for (i, v) in chunk.iter_mut().enumerate() {
            *v *= lut[(base + i).count_ones() as usize];
        }
    };
    if psi.len() < PAR_THRESHOLD {
        body(psi, 0);
    } else {
        psi.par_chunks_mut(GRAIN)
            .enumerate()
            .for_each(|(c, chunk)| body(chunk, c * GRAIN));
    }
}

/// `psi[x] *= lut[table[x]]`.
pub(crate) fn phase_by_table(psi: &mut [Complex64], table: &[u32], lut: &[Complex64]) {
    debug_assert_eq!(psi.len(), table.len());
    let body = |chunk: &mut [Complex64], t: &[u32]| {
        for (v, &h) in chunk.iter_mut().zip(t) {
            *v *= lut[h as usize];
        }
    };
    if psi.len() < PAR_THRESHOLD {
        body(psi, table);
    } else {
        psi.par_chunks_mut(GRAIN)
            .zip(table.par_chunks(GRAIN))
            .for_each(|(chunk, t)| body(chunk, t));
    }
}

/// `y[x] += a * x_vec[x]`.
pub(crate) fn axpy(y: &mut [Complex64], a: Complex64, x_vec: &[Complex64]) {
    debug_assert_eq!(y.len(), x_vec.len());
    let body = |yc: &mut [Complex64], xc: &[Complex64]| {
        for i in 0..yc.len() {
            yc[i] += a * xc[i];
        }
    };
    if y.len() < PAR_THRESHOLD {
        body(y, x_vec);
    } else {
        y.par_chunks_mut(GRAIN)
            .zip(x_vec.par_chunks(GRAIN))
            .for_each(|(yc, xc)| body(yc, xc));
    }
}

/// `out[x] = base[x] + a * k[x]`.
pub(crate) fn combine_into(
    out: &mut [Complex64],
    base: &[Complex64],
    a: Complex64,
    k: &[Complex64],
) {
    debug_assert_eq!(out.len(), base.len());
    debug_assert_eq!(out.len(), k.len());
    let body = |oc: &mut [Complex64], bc: &[Complex64], kc: &[Complex64]| {
        for i in 0..oc.len() {
            oc[i] = bc[i] + a * kc[i];
        }
    };
    if out.len() < PAR_THRESHOLD {
        body(out, base, k);
    } else {
        out.par_chunks_mut(GRAIN)
            .zip(base.par_chunks(GRAIN))
            .zip(k.par_chunks(GRAIN))
            .for_each(|((oc, bc), kc)| body(oc, bc, kc));
    }
}

/// Deterministic chunked reduction of `f` over fixed index ranges.
fn chunked_sum<F>(len: usize, f: F) -> f64
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    if len < PAR_THRESHOLD {
        return f(0, len);
    }
    let n_chunks = len.div_ceil(GRAIN);
    let partials: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .map(|c| f(c * GRAIN, ((c + 1) * GRAIN).min(len)))
        .collect();
    partials.iter().sum()
}

/// Squared Euclidean norm, reduced deterministically.
pub(crate) fn norm_sq(psi: &[Complex64]) -> f64 {
    chunked_sum(psi.len(), |lo, hi| {
        psi[lo..hi].iter().map(|a| a.norm_sqr()).sum()
    })
}

/// Total probability on basis states whose table entry equals `target`.
pub(crate) fn masked_prob(psi: &[Complex64], table: &[u32], target: u32) -> f64 {
    debug_assert_eq!(psi.len(), table.len());
    chunked_sum(psi.len(), |lo, hi| {
        psi[lo..hi]
            .iter()
            .zip(&table[lo..hi])
            .filter(|(_, &h)| h == target)
            .map(|(a, _)| a.norm_sqr())
            .sum()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn fwht_self_inverse() {
        let mut v: Vec<Complex64> = (0..16).map(|i| Complex64::new(i as f64, -0.5)).collect();
        let orig = v.clone();
        fwht_inplace(&mut v);
        fwht_inplace(&mut v);
        for (a, b) in v.iter().zip(&orig) {
            assert!((a - b * 16.0).norm() < 1e-12);
        }
    }

    #[test]
    fn neighbor_acc_matches_direct() {
        let l = 5usize;
        let dim = 1 << l;
        let psi: Vec<Complex64> = (0..dim)
            .map(|i| Complex64::new((i * 7 % 13) as f64, (i % 5) as f64))
            .collect();
        let mut out = vec![c(0.0); dim];
        neighbor_acc(&psi, &mut out, -0.5);
        for x in 0..dim {
            let mut expect = Complex64::default();
            for q in 0..l {
                expect += psi[x ^ (1 << q)].scale(-0.5);
            }
            assert!((out[x] - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn diag_combine_matches_direct() {
        let table: Vec<u32> = vec![0, 3, 1, 2];
        let psi: Vec<Complex64> = (0..4)
            .map(|i| Complex64::new(1.0 + i as f64, 0.25))
            .collect();
        let mut out = vec![c(0.0); 4];
        diag_combine(&psi, &mut out, &table, 1.5, 0.5);
        for x in 0..4 {
            let expect = psi[x].scale(1.5 + 0.5 * table[x] as f64);
            assert!((out[x] - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn deterministic_norm() {
        let psi: Vec<Complex64> = (0..(1 << 17))
            .map(|i| Complex64::new((i % 911) as f64 * 1e-4, (i % 13) as f64 * 1e-3))
            .collect();
        let a = norm_sq(&psi);
        let b = norm_sq(&psi);
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
