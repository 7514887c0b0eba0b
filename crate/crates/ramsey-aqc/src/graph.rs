//! Bijective encoding between N-vertex simple graphs, length-L bit strings,
//! and computational-basis indices.
//!
//! A graph on N labeled vertices is identified with the column-wise
//! concatenation of the strict lower triangle of its adjacency matrix:
//! pair (2,1) first, then (3,1), ..., (N,1), (3,2), ..., (N,N-1). Qubit `l`
//! of the register holds bit `l` of the string, and the basis index maps
//! qubit `l` to machine bit `l` (least-significant-bit first), so the index
//! of a graph string is directly usable as an array offset.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Number of edge slots (qubits) for an N-vertex graph.
#[inline]
pub const fn edge_slots(n_vertices: usize) -> usize {
    n_vertices * (n_vertices - 1) / 2
}

/// Inverse of [`edge_slots`]: the vertex count whose slot count is `len`,
/// if `len` is a triangular number for some N >= 2.
pub fn vertices_for_len(len: usize) -> Option<usize> {
    let mut n = 2usize;
    loop {
        let l = edge_slots(n);
        if l == len {
            return Some(n);
        }
        if l > len {
            return None;
        }
        n += 1;
    }
}

/// Position of the qubit carrying the edge bit for vertex pair `(i, j)`,
/// `1 <= j < i <= N`, in column-wise lower-triangle order.
pub fn edge_index(i: usize, j: usize, n_vertices: usize) -> Result<usize> {
    if j < 1 || j >= i || i > n_vertices {
        return Err(Error::InvalidVertexPair {
            i,
            j,
            n: n_vertices,
        });
    }
    // Columns 1..j-1 contribute N-c slots each; within column j the row
    // offset is i-j-1.
    let before: usize = (1..j).map(|c| n_vertices - c).sum();
    Ok(before + (i - j - 1))
}

/// A length-L bit string identifying an N-vertex graph.
///
/// Bit value 1 means the edge is present. Qubit `l` is stored in machine
/// bit `l` of `bits` (LSB first), so [`GraphBits::basis_index`] is the
/// natural array index into cost tables and state vectors.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphBits {
    n_vertices: usize,
    bits: u64,
}

impl GraphBits {
    /// Builds from a raw bit pattern; bits above `edge_slots(n)` must be clear.
    pub fn new(n_vertices: usize, bits: u64) -> Result<Self> {
        if n_vertices < 1 {
            return Err(Error::invalid("n_vertices", "must be at least 1"));
        }
        let l = edge_slots(n_vertices);
        if l > 64 {
            return Err(Error::invalid("n_vertices", "more than 64 edge slots"));
        }
        if l < 64 && (bits >> l) != 0 {
            return Err(Error::invalid("bits", format!("set bits beyond L={l}")));
        }
        Ok(GraphBits { n_vertices, bits })
    }

    /// The empty graph on `n_vertices` vertices.
    pub fn empty(n_vertices: usize) -> Self {
        GraphBits {
            n_vertices,
            bits: 0,
        }
    }

    /// The complete graph on `n_vertices` vertices.
    pub fn complete(n_vertices: usize) -> Self {
        let l = edge_slots(n_vertices);
        GraphBits {
            n_vertices,
            bits: mask(l),
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// String length L = N(N-1)/2.
    pub fn len(&self) -> usize {
        edge_slots(self.n_vertices)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Raw bit pattern (qubit `l` in machine bit `l`).
    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Bit carried by qubit `l`.
    pub fn get(&self, l: usize) -> bool {
        debug_assert!(l < self.len());
        (self.bits >> l) & 1 == 1
    }

    /// Whether vertices `i` and `j` (1-based, distinct) are adjacent.
    pub fn edge(&self, i: usize, j: usize) -> Result<bool> {
        let (hi, lo) = if i > j { (i, j) } else { (j, i) };
        Ok(self.get(edge_index(hi, lo, self.n_vertices)?))
    }

    /// Computational-basis index of this graph string (LSB-first convention).
    pub fn basis_index(&self) -> usize {
        self.bits as usize
    }

    /// Inverse of [`GraphBits::basis_index`] for a register of `n_vertices` graphs.
    pub fn from_basis_index(index: usize, n_vertices: usize) -> Result<Self> {
        GraphBits::new(n_vertices, index as u64)
    }

    /// Graph with every edge flipped.
    pub fn complement(&self) -> Self {
        GraphBits {
            n_vertices: self.n_vertices,
            bits: self.bits ^ mask(self.len()),
        }
    }

    /// Parses edge-list text: one `"i j"` pair per line, 1-based vertices,
    /// blank lines ignored.
    pub fn from_edge_list(n_vertices: usize, text: &str) -> Result<Self> {
        let mut g = GraphBits::empty(n_vertices);
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let (a, b) = match (it.next(), it.next(), it.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => {
                    return Err(Error::BadEdgeLine {
                        line: line.to_string(),
                    })
                }
            };
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|_| Error::BadEdgeLine {
                    line: line.to_string(),
                })
            };
            let (i, j) = (parse(a)?, parse(b)?);
            let (hi, lo) = if i > j { (i, j) } else { (j, i) };
            g.bits |= 1u64 << edge_index(hi, lo, n_vertices)?;
        }
        Ok(g)
    }

    /// Edge-list text in qubit order, one `"i j"` line per edge with `i > j`.
    pub fn to_edge_list(&self) -> String {
        let n = self.n_vertices;
        let mut out = String::new();
        for j in 1..n {
            for i in (j + 1)..=n {
                if self.get(edge_index(i, j, n).expect("pair in range")) {
                    out.push_str(&format!("{i} {j}\n"));
                }
            }
        }
        out
    }
}

impl fmt::Display for GraphBits {
    /// Raw bit-string text in string order: character `l` is qubit `l`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in 0..self.len() {
            f.write_str(if self.get(l) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for GraphBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GraphBits(N={}, {})", self.n_vertices, self)
    }
}

impl FromStr for GraphBits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = vertices_for_len(s.len()).ok_or(Error::NotTriangular { len: s.len() })?;
        let mut bits = 0u64;
        for (l, ch) in s.chars().enumerate() {
            match ch {
                '1' => bits |= 1u64 << l,
                '0' => {}
                ch => return Err(Error::BadBitChar { ch }),
            }
        }
        Ok(GraphBits {
            n_vertices: n,
            bits,
        })
    }
}

#[inline]
fn mask(l: usize) -> u64 {
    if l >= 64 {
        u64::MAX
    } else {
        (1u64 << l) - 1
    }
}

/// Symmetric zero-diagonal adjacency matrix of a simple graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    n_vertices: usize,
    entries: Vec<u8>,
}

impl AdjacencyMatrix {
    /// Validates and wraps a dense 0/1 matrix.
    pub fn new(rows: Vec<Vec<u8>>) -> Result<Self> {
        let n = rows.len();
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            if row[r] != 0 {
                return Err(Error::NonzeroDiagonal { i: r + 1 });
            }
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, &val) in row.iter().enumerate().take(i) {
                if val != rows[j][i] {
                    return Err(Error::Asymmetric { i: i + 1, j: j + 1 });
                }
            }
        }
        let entries = rows.into_iter().flatten().collect();
        Ok(AdjacencyMatrix {
            n_vertices: n,
            entries,
        })
    }

    /// Empty graph on `n_vertices` vertices.
    pub fn empty(n_vertices: usize) -> Self {
        AdjacencyMatrix {
            n_vertices,
            entries: vec![0; n_vertices * n_vertices],
        }
    }

    /// Builds from 1-based edge pairs.
    pub fn from_edges(n_vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut m = AdjacencyMatrix::empty(n_vertices);
        for &(i, j) in edges {
            let (hi, lo) = if i > j { (i, j) } else { (j, i) };
            edge_index(hi, lo, n_vertices)?; // range check
            m.entries[(hi - 1) * n_vertices + (lo - 1)] = 1;
            m.entries[(lo - 1) * n_vertices + (hi - 1)] = 1;
        }
        Ok(m)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Entry a[i][j], 1-based.
    pub fn entry(&self, i: usize, j: usize) -> u8 {
        self.entries[(i - 1) * self.n_vertices + (j - 1)]
    }
}

/// Encodes an adjacency matrix as its graph bit string.
pub fn encode(a: &AdjacencyMatrix) -> GraphBits {
    let n = a.n_vertices();
    let mut bits = 0u64;
    for j in 1..n {
        for i in (j + 1)..=n {
            if a.entry(i, j) != 0 {
                bits |= 1u64 << edge_index(i, j, n).expect("pair in range");
            }
        }
    }
    GraphBits {
        n_vertices: n,
        bits,
    }
}

/// Decodes a graph bit string back to its adjacency matrix.
///
/// The string length must be N(N-1)/2 for some N >= 2; [`GraphBits`]
/// carries that by construction.
pub fn decode(g: &GraphBits) -> AdjacencyMatrix {
    let n = g.n_vertices();
    let mut m = AdjacencyMatrix::empty(n);
    for j in 1..n {
        for i in (j + 1)..=n {
            if g.get(edge_index(i, j, n).expect("pair in range")) {
                m.entries[(i - 1) * n + (j - 1)] = 1;
                m.entries[(j - 1) * n + (i - 1)] = 1;
            }
        }
    }
    m
}
