//! Directed multigraphs stored as half-edge arrays.
//!
//! Vertex `v` owns heads `head_offset[v]..head_offset[v+1]` and tails
//! `tail_offset[v]..tail_offset[v+1]`; an edge is a tail matched to a head.

use std::fmt::Write as _;
use std::io::Write;
use std::ops::Range;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::degree::BiDegreeSequence;
use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    in_deg: Vec<u32>,
    out_deg: Vec<u32>,
    head_offset: Vec<usize>,
    tail_offset: Vec<usize>,
    head_vertex: Vec<u32>,
    tail_vertex: Vec<u32>,
    tail_to_head: Vec<u32>,
    head_to_tail: Vec<u32>,
    out_target: Vec<u32>,
}

fn offsets(degrees: impl Iterator<Item = u32>) -> Vec<usize> {
    let mut off = vec![0usize];
    let mut acc = 0usize;
    for d in degrees {
        acc += d as usize;
        off.push(acc);
    }
    off
}

fn owners(off: &[usize]) -> Vec<u32> {
    let mut owner = vec![0u32; *off.last().unwrap()];
    for v in 0..off.len() - 1 {
        owner[off[v]..off[v + 1]].fill(v as u32);
    }
    owner
}

impl Multigraph {
    /// Builds a graph from a degree sequence and a perfect matching of tails to heads.
    pub fn from_pairing(seq: &BiDegreeSequence, tail_to_head: Vec<u32>) -> Result<Self> {
        let m = seq.m() as usize;
        if tail_to_head.len() != m {
            return Err(Error::validation("pairing", format!("{} entries for {m} tails", tail_to_head.len())));
        }
        if m > u32::MAX as usize {
            return Err(Error::Capacity(format!("{m} half-edges exceed the index range")));
        }
        let mut head_to_tail = vec![u32::MAX; m];
        for (t, &h) in tail_to_head.iter().enumerate() {
            let slot = head_to_tail
                .get_mut(h as usize)
                .ok_or_else(|| Error::validation("pairing", format!("head {h} out of range")))?;
            if *slot != u32::MAX {
                return Err(Error::validation("pairing", format!("head {h} matched twice")));
            }
            *slot = t as u32;
        }
        let in_deg: Vec<u32> = seq.degrees().iter().map(|d| d.0).collect();
        let out_deg: Vec<u32> = seq.degrees().iter().map(|d| d.1).collect();
        let head_offset = offsets(in_deg.iter().copied());
        let tail_offset = offsets(out_deg.iter().copied());
        let head_vertex = owners(&head_offset);
        let tail_vertex = owners(&tail_offset);
        let out_target = tail_to_head.iter().map(|&h| head_vertex[h as usize]).collect();
        Ok(Multigraph {
            in_deg,
            out_deg,
            head_offset,
            tail_offset,
            head_vertex,
            tail_vertex,
            tail_to_head,
            head_to_tail,
            out_target,
        })
    }

    /// Builds a graph from directed edges; the k-th tail of `src` is matched
    /// to the next free head of `dst` in edge order.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut degrees = vec![(0u32, 0u32); n];
        for &(s, d) in edges {
            if s as usize >= n || d as usize >= n {
                return Err(Error::validation("edges", format!("edge ({s}, {d}) outside 0..{n}")));
            }
            degrees[s as usize].1 += 1;
            degrees[d as usize].0 += 1;
        }
        let seq = BiDegreeSequence::new(degrees)?;
        let head_offset = offsets(seq.degrees().iter().map(|d| d.0));
        let tail_offset = offsets(seq.degrees().iter().map(|d| d.1));
        let mut next_head = head_offset[..n].to_vec();
        let mut next_tail = tail_offset[..n].to_vec();
        let mut tail_to_head = vec![0u32; edges.len()];
        for &(s, d) in edges {
            let t = next_tail[s as usize];
            next_tail[s as usize] += 1;
            tail_to_head[t] = next_head[d as usize] as u32;
            next_head[d as usize] += 1;
        }
        Self::from_pairing(&seq, tail_to_head)
    }

    pub fn n(&self) -> usize {
        self.in_deg.len()
    }

    pub fn m(&self) -> usize {
        self.tail_to_head.len()
    }

    pub fn in_degree(&self, v: usize) -> u32 {
        self.in_deg[v]
    }

    pub fn out_degree(&self, v: usize) -> u32 {
        self.out_deg[v]
    }

    pub fn heads(&self, v: usize) -> Range<usize> {
        self.head_offset[v]..self.head_offset[v + 1]
    }

    pub fn tails(&self, v: usize) -> Range<usize> {
        self.tail_offset[v]..self.tail_offset[v + 1]
    }

    pub fn head_vertex(&self, head: usize) -> u32 {
        self.head_vertex[head]
    }

    pub fn tail_vertex(&self, tail: usize) -> u32 {
        self.tail_vertex[tail]
    }

    pub fn head_of_tail(&self, tail: usize) -> u32 {
        self.tail_to_head[tail]
    }

    pub fn tail_of_head(&self, head: usize) -> u32 {
        self.head_to_tail[head]
    }

    pub fn pairing(&self) -> &[u32] {
        &self.tail_to_head
    }

    /// Out-neighbours of `v`, one entry per tail (so repeated per multiplicity).
    pub fn out_neighbors(&self, v: usize) -> &[u32] {
        &self.out_target[self.tails(v)]
    }

    /// Vertex at the far end of the tail matched to `head`.
    pub fn in_neighbor_of_head(&self, head: usize) -> u32 {
        self.tail_vertex[self.head_to_tail[head] as usize]
    }

    pub fn multiplicity(&self, x: usize, y: usize) -> u32 {
        self.out_neighbors(x).iter().filter(|&&t| t as usize == y).count() as u32
    }

    pub fn degree_sequence(&self) -> BiDegreeSequence {
        BiDegreeSequence::new(self.in_deg.iter().copied().zip(self.out_deg.iter().copied()).collect())
            .expect("graph degrees are balanced")
    }

    /// Aggregated `(src, dst, multiplicity)` triples sorted by `(src, dst)`.
    pub fn edges(&self) -> Vec<(u32, u32, u32)> {
        let mut out = Vec::new();
        let mut buf = Vec::new();
        for v in 0..self.n() {
            buf.clear();
            buf.extend_from_slice(self.out_neighbors(v));
            buf.sort_unstable();
            for chunk in buf.chunk_by(|a, b| a == b) {
                out.push((v as u32, chunk[0], chunk.len() as u32));
            }
        }
        out
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("# n {}\n", self.n());
        for (a, b, k) in self.edges() {
            let _ = writeln!(s, "{a} {b} {k}");
        }
        s
    }

    pub fn write_edge_list(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(self.to_edge_list().as_bytes())?;
        f.flush()?;
        Ok(())
    }

    /// Parses `src dst multiplicity` lines. A `# n N` line fixes the vertex
    /// count; otherwise it is one more than the largest id seen.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut edges = Vec::new();
        let mut max_id = None::<u32>;
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let trimmed = line.trim();
            if let Some(rest) = trimmed.strip_prefix('#') {
                let mut parts = rest.split_whitespace();
                if parts.next() == Some("n") {
                    let v = parts.next().and_then(|x| x.parse().ok()).ok_or(Error::Parse {
                        line: line_no,
                        column: 1,
                        msg: "expected `# n <count>`".into(),
                    })?;
                    n = Some(v);
                }
                continue;
            }
            if trimmed.is_empty() {
                continue;
            }
            let mut fields = [0u32; 3];
            let mut count = 0;
            for tok in trimmed.split_whitespace() {
                let column = line.find(tok).unwrap_or(0) + 1;
                if count == 3 {
                    return Err(Error::Parse { line: line_no, column, msg: "expected three fields".into() });
                }
                fields[count] = tok.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    column,
                    msg: format!("`{tok}` is not a non-negative integer"),
                })?;
                count += 1;
            }
            if count != 3 {
                return Err(Error::Parse { line: line_no, column: 1, msg: "expected three fields".into() });
            }
            let [a, b, k] = fields;
            max_id = max_id.max(Some(a.max(b)));
            edges.extend(std::iter::repeat_n((a, b), k as usize));
        }
        let n = n.unwrap_or(max_id.map_or(0, |x| x as usize + 1));
        Self::from_edges(n, &edges)
    }

    pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_edge_list(&std::fs::read_to_string(path)?)
    }

    /// Exact degree conservation: Σ_y m(x,y) = d⁺ₓ and Σ_x m(x,y) = d⁻_y.
    pub fn check_degrees(&self) -> bool {
        let mut indeg = vec![0u32; self.n()];
        for v in 0..self.n() {
            if self.out_neighbors(v).len() != self.out_deg[v] as usize {
                return false;
            }
            for &y in self.out_neighbors(v) {
                indeg[y as usize] += 1;
            }
        }
        indeg == self.in_deg
    }
}

/// Uniform configuration: Fisher-Yates shuffle of the heads against the
/// canonical tail order.
pub fn sample_dcm(seq: &BiDegreeSequence, rng_seed: u64) -> Result<Multigraph> {
    let mut rng = rng_from_seed(rng_seed);
    let mut heads: Vec<u32> = (0..seq.m() as u32).collect();
    heads.shuffle(&mut rng);
    Multigraph::from_pairing(seq, heads)
}

/// Each vertex picks `r` uniform targets with replacement.
pub fn sample_rout(n: usize, r: u32, rng_seed: u64) -> Result<Multigraph> {
    if r < 2 {
        return Err(Error::validation("r", format!("{r} is below 2")));
    }
    if n == 0 {
        return Err(Error::validation("n", "must be positive"));
    }
    let mut rng = rng_from_seed(rng_seed);
    let mut edges = Vec::with_capacity(n * r as usize);
    for v in 0..n as u32 {
        for _ in 0..r {
            edges.push((v, rng.gen_range(0..n as u32)));
        }
    }
    Multigraph::from_edges(n, &edges)
}
