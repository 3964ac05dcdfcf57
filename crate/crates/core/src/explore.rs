//! In-neighbourhood growth and the breadth-first in-exploration of a head.

use std::collections::{HashMap, HashSet, VecDeque};

use rand::Rng;
use rayon::prelude::*;

use crate::degree::BiDegreeSequence;
use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::seed::{rng_from_seed, SimRng};

/// First level at which the in-neighbourhood of head `f` holds at least `omega`
/// heads, or `None` if it dies out or `t_cap` levels pass first.
pub fn t_omega(g: &Multigraph, f: usize, omega: usize, t_cap: usize) -> Option<usize> {
    let mut seen = vec![0u32; g.m()];
    let mut level = Vec::new();
    let mut next = Vec::new();
    t_omega_with(g, f, omega, t_cap, &mut seen, 1, &mut level, &mut next)
}

#[allow(clippy::too_many_arguments)]
fn t_omega_with(
    g: &Multigraph,
    f: usize,
    omega: usize,
    t_cap: usize,
    seen: &mut [u32],
    stamp: u32,
    level: &mut Vec<u32>,
    next: &mut Vec<u32>,
) -> Option<usize> {
    if omega <= 1 {
        return Some(0);
    }
    level.clear();
    level.push(f as u32);
    seen[f] = stamp;
    for t in 1..=t_cap {
        next.clear();
        for &h in level.iter() {
            let z = g.in_neighbor_of_head(h as usize) as usize;
            for e in g.heads(z) {
                if seen[e] != stamp {
                    seen[e] = stamp;
                    next.push(e as u32);
                }
            }
        }
        if next.len() >= omega {
            return Some(t);
        }
        if next.is_empty() {
            return None;
        }
        std::mem::swap(level, next);
    }
    None
}

/// For every head, whether its in-neighbourhood reaches `omega` heads within `t_cap` levels.
pub fn finite_t_omega(g: &Multigraph, omega: usize, t_cap: usize) -> Vec<bool> {
    const BLOCK: usize = 1024;
    let m = g.m();
    let blocks: Vec<Vec<bool>> = (0..m.div_ceil(BLOCK))
        .into_par_iter()
        .map_init(
            || (vec![0u32; m], Vec::new(), Vec::new(), 0u32),
            |(seen, level, next, stamp), b| {
                (b * BLOCK..((b + 1) * BLOCK).min(m))
                    .map(|f| {
                        *stamp = stamp.wrapping_add(1);
                        if *stamp == 0 {
                            seen.fill(0);
                            *stamp = 1;
                        }
                        t_omega_with(g, f, omega, t_cap, seen, *stamp, level, next).is_some()
                    })
                    .collect()
            },
        )
        .collect();
    blocks.concat()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StopRule {
    /// Stop once every active head sits at this depth.
    pub level: Option<usize>,
    /// Stop at a level boundary holding at least this many active heads.
    pub active_heads: Option<usize>,
    /// Stop after this many pairings.
    pub budget: Option<usize>,
}

impl StopRule {
    pub fn level(l: usize) -> Self {
        StopRule { level: Some(l), ..Default::default() }
    }

    pub fn active_heads(omega: usize) -> Self {
        StopRule { active_heads: Some(omega), ..Default::default() }
    }

    pub fn budget(b: usize) -> Self {
        StopRule { budget: Some(b), ..Default::default() }
    }

    pub fn with_budget(mut self, b: usize) -> Self {
        self.budget = Some(b);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Level,
    ActiveHeads,
    Budget,
    DiedOut,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub head: u32,
    pub parent: Option<u32>,
    pub depth: u32,
    /// Out-degree of the vertex whose tail was matched; `None` while active.
    pub mark: Option<u32>,
    pub collided: bool,
    pub first_child: u32,
    pub child_count: u32,
}

impl TreeNode {
    pub fn is_active(&self) -> bool {
        self.mark.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncompleteTree {
    pub nodes: Vec<TreeNode>,
    /// (head, tail) in the order the pairings were made.
    pub pairings: Vec<(u32, u32)>,
    pub collisions: usize,
    pub vertices_discovered: usize,
    pub stop: StopReason,
}

impl IncompleteTree {
    pub fn budget_exhausted(&self) -> bool {
        self.stop == StopReason::Budget
    }

    /// Edges minus (vertices − 1) of the explored subgraph.
    pub fn excess(&self) -> usize {
        self.pairings.len() + 1 - self.vertices_discovered
    }

    pub fn paired_count(&self) -> usize {
        self.pairings.len()
    }

    pub fn active(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes.iter().filter(|n| n.is_active())
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        let mut sizes = Vec::new();
        for n in &self.nodes {
            let d = n.depth as usize;
            if sizes.len() <= d {
                sizes.resize(d + 1, 0);
            }
            sizes[d] += 1;
        }
        sizes
    }

    /// Whether every node above depth `t` has been paired.
    pub fn explored_to(&self, t: usize) -> bool {
        self.nodes.iter().all(|n| n.depth as usize >= t || !n.is_active())
    }

    /// Σ over depth-t nodes of the product of reciprocal ancestor marks.
    pub fn gamma(&self, t: usize) -> Result<f64> {
        if !self.explored_to(t) {
            return Err(Error::Argument(format!("tree not explored to depth {t}")));
        }
        let mut weight = vec![0.0f64; self.nodes.len()];
        let mut total = 0.0;
        for (i, n) in self.nodes.iter().enumerate() {
            weight[i] = match n.parent {
                None => 1.0,
                Some(p) => weight[p as usize] / self.nodes[p as usize].mark.unwrap() as f64,
            };
            if n.depth as usize == t {
                total += weight[i];
            }
        }
        Ok(total)
    }

    /// (children, mark) of every node above depth `t`, in breadth-first order.
    pub fn shape(&self, t: usize) -> Option<Vec<(u32, u32)>> {
        if !self.explored_to(t) {
            return None;
        }
        Some(
            self.nodes
                .iter()
                .filter(|n| (n.depth as usize) < t)
                .map(|n| (n.child_count, n.mark.unwrap()))
                .collect(),
        )
    }
}

/// Supplies the tail matched to a head during exploration.
pub trait TailSource {
    fn tail_for(&mut self, head: u32) -> u32;
}

/// Reads the matching off an already sampled graph.
pub struct GraphSource<'a>(pub &'a Multigraph);

impl TailSource for GraphSource<'_> {
    fn tail_for(&mut self, head: u32) -> u32 {
        self.0.tail_of_head(head as usize)
    }
}

/// Draws uniform unpaired tails by a partial Fisher-Yates shuffle over a
/// virtual identity array; only displaced positions are stored.
pub struct LazyPairing {
    m: u32,
    consumed: u32,
    displaced: HashMap<u32, u32>,
    rng: SimRng,
    matched: Vec<(u32, u32)>,
}

impl LazyPairing {
    pub fn new(m: usize, rng: SimRng) -> Self {
        LazyPairing { m: m as u32, consumed: 0, displaced: HashMap::new(), rng, matched: Vec::new() }
    }

    fn draw(&mut self) -> u32 {
        let k = self.consumed;
        let j = self.rng.gen_range(k..self.m);
        let at_j = self.displaced.get(&j).copied().unwrap_or(j);
        let at_k = self.displaced.remove(&k).unwrap_or(k);
        if j != k {
            self.displaced.insert(j, at_k);
        }
        self.consumed += 1;
        at_j
    }

    /// Matches the remaining heads in increasing order, continuing the same shuffle.
    pub fn complete(mut self, seq: &BiDegreeSequence) -> Result<Multigraph> {
        let m = self.m as usize;
        let mut tail_to_head = vec![u32::MAX; m];
        let mut head_done = vec![false; m];
        for &(h, t) in &self.matched {
            tail_to_head[t as usize] = h;
            head_done[h as usize] = true;
        }
        for h in 0..m {
            if !head_done[h] {
                let t = self.draw();
                tail_to_head[t as usize] = h as u32;
            }
        }
        Multigraph::from_pairing(seq, tail_to_head)
    }
}

impl TailSource for LazyPairing {
    fn tail_for(&mut self, head: u32) -> u32 {
        let t = self.draw();
        self.matched.push((head, t));
        t
    }
}

/// Half-edge bookkeeping for a degree sequence, shared across explorations.
pub struct Explorer {
    in_deg: Vec<u32>,
    out_deg: Vec<u32>,
    head_offset: Vec<u32>,
    head_vertex: Vec<u32>,
    tail_vertex: Vec<u32>,
}

impl Explorer {
    pub fn new(seq: &BiDegreeSequence) -> Result<Self> {
        if seq.m() > u32::MAX as u64 {
            return Err(Error::Capacity(format!("{} half-edges exceed the index range", seq.m())));
        }
        let in_deg: Vec<u32> = seq.degrees().iter().map(|d| d.0).collect();
        let out_deg: Vec<u32> = seq.degrees().iter().map(|d| d.1).collect();
        let mut head_offset = vec![0u32];
        let mut head_vertex = Vec::with_capacity(seq.m() as usize);
        let mut tail_vertex = Vec::with_capacity(seq.m() as usize);
        for (v, &(i, o)) in seq.degrees().iter().enumerate() {
            head_vertex.extend(std::iter::repeat_n(v as u32, i as usize));
            tail_vertex.extend(std::iter::repeat_n(v as u32, o as usize));
            head_offset.push(head_vertex.len() as u32);
        }
        Ok(Explorer { in_deg, out_deg, head_offset, head_vertex, tail_vertex })
    }

    pub fn m(&self) -> usize {
        self.head_vertex.len()
    }

    /// Breadth-first in-exploration from head `f`, pairing through `source`.
    pub fn explore(&self, f: usize, stop: StopRule, source: &mut impl TailSource) -> Result<IncompleteTree> {
        if f >= self.m() {
            return Err(Error::validation("f", format!("head {f} out of range 0..{}", self.m())));
        }
        let mut nodes = vec![TreeNode {
            head: f as u32,
            parent: None,
            depth: 0,
            mark: None,
            collided: false,
            first_child: 0,
            child_count: 0,
        }];
        let mut discovered = HashSet::new();
        discovered.insert(self.head_vertex[f]);
        let mut queue = VecDeque::from([0u32]);
        let mut pairings = Vec::new();
        let mut collisions = 0;
        let mut level = None;
        let reason = loop {
            let Some(&front) = queue.front() else {
                break StopReason::DiedOut;
            };
            let depth = nodes[front as usize].depth as usize;
            if level != Some(depth) {
                level = Some(depth);
                if stop.active_heads.is_some_and(|w| queue.len() >= w) {
                    break StopReason::ActiveHeads;
                }
                if stop.level.is_some_and(|l| depth >= l) {
                    break StopReason::Level;
                }
            }
            if stop.budget.is_some_and(|b| pairings.len() >= b) {
                break StopReason::Budget;
            }
            queue.pop_front();
            let head = nodes[front as usize].head;
            let tail = source.tail_for(head);
            pairings.push((head, tail));
            let z = self.tail_vertex[tail as usize];
            let node = &mut nodes[front as usize];
            node.mark = Some(self.out_deg[z as usize]);
            if !discovered.insert(z) {
                node.collided = true;
                collisions += 1;
                continue;
            }
            let first = nodes.len() as u32;
            let k = self.in_deg[z as usize];
            let node = &mut nodes[front as usize];
            node.first_child = first;
            node.child_count = k;
            let base = self.head_offset[z as usize];
            for j in 0..k {
                queue.push_back(first + j);
                nodes.push(TreeNode {
                    head: base + j,
                    parent: Some(front),
                    depth: depth as u32 + 1,
                    mark: None,
                    collided: false,
                    first_child: 0,
                    child_count: 0,
                });
            }
        };
        Ok(IncompleteTree { nodes, pairings, collisions, vertices_discovered: discovered.len(), stop: reason })
    }
}

/// Explores from `f` over a lazily built uniform pairing of `seq`.
pub fn explore_in_tree(seq: &BiDegreeSequence, f: usize, stop: StopRule, rng_seed: u64) -> Result<IncompleteTree> {
    let explorer = Explorer::new(seq)?;
    let mut source = LazyPairing::new(explorer.m(), rng_from_seed(rng_seed));
    explorer.explore(f, stop, &mut source)
}

/// As [`explore_in_tree`], then finishes the same pairing into a full graph.
pub fn explore_then_complete(
    seq: &BiDegreeSequence,
    f: usize,
    stop: StopRule,
    rng_seed: u64,
) -> Result<(IncompleteTree, Multigraph)> {
    let explorer = Explorer::new(seq)?;
    let mut source = LazyPairing::new(explorer.m(), rng_from_seed(rng_seed));
    let tree = explorer.explore(f, stop, &mut source)?;
    let g = source.complete(seq)?;
    Ok((tree, g))
}

/// Explores from `f` inside a fixed graph.
pub fn explore_in_graph(g: &Multigraph, f: usize, stop: StopRule) -> Result<IncompleteTree> {
    let explorer = Explorer::new(&g.degree_sequence())?;
    explorer.explore(f, stop, &mut GraphSource(g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dead_in_neighbourhood() {
        // Vertex 0 has no heads; head 0 (on vertex 1) is fed by vertex 0.
        let g = Multigraph::from_edges(2, &[(0, 1), (0, 1), (1, 1)]).unwrap();
        let f = g.tails(0).map(|t| g.head_of_tail(t)).next().unwrap() as usize;
        assert_eq!(t_omega(&g, f, 3, 100), None);
    }

    #[test]
    fn cycle_never_grows() {
        let g = Multigraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert!(finite_t_omega(&g, 2, 50).iter().all(|&b| !b));
        assert_eq!(t_omega(&g, 0, 1, 50), Some(0));
    }

    #[test]
    fn unary_exploration_until_collision() {
        let seq = BiDegreeSequence::new(vec![(1, 1); 30]).unwrap();
        let t = explore_in_tree(&seq, 0, StopRule::level(100), 3).unwrap();
        assert!(t.nodes.iter().all(|n| n.child_count <= 1));
        assert_eq!(t.stop, StopReason::DiedOut);
        assert_eq!(t.collisions, 1);
        assert_eq!(t.excess(), 1);
    }

    #[test]
    fn budget_stop_flags() {
        let seq = BiDegreeSequence::new(vec![(2, 2); 50]).unwrap();
        let t = explore_in_tree(&seq, 0, StopRule::budget(5), 3).unwrap();
        assert!(t.budget_exhausted());
        assert_eq!(t.paired_count(), 5);
    }

    #[test]
    fn lazy_pairing_is_a_permutation() {
        let mut lp = LazyPairing::new(100, rng_from_seed(9));
        let mut seen: Vec<u32> = (0..100).map(|h| lp.tail_for(h)).collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..100).collect::<Vec<_>>());
    }
}
