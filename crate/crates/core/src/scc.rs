//! Strongly connected components (iterative Tarjan) and the attractive component.

use crate::graph::Multigraph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sccs {
    /// Component label per vertex.
    pub comp: Vec<u32>,
    pub count: usize,
}

impl Sccs {
    pub fn members(&self, c: u32) -> Vec<u32> {
        (0..self.comp.len() as u32).filter(|&v| self.comp[v as usize] == c).collect()
    }
}

pub fn sccs(g: &Multigraph) -> Sccs {
    const UNSEEN: u32 = u32::MAX;
    let n = g.n();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack: Vec<u32> = Vec::new();
    // (vertex, position within its out-neighbour slice)
    let mut calls: Vec<(u32, usize)> = Vec::new();
    let mut next_index = 0u32;
    let mut count = 0u32;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        calls.push((root as u32, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root as u32);
        on_stack[root] = true;

        while let Some(top) = calls.last_mut() {
            let v = top.0;
            let nbrs = g.out_neighbors(v as usize);
            if top.1 < nbrs.len() {
                let w = nbrs[top.1] as usize;
                top.1 += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w as u32);
                    on_stack[w] = true;
                    calls.push((w as u32, 0));
                } else if on_stack[w] {
                    low[v as usize] = low[v as usize].min(index[w]);
                }
                continue;
            }
            calls.pop();
            let v = v as usize;
            if let Some(&(parent, _)) = calls.last() {
                low[parent as usize] = low[parent as usize].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().unwrap() as usize;
                    on_stack[w] = false;
                    comp[w] = count;
                    if w == v {
                        break;
                    }
                }
                count += 1;
            }
        }
    }
    Sccs { comp, count: count as usize }
}

/// Label of the unique component with no edges leaving it, if there is exactly one.
pub fn attractive_component(g: &Multigraph, s: &Sccs) -> Option<u32> {
    let mut is_sink = vec![true; s.count];
    for v in 0..g.n() {
        let c = s.comp[v];
        if g.out_neighbors(v).iter().any(|&w| s.comp[w as usize] != c) {
            is_sink[c as usize] = false;
        }
    }
    let mut sinks = is_sink.iter().enumerate().filter(|(_, &b)| b).map(|(c, _)| c as u32);
    match (sinks.next(), sinks.next()) {
        (Some(c), None) => Some(c),
        _ => None,
    }
}

/// Sorted vertex set of the attractive component, if any.
pub fn attractive_scc(g: &Multigraph) -> Option<Vec<u32>> {
    let s = sccs(g);
    attractive_component(g, &s).map(|c| s.members(c))
}
