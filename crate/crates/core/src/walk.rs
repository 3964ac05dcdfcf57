//! Stationary distributions, hitting times and cover times of the simple
//! random walk on a multigraph (uniform choice among tails).

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::scc::attractive_scc;
use crate::seed::{derive_seed, replicate_rng, rng_from_seed};

pub const DIRECT_CHECK_MAX: usize = 2000;
pub const EXACT_HITTING_MAX: usize = 5000;
pub const ALL_PAIRS_MAX: usize = 3000;
pub const DEFAULT_COVER_STARTS: usize = 8;

#[derive(Debug, Clone, Copy)]
pub struct StationaryOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Cross-check against a dense solve when the support is at most this large.
    pub direct_check_max: usize,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        StationaryOptions { tol: 1e-12, max_iter: 1_000_000, direct_check_max: DIRECT_CHECK_MAX }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StationaryResult {
    pub pi: Vec<f64>,
    /// Attractive component, sorted.
    pub support: Vec<u32>,
    pub pi_min: f64,
    pub pi_max: f64,
    /// ‖πP − π‖₁ of the returned vector.
    pub residual: f64,
    pub iterations: usize,
    /// ℓ∞ distance to the dense solve, when it was run.
    pub direct_diff: Option<f64>,
}

impl StationaryResult {
    /// log(1/π_min) / log n.
    pub fn exponent_observed(&self) -> f64 {
        (1.0 / self.pi_min).ln() / (self.pi.len() as f64).ln()
    }
}

pub fn stationary_distribution(g: &Multigraph) -> Result<StationaryResult> {
    stationary_with(g, &StationaryOptions::default())
}

pub fn stationary_with(g: &Multigraph, opts: &StationaryOptions) -> Result<StationaryResult> {
    let support = attractive_scc(g).ok_or_else(|| Error::NonUnique("no attractive strongly connected component".into()))?;
    let k = support.len();
    let mut local = vec![u32::MAX; g.n()];
    for (i, &v) in support.iter().enumerate() {
        local[v as usize] = i as u32;
    }
    let mut offset = Vec::with_capacity(k + 1);
    let mut target = Vec::new();
    offset.push(0usize);
    for &v in &support {
        target.extend(g.out_neighbors(v as usize).iter().map(|&w| local[w as usize]));
        offset.push(target.len());
    }
    let step = |pi: &[f64], out: &mut [f64]| {
        out.fill(0.0);
        for x in 0..k {
            let nbrs = &target[offset[x]..offset[x + 1]];
            let share = pi[x] / nbrs.len() as f64;
            for &y in nbrs {
                out[y as usize] += share;
            }
        }
    };

    let mut pi = vec![1.0 / k as f64; k];
    let mut pushed = vec![0.0; k];
    let mut iterations = 0;
    let residual = loop {
        step(&pi, &mut pushed);
        let r: f64 = pi.iter().zip(&pushed).map(|(a, b)| (a - b).abs()).sum();
        if r < opts.tol {
            break r;
        }
        if iterations >= opts.max_iter {
            return Err(Error::Numerical { msg: format!("power iteration stalled after {iterations} steps"), residual: r });
        }
        let mut total = 0.0;
        for (a, b) in pi.iter_mut().zip(&pushed) {
            *a = 0.5 * (*a + b);
            total += *a;
        }
        pi.iter_mut().for_each(|a| *a /= total);
        iterations += 1;
    };

    let direct_diff = if k <= opts.direct_check_max {
        let direct = direct_solve(k, &offset, &target)?;
        Some(direct.iter().zip(&pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    } else {
        None
    };

    let mut full = vec![0.0; g.n()];
    for (i, &v) in support.iter().enumerate() {
        full[v as usize] = pi[i];
    }
    let pi_min = pi.iter().copied().fold(f64::INFINITY, f64::min);
    let pi_max = pi.iter().copied().fold(0.0, f64::max);
    Ok(StationaryResult { pi: full, support, pi_min, pi_max, residual, iterations, direct_diff })
}

/// Solves πP = π, Σπ = 1 by replacing one balance equation with the normalization.
fn direct_solve(k: usize, offset: &[usize], target: &[u32]) -> Result<Vec<f64>> {
    let mut a = DMatrix::<f64>::zeros(k, k);
    for x in 0..k {
        a[(x, x)] -= 1.0;
        let nbrs = &target[offset[x]..offset[x + 1]];
        let share = 1.0 / nbrs.len() as f64;
        for &y in nbrs {
            a[(y as usize, x)] += share;
        }
    }
    for x in 0..k {
        a[(k - 1, x)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(k);
    b[k - 1] = 1.0;
    let sol = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Numerical { msg: "singular stationary system".into(), residual: f64::NAN })?;
    Ok(sol.iter().copied().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremes {
    pub pi_min: f64,
    pub pi_max: f64,
    pub argmin: u32,
    pub argmax: u32,
}

/// Extremes over the support; ties go to the smallest vertex id.
pub fn extremal_values(res: &StationaryResult) -> Result<Extremes> {
    let first = *res.support.first().ok_or_else(|| Error::NonUnique("empty support".into()))?;
    let mut e = Extremes { pi_min: res.pi[first as usize], pi_max: res.pi[first as usize], argmin: first, argmax: first };
    for &v in &res.support {
        let p = res.pi[v as usize];
        if p < e.pi_min {
            e.pi_min = p;
            e.argmin = v;
        }
        if p > e.pi_max {
            e.pi_max = p;
            e.argmax = v;
        }
    }
    Ok(e)
}

/// (1/n)·#{i : 0 < π(i) ≤ n^{-(1+α)}}.
pub fn empirical_tail(res: &StationaryResult, alpha: f64) -> f64 {
    let n = res.pi.len() as f64;
    let cut = n.powf(-(1.0 + alpha));
    res.pi.iter().filter(|&&p| p > 0.0 && p <= cut).count() as f64 / n
}

#[derive(Debug, Clone, Serialize)]
pub struct HeadStationary {
    /// π^e per head.
    pub pi_e: Vec<f64>,
    /// max_y |Σ_{f∈ℰ⁻(y)} π^e(f) − π(y)|.
    pub max_vertex_error: f64,
    /// Minimum of π^e over heads where it is positive.
    pub pi0_e: f64,
    /// Minimum of π over the support.
    pub pi0: f64,
}

/// π^e(f) = π(z)/d⁺_z, z the vertex whose tail is matched to f.
pub fn head_stationary(g: &Multigraph, res: &StationaryResult) -> HeadStationary {
    let pi_e: Vec<f64> = (0..g.m())
        .map(|f| {
            let z = g.in_neighbor_of_head(f) as usize;
            res.pi[z] / g.out_degree(z) as f64
        })
        .collect();
    let mut max_vertex_error = 0.0f64;
    for y in 0..g.n() {
        let s: f64 = g.heads(y).map(|f| pi_e[f]).sum();
        max_vertex_error = max_vertex_error.max((s - res.pi[y]).abs());
    }
    let pi0_e = pi_e.iter().copied().filter(|&p| p > 0.0).fold(f64::INFINITY, f64::min);
    HeadStationary { pi_e, max_vertex_error, pi0_e, pi0: res.pi_min }
}

fn in_neighbors(g: &Multigraph, y: usize) -> impl Iterator<Item = usize> + '_ {
    g.heads(y).map(move |f| g.in_neighbor_of_head(f) as usize)
}

#[derive(Debug, Clone, Serialize)]
pub struct HittingTimes {
    pub target: u32,
    /// E[τ_x(y)] per start x; +∞ where the target is not hit almost surely.
    pub expected: Vec<f64>,
    /// E[τ⁺_y].
    pub return_time: f64,
}

/// Solves h(y) = 0, h(x) = 1 + Σ_z P(x,z) h(z) on the states that hit `y` almost surely.
pub fn hitting_times_exact(g: &Multigraph, y: usize) -> Result<HittingTimes> {
    let n = g.n();
    if n > EXACT_HITTING_MAX {
        return Err(Error::Capacity(format!("exact hitting times limited to n ≤ {EXACT_HITTING_MAX}")));
    }
    if y >= n {
        return Err(Error::validation("y", format!("vertex {y} out of range")));
    }
    // States that can reach y.
    let mut alive = vec![false; n];
    alive[y] = true;
    let mut stack = vec![y];
    while let Some(v) = stack.pop() {
        for u in in_neighbors(g, v) {
            if !alive[u] {
                alive[u] = true;
                stack.push(u);
            }
        }
    }
    // Drop states with an escape into the complement, until stable.
    loop {
        let mut changed = false;
        for x in 0..n {
            if x != y && alive[x] && (g.out_degree(x) == 0 || g.out_neighbors(x).iter().any(|&w| !alive[w as usize])) {
                alive[x] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let states: Vec<usize> = (0..n).filter(|&x| alive[x] && x != y).collect();
    let mut index = vec![usize::MAX; n];
    for (i, &x) in states.iter().enumerate() {
        index[x] = i;
    }
    let k = states.len();
    let mut h = vec![f64::INFINITY; n];
    h[y] = 0.0;
    if k > 0 {
        let mut a = DMatrix::<f64>::identity(k, k);
        for (i, &x) in states.iter().enumerate() {
            let share = 1.0 / g.out_degree(x) as f64;
            for &w in g.out_neighbors(x) {
                let j = index[w as usize];
                if j != usize::MAX {
                    a[(i, j)] -= share;
                }
            }
        }
        let b = DVector::<f64>::from_element(k, 1.0);
        let sol = a
            .lu()
            .solve(&b)
            .ok_or_else(|| Error::Numerical { msg: "singular hitting system".into(), residual: f64::NAN })?;
        for (i, &x) in states.iter().enumerate() {
            h[x] = sol[i];
        }
    }
    let return_time = if g.out_degree(y) == 0 {
        f64::INFINITY
    } else {
        let nb = g.out_neighbors(y);
        1.0 + nb.iter().map(|&w| h[w as usize]).sum::<f64>() / nb.len() as f64
    };
    Ok(HittingTimes { target: y as u32, expected: h, return_time })
}

#[derive(Debug, Clone, Serialize)]
pub struct HittingMatrix {
    pub n: usize,
    /// Targets: the support of π.
    pub targets: Vec<u32>,
    /// `values[j * n + x]` = E[τ_x(targets[j])].
    pub values: Vec<f64>,
    /// E[τ⁺_y] per target.
    pub return_times: Vec<f64>,
}

impl HittingMatrix {
    pub fn get(&self, x: usize, target_index: usize) -> f64 {
        self.values[target_index * self.n + x]
    }

    /// (t_hit, x, y) maximizing E[τ_x(y)] over x ∈ [n], y in the support.
    pub fn t_hit(&self) -> (f64, u32, u32) {
        let mut best = (0.0, 0u32, self.targets.first().copied().unwrap_or(0));
        for (j, &y) in self.targets.iter().enumerate() {
            for x in 0..self.n {
                let v = self.get(x, j);
                if v > best.0 {
                    best = (v, x as u32, y);
                }
            }
        }
        best
    }
}

/// Expected hitting times of every support vertex from every start.
///
/// One dense inverse of A = I − P + (1/n)𝟙𝟙ᵀ, then each target's system
/// I − P + P e_y e_yᵀ is a rank-two update of A solved by Woodbury.
pub fn hitting_matrix(g: &Multigraph) -> Result<HittingMatrix> {
    let n = g.n();
    if n > ALL_PAIRS_MAX {
        return Err(Error::Capacity(format!("all-pairs hitting times limited to n ≤ {ALL_PAIRS_MAX}")));
    }
    let targets = attractive_scc(g).ok_or_else(|| Error::NonUnique("no attractive strongly connected component".into()))?;
    if (0..n).any(|x| g.out_degree(x) == 0) {
        return Err(Error::Degenerate("a vertex without tails traps the walk".into()));
    }
    let inv_n = 1.0 / n as f64;
    let mut a = DMatrix::<f64>::from_element(n, n, inv_n);
    for x in 0..n {
        a[(x, x)] += 1.0;
        let share = 1.0 / g.out_degree(x) as f64;
        for &w in g.out_neighbors(x) {
            a[(x, w as usize)] -= share;
        }
    }
    let b = a
        .try_inverse()
        .ok_or_else(|| Error::Numerical { msg: "singular fundamental matrix".into(), residual: f64::NAN })?;
    let b_one: Vec<f64> = (0..n).map(|i| b.row(i).sum()).collect();
    let u1: Vec<f64> = b_one.iter().map(|v| -inv_n * v).collect();
    let sum_b_one: f64 = b_one.iter().sum();
    let sum_u1: f64 = u1.iter().sum();

    let mut values = vec![0.0; targets.len() * n];
    let mut return_times = Vec::with_capacity(targets.len());
    let mut w = vec![0.0; n];
    for (j, &y) in targets.iter().enumerate() {
        let y = y as usize;
        // w = A⁻¹ p_y, p_y the y-th column of P.
        w.fill(0.0);
        for f in g.heads(y) {
            let x = g.in_neighbor_of_head(f) as usize;
            let p = 1.0 / g.out_degree(x) as f64;
            for (i, wi) in w.iter_mut().enumerate() {
                *wi += p * b[(i, x)];
            }
        }
        let sum_w: f64 = w.iter().sum();
        // Capacitance matrix I₂ + Vᵀ A⁻¹ U with V = [𝟙, e_y], U = [−𝟙/n, p_y].
        let c = [[1.0 + sum_u1, sum_w], [u1[y], 1.0 + w[y]]];
        let rhs = [sum_b_one, b_one[y]];
        let det = c[0][0] * c[1][1] - c[0][1] * c[1][0];
        if det.abs() < 1e-300 {
            return Err(Error::Numerical { msg: format!("singular update for target {y}"), residual: det });
        }
        let z0 = (c[1][1] * rhs[0] - c[0][1] * rhs[1]) / det;
        let z1 = (c[0][0] * rhs[1] - c[1][0] * rhs[0]) / det;
        let row = &mut values[j * n..(j + 1) * n];
        for x in 0..n {
            row[x] = b_one[x] - u1[x] * z0 - w[x] * z1;
        }
        return_times.push(row[y]);
        row[y] = 0.0;
    }
    Ok(HittingMatrix { n, targets, values, return_times })
}

#[derive(Debug, Clone, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub completed: usize,
    pub censored: usize,
    /// True when censored runs were dropped from the mean.
    pub biased: bool,
    /// Steps per replicate; `None` when censored.
    pub samples: Vec<Option<u64>>,
}

fn summarize(samples: Vec<Option<u64>>, step_cap: u64) -> Result<McEstimate> {
    let done: Vec<f64> = samples.iter().flatten().map(|&s| s as f64).collect();
    let censored = samples.len() - done.len();
    if done.is_empty() {
        return Err(Error::Censored { reps: samples.len(), step_cap });
    }
    let k = done.len() as f64;
    let mean = done.iter().sum::<f64>() / k;
    let var = if done.len() > 1 {
        done.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    Ok(McEstimate { mean, std_err: (var / k).sqrt(), completed: done.len(), censored, biased: censored > 0, samples })
}

/// 100·n^{1.1·e} for a predicted exponent e, else 10⁹.
pub fn default_step_cap(n: usize, predicted_exponent: Option<f64>) -> u64 {
    match predicted_exponent {
        Some(e) => (100.0 * (n as f64).powf(1.1 * e)).min(u64::MAX as f64 / 2.0).ceil() as u64,
        None => 1_000_000_000,
    }
}

#[inline]
fn step<R: Rng>(g: &Multigraph, v: usize, rng: &mut R) -> Option<usize> {
    let nb = g.out_neighbors(v);
    if nb.is_empty() {
        None
    } else {
        Some(nb[rng.gen_range(0..nb.len())] as usize)
    }
}

/// True when every vertex the walk from `x` can visit before `y` still has a path to `y`.
fn hits_surely(g: &Multigraph, x: usize, y: usize) -> bool {
    let n = g.n();
    let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
    for v in 0..n {
        for &w in g.out_neighbors(v) {
            rev[w as usize].push(v as u32);
        }
    }
    let mut reaches_y = vec![false; n];
    reaches_y[y] = true;
    let mut stack = vec![y];
    while let Some(v) = stack.pop() {
        for &u in &rev[v] {
            if !reaches_y[u as usize] {
                reaches_y[u as usize] = true;
                stack.push(u as usize);
            }
        }
    }
    let mut seen = vec![false; n];
    seen[x] = true;
    let mut stack = vec![x];
    while let Some(v) = stack.pop() {
        if !reaches_y[v] {
            return false;
        }
        if v == y {
            continue;
        }
        for &w in g.out_neighbors(v) {
            if !seen[w as usize] {
                seen[w as usize] = true;
                stack.push(w as usize);
            }
        }
    }
    true
}

pub fn hitting_time_mc(g: &Multigraph, x: usize, y: usize, reps: usize, step_cap: u64, rng_seed: u64) -> Result<McEstimate> {
    if x >= g.n() || y >= g.n() {
        return Err(Error::validation("vertex", "start or target out of range"));
    }
    if !hits_surely(g, x, y) {
        return Err(Error::Unreachable { x, y });
    }
    let stream = ((x as u64) << 32) | y as u64;
    let samples: Vec<Option<u64>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replicate_rng(rng_seed, stream, rep as u64);
            let mut v = x;
            let mut steps = 0u64;
            while v != y {
                if steps >= step_cap {
                    return None;
                }
                v = step(g, v, &mut rng)?;
                steps += 1;
            }
            Some(steps)
        })
        .collect();
    summarize(samples, step_cap)
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverEstimate {
    /// Start with the largest estimated cover time.
    pub worst_start: u32,
    pub estimate: McEstimate,
    pub per_start: Vec<(u32, McEstimate)>,
}

/// Cover time of the support, maximized over a seeded sample of starts.
pub fn cover_time_mc(g: &Multigraph, reps: usize, step_cap: u64, rng_seed: u64) -> Result<CoverEstimate> {
    let mut rng = rng_from_seed(derive_seed(rng_seed, u64::MAX, 0));
    let count = DEFAULT_COVER_STARTS.min(g.n());
    let mut starts: Vec<u32> = sample(&mut rng, g.n(), count).into_iter().map(|v| v as u32).collect();
    starts.sort_unstable();
    cover_time_mc_from(g, &starts, reps, step_cap, rng_seed)
}

pub fn cover_time_mc_from(g: &Multigraph, starts: &[u32], reps: usize, step_cap: u64, rng_seed: u64) -> Result<CoverEstimate> {
    let support = attractive_scc(g).ok_or_else(|| Error::NonUnique("no attractive strongly connected component".into()))?;
    if starts.is_empty() {
        return Err(Error::validation("starts", "need at least one start"));
    }
    let mut in_support = vec![false; g.n()];
    for &v in &support {
        in_support[v as usize] = true;
    }
    let mut per_start = Vec::with_capacity(starts.len());
    for &x in starts {
        let samples: Vec<Option<u64>> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let mut rng = replicate_rng(rng_seed, x as u64, rep as u64);
                let mut seen = vec![false; g.n()];
                let mut v = x as usize;
                let mut left = support.len();
                let mut steps = 0u64;
                loop {
                    if in_support[v] && !seen[v] {
                        seen[v] = true;
                        left -= 1;
                    }
                    if left == 0 {
                        return Some(steps);
                    }
                    if steps >= step_cap {
                        return None;
                    }
                    v = step(g, v, &mut rng)?;
                    steps += 1;
                }
            })
            .collect();
        per_start.push((x, summarize(samples, step_cap)?));
    }
    let (worst_start, estimate) = per_start
        .iter()
        .max_by(|a, b| a.1.mean.total_cmp(&b.1.mean))
        .map(|(x, e)| (*x, e.clone()))
        .unwrap();
    Ok(CoverEstimate { worst_start, estimate, per_start })
}

/// H_{n_targets}·t_hit.
pub fn matthews_bound(t_hit: f64, n_targets: usize) -> f64 {
    let h: f64 = (1..=n_targets).map(|k| 1.0 / k as f64).sum();
    h * t_hit
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: u32) -> Multigraph {
        let edges: Vec<(u32, u32)> = (0..n).map(|v| (v, (v + 1) % n)).collect();
        Multigraph::from_edges(n as usize, &edges).unwrap()
    }

    fn two_vertex() -> Multigraph {
        // m(0,1)=2, m(1,0)=1, m(1,1)=1
        Multigraph::from_edges(2, &[(0, 1), (0, 1), (1, 0), (1, 1)]).unwrap()
    }

    #[test]
    fn cycle_uniform() {
        let r = stationary_distribution(&cycle(7)).unwrap();
        for p in &r.pi {
            assert!((p - 1.0 / 7.0).abs() < 1e-12);
        }
        let e = extremal_values(&r).unwrap();
        assert_eq!((e.argmin, e.argmax), (0, 0));
        let h = head_stationary(&cycle(7), &r);
        assert!(h.pi_e.iter().all(|p| (p - 1.0 / 7.0).abs() < 1e-12));
    }

    #[test]
    fn two_vertex_values() {
        let g = two_vertex();
        let r = stationary_distribution(&g).unwrap();
        assert!((r.pi[0] - 1.0 / 3.0).abs() < 1e-12 && (r.pi[1] - 2.0 / 3.0).abs() < 1e-12);
        assert!(r.direct_diff.unwrap() < 1e-12);
        let h = head_stationary(&g, &r);
        // Heads of vertex 1 are fed by vertex 0's tails: π(0)/2 each.
        assert!(h.max_vertex_error < 1e-12);
        assert!((h.pi0_e - 1.0 / 6.0).abs() < 1e-12);

        let to1 = hitting_times_exact(&g, 1).unwrap();
        assert_eq!(to1.expected[0], 1.0);
        assert!((to1.return_time - 1.5).abs() < 1e-12);
        let to0 = hitting_times_exact(&g, 0).unwrap();
        assert!((to0.expected[1] - 2.0).abs() < 1e-12);
        assert!((to0.return_time - 3.0).abs() < 1e-12);
    }

    #[test]
    fn cycle_hitting_is_distance() {
        let g = cycle(6);
        let h = hitting_times_exact(&g, 2).unwrap();
        for x in 0..6 {
            assert!((h.expected[x] - ((2 + 6 - x) % 6) as f64).abs() < 1e-9);
        }
        let all = hitting_matrix(&g).unwrap();
        for j in 0..6 {
            for x in 0..6 {
                assert!((all.get(x, j) - ((j + 6 - x) % 6) as f64).abs() < 1e-9);
            }
            assert!((all.return_times[j] - 6.0).abs() < 1e-9);
        }
        assert!((all.t_hit().0 - 5.0).abs() < 1e-9);
    }

    #[test]
    fn unreachable_is_infinite() {
        let g = Multigraph::from_edges(4, &[(0, 1), (1, 0), (2, 3), (3, 2)]).unwrap();
        let h = hitting_times_exact(&g, 0).unwrap();
        assert_eq!(h.expected[1], 1.0);
        assert!(h.expected[2].is_infinite() && h.expected[3].is_infinite());
        assert!(stationary_distribution(&g).is_err());
    }

    #[test]
    fn cycle_cover_exact() {
        let g = cycle(9);
        let c = cover_time_mc(&g, 5, 1000, 1).unwrap();
        assert!(c.per_start.iter().all(|(_, e)| e.mean == 8.0 && e.std_err == 0.0));
    }

    #[test]
    fn unreachable_target_fails_fast() {
        let g = Multigraph::from_edges(4, &[(0, 1), (1, 0), (2, 3), (3, 2)]).unwrap();
        assert!(matches!(hitting_time_mc(&g, 0, 2, 10, u64::MAX, 1), Err(Error::Unreachable { x: 0, y: 2 })));
        let g = Multigraph::from_edges(4, &[(0, 1), (0, 2), (1, 0), (2, 3), (3, 2)]).unwrap();
        assert!(matches!(hitting_time_mc(&g, 0, 1, 10, u64::MAX, 1), Err(Error::Unreachable { .. })));
        assert!(hitting_time_mc(&g, 2, 3, 10, 100, 1).is_ok());
    }

    #[test]
    fn censoring_reported() {
        let g = Multigraph::from_edges(3, &[(0, 1), (1, 0), (1, 2), (2, 0)]).unwrap();
        assert!(matches!(hitting_time_mc(&g, 0, 2, 10, 0, 1), Err(Error::Censored { reps: 10, .. })));
    }

    #[test]
    fn matthews_arithmetic() {
        assert_eq!(matthews_bound(7.0, 1), 7.0);
        assert!((matthews_bound(12.0, 4) - 25.0).abs() < 1e-12);
    }

    #[test]
    fn empirical_tail_at_zero() {
        let g = two_vertex();
        let r = stationary_distribution(&g).unwrap();
        assert_eq!(empirical_tail(&r, 0.0), 0.5);
    }
}
