//! Independent oracles shared by the integration tests and the acceptance suite.
//! Nothing here calls the library routine it is used to check.
#![allow(dead_code)]

use dcmwalk::bp::MarkedOffspringLaw;
use dcmwalk::graph::Multigraph;
use dcmwalk::gw::{Generation, MarkedTree};

pub const TOY_H_HAT: f64 = 0.936426;
pub const TOY_NU_HAT: f64 = 0.181095;
pub const TOY_A0: f64 = 1.06671;
pub const TOY_PHI_A0: f64 = 1.65129;
pub const TOY_EXPONENT: f64 = 1.56708;

/// Smallest fixed point of a pgf by plain iteration from 0.
pub fn extinction(pmf: &[f64]) -> f64 {
    let g = |z: f64| pmf.iter().enumerate().map(|(k, p)| p * z.powi(k as i32)).sum::<f64>();
    let mut q = 0.0;
    for _ in 0..100_000 {
        q = g(q);
    }
    q
}

/// Γ_{i,t} per leaf by walking each leaf's parent chain. With `own_mark`, the
/// leaf's own mark is also divided out (the convention the library rejects).
pub fn brute_leaf_weights(tree: &MarkedTree, t: usize, own_mark: bool) -> Vec<f64> {
    let gens = tree.generations();
    let Some(last) = gens.get(t) else { return Vec::new() };
    (0..last.len())
        .map(|i| {
            let mut w = if own_mark { 1.0 / last.zeta[i] as f64 } else { 1.0 };
            let mut idx = i;
            for r in (1..=t).rev() {
                let p = gens[r].parent[idx] as usize;
                w /= gens[r - 1].zeta[p] as f64;
                idx = p;
            }
            w
        })
        .collect()
}

pub fn brute_gamma(tree: &MarkedTree, t: usize, own_mark: bool) -> f64 {
    brute_leaf_weights(tree, t, own_mark).iter().sum()
}

/// E[ξ/ζ] straight from the atoms.
pub fn mean_ratio(eta: &MarkedOffspringLaw) -> f64 {
    eta.atoms().iter().map(|a| a.p * a.xi as f64 / a.zeta as f64).sum()
}

/// All ways to redraw the (ξ, ζ) of the last generation of `prefix`, each with
/// its probability and the tree extended by the implied children. Children
/// carry placeholder values (0, 1).
pub fn extensions(eta: &MarkedOffspringLaw, prefix: &MarkedTree) -> Vec<(f64, MarkedTree)> {
    let gens = prefix.generations().to_vec();
    let width = gens.last().unwrap().len();
    let atoms = eta.atoms();
    let mut out = Vec::new();
    let mut digits = vec![0usize; width];
    loop {
        let mut g = gens.clone();
        let last = g.last_mut().unwrap();
        let mut prob = 1.0;
        let mut next = Generation::default();
        for (i, &d) in digits.iter().enumerate() {
            let a = atoms[d];
            prob *= a.p;
            last.xi[i] = a.xi;
            last.zeta[i] = a.zeta;
            for _ in 0..a.xi {
                next.parent.push(i as u32);
                next.xi.push(0);
                next.zeta.push(1);
            }
        }
        g.push(next);
        out.push((prob, MarkedTree::from_generations(g).unwrap()));
        let mut i = 0;
        while i < width {
            digits[i] += 1;
            if digits[i] < atoms.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == width {
            return out;
        }
    }
}

/// Cuts a tree after generation `t`, keeping that generation's nodes with
/// their offspring counts zeroed so the prefix is a tree on its own.
pub fn prefix(tree: &MarkedTree, t: usize) -> MarkedTree {
    let mut g: Vec<Generation> = tree.generations()[..=t].to_vec();
    g.last_mut().unwrap().xi.iter_mut().for_each(|x| *x = 0);
    MarkedTree::from_generations(g).unwrap()
}

/// Probability of every depth-`depth` shape (offspring counts listed
/// breadth-first) of a Galton-Watson tree with offspring pmf `pmf`.
pub fn shape_probabilities(pmf: &[f64], depth: usize) -> Vec<(Vec<usize>, f64, usize)> {
    fn rec(pmf: &[f64], width: usize, left: usize, shape: &mut Vec<usize>, p: f64, out: &mut Vec<(Vec<usize>, f64, usize)>) {
        if left == 0 {
            out.push((shape.clone(), p, width));
            return;
        }
        let support: Vec<usize> = (0..pmf.len()).filter(|&k| pmf[k] > 0.0).collect();
        let mut choice = vec![0usize; width];
        loop {
            let ks: Vec<usize> = choice.iter().map(|&c| support[c]).collect();
            let q: f64 = ks.iter().map(|&k| pmf[k]).product();
            let len = shape.len();
            shape.extend(&ks);
            rec(pmf, ks.iter().sum(), left - 1, shape, p * q, out);
            shape.truncate(len);
            let mut i = 0;
            while i < width {
                choice[i] += 1;
                if choice[i] < support.len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
            if i == width {
                return;
            }
        }
    }
    let mut out = Vec::new();
    rec(pmf, 1, depth, &mut Vec::new(), 1.0, &mut out);
    out
}

/// Boolean reachability by a search from every vertex.
pub fn reachability(g: &Multigraph) -> Vec<Vec<bool>> {
    let n = g.n();
    let mut reach = vec![vec![false; n]; n];
    for s in 0..n {
        let mut stack = vec![s];
        reach[s][s] = true;
        while let Some(v) = stack.pop() {
            for &w in g.out_neighbors(v) {
                if !reach[s][w as usize] {
                    reach[s][w as usize] = true;
                    stack.push(w as usize);
                }
            }
        }
    }
    reach
}

/// Closed class reachable from everywhere, by the reachability matrix.
pub fn brute_attractor(g: &Multigraph) -> Option<Vec<u32>> {
    let r = reachability(g);
    let n = g.n();
    let everywhere: Vec<usize> = (0..n).filter(|&y| (0..n).all(|x| r[x][y])).collect();
    if everywhere.is_empty() {
        return None;
    }
    Some(everywhere.iter().map(|&v| v as u32).collect())
}

/// Transition matrix P(x, y) = m(x,y)/d⁺ₓ as dense rows.
pub fn transition(g: &Multigraph) -> Vec<Vec<f64>> {
    let n = g.n();
    let mut p = vec![vec![0.0; n]; n];
    for x in 0..n {
        let d = g.out_degree(x) as f64;
        for &y in g.out_neighbors(x) {
            p[x][y as usize] += 1.0 / d;
        }
    }
    p
}

/// Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, piv);
        b.swap(c, piv);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            if f != 0.0 {
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Expected hitting times of `y` from every state of a set where `y` is hit
/// almost surely, by a dense solve in test code.
pub fn oracle_hitting(g: &Multigraph, y: usize) -> Vec<f64> {
    let n = g.n();
    let p = transition(g);
    let states: Vec<usize> = (0..n).filter(|&x| x != y).collect();
    let k = states.len();
    let mut a = vec![vec![0.0; k]; k];
    for (i, &x) in states.iter().enumerate() {
        a[i][i] += 1.0;
        for (j, &z) in states.iter().enumerate() {
            a[i][j] -= p[x][z];
        }
    }
    let h = gauss_solve(a, vec![1.0; k]);
    let mut out = vec![0.0; n];
    for (i, &x) in states.iter().enumerate() {
        out[x] = h[i];
    }
    out
}

/// π by dense solve on the given closed class.
pub fn oracle_stationary(g: &Multigraph, support: &[u32]) -> Vec<f64> {
    let p = transition(g);
    let k = support.len();
    let mut a = vec![vec![0.0; k]; k];
    for (i, &y) in support.iter().enumerate() {
        for (j, &x) in support.iter().enumerate() {
            a[i][j] = p[x as usize][y as usize] - if i == j { 1.0 } else { 0.0 };
        }
    }
    a[k - 1] = vec![1.0; k];
    let mut b = vec![0.0; k];
    b[k - 1] = 1.0;
    let sol = gauss_solve(a, b);
    let mut pi = vec![0.0; g.n()];
    for (i, &v) in support.iter().enumerate() {
        pi[v as usize] = sol[i];
    }
    pi
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Bisection for the root in (0,1) of 1 − s = e^{−rs}.
pub fn rout_survival_oracle(r: f64) -> f64 {
    let (mut lo, mut hi) = (1e-9, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if 1.0 - mid - (-r * mid).exp() > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
