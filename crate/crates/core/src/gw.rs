//! Marked Galton-Watson trees, their reciprocal-mark weights, perturbed offspring
//! laws, the extinction duality, and Monte Carlo estimates of thin-tree events.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bp::{conjugate_marked, conjugate_offspring, survival_probability, MarkedOffspringLaw, OffspringLaw};
use crate::error::{Error, Result};
use crate::rate::{rate_function, ExtReal, FiniteLogLaw};
use crate::seed::{replicate_rng, rng_from_seed, SimRng};

pub const DEFAULT_WIDTH_CAP: usize = 1_000_000;
const DUALITY_SHAPE_CAP: u64 = 1_000_000;
const CHUNK: usize = 4096;

/// Inverse-CDF sampler over the atoms of a marked law.
#[derive(Debug, Clone)]
pub struct MarkedSampler {
    cdf: Vec<f64>,
    atoms: Vec<(u32, u32)>,
}

impl MarkedSampler {
    pub fn new(eta: &MarkedOffspringLaw) -> Self {
        let mut acc = 0.0;
        let mut cdf = Vec::with_capacity(eta.atoms().len());
        let mut atoms = Vec::with_capacity(eta.atoms().len());
        for a in eta.atoms() {
            acc += a.p;
            cdf.push(acc);
            atoms.push((a.xi, a.zeta));
        }
        if let Some(last) = cdf.last_mut() {
            *last = f64::INFINITY;
        }
        MarkedSampler { cdf, atoms }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (u32, u32) {
        let u: f64 = rng.gen();
        let i = self.cdf.partition_point(|&c| c <= u);
        self.atoms[i.min(self.atoms.len() - 1)]
    }
}

/// One generation of a tree: parallel arrays indexed by position in the generation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Generation {
    pub parent: Vec<u32>,
    pub xi: Vec<u32>,
    pub zeta: Vec<u32>,
}

impl Generation {
    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MarkedTree {
    generations: Vec<Generation>,
    truncated_at: Option<usize>,
}

impl MarkedTree {
    /// Builds a tree from explicit generations, checking parent indices and sizes.
    pub fn from_generations(generations: Vec<Generation>) -> Result<Self> {
        if generations.first().map(Generation::len) != Some(1) {
            return Err(Error::validation("generations", "generation 0 must hold exactly the root"));
        }
        for (t, g) in generations.iter().enumerate() {
            if g.parent.len() != g.len() || g.zeta.len() != g.len() {
                return Err(Error::validation("generations", format!("ragged arrays at generation {t}")));
            }
            if g.zeta.contains(&0) {
                return Err(Error::validation("zeta", format!("zero mark at generation {t}")));
            }
            if t > 0 {
                let prev = &generations[t - 1];
                let expect: u64 = prev.xi.iter().map(|&x| x as u64).sum();
                if expect != g.len() as u64 {
                    return Err(Error::validation(
                        "generations",
                        format!("generation {t} has {} nodes, parents produce {expect}", g.len()),
                    ));
                }
                let mut counts = vec![0u32; prev.len()];
                for &p in &g.parent {
                    let slot = counts
                        .get_mut(p as usize)
                        .ok_or_else(|| Error::validation("parent", format!("index {p} out of range at generation {t}")))?;
                    *slot += 1;
                }
                if counts != prev.xi {
                    return Err(Error::validation("parent", format!("child counts disagree at generation {t}")));
                }
            }
        }
        Ok(MarkedTree { generations, truncated_at: None })
    }

    pub fn generations(&self) -> &[Generation] {
        &self.generations
    }

    /// Index of the deepest stored generation.
    pub fn depth(&self) -> usize {
        self.generations.len() - 1
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.generations.iter().map(Generation::len).collect()
    }

    /// Generation at which the width cap stopped simulation, if any.
    pub fn truncated_at(&self) -> Option<usize> {
        self.truncated_at
    }

    pub fn is_extinct(&self) -> bool {
        self.generations.last().is_some_and(Generation::is_empty)
    }
}

pub fn simulate_marked_gw(eta: &MarkedOffspringLaw, t_max: usize, width_cap: usize, rng_seed: u64) -> Result<MarkedTree> {
    let mut rng = rng_from_seed(rng_seed);
    simulate_with(eta, t_max, width_cap, &mut rng)
}

pub fn simulate_with(eta: &MarkedOffspringLaw, t_max: usize, width_cap: usize, rng: &mut SimRng) -> Result<MarkedTree> {
    if width_cap == 0 {
        return Err(Error::validation("width_cap", "must be at least 1"));
    }
    let sampler = MarkedSampler::new(eta);
    let (xi, zeta) = sampler.sample(rng);
    let mut generations = vec![Generation { parent: vec![0], xi: vec![xi], zeta: vec![zeta] }];
    let mut truncated_at = None;
    for t in 1..=t_max {
        let prev = &generations[t - 1];
        let size: u64 = prev.xi.iter().map(|&x| x as u64).sum();
        if size > width_cap as u64 {
            truncated_at = Some(t);
            break;
        }
        let mut g = Generation::default();
        g.parent.reserve(size as usize);
        for (i, &k) in prev.xi.iter().enumerate() {
            for _ in 0..k {
                let (xi, zeta) = sampler.sample(rng);
                g.parent.push(i as u32);
                g.xi.push(xi);
                g.zeta.push(zeta);
            }
        }
        let empty = g.is_empty();
        generations.push(g);
        if empty {
            break;
        }
    }
    Ok(MarkedTree { generations, truncated_at })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaTrace {
    /// Γ_0, …, Γ_t.
    pub per_generation: Vec<f64>,
    /// Γ_{i,t} for each node of generation t.
    pub leaves: Vec<f64>,
}

impl GammaTrace {
    pub fn total(&self) -> f64 {
        *self.per_generation.last().unwrap()
    }
}

/// Γ_{i,t} is the product of reciprocal marks of the ancestors of `i` in
/// generations 0..t-1; the node's own mark does not enter.
pub fn gamma(tree: &MarkedTree, t: usize) -> Result<GammaTrace> {
    check_depth(tree, t)?;
    let mut weights = vec![1.0];
    let mut per_generation = vec![1.0];
    for r in 1..=t {
        weights = step_weights(tree, r, &weights);
        per_generation.push(weights.iter().sum());
    }
    Ok(GammaTrace { per_generation, leaves: weights })
}

/// Γ̂_t: every node of generation t0 starts at `gamma_floor` and the product
/// then runs over marks of generations t0..t-1.
pub fn truncated_gamma(tree: &MarkedTree, t0: usize, gamma_floor: f64, t: usize) -> Result<f64> {
    if t < t0 {
        return Err(Error::Argument(format!("t = {t} precedes t0 = {t0}")));
    }
    check_depth(tree, t)?;
    let n0 = tree.generations.get(t0).map_or(0, Generation::len);
    let mut weights = vec![gamma_floor; n0];
    for r in t0 + 1..=t {
        weights = step_weights(tree, r, &weights);
    }
    Ok(weights.iter().sum())
}

fn check_depth(tree: &MarkedTree, t: usize) -> Result<()> {
    if t <= tree.depth() || tree.is_extinct() {
        return Ok(());
    }
    match tree.truncated_at {
        Some(generation) => Err(Error::Truncation { generation, requested: t }),
        None => Err(Error::Argument(format!("tree depth {} < t = {t}", tree.depth()))),
    }
}

fn step_weights(tree: &MarkedTree, r: usize, weights: &[f64]) -> Vec<f64> {
    let Some(g) = tree.generations.get(r) else {
        return Vec::new();
    };
    let prev = &tree.generations[r - 1];
    g.parent
        .iter()
        .map(|&p| weights[p as usize] / prev.zeta[p as usize] as f64)
        .collect()
}

fn check_beta(beta: f64, n: u64) -> Result<f64> {
    if !(beta > 0.0 && beta < 0.25) {
        return Err(Error::validation("beta", format!("{beta} not in (0, 1/4)")));
    }
    if n == 0 {
        return Err(Error::validation("n", "must be positive"));
    }
    Ok((n as f64).powf(beta - 1.0))
}

/// η↓: drop atoms lighter than n^{β-1} and renormalize.
pub fn perturb_down(eta: &MarkedOffspringLaw, beta: f64, n: u64) -> Result<MarkedOffspringLaw> {
    let eps = check_beta(beta, n)?;
    let kept: Vec<_> = eta.atoms().iter().filter(|a| a.p >= eps).collect();
    if kept.is_empty() {
        return Err(Error::Degenerate(format!("every atom is below {eps:e}")));
    }
    if kept.len() == eta.atoms().len() {
        return Ok(eta.clone());
    }
    let total: f64 = kept.iter().map(|a| a.p).sum();
    MarkedOffspringLaw::new(kept.iter().map(|a| ((a.xi, a.zeta), a.p / total)))
}

/// η↑: scale by c↑ = 1 - L·n^{β-1} and put n^{β-1} on each (0, ℓ), ℓ over the
/// L marks of the support.
pub fn perturb_up(eta: &MarkedOffspringLaw, beta: f64, n: u64) -> Result<MarkedOffspringLaw> {
    let eps = check_beta(beta, n)?;
    let marks = eta.mark_marginal();
    let c_up = 1.0 - marks.len() as f64 * eps;
    if c_up <= 0.0 {
        return Err(Error::Degenerate(format!("n = {n} too small for the upper perturbation")));
    }
    let scaled = eta.atoms().iter().map(|a| ((a.xi, a.zeta), a.p * c_up));
    let extra = marks.iter().map(|&(l, _)| ((0, l), eps));
    MarkedOffspringLaw::new(scaled.chain(extra))
}

#[derive(Debug, Clone, Serialize)]
pub struct DualityReport {
    pub depth: usize,
    pub shapes: u64,
    pub extinction_probability: f64,
    pub max_abs_diff: f64,
    pub mass_conditioned: f64,
    pub mass_dual: f64,
}

/// Enumerates every tree shape down to `depth` and compares its probability
/// given extinction under `xi` with its probability under the dual law.
pub fn duality_check(xi: &OffspringLaw, depth: usize) -> Result<DualityReport> {
    if xi.mean() <= 1.0 {
        return Err(Error::Argument(format!("offspring mean {} is not supercritical", xi.mean())));
    }
    if depth > 3 {
        return Err(Error::Argument(format!("depth {depth} exceeds 3")));
    }
    let support: Vec<usize> = (0..=xi.max_offspring()).filter(|&k| xi.prob(k) > 0.0).collect();
    let shapes = count_shapes(&support, depth);
    if shapes > DUALITY_SHAPE_CAP {
        return Err(Error::Capacity(format!("more than {DUALITY_SHAPE_CAP} shapes at depth {depth}")));
    }
    let s = survival_probability(xi)?;
    let q = 1.0 - s;
    let dual = conjugate_offspring(xi, s);
    let mut report = DualityReport {
        depth,
        shapes,
        extinction_probability: q,
        max_abs_diff: 0.0,
        mass_conditioned: 0.0,
        mass_dual: 0.0,
    };
    let mut visit = |p_xi: f64, p_dual: f64, last: usize| {
        let conditioned = p_xi * q.powi(last as i32) / q;
        report.max_abs_diff = report.max_abs_diff.max((conditioned - p_dual).abs());
        report.mass_conditioned += conditioned;
        report.mass_dual += p_dual;
    };
    enumerate_shapes(xi, &dual, &support, 1, depth, 1.0, 1.0, &mut visit);
    Ok(report)
}

fn count_shapes(support: &[usize], depth: usize) -> u64 {
    fn below(support: &[usize], width: usize, depth: usize, memo: &mut std::collections::HashMap<(usize, usize), u64>) -> u64 {
        if depth == 0 {
            return 1;
        }
        if let Some(&v) = memo.get(&(width, depth)) {
            return v;
        }
        let max_k = support.iter().copied().max().unwrap_or(0);
        // ways[c]: number of offspring assignments of `width` nodes totalling c.
        let mut ways = vec![0u64; width * max_k + 1];
        ways[0] = 1;
        for _ in 0..width {
            let mut next = vec![0u64; ways.len()];
            for (c, &v) in ways.iter().enumerate() {
                if v == 0 {
                    continue;
                }
                for &k in support {
                    next[c + k] = next[c + k].saturating_add(v);
                }
            }
            ways = next;
        }
        let mut total = 0u64;
        for (c, &v) in ways.iter().enumerate() {
            if v > 0 {
                total = total.saturating_add(v.saturating_mul(below(support, c, depth - 1, memo)));
            }
            if total > DUALITY_SHAPE_CAP {
                break;
            }
        }
        memo.insert((width, depth), total);
        total
    }
    below(support, 1, depth, &mut std::collections::HashMap::new())
}

#[allow(clippy::too_many_arguments)]
fn enumerate_shapes(
    xi: &OffspringLaw,
    dual: &OffspringLaw,
    support: &[usize],
    width: usize,
    remaining: usize,
    p_xi: f64,
    p_dual: f64,
    visit: &mut impl FnMut(f64, f64, usize),
) {
    if remaining == 0 {
        visit(p_xi, p_dual, width);
        return;
    }
    // Odometer over the offspring counts of the `width` nodes in this generation.
    let mut digits = vec![0usize; width];
    loop {
        let mut a = p_xi;
        let mut b = p_dual;
        let mut next_width = 0;
        for &d in &digits {
            let k = support[d];
            a *= xi.prob(k);
            b *= dual.prob(k);
            next_width += k;
        }
        enumerate_shapes(xi, dual, support, next_width, remaining - 1, a, b, visit);
        let mut i = 0;
        while i < width {
            digits[i] += 1;
            if digits[i] < support.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == width {
            return;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TailEvent {
    /// 0 < Γ_t < e^{-aĤt} and 0 < X_r < ω for all r ≤ t.
    Lower,
    /// Some Γ_{i,t} < γ and 0 < X_t < ω.
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TailMethod {
    /// Direct simulation under η; Wilson intervals.
    Plain,
    /// Importance sampling under the size-biased extinction-conditioned law.
    Spine,
}

#[derive(Debug, Clone)]
pub struct TailConfig {
    pub t: usize,
    pub a: f64,
    pub omega: usize,
    pub reps: usize,
    pub seed: u64,
    pub event: TailEvent,
    pub method: TailMethod,
    /// Threshold γ for the upper event; defaults to e^{-aĤt}.
    pub gamma_floor: Option<f64>,
    pub width_cap: usize,
}

impl TailConfig {
    pub fn new(t: usize, a: f64, omega: usize, reps: usize, seed: u64) -> Self {
        TailConfig {
            t,
            a,
            omega,
            reps,
            seed,
            event: TailEvent::Lower,
            method: TailMethod::Spine,
            gamma_floor: None,
            width_cap: DEFAULT_WIDTH_CAP,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TailEstimate {
    pub t: usize,
    pub a: f64,
    pub successes: u64,
    pub reps: usize,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub rate_hat: ExtReal,
    pub rate_theory: ExtReal,
}

/// Wilson score interval for `successes` out of `reps` at normal quantile `z`.
pub fn wilson_interval(successes: u64, reps: usize, z: f64) -> (f64, f64) {
    if reps == 0 {
        return (0.0, 1.0);
    }
    let n = reps as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

struct TailModel {
    law: MarkedSampler,
    spine_law: Option<MarkedSampler>,
    dual_law: Option<MarkedSampler>,
    nu_hat: f64,
    q: f64,
    h_hat: f64,
    rate_theory: ExtReal,
}

fn tail_model(eta: &MarkedOffspringLaw, a: f64) -> Result<TailModel> {
    let s = survival_probability(&eta.offspring())?;
    let q = 1.0 - s;
    let dual = conjugate_marked(eta, s)?;
    let nu_hat = dual.mean_offspring();
    let spine = if nu_hat > 0.0 {
        Some(MarkedOffspringLaw::new(
            dual.atoms().iter().filter(|x| x.xi > 0).map(|x| ((x.xi, x.zeta), x.xi as f64 * x.p / nu_hat)),
        )?)
    } else {
        None
    };
    let (h_hat, rate_theory) = match &spine {
        Some(sp) => {
            let law = FiniteLogLaw::from_marks(sp)?;
            let h = law.mean();
            let rate = match rate_function(&law, a * h) {
                ExtReal::Finite(i) => ExtReal::Finite(-nu_hat.ln() + i),
                ExtReal::PosInf => ExtReal::PosInf,
            };
            (h, rate)
        }
        None => (f64::NAN, ExtReal::PosInf),
    };
    Ok(TailModel {
        law: MarkedSampler::new(eta),
        spine_law: spine.as_ref().map(MarkedSampler::new),
        dual_law: if q > 0.0 { Some(MarkedSampler::new(&dual)) } else { None },
        nu_hat,
        q,
        h_hat,
        rate_theory,
    })
}

/// Outcome of a single replicate: indicator and likelihood weight.
#[derive(Clone, Copy, Default)]
struct Draw {
    hit: bool,
    weight: f64,
}

struct Evaluator<'a> {
    model: &'a TailModel,
    cfg: &'a TailConfig,
    threshold: f64,
    gamma_floor: f64,
}

impl Evaluator<'_> {
    fn classify(&self, leaves: &[f64], every_level_ok: bool) -> bool {
        let x_t = leaves.len();
        if x_t == 0 || x_t >= self.cfg.omega {
            return false;
        }
        match self.cfg.event {
            TailEvent::Lower => every_level_ok && leaves.iter().sum::<f64>() < self.threshold,
            TailEvent::Upper => leaves.iter().any(|&w| w < self.gamma_floor),
        }
    }

    fn plain(&self, rng: &mut SimRng) -> Draw {
        let mut weights = vec![1.0f64];
        let mut next = Vec::new();
        for _ in 0..self.cfg.t {
            next.clear();
            for &w in &weights {
                let (xi, zeta) = self.model.law.sample(rng);
                let child = w / zeta as f64;
                next.extend(std::iter::repeat_n(child, xi as usize));
            }
            std::mem::swap(&mut weights, &mut next);
            let x = weights.len();
            if x == 0 {
                return Draw::default();
            }
            let too_wide = x >= self.cfg.omega;
            if too_wide && (self.cfg.event == TailEvent::Lower || x > self.cfg.width_cap) {
                return Draw::default();
            }
        }
        let hit = self.classify(&weights, true);
        Draw { hit, weight: if hit { 1.0 } else { 0.0 } }
    }

    fn spine(&self, rng: &mut SimRng) -> Draw {
        let spine_law = self.model.spine_law.as_ref().unwrap();
        let dual_law = self.model.dual_law.as_ref().unwrap();
        // (weight, is-spine)
        let mut nodes = vec![(1.0f64, true)];
        let mut next = Vec::new();
        let mut level_ok = true;
        for _ in 0..self.cfg.t {
            next.clear();
            for &(w, on_spine) in &nodes {
                let (xi, zeta) = if on_spine { spine_law.sample(rng) } else { dual_law.sample(rng) };
                let child = w / zeta as f64;
                let heir = if on_spine { rng.gen_range(0..xi) } else { u32::MAX };
                next.extend((0..xi).map(|j| (child, j == heir)));
            }
            std::mem::swap(&mut nodes, &mut next);
            if nodes.len() >= self.cfg.omega {
                level_ok = false;
                if self.cfg.event == TailEvent::Lower || nodes.len() > self.cfg.width_cap {
                    return Draw::default();
                }
            }
        }
        let leaves: Vec<f64> = nodes.iter().map(|n| n.0).collect();
        let hit = self.classify(&leaves, level_ok);
        if !hit {
            return Draw::default();
        }
        let x_t = leaves.len() as f64;
        let t = self.cfg.t as i32;
        let weight = self.model.nu_hat.powi(t) * self.model.q.powf(1.0 - x_t) / x_t;
        Draw { hit, weight }
    }
}

/// Estimates the probability of a thin-tree event at generation `cfg.t`.
pub fn subcritical_tail_experiment(eta: &MarkedOffspringLaw, cfg: &TailConfig) -> Result<TailEstimate> {
    if eta.mean_offspring() <= 1.0 {
        return Err(Error::Argument(format!("offspring mean {} is not supercritical", eta.mean_offspring())));
    }
    if eta.min_mark() < 2 {
        return Err(Error::validation("eta", "marks must be at least 2"));
    }
    if !(cfg.a >= 1.0) {
        return Err(Error::validation("a", format!("{} is below 1", cfg.a)));
    }
    if cfg.reps == 0 || cfg.omega == 0 {
        return Err(Error::validation("reps", "reps and omega must be positive"));
    }
    let model = tail_model(eta, cfg.a)?;
    if cfg.method == TailMethod::Spine && (model.spine_law.is_none() || model.q <= 0.0) {
        return Err(Error::Degenerate("extinction-conditioned law has no spine; use the plain method".into()));
    }
    let threshold = if model.h_hat.is_finite() {
        (-cfg.a * model.h_hat * cfg.t as f64).exp()
    } else {
        0.0
    };
    let eval = Evaluator {
        model: &model,
        cfg,
        threshold,
        gamma_floor: cfg.gamma_floor.unwrap_or(threshold),
    };
    let stream = cfg.t as u64;
    let chunks: Vec<(u64, f64, f64)> = (0..cfg.reps.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let (mut hits, mut sum, mut sq) = (0u64, 0.0, 0.0);
            for rep in c * CHUNK..((c + 1) * CHUNK).min(cfg.reps) {
                let mut rng = replicate_rng(cfg.seed, stream, rep as u64);
                let d = match cfg.method {
                    TailMethod::Plain => eval.plain(&mut rng),
                    TailMethod::Spine => eval.spine(&mut rng),
                };
                if d.hit {
                    hits += 1;
                    sum += d.weight;
                    sq += d.weight * d.weight;
                }
            }
            (hits, sum, sq)
        })
        .collect();
    let (successes, sum, sq) = chunks
        .into_iter()
        .fold((0u64, 0.0, 0.0), |acc, c| (acc.0 + c.0, acc.1 + c.1, acc.2 + c.2));
    let n = cfg.reps as f64;
    let (p_hat, ci_lo, ci_hi) = match cfg.method {
        TailMethod::Plain => {
            let (lo, hi) = wilson_interval(successes, cfg.reps, 1.96);
            (successes as f64 / n, lo, hi)
        }
        TailMethod::Spine => {
            let mean = sum / n;
            let var = (sq / n - mean * mean).max(0.0);
            let half = 1.96 * (var / n).sqrt();
            (mean, (mean - half).max(0.0), mean + half)
        }
    };
    let rate_hat = if p_hat > 0.0 && cfg.t > 0 {
        ExtReal::Finite(-p_hat.ln() / cfg.t as f64)
    } else {
        ExtReal::PosInf
    };
    Ok(TailEstimate {
        t: cfg.t,
        a: cfg.a,
        successes,
        reps: cfg.reps,
        p_hat,
        ci_lo,
        ci_hi,
        rate_hat,
        rate_theory: model.rate_theory,
    })
}

/// Least-squares slope of -log p̂ against t, dropping the smallest t when at
/// least three usable points exist. Returns (slope, standard error).
pub fn fit_decay_rate(estimates: &[TailEstimate]) -> Option<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = estimates
        .iter()
        .filter(|e| e.p_hat > 0.0)
        .map(|e| (e.t as f64, -e.p_hat.ln()))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pts.len() >= 3 {
        pts.remove(0);
    }
    least_squares(&pts)
}

/// Ordinary least squares slope with its standard error (NaN for two points).
pub fn least_squares(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let stderr = if pts.len() > 2 {
        let rss: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    Some((slope, stderr))
}
