//! Branching-process parameters derived from a bi-degree distribution.
//!
//! The in-neighbourhood of a uniformly random head grows like a marked
//! Galton-Watson tree whose offspring law is the out-size-biased degree law
//! `D̂ = (D̂⁻, D̂⁺)`: `D̂⁻` children, mark `D̂⁺`. Everything here is a closed
//! form or a fixed point over the finite support of that law.

use serde::{Deserialize, Serialize};

use crate::degree::{BiDegreeDistribution, BiDegreeSequence};
use crate::error::{Error, Result};

const FIXED_POINT_TOL: f64 = 1e-14;
const FIXED_POINT_MAX_ITER: usize = 1_000_000;

/// Offspring law indexed by count: `pmf[k] = P{ξ = k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OffspringLaw {
    pmf: Vec<f64>,
}

impl OffspringLaw {
    pub fn new(mut pmf: Vec<f64>) -> Result<Self> {
        if pmf.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::validation("offspring pmf", "negative or non-finite mass"));
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::validation(
                "offspring pmf",
                format!("sums to {total}, expected 1"),
            ));
        }
        while pmf.len() > 1 && *pmf.last().unwrap() == 0.0 {
            pmf.pop();
        }
        Ok(Self { pmf })
    }

    pub fn from_atoms(atoms: &[(u32, f64)]) -> Result<Self> {
        let len = atoms.iter().map(|a| a.0 as usize + 1).max().unwrap_or(1);
        let mut pmf = vec![0.0; len];
        for &(k, p) in atoms {
            pmf[k as usize] += p;
        }
        Self::new(pmf)
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.pmf.get(k).copied().unwrap_or(0.0)
    }

    pub fn max_offspring(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn pgf(&self, z: f64) -> f64 {
        self.pmf.iter().rev().fold(0.0, |acc, &p| acc * z + p)
    }

    pub fn pgf_derivative(&self, z: f64) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, &p)| acc * z + k as f64 * p)
    }

    pub fn mean(&self) -> f64 {
        self.pgf_derivative(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkedAtom {
    pub xi: u32,
    pub zeta: u32,
    pub p: f64,
}

/// Joint law of `(ξ, ζ)`: offspring count and integer mark.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedOffspringLaw {
    atoms: Vec<MarkedAtom>,
}

impl MarkedOffspringLaw {
    pub fn new(entries: impl IntoIterator<Item = ((u32, u32), f64)>) -> Result<Self> {
        let mut atoms: Vec<MarkedAtom> = Vec::new();
        for ((xi, zeta), p) in entries {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::validation(
                    format!("eta[({xi},{zeta})]"),
                    format!("invalid probability {p}"),
                ));
            }
            if p > 0.0 {
                atoms.push(MarkedAtom { xi, zeta, p });
            }
        }
        atoms.sort_by_key(|a| (a.xi, a.zeta));
        atoms.dedup_by(|b, a| {
            if (a.xi, a.zeta) == (b.xi, b.zeta) {
                a.p += b.p;
                true
            } else {
                false
            }
        });
        if atoms.is_empty() {
            return Err(Error::validation("eta", "empty support"));
        }
        let total: f64 = atoms.iter().map(|a| a.p).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::validation("eta", format!("sums to {total}, expected 1")));
        }
        Ok(Self { atoms })
    }

    /// Parses `{"atoms": [{"xi": .., "zeta": .., "p": ..}, ...]}`.
    pub fn from_json_str(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct LawFile {
            atoms: Vec<MarkedAtom>,
        }
        let file: LawFile = serde_json::from_str(s)?;
        Self::new(file.atoms.into_iter().map(|a| ((a.xi, a.zeta), a.p)))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::json!({ "atoms": self.atoms }).to_string()
    }

    pub fn atoms(&self) -> &[MarkedAtom] {
        &self.atoms
    }

    pub fn prob(&self, xi: u32, zeta: u32) -> f64 {
        self.atoms
            .iter()
            .find(|a| a.xi == xi && a.zeta == zeta)
            .map_or(0.0, |a| a.p)
    }

    pub fn offspring(&self) -> OffspringLaw {
        OffspringLaw::from_atoms(&self.atoms.iter().map(|a| (a.xi, a.p)).collect::<Vec<_>>())
            .expect("marginal of a valid law")
    }

    pub fn mark_marginal(&self) -> Vec<(u32, f64)> {
        let mut marks: Vec<(u32, f64)> = Vec::new();
        for a in &self.atoms {
            match marks.iter_mut().find(|m| m.0 == a.zeta) {
                Some(m) => m.1 += a.p,
                None => marks.push((a.zeta, a.p)),
            }
        }
        marks.sort_by_key(|m| m.0);
        marks
    }

    pub fn mean_offspring(&self) -> f64 {
        self.atoms.iter().map(|a| a.xi as f64 * a.p).sum()
    }

    /// `E[ξ/ζ]`; infinite if a mark is zero where `ξ > 0`.
    pub fn mean_ratio(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.xi as f64 / a.zeta as f64 * a.p)
            .sum()
    }

    pub fn min_mark(&self) -> u32 {
        self.atoms.iter().map(|a| a.zeta).min().unwrap()
    }

    pub fn max_mark(&self) -> u32 {
        self.atoms.iter().map(|a| a.zeta).max().unwrap()
    }

    pub fn max_offspring(&self) -> u32 {
        self.atoms.iter().map(|a| a.xi).max().unwrap()
    }

    pub fn bivariate_pgf(&self, z: f64, w: f64) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.p * z.powi(a.xi as i32) * w.powi(a.zeta as i32))
            .sum()
    }
}

/// `f(z,w) = Σ p(k,ℓ) zᵏ wˡ`.
pub fn bivariate_gf(dist: &BiDegreeDistribution, z: f64, w: f64) -> f64 {
    dist.atoms()
        .iter()
        .map(|a| a.p * z.powi(a.in_deg as i32) * w.powi(a.out_deg as i32))
        .sum()
}

/// Degree law of the vertex incident to a uniformly random tail, as `(ξ, ζ) = (D̂⁻, D̂⁺)`.
pub fn out_size_biased(dist: &BiDegreeDistribution) -> Result<MarkedOffspringLaw> {
    let lambda = dist.mean_out();
    if lambda <= 0.0 {
        return Err(Error::Degenerate("mean out-degree is zero".into()));
    }
    MarkedOffspringLaw::new(
        dist.atoms()
            .iter()
            .map(|a| ((a.in_deg, a.out_deg), a.out_deg as f64 * a.p / lambda)),
    )
}

/// Degree law of the vertex incident to a uniformly random head, as `(D̂ⁱⁿ⁻, D̂ⁱⁿ⁺)`.
pub fn in_size_biased(dist: &BiDegreeDistribution) -> Result<MarkedOffspringLaw> {
    let lambda = dist.mean_in();
    if lambda <= 0.0 {
        return Err(Error::Degenerate("mean in-degree is zero".into()));
    }
    MarkedOffspringLaw::new(
        dist.atoms()
            .iter()
            .map(|a| ((a.in_deg, a.out_deg), a.in_deg as f64 * a.p / lambda)),
    )
}

/// Survival probability `s = 1 - q`, with `q` the smallest fixed point of the
/// pgf in `[0,1]`, reached by monotone iteration from `q = 0`.
pub fn survival_probability(law: &OffspringLaw) -> Result<f64> {
    if law.mean() <= 1.0 {
        return Ok(0.0);
    }
    let mut q = 0.0_f64;
    for _ in 0..FIXED_POINT_MAX_ITER {
        let next = law.pgf(q);
        if (next - q).abs() < FIXED_POINT_TOL {
            return Ok(1.0 - next);
        }
        q = next;
    }
    Err(Error::Numerical {
        msg: "extinction fixed point did not converge".into(),
        residual: (law.pgf(q) - q).abs(),
    })
}

/// `ν̂⁻ = (1/λ) ∂²f/∂z∂w (1-s⁻, 1)`.
pub fn subcritical_expansion_rate(dist: &BiDegreeDistribution) -> Result<f64> {
    let eta = out_size_biased(dist)?;
    let s = survival_probability(&eta.offspring())?;
    let lambda = dist.lambda();
    let q = 1.0 - s;
    Ok(dist
        .atoms()
        .iter()
        .filter(|a| a.in_deg > 0)
        .map(|a| a.in_deg as f64 * a.out_deg as f64 * a.p * q.powi(a.in_deg as i32 - 1))
        .sum::<f64>()
        / lambda)
}

/// Offspring law of the process conditioned on extinction.
pub fn conjugate_offspring(law: &OffspringLaw, s: f64) -> OffspringLaw {
    let pmf = if s < 1.0 {
        let q = 1.0 - s;
        law.pmf()
            .iter()
            .enumerate()
            .map(|(k, &p)| if k == 0 { p / q } else { q.powi(k as i32 - 1) * p })
            .collect()
    } else {
        let p1 = law.prob(1);
        vec![1.0 - p1, p1]
    };
    OffspringLaw { pmf }.trimmed()
}

/// Joint `(ξ̂, ζ)` law conditioned on extinction: `(1-s)^{k-1} p(k,ℓ)`.
pub fn conjugate_marked(eta: &MarkedOffspringLaw, s: f64) -> Result<MarkedOffspringLaw> {
    if s >= 1.0 {
        return Err(Error::Degenerate(
            "conditioning on extinction needs s < 1".into(),
        ));
    }
    let q = 1.0 - s;
    MarkedOffspringLaw::new(eta.atoms().iter().map(|a| {
        let w = if a.xi == 0 { 1.0 / q } else { q.powi(a.xi as i32 - 1) };
        ((a.xi, a.zeta), w * a.p)
    }))
}

/// `ν̂ = Σ k (1-s)^{k-1} P{ξ = k}`.
pub fn subcritical_rate(eta: &MarkedOffspringLaw, s: f64) -> f64 {
    let q = 1.0 - s;
    eta.atoms()
        .iter()
        .filter(|a| a.xi > 0)
        .map(|a| a.xi as f64 * q.powi(a.xi as i32 - 1) * a.p)
        .sum()
}

/// Law of `(ξ, ζ)` for an individual with exactly one surviving child.
pub fn single_survivor_law(eta: &MarkedOffspringLaw, s: f64) -> Result<MarkedOffspringLaw> {
    let nu_hat = subcritical_rate(eta, s);
    if nu_hat <= 0.0 {
        return Err(Error::Degenerate(
            "subcritical expansion rate is zero; no single-survivor spine".into(),
        ));
    }
    let q = 1.0 - s;
    MarkedOffspringLaw::new(eta.atoms().iter().filter(|a| a.xi > 0).map(|a| {
        (
            (a.xi, a.zeta),
            a.xi as f64 * q.powi(a.xi as i32 - 1) * a.p / nu_hat,
        )
    }))
}

/// `Ĥ = E[log ζ̃]`.
pub fn subcritical_entropy(eta: &MarkedOffspringLaw, s: f64) -> Result<f64> {
    let tilde = single_survivor_law(eta, s)?;
    Ok(tilde
        .atoms()
        .iter()
        .map(|a| a.p * (a.zeta as f64).ln())
        .sum())
}

/// Out-entropy `H⁺ = (1/m) Σ d⁻ₓ log d⁺ₓ` and the entropic-time coefficient `1/H⁺`.
pub fn out_entropy(seq: &BiDegreeSequence) -> Result<(f64, f64)> {
    let mut acc = 0.0;
    for &(k, l) in seq.degrees() {
        if k > 0 {
            if l == 0 {
                return Err(Error::Degenerate(
                    "vertex with heads but no tails has undefined log-out-degree".into(),
                ));
            }
            acc += k as f64 * (l as f64).ln();
        }
    }
    let h_plus = acc / seq.m() as f64;
    if h_plus <= 0.0 {
        return Err(Error::Degenerate("out-entropy is zero".into()));
    }
    Ok((h_plus, 1.0 / h_plus))
}

/// Distribution-level out-entropy `E[log D̂ⁱⁿ⁺]`.
pub fn out_entropy_of(dist: &BiDegreeDistribution) -> Result<f64> {
    let eta = in_size_biased(dist)?;
    if eta.atoms().iter().any(|a| a.zeta == 0) {
        return Err(Error::Degenerate(
            "vertex with heads but no tails has undefined log-out-degree".into(),
        ));
    }
    Ok(eta.atoms().iter().map(|a| a.p * (a.zeta as f64).ln()).sum())
}

/// Offspring law restricted to children with surviving progeny, given survival.
/// Only used to check identities; nothing in the main pipeline consumes it.
pub fn surviving_offspring_law(law: &OffspringLaw, s: f64) -> Result<OffspringLaw> {
    if s <= 0.0 {
        return Err(Error::Degenerate("process dies out almost surely".into()));
    }
    let q = 1.0 - s;
    let kmax = law.max_offspring();
    let mut pmf = vec![0.0; kmax + 1];
    for (m, &pm) in law.pmf().iter().enumerate() {
        if pm == 0.0 {
            continue;
        }
        let mut binom = 1.0;
        for k in 0..=m {
            if k > 0 {
                binom = binom * (m - k + 1) as f64 / k as f64;
                pmf[k] += pm * binom * s.powi(k as i32) * q.powi((m - k) as i32) / s;
            }
        }
    }
    pmf[0] = 0.0;
    let total: f64 = pmf.iter().sum();
    pmf[0] = (1.0 - total).max(0.0);
    Ok(OffspringLaw { pmf }.trimmed())
}

impl OffspringLaw {
    fn trimmed(mut self) -> Self {
        while self.pmf.len() > 1 && *self.pmf.last().unwrap() == 0.0 {
            self.pmf.pop();
        }
        self
    }
}

/// All branching-process parameters of a bi-degree distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BpParameters {
    pub lambda: f64,
    pub nu: f64,
    pub s_minus: f64,
    pub nu_hat: f64,
    /// Absent when `ν̂⁻ = 0`: there is no subcritical spine.
    pub h_hat: Option<f64>,
    pub h_plus: Option<f64>,
    pub t_ent_coeff: Option<f64>,
    pub min_in: u32,
    pub min_out: u32,
    pub max_out: u32,
}

impl BpParameters {
    pub fn from_distribution(dist: &BiDegreeDistribution) -> Result<Self> {
        if !dist.is_mean_balanced() {
            return Err(Error::validation(
                "pmf",
                format!(
                    "mean in-degree {} differs from mean out-degree {}",
                    dist.mean_in(),
                    dist.mean_out()
                ),
            ));
        }
        let eta = out_size_biased(dist)?;
        let xi = eta.offspring();
        let s_minus = survival_probability(&xi)?;
        let nu_hat = subcritical_expansion_rate(dist)?;
        let h_hat = if nu_hat > 0.0 {
            Some(subcritical_entropy(&eta, s_minus)?)
        } else {
            None
        };
        let h_plus = out_entropy_of(dist).ok().filter(|h| *h > 0.0);
        Ok(Self {
            lambda: dist.lambda(),
            nu: xi.mean(),
            s_minus,
            nu_hat,
            h_hat,
            h_plus,
            t_ent_coeff: h_plus.map(|h| 1.0 / h),
            min_in: dist.min_in(),
            min_out: dist.min_out(),
            max_out: dist.max_out(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::{realize_sequence, thin_tail_family, toy_distribution};

    #[test]
    fn gf_values() {
        let toy = toy_distribution();
        assert!((bivariate_gf(&toy, 1.0, 1.0) - 1.0).abs() < 1e-15);
        assert!((bivariate_gf(&toy, 0.0, 1.0) - 0.5).abs() < 1e-15);
        let reg = BiDegreeDistribution::new([((2, 2), 1.0)]).unwrap();
        let (z, w) = (0.3, 0.7);
        assert!((bivariate_gf(&reg, z, w) - z * z * w * w).abs() < 1e-15);
    }

    #[test]
    fn size_biasing() {
        let reg = BiDegreeDistribution::new([((2, 2), 1.0)]).unwrap();
        assert_eq!(out_size_biased(&reg).unwrap().atoms().len(), 1);
        let d = out_size_biased(&toy_distribution()).unwrap();
        let expect = [((0, 2), 0.2), ((0, 3), 0.3), ((5, 2), 0.2), ((5, 3), 0.3)];
        for ((k, l), p) in expect {
            assert!((d.prob(k, l) - p).abs() < 1e-15);
        }
        assert!((d.mean_ratio() - 1.0).abs() < 1e-15);
        let zero = BiDegreeDistribution::new([((0, 0), 1.0)]).unwrap();
        assert!(matches!(out_size_biased(&zero), Err(Error::Degenerate(_))));
    }

    #[test]
    fn survival_examples() {
        let two = OffspringLaw::new(vec![0.0, 0.0, 1.0]).unwrap();
        assert_eq!(survival_probability(&two).unwrap(), 1.0);

        let toy_in = OffspringLaw::from_atoms(&[(0, 0.5), (5, 0.5)]).unwrap();
        let s = survival_probability(&toy_in).unwrap();
        let q = 1.0 - s;
        assert!((toy_in.pgf(q) - q).abs() < 1e-13);
        assert!((2.5 * q.powi(4) - 0.181095).abs() < 1e-6);

        let crit = OffspringLaw::from_atoms(&[(0, 0.5), (2, 0.5)]).unwrap();
        assert_eq!(survival_probability(&crit).unwrap(), 0.0);
    }

    #[test]
    fn expansion_rate_examples() {
        let ergodic = BiDegreeDistribution::new([((2, 2), 0.5), ((3, 3), 0.5)]).unwrap();
        assert_eq!(subcritical_expansion_rate(&ergodic).unwrap(), 0.0);
        let toy = subcritical_expansion_rate(&toy_distribution()).unwrap();
        assert!((toy - 0.181095).abs() < 1e-6);
        let fam = subcritical_expansion_rate(&thin_tail_family(10).unwrap()).unwrap();
        assert!(fam > 0.0 && fam < 1.0);
    }

    #[test]
    fn conjugate_examples() {
        let law = OffspringLaw::from_atoms(&[(0, 0.5), (5, 0.5)]).unwrap();
        assert_eq!(conjugate_offspring(&law, 0.0), law);
        let s = survival_probability(&law).unwrap();
        let hat = conjugate_offspring(&law, s);
        assert!((hat.pmf().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((hat.mean() - 0.181095).abs() < 1e-6);
        assert!((hat.mean() - law.pgf_derivative(1.0 - s)).abs() < 1e-12);

        let two = OffspringLaw::new(vec![0.0, 0.0, 1.0]).unwrap();
        assert_eq!(conjugate_offspring(&two, 1.0).pmf(), &[1.0]);
    }

    #[test]
    fn single_survivor_examples() {
        let eta = out_size_biased(&toy_distribution()).unwrap();
        let s = survival_probability(&eta.offspring()).unwrap();
        let tilde = single_survivor_law(&eta, s).unwrap();
        let marks = tilde.mark_marginal();
        assert!((marks[0].1 - 0.4).abs() < 1e-12 && marks[0].0 == 2);
        assert!((marks[1].1 - 0.6).abs() < 1e-12 && marks[1].0 == 3);

        let unary = MarkedOffspringLaw::new([((1, 2), 1.0)]).unwrap();
        assert_eq!(single_survivor_law(&unary, 0.0).unwrap(), unary);

        let eta = out_size_biased(&thin_tail_family(10).unwrap()).unwrap();
        let s = survival_probability(&eta.offspring()).unwrap();
        let tilde = single_survivor_law(&eta, s).unwrap();
        assert_eq!(tilde.mark_marginal(), vec![(2, 1.0)]);

        let ergodic = out_size_biased(&BiDegreeDistribution::new([((2, 2), 1.0)]).unwrap()).unwrap();
        assert!(matches!(
            single_survivor_law(&ergodic, 1.0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn entropy_examples() {
        let eta = out_size_biased(&toy_distribution()).unwrap();
        let s = survival_probability(&eta.offspring()).unwrap();
        let h = subcritical_entropy(&eta, s).unwrap();
        assert!((h - (0.4 * 2f64.ln() + 0.6 * 3f64.ln())).abs() < 1e-12);
        assert!((h - 0.936426).abs() < 1e-6);

        let eta = out_size_biased(&thin_tail_family(5).unwrap()).unwrap();
        let s = survival_probability(&eta.offspring()).unwrap();
        assert!((subcritical_entropy(&eta, s).unwrap() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn out_entropy_examples() {
        let seq = BiDegreeSequence::new(vec![(2, 2); 7]).unwrap();
        let (h, c) = out_entropy(&seq).unwrap();
        assert!((h - 2f64.ln()).abs() < 1e-15 && (c - 1.0 / 2f64.ln()).abs() < 1e-12);

        let seq = realize_sequence(&toy_distribution(), 4000).unwrap();
        let (h, _) = out_entropy(&seq).unwrap();
        let expect = (1000.0 * 5.0 * 2f64.ln() + 1000.0 * 5.0 * 3f64.ln()) / 10_000.0;
        assert!((h - expect).abs() < 1e-12);
        assert!((out_entropy_of(&toy_distribution()).unwrap() - expect).abs() < 1e-12);

        // Vertices without heads contribute nothing.
        let seq = BiDegreeSequence::new(vec![(0, 5), (3, 2), (2, 3), (4, 0)]).unwrap_err();
        assert!(matches!(seq, Error::Balance { .. }));
        let seq = BiDegreeSequence::new(vec![(0, 2), (3, 2), (4, 2), (0, 3), (5, 3)]).unwrap();
        let brute: f64 = seq
            .degrees()
            .iter()
            .map(|&(k, l)| k as f64 * (l as f64).ln())
            .sum::<f64>()
            / 12.0;
        assert!((out_entropy(&seq).unwrap().0 - brute).abs() < 1e-15);
    }

    #[test]
    fn parameters_toy() {
        let p = BpParameters::from_distribution(&toy_distribution()).unwrap();
        assert_eq!(p.lambda, 2.5);
        assert_eq!(p.nu, 2.5);
        assert!((p.s_minus - 0.481213).abs() < 1e-5);
        assert!((p.nu_hat - 0.181095).abs() < 1e-6);
        assert!((p.h_hat.unwrap() - 0.936426).abs() < 1e-6);
    }
}
