//! Bi-degree distributions and sequences.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_DEGREE_CAP: u32 = 64;
const MASS_TOL: f64 = 1e-12;

/// One atom `(in, out) -> p` of a bi-degree distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeAtom {
    #[serde(rename = "in")]
    pub in_deg: u32,
    #[serde(rename = "out")]
    pub out_deg: u32,
    pub p: f64,
}

/// Probability mass over `(in-degree, out-degree)` pairs, stored sparsely and
/// sorted lexicographically by `(in, out)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiDegreeDistribution {
    atoms: Vec<DegreeAtom>,
}

#[derive(Serialize, Deserialize)]
struct DistributionFile {
    pmf: Vec<DegreeAtom>,
}

impl BiDegreeDistribution {
    pub fn new(entries: impl IntoIterator<Item = ((u32, u32), f64)>) -> Result<Self> {
        Self::with_degree_cap(entries, DEFAULT_DEGREE_CAP)
    }

    pub fn with_degree_cap(
        entries: impl IntoIterator<Item = ((u32, u32), f64)>,
        cap: u32,
    ) -> Result<Self> {
        let mut merged: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        for ((k, l), p) in entries {
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::validation(
                    format!("pmf[({k},{l})]"),
                    format!("probability {p} outside [0,1]"),
                ));
            }
            if k > cap || l > cap {
                return Err(Error::validation(
                    format!("pmf[({k},{l})]"),
                    format!("degree exceeds cap {cap}"),
                ));
            }
            *merged.entry((k, l)).or_insert(0.0) += p;
        }
        let atoms: Vec<DegreeAtom> = merged
            .into_iter()
            .filter(|&(_, p)| p > 0.0)
            .map(|((k, l), p)| DegreeAtom {
                in_deg: k,
                out_deg: l,
                p,
            })
            .collect();
        if atoms.is_empty() {
            return Err(Error::validation("pmf", "empty support"));
        }
        let total: f64 = atoms.iter().map(|a| a.p).sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::validation(
                "pmf",
                format!("probabilities sum to {total}, expected 1"),
            ));
        }
        Ok(Self { atoms })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: DistributionFile = serde_json::from_str(s)?;
        Self::new(
            file.pmf
                .into_iter()
                .map(|a| ((a.in_deg, a.out_deg), a.p)),
        )
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&DistributionFile {
            pmf: self.atoms.clone(),
        })
        .expect("distribution serializes")
    }

    pub fn atoms(&self) -> &[DegreeAtom] {
        &self.atoms
    }

    pub fn prob(&self, in_deg: u32, out_deg: u32) -> f64 {
        self.atoms
            .binary_search_by(|a| (a.in_deg, a.out_deg).cmp(&(in_deg, out_deg)))
            .map(|i| self.atoms[i].p)
            .unwrap_or(0.0)
    }

    pub fn mean_in(&self) -> f64 {
        self.atoms.iter().map(|a| a.in_deg as f64 * a.p).sum()
    }

    pub fn mean_out(&self) -> f64 {
        self.atoms.iter().map(|a| a.out_deg as f64 * a.p).sum()
    }

    /// λ, the mean degree (taken as the mean out-degree).
    pub fn lambda(&self) -> f64 {
        self.mean_out()
    }

    pub fn is_mean_balanced(&self) -> bool {
        (self.mean_in() - self.mean_out()).abs() <= MASS_TOL
    }

    pub fn min_in(&self) -> u32 {
        self.atoms.iter().map(|a| a.in_deg).min().unwrap_or(0)
    }

    pub fn max_in(&self) -> u32 {
        self.atoms.iter().map(|a| a.in_deg).max().unwrap_or(0)
    }

    pub fn min_out(&self) -> u32 {
        self.atoms.iter().map(|a| a.out_deg).min().unwrap_or(0)
    }

    pub fn max_out(&self) -> u32 {
        self.atoms.iter().map(|a| a.out_deg).max().unwrap_or(0)
    }

    pub fn tv_distance(&self, other: &Self) -> f64 {
        let mut diff: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        for a in &self.atoms {
            *diff.entry((a.in_deg, a.out_deg)).or_insert(0.0) += a.p;
        }
        for a in &other.atoms {
            *diff.entry((a.in_deg, a.out_deg)).or_insert(0.0) -= a.p;
        }
        0.5 * diff.values().map(|d| d.abs()).sum::<f64>()
    }
}

/// Concrete per-vertex degrees with matching head and tail totals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiDegreeSequence {
    degrees: Vec<(u32, u32)>,
    m: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub n: usize,
    pub m: u64,
    pub lambda: f64,
    pub min_in: u32,
    pub max_in: u32,
    pub min_out: u32,
    pub max_out: u32,
    /// δ⁺ ≥ 2, needed for a unique stationary distribution.
    pub unicity_regime: bool,
    pub within_cap: bool,
}

/// Checks head/tail balance (hard error) and flags δ⁺ and the degree cap.
pub fn validate_sequence(degrees: &[(u32, u32)], max_degree_cap: u32) -> Result<ValidationReport> {
    if degrees.is_empty() {
        return Err(Error::validation("degrees", "empty sequence"));
    }
    let heads: u64 = degrees.iter().map(|&(k, _)| k as u64).sum();
    let tails: u64 = degrees.iter().map(|&(_, l)| l as u64).sum();
    if heads != tails {
        return Err(Error::Balance {
            heads,
            tails,
            deficit: heads as i64 - tails as i64,
        });
    }
    let min_in = degrees.iter().map(|d| d.0).min().unwrap();
    let max_in = degrees.iter().map(|d| d.0).max().unwrap();
    let min_out = degrees.iter().map(|d| d.1).min().unwrap();
    let max_out = degrees.iter().map(|d| d.1).max().unwrap();
    Ok(ValidationReport {
        n: degrees.len(),
        m: heads,
        lambda: heads as f64 / degrees.len() as f64,
        min_in,
        max_in,
        min_out,
        max_out,
        unicity_regime: min_out >= 2,
        within_cap: max_in <= max_degree_cap && max_out <= max_degree_cap,
    })
}

impl BiDegreeSequence {
    pub fn new(degrees: Vec<(u32, u32)>) -> Result<Self> {
        let report = validate_sequence(&degrees, u32::MAX)?;
        Ok(Self {
            degrees,
            m: report.m,
        })
    }

    pub fn degrees(&self) -> &[(u32, u32)] {
        &self.degrees
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn lambda(&self) -> f64 {
        self.m as f64 / self.n() as f64
    }

    pub fn in_degree(&self, v: usize) -> u32 {
        self.degrees[v].0
    }

    pub fn out_degree(&self, v: usize) -> u32 {
        self.degrees[v].1
    }

    pub fn max_in(&self) -> u32 {
        self.degrees.iter().map(|d| d.0).max().unwrap_or(0)
    }

    pub fn max_out(&self) -> u32 {
        self.degrees.iter().map(|d| d.1).max().unwrap_or(0)
    }

    pub fn validate(&self, max_degree_cap: u32) -> Result<ValidationReport> {
        validate_sequence(&self.degrees, max_degree_cap)
    }

    /// Parses one `d_in d_out` pair per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut degrees = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut fields = Vec::with_capacity(2);
            for tok in line.split_whitespace() {
                let column = tok.as_ptr() as usize - line.as_ptr() as usize + 1;
                let value: u32 = tok.parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    column,
                    msg: format!("expected a non-negative integer, got {tok:?}"),
                })?;
                fields.push(value);
            }
            if fields.len() != 2 {
                return Err(Error::Parse {
                    line: lineno + 1,
                    column: 1,
                    msg: format!("expected 2 fields, got {}", fields.len()),
                });
            }
            degrees.push((fields[0], fields[1]));
        }
        Self::new(degrees)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.degrees.len() * 6);
        for &(k, l) in &self.degrees {
            writeln!(out, "{k} {l}").unwrap();
        }
        out
    }
}

/// Rounds `n·p(k,ℓ)` to counts, then repairs them deterministically until the
/// vertex total is `n` and head and tail totals agree.
///
/// Repair scans support pairs from the lexicographically largest down. Count
/// fixes add to or remove from the largest pairs; balance fixes move single
/// vertices between pairs, taking the move that shrinks the imbalance most.
pub fn realize_sequence(dist: &BiDegreeDistribution, n: usize) -> Result<BiDegreeSequence> {
    if n == 0 {
        return Err(Error::Argument("n must be at least 1".into()));
    }
    if !dist.is_mean_balanced() {
        return Err(Error::Realization(format!(
            "distribution is not mean-balanced (E[D-]={}, E[D+]={})",
            dist.mean_in(),
            dist.mean_out()
        )));
    }
    let atoms = dist.atoms();
    let mut counts: Vec<i64> = atoms
        .iter()
        .map(|a| (n as f64 * a.p).round() as i64)
        .collect();

    let mut excess: i64 = counts.iter().sum::<i64>() - n as i64;
    let mut idx = atoms.len();
    while excess != 0 {
        idx = if idx == 0 { atoms.len() - 1 } else { idx - 1 };
        if excess > 0 {
            if counts[idx] > 0 {
                counts[idx] -= 1;
                excess -= 1;
            }
        } else {
            counts[idx] += 1;
            excess += 1;
        }
    }

    let skew: Vec<i64> = atoms
        .iter()
        .map(|a| a.in_deg as i64 - a.out_deg as i64)
        .collect();
    let mut imbalance: i64 = counts.iter().zip(&skew).map(|(c, s)| c * s).sum();
    let max_moves = n + 1;
    let mut moves = 0;
    while imbalance != 0 {
        let mut best: Option<(i64, usize, usize)> = None;
        for src in (0..atoms.len()).rev() {
            if counts[src] == 0 {
                continue;
            }
            for dst in (0..atoms.len()).rev() {
                if dst == src {
                    continue;
                }
                let after = (imbalance + skew[dst] - skew[src]).abs();
                if after < imbalance.abs() && best.is_none_or(|(b, _, _)| after < b) {
                    best = Some((after, src, dst));
                }
            }
        }
        let Some((_, src, dst)) = best else {
            return Err(Error::Realization(format!(
                "no single-vertex move reduces head/tail imbalance {imbalance}"
            )));
        };
        counts[src] -= 1;
        counts[dst] += 1;
        imbalance += skew[dst] - skew[src];
        moves += 1;
        if moves > max_moves {
            return Err(Error::Realization("repair did not terminate".into()));
        }
    }

    let mut degrees = Vec::with_capacity(n);
    for (a, &c) in atoms.iter().zip(&counts) {
        degrees.extend(std::iter::repeat_n((a.in_deg, a.out_deg), c as usize));
    }
    BiDegreeSequence::new(degrees)
}

/// `n_{k,ℓ}/n` for every pair present in the sequence.
pub fn empirical_distribution(seq: &BiDegreeSequence) -> BiDegreeDistribution {
    let mut counts: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    for &d in seq.degrees() {
        *counts.entry(d).or_insert(0) += 1;
    }
    let n = seq.n() as f64;
    let atoms = counts
        .into_iter()
        .map(|((k, l), c)| DegreeAtom {
            in_deg: k,
            out_deg: l,
            p: c as f64 / n,
        })
        .collect();
    BiDegreeDistribution { atoms }
}

/// The four-atom example law: (0,2), (0,3), (5,2), (5,3), each with mass 1/4.
pub fn toy_distribution() -> BiDegreeDistribution {
    BiDegreeDistribution::new([
        ((0, 2), 0.25),
        ((0, 3), 0.25),
        ((5, 2), 0.25),
        ((5, 3), 0.25),
    ])
    .expect("toy law is valid")
}

/// In-degree 1 with probability (M-2)/(M-1), in-degree M otherwise, out-degree 2.
pub fn thin_tail_family(max_in: u32) -> Result<BiDegreeDistribution> {
    if max_in < 3 {
        return Err(Error::Argument("family needs M >= 3".into()));
    }
    let mm = max_in as f64;
    BiDegreeDistribution::new([
        ((1, 2), (mm - 2.0) / (mm - 1.0)),
        ((max_in, 2), 1.0 / (mm - 1.0)),
    ])
}

/// Poisson(r) in-degrees truncated at `cutoff` and renormalized, out-degree ≡ r.
pub fn truncated_poisson_out_regular(r: u32, cutoff: u32) -> Result<BiDegreeDistribution> {
    let rate = r as f64;
    let mut pmf = Vec::with_capacity(cutoff as usize + 1);
    let mut term = (-rate).exp();
    for k in 0..=cutoff {
        if k > 0 {
            term *= rate / k as f64;
        }
        pmf.push(term);
    }
    let total: f64 = pmf.iter().sum();
    BiDegreeDistribution::with_degree_cap(
        pmf.into_iter()
            .enumerate()
            .map(|(k, p)| ((k as u32, r), p / total)),
        cutoff.max(r),
    )
}
