//! Cramér rate function of `log ζ̃`, the trade-off `φ(a)` and its minimizer.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::bp::{self, BpParameters, MarkedOffspringLaw};
use crate::degree::BiDegreeDistribution;
use crate::error::{Error, Result};

const SOLVE_TOL: f64 = 1e-12;
const GRID_STEP: f64 = 1e-4;
const GOLDEN_TOL: f64 = 1e-9;
const ENDPOINT_SNAP: f64 = 1e-12;

/// A value in `[0, +∞]`-style extended reals. Infinity is tagged, never a sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::PosInf => None,
        }
    }

    /// Lossy view for comparisons and arithmetic.
    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => s.serialize_f64(*v),
            ExtReal::PosInf => s.serialize_str("inf"),
        }
    }
}

/// Finite law of `Z = log ζ̃`, atoms sorted by value.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteLogLaw {
    atoms: Vec<(f64, f64)>,
}

impl FiniteLogLaw {
    pub fn new(entries: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut atoms: Vec<(f64, f64)> = entries.into_iter().filter(|a| a.1 > 0.0).collect();
        if atoms.is_empty() {
            return Err(Error::validation("log law", "empty support"));
        }
        if atoms.iter().any(|a| !a.0.is_finite() || !a.1.is_finite()) {
            return Err(Error::validation("log law", "non-finite atom"));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        atoms.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::validation("log law", format!("sums to {total}")));
        }
        Ok(Self { atoms })
    }

    /// `Z = log ζ` for the marks of `eta`.
    pub fn from_marks(eta: &MarkedOffspringLaw) -> Result<Self> {
        if eta.min_mark() == 0 {
            return Err(Error::validation("marks", "zero mark has no logarithm"));
        }
        Self::new(
            eta.mark_marginal()
                .into_iter()
                .map(|(zeta, p)| ((zeta as f64).ln(), p)),
        )
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|(z, p)| z * p).sum()
    }

    pub fn min_value(&self) -> f64 {
        self.atoms[0].0
    }

    pub fn max_value(&self) -> f64 {
        self.atoms[self.atoms.len() - 1].0
    }

    /// Mean of the exponentially tilted law, i.e. the derivative of the cgf.
    fn tilted_mean(&self, lam: f64) -> f64 {
        let shift = self.shift(lam);
        let (mut num, mut den) = (0.0, 0.0);
        for &(z, p) in &self.atoms {
            let w = p * (lam * z - shift).exp();
            num += w * z;
            den += w;
        }
        num / den
    }

    fn shift(&self, lam: f64) -> f64 {
        self.atoms
            .iter()
            .map(|a| lam * a.0)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `log E[e^{λZ}]`, evaluated with a max-shift.
pub fn cumulant_gf(law: &FiniteLogLaw, lam: f64) -> f64 {
    let shift = law.shift(lam);
    let sum: f64 = law
        .atoms()
        .iter()
        .map(|&(z, p)| p * (lam * z - shift).exp())
        .sum();
    shift + sum.ln()
}

/// Legendre transform `I(z) = sup_λ {λz − Λ(λ)}`.
///
/// Outside the support hull the value is `+∞`; at an endpoint it is
/// `−log P{Z = endpoint}`; inside, the maximizing `λ` solves `Λ'(λ) = z`.
pub fn rate_function(law: &FiniteLogLaw, z: f64) -> ExtReal {
    let (lo_atom, hi_atom) = (law.atoms()[0], law.atoms()[law.atoms().len() - 1]);
    // Arguments computed as means (Ĥ⁻ of a point law) can miss an atom by a few ulps.
    let snap = ENDPOINT_SNAP * z.abs().max(1.0);
    let z = if (z - lo_atom.0).abs() <= snap {
        lo_atom.0
    } else if (z - hi_atom.0).abs() <= snap {
        hi_atom.0
    } else {
        z
    };
    if z < lo_atom.0 || z > hi_atom.0 {
        return ExtReal::PosInf;
    }
    if z == lo_atom.0 {
        return ExtReal::Finite(-lo_atom.1.ln());
    }
    if z == hi_atom.0 {
        return ExtReal::Finite(-hi_atom.1.ln());
    }
    let mut lo = -1.0;
    let mut hi = 1.0;
    while law.tilted_mean(lo) > z && lo > -1e300 {
        lo *= 2.0;
    }
    while law.tilted_mean(hi) < z && hi < 1e300 {
        hi *= 2.0;
    }
    let mut lam = 0.5 * (lo + hi);
    for _ in 0..400 {
        lam = 0.5 * (lo + hi);
        let m = law.tilted_mean(lam);
        if (m - z).abs() <= SOLVE_TOL * 1e-3 || hi - lo <= f64::EPSILON * lam.abs().max(1.0) {
            break;
        }
        if m < z {
            lo = lam;
        } else {
            hi = lam;
        }
    }
    ExtReal::Finite((lam * z - cumulant_gf(law, lam)).max(0.0))
}

/// Rate function of a Bernoulli(p) variable at `x`.
pub fn bernoulli_rate(x: f64, p: f64) -> ExtReal {
    if !(0.0..=1.0).contains(&x) {
        return ExtReal::PosInf;
    }
    let term = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * (a / b).ln() };
    ExtReal::Finite(term(x, p) + term(1.0 - x, 1.0 - p))
}

/// `φ(a) = (|log ν̂⁻| + I(a Ĥ⁻)) / a`; `+∞` when `ν̂⁻ = 0`.
pub fn phi(params: &BpParameters, law: &FiniteLogLaw, a: f64) -> ExtReal {
    let Some(h_hat) = params.h_hat else {
        return ExtReal::PosInf;
    };
    if params.nu_hat <= 0.0 || a <= 0.0 {
        return ExtReal::PosInf;
    }
    match rate_function(law, a * h_hat) {
        ExtReal::Finite(i) => ExtReal::Finite((params.nu_hat.ln().abs() + i) / a),
        ExtReal::PosInf => ExtReal::PosInf,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateSample {
    pub z: f64,
    #[serde(rename = "I")]
    pub rate: ExtReal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentReport {
    pub a0: Option<f64>,
    pub phi_a0: ExtReal,
    /// `1 + Ĥ⁻/φ(a₀)`, the predicted exponent of `1/π_min`.
    pub exponent: f64,
    pub rate_table: Vec<RateSample>,
    /// `ν̂⁻ = 0`: every in-neighbourhood grows and the exponent is 1.
    pub degenerate: bool,
    /// The rate function is finite at a single point, so `a₀ = 1`.
    pub point_domain: bool,
    pub a0_at_boundary: bool,
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    // The endpoints themselves are candidates: φ may jump to +∞ just past `hi`.
    [(lo, f(lo)), (hi, f(hi)), (c, fc), (d, fd)]
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
}

pub fn rate_table(law: &FiniteLogLaw, points: usize) -> Vec<RateSample> {
    let (lo, hi) = (law.min_value(), law.max_value());
    if points == 0 {
        return Vec::new();
    }
    if points == 1 || hi == lo {
        return vec![RateSample {
            z: law.mean(),
            rate: rate_function(law, law.mean()),
        }];
    }
    (0..points)
        .map(|i| {
            let z = if i + 1 == points {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (points - 1) as f64
            };
            RateSample {
                z,
                rate: rate_function(law, z),
            }
        })
        .collect()
}

/// Minimizes `φ` over `[1, log Δ⁺/Ĥ⁻]` and forms the exponent `1 + Ĥ⁻/φ(a₀)`.
pub fn minimize_phi(params: &BpParameters, law: &FiniteLogLaw, table_points: usize) -> Result<ExponentReport> {
    let table = rate_table(law, table_points);
    let Some(h_hat) = params.h_hat.filter(|_| params.nu_hat > 0.0) else {
        return Ok(ExponentReport {
            a0: None,
            phi_a0: ExtReal::PosInf,
            exponent: 1.0,
            rate_table: table,
            degenerate: true,
            point_domain: false,
            a0_at_boundary: false,
        });
    };
    if h_hat <= 0.0 {
        return Err(Error::Degenerate("subcritical entropy is zero".into()));
    }
    let a_max = law.max_value() / h_hat;
    if a_max < 1.0 - 1e-12 {
        return Err(Error::Degenerate(format!(
            "feasible interval [1, {a_max}] is empty"
        )));
    }
    let f = |a: f64| phi(params, law, a).as_f64();
    let (a0, phi_a0, point_domain) = if a_max - 1.0 <= 1e-12 || law.atoms().len() == 1 {
        (1.0, f(1.0), true)
    } else {
        let (mut best_a, mut best_f) = golden_section_min(f, 1.0, a_max, GOLDEN_TOL);
        // Grid sweep in case φ is not unimodal.
        let steps = ((a_max - 1.0) / GRID_STEP).ceil() as usize;
        let (mut grid_a, mut grid_f) = (1.0, f(1.0));
        for i in 1..=steps {
            let a = (1.0 + i as f64 * GRID_STEP).min(a_max);
            let v = f(a);
            if v < grid_f {
                grid_a = a;
                grid_f = v;
            }
        }
        if grid_f < best_f {
            let (a, v) = golden_section_min(
                f,
                (grid_a - GRID_STEP).max(1.0),
                (grid_a + GRID_STEP).min(a_max),
                GOLDEN_TOL,
            );
            if v < best_f {
                best_a = a;
                best_f = v;
            }
            if grid_f < best_f {
                best_a = grid_a;
                best_f = grid_f;
            }
        }
        (best_a, best_f, false)
    };
    if !phi_a0.is_finite() {
        return Err(Error::Numerical {
            msg: "phi is infinite on the whole feasible interval".into(),
            residual: f64::INFINITY,
        });
    }
    Ok(ExponentReport {
        a0: Some(a0),
        phi_a0: ExtReal::Finite(phi_a0),
        exponent: 1.0 + h_hat / phi_a0,
        rate_table: table,
        degenerate: false,
        point_domain,
        a0_at_boundary: !point_domain && ((a0 - 1.0).abs() < 1e-6 || (a_max - a0).abs() < 1e-6),
    })
}

/// Law of `log ζ̃` for a distribution, or `None` in the degenerate regime.
pub fn spine_log_law(dist: &BiDegreeDistribution, params: &BpParameters) -> Result<Option<FiniteLogLaw>> {
    if params.nu_hat <= 0.0 {
        return Ok(None);
    }
    let eta = bp::out_size_biased(dist)?;
    let tilde = bp::single_survivor_law(&eta, params.s_minus)?;
    Ok(Some(FiniteLogLaw::from_marks(&tilde)?))
}

/// Parameters plus exponent report for a distribution.
pub fn analyze(dist: &BiDegreeDistribution, table_points: usize) -> Result<(BpParameters, ExponentReport)> {
    let params = BpParameters::from_distribution(dist)?;
    let report = match spine_log_law(dist, &params)? {
        Some(law) => minimize_phi(&params, &law, table_points)?,
        None => ExponentReport {
            a0: None,
            phi_a0: ExtReal::PosInf,
            exponent: 1.0,
            rate_table: Vec::new(),
            degenerate: true,
            point_domain: false,
            a0_at_boundary: false,
        },
    };
    Ok((params, report))
}

/// Largest root in `(0,1)` of `1 − s = e^{−rs}`.
pub fn rout_survival(r: u32) -> f64 {
    let h = |s: f64| 1.0 - s - (-(r as f64) * s).exp();
    let (mut lo, mut hi) = (0.5, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `1 + log r / (s r − log r)` for the r-out digraph.
pub fn rout_exponent(r: u32) -> Result<f64> {
    if r < 2 {
        return Err(Error::Argument("r-out exponent needs r >= 2".into()));
    }
    let s = rout_survival(r);
    let lr = (r as f64).ln();
    Ok(1.0 + lr / (s * r as f64 - lr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::{thin_tail_family, toy_distribution};

    fn toy_law() -> FiniteLogLaw {
        FiniteLogLaw::new([(2f64.ln(), 0.4), (3f64.ln(), 0.6)]).unwrap()
    }

    #[test]
    fn point_law_endpoint_snaps() {
        let law = FiniteLogLaw::new([(2f64.ln(), 1.0)]).unwrap();
        let z = 2f64.ln() * (1.0 + 4.0 * f64::EPSILON);
        assert_eq!(rate_function(&law, z), ExtReal::Finite(0.0));
        assert_eq!(rate_function(&law, 2f64.ln() + 1e-6), ExtReal::PosInf);
    }

    #[test]
    fn cgf_examples() {
        let law = toy_law();
        assert_eq!(cumulant_gf(&law, 0.0), 0.0);
        let point = FiniteLogLaw::new([(2f64.ln(), 1.0)]).unwrap();
        assert!((cumulant_gf(&point, 1.0) - 2f64.ln()).abs() < 1e-15);
        assert!((cumulant_gf(&law, 1.0) - 2.6f64.ln()).abs() < 1e-15);
        assert!(cumulant_gf(&law, 800.0).is_finite());
    }

    #[test]
    fn rate_examples() {
        let law = toy_law();
        assert!(rate_function(&law, law.mean()).as_f64() < 1e-12);
        assert_eq!(rate_function(&law, 3.5f64.ln()), ExtReal::PosInf);
        assert_eq!(rate_function(&law, 1.9f64.ln()), ExtReal::PosInf);
        assert!((rate_function(&law, 3f64.ln()).as_f64() + 0.6f64.ln()).abs() < 1e-15);
        let z = 1.0;
        let x = (z - 2f64.ln()) / 1.5f64.ln();
        let closed = bernoulli_rate(x, 0.6).as_f64();
        assert!((rate_function(&law, z).as_f64() - closed).abs() < 1e-9);
    }

    #[test]
    fn phi_examples() {
        let (params, report) = analyze(&toy_distribution(), 11).unwrap();
        let law = spine_log_law(&toy_distribution(), &params).unwrap().unwrap();
        let at_one = phi(&params, &law, 1.0).as_f64();
        assert!((at_one - params.nu_hat.ln().abs()).abs() < 1e-9);
        assert!((report.a0.unwrap() - 1.06671).abs() < 1e-5);
        assert!((report.phi_a0.as_f64() - 1.65129).abs() < 1e-5);
        assert!((report.exponent - 1.56708).abs() < 1e-5);
        assert_eq!(report.rate_table.len(), 11);

        let fam = thin_tail_family(10).unwrap();
        let (params, report) = analyze(&fam, 5).unwrap();
        let law = spine_log_law(&fam, &params).unwrap().unwrap();
        assert_eq!(phi(&params, &law, 1.2), ExtReal::PosInf);
        assert_eq!(report.a0, Some(1.0));
        assert!(report.point_domain);
    }

    #[test]
    fn degenerate_regime() {
        let d = BiDegreeDistribution::new([((2, 2), 0.5), ((3, 3), 0.5)]).unwrap();
        let (params, report) = analyze(&d, 5).unwrap();
        assert_eq!(params.nu_hat, 0.0);
        assert_eq!(report.exponent, 1.0);
        assert!(report.degenerate);
    }

    #[test]
    fn rout_values() {
        assert!((rout_survival(2) - 0.79681).abs() < 1e-5);
        assert!((rout_exponent(2).unwrap() - 1.7697).abs() < 1e-4);
        let values: Vec<f64> = (2..=10).map(|r| rout_exponent(r).unwrap()).collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]));
        assert!(rout_exponent(1).is_err());
    }

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, fx) = golden_section_min(|x| (x - 0.3) * (x - 0.3) + 1.0, -2.0, 5.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-6 && (fx - 1.0).abs() < 1e-12);
    }
}
