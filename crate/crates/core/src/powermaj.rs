//! Power sums and power majorization.
//!
//! `y` is power majorized by `x` when `Σxᵢᵖ ≥ Σyᵢᵖ` for every `p ≥ 1` and
//! `Σxᵢᵖ ≤ Σyᵢᵖ` for every `0 < p < 1`. Only a finite set of exponents can
//! be checked, so [`power_majorizes`] samples an [`ExponentGrid`], refines
//! around near-zero margins, and labels its verdict as grid-verified.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::vectors::{pairwise_sum, RealVector};

pub const DEFAULT_P_MAX: f64 = 64.0;
pub const DEFAULT_REFINEMENT_DEPTH: u32 = 20;
const LOW_POINTS: usize = 50;
const HIGH_POINTS: usize = 100;
/// Half-width of the window around `p = 1` where refinement is suppressed;
/// the margin vanishes there whenever the totals agree.
pub const UNIT_WINDOW: f64 = 1e-3;
/// Label attached to every serialized verdict.
pub const VERDICT_SCOPE: &str = "verified on grid";

/// Sampled exponents for the power-majorization test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentGrid {
    points: Vec<f64>,
    p_max: f64,
    refinement_depth: u32,
}

impl ExponentGrid {
    /// Validates: strictly increasing positive points, containing `1`, with
    /// at least one point in `(0, 1)` and all points `≤ p_max`.
    pub fn new(points: Vec<f64>, p_max: f64, refinement_depth: u32) -> Result<Self> {
        if points.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::InvalidArgument(
                "grid points must be positive and finite".into(),
            ));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "grid points must be strictly increasing".into(),
            ));
        }
        if !points.contains(&1.0) {
            return Err(Error::InvalidArgument("grid must contain p = 1".into()));
        }
        if !points.iter().any(|&p| p < 1.0) {
            return Err(Error::InvalidArgument("grid has no point in (0, 1)".into()));
        }
        if points.last().is_some_and(|&p| p > p_max) {
            return Err(Error::InvalidArgument("grid point exceeds p_max".into()));
        }
        Ok(Self {
            points,
            p_max,
            refinement_depth,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn refinement_depth(&self) -> u32 {
        self.refinement_depth
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn log_spaced(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let last = count - 1;
    (0..count).map(move |k| match k {
        0 => lo,
        k if k == last => hi,
        k => (a + (b - a) * k as f64 / last as f64).exp(),
    })
}

/// 50 log-spaced points in `[0.01, 0.99]`, then `1`, then 100 log-spaced
/// points in `[1.01, p_max]`.
pub fn default_grid(p_max: f64) -> Result<ExponentGrid> {
    if !(p_max > 1.0 && p_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "p_max must exceed 1, got {p_max}"
        )));
    }
    let high_lo = 1.01_f64.min(1.0 + (p_max - 1.0) / HIGH_POINTS as f64);
    let points: Vec<f64> = log_spaced(0.01, 0.99, LOW_POINTS)
        .chain(std::iter::once(1.0))
        .chain(log_spaced(high_lo, p_max, HIGH_POINTS))
        .collect();
    ExponentGrid::new(points, p_max, DEFAULT_REFINEMENT_DEPTH)
}

fn check_positive(x: &RealVector) -> Result<()> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(bad) = x.iter().find(|&&v| !(v > 0.0)) {
        return Err(domain(format!(
            "power sums need positive entries, got {bad}"
        )));
    }
    Ok(())
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(domain(format!("exponent must be positive, got {p}")));
    }
    Ok(())
}

/// `Σ xᵢᵖ` with pairwise summation.
pub fn power_sum(x: &RealVector, p: f64) -> Result<f64> {
    check_positive(x)?;
    check_exponent(p)?;
    Ok(power_sum_unchecked(x.as_slice(), p))
}

fn power_sum_unchecked(x: &[f64], p: f64) -> f64 {
    let terms: Vec<f64> = x.iter().map(|&v| v.powf(p)).collect();
    pairwise_sum(&terms)
}

/// `D(p) = Σxᵢᵖ − Σyᵢᵖ`.
pub fn margin(x: &RealVector, y: &RealVector, p: f64) -> Result<f64> {
    check_same_len(x, y)?;
    Ok(power_sum(x, p)? - power_sum(y, p)?)
}

fn check_same_len(x: &RealVector, y: &RealVector) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(())
}

/// Verdict of [`power_majorizes`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerMajorizationReport {
    pub holds: bool,
    /// Minimum of `D(p)` over sampled `p ≥ 1`.
    pub min_margin_high: f64,
    /// Maximum of `D(p)` over sampled `p ∈ (0, 1)`.
    pub max_margin_low: f64,
    pub violating_p: Option<f64>,
    pub sum_gap_at_1: f64,
    /// Number of exponents evaluated, refinement included.
    pub grid_size: usize,
    pub refined: bool,
    /// `D` was increasing over the last three grid points while `max x > max y`,
    /// so growth beyond `p_max` is the expected continuation.
    pub extrapolation_flag: bool,
    pub scope: String,
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    p: f64,
    d: f64,
    /// `tol · max(1, Σxᵢᵖ)`
    allowance: f64,
}

impl Sample {
    fn violates(&self) -> bool {
        if self.p >= 1.0 {
            self.d < -self.allowance
        } else {
            self.d > self.allowance
        }
    }

    fn near_zero(&self) -> bool {
        self.d.abs() <= 10.0 * self.allowance && (self.p - 1.0).abs() > UNIT_WINDOW
    }

    fn normalized(&self) -> f64 {
        self.d.abs() / self.allowance
    }
}

struct Evaluator<'a> {
    x: &'a [f64],
    y: &'a [f64],
    tol: f64,
}

impl Evaluator<'_> {
    fn sample(&self, p: f64) -> Result<Sample> {
        let sx = power_sum_unchecked(self.x, p);
        let sy = power_sum_unchecked(self.y, p);
        if !(sx.is_finite() && sy.is_finite()) {
            return Err(domain(format!("power sum overflows at p = {p}")));
        }
        Ok(Sample {
            p,
            d: sx - sy,
            allowance: self.tol * sx.max(1.0),
        })
    }

    /// Bisects between a flagged exponent and its neighbour, each time
    /// keeping the half whose retained endpoint has the smaller normalized
    /// margin, so the search homes in on a possible sign change.
    fn refine(
        &self,
        start: Sample,
        neighbour: Sample,
        depth: u32,
        out: &mut Vec<Sample>,
    ) -> Result<()> {
        let (mut a, mut b) = (start, neighbour);
        for _ in 0..depth {
            let mid = 0.5 * (a.p + b.p);
            if (mid - 1.0).abs() <= UNIT_WINDOW || mid == a.p || mid == b.p {
                break;
            }
            let m = self.sample(mid)?;
            out.push(m);
            if m.violates() {
                break;
            }
            let keep = if a.normalized() <= b.normalized() {
                a
            } else {
                b
            };
            a = keep;
            b = m;
        }
        Ok(())
    }
}

/// Tests whether `y` is power majorized by `x` on `grid`.
///
/// Margins are compared against `tol · max(1, Σxᵢᵖ)`. Any grid point whose
/// margin is within ten allowances of zero (outside `|p − 1| ≤ 1e−3`) is
/// refined by bisection toward both neighbours, up to the grid's depth.
pub fn power_majorizes(
    x: &RealVector,
    y: &RealVector,
    grid: &ExponentGrid,
    tol: f64,
) -> Result<PowerMajorizationReport> {
    check_same_len(x, y)?;
    check_positive(x)?;
    check_positive(y)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let eval = Evaluator {
        x: x.as_slice(),
        y: y.as_slice(),
        tol,
    };

    let base = grid
        .points
        .iter()
        .map(|&p| eval.sample(p))
        .collect::<Result<Vec<_>>>()?;

    let mut extra = Vec::new();
    for (i, s) in base.iter().enumerate() {
        if !s.near_zero() {
            continue;
        }
        if i > 0 {
            eval.refine(*s, base[i - 1], grid.refinement_depth, &mut extra)?;
        }
        if i + 1 < base.len() {
            eval.refine(*s, base[i + 1], grid.refinement_depth, &mut extra)?;
        }
    }
    let refined = !extra.is_empty();

    let mut all: Vec<Sample> = base.iter().chain(&extra).copied().collect();
    all.sort_by(|a, b| a.p.total_cmp(&b.p));

    let mut min_high = f64::INFINITY;
    let mut max_low = f64::NEG_INFINITY;
    for s in &all {
        if s.p >= 1.0 {
            min_high = min_high.min(s.d);
        } else {
            max_low = max_low.max(s.d);
        }
    }
    let violating_p = all
        .iter()
        .filter(|s| s.p >= 1.0)
        .chain(all.iter().filter(|s| s.p < 1.0))
        .find(|s| s.violates())
        .map(|s| s.p);

    let high: Vec<&Sample> = base.iter().filter(|s| s.p > 1.0).collect();
    let max_x = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let max_y = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let extrapolation_flag = max_x > max_y
        && high.len() >= 3
        && high[high.len() - 3..].windows(2).all(|w| w[1].d > w[0].d);

    let sum_gap_at_1 = eval.sample(1.0)?.d;

    Ok(PowerMajorizationReport {
        holds: violating_p.is_none(),
        min_margin_high: min_high,
        max_margin_low: max_low,
        violating_p,
        sum_gap_at_1,
        grid_size: all.len(),
        refined,
        extrapolation_flag,
        scope: VERDICT_SCOPE.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfact::{roots, QuadraticFactorization};

    fn rv(xs: &[f64]) -> RealVector {
        RealVector::new(xs.to_vec()).unwrap()
    }

    fn klemes() -> (RealVector, RealVector) {
        let x = roots(&QuadraticFactorization::from_slice(&[3.5, 1.0]).unwrap());
        let y = roots(&QuadraticFactorization::from_slice(&[3.0, 1.5]).unwrap());
        (x, y)
    }

    #[test]
    fn power_sum_examples() {
        for p in [0.1, 1.0, 3.7] {
            assert_eq!(power_sum(&rv(&[1.0; 4]), p).unwrap(), 4.0);
        }
        let x = rv(&[6.8541, 1.0, 1.0, 0.1459]);
        assert!((power_sum(&x, 1.0).unwrap() - 9.0).abs() < 1e-4);
        assert_eq!(power_sum(&rv(&[2.0, 3.0]), 2.0).unwrap(), 13.0);
    }

    #[test]
    fn power_sum_domain() {
        assert!(matches!(
            power_sum(&rv(&[1.0, 0.0]), 2.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            power_sum(&rv(&[1.0, -1.0]), 2.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(power_sum(&rv(&[1.0]), 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn margin_examples() {
        let (x, y) = klemes();
        for p in [0.2, 1.0, 5.0] {
            assert_eq!(margin(&x, &x, p).unwrap(), 0.0);
        }
        assert!(margin(&x, &y, 1.0).unwrap().abs() < 1e-9);
        // Σx² − Σy² = 8 exactly (frozen from a high-precision oracle)
        assert!((margin(&x, &y, 2.0).unwrap() - 8.0).abs() < 1e-9);
        assert!(matches!(
            margin(&x, &rv(&[1.0]), 1.0),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn default_grid_shape() {
        let g = default_grid(64.0).unwrap();
        assert_eq!(g.len(), 151);
        assert!(g.points().contains(&1.0));
        assert!(g.points().windows(2).all(|w| w[0] < w[1]));
        assert!(g.points().iter().all(|&p| p > 0.0));
        assert_eq!(g.points()[0], 0.01);
        assert_eq!(g.points()[49], 0.99);
        assert_eq!(g.points()[51], 1.01);
        assert_eq!(*g.points().last().unwrap(), 64.0);
        assert_eq!(g.refinement_depth(), 20);
        assert!(default_grid(1.0).is_err());
        assert!(default_grid(1.005).is_ok());
    }

    #[test]
    fn grid_validation() {
        assert!(ExponentGrid::new(vec![0.5, 1.0, 2.0], 2.0, 0).is_ok());
        assert!(ExponentGrid::new(vec![0.5, 2.0], 2.0, 0).is_err());
        assert!(ExponentGrid::new(vec![1.0, 2.0], 2.0, 0).is_err());
        assert!(ExponentGrid::new(vec![0.5, 1.0, 1.0, 2.0], 2.0, 0).is_err());
        assert!(ExponentGrid::new(vec![0.5, 1.0, 3.0], 2.0, 0).is_err());
    }

    #[test]
    fn klemes_power_majorized() {
        let (x, y) = klemes();
        let r = power_majorizes(&x, &y, &default_grid(64.0).unwrap(), 1e-9).unwrap();
        assert!(r.holds, "{r:?}");
        assert!(r.min_margin_high >= -1e-9);
        assert!(r.max_margin_low <= 1e-9);
        assert!(r.sum_gap_at_1.abs() <= 1e-9);
        assert!(r.extrapolation_flag);
        assert_eq!(r.scope, VERDICT_SCOPE);
    }

    #[test]
    fn identical_vectors_hold_with_zero_margins() {
        let (x, _) = klemes();
        let r = power_majorizes(&x, &x, &default_grid(64.0).unwrap(), 1e-9).unwrap();
        assert!(r.holds);
        assert_eq!(r.min_margin_high, 0.0);
        assert_eq!(r.max_margin_low, 0.0);
        assert!(r.refined);
    }

    #[test]
    fn reversed_roles_violate_above_one() {
        let (x, y) = klemes();
        let r = power_majorizes(&y, &x, &default_grid(64.0).unwrap(), 1e-9).unwrap();
        assert!(!r.holds);
        assert!(r.violating_p.unwrap() > 1.0);
    }

    #[test]
    fn power_majorizes_errors() {
        let g = default_grid(64.0).unwrap();
        assert!(matches!(
            power_majorizes(&rv(&[1.0, 2.0]), &rv(&[1.0]), &g, 1e-9),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            power_majorizes(&rv(&[1.0]), &rv(&[-1.0]), &g, 1e-9),
            Err(Error::Domain(_))
        ));
        assert!(power_majorizes(&rv(&[1e300]), &rv(&[1.0]), &g, 1e-9).is_err());
    }

    #[test]
    fn continuity_at_one() {
        let (x, y) = klemes();
        for p in [1.0 - 1e-6, 1.0 + 1e-6] {
            assert!(margin(&x, &y, p).unwrap().abs() <= 1e-4);
        }
    }
}
