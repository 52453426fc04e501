//! Majorization between real vectors.
//!
//! `v` is majorized by `u` (written `v ≺ u`) when, after sorting both in
//! non-increasing order, every partial sum of `v` is at most the matching
//! partial sum of `u` and the two totals agree. The partial-sum test in
//! [`majorizes`] is the source of truth; [`hlp_check`] is a sampled
//! convex-function cross-check that can only ever refute.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Default absolute tolerance, scaled by `max(1, |prefix sum|)` per comparison.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Finite tuple of reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RealVector(Vec<f64>);

impl RealVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(index) = entries.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(entries))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn sum(&self) -> f64 {
        pairwise_sum(&self.0)
    }
}

impl TryFrom<Vec<f64>> for RealVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<RealVector> for Vec<f64> {
    fn from(v: RealVector) -> Self {
        v.0
    }
}

impl AsRef<[f64]> for RealVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl<'a> IntoIterator for &'a RealVector {
    type Item = &'a f64;
    type IntoIter = std::slice::Iter<'a, f64>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Accepts a JSON array of numbers (`[7, 2]`) or decimal values separated
/// by commas and/or whitespace (`7,2`, `7 2`).
impl FromStr for RealVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        let body = match trimmed.strip_prefix('[') {
            Some(rest) => rest
                .strip_suffix(']')
                .ok_or_else(|| Error::Parse("unterminated JSON array".into()))?,
            None => trimmed,
        };
        let entries = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|tok| !tok.is_empty())
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("not a number: {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }
}

impl fmt::Display for RealVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// Pairwise (cascade) summation; error grows as O(log n) rather than O(n).
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Verdict of the partial-sum majorization test, with witnesses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorizationReport {
    pub holds: bool,
    /// k-th entry: sum of k largest of `u` minus sum of k largest of `v`.
    pub prefix_margins: Vec<f64>,
    /// Smallest violating k (1-based).
    pub failing_k: Option<usize>,
    pub total_sum_gap: f64,
}

/// Stable non-increasing sort.
pub fn sort_descending(v: &RealVector) -> Result<RealVector> {
    if v.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut out = v.0.clone();
    // sort_by is stable; total_cmp is safe since entries are finite
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(RealVector(out))
}

fn check_pair(u: &RealVector, v: &RealVector) -> Result<()> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    if u.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(())
}

/// Tests whether `v ≺ u`.
///
/// Comparisons at step k use `tol * max(1, |Σu_k|, |Σv_k|)`. For `n = 1`
/// this reduces to `|u₁ − v₁| ≤ tol·max(1, |u₁|, |v₁|)`.
pub fn majorizes(u: &RealVector, v: &RealVector, tol: f64) -> Result<MajorizationReport> {
    check_pair(u, v)?;
    check_tol(tol)?;
    let su = sort_descending(u)?;
    let sv = sort_descending(v)?;
    let n = su.len();

    let mut prefix_margins = Vec::with_capacity(n);
    let mut failing_k = None;
    let (mut pu, mut pv) = (0.0_f64, 0.0_f64);
    for k in 1..=n {
        pu += su.0[k - 1];
        pv += sv.0[k - 1];
        let margin = pu - pv;
        let scaled = tol * pu.abs().max(pv.abs()).max(1.0);
        let ok = if k < n {
            margin >= -scaled
        } else {
            margin.abs() <= scaled
        };
        if !ok && failing_k.is_none() {
            failing_k = Some(k);
        }
        prefix_margins.push(margin);
    }

    Ok(MajorizationReport {
        holds: failing_k.is_none(),
        total_sum_gap: u.sum() - v.sum(),
        prefix_margins,
        failing_k,
    })
}

/// Sampled Hardy–Littlewood–Pólya test over the hinge family
/// `φ_a(s) = max(s − a, 0)`, one function per knot.
///
/// Necessary for `v ≺ u`, never sufficient on its own: it does not see the
/// total-sum equality and only probes the supplied knots.
pub fn hlp_check(u: &RealVector, v: &RealVector, knots: &[f64], tol: f64) -> Result<bool> {
    check_pair(u, v)?;
    check_tol(tol)?;
    if knots.is_empty() {
        return Err(Error::InvalidArgument("knots must be nonempty".into()));
    }
    let hinge_sum = |xs: &RealVector, a: f64| -> f64 {
        let terms: Vec<f64> = xs.iter().map(|&s| (s - a).max(0.0)).collect();
        pairwise_sum(&terms)
    };
    Ok(knots.iter().all(|&a| {
        let lhs = hinge_sum(v, a);
        let rhs = hinge_sum(u, a);
        lhs <= rhs + tol * rhs.abs().max(1.0)
    }))
}

/// Replaces `(x[i], x[j])` by `(λx[i] + (1−λ)x[j], (1−λ)x[i] + λx[j])`.
pub fn t_transform(x: &mut [f64], i: usize, j: usize, lambda: f64) {
    let (a, b) = (x[i], x[j]);
    x[i] = lambda * a + (1.0 - lambda) * b;
    x[j] = (1.0 - lambda) * a + lambda * b;
}

/// Sampling interval for generated entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntryRange {
    lo: f64,
    hi: f64,
}

impl EntryRange {
    /// Range inside the theorem's domain: requires `lo ≥ 1`.
    pub fn theorem(lo: f64, hi: f64) -> Result<Self> {
        if !(lo >= 1.0) {
            return Err(domain(format!("entries must be >= 1, got lo = {lo}")));
        }
        Self::any(lo, hi)
    }

    /// Any finite interval; for exercising [`majorizes`] on its own.
    pub fn any(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::InvalidArgument(format!(
                "need finite hi > lo, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }
}

/// Draws `u` uniformly from `[lo, hi]ⁿ` and derives `v ≺ u` by
/// `num_transforms` random T-transforms. Deterministic in `seed`.
pub fn random_majorization_pair(
    n: usize,
    num_transforms: usize,
    range: EntryRange,
    seed: u64,
) -> Result<(RealVector, RealVector)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_majorization_pair_with(&mut rng, n, num_transforms, range)
}

/// Same as [`random_majorization_pair`] but drawing from a caller-owned RNG.
pub fn random_majorization_pair_with<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    num_transforms: usize,
    range: EntryRange,
) -> Result<(RealVector, RealVector)> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let u: Vec<f64> = (0..n).map(|_| rng.gen_range(range.lo..=range.hi)).collect();
    let mut v = u.clone();
    if n >= 2 {
        for _ in 0..num_transforms {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let lambda: f64 = rng.gen_range(0.0..=1.0);
            t_transform(&mut v, i, j, lambda);
        }
    }
    // convex combinations can round a hair below lo
    for x in &mut v {
        *x = x.max(range.lo);
    }
    Ok((RealVector(u), RealVector(v)))
}
