//! Palindromic-quadratic factorizations `P(t) = ∏ (t² − 2uᵢt + 1)`.
//!
//! With every `uᵢ ≥ 1` each factor has the real reciprocal roots
//! `uᵢ ± √(uᵢ² − 1)`, so `P` is hyperbolic, palindromic and has only
//! positive roots. [`recover_factorization`] inverts [`expand`] for exactly
//! that class and rejects everything else.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::vectors::RealVector;

/// Relative tolerance for the palindrome test in [`recover_factorization`].
pub const PALINDROME_TOL: f64 = 1e-9;

const NEWTON_MAX_ITER: usize = 1000;
const NOISE_SAFETY: f64 = 8.0;
const ABERTH_MAX_ITER: usize = 500;

/// The `u` parameters of `∏ (t² − 2uᵢt + 1)`, each `≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RealVector", into = "RealVector")]
pub struct QuadraticFactorization {
    u: RealVector,
}

impl QuadraticFactorization {
    pub fn new(u: RealVector) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(bad) = u.iter().find(|&&x| x < 1.0) {
            return Err(domain(format!(
                "factor parameter {bad} < 1 gives complex roots"
            )));
        }
        Ok(Self { u })
    }

    pub fn from_slice(u: &[f64]) -> Result<Self> {
        Self::new(RealVector::new(u.to_vec())?)
    }

    pub fn u(&self) -> &RealVector {
        &self.u
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Degree of the expanded polynomial, `2n`.
    pub fn degree(&self) -> usize {
        2 * self.u.len()
    }
}

impl TryFrom<RealVector> for QuadraticFactorization {
    type Error = Error;

    fn try_from(u: RealVector) -> Result<Self> {
        Self::new(u)
    }
}

impl From<QuadraticFactorization> for RealVector {
    fn from(f: QuadraticFactorization) -> Self {
        f.u
    }
}

/// Monic real polynomial, coefficients in descending degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PolynomialCoefficients {
    coeffs: Vec<f64>,
}

impl PolynomialCoefficients {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        match coeffs.first() {
            None => return Err(Error::EmptyInput),
            Some(&lead) if lead != 1.0 => {
                return Err(Error::InvalidArgument(format!(
                    "polynomial must be monic, leading coefficient is {lead}"
                )))
            }
            _ => {}
        }
        if let Some(index) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `coeffs[k]` matches `coeffs[deg − k]` within `rel_tol·max(1, |·|)`.
    pub fn is_palindromic(&self, rel_tol: f64) -> bool {
        let c = &self.coeffs;
        let d = c.len() - 1;
        (0..=d / 2).all(|k| {
            let (a, b) = (c[k], c[d - k]);
            (a - b).abs() <= rel_tol * a.abs().max(b.abs()).max(1.0)
        })
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        horner(&self.coeffs, t)
    }
}

impl TryFrom<Vec<f64>> for PolynomialCoefficients {
    type Error = Error;

    fn try_from(c: Vec<f64>) -> Result<Self> {
        Self::new(c)
    }
}

impl From<PolynomialCoefficients> for Vec<f64> {
    fn from(p: PolynomialCoefficients) -> Self {
        p.coeffs
    }
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * t + c)
}

/// Value and first derivative in one Horner pass.
fn horner_with_derivative(coeffs: &[f64], t: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &c in coeffs {
        dp = dp * t + p;
        p = p * t + c;
    }
    (p, dp)
}

/// Horner evaluation of `p` at `t`.
pub fn evaluate(p: &PolynomialCoefficients, t: f64) -> f64 {
    p.evaluate(t)
}

/// Multiplies out `∏ (t² − 2uᵢt + 1)`.
pub fn expand(f: &QuadraticFactorization) -> PolynomialCoefficients {
    PolynomialCoefficients {
        coeffs: expand_slice(f.u.as_slice()),
    }
}

fn expand_slice(us: &[f64]) -> Vec<f64> {
    let mut c = vec![1.0];
    for &u in us {
        let mut next = vec![0.0; c.len() + 2];
        for (k, &ck) in c.iter().enumerate() {
            next[k] += ck;
            next[k + 1] -= 2.0 * u * ck;
            next[k + 2] += ck;
        }
        c = next;
    }
    c
}

/// `(u + √(u²−1), u − √(u²−1))`, the second computed as the reciprocal of
/// the first to avoid cancellation for large `u`.
pub fn root_pair(u: f64) -> (f64, f64) {
    let s = ((u - 1.0) * (u + 1.0)).max(0.0).sqrt();
    let big = u + s;
    (big, 1.0 / big)
}

/// All `2n` roots, one `(larger, smaller)` pair per factor, in factor order.
pub fn roots(f: &QuadraticFactorization) -> RealVector {
    let out: Vec<f64> =
        f.u.iter()
            .flat_map(|&u| {
                let (a, b) = root_pair(u);
                [a, b]
            })
            .collect();
    RealVector::new(out).expect("roots of u >= 1 are finite")
}

/// Quotient of a palindromic polynomial by `t² − 2ut + 1`.
///
/// The quotient is palindromic too. Only its upper half comes from the
/// division recurrence, whose error grows like `rᵏ` for the larger root `r`;
/// the lower half is the mirror image.
fn deflate_palindromic(c: &[f64], u: f64) -> Vec<f64> {
    let d = c.len() - 1;
    let qd = d - 2;
    let mut q = vec![0.0; qd + 1];
    for k in 0..=qd / 2 {
        let mut v = c[k];
        if k >= 1 {
            v += 2.0 * u * q[k - 1];
        }
        if k >= 2 {
            v -= q[k - 2];
        }
        q[k] = v;
    }
    for k in 0..qd / 2 {
        q[qd - k] = q[k];
    }
    q
}

/// `Σ |cₖ| |t|ᵏ`
fn horner_abs(c: &[f64], t: f64) -> f64 {
    c.iter().fold(0.0, |acc, &x| acc * t.abs() + x.abs())
}

/// Running-error bound for Horner evaluation of `c` at `t`.
fn horner_noise(c: &[f64], t: f64) -> f64 {
    2.0 * c.len() as f64 * f64::EPSILON * horner_abs(c, t)
}

fn vanishes(c: &[f64], t: f64) -> bool {
    horner(c, t).abs() <= NOISE_SAFETY * horner_noise(c, t)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    let d = c.len() - 1;
    c[..d]
        .iter()
        .enumerate()
        .map(|(k, &x)| x * (d - k) as f64)
        .collect()
}

/// Largest real root of a polynomial with positive leading coefficient, by
/// Newton iteration started at the Cauchy bound. For real-rooted input the
/// iterates decrease monotonically onto the root; if roundoff pushes an
/// iterate past it, the bracket `[t, last t with p > 0]` is finished by
/// bisection.
fn largest_root(c: &[f64]) -> Option<f64> {
    let lead = c[0];
    let bound = 1.0 + c[1..].iter().fold(0.0_f64, |m, x| m.max((x / lead).abs()));
    let mut hi = bound;
    let mut t = bound;
    for _ in 0..NEWTON_MAX_ITER {
        let (p, dp) = horner_with_derivative(c, t);
        if p < 0.0 {
            return Some(bisect(c, t, hi));
        }
        if p <= horner_noise(c, t) {
            return Some(t);
        }
        if dp <= 0.0 {
            // p > 0 with p' <= 0 cannot happen right of the largest root of a
            // real-rooted polynomial
            return if vanishes(c, t) { Some(t) } else { None };
        }
        hi = t;
        let step = p / dp;
        if step <= f64::EPSILON * t.abs().max(1.0) {
            return Some(t);
        }
        t -= step;
    }
    Some(t)
}

/// Largest real root and its multiplicity `m`.
///
/// A root of multiplicity `m` of a real-rooted polynomial is the largest and
/// simple root of the `(m−1)`-th derivative, where Newton converges
/// quadratically; the cascade stops at the first derivative order whose
/// largest root is not a common root of all lower orders.
fn largest_root_with_multiplicity(c: &[f64]) -> Option<(f64, usize)> {
    let mut best = (largest_root(c)?, 1);
    let mut chain = vec![c.to_vec()];
    while chain.len() < c.len() - 1 {
        let next = derivative(chain.last().expect("nonempty"));
        let Some(r) = largest_root(&next) else { break };
        if !chain.iter().all(|q| vanishes(q, r)) {
            break;
        }
        chain.push(next);
        best = (r, chain.len());
    }
    Some(best)
}

/// Bisection on `[lo, hi]` with `p(lo) < 0 < p(hi)`.
fn bisect(c: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if horner(c, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Largest coefficient mismatch of `expand(us)` against `c`.
fn mismatch(c: &[f64], us: &[f64]) -> f64 {
    expand_slice(us)
        .iter()
        .zip(c)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Stops an iteration once its largest relative step reaches rounding
/// level, or once small steps have stopped improving (noise-level
/// wandering). Large steps never count as stalling: the global phase from
/// a far start is not monotone.
#[derive(Default)]
struct Stall {
    best: Option<f64>,
    idle: usize,
}

impl Stall {
    fn converged(&mut self, moved: f64) -> bool {
        if moved <= f64::EPSILON {
            return true;
        }
        match self.best {
            Some(best) if moved >= best && moved < 1e-8 => self.idle += 1,
            Some(best) if moved >= best => {}
            _ => {
                self.best = Some(moved);
                self.idle = 0;
            }
        }
        self.idle >= 8
    }
}

/// Simultaneous Aberth–Ehrlich iteration for all roots of `c` from the
/// estimates `z`.
///
/// Newton on one root of a cluster crawls; the Aberth correction repels the
/// neighbours, so every estimate converges to its own root. Working on `c`
/// itself avoids the error a deflated or reduced polynomial would add.
fn aberth(c: &[f64], mut z: Vec<Complex64>) -> Vec<Complex64> {
    let eval = |t: Complex64| {
        let mut p = Complex64::new(c[0], 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &a in &c[1..] {
            dp = dp * t + p;
            p = p * t + a;
        }
        (p, dp)
    };
    let one = Complex64::new(1.0, 0.0);
    let mut stall = Stall::default();
    for _ in 0..ABERTH_MAX_ITER {
        let mut moved = 0.0_f64;
        for i in 0..z.len() {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repel: Complex64 = (0..z.len())
                .filter(|&j| j != i && z[i] != z[j])
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (one - ratio * repel);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if stall.converged(moved) {
            break;
        }
    }
    z
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Compensated Horner: `p(t)` as if evaluated in twice the working
/// precision, plus a plain `p′(t)`.
fn comp_horner_with_derivative(c: &[f64], t: f64) -> (f64, f64) {
    let mut s = c[0];
    let mut err = 0.0;
    let mut dp = 0.0;
    for &a in &c[1..] {
        dp = dp * t + s;
        let (prod, pi) = two_prod(s, t);
        let (sum, sigma) = two_sum(prod, a);
        s = sum;
        err = err * t + (pi + sigma);
    }
    (s + err, dp)
}

/// Real Aberth iteration using compensated evaluation; for clustered roots
/// the plain Horner noise would otherwise set the attainable accuracy.
fn aberth_real(c: &[f64], mut z: Vec<f64>) -> Vec<f64> {
    let mut stall = Stall::default();
    for _ in 0..ABERTH_MAX_ITER {
        let mut moved = 0.0_f64;
        for i in 0..z.len() {
            let (p, dp) = comp_horner_with_derivative(c, z[i]);
            if p == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repel: f64 = (0..z.len())
                .filter(|&j| j != i && z[i] != z[j])
                .map(|j| 1.0 / (z[i] - z[j]))
                .sum();
            let step = ratio / (1.0 - ratio * repel);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.abs() / z[i].abs().max(1.0));
            }
        }
        if stall.converged(moved) {
            break;
        }
    }
    z
}

/// Starting points on a circle enclosing all roots, off the real axis.
fn aberth_start(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let lead = c[0];
    let centre = Complex64::new(-c[1] / (lead * n as f64), 0.0);
    let radius = c[1..].iter().fold(0.0_f64, |m, x| m.max((x / lead).abs())) + 1.0;
    (0..n)
        .map(|k| {
            let angle = std::f64::consts::TAU * (k as f64 + 0.25) / n as f64 + 0.4;
            centre + Complex64::from_polar(radius, angle)
        })
        .collect()
}

/// Real parts, if every root is numerically real and positive.
fn real_parts(z: &[Complex64]) -> Option<Vec<f64>> {
    z.iter()
        .map(|w| (w.is_finite() && w.re > 0.0 && w.im.abs() <= 1e-6 * w.norm()).then_some(w.re))
        .collect()
}

/// `u` values from the full root set of a palindromic polynomial with
/// positive roots: the larger half are the `r ≥ 1`.
fn u_from_roots(z: &[f64]) -> Vec<f64> {
    let mut r = z.to_vec();
    r.sort_by(|a, b| b.total_cmp(a));
    r[..z.len() / 2]
        .iter()
        .map(|&r| (0.5 * (r + 1.0 / r)).max(1.0))
        .collect()
}

fn abs_scale(c: &[f64]) -> f64 {
    c.iter().map(|x| x.abs()).sum::<f64>().max(1.0)
}

/// Peels roots off largest first (see [`recover_factorization`]), returning
/// the unsorted `u` values.
fn peel(c: &[f64], tol: f64) -> Result<Vec<f64>> {
    // pairing remainder allowance: near-double roots lose about half the digits
    let pair_tol = tol.max(1e-7);
    let mut q = c.to_vec();
    let mut us = Vec::with_capacity(c.len() / 2);

    while q.len() > 1 {
        let scale = abs_scale(&q);
        let (at1, dat1) = horner_with_derivative(&q, 1.0);
        let dscale = q
            .iter()
            .rev()
            .enumerate()
            .map(|(k, c)| k as f64 * c.abs())
            .sum::<f64>()
            .max(1.0);
        let (u, copies) = if at1.abs() <= tol * scale && dat1.abs() <= tol * dscale {
            (1.0, 1)
        } else {
            let (r, mult) = largest_root_with_multiplicity(&q).ok_or_else(|| {
                Error::NotInTheoremDomain("no real root found; complex roots present".into())
            })?;
            if !(r > 0.0) {
                return Err(Error::NotInTheoremDomain(format!("nonpositive root {r}")));
            }
            if r < 1.0 - 1e-6 {
                // the reciprocal 1/r > 1 would have been the largest root
                return Err(Error::NotInTheoremDomain(
                    "largest real root below 1; complex roots present".into(),
                ));
            }
            let r = r.max(1.0);
            (0.5 * (r + 1.0 / r), mult)
        };
        let partner = root_pair(u).1;
        if horner(&q, partner).abs() > pair_tol * horner_abs(&q, partner) {
            return Err(Error::Unpairable);
        }
        for _ in 0..copies {
            if q.len() < 3 {
                return Err(Error::Unpairable);
            }
            q = deflate_palindromic(&q, u);
            us.push(u);
        }
    }
    Ok(us)
}

/// Recovers `u` (sorted descending) from a monic palindromic polynomial
/// whose roots are all real and positive.
///
/// Roots are peeled off largest first. Each root `r ≥ 1` must have a partner
/// `s = 1/r` at which the polynomial also vanishes (relative to
/// `Σ|cₖ|sᵏ`); the pair is then divided out as `t² − (r + s)t + 1`, which
/// keeps the remaining polynomial palindromic. Double roots at `t = 1` are
/// recognised by `p(1) ≈ 0 ≈ p′(1)` and removed as `(t − 1)²`.
pub fn recover_factorization(
    p: &PolynomialCoefficients,
    tol: f64,
) -> Result<QuadraticFactorization> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let deg = p.degree();
    if deg == 0 {
        return Err(Error::EmptyInput);
    }
    if deg % 2 != 0 {
        return Err(Error::NotInTheoremDomain(format!("odd degree {deg}")));
    }
    if !p.is_palindromic(PALINDROME_TOL) {
        return Err(Error::NotPalindromic);
    }
    // all-positive roots force strictly alternating signs (Descartes)
    let alternating = p
        .coeffs
        .iter()
        .enumerate()
        .all(|(k, &c)| if k % 2 == 0 { c > 0.0 } else { c < 0.0 });
    if !alternating {
        return Err(Error::NotInTheoremDomain(
            "coefficient signs do not alternate, so some root is not positive".into(),
        ));
    }

    let original = &p.coeffs;
    let size = original.iter().fold(1.0_f64, |m, c| m.max(c.abs()));
    let allowed = tol.max(1e-9) * size;

    // Peeling leaves a small backward error but can misplace clustered roots,
    // and deflation error can push a tight cluster off the real axis. Both
    // are repaired by refining all roots at once on `c`; the refined set is
    // preferred whenever it still reproduces `c` within tolerance.
    let peeled = peel(original, tol);
    let start = match &peeled {
        Ok(us) => Some(
            us.iter()
                .flat_map(|&u| {
                    let (r, s) = root_pair(u);
                    [r, s]
                })
                .collect(),
        ),
        Err(_) => real_parts(&aberth(original, aberth_start(original))),
    };
    let polished = start.map(|z| u_from_roots(&aberth_real(original, z)));
    let mut us = match (peeled, polished) {
        (Ok(peeled), Some(polished)) => {
            let m_polished = mismatch(original, &polished);
            if m_polished <= allowed || m_polished < mismatch(original, &peeled) {
                polished
            } else {
                peeled
            }
        }
        (Ok(peeled), None) => peeled,
        (Err(_), Some(polished)) => polished,
        (Err(e), None) => return Err(e),
    };
    us.sort_by(|a, b| b.total_cmp(a));
    let f = QuadraticFactorization::new(RealVector::new(us)?)?;

    if mismatch(original, f.u().as_slice()) > allowed {
        return Err(Error::NotInTheoremDomain(
            "recovered factors do not reproduce the polynomial".into(),
        ));
    }
    Ok(f)
}
