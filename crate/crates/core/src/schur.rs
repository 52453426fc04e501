//! The functions behind the Schur-convexity argument for root power sums.
//!
//! With `a = t + √(t²−1)` and `b = t − √(t²−1) = 1/a`:
//!
//! ```text
//! φ(u)  = Σ (aᵢᵖ + bᵢᵖ)                  at t = uᵢ
//! g(t)  = (aᵖ − bᵖ) / √(t²−1)            ∂φ/∂uᵢ = p·g(uᵢ)
//! θ     = √(t²−1) / t
//! K(θ)  = (pθ − 1)(1+θ)ᵖ + (pθ + 1)(1−θ)ᵖ
//! h(θ)  = ln((pθ+1)(1−θ)ᵖ) − ln((1−pθ)(1+θ)ᵖ)
//! h′(θ) = 2p/(1 − p²θ²) − 2p/(1 − θ²)
//! ```
//!
//! For `p ≥ 1`, `g` is increasing and `φ` is Schur-convex on `[1, ∞)ⁿ`; for
//! `0 < p < 1` every sign flips. Each function here is evaluated directly
//! from its closed form so the sign claims can be checked numerically.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::polyfact::root_pair;
use crate::vectors::{pairwise_sum, RealVector};

/// Relative step for central differences: `h = FD_REL_STEP · max(1, u)`.
pub const FD_REL_STEP: f64 = 1e-6;
/// Relative discretization allowance wherever a derivative is approximated.
pub const FD_REL_TOL: f64 = 1e-5;
/// Allowance for the closed-form sign checks.
pub const SIGN_TOL: f64 = 1e-12;

fn check_exponent(p: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(domain(format!("exponent must be positive, got {p}")));
    }
    Ok(())
}

fn check_above_one(t: f64) -> Result<()> {
    if !(t > 1.0 && t.is_finite()) {
        return Err(domain(format!(
            "requires t > 1, got {t}; use g_limit_at_1 for the limit at t = 1"
        )));
    }
    Ok(())
}

/// `√(t²−1)`, factored to keep precision near `t = 1`.
fn surd(t: f64) -> f64 {
    ((t - 1.0) * (t + 1.0)).sqrt()
}

/// `aᵖ + bᵖ` for the root pair of a single factor.
fn pair_power_sum(u: f64, p: f64) -> f64 {
    let (a, b) = root_pair(u);
    a.powf(p) + b.powf(p)
}

/// `φ(u) = Σ ((uᵢ+√(uᵢ²−1))ᵖ + (uᵢ−√(uᵢ²−1))ᵖ)`.
pub fn phi(u: &RealVector, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if u.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(bad) = u.iter().find(|&&x| !(x >= 1.0)) {
        return Err(domain(format!("phi requires every u >= 1, got {bad}")));
    }
    let terms: Vec<f64> = u.iter().map(|&ui| pair_power_sum(ui, p)).collect();
    Ok(pairwise_sum(&terms))
}

/// `g(t) = ((t+√(t²−1))ᵖ − (t−√(t²−1))ᵖ) / √(t²−1)` for `t > 1`.
pub fn g(t: f64, p: f64) -> Result<f64> {
    check_above_one(t)?;
    check_exponent(p)?;
    let s = surd(t);
    let (a, b) = (t + s, 1.0 / (t + s));
    Ok((a.powf(p) - b.powf(p)) / s)
}

/// `lim_{t→1⁺} g(t) = 2p`.
pub fn g_limit_at_1(p: f64) -> f64 {
    2.0 * p
}

/// Closed-form derivative of [`g`]:
/// `[p(aᵖ + bᵖ) − (aᵖ − bᵖ)·t/√(t²−1)] / (t² − 1)`.
pub fn g_prime(t: f64, p: f64) -> Result<f64> {
    check_above_one(t)?;
    check_exponent(p)?;
    let s = surd(t);
    let a = t + s;
    let (ap, bp) = (a.powf(p), a.recip().powf(p));
    Ok((p * (ap + bp) - (ap - bp) * t / s) / (s * s))
}

/// The same derivative rewritten through `θ = √(t²−1)/t`:
/// `tᵖ/(t²−1) · (p(1+θ)ᵖ + p(1−θ)ᵖ − ((1+θ)ᵖ − (1−θ)ᵖ)/θ)`.
pub fn g_prime_theta_form(t: f64, p: f64) -> Result<f64> {
    let theta = theta_of_t(t)?;
    check_exponent(p)?;
    let (up, down) = ((1.0 + theta).powf(p), (1.0 - theta).powf(p));
    let s2 = (t - 1.0) * (t + 1.0);
    Ok(t.powf(p) / s2 * (p * up + p * down - (up - down) / theta))
}

/// `θ = √(t²−1)/t ∈ (0, 1)`.
pub fn theta_of_t(t: f64) -> Result<f64> {
    check_above_one(t)?;
    Ok(surd(t) / t)
}

/// `(pθ − 1)(1+θ)ᵖ + (pθ + 1)(1−θ)ᵖ`, whose sign is the sign of `g′`.
pub fn key_inequality(theta: f64, p: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(domain(format!("theta must lie in (0, 1), got {theta}")));
    }
    check_exponent(p)?;
    Ok((p * theta - 1.0) * (1.0 + theta).powf(p) + (p * theta + 1.0) * (1.0 - theta).powf(p))
}

fn check_h_domain(theta: f64, p: f64) -> Result<()> {
    check_exponent(p)?;
    if !((0.0..1.0).contains(&theta) && p * theta < 1.0) {
        return Err(domain(format!(
            "theta = {theta} is outside pθ<1 regime for p = {p}"
        )));
    }
    Ok(())
}

/// `h(θ) = ln((pθ+1)(1−θ)ᵖ) − ln((1−pθ)(1+θ)ᵖ)` on `0 ≤ θ < min(1, 1/p)`.
pub fn h(theta: f64, p: f64) -> Result<f64> {
    check_h_domain(theta, p)?;
    // grouped so each bracket cancels exactly at p = 1
    let first = (p * theta).ln_1p() - p * theta.ln_1p();
    let second = p * (-theta).ln_1p() - (-p * theta).ln_1p();
    Ok(first + second)
}

/// `h′(θ) = 2p/(1 − p²θ²) − 2p/(1 − θ²)`.
pub fn h_prime(theta: f64, p: f64) -> Result<f64> {
    check_h_domain(theta, p)?;
    let pt = p * theta;
    Ok(2.0 * p / (1.0 - pt * pt) - 2.0 * p / (1.0 - theta * theta))
}

/// `(u+√(u²−1))ᵖ + (u−√(u²−1))ᵖ` for integer `p`, computed as `2·T_p(u)`
/// via `T₀ = 1, T₁ = u, T_{k+1} = 2u·T_k − T_{k−1}`.
pub fn chebyshev_pair_sum(u: f64, p: u32) -> f64 {
    let (mut prev, mut cur) = (1.0, u);
    if p == 0 {
        return 2.0;
    }
    for _ in 1..p {
        let next = 2.0 * u * cur - prev;
        prev = cur;
        cur = next;
    }
    2.0 * cur
}

/// Outcome of [`schur_condition_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurCheckReport {
    pub p: f64,
    pub grid_description: String,
    /// Minimum over the grid of
    /// `σ·(u₁−u₂)(∂₁φ − ∂₂φ) / max(1, |u₁−u₂|·(|∂₁φ| + |∂₂φ|))`, with `σ = −1`
    /// for `0 < p < 1` so that a pass is always `≥ −tol`.
    pub min_schur_product: f64,
    pub pairs_checked: usize,
    pub passed: bool,
}

fn central_difference(p: f64, u: f64, rel_step: f64) -> f64 {
    let step = rel_step * u.max(1.0);
    (pair_power_sum(u + step, p) - pair_power_sum(u - step, p)) / (2.0 * step)
}

/// Checks the Schur condition `(u₁−u₂)(∂φ/∂u₁ − ∂φ/∂u₂) ≥ 0` (reversed for
/// `0 < p < 1`) on the two-variable restriction of [`phi`], with partials
/// from central differences of step `fd_rel_step · max(1, u)`.
///
/// Products are normalized by `|u₁−u₂|·(|∂₁φ| + |∂₂φ|)` before comparison
/// with [`FD_REL_TOL`]; the raw partials span dozens of orders of magnitude
/// across `p`.
pub fn schur_condition_check(
    p: f64,
    u_grid: &[(f64, f64)],
    fd_rel_step: f64,
) -> Result<SchurCheckReport> {
    check_exponent(p)?;
    if !(fd_rel_step > 0.0 && fd_rel_step.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "fd step must be positive, got {fd_rel_step}"
        )));
    }
    if u_grid.is_empty() {
        return Err(Error::EmptyInput);
    }
    let sign = if p >= 1.0 { 1.0 } else { -1.0 };
    let mut min_product = f64::INFINITY;
    for &(u1, u2) in u_grid {
        for u in [u1, u2] {
            if !(u.is_finite() && u > 1.0 + fd_rel_step * u.max(1.0)) {
                return Err(domain(format!(
                    "grid point {u} too close to the singularity at u = 1"
                )));
            }
        }
        let d1 = central_difference(p, u1, fd_rel_step);
        let d2 = central_difference(p, u2, fd_rel_step);
        let raw = (u1 - u2) * (d1 - d2);
        let norm = ((u1 - u2).abs() * (d1.abs() + d2.abs())).max(1.0);
        min_product = min_product.min(sign * raw / norm);
    }
    Ok(SchurCheckReport {
        p,
        grid_description: format!(
            "{} (u1, u2) pairs, central differences with relative step {fd_rel_step:e}",
            u_grid.len()
        ),
        min_schur_product: min_product,
        pairs_checked: u_grid.len(),
        passed: min_product >= -FD_REL_TOL,
    })
}

/// `count × count` grid of pairs with both coordinates evenly spaced in
/// `(lo, hi]`.
pub fn square_grid(lo: f64, hi: f64, count: usize) -> Vec<(f64, f64)> {
    let axis: Vec<f64> = (1..=count)
        .map(|k| lo + (hi - lo) * k as f64 / count as f64)
        .collect();
    axis.iter()
        .flat_map(|&a| axis.iter().map(move |&b| (a, b)))
        .collect()
}

/// `count` log-spaced values of `t` from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| match k {
            0 => lo,
            k if k + 1 == count => hi,
            k => (a + (b - a) * k as f64 / (count - 1) as f64).exp(),
        })
        .collect()
}

/// One sign claim evaluated over a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignSuite {
    pub name: String,
    pub points: usize,
    /// Worst value after orienting so that the claim reads `value ≥ 0`.
    pub worst: f64,
    pub passed: bool,
}

fn sign_suite(
    name: &str,
    values: impl IntoIterator<Item = Result<f64>>,
    orientation: f64,
) -> Result<SignSuite> {
    let mut worst = f64::INFINITY;
    let mut points = 0;
    for v in values {
        worst = worst.min(orientation * v?);
        points += 1;
    }
    Ok(SignSuite {
        name: name.to_string(),
        points,
        passed: worst >= -SIGN_TOL,
        worst,
    })
}

/// Every sign claim of the proof for a single exponent `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofSuiteReport {
    pub p: f64,
    pub regime: String,
    pub schur: SchurCheckReport,
    pub suites: Vec<SignSuite>,
    pub passed: bool,
}

/// Runs the Schur condition on a 20×20 grid in `(1.01, 10]²` together with
/// the sign suites for `g′` (200 log-spaced `t` in `[1.01, 100]`), the key
/// inequality (θ in `(0, 0.999)`), and `h`, `h′` on their valid domain.
pub fn proof_suite(p: f64) -> Result<ProofSuiteReport> {
    check_exponent(p)?;
    let orientation = if p >= 1.0 { 1.0 } else { -1.0 };
    let schur = schur_condition_check(p, &square_grid(1.01, 10.0, 20), FD_REL_STEP)?;

    let ts = log_grid(1.01, 100.0, 200);
    let thetas: Vec<f64> = (1..=999)
        .map(|k| k as f64 * 1e-3)
        .filter(|&t| t < 0.999)
        .collect();
    let h_limit = if p > 1.0 { 1.0 / p } else { 1.0 };
    let h_thetas: Vec<f64> = (0..200).map(|k| h_limit * k as f64 / 200.0).collect();

    let suites = vec![
        sign_suite("g_prime", ts.iter().map(|&t| g_prime(t, p)), orientation)?,
        sign_suite(
            "key_inequality",
            thetas.iter().map(|&th| key_inequality(th, p)),
            orientation,
        )?,
        sign_suite("h", h_thetas.iter().map(|&th| h(th, p)), orientation)?,
        sign_suite(
            "h_prime",
            h_thetas.iter().map(|&th| h_prime(th, p)),
            orientation,
        )?,
    ];
    let passed = schur.passed && suites.iter().all(|s| s.passed);
    Ok(ProofSuiteReport {
        p,
        regime: if p >= 1.0 {
            "convex (p >= 1)"
        } else {
            "concave (0 < p < 1)"
        }
        .to_string(),
        schur,
        suites,
        passed,
    })
}
