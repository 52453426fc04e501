//! Small dense matrices: Gram products, characteristic polynomials and
//! symmetric eigenvalues, plus the bundled 4×4 example whose eigenvalue
//! vectors are power majorized but not majorized.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyfact::{recover_factorization, PolynomialCoefficients, QuadraticFactorization};
use crate::powermaj::{default_grid, power_majorizes, PowerMajorizationReport, DEFAULT_P_MAX};
use crate::vectors::{majorizes, MajorizationReport, RealVector};

/// Largest dimension accepted by [`char_poly`].
pub const CHAR_POLY_MAX_DIM: usize = 12;
pub const JACOBI_MAX_SWEEPS: usize = 100;
const SYMMETRY_TOL: f64 = 1e-12;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyInput);
        }
        if entries.len() != rows * cols {
            return Err(Error::LengthMismatch {
                left: entries.len(),
                right: rows * cols,
            });
        }
        if let Some(index) = entries.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::LengthMismatch {
                left: bad.len(),
                right: c,
            });
        }
        Self::new(r, c, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Self {
            rows: n,
            cols: n,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.entries
            .chunks(self.cols)
            .map(<[f64]>::to_vec)
            .collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for DenseMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<DenseMatrix> for Vec<Vec<f64>> {
    fn from(m: DenseMatrix) -> Self {
        m.to_rows()
    }
}

/// Square matrix with `M[i][j] = M[j][i]` to within `1e−12`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SymmetricMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        let dense = DenseMatrix::new(dim, dim, entries)?;
        Self::try_from(dense)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }
}

impl TryFrom<DenseMatrix> for SymmetricMatrix {
    type Error = Error;

    fn try_from(m: DenseMatrix) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::NotSymmetric);
        }
        let n = m.rows;
        for i in 0..n {
            for j in i + 1..n {
                if (m.get(i, j) - m.get(j, i)).abs() > SYMMETRY_TOL {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        Ok(Self {
            dim: n,
            entries: m.entries,
        })
    }
}

impl TryFrom<Vec<Vec<f64>>> for SymmetricMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::try_from(DenseMatrix::from_rows(&rows)?)
    }
}

impl From<SymmetricMatrix> for Vec<Vec<f64>> {
    fn from(m: SymmetricMatrix) -> Self {
        m.to_rows()
    }
}

/// `A·Aᵀ`.
pub fn gram(a: &DenseMatrix) -> SymmetricMatrix {
    let n = a.rows;
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let dot: f64 = (0..a.cols).map(|k| a.get(i, k) * a.get(j, k)).sum();
            entries[i * n + j] = dot;
            entries[j * n + i] = dot;
        }
    }
    SymmetricMatrix { dim: n, entries }
}

fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

/// `det(tI − M)` by the Faddeev–LeVerrier recursion
/// `N₁ = M, c_{n−k} = −tr(N_k)/k, N_{k+1} = M(N_k + c_{n−k} I)`.
///
/// For integer-valued input the coefficients are integers; any within
/// `1e−9` of an integer is rounded.
pub fn char_poly(m: &SymmetricMatrix) -> Result<PolynomialCoefficients> {
    let n = m.dim;
    if n > CHAR_POLY_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: n,
            max: CHAR_POLY_MAX_DIM,
        });
    }
    let mut coeffs = vec![1.0];
    let mut nk = m.entries.clone();
    for k in 1..=n {
        let trace: f64 = (0..n).map(|i| nk[i * n + i]).sum();
        let c = -trace / k as f64;
        coeffs.push(c);
        if k < n {
            for i in 0..n {
                nk[i * n + i] += c;
            }
            nk = matmul(&m.entries, &nk, n);
        }
    }
    if m.entries.iter().all(|x| x.fract() == 0.0) {
        for c in coeffs.iter_mut().skip(1) {
            let r = c.round();
            if (*c - r).abs() <= 1e-9 {
                *c = r;
            }
        }
    }
    PolynomialCoefficients::new(coeffs)
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
/// descending. Sweeps stop once the off-diagonal Frobenius norm falls below
/// `tol · max(1, ‖M‖_F)`.
pub fn sym_eigenvalues(m: &SymmetricMatrix, tol: f64) -> Result<RealVector> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let n = m.dim;
    let mut a = m.entries.clone();
    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = tol * frob.max(1.0);

    let mut converged = off_diagonal_norm(&a, n) < target;
    let mut sweep = 0;
    while !converged {
        if sweep == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence(JACOBI_MAX_SWEEPS));
        }
        sweep += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // rotation angle annihilating a[p][q]
                let tau = (aqq - app) / (2.0 * apq);
                // signum(0.0) is 1.0, giving the 45° rotation
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
        converged = off_diagonal_norm(&a, n) < target;
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    RealVector::new(eig)
}

/// The two 4×4 factors whose Gram matrices share trace and determinant but
/// have different spectra.
pub fn klemes_matrices() -> (DenseMatrix, DenseMatrix) {
    #[rustfmt::skip]
    let a = vec![
        1.0, 1.0, 1.0, 1.0,
        0.0, 1.0, 1.0, 0.0,
        0.0, 0.0, 1.0, 0.0,
        0.0, 0.0, 1.0, 1.0,
    ];
    #[rustfmt::skip]
    let b = vec![
        1.0, 1.0, 1.0, 1.0,
        0.0, 1.0, 1.0, 0.0,
        0.0, 0.0, 1.0, 0.0,
        0.0, 0.0, 1.0, -1.0,
    ];
    (
        DenseMatrix::new(4, 4, a).expect("constant"),
        DenseMatrix::new(4, 4, b).expect("constant"),
    )
}

/// Every intermediate object of the 4×4 example, with its three verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleBundle {
    pub a: DenseMatrix,
    pub b: DenseMatrix,
    pub x_matrix: SymmetricMatrix,
    pub y_matrix: SymmetricMatrix,
    pub p_char: PolynomialCoefficients,
    pub q_char: PolynomialCoefficients,
    pub u: QuadraticFactorization,
    pub v: QuadraticFactorization,
    /// Linear coefficients `2u` and `2v` of the quadratic factors.
    pub u_coefficients: RealVector,
    pub v_coefficients: RealVector,
    pub x: RealVector,
    pub y: RealVector,
    /// `v ≺ u` on the linear coefficients.
    pub coefficient_majorization: MajorizationReport,
    /// `y ≺ x` on the eigenvalues; expected to fail.
    pub root_majorization: MajorizationReport,
    /// `y` power majorized by `x`; expected to hold.
    pub root_power_majorization: PowerMajorizationReport,
}

impl ExampleBundle {
    /// Coefficients majorized, roots not majorized, roots power majorized.
    pub fn matches_expected(&self) -> bool {
        self.coefficient_majorization.holds
            && !self.root_majorization.holds
            && self.root_power_majorization.holds
    }
}

/// Builds the 4×4 example from scratch at tolerance `tol`.
pub fn klemes_example_with_tol(tol: f64) -> Result<ExampleBundle> {
    let (a, b) = klemes_matrices();
    let x_matrix = gram(&a);
    let y_matrix = gram(&b);
    let p_char = char_poly(&x_matrix)?;
    let q_char = char_poly(&y_matrix)?;
    let u = recover_factorization(&p_char, tol)?;
    let v = recover_factorization(&q_char, tol)?;
    let double =
        |f: &QuadraticFactorization| RealVector::new(f.u().iter().map(|x| 2.0 * x).collect());
    let u_coefficients = double(&u)?;
    let v_coefficients = double(&v)?;
    let x = sym_eigenvalues(&x_matrix, 1e-12)?;
    let y = sym_eigenvalues(&y_matrix, 1e-12)?;
    let coefficient_majorization = majorizes(&u_coefficients, &v_coefficients, tol)?;
    let root_majorization = majorizes(&x, &y, tol)?;
    let root_power_majorization = power_majorizes(&x, &y, &default_grid(DEFAULT_P_MAX)?, tol)?;
    Ok(ExampleBundle {
        a,
        b,
        x_matrix,
        y_matrix,
        p_char,
        q_char,
        u,
        v,
        u_coefficients,
        v_coefficients,
        x,
        y,
        coefficient_majorization,
        root_majorization,
        root_power_majorization,
    })
}

pub fn klemes_example() -> ExampleBundle {
    klemes_example_with_tol(crate::vectors::DEFAULT_TOL).expect("fixed inputs are valid")
}
