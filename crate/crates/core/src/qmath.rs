//! Small fixed-size complex linear algebra for two-qubit work.
//!
//! Basis ordering is fixed globally: `|a b> = |a> (x) |b>` sits at row `2a + b`.
//! Qubit A is always the left tensor factor.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{QcError, Result};

pub type C64 = Complex64;

/// Real 3-vector (Bloch vectors, measurement axes).
pub type Vec3 = [f64; 3];

/// Real 3x3 matrix, row-major.
pub type Mat3 = [[f64; 3]; 3];

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Default Hermiticity tolerance for [`eigvals_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues above `-PSD_CLAMP` are treated as round-off and clamped to zero.
pub const PSD_CLAMP: f64 = 1e-9;
/// Default floor for [`psd_inv_sqrt_2x2`].
pub const SINGULAR_EPS: f64 = 1e-12;

/// Dense `N x N` complex matrix stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMatrix<const N: usize> {
    data: [[C64; N]; N],
}

pub type Mat2 = CMatrix<2>;
pub type Mat4 = CMatrix<4>;

impl<const N: usize> CMatrix<N> {
    pub const fn from_rows(data: [[C64; N]; N]) -> Self {
        Self { data }
    }

    pub fn zeros() -> Self {
        Self {
            data: [[ZERO; N]; N],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.data[i][i] = ONE;
        }
        m
    }

    pub fn from_real_diag(diag: [f64; N]) -> Self {
        let mut m = Self::zeros();
        for (i, d) in diag.into_iter().enumerate() {
            m.data[i][i] = C64::new(d, 0.0);
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.data[i][j] = f(i, j);
            }
        }
        m
    }

    /// `|v><v|`.
    pub fn outer(v: &[C64; N]) -> Self {
        Self::from_fn(|i, j| v[i] * v[j].conj())
    }

    pub fn rows(&self) -> &[[C64; N]; N] {
        &self.data
    }

    pub fn dim(&self) -> usize {
        N
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.data[j][i].conj())
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(|i, j| self.data[i][j].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.data[j][i])
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.data[i][i]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_fn(|i, j| self.data[i][j] * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self::from_fn(|i, j| self.data[i][j] * s)
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..N {
            for j in 0..N {
                worst = worst.max((self.data[i][j] - other.data[i][j]).norm());
            }
        }
        worst
    }

    /// `max |M - M^dagger|` elementwise.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn apply(&self, v: &[C64; N]) -> [C64; N] {
        let mut out = [ZERO; N];
        for (i, row) in self.data.iter().enumerate() {
            out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// Hermitian part `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(|i, j| (self.data[i][j] + self.data[j][i].conj()) * 0.5)
    }

    /// `V diag(f(lambda)) V^dagger` from an eigendecomposition with eigenvectors in columns.
    pub fn from_spectrum(values: &[f64; N], vectors: &Self) -> Self {
        Self::from_fn(|i, j| {
            (0..N)
                .map(|k| vectors.data[i][k] * vectors.data[j][k].conj() * values[k])
                .sum()
        })
    }
}

impl<const N: usize> Index<(usize, usize)> for CMatrix<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for CMatrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i][j]
    }
}

impl<const N: usize> Add for CMatrix<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.data[i][j] + rhs.data[i][j])
    }
}

impl<const N: usize> Sub for CMatrix<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.data[i][j] - rhs.data[i][j])
    }
}

impl<const N: usize> Mul for CMatrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<const N: usize> Mul<&CMatrix<N>> for &CMatrix<N> {
    type Output = CMatrix<N>;
    fn mul(self, rhs: &CMatrix<N>) -> CMatrix<N> {
        CMatrix::from_fn(|i, j| (0..N).map(|k| self.data[i][k] * rhs.data[k][j]).sum())
    }
}

/// The single-qubit Pauli operators together with the identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliBasis {
    pub identity: Mat2,
    pub sigma_x: Mat2,
    pub sigma_y: Mat2,
    pub sigma_z: Mat2,
}

pub const SIGMA_0: Mat2 = Mat2::from_rows([[ONE, ZERO], [ZERO, ONE]]);
pub const SIGMA_X: Mat2 = Mat2::from_rows([[ZERO, ONE], [ONE, ZERO]]);
pub const SIGMA_Y: Mat2 = Mat2::from_rows([[ZERO, C64::new(0.0, -1.0)], [I, ZERO]]);
pub const SIGMA_Z: Mat2 = Mat2::from_rows([[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]]);

impl PauliBasis {
    pub const STANDARD: PauliBasis = PauliBasis {
        identity: SIGMA_0,
        sigma_x: SIGMA_X,
        sigma_y: SIGMA_Y,
        sigma_z: SIGMA_Z,
    };

    /// `[sigma_x, sigma_y, sigma_z]`.
    pub fn spatial(&self) -> [Mat2; 3] {
        [self.sigma_x, self.sigma_y, self.sigma_z]
    }
}

/// `sigma_0, sigma_x, sigma_y, sigma_z` by index.
pub fn pauli(index: usize) -> Mat2 {
    match index {
        0 => SIGMA_0,
        1 => SIGMA_X,
        2 => SIGMA_Y,
        3 => SIGMA_Z,
        _ => panic!("Pauli index {index} out of range 0..4"),
    }
}

/// `n . sigma` for a real direction.
pub fn bloch_operator(n: &Vec3) -> Mat2 {
    SIGMA_X.scale_real(n[0]) + SIGMA_Y.scale_real(n[1]) + SIGMA_Z.scale_real(n[2])
}

/// Kronecker product `A (x) B` with row index `2a + b`.
pub fn tensor(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// Which qubit a partial trace keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

pub fn partial_trace(m: &Mat4, keep: Subsystem) -> Mat2 {
    Mat2::from_fn(|i, j| match keep {
        Subsystem::A => (0..2).map(|k| m[(2 * i + k, 2 * j + k)]).sum(),
        Subsystem::B => (0..2).map(|k| m[(2 * k + i, 2 * k + j)]).sum(),
    })
}

fn check_hermitian<const N: usize>(m: &CMatrix<N>, tolerance: f64) -> Result<()> {
    let deviation = m.hermiticity_defect();
    if !(deviation <= tolerance) {
        return Err(QcError::NotHermitian { deviation });
    }
    Ok(())
}

fn eigvals_2x2(m: &Mat2) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [mean + radius, mean - radius]
}

/// All eigenvalues of a Hermitian matrix, descending.
///
/// 2x2 uses the closed form; larger sizes use cyclic Jacobi rotations.
pub fn eigvals_hermitian<const N: usize>(m: &CMatrix<N>, tolerance: f64) -> Result<Vec<f64>> {
    check_hermitian(m, tolerance)?;
    if N == 2 {
        let m2 = Mat2::from_fn(|i, j| m[(i, j)]);
        return Ok(eigvals_2x2(&m2).to_vec());
    }
    Ok(hermitian_eigen(m).0.to_vec())
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching unit eigenvectors as
/// the columns of the second matrix. Only the Hermitian part of the input is used.
pub fn hermitian_eigen<const N: usize>(m: &CMatrix<N>) -> ([f64; N], CMatrix<N>) {
    let mut a = m.hermitian_part();
    let mut v = CMatrix::<N>::identity();
    let scale: f64 = a.rows().iter().flatten().map(|z| z.norm_sqr()).sum::<f64>();
    if scale == 0.0 {
        return ([0.0; N], v);
    }
    let floor = scale * 1e-34;

    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..N {
            for q in (p + 1)..N {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off <= floor {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let h = a[(p, q)];
                let habs = h.norm();
                if habs == 0.0 {
                    continue;
                }
                let phase = h / habs;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * habs);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // U = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) plane.
                let upp = C64::new(c, 0.0);
                let upq = C64::new(s, 0.0);
                let uqp = -phase.conj() * s;
                let uqq = phase.conj() * c;

                for k in 0..N {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * upp + akq * uqp;
                    a[(k, q)] = akp * upq + akq * uqq;
                }
                for k in 0..N {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
                    a[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

                for k in 0..N {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * upp + vkq * uqp;
                    v[(k, q)] = vkp * upq + vkq * uqq;
                }
            }
        }
    }

    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = std::array::from_fn(|k| a[(order[k], order[k])].re);
    let vectors = CMatrix::from_fn(|i, k| v[(i, order[k])]);
    (values, vectors)
}

/// Singular values by one-sided (Hestenes) Jacobi, descending.
///
/// Small singular values come out with absolute error of order `eps * |M|`.
pub fn singular_values<const N: usize>(m: &CMatrix<N>) -> [f64; N] {
    let mut a = *m;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..N {
            for q in p + 1..N {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, ZERO);
                for k in 0..N {
                    alpha += a[(k, p)].norm_sqr();
                    beta += a[(k, q)].norm_sqr();
                    gamma += a[(k, p)].conj() * a[(k, q)];
                }
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..N {
                    let ap = a[(k, p)];
                    let aq = a[(k, q)] * phase;
                    a[(k, p)] = ap.scale(c) - aq.scale(s);
                    a[(k, q)] = ap.scale(s) + aq.scale(c);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut values: [f64; N] =
        std::array::from_fn(|j| (0..N).map(|k| a[(k, j)].norm_sqr()).sum::<f64>().sqrt());
    values.sort_by(|x, y| y.total_cmp(x));
    values
}

/// `M^{-1/2}` for a Hermitian positive-definite 2x2 matrix.
///
/// Uses `sqrt(M) = (M + sqrt(det M) I) / sqrt(tr M + 2 sqrt(det M))`.
pub fn psd_inv_sqrt_2x2(m: &Mat2, epsilon: f64) -> Result<Mat2> {
    check_hermitian(m, HERMITIAN_TOL)?;
    let [_, smallest] = eigvals_2x2(m);
    if !(smallest >= epsilon) {
        return Err(QcError::SingularMarginal {
            min_eigenvalue: smallest,
        });
    }
    let m = m.hermitian_part();
    let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
    let s = det.sqrt();
    let t = (m.trace().re + 2.0 * s).sqrt();
    let root = (m + Mat2::identity().scale_real(s)).scale_real(1.0 / t);
    // Inverse of the 2x2 square root; det(sqrt M) = sqrt(det M).
    let inv = Mat2::from_rows([[root[(1, 1)], -root[(0, 1)]], [-root[(1, 0)], root[(0, 0)]]])
        .scale_real(1.0 / s);
    Ok(inv.hermitian_part())
}

fn psd_spectrum<const N: usize>(m: &CMatrix<N>) -> Result<([f64; N], CMatrix<N>)> {
    check_hermitian(m, HERMITIAN_TOL)?;
    let (mut values, vectors) = hermitian_eigen(m);
    for v in values.iter_mut() {
        if *v < -PSD_CLAMP {
            return Err(QcError::NotPsd { eigenvalue: *v });
        }
        *v = v.max(0.0);
    }
    Ok((values, vectors))
}

/// Principal square root of a Hermitian PSD matrix.
pub fn psd_sqrt<const N: usize>(m: &CMatrix<N>) -> Result<CMatrix<N>> {
    let (values, vectors) = psd_spectrum(m)?;
    Ok(CMatrix::from_spectrum(&values.map(f64::sqrt), &vectors))
}

/// Spectrum of `P Q` for Hermitian PSD `P`, `Q`, descending and clamped at zero.
///
/// Computed through the similar Hermitian matrix `sqrt(P) Q sqrt(P)`.
pub fn eigvals_psd_product(p: &Mat4, q: &Mat4) -> Result<[f64; 4]> {
    psd_spectrum(q)?;
    let root = psd_sqrt(p)?;
    let sandwich = (&(&root * q) * &root).hermitian_part();
    let (mut values, _) = hermitian_eigen(&sandwich);
    for v in values.iter_mut() {
        if *v < -PSD_CLAMP {
            return Err(QcError::NotPsd { eigenvalue: *v });
        }
        *v = v.max(0.0);
    }
    Ok(values)
}

// ---------------------------------------------------------------------------
// Real 3-vectors and 3x3 matrices.

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// `a / |a|`, or `None` when `|a|` is below `floor`.
pub fn normalize(a: &Vec3, floor: f64) -> Option<Vec3> {
    let n = norm(a);
    (n > floor).then(|| scale(a, 1.0 / n))
}

/// Errors unless `|n| = 1` within `1e-9`.
pub fn check_unit(n: &Vec3) -> Result<()> {
    let len = norm(n);
    if !((len - 1.0).abs() <= 1e-9) {
        return Err(QcError::NotUnitVector { norm: len });
    }
    Ok(())
}

pub fn mat3_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
}

pub fn mat3_transpose(m: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| m[j][i]))
}

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

/// `M^T M`.
pub fn gram(m: &Mat3) -> Mat3 {
    mat3_mul(&mat3_transpose(m), m)
}

/// Eigenvalues of a real symmetric 3x3 matrix, descending, by the trigonometric
/// closed form.
pub fn symmetric_eigvals3(m: &Mat3) -> [f64; 3] {
    let p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
    if p1 == 0.0 {
        let mut d = [m[0][0], m[1][1], m[2][2]];
        d.sort_by(|a, b| b.total_cmp(a));
        return d;
    }
    let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    let p2 = (m[0][0] - q).powi(2) + (m[1][1] - q).powi(2) + (m[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b: Mat3 = std::array::from_fn(|i| {
        std::array::from_fn(|j| (m[i][j] - if i == j { q } else { 0.0 }) / p)
    });
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
        - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let r = (det / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let largest = q + 2.0 * p * phi.cos();
    let smallest = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let middle = 3.0 * q - largest - smallest;
    [largest, middle, smallest]
}

/// Eigenvalues (descending) and unit eigenvectors of a real symmetric 3x3 matrix.
pub fn symmetric_eigen3(m: &Mat3) -> ([f64; 3], [Vec3; 3]) {
    let cm = CMatrix::<3>::from_fn(|i, j| C64::new(0.5 * (m[i][j] + m[j][i]), 0.0));
    let (values, vectors) = hermitian_eigen(&cm);
    let vecs = std::array::from_fn(|k| std::array::from_fn(|i| vectors[(i, k)].re));
    (values, vecs)
}
