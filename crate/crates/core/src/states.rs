//! The damped state family: the biased pure state `cos(theta)|00> + sin(theta)|11>`
//! sent through independent amplitude-damping channels on each qubit.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{QcError, Result};
use crate::qmath::{
    bloch_operator, check_unit, eigvals_hermitian, pauli, tensor, Mat2, Mat3, Mat4, Vec3, C64,
    PSD_CLAMP, SIGMA_0, ZERO,
};

/// Coordinates `(theta, D)` of a member of the damped family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatePoint {
    theta: f64,
    damping: f64,
}

impl StatePoint {
    pub fn new(theta: f64, damping: f64) -> Result<Self> {
        check_theta(theta)?;
        check_damping(damping, "damping")?;
        Ok(Self { theta, damping })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(QcError::Domain(format!(
            "theta = {theta} outside [0, pi/2]"
        )));
    }
    Ok(())
}

fn check_damping(d: f64, name: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&d) {
        return Err(QcError::Domain(format!("{name} = {d} outside [0, 1]")));
    }
    Ok(())
}

/// A validated two-qubit density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(Mat4);

impl DensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-10;
    pub const TRACE_TOL: f64 = 1e-9;

    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: Mat4) -> Result<Self> {
        if !matrix.is_finite() {
            return Err(QcError::InvalidState("non-finite entry".into()));
        }
        let values = eigvals_hermitian(&matrix, Self::HERMITIAN_TOL)?;
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > Self::TRACE_TOL || trace.im.abs() > Self::TRACE_TOL {
            return Err(QcError::InvalidState(format!("trace {trace} != 1")));
        }
        if let Some(&lowest) = values.last() {
            if lowest < -PSD_CLAMP {
                return Err(QcError::NotPsd { eigenvalue: lowest });
            }
        }
        Ok(Self(matrix))
    }

    /// Wraps a matrix known to satisfy the invariants by construction.
    pub(crate) fn from_trusted(matrix: Mat4) -> Self {
        debug_assert!(
            Self::new(matrix).is_ok(),
            "invalid trusted state: {matrix:?}"
        );
        Self(matrix)
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    /// `|00><00|`.
    pub fn ground() -> Self {
        Self(Mat4::from_real_diag([1.0, 0.0, 0.0, 0.0]))
    }

    /// `(U (x) V) rho (U (x) V)^dagger` for single-qubit unitaries.
    pub fn local_unitary(&self, u: &Mat2, v: &Mat2) -> Self {
        let uv = tensor(u, v);
        Self((&(&uv * &self.0) * &uv.adjoint()).hermitian_part())
    }
}

/// Local Bloch vectors and the 3x3 Pauli correlation matrix of a two-qubit state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationData {
    /// Alice's Bloch vector `a_i = Tr[(sigma_i (x) I) rho]`.
    pub a: Vec3,
    /// Bob's Bloch vector `b_j = Tr[(I (x) sigma_j) rho]`.
    pub b: Vec3,
    /// `T_ij = Tr[(sigma_i (x) sigma_j) rho]`.
    pub t: Mat3,
}

impl CorrelationData {
    /// `<(alice . sigma) (x) (bob . sigma)> = alice^T T bob`.
    pub fn correlator(&self, alice: &Vec3, bob: &Vec3) -> f64 {
        crate::qmath::dot(alice, &crate::qmath::mat3_vec(&self.t, bob))
    }
}

/// `|psi_theta><psi_theta|` with `|psi_theta> = cos(theta)|00> + sin(theta)|11>`.
pub fn pure_state(theta: f64) -> Result<DensityMatrix> {
    check_theta(theta)?;
    let (s, c) = theta.sin_cos();
    let psi = [C64::new(c, 0.0), ZERO, ZERO, C64::new(s, 0.0)];
    Ok(DensityMatrix::from_trusted(Mat4::outer(&psi)))
}

/// Kraus operators `K0 = diag(1, sqrt(1-D))`, `K1 = sqrt(D) |0><1|`.
fn adc_kraus(d: f64) -> [Mat2; 2] {
    let k0 = Mat2::from_real_diag([1.0, (1.0 - d).sqrt()]);
    let mut k1 = Mat2::zeros();
    k1[(0, 1)] = C64::new(d.sqrt(), 0.0);
    [k0, k1]
}

/// Independent amplitude damping of strength `d_a` on qubit A and `d_b` on qubit B.
pub fn apply_adc(rho: &DensityMatrix, d_a: f64, d_b: f64) -> Result<DensityMatrix> {
    check_damping(d_a, "d_a")?;
    check_damping(d_b, "d_b")?;
    let mut out = Mat4::zeros();
    for ka in adc_kraus(d_a) {
        for kb in adc_kraus(d_b) {
            let k = tensor(&ka, &kb);
            out = out + &(&k * rho.matrix()) * &k.adjoint();
        }
    }
    Ok(DensityMatrix::from_trusted(out.hermitian_part()))
}

/// Closed-form damped state with equal strengths on both qubits.
pub fn family_state(p: StatePoint) -> DensityMatrix {
    let (s, c) = p.theta.sin_cos();
    let d = p.damping;
    let a11 = c * c + d * d * s * s;
    let a14 = (1.0 - d) * c * s;
    let a21 = (1.0 - d) * d * s * s;
    let a44 = (1.0 - d) * (1.0 - d) * s * s;
    let mut m = Mat4::from_real_diag([a11, a21, a21, a44]);
    m[(0, 3)] = C64::new(a14, 0.0);
    m[(3, 0)] = C64::new(a14, 0.0);
    DensityMatrix::from_trusted(m)
}

/// Closed-form correlation matrix of [`family_state`]:
/// `diag((1-D) sin 2theta, -(1-D) sin 2theta, cos^2 theta + (1-2D)^2 sin^2 theta)`.
pub fn family_correlation_matrix(p: StatePoint) -> Mat3 {
    let (s, c) = p.theta.sin_cos();
    let d = p.damping;
    let transverse = (1.0 - d) * 2.0 * s * c;
    let tz = c * c + (1.0 - 2.0 * d).powi(2) * s * s;
    [
        [transverse, 0.0, 0.0],
        [0.0, -transverse, 0.0],
        [0.0, 0.0, tz],
    ]
}

/// `(I + (-1)^outcome n . sigma) / 2`.
pub fn projector(n: &Vec3, outcome: u8) -> Mat2 {
    let sign = if outcome == 0 { 0.5 } else { -0.5 };
    SIGMA_0.scale_real(0.5) + bloch_operator(n).scale_real(sign)
}

/// Probability of outcomes `(a, b)` for spin measurements along `alice_dir`, `bob_dir`.
pub fn joint_probability(
    rho: &DensityMatrix,
    alice_dir: &Vec3,
    bob_dir: &Vec3,
    a: u8,
    b: u8,
) -> Result<f64> {
    check_unit(alice_dir)?;
    check_unit(bob_dir)?;
    if a > 1 || b > 1 {
        return Err(QcError::Domain(format!(
            "outcomes ({a}, {b}) must be 0 or 1"
        )));
    }
    let op = tensor(&projector(alice_dir, a), &projector(bob_dir, b));
    Ok((&op * rho.matrix()).trace().re)
}

/// All four outcome probabilities `[(0,0), (0,1), (1,0), (1,1)]`.
pub fn outcome_probabilities(
    rho: &DensityMatrix,
    alice_dir: &Vec3,
    bob_dir: &Vec3,
) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = joint_probability(rho, alice_dir, bob_dir, (k / 2) as u8, (k % 2) as u8)?;
    }
    Ok(out)
}

pub fn correlation_data(rho: &DensityMatrix) -> CorrelationData {
    let m = rho.matrix();
    let expect = |i: usize, j: usize| (&tensor(&pauli(i), &pauli(j)) * m).trace().re;
    CorrelationData {
        a: std::array::from_fn(|i| expect(i + 1, 0)),
        b: std::array::from_fn(|j| expect(0, j + 1)),
        t: std::array::from_fn(|i| std::array::from_fn(|j| expect(i + 1, j + 1))),
    }
}
