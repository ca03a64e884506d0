//! Sufficient certificate that a state admits a local-hidden-state model.
//!
//! The state is filtered on Bob's side, `rho -> (I (x) rho_B^{-1/2}) rho (I (x) rho_B^{-1/2})`,
//! which leaves Bob maximally mixed. Writing the normalized result as
//! `(I + a.sigma (x) I + sum_i T_i sigma_i (x) sigma_i) / 4`, the state is
//! unsteerable when `t_U = max(a_z^2 + 2|T_z|, 2|T_x|) <= 1`.

use serde::{Deserialize, Serialize};

use crate::error::{QcError, Result};
use crate::qmath::{
    partial_trace, psd_inv_sqrt_2x2, tensor, Subsystem, Vec3, SIGMA_0, SINGULAR_EPS,
};
use crate::states::{correlation_data, DensityMatrix, StatePoint};
use crate::steering::C16_THRESHOLD;

/// Off-diagonal filtered correlations above this are rejected by [`canonical_form`].
pub const OFF_DIAGONAL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalForm {
    /// Alice's local vector after filtering.
    pub a: Vec3,
    /// `(T_x, T_y, T_z)`.
    pub t_diag: [f64; 3],
}

/// Bob-filtered, unit-trace state.
///
/// The raw filter output has trace 2; it is rescaled before decomposition.
pub fn filtered_state(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let bob = partial_trace(rho.matrix(), Subsystem::B);
    let inv_sqrt = psd_inv_sqrt_2x2(&bob, SINGULAR_EPS)?;
    let filter = tensor(&SIGMA_0, &inv_sqrt);
    let raw = &(&filter * rho.matrix()) * &filter;
    let trace = raw.trace().re;
    DensityMatrix::new(raw.scale_real(1.0 / trace).hermitian_part())
}

/// Canonical form with a configurable off-diagonal tolerance.
pub fn canonical_form_with(rho: &DensityMatrix, off_diagonal_tol: f64) -> Result<CanonicalForm> {
    let data = correlation_data(&filtered_state(rho)?);
    for i in 0..3 {
        for j in 0..3 {
            if i != j && !(data.t[i][j].abs() < off_diagonal_tol) {
                return Err(QcError::NonDiagonalCorrelation {
                    value: data.t[i][j],
                });
            }
        }
    }
    Ok(CanonicalForm {
        a: data.a,
        t_diag: [data.t[0][0], data.t[1][1], data.t[2][2]],
    })
}

pub fn canonical_form(rho: &DensityMatrix) -> Result<CanonicalForm> {
    canonical_form_with(rho, OFF_DIAGONAL_TOL)
}

impl CanonicalForm {
    /// `max(a_z^2 + 2|T_z|, 2 max(|T_x|, |T_y|))`.
    pub fn t_u(&self) -> f64 {
        let [tx, ty, tz] = self.t_diag;
        let az = self.a[2];
        (az * az + 2.0 * tz.abs()).max(2.0 * tx.abs().max(ty.abs()))
    }
}

/// `t_U` of a state whose filtered correlation matrix is diagonal with
/// `|T_x| = |T_y|`.
pub fn unsteering_t(rho: &DensityMatrix) -> Result<f64> {
    let form = canonical_form(rho)?;
    let [tx, ty, _] = form.t_diag;
    if (tx.abs() - ty.abs()).abs() > OFF_DIAGONAL_TOL {
        return Err(QcError::TransverseAsymmetry {
            tx: tx.abs(),
            ty: ty.abs(),
        });
    }
    Ok(form.t_u())
}

/// `t_U` for estimated states, where sampling noise leaves small off-diagonal
/// and transverse-asymmetric residue. Only the diagonal of the filtered
/// correlation matrix is used.
pub fn unsteering_t_estimate(rho: &DensityMatrix) -> Result<f64> {
    Ok(canonical_form_with(rho, f64::INFINITY)?.t_u())
}

/// Closed-form variants of `t_U` on the damped family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnsteeringVariant {
    /// The alternative closed form, whose first argument carries `2(1-D) gamma` in
    /// its numerator.
    AsPrinted,
    /// `a_z^2 + 2|T_z|` from the filtered family state; agrees with
    /// [`unsteering_t`].
    #[default]
    Derived,
}

/// First and second arguments of the closed-form maximum.
pub fn unsteering_closed_terms(p: StatePoint, variant: UnsteeringVariant) -> Result<(f64, f64)> {
    let (s, c) = p.theta().sin_cos();
    let d = p.damping();
    let gamma = c * c + d * s * s;
    if !(gamma > 1e-12) {
        return Err(QcError::Domain(format!(
            "gamma = cos^2 theta + D sin^2 theta = {gamma:e} is too small at {p:?}"
        )));
    }
    let lead = d * d * (gamma - (1.0 - d) * s * s).powi(2);
    let second_numerator = match variant {
        UnsteeringVariant::AsPrinted => 2.0 * (1.0 - d) * gamma,
        UnsteeringVariant::Derived => 2.0 * (1.0 - d) * c * c * gamma,
    };
    let first = (lead + second_numerator) / (gamma * gamma);
    let second = 2.0 * c * (1.0 - d).sqrt() / gamma.sqrt();
    Ok((first, second))
}

pub fn unsteering_closed(p: StatePoint, variant: UnsteeringVariant) -> Result<f64> {
    let (first, second) = unsteering_closed_terms(p, variant)?;
    Ok(first.max(second))
}

/// `0.503 t_U`, so the certificate threshold lines up with the steering one.
pub fn scaled_unsteering(t_u: f64) -> Result<f64> {
    if !(t_u >= 0.0) {
        return Err(QcError::Domain(format!("t_U = {t_u} must be non-negative")));
    }
    Ok(C16_THRESHOLD * t_u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{Mat2, C64};
    use crate::states::{family_state, pure_state};
    use std::f64::consts::FRAC_PI_4;

    fn point(theta: f64, d: f64) -> StatePoint {
        StatePoint::new(theta, d).unwrap()
    }

    #[test]
    fn bell_state_is_its_own_canonical_form() {
        let form = canonical_form(&pure_state(FRAC_PI_4).unwrap()).unwrap();
        for v in form.a {
            assert!(v.abs() < 1e-12);
        }
        for (g, w) in form.t_diag.iter().zip([1.0, -1.0, 1.0]) {
            assert!((g - w).abs() < 1e-12);
        }
        assert!((unsteering_t(&pure_state(FRAC_PI_4).unwrap()).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn family_example_at_boundary() {
        let rho = family_state(point(FRAC_PI_4, 0.6));
        let form = canonical_form(&rho).unwrap();
        assert!((form.a[2] - 0.45).abs() < 1e-12);
        assert!((form.t_diag[2] - 0.25).abs() < 1e-12);
        assert!((form.t_diag[0] - 0.5).abs() < 1e-12);
        assert!((form.t_diag[1] + 0.5).abs() < 1e-12);
        assert!((unsteering_t(&rho).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn filtered_bob_marginal_is_maximally_mixed() {
        let filtered = filtered_state(&family_state(point(1.0, 0.3))).unwrap();
        let bob = partial_trace(filtered.matrix(), Subsystem::B);
        assert!(bob.max_abs_diff(&Mat2::identity().scale_real(0.5)) < 1e-12);
    }

    #[test]
    fn late_damping_example() {
        let t = unsteering_t(&family_state(point(FRAC_PI_4, 0.8))).unwrap();
        // gamma = 0.9: a_z = 0.8 * 0.8 / 0.9, T_z = 0.1 / 0.9, 2|T_x| = 2/3.
        let az: f64 = 0.8 * 0.8 / 0.9;
        let want = (az * az + 2.0 * 0.1 / 0.9).max(2.0 / 3.0);
        assert!((t - want).abs() < 1e-12);
        assert!((t - 0.72790).abs() < 1e-5);
    }

    #[test]
    fn ground_state_marginal_is_singular() {
        assert!(matches!(
            canonical_form(&DensityMatrix::ground()),
            Err(QcError::SingularMarginal { .. })
        ));
    }

    #[test]
    fn rejects_off_diagonal_correlations() {
        // A real rotation of Bob about y mixes his x and z correlations.
        let (s, c) = 0.3f64.sin_cos();
        let rot = Mat2::from_rows([
            [C64::new(c, 0.0), C64::new(-s, 0.0)],
            [C64::new(s, 0.0), C64::new(c, 0.0)],
        ]);
        let rotated = family_state(point(0.6, 0.3)).local_unitary(&Mat2::identity(), &rot);
        assert!(matches!(
            canonical_form(&rotated),
            Err(QcError::NonDiagonalCorrelation { .. })
        ));
        assert!(unsteering_t_estimate(&rotated).is_ok());
    }

    #[test]
    fn closed_variants() {
        let p = point(FRAC_PI_4, 0.6);
        assert!((unsteering_closed(p, UnsteeringVariant::Derived).unwrap() - 1.0).abs() < 1e-12);
        let (first, second) = unsteering_closed_terms(p, UnsteeringVariant::AsPrinted).unwrap();
        assert!((first - 1.2025).abs() < 1e-12);
        assert!((second - 1.0).abs() < 1e-12);
        let (_, second_derived) = unsteering_closed_terms(p, UnsteeringVariant::Derived).unwrap();
        assert_eq!(second, second_derived);
        assert!(unsteering_closed(
            point(std::f64::consts::FRAC_PI_2, 0.0),
            UnsteeringVariant::Derived
        )
        .is_err());
    }

    #[test]
    fn scaling() {
        assert!((scaled_unsteering(1.0).unwrap() - 0.503).abs() < 1e-15);
        assert!((scaled_unsteering(2.0).unwrap() - 1.006).abs() < 1e-15);
        let t = unsteering_closed(point(FRAC_PI_4, 0.8), UnsteeringVariant::Derived).unwrap();
        assert!((scaled_unsteering(t).unwrap() - 0.366134).abs() < 1e-6);
        assert!(scaled_unsteering(-0.1).is_err());
    }
}
