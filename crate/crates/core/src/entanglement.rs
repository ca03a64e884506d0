//! Concurrence and the entanglement-sudden-death line.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::error::{QcError, Result};
use crate::qmath::{hermitian_eigen, singular_values, tensor, Mat4, SIGMA_Y};
use crate::states::{DensityMatrix, StatePoint};

/// Eigenvalues of `rho * rho_tilde` (descending) and the resulting concurrence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceBreakdown {
    pub lambdas: [f64; 4],
    pub value: f64,
}

/// `(sigma_y (x) sigma_y) rho^* (sigma_y (x) sigma_y)`.
pub fn spin_flip(rho: &DensityMatrix) -> Mat4 {
    let yy = tensor(&SIGMA_Y, &SIGMA_Y);
    (&(&yy * &rho.matrix().conj()) * &yy).hermitian_part()
}

/// Wootters concurrence `max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4))`.
///
/// The `sqrt(l_i)` are taken as the singular values of `W^T (sigma_y (x) sigma_y) W`
/// for `rho = W W^dagger`, which avoids square roots of round-off residue in the
/// small eigenvalues of `rho rho_tilde`.
pub fn concurrence(rho: &DensityMatrix) -> Result<ConcurrenceBreakdown> {
    let (p, v) = hermitian_eigen(rho.matrix());
    let w = Mat4::from_fn(|i, k| v[(i, k)] * p[k].max(0.0).sqrt());
    let yy = tensor(&SIGMA_Y, &SIGMA_Y);
    let tau = &(&w.transpose() * &yy) * &w;
    let roots = singular_values(&tau);
    let [l1, l2, l3, l4] = roots;
    Ok(ConcurrenceBreakdown {
        lambdas: roots.map(|r| r * r),
        value: (l1 - l2 - l3 - l4).max(0.0),
    })
}

/// `2 (1-D) sin(theta) (cos(theta) - D sin(theta))` before clamping at zero.
///
/// Positive exactly where the family state is entangled; used as the root-finding
/// function for the separability boundary.
pub fn signed_concurrence_closed(p: StatePoint) -> f64 {
    let (s, c) = p.theta().sin_cos();
    let d = p.damping();
    2.0 * (1.0 - d) * s * (c - d * s)
}

pub fn concurrence_closed(p: StatePoint) -> f64 {
    signed_concurrence_closed(p).max(0.0)
}

/// Damping at which the family becomes separable: `cot(theta)` for
/// `theta >= pi/4`, `None` below (concurrence only vanishes at `D = 1`).
pub fn esd_boundary(theta: f64) -> Result<Option<f64>> {
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(QcError::Domain(format!(
            "theta = {theta} must lie strictly inside (0, pi/2)"
        )));
    }
    if theta < FRAC_PI_4 {
        return Ok(None);
    }
    Ok(Some((1.0 / theta.tan()).min(1.0)))
}
