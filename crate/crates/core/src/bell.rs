//! CHSH nonlocality: the Horodecki maximum, explicit-setting evaluation and
//! optimal-setting synthesis.

use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{QcError, Result};
use crate::qmath::{
    add, check_unit, cross, gram, mat3_vec, normalize, scale, sub, symmetric_eigen3,
    symmetric_eigvals3, Vec3,
};
use crate::states::{correlation_data, CorrelationData, DensityMatrix, StatePoint};

/// Two measurement directions per party.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChshSettings {
    alice: [Vec3; 2],
    bob: [Vec3; 2],
}

impl ChshSettings {
    pub fn new(alice: [Vec3; 2], bob: [Vec3; 2]) -> Result<Self> {
        for n in alice.iter().chain(bob.iter()) {
            check_unit(n)?;
        }
        Ok(Self { alice, bob })
    }

    /// Alice `x, z`; Bob at `+-45` degrees between them.
    pub fn canonical_xz() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            alice: [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
            bob: [[h, 0.0, h], [h, 0.0, -h]],
        }
    }

    pub fn alice(&self) -> &[Vec3; 2] {
        &self.alice
    }

    pub fn bob(&self) -> &[Vec3; 2] {
        &self.bob
    }

    /// The four `(alice, bob)` direction pairs in the order `11, 12, 21, 22`.
    pub fn pairs(&self) -> [(Vec3, Vec3); 4] {
        [
            (self.alice[0], self.bob[0]),
            (self.alice[0], self.bob[1]),
            (self.alice[1], self.bob[0]),
            (self.alice[1], self.bob[1]),
        ]
    }
}

/// Combines four correlators `E11 + E12 + E21 - E22`.
pub fn chsh_combination(correlators: [f64; 4]) -> f64 {
    correlators[0] + correlators[1] + correlators[2] - correlators[3]
}

/// Which of the two family branches attains the maximal CHSH value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellBranch {
    /// `2 sqrt(2 lambda_2)`: both optimal directions in the xy-plane.
    #[serde(rename = "xy")]
    XyPlane,
    /// `2 sqrt(lambda_1 + lambda_2)`: optimal directions span z and a transverse axis.
    #[serde(rename = "xz")]
    XzPlane,
}

impl std::str::FromStr for BellBranch {
    type Err = QcError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xy" => Ok(BellBranch::XyPlane),
            "xz" => Ok(BellBranch::XzPlane),
            _ => Err(QcError::Domain(format!("unknown CHSH branch {s:?}"))),
        }
    }
}

impl BellBranch {
    pub fn as_str(&self) -> &'static str {
        match self {
            BellBranch::XyPlane => "xy",
            BellBranch::XzPlane => "xz",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellClosed {
    pub value: f64,
    pub branch: BellBranch,
}

/// Maximal CHSH value `2 sqrt(t1 + t2)` over the two largest eigenvalues of `T^T T`.
pub fn horodecki_s(rho: &DensityMatrix) -> f64 {
    horodecki_s_from(&correlation_data(rho))
}

pub fn horodecki_s_from(data: &CorrelationData) -> f64 {
    let [t1, t2, _] = symmetric_eigvals3(&gram(&data.t));
    2.0 * (t1.max(0.0) + t2.max(0.0)).sqrt()
}

/// Closed-form maximal CHSH value on the damped family.
pub fn bell_s_closed(p: StatePoint) -> BellClosed {
    let (s, c) = p.theta().sin_cos();
    let d = p.damping();
    let lambda1 = (c * c + (1.0 - 2.0 * d).powi(2) * s * s).powi(2);
    let lambda2 = ((1.0 - d) * (2.0 * p.theta()).sin()).powi(2);
    let xy = 2.0 * (2.0 * lambda2).sqrt();
    let xz = 2.0 * (lambda1 + lambda2).sqrt();
    if xy >= xz {
        BellClosed {
            value: xy,
            branch: BellBranch::XyPlane,
        }
    } else {
        BellClosed {
            value: xz,
            branch: BellBranch::XzPlane,
        }
    }
}

pub fn chsh_value(rho: &DensityMatrix, settings: &ChshSettings) -> f64 {
    chsh_value_from(&correlation_data(rho), settings)
}

pub fn chsh_value_from(data: &CorrelationData, settings: &ChshSettings) -> f64 {
    chsh_combination(settings.pairs().map(|(a, b)| data.correlator(&a, &b)))
}

/// Hand-derived settings for the `theta = pi/4` family.
///
/// `D <= 0.5`: Alice `{x, y}`, Bob in the xy-plane at azimuths `7pi/4` and `pi/4`.
/// `D > 0.5`: Alice `{x, z}`, Bob in the xz-plane at polar angles `chi_1`, `chi_2`
/// with `tan(chi_1) = (1-D) / (1 - 2(1-D)D)` and `chi_2 = pi - chi_1`.
/// The two scenarios tie at `D = 0.5`; the xy scenario is used there.
pub fn appendix_c_settings(damping: f64) -> Result<ChshSettings> {
    if !(0.0..=1.0).contains(&damping) {
        return Err(QcError::Domain(format!(
            "damping = {damping} outside [0, 1]"
        )));
    }
    if damping <= 0.5 {
        let azimuths = [7.0 * FRAC_PI_4, FRAC_PI_4];
        let bob = azimuths.map(|phi: f64| [phi.cos(), phi.sin(), 0.0]);
        return ChshSettings::new([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], bob);
    }
    let ratio = (1.0 - damping) / (1.0 - 2.0 * (1.0 - damping) * damping);
    let chi1 = ratio.atan();
    let chi2 = PI + (-ratio).atan();
    let bob = [chi1, chi2].map(|chi: f64| [chi.sin(), 0.0, chi.cos()]);
    ChshSettings::new([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]], bob)
}

fn any_perpendicular(n: &Vec3) -> Vec3 {
    let helper = if n[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    normalize(&cross(n, &helper), 0.0).expect("helper is never parallel to n")
}

/// Settings attaining the Horodecki maximum.
///
/// Bob measures `c1 cos(mu) +- c2 sin(mu)` for the top two eigenvectors of
/// `T^T T` with `tan(mu) = sqrt(t2 / t1)`; Alice measures along `T(b1 +- b2)`.
pub fn optimal_chsh_settings(rho: &DensityMatrix) -> Result<ChshSettings> {
    optimal_chsh_settings_from(&correlation_data(rho))
}

pub fn optimal_chsh_settings_from(data: &CorrelationData) -> Result<ChshSettings> {
    let ([t1, t2, _], [c1, c2, _]) = symmetric_eigen3(&gram(&data.t));
    if t1 < 1e-12 {
        return Err(QcError::DegenerateCorrelation { largest: t1 });
    }
    let t2 = t2.max(0.0);
    let mu = (t2 / t1).sqrt().atan();
    let (sin_mu, cos_mu) = mu.sin_cos();
    let b1 = add(&scale(&c1, cos_mu), &scale(&c2, sin_mu));
    let b2 = sub(&scale(&c1, cos_mu), &scale(&c2, sin_mu));
    let a1 = normalize(&mat3_vec(&data.t, &add(&b1, &b2)), 1e-300)
        .ok_or(QcError::DegenerateCorrelation { largest: t1 })?;
    // When t2 = 0 the second Alice direction multiplies a zero vector.
    let a2 = normalize(&mat3_vec(&data.t, &sub(&b1, &b2)), 1e-13)
        .unwrap_or_else(|| any_perpendicular(&a1));
    let unit = |v: Vec3| normalize(&v, 0.0).expect("unit combination");
    ChshSettings::new([a1, a2], [unit(b1), unit(b2)])
}
