//! Steering inequalities built from Platonic-solid measurement designs.
//!
//! Bob measures spin along `m` axes `n_k`; Alice reports `+-1` outcomes. The
//! steering parameter is `T_m = (1/m) sum_k <A_k (n_k . sigma)>` with each
//! `A_k` chosen optimally, and any local-hidden-state model obeys `T_m <= C_m`
//! where `C_m = (1/m) max_s |sum_k s_k n_k|` over deterministic sign strategies.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QcError, Result};
use crate::qmath::{check_unit, dot, mat3_vec, norm, normalize, Mat3, Vec3};
use crate::states::{correlation_data, family_correlation_matrix, DensityMatrix, StatePoint};

/// LHS bound quoted for the 16-axis design; used as the steering threshold.
pub const C16_THRESHOLD: f64 = 0.503;

/// Largest design `lhs_bound` will enumerate.
pub const MAX_ENUMERATED_AXES: usize = 20;

const GOLDEN: f64 = 1.618_033_988_749_895;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solid {
    Octahedron,
    Cube,
    Icosahedron,
    Dodecahedron,
}

impl Solid {
    pub const ALL: [Solid; 4] = [
        Solid::Octahedron,
        Solid::Cube,
        Solid::Icosahedron,
        Solid::Dodecahedron,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Solid::Octahedron => "octahedron",
            Solid::Cube => "cube",
            Solid::Icosahedron => "icosahedron",
            Solid::Dodecahedron => "dodecahedron",
        }
    }
}

/// Bob's measurement axes. Axes are unit vectors and pairwise non-parallel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisSet {
    axes: Vec<Vec3>,
    label: String,
}

impl AxisSet {
    pub fn new(label: impl Into<String>, axes: Vec<Vec3>) -> Result<Self> {
        if axes.is_empty() {
            return Err(QcError::InvalidAxes("empty axis set".into()));
        }
        for n in &axes {
            check_unit(n)?;
        }
        for i in 0..axes.len() {
            for j in (i + 1)..axes.len() {
                if dot(&axes[i], &axes[j]).abs() >= 1.0 - 1e-9 {
                    return Err(QcError::InvalidAxes(format!(
                        "axes {i} and {j} are parallel"
                    )));
                }
            }
        }
        Ok(Self {
            axes,
            label: label.into(),
        })
    }

    pub fn axes(&self) -> &[Vec3] {
        &self.axes
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.axes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty()
    }

    /// Applies `f` to every axis (rotations, sign flips) and revalidates.
    pub fn map_axes(&self, f: impl Fn(&Vec3) -> Vec3) -> Result<Self> {
        Self::new(self.label.clone(), self.axes.iter().map(f).collect())
    }
}

fn unit(v: Vec3) -> Vec3 {
    normalize(&v, 0.0).expect("nonzero vertex")
}

/// Cyclic permutations `(x, y, z), (z, x, y), (y, z, x)`.
fn cyclic(v: Vec3) -> [Vec3; 3] {
    [v, [v[2], v[0], v[1]], [v[1], v[2], v[0]]]
}

fn cube_diagonals() -> Vec<Vec3> {
    [
        [1.0, 1.0, 1.0],
        [1.0, -1.0, 1.0],
        [-1.0, 1.0, 1.0],
        [-1.0, -1.0, 1.0],
    ]
    .into_iter()
    .map(unit)
    .collect()
}

fn dodecahedron_axes() -> Vec<Vec3> {
    let mut axes = cube_diagonals();
    let inv = 1.0 / GOLDEN;
    for v in [[0.0, inv, GOLDEN], [0.0, -inv, GOLDEN]] {
        axes.extend(cyclic(v).map(unit));
    }
    // Order: (0, +-1/phi, phi), (phi, 0, +-1/phi), (+-1/phi, phi, 0).
    let tail: Vec<Vec3> = axes.split_off(4);
    axes.extend([tail[0], tail[3], tail[1], tail[4], tail[2], tail[5]]);
    axes
}

/// Icosahedron axes in the orientation dual to [`dodecahedron_axes`]: each axis
/// passes through the centre of a dodecahedron face, `(0, phi, +-1)` and its
/// cyclic images.
fn icosahedron_axes() -> Vec<Vec3> {
    let mut axes = Vec::with_capacity(6);
    for v in [[0.0, GOLDEN, 1.0], [0.0, GOLDEN, -1.0]] {
        axes.extend(cyclic(v).map(unit));
    }
    vec![axes[0], axes[3], axes[1], axes[4], axes[2], axes[5]]
}

/// Axis set of one Platonic solid (one axis per antipodal vertex pair).
pub fn platonic_axes(solid: Solid) -> AxisSet {
    let axes = match solid {
        Solid::Octahedron => vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        Solid::Cube => cube_diagonals(),
        Solid::Icosahedron => icosahedron_axes(),
        Solid::Dodecahedron => dodecahedron_axes(),
    };
    AxisSet::new(solid.name(), axes).expect("built-in design is valid")
}

/// Dodecahedron (10 axes) together with its dual icosahedron (6 axes).
pub fn combined_axes_16() -> AxisSet {
    let mut axes = dodecahedron_axes();
    axes.extend(icosahedron_axes());
    AxisSet::new("combined16", axes).expect("built-in design is valid")
}

fn signed_sum_norm_sq(axes: &[Vec3], pattern: u64) -> f64 {
    // Axis 0 always carries +1; bit k-1 of `pattern` flips axis k.
    let mut sum = axes[0];
    for (k, n) in axes.iter().enumerate().skip(1) {
        let s = if pattern >> (k - 1) & 1 == 1 {
            -1.0
        } else {
            1.0
        };
        sum[0] += s * n[0];
        sum[1] += s * n[1];
        sum[2] += s * n[2];
    }
    dot(&sum, &sum)
}

/// `C_m = (1/m) max_s |sum_k s_k n_k|` over all `2^(m-1)` sign patterns with the
/// first sign fixed.
pub fn lhs_bound(axes: &AxisSet) -> Result<f64> {
    let m = axes.len();
    if m > MAX_ENUMERATED_AXES {
        return Err(QcError::TooManyAxes {
            count: m,
            limit: MAX_ENUMERATED_AXES,
        });
    }
    let patterns: u64 = 1 << (m - 1);
    let chunk: u64 = 1 << 10;
    let best_sq = (0..patterns.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let lo = c * chunk;
            let hi = (lo + chunk).min(patterns);
            (lo..hi)
                .map(|p| signed_sum_norm_sq(axes.axes(), p))
                .fold(0.0_f64, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(best_sq.sqrt() / m as f64)
}

/// `(1/m) sum_k |T n_k|`.
pub fn steering_parameter(rho: &DensityMatrix, axes: &AxisSet) -> f64 {
    steering_parameter_from_t(&correlation_data(rho).t, axes)
}

pub fn steering_parameter_from_t(t: &Mat3, axes: &AxisSet) -> f64 {
    let total: f64 = axes.axes().iter().map(|n| norm(&mat3_vec(t, n))).sum();
    total / axes.len() as f64
}

/// Closed-form steering parameter on the damped family.
pub fn steering_parameter_closed(p: StatePoint, axes: &AxisSet) -> f64 {
    steering_parameter_from_t(&family_correlation_matrix(p), axes)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteeringAssessment {
    pub t_m: f64,
    pub c_m: f64,
    pub steerable: bool,
}

impl SteeringAssessment {
    pub fn new(t_m: f64, c_m: f64) -> Self {
        Self {
            t_m,
            c_m,
            steerable: t_m > c_m,
        }
    }
}

/// Steering parameter against the quoted 16-axis threshold.
pub fn assess_combined16(rho: &DensityMatrix) -> SteeringAssessment {
    SteeringAssessment::new(steering_parameter(rho, &combined_axes_16()), C16_THRESHOLD)
}

/// Alice direction maximizing `a^T T n`: `T n / |T n|`.
pub fn alice_optimal_direction(t: &Mat3, bob_dir: &Vec3) -> Result<Vec3> {
    check_unit(bob_dir)?;
    normalize(&mat3_vec(t, bob_dir), 1e-12).ok_or(QcError::ZeroCorrelation)
}

/// One row of the tabulated 16-setting design, evaluated at a state point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table16Row {
    /// 1-based row number.
    pub index: usize,
    /// Bob components as tabulated, unnormalized.
    pub bob_raw: Vec3,
    pub bob_raw_norm: f64,
    pub bob: Vec3,
    /// Alice polar and azimuthal angles from the tabulated formulas.
    pub alice_polar: f64,
    pub alice_azimuth: f64,
    pub alice: Vec3,
    /// Nearest axis of [`combined_axes_16`] and the angle to it (sign-insensitive).
    pub canonical_bob: Vec3,
    pub bob_deviation: f64,
    /// `alice_optimal_direction(T, bob)` and the angle between it and `alice`.
    pub optimal_alice: Option<Vec3>,
    pub alice_deviation: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MismatchKind {
    /// Printed Bob components are not a unit vector.
    NonUnitBob,
    /// Normalized Bob direction is not one of the canonical axes.
    BobAxis,
    /// Printed Alice angles differ from the optimal direction.
    AliceDirection,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub index: usize,
    pub kind: MismatchKind,
    /// Radians for direction mismatches, `|norm - 1|` for [`MismatchKind::NonUnitBob`].
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table16Report {
    pub point: StatePoint,
    pub rows: Vec<Table16Row>,
    pub mismatches: Vec<Mismatch>,
}

const DIRECTION_TOL: f64 = 1e-6;

fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    dot(a, b).clamp(-1.0, 1.0).acos()
}

/// Evaluates the tabulated 16-setting design and compares it with the canonical
/// axes and the optimal Alice directions. Reference data only; never used as a
/// computation path.
pub fn appendix_d_settings(p: StatePoint) -> Table16Report {
    let (s, c) = p.theta().sin_cos();
    let d = p.damping();
    let sqrt5 = 5f64.sqrt();
    let sin2 = (2.0 * p.theta()).sin();
    let cos2 = (2.0 * p.theta()).cos();

    let g1 = 2f64.sqrt() * (1.0 - d) * sin2;
    let d1 = 4.0 * d * (1.0 - d) * s * s - 1.0;
    let d4 = c * c + (1.0 - 2.0 * d).powi(2) * s * s;
    let g5 = 2.0 * (1.0 - d) * sin2;
    let mixed = 2.0 * d - 1.0 - 2.0 * d * d - 2.0 * d * (1.0 - d) * cos2;
    let d5 = (3.0 + sqrt5) * mixed;
    let g9 = -(3.0 + sqrt5) * (1.0 - d) * s * c;
    let g11 = -(1.0 + sqrt5) * (1.0 - d) * s * c;
    let d15 = (1.0 + sqrt5) * mixed;
    let a = GOLDEN;
    let b = 1.0 / 3f64.sqrt();
    let cc = GOLDEN;
    let dd = (0.5 * (5.0 + sqrt5)).sqrt();
    let r3 = 1.0 / 3f64.sqrt();

    let alpha1 = (-g1 / d1).atan();
    let alpha5 = (-g5 / d5).atan();
    let alpha15 = (-g5 / d15).atan();
    let table: [(Vec3, f64, f64); 16] = [
        ([r3, r3, r3], alpha1, (-1.0f64).atan()),
        ([-r3, r3, r3], alpha1, 5.0 * FRAC_PI_4),
        ([r3, -r3, r3], alpha1, FRAC_PI_4),
        ([r3, r3, -r3], PI + (-g1 / d4).atan(), -FRAC_PI_4),
        ([0.0, a / b, a * b], alpha5, FRAC_PI_2),
        ([0.0, -a / b, a * b], alpha5, 3.0 * FRAC_PI_2),
        (
            [a / b, a * b, 0.0],
            FRAC_PI_2,
            (-(3.0 + sqrt5) / 2.0).atan(),
        ),
        (
            [-a / b, a * b, 0.0],
            FRAC_PI_2,
            PI + ((3.0 + sqrt5) / 2.0).atan(),
        ),
        ([a * b, 0.0, a / b], (-g9 / d4).atan(), 0.0),
        ([a * b, 0.0, -a / b], PI + (g9 / d4).atan(), 0.0),
        (
            [0.0, cc / dd, -1.0 / dd],
            PI + (g11 / d4).atan(),
            3.0 * FRAC_PI_2,
        ),
        ([0.0, cc / dd, 1.0 / dd], (g11 / d4).atan(), 3.0 * FRAC_PI_2),
        (
            [cc / dd, 1.0 / dd, 0.0],
            FRAC_PI_2,
            (-2.0 / (1.0 + sqrt5)).atan(),
        ),
        (
            [-cc / dd, 1.0 / dd, 0.0],
            FRAC_PI_2,
            PI + (2.0 / (1.0 + sqrt5)).atan(),
        ),
        ([1.0 / dd, 0.0, cc / dd], alpha15, 0.0),
        ([-1.0 / dd, 0.0, cc / dd], alpha15, PI),
    ];

    let canonical = combined_axes_16();
    let t = family_correlation_matrix(p);
    let mut rows = Vec::with_capacity(16);
    let mut mismatches = Vec::new();
    for (i, (raw, polar, azimuth)) in table.into_iter().enumerate() {
        let index = i + 1;
        let raw_norm = norm(&raw);
        let bob = normalize(&raw, 0.0).expect("tabulated rows are nonzero");
        let (canonical_bob, bob_deviation) = canonical
            .axes()
            .iter()
            .map(|n| (*n, dot(n, &bob).abs().min(1.0).acos()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("nonempty");
        let alice = [
            polar.sin() * azimuth.cos(),
            polar.sin() * azimuth.sin(),
            polar.cos(),
        ];
        let optimal_alice = alice_optimal_direction(&t, &bob).ok();
        let alice_deviation = optimal_alice.map(|o| angle_between(&o, &alice));

        if (raw_norm - 1.0).abs() > 1e-9 {
            mismatches.push(Mismatch {
                index,
                kind: MismatchKind::NonUnitBob,
                deviation: (raw_norm - 1.0).abs(),
            });
        }
        if bob_deviation > DIRECTION_TOL {
            mismatches.push(Mismatch {
                index,
                kind: MismatchKind::BobAxis,
                deviation: bob_deviation,
            });
        }
        if let Some(dev) = alice_deviation.filter(|dev| *dev > DIRECTION_TOL) {
            mismatches.push(Mismatch {
                index,
                kind: MismatchKind::AliceDirection,
                deviation: dev,
            });
        }
        rows.push(Table16Row {
            index,
            bob_raw: raw,
            bob_raw_norm: raw_norm,
            bob,
            alice_polar: polar,
            alice_azimuth: azimuth,
            alice,
            canonical_bob,
            bob_deviation,
            optimal_alice,
            alice_deviation,
        });
    }
    Table16Report {
        point: p,
        rows,
        mismatches,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{family_state, pure_state};

    fn point(theta: f64, d: f64) -> StatePoint {
        StatePoint::new(theta, d).unwrap()
    }

    /// Brute-force LHS bound straight from the definition, all `2^m` patterns.
    fn brute_lhs(axes: &[Vec3]) -> f64 {
        let m = axes.len();
        let mut best = 0.0_f64;
        for pattern in 0..(1u64 << m) {
            let mut sum = [0.0; 3];
            for (k, n) in axes.iter().enumerate() {
                let s = if pattern >> k & 1 == 1 { -1.0 } else { 1.0 };
                for i in 0..3 {
                    sum[i] += s * n[i];
                }
            }
            best = best.max(norm(&sum));
        }
        best / m as f64
    }

    #[test]
    fn axis_counts_and_units() {
        let counts: Vec<usize> = Solid::ALL.iter().map(|s| platonic_axes(*s).len()).collect();
        assert_eq!(counts, vec![3, 4, 6, 10]);
        let oct = platonic_axes(Solid::Octahedron);
        for (i, a) in oct.axes().iter().enumerate() {
            for (j, b) in oct.axes().iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(a, b) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn dodecahedron_contains_cube_diagonals() {
        let dod = platonic_axes(Solid::Dodecahedron);
        let third = dod
            .axes()
            .iter()
            .filter(|n| (n[2] * n[2] - 1.0 / 3.0).abs() < 1e-12)
            .count();
        assert_eq!(third, 4);
        // Every vertex sits at the same distance sqrt(3) before normalisation,
        // so angles between neighbouring axes are the dodecahedral ones.
        for n in dod.axes() {
            assert!((norm(n) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn icosahedron_polar_multiset() {
        let d2 = 1.0 + GOLDEN * GOLDEN;
        let mut got: Vec<f64> = platonic_axes(Solid::Icosahedron)
            .axes()
            .iter()
            .map(|n| n[2] * n[2])
            .collect();
        got.sort_by(f64::total_cmp);
        let mut want = vec![
            GOLDEN * GOLDEN / d2,
            GOLDEN * GOLDEN / d2,
            0.0,
            0.0,
            1.0 / d2,
            1.0 / d2,
        ];
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-15);
        }
    }

    #[test]
    fn icosahedron_axes_are_dodecahedron_face_normals() {
        // Each face centre of the dodecahedron is equidistant (in angle) from
        // the five vertices around it.
        let mut vertices: Vec<Vec3> = Vec::new();
        for n in platonic_axes(Solid::Dodecahedron).axes() {
            vertices.push(*n);
            vertices.push([-n[0], -n[1], -n[2]]);
        }
        for axis in platonic_axes(Solid::Icosahedron).axes() {
            let mut dots: Vec<f64> = vertices.iter().map(|v| dot(v, axis)).collect();
            dots.sort_by(|a, b| b.total_cmp(a));
            for k in 1..5 {
                assert!((dots[k] - dots[0]).abs() < 1e-12, "{dots:?}");
            }
            assert!(dots[5] < dots[0] - 0.1);
        }
    }

    #[test]
    fn combined_design() {
        let set = combined_axes_16();
        assert_eq!(set.len(), 16);
        assert!(AxisSet::new("copy", set.axes().to_vec()).is_ok());
    }

    #[test]
    fn lhs_bound_matches_brute_force() {
        for solid in Solid::ALL {
            let set = platonic_axes(solid);
            let fast = lhs_bound(&set).unwrap();
            assert!((fast - brute_lhs(set.axes())).abs() < 1e-12, "{solid:?}");
        }
    }

    #[test]
    fn lhs_bound_octahedron_by_hand() {
        // Every sign pattern on x, y, z gives |sum| = sqrt(3).
        let v = lhs_bound(&platonic_axes(Solid::Octahedron)).unwrap();
        assert!((v - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn lhs_bound_cube() {
        // All four diagonals with + sign add to (0, 0, 4)/sqrt(3).
        let v = lhs_bound(&platonic_axes(Solid::Cube)).unwrap();
        assert!((v - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn lhs_bound_known_designs() {
        let ico = lhs_bound(&platonic_axes(Solid::Icosahedron)).unwrap();
        let dod = lhs_bound(&platonic_axes(Solid::Dodecahedron)).unwrap();
        assert!((ico - 0.5393).abs() < 1e-4);
        assert!((dod - 0.5236).abs() < 1e-4);
    }

    #[test]
    fn lhs_bound_too_many_axes() {
        let axes: Vec<Vec3> = (0..21)
            .map(|k| {
                let phi = k as f64 * 0.29;
                let z = -0.95 + 0.09 * k as f64;
                let r = (1.0 - z * z).sqrt();
                [r * phi.cos(), r * phi.sin(), z]
            })
            .collect();
        let set = AxisSet::new("many", axes).unwrap();
        assert!(matches!(
            lhs_bound(&set),
            Err(QcError::TooManyAxes { count: 21, .. })
        ));
    }

    #[test]
    fn axis_set_validation() {
        assert!(AxisSet::new("x", vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]).is_err());
        assert!(AxisSet::new("x", vec![[2.0, 0.0, 0.0]]).is_err());
        assert!(AxisSet::new("x", vec![]).is_err());
    }

    #[test]
    fn steering_examples() {
        let combined = combined_axes_16();
        let bell = pure_state(FRAC_PI_4).unwrap();
        for solid in Solid::ALL {
            assert!((steering_parameter(&bell, &platonic_axes(solid)) - 1.0).abs() < 1e-12);
        }
        let half = family_state(point(FRAC_PI_4, 0.5));
        assert!((steering_parameter(&half, &combined) - 0.5).abs() < 1e-12);
        let product = steering_parameter(&DensityMatrix::ground(), &combined);
        let want: f64 = combined.axes().iter().map(|n| n[2].abs()).sum::<f64>() / 16.0;
        assert!((product - want).abs() < 1e-15);
        assert!(product < C16_THRESHOLD);
    }

    #[test]
    fn closed_matches_trace_path() {
        let combined = combined_axes_16();
        for &(theta, d) in &[(0.3, 0.2), (1.2, 0.6), (FRAC_PI_4, 0.49)] {
            let p = point(theta, d);
            let a = steering_parameter(&family_state(p), &combined);
            let b = steering_parameter_closed(p, &combined);
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn assessment_flag() {
        let a = assess_combined16(&pure_state(FRAC_PI_4).unwrap());
        assert!(a.steerable);
        let b = assess_combined16(&DensityMatrix::ground());
        assert!(!b.steerable);
    }

    #[test]
    fn alice_direction_examples() {
        let t: Mat3 = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(
            alice_optimal_direction(&t, &[0.0, 0.0, 1.0]).unwrap(),
            [0.0, 0.0, 1.0]
        );
        assert_eq!(
            alice_optimal_direction(&t, &[0.0, 1.0, 0.0]).unwrap(),
            [0.0, -1.0, 0.0]
        );
        let t: Mat3 = [[0.5, 0.0, 0.0], [0.0, -0.5, 0.0], [0.0, 0.0, 0.50005]];
        let r3 = 1.0 / 3f64.sqrt();
        let n = [r3, r3, r3];
        let a = alice_optimal_direction(&t, &n).unwrap();
        assert!((a[1].atan2(a[0]) - (-1.0f64).atan()).abs() < 1e-12);
        assert!((a[1] / a[0] + n[1] / n[0]).abs() < 1e-12);
        let zero: Mat3 = [[0.0; 3]; 3];
        assert_eq!(
            alice_optimal_direction(&zero, &n),
            Err(QcError::ZeroCorrelation)
        );
    }

    #[test]
    fn table16_cube_rows_match_canonical_axes() {
        let report = appendix_d_settings(point(FRAC_PI_4, 0.3));
        for row in &report.rows[0..4] {
            assert!(row.bob_deviation < 1e-12, "row {}", row.index);
            assert!((row.bob_raw_norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn table16_icosahedron_rows_are_unit() {
        let report = appendix_d_settings(point(0.9, 0.4));
        for row in &report.rows[10..16] {
            assert!((row.bob_raw_norm - 1.0).abs() < 1e-12, "row {}", row.index);
            assert!(row.bob_deviation < 1e-12, "row {}", row.index);
        }
    }

    #[test]
    fn table16_flags_non_unit_rows() {
        let report = appendix_d_settings(point(FRAC_PI_4, 0.3));
        for row in &report.rows[4..10] {
            assert!((row.bob_raw_norm - 2.955).abs() < 1e-3, "row {}", row.index);
            assert!(report
                .mismatches
                .iter()
                .any(|m| m.index == row.index && m.kind == MismatchKind::NonUnitBob));
        }
        for row in report.rows.iter().filter(|r| r.index <= 4 || r.index > 10) {
            assert!(!report
                .mismatches
                .iter()
                .any(|m| m.index == row.index && m.kind != MismatchKind::AliceDirection));
        }
    }

    #[test]
    fn table16_first_row_alice_is_optimal() {
        for &(theta, d) in &[(FRAC_PI_4, 0.5), (0.7, 0.2), (1.1, 0.35)] {
            let report = appendix_d_settings(point(theta, d));
            let row = &report.rows[0];
            assert!(row.alice_deviation.unwrap() < 1e-9, "{theta} {d}: {row:?}");
        }
    }
}
