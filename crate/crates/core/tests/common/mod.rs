#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;
use qcorr_core::qmath::{Mat2, Mat3, Mat4, Vec3, C64};
use qcorr_core::{DensityMatrix, StatePoint};
use rand::Rng;
use rand_distr::StandardNormal;

/// `n x n` grid over `[0, pi/2] x [0, 1]`, endpoints included.
pub fn grid(n: usize) -> impl Iterator<Item = StatePoint> {
    (0..n).flat_map(move |i| {
        (0..n).map(move |j| {
            let theta = if i + 1 == n {
                FRAC_PI_2
            } else {
                FRAC_PI_2 * i as f64 / (n - 1) as f64
            };
            let d = if j + 1 == n {
                1.0
            } else {
                j as f64 / (n - 1) as f64
            };
            StatePoint::new(theta, d).unwrap()
        })
    })
}

/// `e^{i a} Rz(b) Ry(c) Rz(d)`.
pub fn unitary2([a, b, c, d]: [f64; 4]) -> Mat2 {
    let rz = |t: f64| {
        Mat2::from_rows([
            [C64::from_polar(1.0, -t / 2.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::from_polar(1.0, t / 2.0)],
        ])
    };
    let (s, co) = (c / 2.0).sin_cos();
    let ry = Mat2::from_rows([
        [C64::new(co, 0.0), C64::new(-s, 0.0)],
        [C64::new(s, 0.0), C64::new(co, 0.0)],
    ]);
    (rz(b) * ry * rz(d)).scale(C64::from_polar(1.0, a))
}

pub fn unitary_strategy() -> impl Strategy<Value = Mat2> {
    prop::array::uniform4(-7.0..7.0f64).prop_map(unitary2)
}

/// `G G^dagger / Tr` for a complex matrix with the given real and imaginary parts.
pub fn ginibre_state(parts: &[f64; 32]) -> DensityMatrix {
    let g = Mat4::from_fn(|i, j| C64::new(parts[4 * i + j], parts[16 + 4 * i + j]));
    let m = g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr).hermitian_part()).unwrap()
}

pub fn state_strategy() -> impl Strategy<Value = DensityMatrix> {
    prop::array::uniform32(-1.0..1.0f64)
        .prop_filter("non-degenerate", |p| {
            p.iter().map(|v| v * v).sum::<f64>() > 1e-3
        })
        .prop_map(|p| ginibre_state(&p))
}

pub fn random_state(rng: &mut impl Rng) -> DensityMatrix {
    let parts: [f64; 32] = std::array::from_fn(|_| rng.sample(StandardNormal));
    ginibre_state(&parts)
}

/// Rotation by `angle` about the (unnormalized) axis `k`.
pub fn rotation(k: Vec3, angle: f64) -> Mat3 {
    let n = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    let [x, y, z] = k.map(|v| v / n);
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    [
        [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
        [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
        [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
    ]
}

pub fn rotation_strategy() -> impl Strategy<Value = Mat3> {
    (prop::array::uniform3(-1.0..1.0f64), -7.0..7.0f64)
        .prop_filter("axis", |(k, _)| k.iter().map(|v| v * v).sum::<f64>() > 1e-2)
        .prop_map(|(k, a)| rotation(k, a))
}

pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    let (vals, _) = qcorr_core::qmath::hermitian_eigen(&(*a.matrix() - *b.matrix()));
    0.5 * vals.iter().map(|v| v.abs()).sum::<f64>()
}
