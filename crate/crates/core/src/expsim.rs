//! Finite-statistics emulation of a photon-counting experiment: Poisson
//! coincidence counts, Pauli tomography and bootstrap error bars.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell::{chsh_combination, optimal_chsh_settings, ChshSettings};
use crate::entanglement::concurrence;
use crate::error::{QcError, Result};
use crate::qmath::{check_unit, hermitian_eigen, pauli, tensor, Mat4, Vec3};
use crate::states::{correlation_data, outcome_probabilities, DensityMatrix};
use crate::steering::{alice_optimal_direction, combined_axes_16};
use crate::unsteering::unsteering_t_estimate;

/// Counts for outcomes `(0,0), (0,1), (1,0), (1,1)` of one setting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub setting_id: usize,
    pub alice_dir: Vec3,
    pub bob_dir: Vec3,
    pub counts: [u64; 4],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithError {
    pub value: f64,
    pub std_error: f64,
    pub replicas: usize,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Independent generator for `(seed, replica, setting, outcome)`.
fn substream(seed: u64, replica: u64, setting: u64, outcome: u64) -> ChaCha8Rng {
    let mut h = splitmix(seed);
    for part in [replica, setting, outcome] {
        h = splitmix(h ^ part);
    }
    ChaCha8Rng::seed_from_u64(h)
}

fn poisson_draw(mean: f64, rng: &mut ChaCha8Rng) -> u64 {
    if !(mean > 0.0) {
        return 0;
    }
    let dist = Poisson::new(mean).expect("positive finite mean");
    dist.sample(rng) as u64
}

fn check_mean(mean_counts: f64) -> Result<()> {
    if !(mean_counts > 0.0 && mean_counts.is_finite()) {
        return Err(QcError::Domain(format!(
            "mean_counts = {mean_counts} must be positive and finite"
        )));
    }
    Ok(())
}

/// Poisson counts with mean `mean_counts * p(a, b)` for every setting and outcome.
pub fn simulate_counts(
    rho: &DensityMatrix,
    settings: &[(Vec3, Vec3)],
    mean_counts: f64,
    seed: u64,
) -> Result<Vec<CountRecord>> {
    check_mean(mean_counts)?;
    simulate_replica(rho, settings, mean_counts, seed, 0)
}

fn simulate_replica(
    rho: &DensityMatrix,
    settings: &[(Vec3, Vec3)],
    mean_counts: f64,
    seed: u64,
    replica: u64,
) -> Result<Vec<CountRecord>> {
    settings
        .iter()
        .enumerate()
        .map(|(k, (alice_dir, bob_dir))| {
            let probs = outcome_probabilities(rho, alice_dir, bob_dir)?;
            let counts = std::array::from_fn(|o| {
                let mut rng = substream(seed, replica, k as u64, o as u64);
                poisson_draw(mean_counts * probs[o].max(0.0), &mut rng)
            });
            Ok(CountRecord {
                setting_id: k,
                alice_dir: *alice_dir,
                bob_dir: *bob_dir,
                counts,
            })
        })
        .collect()
}

/// Parametric resample: every count redrawn from a Poisson law centred on itself.
fn resample(records: &[CountRecord], seed: u64, replica: u64) -> Vec<CountRecord> {
    records
        .iter()
        .enumerate()
        .map(|(k, r)| CountRecord {
            counts: std::array::from_fn(|o| {
                let mut rng = substream(seed, replica, k as u64, o as u64);
                poisson_draw(r.counts[o] as f64, &mut rng)
            }),
            ..*r
        })
        .collect()
}

/// `<A (x) B>` from outcome counts; `None` without events.
pub fn correlator_estimate(counts: &[f64; 4]) -> Option<f64> {
    let total: f64 = counts.iter().sum();
    (total > 0.0).then(|| (counts[0] - counts[1] - counts[2] + counts[3]) / total)
}

const AXES: [Vec3; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// The nine `(sigma_i, sigma_j)` measurement pairs, Alice index outer.
pub fn pauli_settings() -> Vec<(Vec3, Vec3)> {
    (0..9).map(|k| (AXES[k / 3], AXES[k % 3])).collect()
}

/// Counts of the nine Pauli settings, indexed `[alice][bob][outcome]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliCounts(pub [[[f64; 4]; 3]; 3]);

impl PauliCounts {
    /// Picks the nine Pauli settings out of `records` by direction.
    pub fn from_records(records: &[CountRecord]) -> Result<Self> {
        let mut out = [[[f64::NAN; 4]; 3]; 3];
        for r in records {
            let (Some(i), Some(j)) = (axis_index(&r.alice_dir), axis_index(&r.bob_dir)) else {
                continue;
            };
            out[i][j] = r.counts.map(|c| c as f64);
        }
        for (k, row) in out.iter().flatten().enumerate() {
            if row[0].is_nan() {
                return Err(QcError::InsufficientData(format!(
                    "missing Pauli setting ({}, {})",
                    "xyz".as_bytes()[k / 3] as char,
                    "xyz".as_bytes()[k % 3] as char
                )));
            }
        }
        Ok(Self(out))
    }

    /// Noise-free counts `mean * p(a, b)`.
    pub fn expected(rho: &DensityMatrix, mean: f64) -> Result<Self> {
        let mut out = [[[0.0; 4]; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = outcome_probabilities(rho, &AXES[i], &AXES[j])?.map(|p| p * mean);
            }
        }
        Ok(Self(out))
    }
}

fn axis_index(n: &Vec3) -> Option<usize> {
    AXES.iter()
        .position(|e| e.iter().zip(n).all(|(a, b)| (a - b).abs() < 1e-12))
}

/// Hermitian unit-trace estimate `(1/4) sum S_ij sigma_i (x) sigma_j`.
///
/// Local expectations are averaged over the three settings sharing that side's axis.
pub fn linear_inversion(counts: &PauliCounts) -> Result<Mat4> {
    let mut s = [[0.0; 4]; 4];
    s[0][0] = 1.0;
    for i in 0..3 {
        for j in 0..3 {
            let c = &counts.0[i][j];
            let total: f64 = c.iter().sum();
            if !(total > 0.0) || c.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(QcError::InsufficientData(format!(
                    "setting ({i}, {j}) has no usable counts"
                )));
            }
            s[i + 1][j + 1] = (c[0] - c[1] - c[2] + c[3]) / total;
            s[i + 1][0] += (c[0] + c[1] - c[2] - c[3]) / total / 3.0;
            s[0][j + 1] += (c[0] - c[1] + c[2] - c[3]) / total / 3.0;
        }
    }
    let mut m = Mat4::zeros();
    for (i, row) in s.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            m = m + tensor(&pauli(i), &pauli(j)).scale_real(0.25 * v);
        }
    }
    Ok(m.hermitian_part())
}

/// Nearest density matrix by eigenvalue clipping: negative eigenvalues go to
/// zero and the deficit is taken uniformly from the remaining positive ones.
pub fn psd_projection(m: &Mat4) -> Result<DensityMatrix> {
    if !m.is_finite() {
        return Err(QcError::InsufficientData("estimate is not finite".into()));
    }
    let (mut values, vectors) = hermitian_eigen(&m.hermitian_part());
    loop {
        let deficit: f64 = values.iter().filter(|v| **v < 0.0).sum();
        if deficit == 0.0 {
            break;
        }
        let positive = values.iter().filter(|v| **v > 0.0).count();
        if positive == 0 {
            return Err(QcError::InsufficientData(
                "estimate has no positive spectrum".into(),
            ));
        }
        for v in values.iter_mut() {
            *v = if *v > 0.0 {
                *v + deficit / positive as f64
            } else {
                0.0
            };
        }
    }
    let trace: f64 = values.iter().sum();
    if !(trace > 0.0) {
        return Err(QcError::InsufficientData("estimate has zero trace".into()));
    }
    let values = values.map(|v| v / trace);
    DensityMatrix::new(Mat4::from_spectrum(&values, &vectors).hermitian_part())
}

/// Linear inversion followed by [`psd_projection`].
pub fn tomography(counts: &PauliCounts) -> Result<DensityMatrix> {
    psd_projection(&linear_inversion(counts)?)
}

pub fn tomography_from_records(records: &[CountRecord]) -> Result<DensityMatrix> {
    tomography(&PauliCounts::from_records(records)?)
}

/// Point estimates recomputed from one set of counts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointEstimates {
    pub concurrence: f64,
    pub bell_s: f64,
    pub t16: f64,
    pub t_u: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimates {
    pub concurrence: EstimateWithError,
    pub bell_s: EstimateWithError,
    pub t16: EstimateWithError,
    pub t_u: EstimateWithError,
}

/// Measurement plan of one experiment run.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentPlan {
    pub chsh: ChshSettings,
    /// Bob axes paired with Alice's best response to each.
    pub steering: Vec<(Vec3, Vec3)>,
}

impl ExperimentPlan {
    /// CHSH settings tuned to `rho`; each of the 16 steering axes paired with
    /// Alice's direction `T n / |T n|` (or `n` itself where `T n` vanishes).
    pub fn for_state(rho: &DensityMatrix) -> Result<Self> {
        let chsh = optimal_chsh_settings(rho).or_else(|e| match e {
            QcError::DegenerateCorrelation { .. } => Ok(ChshSettings::canonical_xz()),
            e => Err(e),
        })?;
        let t = correlation_data(rho).t;
        let steering = combined_axes_16()
            .axes()
            .iter()
            .map(|n| match alice_optimal_direction(&t, n) {
                Ok(a) => Ok((a, *n)),
                Err(QcError::ZeroCorrelation) => Ok((*n, *n)),
                Err(e) => Err(e),
            })
            .collect::<Result<_>>()?;
        Ok(Self { chsh, steering })
    }

    /// CHSH pairs, then steering pairs, then the nine Pauli pairs.
    pub fn settings(&self) -> Vec<(Vec3, Vec3)> {
        let mut out: Vec<(Vec3, Vec3)> = self.chsh.pairs().to_vec();
        out.extend(self.steering.iter().copied());
        out.extend(pauli_settings());
        out
    }

    pub fn estimate(&self, records: &[CountRecord]) -> Result<PointEstimates> {
        let expected = 4 + self.steering.len() + 9;
        if records.len() != expected {
            return Err(QcError::InsufficientData(format!(
                "expected {expected} settings, got {}",
                records.len()
            )));
        }
        let corr = |r: &CountRecord| {
            correlator_estimate(&r.counts.map(|c| c as f64)).ok_or_else(|| {
                QcError::InsufficientData(format!("setting {} recorded no events", r.setting_id))
            })
        };
        let chsh: [f64; 4] = [
            corr(&records[0])?,
            corr(&records[1])?,
            corr(&records[2])?,
            corr(&records[3])?,
        ];
        let steer = &records[4..4 + self.steering.len()];
        let t16 = steer.iter().map(corr).sum::<Result<f64>>()? / steer.len() as f64;
        let rho_hat = tomography_from_records(&records[4 + self.steering.len()..])?;
        Ok(PointEstimates {
            concurrence: concurrence(&rho_hat)?.value,
            bell_s: chsh_combination(chsh),
            t16,
            t_u: unsteering_t_estimate(&rho_hat)?,
        })
    }
}

fn summarize(value: f64, samples: impl Iterator<Item = f64>, replicas: usize) -> EstimateWithError {
    let samples: Vec<f64> = samples.collect();
    let mean = samples.iter().sum::<f64>() / replicas as f64;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (replicas - 1) as f64;
    EstimateWithError {
        value,
        std_error: var.sqrt(),
        replicas,
    }
}

/// Simulated run at `mean_counts` per setting with parametric-bootstrap errors.
///
/// S and T16 come straight from inequality-test counts; C and t_U from the
/// tomographic reconstruction.
pub fn estimate_measures(
    rho_true: &DensityMatrix,
    mean_counts: f64,
    seed: u64,
    replicas: usize,
) -> Result<MeasureEstimates> {
    if replicas < 2 {
        return Err(QcError::Domain(format!(
            "replicas = {replicas} must be at least 2"
        )));
    }
    check_mean(mean_counts)?;
    let plan = ExperimentPlan::for_state(rho_true)?;
    let settings = plan.settings();
    for (a, b) in &settings {
        check_unit(a)?;
        check_unit(b)?;
    }
    let observed = simulate_replica(rho_true, &settings, mean_counts, seed, 0)?;
    let point = plan.estimate(&observed)?;
    let boot: Vec<PointEstimates> = (1..=replicas as u64)
        .into_par_iter()
        .map(|r| plan.estimate(&resample(&observed, seed, r)))
        .collect::<Result<_>>()?;
    Ok(MeasureEstimates {
        concurrence: summarize(
            point.concurrence,
            boot.iter().map(|b| b.concurrence),
            replicas,
        ),
        bell_s: summarize(point.bell_s, boot.iter().map(|b| b.bell_s), replicas),
        t16: summarize(point.t16, boot.iter().map(|b| b.t16), replicas),
        t_u: summarize(point.t_u, boot.iter().map(|b| b.t_u), replicas),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{family_state, pure_state, StatePoint};
    use std::f64::consts::FRAC_PI_4;

    const Z: Vec3 = [0.0, 0.0, 1.0];

    fn family(theta: f64, d: f64) -> DensityMatrix {
        family_state(StatePoint::new(theta, d).unwrap())
    }

    fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
        let (vals, _) = hermitian_eigen(&(*a.matrix() - *b.matrix()));
        0.5 * vals.iter().map(|v| v.abs()).sum::<f64>()
    }

    #[test]
    fn bell_state_zz_counts() {
        let rho = pure_state(FRAC_PI_4).unwrap();
        let rec = simulate_counts(&rho, &[(Z, Z)], 1e4, 7).unwrap();
        let c = rec[0].counts;
        assert_eq!((c[1], c[2]), (0, 0));
        for v in [c[0], c[3]] {
            assert!((v as f64 - 5000.0).abs() < 5.0 * 5000f64.sqrt());
        }
    }

    #[test]
    fn low_flux_mostly_zero() {
        let rho = pure_state(FRAC_PI_4).unwrap();
        let rec = simulate_counts(&rho, &pauli_settings(), 1e-3, 3).unwrap();
        let total: u64 = rec.iter().flat_map(|r| r.counts).sum();
        assert!(total <= 2);
        assert!(matches!(
            tomography_from_records(&rec),
            Err(QcError::InsufficientData(_))
        ));
    }

    #[test]
    fn damped_zz_frequency() {
        let rec = simulate_counts(&family(FRAC_PI_4, 0.5), &[(Z, Z)], 1e5, 11).unwrap();
        let c = rec[0].counts.map(|v| v as f64);
        let total: f64 = c.iter().sum();
        let f = c[0] / total;
        let sigma = (0.625 * 0.375 / total).sqrt();
        assert!((f - 0.625).abs() < 4.0 * sigma, "{f}");
    }

    #[test]
    fn simulation_is_order_independent() {
        let rho = family(0.7, 0.3);
        let settings = pauli_settings();
        let a = simulate_counts(&rho, &settings, 1e3, 5).unwrap();
        let b = simulate_counts(&rho, &settings[..4], 1e3, 5).unwrap();
        assert_eq!(&a[..4], &b[..]);
        assert_ne!(a, simulate_counts(&rho, &settings, 1e3, 6).unwrap());
        assert!(simulate_counts(&rho, &settings, 0.0, 5).is_err());
    }

    #[test]
    fn noiseless_inversion_is_exact() {
        for rho in [
            family(0.4, 0.3),
            pure_state(FRAC_PI_4).unwrap(),
            family(1.2, 0.9),
        ] {
            let m = linear_inversion(&PauliCounts::expected(&rho, 1.0).unwrap()).unwrap();
            assert!(m.max_abs_diff(rho.matrix()) < 1e-12);
        }
    }

    #[test]
    fn projection_clips_and_redistributes() {
        let m = Mat4::from_real_diag([0.6, 0.3, 0.2, -0.1]);
        let rho = psd_projection(&m).unwrap();
        let want = Mat4::from_real_diag([0.6 - 0.1 / 3.0, 0.3 - 0.1 / 3.0, 0.2 - 0.1 / 3.0, 0.0]);
        assert!(rho.matrix().max_abs_diff(&want) < 1e-12);
        // The second pass removes the eigenvalue pushed below zero by the first.
        let m = Mat4::from_real_diag([1.0, 0.04, 0.01, -0.05]);
        let rho = psd_projection(&m).unwrap();
        let want = Mat4::from_real_diag([0.98, 0.02, 0.0, 0.0]);
        assert!(rho.matrix().max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn bell_state_tomography() {
        let rho = pure_state(FRAC_PI_4).unwrap();
        let rec = simulate_counts(&rho, &pauli_settings(), 1e5, 1).unwrap();
        let est = tomography_from_records(&rec).unwrap();
        assert!(trace_distance(&est, &rho) < 0.02);
    }

    #[test]
    fn damped_tomography_concurrence() {
        let rho = family(FRAC_PI_4, 0.5);
        let rec = simulate_counts(&rho, &pauli_settings(), 1e5, 2).unwrap();
        let c = concurrence(&tomography_from_records(&rec).unwrap())
            .unwrap()
            .value;
        assert!((c - 0.25).abs() < 0.03, "{c}");
    }

    #[test]
    fn missing_setting_is_reported() {
        let rho = family(0.5, 0.1);
        let rec = simulate_counts(&rho, &pauli_settings()[..8], 1e3, 0).unwrap();
        assert!(matches!(
            tomography_from_records(&rec),
            Err(QcError::InsufficientData(_))
        ));
    }

    #[test]
    fn bell_state_estimates() {
        let est = estimate_measures(&pure_state(FRAC_PI_4).unwrap(), 1e5, 42, 20).unwrap();
        assert!((est.bell_s.value - 2.0 * 2f64.sqrt()).abs() < 0.02);
        assert_eq!(est.bell_s.replicas, 20);
        assert!(est.bell_s.std_error > 0.0);
        assert!(estimate_measures(&pure_state(FRAC_PI_4).unwrap(), 1e5, 42, 1).is_err());
    }

    #[test]
    fn estimates_are_deterministic() {
        let rho = family(FRAC_PI_4, 0.3);
        let a = estimate_measures(&rho, 1e4, 9, 8).unwrap();
        let b = estimate_measures(&rho, 1e4, 9, 8).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn undetermined_band_is_reproduced() {
        let est = estimate_measures(&family(FRAC_PI_4, 0.55), 1e5, 4, 20).unwrap();
        assert!(est.t16.value < crate::steering::C16_THRESHOLD);
        assert!(est.t_u.value > 1.0);
    }

    #[test]
    fn damped_bell_value_is_local_at_04() {
        let est = estimate_measures(&family(FRAC_PI_4, 0.4), 1e5, 8, 20).unwrap();
        assert!(est.bell_s.value < 2.0);
    }
}
