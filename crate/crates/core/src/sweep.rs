//! Point reports, grid sweeps and sudden-death boundary tracing over the
//! damped family.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell::{bell_s_closed, BellBranch};
use crate::entanglement::{concurrence_closed, signed_concurrence_closed};
use crate::error::{QcError, Result};
use crate::states::StatePoint;
use crate::steering::{combined_axes_16, steering_parameter_closed, AxisSet, C16_THRESHOLD};
use crate::unsteering::{scaled_unsteering, unsteering_closed, UnsteeringVariant};

/// Round-off allowance when comparing a quantifier against its threshold.
pub const CLASSIFY_EPS: f64 = 1e-12;

/// Boundary-function values smaller than this are treated as zero.
pub const ZERO_BAND: f64 = 1e-9;

fn combined16() -> &'static AxisSet {
    static AXES: OnceLock<AxisSet> = OnceLock::new();
    AXES.get_or_init(combined_axes_16)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Entanglement,
    Bell,
    Steering,
    Unsteering,
}

impl Measure {
    pub const ALL: [Measure; 4] = [
        Measure::Entanglement,
        Measure::Bell,
        Measure::Steering,
        Measure::Unsteering,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Measure::Entanglement => "entanglement",
            Measure::Bell => "bell",
            Measure::Steering => "steering",
            Measure::Unsteering => "unsteering",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = QcError;
    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| QcError::Domain(format!("unknown measure {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub entangled: bool,
    pub bell_nonlocal: bool,
    pub steerable: bool,
    pub unsteerable: bool,
    pub undetermined: bool,
}

/// Every quantifier at one point of the family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub point: StatePoint,
    pub concurrence: f64,
    pub bell_s: f64,
    pub bell_branch: BellBranch,
    pub t16: f64,
    /// `None` where the Bob marginal is singular (`theta = pi/2`, `D = 0`).
    pub t_u: Option<f64>,
    pub scaled_t_u: Option<f64>,
    pub flags: Flags,
}

impl Flags {
    pub fn classify(concurrence: f64, bell_s: f64, t16: f64, t_u: Option<f64>) -> Self {
        let steerable = t16 > C16_THRESHOLD + CLASSIFY_EPS;
        let unsteerable = t_u.is_some_and(|t| t <= 1.0 + CLASSIFY_EPS);
        Flags {
            entangled: concurrence > CLASSIFY_EPS,
            bell_nonlocal: bell_s > 2.0 + CLASSIFY_EPS,
            steerable,
            unsteerable,
            undetermined: !steerable && !unsteerable,
        }
    }
}

/// Closed-form report at `p`.
pub fn evaluate_point(p: StatePoint) -> Result<CorrelationReport> {
    let concurrence = concurrence_closed(p);
    let bell = bell_s_closed(p);
    let t16 = steering_parameter_closed(p, combined16());
    let t_u = match unsteering_closed(p, UnsteeringVariant::Derived) {
        Ok(v) => Some(v),
        Err(QcError::Domain(_)) => None,
        Err(e) => return Err(e),
    };
    let scaled_t_u = t_u.map(scaled_unsteering).transpose()?;
    Ok(CorrelationReport {
        point: p,
        concurrence,
        bell_s: bell.value,
        bell_branch: bell.branch,
        t16,
        t_u,
        scaled_t_u,
        flags: Flags::classify(concurrence, bell.value, t16, t_u),
    })
}

/// Evenly spaced samples `min, ..., max` (both ends included).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl ParamRange {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(QcError::Domain(format!(
                "steps = {steps} must be at least 2"
            )));
        }
        if !(min <= max) {
            return Err(QcError::Domain(format!("range [{min}, {max}] is empty")));
        }
        Ok(Self { min, max, steps })
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            return self.max;
        }
        self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.value(i)).collect()
    }
}

/// Row-major grid (theta outer, damping inner).
pub fn sweep_grid(theta: ParamRange, damping: ParamRange) -> Result<Vec<CorrelationReport>> {
    // Validate the corners up front so the parallel loop cannot fail halfway.
    for t in [theta.min, theta.max] {
        for d in [damping.min, damping.max] {
            StatePoint::new(t, d)?;
        }
    }
    (0..theta.steps * damping.steps)
        .into_par_iter()
        .map(|k| {
            let p = StatePoint::new(
                theta.value(k / damping.steps),
                damping.value(k % damping.steps),
            )?;
            evaluate_point(p)
        })
        .collect()
}

/// Options for [`find_boundary`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub scan_step: f64,
    pub tol: f64,
    pub unsteering_variant: UnsteeringVariant,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            scan_step: 1e-3,
            tol: 1e-9,
            unsteering_variant: UnsteeringVariant::Derived,
        }
    }
}

/// Signed distance from the measure's threshold; changes sign across the boundary.
///
/// Entanglement uses the unclamped concurrence, unsteering uses `1 - t_U`.
pub fn boundary_function(
    measure: Measure,
    p: StatePoint,
    variant: UnsteeringVariant,
) -> Result<f64> {
    Ok(match measure {
        Measure::Entanglement => signed_concurrence_closed(p),
        Measure::Bell => bell_s_closed(p).value - 2.0,
        Measure::Steering => steering_parameter_closed(p, combined16()) - C16_THRESHOLD,
        Measure::Unsteering => 1.0 - unsteering_closed(p, variant)?,
    })
}

/// Transversal crossings and touch points of a boundary function along `D`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRoots {
    pub crossings: Vec<f64>,
    pub tangencies: Vec<f64>,
}

fn sign_of(g: f64) -> i8 {
    if g.abs() < ZERO_BAND {
        0
    } else if g > 0.0 {
        1
    } else {
        -1
    }
}

fn check_open_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(QcError::Domain(format!(
            "theta = {theta} must lie strictly inside (0, pi/2)"
        )));
    }
    Ok(())
}

/// Scans `D` in `[0, 1]`, brackets every sign change and bisects it to `tol`.
pub fn find_boundary(measure: Measure, theta: f64, opts: &ScanOptions) -> Result<BoundaryRoots> {
    check_open_theta(theta)?;
    if !(opts.scan_step > 0.0 && opts.scan_step <= 0.5) {
        return Err(QcError::Domain(format!(
            "scan_step = {} must lie in (0, 0.5]",
            opts.scan_step
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(QcError::Domain(format!(
            "tol = {} must be positive",
            opts.tol
        )));
    }
    let g = |d: f64| -> Result<f64> {
        boundary_function(measure, StatePoint::new(theta, d)?, opts.unsteering_variant)
    };

    let n = (1.0 / opts.scan_step).ceil() as usize;
    let grid: Vec<f64> = (0..=n)
        .map(|k| if k == n { 1.0 } else { k as f64 / n as f64 })
        .collect();
    let signs: Vec<i8> = grid
        .iter()
        .map(|&d| g(d).map(sign_of))
        .collect::<Result<_>>()?;

    let mut roots = BoundaryRoots::default();
    let mut last_nonzero: Option<usize> = None;
    let mut k = 0;
    while k < grid.len() {
        if signs[k] != 0 {
            if let Some(j) = last_nonzero {
                if signs[j] != signs[k] {
                    roots
                        .crossings
                        .push(bisect(&g, grid[j], grid[k], signs[j], opts.tol)?);
                } else if k > j + 1 {
                    roots.tangencies.push(0.5 * (grid[j + 1] + grid[k - 1]));
                }
            } else if k > 0 {
                roots.tangencies.push(0.5 * (grid[0] + grid[k - 1]));
            }
            last_nonzero = Some(k);
            k += 1;
            continue;
        }
        k += 1;
    }
    match last_nonzero {
        Some(j) if j + 1 < grid.len() => roots
            .tangencies
            .push(0.5 * (grid[j + 1] + grid[grid.len() - 1])),
        None => roots.tangencies.push(0.5),
        _ => {}
    }
    Ok(roots)
}

fn bisect(
    g: &impl Fn(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    lo_sign: i8,
    tol: f64,
) -> Result<f64> {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let v = g(mid)?;
        if v == 0.0 {
            return Ok(mid);
        }
        if (v > 0.0) == (lo_sign > 0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample {
    pub theta: f64,
    pub d_star: f64,
    /// Attaining CHSH branch at the crossing; `None` for other measures.
    pub branch: Option<BellBranch>,
}

/// Point where the branch attaining the boundary changes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwitchPoint {
    pub theta: f64,
    pub damping: f64,
    pub from: BellBranch,
    pub to: BellBranch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub measure: Measure,
    pub samples: Vec<BoundarySample>,
    pub switch_points: Vec<SwitchPoint>,
}

/// Angular resolution of switch-point refinement.
pub const SWITCH_THETA_TOL: f64 = 1e-4;

fn first_crossing(
    measure: Measure,
    theta: f64,
    opts: &ScanOptions,
) -> Result<Option<BoundarySample>> {
    let roots = find_boundary(measure, theta, opts)?;
    Ok(roots.crossings.first().map(|&d_star| {
        let branch = (measure == Measure::Bell).then(|| {
            bell_s_closed(StatePoint::new(theta, d_star).expect("d_star in [0, 1]")).branch
        });
        BoundarySample {
            theta,
            d_star,
            branch,
        }
    }))
}

/// First crossing at each of `theta_steps` angles, plus refined branch switches.
pub fn trace_boundary_curve(
    measure: Measure,
    theta_min: f64,
    theta_max: f64,
    theta_steps: usize,
    opts: &ScanOptions,
) -> Result<BoundaryCurve> {
    check_open_theta(theta_min)?;
    check_open_theta(theta_max)?;
    let range = ParamRange::new(theta_min, theta_max, theta_steps)?;
    let found: Vec<Option<BoundarySample>> = (0..theta_steps)
        .into_par_iter()
        .map(|i| first_crossing(measure, range.value(i), opts))
        .collect::<Result<_>>()?;

    let mut switch_points = Vec::new();
    for pair in found.windows(2) {
        let (Some(left), Some(right)) = (pair[0], pair[1]) else {
            continue;
        };
        let (Some(from), Some(to)) = (left.branch, right.branch) else {
            continue;
        };
        if from == to {
            continue;
        }
        let (mut lo, mut hi) = (left.theta, right.theta);
        let mut at = right;
        while hi - lo > SWITCH_THETA_TOL {
            let mid = 0.5 * (lo + hi);
            match first_crossing(measure, mid, opts)? {
                Some(s) if s.branch == Some(from) => lo = mid,
                Some(s) => {
                    hi = mid;
                    at = s;
                }
                None => break,
            }
        }
        switch_points.push(SwitchPoint {
            theta: 0.5 * (lo + hi),
            damping: at.d_star,
            from,
            to,
        });
    }

    let samples: Vec<BoundarySample> = found.into_iter().flatten().collect();
    if samples.is_empty() {
        return Err(QcError::NoBoundary {
            measure: measure.name().to_string(),
            theta_min,
            theta_max,
        });
    }
    Ok(BoundaryCurve {
        measure,
        samples,
        switch_points,
    })
}
