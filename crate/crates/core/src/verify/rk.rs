use super::Equation;
use crate::chart::SolutionEvaluator;
use crate::error::{Error, Result};

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Difference between the 5th- and 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const UNDERFLOW: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub z: f64,
    pub y: f64,
    pub dy: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Accepted steps of an integration, including the initial point.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectoryPoint>,
    pub tolerance: f64,
    pub stats: StepStats,
}

type State = [f64; 2];

fn rhs(eq: &dyn Equation, z: f64, s: &State) -> Result<State> {
    Ok([s[1], eq.acceleration(z, s[0], s[1])?])
}

/// Integrates `y'' = eq.acceleration(z, y, y')` from `(y0, dy0)` at `z0` to `z1`
/// with an adaptive Dormand-Prince 5(4) scheme.
///
/// The local error estimate of every accepted step satisfies
/// `|err_i| <= tol * (1 + |s_i|)` componentwise. The integration stops with
/// [`Error::SolutionEscape`] as soon as `y <= 0`.
pub fn rk_integrate(eq: &dyn Equation, y0: f64, dy0: f64, z0: f64, z1: f64, tol: f64) -> Result<Trajectory> {
    if !(1e-12..=1e-3).contains(&tol) {
        return Err(Error::InvalidParameter(format!(
            "tolerance {tol:e} outside [1e-12, 1e-3]"
        )));
    }
    if !(y0 > 0.0) {
        return Err(Error::SolutionEscape { at: z0, value: y0 });
    }
    if !(z0.is_finite() && z1.is_finite() && dy0.is_finite()) || z0 == z1 {
        return Err(Error::InvalidParameter("integration span is empty".into()));
    }
    let span = (z1 - z0).abs();
    let dir = (z1 - z0).signum();
    let mut z = z0;
    let mut s: State = [y0, dy0];
    let mut h = 0.01 * span * dir;
    let mut stats = StepStats::default();
    let mut samples = vec![TrajectoryPoint { z, y: y0, dy: dy0 }];

    let mut stage_error: Option<Error> = None;
    let mut k = [[0.0; 2]; 7];
    k[0] = rhs(eq, z, &s)?;
    stats.evaluations += 1;

    while (z1 - z) * dir > 0.0 {
        let remaining = z1 - z;
        let last = h.abs() >= remaining.abs();
        if last {
            h = remaining;
        }
        if h.abs() < UNDERFLOW * span {
            // Shrinking onto a point where the stages leave y > 0 means the
            // solution itself is escaping.
            if let Some(e @ Error::SolutionEscape { .. }) = stage_error {
                return Err(e);
            }
            return Err(Error::StepUnderflow { at: z, step: h.abs() });
        }

        let mut stage_failed = false;
        for i in 1..7 {
            let mut si = s;
            for (j, kj) in k.iter().enumerate().take(i) {
                si[0] += h * A[i][j] * kj[0];
                si[1] += h * A[i][j] * kj[1];
            }
            stats.evaluations += 1;
            match rhs(eq, z + C[i] * h, &si) {
                Ok(v) if v.iter().all(|x| x.is_finite()) => k[i] = v,
                other => {
                    stage_error = other.err();
                    stage_failed = true;
                    break;
                }
            }
        }
        if stage_failed {
            stats.rejected += 1;
            h *= 0.25;
            continue;
        }

        // The last stage is evaluated at the 5th-order solution.
        let mut next = s;
        for (j, kj) in k.iter().enumerate().take(6) {
            next[0] += h * A[6][j] * kj[0];
            next[1] += h * A[6][j] * kj[1];
        }
        let mut err: f64 = 0.0;
        for c in 0..2 {
            let e: f64 = (0..7).map(|i| E[i] * k[i][c]).sum::<f64>() * h;
            let sc = tol * (1.0 + s[c].abs().max(next[c].abs()));
            err = err.max(e.abs() / sc);
        }
        if !err.is_finite() {
            stats.rejected += 1;
            h *= 0.25;
            continue;
        }

        if err <= 1.0 {
            z = if last { z1 } else { z + h };
            s = next;
            k[0] = k[6];
            stats.accepted += 1;
            stage_error = None;
            samples.push(TrajectoryPoint { z, y: s[0], dy: s[1] });
            if !(s[0] > 0.0) {
                return Err(Error::SolutionEscape { at: z, value: s[0] });
            }
            let factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            h *= factor;
        } else {
            stats.rejected += 1;
            h *= (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
        }
    }

    Ok(Trajectory {
        samples,
        tolerance: tol,
        stats,
    })
}

/// Largest `|sol(z) - y_traj(z)|` over the trajectory samples. A sample at
/// which `sol` cannot be evaluated counts as an infinite deviation.
pub fn crosscheck(sol: &SolutionEvaluator, traj: &Trajectory) -> f64 {
    traj.samples
        .iter()
        .map(|p| match sol.value(p.z) {
            Ok(y) => (y - p.y).abs(),
            Err(_) => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

/// Integrates from `sol`'s own value and slope at `z0` to `z1` and compares.
pub fn crosscheck_from(
    sol: &SolutionEvaluator,
    eq: &dyn Equation,
    z0: f64,
    z1: f64,
    tol: f64,
) -> Result<(Trajectory, f64)> {
    let j = sol.jet(z0, 1)?;
    let traj = rk_integrate(eq, j.value(), j.d(1), z0, z1, tol)?;
    let dev = crosscheck(sol, &traj);
    Ok((traj, dev))
}
