//! Dormand-Prince 5(4) with local error control.

use nalgebra::DMatrix;

use super::{BodyState, DynamicsError};

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: BodyState,
    /// Scaled local error estimate of the step that produced this sample.
    pub err: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub rejected_steps: usize,
}

struct Flat {
    masses: Vec<f64>,
    d: usize,
    n: usize,
}

impl Flat {
    fn pack(s: &BodyState) -> Vec<f64> {
        s.x.iter().chain(s.v.iter()).copied().collect()
    }

    fn unpack(&self, y: &[f64]) -> BodyState {
        let k = self.d * self.n;
        BodyState {
            masses: self.masses.clone(),
            x: DMatrix::from_column_slice(self.d, self.n, &y[..k]),
            v: DMatrix::from_column_slice(self.d, self.n, &y[k..]),
        }
    }

    /// Returns `None` when two bodies coincide.
    fn rhs(&self, y: &[f64], out: &mut [f64]) -> Option<()> {
        let (d, n) = (self.d, self.n);
        let k = d * n;
        out[..k].copy_from_slice(&y[k..]);
        out[k..].fill(0.0);
        for i in 0..n {
            for j in i + 1..n {
                let mut r2 = 0.0;
                for c in 0..d {
                    let dx = y[j * d + c] - y[i * d + c];
                    r2 += dx * dx;
                }
                if !(r2 > 0.0) || !r2.is_finite() {
                    return None;
                }
                let inv3 = 1.0 / (r2 * r2.sqrt());
                for c in 0..d {
                    let dx = y[j * d + c] - y[i * d + c];
                    out[k + i * d + c] += self.masses[j] * inv3 * dx;
                    out[k + j * d + c] -= self.masses[i] * inv3 * dx;
                }
            }
        }
        Some(())
    }
}

/// Every accepted step from 0 to `t_end`.
pub fn integrate(s: &BodyState, t_end: f64, tol: f64) -> Result<Trajectory, DynamicsError> {
    run(s, t_end, tol, None)
}

/// Samples at exactly the requested (sorted, nonnegative) times.
pub fn integrate_at(s: &BodyState, times: &[f64], tol: f64) -> Result<Trajectory, DynamicsError> {
    let t_end = times.last().copied().unwrap_or(0.0);
    run(s, t_end, tol, Some(times))
}

fn run(
    s: &BodyState,
    t_end: f64,
    tol: f64,
    stops: Option<&[f64]>,
) -> Result<Trajectory, DynamicsError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(DynamicsError::InvalidTolerance);
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(DynamicsError::Shape(format!("t_end must be nonnegative, got {t_end}")));
    }
    if let Some(st) = stops {
        if st.windows(2).any(|w| w[1] < w[0]) || st.first().is_some_and(|&t| t < 0.0) {
            return Err(DynamicsError::Shape("sample times must be sorted and nonnegative".into()));
        }
    }
    let sys = Flat {
        masses: s.masses.clone(),
        d: s.dim(),
        n: s.n(),
    };
    let dim = 2 * sys.d * sys.n;
    let mut y = Flat::pack(s);
    let mut f = vec![0.0; dim];
    s.interaction_matrix()?;
    sys.rhs(&y, &mut f).expect("validated distances");

    let mut traj = Trajectory::default();
    let mut next_stop = 0;
    let record_now = |t: f64, next_stop: &mut usize| match stops {
        None => true,
        Some(st) => {
            let mut hit = false;
            while *next_stop < st.len() && st[*next_stop] <= t {
                hit = true;
                *next_stop += 1;
            }
            hit
        }
    };
    let mut t = 0.0;
    if record_now(t, &mut next_stop) {
        traj.samples.push(Sample {
            t,
            state: s.clone(),
            err: 0.0,
        });
    }

    let scale = |y: &[f64], v: &[f64]| {
        y.iter()
            .zip(v)
            .map(|(a, b)| b.abs() / (1.0 + a.abs()))
            .fold(0.0, f64::max)
    };
    let d0 = scale(&y, &y);
    let d1 = scale(&y, &f);
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };

    let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 7];
    let mut ytmp = vec![0.0; dim];
    let mut ynew = vec![0.0; dim];
    while t < t_end {
        if h <= 1e-13 * t.abs().max(1.0) {
            return Err(DynamicsError::NearCollision {
                t,
                min_distance: sys.unpack(&y).min_distance(),
                last_good: Box::new(sys.unpack(&y)),
            });
        }
        let target = match stops {
            Some(st) if next_stop < st.len() => st[next_stop].min(t_end),
            _ => t_end,
        };
        let hit_target = t + h >= target;
        let step = if hit_target { target - t } else { h };

        k[0].copy_from_slice(&f);
        let mut ok = true;
        for stage in 1..7 {
            for i in 0..dim {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(stage) {
                    acc += A[stage][j] * kj[i];
                }
                ytmp[i] = y[i] + step * acc;
            }
            if sys.rhs(&ytmp, &mut k[stage]).is_none() {
                ok = false;
                break;
            }
        }
        // The seventh stage is evaluated at the fifth-order solution.
        let err = if ok {
            ynew.copy_from_slice(&ytmp);
            let mut e = 0.0f64;
            for i in 0..dim {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    acc += E[j] * kj[i];
                }
                e = e.max((step * acc).abs() / (1.0 + y[i].abs()));
            }
            if e.is_finite() {
                e
            } else {
                f64::INFINITY
            }
        } else {
            f64::INFINITY
        };

        if err <= tol {
            t = if hit_target { target } else { t + step };
            std::mem::swap(&mut y, &mut ynew);
            f.copy_from_slice(&k[6]);
            if record_now(t, &mut next_stop) {
                traj.samples.push(Sample {
                    t,
                    state: sys.unpack(&y),
                    err,
                });
            }
            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * (tol / err).powf(0.2)).clamp(0.2, 5.0)
            };
            if !hit_target || step >= h {
                h = step * fac;
            }
        } else {
            traj.rejected_steps += 1;
            let fac = if err.is_finite() {
                (0.9 * (tol / err).powf(0.2)).clamp(0.2, 1.0)
            } else {
                0.25
            };
            h = step * fac;
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::newton_rhs;

    #[test]
    fn flat_rhs_matches_matrix_form() {
        let x = DMatrix::from_column_slice(3, 3, &[0.0, 0.1, 0.0, 1.0, 0.0, 0.3, -0.2, 1.1, 0.0]);
        let v = DMatrix::from_column_slice(3, 3, &[0.1, 0.0, 0.2, -0.3, 0.4, 0.0, 0.0, 0.0, 1.0]);
        let s = BodyState::new(vec![1.0, 2.0, 0.5], x, v).unwrap();
        let sys = Flat {
            masses: s.masses.clone(),
            d: 3,
            n: 3,
        };
        let mut out = vec![0.0; 18];
        sys.rhs(&Flat::pack(&s), &mut out).unwrap();
        let (xd, vd) = newton_rhs(&s).unwrap();
        let want: Vec<f64> = xd.iter().chain(vd.iter()).copied().collect();
        for (a, b) in out.iter().zip(&want) {
            assert!((a - b).abs() < 1e-14, "{a} vs {b}");
        }
    }
}
