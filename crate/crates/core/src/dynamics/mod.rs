//! Newtonian n-body dynamics in R^d with G = 1.

mod config;
mod export;
mod integrate;
pub mod presets;

use nalgebra::DMatrix;
use thiserror::Error;

pub use config::{parse_config, RunConfig};
pub use export::{trajectory_csv, trajectory_header};
pub use integrate::{integrate, integrate_at, Sample, Trajectory};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("mass {index} must be positive, got {value}")]
    NonPositiveMass { index: usize, value: f64 },
    #[error("distance r_{i}{j} must be positive")]
    NonPositiveDistance { i: usize, j: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("tolerance must be positive and finite")]
    InvalidTolerance,
    #[error("near-collision abort at t = {t}: step size underflow (min distance {min_distance:e})")]
    NearCollision {
        t: f64,
        min_distance: f64,
        last_good: Box<BodyState>,
    },
    #[error("config field `{field}`: {msg}")]
    Config { field: String, msg: String },
}

/// Positions and velocities as d x n matrices (one column per body).
#[derive(Debug, Clone, PartialEq)]
pub struct BodyState {
    pub masses: Vec<f64>,
    pub x: DMatrix<f64>,
    pub v: DMatrix<f64>,
}

/// Index pairs (i, j), i < j, in lexicographic order: 12, 13, ..., (n-1)n.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

/// Position of pair (i, j), i < j, in [`pairs`] order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

impl BodyState {
    pub fn new(masses: Vec<f64>, x: DMatrix<f64>, v: DMatrix<f64>) -> Result<Self, DynamicsError> {
        let n = masses.len();
        if x.ncols() != n || v.ncols() != n || x.nrows() != v.nrows() {
            return Err(DynamicsError::Shape(format!(
                "{n} masses, positions {}x{}, velocities {}x{}",
                x.nrows(),
                x.ncols(),
                v.nrows(),
                v.ncols()
            )));
        }
        for (index, &value) in masses.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(DynamicsError::NonPositiveMass { index, value });
            }
        }
        let s = Self { masses, x, v };
        for (k, r) in s.distances().into_iter().enumerate() {
            if !(r > 0.0) {
                let (i, j) = pairs(s.n())[k];
                return Err(DynamicsError::NonPositiveDistance { i: i + 1, j: j + 1 });
            }
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.masses.len()
    }

    pub fn dim(&self) -> usize {
        self.x.nrows()
    }

    /// r_ij in [`pairs`] order.
    pub fn distances(&self) -> Vec<f64> {
        pairs(self.n())
            .into_iter()
            .map(|(i, j)| (self.x.column(i) - self.x.column(j)).norm())
            .collect()
    }

    pub fn min_distance(&self) -> f64 {
        self.distances().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn interaction_matrix(&self) -> Result<DMatrix<f64>, DynamicsError> {
        interaction_matrix(&self.distances(), &self.masses)
    }
}

/// A_ij = m_i / r_ij^3 off the diagonal; each diagonal entry makes its column
/// sum vanish.
pub fn interaction_matrix(distances: &[f64], masses: &[f64]) -> Result<DMatrix<f64>, DynamicsError> {
    let n = masses.len();
    let ps = pairs(n);
    if distances.len() != ps.len() {
        return Err(DynamicsError::Shape(format!(
            "{} distances for {n} bodies",
            distances.len()
        )));
    }
    let mut a = DMatrix::zeros(n, n);
    for (&(i, j), &r) in ps.iter().zip(distances) {
        if !(r > 0.0) {
            return Err(DynamicsError::NonPositiveDistance { i: i + 1, j: j + 1 });
        }
        let r3 = r * r * r;
        a[(i, j)] = masses[i] / r3;
        a[(j, i)] = masses[j] / r3;
    }
    for j in 0..n {
        let s: f64 = (0..n).filter(|&i| i != j).map(|i| a[(i, j)]).sum();
        a[(j, j)] = -s;
    }
    Ok(a)
}

/// (X', V') = (V, X A(X)).
pub fn newton_rhs(s: &BodyState) -> Result<(DMatrix<f64>, DMatrix<f64>), DynamicsError> {
    let a = s.interaction_matrix()?;
    Ok((s.v.clone(), &s.x * a))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstIntegrals {
    pub energy: f64,
    pub momentum: Vec<f64>,
    /// Antisymmetric part of X diag(m) V^T.
    pub angular_momentum: DMatrix<f64>,
}

pub fn first_integrals(s: &BodyState) -> FirstIntegrals {
    let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(s.masses.clone()));
    let kinetic: f64 = (0..s.n())
        .map(|i| 0.5 * s.masses[i] * s.v.column(i).norm_squared())
        .sum();
    let potential: f64 = pairs(s.n())
        .into_iter()
        .zip(s.distances())
        .map(|((i, j), r)| s.masses[i] * s.masses[j] / r)
        .sum();
    let momentum = (&s.v * nalgebra::DVector::from_vec(s.masses.clone()))
        .iter()
        .copied()
        .collect();
    let xmv = &s.x * m * s.v.transpose();
    FirstIntegrals {
        energy: kinetic - potential,
        momentum,
        angular_momentum: (&xmv - xmv.transpose()) * 0.5,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_triangle_matrix() {
        let a = interaction_matrix(&[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0]).unwrap();
        let want = DMatrix::from_row_slice(3, 3, &[-2., 1., 1., 1., -2., 1., 1., 1., -2.]);
        assert_eq!(a, want);
    }

    #[test]
    fn two_body_matrix() {
        let a = interaction_matrix(&[2.0], &[3.0, 5.0]).unwrap();
        let want = DMatrix::from_row_slice(2, 2, &[-5. / 8., 3. / 8., 5. / 8., -3. / 8.]);
        assert_eq!(a, want);
    }

    #[test]
    fn rejects_bad_distance() {
        assert!(matches!(
            interaction_matrix(&[0.0], &[1.0, 1.0]),
            Err(DynamicsError::NonPositiveDistance { i: 1, j: 2 })
        ));
    }

    #[test]
    fn dumbbell_accelerations() {
        let x = DMatrix::from_column_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]);
        let s = BodyState::new(vec![1.0, 1.0], x, DMatrix::zeros(2, 2)).unwrap();
        let (_, acc) = newton_rhs(&s).unwrap();
        assert_relative_eq!(acc[(0, 0)], 1.0);
        assert_relative_eq!(acc[(0, 1)], -1.0);
    }

    #[test]
    fn pair_indexing() {
        for n in 2..6 {
            for (k, (i, j)) in pairs(n).into_iter().enumerate() {
                assert_eq!(pair_index(n, i, j), k);
            }
        }
    }

    #[test]
    fn rest_energy_is_potential() {
        let x = DMatrix::from_column_slice(2, 3, &[0.0, 0.0, 1.0, 0.0, 0.0, 2.0]);
        let s = BodyState::new(vec![1.0, 2.0, 3.0], x, DMatrix::zeros(2, 3)).unwrap();
        let fi = first_integrals(&s);
        let want = -(2.0 / 1.0 + 3.0 / 2.0 + 6.0 / 5f64.sqrt());
        assert_relative_eq!(fi.energy, want, max_relative = 1e-15);
    }

    #[test]
    fn negative_mass_rejected() {
        let err = BodyState::new(vec![1.0, -1.0], DMatrix::identity(2, 2), DMatrix::zeros(2, 2));
        assert!(matches!(err, Err(DynamicsError::NonPositiveMass { index: 1, .. })));
    }
}
