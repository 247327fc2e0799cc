//! Named initial conditions.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{config::DEFAULT_TOL, BodyState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    LagrangeEquilateral,
    KeplerPair,
    IsoscelesBalanced,
    RandomSeeded,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::LagrangeEquilateral,
        Preset::KeplerPair,
        Preset::IsoscelesBalanced,
        Preset::RandomSeeded,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::LagrangeEquilateral => "lagrange-equilateral",
            Preset::KeplerPair => "kepler-pair",
            Preset::IsoscelesBalanced => "isosceles-balanced",
            Preset::RandomSeeded => "random-seeded",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
                format!("unknown preset `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PresetRun {
    pub state: BodyState,
    pub t_end: f64,
    pub tol: f64,
    /// Whether every mutual distance should stay constant.
    pub rigid: bool,
}

/// Seed used by `random-seeded` when none is given; its trajectory stays
/// well separated over the preset horizon.
pub const DEFAULT_SEED: u64 = 8;

pub fn preset(p: Preset, seed: u64) -> PresetRun {
    let (state, t_end, rigid) = match p {
        Preset::LagrangeEquilateral => {
            let (s, period) = lagrange_equilateral([1.0, 2.0, 3.0], 1.0);
            (s, period, true)
        }
        Preset::KeplerPair => {
            let (s, period) = kepler_pair(1.0, 1.0, 1.0);
            (s, period, true)
        }
        Preset::IsoscelesBalanced => {
            let (s, period) = isosceles_balanced(1.0, 2.0, 1.0, 1.3);
            (s, period, true)
        }
        Preset::RandomSeeded => (random_expanding_state(3, 3, seed), 10.0, false),
    };
    PresetRun {
        state,
        t_end,
        tol: DEFAULT_TOL,
        rigid,
    }
}

fn centered(masses: &[f64], x: DMatrix<f64>) -> DMatrix<f64> {
    let total: f64 = masses.iter().sum();
    let c = &x * DVector::from_column_slice(masses) / total;
    let mut out = x;
    for mut col in out.column_iter_mut() {
        col -= &c;
    }
    out
}

/// Equilateral triangle in the plane rotating rigidly about its centre of
/// mass with omega^2 = (m1 + m2 + m3) / side^3. Returns the state and period.
pub fn lagrange_equilateral(masses: [f64; 3], side: f64) -> (BodyState, f64) {
    let h = side * 3f64.sqrt() / 2.0;
    let x = centered(
        &masses,
        DMatrix::from_column_slice(2, 3, &[0.0, 0.0, side, 0.0, side / 2.0, h]),
    );
    let omega = (masses.iter().sum::<f64>() / side.powi(3)).sqrt();
    let v = rotate_quarter(&x) * omega;
    let s = BodyState::new(masses.to_vec(), x, v).expect("valid triangle");
    (s, 2.0 * PI / omega)
}

/// Two bodies on a circular orbit of separation `r`.
pub fn kepler_pair(m1: f64, m2: f64, r: f64) -> (BodyState, f64) {
    let masses = [m1, m2];
    let x = centered(&masses, DMatrix::from_column_slice(2, 2, &[0.0, 0.0, r, 0.0]));
    let omega = ((m1 + m2) / r.powi(3)).sqrt();
    let v = rotate_quarter(&x) * omega;
    (
        BodyState::new(masses.to_vec(), x, v).expect("valid pair"),
        2.0 * PI / omega,
    )
}

/// (x, y) -> (-y, x) applied to every column of a 2 x n matrix.
fn rotate_quarter(x: &DMatrix<f64>) -> DMatrix<f64> {
    let mut v = DMatrix::zeros(2, x.ncols());
    for j in 0..x.ncols() {
        v[(0, j)] = -x[(1, j)];
        v[(1, j)] = x[(0, j)];
    }
    v
}

/// Isosceles triangle (r13 = r23) with m1 = m2, moving in R^4 as two
/// independent rotations, one per principal axis of the configuration.
/// Balanced but not central unless the triangle is equilateral. Returns the
/// state and the period of the first rotation.
pub fn isosceles_balanced(m12: f64, m3: f64, r12: f64, r13: f64) -> (BodyState, f64) {
    assert!(r13 > r12 / 2.0, "triangle inequality");
    let masses = vec![m12, m12, m3];
    let c = -2.0 * m12 / m3;
    let u1 = [1.0, -1.0, 0.0];
    let u2 = [1.0, 1.0, c];
    let a1 = r12 / 2.0;
    let a2 = ((r13 * r13 - a1 * a1) / ((1.0 - c) * (1.0 - c))).sqrt();
    let a = super::interaction_matrix(&[r12, r13, r13], &masses).expect("positive distances");
    let lambda = |u: &[f64; 3]| {
        let uv = DVector::from_column_slice(u);
        let row = uv.transpose() * &a;
        let lam = row.dot(&uv.transpose()) / uv.norm_squared();
        debug_assert!((row - uv.transpose() * lam).norm() < 1e-12);
        lam
    };
    let w1 = (-lambda(&u1)).sqrt();
    let w2 = (-lambda(&u2)).sqrt();
    let mut x = DMatrix::zeros(4, 3);
    let mut v = DMatrix::zeros(4, 3);
    for j in 0..3 {
        x[(0, j)] = a1 * u1[j];
        x[(2, j)] = a2 * u2[j];
        v[(1, j)] = w1 * a1 * u1[j];
        v[(3, j)] = w2 * a2 * u2[j];
    }
    (
        BodyState::new(masses, x, v).expect("valid triangle"),
        2.0 * PI / w1,
    )
}

/// Centre-of-mass frame, masses in [0.5, 2], positions in the unit cube
/// with pairwise separation at least 0.4, velocities in [-0.3, 0.3]^d.
pub fn random_state(n: usize, d: usize, seed: u64) -> BodyState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let masses: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    let x = loop {
        let x = DMatrix::from_fn(d, n, |_, _| rng.random_range(-1.0..1.0));
        let ok = (0..n).all(|i| (i + 1..n).all(|j| (x.column(i) - x.column(j)).norm() >= 0.4));
        if ok {
            break x;
        }
    };
    let v = DMatrix::from_fn(d, n, |_, _| rng.random_range(-0.3..0.3));
    BodyState::new(masses.clone(), centered(&masses, x), centered(&masses, v))
        .expect("separated bodies")
}

/// [`random_state`] with positions scaled by 2 (separation at least 0.8)
/// and a homologous expansion v = x / 2 added to the velocities, so that
/// most draws stay well separated for several time units.
pub fn random_expanding_state(n: usize, d: usize, seed: u64) -> BodyState {
    let s = random_state(n, d, seed);
    let x = &s.x * 2.0;
    let v = &s.v + &x * 0.5;
    BodyState::new(s.masses, x, v).expect("separated bodies")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{first_integrals, newton_rhs};

    #[test]
    fn names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("figure-eight".parse::<Preset>().is_err());
    }

    #[test]
    fn lagrange_acceleration_is_centripetal() {
        let (s, _) = lagrange_equilateral([1.0, 2.0, 3.0], 1.0);
        let (_, acc) = newton_rhs(&s).unwrap();
        let want = &s.x * -6.0;
        assert!((acc - want).norm() < 1e-12);
    }

    #[test]
    fn isosceles_rows_are_eigenvectors() {
        let (s, _) = isosceles_balanced(1.0, 2.0, 1.0, 1.3);
        let d = s.distances();
        assert!((d[1] - 1.3).abs() < 1e-12 && (d[2] - 1.3).abs() < 1e-12);
        assert!((d[0] - 1.0).abs() < 1e-12);
        assert!(first_integrals(&s).momentum.iter().all(|p| p.abs() < 1e-12));
    }

    #[test]
    fn random_is_seeded() {
        assert_eq!(random_state(4, 3, 7), random_state(4, 3, 7));
        assert_ne!(random_state(4, 3, 7), random_state(4, 3, 8));
    }
}
