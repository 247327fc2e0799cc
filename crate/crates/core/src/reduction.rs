//! Gram-form reduction of the n-body problem modulo translations and
//! rotations.
//!
//! With e_ij = e_i - e_j the standard coordinates are
//! b_ij = e_ij' B e_ij, g_ij = e_ij' G e_ij, d_ij = e_ij' D e_ij and
//! rho_ij = e_in' R e_jn (i < j < n), where B = X'X, C = X'V, G and R are the
//! symmetric and antisymmetric parts of C, and D = V'V.

use nalgebra::DMatrix;

use crate::dynamics::{integrate_at, interaction_matrix, pairs, BodyState, DynamicsError};

#[derive(Debug, Clone, PartialEq)]
pub struct GramForms {
    pub b: DMatrix<f64>,
    pub g: DMatrix<f64>,
    pub r: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

/// Canonical representatives: symmetric forms with zero diagonal, and the
/// antisymmetric form with zero last row and column.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalForms {
    pub b: DMatrix<f64>,
    pub g: DMatrix<f64>,
    pub r: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

/// Pair-indexed coordinates; `b`, `g`, `d` follow [`pairs`]`(n)` and `rho`
/// follows [`pairs`]`(n - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedState {
    pub n: usize,
    pub b: Vec<f64>,
    pub g: Vec<f64>,
    pub d: Vec<f64>,
    pub rho: Vec<f64>,
}

pub fn gram_forms(s: &BodyState) -> GramForms {
    let c = s.x.transpose() * &s.v;
    let ct = c.transpose();
    GramForms {
        b: s.x.transpose() * &s.x,
        g: (&c + &ct) * 0.5,
        r: (&c - &ct) * 0.5,
        d: s.v.transpose() * &s.v,
    }
}

/// M_ij - M_ii/2 - M_jj/2.
fn hat_symmetric(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            m[(i, j)] - 0.5 * m[(i, i)] - 0.5 * m[(j, j)]
        }
    })
}

/// R_ij - R_in - R_nj.
fn hat_antisymmetric(r: &DMatrix<f64>) -> DMatrix<f64> {
    let n = r.nrows();
    let l = n - 1;
    DMatrix::from_fn(n, n, |i, j| {
        if i == l || j == l {
            0.0
        } else {
            r[(i, j)] - r[(i, l)] - r[(l, j)]
        }
    })
}

pub fn normal_forms(gf: &GramForms) -> NormalForms {
    NormalForms {
        b: hat_symmetric(&gf.b),
        g: hat_symmetric(&gf.g),
        r: hat_antisymmetric(&gf.r),
        d: hat_symmetric(&gf.d),
    }
}

/// e_ij' M e_ij.
pub fn bracket_pair(m: &DMatrix<f64>, i: usize, j: usize) -> f64 {
    m[(i, i)] + m[(j, j)] - m[(i, j)] - m[(j, i)]
}

/// e_in' M e_jn with n the last index.
pub fn bracket_last(m: &DMatrix<f64>, i: usize, j: usize) -> f64 {
    let l = m.nrows() - 1;
    m[(i, j)] - m[(i, l)] - m[(l, j)] + m[(l, l)]
}

fn coords(gf: &GramForms) -> ReducedState {
    let n = gf.b.nrows();
    let pick = |m: &DMatrix<f64>| {
        pairs(n)
            .into_iter()
            .map(|(i, j)| bracket_pair(m, i, j))
            .collect::<Vec<_>>()
    };
    ReducedState {
        n,
        b: pick(&gf.b),
        g: pick(&gf.g),
        d: pick(&gf.d),
        rho: pairs(n - 1)
            .into_iter()
            .map(|(i, j)| bracket_last(&gf.r, i, j))
            .collect(),
    }
}

pub fn standard_coordinates(s: &BodyState) -> ReducedState {
    coords(&gram_forms(s))
}

/// Builds the symmetric zero-diagonal matrix with off-diagonal -v_ij / 2.
fn sym_from_coords(n: usize, v: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for ((i, j), &x) in pairs(n).into_iter().zip(v) {
        m[(i, j)] = -0.5 * x;
        m[(j, i)] = -0.5 * x;
    }
    m
}

impl ReducedState {
    pub fn zeros(n: usize) -> Self {
        let p = n * (n - 1) / 2;
        Self {
            n,
            b: vec![0.0; p],
            g: vec![0.0; p],
            d: vec![0.0; p],
            rho: vec![0.0; (n - 1) * (n - 2) / 2],
        }
    }

    pub fn normal_forms(&self) -> NormalForms {
        let n = self.n;
        let mut r = DMatrix::zeros(n, n);
        for ((i, j), &x) in pairs(n - 1).into_iter().zip(&self.rho) {
            r[(i, j)] = x;
            r[(j, i)] = -x;
        }
        NormalForms {
            b: sym_from_coords(n, &self.b),
            g: sym_from_coords(n, &self.g),
            r,
            d: sym_from_coords(n, &self.d),
        }
    }

    /// Inverse of [`ReducedState::flat`].
    pub fn from_flat(n: usize, v: &[f64]) -> Self {
        let p = n * (n - 1) / 2;
        Self {
            n,
            b: v[..p].to_vec(),
            g: v[p..2 * p].to_vec(),
            d: v[2 * p..3 * p].to_vec(),
            rho: v[3 * p..].to_vec(),
        }
    }

    pub fn flat(&self) -> Vec<f64> {
        [&self.b[..], &self.g, &self.d, &self.rho].concat()
    }

    /// Largest absolute component difference.
    pub fn max_abs_diff(&self, other: &ReducedState) -> f64 {
        self.flat()
            .iter()
            .zip(other.flat())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// A(B): the interaction matrix with r_ij = sqrt(b_ij).
pub fn a_from_b(b: &[f64], masses: &[f64]) -> Result<DMatrix<f64>, DynamicsError> {
    let n = masses.len();
    for ((i, j), &x) in pairs(n).into_iter().zip(b) {
        if !(x > 0.0) {
            return Err(DynamicsError::NonPositiveDistance { i: i + 1, j: j + 1 });
        }
    }
    let r: Vec<f64> = b.iter().map(|x| x.sqrt()).collect();
    interaction_matrix(&r, masses)
}

/// dA/dt along a motion with the given radial coordinates, using
/// dr_ij/dt = g_ij / r_ij.
pub fn a_dot(b: &[f64], g: &[f64], masses: &[f64]) -> Result<DMatrix<f64>, DynamicsError> {
    let n = masses.len();
    a_from_b(b, masses)?;
    let mut ad = DMatrix::zeros(n, n);
    for (((i, j), &bij), &gij) in pairs(n).into_iter().zip(b).zip(g) {
        // d/dt r^-3 = -3 r^-5 g
        let f = -3.0 * gij / (bij * bij * bij.sqrt());
        ad[(i, j)] = masses[i] * f;
        ad[(j, i)] = masses[j] * f;
    }
    for j in 0..n {
        let s: f64 = (0..n).filter(|&i| i != j).map(|i| ad[(i, j)]).sum();
        ad[(j, j)] = -s;
    }
    Ok(ad)
}

fn check_len(rs: &ReducedState, masses: &[f64]) -> Result<(), DynamicsError> {
    let n = rs.n;
    let p = n * (n - 1) / 2;
    if masses.len() != n
        || rs.b.len() != p
        || rs.g.len() != p
        || rs.d.len() != p
        || rs.rho.len() != (n - 1) * (n - 2) / 2
    {
        return Err(DynamicsError::Shape(format!(
            "reduced state does not match {} masses",
            masses.len()
        )));
    }
    Ok(())
}

/// Time derivative of the standard coordinates:
///
/// b' = 2g, g' = d + (B^A + A'B^)/2, d' = (G^A + A'G^) + (A'R^ - R^A),
/// rho' = (B^A - A'B^)/2, bracketed with e_ij (e_in, e_jn for rho).
pub fn reduced_rhs(rs: &ReducedState, masses: &[f64]) -> Result<ReducedState, DynamicsError> {
    check_len(rs, masses)?;
    let n = rs.n;
    let a = a_from_b(&rs.b, masses)?;
    let at = a.transpose();
    let h = rs.normal_forms();
    let ba = &h.b * &a;
    let bsym = (&ba + ba.transpose()) * 0.5;
    let ga = &h.g * &a;
    let gsym = &ga + ga.transpose();
    let rterm = &at * &h.r - &h.r * &a;
    let banti = (&ba - ba.transpose()) * 0.5;
    let ps = pairs(n);
    Ok(ReducedState {
        n,
        b: rs.g.iter().map(|g| 2.0 * g).collect(),
        g: ps
            .iter()
            .zip(&rs.d)
            .map(|(&(i, j), d)| d + bracket_pair(&bsym, i, j))
            .collect(),
        d: ps
            .iter()
            .map(|&(i, j)| bracket_pair(&gsym, i, j) + bracket_pair(&rterm, i, j))
            .collect(),
        rho: pairs(n - 1)
            .into_iter()
            .map(|(i, j)| bracket_last(&banti, i, j))
            .collect(),
    })
}

/// Second derivative of every g_ij. It does not involve the d_ij.
pub fn g_second_derivative(rs: &ReducedState, masses: &[f64]) -> Result<Vec<f64>, DynamicsError> {
    let first = reduced_rhs(rs, masses)?;
    let a = a_from_b(&rs.b, masses)?;
    let ad = a_dot(&rs.b, &rs.g, masses)?;
    let h = rs.normal_forms();
    let ga = &h.g * &a;
    let gsym = &ga + ga.transpose();
    let bad = &h.b * &ad;
    let bsym = (&bad + bad.transpose()) * 0.5;
    Ok(pairs(rs.n)
        .into_iter()
        .zip(&first.d)
        .map(|((i, j), dd)| dd + bracket_pair(&gsym, i, j) + bracket_pair(&bsym, i, j))
        .collect())
}

/// max over i < j < n of |e_in' (B^A - A'B^) e_jn|.
pub fn balance_residual(b: &[f64], masses: &[f64]) -> Result<f64, DynamicsError> {
    let n = masses.len();
    let a = a_from_b(b, masses)?;
    let bh = sym_from_coords(n, b);
    let ba = &bh * &a;
    let anti = &ba - ba.transpose();
    Ok(pairs(n - 1)
        .into_iter()
        .map(|(i, j)| bracket_last(&anti, i, j).abs())
        .fold(0.0, f64::max))
}

/// `t, b_ij..., g_ij..., d_ij..., rho_ij...`.
pub fn reduced_header(n: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for prefix in ["b", "g", "d"] {
        for (i, j) in pairs(n) {
            h.push(format!("{prefix}_{}{}", i + 1, j + 1));
        }
    }
    for (i, j) in pairs(n - 1) {
        h.push(format!("rho_{}{}", i + 1, j + 1));
    }
    h
}

pub fn reduced_csv(rows: &[(f64, ReducedState)]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let Some((_, first)) = rows.first() else {
        return Ok(String::new());
    };
    w.write_record(reduced_header(first.n))?;
    for (t, rs) in rows {
        let mut row = vec![t.to_string()];
        row.extend(rs.flat().iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("ascii"))
}

/// One row of a reduction check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub t: f64,
    pub coords: ReducedState,
    /// Five-point central difference of the coordinates.
    pub fd: ReducedState,
    pub rhs: ReducedState,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReduceCheck {
    pub rows: Vec<CheckRow>,
    pub max_residual: f64,
}

/// Integrates the full dynamics on a grid of spacing `h` over [0, t_end] and
/// compares the finite-difference derivative of the standard coordinates
/// with [`reduced_rhs`] at every interior grid point.
pub fn reduce_check(s: &BodyState, t_end: f64, tol: f64, h: f64) -> Result<ReduceCheck, DynamicsError> {
    if !(h > 0.0 && h.is_finite()) || t_end < 4.0 * h {
        return Err(DynamicsError::Shape(format!(
            "grid spacing {h} does not fit in [0, {t_end}]"
        )));
    }
    let steps = (t_end / h).floor() as usize;
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * h).collect();
    let traj = integrate_at(s, &times, tol)?;
    let coords: Vec<ReducedState> = traj
        .samples
        .iter()
        .map(|smp| standard_coordinates(&smp.state))
        .collect();
    let flat: Vec<Vec<f64>> = coords.iter().map(ReducedState::flat).collect();
    let n = s.n();
    let mut rows = Vec::new();
    let mut max_residual: f64 = 0.0;
    for k in 2..coords.len().saturating_sub(2) {
        let fd: Vec<f64> = (0..flat[k].len())
            .map(|c| {
                (flat[k - 2][c] - 8.0 * flat[k - 1][c] + 8.0 * flat[k + 1][c] - flat[k + 2][c])
                    / (12.0 * h)
            })
            .collect();
        let fd = ReducedState::from_flat(n, &fd);
        let rhs = reduced_rhs(&coords[k], &s.masses)?;
        let residual = fd.max_abs_diff(&rhs);
        max_residual = max_residual.max(residual);
        rows.push(CheckRow {
            t: traj.samples[k].t,
            coords: coords[k].clone(),
            fd,
            rhs,
            residual,
        });
    }
    Ok(ReduceCheck { rows, max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::newton_rhs;
    use crate::dynamics::presets::{lagrange_equilateral, random_state};

    /// Exact derivative of the standard coordinates by the chain rule on the
    /// Gram matrices, from the Newtonian vector field.
    fn pushforward(s: &BodyState) -> ReducedState {
        let (xd, vd) = newton_rhs(s).unwrap();
        let xt = s.x.transpose();
        let vt = s.v.transpose();
        let bd = xd.transpose() * &s.x + &xt * &xd;
        let cd = xd.transpose() * &s.v + &xt * &vd;
        let dd = vd.transpose() * &s.v + &vt * &vd;
        coords(&GramForms {
            b: bd,
            g: (&cd + cd.transpose()) * 0.5,
            r: (&cd - cd.transpose()) * 0.5,
            d: dd,
        })
    }

    #[test]
    fn rhs_matches_chain_rule() {
        for seed in 0..5 {
            for n in [3, 4] {
                let s = random_state(n, 3, seed);
                let got = reduced_rhs(&standard_coordinates(&s), &s.masses).unwrap();
                let want = pushforward(&s);
                assert!(got.max_abs_diff(&want) < 1e-11, "seed {seed} n {n}");
            }
        }
    }

    #[test]
    fn b_is_squared_distance() {
        let s = random_state(4, 3, 11);
        let rs = standard_coordinates(&s);
        for (b, r) in rs.b.iter().zip(s.distances()) {
            assert!((b - r * r).abs() < 1e-13);
        }
    }

    #[test]
    fn hats_are_idempotent_and_equivalent() {
        let s = random_state(4, 2, 3);
        let gf = gram_forms(&s);
        let h = normal_forms(&gf);
        let hh = normal_forms(&GramForms {
            b: h.b.clone(),
            g: h.g.clone(),
            r: h.r.clone(),
            d: h.d.clone(),
        });
        assert!((&h.b - &hh.b).norm() < 1e-14 && (&h.r - &hh.r).norm() < 1e-14);
        for (i, j) in pairs(4) {
            assert!((bracket_pair(&h.b, i, j) - bracket_pair(&gf.b, i, j)).abs() < 1e-13);
        }
        let rs = standard_coordinates(&s);
        assert!((&rs.normal_forms().b - &h.b).norm() < 1e-13);
        assert!((&rs.normal_forms().r - &h.r).norm() < 1e-13);
    }

    #[test]
    fn lagrange_is_equilibrium() {
        let (s, _) = lagrange_equilateral([1.0, 2.0, 3.0], 1.0);
        let d = reduced_rhs(&standard_coordinates(&s), &s.masses).unwrap();
        assert!(d.flat().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn isosceles_equal_masses_balanced() {
        let r: f64 = 1.7;
        let b = [1.0, r * r, r * r];
        assert!(balance_residual(&b, &[2.0, 2.0, 5.0]).unwrap() < 1e-12);
        assert!(balance_residual(&[1.0, 1.21, 1.69], &[1.0, 2.0, 3.0]).unwrap() > 1e-3);
    }

    #[test]
    fn header() {
        let h = reduced_header(4);
        assert_eq!(h.len(), 1 + 6 * 3 + 3);
        assert_eq!(h.last().unwrap(), "rho_23");
    }
}
