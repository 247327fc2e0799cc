//! Symbolic g'' rows for a hinge problem.
//!
//! g''_ij = 2 e'(G^A + A'G^)e + e'(A'R^ - R^A)e + (1/2) e'(B^A' + A''B^)e
//! with e = e_ij and A' = dA/dt, taken along a motion in which only the free
//! distance changes. The d_ij drop out.

use num_traits::One;

use super::{HingeError, HingeProblem};
use crate::algebra::{Poly, RatFunc, Rational};
use crate::dynamics::pairs;

type Mat = Vec<Vec<RatFunc>>;

#[derive(Debug, Clone)]
pub struct LinearSystem {
    /// Column names: rho_ij (i < j < n) then the free g.
    pub unknowns: Vec<String>,
    /// `g_ij` for the row coming from g''_ij.
    pub row_labels: Vec<String>,
    /// `row_scale * d/dt g'_ij` coefficients.
    pub entries: Vec<Vec<RatFunc>>,
    pub row_scale: Rational,
    /// Monomial per row clearing every reciprocal.
    pub multipliers: Vec<Poly>,
    /// `multiplier * entry`, polynomial.
    pub cleared: Vec<Vec<Poly>>,
}

impl LinearSystem {
    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.unknowns.iter().position(|u| u == name)
    }

    pub fn row(&self, label: &str) -> Option<usize> {
        self.row_labels.iter().position(|u| u == label)
    }

    /// One canonical string per row: `label: multiplier * (sum of terms) = 0`.
    pub fn row_strings(&self) -> Vec<String> {
        (0..self.rows())
            .map(|r| {
                let terms: Vec<String> = self.cleared[r]
                    .iter()
                    .zip(&self.unknowns)
                    .filter(|(c, _)| !c.is_zero())
                    .map(|(c, u)| format!("({c})*{u}"))
                    .collect();
                format!(
                    "{}: {} * g''_{} * {} = {} = 0",
                    self.row_labels[r],
                    self.row_scale,
                    &self.row_labels[r][1..],
                    self.multipliers[r],
                    if terms.is_empty() { "0".to_string() } else { terms.join(" + ") }
                )
            })
            .collect()
    }
}

fn zeros(n: usize, ring: &std::sync::Arc<crate::algebra::PolyRing>) -> Mat {
    vec![vec![RatFunc::zero(ring); n]; n]
}

fn mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let ring = a[0][0].ring().clone();
    let mut out = zeros(n, &ring);
    for i in 0..n {
        for j in 0..n {
            let mut acc = RatFunc::zero(&ring);
            for k in 0..n {
                if a[i][k].is_zero() || b[k][j].is_zero() {
                    continue;
                }
                acc = acc.add(&a[i][k].mul(&b[k][j]));
            }
            out[i][j] = acc;
        }
    }
    out
}

fn transpose(a: &Mat) -> Mat {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i].clone()).collect()).collect()
}

fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.add(y)).collect())
        .collect()
}

fn scale(a: &Mat, c: &Rational) -> Mat {
    a.iter()
        .map(|r| r.iter().map(|x| x.scale(c)).collect())
        .collect()
}

/// Fills the diagonal so every column sums to zero.
fn zero_column_sums(a: &mut Mat) {
    let n = a.len();
    for j in 0..n {
        let mut s = RatFunc::zero(a[0][0].ring());
        for (i, row) in a.iter().enumerate() {
            if i != j {
                s = s.add(&row[j]);
            }
        }
        a[j][j] = s.neg();
    }
}

fn bracket(m: &Mat, i: usize, j: usize) -> RatFunc {
    m[i][i].add(&m[j][j]).sub(&m[i][j]).sub(&m[j][i])
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Masses and inverse distances (in [`pairs`] order) of the problem.
fn parameters(hp: &HingeProblem) -> Result<(Vec<RatFunc>, Vec<RatFunc>), HingeError> {
    let v = |s: &str| RatFunc::from_poly(hp.var(s));
    let one = RatFunc::constant(&hp.ring, Rational::one());
    match hp.n {
        3 => Ok((
            vec![v("m1"), v("m2"), v("m3")],
            vec![
                RatFunc::recip(&hp.var("r12"))?,
                RatFunc::recip(&hp.var("r13"))?,
                RatFunc::recip(&hp.var("x"))?,
            ],
        )),
        4 => Ok((
            vec![v("m1"), v("m2"), v("m3"), one.clone()],
            vec![one, v("k13"), v("k14"), v("k23"), v("k24"), v("x")],
        )),
        n => Err(HingeError::UnsupportedN(n)),
    }
}

/// Builds the linear system g''_ij = 0 over every fixed pair.
pub fn gddot_system(hp: &HingeProblem) -> Result<LinearSystem, HingeError> {
    let n = hp.n;
    let ring = &hp.ring;
    let (masses, inv) = parameters(hp)?;
    let ps = pairs(n);
    let kof = |i: usize, j: usize| {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        &inv[ps.iter().position(|&p| p == (a, b)).expect("pair")]
    };

    let mut a = zeros(n, ring);
    let mut bh = zeros(n, ring);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                a[i][j] = masses[i].mul(&kof(i, j).pow(3));
                bh[i][j] = kof(i, j).inv()?.pow(2).scale(&q(-1, 2));
            }
        }
    }
    zero_column_sums(&mut a);
    let at = transpose(&a);

    // Only the free distance moves: dA/dt at g_free = 1.
    let (fa, fb) = hp.free;
    let mut adot = zeros(n, ring);
    let k5 = kof(fa, fb).pow(5).scale(&q(-3, 1));
    adot[fa][fb] = masses[fa].mul(&k5);
    adot[fb][fa] = masses[fb].mul(&k5);
    zero_column_sums(&mut adot);

    let mut gh = zeros(n, ring);
    gh[fa][fb] = RatFunc::constant(ring, q(-1, 2));
    gh[fb][fa] = RatFunc::constant(ring, q(-1, 2));

    let g_term = add(
        &scale(&add(&mul(&gh, &a), &mul(&at, &gh)), &q(2, 1)),
        &scale(&add(&mul(&bh, &adot), &mul(&transpose(&adot), &bh)), &q(1, 2)),
    );

    let rho_pairs = pairs(n - 1);
    let mut rho_terms = Vec::new();
    for &(u, v) in &rho_pairs {
        let mut r = zeros(n, ring);
        r[u][v] = RatFunc::constant(ring, q(1, 1));
        r[v][u] = RatFunc::constant(ring, q(-1, 1));
        let ra = mul(&r, &a);
        let atr = mul(&at, &r);
        rho_terms.push(add(&atr, &scale(&ra, &q(-1, 1))));
    }

    let row_scale = if n == 3 { q(1, 1) } else { q(1, 2) };
    let mut unknowns: Vec<String> = rho_pairs
        .iter()
        .map(|(u, v)| format!("rho{}{}", u + 1, v + 1))
        .collect();
    unknowns.push(format!("g{}{}", fa + 1, fb + 1));

    let mut entries = Vec::new();
    let mut row_labels = Vec::new();
    for (i, j) in hp.fixed_pairs() {
        let mut row: Vec<RatFunc> = rho_terms
            .iter()
            .map(|m| bracket(m, i, j).scale(&row_scale))
            .collect();
        row.push(bracket(&g_term, i, j).scale(&row_scale));
        entries.push(row);
        row_labels.push(format!("g{}{}", i + 1, j + 1));
    }

    let mut multipliers = Vec::new();
    let mut cleared = Vec::new();
    for row in &entries {
        let m = clearing_monomial(hp, row)?;
        let polys = row
            .iter()
            .map(|e| {
                e.mul_poly(&m).to_poly().ok_or_else(|| {
                    HingeError::Invariant(format!("entry {e} not cleared by {m}"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        multipliers.push(m);
        cleared.push(polys);
    }

    Ok(LinearSystem {
        unknowns,
        row_labels,
        entries,
        row_scale,
        multipliers,
        cleared,
    })
}

/// Least monomial multiple of every denominator in the row. Denominators are
/// products of single variables by construction.
fn clearing_monomial(hp: &HingeProblem, row: &[RatFunc]) -> Result<Poly, HingeError> {
    let mut exps = vec![0u32; hp.ring.nvars()];
    for e in row {
        for (f, k) in e.denominator_factors() {
            let vars = f.support_vars();
            if f.len() != 1 || vars.len() != 1 || f.total_degree() != 1 {
                return Err(HingeError::Invariant(format!(
                    "non-monomial denominator factor {f}"
                )));
            }
            exps[vars[0]] = exps[vars[0]].max(*k);
        }
    }
    Ok(Poly::term(
        &hp.ring,
        crate::algebra::Monomial::from_exponents(&exps),
        Rational::one(),
    ))
}
