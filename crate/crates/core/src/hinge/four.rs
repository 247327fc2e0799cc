//! n = 4 with r12 = 1, m4 = 1 and x = 1/r34 free.
//!
//! Rows g''14 and g''24 have pivots m3 (x^3 - k13^3) and m3 (x^3 - k23^3) on
//! rho13 and rho23. Away from x = k13 and x = k23 they eliminate both
//! unknowns, leaving three equations a_i rho12 = b_i (with g34 = 1) for
//! the rows g''12, g''13, g''23. Consistency needs f_i = a_j b_k - a_k b_j = 0.

use std::collections::BTreeMap;

use super::{HingeError, HingeProblem, LinearSystem};
use crate::algebra::{strip_positive_factors, Poly, PositivityContext, RatFunc};

/// (f index, power of x) of the coefficients fed to the Groebner basis.
pub const S_SELECTION: [(usize, u32); 6] = [(1, 0), (1, 9), (2, 0), (2, 6), (3, 6), (3, 9)];

const PIVOT_ROWS: [&str; 2] = ["g14", "g24"];
const PIVOT_COLS: [&str; 2] = ["rho13", "rho23"];
const EQ_ROWS: [&str; 3] = ["g12", "g13", "g23"];

#[derive(Debug, Clone)]
pub struct Elimination {
    pub pivots: [Poly; 2],
    pub a: Vec<Poly>,
    pub b: Vec<Poly>,
    /// a_j b_k - a_k b_j before stripping.
    pub raw_f: Vec<Poly>,
    pub f: Vec<Poly>,
    /// Powers of x present in each f_i.
    pub x_support: Vec<Vec<u32>>,
    /// (i, e, p^i_e) over the parameter ring, each stripped of positive
    /// factors and content.
    pub coefficients: Vec<(usize, u32, Poly)>,
}

impl Elimination {
    /// The generators S in [`S_SELECTION`] order.
    pub fn selected(&self) -> Result<Vec<Poly>, HingeError> {
        S_SELECTION
            .iter()
            .map(|&(i, e)| {
                self.coefficients
                    .iter()
                    .find(|(fi, fe, _)| *fi == i && *fe == e)
                    .map(|(_, _, p)| p.clone())
                    .ok_or_else(|| HingeError::Invariant(format!("p^{i}_{e} is zero")))
            })
            .collect()
    }
}

fn k_names() -> [&'static str; 4] {
    ["k13", "k14", "k23", "k24"]
}

/// Factors removable from f_i: every parameter, x, and the two pivot
/// factors k13^3 - x^3, k23^3 - x^3.
pub(crate) fn catalog(hp: &HingeProblem) -> Vec<Poly> {
    let mut c: Vec<Poly> = hp
        .ring
        .registry()
        .names()
        .iter()
        .map(|v| hp.var(v))
        .collect();
    c.push(hp.parse("k13^3 - x^3"));
    c.push(hp.parse("k23^3 - x^3"));
    c
}

/// Positivity of every variable plus the case split x != k13, x != k23.
pub(crate) fn pivot_context(hp: &HingeProblem) -> PositivityContext {
    let mut ctx = hp.positivity();
    ctx.assume_nonzero(hp.parse("k13^3 - x^3"));
    ctx.assume_nonzero(hp.parse("k23^3 - x^3"));
    ctx
}

fn idx(sys: &LinearSystem, rows: bool, name: &str) -> Result<usize, HingeError> {
    let found = if rows { sys.row(name) } else { sys.column(name) };
    found.ok_or_else(|| HingeError::Invariant(format!("missing {name}")))
}

pub fn four_body_eliminate(hp: &HingeProblem, sys: &LinearSystem) -> Result<Elimination, HingeError> {
    if hp.n != 4 {
        return Err(HingeError::Invariant("elimination needs n = 4".into()));
    }
    let c = &sys.cleared;
    let (r12, r13, r23, g) = (
        idx(sys, false, "rho12")?,
        idx(sys, false, "rho13")?,
        idx(sys, false, "rho23")?,
        idx(sys, false, "g34")?,
    );
    let p3r = idx(sys, true, PIVOT_ROWS[0])?;
    let p5r = idx(sys, true, PIVOT_ROWS[1])?;
    let p3 = c[p3r][idx(sys, false, PIVOT_COLS[0])?].clone();
    let p5 = c[p5r][idx(sys, false, PIVOT_COLS[1])?].clone();
    if !c[p3r][r23].is_zero() || !c[p5r][r13].is_zero() {
        return Err(HingeError::Invariant("pivot rows are not triangular".into()));
    }
    let ctx = pivot_context(hp);
    for p in [&p3, &p5] {
        let rest = strip_positive_factors(p, &ctx, &catalog(hp))?;
        if rest.is_zero() || !rest.is_constant() {
            return Err(HingeError::Invariant(format!("pivot {p} is not a catalog product")));
        }
    }

    // rho13 = -(c[p3r][r12] rho12 + c[p3r][g]) / p3, likewise rho23; then
    // a_i rho12 = b_i after multiplying row i by p3 p5.
    let p35 = &p3 * &p5;
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for name in EQ_ROWS {
        let row = &c[idx(sys, true, name)?];
        let ai = &(&(&row[r12] * &p35) - &(&(&row[r13] * &c[p3r][r12]) * &p5))
            - &(&(&row[r23] * &c[p5r][r12]) * &p3);
        let bi = &(&(&(&row[r13] * &c[p3r][g]) * &p5) + &(&(&row[r23] * &c[p5r][g]) * &p3))
            - &(&row[g] * &p35);
        a.push(ai);
        b.push(bi);
    }

    let cat = catalog(hp);
    let mut raw_f = Vec::new();
    let mut f = Vec::new();
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let fi = &(&a[j] * &b[k]) - &(&a[k] * &b[j]);
        if fi.is_zero() {
            return Err(HingeError::Invariant(format!("f_{} vanishes identically", i + 1)));
        }
        f.push(strip_positive_factors(&fi, &ctx, &cat)?.primitive_part());
        raw_f.push(fi);
    }

    let xi = hp.x_index();
    let param_cat: Vec<Poly> = cat[..xi].to_vec();
    let mut x_support = Vec::new();
    let mut coefficients = Vec::new();
    for (i, fi) in f.iter().enumerate() {
        let by_power: BTreeMap<u32, Poly> = fi.coefficients_in(xi);
        x_support.push(by_power.keys().copied().collect());
        for (e, p) in by_power {
            let stripped = strip_positive_factors(&p, &ctx, &param_cat)?.primitive_part();
            coefficients.push((i + 1, e, stripped.to_ring(&hp.param_ring)?));
        }
    }

    Ok(Elimination {
        pivots: [p3, p5],
        a,
        b,
        raw_f,
        f,
        x_support,
        coefficients,
    })
}

fn all_k_one(hp: &HingeProblem) -> Vec<(usize, Poly)> {
    k_names()
        .iter()
        .map(|k| (hp.ring.index(k).expect("k var"), Poly::one(&hp.ring)))
        .collect()
}

/// The four-by-four minors of the cleared matrix, each with one row left
/// out (in row order), after setting every k_ij = 1.
pub fn all_k_one_minors(hp: &HingeProblem, sys: &LinearSystem) -> Result<Vec<Poly>, HingeError> {
    let subs = all_k_one(hp);
    let m: Vec<Vec<Poly>> = sys
        .cleared
        .iter()
        .map(|row| row.iter().map(|e| e.substitute(&subs)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    Ok((0..m.len())
        .map(|skip| {
            let sub: Vec<Vec<Poly>> = m
                .iter()
                .enumerate()
                .filter(|&(r, _)| r != skip)
                .map(|(_, row)| row.clone())
                .collect();
            det(&sub)
        })
        .collect())
}

fn det(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let ring = m[0][0].ring().clone();
    let mut acc = Poly::zero(&ring);
    for col in 0..n {
        if m[0][col].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != col)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][col] * &det(&minor);
        acc = if col % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

#[derive(Debug, Clone)]
pub struct AllKOne {
    /// (row label, right-hand side r) meaning rho13 (x^3 - 1) = r.
    pub relations: Vec<(String, Poly)>,
    /// Primitive polynomial in x whose roots are the admissible x.
    pub constraint: Poly,
}

/// With every k_ij = 1 and g34 = 1, two rows involve rho13 alone. Their
/// consistency fixes x.
pub fn special_case_all_k_one(hp: &HingeProblem, sys: &LinearSystem) -> Result<AllKOne, HingeError> {
    let subs = all_k_one(hp);
    let r13 = idx(sys, false, "rho13")?;
    let g = idx(sys, false, "g34")?;
    let x3m1 = hp.parse("x^3 - 1");
    let mut relations = Vec::new();
    for (r, row) in sys.cleared.iter().enumerate() {
        let row: Vec<Poly> = row.iter().map(|e| e.substitute(&subs)).collect::<Result<_, _>>()?;
        let only_rho13 = row
            .iter()
            .enumerate()
            .all(|(c, e)| c == r13 || c == g || e.is_zero());
        if !only_rho13 || row[r13].is_zero() {
            continue;
        }
        // alpha rho13 + beta = 0 with alpha = s (x^3 - 1).
        let s = crate::algebra::divide_exact(&row[r13], &x3m1)?.ok_or_else(|| {
            HingeError::Invariant(format!("rho13 coefficient {} lacks x^3 - 1", row[r13]))
        })?;
        let rhs = RatFunc::from_poly(-&row[g])
            .mul(&RatFunc::recip(&s)?)
            .to_poly()
            .ok_or_else(|| HingeError::Invariant("row scale does not divide".into()))?;
        relations.push((sys.row_labels[r].clone(), rhs));
    }
    if relations.len() != 2 {
        return Err(HingeError::Invariant(format!(
            "expected two rho13-only rows at k = 1, found {}",
            relations.len()
        )));
    }
    let diff = &relations[0].1 - &relations[1].1;
    if diff.is_zero() {
        return Err(HingeError::Invariant("rho13 relations coincide".into()));
    }
    let constraint = diff.primitive_part();
    Ok(AllKOne {
        relations,
        constraint,
    })
}
