//! Univariate real-root counting and isolation via Sturm sequences.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{AlgebraError, Poly, Rational};

/// Dense univariate polynomial, coefficients in ascending degree, no trailing
/// zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Converts a polynomial mentioning at most one variable.
    pub fn from_poly(p: &Poly) -> Result<Self, AlgebraError> {
        let vars = p.support_vars();
        if vars.len() > 1 {
            return Err(AlgebraError::NotUnivariate(p.to_string()));
        }
        let var = vars.first().copied();
        let deg = var.map_or(0, |v| p.degree_in(v)) as usize;
        let mut coeffs = vec![Rational::zero(); deg + 1];
        for (m, c) in p.terms() {
            let e = var.map_or(0, |v| m.exponent(v)) as usize;
            coeffs[e] = c.clone();
        }
        Ok(Self::new(coeffs))
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn lead(&self) -> &Rational {
        self.coeffs.last().expect("nonzero")
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(i.into()))
                .collect(),
        )
    }

    /// Quotient and remainder by a nonzero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.coeffs.clone();
        if r.len() < d.coeffs.len() {
            return (Self::new(Vec::new()), self.clone());
        }
        let dl = d.lead();
        let shift_max = r.len() - d.coeffs.len();
        let mut q = vec![Rational::zero(); shift_max + 1];
        for s in (0..=shift_max).rev() {
            let c = &r[s + d.coeffs.len() - 1] / dl;
            if c.is_zero() {
                continue;
            }
            for (k, dc) in d.coeffs.iter().enumerate() {
                r[s + k] -= &c * dc;
            }
            q[s] = c;
        }
        (Self::new(q), Self::new(r))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead().clone();
        Self::new(self.coeffs.iter().map(|c| c / &l).collect())
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p / gcd(p, p')`: same distinct roots, all simple.
    pub fn squarefree(&self) -> Self {
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0
    }

    /// Canonical Sturm sequence p, p', -rem(p_{k-1}, p_k), ...
    pub fn sturm_sequence(&self) -> Vec<Self> {
        let mut seq = vec![self.clone(), self.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            seq.push(Self::new(r.coeffs.into_iter().map(|c| -c).collect()));
        }
        seq.pop();
        seq
    }

    /// Bound `B` with every real root in `[-B, B]`.
    pub fn cauchy_bound(&self) -> Rational {
        let l = self.lead().abs();
        let m = self.coeffs[..self.degree()]
            .iter()
            .map(|c| c.abs() / &l)
            .max()
            .unwrap_or_else(Rational::zero);
        m + Rational::one()
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            let mono = match e {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{e}"),
            };
            if mono.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                f.write_str(&mono)?;
            } else {
                write!(f, "{a}*{mono}")?;
            }
        }
        Ok(())
    }
}

fn sign_changes(seq: &[UniPoly], x: &Rational) -> usize {
    let signs: Vec<i8> = seq
        .iter()
        .map(|p| {
            let v = p.eval(x);
            if v.is_zero() {
                0
            } else if v.is_positive() {
                1
            } else {
                -1
            }
        })
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Distinct real roots in a half-open interval `(lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootReport {
    pub count: usize,
    /// Disjoint intervals `(a, b]`, each holding exactly one root, in
    /// ascending order.
    #[serde(serialize_with = "ser_intervals")]
    pub intervals: Vec<(Rational, Rational)>,
}

fn ser_intervals<S: serde::Serializer>(
    iv: &[(Rational, Rational)],
    s: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(iv.len()))?;
    for (a, b) in iv {
        seq.serialize_element(&[a.to_string(), b.to_string()])?;
    }
    seq.end()
}

/// Counts the distinct real roots of `p` in `(lo, hi]` exactly and isolates
/// each one in an interval no wider than `width`.
pub fn sturm_roots(
    p: &UniPoly,
    lo: &Rational,
    hi: &Rational,
    width: &Rational,
) -> Result<RootReport, AlgebraError> {
    if p.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    if lo >= hi {
        return Err(AlgebraError::EmptyInterval);
    }
    let sf = p.squarefree();
    let seq = sf.sturm_sequence();
    let count_in = |a: &Rational, b: &Rational| sign_changes(&seq, a) - sign_changes(&seq, b);
    let count = count_in(lo, hi);
    let mut intervals = Vec::new();
    let mut stack = vec![(lo.clone(), hi.clone(), count)];
    while let Some((a, b, k)) = stack.pop() {
        if k == 0 {
            continue;
        }
        if k == 1 && &(&b - &a) <= width {
            intervals.push((a, b));
            continue;
        }
        let mid = (&a + &b) / Rational::from_integer(2.into());
        let left = count_in(&a, &mid);
        // Right half first so the left half is popped first.
        stack.push((mid.clone(), b, k - left));
        stack.push((a, mid, left));
    }
    Ok(RootReport { count, intervals })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn up(cs: &[i64]) -> UniPoly {
        UniPoly::new(cs.iter().map(|&c| q(c)).collect())
    }

    fn w() -> Rational {
        Rational::new(1.into(), 1_000_000.into())
    }

    #[test]
    fn cube_root_of_four() {
        let r = sturm_roots(&up(&[-4, 0, 0, 1]), &q(0), &q(10), &w()).unwrap();
        assert_eq!(r.count, 1);
        let (a, b) = &r.intervals[0];
        assert!(*a > q(1) && *b < q(2));
    }

    #[test]
    fn no_real_roots() {
        let r = sturm_roots(&up(&[1, 0, 1]), &q(-10), &q(10), &w()).unwrap();
        assert_eq!(r.count, 0);
        assert!(r.intervals.is_empty());
    }

    #[test]
    fn exact_rational_root_at_bisection_point() {
        let r = sturm_roots(&up(&[-1, 0, 1]), &q(0), &q(10), &w()).unwrap();
        assert_eq!(r.count, 1);
        let (a, b) = &r.intervals[0];
        assert!(*a < q(1) && q(1) <= *b);
        let r = sturm_roots(&up(&[0, -1, 0, 1]), &q(0), &q(10), &w()).unwrap();
        assert_eq!(r.count, 1);
    }

    #[test]
    fn repeated_roots_counted_once() {
        // (x-1)^2 (x-3)
        let r = sturm_roots(&up(&[-3, 7, -5, 1]), &q(0), &q(10), &w()).unwrap();
        assert_eq!(r.count, 2);
    }

    #[test]
    fn errors() {
        assert_eq!(
            sturm_roots(&up(&[]), &q(0), &q(1), &w()),
            Err(AlgebraError::ZeroPolynomial)
        );
        assert_eq!(
            sturm_roots(&up(&[1, 1]), &q(1), &q(1), &w()),
            Err(AlgebraError::EmptyInterval)
        );
    }

    #[test]
    fn display() {
        assert_eq!(up(&[-4, 0, 0, 1]).to_string(), "x^3 - 4");
    }
}
