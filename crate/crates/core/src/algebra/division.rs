use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::Zero;

use super::positivity::PositivityContext;
use super::ring::{Monomial, MonomialOrder};
use super::{AlgebraError, Poly, Rational};

/// Monomial keyed by a runtime order so a `BTreeMap` can hold a polynomial
/// under active reduction.
#[derive(Clone, Debug)]
struct Key {
    m: Monomial,
    order: MonomialOrder,
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
    }
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order.cmp(&self.m, &other.m)
    }
}

struct Work {
    map: BTreeMap<Key, Rational>,
    order: MonomialOrder,
}

impl Work {
    fn new(p: &Poly) -> Self {
        let order = p.ring().order();
        let map = p
            .terms()
            .iter()
            .map(|(m, c)| (Key { m: m.clone(), order }, c.clone()))
            .collect();
        Self { map, order }
    }

    fn pop_lead(&mut self) -> Option<(Monomial, Rational)> {
        self.map.pop_last().map(|(k, c)| (k.m, c))
    }

    /// self -= c * m * d, skipping the leading term of `d`, which is known to
    /// cancel the term just popped.
    fn sub_scaled_tail(&mut self, d: &Poly, m: &Monomial, c: &Rational) {
        for (dm, dc) in &d.terms()[1..] {
            let key = Key {
                m: dm.mul(m),
                order: self.order,
            };
            let delta = dc * c;
            match self.map.entry(key) {
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    *e.get_mut() -= delta;
                    if e.get().is_zero() {
                        e.remove();
                    }
                }
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(-delta);
                }
            }
        }
    }
}

/// Remainder of full multivariate division of `p` by `basis` (first
/// divisor whose leading monomial divides wins). Zero divisors are ignored.
///
/// When `basis` is a Groebner basis the remainder is the unique normal form
/// and vanishes exactly on ideal members.
pub fn normal_form(p: &Poly, basis: &[Poly]) -> Poly {
    let divisors: Vec<&Poly> = basis.iter().filter(|b| !b.is_zero()).collect();
    reduce(p, &divisors)
}

pub(crate) fn reduce(p: &Poly, divisors: &[&Poly]) -> Poly {
    for d in divisors {
        p.check_ring(d).expect("normal form across rings");
    }
    let mut work = Work::new(p);
    let mut rem: Vec<(Monomial, Rational)> = Vec::new();
    while let Some((m, c)) = work.pop_lead() {
        let hit = divisors.iter().find_map(|d| {
            let lm = d.lead_monomial()?;
            lm.quotient_of(&m).map(|q| (*d, q))
        });
        match hit {
            Some((d, q)) => {
                let factor = &c / d.lead_coeff().expect("nonzero divisor");
                work.sub_scaled_tail(d, &q, &factor);
            }
            None => rem.push((m, c)),
        }
    }
    Poly::from_sorted(p.ring(), rem)
}

/// Quotient and remainder of division by a single polynomial.
pub fn divide(p: &Poly, d: &Poly) -> Result<(Poly, Poly), AlgebraError> {
    p.check_ring(d)?;
    if d.is_zero() {
        return Err(AlgebraError::DivisionByZero);
    }
    let lm = d.lead_monomial().expect("nonzero");
    let lc = d.lead_coeff().expect("nonzero");
    let mut work = Work::new(p);
    let mut quot = Vec::new();
    let mut rem = Vec::new();
    while let Some((m, c)) = work.pop_lead() {
        match lm.quotient_of(&m) {
            Some(q) => {
                let factor = &c / lc;
                work.sub_scaled_tail(d, &q, &factor);
                quot.push((q, factor));
            }
            None => rem.push((m, c)),
        }
    }
    Ok((Poly::from_terms(p.ring(), quot), Poly::from_sorted(p.ring(), rem)))
}

/// `Some(q)` with `p == q * d`, or `None` when `d` does not divide `p`.
///
/// A single polynomial is a Groebner basis of the principal ideal it
/// generates, so a zero remainder is equivalent to divisibility.
pub fn divide_exact(p: &Poly, d: &Poly) -> Result<Option<Poly>, AlgebraError> {
    let (q, r) = divide(p, d)?;
    Ok(r.is_zero().then_some(q))
}

/// Divides out every catalog factor as often as it divides `p`.
///
/// Each catalog entry must be certified nonzero by `ctx` (a positive
/// polynomial in positive atoms, or a declared case hypothesis); otherwise the
/// zero set of the result could differ from that of `p`.
pub fn strip_positive_factors(
    p: &Poly,
    ctx: &PositivityContext,
    catalog: &[Poly],
) -> Result<Poly, AlgebraError> {
    for f in catalog {
        if !ctx.is_certified_nonzero(f) {
            return Err(AlgebraError::UncertifiedFactor(f.to_string()));
        }
    }
    Ok(strip_factors(p, catalog).0)
}

/// Repeated trial division; returns the cofactor and the multiplicity of
/// each catalog entry that was removed.
pub fn strip_factors(p: &Poly, catalog: &[Poly]) -> (Poly, Vec<u32>) {
    let mut cur = p.clone();
    let mut mult = vec![0u32; catalog.len()];
    if cur.is_zero() {
        return (cur, mult);
    }
    loop {
        let mut progressed = false;
        for (i, f) in catalog.iter().enumerate() {
            if f.is_constant() {
                continue;
            }
            while let Ok(Some(q)) = divide_exact(&cur, f) {
                cur = q;
                mult[i] += 1;
                progressed = true;
            }
        }
        if !progressed {
            return (cur, mult);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, PolyRing};
    use std::sync::Arc;

    fn ring() -> Arc<crate::algebra::PolyRing> {
        PolyRing::with_vars(
            ["k13", "k14", "k23", "k24", "m1", "m2", "m3", "x"],
            MonomialOrder::DegRevLex,
        )
        .unwrap()
    }

    fn p(s: &str) -> Poly {
        parse_poly(s, &ring()).unwrap()
    }

    #[test]
    fn exact_quotient() {
        assert_eq!(divide_exact(&p("x^2 - 1"), &p("x - 1")).unwrap(), Some(p("x + 1")));
    }

    #[test]
    fn non_divisible() {
        assert_eq!(divide_exact(&p("x^2 + 1"), &p("x - 1")).unwrap(), None);
    }

    #[test]
    fn monomial_factor() {
        let big = p("m2^2*(m1+m2)*(k24^3-1)");
        assert_eq!(
            divide_exact(&big, &p("m2")).unwrap(),
            Some(p("m2*(m1+m2)*(k24^3-1)"))
        );
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(
            divide_exact(&p("x"), &p("0")),
            Err(AlgebraError::DivisionByZero)
        );
    }

    #[test]
    fn normal_form_basics() {
        let g = p("k13^3 - k23^3");
        assert!(normal_form(&g, std::slice::from_ref(&g)).is_zero());
        assert_eq!(normal_form(&p("1"), &[p("x")]), p("1"));
    }

    #[test]
    fn strip_catalog() {
        let ctx = PositivityContext::with_atoms(ring().registry().names().iter().cloned());
        let q = p("m2*(m1+m2)*(k24^3-1)");
        let out = strip_positive_factors(&q, &ctx, &[p("m2"), p("m1+m2")]).unwrap();
        assert_eq!(out, p("k24^3 - 1"));
        let fixed = p("k24^3 - 1");
        assert_eq!(
            strip_positive_factors(&fixed, &ctx, &[p("m2"), p("m1+m2")]).unwrap(),
            fixed
        );
    }

    #[test]
    fn strip_refuses_sign_indefinite_factor() {
        let ctx = PositivityContext::with_atoms(["m1", "m2"]);
        let err = strip_positive_factors(&p("m1 - m2"), &ctx, &[p("m1 - m2")]).unwrap_err();
        assert!(matches!(err, AlgebraError::UncertifiedFactor(_)));
    }
}
