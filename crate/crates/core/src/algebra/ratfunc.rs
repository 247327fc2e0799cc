use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::division::divide_exact;
use super::ring::PolyRing;
use super::{AlgebraError, Poly, Rational};

/// Quotient `num / prod(factor^exp)` with an explicitly factored denominator.
///
/// Denominator factors are primitive with positive leading coefficient and
/// are the provenance record: every one of them must be certified nonzero by
/// the caller. Common factors are cancelled eagerly.
#[derive(Clone, Debug)]
pub struct RatFunc {
    num: Poly,
    den: Vec<(Poly, u32)>,
}

impl RatFunc {
    pub fn from_poly(p: Poly) -> Self {
        Self {
            num: p,
            den: Vec::new(),
        }
    }

    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        Self::from_poly(Poly::zero(ring))
    }

    pub fn constant(ring: &Arc<PolyRing>, c: Rational) -> Self {
        Self::from_poly(Poly::constant(ring, c))
    }

    /// `1 / f`.
    pub fn recip(f: &Poly) -> Result<Self, AlgebraError> {
        if f.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if let Some(c) = f.constant_value() {
            return Ok(Self::constant(f.ring(), c.recip()));
        }
        let prim = f.primitive_part();
        let scale = (divide_exact(f, &prim)?)
            .and_then(|q| q.constant_value())
            .expect("primitive part divides");
        Ok(Self {
            num: Poly::constant(f.ring(), scale.recip()),
            den: vec![(prim, 1)],
        })
    }

    /// `1 / self`.
    pub fn inv(&self) -> Result<Self, AlgebraError> {
        Ok(Self::recip(&self.num)?.mul_poly(&self.denominator()))
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator_factors(&self) -> &[(Poly, u32)] {
        &self.den
    }

    pub fn denominator(&self) -> Poly {
        self.den
            .iter()
            .fold(Poly::one(self.num.ring()), |acc, (f, e)| &acc * &f.pow(*e))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn to_poly(&self) -> Option<Poly> {
        self.is_polynomial().then(|| self.num.clone())
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        self.num.ring()
    }

    fn normalize(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        for (f, e) in self.den.iter_mut() {
            while *e > 0 {
                match divide_exact(&self.num, f) {
                    Ok(Some(q)) => {
                        self.num = q;
                        *e -= 1;
                    }
                    _ => break,
                }
            }
        }
        self.den.retain(|(_, e)| *e > 0);
        self.den.sort_by_cached_key(|(f, _)| f.to_string());
        self
    }

    fn merge_den(a: &[(Poly, u32)], b: &[(Poly, u32)], combine: fn(u32, u32) -> u32) -> Vec<(Poly, u32)> {
        let mut out: Vec<(Poly, u32)> = a.to_vec();
        for (f, e) in b {
            match out.iter_mut().find(|(g, _)| g == f) {
                Some((_, ge)) => *ge = combine(*ge, *e),
                None => out.push((f.clone(), combine(0, *e))),
            }
        }
        for (f, e) in out.iter_mut() {
            if !b.iter().any(|(g, _)| g == f) {
                *e = combine(*e, 0);
            }
        }
        out
    }

    /// `self.num * (common / self.den)` for a common multiple of denominators.
    fn lift(&self, common: &[(Poly, u32)]) -> Poly {
        let mut out = self.num.clone();
        for (f, e) in common {
            let have = self
                .den
                .iter()
                .find(|(g, _)| g == f)
                .map_or(0, |(_, h)| *h);
            if *e > have {
                out = &out * &f.pow(e - have);
            }
        }
        out
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        let common = Self::merge_den(&self.den, &other.den, u32::max);
        let num = &self.lift(&common) + &other.lift(&common);
        RatFunc { num, den: common }.normalize()
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        let den = Self::merge_den(&self.den, &other.den, |a, b| a + b);
        RatFunc {
            num: &self.num * &other.num,
            den,
        }
        .normalize()
    }

    pub fn mul_poly(&self, p: &Poly) -> RatFunc {
        self.mul(&RatFunc::from_poly(p.clone()))
    }

    pub fn scale(&self, c: &Rational) -> RatFunc {
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
        .normalize()
    }

    pub fn pow(&self, e: u32) -> RatFunc {
        let mut out = RatFunc::constant(self.ring(), Rational::one());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Cross-multiplied equality.
    pub fn equals(&self, other: &RatFunc) -> bool {
        (&self.num * &other.denominator()) == (&other.num * &self.denominator())
    }

    /// True when every denominator factor matches (up to a scalar) one of
    /// `catalog`.
    pub fn denominators_within(&self, catalog: &[Poly]) -> bool {
        self.den.iter().all(|(f, _)| {
            catalog
                .iter()
                .any(|c| !c.is_zero() && c.primitive_part() == *f)
        })
    }

    pub fn substitute(&self, bindings: &[(usize, Poly)]) -> Result<RatFunc, AlgebraError> {
        let mut out = RatFunc::from_poly(self.num.substitute(bindings)?);
        for (f, e) in &self.den {
            let g = f.substitute(bindings)?;
            if g.is_zero() {
                return Err(AlgebraError::DivisionByZero);
            }
            out = out.mul(&RatFunc::recip(&g)?.pow(*e));
        }
        Ok(out)
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        let d: f64 = self
            .den
            .iter()
            .map(|(f, e)| f.eval_f64(point).powi(*e as i32))
            .product();
        self.num.eval_f64(point) / d
    }

    pub fn eval(&self, point: &[Rational]) -> Option<Rational> {
        let mut d = Rational::one();
        for (f, e) in &self.den {
            d *= num_traits::pow(f.eval(point), *e as usize);
        }
        (!d.is_zero()).then(|| self.num.eval(point) / d)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({})/(", self.num)?;
        for (i, (p, e)) in self.den.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "({p})")?;
            } else {
                write!(f, "({p})^{e}")?;
            }
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, MonomialOrder};

    fn ring() -> Arc<PolyRing> {
        PolyRing::with_vars(["k13", "k14", "x"], MonomialOrder::DegRevLex).unwrap()
    }

    fn p(s: &str) -> Poly {
        parse_poly(s, &ring()).unwrap()
    }

    #[test]
    fn reciprocal_sum_cancels() {
        // 1/k13^2 - 1/k14^2 == (k14^2 - k13^2) / (k13^2 k14^2)
        let a = RatFunc::recip(&p("k13")).unwrap().pow(2);
        let b = RatFunc::recip(&p("k14")).unwrap().pow(2);
        let lhs = a.sub(&b);
        let rhs = RatFunc::from_poly(p("k14^2 - k13^2"))
            .mul(&RatFunc::recip(&p("k13^2*k14^2")).unwrap());
        assert!(lhs.equals(&rhs));
        assert!(lhs.denominators_within(&[p("k13"), p("k14")]));
    }

    #[test]
    fn product_cancels_to_polynomial() {
        let r = RatFunc::recip(&p("x^3 - k13^3")).unwrap();
        let back = r.mul_poly(&p("2*k13^3 - 2*x^3"));
        assert_eq!(back.to_poly(), Some(p("-2")));
    }

    #[test]
    fn recip_normalizes_sign() {
        let r = RatFunc::recip(&p("-2*x")).unwrap();
        assert_eq!(r.denominator_factors()[0].0, p("x"));
        assert_eq!(r.numerator(), &p("-1/2"));
    }
}
