//! Buchberger's algorithm with the Gebauer-Moeller pair update.

use std::cmp::Ordering;

use super::division::{normal_form, reduce};
use super::ring::Monomial;
use super::Poly;
use crate::exec::Exec;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroebnerStats {
    /// S-polynomials actually reduced.
    pub reductions: usize,
    /// Reductions that ended in zero.
    pub zero_reductions: usize,
    /// Pairs discarded by the coprime-leading-monomial criterion.
    pub product_criterion: usize,
    /// Pairs discarded by the chain (lcm) criterion.
    pub chain_criterion: usize,
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

/// S-polynomial of two nonzero polynomials.
pub fn s_polynomial(f: &Poly, g: &Poly) -> Poly {
    let (fm, fc) = (f.lead_monomial().expect("nonzero"), f.lead_coeff().expect("nonzero"));
    let (gm, gc) = (g.lead_monomial().expect("nonzero"), g.lead_coeff().expect("nonzero"));
    let l = fm.lcm(gm);
    let a = f.mul_term(&fm.quotient_of(&l).expect("lcm"), &gc.clone());
    let b = g.mul_term(&gm.quotient_of(&l).expect("lcm"), &fc.clone());
    &a - &b
}

struct State {
    polys: Vec<Poly>,
    active: Vec<bool>,
    pairs: Vec<Pair>,
    stats: GroebnerStats,
}

impl State {
    fn lm(&self, i: usize) -> &Monomial {
        self.polys[i].lead_monomial().expect("stored polys are nonzero")
    }

    /// Inserts a new monic nonzero polynomial and updates the pair set.
    fn insert(&mut self, h: Poly) {
        let hi = self.polys.len();
        self.polys.push(h);
        self.active.push(true);
        let hm = self.lm(hi).clone();

        let mut cand: Vec<Pair> = (0..hi)
            .filter(|&g| self.active[g])
            .map(|g| Pair {
                i: g,
                j: hi,
                lcm: hm.lcm(self.lm(g)),
            })
            .collect();

        // Chain criterion among the new pairs.
        let mut kept: Vec<Pair> = Vec::new();
        while let Some(p) = cand.pop() {
            let coprime = hm.is_coprime(self.lm(p.i));
            let dominated = cand.iter().chain(kept.iter()).any(|q| q.lcm.divides(&p.lcm));
            if coprime || !dominated {
                kept.push(p);
            } else {
                self.stats.chain_criterion += 1;
            }
        }
        // Product criterion.
        let before = kept.len();
        kept.retain(|p| !hm.is_coprime(self.lm(p.i)));
        self.stats.product_criterion += before - kept.len();

        // Old pairs made redundant by h.
        let before = self.pairs.len();
        let old = std::mem::take(&mut self.pairs);
        self.pairs = old
            .into_iter()
            .filter(|p| {
                !(hm.divides(&p.lcm)
                    && hm.lcm(self.lm(p.i)) != p.lcm
                    && hm.lcm(self.lm(p.j)) != p.lcm)
            })
            .collect();
        self.stats.chain_criterion += before - self.pairs.len();
        self.pairs.extend(kept);

        for g in 0..hi {
            if self.active[g] && hm.divides(self.lm(g)) {
                self.active[g] = false;
            }
        }
    }

    fn active_polys(&self) -> Vec<&Poly> {
        self.polys
            .iter()
            .zip(&self.active)
            .filter_map(|(p, a)| a.then_some(p))
            .collect()
    }

    /// Removes and returns every pair of minimal lcm degree, in a fixed order.
    fn take_batch(&mut self) -> Vec<Pair> {
        let order = self.polys[0].ring().order();
        let dmin = self.pairs.iter().map(|p| p.lcm.degree()).min().expect("nonempty");
        let (mut batch, rest): (Vec<Pair>, Vec<Pair>) =
            std::mem::take(&mut self.pairs).into_iter().partition(|p| p.lcm.degree() == dmin);
        self.pairs = rest;
        batch.sort_by(|a, b| match order.cmp(&a.lcm, &b.lcm) {
            Ordering::Equal => (a.i, a.j).cmp(&(b.i, b.j)),
            o => o,
        });
        batch
    }
}

/// Reduced Groebner basis of the ideal generated by `gens`, using the ring's
/// monomial order.
pub fn groebner_basis(gens: &[Poly]) -> Vec<Poly> {
    groebner_basis_with(gens, Exec::default()).0
}

/// As [`groebner_basis`], choosing how S-polynomial reductions are scheduled.
/// The result does not depend on `exec`.
pub fn groebner_basis_with(gens: &[Poly], exec: Exec) -> (Vec<Poly>, GroebnerStats) {
    let gens: Vec<Poly> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
    let Some(first) = gens.first() else {
        return (Vec::new(), GroebnerStats::default());
    };
    for g in &gens {
        first.check_ring(g).expect("generators share one ring");
    }
    let mut st = State {
        polys: Vec::new(),
        active: Vec::new(),
        pairs: Vec::new(),
        stats: GroebnerStats::default(),
    };
    for g in gens {
        let h = reduce(&g, &st.active_polys());
        if !h.is_zero() {
            st.insert(h.monic());
        }
    }

    while !st.pairs.is_empty() {
        let batch = st.take_batch();
        let divisors = st.active_polys();
        let polys = &st.polys;
        let reduced: Vec<Poly> = exec.map(&batch, |p| {
            reduce(&s_polynomial(&polys[p.i], &polys[p.j]), &divisors)
        });
        st.stats.reductions += reduced.len();
        for r in reduced {
            if r.is_zero() {
                st.stats.zero_reductions += 1;
                continue;
            }
            // Earlier members of this batch may have enlarged the basis.
            let h = reduce(&r, &st.active_polys());
            if h.is_zero() {
                st.stats.zero_reductions += 1;
            } else {
                st.insert(h.monic());
            }
        }
    }

    let basis: Vec<Poly> = st.active_polys().into_iter().cloned().collect();
    (interreduce(&basis), st.stats)
}

/// Minimalizes and fully inter-reduces a Groebner basis, returning monic
/// elements sorted by descending leading monomial.
pub fn interreduce(basis: &[Poly]) -> Vec<Poly> {
    let mut gs: Vec<Poly> = basis.iter().filter(|g| !g.is_zero()).map(Poly::monic).collect();
    let Some(first) = gs.first() else {
        return gs;
    };
    let order = first.ring().order();
    gs.sort_by(|a, b| order.cmp(a.lead_monomial().unwrap(), b.lead_monomial().unwrap()));
    // Ascending by leading monomial: a later element is redundant when an
    // earlier one divides its leading monomial.
    let mut minimal: Vec<Poly> = Vec::new();
    for g in gs {
        let lm = g.lead_monomial().unwrap();
        if !minimal.iter().any(|m| m.lead_monomial().unwrap().divides(lm)) {
            minimal.push(g);
        }
    }
    let mut out: Vec<Poly> = (0..minimal.len())
        .map(|k| {
            let others: Vec<&Poly> = minimal
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, p)| p)
                .collect();
            reduce(&minimal[k], &others).monic()
        })
        .collect();
    out.sort_by(|a, b| order.cmp(b.lead_monomial().unwrap(), a.lead_monomial().unwrap()));
    out
}

/// True when every S-polynomial of `basis` reduces to zero.
pub fn is_groebner_basis(basis: &[Poly]) -> bool {
    let gs: Vec<&Poly> = basis.iter().filter(|g| !g.is_zero()).collect();
    (0..gs.len()).all(|i| {
        (i + 1..gs.len()).all(|j| reduce(&s_polynomial(gs[i], gs[j]), &gs).is_zero())
    })
}

/// Smallest `e` in `1..=max_power` with `q^e` in the ideal of the Groebner
/// basis `basis`, together with the normal form of `q` itself.
pub fn power_membership(q: &Poly, basis: &[Poly], max_power: u32) -> (Option<u32>, Poly) {
    let nf = normal_form(q, basis);
    if nf.is_zero() {
        return (Some(1), nf);
    }
    let mut acc = nf.clone();
    for e in 2..=max_power {
        acc = normal_form(&(&acc * q), basis);
        if acc.is_zero() {
            return (Some(e), nf);
        }
    }
    (None, nf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, MonomialOrder, PolyRing};
    use std::sync::Arc;

    fn ring() -> Arc<PolyRing> {
        PolyRing::with_vars(["x", "y", "z"], MonomialOrder::DegRevLex).unwrap()
    }

    fn p(s: &str) -> Poly {
        parse_poly(s, &ring()).unwrap()
    }

    #[test]
    fn hand_example() {
        let gb = groebner_basis(&[p("x^2 - y"), p("y")]);
        assert_eq!(gb, vec![p("x^2"), p("y")]);
    }

    #[test]
    fn single_generator_made_monic() {
        assert_eq!(groebner_basis(&[p("3*x*y - 6")]), vec![p("x*y - 2")]);
    }

    #[test]
    fn empty_input() {
        assert!(groebner_basis(&[]).is_empty());
        assert!(groebner_basis(&[p("0")]).is_empty());
    }

    #[test]
    fn unit_ideal() {
        assert_eq!(groebner_basis(&[p("x*y - 1"), p("x")]), vec![p("1")]);
    }

    #[test]
    fn twisted_cubic() {
        let gens = [p("y - x^2"), p("z - x^3")];
        let gb = groebner_basis(&gens);
        assert!(is_groebner_basis(&gb));
        for g in &gens {
            assert!(normal_form(g, &gb).is_zero());
        }
        assert!(normal_form(&p("x*z - y^2"), &gb).is_zero());
        assert!(!normal_form(&p("x - y"), &gb).is_zero());
        assert_eq!(groebner_basis(&gb), gb);
        let (seq, _) = groebner_basis_with(&gens, Exec::Sequential);
        let (par, _) = groebner_basis_with(&gens, Exec::Parallel);
        assert_eq!(seq, par);
    }

    #[test]
    fn radical_but_not_literal_membership() {
        let gb = groebner_basis(&[p("x^2")]);
        assert_eq!(power_membership(&p("x"), &gb, 3).0, Some(2));
        assert_eq!(power_membership(&p("y"), &gb, 3).0, None);
    }
}
