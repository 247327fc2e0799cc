use std::collections::BTreeSet;

use num_traits::Signed;

use super::Poly;

/// Sign knowledge about symbolic parameters.
///
/// A polynomial is certified positive when every coefficient is positive and
/// every variable it mentions is a declared positive atom. Case hypotheses
/// add polynomials that are nonzero on the current branch only.
#[derive(Clone, Debug, Default)]
pub struct PositivityContext {
    atoms: BTreeSet<String>,
    nonzero: Vec<Poly>,
}

impl PositivityContext {
    pub fn with_atoms<I, S>(atoms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            atoms: atoms.into_iter().map(Into::into).collect(),
            nonzero: Vec::new(),
        }
    }

    pub fn atoms(&self) -> impl Iterator<Item = &str> {
        self.atoms.iter().map(String::as_str)
    }

    pub fn is_atom(&self, name: &str) -> bool {
        self.atoms.contains(name)
    }

    /// Declares `p != 0` for the current branch.
    pub fn assume_nonzero(&mut self, p: Poly) {
        if !self.nonzero.contains(&p) {
            self.nonzero.push(p);
        }
    }

    pub fn hypotheses(&self) -> &[Poly] {
        &self.nonzero
    }

    pub fn is_positive(&self, p: &Poly) -> bool {
        if p.is_zero() {
            return false;
        }
        let reg = p.ring().registry();
        p.terms().iter().all(|(_, c)| c.is_positive())
            && p.support_vars().iter().all(|&i| self.atoms.contains(reg.name(i)))
    }

    pub fn is_certified_nonzero(&self, p: &Poly) -> bool {
        if self.is_positive(p) || self.is_positive(&-p) {
            return true;
        }
        let prim = p.primitive_part();
        if self.nonzero.iter().any(|h| h.primitive_part() == prim) {
            return true;
        }
        // Products of hypotheses and positive polynomials.
        if self.nonzero.is_empty() {
            return false;
        }
        let (rest, mult) = super::strip_factors(p, &self.nonzero);
        mult.iter().any(|&m| m > 0) && (self.is_positive(&rest) || self.is_positive(&-&rest))
    }
}
