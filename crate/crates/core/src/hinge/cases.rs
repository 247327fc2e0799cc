//! Case analysis over the parameter ideal generated by S.
//!
//! Each node carries the hypothesis defining its branch, the substitutions
//! it applies, the reduced basis of the substituted ideal and the claimed
//! products it verifies. A claim q is accepted when some power q^e (e <= 3)
//! has normal form zero, so q vanishes wherever the generators do. Factors
//! of q that are certified nonzero on the branch are then discarded; what
//! remains decides the next step.

use serde::{Deserialize, Serialize};

use super::{HingeError, HingeProblem, FOUR_BODY_PARAMS};
use crate::algebra::{
    divide_exact, groebner_basis_with, parse_poly, power_membership, Poly, PositivityContext,
};
use crate::exec::Exec;

/// Largest power tried when testing radical membership.
pub const MAX_POWER: u32 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub poly: String,
    /// Normal form of `poly` itself modulo the node basis.
    pub normal_form: String,
    /// Smallest e with poly^e in the ideal, if any e <= 3 works.
    pub power: Option<u32>,
    /// Basis elements divisible by `poly` (by index), for information.
    pub divides_basis: Vec<usize>,
    /// Factors not certified nonzero on this branch.
    pub remaining_factors: Vec<String>,
    pub conclusion: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Leaf {
    /// x is a root of `witness`, a polynomial nonzero in x on this branch.
    XConstrained { witness: String, reason: String },
    /// The branch hypotheses contradict positivity.
    ExcludedParameters { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseNode {
    pub hypothesis: String,
    pub substitutions: Vec<String>,
    pub basis: Vec<String>,
    pub memberships: Vec<Membership>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<CaseNode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaf: Option<Leaf>,
}

impl CaseNode {
    pub fn new(hypothesis: impl Into<String>) -> Self {
        Self {
            hypothesis: hypothesis.into(),
            substitutions: Vec::new(),
            basis: Vec::new(),
            memberships: Vec::new(),
            children: Vec::new(),
            leaf: None,
        }
    }

    pub fn leaves(&self) -> Vec<&Leaf> {
        match &self.leaf {
            Some(l) => vec![l],
            None => self.children.iter().flat_map(|c| c.leaves()).collect(),
        }
    }

    /// Every path ends in a leaf.
    pub fn is_closed(&self) -> bool {
        match &self.leaf {
            Some(_) => self.children.is_empty(),
            None => !self.children.is_empty() && self.children.iter().all(CaseNode::is_closed),
        }
    }

    pub fn memberships_all(&self) -> Vec<&Membership> {
        let mut out: Vec<&Membership> = self.memberships.iter().collect();
        for c in &self.children {
            out.extend(c.memberships_all());
        }
        out
    }

    pub fn sort_children(&mut self) {
        self.children.sort_by(|a, b| a.hypothesis.cmp(&b.hypothesis));
        for c in &mut self.children {
            c.sort_children();
        }
    }
}

struct Branch<'a> {
    hp: &'a HingeProblem,
    ctx: PositivityContext,
    basis: Vec<Poly>,
    exec: Exec,
    failures: Vec<String>,
}

impl Branch<'_> {
    fn p(&self, s: &str) -> Poly {
        parse_poly(s, &self.hp.param_ring).expect("internal expression")
    }

    /// Verifies that the product of `factors` vanishes on the branch and
    /// returns the factors that are not certified nonzero.
    fn claim(&mut self, factors: &[&str]) -> (Membership, Vec<Poly>) {
        let fs: Vec<Poly> = factors.iter().map(|f| self.p(f)).collect();
        let q = fs.iter().fold(Poly::one(&self.hp.param_ring), |acc, f| &acc * f);
        let (power, nf) = power_membership(&q, &self.basis, MAX_POWER);
        let divides_basis = self
            .basis
            .iter()
            .enumerate()
            .filter(|(_, b)| matches!(divide_exact(b, &q), Ok(Some(_))))
            .map(|(i, _)| i)
            .collect();
        let mut remaining: Vec<Poly> = Vec::new();
        for f in fs {
            if !self.ctx.is_certified_nonzero(&f)
                && !remaining.iter().any(|r| r.primitive_part() == f.primitive_part())
            {
                remaining.push(f);
            }
        }
        let conclusion = match (power, remaining.as_slice()) {
            (None, _) => {
                self.failures.push(format!("{q} does not vanish on the ideal (normal form {nf})"));
                "FAILED: not in the radical".to_string()
            }
            (Some(_), []) => "every factor is nonzero: contradiction".to_string(),
            (Some(_), [f]) => format!("{f} = 0"),
            (Some(_), many) => {
                let s: Vec<String> = many.iter().map(|f| format!("({f})")).collect();
                format!("{} = 0", s.join("*"))
            }
        };
        let m = Membership {
            poly: q.to_string(),
            normal_form: nf.to_string(),
            power,
            divides_basis,
            remaining_factors: remaining.iter().map(Poly::to_string).collect(),
            conclusion,
        };
        (m, remaining)
    }

    /// Applies `var -> value` to the basis and recomputes the reduced basis.
    fn substitute(&mut self, var: &str, value: &Poly) -> Result<String, HingeError> {
        let i = self.hp.param_ring.index(var)?;
        let subs = [(i, value.clone())];
        let images: Vec<Poly> = self
            .basis
            .iter()
            .map(|b| b.substitute(&subs))
            .collect::<Result<_, _>>()?;
        self.basis = groebner_basis_with(&images, self.exec).0;
        Ok(format!("{var} -> {value}"))
    }

    fn node(&self, hypothesis: impl Into<String>, substitutions: Vec<String>) -> CaseNode {
        let mut n = CaseNode::new(hypothesis);
        n.substitutions = substitutions;
        n.basis = self.basis.iter().map(Poly::to_string).collect();
        n
    }
}

/// Canonical rank of a parameter, independent of the order convention.
fn rank(name: &str) -> usize {
    FOUR_BODY_PARAMS
        .iter()
        .position(|p| *p == name)
        .unwrap_or(usize::MAX)
}

/// Reads off a substitution forced by `f = 0` over positive reals:
/// `v^e - 1` gives v = 1, `v^e - w^e` gives the earlier of v, w equal to
/// the later, and a factor linear in some variable with constant
/// coefficient is solved for it.
fn forced_substitution(f: &Poly) -> Option<(String, Poly)> {
    let ring = f.ring();
    let names = ring.registry().names();
    let f = f.primitive_part();
    let terms = f.terms();
    if terms.len() == 2 {
        let (m0, c0) = &terms[0];
        let (m1, c1) = &terms[1];
        let single = |m: &crate::algebra::Monomial| {
            let vs: Vec<usize> = (0..names.len()).filter(|&i| m.exponent(i) > 0).collect();
            (vs.len() == 1).then(|| (vs[0], m.exponent(vs[0])))
        };
        let opposite = c0 == &-c1.clone();
        if let (Some((v, e)), true) = (single(m0), opposite) {
            if m1.is_one() && e % 2 == 1 {
                return Some((names[v].clone(), Poly::one(ring)));
            }
            if let Some((w, e2)) = single(m1) {
                if e == e2 && e % 2 == 1 {
                    let (a, b) = if rank(&names[v]) < rank(&names[w]) { (v, w) } else { (w, v) };
                    return Some((names[a].clone(), Poly::var(ring, &names[b]).ok()?));
                }
            }
        }
    }
    let mut candidates: Vec<usize> = (0..names.len()).filter(|&i| f.degree_in(i) == 1).collect();
    candidates.sort_by_key(|&i| std::cmp::Reverse(rank(&names[i])));
    for v in candidates {
        let coeffs = f.coefficients_in(v);
        let lead = coeffs.get(&1)?;
        if let Some(c) = lead.constant_value() {
            let rest = coeffs.get(&0).cloned().unwrap_or_else(|| Poly::zero(ring));
            let value = rest.scale(&(-c.recip()));
            return Some((names[v].clone(), value));
        }
    }
    None
}

/// Outcome of the Groebner stage.
pub struct Analysis {
    pub root: CaseNode,
    pub failures: Vec<String>,
}

/// Runs the case tree below "every polynomial of S vanishes".
///
/// `all_k_one` is the constraint on x derived separately for k_ij = 1.
pub fn groebner_case_analysis(
    hp: &HingeProblem,
    s: &[Poly],
    all_k_one: &Poly,
    exec: Exec,
) -> Result<Analysis, HingeError> {
    let basis = groebner_basis_with(s, exec).0;
    let mut root_branch = Branch {
        hp,
        ctx: PositivityContext::with_atoms(hp.param_ring.registry().names().iter().cloned()),
        basis,
        exec,
        failures: Vec::new(),
    };
    let mut root = root_branch.node("every p^i_e in S vanishes", Vec::new());
    let (m1, r1) = root_branch.claim(&["m2", "m1 + m2", "k24^3 - 1", "k14^3 - k24^3"]);
    let (m2, r2) = root_branch.claim(&["m2", "m1 + m2", "k24^3 - 1", "k13^3 - k23^3"]);
    root.memberships = vec![m1, m2];
    let mut failures = std::mem::take(&mut root_branch.failures);
    let k24 = root_branch.p("k24^3 - 1");
    if !(r1.contains(&k24) && r2.contains(&k24)) {
        failures.push("root products lost the common factor k24^3 - 1".into());
        return Ok(Analysis { root, failures });
    }

    let branch_a = || -> Result<(CaseNode, Vec<String>), HingeError> {
        let mut b = Branch {
            hp,
            ctx: root_branch.ctx.clone(),
            basis: root_branch.basis.clone(),
            exec,
            failures: Vec::new(),
        };
        let chain = [
            vec!["(m1 + m2)", "m3", "k23^3 - 1"],
            vec!["m1", "k14^3 - 1"],
            vec!["m3", "k13^3 - 1"],
        ];
        let mut sub = b.substitute("k24", &b.p("1"))?;
        let mut hyp = "k24^3 - 1 = 0".to_string();
        let mut nodes = Vec::new();
        for claim in chain {
            let mut node = b.node(hyp.clone(), vec![sub.clone()]);
            let (m, rest) = b.claim(&claim);
            node.memberships.push(m);
            nodes.push(node);
            let [f] = rest.as_slice() else {
                b.failures.push(format!("unexpected remaining factors after {claim:?}"));
                break;
            };
            let Some((var, value)) = forced_substitution(f) else {
                b.failures.push(format!("no substitution forced by {f}"));
                break;
            };
            hyp = format!("{f} = 0");
            sub = b.substitute(&var, &value)?;
        }
        let mut last = b.node(hyp, vec![sub]);
        last.leaf = Some(Leaf::XConstrained {
            witness: all_k_one.to_string(),
            reason: "every k_ij = 1; the rho13-only rows agree only on this polynomial".into(),
        });
        nodes.push(last);
        Ok((chain_nodes(nodes), b.failures))
    };

    let branch_b = || -> Result<(CaseNode, Vec<String>), HingeError> {
        let mut ctx = root_branch.ctx.clone();
        ctx.assume_nonzero(k24.clone());
        let mut b = Branch {
            hp,
            ctx,
            basis: root_branch.basis.clone(),
            exec,
            failures: Vec::new(),
        };
        let mut nodes = Vec::new();
        // With k24^3 != 1 the root products force k13^3 = k23^3.
        let first = r2.iter().find(|f| **f != k24).cloned().expect("second factor");
        let (var, value) = forced_substitution(&first)
            .ok_or_else(|| HingeError::Invariant(format!("cannot solve {first}")))?;
        let mut sub = b.substitute(&var, &value)?;
        let mut hyp = "k24^3 - 1 != 0".to_string();
        let chain = [
            vec!["k24^3 - k14^3"],
            vec!["(m1 + m2)^2", "1 + m1 + m2 + m3", "k24^3", "(k24^3 - 1)^2", "m3 - k24^3 + 1"],
            vec!["m1 + m2", "k23^3", "k24^3 - 1"],
        ];
        for claim in chain {
            let mut node = b.node(hyp.clone(), vec![sub.clone()]);
            let (m, rest) = b.claim(&claim);
            node.memberships.push(m);
            nodes.push(node);
            match rest.as_slice() {
                [] => {
                    nodes.last_mut().expect("node").leaf = Some(Leaf::ExcludedParameters {
                        reason: "the last product has only factors certified nonzero".into(),
                    });
                    return Ok((chain_nodes(nodes), b.failures));
                }
                [f] => {
                    let Some((var, value)) = forced_substitution(f) else {
                        b.failures.push(format!("no substitution forced by {f}"));
                        break;
                    };
                    hyp = format!("{f} = 0");
                    sub = b.substitute(&var, &value)?;
                }
                _ => {
                    b.failures.push(format!("unexpected remaining factors after {claim:?}"));
                    break;
                }
            }
        }
        b.failures.push("branch k24^3 != 1 did not close".into());
        Ok((chain_nodes(nodes), b.failures))
    };

    let (a, b) = exec.join(branch_a, branch_b);
    let (a, fa) = a?;
    let (b, fb) = b?;
    failures.extend(fa);
    failures.extend(fb);
    root.children = vec![a, b];
    root.sort_children();
    Ok(Analysis { root, failures })
}

/// Links a linear chain of nodes, each the single child of the previous.
fn chain_nodes(mut nodes: Vec<CaseNode>) -> CaseNode {
    let mut tail = nodes.pop().expect("nonempty chain");
    while let Some(mut parent) = nodes.pop() {
        parent.children = vec![tail];
        tail = parent;
    }
    tail
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hinge::OrderConvention;

    #[test]
    fn forced_substitutions() {
        let hp = HingeProblem::four_body(OrderConvention::K13Largest);
        let p = |s: &str| parse_poly(s, &hp.param_ring).unwrap();
        let (v, val) = forced_substitution(&p("k24^3 - 1")).unwrap();
        assert_eq!((v.as_str(), val), ("k24", p("1")));
        let (v, val) = forced_substitution(&p("k23^3 - k13^3")).unwrap();
        assert_eq!((v.as_str(), val), ("k13", p("k23")));
        let (v, val) = forced_substitution(&p("m3 - k24^3 + 1")).unwrap();
        assert_eq!((v.as_str(), val), ("m3", p("k24^3 - 1")));
        assert!(forced_substitution(&p("k13^2 - k14^2 + m1^2")).is_none());
    }
}
