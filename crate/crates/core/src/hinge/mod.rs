//! Hinged motions: all mutual distances but one constant.
//!
//! A hinged motion forces every fixed g_ij and its derivatives to vanish.
//! The second derivatives are linear in the rotational coordinates rho and
//! in the single free g, which gives an overdetermined linear system whose
//! solvability pins the free distance to finitely many values.

mod cases;
mod certificate;
mod four;
mod system;
mod three;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, MonomialOrder, Poly, PolyRing, PositivityContext};
use crate::dynamics::pairs;

pub use cases::{groebner_case_analysis, Analysis, CaseNode, Leaf, Membership, MAX_POWER};
pub use certificate::{
    all_k_one_roots, certify, certify_with, replay, replay_with, Certificate, CoefficientEntry,
    FPoly, ReplayReport, Verdict,
};
pub use four::{
    all_k_one_minors, four_body_eliminate, special_case_all_k_one, AllKOne, Elimination,
    S_SELECTION,
};
pub use system::{gddot_system, LinearSystem};
pub use three::three_body_determinant;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HingeError {
    #[error("unsupported n = {0} (only 3 and 4)")]
    UnsupportedN(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("pipeline invariant violated: {0}")]
    Invariant(String),
}

/// Which end of `k13, k14, k23, k24, m1, m2, m3` is the largest variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderConvention {
    #[default]
    K13Largest,
    K13Smallest,
}

impl OrderConvention {
    pub fn name(self) -> &'static str {
        match self {
            OrderConvention::K13Largest => "k13-largest",
            OrderConvention::K13Smallest => "k13-smallest",
        }
    }
}

impl fmt::Display for OrderConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OrderConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "k13-largest" => Ok(Self::K13Largest),
            "k13-smallest" => Ok(Self::K13Smallest),
            _ => Err(format!("unknown order convention `{s}`")),
        }
    }
}

/// Parameter variables for n = 4, largest first under `k13-largest`.
pub const FOUR_BODY_PARAMS: [&str; 7] = ["k13", "k14", "k23", "k24", "m1", "m2", "m3"];
pub const THREE_BODY_VARS: [&str; 6] = ["r12", "r13", "m1", "m2", "m3", "x"];

#[derive(Debug, Clone)]
pub struct HingeProblem {
    pub n: usize,
    /// Parameters plus the free variable `x`, which is always last.
    pub ring: Arc<PolyRing>,
    /// Parameters only; the Groebner computations live here.
    pub param_ring: Arc<PolyRing>,
    pub convention: OrderConvention,
    pub free: (usize, usize),
}

impl HingeProblem {
    pub fn new(n: usize, convention: OrderConvention) -> Result<Self, HingeError> {
        let (mut params, free): (Vec<&str>, _) = match n {
            3 => (THREE_BODY_VARS[..5].to_vec(), (1, 2)),
            4 => (FOUR_BODY_PARAMS.to_vec(), (2, 3)),
            other => return Err(HingeError::UnsupportedN(other)),
        };
        if n == 4 && convention == OrderConvention::K13Smallest {
            params.reverse();
        }
        let param_ring = PolyRing::with_vars(params.iter().copied(), MonomialOrder::DegRevLex)?;
        let ring = PolyRing::with_vars(
            params.iter().copied().chain(std::iter::once("x")),
            MonomialOrder::DegRevLex,
        )?;
        Ok(Self {
            n,
            ring,
            param_ring,
            convention,
            free,
        })
    }

    pub fn three_body() -> Self {
        Self::new(3, OrderConvention::default()).expect("n = 3 is supported")
    }

    pub fn four_body(convention: OrderConvention) -> Self {
        Self::new(4, convention).expect("n = 4 is supported")
    }

    /// Pairs with constant distance, in lexicographic order.
    pub fn fixed_pairs(&self) -> Vec<(usize, usize)> {
        pairs(self.n)
            .into_iter()
            .filter(|&p| p != self.free)
            .collect()
    }

    pub fn var(&self, name: &str) -> Poly {
        Poly::var(&self.ring, name).expect("registered variable")
    }

    pub fn x_index(&self) -> usize {
        self.ring.nvars() - 1
    }

    /// Every parameter and `x` is a positive real.
    pub fn positivity(&self) -> PositivityContext {
        PositivityContext::with_atoms(self.ring.registry().names().iter().cloned())
    }

    pub fn parse(&self, s: &str) -> Poly {
        crate::algebra::parse_poly(s, &self.ring).expect("well-formed internal expression")
    }

    pub fn problem_description(&self) -> String {
        match self.n {
            3 => "n = 3; r12, r13 constant; x = r23 varies".into(),
            _ => "n = 4; r12 = k12 = 1, m4 = 1; k_ij = 1/r_ij constant for ij != 34; x = 1/r34 varies".into(),
        }
    }
}
