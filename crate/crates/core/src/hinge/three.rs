//! n = 3 with r12, r13 fixed and x = r23 free.
//!
//! The unknowns are (rho12, g23) and g23 != 0 on a hinged motion, so the
//! 2 x 2 determinant of the g''12, g''13 rows must vanish.

use super::{HingeError, HingeProblem, LinearSystem};
use crate::algebra::{strip_positive_factors, Poly};

/// Determinant of the cleared 2 x 2 system with positive monomial factors
/// and integer content removed. Returns the stripped polynomial and the raw
/// determinant.
pub fn three_body_determinant(
    hp: &HingeProblem,
    sys: &LinearSystem,
) -> Result<(Poly, Poly), HingeError> {
    if hp.n != 3 || sys.rows() != 2 || sys.unknowns.len() != 2 {
        return Err(HingeError::Invariant("expected the 2 x 2 three-body system".into()));
    }
    let c = &sys.cleared;
    let raw = &(&c[0][0] * &c[1][1]) - &(&c[0][1] * &c[1][0]);
    if raw.is_zero() {
        return Err(HingeError::Invariant("determinant vanishes identically".into()));
    }
    let ctx = hp.positivity();
    let catalog: Vec<Poly> = hp
        .ring
        .registry()
        .names()
        .iter()
        .map(|v| hp.var(v))
        .collect();
    let stripped = strip_positive_factors(&raw, &ctx, &catalog)?.primitive_part();
    Ok((stripped, raw))
}
