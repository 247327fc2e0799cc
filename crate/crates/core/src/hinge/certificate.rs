//! End-to-end certification and its JSON record.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::cases::{groebner_case_analysis, CaseNode, Leaf};
use super::four::{four_body_eliminate, special_case_all_k_one, S_SELECTION};
use super::system::gddot_system;
use super::three::three_body_determinant;
use super::{HingeError, HingeProblem, OrderConvention};
use crate::algebra::{sturm_roots, Poly, Rational, UniPoly};
use crate::exec::Exec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Unhinged,
    Failure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FPoly {
    pub label: String,
    pub poly: String,
    pub x_support: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub f_index: usize,
    pub x_power: u32,
    pub poly: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub n: usize,
    pub problem: String,
    pub variable_order: Vec<String>,
    pub monomial_order: String,
    pub order_convention: OrderConvention,
    pub systems: Vec<String>,
    pub f_polys: Vec<FPoly>,
    pub coefficients: Vec<CoefficientEntry>,
    /// Labels `p^i_e` of the coefficients generating the Groebner stage.
    pub groebner_generators: Vec<String>,
    pub case_tree: CaseNode,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

pub fn certify(n: usize, convention: OrderConvention) -> Result<Certificate, HingeError> {
    certify_with(n, convention, Exec::default())
}

/// Runs the pipeline. Only an unsupported `n` is an error; any other
/// failure is reported as a FAILURE certificate.
pub fn certify_with(n: usize, convention: OrderConvention, exec: Exec) -> Result<Certificate, HingeError> {
    let hp = HingeProblem::new(n, convention)?;
    let mut cert = Certificate {
        n,
        problem: hp.problem_description(),
        variable_order: hp.ring.registry().names().to_vec(),
        monomial_order: hp.ring.order().name().to_string(),
        order_convention: convention,
        systems: Vec::new(),
        f_polys: Vec::new(),
        coefficients: Vec::new(),
        groebner_generators: Vec::new(),
        case_tree: CaseNode::new("all parameters and x positive"),
        verdict: Verdict::Failure,
        failures: Vec::new(),
        notes: common_notes(n),
    };
    let run = match n {
        3 => run_three(&hp, &mut cert),
        _ => run_four(&hp, &mut cert, exec),
    };
    if let Err(e) = run {
        cert.failures.push(format!("pipeline error: {e}"));
    }
    for problem in check_tree(&hp, &cert.case_tree) {
        cert.failures.push(problem);
    }
    cert.verdict = if cert.failures.is_empty() {
        Verdict::Unhinged
    } else {
        Verdict::Failure
    };
    Ok(cert)
}

fn common_notes(n: usize) -> Vec<String> {
    let mut notes = vec![
        "Each g'' row is multiplied by the least monomial clearing every reciprocal; the multiplier is part of the row string.".to_string(),
        "Groebner bases are reduced (monic, interreduced), degrevlex on the listed parameter order.".to_string(),
    ];
    if n == 4 {
        notes.extend([
            "Rows are (1/2) g''_ij in the order 12, 13, 14, 23, 24.".to_string(),
            "The statement 'g''13 = g''23 == 0' is read with a single '='.".to_string(),
            "rho13 and rho23 are eliminated with the rows g''14 and g''24, whose pivots are m3 (x^3 - k13^3) and m3 (x^3 - k23^3); the rows g''12, g''13, g''23 give i = 1, 2, 3.".to_string(),
            "The (2,2) entry is derived as m2 (1 - k23^3) + k14^3 - x^3. A printed variant with m1 in place of m2 disagrees with the bracket formula and with the 1 <-> 2 relabeling of the (3,3) entry.".to_string(),
            "Memberships are radical: 'power' is the least e <= 3 with poly^e reducing to 0. The conclusion only needs vanishing on the variety, which radical membership gives.".to_string(),
            "With every k_ij = 1 the two rho13-only rows force x^3 = 4. The value 5x^3 = 2 quoted elsewhere for this case does not follow from these rows and is not used.".to_string(),
            "Each p^i_e is stripped of parameter factors and integer content; its zero set on the positive orthant is unchanged.".to_string(),
        ]);
    }
    notes
}

fn run_three(hp: &HingeProblem, cert: &mut Certificate) -> Result<(), HingeError> {
    let sys = gddot_system(hp)?;
    cert.systems = sys.row_strings();
    let (det, _) = three_body_determinant(hp, &sys)?;
    let xi = hp.x_index();
    let by_power = det.coefficients_in(xi);
    cert.f_polys.push(FPoly {
        label: "det".into(),
        poly: det.to_string(),
        x_support: by_power.keys().copied().collect(),
    });
    for (e, p) in &by_power {
        cert.coefficients.push(CoefficientEntry {
            f_index: 1,
            x_power: *e,
            poly: p.to_string(),
        });
    }
    cert.case_tree.leaf = Some(Leaf::XConstrained {
        witness: det.to_string(),
        reason: "the determinant of the (rho12, g23) system vanishes; its leading coefficient in x is a nonzero constant".into(),
    });
    Ok(())
}

fn run_four(hp: &HingeProblem, cert: &mut Certificate, exec: Exec) -> Result<(), HingeError> {
    let sys = gddot_system(hp)?;
    cert.systems = sys.row_strings();

    let mut pivot = CaseNode::new("(k13^3 - x^3)*(k23^3 - x^3) = 0");
    pivot.leaf = Some(Leaf::XConstrained {
        witness: hp.parse("(k13^3 - x^3)*(k23^3 - x^3)").to_string(),
        reason: "x is k13 or k23".into(),
    });

    let elim = four_body_eliminate(hp, &sys)?;
    for (i, (f, sup)) in elim.f.iter().zip(&elim.x_support).enumerate() {
        cert.f_polys.push(FPoly {
            label: format!("f_{}", i + 1),
            poly: f.to_string(),
            x_support: sup.clone(),
        });
    }
    for (i, e, p) in &elim.coefficients {
        cert.coefficients.push(CoefficientEntry {
            f_index: *i,
            x_power: *e,
            poly: p.to_string(),
        });
    }
    cert.groebner_generators = S_SELECTION.iter().map(|(i, e)| format!("p^{i}_{e}")).collect();

    let mut nonzero = CaseNode::new("x^3 != k13^3, x^3 != k23^3, some p^i_e in S nonzero");
    nonzero.leaf = Some(Leaf::XConstrained {
        witness: "f_1, f_2, f_3".into(),
        reason: "the f_i with a nonzero p^i_e is a nonzero polynomial in x".into(),
    });

    let s = elim.selected()?;
    let special = special_case_all_k_one(hp, &sys)?;
    let analysis = groebner_case_analysis(hp, &s, &special.constraint, exec)?;
    cert.failures.extend(analysis.failures);
    let mut gb = analysis.root;
    gb.hypothesis = format!("x^3 != k13^3, x^3 != k23^3, {}", gb.hypothesis);

    let mut top = CaseNode::new("all parameters and x positive");
    top.children = vec![pivot, nonzero, gb];
    top.sort_children();
    cert.case_tree = top;
    Ok(())
}

/// Checks every leaf: explicit witnesses must have a nonzero constant
/// leading coefficient in x, so they pin x to finitely many values.
fn check_tree(hp: &HingeProblem, node: &CaseNode) -> Vec<String> {
    let mut out = Vec::new();
    if !node.is_closed() {
        out.push(format!("case '{}' is not closed", node.hypothesis));
    }
    for c in &node.children {
        out.extend(check_tree(hp, c));
    }
    if let Some(Leaf::XConstrained { witness, .. }) = &node.leaf {
        if witness.starts_with("f_") {
            return out;
        }
        match crate::algebra::parse_poly(witness, &hp.ring) {
            Ok(w) => {
                let xi = hp.x_index();
                let lead = w.coefficients_in(xi).into_iter().next_back();
                match lead {
                    Some((e, c)) if e > 0 && c.is_constant() && !c.is_zero() => {}
                    _ => out.push(format!("witness {witness} does not bound x")),
                }
            }
            Err(e) => out.push(format!("witness {witness}: {e}")),
        }
    }
    out
}

/// Positive roots of the all-k-one constraint, counted exactly.
pub fn all_k_one_roots(constraint: &Poly) -> Result<crate::algebra::RootReport, HingeError> {
    let u = UniPoly::from_poly(constraint)?;
    let hi = u.cauchy_bound();
    let width = Rational::new(1.into(), 1_000_000.into());
    Ok(sturm_roots(&u, &Rational::zero(), &(hi + Rational::one()), &width)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayReport {
    pub identical: bool,
    /// JSON pointers of the first differing values.
    pub differences: Vec<String>,
}

/// Re-runs the pipeline from the stored inputs and compares every field.
pub fn replay(cert: &Certificate) -> Result<ReplayReport, HingeError> {
    replay_with(cert, Exec::default())
}

pub fn replay_with(cert: &Certificate, exec: Exec) -> Result<ReplayReport, HingeError> {
    let fresh = certify_with(cert.n, cert.order_convention, exec)?;
    let a = serde_json::to_value(cert).expect("serializes");
    let b = serde_json::to_value(&fresh).expect("serializes");
    let mut differences = Vec::new();
    diff("", &a, &b, &mut differences);
    Ok(ReplayReport {
        identical: differences.is_empty(),
        differences,
    })
}

fn diff(path: &str, a: &serde_json::Value, b: &serde_json::Value, out: &mut Vec<String>) {
    use serde_json::Value;
    if out.len() >= 20 {
        return;
    }
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            let keys: std::collections::BTreeSet<&String> = x.keys().chain(y.keys()).collect();
            for k in keys {
                let p = format!("{path}/{k}");
                match (x.get(k), y.get(k)) {
                    (Some(u), Some(v)) => diff(&p, u, v, out),
                    _ => out.push(p),
                }
            }
        }
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            for (i, (u, v)) in x.iter().zip(y).enumerate() {
                diff(&format!("{path}/{i}"), u, v, out);
            }
        }
        _ if a == b => {}
        _ => out.push(if path.is_empty() { "/".into() } else { path.into() }),
    }
}
