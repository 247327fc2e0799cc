//! Acceptance criteria P1-P9. Runs as a plain binary (no libtest harness) so
//! every criterion prints exactly one PASS/FAIL line; exits nonzero if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hinge_core::algebra::{normal_form, groebner_basis_with, RatFunc, Rational};
use hinge_core::dynamics::presets::{isosceles_balanced, preset, random_expanding_state, Preset, DEFAULT_SEED};
use hinge_core::dynamics::integrate;
use hinge_core::hinge::{
    all_k_one_roots, certify, four_body_eliminate, gddot_system, replay, special_case_all_k_one,
    HingeProblem, LinearSystem, OrderConvention, Verdict,
};
use hinge_core::reduction::{balance_residual, reduce_check, reduced_rhs, standard_coordinates};
use hinge_core::Exec;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// `coef_poly * prod_i name_i^(-e_i)` in the problem ring.
fn term(hp: &HingeProblem, poly: &str, recips: &[(&str, u32)]) -> RatFunc {
    recips.iter().fold(RatFunc::from_poly(hp.parse(poly)), |acc, (v, e)| {
        acc.mul(&RatFunc::recip(&hp.var(v)).unwrap().pow(*e))
    })
}

fn sum(parts: &[RatFunc]) -> RatFunc {
    parts[1..].iter().fold(parts[0].clone(), |acc, p| acc.add(p))
}

/// Compares generated entries with printed ones; returns mismatch labels.
fn compare(sys: &LinearSystem, printed: &[(&str, &str, &str, RatFunc)]) -> Vec<String> {
    printed
        .iter()
        .filter_map(|(name, row, col, want)| {
            let r = sys.row(row).expect("row label");
            let c = sys.column(col).expect("column name");
            (!sys.entries[r][c].equals(want)).then(|| {
                let got = sys.entries[r][c].mul_poly(&sys.multipliers[r]);
                let exp = want.mul_poly(&sys.multipliers[r]);
                format!(
                    "{name}: generated {} vs printed {} (times {})",
                    got.numerator(),
                    exp.numerator(),
                    sys.multipliers[r]
                )
            })
        })
        .collect()
}

/// Collision-free draws: the first `count` seeds whose trajectory keeps every
/// pair at distance >= 0.5 on [0, t_end].
fn collision_free(n: usize, count: usize, t_end: f64) -> Vec<(u64, hinge_core::dynamics::BodyState)> {
    let mut out = Vec::new();
    let mut seed = 0;
    while out.len() < count {
        let s = random_expanding_state(n, 3, seed);
        if let Ok(t) = integrate(&s, t_end, 1e-10) {
            if t.samples.iter().all(|smp| smp.state.min_distance() >= 0.5) {
                out.push((seed, s));
            }
        }
        seed += 1;
        assert!(seed < 10_000, "too few collision-free draws for n = {n}");
    }
    out
}

fn p1() -> Outcome {
    let start = Instant::now();
    let mut states = collision_free(3, 10, 5.0);
    states.extend(collision_free(4, 10, 5.0));
    let results = Exec::default().map(&states, |(seed, s)| {
        (s.n(), *seed, reduce_check(s, 5.0, 1e-10, 2e-3).map(|c| c.max_residual))
    });
    let elapsed = start.elapsed();
    let mut worst: f64 = 0.0;
    let mut errors = Vec::new();
    for (n, seed, r) in &results {
        match r {
            Ok(v) => worst = worst.max(*v),
            Err(e) => errors.push(format!("n={n} seed={seed}: {e}")),
        }
    }
    let seeds: Vec<String> = results.iter().map(|(n, s, _)| format!("{n}:{s}")).collect();
    outcome(
        errors.is_empty() && worst <= 1e-6 && elapsed <= Duration::from_secs(30),
        format!(
            "20 states (n:seed {}), max residual {worst:.2e} (<= 1e-6), {:.1} s (<= 30 s){}",
            seeds.join(" "),
            elapsed.as_secs_f64(),
            if errors.is_empty() { String::new() } else { format!("; errors: {}", errors.join("; ")) }
        ),
    )
}

fn p2() -> Outcome {
    let run = preset(Preset::LagrangeEquilateral, DEFAULT_SEED);
    let traj = match integrate(&run.state, run.t_end, 1e-12) {
        Ok(t) => t,
        Err(e) => return outcome(false, e.to_string()),
    };
    let r0 = run.state.distances();
    let mut dev: f64 = 0.0;
    let mut rhs_max: f64 = 0.0;
    for smp in &traj.samples {
        for (r, q) in smp.state.distances().iter().zip(&r0) {
            dev = dev.max((r - q).abs());
        }
        let rhs = reduced_rhs(&standard_coordinates(&smp.state), &run.state.masses).unwrap();
        rhs_max = rhs_max.max(rhs.flat().iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }
    outcome(
        dev <= 1e-8 && rhs_max <= 1e-8,
        format!(
            "one period ({} samples): max |dr| {dev:.2e}, max |reduced rhs| {rhs_max:.2e} (both <= 1e-8)",
            traj.samples.len()
        ),
    )
}

fn p3() -> Outcome {
    let hp = HingeProblem::three_body();
    let sys = gddot_system(&hp).unwrap();
    let printed = [
        ("g12 rho12", "g12", "rho12", sum(&[term(&hp, "2*m3", &[("r13", 3)]), term(&hp, "-2*m3", &[("x", 3)])])),
        (
            "g12 g23",
            "g12",
            "g23",
            sum(&[
                term(&hp, "2*m3", &[("r13", 3)]),
                term(&hp, "3/2*m3*(r12^2 - r13^2)", &[("x", 5)]),
                term(&hp, "-1/2*m3", &[("x", 3)]),
            ]),
        ),
        ("g13 rho12", "g13", "rho12", sum(&[term(&hp, "2*m2", &[("x", 3)]), term(&hp, "-2*m2", &[("r12", 3)])])),
        (
            "g13 g23",
            "g13",
            "g23",
            sum(&[
                term(&hp, "2*m2", &[("r12", 3)]),
                term(&hp, "3/2*m2*(r13^2 - r12^2)", &[("x", 5)]),
                term(&hp, "-1/2*m2", &[("x", 3)]),
            ]),
        ),
    ];
    let bad = compare(&sys, &printed);
    outcome(
        bad.is_empty() && sys.rows() == 2,
        if bad.is_empty() {
            "2 rows, 4/4 printed coefficients match exactly".to_string()
        } else {
            format!("{} mismatches: {}", bad.len(), bad.join("; "))
        },
    )
}

fn p4() -> Outcome {
    let hp = HingeProblem::four_body(OrderConvention::K13Largest);
    let sys = gddot_system(&hp).unwrap();
    let p = |s: &str| term(&hp, s, &[]);
    // lead * (3x^5/4 (plus^-2 - minus^-2) + k^3 - x^3/4)
    let cubic = |k: &str, plus: &str, minus: &str, lead: &str| {
        sum(&[
            term(&hp, &format!("3/4*{lead}*x^5"), &[(plus, 2)]),
            term(&hp, &format!("-3/4*{lead}*x^5"), &[(minus, 2)]),
            p(&format!("{lead}*({k}^3 - 1/4*x^3)")),
        ])
    };
    let zero = || p("0");
    let printed = [
        ("A[1,1]", "g12", "rho12", p("m3*(k13^3 - k23^3) + k14^3 - k24^3")),
        ("A[1,2]", "g12", "rho13", p("m3*(k23^3 - k13^3)")),
        ("A[1,3]", "g12", "rho23", p("m3*(k13^3 - k23^3)")),
        ("A[1,4]", "g12", "g34", zero()),
        ("A[2,1]", "g13", "rho12", p("(k23^3 - 1)*m2")),
        ("A[2,2]", "g13", "rho13", p("m1*(1 - k23^3) + k14^3 - x^3")),
        ("A[2,3]", "g13", "rho23", p("(k23^3 - 1)*m2")),
        ("A[2,4]", "g13", "g34", cubic("k14", "k13", "k14", "1")),
        ("A[3,1]", "g14", "rho12", p("(k24^3 - 1)*m2")),
        ("A[3,2]", "g14", "rho13", p("m3*(x^3 - k13^3)")),
        ("A[3,3]", "g14", "rho23", zero()),
        ("A[3,4]", "g14", "g34", cubic("k13", "k14", "k13", "m3")),
        ("A[4,1]", "g23", "rho12", p("(1 - k13^3)*m1")),
        ("A[4,2]", "g23", "rho13", p("(k13^3 - 1)*m1")),
        ("A[4,3]", "g23", "rho23", p("m1*(1 - k13^3) + k24^3 - x^3")),
        ("A[4,4]", "g23", "g34", cubic("k24", "k23", "k24", "1")),
        ("A[5,1]", "g24", "rho12", p("(1 - k14^3)*m1")),
        ("A[5,2]", "g24", "rho13", zero()),
        ("A[5,3]", "g24", "rho23", p("m3*(x^3 - k23^3)")),
        ("A[5,4]", "g24", "g34", cubic("k23", "k24", "k23", "m3")),
    ];
    let bad = compare(&sys, &printed);
    outcome(
        bad.is_empty(),
        format!("{}/20 printed entries match; {}", 20 - bad.len(), if bad.is_empty() { "none differ".into() } else { bad.join("; ") }),
    )
}

fn p5() -> Outcome {
    let allowed = [0u32, 3, 5, 6, 8, 9];
    let mut lines = Vec::new();
    let mut pass = true;
    for conv in [OrderConvention::K13Largest, OrderConvention::K13Smallest] {
        let hp = HingeProblem::four_body(conv);
        let e = four_body_eliminate(&hp, &gddot_system(&hp).unwrap()).unwrap();
        let ok_support = e.x_support.iter().all(|s| s.iter().all(|d| allowed.contains(d)));
        pass &= ok_support && e.coefficients.len() == 18;
        lines.push(format!("{conv}: supports {:?}, {} coefficients", e.x_support, e.coefficients.len()));
    }
    outcome(pass, lines.join("; "))
}

fn p6() -> Outcome {
    let quoted = [
        "m2*(m1 + m2)*(k24^3 - 1)*(k14^3 - k24^3)",
        "m2*(m1 + m2)*(k24^3 - 1)*(k13^3 - k23^3)",
    ];
    let start = Instant::now();
    let mut per_conv = Vec::new();
    let mut any = false;
    for conv in [OrderConvention::K13Largest, OrderConvention::K13Smallest] {
        let hp = HingeProblem::four_body(conv);
        let e = four_body_eliminate(&hp, &gddot_system(&hp).unwrap()).unwrap();
        let (gb, _) = groebner_basis_with(&e.selected().unwrap(), Exec::default());
        let parse = |s: &str| hinge_core::algebra::parse_poly(s, &hp.param_ring).unwrap();
        let literal: Vec<bool> = quoted.iter().map(|q| normal_form(&parse(q), &gb).is_zero()).collect();
        let squared: Vec<bool> = quoted.iter().map(|q| normal_form(&parse(q).pow(2), &gb).is_zero()).collect();
        // Substitution steps, as recorded in the case tree.
        let cert = certify(4, conv).unwrap();
        let gb_node = cert.case_tree.children.iter().find(|n| !n.children.is_empty()).unwrap();
        let steps: Vec<_> = gb_node.children.iter().flat_map(|c| c.memberships_all()).collect();
        let non_literal: Vec<String> = steps
            .iter()
            .filter(|m| m.power != Some(1))
            .map(|m| format!("{} (power {:?})", m.poly, m.power))
            .collect();
        let ok = literal.iter().all(|&b| b) && non_literal.is_empty();
        any |= ok;
        per_conv.push(format!(
            "{conv}: NF(product)=0 {literal:?}, NF(product^2)=0 {squared:?}, {}/{} substitution steps literal{}",
            steps.len() - non_literal.len(),
            steps.len(),
            if non_literal.is_empty() { String::new() } else { format!(" [not literal: {}]", non_literal.join(", ")) }
        ));
    }
    let elapsed = start.elapsed();
    outcome(
        any && elapsed <= Duration::from_secs(600),
        format!("{}; {:.1} s (<= 600 s)", per_conv.join(" | "), elapsed.as_secs_f64()),
    )
}

fn p7() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for (n, conv) in [
        (3, OrderConvention::K13Largest),
        (4, OrderConvention::K13Largest),
        (4, OrderConvention::K13Smallest),
    ] {
        let c = certify(n, conv).unwrap();
        let closed = c.case_tree.is_closed();
        let rep = replay(&c).unwrap();
        pass &= c.verdict == Verdict::Unhinged && closed && rep.identical;
        lines.push(format!(
            "n={n} {conv}: {:?}, closed {closed}, replay identical {}",
            c.verdict, rep.identical
        ));
    }
    outcome(pass, lines.join("; "))
}

fn p8() -> Outcome {
    let hp = HingeProblem::four_body(OrderConvention::K13Largest);
    let sp = special_case_all_k_one(&hp, &gddot_system(&hp).unwrap()).unwrap();
    let want = hp.parse("x^3 - 4");
    let roots = all_k_one_roots(&sp.constraint).unwrap();
    let one = Rational::from_integer(1.into());
    let two = Rational::from_integer(2.into());
    let in_range = roots.intervals.iter().all(|(a, b)| *a >= one && *b <= two);
    outcome(
        sp.constraint == want && roots.count == 1 && in_range,
        format!(
            "constraint {}, {} positive root(s) in {:?}",
            sp.constraint,
            roots.count,
            roots.intervals.iter().map(|(a, b)| format!("({a}, {b}]")).collect::<Vec<_>>()
        ),
    )
}

/// Balance residual of the scalene triangle r = (1, 1.1, 1.3), m = (1, 2, 3),
/// frozen from the first run.
const SCALENE_BALANCE: f64 = 1.023277285089589e-1;

fn p9() -> Outcome {
    let (iso, _) = isosceles_balanced(1.0, 2.0, 1.0, 1.3);
    let b_iso: Vec<f64> = iso.distances().iter().map(|r| r * r).collect();
    let r_iso = balance_residual(&b_iso, &iso.masses).unwrap();
    let r_sc = balance_residual(&[1.0, 1.21, 1.69], &[1.0, 2.0, 3.0]).unwrap();
    let frozen = (r_sc - SCALENE_BALANCE).abs() <= 1e-12 * SCALENE_BALANCE.max(1.0);
    outcome(
        r_iso <= 1e-12 && r_sc > 1e-3 && frozen,
        format!("isosceles {r_iso:.2e} (<= 1e-12), scalene {r_sc:.15e} (> 1e-3, regression {SCALENE_BALANCE:e})"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("P1 reduction oracle", p1),
        ("P2 relative equilibrium rigidity", p2),
        ("P3 n=3 printed system", p3),
        ("P4 n=4 printed matrix", p4),
        ("P5 sparsity", p5),
        ("P6 literal ideal memberships", p6),
        ("P7 verdicts and replay", p7),
        ("P8 all-k-one constraint", p8),
        ("P9 balanced configurations", p9),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let t = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {name} ({:.1} s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
