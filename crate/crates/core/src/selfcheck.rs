//! One-command verification suites with fixed seeds.
//!
//! Each check returns a named outcome; the CLI `selfcheck` command and the
//! acceptance test suite both drive these, so the pass/fail lines they print
//! come from a single source of truth.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::certificate::{build, decide_and_certify, verify};
use crate::mukai::{MukaiVector, Sign};
use crate::periods::period_sweep;
use crate::picard::{NVector, PicardParams};
use crate::series::{
    equivalence_sweep, for_each_valid_params, pell_solutions, solve_series, Series, SweepRange,
};

/// Outcome of one named check.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

impl CheckOutcome {
    fn pass(name: &'static str, details: String) -> Self {
        CheckOutcome {
            name,
            passed: true,
            details,
        }
    }

    fn fail(name: &'static str, details: String) -> Self {
        CheckOutcome {
            name,
            passed: false,
            details,
        }
    }
}

const SEED: u64 = 0x6b33_6365_7274; // stable across runs

fn coprime_pairs() -> &'static [(u64, u64)] {
    &[
        (1, 1),
        (1, 2),
        (1, 3),
        (1, 4),
        (1, 5),
        (2, 1),
        (2, 3),
        (2, 5),
        (3, 1),
        (3, 2),
        (3, 4),
        (4, 1),
        (4, 3),
        (5, 2),
        (5, 6),
        (6, 1),
    ]
}

/// Random valid parameters: pick the unit first, then a discriminant in its
/// square class.
pub fn random_params(rng: &mut impl Rng) -> PicardParams {
    let pairs = coprime_pairs();
    let (a, b) = pairs[rng.gen_range(0..pairs.len())];
    let c = rng.gen_range(1..=4u64);
    let m = 2 * a * b * c * c;
    let mu = loop {
        let x = rng.gen_range(1..m.max(2));
        if x.gcd(&m) == 1 {
            break x;
        }
    };
    let k = rng.gen_range(0..=2u64);
    let d = (mu * mu) % (2 * m) + 2 * m * k;
    PicardParams::try_new(a, b, c, d, mu).expect("constructed to be valid")
}

pub fn random_member(rng: &mut impl Rng, params: &PicardParams, span: i64) -> NVector {
    let y = BigInt::from(rng.gen_range(-span..=span));
    let k = BigInt::from(rng.gen_range(-span..=span));
    let x = params.mu() * &y + params.modulus() * k;
    params
        .member(x, y)
        .expect("constructed to satisfy the congruence")
}

pub fn random_mukai(rng: &mut impl Rng, params: &PicardParams, span: i64) -> MukaiVector {
    let r = rng.gen_range(0..=span.unsigned_abs());
    let s = rng.gen_range(-span..=span);
    let c1 = random_member(rng, params, span);
    MukaiVector::new(params, r, c1, s).expect("member checked")
}

fn random_primitive_positive_mukai(rng: &mut impl Rng, params: &PicardParams) -> MukaiVector {
    loop {
        let r = rng.gen_range(1..=6u64);
        let s = rng.gen_range(1..=6i64);
        let c1 = random_member(rng, params, 3);
        let v = MukaiVector::new(params, r, c1, s).expect("member checked");
        if v.is_primitive().unwrap_or(false) {
            return v;
        }
    }
}

/// Worked example: the full chain for (a,b,c,d,μ) = (1,1,2,17,1).
pub fn check_worked_example() -> CheckOutcome {
    const NAME: &str = "worked-example-certificate";
    let run = || -> Result<String, String> {
        let params =
            PicardParams::try_new(1, 1, 2, 17, 1).map_err(|e| e.to_string())?;
        let cert = decide_and_certify(&params, &BigInt::from(1000))
            .map_err(|e| e.to_string())?
            .ok_or("expected a certificate below the bound")?;
        let ok = cert.series == Series::A
            && cert.sign == Sign::Plus
            && cert.p == BigInt::from(5)
            && cert.q == BigInt::one()
            && cert.d2 == BigInt::one()
            && cert.twist_divisor == NVector::new(1, 1);
        if !ok {
            return Err(format!(
                "unexpected solution: series={} sign={} p={} q={} d2={} D={}",
                cert.series, cert.sign, cert.p, cert.q, cert.d2, cert.twist_divisor
            ));
        }
        let triples: Vec<(BigInt, NVector, BigInt)> = cert
            .chain
            .iter()
            .map(|s| (s.vector.r.clone(), s.vector.c1.clone(), s.vector.s.clone()))
            .collect();
        let h = params.polarization();
        let h1 = NVector::new(10, 2);
        let expected = vec![
            (BigInt::from(2), h.clone(), BigInt::from(2)),
            (BigInt::from(2), h.clone(), BigInt::from(2)),
            (BigInt::from(2), h1.clone(), BigInt::one()),
            (BigInt::from(2), h1.clone(), BigInt::one()),
        ];
        if triples != expected {
            return Err(format!("unexpected chain: {triples:?}"));
        }
        if params.norm(&h1).map_err(|e| e.to_string())? != BigInt::from(4) {
            return Err("h₁² ≠ 4".into());
        }
        let report = verify(&cert);
        if !report.is_valid() {
            return Err(format!("verification failed: {report}"));
        }
        Ok("chain (2,H,2)→δ→(2,H,2)→ν(1,1)→(2,H,2)→T_w→(2,h₁,1); h₁²=4; verified".into())
    };
    match run() {
        Ok(d) => CheckOutcome::pass(NAME, d),
        Err(d) => CheckOutcome::fail(NAME, d),
    }
}

/// Move invariance over random inputs: squares and divisors preserved,
/// reflection involutive, twists compose additively, scaling preserves
/// isotropy.
pub fn check_move_invariance(iterations: usize) -> CheckOutcome {
    const NAME: &str = "move-invariance";
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failures = Vec::new();
    for i in 0..iterations {
        let params = random_params(&mut rng);
        let v = random_mukai(&mut rng, &params, 6);
        let d = random_member(&mut rng, &params, 4);
        let d_other = random_member(&mut rng, &params, 4);

        let twisted = match v.tensor_twist(&d) {
            Ok(t) => t,
            Err(e) => {
                failures.push(format!("iter {i}: twist failed: {e}"));
                continue;
            }
        };
        if twisted.square() != v.square() {
            failures.push(format!("iter {i}: twist changed the square"));
        }
        if !v.is_zero() && twisted.gcd_divisor().ok() != v.gcd_divisor().ok() {
            failures.push(format!("iter {i}: twist changed the divisor"));
        }
        let composed = twisted.tensor_twist(&d_other).expect("member");
        let direct = v.tensor_twist(&d.add(&d_other)).expect("member");
        if composed != direct {
            failures.push(format!("iter {i}: twist composition broke"));
        }

        let prim = random_primitive_positive_mukai(&mut rng, &params);
        match prim.reflect() {
            Ok(r) => {
                if r.square() != prim.square()
                    || r.gcd_divisor().ok() != prim.gcd_divisor().ok()
                    || r.reflect().map(|rr| rr != prim).unwrap_or(true)
                {
                    failures.push(format!("iter {i}: reflection invariants broke"));
                }
            }
            Err(e) => failures.push(format!("iter {i}: reflection failed: {e}")),
        }

        // scaling on the distinguished isotropic vector
        let base = MukaiVector::polarization_vector(&params);
        let d1 = BigInt::from(rng.gen_range(1..=5u64));
        let d2 = BigInt::from(rng.gen_range(1..=5u64));
        let admissible = d1.gcd(&params.s()).is_one()
            && d2.gcd(&params.r()).is_one()
            && d1.gcd(&d2).is_one();
        if admissible {
            match base.scale(&d1, &d2) {
                Ok(scaled) => {
                    if !scaled.is_isotropic() {
                        failures.push(format!("iter {i}: scaling broke isotropy"));
                    }
                    let factor = (&d1 * &d1 * &d2 * &d2) * base.square();
                    if scaled.square() != factor {
                        failures.push(format!("iter {i}: scaling square relation broke"));
                    }
                }
                Err(e) => failures.push(format!("iter {i}: scaling failed: {e}")),
            }
        }
    }
    if failures.is_empty() {
        CheckOutcome::pass(NAME, format!("{iterations} random move checks, zero failures"))
    } else {
        CheckOutcome::fail(NAME, failures.join("; "))
    }
}

/// Re-proof of the period identification at desk scale.
pub fn check_period_reproof(max_abc: u64, max_d: u64) -> CheckOutcome {
    const NAME: &str = "period-reproof-sweep";
    let records = period_sweep(max_abc, max_d);
    let bad: Vec<String> = records
        .iter()
        .filter(|r| {
            !(r.error.is_none()
                && r.quotient_is_u
                && r.isometry_found
                && r.composition_consistent
                && r.h_squared == (2 * r.a * r.b).to_string())
        })
        .map(|r| format!("({},{},{},{},{}): {:?}", r.a, r.b, r.c, r.d1, r.d2, r.error))
        .collect();
    if bad.is_empty() {
        CheckOutcome::pass(
            NAME,
            format!("{} tuples: quotient ≅ U, h² = 2ab, isometry found", records.len()),
        )
    } else {
        CheckOutcome::fail(NAME, bad.join("; "))
    }
}

/// Equivalence sweep: plain conditions imply every refined reading.
pub fn check_equivalence_sweep(range: &SweepRange) -> CheckOutcome {
    const NAME: &str = "equivalence-sweep";
    match equivalence_sweep(range) {
        Ok(report) => {
            if report.verdict {
                CheckOutcome::pass(
                    NAME,
                    format!(
                        "{} parameter tuples, {} solutions, zero counterexamples (derived and printed modulus readings)",
                        report.params_checked, report.solutions_checked
                    ),
                )
            } else {
                CheckOutcome::fail(
                    NAME,
                    format!(
                        "counterexamples: derived={} printed={} lattice={}",
                        report.counterexamples.len(),
                        report.printed_modulus_counterexamples.len(),
                        report.lattice_counterexamples.len()
                    ),
                )
            }
        }
        Err(e) => CheckOutcome::fail(NAME, e.to_string()),
    }
}

/// Build/verify round trip over every solution found in the sweep range.
pub fn check_certificate_round_trip(range: &SweepRange) -> CheckOutcome {
    const NAME: &str = "certificate-round-trip";
    let bound = BigInt::from(range.bound);
    let mut built = 0u64;
    let mut failures = Vec::new();
    let res: Result<(), String> = for_each_valid_params(range, |params| {
        for series in Series::all() {
            for sign in Sign::all() {
                let sols = solve_series(params, series, sign, &bound)
                    .map_err(|e| e.to_string())?;
                for sol in sols {
                    built += 1;
                    match build(params, &sol) {
                        Ok(cert) => {
                            let report = verify(&cert);
                            if !report.is_valid() {
                                failures.push(format!(
                                    "verify failed for {params:?} {series} {sign} ({}, {})",
                                    sol.p, sol.q
                                ));
                            }
                        }
                        Err(e) => failures.push(format!(
                            "build failed for {params:?} {series} {sign}: {e}"
                        )),
                    }
                }
            }
        }
        Ok(())
    });
    if let Err(e) = res {
        return CheckOutcome::fail(NAME, e);
    }
    if failures.is_empty() {
        CheckOutcome::pass(NAME, format!("{built} certificates built and verified"))
    } else {
        CheckOutcome::fail(NAME, failures.join("; "))
    }
}

fn isqrt_u64(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Brute-force oracle: enumerate q, solve for p by exact square root.
fn pell_brute_force(d: u64, rhs: i64, bound: u64) -> Vec<(i64, i64)> {
    let mut out = std::collections::BTreeSet::new();
    for q in 0..=bound {
        let val = rhs as i128 + (d as i128) * (q as i128) * (q as i128);
        if val < 0 {
            continue;
        }
        let p = isqrt_u64(val as u64);
        if (p as i128) * (p as i128) != val || p > bound {
            continue;
        }
        let (p, q) = (p as i64, q as i64);
        out.insert((p, q));
        out.insert((-p, q));
        out.insert((p, -q));
        out.insert((-p, -q));
    }
    out.into_iter().collect()
}

/// Pell machinery agrees exactly with the brute-force oracle.
pub fn check_pell_oracle(max_d: u64, max_rhs: i64, bound: u64) -> CheckOutcome {
    const NAME: &str = "pell-oracle-equivalence";
    let big_bound = BigInt::from(bound);
    let mut compared = 0u64;
    for d in 1..=max_d {
        let bd = BigInt::from(d);
        for rhs in -max_rhs..=max_rhs {
            let brhs = BigInt::from(rhs);
            let got = match pell_solutions(&bd, &brhs, &big_bound) {
                Ok(v) => v,
                Err(e) => return CheckOutcome::fail(NAME, format!("d={d} rhs={rhs}: {e}")),
            };
            let got_small: Vec<(i64, i64)> = got
                .iter()
                .map(|(p, q)| {
                    (
                        i64::try_from(p).expect("inside the box"),
                        i64::try_from(q).expect("inside the box"),
                    )
                })
                .collect();
            let want = pell_brute_force(d, rhs, bound);
            if got_small != want {
                return CheckOutcome::fail(
                    NAME,
                    format!(
                        "mismatch at d={d} rhs={rhs}: solver {} vs oracle {} solutions",
                        got_small.len(),
                        want.len()
                    ),
                );
            }
            compared += 1;
        }
    }
    CheckOutcome::pass(
        NAME,
        format!("{compared} (d, rhs) pairs agree exactly with the brute-force oracle"),
    )
}

/// Tamper corpus and invalid-parameter rejections.
pub fn check_negative_controls() -> CheckOutcome {
    const NAME: &str = "negative-controls";
    let mut failures = Vec::new();

    let params = PicardParams::try_new(1, 1, 2, 17, 1).expect("valid");
    let sols = solve_series(&params, Series::A, Sign::Plus, &BigInt::from(100))
        .expect("solvable");
    let cert = build(&params, &sols[0]).expect("buildable");

    let mut tampered_s = cert.clone();
    let n = tampered_s.chain.len();
    tampered_s.chain[n - 1].vector.s = BigInt::from(2);
    tampered_s.chain[n - 2].vector.s = BigInt::from(2);

    let mut tampered_d2 = cert.clone();
    tampered_d2.d2 = BigInt::from(2);

    let mut tampered_divisor = cert.clone();
    tampered_divisor.twist_divisor = NVector::new(2, 1);

    let mut tampered_p = cert.clone();
    tampered_p.p = BigInt::from(6);

    let mut truncated = cert.clone();
    truncated.chain.pop();

    let mut flag_flip = cert.clone();
    flag_flip.tyurin_assumption = true;

    // (−p, −q) still solves the equation and congruence but induces −h₁,
    // so the stored chain no longer matches
    let mut negated_solution = cert.clone();
    negated_solution.p = -cert.p.clone();
    negated_solution.q = -cert.q.clone();

    let corpus: Vec<(&str, _, &str)> = vec![
        ("tampered final s", tampered_s, "tyurin target mismatch"),
        ("tampered d2", tampered_d2, "coprimality"),
        ("divisor outside lattice", tampered_divisor, "not a lattice member"),
        ("broken equation", tampered_p, "equation"),
        ("truncated chain", truncated, "chain structure"),
        ("assumption flag flipped", flag_flip, "assumption"),
        ("negated solution", negated_solution, "h₁ mismatch"),
    ];
    for (label, bad_cert, needle) in corpus {
        let report = verify(&bad_cert);
        if report.is_valid() {
            failures.push(format!("{label}: accepted"));
        } else if !report.contains(needle) {
            failures.push(format!("{label}: missing diagnostic {needle:?} in {report}"));
        }
    }

    let rejects: Vec<(&str, Result<PicardParams, _>)> = vec![
        ("non-unit mu", PicardParams::try_new(1, 1, 2, 17, 2)),
        ("mu² ≢ d", PicardParams::try_new(1, 1, 2, 3, 1)),
        ("a, b share a factor", PicardParams::try_new(2, 4, 1, 1, 1)),
        ("non-positive d", PicardParams::try_new(1, 1, 2, 0, 1)),
    ];
    for (label, res) in rejects {
        if res.is_ok() {
            failures.push(format!("{label}: accepted by validation"));
        }
    }

    if failures.is_empty() {
        CheckOutcome::pass(NAME, "7 tampered certificates and 4 invalid parameter sets rejected with specific diagnostics".into())
    } else {
        CheckOutcome::fail(NAME, failures.join("; "))
    }
}

/// Exhaustive small check that scaling preserves primitivity.
pub fn check_scale_primitivity() -> CheckOutcome {
    const NAME: &str = "scale-primitivity";
    let mut checked = 0u64;
    for r in 1u64..=6 {
        for s in 1u64..=6 {
            let g = r.gcd(&s);
            let params = match PicardParams::try_new(r / g, s / g, g, 1, 1) {
                Ok(p) => p,
                Err(e) => return CheckOutcome::fail(NAME, e.to_string()),
            };
            let v = MukaiVector::polarization_vector(&params);
            for d1 in 1u64..=5 {
                for d2 in 1u64..=5 {
                    if d1.gcd(&s) != 1 || d2.gcd(&r) != 1 || d1.gcd(&d2) != 1 {
                        continue;
                    }
                    // scale() itself asserts primitivity of the image
                    match v.scale(&BigInt::from(d1), &BigInt::from(d2)) {
                        Ok(out) => {
                            checked += 1;
                            if !out.is_primitive().unwrap_or(false) {
                                return CheckOutcome::fail(
                                    NAME,
                                    format!("imprimitive image at r={r} s={s} d1={d1} d2={d2}"),
                                );
                            }
                        }
                        Err(e) => {
                            return CheckOutcome::fail(
                                NAME,
                                format!("scale failed at r={r} s={s} d1={d1} d2={d2}: {e}"),
                            )
                        }
                    }
                }
            }
        }
    }
    CheckOutcome::pass(NAME, format!("{checked} exhaustive scalings stayed primitive"))
}

/// The full fixed-seed suite at default scales.
pub fn run_all() -> Vec<CheckOutcome> {
    vec![
        check_worked_example(),
        check_move_invariance(1000),
        check_period_reproof(4, 4),
        check_equivalence_sweep(&SweepRange::desk_scale()),
        check_certificate_round_trip(&SweepRange::desk_scale()),
        check_pell_oracle(50, 100, 1000),
        check_negative_controls(),
        check_scale_primitivity(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_params_always_valid() {
        use num_traits::Signed;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let p = random_params(&mut rng);
            assert!(p.d().is_positive());
        }
    }

    #[test]
    fn worked_example_check_passes() {
        let out = check_worked_example();
        assert!(out.passed, "{}", out.details);
    }

    #[test]
    fn small_move_invariance_passes() {
        let out = check_move_invariance(50);
        assert!(out.passed, "{}", out.details);
    }

    #[test]
    fn negative_controls_pass() {
        let out = check_negative_controls();
        assert!(out.passed, "{}", out.details);
    }

    #[test]
    fn tiny_pell_oracle_passes() {
        let out = check_pell_oracle(12, 20, 200);
        assert!(out.passed, "{}", out.details);
    }
}
