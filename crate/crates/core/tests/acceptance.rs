//! Acceptance criteria 1-9. Each criterion prints one `PASS`/`FAIL` line;
//! expected values come from the small oracles below, not from the library.

use std::time::{Duration, Instant};

use mls_core::construct::psu::{mls_psu3, Psu3Parts, Psu3Variant};
use mls_core::construct::{mls_solvable, VerificationMode};
use mls_core::geometry::{self, HermitianSpace};
use mls_core::logsig::{self, LogSignature, Verification};
use mls_core::matgrp::cosets::sharply_transitive;
use mls_core::matgrp::{unitary, GroupHandle};
use mls_core::matrix::Matrix;
use mls_core::refute::{self, Verdict};

fn ipow(b: i128, e: u32) -> i128 {
    (0..e).fold(1, |acc, _| acc * b)
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `(qⁿ - (-1)ⁿ)(q^{n-1} - (-1)^{n-1}) / (q² - 1)`.
fn isotropic_oracle(n: u32, q: i128) -> i128 {
    let s = |k: u32| if k % 2 == 0 { 1 } else { -1 };
    (ipow(q, n) - s(n)) * (ipow(q, n - 1) - s(n - 1)) / (q * q - 1)
}

fn psu3_oracle(q: u128) -> u128 {
    q.pow(3) * (q.pow(3) + 1) * (q * q - 1) / gcd(3, q + 1)
}

/// `Σ p·e` over `n = Π p^e`, by trial division.
fn mls_bound_oracle(mut n: u128) -> u128 {
    let mut total = 0;
    let mut p = 2;
    while p * p <= n {
        while n % p == 0 {
            total += p;
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        total += n;
    }
    total
}

struct Report {
    lines: Vec<String>,
    failures: Vec<String>,
}

impl Report {
    fn line(&mut self, id: &str, ok: bool, elapsed: Duration, budget: Duration, detail: String) {
        let pass = ok && elapsed <= budget;
        let line = format!(
            "criterion {id}: {} ({:.2}s, budget {}s) {detail}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        println!("{line}");
        self.lines.push(line);
        if !pass {
            self.failures.push(id.to_string());
        }
    }
}

fn full_verify(ls: &LogSignature) -> bool {
    logsig::ls_verify(ls).unwrap() == Verification::Valid
}

fn round_trips(ls: &LogSignature) -> bool {
    let text = ls.serialize();
    let parsed = logsig::ls_parse(&text, ls.group()).unwrap();
    let loaded = logsig::ls_load(&text).unwrap();
    parsed.serialize() == text && loaded.serialize() == text
}

fn criterion_1(r: &mut Report) {
    let t = Instant::now();
    let mut ok = true;
    let mut seen = Vec::new();
    for (n, q) in [(3usize, 2u64), (3, 3), (3, 4), (3, 5), (4, 2), (4, 3)] {
        let count = geometry::isotropic_points(&HermitianSpace::standard(n, q).unwrap()).unwrap().len() as i128;
        let expect = isotropic_oracle(n as u32, q as i128);
        ok &= count == expect;
        if n == 3 {
            ok &= count == ipow(q as i128, 3) + 1;
        }
        seen.push(format!("({n},{q})={count}"));
    }
    r.line("1", ok, t.elapsed(), Duration::from_secs(10), seen.join(" "));
}

fn criterion_2(r: &mut Report) {
    let t = Instant::now();
    let mut ok = true;
    let mut seen = Vec::new();
    for q in 2..=5u64 {
        let g = unitary::psu(3, q).unwrap();
        let table = g.group.table(1 << 21).unwrap().len() as u128;
        let expect = psu3_oracle(q as u128);
        ok &= g.order() == expect && table == expect;
        seen.push(format!("q={q}:{}/{table}", g.order()));
    }
    ok &= seen.join(" ") == "q=2:72/72 q=3:6048/6048 q=4:62400/62400 q=5:126000/126000";
    r.line("2", ok, t.elapsed(), Duration::from_secs(120), seen.join(" "));
}

fn criterion_3(r: &mut Report) -> Option<LogSignature> {
    let t = Instant::now();
    let c = mls_psu3(4, Psu3Variant::EvenQp1Prime, 1 << 21).unwrap();
    let ls = c.ls.clone().unwrap();
    let valid = full_verify(&ls);
    let ok = c.certificate.all_passed()
        && c.certificate.reps == Some(5)
        && c.certificate.mode == VerificationMode::Full
        && ls.group().order() == 62400
        && ls.length() == 38
        && mls_bound_oracle(62400) == 38
        && valid;
    r.line("3", ok, t.elapsed(), Duration::from_secs(300), format!("reps={:?} length={} type={:?}", c.certificate.reps, ls.length(), ls.type_vector()));
    Some(ls)
}

fn criterion_4(r: &mut Report) -> Option<LogSignature> {
    let t = Instant::now();
    let c = mls_psu3(3, Psu3Variant::OddQ2q1Prime, 1 << 21).unwrap();
    let ls = c.ls.clone().unwrap();
    let valid = full_verify(&ls);
    let ok = c.certificate.all_passed()
        && c.certificate.reps == Some(7)
        && ls.group().order() == 6048
        && ls.length() == 26
        && mls_bound_oracle(6048) == 26
        && valid;
    let rebalanced = c.certificate.notes.iter().any(|n| n.starts_with("K' ="));
    r.line(
        "4",
        ok,
        t.elapsed(),
        Duration::from_secs(30),
        format!("reps={:?} length={} rebalanced_pair={rebalanced}", c.certificate.reps, ls.length()),
    );
    Some(ls)
}

fn criterion_5(r: &mut Report) -> Vec<LogSignature> {
    let t = Instant::now();
    let mut out = Vec::new();
    let mut ok = true;
    let mut seen = Vec::new();
    for (q, order, length) in [(4u64, 960u128, 20usize), (3, 216, 15)] {
        let g: GroupHandle = Psu3Parts::new(q).unwrap().point_stabilizer().unwrap();
        let ls = mls_solvable(&g, 1 << 21).unwrap();
        ok &= g.order() == order && ls.length() == length && mls_bound_oracle(order) == length as u128 && full_verify(&ls);
        seen.push(format!("|G|={} length={}", g.order(), ls.length()));
        out.push(ls);
    }
    r.line("5", ok, t.elapsed(), Duration::from_secs(5), seen.join(", "));
    out
}

fn criterion_6(r: &mut Report) {
    let t = Instant::now();
    let mut ok = true;
    let v = |rep: &refute::AuditReport, k: &str| rep.value(k).unwrap().to_string();
    for (q, implied, a3) in [(2u64, "7", "3"), (4, "273/5", "13")] {
        let q3 = ipow(q as i128, 3);
        let r1 = refute::audit_trace_of_one(3, q).unwrap();
        let r3 = refute::audit_isotropic_count(3, q).unwrap();
        let r4 = refute::audit_torus_orders(3, q).unwrap();
        let r5 = refute::audit_product_cardinality(3, q).unwrap();
        ok &= r1.verdict == Verdict::ConfirmsGap && v(&r1, "f(1,1)") != "0";
        ok &= r3.verdict == Verdict::ConfirmsGap && v(&r3, "implied") == implied && v(&r3, "true") == (q3 + 1).to_string();
        ok &= r4.verdict == Verdict::ConfirmsGap && v(&r4, "|A3|") == a3 && v(&r4, "|A3|_claimed") == (q3 + 1).to_string();
        ok &= r5.verdict == Verdict::ConfirmsGap;
        ok &= (q3 + 1) / (q as i128 + 1) == a3.parse::<i128>().unwrap();
    }
    r.line("6", ok, t.elapsed(), Duration::from_secs(5), "R1,R3,R4,R5 at (3,2),(3,4)".into());
}

/// Members, cover and sharp transitivity of `⟨X^{qⁿ-1}⟩`; the orbit length
/// of `W₀` is reported for the analysis of failures.
fn spread_case(n: usize, q: u64) -> (bool, bool, usize, bool) {
    let cs = geometry::classical_spread(n, q).unwrap();
    let report = geometry::spread_validate(&cs.spread, None);
    let qn = (q as u128).pow(n as u32);
    let x = cs.singer_matrix();
    let step = x.pow(qn - 1);
    let mut a = Vec::new();
    let mut cur = Matrix::identity(&cs.field_q, 2 * n);
    for _ in 0..=qn {
        a.push(cur.clone());
        cur = cur.mul(&step);
    }
    let structure = report.all_ok() && report.members as u128 == qn + 1;
    let sharp = sharply_transitive(&a, &cs.spread.members, cs.base_member(), |m, s| s.apply(m));
    let w0 = cs.base_member();
    let mut orbit: Vec<&geometry::Subspace> = Vec::new();
    for m in &a {
        let img = w0.apply(m);
        if let Some(w) = cs.spread.members.iter().find(|w| **w == img) {
            if !orbit.contains(&w) {
                orbit.push(w);
            }
        }
    }
    let minus_one = x.pow(((q as u128).pow(2 * n as u32) - 1) / 2);
    let neg = cs.field_q.neg(cs.field_q.one());
    let has_minus_one = q % 2 == 1 && minus_one == Matrix::scalar(&cs.field_q, 2 * n, neg) && a.contains(&minus_one);
    (structure, sharp, orbit.len(), has_minus_one)
}

fn criterion_7(r: &mut Report) {
    let t = Instant::now();
    let mut ok = true;
    let mut seen = Vec::new();
    for (n, q) in [(2usize, 2u64), (3, 2), (2, 3)] {
        let (structure, sharp, orbit, minus_one) = spread_case(n, q);
        ok &= structure && sharp;
        seen.push(format!("({n},{q}):structure={structure} sharp={sharp} W0-orbit={orbit} -I∈A={minus_one}"));
        if (n, q) == (2, 3) {
            // A has order 10, contains -I, so W₀ has an orbit of 5 among 10 members
            assert!(structure && !sharp && orbit == 5 && minus_one, "{}", seen.last().unwrap());
        } else {
            assert!(structure && sharp && !minus_one);
        }
    }
    r.line("7", ok, t.elapsed(), Duration::from_secs(30), seen.join(" "));
}

fn criterion_8(r: &mut Report) {
    let t = Instant::now();
    let mut ok = true;
    let c = mls_psu3(9, Psu3Variant::OddQ12p, 1 << 21).unwrap();
    ok &= c.certificate.all_passed() && c.certificate.mode == VerificationMode::Component;
    let parts = Psu3Parts::new(9).unwrap();
    ok &= parts.g.order() == psu3_oracle(9) && parts.g.degree() == 730;
    let singer = parts.singer().unwrap();
    let orbits = singer.group.orbits();
    ok &= orbits.len() == 10 && orbits.iter().all(|o| o.len() == 73);
    let lens = parts.g.group.chain().orbit_lengths();
    let two_transitive = lens[0] == 730 && lens[1] == 729;
    ok &= two_transitive;
    let r6_2 = refute::audit_psu4_decomposition(2, 1 << 21).unwrap();
    let r6_3 = refute::audit_psu4_decomposition(3, 1 << 21).unwrap();
    ok &= r6_2.verdict == Verdict::ConfirmsGap && r6_3.verdict == Verdict::ConfirmsGap;
    r.line(
        "8",
        ok,
        t.elapsed(),
        Duration::from_secs(120),
        format!("PSU3(9) component checks={} singer_orbits={} chain={lens:?} R6(2)={} R6(3)={}", c.certificate.checks.len(), orbits.len(), r6_2.verdict, r6_3.verdict),
    );
    // beyond the criterion: the same recipe verified product by product
    let t = Instant::now();
    let full = mls_psu3(9, Psu3Variant::OddQ12p, 1 << 27).unwrap();
    let fok = full.certificate.all_passed() && full.certificate.mode == VerificationMode::Full;
    let length = full.ls.as_ref().map(|l| l.length()).unwrap_or(0);
    println!(
        "info 8+: PSU3(9) exhaustive verification {} ({:.2}s) length={length} bound={}",
        if fok { "PASS" } else { "FAIL" },
        t.elapsed().as_secs_f64(),
        mls_bound_oracle(psu3_oracle(9))
    );
    assert!(fok && length as u128 == mls_bound_oracle(psu3_oracle(9)));
}

fn criterion_9(r: &mut Report, produced: &[LogSignature]) {
    let t = Instant::now();
    let ok = !produced.is_empty() && produced.iter().all(round_trips);
    r.line("9", ok, t.elapsed(), Duration::from_secs(30), format!("{} files", produced.len()));
}

fn main() {
    let mut r = Report { lines: Vec::new(), failures: Vec::new() };
    criterion_1(&mut r);
    criterion_2(&mut r);
    let mut produced = Vec::new();
    produced.extend(criterion_3(&mut r));
    produced.extend(criterion_4(&mut r));
    produced.extend(criterion_5(&mut r));
    criterion_6(&mut r);
    criterion_7(&mut r);
    criterion_8(&mut r);
    criterion_9(&mut r, &produced);
    println!("summary: {} of {} criteria pass", r.lines.len() - r.failures.len(), r.lines.len());
    // criterion 7 fails at (2,3) for a structural reason checked above
    if r.failures != ["7"] {
        eprintln!("unexpected failures: {:?}", r.failures);
        std::process::exit(1);
    }
}
