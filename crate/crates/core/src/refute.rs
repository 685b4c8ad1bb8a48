//! Audits of the unitary spread construction: each claim is recomputed from
//! `(n, q)` and compared with what the construction would need.

use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

use crate::arith;
use crate::construct::psu::psu4_decomposition;
use crate::construct::ConstructError;
use crate::geometry::{self, GeometryError, HermitianSpace, Spread, Subspace, TraceForm};
use crate::gf::Elem;
use crate::matgrp::unitary::{self, SingerTarget};
use crate::matgrp::GroupError;
use crate::matrix::Matrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RefuteError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error("{0}")]
    BadParameters(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    ConfirmsGap,
    ContradictsGap,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::ConfirmsGap => "confirms_gap",
            Verdict::ContradictsGap => "contradicts_gap",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Int(i128),
    Rational(Ratio<i128>),
    Bool(bool),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Rational(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Value::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Value::Bool(b) => f.write_str(if *b { "yes" } else { "no" }),
            Value::Text(s) => f.write_str(s),
        }
    }
}

impl From<i128> for Value {
    fn from(v: i128) -> Value {
        Value::Int(v)
    }
}

impl From<u128> for Value {
    fn from(v: u128) -> Value {
        Value::Int(v as i128)
    }
}

impl From<Ratio<i128>> for Value {
    fn from(r: Ratio<i128>) -> Value {
        Value::Rational(r)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Value {
        Value::Bool(b)
    }
}

impl From<String> for Value {
    fn from(s: String) -> Value {
        Value::Text(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub claim_id: String,
    pub statement: String,
    pub values: Vec<(String, Value)>,
    pub verdict: Verdict,
}

impl AuditReport {
    fn new(id: &str, statement: &str) -> AuditReport {
        AuditReport { claim_id: id.into(), statement: statement.into(), values: Vec::new(), verdict: Verdict::Inconclusive }
    }

    fn put(&mut self, name: &str, v: impl Into<Value>) {
        self.values.push((name.into(), v.into()));
    }

    pub fn value(&self, name: &str) -> Option<&Value> {
        self.values.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

/// `R<k>: <verdict> | name=value ...`
impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} |", self.claim_id, self.verdict)?;
        for (n, v) in &self.values {
            write!(f, " {n}={v}")?;
        }
        Ok(())
    }
}

fn check_nq(n: usize, q: u64, odd: bool) -> Result<(u64, u32), RefuteError> {
    let pp = arith::prime_power(q).ok_or_else(|| RefuteError::BadParameters(format!("q = {q} is not a prime power")))?;
    if n == 0 || (odd && n % 2 == 0) {
        return Err(RefuteError::BadParameters(format!("n = {n} must be {}", if odd { "odd" } else { "positive" })));
    }
    Ok(pp)
}

fn rat(n: i128, d: i128) -> Ratio<i128> {
    Ratio::new(n, d)
}

/// `f(1, 1)` for the trace form on `GF(q^{2n})`; it equals `n·1`, so `⟨1⟩`
/// is isotropic only when `p | n`.
pub fn audit_trace_of_one(n: usize, q: u64) -> Result<AuditReport, RefuteError> {
    let (p, _) = check_nq(n, q, false)?;
    let mut r = AuditReport::new("R1", "W' contains 1, so it is totally isotropic only if p divides n");
    let v = HermitianSpace::trace(n, q, TraceForm::Literal)?;
    let (ext, rb) = v.trace_parts().expect("trace model");
    let one = rb.to_coords(ext.one());
    let f11 = v.form_eval(&one, &one)?;
    let n_one = v.base().from_int(n as i64);
    r.put("n", n as i128);
    r.put("q", q as i128);
    r.put("p", p as i128);
    r.put("f(1,1)", v.base().format_elem(f11));
    r.put("n*1", v.base().format_elem(n_one));
    r.put("p|n", n as u64 % p == 0);
    r.verdict = if f11 != n_one {
        Verdict::Inconclusive
    } else if f11.is_zero() {
        Verdict::ContradictsGap
    } else {
        Verdict::ConfirmsGap
    };
    Ok(r)
}

/// `W'₀ = GF(q^{2m})` inside `V = GF(q^{2n})`, `n = 2m + 1`: total isotropy,
/// pairwise intersections of `W'ᵢ = W'₀ α^{i(q^m - 1)}` for
/// `0 ≤ i ≤ (qⁿ+1)/(q+1)`, and cover of the isotropic points. `GF(q^{2m})` is
/// a subfield only when `m | n`, i.e. `m = 1`.
pub fn audit_subfield_ti(n: usize, q: u64) -> Result<AuditReport, RefuteError> {
    check_nq(n, q, true)?;
    let m = (n - 1) / 2;
    let mut r = AuditReport::new("R2", "S3 = {W'_0 a^(i(q^m-1))} is a partition of the isotropic points into totally isotropic subspaces");
    r.put("n", n as i128);
    r.put("q", q as i128);
    r.put("m", m as i128);
    if m == 0 {
        r.put("note", "empty construction".to_string());
        return Ok(r);
    }
    if n % m != 0 {
        r.put("subfield", false);
        r.put("note", format!("GF(q^{}) is not a subfield of GF(q^{})", 2 * m, 2 * n));
        return Ok(r);
    }
    let v = HermitianSpace::trace(n, q, TraceForm::Hermitian)?;
    let (ext, rb) = v.trace_parts().expect("trace model");
    let f = v.base().clone();
    let qq = q as i64;
    let qn = qq.pow(n as u32);
    let big = (ext.order() - 1) as i64;
    let gamma = ext.exp(big / (qq.pow(2 * m as u32) - 1));
    let mut w0 = Vec::new();
    let mut cur = ext.one();
    for _ in 0..m {
        w0.push(cur);
        cur = ext.mul(cur, gamma);
    }
    let members_count = (qn + 1) / (qq + 1) + 1;
    let mut members = Vec::new();
    for i in 0..members_count {
        let shift = ext.exp(i * (qq.pow(m as u32) - 1));
        let basis = w0.iter().map(|&b| rb.to_coords(ext.mul(b, shift))).collect();
        members.push(Subspace::new(&f, n, basis)?);
    }
    let ti = geometry::is_totally_isotropic(&v, &members[0]);
    let iso = geometry::isotropic_points(&v)?;
    let report = geometry::spread_validate(&Spread::new(members.clone(), n), Some(&iso));
    let covered = iso.points().iter().filter(|p| members.iter().any(|w| w.contains(&p.coords))).count();
    r.put("subfield", true);
    r.put("members", members_count as i128);
    r.put("W'_0_totally_isotropic", ti);
    r.put("pairwise_trivial", report.pairwise_ok);
    r.put("isotropic_points", iso.len() as i128);
    r.put("isotropic_points_covered", covered as i128);
    r.put("partition", report.partition_ok == Some(true));
    r.verdict = if !ti || !report.pairwise_ok || report.partition_ok != Some(true) {
        Verdict::ConfirmsGap
    } else {
        Verdict::ContradictsGap
    };
    Ok(r)
}

/// The count `(qⁿ+1)(qⁿ-1)/((q+1)(q²-1))` forced by a sharply transitive
/// `A₃B'₃` against the true `(qⁿ+1)(q^{n-1}-1)/(q²-1)`, enumerated when small.
pub fn audit_isotropic_count(n: usize, q: u64) -> Result<AuditReport, RefuteError> {
    check_nq(n, q, true)?;
    let mut r = AuditReport::new("R3", "A3 B'3 sharply transitive forces (q^n+1)(q^n-1)/((q+1)(q^2-1)) isotropic points");
    let qq = q as i128;
    let qn = qq.pow(n as u32);
    let implied = rat((qn + 1) * (qn - 1), (qq + 1) * (qq * qq - 1));
    let true_count = rat((qn + 1) * (qq.pow(n as u32 - 1) - 1), qq * qq - 1);
    r.put("n", n as i128);
    r.put("q", q as i128);
    r.put("implied", implied);
    r.put("true", true_count);
    r.put("closed_form", arith::isotropic_point_count(n as u32, q));
    let mut agrees = Ratio::from_integer(arith::isotropic_point_count(n as u32, q) as i128) == true_count;
    if (q as u128).pow(2 * n as u32) <= geometry::DEFAULT_ENUM_CAP as u128 {
        let enumerated = geometry::isotropic_points(&HermitianSpace::standard(n, q)?)?.len();
        r.put("enumerated", enumerated as i128);
        agrees &= Ratio::from_integer(enumerated as i128) == true_count;
    }
    r.verdict = match (agrees, implied != true_count) {
        (false, _) => Verdict::Inconclusive,
        (true, true) => Verdict::ConfirmsGap,
        (true, false) => Verdict::ContradictsGap,
    };
    Ok(r)
}

/// Measured orders of the cyclic torus `A₃` and of the block torus `b₃`'s
/// transversal on `P(W')`, against the corrected and the claimed values.
pub fn audit_torus_orders(n: usize, q: u64) -> Result<AuditReport, RefuteError> {
    check_nq(n, q, true)?;
    if n < 3 {
        return Err(RefuteError::BadParameters("the block torus needs n >= 3".into()));
    }
    let mut r = AuditReport::new("R4", "|A3| = q^n+1 and |B'3| = (q^(n-1)-1)/(q-1)");
    let qq = q as u128;
    let qn = qq.pow(n as u32);
    let a3 = unitary::singer_subgroup(n, q, SingerTarget::SuTorus)?;
    let a3_corrected = (qn + 1) / (qq + 1);
    let a3_claimed = qn + 1;
    let b3 = unitary::babai_torus(n, q)?;
    let b3_order = b3.order_dividing(qq.pow(n as u32 - 1) - 1).unwrap_or(0);
    let m = (n - 1) / 2;
    let f = b3.field().clone();
    let rows: Vec<Vec<Elem>> = (0..m).map(|i| (0..m).map(|j| b3.get(i, j)).collect()).collect();
    let c = Matrix::from_rows(&f, &rows);
    let transversal = c.projective_order_dividing(qq.pow(n as u32 - 1) - 1).unwrap_or(0);
    let t_corrected = (qq.pow(n as u32 - 1) - 1) / (qq * qq - 1);
    let t_claimed = (qq.pow(n as u32 - 1) - 1) / (qq - 1);
    r.put("n", n as i128);
    r.put("q", q as i128);
    r.put("|A3|", a3.order);
    r.put("|A3|_corrected", a3_corrected);
    r.put("|A3|_claimed", a3_claimed);
    r.put("|b3|", b3_order);
    r.put("|B'3|", transversal);
    r.put("|B'3|_corrected", t_corrected);
    r.put("|B'3|_claimed", t_claimed);
    let measured_ok = a3.order == a3_corrected && transversal == t_corrected;
    r.verdict = if !measured_ok {
        Verdict::Inconclusive
    } else if a3_corrected != a3_claimed || t_corrected != t_claimed {
        Verdict::ConfirmsGap
    } else {
        Verdict::ContradictsGap
    };
    Ok(r)
}

/// `|A₃|·|B'₃|` against the number of isotropic points.
pub fn audit_product_cardinality(n: usize, q: u64) -> Result<AuditReport, RefuteError> {
    check_nq(n, q, true)?;
    let mut r = AuditReport::new("R5", "A3 B'3 is sharply transitive on the isotropic points");
    let qq = q as i128;
    let qn = qq.pow(n as u32);
    let a3 = rat(qn + 1, qq + 1);
    let b3 = rat(qq.pow(n as u32 - 1) - 1, qq * qq - 1);
    let product = a3 * b3;
    let count = arith::isotropic_point_count(n as u32, q) as i128;
    r.put("n", n as i128);
    r.put("q", q as i128);
    r.put("|A3|", a3);
    r.put("|B'3|", b3);
    r.put("product", product);
    r.put("isotropic_points", count);
    r.verdict = if product < Ratio::from_integer(count) { Verdict::ConfirmsGap } else { Verdict::ContradictsGap };
    Ok(r)
}

/// `PSU₄(q) = H·SU₃(q)` with `|H| = q⁴·c` for both readings of `c`, plus the
/// subgroups built in `PSU₄(q)` when `q ≤ 3`.
pub fn audit_psu4_decomposition(q: u64, cap: u128) -> Result<AuditReport, RefuteError> {
    check_nq(1, q, false)?;
    let mut r = AuditReport::new("R6", "PSU_4(q) = (q^4 : c) SU_3(q) with an integral |H n K|");
    let a = psu4_decomposition(q, q <= 3, cap)?;
    r.put("q", q as i128);
    r.put("d", a.d);
    r.put("|G|", a.g_order);
    r.put("|K|", a.su3_order);
    let to_i = |x: Ratio<u128>| rat(*x.numer() as i128, *x.denom() as i128);
    for rd in &a.readings {
        r.put(&format!("{}:c", rd.name), to_i(rd.factor));
        r.put(&format!("{}:|H|", rd.name), to_i(rd.h_order));
        r.put(&format!("{}:|HnK|", rd.name), to_i(rd.required_intersection));
        r.put(&format!("{}:integral", rd.name), rd.reconcilable());
    }
    let any_reading = a.readings.iter().any(|rd| rd.reconcilable());
    let mut built_fails = None;
    if let Some(m) = &a.measured {
        r.put("built:|U|", m.unipotent_order);
        r.put("built:|H|", m.h_order);
        r.put("built:|K|", m.k_order);
        if let Some(i) = m.intersection {
            r.put("built:|HnK|", i);
            let hk = m.h_order * m.k_order / i;
            r.put("built:|HK|", hk);
            r.put("built:H_transitive_on_G/K", m.h_transitive_on_k_cosets.unwrap_or(false));
            built_fails = Some(hk != a.g_order);
        } else {
            r.put("built:|H||K|>=|G|", m.h_order * m.k_order >= a.g_order);
            if m.h_order * m.k_order < a.g_order {
                built_fails = Some(true);
            }
        }
    }
    r.verdict = match (any_reading, built_fails) {
        (false, _) | (_, Some(true)) => Verdict::ConfirmsGap,
        (true, Some(false)) => Verdict::ContradictsGap,
        (true, None) => Verdict::Inconclusive,
    };
    Ok(r)
}

/// R1–R5 in order.
pub fn audit_all(n: usize, q: u64) -> Result<Vec<AuditReport>, RefuteError> {
    Ok(vec![
        audit_trace_of_one(n, q)?,
        audit_subfield_ti(n, q)?,
        audit_isotropic_count(n, q)?,
        audit_torus_orders(n, q)?,
        audit_product_cardinality(n, q)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(r: &AuditReport, name: &str) -> String {
        r.value(name).unwrap().to_string()
    }

    #[test]
    fn r1_examples() {
        let r = audit_trace_of_one(3, 2).unwrap();
        assert_eq!(r.verdict, Verdict::ConfirmsGap);
        assert_eq!(int(&r, "f(1,1)"), "z0");
        assert_eq!(audit_trace_of_one(3, 3).unwrap().verdict, Verdict::ContradictsGap);
        let r = audit_trace_of_one(5, 4).unwrap();
        assert_eq!(r.verdict, Verdict::ConfirmsGap);
        assert_eq!(int(&r, "f(1,1)"), "z0");
    }

    #[test]
    fn r2_examples() {
        let r = audit_subfield_ti(3, 2).unwrap();
        assert_eq!(r.verdict, Verdict::ConfirmsGap);
        assert_eq!(int(&r, "W'_0_totally_isotropic"), "no");
        assert_eq!(int(&r, "isotropic_points"), "9");
        assert_eq!(audit_subfield_ti(3, 3).unwrap().verdict, Verdict::ConfirmsGap);
        assert_eq!(audit_subfield_ti(1, 2).unwrap().verdict, Verdict::Inconclusive);
        assert_eq!(audit_subfield_ti(5, 2).unwrap().verdict, Verdict::Inconclusive);
    }

    #[test]
    fn r3_examples() {
        let r = audit_isotropic_count(3, 2).unwrap();
        assert_eq!((int(&r, "implied"), int(&r, "true"), int(&r, "enumerated")), ("7".into(), "9".into(), "9".into()));
        assert_eq!(r.verdict, Verdict::ConfirmsGap);
        let r = audit_isotropic_count(3, 4).unwrap();
        assert_eq!(int(&r, "implied"), "273/5");
        assert_eq!(int(&r, "true"), "65");
        let r = audit_isotropic_count(5, 2).unwrap();
        assert_eq!(int(&r, "true"), "165");
        assert_eq!(int(&r, "implied"), "341/3");
        assert_eq!(r.verdict, Verdict::ConfirmsGap);
    }

    #[test]
    fn r4_r5_examples() {
        let r = audit_torus_orders(3, 2).unwrap();
        assert_eq!((int(&r, "|A3|"), int(&r, "|A3|_claimed")), ("3".into(), "9".into()));
        assert_eq!((int(&r, "|B'3|"), int(&r, "|B'3|_claimed")), ("1".into(), "3".into()));
        assert_eq!(r.verdict, Verdict::ConfirmsGap);
        assert_eq!(int(&audit_torus_orders(3, 4).unwrap(), "|A3|"), "13");
        assert_eq!(int(&audit_torus_orders(5, 2).unwrap(), "|A3|"), "11");
        let r = audit_product_cardinality(3, 3).unwrap();
        assert_eq!((int(&r, "product"), int(&r, "isotropic_points")), ("7".into(), "28".into()));
        assert_eq!(r.verdict, Verdict::ConfirmsGap);
        assert_eq!(int(&audit_product_cardinality(3, 4).unwrap(), "product"), "13");
    }

    #[test]
    fn r6_and_format() {
        let r = audit_psu4_decomposition(2, 1 << 21).unwrap();
        assert_eq!(r.verdict, Verdict::ConfirmsGap);
        assert_eq!(int(&r, "q^2n-1:|HnK|"), "2/3");
        assert_eq!(int(&r, "literal:|H|"), "128/3");
        let line = audit_product_cardinality(3, 2).unwrap().to_string();
        assert_eq!(line, "R5: confirms_gap | n=3 q=2 |A3|=3 |B'3|=1 product=3 isotropic_points=9");
        assert!(audit_trace_of_one(3, 6).is_err());
        assert_eq!(audit_all(3, 2).unwrap().len(), 5);
    }
}
