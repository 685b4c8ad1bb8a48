//! Recipes for `PSU₃(q)` from a pair of solvable subgroups with trivial
//! conjugate intersections, and the audit of the `PSU₄(q)` lift.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use super::{
    mls_double_coset, mls_holmes, solvable_blocks, transitive_on_cosets, verify, Certificate, ConstructError, Construction,
    VerificationMode,
};
use crate::arith;
use crate::geometry::{self, HermitianSpace};
use crate::gf::{Elem, Field, RelativeBasis};
use crate::logsig::{self, LogSignature};
use crate::matgrp::cosets;
use crate::matgrp::unitary::{self, SingerTarget};
use crate::matgrp::{orbits_of, GroupError, GroupHandle, Perm, StabChain};
use crate::matrix::{Matrix, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Psu3Variant {
    /// `q` even, `q + 1` prime: Singer subgroup and `Q(q):K(q)`.
    EvenQp1Prime,
    /// `q` even, `q² - q + 1` prime: diagonal torus and `Q(q):C_{q-1}`.
    EvenQ2q1Prime,
    /// `q` odd, `q² - q + 1` prime: `Q(q):C_{q-1}` and the diagonal torus.
    OddQ2q1Prime,
    /// `q > 5` odd, `q + 1 = 2p`: point stabilizer and Singer subgroup, with
    /// representatives paired through 2-transitivity.
    OddQ12p,
}

impl Psu3Variant {
    pub const ALL: [Psu3Variant; 4] =
        [Psu3Variant::EvenQp1Prime, Psu3Variant::EvenQ2q1Prime, Psu3Variant::OddQ2q1Prime, Psu3Variant::OddQ12p];

    pub fn name(self) -> &'static str {
        match self {
            Psu3Variant::EvenQp1Prime => "even_qp1_prime",
            Psu3Variant::EvenQ2q1Prime => "even_q2q1_prime",
            Psu3Variant::OddQ2q1Prime => "odd_q2q1_prime",
            Psu3Variant::OddQ12p => "odd_q1_2p",
        }
    }

    /// Named arithmetic conditions on `q` and whether each holds.
    pub fn hypotheses(self, q: u64) -> Vec<(String, bool)> {
        let qq = q as u128;
        let mut out = vec![("q is a prime power".to_string(), arith::prime_power(q).is_some())];
        let even = q % 2 == 0;
        match self {
            Psu3Variant::EvenQp1Prime => {
                out.push(("q even".into(), even));
                out.push((format!("q+1 = {} prime", qq + 1), arith::is_prime(qq + 1)));
            }
            Psu3Variant::EvenQ2q1Prime | Psu3Variant::OddQ2q1Prime => {
                if self == Psu3Variant::EvenQ2q1Prime {
                    out.push(("q even".into(), even));
                } else {
                    out.push(("q odd".into(), !even));
                }
                let r = qq * qq - qq + 1;
                out.push((format!("q²-q+1 = {r} prime"), arith::is_prime(r)));
            }
            Psu3Variant::OddQ12p => {
                out.push(("q odd".into(), !even));
                out.push(("q > 5".into(), q > 5));
                let half = (qq + 1) / 2;
                out.push((format!("q+1 = 2p with p = {half} prime"), (qq + 1) % 2 == 0 && arith::is_prime(half)));
            }
        }
        out
    }
}

impl fmt::Display for Psu3Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Psu3Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Psu3Variant::ALL.into_iter().find(|v| v.name() == s).ok_or_else(|| format!("unknown variant `{s}`"))
    }
}

/// `PSU₃(q)` on its isotropic points with the matrices used to cut out subgroups.
pub struct Psu3Parts {
    pub q: u64,
    pub g: GroupHandle,
    pub space: HermitianSpace,
    /// Index of the isotropic point `⟨e₁⟩`.
    pub alpha: u32,
    pub q_gens: Vec<Matrix>,
    pub k_tau: Matrix,
}

impl Psu3Parts {
    pub fn new(q: u64) -> Result<Psu3Parts, ConstructError> {
        let g = unitary::psu(3, q)?;
        let qg = unitary::q_group_and_torus(q)?;
        let alpha = g.point_index(&[Elem::ONE, Elem::ZERO, Elem::ZERO])?;
        Ok(Psu3Parts { q, g, space: qg.space, alpha, q_gens: qg.q_gens, k_tau: qg.k_tau })
    }

    fn d(&self) -> u128 {
        arith::unitary_center_order(3, self.q) as u128
    }

    fn sub(&self, mats: &[Matrix]) -> Result<GroupHandle, ConstructError> {
        let mut h = unitary::matrix_subgroup(&self.g, mats)?;
        h.group = h.group.reduced();
        Ok(h)
    }

    /// `Q(q)`, order `q³`.
    pub fn q_group(&self) -> Result<GroupHandle, ConstructError> {
        self.sub(&self.q_gens)
    }

    /// `Q(q):K(q)`, the stabilizer of `⟨e₁⟩`.
    pub fn point_stabilizer(&self) -> Result<GroupHandle, ConstructError> {
        let mut mats = self.q_gens.clone();
        mats.push(self.k_tau.clone());
        self.sub(&mats)
    }

    /// `Q(q):C_{q-1}` with `C_{q-1} = ⟨diag(k, 1, k⁻¹)⟩`, `k` generating `GF(q)*`.
    pub fn q_times_cyclic(&self) -> Result<GroupHandle, ConstructError> {
        let f = self.space.base();
        let k = f.exp(self.q as i64 + 1);
        let mut mats = self.q_gens.clone();
        mats.push(unitary::k_tau(&self.space, k).expect("nonzero"));
        self.sub(&mats)
    }

    /// Image of the diagonal torus `Z_{q+1}²`.
    pub fn torus(&self) -> Result<GroupHandle, ConstructError> {
        self.sub(&unitary::diagonal_torus(3, self.q)?)
    }

    /// Image of the cyclic torus of order `(q²-q+1)/d`.
    pub fn singer(&self) -> Result<GroupHandle, ConstructError> {
        let s = unitary::singer_subgroup(3, self.q, SingerTarget::PsuTorus)?;
        self.sub(&[s.matrix])
    }
}

fn expect_order(cert: &mut Certificate, name: &str, formula: &str, h: &GroupHandle, expected: u128) -> bool {
    cert.order(name, h.order());
    cert.check(format!("|{name}| = {formula} = {expected}"), h.order() == expected)
}

/// MLS of `PSU₃(q)` by the chosen recipe; the arithmetic hypotheses are
/// checked first and reported by name.
pub fn mls_psu3(q: u64, variant: Psu3Variant, cap: u128) -> Result<Construction, ConstructError> {
    let mut cert = Certificate::new(format!("psu3_{variant}"));
    for (name, ok) in variant.hypotheses(q) {
        cert.check(name, ok);
    }
    if !cert.all_passed() {
        return Err(cert.hypothesis_error());
    }
    let parts = Psu3Parts::new(q)?;
    assemble_psu3(&parts, variant, cert, cap)
}

fn assemble_psu3(parts: &Psu3Parts, variant: Psu3Variant, mut cert: Certificate, cap: u128) -> Result<Construction, ConstructError> {
    let q = parts.q as u128;
    let d = parts.d();
    cert.order("G", parts.g.order());
    let stab_order = q.pow(3) * (q * q - 1) / d;
    let torus_order = (q + 1) * (q + 1) / d;
    let singer_order = (q * q - q + 1) / d;
    let (ok, h, k) = match variant {
        Psu3Variant::EvenQp1Prime => {
            let h = parts.singer()?;
            let f = parts.point_stabilizer()?;
            let ok = expect_order(&mut cert, "H", "(q²-q+1)/d", &h, singer_order)
                & expect_order(&mut cert, "F", "q³(q²-1)/d", &f, stab_order);
            (ok, h, f)
        }
        Psu3Variant::EvenQ2q1Prime => {
            let h = parts.torus()?;
            let f = parts.q_times_cyclic()?;
            let ok = expect_order(&mut cert, "H", "(q+1)²/d", &h, torus_order)
                & expect_order(&mut cert, "F", "q³(q-1)", &f, q.pow(3) * (q - 1));
            (ok, h, f)
        }
        Psu3Variant::OddQ2q1Prime => return odd_q2q1(parts, cert, cap),
        Psu3Variant::OddQ12p => return odd_q1_2p(parts, cert, cap),
    };
    if !ok {
        return Err(cert.hypothesis_error());
    }
    let c = mls_double_coset(&parts.g, &h, &k, None, cap)?;
    cert.absorb(c.certificate);
    Ok(Construction { ls: c.ls, certificate: cert })
}

/// The pair `H = Q(q):C_{q-1}`, `K = Z_{q+1} × Z_{(q+1)/d}` has
/// `gcd(|H|, |K|) ≥ 2` for odd `q`; it is tried as stated and, when
/// conjugates of `K` meet `H`, the factor `q - 1` is moved across: `H' = Q(q)`
/// and `K' ⊇ K` of order `|K|(q-1)`, first found in canonical order.
fn odd_q2q1(parts: &Psu3Parts, mut cert: Certificate, cap: u128) -> Result<Construction, ConstructError> {
    let q = parts.q as u128;
    let d = parts.d();
    let h = parts.q_times_cyclic()?;
    let k = parts.torus()?;
    let ok = expect_order(&mut cert, "H", "q³(q-1)", &h, q.pow(3) * (q - 1))
        & expect_order(&mut cert, "K", "(q+1)²/d", &k, (q + 1) * (q + 1) / d);
    if !ok {
        return Err(cert.hypothesis_error());
    }
    match mls_double_coset(&parts.g, &h, &k, None, cap) {
        Ok(c) => {
            cert.absorb(c.certificate);
            return Ok(Construction { ls: c.ls, certificate: cert });
        }
        Err(ConstructError::Hypothesis(failed)) => {
            cert.note(format!("pair |H|={} |K|={} gcd={} fails: {}", h.order(), k.order(), arith::gcd(h.order(), k.order()), failed.join("; ")));
            let t = parts.g.group.table(cap)?;
            let hs = cosets::embed_subgroup(&t, &h.group, cap)?;
            let ks = cosets::embed_subgroup(&t, &k.group, cap)?;
            cert.note(format!("pair has {} double cosets", cosets::double_cosets(&t, &hs, &ks).len()));
        }
        Err(e) => return Err(e),
    }
    let h2 = parts.q_group()?;
    if !expect_order(&mut cert, "H'", "q³", &h2, q.pow(3)) {
        return Err(cert.hypothesis_error());
    }
    let t = parts.g.group.table(cap)?;
    let target = k.order() * (q - 1);
    let ks = cosets::embed_subgroup(&t, &k.group, cap)?;
    let k_gens: Vec<u32> = k.group.gens().iter().map(|x| t.index_of(x).unwrap()).collect();
    let mut found = None;
    for x in 0..t.len() as u32 {
        if ks.contains(x) {
            continue;
        }
        let mut gens = k_gens.clone();
        gens.push(x);
        if t.closure(&gens).order() as u128 == target {
            found = Some(x);
            break;
        }
    }
    let x = found.ok_or_else(|| ConstructError::SearchExhausted(format!("no overgroup of K of order {target}")))?;
    let mut gens = k.group.gens().to_vec();
    gens.push(t.get(x).clone());
    let k2 = parts.g.subgroup(gens)?;
    cert.note(format!("K' = ⟨K, {}⟩", t.get(x)));
    expect_order(&mut cert, "K'", "(q+1)²(q-1)/d", &k2, target);
    let c = mls_double_coset(&parts.g, &h2, &k2, None, cap)?;
    cert.absorb(c.certificate);
    Ok(Construction { ls: c.ls, certificate: cert })
}

/// `H = S_α`, `K` Singer of order `q²-q+1`; representatives `xⱼyᵢ` with
/// `A₁ = {x₁, x₂}` moving `α` to `β₁, β₂` and `yᵢ` sending `(β₁, β₂)` into
/// the `i`-th pair of `K`-orbits.
fn odd_q1_2p(parts: &Psu3Parts, mut cert: Certificate, cap: u128) -> Result<Construction, ConstructError> {
    let q = parts.q as u128;
    let g = &parts.g;
    let deg = g.degree();
    let omega = deg as u128;
    let h = parts.point_stabilizer()?;
    let k = parts.singer()?;
    let mut ok = expect_order(&mut cert, "S_α", "q³(q²-1)/d", &h, q.pow(3) * (q * q - 1) / parts.d());
    ok &= cert.check("S_α fixes α", h.group.gens().iter().all(|x| x.apply(parts.alpha) == parts.alpha));
    ok &= cert.check("|S_α|·|Ω| = |G|", h.order() * omega == g.order());
    ok &= expect_order(&mut cert, "K", "q²-q+1", &k, q * q - q + 1);
    ok &= cert.check("gcd(|S_α|, |K|) = 1", arith::gcd(h.order(), k.order()) == 1);
    let orbits = orbits_of(deg, k.group.gens());
    cert.order("K-orbits on Ω", orbits.len() as u128);
    ok &= cert.check(format!("K has q+1 = {} orbits on Ω", q + 1), orbits.len() as u128 == q + 1);
    let alpha = parts.alpha;
    let beta2 = if alpha == 0 { 1 } else { 0 };
    let chain = StabChain::with_base(deg, g.group.gens(), &[alpha, beta2]);
    let lens = chain.orbit_lengths();
    cert.note(format!("stabilizer chain orbit lengths {lens:?}"));
    ok &= cert.check("G is 2-transitive on Ω", lens.len() >= 2 && lens[0] as u128 == omega && lens[1] as u128 == omega - 1);
    ok &= cert.check("K-orbits pair up", orbits.len() % 2 == 0);
    if !ok {
        return Err(cert.hypothesis_error());
    }
    let u = chain.transversal(0, beta2).expect("transitive").clone();
    let a1 = vec![Perm::identity(deg), u.inv()];
    let betas = [alpha, beta2];
    let mut a2 = Vec::new();
    for pair in orbits.chunks(2) {
        let (d1, d2) = (pair[0][0], pair[1][0]);
        let u = chain.transversal(0, d1).expect("transitive");
        let eps = u.inv().apply(d2);
        let v = chain.transversal(1, eps).expect("2-transitive");
        let c = u.mul(v);
        debug_assert!(c.apply(betas[0]) == d1 && c.apply(betas[1]) == d2);
        a2.push(c.inv());
    }
    let mut orbit_of = vec![0usize; deg];
    for (i, o) in orbits.iter().enumerate() {
        for &x in o {
            orbit_of[x as usize] = i;
        }
    }
    let mut hit = vec![false; orbits.len()];
    for x in &a1 {
        for y in &a2 {
            hit[orbit_of[x.mul(y).inv().apply(alpha) as usize]] = true;
        }
    }
    cert.reps = Some(a1.len() * a2.len());
    if !cert.check("A₁A₂ meets every double coset S_α g K once", hit.iter().all(|&b| b) && a1.len() * a2.len() == orbits.len()) {
        return Err(cert.hypothesis_error());
    }
    let hb = solvable_blocks(&h, cap)?;
    let h_ls = LogSignature::new(h.clone(), hb.clone())?;
    verify(&h_ls)?;
    cert.check("MLS(S_α) verified", logsig::ls_minimality(&h_ls).minimal);
    let kb = solvable_blocks(&k, cap)?;
    let mut blocks = hb;
    blocks.push(a1);
    blocks.push(a2);
    blocks.extend(kb);
    let ls = LogSignature::new(g.clone(), blocks)?;
    if g.order() <= cap {
        verify(&ls)?;
        cert.mode = VerificationMode::Full;
    } else {
        cert.mode = VerificationMode::Component;
        cert.note(format!("|G| = {} above the cap {cap}: products not enumerated", g.order()));
    }
    cert.length = Some(ls.length());
    cert.minimal = Some(logsig::ls_minimality(&ls).minimal);
    Ok(Construction { ls: Some(ls), certificate: cert })
}

/// One reading of the cyclic factor in `|H| = q^{n²} · c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Psu4Reading {
    pub name: &'static str,
    pub factor: Ratio<u128>,
    pub h_order: Ratio<u128>,
    /// `|H|·|SU₃(q)| / |PSU₄(q)|`, the intersection order `HK = G` would force.
    pub required_intersection: Ratio<u128>,
}

impl Psu4Reading {
    pub fn reconcilable(&self) -> bool {
        self.h_order.is_integer() && self.required_intersection.is_integer() && self.required_intersection >= Ratio::from_integer(1)
    }
}

/// Subgroups actually built inside `PSU₄(q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Psu4Measured {
    /// Unipotent radical of a totally isotropic line with a cyclic Levi factor.
    pub h_order: u128,
    pub unipotent_order: u128,
    /// Stabilizer of a non-isotropic vector, `≅ SU₃(q)`.
    pub k_order: u128,
    pub intersection: Option<u128>,
    pub h_transitive_on_k_cosets: Option<bool>,
    pub k_transitive_on_h_cosets: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Psu4Audit {
    pub q: u64,
    pub d: u128,
    pub g_order: u128,
    pub su3_order: u128,
    pub readings: Vec<Psu4Reading>,
    pub measured: Option<Psu4Measured>,
}

fn ratio(n: u128, d: u128) -> Ratio<u128> {
    Ratio::new(n, d)
}

/// Order arithmetic for both readings, plus the subgroups themselves when
/// `PSU₄(q)` can be built; intersections need the element table.
pub fn psu4_decomposition(q: u64, build: bool, cap: u128) -> Result<Psu4Audit, ConstructError> {
    let qq = q as u128;
    let n = 2u32;
    let d = arith::gcd(qq + 1, 2 * n as u128);
    let g_order = arith::psu_order(4, q);
    let su3_order = arith::su_order(3, q);
    let qn2 = qq.pow(n * n);
    let mut readings = Vec::new();
    for (name, factor) in [
        ("literal", ratio(qq.pow(2 * n - 1), d * (qq + 1))),
        ("q^2n-1", ratio(qq.pow(2 * n) - 1, d * (qq + 1))),
    ] {
        let h_order = factor * qn2;
        let required_intersection = h_order * su3_order / g_order;
        readings.push(Psu4Reading { name, factor, h_order, required_intersection });
    }
    let measured = if build { Some(measure_psu4(q, cap)?) } else { None };
    Ok(Psu4Audit { q, d, g_order, su3_order, readings, measured })
}

/// `[[I, X], [0, I]]` isometries, all `q⁴` of them.
fn unipotent_radical(space: &HermitianSpace) -> Vec<Matrix> {
    let f = space.base();
    let elems: Vec<Elem> = f.elements().collect();
    let mut out = Vec::new();
    let mut idx = [0usize; 4];
    loop {
        let mut m = Matrix::identity(f, 4);
        m.set(0, 2, elems[idx[0]]);
        m.set(0, 3, elems[idx[1]]);
        m.set(1, 2, elems[idx[2]]);
        m.set(1, 3, elems[idx[3]]);
        if space.is_isometry(&m) {
            out.push(m);
        }
        let mut i = 0;
        while i < 4 {
            idx[i] += 1;
            if idx[i] < elems.len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == 4 {
            return out;
        }
    }
}

/// `diag(A, R Ā^{-T} R)` with `A` the `(q+1)`-th power of a Singer cycle of `GL₂(q²)`.
fn levi_element(space: &HermitianSpace) -> Result<Matrix, ConstructError> {
    let f = space.base().clone();
    let q = space.q();
    let ext = Field::new(f.characteristic(), 2 * f.degree()).map_err(geometry::GeometryError::from)?;
    let rb = RelativeBasis::new(&f, &ext).map_err(geometry::GeometryError::from)?;
    let a = unitary::multiplication_matrix(&rb, ext.generator()).pow(q as u128 + 1);
    let mut r = Matrix::zeros(&f, 2, 2);
    r.set(0, 1, Elem::ONE);
    r.set(1, 0, Elem::ONE);
    let abar = a.map(|x| space.conj(x));
    let b = r.mul(&abar.transpose().inverse().ok_or(GroupError::Shape)?).mul(&r);
    let m = Matrix::direct_sum(&[a, b]);
    if !unitary::su_membership(space, &m)? {
        return Err(GroupError::NotMember("Levi element".into()).into());
    }
    Ok(m)
}

/// Generators of the pointwise stabilizer of a non-isotropic `v`: `SU(v^⊥)`
/// extended by the identity on `v`.
fn su3_of_complement(space: &HermitianSpace) -> Result<Vec<Matrix>, ConstructError> {
    let f = space.base().clone();
    let v = geometry::all_vectors(&f, 4, geometry::DEFAULT_ENUM_CAP)?
        .into_iter()
        .find(|v| !space.form_eval(v, v).map(|x| x.is_zero()).unwrap_or(true))
        .expect("a non-degenerate form has non-isotropic vectors");
    let fvv = space.form_eval(&v, &v)?;
    let mut perp: Vec<Vector> = Vec::new();
    for i in 0..4 {
        let mut e = vec![Elem::ZERO; 4];
        e[i] = Elem::ONE;
        let c = f.div(space.form_eval(&e, &v)?, fvv).map_err(geometry::GeometryError::from)?;
        let x: Vector = e.iter().zip(&v).map(|(&a, &b)| f.sub(a, f.mul(c, b))).collect();
        let mut trial = perp.clone();
        trial.push(x.clone());
        if Matrix::from_rows(&f, &trial).rank() == trial.len() {
            perp.push(x);
        }
        if perp.len() == 3 {
            break;
        }
    }
    let mut gram = Matrix::zeros(&f, 3, 3);
    for i in 0..3 {
        for j in 0..3 {
            gram.set(i, j, space.form_eval(&perp[i], &perp[j])?);
        }
    }
    let sub = HermitianSpace::from_gram(space.q(), gram)?;
    let gens3 = unitary::su_generators(&sub)?;
    let mut cols = perp.clone();
    cols.push(v);
    let b = Matrix::from_columns(&f, &cols);
    let bi = b.inverse().ok_or(GroupError::Shape)?;
    let mut out = Vec::new();
    for m3 in gens3 {
        let m4 = b.mul(&Matrix::direct_sum(&[m3, Matrix::identity(&f, 1)])).mul(&bi);
        if !unitary::su_membership(space, &m4)? {
            return Err(GroupError::NotMember("lifted SU₃ generator".into()).into());
        }
        out.push(m4);
    }
    Ok(out)
}

fn psu4_subgroups(q: u64) -> Result<(GroupHandle, GroupHandle, GroupHandle, u128), ConstructError> {
    let g = unitary::psu(4, q)?;
    let space = HermitianSpace::standard(4, q)?;
    let unip = unitary::matrix_subgroup(&g, &unipotent_radical(&space))?;
    let u_order = unip.group.reduced().order();
    let mut hm = unip.gen_matrices.clone();
    hm.push(levi_element(&space)?);
    let mut h = unitary::matrix_subgroup(&g, &hm)?;
    h.group = h.group.reduced();
    let mut k = unitary::matrix_subgroup(&g, &su3_of_complement(&space)?)?;
    k.group = k.group.reduced();
    Ok((g, h, k, u_order))
}

fn measure_psu4(q: u64, cap: u128) -> Result<Psu4Measured, ConstructError> {
    let (g, h, k, u_order) = psu4_subgroups(q)?;
    let mut m = Psu4Measured {
        h_order: h.order(),
        unipotent_order: u_order,
        k_order: k.order(),
        intersection: None,
        h_transitive_on_k_cosets: None,
        k_transitive_on_h_cosets: None,
    };
    if g.order() <= cap {
        let t = g.group.table(cap)?;
        let hs = cosets::embed_subgroup(&t, &h.group, cap)?;
        let ks = cosets::embed_subgroup(&t, &k.group, cap)?;
        m.intersection = Some(hs.list.iter().filter(|&&x| ks.contains(x)).count() as u128);
        let idx = |x: &GroupHandle| x.group.gens().iter().map(|p| t.index_of(p).unwrap()).collect::<Vec<_>>();
        m.h_transitive_on_k_cosets = Some(transitive_on_cosets(&t, &ks, &idx(&h)).1);
        m.k_transitive_on_h_cosets = Some(transitive_on_cosets(&t, &hs, &idx(&k)).1);
    }
    Ok(m)
}

/// The lift of an MLS of `SU₃(q)` to `PSU₄(q)`: the supplied LS is verified
/// first, then the decomposition `G = HK` is audited. An LS is produced only
/// if every hypothesis holds.
pub fn mls_psu4_lift(q: u64, su3: &LogSignature, cap: u128) -> Result<Construction, ConstructError> {
    let mut cert = Certificate::new("psu4_lift");
    let su3_order = arith::su_order(3, q);
    let valid = su3.group().order() == su3_order && logsig::ls_verify(su3)?.is_valid();
    if !cert.check(format!("supplied LS is a valid LS of a group of order |SU₃({q})| = {su3_order}"), valid) {
        return Err(cert.hypothesis_error());
    }
    let audit = psu4_decomposition(q, true, cap)?;
    cert.order("G", audit.g_order);
    for r in &audit.readings {
        cert.note(format!(
            "reading {}: |H| = {} needs |H ∩ K| = {} ({})",
            r.name,
            r.h_order,
            r.required_intersection,
            if r.reconcilable() { "integral" } else { "impossible" }
        ));
    }
    let m = audit.measured.as_ref().expect("built");
    cert.order("H", m.h_order);
    cert.order("K", m.k_order);
    cert.check(format!("|K| = |SU₃({q})|"), m.k_order == su3_order);
    cert.check("|H|·|K| ≥ |G|", m.h_order * m.k_order >= audit.g_order);
    match (m.intersection, m.h_transitive_on_k_cosets) {
        (Some(i), Some(tr)) => {
            cert.order("H ∩ K", i);
            cert.check("|H||K|/|H ∩ K| = |G|", m.h_order * m.k_order == audit.g_order * i);
            cert.check("H transitive on the cosets of K", tr);
        }
        _ => cert.note("element table out of reach: intersection and transitivity not computed"),
    }
    if !cert.all_passed() {
        return Ok(Construction { ls: None, certificate: cert });
    }
    let (g, h, k, _) = psu4_subgroups(q)?;
    let ls = mls_holmes(&g, &k, &h, cap)?;
    cert.mode = VerificationMode::Full;
    cert.length = Some(ls.length());
    cert.minimal = Some(logsig::ls_minimality(&ls).minimal);
    Ok(Construction { ls: Some(ls), certificate: cert })
}
