//! Hermitian geometry over `GF(q²)`: forms, isotropic points, subspaces and spreads.
//!
//! A [`HermitianSpace`] is either the field-trace model `V = GF(q^{2n})` with
//! `f(x, y) = Tr_{GF(q^{2n})/GF(q²)}(x · ȳ)`, or a Gram-matrix model on
//! `GF(q²)^n` with `f(u, v) = uᵀ J v̄`. Vectors are always given in coordinates
//! over `GF(q²)`; the trace model uses the basis `1, θ, …, θ^{n-1}` of its
//! generator `θ`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::arith;
use crate::gf::{Elem, Field, GfError, RelativeBasis};
use crate::matrix::{self, Matrix, Vector};

/// Default cap on the number of vectors or points an enumeration may touch.
pub const DEFAULT_ENUM_CAP: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("expected a vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("the form is not conjugate-symmetric")]
    NotHermitian,
    #[error("the form is singular")]
    Singular,
    #[error("the conjugate-symmetric trace form y ↦ y^(q^n) needs odd n, got {0}")]
    EvenTraceDimension(usize),
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error("{what} has {size} elements, above the cap of {cap}")]
    CapExceeded { what: &'static str, size: u128, cap: u64 },
}

/// Which conjugation the trace model applies to its second argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceForm {
    /// `f(x, y) = Tr(x · y^q)`.
    Literal,
    /// `f(x, y) = Tr(x · y^{q^n})`, conjugate-symmetric for odd `n`.
    Hermitian,
}

#[derive(Clone)]
enum Model {
    Trace { ext: Field, basis: RelativeBasis, conj_frobenius: u32, kind: TraceForm },
    Gram { gram: Matrix },
}

/// A vector space over `GF(q²)` with a sesquilinear form.
#[derive(Clone)]
pub struct HermitianSpace {
    n: usize,
    q: u64,
    s: u32,
    base: Field,
    model: Model,
}

fn split_q(q: u64) -> Result<(u64, u32), GeometryError> {
    arith::prime_power(q).ok_or(GeometryError::NotPrimePower(q))
}

/// `GF(q²)` as used throughout the crate.
pub fn unitary_base_field(q: u64) -> Result<Field, GeometryError> {
    let (p, s) = split_q(q)?;
    Ok(Field::new(p, 2 * s)?)
}

impl HermitianSpace {
    /// `GF(q²)^n` with the anti-diagonal Gram matrix, so the standard basis
    /// is `e₁, …, e_m, [w,] f_m, …, f₁`.
    pub fn standard(n: usize, q: u64) -> Result<HermitianSpace, GeometryError> {
        let base = unitary_base_field(q)?;
        let mut gram = Matrix::zeros(&base, n, n);
        for i in 0..n {
            gram.set(i, n - 1 - i, Elem::ONE);
        }
        HermitianSpace::from_gram(q, gram)
    }

    pub fn from_gram(q: u64, gram: Matrix) -> Result<HermitianSpace, GeometryError> {
        let (_, s) = split_q(q)?;
        let base = gram.field().clone();
        if base.order() != q * q {
            return Err(GeometryError::Field(GfError::MixedFields));
        }
        if !gram.is_square() {
            return Err(GeometryError::DimensionMismatch { expected: gram.rows(), got: gram.cols() });
        }
        let space = HermitianSpace { n: gram.rows(), q, s, base, model: Model::Gram { gram } };
        if !space.is_conjugate_symmetric() {
            return Err(GeometryError::NotHermitian);
        }
        if !space.is_nonsingular() {
            return Err(GeometryError::Singular);
        }
        Ok(space)
    }

    /// `V = GF(q^{2n})` over `GF(q²)` with a trace form.
    pub fn trace(n: usize, q: u64, kind: TraceForm) -> Result<HermitianSpace, GeometryError> {
        let (p, s) = split_q(q)?;
        if kind == TraceForm::Hermitian && n % 2 == 0 {
            return Err(GeometryError::EvenTraceDimension(n));
        }
        let base = Field::new(p, 2 * s)?;
        let ext = Field::new(p, 2 * s * n as u32)?;
        let basis = RelativeBasis::new(&base, &ext)?;
        let conj_frobenius = match kind {
            TraceForm::Literal => s,
            TraceForm::Hermitian => s * n as u32,
        };
        let space = HermitianSpace { n, q, s, base, model: Model::Trace { ext, basis, conj_frobenius, kind } };
        if !space.is_nonsingular() {
            return Err(GeometryError::Singular);
        }
        Ok(space)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn trace_kind(&self) -> Option<TraceForm> {
        match &self.model {
            Model::Trace { kind, .. } => Some(*kind),
            Model::Gram { .. } => None,
        }
    }

    /// The extension field and coordinate basis of a trace model.
    pub fn trace_parts(&self) -> Option<(&Field, &RelativeBasis)> {
        match &self.model {
            Model::Trace { ext, basis, .. } => Some((ext, basis)),
            Model::Gram { .. } => None,
        }
    }

    /// `x ↦ x^q` on `GF(q²)`.
    pub fn conj(&self, x: Elem) -> Elem {
        self.base.frobenius(x, self.s)
    }

    pub fn form_eval(&self, u: &[Elem], v: &[Elem]) -> Result<Elem, GeometryError> {
        for w in [u, v] {
            if w.len() != self.n {
                return Err(GeometryError::DimensionMismatch { expected: self.n, got: w.len() });
            }
        }
        Ok(self.eval(u, v))
    }

    pub(crate) fn eval(&self, u: &[Elem], v: &[Elem]) -> Elem {
        let f = &self.base;
        match &self.model {
            Model::Gram { gram } => {
                let mut acc = Elem::ZERO;
                for (i, &ui) in u.iter().enumerate() {
                    if ui.is_zero() {
                        continue;
                    }
                    for (j, &vj) in v.iter().enumerate() {
                        let g = gram.get(i, j);
                        if !g.is_zero() && !vj.is_zero() {
                            acc = f.add(acc, f.mul(ui, f.mul(g, self.conj(vj))));
                        }
                    }
                }
                acc
            }
            Model::Trace { ext, basis, conj_frobenius, .. } => {
                let x = basis.from_coords(u);
                let y = basis.from_coords(v);
                let z = ext.mul(x, ext.frobenius(y, *conj_frobenius));
                let t = ext.trace_rel(z, 2 * self.s).expect("degree divides");
                basis.embedding().section(t).expect("trace lies in GF(q^2)")
            }
        }
    }

    /// `Jᵢⱼ = f(eᵢ, eⱼ)` in the coordinate basis.
    pub fn gram_matrix(&self) -> Matrix {
        if let Model::Gram { gram } = &self.model {
            return gram.clone();
        }
        let mut j = Matrix::zeros(&self.base, self.n, self.n);
        let e = |i: usize| unit(self.n, i);
        for a in 0..self.n {
            for b in 0..self.n {
                j.set(a, b, self.eval(&e(a), &e(b)));
            }
        }
        j
    }

    /// The same form as a Gram model; isometric to `self` via the identity on coordinates.
    pub fn gram_model(&self) -> Result<HermitianSpace, GeometryError> {
        HermitianSpace::from_gram(self.q, self.gram_matrix())
    }

    pub fn is_conjugate_symmetric(&self) -> bool {
        let j = self.gram_matrix();
        (0..self.n).all(|a| (0..self.n).all(|b| j.get(b, a) == self.conj(j.get(a, b))))
    }

    pub fn is_nonsingular(&self) -> bool {
        !self.gram_matrix().det().is_zero()
    }

    pub fn is_isotropic(&self, v: &[Elem]) -> bool {
        self.eval(v, v).is_zero()
    }

    /// Whether `m` preserves the form (acting on column vectors).
    pub fn is_isometry(&self, m: &Matrix) -> bool {
        if m.rows() != self.n || m.cols() != self.n {
            return false;
        }
        let j = self.gram_matrix();
        let lhs = m.transpose().mul(&j).mul(&m.map(|x| self.conj(x)));
        lhs == j
    }
}

fn unit(n: usize, i: usize) -> Vector {
    let mut v = vec![Elem::ZERO; n];
    v[i] = Elem::ONE;
    v
}

/// Pack a coordinate vector into an integer key.
pub(crate) fn pack(v: &[Elem], field_order: u64) -> u64 {
    v.iter().rev().fold(0u64, |acc, x| acc * field_order + x.raw() as u64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectivePoint {
    pub coords: Vector,
    pub index: usize,
}

/// An ordered list of points of `P(V)` (or of nonzero vectors) with reverse lookup.
#[derive(Clone)]
pub struct PointSet {
    field: Field,
    n: usize,
    projective: bool,
    points: Vec<ProjectivePoint>,
    lookup: HashMap<u64, usize>,
}

impl PointSet {
    fn from_vectors(field: &Field, n: usize, projective: bool, vectors: Vec<Vector>) -> PointSet {
        let q2 = field.order();
        let mut lookup = HashMap::with_capacity(vectors.len());
        let points: Vec<ProjectivePoint> = vectors
            .into_iter()
            .enumerate()
            .map(|(index, coords)| {
                lookup.insert(pack(&coords, q2), index);
                ProjectivePoint { coords, index }
            })
            .collect();
        PointSet { field: field.clone(), n, projective, points, lookup }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ProjectivePoint] {
        &self.points
    }

    pub fn get(&self, i: usize) -> &ProjectivePoint {
        &self.points[i]
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_projective(&self) -> bool {
        self.projective
    }

    /// Index of the point spanned by `v` (normalized first when projective).
    pub fn index_of(&self, v: &[Elem]) -> Option<usize> {
        if self.projective {
            let w = matrix::normalize(&self.field, v)?;
            self.lookup.get(&pack(&w, self.field.order())).copied()
        } else {
            self.lookup.get(&pack(v, self.field.order())).copied()
        }
    }
}

fn elements_by_log(field: &Field) -> Vec<Elem> {
    let mut els: Vec<Elem> = field.elements().collect();
    els.sort_by_key(|&x| field.log_key(x));
    els
}

fn check_cap(what: &'static str, size: u128, cap: u64) -> Result<(), GeometryError> {
    if size > cap as u128 {
        return Err(GeometryError::CapExceeded { what, size, cap });
    }
    Ok(())
}

/// All points of `P(GF(Q)^n)` as normalized vectors, lexicographic with
/// coordinates compared by discrete log (zero first).
pub fn projective_points(field: &Field, n: usize, cap: u64) -> Result<Vec<Vector>, GeometryError> {
    let qq = field.order() as u128;
    check_cap("P(V)", (qq.pow(n as u32) - 1) / (qq - 1), cap)?;
    let sorted = elements_by_log(field);
    let mut out = Vec::new();
    for lead in (0..n).rev() {
        let tail = n - 1 - lead;
        let count = qq.pow(tail as u32) as u64;
        for t in 0..count {
            let mut v = vec![Elem::ZERO; n];
            v[lead] = Elem::ONE;
            let mut r = t;
            for pos in (lead + 1..n).rev() {
                v[pos] = sorted[(r % qq as u64) as usize];
                r /= qq as u64;
            }
            out.push(v);
        }
    }
    Ok(out)
}

/// All vectors of `GF(Q)^n` in the same lexicographic order.
pub fn all_vectors(field: &Field, n: usize, cap: u64) -> Result<Vec<Vector>, GeometryError> {
    let qq = field.order();
    check_cap("V", (qq as u128).pow(n as u32), cap)?;
    let sorted = elements_by_log(field);
    let total = qq.pow(n as u32);
    Ok((0..total)
        .map(|t| {
            let mut v = vec![Elem::ZERO; n];
            let mut r = t;
            for pos in (0..n).rev() {
                v[pos] = sorted[(r % qq) as usize];
                r /= qq;
            }
            v
        })
        .collect())
}

/// Isotropic points of `P(V)` in canonical order.
pub fn isotropic_points(space: &HermitianSpace) -> Result<PointSet, GeometryError> {
    isotropic_points_capped(space, DEFAULT_ENUM_CAP)
}

pub fn isotropic_points_capped(space: &HermitianSpace, cap: u64) -> Result<PointSet, GeometryError> {
    let pts: Vec<Vector> = projective_points(&space.base, space.n, cap)?
        .into_iter()
        .filter(|v| space.is_isotropic(v))
        .collect();
    Ok(PointSet::from_vectors(&space.base, space.n, true, pts))
}

/// Nonzero isotropic vectors in canonical order (a faithful domain for `SU`).
pub fn isotropic_vectors(space: &HermitianSpace, cap: u64) -> Result<PointSet, GeometryError> {
    let vs: Vec<Vector> = all_vectors(&space.base, space.n, cap)?
        .into_iter()
        .filter(|v| v.iter().any(|x| !x.is_zero()) && space.is_isotropic(v))
        .collect();
    Ok(PointSet::from_vectors(&space.base, space.n, false, vs))
}

/// All points of `P(GF(Q)^n)` as a [`PointSet`].
pub fn all_points(field: &Field, n: usize, cap: u64) -> Result<PointSet, GeometryError> {
    Ok(PointSet::from_vectors(field, n, true, projective_points(field, n, cap)?))
}

/// A subspace of `K^ambient` given by a basis.
#[derive(Clone)]
pub struct Subspace {
    field: Field,
    ambient: usize,
    basis: Vec<Vector>,
}

impl Subspace {
    pub fn new(field: &Field, ambient: usize, basis: Vec<Vector>) -> Result<Subspace, GeometryError> {
        if let Some(v) = basis.iter().find(|v| v.len() != ambient) {
            return Err(GeometryError::DimensionMismatch { expected: ambient, got: v.len() });
        }
        if !basis.is_empty() && Matrix::from_rows(field, &basis).rank() != basis.len() {
            return Err(GeometryError::DependentBasis);
        }
        Ok(Subspace { field: field.clone(), ambient, basis })
    }

    pub fn zero(field: &Field, ambient: usize) -> Subspace {
        Subspace { field: field.clone(), ambient, basis: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    /// Reduced row echelon basis; equal subspaces have equal canonical forms.
    pub fn canonical(&self) -> Vec<Vector> {
        if self.basis.is_empty() {
            return Vec::new();
        }
        let r = Matrix::from_rows(&self.field, &self.basis).rref();
        (0..r.rows()).map(|i| r.row(i)).collect()
    }

    /// Every vector of the subspace, zero included.
    pub fn elements(&self) -> Vec<Vector> {
        let f = &self.field;
        let mut out = vec![vec![Elem::ZERO; self.ambient]];
        for b in &self.basis {
            let mut next = Vec::with_capacity(out.len() * f.order() as usize);
            for v in &out {
                for c in f.elements() {
                    next.push(matrix::axpy(f, v, c, b));
                }
            }
            out = next;
        }
        out
    }

    /// Normalized representatives of the points of `P(W)`.
    pub fn points(&self) -> Vec<Vector> {
        let mut pts: Vec<Vector> = self.elements().into_iter().filter_map(|v| matrix::normalize(&self.field, &v)).collect();
        pts.sort();
        pts.dedup();
        pts
    }

    pub fn contains(&self, v: &[Elem]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        Matrix::from_rows(&self.field, &rows).rank() == self.basis.len()
    }

    /// Image under `m` acting on column vectors.
    pub fn apply(&self, m: &Matrix) -> Subspace {
        Subspace { field: self.field.clone(), ambient: self.ambient, basis: self.basis.iter().map(|b| m.mul_vec(b)).collect() }
    }
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.ambient == other.ambient && self.canonical() == other.canonical()
    }
}

impl Eq for Subspace {}

impl std::hash::Hash for Subspace {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ambient.hash(state);
        self.canonical().hash(state);
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .basis
            .iter()
            .map(|v| format!("[{}]", v.iter().map(|&x| self.field.format_elem(x)).collect::<Vec<_>>().join(" ")))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace({self})")
    }
}

pub fn is_totally_isotropic(space: &HermitianSpace, w: &Subspace) -> bool {
    w.basis().iter().all(|a| w.basis().iter().all(|b| space.eval(a, b).is_zero()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpreadKind {
    Partial,
    Full,
}

/// A family of equal-dimension subspaces meant to intersect trivially.
#[derive(Clone, Debug)]
pub struct Spread {
    pub members: Vec<Subspace>,
    pub ambient: usize,
    pub kind: SpreadKind,
}

impl Spread {
    pub fn new(members: Vec<Subspace>, ambient: usize) -> Spread {
        let kind = match members.first() {
            Some(m) => {
                let qd = m.field().order() as u128;
                let w = qd.pow(m.dim() as u32) - 1;
                if members.len() as u128 * w == qd.pow(ambient as u32) - 1 {
                    SpreadKind::Full
                } else {
                    SpreadKind::Partial
                }
            }
            None => SpreadKind::Partial,
        };
        Spread { members, ambient, kind }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpreadReport {
    pub members: usize,
    pub pairwise_ok: bool,
    pub cover_ok: bool,
    /// Whether the projectivized members partition the designated point set.
    pub partition_ok: Option<bool>,
}

impl SpreadReport {
    pub fn all_ok(&self) -> bool {
        self.pairwise_ok && self.cover_ok && self.partition_ok.unwrap_or(true)
    }
}

impl fmt::Display for SpreadReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ok = |b: bool| if b { "OK" } else { "FAIL" };
        writeln!(f, "MEMBERS {}", self.members)?;
        writeln!(f, "PAIRWISE {}", ok(self.pairwise_ok))?;
        write!(f, "COVER {}", ok(self.cover_ok))?;
        if let Some(p) = self.partition_ok {
            write!(f, "\nPARTITION-L {}", ok(p))?;
        }
        Ok(())
    }
}

/// Exhaustive validation: pairwise trivial intersection, cover of `V`, and
/// optionally whether `P(Wᵢ)` partition `designated`.
pub fn spread_validate(spread: &Spread, designated: Option<&PointSet>) -> SpreadReport {
    let Some(first) = spread.members.first() else {
        return SpreadReport { members: 0, pairwise_ok: true, cover_ok: false, partition_ok: designated.map(|d| d.is_empty()) };
    };
    let field = first.field().clone();
    let qd = field.order();
    let mut owner: HashMap<u64, usize> = HashMap::new();
    let mut pairwise_ok = true;
    for (i, m) in spread.members.iter().enumerate() {
        for v in m.elements() {
            if v.iter().all(|x| x.is_zero()) {
                continue;
            }
            match owner.insert(pack(&v, qd), i) {
                Some(j) if j != i => pairwise_ok = false,
                _ => {}
            }
        }
    }
    let cover_ok = owner.len() as u128 == (qd as u128).pow(spread.ambient as u32) - 1;
    let partition_ok = designated.map(|pts| {
        let mut hits = vec![0usize; pts.len()];
        let mut outside = false;
        for m in &spread.members {
            for p in m.points() {
                match pts.index_of(&p) {
                    Some(i) => hits[i] += 1,
                    None => outside = true,
                }
            }
        }
        !outside && hits.iter().all(|&h| h == 1)
    });
    SpreadReport { members: spread.members.len(), pairwise_ok, cover_ok, partition_ok }
}

/// The classical spread of `V = GF(q^{2n})` viewed over `GF(q)`, together
/// with the fields and coordinates used to build it.
#[derive(Clone)]
pub struct ClassicalSpread {
    pub spread: Spread,
    pub field_q: Field,
    pub ext: Field,
    pub coords: RelativeBasis,
    pub n: usize,
    pub q: u64,
}

impl ClassicalSpread {
    /// Matrix over `GF(q)` of multiplication by the primitive element `α`.
    pub fn singer_matrix(&self) -> Matrix {
        let cols: Vec<Vector> =
            self.coords.basis().iter().map(|&b| self.coords.to_coords(self.ext.mul(self.ext.generator(), b))).collect();
        Matrix::from_columns(&self.field_q, &cols)
    }

    /// `W₀ = GF(qⁿ)` as a `GF(q)`-subspace.
    pub fn base_member(&self) -> &Subspace {
        &self.spread.members[0]
    }
}

/// `{ Wᵢ = GF(qⁿ)·α^{i(qⁿ-1)} : 0 <= i <= qⁿ }` for even `q`; for odd `q`
/// that indexing repeats members, so `Wᵢ = GF(qⁿ)·αⁱ` is used instead.
pub fn classical_spread(n: usize, q: u64) -> Result<ClassicalSpread, GeometryError> {
    let (p, s) = split_q(q)?;
    check_cap("GF(q^2n)", (q as u128).pow(2 * n as u32), DEFAULT_ENUM_CAP)?;
    let field_q = Field::new(p, s)?;
    let ext = Field::new(p, 2 * s * n as u32)?;
    let coords = RelativeBasis::new(&field_q, &ext)?;
    let qn = q.pow(n as u32) as i64;
    // GF(q^n)* is generated by α^{q^n + 1}
    let gamma = ext.exp(qn + 1);
    let mut w_basis = Vec::with_capacity(n);
    let mut cur = ext.one();
    for _ in 0..n {
        w_basis.push(cur);
        cur = ext.mul(cur, gamma);
    }
    // α^{qⁿ-1} steps through all cosets of GF(qⁿ)* only when gcd(qⁿ-1, qⁿ+1) = 1
    let step = if q % 2 == 0 { qn - 1 } else { 1 };
    let mut members = Vec::with_capacity(qn as usize + 1);
    for i in 0..=qn {
        let shift = ext.exp(i * step);
        let basis: Vec<Vector> = w_basis.iter().map(|&b| coords.to_coords(ext.mul(b, shift))).collect();
        members.push(Subspace::new(&field_q, 2 * n, basis)?);
    }
    Ok(ClassicalSpread { spread: Spread::new(members, 2 * n), field_q, ext, coords, n, q })
}

/// Basis `e₁…e_m, [w], f₁…f_m` with `f(eᵢ,eⱼ) = f(fᵢ,fⱼ) = 0`, `f(eᵢ,fⱼ) = δᵢⱼ`,
/// and `f(w,w) = 1`, `w ⊥ eᵢ, fᵢ` when present.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperbolicBasis {
    pub e: Vec<Vector>,
    pub f_vecs: Vec<Vector>,
    pub w: Option<Vector>,
}

impl HyperbolicBasis {
    pub fn verify(&self, space: &HermitianSpace) -> bool {
        let m = self.e.len();
        if self.f_vecs.len() != m || 2 * m + self.w.is_some() as usize != space.dim() {
            return false;
        }
        let zero = |a: &Vector, b: &Vector| space.eval(a, b).is_zero();
        for i in 0..m {
            for j in 0..m {
                if !zero(&self.e[i], &self.e[j]) || !zero(&self.f_vecs[i], &self.f_vecs[j]) {
                    return false;
                }
                let expect = if i == j { Elem::ONE } else { Elem::ZERO };
                if space.eval(&self.e[i], &self.f_vecs[j]) != expect {
                    return false;
                }
            }
        }
        if let Some(w) = &self.w {
            if space.eval(w, w) != Elem::ONE {
                return false;
            }
            if self.e.iter().chain(&self.f_vecs).any(|v| !zero(v, w) || !zero(w, v)) {
                return false;
            }
        }
        true
    }

    /// Columns ordered `e₁…e_m, [w], f_m…f₁`, which carry the form to the
    /// anti-diagonal Gram matrix of [`HermitianSpace::standard`].
    pub fn to_matrix(&self, field: &Field) -> Matrix {
        let mut cols: Vec<Vector> = self.e.clone();
        cols.extend(self.w.iter().cloned());
        cols.extend(self.f_vecs.iter().rev().cloned());
        Matrix::from_columns(field, &cols)
    }
}

/// Solve `x^{q+1} = target` in `GF(q²)` by search.
fn norm_preimage(space: &HermitianSpace, target: Elem) -> Option<Elem> {
    let f = &space.base;
    f.elements().find(|&x| f.mul(x, space.conj(x)) == target)
}

fn independent_rows(field: &Field, rows: Vec<Vector>) -> Vec<Vector> {
    if rows.is_empty() {
        return rows;
    }
    let r = Matrix::from_rows(field, &rows).rref();
    (0..r.rows()).map(|i| r.row(i)).collect()
}

fn find_isotropic(space: &HermitianSpace, span: &[Vector]) -> Option<Vector> {
    let f = &space.base;
    if let Some(b) = span.iter().find(|b| space.is_isotropic(b)) {
        return Some(b.clone());
    }
    let d1 = span.first()?;
    let a1 = space.eval(d1, d1);
    let b = span.get(1)?;
    let c = f.div(space.eval(b, d1), a1).ok()?;
    let d2 = matrix::axpy(f, b, f.neg(c), d1);
    let a2 = space.eval(&d2, &d2);
    if a2.is_zero() {
        return Some(d2);
    }
    let target = f.neg(f.div(a1, a2).ok()?);
    let lambda = norm_preimage(space, target)?;
    Some(matrix::axpy(f, d1, lambda, &d2))
}

/// Incremental hyperbolic-pair extraction with a norm-1 completion for odd
/// dimension. The result is re-verified before it is returned.
pub fn hyperbolic_basis(space: &HermitianSpace) -> Result<HyperbolicBasis, GeometryError> {
    if !space.is_conjugate_symmetric() {
        return Err(GeometryError::NotHermitian);
    }
    if !space.is_nonsingular() {
        return Err(GeometryError::Singular);
    }
    let f = &space.base;
    let mut rest: Vec<Vector> = (0..space.n).map(|i| unit(space.n, i)).collect();
    let mut es = Vec::new();
    let mut fs = Vec::new();
    while rest.len() >= 2 {
        let e = find_isotropic(space, &rest).ok_or(GeometryError::Singular)?;
        let u = rest.iter().find(|u| !space.eval(&e, u).is_zero()).ok_or(GeometryError::Singular)?;
        // f(e, λu) = λ^q f(e, u) = 1
        let lambda = space.conj(f.inv(space.eval(&e, u))?);
        let x = matrix::scale(f, lambda, u);
        let target = f.neg(space.eval(&x, &x));
        let mu = f
            .elements()
            .find(|&m| f.add(m, space.conj(m)) == target)
            .ok_or(GeometryError::Singular)?;
        let fv = matrix::axpy(f, &x, mu, &e);
        let projected: Vec<Vector> = rest
            .iter()
            .map(|r| {
                let a = space.eval(r, &fv);
                let b = space.eval(r, &e);
                let t = matrix::axpy(f, r, f.neg(a), &e);
                matrix::axpy(f, &t, f.neg(b), &fv)
            })
            .collect();
        rest = independent_rows(f, projected);
        es.push(e);
        fs.push(fv);
    }
    let w = match rest.first() {
        Some(c) => {
            let a = space.eval(c, c);
            if a.is_zero() {
                return Err(GeometryError::Singular);
            }
            let lambda = norm_preimage(space, f.inv(a)?).ok_or(GeometryError::Singular)?;
            Some(matrix::scale(f, lambda, c))
        }
        None => None,
    };
    let hb = HyperbolicBasis { e: es, f_vecs: fs, w };
    assert!(hb.verify(space), "hyperbolic basis failed re-verification");
    Ok(hb)
}

/// Orthonormal basis (`f(vᵢ, vⱼ) = δᵢⱼ`) of a non-degenerate Hermitian space.
pub fn orthonormal_basis(space: &HermitianSpace) -> Result<Vec<Vector>, GeometryError> {
    if !space.is_conjugate_symmetric() {
        return Err(GeometryError::NotHermitian);
    }
    let f = &space.base;
    let mut rest: Vec<Vector> = (0..space.n).map(|i| unit(space.n, i)).collect();
    let mut out = Vec::new();
    while !rest.is_empty() {
        let v = match rest.iter().find(|b| !space.is_isotropic(b)) {
            Some(b) => b.clone(),
            None => {
                let mut found = None;
                'search: for i in 0..rest.len() {
                    for j in 0..rest.len() {
                        if i == j || space.eval(&rest[i], &rest[j]).is_zero() {
                            continue;
                        }
                        for l in f.elements() {
                            let cand = matrix::axpy(f, &rest[i], l, &rest[j]);
                            if !space.is_isotropic(&cand) {
                                found = Some(cand);
                                break 'search;
                            }
                        }
                    }
                }
                found.ok_or(GeometryError::Singular)?
            }
        };
        let a = space.eval(&v, &v);
        let lambda = norm_preimage(space, f.inv(a)?).ok_or(GeometryError::Singular)?;
        let v = matrix::scale(f, lambda, &v);
        let projected: Vec<Vector> = rest
            .iter()
            .map(|r| {
                let c = space.eval(r, &v);
                matrix::axpy(f, r, f.neg(c), &v)
            })
            .collect();
        rest = independent_rows(f, projected);
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trace_model_value_at_one() {
        let v = HermitianSpace::trace(3, 2, TraceForm::Literal).unwrap();
        let one = unit(3, 0);
        assert_eq!(v.form_eval(&one, &one).unwrap(), v.base().one());
    }

    #[test]
    fn zero_vector_pairs_to_zero() {
        let v = HermitianSpace::standard(3, 3).unwrap();
        let z = vec![Elem::ZERO; 3];
        let g = v.base().generator();
        let u = vec![g, Elem::ONE, g];
        assert!(v.form_eval(&z, &u).unwrap().is_zero());
        assert!(v.form_eval(&u, &z).unwrap().is_zero());
        assert!(matches!(v.form_eval(&u, &u[..2]), Err(GeometryError::DimensionMismatch { .. })));
    }

    #[test]
    fn literal_trace_form_is_not_conjugate_symmetric_beyond_n1() {
        assert!(HermitianSpace::trace(1, 2, TraceForm::Literal).unwrap().is_conjugate_symmetric());
        for (n, q) in [(2, 2), (3, 2), (3, 3)] {
            let v = HermitianSpace::trace(n, q, TraceForm::Literal).unwrap();
            assert!(!v.is_conjugate_symmetric(), "n={n} q={q}");
            assert_eq!(hyperbolic_basis(&v), Err(GeometryError::NotHermitian));
        }
        for (n, q) in [(1, 2), (3, 2), (3, 3), (5, 2)] {
            assert!(HermitianSpace::trace(n, q, TraceForm::Hermitian).unwrap().is_conjugate_symmetric());
        }
        assert!(matches!(HermitianSpace::trace(2, 2, TraceForm::Hermitian), Err(GeometryError::EvenTraceDimension(2))));
    }

    #[test]
    fn gram_bridge_agrees_with_trace_model() {
        let t = HermitianSpace::trace(3, 2, TraceForm::Hermitian).unwrap();
        let g = t.gram_model().unwrap();
        let vs = all_vectors(t.base(), 3, 1 << 12).unwrap();
        for u in vs.iter().step_by(5) {
            for v in vs.iter().step_by(7) {
                assert_eq!(t.eval(u, v), g.eval(u, v));
            }
        }
    }

    #[test]
    fn isotropic_counts_small() {
        let brute = |n: usize, q: u64| {
            let s = HermitianSpace::standard(n, q).unwrap();
            // count isotropic nonzero vectors, divide by |GF(q^2)*|
            let vs = all_vectors(s.base(), n, 1 << 20).unwrap();
            let c = vs.iter().filter(|v| v.iter().any(|x| !x.is_zero()) && s.is_isotropic(v)).count();
            c as u128 / (q as u128 * q as u128 - 1)
        };
        for (n, q) in [(3usize, 2u64), (3, 4), (4, 2), (2, 3)] {
            let s = HermitianSpace::standard(n, q).unwrap();
            let pts = isotropic_points(&s).unwrap();
            assert_eq!(pts.len() as u128, brute(n, q));
            assert_eq!(pts.len() as u128, arith::isotropic_point_count(n as u32, q));
        }
    }

    #[test]
    fn isotropic_points_are_canonically_ordered() {
        let s = HermitianSpace::standard(3, 2).unwrap();
        let pts = isotropic_points(&s).unwrap();
        assert_eq!(pts.len(), 9);
        let f = s.base();
        let keys: Vec<Vec<u64>> = pts.points().iter().map(|p| p.coords.iter().map(|&x| f.log_key(x)).collect()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(pts.points()[0].coords, vec![Elem::ZERO, Elem::ZERO, Elem::ONE]);
        for p in pts.points() {
            assert_eq!(pts.index_of(&matrix::scale(f, f.generator(), &p.coords)), Some(p.index));
        }
    }

    #[test]
    fn n1_has_no_isotropic_points() {
        let s = HermitianSpace::standard(1, 3).unwrap();
        assert!(isotropic_points(&s).unwrap().is_empty());
        let hb = hyperbolic_basis(&s).unwrap();
        assert!(hb.e.is_empty());
        assert!(hb.w.is_some());
    }

    #[test]
    fn hyperbolic_basis_n2_q2_matches_search() {
        let s = HermitianSpace::standard(2, 2).unwrap();
        let hb = hyperbolic_basis(&s).unwrap();
        assert!(hb.verify(&s));
        // brute force: some isotropic pair with f(e, f) = 1 exists
        let vs = all_vectors(s.base(), 2, 64).unwrap();
        let found = vs.iter().any(|e| {
            s.is_isotropic(e) && vs.iter().any(|g| s.is_isotropic(g) && s.eval(e, g) == Elem::ONE)
        });
        assert!(found);
    }

    #[test]
    fn hyperbolic_basis_various() {
        for (n, q) in [(3, 2), (3, 3), (4, 2), (5, 2), (4, 3)] {
            let s = HermitianSpace::standard(n, q).unwrap();
            let hb = hyperbolic_basis(&s).unwrap();
            assert!(hb.verify(&s));
            assert_eq!(hb.w.is_some(), n % 2 == 1);
            let p = hb.to_matrix(s.base());
            let g = s.gram_matrix();
            let conj = p.map(|x| s.conj(x));
            assert_eq!(p.transpose().mul(&g).mul(&conj), g);
        }
        let t = HermitianSpace::trace(3, 4, TraceForm::Hermitian).unwrap();
        assert!(hyperbolic_basis(&t).unwrap().verify(&t));
    }

    #[test]
    fn orthonormal_bases() {
        for (n, q) in [(3, 2), (3, 3), (3, 4)] {
            let s = HermitianSpace::standard(n, q).unwrap();
            let b = orthonormal_basis(&s).unwrap();
            assert_eq!(b.len(), n);
            for i in 0..n {
                for j in 0..n {
                    let expect = if i == j { Elem::ONE } else { Elem::ZERO };
                    assert_eq!(s.eval(&b[i], &b[j]), expect);
                }
            }
        }
    }

    #[test]
    fn totally_isotropic_subspaces() {
        let s = HermitianSpace::standard(4, 2).unwrap();
        let f = s.base();
        assert!(is_totally_isotropic(&s, &Subspace::zero(f, 4)));
        let hb = hyperbolic_basis(&s).unwrap();
        let w = Subspace::new(f, 4, vec![hb.e[0].clone()]).unwrap();
        assert!(is_totally_isotropic(&s, &w));
        let w2 = Subspace::new(f, 4, hb.e.clone()).unwrap();
        assert!(is_totally_isotropic(&s, &w2));
        let bad = Subspace::new(f, 4, vec![hb.e[0].clone(), hb.f_vecs[0].clone()]).unwrap();
        assert!(!is_totally_isotropic(&s, &bad));
    }

    #[test]
    fn subspace_basics() {
        let f = Field::new(2, 1).unwrap();
        let a = vec![Elem::ONE, Elem::ZERO, Elem::ONE];
        let b = vec![Elem::ZERO, Elem::ONE, Elem::ONE];
        let w = Subspace::new(&f, 3, vec![a.clone(), b.clone()]).unwrap();
        assert_eq!(w.elements().len(), 4);
        assert_eq!(w.points().len(), 3);
        assert!(w.contains(&matrix::add(&f, &a, &b)));
        assert!(!w.contains(&[Elem::ONE, Elem::ZERO, Elem::ZERO]));
        let w2 = Subspace::new(&f, 3, vec![b.clone(), matrix::add(&f, &a, &b)]).unwrap();
        assert_eq!(w, w2);
        assert_eq!(Subspace::new(&f, 3, vec![a.clone(), a]).unwrap_err(), GeometryError::DependentBasis);
    }

    #[test]
    fn classical_spreads_validate() {
        for (n, q, members) in [(1usize, 2u64, 3usize), (2, 2, 5), (3, 2, 9), (2, 3, 10)] {
            let cs = classical_spread(n, q).unwrap();
            assert_eq!(cs.spread.members.len(), members);
            assert_eq!(cs.spread.kind, SpreadKind::Full);
            let pts = all_points(&cs.field_q, 2 * n, 1 << 20).unwrap();
            let report = spread_validate(&cs.spread, Some(&pts));
            assert!(report.all_ok(), "{report}");
            assert_eq!(report.to_string(), format!("MEMBERS {members}\nPAIRWISE OK\nCOVER OK\nPARTITION-L OK"));
            // Σ(|Wᵢ| - 1) = |V| - 1
            let w = q.pow(n as u32) - 1;
            assert_eq!(members as u64 * w, q.pow(2 * n as u32) - 1);
        }
    }

    #[test]
    fn duplicated_member_fails_pairwise() {
        let cs = classical_spread(2, 2).unwrap();
        let mut members = cs.spread.members.clone();
        members[1] = members[0].clone();
        let report = spread_validate(&Spread::new(members, 4), None);
        assert!(!report.pairwise_ok);
        assert!(!report.cover_ok);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn sesquilinear_and_conjugate_symmetric(
            sel in 0usize..3,
            raw in proptest::collection::vec(0u32..4096, 10),
        ) {
            let space = match sel {
                0 => HermitianSpace::standard(3, 3).unwrap(),
                1 => HermitianSpace::trace(3, 2, TraceForm::Hermitian).unwrap(),
                _ => HermitianSpace::standard(4, 2).unwrap(),
            };
            let f = space.base().clone();
            let n = space.dim();
            let o = f.order() as u32;
            let el = |i: usize| Elem::from_raw(raw[i] % o);
            let vec_at = |k: usize| (0..n).map(|i| el((k + i) % raw.len())).collect::<Vec<_>>();
            let (u, v, w) = (vec_at(0), vec_at(3), vec_at(6));
            let lambda = el(9);
            let lhs = space.eval(&matrix::axpy(&f, &v, lambda, &u), &w);
            let rhs = f.add(f.mul(lambda, space.eval(&u, &w)), space.eval(&v, &w));
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(space.eval(&u, &v), space.conj(space.eval(&v, &u)));
        }
    }
}
