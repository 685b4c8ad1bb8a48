//! Unitary groups `SUₙ(q)`, `PSUₙ(q)` and the subgroups built from explicit
//! matrices: Singer cycles, tori, `Q(q)`, `K(q)`.

use std::sync::Arc;

use super::{perm_on_points, GroupError, GroupHandle, PermGroup};
use crate::arith;
use crate::geometry::{self, HermitianSpace, PointSet, TraceForm};
use crate::gf::{Elem, Field, RelativeBasis};
use crate::matrix::{Matrix, Vector};

fn check_shape(space: &HermitianSpace, m: &Matrix) -> Result<(), GroupError> {
    if m.rows() != space.dim() || m.cols() != space.dim() || m.field() != space.base() {
        return Err(GroupError::Shape);
    }
    Ok(())
}

/// `m` preserves the form.
pub fn gu_membership(space: &HermitianSpace, m: &Matrix) -> Result<bool, GroupError> {
    check_shape(space, m)?;
    Ok(space.is_isometry(m))
}

/// `m` preserves the form and has determinant 1.
pub fn su_membership(space: &HermitianSpace, m: &Matrix) -> Result<bool, GroupError> {
    Ok(gu_membership(space, m)? && m.det() == Elem::ONE)
}

/// Scalar matrices `λI` in `SUₙ(q)`: `λ^{q+1} = 1` and `λⁿ = 1`.
pub fn center(space: &HermitianSpace) -> Vec<Matrix> {
    let f = space.base();
    f.elements()
        .filter(|&l| !l.is_zero() && f.mul(l, space.conj(l)) == Elem::ONE && f.pow_u(l, space.dim() as u128) == Elem::ONE)
        .map(|l| Matrix::scalar(f, space.dim(), l))
        .collect()
}

fn antidiagonal(f: &Field, n: usize) -> Matrix {
    let mut j = Matrix::zeros(f, n, n);
    for i in 0..n {
        j.set(i, n - 1 - i, Elem::ONE);
    }
    j
}

/// `GF(p)`-basis `1, z, …, z^{k-1}` of the field in its packed encoding.
fn prime_field_basis(f: &Field) -> Vec<Elem> {
    let p = f.characteristic() as u32;
    (0..f.degree()).map(|k| Elem::from_raw(p.pow(k))).collect()
}

/// Root elements of the upper unitriangular subgroup for the anti-diagonal form.
fn positive_root_elements(space: &HermitianSpace) -> Result<Vec<Matrix>, GroupError> {
    let n = space.dim();
    let f = space.base().clone();
    let mut out = Vec::new();
    for i in 0..n / 2 {
        let ip = n - 1 - i;
        // long root: b with b + b^q = 0
        for b in f.elements().filter(|&b| !b.is_zero() && f.add(b, space.conj(b)).is_zero()) {
            let mut m = Matrix::identity(&f, n);
            m.set(i, ip, b);
            out.push(m);
        }
        for j in i + 1..n - 1 - i {
            let jp = n - 1 - j;
            for a in prime_field_basis(&f) {
                let mut found = None;
                'search: for c in f.elements() {
                    for b in f.elements() {
                        let mut m = Matrix::identity(&f, n);
                        m.set(i, j, a);
                        m.set(jp, ip, f.add(m.get(jp, ip), c));
                        m.set(i, ip, f.add(m.get(i, ip), b));
                        if space.is_isometry(&m) {
                            found = Some(m);
                            break 'search;
                        }
                    }
                }
                out.push(found.ok_or_else(|| GroupError::Unsupported(format!("no root element at ({i},{j})")))?);
            }
        }
    }
    Ok(out)
}

/// Generators of `SUₙ(q)` for [`HermitianSpace::standard`]: positive root
/// elements and their conjugates by the anti-diagonal matrix.
pub fn su_generators_standard(n: usize, q: u64) -> Result<(HermitianSpace, Vec<Matrix>), GroupError> {
    let space = HermitianSpace::standard(n, q)?;
    let f = space.base().clone();
    if n == 1 {
        return Ok((space, Vec::new()));
    }
    let j = antidiagonal(&f, n);
    let up = positive_root_elements(&space)?;
    let mut gens = up.clone();
    gens.extend(up.iter().map(|u| j.mul(u).mul(&j)));
    for g in &gens {
        debug_assert!(su_membership(&space, g).unwrap());
    }
    Ok((space, gens))
}

/// Change of basis `P` with `Pᵀ G P̄ = J` (anti-diagonal): columns are a
/// hyperbolic basis of `space`. Matrices move by `M ↦ P M P⁻¹`.
pub fn standard_frame(space: &HermitianSpace) -> Result<(Matrix, Matrix), GroupError> {
    let hb = geometry::hyperbolic_basis(space)?;
    let p = hb.to_matrix(space.base());
    let pi = p.inverse().ok_or(GroupError::Shape)?;
    Ok((p, pi))
}

/// Generators of the special unitary group of any non-degenerate Hermitian space.
pub fn su_generators(space: &HermitianSpace) -> Result<Vec<Matrix>, GroupError> {
    let (_, gens) = su_generators_standard(space.dim(), space.q())?;
    let (p, pi) = standard_frame(space)?;
    Ok(gens.iter().map(|g| p.mul(g).mul(&pi)).collect())
}

/// Check that only scalar matrices fix every point of `domain`, by solving
/// `Mv ∥ v` as a linear system in the entries of `M`.
pub fn only_scalars_fix(domain: &PointSet) -> bool {
    let n = domain.dim();
    let f = domain.field();
    let mut rows: Vec<Vector> = Vec::new();
    for p in domain.points() {
        let v = &p.coords;
        for a in 0..n {
            for b in a + 1..n {
                let mut row = vec![Elem::ZERO; n * n];
                for c in 0..n {
                    row[a * n + c] = f.add(row[a * n + c], f.mul(v[c], v[b]));
                    row[b * n + c] = f.sub(row[b * n + c], f.mul(v[c], v[a]));
                }
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        return n <= 1;
    }
    Matrix::from_rows(f, &rows).rank() == n * n - 1
}

/// Permutation action of `⟨gens⟩` on the isotropic points of `space`; the
/// kernel is the group of scalars, so this realises the projective group.
pub fn projective_rep(space: &HermitianSpace, label: impl Into<String>, gens: &[Matrix]) -> Result<GroupHandle, GroupError> {
    for g in gens {
        if !su_membership(space, g)? {
            return Err(GroupError::NotMember(g.format()));
        }
    }
    let domain = Arc::new(geometry::isotropic_points(space)?);
    if !only_scalars_fix(&domain) {
        return Err(GroupError::NotFaithful);
    }
    let perms = gens.iter().map(|g| perm_on_points(&domain, g)).collect::<Result<Vec<_>, _>>()?;
    let group = PermGroup::new(domain.len(), perms)?.reduced();
    Ok(GroupHandle { label: label.into(), domain: Some(domain), gen_matrices: gens.to_vec(), group })
}

/// `PSUₙ(q)` on its isotropic points, order checked against the formula.
pub fn psu(n: usize, q: u64) -> Result<GroupHandle, GroupError> {
    let (space, gens) = su_generators_standard(n, q)?;
    let h = projective_rep(&space, format!("PSU {n} {q}"), &gens)?;
    let expected = arith::psu_order(n as u32, q);
    if h.order() != expected {
        return Err(GroupError::OrderMismatch { what: format!("PSU_{n}({q})"), expected, got: h.order() });
    }
    Ok(h)
}

/// `SUₙ(q)` acting faithfully on nonzero isotropic vectors.
pub fn su_on_vectors(n: usize, q: u64, cap: u64) -> Result<GroupHandle, GroupError> {
    let (space, gens) = su_generators_standard(n, q)?;
    let domain = Arc::new(geometry::isotropic_vectors(&space, cap)?);
    let perms = gens.iter().map(|g| perm_on_points(&domain, g)).collect::<Result<Vec<_>, _>>()?;
    let group = PermGroup::new(domain.len(), perms)?.reduced();
    Ok(GroupHandle { label: format!("SU {n} {q}"), domain: Some(domain), gen_matrices: gens, group })
}

/// Subgroup of a matrix-built handle generated by matrices.
pub fn matrix_subgroup(g: &GroupHandle, mats: &[Matrix]) -> Result<GroupHandle, GroupError> {
    let perms = mats.iter().map(|m| g.perm_of(m)).collect::<Result<Vec<_>, _>>()?;
    let mut h = g.subgroup(perms)?;
    h.gen_matrices = mats.to_vec();
    Ok(h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SingerTarget {
    /// Singer cycle of `GL_{2n}(q)`, order `q^{2n} - 1`.
    GlCycle,
    /// Cyclic torus of `SUₙ(q)` (n odd), order `(qⁿ+1)/(q+1)`.
    SuTorus,
    /// Its image in `PSUₙ(q)`, order `(qⁿ+1)/(d(q+1))`.
    PsuTorus,
}

#[derive(Clone, Debug)]
pub struct SingerElement {
    pub matrix: Matrix,
    pub order: u128,
    pub target: SingerTarget,
}

/// Matrix over the subfield of multiplication by `x` in `rb`'s basis.
pub fn multiplication_matrix(rb: &RelativeBasis, x: Elem) -> Matrix {
    let sup = rb.embedding().sup();
    let cols: Vec<Vector> = rb.basis().iter().map(|&b| rb.to_coords(sup.mul(x, b))).collect();
    Matrix::from_columns(rb.embedding().sub(), &cols)
}

/// The cyclic torus of order `(qⁿ+1)/(q+1)` in standard coordinates: a
/// norm-one multiplier of `GF(q^{2n})` under the Hermitian trace form,
/// moved to the anti-diagonal form by a hyperbolic basis.
fn su_torus_matrix(n: usize, q: u64) -> Result<(HermitianSpace, Matrix), GroupError> {
    if n % 2 == 0 {
        return Err(GroupError::NeedsOddDimension("cyclic unitary torus", n));
    }
    let t = HermitianSpace::trace(n, q, TraceForm::Hermitian)?;
    let (ext, rb) = t.trace_parts().expect("trace model");
    let qn = (q as i64).pow(n as u32);
    let lambda = ext.exp((qn - 1) * (q as i64 + 1));
    let m_t = multiplication_matrix(rb, lambda);
    let (p, pi) = standard_frame(&t)?;
    let m = pi.mul(&m_t).mul(&p);
    let std = HermitianSpace::standard(n, q)?;
    if !su_membership(&std, &m)? {
        return Err(GroupError::NotMember("torus element".into()));
    }
    Ok((std, m))
}

pub fn singer_subgroup(n: usize, q: u64, target: SingerTarget) -> Result<SingerElement, GroupError> {
    let qq = q as u128;
    let qn = qq.pow(n as u32);
    let (matrix, expected, order) = match target {
        SingerTarget::GlCycle => {
            let (p, s) = arith::prime_power(q).ok_or(GroupError::Geometry(geometry::GeometryError::NotPrimePower(q)))?;
            let fq = Field::new(p, s).map_err(geometry::GeometryError::from)?;
            let ext = Field::new(p, 2 * s * n as u32).map_err(geometry::GeometryError::from)?;
            let rb = RelativeBasis::new(&fq, &ext).map_err(geometry::GeometryError::from)?;
            let m = multiplication_matrix(&rb, ext.generator());
            let e = qn * qn - 1;
            let o = m.order_dividing(e);
            (m, e, o)
        }
        SingerTarget::SuTorus => {
            let (_, m) = su_torus_matrix(n, q)?;
            let e = (qn + 1) / (qq + 1);
            let o = m.order_dividing(e);
            (m, e, o)
        }
        SingerTarget::PsuTorus => {
            let (_, m) = su_torus_matrix(n, q)?;
            let d = arith::unitary_center_order(n as u32, q) as u128;
            let e = (qn + 1) / (qq + 1);
            let o = m.projective_order_dividing(e);
            (m, e / d, o)
        }
    };
    match order {
        Some(o) if o == expected => Ok(SingerElement { matrix, order: o, target }),
        got => Err(GroupError::OrderMismatch { what: format!("{target:?}"), expected, got: got.unwrap_or(0) }),
    }
}

/// `diag(c, det(c)^{q-1}, R c̄^{-T} R)` with `c` a Singer cycle of
/// `GL_{(n-1)/2}(q²)` and `R` the reversal; order `q^{n-1} - 1`.
pub fn babai_torus(n: usize, q: u64) -> Result<Matrix, GroupError> {
    if n % 2 == 0 || n < 3 {
        return Err(GroupError::NeedsOddDimension("block torus", n));
    }
    let m = (n - 1) / 2;
    let space = HermitianSpace::standard(n, q)?;
    let f = space.base().clone();
    let ext = Field::new(f.characteristic(), f.degree() * m as u32).map_err(geometry::GeometryError::from)?;
    let rb = RelativeBasis::new(&f, &ext).map_err(geometry::GeometryError::from)?;
    let c = multiplication_matrix(&rb, ext.generator());
    let det = c.det();
    let mu = f.pow_u(det, q as u128 - 1);
    let r = antidiagonal(&f, m);
    let cbar = c.map(|x| space.conj(x));
    let b = r.mul(&cbar.transpose().inverse().ok_or(GroupError::Shape)?).mul(&r);
    let out = Matrix::direct_sum(&[c, Matrix::scalar(&f, 1, mu), b]);
    if !su_membership(&space, &out)? {
        return Err(GroupError::NotMember("block torus".into()));
    }
    let expected = (q as u128).pow(n as u32 - 1) - 1;
    match out.order_dividing(expected) {
        Some(o) if o == expected => Ok(out),
        got => Err(GroupError::OrderMismatch { what: "block torus".into(), expected, got: got.unwrap_or(0) }),
    }
}

/// `Q(a, b) = [[1, a, b], [0, 1, -a^q], [0, 0, 1]]` when `a^{q+1} + b + b^q = 0`.
pub fn q_matrix(space: &HermitianSpace, a: Elem, b: Elem) -> Option<Matrix> {
    let f = space.base();
    if space.dim() != 3 || !f.add(f.mul(a, space.conj(a)), f.add(b, space.conj(b))).is_zero() {
        return None;
    }
    let mut m = Matrix::identity(f, 3);
    m.set(0, 1, a);
    m.set(0, 2, b);
    m.set(1, 2, f.neg(space.conj(a)));
    Some(m)
}

/// `k_τ = diag(k^q, k^{1-q}, k^{-1})`.
pub fn k_tau(space: &HermitianSpace, k: Elem) -> Option<Matrix> {
    let f = space.base();
    let q = space.q() as i128;
    let d = [f.pow(k, q).ok()?, f.pow(k, 1 - q).ok()?, f.pow(k, -1).ok()?];
    Some(Matrix::diagonal(f, &d))
}

/// The Sylow `p`-subgroup `Q(q)` of `SU₃(q)` and the torus `K(q)` normalising it.
#[derive(Clone)]
pub struct QGroup {
    pub space: HermitianSpace,
    pub q_gens: Vec<Matrix>,
    pub k_tau: Matrix,
}

impl QGroup {
    /// All `q³` matrices `Q(a, b)`.
    pub fn q_elements(&self) -> Vec<Matrix> {
        let f = self.space.base();
        let mut out = Vec::new();
        for a in f.elements() {
            for b in f.elements() {
                if let Some(m) = q_matrix(&self.space, a, b) {
                    out.push(m);
                }
            }
        }
        out
    }
}

pub fn q_group_and_torus(q: u64) -> Result<QGroup, GroupError> {
    let space = HermitianSpace::standard(3, q)?;
    let f = space.base().clone();
    let mut q_gens = Vec::new();
    for a in prime_field_basis(&f) {
        let b = f
            .elements()
            .find(|&b| q_matrix(&space, a, b).is_some())
            .ok_or_else(|| GroupError::Unsupported("Q(a,b) constraint has no solution".into()))?;
        q_gens.push(q_matrix(&space, a, b).unwrap());
    }
    for b in f.elements().filter(|&b| !b.is_zero()) {
        if let Some(m) = q_matrix(&space, Elem::ZERO, b) {
            q_gens.push(m);
        }
    }
    let k_tau = k_tau(&space, f.generator()).expect("generator is nonzero");
    for m in q_gens.iter().chain(std::iter::once(&k_tau)) {
        if !su_membership(&space, m)? {
            return Err(GroupError::NotMember(m.format()));
        }
    }
    Ok(QGroup { space, q_gens, k_tau })
}

/// Generators of the diagonal torus `Z_{q+1}^{n-1}` of `SUₙ(q)` in an
/// orthonormal basis, in standard coordinates.
pub fn diagonal_torus(n: usize, q: u64) -> Result<Vec<Matrix>, GroupError> {
    let space = HermitianSpace::standard(n, q)?;
    let f = space.base().clone();
    let ortho = geometry::orthonormal_basis(&space)?;
    let o = Matrix::from_columns(&f, &ortho);
    let oi = o.inverse().ok_or(GroupError::Shape)?;
    let lambda = f.exp(q as i64 - 1);
    let li = f.inv(lambda).map_err(geometry::GeometryError::from)?;
    let mut gens = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let mut d = vec![Elem::ONE; n];
        d[i] = lambda;
        d[i + 1] = li;
        let m = o.mul(&Matrix::diagonal(&f, &d)).mul(&oi);
        if !su_membership(&space, &m)? {
            return Err(GroupError::NotMember("diagonal torus".into()));
        }
        gens.push(m);
    }
    Ok(gens)
}

/// Stabilizer of a domain point.
pub fn point_stabilizer(g: &GroupHandle, pt: u32) -> Result<GroupHandle, GroupError> {
    let h = g.group.stabilizer(pt)?;
    Ok(GroupHandle { label: g.label.clone(), domain: g.domain.clone(), gen_matrices: Vec::new(), group: h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgrp::DEFAULT_GROUP_CAP;

    #[test]
    fn membership_examples() {
        let s = HermitianSpace::standard(3, 3).unwrap();
        let f = s.base().clone();
        let id = Matrix::identity(&f, 3);
        assert!(gu_membership(&s, &id).unwrap() && su_membership(&s, &id).unwrap());
        // λI with λ^{q+1} = 1
        let l = f.exp(2);
        assert_eq!(f.pow_u(l, 4), Elem::ONE);
        assert!(gu_membership(&s, &Matrix::scalar(&f, 3, l)).unwrap());
        let bad = Matrix::diagonal(&f, &[f.generator(), Elem::ONE, Elem::ONE]);
        assert!(!gu_membership(&s, &bad).unwrap());
        assert_eq!(gu_membership(&s, &Matrix::identity(&f, 2)), Err(GroupError::Shape));
    }

    #[test]
    fn center_orders() {
        for (n, q, d) in [(3, 2, 3), (3, 4, 1), (4, 3, 4), (3, 5, 3)] {
            let s = HermitianSpace::standard(n, q).unwrap();
            assert_eq!(center(&s).len(), d);
            assert_eq!(d as u64, arith::unitary_center_order(n as u32, q));
        }
    }

    #[test]
    fn psu_small_orders_and_transitivity() {
        for (q, pts) in [(2u64, 9usize), (3, 28)] {
            let g = psu(3, q).unwrap();
            assert_eq!(g.degree(), pts);
            assert!(g.group.is_transitive());
            let t = g.group.table(DEFAULT_GROUP_CAP).unwrap();
            assert_eq!(t.len() as u128, arith::psu_order(3, q));
        }
        assert_eq!(psu(4, 2).unwrap().order(), 25920);
    }

    #[test]
    fn identity_generator_gives_identity_permutation() {
        let s = HermitianSpace::standard(3, 2).unwrap();
        let id = Matrix::identity(s.base(), 3);
        let h = projective_rep(&s, "t", std::slice::from_ref(&id)).unwrap();
        assert_eq!(h.degree(), 9);
        assert_eq!(h.order(), 1);
        let bad = Matrix::diagonal(s.base(), &[s.base().generator(), Elem::ONE, Elem::ONE]);
        assert!(matches!(projective_rep(&s, "t", &[bad]), Err(GroupError::NotMember(_))));
    }

    #[test]
    fn generators_on_trace_model() {
        let t = HermitianSpace::trace(3, 2, TraceForm::Hermitian).unwrap();
        let gens = su_generators(&t).unwrap();
        let h = projective_rep(&t, "PSU 3 2", &gens).unwrap();
        assert_eq!(h.order(), 72);
    }

    #[test]
    fn singer_orders() {
        assert_eq!(singer_subgroup(1, 2, SingerTarget::GlCycle).unwrap().order, 3);
        assert_eq!(singer_subgroup(2, 2, SingerTarget::GlCycle).unwrap().order, 15);
        assert_eq!(singer_subgroup(3, 4, SingerTarget::SuTorus).unwrap().order, 13);
        assert_eq!(singer_subgroup(3, 2, SingerTarget::SuTorus).unwrap().order, 3);
        assert_eq!(singer_subgroup(5, 2, SingerTarget::SuTorus).unwrap().order, 11);
        assert_eq!(singer_subgroup(3, 5, SingerTarget::PsuTorus).unwrap().order, 7);
        assert!(singer_subgroup(4, 2, SingerTarget::SuTorus).is_err());
    }

    #[test]
    fn block_torus_orders() {
        let s = HermitianSpace::standard(3, 2).unwrap();
        let b = babai_torus(3, 2).unwrap();
        assert!(su_membership(&s, &b).unwrap());
        assert_eq!(b.order_dividing(3), Some(3));
        assert_eq!(babai_torus(3, 4).unwrap().order_dividing(15), Some(15));
        assert_eq!(babai_torus(5, 2).unwrap().order_dividing(15), Some(15));
        assert!(matches!(babai_torus(4, 2), Err(GroupError::NeedsOddDimension(..))));
    }

    #[test]
    fn q_group_counts() {
        for (q, qk) in [(4u64, 960u128), (3, 216)] {
            let qg = q_group_and_torus(q).unwrap();
            let g = psu(3, q).unwrap();
            let qsub = matrix_subgroup(&g, &qg.q_gens).unwrap();
            assert_eq!(qsub.order(), (q as u128).pow(3));
            assert_eq!(qg.q_elements().len() as u64, q.pow(3));
            let d = arith::unitary_center_order(3, q) as u128;
            let k = matrix_subgroup(&g, std::slice::from_ref(&qg.k_tau)).unwrap();
            assert_eq!(k.order(), (q as u128 * q as u128 - 1) / d);
            let mut both = qg.q_gens.clone();
            both.push(qg.k_tau.clone());
            let qk_group = matrix_subgroup(&g, &both).unwrap();
            assert_eq!(qk_group.order(), qk);
            // it is the stabilizer of ⟨e₁⟩
            let e1 = g.point_index(&[Elem::ONE, Elem::ZERO, Elem::ZERO]).unwrap();
            assert_eq!(point_stabilizer(&g, e1).unwrap().order(), qk);
        }
    }

    #[test]
    fn q_elements_closed_under_products() {
        let qg = q_group_and_torus(3).unwrap();
        let els = qg.q_elements();
        let f = qg.space.base().clone();
        for x in els.iter().step_by(5) {
            for y in els.iter().step_by(7) {
                let z = x.mul(y);
                assert!(q_matrix(&qg.space, z.get(0, 1), z.get(0, 2)).is_some());
                assert_eq!(z.get(1, 2), f.neg(qg.space.conj(z.get(0, 1))));
            }
        }
    }

    #[test]
    fn diagonal_torus_order() {
        let g = psu(3, 3).unwrap();
        let k = matrix_subgroup(&g, &diagonal_torus(3, 3).unwrap()).unwrap();
        assert_eq!(k.order(), 16);
        let g = psu(3, 2).unwrap();
        let k = matrix_subgroup(&g, &diagonal_torus(3, 2).unwrap()).unwrap();
        assert_eq!(k.order(), 3);
    }

    #[test]
    fn faithfulness_check() {
        let s = HermitianSpace::standard(3, 4).unwrap();
        let pts = geometry::isotropic_points(&s).unwrap();
        assert!(only_scalars_fix(&pts));
    }
}
