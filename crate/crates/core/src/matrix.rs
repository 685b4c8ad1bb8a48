//! Dense matrices and vectors over a [`Field`].

use std::fmt;

use crate::arith;
use crate::gf::{Elem, Field};

pub type Vector = Vec<Elem>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix { field: field.clone(), rows, cols, data: vec![Elem::ZERO; rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        Matrix::scalar(field, n, Elem::ONE)
    }

    pub fn scalar(field: &Field, n: usize, s: Elem) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, s);
        }
        m
    }

    pub fn diagonal(field: &Field, d: &[Elem]) -> Matrix {
        let mut m = Matrix::zeros(field, d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    pub fn from_rows(field: &Field, rows: &[Vec<Elem>]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { field: field.clone(), rows: r, cols: c, data: rows.concat() }
    }

    pub fn from_columns(field: &Field, cols: &[Vector]) -> Matrix {
        Matrix::from_rows(field, cols).transpose()
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vector {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = Matrix::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j));
            }
        }
        m
    }

    /// Entrywise map, e.g. a Frobenius twist.
    pub fn map(&self, f: impl Fn(Elem) -> Elem) -> Matrix {
        Matrix { field: self.field.clone(), rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let f = &self.field;
        let mut m = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(m.get(i, j), f.mul(a, other.get(k, j)));
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Elem]) -> Vector {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        let f = &self.field;
        (0..self.rows)
            .map(|i| (0..self.cols).fold(Elem::ZERO, |acc, j| f.add(acc, f.mul(self.get(i, j), v[j]))))
            .collect()
    }

    pub fn pow(&self, mut e: u128) -> Matrix {
        assert!(self.is_square());
        let mut result = Matrix::identity(&self.field, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        result
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == if i == j { Elem::ONE } else { Elem::ZERO }))
    }

    /// `Some(λ)` if this is `λ·I`.
    pub fn scalar_value(&self) -> Option<Elem> {
        if !self.is_square() || self.rows == 0 {
            return None;
        }
        let s = self.get(0, 0);
        let ok = (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == if i == j { s } else { Elem::ZERO }));
        ok.then_some(s)
    }

    fn echelon(&self) -> (Matrix, Vec<usize>, Elem) {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut det = Elem::ONE;
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                det = Elem::ZERO;
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    let (a, b) = (m.get(r, j), m.get(p, j));
                    m.set(r, j, b);
                    m.set(p, j, a);
                }
                det = f.neg(det);
            }
            let pv = m.get(r, c);
            det = f.mul(det, pv);
            let inv = f.inv(pv).expect("nonzero pivot");
            for j in 0..m.cols {
                m.set(r, j, f.mul(m.get(r, j), inv));
            }
            for i in 0..m.rows {
                if i != r {
                    let factor = m.get(i, c);
                    if !factor.is_zero() {
                        for j in 0..m.cols {
                            let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                            m.set(i, j, v);
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        if pivots.len() < self.rows.min(self.cols) {
            det = Elem::ZERO;
        }
        (m, pivots, det)
    }

    /// Reduced row echelon form with zero rows removed.
    pub fn rref(&self) -> Matrix {
        let (m, pivots, _) = self.echelon();
        let rows: Vec<Vector> = (0..pivots.len()).map(|i| m.row(i)).collect();
        if rows.is_empty() {
            return Matrix::zeros(&self.field, 0, self.cols);
        }
        Matrix::from_rows(&self.field, &rows)
    }

    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    pub fn det(&self) -> Elem {
        assert!(self.is_square());
        if self.rows == 0 {
            return Elem::ONE;
        }
        self.echelon().2
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(&self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, Elem::ONE);
        }
        let (m, pivots, _) = aug.echelon();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(&self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, m.get(i, n + j));
            }
        }
        Some(inv)
    }

    /// Block-diagonal sum.
    pub fn direct_sum(blocks: &[Matrix]) -> Matrix {
        let field = blocks[0].field.clone();
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut m = Matrix::zeros(&field, n, n);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.set(off + i, off + j, b.get(i, j));
                }
            }
            off += b.rows;
        }
        m
    }

    /// Multiplicative order, given a known multiple of it.
    pub fn order_dividing(&self, multiple: u128) -> Option<u128> {
        if !self.pow(multiple).is_identity() {
            return None;
        }
        let mut ord = multiple;
        for (r, _) in arith::factorize(multiple) {
            while ord % r == 0 && self.pow(ord / r).is_identity() {
                ord /= r;
            }
        }
        Some(ord)
    }

    /// Order modulo scalar matrices, given a known multiple.
    pub fn projective_order_dividing(&self, multiple: u128) -> Option<u128> {
        self.pow(multiple).scalar_value()?;
        let mut ord = multiple;
        for (r, _) in arith::factorize(multiple) {
            while ord % r == 0 && self.pow(ord / r).scalar_value().is_some() {
                ord /= r;
            }
        }
        Some(ord)
    }

    /// Companion matrix of a monic polynomial given constant term first.
    pub fn companion(field: &Field, poly: &[Elem]) -> Matrix {
        let n = poly.len() - 1;
        let mut m = Matrix::zeros(field, n, n);
        for i in 1..n {
            m.set(i, i - 1, Elem::ONE);
        }
        for i in 0..n {
            m.set(i, n - 1, field.neg(poly[i]));
        }
        m
    }

    pub fn format(&self) -> String {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|&x| self.field.format_elem(x)).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.format())
    }
}

/// Normalize so the first nonzero coordinate is 1; `None` for the zero vector.
pub fn normalize(field: &Field, v: &[Elem]) -> Option<Vector> {
    let lead = *v.iter().find(|x| !x.is_zero())?;
    let inv = field.inv(lead).expect("nonzero");
    Some(v.iter().map(|&x| field.mul(x, inv)).collect())
}

pub fn scale(field: &Field, s: Elem, v: &[Elem]) -> Vector {
    v.iter().map(|&x| field.mul(s, x)).collect()
}

pub fn add(field: &Field, u: &[Elem], v: &[Elem]) -> Vector {
    u.iter().zip(v).map(|(&a, &b)| field.add(a, b)).collect()
}

/// `u + s·v`.
pub fn axpy(field: &Field, u: &[Elem], s: Elem, v: &[Elem]) -> Vector {
    u.iter().zip(v).map(|(&a, &b)| field.add(a, field.mul(s, b))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_det_over_gf9() {
        let f = Field::new(3, 2).unwrap();
        let g = f.generator();
        let m = Matrix::from_rows(&f, &[vec![g, f.one(), f.zero()], vec![f.zero(), g, f.one()], vec![f.one(), f.zero(), g]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        // det = g^3 + 1 by cofactor expansion along the first row
        assert_eq!(m.det(), f.add(f.pow(g, 3).unwrap(), f.one()));
        let singular = Matrix::from_rows(&f, &[vec![g, g], vec![g, g]]);
        assert!(singular.inverse().is_none());
        assert_eq!(singular.det(), f.zero());
        assert_eq!(singular.rank(), 1);
    }

    #[test]
    fn companion_of_primitive_polynomial_has_full_order() {
        let f = Field::new(2, 1).unwrap();
        // x^4 + x + 1 is primitive over GF(2)
        let c = Matrix::companion(&f, &[f.one(), f.one(), f.zero(), f.zero(), f.one()]);
        assert_eq!(c.order_dividing(15), Some(15));
    }

    #[test]
    fn normalization() {
        let f = Field::new(5, 1).unwrap();
        let v = vec![f.zero(), f.from_int(2), f.from_int(3)];
        assert_eq!(normalize(&f, &v).unwrap(), vec![f.zero(), f.one(), f.from_int(4)]);
        assert!(normalize(&f, &[f.zero(), f.zero()]).is_none());
    }
}
