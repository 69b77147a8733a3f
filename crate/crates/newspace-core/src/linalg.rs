//! Exact dense linear algebra over arbitrary-precision rationals.
//!
//! Everything downstream (coset models, modular symbols, eigenspace
//! certification) reduces to row reduction, kernels and subspace arithmetic
//! over `Q`. All arithmetic here is exact; there is no floating point in this
//! crate. Matrices are dense: the spaces we handle stay well below a thousand
//! dimensions, where dense rational elimination is entirely adequate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::Error;

/// Exact rational scalar used throughout the crate.
///
/// `BigRational` keeps the numerator and denominator reduced with a positive
/// denominator, which is exactly the invariant the code relies on for
/// canonical comparisons.
pub type Rational = BigRational;

/// Rational from an integer.
pub fn rat_int<T: Into<BigInt>>(v: T) -> Rational {
    Rational::from_integer(v.into())
}

/// Rational `num/den`.
pub fn rat_frac<T: Into<BigInt>, U: Into<BigInt>>(num: T, den: U) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Dense matrix over the rationals, row major.
#[derive(Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl std::fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "QMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        for row in &rows {
            assert_eq!(row.len(), c, "ragged rows");
        }
        QMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Self {
        QMatrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&v| rat_int(v)).collect()).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vec(&self, r: usize) -> Vec<Rational> {
        self.row(r).to_vec()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let cur = out.get(r, c).clone();
                        out.set(r, c, cur + a * b);
                    }
                }
            }
        }
        out
    }

    /// Matrix-vector product (vector as column).
    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|r| {
                let mut acc = Rational::zero();
                for c in 0..self.cols {
                    let a = self.get(r, c);
                    if !a.is_zero() && !v[c].is_zero() {
                        acc += a * &v[c];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries =
            self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        QMatrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn sub(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries =
            self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        QMatrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn scale(&self, s: &Rational) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * s).collect(),
        }
    }

    /// `self - lambda * I`.
    pub fn sub_scalar_diag(&self, lambda: &Rational) -> QMatrix {
        assert_eq!(self.rows, self.cols, "sub_scalar_diag requires a square matrix");
        let mut out = self.clone();
        for i in 0..self.rows {
            let v = out.get(i, i) - lambda;
            out.set(i, i, v);
        }
        out
    }

    pub fn stack_vertical(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.cols);
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        QMatrix { rows: self.rows + other.rows, cols: self.cols, entries }
    }

    pub fn trace(&self) -> Rational {
        assert_eq!(self.rows, self.cols);
        let mut t = Rational::zero();
        for i in 0..self.rows {
            t += self.get(i, i);
        }
        t
    }

    pub fn pow(&self, e: u32) -> QMatrix {
        assert_eq!(self.rows, self.cols);
        let mut acc = QMatrix::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Reduced row echelon form together with the pivot column indices.
    ///
    /// Row space is preserved; pivots are 1 with zeros elsewhere in their
    /// column, and pivot columns increase strictly down the rows.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pivot_row = 0usize;
        for col in 0..m.cols {
            if pivot_row >= m.rows {
                break;
            }
            // Prefer a pivot with small numerator/denominator to slow growth.
            let mut best: Option<usize> = None;
            for r in pivot_row..m.rows {
                if !m.get(r, col).is_zero() {
                    let better = match best {
                        None => true,
                        Some(b) => complexity(m.get(r, col)) < complexity(m.get(b, col)),
                    };
                    if better {
                        best = Some(r);
                    }
                }
            }
            let Some(r0) = best else { continue };
            m.swap_rows(pivot_row, r0);
            let inv = {
                let p = m.get(pivot_row, col).clone();
                p.recip()
            };
            for c in col..m.cols {
                let v = m.get(pivot_row, c) * &inv;
                m.set(pivot_row, c, v);
            }
            for r in 0..m.rows {
                if r != pivot_row && !m.get(r, col).is_zero() {
                    let f = m.get(r, col).clone();
                    for c in col..m.cols {
                        let v = m.get(r, c) - &f * m.get(pivot_row, c);
                        m.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

fn complexity(r: &Rational) -> u64 {
    r.numer().bits() + r.denom().bits()
}

/// Right null space of `m`: all `v` with `m v = 0`, canonicalized.
pub fn kernel(m: &QMatrix) -> Subspace {
    let (r, pivots) = m.rref();
    let n = m.cols();
    let pivot_set: Vec<bool> = {
        let mut s = vec![false; n];
        for &p in &pivots {
            s[p] = true;
        }
        s
    };
    let mut basis = Vec::new();
    for free in 0..n {
        if pivot_set[free] {
            continue;
        }
        let mut v = vec![Rational::zero(); n];
        v[free] = Rational::one();
        for (row, &p) in pivots.iter().enumerate() {
            // x_p = -sum over free columns of R[row][free] * x_free
            v[p] = -r.get(row, free).clone();
        }
        basis.push(v);
    }
    Subspace::from_rows(n, basis)
}

/// `kernel(op - lambda I)`.
pub fn eigenspace(op: &QMatrix, lambda: &Rational) -> Result<Subspace, Error> {
    if op.rows() != op.cols() {
        return Err(Error::InvalidParameter("eigenspace requires a square matrix".into()));
    }
    Ok(kernel(&op.sub_scalar_diag(lambda)))
}

/// A linear subspace of `Q^ambient`, stored by its reduced row echelon basis.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: QMatrix,
    pivots: Vec<usize>,
}

impl std::fmt::Debug for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Subspace(dim {} in Q^{})", self.dim(), self.ambient)
    }
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: QMatrix::zeros(0, ambient), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: QMatrix::identity(ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// Canonicalize a spanning set into an RREF basis.
    pub fn from_rows(ambient: usize, rows: Vec<Vec<Rational>>) -> Self {
        if rows.is_empty() {
            return Subspace::zero(ambient);
        }
        let m = QMatrix::from_rows(rows);
        assert_eq!(m.cols(), ambient);
        let (r, pivots) = m.rref();
        let mut basis_rows = Vec::with_capacity(pivots.len());
        for i in 0..pivots.len() {
            basis_rows.push(r.row_vec(i));
        }
        Subspace { ambient, basis: QMatrix::from_rows_allow_empty(basis_rows, ambient), pivots }
    }

    pub fn from_matrix_rows(m: &QMatrix) -> Self {
        let rows = (0..m.rows()).map(|r| m.row_vec(r)).collect();
        Subspace::from_rows(m.cols(), rows)
    }

    /// Column span of a matrix (the image of the linear map it represents).
    pub fn from_image(m: &QMatrix) -> Self {
        Subspace::from_matrix_rows(&m.transpose())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &QMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Rational>> {
        (0..self.dim()).map(|i| self.basis.row_vec(i)).collect()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn contains_vector(&self, v: &[Rational]) -> bool {
        self.reduce_vector(v).iter().all(|x| x.is_zero())
    }

    /// Residual of `v` after reducing against the RREF basis.
    pub fn reduce_vector(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.ambient);
        let mut w = v.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            if !w[p].is_zero() {
                let f = w[p].clone();
                for c in 0..self.ambient {
                    let bv = self.basis.get(i, c);
                    if !bv.is_zero() {
                        w[c] = &w[c] - &f * bv;
                    }
                }
            }
        }
        w
    }

    /// Coordinates of `v` in the RREF basis; `None` when `v` is outside.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        if !self.contains_vector(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        assert_eq!(self.ambient, other.ambient);
        (0..other.dim()).all(|i| self.contains_vector(other.basis.row(i)))
    }

    pub fn equal(&self, other: &Subspace) -> bool {
        // RREF bases are canonical, so equality is literal comparison.
        self.ambient == other.ambient && self.basis == other.basis
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient, "ambient dimension mismatch");
        let mut rows = self.basis_vectors();
        rows.extend(other.basis_vectors());
        Subspace::from_rows(self.ambient, rows)
    }

    /// Intersection via the Zassenhaus block construction.
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient, "ambient dimension mismatch");
        let n = self.ambient;
        let a = self.dim();
        let b = other.dim();
        if a == 0 || b == 0 {
            return Subspace::zero(n);
        }
        let mut block = QMatrix::zeros(a + b, 2 * n);
        for i in 0..a {
            for c in 0..n {
                block.set(i, c, self.basis.get(i, c).clone());
                block.set(i, n + c, self.basis.get(i, c).clone());
            }
        }
        for i in 0..b {
            for c in 0..n {
                block.set(a + i, c, other.basis.get(i, c).clone());
            }
        }
        let (r, pivots) = block.rref();
        // Rows whose pivot lies in the right half span the intersection
        // (read off from the right half).
        let mut rows = Vec::new();
        for (i, &p) in pivots.iter().enumerate() {
            if p >= n {
                rows.push(r.row(i)[n..].to_vec());
            }
        }
        Subspace::from_rows(n, rows)
    }

    /// Image of this subspace under the linear map `m` (columns = ambient).
    pub fn image_under(&self, m: &QMatrix) -> Subspace {
        assert_eq!(m.cols(), self.ambient);
        let rows = (0..self.dim()).map(|i| m.mul_vec(self.basis.row(i))).collect();
        Subspace::from_rows(m.rows(), rows)
    }

    /// True when `m` maps this subspace into itself.
    pub fn is_invariant_under(&self, m: &QMatrix) -> bool {
        assert_eq!(m.cols(), self.ambient);
        assert_eq!(m.rows(), self.ambient);
        (0..self.dim()).all(|i| self.contains_vector(&m.mul_vec(self.basis.row(i))))
    }
}

impl QMatrix {
    fn from_rows_allow_empty(rows: Vec<Vec<Rational>>, cols: usize) -> QMatrix {
        if rows.is_empty() {
            QMatrix::zeros(0, cols)
        } else {
            QMatrix::from_rows(rows)
        }
    }
}

/// Matrix of `op` restricted to the invariant subspace `s`, in `s`'s basis.
///
/// Errors with `NotInvariant` when `op` moves a basis vector outside `s`;
/// that always signals a construction or normalization bug upstream.
pub fn restrict_operator(op: &QMatrix, s: &Subspace) -> Result<QMatrix, Error> {
    assert_eq!(op.cols(), s.ambient_dim());
    assert_eq!(op.rows(), s.ambient_dim());
    let k = s.dim();
    let mut out = QMatrix::zeros(k, k);
    for i in 0..k {
        let w = op.mul_vec(s.basis().row(i));
        let coords = s.coordinates(&w).ok_or_else(|| {
            Error::NotInvariant(format!(
                "operator image of basis vector {i} leaves the {k}-dimensional subspace"
            ))
        })?;
        for (j, c) in coords.into_iter().enumerate() {
            out.set(j, i, c);
        }
    }
    Ok(out)
}

/// Kind selector for [`subspace_ops`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubspaceOpKind {
    Intersect,
    Sum,
    Equal,
    Contains,
}

/// Result of [`subspace_ops`].
#[derive(Clone, Debug)]
pub enum SubspaceOpResult {
    Space(Subspace),
    Bool(bool),
}

/// Set-theoretic subspace operations behind one dispatcher.
pub fn subspace_ops(
    a: &Subspace,
    b: &Subspace,
    kind: SubspaceOpKind,
) -> Result<SubspaceOpResult, Error> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::InvalidParameter(format!(
            "ambient dimension mismatch: {} vs {}",
            a.ambient_dim(),
            b.ambient_dim()
        )));
    }
    Ok(match kind {
        SubspaceOpKind::Intersect => SubspaceOpResult::Space(a.intersect(b)),
        SubspaceOpKind::Sum => SubspaceOpResult::Space(a.sum(b)),
        SubspaceOpKind::Equal => SubspaceOpResult::Bool(a.equal(b)),
        SubspaceOpKind::Contains => SubspaceOpResult::Bool(a.contains(b)),
    })
}

/// Serialize a rational as `"num/den"` (den omitted when 1).
pub fn rational_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `"num"` or `"num/den"`.
pub fn rational_from_string(s: &str) -> Result<Rational, Error> {
    let parse_int = |t: &str| -> Result<BigInt, Error> {
        t.parse::<BigInt>()
            .map_err(|_| Error::InvalidParameter(format!("bad rational literal: {s}")))
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(s)?)),
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den.is_zero() || den.is_negative() {
                return Err(Error::InvalidParameter(format!("bad rational literal: {s}")));
            }
            Ok(Rational::new(parse_int(n)?, den))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> QMatrix {
        QMatrix::from_int_rows(rows)
    }

    #[test]
    fn rref_identity_is_identity() {
        let id = QMatrix::identity(2);
        let (r, pivots) = id.rref();
        assert_eq!(r, id);
        assert_eq!(pivots, vec![0, 1]);
    }

    #[test]
    fn rref_rank_one() {
        let a = m(&[vec![2, 4], vec![1, 2]]);
        let (r, pivots) = a.rref();
        assert_eq!(pivots, vec![0]);
        assert_eq!(r.row_vec(0), vec![rat_int(1), rat_int(2)]);
        assert!(r.row(1).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn rref_preserves_row_space() {
        // Fixed "random" 5x5 rational matrix; row spaces compared by mutual
        // containment of the spans.
        let a = QMatrix::from_rows(vec![
            vec![rat_frac(1, 2), rat_int(3), rat_int(-1), rat_int(0), rat_int(2)],
            vec![rat_int(4), rat_frac(-2, 3), rat_int(5), rat_int(1), rat_int(1)],
            vec![rat_int(0), rat_int(7), rat_frac(1, 5), rat_int(-3), rat_int(2)],
            vec![rat_int(9), rat_int(2), rat_int(2), rat_frac(4, 7), rat_int(-1)],
            vec![rat_int(1), rat_int(1), rat_int(1), rat_int(1), rat_int(1)],
        ]);
        let (r, _) = a.rref();
        let sa = Subspace::from_matrix_rows(&a);
        let sr = Subspace::from_matrix_rows(&r);
        assert!(sa.contains(&sr) && sr.contains(&sa));
        // Idempotence.
        let (rr, _) = r.rref();
        assert_eq!(rr, r);
    }

    #[test]
    fn kernel_identity_is_zero() {
        assert_eq!(kernel(&QMatrix::identity(4)).dim(), 0);
    }

    #[test]
    fn kernel_zero_matrix_is_full() {
        let k = kernel(&QMatrix::zeros(3, 3));
        assert_eq!(k.dim(), 3);
        assert!(k.equal(&Subspace::full(3)));
    }

    #[test]
    fn kernel_hyperplane() {
        let k = kernel(&m(&[vec![1, 1, 0]]));
        assert_eq!(k.dim(), 2);
        assert!(k.contains_vector(&[rat_int(1), rat_int(-1), rat_int(0)]));
        assert!(k.contains_vector(&[rat_int(0), rat_int(0), rat_int(1)]));
    }

    #[test]
    fn eigenspace_diagonal() {
        let d = m(&[vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 3]]);
        assert_eq!(eigenspace(&d, &rat_int(2)).unwrap().dim(), 2);
        assert_eq!(eigenspace(&d, &rat_int(5)).unwrap().dim(), 0);
        assert!(eigenspace(&m(&[vec![1, 2, 3]]), &rat_int(1)).is_err());
    }

    #[test]
    fn subspace_ops_basics() {
        let v = Subspace::from_rows(
            3,
            vec![vec![rat_int(1), rat_int(0), rat_int(1)], vec![rat_int(0), rat_int(1), rat_int(2)]],
        );
        assert!(v.intersect(&v).equal(&v));
        assert!(v.intersect(&Subspace::zero(3)).equal(&Subspace::zero(3)));
        match subspace_ops(&v, &Subspace::full(3), SubspaceOpKind::Contains).unwrap() {
            SubspaceOpResult::Bool(b) => assert!(!b),
            _ => panic!(),
        }
        assert!(subspace_ops(&v, &Subspace::zero(4), SubspaceOpKind::Sum).is_err());
    }

    #[test]
    fn restrict_operator_examples() {
        let s = Subspace::from_rows(2, vec![vec![rat_int(1), rat_int(0)]]);
        let id = QMatrix::identity(2);
        assert_eq!(restrict_operator(&id, &s).unwrap(), QMatrix::identity(1));
        let d = m(&[vec![1, 0], vec![0, 2]]);
        assert_eq!(restrict_operator(&d, &s).unwrap(), QMatrix::identity(1));
        // Rotation does not preserve the x-axis.
        let rot = m(&[vec![0, -1], vec![1, 0]]);
        assert!(matches!(restrict_operator(&rot, &s), Err(Error::NotInvariant(_))));
    }

    #[test]
    fn kernel_rank_nullity_and_membership() {
        let a = m(&[vec![1, 2, 3, 4], vec![2, 4, 6, 8], vec![0, 1, 1, 0]]);
        let k = kernel(&a);
        assert_eq!(k.dim() + a.rank(), a.cols());
        for v in k.basis_vectors() {
            assert!(a.mul_vec(&v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn rational_string_round_trip() {
        for s in ["0", "7", "-3", "22/7", "-5/9"] {
            let r = rational_from_string(s).unwrap();
            assert_eq!(rational_to_string(&r), s);
        }
        assert!(rational_from_string("1/0").is_err());
        assert!(rational_from_string("x").is_err());
    }
}
