//! Finite model of `K = GL_2(Z_p)` at level `p^n`.
//!
//! `K_0(p^n)` contains the principal congruence subgroup `1 + p^n M_2(Z_p)`,
//! so functions on `K` that are `K_0(p^n)`-bi-invariant factor through the
//! finite group `GL_2(Z/p^n Z)`. The whole local layer works in that quotient:
//! right cosets of `K_0` are indexed by `P^1(Z/p^n Z)` through the bottom row,
//! and the double coset of a matrix is decided by the valuation of its
//! lower-left entry.

use num_integer::Integer;

use crate::modsym::p1::{is_prime, P1Table};
use crate::Error;

/// Local datum `(p, n)` with `p` prime and `n >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalParams {
    p: u64,
    n: u32,
    modulus: u64,
}

impl LocalParams {
    pub fn new(p: u64, n: u32) -> Result<Self, Error> {
        if !is_prime(p) {
            return Err(Error::InvalidParameter(format!("p must be prime, got {p}")));
        }
        if n < 1 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        let modulus = p.checked_pow(n).ok_or_else(|| {
            Error::SizeBound(format!("p^n overflows for p={p}, n={n}"))
        })?;
        Ok(LocalParams { p, n, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `p^n`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `[K : K_0(p^n)] = p^(n-1) (p + 1)`.
    pub fn index(&self) -> u64 {
        self.p.pow(self.n - 1) * (self.p + 1)
    }

    /// `|GL_2(Z/p^n)| = p^(4n-3) (p-1)^2 (p+1)`.
    pub fn group_order(&self) -> u64 {
        self.p.pow(4 * self.n - 3) * (self.p - 1) * (self.p - 1) * (self.p + 1)
    }

    /// p-adic valuation of `x` as an element of `Z/p^n`, capped at `n`.
    pub fn valuation(&self, x: u64) -> u32 {
        let mut x = x % self.modulus;
        if x == 0 {
            return self.n;
        }
        let mut v = 0;
        while x % self.p == 0 {
            x /= self.p;
            v += 1;
        }
        v
    }
}

/// 2x2 matrix over `Z/p^n Z` with unit determinant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ResidueMatrix {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
    modulus: u64,
}

impl ResidueMatrix {
    pub fn new(params: &LocalParams, a: i64, b: i64, c: i64, d: i64) -> Result<Self, Error> {
        let m = params.modulus() as i64;
        let out = ResidueMatrix {
            a: a.rem_euclid(m) as u64,
            b: b.rem_euclid(m) as u64,
            c: c.rem_euclid(m) as u64,
            d: d.rem_euclid(m) as u64,
            modulus: params.modulus(),
        };
        if !out.has_unit_det(params) {
            return Err(Error::InvalidParameter(format!(
                "matrix [{a},{b};{c},{d}] has non-unit determinant mod {}",
                params.modulus()
            )));
        }
        Ok(out)
    }

    pub fn identity(params: &LocalParams) -> Self {
        ResidueMatrix { a: 1, b: 0, c: 0, d: 1, modulus: params.modulus() }
    }

    /// Upper unipotent `x(t) = [1, t; 0, 1]`.
    pub fn upper(params: &LocalParams, t: i64) -> Self {
        Self::new(params, 1, t, 0, 1).expect("unipotent is invertible")
    }

    /// Lower unipotent `y(t) = [1, 0; t, 1]`.
    pub fn lower(params: &LocalParams, t: i64) -> Self {
        Self::new(params, 1, 0, t, 1).expect("unipotent is invertible")
    }

    /// Antidiagonal `w(t) = [0, -1; t, 0]`; needs `t` a unit.
    pub fn anti(params: &LocalParams, t: i64) -> Result<Self, Error> {
        Self::new(params, 0, -1, t, 0)
    }

    /// Diagonal `d(t) = [t, 0; 0, 1]`; needs `t` a unit.
    pub fn diag(params: &LocalParams, t: i64) -> Result<Self, Error> {
        Self::new(params, t, 0, 0, 1)
    }

    /// Central `z(t) = [t, 0; 0, t]`; needs `t` a unit.
    pub fn central(params: &LocalParams, t: i64) -> Result<Self, Error> {
        Self::new(params, t, 0, 0, t)
    }

    pub fn det(&self) -> u64 {
        let m = self.modulus;
        let ad = self.a * self.d % m;
        let bc = self.b * self.c % m;
        (ad + m - bc) % m
    }

    pub fn has_unit_det(&self, params: &LocalParams) -> bool {
        self.det() % params.p() != 0
    }

    pub fn mul(&self, other: &ResidueMatrix) -> ResidueMatrix {
        debug_assert_eq!(self.modulus, other.modulus);
        let m = self.modulus;
        ResidueMatrix {
            a: (self.a * other.a + self.b * other.c) % m,
            b: (self.a * other.b + self.b * other.d) % m,
            c: (self.c * other.a + self.d * other.c) % m,
            d: (self.c * other.b + self.d * other.d) % m,
            modulus: m,
        }
    }

    pub fn inverse(&self, params: &LocalParams) -> ResidueMatrix {
        let m = self.modulus;
        let det_inv = mod_inverse(self.det(), m, params);
        ResidueMatrix {
            a: self.d * det_inv % m,
            b: (m - self.b % m) % m * det_inv % m,
            c: (m - self.c % m) % m * det_inv % m,
            d: self.a * det_inv % m,
            modulus: m,
        }
    }

    /// Membership in the image of `K_0(p^m)` for `m <= n`.
    pub fn in_k0(&self, params: &LocalParams, m: u32) -> bool {
        debug_assert!(m <= params.n());
        self.c % params.p().pow(m) == 0
    }
}

/// Inverse of a unit mod `p^n` by Fermat-Euler exponentiation.
fn mod_inverse(x: u64, modulus: u64, params: &LocalParams) -> u64 {
    debug_assert_eq!(x.gcd(&params.p()), 1, "inverse of a non-unit");
    // phi(p^n) = p^(n-1) (p-1)
    let phi = params.p().pow(params.n() - 1) * (params.p() - 1);
    mod_pow(x, phi - 1, modulus)
}

fn mod_pow(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc
}

/// Double-coset label inside `K_0 \ K / K_0`.
///
/// The classes are represented by `1`, `w(1)` and `y(p^r)` for
/// `1 <= r <= n-1`; they biject with the basis of the finite Hecke algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DoubleCoset {
    /// `K_0` itself (the identity class).
    Id,
    /// Class of the Weyl element `w(1)`.
    W0,
    /// Class of `y(p^r)`, `1 <= r <= n-1`.
    V(u32),
}

impl DoubleCoset {
    /// Basis position in the fixed order `(X_1, U_0, V_1, ..., V_{n-1})`.
    pub fn basis_index(&self) -> usize {
        match self {
            DoubleCoset::Id => 0,
            DoubleCoset::W0 => 1,
            DoubleCoset::V(r) => 1 + *r as usize,
        }
    }

    pub fn from_basis_index(i: usize) -> DoubleCoset {
        match i {
            0 => DoubleCoset::Id,
            1 => DoubleCoset::W0,
            r => DoubleCoset::V((r - 1) as u32),
        }
    }

    pub fn label(&self) -> String {
        match self {
            DoubleCoset::Id => "X_1".into(),
            DoubleCoset::W0 => "U_0".into(),
            DoubleCoset::V(r) => format!("V_{r}"),
        }
    }
}

/// Default ceiling for the coset index `p^(n-1)(p+1)`.
pub const DEFAULT_INDEX_BOUND: u64 = 1000;

/// Enumerated coset geometry of `K_0(p^n)` inside `K`.
#[derive(Clone, Debug)]
pub struct CosetModel {
    params: LocalParams,
    p1: P1Table,
    right_cosets: Vec<ResidueMatrix>,
    left_cosets: Vec<ResidueMatrix>,
    labels: Vec<DoubleCoset>,
    /// For each basis class, left-coset representatives of its double coset.
    class_left_reps: Vec<Vec<ResidueMatrix>>,
    /// One representative per double coset (the canonical `1, w(1), y(p^r)`).
    class_reps: Vec<ResidueMatrix>,
}

impl CosetModel {
    pub fn build(params: LocalParams) -> Result<Self, Error> {
        Self::build_with_bound(params, DEFAULT_INDEX_BOUND)
    }

    pub fn build_with_bound(params: LocalParams, bound: u64) -> Result<Self, Error> {
        if params.index() > bound {
            return Err(Error::SizeBound(format!(
                "coset index p^(n-1)(p+1) = {} exceeds the bound {bound}",
                params.index()
            )));
        }
        let p1 = P1Table::new(params.modulus() as u32);
        assert_eq!(p1.len() as u64, params.index());

        // Right cosets K_0 \ K: one matrix per bottom-row class.
        let mut right_cosets = Vec::with_capacity(p1.len());
        let mut labels = Vec::with_capacity(p1.len());
        for i in 0..p1.len() {
            let pt = p1.point(i);
            let g = complete_bottom_row(&params, pt.c as i64, pt.d as i64)?;
            labels.push(classify(&params, &g));
            right_cosets.push(g);
        }
        // Left cosets K / K_0 via inversion of the right representatives.
        let left_cosets: Vec<ResidueMatrix> =
            right_cosets.iter().map(|g| g.inverse(&params)).collect();

        let n = params.n();
        let p = params.p() as i64;
        let mut class_left_reps = Vec::new();
        let mut class_reps = Vec::new();
        for idx in 0..(n as usize + 1) {
            let class = DoubleCoset::from_basis_index(idx);
            let (rep, reps) = match class {
                DoubleCoset::Id => {
                    (ResidueMatrix::identity(&params), vec![ResidueMatrix::identity(&params)])
                }
                DoubleCoset::W0 => {
                    // K_0 w(1) K_0 = union over s mod p^n of x(s) w(1) K_0.
                    let w = ResidueMatrix::anti(&params, 1)?;
                    let reps = (0..params.modulus())
                        .map(|s| ResidueMatrix::upper(&params, s as i64).mul(&w))
                        .collect();
                    (w, reps)
                }
                DoubleCoset::V(r) => {
                    // K_0 y(p^r) K_0 = union over units s of (Z/p^(n-r)) of
                    // d(s) y(p^r) K_0.
                    let y = ResidueMatrix::lower(&params, p.pow(r));
                    let mut reps = Vec::new();
                    let q = params.p().pow(n - r);
                    for s in 1..q {
                        if s % params.p() != 0 {
                            reps.push(ResidueMatrix::diag(&params, s as i64)?.mul(&y));
                        }
                    }
                    (y, reps)
                }
            };
            for g in &reps {
                debug_assert_eq!(classify(&params, g), class);
            }
            class_left_reps.push(reps);
            class_reps.push(rep);
        }

        let model = CosetModel {
            params,
            p1,
            right_cosets,
            left_cosets,
            labels,
            class_left_reps,
            class_reps,
        };
        model.check_class_sizes()?;
        Ok(model)
    }

    /// Double-coset class sizes, measured in right cosets, must add up to the
    /// index, with the `y(p^r)` class of size `(p-1) p^(n-r-1)`.
    fn check_class_sizes(&self) -> Result<(), Error> {
        let p = self.params.p();
        let n = self.params.n();
        let mut counts = vec![0u64; n as usize + 1];
        for l in &self.labels {
            counts[l.basis_index()] += 1;
        }
        if counts.iter().sum::<u64>() != self.params.index() {
            return Err(Error::InvalidParameter("double-coset sizes do not sum to the index".into()));
        }
        if counts[0] != 1 {
            return Err(Error::InvalidParameter("identity class must be a single coset".into()));
        }
        for r in 1..n {
            let expected = (p - 1) * p.pow(n - r - 1);
            if counts[1 + r as usize] != expected {
                return Err(Error::InvalidParameter(format!(
                    "class of y(p^{r}) has {} right cosets, expected {expected}",
                    counts[1 + r as usize]
                )));
            }
        }
        Ok(())
    }

    pub fn params(&self) -> &LocalParams {
        &self.params
    }

    pub fn p1(&self) -> &P1Table {
        &self.p1
    }

    pub fn right_cosets(&self) -> &[ResidueMatrix] {
        &self.right_cosets
    }

    pub fn left_cosets(&self) -> &[ResidueMatrix] {
        &self.left_cosets
    }

    pub fn labels(&self) -> &[DoubleCoset] {
        &self.labels
    }

    pub fn num_classes(&self) -> usize {
        self.class_reps.len()
    }

    pub fn class_rep(&self, class: DoubleCoset) -> &ResidueMatrix {
        &self.class_reps[class.basis_index()]
    }

    pub fn class_left_reps(&self, class: DoubleCoset) -> &[ResidueMatrix] {
        &self.class_left_reps[class.basis_index()]
    }

    /// Index of the right coset `K_0 g` from the bottom row of `g`.
    pub fn coset_index(&self, g: &ResidueMatrix) -> usize {
        self.p1
            .index_of(g.c as i64, g.d as i64)
            .expect("bottom row of an invertible matrix is primitive")
    }

    pub fn classify(&self, g: &ResidueMatrix) -> DoubleCoset {
        classify(&self.params, g)
    }
}

/// Decide the double coset of `g` from the valuation of its lower-left entry.
pub fn classify(params: &LocalParams, g: &ResidueMatrix) -> DoubleCoset {
    let v = params.valuation(g.c);
    if v == params.n() {
        DoubleCoset::Id
    } else if v == 0 {
        DoubleCoset::W0
    } else {
        DoubleCoset::V(v)
    }
}

/// Complete a primitive bottom row `(c, d)` to a matrix in `GL_2(Z/p^n)`.
fn complete_bottom_row(params: &LocalParams, c: i64, d: i64) -> Result<ResidueMatrix, Error> {
    let m = params.modulus() as i64;
    let p = params.p() as i64;
    let (cr, dr) = (c.rem_euclid(m), d.rem_euclid(m));
    // One of c, d must be a unit for the row to be primitive.
    if dr % p != 0 {
        // [1, 0; c, d] has det d.
        ResidueMatrix::new(params, 1, 0, cr, dr)
    } else if cr % p != 0 {
        // [0, -1; c, d] has det c.
        ResidueMatrix::new(params, 0, -1, cr, dr)
    } else {
        Err(Error::InvalidParameter(format!(
            "({c}, {d}) is not a primitive row mod {}",
            params.modulus()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(LocalParams::new(4, 1).is_err());
        assert!(LocalParams::new(2, 0).is_err());
        let p = LocalParams::new(3, 2).unwrap();
        assert_eq!(p.modulus(), 9);
        assert_eq!(p.index(), 12);
        assert_eq!(LocalParams::new(2, 2).unwrap().group_order(), 96);
    }

    #[test]
    fn coset_counts_and_classes() {
        // (2, 2): 6 cosets, 3 double cosets.
        let m22 = CosetModel::build(LocalParams::new(2, 2).unwrap()).unwrap();
        assert_eq!(m22.right_cosets().len(), 6);
        assert_eq!(m22.num_classes(), 3);
        // (3, 2): 12 cosets, 3 double cosets.
        let m32 = CosetModel::build(LocalParams::new(3, 2).unwrap()).unwrap();
        assert_eq!(m32.right_cosets().len(), 12);
        assert_eq!(m32.num_classes(), 3);
        // (2, 1): 3 cosets, 2 double cosets.
        let m21 = CosetModel::build(LocalParams::new(2, 1).unwrap()).unwrap();
        assert_eq!(m21.right_cosets().len(), 3);
        assert_eq!(m21.num_classes(), 2);
    }

    #[test]
    fn bound_guard() {
        let p = LocalParams::new(2, 2).unwrap();
        assert!(matches!(CosetModel::build_with_bound(p, 5), Err(Error::SizeBound(_))));
    }

    #[test]
    fn classification_matches_valuation() {
        let params = LocalParams::new(2, 3).unwrap();
        let model = CosetModel::build(params).unwrap();
        let w = ResidueMatrix::anti(&params, 1).unwrap();
        assert_eq!(model.classify(&w), DoubleCoset::W0);
        let y2 = ResidueMatrix::lower(&params, 4);
        assert_eq!(model.classify(&y2), DoubleCoset::V(2));
        let id = ResidueMatrix::identity(&params);
        assert_eq!(model.classify(&id), DoubleCoset::Id);
    }

    #[test]
    fn inverse_and_mul_are_consistent() {
        let params = LocalParams::new(3, 2).unwrap();
        let g = ResidueMatrix::new(&params, 2, 5, 3, 4).unwrap();
        let gi = g.inverse(&params);
        assert_eq!(g.mul(&gi), ResidueMatrix::identity(&params));
        assert_eq!(gi.mul(&g), ResidueMatrix::identity(&params));
    }
}
