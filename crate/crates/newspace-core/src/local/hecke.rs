//! Exact convolution in the finite Hecke algebra `H(K // K_0(p^n))`.
//!
//! The algebra has the double-coset basis `(X_1, U_0, V_1, ..., V_{n-1})`
//! and every structure constant is a coset count, hence an integer. Two
//! independent evaluation routes are kept side by side: [`convolve`] sums
//! over left-coset representatives of each double coset, while
//! [`brute_force_convolve`] integrates over the whole finite group. Their
//! agreement on all basis pairs is part of the acceptance gate.

use num_integer::Integer;

use super::model::{classify, CosetModel, DoubleCoset, LocalParams, ResidueMatrix};
use crate::Error;

/// Element of `H(K // K_0(p^n))` in the basis `(X_1, U_0, V_1, ..., V_{n-1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeElement {
    coeffs: Vec<i64>,
}

impl HeckeElement {
    pub fn zero(n: u32) -> Self {
        HeckeElement { coeffs: vec![0; n as usize + 1] }
    }

    pub fn basis(n: u32, class: DoubleCoset) -> Self {
        let mut e = Self::zero(n);
        e.coeffs[class.basis_index()] = 1;
        e
    }

    /// The identity `X_1`.
    pub fn one(n: u32) -> Self {
        Self::basis(n, DoubleCoset::Id)
    }

    pub fn u0(n: u32) -> Self {
        Self::basis(n, DoubleCoset::W0)
    }

    pub fn v(n: u32, r: u32) -> Self {
        assert!(r >= 1 && r < n);
        Self::basis(n, DoubleCoset::V(r))
    }

    /// `Y_r = X_1 + sum_{j=r}^{n-1} V_j`, with `Y_n = X_1`.
    pub fn y(n: u32, r: u32) -> Self {
        assert!(r >= 1 && r <= n);
        let mut e = Self::one(n);
        for j in r..n {
            e.coeffs[DoubleCoset::V(j).basis_index()] = 1;
        }
        e
    }

    pub fn from_coeffs(coeffs: Vec<i64>) -> Self {
        HeckeElement { coeffs }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coeff(&self, class: DoubleCoset) -> i64 {
        self.coeffs[class.basis_index()]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &HeckeElement) -> HeckeElement {
        HeckeElement {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &HeckeElement) -> HeckeElement {
        HeckeElement {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: i64) -> HeckeElement {
        HeckeElement { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Render like `2*X_1 + 4*V_1`.
    pub fn display(&self, n: u32) -> String {
        let mut parts = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                let label = DoubleCoset::from_basis_index(i).label();
                parts.push(format!("{c}*{label}"));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            let _ = n;
            parts.join(" + ")
        }
    }
}

/// Convolution via left-coset representatives.
///
/// `(f*g)(h) = sum over left cosets aK_0 of K of f(a) g(a^-1 h)`, evaluated
/// at one representative `h` per double coset; with the Haar normalization
/// `mu(K_0) = 1` this is the exact convolution product.
pub fn convolve(f: &HeckeElement, g: &HeckeElement, model: &CosetModel) -> HeckeElement {
    let params = model.params();
    let n = params.n();
    let mut out = HeckeElement::zero(n);
    for target in 0..model.num_classes() {
        let h = model.class_rep(DoubleCoset::from_basis_index(target));
        let mut acc: i64 = 0;
        for class_idx in 0..model.num_classes() {
            let fc = f.coeffs[class_idx];
            if fc == 0 {
                continue;
            }
            for alpha in model.class_left_reps(DoubleCoset::from_basis_index(class_idx)) {
                let x = alpha.inverse(params).mul(h);
                let gc = g.coeff(classify(params, &x));
                acc += fc * gc;
            }
        }
        out.coeffs[target] = acc;
    }
    out
}

/// Product of two basis classes.
pub fn convolve_basis(a: DoubleCoset, b: DoubleCoset, model: &CosetModel) -> HeckeElement {
    let n = model.params().n();
    convolve(&HeckeElement::basis(n, a), &HeckeElement::basis(n, b), model)
}

/// Default ceiling on `|GL_2(Z/p^n)|` for the brute-force oracle.
pub const DEFAULT_GROUP_BOUND: u64 = 1_000_000;

/// Independent oracle: convolution by full group enumeration.
///
/// `(f*g)(h) = (1/|K_0 mod p^n|) * sum over x in GL_2(Z/p^n) of f(x) g(x^-1 h)`.
/// The divisions must come out exact; a remainder is a structural bug.
pub fn brute_force_convolve(
    f: &HeckeElement,
    g: &HeckeElement,
    params: &LocalParams,
) -> Result<HeckeElement, Error> {
    brute_force_convolve_with_bound(f, g, params, DEFAULT_GROUP_BOUND)
}

pub fn brute_force_convolve_with_bound(
    f: &HeckeElement,
    g: &HeckeElement,
    params: &LocalParams,
    bound: u64,
) -> Result<HeckeElement, Error> {
    if params.group_order() > bound {
        return Err(Error::SizeBound(format!(
            "|GL_2(Z/p^n)| = {} exceeds the enumeration bound {bound}",
            params.group_order()
        )));
    }
    let model = CosetModel::build(*params)?;
    let group = enumerate_group(params);
    debug_assert_eq!(group.len() as u64, params.group_order());
    let k0_order = params.group_order() / params.index();

    let n = params.n();
    let mut out = HeckeElement::zero(n);
    for target in 0..model.num_classes() {
        let h = model.class_rep(DoubleCoset::from_basis_index(target));
        let mut acc: i64 = 0;
        for x in &group {
            let fx = f.coeff(classify(params, x));
            if fx == 0 {
                continue;
            }
            let y = x.inverse(params).mul(h);
            acc += fx * g.coeff(classify(params, &y));
        }
        let (q, r) = acc.div_rem(&(k0_order as i64));
        if r != 0 {
            return Err(Error::NonIntegral(format!(
                "brute-force convolution value {acc} is not divisible by |K_0| = {k0_order}"
            )));
        }
        out.coeffs[target] = q;
    }
    Ok(out)
}

fn enumerate_group(params: &LocalParams) -> Vec<ResidueMatrix> {
    let m = params.modulus();
    let mut out = Vec::with_capacity(params.group_order() as usize);
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    if let Ok(g) =
                        ResidueMatrix::new(params, a as i64, b as i64, c as i64, d as i64)
                    {
                        out.push(g);
                    }
                }
            }
        }
    }
    out
}

/// All pairwise products of the basis classes.
pub fn structure_table(model: &CosetModel) -> Vec<Vec<HeckeElement>> {
    let k = model.num_classes();
    let mut table = Vec::with_capacity(k);
    for i in 0..k {
        let mut row = Vec::with_capacity(k);
        for j in 0..k {
            row.push(convolve_basis(
                DoubleCoset::from_basis_index(i),
                DoubleCoset::from_basis_index(j),
                model,
            ));
        }
        table.push(row);
    }
    table
}

/// Multiply two elements through a precomputed structure table.
pub fn multiply_in_table(
    a: &HeckeElement,
    b: &HeckeElement,
    table: &[Vec<HeckeElement>],
    n: u32,
) -> HeckeElement {
    let mut out = HeckeElement::zero(n);
    for (i, &ca) in a.coeffs().iter().enumerate() {
        if ca == 0 {
            continue;
        }
        for (j, &cb) in b.coeffs().iter().enumerate() {
            if cb == 0 {
                continue;
            }
            out = out.add(&table[i][j].scale(ca * cb));
        }
    }
    out
}
