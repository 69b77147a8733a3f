//! Homogeneous polynomial coefficients of weight-`w` symbols.
//!
//! A weight-`w` symbol carries a homogeneous polynomial of degree `w - 2` in
//! `(X, Y)`. Matrices act by linear substitution; the two variants below are
//! the left action on path symbols and its inverse-free counterpart used in
//! the Manin relations.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::linalg::Rational;

/// Homogeneous polynomial of fixed degree; `coeffs[i]` multiplies `X^i Y^(deg-i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomPoly {
    deg: usize,
    coeffs: Vec<Rational>,
}

impl HomPoly {
    pub fn zero(deg: usize) -> Self {
        HomPoly { deg, coeffs: vec![Rational::zero(); deg + 1] }
    }

    pub fn monomial(deg: usize, x_power: usize) -> Self {
        assert!(x_power <= deg);
        let mut p = Self::zero(deg);
        p.coeffs[x_power] = Rational::one();
        p
    }

    pub fn deg(&self) -> usize {
        self.deg
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// `P(a X + b Y, c X + d Y)`.
    pub fn substitute(&self, a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> HomPoly {
        let deg = self.deg;
        let mut out = HomPoly::zero(deg);
        if deg == 0 {
            out.coeffs[0] = self.coeffs[0].clone();
            return out;
        }
        // Powers of the two linear forms, as coefficient vectors in (X, Y).
        for (i, coef) in self.coeffs.iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            let first = binomial_power(a, b, i);
            let second = binomial_power(c, d, deg - i);
            for (k, fk) in first.iter().enumerate() {
                if fk.is_zero() {
                    continue;
                }
                for (l, sl) in second.iter().enumerate() {
                    if sl.is_zero() {
                        continue;
                    }
                    let x_power = k + l;
                    let term = Rational::from_integer(fk * sl);
                    out.coeffs[x_power] += coef * term;
                }
            }
        }
        out
    }

    /// Left action of a matrix `h` on the polynomial part of a path symbol:
    /// `(h P)(X, Y) = P(d X - b Y, -c X + a Y)` for `h = [a, b; c, d]`.
    pub fn act_left(&self, h: &[BigInt; 4]) -> HomPoly {
        self.substitute(&h[3], &(-&h[1]), &(-&h[2]), &h[0])
    }

    /// Evaluation at an integer point, used by the boundary map.
    pub fn evaluate(&self, x: &BigInt, y: &BigInt) -> Rational {
        let mut acc = Rational::zero();
        let mut xp = vec![BigInt::one()];
        let mut yp = vec![BigInt::one()];
        for i in 1..=self.deg {
            xp.push(&xp[i - 1] * x);
            yp.push(&yp[i - 1] * y);
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc += c * Rational::from_integer(&xp[i] * &yp[self.deg - i]);
            }
        }
        acc
    }

    pub fn scale(&self, s: &Rational) -> HomPoly {
        HomPoly { deg: self.deg, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn add(&self, other: &HomPoly) -> HomPoly {
        assert_eq!(self.deg, other.deg);
        HomPoly {
            deg: self.deg,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Coefficients of `(a X + b Y)^n` in the monomial basis `X^k Y^(n-k)`.
fn binomial_power(a: &BigInt, b: &BigInt, n: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n + 1];
    let mut apow = vec![BigInt::one()];
    let mut bpow = vec![BigInt::one()];
    for i in 1..=n {
        apow.push(&apow[i - 1] * a);
        bpow.push(&bpow[i - 1] * b);
    }
    let mut binom = BigInt::one();
    for k in 0..=n {
        out[k] = &binom * &apow[k] * &bpow[n - k];
        // C(n, k+1) = C(n, k) (n - k) / (k + 1)
        binom = binom * BigInt::from(n - k) / BigInt::from(k + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat_int;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn substitution_expands_binomials() {
        // (X + Y)^2 from X^2 under X -> X + Y.
        let p = HomPoly::monomial(2, 2);
        let q = p.substitute(&bi(1), &bi(1), &bi(0), &bi(1));
        assert_eq!(q.coeffs(), &[rat_int(1), rat_int(2), rat_int(1)]);
    }

    #[test]
    fn identity_substitution_is_identity() {
        let p = HomPoly::monomial(4, 1);
        assert_eq!(p.substitute(&bi(1), &bi(0), &bi(0), &bi(1)), p);
    }

    #[test]
    fn left_action_composes() {
        // (gh) P = g (h P) for a degree-2 polynomial.
        let g = [bi(2), bi(1), bi(3), bi(2)];
        let h = [bi(1), bi(4), bi(0), bi(1)];
        let gh = [
            &g[0] * &h[0] + &g[1] * &h[2],
            &g[0] * &h[1] + &g[1] * &h[3],
            &g[2] * &h[0] + &g[3] * &h[2],
            &g[2] * &h[1] + &g[3] * &h[3],
        ];
        let p = HomPoly::monomial(2, 1);
        assert_eq!(p.act_left(&h).act_left(&g), p.act_left(&gh));
    }

    #[test]
    fn evaluation() {
        // X^2 + 2 X Y at (3, 5): 9 + 30 = 39.
        let p = HomPoly::monomial(2, 2).add(&HomPoly::monomial(2, 1).scale(&rat_int(2)));
        assert_eq!(p.evaluate(&bi(3), &bi(5)), rat_int(39));
    }

    #[test]
    fn degree_zero_is_constant() {
        let p = HomPoly::monomial(0, 0);
        assert_eq!(p.substitute(&bi(7), &bi(1), &bi(2), &bi(9)), p);
        assert_eq!(p.evaluate(&bi(100), &bi(-3)), rat_int(1));
    }
}
