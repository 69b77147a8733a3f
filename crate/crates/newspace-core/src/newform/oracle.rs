//! New-space oracle and the old-space decomposition on cuspidal symbols.
//!
//! The new subspace is computed dually: the intersection over `p | N` of the
//! kernels of both lowering maps to level `N/p`. Its dimension must equal
//! twice the new-form dimension obtained by recursive bookkeeping from the
//! dimension formula — an oracle wholly independent of the symbol machinery.
//! Old summands are images of lower-level new spaces under the transfers
//! `beta_d`; together with the new space they reconstruct the cuspidal space
//! as a direct sum, and that reconstruction is certified by rank.

use std::collections::HashMap;
use std::sync::Arc;

use crate::cache::SpaceCache;
use crate::linalg::{kernel, QMatrix, Subspace};
use crate::modsym::dims::{dim_formula_oracle, divisors, sigma0};
use crate::modsym::ops::{degeneracy_down, degeneracy_up};
use crate::modsym::p1::factorize;
use crate::modsym::ManinSpace;
use crate::Error;

/// `dim S_w^new(Gamma_0(N))` by recursion: the full dimension minus every
/// lower level's new dimension counted with its divisor multiplicity.
pub fn dim_new_oracle(n: u64, w: u32) -> Result<u64, Error> {
    fn rec(n: u64, w: u32, memo: &mut HashMap<u64, i64>) -> Result<i64, Error> {
        if let Some(&v) = memo.get(&n) {
            return Ok(v);
        }
        let mut dim = dim_formula_oracle(n, w)? as i64;
        for m in divisors(n) {
            if m == n {
                continue;
            }
            dim -= sigma0(n / m) as i64 * rec(m, w, memo)?;
        }
        if dim < 0 {
            return Err(Error::InvalidParameter(format!(
                "negative new dimension at level {n}: bookkeeping is inconsistent"
            )));
        }
        memo.insert(n, dim);
        Ok(dim)
    }
    Ok(rec(n, w, &mut HashMap::new())? as u64)
}

/// `beta_d`: cuspidal(M) -> cuspidal(N) through the space cache.
pub fn beta_map(cache: &SpaceCache, w: u32, m: u32, n: u32, d: u32) -> Result<QMatrix, Error> {
    let src = cache.get(m, w)?;
    let tgt = cache.get(n, w)?;
    let mid: Arc<ManinSpace> = if d == 1 { src.clone() } else { cache.get(d * m, w)? };
    degeneracy_up(&src, &mid, &tgt, d)
}

/// `delta_e`: cuspidal(N) -> cuspidal(M) through the space cache.
pub fn delta_map(cache: &SpaceCache, w: u32, n: u32, m: u32, e: u32) -> Result<QMatrix, Error> {
    let src = cache.get(n, w)?;
    let tgt = cache.get(m, w)?;
    degeneracy_down(&src, &tgt, e)
}

/// The new subspace of cuspidal(N): for every prime `p | N`, the kernel of
/// both lowering maps `delta_1, delta_p` to level `N/p`.
pub fn new_symbol_space(cache: &SpaceCache, n: u32, w: u32) -> Result<Subspace, Error> {
    let space = cache.get(n, w)?;
    let mut out = Subspace::full(space.cuspidal_dim());
    for (p, _) in factorize(n as u64) {
        let m = n / p as u32;
        let d1 = delta_map(cache, w, n, m, 1)?;
        let dp = delta_map(cache, w, n, m, p as u32)?;
        out = out.intersect(&kernel(&d1)).intersect(&kernel(&dp));
    }
    Ok(out)
}

/// The old summand `beta_d(new(M))` inside cuspidal(N), for `d M | N`,
/// `M != N`.
pub fn old_summand(cache: &SpaceCache, n: u32, w: u32, m: u32, d: u32) -> Result<Subspace, Error> {
    if m == n || m == 0 || d == 0 || n % (d * m) != 0 {
        return Err(Error::InvalidParameter(format!(
            "old summand needs d M | N with M != N; got (N, M, d) = ({n}, {m}, {d})"
        )));
    }
    let b = beta_map(cache, w, m, n, d)?;
    Ok(new_symbol_space(cache, m, w)?.image_under(&b))
}

/// Full decomposition of cuspidal(N) into the new space and old summands.
pub struct Decomposition {
    pub level: u32,
    pub weight: u32,
    pub new_space: Subspace,
    /// `(M, d, beta_d(new(M)))` over proper divisors `M` and `d | N/M`.
    pub summands: Vec<(u32, u32, Subspace)>,
    pub cuspidal_dim: usize,
}

impl Decomposition {
    /// Sum of all summand dimensions plus the new dimension.
    pub fn total_dim(&self) -> usize {
        self.new_space.dim() + self.summands.iter().map(|(_, _, s)| s.dim()).sum::<usize>()
    }

    /// The sum is direct and fills the cuspidal space.
    pub fn is_direct_and_full(&self) -> bool {
        if self.total_dim() != self.cuspidal_dim {
            return false;
        }
        let mut rows = self.new_space.basis_vectors();
        for (_, _, s) in &self.summands {
            rows.extend(s.basis_vectors());
        }
        Subspace::from_rows(self.cuspidal_dim, rows).dim() == self.cuspidal_dim
    }
}

pub fn decompose(cache: &SpaceCache, n: u32, w: u32) -> Result<Decomposition, Error> {
    let space = cache.get(n, w)?;
    let mut summands = Vec::new();
    for m in divisors(n as u64) {
        let m = m as u32;
        if m == n {
            continue;
        }
        for d in divisors((n / m) as u64) {
            summands.push((m, d as u32, old_summand(cache, n, w, m, d as u32)?));
        }
    }
    Ok(Decomposition {
        level: n,
        weight: w,
        new_space: new_symbol_space(cache, n, w)?,
        summands,
        cuspidal_dim: space.cuspidal_dim(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_dimension_bookkeeping() {
        assert_eq!(dim_new_oracle(11, 2).unwrap(), 1);
        assert_eq!(dim_new_oracle(22, 2).unwrap(), 0);
        assert_eq!(dim_new_oracle(33, 2).unwrap(), 1);
        assert_eq!(dim_new_oracle(1, 2).unwrap(), 0);
        assert_eq!(dim_new_oracle(24, 2).unwrap(), 1);
        assert_eq!(dim_new_oracle(48, 2).unwrap(), 1);
        assert_eq!(dim_new_oracle(66, 2).unwrap(), 3);
    }

    #[test]
    fn new_symbol_spaces_match_oracle() {
        let cache = SpaceCache::in_memory();
        for n in [1u32, 11, 22, 33, 26] {
            let s = new_symbol_space(&cache, n, 2).unwrap();
            assert_eq!(
                s.dim() as u64,
                2 * dim_new_oracle(n as u64, 2).unwrap(),
                "new symbol dimension at level {n}"
            );
        }
    }

    #[test]
    fn old_summands_at_22() {
        let cache = SpaceCache::in_memory();
        let s1 = old_summand(&cache, 22, 2, 11, 1).unwrap();
        let s2 = old_summand(&cache, 22, 2, 11, 2).unwrap();
        assert_eq!(s1.dim(), 2);
        assert_eq!(s2.dim(), 2);
        assert_eq!(s1.sum(&s2).dim(), 4);
        // A level with zero new space contributes a zero summand.
        assert_eq!(old_summand(&cache, 22, 2, 2, 1).unwrap().dim(), 0);
        assert!(old_summand(&cache, 22, 2, 22, 1).is_err());
    }

    #[test]
    fn decomposition_is_direct_at_22_and_33() {
        let cache = SpaceCache::in_memory();
        for n in [22u32, 33] {
            let dec = decompose(&cache, n, 2).unwrap();
            assert!(dec.is_direct_and_full(), "level {n}");
        }
    }
}
