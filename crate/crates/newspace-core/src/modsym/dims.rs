//! Dimension formulas for `S_w(Gamma_0(N))`.
//!
//! Computed from the index, elliptic point counts and cusp count of the
//! modular curve `X_0(N)` — entirely independent of the symbol machinery,
//! which is the point: cuspidal dimensions of the Manin presentation are
//! cross-checked against these numbers.

use num_integer::Integer;

use super::p1::factorize;
use crate::Error;

/// Index `[SL_2(Z) : Gamma_0(N)] = N prod_{p | N} (1 + 1/p)`.
pub fn psi_index(n: u64) -> u64 {
    let mut out = n;
    for (p, _) in factorize(n) {
        out = out / p * (p + 1);
    }
    out
}

/// Number of elliptic points of order 2 on `X_0(N)`.
pub fn nu2(n: u64) -> u64 {
    if n % 4 == 0 {
        return 0;
    }
    let mut out = 1;
    for (p, _) in factorize(n) {
        if p == 2 {
            continue; // 2 || N contributes a factor 1
        }
        out *= match p % 4 {
            1 => 2,
            _ => 0,
        };
    }
    out
}

/// Number of elliptic points of order 3 on `X_0(N)`.
pub fn nu3(n: u64) -> u64 {
    if n % 9 == 0 {
        return 0;
    }
    let mut out = 1;
    for (p, _) in factorize(n) {
        if p == 3 {
            continue; // 3 || N contributes a factor 1
        }
        out *= match p % 3 {
            1 => 2,
            _ => 0,
        };
    }
    out
}

/// Number of cusps of `X_0(N)`: `sum over d | N of phi(gcd(d, N/d))`.
pub fn cusp_count(n: u64) -> u64 {
    divisors(n).iter().map(|&d| euler_phi(d.gcd(&(n / d)))).sum()
}

/// Genus of `X_0(N)`.
pub fn genus(n: u64) -> u64 {
    let mu = psi_index(n);
    // 12 g = 12 + mu - 3 nu2 - 4 nu3 - 6 nu_inf, always a non-negative multiple of 12.
    let twelve_g = 12 + mu as i64 - 3 * nu2(n) as i64 - 4 * nu3(n) as i64 - 6 * cusp_count(n) as i64;
    assert!(twelve_g >= 0 && twelve_g % 12 == 0, "genus formula must be integral");
    (twelve_g / 12) as u64
}

/// `dim S_w(Gamma_0(N))` for even `w >= 2`.
///
/// Weight 2 is the genus; for `w >= 4` the standard valence computation
/// gives `(w-1)(g-1) + (w/2 - 1) nu_inf + floor(w/4) nu2 + floor(w/3) nu3`.
pub fn dim_formula_oracle(n: u64, w: u32) -> Result<u64, Error> {
    if w < 2 || w % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "weight must be even and at least 2, got {w}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("level must be positive".into()));
    }
    if w == 2 {
        return Ok(genus(n));
    }
    let g = genus(n) as i64;
    let w = w as i64;
    let dim = (w - 1) * (g - 1)
        + (w / 2 - 1) * cusp_count(n) as i64
        + (w / 4) * nu2(n) as i64
        + (w / 3) * nu3(n) as i64;
    assert!(dim >= 0);
    Ok(dim as u64)
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let snapshot = out.clone();
        let mut pe = 1;
        for _ in 0..e {
            pe *= p;
            out.extend(snapshot.iter().map(|d| d * pe));
        }
    }
    out.sort_unstable();
    out
}

pub fn euler_phi(n: u64) -> u64 {
    let mut out = n.max(1);
    for (p, _) in factorize(n) {
        out = out / p * (p - 1);
    }
    out
}

/// Number of divisors.
pub fn sigma0(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_genera() {
        assert_eq!(dim_formula_oracle(11, 2).unwrap(), 1);
        assert_eq!(dim_formula_oracle(22, 2).unwrap(), 2);
        assert_eq!(dim_formula_oracle(37, 2).unwrap(), 2);
        assert_eq!(dim_formula_oracle(1, 2).unwrap(), 0);
        assert_eq!(dim_formula_oracle(48, 2).unwrap(), 3);
        assert_eq!(dim_formula_oracle(54, 2).unwrap(), 4);
        assert_eq!(dim_formula_oracle(144, 2).unwrap(), 13);
    }

    #[test]
    fn spot_weight_four() {
        // dim S_4(1) = 0, dim S_4(11) = 2, dim S_12(1) = 1.
        assert_eq!(dim_formula_oracle(1, 4).unwrap(), 0);
        assert_eq!(dim_formula_oracle(11, 4).unwrap(), 2);
        assert_eq!(dim_formula_oracle(1, 12).unwrap(), 1);
        assert_eq!(dim_formula_oracle(5, 4).unwrap(), 1);
    }

    #[test]
    fn invariants_of_small_levels() {
        assert_eq!(psi_index(22), 36);
        assert_eq!(nu2(2), 1);
        assert_eq!(nu3(3), 1);
        assert_eq!(cusp_count(48), 12);
        assert_eq!(cusp_count(4), 3);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(euler_phi(9), 6);
        assert_eq!(sigma0(48), 10);
    }

    #[test]
    fn rejects_bad_weight() {
        assert!(dim_formula_oracle(11, 3).is_err());
        assert!(dim_formula_oracle(11, 0).is_err());
        assert!(dim_formula_oracle(0, 2).is_err());
    }
}
