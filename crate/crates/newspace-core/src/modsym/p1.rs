//! The projective line `P^1(Z/NZ)`.
//!
//! Points are classes of pairs `(c : d)` with `gcd(c, d, N) = 1` under
//! scaling by units of `Z/NZ`. The canonical representative of a class is the
//! lexicographically least pair in its unit orbit, which makes normalization
//! idempotent and constant on orbits. A flat lookup table gives O(1)
//! normalization afterwards, since all callers hammer this in inner loops.

use num_integer::Integer;

use crate::Error;

/// Canonical representative of a point of `P^1(Z/NZ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct P1Point {
    pub c: u32,
    pub d: u32,
}

/// Enumerated `P^1(Z/NZ)` with constant-time class lookup.
#[derive(Clone, Debug)]
pub struct P1Table {
    n: u32,
    points: Vec<P1Point>,
    units: Vec<u32>,
    /// `(c * n + d) -> index + 1`, `0` for pairs that are not points.
    lookup: Vec<u32>,
}

impl P1Table {
    pub fn new(n: u32) -> Self {
        assert!(n >= 1, "level must be positive");
        if n == 1 {
            return P1Table {
                n,
                points: vec![P1Point { c: 0, d: 0 }],
                units: vec![0],
                lookup: vec![1],
            };
        }
        let n64 = n as u64;
        let units: Vec<u32> =
            (1..n).filter(|&u| (u as u64).gcd(&n64) == 1).collect();
        let mut lookup = vec![0u32; (n as usize) * (n as usize)];
        let mut points = Vec::new();
        for c in 0..n {
            for d in 0..n {
                let idx = (c as usize) * (n as usize) + d as usize;
                if lookup[idx] != 0 {
                    continue;
                }
                let g = (c as u64).gcd(&(d as u64)).gcd(&n64);
                if g != 1 {
                    continue;
                }
                // Canonical representative: lexicographic minimum of the orbit.
                let mut best = (c, d);
                for &u in &units {
                    let cu = ((u as u64 * c as u64) % n64) as u32;
                    let du = ((u as u64 * d as u64) % n64) as u32;
                    if (cu, du) < best {
                        best = (cu, du);
                    }
                }
                let point = P1Point { c: best.0, d: best.1 };
                points.push(point);
                let id = points.len() as u32;
                for &u in &units {
                    let cu = ((u as u64 * c as u64) % n64) as u32;
                    let du = ((u as u64 * d as u64) % n64) as u32;
                    lookup[(cu as usize) * (n as usize) + du as usize] = id;
                }
            }
        }
        P1Table { n, points, units, lookup }
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[P1Point] {
        &self.points
    }

    pub fn point(&self, idx: usize) -> P1Point {
        self.points[idx]
    }

    pub fn units(&self) -> &[u32] {
        &self.units
    }

    /// Class index of `(c : d)`, reducing arbitrary integers mod `N` first.
    /// `None` when `gcd(c, d, N) != 1`.
    pub fn index_of(&self, c: i64, d: i64) -> Option<usize> {
        let n = self.n as i64;
        let cr = c.rem_euclid(n) as usize;
        let dr = d.rem_euclid(n) as usize;
        if self.n == 1 {
            return Some(0);
        }
        let id = self.lookup[cr * (self.n as usize) + dr];
        if id == 0 {
            None
        } else {
            Some((id - 1) as usize)
        }
    }

    /// Canonical representative, erroring on non-points.
    pub fn normalize(&self, c: i64, d: i64) -> Result<P1Point, Error> {
        self.index_of(c, d)
            .map(|i| self.points[i])
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "({c} : {d}) is not a point of P^1(Z/{}Z): gcd with the level is not 1",
                    self.n
                ))
            })
    }
}

/// `|P^1(Z/NZ)| = N * prod_{p | N} (1 + 1/p)`, via the prime factorization.
pub fn p1_size(n: u32) -> u64 {
    let mut size = n as u64;
    for (p, _) in factorize(n as u64) {
        size = size / p * (p + 1);
    }
    size
}

/// Prime factorization by trial division, smallest prime first.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p1_sizes_match_formula() {
        for n in 1..=60u32 {
            let t = P1Table::new(n);
            assert_eq!(t.len() as u64, p1_size(n), "level {n}");
        }
        assert_eq!(P1Table::new(4).len(), 6);
        assert_eq!(P1Table::new(1).len(), 1);
    }

    #[test]
    fn normalization_is_constant_on_unit_orbits() {
        let t = P1Table::new(15);
        // 2 is a unit mod 15.
        for c in 0..15i64 {
            for d in 0..15i64 {
                if let Some(i) = t.index_of(c, d) {
                    assert_eq!(t.index_of(2 * c, 2 * d), Some(i));
                    // Idempotence of normalization.
                    let p = t.point(i);
                    assert_eq!(t.normalize(p.c as i64, p.d as i64).unwrap(), p);
                }
            }
        }
    }

    #[test]
    fn non_points_are_rejected() {
        let t = P1Table::new(12);
        assert!(t.normalize(2, 4).is_err());
        assert!(t.normalize(0, 3).is_err());
        assert!(t.normalize(1, 0).is_ok());
    }

    #[test]
    fn factorization() {
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(48), vec![(2, 4), (3, 1)]);
        assert!(is_prime(97));
        assert!(!is_prime(91));
        assert!(!is_prime(1));
    }
}
