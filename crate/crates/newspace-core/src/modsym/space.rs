//! Manin presentation of weight-`w` modular symbols for `Gamma_0(N)`.
//!
//! Generators are pairs (monomial `X^i Y^(w-2-i)`, point of `P^1(Z/NZ)`);
//! the quotient by the two- and three-term Manin relations is the full
//! modular symbol space. The boundary map into the cusp classes of
//! `Gamma_0(N)` cuts out the cuspidal subspace, whose dimension is checked
//! against the independent dimension formula by the callers' test suites.

use num_bigint::BigInt;
use num_traits::Zero;

use super::p1::P1Table;
use super::path::{path_pieces, Cusp};
use super::poly::HomPoly;
use crate::linalg::{kernel, QMatrix, Rational, Subspace};
use crate::Error;

/// Presentation of the weight-`w` modular symbols for `Gamma_0(N)` over `Q`.
#[derive(Clone, Debug)]
pub struct ManinSpace {
    level: u32,
    weight: u32,
    p1: P1Table,
    n_mono: usize,
    dim: usize,
    /// Generator index (free column) represented by each quotient basis vector.
    basis_gens: Vec<usize>,
    /// Projection from the free space on generators onto quotient coordinates.
    proj: QMatrix,
    /// An SL_2(Z) lift per `P^1` point, with that bottom row mod `N`.
    lifts: Vec<[i64; 4]>,
    /// Canonical representatives of the `Gamma_0(N)` cusp classes hit by paths.
    cusp_reps: Vec<(i128, i128)>,
    /// Boundary map from quotient coordinates to the cusp classes.
    boundary: QMatrix,
    cuspidal: Subspace,
}

impl ManinSpace {
    /// Build the presentation at level `N >= 1` and even weight `w >= 2`.
    pub fn build(level: u32, weight: u32) -> Result<Self, Error> {
        if weight < 2 || weight % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "weight must be even and at least 2, got {weight}"
            )));
        }
        if level < 1 {
            return Err(Error::InvalidParameter("level must be positive".into()));
        }
        let p1 = P1Table::new(level);
        let n_mono = (weight - 1) as usize;
        let deg = (weight - 2) as usize;
        let n_gens = p1.len() * n_mono;

        // Manin relations: x + x s = 0 and x + x t + x t^2 = 0 with
        // s = [0,-1;1,0], t = [0,-1;1,-1].
        let sigma = [0i64, -1, 1, 0];
        let tau = [0i64, -1, 1, -1];
        let tau2 = [-1i64, 1, -1, 0];
        let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(2 * n_gens);
        for p1_idx in 0..p1.len() {
            for mono in 0..n_mono {
                let mut row = vec![Rational::zero(); n_gens];
                row[p1_idx * n_mono + mono] += Rational::from_integer(1.into());
                add_right_action(&p1, deg, p1_idx, mono, &sigma, &mut row);
                rows.push(row);

                let mut row = vec![Rational::zero(); n_gens];
                row[p1_idx * n_mono + mono] += Rational::from_integer(1.into());
                add_right_action(&p1, deg, p1_idx, mono, &tau, &mut row);
                add_right_action(&p1, deg, p1_idx, mono, &tau2, &mut row);
                rows.push(row);
            }
        }
        let relation_matrix = QMatrix::from_rows(rows);
        let (rref, pivots) = relation_matrix.rref();

        let pivot_set: Vec<bool> = {
            let mut s = vec![false; n_gens];
            for &p in &pivots {
                s[p] = true;
            }
            s
        };
        let basis_gens: Vec<usize> = (0..n_gens).filter(|g| !pivot_set[*g]).collect();
        let dim = basis_gens.len();
        let gen_to_basis: Vec<Option<usize>> = {
            let mut v = vec![None; n_gens];
            for (i, &g) in basis_gens.iter().enumerate() {
                v[g] = Some(i);
            }
            v
        };
        let mut proj = QMatrix::zeros(dim, n_gens);
        for (i, &g) in basis_gens.iter().enumerate() {
            proj.set(i, g, Rational::from_integer(1.into()));
        }
        for (row, &pcol) in pivots.iter().enumerate() {
            for (i, &g) in basis_gens.iter().enumerate() {
                let v = rref.get(row, g);
                if !v.is_zero() {
                    proj.set(i, pcol, -v.clone());
                }
            }
        }

        let lifts: Vec<[i64; 4]> = (0..p1.len())
            .map(|i| {
                let pt = p1.point(i);
                lift_to_sl2(pt.c as i64, pt.d as i64, level as i64)
            })
            .collect::<Result<_, _>>()?;

        let mut space = ManinSpace {
            level,
            weight,
            p1,
            n_mono,
            dim,
            basis_gens,
            proj,
            lifts,
            cusp_reps: Vec::new(),
            boundary: QMatrix::zeros(0, dim),
            cuspidal: Subspace::zero(dim),
        };
        space.compute_boundary();
        let _ = gen_to_basis;
        Ok(space)
    }

    fn compute_boundary(&mut self) {
        let deg = (self.weight - 2) as usize;
        let mut cusp_reps: Vec<(i128, i128)> = Vec::new();
        // (cusp class, coefficient) pairs per basis generator.
        let mut columns: Vec<Vec<(usize, Rational)>> = Vec::with_capacity(self.dim);
        for &gen in &self.basis_gens.clone() {
            let (p1_idx, mono) = (gen / self.n_mono, gen % self.n_mono);
            let g = self.lifts[p1_idx];
            let gb = [
                BigInt::from(g[0]),
                BigInt::from(g[1]),
                BigInt::from(g[2]),
                BigInt::from(g[3]),
            ];
            let poly = HomPoly::monomial(deg, mono).act_left(&gb);
            // Path g{0, oo}: from g(0) = (b, d) to g(oo) = (a, c).
            let mut col = Vec::new();
            for (pair, sign) in [((g[0], g[2]), 1i64), ((g[1], g[3]), -1i64)] {
                let class = cusp_class_index(&mut cusp_reps, self.level, pair.0 as i128, pair.1 as i128);
                let value = poly.evaluate(&BigInt::from(pair.0), &BigInt::from(pair.1))
                    * Rational::from_integer(sign.into());
                col.push((class, value));
            }
            columns.push(col);
        }
        let mut boundary = QMatrix::zeros(cusp_reps.len(), self.dim);
        for (j, col) in columns.iter().enumerate() {
            for (class, value) in col {
                let cur = boundary.get(*class, j).clone();
                boundary.set(*class, j, cur + value);
            }
        }
        self.cusp_reps = cusp_reps;
        self.cuspidal = kernel(&boundary);
        self.boundary = boundary;
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// Half-weight `k = w/2`; the translation scalar of a matrix with
    /// determinant `D` is `D^(1-k)`.
    pub fn half_weight(&self) -> u32 {
        self.weight / 2
    }

    pub fn p1(&self) -> &P1Table {
        &self.p1
    }

    /// Dimension of the full quotient (all modular symbols).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_gens(&self) -> &[usize] {
        &self.basis_gens
    }

    pub fn n_monomials(&self) -> usize {
        self.n_mono
    }

    pub fn boundary(&self) -> &QMatrix {
        &self.boundary
    }

    pub fn cusp_reps(&self) -> &[(i128, i128)] {
        &self.cusp_reps
    }

    pub fn cuspidal(&self) -> &Subspace {
        &self.cuspidal
    }

    pub fn cuspidal_dim(&self) -> usize {
        self.cuspidal.dim()
    }

    pub fn lift(&self, p1_idx: usize) -> [i64; 4] {
        self.lifts[p1_idx]
    }

    /// Quotient coordinates of the Manin generator `(p1_idx, mono)`.
    pub fn gen_coords(&self, p1_idx: usize, mono: usize) -> super::SymbolVector {
        let gen = p1_idx * self.n_mono + mono;
        (0..self.dim).map(|i| self.proj.get(i, gen).clone()).collect()
    }

    /// Quotient coordinates of a path symbol `Q {alpha, beta}`.
    ///
    /// The path is decomposed into unimodular pieces; each piece `g {0, oo}`
    /// is the Manin generator with `g`'s bottom row and the polynomial pulled
    /// back through `g`.
    pub fn path_symbol(&self, poly: &HomPoly, alpha: &Cusp, beta: &Cusp) -> super::SymbolVector {
        assert_eq!(poly.deg(), (self.weight - 2) as usize);
        let mut acc = vec![Rational::zero(); self.dim];
        for (sign, g) in path_pieces(alpha, beta) {
            let idx = self
                .p1
                .index_of(g[2] as i64, g[3] as i64)
                .expect("unimodular bottom row is primitive");
            // g^{-1} Q for det-one g: substitute (a X + b Y, c X + d Y).
            let gb = [BigInt::from(g[0]), BigInt::from(g[1]), BigInt::from(g[2]), BigInt::from(g[3])];
            let pulled = poly.substitute(&gb[0], &gb[1], &gb[2], &gb[3]);
            for (mono, c) in pulled.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let gen = idx * self.n_mono + mono;
                let value = c * Rational::from_integer(sign.into());
                for i in 0..self.dim {
                    let pv = self.proj.get(i, gen);
                    if !pv.is_zero() {
                        acc[i] += &value * pv;
                    }
                }
            }
        }
        acc
    }

    /// Convenience: the classical symbol `{alpha, beta}` with constant
    /// polynomial part `Y^(w-2)`.
    pub fn path_to_symbols(&self, alpha: &Cusp, beta: &Cusp) -> super::SymbolVector {
        self.path_symbol(&HomPoly::monomial((self.weight - 2) as usize, 0), alpha, beta)
    }

    /// Image in `target` of one source generator under an integer matrix of
    /// positive determinant (negative determinant is allowed; it is used by
    /// the star involution only).
    ///
    /// The generator's path `g {0, oo}` is moved to `(m g) {m g 0, m g oo}`
    /// and re-expressed in `target`'s presentation.
    pub fn matrix_image_of_gen(
        &self,
        target: &ManinSpace,
        gen: usize,
        m: &[i64; 4],
    ) -> super::SymbolVector {
        assert_eq!(target.weight, self.weight);
        let (p1_idx, mono) = (gen / self.n_mono, gen % self.n_mono);
        let g = self.lifts[p1_idx];
        let h = [
            m[0] as i128 * g[0] as i128 + m[1] as i128 * g[2] as i128,
            m[0] as i128 * g[1] as i128 + m[1] as i128 * g[3] as i128,
            m[2] as i128 * g[0] as i128 + m[3] as i128 * g[2] as i128,
            m[2] as i128 * g[1] as i128 + m[3] as i128 * g[3] as i128,
        ];
        let deg = (self.weight - 2) as usize;
        let hb = [
            BigInt::from(h[0]),
            BigInt::from(h[1]),
            BigInt::from(h[2]),
            BigInt::from(h[3]),
        ];
        let poly = HomPoly::monomial(deg, mono).act_left(&hb);
        let alpha = Cusp::new(h[1], h[3]);
        let beta = Cusp::new(h[0], h[2]);
        target.path_symbol(&poly, &alpha, &beta)
    }

    /// Matrix on the full quotient of the formal sum
    /// `sum_i coeff_i * (matrix_i)` acting on symbols, mapping into `target`.
    pub fn formal_sum_matrix(
        &self,
        target: &ManinSpace,
        terms: &[(Rational, [i64; 4])],
    ) -> QMatrix {
        let mut out = QMatrix::zeros(target.dim, self.dim);
        for (col, &gen) in self.basis_gens.iter().enumerate() {
            let mut acc = vec![Rational::zero(); target.dim];
            for (coeff, m) in terms {
                let img = self.matrix_image_of_gen(target, gen, m);
                for (i, v) in img.into_iter().enumerate() {
                    if !v.is_zero() {
                        acc[i] += coeff * v;
                    }
                }
            }
            for (i, v) in acc.into_iter().enumerate() {
                out.set(i, col, v);
            }
        }
        out
    }
}

/// Right action of `gamma` on the Manin generator `(p1_idx, mono)`, added
/// into `row`: `[P, u] gamma = [P(a X + b Y, c X + d Y), u gamma]`.
fn add_right_action(
    p1: &P1Table,
    deg: usize,
    p1_idx: usize,
    mono: usize,
    gamma: &[i64; 4],
    row: &mut [Rational],
) {
    let pt = p1.point(p1_idx);
    let (c, d) = (pt.c as i64, pt.d as i64);
    let new_c = c * gamma[0] + d * gamma[2];
    let new_d = c * gamma[1] + d * gamma[3];
    let idx = p1.index_of(new_c, new_d).expect("right action preserves primitivity");
    let gb = [
        BigInt::from(gamma[0]),
        BigInt::from(gamma[1]),
        BigInt::from(gamma[2]),
        BigInt::from(gamma[3]),
    ];
    let poly = HomPoly::monomial(deg, mono).substitute(&gb[0], &gb[1], &gb[2], &gb[3]);
    let n_mono = deg + 1;
    for (m, coeff) in poly.coeffs().iter().enumerate() {
        if !coeff.is_zero() {
            row[idx * n_mono + m] += coeff;
        }
    }
}

/// Lift a primitive-mod-N pair to the bottom row of an SL_2(Z) matrix.
fn lift_to_sl2(c: i64, d: i64, n: i64) -> Result<[i64; 4], Error> {
    if n == 1 {
        return Ok([1, 0, 0, 1]);
    }
    let (c0, mut d0) = (c.rem_euclid(n), d.rem_euclid(n));
    // Adjust d by multiples of N until gcd(c0, d0) = 1.
    let mut k = 0;
    loop {
        if num_integer::gcd(c0, d0) == 1 {
            break;
        }
        d0 += n;
        k += 1;
        if k > 4 * n {
            return Err(Error::InvalidParameter(format!(
                "cannot lift ({c}, {d}) mod {n} to a coprime pair"
            )));
        }
    }
    // Complete to determinant one: a d0 - b c0 = 1.
    let (g, s, t) = extended_gcd(d0, c0);
    debug_assert_eq!(g, 1);
    let (a, b) = (s, -t);
    debug_assert_eq!(a * d0 - b * c0, 1);
    Ok([a, b, c0, d0])
}

/// `(g, x, y)` with `a x + b y = g = gcd(a, b)`, `g >= 0`.
pub fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Index of the `Gamma_0(N)`-class of the cusp `(a : c)` in the registry,
/// inserting a new class when unseen.
fn cusp_class_index(reps: &mut Vec<(i128, i128)>, level: u32, a: i128, c: i128) -> usize {
    let g = num_integer::gcd(a, c);
    let (a, c) = if g != 0 { (a / g, c / g) } else { (a, c) };
    for (i, &(ra, rc)) in reps.iter().enumerate() {
        if cusps_equivalent(level, a, c, ra, rc) {
            return i;
        }
    }
    reps.push((a, c));
    reps.len() - 1
}

/// `Gamma_0(N)`-equivalence of cusps given by primitive pairs:
/// `(a1 : c1) ~ (a2 : c2)` iff `a1 c2 - a2 c1 = 0 mod gcd(c1 c2, N)`.
pub fn cusps_equivalent(level: u32, a1: i128, c1: i128, a2: i128, c2: i128) -> bool {
    let n = level as i128;
    let g = num_integer::gcd(c1 * c2, n);
    if g == 0 {
        return true; // both cusps are infinity
    }
    (a1 * c2 - a2 * c1).rem_euclid(g) == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat_int;
    use crate::modsym::dims::{cusp_count, dim_formula_oracle};

    #[test]
    fn cusp_equivalence_classes_match_count_formula() {
        for n in [1u32, 4, 11, 12, 22, 36, 48] {
            let p1 = P1Table::new(n);
            let mut reps: Vec<(i128, i128)> = Vec::new();
            for i in 0..p1.len() {
                let g = lift_to_sl2(p1.point(i).c as i64, p1.point(i).d as i64, n as i64).unwrap();
                cusp_class_index(&mut reps, n, g[0] as i128, g[2] as i128);
            }
            assert_eq!(reps.len() as u64, cusp_count(n as u64), "level {n}");
        }
    }

    #[test]
    fn cuspidal_dims_match_oracle_small() {
        for (n, w, expect) in [(11u32, 2u32, 1u64), (22, 2, 2), (1, 2, 0), (37, 2, 2), (11, 4, 2)] {
            let s = ManinSpace::build(n, w).unwrap();
            assert_eq!(
                s.cuspidal_dim() as u64,
                2 * expect,
                "cuspidal dim at (N, w) = ({n}, {w})"
            );
            assert_eq!(dim_formula_oracle(n as u64, w).unwrap(), expect);
        }
    }

    #[test]
    fn degenerate_path_is_zero() {
        let s = ManinSpace::build(11, 2).unwrap();
        let a = Cusp::new(1, 5);
        assert!(s.path_to_symbols(&a, &a).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn zero_to_infinity_is_identity_coset_generator() {
        let s = ManinSpace::build(11, 2).unwrap();
        // {0, oo} is the Manin generator of the identity coset (0 : 1).
        let idx = s.p1().index_of(0, 1).unwrap();
        let expected = s.gen_coords(idx, 0);
        let got = s.path_to_symbols(&Cusp::zero(), &Cusp::infinity());
        assert_eq!(got, expected);
    }

    #[test]
    fn path_reexpansion_is_consistent() {
        // {0, 1/5} at level 11 equals the telescoping sum of its convergent
        // pieces; re-express through two different routes and compare.
        let s = ManinSpace::build(11, 2).unwrap();
        let a = Cusp::zero();
        let b = Cusp::new(1, 5);
        let direct = s.path_to_symbols(&a, &b);
        let mid = Cusp::new(1, 4);
        let via: Vec<Rational> = s
            .path_to_symbols(&a, &mid)
            .iter()
            .zip(&s.path_to_symbols(&mid, &b))
            .map(|(x, y)| x + y)
            .collect();
        assert_eq!(direct, via);
        assert!(direct.iter().any(|x| !x.is_zero()));
    }

    #[test]
    fn gamma0_invariance_of_symbols() {
        // Applying a Gamma_0(N) matrix to paths fixes every symbol.
        let s = ManinSpace::build(14, 2).unwrap();
        let gamma = [3i64, 1, 14, 5]; // det = 1, lower left divisible by 14
        assert_eq!(gamma[0] * gamma[3] - gamma[1] * gamma[2], 1);
        let m = s.formal_sum_matrix(&s, &[(rat_int(1), gamma)]);
        assert_eq!(m, QMatrix::identity(s.dim()));
    }

    #[test]
    fn identity_formal_sum_is_identity_matrix() {
        for (n, w) in [(11u32, 2u32), (6, 2), (11, 4)] {
            let s = ManinSpace::build(n, w).unwrap();
            let m = s.formal_sum_matrix(&s, &[(rat_int(1), [1, 0, 0, 1])]);
            assert_eq!(m, QMatrix::identity(s.dim()), "(N, w) = ({n}, {w})");
        }
    }

    #[test]
    fn extended_gcd_identity() {
        for (a, b) in [(7, 11), (-15, 6), (0, 5), (12, 0), (-9, -24)] {
            let (g, x, y) = extended_gcd(a, b);
            assert_eq!(a * x + b * y, g);
            assert_eq!(g, num_integer::gcd(a, b).abs());
        }
    }
}
