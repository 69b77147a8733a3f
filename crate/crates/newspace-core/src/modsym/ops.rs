//! Operators on modular symbols: formal sums of integer matrices.
//!
//! One engine applies everything — Hecke operators, Atkin-Lehner matrices,
//! the coset sums `L_j`, twists, degeneracy maps — by rewriting each basis
//! symbol as a path, moving the path through each matrix term, and
//! re-expressing at the target level. Per the translation rule, every term
//! of weight `w = 2k` picks up the scalar `det(M)^(1-k)`, which keeps all
//! matrices integral and all scalars rational (at `w = 2` every scalar is 1).

use num_integer::Integer;
use num_traits::One;

use super::dims::psi_index;
use super::p1::{factorize, is_prime, P1Table};
use super::space::{extended_gcd, ManinSpace};
use crate::linalg::{rat_int, QMatrix, Rational, Subspace};
use crate::Error;

/// Integer 2x2 matrix with positive determinant, one term of an operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntMatrix2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl IntMatrix2 {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, Error> {
        let m = IntMatrix2 { a, b, c, d };
        if m.det() <= 0 {
            return Err(Error::InvalidParameter(format!(
                "operator matrix [{a},{b};{c},{d}] must have positive determinant"
            )));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        IntMatrix2 { a: 1, b: 0, c: 0, d: 1 }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn as_array(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

/// Formal rational-weighted sum of positive-determinant integer matrices.
///
/// The bridge from slash operators to symbol matrices: applying the spec
/// means summing `coeff * det(M)^(1-k) * (M acting on paths)`.
#[derive(Clone, Debug)]
pub struct OperatorSpec {
    pub terms: Vec<(Rational, IntMatrix2)>,
    pub description: String,
}

impl OperatorSpec {
    pub fn new(description: impl Into<String>, terms: Vec<(Rational, IntMatrix2)>) -> Self {
        OperatorSpec { terms, description: description.into() }
    }

    pub fn single(description: impl Into<String>, m: IntMatrix2) -> Self {
        OperatorSpec::new(description, vec![(Rational::one(), m)])
    }

    pub fn identity() -> Self {
        OperatorSpec::single("identity", IntMatrix2::identity())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// `det^(1-k)` as an exact rational.
fn det_scalar(det: i64, half_weight: u32) -> Rational {
    assert!(det > 0);
    let k = half_weight;
    if k == 1 {
        return Rational::one();
    }
    rat_int(1) / rat_int(det.pow(k - 1))
}

/// Matrix of the spec on the full quotient of `space`.
pub fn act_full(space: &ManinSpace, spec: &OperatorSpec) -> QMatrix {
    let k = space.half_weight();
    let terms: Vec<(Rational, [i64; 4])> = spec
        .terms
        .iter()
        .map(|(c, m)| (c * det_scalar(m.det(), k), m.as_array()))
        .collect();
    space.formal_sum_matrix(space, &terms)
}

/// Matrix of the spec restricted to the cuspidal subspace.
///
/// Errors when the image of a cuspidal vector leaves the cuspidal subspace,
/// which signals a construction bug or a level-incompatible spec.
pub fn act(space: &ManinSpace, spec: &OperatorSpec) -> Result<QMatrix, Error> {
    if spec.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "operator spec '{}' has no terms",
            spec.description
        )));
    }
    let full = act_full(space, spec);
    restrict_map(&full, space.cuspidal(), space.cuspidal()).map_err(|_| {
        Error::NotInvariant(format!(
            "operator '{}' leaves the cuspidal subspace at level {}",
            spec.description,
            space.level()
        ))
    })
}

/// Express the map `full` (between quotients) as a matrix from `src`
/// coordinates to `tgt` coordinates, failing when the image escapes `tgt`.
pub fn restrict_map(full: &QMatrix, src: &Subspace, tgt: &Subspace) -> Result<QMatrix, Error> {
    assert_eq!(full.cols(), src.ambient_dim());
    assert_eq!(full.rows(), tgt.ambient_dim());
    let mut out = QMatrix::zeros(tgt.dim(), src.dim());
    for i in 0..src.dim() {
        let w = full.mul_vec(src.basis().row(i));
        let coords = tgt
            .coordinates(&w)
            .ok_or_else(|| Error::NotInvariant("image leaves the target subspace".into()))?;
        for (j, c) in coords.into_iter().enumerate() {
            out.set(j, i, c);
        }
    }
    Ok(out)
}

/// Spec of the normalized `U~_p` operator: the `p` matrices `[1, s; 0, p]`.
pub fn u_tilde_spec(p: u64) -> OperatorSpec {
    let terms = (0..p)
        .map(|s| (Rational::one(), IntMatrix2::new(1, s as i64, 0, p as i64).expect("det p")))
        .collect();
    OperatorSpec::new(format!("Utilde_{p}"), terms)
}

/// Spec of the normalized Hecke operator at a prime `q` not dividing the
/// level: `U~_q` plus the extra term `[q, 0; 0, 1]`.
pub fn hecke_t_spec(q: u64) -> OperatorSpec {
    let mut spec = u_tilde_spec(q);
    spec.terms.push((Rational::one(), IntMatrix2::new(q as i64, 0, 0, 1).expect("det q")));
    spec.description = format!("T_{q}");
    spec
}

/// Matrix of `T~_q = q^(1-k) T_q` on the cuspidal subspace, `q` prime to `N`.
pub fn hecke_t(space: &ManinSpace, q: u64) -> Result<QMatrix, Error> {
    if !is_prime(q) {
        return Err(Error::InvalidParameter(format!("T_q needs a prime, got {q}")));
    }
    if space.level() as u64 % q == 0 {
        return Err(Error::InvalidParameter(format!(
            "T_{q} needs q coprime to the level {}",
            space.level()
        )));
    }
    act(space, &hecke_t_spec(q))
}

/// Matrix of `U~_p = p^(1-k) U_p` on the cuspidal subspace, `p` dividing `N`.
pub fn hecke_u(space: &ManinSpace, p: u64) -> Result<QMatrix, Error> {
    if !is_prime(p) {
        return Err(Error::InvalidParameter(format!("U_p needs a prime, got {p}")));
    }
    if space.level() as u64 % p != 0 {
        return Err(Error::InvalidParameter(format!(
            "U_{p} needs p dividing the level {}",
            space.level()
        )));
    }
    act(space, &u_tilde_spec(p))
}

/// The star involution on the full quotient, induced by `[-1, 0; 0, 1]`.
///
/// An exact involution commuting with every level-preserving operator built
/// here; its +1 eigenspace halves the doubled multiplicity of the cuspidal
/// space.
pub fn star_involution_full(space: &ManinSpace) -> QMatrix {
    space.formal_sum_matrix(space, &[(Rational::one(), [-1, 0, 0, 1])])
}

/// The star involution restricted to the cuspidal subspace.
pub fn star_involution(space: &ManinSpace) -> Result<QMatrix, Error> {
    restrict_map(&star_involution_full(space), space.cuspidal(), space.cuspidal())
}

/// Full-quotient matrix of the level-lowering map `delta_e`: apply
/// `[e, 0; 0, 1]` to paths (with the translation scalar `e^(1-k)`) and
/// reinterpret at the lower level.
pub fn lowering_full(src: &ManinSpace, tgt: &ManinSpace, e: u32) -> Result<QMatrix, Error> {
    let (n, m) = (src.level(), tgt.level());
    if n % m != 0 || (n / m) % e != 0 {
        return Err(Error::InvalidParameter(format!(
            "delta_{e}: need M | N and e | N/M, got N = {n}, M = {m}"
        )));
    }
    let scalar = det_scalar(e as i64, src.half_weight());
    Ok(src.formal_sum_matrix(tgt, &[(scalar, [e as i64, 0, 0, 1])]))
}

/// `delta_e` as a map from cuspidal(`src`) to cuspidal(`tgt`).
pub fn degeneracy_down(src: &ManinSpace, tgt: &ManinSpace, e: u32) -> Result<QMatrix, Error> {
    let full = lowering_full(src, tgt, e)?;
    restrict_map(&full, src.cuspidal(), tgt.cuspidal())
}

/// Coset representatives of `Gamma_0(B)` in `Gamma_0(A)` for `A | B`,
/// as integer matrices in `Gamma_0(A)`.
///
/// Cosets biject with the points of `P^1(Z/BZ)` whose lower entry has
/// valuation at least that of `A` at every prime; each such class lifts to a
/// matrix with the prescribed bottom row.
pub fn gamma0_coset_reps(a: u32, b: u32) -> Result<Vec<[i64; 4]>, Error> {
    if b % a != 0 {
        return Err(Error::InvalidParameter(format!("need A | B, got A = {a}, B = {b}")));
    }
    let p1 = P1Table::new(b);
    let mut reps = Vec::new();
    for i in 0..p1.len() {
        let pt = p1.point(i);
        let mut eligible = true;
        for (q, e) in factorize(a as u64) {
            let qe = q.pow(e) as i64;
            if (pt.c as i64) % qe != 0 {
                eligible = false;
                break;
            }
        }
        if !eligible {
            continue;
        }
        let g = lift_bottom_row_gamma0(pt.c as i64, pt.d as i64, b as i64)?;
        debug_assert_eq!(g[2] % a as i64, 0);
        reps.push(g);
    }
    let expected = (psi_index(b as u64) / psi_index(a as u64)) as usize;
    if reps.len() != expected {
        return Err(Error::InvalidParameter(format!(
            "coset enumeration for Gamma_0({b}) in Gamma_0({a}) found {} cosets, expected {expected}",
            reps.len()
        )));
    }
    Ok(reps)
}

/// Lift a primitive bottom row mod `n` to an SL_2(Z) matrix keeping the `c`
/// entry literally (`d` may move by multiples of `n`).
fn lift_bottom_row_gamma0(c: i64, d: i64, n: i64) -> Result<[i64; 4], Error> {
    if n == 1 {
        return Ok([1, 0, 0, 1]);
    }
    let c0 = c.rem_euclid(n);
    let mut d0 = d.rem_euclid(n);
    let mut k = 0;
    while c0.gcd(&d0) != 1 {
        d0 += n;
        k += 1;
        if k > 4 * n {
            return Err(Error::InvalidParameter(format!("cannot lift row ({c}, {d}) mod {n}")));
        }
    }
    let (g, s, t) = extended_gcd(d0, c0);
    debug_assert_eq!(g, 1);
    debug_assert_eq!(s * d0 - (-t) * c0, 1);
    Ok([s, -t, c0, d0])
}

/// Full-quotient matrix of the pure transfer `beta_1`: sum over coset
/// representatives of `Gamma_0(N)` in `Gamma_0(M)` of the path action.
pub fn transfer_full(src: &ManinSpace, tgt: &ManinSpace) -> Result<QMatrix, Error> {
    let (m, n) = (src.level(), tgt.level());
    if n % m != 0 {
        return Err(Error::InvalidParameter(format!("transfer needs M | N, got {m}, {n}")));
    }
    let terms: Vec<(Rational, [i64; 4])> =
        gamma0_coset_reps(m, n)?.into_iter().map(|g| (Rational::one(), g)).collect();
    Ok(src.formal_sum_matrix(tgt, &terms))
}

/// Full-quotient matrix of the shift transfer from level `M` to `d M`:
/// the sum of `[1, 0; 0, d] * gamma_i` over coset representatives of
/// `Gamma_0(M) intersect Gamma^0(d)` in `Gamma_0(M)`, with the translation
/// scalar `d^(1-k)` (each term has determinant `d`).
///
/// This is the transfer adjoint to the shift `f(z) -> f(dz)` under the
/// integration pairing, which is what makes the level-raising images match
/// the shifted old subspaces exactly.
pub fn shift_full(src: &ManinSpace, tgt: &ManinSpace, d: u32) -> Result<QMatrix, Error> {
    let m = src.level();
    if tgt.level() != d * m {
        return Err(Error::InvalidParameter(format!(
            "shift by {d} must land at level {}, target has level {}",
            d * m,
            tgt.level()
        )));
    }
    if d == 1 {
        return Ok(src.formal_sum_matrix(tgt, &[(Rational::one(), [1, 0, 0, 1])]));
    }
    let scalar = det_scalar(d as i64, src.half_weight());
    let terms: Vec<(Rational, [i64; 4])> = upper_coset_reps(m, d)?
        .into_iter()
        .map(|g| (scalar.clone(), [g[0], g[1], d as i64 * g[2], d as i64 * g[3]]))
        .collect();
    Ok(src.formal_sum_matrix(tgt, &terms))
}

/// Coset representatives of `Gamma_0(M) intersect Gamma^0(d)` in
/// `Gamma_0(M)`, indexed by the top row mod `d` up to units.
pub fn upper_coset_reps(m: u32, d: u32) -> Result<Vec<[i64; 4]>, Error> {
    let p1 = P1Table::new(d);
    let gcd_dm = (d as u64).gcd(&(m as u64));
    let mut reps = Vec::new();
    for i in 0..p1.len() {
        let pt = p1.point(i);
        // The top-left entry must be invertible mod M for a completion in
        // Gamma_0(M) to exist; at primes dividing both d and M that is a
        // condition on the class.
        let mut eligible = true;
        for (q, _) in factorize(gcd_dm) {
            if (pt.c as u64) % q == 0 {
                eligible = false;
                break;
            }
        }
        if !eligible {
            continue;
        }
        reps.push(lift_top_row_gamma0(pt.c as i64, pt.d as i64, d as i64, m as i64)?);
    }
    let expected: u64 = factorize(d as u64)
        .into_iter()
        .map(|(q, e)| if m as u64 % q == 0 { q.pow(e) } else { q.pow(e - 1) * (q + 1) })
        .product();
    if reps.len() as u64 != expected {
        return Err(Error::InvalidParameter(format!(
            "upper coset enumeration at (M, d) = ({m}, {d}) found {} cosets, expected {expected}",
            reps.len()
        )));
    }
    Ok(reps)
}

/// Produce an element of `Gamma_0(M)` whose top row is congruent to
/// `(a, b)` mod `d`.
fn lift_top_row_gamma0(a: i64, b: i64, d: i64, m: i64) -> Result<[i64; 4], Error> {
    // a0 = a mod d with gcd(a0, M) = 1 and a0 nonzero.
    let mut a0 = a.rem_euclid(d);
    let mut steps = 0;
    while a0 == 0 || a0.gcd(&m) != 1 {
        a0 += d;
        steps += 1;
        if steps > 4 * (m * d + 2) {
            return Err(Error::InvalidParameter(format!(
                "cannot lift top row ({a}, {b}) mod {d} into Gamma_0({m})"
            )));
        }
    }
    // b0 = b mod d with gcd(a0, b0) = 1.
    let mut b0 = b.rem_euclid(d);
    steps = 0;
    while a0.gcd(&b0) != 1 {
        b0 += d;
        steps += 1;
        if steps > 4 * (a0.abs() + d + 2) {
            return Err(Error::InvalidParameter(format!(
                "cannot complete top row ({a}, {b}) mod {d} to a primitive row"
            )));
        }
    }
    // Complete: a0 e - b0 c = 1 with M | c. General solution moves by
    // (c, e) += j (a0, b0); pick j so that c = 0 mod M.
    let (g, s, t) = extended_gcd(a0, b0);
    debug_assert_eq!(g, 1);
    let (mut e, mut c) = (s, -t);
    let a0_inv = mod_inverse_i64(a0.rem_euclid(m), m);
    let j = (-c).rem_euclid(m) * a0_inv % m;
    c += a0 * j;
    e += b0 * j;
    debug_assert_eq!(a0 * e - b0 * c, 1);
    debug_assert_eq!(c.rem_euclid(m), 0);
    Ok([a0, b0, c, e])
}

fn mod_inverse_i64(x: i64, m: i64) -> i64 {
    if m == 1 {
        return 0;
    }
    let (g, s, _) = extended_gcd(x, m);
    assert_eq!(g, 1, "inverse of a non-unit");
    s.rem_euclid(m)
}

/// The transfer `beta_d` from cuspidal(`M`) to cuspidal(`N`): the shift by
/// `d` into level `d M` composed with the pure transfer up to `N`.
///
/// `mid` must be the space at level `d M`; pass the source space itself when
/// `d = 1`.
pub fn degeneracy_up(
    src: &ManinSpace,
    mid: &ManinSpace,
    tgt: &ManinSpace,
    d: u32,
) -> Result<QMatrix, Error> {
    let (m, n) = (src.level(), tgt.level());
    if n % m != 0 || (n / m) % d != 0 {
        return Err(Error::InvalidParameter(format!(
            "beta_{d}: need M | N and d | N/M, got M = {m}, N = {n}"
        )));
    }
    let full = if d == 1 {
        transfer_full(src, tgt)?
    } else {
        if mid.level() != d * m {
            return Err(Error::InvalidParameter(format!(
                "beta_{d} from level {m} needs the intermediate space at level {}",
                d * m
            )));
        }
        transfer_full(mid, tgt)?.mul(&shift_full(src, mid, d)?)
    };
    restrict_map(&full, src.cuspidal(), tgt.cuspidal())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigenspace;

    #[test]
    fn act_identity_is_identity() {
        let s = ManinSpace::build(11, 2).unwrap();
        let m = act(&s, &OperatorSpec::identity()).unwrap();
        assert_eq!(m, QMatrix::identity(s.cuspidal_dim()));
    }

    #[test]
    fn hecke_t2_at_level_11() {
        // a_2 of the unique level-11 form is -2 (recovered below from the
        // square of the shifted matrix, not assumed): trace = 2 a_2 = -4.
        let s = ManinSpace::build(11, 2).unwrap();
        let t2 = hecke_t(&s, 2).unwrap();
        assert_eq!(t2.rows(), 2);
        assert_eq!(t2.trace(), rat_int(-4));
        let shifted = t2.sub_scalar_diag(&rat_int(-2));
        assert!(shifted.mul(&shifted).is_zero());
    }

    #[test]
    fn hecke_operators_commute() {
        let s = ManinSpace::build(11, 2).unwrap();
        let t2 = hecke_t(&s, 2).unwrap();
        let t3 = hecke_t(&s, 3).unwrap();
        assert_eq!(t2.mul(&t3), t3.mul(&t2));
    }

    #[test]
    fn hecke_preconditions() {
        let s = ManinSpace::build(22, 2).unwrap();
        assert!(hecke_t(&s, 2).is_err()); // 2 | 22
        assert!(hecke_t(&s, 4).is_err()); // not prime
        assert!(hecke_u(&s, 3).is_err()); // 3 does not divide 22
        assert!(hecke_u(&s, 2).is_ok());
    }

    #[test]
    fn star_is_an_involution_and_commutes_with_hecke() {
        let s = ManinSpace::build(11, 2).unwrap();
        let star = star_involution(&s).unwrap();
        assert_eq!(star.mul(&star), QMatrix::identity(s.cuspidal_dim()));
        let t2 = hecke_t(&s, 2).unwrap();
        assert_eq!(star.mul(&t2), t2.mul(&star));
        // The +1 eigenspace halves the doubled multiplicity.
        assert_eq!(eigenspace(&star, &rat_int(1)).unwrap().dim(), 1);
    }

    #[test]
    fn lowering_identity_at_same_level() {
        let s = ManinSpace::build(11, 2).unwrap();
        let m = degeneracy_down(&s, &s, 1).unwrap();
        assert_eq!(m, QMatrix::identity(s.cuspidal_dim()));
    }

    #[test]
    fn transfer_from_11_to_22_is_injective() {
        let s11 = ManinSpace::build(11, 2).unwrap();
        let s22 = ManinSpace::build(22, 2).unwrap();
        let b1 = degeneracy_up(&s11, &s11, &s22, 1).unwrap();
        assert_eq!(b1.cols(), 2);
        assert_eq!(b1.rank(), 2);
        // delta_1 after beta_1 is multiplication by the coset index 3.
        let d1 = degeneracy_down(&s22, &s11, 1).unwrap();
        assert_eq!(d1.mul(&b1), QMatrix::identity(2).scale(&rat_int(3)));
    }

    #[test]
    fn images_of_both_transfers_fill_level_22() {
        let s11 = ManinSpace::build(11, 2).unwrap();
        let s22 = ManinSpace::build(22, 2).unwrap();
        let b1 = degeneracy_up(&s11, &s11, &s22, 1).unwrap();
        let b2 = degeneracy_up(&s11, &s22, &s22, 2).unwrap();
        let im1 = Subspace::from_image(&b1);
        let im2 = Subspace::from_image(&b2);
        assert_eq!(im1.dim(), 2);
        assert_eq!(im2.dim(), 2);
        assert_eq!(im1.sum(&im2).dim(), 4); // all of cuspidal(22)
    }

    #[test]
    fn new_symbols_at_22_vanish() {
        // Level 22 has no newforms: kernels of both lowerings intersect to 0.
        let s11 = ManinSpace::build(11, 2).unwrap();
        let s22 = ManinSpace::build(22, 2).unwrap();
        let d1 = degeneracy_down(&s22, &s11, 1).unwrap();
        let d2 = degeneracy_down(&s22, &s11, 2).unwrap();
        let k = crate::linalg::kernel(&d1).intersect(&crate::linalg::kernel(&d2));
        assert_eq!(k.dim(), 0);
    }

    #[test]
    fn degeneracy_maps_commute_with_hecke() {
        let s11 = ManinSpace::build(11, 2).unwrap();
        let s22 = ManinSpace::build(22, 2).unwrap();
        let b2 = degeneracy_up(&s11, &s22, &s22, 2).unwrap();
        let t3_11 = hecke_t(&s11, 3).unwrap();
        let t3_22 = hecke_t(&s22, 3).unwrap();
        assert_eq!(b2.mul(&t3_11), t3_22.mul(&b2));
        let d2 = degeneracy_down(&s22, &s11, 2).unwrap();
        assert_eq!(d2.mul(&t3_22), t3_11.mul(&d2));
    }

    #[test]
    fn coset_rep_counts() {
        assert_eq!(gamma0_coset_reps(11, 22).unwrap().len(), 3);
        assert_eq!(gamma0_coset_reps(1, 6).unwrap().len(), 12);
        assert_eq!(upper_coset_reps(11, 2).unwrap().len(), 3);
        assert_eq!(upper_coset_reps(2, 2).unwrap().len(), 2);
        for g in gamma0_coset_reps(11, 22).unwrap() {
            assert_eq!(g[0] * g[3] - g[1] * g[2], 1);
            assert_eq!(g[2] % 11, 0);
        }
    }
}

#[cfg(test)]
mod failure_path_tests {
    use super::*;

    #[test]
    fn level_incompatible_spec_is_rejected() {
        // A bare Gamma_0(3) element is not an operator at level 22: the
        // computed image leaves the cuspidal subspace and act must refuse.
        let s = ManinSpace::build(22, 2).unwrap();
        let bogus = OperatorSpec::single("bogus", IntMatrix2::new(1, 0, 3, 1).unwrap());
        assert!(matches!(act(&s, &bogus), Err(crate::Error::NotInvariant(_))));
        assert!(act(&s, &OperatorSpec::new("empty", vec![])).is_err());
    }
}
