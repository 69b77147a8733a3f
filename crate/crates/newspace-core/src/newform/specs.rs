//! Construction of the classical operators on cuspidal symbols.
//!
//! Everything is assembled from `OperatorSpec`s and the symbol engine:
//! `U~_p`, the Atkin-Lehner involutions `W_Q`, the products `Q_{p^m}` and
//! their conjugates, the coset sums `L_j` and `S_{p^n,r}`, and the squared
//! twist operators. Composite operators mirror the convolution order of the
//! underlying algebra: on symbols the adjoint reverses compositions, so the
//! matrix called `Q_{p^m}` here is `W * U^m` (apply `U~_p` first).

use num_traits::One;

use crate::linalg::{rat_int, QMatrix, Rational};
use crate::modsym::ops::{act, u_tilde_spec, IntMatrix2, OperatorSpec};
use crate::modsym::p1::{factorize, is_prime};
use crate::modsym::space::extended_gcd;
use crate::modsym::ManinSpace;
use crate::Error;

/// Atkin-Lehner datum at an exact prime-power divisor `Q = p^n` of `N`:
/// integers with `Q^2 beta - N gamma = Q`, giving the determinant-`Q` matrix
/// `[Q beta, 1; N gamma, Q]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AtkinLehnerParams {
    pub level: u32,
    pub q: u32,
    pub beta: i64,
    pub gamma: i64,
}

impl AtkinLehnerParams {
    pub fn new(level: u32, q: u32) -> Result<Self, Error> {
        exact_prime_power_divisor(level, q)?;
        let n_over_q = (level / q) as i64;
        // Q beta - (N/Q) gamma = 1 with the smallest non-negative beta.
        let (g, x, _) = extended_gcd(q as i64, n_over_q);
        if g != 1 {
            return Err(Error::InvalidParameter(format!(
                "{q} is not coprime to {level}/{q}"
            )));
        }
        // N/Q >= 1 since Q | N; the smallest non-negative beta is x mod N/Q
        // (beta = 0, gamma = -1 in the degenerate case N = Q).
        let beta = x.rem_euclid(n_over_q);
        let gamma = (q as i64 * beta - 1) / n_over_q;
        let params = AtkinLehnerParams { level, q, beta, gamma };
        debug_assert_eq!(
            (q as i64) * (q as i64) * params.beta - (level as i64) * params.gamma,
            q as i64
        );
        Ok(params)
    }

    /// Any valid `(beta, gamma)` pair; used by the regression test that two
    /// distinct solutions give the same operator.
    pub fn with_solution(level: u32, q: u32, beta: i64, gamma: i64) -> Result<Self, Error> {
        exact_prime_power_divisor(level, q)?;
        if (q as i64) * (q as i64) * beta - (level as i64) * gamma != q as i64 {
            return Err(Error::InvalidParameter(format!(
                "({beta}, {gamma}) does not solve Q^2 beta - N gamma = Q at (N, Q) = ({level}, {q})"
            )));
        }
        Ok(AtkinLehnerParams { level, q, beta, gamma })
    }

    pub fn matrix(&self) -> IntMatrix2 {
        IntMatrix2::new(
            self.q as i64 * self.beta,
            1,
            self.level as i64 * self.gamma,
            self.q as i64,
        )
        .expect("Atkin-Lehner matrix has determinant Q")
    }
}

/// Check that `q = p^n` exactly divides `level`, returning `(p, n)`.
pub fn exact_prime_power_divisor(level: u32, q: u32) -> Result<(u64, u32), Error> {
    let f = factorize(q as u64);
    if f.len() != 1 {
        return Err(Error::InvalidParameter(format!("{q} is not a prime power")));
    }
    let (p, n) = f[0];
    if level as u64 % q as u64 != 0 || (level as u64 / q as u64) % p == 0 {
        return Err(Error::InvalidParameter(format!(
            "{q} = {p}^{n} does not exactly divide {level}"
        )));
    }
    Ok((p, n))
}

/// A named operator matrix on the cuspidal subspace at one `(level, weight)`.
#[derive(Clone, Debug)]
pub struct OperatorHandle {
    pub name: String,
    pub level: u32,
    pub weight: u32,
    pub matrix: QMatrix,
}

impl OperatorHandle {
    fn new(space: &ManinSpace, name: String, matrix: QMatrix) -> Self {
        OperatorHandle { name, level: space.level(), weight: space.weight(), matrix }
    }
}

/// `U~_p` on cuspidal symbols, `p | N`.
pub fn build_u_tilde(space: &ManinSpace, p: u64) -> Result<OperatorHandle, Error> {
    if !is_prime(p) || space.level() as u64 % p != 0 {
        return Err(Error::InvalidParameter(format!(
            "Utilde needs a prime dividing the level, got {p} at level {}",
            space.level()
        )));
    }
    let m = act(space, &u_tilde_spec(p))?;
    Ok(OperatorHandle::new(space, format!("Utilde_{p}"), m))
}

/// The Atkin-Lehner involution `W_Q` for an exact prime-power divisor `Q`.
///
/// `W^2 = I` is verified on construction as a normalization self-test.
pub fn build_w(space: &ManinSpace, q: u32) -> Result<OperatorHandle, Error> {
    let params = AtkinLehnerParams::new(space.level(), q)?;
    let spec = OperatorSpec::single(format!("W_{q}"), params.matrix());
    let m = act(space, &spec)?;
    let dim = m.rows();
    if m.mul(&m) != QMatrix::identity(dim) {
        return Err(Error::NotInvariant(format!(
            "W_{q} at level {} failed its involution self-test",
            space.level()
        )));
    }
    Ok(OperatorHandle::new(space, format!("W_{q}"), m))
}

/// Variant selector for the composite operators `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QVariant {
    /// `m = 1`, requires `p || N`.
    Qp,
    /// Conjugate of `Qp` by `W_p`.
    QpPrime,
    /// `m = n = v_p(N) >= 2`.
    Qpn,
    /// Conjugate of `Qpn`.
    QpnPrime,
    /// `m = 2`, requires `p^2 || N`.
    Qp2,
    /// Conjugate of `Qp2`.
    Qp2Prime,
}

impl QVariant {
    fn is_primed(self) -> bool {
        matches!(self, QVariant::QpPrime | QVariant::QpnPrime | QVariant::Qp2Prime)
    }
}

/// Composite operator `Q_{p^m}` (or its `W`-conjugate) on cuspidal symbols.
///
/// On forms `Q_{p^m} = (U~_p)^m W_{p^m}`; the symbol matrix composes in the
/// adjoint order `W * U^m`, and the primed variant is `U^m * W`.
pub fn build_q(space: &ManinSpace, p: u64, variant: QVariant) -> Result<OperatorHandle, Error> {
    let n = valuation(space.level() as u64, p);
    let m = match variant {
        QVariant::Qp | QVariant::QpPrime => {
            if n != 1 {
                return Err(Error::InvalidParameter(format!(
                    "Q_p needs p || N; v_{p}({}) = {n}",
                    space.level()
                )));
            }
            1
        }
        QVariant::Qp2 | QVariant::Qp2Prime => {
            if n != 2 {
                return Err(Error::InvalidParameter(format!(
                    "Q_(p^2) needs p^2 || N; v_{p}({}) = {n}",
                    space.level()
                )));
            }
            2
        }
        QVariant::Qpn | QVariant::QpnPrime => {
            if n < 2 {
                return Err(Error::InvalidParameter(format!(
                    "Q_(p^n) needs v_p(N) >= 2; v_{p}({}) = {n}",
                    space.level()
                )));
            }
            n
        }
    };
    let u = build_u_tilde(space, p)?.matrix;
    let w = build_w(space, p.pow(m) as u32)?.matrix;
    let u_pow = u.pow(m);
    let (name, matrix) = if variant.is_primed() {
        (format!("Q'_{}", p.pow(m)), u_pow.mul(&w))
    } else {
        (format!("Q_{}", p.pow(m)), w.mul(&u_pow))
    };
    Ok(OperatorHandle::new(space, name, matrix))
}

/// The determinant-one coset matrix `A_{s,j} = [a, b; p^j M, p^(n-j) - s M]`.
///
/// `a, b` come from the extended gcd; `b` is normalized to the residue of
/// least absolute value (ties to the positive one), which fixes the matrix
/// deterministically. Any other solution differs by a left `Gamma_0(N)`
/// factor and induces the same symbol operator.
pub fn coset_matrix_a(s: u64, j: u32, p: u64, n: u32, m_coprime: u64) -> Result<IntMatrix2, Error> {
    if j < 1 || j > n - 1 {
        return Err(Error::InvalidParameter(format!("need 1 <= j <= n-1, got j = {j}, n = {n}")));
    }
    if s % p == 0 {
        return Err(Error::InvalidParameter(format!("s = {s} must be a unit mod {p}^{}", n - j)));
    }
    let c = (p.pow(j) * m_coprime) as i64;
    let d = p.pow(n - j) as i64 - (s * m_coprime) as i64;
    // a d - b c = 1.
    let (g, x, y) = extended_gcd(d, c);
    if g != 1 {
        return Err(Error::InvalidParameter(format!(
            "gcd({c}, {d}) != 1; parameters (s, j, p, n, M) = ({s}, {j}, {p}, {n}, {m_coprime})"
        )));
    }
    let (mut a, mut b) = (x, -y);
    debug_assert_eq!(a * d - b * c, 1);
    // Normalize b modulo d to least absolute value, ties positive.
    debug_assert!(d != 0);
    let dd = d.abs();
    let mut b0 = b.rem_euclid(dd);
    if 2 * b0 > dd {
        b0 -= dd;
    }
    // Recompute a from the normalized b: a = (1 + b c) / d.
    b = b0;
    let num = 1 + b * c;
    debug_assert_eq!(num % d, 0);
    a = num / d;
    debug_assert_eq!(a * d - b * c, 1);
    IntMatrix2::new(a, b, c, d)
}

/// The coset sum `L_j = sum over units s mod p^(n-j) of A_{s,j}`.
pub fn l_spec(level: u32, p: u64, j: u32) -> Result<OperatorSpec, Error> {
    let n = valuation(level as u64, p);
    if n < 2 || j < 1 || j > n - 1 {
        return Err(Error::InvalidParameter(format!(
            "L_j needs v_p(N) >= 2 and 1 <= j <= n-1; got v_{p}({level}) = {n}, j = {j}"
        )));
    }
    let m_coprime = level as u64 / p.pow(n);
    let q = p.pow(n - j);
    let mut terms = Vec::new();
    for s in 1..q {
        if s % p != 0 {
            terms.push((Rational::one(), coset_matrix_a(s, j, p, n, m_coprime)?));
        }
    }
    Ok(OperatorSpec::new(format!("L_{j}[p={p}]"), terms))
}

pub fn build_l(space: &ManinSpace, p: u64, j: u32) -> Result<OperatorHandle, Error> {
    let spec = l_spec(space.level(), p, j)?;
    let m = act(space, &spec)?;
    Ok(OperatorHandle::new(space, spec.description.clone(), m))
}

/// The spec of `S_{p^n, r} = I + sum_{j=r}^{n-1} L_j`, with exactly
/// `p^(n-r)` matrix terms; `r = n` gives the identity.
pub fn s_spec(level: u32, p: u64, r: u32) -> Result<OperatorSpec, Error> {
    let n = valuation(level as u64, p);
    if n < 2 || r < 1 || r > n {
        return Err(Error::InvalidParameter(format!(
            "S_(p^n, r) needs v_p(N) = n >= 2 and 1 <= r <= n; got v_{p}({level}) = {n}, r = {r}"
        )));
    }
    let mut terms = vec![(Rational::one(), IntMatrix2::identity())];
    for j in r..n {
        terms.extend(l_spec(level, p, j)?.terms);
    }
    let spec = OperatorSpec::new(format!("S_[{}^{n},{r}]", p), terms);
    debug_assert_eq!(spec.len() as u64, p.pow(n - r));
    Ok(spec)
}

/// `S_{p^n, r}` on cuspidal symbols; `primed` conjugates by `W_{p^n}`.
pub fn build_s(space: &ManinSpace, p: u64, r: u32, primed: bool) -> Result<OperatorHandle, Error> {
    let spec = s_spec(space.level(), p, r)?;
    let m = act(space, &spec)?;
    if !primed {
        return Ok(OperatorHandle::new(space, spec.description.clone(), m));
    }
    let n = valuation(space.level() as u64, p);
    let w = build_w(space, p.pow(n) as u32)?.matrix;
    let conj = w.mul(&m).mul(&w);
    Ok(OperatorHandle::new(space, format!("S'_[{}^{n},{r}]", p), conj))
}

/// Legendre symbol `(a | p)` for an odd prime `p`.
pub fn legendre(a: i64, p: u64) -> i64 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

/// The square of the quadratic twist by the character mod `p` (odd,
/// `p^2 | N`): with `D = sum_l (l | p) [p, l; 0, p]` acting through the
/// engine, the square of the twist is `((-1|p) p)^{-1} D^2` — the Gauss-sum
/// constant drops out of the square and everything stays rational.
pub fn build_r_p_squared(space: &ManinSpace, p: u64) -> Result<OperatorHandle, Error> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidParameter(format!("twist prime must be odd, got {p}")));
    }
    if space.level() as u64 % (p * p) != 0 {
        return Err(Error::InvalidParameter(format!(
            "R_p^2 needs p^2 | N; level {} fails at p = {p}",
            space.level()
        )));
    }
    let mut terms = Vec::new();
    for l in 1..p {
        terms.push((
            rat_int(legendre(l as i64, p)),
            IntMatrix2::new(p as i64, l as i64, 0, p as i64)?,
        ));
    }
    let d = act(space, &OperatorSpec::new(format!("twist-sum[{p}]"), terms))?;
    let scale = rat_int(1) / rat_int(legendre(-1, p) * p as i64);
    let matrix = d.mul(&d).scale(&scale);
    Ok(OperatorHandle::new(space, format!("R_{p}^2"), matrix))
}

/// The square of the twist by the character `(-1 | .)`, defined for
/// `16 | N`: `-(1/4) (A_1 - A_3)^2` with `A_s = [4, s; 0, 4]`.
pub fn build_r_chi_squared(space: &ManinSpace) -> Result<OperatorHandle, Error> {
    if space.level() % 16 != 0 {
        return Err(Error::InvalidParameter(format!(
            "R_chi^2 needs 16 | N, got N = {}",
            space.level()
        )));
    }
    let terms = vec![
        (rat_int(1), IntMatrix2::new(4, 1, 0, 4)?),
        (rat_int(-1), IntMatrix2::new(4, 3, 0, 4)?),
    ];
    let d = act(space, &OperatorSpec::new("chi-twist-sum".to_string(), terms))?;
    let matrix = d.mul(&d).scale(&rat_int(-1)).scale(&(rat_int(1) / rat_int(4)));
    Ok(OperatorHandle::new(space, "R_chi^2".to_string(), matrix))
}

pub fn valuation(n: u64, p: u64) -> u32 {
    let mut n = n;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}
