//! Cusps and unimodular path decomposition.
//!
//! Any path between cusps decomposes into unimodular pieces through the
//! convergents of a continued fraction; each piece is `g {0, oo}` for an
//! integral matrix `g` of determinant one, which is exactly a Manin symbol.

use num_integer::Integer;

/// A cusp `num/den` in lowest terms with `den >= 0`; infinity is `1/0`.
///
/// Cusps are identified up to sign, matching the projective convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cusp {
    pub num: i128,
    pub den: i128,
}

impl Cusp {
    pub fn infinity() -> Self {
        Cusp { num: 1, den: 0 }
    }

    pub fn zero() -> Self {
        Cusp { num: 0, den: 1 }
    }

    pub fn new(num: i128, den: i128) -> Self {
        if den == 0 {
            assert!(num != 0, "0/0 is not a cusp");
            return Cusp::infinity();
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        Cusp { num: n, den: d }
    }

    pub fn is_infinity(&self) -> bool {
        self.den == 0
    }

    /// Fractional-linear image under an integer matrix with nonzero determinant.
    pub fn apply(&self, m: &[i128; 4]) -> Cusp {
        Cusp::new(m[0] * self.num + m[1] * self.den, m[2] * self.num + m[3] * self.den)
    }
}

impl std::fmt::Display for Cusp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_infinity() {
            write!(f, "oo")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Signed unimodular pieces of the path `{alpha, beta}`.
///
/// Each entry `(s, g)` contributes `s * (g {0, oo})` with `det g = 1`; the
/// signed sum telescopes from `alpha` to `beta`.
pub fn path_pieces(alpha: &Cusp, beta: &Cusp) -> Vec<(i8, [i128; 4])> {
    let mut out = pieces_from_infinity(beta);
    for (s, g) in pieces_from_infinity(alpha) {
        out.push((-s, g));
    }
    out
}

/// Pieces of `{oo, x}`.
fn pieces_from_infinity(x: &Cusp) -> Vec<(i8, [i128; 4])> {
    if x.is_infinity() {
        return Vec::new();
    }
    let conv = convergents(x.num, x.den);
    let mut out = Vec::with_capacity(conv.len());
    // {oo, p_0/1} = -([1, p_0; 0, 1] {0, oo}).
    out.push((-1, [1, conv[0].0, 0, 1]));
    for l in 1..conv.len() {
        let (pl, ql) = conv[l];
        let (pp, qp) = conv[l - 1];
        let sign = if l % 2 == 1 { 1 } else { -1 };
        out.push((1, [pl, sign * pp, ql, sign * qp]));
    }
    out
}

/// Continued-fraction convergents of `a/b` with `b > 0`, ending exactly at `a/b`.
fn convergents(a: i128, b: i128) -> Vec<(i128, i128)> {
    debug_assert!(b > 0);
    let (mut num, mut den) = (a, b);
    let (mut p_prev, mut q_prev) = (1i128, 0i128);
    let (mut p_cur, mut q_cur) = (num.div_euclid(den), 1i128);
    let mut out = vec![(p_cur, q_cur)];
    let mut rem = num - p_cur * den;
    while rem != 0 {
        num = den;
        den = rem;
        let q = num.div_euclid(den);
        rem = num - q * den;
        let p_next = q * p_cur + p_prev;
        let q_next = q * q_cur + q_prev;
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
        out.push((p_cur, q_cur));
    }
    debug_assert_eq!((p_cur, q_cur), (a / a.gcd(&b) * if b < 0 { -1 } else { 1 }, b / a.gcd(&b)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det(m: &[i128; 4]) -> i128 {
        m[0] * m[3] - m[1] * m[2]
    }

    /// The signed pieces must telescope: as a 0-chain,
    /// sum of s * ([g oo] - [g 0]) = [beta] - [alpha].
    fn check_telescoping(alpha: Cusp, beta: Cusp) {
        let pieces = path_pieces(&alpha, &beta);
        let mut chain: Vec<(Cusp, i64)> = Vec::new();
        let mut bump = |c: Cusp, w: i64| {
            if let Some(e) = chain.iter_mut().find(|(x, _)| *x == c) {
                e.1 += w;
            } else {
                chain.push((c, w));
            }
        };
        for (s, g) in &pieces {
            assert_eq!(det(g), 1, "piece must be unimodular");
            bump(Cusp::infinity().apply(g), *s as i64);
            bump(Cusp::zero().apply(g), -(*s as i64));
        }
        bump(beta, -1);
        bump(alpha, 1);
        assert!(chain.iter().all(|(_, w)| *w == 0), "telescoping failed: {chain:?}");
    }

    #[test]
    fn telescoping_various_paths() {
        let cases = [
            (Cusp::zero(), Cusp::infinity()),
            (Cusp::infinity(), Cusp::new(1, 5)),
            (Cusp::new(2, 7), Cusp::new(-3, 11)),
            (Cusp::new(-17, 5), Cusp::new(22, 9)),
            (Cusp::new(0, 1), Cusp::new(1, 5)),
        ];
        for (a, b) in cases {
            check_telescoping(a, b);
        }
    }

    #[test]
    fn trivial_path_is_empty_sum() {
        // {alpha, alpha} gives pieces that cancel pairwise.
        let a = Cusp::new(3, 7);
        let pieces = path_pieces(&a, &a);
        // beta-pieces and alpha-pieces are identical with opposite signs.
        let n = pieces.len();
        assert_eq!(n % 2, 0);
        for i in 0..n / 2 {
            assert_eq!(pieces[i].1, pieces[i + n / 2].1);
            assert_eq!(pieces[i].0, -pieces[i + n / 2].0);
        }
    }

    #[test]
    fn cusp_normalization() {
        assert_eq!(Cusp::new(2, 4), Cusp::new(1, 2));
        assert_eq!(Cusp::new(3, -6), Cusp::new(-1, 2));
        assert_eq!(Cusp::new(-5, 0), Cusp::infinity());
        let w = [0i128, -1, 1, 0];
        assert_eq!(Cusp::zero().apply(&w), Cusp::infinity());
        assert_eq!(Cusp::infinity().apply(&w), Cusp::zero());
    }
}
