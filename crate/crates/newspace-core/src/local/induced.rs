//! Decomposition of the induced representation `I(n)`.
//!
//! `I(n)` is realized as functions on the right cosets `K_0 \ K`, so right
//! translation `pi_R` permutes coordinates. The simultaneous eigenvectors of
//! the finite Hecke algebra (acting by left convolution `pi_L`) seed the
//! irreducible components; each component is the span of the `pi_R`-orbit of
//! its seed, computed as an exact orbit closure.

use num_traits::Zero;

use super::hecke::HeckeElement;
use super::model::{CosetModel, DoubleCoset, LocalParams, ResidueMatrix};
use super::relations::eigenvector_table;
use crate::linalg::{kernel, rat_int, QMatrix, Rational, Subspace};
use crate::Error;

/// Permutation matrix of `pi_R(g)` on the coset basis of `I(n)`.
///
/// `pi_R(g) phi (x) = phi(x g)`, so the coset `K_0 h` is sent to `K_0 h g^-1`
/// as an index map on indicator functions; equivalently the indicator of
/// `K_0 h` maps to the indicator of `K_0 h g`.
pub fn right_translation_matrix(model: &CosetModel, g: &ResidueMatrix) -> QMatrix {
    let dim = model.right_cosets().len();
    let mut m = QMatrix::zeros(dim, dim);
    for (i, rep) in model.right_cosets().iter().enumerate() {
        let j = model.coset_index(&rep.mul(g));
        m.set(j, i, rat_int(1));
    }
    m
}

/// Matrix of `pi_L(X_class)` on the coset-indicator basis.
///
/// `pi_L(f) phi (x) = sum over left cosets a K_0 in supp(f) of phi(a^-1 x)`;
/// on indicators the entry at `(h, g)` counts representatives `a` with
/// `a^-1 h` in `K_0 g`.
pub fn left_convolution_matrix(model: &CosetModel, class: DoubleCoset) -> QMatrix {
    let params = model.params();
    let dim = model.right_cosets().len();
    let mut m = QMatrix::zeros(dim, dim);
    for (hi, h) in model.right_cosets().iter().enumerate() {
        for alpha in model.class_left_reps(class) {
            let x = alpha.inverse(params).mul(h);
            let gi = model.coset_index(&x);
            let cur = m.get(hi, gi).clone();
            m.set(hi, gi, cur + rat_int(1));
        }
    }
    m
}

/// Trace of `pi_L` of a basis element on `I(n)`.
///
/// Expected: `0` for `U_0` and every `V_r`, and `dim I(n)` for `X_1`.
pub fn pi_l_trace(params: &LocalParams, class: DoubleCoset) -> Result<i64, Error> {
    let model = CosetModel::build(*params)?;
    let m = left_convolution_matrix(&model, class);
    let t = m.trace();
    debug_assert!(t.is_integer());
    Ok(t.to_integer().try_into().expect("trace fits in i64"))
}

/// Generators of the image of `K_0(p^m)` in `GL_2(Z/p^n)`, `0 <= m <= n`.
///
/// `x(1)`, `y(p^m)` and diagonal generators `d(u)`, `d'(u) = [1,0;0,u]` for
/// `u` ranging over generators of the unit group (`-1` and `5` for `p = 2`).
pub fn k0_generators(params: &LocalParams, m: u32) -> Vec<ResidueMatrix> {
    let p = params.p() as i64;
    let mut gens = vec![
        ResidueMatrix::upper(params, 1),
        ResidueMatrix::lower(params, p.pow(m)),
    ];
    for u in unit_generators(params) {
        gens.push(ResidueMatrix::diag(params, u).expect("unit generator"));
        gens.push(
            ResidueMatrix::new(params, 1, 0, 0, u).expect("unit generator"),
        );
    }
    gens
}

/// Generators of `(Z/p^n)^*`: a single smallest generator for odd `p`,
/// and `{-1, 5}` for `p = 2`.
pub fn unit_generators(params: &LocalParams) -> Vec<i64> {
    let p = params.p();
    let modulus = params.modulus();
    if p == 2 {
        if params.n() == 1 {
            return vec![1];
        }
        return vec![modulus as i64 - 1, 5 % modulus as i64];
    }
    let phi = p.pow(params.n() - 1) * (p - 1);
    'candidate: for u in 2..modulus {
        if u % p == 0 {
            continue;
        }
        // u generates iff u^(phi/q) != 1 for every prime q | phi.
        for (q, _) in crate::modsym::p1::factorize(phi) {
            if mod_pow(u, phi / q, modulus) == 1 {
                continue 'candidate;
            }
        }
        return vec![u as i64];
    }
    unreachable!("(Z/p^n)^* is cyclic for odd p")
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

/// The fixed subspace of the image of `K_0(p^m)` acting by `pi_R`.
pub fn k0_fixed_subspace(model: &CosetModel, m: u32) -> Subspace {
    let params = model.params();
    let dim = model.right_cosets().len();
    let mut stacked: Option<QMatrix> = None;
    for g in k0_generators(params, m) {
        let diff = right_translation_matrix(model, &g).sub(&QMatrix::identity(dim));
        stacked = Some(match stacked {
            None => diff,
            Some(s) => s.stack_vertical(&diff),
        });
    }
    kernel(&stacked.expect("at least one generator"))
}

/// One irreducible component of `I(n)`.
#[derive(Clone, Debug)]
pub struct Component {
    pub name: String,
    pub dim: usize,
    /// Dimension of the `K_0(p^m)`-fixed subspace for `m = 0, ..., n`.
    pub fixed_dims: Vec<usize>,
    pub space: Subspace,
}

/// Full decomposition data for `I(n)`.
#[derive(Clone, Debug)]
pub struct InducedDecomposition {
    pub dim: usize,
    pub components: Vec<Component>,
    /// Traces of `pi_L(U_0)` and `pi_L(V_r)`; all must vanish.
    pub traces: Vec<(String, i64)>,
}

impl InducedDecomposition {
    pub fn component_dims(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.dim).collect()
    }

    /// The component containing the level-`n` new vector: `T_{n-1}` for
    /// `n >= 2`, and the `p`-dimensional component for `n = 1`.
    pub fn new_vector_component(&self) -> &Component {
        self.components.last().expect("decomposition is nonempty")
    }
}

/// Orbit closure of a seed vector under the `pi_R` action of group generators.
fn orbit_closure(seed: Vec<Rational>, generators: &[QMatrix]) -> Subspace {
    let ambient = seed.len();
    let mut space = Subspace::from_rows(ambient, vec![seed]);
    loop {
        let mut new_rows: Vec<Vec<Rational>> = Vec::new();
        for i in 0..space.dim() {
            let v = space.basis().row(i).to_vec();
            for g in generators {
                let w = g.mul_vec(&v);
                if !space.contains_vector(&w)
                    && !new_rows.iter().any(|r| r == &w)
                {
                    new_rows.push(w);
                }
            }
        }
        if new_rows.is_empty() {
            return space;
        }
        let mut rows = space.basis_vectors();
        rows.extend(new_rows);
        space = Subspace::from_rows(ambient, rows);
    }
}

/// Embed a Hecke element (a bi-invariant function) as a vector of `I(n)`:
/// the coordinate at a coset is the coefficient of its double-coset class.
fn hecke_to_vector(model: &CosetModel, e: &HeckeElement) -> Vec<Rational> {
    model
        .labels()
        .iter()
        .map(|l| rat_int(e.coeff(*l)))
        .collect()
}

/// Decompose `I(n)` into its `n+1` irreducible components.
///
/// Components are spanned by the `pi_R`-orbits of the Hecke eigenvectors;
/// their dimensions must come out as `1`, `p` and `p^(k-1)(p^2-1)` for
/// `1 <= k <= n-1`, summing to `p^(n-1)(p+1)`. The component of the new
/// vector is additionally certified to have a one-dimensional
/// `K_0(p^n)`-fixed subspace and none at any lower level.
pub fn induced_decomposition(params: &LocalParams) -> Result<InducedDecomposition, Error> {
    let model = CosetModel::build(*params)?;
    let n = params.n();
    let p = params.p() as i64;
    let dim = model.right_cosets().len();

    // pi_R matrices for a generating set of GL_2(Z/p^n).
    let mut group_gens = vec![
        ResidueMatrix::upper(params, 1),
        ResidueMatrix::lower(params, 1),
    ];
    for u in unit_generators(params) {
        group_gens.push(ResidueMatrix::diag(params, u)?);
    }
    let gen_matrices: Vec<QMatrix> =
        group_gens.iter().map(|g| right_translation_matrix(&model, g)).collect();

    // Seeds: the Hecke eigenvectors of the (n+1)-dimensional fixed algebra.
    let seeds: Vec<(String, HeckeElement)> = if n == 1 {
        let u0 = HeckeElement::u0(n);
        let y1 = HeckeElement::y(n, 1);
        vec![
            ("S_1".into(), u0.add(&y1)),
            ("S_2".into(), u0.sub(&y1.scale(p))),
        ]
    } else {
        eigenvector_table(params)?
            .into_iter()
            .map(|row| {
                let name = if row.name == "v_1" {
                    "S_1".to_string()
                } else if row.name == "v_2" {
                    "S_2".to_string()
                } else {
                    format!("T_{}", &row.name[2..])
                };
                (name, row.vector)
            })
            .collect()
    };

    let mut components = Vec::new();
    let mut total = 0usize;
    for (name, seed) in seeds {
        let vec = hecke_to_vector(&model, &seed);
        assert!(vec.iter().any(|x| !x.is_zero()));
        let space = orbit_closure(vec, &gen_matrices);
        let mut fixed_dims = Vec::new();
        for m in 0..=n {
            let fixed = k0_fixed_subspace(&model, m);
            fixed_dims.push(space.intersect(&fixed).dim());
        }
        total += space.dim();
        components.push(Component { name, dim: space.dim(), fixed_dims, space });
    }
    assert_eq!(total, dim, "component dimensions must sum to dim I(n)");

    let mut traces = vec![(
        "U_0".to_string(),
        pi_l_trace(params, DoubleCoset::W0)?,
    )];
    for r in 1..n {
        traces.push((format!("V_{r}"), pi_l_trace(params, DoubleCoset::V(r))?));
    }

    Ok(InducedDecomposition { dim, components, traces })
}

/// Expected component dimensions `{1, p}` joined with `p^(k-1)(p^2-1)`.
pub fn expected_component_dims(params: &LocalParams) -> Vec<usize> {
    let p = params.p();
    let mut dims = vec![1usize, p as usize];
    for k in 1..params.n() {
        dims.push((p.pow(k - 1) * (p * p - 1)) as usize);
    }
    dims
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decomposition_p3_n2() {
        let params = LocalParams::new(3, 2).unwrap();
        let dec = induced_decomposition(&params).unwrap();
        assert_eq!(dec.dim, 12);
        assert_eq!(dec.component_dims(), vec![1, 3, 8]);
        for (name, t) in &dec.traces {
            assert_eq!(*t, 0, "trace of {name}");
        }
    }

    #[test]
    fn decomposition_p2_n3() {
        let params = LocalParams::new(2, 3).unwrap();
        let dec = induced_decomposition(&params).unwrap();
        assert_eq!(dec.component_dims(), vec![1, 2, 3, 6]);
        assert_eq!(dec.dim, 12);
    }

    #[test]
    fn new_vector_uniqueness_p2_n2() {
        // T_1 at (2,2) has a 1-dim K_0(4)-fixed space and none for K_0(2).
        let params = LocalParams::new(2, 2).unwrap();
        let dec = induced_decomposition(&params).unwrap();
        let t1 = dec.new_vector_component();
        assert_eq!(t1.name, "T_1");
        assert_eq!(t1.fixed_dims[2], 1);
        assert_eq!(t1.fixed_dims[1], 0);
        assert_eq!(t1.fixed_dims[0], 0);
    }

    #[test]
    fn trace_of_identity_is_dimension() {
        let params = LocalParams::new(3, 2).unwrap();
        assert_eq!(pi_l_trace(&params, DoubleCoset::Id).unwrap(), 12);
        assert_eq!(pi_l_trace(&params, DoubleCoset::W0).unwrap(), 0);
        assert_eq!(pi_l_trace(&params, DoubleCoset::V(1)).unwrap(), 0);
    }

    #[test]
    fn fixed_space_of_whole_group_is_constants() {
        let params = LocalParams::new(2, 2).unwrap();
        let model = CosetModel::build(params).unwrap();
        // m = 0 gives all of GL_2, whose fixed vectors are the constants.
        assert_eq!(k0_fixed_subspace(&model, 0).dim(), 1);
        // m = n gives K_0(p^n) itself; fixed space is the Hecke algebra.
        assert_eq!(k0_fixed_subspace(&model, 2).dim(), 3);
    }
}
