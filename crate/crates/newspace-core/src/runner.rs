//! Shared drivers behind the CLI and the C interface.
//!
//! Everything here turns library results into [`ReportSet`]s or export
//! payloads with a stable, deterministic ordering: reports are sorted by
//! `(id, level, weight, p, n)` after any parallel evaluation, and no
//! timing data enters the serialized output.

use rayon::prelude::*;

use crate::cache::{matrix_to_entry_pairs, SpaceCache};
use crate::linalg::QMatrix;
use crate::local::{
    brute_force_convolve, convolve, eigenvector_table, induced_decomposition,
    verify_local_relations, CosetModel, DoubleCoset, HeckeElement, LocalParams,
};
use crate::newform::checks::{
    check_lemma_suite, check_operator_identities, check_prime_power_tower, check_section6,
    check_theorem,
};
use crate::newform::oracle::{beta_map, dim_new_oracle, new_symbol_space};
use crate::newform::specs::{
    build_l, build_q, build_r_chi_squared, build_r_p_squared, build_s, build_u_tilde, build_w,
    QVariant,
};
use crate::newform::TheoremId;
use crate::modsym::dims::dim_formula_oracle;
use crate::modsym::ops::hecke_t;
use crate::modsym::p1::factorize;
use crate::report::{CheckInputs, CheckReport, ReportSet, TableReport};
use crate::Error;

/// Sort reports into the canonical deterministic order.
pub fn finalize(mut checks: Vec<CheckReport>) -> ReportSet {
    checks.sort_by(|a, b| {
        (&a.id, a.inputs.level, a.inputs.weight, a.inputs.p, a.inputs.n).cmp(&(
            &b.id,
            b.inputs.level,
            b.inputs.weight,
            b.inputs.p,
            b.inputs.n,
        ))
    });
    ReportSet::new(checks)
}

/// Action selector of the `local` subcommand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalAction {
    Verify,
    Table,
    Decompose,
}

impl LocalAction {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "verify" => Some(LocalAction::Verify),
            "table" => Some(LocalAction::Table),
            "decompose" => Some(LocalAction::Decompose),
            _ => None,
        }
    }
}

/// Output of a runner entry point: reports or a table.
pub enum RunOutput {
    Reports(ReportSet),
    Table(TableReport),
}

impl RunOutput {
    pub fn all_pass(&self) -> bool {
        match self {
            RunOutput::Reports(r) => r.all_pass(),
            RunOutput::Table(t) => t.all_verified(),
        }
    }
}

/// Drive the local layer: relation verification, the eigenvector table, or
/// the decomposition of the induced representation.
pub fn run_local(p: u64, n: u32, action: LocalAction) -> Result<RunOutput, Error> {
    let params = LocalParams::new(p, n)?;
    match action {
        LocalAction::Verify => {
            Ok(RunOutput::Reports(finalize(verify_local_relations(&params)?)))
        }
        LocalAction::Table => {
            let rows = eigenvector_table(&params)?;
            let mut columns = vec!["vector".to_string(), "coeffs".to_string(), "U_0".to_string()];
            for r in 1..=n {
                columns.push(format!("Y_{r}"));
            }
            columns.push("verified".to_string());
            let mut out_rows = Vec::new();
            for row in rows {
                let mut cells = vec![
                    row.name.clone(),
                    row.vector
                        .coeffs()
                        .iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                    row.u0_eigenvalue.to_string(),
                ];
                cells.extend(row.y_eigenvalues.iter().map(|v| v.to_string()));
                cells.push(row.verified.to_string());
                out_rows.push(cells);
            }
            Ok(RunOutput::Table(TableReport {
                title: format!("eigenvectors of H(K//K_0({p}^{n}))"),
                columns,
                rows: out_rows,
            }))
        }
        LocalAction::Decompose => {
            let dec = induced_decomposition(&params)?;
            let inputs = CheckInputs::local(p, n);
            let mut reports = Vec::new();
            let expected = crate::local::induced::expected_component_dims(&params);
            reports.push(CheckReport::identity(
                "local.component-dims",
                inputs.clone(),
                dec.component_dims() == expected,
                format!("components {:?}, expected {:?}", dec.component_dims(), expected),
            ));
            reports.push(CheckReport::identity(
                "local.component-sum",
                inputs.clone(),
                dec.component_dims().iter().sum::<usize>() == dec.dim,
                format!("component dimensions sum to dim I(n) = {}", dec.dim),
            ));
            for (name, t) in &dec.traces {
                reports.push(CheckReport::identity(
                    format!("local.trace-zero[{name}]"),
                    inputs.clone(),
                    *t == 0,
                    format!("trace of the left action of {name} is {t}"),
                ));
            }
            let sigma = dec.new_vector_component();
            let fixed_top = sigma.fixed_dims[n as usize];
            reports.push(CheckReport::identity(
                "local.new-vector-unique",
                inputs.clone(),
                fixed_top == 1,
                format!("{} has a {}-dimensional fixed space at the top level", sigma.name, fixed_top),
            ));
            let lower_fixed: Vec<usize> = sigma.fixed_dims[..n as usize].to_vec();
            reports.push(CheckReport::identity(
                "local.new-vector-no-lower-level",
                inputs,
                lower_fixed.iter().all(|&d| d == 0),
                format!("{} fixed dimensions below the top level: {:?}", sigma.name, lower_fixed),
            ));
            Ok(RunOutput::Reports(finalize(reports)))
        }
    }
}

/// Convolution-oracle equivalence on all basis pairs at `(p, n)`.
pub fn run_convolution_oracle(p: u64, n: u32) -> Result<Vec<CheckReport>, Error> {
    let params = LocalParams::new(p, n)?;
    let model = CosetModel::build(params)?;
    let inputs = CheckInputs::local(p, n);
    let mut reports = Vec::new();
    for i in 0..model.num_classes() {
        for j in 0..model.num_classes() {
            let a = HeckeElement::basis(n, DoubleCoset::from_basis_index(i));
            let b = HeckeElement::basis(n, DoubleCoset::from_basis_index(j));
            let fast = convolve(&a, &b, &model);
            let slow = brute_force_convolve(&a, &b, &params)?;
            reports.push(CheckReport::identity(
                format!(
                    "local.convolution-oracle[{}*{}]",
                    DoubleCoset::from_basis_index(i).label(),
                    DoubleCoset::from_basis_index(j).label()
                ),
                inputs.clone(),
                fast == slow,
                format!("coset convolution {} vs group enumeration {}", fast.display(n), slow.display(n)),
            ));
        }
    }
    Ok(reports)
}

/// Theorem selector of the `check` subcommand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckSelector {
    Auto,
    Theorem(TheoremId),
    Lemmas,
    Section6,
}

impl CheckSelector {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "auto" => Some(CheckSelector::Auto),
            "lemmas" => Some(CheckSelector::Lemmas),
            "section6" => Some(CheckSelector::Section6),
            other => TheoremId::parse(other).map(CheckSelector::Theorem),
        }
    }
}

/// Theorems applicable to the factorization of `n`, in the `auto` order.
pub fn applicable_theorems(n: u32) -> Vec<TheoremId> {
    let f = factorize(n as u64);
    let squarefree = f.iter().all(|&(_, e)| e == 1);
    if squarefree {
        return vec![TheoremId::T1];
    }
    let mut out = Vec::new();
    if f.iter().all(|&(_, e)| e <= 2) {
        out.push(TheoremId::T2);
        out.push(TheoremId::T2Prime);
    }
    out.push(TheoremId::T3);
    if f.iter().any(|&(p, e)| p == 2 && e >= 4) {
        out.push(TheoremId::T5);
    }
    out
}

/// Run the selected family of checks at `(n, w)`.
pub fn run_check(
    cache: &SpaceCache,
    n: u32,
    w: u32,
    selector: CheckSelector,
    star_restrict: bool,
) -> Result<ReportSet, Error> {
    let mut reports = Vec::new();
    match selector {
        CheckSelector::Auto => {
            for t in applicable_theorems(n) {
                reports.extend(check_theorem(cache, n, w, t, star_restrict)?);
            }
            reports.extend(check_operator_identities(cache, n, w)?);
        }
        CheckSelector::Theorem(t) => {
            reports.extend(check_theorem(cache, n, w, t, star_restrict)?);
        }
        CheckSelector::Lemmas => {
            reports.extend(check_lemma_suite(cache, n, w)?);
        }
        CheckSelector::Section6 => {
            let squarefree = factorize(n as u64).iter().all(|&(_, e)| e == 1);
            if squarefree {
                reports.extend(check_section6(cache, n, w, star_restrict)?);
            } else {
                // Prime-power levels go through the inductive corner scheme.
                reports.extend(check_prime_power_tower(cache, n, w)?);
            }
        }
    }
    Ok(finalize(reports))
}

/// The acceptance grid: every level and weight named by the acceptance
/// criteria, with the checks that apply to each.
pub struct SuiteGrid {
    pub local_relations: Vec<(u64, u32)>,
    pub local_iwahori: Vec<u64>,
    pub convolution: Vec<(u64, u32)>,
    pub dims_w2_max: u32,
    pub dims_w4_max: u32,
    pub t1_w2: Vec<u32>,
    pub t1_w4: Vec<u32>,
    pub t2: Vec<u32>,
    pub t3: Vec<u32>,
    pub t5: Vec<u32>,
    pub lemmas: Vec<u32>,
    pub section6: Vec<u32>,
}

impl Default for SuiteGrid {
    fn default() -> Self {
        SuiteGrid {
            local_relations: vec![(2, 2), (3, 2), (5, 2), (2, 3), (3, 3), (2, 4)],
            local_iwahori: vec![2, 3, 5, 7],
            convolution: vec![(2, 2), (2, 3), (3, 2)],
            dims_w2_max: 100,
            dims_w4_max: 40,
            t1_w2: vec![
                14, 15, 21, 22, 26, 30, 33, 34, 35, 38, 39, 42, 46, 51, 55, 57, 58, 62, 65, 66,
                69, 70, 77, 78,
            ],
            t1_w4: vec![14, 15, 21, 26],
            t2: vec![20, 45, 50, 52, 75, 98, 63],
            t3: vec![8, 16, 27, 24, 48, 54, 72, 80, 100],
            t5: vec![16, 48, 80, 144],
            lemmas: vec![22, 33, 20, 45, 50, 8, 16, 24, 48],
            section6: vec![22, 26, 33, 34, 38, 46, 66],
        }
    }
}

/// Units of suite work, one per parallel task.
enum SuiteUnit {
    LocalRelations(u64, u32),
    Convolution(u64, u32),
    LocalDecompose(u64, u32),
    Dims(u32, u32),
    Theorem(u32, u32, TheoremId),
    Lemmas(u32),
    Section6(u32),
    OperatorIds(u32),
}

/// Run the whole default grid; parallel across independent units.
pub fn run_suite(
    cache: &SpaceCache,
    star_restrict: bool,
    parallelism: usize,
) -> Result<ReportSet, Error> {
    let grid = SuiteGrid::default();
    let mut units = Vec::new();
    for &(p, n) in &grid.local_relations {
        units.push(SuiteUnit::LocalRelations(p, n));
        units.push(SuiteUnit::LocalDecompose(p, n));
    }
    for &p in &grid.local_iwahori {
        units.push(SuiteUnit::LocalRelations(p, 1));
    }
    for &(p, n) in &grid.convolution {
        units.push(SuiteUnit::Convolution(p, n));
    }
    for n in 1..=grid.dims_w2_max {
        units.push(SuiteUnit::Dims(n, 2));
    }
    for n in 1..=grid.dims_w4_max {
        units.push(SuiteUnit::Dims(n, 4));
    }
    let mut op_levels: Vec<u32> = Vec::new();
    for &n in &grid.t1_w2 {
        units.push(SuiteUnit::Theorem(n, 2, TheoremId::T1));
        op_levels.push(n);
    }
    for &n in &grid.t1_w4 {
        units.push(SuiteUnit::Theorem(n, 4, TheoremId::T1));
    }
    for &n in &grid.t2 {
        units.push(SuiteUnit::Theorem(n, 2, TheoremId::T2));
        units.push(SuiteUnit::Theorem(n, 2, TheoremId::T2Prime));
        op_levels.push(n);
    }
    for &n in &grid.t3 {
        units.push(SuiteUnit::Theorem(n, 2, TheoremId::T3));
        op_levels.push(n);
    }
    for &n in &grid.t5 {
        units.push(SuiteUnit::Theorem(n, 2, TheoremId::T5));
        op_levels.push(n);
    }
    for &n in &grid.lemmas {
        units.push(SuiteUnit::Lemmas(n));
        op_levels.push(n);
    }
    for &n in &grid.section6 {
        units.push(SuiteUnit::Section6(n));
        op_levels.push(n);
    }
    op_levels.sort_unstable();
    op_levels.dedup();
    for n in op_levels {
        units.push(SuiteUnit::OperatorIds(n));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let results: Vec<Result<Vec<CheckReport>, Error>> = pool.install(|| {
        units
            .par_iter()
            .map(|unit| match *unit {
                SuiteUnit::LocalRelations(p, n) => {
                    verify_local_relations(&LocalParams::new(p, n)?)
                }
                SuiteUnit::Convolution(p, n) => run_convolution_oracle(p, n),
                SuiteUnit::LocalDecompose(p, n) => {
                    match run_local(p, n, LocalAction::Decompose)? {
                        RunOutput::Reports(r) => Ok(r.checks),
                        RunOutput::Table(_) => unreachable!(),
                    }
                }
                SuiteUnit::Dims(n, w) => Ok(vec![dims_cross_check(cache, n, w)?]),
                SuiteUnit::Theorem(n, w, t) => check_theorem(cache, n, w, t, star_restrict),
                SuiteUnit::Lemmas(n) => check_lemma_suite(cache, n, 2),
                SuiteUnit::Section6(n) => check_section6(cache, n, 2, star_restrict),
                SuiteUnit::OperatorIds(n) => check_operator_identities(cache, n, 2),
            })
            .collect()
    });
    let mut reports = Vec::new();
    for r in results {
        reports.extend(r?);
    }
    Ok(finalize(reports))
}

/// Cuspidal dimension vs twice the dimension-formula oracle.
pub fn dims_cross_check(cache: &SpaceCache, n: u32, w: u32) -> Result<CheckReport, Error> {
    let space = cache.get(n, w)?;
    let expected = 2 * dim_formula_oracle(n as u64, w)? as usize;
    Ok(CheckReport::subspaces(
        "dims.cuspidal-vs-oracle",
        CheckInputs::level(n, w),
        space.cuspidal_dim(),
        expected,
        space.cuspidal_dim() == expected,
        "cuspidal dimension equals twice the dimension formula",
    ))
}

/// Parameters accepted by the `emit` subcommand.
#[derive(Clone, Copy, Debug, Default)]
pub struct EmitParams {
    pub p: Option<u64>,
    pub q: Option<u64>,
    pub r: Option<u32>,
    pub j: Option<u32>,
    pub d: Option<u32>,
}

/// Build the requested operator and serialize it to the export schema.
pub fn emit_operator(
    cache: &SpaceCache,
    level: u32,
    weight: u32,
    op: &str,
    params: EmitParams,
) -> Result<String, Error> {
    let space = cache.get(level, weight)?;
    let need_p = || {
        params
            .p
            .ok_or_else(|| Error::InvalidParameter(format!("operator '{op}' needs --p")))
    };
    let (matrix, shape): (QMatrix, Option<(usize, usize)>) = match op {
        "Utilde" => (build_u_tilde(&space, need_p()?)?.matrix, None),
        "W" => {
            let q = params
                .q
                .ok_or_else(|| Error::InvalidParameter("W needs --q, a prime power".into()))?;
            (build_w(&space, q as u32)?.matrix, None)
        }
        "Qp" => (build_q(&space, need_p()?, QVariant::Qp)?.matrix, None),
        "Qp_prime" => (build_q(&space, need_p()?, QVariant::QpPrime)?.matrix, None),
        "Qpn" => (build_q(&space, need_p()?, QVariant::Qpn)?.matrix, None),
        "Qpn_prime" => (build_q(&space, need_p()?, QVariant::QpnPrime)?.matrix, None),
        "Qp2" => (build_q(&space, need_p()?, QVariant::Qp2)?.matrix, None),
        "Qp2_prime" => (build_q(&space, need_p()?, QVariant::Qp2Prime)?.matrix, None),
        "L" => {
            let j = params.j.ok_or_else(|| Error::InvalidParameter("L needs --j".into()))?;
            (build_l(&space, need_p()?, j)?.matrix, None)
        }
        "S" | "S_prime" => {
            let r = params.r.ok_or_else(|| Error::InvalidParameter("S needs --r".into()))?;
            (build_s(&space, need_p()?, r, op == "S_prime")?.matrix, None)
        }
        "Rp_sq" => (build_r_p_squared(&space, need_p()?)?.matrix, None),
        "Rchi_sq" => (build_r_chi_squared(&space)?.matrix, None),
        "T" => {
            let q = params
                .q
                .ok_or_else(|| Error::InvalidParameter("T needs --q, a good prime".into()))?;
            (hecke_t(&space, q)?, None)
        }
        "V" => {
            // The shift transfer: a rectangular map into level d * N.
            let d = params.d.ok_or_else(|| Error::InvalidParameter("V needs --d".into()))?;
            let m = beta_map(cache, weight, level, d * level, d)?;
            let shape = (m.rows(), m.cols());
            (m, Some(shape))
        }
        other => {
            return Err(Error::InvalidParameter(format!("unknown operator '{other}'")));
        }
    };
    let mut payload = serde_json::json!({
        "schema": "newspace.matrix/1",
        "level": level,
        "weight": weight,
        "op": op,
        "entries": matrix_to_entry_pairs(&matrix),
    });
    match shape {
        None => {
            payload["dim"] = serde_json::json!(matrix.rows());
        }
        Some((rows, cols)) => {
            payload["rows"] = serde_json::json!(rows);
            payload["cols"] = serde_json::json!(cols);
        }
    }
    Ok(serde_json::to_string_pretty(&payload).expect("matrix export cannot fail"))
}

/// Quick summary used by the FFI layer: dimensions of a space.
pub fn space_summary(cache: &SpaceCache, n: u32, w: u32) -> Result<(usize, usize, usize), Error> {
    let space = cache.get(n, w)?;
    let new_dim = new_symbol_space(cache, n, w)?.dim();
    let _ = dim_new_oracle(n as u64, w)?;
    Ok((space.dim(), space.cuspidal_dim(), new_dim))
}
