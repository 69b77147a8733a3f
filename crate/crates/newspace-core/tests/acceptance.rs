//! Acceptance gate: one test per criterion, each printing a pass/fail line.
//!
//! Everything is exact arithmetic — the tolerance of every identity is zero.
//! Runtime bounds are asserted where the criterion states one.

use std::time::Instant;

use newspace_core::cache::SpaceCache;
use newspace_core::local::{
    eigenvector_table, induced_decomposition, verify_local_relations, LocalParams,
};
use newspace_core::modsym::dim_formula_oracle;
use newspace_core::newform::checks::{
    check_lemma_suite, check_operator_identities, check_section6, check_theorem,
};
use newspace_core::newform::TheoremId;
use newspace_core::report::CheckReport;
use newspace_core::runner::{
    run_check, run_convolution_oracle, run_suite, CheckSelector, SuiteGrid,
};

fn criterion(number: u32, pass: bool, detail: String) {
    println!(
        "acceptance criterion {number}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "acceptance criterion {number} failed: {detail}");
}

fn all_pass(reports: &[CheckReport]) -> Result<(), String> {
    match reports.iter().find(|r| !r.pass) {
        None => Ok(()),
        Some(r) => Err(format!("{} failed: {}", r.id, r.detail)),
    }
}

#[test]
fn criterion_01_local_relations() {
    let grid = [(2u64, 2u32), (3, 2), (5, 2), (2, 3), (3, 3), (2, 4)];
    let mut detail = String::new();
    let mut pass = true;
    for (p, n) in grid {
        let start = Instant::now();
        let reports = verify_local_relations(&LocalParams::new(p, n).unwrap()).unwrap();
        let elapsed = start.elapsed();
        if let Err(e) = all_pass(&reports) {
            pass = false;
            detail = format!("({p}, {n}): {e}");
            break;
        }
        if elapsed.as_secs() >= 10 {
            pass = false;
            detail = format!("({p}, {n}) took {elapsed:?}, over the 10 s budget");
            break;
        }
        detail = format!("all relations hold on the grid, last ({p}, {n}) in {elapsed:?}");
    }
    // The Iwahori-level quadratic U_0^2 = (p-1) U_0 + p for p in {2,3,5,7}.
    for p in [2u64, 3, 5, 7] {
        let reports = verify_local_relations(&LocalParams::new(p, 1).unwrap()).unwrap();
        if let Err(e) = all_pass(&reports) {
            pass = false;
            detail = format!("(p, 1) = ({p}, 1): {e}");
        }
    }
    criterion(1, pass, detail);
}

#[test]
fn criterion_02_convolution_oracle() {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = String::new();
    for (p, n) in [(2u64, 2u32), (2, 3), (3, 2)] {
        let reports = run_convolution_oracle(p, n).unwrap();
        let expected = ((n + 1) * (n + 1)) as usize;
        if reports.len() != expected {
            pass = false;
            detail = format!("({p}, {n}): expected {expected} basis pairs, got {}", reports.len());
            break;
        }
        if let Err(e) = all_pass(&reports) {
            pass = false;
            detail = format!("({p}, {n}): {e}");
            break;
        }
    }
    let elapsed = start.elapsed();
    if pass {
        detail = format!("convolution equals group-enumeration oracle on all basis pairs in {elapsed:?}");
        if elapsed.as_secs() >= 60 {
            pass = false;
            detail = format!("oracle comparison took {elapsed:?}, over the 60 s budget");
        }
    }
    criterion(2, pass, detail);
}

#[test]
fn criterion_03_eigenvalue_table() {
    let grid = [(2u64, 2u32), (3, 2), (5, 2), (2, 3), (3, 3), (2, 4)];
    let mut pass = true;
    let mut detail = String::from("eigenvector tables match the symbolic values entry for entry");
    'outer: for (p, n) in grid {
        let rows = eigenvector_table(&LocalParams::new(p, n).unwrap()).unwrap();
        let pi = p as i64;
        for (idx, row) in rows.iter().enumerate() {
            let (expect_u0, expect_y): (i64, Vec<i64>) = match idx {
                0 => (pi.pow(n), (1..=n).map(|r| pi.pow(n - r)).collect()),
                1 => (-pi.pow(n - 1), (1..=n).map(|r| pi.pow(n - r)).collect()),
                k => {
                    let k = k as u32 - 2 + 1; // w_k with k = idx - 1
                    (0, (1..=n).map(|r| if r <= k { 0 } else { pi.pow(n - r) }).collect())
                }
            };
            if !row.verified || row.u0_eigenvalue != expect_u0 || row.y_eigenvalues != expect_y {
                pass = false;
                detail = format!(
                    "({p}, {n}) row {}: got U_0 -> {}, Y -> {:?}; expected {expect_u0}, {expect_y:?}",
                    row.name, row.u0_eigenvalue, row.y_eigenvalues
                );
                break 'outer;
            }
        }
    }
    criterion(3, pass, detail);
}

#[test]
fn criterion_04_induced_decomposition() {
    let grid = [(2u64, 2u32), (3, 2), (5, 2), (2, 3), (3, 3), (2, 4)];
    let mut pass = true;
    let mut detail = String::from(
        "component dimensions, vanishing traces and new-vector fixed spaces all certified",
    );
    'outer: for (p, n) in grid {
        let params = LocalParams::new(p, n).unwrap();
        let dec = induced_decomposition(&params).unwrap();
        let mut expected = vec![1usize, p as usize];
        for k in 1..n {
            expected.push((p.pow(k - 1) * (p * p - 1)) as usize);
        }
        if dec.component_dims() != expected
            || dec.component_dims().iter().sum::<usize>() != (p.pow(n - 1) * (p + 1)) as usize
        {
            pass = false;
            detail = format!("({p}, {n}): dims {:?}, expected {expected:?}", dec.component_dims());
            break;
        }
        for (name, t) in &dec.traces {
            if *t != 0 {
                pass = false;
                detail = format!("({p}, {n}): trace of {name} is {t}, expected 0");
                break 'outer;
            }
        }
        let sigma = dec.new_vector_component();
        if sigma.fixed_dims[n as usize] != 1 || sigma.fixed_dims[n as usize - 1] != 0 {
            pass = false;
            detail = format!(
                "({p}, {n}): new-vector component fixed dims {:?}",
                sigma.fixed_dims
            );
            break;
        }
    }
    criterion(4, pass, detail);
}

#[test]
fn criterion_05_dimension_cross_check() {
    let mut pass = true;
    let mut detail = String::new();
    'outer: for (w, max) in [(2u32, 100u32), (4, 40)] {
        for n in 1..=max {
            let space = SpaceCache::in_memory().get(n, w).unwrap();
            let expected = 2 * dim_formula_oracle(n as u64, w).unwrap() as usize;
            if space.cuspidal_dim() != expected {
                pass = false;
                detail = format!(
                    "(N, w) = ({n}, {w}): cuspidal dim {} != 2 * oracle {expected}",
                    space.cuspidal_dim()
                );
                break 'outer;
            }
        }
    }
    // Spot values from the genus formula.
    for (n, expect) in [(11u64, 1u64), (22, 2), (37, 2)] {
        if dim_formula_oracle(n, 2).unwrap() != expect {
            pass = false;
            detail = format!("oracle spot value at level {n}: expected {expect}");
        }
    }
    if pass {
        detail =
            "cuspidal dims equal twice the formula for N <= 100 (w=2) and N <= 40 (w=4)".into();
    }
    criterion(5, pass, detail);
}

#[test]
fn criterion_06_operator_identities() {
    let grid = SuiteGrid::default();
    let mut levels: Vec<u32> = Vec::new();
    levels.extend(&grid.t1_w2);
    levels.extend(&grid.t2);
    levels.extend(&grid.t3);
    levels.extend(&grid.t5);
    levels.extend(&grid.lemmas);
    levels.extend(&grid.section6);
    levels.sort_unstable();
    levels.dedup();
    let cache = SpaceCache::in_memory();
    let mut pass = true;
    let mut detail = format!(
        "quadratic/cubic/involution identities and cross-prime commutation on {} levels",
        levels.len()
    );
    for n in levels {
        let reports = check_operator_identities(&cache, n, 2).unwrap();
        if let Err(e) = all_pass(&reports) {
            pass = false;
            detail = format!("level {n}: {e}");
            break;
        }
    }
    for &n in &grid.t1_w4 {
        let reports = check_operator_identities(&cache, n, 4).unwrap();
        if let Err(e) = all_pass(&reports) {
            pass = false;
            detail = format!("(N, w) = ({n}, 4): {e}");
            break;
        }
    }
    criterion(6, pass, detail);
}

#[test]
fn criterion_07_theorem_one_grid() {
    let grid = SuiteGrid::default();
    let start = Instant::now();
    let cache = SpaceCache::in_memory();
    let mut pass = true;
    let mut detail = String::new();
    for (&w, levels) in [(&2u32, &grid.t1_w2), (&4, &grid.t1_w4)] {
        for &n in levels {
            let reports = check_theorem(&cache, n, w, TheoremId::T1, false).unwrap();
            if let Err(e) = all_pass(&reports) {
                pass = false;
                detail = format!("(N, w) = ({n}, {w}): {e}");
            }
        }
    }
    let elapsed = start.elapsed();
    if pass {
        detail = format!(
            "new space equals the joint -1 eigenspace at {} square-free levels in {elapsed:?}",
            grid.t1_w2.len() + grid.t1_w4.len()
        );
        if elapsed.as_secs() >= 300 {
            pass = false;
            detail = format!("theorem suite took {elapsed:?}, over the 5 min budget");
        }
    }
    criterion(7, pass, detail);
}

#[test]
fn criterion_08_theorem_two_grid() {
    let grid = SuiteGrid::default();
    let cache = SpaceCache::in_memory();
    let mut pass = true;
    let mut detail = format!("both descriptions agree with the oracle at {:?}", grid.t2);
    for &n in &grid.t2 {
        for which in [TheoremId::T2, TheoremId::T2Prime] {
            let reports = check_theorem(&cache, n, 2, which, false).unwrap();
            if let Err(e) = all_pass(&reports) {
                pass = false;
                detail = format!("level {n} {}: {e}", which.name());
            }
        }
    }
    criterion(8, pass, detail);
}

#[test]
fn criterion_09_theorem_three_grid() {
    let grid = SuiteGrid::default();
    let cache = SpaceCache::in_memory();
    let mut pass = true;
    let mut detail = format!("general-level characterization holds at {:?}", grid.t3);
    for &n in &grid.t3 {
        let reports = check_theorem(&cache, n, 2, TheoremId::T3, false).unwrap();
        if let Err(e) = all_pass(&reports) {
            pass = false;
            detail = format!("level {n}: {e}");
        }
    }
    criterion(9, pass, detail);
}

#[test]
fn criterion_10_theorem_five_grid() {
    let grid = SuiteGrid::default();
    let cache = SpaceCache::in_memory();
    let mut pass = true;
    let mut detail = format!("twist-square characterization holds at {:?}", grid.t5);
    for &n in &grid.t5 {
        let reports = check_theorem(&cache, n, 2, TheoremId::T5, false).unwrap();
        if let Err(e) = all_pass(&reports) {
            pass = false;
            detail = format!("level {n}: {e}");
        }
    }
    criterion(10, pass, detail);
}

#[test]
fn criterion_11_lemma_suite() {
    let grid = SuiteGrid::default();
    let cache = SpaceCache::in_memory();
    let mut pass = true;
    let mut detail = format!("transfer-image identities hold at {:?}", grid.lemmas);
    for &n in &grid.lemmas {
        let reports = check_lemma_suite(&cache, n, 2).unwrap();
        if let Err(e) = all_pass(&reports) {
            pass = false;
            detail = format!("level {n}: {e}");
        }
    }
    criterion(11, pass, detail);
}

#[test]
fn criterion_12_old_space_characterization() {
    let grid = SuiteGrid::default();
    let cache = SpaceCache::in_memory();
    let mut pass = true;
    let mut detail = format!(
        "all signature cases and direct-sum reconstruction hold at {:?}",
        grid.section6
    );
    for &n in &grid.section6 {
        let reports = check_section6(&cache, n, 2, false).unwrap();
        if let Err(e) = all_pass(&reports) {
            pass = false;
            detail = format!("level {n}: {e}");
        }
    }
    criterion(12, pass, detail);
}

#[test]
fn criterion_13_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let render = || {
        let cache = SpaceCache::with_dir(dir.path());
        let mut out = String::new();
        out.push_str(
            &run_check(&cache, 33, 2, CheckSelector::Theorem(TheoremId::T1), false)
                .unwrap()
                .to_json(),
        );
        out.push_str(&run_check(&cache, 20, 2, CheckSelector::Auto, false).unwrap().to_json());
        out.push_str(&run_check(&cache, 22, 2, CheckSelector::Section6, false).unwrap().to_json());
        out
    };
    let cold = render(); // populates the cache directory
    let warm = render(); // reuses it
    let entries = SpaceCache::with_dir(dir.path()).status().unwrap();
    let pass = cold == warm && !entries.is_empty();
    criterion(
        13,
        pass,
        format!(
            "cold and warm cache runs produced byte-identical reports ({} bytes, {} cached spaces)",
            cold.len(),
            entries.len()
        ),
    );
}

#[test]
fn full_suite_runner() {
    // The CLI-facing grid runner end to end, in parallel; this is the same
    // entry point `newspace check --suite` uses.
    let cache = SpaceCache::in_memory();
    let set = run_suite(&cache, false, 4).unwrap();
    assert!(set.all_pass(), "suite failures: {}", set.to_text());
    assert!(set.checks.len() > 2000, "suite ran only {} checks", set.checks.len());
}

#[test]
fn auto_and_lemma_selectors() {
    let cache = SpaceCache::in_memory();
    let set = run_check(&cache, 46, 2, CheckSelector::Auto, false).unwrap();
    assert!(set.all_pass());
    let set = run_check(&cache, 46, 2, CheckSelector::Lemmas, false).unwrap();
    assert!(set.all_pass());
    let rep = newspace_core::newform::checks::check_decomposition(&cache, 46, 2).unwrap();
    assert!(rep.pass);
    let t1 = run_check(&cache, 22, 2, CheckSelector::Theorem(TheoremId::T1), false).unwrap();
    assert!(t1.all_pass());
}
