//! One test per acceptance criterion. Each prints a single
//! `criterion N: PASS|FAIL (...)` line before asserting, so
//! `cargo test --test acceptance -- --nocapture` gives the scorecard.
//!
//! All comparisons of kernels and tree sets are exact; the only tolerances
//! are the wall-clock budgets below.

mod common;

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use birkhoff_trees::enumeration::{
    enumerate_valid, graft_comb, tree_class, EnumConfig, TreeClassQuery,
};
use birkhoff_trees::evaluator::{EvalConfig, Evaluator};
use birkhoff_trees::hamiltonian::{h0, rat};
use birkhoff_trees::oracle::{
    birkhoff_iterate, compare, generator_by_recursion, nested_bracket, sequences, truncation_term,
};
use birkhoff_trees::trees::{
    parse, raw_symmetry_factor, symmetry_factor, validate_tree, AssumptionMode, DecoratedTree,
    Decoration,
};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

const BUDGET_TREE_SETS: Duration = Duration::from_secs(1);
const BUDGET_SYMMETRY: Duration = Duration::from_secs(10);
const BUDGET_CANCELLATION: Duration = Duration::from_secs(60);
const BUDGET_THEOREM: Duration = Duration::from_secs(600);
const BUDGET_PROPERTIES: Duration = Duration::from_secs(60);
const PROPERTY_CASES: u32 = 1000;
/// Largest degree of the pieces combs are assembled from in criterion 2.
const COMB_PIECE_DEGREE: usize = 8;
/// Longest comb tail tried in criterion 2.
const COMB_MAX_TAIL: usize = 3;
/// Degree bound for the exhaustive additivity check of criterion 3.
const ADDITIVITY_DEGREE: usize = 12;

const MODE: AssumptionMode = AssumptionMode::ProofOrder;

fn report(n: u32, ok: bool, detail: &str) {
    println!(
        "criterion {n}: {} ({detail})",
        if ok { "PASS" } else { "FAIL" }
    );
}

fn tree(s: &str) -> DecoratedTree {
    parse(s).unwrap()
}

fn s_of(s: &str) -> u64 {
    symmetry_factor(&tree(s), 0, MODE).unwrap()
}

#[test]
fn criterion_1_tree_sets() {
    let start = Instant::now();
    let cfg = EnumConfig::default();
    let expected: Vec<(TreeClassQuery, Vec<&str>)> = vec![
        (TreeClassQuery::res_below(3), vec!["(r)"]),
        (
            TreeClassQuery::circ_exact(3),
            vec!["(o (o) (n))", "(o (o (k) (n)) (n))"],
        ),
        (TreeClassQuery::n_exact(2), vec!["(n)"]),
        (
            TreeClassQuery::n_exact(3),
            vec!["(n (o) (n))", "(n (o (k) (n)) (n))"],
        ),
        (
            TreeClassQuery::circ_range(3, 4),
            vec!["(o (o (o) (n)) (n))", "(o (o (o (k) (n)) (n)) (n))"],
        ),
        (
            TreeClassQuery::res_below(4),
            vec!["(r)", "(r (o) (n))", "(r (o (k) (n)) (n))"],
        ),
        (
            TreeClassQuery::circ_exact(4),
            vec![
                "(o (o (o) (n)) (n))",
                "(o (o (o (k) (n)) (n)) (n))",
                "(o (r) (n (o) (n)))",
                "(o (r) (n (o (k) (n)) (n)))",
            ],
        ),
    ];
    let mut bad = Vec::new();
    for (q, want) in &expected {
        let got: BTreeSet<String> = tree_class(q, &cfg)
            .unwrap()
            .canonical_strings()
            .into_iter()
            .collect();
        let want: BTreeSet<String> = want.iter().map(|s| tree(s).canonical()).collect();
        if got != want {
            bad.push(format!("{q}: got {got:?}"));
        }
    }
    let elapsed = start.elapsed();
    let ok = bad.is_empty() && elapsed < BUDGET_TREE_SETS;
    report(
        1,
        ok,
        &format!(
            "{} sets, {} mismatched, {elapsed:.2?}",
            expected.len(),
            bad.len()
        ),
    );
    assert!(ok, "{bad:?} in {elapsed:?}");
}

/// Combs `graft_comb(base, tail, ∘)` with pieces of degree ≤ 8, tails of equal
/// degree and length ≤ 3, kept when valid and when the base does not itself
/// extend the comb. Returns (checked, failures).
fn comb_property() -> (usize, Vec<String>) {
    let all = enumerate_valid(COMB_PIECE_DEGREE, &EnumConfig::default()).unwrap();
    let bases: Vec<&DecoratedTree> = all.iter().filter(|t| t.root() != Decoration::N).collect();
    let gens: Vec<&DecoratedTree> = all.iter().filter(|t| t.root() == Decoration::N).collect();
    let mut checked = 0;
    let mut failures = Vec::new();
    for deg in (4..=COMB_PIECE_DEGREE).step_by(2) {
        let pieces: Vec<&DecoratedTree> =
            gens.iter().copied().filter(|t| t.degree() == deg).collect();
        let mut tails: Vec<Vec<DecoratedTree>> = vec![Vec::new()];
        for _ in 1..=COMB_MAX_TAIL {
            tails = tails
                .iter()
                .flat_map(|t| {
                    pieces.iter().map(move |g| {
                        let mut t = t.clone();
                        t.push((*g).clone());
                        t
                    })
                })
                .collect();
            for base in &bases {
                let extends = matches!(base, DecoratedTree::Node(Decoration::Circ, _, r) if r.degree() == deg);
                if extends {
                    continue;
                }
                for tail in &tails {
                    let comb = graft_comb(base, tail, Decoration::Circ).unwrap();
                    if !validate_tree(&comb, MODE).valid {
                        continue;
                    }
                    checked += 1;
                    let p = tail.len() as u64;
                    let want = (1..=p).product::<u64>()
                        * symmetry_factor(base, 0, MODE).unwrap()
                        * tail
                            .iter()
                            .map(|t| symmetry_factor(t, 0, MODE).unwrap())
                            .product::<u64>();
                    let got = symmetry_factor(&comb, 0, MODE).unwrap();
                    if got != want {
                        failures.push(format!("{comb}: S = {got}, expected {want}"));
                    }
                }
            }
        }
    }
    (checked, failures)
}

#[test]
fn criterion_2_symmetry_factors() {
    let start = Instant::now();
    let first = s_of("(o (o) (n))");
    let second = s_of("(r (o (k) (n)) (n))");

    // The displayed 2!·3! example: r-rooted, left child (∘; k, n), right child
    // any T3 (rooted n by rule a) with S(T3) = 3!.
    let pool = enumerate_valid(14, &EnumConfig::default()).unwrap();
    let left = tree("(o (k) (n))");
    let mut candidates = 0;
    let mut valid_hits = Vec::new();
    let mut seen = Vec::new();
    for t3 in pool.iter().filter(|t| t.root() == Decoration::N) {
        if symmetry_factor(t3, 0, MODE).unwrap() != 6 {
            continue;
        }
        candidates += 1;
        let t = DecoratedTree::node(Decoration::R, left.clone(), t3.clone());
        let valid = validate_tree(&t, MODE).valid;
        let raw = raw_symmetry_factor(&t, 0);
        if seen.len() < 3 {
            seen.push(format!("{t}: valid={valid} S_raw={raw}"));
        }
        if valid && raw == 12 {
            valid_hits.push(t.canonical());
        }
    }
    let twelve_ok = !valid_hits.is_empty();

    let (checked, failures) = comb_property();
    let elapsed = start.elapsed();
    let ok = first == 1
        && second == 2
        && twelve_ok
        && failures.is_empty()
        && checked > 0
        && elapsed < BUDGET_SYMMETRY;
    report(
        2,
        ok,
        &format!(
            "S={first},{second}; 2!3! example: {candidates} candidates with S(T3)=6, {} valid with S=12; \
             comb property {checked} combs, {} failures; {elapsed:.2?}",
            valid_hits.len(),
            failures.len()
        ),
    );
    if !twelve_ok {
        println!("  the r-rooted tree with left child (o (k) (n)) takes the comb branch only when |T3| = 4,");
        println!("  which forces T3 = (n) and S = 2; otherwise S = S(T3). Samples: {seen:?}");
        let alt =
            tree("(o (o (o (r) (n (o) (n))) (n (o (o (k) (n)) (n)) (n))) (n (r) (n (o) (n))))");
        println!(
            "  a valid tree with S = 2!*3! in a different shape exists: {alt} has S = {}",
            symmetry_factor(&alt, 0, MODE).unwrap()
        );
    }
    assert_eq!(first, 1);
    assert_eq!(second, 2);
    assert!(failures.is_empty(), "{failures:?}");
    assert!(checked > 0);
    assert!(elapsed < BUDGET_SYMMETRY, "{elapsed:?}");
    assert!(
        twelve_ok,
        "no valid tree of the displayed 2!3! shape has S = 12"
    );
}

#[test]
fn criterion_3_degree() {
    let examples = [tree("(o (o) (n))"), tree("(r (o (k) (n)) (n))")];
    let ex_ok = examples.iter().all(|t| t.degree() == 6);
    let all = enumerate_valid(ADDITIVITY_DEGREE, &EnumConfig::default()).unwrap();
    fn check(t: &DecoratedTree) -> bool {
        // leaf count form: 2 per k, 4 per other leaf, minus 2 per internal node
        fn parts(t: &DecoratedTree) -> (usize, usize) {
            match t {
                DecoratedTree::Leaf(Decoration::K) => (2, 0),
                DecoratedTree::Leaf(_) => (4, 0),
                DecoratedTree::Node(_, l, r) => {
                    let (a, b) = parts(l);
                    let (c, d) = parts(r);
                    (a + c, b + d + 1)
                }
            }
        }
        let (leaves, internal) = parts(t);
        let here = leaves - 2 * internal == t.degree();
        match t.children() {
            Some((l, r)) => {
                here && t.degree() == l.degree() + r.degree() - 2 && check(l) && check(r)
            }
            None => here,
        }
    }
    let failures = all.iter().filter(|t| !check(t)).count();
    let ok = ex_ok && failures == 0;
    report(
        3,
        ok,
        &format!(
            "examples |T|=6: {ex_ok}; additivity on {} trees, {failures} failures",
            all.len()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_4_cancellation() {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    for n in [0u64, 3] {
        for i in [1usize, 2] {
            let cfg = EvalConfig::d1(2, n, 2 * (i + 1)).unwrap();
            let res = Evaluator::new(cfg, EnumConfig::default())
                .cancellation_check(i)
                .unwrap();
            ok &= res.is_empty();
            lines.push(format!("N={n} i={i}: {} terms", res.len()));
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed < BUDGET_CANCELLATION;
    report(4, ok, &format!("{}; {elapsed:.2?}", lines.join(", ")));
    assert!(ok, "{lines:?}");
}

#[test]
fn criterion_5_main_theorem() {
    let start = Instant::now();
    let cases = [(1, 2, 0), (1, 3, 0), (2, 3, 0), (2, 4, 0), (1, 3, 3)];
    let mut lines = Vec::new();
    let mut ok = true;
    for (m, ell, n) in cases {
        let cfg = EvalConfig::d1(2, n, 2 * ell).unwrap();
        let nf = Evaluator::new(cfg, EnumConfig::default())
            .normal_form(m, ell)
            .unwrap();
        let run = birkhoff_iterate(m, ell, &cfg).unwrap();
        let diff = compare(&nf.total, &run.normal_form).unwrap();
        ok &= diff.equal;
        lines.push(format!(
            "(m={m},l={ell},N={n}): {} trees, residual {}",
            nf.entries.len(),
            diff.residual.len()
        ));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < BUDGET_THEOREM;
    report(5, ok, &format!("{}; {elapsed:.2?}", lines.join(", ")));
    assert!(ok, "{lines:?}");
}

#[test]
fn criterion_6_generators() {
    let mut lines = Vec::new();
    let mut ok = true;
    for k in [1i64, 2] {
        let cfg = EvalConfig::d1(k, 0, 8).unwrap();
        let run = birkhoff_iterate(3, 4, &cfg).unwrap();
        let mut ev = Evaluator::new(cfg, EnumConfig::default());
        for i in 1..=3 {
            let ledger = ev.f_transform(i).unwrap();
            let recursion = generator_by_recursion(i, &run.generators[..i - 1], &cfg).unwrap();
            let same = ledger.total == run.generators[i - 1] && ledger.total == recursion;
            ok &= same && !ledger.total.is_empty();
            lines.push(format!(
                "K={k} F{i}: {} trees {}",
                ledger.entries.len(),
                if same { "equal" } else { "differ" }
            ));
        }
    }
    report(6, ok, &lines.join(", "));
    assert!(ok, "{lines:?}");
}

#[test]
fn criterion_7_bracket_properties() {
    use common::*;
    let start = Instant::now();
    let runner = || {
        TestRunner::new_with_rng(
            Config {
                cases: PROPERTY_CASES,
                failure_persistence: None,
                ..Config::default()
            },
            TestRng::deterministic_rng(RngAlgorithm::ChaCha),
        )
    };
    fn flat<T: std::fmt::Debug>(
        r: Result<(), proptest::test_runner::TestError<T>>,
    ) -> Result<(), String> {
        r.map_err(|e| e.to_string())
    }
    let c = PROPERTY_CUTOFF;
    let results = [
        (
            "antisymmetry",
            flat(runner().run(&(small_kernel(c), small_kernel(c)), |(a, b)| {
                check_antisymmetry(&a, &b)
            })),
        ),
        (
            "Jacobi",
            flat(runner().run(
                &(small_kernel(c), small_kernel(c), small_kernel(c)),
                |(a, b, k)| check_jacobi(&a, &b, &k),
            )),
        ),
        (
            "degree law",
            flat(runner().run(
                &(
                    monomial(1, 2, 3),
                    monomial(1, 2, 3),
                    small_kernel(c),
                    small_kernel(c),
                ),
                |(x, y, a, b)| {
                    check_monomial_degree(&x, &y)?;
                    check_degree_law(&a, &b)
                },
            )),
        ),
        (
            "momentum closure",
            flat(
                runner().run(&(balanced_kernel(c), balanced_kernel(c)), |(a, b)| {
                    check_momentum_closure(&a, &b)
                }),
            ),
        ),
        (
            "phase additivity",
            flat(
                runner().run(&(monomial(1, 2, 3), monomial(1, 2, 3)), |(x, y)| {
                    check_phase_additivity(&x, &y)
                }),
            ),
        ),
    ];
    let elapsed = start.elapsed();
    let failed: Vec<String> = results
        .iter()
        .filter_map(|(n, r)| r.as_ref().err().map(|e| format!("{n}: {e}")))
        .collect();
    let ok = failed.is_empty() && elapsed < BUDGET_PROPERTIES;
    report(
        7,
        ok,
        &format!(
            "{} properties x {PROPERTY_CASES} cases, {} failed; {elapsed:.2?}",
            results.len(),
            failed.len()
        ),
    );
    assert!(ok, "{failed:?}");
}

#[test]
fn criterion_8_truncation_combinatorics() {
    let seqs = sequences(3, 3);
    let symbolic: Vec<(Vec<usize>, num_rational::BigRational)> = seqs
        .iter()
        .map(|s| (s.z.clone(), rat(1, s.c as i64)))
        .collect();
    let want = vec![
        (vec![1, 1, 1], rat(1, 6)),
        (vec![1, 2], rat(1, 1)),
        (vec![3], rat(1, 1)),
    ];
    let symbolic_ok = symbolic == want;

    // R_3^3(h0) against the three brackets written out by hand
    let cfg = EvalConfig::d1(1, 0, 8).unwrap();
    let run = birkhoff_iterate(3, 4, &cfg).unwrap();
    let fs = &run.generators;
    let g = h0(cfg.lattice, 8);
    let mut hand = nested_bracket(&g, &[1, 1, 1], fs)
        .unwrap()
        .scale_rational(&rat(1, 6));
    hand.add_assign(&g.bracket(&fs[0]).unwrap().bracket(&fs[1]).unwrap())
        .unwrap();
    hand.add_assign(&g.bracket(&fs[2]).unwrap()).unwrap();
    let numeric = truncation_term(&g, 3, 3, fs).unwrap();
    let numeric_ok = numeric == hand && !numeric.is_empty();
    let ok = symbolic_ok && numeric_ok;
    report(
        8,
        ok,
        &format!("sequences {symbolic:?}; R_3^3(h0) matches hand expansion: {numeric_ok}"),
    );
    assert!(ok);
}

#[test]
fn criterion_9_determinism() {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_birkhoff"))
            .args(["expand", "--m", "2", "--ell", "4"])
            .env_remove("BIRKHOFF_CONFIG")
            .output()
            .unwrap()
    };
    let (a, b) = (run(), run());
    let ok =
        a.status.success() && b.status.success() && !a.stdout.is_empty() && a.stdout == b.stdout;
    report(
        9,
        ok,
        &format!(
            "two runs, {} and {} bytes of stdout, identical: {}",
            a.stdout.len(),
            b.stdout.len(),
            a.stdout == b.stdout
        ),
    );
    assert!(ok);
}
