//! Acceptance gate: one test per criterion, each printing a single
//! PASS/FAIL line (run with `--nocapture` to see the lines). The slow
//! q = 11 table row is split into an `#[ignore]`d test; run it with
//! `cargo test --test acceptance -- --ignored` (a few minutes, shardable).

use aont::construct::{additive_matrix, builtin_example, cauchy, vandermonde_aont};
use aont::equiv::classify;
use aont::field::Field;
use aont::matrix::MatrixGF;
use aont::search::{
    run_search, run_sharded_sequential, search_linear, search_reduced, search_symmetric_reduced,
    search_type_q_minus_1, SearchMode, SearchSpec,
};
use aont::table1;
use aont::transform::{
    aont_to_large_set, brute_force_general_search, extract_oa, linear_aont_to_rf,
    linear_to_general, transform_array, tuple_rank, verify_general_aont, verify_resilient,
};

struct Criterion {
    number: u32,
    label: &'static str,
}

impl Criterion {
    fn new(number: u32, label: &'static str) -> Self {
        Criterion { number, label }
    }

    fn check(&self, ok: bool, detail: &str) {
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("criterion {}: {} — {} ({})", self.number, verdict, self.label, detail);
        assert!(ok, "criterion {} failed: {} ({})", self.number, self.label, detail);
    }
}

fn table_row_matches(q: u32) -> (bool, String) {
    let row = table1::run_row(q, 1);
    (
        row.matches(),
        format!(
            "q={}: reduced {} (expected {}), inequivalent {} (expected {})",
            q, row.reduced, row.expected_reduced, row.inequivalent, row.expected_inequivalent
        ),
    )
}

#[test]
fn criterion_1_table1_enumeration() {
    let c = Criterion::new(1, "table of reduced and inequivalent counts, q <= 9");
    let mut details = Vec::new();
    let mut ok = true;
    for q in [3u32, 4, 5, 7, 8, 9] {
        let (m, d) = table_row_matches(q);
        ok &= m;
        details.push(d);
    }
    c.check(ok, &details.join("; "));
}

#[test]
#[ignore = "several minutes of search; covered by the full acceptance run"]
fn criterion_1_table1_enumeration_q11() {
    let c = Criterion::new(1, "table row q = 11");
    let (ok, d) = table_row_matches(11);
    c.check(ok, &d);
}

#[test]
fn criterion_2_fixture_validity() {
    let c = Criterion::new(2, "example fixtures verify and report skew parameters");
    let expected_skew: &[(&str, Option<u16>)] = &[
        ("E1", Some(2)),
        ("E2", None),
        ("E3", Some(4)),
        ("E4", Some(6)),
        ("E289", None),
        ("E5", Some(10)),
    ];
    let mut ok = true;
    let mut details = Vec::new();
    for (name, skew) in expected_skew {
        let m = builtin_example(name).unwrap();
        let valid = m.is_linear_aont(2).unwrap().valid;
        // E289 is not in reduced form, so the detector reports an error
        // rather than a parameter; treat that as "absent"
        let got = m.skew_parameter().ok().flatten();
        ok &= valid && got == *skew;
        details.push(format!("{name}: valid={valid} skew={got:?}"));
    }
    c.check(ok, &details.join("; "));
}

#[test]
fn criterion_3_nonexistence() {
    let c = Criterion::new(3, "searches confirm the nonexistence results");
    let mut ok = true;
    let mut details = Vec::new();

    for q in ["3", "4"] {
        let f = Field::parse(q).unwrap();
        let s = f.order() as usize + 1;
        let n = search_linear(&f, s, 2).unwrap().count;
        ok &= n == 0;
        details.push(format!("(2,{s},{q}): {n}"));
    }
    let f2 = Field::parse("2").unwrap();
    let n232 = search_linear(&f2, 3, 2).unwrap().count;
    ok &= n232 == 0;
    details.push(format!("(2,3,2): {n232}"));

    for q in ["3", "4", "5", "7", "8", "9"] {
        let f = Field::parse(q).unwrap();
        let n = search_type_q_minus_1(&f).count;
        ok &= n == 0;
        details.push(format!("type-(q-1) q={q}: {n}"));
    }

    for (q, expect_empty) in [("3", false), ("5", false), ("7", true), ("11", true)] {
        let f = Field::parse(q).unwrap();
        let n = search_symmetric_reduced(&f).count;
        ok &= (n == 0) == expect_empty;
        details.push(format!("symmetric q={q}: {n}"));
    }
    c.check(ok, &details.join("; "));
}

#[test]
fn criterion_4_construction_theorems() {
    let c = Criterion::new(4, "Vandermonde, Cauchy and additive constructions");
    let mut ok = true;
    let mut details = Vec::new();

    for (n, s) in [(3u32, 7usize), (2, 3)] {
        let m = vandermonde_aont(n, s).unwrap();
        let valid = m.is_linear_aont(2).unwrap().valid;
        ok &= valid;
        details.push(format!("vandermonde n={n} s={s}: {valid}"));
    }

    let f13 = Field::parse("13").unwrap();
    let m = cauchy(&f13, 6, None, None).unwrap();
    for t in 1..=6 {
        ok &= m.is_linear_aont(t).unwrap().valid;
    }
    details.push("cauchy GF(13) s=6 t=1..6: all valid".into());

    for q in ["3", "5", "7"] {
        let f = Field::parse(q).unwrap();
        let m = additive_matrix(&f);
        let s = m.dim();
        let mut all2x2 = true;
        for r1 in 0..s {
            for r2 in r1 + 1..s {
                for c1 in 0..s {
                    for c2 in c1 + 1..s {
                        all2x2 &= m.det_sub(&[r1, r2], &[c1, c2]) != 0;
                    }
                }
            }
        }
        ok &= all2x2 && m.det() == 0;
        details.push(format!("additive q={q}: 2x2 ok={all2x2} det={}", m.det()));
    }
    c.check(ok, &details.join("; "));
}

#[test]
fn criterion_5_characterization_agreement() {
    let c = Criterion::new(5, "matrix criterion agrees with the unbiased-array criterion");
    let mut ok = true;
    let mut details = Vec::new();
    for name in ["E1", "E2", "E3", "E4"] {
        let m = builtin_example(name).unwrap();
        let q = m.field().order() as u64;
        let size = q.pow(m.dim() as u32);
        assert!(size <= 1_000_000, "{name} exceeds the table bound");
        let phi = linear_to_general(&m).unwrap();
        for t in 1..=2 {
            let lemma = m.is_linear_aont(t).unwrap().valid;
            let (array, _) = verify_general_aont(&phi, t).unwrap();
            ok &= lemma == array;
            details.push(format!("{name} t={t}: lemma={lemma} array={array}"));
        }
    }
    c.check(ok, &details.join("; "));
}

#[test]
fn criterion_6_transform_chain() {
    let c = Criterion::new(6, "orthogonal-array, large-set and resilient-function bridges");
    let mut ok = true;
    let mut details = Vec::new();

    let e1 = builtin_example("E1").unwrap();
    let phi1 = linear_to_general(&e1).unwrap();
    let mut oa_ok = true;
    for code in 0..3u16 {
        let oa = extract_oa(&phi1, 2, &[code]).unwrap();
        oa_ok &= oa.verify();
    }
    ok &= oa_ok;
    details.push(format!("extract_oa(E1) all suffixes: {oa_ok}"));

    for name in ["E1", "E3"] {
        let m = builtin_example(name).unwrap();
        let phi = linear_to_general(&m).unwrap();
        let set = aont_to_large_set(&phi, 2).unwrap();
        let v = phi.v() as usize;
        let s = phi.s();
        let mut covered = vec![false; v.pow(s as u32)];
        let mut disjoint = true;
        for oa in &set {
            for r in 0..oa.array.n_rows {
                let row = oa.array.row(r);
                let idx = row.iter().fold(0usize, |acc, &x| acc * v + x as usize);
                disjoint &= !std::mem::replace(&mut covered[idx], true);
            }
        }
        let covering = covered.iter().all(|&b| b);
        ok &= disjoint && covering;
        details.push(format!("large set {name}: disjoint={disjoint} covering={covering}"));
    }

    let e3 = builtin_example("E3").unwrap();
    let rf = linear_aont_to_rf(&e3, 2, None).unwrap();
    let resilient = verify_resilient(&rf).unwrap();
    ok &= resilient;
    details.push(format!("rf(E3,2) (5,3,2,5)-resilient: {resilient}"));
    c.check(ok, &details.join("; "));
}

#[test]
fn criterion_7_brute_force_oracles() {
    let c = Criterion::new(7, "independent brute-force oracles agree with the searches");
    let mut ok = true;
    let mut details = Vec::new();

    // all 4! = 24 and 8! = 40320 bijections: no (1,2,2)- or (1,3,2)-AONT
    for s in [2usize, 3] {
        let found = brute_force_general_search(2, s, 1, true).unwrap();
        ok &= found.is_empty();
        details.push(format!("(1,{s},2) among all bijections: {}", found.len()));
    }

    // pruned search equals naive generate-and-test for q = 3
    let f3 = Field::parse("3").unwrap();
    let pruned = search_reduced(&f3);
    let naive = naive_reduced_gf3(&f3);
    let agree = pruned.matrices == naive;
    ok &= agree;
    details.push(format!("q=3 pruned == naive: {agree}"));

    // sharded searches equal unsharded
    for q in ["3", "4", "5"] {
        let f = Field::parse(q).unwrap();
        let direct = search_reduced(&f);
        let spec = SearchSpec::new(f.clone(), SearchMode::Reduced);
        let sharded = run_sharded_sequential(&spec, 4).unwrap();
        let agree = sharded.matrices == direct.matrices;
        ok &= agree;
        details.push(format!("q={q} sharded == unsharded: {agree}"));
    }
    c.check(ok, &details.join("; "));
}

fn naive_reduced_gf3(f3: &std::sync::Arc<Field>) -> Vec<MatrixGF> {
    // all 3^4 assignments of the four non-fixed cells of the 3x3 template
    let mut found = Vec::new();
    for code in 0..81u16 {
        let mut x = code;
        let mut vals = [0u16; 4];
        for v in vals.iter_mut() {
            *v = x % 3;
            x /= 3;
        }
        let entries = vec![0, vals[0], vals[1], 1, 0, vals[2], 1, vals[3], 0];
        let m = MatrixGF::new(f3.clone(), 3, entries);
        if m.is_reduced() && m.is_linear_aont(2).unwrap().valid {
            found.push(m);
        }
    }
    found.sort_by(|a, b| a.entries().cmp(b.entries()));
    found
}

#[test]
fn criterion_8_property_suites() {
    let c = Criterion::new(8, "field axioms, idempotence, partitions, order independence");
    let mut ok = true;
    let mut details = Vec::new();

    // field axioms, exhaustively, for every order up to 16
    let mut axioms = true;
    for q in [2u16, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
        let f = Field::parse(&q.to_string()).unwrap();
        for a in 0..q {
            for b in 0..q {
                axioms &= f.add(a, b) == f.add(b, a) && f.mul(a, b) == f.mul(b, a);
                axioms &= f.mul(a, f.add(b, 1)) == f.add(f.mul(a, b), f.mul(a, 1));
                for d in 0..q {
                    axioms &= f.add(f.add(a, b), d) == f.add(a, f.add(b, d));
                    axioms &= f.mul(f.mul(a, b), d) == f.mul(a, f.mul(b, d));
                    axioms &= f.mul(a, f.add(b, d)) == f.add(f.mul(a, b), f.mul(a, d));
                }
            }
            axioms &= f.add(a, 0) == a && f.mul(a, 1) == a && f.add(a, f.neg(a)) == 0;
            if a != 0 {
                axioms &= f.mul(a, f.inv(a)) == 1;
            }
        }
        ok &= axioms;
    }
    details.push(format!("field axioms q<=16: {axioms}"));

    // idempotence of the normal forms on every reduced matrix for q <= 5
    let mut idempotent = true;
    for q in ["3", "4", "5"] {
        let f = Field::parse(q).unwrap();
        for m in search_reduced(&f).matrices {
            let (std_form, _) = m.to_standard_form().unwrap();
            let (std_twice, _) = std_form.to_standard_form().unwrap();
            idempotent &= std_form == std_twice;
            let red = m.to_reduced().unwrap();
            idempotent &= red == m && red.to_reduced().unwrap() == red;
        }
    }
    ok &= idempotent;
    details.push(format!("normal forms idempotent q<=5: {idempotent}"));

    // classification yields a partition for q <= 5
    let mut partitions = true;
    for q in ["3", "4", "5"] {
        let f = Field::parse(q).unwrap();
        let all = search_reduced(&f).matrices;
        let out = classify(&all).unwrap();
        let total: usize = out.classes.iter().map(|cl| cl.members.len()).sum();
        partitions &= total == all.len();
        let mut seen = std::collections::BTreeSet::new();
        for cl in &out.classes {
            for m in &cl.members {
                partitions &= seen.insert(m.entries().to_vec());
                partitions &= all.contains(m);
            }
        }
    }
    ok &= partitions;
    details.push(format!("classification partitions q<=5: {partitions}"));

    // reduced counts do not depend on the canonical element order
    let mut order_free = true;
    for q in ["3", "4", "5"] {
        let f = Field::parse(q).unwrap();
        let direct = search_reduced(&f).count;
        let mut spec = SearchSpec::new(f.clone(), SearchMode::Reduced);
        spec.order = Some((0..f.order() as usize).rev().collect());
        order_free &= run_search(&spec).unwrap().count == direct;
    }
    ok &= order_free;
    details.push(format!("order independence q<=5: {order_free}"));

    c.check(ok, &details.join("; "));
}

#[test]
fn criterion_6_supplement_oa_parameters() {
    // the extracted arrays really are OA(2,3,3): 9 rows, 3 columns, index 1
    let e1 = builtin_example("E1").unwrap();
    let phi = linear_to_general(&e1).unwrap();
    let oa = extract_oa(&phi, 2, &[0]).unwrap();
    assert_eq!(oa.t, 2);
    assert_eq!(oa.array.k, 3);
    assert_eq!(oa.array.v, 3);
    assert_eq!(oa.array.n_rows, 9);
    assert_eq!(oa.lambda, 1);
    // spot-check unbiasedness through the independent array path
    let arr = transform_array(&phi);
    assert!(arr.is_unbiased(&[0, 1]));
    let _ = tuple_rank(3, &[1, 2, 0]);
}
