//! Acceptance gate: runs every criterion and prints one line per criterion.
//! Exits non-zero when a criterion that is expected to pass fails.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use common::*;
use linforest::decomp::{verify, BoundSpec};
use linforest::factor::{brute_factor, brute_max_matching, max_matching, solve_factor, DegreeSet, FactorInstance};
use linforest::gadgets::*;
use linforest::girth9::*;
use linforest::graph::{MultiGraph, RotationSystem};
use linforest::oracle::{solve_exact, Outcome};
use linforest::poly21::{solve21, Solve21};
use rand::Rng;
use rayon::prelude::*;

#[derive(PartialEq)]
enum Status {
    Pass,
    Fail,
}

struct Line {
    status: Status,
    detail: String,
    /// A failure recorded as known and documented rather than a regression.
    known: bool,
}

fn check(ok: bool, detail: String) -> Line {
    Line { status: if ok { Status::Pass } else { Status::Fail }, detail, known: false }
}

fn poly21_agrees(g: &MultiGraph, budget: u64) -> Option<bool> {
    let b = BoundSpec::finite(2, 1);
    let exact = solve_exact(g, &b, budget);
    let exact_yes = match exact.outcome {
        Outcome::Yes(_) => true,
        Outcome::No => false,
        Outcome::Timeout => return None,
    };
    Some(match solve21(g).unwrap() {
        Solve21::Yes(lab) => exact_yes && verify(g, &lab, &b).is_ok(),
        Solve21::No(_) => !exact_yes,
    })
}

fn criterion1() -> Line {
    let exhaustive: Vec<MultiGraph> = (1..=7).flat_map(connected_subcubic).collect();
    let bad_small = exhaustive.par_iter().filter(|g| poly21_agrees(g, 10_000_000) != Some(true)).count();
    let mut r = rng(1);
    let random: Vec<MultiGraph> = (0..500)
        .map(|_| loop {
            let m = r.gen_range(20..=60);
            let n = r.gen_range((2 * m + 2) / 3..=m);
            let g = random_subcubic(&mut r, n, m);
            if g.edge_count() == m {
                break g;
            }
        })
        .collect();
    let results: Vec<Option<bool>> = random.par_iter().map(|g| poly21_agrees(g, 10_000_000)).collect();
    let skipped = results.iter().filter(|x| x.is_none()).count();
    let bad_random = results.iter().filter(|x| **x == Some(false)).count();
    check(
        bad_small == 0 && bad_random == 0,
        format!(
            "{} exhaustive graphs, {} random graphs ({} over budget): {} disagreements",
            exhaustive.len(),
            500 - skipped,
            skipped,
            bad_small + bad_random
        ),
    )
}

fn criterion2() -> Line {
    let cases = [
        (ForcerKind::Long1, BoundSpec::finite(4, 1)),
        (ForcerKind::Long1, BoundSpec::finite(5, 1)),
        (ForcerKind::Short1, BoundSpec::finite(4, 1)),
        (ForcerKind::Short1, BoundSpec::finite(5, 1)),
        (ForcerKind::Short { k: 3, l: 2 }, BoundSpec::finite(3, 2)),
        (ForcerKind::Short { k: 5, l: 3 }, BoundSpec::finite(5, 3)),
        (ForcerKind::Long { k: 3, l: 2 }, BoundSpec::finite(3, 2)),
        (ForcerKind::Long { k: 5, l: 3 }, BoundSpec::finite(5, 3)),
        (ForcerKind::Symmetric { k: 2 }, BoundSpec::finite(2, 2)),
        (ForcerKind::Symmetric { k: 3 }, BoundSpec::finite(3, 3)),
        (ForcerKind::LongInf { k: 2 }, BoundSpec::inf(2)),
        (ForcerKind::LongInf { k: 3 }, BoundSpec::inf(3)),
        (ForcerKind::PathForcer { k: 2 }, BoundSpec::inf(2)),
        (ForcerKind::PathForcer { k: 3 }, BoundSpec::inf(3)),
    ];
    let failed: Vec<String> = cases
        .par_iter()
        .filter_map(|(kind, b)| {
            let rep = check_forcer_property(*kind, b).unwrap();
            (!rep.passed()).then(|| format!("{kind} under {b}"))
        })
        .collect();
    check(failed.is_empty(), format!("{} forcer settings, failing: {failed:?}", cases.len()))
}

fn criterion3() -> Line {
    let mut parts = Vec::new();
    let mut all_pass = true;
    let mut any_mutation = false;
    for (a, k, l) in [(2, 2, 2), (2, 3, 2), (2, 3, 3)] {
        let start = Instant::now();
        let rep = check_alpha_gadget(a, k, l).unwrap();
        let mutation = mutation_check(a, k, l).unwrap();
        all_pass &= rep.passed();
        any_mutation |= mutation.is_some();
        parts.push(format!(
            "({a},{k},{l}) {} with {} decompositions, mutation {} [{:.1}s]",
            if rep.passed() { "ok" } else { "FAILS" },
            rep.count,
            match &mutation {
                Some((e, _)) => format!("removing edge {e} breaks it"),
                None => "breaks nothing".to_string(),
            },
            start.elapsed().as_secs_f64()
        ));
    }
    check(all_pass && any_mutation, parts.join("; "))
}

/// Every MNAE formula with 2 to 4 variables and 1 to 3 clauses in which each
/// variable occurs at least twice, up to renaming variables.
fn small_mnae() -> Vec<CnfMnae> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for n in 2..=4usize {
        let triples: Vec<[usize; 3]> = (0..n)
            .flat_map(|a| (a..n).flat_map(move |b| (b..n).map(move |c| [a, b, c])))
            .collect();
        let mut stack: Vec<Vec<usize>> = (0..triples.len()).map(|i| vec![i]).collect();
        while let Some(idx) = stack.pop() {
            if idx.len() < 3 {
                for j in *idx.last().unwrap()..triples.len() {
                    let mut next = idx.clone();
                    next.push(j);
                    stack.push(next);
                }
            }
            let clauses: Vec<[usize; 3]> = idx.iter().map(|&i| triples[i]).collect();
            let f = CnfMnae::new(n, clauses.clone()).unwrap();
            if f.occurrences().iter().any(|&c| c < 2) {
                continue;
            }
            let key = canonical_mnae(n, &clauses);
            if seen.insert((n, key)) {
                out.push(f);
            }
        }
    }
    out
}

fn canonical_mnae(n: usize, clauses: &[[usize; 3]]) -> Vec<[usize; 3]> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<[usize; 3]>> = None;
    loop {
        let mut c: Vec<[usize; 3]> = clauses
            .iter()
            .map(|t| {
                let mut x = t.map(|v| perm[v]);
                x.sort_unstable();
                x
            })
            .collect();
        c.sort_unstable();
        if best.as_ref().map_or(true, |b| c < *b) {
            best = Some(c);
        }
        // next permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
    best.unwrap()
}

fn criterion4() -> Line {
    let mut r = rng(4);
    let mut formulas = Vec::new();
    let mut keys = BTreeSet::new();
    while formulas.len() < 50 {
        let f = random_3b2(&mut r, 3);
        let mut key: Vec<[(usize, bool); 3]> = f
            .clauses
            .iter()
            .map(|c| {
                let mut c = *c;
                c.sort_unstable();
                c
            })
            .collect();
        key.sort_unstable();
        if keys.insert(key) {
            formulas.push(f);
        }
    }
    let mut witnesses = 0usize;
    let mut failures = 0usize;
    for f in &formulas {
        let reds = [reduce_3b2_to_k1(f), reduce_3b2_to_infk(f, 2).unwrap(), reduce_3b2_to_infk(f, 3).unwrap()];
        for phi in all_sat(&Cnf::ThreeB2(f.clone())).unwrap() {
            for red in &reds {
                witnesses += 1;
                let ok = witness_from_assignment(red, &phi).map(|lab| verify(&red.g, &lab, &red.bounds()).is_ok());
                failures += usize::from(ok != Ok(true));
            }
        }
    }
    let mnae = small_mnae();
    let mut mnae_sat = 0;
    for f in &mnae {
        let sols = all_sat(&Cnf::Mnae(f.clone())).unwrap();
        if !sols.is_empty() {
            mnae_sat += 1;
        }
        for (k, l) in [(2, 2), (3, 2)] {
            let red = reduce_nae_to_kl(f, k, l).unwrap();
            for phi in &sols {
                witnesses += 1;
                let ok = witness_from_assignment(&red, phi).map(|lab| verify(&red.g, &lab, &red.bounds()).is_ok());
                failures += usize::from(ok != Ok(true));
            }
        }
    }
    check(
        failures == 0,
        format!(
            "50 (3,B2) formulas, {mnae_sat} satisfiable MNAE formulas of {}: {witnesses} witnesses, {failures} failed",
            mnae.len()
        ),
    )
}

fn criterion5() -> Line {
    let chain = |n: usize| -> Vec<[usize; 3]> { (0..n).map(|i| [i, i, (i + 1) % n]).collect() };
    let mut triangle_plus = chain(3);
    triangle_plus.push([0, 1, 2]);
    let unsat_nae = [
        CnfMnae::new(1, vec![[0, 0, 0]]).unwrap(),
        CnfMnae::new(3, chain(3)).unwrap(),
        CnfMnae::new(2, vec![[0, 0, 0], [1, 1, 1]]).unwrap(),
        CnfMnae::new(5, chain(5)).unwrap(),
        CnfMnae::new(3, triangle_plus).unwrap(),
        CnfMnae::new(7, chain(7)).unwrap(),
    ];
    let mut parts = Vec::new();
    let mut kl_ok = true;
    for (k, l) in [(2, 2), (3, 2)] {
        let (mut no, mut skipped, mut yes) = (0, 0, 0);
        for f in &unsat_nae {
            assert!(brute_sat(&Cnf::Mnae(f.clone())).unwrap().is_none());
            let red = reduce_nae_to_kl(f, k, l).unwrap();
            match solve_exact(&red.g, &red.bounds(), 10_000_000).outcome {
                Outcome::No => no += 1,
                Outcome::Timeout => skipped += 1,
                Outcome::Yes(_) => yes += 1,
            }
        }
        kl_ok &= yes == 0 && no >= 1 && no + skipped >= 5;
        parts.push(format!("kl({k},{l}) {no} no, {skipped} skipped, {yes} wrong yes"));
    }
    // unsatisfiable (3,B2) formulas: search the sampled space
    let mut r = rng(5);
    let mut unsat_3b2 = Vec::new();
    for n in [3, 6, 9] {
        for _ in 0..2000 {
            let f = random_3b2(&mut r, n);
            if brute_sat(&Cnf::ThreeB2(f.clone())).unwrap().is_none() {
                unsat_3b2.push(f);
            }
        }
    }
    let mut b2_ok = true;
    for (name, variant) in [("k1", Variant::K1), ("infk(2)", Variant::InfK(2)), ("infk(3)", Variant::InfK(3))] {
        let mut no = 0;
        let mut skipped = 0;
        for f in unsat_3b2.iter().take(5) {
            let red = match variant {
                Variant::InfK(k) => reduce_3b2_to_infk(f, k).unwrap(),
                _ => reduce_3b2_to_k1(f),
            };
            match solve_exact(&red.g, &red.bounds(), 10_000_000).outcome {
                Outcome::No => no += 1,
                Outcome::Timeout => skipped += 1,
                Outcome::Yes(_) => b2_ok = false,
            }
        }
        b2_ok &= no >= 1;
        parts.push(format!("{name} {no} no, {skipped} skipped"));
    }
    parts.push(format!("{} unsatisfiable (3,B2) formulas among 6000 sampled", unsat_3b2.len()));
    Line {
        status: if kl_ok && b2_ok { Status::Pass } else { Status::Fail },
        detail: parts.join("; "),
        // documented: no small unsatisfiable (3,B2) formula is known
        known: kl_ok && unsat_3b2.is_empty(),
    }
}

fn random_degree_set(r: &mut impl Rng) -> DegreeSet {
    match r.gen_range(0..6) {
        0 => DegreeSet::new([1]),
        1 => DegreeSet::new([2]),
        2 => DegreeSet::new([0, 2]),
        3 => DegreeSet::new([1, 2]),
        4 => DegreeSet::new([0, 1, 2]),
        _ => {
            let a = r.gen_range(0..4);
            DegreeSet::interval(a, a + r.gen_range(0..3))
        }
    }
}

fn criterion6() -> Line {
    let mut r = rng(6);
    let mut bad_factor = 0;
    for _ in 0..1000 {
        let n = r.gen_range(2..10);
        let m = r.gen_range(0..=16);
        let h = random_multigraph(&mut r, n, m);
        let sets = (0..n).map(|_| random_degree_set(&mut r)).collect();
        let inst = FactorInstance::new(h, sets).unwrap();
        let fast = solve_factor(&inst).unwrap();
        let ok = match (&fast, brute_factor(&inst).unwrap()) {
            (Some(s), Some(_)) => inst.is_solution(s),
            (None, None) => true,
            _ => false,
        };
        bad_factor += usize::from(!ok);
    }
    let mut bad_matching = 0;
    for _ in 0..500 {
        let (n, m) = (r.gen_range(2..12), r.gen_range(0..=14));
        let g = random_multigraph(&mut r, n, m);
        bad_matching += usize::from(max_matching(&g).len() != brute_max_matching(&g).unwrap());
    }
    check(
        bad_factor == 0 && bad_matching == 0,
        format!("1000 factor instances, 500 matchings: {} disagreements", bad_factor + bad_matching),
    )
}

fn criterion7() -> Line {
    let bases = cubic_planar_bases();
    let find = |name: &str| bases.iter().find(|b| b.0 == name).unwrap();
    let c9 = cycle(9);
    let mut members: Vec<(String, MultiGraph, RotationSystem)> =
        vec![("C9".into(), c9.clone(), RotationSystem::from_adjacency(&c9))];
    let (_, k4, k4r) = find("K4");
    members.push(("K4".into(), k4.clone(), k4r.clone()));
    for name in ["K4", "Q3"] {
        let (_, g, rot) = find(name);
        for t in 1..=2 {
            let (h, r) = subdivide_with_rotation(g, rot, t);
            members.push((format!("{name}/t{t}"), h, r));
        }
    }
    let mut bad = Vec::new();
    for (name, g, rot) in &members {
        let rep = discharging_audit(g, rot);
        if !rep.euler_consistent || rep.total_initial != -12 {
            bad.push(name.clone());
        }
    }
    let p = petersen();
    let prep = discharging_audit(&p, &RotationSystem::from_adjacency(&p));
    let flagged = !prep.euler_consistent;
    check(
        bad.is_empty() && flagged,
        format!(
            "{} planar members total -12 (failing {bad:?}); Petersen flagged non-planar: {flagged} (total {})",
            members.len(),
            prep.total_initial
        ),
    )
}

fn criterion8() -> Line {
    let corpus = standard_corpus();
    let pre_ok = corpus.iter().all(|m| check_preconditions(&m.g, &m.rot).passed());
    let rep = experiment_girth9(&corpus, 10_000_000);
    let (yes, no, to) = (
        rep.count(ExperimentOutcome::Yes),
        rep.count(ExperimentOutcome::No),
        rep.count(ExperimentOutcome::Timeout),
    );
    let direct_no = rep.rows.iter().filter(|r| r.direct == ExperimentOutcome::No).count();
    check(
        pre_ok && corpus.len() >= 20 && no == 0 && direct_no == 0 && to * 5 < corpus.len() && yes + to == corpus.len(),
        format!("{} members, preconditions {pre_ok}: {yes} yes, {no} no, {to} over budget", corpus.len()),
    )
}

fn criterion9() -> Line {
    let produced = sweep_face_hosts();
    let hits = branch_hits();
    let missing: Vec<String> = hits.iter().filter(|h| h.1 == 0).map(|h| format!("{:?}", h.0)).collect();
    match produced {
        Ok(n) => check(
            missing.is_empty(),
            format!("{n} verified extensions, {} branches hit, missing {missing:?}", hits.len() - missing.len()),
        ),
        Err(e) => check(false, e),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Line); 9] = [
        ("(2,1) solver agrees with the exact oracle", criterion1),
        ("forcer decomposition counts and tip conditions", criterion2),
        ("attachment gadget dichotomy and mutation", criterion3),
        ("reduction witnesses verify", criterion4),
        ("reductions of unsatisfiable formulas are no-instances", criterion5),
        ("factor solver and matching agree with brute force", criterion6),
        ("charge audit totals", criterion7),
        ("girth-9 corpus experiment", criterion8),
        ("face extension branch coverage", criterion9),
    ];
    let mut unexpected = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let line = f();
        let tag = match (&line.status, line.known) {
            (Status::Pass, _) => "PASS",
            (Status::Fail, true) => "FAIL (known, documented)",
            (Status::Fail, false) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("criterion {} {tag}: {name}: {} [{:.1}s]", i + 1, line.detail, start.elapsed().as_secs_f64());
    }
    if unexpected > 0 {
        eprintln!("{unexpected} criterion/criteria failed");
        std::process::exit(1);
    }
}
