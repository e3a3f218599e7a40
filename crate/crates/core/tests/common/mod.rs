//! Graph corpora shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashSet;

use linforest::graph::MultiGraph;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn graph(n: usize, edges: &[(usize, usize)]) -> MultiGraph {
    MultiGraph::from_edges(n, edges).unwrap()
}

pub fn cycle(n: usize) -> MultiGraph {
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    graph(n, &edges)
}

pub fn path(n: usize) -> MultiGraph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    graph(n, &edges)
}

pub fn k4() -> MultiGraph {
    graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
}

pub fn petersen() -> MultiGraph {
    graph(
        10,
        &[
            (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
            (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
            (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
        ],
    )
}

/// Multiplicity matrix as a canonical key, minimised over the vertex
/// permutations that preserve a refined degree colouring.
fn canonical_key(n: usize, mult: &[Vec<u8>]) -> Vec<u8> {
    let deg: Vec<u32> = (0..n).map(|v| mult[v].iter().map(|&x| x as u32).sum()).collect();
    let mut colour: Vec<Vec<u32>> = (0..n)
        .map(|v| {
            let mut c: Vec<u32> = (0..n)
                .flat_map(|w| std::iter::repeat_n(deg[w], mult[v][w] as usize))
                .collect();
            c.sort_unstable();
            c.insert(0, deg[v]);
            c
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| colour[a].cmp(&colour[b]));
    // permute only inside runs of equal colour
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match classes.last_mut() {
            Some(c) if colour[c[0]] == colour[v] => c.push(v),
            _ => classes.push(vec![v]),
        }
    }
    colour.clear();
    let mut best: Option<Vec<u8>> = None;
    let mut perm = Vec::with_capacity(n);
    fn rec(
        classes: &[Vec<usize>],
        ci: usize,
        perm: &mut Vec<usize>,
        mult: &[Vec<u8>],
        best: &mut Option<Vec<u8>>,
    ) {
        if ci == classes.len() {
            let n = perm.len();
            let mut key = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    key.push(mult[perm[i]][perm[j]]);
                }
            }
            if best.as_ref().is_none_or(|b| key < *b) {
                *best = Some(key);
            }
            return;
        }
        let mut class = classes[ci].clone();
        permute(&mut class, 0, &mut |p| {
            let len = perm.len();
            perm.extend_from_slice(p);
            rec(classes, ci + 1, perm, mult, best);
            perm.truncate(len);
        });
    }
    fn permute(a: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
        if k == a.len() {
            f(a);
            return;
        }
        for i in k..a.len() {
            a.swap(k, i);
            permute(a, k + 1, f);
            a.swap(k, i);
        }
    }
    rec(&classes, 0, &mut perm, mult, &mut best);
    best.unwrap()
}

/// Every connected loopless multigraph with `n` vertices, maximum degree
/// at most 3 and at most two parallel edges per pair, up to isomorphism.
pub fn connected_subcubic(n: usize) -> Vec<MultiGraph> {
    if n == 1 {
        return vec![MultiGraph::new(1)];
    }
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut mult = vec![vec![0u8; n]; n];
    let mut deg = vec![0u8; n];
    fn rec(
        idx: usize,
        pairs: &[(usize, usize)],
        n: usize,
        mult: &mut Vec<Vec<u8>>,
        deg: &mut Vec<u8>,
        seen: &mut HashSet<Vec<u8>>,
        out: &mut Vec<MultiGraph>,
    ) {
        if idx == pairs.len() {
            // degrees non-increasing in vertex order removes most relabelings
            if deg.windows(2).any(|w| w[0] < w[1]) || deg.contains(&0) {
                return;
            }
            let mut edges = Vec::new();
            for &(i, j) in pairs {
                for _ in 0..mult[i][j] {
                    edges.push((i, j));
                }
            }
            let g = MultiGraph::from_edges(n, &edges).unwrap();
            if !g.is_connected() {
                return;
            }
            if seen.insert(canonical_key(n, mult)) {
                out.push(g);
            }
            return;
        }
        let (i, j) = pairs[idx];
        // once vertex i's pairs are done its degree is final; keep order
        for k in 0..=2u8 {
            if deg[i] + k > 3 || deg[j] + k > 3 {
                break;
            }
            mult[i][j] = k;
            mult[j][i] = k;
            deg[i] += k;
            deg[j] += k;
            let last_of_i = j == n - 1;
            let ok = !last_of_i || i == 0 || deg[i] <= deg[i - 1];
            if ok {
                rec(idx + 1, pairs, n, mult, deg, seen, out);
            }
            deg[i] -= k;
            deg[j] -= k;
        }
        mult[i][j] = 0;
        mult[j][i] = 0;
    }
    rec(0, &pairs, n, &mut mult, &mut deg, &mut seen, &mut out);
    out
}

/// Random multigraph with maximum degree 3, at most two parallel edges per
/// pair, and exactly `m` edges when reachable.
pub fn random_subcubic(rng: &mut impl Rng, n: usize, m: usize) -> MultiGraph {
    let mut g = MultiGraph::new(n);
    let mut attempts = 0;
    while g.edge_count() < m && attempts < 50 * m + 100 {
        attempts += 1;
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v || g.deg(u) >= 3 || g.deg(v) >= 3 || g.edges_between(u, v).len() >= 2 {
            continue;
        }
        g.add_edge(u, v).unwrap();
    }
    g
}

/// Random simple-or-multi graph with at most `m` edges, no degree cap.
pub fn random_multigraph(rng: &mut impl Rng, n: usize, m: usize) -> MultiGraph {
    let mut g = MultiGraph::new(n);
    if n < 2 {
        return g;
    }
    for _ in 0..m {
        let u = rng.gen_range(0..n);
        let mut v = rng.gen_range(0..n - 1);
        if v >= u {
            v += 1;
        }
        g.add_edge(u, v).unwrap();
    }
    g
}

/// Random (3,B2) formula on `n` variables (`n` divisible by 3): literal
/// occurrences are shuffled into clauses until every clause has three
/// distinct literals.
pub fn random_3b2(rng: &mut impl Rng, n: usize) -> linforest::gadgets::Cnf3B2 {
    use rand::seq::SliceRandom;
    let mut occ: Vec<(usize, bool)> = (0..n).flat_map(|v| [(v, true), (v, true), (v, false), (v, false)]).collect();
    loop {
        occ.shuffle(rng);
        let clauses: Vec<[(usize, bool); 3]> = occ.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
        if let Ok(f) = linforest::gadgets::Cnf3B2::new(n, clauses) {
            return f;
        }
    }
}

/// Random monotone formula with `m` clauses in which every variable occurs
/// at least twice.
pub fn random_mnae(rng: &mut impl Rng, n: usize, m: usize) -> linforest::gadgets::CnfMnae {
    loop {
        let clauses: Vec<[usize; 3]> =
            (0..m).map(|_| [rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)]).collect();
        let f = linforest::gadgets::CnfMnae::new(n, clauses).unwrap();
        if f.occurrences().iter().all(|&c| c >= 2) {
            return f;
        }
    }
}
