//! Degree-constrained subgraphs ("general factors") for small gap degree
//! sets, solved by a reduction to perfect matching, plus a blossom
//! maximum matching engine.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::graph::{content_lines, parse_edge_block, parse_usize, EdgeId, GraphError, MultiGraph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("vertex {vertex}: degree set {set} is not an interval or a two-point set {{c,c+2}}")]
    UnsupportedSet { vertex: VertexId, set: DegreeSet },
    #[error("vertex {vertex}: degree set {set} is not a small gap set")]
    NotSmallGap { vertex: VertexId, set: DegreeSet },
    #[error("{given} degree sets given for {vertices} vertices")]
    SetCount { given: usize, vertices: usize },
    #[error("{0} edges is too many for exhaustive search (limit {1})")]
    TooLarge(usize, usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A finite set of allowed degrees.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DegreeSet(BTreeSet<usize>);

impl DegreeSet {
    pub fn new(values: impl IntoIterator<Item = usize>) -> Self {
        DegreeSet(values.into_iter().collect())
    }

    pub fn interval(a: usize, b: usize) -> Self {
        DegreeSet::new(a..=b)
    }

    pub fn contains(&self, d: usize) -> bool {
        self.0.contains(&d)
    }

    pub fn values(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    /// The set restricted to `0..=cap`.
    pub fn capped(&self, cap: usize) -> DegreeSet {
        DegreeSet(self.0.range(..=cap).copied().collect())
    }
}

impl fmt::Display for DegreeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str("}")
    }
}

/// Small gap condition on `0..=cap`: whenever `i` and `i+1` are both
/// missing, the set has nothing at or below `i+1`, or nothing at or above `i`.
pub fn is_small_gap(s: &DegreeSet, cap: usize) -> bool {
    let s = s.capped(cap);
    (0..cap).all(|i| {
        if s.contains(i) || s.contains(i + 1) {
            return true;
        }
        s.values().all(|d| d > i + 1) || s.values().all(|d| d < i)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Empty,
    Interval(usize, usize),
    /// `{c, c+2}`
    Gap(usize),
}

fn shape(s: &DegreeSet) -> Option<Shape> {
    let vals: Vec<usize> = s.values().collect();
    match vals.as_slice() {
        [] => Some(Shape::Empty),
        [a, .., b] | [a @ b] if b - a + 1 == vals.len() => Some(Shape::Interval(*a, *b)),
        [c, d] if d - c == 2 => Some(Shape::Gap(*c)),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorInstance {
    pub h: MultiGraph,
    pub sets: Vec<DegreeSet>,
}

impl FactorInstance {
    /// Checks one set per vertex and the small gap property up to each degree.
    pub fn new(h: MultiGraph, sets: Vec<DegreeSet>) -> Result<Self, FactorError> {
        if sets.len() != h.vertex_count() {
            return Err(FactorError::SetCount { given: sets.len(), vertices: h.vertex_count() });
        }
        for (v, s) in sets.iter().enumerate() {
            if !is_small_gap(s, h.deg(v)) {
                return Err(FactorError::NotSmallGap { vertex: v, set: s.clone() });
            }
        }
        Ok(FactorInstance { h, sets })
    }

    /// `d_S(v) ∈ M_v` for every vertex.
    pub fn is_solution(&self, s: &[EdgeId]) -> bool {
        let mut deg = vec![0usize; self.h.vertex_count()];
        let mut seen = vec![false; self.h.edge_count()];
        for &e in s {
            if e >= seen.len() || seen[e] {
                return false;
            }
            seen[e] = true;
            let (u, v) = self.h.endpoints(e);
            deg[u] += 1;
            deg[v] += 1;
        }
        deg.iter().zip(&self.sets).all(|(&d, m)| m.contains(d))
    }

    pub fn to_text(&self) -> String {
        let mut out = crate::graph::serialize_graph(&self.h, None);
        for (v, s) in self.sets.iter().enumerate() {
            out.push_str(&format!("{v}: {s}\n"));
        }
        out
    }

    /// Graph block followed by one `v: {a,b,...}` line per vertex.
    pub fn parse(text: &str) -> Result<Self, FactorError> {
        let mut lines = content_lines(text);
        let h = parse_edge_block(&mut lines, text.lines().count())?;
        let mut sets: Vec<Option<DegreeSet>> = vec![None; h.vertex_count()];
        for (line, l) in lines {
            let perr = |msg: String| FactorError::Graph(GraphError::Parse { line, msg });
            let (head, rest) =
                l.split_once(':').ok_or_else(|| perr("expected \"v: {a,b,...}\"".into()))?;
            let v = parse_usize(head.trim(), line, "vertex")?;
            if v >= sets.len() {
                return Err(perr(format!("vertex {v} out of range")));
            }
            let body = rest.trim();
            let inner = body
                .strip_prefix('{')
                .and_then(|b| b.strip_suffix('}'))
                .ok_or_else(|| perr("degree set must be written {a,b,...}".into()))?;
            let vals = inner
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| parse_usize(t, line, "degree"))
                .collect::<Result<Vec<_>, _>>()?;
            if sets[v].replace(DegreeSet::new(vals)).is_some() {
                return Err(perr(format!("vertex {v} has two degree sets")));
            }
        }
        let sets = sets
            .into_iter()
            .enumerate()
            .map(|(v, s)| {
                s.ok_or(FactorError::Graph(GraphError::Parse {
                    line: text.lines().count() + 1,
                    msg: format!("vertex {v} has no degree set"),
                }))
            })
            .collect::<Result<Vec<_>, _>>()?;
        FactorInstance::new(h, sets)
    }
}

/// Maximum cardinality matching (Edmonds' blossom algorithm). Returns edge
/// ids of `g`; among parallel edges the smallest id is used.
pub fn max_matching(g: &MultiGraph) -> Vec<EdgeId> {
    let n = g.vertex_count();
    let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for &(u, v) in g.edges() {
        adj[u].push(v);
        adj[v].push(u);
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let mate = Blossom::new(&adj).run();
    let mut out = Vec::new();
    for v in 0..n {
        if let Some(w) = mate[v] {
            if v < w {
                out.push(*g.edges_between(v, w).iter().min().expect("matched pair is adjacent"));
            }
        }
    }
    out.sort_unstable();
    out
}

const NONE: usize = usize::MAX;

struct Blossom<'a> {
    adj: &'a [Vec<VertexId>],
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    queue: Vec<usize>,
}

impl<'a> Blossom<'a> {
    fn new(adj: &'a [Vec<VertexId>]) -> Self {
        let n = adj.len();
        Blossom {
            adj,
            mate: vec![NONE; n],
            parent: vec![NONE; n],
            base: (0..n).collect(),
            used: vec![false; n],
            in_blossom: vec![false; n],
            queue: Vec::new(),
        }
    }

    fn run(mut self) -> Vec<Option<usize>> {
        let n = self.adj.len();
        // greedy start
        for v in 0..n {
            if self.mate[v] == NONE {
                if let Some(&w) = self.adj[v].iter().find(|&&w| self.mate[w] == NONE) {
                    self.mate[v] = w;
                    self.mate[w] = v;
                }
            }
        }
        for root in 0..n {
            if self.mate[root] != NONE {
                continue;
            }
            if let Some(mut v) = self.find_path(root) {
                while v != NONE {
                    let pv = self.parent[v];
                    let ppv = self.mate[pv];
                    self.mate[v] = pv;
                    self.mate[pv] = v;
                    v = ppv;
                }
            }
        }
        self.mate.into_iter().map(|m| (m != NONE).then_some(m)).collect()
    }

    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.adj.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    fn find_path(&mut self, root: usize) -> Option<usize> {
        let n = self.adj.len();
        self.used.iter_mut().for_each(|x| *x = false);
        self.parent.iter_mut().for_each(|x| *x = NONE);
        for i in 0..n {
            self.base[i] = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push(root);
        let mut head = 0;
        while head < self.queue.len() {
            let v = self.queue[head];
            head += 1;
            for i in 0..self.adj[v].len() {
                let to = self.adj[v][i];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for j in 0..n {
                        if self.in_blossom[self.base[j]] {
                            self.base[j] = cur;
                            if !self.used[j] {
                                self.used[j] = true;
                                self.queue.push(j);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let next = self.mate[to];
                    self.used[next] = true;
                    self.queue.push(next);
                }
            }
        }
        None
    }
}

/// Largest matching size by trying every edge subset.
pub fn brute_max_matching(g: &MultiGraph) -> Result<usize, FactorError> {
    let m = g.edge_count();
    if m > BRUTE_FORCE_MAX_EDGES {
        return Err(FactorError::TooLarge(m, BRUTE_FORCE_MAX_EDGES));
    }
    let mut best = 0;
    for mask in 0u32..1 << m {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let mut used = vec![false; g.vertex_count()];
        let ok = (0..m).filter(|&e| mask >> e & 1 == 1).all(|e| {
            let (u, v) = g.endpoints(e);
            let free = !used[u] && !used[v];
            used[u] = true;
            used[v] = true;
            free
        });
        if ok {
            best = size;
        }
    }
    Ok(best)
}

pub const BRUTE_FORCE_MAX_EDGES: usize = 24;

/// Exhaustive reference solver; returns the solution with the smallest
/// bitmask.
pub fn brute_factor(inst: &FactorInstance) -> Result<Option<Vec<EdgeId>>, FactorError> {
    let m = inst.h.edge_count();
    if m > BRUTE_FORCE_MAX_EDGES {
        return Err(FactorError::TooLarge(m, BRUTE_FORCE_MAX_EDGES));
    }
    for mask in 0u32..1 << m {
        let s: Vec<EdgeId> = (0..m).filter(|&e| mask >> e & 1 == 1).collect();
        if inst.is_solution(&s) {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

/// Finds `S` with `d_S(v) ∈ M_v` for all `v`, or `None` if there is none.
///
/// Each vertex `v` of degree `d` becomes `d` ports, one per incident edge;
/// the two ports of an edge are adjacent, and the edge is selected when its
/// ports are matched to each other. A set `[a,b]` adds `d-b` mandatory
/// absorbers and `b-a` optional absorbers complete to the ports; `{c,c+2}`
/// adds `d-c-2` mandatory absorbers and an adjacent pair complete to the
/// ports, which absorbs either two ports or none. Optional absorbers may
/// stay unused by matching into a clique of spare vertices whose size has
/// the right parity, so a perfect matching exists exactly when the
/// instance is solvable.
pub fn solve_factor(inst: &FactorInstance) -> Result<Option<Vec<EdgeId>>, FactorError> {
    let h = &inst.h;
    let mut shapes = Vec::with_capacity(h.vertex_count());
    for v in 0..h.vertex_count() {
        let capped = inst.sets[v].capped(h.deg(v));
        match shape(&capped) {
            Some(Shape::Empty) => return Ok(None),
            Some(s) => shapes.push(s),
            None => return Err(FactorError::UnsupportedSet { vertex: v, set: inst.sets[v].clone() }),
        }
    }
    let mut w = MultiGraph::new(0);
    let mut port = vec![NONE; 2 * h.edge_count()];
    let mut optional = Vec::new();
    for v in 0..h.vertex_count() {
        let ports: Vec<VertexId> = h
            .incident(v)
            .iter()
            .map(|&(_, e)| {
                let p = w.add_vertex();
                let side = if h.endpoints(e).0 == v { 0 } else { 1 };
                port[2 * e + side] = p;
                p
            })
            .collect();
        let d = ports.len();
        let absorbers = |w: &mut MultiGraph, count: usize| -> Vec<VertexId> {
            (0..count)
                .map(|_| {
                    let x = w.add_vertex();
                    for &p in &ports {
                        w.add_edge(x, p).unwrap();
                    }
                    x
                })
                .collect()
        };
        match shapes[v] {
            Shape::Interval(a, b) => {
                absorbers(&mut w, d - b);
                optional.extend(absorbers(&mut w, b - a));
            }
            Shape::Gap(c) => {
                absorbers(&mut w, d - c - 2);
                let pair = absorbers(&mut w, 2);
                w.add_edge(pair[0], pair[1]).unwrap();
            }
            Shape::Empty => unreachable!(),
        }
    }
    let mut selector = Vec::with_capacity(h.edge_count());
    for e in 0..h.edge_count() {
        selector.push(w.add_edge(port[2 * e], port[2 * e + 1]).unwrap());
    }
    let core = w.vertex_count();
    let spare_count = optional.len() + (core + optional.len()) % 2;
    let spares: Vec<VertexId> = (0..spare_count).map(|_| w.add_vertex()).collect();
    for (i, &x) in spares.iter().enumerate() {
        for &y in &spares[i + 1..] {
            w.add_edge(x, y).unwrap();
        }
        for &o in &optional {
            w.add_edge(x, o).unwrap();
        }
    }
    let matching = max_matching(&w);
    if 2 * matching.len() < w.vertex_count() {
        return Ok(None);
    }
    let mut chosen = vec![false; w.edge_count()];
    for e in matching {
        chosen[e] = true;
    }
    let s: Vec<EdgeId> = (0..h.edge_count()).filter(|&e| chosen[selector[e]]).collect();
    debug_assert!(inst.is_solution(&s));
    Ok(Some(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> DegreeSet {
        DegreeSet::new(v.iter().copied())
    }

    #[test]
    fn small_gap_examples() {
        assert!(is_small_gap(&set(&[0, 2]), 2));
        assert!(!is_small_gap(&set(&[0, 3]), 3));
        assert!(is_small_gap(&set(&[1]), 3));
        assert!(is_small_gap(&set(&[3]), 3));
        assert!(!is_small_gap(&set(&[0, 3, 4]), 4));
    }

    #[test]
    fn shapes() {
        assert_eq!(shape(&set(&[])), Some(Shape::Empty));
        assert_eq!(shape(&set(&[2])), Some(Shape::Interval(2, 2)));
        assert_eq!(shape(&set(&[0, 1, 2])), Some(Shape::Interval(0, 2)));
        assert_eq!(shape(&set(&[1, 3])), Some(Shape::Gap(1)));
        assert_eq!(shape(&set(&[0, 2, 3])), None);
    }

    fn graph(n: usize, edges: &[(usize, usize)]) -> MultiGraph {
        MultiGraph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn matchings() {
        let c5 = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(max_matching(&c5).len(), 2);
        let k33 = graph(6, &[(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)]);
        assert_eq!(max_matching(&k33).len(), 3);
        let petersen = graph(
            10,
            &[
                (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
                (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
                (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
            ],
        );
        assert_eq!(max_matching(&petersen).len(), 5);
        assert_eq!(brute_max_matching(&petersen), Ok(5));
    }

    #[test]
    fn tiny_factors() {
        let e = graph(2, &[(0, 1)]);
        let inst = FactorInstance::new(e.clone(), vec![set(&[1]), set(&[1])]).unwrap();
        assert_eq!(solve_factor(&inst), Ok(Some(vec![0])));
        let inst = FactorInstance::new(e, vec![set(&[0]), set(&[1])]).unwrap();
        assert_eq!(solve_factor(&inst), Ok(None));
        let p = graph(3, &[(0, 1), (1, 2)]);
        let inst = FactorInstance::new(p, vec![set(&[0, 1]), set(&[2]), set(&[0, 1])]).unwrap();
        assert_eq!(solve_factor(&inst), Ok(Some(vec![0, 1])));
        assert_eq!(brute_factor(&inst), Ok(Some(vec![0, 1])));
        let empty = FactorInstance::new(graph(2, &[]), vec![set(&[0, 2]), set(&[1])]).unwrap();
        assert_eq!(solve_factor(&empty), Ok(None));
        assert_eq!(brute_factor(&empty), Ok(None));
    }

    #[test]
    fn gap_sets() {
        // star with three leaves, centre {1,3}
        let star = graph(4, &[(0, 1), (0, 2), (0, 3)]);
        let inst = FactorInstance::new(star, vec![set(&[1, 3]), set(&[1]), set(&[1]), set(&[1])]).unwrap();
        assert_eq!(solve_factor(&inst).unwrap().unwrap().len(), 3);
        let star = graph(4, &[(0, 1), (0, 2), (0, 3)]);
        let inst = FactorInstance::new(star, vec![set(&[0, 2]), set(&[1]), set(&[1]), set(&[0])]).unwrap();
        assert_eq!(solve_factor(&inst).unwrap().unwrap(), vec![0, 1]);
    }

    #[test]
    fn unsupported_is_reported() {
        let g = graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let sets = vec![set(&[0, 1, 3, 4]), set(&[0, 1]), set(&[0, 1]), set(&[0, 1]), set(&[0, 1])];
        let inst = FactorInstance::new(g, sets).unwrap();
        assert!(matches!(solve_factor(&inst), Err(FactorError::UnsupportedSet { vertex: 0, .. })));
    }

    #[test]
    fn instance_text() {
        let inst = FactorInstance::new(graph(2, &[(0, 1)]), vec![set(&[0, 2]), set(&[1])]).unwrap();
        let text = inst.to_text();
        assert_eq!(text, "2 1\n0 1\n0: {0,2}\n1: {1}\n");
        assert_eq!(FactorInstance::parse(&text).unwrap(), inst);
        assert!(FactorInstance::parse("2 1\n0 1\n0: {1}\n").is_err());
        assert!(FactorInstance::parse("1 0\n0: {0,3}\n").is_ok());
        assert!(FactorInstance::parse("2 1\n0 1\n0: {0,3}\n1: {0}\n").is_ok());
    }
}
