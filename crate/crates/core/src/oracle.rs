//! Exact search for bounded linear forest decompositions.
//!
//! Depth-first search over a static edge order with one union-find per
//! part (no path compression, undone from a trail). Every component of a
//! part is a path, so each root stores its edge count and both endpoints.
//!
//! Parallel edges are interchangeable, so by default the search only
//! produces labelings where, inside each class of parallel edges taken in
//! id order, no B edge precedes an A edge. Counts are therefore counts of
//! decompositions up to permuting parallel edges.

use rayon::prelude::*;
use thiserror::Error;

use crate::decomp::{verify, Bound, BoundSpec, EdgeLabeling, Part};
use crate::graph::{EdgeId, MultiGraph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Force edges whose other part is infeasible.
    pub propagation: bool,
    /// Only canonical labelings of parallel classes.
    pub symmetry: bool,
    /// Reject vertices whose open edges exceed the remaining part capacity.
    pub capacity: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { propagation: true, symmetry: true, capacity: true }
    }
}

impl SearchOptions {
    /// Plain backtracking: only the branching edge is checked.
    pub fn unpruned() -> Self {
        SearchOptions { propagation: false, symmetry: true, capacity: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Yes(EdgeLabeling),
    No,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub outcome: Outcome,
    pub nodes: u64,
}

impl OracleResult {
    pub fn is_yes(&self) -> bool {
        matches!(self.outcome, Outcome::Yes(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub labelings: Vec<EdgeLabeling>,
    /// The search finished: `labelings` is every canonical labeling.
    pub complete: bool,
    /// The node budget ran out before the search finished.
    pub timed_out: bool,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{0} edges is too many for exhaustive enumeration (limit {1})")]
    TooLarge(usize, usize),
}

pub const BRUTE_FORCE_MAX_EDGES: usize = 26;

/// Edge order: breadth-first from a maximum-degree vertex, visiting
/// higher-degree neighbours first; parallel edges end up adjacent.
pub fn edge_order(g: &MultiGraph) -> Vec<EdgeId> {
    let n = g.vertex_count();
    let mut rank = vec![usize::MAX; n];
    let mut seq = Vec::with_capacity(n);
    let mut by_degree: Vec<VertexId> = (0..n).collect();
    by_degree.sort_by_key(|&v| (std::cmp::Reverse(g.deg(v)), v));
    for &s in &by_degree {
        if rank[s] != usize::MAX {
            continue;
        }
        rank[s] = seq.len();
        seq.push(s);
        let mut head = seq.len() - 1;
        while head < seq.len() {
            let v = seq[head];
            head += 1;
            let mut nbrs: Vec<VertexId> = g.incident(v).iter().map(|&(w, _)| w).collect();
            nbrs.sort_by_key(|&w| (std::cmp::Reverse(g.deg(w)), w));
            nbrs.dedup();
            for w in nbrs {
                if rank[w] == usize::MAX {
                    rank[w] = seq.len();
                    seq.push(w);
                }
            }
        }
    }
    let mut seen = vec![false; g.edge_count()];
    let mut order = Vec::with_capacity(g.edge_count());
    for &v in &seq {
        let mut inc: Vec<(usize, EdgeId)> =
            g.incident(v).iter().map(|&(w, e)| (rank[w], e)).collect();
        inc.sort_unstable();
        for (_, e) in inc {
            if !seen[e] {
                seen[e] = true;
                order.push(e);
            }
        }
    }
    order
}

/// Previous and next edge of each edge's parallel class, by id.
fn parallel_links(g: &MultiGraph) -> (Vec<Option<EdgeId>>, Vec<Option<EdgeId>>) {
    let m = g.edge_count();
    let mut prev = vec![None; m];
    let mut next = vec![None; m];
    let mut keyed: Vec<((VertexId, VertexId), EdgeId)> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(u, v))| ((u.min(v), u.max(v)), e))
        .collect();
    keyed.sort_unstable();
    for w in keyed.windows(2) {
        if w[0].0 == w[1].0 {
            next[w[0].1] = Some(w[1].1);
            prev[w[1].1] = Some(w[0].1);
        }
    }
    (prev, next)
}

const UNSET: u8 = 0;

fn part_code(p: Part) -> u8 {
    match p {
        Part::A => 1,
        Part::B => 2,
    }
}

fn part_index(p: Part) -> usize {
    match p {
        Part::A => 0,
        Part::B => 1,
    }
}

#[derive(Clone)]
enum Undo {
    Label(EdgeId),
    Degree(usize, VertexId),
    Union { part: usize, child: u32, root: u32, len: u32, ends: (u32, u32), rank_bumped: bool },
}

enum Flow {
    Continue,
    Stop,
    Timeout,
}

#[derive(Clone)]
struct PartState {
    bound: Option<usize>,
    deg: Vec<u8>,
    parent: Vec<u32>,
    rank: Vec<u8>,
    len: Vec<u32>,
    ends: Vec<(u32, u32)>,
}

impl PartState {
    fn new(n: usize, bound: Bound) -> Self {
        PartState {
            bound: bound.finite(),
            deg: vec![0; n],
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
            len: vec![0; n],
            ends: (0..n as u32).map(|v| (v, v)).collect(),
        }
    }

    fn find(&self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            v = self.parent[v as usize];
        }
        v
    }

    fn can_add(&self, u: VertexId, v: VertexId) -> bool {
        if self.deg[u] >= 2 || self.deg[v] >= 2 {
            return false;
        }
        let (ru, rv) = (self.find(u as u32), self.find(v as u32));
        if ru == rv {
            return false;
        }
        match self.bound {
            Some(k) => (self.len[ru as usize] + self.len[rv as usize] + 1) as usize <= k,
            None => true,
        }
    }
}

#[derive(Clone)]
struct Search<'g> {
    g: &'g MultiGraph,
    opts: SearchOptions,
    order: Vec<EdgeId>,
    prev_par: Vec<Option<EdgeId>>,
    next_par: Vec<Option<EdgeId>>,
    label: Vec<u8>,
    open: Vec<u32>,
    parts: [PartState; 2],
    trail: Vec<Undo>,
    queue: Vec<VertexId>,
    nodes: u64,
    budget: u64,
}

impl<'g> Search<'g> {
    fn new(g: &'g MultiGraph, b: &BoundSpec, opts: SearchOptions, budget: u64) -> Self {
        let n = g.vertex_count();
        let (prev_par, next_par) = if opts.symmetry {
            parallel_links(g)
        } else {
            (vec![None; g.edge_count()], vec![None; g.edge_count()])
        };
        Search {
            g,
            opts,
            order: edge_order(g),
            prev_par,
            next_par,
            label: vec![UNSET; g.edge_count()],
            open: (0..n).map(|v| g.deg(v) as u32).collect(),
            parts: [PartState::new(n, b.k), PartState::new(n, b.l)],
            trail: Vec::new(),
            queue: Vec::new(),
            nodes: 0,
            budget,
        }
    }

    fn allowed(&self, e: EdgeId, p: Part) -> bool {
        if self.opts.symmetry {
            match p {
                Part::A => {
                    if let Some(q) = self.prev_par[e] {
                        if self.label[q] == part_code(Part::B) {
                            return false;
                        }
                    }
                }
                Part::B => {
                    if let Some(q) = self.next_par[e] {
                        if self.label[q] == part_code(Part::A) {
                            return false;
                        }
                    }
                }
            }
        }
        let (u, v) = self.g.endpoints(e);
        self.parts[part_index(p)].can_add(u, v)
    }

    /// Labels `e` (assumed allowed) and queues the vertices whose options
    /// changed.
    fn apply(&mut self, e: EdgeId, p: Part) {
        let (u, v) = self.g.endpoints(e);
        let pi = part_index(p);
        self.label[e] = part_code(p);
        self.trail.push(Undo::Label(e));
        self.open[u] -= 1;
        self.open[v] -= 1;
        let st = &mut self.parts[pi];
        st.deg[u] += 1;
        st.deg[v] += 1;
        self.trail.push(Undo::Degree(pi, u));
        self.trail.push(Undo::Degree(pi, v));
        let (ru, rv) = (st.find(u as u32), st.find(v as u32));
        let far = |ends: (u32, u32), x: u32| if ends.0 == x { ends.1 } else { ends.0 };
        let far_u = far(st.ends[ru as usize], u as u32);
        let far_v = far(st.ends[rv as usize], v as u32);
        let (root, child) = if st.rank[ru as usize] >= st.rank[rv as usize] { (ru, rv) } else { (rv, ru) };
        let rank_bumped = st.rank[ru as usize] == st.rank[rv as usize];
        self.trail.push(Undo::Union {
            part: pi,
            child,
            root,
            len: st.len[root as usize],
            ends: st.ends[root as usize],
            rank_bumped,
        });
        st.parent[child as usize] = root;
        if rank_bumped {
            st.rank[root as usize] += 1;
        }
        st.len[root as usize] += st.len[child as usize] + 1;
        st.ends[root as usize] = (far_u, far_v);
        if self.opts.propagation || self.opts.capacity {
            self.queue.extend([u, v, far_u as usize, far_v as usize]);
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().unwrap() {
                Undo::Label(e) => {
                    let (u, v) = self.g.endpoints(e);
                    self.label[e] = UNSET;
                    self.open[u] += 1;
                    self.open[v] += 1;
                }
                Undo::Degree(pi, v) => self.parts[pi].deg[v] -= 1,
                Undo::Union { part, child, root, len, ends, rank_bumped } => {
                    let st = &mut self.parts[part];
                    st.parent[child as usize] = child;
                    st.len[root as usize] = len;
                    st.ends[root as usize] = ends;
                    if rank_bumped {
                        st.rank[root as usize] -= 1;
                    }
                }
            }
        }
    }

    /// Drains the queue; false on a contradiction.
    fn propagate(&mut self) -> bool {
        while let Some(x) = self.queue.pop() {
            if self.opts.capacity {
                let room = 4 - self.parts[0].deg[x] as u32 - self.parts[1].deg[x] as u32;
                if self.open[x] > room {
                    self.queue.clear();
                    return false;
                }
            }
            if !self.opts.propagation {
                continue;
            }
            let g = self.g;
            for &(_, e) in g.incident(x) {
                if self.label[e] != UNSET {
                    continue;
                }
                let a = self.allowed(e, Part::A);
                let b = self.allowed(e, Part::B);
                match (a, b) {
                    (false, false) => {
                        self.queue.clear();
                        return false;
                    }
                    (true, false) => self.apply(e, Part::A),
                    (false, true) => self.apply(e, Part::B),
                    (true, true) => {}
                }
            }
        }
        true
    }

    fn try_label(&mut self, e: EdgeId, p: Part) -> bool {
        if !self.allowed(e, p) {
            return false;
        }
        self.apply(e, p);
        self.propagate()
    }

    /// Initial capacity/propagation pass over every vertex.
    fn start(&mut self) -> bool {
        if self.opts.propagation || self.opts.capacity {
            self.queue.extend(0..self.g.vertex_count());
        }
        self.propagate()
    }

    fn labeling(&self) -> EdgeLabeling {
        EdgeLabeling(
            self.label.iter().map(|&c| if c == part_code(Part::A) { Part::A } else { Part::B }).collect(),
        )
    }

    fn dfs(&mut self, mut idx: usize, visit: &mut dyn FnMut(EdgeLabeling) -> bool) -> Flow {
        while idx < self.order.len() && self.label[self.order[idx]] != UNSET {
            idx += 1;
        }
        if idx == self.order.len() {
            return if visit(self.labeling()) { Flow::Continue } else { Flow::Stop };
        }
        if self.nodes >= self.budget {
            return Flow::Timeout;
        }
        self.nodes += 1;
        let e = self.order[idx];
        for p in [Part::A, Part::B] {
            let mark = self.trail.len();
            if self.try_label(e, p) {
                match self.dfs(idx + 1, visit) {
                    Flow::Continue => {}
                    other => {
                        self.undo_to(mark);
                        return other;
                    }
                }
            }
            self.undo_to(mark);
        }
        Flow::Continue
    }

    /// Frontier of decision prefixes at `depth` branching levels; each entry
    /// is the list of branching decisions leading to it.
    fn split(&mut self, depth: usize) -> Vec<Vec<(EdgeId, Part)>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.split_rec(0, depth, &mut path, &mut out);
        out
    }

    fn split_rec(
        &mut self,
        mut idx: usize,
        depth: usize,
        path: &mut Vec<(EdgeId, Part)>,
        out: &mut Vec<Vec<(EdgeId, Part)>>,
    ) {
        while idx < self.order.len() && self.label[self.order[idx]] != UNSET {
            idx += 1;
        }
        if depth == 0 || idx == self.order.len() {
            out.push(path.clone());
            return;
        }
        self.nodes += 1;
        let e = self.order[idx];
        for p in [Part::A, Part::B] {
            let mark = self.trail.len();
            if self.try_label(e, p) {
                path.push((e, p));
                self.split_rec(idx + 1, depth - 1, path, out);
                path.pop();
            }
            self.undo_to(mark);
        }
    }
}

/// Decides `(k,ℓ)`-decomposability within `budget` search nodes.
pub fn solve_exact(g: &MultiGraph, b: &BoundSpec, budget: u64) -> OracleResult {
    solve_with(g, b, budget, SearchOptions::default())
}

pub fn solve_with(g: &MultiGraph, b: &BoundSpec, budget: u64, opts: SearchOptions) -> OracleResult {
    let mut s = Search::new(g, b, opts, budget);
    if !s.start() {
        return OracleResult { outcome: Outcome::No, nodes: 0 };
    }
    let mut found = None;
    let flow = s.dfs(0, &mut |lab| {
        found = Some(lab);
        false
    });
    let outcome = match (found, flow) {
        (Some(lab), _) => Outcome::Yes(lab),
        (None, Flow::Timeout) => Outcome::Timeout,
        (None, _) => Outcome::No,
    };
    if let Outcome::Yes(lab) = &outcome {
        debug_assert!(verify(g, lab, b).is_ok());
    }
    OracleResult { outcome, nodes: s.nodes }
}

/// Branching depth used to cut the search into independent subproblems.
const SPLIT_DEPTH: usize = 6;

/// Same decision as [`solve_exact`] computed on `workers` threads.
///
/// The top `SPLIT_DEPTH` branching levels are expanded into subproblems
/// (independent of `workers`), each subproblem gets an equal share of the
/// budget, and all of them are run to completion. The first yes in
/// subproblem order wins; the node count is the sum over subproblems. The
/// result therefore does not depend on the number of workers, although it
/// may differ from the sequential search near the budget limit.
pub fn solve_exact_parallel(g: &MultiGraph, b: &BoundSpec, budget: u64, workers: usize) -> OracleResult {
    let opts = SearchOptions::default();
    let mut root = Search::new(g, b, opts, budget);
    if !root.start() {
        return OracleResult { outcome: Outcome::No, nodes: 0 };
    }
    let prefixes = root.split(SPLIT_DEPTH);
    let base_nodes = root.nodes;
    if prefixes.is_empty() {
        return OracleResult { outcome: Outcome::No, nodes: base_nodes };
    }
    let share = (budget.saturating_sub(base_nodes) / prefixes.len() as u64).max(1);
    let run = |prefix: &Vec<(EdgeId, Part)>| -> OracleResult {
        let mut s = root.clone();
        s.nodes = 0;
        s.budget = share;
        for &(e, p) in prefix {
            let ok = s.try_label(e, p);
            debug_assert!(ok, "prefix replays");
        }
        let mut found = None;
        let flow = s.dfs(0, &mut |lab| {
            found = Some(lab);
            false
        });
        let outcome = match (found, flow) {
            (Some(lab), _) => Outcome::Yes(lab),
            (None, Flow::Timeout) => Outcome::Timeout,
            (None, _) => Outcome::No,
        };
        OracleResult { outcome, nodes: s.nodes }
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().expect("thread pool");
    let results: Vec<OracleResult> = pool.install(|| prefixes.par_iter().map(run).collect());
    let nodes = base_nodes + results.iter().map(|r| r.nodes).sum::<u64>();
    let outcome = results
        .iter()
        .find(|r| r.is_yes())
        .map(|r| r.outcome.clone())
        .unwrap_or_else(|| {
            if results.iter().any(|r| r.outcome == Outcome::Timeout) {
                Outcome::Timeout
            } else {
                Outcome::No
            }
        });
    OracleResult { outcome, nodes }
}

/// All canonical labelings, up to `limit`, in search order.
pub fn enumerate(g: &MultiGraph, b: &BoundSpec, limit: usize) -> Enumeration {
    enumerate_with(g, b, limit, u64::MAX, SearchOptions::default())
}

pub fn enumerate_with(
    g: &MultiGraph,
    b: &BoundSpec,
    limit: usize,
    budget: u64,
    opts: SearchOptions,
) -> Enumeration {
    let mut s = Search::new(g, b, opts, budget);
    if !s.start() {
        return Enumeration { labelings: Vec::new(), complete: true, timed_out: false, nodes: 0 };
    }
    let mut labelings = Vec::new();
    let flow = s.dfs(0, &mut |lab| {
        labelings.push(lab);
        labelings.len() < limit
    });
    let (complete, timed_out) = match flow {
        Flow::Continue => (true, false),
        Flow::Stop => (false, false),
        Flow::Timeout => (false, true),
    };
    Enumeration { labelings, complete, timed_out, nodes: s.nodes }
}

/// True when no parallel class has a B edge before an A edge (by id).
pub fn is_canonical(g: &MultiGraph, lab: &EdgeLabeling) -> bool {
    let (_, next) = parallel_links(g);
    (0..g.edge_count()).all(|e| match next[e] {
        Some(f) => !(lab.get(e) == Part::B && lab.get(f) == Part::A),
        None => true,
    })
}

/// Counts labelings by testing every bipartition with [`verify`]. With
/// `canonical_only` the count matches [`enumerate`].
pub fn count_brute(g: &MultiGraph, b: &BoundSpec, canonical_only: bool) -> Result<u64, OracleError> {
    let m = g.edge_count();
    if m > BRUTE_FORCE_MAX_EDGES {
        return Err(OracleError::TooLarge(m, BRUTE_FORCE_MAX_EDGES));
    }
    let (_, next) = parallel_links(g);
    let pairs: Vec<(EdgeId, EdgeId)> =
        (0..m).filter_map(|e| next[e].map(|f| (e, f))).collect();
    let count = (0u64..1 << m)
        .into_par_iter()
        .filter(|&mask| {
            if canonical_only && pairs.iter().any(|&(e, f)| mask >> e & 1 == 1 && mask >> f & 1 == 0) {
                return false;
            }
            let lab = EdgeLabeling((0..m).map(|e| if mask >> e & 1 == 1 { Part::B } else { Part::A }).collect());
            verify(g, &lab, b).is_ok()
        })
        .count();
    Ok(count as u64)
}
