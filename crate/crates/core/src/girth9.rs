//! Subcubic planar graphs of girth at least 9: precondition checks,
//! local reductions with their decomposition extenders, extensions of
//! `(∞,1)`-decompositions over 9- and 10-faces, the charge audit, and an
//! oracle-backed experiment over a corpus of embedded graphs.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::decomp::{component_index, verify, BoundSpec, EdgeLabeling, Part, Violation};
use crate::graph::{EdgeId, EulerCheck, FaceWalk, GraphError, MultiGraph, RotationSystem, VertexId};
use crate::oracle::{solve_exact, Outcome};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Girth9Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("vertex {v} has degree {found}, expected {expected}")]
    Degree { v: VertexId, expected: usize, found: usize },
    #[error("vertices {0} and {1} are not adjacent")]
    NotAdjacent(VertexId, VertexId),
    #[error("face configuration: {0}")]
    BadFace(String),
    #[error("base labeling is not an (inf,1)-decomposition: {0}")]
    BaseInvalid(Violation),
    #[error("every stub edge of the 10-face is in B; no extension exists")]
    AllStubsInB,
    #[error("{0}")]
    Obstruction(NineObstruction),
    #[error("extension failed to verify: {0}")]
    Internal(Violation),
}

/// The two stub patterns under which a 9-face admits no extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NineObstruction {
    /// All five stub edges are in B.
    AllInB,
    /// The stubs at positions 4, 6, 8 are in B and the stubs at 1 and 2
    /// lie on one A-path.
    StubsOneAndTwoJoined,
}

impl fmt::Display for NineObstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NineObstruction::AllInB => write!(f, "all five stub edges of the 9-face are in B"),
            NineObstruction::StubsOneAndTwoJoined => write!(
                f,
                "stub edges 4, 6, 8 are in B and stubs 1, 2 share an A-path"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreconditionReport {
    pub max_degree: usize,
    pub girth: Option<usize>,
    pub euler: EulerCheck,
}

impl PreconditionReport {
    pub fn subcubic(&self) -> bool {
        self.max_degree <= 3
    }

    /// An acyclic graph has infinite girth.
    pub fn girth_at_least_9(&self) -> bool {
        self.girth.is_none_or(|g| g >= 9)
    }

    pub fn planar(&self) -> bool {
        self.euler.is_planar()
    }

    pub fn passed(&self) -> bool {
        self.subcubic() && self.girth_at_least_9() && self.planar()
    }
}

impl fmt::Display for PreconditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |b: bool| if b { "ok" } else { "FAIL" };
        writeln!(f, "[{}] subcubic (max degree {})", mark(self.subcubic()), self.max_degree)?;
        match self.girth {
            Some(g) => writeln!(f, "[{}] girth >= 9 (girth {g})", mark(self.girth_at_least_9()))?,
            None => writeln!(f, "[ok] girth >= 9 (acyclic)")?,
        }
        let chis: Vec<i64> = self.euler.components.iter().map(|c| c.characteristic()).collect();
        writeln!(f, "[{}] V - E + F = 2 per component {chis:?}", mark(self.planar()))
    }
}

pub fn check_preconditions(g: &MultiGraph, rot: &RotationSystem) -> PreconditionReport {
    let (_, euler) = rot.faces(g);
    PreconditionReport { max_degree: g.max_degree(), girth: g.girth(), euler }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionKind {
    /// A degree-1 vertex was cut off.
    PendantEdge,
    /// An edge between two degree-2 vertices was removed.
    Adjacent2s,
}

/// Turns a decomposition of the reduced graph back into one of the graph
/// the reduction started from.
#[derive(Debug, Clone)]
pub struct Extender {
    pub kind: ReductionKind,
    /// Removed edge, as an id of the original graph.
    pub removed: EdgeId,
    /// Reduced edge id → original edge id.
    pub map: Vec<EdgeId>,
    /// Reduced-graph edges at the vertices the rule inspects.
    watched: Vec<EdgeId>,
    limit: usize,
}

impl Extender {
    /// Adds the removed edge to A when the watched A-degree is at most
    /// `limit`, and to B otherwise.
    pub fn extend(&self, base: &EdgeLabeling) -> EdgeLabeling {
        let mut lab = EdgeLabeling::uniform(self.map.len() + 1, Part::A);
        for (e, &old) in self.map.iter().enumerate() {
            lab.set(old, base.get(e));
        }
        let a = self.watched.iter().filter(|&&e| base.get(e) == Part::A).count();
        lab.set(self.removed, if a <= self.limit { Part::A } else { Part::B });
        lab
    }
}

/// Removes the edge at a degree-1 vertex `v`; `v` stays as an isolated
/// vertex so vertex ids are unchanged.
pub fn reduce_degree1(g: &MultiGraph, v: VertexId) -> Result<(MultiGraph, Extender), Girth9Error> {
    let d = g.degree(v)?;
    if d != 1 {
        return Err(Girth9Error::Degree { v, expected: 1, found: d });
    }
    let (u, e) = g.incident(v)[0];
    let (h, map) = g.without_edges(&[e]);
    let watched = h.incident(u).iter().map(|&(_, f)| f).collect();
    Ok((h, Extender { kind: ReductionKind::PendantEdge, removed: e, map, watched, limit: 1 }))
}

/// Removes one edge `uv` between two degree-2 vertices.
pub fn reduce_adjacent_2s(
    g: &MultiGraph,
    u: VertexId,
    v: VertexId,
) -> Result<(MultiGraph, Extender), Girth9Error> {
    for x in [u, v] {
        let d = g.degree(x)?;
        if d != 2 {
            return Err(Girth9Error::Degree { v: x, expected: 2, found: d });
        }
    }
    let e = *g.edges_between(u, v).first().ok_or(Girth9Error::NotAdjacent(u, v))?;
    let (h, map) = g.without_edges(&[e]);
    let watched = [u, v].iter().flat_map(|&x| h.incident(x).iter().map(|&(_, f)| f)).collect();
    Ok((h, Extender { kind: ReductionKind::Adjacent2s, removed: e, map, watched, limit: 1 }))
}

/// Applies both reductions until neither applies. Extenders are listed in
/// application order; apply them in reverse.
pub fn reduce_exhaustively(g: &MultiGraph) -> (MultiGraph, Vec<Extender>) {
    let mut cur = g.clone();
    let mut steps = Vec::new();
    loop {
        let step = if let Some(v) = (0..cur.vertex_count()).find(|&v| cur.deg(v) == 1) {
            reduce_degree1(&cur, v)
        } else if let Some(&(u, w)) = cur.edges().iter().find(|&&(a, b)| cur.deg(a) == 2 && cur.deg(b) == 2) {
            reduce_adjacent_2s(&cur, u, w)
        } else {
            break;
        };
        let (h, ext) = step.expect("reduction preconditions checked");
        steps.push(ext);
        cur = h;
    }
    (cur, steps)
}

/// Extends a decomposition of the fully reduced graph back to the graph
/// the extenders came from.
pub fn extend_all(steps: &[Extender], base: &EdgeLabeling) -> EdgeLabeling {
    steps.iter().rev().fold(base.clone(), |lab, ext| ext.extend(&lab))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceKind {
    /// 10-face whose odd positions are 3-vertices and even ones 2-vertices.
    Ten,
    /// 9-face with 3-vertices at positions 1, 2, 4, 6, 8.
    Nine,
}

impl FaceKind {
    pub fn length(self) -> usize {
        match self {
            FaceKind::Ten => 10,
            FaceKind::Nine => 9,
        }
    }

    /// Whether 1-based position `p` holds a 3-vertex.
    pub fn has_stub(self, p: usize) -> bool {
        match self {
            FaceKind::Ten => p % 2 == 1,
            FaceKind::Nine => matches!(p, 1 | 2 | 4 | 6 | 8),
        }
    }
}

/// A face with a canonical ordering `v_1 … v_t` of its vertices and the
/// stub edge `u_i v_i` leaving each 3-vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceConfig {
    pub kind: FaceKind,
    pub face: FaceWalk,
    pub vertices: Vec<VertexId>,
    /// `edges[i]` joins `vertices[i]` and `vertices[(i + 1) % t]`.
    pub edges: Vec<EdgeId>,
    /// 1-based position → (outside neighbour, stub edge).
    pub stubs: BTreeMap<usize, (VertexId, EdgeId)>,
}

impl FaceConfig {
    pub fn new(g: &MultiGraph, kind: FaceKind, vertices: Vec<VertexId>) -> Result<Self, Girth9Error> {
        let t = kind.length();
        let bad = |m: String| Err(Girth9Error::BadFace(m));
        if vertices.len() != t {
            return bad(format!("{} vertices for a face of length {t}", vertices.len()));
        }
        let mut sorted = vertices.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != t {
            return bad("face repeats a vertex".into());
        }
        let mut edges = Vec::with_capacity(t);
        for i in 0..t {
            let (a, b) = (vertices[i], vertices[(i + 1) % t]);
            match g.edges_between(a, b).as_slice() {
                [e] => edges.push(*e),
                [] => return Err(Girth9Error::NotAdjacent(a, b)),
                _ => return bad(format!("parallel edges between {a} and {b}")),
            }
        }
        let mut stubs = BTreeMap::new();
        for (i, &v) in vertices.iter().enumerate() {
            let p = i + 1;
            let expected = if kind.has_stub(p) { 3 } else { 2 };
            let d = g.degree(v)?;
            if d != expected {
                return Err(Girth9Error::Degree { v, expected, found: d });
            }
            if expected == 3 {
                let &(u, e) = g.incident(v).iter().find(|&&(_, e)| !edges.contains(&e)).unwrap();
                if vertices.contains(&u) {
                    return bad(format!("stub at position {p} returns to the face"));
                }
                stubs.insert(p, (u, e));
            }
        }
        let face = FaceWalk(vertices.iter().copied().zip(edges.iter().copied()).collect());
        Ok(FaceConfig { kind, face, vertices, edges, stubs })
    }

    /// Tries every canonical ordering of the walk's vertices.
    pub fn from_walk(g: &MultiGraph, kind: FaceKind, walk: &FaceWalk) -> Result<Self, Girth9Error> {
        let vs = walk.vertices();
        if vs.len() != kind.length() || !walk.is_non_degenerate() {
            return Err(Girth9Error::BadFace(format!(
                "walk of length {} does not bound a {}-cycle",
                vs.len(),
                kind.length()
            )));
        }
        let t = vs.len();
        let mut last = None;
        for dir in [false, true] {
            for s in 0..t {
                let order: Vec<VertexId> = (0..t)
                    .map(|i| if dir { vs[(s + t - i) % t] } else { vs[(s + i) % t] })
                    .collect();
                match FaceConfig::new(g, kind, order) {
                    Ok(cfg) => return Ok(cfg),
                    Err(e) => last = Some(e),
                }
            }
        }
        Err(last.unwrap())
    }

    /// `g − E(F)` with its edge map; extensions take labelings of this graph.
    pub fn base_graph(&self, g: &MultiGraph) -> (MultiGraph, Vec<EdgeId>) {
        g.without_edges(&self.edges)
    }

    fn stub_edge(&self, p: usize) -> EdgeId {
        self.stubs[&p].1
    }
}

/// Which rule produced a face extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FaceBranch {
    TenFace,
    NoneInB,
    SingleAt2,
    SingleAt4Split12,
    SingleAt4Split26,
    SingleAt6Split12,
    SingleAt6Split24,
    PairAt12,
    PairAt24,
    PairAt26,
    PairAt46Split12,
    PairAt46Split28,
    PairAt48,
    PairAt14,
    TripleAt468,
    TripleOther,
    Quadruple,
}

impl FaceBranch {
    pub const ALL: [FaceBranch; 17] = [
        FaceBranch::TenFace,
        FaceBranch::NoneInB,
        FaceBranch::SingleAt2,
        FaceBranch::SingleAt4Split12,
        FaceBranch::SingleAt4Split26,
        FaceBranch::SingleAt6Split12,
        FaceBranch::SingleAt6Split24,
        FaceBranch::PairAt12,
        FaceBranch::PairAt24,
        FaceBranch::PairAt26,
        FaceBranch::PairAt46Split12,
        FaceBranch::PairAt46Split28,
        FaceBranch::PairAt48,
        FaceBranch::PairAt14,
        FaceBranch::TripleAt468,
        FaceBranch::TripleOther,
        FaceBranch::Quadruple,
    ];
}

static BRANCH_HITS: [AtomicU64; 17] = [const { AtomicU64::new(0) }; 17];

/// Process-wide hit counts of every extension branch.
pub fn branch_hits() -> Vec<(FaceBranch, u64)> {
    FaceBranch::ALL.iter().map(|&b| (b, BRANCH_HITS[b as usize].load(Ordering::Relaxed))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceExtension {
    pub labeling: EdgeLabeling,
    pub branch: FaceBranch,
    /// The rule was applied to the mirrored ordering `v_2 v_1 v_9 … v_3`.
    pub reflected: bool,
}

/// Lifts a labeling of `g − E(F)` to `g`, face edges in A.
fn lift(g: &MultiGraph, cfg: &FaceConfig, base: &EdgeLabeling) -> Result<EdgeLabeling, Girth9Error> {
    let (h, map) = cfg.base_graph(g);
    if base.len() != h.edge_count() {
        return Err(Girth9Error::BadFace(format!(
            "base labels {} edges, g - E(F) has {}",
            base.len(),
            h.edge_count()
        )));
    }
    verify(&h, base, &BoundSpec::inf(1)).map_err(Girth9Error::BaseInvalid)?;
    let mut lab = EdgeLabeling::uniform(g.edge_count(), Part::A);
    for (e, &old) in map.iter().enumerate() {
        lab.set(old, base.get(e));
    }
    Ok(lab)
}

fn finish(
    g: &MultiGraph,
    cfg: &FaceConfig,
    mut lab: EdgeLabeling,
    b_positions: &[usize],
    branch: FaceBranch,
    reflected: bool,
) -> Result<FaceExtension, Girth9Error> {
    for (i, &e) in cfg.edges.iter().enumerate() {
        lab.set(e, if b_positions.contains(&(i + 1)) { Part::B } else { Part::A });
    }
    verify(g, &lab, &BoundSpec::inf(1)).map_err(Girth9Error::Internal)?;
    BRANCH_HITS[branch as usize].fetch_add(1, Ordering::Relaxed);
    Ok(FaceExtension { labeling: lab, branch, reflected })
}

/// Puts face edge `v_i v_{i+1}` into B for every odd `i` whose stub edge is
/// in A, and every other face edge into A.
pub fn extend_over_10face(
    g: &MultiGraph,
    cfg: &FaceConfig,
    base: &EdgeLabeling,
) -> Result<FaceExtension, Girth9Error> {
    if cfg.kind != FaceKind::Ten {
        return Err(Girth9Error::BadFace("not a 10-face configuration".into()));
    }
    let lab = lift(g, cfg, base)?;
    let b: Vec<usize> = [1, 3, 5, 7, 9].into_iter().filter(|&p| lab.get(cfg.stub_edge(p)) == Part::A).collect();
    if b.is_empty() {
        return Err(Girth9Error::AllStubsInB);
    }
    finish(g, cfg, lab, &b, FaceBranch::TenFace, false)
}

/// Position map of the mirrored canonical ordering.
fn reflect(p: usize) -> usize {
    (11 - p) % 9 + 1
}

/// Face-edge positions for B under the rules that apply to stub set `s`
/// (sorted positions of stubs in B) in the current frame; `None` when the
/// frame's own conditions fail.
fn nine_face_plan(
    s: &[usize],
    split: impl Fn(usize, usize) -> bool,
) -> Result<Option<(FaceBranch, Vec<usize>)>, NineObstruction> {
    use FaceBranch::*;
    let rest = || [2, 4, 6, 8].into_iter().filter(|p| !s.contains(p)).collect::<Vec<_>>();
    let plan = match s {
        [] if split(4, 6) => (NoneInB, vec![1, 3, 6, 8]),
        [2] => (SingleAt2, vec![3, 5, 7, 9]),
        [4] if split(1, 2) => (SingleAt4Split12, vec![2, 5, 7, 9]),
        [4] if split(2, 6) => (SingleAt4Split26, vec![1, 6, 8]),
        [6] if split(1, 2) => (SingleAt6Split12, vec![2, 4, 7, 9]),
        [6] if split(2, 4) => (SingleAt6Split24, vec![1, 4, 8]),
        [1, 2] if split(4, 6) => (PairAt12, vec![3, 6, 8]),
        [2, 4] => (PairAt24, vec![5, 7, 9]),
        [2, 6] => (PairAt26, vec![3, 7, 9]),
        [4, 6] if split(1, 2) => (PairAt46Split12, vec![2, 7, 9]),
        [4, 6] if split(2, 8) => (PairAt46Split28, vec![1, 8]),
        [4, 8] if split(2, 6) => (PairAt48, vec![1, 6]),
        [1, 4] => (PairAt14, vec![2, 6, 8]),
        [4, 6, 8] if split(1, 2) => (TripleAt468, vec![1]),
        [4, 6, 8] => return Err(NineObstruction::StubsOneAndTwoJoined),
        [1, _, _] => (TripleOther, rest()),
        [1, _, _, _] => (Quadruple, rest()),
        [_, _, _, _, _] => return Err(NineObstruction::AllInB),
        _ => return Ok(None),
    };
    Ok(Some(plan))
}

/// Extends over a 9-face by the rule matching the stub edges in B and, where
/// needed, which stub edges in A share an A-path. The mirrored ordering is
/// tried when the given one matches no rule.
pub fn extend_over_9face(
    g: &MultiGraph,
    cfg: &FaceConfig,
    base: &EdgeLabeling,
) -> Result<FaceExtension, Girth9Error> {
    if cfg.kind != FaceKind::Nine {
        return Err(Girth9Error::BadFace("not a 9-face configuration".into()));
    }
    let lab = lift(g, cfg, base)?;
    let (h, _) = cfg.base_graph(g);
    let a_edges: Vec<EdgeId> = {
        let (_, map) = cfg.base_graph(g);
        (0..h.edge_count()).filter(|&e| lab.get(map[e]) == Part::A).collect()
    };
    let comp = component_index(&h, &a_edges).map_err(Girth9Error::BaseInvalid)?;
    let in_b = |p: usize| lab.get(cfg.stub_edge(p)) == Part::B;
    let vertex = |p: usize| cfg.vertices[p - 1];
    for reflected in [false, true] {
        let pos = |p: usize| if reflected { reflect(p) } else { p };
        let mut s: Vec<usize> = [1, 2, 4, 6, 8].into_iter().filter(|&p| in_b(pos(p))).collect();
        s.sort_unstable();
        let split = |p: usize, q: usize| comp[vertex(pos(p))] != comp[vertex(pos(q))];
        match nine_face_plan(&s, split) {
            Err(o) => return Err(Girth9Error::Obstruction(o)),
            Ok(Some((branch, b))) => {
                // face edge at frame position i joins frame vertices i, i+1
                let actual: Vec<usize> = b
                    .iter()
                    .map(|&i| if reflected { pos(i % 9 + 1) } else { i })
                    .collect();
                return finish(g, cfg, lab, &actual, branch, reflected);
            }
            Ok(None) => {}
        }
    }
    unreachable!("three stub paths cannot share one A-path")
}

/// Synthetic host for face extensions: the face `0..t` in canonical order,
/// a stub edge `v_p u_p` at each stub position, and for each pair in
/// `joins` a path `u_p x u_q`. Returns the host, its face configuration and
/// a base labeling of `g − E(F)` with the stubs at `in_b` in B and every
/// other edge in A, so joined stubs share an A-path.
pub fn face_host(
    kind: FaceKind,
    in_b: &[usize],
    joins: &[(usize, usize)],
) -> Result<(MultiGraph, FaceConfig, EdgeLabeling), Girth9Error> {
    let t = kind.length();
    let mut g = MultiGraph::new(t);
    for i in 0..t {
        g.add_edge(i, (i + 1) % t)?;
    }
    let mut u = BTreeMap::new();
    for p in (1..=t).filter(|&p| kind.has_stub(p)) {
        let x = g.add_vertex();
        g.add_edge(p - 1, x)?;
        u.insert(p, x);
    }
    for &(p, q) in joins {
        let (Some(&a), Some(&b)) = (u.get(&p), u.get(&q)) else {
            return Err(Girth9Error::BadFace(format!("no stubs at {p} and {q}")));
        };
        if in_b.contains(&p) || in_b.contains(&q) {
            return Err(Girth9Error::BadFace(format!("joined stubs {p}, {q} must be in A")));
        }
        let x = g.add_vertex();
        g.add_edge(a, x)?;
        g.add_edge(x, b)?;
    }
    let cfg = FaceConfig::new(&g, kind, (0..t).collect())?;
    let (h, map) = cfg.base_graph(&g);
    let mut lab = EdgeLabeling::uniform(h.edge_count(), Part::A);
    for (e, &old) in map.iter().enumerate() {
        if in_b.iter().any(|p| cfg.stubs.get(p).is_some_and(|s| s.1 == old)) {
            lab.set(e, Part::B);
        }
    }
    verify(&h, &lab, &BoundSpec::inf(1)).map_err(Girth9Error::BaseInvalid)?;
    Ok((g, cfg, lab))
}

/// Runs both extensions over every stub pattern with at most one joined pair
/// of A-stubs. Returns the number of extensions produced, or the first
/// failure other than the two 9-face obstructions and the all-B 10-face.
pub fn sweep_face_hosts() -> Result<usize, String> {
    let mut produced = 0;
    for kind in [FaceKind::Nine, FaceKind::Ten] {
        let pos: Vec<usize> = (1..=kind.length()).filter(|&p| kind.has_stub(p)).collect();
        for mask in 0u32..32 {
            let in_b: Vec<usize> = (0..5).filter(|i| mask >> i & 1 == 1).map(|i| pos[i]).collect();
            let free: Vec<usize> = pos.iter().copied().filter(|p| !in_b.contains(p)).collect();
            let mut join_sets: Vec<Vec<(usize, usize)>> = vec![vec![]];
            for (i, &p) in free.iter().enumerate() {
                for &q in &free[i + 1..] {
                    join_sets.push(vec![(p, q)]);
                }
            }
            for joins in join_sets {
                let (g, cfg, base) = face_host(kind, &in_b, &joins).map_err(|e| e.to_string())?;
                let r = match kind {
                    FaceKind::Nine => extend_over_9face(&g, &cfg, &base),
                    FaceKind::Ten => extend_over_10face(&g, &cfg, &base),
                };
                match r {
                    Ok(_) => produced += 1,
                    Err(Girth9Error::Obstruction(_) | Girth9Error::AllStubsInB) => {}
                    Err(e) => return Err(format!("{kind:?} B-stubs {in_b:?} joins {joins:?}: {e}")),
                }
            }
        }
    }
    Ok(produced)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transfer {
    pub face: usize,
    pub vertex: VertexId,
    pub amount: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentCharge {
    pub vertices: usize,
    pub initial: i64,
    /// `−6·(V − E + F)`, which is −12 exactly when the component's
    /// embedding is planar.
    pub expected: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChargeReport {
    /// Boundary walk lengths; an isolated vertex has one face of length 0.
    pub face_lengths: Vec<usize>,
    pub face_initial: Vec<i64>,
    pub vertex_initial: Vec<i64>,
    pub transfers: Vec<Transfer>,
    pub face_final: Vec<i64>,
    pub vertex_final: Vec<i64>,
    pub total_initial: i64,
    pub total_final: i64,
    pub components: Vec<ComponentCharge>,
    /// Every component has `V − E + F = 2` under the rotation.
    pub euler_consistent: bool,
    /// Structural hypotheses under which every final charge is
    /// non-negative.
    pub hypotheses: Vec<(String, bool)>,
}

impl ChargeReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|h| h.1)
    }

    pub fn negative_faces(&self) -> Vec<usize> {
        (0..self.face_final.len()).filter(|&f| self.face_final[f] < 0).collect()
    }

    pub fn negative_vertices(&self) -> Vec<VertexId> {
        (0..self.vertex_final.len()).filter(|&v| self.vertex_final[v] < 0).collect()
    }

    /// True unless the hypotheses hold and some final charge is negative.
    pub fn consistent(&self) -> bool {
        !self.hypotheses_hold() || (self.negative_faces().is_empty() && self.negative_vertices().is_empty())
    }
}

impl fmt::Display for ChargeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "faces {} vertices {}", self.face_lengths.len(), self.vertex_initial.len())?;
        for (i, c) in self.components.iter().enumerate() {
            writeln!(f, "component {i}: initial {} expected {}", c.initial, c.expected)?;
        }
        writeln!(f, "total initial {} final {}", self.total_initial, self.total_final)?;
        if !self.euler_consistent {
            writeln!(f, "WARNING: rotation is not planar; totals do not follow Euler's formula")?;
        }
        for (h, ok) in &self.hypotheses {
            writeln!(f, "[{}] {h}", if *ok { "ok" } else { "no" })?;
        }
        writeln!(
            f,
            "negative final charges: {} face(s), {} vertex(es)",
            self.negative_faces().len(),
            self.negative_vertices().len()
        )
    }
}

/// Face charge `|f| − 6`, vertex charge `2d − 6`; every face then sends 1
/// to each occurrence of a 2-vertex on its boundary walk.
pub fn discharging_audit(g: &MultiGraph, rot: &RotationSystem) -> ChargeReport {
    let (mut faces, euler) = rot.faces(g);
    let (comp, count) = g.component_ids();
    let mut face_comp: Vec<usize> = faces.iter().map(|f| comp[f.0[0].0]).collect();
    for v in 0..g.vertex_count() {
        if g.deg(v) == 0 {
            faces.push(FaceWalk(Vec::new()));
            face_comp.push(comp[v]);
        }
    }
    let face_lengths: Vec<usize> = faces.iter().map(FaceWalk::len).collect();
    let face_initial: Vec<i64> = face_lengths.iter().map(|&l| l as i64 - 6).collect();
    let vertex_initial: Vec<i64> = (0..g.vertex_count()).map(|v| 2 * g.deg(v) as i64 - 6).collect();
    let mut transfers = Vec::new();
    let mut face_final = face_initial.clone();
    let mut vertex_final = vertex_initial.clone();
    for (fi, f) in faces.iter().enumerate() {
        let mut got: BTreeMap<VertexId, i64> = BTreeMap::new();
        for &(v, _) in &f.0 {
            if g.deg(v) == 2 {
                *got.entry(v).or_default() += 1;
            }
        }
        for (v, amount) in got {
            face_final[fi] -= amount;
            vertex_final[v] += amount;
            transfers.push(Transfer { face: fi, vertex: v, amount });
        }
    }
    let mut components: Vec<ComponentCharge> = euler
        .components
        .iter()
        .map(|c| ComponentCharge { vertices: c.vertices, initial: 0, expected: -6 * c.characteristic() })
        .collect();
    for (fi, &c) in face_comp.iter().enumerate() {
        components[c].initial += face_initial[fi];
    }
    for v in 0..g.vertex_count() {
        components[comp[v]].initial += vertex_initial[v];
    }
    debug_assert_eq!(components.len(), count);
    let girth_ok = g.girth().is_none_or(|x| x >= 9);
    let min_deg = (0..g.vertex_count()).map(|v| g.deg(v)).min().unwrap_or(2);
    let no_adjacent_2s = g.edges().iter().all(|&(a, b)| g.deg(a) != 2 || g.deg(b) != 2);
    let small_faces_ok = faces.iter().filter(|f| f.len() == 9 || f.len() == 10).all(|f| {
        let mut threes: Vec<VertexId> = f.vertices().into_iter().filter(|&v| g.deg(v) == 3).collect();
        threes.sort_unstable();
        threes.dedup();
        threes.len() >= 6
    });
    let hypotheses = vec![
        ("planar rotation".to_string(), euler.is_planar()),
        ("subcubic".to_string(), g.max_degree() <= 3),
        ("girth >= 9".to_string(), girth_ok),
        ("minimum degree >= 2".to_string(), min_deg >= 2),
        ("no two adjacent 2-vertices".to_string(), no_adjacent_2s),
        ("every 9- and 10-face has six 3-vertices".to_string(), small_faces_ok),
    ];
    ChargeReport {
        total_initial: face_initial.iter().sum::<i64>() + vertex_initial.iter().sum::<i64>(),
        total_final: face_final.iter().sum::<i64>() + vertex_final.iter().sum::<i64>(),
        euler_consistent: euler.is_planar(),
        face_lengths,
        face_initial,
        vertex_initial,
        transfers,
        face_final,
        vertex_final,
        components,
        hypotheses,
    }
}

/// Replaces every edge by a path with `t` new inner vertices. Original
/// vertices keep their ids; the new vertices of edge `e` follow in edge
/// order, listed from `endpoints(e).0` towards `endpoints(e).1`.
pub fn subdivide_all(g: &MultiGraph, t: usize) -> MultiGraph {
    subdivide_with_rotation(g, &RotationSystem::from_adjacency(g), t).0
}

/// [`subdivide_all`] carrying a rotation system along.
pub fn subdivide_with_rotation(g: &MultiGraph, rot: &RotationSystem, t: usize) -> (MultiGraph, RotationSystem) {
    let mut h = MultiGraph::new(g.vertex_count());
    let mut ends = Vec::with_capacity(g.edge_count());
    let mut order: Vec<Vec<EdgeId>> = Vec::new();
    for &(a, b) in g.edges() {
        let mut prev = a;
        let mut first = None;
        for _ in 0..t {
            let x = h.add_vertex();
            let e = h.add_edge(prev, x).unwrap();
            first.get_or_insert(e);
            prev = x;
        }
        let e = h.add_edge(prev, b).unwrap();
        ends.push((first.unwrap_or(e), e));
    }
    for v in 0..h.vertex_count() {
        order.push(if v < g.vertex_count() {
            rot.order(v)
                .iter()
                .map(|&e| if g.endpoints(e).0 == v { ends[e].0 } else { ends[e].1 })
                .collect()
        } else {
            h.incident(v).iter().map(|&(_, e)| e).collect()
        });
    }
    let r = RotationSystem::new(&h, order).expect("subdivision keeps every edge end");
    (h, r)
}

/// Rotation from a straight-line drawing: neighbours in counterclockwise
/// order of direction.
pub fn rotation_from_coordinates(g: &MultiGraph, coords: &[(f64, f64)]) -> RotationSystem {
    let order = (0..g.vertex_count())
        .map(|v| {
            let mut inc: Vec<(f64, EdgeId)> = g
                .incident(v)
                .iter()
                .map(|&(w, e)| {
                    let (dx, dy) = (coords[w].0 - coords[v].0, coords[w].1 - coords[v].1);
                    (dy.atan2(dx), e)
                })
                .collect();
            inc.sort_by(|a, b| a.0.total_cmp(&b.0));
            inc.into_iter().map(|(_, e)| e).collect()
        })
        .collect();
    RotationSystem::new(g, order).expect("coordinates cover every vertex")
}

#[derive(Debug, Clone)]
pub struct CorpusMember {
    pub name: String,
    pub g: MultiGraph,
    pub rot: RotationSystem,
}

fn circle(n: usize, r: f64, phase: f64) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let a = phase + std::f64::consts::TAU * i as f64 / n as f64;
            (r * a.cos(), r * a.sin())
        })
        .collect()
}

/// Small cubic planar graphs with straight-line drawings.
pub fn cubic_planar_bases() -> Vec<(String, MultiGraph, RotationSystem)> {
    let mut out = Vec::new();
    let k4 = MultiGraph::from_edges(4, &[(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)]).unwrap();
    let mut c = circle(3, 2.0, 0.0);
    c.push((0.0, 0.0));
    out.push(("K4".to_string(), rotation_from_coordinates(&k4, &c), k4));
    for n in [3, 4, 5, 6] {
        let mut edges = Vec::new();
        for i in 0..n {
            edges.push((i, (i + 1) % n));
            edges.push((n + i, n + (i + 1) % n));
            edges.push((i, n + i));
        }
        let g = MultiGraph::from_edges(2 * n, &edges).unwrap();
        let mut c = circle(n, 2.0, 0.0);
        c.extend(circle(n, 1.0, 0.0));
        let name = if n == 4 { "Q3".to_string() } else { format!("prism{n}") };
        out.push((name, rotation_from_coordinates(&g, &c), g));
    }
    // outer 5-cycle o, middle 10-cycle m, inner 5-cycle n
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, 5 + 2 * i));
        edges.push((5 + 2 * i + 1, 15 + i));
        edges.push((15 + i, 15 + (i + 1) % 5));
    }
    for j in 0..10 {
        edges.push((5 + j, 5 + (j + 1) % 10));
    }
    let g = MultiGraph::from_edges(20, &edges).unwrap();
    let mut c = circle(5, 3.0, 0.0);
    c.extend(circle(10, 2.0, 0.0));
    c.extend(circle(5, 1.0, std::f64::consts::TAU / 10.0));
    out.push(("dodecahedron".to_string(), rotation_from_coordinates(&g, &c), g));
    out.into_iter().map(|(n, r, g)| (n, g, r)).collect()
}

/// Planar subcubic graphs of girth at least 9: subdivisions of the cubic
/// bases plus cycles, a theta graph, trees and graphs with pendant edges.
pub fn standard_corpus() -> Vec<CorpusMember> {
    let mut out = Vec::new();
    let bases = cubic_planar_bases();
    for (name, g, rot) in &bases {
        for t in [2, 3] {
            if name == "dodecahedron" && t == 3 {
                continue;
            }
            let (h, r) = subdivide_with_rotation(g, rot, t);
            out.push(CorpusMember { name: format!("{name}/t{t}"), g: h, rot: r });
        }
    }
    let (_, dodeca, drot) = bases.iter().find(|b| b.0 == "dodecahedron").unwrap();
    let (h, r) = subdivide_with_rotation(dodeca, drot, 1);
    out.push(CorpusMember { name: "dodecahedron/t1".into(), g: h, rot: r });
    for n in [9, 10, 13] {
        let g = MultiGraph::from_edges(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>()).unwrap();
        out.push(CorpusMember { name: format!("C{n}"), rot: RotationSystem::from_adjacency(&g), g });
    }
    // three paths of length 5 between two branch vertices
    let mut g = MultiGraph::new(2);
    let mut coords = vec![(-3.0, 0.0), (3.0, 0.0)];
    for j in 0..3 {
        let mut prev = 0;
        for i in 1..5 {
            let x = g.add_vertex();
            coords.push((-3.0 + 1.2 * i as f64, 2.0 * (j as f64 - 1.0)));
            g.add_edge(prev, x).unwrap();
            prev = x;
        }
        g.add_edge(prev, 1).unwrap();
    }
    out.push(CorpusMember { name: "theta5,5,5".into(), rot: rotation_from_coordinates(&g, &coords), g });
    // two 9-cycles joined by an edge
    let mut edges: Vec<(usize, usize)> = (0..9).map(|i| (i, (i + 1) % 9)).collect();
    edges.extend((0..9).map(|i| (9 + i, 9 + (i + 1) % 9)));
    edges.push((0, 9));
    let g = MultiGraph::from_edges(18, &edges).unwrap();
    out.push(CorpusMember { name: "dumbbell9".into(), rot: RotationSystem::from_adjacency(&g), g });
    // complete binary tree of depth 3, root of degree 2
    let edges: Vec<(usize, usize)> = (1..15).map(|i| ((i - 1) / 2, i)).collect();
    let g = MultiGraph::from_edges(15, &edges).unwrap();
    out.push(CorpusMember { name: "tree15".into(), rot: RotationSystem::from_adjacency(&g), g });
    // 9-cycle with a pendant edge at every other vertex
    let mut edges: Vec<(usize, usize)> = (0..9).map(|i| (i, (i + 1) % 9)).collect();
    edges.extend([(0, 9), (2, 10), (4, 11), (6, 12)]);
    let g = MultiGraph::from_edges(13, &edges).unwrap();
    out.push(CorpusMember { name: "C9+pendants".into(), rot: RotationSystem::from_adjacency(&g), g });
    // subdivided K4 with pendant edges on the middle vertex of three edges
    let (_, k4, krot) = &bases[0];
    let (mut h, r) = subdivide_with_rotation(k4, krot, 3);
    let mut orders = r.orders().to_vec();
    for e in 0..3 {
        // the middle inner vertex of edge e
        let mid = 4 + 3 * e + 1;
        let x = h.add_vertex();
        let f = h.add_edge(mid, x).unwrap();
        orders[mid].push(f);
        orders.push(vec![f]);
    }
    let r = RotationSystem::new(&h, orders).unwrap();
    out.push(CorpusMember { name: "K4/t3+pendants".into(), g: h, rot: r });
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentOutcome {
    /// A decomposition was found and verified on the member.
    Yes,
    /// The oracle proved that no decomposition exists.
    No,
    Timeout,
}

#[derive(Debug, Clone)]
pub struct ExperimentRow {
    pub name: String,
    pub vertices: usize,
    pub edges: usize,
    pub preconditions: bool,
    pub reductions: usize,
    pub reduced_edges: usize,
    pub outcome: ExperimentOutcome,
    /// Oracle run on the unreduced member, as a cross-check.
    pub direct: ExperimentOutcome,
    pub nodes: u64,
    pub millis: u128,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentReport {
    pub fn count(&self, o: ExperimentOutcome) -> usize {
        self.rows.iter().filter(|r| r.outcome == o).count()
    }
}

impl fmt::Display for ExperimentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(
                f,
                "{:<20} n={:<4} m={:<4} pre={} reductions={:<4} left={:<4} {:?} direct={:?} nodes={} {}ms",
                r.name,
                r.vertices,
                r.edges,
                if r.preconditions { "ok" } else { "FAIL" },
                r.reductions,
                r.reduced_edges,
                r.outcome,
                r.direct,
                r.nodes,
                r.millis
            )?;
        }
        writeln!(
            f,
            "yes {} no {} timeout {}",
            self.count(ExperimentOutcome::Yes),
            self.count(ExperimentOutcome::No),
            self.count(ExperimentOutcome::Timeout)
        )
    }
}

/// Reduces each member exhaustively, runs the exact oracle with `(∞,1)` on
/// what is left, and extends and verifies any decomposition found. Rows
/// follow corpus order.
pub fn experiment_girth9(corpus: &[CorpusMember], budget: u64) -> ExperimentReport {
    let rows = corpus
        .par_iter()
        .map(|m| {
            let start = Instant::now();
            let pre = check_preconditions(&m.g, &m.rot).passed();
            let (reduced, steps) = reduce_exhaustively(&m.g);
            let b = BoundSpec::inf(1);
            let res = solve_exact(&reduced, &b, budget);
            let outcome = match res.outcome {
                Outcome::Yes(lab) => {
                    let full = extend_all(&steps, &lab);
                    match verify(&m.g, &full, &b) {
                        Ok(()) => ExperimentOutcome::Yes,
                        Err(v) => panic!("{}: extended decomposition failed verification: {v}", m.name),
                    }
                }
                Outcome::No => ExperimentOutcome::No,
                Outcome::Timeout => ExperimentOutcome::Timeout,
            };
            let direct = match solve_exact(&m.g, &b, budget).outcome {
                Outcome::Yes(lab) => {
                    assert!(verify(&m.g, &lab, &b).is_ok(), "{}: oracle labeling failed verification", m.name);
                    ExperimentOutcome::Yes
                }
                Outcome::No => ExperimentOutcome::No,
                Outcome::Timeout => ExperimentOutcome::Timeout,
            };
            ExperimentRow {
                name: m.name.clone(),
                vertices: m.g.vertex_count(),
                edges: m.g.edge_count(),
                preconditions: pre,
                reductions: steps.len(),
                reduced_edges: reduced.edge_count(),
                outcome,
                direct,
                nodes: res.nodes,
                millis: start.elapsed().as_millis(),
            }
        })
        .collect();
    ExperimentReport { rows }
}
