//! Loopless multigraphs with stable edge ids, rotation systems and the
//! plain-text edge-list format.

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range (graph has {count} vertices)")]
    VertexOutOfRange { vertex: VertexId, count: usize },
    #[error("edge {edge} out of range (graph has {count} edges)")]
    EdgeOutOfRange { edge: EdgeId, count: usize },
    #[error("loop at vertex {0} is not allowed")]
    Loop(VertexId),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("malformed rotation system: {0}")]
    Rotation(String),
}

/// Finite loopless multigraph. Edge ids are dense `0..m` and never change
/// once assigned; parallel edges get distinct ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MultiGraph {
    edges: Vec<(VertexId, VertexId)>,
    adj: Vec<Vec<(VertexId, EdgeId)>>,
}

impl MultiGraph {
    pub fn new(n: usize) -> Self {
        MultiGraph { edges: Vec::new(), adj: vec![Vec::new(); n] }
    }

    /// Builds a graph from an edge list; edge `i` of the list gets id `i`.
    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self, GraphError> {
        let mut g = MultiGraph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::Loop(u));
        }
        let e = self.edges.len();
        self.edges.push((u, v));
        self.adj[u].push((v, e));
        self.adj[v].push((u, e));
        Ok(e)
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v < self.adj.len() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { vertex: v, count: self.adj.len() })
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e]
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    /// The endpoint of `e` that is not `v`.
    pub fn other_end(&self, e: EdgeId, v: VertexId) -> VertexId {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Incident (neighbour, edge) pairs in insertion order.
    pub fn incident(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> Result<usize, GraphError> {
        self.check_vertex(v)?;
        Ok(self.adj[v].len())
    }

    /// Degree without the range check; panics on a bad vertex.
    pub fn deg(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edge ids joining `u` and `v`.
    pub fn edges_between(&self, u: VertexId, v: VertexId) -> Vec<EdgeId> {
        self.adj[u].iter().filter(|&&(w, _)| w == v).map(|&(_, e)| e).collect()
    }

    /// Component index per vertex, numbered in order of smallest vertex.
    pub fn component_ids(&self) -> (Vec<usize>, usize) {
        let n = self.vertex_count();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &(w, _) in &self.adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn is_connected(&self) -> bool {
        self.component_ids().1 <= 1
    }

    /// BFS distance from `u` to `v` ignoring the `excluded` edges.
    /// `None` means unreachable.
    pub fn dist_excluding(&self, u: VertexId, v: VertexId, excluded: &[EdgeId]) -> Option<usize> {
        if u == v {
            return Some(0);
        }
        let mut banned = vec![false; self.edge_count()];
        for &e in excluded {
            if e < banned.len() {
                banned[e] = true;
            }
        }
        self.bfs_dist(u, v, &banned)
    }

    fn bfs_dist(&self, u: VertexId, v: VertexId, banned: &[bool]) -> Option<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count()];
        dist[u] = 0;
        let mut queue = VecDeque::from([u]);
        while let Some(x) = queue.pop_front() {
            for &(y, e) in &self.adj[x] {
                if banned[e] || dist[y] != usize::MAX {
                    continue;
                }
                dist[y] = dist[x] + 1;
                if y == v {
                    return Some(dist[y]);
                }
                queue.push_back(y);
            }
        }
        None
    }

    /// Length of a shortest cycle, `None` for forests. Two parallel edges
    /// form a cycle of length 2.
    pub fn girth(&self) -> Option<usize> {
        let mut banned = vec![false; self.edge_count()];
        let mut best: Option<usize> = None;
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            banned[e] = true;
            if let Some(d) = self.bfs_dist(u, v, &banned) {
                best = Some(best.map_or(d + 1, |b| b.min(d + 1)));
            }
            banned[e] = false;
            if best == Some(2) {
                break;
            }
        }
        best
    }

    /// Copy of the graph without the given edges. Vertex ids are kept; the
    /// returned vector maps each new edge id to its id in `self`.
    pub fn without_edges(&self, removed: &[EdgeId]) -> (MultiGraph, Vec<EdgeId>) {
        let mut drop = vec![false; self.edge_count()];
        for &e in removed {
            drop[e] = true;
        }
        let mut g = MultiGraph::new(self.vertex_count());
        let mut map = Vec::new();
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            if !drop[e] {
                g.add_edge(u, v).expect("edge of a valid graph");
                map.push(e);
            }
        }
        (g, map)
    }
}

/// Cyclic order of incident edges around every vertex. Since there are no
/// loops, an edge id occurs at most once per vertex, so it names the
/// edge-end unambiguously.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationSystem {
    order: Vec<Vec<EdgeId>>,
}

impl RotationSystem {
    pub fn new(g: &MultiGraph, order: Vec<Vec<EdgeId>>) -> Result<Self, GraphError> {
        if order.len() != g.vertex_count() {
            return Err(GraphError::Rotation(format!(
                "{} vertex orders given for {} vertices",
                order.len(),
                g.vertex_count()
            )));
        }
        for (v, list) in order.iter().enumerate() {
            let mut expected: Vec<EdgeId> = g.incident(v).iter().map(|&(_, e)| e).collect();
            let mut got = list.clone();
            expected.sort_unstable();
            got.sort_unstable();
            if expected != got {
                return Err(GraphError::Rotation(format!(
                    "vertex {v} lists edges {list:?} but is incident to {expected:?}"
                )));
            }
        }
        Ok(RotationSystem { order })
    }

    /// The rotation given by adjacency (insertion) order.
    pub fn from_adjacency(g: &MultiGraph) -> Self {
        let order = (0..g.vertex_count())
            .map(|v| g.incident(v).iter().map(|&(_, e)| e).collect())
            .collect();
        RotationSystem { order }
    }

    pub fn order(&self, v: VertexId) -> &[EdgeId] {
        &self.order[v]
    }

    pub fn orders(&self) -> &[Vec<EdgeId>] {
        &self.order
    }

    /// Faces by the usual traversal: after arriving at `v` along `e`, leave
    /// along the successor of `e` in the rotation at `v`.
    pub fn faces(&self, g: &MultiGraph) -> (Vec<FaceWalk>, EulerCheck) {
        let m = g.edge_count();
        // dart 2e leaves the lower-indexed end recorded in edges[e].0
        let dart_tail = |d: usize| {
            let (a, b) = g.endpoints(d / 2);
            if d.is_multiple_of(2) {
                a
            } else {
                b
            }
        };
        let mut pos: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
        let mut slot = vec![(0usize, 0usize); 2 * m];
        for (v, list) in self.order.iter().enumerate() {
            pos[v] = list.clone();
            for (i, &e) in list.iter().enumerate() {
                let d = if g.endpoints(e).0 == v { 2 * e } else { 2 * e + 1 };
                slot[d] = (v, i);
            }
        }
        let mut seen = vec![false; 2 * m];
        let mut faces = Vec::new();
        for start in 0..2 * m {
            if seen[start] {
                continue;
            }
            let mut walk = Vec::new();
            let mut d = start;
            while !seen[d] {
                seen[d] = true;
                let e = d / 2;
                let tail = dart_tail(d);
                walk.push((tail, e));
                let head = g.other_end(e, tail);
                let arrive = if g.endpoints(e).0 == head { 2 * e } else { 2 * e + 1 };
                let (_, i) = slot[arrive];
                let list = &pos[head];
                let next_e = list[(i + 1) % list.len()];
                d = if g.endpoints(next_e).0 == head { 2 * next_e } else { 2 * next_e + 1 };
            }
            faces.push(FaceWalk(walk));
        }
        let euler = EulerCheck::compute(g, &faces);
        (faces, euler)
    }
}

/// A closed boundary walk: `(vertex, edge)` pairs where the walk leaves
/// `vertex` along `edge`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceWalk(pub Vec<(VertexId, EdgeId)>);

impl FaceWalk {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vertices(&self) -> Vec<VertexId> {
        self.0.iter().map(|&(v, _)| v).collect()
    }

    pub fn edges(&self) -> Vec<EdgeId> {
        self.0.iter().map(|&(_, e)| e).collect()
    }

    /// True when the walk is a cycle: no repeated vertex.
    pub fn is_non_degenerate(&self) -> bool {
        let mut vs = self.vertices();
        vs.sort_unstable();
        vs.windows(2).all(|w| w[0] != w[1])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentEuler {
    pub vertices: usize,
    pub edges: usize,
    /// Face count; an isolated vertex has one (empty) face.
    pub faces: usize,
}

impl ComponentEuler {
    pub fn characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges as i64 + self.faces as i64
    }
}

/// Euler's formula evaluated per connected component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerCheck {
    pub components: Vec<ComponentEuler>,
}

impl EulerCheck {
    fn compute(g: &MultiGraph, faces: &[FaceWalk]) -> Self {
        let (comp, count) = g.component_ids();
        let mut components =
            vec![ComponentEuler { vertices: 0, edges: 0, faces: 0 }; count];
        for &c in &comp {
            components[c].vertices += 1;
        }
        for &(u, _) in g.edges() {
            components[comp[u]].edges += 1;
        }
        for f in faces {
            components[comp[f.0[0].0]].faces += 1;
        }
        for c in &mut components {
            if c.edges == 0 {
                c.faces = 1;
            }
        }
        EulerCheck { components }
    }

    /// V − E + F = 2 for every component.
    pub fn is_planar(&self) -> bool {
        self.components.iter().all(|c| c.characteristic() == 2)
    }

    /// Whole-graph V − E + F with the outer face shared between components;
    /// equals 1 + (number of components) for a plane embedding.
    pub fn total(&self) -> i64 {
        let sum: i64 = self.components.iter().map(ComponentEuler::characteristic).sum();
        sum - (self.components.len() as i64 - 1).max(0)
    }
}

pub(crate) fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize, GraphError> {
    tok.parse()
        .map_err(|_| GraphError::Parse { line, msg: format!("expected {what}, found {tok:?}") })
}

/// Non-empty lines with comments stripped, tagged with 1-based numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// Reads the header and the edge lines, leaving the iterator after them.
pub(crate) fn parse_edge_block<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    text_lines: usize,
) -> Result<MultiGraph, GraphError> {
    let (hline, header) =
        lines.next().ok_or(GraphError::Parse { line: 1, msg: "missing header".into() })?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(GraphError::Parse { line: hline, msg: "header must be \"n m\"".into() });
    }
    let n = parse_usize(toks[0], hline, "vertex count")?;
    let m = parse_usize(toks[1], hline, "edge count")?;
    let mut g = MultiGraph::new(n);
    for _ in 0..m {
        let (line, l) = lines
            .next()
            .ok_or(GraphError::Parse { line: text_lines + 1, msg: format!("expected {m} edges") })?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(GraphError::Parse { line, msg: "edge line must be \"u v\"".into() });
        }
        let u = parse_usize(toks[0], line, "vertex")?;
        let v = parse_usize(toks[1], line, "vertex")?;
        g.add_edge(u, v).map_err(|e| GraphError::Parse { line, msg: e.to_string() })?;
    }
    Ok(g)
}

/// Parses the edge-list format; see the README for the exact grammar.
pub fn parse_graph(text: &str) -> Result<(MultiGraph, Option<RotationSystem>), GraphError> {
    let mut lines = content_lines(text);
    let g = parse_edge_block(&mut lines, text.lines().count())?;
    let n = g.vertex_count();
    let Some((line, l)) = lines.next() else {
        return Ok((g, None));
    };
    if l != "rotation" {
        return Err(GraphError::Parse { line, msg: format!("unexpected content {l:?}") });
    }
    let mut order: Vec<Option<Vec<EdgeId>>> = vec![None; n];
    for (line, l) in lines {
        let (head, rest) = l
            .split_once(':')
            .ok_or(GraphError::Parse { line, msg: "rotation line must be \"v: e e ...\"".into() })?;
        let v = parse_usize(head.trim(), line, "vertex")?;
        if v >= n {
            return Err(GraphError::Parse { line, msg: format!("vertex {v} out of range") });
        }
        if order[v].is_some() {
            return Err(GraphError::Parse { line, msg: format!("vertex {v} listed twice") });
        }
        let es = rest
            .split_whitespace()
            .map(|t| parse_usize(t, line, "edge id"))
            .collect::<Result<Vec<_>, _>>()?;
        order[v] = Some(es);
    }
    let order = order
        .into_iter()
        .enumerate()
        .map(|(v, o)| o.ok_or_else(|| GraphError::Rotation(format!("vertex {v} has no rotation line"))))
        .collect::<Result<Vec<_>, _>>()?;
    let rot = RotationSystem::new(&g, order)?;
    Ok((g, Some(rot)))
}

pub fn serialize_graph(g: &MultiGraph, rot: Option<&RotationSystem>) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", g.vertex_count(), g.edge_count()).unwrap();
    for &(u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    if let Some(rot) = rot {
        out.push_str("rotation\n");
        for (v, list) in rot.orders().iter().enumerate() {
            write!(out, "{v}:").unwrap();
            for e in list {
                write!(out, " {e}").unwrap();
            }
            out.push('\n');
        }
    }
    out
}
