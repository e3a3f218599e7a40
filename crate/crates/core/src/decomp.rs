//! Edge labelings into two parts and verification of bounded linear forests.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{EdgeId, MultiGraph, VertexId};

/// Maximum number of edges per component of a linear forest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bound {
    Finite(usize),
    Infinite,
}

impl Bound {
    pub fn allows(self, len: usize) -> bool {
        match self {
            Bound::Finite(k) => len <= k,
            Bound::Infinite => true,
        }
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            Bound::Finite(k) => Some(k),
            Bound::Infinite => None,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(k) => write!(f, "{k}"),
            Bound::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompError {
    #[error("invalid bound {0:?}: expected a positive integer or \"inf\"")]
    BadBound(String),
    #[error("invalid bounds {0:?}: expected \"k,l\"")]
    BadBounds(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl FromStr for Bound {
    type Err = DecompError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Ok(Bound::Infinite);
        }
        match s.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Bound::Finite(k)),
            _ => Err(DecompError::BadBound(s.to_string())),
        }
    }
}

/// A pair of bounds with `k ≥ ℓ`. Part A carries `k`, part B carries `ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoundSpec {
    pub k: Bound,
    pub l: Bound,
    /// The constructor received the bounds in the opposite order.
    pub swapped: bool,
}

impl BoundSpec {
    pub fn new(first: Bound, second: Bound) -> Self {
        if first >= second {
            BoundSpec { k: first, l: second, swapped: false }
        } else {
            BoundSpec { k: second, l: first, swapped: true }
        }
    }

    pub fn finite(k: usize, l: usize) -> Self {
        BoundSpec::new(Bound::Finite(k), Bound::Finite(l))
    }

    pub fn inf(l: usize) -> Self {
        BoundSpec::new(Bound::Infinite, Bound::Finite(l))
    }

    pub fn bound(&self, part: Part) -> Bound {
        match part {
            Part::A => self.k,
            Part::B => self.l,
        }
    }
}

impl FromStr for BoundSpec {
    type Err = DecompError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once(',').ok_or_else(|| DecompError::BadBounds(s.to_string()))?;
        Ok(BoundSpec::new(a.parse()?, b.parse()?))
    }
}

impl fmt::Display for BoundSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.k, self.l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Part {
    A,
    B,
}

impl Part {
    pub fn other(self) -> Part {
        match self {
            Part::A => Part::B,
            Part::B => Part::A,
        }
    }
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Part::A => "A",
            Part::B => "B",
        })
    }
}

/// Part per edge id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeLabeling(pub Vec<Part>);

impl EdgeLabeling {
    pub fn uniform(m: usize, part: Part) -> Self {
        EdgeLabeling(vec![part; m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, e: EdgeId) -> Part {
        self.0[e]
    }

    pub fn set(&mut self, e: EdgeId, part: Part) {
        self.0[e] = part;
    }

    pub fn edges_in(&self, part: Part) -> Vec<EdgeId> {
        (0..self.0.len()).filter(|&e| self.0[e] == part).collect()
    }

    /// Exchanges the two parts.
    pub fn swapped(&self) -> Self {
        EdgeLabeling(self.0.iter().map(|p| p.other()).collect())
    }

    /// Number of edges of `part` at `v`.
    pub fn part_degree(&self, g: &MultiGraph, v: VertexId, part: Part) -> usize {
        g.incident(v).iter().filter(|&&(_, e)| self.0[e] == part).count()
    }

    pub fn to_text(&self) -> String {
        self.0.iter().enumerate().map(|(e, p)| format!("{e} {p}\n")).collect()
    }

    /// Parses `m` lines `edge_id A|B`, each id in `0..m` exactly once.
    pub fn parse(text: &str, m: usize) -> Result<Self, DecompError> {
        let mut parts: Vec<Option<Part>> = vec![None; m];
        let mut last_line = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            last_line = line;
            let l = raw.split('#').next().unwrap_or("").trim();
            if l.is_empty() {
                continue;
            }
            let toks: Vec<&str> = l.split_whitespace().collect();
            let err = |msg: String| DecompError::Parse { line, msg };
            if toks.len() != 2 {
                return Err(err("expected \"edge_id A|B\"".into()));
            }
            let e: usize = toks[0].parse().map_err(|_| err(format!("bad edge id {:?}", toks[0])))?;
            let part = match toks[1] {
                "A" | "a" => Part::A,
                "B" | "b" => Part::B,
                t => return Err(err(format!("bad part {t:?}"))),
            };
            if e >= m {
                return Err(err(format!("edge {e} out of range (graph has {m} edges)")));
            }
            if parts[e].replace(part).is_some() {
                return Err(err(format!("edge {e} labeled twice")));
            }
        }
        let parts = parts
            .into_iter()
            .enumerate()
            .map(|(e, p)| {
                p.ok_or(DecompError::Parse { line: last_line + 1, msg: format!("edge {e} unlabeled") })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EdgeLabeling(parts))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    DegreeExceeded,
    Cycle,
    ComponentTooLong,
    UnlabeledEdge,
}

/// A minimal certificate that an edge set is not a bounded linear forest:
/// three edges at one vertex, the edges of one cycle, a path of `k+1`
/// edges, or the edges missing from a labeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub part: Option<Part>,
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            ViolationKind::DegreeExceeded => "vertex of degree > 2",
            ViolationKind::Cycle => "cycle",
            ViolationKind::ComponentTooLong => "component too long",
            ViolationKind::UnlabeledEdge => "unlabeled edge",
        };
        if let Some(p) = self.part {
            write!(f, "part {p}: ")?;
        }
        write!(f, "{what}; vertices {:?}, edges {:?}", self.vertices, self.edges)
    }
}

/// A maximal path of a linear forest, `vertices.len() == edges.len() + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearPath {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl LinearPath {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Adjacency restricted to an edge set: per vertex, the chosen edges at it.
fn restricted_adjacency(g: &MultiGraph, edges: &[EdgeId]) -> Vec<Vec<EdgeId>> {
    let mut adj = vec![Vec::new(); g.vertex_count()];
    for &e in edges {
        let (u, v) = g.endpoints(e);
        adj[u].push(e);
        adj[v].push(e);
    }
    adj
}

/// Walks from an endpoint `start` (degree ≤ 1 in the restricted graph).
fn walk_path(g: &MultiGraph, adj: &[Vec<EdgeId>], start: VertexId) -> LinearPath {
    let mut vertices = vec![start];
    let mut edges = Vec::new();
    let mut prev: Option<EdgeId> = None;
    let mut v = start;
    while let Some(&e) = adj[v].iter().find(|&&e| Some(e) != prev) {
        edges.push(e);
        v = g.other_end(e, v);
        vertices.push(v);
        prev = Some(e);
    }
    LinearPath { vertices, edges }
}

/// Checks that `edges` induce a linear forest whose components have at
/// most `bound` edges.
pub fn is_bounded_linear_forest(
    g: &MultiGraph,
    edges: &[EdgeId],
    bound: Bound,
) -> Result<(), Violation> {
    let adj = restricted_adjacency(g, edges);
    if let Some(v) = (0..g.vertex_count()).find(|&v| adj[v].len() > 2) {
        return Err(Violation {
            kind: ViolationKind::DegreeExceeded,
            part: None,
            vertices: vec![v],
            edges: adj[v][..3].to_vec(),
        });
    }
    let mut visited = vec![false; g.vertex_count()];
    // paths first, from their endpoints
    for v in 0..g.vertex_count() {
        if adj[v].len() == 1 && !visited[v] {
            let p = walk_path(g, &adj, v);
            for &w in &p.vertices {
                visited[w] = true;
            }
            if !bound.allows(p.len()) {
                let k = bound.finite().expect("finite bound");
                return Err(Violation {
                    kind: ViolationKind::ComponentTooLong,
                    part: None,
                    vertices: p.vertices[..k + 2].to_vec(),
                    edges: p.edges[..k + 1].to_vec(),
                });
            }
        }
    }
    // whatever is left with edges lies on a cycle
    if let Some(v) = (0..g.vertex_count()).find(|&v| !visited[v] && adj[v].len() == 2) {
        let mut vertices = vec![v];
        let mut cyc = vec![adj[v][0]];
        let mut w = g.other_end(adj[v][0], v);
        while w != v {
            vertices.push(w);
            let last = *cyc.last().unwrap();
            let next = if adj[w][0] == last { adj[w][1] } else { adj[w][0] };
            cyc.push(next);
            w = g.other_end(next, w);
        }
        return Err(Violation { kind: ViolationKind::Cycle, part: None, vertices, edges: cyc });
    }
    Ok(())
}

/// Checks part A against `b.k` and part B against `b.l`.
pub fn verify(g: &MultiGraph, lab: &EdgeLabeling, b: &BoundSpec) -> Result<(), Violation> {
    if lab.len() != g.edge_count() {
        return Err(Violation {
            kind: ViolationKind::UnlabeledEdge,
            part: None,
            vertices: Vec::new(),
            edges: (lab.len()..g.edge_count()).collect(),
        });
    }
    for part in [Part::A, Part::B] {
        is_bounded_linear_forest(g, &lab.edges_in(part), b.bound(part))
            .map_err(|v| Violation { part: Some(part), ..v })?;
    }
    Ok(())
}

/// The maximal paths of a linear forest, each oriented from its smaller
/// endpoint, sorted by that endpoint.
pub fn components(g: &MultiGraph, edges: &[EdgeId]) -> Result<Vec<LinearPath>, Violation> {
    is_bounded_linear_forest(g, edges, Bound::Infinite)?;
    let adj = restricted_adjacency(g, edges);
    let mut visited = vec![false; g.vertex_count()];
    let mut out = Vec::new();
    for v in 0..g.vertex_count() {
        if adj[v].len() == 1 && !visited[v] {
            let p = walk_path(g, &adj, v);
            for &w in &p.vertices {
                visited[w] = true;
            }
            out.push(p);
        }
    }
    Ok(out)
}

/// Component index of every vertex in the forest spanned by `edges`
/// (`None` for vertices not touched by the set).
pub fn component_index(g: &MultiGraph, edges: &[EdgeId]) -> Result<Vec<Option<usize>>, Violation> {
    let paths = components(g, edges)?;
    let mut idx = vec![None; g.vertex_count()];
    for (i, p) in paths.iter().enumerate() {
        for &v in &p.vertices {
            idx[v] = Some(i);
        }
    }
    Ok(idx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> MultiGraph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        MultiGraph::from_edges(n, &edges).unwrap()
    }

    fn cycle(n: usize) -> MultiGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        MultiGraph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn bounded_paths() {
        let p = path(4);
        assert!(is_bounded_linear_forest(&p, &[0, 1, 2], Bound::Finite(3)).is_ok());
        let v = is_bounded_linear_forest(&p, &[0, 1, 2], Bound::Finite(2)).unwrap_err();
        assert_eq!(v.kind, ViolationKind::ComponentTooLong);
        assert_eq!(v.edges.len(), 3);
        let c5 = cycle(5);
        let v = is_bounded_linear_forest(&c5, &[0, 1, 2, 3, 4], Bound::Infinite).unwrap_err();
        assert_eq!(v.kind, ViolationKind::Cycle);
        assert_eq!(v.edges.len(), 5);
    }

    #[test]
    fn degree_witness() {
        let star = MultiGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let v = is_bounded_linear_forest(&star, &[0, 1, 2], Bound::Infinite).unwrap_err();
        assert_eq!(v.kind, ViolationKind::DegreeExceeded);
        assert_eq!(v.vertices, vec![0]);
    }

    #[test]
    fn digon_is_a_cycle() {
        let g = MultiGraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        let v = is_bounded_linear_forest(&g, &[0, 1], Bound::Infinite).unwrap_err();
        assert_eq!(v.kind, ViolationKind::Cycle);
        assert_eq!(v.edges.len(), 2);
    }

    #[test]
    fn verify_triangle() {
        let c3 = cycle(3);
        let b = BoundSpec::inf(1);
        let lab = EdgeLabeling(vec![Part::A, Part::A, Part::B]);
        assert!(verify(&c3, &lab, &b).is_ok());
        let all_a = EdgeLabeling::uniform(3, Part::A);
        let v = verify(&c3, &all_a, &b).unwrap_err();
        assert_eq!((v.kind, v.part), (ViolationKind::Cycle, Some(Part::A)));
        let short = EdgeLabeling(vec![Part::A]);
        assert_eq!(verify(&c3, &short, &b).unwrap_err().kind, ViolationKind::UnlabeledEdge);
    }

    #[test]
    fn single_matching_edge() {
        let g = path(2);
        assert!(verify(&g, &EdgeLabeling(vec![Part::B]), &BoundSpec::finite(2, 1)).is_ok());
    }

    #[test]
    fn components_of_forests() {
        let g = MultiGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let cs = components(&g, &[0, 1]).unwrap();
        assert_eq!(cs.len(), 2);
        assert!(cs.iter().all(|p| p.len() == 1));
        let p5 = path(5);
        let cs = components(&p5, &[0, 1, 2, 3]).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].vertices, vec![0, 1, 2, 3, 4]);
        assert!(components(&p5, &[]).unwrap().is_empty());
    }

    #[test]
    fn bounds_normalize() {
        let b: BoundSpec = "1,inf".parse().unwrap();
        assert_eq!(b.k, Bound::Infinite);
        assert_eq!(b.l, Bound::Finite(1));
        assert!(b.swapped);
        let b: BoundSpec = "3,2".parse().unwrap();
        assert!(!b.swapped);
        assert!("0,1".parse::<BoundSpec>().is_err());
        assert!("3".parse::<BoundSpec>().is_err());
    }

    #[test]
    fn labeling_text_round_trip() {
        let lab = EdgeLabeling(vec![Part::A, Part::B, Part::A]);
        assert_eq!(EdgeLabeling::parse(&lab.to_text(), 3).unwrap(), lab);
        assert!(EdgeLabeling::parse("0 A\n1 B\n", 3).is_err());
        assert!(EdgeLabeling::parse("0 A\n0 B\n1 A\n", 2).is_err());
        assert!(EdgeLabeling::parse("0 C\n", 1).is_err());
    }
}
