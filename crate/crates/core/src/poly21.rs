//! Polynomial-time decision and construction for `(2,1)`-decompositions.
//!
//! A vertex of degree ≥ 4 rules a decomposition out. Otherwise the edges
//! split into elements: maximal paths whose ends have degree 1 or 3 and
//! whose inner vertices have degree 2, and cycles through at most one
//! degree-3 vertex. Which end edges of each element go to the matching is
//! a degree-constrained subgraph problem on a bipartite graph (degree-3
//! vertices against elements), and every solution of that problem expands
//! into a decomposition element by element.

use thiserror::Error;

use crate::decomp::{verify, BoundSpec, EdgeLabeling, Part, Violation};
use crate::factor::{solve_factor, DegreeSet, FactorError, FactorInstance};
use crate::graph::{EdgeId, MultiGraph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Poly21Error {
    #[error("vertex {0} has degree {1}; elements need maximum degree 3")]
    DegreeTooLarge(VertexId, usize),
    #[error("selection violates the degree set of factor vertex {0}")]
    BadSelection(VertexId),
    #[error("factor solver: {0}")]
    Factor(#[from] FactorError),
    #[error("reconstructed labeling failed verification: {0}")]
    Unverified(Violation),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    Path,
    Cycle,
}

/// Path `z_0 … z_t` with edges `e_i = z_i z_{i+1}`; for a cycle `z_t = z_0`
/// is its end vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub kind: ElementKind,
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl Element {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn start(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn end(&self) -> VertexId {
        *self.vertices.last().unwrap()
    }

    fn reversed(&self) -> Element {
        let mut vertices = self.vertices.clone();
        let mut edges = self.edges.clone();
        vertices.reverse();
        edges.reverse();
        Element { kind: self.kind, vertices, edges }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSystem {
    pub elements: Vec<Element>,
    /// Degree-3 vertices, increasing.
    pub x3: Vec<VertexId>,
}

/// Splits the edges into elements. Walks start at degree-1/3 vertices in
/// increasing order; a path with exactly one degree-3 end starts there;
/// a cycle without degree-3 vertices starts at its smallest vertex and
/// leaves along its smaller edge id.
pub fn decompose_paths(g: &MultiGraph) -> Result<PathSystem, Poly21Error> {
    if let Some(v) = (0..g.vertex_count()).find(|&v| g.deg(v) > 3) {
        return Err(Poly21Error::DegreeTooLarge(v, g.deg(v)));
    }
    let is_end = |v: VertexId| g.deg(v) == 1 || g.deg(v) == 3;
    let mut used = vec![false; g.edge_count()];
    let mut elements = Vec::new();
    let walk = |start: VertexId, first: EdgeId, used: &mut Vec<bool>| {
        let mut vertices = vec![start];
        let mut edges = vec![first];
        used[first] = true;
        let mut v = g.other_end(first, start);
        let mut last = first;
        vertices.push(v);
        while !is_end(v) && v != start {
            let &(w, e) = g.incident(v).iter().find(|&&(_, e)| e != last).expect("degree-2 vertex");
            used[e] = true;
            edges.push(e);
            vertices.push(w);
            last = e;
            v = w;
        }
        let kind = if v == start { ElementKind::Cycle } else { ElementKind::Path };
        Element { kind, vertices, edges }
    };
    for u in 0..g.vertex_count() {
        if !is_end(u) {
            continue;
        }
        let mut inc: Vec<EdgeId> = g.incident(u).iter().map(|&(_, e)| e).collect();
        inc.sort_unstable();
        for e in inc {
            if used[e] {
                continue;
            }
            let mut el = walk(u, e, &mut used);
            if el.kind == ElementKind::Path && g.deg(el.start()) == 1 && g.deg(el.end()) == 3 {
                el = el.reversed();
            }
            elements.push(el);
        }
    }
    for u in 0..g.vertex_count() {
        let first = g.incident(u).iter().map(|&(_, e)| e).filter(|&e| !used[e]).min();
        if let Some(e) = first {
            elements.push(walk(u, e, &mut used));
        }
    }
    let x3 = (0..g.vertex_count()).filter(|&v| g.deg(v) == 3).collect();
    Ok(PathSystem { elements, x3 })
}

/// Which end of an element an edge of the factor graph stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementEnd {
    Start,
    End,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorBuildOutput {
    pub inst: FactorInstance,
    /// Factor vertex of each degree-3 vertex of the input (`None` otherwise).
    pub x3_index: Vec<Option<VertexId>>,
    /// Factor vertex of each element.
    pub y_index: Vec<VertexId>,
    /// Per factor edge: element index and the end it represents.
    pub edge_origin: Vec<(usize, ElementEnd)>,
}

/// The degree-set instance: degree-3 vertices need exactly one selected
/// edge; an element with degree-3 vertices at all of its ends gets a set
/// determined by its length, every other element is unconstrained.
pub fn build_factor_instance(g: &MultiGraph, ps: &PathSystem) -> FactorBuildOutput {
    let mut h = MultiGraph::new(0);
    let mut sets = Vec::new();
    let mut x3_index = vec![None; g.vertex_count()];
    for &v in &ps.x3 {
        x3_index[v] = Some(h.add_vertex());
        sets.push(DegreeSet::new([1]));
    }
    let mut y_index = Vec::with_capacity(ps.elements.len());
    let mut edge_origin = Vec::new();
    for (i, el) in ps.elements.iter().enumerate() {
        let y = h.add_vertex();
        y_index.push(y);
        let ends = [(el.start(), ElementEnd::Start), (el.end(), ElementEnd::End)];
        let mut all_x3 = true;
        for (v, side) in ends {
            match x3_index[v] {
                Some(x) => {
                    h.add_edge(x, y).expect("distinct factor vertices");
                    edge_origin.push((i, side));
                }
                None => all_x3 = false,
            }
        }
        let set = if !all_x3 {
            DegreeSet::interval(0, 2)
        } else {
            match el.len() {
                1 => DegreeSet::new([2]),
                2 => DegreeSet::new([1]),
                3 => DegreeSet::new([0, 2]),
                4 => DegreeSet::new([1, 2]),
                _ => DegreeSet::interval(0, 2),
            }
        };
        sets.push(set);
    }
    let inst = FactorInstance::new(h, sets).expect("element sets are small gap sets");
    FactorBuildOutput { inst, x3_index, y_index, edge_origin }
}

/// Matching-edge indices `i` (edge `e_i`) of an element of length `t`,
/// given whether its start and end edges must be matched.
fn matched_indices(t: usize, at_start: bool, at_end: bool, ends_in_x3: bool) -> Vec<usize> {
    let odd = |lo: usize| (lo..t).filter(|i| i % 2 == 1).collect::<Vec<_>>();
    let even = |lo: usize| (lo..t).filter(|i| i % 2 == 0).collect::<Vec<_>>();
    if !ends_in_x3 {
        return if at_start { even(0) } else { odd(0) };
    }
    match (t, at_start, at_end) {
        (1, _, _) => vec![0],
        (2, true, _) => vec![0],
        (2, false, _) => vec![1],
        (3, true, true) => vec![0, 2],
        (3, _, _) => vec![1],
        (4, true, true) => vec![0, 3],
        (4, true, false) => vec![0, 2],
        (4, false, true) => vec![1, 3],
        (4, false, false) => unreachable!("length 4 needs a matched end"),
        (_, true, true) if t % 2 == 1 => even(0),
        (_, true, true) => [vec![0], odd(3)].concat(),
        (_, true, false) if t % 2 == 1 => [vec![0], odd(3)].concat(),
        (_, true, false) => even(0),
        (_, false, true) => {
            let mirrored = matched_indices(t, true, false, true);
            let mut v: Vec<usize> = mirrored.into_iter().map(|i| t - 1 - i).collect();
            v.sort_unstable();
            v
        }
        (_, false, false) if t % 2 == 1 => odd(0),
        (_, false, false) => [vec![1], even(4)].concat(),
    }
}

/// Expands a factor solution into a `(2,1)`-labeling (part B is the
/// matching). The end edge of an element at a degree-3 vertex is matched
/// exactly when the corresponding factor edge is selected; for a cycle the
/// number of its matched edges at the end vertex equals the number of its
/// selected factor edges.
pub fn reconstruct(
    g: &MultiGraph,
    ps: &PathSystem,
    build: &FactorBuildOutput,
    selection: &[EdgeId],
) -> Result<EdgeLabeling, Poly21Error> {
    let inst = &build.inst;
    let mut deg = vec![0usize; inst.h.vertex_count()];
    let mut at_start = vec![false; ps.elements.len()];
    let mut at_end = vec![false; ps.elements.len()];
    for &f in selection {
        let (a, b) = inst.h.endpoints(f);
        deg[a] += 1;
        deg[b] += 1;
        let (i, side) = build.edge_origin[f];
        match side {
            ElementEnd::Start => at_start[i] = true,
            ElementEnd::End => at_end[i] = true,
        }
    }
    if let Some(v) = (0..deg.len()).find(|&v| !inst.sets[v].contains(deg[v])) {
        return Err(Poly21Error::BadSelection(v));
    }
    let mut lab = EdgeLabeling::uniform(g.edge_count(), Part::A);
    for (i, el) in ps.elements.iter().enumerate() {
        let start_x3 = build.x3_index[el.start()].is_some();
        let end_x3 = build.x3_index[el.end()].is_some();
        let (mut s, mut e) = (at_start[i], at_end[i]);
        if el.kind == ElementKind::Cycle && (s || e) {
            // one matched cycle edge at the end vertex, taken at the start
            s = true;
            e = false;
        }
        let indices = if start_x3 && end_x3 {
            matched_indices(el.len(), s, e, true)
        } else if start_x3 {
            matched_indices(el.len(), s, false, false)
        } else {
            matched_indices(el.len(), false, false, false)
        };
        for j in indices {
            lab.set(el.edges[j], Part::B);
        }
    }
    Ok(lab)
}

/// Checks the end-edge correspondence between a labeling and a selection.
pub fn boundary_contract_holds(
    ps: &PathSystem,
    build: &FactorBuildOutput,
    selection: &[EdgeId],
    lab: &EdgeLabeling,
) -> bool {
    let mut chosen = vec![false; build.edge_origin.len()];
    for &f in selection {
        chosen[f] = true;
    }
    let mut selected_count = vec![0usize; ps.elements.len()];
    for (f, &(i, side)) in build.edge_origin.iter().enumerate() {
        let el = &ps.elements[i];
        if el.kind == ElementKind::Cycle {
            selected_count[i] += chosen[f] as usize;
            continue;
        }
        let edge = match side {
            ElementEnd::Start => el.edges[0],
            ElementEnd::End => *el.edges.last().unwrap(),
        };
        if (lab.get(edge) == Part::B) != chosen[f] {
            return false;
        }
    }
    ps.elements.iter().enumerate().all(|(i, el)| {
        if el.kind != ElementKind::Cycle || build.x3_index[el.start()].is_none() {
            return true;
        }
        let matched_at_end = [el.edges[0], *el.edges.last().unwrap()]
            .iter()
            .filter(|&&e| lab.get(e) == Part::B)
            .count();
        matched_at_end == selected_count[i]
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NoReason {
    DegreeAtLeast4(VertexId),
    FactorInfeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solve21 {
    Yes(EdgeLabeling),
    No(NoReason),
}

/// Decides `(2,1)`-decomposability; a yes comes with a verified labeling.
pub fn solve21(g: &MultiGraph) -> Result<Solve21, Poly21Error> {
    if let Some(v) = (0..g.vertex_count()).find(|&v| g.deg(v) >= 4) {
        return Ok(Solve21::No(NoReason::DegreeAtLeast4(v)));
    }
    let ps = decompose_paths(g)?;
    let build = build_factor_instance(g, &ps);
    let Some(selection) = solve_factor(&build.inst)? else {
        return Ok(Solve21::No(NoReason::FactorInfeasible));
    };
    let lab = reconstruct(g, &ps, &build, &selection)?;
    verify(g, &lab, &BoundSpec::finite(2, 1)).map_err(Poly21Error::Unverified)?;
    Ok(Solve21::Yes(lab))
}
