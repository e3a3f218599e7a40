//! Forcer gadgets, attachment gadgets and the reductions from SAT variants.
//!
//! Every constructor also records a labeling of the edges it creates (the
//! decomposition the gadget is designed to force), so that witnesses for
//! satisfiable formulas can be assembled without search.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::decomp::{components, BoundSpec, EdgeLabeling, Part};
use crate::graph::{EdgeId, MultiGraph, VertexId};
use crate::oracle::{enumerate_with, SearchOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GadgetError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("invalid formula: {0}")]
    BadFormula(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("assignment does not satisfy clause {0}")]
    Unsatisfied(usize),
    #[error("assignment has {0} values, formula has {1} variables")]
    AssignmentLength(usize, usize),
    #[error("formula has {0} variables, brute force handles at most {1}")]
    TooLarge(usize, usize),
    #[error("enumeration did not finish within the node budget")]
    Budget,
}

/// Variable index (0-based) and sign; `true` is the positive literal.
pub type Literal = (usize, bool);

/// 3-CNF in which every literal occurs in exactly two clauses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf3B2 {
    pub num_vars: usize,
    pub clauses: Vec<[Literal; 3]>,
}

impl Cnf3B2 {
    pub fn new(num_vars: usize, clauses: Vec<[Literal; 3]>) -> Result<Self, GadgetError> {
        let mut count = vec![[0usize; 2]; num_vars];
        for (ci, c) in clauses.iter().enumerate() {
            for (j, &(x, s)) in c.iter().enumerate() {
                if x >= num_vars {
                    return Err(GadgetError::BadFormula(format!(
                        "clause {ci} uses variable {} of {num_vars}",
                        x + 1
                    )));
                }
                if c[..j].contains(&(x, s)) {
                    return Err(GadgetError::BadFormula(format!("clause {ci} repeats a literal")));
                }
                count[x][s as usize] += 1;
            }
        }
        if num_vars == 0 {
            return Err(GadgetError::BadFormula("no variables".into()));
        }
        for (x, c) in count.iter().enumerate() {
            if c[0] != 2 || c[1] != 2 {
                return Err(GadgetError::BadFormula(format!(
                    "variable {} occurs {} times positively and {} times negatively, expected 2 and 2",
                    x + 1,
                    c[1],
                    c[0]
                )));
            }
        }
        Ok(Cnf3B2 { num_vars, clauses })
    }

    pub fn satisfies(&self, phi: &[bool]) -> Result<(), GadgetError> {
        check_len(phi, self.num_vars)?;
        for (ci, c) in self.clauses.iter().enumerate() {
            if !c.iter().any(|&(x, s)| phi[x] == s) {
                return Err(GadgetError::Unsatisfied(ci));
            }
        }
        Ok(())
    }
}

/// Monotone 3-CNF read with not-all-equal semantics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfMnae {
    pub num_vars: usize,
    pub clauses: Vec<[usize; 3]>,
}

impl CnfMnae {
    /// Variables may repeat inside a clause.
    pub fn new(num_vars: usize, clauses: Vec<[usize; 3]>) -> Result<Self, GadgetError> {
        if num_vars == 0 {
            return Err(GadgetError::BadFormula("no variables".into()));
        }
        for (ci, c) in clauses.iter().enumerate() {
            if let Some(&x) = c.iter().find(|&&x| x >= num_vars) {
                return Err(GadgetError::BadFormula(format!(
                    "clause {ci} uses variable {} of {num_vars}",
                    x + 1
                )));
            }
        }
        Ok(CnfMnae { num_vars, clauses })
    }

    pub fn occurrences(&self) -> Vec<usize> {
        let mut occ = vec![0; self.num_vars];
        for c in &self.clauses {
            for &x in c {
                occ[x] += 1;
            }
        }
        occ
    }

    pub fn satisfies(&self, phi: &[bool]) -> Result<(), GadgetError> {
        check_len(phi, self.num_vars)?;
        for (ci, c) in self.clauses.iter().enumerate() {
            let t = c.iter().filter(|&&x| phi[x]).count();
            if t == 0 || t == 3 {
                return Err(GadgetError::Unsatisfied(ci));
            }
        }
        Ok(())
    }
}

fn check_len(phi: &[bool], n: usize) -> Result<(), GadgetError> {
    if phi.len() != n {
        return Err(GadgetError::AssignmentLength(phi.len(), n));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cnf {
    ThreeB2(Cnf3B2),
    Mnae(CnfMnae),
}

impl Cnf {
    pub fn num_vars(&self) -> usize {
        match self {
            Cnf::ThreeB2(f) => f.num_vars,
            Cnf::Mnae(f) => f.num_vars,
        }
    }

    pub fn satisfies(&self, phi: &[bool]) -> Result<(), GadgetError> {
        match self {
            Cnf::ThreeB2(f) => f.satisfies(phi),
            Cnf::Mnae(f) => f.satisfies(phi),
        }
    }

    /// DIMACS with a `c flavor 3b2|mnae` comment line.
    pub fn to_dimacs(&self) -> String {
        let (flavor, n, clauses): (&str, usize, Vec<Vec<i64>>) = match self {
            Cnf::ThreeB2(f) => (
                "3b2",
                f.num_vars,
                f.clauses
                    .iter()
                    .map(|c| c.iter().map(|&(x, s)| if s { x as i64 + 1 } else { -(x as i64 + 1) }).collect())
                    .collect(),
            ),
            Cnf::Mnae(f) => (
                "mnae",
                f.num_vars,
                f.clauses.iter().map(|c| c.iter().map(|&x| x as i64 + 1).collect()).collect(),
            ),
        };
        let mut s = format!("c flavor {flavor}\np cnf {n} {}\n", clauses.len());
        for c in clauses {
            for l in c {
                s.push_str(&format!("{l} "));
            }
            s.push_str("0\n");
        }
        s
    }

    pub fn parse_dimacs(text: &str) -> Result<Self, GadgetError> {
        let mut flavor: Option<String> = None;
        let mut header: Option<(usize, usize)> = None;
        let mut clauses: Vec<Vec<i64>> = Vec::new();
        let mut current: Vec<i64> = Vec::new();
        let perr = |line: usize, msg: String| GadgetError::Parse { line, msg };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.trim();
            if l.is_empty() {
                continue;
            }
            if let Some(rest) = l.strip_prefix('c') {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() == 2 && toks[0] == "flavor" {
                    flavor = Some(toks[1].to_ascii_lowercase());
                }
                continue;
            }
            if let Some(rest) = l.strip_prefix('p') {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 3 || toks[0] != "cnf" {
                    return Err(perr(line, "expected \"p cnf <vars> <clauses>\"".into()));
                }
                let n = toks[1].parse().map_err(|_| perr(line, format!("bad variable count {:?}", toks[1])))?;
                let m = toks[2].parse().map_err(|_| perr(line, format!("bad clause count {:?}", toks[2])))?;
                header = Some((n, m));
                continue;
            }
            let (n, _) = header.ok_or_else(|| perr(line, "clause before header".into()))?;
            for tok in l.split_whitespace() {
                let v: i64 = tok.parse().map_err(|_| perr(line, format!("bad literal {tok:?}")))?;
                if v == 0 {
                    if current.len() != 3 {
                        return Err(perr(line, format!("clause has {} literals, expected 3", current.len())));
                    }
                    clauses.push(std::mem::take(&mut current));
                } else if v.unsigned_abs() as usize > n {
                    return Err(perr(line, format!("literal {v} exceeds {n} variables")));
                } else {
                    current.push(v);
                }
            }
        }
        let (n, m) = header.ok_or_else(|| perr(1, "missing \"p cnf\" header".into()))?;
        if !current.is_empty() {
            return Err(perr(text.lines().count(), "last clause is not terminated by 0".into()));
        }
        if clauses.len() != m {
            return Err(perr(text.lines().count(), format!("header promises {m} clauses, found {}", clauses.len())));
        }
        match flavor.as_deref() {
            Some("3b2") => {
                let cl = clauses
                    .iter()
                    .map(|c| {
                        let lit = |v: i64| ((v.unsigned_abs() - 1) as usize, v > 0);
                        [lit(c[0]), lit(c[1]), lit(c[2])]
                    })
                    .collect();
                Ok(Cnf::ThreeB2(Cnf3B2::new(n, cl)?))
            }
            Some("mnae") => {
                if clauses.iter().flatten().any(|&v| v < 0) {
                    return Err(GadgetError::BadFormula("negative literal in a monotone formula".into()));
                }
                let cl = clauses.iter().map(|c| [c[0] as usize - 1, c[1] as usize - 1, c[2] as usize - 1]).collect();
                Ok(Cnf::Mnae(CnfMnae::new(n, cl)?))
            }
            Some(other) => Err(perr(1, format!("unknown flavor {other:?}"))),
            None => Err(perr(1, "missing \"c flavor 3b2|mnae\" line".into())),
        }
    }
}

pub const BRUTE_SAT_MAX_VARS: usize = 24;

/// Smallest satisfying assignment in binary order (variable 0 is the low
/// bit), or `None`.
pub fn brute_sat(inst: &Cnf) -> Result<Option<Vec<bool>>, GadgetError> {
    let n = inst.num_vars();
    if n > BRUTE_SAT_MAX_VARS {
        return Err(GadgetError::TooLarge(n, BRUTE_SAT_MAX_VARS));
    }
    for mask in 0u32..1 << n {
        let phi: Vec<bool> = (0..n).map(|x| mask >> x & 1 == 1).collect();
        if inst.satisfies(&phi).is_ok() {
            return Ok(Some(phi));
        }
    }
    Ok(None)
}

/// Every satisfying assignment, in binary order.
pub fn all_sat(inst: &Cnf) -> Result<Vec<Vec<bool>>, GadgetError> {
    let n = inst.num_vars();
    if n > BRUTE_SAT_MAX_VARS {
        return Err(GadgetError::TooLarge(n, BRUTE_SAT_MAX_VARS));
    }
    Ok((0u32..1 << n)
        .map(|mask| (0..n).map(|x| mask >> x & 1 == 1).collect::<Vec<bool>>())
        .filter(|phi| inst.satisfies(phi).is_ok())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ForcerKind {
    Long1,
    Short1,
    Short { k: usize, l: usize },
    Long { k: usize, l: usize },
    Symmetric { k: usize },
    LongInf { k: usize },
    PathForcer { k: usize },
}

impl ForcerKind {
    pub fn validate(self) -> Result<(), GadgetError> {
        match self {
            ForcerKind::Long1 | ForcerKind::Short1 => Ok(()),
            ForcerKind::Short { k, l } | ForcerKind::Long { k, l } if k > l && l >= 2 => Ok(()),
            ForcerKind::Symmetric { k } | ForcerKind::LongInf { k } | ForcerKind::PathForcer { k } if k >= 2 => {
                Ok(())
            }
            _ => Err(GadgetError::BadParams(format!("{self} needs k > l >= 2 or k >= 2"))),
        }
    }

    /// The bounds under which the forcer is designed to be rigid.
    pub fn default_bounds(self) -> BoundSpec {
        match self {
            ForcerKind::Long1 | ForcerKind::Short1 => BoundSpec::finite(4, 1),
            ForcerKind::Short { k, l } | ForcerKind::Long { k, l } => BoundSpec::finite(k, l),
            ForcerKind::Symmetric { k } => BoundSpec::finite(k, k),
            ForcerKind::LongInf { k } | ForcerKind::PathForcer { k } => BoundSpec::inf(k),
        }
    }

    pub fn vertex_count(self) -> usize {
        match self {
            ForcerKind::Long1 => 6,
            ForcerKind::Short1 => 7,
            ForcerKind::Short { k, .. } => k + 1,
            ForcerKind::Long { k, .. } => 2 * (k + 1) + 1,
            ForcerKind::Symmetric { k } => k + 1,
            ForcerKind::LongInf { k } => 4 * k + 7,
            ForcerKind::PathForcer { k } => k + 2 * (k - 1) * (k + 1),
        }
    }

    pub fn edge_count(self) -> usize {
        match self {
            ForcerKind::Long1 => 7,
            ForcerKind::Short1 => 8,
            ForcerKind::Short { k, l } => 2 * k - short_singles(k, l).len(),
            ForcerKind::Long { k, l } => 2 * (2 * k - short_singles(k, l).len()) + 2,
            ForcerKind::Symmetric { k } => 2 * k - 1,
            ForcerKind::LongInf { k } => 8 * k + 6,
            ForcerKind::PathForcer { k } => (k - 1) + 2 * (k - 1) * (2 * k + 1),
        }
    }
}

impl fmt::Display for ForcerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ForcerKind::Long1 => write!(f, "long1"),
            ForcerKind::Short1 => write!(f, "short1"),
            ForcerKind::Short { k, l } => write!(f, "short({k},{l})"),
            ForcerKind::Long { k, l } => write!(f, "long({k},{l})"),
            ForcerKind::Symmetric { k } => write!(f, "symmetric({k})"),
            ForcerKind::LongInf { k } => write!(f, "longinf({k})"),
            ForcerKind::PathForcer { k } => write!(f, "pathforcer({k})"),
        }
    }
}

/// Positions `i` of the single (undoubled) edges `v_i v_{i+1}` of a short
/// forcer, in decreasing order.
pub fn short_singles(k: usize, l: usize) -> Vec<usize> {
    (0..=(k - 1) / (l + 1)).map(|mu| k - 1 - mu * (l + 1)).collect()
}

/// A constructed gadget with named vertices.
#[derive(Debug, Clone)]
pub struct GadgetOutput {
    pub g: MultiGraph,
    pub roles: BTreeMap<String, VertexId>,
    pub tip: Option<VertexId>,
    /// Attachment vertices, in order.
    pub attach: Vec<VertexId>,
    pattern: Vec<Option<Part>>,
}

impl GadgetOutput {
    /// The decomposition recorded during construction, when it covers
    /// every edge.
    pub fn pattern(&self) -> Option<EdgeLabeling> {
        self.pattern.iter().copied().collect::<Option<Vec<Part>>>().map(EdgeLabeling)
    }

    pub fn role(&self, name: &str) -> Option<VertexId> {
        self.roles.get(name).copied()
    }
}

#[derive(Default)]
struct Builder {
    g: MultiGraph,
    pattern: Vec<Option<Part>>,
    roles: BTreeMap<String, VertexId>,
}

impl Builder {
    fn vertex(&mut self) -> VertexId {
        self.g.add_vertex()
    }

    fn named(&mut self, name: String) -> VertexId {
        let v = self.vertex();
        self.roles.insert(name, v);
        v
    }

    fn edge(&mut self, u: VertexId, v: VertexId, part: Option<Part>) -> EdgeId {
        let e = self.g.add_edge(u, v).expect("gadget edges join distinct vertices");
        self.pattern.push(part);
        e
    }

    fn double(&mut self, u: VertexId, v: VertexId) {
        self.edge(u, v, Some(Part::A));
        self.edge(u, v, Some(Part::B));
    }

    fn host_or_new(&mut self, host: Option<VertexId>) -> VertexId {
        host.unwrap_or_else(|| self.vertex())
    }

    /// Adds a forcer whose tip is `host` (or a new vertex) and returns the
    /// tip. `flip` puts the tip path of a symmetric forcer in B.
    fn forcer(&mut self, kind: ForcerKind, host: Option<VertexId>, flip: bool) -> VertexId {
        let tip = self.host_or_new(host);
        match kind {
            ForcerKind::Long1 => {
                let p: Vec<VertexId> = (0..5).map(|_| self.vertex()).collect();
                self.double(p[0], p[1]);
                self.edge(p[1], p[2], Some(Part::A));
                self.edge(p[2], p[3], Some(Part::A));
                self.double(p[3], p[4]);
                self.edge(p[2], tip, Some(Part::B));
            }
            ForcerKind::Short1 => {
                let inner = self.forcer(ForcerKind::Long1, None, false);
                self.edge(tip, inner, Some(Part::A));
            }
            ForcerKind::Short { k, l } => {
                let singles = short_singles(k, l);
                let mut v = vec![0; k + 1];
                v[k] = tip;
                for i in (0..k).rev() {
                    v[i] = self.vertex();
                }
                for i in 0..k {
                    if singles.contains(&i) {
                        self.edge(v[i], v[i + 1], Some(Part::A));
                    } else {
                        self.double(v[i], v[i + 1]);
                    }
                }
            }
            ForcerKind::Long { k, l } => {
                for _ in 0..2 {
                    let t = self.forcer(ForcerKind::Short { k, l }, None, false);
                    self.edge(t, tip, Some(Part::B));
                }
            }
            ForcerKind::Symmetric { k } => {
                let mut v = vec![0; k + 1];
                v[k] = tip;
                for i in (0..k).rev() {
                    v[i] = self.vertex();
                }
                for i in 0..k - 1 {
                    self.double(v[i], v[i + 1]);
                }
                self.edge(v[k - 1], tip, Some(if flip { Part::B } else { Part::A }));
            }
            ForcerKind::LongInf { k } => {
                for _ in 0..2 {
                    let w = self.vertex();
                    self.forcer(ForcerKind::Short { k: k + 1, l: k }, Some(w), false);
                    self.forcer(ForcerKind::Short { k: k + 1, l: k }, Some(w), false);
                    self.edge(w, tip, Some(Part::B));
                }
            }
            ForcerKind::PathForcer { k } => {
                let mut p = vec![0; k];
                p[k - 1] = tip;
                for i in (0..k - 1).rev() {
                    p[i] = self.vertex();
                }
                for i in 0..k - 1 {
                    self.forcer(ForcerKind::Short { k: k + 1, l: k }, Some(p[i]), false);
                    self.forcer(ForcerKind::Short { k: k + 1, l: k }, Some(p[i]), false);
                }
                for i in 0..k - 1 {
                    self.edge(p[i], p[i + 1], Some(Part::B));
                }
            }
        }
        tip
    }

    fn finish(self, tip: Option<VertexId>, attach: Vec<VertexId>) -> GadgetOutput {
        GadgetOutput { g: self.g, roles: self.roles, tip, attach, pattern: self.pattern }
    }
}

pub fn build_forcer(kind: ForcerKind) -> Result<GadgetOutput, GadgetError> {
    kind.validate()?;
    let mut b = Builder::default();
    let tip = b.forcer(kind, None, false);
    b.roles.insert("tip".into(), tip);
    let out = b.finish(Some(tip), Vec::new());
    assert_eq!(out.g.vertex_count(), kind.vertex_count(), "{kind} vertex count");
    assert_eq!(out.g.edge_count(), kind.edge_count(), "{kind} edge count");
    Ok(out)
}

/// One checked statement of a property report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assertion {
    pub what: String,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub subject: String,
    pub bounds: BoundSpec,
    /// Decompositions found, counted up to permuting parallel edges.
    pub count: usize,
    pub assertions: Vec<Assertion>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.holds)
    }

    fn check(&mut self, what: impl Into<String>, holds: bool) {
        self.assertions.push(Assertion { what: what.into(), holds });
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} under {}: {} decomposition(s)", self.subject, self.bounds, self.count)?;
        for a in &self.assertions {
            writeln!(f, "  [{}] {}", if a.holds { "ok" } else { "FAIL" }, a.what)?;
        }
        Ok(())
    }
}

pub const ENUMERATION_BUDGET: u64 = 50_000_000;

fn enumerate_all(g: &MultiGraph, b: &BoundSpec, limit: usize) -> Result<Vec<EdgeLabeling>, GadgetError> {
    let en = enumerate_with(g, b, limit, ENUMERATION_BUDGET, SearchOptions::default());
    if en.timed_out {
        return Err(GadgetError::Budget);
    }
    Ok(en.labelings)
}

/// Ends of the paths of one part: `(vertex, length)` for each endpoint.
fn path_ends(g: &MultiGraph, lab: &EdgeLabeling, part: Part) -> Vec<(VertexId, usize)> {
    let paths = components(g, &lab.edges_in(part)).expect("labeling verified by the oracle");
    paths
        .iter()
        .flat_map(|p| [(p.vertices[0], p.len()), (*p.vertices.last().unwrap(), p.len())])
        .collect()
}

fn ends_path_of(g: &MultiGraph, lab: &EdgeLabeling, part: Part, v: VertexId, len: usize) -> bool {
    path_ends(g, lab, part).contains(&(v, len))
}

/// Representative of a labeling up to permuting parallel edges: inside each
/// parallel class the A labels go to the smallest ids.
pub fn canonical_form(g: &MultiGraph, lab: &EdgeLabeling) -> EdgeLabeling {
    let mut classes: BTreeMap<(VertexId, VertexId), Vec<EdgeId>> = BTreeMap::new();
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        classes.entry((u.min(v), u.max(v))).or_default().push(e);
    }
    let mut out = lab.clone();
    for ids in classes.values() {
        let a = ids.iter().filter(|&&e| lab.get(e) == Part::A).count();
        for (i, &e) in ids.iter().enumerate() {
            out.set(e, if i < a { Part::A } else { Part::B });
        }
    }
    out
}

/// Enumerates the forcer under `bounds` and checks the count and the
/// conditions at the tip.
pub fn check_forcer_property(kind: ForcerKind, bounds: &BoundSpec) -> Result<PropertyReport, GadgetError> {
    let out = build_forcer(kind)?;
    let g = &out.g;
    let tip = out.tip.unwrap();
    let labs = enumerate_all(g, bounds, 16)?;
    let mut rep = PropertyReport { subject: kind.to_string(), bounds: *bounds, count: labs.len(), assertions: Vec::new() };
    let deg = |lab: &EdgeLabeling, p: Part| lab.part_degree(g, tip, p);
    if let ForcerKind::Symmetric { k } = kind {
        rep.check("exactly 2 decompositions", labs.len() == 2);
        if labs.len() == 2 {
            rep.check(
                "the two decompositions differ by exchanging the parts",
                canonical_form(g, &labs[0].swapped()) == labs[1],
            );
        }
        for (i, lab) in labs.iter().enumerate() {
            let ok = [Part::A, Part::B].iter().any(|&p| deg(lab, p.other()) == 0 && ends_path_of(g, lab, p, tip, k));
            rep.check(format!("decomposition {i}: tip has degree 0 in one part and ends a {k}-path in the other"), ok);
        }
        let pat = out.pattern().unwrap();
        rep.check("the constructed decomposition is among them", labs.contains(&canonical_form(g, &pat)));
        return Ok(rep);
    }
    rep.check("exactly 1 decomposition", labs.len() == 1);
    let Some(lab) = labs.first() else {
        return Ok(rep);
    };
    match kind {
        ForcerKind::Long1 => {
            rep.check("tip has A-degree 0", deg(lab, Part::A) == 0);
            rep.check("tip has B-degree 1", deg(lab, Part::B) == 1);
        }
        ForcerKind::Short1 => {
            rep.check("tip has B-degree 0", deg(lab, Part::B) == 0);
            rep.check("tip lies on an A-path of length 1", ends_path_of(g, lab, Part::A, tip, 1));
        }
        ForcerKind::Short { k, .. } => {
            rep.check("tip has B-degree 0", deg(lab, Part::B) == 0);
            rep.check(format!("tip ends an A-path of length {k}"), ends_path_of(g, lab, Part::A, tip, k));
        }
        ForcerKind::Long { .. } | ForcerKind::LongInf { .. } => {
            rep.check("tip has A-degree 0", deg(lab, Part::A) == 0);
            rep.check("tip has B-degree 2", deg(lab, Part::B) == 2);
        }
        ForcerKind::PathForcer { k } => {
            rep.check("tip has A-degree 0", deg(lab, Part::A) == 0);
            rep.check(format!("tip ends a B-path of length {}", k - 1), ends_path_of(g, lab, Part::B, tip, k - 1));
        }
        ForcerKind::Symmetric { .. } => unreachable!(),
    }
    let pat = out.pattern().unwrap();
    rep.check("it equals the constructed decomposition", canonical_form(g, &pat) == *lab);
    Ok(rep)
}

/// Edge layout of an attachment gadget, used to label it either way.
#[derive(Debug, Clone)]
struct AlphaLayout {
    k: usize,
    l: usize,
    a: Vec<VertexId>,
    va: Vec<EdgeId>,
    wb: Vec<EdgeId>,
    p: Vec<EdgeId>,
    q: Vec<EdgeId>,
    /// All edges of the gadget, including forcers.
    all: Vec<EdgeId>,
}

/// Which way the attachment vertices are covered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cover {
    /// Each attachment vertex ends a k-path in part A.
    K,
    /// Each attachment vertex ends an ℓ-path in part B.
    L,
}

fn add_alpha(b: &mut Builder, alpha: usize, k: usize, l: usize, prefix: &str) -> AlphaLayout {
    let first = b.g.edge_count();
    let v: Vec<VertexId> = (1..=alpha).map(|i| b.named(format!("{prefix}v{i}"))).collect();
    let w: Vec<VertexId> = (1..=alpha).map(|i| b.named(format!("{prefix}w{i}"))).collect();
    let a: Vec<VertexId> = (1..=alpha).map(|i| b.named(format!("{prefix}a{i}"))).collect();
    let bb: Vec<VertexId> = (1..=alpha).map(|i| b.named(format!("{prefix}b{i}"))).collect();
    let mut lay = AlphaLayout { k, l, a: a.clone(), va: vec![], wb: vec![], p: vec![], q: vec![], all: vec![] };
    for i in 0..alpha {
        lay.va.push(b.edge(v[i], a[i], None));
        lay.wb.push(b.edge(w[i], bb[i], None));
    }
    // P-interior forcers end their tip path in B, Q-interior ones in A
    let (p_forcer, q_forcer) = if k > l {
        (ForcerKind::Long { k, l }, ForcerKind::Short { k, l })
    } else {
        (ForcerKind::Symmetric { k }, ForcerKind::Symmetric { k })
    };
    let path = |b: &mut Builder, from: VertexId, to: VertexId, len: usize, forcer: ForcerKind, flip: bool| {
        let mut prev = from;
        let mut edges = Vec::new();
        for _ in 1..len {
            let x = b.vertex();
            b.forcer(forcer, Some(x), flip);
            edges.push(b.edge(prev, x, None));
            prev = x;
        }
        edges.push(b.edge(prev, to, None));
        edges
    };
    for i in 0..alpha {
        let pe = path(b, v[i], w[i], k - 1, p_forcer, true);
        lay.p.extend(pe);
        let qe = path(b, w[i], v[(i + 1) % alpha], l - 1, q_forcer, false);
        lay.q.extend(qe);
    }
    lay.all = (first..b.g.edge_count()).collect();
    lay
}

impl AlphaLayout {
    fn label(&self, pattern: &[Option<Part>], cover: Cover, out: &mut EdgeLabeling) {
        for &e in &self.all {
            if let Some(p) = pattern[e] {
                out.set(e, p);
            }
        }
        // with k = l the second cover is the first one with the parts exchanged
        let (va, wb) = match cover {
            Cover::L if self.k > self.l => (Part::B, Part::A),
            _ => (Part::A, Part::B),
        };
        for &e in &self.va {
            out.set(e, va);
        }
        for &e in &self.wb {
            out.set(e, wb);
        }
        for &e in &self.p {
            out.set(e, Part::A);
        }
        for &e in &self.q {
            out.set(e, Part::B);
        }
        if self.k == self.l && cover == Cover::L {
            for &e in &self.all {
                out.set(e, out.get(e).other());
            }
        }
    }
}

/// Closed-form vertex and edge counts of an attachment gadget.
pub fn alpha_gadget_size(alpha: usize, k: usize, l: usize) -> (usize, usize) {
    let (pv, pe, qv, qe) = if k > l {
        let p = ForcerKind::Long { k, l };
        let q = ForcerKind::Short { k, l };
        (p.vertex_count(), p.edge_count(), q.vertex_count(), q.edge_count())
    } else {
        let s = ForcerKind::Symmetric { k };
        (s.vertex_count(), s.edge_count(), s.vertex_count(), s.edge_count())
    };
    let v = 4 * alpha + alpha * (k - 2) * pv + alpha * (l - 2) * qv;
    let e = 2 * alpha + alpha * (k - 1) + alpha * (l - 1) + alpha * (k - 2) * pe + alpha * (l - 2) * qe;
    (v, e)
}

/// Gadget with `alpha` degree-1 attachment vertices that are either all
/// ends of k-paths in A or all ends of ℓ-paths in B. The recorded pattern
/// is the [`Cover::K`] decomposition.
pub fn build_alpha_gadget(alpha: usize, k: usize, l: usize) -> Result<GadgetOutput, GadgetError> {
    Ok(alpha_gadget_with_layout(alpha, k, l)?.0)
}

fn alpha_gadget_with_layout(alpha: usize, k: usize, l: usize) -> Result<(GadgetOutput, AlphaLayout), GadgetError> {
    if alpha < 2 || l < 2 || k < l {
        return Err(GadgetError::BadParams(format!("attachment gadget needs alpha >= 2 and k >= l >= 2, got ({alpha},{k},{l})")));
    }
    let mut b = Builder::default();
    let lay = add_alpha(&mut b, alpha, k, l, "");
    let mut lab = EdgeLabeling::uniform(b.g.edge_count(), Part::A);
    lay.label(&b.pattern, Cover::K, &mut lab);
    b.pattern = lab.0.iter().map(|&p| Some(p)).collect();
    let out = b.finish(None, lay.a.clone());
    assert_eq!((out.g.vertex_count(), out.g.edge_count()), alpha_gadget_size(alpha, k, l));
    Ok((out, lay))
}

/// The decomposition of [`build_alpha_gadget`] realizing `cover`.
pub fn alpha_gadget_labeling(alpha: usize, k: usize, l: usize, cover: Cover) -> Result<EdgeLabeling, GadgetError> {
    let (out, lay) = alpha_gadget_with_layout(alpha, k, l)?;
    let mut lab = EdgeLabeling::uniform(out.g.edge_count(), Part::A);
    lay.label(&out.pattern, cover, &mut lab);
    Ok(lab)
}

fn covered(g: &MultiGraph, lab: &EdgeLabeling, attach: &[VertexId], part: Part, len: usize) -> bool {
    let ends = path_ends(g, lab, part);
    attach.iter().all(|&a| ends.contains(&(a, len)))
}

/// Checks the three defining properties of an attachment gadget on `g` by
/// enumerating every decomposition.
pub fn check_attachment_properties(
    g: &MultiGraph,
    attach: &[VertexId],
    k: usize,
    l: usize,
    subject: String,
) -> Result<PropertyReport, GadgetError> {
    let bounds = BoundSpec::finite(k, l);
    let labs = enumerate_all(g, &bounds, usize::MAX)?;
    let kc: Vec<bool> = labs.iter().map(|lab| covered(g, lab, attach, Part::A, k)).collect();
    // with k = ℓ the parts are interchangeable and covering may use either
    let lc: Vec<bool> = labs
        .iter()
        .map(|lab| covered(g, lab, attach, Part::B, l) || (k == l && covered(g, lab, attach, Part::A, k)))
        .collect();
    let mut rep = PropertyReport { subject, bounds, count: labs.len(), assertions: Vec::new() };
    rep.check(format!("some decomposition ends a {k}-path of A at every attachment vertex"), kc.iter().any(|&x| x));
    rep.check(format!("some decomposition ends a {l}-path of B at every attachment vertex"), lc.iter().any(|&x| x));
    let bad = (0..labs.len()).find(|&i| !kc[i] && !lc[i]);
    rep.check(
        match bad {
            None => "every decomposition does one or the other".to_string(),
            Some(i) => format!("every decomposition does one or the other (decomposition {i} does neither)"),
        },
        bad.is_none(),
    );
    Ok(rep)
}

pub fn check_alpha_gadget(alpha: usize, k: usize, l: usize) -> Result<PropertyReport, GadgetError> {
    let out = build_alpha_gadget(alpha, k, l)?;
    check_attachment_properties(&out.g, &out.attach, k, l, format!("({alpha},{k},{l}) gadget"))
}

/// Removes one copy of each doubled edge in turn and reports the first
/// corrupted gadget that loses a property, with the removed edge. `None`
/// when the gadget has no doubled edges or no removal breaks it.
pub fn mutation_check(alpha: usize, k: usize, l: usize) -> Result<Option<(EdgeId, PropertyReport)>, GadgetError> {
    let out = build_alpha_gadget(alpha, k, l)?;
    let g = &out.g;
    for e in 0..g.edge_count() {
        let (u, v) = g.endpoints(e);
        let class = g.edges_between(u, v);
        if class.len() < 2 || class[0] != e {
            continue;
        }
        let (h, _) = g.without_edges(&[e]);
        let rep = check_attachment_properties(&h, &out.attach, k, l, format!("({alpha},{k},{l}) gadget without edge {e}"))?;
        if !rep.passed() {
            return Ok(Some((e, rep)));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// `(9,1)` from `(3,B2)` formulas.
    K1,
    /// `(∞,k)` from `(3,B2)` formulas.
    InfK(usize),
    /// `(k,ℓ)` from monotone not-all-equal formulas.
    Kl(usize, usize),
}

impl Variant {
    pub fn bounds(self) -> BoundSpec {
        match self {
            Variant::K1 => BoundSpec::finite(9, 1),
            Variant::InfK(k) => BoundSpec::inf(k),
            Variant::Kl(k, l) => BoundSpec::finite(k, l),
        }
    }
}

#[derive(Debug, Clone)]
struct VarLayout {
    u12: EdgeId,
    u34: EdgeId,
    cycle_rest: [EdgeId; 4],
    uv: [EdgeId; 4],
    /// Wiring edge at each `v` stub.
    wire: [EdgeId; 4],
}

#[derive(Debug, Clone)]
struct ClauseLayout {
    /// `a_i b_i`.
    ab: [EdgeId; 3],
    /// `b_i a_{i+1}`.
    ba: [EdgeId; 3],
    /// Wiring edge at `a_i`.
    wire: [EdgeId; 3],
}

#[derive(Debug, Clone)]
enum Layout {
    ThreeB2 { vars: Vec<VarLayout>, clauses: Vec<ClauseLayout> },
    Nae { gadgets: Vec<AlphaLayout>, leaving: Vec<Vec<EdgeId>> },
}

/// A reduction graph with its named vertices.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub g: MultiGraph,
    pub roles: BTreeMap<String, VertexId>,
    pub variant: Variant,
    pub formula: Cnf,
    pattern: Vec<Option<Part>>,
    layout: Layout,
}

impl Reduction {
    pub fn bounds(&self) -> BoundSpec {
        self.variant.bounds()
    }

    pub fn role(&self, name: &str) -> Option<VertexId> {
        self.roles.get(name).copied()
    }
}

/// Vertices and edges contributed per variable and per clause by the
/// `(3,B2)` reductions.
pub fn reduction_3b2_sizes(variant: Variant) -> ((usize, usize), (usize, usize)) {
    let (w, v): (Vec<ForcerKind>, Vec<ForcerKind>) = match variant {
        Variant::K1 => (vec![ForcerKind::Long1], vec![ForcerKind::Short1]),
        Variant::InfK(k) => (
            vec![ForcerKind::LongInf { k }],
            vec![ForcerKind::Short { k: k + 1, l: k }, ForcerKind::PathForcer { k }],
        ),
        Variant::Kl(..) => panic!("not a (3,B2) reduction"),
    };
    let pendant_v = |fs: &[ForcerKind]| fs.iter().map(|f| f.vertex_count() - 1).sum::<usize>();
    let pendant_e = |fs: &[ForcerKind]| fs.iter().map(|f| f.edge_count()).sum::<usize>();
    let var_v = 10 + 2 * pendant_v(&w) + 4 * pendant_v(&v);
    // the 4 wiring edges are counted with the variable
    let var_e = 6 + 4 + 4 + 2 * pendant_e(&w) + 4 * pendant_e(&v);
    ((var_v, var_e), (6, 6))
}

fn reduce_3b2(inst: &Cnf3B2, variant: Variant) -> Reduction {
    let (w_forcers, v_forcers): (Vec<ForcerKind>, Vec<ForcerKind>) = match variant {
        Variant::K1 => (vec![ForcerKind::Long1], vec![ForcerKind::Short1]),
        Variant::InfK(k) => (
            vec![ForcerKind::LongInf { k }],
            vec![ForcerKind::Short { k: k + 1, l: k }, ForcerKind::PathForcer { k }],
        ),
        Variant::Kl(..) => unreachable!(),
    };
    let mut b = Builder::default();
    let mut stubs = Vec::new();
    let mut vars = Vec::new();
    for x in 1..=inst.num_vars {
        let u: Vec<VertexId> = (1..=4).map(|i| b.named(format!("x{x}.u{i}"))).collect();
        let w: Vec<VertexId> = (1..=2).map(|i| b.named(format!("x{x}.w{i}"))).collect();
        let v: Vec<VertexId> = (1..=4).map(|i| b.named(format!("x{x}.v{i}"))).collect();
        let u12 = b.edge(u[0], u[1], None);
        let c1 = b.edge(u[1], w[0], None);
        let c2 = b.edge(w[0], u[2], None);
        let u34 = b.edge(u[2], u[3], None);
        let c3 = b.edge(u[3], w[1], None);
        let c4 = b.edge(w[1], u[0], None);
        let uv = [0, 1, 2, 3].map(|i| b.edge(u[i], v[i], None));
        for &wv in &w {
            for &f in &w_forcers {
                b.forcer(f, Some(wv), false);
            }
        }
        for &vv in &v {
            for &f in &v_forcers {
                b.forcer(f, Some(vv), false);
            }
        }
        stubs.push(v);
        vars.push(VarLayout { u12, u34, cycle_rest: [c1, c2, c3, c4], uv, wire: [0; 4] });
    }
    let mut clauses = Vec::new();
    let mut used = vec![[0usize; 2]; inst.num_vars];
    for (ci, c) in inst.clauses.iter().enumerate() {
        let a: Vec<VertexId> = (1..=3).map(|i| b.named(format!("C{}.a{i}", ci + 1))).collect();
        let bb: Vec<VertexId> = (1..=3).map(|i| b.named(format!("C{}.b{i}", ci + 1))).collect();
        let ab = [0, 1, 2].map(|i| b.edge(a[i], bb[i], None));
        let ba = [0, 1, 2].map(|i| b.edge(bb[i], a[(i + 1) % 3], None));
        let mut wire = [0; 3];
        for (j, &(x, s)) in c.iter().enumerate() {
            // positive occurrences use stubs 1,2 and negative ones 3,4
            let slot = if s { used[x][1] } else { 2 + used[x][0] };
            used[x][s as usize] += 1;
            let e = b.edge(stubs[x][slot], a[j], None);
            wire[j] = e;
            vars[x].wire[slot] = e;
        }
        clauses.push(ClauseLayout { ab, ba, wire });
    }
    let ((vv, ve), (cv, ce)) = reduction_3b2_sizes(variant);
    let n = inst.num_vars;
    let m = inst.clauses.len();
    assert_eq!(b.g.vertex_count(), vv * n + cv * m);
    assert_eq!(b.g.edge_count(), ve * n + ce * m);
    Reduction {
        g: b.g,
        roles: b.roles,
        variant,
        formula: Cnf::ThreeB2(inst.clone()),
        pattern: b.pattern,
        layout: Layout::ThreeB2 { vars, clauses },
    }
}

/// Reduction to `(9,1)`-decomposition.
pub fn reduce_3b2_to_k1(inst: &Cnf3B2) -> Reduction {
    reduce_3b2(inst, Variant::K1)
}

/// Reduction to `(∞,k)`-decomposition, `k ≥ 2`.
pub fn reduce_3b2_to_infk(inst: &Cnf3B2, k: usize) -> Result<Reduction, GadgetError> {
    if k < 2 {
        return Err(GadgetError::BadParams(format!("(inf,k) reduction needs k >= 2, got {k}")));
    }
    Ok(reduce_3b2(inst, Variant::InfK(k)))
}

/// Reduction to `(k,ℓ)`-decomposition, `k ≥ ℓ ≥ 2`: one attachment gadget
/// per variable and one degree-3 vertex per clause.
pub fn reduce_nae_to_kl(inst: &CnfMnae, k: usize, l: usize) -> Result<Reduction, GadgetError> {
    if l < 2 || k < l {
        return Err(GadgetError::BadParams(format!("(k,l) reduction needs k >= l >= 2, got ({k},{l})")));
    }
    let occ = inst.occurrences();
    if let Some(x) = occ.iter().position(|&o| o < 2) {
        return Err(GadgetError::BadFormula(format!(
            "variable {} occurs {} time(s); every variable needs at least 2 occurrences",
            x + 1,
            occ[x]
        )));
    }
    let mut b = Builder::default();
    let gadgets: Vec<AlphaLayout> =
        (0..inst.num_vars).map(|x| add_alpha(&mut b, occ[x], k, l, &format!("x{}.", x + 1))).collect();
    let mut next = vec![0usize; inst.num_vars];
    let mut leaving = vec![Vec::new(); inst.num_vars];
    for (ci, c) in inst.clauses.iter().enumerate() {
        let vc = b.named(format!("C{}.v", ci + 1));
        for &x in c {
            let e = b.edge(gadgets[x].a[next[x]], vc, None);
            next[x] += 1;
            leaving[x].push(e);
        }
    }
    let (v, e) = occ.iter().fold((0, 0), |(v, e), &a| {
        let (gv, ge) = alpha_gadget_size(a, k, l);
        (v + gv, e + ge)
    });
    assert_eq!(b.g.vertex_count(), v + inst.clauses.len());
    assert_eq!(b.g.edge_count(), e + 3 * inst.clauses.len());
    Ok(Reduction {
        g: b.g,
        roles: b.roles,
        variant: Variant::Kl(k, l),
        formula: Cnf::Mnae(inst.clone()),
        pattern: b.pattern,
        layout: Layout::Nae { gadgets, leaving },
    })
}

/// Builds the decomposition of the reduction graph that corresponds to a
/// satisfying assignment.
pub fn witness_from_assignment(red: &Reduction, phi: &[bool]) -> Result<EdgeLabeling, GadgetError> {
    red.formula.satisfies(phi)?;
    let mut lab = EdgeLabeling::uniform(red.g.edge_count(), Part::A);
    for (e, p) in red.pattern.iter().enumerate() {
        if let Some(p) = *p {
            lab.set(e, p);
        }
    }
    match &red.layout {
        Layout::ThreeB2 { vars, clauses } => {
            for (x, var) in vars.iter().enumerate() {
                for &e in &var.cycle_rest {
                    lab.set(e, Part::A);
                }
                // the stubs of true literals carry their wiring edge in A
                let (b_cycle, b_stubs) = if phi[x] { (var.u34, [0, 1]) } else { (var.u12, [2, 3]) };
                lab.set(if phi[x] { var.u12 } else { var.u34 }, Part::A);
                lab.set(b_cycle, Part::B);
                for i in 0..4 {
                    let in_b = b_stubs.contains(&i);
                    lab.set(var.uv[i], if in_b { Part::B } else { Part::A });
                    lab.set(var.wire[i], if in_b { Part::A } else { Part::B });
                }
            }
            for c in clauses {
                let in_b: Vec<usize> = (0..3).filter(|&j| lab.get(c.wire[j]) == Part::B).collect();
                let mut b_edges = Vec::new();
                match in_b.len() {
                    0 => b_edges.extend(c.ab),
                    1 => {
                        let i = in_b[0];
                        b_edges.push(c.ba[i]);
                        b_edges.push(c.ab[(i + 2) % 3]);
                    }
                    2 => {
                        let m = (0..3).find(|j| !in_b.contains(j)).unwrap();
                        b_edges.push(c.ba[(m + 2) % 3]);
                    }
                    _ => unreachable!("satisfied clause has a true literal"),
                }
                for e in c.ab.iter().chain(&c.ba) {
                    lab.set(*e, if b_edges.contains(e) { Part::B } else { Part::A });
                }
            }
        }
        Layout::Nae { gadgets, leaving } => {
            for (x, lay) in gadgets.iter().enumerate() {
                let cover = if phi[x] { Cover::K } else { Cover::L };
                lay.label(&red.pattern, cover, &mut lab);
                let out = if phi[x] { Part::B } else { Part::A };
                for &e in &leaving[x] {
                    lab.set(e, out);
                }
            }
        }
    }
    Ok(lab)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::verify;

    fn three_var_instance() -> Cnf3B2 {
        let (x, y, z) = (0, 1, 2);
        Cnf3B2::new(
            3,
            vec![
                [(x, false), (y, false), (z, false)],
                [(x, true), (y, false), (z, false)],
                [(x, false), (y, true), (z, true)],
                [(x, true), (y, true), (z, true)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn forcer_sizes() {
        let s = build_forcer(ForcerKind::Short { k: 10, l: 3 }).unwrap();
        assert_eq!(s.g.vertex_count(), 11);
        assert_eq!(s.g.edge_count(), 17);
        assert_eq!(short_singles(10, 3), vec![9, 5, 1]);
        let l1 = build_forcer(ForcerKind::Long1).unwrap();
        assert_eq!((l1.g.vertex_count(), l1.g.edge_count()), (6, 7));
        let sym = build_forcer(ForcerKind::Symmetric { k: 3 }).unwrap();
        assert_eq!((sym.g.vertex_count(), sym.g.edge_count()), (4, 5));
        assert_eq!(sym.g.deg(sym.tip.unwrap()), 1);
        assert!(build_forcer(ForcerKind::Short { k: 2, l: 2 }).is_err());
        assert!(build_forcer(ForcerKind::PathForcer { k: 1 }).is_err());
    }

    #[test]
    fn forcer_patterns_verify() {
        for kind in [
            ForcerKind::Long1,
            ForcerKind::Short1,
            ForcerKind::Short { k: 7, l: 2 },
            ForcerKind::Long { k: 4, l: 2 },
            ForcerKind::Symmetric { k: 4 },
            ForcerKind::LongInf { k: 3 },
            ForcerKind::PathForcer { k: 4 },
        ] {
            let out = build_forcer(kind).unwrap();
            verify(&out.g, &out.pattern().unwrap(), &kind.default_bounds()).unwrap();
        }
    }

    #[test]
    fn small_forcer_properties() {
        let rep = check_forcer_property(ForcerKind::Long1, &BoundSpec::finite(4, 1)).unwrap();
        assert!(rep.passed(), "{rep}");
        assert_eq!(rep.count, 1);
        let rep = check_forcer_property(ForcerKind::Symmetric { k: 3 }, &BoundSpec::finite(3, 3)).unwrap();
        assert!(rep.passed(), "{rep}");
        assert_eq!(rep.count, 2);
        let rep = check_forcer_property(ForcerKind::Short { k: 5, l: 3 }, &BoundSpec::finite(5, 3)).unwrap();
        assert!(rep.passed(), "{rep}");
    }

    #[test]
    fn dimacs_round_trip_and_validation() {
        let f = Cnf::ThreeB2(three_var_instance());
        assert_eq!(Cnf::parse_dimacs(&f.to_dimacs()).unwrap(), f);
        let m = Cnf::Mnae(CnfMnae::new(2, vec![[0, 0, 1], [1, 1, 0]]).unwrap());
        assert_eq!(Cnf::parse_dimacs(&m.to_dimacs()).unwrap(), m);
        assert!(Cnf3B2::new(1, vec![]).is_err());
        assert!(Cnf::parse_dimacs("p cnf 1 1\n1 1 1 0\n").is_err());
        assert!(Cnf::parse_dimacs("c flavor mnae\np cnf 2 1\n1 -2 1 0\n").is_err());
    }

    #[test]
    fn brute_sat_examples() {
        let all_same = Cnf::Mnae(CnfMnae::new(1, vec![[0, 0, 0]]).unwrap());
        assert_eq!(brute_sat(&all_same).unwrap(), None);
        let phi = brute_sat(&Cnf::ThreeB2(three_var_instance())).unwrap().unwrap();
        three_var_instance().satisfies(&phi).unwrap();
    }

    #[test]
    fn three_variable_reduction_shape() {
        let inst = three_var_instance();
        let red = reduce_3b2_to_k1(&inst);
        assert_eq!(red.g.vertex_count(), 3 * 44 + 4 * 6);
        for x in 1..=3 {
            for i in 1..=4 {
                assert_eq!(red.g.deg(red.role(&format!("x{x}.v{i}")).unwrap()), 3);
            }
        }
        // C4 = {x,y,z} uses the first positive stubs of its variables only
        // after C2 took x's first one
        let a1 = red.role("C4.a1").unwrap();
        let v2 = red.role("x1.v2").unwrap();
        assert_eq!(red.g.edges_between(a1, v2).len(), 1);
        let phi = [true, false, true];
        let lab = witness_from_assignment(&red, &phi).unwrap();
        verify(&red.g, &lab, &red.bounds()).unwrap();
        assert!(witness_from_assignment(&red, &[false, false, false]).is_err());
    }

    #[test]
    fn infk_witnesses_verify() {
        let inst = three_var_instance();
        for k in 2..=4 {
            let red = reduce_3b2_to_infk(&inst, k).unwrap();
            for phi in all_sat(&red.formula).unwrap() {
                let lab = witness_from_assignment(&red, &phi).unwrap();
                verify(&red.g, &lab, &red.bounds()).unwrap();
            }
        }
    }

    #[test]
    fn nae_reduction_shape_and_witness() {
        let inst = CnfMnae::new(4, vec![[0, 1, 2], [0, 2, 3], [1, 3, 0]]).unwrap();
        assert!(reduce_nae_to_kl(&CnfMnae::new(2, vec![[0, 1, 1]]).unwrap(), 2, 2).is_err());
        for (k, l) in [(2, 2), (3, 2), (3, 3), (5, 3)] {
            let red = reduce_nae_to_kl(&inst, k, l).unwrap();
            for c in 1..=3 {
                assert_eq!(red.g.deg(red.role(&format!("C{c}.v")).unwrap()), 3);
            }
            for phi in all_sat(&red.formula).unwrap() {
                let lab = witness_from_assignment(&red, &phi).unwrap();
                verify(&red.g, &lab, &red.bounds()).unwrap_or_else(|v| panic!("({k},{l}) {phi:?}: {v}"));
            }
        }
    }

    #[test]
    fn alpha_gadget_both_covers_verify() {
        for (alpha, k, l) in [(3, 5, 3), (3, 4, 4), (2, 2, 2), (2, 3, 2)] {
            let out = build_alpha_gadget(alpha, k, l).unwrap();
            assert_eq!(out.attach.len(), alpha);
            assert!(out.attach.iter().all(|&a| out.g.deg(a) == 1));
            let b = BoundSpec::finite(k, l);
            for cover in [Cover::K, Cover::L] {
                let lab = alpha_gadget_labeling(alpha, k, l, cover).unwrap();
                verify(&out.g, &lab, &b).unwrap();
            }
        }
        let out = build_alpha_gadget(3, 5, 3).unwrap();
        assert_eq!(out.roles.len(), 12);
    }
}
