//! Even Artin graphs of FC-type and their structural decompositions.
//!
//! An Artin graph is a finite simplicial graph with even edge labels
//! `>= 2`.  The FC condition is enforced through the triangle criterion:
//! in every triangle at least two of the three labels equal two.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A generator name. Total order by name drives every canonical choice
/// (split vertices, dihedral conventions, tie breaking).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(Arc<str>);

impl VertexId {
    /// Names must be nonempty, without whitespace, `^` or `,`, and must
    /// not be the token `1` (reserved for the empty word).
    pub fn new(name: &str) -> Result<Self> {
        if name.is_empty()
            || name == "1"
            || name
                .chars()
                .any(|c| c.is_whitespace() || c == '^' || c == ',')
        {
            return Err(Error::BadVertexName(name.to_string()));
        }
        Ok(VertexId(name.into()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// `u.n`, the indexed vertex name used by kernel graphs.
    pub(crate) fn indexed(&self, index: i64) -> VertexId {
        VertexId(format!("{}.{}", self.0, index).into())
    }

    /// Splits `u.n` back into the type name and the index.
    pub(crate) fn split_index(&self) -> Option<(VertexId, i64)> {
        let (head, tail) = self.0.rsplit_once('.')?;
        let index: i64 = tail.parse().ok()?;
        Some((VertexId(head.into()), index))
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A sorted subset of the vertices of some graph.
pub type VertexSet = BTreeSet<VertexId>;

fn edge_key(u: &VertexId, v: &VertexId) -> (VertexId, VertexId) {
    if u <= v {
        (u.clone(), v.clone())
    } else {
        (v.clone(), u.clone())
    }
}

/// Unvalidated graph data, as read from a file or assembled by hand.
#[derive(Default, Clone, Debug)]
pub struct RawGraph {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<(VertexId, VertexId, i64)>,
}

impl RawGraph {
    pub fn vertex(&mut self, name: &str) -> Result<&mut Self> {
        self.vertices.push(VertexId::new(name)?);
        Ok(self)
    }

    pub fn edge(&mut self, u: &str, v: &str, label: i64) -> Result<&mut Self> {
        self.edges
            .push((VertexId::new(u)?, VertexId::new(v)?, label));
        Ok(self)
    }
}

/// One violation found while validating a raw graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    OddLabel {
        u: VertexId,
        v: VertexId,
        label: i64,
    },
    LabelTooSmall {
        u: VertexId,
        v: VertexId,
        label: i64,
    },
    FcViolation {
        triangle: [VertexId; 3],
        labels: [i64; 3],
    },
    DuplicateEdge {
        u: VertexId,
        v: VertexId,
    },
    SelfLoop {
        v: VertexId,
    },
    DuplicateVertex {
        v: VertexId,
    },
    UnknownVertex {
        v: VertexId,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OddLabel { u, v, label } => {
                write!(f, "edge {u}-{v} has odd label {label}")
            }
            Violation::LabelTooSmall { u, v, label } => {
                write!(f, "edge {u}-{v} has label {label} < 2")
            }
            Violation::FcViolation { triangle, labels } => write!(
                f,
                "triangle {}-{}-{} with labels ({},{},{}) has fewer than two labels equal to 2",
                triangle[0], triangle[1], triangle[2], labels[0], labels[1], labels[2]
            ),
            Violation::DuplicateEdge { u, v } => write!(f, "duplicate edge {u}-{v}"),
            Violation::SelfLoop { v } => write!(f, "self-loop at {v}"),
            Violation::DuplicateVertex { v } => write!(f, "duplicate vertex {v}"),
            Violation::UnknownVertex { v } => write!(f, "edge endpoint {v} was never declared"),
        }
    }
}

/// Every violation found in one validation pass.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

struct GraphInner {
    vertices: VertexSet,
    edges: BTreeMap<(VertexId, VertexId), i64>,
    key: Arc<str>,
}

/// A validated even FC-type Artin graph. Immutable after construction;
/// clones share storage.
#[derive(Clone)]
pub struct ArtinGraph {
    inner: Arc<GraphInner>,
}

impl PartialEq for ArtinGraph {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.key == other.inner.key
    }
}

impl Eq for ArtinGraph {}

impl fmt::Debug for ArtinGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ArtinGraph({})", self.inner.key)
    }
}

impl fmt::Display for ArtinGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.inner.key)
    }
}

/// The pieces of the amalgam `G = G_X *_{G_Z} G_Y` at a split vertex.
#[derive(Debug, Clone)]
pub struct AmalgamSplit {
    pub vertex: VertexId,
    /// `star(vertex)`
    pub x_side: VertexSet,
    /// `V - {vertex}`
    pub y_side: VertexSet,
    /// `link(vertex)`
    pub amalgam: VertexSet,
}

/// Validates raw data into an [`ArtinGraph`], or reports every violation.
pub fn validate(raw: &RawGraph) -> std::result::Result<ArtinGraph, ValidationReport> {
    let mut violations = Vec::new();
    let mut vertices: VertexSet = BTreeSet::new();
    for v in &raw.vertices {
        if !vertices.insert(v.clone()) {
            violations.push(Violation::DuplicateVertex { v: v.clone() });
        }
    }
    let mut edges: BTreeMap<(VertexId, VertexId), i64> = BTreeMap::new();
    for (u, v, label) in &raw.edges {
        if u == v {
            violations.push(Violation::SelfLoop { v: v.clone() });
            continue;
        }
        for end in [u, v] {
            if !vertices.contains(end) {
                violations.push(Violation::UnknownVertex { v: end.clone() });
            }
        }
        let key = edge_key(u, v);
        if edges.contains_key(&key) {
            violations.push(Violation::DuplicateEdge {
                u: u.clone(),
                v: v.clone(),
            });
            continue;
        }
        if *label < 2 {
            violations.push(Violation::LabelTooSmall {
                u: u.clone(),
                v: v.clone(),
                label: *label,
            });
        } else if label % 2 != 0 {
            violations.push(Violation::OddLabel {
                u: u.clone(),
                v: v.clone(),
                label: *label,
            });
        }
        edges.insert(key, *label);
    }
    // FC triangle criterion: at least two of the three labels equal 2.
    let verts: Vec<&VertexId> = vertices.iter().collect();
    for i in 0..verts.len() {
        for j in i + 1..verts.len() {
            for l in j + 1..verts.len() {
                let e1 = edges.get(&edge_key(verts[i], verts[j]));
                let e2 = edges.get(&edge_key(verts[j], verts[l]));
                let e3 = edges.get(&edge_key(verts[l], verts[i]));
                if let (Some(&m1), Some(&m2), Some(&m3)) = (e1, e2, e3) {
                    let twos = [m1, m2, m3].iter().filter(|&&m| m == 2).count();
                    if twos < 2 {
                        violations.push(Violation::FcViolation {
                            triangle: [verts[i].clone(), verts[j].clone(), verts[l].clone()],
                            labels: [m1, m2, m3],
                        });
                    }
                }
            }
        }
    }
    if !violations.is_empty() {
        return Err(ValidationReport { violations });
    }
    Ok(ArtinGraph::from_parts(vertices, edges))
}

impl ArtinGraph {
    fn from_parts(vertices: VertexSet, edges: BTreeMap<(VertexId, VertexId), i64>) -> Self {
        let mut key = String::new();
        for v in &vertices {
            if !key.is_empty() {
                key.push(',');
            }
            key.push_str(v.as_str());
        }
        key.push('|');
        let mut first = true;
        for ((u, v), m) in &edges {
            if !first {
                key.push(';');
            }
            first = false;
            key.push_str(&format!("{u}-{v}:{m}"));
        }
        ArtinGraph {
            inner: Arc::new(GraphInner {
                vertices,
                edges,
                key: key.into(),
            }),
        }
    }

    /// Builds and validates a graph in one call, turning a report into an error.
    pub fn build(raw: &RawGraph) -> Result<Self> {
        validate(raw).map_err(|report| Error::InvalidGraph(report.to_string()))
    }

    /// Parses the line-oriented text format:
    /// `vertex <name>`, `edge <name> <name> <even-int>`, `#` comments.
    pub fn parse(text: &str) -> Result<Self> {
        Self::build(&Self::parse_raw(text)?)
    }

    pub fn parse_raw(text: &str) -> Result<RawGraph> {
        let mut raw = RawGraph::default();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match line.split_once('#') {
                Some((head, _)) => head,
                None => line,
            };
            let mut tokens = line.split_whitespace();
            let Some(head) = tokens.next() else { continue };
            let parse_err = |msg: &str| Error::Parse {
                line: line_no,
                msg: msg.to_string(),
            };
            match head {
                "vertex" => {
                    let name = tokens.next().ok_or_else(|| parse_err("missing vertex name"))?;
                    raw.vertices.push(VertexId::new(name)?);
                }
                "edge" => {
                    let u = tokens.next().ok_or_else(|| parse_err("missing first endpoint"))?;
                    let v = tokens.next().ok_or_else(|| parse_err("missing second endpoint"))?;
                    let label = tokens
                        .next()
                        .ok_or_else(|| parse_err("missing edge label"))?
                        .parse::<i64>()
                        .map_err(|_| parse_err("edge label is not an integer"))?;
                    raw.edges.push((VertexId::new(u)?, VertexId::new(v)?, label));
                }
                other => {
                    return Err(parse_err(&format!("unknown directive `{other}`")));
                }
            }
            if let Some(extra) = tokens.next() {
                return Err(parse_err(&format!("trailing garbage `{extra}`")));
            }
        }
        Ok(raw)
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.inner.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.inner.vertices.len()
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        self.inner.vertices.contains(v)
    }

    pub fn edges(&self) -> impl Iterator<Item = (&VertexId, &VertexId, i64)> {
        self.inner.edges.iter().map(|((u, v), m)| (u, v, *m))
    }

    pub fn label(&self, u: &VertexId, v: &VertexId) -> Option<i64> {
        self.inner.edges.get(&edge_key(u, v)).copied()
    }

    /// Stable fingerprint of the graph, usable as a cache key.
    pub fn key(&self) -> &Arc<str> {
        &self.inner.key
    }

    fn check_vertex(&self, v: &VertexId) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v.to_string()))
        }
    }

    fn check_subset(&self, s: &VertexSet) -> Result<()> {
        for v in s {
            self.check_vertex(v)?;
        }
        Ok(())
    }

    /// `{u : {v,u} in E}`
    pub fn link(&self, v: &VertexId) -> Result<VertexSet> {
        self.check_vertex(v)?;
        Ok(self
            .inner
            .vertices
            .iter()
            .filter(|u| self.label(u, v).is_some())
            .cloned()
            .collect())
    }

    /// `link(v) ∪ {v}`
    pub fn star(&self, v: &VertexId) -> Result<VertexSet> {
        let mut s = self.link(v)?;
        s.insert(v.clone());
        Ok(s)
    }

    /// The subgraph induced by `S`, itself a valid even FC graph.
    pub fn induced_subgraph(&self, s: &VertexSet) -> Result<ArtinGraph> {
        self.check_subset(s)?;
        if s == &self.inner.vertices {
            return Ok(self.clone());
        }
        let edges = self
            .inner
            .edges
            .iter()
            .filter(|((u, v), _)| s.contains(u) && s.contains(v))
            .map(|(k, m)| (k.clone(), *m))
            .collect();
        // evenness and FC are hereditary
        let g = ArtinGraph::from_parts(s.clone(), edges);
        debug_assert!(validate(&RawGraph {
            vertices: g.vertices().iter().cloned().collect(),
            edges: g.edges().map(|(u, v, m)| (u.clone(), v.clone(), m)).collect(),
        })
        .is_ok());
        Ok(g)
    }

    /// The finest partition of the vertices such that every cross pair is
    /// joined by an edge labeled 2, i.e. the direct factors of the group.
    pub fn direct_product_split(&self) -> Vec<VertexSet> {
        // union vertices that are NOT joined by a label-2 edge
        let verts: Vec<VertexId> = self.inner.vertices.iter().cloned().collect();
        let n = verts.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            if parent[i] != i {
                let r = find(parent, parent[i]);
                parent[i] = r;
            }
            parent[i]
        }
        for i in 0..n {
            for j in i + 1..n {
                if self.label(&verts[i], &verts[j]) != Some(2) {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    parent[ri] = rj;
                }
            }
        }
        let mut components: BTreeMap<usize, VertexSet> = BTreeMap::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            components.entry(r).or_default().insert(verts[i].clone());
        }
        let mut out: Vec<VertexSet> = components.into_values().collect();
        out.sort_by(|a, b| a.iter().next().cmp(&b.iter().next()));
        out
    }

    /// The amalgam `G = G_{st(x)} *_{G_{lk(x)}} G_{V-{x}}` at the least
    /// vertex whose star is not the whole vertex set, if any.
    pub fn amalgam_split(&self) -> Option<AmalgamSplit> {
        for v in &self.inner.vertices {
            let star = self.star(v).expect("vertex of the graph");
            if star != self.inner.vertices {
                let mut y = self.inner.vertices.clone();
                y.remove(v);
                let link = self.link(v).expect("vertex of the graph");
                return Some(AmalgamSplit {
                    vertex: v.clone(),
                    x_side: star,
                    y_side: y,
                    amalgam: link,
                });
            }
        }
        None
    }

    /// True when the graph spans an edge between every vertex pair.
    pub fn is_complete(&self) -> bool {
        let n = self.inner.vertices.len();
        self.inner.edges.len() == n * (n - 1) / 2
    }
}
