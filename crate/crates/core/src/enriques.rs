//! Enriques trees and diagrams.
//!
//! A tree stores a parent link and an edge kind per non-root vertex. Free
//! points are the root and the targets of slant edges; horizontal and
//! vertical edges end at satellite points. A satellite `β` is proximate to
//! its parent and to `parent(u)`, where `u` is the highest vertex reached from
//! `parent(β)` by climbing edges of the same kind as the edge into `β`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cluster::{Cluster, ClusterPoint, WeightedCluster};
use crate::error::{Error, Result};
use crate::euclid::euclid_data;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeKind {
    #[serde(rename = "s")]
    Slant,
    #[serde(rename = "h")]
    Horizontal,
    #[serde(rename = "v")]
    Vertical,
}

impl EdgeKind {
    pub fn opposite(self) -> Self {
        match self {
            EdgeKind::Slant => EdgeKind::Slant,
            EdgeKind::Horizontal => EdgeKind::Vertical,
            EdgeKind::Vertical => EdgeKind::Horizontal,
        }
    }

    pub fn letter(self) -> char {
        match self {
            EdgeKind::Slant => 's',
            EdgeKind::Horizontal => 'h',
            EdgeKind::Vertical => 'v',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Node {
    pub parent: Option<usize>,
    pub edge: Option<EdgeKind>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EnriquesTree {
    nodes: Vec<Node>,
}

impl EnriquesTree {
    pub fn new(nodes: Vec<Node>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidTree("a tree has at least the root".into()));
        }
        for (i, n) in nodes.iter().enumerate() {
            let bad = |msg: &str| Err(Error::InvalidTree(format!("vertex {}: {msg}", i + 1)));
            match (i, n.parent, n.edge) {
                (0, None, None) => {}
                (0, _, _) => return bad("the root has no parent and no incoming edge"),
                (_, Some(p), Some(_)) if p < i => {}
                (_, None, _) => return bad("only vertex 1 is a root"),
                (_, Some(_), None) => return bad("missing edge kind"),
                _ => return bad("parent must precede the vertex"),
            }
        }
        let tree = Self { nodes };
        for i in 0..tree.len() {
            let kinds: Vec<EdgeKind> = tree.children(i).map(|c| tree.edge(c).unwrap()).collect();
            let h = kinds.iter().filter(|&&k| k == EdgeKind::Horizontal).count();
            let v = kinds.iter().filter(|&&k| k == EdgeKind::Vertical).count();
            let bad = |msg: &str| Err(Error::InvalidTree(format!("vertex {}: {msg}", i + 1)));
            if i == 0 && h + v > 0 {
                return bad("edges out of the root are slant");
            }
            if tree.is_free(i) && h + v > 1 {
                return bad("a free point has at most one satellite successor");
            }
            if h > 1 || v > 1 {
                return bad("two satellite successors of the same kind");
            }
        }
        Ok(tree)
    }

    pub fn single() -> Self {
        Self { nodes: vec![Node { parent: None, edge: None }] }
    }

    /// A path with the given edge kinds.
    pub fn chain(kinds: &[EdgeKind]) -> Result<Self> {
        let mut nodes = vec![Node { parent: None, edge: None }];
        for (i, &k) in kinds.iter().enumerate() {
            nodes.push(Node { parent: Some(i), edge: Some(k) });
        }
        Self::new(nodes)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.nodes[i].parent
    }

    pub fn edge(&self, i: usize) -> Option<EdgeKind> {
        self.nodes[i].edge
    }

    pub fn edges(&self) -> Vec<EdgeKind> {
        self.nodes[1..].iter().map(|n| n.edge.expect("non-root")).collect()
    }

    pub fn children(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (i + 1..self.len()).filter(move |&j| self.nodes[j].parent == Some(i))
    }

    pub fn outdegree(&self, i: usize) -> usize {
        self.children(i).count()
    }

    pub fn is_free(&self, i: usize) -> bool {
        matches!(self.nodes[i].edge, None | Some(EdgeKind::Slant))
    }

    pub fn is_unibranch(&self) -> bool {
        (0..self.len()).all(|i| self.outdegree(i) <= 1)
    }

    pub fn last(&self) -> usize {
        self.len() - 1
    }

    /// Whether `a` lies on the path from the root to `i` (inclusive).
    pub fn is_ancestor(&self, a: usize, mut i: usize) -> bool {
        loop {
            if i == a {
                return true;
            }
            match self.nodes[i].parent {
                Some(p) => i = p,
                None => return false,
            }
        }
    }

    /// The point other than the parent that a satellite is proximate to.
    pub fn second_proximate(&self, b: usize) -> Option<usize> {
        let kind = self.nodes[b].edge?;
        if kind == EdgeKind::Slant {
            return None;
        }
        let mut u = self.nodes[b].parent?;
        while self.nodes[u].edge == Some(kind) {
            u = self.nodes[u].parent?;
        }
        self.nodes[u].parent
    }

    pub fn to_cluster(&self) -> Cluster {
        let points = (0..self.len())
            .map(|i| {
                let parent = self.nodes[i].parent;
                let mut prox: Vec<usize> = parent.into_iter().collect();
                prox.extend(self.second_proximate(i));
                ClusterPoint { parent, prox }
            })
            .collect();
        Cluster::new(points).expect("a valid tree gives a valid cluster")
    }

    pub fn from_cluster(c: &Cluster) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::InvalidCluster("empty cluster has no tree".into()));
        }
        let mut nodes: Vec<Node> = Vec::with_capacity(c.len());
        let mut second: Vec<Option<usize>> = Vec::with_capacity(c.len());
        for (i, p) in c.points().iter().enumerate() {
            let other = p.prox.iter().copied().find(|&t| Some(t) != p.parent);
            let edge = match (p.parent, other) {
                (None, _) => None,
                (Some(_), None) => Some(EdgeKind::Slant),
                (Some(par), Some(t)) => Some(match nodes[par].edge {
                    None | Some(EdgeKind::Slant) => EdgeKind::Horizontal,
                    Some(k) if second[par] == Some(t) => k,
                    Some(k) => k.opposite(),
                }),
            };
            nodes.push(Node { parent: p.parent, edge });
            second.push(other);
            debug_assert_eq!(nodes.len(), i + 1);
        }
        let tree = Self::new(nodes).map_err(|e| Error::InvalidCluster(e.to_string()))?;
        if tree.to_cluster() != *c {
            return Err(Error::InvalidCluster("proximities are not realized by L-shaped branches".into()));
        }
        Ok(tree)
    }

    pub fn classify(&self) -> Classification {
        let r = self.len();
        let free: Vec<bool> = (0..r).map(|i| self.is_free(i)).collect();
        let mut witnesses = Vec::new();
        let mut non_degenerate = true;
        for i in 0..r {
            if !free[i] {
                continue;
            }
            let mut u = i;
            while let Some(p) = self.nodes[u].parent {
                if !free[p] {
                    non_degenerate = false;
                    witnesses.push(Witness {
                        vertex: i + 1,
                        reason: format!("free point with satellite P{} on its root path", p + 1),
                    });
                    break;
                }
                u = p;
            }
        }
        let mut binary = non_degenerate;
        for i in 0..r {
            if self.outdegree(i) > 2 {
                binary = false;
                witnesses.push(Witness { vertex: i + 1, reason: "outdegree above 2".into() });
            }
            if i > 0 && self.children(i).filter(|&c| free[c]).count() > 1 {
                binary = false;
                witnesses.push(Witness { vertex: i + 1, reason: "two proximate free points".into() });
            }
        }
        Classification { free, non_degenerate, binary, unibranch: self.is_unibranch(), witnesses }
    }

    /// Glues the root of `other` onto the last vertex of `self`.
    pub fn connected_sum(&self, other: &EnriquesTree) -> Result<EnriquesTree> {
        if !self.is_unibranch() || !other.is_unibranch() {
            return Err(Error::Precondition("connected sum needs unibranch trees".into()));
        }
        let offset = self.len() - 1;
        let mut nodes = self.nodes.clone();
        for n in &other.nodes[1..] {
            nodes.push(Node { parent: n.parent.map(|p| p + offset), edge: n.edge });
        }
        Self::new(nodes)
    }

    /// Swaps horizontal and vertical edges in the subtree below and including `i`.
    pub fn mirror_subtree(&self, i: usize) -> Result<EnriquesTree> {
        let mut nodes = self.nodes.clone();
        for j in i..self.len() {
            if self.is_ancestor(i, j) {
                nodes[j].edge = nodes[j].edge.map(EdgeKind::opposite);
            }
        }
        Self::new(nodes)
    }

    /// Renumbers the vertices so that parents precede children, preorder,
    /// children visited in the order returned by `order`.
    pub fn reorder(&self, mut order: impl FnMut(&EnriquesTree, usize) -> Vec<usize>) -> (EnriquesTree, Vec<usize>) {
        let mut seq = Vec::with_capacity(self.len());
        let mut stack = vec![0usize];
        while let Some(u) = stack.pop() {
            seq.push(u);
            let mut kids = order(self, u);
            kids.reverse();
            stack.extend(kids);
        }
        let mut pos = vec![0; self.len()];
        for (k, &u) in seq.iter().enumerate() {
            pos[u] = k;
        }
        let nodes = seq
            .iter()
            .map(|&u| Node { parent: self.nodes[u].parent.map(|p| pos[p]), edge: self.nodes[u].edge })
            .collect();
        (EnriquesTree { nodes }, seq)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// 1-based vertex.
    pub vertex: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub free: Vec<bool>,
    pub non_degenerate: bool,
    pub binary: bool,
    pub unibranch: bool,
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EnriquesDiagram {
    pub tree: EnriquesTree,
    pub weights: Vec<i64>,
}

impl EnriquesDiagram {
    pub fn new(tree: EnriquesTree, weights: Vec<i64>) -> Result<Self> {
        if weights.len() != tree.len() {
            return Err(Error::InvalidTree(format!("{} weights for {} vertices", weights.len(), tree.len())));
        }
        if let Some(i) = weights.iter().position(|&w| w < 0) {
            return Err(Error::InvalidTree(format!("negative weight at vertex {}", i + 1)));
        }
        Ok(Self { tree, weights })
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    pub fn to_weighted_cluster(&self) -> WeightedCluster {
        WeightedCluster { cluster: self.tree.to_cluster(), weights: self.weights.clone() }
    }

    pub fn from_weighted_cluster(k: &WeightedCluster) -> Result<Self> {
        Self::new(EnriquesTree::from_cluster(&k.cluster)?, k.weights.clone())
    }

    pub fn is_unloaded(&self) -> bool {
        self.to_weighted_cluster().is_unloaded()
    }

    pub fn scaled(&self, d: i64) -> Result<Self> {
        let weights = self
            .weights
            .iter()
            .map(|&w| w.checked_mul(d).ok_or(Error::Overflow("diagram weights")))
            .collect::<Result<_>>()?;
        Self::new(self.tree.clone(), weights)
    }

    /// Unloaded diagram of `T_{p,q}`: a path whose weights are the Euclidean remainders.
    pub fn t_pq(p: i64, q: i64) -> Result<Self> {
        let data = euclid_data(p, q)?;
        let mut kinds = Vec::new();
        let mut weights = Vec::new();
        for (j, (&a, &r)) in data.a.iter().zip(&data.r).enumerate() {
            for _ in 0..a {
                weights.push(r);
                kinds.push(match j {
                    0 => EdgeKind::Slant,
                    j if j % 2 == 1 => EdgeKind::Horizontal,
                    _ => EdgeKind::Vertical,
                });
            }
        }
        kinds.pop();
        Self::new(EnriquesTree::chain(&kinds)?, weights)
    }

    /// Glues the two trees along their largest common subtree; weights add
    /// on the shared vertices.
    pub fn union(&self, other: &EnriquesDiagram) -> Result<EnriquesDiagram> {
        for d in [self, other] {
            if d.tree.outdegree(0) > 1 {
                return Err(Error::Precondition("union needs trees whose root has degree at most 1".into()));
            }
            for i in 0..d.len() {
                let mut kinds: Vec<EdgeKind> = d.tree.children(i).map(|c| d.tree.edge(c).unwrap()).collect();
                let n = kinds.len();
                kinds.sort();
                kinds.dedup();
                if kinds.len() != n {
                    return Err(Error::Precondition(format!(
                        "vertex {} has two successors of the same kind",
                        i + 1
                    )));
                }
            }
        }
        let mut nodes = self.tree.nodes.clone();
        let mut weights = self.weights.clone();
        // map[j] = vertex of the result matching vertex j of `other`
        let mut map = vec![usize::MAX; other.len()];
        map[0] = 0;
        weights[0] += other.weights[0];
        for j in 1..other.len() {
            let p = map[other.tree.parent(j).unwrap()];
            let kind = other.tree.edge(j);
            let existing = (p + 1..nodes.len()).find(|&c| nodes[c].parent == Some(p) && nodes[c].edge == kind);
            match existing {
                Some(c) => {
                    map[j] = c;
                    weights[c] += other.weights[j];
                }
                None => {
                    map[j] = nodes.len();
                    nodes.push(Node { parent: Some(p), edge: kind });
                    weights.push(other.weights[j]);
                }
            }
        }
        Self::new(EnriquesTree::new(nodes)?, weights)
    }

    /// The subdiagram on an ancestor-closed vertex set, numbered in the old
    /// order; also returns the old index of each new vertex.
    pub fn restrict(&self, keep: &[bool]) -> Result<(EnriquesDiagram, Vec<usize>)> {
        let kept: Vec<usize> = (0..self.len()).filter(|&i| keep[i]).collect();
        let mut map = vec![usize::MAX; self.len()];
        for (k, &i) in kept.iter().enumerate() {
            map[i] = k;
        }
        let mut nodes = Vec::with_capacity(kept.len());
        for &i in &kept {
            let parent = match self.tree.parent(i) {
                Some(p) if !keep[p] => {
                    return Err(Error::InvalidTree(format!("vertex {} kept without its parent", i + 1)))
                }
                p => p.map(|p| map[p]),
            };
            nodes.push(Node { parent, edge: self.tree.edge(i) });
        }
        let weights = kept.iter().map(|&i| self.weights[i]).collect();
        Ok((Self::new(EnriquesTree::new(nodes)?, weights)?, kept))
    }

    pub fn prune_last(&self) -> Result<EnriquesDiagram> {
        if !self.tree.is_unibranch() {
            return Err(Error::Precondition("prune_last needs a unibranch tree".into()));
        }
        if self.len() < 2 {
            return Err(Error::Precondition("cannot prune a single vertex".into()));
        }
        // in a path the last vertex is the leaf only if numbering follows the path
        let r = self.len() - 1;
        if self.tree.outdegree(r) != 0 {
            return Err(Error::Precondition("vertices must be numbered along the path".into()));
        }
        Self::new(EnriquesTree::new(self.tree.nodes[..r].to_vec())?, self.weights[..r].to_vec())
    }

    pub fn to_json(&self) -> DiagramJson {
        DiagramJson {
            vertices: (0..self.len())
                .map(|i| VertexJson {
                    id: i + 1,
                    parent: self.tree.parent(i).map(|p| p + 1),
                    edge: self.tree.edge(i),
                    weight: self.weights[i],
                })
                .collect(),
        }
    }

    /// Graphviz source; positions place slant, horizontal and vertical edges
    /// at 45°, 0° and 90° (render with `neato -n`).
    pub fn to_dot(&self) -> String {
        let mut pos = vec![(0i64, 0i64); self.len()];
        let mut used = std::collections::HashSet::new();
        used.insert((0, 0));
        for i in 1..self.len() {
            let (px, py) = pos[self.tree.parent(i).unwrap()];
            let (dx, dy) = match self.tree.edge(i).unwrap() {
                EdgeKind::Slant => (1, 1),
                EdgeKind::Horizontal => (1, 0),
                EdgeKind::Vertical => (0, 1),
            };
            let mut k = 1;
            let mut at = (px + dx, py + dy);
            while used.contains(&at) {
                k += 1;
                at = (px + k * dx, py + k * dy + (k - 1) * (1 - dy));
            }
            used.insert(at);
            pos[i] = at;
        }
        let mut out = String::from("digraph enriques {\n  node [shape=circle, width=0.3, fixedsize=true];\n");
        for i in 0..self.len() {
            let (x, y) = pos[i];
            let _ = writeln!(
                out,
                "  p{} [label=\"{}\", xlabel=\"P{}\", pos=\"{},{}!\"];",
                i + 1,
                self.weights[i],
                i + 1,
                x * 72,
                y * 72
            );
        }
        for i in 1..self.len() {
            let style = match self.tree.edge(i).unwrap() {
                EdgeKind::Slant => "dashed",
                EdgeKind::Horizontal | EdgeKind::Vertical => "solid",
            };
            let _ = writeln!(out, "  p{} -> p{} [style={style}];", self.tree.parent(i).unwrap() + 1, i + 1);
        }
        out.push_str("}\n");
        out
    }
}

/// JSON form: `{"vertices":[{"id":1,"parent":null,"edge":null,"weight":5},…]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub vertices: Vec<VertexJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: usize,
    pub parent: Option<usize>,
    pub edge: Option<EdgeKind>,
    pub weight: i64,
}

impl DiagramJson {
    pub fn to_diagram(&self) -> Result<EnriquesDiagram> {
        let mut nodes = Vec::with_capacity(self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            if v.id != i + 1 {
                return Err(Error::InvalidTree(format!("ids must be 1, 2, … in order; found {}", v.id)));
            }
            let parent = match v.parent {
                Some(0) => return Err(Error::InvalidTree("ids are 1-based".into())),
                p => p.map(|p| p - 1),
            };
            nodes.push(Node { parent, edge: v.edge });
        }
        EnriquesDiagram::new(EnriquesTree::new(nodes)?, self.vertices.iter().map(|v| v.weight).collect())
    }
}
