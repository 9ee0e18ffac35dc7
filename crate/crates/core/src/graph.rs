//! Undirected simple graphs with per-vertex metadata, and the three graph
//! operators used to build the families: subdivision `B`, line graph `L`
//! and the subdivided-line operator `Γ = L ∘ B`.
//!
//! Vertices are dense `0..n` indices. Neighbor lists are kept strictly
//! increasing, so edge iteration is canonical: `u` ascending, then `v`
//! ascending with `u < v`.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The three graph families this crate generates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Fractal,
    Nonfractal,
    Sierpinski,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Fractal, Family::Nonfractal, Family::Sierpinski];

    pub fn name(self) -> &'static str {
        match self {
            Family::Fractal => "fractal",
            Family::Nonfractal => "nonfractal",
            Family::Sierpinski => "sierpinski",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fractal" => Ok(Family::Fractal),
            "nonfractal" => Ok(Family::Nonfractal),
            "sierpinski" => Ok(Family::Sierpinski),
            other => Err(Error::Domain(format!("unknown family {other:?}"))),
        }
    }
}

/// Provenance of a graph. `Derived` marks anything produced by an operator
/// or a vertex deletion rather than by a family generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyTag {
    Fractal,
    Nonfractal,
    Sierpinski,
    Derived,
}

impl From<Family> for FamilyTag {
    fn from(f: Family) -> Self {
        match f {
            Family::Fractal => FamilyTag::Fractal,
            Family::Nonfractal => FamilyTag::Nonfractal,
            Family::Sierpinski => FamilyTag::Sierpinski,
        }
    }
}

/// Role of one of the four hub vertices of a fractal or non-fractal graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HubRole {
    V1,
    V2,
    V3,
    V4,
}

impl HubRole {
    pub const ALL: [HubRole; 4] = [HubRole::V1, HubRole::V2, HubRole::V3, HubRole::V4];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            HubRole::V1 => "v1",
            HubRole::V2 => "v2",
            HubRole::V3 => "v3",
            HubRole::V4 => "v4",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexMeta {
    /// Iteration at which the vertex was created (1 for the base graph).
    pub gen_iteration: u32,
    pub hub_role: Option<HubRole>,
}

impl Default for VertexMeta {
    fn default() -> Self {
        VertexMeta {
            gen_iteration: 1,
            hub_role: None,
        }
    }
}

/// Canonical undirected edge with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId {
    pub u: usize,
    pub v: usize,
}

impl EdgeId {
    /// Orders the endpoints. Panics on a self-loop.
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "self-loop {a}-{a} is not a simple edge");
        if a < b {
            EdgeId { u: a, v: b }
        } else {
            EdgeId { u: b, v: a }
        }
    }

    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    meta: Vec<VertexMeta>,
    family_tag: Option<FamilyTag>,
}

impl Graph {
    /// Builds a simple graph. Rejects self-loops, parallel edges and
    /// out-of-range endpoints.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adjacency = vec![Vec::new(); n];
        for (a, b) in edges {
            for x in [a, b] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { index: x, n });
                }
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for (v, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!(
                    "parallel edge incident to vertex {v}"
                )));
            }
        }
        Ok(Graph {
            adjacency,
            meta: vec![VertexMeta::default(); n],
            family_tag: None,
        })
    }

    pub fn empty(n: usize) -> Graph {
        Graph {
            adjacency: vec![Vec::new(); n],
            meta: vec![VertexMeta::default(); n],
            family_tag: None,
        }
    }

    pub fn complete(n: usize) -> Graph {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::from_edges(n, edges).expect("complete graph is simple")
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "a cycle needs at least three vertices");
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle is simple")
    }

    pub fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path is simple")
    }

    pub fn with_meta(mut self, meta: Vec<VertexMeta>) -> Graph {
        assert_eq!(meta.len(), self.n(), "metadata length must equal vertex count");
        self.meta = meta;
        self
    }

    pub fn with_family_tag(mut self, tag: FamilyTag) -> Graph {
        self.family_tag = Some(tag);
        self
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            let start = list.partition_point(|&x| x <= u);
            list[start..].iter().map(move |&v| EdgeId { u, v })
        })
    }

    /// Position of an edge in canonical order, if present.
    pub fn edge_index(&self, e: EdgeId) -> Option<usize> {
        if !self.has_edge(e.u, e.v) {
            return None;
        }
        let before: usize = self.adjacency[..e.u]
            .iter()
            .enumerate()
            .map(|(u, list)| list.len() - list.partition_point(|&x| x <= u))
            .sum();
        let list = &self.adjacency[e.u];
        let start = list.partition_point(|&x| x <= e.u);
        let pos = list.binary_search(&e.v).ok()?;
        Some(before + pos - start)
    }

    pub fn meta(&self, v: usize) -> &VertexMeta {
        &self.meta[v]
    }

    pub fn metas(&self) -> &[VertexMeta] {
        &self.meta
    }

    pub fn family_tag(&self) -> Option<FamilyTag> {
        self.family_tag
    }

    pub fn hub(&self, role: HubRole) -> Option<usize> {
        self.meta.iter().position(|m| m.hub_role == Some(role))
    }

    /// Sorted degree sequence (ascending).
    pub fn degree_multiset(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.adjacency.iter().map(Vec::len).collect();
        d.sort_unstable();
        d
    }

    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for list in &self.adjacency {
            *h.entry(list.len()).or_insert(0) += 1;
        }
        h
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        if self.n() == 0 {
            return true;
        }
        self.bfs_distances(0).iter().all(|d| d.is_some())
    }

    /// Unweighted distances from `source`; `None` for unreachable vertices.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.n()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].unwrap();
            for &y in &self.adjacency[x] {
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Two-coloring if the graph is bipartite.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut side: Vec<Option<bool>> = vec![None; self.n()];
        for s in 0..self.n() {
            if side[s].is_some() {
                continue;
            }
            side[s] = Some(false);
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                let sx = side[x].unwrap();
                for &y in &self.adjacency[x] {
                    match side[y] {
                        None => {
                            side[y] = Some(!sx);
                            queue.push_back(y);
                        }
                        Some(sy) if sy == sx => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(side.into_iter().map(Option::unwrap).collect())
    }

    /// Returns a copy with one extra edge. Errors if the edge exists.
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Graph> {
        let mut edges: Vec<(usize, usize)> = self.edges().map(|e| (e.u, e.v)).collect();
        edges.push((u, v));
        Ok(Graph::from_edges(self.n(), edges)?
            .with_meta(self.meta.clone())
            .with_family_tag(FamilyTag::Derived))
    }

    pub(crate) fn raw_adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }
}

/// Subdivision graph `B(g)`: every edge `u-v` becomes a path `u-w-v`.
///
/// Inserted vertices take ids `n + k` where `k` is the canonical index of
/// the edge they subdivide.
pub fn subdivision(g: &Graph) -> Graph {
    let n = g.n();
    let mut edges = Vec::with_capacity(2 * g.edge_count());
    for (k, e) in g.edges().enumerate() {
        edges.push((e.u, n + k));
        edges.push((e.v, n + k));
    }
    let total = n + g.edge_count();
    let mut meta = g.metas().to_vec();
    meta.resize(total, VertexMeta::default());
    Graph::from_edges(total, edges)
        .expect("subdivision of a simple graph is simple")
        .with_meta(meta)
        .with_family_tag(FamilyTag::Derived)
}

/// Line graph `L(g)`. Vertex `k` of the result is the `k`-th edge of `g` in
/// canonical order.
pub fn line_graph(g: &Graph) -> Graph {
    let edge_list: Vec<EdgeId> = g.edges().collect();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    for (k, e) in edge_list.iter().enumerate() {
        incident[e.u].push(k);
        incident[e.v].push(k);
    }
    let mut edges = Vec::new();
    for list in &incident {
        for (i, &a) in list.iter().enumerate() {
            for &b in &list[i + 1..] {
                edges.push((a, b));
            }
        }
    }
    Graph::from_edges(edge_list.len(), edges)
        .expect("two simple edges share at most one endpoint")
        .with_family_tag(FamilyTag::Derived)
}

/// Subdivided-line graph `Γ(g) = L(B(g))`.
pub fn subdivided_line(g: &Graph) -> Graph {
    line_graph(&subdivision(g))
}

/// Induced subgraph on the complement of `removed`, plus the map from old
/// ids to new ids (`None` for deleted vertices). Survivors keep their
/// relative order.
pub fn remove_vertices(g: &Graph, removed: &[usize]) -> Result<(Graph, Vec<Option<usize>>)> {
    let mut gone = vec![false; g.n()];
    for &x in removed {
        if x >= g.n() {
            return Err(Error::VertexOutOfRange { index: x, n: g.n() });
        }
        gone[x] = true;
    }
    let mut relabel = vec![None; g.n()];
    let mut meta = Vec::new();
    for v in 0..g.n() {
        if !gone[v] {
            relabel[v] = Some(meta.len());
            meta.push(*g.meta(v));
        }
    }
    let edges = g.edges().filter_map(|e| match (relabel[e.u], relabel[e.v]) {
        (Some(a), Some(b)) => Some((a, b)),
        _ => None,
    });
    let sub = Graph::from_edges(meta.len(), edges)?
        .with_meta(meta)
        .with_family_tag(FamilyTag::Derived);
    Ok((sub, relabel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn subdivision_counts() {
        let k4 = Graph::complete(4);
        let b = subdivision(&k4);
        assert_eq!((b.n(), b.edge_count()), (10, 12));
        for v in 4..10 {
            assert_eq!(b.degree(v), 2);
        }
        for v in 0..4 {
            assert_eq!(b.degree(v), 3);
        }

        let single = Graph::path(2);
        let p3 = Graph::from_edges(3, [(0, 2), (1, 2)]).unwrap();
        assert_eq!(subdivision(&single), p3.with_family_tag(FamilyTag::Derived));

        let empty = Graph::empty(4);
        let b = subdivision(&empty);
        assert_eq!((b.n(), b.edge_count()), (4, 0));
    }

    #[test]
    fn line_graph_examples() {
        let l = line_graph(&Graph::path(3));
        assert_eq!((l.n(), l.edge_count()), (2, 1));

        let oct = line_graph(&Graph::complete(4));
        assert_eq!((oct.n(), oct.edge_count()), (6, 12));
        assert!((0..6).all(|v| oct.degree(v) == 4));

        let c4 = line_graph(&Graph::cycle(4));
        assert_eq!((c4.n(), c4.edge_count()), (4, 4));
        assert!((0..4).all(|v| c4.degree(v) == 2));
        assert!(c4.is_connected());
    }

    #[test]
    fn line_graph_vertex_order_is_canonical_edge_order() {
        let g = Graph::from_edges(4, [(2, 3), (0, 1), (1, 2)]).unwrap();
        // edges (0,1),(1,2),(2,3) -> path 0-1-2 in the line graph
        let l = line_graph(&g);
        assert!(l.has_edge(0, 1) && l.has_edge(1, 2) && !l.has_edge(0, 2));
    }

    #[test]
    fn subdivided_line_examples() {
        let s = subdivided_line(&Graph::complete(4));
        assert_eq!((s.n(), s.edge_count()), (12, 18));
        assert!((0..12).all(|v| s.degree(v) == 3));

        let p = subdivided_line(&Graph::path(2));
        assert_eq!((p.n(), p.edge_count()), (2, 1));

        let c8 = subdivided_line(&Graph::cycle(4));
        assert_eq!((c8.n(), c8.edge_count()), (8, 8));
        assert!((0..8).all(|v| c8.degree(v) == 2));
        assert!(c8.is_connected());
    }

    #[test]
    fn remove_vertices_examples() {
        let c4 = Graph::cycle(4);
        let (g, map) = remove_vertices(&c4, &[0, 1]).unwrap();
        assert_eq!((g.n(), g.edge_count()), (2, 1));
        assert_eq!(map, vec![None, None, Some(0), Some(1)]);

        let (g, _) = remove_vertices(&c4, &[0, 2]).unwrap();
        assert_eq!((g.n(), g.edge_count()), (2, 0));

        assert_eq!(
            remove_vertices(&c4, &[4]).unwrap_err(),
            Error::VertexOutOfRange { index: 4, n: 4 }
        );
    }

    #[test]
    fn rejects_non_simple_input() {
        assert!(matches!(Graph::from_edges(3, [(0, 0)]), Err(Error::InvalidGraph(_))));
        assert!(matches!(
            Graph::from_edges(3, [(0, 1), (1, 0)]),
            Err(Error::InvalidGraph(_))
        ));
        assert!(matches!(
            Graph::from_edges(3, [(0, 3)]),
            Err(Error::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn edge_index_matches_iteration_order() {
        let g = subdivided_line(&Graph::complete(4));
        for (k, e) in g.edges().enumerate() {
            assert_eq!(g.edge_index(e), Some(k));
        }
        assert_eq!(g.edge_index(EdgeId::new(0, 11)).is_some(), g.has_edge(0, 11));
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (2usize..12).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n), 0..30).prop_map(move |pairs| {
                let mut set = std::collections::BTreeSet::new();
                for (a, b) in pairs {
                    if a != b {
                        set.insert(EdgeId::new(a, b));
                    }
                }
                Graph::from_edges(n, set.into_iter().map(|e| (e.u, e.v))).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn line_graph_edge_count(g in arb_graph()) {
            let l = line_graph(&g);
            let expected: usize = (0..g.n()).map(|v| g.degree(v) * g.degree(v).saturating_sub(1) / 2).sum();
            prop_assert_eq!(l.n(), g.edge_count());
            prop_assert_eq!(l.edge_count(), expected);
        }

        #[test]
        fn adjacency_is_symmetric_and_sorted(g in arb_graph()) {
            for v in 0..g.n() {
                prop_assert!(g.neighbors(v).windows(2).all(|w| w[0] < w[1]));
                for &w in g.neighbors(v) {
                    prop_assert!(g.has_edge(w, v));
                }
            }
        }

        #[test]
        fn subdivision_is_bipartite_and_gamma_keeps_connectivity(g in arb_graph()) {
            let b = subdivision(&g);
            prop_assert!(b.bipartition().is_some());
            prop_assert_eq!(b.n(), g.n() + g.edge_count());
            prop_assert_eq!(b.edge_count(), 2 * g.edge_count());
            if g.is_connected() && g.edge_count() > 0 {
                prop_assert!(subdivided_line(&g).is_connected());
            }
        }

        #[test]
        fn deleting_vertices_preserves_untouched_degrees(g in arb_graph(), pick in 0usize..12) {
            let victim = pick % g.n();
            let (sub, map) = remove_vertices(&g, &[victim]).unwrap();
            for (v, image) in map.iter().enumerate() {
                if v == victim || g.has_edge(v, victim) {
                    continue;
                }
                prop_assert_eq!(sub.degree(image.unwrap()), g.degree(v));
            }
            // re-adding the vertex with its edges restores the original degree multiset
            let mut edges: Vec<(usize, usize)> = sub.edges().map(|e| {
                let back = |x: usize| map.iter().position(|m| *m == Some(x)).unwrap();
                (back(e.u), back(e.v))
            }).collect();
            edges.extend(g.neighbors(victim).iter().map(|&w| (victim, w)));
            let restored = Graph::from_edges(g.n(), edges).unwrap();
            prop_assert_eq!(restored.degree_multiset(), g.degree_multiset());
        }
    }
}
