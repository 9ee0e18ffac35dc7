//! Deterministic constructions of the fractal family `F_g`, the
//! non-fractal family `H_g` with its orientation `H_g^e`, and the extended
//! Sierpiński graphs `S++_g`.
//!
//! The amalgamation construction is canonical. Copy `i` of the previous
//! generation occupies the id block `i*n .. (i+1)*n`; each identified hub
//! pair collapses onto its lower id, and the surviving ids are compacted in
//! `(copy, local id)` order. The edge-replacement constructions exist to
//! cross-check the amalgamation.

use crate::error::{Error, Result};
use crate::graph::{subdivided_line, EdgeId, Family, FamilyTag, Graph, HubRole, VertexMeta};

pub const DEFAULT_GENERATION_CAP: u32 = 10;

/// Hub identification used when amalgamating four copies: copy `a`'s hub
/// `role_a` is glued to copy `b`'s hub `role_b` and becomes hub `result`.
#[derive(Debug, Clone, Copy)]
struct Identification {
    a: (usize, HubRole),
    b: (usize, HubRole),
    result: HubRole,
}

const fn ident(a: (usize, HubRole), b: (usize, HubRole), result: HubRole) -> Identification {
    Identification { a, b, result }
}

use HubRole::{V1, V2, V3, V4};

const FRACTAL_PLAN: [Identification; 4] = [
    ident((0, V1), (3, V1), V1),
    ident((1, V2), (2, V1), V2),
    ident((0, V2), (1, V1), V3),
    ident((2, V2), (3, V2), V4),
];

const NONFRACTAL_PLAN: [Identification; 4] = [
    ident((0, V1), (3, V1), V1),
    ident((1, V2), (2, V1), V4),
    ident((0, V2), (1, V1), V3),
    ident((2, V2), (3, V2), V2),
];

/// Graph plus one direction per edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientedGraph {
    base: Graph,
    /// `forward[k]` is true when the `k`-th canonical edge `(u, v)`, `u < v`,
    /// is directed `u -> v`.
    forward: Vec<bool>,
    row_offsets: Vec<usize>,
}

impl OrientedGraph {
    /// Orients `base` with the given arcs `(tail, head)`. Every edge must
    /// receive exactly one arc.
    pub fn from_arcs(base: Graph, arcs: &[(usize, usize)]) -> Result<OrientedGraph> {
        let row_offsets = upper_row_offsets(&base);
        let mut forward = vec![None; base.edge_count()];
        for &(tail, head) in arcs {
            if tail == head || !base.has_edge(tail, head) {
                return Err(Error::InvalidGraph(format!(
                    "arc {tail}->{head} is not an edge of the base graph"
                )));
            }
            let k = index_with(&base, &row_offsets, EdgeId::new(tail, head));
            if forward[k].is_some() {
                return Err(Error::InvalidGraph(format!(
                    "edge {tail}-{head} is oriented twice"
                )));
            }
            forward[k] = Some(tail < head);
        }
        let forward = forward
            .into_iter()
            .zip(base.edges())
            .map(|(f, e)| {
                f.ok_or_else(|| Error::InvalidGraph(format!("edge {}-{} has no direction", e.u, e.v)))
            })
            .collect::<Result<Vec<bool>>>()?;
        Ok(OrientedGraph {
            base,
            forward,
            row_offsets,
        })
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    /// Arcs `(tail, head)` in canonical edge order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.base
            .edges()
            .zip(&self.forward)
            .map(|(e, &f)| if f { (e.u, e.v) } else { (e.v, e.u) })
    }

    /// `+1` if `u -> v`, `-1` if `v -> u`, `None` if `u` and `v` are not adjacent.
    pub fn direction(&self, u: usize, v: usize) -> Option<i8> {
        if u == v || !self.base.has_edge(u, v) {
            return None;
        }
        let k = index_with(&self.base, &self.row_offsets, EdgeId::new(u, v));
        let low_to_high = self.forward[k];
        Some(if low_to_high == (u < v) { 1 } else { -1 })
    }
}

fn upper_row_offsets(g: &Graph) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(g.n() + 1);
    let mut acc = 0;
    for u in 0..g.n() {
        offsets.push(acc);
        acc += g.neighbors(u).iter().filter(|&&w| w > u).count();
    }
    offsets.push(acc);
    offsets
}

fn index_with(g: &Graph, offsets: &[usize], e: EdgeId) -> usize {
    let list = g.neighbors(e.u);
    let start = list.partition_point(|&x| x <= e.u);
    let pos = list.binary_search(&e.v).expect("edge present");
    offsets[e.u] + pos - start
}

/// Builds the family graphs, refusing generations above `cap`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Generator {
    pub cap: u32,
}

impl Default for Generator {
    fn default() -> Self {
        Generator {
            cap: DEFAULT_GENERATION_CAP,
        }
    }
}

impl Generator {
    pub fn with_cap(cap: u32) -> Self {
        Generator { cap }
    }

    fn check(&self, g: u32) -> Result<()> {
        if g == 0 {
            return Err(Error::InvalidGeneration(g));
        }
        if g > self.cap {
            return Err(Error::GenerationTooLarge {
                requested: g,
                cap: self.cap,
            });
        }
        Ok(())
    }

    pub fn family(&self, family: Family, g: u32) -> Result<Graph> {
        match family {
            Family::Fractal => self.fractal(g),
            Family::Nonfractal => self.nonfractal(g),
            Family::Sierpinski => self.sierpinski_ext(g),
        }
    }

    /// `F_g` by amalgamating four copies of `F_{g-1}`.
    pub fn fractal(&self, g: u32) -> Result<Graph> {
        self.check(g)?;
        let mut graph = base_quadrangle(Family::Fractal);
        for _ in 1..g {
            graph = amalgamate(&graph, &FRACTAL_PLAN, Family::Fractal).0;
        }
        Ok(graph)
    }

    /// `F_g` by replacing every edge with a quadrangle whose diagonal is the
    /// old edge's endpoints; the old edge disappears.
    pub fn fractal_edge_replacement(&self, g: u32) -> Result<Graph> {
        self.check(g)?;
        let mut graph = base_quadrangle(Family::Fractal);
        for it in 2..=g {
            graph = replace_edges(&graph, it, Family::Fractal);
        }
        Ok(graph)
    }

    /// `H_g` by amalgamating four copies of `H_{g-1}`.
    pub fn nonfractal(&self, g: u32) -> Result<Graph> {
        self.check(g)?;
        let mut graph = base_quadrangle(Family::Nonfractal);
        for _ in 1..g {
            graph = amalgamate(&graph, &NONFRACTAL_PLAN, Family::Nonfractal).0;
        }
        Ok(graph)
    }

    /// `H_g` by keeping every edge `(a, b)` and closing the quadrangle
    /// `a-b-w1-w2-a` through two fresh vertices.
    pub fn nonfractal_edge_replacement(&self, g: u32) -> Result<Graph> {
        self.check(g)?;
        let mut graph = base_quadrangle(Family::Nonfractal);
        for it in 2..=g {
            graph = replace_edges(&graph, it, Family::Nonfractal);
        }
        Ok(graph)
    }

    /// `H_g^e`: the base quadrangle is oriented `v1->v2, v1->v3, v4->v2,
    /// v3->v4`, and each amalgamation step carries the copies' arcs over
    /// unchanged.
    pub fn nonfractal_oriented(&self, g: u32) -> Result<OrientedGraph> {
        self.check(g)?;
        let mut graph = base_quadrangle(Family::Nonfractal);
        let hub = |g: &Graph, r| g.hub(r).unwrap();
        let mut arcs = vec![
            (hub(&graph, V1), hub(&graph, V2)),
            (hub(&graph, V1), hub(&graph, V3)),
            (hub(&graph, V4), hub(&graph, V2)),
            (hub(&graph, V3), hub(&graph, V4)),
        ];
        for _ in 1..g {
            let n = graph.n();
            let (next, map) = amalgamate(&graph, &NONFRACTAL_PLAN, Family::Nonfractal);
            arcs = (0..4)
                .flat_map(|c| arcs.iter().map(move |&(t, h)| (c * n + t, c * n + h)))
                .map(|(t, h)| (map[t], map[h]))
                .collect();
            graph = next;
        }
        OrientedGraph::from_arcs(graph, &arcs)
    }

    /// `S++_g = Γ^{g-1}(K4)`.
    pub fn sierpinski_ext(&self, g: u32) -> Result<Graph> {
        self.check(g)?;
        let mut graph = Graph::complete(4);
        for _ in 1..g {
            graph = subdivided_line(&graph);
        }
        let meta = vec![
            VertexMeta {
                gen_iteration: g,
                hub_role: None,
            };
            graph.n()
        ];
        Ok(graph
            .with_meta(meta)
            .with_family_tag(FamilyTag::Sierpinski))
    }
}

/// The generation-1 quadrangle with ids `v1..v4 = 0..3`. In `F_1` the pairs
/// `{v1, v2}` and `{v3, v4}` are diagonal; in `H_1` the pairs `{v1, v4}` and
/// `{v2, v3}` are.
fn base_quadrangle(family: Family) -> Graph {
    let edges: [(usize, usize); 4] = match family {
        Family::Fractal => [(0, 2), (0, 3), (1, 2), (1, 3)],
        Family::Nonfractal => [(0, 1), (0, 2), (1, 3), (2, 3)],
        Family::Sierpinski => unreachable!("S++ starts from K4"),
    };
    let meta = HubRole::ALL
        .iter()
        .map(|&r| VertexMeta {
            gen_iteration: 1,
            hub_role: Some(r),
        })
        .collect();
    Graph::from_edges(4, edges)
        .expect("quadrangle is simple")
        .with_meta(meta)
        .with_family_tag(family.into())
}

/// Glues four copies of `base` along the plan. Returns the new graph and the
/// map from `copy * n + local` to the new id.
fn amalgamate(base: &Graph, plan: &[Identification; 4], family: Family) -> (Graph, Vec<usize>) {
    let n = base.n();
    let hub = |r: HubRole| base.hub(r).expect("base graph carries all four hubs");

    let mut target: Vec<usize> = (0..4 * n).collect();
    let mut merged_role = vec![None; 4 * n];
    for id in plan {
        let a = id.a.0 * n + hub(id.a.1);
        let b = id.b.0 * n + hub(id.b.1);
        let (lo, hi) = (a.min(b), a.max(b));
        target[hi] = lo;
        merged_role[lo] = Some(id.result);
    }

    let mut compact = vec![usize::MAX; 4 * n];
    let mut meta = Vec::with_capacity(4 * n - 4);
    for x in 0..4 * n {
        if target[x] == x {
            compact[x] = meta.len();
            let old = base.meta(x % n);
            meta.push(match merged_role[x] {
                Some(role) => VertexMeta {
                    gen_iteration: old.gen_iteration,
                    hub_role: Some(role),
                },
                None => VertexMeta {
                    gen_iteration: old.gen_iteration + 1,
                    hub_role: None,
                },
            });
        }
    }
    let map: Vec<usize> = (0..4 * n).map(|x| compact[target[x]]).collect();

    let edges: Vec<(usize, usize)> = (0..4)
        .flat_map(|c| base.edges().map(move |e| (c * n + e.u, c * n + e.v)))
        .map(|(a, b)| (map[a], map[b]))
        .collect();
    let graph = Graph::from_edges(meta.len(), edges)
        .expect("amalgamation glues copies only at hubs")
        .with_meta(meta)
        .with_family_tag(family.into());
    (graph, map)
}

/// One edge-replacement step. Fresh vertices for the `k`-th canonical edge
/// get ids `n + 2k` and `n + 2k + 1`.
fn replace_edges(prev: &Graph, iteration: u32, family: Family) -> Graph {
    let n = prev.n();
    let m = prev.edge_count();
    let mut edges = Vec::with_capacity(4 * m);
    for (k, e) in prev.edges().enumerate() {
        let (w1, w2) = (n + 2 * k, n + 2 * k + 1);
        match family {
            Family::Fractal => {
                edges.extend([(e.u, w1), (w1, e.v), (e.v, w2), (w2, e.u)]);
            }
            Family::Nonfractal => {
                edges.extend([(e.u, e.v), (e.v, w1), (w1, w2), (w2, e.u)]);
            }
            Family::Sierpinski => unreachable!(),
        }
    }
    let mut meta = prev.metas().to_vec();
    meta.resize(
        n + 2 * m,
        VertexMeta {
            gen_iteration: iteration,
            hub_role: None,
        },
    );
    Graph::from_edges(n + 2 * m, edges)
        .expect("edge replacement yields a simple graph")
        .with_meta(meta)
        .with_family_tag(family.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::counts;
    use crate::stats::distance_stats;
    use std::collections::BTreeMap;

    fn gen() -> Generator {
        Generator::default()
    }

    #[test]
    fn fractal_small_generations() {
        let f1 = gen().fractal(1).unwrap();
        assert_eq!((f1.n(), f1.edge_count()), (4, 4));
        assert!(!f1.has_edge(f1.hub(V1).unwrap(), f1.hub(V2).unwrap()));

        let f2 = gen().fractal(2).unwrap();
        assert_eq!((f2.n(), f2.edge_count()), (12, 16));
        assert_eq!(f2.degree_multiset(), vec![2, 2, 2, 2, 2, 2, 2, 2, 4, 4, 4, 4]);

        let f3 = gen().fractal(3).unwrap();
        assert_eq!((f3.n(), f3.edge_count()), (44, 64));
    }

    #[test]
    fn fractal_edge_replacement_matches() {
        let f1 = gen().fractal_edge_replacement(1).unwrap();
        assert_eq!(f1.degree_multiset(), vec![2, 2, 2, 2]);
        let f2 = gen().fractal_edge_replacement(2).unwrap();
        for e in f2.edges() {
            let mut d = [f2.degree(e.u), f2.degree(e.v)];
            d.sort();
            assert_eq!(d, [2, 4]);
        }
        assert_eq!(f2.degree_multiset(), gen().fractal(2).unwrap().degree_multiset());
    }

    #[test]
    fn nonfractal_small_generations() {
        let h1 = gen().nonfractal(1).unwrap();
        let hub = |r| h1.hub(r).unwrap();
        assert!(!h1.has_edge(hub(V1), hub(V4)));
        assert!(!h1.has_edge(hub(V2), hub(V3)));
        assert!(h1.has_edge(hub(V1), hub(V2)));

        let h2 = gen().nonfractal(2).unwrap();
        assert_eq!((h2.n(), h2.edge_count()), (12, 16));
        assert_eq!(h2.degree_multiset(), gen().fractal(2).unwrap().degree_multiset());

        let h3 = gen().nonfractal(3).unwrap();
        assert_eq!((h3.n(), h3.edge_count()), (44, 64));
    }

    #[test]
    fn nonfractal_edge_replacement_matches() {
        assert_eq!(gen().nonfractal_edge_replacement(1).unwrap().edge_count(), 4);
        let h2 = gen().nonfractal_edge_replacement(2).unwrap();
        assert!(h2.has_edge(h2.hub(V1).unwrap(), h2.hub(V2).unwrap()));
        assert_eq!(h2.degree_multiset(), gen().nonfractal(2).unwrap().degree_multiset());
    }

    #[test]
    fn hub_edge_survives_amalgamation() {
        for g in 1..=5 {
            let h = gen().nonfractal(g).unwrap();
            assert!(h.has_edge(h.hub(V1).unwrap(), h.hub(V2).unwrap()), "g={g}");
        }
    }

    #[test]
    fn hubs_are_the_highest_degree_vertices() {
        for g in 1..=5 {
            for graph in [gen().fractal(g).unwrap(), gen().nonfractal(g).unwrap()] {
                let top = 1usize << g;
                let mut hubs: Vec<usize> = HubRole::ALL.iter().map(|&r| graph.hub(r).unwrap()).collect();
                hubs.sort();
                let mut maxdeg: Vec<usize> = (0..graph.n()).filter(|&v| graph.degree(v) == top).collect();
                maxdeg.sort();
                assert_eq!(hubs, maxdeg);
                let roles = graph.metas().iter().filter(|m| m.hub_role.is_some()).count();
                assert_eq!(roles, 4);
            }
        }
    }

    #[test]
    fn gen_iteration_matches_degree_law() {
        for g in 1..=6u32 {
            for graph in [
                gen().fractal(g).unwrap(),
                gen().nonfractal(g).unwrap(),
                gen().fractal_edge_replacement(g).unwrap(),
                gen().nonfractal_edge_replacement(g).unwrap(),
            ] {
                let mut classes: BTreeMap<u32, usize> = BTreeMap::new();
                for v in 0..graph.n() {
                    let gi = graph.meta(v).gen_iteration;
                    assert_eq!(graph.degree(v), 1usize << (g - gi + 1));
                    *classes.entry(gi).or_default() += 1;
                }
                let c = counts(Family::Fractal, g).unwrap();
                for (gi, count) in classes {
                    assert_eq!(c.lv[&gi], count.into());
                }
            }
        }
    }

    #[test]
    fn orientation_base_case() {
        let og = gen().nonfractal_oriented(1).unwrap();
        let arcs: Vec<_> = og.arcs().collect();
        assert_eq!(arcs, vec![(0, 1), (0, 2), (3, 1), (2, 3)]);
        assert_eq!(og.direction(1, 0), Some(-1));
        assert_eq!(og.direction(0, 3), None);
    }

    #[test]
    fn orientation_copies_repeat_base_pattern() {
        let og = gen().nonfractal_oriented(2).unwrap();
        assert_eq!(og.arcs().count(), 16);
        assert_eq!(og.base(), &gen().nonfractal(2).unwrap());
        // each copy is a quadrangle a-b-c-d with the base pattern a->b, a->c, d->b, c->d
        // where a, b are the copy's own v1, v2
        let h = og.base();
        let v = |r| h.hub(r).unwrap();
        let copy_hubs = [(v(V1), v(V3)), (v(V3), v(V4)), (v(V4), v(V2)), (v(V1), v(V2))];
        for (a, b) in copy_hubs {
            assert_eq!(og.direction(a, b), Some(1));
            let (c, d) = h
                .neighbors(a)
                .iter()
                .filter(|&&c| h.degree(c) == 2)
                .find_map(|&c| {
                    h.neighbors(b)
                        .iter()
                        .find(|&&d| h.degree(d) == 2 && h.has_edge(c, d))
                        .map(|&d| (c, d))
                })
                .unwrap();
            assert_eq!(og.direction(a, c), Some(1));
            assert_eq!(og.direction(d, b), Some(1));
            assert_eq!(og.direction(c, d), Some(1));
        }
    }

    #[test]
    fn orientation_rejects_bad_arcs() {
        let base = Graph::cycle(4);
        assert!(OrientedGraph::from_arcs(base.clone(), &[(0, 1), (1, 2), (2, 3)]).is_err());
        assert!(OrientedGraph::from_arcs(base.clone(), &[(0, 1), (1, 0), (1, 2), (2, 3), (3, 0)]).is_err());
        assert!(OrientedGraph::from_arcs(base, &[(0, 2)]).is_err());
    }

    #[test]
    fn sierpinski_examples() {
        let s1 = gen().sierpinski_ext(1).unwrap();
        assert_eq!(s1.edge_count(), 6);
        let s2 = gen().sierpinski_ext(2).unwrap();
        assert_eq!((s2.n(), s2.edge_count()), (12, 18));
        let s3 = gen().sierpinski_ext(3).unwrap();
        assert_eq!((s3.n(), s3.edge_count()), (36, 54));
        for g in 1..=6 {
            let s = gen().sierpinski_ext(g).unwrap();
            assert!((0..s.n()).all(|v| s.degree(v) == 3));
            assert!(s.is_connected());
        }
    }

    #[test]
    fn generation_caps() {
        assert_eq!(gen().fractal(0).unwrap_err(), Error::InvalidGeneration(0));
        assert_eq!(
            gen().fractal(99).unwrap_err(),
            Error::GenerationTooLarge { requested: 99, cap: 10 }
        );
        assert!(Generator::with_cap(2).nonfractal_oriented(3).is_err());
        assert!(Generator::with_cap(3).sierpinski_ext(3).is_ok());
    }

    #[test]
    fn constructions_agree_on_distance_multisets() {
        for g in 1..=3 {
            let pairs = [
                (gen().fractal(g).unwrap(), gen().fractal_edge_replacement(g).unwrap()),
                (gen().nonfractal(g).unwrap(), gen().nonfractal_edge_replacement(g).unwrap()),
            ];
            for (a, b) in pairs {
                assert_eq!(a.degree_multiset(), b.degree_multiset());
                let (da, db) = (distance_stats(&a).unwrap(), distance_stats(&b).unwrap());
                assert_eq!(da.histogram, db.histogram);
                assert_eq!(da.multiset_digest, db.multiset_digest);
            }
        }
    }

    #[test]
    fn construction_is_deterministic() {
        assert_eq!(gen().nonfractal(4).unwrap(), gen().nonfractal(4).unwrap());
        assert_eq!(gen().nonfractal_oriented(3).unwrap(), gen().nonfractal_oriented(3).unwrap());
    }
}
