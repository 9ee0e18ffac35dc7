//! Maximum matchings in general graphs (Edmonds' blossom contraction) and
//! exhaustive counting oracles.

use std::collections::HashMap;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph};

/// Default edge budget for the exhaustive counters.
pub const DEFAULT_ENUMERATION_CAP: usize = 70;

const NONE: usize = usize::MAX;

/// A set of vertex-disjoint edges, stored in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Matching {
    edges: Vec<EdgeId>,
}

impl Matching {
    /// Validates that every edge exists in `g` and no two edges share an
    /// endpoint.
    pub fn new(g: &Graph, edges: impl IntoIterator<Item = EdgeId>) -> Result<Matching> {
        let mut edges: Vec<EdgeId> = edges.into_iter().collect();
        edges.sort_unstable();
        let mut seen = vec![false; g.n()];
        for e in &edges {
            if !g.has_edge(e.u, e.v) {
                return Err(Error::InvalidGraph(format!("{}-{} is not an edge", e.u, e.v)));
            }
            for x in [e.u, e.v] {
                if std::mem::replace(&mut seen[x], true) {
                    return Err(Error::InvalidGraph(format!("vertex {x} matched twice")));
                }
            }
        }
        Ok(Matching { edges })
    }

    fn from_mates(mate: &[usize]) -> Matching {
        let edges = mate
            .iter()
            .enumerate()
            .filter(|&(v, &w)| w != NONE && v < w)
            .map(|(v, &w)| EdgeId { u: v, v: w })
            .collect();
        Matching { edges }
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Covered vertices, ascending.
    pub fn covered(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self.edges.iter().flat_map(|e| [e.u, e.v]).collect();
        c.sort_unstable();
        c
    }

    pub fn is_perfect(&self, g: &Graph) -> bool {
        2 * self.len() == g.n()
    }

    /// True when no edge of `g` can be added.
    pub fn is_maximal(&self, g: &Graph) -> bool {
        let mut covered = vec![false; g.n()];
        for x in self.covered() {
            covered[x] = true;
        }
        g.edges().all(|e| covered[e.u] || covered[e.v])
    }
}

/// Augmenting-path search state, reused across roots. Only vertices touched
/// by the current search are reset afterwards.
struct Search {
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    touched: Vec<usize>,
    queue: Vec<usize>,
    stamp: Vec<u32>,
    blossom: Vec<u32>,
    clock: u32,
}

impl Search {
    fn new(n: usize) -> Self {
        Search {
            parent: vec![NONE; n],
            base: (0..n).collect(),
            used: vec![false; n],
            touched: Vec::new(),
            queue: Vec::new(),
            stamp: vec![0; n],
            blossom: vec![0; n],
            clock: 0,
        }
    }

    fn touch(&mut self, v: usize) {
        if !self.used[v] && self.parent[v] == NONE {
            self.touched.push(v);
        }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.parent[v] = NONE;
            self.base[v] = v;
            self.used[v] = false;
        }
        self.touched.clear();
        self.queue.clear();
    }

    fn tick(&mut self) -> u32 {
        self.clock = self.clock.wrapping_add(1);
        if self.clock == 0 {
            self.stamp.fill(0);
            self.blossom.fill(0);
            self.clock = 1;
        }
        self.clock
    }

    fn lca(&mut self, mate: &[usize], mut a: usize, mut b: usize) -> usize {
        let t = self.tick();
        loop {
            a = self.base[a];
            self.stamp[a] = t;
            if mate[a] == NONE {
                break;
            }
            a = self.parent[mate[a]];
        }
        loop {
            b = self.base[b];
            if self.stamp[b] == t {
                return b;
            }
            b = self.parent[mate[b]];
        }
    }

    fn mark_path(&mut self, mate: &[usize], mut v: usize, b: usize, mut child: usize, t: u32) {
        while self.base[v] != b {
            self.blossom[self.base[v]] = t;
            self.blossom[self.base[mate[v]]] = t;
            self.touch(v);
            self.parent[v] = child;
            child = mate[v];
            v = self.parent[mate[v]];
        }
    }

    /// Returns the free endpoint of an augmenting path from `root`, with the
    /// path recorded in `parent`/`mate` alternation.
    fn find_path(&mut self, adj: &[Vec<usize>], mate: &[usize], root: usize) -> Option<usize> {
        self.touch(root);
        self.used[root] = true;
        self.queue.push(root);
        let mut head = 0;
        while head < self.queue.len() {
            let v = self.queue[head];
            head += 1;
            for &to in &adj[v] {
                if self.base[v] == self.base[to] || mate[v] == to {
                    continue;
                }
                if to == root || (mate[to] != NONE && self.parent[mate[to]] != NONE) {
                    let cur = self.lca(mate, v, to);
                    let t = self.tick();
                    self.mark_path(mate, v, cur, to, t);
                    self.mark_path(mate, to, cur, v, t);
                    // only vertices already in the search tree can lie in the blossom
                    let mut i = 0;
                    while i < self.touched.len() {
                        let x = self.touched[i];
                        if self.blossom[self.base[x]] == t {
                            self.base[x] = cur;
                            if !self.used[x] {
                                self.used[x] = true;
                                self.queue.push(x);
                            }
                        }
                        i += 1;
                    }
                } else if self.parent[to] == NONE {
                    self.touch(to);
                    self.parent[to] = v;
                    if mate[to] == NONE {
                        return Some(to);
                    }
                    let m = mate[to];
                    self.touch(m);
                    self.used[m] = true;
                    self.queue.push(m);
                }
            }
        }
        None
    }
}

/// A maximum-cardinality matching of `g`.
///
/// Greedy initialisation, then one augmenting-path search per free vertex:
/// a vertex from which no augmenting path exists never gains one later.
pub fn maximum_matching(g: &Graph) -> Matching {
    let n = g.n();
    let adj = g.raw_adjacency();
    let mut mate = vec![NONE; n];
    for v in 0..n {
        if mate[v] == NONE {
            if let Some(&w) = adj[v].iter().find(|&&w| mate[w] == NONE) {
                mate[v] = w;
                mate[w] = v;
            }
        }
    }
    let mut search = Search::new(n);
    for root in 0..n {
        if mate[root] != NONE {
            continue;
        }
        if let Some(end) = search.find_path(adj, &mate, root) {
            let mut v = end;
            while v != NONE {
                let pv = search.parent[v];
                let next = mate[pv];
                mate[v] = pv;
                mate[pv] = v;
                v = next;
            }
        }
        search.reset();
    }
    Matching::from_mates(&mate)
}

pub fn matching_number(g: &Graph) -> usize {
    maximum_matching(g).len()
}

/// True iff `g` has an even number of vertices and a matching covering all
/// of them. The empty graph qualifies.
pub fn has_perfect_matching(g: &Graph) -> bool {
    g.n().is_multiple_of(2) && 2 * matching_number(g) == g.n()
}

/// Size of a maximum matching together with how many distinct maximum
/// matchings exist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxMatchingCount {
    pub size: usize,
    pub count: BigInt,
}

fn check_cap(g: &Graph, cap: usize) -> Result<()> {
    if g.edge_count() > cap {
        return Err(Error::CapExceeded {
            what: "exhaustive enumeration edge count",
            size: g.edge_count(),
            cap,
        });
    }
    Ok(())
}

struct MaxCounter<'a> {
    adj: &'a [Vec<usize>],
    covered: Vec<bool>,
    best: usize,
    count: u64,
}

impl MaxCounter<'_> {
    /// Vertices below `pos` are decided. `free_ahead` counts uncovered
    /// vertices at or above `pos`.
    fn run(&mut self, mut pos: usize, size: usize, mut free_ahead: usize) {
        let n = self.covered.len();
        while pos < n && self.covered[pos] {
            pos += 1;
        }
        if pos == n {
            match size.cmp(&self.best) {
                std::cmp::Ordering::Greater => {
                    self.best = size;
                    self.count = 1;
                }
                std::cmp::Ordering::Equal => self.count += 1,
                std::cmp::Ordering::Less => {}
            }
            return;
        }
        if size + free_ahead / 2 < self.best {
            return;
        }
        self.covered[pos] = true;
        free_ahead -= 1;
        for i in 0..self.adj[pos].len() {
            let w = self.adj[pos][i];
            if w > pos && !self.covered[w] {
                self.covered[w] = true;
                self.run(pos + 1, size + 1, free_ahead - 1);
                self.covered[w] = false;
            }
        }
        self.covered[pos] = false;
        // leave `pos` unmatched
        if size + free_ahead / 2 >= self.best {
            self.covered[pos] = true;
            self.run(pos + 1, size, free_ahead);
            self.covered[pos] = false;
        }
    }
}

/// Counts maximum matchings by exhaustive backtracking: branch on the lowest
/// undecided vertex (match it to each larger free neighbour in ascending
/// order, or leave it unmatched), pruning branches whose size plus the
/// remaining upper bound cannot reach the best size seen so far.
pub fn count_maximum_matchings_bruteforce(g: &Graph, cap: usize) -> Result<MaxMatchingCount> {
    check_cap(g, cap)?;
    let mut c = MaxCounter {
        adj: g.raw_adjacency(),
        covered: vec![false; g.n()],
        best: 0,
        count: 0,
    };
    c.run(0, 0, g.n());
    Ok(MaxMatchingCount {
        size: c.best,
        count: BigInt::from(c.count),
    })
}

/// Same count as [`count_maximum_matchings_bruteforce`] over the same
/// branching tree, with identical subtrees shared through a memo keyed on
/// the covered set ahead of the current vertex. Limited to 128 vertices.
pub fn count_maximum_matchings_memoized(g: &Graph, cap: usize) -> Result<MaxMatchingCount> {
    check_cap(g, cap)?;
    if g.n() > 128 {
        return Err(Error::CapExceeded {
            what: "memoized enumeration vertex count",
            size: g.n(),
            cap: 128,
        });
    }
    fn rec(
        adj: &[Vec<usize>],
        pos: usize,
        covered: u128,
        memo: &mut HashMap<(usize, u128), (usize, BigInt)>,
    ) -> (usize, BigInt) {
        let n = adj.len();
        let mut pos = pos;
        while pos < n && covered >> pos & 1 == 1 {
            pos += 1;
        }
        if pos == n {
            return (0, BigInt::from(1));
        }
        let key = (pos, covered >> pos);
        if let Some(hit) = memo.get(&key) {
            return hit.clone();
        }
        let mut best = rec(adj, pos + 1, covered | 1 << pos, memo);
        for &w in &adj[pos] {
            if w > pos && covered >> w & 1 == 0 {
                let (s, c) = rec(adj, pos + 1, covered | 1 << pos | 1 << w, memo);
                match (s + 1).cmp(&best.0) {
                    std::cmp::Ordering::Greater => best = (s + 1, c),
                    std::cmp::Ordering::Equal => best.1 += c,
                    std::cmp::Ordering::Less => {}
                }
            }
        }
        memo.insert(key, best.clone());
        best
    }
    let mut memo = HashMap::new();
    let (size, count) = rec(g.raw_adjacency(), 0, 0, &mut memo);
    Ok(MaxMatchingCount { size, count })
}

/// Number of perfect matchings. `odd_order` is set (and the count is zero)
/// when the vertex count is odd.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerfectMatchingCount {
    pub count: BigInt,
    pub odd_order: bool,
}

/// Counts perfect matchings by branching on the lowest uncovered vertex and
/// its uncovered neighbours in ascending order.
pub fn count_perfect_matchings_bruteforce(g: &Graph, cap: usize) -> Result<PerfectMatchingCount> {
    check_cap(g, cap)?;
    if g.n() % 2 == 1 {
        return Ok(PerfectMatchingCount {
            count: BigInt::from(0),
            odd_order: true,
        });
    }
    fn rec(adj: &[Vec<usize>], covered: &mut [bool], from: usize) -> u64 {
        let Some(v) = (from..covered.len()).find(|&v| !covered[v]) else {
            return 1;
        };
        covered[v] = true;
        let mut total = 0;
        for &w in &adj[v] {
            if !covered[w] {
                covered[w] = true;
                total += rec(adj, covered, v + 1);
                covered[w] = false;
            }
        }
        covered[v] = false;
        total
    }
    let mut covered = vec![false; g.n()];
    let count = rec(g.raw_adjacency(), &mut covered, 0);
    Ok(PerfectMatchingCount {
        count: BigInt::from(count),
        odd_order: false,
    })
}
