//! Instances, forests, shortest paths, the text format and the Steiner Tree embedding.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt::Write as _;

use num_traits::{Signed, Zero};
use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_q, Q};

/// Vertex id, dense in `0..n`.
pub type Vertex = usize;

/// Per-vertex required-active-until time.
pub type Fingerprint = Vec<Q>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: usize,
    pub u: Vertex,
    pub v: Vertex,
    pub cost: Q,
}

impl Edge {
    pub fn new(id: usize, u: Vertex, v: Vertex, cost: Q) -> Self {
        Edge { id, u, v, cost }
    }

    pub fn other(&self, x: Vertex) -> Vertex {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Weighted undirected multigraph plus a `pair` involution.
///
/// Edges are kept sorted by id; `pair[v] == v` marks a non-terminal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub n: usize,
    pub edges: Vec<Edge>,
    pub pair: Vec<Vertex>,
}

impl Instance {
    /// Builds and validates. Edges may come in any order.
    pub fn new(n: usize, mut edges: Vec<Edge>, pair: Vec<Vertex>) -> Result<Self> {
        edges.sort_by_key(|e| e.id);
        let inst = Instance { n, edges, pair };
        validate_instance(&inst)?;
        Ok(inst)
    }

    /// Edge list with ids `0..m` and every vertex self-paired.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex, Q)]) -> Result<Self> {
        let es = edges
            .iter()
            .enumerate()
            .map(|(i, (u, v, c))| Edge::new(i, *u, *v, c.clone()))
            .collect();
        Instance::new(n, es, (0..n).collect())
    }

    /// Same graph, pairs replaced. `pairs` lists unordered demand pairs.
    pub fn with_pairs(&self, pairs: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut pair: Vec<Vertex> = (0..self.n).collect();
        for &(a, b) in pairs {
            if a >= self.n || b >= self.n {
                return Err(Error::InvalidVertex(a.max(b)));
            }
            pair[a] = b;
            pair[b] = a;
        }
        Instance::new(self.n, self.edges.clone(), pair)
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_index(&self, id: usize) -> Option<usize> {
        self.edges.binary_search_by_key(&id, |e| e.id).ok()
    }

    pub fn edge(&self, id: usize) -> Option<&Edge> {
        self.edge_index(id).map(|i| &self.edges[i])
    }

    pub fn max_edge_id(&self) -> Option<usize> {
        self.edges.last().map(|e| e.id)
    }

    pub fn is_terminal(&self, v: Vertex) -> bool {
        self.pair[v] != v
    }

    pub fn terminals(&self) -> Vec<Vertex> {
        (0..self.n).filter(|&v| self.is_terminal(v)).collect()
    }

    /// Unordered demand pairs `(a, b)` with `a < b`.
    pub fn demand_pairs(&self) -> Vec<(Vertex, Vertex)> {
        (0..self.n)
            .filter(|&v| self.pair[v] > v)
            .map(|v| (v, self.pair[v]))
            .collect()
    }

    /// `adj[v]` = (edge index, neighbour), ascending edge id.
    pub fn adjacency(&self) -> Vec<Vec<(usize, Vertex)>> {
        let mut adj = vec![Vec::new(); self.n];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.u].push((i, e.v));
            adj[e.v].push((i, e.u));
        }
        adj
    }

    pub fn total_cost(&self) -> Q {
        self.edges.iter().map(|e| e.cost.clone()).sum()
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::InvalidVertex(v))
        }
    }
}

/// Checks every [`Instance`] invariant, reporting the first failure.
pub fn validate_instance(inst: &Instance) -> Result<()> {
    if inst.pair.len() != inst.n {
        return Err(Error::Precondition(format!(
            "pair map has {} entries for {} vertices",
            inst.pair.len(),
            inst.n
        )));
    }
    for (v, &p) in inst.pair.iter().enumerate() {
        if p >= inst.n {
            return Err(Error::InvalidVertex(p));
        }
        if inst.pair[p] != v {
            return Err(Error::NotInvolution(v));
        }
    }
    for (i, e) in inst.edges.iter().enumerate() {
        if i > 0 && inst.edges[i - 1].id >= e.id {
            if inst.edges[i - 1].id == e.id {
                return Err(Error::DuplicateEdgeId(e.id));
            }
            return Err(Error::Precondition("edges not sorted by id".into()));
        }
        if e.u >= inst.n || e.v >= inst.n {
            return Err(Error::InvalidVertex(e.u.max(e.v)));
        }
        if e.u == e.v {
            return Err(Error::SelfLoop(e.id));
        }
        if e.cost.is_negative() {
            return Err(Error::NegativeCost(e.id));
        }
    }
    Ok(())
}

/// A set of edge ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Forest {
    pub edge_ids: BTreeSet<usize>,
}

impl Forest {
    pub fn new() -> Self {
        Forest::default()
    }

    pub fn from_ids<I: IntoIterator<Item = usize>>(ids: I) -> Self {
        Forest {
            edge_ids: ids.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.edge_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edge_ids.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.edge_ids.contains(&id)
    }

    /// Sum of edge costs. Unknown ids are an error.
    pub fn cost(&self, inst: &Instance) -> Result<Q> {
        let mut c = Q::zero();
        for &id in &self.edge_ids {
            c += &inst.edge(id).ok_or(Error::UnknownEdge(id))?.cost;
        }
        Ok(c)
    }

    pub fn is_acyclic(&self, inst: &Instance) -> Result<bool> {
        let mut uf = UnionFind::<usize>::new(inst.n);
        for &id in &self.edge_ids {
            let e = inst.edge(id).ok_or(Error::UnknownEdge(id))?;
            if !uf.union(e.u, e.v) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Component label per vertex in the subgraph `(V, self)`.
    pub fn components(&self, inst: &Instance) -> Result<Vec<usize>> {
        let mut uf = UnionFind::<usize>::new(inst.n);
        for &id in &self.edge_ids {
            let e = inst.edge(id).ok_or(Error::UnknownEdge(id))?;
            uf.union(e.u, e.v);
        }
        Ok(uf.into_labeling())
    }

    /// Minimum spanning forest of the edges, with the same connectivity.
    pub fn spanning_forest(&self, inst: &Instance) -> Result<Forest> {
        let mut es = Vec::with_capacity(self.len());
        for &id in &self.edge_ids {
            es.push(inst.edge(id).ok_or(Error::UnknownEdge(id))?);
        }
        es.sort_by(|a, b| a.cost.cmp(&b.cost).then(a.id.cmp(&b.id)));
        let mut uf = UnionFind::<usize>::new(inst.n);
        Ok(Forest::from_ids(
            es.into_iter().filter(|e| uf.union(e.u, e.v)).map(|e| e.id),
        ))
    }
}

/// True iff every vertex is connected to its pair in the forest.
pub fn check_feasible(inst: &Instance, forest: &Forest) -> Result<bool> {
    let lab = forest.components(inst)?;
    Ok((0..inst.n).all(|v| lab[v] == lab[inst.pair[v]]))
}

#[derive(PartialEq, Eq)]
struct HeapItem {
    dist: Q,
    hops: usize,
    v: Vertex,
}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (dist, hops, v)
        other
            .dist
            .cmp(&self.dist)
            .then(other.hops.cmp(&self.hops))
            .then(other.v.cmp(&self.v))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source shortest paths.
///
/// Ties on distance prefer fewer edges, then the first edge id seen.
pub struct ShortestPaths {
    pub dist: Vec<Option<Q>>,
    pub hops: Vec<usize>,
    /// (edge index, predecessor)
    pub pred: Vec<Option<(usize, Vertex)>>,
}

impl ShortestPaths {
    /// Edge ids along the path from the source to `t`.
    pub fn path_to(&self, inst: &Instance, t: Vertex) -> Option<Vec<usize>> {
        self.dist[t].as_ref()?;
        let mut out = Vec::new();
        let mut x = t;
        while let Some((ei, p)) = self.pred[x] {
            out.push(inst.edges[ei].id);
            x = p;
        }
        out.reverse();
        Some(out)
    }
}

pub fn dijkstra(inst: &Instance, adj: &[Vec<(usize, Vertex)>], s: Vertex) -> ShortestPaths {
    let n = inst.n;
    let mut dist: Vec<Option<Q>> = vec![None; n];
    let mut hops = vec![usize::MAX; n];
    let mut pred = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[s] = Some(Q::zero());
    hops[s] = 0;
    heap.push(HeapItem {
        dist: Q::zero(),
        hops: 0,
        v: s,
    });
    while let Some(HeapItem { dist: d, hops: h, v }) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        for &(ei, w) in &adj[v] {
            if done[w] {
                continue;
            }
            let nd = &d + &inst.edges[ei].cost;
            let better = match &dist[w] {
                None => true,
                Some(old) => nd < *old || (nd == *old && h + 1 < hops[w]),
            };
            if better {
                dist[w] = Some(nd.clone());
                hops[w] = h + 1;
                pred[w] = Some((ei, v));
                heap.push(HeapItem {
                    dist: nd,
                    hops: h + 1,
                    v: w,
                });
            }
        }
    }
    ShortestPaths { dist, hops, pred }
}

/// Minimum-cost `u`–`v` path as `(cost, edge ids)`, or `None` when unreachable.
pub fn shortest_path(inst: &Instance, u: Vertex, v: Vertex) -> Result<Option<(Q, Vec<usize>)>> {
    inst.check_vertex(u)?;
    inst.check_vertex(v)?;
    let sp = dijkstra(inst, &inst.adjacency(), u);
    Ok(sp.dist[v].clone().map(|d| (d, sp.path_to(inst, v).unwrap())))
}

/// All-pairs distances; `None` for unreachable.
pub fn all_pairs(inst: &Instance) -> Vec<Vec<Option<Q>>> {
    let adj = inst.adjacency();
    (0..inst.n).map(|s| dijkstra(inst, &adj, s).dist).collect()
}

/// Parses the line-oriented instance format.
///
/// ```text
/// SECTION Graph
/// N 3
/// E 0 1 5
/// E 1 2 3/2
/// SECTION Pairs
/// P 0 2
/// EOF
/// ```
pub fn parse_instance(text: &str) -> Result<Instance> {
    #[derive(PartialEq)]
    enum Sec {
        None,
        Graph,
        Pairs,
        Done,
    }
    let err = |line: usize, msg: &str| Error::Parse {
        line,
        msg: msg.to_string(),
    };
    let mut sec = Sec::None;
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    let mut pairs: Vec<(usize, Vertex, Vertex)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if sec == Sec::Done {
            return Err(err(ln, "content after EOF"));
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "SECTION" => match toks.get(1).copied() {
                Some("Graph") if toks.len() == 2 && sec == Sec::None => sec = Sec::Graph,
                Some("Pairs") if toks.len() == 2 && sec == Sec::Graph => sec = Sec::Pairs,
                _ => return Err(err(ln, "unexpected SECTION header")),
            },
            "EOF" if toks.len() == 1 => sec = Sec::Done,
            "N" if sec == Sec::Graph && toks.len() == 2 => {
                if n.is_some() {
                    return Err(err(ln, "duplicate N line"));
                }
                n = Some(toks[1].parse().map_err(|_| err(ln, "bad vertex count"))?);
            }
            "E" if sec == Sec::Graph && toks.len() == 4 => {
                let u: usize = toks[1].parse().map_err(|_| err(ln, "bad endpoint"))?;
                let v: usize = toks[2].parse().map_err(|_| err(ln, "bad endpoint"))?;
                let c = parse_q(toks[3]).ok_or_else(|| err(ln, "bad cost"))?;
                if c.is_negative() {
                    return Err(err(ln, "negative cost"));
                }
                let nn = n.ok_or_else(|| err(ln, "E before N"))?;
                if u >= nn || v >= nn {
                    return Err(err(ln, "endpoint out of range"));
                }
                if u == v {
                    return Err(err(ln, "self-loop"));
                }
                edges.push(Edge::new(edges.len(), u, v, c));
            }
            "P" if sec == Sec::Pairs && toks.len() == 3 => {
                let u: usize = toks[1].parse().map_err(|_| err(ln, "bad pair vertex"))?;
                let v: usize = toks[2].parse().map_err(|_| err(ln, "bad pair vertex"))?;
                pairs.push((ln, u, v));
            }
            _ => return Err(err(ln, "malformed line")),
        }
    }
    if sec != Sec::Done {
        return Err(err(text.lines().count(), "missing EOF"));
    }
    let n = n.ok_or_else(|| err(0, "missing N line"))?;
    let mut pair: Vec<Option<Vertex>> = vec![None; n];
    for (ln, u, v) in pairs {
        if u >= n || v >= n {
            return Err(err(ln, "pair vertex out of range"));
        }
        for (a, b) in [(u, v), (v, u)] {
            match pair[a] {
                Some(x) if x != b => return Err(err(ln, "pair section is not an involution")),
                _ => pair[a] = Some(b),
            }
        }
    }
    let pair = pair
        .into_iter()
        .enumerate()
        .map(|(v, p)| p.unwrap_or(v))
        .collect();
    Instance::new(n, edges, pair)
}

/// Writes the text format. Edge ids are implied by line order.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut s = String::new();
    s.push_str("SECTION Graph\n");
    let _ = writeln!(s, "N {}", inst.n);
    for e in &inst.edges {
        let _ = writeln!(s, "E {} {} {}", e.u, e.v, fmt_q(&e.cost));
    }
    s.push_str("SECTION Pairs\n");
    for (a, b) in inst.demand_pairs() {
        let _ = writeln!(s, "P {a} {b}");
    }
    s.push_str("EOF\n");
    s
}

/// A Steiner Tree instance rewritten as Steiner Forest.
#[derive(Clone, Debug)]
pub struct TreeEmbedding {
    pub instance: Instance,
    pub root: Vertex,
    pub terminals: Vec<Vertex>,
    /// duplicate vertex ids, one per non-root terminal
    pub duplicates: Vec<Vertex>,
    /// zero-cost root–duplicate edges
    pub dup_edges: Vec<usize>,
}

impl TreeEmbedding {
    /// Drops the duplicate edges from a forest of the embedded instance.
    pub fn project(&self, f: &Forest) -> Forest {
        Forest::from_ids(
            f.edge_ids
                .iter()
                .copied()
                .filter(|id| !self.dup_edges.contains(id)),
        )
    }
}

/// Duplicates `root` once per other terminal, pairing each copy with that terminal.
pub fn steiner_tree_embed(graph: &Instance, terminals: &[Vertex], root: Vertex) -> Result<TreeEmbedding> {
    let terms: BTreeSet<Vertex> = terminals.iter().copied().collect();
    for &t in &terms {
        graph.check_vertex(t)?;
    }
    if !terms.contains(&root) {
        return Err(Error::Precondition(format!("root {root} is not a terminal")));
    }
    if terms.len() < 2 {
        return Err(Error::Precondition("need at least two terminals".into()));
    }
    let others: Vec<Vertex> = terms.iter().copied().filter(|&t| t != root).collect();
    let n = graph.n + others.len();
    let mut edges = graph.edges.clone();
    let mut pair: Vec<Vertex> = (0..n).collect();
    let mut next_id = graph.max_edge_id().map_or(0, |m| m + 1);
    let mut duplicates = Vec::new();
    let mut dup_edges = Vec::new();
    for (i, &t) in others.iter().enumerate() {
        let d = graph.n + i;
        pair[d] = t;
        pair[t] = d;
        edges.push(Edge::new(next_id, root, d, Q::zero()));
        duplicates.push(d);
        dup_edges.push(next_id);
        next_id += 1;
    }
    Ok(TreeEmbedding {
        instance: Instance::new(n, edges, pair)?,
        root,
        terminals: terms.into_iter().collect(),
        duplicates,
        dup_edges,
    })
}
