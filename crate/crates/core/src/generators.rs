//! Fixture families: wheel, grid, binary tree, horseshoe, gluttonous trap, random.

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Edge, Instance, Vertex};
use crate::rational::{fmt_q, q, qi, to_f64, Q};

fn range_err(name: &'static str, value: impl ToString) -> Error {
    Error::Range {
        name,
        value: value.to_string(),
    }
}

fn check_xi(xi: &Q) -> Result<()> {
    if *xi <= Q::zero() || *xi >= Q::one() {
        return Err(range_err("xi", fmt_q(xi)));
    }
    Ok(())
}

struct Builder {
    n: usize,
    edges: Vec<Edge>,
    pair: Vec<Vertex>,
}

impl Builder {
    fn new(n: usize) -> Self {
        Builder {
            n,
            edges: Vec::new(),
            pair: (0..n).collect(),
        }
    }

    fn add_vertex(&mut self) -> Vertex {
        self.pair.push(self.n);
        self.n += 1;
        self.n - 1
    }

    fn edge(&mut self, u: Vertex, v: Vertex, c: Q) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge::new(id, u, v, c));
        id
    }

    fn pair(&mut self, a: Vertex, b: Vertex) {
        self.pair[a] = b;
        self.pair[b] = a;
    }

    /// Encodes "all of `group` must be connected" with chained duplicates.
    fn group(&mut self, group: &[Vertex]) {
        for w in group.windows(2) {
            let d = self.add_vertex();
            self.edge(w[0], d, Q::zero());
            self.pair(d, w[1]);
        }
    }

    fn build(self) -> Result<Instance> {
        Instance::new(self.n, self.edges, self.pair)
    }
}

/// Four rim terminals 0..4 around centre 4; opposite terminals are paired.
pub fn gen_wheel(xi: &Q) -> Result<Instance> {
    check_xi(xi)?;
    let mut b = Builder::new(5);
    for i in 0..4 {
        b.edge(i, (i + 1) % 4, qi(2));
    }
    for i in 0..4 {
        b.edge(i, 4, Q::one() + xi);
    }
    b.pair(0, 2);
    b.pair(1, 3);
    b.build()
}

/// Vertex id of grid cell `(column, row)`.
pub fn grid_vertex(n: usize, column: usize, row: usize) -> Vertex {
    column * n + row
}

/// `m` columns of `n` vertices. Columns `0..m-1` are terminal groups joined by
/// cost-2 stars from their row-0 head; every row runs to the last column with
/// cost `1+xi`; the last column is a cost-2 star.
pub fn gen_grid(n: usize, m: usize, xi: &Q) -> Result<Instance> {
    check_xi(xi)?;
    if n < 2 {
        return Err(range_err("n", n));
    }
    if m < 2 {
        return Err(range_err("m", m));
    }
    let mut b = Builder::new(n * m);
    for c in 0..m {
        for r in 1..n {
            b.edge(grid_vertex(n, c, 0), grid_vertex(n, c, r), qi(2));
        }
    }
    for c in 0..m - 1 {
        for r in 0..n {
            b.edge(grid_vertex(n, c, r), grid_vertex(n, m - 1, r), Q::one() + xi);
        }
    }
    for c in 0..m - 1 {
        let col: Vec<Vertex> = (0..n).map(|r| grid_vertex(n, c, r)).collect();
        b.group(&col);
    }
    b.build()
}

/// Closed forms for the grid: (legacy cost, optimum).
pub fn grid_costs(n: usize, m: usize, xi: &Q) -> (Q, Q) {
    let (n1, m1) = (qi(n as i64 - 1), qi(m as i64 - 1));
    let legacy = qi(2) * &n1 * &m1;
    let opt = qi(2) * &n1 + (Q::one() + xi) * qi(n as i64) * &m1;
    (legacy, opt)
}

/// Binary tree of height `h` plus consecutive-leaf links.
#[derive(Clone, Debug)]
pub struct BinaryInstance {
    /// every vertex self-paired
    pub graph: Instance,
    /// the leaves, ascending
    pub terminals: Vec<Vertex>,
    pub h: usize,
}

/// Heap-numbered complete binary tree. An edge whose lower end has depth `d`
/// costs `2^(d-h)`; consecutive leaves are linked at cost `2-xi`.
pub fn gen_binary(h: usize, xi: &Q) -> Result<BinaryInstance> {
    check_xi(xi)?;
    if !(1..=16).contains(&h) {
        return Err(range_err("h", h));
    }
    let n = (1usize << (h + 1)) - 1;
    let mut b = Builder::new(n);
    for child in 1..n {
        let depth = (usize::BITS - (child + 1).leading_zeros() - 1) as usize;
        b.edge((child - 1) / 2, child, q(1, 1i64 << (h - depth)));
    }
    let first_leaf = (1usize << h) - 1;
    for leaf in first_leaf..n - 1 {
        b.edge(leaf, leaf + 1, qi(2) - xi);
    }
    Ok(BinaryInstance {
        graph: b.build()?,
        terminals: (first_leaf..n).collect(),
        h,
    })
}

/// Layout of a generated horseshoe.
#[derive(Clone, Debug)]
pub struct HorseshoeInstance {
    pub instance: Instance,
    pub u: Vertex,
    pub v: Vertex,
    /// `a[i]`, `b[i]` for rows `1..=n`, stored at index `i-1`
    pub a: Vec<Vertex>,
    pub b: Vec<Vertex>,
    /// petals around `a[i]` and `b[i]`
    pub left_petals: Vec<Vec<Vertex>>,
    pub right_petals: Vec<Vec<Vertex>>,
}

/// Path `u = A0 .. A(n+1) = v` of unit edges, a unit row edge `A_i - B_i`,
/// `petals` demand pairs per row attached to `A_i` and `B_i` by `xi` edges,
/// and a direct `u - v` edge of cost 2. `u` and `v` are paired.
pub fn gen_horseshoe(n: usize, petals: usize, xi: &Q) -> Result<HorseshoeInstance> {
    check_xi(xi)?;
    if n < 1 {
        return Err(range_err("n", n));
    }
    if petals < 1 {
        return Err(range_err("petals", petals));
    }
    // A0..A(n+1), then B1..Bn, then petals row by row
    let mut b = Builder::new(n + 2);
    let bs: Vec<Vertex> = (0..n).map(|_| b.add_vertex()).collect();
    let (u, v) = (0, n + 1);
    for i in 0..=n {
        b.edge(i, i + 1, Q::one());
    }
    for i in 1..=n {
        b.edge(i, bs[i - 1], Q::one());
    }
    b.edge(u, v, qi(2));
    b.pair(u, v);
    let mut left_petals = Vec::new();
    let mut right_petals = Vec::new();
    for i in 1..=n {
        let l: Vec<Vertex> = (0..petals).map(|_| b.add_vertex()).collect();
        let r: Vec<Vertex> = (0..petals).map(|_| b.add_vertex()).collect();
        for j in 0..petals {
            b.edge(i, l[j], xi.clone());
            b.edge(bs[i - 1], r[j], xi.clone());
            b.pair(l[j], r[j]);
        }
        left_petals.push(l);
        right_petals.push(r);
    }
    Ok(HorseshoeInstance {
        instance: b.build()?,
        u,
        v,
        a: (1..=n).collect(),
        b: bs,
        left_petals,
        right_petals,
    })
}

/// The gluttonous trap as a metric closure.
#[derive(Clone, Debug)]
pub struct GluttonousInstance {
    pub instance: Instance,
    /// `groups[i]` = {u(i,j) : all j}
    pub groups: Vec<Vec<Vertex>>,
    /// the underlying tree as (u, v, cost); its cost upper-bounds OPT
    pub tree_edges: Vec<(Vertex, Vertex, Q)>,
}

impl GluttonousInstance {
    pub fn tree_cost(&self) -> Q {
        self.tree_edges.iter().map(|e| e.2.clone()).sum()
    }
}

/// `n` copies of a spine `v(0..=k)` hung from a root, with `u(i,j)` attached to
/// `v(i,j)`; spine and pendant edges at level `i` cost `2^i`, root edges cost 1.
/// Groups are `u(i, *)`. Group-internal closure distances are lowered by `xi`
/// (`xi = 0` gives the plain closure).
pub fn gen_gluttonous(n: usize, k: usize, xi: &Q) -> Result<GluttonousInstance> {
    if n < 2 {
        return Err(range_err("n", n));
    }
    if !(1..=20).contains(&k) {
        return Err(range_err("k", k));
    }
    if *xi < Q::zero() || *xi >= Q::one() {
        return Err(range_err("xi", fmt_q(xi)));
    }
    let uid = |i: usize, j: usize| i * n + j;
    let vid = |i: usize, j: usize| (k + 1) * n + i * n + j;
    let root = 2 * (k + 1) * n;
    let base = root + 1;
    let pow = |i: usize| qi(1i64 << i);

    let mut tree_edges = Vec::new();
    for j in 0..n {
        tree_edges.push((root, vid(0, j), Q::one()));
        for i in 0..k {
            tree_edges.push((vid(i, j), vid(i + 1, j), pow(i)));
        }
        for i in 0..=k {
            tree_edges.push((uid(i, j), vid(i, j), pow(i)));
        }
    }
    // tree distances by BFS-style accumulation
    let mut adj: Vec<Vec<(Vertex, Q)>> = vec![Vec::new(); base];
    for (a, b, c) in &tree_edges {
        adj[*a].push((*b, c.clone()));
        adj[*b].push((*a, c.clone()));
    }
    let dist_from = |s: Vertex| -> Vec<Q> {
        let mut d: Vec<Option<Q>> = vec![None; base];
        d[s] = Some(Q::zero());
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            let dx = d[x].clone().unwrap();
            for (y, c) in &adj[x] {
                if d[*y].is_none() {
                    d[*y] = Some(&dx + c);
                    stack.push(*y);
                }
            }
        }
        d.into_iter().map(Option::unwrap).collect()
    };
    let group_of = |x: Vertex| if x < (k + 1) * n { Some(x / n) } else { None };

    let mut b = Builder::new(base);
    for a in 0..base {
        let d = dist_from(a);
        for c in a + 1..base {
            let mut cost = d[c].clone();
            if group_of(a).is_some() && group_of(a) == group_of(c) {
                cost -= xi;
            }
            b.edge(a, c, cost);
        }
    }
    let groups: Vec<Vec<Vertex>> = (0..=k).map(|i| (0..n).map(|j| uid(i, j)).collect()).collect();
    for g in &groups {
        b.group(g);
    }
    Ok(GluttonousInstance {
        instance: b.build()?,
        groups,
        tree_edges,
    })
}

/// Closed forms: (gluttonous cost, tree cost).
pub fn gluttonous_costs(n: usize, k: usize, xi: &Q) -> (Q, Q) {
    let nm1 = qi(n as i64 - 1);
    let greedy = &nm1 * (qi(1i64 << (k + 3)) - qi(4) - qi(k as i64 + 1) * xi);
    let tree = qi(n as i64) * (qi(3) * qi(1i64 << k) - qi(1));
    (greedy, tree)
}

/// Seeded connected graph: a random spanning tree plus each other vertex pair
/// with probability `density`. Costs are halves in `[1, 10]`.
pub fn gen_random(n: usize, density: &Q, seed: u64) -> Result<Instance> {
    if n < 2 {
        return Err(range_err("n", n));
    }
    if *density < Q::zero() || *density > Q::one() {
        return Err(range_err("density", fmt_q(density)));
    }
    let p = to_f64(density);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut present = vec![vec![false; n]; n];
    let mut pairs: Vec<(Vertex, Vertex)> = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        present[u][v] = true;
    }
    for u in 0..n {
        for v in u + 1..n {
            if !present[u][v] && (density.is_one() || rng.gen_bool(p)) {
                present[u][v] = true;
            }
        }
    }
    let mut es = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if present[u][v] {
                es.push((u, v, q(rng.gen_range(2..=20), 2)));
            }
        }
    }
    let mut vs: Vec<Vertex> = (0..n).collect();
    vs.shuffle(&mut rng);
    let count = rng.gen_range(1..=n / 2);
    for c in 0..count {
        pairs.push((vs[2 * c], vs[2 * c + 1]));
    }
    Instance::from_edges(n, &es)?.with_pairs(&pairs)
}

/// Like [`gen_random`] but with at most `max_edges` edges (at least a spanning tree).
pub fn gen_random_capped(n: usize, max_edges: usize, seed: u64) -> Result<Instance> {
    if n < 2 {
        return Err(range_err("n", n));
    }
    if max_edges < n - 1 {
        return Err(range_err("max_edges", max_edges));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut es: Vec<(Vertex, Vertex, Q)> = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        es.push((u, v, q(rng.gen_range(2..=20), 2)));
    }
    let extra = rng.gen_range(0..=max_edges - (n - 1));
    for _ in 0..extra {
        let u = rng.gen_range(0..n);
        let mut v = rng.gen_range(0..n - 1);
        if v >= u {
            v += 1;
        }
        es.push((u.min(v), u.max(v), q(rng.gen_range(2..=20), 2)));
    }
    let mut vs: Vec<Vertex> = (0..n).collect();
    vs.shuffle(&mut rng);
    let count = rng.gen_range(1..=n / 2);
    let pairs: Vec<(Vertex, Vertex)> = (0..count).map(|c| (vs[2 * c], vs[2 * c + 1])).collect();
    Instance::from_edges(n, &es)?.with_pairs(&pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::run_legacy;
    use crate::graph::{parse_instance, serialize_instance, shortest_path};

    #[test]
    fn wheel_shape() {
        let w = gen_wheel(&q(1, 100)).unwrap();
        assert_eq!(w.n, 5);
        assert_eq!(w.m(), 8);
        assert_eq!(w.demand_pairs(), vec![(0, 2), (1, 3)]);
        assert!(gen_wheel(&qi(1)).is_err());
    }

    #[test]
    fn wheel_round_trips() {
        let w = gen_wheel(&q(1, 100)).unwrap();
        assert_eq!(parse_instance(&serialize_instance(&w)).unwrap(), w);
    }

    #[test]
    fn grid_legacy_closed_form() {
        let xi = q(1, 100);
        for (n, m) in [(2, 2), (3, 2), (4, 4), (3, 5)] {
            let inst = gen_grid(n, m, &xi).unwrap();
            let out = run_legacy(&inst).unwrap();
            assert_eq!(out.forest.cost(&inst).unwrap(), grid_costs(n, m, &xi).0, "n={n} m={m}");
        }
    }

    #[test]
    fn binary_shape() {
        let b = gen_binary(2, &q(1, 100)).unwrap();
        assert_eq!(b.graph.n, 7);
        assert_eq!(b.terminals, vec![3, 4, 5, 6]);
        assert_eq!(b.graph.edge(0).unwrap().cost, q(1, 2));
        assert_eq!(b.graph.edge(2).unwrap().cost, qi(1));
        assert_eq!(b.graph.m(), 6 + 3);
    }

    #[test]
    fn horseshoe_direct_edge() {
        let h = gen_horseshoe(3, 3, &q(1, 100)).unwrap();
        let (c, p) = shortest_path(&h.instance, h.v, h.u).unwrap().unwrap();
        assert_eq!(c, qi(2));
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn gluttonous_tree_cost() {
        for n in 2..=4 {
            for k in 1..=4 {
                let g = gen_gluttonous(n, k, &q(1, 1000)).unwrap();
                assert_eq!(g.tree_cost(), gluttonous_costs(n, k, &Q::zero()).1);
            }
        }
    }

    #[test]
    fn random_is_deterministic_and_dense() {
        let a = gen_random(7, &q(1, 3), 11).unwrap();
        let b = gen_random(7, &q(1, 3), 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(gen_random(6, &qi(1), 3).unwrap().m(), 15);
        let c = gen_random_capped(8, 14, 5).unwrap();
        assert!(c.m() <= 14);
    }
}
