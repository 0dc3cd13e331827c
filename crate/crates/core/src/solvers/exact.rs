//! Exact optima for small instances: branch and bound over edges, a bitmask
//! brute force, Dreyfus-Wagner, and a tree DP for the binary family.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::generators::BinaryInstance;
use crate::graph::{check_feasible, dijkstra, Forest, Instance, ShortestPaths, Vertex};
use crate::rational::Q;

pub const MAX_ENUM_EDGES: usize = 20;
pub const MAX_DW_TERMINALS: usize = 14;

struct Bnb<'a> {
    inst: &'a Instance,
    best: Option<(Q, Vec<usize>)>,
}

impl Bnb<'_> {
    fn better(&self, cost: &Q, ids: &[usize]) -> bool {
        match &self.best {
            None => true,
            Some((c, b)) => cost < c || (cost == c && ids < b.as_slice()),
        }
    }

    fn go(&mut self, i: usize, label: &mut Vec<usize>, chosen: &mut Vec<usize>, cost: &Q) {
        if let Some((c, _)) = &self.best {
            if cost > c {
                return;
            }
        }
        let inst = self.inst;
        if i == inst.m() {
            let ok = (0..inst.n).all(|v| label[v] == label[inst.pair[v]]);
            if ok && self.better(cost, chosen) {
                self.best = Some((cost.clone(), chosen.clone()));
            }
            return;
        }
        let e = &inst.edges[i];
        let (lu, lv) = (label[e.u], label[e.v]);
        if lu != lv {
            let saved = label.clone();
            for l in label.iter_mut() {
                if *l == lv {
                    *l = lu;
                }
            }
            chosen.push(e.id);
            self.go(i + 1, label, chosen, &(cost + &e.cost));
            chosen.pop();
            *label = saved;
        }
        self.go(i + 1, label, chosen, cost);
    }
}

/// Minimum-cost feasible forest. Ties go to the lexicographically smallest
/// sorted edge-id list. Uses enumeration for `|E| <= 20`, otherwise
/// Dreyfus-Wagner over the terminals.
pub fn exact_opt(inst: &Instance) -> Result<(Q, Forest)> {
    if inst.m() <= MAX_ENUM_EDGES {
        return exact_opt_enumerate(inst);
    }
    steiner_forest_dw(inst)
}

pub fn exact_opt_enumerate(inst: &Instance) -> Result<(Q, Forest)> {
    if inst.m() > MAX_ENUM_EDGES {
        return Err(Error::Capacity(format!(
            "{} edges exceed the enumeration limit of {MAX_ENUM_EDGES}",
            inst.m()
        )));
    }
    let mut b = Bnb { inst, best: None };
    let mut label: Vec<usize> = (0..inst.n).collect();
    b.go(0, &mut label, &mut Vec::new(), &Q::zero());
    let (c, ids) = b.best.ok_or_else(|| {
        let (a, p) = inst.demand_pairs().into_iter().next().unwrap_or((0, 0));
        Error::Disconnected(a, p)
    })?;
    Ok((c, Forest::from_ids(ids)))
}

/// Optimum cost by trying every edge subset.
pub fn exact_opt_bruteforce(inst: &Instance) -> Result<Q> {
    let m = inst.m();
    if m > MAX_ENUM_EDGES {
        return Err(Error::Capacity(format!("{m} edges exceed the brute-force limit")));
    }
    let mut best: Option<Q> = None;
    for mask in 0u32..(1u32 << m) {
        let mut uf = UnionFind::<usize>::new(inst.n);
        let mut cost = Q::zero();
        for (i, e) in inst.edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                uf.union(e.u, e.v);
                cost += &e.cost;
            }
        }
        if best.as_ref().is_some_and(|b| cost >= *b) {
            continue;
        }
        if (0..inst.n).all(|v| uf.equiv(v, inst.pair[v])) {
            best = Some(cost);
        }
    }
    best.ok_or_else(|| {
        let (a, p) = inst.demand_pairs().into_iter().next().unwrap_or((0, 0));
        Error::Disconnected(a, p)
    })
}

#[derive(Clone)]
enum Choice {
    Leaf,
    Split(usize),
    Move(Vertex),
}

/// Dreyfus-Wagner table over a terminal list.
struct Dw<'a> {
    inst: &'a Instance,
    rows: Vec<ShortestPaths>,
    dp: Vec<Vec<Option<Q>>>,
    choice: Vec<Vec<Choice>>,
}

impl<'a> Dw<'a> {
    fn new(inst: &'a Instance, terms: &[Vertex]) -> Result<Self> {
        let k = terms.len();
        if k > MAX_DW_TERMINALS {
            return Err(Error::Capacity(format!(
                "{k} terminals exceed the dynamic-programming limit of {MAX_DW_TERMINALS}"
            )));
        }
        let n = inst.n;
        let adj = inst.adjacency();
        let rows: Vec<ShortestPaths> = (0..n).map(|s| dijkstra(inst, &adj, s)).collect();
        let full = 1usize << k;
        let mut dp: Vec<Vec<Option<Q>>> = vec![vec![None; n]; full];
        let mut choice: Vec<Vec<Choice>> = vec![vec![Choice::Leaf; n]; full];
        for (i, &t) in terms.iter().enumerate() {
            for v in 0..n {
                dp[1 << i][v] = rows[t].dist[v].clone();
                choice[1 << i][v] = if v == t { Choice::Leaf } else { Choice::Move(t) };
            }
        }
        for s in 1..full {
            if s.count_ones() < 2 {
                continue;
            }
            let low = s & s.wrapping_neg();
            for v in 0..n {
                let mut best: Option<(Q, usize)> = None;
                let rest = s ^ low;
                let mut sub = rest;
                loop {
                    // a = low | sub, a proper subset of s
                    let a = low | sub;
                    if a != s {
                        if let (Some(x), Some(y)) = (&dp[a][v], &dp[s ^ a][v]) {
                            let c = x + y;
                            if best.as_ref().is_none_or(|(b, _)| c < *b) {
                                best = Some((c, a));
                            }
                        }
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & rest;
                }
                if let Some((c, a)) = best {
                    dp[s][v] = Some(c);
                    choice[s][v] = Choice::Split(a);
                }
            }
            let snapshot = dp[s].clone();
            for v in 0..n {
                for u in 0..n {
                    if u == v {
                        continue;
                    }
                    if let (Some(x), Some(d)) = (&snapshot[u], &rows[u].dist[v]) {
                        let c = x + d;
                        if dp[s][v].as_ref().is_none_or(|b| c < *b) {
                            dp[s][v] = Some(c);
                            choice[s][v] = Choice::Move(u);
                        }
                    }
                }
            }
        }
        Ok(Dw {
            inst,
            rows,
            dp,
            choice,
        })
    }

    fn edges(&self, s: usize, v: Vertex, out: &mut BTreeSet<usize>) {
        match self.choice[s][v] {
            Choice::Leaf => {}
            Choice::Split(a) => {
                self.edges(a, v, out);
                self.edges(s ^ a, v, out);
            }
            Choice::Move(u) => {
                out.extend(self.rows[u].path_to(self.inst, v).unwrap());
                self.edges(s, u, out);
            }
        }
    }

    /// Cheapest tree spanning the terminals in `s`.
    fn tree(&self, s: usize, anchor: Vertex) -> Option<(Q, BTreeSet<usize>)> {
        let c = self.dp[s][anchor].clone()?;
        let mut ids = BTreeSet::new();
        self.edges(s, anchor, &mut ids);
        Some((c, ids))
    }
}

/// Minimum Steiner tree spanning `terminals` (pairs are ignored).
pub fn steiner_tree_opt(graph: &Instance, terminals: &[Vertex]) -> Result<(Q, Forest)> {
    let terms: Vec<Vertex> = terminals.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    for &t in &terms {
        graph.check_vertex(t)?;
    }
    if terms.len() < 2 {
        return Ok((Q::zero(), Forest::new()));
    }
    let dw = Dw::new(graph, &terms)?;
    let full = (1usize << terms.len()) - 1;
    let (c, ids) = dw
        .tree(full, terms[0])
        .ok_or(Error::Disconnected(terms[0], terms[terms.len() - 1]))?;
    let f = Forest { edge_ids: ids }.spanning_forest(graph)?;
    debug_assert_eq!(f.cost(graph).unwrap(), c);
    Ok((c, f))
}

/// Minimum Steiner forest via Dreyfus-Wagner trees and a DP over groupings of
/// demand pairs.
pub fn steiner_forest_dw(inst: &Instance) -> Result<(Q, Forest)> {
    let pairs = inst.demand_pairs();
    if pairs.is_empty() {
        return Ok((Q::zero(), Forest::new()));
    }
    let terms: Vec<Vertex> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    let dw = Dw::new(inst, &terms)?;
    let p = pairs.len();
    let term_mask = |pm: usize| -> usize {
        (0..p).filter(|i| pm >> i & 1 == 1).map(|i| 0b11 << (2 * i)).sum()
    };
    let mut f: Vec<Option<(Q, usize)>> = vec![None; 1 << p];
    f[0] = Some((Q::zero(), 0));
    for pm in 1..(1usize << p) {
        let low = pm & pm.wrapping_neg();
        let rest = pm ^ low;
        let mut sub = rest;
        loop {
            let g = low | sub;
            let tm = term_mask(g);
            let anchor = terms[tm.trailing_zeros() as usize];
            if let (Some(tc), Some((fc, _))) = (&dw.dp[tm][anchor], &f[pm ^ g]) {
                let c = tc + fc;
                if f[pm].as_ref().is_none_or(|(b, _)| c < *b) {
                    f[pm] = Some((c, g));
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    let full = (1usize << p) - 1;
    let (cost, _) = f[full].clone().ok_or(Error::Disconnected(pairs[0].0, pairs[0].1))?;
    let mut ids = BTreeSet::new();
    let mut pm = full;
    while pm != 0 {
        let (_, g) = f[pm].clone().unwrap();
        let tm = term_mask(g);
        let anchor = terms[tm.trailing_zeros() as usize];
        ids.extend(dw.tree(tm, anchor).unwrap().1);
        pm ^= g;
    }
    let forest = Forest { edge_ids: ids }.spanning_forest(inst)?;
    debug_assert!(check_feasible(inst, &forest).unwrap());
    Ok((cost, forest))
}

/// Port partition of a subtree: labels of (top vertex if used, leftmost leaf, rightmost leaf).
type PortKey = (Option<u8>, u8, u8);

fn canonical(labels: [Option<usize>; 3]) -> PortKey {
    let mut seen: Vec<usize> = Vec::new();
    let mut lab = |r: usize| -> u8 {
        match seen.iter().position(|&x| x == r) {
            Some(i) => i as u8,
            None => {
                seen.push(r);
                (seen.len() - 1) as u8
            }
        }
    };
    let x = labels[0].map(&mut lab);
    let l = lab(labels[1].unwrap());
    let r = lab(labels[2].unwrap());
    (x, l, r)
}

/// Exact Steiner tree cost on the binary family (leaves as terminals), by a DP
/// over subtrees whose only contacts with the rest are the top vertex and the
/// two extreme leaves.
pub fn binary_tree_opt(b: &BinaryInstance) -> Q {
    let g = &b.graph;
    let n = g.n;
    let first_leaf = (1usize << b.h) - 1;
    let tree_cost = |child: usize| g.edge(child - 1).unwrap().cost.clone();
    let link_cost = |leaf: usize| g.edge(n - 1 + (leaf - first_leaf)).unwrap().cost.clone();
    let rightmost = |mut x: usize| {
        while x < first_leaf {
            x = 2 * x + 2;
        }
        x
    };

    let mut table: Vec<BTreeMap<PortKey, Q>> = vec![BTreeMap::new(); n];
    let mut root_best: Option<Q> = None;
    for x in (0..n).rev() {
        if x >= first_leaf {
            table[x].insert((Some(0), 0, 0), Q::zero());
            continue;
        }
        let (a, c) = (2 * x + 1, 2 * x + 2);
        let (ca, cb, cl) = (tree_cost(a), tree_cost(c), link_cost(rightmost(a)));
        let mut out: BTreeMap<PortKey, Q> = BTreeMap::new();
        for (ka, va) in &table[a] {
            for (kb, vb) in &table[c] {
                for mask in 0u8..8 {
                    let (ea, eb, ec) = (mask & 1 == 1, mask & 2 == 2, mask & 4 == 4);
                    if (ea && ka.0.is_none()) || (eb && kb.0.is_none()) {
                        continue;
                    }
                    // nodes: 0 = x, 1..=3 = a's ports, 4..=6 = b's ports
                    let mut uf = UnionFind::<usize>::new(7);
                    let mut present = [false; 7];
                    for (off, k) in [(1usize, ka), (4usize, kb)] {
                        let labs = [k.0, Some(k.1), Some(k.2)];
                        for (i, li) in labs.iter().enumerate() {
                            if let Some(li) = li {
                                present[off + i] = true;
                                for (j, lj) in labs.iter().enumerate().take(i) {
                                    if lj == &Some(*li) {
                                        uf.union(off + i, off + j);
                                    }
                                }
                            }
                        }
                    }
                    present[0] = ea || eb;
                    let mut cost = va + vb;
                    let mut cyclic = false;
                    for (on, p, q, w) in [(ea, 0, 1, &ca), (eb, 0, 4, &cb), (ec, 3, 5, &cl)] {
                        if on {
                            cyclic |= !uf.union(p, q);
                            cost += w;
                        }
                    }
                    if cyclic {
                        continue;
                    }
                    let roots: BTreeSet<usize> = (0..7).filter(|&i| present[i]).map(|i| uf.find(i)).collect();
                    if x == 0 && roots.len() == 1 && root_best.as_ref().is_none_or(|r| cost < *r) {
                        root_best = Some(cost.clone());
                    }
                    let ports = [present[0].then_some(0), Some(2), Some(6)];
                    let port_roots: BTreeSet<usize> = ports.iter().flatten().map(|&i| uf.find(i)).collect();
                    if roots != port_roots {
                        continue;
                    }
                    let key = canonical(ports.map(|p| p.map(|i| uf.find(i))));
                    if out.get(&key).is_none_or(|cur| cost < *cur) {
                        out.insert(key, cost);
                    }
                }
            }
        }
        table[x] = out;
    }
    root_best.expect("the leaf chain alone spans every leaf")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_binary, gen_random_capped};
    use crate::rational::{q, qi};

    #[test]
    fn parallel_edges() {
        let inst = Instance::new(
            2,
            vec![
                crate::graph::Edge::new(0, 0, 1, qi(5)),
                crate::graph::Edge::new(1, 0, 1, qi(3)),
            ],
            vec![1, 0],
        )
        .unwrap();
        let (c, f) = exact_opt(&inst).unwrap();
        assert_eq!(c, qi(3));
        assert_eq!(f, Forest::from_ids([1]));
    }

    #[test]
    fn strategies_agree_on_small_random() {
        for seed in 0..30 {
            let inst = gen_random_capped(5, 5, seed).unwrap();
            let (c, f) = exact_opt(&inst).unwrap();
            assert_eq!(c, exact_opt_bruteforce(&inst).unwrap(), "seed {seed}");
            assert_eq!(c, steiner_forest_dw(&inst).unwrap().0, "seed {seed}");
            assert_eq!(f.cost(&inst).unwrap(), c);
            assert!(check_feasible(&inst, &f).unwrap());
        }
    }

    #[test]
    fn binary_dp_matches_dreyfus_wagner() {
        for h in 1..=3 {
            let b = gen_binary(h, &q(1, 100)).unwrap();
            let (c, f) = steiner_tree_opt(&b.graph, &b.terminals).unwrap();
            assert_eq!(binary_tree_opt(&b), c, "h={h}");
            assert_eq!(f.cost(&b.graph).unwrap(), c);
        }
        let b1 = gen_binary(1, &q(1, 100)).unwrap();
        assert_eq!(binary_tree_opt(&b1), q(199, 100));
    }

    #[test]
    fn capacity_guard() {
        let inst = gen_random_capped(12, 30, 1).unwrap();
        if inst.m() > MAX_ENUM_EDGES {
            assert!(exact_opt_enumerate(&inst).is_err());
        }
    }
}
