//! Autarkic pairs: detect groups that grew alone for long, connect them by a
//! shortest path, and let legacy moat growing handle the rest.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};

use crate::engine::{run_legacy, MoatTrace, SetKey};
use crate::error::{Error, Result};
use crate::graph::{dijkstra, Edge, Forest, Instance, Vertex};
use crate::local_search::check_unit_interval;
use crate::rational::Q;

/// Members of `s` whose pair lies outside `s`.
pub fn unsatisfied(inst: &Instance, s: &[Vertex]) -> SetKey {
    s.iter()
        .copied()
        .filter(|&v| s.binary_search(&inst.pair[v]).is_err())
        .collect()
}

/// `{pair[v] : v in s}`, sorted.
pub fn pair_set(inst: &Instance, s: &[Vertex]) -> SetKey {
    let mut p: Vec<Vertex> = s.iter().map(|&v| inst.pair[v]).collect();
    p.sort_unstable();
    p
}

/// Lazily computed single-source distances.
pub struct DistanceCache<'a> {
    inst: &'a Instance,
    adj: Vec<Vec<(usize, Vertex)>>,
    rows: HashMap<Vertex, crate::graph::ShortestPaths>,
}

impl<'a> DistanceCache<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        DistanceCache {
            inst,
            adj: inst.adjacency(),
            rows: HashMap::new(),
        }
    }

    fn row(&mut self, s: Vertex) -> &crate::graph::ShortestPaths {
        let (inst, adj) = (self.inst, &self.adj);
        self.rows.entry(s).or_insert_with(|| dijkstra(inst, adj, s))
    }

    pub fn dist(&mut self, u: Vertex, v: Vertex) -> Option<Q> {
        self.row(u).dist[v].clone()
    }

    pub fn path(&mut self, u: Vertex, v: Vertex) -> Option<(Q, Vec<usize>)> {
        let inst = self.inst;
        let row = self.row(u);
        let d = row.dist[v].clone()?;
        Some((d, row.path_to(inst, v)?))
    }

    /// Largest pair distance inside `s`.
    pub fn dmax(&mut self, s: &[Vertex]) -> Result<Q> {
        let mut best = Q::zero();
        for &v in s {
            let p = self.inst.pair[v];
            let d = self.dist(v, p).ok_or(Error::Disconnected(v.min(p), v.max(p)))?;
            if d > best {
                best = d;
            }
        }
        Ok(best)
    }
}

/// `Y[Unsatisfied(S)] += y[S]` over the ledger, without the empty key.
pub fn accumulate_y(trace: &MoatTrace, inst: &Instance) -> BTreeMap<SetKey, Q> {
    let mut y: BTreeMap<SetKey, Q> = BTreeMap::new();
    for (s, g) in &trace.ledger.y {
        let key = unsatisfied(inst, s);
        if !key.is_empty() {
            *y.entry(key).or_insert_with(Q::zero) += g;
        }
    }
    y
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutarkicPair {
    pub s: SetKey,
    pub pair_s: SetKey,
    pub chosen: Vertex,
    pub path: Vec<usize>,
    pub path_cost: Q,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AutarkicSelection {
    pub pairs: Vec<AutarkicPair>,
    /// ids of the synthetic zero edges, in the augmented instance
    pub zero_edges: Vec<usize>,
}

impl AutarkicSelection {
    /// Sum of `Y_S + Y_Pair(S)` over the selected pairs.
    pub fn selected_y(&self, y: &BTreeMap<SetKey, Q>) -> Q {
        let get = |k: &SetKey| y.get(k).cloned().unwrap_or_else(Q::zero);
        self.pairs.iter().map(|p| get(&p.s) + get(&p.pair_s)).sum()
    }
}

/// Visits keys in sorted order and selects `(S, Pair(S))` whenever
/// `(1+eta)(Y_S + Y_Pair(S)) > dmax(S)`.
pub fn select_autarkic_pairs(inst: &Instance, y: &BTreeMap<SetKey, Q>, eta: &Q) -> Result<AutarkicSelection> {
    check_unit_interval("eta", eta)?;
    let mut dc = DistanceCache::new(inst);
    let mut processed: BTreeSet<SetKey> = BTreeSet::new();
    let mut sel = AutarkicSelection::default();
    let mut next_id = inst.max_edge_id().map_or(0, |m| m + 1);
    for (s, ys) in y {
        if !processed.insert(s.clone()) {
            continue;
        }
        let ps = pair_set(inst, s);
        let yp = y.get(&ps).cloned().unwrap_or_else(Q::zero);
        if (Q::one() + eta) * (ys + &yp) > dc.dmax(s)? {
            processed.insert(ps.clone());
            let chosen = s[0];
            let (path_cost, path) = dc.path(chosen, inst.pair[chosen]).expect("dmax checked reachability");
            sel.pairs.push(AutarkicPair {
                s: s.clone(),
                pair_s: ps,
                chosen,
                path,
                path_cost,
            });
            sel.zero_edges.push(next_id);
            next_id += 1;
        }
    }
    Ok(sel)
}

/// The instance with one zero edge per selected pair.
pub fn augmented_instance(inst: &Instance, sel: &AutarkicSelection) -> Result<Instance> {
    let mut edges = inst.edges.clone();
    for (p, &id) in sel.pairs.iter().zip(&sel.zero_edges) {
        edges.push(Edge::new(id, p.chosen, inst.pair[p.chosen], Q::zero()));
    }
    Instance::new(inst.n, edges, inst.pair.clone())
}

#[derive(Clone, Debug)]
pub struct AutarkicOutcome {
    pub forest: Forest,
    pub y: BTreeMap<SetKey, Q>,
    pub selection: AutarkicSelection,
    pub augmented: Instance,
    /// legacy forest on the augmented instance, synthetic edges included
    pub legacy_forest: Forest,
}

/// Selects autarkic pairs from a boosted trace, then reruns legacy on the
/// augmented graph. The union of shortcut paths and the legacy forest is
/// reduced to a spanning forest of itself.
pub fn autarkic_solve(inst: &Instance, trace: &MoatTrace, eta: &Q) -> Result<AutarkicOutcome> {
    let y = accumulate_y(trace, inst);
    let selection = select_autarkic_pairs(inst, &y, eta)?;
    let augmented = augmented_instance(inst, &selection)?;
    let legacy = run_legacy(&augmented)?;
    let mut ids: BTreeSet<usize> = legacy
        .forest
        .edge_ids
        .iter()
        .copied()
        .filter(|id| !selection.zero_edges.contains(id))
        .collect();
    for p in &selection.pairs {
        ids.extend(p.path.iter().copied());
    }
    let forest = Forest { edge_ids: ids }.spanning_forest(inst)?;
    Ok(AutarkicOutcome {
        forest,
        y,
        selection,
        augmented,
        legacy_forest: legacy.forest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn pair_with_cost(c: i64) -> Instance {
        Instance::from_edges(2, &[(0, 1, qi(c))])
            .unwrap()
            .with_pairs(&[(0, 1)])
            .unwrap()
    }

    #[test]
    fn y_of_single_pair() {
        let inst = pair_with_cost(2);
        let tr = run_legacy(&inst).unwrap().trace;
        let y = accumulate_y(&tr, &inst);
        assert_eq!(y.len(), 2);
        assert_eq!(y[&vec![0]], qi(1));
        assert_eq!(y[&vec![1]], qi(1));
    }

    #[test]
    fn selection_threshold() {
        let mut y = BTreeMap::new();
        y.insert(vec![0], qi(1));
        y.insert(vec![1], qi(1));
        let sel = select_autarkic_pairs(&pair_with_cost(2), &y, &q(1, 2)).unwrap();
        assert_eq!(sel.pairs.len(), 1);
        assert_eq!(sel.pairs[0].pair_s, vec![1]);
        assert_eq!(sel.zero_edges, vec![1]);
        let sel = select_autarkic_pairs(&pair_with_cost(4), &y, &q(1, 2)).unwrap();
        assert!(sel.pairs.is_empty());
        assert!(select_autarkic_pairs(&pair_with_cost(4), &y, &qi(2)).is_err());
    }

    #[test]
    fn no_selection_falls_back_to_legacy() {
        let inst = Instance::from_edges(3, &[(0, 1, qi(2)), (1, 2, qi(2)), (0, 2, qi(3))])
            .unwrap()
            .with_pairs(&[(0, 2)])
            .unwrap();
        let mut tr = run_legacy(&inst).unwrap().trace;
        tr.ledger.y.clear();
        let out = autarkic_solve(&inst, &tr, &q(1, 2)).unwrap();
        assert!(out.selection.pairs.is_empty());
        assert_eq!(out.forest, run_legacy(&inst).unwrap().forest);
    }
}
