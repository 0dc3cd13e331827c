//! Gluttonous baseline: repeatedly connect the two closest unsatisfied vertices
//! that lie in different components, then treat them as linked at zero cost.

use std::collections::BTreeSet;

use num_traits::Zero;
use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::graph::{all_pairs, dijkstra, Edge, Forest, Instance, Vertex};
use crate::rational::Q;

#[derive(Clone, Debug)]
pub struct GluttonousStep {
    pub u: Vertex,
    pub v: Vertex,
    pub dist: Q,
    pub path: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct GluttonousOutcome {
    pub forest: Forest,
    pub steps: Vec<GluttonousStep>,
}

fn relax(d: &mut [Vec<Option<Q>>], a: Vertex, b: Vertex) {
    let n = d.len();
    let col_a: Vec<Option<Q>> = (0..n).map(|x| d[x][a].clone()).collect();
    let col_b: Vec<Option<Q>> = (0..n).map(|x| d[x][b].clone()).collect();
    for x in 0..n {
        for y in 0..n {
            let via = |p: &Option<Q>, q: &Option<Q>| match (p, q) {
                (Some(p), Some(q)) => Some(p + q),
                _ => None,
            };
            for c in [via(&col_a[x], &d[b][y]), via(&col_b[x], &d[a][y])].into_iter().flatten() {
                if d[x][y].as_ref().is_none_or(|cur| c < *cur) {
                    d[x][y] = Some(c);
                }
            }
        }
    }
}

pub fn gluttonous(inst: &Instance) -> Result<GluttonousOutcome> {
    let n = inst.n;
    let mut d = all_pairs(inst);
    for (a, b) in inst.demand_pairs() {
        if d[a][b].is_none() {
            return Err(Error::Disconnected(a, b));
        }
    }
    let mut uf = UnionFind::<usize>::new(n);
    let mut links: Vec<(Vertex, Vertex)> = Vec::new();
    let mut used: BTreeSet<usize> = BTreeSet::new();
    let mut steps = Vec::new();
    let first_link = inst.max_edge_id().map_or(0, |m| m + 1);
    loop {
        let unsat: Vec<Vertex> = (0..n).filter(|&v| !uf.equiv(v, inst.pair[v])).collect();
        if unsat.is_empty() {
            break;
        }
        let mut best: Option<(Q, Vertex, Vertex)> = None;
        for (i, &x) in unsat.iter().enumerate() {
            for &y in &unsat[i + 1..] {
                if uf.equiv(x, y) {
                    continue;
                }
                if let Some(dxy) = &d[x][y] {
                    if best.as_ref().is_none_or(|(b, _, _)| dxy < b) {
                        best = Some((dxy.clone(), x, y));
                    }
                }
            }
        }
        let (dist, u, v) = best.expect("a demand pair is reachable");
        let mut edges = inst.edges.clone();
        for (i, &(a, b)) in links.iter().enumerate() {
            edges.push(Edge::new(first_link + i, a, b, Q::zero()));
        }
        let ctx = Instance::new(n, edges, inst.pair.clone())?;
        let sp = dijkstra(&ctx, &ctx.adjacency(), u);
        debug_assert_eq!(sp.dist[v].as_ref(), Some(&dist));
        let path_ids = sp.path_to(&ctx, v).unwrap();
        let mut x = v;
        while let Some((_, p)) = sp.pred[x] {
            uf.union(x, p);
            x = p;
        }
        uf.union(u, v);
        let real: Vec<usize> = path_ids.into_iter().filter(|&id| id < first_link).collect();
        used.extend(real.iter().copied());
        steps.push(GluttonousStep {
            u,
            v,
            dist,
            path: real,
        });
        links.push((u, v));
        relax(&mut d, u, v);
    }
    let forest = Forest { edge_ids: used }.spanning_forest(inst)?;
    Ok(GluttonousOutcome { forest, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    #[test]
    fn single_pair_is_shortest_path() {
        let inst = Instance::from_edges(3, &[(0, 1, qi(1)), (1, 2, qi(1)), (0, 2, qi(3))])
            .unwrap()
            .with_pairs(&[(0, 2)])
            .unwrap();
        let out = gluttonous(&inst).unwrap();
        assert_eq!(out.forest, Forest::from_ids([0, 1]));
        assert_eq!(out.steps.len(), 1);
    }
}
