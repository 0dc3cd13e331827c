//! Checkers over finished traces: priorities and assignments, the claw
//! inequality, and refinement between two executions.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{MoatTrace, SetKey, Snapshot};
use crate::error::{Error, Result};
use crate::graph::{all_pairs, check_feasible, Forest, Instance, Vertex};
use crate::local_search::LocalSearchResult;
use crate::rational::Q;

/// `rank[v]` is the position of `v` in ascending priority.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriorityOrder {
    pub rank: Vec<usize>,
}

impl PriorityOrder {
    pub fn higher(&self, a: Vertex, b: Vertex) -> bool {
        self.rank[a] > self.rank[b]
    }
}

/// Sorts by `(t+_v, smaller id of the pair, v is the larger id)`.
pub fn compute_priorities(inst: &Instance, legacy_fp: &[Q]) -> PriorityOrder {
    let mut order: Vec<Vertex> = (0..inst.n).collect();
    order.sort_by(|&a, &b| {
        let key = |v: Vertex| (&legacy_fp[v], v.min(inst.pair[v]), v > inst.pair[v]);
        key(a).cmp(&key(b))
    });
    let mut rank = vec![0; inst.n];
    for (i, v) in order.into_iter().enumerate() {
        rank[v] = i;
    }
    PriorityOrder { rank }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AssignmentMode {
    /// every representative receives the full growth
    PrefixTime,
    /// representatives split the growth evenly
    Exclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub r: Vec<Q>,
    pub per_set: BTreeMap<(SetKey, Vertex), Q>,
    /// half-open time intervals during which each vertex received a share
    pub intervals: Vec<Vec<(Q, Q)>>,
}

impl Assignment {
    pub fn total(&self) -> Q {
        self.r.iter().sum()
    }

    pub fn set_total(&self, set: &SetKey) -> Q {
        self.per_set
            .range((set.clone(), 0)..=(set.clone(), usize::MAX))
            .map(|(_, x)| x)
            .sum()
    }

    /// Each vertex receives on one interval `[0, x)`, up to touching pieces.
    pub fn is_prefix_time(&self) -> bool {
        self.intervals.iter().all(|iv| {
            let mut end = Q::zero();
            for (a, b) in iv {
                if *a != end {
                    return false;
                }
                end = b.clone();
            }
            true
        })
    }
}

fn has_boundary(inst: &Instance, set: &[Vertex]) -> bool {
    inst.edges
        .iter()
        .any(|e| set.binary_search(&e.u).is_ok() != set.binary_search(&e.v).is_ok())
}

/// Growth intervals `(start, end, set)` of every growing set, in time order.
fn growth_intervals(inst: &Instance, trace: &MoatTrace) -> Vec<(Q, Q, SetKey)> {
    let snaps = trace.snapshots(inst.n);
    let mut out = Vec::new();
    for (i, s) in snaps.iter().enumerate() {
        let end = match snaps.get(i + 1) {
            Some(next) => next.time.clone(),
            None => trace.end_time.clone(),
        };
        if end <= s.time {
            continue;
        }
        for (set, active) in &s.components {
            if *active && has_boundary(inst, set) {
                out.push((s.time.clone(), end.clone(), set.clone()));
            }
        }
    }
    out
}

/// Replays the growth of `trace` and hands it to the representatives of each
/// base-phase set, where the base phase of `v` is `tau < t_plus[v]`.
pub fn compute_assignment(
    inst: &Instance,
    trace: &MoatTrace,
    t_plus: &[Q],
    opt: &Forest,
    priorities: &PriorityOrder,
    mode: AssignmentMode,
) -> Result<Assignment> {
    if trace.activity.len() != inst.n || t_plus.len() != inst.n || priorities.rank.len() != inst.n {
        return Err(Error::Precondition("trace does not match the instance".into()));
    }
    if !check_feasible(inst, opt)? {
        return Err(Error::Precondition("reference forest is not feasible".into()));
    }
    let comp = opt.components(inst)?;
    let mut cuts: Vec<Q> = t_plus.to_vec();
    cuts.sort();
    cuts.dedup();

    let mut r = vec![Q::zero(); inst.n];
    let mut per_set: BTreeMap<(SetKey, Vertex), Q> = BTreeMap::new();
    let mut intervals: Vec<Vec<(Q, Q)>> = vec![Vec::new(); inst.n];
    for (start, end, set) in growth_intervals(inst, trace) {
        let mut pieces = vec![start.clone()];
        pieces.extend(cuts.iter().filter(|c| **c > start && **c < end).cloned());
        pieces.push(end);
        for w in pieces.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let mut best: BTreeMap<usize, Vertex> = BTreeMap::new();
            for &v in set.iter().filter(|&&v| t_plus[v] > *a) {
                let slot = best.entry(comp[v]).or_insert(v);
                if priorities.higher(v, *slot) {
                    *slot = v;
                }
            }
            if best.is_empty() {
                continue;
            }
            let len = b - a;
            let share = match mode {
                AssignmentMode::PrefixTime => len,
                AssignmentMode::Exclusive => len / Q::from_integer(best.len().into()),
            };
            for &v in best.values() {
                r[v] += &share;
                *per_set.entry((set.clone(), v)).or_insert_with(Q::zero) += &share;
                match intervals[v].last_mut() {
                    Some(last) if last.1 == *a => last.1 = b.clone(),
                    _ => intervals[v].push((a.clone(), b.clone())),
                }
            }
        }
    }
    Ok(Assignment { r, per_set, intervals })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClawViolation {
    pub triple: [Vertex; 3],
    pub q: Vertex,
    pub tau: Q,
    pub tau_all: Q,
    pub bound: Q,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClawScope {
    /// every triple against every `q`; at most 10 vertices
    Full,
    Sample { samples: usize, seed: u64 },
}

fn component_of(snap: &Snapshot, v: Vertex) -> (&SetKey, bool) {
    let (k, a) = snap
        .components
        .iter()
        .find(|(k, _)| k.binary_search(&v).is_ok())
        .expect("components cover every vertex");
    (k, *a)
}

/// `(tau, tau')` for a triple that connects actively, `None` otherwise.
fn claw_times(snaps: &[Snapshot], tri: [Vertex; 3]) -> Option<(Q, Q)> {
    let mut tau: Option<Q> = None;
    for s in snaps {
        let sets: Vec<(&SetKey, bool)> = tri.iter().map(|&x| component_of(s, x)).collect();
        let same = |i: usize, j: usize| sets[i].0 == sets[j].0;
        if tau.is_none() && (same(0, 1) || same(0, 2) || same(1, 2)) {
            tau = Some(s.time.clone());
        }
        if same(0, 1) && same(0, 2) {
            return Some((tau.unwrap(), s.time.clone()));
        }
        if sets.iter().any(|(_, active)| !active) {
            return None;
        }
    }
    None
}

/// Tests `tau + tau' <= (d(q,u)+d(q,v)+d(q,w))/2 + beta*min(...)/2` on the
/// final boosted execution of a finished local search.
pub fn check_claw(
    inst: &Instance,
    ls: &LocalSearchResult,
    beta: &Q,
    scope: ClawScope,
) -> Result<Vec<ClawViolation>> {
    let n = inst.n;
    let trace = &ls.outcome.trace;
    if trace.activity.len() != n || ls.t_star.len() != n {
        return Err(Error::Precondition("trace does not match the instance".into()));
    }
    let snaps = trace.snapshots(n);
    let d = all_pairs(inst);
    let two = Q::from_integer(2.into());
    let check = |tri: [Vertex; 3], q: Vertex, times: &(Q, Q)| -> Option<ClawViolation> {
        let ds: Vec<&Q> = tri.iter().map(|&x| d[q][x].as_ref()).collect::<Option<_>>()?;
        let sum: Q = ds.iter().copied().sum();
        let min = ds.iter().copied().min().unwrap();
        let bound = (sum + beta * min) / &two;
        let lhs = &times.0 + &times.1;
        (lhs > bound).then(|| ClawViolation {
            triple: tri,
            q,
            tau: times.0.clone(),
            tau_all: times.1.clone(),
            bound,
        })
    };

    let mut out = Vec::new();
    match scope {
        ClawScope::Full => {
            if n > 10 {
                return Err(Error::Capacity(format!("full claw enumeration on {n} > 10 vertices")));
            }
            for u in 0..n {
                for v in u + 1..n {
                    for w in v + 1..n {
                        let tri = [u, v, w];
                        if let Some(times) = claw_times(&snaps, tri) {
                            out.extend((0..n).filter_map(|q| check(tri, q, &times)));
                        }
                    }
                }
            }
        }
        ClawScope::Sample { samples, seed } => {
            if n < 3 {
                return Ok(out);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let idx = sample(&mut rng, n, 4.min(n));
                let mut tri = [idx.index(0), idx.index(1), idx.index(2)];
                tri.sort_unstable();
                let q = if n > 3 { idx.index(3) } else { tri[0] };
                if let Some(times) = claw_times(&snaps, tri) {
                    out.extend(check(tri, q, &times));
                }
            }
        }
    }
    Ok(out)
}

fn state_at(snaps: &[Snapshot], t: &Q) -> usize {
    snaps.partition_point(|s| s.time <= *t).saturating_sub(1)
}

/// Whether every component and every active set of `small` lies inside a
/// component, respectively an active set, of `large` at every event time.
pub fn check_refinement(small: &MoatTrace, large: &MoatTrace) -> bool {
    let n = small.activity.len();
    if large.activity.len() != n {
        return false;
    }
    let (a, b) = (small.snapshots(n), large.snapshots(n));
    let mut times: Vec<Q> = a.iter().chain(&b).map(|s| s.time.clone()).collect();
    times.sort();
    times.dedup();
    times.into_iter().all(|t| {
        let (sa, sb) = (&a[state_at(&a, &t)], &b[state_at(&b, &t)]);
        let mut owner = vec![(usize::MAX, false); n];
        for (i, (set, active)) in sb.components.iter().enumerate() {
            for &v in set {
                owner[v] = (i, *active);
            }
        }
        sa.components.iter().all(|(set, active)| {
            let (i, big_active) = owner[set[0]];
            set.iter().all(|&v| owner[v].0 == i) && (!active || big_active)
        })
    })
}

/// Coloring conservation and the per-vertex 2x bound on a finished run.
/// Returns a description of every violated property.
pub fn trace_invariants(inst: &Instance, trace: &MoatTrace) -> Vec<String> {
    let mut bad = Vec::new();
    if trace.colored.len() != inst.m() || trace.activity.len() != inst.n {
        bad.push("trace does not match the instance".to_string());
        return bad;
    }
    for (i, e) in inst.edges.iter().enumerate() {
        let mut c = Q::zero();
        for (set, y) in &trace.ledger.y {
            if set.binary_search(&e.u).is_ok() != set.binary_search(&e.v).is_ok() {
                c += y;
            }
        }
        if c != trace.colored[i] {
            bad.push(format!("edge {}: colored {} but crossing growth {}", e.id, trace.colored[i], c));
        }
        if trace.colored[i] > e.cost {
            bad.push(format!("edge {}: colored beyond its cost", e.id));
        }
        if trace.forest_pre_prune.contains(e.id) && trace.colored[i] != e.cost {
            bad.push(format!("edge {}: forest edge not tight", e.id));
        }
    }
    let Ok(cost) = trace.forest.cost(inst) else {
        bad.push("forest has unknown edges".to_string());
        return bad;
    };
    let two = Q::from_integer(2.into());
    for v in 0..inst.n {
        let outside: Q = trace
            .ledger
            .y
            .iter()
            .filter(|(set, _)| set.binary_search(&v).is_err())
            .map(|(_, y)| y)
            .sum();
        if cost > &two * &outside {
            bad.push(format!("vertex {v}: cost {cost} above twice the growth avoiding it"));
        }
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_boosted, run_legacy};
    use crate::generators::gen_wheel;
    use crate::local_search::local_search;
    use crate::rational::{q, qi};

    fn single_pair() -> Instance {
        Instance::from_edges(2, &[(0, 1, qi(2))]).unwrap().with_pairs(&[(0, 1)]).unwrap()
    }

    #[test]
    fn priorities_follow_fingerprint_then_pair_order() {
        let inst = single_pair();
        let leg = run_legacy(&inst).unwrap();
        let p = compute_priorities(&inst, &leg.fingerprint);
        assert!(p.higher(1, 0));
        let inst = Instance::from_edges(3, &[(0, 1, qi(1)), (1, 2, qi(5))]).unwrap();
        let p = compute_priorities(&inst, &[qi(3), qi(1), qi(2)]);
        assert_eq!(p.rank, vec![2, 0, 1]);
    }

    #[test]
    fn single_pair_assignment() {
        let inst = single_pair();
        let leg = run_legacy(&inst).unwrap();
        let p = compute_priorities(&inst, &leg.fingerprint);
        let opt = Forest::from_ids([0]);
        let r = compute_assignment(&inst, &leg.trace, &leg.fingerprint, &opt, &p, AssignmentMode::PrefixTime)
            .unwrap();
        assert_eq!(r.r, vec![qi(1), qi(1)]);
        assert!(r.is_prefix_time());
        let ex = compute_assignment(&inst, &leg.trace, &leg.fingerprint, &opt, &p, AssignmentMode::Exclusive)
            .unwrap();
        assert_eq!(ex.r, vec![qi(1), qi(1)]);
    }

    #[test]
    fn infeasible_reference_rejected() {
        let inst = single_pair();
        let leg = run_legacy(&inst).unwrap();
        let p = compute_priorities(&inst, &leg.fingerprint);
        let bad = compute_assignment(&inst, &leg.trace, &leg.fingerprint, &Forest::new(), &p, AssignmentMode::PrefixTime);
        assert!(bad.is_err());
    }

    #[test]
    fn wheel_claw_holds() {
        let xi = q(1, 100);
        let inst = gen_wheel(&xi).unwrap();
        let leg = run_legacy(&inst).unwrap();
        let beta = q(1, 10);
        let ls = local_search(&inst, &leg.fingerprint, &beta).unwrap();
        assert!(check_claw(&inst, &ls, &beta, ClawScope::Full).unwrap().is_empty());
        let sampled = check_claw(&inst, &ls, &beta, ClawScope::Sample { samples: 200, seed: 7 }).unwrap();
        assert!(sampled.is_empty());
    }

    #[test]
    fn refinement_identity_and_boosted() {
        let inst = gen_wheel(&q(1, 100)).unwrap();
        let leg = run_legacy(&inst).unwrap();
        assert!(check_refinement(&leg.trace, &leg.trace));
        let ls = local_search(&inst, &leg.fingerprint, &q(1, 10)).unwrap();
        assert!(check_refinement(&leg.trace, &ls.outcome.trace));
        let same = run_boosted(&inst, &leg.fingerprint, &leg.fingerprint).unwrap();
        assert!(check_refinement(&leg.trace, &same.trace));
    }
}
