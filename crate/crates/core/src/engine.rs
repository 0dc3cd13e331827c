//! Event-driven moat growing in four flavours: legacy, shadow, boosted and extended.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{Fingerprint, Forest, Instance, Vertex};
use crate::rational::{fmt_q_frac, Q};

/// Sorted vertex ids of a component.
pub type SetKey = Vec<Vertex>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventKind {
    Merge {
        edge: usize,
        a: SetKey,
        b: SetKey,
        merged: SetKey,
        a_active: bool,
        b_active: bool,
    },
    Deactivate(SetKey),
    PotentialExhausted(SetKey),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub t: Q,
    pub kind: EventKind,
}

/// Per-set growth. Only positive entries are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GrowthLedger {
    pub y: BTreeMap<SetKey, Q>,
    /// base-phase share, boosted runs only
    pub y_b: BTreeMap<SetKey, Q>,
}

impl GrowthLedger {
    pub fn total(&self) -> Q {
        self.y.values().sum()
    }

    pub fn total_base(&self) -> Q {
        self.y_b.values().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoatTrace {
    pub events: Vec<Event>,
    /// first deactivation time of each vertex
    pub activity: Vec<Q>,
    pub ledger: GrowthLedger,
    pub deactivated_sets: Vec<SetKey>,
    /// colored portion per edge, indexed like `Instance::edges`
    pub colored: Vec<Q>,
    pub forest_pre_prune: Forest,
    pub forest: Forest,
    pub end_time: Q,
}

/// Components and their activity on the half-open interval starting at `time`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapshot {
    pub time: Q,
    pub components: Vec<(SetKey, bool)>,
}

impl MoatTrace {
    /// Replays the events. Each snapshot is the state after every event at time
    /// `<= time` and holds until the next snapshot.
    pub fn snapshots(&self, n: usize) -> Vec<Snapshot> {
        let mut comps: BTreeMap<SetKey, bool> = (0..n).map(|v| (vec![v], true)).collect();
        let mut out: Vec<Snapshot> = Vec::new();
        let mut i = 0;
        let mut time = Q::zero();
        loop {
            while i < self.events.len() && self.events[i].t <= time {
                match &self.events[i].kind {
                    EventKind::Merge { a, b, merged, .. } => {
                        comps.remove(a);
                        comps.remove(b);
                        comps.insert(merged.clone(), true);
                    }
                    EventKind::Deactivate(s) => {
                        if let Some(f) = comps.get_mut(s) {
                            *f = false;
                        }
                    }
                    EventKind::PotentialExhausted(_) => {}
                }
                i += 1;
            }
            out.push(Snapshot {
                time: time.clone(),
                components: comps.iter().map(|(k, a)| (k.clone(), *a)).collect(),
            });
            if i >= self.events.len() {
                break;
            }
            time = self.events[i].t.clone();
        }
        out
    }

    /// Distinct event times, ascending.
    pub fn event_times(&self) -> Vec<Q> {
        let mut ts: Vec<Q> = self.events.iter().map(|e| e.t.clone()).collect();
        ts.dedup();
        ts
    }

    pub fn to_json(&self) -> Value {
        let set = |s: &SetKey| json!(s);
        let events: Vec<Value> = self
            .events
            .iter()
            .map(|e| match &e.kind {
                EventKind::Merge {
                    edge,
                    a,
                    b,
                    merged,
                    a_active,
                    b_active,
                } => json!({
                    "t": fmt_q_frac(&e.t),
                    "kind": "merge",
                    "edge": edge,
                    "sets": [set(a), set(b), set(merged)],
                    "active": [a_active, b_active],
                }),
                EventKind::Deactivate(s) => json!({
                    "t": fmt_q_frac(&e.t),
                    "kind": "deactivate",
                    "sets": [set(s)],
                }),
                EventKind::PotentialExhausted(s) => json!({
                    "t": fmt_q_frac(&e.t),
                    "kind": "potential_exhausted",
                    "sets": [set(s)],
                }),
            })
            .collect();
        let ledger: Vec<Value> = self
            .ledger
            .y
            .iter()
            .map(|(k, y)| {
                let yb = self.ledger.y_b.get(k).cloned().unwrap_or_else(Q::zero);
                json!({"set": k, "y": fmt_q_frac(y), "y_b": fmt_q_frac(&yb)})
            })
            .collect();
        json!({
            "events": events,
            "ledger": ledger,
            "forest": self.forest.edge_ids.iter().collect::<Vec<_>>(),
            "deactivated": self.deactivated_sets,
        })
    }
}

#[derive(Clone, Debug)]
pub enum Mode<'a> {
    Legacy,
    Shadow(&'a [Q]),
    Boosted { t: &'a [Q], t_star: &'a [Q] },
    Extended { t_in: &'a [Q], potential: &'a [Q] },
}

/// Everything a single run produces.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub trace: MoatTrace,
    /// first time each vertex shares a component with its pair (legacy only)
    pub join_time: Vec<Option<Q>>,
}

struct Comp {
    members: Vec<Vertex>,
    active: bool,
    y: Q,
    y_b: Q,
    potential: Q,
}

fn check_len(inst: &Instance, t: &[Q], name: &'static str) -> Result<()> {
    if t.len() != inst.n {
        return Err(Error::Precondition(format!(
            "{name} has {} entries for {} vertices",
            t.len(),
            inst.n
        )));
    }
    if t.iter().any(|x| *x < Q::zero()) {
        return Err(Error::Precondition(format!("{name} has a negative entry")));
    }
    Ok(())
}

fn min_opt(a: &mut Option<Q>, b: Q) {
    match a {
        Some(x) if *x <= b => {}
        _ => *a = Some(b),
    }
}

/// Runs the engine in the given mode, including pruning.
pub fn run(inst: &Instance, mode: &Mode) -> Result<RunOutput> {
    let n = inst.n;
    match mode {
        Mode::Legacy => {}
        Mode::Shadow(t) => check_len(inst, t, "fingerprint")?,
        Mode::Boosted { t, t_star } => {
            check_len(inst, t, "t")?;
            check_len(inst, t_star, "t_star")?;
            if let Some(v) = (0..n).find(|&v| t_star[v] < t[v]) {
                return Err(Error::Precondition(format!("t_star[{v}] < t[{v}]")));
            }
        }
        Mode::Extended { t_in, potential } => {
            check_len(inst, t_in, "t_in")?;
            check_len(inst, potential, "potential")?;
        }
    }

    let max_over = |c: &Comp, t: &[Q]| -> Q {
        c.members
            .iter()
            .map(|&v| t[v].clone())
            .max()
            .unwrap_or_else(Q::zero)
    };
    let should_deactivate = |c: &Comp, tau: &Q| -> bool {
        match mode {
            Mode::Legacy => {
                let ms = &c.members;
                ms.iter().all(|&v| ms.binary_search(&inst.pair[v]).is_ok())
            }
            Mode::Shadow(t) => max_over(c, t) <= *tau,
            Mode::Boosted { t_star, .. } => max_over(c, t_star) <= *tau,
            Mode::Extended { t_in, .. } => c.potential.is_zero() && max_over(c, t_in) <= *tau,
        }
    };

    let mut comp_of: Vec<usize> = (0..n).collect();
    let mut comps: Vec<Option<Comp>> = (0..n)
        .map(|v| {
            Some(Comp {
                members: vec![v],
                active: true,
                y: Q::zero(),
                y_b: Q::zero(),
                potential: match mode {
                    Mode::Extended { potential, .. } => potential[v].clone(),
                    _ => Q::zero(),
                },
            })
        })
        .collect();
    let mut colored: Vec<Q> = vec![Q::zero(); inst.m()];
    let mut events: Vec<Event> = Vec::new();
    let mut activity: Vec<Option<Q>> = vec![None; n];
    let mut deactivated: Vec<SetKey> = Vec::new();
    let mut ledger = GrowthLedger::default();
    let mut forest = Forest::new();
    let mut join_time: Vec<Option<Q>> = (0..n)
        .map(|v| if inst.pair[v] == v { Some(Q::zero()) } else { None })
        .collect();
    let mut tau = Q::zero();

    let deactivation_scan = |comps: &mut Vec<Option<Comp>>,
                                 tau: &Q,
                                 events: &mut Vec<Event>,
                                 activity: &mut Vec<Option<Q>>,
                                 deactivated: &mut Vec<SetKey>| {
        for c in comps.iter_mut().flatten() {
            if c.active && should_deactivate(c, tau) {
                c.active = false;
                for &v in &c.members {
                    if activity[v].is_none() {
                        activity[v] = Some(tau.clone());
                    }
                }
                deactivated.push(c.members.clone());
                events.push(Event {
                    t: tau.clone(),
                    kind: EventKind::Deactivate(c.members.clone()),
                });
            }
        }
    };
    deactivation_scan(&mut comps, &tau, &mut events, &mut activity, &mut deactivated);

    loop {
        if !comps.iter().flatten().any(|c| c.active) {
            break;
        }
        let is_active = |cid: usize, comps: &Vec<Option<Comp>>| comps[cid].as_ref().unwrap().active;

        // crossing edges with at least one active side
        let mut crossing: Vec<(usize, u32)> = Vec::new();
        let mut has_boundary = vec![false; comps.len()];
        let mut delta: Option<Q> = None;
        for (ei, e) in inst.edges.iter().enumerate() {
            let (cu, cv) = (comp_of[e.u], comp_of[e.v]);
            if cu == cv {
                continue;
            }
            let mut sides = 0u32;
            for c in [cu, cv] {
                if is_active(c, &comps) {
                    sides += 1;
                    has_boundary[c] = true;
                }
            }
            if sides > 0 {
                crossing.push((ei, sides));
                min_opt(&mut delta, (&e.cost - &colored[ei]) / Q::from_integer(sides.into()));
            }
        }
        let delta_e_finite = delta.is_some();
        let thresholds = |t: &[Q], delta: &mut Option<Q>| {
            for x in t {
                if *x > tau {
                    min_opt(delta, x - &tau);
                }
            }
        };
        match mode {
            Mode::Legacy => {}
            Mode::Shadow(t) => thresholds(t, &mut delta),
            Mode::Boosted { t, t_star } => {
                thresholds(t, &mut delta);
                thresholds(t_star, &mut delta);
            }
            Mode::Extended { t_in, .. } => {
                thresholds(t_in, &mut delta);
                for c in comps.iter().flatten() {
                    if c.active && c.potential > Q::zero() && max_over(c, t_in) <= tau {
                        min_opt(&mut delta, c.potential.clone());
                    }
                }
            }
        }
        let delta = match delta {
            Some(d) => d,
            None => {
                debug_assert!(!delta_e_finite);
                if let Mode::Legacy = mode {
                    let c = comps.iter().flatten().find(|c| c.active).unwrap();
                    let v = c
                        .members
                        .iter()
                        .copied()
                        .find(|&v| c.members.binary_search(&inst.pair[v]).is_err())
                        .unwrap();
                    return Err(Error::Disconnected(v.min(inst.pair[v]), v.max(inst.pair[v])));
                }
                return Err(Error::Precondition("no event ahead of an active set".into()));
            }
        };

        // grow
        for &(ei, sides) in &crossing {
            colored[ei] += &delta * Q::from_integer(sides.into());
        }
        let tau_before = tau.clone();
        for (cid, slot) in comps.iter_mut().enumerate() {
            let Some(c) = slot else { continue };
            if !c.active {
                continue;
            }
            if has_boundary[cid] {
                c.y += &delta;
                if let Mode::Boosted { t, .. } = mode {
                    if c.members.iter().any(|&v| t[v] > tau_before) {
                        c.y_b += &delta;
                    }
                }
            }
            if let Mode::Extended { t_in, .. } = mode {
                if c.potential > Q::zero() && max_over(c, t_in) <= tau_before {
                    c.potential -= &delta;
                    if c.potential.is_zero() {
                        events.push(Event {
                            t: &tau_before + &delta,
                            kind: EventKind::PotentialExhausted(c.members.clone()),
                        });
                    }
                }
            }
        }
        tau += &delta;

        // merge scan, ascending edge id
        for (ei, e) in inst.edges.iter().enumerate() {
            let (cu, cv) = (comp_of[e.u], comp_of[e.v]);
            if cu == cv || colored[ei] != e.cost {
                continue;
            }
            let a = comps[cu].take().unwrap();
            let b = comps[cv].take().unwrap();
            for c in [&a, &b] {
                if c.y > Q::zero() {
                    ledger.y.insert(c.members.clone(), c.y.clone());
                }
                if c.y_b > Q::zero() {
                    ledger.y_b.insert(c.members.clone(), c.y_b.clone());
                }
            }
            if let Mode::Legacy = mode {
                for (x, other) in [(&a, &b), (&b, &a)] {
                    for &w in &x.members {
                        if join_time[w].is_none() && other.members.binary_search(&inst.pair[w]).is_ok() {
                            join_time[w] = Some(tau.clone());
                        }
                    }
                }
            }
            let mut members = a.members.clone();
            members.extend_from_slice(&b.members);
            members.sort_unstable();
            let new_id = comps.len();
            for &v in &members {
                comp_of[v] = new_id;
            }
            forest.edge_ids.insert(e.id);
            events.push(Event {
                t: tau.clone(),
                kind: EventKind::Merge {
                    edge: e.id,
                    a: a.members,
                    b: b.members,
                    merged: members.clone(),
                    a_active: a.active,
                    b_active: b.active,
                },
            });
            comps.push(Some(Comp {
                members,
                active: true,
                y: Q::zero(),
                y_b: Q::zero(),
                potential: a.potential + b.potential,
            }));
        }

        deactivation_scan(&mut comps, &tau, &mut events, &mut activity, &mut deactivated);
    }

    for c in comps.iter().flatten() {
        if c.y > Q::zero() {
            ledger.y.insert(c.members.clone(), c.y.clone());
        }
        if c.y_b > Q::zero() {
            ledger.y_b.insert(c.members.clone(), c.y_b.clone());
        }
    }

    let forest_pre_prune = forest.clone();
    let pruned = prune(inst, &forest, &deactivated);
    let activity = activity
        .into_iter()
        .map(|a| a.unwrap_or_else(|| tau.clone()))
        .collect();
    Ok(RunOutput {
        trace: MoatTrace {
            events,
            activity,
            ledger,
            deactivated_sets: deactivated,
            colored,
            forest_pre_prune,
            forest: pruned,
            end_time: tau,
        },
        join_time,
    })
}

/// Removes every forest edge that is the only forest edge cut by some
/// deactivated set, repeating until nothing changes.
pub fn prune(inst: &Instance, forest: &Forest, deactivated: &[SetKey]) -> Forest {
    let mut f = forest.clone();
    let mut mark = vec![false; inst.n];
    loop {
        let mut changed = false;
        for s in deactivated {
            for &v in s {
                mark[v] = true;
            }
            let mut cut = None;
            let mut count = 0;
            for &id in &f.edge_ids {
                let e = inst.edge(id).unwrap();
                if mark[e.u] != mark[e.v] {
                    count += 1;
                    cut = Some(id);
                    if count > 1 {
                        break;
                    }
                }
            }
            for &v in s {
                mark[v] = false;
            }
            if count == 1 {
                f.edge_ids.remove(&cut.unwrap());
                changed = true;
            }
        }
        if !changed {
            return f;
        }
    }
}

#[derive(Clone, Debug)]
pub struct LegacyOutcome {
    pub forest: Forest,
    pub fingerprint: Fingerprint,
    pub trace: MoatTrace,
}

/// Legacy moat growing. The fingerprint of `w` is the time `w` first shares a
/// component with its pair (0 for non-terminals).
pub fn run_legacy(inst: &Instance) -> Result<LegacyOutcome> {
    let out = run(inst, &Mode::Legacy)?;
    let fingerprint = out
        .join_time
        .into_iter()
        .map(|t| t.expect("every pair joins before termination"))
        .collect();
    Ok(LegacyOutcome {
        forest: out.trace.forest.clone(),
        fingerprint,
        trace: out.trace,
    })
}

pub fn run_shadow(inst: &Instance, t: &[Q]) -> Result<(Forest, MoatTrace)> {
    let out = run(inst, &Mode::Shadow(t))?;
    Ok((out.trace.forest.clone(), out.trace))
}

#[derive(Clone, Debug)]
pub struct BoostedOutcome {
    pub forest: Forest,
    pub y_base: Q,
    pub y_add: Q,
    pub y_b: BTreeMap<SetKey, Q>,
    pub trace: MoatTrace,
}

/// Boosted moat growing. Requires `t_star >= t` pointwise.
pub fn run_boosted(inst: &Instance, t: &[Q], t_star: &[Q]) -> Result<BoostedOutcome> {
    let out = run(inst, &Mode::Boosted { t, t_star })?;
    let tr = out.trace;
    let y_base = tr.ledger.total_base();
    let y_add = tr.ledger.total() - &y_base;
    Ok(BoostedOutcome {
        forest: tr.forest.clone(),
        y_base,
        y_add,
        y_b: tr.ledger.y_b.clone(),
        trace: tr,
    })
}

/// Extended moat growing. Returns the first deactivation time of every vertex.
pub fn run_extended(inst: &Instance, t_in: &[Q], potential: &[Q]) -> Result<(Fingerprint, MoatTrace)> {
    let out = run(inst, &Mode::Extended { t_in, potential })?;
    Ok((out.trace.activity.clone(), out.trace))
}

/// `1 + sum of all edge costs`, later than any meaningful event.
pub fn sentinel(inst: &Instance) -> Q {
    Q::one() + inst.total_cost()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn single_pair(c: i64) -> Instance {
        Instance::from_edges(2, &[(0, 1, qi(c))])
            .unwrap()
            .with_pairs(&[(0, 1)])
            .unwrap()
    }

    #[test]
    fn single_pair_legacy() {
        let out = run_legacy(&single_pair(3)).unwrap();
        assert_eq!(out.forest, Forest::from_ids([0]));
        assert_eq!(out.trace.ledger.total(), qi(3));
        assert_eq!(out.fingerprint, vec![q(3, 2), q(3, 2)]);
    }

    #[test]
    fn shadow_zero_is_empty() {
        let inst = single_pair(3);
        let (f, tr) = run_shadow(&inst, &[qi(0), qi(0)]).unwrap();
        assert!(f.is_empty());
        assert_eq!(tr.ledger.total(), qi(0));
    }

    #[test]
    fn shadow_one_sided() {
        let inst = Instance::from_edges(2, &[(0, 1, qi(100))]).unwrap();
        let (f, tr) = run_shadow(&inst, &[qi(5), qi(0)]).unwrap();
        assert!(f.is_empty());
        assert_eq!(tr.ledger.y.get(&vec![0]), Some(&qi(5)));
        assert_eq!(tr.colored[0], qi(5));
    }

    #[test]
    fn extended_isolated_vertex() {
        let inst = Instance::from_edges(1, &[]).unwrap();
        let (t, tr) = run_extended(&inst, &[qi(1)], &[q(1, 2)]).unwrap();
        assert_eq!(t, vec![q(3, 2)]);
        assert!(tr.ledger.y.is_empty());
    }

    #[test]
    fn extended_two_vertices_never_meet() {
        let inst = Instance::from_edges(2, &[(0, 1, qi(4))]).unwrap();
        let (t, tr) = run_extended(&inst, &[qi(1), qi(0)], &[qi(1), qi(0)]).unwrap();
        assert_eq!(t, vec![qi(2), qi(0)]);
        assert!(tr.forest_pre_prune.is_empty());
        assert_eq!(tr.colored[0], qi(2));
    }

    #[test]
    fn extended_single_pair() {
        let inst = single_pair(2);
        let (t, _) = run_extended(&inst, &[qi(1), qi(1)], &[q(1, 10), q(1, 10)]).unwrap();
        assert_eq!(t, vec![q(6, 5), q(6, 5)]);
    }

    #[test]
    fn disconnected_pair_is_an_error() {
        let inst = Instance::from_edges(3, &[(0, 1, qi(1))])
            .unwrap()
            .with_pairs(&[(0, 2)])
            .unwrap();
        assert_eq!(run_legacy(&inst).unwrap_err(), Error::Disconnected(0, 2));
    }

    #[test]
    fn boosted_requires_dominance() {
        let inst = single_pair(2);
        assert!(run_boosted(&inst, &[qi(1), qi(1)], &[qi(0), qi(1)]).is_err());
    }

    #[test]
    fn pruning_drops_dangling_steiner_edge() {
        // 0 - 1 - 2 with pair (0,1); vertex 2 is a non-terminal leaf
        let inst = Instance::from_edges(3, &[(0, 1, qi(2)), (1, 2, qi(1))])
            .unwrap()
            .with_pairs(&[(0, 1)])
            .unwrap();
        let out = run_legacy(&inst).unwrap();
        assert_eq!(out.forest, Forest::from_ids([0]));
    }

    #[test]
    fn snapshots_replay_merges() {
        let inst = single_pair(2);
        let out = run_legacy(&inst).unwrap();
        let snaps = out.trace.snapshots(2);
        assert_eq!(snaps.len(), 2);
        assert_eq!(snaps[0].components.len(), 2);
        assert_eq!(snaps[1].time, qi(1));
        assert_eq!(snaps[1].components, vec![(vec![0, 1], false)]);
    }
}
