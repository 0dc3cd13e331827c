//! Boost-based local search over the boosted moat growing execution.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::engine::{run_boosted, sentinel, BoostedOutcome, EventKind, SetKey};
use crate::error::{Error, Result};
use crate::graph::{Fingerprint, Forest, Instance, Vertex};
use crate::rational::{fmt_q, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoostAction {
    pub vertex: Vertex,
    pub until: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoostEvaluation {
    pub win: Q,
    pub loss: Q,
}

impl BoostEvaluation {
    pub fn is_valuable(&self, beta: &Q) -> bool {
        self.win >= (Q::one() + beta) * &self.loss
    }

    /// Zero win and zero loss: the boost leaves total growth unchanged.
    pub fn is_noop(&self) -> bool {
        self.win.is_zero() && self.loss.is_zero()
    }
}

#[derive(Clone, Debug)]
pub struct AppliedBoost {
    pub action: BoostAction,
    pub eval: BoostEvaluation,
}

#[derive(Clone, Debug)]
pub struct LocalSearchResult {
    pub forest: Forest,
    pub t_star: Fingerprint,
    pub y_b: BTreeMap<SetKey, Q>,
    pub total_win: Q,
    pub total_loss: Q,
    pub iterations: usize,
    pub boosts: Vec<AppliedBoost>,
    /// y_base of the first boosted run, with t_star = t
    pub initial_y_base: Q,
    /// the final boosted execution
    pub outcome: BoostedOutcome,
}

pub(crate) fn check_unit_interval(name: &'static str, x: &Q) -> Result<()> {
    if *x <= Q::zero() || *x >= Q::one() {
        return Err(Error::Range {
            name,
            value: fmt_q(x),
        });
    }
    Ok(())
}

/// Times at which `vertex`'s component, grown without a deadline, merges
/// with another active set, restricted to times after `t_star[vertex]`.
pub fn candidate_boosts(inst: &Instance, t: &[Q], t_star: &[Q], vertex: Vertex) -> Result<Vec<Q>> {
    inst.check_vertex(vertex)?;
    let mut ts = t_star.to_vec();
    ts[vertex] = sentinel(inst);
    let out = run_boosted(inst, t, &ts)?;
    let mut times: Vec<Q> = Vec::new();
    for ev in &out.trace.events {
        if let EventKind::Merge {
            a,
            b,
            a_active,
            b_active,
            ..
        } = &ev.kind
        {
            let other_active = if a.binary_search(&vertex).is_ok() {
                *b_active
            } else if b.binary_search(&vertex).is_ok() {
                *a_active
            } else {
                continue;
            };
            if other_active && ev.t > t_star[vertex] && times.last() != Some(&ev.t) {
                times.push(ev.t.clone());
            }
        }
    }
    times.truncate(inst.n);
    Ok(times)
}

fn evaluate_against(
    inst: &Instance,
    t: &[Q],
    t_star: &[Q],
    base: &BoostedOutcome,
    action: &BoostAction,
) -> Result<(BoostEvaluation, BoostedOutcome)> {
    inst.check_vertex(action.vertex)?;
    if action.until < t_star[action.vertex] {
        return Err(Error::Precondition(format!(
            "boost of vertex {} ends before its current deadline",
            action.vertex
        )));
    }
    let mut ts = t_star.to_vec();
    ts[action.vertex] = action.until.clone();
    let next = run_boosted(inst, t, &ts)?;
    let eval = BoostEvaluation {
        win: &base.y_base - &next.y_base,
        loss: &next.y_add - &base.y_add,
    };
    Ok((eval, next))
}

/// Win and loss of raising `t_star[action.vertex]` to `action.until`.
pub fn evaluate_boost(inst: &Instance, t: &[Q], t_star: &[Q], action: &BoostAction) -> Result<BoostEvaluation> {
    let base = run_boosted(inst, t, t_star)?;
    Ok(evaluate_against(inst, t, t_star, &base, action)?.0)
}

/// The lexicographically smallest valuable `(vertex, time)` candidate, if any.
pub fn find_valuable_boost(
    inst: &Instance,
    t: &[Q],
    t_star: &[Q],
    base: &BoostedOutcome,
    beta: &Q,
) -> Result<Option<(AppliedBoost, BoostedOutcome)>> {
    for v in 0..inst.n {
        for until in candidate_boosts(inst, t, t_star, v)? {
            let action = BoostAction { vertex: v, until };
            let (eval, next) = evaluate_against(inst, t, t_star, base, &action)?;
            if eval.is_valuable(beta) && !eval.is_noop() {
                return Ok(Some((AppliedBoost { action, eval }, next)));
            }
        }
    }
    Ok(None)
}

/// Applies valuable boosts until none remains.
pub fn local_search(inst: &Instance, t: &[Q], beta: &Q) -> Result<LocalSearchResult> {
    check_unit_interval("beta", beta)?;
    let mut t_star = t.to_vec();
    let mut current = run_boosted(inst, t, &t_star)?;
    let initial_y_base = current.y_base.clone();
    let mut boosts = Vec::new();
    while let Some((applied, next)) = find_valuable_boost(inst, t, &t_star, &current, beta)? {
        t_star[applied.action.vertex] = applied.action.until.clone();
        boosts.push(applied);
        current = next;
    }
    Ok(LocalSearchResult {
        forest: current.forest.clone(),
        t_star,
        y_b: current.y_b.clone(),
        total_win: &initial_y_base - &current.y_base,
        total_loss: current.y_add.clone(),
        iterations: boosts.len(),
        boosts,
        initial_y_base,
        outcome: current,
    })
}
