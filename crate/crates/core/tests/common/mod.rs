#![allow(dead_code)]

use steiner_forest::local_search::{find_valuable_boost, LocalSearchResult};
use steiner_forest::verify::{check_refinement, trace_invariants};
use steiner_forest::{run_shadow, Instance, LegacyOutcome, Q};

/// Everything that must hold after a legacy run followed by a local search
/// started from its fingerprint.
pub fn pipeline_failures(inst: &Instance, legacy: &LegacyOutcome, ls: &LocalSearchResult, beta: &Q) -> Vec<String> {
    let mut bad = Vec::new();
    for (name, trace) in [("legacy", &legacy.trace), ("boosted", &ls.outcome.trace)] {
        bad.extend(trace_invariants(inst, trace).into_iter().map(|m| format!("{name}: {m}")));
    }
    match run_shadow(inst, &legacy.fingerprint) {
        Ok((forest, trace)) => {
            if forest != legacy.forest || trace.ledger != legacy.trace.ledger || trace.events != legacy.trace.events {
                bad.push("shadow run differs from legacy".into());
            }
        }
        Err(e) => bad.push(format!("shadow run failed: {e}")),
    }
    if !check_refinement(&legacy.trace, &ls.outcome.trace) {
        bad.push("legacy does not refine the boosted run".into());
    }
    let y_legacy = legacy.trace.ledger.total();
    if ls.total_win != &y_legacy - &ls.outcome.y_base {
        bad.push("total win differs from legacy growth minus final base growth".into());
    }
    if ls.total_loss != ls.outcome.y_add {
        bad.push("total loss differs from final additional growth".into());
    }
    if &ls.outcome.y_base + &ls.outcome.y_add != ls.outcome.trace.ledger.total() {
        bad.push("y_base + y_add differs from the ledger".into());
    }
    if ls.boosts.iter().any(|b| !b.eval.is_valuable(beta)) {
        bad.push("an applied boost is not valuable".into());
    }
    match find_valuable_boost(inst, &legacy.fingerprint, &ls.t_star, &ls.outcome, beta) {
        Ok(None) => {}
        Ok(Some(b)) => bad.push(format!("valuable boost left at vertex {}", b.0.action.vertex)),
        Err(e) => bad.push(format!("rescan failed: {e}")),
    }
    bad
}
