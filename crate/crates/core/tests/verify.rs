use steiner_forest::generators::{gen_horseshoe, gen_random, gen_random_capped, gen_wheel};
use steiner_forest::local_search::local_search;
use steiner_forest::rational::q;
use steiner_forest::solvers::exact_opt;
use steiner_forest::verify::*;
use steiner_forest::*;

#[test]
fn claw_holds_on_random_instances() {
    let beta = q(1, 10);
    for seed in 0..12u64 {
        let inst = gen_random(6 + (seed as usize % 5), &q(2, 5), seed).unwrap();
        let leg = run_legacy(&inst).unwrap();
        let ls = local_search(&inst, &leg.fingerprint, &beta).unwrap();
        let full = check_claw(&inst, &ls, &beta, ClawScope::Full).unwrap();
        assert!(full.is_empty(), "seed {seed}: {:?}", full[0]);
        let sampled = check_claw(&inst, &ls, &beta, ClawScope::Sample { samples: 50, seed }).unwrap();
        assert!(sampled.is_empty());
    }
}

#[test]
fn claw_full_scope_is_capped() {
    let inst = gen_random(11, &q(1, 2), 3).unwrap();
    let leg = run_legacy(&inst).unwrap();
    let ls = local_search(&inst, &leg.fingerprint, &q(1, 10)).unwrap();
    assert!(matches!(check_claw(&inst, &ls, &q(1, 10), ClawScope::Full), Err(Error::Capacity(_))));
}

#[test]
fn assignments_bound_growth() {
    let beta = q(1, 10);
    for seed in 0..25u64 {
        let n = 3 + (seed as usize % 6);
        let inst = gen_random_capped(n, 12, seed).unwrap();
        let (_, opt) = exact_opt(&inst).unwrap();
        let leg = run_legacy(&inst).unwrap();
        let pr = compute_priorities(&inst, &leg.fingerprint);
        let r = compute_assignment(&inst, &leg.trace, &leg.fingerprint, &opt, &pr, AssignmentMode::PrefixTime).unwrap();
        assert!(leg.trace.ledger.total() <= r.total());
        assert!(r.is_prefix_time());
        let comp = opt.components(&inst).unwrap();
        for c in 0..n {
            let assigned: Q = (0..n).filter(|&v| comp[v] == c).map(|v| &r.r[v]).sum();
            let tree: Q = inst.edges.iter().filter(|e| opt.contains(e.id) && comp[e.u] == c).map(|e| &e.cost).sum();
            assert!(assigned <= tree, "seed {seed}");
        }
        for v in 0..n {
            let per: Q = r.per_set.iter().filter(|((_, x), _)| *x == v).map(|(_, y)| y).sum();
            assert_eq!(per, r.r[v]);
        }

        let ls = local_search(&inst, &leg.fingerprint, &beta).unwrap();
        let trace = &ls.outcome.trace;
        let ex = compute_assignment(&inst, trace, &leg.fingerprint, &opt, &pr, AssignmentMode::Exclusive).unwrap();
        let pre = compute_assignment(&inst, trace, &leg.fingerprint, &opt, &pr, AssignmentMode::PrefixTime).unwrap();
        assert_eq!(ex.total(), ls.outcome.y_base);
        for (set, y_b) in &ls.outcome.y_b {
            assert_eq!(&ex.set_total(set), y_b);
        }
        assert!((0..n).all(|v| ex.r[v] <= pre.r[v]));
    }
}

#[test]
fn horseshoe_priorities_follow_pair_order_on_ties() {
    let hs = gen_horseshoe(2, 3, &q(1, 100)).unwrap();
    let leg = run_legacy(&hs.instance).unwrap();
    let pr = compute_priorities(&hs.instance, &leg.fingerprint);
    // everything is satisfied in the final merge, so the top pair ties with the rows
    let top = leg.fingerprint.iter().max().unwrap();
    assert_eq!(&leg.fingerprint[hs.u], top);
    assert_eq!(&leg.fingerprint[hs.v], top);
    assert!(pr.higher(hs.v, hs.u));
    for w in (0..hs.instance.n).filter(|&w| w != hs.u && w != hs.v && &leg.fingerprint[w] == top) {
        assert!(pr.higher(w, hs.v));
    }
}

#[test]
fn priorities_respect_fingerprint() {
    for seed in 0..20u64 {
        let inst = gen_random(7, &q(1, 2), seed).unwrap();
        let leg = run_legacy(&inst).unwrap();
        let pr = compute_priorities(&inst, &leg.fingerprint);
        for a in 0..inst.n {
            for b in 0..inst.n {
                if leg.fingerprint[a] > leg.fingerprint[b] {
                    assert!(pr.higher(a, b));
                }
            }
        }
    }
}

#[test]
fn refinement_detects_corruption() {
    let inst = gen_wheel(&q(1, 100)).unwrap();
    let leg = run_legacy(&inst).unwrap();
    let ls = local_search(&inst, &leg.fingerprint, &q(1, 10)).unwrap();
    assert!(check_refinement(&leg.trace, &ls.outcome.trace));

    let mut broken = ls.outcome.trace.clone();
    let at = broken
        .events
        .iter()
        .rposition(|e| matches!(e.kind, EventKind::Merge { .. }))
        .unwrap();
    let EventKind::Merge { merged, .. } = broken.events[at].kind.clone() else { unreachable!() };
    let moved = merged[0];
    if let EventKind::Merge { merged, .. } = &mut broken.events[at].kind {
        merged.retain(|&x| x != moved);
    }
    broken.events.insert(
        at + 1,
        Event {
            t: broken.events[at].t.clone(),
            kind: EventKind::Merge {
                edge: usize::MAX,
                a: vec![],
                b: vec![],
                merged: vec![moved],
                a_active: true,
                b_active: true,
            },
        },
    );
    assert!(!check_refinement(&leg.trace, &broken));
    assert!(!check_refinement(&ls.outcome.trace, &broken));
}
