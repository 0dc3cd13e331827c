use steiner_forest::generators::{gen_random, gen_random_capped};
use steiner_forest::rational::{q, qi};
use steiner_forest::solvers::exact::{exact_opt_bruteforce, exact_opt_enumerate, steiner_forest_dw};
use steiner_forest::solvers::*;
use steiner_forest::*;

#[test]
fn exact_solvers_agree() {
    for seed in 0..40u64 {
        let n = 3 + (seed as usize % 5);
        let inst = gen_random_capped(n, 11, seed).unwrap();
        let (bnb, f) = exact_opt_enumerate(&inst).unwrap();
        assert_eq!(f.cost(&inst).unwrap(), bnb);
        assert!(check_feasible(&inst, &f).unwrap());
        assert_eq!(exact_opt_bruteforce(&inst).unwrap(), bnb, "seed {seed}");
        assert_eq!(steiner_forest_dw(&inst).unwrap().0, bnb, "seed {seed}");
    }
}

#[test]
fn legacy_and_main_within_bounds() {
    let params = MainParameters::table2();
    let factor = qi(2) - q(1, 100_000_000_000);
    for seed in 100..160u64 {
        let n = 3 + (seed as usize % 6);
        let inst = gen_random_capped(n, 14, seed).unwrap();
        let (opt, _) = exact_opt(&inst).unwrap();
        let out = solve_main(&inst, &params).unwrap();
        let legacy = out.legacy.forest.cost(&inst).unwrap();
        assert!(legacy <= qi(2) * &opt, "seed {seed}");
        assert!(out.forest.cost(&inst).unwrap() <= &factor * &opt, "seed {seed}");
        for f in [&out.legacy.forest, &out.ls.forest, &out.xt.forest, &out.ap.forest, &out.forest] {
            assert!(check_feasible(&inst, f).unwrap(), "seed {seed}");
        }
        assert_eq!(out.report.costs[&out.report.chosen], out.forest.cost(&inst).unwrap());
        assert!(out.report.costs.values().all(|c| *c >= out.report.costs[&out.report.chosen]));
    }
}

#[test]
fn steiner_tree_driver_bound() {
    let bound = q(1943, 1000);
    for seed in 0..40u64 {
        let n = 4 + (seed as usize % 4);
        let inst = gen_random(n, &q(1, 2), seed).unwrap();
        let terminals: Vec<Vertex> = inst.terminals().into_iter().take(4).collect();
        let st = solve_steiner_tree(&inst, &terminals, &default_tree_beta()).unwrap();
        let (opt, _) = steiner_tree_opt(&inst, &terminals).unwrap();
        let cost = st.forest.cost(&inst).unwrap();
        assert!(cost <= &bound * &opt, "seed {seed}");
        let comp = st.forest.components(&inst).unwrap();
        assert!(terminals.iter().all(|&t| comp[t] == comp[terminals[0]]), "seed {seed}");
    }
}

#[test]
fn gluttonous_is_feasible() {
    for seed in 0..30u64 {
        let inst = gen_random(6, &q(1, 3), seed).unwrap();
        let out = gluttonous(&inst).unwrap();
        assert!(check_feasible(&inst, &out.forest).unwrap());
        assert!(out.forest.is_acyclic(&inst).unwrap());
    }
}
