//! Extension: turn base-phase growth into potentials and extend a fingerprint.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::engine::{run_extended, SetKey};
use crate::error::Result;
use crate::graph::{Fingerprint, Instance};
use crate::local_search::check_unit_interval;
use crate::rational::Q;

/// `g[v]` = sum of `y_b[S]` over the sets whose highest-`t_plus` member is `v`
/// (smallest id on ties).
pub fn extension_weights(inst: &Instance, t_plus: &[Q], y_b: &BTreeMap<SetKey, Q>) -> Vec<Q> {
    let mut g = vec![Q::zero(); inst.n];
    for (s, y) in y_b {
        if *y <= Q::zero() {
            continue;
        }
        let mut best = s[0];
        for &v in &s[1..] {
            if t_plus[v] > t_plus[best] {
                best = v;
            }
        }
        g[best] += y;
    }
    g
}

/// Extended run on `t_tilde` with potentials `epsilon * g`.
pub fn extend_with_weights(inst: &Instance, t_tilde: &[Q], g: &[Q], epsilon: &Q) -> Result<Fingerprint> {
    check_unit_interval("epsilon", epsilon)?;
    let pot: Vec<Q> = g.iter().map(|x| x * epsilon).collect();
    Ok(run_extended(inst, t_tilde, &pot)?.0)
}

pub fn extend(
    inst: &Instance,
    t_plus: &[Q],
    t_tilde: &[Q],
    y_b: &BTreeMap<SetKey, Q>,
    epsilon: &Q,
) -> Result<Fingerprint> {
    check_unit_interval("epsilon", epsilon)?;
    let g = extension_weights(inst, t_plus, y_b);
    extend_with_weights(inst, t_tilde, &g, epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_legacy, run_shadow};
    use crate::rational::{q, qi};

    #[test]
    fn single_pair_hand_simulation() {
        let inst = Instance::from_edges(2, &[(0, 1, qi(2))])
            .unwrap()
            .with_pairs(&[(0, 1)])
            .unwrap();
        let t = run_legacy(&inst).unwrap().fingerprint;
        let mut y_b = BTreeMap::new();
        y_b.insert(vec![0], qi(1));
        y_b.insert(vec![1], qi(1));
        let out = extend(&inst, &t, &t, &y_b, &q(1, 10)).unwrap();
        assert_eq!(out, vec![q(6, 5), q(6, 5)]);
    }

    #[test]
    fn zero_growth_matches_shadow() {
        let inst = Instance::from_edges(3, &[(0, 1, qi(2)), (1, 2, qi(3))])
            .unwrap()
            .with_pairs(&[(0, 2)])
            .unwrap();
        let t = run_legacy(&inst).unwrap().fingerprint;
        let out = extend(&inst, &t, &t, &BTreeMap::new(), &q(1, 2)).unwrap();
        assert_eq!(out, run_shadow(&inst, &t).unwrap().1.activity);
        assert!(extend(&inst, &t, &t, &BTreeMap::new(), &qi(0)).is_err());
    }

    #[test]
    fn argmax_ties_go_to_smallest_id() {
        let inst = Instance::from_edges(3, &[]).unwrap();
        let mut y_b = BTreeMap::new();
        y_b.insert(vec![0, 1, 2], qi(3));
        let g = extension_weights(&inst, &[qi(1), qi(2), qi(2)], &y_b);
        assert_eq!(g, vec![qi(0), qi(3), qi(0)]);
    }
}
