//! The full pipeline: legacy, local search, extension, second local search and
//! autarkic pairs, keeping the cheapest forest.

use std::collections::BTreeMap;
use std::fmt;

use crate::autarkic::{autarkic_solve, AutarkicOutcome};
use crate::engine::{run_legacy, LegacyOutcome};
use crate::error::Result;
use crate::extension::extend;
use crate::graph::{Fingerprint, Forest, Instance};
use crate::local_search::{check_unit_interval, local_search, LocalSearchResult};
use crate::rational::{parse_q, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MainParameters {
    pub beta: Q,
    pub epsilon: Q,
    pub eta: Q,
}

impl MainParameters {
    pub fn table2() -> Self {
        MainParameters {
            beta: Q::new(1.into(), 10.into()),
            epsilon: parse_q("6495602330607721/18889465931478580854784").unwrap(),
            eta: Q::new(1.into(), 2.into()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_unit_interval("beta", &self.beta)?;
        check_unit_interval("epsilon", &self.epsilon)?;
        check_unit_interval("eta", &self.eta)
    }
}

impl Default for MainParameters {
    fn default() -> Self {
        Self::table2()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Choice {
    LS,
    XT,
    AP,
}

impl fmt::Display for Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Choice::LS => "LS",
            Choice::XT => "XT",
            Choice::AP => "AP",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub chosen: Choice,
    pub costs: BTreeMap<Choice, Q>,
}

/// All intermediate results of one pipeline run.
#[derive(Clone, Debug)]
pub struct MainOutcome {
    pub forest: Forest,
    pub report: SolveReport,
    pub legacy: LegacyOutcome,
    pub ls: LocalSearchResult,
    pub t_ext: Fingerprint,
    pub xt: LocalSearchResult,
    pub ap: AutarkicOutcome,
}

pub fn solve_main(inst: &Instance, params: &MainParameters) -> Result<MainOutcome> {
    params.validate()?;
    let legacy = run_legacy(inst)?;
    let t_plus = &legacy.fingerprint;
    let ls = local_search(inst, t_plus, &params.beta)?;
    let t_ext = extend(inst, t_plus, &ls.t_star, &ls.y_b, &params.epsilon)?;
    let xt = local_search(inst, &t_ext, &params.beta)?;
    let ap = autarkic_solve(inst, &ls.outcome.trace, &params.eta)?;

    let candidates = [(Choice::LS, &ls.forest), (Choice::XT, &xt.forest), (Choice::AP, &ap.forest)];
    let mut costs = BTreeMap::new();
    let mut best: Option<(Choice, Q)> = None;
    for (c, f) in candidates {
        let cost = f.cost(inst)?;
        if best.as_ref().is_none_or(|(_, b)| cost < *b) {
            best = Some((c, cost.clone()));
        }
        costs.insert(c, cost);
    }
    let chosen = best.unwrap().0;
    let forest = match chosen {
        Choice::LS => ls.forest.clone(),
        Choice::XT => xt.forest.clone(),
        Choice::AP => ap.forest.clone(),
    };
    Ok(MainOutcome {
        forest,
        report: SolveReport { chosen, costs },
        legacy,
        ls,
        t_ext,
        xt,
        ap,
    })
}
