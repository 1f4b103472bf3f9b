//! Cut-based MC and MD optimization passes with optional tracing into an
//! e-graph.

mod balance;
mod flow;
mod resub;
mod rewrite;
pub(crate) mod work;

pub use balance::esop_balance;
pub use flow::{run_flow, FlowOrder};
pub use resub::{resubstitute, MAX_WINDOW_LEAVES};
pub use rewrite::cut_rewrite;

use crate::cuts::MAX_CUT_SIZE;
use crate::error::{Error, Result};
use crate::xag::{NodeId, XagNetwork};

/// Which candidates a pass records into the e-graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordPolicy {
    /// The applied replacement of each node.
    BestOnly,
    /// Every candidate built, including ones that were not applied.
    All,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PassConfig {
    pub k_rewrite: usize,
    pub k_balance: usize,
    pub priority_limit: usize,
    /// Policy of cut rewriting and resubstitution.
    pub mc_policy: RecordPolicy,
    /// Policy of ESOP balancing.
    pub md_policy: RecordPolicy,
    pub max_flow_rounds: usize,
}

impl Default for PassConfig {
    fn default() -> Self {
        PassConfig {
            k_rewrite: 4,
            k_balance: 6,
            priority_limit: 12,
            mc_policy: RecordPolicy::BestOnly,
            md_policy: RecordPolicy::All,
            max_flow_rounds: 16,
        }
    }
}

impl PassConfig {
    pub fn validate(&self) -> Result<()> {
        for k in [self.k_rewrite, self.k_balance] {
            if !(2..=MAX_CUT_SIZE).contains(&k) {
                return Err(Error::CutSize(k));
            }
        }
        Ok(())
    }
}

/// One applied replacement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GainReport {
    pub pass: &'static str,
    pub node: NodeId,
    /// AND gates saved, or levels saved for balancing.
    pub gain: i64,
}

#[derive(Clone, Debug)]
pub struct PassOutcome {
    pub network: XagNetwork,
    pub reports: Vec<GainReport>,
}
