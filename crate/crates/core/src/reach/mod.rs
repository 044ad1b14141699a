//! Reachability analysis and the unitary-versus-remote optimization campaign.

pub mod campaign;
pub mod coverage;
pub mod gates;
pub mod search;
pub mod trial;

pub use campaign::{
    run_campaign, run_campaign_with_pairs, Accounting, CampaignConfig, CampaignOutcome, CampaignSummary,
};
pub use coverage::{reachable_set_coverage, SphereGrid};
pub use gates::{composed_gate, gate_u0, gate_u1, GateFamily, GateFamilyKind, ParamRange};
pub use search::{maximize, SearchConfig, SearchResult};
pub use trial::{fidelity, optimize_remote, optimize_unitary, Protocol, TrialResult, TrialSpec};
