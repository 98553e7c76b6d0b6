//! Mobile conductance: the expected normalized contact flow out of a cut
//! after one move, minimized over cuts with `|S'| <= n/2`.

mod closed_form;
mod contact;
mod estimate;
mod scaling;

pub use closed_form::{
    disk_square_area, fr_closed_form, fr_contact_prob, fr_cross_pmf, fr_degree_pmf, fr_expected_cut_flow,
    square_any_neighbor_prob, square_pair_contact_prob, FrClosedForm,
};
pub use contact::meaningful_contact_prob;
pub use estimate::{
    bisection_cut, brute_force_conductance, cut_flow, estimate_conductance, BruteForceResult, ConductanceEstimate,
    Cut, CutKind, CutRule, SizeSummary, BRUTE_FORCE_MAX_NODES,
};
pub use scaling::{scaling_class, Regime, ScalingClass, ScalingTerm, SPARSE_LIMIT};
