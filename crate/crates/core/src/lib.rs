//! Entanglement combing: rate regions of bipartite entanglement that a
//! distinguished party (Alice, party 0) can hold with every other party
//! (the Bobs) after locally transforming a multipartite pure state.
//!
//! The pipeline is
//!
//! 1. [`qstate`]: a [`PureState`] on `m + 1` parties and its subset entropies,
//! 2. [`entropy_table`]: the entropy `S(B_T)` of every Bob subset `T`,
//! 3. [`region`]: the polytope `F′` spanned by merging-order corner points and
//!    the combing region `F = F′ ∩ {E >= 0}`, with membership, dimension and
//!    volume queries,
//! 4. [`ledger`]: entropy bookkeeping of the greedy comb and of the
//!    borrow-and-amplify breeding schedule,
//! 5. [`applications`]: LOCC rate lower bounds, overlap with an external rate
//!    region, and the region volume as a multipartite quantity.
//!
//! All entropies are in ebits (base-2 logarithms).

pub mod applications;
pub mod entropy_table;
pub mod error;
pub mod geometry;
pub mod io;
pub mod ledger;
pub mod lp;
pub mod qstate;
pub mod region;

pub use applications::{
    best_rate_over_parties, multipartite_volume_measure, rate_lower_bound, region_overlap,
    LinearConstraint, Overlap, RateBound,
};
pub use entropy_table::{
    build_table, check_strong_subadditivity, merging_cost, SsaReport, SubsetEntropyTable,
};
pub use error::{Error, Result};
pub use ledger::{
    breeding_schedule, caratheodory_decompose, greedy_comb, Branch, CaratheodoryDecomposition,
    CombStep, LedgerReport,
};
pub use qstate::{
    make_state, reduced_density, standard_state, von_neumann_entropy, Complex64, DensityMatrix,
    PartyLayout, PureState, StateKind,
};
pub use region::{
    build_region, corner_point, CombingRegion, EntanglementVector, Membership, MembershipMode,
    Violation,
};
