//! Five-layer Sugeno fuzzy inference (the ANFIS forward pass).
//!
//! Layer 1 evaluates membership degrees, layer 2 multiplies them into rule
//! firing strengths (product T-norm), layer 3 normalises, layer 4 weights
//! each rule's affine consequent and layer 5 sums.

mod membership;
mod model;

pub use membership::MembershipFunction;
pub use model::{
    build_grid_model, init_from_data, AnfisModel, ConsequentCoeffs, ForwardTrace, FuzzyVariable, Rule,
    DEGENERATE_FIRING,
};
