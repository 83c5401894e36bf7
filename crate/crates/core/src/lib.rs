//! Multipartite entanglement from the quadratic generators of the Segre ideal.
//!
//! Pure states are box-shape tensors of amplitudes ([`tensor::BoxTensor`]).
//! A state is fully separable exactly when every 2x2 minor about every slot
//! vanishes ([`segre::segre_residual`]). The squared minors summed over all
//! slots give the measure `E`; summed over all index-swap classes they give
//! `F` ([`measures`]). Mixed states are handled by a convex-roof search over
//! pure-state ensembles ([`roof::roof_f`]).

pub mod cli;
pub mod error;
pub mod exec;
pub mod measures;
pub mod roof;
pub mod segre;
pub mod tensor;

pub use error::{Error, Result};
pub use exec::Execution;
pub use measures::{
    bipartite_concurrence_oracle, measure_e, measure_f, MeasureConfig, MeasureReport,
};
pub use roof::{
    eigen_ensemble, ensemble_from_isometry, roof_f, wootters_oracle, RoofConfig, RoofEstimate,
};
pub use segre::{
    check_partition_commutativity, enumerate_perm_classes, enumerate_segre_generators,
    evaluate_minor, evaluate_perm_minor, segre_residual, t_variety_residual, MembershipReport,
    MinorSpec, PermClass,
};
pub use tensor::{
    flat_index, make_state, named_state, random_state, reduced_purity, segre_embed, BoxTensor,
    Decomposition, DensityMatrix, Dims, NamedState, RandomKind, SampledState,
};
