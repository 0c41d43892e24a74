//! Long-time behaviour: absorbing ball, sup-norm bound on the attractor,
//! sampled attractors and their semidistance, and the energy functional.

mod attractor;
pub(crate) mod lyapunov;

pub use attractor::{
    certify_absorbing, certify_linf_bound, initial_conditions, sample_attractor, sample_from,
    semicontinuity_experiment, semidistance, semidistance_of, AbsorbingReport, AttractorSample,
    LinfReport, SemicontinuityReport, SemicontinuityRow, SemicontinuitySetup, ABSORBING_SLACK,
    BALL_MARGIN, CONTAINMENT_SLACK, LINF_SLACK, MIN_TRANSIENT,
};
pub use lyapunov::{check_h6, lyapunov_g, lyapunov_rate, H6Report};

pub use crate::dynamics::DiagnosticsSeries;
