//! The linear Cauchy problem with datum |x|^{-β}.

mod envelope;
mod positivity;
mod profile;
mod riesz;

pub use envelope::{envelope_constants, upper_envelope, EnvelopeConstants};
pub use positivity::{
    beta_0, certify_positivity, certify_theorem11, negativity_witness, scan_beta_threshold, scan_grid, scan_verdict,
    Method, NegativityWitness, PositivityReport, PsiTable, Theorem11Report, ThresholdScan, Verdict, SCAN_MAX,
    SCAN_MIN, SCAN_POINTS, SCAN_TOL,
};
pub use profile::{
    a_limit, a_tilde, c_const, linear_solution, profile_estimate, profile_value, recurrence_extra_term, recurrence_residual,
    BetaRange, SelfSimilarProfile,
};
pub use riesz::{riesz_smoothing, RadialDensity};

pub(crate) use profile::scaled_profile;
