//! Radial cavitation in d >= 3: the self-similar profile, its mollification,
//! the bounds on the mollified fields, residuals and energies.

pub mod bounds;
pub mod energy;
pub mod fields;
pub mod profile;
pub mod residual;

pub use bounds::{
    center_collapse, center_sup, verify_layer_bounds, CenterCollapse, LayerReport, LevelBounds,
};
pub use energy::{
    divergence_witness, energy_fan_3d, energy_limit_numeric, exact_motion_energy,
    homogeneous_energy, mollified_energy, shock_dissipation, DivergenceWitness, EnergyAudit3D,
    EnergyLimit, EnergyOutcome,
};
pub use fields::{ExactCavity, MollifiedCavity, RadialFields};

pub use profile::{
    critical_lambda, selfsim_ode_rhs, shoot_once, shoot_profile, shoot_profile_with, ProfileReport,
    ShootSettings, Shot, SimilarityProfile,
};
pub use residual::{
    cavity_residual, default_test, layer_constant, predicted_limit, radial_quad, residual_ladder,
    zeta_test,
};
