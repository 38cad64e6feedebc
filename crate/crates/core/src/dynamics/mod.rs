//! Linearized density dynamics and the lattice Hartree evolution.

pub mod eigen;
pub mod field;
pub mod lattice;
pub mod multiplier;
pub mod perturbation;

pub use eigen::hermitian_eigenvalues;
pub use field::{FieldGrid, SpaceTimeField};
pub use lattice::{LatticeSpec, LatticeState, Trajectory, TrajectoryRow};
pub use multiplier::{
    apply_l1, apply_l1_with, build_multiplier, invert_one_plus_l1, invert_one_plus_l1_with,
    linearized_response, MultiplierTable,
};
pub use perturbation::{
    free_density, strichartz_ratio, FinitePerturbation, GaussianOrbital, Orbitals,
    StrichartzRatio,
};
