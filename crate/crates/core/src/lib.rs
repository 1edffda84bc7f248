//! Geometric measures of multipartite entanglement for pure states and the
//! minimal time a unitary evolution needs to make a state m-separable.
//!
//! * [`state`]: pure states, partitions and product states.
//! * [`partitions`]: enumeration of set partitions into exactly m blocks.
//! * [`separable`]: `E_m` via multi-restart alternating optimization.
//! * [`qsl`]: the speed-limit bound and its saturating two-level generator.
//! * [`ent_time`]: `tau_m = arcsin(sqrt(E_m)) / ω` and end-to-end checks.
//! * [`oracle`]: independent reference maximizers for small systems.

pub mod ent_time;
pub mod error;
pub mod oracle;
pub mod partitions;
pub mod qsl;
pub mod separable;
pub mod state;
pub mod state_file;
pub mod units;

pub use ent_time::{
    energy_gap, entanglement_from_time, figure_data, tau_m, verify_separabilization, FigureRow,
    TimeReport, VerificationRecord,
};
pub use error::{Error, Result};
pub use partitions::enumerate_partitions;
pub use qsl::{
    build_h_opt, evolve_dense, evolve_opt, orthogonal_complement, phase_align, qsl_bound, variance,
    DenseHamiltonian, OptHamiltonian,
};
pub use separable::{
    geometric_entanglement, max_overlap_for_partition, GeometricEntanglement, OptConfig,
    OverlapResult,
};
pub use state::{
    assemble, contract_except, haar_random_state, inner_product, Partition, ProductState,
    PureState, C64,
};
