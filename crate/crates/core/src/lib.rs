//! Lattice-surgery compiler: turns a circuit DAG over symbolic registers into
//! a cycle-indexed stream of lattice-surgery instructions on a fixed board of
//! surface-code patches.

pub mod device;
pub mod geom;
pub mod ir;
pub mod mapper;
pub mod pipeline;
pub mod qcb;
pub mod render;
pub mod router;
pub mod sched;
pub mod stdlib;

/// Version stamped into every JSON artifact.
pub const FORMAT_VERSION: u32 = 1;

pub(crate) fn format_version() -> u32 {
    FORMAT_VERSION
}
