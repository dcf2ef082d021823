//! Per-unit-length capacitance matrices of 2D multiconductor transmission
//! line cross-sections, computed by the method of moments with piecewise
//! constant charge densities and midpoint collocation.
//!
//! The pipeline: parse a parametric cross-section ([`geometry`]), discretize
//! its boundaries ([`mesh`]), assemble and solve the dense charge system
//! ([`kernel`], [`linalg`], [`system`]), optionally iterate with adaptive
//! refinement ([`adaptive`]), and compare against uniform reference meshes
//! over parameter sweeps ([`sweep`]). [`oracle`] provides independent
//! quadrature and analytic ground truth; [`report`] renders the outputs.

pub mod adaptive;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod kernel;
pub mod linalg;
pub mod mesh;
pub mod oracle;
pub mod report;
pub mod sweep;
pub mod system;

pub use adaptive::{
    run_adaptive, AdaptiveConfig, ControlQuantity, ConvergenceTrace, RefinementMethod,
    TerminalStatus,
};
pub use error::{Error, Result};
pub use geometry::{parse_cross_section, resolve_geometry, CrossSection, ResolvedGeometry};
pub use mesh::{build_initial_mesh, Mesh};
pub use sweep::{reference_run, run_sweep, SweepReport, SweepSpec};
pub use system::{CapacitanceMatrix, EPS0};
