//! Measure-valued relaxation toolkit for scalar semilinear reaction-diffusion
//! problems on the unit interval.
//!
//! The crate covers the full pipeline from a nonlinear parabolic problem
//! `∂_t y − ∂_xx y = f(t,x,y)` with homogeneous Dirichlet data to convergent
//! semidefinite bounds on linear functionals of its solution:
//!
//! * [`pde`] — Crank–Nicolson / implicit-Euler solver, discrete derivatives,
//!   weak-form and energy residuals, Grönwall stability check.
//! * [`young`] — parametrized atomic probability measures on the state and
//!   derivative coordinates, moment fields, squared-error densities, and the
//!   symmetric two-atom field that satisfies the first-moment constraints
//!   without concentrating.
//! * [`emv`] — test-function bases and residual suites for the
//!   integration-by-parts identities, first- and second-moment constraint
//!   families, the dissipation identity, and the dual-heat concentration
//!   certificate.
//! * [`occupation`] — lifts to space-time occupation measures with boundary
//!   components, and the occupation-measure identity residuals.
//! * [`relax`] — finite-degree moment relaxations of the occupation-measure
//!   identities with moment/localizing positivity blocks, a first-order
//!   operator-splitting conic solver, and a sparse SDP text export.
//! * [`io`] — columnar CSV artifacts with JSON headers.
//!
//! All numerical kernels are generic over the scalar type through
//! [`Scalar`]; `f64` aliases for the main types live at the crate root.

pub mod config;
pub mod emv;
pub mod error;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod occupation;
pub mod pde;
pub mod poly;
pub mod quad;
pub mod relax;
pub mod report;
pub mod testfn;
pub mod young;

mod scalar;

pub use scalar::Scalar;

/// Default scalar type for applications and the CLI.
pub type Real = f64;

pub type Polynomial64 = poly::Polynomial<f64>;
pub type SpaceTimeGrid64 = grid::SpaceTimeGrid<f64>;
pub type Field64 = grid::Field2<f64>;
pub type PdeProblem64 = pde::PdeProblem<f64>;
pub type FieldSolution64 = pde::FieldSolution<f64>;
pub type YoungField64 = young::YoungField<f64>;
pub type MomentFields64 = young::MomentFields<f64>;
pub type OccupationLift64 = occupation::OccupationLift<f64>;
pub type RelaxationProblem64 = relax::RelaxationProblem<f64>;
pub type ConicSolution64 = relax::ConicSolution<f64>;
pub type ResidualReport64 = report::ResidualReport<f64>;
