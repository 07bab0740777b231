//! Mean curvature flow of closed rotationally symmetric surfaces.
//!
//! A closed surface of revolution with profile u(t, x) > 0 over the moving
//! interval [a(t), b(t)] moves by mean curvature iff
//!
//! ```text
//! u_t = u_xx / (1 + u_x²) − 1/u,      u(t, a) = u(t, b) = 0,
//! ```
//!
//! with vertical tangents at the rotation axis. The solver works in the
//! squared half-width v = u²/2 pulled back to a fixed reference angle:
//! h(t, θ) = v(t, c − d·cos θ) on θ ∈ [0, π], where c = (a+b)/2 and
//! d = (b−a)/2. In these coordinates the free boundary is frozen at
//! θ = 0, π, h vanishes there with h″ > 0, and the motion becomes
//!
//! ```text
//! h_t = Φ₁(h, c, d),    c′ = Φ₂(h, d),    d′ = Φ₃(h, d),
//! ```
//!
//! a degenerate parabolic system driven entirely by grid quantities.
//! The crate provides the discretized right-hand side ([`rhs`]), the
//! linearized operator and its model part ([`linearize`]), an adaptive
//! RK4 front-tracking integrator with singularity detection ([`stepper`]),
//! and profile conversions/validation ([`profile`]).

pub mod error;
pub mod grid;
pub mod io;
pub mod linearize;
pub mod profile;
pub mod rhs;
pub mod scenario;
pub mod stepper;

pub use error::Error;
