//! Artificial magnetic-monopole gauge fields for a trapped Λ-type atom.
//!
//! Two co-propagating laser beams (a probe carrying orbital angular momentum
//! `g` and a control beam) drive a three-level atom in the Λ configuration.
//! When the centre of mass moves slowly enough to follow the local dark
//! state, the atom's slow motion acquires a geometric vector potential whose
//! curl is the field of a magnetic monopole of charge `g/2` sitting at the
//! beam crossing.
//!
//! The crate covers the pieces of that story that can be computed:
//!
//! * [`fields`]: local dressed-state frame of the Λ system (eigenvalues,
//!   gaps, patch-fixed dark sections).
//! * [`gauge`]: the induced vector potential on the two Wu-Yang patches,
//!   its curvature, sphere flux, and the patch-transition holonomy.
//! * [`angular`]: monopole spherical harmonics, Wigner d functions, and the
//!   free radial solutions with the shifted Bessel index.
//! * [`spectrum`]: bound states in a displaced cylindrical harmonic trap,
//!   analytic ladder and finite-difference eigensolver.
//! * [`adiabatic`]: validity bounds for the dark-state following condition
//!   and threshold radii.
//!
//! Internally ħ = 1: energies are angular frequencies (rad·s⁻¹), lengths are
//! metres, and masses enter as `M/ħ` (s·m⁻²). [`AtomConfig::from_si`]
//! converts laboratory numbers.
//!
//! [`AtomConfig::from_si`]: fields::AtomConfig::from_si

pub mod adiabatic;
pub mod angular;
pub mod fields;
pub mod gauge;
pub mod geometry;
pub mod lanczos;
pub mod numeric;
pub mod special;
pub mod spectrum;

/// Reduced Planck constant in J·s, used only when converting SI inputs.
pub const HBAR: f64 = 1.0545718e-34;
