//! Thompson's group F acting on the dyadic rationals, on the covering space
//! `Z × Γ`, and on `±1` configurations over both, with exact finite-window
//! checks of orbit-closure, covering and invariant-measure statements.

pub mod actions;
pub mod configs;
pub mod fgroup;
pub mod measure;
pub mod numerics;
pub mod proximal;
pub mod suite;

pub use fgroup::{GenWord, Generator, Letter, PlHomeo};
pub use numerics::DyadicRational;
