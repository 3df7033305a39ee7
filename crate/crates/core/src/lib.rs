//! Models of folded-bellows soft sleeve actuators: fold kinematics, hyperelastic
//! material laws, axial stiffness, pressure–force statics and closed-loop dynamics.
//!
//! Internal units are mm, N, MPa, radians and seconds. File and CLI boundaries use
//! kPa and degrees; see [`io`] and [`units`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod hyperelastic;
pub mod io;
pub mod lsq;
pub mod par;
pub mod roots;
pub mod statics;
pub mod stiffness;
pub mod sweep;
pub mod units;

pub use error::{Error, Result};
