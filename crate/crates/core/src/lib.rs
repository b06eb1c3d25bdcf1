//! Distributional calculus for the infinite square well.
//!
//! * [`distcalc`] is a small rewrite engine for sums of smooth functions,
//!   Heaviside steps and Dirac delta derivatives.
//! * [`isw`] builds the well's eigenstates and its singular confining
//!   potential, and checks the stationary equation and the slope jumps at
//!   the walls exactly.
//! * [`packets`] evaluates wavepackets in the eigenbasis and the closed-form
//!   Ehrenfest series, with grid quadrature as an independent oracle.
//! * [`cli`] drives all of the above from the command line.

pub mod cli;
pub mod distcalc;
pub mod isw;
pub mod packets;
pub mod par;
