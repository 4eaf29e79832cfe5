//! Symbolic-plus-numeric kernel for super Riemann surfaces: exact Grassmann
//! and superfunction algebra, atlases and line-bundle cocycles, SUSY-1
//! structures, functor-of-points checks over Grassmann test rings, and the
//! numeric Weierstrass embedding of a genus-1 SUSY curve.

pub mod atlas;
pub mod elliptic;
pub mod fop;
pub mod grassmann;
pub mod par;
pub mod sample;
pub mod superfn;
pub mod susy;
pub mod symcore;
