//! Reduction compiler from Boolean satisfiability to short Presburger
//! sentences and fixed-size integer programs, with exact brute-force oracles
//! for every stage.

pub mod apcover;
pub mod contfrac;
pub mod encode;
pub mod error;
pub mod exactmath;
pub mod formats;
pub mod geometry;
pub mod gip;
pub mod kpt;
pub mod optimize;
pub mod presburger;
pub mod sample;
pub mod satred;

pub use error::{Error, Result};
pub use exactmath::{Int, Rat};
