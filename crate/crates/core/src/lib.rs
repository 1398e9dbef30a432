//! Exact computations with monomial realizations of crystal bases and polyhedral
//! realizations of B(∞), and the comparison of the two descriptions.

pub mod cartan;
pub mod error;
pub mod linform;
pub mod moncrys;
pub mod rank2;
pub mod rational;
pub mod tableaux;
pub mod verify;
pub mod zcrystal;

pub use error::{Error, Result};
