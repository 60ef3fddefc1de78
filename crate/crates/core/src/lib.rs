//! Qudit fermionic mapping of the Fermi-Hubbard model onto ququart circuits:
//! Clifford-algebra operator mapping, CSUM-based hopping synthesis, a ququart
//! statevector simulator, and an exact occupation-basis reference.

pub mod emulate;
pub mod error;
pub mod gamma;
pub mod gates;
pub mod greens;
pub mod linalg;
pub mod oracle;
pub mod qfm;
pub mod resources;
pub mod transpile;
pub mod validation;

pub use error::{QfmError, Result};
