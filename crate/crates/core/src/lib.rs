//! Motion planning through gadgets: models, classification, solvers,
//! reductions and network simulation.

pub mod catalog;
pub mod classify;
pub mod cli;
pub mod error;
pub mod gadget;
pub mod io;
pub mod netsim;
pub mod reduce;
pub mod solve;
pub mod system;
pub mod verify;

pub use error::{Error, Result};
pub use gadget::{Direction, Gadget, Transition, TunnelStructure};
pub use system::{Configuration, Instance, Move, MovePath, System, SystemBuilder};
