//! Simulation library for fault-tolerant blind delegated quantum
//! computation: the 7-qubit stabilizer code and its syndrome machinery,
//! dense statevector simulation, cluster-state preparation of blind
//! encoded qubits, the interactive delegation protocol with blindness
//! diagnostics, and the photon-pulse resource model for concatenated
//! encoding levels.

pub mod channel;
pub mod code;
pub mod config;
pub mod error;
pub mod graph;
pub mod mbqc;
pub mod pauli;
pub mod protocol;
pub mod resource;
pub mod state;

pub use error::{Error, Result};
