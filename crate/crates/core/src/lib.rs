//! Synthesis of matchgate circuits over the Clifford+T matchgate gate set.

pub mod approx;
pub mod cli;
pub mod circuit;
pub mod error;
pub mod exact;
pub mod io;
pub mod ring;
pub mod satenc;
pub mod somat;
pub mod spinrep;
pub mod targets;

pub use circuit::Circuit;
pub use error::{Error, Result};
pub use ring::{Residue, RingScalar, ZSqrt2};
pub use somat::{eval_product, GateKind, GeneratorId, TransferMatrix};
