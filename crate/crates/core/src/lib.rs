pub mod branch;
pub mod bundle7;
pub mod error;
pub mod exterior;
pub mod frames4;
pub mod g2point;
pub mod jet;
pub mod models;
pub mod runner;

pub use branch::Branch;
pub use error::{GeomError, GeomResult};
pub use exterior::{FormField, MatrixForm, Multivector, ScalarField};
pub use jet::Jet;
