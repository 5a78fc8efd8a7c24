pub mod error;
pub mod exec;
pub mod freefermion;
pub mod gatecount;
pub mod lattice;
pub mod oracle;
pub mod qpe;
pub mod qubitization;
pub mod reference;
pub mod tiling;
pub mod trotterbounds;

pub use error::{Error, Result};
