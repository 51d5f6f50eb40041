pub mod chain;
pub mod error;
pub mod linalg;
pub mod report;
pub mod jcat;
pub mod flowcat;
pub mod corners;
pub mod realize;
pub mod spectral;
pub mod comparison;
pub mod morse;
pub mod io;
pub mod cli;
