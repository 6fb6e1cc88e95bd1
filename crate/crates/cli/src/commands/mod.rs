pub mod distances;
pub mod eval;
pub mod generate;
pub mod naturalise;
pub mod oracle;
pub mod testbuild;
pub mod validate;
