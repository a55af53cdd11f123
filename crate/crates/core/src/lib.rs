pub mod exactnum;
pub mod liedims;
pub mod filtered;
pub mod bounds;
pub mod padic;
pub mod transport;
pub mod axschanuel;
pub mod cli;
