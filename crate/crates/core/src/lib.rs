pub mod arith;
pub mod padic;
pub mod characters;
pub mod abfield;
pub mod quadclass;
pub mod logclass;
pub mod kida;
pub mod cli;
