#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bernoulli;
pub mod checks;
pub mod eisenstein;
pub mod error;
pub mod exact_period;
pub mod exceptional;
pub mod expfourier;
pub mod field;
pub mod gamma;
pub mod gauss;
pub mod jumps;
pub mod kz;
pub mod local_poly;
pub mod point;
pub mod poly;
pub mod quadform;
pub mod raising;
pub mod rational;
