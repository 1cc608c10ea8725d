pub mod cache;
pub mod config;
pub mod epstein;
pub mod error;
pub mod fkp;
pub mod modforms;
pub mod numeric_period;
pub mod numerics;
pub mod period;
pub mod lhmf;
pub mod verify;
