pub mod diagnose;
pub mod flow;
pub mod identity;
pub mod solve;
pub mod sweep;
pub mod verify;
