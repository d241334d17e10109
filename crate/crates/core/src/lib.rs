pub mod exactalg;
pub mod bispectral;
pub mod darboux;
pub mod commute;
pub mod numverify;
