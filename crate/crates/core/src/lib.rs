pub mod bpoly;
pub mod brown_hs;
pub mod cumulant;
pub mod experiments;
pub mod matrix_lab;
pub mod seed;
