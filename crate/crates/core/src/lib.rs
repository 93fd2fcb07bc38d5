pub mod characters;
pub mod cyclotomic;
pub mod datum;
pub mod ff;
pub mod moduli;
pub mod notation;
pub mod parahoric;
pub mod rigidity;
pub mod suite;
pub mod trace;
