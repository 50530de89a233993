pub mod derive;
pub mod fsi;
pub mod morph;
pub mod pod;
pub mod reconstruct;
pub mod synth;
