#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod caching;
pub mod composite;
pub mod gf2;
pub mod instance;
pub mod lp;
pub mod outer;
pub mod rational;
pub mod scheme;
pub mod screen;
