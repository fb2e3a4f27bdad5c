//! Internal numerical kernels: nothing in here knows about the oscillator.

pub(crate) mod cmat;
pub(crate) mod ctridiag;
pub(crate) mod dd;
pub(crate) mod gauss;
pub(crate) mod symtrid;
