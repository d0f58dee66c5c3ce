//! Explicit left-orders on free groups and free products, small cancellation
//! checks, and the order-compatible presentations built on them.

#![no_std]

extern crate alloc;

pub mod cancellation;
pub mod compat;
pub mod constructions;
pub mod order;
pub mod product;
pub mod words;
pub mod zlattice;
