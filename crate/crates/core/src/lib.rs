//! Multi-level polar coded modulation over 2^m-PAM / AWGN.
//!
//! The crate splits a 2^m-ary channel into m binary levels (multistage
//! demapping), builds polar codes on the levels with Gaussian-approximation
//! density evolution, searches the bit-flip-reduced labeling space for the
//! labeling with the lowest predicted block error rate, and measures the
//! result by Monte Carlo simulation with SC, SCL and CRC-aided SCL decoding.
//! A bit-interleaved baseline (BIPCM) is provided for comparison.

pub mod channel;
pub mod constellation;
pub mod construction;
pub mod crc;
mod error;
pub mod labelsearch;
pub mod polar;
pub mod quadrature;
pub mod simulator;

pub use error::{Error, Result};
