//! Chaos-and-permutation cipher for 8-bit images and raw video frames.
//!
//! A logistic-map keystream ([`keystream`]) is XOR-ed into 8-pixel blocks
//! sandwiched between a bit permutation and its inverse ([`pip`], [`cipher`]).
//! [`analysis`] holds the histogram, entropy and correlation measures used to
//! evaluate ciphertexts; [`io`] reads and writes PGM/PPM, raw frames and the
//! `CPIP` container.

pub mod analysis;
pub mod cipher;
pub mod cli;
pub mod error;
pub mod io;
pub mod keystream;
pub mod pip;

pub use cipher::{decrypt_image, encrypt_image, process_stream, Frame, ReseedMode};
pub use error::{Error, KeyError, Result};
pub use keystream::{KeyMaterial, Keystream, KeystreamState};
pub use pip::PixelBlock;
