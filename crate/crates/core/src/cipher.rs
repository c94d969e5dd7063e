//! Block cipher pipeline over planes, images and frame sequences.
//!
//! Every 8-byte block is forward-permuted, XOR-ed with eight key bytes and
//! inverse-permuted. A trailing partial block is XOR-ed without permutation.
//! The whole transform is an involution: running it twice with the same key
//! restores the input, so encryption and decryption share one code path.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::keystream::{KeyMaterial, Keystream};
use crate::pip::{forward_permute, inverse_permute, PixelBlock};

/// Extra iterates per frame index when frames are keyed independently.
/// The value is arbitrary; it only has to be fixed.
pub const PER_FRAME_STRIDE: u64 = 17;

/// Image or video frame stored as planar bytes: all of channel 0, then
/// channel 1, then channel 2, each plane row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    width: u32,
    height: u32,
    channels: u8,
    data: Vec<u8>,
}

impl Frame {
    pub fn new(width: u32, height: u32, channels: u8, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::DimensionMismatch(format!(
                "frame dimensions must be positive, got {width}x{height}"
            )));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::DimensionMismatch(format!(
                "channels must be 1 or 3, got {channels}"
            )));
        }
        let expected = Self::byte_len(width, height, channels)?;
        if data.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{width}x{height}x{channels} frame needs {expected} bytes, got {}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// Byte length of a `width x height x channels` frame, if it fits in memory.
    pub fn byte_len(width: u32, height: u32, channels: u8) -> Result<usize> {
        (width as usize)
            .checked_mul(height as usize)
            .and_then(|n| n.checked_mul(channels as usize))
            .ok_or_else(|| {
                Error::DimensionMismatch(format!("{width}x{height}x{channels} is too large"))
            })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn plane_len(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn plane(&self, channel: usize) -> &[u8] {
        let n = self.plane_len();
        &self.data[channel * n..(channel + 1) * n]
    }

    pub fn planes(&self) -> impl Iterator<Item = &[u8]> {
        self.data.chunks_exact(self.plane_len())
    }

    pub fn same_shape(&self, other: &Frame) -> bool {
        self.width == other.width && self.height == other.height && self.channels == other.channels
    }

    fn with_data(&self, data: Vec<u8>) -> Frame {
        debug_assert_eq!(data.len(), self.data.len());
        Frame { data, ..*self }
    }
}

/// How the keystream is laid over a frame sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReseedMode {
    /// One keystream runs through all frames in order.
    Continuous,
    /// Frame `i` starts from the seed advanced by `burn_in + 17 * i` iterates.
    PerFrame,
}

/// Forward permutation, XOR with the key bytes, inverse permutation.
#[inline]
pub fn process_block(block: PixelBlock, key_bytes: [u8; 8]) -> PixelBlock {
    inverse_permute(forward_permute(block) ^ key_bytes)
}

/// Transforms `data` in place, drawing exactly one key byte per data byte.
pub fn transform_in_place(data: &mut [u8], ks: &mut Keystream) {
    let mut blocks = data.chunks_exact_mut(PixelBlock::LEN);
    let mut key = [0u8; 8];
    for chunk in &mut blocks {
        ks.fill(&mut key);
        let block = PixelBlock(chunk.try_into().expect("exact chunk"));
        chunk.copy_from_slice(&process_block(block, key).0);
    }
    for b in blocks.into_remainder() {
        *b ^= ks.next_byte();
    }
}

pub fn transform_plane(data: &[u8], ks: &mut Keystream) -> Vec<u8> {
    let mut out = data.to_vec();
    transform_in_place(&mut out, ks);
    out
}

pub fn encrypt_image(frame: &Frame, key: &KeyMaterial) -> Frame {
    let mut ks = Keystream::new(key);
    frame.with_data(transform_plane(&frame.data, &mut ks))
}

/// Identical to [`encrypt_image`]; the transform is its own inverse.
pub fn decrypt_image(frame: &Frame, key: &KeyMaterial) -> Frame {
    encrypt_image(frame, key)
}

/// Keystream used for frame `index` in [`ReseedMode::PerFrame`].
pub fn per_frame_keystream(key: &KeyMaterial, index: u64) -> Keystream {
    Keystream::at_seed(key).skipped(key.burn_in() + PER_FRAME_STRIDE * index)
}

/// Encrypts (or decrypts) one frame as if it stood at `index` in a
/// [`ReseedMode::PerFrame`] stream.
pub fn process_frame_at(frame: &Frame, key: &KeyMaterial, index: u64) -> Frame {
    let mut ks = per_frame_keystream(key, index);
    frame.with_data(transform_plane(&frame.data, &mut ks))
}

pub fn process_stream(frames: &[Frame], key: &KeyMaterial, mode: ReseedMode) -> Result<Vec<Frame>> {
    if let Some(first) = frames.first() {
        if let Some((i, f)) = frames
            .iter()
            .enumerate()
            .find(|(_, f)| !f.same_shape(first))
        {
            return Err(Error::DimensionMismatch(format!(
                "frame {i} is {}x{}x{}, frame 0 is {}x{}x{}",
                f.width, f.height, f.channels, first.width, first.height, first.channels
            )));
        }
    }
    Ok(match mode {
        ReseedMode::Continuous => {
            let mut ks = Keystream::new(key);
            frames
                .iter()
                .map(|f| f.with_data(transform_plane(&f.data, &mut ks)))
                .collect()
        }
        ReseedMode::PerFrame => frames
            .par_iter()
            .enumerate()
            .map(|(i, f)| process_frame_at(f, key, i as u64))
            .collect(),
    })
}
