//! Permutation / inverse-permutation of bits inside an 8-pixel block.
//!
//! Bits are addressed as `(i, j)`: pixel `i` in `0..8`, bit `j` in `0..8`
//! with `j = 0` the most significant. The forward table sends bit `(i, j)`
//! to `((i + j) mod 8, 7 - j)`:
//!
//! * the eight bits of an input pixel land in eight different output pixels,
//!   and every output pixel holds one bit of every input pixel;
//! * a bit of significance `j` ends up at significance `7 - j`.
//!
//! The second point matters for the cipher: XOR-ing key bytes between the two
//! permutations is the same as XOR-ing each pixel with a byte assembled from the
//! key bits addressed by the table. Logistic-map key bytes are biased in their
//! high bits (the map's invariant density piles up near the ends of its range),
//! so the table routes key high bits onto pixel low bits.

/// Eight consecutive 8-bit pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PixelBlock(pub [u8; 8]);

impl PixelBlock {
    pub const LEN: usize = 8;

    pub fn count_ones(&self) -> u32 {
        u64::from_ne_bytes(self.0).count_ones()
    }

    fn to_word(self) -> u64 {
        u64::from_be_bytes(self.0)
    }

    fn from_word(w: u64) -> Self {
        Self(w.to_be_bytes())
    }
}

impl From<[u8; 8]> for PixelBlock {
    fn from(b: [u8; 8]) -> Self {
        Self(b)
    }
}

impl std::ops::BitXor<[u8; 8]> for PixelBlock {
    type Output = PixelBlock;

    fn bitxor(self, rhs: [u8; 8]) -> PixelBlock {
        Self::from_word(self.to_word() ^ u64::from_be_bytes(rhs))
    }
}

/// Where the forward table sends bit `(pixel, bit)`.
pub const fn forward_position(pixel: usize, bit: usize) -> (usize, usize) {
    ((pixel + bit) % 8, 7 - bit)
}

const LANE: u64 = 0x0101_0101_0101_0101;

/// Reverses the bit order inside every byte.
#[inline]
fn reverse_each_byte(w: u64) -> u64 {
    w.reverse_bits().swap_bytes()
}

/// Moves bit `k` (MSB-first) of byte `i` to byte `(i + 7 - k) mod 8`.
#[inline]
fn skew(w: u64) -> u64 {
    let mut out = 0;
    for k in 0..8u32 {
        out |= w.rotate_left(8 * (k + 1)) & (LANE << (7 - k));
    }
    out
}

#[inline]
fn unskew(w: u64) -> u64 {
    let mut out = 0;
    for k in 0..8u32 {
        out |= w.rotate_left(8 * (7 - k)) & (LANE << (7 - k));
    }
    out
}

#[inline]
pub fn forward_permute(block: PixelBlock) -> PixelBlock {
    PixelBlock::from_word(skew(reverse_each_byte(block.to_word())))
}

/// Exact inverse of [`forward_permute`].
#[inline]
pub fn inverse_permute(block: PixelBlock) -> PixelBlock {
    PixelBlock::from_word(reverse_each_byte(unskew(block.to_word())))
}
