//! Binary PGM/PPM, raw planar frame files, and the `CPIP` ciphertext container.
//!
//! Container layout (all integers big-endian):
//!
//! ```text
//! offset  size  field
//!      0     4  magic "CPIP"
//!      4     1  version = 1
//!      5     1  mode: 0 gray image, 1 RGB image, 2 gray video, 3 RGB video
//!      6     1  reseed: 0 continuous, 1 per-frame
//!      7     1  reserved = 0
//!      8     4  width
//!     12     4  height
//!     16     4  frame count
//!     20     .  payload: frames back to back, each in planar order
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use crate::cipher::{Frame, ReseedMode};
use crate::error::{Error, Result};

pub const CONTAINER_MAGIC: [u8; 4] = *b"CPIP";
pub const CONTAINER_VERSION: u8 = 1;
pub const CONTAINER_HEADER_LEN: usize = 20;

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

// ---------------------------------------------------------------------------
// PNM

struct HeaderCursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> HeaderCursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&c) = self.buf.get(self.pos) {
            if c == b'#' {
                while let Some(&c) = self.buf.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.buf.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(format_err(format!("PNM header: expected {what}")));
        }
        std::str::from_utf8(&self.buf[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| format_err(format!("PNM header: {what} out of range")))
    }
}

/// Parses a binary PGM (`P5`) or PPM (`P6`) with maxval 255. Interleaved RGB
/// is converted to planar order. Bytes after the pixel data are ignored.
pub fn read_pnm(bytes: &[u8]) -> Result<Frame> {
    let channels = match bytes.get(..2) {
        Some(b"P5") => 1u8,
        Some(b"P6") => 3u8,
        _ => return Err(format_err("not a binary PGM/PPM (expected P5 or P6)")),
    };
    let mut cur = HeaderCursor { buf: bytes, pos: 2 };
    if !cur
        .buf
        .get(2)
        .is_some_and(|c| c.is_ascii_whitespace() || *c == b'#')
    {
        return Err(format_err("PNM header: missing separator after magic"));
    }
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(format_err(format!(
            "PNM header: bad dimensions {width}x{height}"
        )));
    }
    if maxval != 255 {
        return Err(format_err(format!(
            "unsupported maxval {maxval} (only 255)"
        )));
    }
    // exactly one whitespace byte separates maxval from the raster
    match cur.buf.get(cur.pos) {
        Some(c) if c.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(format_err("PNM header: missing whitespace before raster")),
    }
    let len = Frame::byte_len(width, height, channels)?;
    let raster = bytes
        .get(cur.pos..cur.pos + len)
        .ok_or_else(|| format_err(format!("truncated raster: need {len} bytes")))?;
    let data = if channels == 1 {
        raster.to_vec()
    } else {
        interleaved_to_planar(raster)
    };
    Frame::new(width, height, channels, data)
}

/// Canonical `P5`/`P6` encoding of a frame.
pub fn write_pnm(frame: &Frame) -> Vec<u8> {
    let magic = if frame.channels() == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n255\n", frame.width(), frame.height()).into_bytes();
    if frame.channels() == 1 {
        out.extend_from_slice(frame.data());
    } else {
        out.extend_from_slice(&planar_to_interleaved(frame));
    }
    out
}

fn interleaved_to_planar(raster: &[u8]) -> Vec<u8> {
    let n = raster.len() / 3;
    let mut out = vec![0u8; raster.len()];
    for (i, px) in raster.chunks_exact(3).enumerate() {
        out[i] = px[0];
        out[n + i] = px[1];
        out[2 * n + i] = px[2];
    }
    out
}

fn planar_to_interleaved(frame: &Frame) -> Vec<u8> {
    let (r, g, b) = (frame.plane(0), frame.plane(1), frame.plane(2));
    let mut out = Vec::with_capacity(frame.data().len());
    for i in 0..frame.plane_len() {
        out.extend_from_slice(&[r[i], g[i], b[i]]);
    }
    out
}

pub fn read_pnm_file(path: &Path) -> Result<Frame> {
    read_pnm(&fs::read(path)?).map_err(|e| match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Frame files named `frame-NNNNNN.pgm` / `.ppm` in `dir`, sorted by name.
pub fn list_frame_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let Some(name) = p.file_name().and_then(|n| n.to_str()) else {
                return false;
            };
            let Some(stem) = name.strip_prefix("frame-") else {
                return false;
            };
            stem.ends_with(".pgm") || stem.ends_with(".ppm")
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(format_err(format!(
            "no frame-*.pgm/ppm files in {}",
            dir.display()
        )));
    }
    Ok(files)
}

pub fn frame_file_name(index: usize, channels: u8) -> String {
    let ext = if channels == 1 { "pgm" } else { "ppm" };
    format!("frame-{index:06}.{ext}")
}

// ---------------------------------------------------------------------------
// raw planar video

/// Splits a raw file of back-to-back planar frames.
pub fn read_raw_frames(bytes: &[u8], width: u32, height: u32, channels: u8) -> Result<Vec<Frame>> {
    // validates the shape
    Frame::new(
        width,
        height,
        channels,
        vec![0; Frame::byte_len(width, height, channels)?],
    )?;
    let frame_len = Frame::byte_len(width, height, channels)?;
    if bytes.is_empty() || !bytes.len().is_multiple_of(frame_len) {
        return Err(format_err(format!(
            "raw input of {} bytes is not a whole number of {frame_len}-byte frames",
            bytes.len()
        )));
    }
    bytes
        .chunks_exact(frame_len)
        .map(|c| Frame::new(width, height, channels, c.to_vec()))
        .collect()
}

pub fn write_raw_frames(frames: &[Frame]) -> Vec<u8> {
    frames
        .iter()
        .flat_map(|f| f.data().iter().copied())
        .collect()
}

// ---------------------------------------------------------------------------
// container

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContainerMode {
    GrayImage = 0,
    RgbImage = 1,
    GrayVideo = 2,
    RgbVideo = 3,
}

impl ContainerMode {
    pub fn new(channels: u8, video: bool) -> Result<Self> {
        Ok(match (channels, video) {
            (1, false) => Self::GrayImage,
            (3, false) => Self::RgbImage,
            (1, true) => Self::GrayVideo,
            (3, true) => Self::RgbVideo,
            _ => {
                return Err(Error::DimensionMismatch(format!(
                    "unsupported channel count {channels}"
                )))
            }
        })
    }

    pub fn channels(self) -> u8 {
        match self {
            Self::GrayImage | Self::GrayVideo => 1,
            Self::RgbImage | Self::RgbVideo => 3,
        }
    }

    pub fn is_video(self) -> bool {
        matches!(self, Self::GrayVideo | Self::RgbVideo)
    }

    fn from_byte(b: u8) -> Result<Self> {
        Ok(match b {
            0 => Self::GrayImage,
            1 => Self::RgbImage,
            2 => Self::GrayVideo,
            3 => Self::RgbVideo,
            _ => return Err(format_err(format!("unknown container mode {b}"))),
        })
    }
}

fn reseed_byte(mode: ReseedMode) -> u8 {
    match mode {
        ReseedMode::Continuous => 0,
        ReseedMode::PerFrame => 1,
    }
}

fn reseed_from_byte(b: u8) -> Result<ReseedMode> {
    match b {
        0 => Ok(ReseedMode::Continuous),
        1 => Ok(ReseedMode::PerFrame),
        _ => Err(format_err(format!("unknown reseed mode {b}"))),
    }
}

/// Decoded container.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Container {
    pub mode: ContainerMode,
    pub reseed: ReseedMode,
    pub frames: Vec<Frame>,
}

pub fn write_container(
    frames: &[Frame],
    mode: ContainerMode,
    reseed: ReseedMode,
) -> Result<Vec<u8>> {
    let first = frames
        .first()
        .ok_or_else(|| Error::InvalidArgument("container needs at least one frame".into()))?;
    if let Some(f) = frames.iter().find(|f| !f.same_shape(first)) {
        return Err(Error::DimensionMismatch(format!(
            "frame {}x{}x{} differs from {}x{}x{}",
            f.width(),
            f.height(),
            f.channels(),
            first.width(),
            first.height(),
            first.channels()
        )));
    }
    if first.channels() != mode.channels() {
        return Err(Error::DimensionMismatch(format!(
            "{mode:?} expects {} channel(s), frames have {}",
            mode.channels(),
            first.channels()
        )));
    }
    if !mode.is_video() && frames.len() != 1 {
        return Err(Error::InvalidArgument(format!(
            "image container holds exactly one frame, got {}",
            frames.len()
        )));
    }
    let count = u32::try_from(frames.len())
        .map_err(|_| Error::InvalidArgument("too many frames".into()))?;

    let mut out = Vec::with_capacity(CONTAINER_HEADER_LEN + frames.len() * first.data().len());
    out.extend_from_slice(&CONTAINER_MAGIC);
    out.extend_from_slice(&[CONTAINER_VERSION, mode as u8, reseed_byte(reseed), 0]);
    out.extend_from_slice(&first.width().to_be_bytes());
    out.extend_from_slice(&first.height().to_be_bytes());
    out.extend_from_slice(&count.to_be_bytes());
    for f in frames {
        out.extend_from_slice(f.data());
    }
    Ok(out)
}

pub fn read_container(bytes: &[u8]) -> Result<Container> {
    if bytes.len() < CONTAINER_HEADER_LEN {
        return Err(format_err("container shorter than its header"));
    }
    if bytes[..4] != CONTAINER_MAGIC {
        return Err(format_err("bad container magic"));
    }
    if bytes[4] != CONTAINER_VERSION {
        return Err(format_err(format!(
            "unsupported container version {}",
            bytes[4]
        )));
    }
    let mode = ContainerMode::from_byte(bytes[5])?;
    let reseed = reseed_from_byte(bytes[6])?;
    if bytes[7] != 0 {
        return Err(format_err("reserved header byte is not zero"));
    }
    let be = |at: usize| u32::from_be_bytes(bytes[at..at + 4].try_into().expect("4 bytes"));
    let (width, height, count) = (be(8), be(12), be(16));
    if count == 0 || (!mode.is_video() && count != 1) {
        return Err(format_err(format!(
            "frame count {count} invalid for {mode:?}"
        )));
    }
    let frame_len = Frame::byte_len(width, height, mode.channels())
        .map_err(|_| format_err("container dimensions too large"))?;
    let payload = &bytes[CONTAINER_HEADER_LEN..];
    let expected = frame_len
        .checked_mul(count as usize)
        .ok_or_else(|| format_err("container dimensions too large"))?;
    if payload.len() != expected {
        return Err(format_err(format!(
            "payload is {} bytes, header implies {expected}",
            payload.len()
        )));
    }
    let frames = payload
        .chunks_exact(frame_len)
        .map(|c| Frame::new(width, height, mode.channels(), c.to_vec()))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| format_err(e.to_string()))?;
    Ok(Container {
        mode,
        reseed,
        frames,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_pgm() {
        let mut bytes = b"P5\n2 2\n255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3, 4]);
        let f = read_pnm(&bytes).unwrap();
        assert_eq!((f.width(), f.height(), f.channels()), (2, 2, 1));
        assert_eq!(f.data(), &[1, 2, 3, 4]);
        assert_eq!(write_pnm(&f), bytes);
    }

    #[test]
    fn comments_and_odd_whitespace() {
        let mut bytes = b"P6 # made by hand\n# another\n 2\t1 \r\n255\n".to_vec();
        bytes.extend_from_slice(&[10, 20, 30, 11, 21, 31]);
        let f = read_pnm(&bytes).unwrap();
        assert_eq!(f.channels(), 3);
        assert_eq!(f.data(), &[10, 11, 20, 21, 30, 31]);
        assert_eq!(&write_pnm(&f)[..11], b"P6\n2 1\n255\n");
        assert_eq!(&write_pnm(&f)[11..], &[10, 20, 30, 11, 21, 31]);
    }

    #[test]
    fn pnm_rejections() {
        let cases: [&[u8]; 7] = [
            b"P6\n1 1\n65535\n\0\0\0\0\0\0",
            b"P3\n1 1\n255\n1 2 3",
            b"P5\n2 2\n255\n\x01\x02",
            b"P5\n2\n",
            b"P5\n0 2\n255\n",
            b"P52 2 255 ....",
            b"P5\n1 1\n255",
        ];
        for c in cases {
            assert!(
                matches!(read_pnm(c), Err(Error::Format(_))),
                "{:?}",
                String::from_utf8_lossy(c)
            );
        }
    }

    #[test]
    fn pnm_round_trips() {
        let gray = Frame::new(1, 1, 1, vec![77]).unwrap();
        let rgb = Frame::new(3, 2, 3, (0..18).collect()).unwrap();
        let big = Frame::new(
            512,
            512,
            1,
            (0..512 * 512).map(|i| (i % 253) as u8).collect(),
        )
        .unwrap();
        for f in [gray, rgb, big] {
            assert_eq!(read_pnm(&write_pnm(&f)).unwrap(), f);
        }
    }

    #[test]
    fn header_bytes_for_512_gray() {
        let f = Frame::new(512, 512, 1, vec![0; 512 * 512]).unwrap();
        let bytes =
            write_container(&[f], ContainerMode::GrayImage, ReseedMode::Continuous).unwrap();
        assert_eq!(
            &bytes[..CONTAINER_HEADER_LEN],
            &[
                0x43, 0x50, 0x49, 0x50, 0x01, 0x00, 0x00, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00,
                0x02, 0x00, 0x00, 0x00, 0x00, 0x01
            ]
        );
        assert_eq!(bytes.len(), CONTAINER_HEADER_LEN + 512 * 512);
    }

    #[test]
    fn video_container_round_trip() {
        let frames = vec![
            Frame::new(3, 2, 1, vec![1, 2, 3, 4, 5, 6]).unwrap(),
            Frame::new(3, 2, 1, vec![6, 5, 4, 3, 2, 1]).unwrap(),
        ];
        let bytes =
            write_container(&frames, ContainerMode::GrayVideo, ReseedMode::PerFrame).unwrap();
        assert_eq!(&bytes[16..20], &[0, 0, 0, 2]);
        assert_eq!(bytes[6], 1);
        let c = read_container(&bytes).unwrap();
        assert_eq!(c.mode, ContainerMode::GrayVideo);
        assert_eq!(c.reseed, ReseedMode::PerFrame);
        assert_eq!(c.frames, frames);
    }

    #[test]
    fn container_rejections() {
        let f = Frame::new(2, 2, 1, vec![1, 2, 3, 4]).unwrap();
        let good = write_container(
            std::slice::from_ref(&f),
            ContainerMode::GrayImage,
            ReseedMode::Continuous,
        )
        .unwrap();
        let mutate = |at: usize, v: u8| {
            let mut b = good.clone();
            b[at] = v;
            b
        };
        for bad in [
            mutate(0, b'X'),
            mutate(4, 2),
            mutate(5, 4),
            mutate(6, 2),
            mutate(7, 1),
            mutate(19, 2),
            good[..good.len() - 1].to_vec(),
            [good.as_slice(), &[0]].concat(),
            good[..10].to_vec(),
        ] {
            assert!(matches!(read_container(&bad), Err(Error::Format(_))));
        }

        // writer-side checks
        assert!(write_container(&[], ContainerMode::GrayVideo, ReseedMode::Continuous).is_err());
        assert!(write_container(
            &[f.clone(), f.clone()],
            ContainerMode::GrayImage,
            ReseedMode::Continuous
        )
        .is_err());
        assert!(write_container(
            std::slice::from_ref(&f),
            ContainerMode::RgbImage,
            ReseedMode::Continuous
        )
        .is_err());
        let g = Frame::new(4, 1, 1, vec![0; 4]).unwrap();
        assert!(
            write_container(&[f, g], ContainerMode::GrayVideo, ReseedMode::Continuous).is_err()
        );
    }

    #[test]
    fn raw_frames() {
        let bytes: Vec<u8> = (0..24).collect();
        let frames = read_raw_frames(&bytes, 2, 2, 3).unwrap();
        assert_eq!(frames.len(), 2);
        assert_eq!(frames[1].plane(0), &[12, 13, 14, 15]);
        assert_eq!(write_raw_frames(&frames), bytes);
        assert!(read_raw_frames(&bytes[..23], 2, 2, 3).is_err());
        assert!(read_raw_frames(&[], 2, 2, 3).is_err());
        assert!(read_raw_frames(&bytes, 2, 2, 2).is_err());
    }

    #[test]
    fn frame_names() {
        assert_eq!(frame_file_name(7, 1), "frame-000007.pgm");
        assert_eq!(frame_file_name(123456, 3), "frame-123456.ppm");
    }

    proptest! {
        #[test]
        fn container_and_pnm_round_trip(
            w in 1u32..12, h in 1u32..12, rgb in any::<bool>(), n in 1usize..4,
            reseed in any::<bool>(), seed in any::<u8>(),
        ) {
            let c = if rgb { 3 } else { 1 };
            let len = (w * h) as usize * c as usize;
            let frames: Vec<Frame> = (0..n)
                .map(|k| Frame::new(w, h, c, (0..len).map(|i| (i as u8) ^ seed ^ k as u8).collect()).unwrap())
                .collect();
            let reseed = if reseed { ReseedMode::PerFrame } else { ReseedMode::Continuous };
            let mode = ContainerMode::new(c, true).unwrap();
            let bytes = write_container(&frames, mode, reseed).unwrap();
            prop_assert_eq!(bytes.len(), CONTAINER_HEADER_LEN + n * len);
            let back = read_container(&bytes).unwrap();
            prop_assert_eq!(&back.frames, &frames);
            prop_assert_eq!(back.reseed, reseed);
            let pnm = write_pnm(&frames[0]);
            prop_assert_eq!(read_pnm(&pnm).unwrap(), frames[0].clone());
        }
    }
}
