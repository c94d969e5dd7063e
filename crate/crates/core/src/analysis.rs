//! Statistical measures used to judge ciphertext quality: byte histograms,
//! Shannon entropy, Pearson correlation between planes, key sensitivity, and
//! the value distribution of the raw logistic map.

use std::fmt;

use crate::cipher::{encrypt_image, Frame};
use crate::error::{Error, Result};
use crate::keystream::{KeyMaterial, Keystream};

/// Count of each byte value.
#[derive(Clone, PartialEq, Eq)]
pub struct Histogram256 {
    pub counts: [u64; 256],
}

impl fmt::Debug for Histogram256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Histogram256")
            .field("total", &self.total())
            .finish_non_exhaustive()
    }
}

impl Default for Histogram256 {
    fn default() -> Self {
        Self { counts: [0; 256] }
    }
}

impl Histogram256 {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Shannon entropy in bits, with `0 * log 0 = 0`.
    pub fn entropy(&self) -> Result<f64> {
        let total = self.total();
        if total == 0 {
            return Err(Error::EmptyInput);
        }
        let n = total as f64;
        let h: f64 = self
            .counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                p * (n / c as f64).log2()
            })
            .sum();
        Ok(h.clamp(0.0, 8.0))
    }

    /// `value,count` header followed by one row per byte value.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("value,count\n");
        for (v, c) in self.counts.iter().enumerate() {
            s.push_str(&format!("{v},{c}\n"));
        }
        s
    }
}

pub fn histogram256(data: &[u8]) -> Histogram256 {
    let mut h = Histogram256::default();
    for &b in data {
        h.counts[b as usize] += 1;
    }
    h
}

pub fn shannon_entropy(data: &[u8]) -> Result<f64> {
    histogram256(data).entropy()
}

/// Pearson correlation of two equally sized planes, flattened.
pub fn corr2d<T: Copy + Into<f64>>(a: &[T], b: &[T]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "planes hold {} and {} samples",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = a.len() as f64;
    let mean_a = a.iter().map(|&v| v.into()).sum::<f64>() / n;
    let mean_b = b.iter().map(|&v| v.into()).sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let dx = x.into() - mean_a;
        let dy = y.into() - mean_b;
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::DegenerateInput(
            "correlation is undefined for a constant plane".into(),
        ));
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// Per-channel correlation of two frames and the mean over channels.
pub fn corr_frames(a: &Frame, b: &Frame) -> Result<(Vec<f64>, f64)> {
    if !a.same_shape(b) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{}x{} vs {}x{}x{}",
            a.width(),
            a.height(),
            a.channels(),
            b.width(),
            b.height(),
            b.channels()
        )));
    }
    let per = a
        .planes()
        .zip(b.planes())
        .map(|(pa, pb)| corr2d(pa, pb))
        .collect::<Result<Vec<_>>>()?;
    let mean = per.iter().sum::<f64>() / per.len() as f64;
    Ok((per, mean))
}

/// Correlation between the encryptions of one frame under two keys.
pub fn key_sensitivity(frame: &Frame, key_a: &KeyMaterial, key_b: &KeyMaterial) -> Result<f64> {
    let ca = encrypt_image(frame, key_a);
    let cb = encrypt_image(frame, key_b);
    Ok(corr_frames(&ca, &cb)?.1)
}

/// Histogram of raw map values after burn-in, `bins` equal bins over `[0, 1]`.
pub fn keystream_histogram(key: &KeyMaterial, iterations: u64, bins: usize) -> Result<Vec<u64>> {
    if bins == 0 || iterations < bins as u64 {
        return Err(Error::InvalidArgument(format!(
            "need iterations >= bins > 0, got iterations={iterations} bins={bins}"
        )));
    }
    let mut counts = vec![0u64; bins];
    let mut ks = Keystream::new(key);
    for _ in 0..iterations {
        let x = ks.next_value();
        let idx = ((x * bins as f64) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(counts)
}

/// `(low, high)` ends of the interval the map settles into:
/// `mu^2 (4 - mu) / 16` and `mu / 4`.
pub fn attractor_bounds(mu: f64) -> (f64, f64) {
    (mu * mu * (4.0 - mu) / 16.0, mu / 4.0)
}

/// Largest bin divided by the median bin (mean of the two middle bins for an
/// even count).
pub fn max_to_median_ratio(counts: &[u64]) -> f64 {
    if counts.is_empty() {
        return f64::NAN;
    }
    let mut sorted = counts.to_vec();
    sorted.sort_unstable();
    let m = sorted.len();
    let median = if m % 2 == 1 {
        sorted[m / 2] as f64
    } else {
        (sorted[m / 2 - 1] + sorted[m / 2]) as f64 / 2.0
    };
    sorted[m - 1] as f64 / median
}

/// Metrics of one channel of a plaintext/ciphertext pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelMetrics {
    pub entropy_original: f64,
    pub entropy_encrypted: f64,
    pub corr_plain_cipher: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    /// Entropy over all bytes of the plaintext frame.
    pub entropy_original: f64,
    pub entropy_encrypted: f64,
    /// Mean of the per-channel correlations.
    pub corr_plain_cipher: f64,
    /// One entry per channel; empty for grayscale.
    pub channels: Vec<ChannelMetrics>,
}

const CHANNEL_NAMES: [&str; 3] = ["r", "g", "b"];

impl MetricsReport {
    pub fn compute(plain: &Frame, cipher: &Frame) -> Result<Self> {
        let (per_corr, corr) = corr_frames(plain, cipher)?;
        let channels = if plain.channels() == 3 {
            plain
                .planes()
                .zip(cipher.planes())
                .zip(per_corr)
                .map(|((p, c), r)| {
                    Ok(ChannelMetrics {
                        entropy_original: shannon_entropy(p)?,
                        entropy_encrypted: shannon_entropy(c)?,
                        corr_plain_cipher: r,
                    })
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        Ok(Self {
            entropy_original: shannon_entropy(plain.data())?,
            entropy_encrypted: shannon_entropy(cipher.data())?,
            corr_plain_cipher: corr,
            channels,
        })
    }

    /// Machine-readable `key=value` lines.
    pub fn to_key_values(&self) -> String {
        let mut s = format!(
            "entropy_plain={:.6}\nentropy_cipher={:.6}\ncorr={:.6}\n",
            self.entropy_original, self.entropy_encrypted, self.corr_plain_cipher
        );
        for (name, c) in CHANNEL_NAMES.iter().zip(&self.channels) {
            s.push_str(&format!(
                "entropy_plain.{name}={:.6}\nentropy_cipher.{name}={:.6}\ncorr.{name}={:.6}\n",
                c.entropy_original, c.entropy_encrypted, c.corr_plain_cipher
            ));
        }
        s
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "entropy of original image:  {:.4}",
            self.entropy_original
        )?;
        writeln!(
            f,
            "entropy of encrypted image: {:.4}",
            self.entropy_encrypted
        )?;
        writeln!(
            f,
            "2-D correlation (plain vs cipher): {:.4}",
            self.corr_plain_cipher
        )?;
        for (name, c) in CHANNEL_NAMES.iter().zip(&self.channels) {
            writeln!(
                f,
                "  {name}: entropy {:.4} -> {:.4}, correlation {:.4}",
                c.entropy_original, c.entropy_encrypted, c.corr_plain_cipher
            )?;
        }
        Ok(())
    }
}
