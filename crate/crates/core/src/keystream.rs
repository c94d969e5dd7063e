//! Logistic-map key generator.
//!
//! The map `x -> mu * x * (1 - x)` is iterated in binary64 with a fixed
//! evaluation order, so a given [`KeyMaterial`] yields the same byte stream on
//! every IEEE-754 platform. Each key byte is the first eight bits of the binary
//! fraction of the state reached *after* an iterate; the seed value itself is
//! never emitted.

use std::fmt;

use crate::error::KeyError;

/// Exclusive lower bound on the control parameter (the accumulation point).
pub const MU_MIN: f64 = 3.57;
/// Exclusive upper bound on the control parameter.
pub const MU_MAX: f64 = 4.0;
/// Iterates discarded before the first key byte unless told otherwise.
pub const DEFAULT_BURN_IN: u64 = 1000;

/// Control parameter, initial state and burn-in length of the keystream.
///
/// Fields are private so that every value in circulation has passed
/// validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyMaterial {
    mu: f64,
    x0: f64,
    burn_in: u64,
}

impl KeyMaterial {
    pub fn new(mu: f64, x0: f64, burn_in: u64) -> Result<Self, KeyError> {
        if !(mu.is_finite() && mu > MU_MIN && mu < MU_MAX) {
            return Err(KeyError::Range {
                name: "mu",
                value: mu,
                range: "(3.57, 4.0)",
            });
        }
        if !(x0.is_finite() && x0 > 0.0 && x0 < 1.0) {
            return Err(KeyError::Range {
                name: "x0",
                value: x0,
                range: "(0, 1)",
            });
        }
        if x0 == 1.0 - 1.0 / mu {
            return Err(KeyError::FixedPoint { mu, x0 });
        }
        Ok(Self { mu, x0, burn_in })
    }

    /// Parses decimal strings; conversion to binary64 rounds to nearest-even.
    pub fn from_decimal(mu: &str, x0: &str, burn_in: u64) -> Result<Self, KeyError> {
        Self::new(parse_decimal("mu", mu)?, parse_decimal("x0", x0)?, burn_in)
    }

    /// Derives a key from 64 hex digits (256 bits).
    ///
    /// The high 128 bits `k1` select `mu = 3.9 + 0.1 * k1 / 2^128` and the low
    /// 128 bits `k2` select `x0 = (k2 + 1) / (2^128 + 2)`. Near the top of the
    /// range binary64 rounding lands on the excluded bounds 4.0 and 1.0; such
    /// values are pulled back to the largest representable value below the bound.
    pub fn from_hex(hex_key: &str) -> Result<Self, KeyError> {
        let hex_key = hex_key.trim();
        if hex_key.len() != 64 {
            return Err(KeyError::Parse(format!(
                "expected 64 hex digits, got {}",
                hex_key.len()
            )));
        }
        let mut raw = [0u8; 32];
        hex::decode_to_slice(hex_key, &mut raw)
            .map_err(|e| KeyError::Parse(format!("invalid hex key: {e}")))?;
        let (hi, lo) = raw.split_at(16);
        let k1 = u128::from_be_bytes(hi.try_into().expect("16 bytes"));
        let k2 = u128::from_be_bytes(lo.try_into().expect("16 bytes"));

        let two_128 = 2f64.powi(128);
        let mu = (3.9 + 0.1 * (k1 as f64 / two_128)).min(below(MU_MAX));
        let x0 = ((k2 as f64 + 1.0) / (two_128 + 2.0)).min(below(1.0));
        Self::new(mu, x0, DEFAULT_BURN_IN)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn burn_in(&self) -> u64 {
        self.burn_in
    }

    /// Same map parameters with a different burn-in.
    pub fn with_burn_in(self, burn_in: u64) -> Self {
        Self { burn_in, ..self }
    }
}

impl fmt::Display for KeyMaterial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mu={} x0={} burn_in={}", self.mu, self.x0, self.burn_in)
    }
}

fn parse_decimal(name: &str, s: &str) -> Result<f64, KeyError> {
    let s = s.trim();
    let looks_decimal = !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | '+' | '-' | 'e' | 'E'));
    match s.parse::<f64>() {
        Ok(v) if looks_decimal && v.is_finite() => Ok(v),
        _ => Err(KeyError::Parse(format!(
            "{name}: {s:?} is not a finite decimal"
        ))),
    }
}

/// Largest binary64 value strictly below a positive finite `bound`.
fn below(bound: f64) -> f64 {
    f64::from_bits(bound.to_bits() - 1)
}

/// One iterate of the logistic map, evaluated as `t = 1 - x; u = x * t; mu * u`.
#[inline]
pub fn logistic_step(x: f64, mu: f64) -> f64 {
    let t = 1.0 - x;
    let u = x * t;
    mu * u
}

/// First eight bits of the binary fraction of `x` in `[0, 1)`.
#[inline]
pub fn msb_byte(x: f64) -> u8 {
    (x * 256.0).floor().min(255.0) as u8
}

/// Position of a keystream: current map value and number of iterates applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeystreamState {
    pub x: f64,
    pub n: u64,
}

/// Sequential key-byte generator.
///
/// Values are `Copy`; cloning a generator forks an identical, independent
/// stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Keystream {
    mu: f64,
    state: KeystreamState,
}

impl Keystream {
    /// Generator positioned at the seed, `n = 0`, burn-in not applied.
    pub fn at_seed(key: &KeyMaterial) -> Self {
        Self {
            mu: key.mu,
            state: KeystreamState { x: key.x0, n: 0 },
        }
    }

    /// Generator positioned after the key's burn-in.
    pub fn new(key: &KeyMaterial) -> Self {
        let mut ks = Self::at_seed(key);
        ks.advance(key.burn_in);
        ks
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn state(&self) -> KeystreamState {
        self.state
    }

    /// Advances the map once and returns the new state value.
    #[inline]
    pub fn next_value(&mut self) -> f64 {
        self.state.x = logistic_step(self.state.x, self.mu);
        self.state.n += 1;
        self.state.x
    }

    /// Advances the map once and returns the key byte of the new state.
    #[inline]
    pub fn next_byte(&mut self) -> u8 {
        msb_byte(self.next_value())
    }

    pub fn fill(&mut self, out: &mut [u8]) {
        for b in out {
            *b = self.next_byte();
        }
    }

    /// Applies `count` iterates without producing output.
    pub fn advance(&mut self, count: u64) {
        let mut x = self.state.x;
        for _ in 0..count {
            x = logistic_step(x, self.mu);
        }
        self.state.x = x;
        self.state.n += count;
    }

    pub fn skipped(mut self, count: u64) -> Self {
        self.advance(count);
        self
    }
}

impl Iterator for Keystream {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        Some(self.next_byte())
    }
}
