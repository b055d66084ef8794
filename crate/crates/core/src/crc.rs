//! Bit-serial CRC used by CRC-aided list decoding.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrcConfig {
    pub width: u32,
    /// Generator polynomial without its leading `x^width` term.
    pub poly: u32,
    pub init: u32,
    pub reflect_in: bool,
    pub reflect_out: bool,
    pub xor_out: u32,
}

impl Default for CrcConfig {
    /// CRC-16 with polynomial 0x1021, init 0xFFFF, no reflection, no final xor.
    fn default() -> Self {
        Self {
            width: 16,
            poly: 0x1021,
            init: 0xFFFF,
            reflect_in: false,
            reflect_out: false,
            xor_out: 0,
        }
    }
}

fn reflect(value: u32, width: u32) -> u32 {
    value.reverse_bits() >> (32 - width)
}

impl CrcConfig {
    pub fn validate(&self) -> Result<()> {
        if ![8, 16, 24].contains(&self.width) {
            return invalid(format!("CRC width must be 8, 16 or 24, got {}", self.width));
        }
        let mask = self.mask();
        if self.poly > mask || self.init > mask || self.xor_out > mask {
            return invalid("CRC polynomial/init/xor wider than the CRC");
        }
        if self.poly & 1 == 0 {
            return invalid("CRC polynomial must have a constant term");
        }
        Ok(())
    }

    fn mask(&self) -> u32 {
        ((1u64 << self.width) - 1) as u32
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    /// CRC register value over a bit sequence (one bit per byte, 0/1).
    pub fn compute(&self, bits: &[u8]) -> Result<u32> {
        self.validate()?;
        if bits.is_empty() {
            return invalid("CRC payload is empty");
        }
        if self.reflect_in && bits.len() % 8 != 0 {
            return invalid("reflected CRC input needs a whole number of bytes");
        }
        let mask = self.mask();
        let top = self.width - 1;
        let mut reg = self.init;
        let mut feed = |b: u8| {
            let fb = ((reg >> top) & 1) ^ u32::from(b & 1);
            reg = (reg << 1) & mask;
            if fb == 1 {
                reg ^= self.poly;
            }
        };
        if self.reflect_in {
            for byte in bits.chunks(8) {
                byte.iter().rev().for_each(|&b| feed(b));
            }
        } else {
            bits.iter().for_each(|&b| feed(b));
        }
        if self.reflect_out {
            reg = reflect(reg, self.width);
        }
        Ok(reg ^ self.xor_out)
    }

    /// Payload followed by its CRC, most significant CRC bit first.
    pub fn attach(&self, payload: &[u8]) -> Result<Vec<u8>> {
        let crc = self.compute(payload)?;
        let mut out = payload.to_vec();
        out.extend((0..self.width).rev().map(|k| ((crc >> k) & 1) as u8));
        Ok(out)
    }

    /// True when the trailing `width` bits are the CRC of the rest.
    pub fn check(&self, bits: &[u8]) -> bool {
        let w = self.width();
        if bits.len() <= w {
            return false;
        }
        let (payload, tail) = bits.split_at(bits.len() - w);
        let expected = match self.compute(payload) {
            Ok(c) => c,
            Err(_) => return false,
        };
        tail.iter()
            .zip((0..self.width).rev())
            .all(|(&b, k)| u32::from(b) == (expected >> k) & 1)
    }
}

pub fn crc_attach(payload: &[u8], crc: &CrcConfig) -> Result<Vec<u8>> {
    crc.attach(payload)
}

pub fn crc_check(bits: &[u8], crc: &CrcConfig) -> bool {
    crc.check(bits)
}

impl fmt::Display for CrcConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "width={},poly=0x{:x},init=0x{:x},refin={},refout={},xorout=0x{:x}",
            self.width, self.poly, self.init, self.reflect_in, self.reflect_out, self.xor_out
        )
    }
}

fn parse_hex(v: &str) -> Result<u32> {
    let digits = v.strip_prefix("0x").unwrap_or(v);
    u32::from_str_radix(digits, 16)
        .map_err(|_| crate::Error::InvalidParameter(format!("bad hex value '{v}'")))
}

impl FromStr for CrcConfig {
    type Err = crate::Error;

    /// Parses the `Display` form; omitted keys keep their default.
    fn from_str(s: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| crate::Error::InvalidParameter(format!("bad CRC item '{item}'")))?;
            let flag = |v: &str| match v {
                "true" => Ok(true),
                "false" => Ok(false),
                _ => invalid(format!("bad boolean '{v}'")),
            };
            match k {
                "width" => {
                    cfg.width = v
                        .parse()
                        .map_err(|_| crate::Error::InvalidParameter(format!("bad width '{v}'")))?
                }
                "poly" => cfg.poly = parse_hex(v)?,
                "init" => cfg.init = parse_hex(v)?,
                "refin" => cfg.reflect_in = flag(v)?,
                "refout" => cfg.reflect_out = flag(v)?,
                "xorout" => cfg.xor_out = parse_hex(v)?,
                _ => return invalid(format!("unknown CRC key '{k}'")),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
