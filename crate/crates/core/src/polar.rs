//! Polar encoding over `F^{⊗n}` and SC / SCL / CRC-aided SCL decoding.
//!
//! Indices are in natural order (no bit-reversal): `x = u · F^{⊗n}` with
//! `F = [[1, 0], [1, 1]]`. Recursively, for `u = (u_a, u_b)`,
//! `x = (enc(u_a) ⊕ enc(u_b), enc(u_b))`, so bit 0 is decided first and the
//! most significant index bit selects the left/right subtree at the root.
//!
//! LLRs are `ln P(bit = 0) / P(bit = 1)`.

use std::fmt;
use std::str::FromStr;

use crate::crc::CrcConfig;
use crate::error::{invalid, Result};

/// One binary polar code: block length, frozen set and frozen values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarCodeLevel {
    frozen: Vec<bool>,
    frozen_values: Vec<u8>,
    info: Vec<usize>,
}

impl PolarCodeLevel {
    /// Frozen bits fixed to zero.
    pub fn new(frozen: Vec<bool>) -> Result<Self> {
        let values = vec![0; frozen.len()];
        Self::with_frozen_values(frozen, values)
    }

    pub fn with_frozen_values(frozen: Vec<bool>, frozen_values: Vec<u8>) -> Result<Self> {
        let n = frozen.len();
        if n == 0 || !n.is_power_of_two() {
            return invalid(format!("block length {n} is not a power of two"));
        }
        if frozen_values.len() != n || frozen_values.iter().any(|&v| v > 1) {
            return invalid("frozen values must be N bits");
        }
        let info = (0..n).filter(|&i| !frozen[i]).collect();
        Ok(Self {
            frozen,
            frozen_values,
            info,
        })
    }

    /// Code of length `n` whose information positions are `info`.
    pub fn from_info_set(n: usize, info: &[usize]) -> Result<Self> {
        let mut frozen = vec![true; n];
        for &i in info {
            if i >= n {
                return invalid(format!("information index {i} out of range"));
            }
            frozen[i] = false;
        }
        Self::new(frozen)
    }

    pub fn block_length(&self) -> usize {
        self.frozen.len()
    }

    pub fn info_count(&self) -> usize {
        self.info.len()
    }

    pub fn info_indices(&self) -> &[usize] {
        &self.info
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen
    }

    pub fn frozen_values(&self) -> &[u8] {
        &self.frozen_values
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen[i]
    }

    /// Places information bits on the information positions of `u`.
    pub fn embed(&self, info_bits: &[u8]) -> Result<Vec<u8>> {
        if info_bits.len() != self.info.len() {
            return invalid(format!(
                "expected {} information bits, got {}",
                self.info.len(),
                info_bits.len()
            ));
        }
        let mut u = self.frozen_values.clone();
        for (&i, &b) in self.info.iter().zip(info_bits) {
            u[i] = b;
        }
        Ok(u)
    }

    pub fn extract(&self, u: &[u8]) -> Vec<u8> {
        self.info.iter().map(|&i| u[i]).collect()
    }
}

/// In-place `x = u · F^{⊗n}` butterfly.
pub fn polar_transform(bits: &mut [u8]) {
    let n = bits.len();
    debug_assert!(n.is_power_of_two());
    let mut half = 1;
    while half < n {
        for block in bits.chunks_mut(2 * half) {
            let (a, b) = block.split_at_mut(half);
            for (x, y) in a.iter_mut().zip(b.iter()) {
                *x ^= *y;
            }
        }
        half *= 2;
    }
}

pub fn polar_encode(code: &PolarCodeLevel, u: &[u8]) -> Result<Vec<u8>> {
    if u.len() != code.block_length() {
        return invalid(format!(
            "input has {} bits, code length is {}",
            u.len(),
            code.block_length()
        ));
    }
    for i in 0..u.len() {
        if u[i] > 1 {
            return invalid(format!("bit {i} has value {}", u[i]));
        }
        if code.frozen[i] && u[i] != code.frozen_values[i] {
            return invalid(format!("frozen position {i} carries {}", u[i]));
        }
    }
    let mut x = u.to_vec();
    polar_transform(&mut x);
    Ok(x)
}

/// Check-node update `2·atanh(tanh(a/2)·tanh(b/2))`, evaluated in the log
/// domain so it stays exact for large magnitudes.
#[inline]
pub fn f_exact(a: f64, b: f64) -> f64 {
    let s = a + b;
    let d = a - b;
    s.max(0.0) - a.max(b) + (-s.abs()).exp().ln_1p() - (-d.abs()).exp().ln_1p()
}

/// Variable-node update given the left partial sum.
#[inline]
pub fn g_update(a: f64, b: f64, u: u8) -> f64 {
    if u == 0 {
        b + a
    } else {
        b - a
    }
}

#[inline]
fn penalty(llr: f64, bit: u8) -> f64 {
    if (bit == 0 && llr < 0.0) || (bit == 1 && llr > 0.0) {
        llr.abs()
    } else {
        0.0
    }
}

#[inline]
fn hard(llr: f64) -> u8 {
    u8::from(llr < 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub u_hat: Vec<u8>,
    pub info_bits: Vec<u8>,
    pub path_metric: f64,
    /// Set only by CRC-aided decoding.
    pub crc_ok: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecoderKind {
    Sc,
    Scl,
    CaScl,
}

impl DecoderKind {
    pub fn uses_crc(self) -> bool {
        self == Self::CaScl
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Sc => "SC",
            Self::Scl => "SCL",
            Self::CaScl => "CASCL",
        })
    }
}

impl FromStr for DecoderKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sc" => Ok(Self::Sc),
            "scl" => Ok(Self::Scl),
            "cascl" | "ca-scl" => Ok(Self::CaScl),
            _ => invalid(format!("unknown decoder '{s}' (expected SC, SCL or CASCL)")),
        }
    }
}

/// Decoder state of one path: per-depth LLRs and partial sums.
#[derive(Debug, Clone)]
struct PathState {
    /// Depths 1..=n; depth d holds `N >> d` values.
    llr: Vec<f64>,
    /// Depth 0 holds the re-encoded word (N bits); depth d >= 1 holds a
    /// left slot and a right slot of `N >> d` bits each.
    sums: Vec<u8>,
    u: Vec<u8>,
    metric: f64,
}

/// Reusable scratch for decoding codes of one block length.
#[derive(Debug, Clone)]
pub struct PolarDecoder {
    n: usize,
    depth: usize,
    llr_off: Vec<usize>,
    sums_off: Vec<usize>,
    pool: Vec<PathState>,
    active: Vec<usize>,
    candidates: Vec<(f64, usize, u8)>,
    leaf: Vec<f64>,
}

impl PolarDecoder {
    pub fn new(block_length: usize) -> Result<Self> {
        if block_length == 0 || !block_length.is_power_of_two() {
            return invalid(format!("block length {block_length} is not a power of two"));
        }
        let n = block_length;
        let depth = n.trailing_zeros() as usize;
        let mut llr_off = vec![0; depth + 1];
        let mut sums_off = vec![0; depth + 1];
        let (mut lo, mut so) = (0, n);
        for d in 1..=depth {
            llr_off[d] = lo;
            lo += n >> d;
            sums_off[d] = so;
            so += 2 * (n >> d);
        }
        let mut dec = Self {
            n,
            depth,
            llr_off,
            sums_off,
            pool: Vec::new(),
            active: Vec::new(),
            candidates: Vec::new(),
            leaf: Vec::new(),
        };
        dec.ensure_pool(1);
        Ok(dec)
    }

    pub fn block_length(&self) -> usize {
        self.n
    }

    fn ensure_pool(&mut self, size: usize) {
        let llr_len = self.n.saturating_sub(1);
        let sums_len = 3 * self.n - 2;
        while self.pool.len() < size {
            self.pool.push(PathState {
                llr: vec![0.0; llr_len],
                sums: vec![0; sums_len],
                u: vec![0; self.n],
                metric: 0.0,
            });
        }
    }

    fn check_input(&self, code: &PolarCodeLevel, llr: &[f64]) -> Result<()> {
        if code.block_length() != self.n || llr.len() != self.n {
            return invalid(format!(
                "decoder length {}, code length {}, {} LLRs",
                self.n,
                code.block_length(),
                llr.len()
            ));
        }
        if let Some(i) = llr.iter().position(|l| !l.is_finite()) {
            return invalid(format!("LLR {i} is not finite"));
        }
        Ok(())
    }

    /// LLR of leaf `i` for one path, given its decisions on leaves `< i`.
    fn leaf_llr(&self, state: &mut PathState, channel: &[f64], i: usize) -> f64 {
        let n = self.n;
        let depth = self.depth;
        if depth == 0 {
            return channel[0];
        }
        let start = if i == 0 {
            0
        } else {
            depth - 1 - i.trailing_zeros() as usize
        };
        for d in start..depth {
            let child_len = n >> (d + 1);
            let co = self.llr_off[d + 1];
            let right = i != 0 && d == start;
            for k in 0..child_len {
                let (a, b) = if d == 0 {
                    (channel[k], channel[k + child_len])
                } else {
                    let po = self.llr_off[d];
                    (state.llr[po + k], state.llr[po + k + child_len])
                };
                state.llr[co + k] = if right {
                    g_update(a, b, state.sums[self.sums_off[d + 1] + k])
                } else {
                    f_exact(a, b)
                };
            }
        }
        state.llr[self.llr_off[depth]]
    }

    /// Records decision `bit` on leaf `i` and propagates partial sums.
    fn push_bit(&self, state: &mut PathState, i: usize, bit: u8) {
        let depth = self.depth;
        state.u[i] = bit;
        if depth == 0 {
            state.sums[0] = bit;
            return;
        }
        state.sums[self.sums_off[depth] + (i & 1)] = bit;
        let mut d = depth;
        while d >= 1 && (i >> (depth - d)) & 1 == 1 {
            let len = self.n >> d;
            let here = self.sums_off[d];
            let parent = if d == 1 {
                0
            } else {
                self.sums_off[d - 1] + ((i >> (depth - d + 1)) & 1) * 2 * len
            };
            for k in 0..len {
                let l = state.sums[here + k];
                let r = state.sums[here + len + k];
                state.sums[parent + k] = l ^ r;
                state.sums[parent + len + k] = r;
            }
            d -= 1;
        }
    }

    fn result(&self, code: &PolarCodeLevel, slot: usize, crc_ok: Option<bool>) -> DecodeResult {
        let st = &self.pool[slot];
        DecodeResult {
            u_hat: st.u.clone(),
            info_bits: code.extract(&st.u),
            path_metric: st.metric,
            crc_ok,
        }
    }

    /// Successive cancellation decoding.
    pub fn sc(&mut self, code: &PolarCodeLevel, llr: &[f64]) -> Result<DecodeResult> {
        self.check_input(code, llr)?;
        let mut st = std::mem::replace(&mut self.pool[0], empty_state());
        st.metric = 0.0;
        for i in 0..self.n {
            let l = self.leaf_llr(&mut st, llr, i);
            let bit = if code.frozen[i] {
                code.frozen_values[i]
            } else {
                hard(l)
            };
            st.metric += penalty(l, bit);
            self.push_bit(&mut st, i, bit);
        }
        self.pool[0] = st;
        Ok(self.result(code, 0, None))
    }

    /// Runs list decoding; leaves `self.active` sorted by ascending metric.
    fn list_decode(&mut self, code: &PolarCodeLevel, llr: &[f64], list: usize) -> Result<()> {
        self.check_input(code, llr)?;
        if !list.is_power_of_two() || list > 64 {
            return invalid(format!("list size must be a power of two in 1..=64, got {list}"));
        }
        self.ensure_pool(list);
        self.active.clear();
        self.active.push(0);
        self.pool[0].metric = 0.0;
        let mut free: Vec<usize> = (1..list).rev().collect();
        let mut pool = std::mem::take(&mut self.pool);

        for i in 0..self.n {
            self.leaf.clear();
            for &slot in &self.active {
                let l = self.leaf_llr(&mut pool[slot], llr, i);
                self.leaf.push(l);
            }
            if code.frozen[i] {
                let bit = code.frozen_values[i];
                for (&slot, &l) in self.active.iter().zip(&self.leaf) {
                    pool[slot].metric += penalty(l, bit);
                    self.push_bit(&mut pool[slot], i, bit);
                }
                continue;
            }

            self.candidates.clear();
            for (p, (&slot, &l)) in self.active.iter().zip(&self.leaf).enumerate() {
                // The hard decision goes first so that a penalty lost to
                // rounding in `base` still ties in its favour.
                let base = pool[slot].metric;
                let h = hard(l);
                self.candidates.push((base, p, h));
                self.candidates.push((base + l.abs(), p, 1 - h));
            }
            if self.candidates.len() > list {
                // Stable: equal metrics keep path order, hard decision first.
                self.candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
                self.candidates.truncate(list);
                self.candidates.sort_by_key(|&(_, p, b)| (p, b));
            }

            let mut kept = [0u8; 128];
            for &(_, p, b) in &self.candidates {
                kept[p] |= 1 << b;
            }
            for (p, &slot) in self.active.iter().enumerate() {
                if kept[p] == 0 {
                    free.push(slot);
                }
            }
            let mut next = Vec::with_capacity(self.candidates.len());
            let mut owner = [usize::MAX; 64];
            for &(metric, p, b) in &self.candidates {
                let parent = self.active[p];
                let slot = if owner[p] == usize::MAX {
                    owner[p] = parent;
                    parent
                } else {
                    let dst = free.pop().expect("list slot available");
                    copy_state(&mut pool, parent, dst);
                    dst
                };
                next.push((slot, metric, b));
            }
            // Children sharing a parent were copied before any decision was applied.
            for &(slot, metric, b) in &next {
                pool[slot].metric = metric;
                self.push_bit(&mut pool[slot], i, b);
            }
            self.active.clear();
            self.active.extend(next.iter().map(|&(s, _, _)| s));
        }
        self.pool = pool;
        let pool = &self.pool;
        self.active
            .sort_by(|&a, &b| pool[a].metric.total_cmp(&pool[b].metric));
        Ok(())
    }

    /// List decoding; returns the lowest-metric path.
    pub fn scl(&mut self, code: &PolarCodeLevel, llr: &[f64], list: usize) -> Result<DecodeResult> {
        self.list_decode(code, llr, list)?;
        Ok(self.result(code, self.active[0], None))
    }

    /// List decoding; returns the best path whose information bits end with
    /// a valid CRC, or the best path with `crc_ok = Some(false)`.
    pub fn ca_scl(
        &mut self,
        code: &PolarCodeLevel,
        llr: &[f64],
        list: usize,
        crc: &CrcConfig,
    ) -> Result<DecodeResult> {
        crc.validate()?;
        if code.info_count() <= crc.width() {
            return invalid(format!(
                "{} information bits cannot carry a {}-bit CRC",
                code.info_count(),
                crc.width
            ));
        }
        self.list_decode(code, llr, list)?;
        for &slot in &self.active {
            let info = code.extract(&self.pool[slot].u);
            if crc.check(&info) {
                return Ok(self.result(code, slot, Some(true)));
            }
        }
        Ok(self.result(code, self.active[0], Some(false)))
    }

    pub fn decode(
        &mut self,
        kind: DecoderKind,
        code: &PolarCodeLevel,
        llr: &[f64],
        list: usize,
        crc: &CrcConfig,
    ) -> Result<DecodeResult> {
        match kind {
            DecoderKind::Sc => self.sc(code, llr),
            DecoderKind::Scl => self.scl(code, llr, list),
            DecoderKind::CaScl => self.ca_scl(code, llr, list, crc),
        }
    }
}

fn empty_state() -> PathState {
    PathState {
        llr: Vec::new(),
        sums: Vec::new(),
        u: Vec::new(),
        metric: 0.0,
    }
}

fn copy_state(pool: &mut [PathState], src: usize, dst: usize) {
    debug_assert_ne!(src, dst);
    if src < dst {
        let (a, b) = pool.split_at_mut(dst);
        b[0].clone_from(&a[src]);
    } else {
        let (a, b) = pool.split_at_mut(src);
        a[dst].clone_from(&b[0]);
    }
}

pub fn sc_decode(code: &PolarCodeLevel, llr: &[f64]) -> Result<DecodeResult> {
    PolarDecoder::new(code.block_length())?.sc(code, llr)
}

pub fn scl_decode(code: &PolarCodeLevel, llr: &[f64], list: usize) -> Result<DecodeResult> {
    PolarDecoder::new(code.block_length())?.scl(code, llr, list)
}

pub fn ca_scl_decode(
    code: &PolarCodeLevel,
    llr: &[f64],
    list: usize,
    crc: &CrcConfig,
) -> Result<DecodeResult> {
    PolarDecoder::new(code.block_length())?.ca_scl(code, llr, list, crc)
}
