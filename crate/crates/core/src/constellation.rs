//! PAM geometry, constellation labelings and the enumeration of labelings
//! that are distinct up to per-component bit complementation.
//!
//! Bit vectors are stored as integers with `b_1` in the least significant
//! bit, so "the first j-1 bits" of a vector `u` is `u & ((1 << (j-1)) - 1)`.
//! Level j is decoded j-th by the multistage receiver, which is why the
//! recursive set splitting starts from `b_1`: the first split separates the
//! whole constellation by `b_1`, the next splits each half by `b_2`, and so on.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, parse_err, Result};

/// Largest supported bits-per-symbol for constellations.
pub const MAX_BITS_PER_SYMBOL: usize = 6;

/// Equally spaced real amplitudes with unit average energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    bits_per_symbol: usize,
    points: Vec<f64>,
}

impl Constellation {
    /// Builds 2^m-PAM: amplitudes `2k - (2^m - 1)`, scaled to unit mean energy.
    pub fn pam(m: usize) -> Result<Self> {
        if !(1..=MAX_BITS_PER_SYMBOL).contains(&m) {
            return invalid(format!("bits per symbol must be in 1..={MAX_BITS_PER_SYMBOL}, got {m}"));
        }
        let order = 1usize << m;
        let raw: Vec<f64> = (0..order)
            .map(|k| (2 * k) as f64 - (order - 1) as f64)
            .collect();
        // Mean of the squared odd integers 1, 9, ..., (M-1)^2 is (M^2 - 1) / 3.
        let energy = ((order * order - 1) as f64) / 3.0;
        let scale = energy.sqrt().recip();
        Ok(Self {
            bits_per_symbol: m,
            points: raw.into_iter().map(|a| a * scale).collect(),
        })
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn point(&self, index: usize) -> f64 {
        self.points[index]
    }

    pub fn mean_energy(&self) -> f64 {
        self.points.iter().map(|p| p * p).sum::<f64>() / self.order() as f64
    }
}

/// Convenience alias for [`Constellation::pam`].
pub fn make_pam(m: usize) -> Result<Constellation> {
    Constellation::pam(m)
}

/// Bijection from m-bit vectors to constellation point indices.
///
/// `table[u]` is the point index carrying bit vector `u` (with `b_1` as the
/// least significant bit of `u`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Labeling {
    bits_per_symbol: usize,
    table: Vec<usize>,
}

impl Labeling {
    pub fn new(bits_per_symbol: usize, table: Vec<usize>) -> Result<Self> {
        if !(1..=MAX_BITS_PER_SYMBOL).contains(&bits_per_symbol) {
            return invalid(format!(
                "bits per symbol must be in 1..={MAX_BITS_PER_SYMBOL}, got {bits_per_symbol}"
            ));
        }
        let order = 1usize << bits_per_symbol;
        if table.len() != order {
            return invalid(format!(
                "labeling table has {} entries, expected {order}",
                table.len()
            ));
        }
        let mut seen = vec![false; order];
        for &p in &table {
            if p >= order || seen[p] {
                return invalid(format!("labeling table is not a permutation of 0..{order}"));
            }
            seen[p] = true;
        }
        Ok(Self {
            bits_per_symbol,
            table,
        })
    }

    /// Point index equals the bit-vector integer.
    pub fn natural(m: usize) -> Result<Self> {
        Self::new(m, (0..1usize << m).collect())
    }

    /// Binary-reflected Gray code: point k carries the label `k ^ (k >> 1)`.
    pub fn gray(m: usize) -> Result<Self> {
        let order = 1usize << m.min(MAX_BITS_PER_SYMBOL);
        let mut table = vec![0; order];
        for k in 0..order {
            table[k ^ (k >> 1)] = k;
        }
        Self::new(m, table)
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// Point index for the bit vector with integer value `u`.
    pub fn point_index(&self, u: usize) -> usize {
        self.table[u]
    }

    /// `inverse()[point]` is the bit-vector integer mapped onto `point`.
    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.order()];
        for (u, &p) in self.table.iter().enumerate() {
            inv[p] = u;
        }
        inv
    }

    /// Maps a bit vector `(b_1, ..., b_m)` to its amplitude in `c`.
    pub fn apply(&self, c: &Constellation, bits: &[u8]) -> Result<f64> {
        if c.bits_per_symbol() != self.bits_per_symbol || bits.len() != self.bits_per_symbol {
            return invalid(format!(
                "dimension mismatch: labeling m={}, constellation m={}, {} bits",
                self.bits_per_symbol,
                c.bits_per_symbol(),
                bits.len()
            ));
        }
        let u = bits_to_index(bits)?;
        Ok(c.point(self.table[u]))
    }

    /// Complements bit `level` (1-based) in every bit vector.
    pub fn complement_level(&self, level: usize) -> Self {
        assert!((1..=self.bits_per_symbol).contains(&level));
        let flip = 1usize << (level - 1);
        let table = (0..self.order()).map(|u| self.table[u ^ flip]).collect();
        Self {
            bits_per_symbol: self.bits_per_symbol,
            table,
        }
    }

    /// Complements bit `level` only in the vectors whose first `level - 1`
    /// bits equal `prefix`: the bit-flip symmetry of one component
    /// constellation in the recursive split.
    pub fn complement_component(&self, level: usize, prefix: usize) -> Self {
        assert!((1..=self.bits_per_symbol).contains(&level));
        let low_mask = (1usize << (level - 1)) - 1;
        assert!(prefix <= low_mask);
        let flip = 1usize << (level - 1);
        let table = (0..self.order())
            .map(|u| {
                if u & low_mask == prefix {
                    self.table[u ^ flip]
                } else {
                    self.table[u]
                }
            })
            .collect();
        Self {
            bits_per_symbol: self.bits_per_symbol,
            table,
        }
    }

    /// Representative of this labeling's equivalence class: at every split the
    /// component holding the lowest point index gets bit value 0.
    pub fn canonical(&self) -> Self {
        let mut lab = self.clone();
        for level in 1..=self.bits_per_symbol {
            let low_mask = (1usize << (level - 1)) - 1;
            let flip = 1usize << (level - 1);
            for prefix in 0..=low_mask {
                let lowest = (0..lab.order())
                    .filter(|u| u & low_mask == prefix)
                    .min_by_key(|&u| lab.table[u])
                    .expect("non-empty component");
                if lowest & flip != 0 {
                    lab = lab.complement_component(level, prefix);
                }
            }
        }
        lab
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical() == *self
    }

    /// Point indices joined by '-', e.g. `0-1-2-3`.
    pub fn dash_string(&self) -> String {
        self.table
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join("-")
    }

    pub fn from_dash_string(s: &str) -> Result<Self> {
        let table = s
            .trim()
            .split('-')
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| crate::Error::InvalidParameter(format!("bad labeling entry '{t}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        let order = table.len();
        if !order.is_power_of_two() || order < 2 {
            return invalid(format!("labeling has {order} entries, not a power of two >= 2"));
        }
        Self::new(order.trailing_zeros() as usize, table)
    }

    /// Labeling text file: `m=<int>` then one `<b_m..b_1> <point>` line per
    /// bit vector in increasing integer order.
    pub fn to_text(&self) -> String {
        let m = self.bits_per_symbol;
        let mut out = format!("m={m}\n");
        for (u, p) in self.table.iter().enumerate() {
            out.push_str(&format!("{u:0m$b} {p}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, first) = match lines.next() {
            Some(l) => l,
            None => return parse_err(1, "empty labeling file"),
        };
        let m: usize = match first.trim().strip_prefix("m=").map(str::parse) {
            Some(Ok(m)) if (1..=MAX_BITS_PER_SYMBOL).contains(&m) => m,
            _ => return parse_err(1, format!("expected 'm=<1..={MAX_BITS_PER_SYMBOL}>', got '{first}'")),
        };
        let order = 1usize << m;
        let mut table = vec![usize::MAX; order];
        let mut count = 0;
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (bits, point) = match (parts.next(), parts.next(), parts.next()) {
                (Some(b), Some(p), None) => (b, p),
                _ => return parse_err(lineno, "expected '<bits> <point-index>'"),
            };
            if bits.len() != m || !bits.bytes().all(|c| c == b'0' || c == b'1') {
                return parse_err(lineno, format!("bit string '{bits}' is not {m} binary digits"));
            }
            let u = usize::from_str_radix(bits, 2).expect("validated binary");
            let p: usize = match point.parse() {
                Ok(p) if p < order => p,
                _ => return parse_err(lineno, format!("point index '{point}' out of range")),
            };
            if table[u] != usize::MAX {
                return parse_err(lineno, format!("bit vector {bits} listed twice"));
            }
            table[u] = p;
            count += 1;
        }
        if count != order {
            return parse_err(order + 1, format!("expected {order} entries, found {count}"));
        }
        Self::new(m, table).map_err(|e| crate::Error::Parse {
            line: 0,
            msg: e.to_string(),
        })
    }
}

impl fmt::Display for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dash_string())
    }
}

/// Integer value of `(b_1, ..., b_m)` with `b_1` least significant.
pub fn bits_to_index(bits: &[u8]) -> Result<usize> {
    let mut u = 0usize;
    for (k, &b) in bits.iter().enumerate() {
        match b {
            0 => {}
            1 => u |= 1 << k,
            _ => return invalid(format!("bit value {b} is not 0 or 1")),
        }
    }
    Ok(u)
}

pub fn index_to_bits(u: usize, m: usize) -> Vec<u8> {
    (0..m).map(|k| ((u >> k) & 1) as u8).collect()
}

/// Where a labeling comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelingFamily {
    Natural,
    Gray,
    /// Position in the canonical enumeration order.
    Canonical(u64),
    Explicit(Labeling),
}

impl LabelingFamily {
    pub fn resolve(&self, m: usize) -> Result<Labeling> {
        match self {
            Self::Natural => Labeling::natural(m),
            Self::Gray => Labeling::gray(m),
            Self::Canonical(idx) => CanonicalLabelings::new(m, true)?.get(*idx),
            Self::Explicit(lab) if lab.bits_per_symbol() == m => Ok(lab.clone()),
            Self::Explicit(lab) => invalid(format!(
                "explicit labeling has m={}, expected {m}",
                lab.bits_per_symbol()
            )),
        }
    }
}

impl FromStr for LabelingFamily {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "natural" => Ok(Self::Natural),
            "gray" => Ok(Self::Gray),
            _ => {
                if let Some(idx) = s.strip_prefix("canonical:") {
                    return idx
                        .parse()
                        .map(Self::Canonical)
                        .map_err(|_| crate::Error::InvalidParameter(format!("bad index in '{s}'")));
                }
                Labeling::from_dash_string(s).map(Self::Explicit)
            }
        }
    }
}

/// `(2^m)! / 2^(2^m - 1)`: labelings distinct up to component bit flips.
pub fn count_candidates(m: usize) -> Result<u128> {
    if !(1..=5).contains(&m) {
        return invalid(format!("candidate count is supported for m in 1..=5, got {m}"));
    }
    let order = 1u128 << m;
    let factorial: u128 = (1..=order).product();
    Ok(factorial >> (order - 1))
}

/// Lexicographic list of all `r`-subsets of `0..n`.
fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..r).collect();
    if r > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = r;
        while i > 0 && cur[i - 1] == n - r + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for k in i..r {
            cur[k] = cur[k - 1] + 1;
        }
    }
}

/// Canonical labelings in depth-first split order, addressable by index.
///
/// Every split of a component (size s, at level j) keeps the component's
/// lowest point on the `b_j = 0` side and picks the other `s/2 - 1` members
/// of that side from the remaining `s - 1` points. The split tree has
/// `2^m - 1` nodes visited in pre-order (component, its `b_j = 0` child
/// subtree, its `b_j = 1` child subtree), and the last node varies fastest.
#[derive(Debug, Clone)]
pub struct CanonicalLabelings {
    m: usize,
    /// Combination tables indexed by level (0-based): subsets of positions
    /// `1..size` joining position 0 on the zero side.
    splits: Vec<Vec<Vec<usize>>>,
    len: u64,
}

impl CanonicalLabelings {
    /// `allow_large` must be set to enumerate m = 4 (about 6.4e8 labelings).
    pub fn new(m: usize, allow_large: bool) -> Result<Self> {
        if !(1..=4).contains(&m) {
            return invalid(format!("canonical enumeration supports m in 1..=4, got {m}"));
        }
        if m == 4 && !allow_large {
            return invalid("m=4 enumeration has ~6.4e8 labelings; pass the explicit opt-in to proceed");
        }
        let splits: Vec<Vec<Vec<usize>>> = (1..=m)
            .map(|level| {
                let size = 1usize << (m - level + 1);
                combinations(size - 1, size / 2 - 1)
                    .into_iter()
                    .map(|c| c.into_iter().map(|p| p + 1).collect())
                    .collect()
            })
            .collect();
        let len = count_candidates(m)? as u64;
        Ok(Self { m, splits, len })
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Radix of every split-tree node in pre-order.
    fn radices(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity((1 << self.m) - 1);
        self.push_radices(1, &mut out);
        out
    }

    fn push_radices(&self, level: usize, out: &mut Vec<u64>) {
        out.push(self.splits[level - 1].len() as u64);
        if level < self.m {
            self.push_radices(level + 1, out);
            self.push_radices(level + 1, out);
        }
    }

    /// The `index`-th canonical labeling.
    pub fn get(&self, index: u64) -> Result<Labeling> {
        if index >= self.len {
            return invalid(format!("canonical index {index} out of range 0..{}", self.len));
        }
        let radices = self.radices();
        let mut digits = vec![0usize; radices.len()];
        let mut rest = index;
        for (d, &r) in digits.iter_mut().zip(&radices).rev() {
            *d = (rest % r) as usize;
            rest /= r;
        }
        let mut table = vec![0usize; 1 << self.m];
        let points: Vec<usize> = (0..1 << self.m).collect();
        let mut cursor = 0;
        self.assign(&points, 1, 0, &digits, &mut cursor, &mut table);
        Labeling::new(self.m, table)
    }

    fn assign(
        &self,
        points: &[usize],
        level: usize,
        prefix: usize,
        digits: &[usize],
        cursor: &mut usize,
        table: &mut [usize],
    ) {
        let chosen = &self.splits[level - 1][digits[*cursor]];
        *cursor += 1;
        let mut zero = Vec::with_capacity(points.len() / 2);
        let mut one = Vec::with_capacity(points.len() / 2);
        let mut next = chosen.iter().peekable();
        for (pos, &p) in points.iter().enumerate() {
            if pos == 0 || next.peek() == Some(&&pos) {
                if pos != 0 {
                    next.next();
                }
                zero.push(p);
            } else {
                one.push(p);
            }
        }
        let bit = 1usize << (level - 1);
        if level == self.m {
            table[prefix] = zero[0];
            table[prefix | bit] = one[0];
        } else {
            self.assign(&zero, level + 1, prefix, digits, cursor, table);
            self.assign(&one, level + 1, prefix | bit, digits, cursor, table);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Labeling> + '_ {
        (0..self.len).map(move |i| self.get(i).expect("index in range"))
    }
}

/// Stream of all canonical labelings for `m` (m = 4 requires `allow_large`).
pub fn enumerate_canonical_labelings(
    m: usize,
    allow_large: bool,
) -> Result<impl Iterator<Item = Labeling>> {
    let set = CanonicalLabelings::new(m, allow_large)?;
    Ok((0..set.len()).map(move |i| set.get(i).expect("index in range")))
}
