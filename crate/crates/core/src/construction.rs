//! Code construction by Gaussian-approximation density evolution.
//!
//! Each level j is replaced by the binary-input AWGN channel of equal
//! capacity `I(W_j)`; its mean LLR `2/σ_eq²` seeds the GA recursion over
//! `F^{⊗n}`. Bit-channel `i` (0-based, over all `mN` channels) belongs to
//! level `i / N + 1` and has in-level index `i % N`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{
    biawgn_sigma_for_capacity, bit_capacity, esn0_db_from_sigma, level_capacities,
    sigma_for_total_capacity, CAPACITY_CEIL, CAPACITY_FLOOR,
};
use crate::constellation::{Constellation, Labeling};
use crate::crc::CrcConfig;
use crate::error::{invalid, parse_err, Result};
use crate::polar::PolarCodeLevel;

const PHI_A: f64 = 0.4527;
const PHI_B: f64 = 0.86;
const PHI_C: f64 = 0.0218;
const PHI_SPLIT: f64 = 10.0;

/// `ln φ(x)` for the two-piece closed form of the GA integral.
pub fn ln_phi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < PHI_SPLIT {
        -PHI_A * x.powf(PHI_B) + PHI_C
    } else {
        0.5 * (std::f64::consts::PI / x).ln() - 0.25 * x + (1.0 - 10.0 / (7.0 * x)).ln()
    }
}

pub fn phi(x: f64) -> f64 {
    ln_phi(x).exp()
}

/// Inverse of [`ln_phi`]: the mean whose `ln φ` equals `ln_y`.
pub fn phi_inv_ln(ln_y: f64) -> f64 {
    let split = ln_phi(PHI_SPLIT - f64::EPSILON * PHI_SPLIT);
    if ln_y >= split {
        return ((PHI_C - ln_y) / PHI_A).max(0.0).powf(1.0 / PHI_B);
    }
    // Upper piece: decreasing in x on [10, ∞).
    let h = |x: f64| ln_phi(x) - ln_y;
    let mut lo = PHI_SPLIT;
    let mut hi = (-4.0 * ln_y).max(2.0 * PHI_SPLIT);
    while h(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let v = h(x);
        if v > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let dv = -0.5 / x - 0.25 + (10.0 / (7.0 * x * x)) / (1.0 - 10.0 / (7.0 * x));
        let newton = x - v / dv;
        x = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (hi - lo) <= 1e-13 * hi || v.abs() < 1e-14 {
            break;
        }
    }
    x
}

/// GA check-node update `φ⁻¹(1 - (1 - φ(m))²)`.
pub fn ga_check(mean: f64) -> f64 {
    let lp = ln_phi(mean);
    // 1 - (1 - φ)² = φ (2 - φ), kept in the log domain.
    let target = lp + (2.0 - lp.exp()).ln();
    phi_inv_ln(target)
}

/// Mean LLRs of the N polarized channels of a BI-AWGN channel with mean
/// LLR `mean0`, in the decoder's natural index order.
pub fn ga_evolve(mean0: f64, n: usize) -> Result<Vec<f64>> {
    if !(mean0 > 0.0 && mean0.is_finite()) {
        return invalid(format!("initial mean must be positive, got {mean0}"));
    }
    if n == 0 || !n.is_power_of_two() {
        return invalid(format!("block length {n} is not a power of two"));
    }
    let mut z = vec![mean0];
    while z.len() < n {
        let mut next = Vec::with_capacity(2 * z.len());
        for &m in &z {
            next.push(ga_check(m));
            next.push(2.0 * m);
        }
        z = next;
    }
    Ok(z)
}

/// Gaussian tail `Q(x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// `Q(√(mean/2))`, floored at the smallest normal f64.
pub fn perr_from_mean(mean: f64) -> f64 {
    q_function((mean.max(0.0) / 2.0).sqrt()).max(f64::MIN_POSITIVE)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogateMean {
    pub mean: f64,
    /// Level capacity in bits before clamping.
    pub capacity: f64,
    pub equivalent_sigma: f64,
    /// Capacity fell outside the invertible range and was clamped.
    pub clamped: bool,
}

/// Capacity-matched BI-AWGN mean LLR for a binary channel of capacity `cap`.
pub fn surrogate_from_capacity(cap: f64) -> Result<SurrogateMean> {
    let clamped = !(CAPACITY_FLOOR..=CAPACITY_CEIL).contains(&cap);
    let sigma = biawgn_sigma_for_capacity(cap.clamp(CAPACITY_FLOOR, CAPACITY_CEIL))?;
    Ok(SurrogateMean {
        mean: 2.0 / (sigma * sigma),
        capacity: cap,
        equivalent_sigma: sigma,
        clamped,
    })
}

pub fn surrogate_mean(
    level: usize,
    labeling: &Labeling,
    constellation: &Constellation,
    sigma: f64,
) -> Result<SurrogateMean> {
    let caps = level_capacities(labeling, constellation, sigma)?;
    if !(1..=caps.len()).contains(&level) {
        return invalid(format!("level {level} outside 1..={}", caps.len()));
    }
    surrogate_from_capacity(caps[level - 1])
}

/// Reliabilities of all `mN` polarized bit-channels.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityProfile {
    pub m: usize,
    pub n: usize,
    pub mean_llr: Vec<f64>,
    pub perr: Vec<f64>,
}

impl ReliabilityProfile {
    /// 1-based level of 0-based channel index `i`.
    pub fn level_of(&self, i: usize) -> usize {
        i / self.n + 1
    }

    /// The `k` most reliable channels (smallest perr, then larger mean,
    /// then smaller index), returned in increasing index order.
    pub fn select(&self, k: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.perr.len()).collect();
        order.sort_by(|&a, &b| {
            self.perr[a]
                .total_cmp(&self.perr[b])
                .then(self.mean_llr[b].total_cmp(&self.mean_llr[a]))
                .then(a.cmp(&b))
        });
        let mut chosen = order[..k].to_vec();
        chosen.sort_unstable();
        chosen
    }
}

/// GA reliabilities for all levels of a labeled constellation.
pub fn mlc_reliability(
    labeling: &Labeling,
    constellation: &Constellation,
    sigma: f64,
    n: usize,
) -> Result<(ReliabilityProfile, Vec<SurrogateMean>)> {
    let caps = level_capacities(labeling, constellation, sigma)?;
    let surrogates = caps
        .iter()
        .map(|&c| surrogate_from_capacity(c))
        .collect::<Result<Vec<_>>>()?;
    let mut mean_llr = Vec::with_capacity(caps.len() * n);
    for s in &surrogates {
        mean_llr.extend(ga_evolve(s.mean, n)?);
    }
    let perr = mean_llr.iter().map(|&m| perr_from_mean(m)).collect();
    Ok((
        ReliabilityProfile {
            m: caps.len(),
            n,
            mean_llr,
            perr,
        },
        surrogates,
    ))
}

/// Design noise std giving `I(W) = K/N + margin` bits.
pub fn default_design_sigma(constellation: &Constellation, n: usize, k: usize, margin_bits: f64) -> Result<f64> {
    sigma_for_total_capacity(constellation, k as f64 / n as f64 + margin_bits)
}

pub const DEFAULT_DESIGN_MARGIN_BITS: f64 = 0.4;

/// A multi-level polar code: one `PolarCodeLevel` of length N per level.
#[derive(Debug, Clone, PartialEq)]
pub struct MlcCodeSpec {
    pub labeling: Labeling,
    pub constellation: Constellation,
    /// Symbols per frame; block length of every level.
    pub n: usize,
    /// Information positions over all levels.
    pub k: usize,
    pub design_sigma: f64,
    pub levels: Vec<PolarCodeLevel>,
    pub predicted_bler: f64,
    pub crc: CrcConfig,
    /// Where the labeling was read from, if anywhere.
    pub labeling_file: Option<String>,
}

impl MlcCodeSpec {
    pub fn bits_per_symbol(&self) -> usize {
        self.levels.len()
    }

    pub fn code_rate(&self) -> f64 {
        self.k as f64 / (self.levels.len() * self.n) as f64
    }

    pub fn info_counts(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.info_count()).collect()
    }

    /// `F` (frozen) / `I` (information) over all mN channels, level-major.
    pub fn mask_string(&self) -> String {
        self.levels
            .iter()
            .flat_map(|l| l.frozen_mask().iter())
            .map(|&f| if f { 'F' } else { 'I' })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# multi-level polar code\n");
        out.push_str(&format!("m={}\n", self.bits_per_symbol()));
        out.push_str(&format!("N={}\n", self.n));
        out.push_str(&format!("K={}\n", self.k));
        out.push_str(&format!("sigma_design={}\n", self.design_sigma));
        out.push_str(&format!("esn0_design_db={}\n", esn0_db_from_sigma(self.design_sigma)));
        out.push_str(&format!("labeling={}\n", self.labeling.dash_string()));
        out.push_str(&format!(
            "labeling_file={}\n",
            self.labeling_file.as_deref().unwrap_or("")
        ));
        out.push_str(&format!("crc={}\n", self.crc));
        out.push_str(&format!("predicted_bler={:e}\n", self.predicted_bler));
        out.push_str(&self.mask_string());
        out.push('\n');
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut fields = std::collections::BTreeMap::new();
        let mut mask: Option<(usize, String)> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = idx + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some((k, v)) = line.split_once('=') {
                fields.insert(k.trim().to_string(), (lineno, v.trim().to_string()));
            } else if mask.is_none() {
                mask = Some((lineno, line.to_string()));
            } else {
                return parse_err(lineno, "unexpected second mask line");
            }
        }
        let get = |key: &str| -> Result<(usize, String)> {
            fields
                .get(key)
                .cloned()
                .ok_or_else(|| crate::Error::Parse {
                    line: 0,
                    msg: format!("missing key '{key}'"),
                })
        };
        fn num<T: std::str::FromStr>(key: &str, (line, v): (usize, String)) -> Result<T> {
            v.parse().map_err(|_| crate::Error::Parse {
                line,
                msg: format!("bad value for {key}: '{v}'"),
            })
        }
        let m: usize = num("m", get("m")?)?;
        let n: usize = num("N", get("N")?)?;
        let k: usize = num("K", get("K")?)?;
        let design_sigma: f64 = num("sigma_design", get("sigma_design")?)?;
        let predicted_bler: f64 = num("predicted_bler", get("predicted_bler")?)?;
        let (lab_line, lab_text) = get("labeling")?;
        let labeling = Labeling::from_dash_string(&lab_text).map_err(|e| crate::Error::Parse {
            line: lab_line,
            msg: e.to_string(),
        })?;
        if labeling.bits_per_symbol() != m {
            return parse_err(lab_line, "labeling size does not match m");
        }
        let (crc_line, crc_text) = get("crc")?;
        let crc = crc_text.parse::<CrcConfig>().map_err(|e| crate::Error::Parse {
            line: crc_line,
            msg: e.to_string(),
        })?;
        let labeling_file = fields
            .get("labeling_file")
            .map(|(_, v)| v.clone())
            .filter(|v| !v.is_empty());
        let (mask_line, mask) = match mask {
            Some(x) => x,
            None => return parse_err(0, "missing frozen mask line"),
        };
        if mask.len() != m * n || !mask.chars().all(|c| c == 'F' || c == 'I') {
            return parse_err(mask_line, format!("mask must be {} characters of F/I", m * n));
        }
        let bits: Vec<bool> = mask.chars().map(|c| c == 'F').collect();
        let levels = bits
            .chunks(n)
            .map(|chunk| PolarCodeLevel::new(chunk.to_vec()))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| crate::Error::Parse {
                line: mask_line,
                msg: e.to_string(),
            })?;
        let info: usize = levels.iter().map(|l| l.info_count()).sum();
        if info != k {
            return parse_err(mask_line, format!("mask has {info} information positions, K={k}"));
        }
        let constellation = Constellation::pam(m).map_err(|e| crate::Error::Parse {
            line: 0,
            msg: e.to_string(),
        })?;
        Ok(Self {
            labeling,
            constellation,
            n,
            k,
            design_sigma,
            levels,
            predicted_bler,
            crc,
            labeling_file,
        })
    }
}

/// Selects the K most reliable of the mN channels and freezes the rest to 0.
pub fn build_mlc_code(
    labeling: &Labeling,
    constellation: &Constellation,
    design_sigma: f64,
    n: usize,
    k: usize,
) -> Result<MlcCodeSpec> {
    let m = labeling.bits_per_symbol();
    if constellation.bits_per_symbol() != m {
        return invalid("labeling and constellation sizes differ");
    }
    if n == 0 || !n.is_power_of_two() {
        return invalid(format!("N={n} is not a power of two"));
    }
    if k == 0 || k > m * n {
        return invalid(format!("K={k} outside 1..={}", m * n));
    }
    let (profile, _) = mlc_reliability(labeling, constellation, design_sigma, n)?;
    let chosen = profile.select(k);
    let predicted_bler = chosen.iter().map(|&i| profile.perr[i]).sum();
    let mut frozen = vec![true; m * n];
    for &i in &chosen {
        frozen[i] = false;
    }
    let levels = frozen
        .chunks(n)
        .map(|c| PolarCodeLevel::new(c.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    Ok(MlcCodeSpec {
        labeling: labeling.clone(),
        constellation: constellation.clone(),
        n,
        k,
        design_sigma,
        levels,
        predicted_bler,
        crc: CrcConfig::default(),
        labeling_file: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub capacity: f64,
    pub rate: f64,
    /// Union-bound BLER of the chosen information set.
    pub predicted_bler: f64,
}

/// Largest GA-predicted rate with union-bound BLER at most `target_bler`,
/// for each BI-AWGN capacity in `grid`.
pub fn max_rate_curve(n: usize, target_bler: f64, grid: &[f64]) -> Result<Vec<RatePoint>> {
    if !(target_bler > 0.0 && target_bler < 1.0) {
        return invalid(format!("target BLER {target_bler} outside (0, 1)"));
    }
    grid.iter()
        .map(|&cap| {
            if !(cap > 0.0 && cap < 1.0) {
                return invalid(format!("capacity {cap} outside (0, 1)"));
            }
            let s = surrogate_from_capacity(cap)?;
            let mut perr: Vec<f64> = ga_evolve(s.mean, n)?
                .into_iter()
                .map(perr_from_mean)
                .collect();
            perr.sort_by(f64::total_cmp);
            let mut sum = 0.0;
            let mut k = 0;
            for p in perr {
                if sum + p > target_bler {
                    break;
                }
                sum += p;
                k += 1;
            }
            Ok(RatePoint {
                capacity: cap,
                rate: k as f64 / n as f64,
                predicted_bler: sum,
            })
        })
        .collect()
}

/// Bit-interleaved baseline: Gray-labeled symbols carrying an interleaved
/// polar codeword of `mN` bits with no inter-level conditioning at the
/// receiver.
///
/// When `mN` is not a power of two the codeword is the concatenation of
/// `odd(m)` polar codes of length `N·2^v` (with `m = odd(m)·2^v`), with the
/// information bits split as evenly as possible.
#[derive(Debug, Clone, PartialEq)]
pub struct BipcmCodeSpec {
    pub labeling: Labeling,
    pub constellation: Constellation,
    pub n: usize,
    pub k: usize,
    pub design_sigma: f64,
    pub subcodes: Vec<PolarCodeLevel>,
    /// `interleaver[t]` is the codeword position sent at bit slot `t`;
    /// slot `t` is bit `t % m + 1` of symbol `t / m`.
    pub interleaver: Vec<usize>,
    pub interleaver_seed: u64,
    pub predicted_bler: f64,
    pub crc: CrcConfig,
}

impl BipcmCodeSpec {
    pub fn bits_per_symbol(&self) -> usize {
        self.labeling.bits_per_symbol()
    }
}

/// Mean LLR of the capacity-averaged bit channel under bit-interleaved reception.
pub fn bipcm_surrogate(labeling: &Labeling, constellation: &Constellation, sigma: f64) -> Result<SurrogateMean> {
    let m = labeling.bits_per_symbol();
    let mut total = 0.0;
    for j in 1..=m {
        total += bit_capacity(j, labeling, constellation, sigma)?;
    }
    surrogate_from_capacity(total / m as f64)
}

pub fn build_bipcm_code(
    m: usize,
    n: usize,
    k: usize,
    design_sigma: f64,
    interleaver_seed: u64,
) -> Result<BipcmCodeSpec> {
    let constellation = Constellation::pam(m)?;
    let labeling = Labeling::gray(m)?;
    if n == 0 || !n.is_power_of_two() {
        return invalid(format!("N={n} is not a power of two"));
    }
    if k == 0 || k > m * n {
        return invalid(format!("K={k} outside 1..={}", m * n));
    }
    let sub_len = n << m.trailing_zeros();
    let count = m * n / sub_len;
    let s = bipcm_surrogate(&labeling, &constellation, design_sigma)?;
    let means = ga_evolve(s.mean, sub_len)?;
    let profile = ReliabilityProfile {
        m: 1,
        n: sub_len,
        perr: means.iter().map(|&x| perr_from_mean(x)).collect(),
        mean_llr: means,
    };
    let mut subcodes = Vec::with_capacity(count);
    let mut predicted_bler = 0.0;
    for c in 0..count {
        let kc = k / count + usize::from(c < k % count);
        let info = profile.select(kc);
        predicted_bler += info.iter().map(|&i| profile.perr[i]).sum::<f64>();
        subcodes.push(PolarCodeLevel::from_info_set(sub_len, &info)?);
    }
    let mut interleaver: Vec<usize> = (0..m * n).collect();
    interleaver.shuffle(&mut ChaCha8Rng::seed_from_u64(interleaver_seed));
    Ok(BipcmCodeSpec {
        labeling,
        constellation,
        n,
        k,
        design_sigma,
        subcodes,
        interleaver,
        interleaver_seed,
        predicted_bler,
        crc: CrcConfig::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{biawgn_capacity, sigma_from_esn0_db};
    use crate::constellation::make_pam;

    #[test]
    fn phi_inverse_round_trip() {
        for &x in &[1e-4, 0.01, 0.5, 3.0, 9.9, 10.5, 12.0, 50.0, 300.0, 5e4] {
            let back = phi_inv_ln(ln_phi(x));
            assert!((back - x).abs() <= 1e-9 * x.max(1.0), "{x} -> {back}");
        }
        // The two pieces do not meet at x = 10: ln φ jumps up by about 0.024,
        // so values in the gap have a preimage on each side. The lower one wins.
        let jump = ln_phi(10.0) - ln_phi(10.0 - 1e-12);
        assert!(jump > 0.02 && jump < 0.03, "{jump}");
        let back = phi_inv_ln(ln_phi(10.0));
        assert!(back < 10.0);
        assert!((ln_phi(back) - ln_phi(10.0)).abs() < 1e-12);
    }

    #[test]
    fn ga_small_cases() {
        assert_eq!(ga_evolve(3.0, 1).unwrap(), vec![3.0]);
        let z = ga_evolve(3.0, 2).unwrap();
        assert_eq!(z[1], 6.0);
        assert!(z[0] < 3.0);
        assert!(ga_evolve(0.0, 4).is_err());
        assert!(ga_evolve(1.0, 6).is_err());
    }

    #[test]
    fn ga_check_node_behaviour() {
        // Check-node output is below the input and approaches m - 4 ln 2 for large m.
        for &m in &[0.1, 1.0, 5.0, 20.0, 200.0] {
            assert!(ga_check(m) < m);
            assert!(ga_check(m) > 0.0);
        }
        assert!((ga_check(2000.0) - (2000.0 - 4.0 * 2f64.ln())).abs() < 0.1);
    }

    #[test]
    fn perr_properties() {
        assert!((perr_from_mean(0.0) - 0.5).abs() < 1e-15);
        let mut prev = 0.5;
        for k in 1..200 {
            let p = perr_from_mean(k as f64 * 0.5);
            assert!(p > 0.0 && p < prev);
            prev = p;
        }
        assert!(perr_from_mean(1e6) > 0.0);
    }

    #[test]
    fn bpsk_surrogate_is_identity() {
        let c = make_pam(1).unwrap();
        let lab = Labeling::natural(1).unwrap();
        for sigma in [0.5, 0.8, 1.3] {
            let s = surrogate_mean(1, &lab, &c, sigma).unwrap();
            assert!(!s.clamped);
            assert!((s.equivalent_sigma - sigma).abs() < 1e-6 * sigma, "{sigma} vs {}", s.equivalent_sigma);
            assert!((s.mean - 2.0 / (sigma * sigma)).abs() < 1e-5 * s.mean);
        }
    }

    #[test]
    fn surrogate_monotone_and_clamped() {
        let a = surrogate_from_capacity(0.3).unwrap();
        let b = surrogate_from_capacity(0.6).unwrap();
        assert!(b.mean > a.mean);
        let hi = surrogate_from_capacity(1.0).unwrap();
        assert!(hi.clamped);
        assert!((biawgn_capacity(hi.equivalent_sigma) - CAPACITY_CEIL).abs() < 1e-9);
        assert!(!surrogate_from_capacity(0.5).unwrap().clamped);
    }

    #[test]
    fn build_all_information() {
        let c = make_pam(2).unwrap();
        let lab = Labeling::natural(2).unwrap();
        let spec = build_mlc_code(&lab, &c, 0.4, 8, 16).unwrap();
        assert!(spec.mask_string().chars().all(|ch| ch == 'I'));
        let (profile, _) = mlc_reliability(&lab, &c, 0.4, 8).unwrap();
        let total: f64 = profile.perr.iter().sum();
        assert!((spec.predicted_bler - total).abs() < 1e-15 * total.max(1.0));
        assert!(build_mlc_code(&lab, &c, 0.4, 8, 0).is_err());
        assert!(build_mlc_code(&lab, &c, 0.4, 8, 17).is_err());
        assert!(build_mlc_code(&lab, &c, 0.4, 6, 4).is_err());
    }

    #[test]
    fn construction_is_deterministic_and_levelled() {
        let c = make_pam(3).unwrap();
        let lab = Labeling::gray(3).unwrap();
        let sigma = sigma_from_esn0_db(10.0);
        let a = build_mlc_code(&lab, &c, sigma, 64, 64).unwrap();
        let b = build_mlc_code(&lab, &c, sigma, 64, 64).unwrap();
        assert_eq!(a, b);
        let (profile, _) = mlc_reliability(&lab, &c, sigma, 64).unwrap();
        for i in 0..profile.mean_llr.len() {
            assert_eq!(profile.level_of(i), (i + 1).div_ceil(64));
        }
        assert_eq!(a.info_counts().iter().sum::<usize>(), 64);
    }

    #[test]
    fn spec_text_round_trip() {
        let c = make_pam(3).unwrap();
        let lab = Labeling::natural(3).unwrap();
        let mut spec = build_mlc_code(&lab, &c, 0.3, 16, 20).unwrap();
        spec.labeling_file = Some("best.lab".into());
        let text = spec.to_text();
        let back = MlcCodeSpec::from_text(&text).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.to_text(), text);
        assert_eq!(text.lines().last().unwrap().len(), 48);

        let broken = text.replace("K=20", "K=21");
        assert!(MlcCodeSpec::from_text(&broken).is_err());
    }

    #[test]
    fn rate_curve_basics() {
        let grid = [0.2, 0.5, 0.8, 1.0 - 1e-4];
        let pts = max_rate_curve(1024, 1e-3, &grid).unwrap();
        for w in pts.windows(2) {
            assert!(w[1].rate >= w[0].rate);
        }
        for p in &pts {
            assert!(p.rate <= p.capacity);
            assert!(p.predicted_bler <= 1e-3);
        }
        assert!(pts[3].rate >= 0.99, "{}", pts[3].rate);
        assert!(max_rate_curve(1024, 0.0, &grid).is_err());
    }

    #[test]
    fn bipcm_layout() {
        let spec = build_bipcm_code(3, 64, 64, 0.3, 1).unwrap();
        assert_eq!(spec.subcodes.len(), 3);
        assert!(spec.subcodes.iter().all(|c| c.block_length() == 64));
        let ks: Vec<usize> = spec.subcodes.iter().map(|c| c.info_count()).collect();
        assert_eq!(ks, vec![22, 21, 21]);
        let mut sorted = spec.interleaver.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..192).collect::<Vec<_>>());

        let two = build_bipcm_code(2, 64, 50, 0.3, 1).unwrap();
        assert_eq!(two.subcodes.len(), 1);
        assert_eq!(two.subcodes[0].block_length(), 128);
        assert_eq!(build_bipcm_code(3, 64, 64, 0.3, 1).unwrap(), spec);
        assert_ne!(build_bipcm_code(3, 64, 64, 0.3, 2).unwrap().interleaver, spec.interleaver);
    }
}
