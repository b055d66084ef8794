//! Real AWGN channel, per-level demapping and capacity integrals.
//!
//! SNR convention: Es/N0 with Es = 1 (unit-energy constellations) and
//! N0 = 2σ², so `Es/N0 = 1 / (2σ²)`. Eb/N0 subtracts `10·log10(bits per
//! symbol)` where "bits per symbol" counts delivered payload bits.

use std::f64::consts::LN_2;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::constellation::{Constellation, Labeling};
use crate::error::{invalid, Result};
use crate::quadrature::capacity_rule;

pub fn sigma_from_esn0_db(esn0_db: f64) -> f64 {
    (0.5 / 10f64.powf(esn0_db / 10.0)).sqrt()
}

pub fn esn0_db_from_sigma(sigma: f64) -> f64 {
    10.0 * (0.5 / (sigma * sigma)).log10()
}

/// `Eb/N0 = Es/N0 - 10·log10(info bits per symbol)`.
pub fn ebn0_db_from_esn0_db(esn0_db: f64, info_bits_per_symbol: f64) -> f64 {
    esn0_db - 10.0 * info_bits_per_symbol.log10()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AwgnChannel {
    noise_std: f64,
}

impl AwgnChannel {
    pub fn new(noise_std: f64) -> Result<Self> {
        if !(noise_std > 0.0 && noise_std.is_finite()) {
            return invalid(format!("noise std must be finite and positive, got {noise_std}"));
        }
        Ok(Self { noise_std })
    }

    pub fn from_esn0_db(esn0_db: f64) -> Result<Self> {
        Self::new(sigma_from_esn0_db(esn0_db))
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }

    pub fn esn0_db(&self) -> f64 {
        esn0_db_from_sigma(self.noise_std)
    }

    /// Signal-to-noise power ratio `1/σ²` in dB.
    pub fn snr_db(&self) -> f64 {
        -20.0 * self.noise_std.log10()
    }

    /// `W(y|x)`.
    pub fn density(&self, y: f64, x: f64) -> f64 {
        let v = self.noise_std * self.noise_std;
        (-(y - x) * (y - x) / (2.0 * v)).exp() / (2.0 * std::f64::consts::PI * v).sqrt()
    }

    pub fn sample<R: Rng + ?Sized>(&self, x: f64, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        x + self.noise_std * z
    }
}

/// `max*(a, b) = ln(e^a + e^b)`.
#[inline]
pub fn max_star(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    a.max(b) + (-(a - b).abs()).exp().ln_1p()
}

#[inline]
fn log_sum_exp(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::NEG_INFINITY, max_star)
}

/// Conditioning data of the j-th binary level channel.
#[derive(Debug, Clone, Copy)]
pub struct LevelContext<'a> {
    /// 1-based level.
    pub level: usize,
    /// Decided bits `b_1..b_{j-1}` packed with `b_1` least significant.
    pub prior_bits: usize,
    pub labeling: &'a Labeling,
    pub constellation: &'a Constellation,
    pub noise_std: f64,
}

/// `ln W_j(y, b_1^{j-1} | 0) - ln W_j(y, b_1^{j-1} | 1)`.
pub fn level_llr(ctx: &LevelContext<'_>, y: f64) -> f64 {
    let m = ctx.labeling.bits_per_symbol();
    assert!((1..=m).contains(&ctx.level));
    let low_mask = (1usize << (ctx.level - 1)) - 1;
    assert!(ctx.prior_bits <= low_mask);
    let bit = 1usize << (ctx.level - 1);
    let scale = 0.5 / (ctx.noise_std * ctx.noise_std);
    let metric = |u: usize| {
        let d = y - ctx.constellation.point(ctx.labeling.point_index(u));
        -d * d * scale
    };
    let group = |value: usize| {
        log_sum_exp(
            (0..ctx.labeling.order())
                .filter(move |u| u & low_mask == ctx.prior_bits && u & bit == value)
                .map(metric),
        )
    };
    group(0) - group(bit)
}

/// Precomputed point sets for fast per-symbol demapping.
#[derive(Debug, Clone)]
pub struct Demapper {
    m: usize,
    scale: f64,
    /// `levels[j-1][prior] = (points with b_j = 0, points with b_j = 1)`.
    levels: Vec<Vec<(Vec<f64>, Vec<f64>)>>,
    /// Marginal sets over all other bits, for bit-interleaved reception.
    bits: Vec<(Vec<f64>, Vec<f64>)>,
}

impl Demapper {
    pub fn new(labeling: &Labeling, constellation: &Constellation, noise_std: f64) -> Result<Self> {
        let m = labeling.bits_per_symbol();
        if constellation.bits_per_symbol() != m {
            return invalid("labeling and constellation sizes differ");
        }
        AwgnChannel::new(noise_std)?;
        let amp = |u: usize| constellation.point(labeling.point_index(u));
        let order = labeling.order();
        let levels = (1..=m)
            .map(|level| {
                let low_mask = (1usize << (level - 1)) - 1;
                let bit = 1usize << (level - 1);
                (0..=low_mask)
                    .map(|prior| {
                        let pick = |v: usize| {
                            (0..order)
                                .filter(|u| u & low_mask == prior && u & bit == v)
                                .map(amp)
                                .collect::<Vec<_>>()
                        };
                        (pick(0), pick(bit))
                    })
                    .collect()
            })
            .collect();
        let bits = (1..=m)
            .map(|level| {
                let bit = 1usize << (level - 1);
                let pick = |v: usize| (0..order).filter(|u| u & bit == v).map(amp).collect::<Vec<_>>();
                (pick(0), pick(bit))
            })
            .collect();
        Ok(Self {
            m,
            scale: 0.5 / (noise_std * noise_std),
            levels,
            bits,
        })
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.m
    }

    #[inline]
    fn llr(&self, zero: &[f64], one: &[f64], y: f64) -> f64 {
        let metric = |&x: &f64| -(y - x) * (y - x) * self.scale;
        log_sum_exp(zero.iter().map(metric)) - log_sum_exp(one.iter().map(metric))
    }

    /// Level-j LLR given the decided lower bits.
    #[inline]
    pub fn level_llr(&self, level: usize, prior_bits: usize, y: f64) -> f64 {
        let (zero, one) = &self.levels[level - 1][prior_bits];
        self.llr(zero, one, y)
    }

    /// LLR of bit j with every other bit marginalized.
    #[inline]
    pub fn bit_llr(&self, level: usize, y: f64) -> f64 {
        let (zero, one) = &self.bits[level - 1];
        self.llr(zero, one, y)
    }
}

fn check_inputs(lab: &Labeling, c: &Constellation, sigma: f64) -> Result<()> {
    if lab.bits_per_symbol() != c.bits_per_symbol() {
        return invalid("labeling and constellation sizes differ");
    }
    AwgnChannel::new(sigma).map(|_| ())
}

/// `I(W_j)` in bits for every level j = 1..m.
pub fn level_capacities(lab: &Labeling, c: &Constellation, sigma: f64) -> Result<Vec<f64>> {
    check_inputs(lab, c, sigma)?;
    let m = lab.bits_per_symbol();
    let order = lab.order();
    let amps: Vec<f64> = (0..order).map(|u| c.point(lab.point_index(u))).collect();
    let scale = 0.5 / (sigma * sigma);
    let rule = capacity_rule();
    let mut metric = vec![0.0; order];
    // log P(y | b_1^j) for j = 0..m, up to a common additive constant.
    let mut cond = vec![0.0; m + 1];
    let mut acc = vec![0.0; m];
    for u in 0..order {
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let y = amps[u] + std::f64::consts::SQRT_2 * sigma * t;
            for (v, e) in metric.iter_mut().enumerate() {
                let d = y - amps[v];
                *e = -d * d * scale;
            }
            for (j, slot) in cond.iter_mut().enumerate() {
                let mask = (1usize << j) - 1;
                let key = u & mask;
                let members = 1usize << (m - j);
                *slot = log_sum_exp((0..order).filter(|v| v & mask == key).map(|v| metric[v]))
                    - (members as f64).ln();
            }
            for j in 0..m {
                acc[j] += w * (cond[j + 1] - cond[j]);
            }
        }
    }
    let norm = order as f64 * std::f64::consts::PI.sqrt() * LN_2;
    Ok(acc.into_iter().map(|a| (a / norm).clamp(0.0, 1.0)).collect())
}

/// `I(W_j)` in bits for one 1-based level.
pub fn level_capacity(level: usize, lab: &Labeling, c: &Constellation, sigma: f64) -> Result<f64> {
    if !(1..=lab.bits_per_symbol()).contains(&level) {
        return invalid(format!("level {level} outside 1..={}", lab.bits_per_symbol()));
    }
    Ok(level_capacities(lab, c, sigma)?[level - 1])
}

/// Symmetric capacity `I(W)` of the 2^m-ary channel in bits.
///
/// The labeling only fixes the bit mapping, which does not enter `I(W)`;
/// the integral runs over the points in index order.
pub fn total_capacity(lab: &Labeling, c: &Constellation, sigma: f64) -> Result<f64> {
    check_inputs(lab, c, sigma)?;
    Ok(pam_capacity(c, sigma))
}

fn pam_capacity(c: &Constellation, sigma: f64) -> f64 {
    let order = c.order();
    let scale = 0.5 / (sigma * sigma);
    let rule = capacity_rule();
    let mut acc = 0.0;
    for &x in c.points() {
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let y = x + std::f64::consts::SQRT_2 * sigma * t;
            let own = -(y - x) * (y - x) * scale;
            let all = log_sum_exp(c.points().iter().map(|&v| -(y - v) * (y - v) * scale))
                - (order as f64).ln();
            acc += w * (own - all);
        }
    }
    (acc / (order as f64 * std::f64::consts::PI.sqrt() * LN_2)).clamp(0.0, c.bits_per_symbol() as f64)
}

/// `I(b_j; y)` in bits with all other bits unknown (bit-interleaved metric).
pub fn bit_capacity(level: usize, lab: &Labeling, c: &Constellation, sigma: f64) -> Result<f64> {
    check_inputs(lab, c, sigma)?;
    let m = lab.bits_per_symbol();
    if !(1..=m).contains(&level) {
        return invalid(format!("level {level} outside 1..={m}"));
    }
    let order = lab.order();
    let bit = 1usize << (level - 1);
    let amps: Vec<f64> = (0..order).map(|u| c.point(lab.point_index(u))).collect();
    let scale = 0.5 / (sigma * sigma);
    let rule = capacity_rule();
    let mut acc = 0.0;
    for u in 0..order {
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let y = amps[u] + std::f64::consts::SQRT_2 * sigma * t;
            let metric = |v: usize| -(y - amps[v]) * (y - amps[v]) * scale;
            let same = log_sum_exp((0..order).filter(|v| v & bit == u & bit).map(metric));
            let all = log_sum_exp((0..order).map(metric));
            acc += w * (same - all + LN_2);
        }
    }
    Ok((acc / (order as f64 * std::f64::consts::PI.sqrt() * LN_2)).clamp(0.0, 1.0))
}

#[inline]
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Binary-input (±1) AWGN symmetric capacity in bits.
pub fn biawgn_capacity(sigma: f64) -> f64 {
    let var = sigma * sigma;
    let e = capacity_rule().expect_standard_normal(|z| {
        let y = 1.0 + sigma * z;
        softplus(-2.0 * y / var)
    });
    (1.0 - e / LN_2).clamp(0.0, 1.0)
}

/// Smallest/largest capacities accepted by [`biawgn_sigma_for_capacity`].
pub const CAPACITY_FLOOR: f64 = 1e-6;
pub const CAPACITY_CEIL: f64 = 1.0 - 1e-6;

fn bisect_decreasing(f: impl Fn(f64) -> f64, target: f64, lo: f64, hi: f64) -> f64 {
    // f decreasing in sigma; bisect on ln(sigma).
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if f(mid.exp()) > target {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    (0.5 * (a + b)).exp()
}

/// Noise std of the BI-AWGN channel whose capacity equals `capacity`.
pub fn biawgn_sigma_for_capacity(capacity: f64) -> Result<f64> {
    if !(CAPACITY_FLOOR..=CAPACITY_CEIL).contains(&capacity) {
        return invalid(format!(
            "capacity {capacity} outside [{CAPACITY_FLOOR}, {CAPACITY_CEIL}]"
        ));
    }
    Ok(bisect_decreasing(biawgn_capacity, capacity, 1e-2, 1e4))
}

/// Noise std at which the 2^m-PAM symmetric capacity equals `bits`.
pub fn sigma_for_total_capacity(c: &Constellation, bits: f64) -> Result<f64> {
    let m = c.bits_per_symbol() as f64;
    if !(bits > 0.0 && bits < m) {
        return invalid(format!("target capacity {bits} outside (0, {m})"));
    }
    Ok(bisect_decreasing(|s| pam_capacity(c, s), bits, 1e-3, 1e4))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{index_to_bits, make_pam};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn snr_conventions() {
        let ch = AwgnChannel::from_esn0_db(0.0).unwrap();
        assert!((ch.noise_std() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(ch.esn0_db().abs() < 1e-12);
        assert!((ch.snr_db() - 10.0 * 2f64.log10()).abs() < 1e-12);
        assert!((ebn0_db_from_esn0_db(3.0, 1.0) - 3.0).abs() < 1e-15);
        assert!((ebn0_db_from_esn0_db(3.0, 0.5) - (3.0 + 10.0 * 2f64.log10())).abs() < 1e-12);
        assert!(AwgnChannel::new(0.0).is_err());
        assert!(AwgnChannel::new(f64::NAN).is_err());
    }

    #[test]
    fn sampling() {
        let tiny = AwgnChannel::new(1e-300).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(tiny.sample(0.25, &mut rng), 0.25);

        let ch = AwgnChannel::new(1.0).unwrap();
        let a = ch.sample(0.0, &mut ChaCha8Rng::seed_from_u64(7));
        let b = ch.sample(0.0, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);

        let n = 1_000_000;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let y = ch.sample(0.0, &mut rng);
            s += y;
            s2 += y * y;
        }
        let mean = s / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "var {var}");
    }

    #[test]
    fn density_integrates_to_one() {
        let ch = AwgnChannel::new(0.7).unwrap();
        let h = 1e-3;
        let s: f64 = (-10_000..=10_000).map(|k| ch.density(k as f64 * h, 0.3) * h).sum();
        assert!((s - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bpsk_llr() {
        let c = make_pam(1).unwrap();
        let lab = Labeling::natural(1).unwrap();
        let sigma = 0.8;
        for y in [-3.0, -0.4, 0.0, 0.1, 2.5] {
            let ctx = LevelContext {
                level: 1,
                prior_bits: 0,
                labeling: &lab,
                constellation: &c,
                noise_std: sigma,
            };
            let l = level_llr(&ctx, y);
            assert!((l - (-2.0 * y / (sigma * sigma))).abs() < 1e-12);
        }
        let ctx = LevelContext {
            level: 1,
            prior_bits: 0,
            labeling: &lab,
            constellation: &c,
            noise_std: 0.3,
        };
        assert_eq!(level_llr(&ctx, 0.0), 0.0);
    }

    /// Linear-domain sum of Gaussian densities straight from the definition.
    fn brute_llr(lab: &Labeling, c: &Constellation, sigma: f64, level: usize, prior: &[u8], y: f64) -> f64 {
        let ch = AwgnChannel::new(sigma).unwrap();
        let m = lab.bits_per_symbol();
        let (mut p0, mut p1) = (0.0, 0.0);
        for u in 0..1usize << m {
            let b = index_to_bits(u, m);
            if b[..level - 1] != *prior {
                continue;
            }
            let w = ch.density(y, lab.apply(c, &b).unwrap());
            if b[level - 1] == 0 {
                p0 += w;
            } else {
                p1 += w;
            }
        }
        (p0 / p1).ln()
    }

    #[test]
    fn level_llr_matches_density_sum() {
        let c = make_pam(3).unwrap();
        let lab = Labeling::natural(3).unwrap();
        let ctx = LevelContext {
            level: 2,
            prior_bits: 0,
            labeling: &lab,
            constellation: &c,
            noise_std: 0.8,
        };
        let expected = brute_llr(&lab, &c, 0.8, 2, &[0], 0.5);
        assert!((level_llr(&ctx, 0.5) - expected).abs() < 1e-12);

        let gray = Labeling::gray(3).unwrap();
        let dm = Demapper::new(&gray, &c, 0.45).unwrap();
        for level in 1..=3 {
            for prior in 0..1usize << (level - 1) {
                let pb = index_to_bits(prior, level - 1);
                for k in -40..=40 {
                    let y = k as f64 * 0.25;
                    let want = brute_llr(&gray, &c, 0.45, level, &pb, y);
                    let got = dm.level_llr(level, prior, y);
                    assert!(got.is_finite());
                    assert!(
                        (got.exp() / want.exp() - 1.0).abs() < 1e-9,
                        "level {level} prior {prior} y {y}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn llr_stays_finite_at_extreme_snr() {
        let c = make_pam(3).unwrap();
        let dm = Demapper::new(&Labeling::natural(3).unwrap(), &c, 1e-4).unwrap();
        for y in [-50.0, -1.0, 0.0, 0.3, 40.0] {
            for level in 1..=3 {
                assert!(dm.level_llr(level, 0, y).is_finite());
                assert!(dm.bit_llr(level, y).is_finite());
            }
        }
    }

    #[test]
    fn capacity_limits() {
        let c = make_pam(3).unwrap();
        let lab = Labeling::gray(3).unwrap();
        for cap in level_capacities(&lab, &c, 100.0).unwrap() {
            assert!(cap < 1e-3);
        }
        for cap in level_capacities(&lab, &c, 1e-2).unwrap() {
            assert!(cap > 1.0 - 1e-3);
        }
        assert!(level_capacity(0, &lab, &c, 1.0).is_err());
        assert!(level_capacity(4, &lab, &c, 1.0).is_err());
    }

    /// Trapezoid integration of I(X;Y) for equiprobable ±1 inputs.
    fn biawgn_trapezoid(sigma: f64) -> f64 {
        let ch = AwgnChannel::new(sigma).unwrap();
        let h = 1e-4;
        let lim = 1.0 + 14.0 * sigma;
        let steps = (2.0 * lim / h) as i64;
        let f = |y: f64| {
            let p0 = ch.density(y, -1.0);
            let p1 = ch.density(y, 1.0);
            let py = 0.5 * (p0 + p1);
            let mut acc = 0.0;
            for p in [p0, p1] {
                if p > 0.0 {
                    acc += 0.5 * p * (p / py).log2();
                }
            }
            acc
        };
        let mut s = 0.5 * (f(-lim) + f(lim));
        for k in 1..steps {
            s += f(-lim + k as f64 * h);
        }
        s * h
    }

    #[test]
    fn bpsk_capacity_matches_trapezoid() {
        let sigma = sigma_from_esn0_db(0.0);
        let oracle = biawgn_trapezoid(sigma);
        let c = make_pam(1).unwrap();
        let lab = Labeling::natural(1).unwrap();
        let level = level_capacity(1, &lab, &c, sigma).unwrap();
        assert!((level - oracle).abs() < 1e-3, "{level} vs {oracle}");
        assert!((biawgn_capacity(sigma) - oracle).abs() < 1e-6);
        let total = total_capacity(&lab, &c, sigma).unwrap();
        assert!((total - level).abs() < 1e-12);
    }

    #[test]
    fn chain_rule_and_labeling_invariance() {
        let c = make_pam(3).unwrap();
        let nat = Labeling::natural(3).unwrap();
        let levels = level_capacities(&nat, &c, 0.5).unwrap();
        let total = total_capacity(&nat, &c, 0.5).unwrap();
        assert!((levels.iter().sum::<f64>() - total).abs() < 1e-6);
        let gray_total = total_capacity(&Labeling::gray(3).unwrap(), &c, 0.5).unwrap();
        assert_eq!(total, gray_total);
    }

    #[test]
    fn complementing_a_level_keeps_capacities() {
        let c = make_pam(3).unwrap();
        let lab = Labeling::new(3, vec![3, 6, 0, 5, 7, 1, 2, 4]).unwrap();
        let base = level_capacities(&lab, &c, 0.6).unwrap();
        for level in 1..=3 {
            let flipped = level_capacities(&lab.complement_level(level), &c, 0.6).unwrap();
            for (a, b) in base.iter().zip(&flipped) {
                assert!((a - b).abs() <= 1e-9);
            }
        }
        let comp = level_capacities(&lab.complement_component(2, 1), &c, 0.6).unwrap();
        for (a, b) in base.iter().zip(&comp) {
            assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn sigma_for_capacity_round_trip() {
        for cap in [0.1, 0.5, 0.9] {
            let s = biawgn_sigma_for_capacity(cap).unwrap();
            assert!((biawgn_capacity(s) - cap).abs() < 1e-8);
        }
        let a = biawgn_sigma_for_capacity(0.3).unwrap();
        let b = biawgn_sigma_for_capacity(0.7).unwrap();
        assert!(a > b);
        assert!(biawgn_sigma_for_capacity(0.0).is_err());
        assert!(biawgn_sigma_for_capacity(1.0).is_err());
        for cap in [CAPACITY_FLOOR, CAPACITY_CEIL] {
            let s = biawgn_sigma_for_capacity(cap).unwrap();
            assert!((biawgn_capacity(s) - cap).abs() < 1e-9);
        }
    }

    #[test]
    fn sigma_for_capacity_matches_grid_search() {
        // Coarse grid over the capacity curve, then a local refinement.
        let grid: Vec<f64> = (1..=4000).map(|k| k as f64 * 1e-3).collect();
        let best = grid
            .iter()
            .copied()
            .min_by(|a, b| {
                (biawgn_trapezoid_cheap(*a) - 0.5)
                    .abs()
                    .total_cmp(&(biawgn_trapezoid_cheap(*b) - 0.5).abs())
            })
            .unwrap();
        let s = biawgn_sigma_for_capacity(0.5).unwrap();
        assert!((s - best).abs() < 2e-3, "{s} vs grid {best}");
    }

    fn biawgn_trapezoid_cheap(sigma: f64) -> f64 {
        let ch = AwgnChannel::new(sigma).unwrap();
        let lim = 1.0 + 12.0 * sigma;
        let n = 2000;
        let h = 2.0 * lim / n as f64;
        let mut s = 0.0;
        for k in 0..=n {
            let y = -lim + k as f64 * h;
            let (p0, p1) = (ch.density(y, -1.0), ch.density(y, 1.0));
            let py = 0.5 * (p0 + p1);
            let mut v = 0.0;
            for p in [p0, p1] {
                if p > 0.0 {
                    v += 0.5 * p * (p / py).log2();
                }
            }
            s += if k == 0 || k == n { 0.5 * v } else { v };
        }
        s * h
    }

    #[test]
    fn total_capacity_inverse() {
        let c = make_pam(3).unwrap();
        let s = sigma_for_total_capacity(&c, 1.4).unwrap();
        let nat = Labeling::natural(3).unwrap();
        assert!((total_capacity(&nat, &c, s).unwrap() - 1.4).abs() < 1e-9);
        assert!(sigma_for_total_capacity(&c, 3.0).is_err());
    }

    #[test]
    fn bit_capacity_is_at_most_level_sum() {
        let c = make_pam(3).unwrap();
        let gray = Labeling::gray(3).unwrap();
        let sigma = 0.35;
        let bicm: f64 = (1..=3).map(|j| bit_capacity(j, &gray, &c, sigma).unwrap()).sum();
        let total = total_capacity(&gray, &c, sigma).unwrap();
        assert!(bicm <= total + 1e-9);
        assert!(bicm > total - 0.2);
        // The first level has no prior, so both metrics coincide there.
        let l1 = level_capacity(1, &gray, &c, sigma).unwrap();
        assert!((bit_capacity(1, &gray, &c, sigma).unwrap() - l1).abs() < 1e-12);
    }
}
