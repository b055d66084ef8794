//! Monte Carlo BLER of multi-level (MSD) and bit-interleaved polar coded
//! modulation over real AWGN.
//!
//! Frame `f` of SNR point `p` draws its payload and noise from a generator
//! keyed by `(seed, p)` on stream `f`, so outcomes do not depend on the
//! number of worker threads. Frames run in fixed-size batches and the stop
//! rule is only checked between batches.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{ebn0_db_from_esn0_db, sigma_from_esn0_db, AwgnChannel, Demapper};
use crate::construction::{BipcmCodeSpec, MlcCodeSpec};
use crate::crc::CrcConfig;
use crate::error::{invalid, Result};
use crate::polar::{polar_encode, DecoderKind, PolarCodeLevel, PolarDecoder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Pcm,
    Bipcm,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pcm => "PCM",
            Self::Bipcm => "BIPCM",
        })
    }
}

impl FromStr for Scheme {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pcm" => Ok(Self::Pcm),
            "bipcm" => Ok(Self::Bipcm),
            _ => invalid(format!("unknown scheme '{s}' (expected PCM or BIPCM)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub decoder: DecoderKind,
    pub list_size: usize,
    /// SNR points as Es/N0 in dB.
    pub esn0_db: Vec<f64>,
    pub max_frames: u64,
    pub target_errors: u64,
    pub seed: u64,
    /// Thread count; 0 runs on the ambient rayon pool.
    pub workers: usize,
    /// Frames between stop-rule checks.
    pub batch: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            decoder: DecoderKind::Sc,
            list_size: 1,
            esn0_db: Vec::new(),
            max_frames: 100_000,
            target_errors: 100,
            seed: 1,
            workers: 0,
            batch: 256,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.list_size == 0 || !self.list_size.is_power_of_two() || self.list_size > 64 {
            return invalid(format!(
                "list size must be a power of two in 1..=64, got {}",
                self.list_size
            ));
        }
        if self.decoder == DecoderKind::Sc && self.list_size != 1 {
            return invalid("SC decoding takes no list size; use SCL or CASCL");
        }
        if self.esn0_db.is_empty() {
            return invalid("no SNR points");
        }
        if let Some(s) = self.esn0_db.iter().find(|s| !s.is_finite()) {
            return invalid(format!("SNR {s} is not finite"));
        }
        if self.max_frames == 0 || self.target_errors == 0 || self.batch == 0 {
            return invalid("max_frames, target_errors and batch must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlerPoint {
    pub esn0_db: f64,
    /// Eb/N0 per payload bit, CRC excluded.
    pub ebn0_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    pub bler: f64,
}

impl BlerPoint {
    /// Binomial standard error of `bler`.
    pub fn std_error(&self) -> f64 {
        (self.bler * (1.0 - self.bler) / self.frames as f64).sqrt()
    }
}

pub const CSV_HEADER: &str = "scheme,decoder,list,m,N,K,esn0_db,ebn0_db,frames,frame_errors,bit_errors,bler";

/// One CSV row in the [`CSV_HEADER`] layout.
pub fn csv_row(
    scheme: Scheme,
    cfg: &SimConfig,
    m: usize,
    n: usize,
    k: usize,
    point: &BlerPoint,
) -> String {
    format!(
        "{scheme},{},{},{m},{n},{k},{},{},{},{},{},{:e}",
        cfg.decoder,
        cfg.list_size,
        point.esn0_db,
        point.ebn0_db,
        point.frames,
        point.frame_errors,
        point.bit_errors,
        point.bler
    )
}

/// Information bits of each sub-code that carry payload; the rest of a
/// sub-code's information bits are its CRC.
///
/// With a CRC, every sub-code with more information bits than the CRC width
/// carries its own CRC; smaller ones carry none and decode without it.
fn payload_split(codes: &[PolarCodeLevel], crc: Option<&CrcConfig>) -> Vec<(usize, bool)> {
    codes
        .iter()
        .map(|c| match crc {
            Some(crc) if c.info_count() > crc.width() => (c.info_count() - crc.width(), true),
            _ => (c.info_count(), false),
        })
        .collect()
}

/// Payload bits per frame of an MLC code.
pub fn payload_len(spec: &MlcCodeSpec, with_crc: bool) -> usize {
    let crc = with_crc.then_some(&spec.crc);
    payload_split(&spec.levels, crc).iter().map(|p| p.0).sum()
}

/// Payload bits per frame of a BIPCM code.
pub fn bipcm_payload_len(spec: &BipcmCodeSpec, with_crc: bool) -> usize {
    let crc = with_crc.then_some(&spec.crc);
    payload_split(&spec.subcodes, crc).iter().map(|p| p.0).sum()
}

/// Codewords of every sub-code for one payload.
fn encode_codes(
    codes: &[PolarCodeLevel],
    crc: Option<&CrcConfig>,
    payload: &[u8],
) -> Result<Vec<Vec<u8>>> {
    let split = payload_split(codes, crc);
    let expected: usize = split.iter().map(|p| p.0).sum();
    if payload.len() != expected {
        return invalid(format!("payload has {} bits, expected {expected}", payload.len()));
    }
    let mut rest = payload;
    let mut words = Vec::with_capacity(codes.len());
    for (code, &(len, has_crc)) in codes.iter().zip(&split) {
        let (part, tail) = rest.split_at(len);
        rest = tail;
        let info = match crc {
            Some(crc) if has_crc => crc.attach(part)?,
            _ => part.to_vec(),
        };
        words.push(polar_encode(code, &code.embed(&info)?)?);
    }
    Ok(words)
}

/// Maps the coded bits of all levels to N amplitudes.
///
/// `with_crc` attaches the spec's CRC to each level large enough to hold it.
pub fn pcm_encode_modulate(spec: &MlcCodeSpec, payload: &[u8], with_crc: bool) -> Result<Vec<f64>> {
    let crc = with_crc.then_some(&spec.crc);
    let words = encode_codes(&spec.levels, crc, payload)?;
    Ok((0..spec.n)
        .map(|t| {
            let u = words
                .iter()
                .enumerate()
                .fold(0usize, |acc, (j, w)| acc | (usize::from(w[t]) << j));
            spec.constellation.point(spec.labeling.point_index(u))
        })
        .collect())
}

/// Maps an interleaved BIPCM codeword to N amplitudes.
pub fn bipcm_encode_modulate(spec: &BipcmCodeSpec, payload: &[u8], with_crc: bool) -> Result<Vec<f64>> {
    let crc = with_crc.then_some(&spec.crc);
    let codeword: Vec<u8> = encode_codes(&spec.subcodes, crc, payload)?.concat();
    let m = spec.bits_per_symbol();
    Ok((0..spec.n)
        .map(|s| {
            let u = (0..m).fold(0usize, |acc, j| {
                acc | (usize::from(codeword[spec.interleaver[s * m + j]]) << j)
            });
            spec.constellation.point(spec.labeling.point_index(u))
        })
        .collect())
}

fn decode_one(
    decoder: &mut PolarDecoder,
    kind: DecoderKind,
    code: &PolarCodeLevel,
    llr: &[f64],
    list: usize,
    crc: Option<&CrcConfig>,
) -> Result<Vec<u8>> {
    let res = match (kind, crc) {
        (DecoderKind::Sc, _) => decoder.sc(code, llr)?,
        (DecoderKind::CaScl, Some(crc)) => decoder.ca_scl(code, llr, list, crc)?,
        _ => decoder.scl(code, llr, list)?,
    };
    Ok(res.u_hat)
}

/// Multistage receiver for one MLC code at one noise level.
#[derive(Debug, Clone)]
pub struct MsdReceiver<'a> {
    spec: &'a MlcCodeSpec,
    demapper: Demapper,
    decoder: PolarDecoder,
    kind: DecoderKind,
    list: usize,
    llr: Vec<f64>,
    prior: Vec<usize>,
}

impl<'a> MsdReceiver<'a> {
    pub fn new(spec: &'a MlcCodeSpec, noise_std: f64, kind: DecoderKind, list: usize) -> Result<Self> {
        Ok(Self {
            spec,
            demapper: Demapper::new(&spec.labeling, &spec.constellation, noise_std)?,
            decoder: PolarDecoder::new(spec.n)?,
            kind,
            list,
            llr: vec![0.0; spec.n],
            prior: vec![0; spec.n],
        })
    }

    /// Decodes levels 1..m in order, each conditioned on the re-encoded
    /// decisions of the levels below it; returns the payload.
    pub fn decode(&mut self, y: &[f64]) -> Result<Vec<u8>> {
        let spec = self.spec;
        if y.len() != spec.n {
            return invalid(format!("received {} symbols, expected {}", y.len(), spec.n));
        }
        let crc = self.kind.uses_crc().then_some(&spec.crc);
        let split = payload_split(&spec.levels, crc);
        self.prior.fill(0);
        let mut payload = Vec::with_capacity(split.iter().map(|p| p.0).sum());
        for (j, (code, &(len, has_crc))) in spec.levels.iter().zip(&split).enumerate() {
            for t in 0..spec.n {
                self.llr[t] = self.demapper.level_llr(j + 1, self.prior[t], y[t]);
            }
            let level_crc = crc.filter(|_| has_crc);
            let u_hat = decode_one(&mut self.decoder, self.kind, code, &self.llr, self.list, level_crc)?;
            payload.extend_from_slice(&code.extract(&u_hat)[..len]);
            if j + 1 < spec.levels.len() {
                let mut c = u_hat;
                crate::polar::polar_transform(&mut c);
                for (p, &b) in self.prior.iter_mut().zip(&c) {
                    *p |= usize::from(b) << j;
                }
            }
        }
        Ok(payload)
    }
}

/// One-shot multistage decoding; see [`MsdReceiver`] for repeated use.
pub fn msd_decode(
    spec: &MlcCodeSpec,
    y: &[f64],
    noise_std: f64,
    kind: DecoderKind,
    list: usize,
) -> Result<Vec<u8>> {
    MsdReceiver::new(spec, noise_std, kind, list)?.decode(y)
}

/// Parallel-bit receiver for one BIPCM code at one noise level.
#[derive(Debug, Clone)]
pub struct BipcmReceiver<'a> {
    spec: &'a BipcmCodeSpec,
    demapper: Demapper,
    decoder: PolarDecoder,
    kind: DecoderKind,
    list: usize,
    llr: Vec<f64>,
}

impl<'a> BipcmReceiver<'a> {
    pub fn new(spec: &'a BipcmCodeSpec, noise_std: f64, kind: DecoderKind, list: usize) -> Result<Self> {
        let sub_len = spec.subcodes.first().map_or(0, |c| c.block_length());
        Ok(Self {
            spec,
            demapper: Demapper::new(&spec.labeling, &spec.constellation, noise_std)?,
            decoder: PolarDecoder::new(sub_len)?,
            kind,
            list,
            llr: vec![0.0; spec.n * spec.bits_per_symbol()],
        })
    }

    pub fn decode(&mut self, y: &[f64]) -> Result<Vec<u8>> {
        let spec = self.spec;
        let m = spec.bits_per_symbol();
        if y.len() != spec.n {
            return invalid(format!("received {} symbols, expected {}", y.len(), spec.n));
        }
        for (slot, &pos) in spec.interleaver.iter().enumerate() {
            self.llr[pos] = self.demapper.bit_llr(slot % m + 1, y[slot / m]);
        }
        let crc = self.kind.uses_crc().then_some(&spec.crc);
        let split = payload_split(&spec.subcodes, crc);
        let mut payload = Vec::new();
        let mut offset = 0;
        for (code, &(len, has_crc)) in spec.subcodes.iter().zip(&split) {
            let n = code.block_length();
            let llr = &self.llr[offset..offset + n];
            let u_hat = decode_one(&mut self.decoder, self.kind, code, llr, self.list, crc.filter(|_| has_crc))?;
            payload.extend_from_slice(&code.extract(&u_hat)[..len]);
            offset += n;
        }
        Ok(payload)
    }
}

pub fn bipcm_decode(
    spec: &BipcmCodeSpec,
    y: &[f64],
    noise_std: f64,
    kind: DecoderKind,
    list: usize,
) -> Result<Vec<u8>> {
    BipcmReceiver::new(spec, noise_std, kind, list)?.decode(y)
}

/// Generator for frame `frame` of SNR point `point`.
pub fn frame_rng(seed: u64, point: usize, frame: u64) -> ChaCha8Rng {
    let key = seed ^ (point as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(frame);
    rng
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    frames: u64,
    frame_errors: u64,
    bit_errors: u64,
}

impl Tally {
    fn add(self, o: Self) -> Self {
        Self {
            frames: self.frames + o.frames,
            frame_errors: self.frame_errors + o.frame_errors,
            bit_errors: self.bit_errors + o.bit_errors,
        }
    }
}

/// Shared driver: `frame(receiver, rng) -> bit errors` for each frame.
fn run_points<R, Make, Frame>(
    cfg: &SimConfig,
    payload_bits: usize,
    n: usize,
    make: Make,
    frame: Frame,
    mut on_point: impl FnMut(&BlerPoint),
) -> Result<Vec<BlerPoint>>
where
    R: Send,
    Make: Fn(f64) -> Result<R> + Sync,
    Frame: Fn(&mut R, &AwgnChannel, &mut ChaCha8Rng) -> Result<u64> + Sync,
{
    cfg.validate()?;
    let rate = payload_bits as f64 / n as f64;
    let pool = match cfg.workers {
        0 => None,
        w => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| crate::Error::InvalidParameter(format!("thread pool: {e}")))?,
        ),
    };
    let mut points = Vec::with_capacity(cfg.esn0_db.len());
    for (p, &esn0) in cfg.esn0_db.iter().enumerate() {
        let sigma = sigma_from_esn0_db(esn0);
        let channel = AwgnChannel::new(sigma)?;
        // Fail here rather than inside a worker.
        make(sigma)?;
        let run_batch = |start: u64, end: u64| -> Result<Tally> {
            (start..end)
                .into_par_iter()
                .map_init(
                    || make(sigma).expect("receiver construction succeeded above"),
                    |rx, f| -> Result<Tally> {
                        let mut rng = frame_rng(cfg.seed, p, f);
                        let bits = frame(rx, &channel, &mut rng)?;
                        Ok(Tally {
                            frames: 1,
                            frame_errors: u64::from(bits > 0),
                            bit_errors: bits,
                        })
                    },
                )
                .try_reduce(Tally::default, |a, b| Ok(a.add(b)))
        };
        let mut total = Tally::default();
        while total.frames < cfg.max_frames && total.frame_errors < cfg.target_errors {
            let start = total.frames;
            let end = (start + cfg.batch).min(cfg.max_frames);
            let batch = match &pool {
                Some(pool) => pool.install(|| run_batch(start, end))?,
                None => run_batch(start, end)?,
            };
            total = total.add(batch);
        }
        let point = BlerPoint {
            esn0_db: esn0,
            ebn0_db: if rate > 0.0 {
                ebn0_db_from_esn0_db(esn0, rate)
            } else {
                f64::INFINITY
            },
            frames: total.frames,
            frame_errors: total.frame_errors,
            bit_errors: total.bit_errors,
            bler: total.frame_errors as f64 / total.frames as f64,
        };
        on_point(&point);
        points.push(point);
    }
    Ok(points)
}

fn random_payload(len: usize, rng: &mut ChaCha8Rng) -> Vec<u8> {
    (0..len).map(|_| rng.random_range(0..2u8)).collect()
}

fn count_errors(a: &[u8], b: &[u8]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}

/// PCM with multistage decoding. `on_point` sees each point as it finishes.
pub fn run_bler(
    spec: &MlcCodeSpec,
    cfg: &SimConfig,
    on_point: impl FnMut(&BlerPoint),
) -> Result<Vec<BlerPoint>> {
    let with_crc = cfg.decoder.uses_crc();
    let len = payload_len(spec, with_crc);
    run_points(
        cfg,
        len,
        spec.n,
        |sigma| MsdReceiver::new(spec, sigma, cfg.decoder, cfg.list_size),
        |rx, ch, rng| {
            let payload = random_payload(len, rng);
            let x = pcm_encode_modulate(spec, &payload, with_crc)?;
            let y: Vec<f64> = x.iter().map(|&s| ch.sample(s, rng)).collect();
            Ok(count_errors(&payload, &rx.decode(&y)?))
        },
        on_point,
    )
}

/// Bit-interleaved baseline with parallel bit demapping.
pub fn run_bipcm_bler(
    spec: &BipcmCodeSpec,
    cfg: &SimConfig,
    on_point: impl FnMut(&BlerPoint),
) -> Result<Vec<BlerPoint>> {
    let with_crc = cfg.decoder.uses_crc();
    let len = bipcm_payload_len(spec, with_crc);
    run_points(
        cfg,
        len,
        spec.n,
        |sigma| BipcmReceiver::new(spec, sigma, cfg.decoder, cfg.list_size),
        |rx, ch, rng| {
            let payload = random_payload(len, rng);
            let x = bipcm_encode_modulate(spec, &payload, with_crc)?;
            let y: Vec<f64> = x.iter().map(|&s| ch.sample(s, rng)).collect();
            Ok(count_errors(&payload, &rx.decode(&y)?))
        },
        on_point,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sigma_from_esn0_db;
    use crate::constellation::{Constellation, Labeling};
    use crate::construction::{build_bipcm_code, build_mlc_code};
    use crate::polar::sc_decode;

    fn pcm(m: usize, n: usize, k: usize, esn0_db: f64) -> MlcCodeSpec {
        let c = Constellation::pam(m).unwrap();
        let lab = Labeling::natural(m).unwrap();
        build_mlc_code(&lab, &c, sigma_from_esn0_db(esn0_db), n, k).unwrap()
    }

    #[test]
    fn all_zero_frame_is_constant() {
        let spec = pcm(3, 16, 24, 12.0);
        let x = pcm_encode_modulate(&spec, &[0; 24], false).unwrap();
        let expected = spec.constellation.point(spec.labeling.point_index(0));
        assert!(x.iter().all(|&v| v == expected));
        assert!(pcm_encode_modulate(&spec, &[0; 23], false).is_err());
        assert_eq!(pcm(3, 512, 512, 8.0).n, 512);
    }

    #[test]
    fn noiseless_msd_recovers_payload() {
        let spec = pcm(3, 64, 96, 10.0);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for kind in [DecoderKind::Sc, DecoderKind::Scl, DecoderKind::CaScl] {
            let list = if kind == DecoderKind::Sc { 1 } else { 4 };
            let with_crc = kind.uses_crc();
            let mut rx = MsdReceiver::new(&spec, 1e-4, kind, list).unwrap();
            for _ in 0..100 {
                let payload = random_payload(payload_len(&spec, with_crc), &mut rng);
                let x = pcm_encode_modulate(&spec, &payload, with_crc).unwrap();
                assert_eq!(rx.decode(&x).unwrap(), payload);
            }
        }
    }

    #[test]
    fn single_level_is_bpsk_polar() {
        let spec = pcm(1, 128, 64, 2.0);
        let sigma = sigma_from_esn0_db(2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..200 {
            let payload = random_payload(64, &mut rng);
            let x = pcm_encode_modulate(&spec, &payload, false).unwrap();
            let y: Vec<f64> = x.iter().map(|&s| s + sigma * rng.sample::<f64, _>(rand_distr::StandardNormal)).collect();
            let llr: Vec<f64> = y.iter().map(|&v| -2.0 * v / (sigma * sigma)).collect();
            // Natural 1-bit labeling sends bit 0 at -1, so the BPSK LLR is negated.
            let bare = sc_decode(&spec.levels[0], &llr).unwrap().info_bits;
            assert_eq!(msd_decode(&spec, &y, sigma, DecoderKind::Sc, 1).unwrap(), bare);
        }
    }

    #[test]
    fn noiseless_and_hopeless_points() {
        let spec = pcm(2, 64, 64, 8.0);
        let cfg = SimConfig {
            esn0_db: vec![80.0, -40.0],
            max_frames: 1000,
            target_errors: 1000,
            seed: 5,
            ..SimConfig::default()
        };
        let pts = run_bler(&spec, &cfg, |_| {}).unwrap();
        assert_eq!(pts[0].frames, 1000);
        assert_eq!(pts[0].frame_errors, 0);
        assert!(pts[1].bler >= 0.99);
        let b = build_bipcm_code(2, 64, 64, sigma_from_esn0_db(8.0), 3).unwrap();
        let pts = run_bipcm_bler(&b, &cfg, |_| {}).unwrap();
        assert_eq!(pts[0].frame_errors, 0);
        assert!(pts[1].bler >= 0.99);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let spec = pcm(2, 64, 64, 6.0);
        let mut cfg = SimConfig {
            esn0_db: vec![5.0, 7.0],
            max_frames: 600,
            target_errors: 40,
            batch: 64,
            seed: 17,
            workers: 1,
            ..SimConfig::default()
        };
        let one = run_bler(&spec, &cfg, |_| {}).unwrap();
        cfg.workers = 3;
        let three = run_bler(&spec, &cfg, |_| {}).unwrap();
        assert_eq!(one, three);
        assert!(one.iter().all(|p| p.frames % 64 == 0 || p.frames == 600));
    }

    #[test]
    fn bler_decreases_with_snr() {
        let spec = pcm(2, 64, 64, 6.0);
        let cfg = SimConfig {
            esn0_db: vec![3.0, 4.5, 6.0, 7.5, 9.0],
            max_frames: 4000,
            target_errors: 100,
            seed: 23,
            ..SimConfig::default()
        };
        let mut seen = Vec::new();
        let pts = run_bler(&spec, &cfg, |p| seen.push(*p)).unwrap();
        assert_eq!(seen, pts);
        for w in pts.windows(2) {
            let tol = 3.0 * (w[0].std_error().powi(2) + w[1].std_error().powi(2)).sqrt();
            assert!(w[1].bler <= w[0].bler + tol, "{:?}", w);
        }
        assert!(pts[0].bler > pts[4].bler);
    }

    #[test]
    fn single_level_schemes_agree() {
        let sigma = sigma_from_esn0_db(2.0);
        let p = build_mlc_code(&Labeling::gray(1).unwrap(), &Constellation::pam(1).unwrap(), sigma, 128, 64).unwrap();
        let b = build_bipcm_code(1, 128, 64, sigma, 9).unwrap();
        assert_eq!(p.levels[0].info_indices(), b.subcodes[0].info_indices());
        let cfg = SimConfig {
            esn0_db: vec![2.0],
            max_frames: 3000,
            target_errors: 3000,
            seed: 31,
            ..SimConfig::default()
        };
        let a = run_bler(&p, &cfg, |_| {}).unwrap()[0];
        let c = run_bipcm_bler(&b, &cfg, |_| {}).unwrap()[0];
        let tol = 3.0 * (a.std_error().powi(2) + c.std_error().powi(2)).sqrt();
        assert!((a.bler - c.bler).abs() <= tol, "{a:?} {c:?}");
    }

    #[test]
    fn csv_layout() {
        let cfg = SimConfig {
            esn0_db: vec![1.0],
            ..SimConfig::default()
        };
        let p = BlerPoint {
            esn0_db: 1.0,
            ebn0_db: 2.0,
            frames: 10,
            frame_errors: 1,
            bit_errors: 3,
            bler: 0.1,
        };
        assert_eq!(CSV_HEADER.split(',').count(), csv_row(Scheme::Pcm, &cfg, 3, 512, 512, &p).split(',').count());
        assert_eq!(csv_row(Scheme::Bipcm, &cfg, 3, 512, 512, &p), "BIPCM,SC,1,3,512,512,1,2,10,1,3,1e-1");
        assert!(SimConfig { list_size: 4, ..cfg.clone() }.validate().is_err());
        assert!(SimConfig { esn0_db: vec![], ..cfg }.validate().is_err());
    }
}
