//! Exhaustive search over canonical labelings.
//!
//! Every candidate is scored by the union-bound BLER of the code built for
//! it at the design noise level. Candidates equivalent under component bit
//! flips share capacities, reliabilities and therefore scores, so only one
//! representative per class is evaluated.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::channel::level_capacities;
use crate::constellation::{count_candidates, CanonicalLabelings, Constellation, Labeling};
use crate::construction::build_mlc_code;
use crate::error::{invalid, parse_err, Result};

/// Predicted BLER of the code built for `labeling`.
pub fn evaluate_labeling(
    labeling: &Labeling,
    constellation: &Constellation,
    design_sigma: f64,
    n: usize,
    k: usize,
) -> Result<f64> {
    Ok(build_mlc_code(labeling, constellation, design_sigma, n, k)?.predicted_bler)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedLabeling {
    pub labeling: Labeling,
    pub predicted_bler: f64,
    /// `I(W_1), ..., I(W_m)` at the design noise level, in bits.
    pub capacities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub design_sigma: f64,
    pub evaluated_count: u64,
    /// Ascending predicted BLER; ties by lexicographically smaller table.
    pub ranked: Vec<RankedLabeling>,
}

impl SearchReport {
    pub fn best(&self) -> &RankedLabeling {
        &self.ranked[0]
    }

    /// CSV with columns `rank,labeling,predicted_bler,I_W1..I_Wm`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,labeling,predicted_bler");
        for j in 1..=self.m {
            let _ = write!(out, ",I_W{j}");
        }
        out.push('\n');
        for (rank, r) in self.ranked.iter().enumerate() {
            let _ = write!(out, "{},{},{:e}", rank + 1, r.labeling.dash_string(), r.predicted_bler);
            for c in &r.capacities {
                let _ = write!(out, ",{c}");
            }
            out.push('\n');
        }
        out
    }

    /// Reads back the ranking rows of [`SearchReport::to_csv`].
    pub fn ranked_from_csv(text: &str) -> Result<Vec<RankedLabeling>> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.starts_with("rank,labeling,predicted_bler") => {}
            _ => return parse_err(1, "missing report header"),
        }
        let mut out = Vec::new();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() < 4 {
                return parse_err(lineno, "too few columns");
            }
            let labeling = Labeling::from_dash_string(cols[1]).map_err(|e| crate::Error::Parse {
                line: lineno,
                msg: e.to_string(),
            })?;
            let num = |s: &str| {
                s.parse::<f64>().map_err(|_| crate::Error::Parse {
                    line: lineno,
                    msg: format!("bad number '{s}'"),
                })
            };
            let predicted_bler = num(cols[2])?;
            let capacities = cols[3..].iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?;
            out.push(RankedLabeling {
                labeling,
                predicted_bler,
                capacities,
            });
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SearchOptions {
    /// Permit the ~6.4e8-candidate m = 4 search.
    pub allow_large: bool,
}

/// Evaluates every canonical labeling of 2^m-PAM and ranks them.
///
/// Runs on the current rayon pool; the report does not depend on its size.
pub fn search_optimal_labeling(
    m: usize,
    n: usize,
    k: usize,
    design_sigma: f64,
    options: SearchOptions,
) -> Result<SearchReport> {
    if m > 4 {
        return invalid(format!("exhaustive labeling search supports m <= 4, got {m}"));
    }
    if !n.is_power_of_two() {
        return invalid(format!("N={n} is not a power of two"));
    }
    let candidates = CanonicalLabelings::new(m, options.allow_large)?;
    let constellation = Constellation::pam(m)?;
    let mut ranked = (0..candidates.len())
        .into_par_iter()
        .map(|idx| {
            let labeling = candidates.get(idx)?;
            let predicted_bler = evaluate_labeling(&labeling, &constellation, design_sigma, n, k)?;
            let capacities = level_capacities(&labeling, &constellation, design_sigma)?;
            Ok(RankedLabeling {
                labeling,
                predicted_bler,
                capacities,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| {
        a.predicted_bler
            .total_cmp(&b.predicted_bler)
            .then_with(|| a.labeling.table().cmp(b.labeling.table()))
    });
    let evaluated_count = ranked.len() as u64;
    debug_assert_eq!(u128::from(evaluated_count), count_candidates(m)?);
    Ok(SearchReport {
        m,
        n,
        k,
        design_sigma,
        evaluated_count,
        ranked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sigma_from_esn0_db;
    use crate::construction::{ga_evolve, perr_from_mean, surrogate_from_capacity};

    #[test]
    fn single_class_for_bpsk() {
        let report = search_optimal_labeling(1, 64, 32, 0.8, SearchOptions::default()).unwrap();
        assert_eq!(report.evaluated_count, 1);
        assert_eq!(report.best().labeling, Labeling::natural(1).unwrap());
        assert!(search_optimal_labeling(5, 64, 32, 0.8, SearchOptions::default()).is_err());
        assert!(search_optimal_labeling(4, 64, 32, 0.8, SearchOptions::default()).is_err());
    }

    #[test]
    fn metric_invariant_under_bit_flips() {
        let c = Constellation::pam(3).unwrap();
        let lab = Labeling::new(3, vec![2, 7, 4, 1, 0, 5, 6, 3]).unwrap();
        let sigma = sigma_from_esn0_db(6.0);
        let base = evaluate_labeling(&lab, &c, sigma, 64, 64).unwrap();
        for level in 1..=3 {
            let other = evaluate_labeling(&lab.complement_level(level), &c, sigma, 64, 64).unwrap();
            // Capacities agree to rounding; inverting them near I = 1 amplifies it.
            assert!((other - base).abs() <= 1e-8 * base, "{other} vs {base}");
        }
    }

    #[test]
    fn metric_matches_recomputation() {
        let c = Constellation::pam(2).unwrap();
        let lab = Labeling::natural(2).unwrap();
        let sigma = sigma_from_esn0_db(4.0);
        let caps = level_capacities(&lab, &c, sigma).unwrap();
        let mut perr: Vec<f64> = caps
            .iter()
            .flat_map(|&cap| {
                let mean0 = surrogate_from_capacity(cap).unwrap().mean;
                ga_evolve(mean0, 16).unwrap()
            })
            .map(perr_from_mean)
            .collect();
        perr.sort_by(f64::total_cmp);
        let expected: f64 = perr[..16].iter().sum();
        let got = evaluate_labeling(&lab, &c, sigma, 16, 16).unwrap();
        assert!((got - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn report_csv_round_trip() {
        let report = search_optimal_labeling(2, 16, 12, 0.5, SearchOptions::default()).unwrap();
        assert_eq!(report.evaluated_count, 3);
        let csv = report.to_csv();
        assert!(csv.starts_with("rank,labeling,predicted_bler,I_W1,I_W2\n1,"));
        let back = SearchReport::ranked_from_csv(&csv).unwrap();
        assert_eq!(back, report.ranked);
    }
}
