//! Effective distance and half-distance: bias-weighted log-likelihood
//! proxies for the most likely nontrivial logical operator and the most
//! likely non-correctable error, plus the increment used to rank random
//! deformation families.
//!
//! Both searches are exhaustive: the stabilizer group is enumerated with a
//! Gray code while letter counts per channel class are maintained
//! incrementally, which keeps the 3·2^24 candidates of an L = 5 search in
//! the seconds range. Natural logarithms are used throughout; the base
//! cancels in every reported ratio.

use rayon::prelude::*;
use thiserror::Error;

use crate::code::{
    build_layout, class_representative, sample_pattern, DeformedCode, FamilyParams, LogicalClass,
};
use crate::decode::{coset_sweep, pure_error, sweep_rates, LogSumExp, SweepRates};
use crate::harness::mix_seed;
use crate::noise::{permute_field, rates_from, Bias, BiasedNoiseParams, NoiseField};
use crate::pauli::PauliOp;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("effective distances are undefined at infinite bias")]
    InfiniteBias,
    #[error("{op} supports L up to {max}, got {got}")]
    TooLarge {
        op: &'static str,
        max: usize,
        got: usize,
    },
    #[error("error rate p = {0} must lie in (0, 1)")]
    BadErrorRate(f64),
    #[error(transparent)]
    Code(#[from] crate::code::CodeError),
    #[error(transparent)]
    Noise(#[from] crate::noise::NoiseError),
    #[error(transparent)]
    Decode(#[from] crate::decode::DecodeError),
    #[error(transparent)]
    Pauli(#[from] crate::pauli::PauliError),
}

/// Effective distance report for one code at one noise point.
#[derive(Debug, Clone)]
pub struct EffectiveDistanceReport {
    pub d_prime: f64,
    /// Present only when the non-correctable search ran (L = 3).
    pub t_prime: Option<f64>,
    pub log_p_log: f64,
    pub log_p_cor: Option<f64>,
    pub normalizer: f64,
    /// Most likely nontrivial logical, in the deformed frame.
    pub witness_logical: PauliOp,
    pub witness_noncorrectable: Option<PauliOp>,
}

/// The per-Z-letter log-likelihood unit N = ln(p_Z / (1 - p)) that turns
/// log probabilities into effective distances. Negative whenever
/// p_Z < 1 - p.
pub fn normalization_factor(p: f64, eta: Bias) -> Result<f64, MetricsError> {
    let eta = eta.finite().ok_or(MetricsError::InfiniteBias)?;
    if !(0.0 < p && p < 1.0) {
        return Err(MetricsError::BadErrorRate(p));
    }
    Ok((p * eta / ((1.0 + eta) * (1.0 - p))).ln())
}

/// Tracks the most likely coset element: fewest zero-rate letters first,
/// then the largest finite log-likelihood, ties broken lexicographically
/// on the undeformed-frame encoding.
#[derive(Clone, Copy)]
struct BestElement {
    zeros: u32,
    logp: f64,
    x: u64,
    z: u64,
}

impl BestElement {
    fn new() -> Self {
        BestElement {
            zeros: u32::MAX,
            logp: f64::NEG_INFINITY,
            x: 0,
            z: 0,
        }
    }

    fn offer(&mut self, n: usize, logp: f64, zeros: u32, x: u64, z: u64) {
        let better = zeros < self.zeros
            || (zeros == self.zeros
                && (logp > self.logp
                    || (logp == self.logp && lex_less(n, x, z, self.x, self.z))));
        if better {
            *self = BestElement { zeros, logp, x, z };
        }
    }

    /// Log-likelihood, negative infinity when impossible.
    fn log_prob(&self) -> f64 {
        if self.zeros == 0 {
            self.logp
        } else {
            f64::NEG_INFINITY
        }
    }
}

fn coset_max(
    layout: &crate::code::SurfaceCodeLayout,
    rates: &SweepRates,
    base: &PauliOp,
) -> BestElement {
    let mut best = BestElement::new();
    let n = layout.qubits();
    coset_sweep(layout, rates, base, |logp, zeros, x, z| {
        best.offer(n, logp, zeros, x, z);
    });
    best
}

/// Lexicographic order on the textual encoding I < X < Y < Z, qubit 0 first.
fn lex_less(n: usize, x1: u64, z1: u64, x2: u64, z2: u64) -> bool {
    for q in 0..n {
        let a = letter_rank(x1 >> q & 1, z1 >> q & 1);
        let b = letter_rank(x2 >> q & 1, z2 >> q & 1);
        if a != b {
            return a < b;
        }
    }
    false
}

fn letter_rank(x: u64, z: u64) -> u8 {
    match (x, z) {
        (0, 0) => 0, // I
        (1, 0) => 1, // X
        (1, 1) => 2, // Y
        _ => 3,      // Z
    }
}

fn op_from_words(n: usize, x: u64, z: u64) -> PauliOp {
    PauliOp::from_bit_words(n, vec![x], vec![z])
}

/// Most likely Pauli operator implementing a nontrivial logical, together
/// with its log-likelihood. Exhaustive over the three nontrivial cosets;
/// limited to L <= 5.
pub fn most_likely_logical(
    code: &DeformedCode,
    field: &NoiseField,
) -> Result<(PauliOp, f64), MetricsError> {
    let l = code.layout().linear_size();
    if l > 5 {
        return Err(MetricsError::TooLarge {
            op: "most_likely_logical",
            max: 5,
            got: l,
        });
    }
    let layout = code.layout();
    let rates = sweep_rates(field);
    let mut best = BestElement::new();
    for class in [LogicalClass::X, LogicalClass::Z, LogicalClass::Y] {
        let rep = class_representative(layout, class);
        let candidate = coset_max(layout, &rates, &rep);
        best.offer(
            layout.qubits(),
            candidate.logp,
            candidate.zeros,
            candidate.x,
            candidate.z,
        );
    }
    let mapped = op_from_words(layout.qubits(), best.x, best.z);
    let deformed = code.pattern().permute(&mapped)?;
    Ok((deformed, best.log_prob()))
}

/// Most likely error the exact maximum-likelihood decoder fails on,
/// together with its log-likelihood. Enumerates every syndrome, so it is
/// limited to L = 3.
pub fn most_likely_noncorrectable(
    code: &DeformedCode,
    field: &NoiseField,
) -> Result<(PauliOp, f64), MetricsError> {
    let l = code.layout().linear_size();
    if l > 3 {
        return Err(MetricsError::TooLarge {
            op: "most_likely_noncorrectable",
            max: 3,
            got: l,
        });
    }
    let layout = code.layout();
    let n = layout.qubits();
    let m = layout.generators().len();
    let rates = sweep_rates(field);
    let mut best = BestElement::new();
    for s in 0..1u32 << m {
        let syndrome: Vec<bool> = (0..m).map(|g| s >> g & 1 == 1).collect();
        let pure = pure_error(layout, &syndrome)?;
        // Coset sums decide the winner; every element of a losing coset is
        // non-correctable.
        let mut sums = [f64::NEG_INFINITY; 4];
        let mut maxima = [BestElement::new(); 4];
        for class in LogicalClass::ALL {
            let base = pure.multiply(&class_representative(layout, class)).unwrap();
            let mut acc = LogSumExp::new();
            let entry = &mut maxima[class.index()];
            coset_sweep(layout, &rates, &base, |logp, zeros, x, z| {
                if zeros == 0 {
                    acc.push(logp);
                }
                entry.offer(n, logp, zeros, x, z);
            });
            sums[class.index()] = acc.value();
        }
        let mut chosen = LogicalClass::I;
        for class in LogicalClass::ALL {
            if sums[class.index()] > sums[chosen.index()] {
                chosen = class;
            }
        }
        for class in LogicalClass::ALL {
            if class == chosen {
                continue;
            }
            let cand = maxima[class.index()];
            best.offer(n, cand.logp, cand.zeros, cand.x, cand.z);
        }
    }
    let mapped = op_from_words(n, best.x, best.z);
    let deformed = code.pattern().permute(&mapped)?;
    Ok((deformed, best.log_prob()))
}

/// Full effective-distance report at the given noise point. The
/// half-distance part is computed only at L = 3 and omitted otherwise.
pub fn effective_distance(
    code: &DeformedCode,
    params: &BiasedNoiseParams,
) -> Result<EffectiveDistanceReport, MetricsError> {
    let normalizer = normalization_factor(params.p, params.eta)?;
    let n = code.qubits() as f64;
    let base = rates_from(params);
    let field = permute_field(base, code.pattern());
    let (witness_logical, log_p_log) = most_likely_logical(code, &field)?;
    debug_assert!(log_p_log.is_finite());
    let log_one_minus_p = (1.0 - params.p).ln();
    let d_prime = (log_p_log - n * log_one_minus_p) / normalizer;
    let (t_prime, log_p_cor, witness_noncorrectable) = if code.layout().linear_size() == 3 {
        let (witness, log_p_cor) = most_likely_noncorrectable(code, &field)?;
        let t = (log_p_cor - n * log_one_minus_p) / normalizer;
        (Some(t), Some(log_p_cor), Some(witness))
    } else {
        (None, None, None)
    };
    Ok(EffectiveDistanceReport {
        d_prime,
        t_prime,
        log_p_log,
        log_p_cor,
        normalizer,
        witness_logical,
        witness_noncorrectable,
    })
}

/// Mean and standard error of d'(5) - d'(3) over IID realizations of the
/// family, with one counter-derived PRNG stream per realization.
pub fn effective_distance_increment(
    family: FamilyParams,
    p: f64,
    eta: Bias,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64), MetricsError> {
    let layout3 = Arc::new(build_layout(3)?);
    let layout5 = Arc::new(build_layout(5)?);
    let params = BiasedNoiseParams::new(p, eta)?;
    // Fail fast on invalid noise points before spawning work.
    normalization_factor(p, eta)?;
    let deltas: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, i as u64));
            let pattern3 = sample_pattern(family, 9, &mut rng);
            let pattern5 = sample_pattern(family, 25, &mut rng);
            let code3 = DeformedCode::new(Arc::clone(&layout3), pattern3).unwrap();
            let code5 = DeformedCode::new(Arc::clone(&layout5), pattern5).unwrap();
            let d3 = effective_distance(&code3, &params)?.d_prime;
            let d5 = effective_distance(&code5, &params)?.d_prime;
            Ok(d5 - d3)
        })
        .collect::<Result<_, MetricsError>>()?;
    let mean = deltas.iter().sum::<f64>() / samples as f64;
    let var = deltas.iter().map(|d| (d - mean).powi(2)).sum::<f64>()
        / (samples as f64 * (samples as f64 - 1.0).max(1.0));
    Ok((mean, var.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{preset, Preset};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn code(l: usize, pattern: crate::pauli::DeformationPattern) -> DeformedCode {
        DeformedCode::new(Arc::new(build_layout(l).unwrap()), pattern).unwrap()
    }

    fn field_for(code: &DeformedCode, p: f64, eta: Bias) -> NoiseField {
        permute_field(
            rates_from(&BiasedNoiseParams::new(p, eta).unwrap()),
            code.pattern(),
        )
    }

    #[test]
    fn normalization_factor_examples() {
        let n = normalization_factor(0.01, Bias::Finite(0.5)).unwrap();
        assert!((n - ((0.01 / 3.0) / 0.99f64).ln()).abs() < 1e-14);
        assert!(normalization_factor(0.01, Bias::Finite(500.0)).unwrap() < 0.0);
        assert!(normalization_factor(0.3, Bias::Infinite).is_err());

        // N equals the log-likelihood cost of one Z relative to one I.
        let params = BiasedNoiseParams::new(0.05, Bias::Finite(30.0)).unwrap();
        let ch = rates_from(&params);
        let direct = ch.rate(crate::pauli::PauliLetter::Z).ln() - (1.0 - 0.05f64).ln();
        assert!((normalization_factor(0.05, params.eta).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn depolarizing_most_likely_logical_is_weight_three() {
        let code = code(3, preset(Preset::Css, 3));
        let field = field_for(&code, 0.1, Bias::Finite(0.5));
        let (witness, logp) = most_likely_logical(&code, &field).unwrap();
        assert_eq!(witness.weight(), 3);
        let expected = 3.0 * (0.1f64 / 3.0).ln() + 6.0 * 0.9f64.ln();
        assert!((logp - expected).abs() < 1e-12);
    }

    #[test]
    fn xy_most_likely_logical_is_boundary_string() {
        // At low p and moderate bias the winner is L-1 Z letters plus one
        // X or Y.
        let code = code(3, preset(Preset::Xy, 3));
        let field = field_for(&code, 0.01, Bias::Finite(500.0));
        let (witness, logp) = most_likely_logical(&code, &field).unwrap();
        let (nx, ny, nz) = witness.weight_decomposition();
        assert_eq!(nz, 2);
        assert_eq!(nx + ny, 1);
        let ch = rates_from(&BiasedNoiseParams::new(0.01, Bias::Finite(500.0)).unwrap());
        let expected = 2.0 * ch.rate(crate::pauli::PauliLetter::Z).ln()
            + ch.rate(crate::pauli::PauliLetter::X).ln()
            + 6.0 * 0.99f64.ln();
        assert!((logp - expected).abs() < 1e-12);
    }

    #[test]
    fn infinite_bias_css_most_likely_logical_is_pure_z_column() {
        let code = code(3, preset(Preset::Css, 3));
        let field = field_for(&code, 0.1, Bias::Infinite);
        let (witness, logp) = most_likely_logical(&code, &field).unwrap();
        let (nx, ny, nz) = witness.weight_decomposition();
        assert_eq!((nx, ny, nz), (0, 0, 3));
        let expected = 3.0 * 0.1f64.ln() + 6.0 * 0.9f64.ln();
        assert!((logp - expected).abs() < 1e-12);
    }

    #[test]
    fn witnesses_live_in_nontrivial_cosets() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let params = FamilyParams::new(0.25, 0.5).unwrap();
        for _ in 0..5 {
            let pattern = sample_pattern(params, 9, &mut rng);
            let c = code(3, pattern);
            let field = field_for(&c, 0.02, Bias::Finite(100.0));
            let (witness, _) = most_likely_logical(&c, &field).unwrap();
            let class = c.logical_class(&witness).unwrap();
            assert!(matches!(
                class,
                Some(LogicalClass::X) | Some(LogicalClass::Y) | Some(LogicalClass::Z)
            ));
        }
    }

    #[test]
    fn depolarizing_effective_distance_is_integer_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let params = BiasedNoiseParams::new(0.1, Bias::Finite(0.5)).unwrap();
        let family = FamilyParams::new(1.0 / 3.0, 1.0 / 3.0).unwrap();
        for _ in 0..10 {
            let pattern = sample_pattern(family, 9, &mut rng);
            let c = code(3, pattern);
            let report = effective_distance(&c, &params).unwrap();
            assert!((report.d_prime - 3.0).abs() < 1e-10, "{}", report.d_prime);
        }
    }

    #[test]
    fn exponentiating_the_report_recovers_p_log() {
        let c = code(3, preset(Preset::Xzzx, 3));
        let params = BiasedNoiseParams::new(0.05, Bias::Finite(30.0)).unwrap();
        let report = effective_distance(&c, &params).unwrap();
        let n = 9.0;
        let reconstructed = n * (1.0 - 0.05f64).ln() + report.normalizer * report.d_prime;
        assert!((reconstructed - report.log_p_log).abs() < 1e-10);
    }

    #[test]
    fn xy_effective_distance_matches_closed_form() {
        let c = code(3, preset(Preset::Xy, 3));
        let params = BiasedNoiseParams::new(0.01, Bias::Finite(500.0)).unwrap();
        let report = effective_distance(&c, &params).unwrap();
        let n_factor = normalization_factor(0.01, Bias::Finite(500.0)).unwrap();
        let closed = 3.0 - (2.0 * 500.0f64).ln() / n_factor;
        assert!(
            (report.d_prime - closed).abs() < 1e-9,
            "exhaustive {} vs closed form {closed}",
            report.d_prime
        );
        assert!((closed - 4.50).abs() < 0.01);
    }

    #[test]
    fn css_increment_is_exactly_two_at_depolarizing() {
        let (mean, se) =
            effective_distance_increment(FamilyParams::new(0.0, 0.0).unwrap(), 0.1, Bias::Finite(0.5), 8, 1)
                .unwrap();
        assert!((mean - 2.0).abs() < 1e-9);
        assert!(se < 1e-9);
    }

    #[test]
    fn increment_is_seed_deterministic() {
        let family = FamilyParams::new(0.25, 0.5).unwrap();
        let a = effective_distance_increment(family, 0.02, Bias::Finite(100.0), 4, 9).unwrap();
        let b = effective_distance_increment(family, 0.02, Bias::Finite(100.0), 4, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reports_are_invariant_under_lattice_rotation() {
        // Rotating qubits by 180 degrees is a layout automorphism, so a
        // pattern and its rotated copy give identical d' and t'.
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let params = BiasedNoiseParams::new(0.02, Bias::Finite(100.0)).unwrap();
        let family = FamilyParams::new(0.25, 0.5).unwrap();
        for _ in 0..4 {
            let pattern = sample_pattern(family, 9, &mut rng);
            let rotated = crate::pauli::DeformationPattern::new(
                (0..9).map(|q| pattern.kind(8 - q)).collect(),
            );
            let a = effective_distance(&code(3, pattern), &params).unwrap();
            let b = effective_distance(&code(3, rotated), &params).unwrap();
            assert!((a.d_prime - b.d_prime).abs() < 1e-9);
            assert!((a.t_prime.unwrap() - b.t_prime.unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_infinite_bias_and_large_l() {
        let c = code(3, preset(Preset::Css, 3));
        let params = BiasedNoiseParams::new(0.1, Bias::Infinite).unwrap();
        assert!(matches!(
            effective_distance(&c, &params),
            Err(MetricsError::InfiniteBias)
        ));
        let c7 = code(7, preset(Preset::Css, 7));
        let field = field_for(&c7, 0.1, Bias::Finite(0.5));
        assert!(most_likely_logical(&c7, &field).is_err());
        let c5 = code(5, preset(Preset::Css, 5));
        let field5 = field_for(&c5, 0.1, Bias::Finite(0.5));
        assert!(most_likely_noncorrectable(&c5, &field5).is_err());
    }
}
