//! Maximum-likelihood decoding: exact coset enumeration for small codes and
//! a tensor-network approximation for all sizes.
//!
//! Both decoders work in the undeformed frame: stabilizers stay in CSS form
//! and the deformation is pushed into the per-qubit noise channels. Coset
//! probabilities are accumulated in log space so strongly biased channels
//! (including exactly infinite bias, where some letters have zero rate) are
//! handled without underflow.

mod tn;

pub use tn::{tn_coset_log_probs, tn_ml_decode};

use thiserror::Error;

use crate::code::{class_representative, DeformedCode, LogicalClass, SurfaceCodeLayout};
use crate::noise::NoiseField;
use crate::pauli::PauliOp;

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("syndrome has {got} bits but the code has {expected} generators")]
    SyndromeLength { got: usize, expected: usize },
    #[error("{op} supports at most n = {max} qubits, got {got}")]
    TooLarge {
        op: &'static str,
        max: usize,
        got: usize,
    },
    #[error("noise field length {field} does not match qubit count {qubits}")]
    FieldLength { field: usize, qubits: usize },
    #[error("bond dimension must be at least 1")]
    BadBondDimension,
    #[error(transparent)]
    Code(#[from] crate::code::CodeError),
    #[error(transparent)]
    Pauli(#[from] crate::pauli::PauliError),
}

/// Which maximum-likelihood decoder to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderKind {
    Exact,
    /// Tensor-network decoding with the given bond dimension.
    Tn { chi: usize },
}

/// Normalized likelihoods of the four logical classes given a syndrome,
/// indexed in the pinned order I, X, Z, Y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosetProbabilities {
    probs: [f64; 4],
}

impl CosetProbabilities {
    /// Normalizes log-space coset sums with max subtraction. Classes with
    /// log probability of negative infinity (zero-probability cosets at
    /// infinite bias) come out as exact zeros.
    pub fn from_log(log_probs: [f64; 4]) -> Self {
        let m = log_probs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut probs = [0.0; 4];
        if m.is_finite() {
            for (p, &lp) in probs.iter_mut().zip(&log_probs) {
                *p = (lp - m).exp();
            }
            let total: f64 = probs.iter().sum();
            for p in &mut probs {
                *p /= total;
            }
        }
        CosetProbabilities { probs }
    }

    pub fn prob(&self, class: LogicalClass) -> f64 {
        self.probs[class.index()]
    }

    pub fn as_array(&self) -> [f64; 4] {
        self.probs
    }

    /// Argmax class with ties broken in the declaration order I, X, Z, Y.
    pub fn best_class(&self) -> LogicalClass {
        let mut best = LogicalClass::I;
        for class in LogicalClass::ALL {
            if self.probs[class.index()] > self.probs[best.index()] {
                best = class;
            }
        }
        best
    }
}

/// Result of a decode call. The correction is expressed in the deformed
/// frame, so its syndrome under the deformed code equals the input.
#[derive(Debug, Clone)]
pub struct DecodeOutcome {
    pub chosen: LogicalClass,
    pub correction: PauliOp,
    pub coset_probs: CosetProbabilities,
    pub converged: bool,
}

/// Deterministic coset representative for a syndrome, built as the product
/// of fixed per-generator strings to the boundary (undeformed frame).
pub fn pure_error(layout: &SurfaceCodeLayout, syndrome: &[bool]) -> Result<PauliOp, DecodeError> {
    if syndrome.len() != layout.generators().len() {
        return Err(DecodeError::SyndromeLength {
            got: syndrome.len(),
            expected: layout.generators().len(),
        });
    }
    let mut op = PauliOp::identity(layout.qubits());
    for (g, &bit) in syndrome.iter().enumerate() {
        if bit {
            op.multiply_in_place(layout.pure_error_string(g));
        }
    }
    Ok(op)
}

/// Per-qubit rates split into a finite log part and an exact zero
/// indicator, indexed by the two symplectic bits x + 2z. Keeping the zero
/// count as an integer avoids sentinel arithmetic destroying the finite
/// part of incremental sums.
pub(crate) struct SweepRates {
    pub finite: Vec<[f64; 4]>,
    pub zero: Vec<[u8; 4]>,
}

pub(crate) fn sweep_rates(field: &NoiseField) -> SweepRates {
    use crate::pauli::PauliLetter::{I, X, Y, Z};
    let mut finite = Vec::with_capacity(field.len());
    let mut zero = Vec::with_capacity(field.len());
    for ch in field.channels() {
        let mut f = [0.0; 4];
        let mut z = [0u8; 4];
        for (bits, letter) in [(0, I), (1, X), (2, Z), (3, Y)] {
            let r = ch.rate(letter);
            if r > 0.0 {
                f[bits] = r.ln();
            } else {
                z[bits] = 1;
            }
        }
        finite.push(f);
        zero.push(z);
    }
    SweepRates { finite, zero }
}

/// Streaming log-sum-exp accumulator.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogSumExp {
    max: f64,
    sum: f64,
}

impl LogSumExp {
    pub(crate) fn new() -> Self {
        LogSumExp {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    pub(crate) fn push(&mut self, x: f64) {
        if x <= self.max {
            self.sum += (x - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    pub(crate) fn value(&self) -> f64 {
        if self.max.is_finite() {
            self.max + self.sum.ln()
        } else {
            self.max
        }
    }
}

/// Walks the coset { base * S : S in the stabilizer group } in Gray-code
/// order, maintaining the finite log-likelihood part and the count of
/// zero-rate letters incrementally. The visitor receives
/// (finite log p, zero-letter count, x bits, z bits); the element's
/// probability is exp(log p) when the count is zero and exactly 0
/// otherwise.
pub(crate) fn coset_sweep<F: FnMut(f64, u32, u64, u64)>(
    layout: &SurfaceCodeLayout,
    rates: &SweepRates,
    base: &PauliOp,
    mut visit: F,
) {
    let n = layout.qubits();
    assert!(n <= 64, "coset sweep requires single-word operators");
    let gens = layout.generators();
    let gen_data: Vec<(u64, u64, &[usize])> = gens
        .iter()
        .map(|g| (g.op.x_words()[0], g.op.z_words()[0], g.support.as_slice()))
        .collect();
    let mut x = base.x_words()[0];
    let mut z = base.z_words()[0];
    let mut logp = 0.0;
    let mut zeros = 0u32;
    for q in 0..n {
        let bits = (x >> q & 1 | (z >> q & 1) << 1) as usize;
        logp += rates.finite[q][bits];
        zeros += u32::from(rates.zero[q][bits]);
    }
    visit(logp, zeros, x, z);
    let steps = 1u64 << gens.len();
    let mut k = 1u64;
    while k < steps {
        let g = k.trailing_zeros() as usize;
        let (gx, gz, support) = gen_data[g];
        for &q in support {
            let bits = (x >> q & 1 | (z >> q & 1) << 1) as usize;
            let new_bits = bits ^ (gx >> q & 1 | (gz >> q & 1) << 1) as usize;
            logp += rates.finite[q][new_bits] - rates.finite[q][bits];
            zeros += u32::from(rates.zero[q][new_bits]);
            zeros -= u32::from(rates.zero[q][bits]);
        }
        x ^= gx;
        z ^= gz;
        visit(logp, zeros, x, z);
        k += 1;
    }
}

/// Log-space coset sums for the four classes by exact enumeration of the
/// stabilizer group. `base` is a coset representative in the undeformed
/// frame (pure error times class representative).
pub(crate) fn exact_coset_log_probs(
    layout: &SurfaceCodeLayout,
    rates: &SweepRates,
    pure: &PauliOp,
) -> [f64; 4] {
    let mut out = [f64::NEG_INFINITY; 4];
    for class in LogicalClass::ALL {
        let base = pure.multiply(&class_representative(layout, class)).unwrap();
        let mut acc = LogSumExp::new();
        coset_sweep(layout, rates, &base, |logp, zeros, _, _| {
            if zeros == 0 {
                acc.push(logp);
            }
        });
        out[class.index()] = acc.value();
    }
    out
}

/// Exact maximum-likelihood decoding by enumerating the stabilizer group.
/// Feasible up to n = 25 (2^24 group elements per class).
pub fn exact_ml_decode(
    code: &DeformedCode,
    field: &NoiseField,
    syndrome: &[bool],
) -> Result<DecodeOutcome, DecodeError> {
    let n = code.qubits();
    if n > 25 {
        return Err(DecodeError::TooLarge {
            op: "exact_ml_decode",
            max: 25,
            got: n,
        });
    }
    if field.len() != n {
        return Err(DecodeError::FieldLength {
            field: field.len(),
            qubits: n,
        });
    }
    let layout = code.layout();
    let pure = pure_error(layout, syndrome)?;
    let rates = sweep_rates(field);
    let log_probs = exact_coset_log_probs(layout, &rates, &pure);
    let coset_probs = CosetProbabilities::from_log(log_probs);
    let chosen = coset_probs.best_class();
    let correction = code
        .pattern()
        .permute(&pure.multiply(&class_representative(layout, chosen)).unwrap())?;
    Ok(DecodeOutcome {
        chosen,
        correction,
        coset_probs,
        converged: true,
    })
}

/// Runs the requested decoder on the syndrome of `error` (deformed frame)
/// and reports whether the residual operator after correction is a
/// nontrivial logical.
pub fn decode_failure(
    code: &DeformedCode,
    field: &NoiseField,
    error: &PauliOp,
    decoder: DecoderKind,
) -> Result<bool, DecodeError> {
    let syndrome = code.syndrome(error)?;
    let outcome = match decoder {
        DecoderKind::Exact => exact_ml_decode(code, field, &syndrome)?,
        DecoderKind::Tn { chi } => tn_ml_decode(code, field, &syndrome, chi)?,
    };
    let residual = outcome.correction.multiply(error).unwrap();
    let class = code.logical_class(&residual)?;
    debug_assert!(class.is_some(), "correction must match the syndrome");
    Ok(class != Some(LogicalClass::I))
}

/// True class of an undeformed-frame error relative to the deterministic
/// pure-error representative of its syndrome. A decoder fails on the error
/// exactly when its chosen class differs from this one.
pub fn true_class(
    code: &DeformedCode,
    mapped_error: &PauliOp,
    syndrome: &[bool],
) -> Result<LogicalClass, DecodeError> {
    let pure = pure_error(code.layout(), syndrome)?;
    let residual = mapped_error.multiply(&pure).unwrap();
    Ok(crate::code::class_from_commutation(code.layout(), &residual))
}

/// Failure probability of exact maximum-likelihood decoding, summed over
/// every weighted Pauli error. Runs in O(4^n) with table lookups; intended
/// for the 3×3 code.
pub fn exhaustive_failure_probability(
    code: &DeformedCode,
    field: &NoiseField,
) -> Result<f64, DecodeError> {
    let n = code.qubits();
    if n > 12 {
        return Err(DecodeError::TooLarge {
            op: "exhaustive_failure_probability",
            max: 12,
            got: n,
        });
    }
    if field.len() != n {
        return Err(DecodeError::FieldLength {
            field: field.len(),
            qubits: n,
        });
    }
    let layout = code.layout();
    let gens = layout.generators();
    let m = gens.len();
    let size = 1usize << n;

    // Per-qubit syndrome contributions: an X component flips Z-type
    // generators and vice versa (undeformed frame).
    let mut qsynd_x = vec![0u32; n];
    let mut qsynd_z = vec![0u32; n];
    for (g, gen) in gens.iter().enumerate() {
        for &q in &gen.support {
            match gen.kind {
                crate::code::StabKind::Ztype => qsynd_x[q] |= 1 << g,
                crate::code::StabKind::Xtype => qsynd_z[q] |= 1 << g,
            }
        }
    }
    let col0: u64 = layout.logical_z().z_words()[0];
    let row0: u64 = layout.logical_x().x_words()[0];

    // log rate(x, z) decomposed per qubit as alpha + beta x + gamma z +
    // delta xz, so the total splits into three table lookups. Zero-rate
    // letters are counted separately in exact integer tables; any element
    // touching one has probability exactly zero. The identity rate 1 - p
    // is positive, so alpha never hits a zero.
    let rates = sweep_rates(field);
    let mut table_x = vec![0.0f64; size];
    let mut table_z = vec![0.0f64; size];
    let mut table_xz = vec![0.0f64; size];
    let mut zeros_x = vec![0i32; size];
    let mut zeros_z = vec![0i32; size];
    let mut zeros_xz = vec![0i32; size];
    let mut synd_x = vec![0u32; size];
    let mut synd_z = vec![0u32; size];
    let alpha_total: f64 = rates.finite.iter().map(|t| t[0]).sum();
    for w in 1..size {
        let q = w.trailing_zeros() as usize;
        let prev = w & (w - 1);
        let f = &rates.finite[q];
        let z4 = &rates.zero[q];
        table_x[w] = table_x[prev] + (f[1] - f[0]);
        table_z[w] = table_z[prev] + (f[2] - f[0]);
        table_xz[w] = table_xz[prev] + (f[3] - f[1] - f[2] + f[0]);
        zeros_x[w] = zeros_x[prev] + i32::from(z4[1]);
        zeros_z[w] = zeros_z[prev] + i32::from(z4[2]);
        zeros_xz[w] = zeros_xz[prev] + i32::from(z4[3]) - i32::from(z4[1]) - i32::from(z4[2]);
        synd_x[w] = synd_x[prev] ^ qsynd_x[q];
        synd_z[w] = synd_z[prev] ^ qsynd_z[q];
    }

    let mut buckets = vec![[0.0f64; 4]; 1 << m];
    for x in 0..size {
        let sx = synd_x[x];
        let ax = ((x as u64 & col0).count_ones() & 1) as usize;
        let bx = table_x[x];
        for z in 0..size {
            if zeros_x[x] + zeros_z[z] + zeros_xz[x & z] != 0 {
                continue;
            }
            let s = (sx ^ synd_z[z]) as usize;
            let cls = ax | ((((z as u64 & row0).count_ones() & 1) as usize) << 1);
            let logp = alpha_total + bx + table_z[z] + table_xz[x & z];
            buckets[s][cls] += logp.exp();
        }
    }

    let mut success = 0.0;
    for bucket in &buckets {
        success += bucket.iter().cloned().fold(0.0, f64::max);
    }
    Ok(1.0 - success)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{
        build_layout, preset, sample_pattern, DeformedCode, FamilyParams, Preset,
    };
    use crate::noise::{permute_field, rates_from, Bias, BiasedNoiseParams, NoiseField};
    use crate::pauli::{DeformationPattern, PauliLetter};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn setup(
        l: usize,
        pattern: DeformationPattern,
        p: f64,
        eta: Bias,
    ) -> (DeformedCode, NoiseField) {
        let layout = Arc::new(build_layout(l).unwrap());
        let code = DeformedCode::new(layout, pattern).unwrap();
        let base = rates_from(&BiasedNoiseParams::new(p, eta).unwrap());
        let field = permute_field(base, code.pattern());
        (code, field)
    }

    #[test]
    fn pure_error_matches_syndrome() {
        let (code, _) = setup(3, preset(Preset::Css, 3), 0.1, Bias::Finite(0.5));
        let layout = code.layout();
        // Zero syndrome gives the identity.
        let zero = vec![false; 8];
        assert!(pure_error(layout, &zero).unwrap().is_identity());
        // Every single-generator syndrome is reproduced exactly.
        for g in 0..8 {
            let mut syndrome = vec![false; 8];
            syndrome[g] = true;
            let op = pure_error(layout, &syndrome).unwrap();
            assert_eq!(code.syndrome_undeformed_frame(&op), syndrome);
        }
    }

    #[test]
    fn pure_error_matches_arbitrary_syndromes() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for l in [3usize, 5] {
            let (code, field) = setup(l, preset(Preset::Xzzx, l), 0.15, Bias::Finite(10.0));
            for _ in 0..20 {
                let err = field.sample(&mut rng);
                let syndrome = code.syndrome_undeformed_frame(&err);
                let op = pure_error(code.layout(), &syndrome).unwrap();
                assert_eq!(code.syndrome_undeformed_frame(&op), syndrome);
                // The residual against the true error is in the normalizer.
                let residual = err.multiply(&op).unwrap();
                assert!(code
                    .logical_class_undeformed_frame(&residual)
                    .is_some());
            }
        }
    }

    #[test]
    fn pure_error_is_deterministic() {
        let (code, _) = setup(3, preset(Preset::Css, 3), 0.1, Bias::Finite(0.5));
        let syndrome = vec![true, false, true, true, false, false, true, false];
        let a = pure_error(code.layout(), &syndrome).unwrap();
        let b = pure_error(code.layout(), &syndrome).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_syndrome_low_p_chooses_identity() {
        let (code, field) = setup(3, preset(Preset::Css, 3), 0.01, Bias::Finite(0.5));
        let outcome = exact_ml_decode(&code, &field, &vec![false; 8]).unwrap();
        assert_eq!(outcome.chosen, LogicalClass::I);
        assert!(outcome.coset_probs.prob(LogicalClass::I) > 0.99);
    }

    #[test]
    fn coset_probabilities_are_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (code, field) = setup(3, preset(Preset::Xy, 3), 0.12, Bias::Finite(30.0));
        for _ in 0..40 {
            let err = field.sample(&mut rng);
            let syndrome = code.syndrome_undeformed_frame(&err);
            let outcome = exact_ml_decode(&code, &field, &syndrome).unwrap();
            let total: f64 = outcome.coset_probs.as_array().iter().sum();
            assert!((total - 1.0).abs() < 1e-10);
            // The correction reproduces the syndrome in the deformed code.
            assert_eq!(code.syndrome(&outcome.correction).unwrap(), syndrome);
        }
    }

    #[test]
    fn depolarizing_coset_multiset_is_pattern_invariant() {
        // For depolarizing noise the coset probabilities of any deformed
        // code equal those of the undeformed code as a multiset.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (css, css_field) = setup(3, preset(Preset::Css, 3), 0.1, Bias::Finite(0.5));
        let params = FamilyParams::new(0.3, 0.4).unwrap();
        for _ in 0..5 {
            let pattern = sample_pattern(params, 9, &mut rng);
            let (code, field) = setup(3, pattern, 0.1, Bias::Finite(0.5));
            let err = field.sample(&mut rng);
            let syndrome = code.syndrome_undeformed_frame(&err);
            let a = exact_ml_decode(&code, &field, &syndrome).unwrap();
            let b = exact_ml_decode(&css, &css_field, &syndrome).unwrap();
            let mut pa = a.coset_probs.as_array().to_vec();
            let mut pb = b.coset_probs.as_array().to_vec();
            pa.sort_by(f64::total_cmp);
            pb.sort_by(f64::total_cmp);
            for (x, y) in pa.iter().zip(&pb) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn stabilizer_errors_never_fail() {
        let (code, field) = setup(3, preset(Preset::Xzzx, 3), 0.1, Bias::Finite(3.0));
        let gens = code.layout().generators();
        let stab = code
            .pattern()
            .permute(&gens[0].op.multiply(&gens[5].op).unwrap())
            .unwrap();
        assert!(!decode_failure(&code, &field, &stab, DecoderKind::Exact).unwrap());
    }

    #[test]
    fn logical_with_zero_syndrome_fails_at_low_p() {
        let (code, field) = setup(3, preset(Preset::Css, 3), 0.01, Bias::Finite(0.5));
        let logical = code.deformed_logical_z();
        assert!(decode_failure(&code, &field, &logical, DecoderKind::Exact).unwrap());
    }

    #[test]
    fn exhaustive_failure_matches_per_syndrome_decoding() {
        let (code, field) = setup(3, preset(Preset::Css, 3), 0.1, Bias::Finite(0.5));
        let direct = exhaustive_failure_probability(&code, &field).unwrap();

        // Independent route: decode each syndrome, then add up the
        // probability of every error whose class disagrees.
        let layout = code.layout();
        let rates = sweep_rates(&field);
        let mut failure = 0.0;
        for s in 0..256u32 {
            let syndrome: Vec<bool> = (0..8).map(|g| s >> g & 1 == 1).collect();
            let outcome = exact_ml_decode(&code, &field, &syndrome).unwrap();
            let pure = pure_error(layout, &syndrome).unwrap();
            let log_probs = exact_coset_log_probs(layout, &rates, &pure);
            for class in LogicalClass::ALL {
                if class != outcome.chosen {
                    failure += log_probs[class.index()].exp();
                }
            }
        }
        assert!(
            (direct - failure).abs() < 1e-12,
            "direct {direct} vs per-syndrome {failure}"
        );
    }

    #[test]
    fn infinite_bias_decoding_degenerates_to_z_cosets() {
        let (code, field) = setup(3, preset(Preset::Css, 3), 0.3, Bias::Infinite);
        // A pure-Z error has a consistent syndrome; classes needing X
        // support carry exactly zero probability.
        let mut err = crate::pauli::PauliOp::identity(9);
        err.set_letter(4, PauliLetter::Z);
        let syndrome = code.syndrome(&err).unwrap();
        let outcome = exact_ml_decode(&code, &field, &syndrome).unwrap();
        assert_eq!(outcome.coset_probs.prob(LogicalClass::X), 0.0);
        assert_eq!(outcome.coset_probs.prob(LogicalClass::Y), 0.0);
        let total: f64 = outcome.coset_probs.as_array().iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_oversized_codes() {
        let (code, field) = setup(7, preset(Preset::Css, 7), 0.1, Bias::Finite(0.5));
        assert!(matches!(
            exact_ml_decode(&code, &field, &vec![false; 48]),
            Err(DecodeError::TooLarge { .. })
        ));
        assert!(exhaustive_failure_probability(&code, &field).is_err());
    }
}
