//! Biased IID Pauli channels, their per-qubit permutation under code
//! deformations, error sampling, likelihood evaluation and the hashing
//! bound.
//!
//! Bias is parametrized by `eta >= 0.5` with `p_X = p_Y = p_Z / (2 eta)`;
//! `eta = 0.5` is depolarizing noise and infinite bias (pure dephasing) is
//! a first-class value rather than a large float.

use rand::Rng;
use thiserror::Error;

use crate::pauli::{DeformationPattern, PauliLetter, PauliOp};

#[derive(Debug, Error)]
pub enum NoiseError {
    #[error("error rate p = {0} must lie in [0, 1)")]
    BadErrorRate(f64),
    #[error("bias eta = {0} must be at least 0.5")]
    BadBias(f64),
    #[error("cannot parse '{0}' as a bias (expected a number >= 0.5 or 'inf')")]
    UnparsableBias(String),
    #[error("operator length {operator} does not match field length {field}")]
    LengthMismatch { operator: usize, field: usize },
    #[error("{0} is undefined at infinite bias")]
    InfiniteBias(&'static str),
}

/// Noise bias towards Z errors; infinity is representable exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bias {
    Finite(f64),
    Infinite,
}

impl Bias {
    pub fn new(eta: f64) -> Result<Self, NoiseError> {
        if eta.is_infinite() && eta > 0.0 {
            Ok(Bias::Infinite)
        } else if eta.is_finite() && eta >= 0.5 {
            Ok(Bias::Finite(eta))
        } else {
            Err(NoiseError::BadBias(eta))
        }
    }

    pub fn parse(s: &str) -> Result<Self, NoiseError> {
        if s.trim().eq_ignore_ascii_case("inf") {
            return Ok(Bias::Infinite);
        }
        let eta: f64 = s
            .trim()
            .parse()
            .map_err(|_| NoiseError::UnparsableBias(s.to_string()))?;
        Bias::new(eta)
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Bias::Infinite)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Bias::Finite(eta) => Some(eta),
            Bias::Infinite => None,
        }
    }

    /// Serialization used in CSV and config files: decimal or the literal
    /// `inf`.
    pub fn encode(self) -> String {
        match self {
            Bias::Finite(eta) => format!("{eta}"),
            Bias::Infinite => "inf".to_string(),
        }
    }
}

/// Total error rate and bias of the IID channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasedNoiseParams {
    pub p: f64,
    pub eta: Bias,
}

impl BiasedNoiseParams {
    pub fn new(p: f64, eta: Bias) -> Result<Self, NoiseError> {
        if !(0.0..1.0).contains(&p) {
            return Err(NoiseError::BadErrorRate(p));
        }
        Ok(BiasedNoiseParams { p, eta })
    }
}

/// Single-qubit Pauli channel; probabilities indexed I, X, Y, Z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitChannel {
    rates: [f64; 4],
}

impl QubitChannel {
    pub fn new(p_i: f64, p_x: f64, p_y: f64, p_z: f64) -> Self {
        let ch = QubitChannel {
            rates: [p_i, p_x, p_y, p_z],
        };
        debug_assert!(ch.rates.iter().all(|&r| r >= 0.0));
        debug_assert!((ch.rates.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        ch
    }

    pub fn rate(&self, letter: PauliLetter) -> f64 {
        self.rates[letter.rate_index()]
    }

    pub fn rates(&self) -> [f64; 4] {
        self.rates
    }

    pub fn log_rate(&self, letter: PauliLetter) -> f64 {
        let r = self.rate(letter);
        if r == 0.0 {
            f64::NEG_INFINITY
        } else {
            r.ln()
        }
    }

    /// Channel with the letter rates permuted the same way the deformation
    /// permutes the letters.
    pub fn permuted(&self, kind: crate::pauli::SingleQubitDeformation) -> QubitChannel {
        let letters = [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z];
        let mut rates = [0.0; 4];
        for l in letters {
            rates[l.rate_index()] = self.rate(kind.apply(l));
        }
        QubitChannel { rates }
    }
}

/// Per-qubit channel rates from (p, eta).
pub fn rates_from(params: &BiasedNoiseParams) -> QubitChannel {
    let p = params.p;
    match params.eta {
        Bias::Infinite => QubitChannel::new(1.0 - p, 0.0, 0.0, p),
        Bias::Finite(eta) => {
            let p_z = p * eta / (1.0 + eta);
            let p_x = p / (2.0 * (1.0 + eta));
            QubitChannel::new(1.0 - p, p_x, p_x, p_z)
        }
    }
}

/// A spatially varying channel: the base channel permuted qubit-by-qubit
/// according to a deformation pattern.
#[derive(Debug, Clone)]
pub struct NoiseField {
    channels: Vec<QubitChannel>,
}

impl NoiseField {
    pub fn uniform(base: QubitChannel, n: usize) -> Self {
        NoiseField {
            channels: vec![base; n],
        }
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn channel(&self, q: usize) -> &QubitChannel {
        &self.channels[q]
    }

    pub fn channels(&self) -> &[QubitChannel] {
        &self.channels
    }

    /// Log-likelihood of a given error under the field; `-inf` when some
    /// letter has zero rate.
    pub fn log_prob(&self, error: &PauliOp) -> Result<f64, NoiseError> {
        if error.len() != self.len() {
            return Err(NoiseError::LengthMismatch {
                operator: error.len(),
                field: self.len(),
            });
        }
        let mut total = 0.0;
        for (q, ch) in self.channels.iter().enumerate() {
            total += ch.log_rate(error.letter(q));
        }
        Ok(total)
    }

    /// IID per-qubit draw in qubit order; the cumulative letter order is
    /// pinned to X, Y, Z, I so sampling is reproducible given the seed.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PauliOp {
        let mut op = PauliOp::identity(self.len());
        for (q, ch) in self.channels.iter().enumerate() {
            let u: f64 = rng.random();
            let px = ch.rate(PauliLetter::X);
            let py = ch.rate(PauliLetter::Y);
            let pz = ch.rate(PauliLetter::Z);
            if u < px {
                op.set_letter(q, PauliLetter::X);
            } else if u < px + py {
                op.set_letter(q, PauliLetter::Y);
            } else if u < px + py + pz {
                op.set_letter(q, PauliLetter::Z);
            }
        }
        op
    }
}

/// Permutes the base channel per qubit; the identity deformation leaves it
/// unchanged.
pub fn permute_field(base: QubitChannel, pattern: &DeformationPattern) -> NoiseField {
    NoiseField {
        channels: pattern.kinds().iter().map(|&k| base.permuted(k)).collect(),
    }
}

fn entropy_bits(rates: &[f64; 4]) -> f64 {
    -rates
        .iter()
        .filter(|&&r| r > 0.0)
        .map(|&r| r * r.log2())
        .sum::<f64>()
}

/// The error rate at which the channel entropy reaches one bit, i.e. the
/// zero-rate point of the hashing rate 1 - H. At infinite bias this is
/// exactly 1/2. Solved to 1e-9 by bisection on the first crossing.
pub fn hashing_bound(eta: Bias) -> f64 {
    let eta = match eta {
        Bias::Infinite => return 0.5,
        Bias::Finite(eta) => eta,
    };
    let entropy_at = |p: f64| {
        let ch = rates_from(&BiasedNoiseParams { p, eta: Bias::Finite(eta) });
        entropy_bits(&ch.rates())
    };
    // The entropy rises from 0 at p = 0; bracket the first crossing of
    // H = 1 on a grid, then bisect.
    let mut lo = 0.0;
    let mut hi = f64::NAN;
    let steps = 2000;
    for k in 1..=steps {
        let p = 0.999 * k as f64 / steps as f64;
        if entropy_at(p) >= 1.0 {
            hi = p;
            break;
        }
        lo = p;
    }
    assert!(hi.is_finite(), "entropy never reaches one bit");
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if entropy_at(mid) >= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::SingleQubitDeformation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn depolarizing_rates() {
        let ch = rates_from(&BiasedNoiseParams::new(0.01, Bias::new(0.5).unwrap()).unwrap());
        assert!((ch.rate(PauliLetter::I) - 0.99).abs() < 1e-15);
        for l in [PauliLetter::X, PauliLetter::Y, PauliLetter::Z] {
            assert!((ch.rate(l) - 1.0 / 300.0).abs() < 1e-15);
        }
    }

    #[test]
    fn biased_rates() {
        let ch = rates_from(&BiasedNoiseParams::new(0.01, Bias::new(500.0).unwrap()).unwrap());
        assert!((ch.rate(PauliLetter::Z) - 0.01 * 500.0 / 501.0).abs() < 1e-15);
        assert!((ch.rate(PauliLetter::X) - 0.01 / 1002.0).abs() < 1e-15);
        assert_eq!(ch.rate(PauliLetter::X), ch.rate(PauliLetter::Y));
    }

    #[test]
    fn infinite_bias_rates() {
        let ch = rates_from(&BiasedNoiseParams::new(0.3, Bias::Infinite).unwrap());
        assert_eq!(ch.rates(), [0.7, 0.0, 0.0, 0.3]);
    }

    #[test]
    fn channel_sums_to_one() {
        for eta in [0.5, 1.0, 3.0, 100.0, 1e8] {
            for p in [0.0, 0.01, 0.2, 0.5, 0.9] {
                let ch = rates_from(
                    &BiasedNoiseParams::new(p, Bias::new(eta).unwrap()).unwrap(),
                );
                assert!((ch.rates().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bias_parsing() {
        assert!(Bias::parse("inf").unwrap().is_infinite());
        assert_eq!(Bias::parse("100").unwrap(), Bias::Finite(100.0));
        assert!(Bias::parse("0.3").is_err());
        assert!(Bias::new(0.4).is_err());
        assert_eq!(Bias::Infinite.encode(), "inf");
    }

    #[test]
    fn field_permutation_examples() {
        let base = rates_from(&BiasedNoiseParams::new(0.1, Bias::new(10.0).unwrap()).unwrap());
        let id_field = permute_field(base, &DeformationPattern::all_id(3));
        for q in 0..3 {
            assert_eq!(id_field.channel(q), &base);
        }
        let swapped = base.permuted(SingleQubitDeformation::SwapXZ);
        assert_eq!(swapped.rate(PauliLetter::X), base.rate(PauliLetter::Z));
        assert_eq!(swapped.rate(PauliLetter::Z), base.rate(PauliLetter::X));
        assert_eq!(swapped.rate(PauliLetter::Y), base.rate(PauliLetter::Y));
        let swapped = base.permuted(SingleQubitDeformation::SwapYZ);
        assert_eq!(swapped.rate(PauliLetter::Y), base.rate(PauliLetter::Z));
        assert_eq!(swapped.rate(PauliLetter::X), base.rate(PauliLetter::X));
    }

    #[test]
    fn sampling_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let zero = NoiseField::uniform(
            rates_from(&BiasedNoiseParams::new(0.0, Bias::new(1.0).unwrap()).unwrap()),
            20,
        );
        for _ in 0..50 {
            assert!(zero.sample(&mut rng).is_identity());
        }
        let dephasing = NoiseField::uniform(
            rates_from(&BiasedNoiseParams::new(0.4, Bias::Infinite).unwrap()),
            20,
        );
        for _ in 0..50 {
            let e = dephasing.sample(&mut rng);
            let (nx, ny, _) = e.weight_decomposition();
            assert_eq!((nx, ny), (0, 0));
        }
    }

    #[test]
    fn sampling_concentrates() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 100_000;
        let field = NoiseField::uniform(
            rates_from(&BiasedNoiseParams::new(0.1, Bias::new(0.5).unwrap()).unwrap()),
            n,
        );
        let e = field.sample(&mut rng);
        let (nx, ny, nz) = e.weight_decomposition();
        let expect = n as f64 / 30.0;
        let sigma = (n as f64 * (1.0 / 30.0) * (29.0 / 30.0)).sqrt();
        for count in [nx, ny, nz] {
            assert!((count as f64 - expect).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn log_prob_examples() {
        let n = 9;
        let p = 0.01;
        let field = NoiseField::uniform(
            rates_from(&BiasedNoiseParams::new(p, Bias::new(100.0).unwrap()).unwrap()),
            n,
        );
        let id = PauliOp::identity(n);
        assert!((field.log_prob(&id).unwrap() - 9.0 * (1.0 - p).ln()).abs() < 1e-12);

        // A single Y at infinite bias is impossible.
        let dephasing = NoiseField::uniform(
            rates_from(&BiasedNoiseParams::new(p, Bias::Infinite).unwrap()),
            n,
        );
        let y = PauliOp::single(n, 0, PauliLetter::Y);
        assert_eq!(dephasing.log_prob(&y).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn deformed_product_probability() {
        // Two X letters and one Z letter under the undeformed channel carry
        // probability p_X^2 p_Z (1-p)^(n-3); pushing one X and one Z
        // through deformations turns it into p_X p_Z^2 (1-p)^(n-3).
        let n = 25;
        let base = rates_from(&BiasedNoiseParams::new(0.05, Bias::new(30.0).unwrap()).unwrap());
        let (px, pz) = (base.rate(PauliLetter::X), base.rate(PauliLetter::Z));
        let q = 1.0 - 0.05f64;
        let mut kinds = vec![SingleQubitDeformation::Id; n];
        kinds[3] = SingleQubitDeformation::SwapXZ;
        kinds[7] = SingleQubitDeformation::SwapYZ;
        let pattern = DeformationPattern::new(kinds);
        let field = permute_field(base, &pattern);
        let mut err = PauliOp::identity(n);
        err.set_letter(3, PauliLetter::X);
        err.set_letter(7, PauliLetter::X);
        err.set_letter(12, PauliLetter::Z);
        let expected = (px * pz * pz).ln() + (n as f64 - 3.0) * q.ln();
        assert!((field.log_prob(&err).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn heisenberg_equivalence_of_log_prob() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let base = rates_from(&BiasedNoiseParams::new(0.15, Bias::new(20.0).unwrap()).unwrap());
        for _ in 0..30 {
            let n = 12;
            let kinds = (0..n)
                .map(|_| match rng.random_range(0..3) {
                    0 => SingleQubitDeformation::Id,
                    1 => SingleQubitDeformation::SwapXZ,
                    _ => SingleQubitDeformation::SwapYZ,
                })
                .collect();
            let pattern = DeformationPattern::new(kinds);
            let permuted = permute_field(base, &pattern);
            let uniform = NoiseField::uniform(base, n);
            let mut err = PauliOp::identity(n);
            for q in 0..n {
                if rng.random::<f64>() < 0.5 {
                    err.set_letter(
                        q,
                        [PauliLetter::X, PauliLetter::Y, PauliLetter::Z][rng.random_range(0..3)],
                    );
                }
            }
            let lhs = permuted.log_prob(&err).unwrap();
            let rhs = uniform.log_prob(&pattern.permute(&err).unwrap()).unwrap();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn hashing_bound_values() {
        assert_eq!(hashing_bound(Bias::Infinite), 0.5);
        // Depolarizing value from solving the 4-outcome entropy condition.
        let depol = hashing_bound(Bias::new(0.5).unwrap());
        assert!((depol - 0.1893).abs() < 2e-4, "got {depol}");
        // Check the defining equation directly.
        let ch = rates_from(&BiasedNoiseParams::new(depol, Bias::new(0.5).unwrap()).unwrap());
        assert!((entropy_bits(&ch.rates()) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hashing_bound_is_monotone_in_bias() {
        let etas = [0.5, 1.0, 3.0, 10.0, 30.0, 100.0, 1000.0];
        let values: Vec<f64> = etas
            .iter()
            .map(|&eta| hashing_bound(Bias::new(eta).unwrap()))
            .collect();
        for w in values.windows(2) {
            assert!(w[1] > w[0], "hashing bound not increasing: {values:?}");
        }
        assert!(values[values.len() - 1] < 0.5);
    }
}
