//! Approximate thresholds for the self-dual disordered model from the
//! equality of a cluster partition function and its binary Fourier dual.
//!
//! The model is the spin system of the all-Y<->Z-swapped code: two-body
//! couplings J_X (s^Z pair) and J_Y (s^X pair) and a four-body J_Z term.
//! With p_X = p_Y the disorder-free model is self-dual, and equating the
//! disorder-averaged log partition functions of a small cluster computed
//! with local and dual Boltzmann factors pins an estimate of the critical
//! error rate along the Nishimori line.
//!
//! On the Nishimori line the four values of a crossing's local Boltzmann
//! factor are, up to one common factor, the four letter likelihoods
//! (1-p, p_X, p_Y, p_Z) permuted by the disorder letter; the dual factor
//! is their two-variable Hadamard transform with an overall 1/2. The
//! common factor cancels between the two sides and is dropped.
//!
//! Pinned cluster geometry (the source figure is only pictorial):
//!   level 0: one crossing, both of its pair products summed;
//!   level 1: one central s^X spin summed, its four incident crossings,
//!            all peripheral spins fixed to +1;
//!   level 2: two diagonally adjacent s^X spins summed (sharing one
//!            crossing), their seven incident crossings, periphery fixed.
//! Disorder averages enumerate all letter assignments exactly (4^7 at
//! level 2), so no Monte-Carlo sampling is needed at these sizes.

use super::StatMechError;
use crate::noise::{rates_from, Bias, BiasedNoiseParams};
use crate::pauli::PauliLetter;

/// Cluster size used for the threshold estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterLevel {
    C0,
    C1,
    C2,
}

impl ClusterLevel {
    pub fn from_index(c: usize) -> Option<Self> {
        match c {
            0 => Some(ClusterLevel::C0),
            1 => Some(ClusterLevel::C1),
            2 => Some(ClusterLevel::C2),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        match self {
            ClusterLevel::C0 => 0,
            ClusterLevel::C1 => 1,
            ClusterLevel::C2 => 2,
        }
    }
}

/// Single-qubit letter product up to phase.
fn compose(a: PauliLetter, b: PauliLetter) -> PauliLetter {
    PauliLetter::from_bits(a.x_bit() ^ b.x_bit(), a.z_bit() ^ b.z_bit())
}

/// The crossing's Boltzmann values indexed by the slot (u, v) with
/// u, v in {+1, -1} encoded as {0, 1}: slot (0,0) is the likelihood of the
/// disorder letter itself, and flipping u or v walks through the letter
/// table. Order: [(+,+), (+,-), (-,+), (-,-)].
fn lbf_values(likelihood: &[f64; 4], disorder: PauliLetter) -> [f64; 4] {
    let slot_letter = [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z];
    let mut out = [0.0; 4];
    for (slot, &letter) in slot_letter.iter().enumerate() {
        out[slot] = likelihood[compose(disorder, letter).rate_index()];
    }
    out
}

/// Dual Boltzmann factor coefficients: DBF(u, v) = 1/2 (d0 + d1 v + d2 u +
/// d3 uv) with d = the slot values of the local factor.
fn dbf_at(values: &[f64; 4], u: f64, v: f64) -> f64 {
    0.5 * (values[0] + values[1] * v + values[2] * u + values[3] * u * v)
}

fn lbf_at(values: &[f64; 4], u: f64, v: f64) -> f64 {
    // Slot decoding: (+,+) -> 0, (+,-) -> 1, (-,+) -> 2, (-,-) -> 3.
    let iu = usize::from(u < 0.0);
    let iv = usize::from(v < 0.0);
    values[iv + 2 * iu]
}

/// Letter probabilities and likelihood table at (p, eta).
fn tables(p: f64, eta: Bias) -> Result<([f64; 4], [f64; 4]), StatMechError> {
    let ch = rates_from(&BiasedNoiseParams::new(p, eta)?);
    let px = ch.rate(PauliLetter::X);
    let py = ch.rate(PauliLetter::Y);
    if (px - py).abs() > 1e-12 * (px + py).max(1e-300) {
        return Err(StatMechError::NotSelfDual { px, py });
    }
    let like = [
        ch.rate(PauliLetter::I),
        px,
        py,
        ch.rate(PauliLetter::Z),
    ];
    Ok((like, like))
}

/// Exact disorder average of `f` over all letter assignments on `k`
/// crossings, skipping zero-probability letters.
fn disorder_average<F: Fn(&[PauliLetter]) -> f64>(
    weights: &[f64; 4],
    k: usize,
    f: &F,
) -> f64 {
    fn rec<F: Fn(&[PauliLetter]) -> f64>(
        weights: &[f64; 4],
        assignment: &mut Vec<PauliLetter>,
        k: usize,
        weight: f64,
        f: &F,
    ) -> f64 {
        if assignment.len() == k {
            return weight * f(assignment);
        }
        let mut total = 0.0;
        for letter in [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z] {
            let w = weight * weights[letter.rate_index()];
            if w > 0.0 {
                assignment.push(letter);
                total += rec(weights, assignment, k, w, f);
                assignment.pop();
            }
        }
        total
    }
    rec(weights, &mut Vec::with_capacity(k), k, 1.0, f)
}

/// Disorder-averaged log cluster sums for the given level; returns
/// (lbf side, dbf side).
fn cluster_log_sums(
    level: ClusterLevel,
    like: &[f64; 4],
    weights: &[f64; 4],
) -> (f64, f64) {
    match level {
        ClusterLevel::C0 => {
            // One crossing; sum over both pair products u, v.
            let lhs = disorder_average(weights, 1, &|letters| {
                let v4 = lbf_values(like, letters[0]);
                let mut s = 0.0;
                for u in [1.0, -1.0] {
                    for v in [1.0, -1.0] {
                        s += lbf_at(&v4, u, v);
                    }
                }
                s.ln()
            });
            let rhs = disorder_average(weights, 1, &|letters| {
                let v4 = lbf_values(like, letters[0]);
                let mut s = 0.0;
                for u in [1.0, -1.0] {
                    for v in [1.0, -1.0] {
                        s += dbf_at(&v4, u, v);
                    }
                }
                s.ln()
            });
            (lhs, rhs)
        }
        ClusterLevel::C1 => {
            // Central s^X spin sigma summed; four crossings see v = sigma,
            // u = +1.
            let sum_with = |bf: &dyn Fn(&[f64; 4], f64, f64) -> f64, letters: &[PauliLetter]| {
                let mut s = 0.0;
                for sigma in [1.0, -1.0] {
                    let mut prod = 1.0;
                    for &e in letters {
                        let v4 = lbf_values(like, e);
                        prod *= bf(&v4, 1.0, sigma);
                    }
                    s += prod;
                }
                s.ln()
            };
            let lhs = disorder_average(weights, 4, &|letters| sum_with(&lbf_at, letters));
            let rhs = disorder_average(weights, 4, &|letters| sum_with(&dbf_at, letters));
            (lhs, rhs)
        }
        ClusterLevel::C2 => {
            // Two adjacent s^X spins: crossings 0..3 see sigma1, 3 is the
            // shared crossing seeing sigma1*sigma2, 4..7 see sigma2.
            let sum_with = |bf: &dyn Fn(&[f64; 4], f64, f64) -> f64, letters: &[PauliLetter]| {
                let mut s = 0.0;
                for sigma1 in [1.0, -1.0] {
                    for sigma2 in [1.0f64, -1.0] {
                        let mut prod = 1.0;
                        for (k, &e) in letters.iter().enumerate() {
                            let v = match k {
                                0..=2 => sigma1,
                                3 => sigma1 * sigma2,
                                _ => sigma2,
                            };
                            let v4 = lbf_values(like, e);
                            prod *= bf(&v4, 1.0, v);
                        }
                        s += prod;
                    }
                }
                s.ln()
            };
            let lhs = disorder_average(weights, 7, &|letters| sum_with(&lbf_at, letters));
            let rhs = disorder_average(weights, 7, &|letters| sum_with(&dbf_at, letters));
            (lhs, rhs)
        }
    }
}

fn duality_gap(p: f64, eta: Bias, level: ClusterLevel) -> Result<f64, StatMechError> {
    let (like, weights) = tables(p, eta)?;
    let (lhs, rhs) = cluster_log_sums(level, &like, &weights);
    Ok(lhs - rhs)
}

/// Threshold estimate from the self-duality condition at the given cluster
/// level, solved by bisection in p. The `_mc_samples` and `_seed`
/// arguments are accepted for interface stability; the pinned clusters are
/// small enough that disorder averages are enumerated exactly.
pub fn cluster_threshold(
    eta: Bias,
    level: ClusterLevel,
    _mc_samples: usize,
    _seed: u64,
) -> Result<f64, StatMechError> {
    // Bracket the sign change of the duality gap on a coarse grid.
    let mut lo = 1e-4;
    let mut f_lo = duality_gap(lo, eta, level)?;
    let mut hi = None;
    for k in 1..=200 {
        let p = 0.4999 * k as f64 / 200.0 + 1e-4;
        let f = duality_gap(p, eta, level)?;
        if f.signum() != f_lo.signum() {
            hi = Some((p, f));
            break;
        }
        lo = p;
        f_lo = f;
    }
    let Some((mut hi, _)) = hi else {
        return Err(StatMechError::NoBracket);
    };
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let f = duality_gap(mid, eta, level)?;
        if f.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
