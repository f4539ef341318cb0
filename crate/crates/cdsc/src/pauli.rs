//! Phase-free n-qubit Pauli operators in binary symplectic form, together
//! with the single-qubit Clifford deformations that act on them as letter
//! permutations.
//!
//! A Pauli is stored as two packed bit vectors: qubit `q` carries `X` if
//! `(x, z) = (1, 0)`, `Z` if `(0, 1)`, `Y` if `(1, 1)` and the identity
//! otherwise. Phases are deliberately not tracked; every quantity built on
//! top of this module (syndromes, coset probabilities, distances) is
//! insensitive to them.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PauliError {
    #[error("operator length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid Pauli letter '{0}' (expected one of I, X, Y, Z)")]
    BadPauliLetter(char),
    #[error("invalid deformation letter '{0}' (expected one of I, H, Y)")]
    BadDeformationLetter(char),
}

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum PauliLetter {
    I = 0b00,
    X = 0b01,
    Z = 0b10,
    Y = 0b11,
}

impl PauliLetter {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliLetter::I,
            (true, false) => PauliLetter::X,
            (false, true) => PauliLetter::Z,
            (true, true) => PauliLetter::Y,
        }
    }

    pub fn x_bit(self) -> bool {
        matches!(self, PauliLetter::X | PauliLetter::Y)
    }

    pub fn z_bit(self) -> bool {
        matches!(self, PauliLetter::Z | PauliLetter::Y)
    }

    /// Index in the fixed order I, X, Y, Z used by channel rate tables.
    pub fn rate_index(self) -> usize {
        match self {
            PauliLetter::I => 0,
            PauliLetter::X => 1,
            PauliLetter::Y => 2,
            PauliLetter::Z => 3,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Result<Self, PauliError> {
        match c {
            'I' => Ok(PauliLetter::I),
            'X' => Ok(PauliLetter::X),
            'Y' => Ok(PauliLetter::Y),
            'Z' => Ok(PauliLetter::Z),
            other => Err(PauliError::BadPauliLetter(other)),
        }
    }
}

/// An n-qubit Pauli operator with phases ignored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliOp {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

impl PauliOp {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliOp {
            n,
            x: vec![0; w],
            z: vec![0; w],
        }
    }

    /// Single-letter operator acting on qubit `q` of an n-qubit register.
    pub fn single(n: usize, q: usize, letter: PauliLetter) -> Self {
        assert!(q < n, "qubit index {q} out of range for n = {n}");
        let mut op = PauliOp::identity(n);
        op.set_letter(q, letter);
        op
    }

    pub fn from_bit_words(n: usize, x: Vec<u64>, z: Vec<u64>) -> Self {
        assert_eq!(x.len(), words_for(n));
        assert_eq!(z.len(), words_for(n));
        let mut op = PauliOp { n, x, z };
        op.mask_tail();
        op
    }

    fn mask_tail(&mut self) {
        let extra = self.x.len() * 64 - self.n;
        if extra > 0 {
            let mask = u64::MAX >> extra;
            if let Some(last) = self.x.last_mut() {
                *last &= mask;
            }
            if let Some(last) = self.z.last_mut() {
                *last &= mask;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn x_bit(&self, q: usize) -> bool {
        self.x[q / 64] >> (q % 64) & 1 == 1
    }

    pub fn z_bit(&self, q: usize) -> bool {
        self.z[q / 64] >> (q % 64) & 1 == 1
    }

    pub fn letter(&self, q: usize) -> PauliLetter {
        PauliLetter::from_bits(self.x_bit(q), self.z_bit(q))
    }

    pub fn set_letter(&mut self, q: usize, letter: PauliLetter) {
        let (w, b) = (q / 64, q % 64);
        self.x[w] = self.x[w] & !(1 << b) | (u64::from(letter.x_bit()) << b);
        self.z[w] = self.z[w] & !(1 << b) | (u64::from(letter.z_bit()) << b);
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(&x, &z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// Letter counts `(n_X, n_Y, n_Z)`; the identity count is `n` minus their sum.
    pub fn weight_decomposition(&self) -> (usize, usize, usize) {
        let mut nx = 0;
        let mut ny = 0;
        let mut nz = 0;
        for (&x, &z) in self.x.iter().zip(&self.z) {
            nx += (x & !z).count_ones() as usize;
            ny += (x & z).count_ones() as usize;
            nz += (!x & z).count_ones() as usize;
        }
        (nx, ny, nz)
    }

    /// Product of two Paulis up to phase: bitwise XOR of the symplectic parts.
    pub fn multiply(&self, other: &PauliOp) -> Result<PauliOp, PauliError> {
        if self.n != other.n {
            return Err(PauliError::LengthMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let x = self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect();
        let z = self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect();
        Ok(PauliOp { n: self.n, x, z })
    }

    pub fn multiply_in_place(&mut self, other: &PauliOp) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a ^= b;
        }
    }

    /// True iff the symplectic inner product of the two operators is even.
    pub fn commutes(&self, other: &PauliOp) -> Result<bool, PauliError> {
        if self.n != other.n {
            return Err(PauliError::LengthMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut parity = 0u32;
        for i in 0..self.x.len() {
            parity ^= (self.x[i] & other.z[i]).count_ones();
            parity ^= (self.z[i] & other.x[i]).count_ones();
        }
        Ok(parity & 1 == 0)
    }

    /// Textual encoding, one letter per qubit in row-major qubit order.
    pub fn encode(&self) -> String {
        (0..self.n).map(|q| self.letter(q).to_char()).collect()
    }

    pub fn parse(s: &str) -> Result<Self, PauliError> {
        let mut op = PauliOp::identity(s.chars().count());
        for (q, c) in s.chars().enumerate() {
            op.set_letter(q, PauliLetter::from_char(c)?);
        }
        Ok(op)
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

/// One of the three single-qubit Clifford deformations considered here,
/// identified by its conjugation action on the Pauli letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SingleQubitDeformation {
    /// Trivial action.
    Id,
    /// Exchanges X and Z, fixes Y (the Hadamard).
    SwapXZ,
    /// Exchanges Y and Z, fixes X.
    SwapYZ,
}

impl SingleQubitDeformation {
    pub fn apply(self, letter: PauliLetter) -> PauliLetter {
        match (self, letter) {
            (SingleQubitDeformation::Id, l) => l,
            (SingleQubitDeformation::SwapXZ, PauliLetter::X) => PauliLetter::Z,
            (SingleQubitDeformation::SwapXZ, PauliLetter::Z) => PauliLetter::X,
            (SingleQubitDeformation::SwapXZ, l) => l,
            (SingleQubitDeformation::SwapYZ, PauliLetter::Y) => PauliLetter::Z,
            (SingleQubitDeformation::SwapYZ, PauliLetter::Z) => PauliLetter::Y,
            (SingleQubitDeformation::SwapYZ, l) => l,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            SingleQubitDeformation::Id => 'I',
            SingleQubitDeformation::SwapXZ => 'H',
            SingleQubitDeformation::SwapYZ => 'Y',
        }
    }

    pub fn from_char(c: char) -> Result<Self, PauliError> {
        match c {
            'I' => Ok(SingleQubitDeformation::Id),
            'H' => Ok(SingleQubitDeformation::SwapXZ),
            'Y' => Ok(SingleQubitDeformation::SwapYZ),
            other => Err(PauliError::BadDeformationLetter(other)),
        }
    }
}

/// A per-qubit assignment of single-qubit deformations. Applying the same
/// pattern twice is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeformationPattern {
    kinds: Vec<SingleQubitDeformation>,
    // Word-packed masks of the qubits carrying each non-trivial kind, so
    // permute() runs in O(words) instead of O(n).
    mask_xz: Vec<u64>,
    mask_yz: Vec<u64>,
}

impl DeformationPattern {
    pub fn new(kinds: Vec<SingleQubitDeformation>) -> Self {
        let w = words_for(kinds.len());
        let mut mask_xz = vec![0u64; w];
        let mut mask_yz = vec![0u64; w];
        for (q, kind) in kinds.iter().enumerate() {
            match kind {
                SingleQubitDeformation::Id => {}
                SingleQubitDeformation::SwapXZ => mask_xz[q / 64] |= 1 << (q % 64),
                SingleQubitDeformation::SwapYZ => mask_yz[q / 64] |= 1 << (q % 64),
            }
        }
        DeformationPattern {
            kinds,
            mask_xz,
            mask_yz,
        }
    }

    pub fn all_id(n: usize) -> Self {
        DeformationPattern::new(vec![SingleQubitDeformation::Id; n])
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn kind(&self, q: usize) -> SingleQubitDeformation {
        self.kinds[q]
    }

    pub fn kinds(&self) -> &[SingleQubitDeformation] {
        &self.kinds
    }

    /// Applies the per-qubit letter permutation to an operator; involutive.
    pub fn permute(&self, op: &PauliOp) -> Result<PauliOp, PauliError> {
        if self.kinds.len() != op.n {
            return Err(PauliError::LengthMismatch {
                left: self.kinds.len(),
                right: op.n,
            });
        }
        let mut x = op.x.clone();
        let mut z = op.z.clone();
        for i in 0..x.len() {
            let mxz = self.mask_xz[i];
            let (xi, zi) = (x[i], z[i]);
            x[i] = xi & !mxz | zi & mxz;
            z[i] = zi & !mxz | xi & mxz;
            // Y <-> Z toggles the x bit wherever the z bit is set.
            x[i] ^= z[i] & self.mask_yz[i];
        }
        Ok(PauliOp { n: op.n, x, z })
    }

    pub fn encode(&self) -> String {
        self.kinds.iter().map(|k| k.to_char()).collect()
    }

    pub fn parse(s: &str) -> Result<Self, PauliError> {
        let kinds = s
            .chars()
            .map(SingleQubitDeformation::from_char)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DeformationPattern::new(kinds))
    }
}

impl fmt::Display for DeformationPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn anticommuting_pair_on_one_qubit() {
        let x = PauliOp::parse("X").unwrap();
        let z = PauliOp::parse("Z").unwrap();
        assert!(!x.commutes(&z).unwrap());
    }

    #[test]
    fn disjoint_support_commutes() {
        let a = PauliOp::parse("XI").unwrap();
        let b = PauliOp::parse("IZ").unwrap();
        assert!(a.commutes(&b).unwrap());
    }

    #[test]
    fn two_anticommuting_sites_commute_overall() {
        let a = PauliOp::parse("YY").unwrap();
        let b = PauliOp::parse("XZ").unwrap();
        assert!(a.commutes(&b).unwrap());
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let a = PauliOp::parse("X").unwrap();
        let b = PauliOp::parse("XX").unwrap();
        assert!(a.commutes(&b).is_err());
        assert!(a.multiply(&b).is_err());
    }

    #[test]
    fn multiplication_table() {
        let x = PauliOp::parse("X").unwrap();
        let z = PauliOp::parse("Z").unwrap();
        assert_eq!(x.multiply(&x).unwrap().encode(), "I");
        assert_eq!(x.multiply(&z).unwrap().encode(), "Y");
        let a = PauliOp::parse("XI").unwrap();
        let b = PauliOp::parse("ZZ").unwrap();
        assert_eq!(a.multiply(&b).unwrap().encode(), "YZ");
    }

    #[test]
    fn permutation_examples() {
        let swap_xz = DeformationPattern::parse("H").unwrap();
        assert_eq!(swap_xz.permute(&PauliOp::parse("X").unwrap()).unwrap().encode(), "Z");
        let swap_yz = DeformationPattern::parse("Y").unwrap();
        assert_eq!(swap_yz.permute(&PauliOp::parse("X").unwrap()).unwrap().encode(), "X");
        let pattern = DeformationPattern::parse("HYI").unwrap();
        let op = PauliOp::parse("XZY").unwrap();
        assert_eq!(pattern.permute(&op).unwrap().encode(), "ZYY");
    }

    #[test]
    fn weight_decomposition_examples() {
        assert_eq!(PauliOp::identity(9).weight_decomposition(), (0, 0, 0));
        assert_eq!(PauliOp::parse("XYZ").unwrap().weight_decomposition(), (1, 1, 1));
        // Two X letters and one Z letter spread over nine qubits.
        let op = PauliOp::parse("XIXIZIIII").unwrap();
        assert_eq!(op.weight_decomposition(), (2, 0, 1));
        assert_eq!(op.weight(), 3);
    }

    #[test]
    fn encoding_survives_word_boundaries() {
        let mut s = String::new();
        for q in 0..130 {
            s.push(match q % 4 {
                0 => 'I',
                1 => 'X',
                2 => 'Y',
                _ => 'Z',
            });
        }
        let op = PauliOp::parse(&s).unwrap();
        assert_eq!(op.encode(), s);
        assert_eq!(op.weight(), 130 - 130usize.div_ceil(4));
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliOp> {
        prop::collection::vec(0u8..4, n).prop_map(move |letters| {
            let mut op = PauliOp::identity(n);
            for (q, l) in letters.iter().enumerate() {
                op.set_letter(
                    q,
                    match l {
                        0 => PauliLetter::I,
                        1 => PauliLetter::X,
                        2 => PauliLetter::Y,
                        _ => PauliLetter::Z,
                    },
                );
            }
            op
        })
    }

    fn arb_pattern(n: usize) -> impl Strategy<Value = DeformationPattern> {
        prop::collection::vec(0u8..3, n).prop_map(move |kinds| {
            DeformationPattern::new(
                kinds
                    .iter()
                    .map(|k| match k {
                        0 => SingleQubitDeformation::Id,
                        1 => SingleQubitDeformation::SwapXZ,
                        _ => SingleQubitDeformation::SwapYZ,
                    })
                    .collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn commutation_is_symmetric(p in arb_pauli(17), q in arb_pauli(17)) {
            prop_assert_eq!(p.commutes(&q).unwrap(), q.commutes(&p).unwrap());
        }

        #[test]
        fn self_product_is_identity(p in arb_pauli(17)) {
            prop_assert!(p.multiply(&p).unwrap().is_identity());
        }

        #[test]
        fn permutation_preserves_commutation(
            p in arb_pauli(12),
            q in arb_pauli(12),
            sigma in arb_pattern(12),
        ) {
            let sp = sigma.permute(&p).unwrap();
            let sq = sigma.permute(&q).unwrap();
            prop_assert_eq!(p.commutes(&q).unwrap(), sp.commutes(&sq).unwrap());
        }

        #[test]
        fn permutation_is_involutive(p in arb_pauli(12), sigma in arb_pattern(12)) {
            let twice = sigma.permute(&sigma.permute(&p).unwrap()).unwrap();
            prop_assert_eq!(twice, p);
        }

        #[test]
        fn permutation_acts_letterwise(p in arb_pauli(12), sigma in arb_pattern(12)) {
            let sp = sigma.permute(&p).unwrap();
            for q in 0..12 {
                prop_assert_eq!(sp.letter(q), sigma.kind(q).apply(p.letter(q)));
            }
        }

        #[test]
        fn encode_parse_round_trip(p in arb_pauli(23)) {
            prop_assert_eq!(PauliOp::parse(&p.encode()).unwrap(), p);
        }
    }
}
