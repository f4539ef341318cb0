//! Rotated surface codes on odd L×L lattices with open boundaries, and the
//! Clifford-deformed codes obtained from them by per-qubit letter
//! permutations.
//!
//! Qubits live on the vertices of the grid and are indexed row-major:
//! qubit `(r, c)` has index `r*L + c`. Stabilizer generators are associated
//! with faces, addressed by the position `(a, b)` of their top-left corner
//! qubit, `a, b in -1..=L-1`. A face at `(a, b)` is X-type when `a + b` is
//! even and Z-type otherwise; bulk faces have weight 4 and the weight-2
//! boundary faces are placed so that the undeformed code has a pure-Z
//! logical running down column 0 and a pure-X logical along row 0.
//!
//! All deformed-code queries are answered in the Heisenberg picture: the
//! stabilizers kept in memory are always the undeformed (CSS) ones, and the
//! deformation is applied to the operator being tested instead. The two
//! views agree because the letter permutations preserve the symplectic form.

use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::pauli::{DeformationPattern, PauliError, PauliLetter, PauliOp, SingleQubitDeformation};

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("lattice size must be odd and at least 3, got {0}")]
    BadLatticeSize(usize),
    #[error("pattern length {pattern} does not match qubit count {qubits}")]
    PatternLengthMismatch { pattern: usize, qubits: usize },
    #[error("operator length {operator} does not match qubit count {qubits}")]
    OperatorLengthMismatch { operator: usize, qubits: usize },
    #[error("invalid family parameters ({pi_xz}, {pi_yz}): probabilities must be nonnegative and sum to at most 1")]
    BadFamilyParams { pi_xz: f64, pi_yz: f64 },
    #[error("unit cell must be rectangular and non-empty")]
    BadUnitCell,
    #[error("{op} supports at most n = {max} qubits, got {got}")]
    TooLarge {
        op: &'static str,
        max: usize,
        got: usize,
    },
    #[error("{0} requires a deformation pattern without Y<->Z swaps")]
    SwapYzUnsupported(&'static str),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// Whether a stabilizer generator is a product of X or of Z letters
/// (before deformation).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabKind {
    Xtype,
    Ztype,
}

/// One stabilizer generator of the undeformed code.
#[derive(Debug, Clone)]
pub struct StabGen {
    pub kind: StabKind,
    /// Face position (a, b); the face covers the grid qubits among
    /// (a, b), (a, b+1), (a+1, b), (a+1, b+1).
    pub position: (i32, i32),
    pub support: Vec<usize>,
    pub op: PauliOp,
}

/// Logical coset label for normalizer elements. The declaration order
/// I, X, Z, Y is also the pinned tie-breaking order used by the decoders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LogicalClass {
    I = 0,
    X = 1,
    Z = 2,
    Y = 3,
}

impl LogicalClass {
    pub const ALL: [LogicalClass; 4] = [
        LogicalClass::I,
        LogicalClass::X,
        LogicalClass::Z,
        LogicalClass::Y,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            LogicalClass::I => "I",
            LogicalClass::X => "X",
            LogicalClass::Z => "Z",
            LogicalClass::Y => "Y",
        }
    }
}

/// The rotated surface code on an odd L×L lattice.
#[derive(Debug, Clone)]
pub struct SurfaceCodeLayout {
    l: usize,
    n: usize,
    gens: Vec<StabGen>,
    /// Face index by position, dense over (a+1, b+1) in a (L+1)×(L+1) grid.
    face_index: Vec<Option<usize>>,
    logical_x: PauliOp,
    logical_z: PauliOp,
    /// Per generator, a fixed string anticommuting with exactly that
    /// generator; products of these give deterministic pure errors.
    pure_error_strings: Vec<PauliOp>,
}

impl SurfaceCodeLayout {
    pub fn linear_size(&self) -> usize {
        self.l
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn qubit_index(&self, r: usize, c: usize) -> usize {
        r * self.l + c
    }

    pub fn generators(&self) -> &[StabGen] {
        &self.gens
    }

    pub fn face_at(&self, a: i32, b: i32) -> Option<usize> {
        if a < -1 || b < -1 || a >= self.l as i32 || b >= self.l as i32 {
            return None;
        }
        self.face_index[(a + 1) as usize * (self.l + 1) + (b + 1) as usize]
    }

    /// Pure-X logical representative of the undeformed code (row 0).
    pub fn logical_x(&self) -> &PauliOp {
        &self.logical_x
    }

    /// Pure-Z logical representative of the undeformed code (column 0).
    pub fn logical_z(&self) -> &PauliOp {
        &self.logical_z
    }

    pub fn pure_error_string(&self, gen: usize) -> &PauliOp {
        &self.pure_error_strings[gen]
    }
}

/// Whether a face exists at position (a, b) on an L×L layout. The top and
/// bottom boundary rows hold Z-type faces and the left and right columns
/// X-type ones, which fixes the parities below for either parity of L
/// (codes are built only for odd L; the face grid alone is also used by
/// the percolation analysis at even L).
pub(crate) fn face_exists(l: usize, a: i32, b: i32) -> bool {
    let l = l as i32;
    let bulk = (0..=l - 2).contains(&a) && (0..=l - 2).contains(&b);
    let top = a == -1 && b >= 0 && b <= l - 2 && b % 2 == 0;
    let bottom = a == l - 1 && b >= 0 && b <= l - 2 && b % 2 == l % 2;
    let left = b == -1 && a >= 0 && a <= l - 2 && a % 2 == 1;
    let right = b == l - 1 && a >= 0 && a <= l - 2 && a % 2 == (l - 1) % 2;
    bulk || top || bottom || left || right
}

pub(crate) fn face_kind(a: i32, b: i32) -> StabKind {
    if (a + b).rem_euclid(2) == 0 {
        StabKind::Xtype
    } else {
        StabKind::Ztype
    }
}

/// Builds the rotated surface code layout for odd `l >= 3`.
pub fn build_layout(l: usize) -> Result<SurfaceCodeLayout, CodeError> {
    if l < 3 || l % 2 == 0 {
        return Err(CodeError::BadLatticeSize(l));
    }
    let n = l * l;
    let li = l as i32;
    let mut gens = Vec::with_capacity(n - 1);
    let mut face_index = vec![None; (l + 1) * (l + 1)];
    for a in -1..li {
        for b in -1..li {
            if !face_exists(l, a, b) {
                continue;
            }
            let kind = face_kind(a, b);
            let mut support = Vec::with_capacity(4);
            for (r, c) in [(a, b), (a, b + 1), (a + 1, b), (a + 1, b + 1)] {
                if (0..li).contains(&r) && (0..li).contains(&c) {
                    support.push((r * li + c) as usize);
                }
            }
            let mut op = PauliOp::identity(n);
            let letter = match kind {
                StabKind::Xtype => PauliLetter::X,
                StabKind::Ztype => PauliLetter::Z,
            };
            for &q in &support {
                op.set_letter(q, letter);
            }
            face_index[(a + 1) as usize * (l + 1) + (b + 1) as usize] = Some(gens.len());
            gens.push(StabGen {
                kind,
                position: (a, b),
                support,
                op,
            });
        }
    }
    debug_assert_eq!(gens.len(), n - 1);

    let mut logical_z = PauliOp::identity(n);
    for r in 0..l {
        logical_z.set_letter(r * l, PauliLetter::Z);
    }
    let mut logical_x = PauliOp::identity(n);
    for c in 0..l {
        logical_x.set_letter(c, PauliLetter::X);
    }

    // Fixed strings to the boundary: a Z string down column max(b, 0) flips
    // exactly the X-type face at (a, b); an X string along row max(a, 0)
    // flips exactly the Z-type face at (a, b).
    let mut pure_error_strings = Vec::with_capacity(gens.len());
    for gen in &gens {
        let (a, b) = gen.position;
        let mut op = PauliOp::identity(n);
        match gen.kind {
            StabKind::Xtype => {
                let c = b.max(0) as usize;
                for r in 0..=a as usize {
                    op.set_letter(r * l + c, PauliLetter::Z);
                }
            }
            StabKind::Ztype => {
                let r = a.max(0) as usize;
                for c in 0..=b as usize {
                    op.set_letter(r * l + c, PauliLetter::X);
                }
            }
        }
        pure_error_strings.push(op);
    }

    Ok(SurfaceCodeLayout {
        l,
        n,
        gens,
        face_index,
        logical_x,
        logical_z,
        pure_error_strings,
    })
}

/// A surface code together with the deformation pattern that defines it.
#[derive(Debug, Clone)]
pub struct DeformedCode {
    layout: Arc<SurfaceCodeLayout>,
    pattern: DeformationPattern,
}

impl DeformedCode {
    pub fn new(layout: Arc<SurfaceCodeLayout>, pattern: DeformationPattern) -> Result<Self, CodeError> {
        if pattern.len() != layout.qubits() {
            return Err(CodeError::PatternLengthMismatch {
                pattern: pattern.len(),
                qubits: layout.qubits(),
            });
        }
        Ok(DeformedCode { layout, pattern })
    }

    pub fn layout(&self) -> &SurfaceCodeLayout {
        &self.layout
    }

    pub fn layout_arc(&self) -> Arc<SurfaceCodeLayout> {
        Arc::clone(&self.layout)
    }

    pub fn pattern(&self) -> &DeformationPattern {
        &self.pattern
    }

    pub fn qubits(&self) -> usize {
        self.layout.qubits()
    }

    /// The deformed stabilizer generator with the given index.
    pub fn deformed_generator(&self, idx: usize) -> PauliOp {
        self.pattern
            .permute(&self.layout.gens[idx].op)
            .expect("pattern length checked at construction")
    }

    pub fn deformed_logical_x(&self) -> PauliOp {
        self.pattern.permute(&self.layout.logical_x).unwrap()
    }

    pub fn deformed_logical_z(&self) -> PauliOp {
        self.pattern.permute(&self.layout.logical_z).unwrap()
    }

    /// Syndrome of an error in the deformed code: one bit per generator,
    /// set iff the error anticommutes with the deformed generator.
    pub fn syndrome(&self, error: &PauliOp) -> Result<Vec<bool>, CodeError> {
        if error.len() != self.qubits() {
            return Err(CodeError::OperatorLengthMismatch {
                operator: error.len(),
                qubits: self.qubits(),
            });
        }
        let mapped = self.pattern.permute(error)?;
        Ok(self.syndrome_undeformed_frame(&mapped))
    }

    /// Syndrome of an operator already expressed in the undeformed frame.
    pub fn syndrome_undeformed_frame(&self, mapped: &PauliOp) -> Vec<bool> {
        self.layout
            .gens
            .iter()
            .map(|gen| anticommutes_with_gen(gen, mapped))
            .collect()
    }

    /// Logical coset of `op`, or `None` when it is outside the normalizer.
    pub fn logical_class(&self, op: &PauliOp) -> Result<Option<LogicalClass>, CodeError> {
        if op.len() != self.qubits() {
            return Err(CodeError::OperatorLengthMismatch {
                operator: op.len(),
                qubits: self.qubits(),
            });
        }
        let mapped = self.pattern.permute(op)?;
        Ok(self.logical_class_undeformed_frame(&mapped))
    }

    pub fn logical_class_undeformed_frame(&self, mapped: &PauliOp) -> Option<LogicalClass> {
        if self
            .layout
            .gens
            .iter()
            .any(|gen| anticommutes_with_gen(gen, mapped))
        {
            return None;
        }
        Some(class_from_commutation(self.layout(), mapped))
    }
}

fn anticommutes_with_gen(gen: &StabGen, op: &PauliOp) -> bool {
    let mut parity = false;
    match gen.kind {
        StabKind::Xtype => {
            for &q in &gen.support {
                parity ^= op.z_bit(q);
            }
        }
        StabKind::Ztype => {
            for &q in &gen.support {
                parity ^= op.x_bit(q);
            }
        }
    }
    parity
}

/// Coset label of a normalizer element given in the undeformed frame: the
/// X component is detected by anticommutation with the pure-Z logical and
/// the Z component by anticommutation with the pure-X logical.
pub(crate) fn class_from_commutation(layout: &SurfaceCodeLayout, mapped: &PauliOp) -> LogicalClass {
    let has_x = !mapped.commutes(layout.logical_z()).unwrap();
    let has_z = !mapped.commutes(layout.logical_x()).unwrap();
    match (has_x, has_z) {
        (false, false) => LogicalClass::I,
        (true, false) => LogicalClass::X,
        (false, true) => LogicalClass::Z,
        (true, true) => LogicalClass::Y,
    }
}

/// Undeformed-frame representative of each logical class.
pub(crate) fn class_representative(layout: &SurfaceCodeLayout, class: LogicalClass) -> PauliOp {
    match class {
        LogicalClass::I => PauliOp::identity(layout.qubits()),
        LogicalClass::X => layout.logical_x().clone(),
        LogicalClass::Z => layout.logical_z().clone(),
        LogicalClass::Y => layout
            .logical_x()
            .multiply(layout.logical_z())
            .unwrap(),
    }
}

/// Named deformation presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// No deformation.
    Css,
    /// Y<->Z swap on every qubit.
    Xy,
    /// X<->Z swap on the checkerboard class of qubits with even r + c.
    Xzzx,
}

impl Preset {
    pub fn parse(name: &str) -> Option<Preset> {
        match name.to_ascii_lowercase().as_str() {
            "css" => Some(Preset::Css),
            "xy" => Some(Preset::Xy),
            "xzzx" => Some(Preset::Xzzx),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Css => "css",
            Preset::Xy => "xy",
            Preset::Xzzx => "xzzx",
        }
    }
}

pub fn preset(which: Preset, l: usize) -> DeformationPattern {
    let kinds = (0..l * l)
        .map(|q| {
            let (r, c) = (q / l, q % l);
            match which {
                Preset::Css => SingleQubitDeformation::Id,
                Preset::Xy => SingleQubitDeformation::SwapYZ,
                Preset::Xzzx => {
                    if (r + c) % 2 == 0 {
                        SingleQubitDeformation::SwapXZ
                    } else {
                        SingleQubitDeformation::Id
                    }
                }
            }
        })
        .collect();
    DeformationPattern::new(kinds)
}

/// Parameters of a random deformation family: independent per-qubit
/// probabilities of the X<->Z and Y<->Z swaps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    pub pi_xz: f64,
    pub pi_yz: f64,
}

impl FamilyParams {
    pub fn new(pi_xz: f64, pi_yz: f64) -> Result<Self, CodeError> {
        if !(pi_xz >= 0.0 && pi_yz >= 0.0 && pi_xz + pi_yz <= 1.0) {
            return Err(CodeError::BadFamilyParams { pi_xz, pi_yz });
        }
        Ok(FamilyParams { pi_xz, pi_yz })
    }
}

/// IID per-qubit draw in row-major order: one uniform variate per qubit,
/// mapped to SwapXZ below `pi_xz`, SwapYZ below `pi_xz + pi_yz`, Id above.
pub fn sample_pattern<R: Rng + ?Sized>(
    params: FamilyParams,
    n: usize,
    rng: &mut R,
) -> DeformationPattern {
    let kinds = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            if u < params.pi_xz {
                SingleQubitDeformation::SwapXZ
            } else if u < params.pi_xz + params.pi_yz {
                SingleQubitDeformation::SwapYZ
            } else {
                SingleQubitDeformation::Id
            }
        })
        .collect();
    DeformationPattern::new(kinds)
}

/// Tiles a rectangular unit cell over the L×L lattice, cropping at the
/// boundary: qubit (r, c) receives cell[r % rows][c % cols].
pub fn tiled_pattern(
    cell: &[Vec<SingleQubitDeformation>],
    l: usize,
) -> Result<DeformationPattern, CodeError> {
    if cell.is_empty() || cell[0].is_empty() || cell.iter().any(|row| row.len() != cell[0].len()) {
        return Err(CodeError::BadUnitCell);
    }
    let rows = cell.len();
    let cols = cell[0].len();
    let kinds = (0..l * l)
        .map(|q| cell[(q / l) % rows][(q % l) % cols])
        .collect();
    Ok(DeformationPattern::new(kinds))
}

/// The pinned translation-invariant cell with 2 X<->Z and 4 Y<->Z swaps
/// per 9 qubits.
pub fn two_ninths_four_ninths_cell() -> Vec<Vec<SingleQubitDeformation>> {
    ["YHY", "IYI", "HYI"]
        .iter()
        .map(|row| {
            row.chars()
                .map(|c| SingleQubitDeformation::from_char(c).unwrap())
                .collect()
        })
        .collect()
}

/// Exhaustive code distance: minimum weight over the three nontrivial
/// logical cosets. The stabilizer group is enumerated with a Gray code,
/// so this is limited to small codes.
pub fn code_distance(code: &DeformedCode) -> Result<usize, CodeError> {
    let n = code.qubits();
    if n > 13 {
        return Err(CodeError::TooLarge {
            op: "code_distance",
            max: 13,
            got: n,
        });
    }
    let layout = code.layout();
    let gens = layout.generators();
    let mut best = usize::MAX;
    for class in [LogicalClass::X, LogicalClass::Z, LogicalClass::Y] {
        // Weights are permutation-invariant, so the undeformed frame suffices.
        let mut current = class_representative(layout, class);
        best = best.min(current.weight());
        let steps = 1u64 << gens.len();
        for k in 1..steps {
            let flip = k.trailing_zeros() as usize;
            current.multiply_in_place(&gens[flip].op);
            best = best.min(current.weight());
        }
    }
    Ok(best)
}

/// Minimum weight of a nontrivial logical made purely of Z letters, or
/// `None` when no such logical exists. Uses exhaustive Gray-code search for
/// n <= 25 and a boundary-to-boundary shortest path for larger patterns
/// without Y<->Z swaps.
pub fn min_pure_z_weight(code: &DeformedCode) -> Result<Option<usize>, CodeError> {
    if code.qubits() <= 25 {
        return Ok(min_pure_z_brute(code));
    }
    if code
        .pattern()
        .kinds()
        .iter()
        .any(|&k| k == SingleQubitDeformation::SwapYZ)
    {
        return Err(CodeError::SwapYzUnsupported(
            "min_pure_z_weight beyond n = 25",
        ));
    }
    Ok(min_pure_z_shortest_path(code))
}

fn min_pure_z_brute(code: &DeformedCode) -> Option<usize> {
    let n = code.qubits();
    let layout = code.layout();
    let gens = layout.generators();
    let m = gens.len();
    // Parity bits: generator syndromes in 0..m, then the two logical
    // commutation bits. A pure-Z operator maps, per qubit, to Z (Id),
    // X (SwapXZ) or Y (SwapYZ) in the undeformed frame.
    let mut toggle = vec![0u32; n];
    for (q, &kind) in code.pattern().kinds().iter().enumerate() {
        let (hits_x_gens, hits_z_gens) = match kind {
            SingleQubitDeformation::Id => (true, false),
            SingleQubitDeformation::SwapXZ => (false, true),
            SingleQubitDeformation::SwapYZ => (true, true),
        };
        for (g, gen) in gens.iter().enumerate() {
            if !gen.support.contains(&q) {
                continue;
            }
            let hit = match gen.kind {
                StabKind::Xtype => hits_x_gens,
                StabKind::Ztype => hits_z_gens,
            };
            if hit {
                toggle[q] |= 1 << g;
            }
        }
        // Anticommutation with the undeformed pure-Z logical (column 0)
        // requires an X component; with the pure-X logical (row 0), a Z
        // component.
        let mapped = kind.apply(PauliLetter::Z);
        if layout.logical_z().z_bit(q) && mapped.x_bit() {
            toggle[q] |= 1 << m;
        }
        if layout.logical_x().x_bit(q) && mapped.z_bit() {
            toggle[q] |= 1 << (m + 1);
        }
    }
    let gen_mask: u32 = if m == 32 { u32::MAX } else { (1 << m) - 1 };
    let mut parity = 0u32;
    let mut weight = 0usize;
    let mut best: Option<usize> = None;
    let mut support = 0u32;
    for k in 1u64..(1 << n) {
        let q = k.trailing_zeros() as usize;
        parity ^= toggle[q];
        support ^= 1 << q;
        weight = if support >> q & 1 == 1 {
            weight + 1
        } else {
            weight - 1
        };
        if parity & gen_mask == 0 && parity >> m != 0 && best.is_none_or(|b| weight < b) {
            best = Some(weight);
        }
    }
    best
}

/// Node of the sublattice connectivity graphs: a face (identified by its
/// dense per-sublattice index), or one of the two virtual boundary nodes a
/// crossing logical string terminates on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum PathNode {
    Face(usize),
    NearBoundary,
    FarBoundary,
}

/// Face bookkeeping that works for either parity of L: dense per-sublattice
/// face indices, in the same (a, b) row-major enumeration order the code
/// layout uses for its generators.
#[derive(Debug, Clone)]
pub(crate) struct FaceGrid {
    l: usize,
    x_id: Vec<Option<usize>>,
    z_id: Vec<Option<usize>>,
    pub(crate) x_count: usize,
    pub(crate) z_count: usize,
}

impl FaceGrid {
    pub(crate) fn new(l: usize) -> Self {
        assert!(l >= 2);
        let li = l as i32;
        let mut x_id = vec![None; (l + 1) * (l + 1)];
        let mut z_id = vec![None; (l + 1) * (l + 1)];
        let mut x_count = 0;
        let mut z_count = 0;
        for a in -1..li {
            for b in -1..li {
                if !face_exists(l, a, b) {
                    continue;
                }
                let slot = (a + 1) as usize * (l + 1) + (b + 1) as usize;
                match face_kind(a, b) {
                    StabKind::Xtype => {
                        x_id[slot] = Some(x_count);
                        x_count += 1;
                    }
                    StabKind::Ztype => {
                        z_id[slot] = Some(z_count);
                        z_count += 1;
                    }
                }
            }
        }
        FaceGrid {
            l,
            x_id,
            z_id,
            x_count,
            z_count,
        }
    }

    fn id_at(&self, kind: StabKind, a: i32, b: i32) -> Option<usize> {
        if a < -1 || b < -1 || a >= self.l as i32 || b >= self.l as i32 {
            return None;
        }
        let slot = (a + 1) as usize * (self.l + 1) + (b + 1) as usize;
        match kind {
            StabKind::Xtype => self.x_id[slot],
            StabKind::Ztype => self.z_id[slot],
        }
    }

    /// The two faces (or virtual boundary nodes) of the given kind
    /// diagonally adjacent to qubit (r, c). For the X sublattice the
    /// near/far boundary pair is top/bottom; for Z it is left/right.
    pub(crate) fn sublattice_pair(&self, r: usize, c: usize, kind: StabKind) -> (PathNode, PathNode) {
        let (r, c) = (r as i32, c as i32);
        let positions: [(i32, i32); 2] = match (kind, (r + c) % 2 == 0) {
            (StabKind::Xtype, true) | (StabKind::Ztype, false) => [(r - 1, c - 1), (r, c)],
            (StabKind::Xtype, false) | (StabKind::Ztype, true) => [(r - 1, c), (r, c - 1)],
        };
        let mut out = [PathNode::NearBoundary; 2];
        for (i, &(a, b)) in positions.iter().enumerate() {
            out[i] = match self.id_at(kind, a, b) {
                Some(idx) => PathNode::Face(idx),
                None => match kind {
                    StabKind::Xtype => {
                        if a == -1 {
                            PathNode::NearBoundary
                        } else {
                            PathNode::FarBoundary
                        }
                    }
                    StabKind::Ztype => {
                        if b == -1 {
                            PathNode::NearBoundary
                        } else {
                            PathNode::FarBoundary
                        }
                    }
                },
            };
        }
        (out[0], out[1])
    }
}

/// Shortest boundary-to-boundary path in one sublattice graph, measured in
/// qubits (edges). `edges[q] = Some((u, v))` for qubits carrying an edge.
pub(crate) fn shortest_crossing_path(
    node_count: usize,
    edges: &[Option<(PathNode, PathNode)>],
) -> Option<usize> {
    use std::collections::VecDeque;
    // Node ids: faces 0..node_count, then the two virtual boundary nodes.
    let near = node_count;
    let far = node_count + 1;
    let id = |node: PathNode| match node {
        PathNode::Face(i) => i,
        PathNode::NearBoundary => near,
        PathNode::FarBoundary => far,
    };
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); node_count + 2];
    for pair in edges.iter().flatten() {
        let (u, v) = (id(pair.0), id(pair.1));
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut dist = vec![usize::MAX; node_count + 2];
    let mut queue = VecDeque::new();
    dist[near] = 0;
    queue.push_back(near);
    while let Some(u) = queue.pop_front() {
        if u == far {
            return Some(dist[far]);
        }
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    None
}

fn min_pure_z_shortest_path(code: &DeformedCode) -> Option<usize> {
    let l = code.layout().linear_size();
    let grid = FaceGrid::new(l);
    let mut x_edges: Vec<Option<(PathNode, PathNode)>> = vec![None; code.qubits()];
    let mut z_edges: Vec<Option<(PathNode, PathNode)>> = vec![None; code.qubits()];
    for q in 0..code.qubits() {
        let (r, c) = (q / l, q % l);
        match code.pattern().kind(q) {
            // A Z letter on an Id qubit links its two X-type faces; on an
            // X<->Z-swapped qubit it maps to X and links the Z-type pair.
            SingleQubitDeformation::Id => {
                x_edges[q] = Some(grid.sublattice_pair(r, c, StabKind::Xtype));
            }
            SingleQubitDeformation::SwapXZ => {
                z_edges[q] = Some(grid.sublattice_pair(r, c, StabKind::Ztype));
            }
            SingleQubitDeformation::SwapYZ => unreachable!("checked by caller"),
        }
    }
    let via_x = shortest_crossing_path(grid.x_count, &x_edges);
    let via_z = shortest_crossing_path(grid.z_count, &z_edges);
    match (via_x, via_z) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}
