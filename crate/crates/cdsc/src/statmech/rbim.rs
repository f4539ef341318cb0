//! Disordered spin-model construction: Nishimori couplings, the
//! two-sublattice Ising instance defined by an error, and the hard
//! constraints that survive at infinite bias.
//!
//! One Ising spin sits on every X-type stabilizer (the s^X sublattice) and
//! one on every Z-type stabilizer (s^Z). Each qubit contributes up to
//! three terms: a coupling of its adjacent s^X pair, one of its adjacent
//! s^Z pair, and a four-spin term over both pairs. For the undeformed code
//! these carry (tau_Z J_Z), (tau_X J_X) and (tau_Y J_Y) respectively; a
//! deformation on the qubit permutes the labels accordingly. Terms whose
//! faces fall outside the lattice are dropped, mirroring the neglect of
//! boundary terms in the Hamiltonian.

use super::StatMechError;
use crate::code::{DeformedCode, FaceGrid, PathNode, StabKind};
#[cfg(test)]
use crate::code::SurfaceCodeLayout;
use crate::noise::{rates_from, Bias, BiasedNoiseParams};
use crate::pauli::{DeformationPattern, PauliLetter, PauliOp, SingleQubitDeformation};

/// Nishimori-line coupling strengths (J_X, J_Y, J_Z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub j_x: f64,
    pub j_y: f64,
    pub j_z: f64,
}

/// J_P = (4 beta)^-1 log(p_P^2 (1-p) / (p_X p_Y p_Z)); at infinite bias
/// J_X = J_Y stays finite while J_Z diverges.
pub fn nishimori_couplings(p: f64, eta: Bias, beta: f64) -> Result<Couplings, StatMechError> {
    if !(0.0 < p && p < 1.0) {
        return Err(StatMechError::BadErrorRate(p));
    }
    if !(beta > 0.0) {
        return Err(StatMechError::BadBeta(beta));
    }
    let ch = rates_from(&BiasedNoiseParams::new(p, eta).map_err(StatMechError::Noise)?);
    let (px, py, pz) = (
        ch.rate(PauliLetter::X),
        ch.rate(PauliLetter::Y),
        ch.rate(PauliLetter::Z),
    );
    let q = 1.0 - p;
    match eta {
        Bias::Infinite => Ok(Couplings {
            j_x: (q / pz).ln() / (4.0 * beta),
            j_y: (q / pz).ln() / (4.0 * beta),
            j_z: f64::INFINITY,
        }),
        Bias::Finite(_) => {
            let denom = px * py * pz;
            Ok(Couplings {
                j_x: (px * px * q / denom).ln() / (4.0 * beta),
                j_y: (py * py * q / denom).ln() / (4.0 * beta),
                j_z: (pz * pz * q / denom).ln() / (4.0 * beta),
            })
        }
    }
}

/// Which spins an interaction term couples; indices point into the s^X and
/// s^Z spin lists of the instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermSpins {
    SxPair(usize, usize),
    SzPair(usize, usize),
    Quad(usize, usize, usize, usize),
}

/// One signed interaction term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionTerm {
    pub tau: i8,
    pub strength: f64,
    pub spins: TermSpins,
}

/// The disordered spin model defined by a code, an error and a noise point.
#[derive(Debug, Clone)]
pub struct RbimInstance {
    pub beta: f64,
    pub sx_count: usize,
    pub sz_count: usize,
    /// Terms grouped by the qubit they sit on.
    pub terms: Vec<Vec<InteractionTerm>>,
    /// Incidence of terms on spins for energy-difference queries:
    /// per s^X spin, the list of (qubit, term) indices touching it.
    sx_incidence: Vec<Vec<(usize, usize)>>,
    sz_incidence: Vec<Vec<(usize, usize)>>,
}

impl RbimInstance {
    /// Total energy of a spin configuration.
    pub fn energy(&self, sx: &[i8], sz: &[i8]) -> f64 {
        assert_eq!(sx.len(), self.sx_count);
        assert_eq!(sz.len(), self.sz_count);
        let mut h = 0.0;
        for terms in &self.terms {
            for term in terms {
                h -= f64::from(term.tau) * term.strength * term_product(term.spins, sx, sz);
            }
        }
        h
    }

    /// Energy change from flipping one s^X spin.
    pub fn sx_flip_cost(&self, sx: &[i8], sz: &[i8], spin: usize) -> f64 {
        let mut delta = 0.0;
        for &(q, t) in &self.sx_incidence[spin] {
            let term = &self.terms[q][t];
            delta += 2.0 * f64::from(term.tau) * term.strength * term_product(term.spins, sx, sz);
        }
        delta
    }

    /// Energy change from flipping one s^Z spin.
    pub fn sz_flip_cost(&self, sx: &[i8], sz: &[i8], spin: usize) -> f64 {
        let mut delta = 0.0;
        for &(q, t) in &self.sz_incidence[spin] {
            let term = &self.terms[q][t];
            delta += 2.0 * f64::from(term.tau) * term.strength * term_product(term.spins, sx, sz);
        }
        delta
    }
}

fn term_product(spins: TermSpins, sx: &[i8], sz: &[i8]) -> f64 {
    let p = match spins {
        TermSpins::SxPair(a, b) => sx[a] * sx[b],
        TermSpins::SzPair(a, b) => sz[a] * sz[b],
        TermSpins::Quad(a, b, c, d) => sx[a] * sx[b] * sz[c] * sz[d],
    };
    f64::from(p)
}

/// Maps face indices (generator order) to dense per-sublattice spin ids.
#[cfg(test)]
pub(crate) struct SpinIndex {
    pub sx_of_gen: Vec<Option<usize>>,
    pub sz_of_gen: Vec<Option<usize>>,
}

#[cfg(test)]
pub(crate) fn spin_index(layout: &SurfaceCodeLayout) -> SpinIndex {
    let gens = layout.generators();
    let mut sx_of_gen = vec![None; gens.len()];
    let mut sz_of_gen = vec![None; gens.len()];
    let mut sx_count = 0;
    let mut sz_count = 0;
    for (i, gen) in gens.iter().enumerate() {
        match gen.kind {
            StabKind::Xtype => {
                sx_of_gen[i] = Some(sx_count);
                sx_count += 1;
            }
            StabKind::Ztype => {
                sz_of_gen[i] = Some(sz_count);
                sz_count += 1;
            }
        }
    }
    SpinIndex {
        sx_of_gen,
        sz_of_gen,
    }
}

fn spin_pair(grid: &FaceGrid, r: usize, c: usize, kind: StabKind) -> Option<(usize, usize)> {
    let (a, b) = grid.sublattice_pair(r, c, kind);
    let resolve = |node: PathNode| match node {
        PathNode::Face(id) => Some(id),
        _ => None,
    };
    Some((resolve(a)?, resolve(b)?))
}

/// Disorder sign of single-qubit letter `e` against coupling letter `p`:
/// +1 when they commute.
fn tau_sign(e: PauliLetter, p: PauliLetter) -> i8 {
    if e == PauliLetter::I || e == p {
        1
    } else {
        -1
    }
}

/// Builds the disordered instance for error `E` at the given noise point.
/// The deformation on each qubit permutes which signed coupling sits on
/// which spin product.
pub fn build_rbim(
    code: &DeformedCode,
    error: &PauliOp,
    p: f64,
    eta: Bias,
    beta: f64,
) -> Result<RbimInstance, StatMechError> {
    let layout = code.layout();
    let couplings = nishimori_couplings(p, eta, beta)?;
    let grid = FaceGrid::new(layout.linear_size());
    let l = layout.linear_size();
    let mut terms: Vec<Vec<InteractionTerm>> = Vec::with_capacity(layout.qubits());
    for q in 0..layout.qubits() {
        let (r, c) = (q / l, q % l);
        let e = error.letter(q);
        // Signed couplings in the undeformed slot order (s^X pair gets Z,
        // s^Z pair gets X, the four-spin term gets Y), then the qubit's
        // deformation swaps the slot contents.
        let entry = |letter: PauliLetter| -> (i8, f64) {
            let j = match letter {
                PauliLetter::X => couplings.j_x,
                PauliLetter::Y => couplings.j_y,
                PauliLetter::Z => couplings.j_z,
                PauliLetter::I => unreachable!(),
            };
            (tau_sign(e, letter), j)
        };
        let kind = code.pattern().kind(q);
        let sx_slot = entry(kind.apply(PauliLetter::Z));
        let sz_slot = entry(kind.apply(PauliLetter::X));
        let quad_slot = entry(kind.apply(PauliLetter::Y));
        let mut qubit_terms = Vec::with_capacity(3);
        let sx_pair = spin_pair(&grid, r, c, StabKind::Xtype);
        let sz_pair = spin_pair(&grid, r, c, StabKind::Ztype);
        if let Some((a, b)) = sx_pair {
            qubit_terms.push(InteractionTerm {
                tau: sx_slot.0,
                strength: sx_slot.1,
                spins: TermSpins::SxPair(a, b),
            });
        }
        if let Some((a, b)) = sz_pair {
            qubit_terms.push(InteractionTerm {
                tau: sz_slot.0,
                strength: sz_slot.1,
                spins: TermSpins::SzPair(a, b),
            });
        }
        if let (Some((a, b)), Some((c2, d))) = (sx_pair, sz_pair) {
            qubit_terms.push(InteractionTerm {
                tau: quad_slot.0,
                strength: quad_slot.1,
                spins: TermSpins::Quad(a, b, c2, d),
            });
        }
        terms.push(qubit_terms);
    }
    let mut sx_incidence = vec![Vec::new(); grid.x_count];
    let mut sz_incidence = vec![Vec::new(); grid.z_count];
    for (q, qubit_terms) in terms.iter().enumerate() {
        for (t, term) in qubit_terms.iter().enumerate() {
            match term.spins {
                TermSpins::SxPair(a, b) => {
                    sx_incidence[a].push((q, t));
                    sx_incidence[b].push((q, t));
                }
                TermSpins::SzPair(a, b) => {
                    sz_incidence[a].push((q, t));
                    sz_incidence[b].push((q, t));
                }
                TermSpins::Quad(a, b, c2, d) => {
                    sx_incidence[a].push((q, t));
                    sx_incidence[b].push((q, t));
                    sz_incidence[c2].push((q, t));
                    sz_incidence[d].push((q, t));
                }
            }
        }
    }
    Ok(RbimInstance {
        beta,
        sx_count: grid.x_count,
        sz_count: grid.z_count,
        terms,
        sx_incidence,
        sz_incidence,
    })
}

/// The constraint kinds of the infinite-bias limit, named after the
/// diverging coupling each deformation pins: the identity pins the s^X
/// pair product, the X<->Z swap the s^Z pair, the Y<->Z swap the four-spin
/// product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    JZ,
    JX,
    JY,
}

/// A node of a sublattice constraint graph: a spin, or the virtual
/// boundary a crossing cluster terminates on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinNode {
    Spin(usize),
    /// For the s^X sublattice the near/far pair is top/bottom; for s^Z it
    /// is left/right, matching the vertical pure-Z logical convention.
    NearBoundary,
    FarBoundary,
}

fn to_spin_node(node: PathNode) -> SpinNode {
    match node {
        PathNode::Face(id) => SpinNode::Spin(id),
        PathNode::NearBoundary => SpinNode::NearBoundary,
        PathNode::FarBoundary => SpinNode::FarBoundary,
    }
}

/// One hard constraint at one qubit.
#[derive(Debug, Clone, Copy)]
pub struct Constraint {
    pub qubit: usize,
    pub kind: ConstraintKind,
    /// Edge on the s^X sublattice (JZ constraints and the s^X half of JY).
    pub sx_edge: Option<(SpinNode, SpinNode)>,
    /// Edge on the s^Z sublattice (JX constraints and the s^Z half of JY).
    pub sz_edge: Option<(SpinNode, SpinNode)>,
}

/// The per-qubit constraints of the infinite-bias limit.
#[derive(Debug, Clone)]
pub struct ConstraintGraph {
    pub l: usize,
    pub sx_count: usize,
    pub sz_count: usize,
    pub constraints: Vec<Constraint>,
}

/// Maps every qubit to its constraint according to the deformation.
/// Four-spin constraints contribute an edge to both sublattices, which is
/// how mixed clusters arise.
pub fn infinite_bias_constraints(
    pattern: &DeformationPattern,
    l: usize,
) -> Result<ConstraintGraph, StatMechError> {
    if pattern.len() != l * l {
        return Err(StatMechError::Code(
            crate::code::CodeError::PatternLengthMismatch {
                pattern: pattern.len(),
                qubits: l * l,
            },
        ));
    }
    let grid = FaceGrid::new(l);
    let mut constraints = Vec::with_capacity(pattern.len());
    for q in 0..pattern.len() {
        let (r, c) = (q / l, q % l);
        let x_pair = grid.sublattice_pair(r, c, StabKind::Xtype);
        let z_pair = grid.sublattice_pair(r, c, StabKind::Ztype);
        let x_edge = (to_spin_node(x_pair.0), to_spin_node(x_pair.1));
        let z_edge = (to_spin_node(z_pair.0), to_spin_node(z_pair.1));
        let constraint = match pattern.kind(q) {
            SingleQubitDeformation::Id => Constraint {
                qubit: q,
                kind: ConstraintKind::JZ,
                sx_edge: Some(x_edge),
                sz_edge: None,
            },
            SingleQubitDeformation::SwapXZ => Constraint {
                qubit: q,
                kind: ConstraintKind::JX,
                sx_edge: None,
                sz_edge: Some(z_edge),
            },
            SingleQubitDeformation::SwapYZ => Constraint {
                qubit: q,
                kind: ConstraintKind::JY,
                sx_edge: Some(x_edge),
                sz_edge: Some(z_edge),
            },
        };
        constraints.push(constraint);
    }
    Ok(ConstraintGraph {
        l,
        sx_count: grid.x_count,
        sz_count: grid.z_count,
        constraints,
    })
}
