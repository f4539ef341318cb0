//! Tensor-network approximation of the maximum-likelihood decoder.
//!
//! Each coset probability is the exact contraction of a planar network:
//! one binary variable per stabilizer face and one factor per qubit whose
//! value is the channel rate of the local letter of (coset representative
//! times the chosen stabilizer product). Variables of face column `b` only
//! couple to qubit columns `b` and `b + 1`, so the network contracts as a
//! boundary matrix-product state swept across qubit columns, one
//! matrix-product operator per column. After absorbing a column the state
//! is compressed by keeping the dominant `chi` Schmidt directions of every
//! bond.
//!
//! Compression projects each site tensor onto the top eigenspace of its
//! Gram matrix. The projection is exact within the retained span, so for
//! `chi` at least the maximal bond rank the contraction is exact up to
//! rounding.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{pure_error, CosetProbabilities, DecodeError, DecodeOutcome};
use crate::code::{class_representative, face_exists, face_kind, DeformedCode, LogicalClass, StabKind, SurfaceCodeLayout};
use crate::noise::NoiseField;
use crate::pauli::PauliOp;

/// Rank-3 tensor stored row-major as (left, phys, right).
#[derive(Debug, Clone)]
struct Tensor3 {
    l: usize,
    p: usize,
    r: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    fn at(&self, l: usize, p: usize, r: usize) -> f64 {
        self.data[(l * self.p + p) * self.r + r]
    }
}

/// MPO site tensor, row-major as (bond_left, phys_in, phys_out, bond_right).
#[derive(Debug, Clone)]
struct MpoSite {
    wl: usize,
    pin: usize,
    pout: usize,
    wr: usize,
    data: Vec<f64>,
}

fn face_dim(l: usize, a: i32, b: i32) -> usize {
    if face_exists(l, a, b) {
        2
    } else {
        1
    }
}

/// Per-qubit channel rates indexed by the symplectic bits x + 2z.
fn rate_tables(field: &NoiseField) -> Vec<[f64; 4]> {
    use crate::pauli::PauliLetter::{I, X, Y, Z};
    field
        .channels()
        .iter()
        .map(|ch| [ch.rate(I), ch.rate(X), ch.rate(Z), ch.rate(Y)])
        .collect()
}

/// Factor value at qubit (r, c): the channel rate of the local letter of
/// `e0` times the stabilizer product selected by the four face bits.
fn qubit_factor(
    layout: &SurfaceCodeLayout,
    rates: &[[f64; 4]],
    e0: &PauliOp,
    r: usize,
    c: usize,
    bits: [usize; 4],
) -> f64 {
    let l = layout.linear_size();
    let q = r * l + c;
    let (ri, ci) = (r as i32, c as i32);
    let positions = [
        (ri - 1, ci - 1, bits[0]),
        (ri, ci - 1, bits[1]),
        (ri - 1, ci, bits[2]),
        (ri, ci, bits[3]),
    ];
    let mut x_flip = 0usize;
    let mut z_flip = 0usize;
    for (a, b, bit) in positions {
        match face_kind(a, b) {
            StabKind::Xtype => x_flip ^= bit,
            StabKind::Ztype => z_flip ^= bit,
        }
    }
    let x = usize::from(e0.x_bit(q)) ^ x_flip;
    let z = usize::from(e0.z_bit(q)) ^ z_flip;
    rates[q][x + 2 * z]
}

/// MPO for qubit column `c`, mapping the state over face column `c - 1`
/// to the state over face column `c`. Site index `i` covers face row
/// `a = i - 1`; the bond after site `i` carries the pair of face bits of
/// that site, which the factor of qubit row `i` consumes.
fn column_mpo(
    layout: &SurfaceCodeLayout,
    rates: &[[f64; 4]],
    e0: &PauliOp,
    c: usize,
) -> Vec<MpoSite> {
    let l = layout.linear_size();
    let ci = c as i32;
    let mut sites = Vec::with_capacity(l + 1);
    for i in 0..=l {
        let a = i as i32 - 1;
        let pin = face_dim(l, a, ci - 1);
        let pout = face_dim(l, a, ci);
        let (wl, wr);
        if i == 0 {
            wl = 1;
            wr = pin * pout;
            let mut data = vec![0.0; pin * pout * wr];
            for li in 0..pin {
                for ro in 0..pout {
                    let bond = li * pout + ro;
                    data[(li * pout + ro) * wr + bond] = 1.0;
                }
            }
            sites.push(MpoSite {
                wl,
                pin,
                pout,
                wr,
                data,
            });
            continue;
        }
        let pin_prev = face_dim(l, a - 1, ci - 1);
        let pout_prev = face_dim(l, a - 1, ci);
        wl = pin_prev * pout_prev;
        wr = if i == l { 1 } else { pin * pout };
        let mut data = vec![0.0; wl * pin * pout * wr];
        let r = i - 1;
        for lp in 0..pin_prev {
            for rp in 0..pout_prev {
                for li in 0..pin {
                    for ro in 0..pout {
                        let value = qubit_factor(layout, rates, e0, r, c, [lp, li, rp, ro]);
                        let bond = if i == l { 0 } else { li * pout + ro };
                        let idx = (((lp * pout_prev + rp) * pin + li) * pout + ro) * wr + bond;
                        data[idx] = value;
                    }
                }
            }
        }
        sites.push(MpoSite {
            wl,
            pin,
            pout,
            wr,
            data,
        });
    }
    sites
}

/// Splits `a` (m×n, row-major) as `q * rest` with isometric `q` (m×k),
/// keeping at most `chi` directions: the columns of `q` span the dominant
/// eigenspace of a a^T. Returns None when the matrix is exactly zero.
fn split_left(a: &[f64], m: usize, n: usize, chi: usize) -> Option<(Vec<f64>, usize, Vec<f64>)> {
    debug_assert_eq!(a.len(), m * n);
    if m <= chi {
        // No truncation possible; keep the identity factorization.
        return Some((identity_matrix(m), m, a.to_vec()));
    }
    // Gram matrix g = a a^T, m×m.
    let mut g = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let mut s = 0.0;
            for t in 0..n {
                s += a[i * n + t] * a[j * n + t];
            }
            g[(i, j)] = s;
            g[(j, i)] = s;
        }
    }
    let eig = SymmetricEigen::new(g);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let lead = eig.eigenvalues[order[0]].max(0.0);
    if lead <= 0.0 {
        return None;
    }
    let cutoff = lead * 1e-28;
    let k = order
        .iter()
        .take(chi)
        .take_while(|&&i| eig.eigenvalues[i] > cutoff)
        .count()
        .max(1);
    // q columns are the top eigenvectors; rest = q^T a is the exact
    // projection coefficient matrix.
    let mut q = vec![0.0; m * k];
    for (col, &idx) in order[..k].iter().enumerate() {
        for row in 0..m {
            q[row * k + col] = eig.eigenvectors[(row, idx)];
        }
    }
    let mut rest = vec![0.0; k * n];
    for col in 0..k {
        for t in 0..n {
            let mut s = 0.0;
            for row in 0..m {
                s += q[row * k + col] * a[row * n + t];
            }
            rest[col * n + t] = s;
        }
    }
    Some((q, k, rest))
}

/// Mirror of `split_left`: factors `a` (m×n) as `rest * q` with `q` (k×n)
/// having orthonormal rows.
fn split_right(a: &[f64], m: usize, n: usize, chi: usize) -> Option<(Vec<f64>, usize, Vec<f64>)> {
    debug_assert_eq!(a.len(), m * n);
    if n <= chi {
        return Some((a.to_vec(), n, identity_matrix(n)));
    }
    let mut g = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for t in 0..m {
                s += a[t * n + i] * a[t * n + j];
            }
            g[(i, j)] = s;
            g[(j, i)] = s;
        }
    }
    let eig = SymmetricEigen::new(g);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let lead = eig.eigenvalues[order[0]].max(0.0);
    if lead <= 0.0 {
        return None;
    }
    let cutoff = lead * 1e-28;
    let k = order
        .iter()
        .take(chi)
        .take_while(|&&i| eig.eigenvalues[i] > cutoff)
        .count()
        .max(1);
    let mut q = vec![0.0; k * n];
    for (row, &idx) in order[..k].iter().enumerate() {
        for col in 0..n {
            q[row * n + col] = eig.eigenvectors[(col, idx)];
        }
    }
    let mut rest = vec![0.0; m * k];
    for t in 0..m {
        for row in 0..k {
            let mut s = 0.0;
            for col in 0..n {
                s += a[t * n + col] * q[row * n + col];
            }
            rest[t * k + row] = s;
        }
    }
    Some((rest, k, q))
}

fn identity_matrix(m: usize) -> Vec<f64> {
    let mut id = vec![0.0; m * m];
    for i in 0..m {
        id[i * m + i] = 1.0;
    }
    id
}

/// Absorbs one MPO column into the state, sweeping left-to-right and
/// truncating every bond as it is formed. Returns the accumulated log
/// scale, or None when the state collapses to exactly zero.
fn zip_up_forward(mps: &mut Vec<Tensor3>, mpo: &[MpoSite], chi: usize) -> Option<f64> {
    let sites = mps.len();
    let mut log_scale = 0.0;
    // carry maps the truncated bond to the (mpo bond × mps bond) pair.
    let mut carry: Vec<f64> = vec![1.0];
    let mut carry_rows = 1usize;
    let mut new_mps: Vec<Tensor3> = Vec::with_capacity(sites);
    for i in 0..sites {
        let m = &mps[i];
        let w = &mpo[i];
        debug_assert_eq!(m.p, w.pin);
        let (wl, wr) = (w.wl, w.wr);
        debug_assert_eq!(carry.len(), carry_rows * wl * m.l);
        // t[c, pout, (wr, mr)] = sum over wl, ml, pin of
        //   carry[c, (wl, ml)] * w[wl, pin, pout, wr] * m[ml, pin, mr]
        let t_cols = wr * m.r;
        let mut t = vec![0.0; carry_rows * w.pout * t_cols];
        for crow in 0..carry_rows {
            for lw in 0..wl {
                for lm in 0..m.l {
                    let cv = carry[crow * (wl * m.l) + lw * m.l + lm];
                    if cv == 0.0 {
                        continue;
                    }
                    for pin in 0..w.pin {
                        for pout in 0..w.pout {
                            for rw in 0..wr {
                                let wv =
                                    w.data[((lw * w.pin + pin) * w.pout + pout) * wr + rw];
                                if wv == 0.0 {
                                    continue;
                                }
                                let coeff = cv * wv;
                                let t_base = (crow * w.pout + pout) * t_cols + rw * m.r;
                                let m_base = (lm * m.p + pin) * m.r;
                                for rm in 0..m.r {
                                    t[t_base + rm] += coeff * m.data[m_base + rm];
                                }
                            }
                        }
                    }
                }
            }
        }
        let scale = t.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
        if scale == 0.0 {
            return None;
        }
        for v in &mut t {
            *v /= scale;
        }
        log_scale += scale.ln();
        if i + 1 == sites {
            debug_assert_eq!(t_cols, 1);
            new_mps.push(Tensor3 {
                l: carry_rows,
                p: w.pout,
                r: 1,
                data: t,
            });
        } else {
            let rows = carry_rows * w.pout;
            let (q, k, rest) = split_left(&t, rows, t_cols, chi)?;
            new_mps.push(Tensor3 {
                l: carry_rows,
                p: w.pout,
                r: k,
                data: q,
            });
            carry = rest;
            carry_rows = k;
        }
    }
    *mps = new_mps;
    Some(log_scale)
}

/// Mirror sweep, right-to-left.
fn zip_up_backward(mps: &mut Vec<Tensor3>, mpo: &[MpoSite], chi: usize) -> Option<f64> {
    let sites = mps.len();
    let mut log_scale = 0.0;
    let mut carry: Vec<f64> = vec![1.0];
    let mut carry_cols = 1usize;
    let mut new_rev: Vec<Tensor3> = Vec::with_capacity(sites);
    for i in (0..sites).rev() {
        let m = &mps[i];
        let w = &mpo[i];
        let (wl, wr) = (w.wl, w.wr);
        debug_assert_eq!(carry.len(), wr * m.r * carry_cols);
        // t[(wl, ml), pout, c] = sum over wr, mr, pin of
        //   w[wl, pin, pout, wr] * m[ml, pin, mr] * carry[(wr, mr), c]
        let t_rows = wl * m.l;
        let mut t = vec![0.0; t_rows * w.pout * carry_cols];
        for lw in 0..wl {
            for lm in 0..m.l {
                for pin in 0..w.pin {
                    for pout in 0..w.pout {
                        for rw in 0..wr {
                            let wv = w.data[((lw * w.pin + pin) * w.pout + pout) * wr + rw];
                            if wv == 0.0 {
                                continue;
                            }
                            for rm in 0..m.r {
                                let coeff = wv * m.at(lm, pin, rm);
                                if coeff == 0.0 {
                                    continue;
                                }
                                let t_base = ((lw * m.l + lm) * w.pout + pout) * carry_cols;
                                let c_base = (rw * m.r + rm) * carry_cols;
                                for c in 0..carry_cols {
                                    t[t_base + c] += coeff * carry[c_base + c];
                                }
                            }
                        }
                    }
                }
            }
        }
        let scale = t.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
        if scale == 0.0 {
            return None;
        }
        for v in &mut t {
            *v /= scale;
        }
        log_scale += scale.ln();
        if i == 0 {
            debug_assert_eq!(t_rows, m.l);
            new_rev.push(Tensor3 {
                l: 1,
                p: w.pout,
                r: carry_cols,
                data: t,
            });
        } else {
            let cols = w.pout * carry_cols;
            let (rest, k, q) = split_right(&t, t_rows, cols, chi)?;
            new_rev.push(Tensor3 {
                l: k,
                p: w.pout,
                r: carry_cols,
                data: q,
            });
            carry = rest;
            carry_cols = k;
        }
    }
    new_rev.reverse();
    *mps = new_rev;
    Some(log_scale)
}

/// Contracts the full network for one coset representative `e0`
/// (undeformed frame). Returns the log of the coset probability.
fn contract_coset(
    layout: &SurfaceCodeLayout,
    rates: &[[f64; 4]],
    e0: &PauliOp,
    chi: usize,
) -> f64 {
    let l = layout.linear_size();
    // Boundary state over face column -1: the constant function 1.
    let mut mps: Vec<Tensor3> = (0..=l)
        .map(|i| {
            let p = face_dim(l, i as i32 - 1, -1);
            Tensor3 {
                l: 1,
                p,
                r: 1,
                data: vec![1.0; p],
            }
        })
        .collect();
    let mut log_scale = 0.0;
    for c in 0..l {
        let mpo = column_mpo(layout, rates, e0, c);
        let step = if c % 2 == 0 {
            zip_up_forward(&mut mps, &mpo, chi)
        } else {
            zip_up_backward(&mut mps, &mpo, chi)
        };
        match step {
            Some(s) => log_scale += s,
            None => return f64::NEG_INFINITY,
        }
    }
    // Close every physical leg with the all-ones vector.
    let mut boundary: Vec<f64> = vec![1.0];
    for site in &mps {
        let mut next = vec![0.0; site.r];
        for (lidx, &v) in boundary.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            for p in 0..site.p {
                for r in 0..site.r {
                    next[r] += v * site.at(lidx, p, r);
                }
            }
        }
        boundary = next;
    }
    debug_assert_eq!(boundary.len(), 1);
    let value = boundary[0];
    if value <= 0.0 {
        return f64::NEG_INFINITY;
    }
    value.ln() + log_scale
}

/// Log-space coset sums approximated by tensor-network contraction at bond
/// dimension `chi`.
pub fn tn_coset_log_probs(
    code: &DeformedCode,
    field: &NoiseField,
    syndrome: &[bool],
    chi: usize,
) -> Result<[f64; 4], DecodeError> {
    if chi < 1 {
        return Err(DecodeError::BadBondDimension);
    }
    if field.len() != code.qubits() {
        return Err(DecodeError::FieldLength {
            field: field.len(),
            qubits: code.qubits(),
        });
    }
    let layout = code.layout();
    let pure = pure_error(layout, syndrome)?;
    let rates = rate_tables(field);
    let mut out = [f64::NEG_INFINITY; 4];
    for class in LogicalClass::ALL {
        let e0 = pure.multiply(&class_representative(layout, class)).unwrap();
        out[class.index()] = contract_coset(layout, &rates, &e0, chi);
    }
    Ok(out)
}

fn best_of(log_probs: &[f64; 4]) -> LogicalClass {
    let mut best = LogicalClass::I;
    for class in LogicalClass::ALL {
        if log_probs[class.index()] > log_probs[best.index()] {
            best = class;
        }
    }
    best
}

/// Tensor-network maximum-likelihood decoding. The outcome is flagged as
/// converged when a companion contraction at bond dimension `chi - 8`
/// (floored at 1) selects the same class.
pub fn tn_ml_decode(
    code: &DeformedCode,
    field: &NoiseField,
    syndrome: &[bool],
    chi: usize,
) -> Result<DecodeOutcome, DecodeError> {
    let log_probs = tn_coset_log_probs(code, field, syndrome, chi)?;
    let chosen = best_of(&log_probs);
    let chi_check = chi.saturating_sub(8).max(1);
    let converged = if chi_check == chi {
        true
    } else {
        let check = tn_coset_log_probs(code, field, syndrome, chi_check)?;
        best_of(&check) == chosen
    };
    let layout = code.layout();
    let pure = pure_error(layout, syndrome)?;
    let correction = code
        .pattern()
        .permute(&pure.multiply(&class_representative(layout, chosen)).unwrap())?;
    Ok(DecodeOutcome {
        chosen,
        correction,
        coset_probs: CosetProbabilities::from_log(log_probs),
        converged,
    })
}
