//! Threshold extraction by finite-size scaling: weighted least squares of
//! the quadratic scaling form nested in a deterministic grid-plus-refine
//! search over the threshold and the critical exponent.

use nalgebra::{Matrix3, Vector3};

use super::HarnessError;

/// One measured point (p, L, rate, error bar).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FssPoint {
    pub p: f64,
    pub l: usize,
    pub p_logical: f64,
    pub sigma: f64,
}

/// Fitted scaling parameters for p_logical = A + Bx + Cx^2 with
/// x = (p - p_th) L^(1/nu).
#[derive(Debug, Clone, PartialEq)]
pub struct FssFit {
    pub p_th: f64,
    pub nu: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Weighted sum of squared residuals at the optimum.
    pub residual: f64,
    pub reduced_chi2: f64,
    /// Diagonal of the (A, B, C) covariance at the optimum.
    pub covariance_diag: [f64; 3],
    /// Set when the residual diagnostics indicate the data do not support
    /// a crossing (reduced chi-square above 10).
    pub low_confidence: bool,
}

struct QuadFit {
    coeffs: [f64; 3],
    chi2: f64,
    cov_diag: [f64; 3],
}

fn weighted_quadratic(points: &[FssPoint], p_th: f64, inv_nu: f64) -> Option<QuadFit> {
    let mut m = Matrix3::<f64>::zeros();
    let mut v = Vector3::<f64>::zeros();
    for pt in points {
        let x = (pt.p - p_th) * (pt.l as f64).powf(inv_nu);
        let w = 1.0 / (pt.sigma * pt.sigma);
        let basis = [1.0, x, x * x];
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] += w * basis[i] * basis[j];
            }
            v[i] += w * basis[i] * pt.p_logical;
        }
    }
    let inv = m.try_inverse()?;
    let coeffs = inv * v;
    let mut chi2 = 0.0;
    for pt in points {
        let x = (pt.p - p_th) * (pt.l as f64).powf(inv_nu);
        let model = coeffs[0] + coeffs[1] * x + coeffs[2] * x * x;
        let r = (pt.p_logical - model) / pt.sigma;
        chi2 += r * r;
    }
    Some(QuadFit {
        coeffs: [coeffs[0], coeffs[1], coeffs[2]],
        chi2,
        cov_diag: [inv[(0, 0)], inv[(1, 1)], inv[(2, 2)]],
    })
}

/// Fits the scaling form over a 200×100 (p_th, nu) grid spanning the data's
/// p-range and nu in [0.5, 3], then refines the best cell by shrinking
/// local grids. Deterministic and invariant under input row order.
pub fn fss_fit(points: &[FssPoint]) -> Result<FssFit, HarnessError> {
    // Canonical evaluation order makes the fit exactly invariant under
    // input row permutations.
    let mut points: Vec<FssPoint> = points.to_vec();
    points.sort_by(|a, b| {
        a.l.cmp(&b.l)
            .then(a.p.total_cmp(&b.p))
            .then(a.p_logical.total_cmp(&b.p_logical))
            .then(a.sigma.total_cmp(&b.sigma))
    });
    let points = &points[..];
    let mut sizes: Vec<usize> = points.iter().map(|p| p.l).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 2 {
        return Err(HarnessError::Config(
            "finite-size scaling needs at least two lattice sizes".into(),
        ));
    }
    for &l in &sizes {
        if points.iter().filter(|p| p.l == l).count() < 3 {
            return Err(HarnessError::Config(format!(
                "finite-size scaling needs at least three rates per size, size {l} has fewer"
            )));
        }
    }
    if points.iter().any(|p| !(p.sigma > 0.0)) {
        return Err(HarnessError::Config(
            "finite-size scaling needs positive error bars".into(),
        ));
    }
    let p_min = points.iter().map(|p| p.p).fold(f64::INFINITY, f64::min);
    let p_max = points.iter().map(|p| p.p).fold(f64::NEG_INFINITY, f64::max);
    if p_max <= p_min {
        return Err(HarnessError::Config(
            "finite-size scaling needs a spread of physical error rates".into(),
        ));
    }

    let mut best: Option<(f64, f64, QuadFit)> = None;
    let consider = |p_th: f64, nu: f64, best: &mut Option<(f64, f64, QuadFit)>| {
        if let Some(fit) = weighted_quadratic(points, p_th, 1.0 / nu) {
            if best.as_ref().is_none_or(|(_, _, b)| fit.chi2 < b.chi2) {
                *best = Some((p_th, nu, fit));
            }
        }
    };
    for i in 0..200 {
        let p_th = p_min + (p_max - p_min) * i as f64 / 199.0;
        for j in 0..100 {
            let nu = 0.5 + 2.5 * j as f64 / 99.0;
            consider(p_th, nu, &mut best);
        }
    }
    let Some((mut p_th, mut nu, _)) = best else {
        return Err(HarnessError::Numeric(
            "degenerate design matrix in finite-size scaling fit".into(),
        ));
    };
    // Local refinement: shrink a 5×5 grid around the incumbent.
    let mut dp = (p_max - p_min) / 199.0;
    let mut dn = 2.5 / 99.0;
    for _ in 0..24 {
        for i in -2i32..=2 {
            for j in -2i32..=2 {
                let cand_p = p_th + dp * i as f64 / 2.0;
                let cand_n = (nu + dn * j as f64 / 2.0).max(1e-3);
                consider(cand_p, cand_n, &mut best);
            }
        }
        let (bp, bn, _) = best.as_ref().unwrap();
        (p_th, nu) = (*bp, *bn);
        dp *= 0.5;
        dn *= 0.5;
    }
    let (p_th, nu, fit) = best.unwrap();
    let dof = points.len().saturating_sub(5).max(1) as f64;
    let reduced = fit.chi2 / dof;
    Ok(FssFit {
        p_th,
        nu,
        a: fit.coeffs[0],
        b: fit.coeffs[1],
        c: fit.coeffs[2],
        residual: fit.chi2,
        reduced_chi2: reduced,
        covariance_diag: fit.cov_diag,
        low_confidence: reduced > 10.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(p_th: f64, nu: f64, a: f64, b: f64, c: f64, noise: f64) -> Vec<FssPoint> {
        let mut points = Vec::new();
        // Deterministic low-discrepancy offsets stand in for noise.
        let mut wiggle = 0.3f64;
        for &l in &[9usize, 13, 17, 21] {
            for i in 0..7 {
                let p = p_th - 0.03 + 0.06 * i as f64 / 6.0;
                let x = (p - p_th) * (l as f64).powf(1.0 / nu);
                wiggle = (wiggle * 997.0 + 0.1234).fract();
                let rate = a + b * x + c * x * x + noise * (wiggle - 0.5);
                points.push(FssPoint {
                    p,
                    l,
                    p_logical: rate,
                    sigma: (noise).max(1e-4),
                });
            }
        }
        points
    }

    #[test]
    fn recovers_known_parameters() {
        let points = synthetic(0.2, 1.5, 0.3, 1.8, 2.5, 1e-4);
        let fit = fss_fit(&points).unwrap();
        assert!((fit.p_th - 0.2).abs() < 0.002, "p_th {}", fit.p_th);
        assert!((fit.nu - 1.5).abs() < 0.1, "nu {}", fit.nu);
        assert!(!fit.low_confidence);
        assert!((fit.a - 0.3).abs() < 0.01);
    }

    #[test]
    fn row_order_does_not_matter() {
        let points = synthetic(0.17, 1.2, 0.25, 2.0, 1.0, 1e-4);
        let mut shuffled = points.clone();
        shuffled.reverse();
        shuffled.swap(3, 11);
        let a = fss_fit(&points).unwrap();
        let b = fss_fit(&shuffled).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn flags_data_without_a_crossing() {
        // Rates monotone in L at every p cannot collapse; the tiny error
        // bars make the residual diagnostics fire.
        let mut points = Vec::new();
        for &l in &[9usize, 13, 17] {
            for i in 0..5 {
                let p = 0.1 + 0.02 * i as f64;
                points.push(FssPoint {
                    p,
                    l,
                    p_logical: 0.01 * l as f64 + 3.0 * p * p,
                    sigma: 1e-5,
                });
            }
        }
        let fit = fss_fit(&points).unwrap();
        assert!(fit.low_confidence, "reduced chi2 {}", fit.reduced_chi2);
    }

    #[test]
    fn rejects_underdetermined_inputs() {
        let points = vec![
            FssPoint { p: 0.1, l: 9, p_logical: 0.2, sigma: 0.01 },
            FssPoint { p: 0.2, l: 9, p_logical: 0.3, sigma: 0.01 },
        ];
        assert!(fss_fit(&points).is_err());
    }

    #[test]
    fn sigma_rescaling_preserves_parameters() {
        let points = synthetic(0.22, 2.0, 0.4, 1.5, 0.8, 1e-4);
        let scaled: Vec<FssPoint> = points
            .iter()
            .map(|pt| FssPoint { sigma: pt.sigma * 7.0, ..*pt })
            .collect();
        let a = fss_fit(&points).unwrap();
        let b = fss_fit(&scaled).unwrap();
        // Uniform weight scaling leaves the optimum in place up to the
        // refinement resolution.
        assert!((a.p_th - b.p_th).abs() < 1e-6);
        assert!((a.nu - b.nu).abs() < 1e-4);
        assert!((b.residual / a.residual - 1.0 / 49.0).abs() < 1e-6);
    }
}
