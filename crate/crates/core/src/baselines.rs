//! Spectral comparators: power iteration and Lanczos eigen-solvers, BBP
//! predictions, the PLS cross-covariance test and the CCA (MANOVA) test.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use ndarray::{Array2, ArrayView2};
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::rng_from;

/// Top eigen- or singular pair of a spectral statistic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralResult {
    pub top_value: f64,
    pub top_vector: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn start_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from(seed);
    let base = 1.0 / (n as f64).sqrt();
    let mut v: Vec<f64> = (0..n)
        .map(|_| {
            let g: f64 = StandardNormal.sample(&mut rng);
            base + 0.1 * base * g
        })
        .collect();
    let s = norm(&v);
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// Power iteration on `v ↦ op(v) + shift·v`; reports the eigenvalue of `op`.
fn power_iteration<F>(
    n: usize,
    op: &F,
    shift: f64,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<SpectralResult>
where
    F: Fn(&[f64], &mut [f64]),
{
    let mut v = start_vector(n, seed);
    let mut w = vec![0.0; n];
    let mut best = SpectralResult {
        top_value: 0.0,
        top_vector: v.clone(),
        iterations: 0,
        residual: f64::INFINITY,
    };
    for it in 1..=max_iter.max(1) {
        op(&v, &mut w);
        let theta = dot(&v, &w);
        let residual = w
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - theta * b).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual < best.residual {
            best = SpectralResult {
                top_value: theta,
                top_vector: v.clone(),
                iterations: it,
                residual,
            };
        }
        if residual <= tol {
            return Ok(best);
        }
        w.iter_mut().zip(&v).for_each(|(a, b)| *a += shift * b);
        let s = norm(&w);
        if s == 0.0 {
            return Ok(SpectralResult {
                top_value: 0.0,
                top_vector: v,
                iterations: it,
                residual: 0.0,
            });
        }
        v.iter_mut().zip(&w).for_each(|(a, b)| *a = b / s);
    }
    best.iterations = max_iter;
    Err(Error::Convergence {
        best: Box::new(best),
    })
}

fn gershgorin_bound(a: ArrayView2<f64>) -> f64 {
    a.rows()
        .into_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn dense_op(a: ArrayView2<'_, f64>) -> impl Fn(&[f64], &mut [f64]) + '_ {
    move |v: &[f64], out: &mut [f64]| {
        for (o, row) in out.iter_mut().zip(a.rows()) {
            *o = row.iter().zip(v).map(|(x, y)| x * y).sum();
        }
    }
}

/// Dominant eigenpair (largest magnitude) of a symmetric matrix.
///
/// Plain power iteration is tried first. If it stalls, typically because
/// `θ` and `−θ` are both dominant, the iteration is repeated on `A + σI` and
/// `A − σI` with `σ` a Gershgorin bound. Those runs find the largest and the
/// smallest eigenvalue; when both converge the one of larger magnitude is
/// returned.
pub fn top_eigpair_sym(a: ArrayView2<f64>, tol: f64, max_iter: usize) -> Result<SpectralResult> {
    top_eigpair_sym_seeded(a, tol, max_iter, 0)
}

pub fn top_eigpair_sym_seeded(
    a: ArrayView2<f64>,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<SpectralResult> {
    let (n, m) = a.dim();
    if n != m || n == 0 {
        return Err(Error::Dimension(format!(
            "expected a nonempty square matrix, got {n}x{m}"
        )));
    }
    let op = dense_op(a);
    let first = match power_iteration(n, &op, 0.0, tol, max_iter, seed) {
        Ok(r) => return Ok(r),
        Err(Error::Convergence { best }) => best,
        Err(e) => return Err(e),
    };
    let sigma = gershgorin_bound(a);
    let mut candidates = Vec::new();
    for s in [sigma, -sigma] {
        match power_iteration(n, &op, s, tol, max_iter, seed) {
            Ok(r) => candidates.push(r),
            Err(Error::Convergence { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    if candidates.len() < 2 {
        return Err(Error::Convergence { best: first });
    }
    Ok(candidates
        .into_iter()
        .max_by(|x, y| x.top_value.abs().total_cmp(&y.top_value.abs()))
        .expect("two candidates"))
}

/// Largest algebraic eigenpair of a symmetric operator by Lanczos with full
/// reorthogonalization, stopping once the Ritz residual is below `tol`.
pub fn lanczos_top<F>(
    n: usize,
    op: F,
    tol: f64,
    max_steps: usize,
    seed: u64,
) -> Result<SpectralResult>
where
    F: Fn(&[f64], &mut [f64]),
{
    if n == 0 {
        return Err(Error::Dimension("empty operator".into()));
    }
    let max_steps = max_steps.min(n).max(1);
    let mut basis: Vec<Vec<f64>> = vec![start_vector(n, seed)];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut best: Option<SpectralResult> = None;
    for k in 0..max_steps {
        op(&basis[k], &mut w);
        let alpha = dot(&w, &basis[k]);
        alphas.push(alpha);
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                w.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
            }
        }
        let beta = norm(&w);
        let m = alphas.len();
        let mut t = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alphas[i];
            if i + 1 < m {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (idx, theta) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty tridiagonal");
        let s = eig.eigenvectors.column(idx);
        let ritz_residual = (beta * s[m - 1]).abs();
        let done = ritz_residual <= tol || beta <= 1e-14 || k + 1 == max_steps;
        if done {
            let mut v = vec![0.0; n];
            for (j, q) in basis.iter().enumerate() {
                v.iter_mut().zip(q).for_each(|(a, b)| *a += s[j] * b);
            }
            let nv = norm(&v);
            v.iter_mut().for_each(|a| *a /= nv);
            op(&v, &mut w);
            let residual = w
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - theta * b).powi(2))
                .sum::<f64>()
                .sqrt();
            let r = SpectralResult {
                top_value: theta,
                top_vector: v,
                iterations: m,
                residual,
            };
            if ritz_residual <= tol || beta <= 1e-14 {
                return Ok(r);
            }
            best = Some(r);
            break;
        }
        betas.push(beta);
        basis.push(w.iter().map(|a| a / beta).collect());
    }
    Err(Error::Convergence {
        best: Box::new(best.expect("loop ran at least once")),
    })
}

/// Largest algebraic eigenvalue of `X/√n` for a symmetric `X`.
pub fn wigner_top_eigenvalue(x: ArrayView2<f64>, seed: u64) -> Result<SpectralResult> {
    let n = x.nrows();
    let s = 1.0 / (n as f64).sqrt();
    let op = dense_op(x);
    accept_best(lanczos_top(
        n,
        |v, out| {
            op(v, out);
            out.iter_mut().for_each(|a| *a *= s);
        },
        1e-8,
        300,
        seed,
    ))
}

/// Keeps the last Ritz pair when the residual target was not met; the Ritz
/// value is far more accurate than the residual suggests near a bulk edge.
fn accept_best(r: Result<SpectralResult>) -> Result<SpectralResult> {
    match r {
        Err(Error::Convergence { best }) => Ok(*best),
        other => other,
    }
}

fn mul_into(m: ArrayView2<f64>, v: &[f64], out: &mut [f64]) {
    for (o, row) in out.iter_mut().zip(m.rows()) {
        *o = row.iter().zip(v).map(|(x, y)| x * y).sum();
    }
}

fn mul_t_into(m: ArrayView2<f64>, v: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|o| *o = 0.0);
    for (row, vi) in m.rows().into_iter().zip(v) {
        for (o, x) in out.iter_mut().zip(row.iter()) {
            *o += x * vi;
        }
    }
}

/// Largest eigenvalue of `XXᵀ/N` for an `n x N` matrix, without forming `XXᵀ`.
pub fn wishart_top_eigenvalue(x: ArrayView2<f64>, seed: u64) -> Result<SpectralResult> {
    let (n, big_n) = x.dim();
    let mut tmp = vec![0.0; big_n];
    let tmp_cell = std::cell::RefCell::new(&mut tmp);
    accept_best(lanczos_top(
        n,
        |v, out| {
            let mut t = tmp_cell.borrow_mut();
            mul_t_into(x, v, &mut t);
            mul_into(x, &t, out);
            out.iter_mut().for_each(|a| *a /= big_n as f64);
        },
        1e-8,
        300,
        seed,
    ))
}

/// `λ + 1/λ` above the transition, the bulk edge 2 otherwise.
pub fn bbp_wigner_predict(lambda: f64) -> f64 {
    if lambda > 1.0 {
        lambda + 1.0 / lambda
    } else {
        2.0
    }
}

/// `(bulk edge, spike location)` for `XXᵀ/N` with aspect ratio `γ`.
pub fn bbp_wishart_predict(lambda: f64, gamma: f64) -> (f64, f64) {
    let bulk = (1.0 + gamma.sqrt()).powi(2);
    let spike = if lambda * lambda > gamma {
        (1.0 + lambda) * (1.0 + gamma / lambda)
    } else {
        bulk
    };
    (bulk, spike)
}

fn check_same_shape(x: ArrayView2<f64>, y: ArrayView2<f64>) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::Dimension(format!(
            "shapes {:?} and {:?} differ",
            x.dim(),
            y.dim()
        )));
    }
    Ok(())
}

/// Top singular value and left singular vector of `S = XYᵀ`, from the top
/// eigenpair of `SSᵀ`.
pub fn pls_stat(x: ArrayView2<f64>, y: ArrayView2<f64>) -> Result<SpectralResult> {
    check_same_shape(x, y)?;
    let s: Array2<f64> = x.dot(&y.t());
    let n = s.nrows();
    let sv = s.view();
    let mut tmp = vec![0.0; n];
    let cell = std::cell::RefCell::new(&mut tmp);
    let r = lanczos_top(
        n,
        |v, out| {
            let mut t = cell.borrow_mut();
            mul_t_into(sv, v, &mut t);
            mul_into(sv, &t, out);
        },
        1e-10,
        400,
        0,
    );
    let r = accept_best(r)?;
    let sigma = r.top_value.max(0.0).sqrt();
    Ok(SpectralResult {
        top_value: sigma,
        ..r
    })
}

fn eval_poly(c: &[f64; 4], x: f64) -> f64 {
    ((c[3] * x + c[2]) * x + c[1]) * x + c[0]
}

fn real_roots_quadratic(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        if b == 0.0 {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let sgn = if b >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (b + sgn * disc.sqrt());
    let mut r = Vec::new();
    if q != 0.0 {
        r.push(q / a);
        r.push(c / q);
    } else {
        r.push(0.0);
    }
    r
}

/// Upper end of the PLS root search interval.
pub const PLS_ROOT_MAX: f64 = 1e3;

/// Largest real root in `[0, 10³]` of
/// `1 + (1−ρ²λ²μ²−λ²−μ²)X + (λ²μ²−λ²−μ²)X² + λ²μ²X³`, or `+∞` if none.
pub fn pls_threshold(lambda: f64, mu: f64, rho: f64) -> f64 {
    let (l2, m2, r2) = (lambda * lambda, mu * mu, rho * rho);
    let c = [
        1.0,
        1.0 - r2 * l2 * m2 - l2 - m2,
        l2 * m2 - l2 - m2,
        l2 * m2,
    ];
    let scale = c.iter().map(|v| v.abs()).sum::<f64>();
    let mut points = vec![0.0, PLS_ROOT_MAX];
    points.extend(
        real_roots_quadratic(3.0 * c[3], 2.0 * c[2], c[1])
            .into_iter()
            .filter(|r| *r > 0.0 && *r < PLS_ROOT_MAX),
    );
    points.sort_by(f64::total_cmp);
    let mut best = f64::NEG_INFINITY;
    for &p in &points {
        if eval_poly(&c, p).abs() <= 1e-12 * scale * p.abs().max(1.0).powi(3) {
            best = best.max(p);
        }
    }
    for seg in points.windows(2) {
        let (mut lo, mut hi) = (seg[0], seg[1]);
        let (flo, fhi) = (eval_poly(&c, lo), eval_poly(&c, hi));
        if flo == 0.0 || fhi == 0.0 || flo.signum() == fhi.signum() {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let fm = eval_poly(&c, mid);
            if fm.signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi.max(1.0) {
                break;
            }
        }
        best = best.max(0.5 * (lo + hi));
    }
    if best.is_finite() {
        best
    } else {
        f64::INFINITY
    }
}

/// `λ²μ²ρ²(γ⁻¹−1) / ((λ²+1)(μ²+1))`.
pub fn cca_condition_value(lambda: f64, mu: f64, rho: f64, gamma: f64) -> f64 {
    let (l2, m2, r2) = (lambda * lambda, mu * mu, rho * rho);
    l2 * m2 * r2 * (1.0 / gamma - 1.0) / ((l2 + 1.0) * (m2 + 1.0))
}

/// Whether the CCA success condition value exceeds one.
pub fn cca_condition(lambda: f64, mu: f64, rho: f64, gamma: f64) -> bool {
    cca_condition_value(lambda, mu, rho, gamma) > 1.0
}

fn to_nalgebra(a: &Array2<f64>) -> DMatrix<f64> {
    let (r, c) = a.dim();
    DMatrix::from_fn(r, c, |i, j| a[[i, j]])
}

/// Minimum eigenvalue below which a Gram matrix counts as singular.
pub const GRAM_EIGEN_FLOOR: f64 = 1e-10;

fn inverse_sqrt(g: DMatrix<f64>, label: &str) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(g);
    let min = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min <= GRAM_EIGEN_FLOOR {
        return Err(Error::Singular(format!(
            "{label} has minimum eigenvalue {min:.3e}"
        )));
    }
    let d = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|&l| 1.0 / l.max(GRAM_EIGEN_FLOOR).sqrt()),
    );
    let v = &eig.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&d) * v.transpose())
}

/// Top canonical correlation: top singular value of
/// `(XXᵀ)^{−1/2} XYᵀ (YYᵀ)^{−1/2}`.
pub fn cca_stat(x: ArrayView2<f64>, y: ArrayView2<f64>) -> Result<SpectralResult> {
    check_same_shape(x, y)?;
    let (n, big_n) = x.dim();
    if n > big_n {
        return Err(Error::Dimension(format!(
            "CCA needs n <= N, got n = {n}, N = {big_n}"
        )));
    }
    let gx = inverse_sqrt(to_nalgebra(&x.dot(&x.t())), "XXᵀ")?;
    let gy = inverse_sqrt(to_nalgebra(&y.dot(&y.t())), "YYᵀ")?;
    let cross = to_nalgebra(&x.dot(&y.t()));
    let m = &gx * cross * &gy;
    let mtm = m.transpose() * &m;
    let eig = SymmetricEigen::new(mtm.clone());
    let (idx, top) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty");
    let v = eig.eigenvectors.column(idx).into_owned();
    let residual = (&mtm * &v - &v * top).norm();
    Ok(SpectralResult {
        top_value: top.max(0.0).sqrt(),
        top_vector: v.iter().copied().collect(),
        iterations: 0,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::gaussian_matrix;
    use ndarray::arr2;

    #[test]
    fn identity_and_diagonal() {
        let i = Array2::<f64>::eye(5);
        let r = top_eigpair_sym(i.view(), 1e-12, 100).unwrap();
        assert!((r.top_value - 1.0).abs() < 1e-12);
        let d = arr2(&[[3.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let r = top_eigpair_sym(d.view(), 1e-10, 1000).unwrap();
        assert!((r.top_value - 3.0).abs() < 1e-10);
        assert!((r.top_vector[0].abs() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn plus_minus_pair_resolved() {
        let d = arr2(&[[2.0, 0.0, 0.0], [0.0, -2.0, 0.0], [0.0, 0.0, 0.5]]);
        let r = top_eigpair_sym(d.view(), 1e-10, 2000).unwrap();
        assert!((r.top_value.abs() - 2.0).abs() < 1e-9);
        assert!(r.residual <= 1e-10);
    }

    fn random_symmetric(n: usize, seed: u64) -> Array2<f64> {
        let g = gaussian_matrix(n, n, seed);
        (&g + &g.t()) / 2.0
    }

    /// Shifted inverse iteration with dense LU solves, an oracle independent
    /// of the power and Lanczos code paths.
    fn inverse_iteration(a: &Array2<f64>, shift: f64) -> f64 {
        let n = a.nrows();
        let m = to_nalgebra(a) - DMatrix::identity(n, n) * shift;
        let lu = m.lu();
        let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
        for _ in 0..100 {
            let w = lu.solve(&v).expect("nonsingular shift");
            v = &w / w.norm();
        }
        let av = to_nalgebra(a) * &v;
        v.dot(&av)
    }

    #[test]
    fn random_symmetric_matches_oracle() {
        let a = random_symmetric(50, 7);
        let r = top_eigpair_sym(a.view(), 1e-8, 200_000).unwrap();
        assert!(r.residual <= 1e-8);
        let oracle = inverse_iteration(&a, r.top_value + 1e-3);
        assert!(
            (oracle - r.top_value).abs() < 1e-8,
            "{oracle} {}",
            r.top_value
        );
        let all = SymmetricEigen::new(to_nalgebra(&a)).eigenvalues;
        let dominant = all.iter().copied().map(f64::abs).fold(0.0, f64::max);
        assert!((r.top_value.abs() - dominant).abs() < 1e-8);
    }

    #[test]
    fn lanczos_matches_dense_eigen() {
        let a = random_symmetric(120, 3);
        let top = SymmetricEigen::new(to_nalgebra(&a)).eigenvalues.max();
        let op = dense_op(a.view());
        let r = lanczos_top(120, op, 1e-10, 120, 1).unwrap();
        assert!((r.top_value - top).abs() < 1e-8);
    }

    #[test]
    fn convergence_error_carries_best_iterate() {
        let d = arr2(&[[1.0, 0.0], [0.0, 0.999_999]]);
        match top_eigpair_sym(d.view(), 1e-15, 3) {
            Err(Error::Convergence { best }) => assert!(best.residual.is_finite()),
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn bbp_predictions() {
        assert_eq!(bbp_wigner_predict(2.0), 2.5);
        assert_eq!(bbp_wigner_predict(1.0), 2.0);
        let (bulk, spike) = bbp_wishart_predict(1.0, 0.25);
        assert!((bulk - 2.25).abs() < 1e-15);
        assert!((spike - 2.5).abs() < 1e-15);
    }

    #[test]
    fn pls_threshold_examples() {
        assert!((pls_threshold(1.0, 1.0, 0.0) - 1.0).abs() < 1e-9);
        assert_eq!(pls_threshold(0.0, 0.0, 0.5), f64::INFINITY);
        // μ = 0 factors the polynomial as (1 + X)(1 − λ²X).
        assert!((pls_threshold(1.5, 0.0, 0.5) - 1.0 / 2.25).abs() < 1e-9);
        let mut state = 5u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..300 {
            let (l, m, r) = (0.2 + 2.0 * next(), 0.2 + 2.0 * next(), next());
            let (l2, m2, r2) = (l * l, m * m, r * r);
            let c = [
                1.0,
                1.0 - r2 * l2 * m2 - l2 - m2,
                l2 * m2 - l2 - m2,
                l2 * m2,
            ];
            let companion = DMatrix::from_row_slice(
                3,
                3,
                &[
                    0.0,
                    0.0,
                    -c[0] / c[3],
                    1.0,
                    0.0,
                    -c[1] / c[3],
                    0.0,
                    1.0,
                    -c[2] / c[3],
                ],
            );
            let oracle = companion
                .complex_eigenvalues()
                .iter()
                .filter(|z| z.im.abs() < 1e-7 && z.re >= 0.0)
                .map(|z| z.re)
                .fold(f64::NEG_INFINITY, f64::max);
            let tau = pls_threshold(l, m, r);
            if oracle.is_finite() {
                assert!(
                    (tau - oracle).abs() < 1e-6 * oracle.max(1.0),
                    "{l} {m} {r}: {tau} vs {oracle}"
                );
            } else {
                assert_eq!(tau, f64::INFINITY);
            }
        }
    }

    #[test]
    fn cca_condition_examples() {
        assert!((cca_condition_value(1.0, 1.0, 1.0, 0.25) - 0.75).abs() < 1e-15);
        assert!(!cca_condition(1.0, 1.0, 1.0, 0.25));
        assert_eq!(cca_condition_value(2.0, 2.0, 0.0, 0.25), 0.0);
    }

    #[test]
    fn cca_of_identical_data_is_one() {
        let x = gaussian_matrix(10, 40, 2);
        let r = cca_stat(x.view(), x.view()).unwrap();
        assert!((r.top_value - 1.0).abs() < 1e-8);
        let y = gaussian_matrix(10, 40, 3);
        let r = cca_stat(x.view(), y.view()).unwrap();
        assert!(r.top_value >= 0.0 && r.top_value <= 1.0 + 1e-8);
        assert!(cca_stat(
            gaussian_matrix(5, 3, 1).view(),
            gaussian_matrix(5, 3, 2).view()
        )
        .is_err());
        let zero = Array2::<f64>::zeros((3, 6));
        assert!(matches!(
            cca_stat(zero.view(), x.slice(ndarray::s![0..3, 0..6])),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn pls_is_symmetric_in_arguments() {
        let x = gaussian_matrix(20, 30, 4);
        let y = gaussian_matrix(20, 30, 5);
        let a = pls_stat(x.view(), y.view()).unwrap();
        let b = pls_stat(y.view(), x.view()).unwrap();
        assert!((a.top_value - b.top_value).abs() < 1e-8 * a.top_value);
        let dense = SymmetricEigen::new(to_nalgebra(&x.dot(&y.t()).dot(&y.dot(&x.t()))))
            .eigenvalues
            .max()
            .sqrt();
        assert!((a.top_value - dense).abs() < 1e-8 * dense);
    }
}
