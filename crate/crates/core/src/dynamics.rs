//! Channel iteration: the idempotent map sitting in the limit points of the
//! powers, the decay of `||phi^k - phi^k ∘ psi||`, and the resulting upper
//! bound on the distance from the iterates to the entanglement-breaking set.
//!
//! All convergence numbers use the Frobenius norm on transfer matrices.

use crate::channel::{Channel, ChannelError};
use crate::classify::is_ppt;
use crate::matcore::{eig_general, herm_eig, inverse, Complex64, ComplexMatrix, MatError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("phi(I) is not a scalar multiple of the identity (deviation {deviation:.3e}); normalization by scaling is impossible")]
    NotScalarUnital { deviation: f64 },
    #[error("phi is neither unital nor trace preserving within {tol:.1e}; the iteration hypothesis fails")]
    NotNormalized { tol: f64 },
    #[error("no idempotent could be extracted: spectral projection and Cesàro refinement both exceeded {limit:.1e} idempotency error")]
    DefectivePeripheralSpectrum { limit: f64 },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Mat(#[from] MatError),
}

/// Peripheral eigenvalue band: |lambda| >= 1 - tol counts as peripheral.
pub const PERIPHERAL_TOL: f64 = 1e-6;
/// Required idempotency quality for the extracted projection.
const IDEMPOTENCY_LIMIT: f64 = 1e-7;

/// Rescale `phi` so it becomes unital: requires `phi(I) = c I` with c > 0.
pub fn normalize_channel(phi: &Channel) -> Result<Channel, DynamicsError> {
    let p = phi.input_dim();
    if p != phi.output_dim() {
        return Err(DynamicsError::Channel(ChannelError::DimensionMismatch(
            "normalization requires p = q".into(),
        )));
    }
    let id = ComplexMatrix::identity(p);
    let image = phi.apply(&id)?;
    let c = image.trace().re / p as f64;
    let deviation = (&image - &id.scale_re(c)).frobenius_norm();
    if deviation > 1e-9 * (1.0 + image.frobenius_norm()) || c <= 0.0 {
        return Err(DynamicsError::NotScalarUnital { deviation });
    }
    if (c - 1.0).abs() < 1e-15 {
        return Ok(phi.clone());
    }
    Ok(phi.scale(1.0 / c))
}

/// Extract the idempotent limit point of the powers of `phi`: the spectral
/// projection of the transfer matrix onto eigenvalues of modulus at least
/// `1 - tol`, acting as the identity there and as zero on the complement.
///
/// Construction order: eigendecomposition (Hermitian fast path, then general
/// with a conditioning screen), then a power-ladder Cesàro fallback mirroring
/// the compactness argument. The result satisfies `psi ∘ psi = psi` and
/// commutes with `phi`, both within 1e-7 in Frobenius norm.
pub fn peripheral_idempotent(phi: &Channel, tol: f64) -> Result<Channel, DynamicsError> {
    debug_assert_eq!(phi.input_dim(), phi.output_dim());
    let t = phi.transfer();

    if let Some(projection) = spectral_projection(t, tol) {
        if projection_quality(t, &projection) <= IDEMPOTENCY_LIMIT {
            return wrap_projection(phi, projection);
        }
    }

    // Fallback: pick the power k* where phi^{2k} is closest to phi^k, then
    // Cesàro-average powers of phi^{k*} until the average is idempotent.
    let mut best_k = 1usize;
    let mut best_gap = f64::INFINITY;
    let mut power = t.clone();
    for k in 1..=64usize {
        let doubled = power.matmul(&power);
        let gap = (&doubled - &power).frobenius_norm();
        if gap < best_gap {
            best_gap = gap;
            best_k = k;
        }
        if k < 64 {
            power = power.matmul(t);
        }
    }
    let base = matrix_power(t, best_k);
    let mut sum = base.clone();
    let mut term = base.clone();
    for j in 2..=2048usize {
        term = term.matmul(&base);
        sum = &sum + &term;
        if j % 8 == 0 || j == 2048 {
            let avg = sum.scale_re(1.0 / j as f64);
            if (&avg.matmul(&avg) - &avg).frobenius_norm() <= IDEMPOTENCY_LIMIT {
                return wrap_projection(phi, avg);
            }
        }
    }
    Err(DynamicsError::DefectivePeripheralSpectrum {
        limit: IDEMPOTENCY_LIMIT,
    })
}

fn matrix_power(t: &ComplexMatrix, k: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::identity(t.rows());
    for _ in 0..k {
        out = out.matmul(t);
    }
    out
}

/// Spectral projection onto the peripheral eigenspace, or None when the
/// eigenvector basis is unavailable or too ill-conditioned.
fn spectral_projection(t: &ComplexMatrix, tol: f64) -> Option<ComplexMatrix> {
    let n = t.rows();
    // Hermitian transfer matrices (the whole gamma family) get the unitary
    // diagonalization: V inverse is V adjoint, no conditioning concerns.
    if t.is_hermitian(1e-12) {
        let eig = herm_eig(t).ok()?;
        let v = eig.vectors?;
        let d = ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j && eig.values[i].norm() >= 1.0 - tol {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        return Some(v.matmul(&d).matmul(&v.adjoint()));
    }
    let eig = eig_general(t).ok()?;
    let v = eig.vectors?;
    let vinv = inverse(&v).ok()?;
    let d = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j && eig.values[i].norm() >= 1.0 - tol {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Some(v.matmul(&d).matmul(&vinv))
}

/// max(idempotency error, commutation error) of a candidate projection.
fn projection_quality(t: &ComplexMatrix, p: &ComplexMatrix) -> f64 {
    let idem = (&p.matmul(p) - p).frobenius_norm();
    let comm = (&t.matmul(p) - &p.matmul(t)).frobenius_norm();
    idem.max(comm)
}

fn wrap_projection(phi: &Channel, projection: ComplexMatrix) -> Result<Channel, DynamicsError> {
    Ok(Channel::from_transfer(
        phi.input_dim(),
        phi.output_dim(),
        projection,
        format!("peripheral({})", phi.label()),
    )?)
}

/// Iteration trace: distances `||phi^k - phi^k ∘ psi||_F` on transfer
/// matrices, the fitted decay rate, and the verdicts for psi that decide
/// whether the distances bound the distance to the entanglement-breaking set.
#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub k_values: Vec<usize>,
    pub distances: Vec<f64>,
    /// exp(slope) of the least-squares log-linear fit over the tail half.
    pub fitted_rate: f64,
    pub psi: Channel,
    pub psi_idempotency_error: f64,
    pub psi_is_ppt: bool,
    /// True when the analysis ran on the adjoint because phi was trace
    /// preserving but not unital.
    pub adjoint_side: bool,
}

impl IterationTrace {
    /// The distances bound `d(phi^k, EB)` only when psi is PPT (hence
    /// entanglement breaking as an idempotent PPT limit point).
    pub fn is_eb_distance_bound(&self) -> bool {
        self.psi_is_ppt
    }
}

/// Compute the convergence trace for `k = 1..=max_k`.
///
/// `phi` must already be unital or trace preserving. A trace-preserving but
/// non-unital map is analyzed through its adjoint (an isometry in Frobenius
/// norm), flagged in the result.
pub fn convergence_report(phi: &Channel, max_k: usize) -> Result<IterationTrace, DynamicsError> {
    assert!(max_k >= 2, "need at least two iterates to fit a rate");
    let p = phi.input_dim();
    let id = ComplexMatrix::identity(p);
    let tol = 1e-9;
    let unital = phi
        .apply(&id)
        .map(|m| (&m - &id).frobenius_norm() <= tol)
        .unwrap_or(false);
    let adjoint = phi.adjoint();
    let trace_preserving = adjoint
        .apply(&id)
        .map(|m| (&m - &id).frobenius_norm() <= tol)
        .unwrap_or(false);
    if !unital && !trace_preserving {
        return Err(DynamicsError::NotNormalized { tol });
    }
    let (subject, adjoint_side) = if unital {
        (phi.clone(), false)
    } else {
        (adjoint, true)
    };

    let psi = peripheral_idempotent(&subject, PERIPHERAL_TOL)?;
    let t = subject.transfer();
    let t_psi = psi.transfer();
    let n = t.rows();
    let complement = &ComplexMatrix::identity(n) - t_psi;

    // T^k (I - P) = (T (I - P))^k because P is idempotent and commutes with
    // T; powering the contracted factor keeps the relative accuracy of the
    // decaying distances instead of losing them under the peripheral part.
    let decaying = t.matmul(&complement);
    let mut k_values = Vec::with_capacity(max_k);
    let mut distances = Vec::with_capacity(max_k);
    let mut power = decaying.clone();
    for k in 1..=max_k {
        if k > 1 {
            power = power.matmul(&decaying);
        }
        k_values.push(k);
        distances.push(power.frobenius_norm());
    }

    let fitted_rate = fit_tail_rate(&k_values, &distances);
    let psi_idempotency_error = (&t_psi.matmul(t_psi) - t_psi).frobenius_norm();
    let (psi_is_ppt, _) = is_ppt(&psi, 1e-9);

    Ok(IterationTrace {
        k_values,
        distances,
        fitted_rate,
        psi,
        psi_idempotency_error,
        psi_is_ppt,
        adjoint_side,
    })
}

/// Least-squares slope of log(distance) over the tail half; zero when the
/// tail has already hit exact zero.
fn fit_tail_rate(k_values: &[usize], distances: &[f64]) -> f64 {
    let start = k_values.len() / 2;
    let pts: Vec<(f64, f64)> = k_values[start..]
        .iter()
        .zip(&distances[start..])
        .filter(|(_, &d)| d > 1e-300)
        .map(|(&k, &d)| (k as f64, d.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|(x, _)| x).sum();
    let sy: f64 = pts.iter().map(|(_, y)| y).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    slope.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{compose, kron, make_delta, make_gamma, make_schur, Channel};
    use crate::graphs::generators;

    fn k2() -> ComplexMatrix {
        generators::complete(2).adjacency_matrix()
    }

    fn unitary_conjugation_3cycle() -> Channel {
        let mut perm = ComplexMatrix::zeros(3, 3);
        perm[(1, 0)] = Complex64::new(1.0, 0.0);
        perm[(2, 1)] = Complex64::new(1.0, 0.0);
        perm[(0, 2)] = Complex64::new(1.0, 0.0);
        // vec(P X P†) = (conj(P) ⊗ P) vec(X) in the column-major convention.
        let t = kron(&perm.conj(), &perm);
        Channel::from_transfer(3, 3, t, "conj(3-cycle)").unwrap()
    }

    #[test]
    fn normalize_gamma() {
        let g = make_gamma(4.0, &k2()).unwrap();
        let n = normalize_channel(&g).unwrap();
        let props = crate::channel::channel_props(&n, 1e-9);
        assert_eq!(props, (true, true, true));
        assert!(n.choi_distance(&g.scale(0.25)) < 1e-15);
    }

    #[test]
    fn normalize_delta_is_identity_operation() {
        let d = make_delta(3);
        let n = normalize_channel(&d).unwrap();
        assert!(n.choi_distance(&d) == 0.0);
    }

    #[test]
    fn normalize_rejects_schur_alone() {
        let s = make_schur(&k2()).unwrap();
        assert!(matches!(
            normalize_channel(&s),
            Err(DynamicsError::NotScalarUnital { .. })
        ));
    }

    #[test]
    fn peripheral_idempotent_of_gamma_is_delta() {
        for (t, a) in [
            (4.0, k2()),
            (20.0, generators::petersen().adjacency_matrix()),
        ] {
            let phi = normalize_channel(&make_gamma(t, &a).unwrap()).unwrap();
            let psi = peripheral_idempotent(&phi, PERIPHERAL_TOL).unwrap();
            let delta = make_delta(a.rows());
            assert!(psi.choi_distance(&delta) < 1e-8);
        }
    }

    #[test]
    fn peripheral_idempotent_of_unitary_conjugation() {
        let phi = unitary_conjugation_3cycle();
        let psi = peripheral_idempotent(&phi, PERIPHERAL_TOL).unwrap();
        // Every eigenvalue is peripheral, so psi is the identity map; it is
        // idempotent and phi^{3k} -> psi.
        let t_psi = psi.transfer();
        assert!((&t_psi.matmul(t_psi) - t_psi).frobenius_norm() <= 1e-7);
        assert!(t_psi.max_abs_diff(&ComplexMatrix::identity(9)) < 1e-8);
        let cubed = compose(&phi, &compose(&phi, &phi).unwrap()).unwrap();
        assert!(cubed.transfer().max_abs_diff(t_psi) < 1e-8);
    }

    #[test]
    fn peripheral_idempotent_of_delta_is_delta() {
        let d = make_delta(4);
        let psi = peripheral_idempotent(&d, PERIPHERAL_TOL).unwrap();
        assert!(psi.choi_distance(&d) < 1e-10);
    }

    #[test]
    fn psi_commutes_with_phi() {
        let phi =
            normalize_channel(&make_gamma(5.0, &generators::cycle(5).adjacency_matrix()).unwrap())
                .unwrap();
        let psi = peripheral_idempotent(&phi, PERIPHERAL_TOL).unwrap();
        let lhs = compose(&phi, &psi).unwrap();
        let rhs = compose(&psi, &phi).unwrap();
        assert!((lhs.transfer() - rhs.transfer()).frobenius_norm() <= 1e-7);
    }

    #[test]
    fn convergence_gamma_k2_closed_form() {
        let phi = normalize_channel(&make_gamma(4.0, &k2()).unwrap()).unwrap();
        let trace = convergence_report(&phi, 25).unwrap();
        for (idx, &k) in trace.k_values.iter().enumerate() {
            let expected = 4f64.powi(-(k as i32)) * 2f64.sqrt();
            let got = trace.distances[idx];
            assert!(
                (got - expected).abs() <= 1e-10,
                "k={k}: {got} vs {expected}"
            );
            assert!(
                (got - expected).abs() <= 1e-6 * expected,
                "k={k}: {got} vs {expected} (relative)"
            );
        }
        assert!((trace.fitted_rate - 0.25).abs() < 1e-3);
        assert!(trace.psi_idempotency_error <= 1e-10);
        assert!(trace.psi_is_ppt);
        assert!(!trace.adjoint_side);
        assert!(trace.is_eb_distance_bound());
        assert!(trace.psi.choi_distance(&make_delta(2)) < 1e-8);
    }

    #[test]
    fn convergence_delta_all_zero() {
        let trace = convergence_report(&make_delta(3), 10).unwrap();
        // delta is already its own idempotent limit; distances are zero up to
        // the projection roundoff.
        assert!(trace.distances.iter().all(|&d| d <= 1e-14));
        assert!(trace.fitted_rate <= 1e-6);
    }

    #[test]
    fn convergence_petersen_rate() {
        let a = generators::petersen().adjacency_matrix();
        let phi = normalize_channel(&make_gamma(20.0, &a).unwrap()).unwrap();
        let trace = convergence_report(&phi, 12).unwrap();
        assert!((trace.fitted_rate - 0.05).abs() < 1e-3);
        assert!(trace.psi_is_ppt);
    }

    #[test]
    fn convergence_rejects_unnormalized() {
        let g = make_gamma(4.0, &k2()).unwrap();
        assert!(matches!(
            convergence_report(&g, 5),
            Err(DynamicsError::NotNormalized { .. })
        ));
    }

    #[test]
    fn trace_preserving_non_unital_runs_on_the_adjoint() {
        // Amplitude-damping style channel: trace preserving, not unital.
        let g: f64 = 0.3;
        let k1 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, (1.0 - g).sqrt()]);
        let mut k2 = ComplexMatrix::zeros(2, 2);
        k2[(0, 1)] = Complex64::new(g.sqrt(), 0.0);
        let t = &kron(&k1.conj(), &k1) + &kron(&k2.conj(), &k2);
        let phi = Channel::from_transfer(2, 2, t, "damping").unwrap();

        let id = ComplexMatrix::identity(2);
        assert!((&phi.apply(&id).unwrap() - &id).frobenius_norm() > 1e-3);

        // The subdominant mode (1-g)^k pollutes short fits; a longer horizon
        // isolates the dominant rate sqrt(1-g).
        let trace = convergence_report(&phi, 60).unwrap();
        assert!(trace.adjoint_side);
        assert!(trace.psi_idempotency_error <= 1e-7);
        assert!((trace.fitted_rate - (1.0 - g).sqrt()).abs() < 1e-3);
    }

    #[test]
    fn tail_decay_is_submultiplicative() {
        let a = generators::cycle(5).adjacency_matrix();
        let phi = normalize_channel(&make_gamma(9.0, &a).unwrap()).unwrap();
        let trace = convergence_report(&phi, 20).unwrap();
        // Largest non-peripheral eigenvalue modulus of the transfer: 1/9.
        let rho = 1.0 / 9.0 + 1e-6;
        for w in trace.distances.windows(2).skip(3) {
            assert!(w[1] <= rho * w[0] + 1e-14);
        }
    }
}
