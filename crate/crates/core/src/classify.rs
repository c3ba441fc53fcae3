//! CP / PPT / positivity classification of channels, and the full threshold
//! report for the graph family `gamma_{t,A}`.
//!
//! The closed forms driving everything: `t_cp = t_ppt = -p * lambda_min(A)`
//! for nonempty graphs, `t_eb <= p*d`, and the positivity lower bound
//! `t_pos >= max{1, -lambda_min, -p*lambda_min/|E|, -p*lambda_min/(p*d),
//! lambda_max/(theta_bar - 1)}` with |E| counting ordered pairs.

use crate::channel::{check_adjacency, compose, make_gamma, Channel, ChannelError};
use crate::ebcert::{build_certificate, verify_certificate, CertError};
use crate::graphs::{graph_report, lovasz_theta_bar, Graph, GraphError};
use crate::matcore::{herm_eig, herm_eig_values, partial_transpose, Complex64, ComplexMatrix};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("gamma_{{t,A}} with t = {t} is not PPT for this graph (t_ppt = {t_ppt}); the hypothesis fails")]
    NotPpt { t: f64, t_ppt: f64 },
    #[error("the zero adjacency matrix has no positivity threshold to estimate")]
    EmptyGraph,
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Cert(#[from] CertError),
    #[error(transparent)]
    Mat(#[from] crate::matcore::MatError),
}

/// Is the channel completely positive: is its Choi matrix PSD?
///
/// Returns the verdict and the least eigenvalue of the Hermitian part of the
/// Choi matrix; a non-Hermitian Choi matrix is never PSD.
pub fn is_cp(phi: &Channel, tol: f64) -> (bool, f64) {
    let choi = phi.choi();
    let hermitian = choi.is_hermitian(1e-12);
    let h = choi.hermitian_part();
    let min_eig = herm_eig_values(&h).expect("Hermitian part eigensolve")[0];
    let verdict = hermitian && min_eig >= -tol * (1.0 + h.frobenius_norm());
    (verdict, min_eig)
}

/// Is the channel PPT: CP, and still CP after composing with the transpose?
/// Equivalently the partial transpose of the Choi matrix is also PSD.
///
/// Returns the verdict and the least eigenvalue of the partially transposed
/// Choi matrix.
pub fn is_ppt(phi: &Channel, tol: f64) -> (bool, f64) {
    let (cp, _) = is_cp(phi, tol);
    let pt = partial_transpose(phi.choi(), phi.input_dim(), phi.output_dim())
        .expect("Choi shape is checked at channel construction");
    let h = pt.hermitian_part();
    let min_eig = herm_eig_values(&h).expect("Hermitian part eigensolve")[0];
    let pt_ok = pt.is_hermitian(1e-12) && min_eig >= -tol * (1.0 + h.frobenius_norm());
    (cp && pt_ok, min_eig)
}

/// Classification of a Schur multiplier `S_P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SchurVerdict {
    /// P is not PSD, so the map is not even CP.
    NotCp,
    /// P is PSD with off-diagonal mass, so the map is CP but not PPT.
    CpNotPpt,
    /// P is PSD and diagonal: the map is PPT.
    Ppt,
}

/// Structural PPT classification of `S_P`: PPT exactly when P is PSD and
/// diagonal. Thresholds mirror [`is_ppt`] on the induced channel, so the two
/// routes agree on every input.
pub fn schur_ppt_classify(pattern: &ComplexMatrix, tol: f64) -> SchurVerdict {
    let hermitian = pattern.is_hermitian(1e-12);
    let h = pattern.hermitian_part();
    let min_eig = herm_eig_values(&h).expect("Hermitian part eigensolve")[0];
    let scale = 1.0 + pattern.frobenius_norm();
    if !hermitian || min_eig < -tol * scale {
        return SchurVerdict::NotCp;
    }
    let mut off = 0.0f64;
    for i in 0..pattern.rows() {
        for j in 0..pattern.cols() {
            if i != j {
                off = off.max(pattern[(i, j)].norm());
            }
        }
    }
    if off <= tol * scale {
        SchurVerdict::Ppt
    } else {
        SchurVerdict::CpNotPpt
    }
}

/// Options for [`t_pos_estimate`].
#[derive(Debug, Clone)]
pub struct TPosOptions {
    pub restarts: usize,
    pub iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for TPosOptions {
    fn default() -> Self {
        Self {
            restarts: 64,
            iters: 500,
            tol: 1e-12,
            seed: 0,
        }
    }
}

/// Certified lower bound on the positivity threshold `t_pos`, with witness.
///
/// Minimizes `f(v) = lambda_min(A ∘ v v*)` over complex unit vectors by
/// multi-start projected gradient descent with step halving; the estimate is
/// `-p * f(best)`. Any witness `v` proves gamma_t is not positive for
/// `t < -p * f(v)`, so the returned value never overshoots `t_pos`.
pub fn t_pos_estimate(
    a: &ComplexMatrix,
    opts: &TPosOptions,
) -> Result<(f64, Vec<Complex64>), ClassifyError> {
    check_adjacency(a)?;
    let p = a.rows();
    if a.max_abs() == 0.0 {
        return Err(ClassifyError::EmptyGraph);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best_f = f64::INFINITY;
    let mut best_v: Vec<Complex64> = Vec::new();

    let objective = |v: &[Complex64]| -> (f64, Vec<Complex64>) {
        let m = ComplexMatrix::from_fn(p, p, |i, j| a[(i, j)] * v[i] * v[j].conj());
        let eig = herm_eig(&m).expect("Hermitian by construction");
        let u = eig
            .vectors
            .as_ref()
            .map(|w| w.column(0))
            .unwrap_or_default();
        (eig.values[0].re, u)
    };

    for _ in 0..opts.restarts {
        let mut v: Vec<Complex64> = (0..p)
            .map(|_| {
                Complex64::new(
                    rng.sample::<f64, _>(rand::distributions::Standard) - 0.5,
                    rng.sample::<f64, _>(rand::distributions::Standard) - 0.5,
                )
            })
            .collect();
        normalize(&mut v);
        let (mut f, mut u) = objective(&v);
        let mut step = 0.5f64;

        for _ in 0..opts.iters {
            // Wirtinger gradient of u†(A ∘ vv*)u in v̄: g_k = u_k (A w)_k
            // with w = conj(u) ∘ v.
            let w: Vec<Complex64> = (0..p).map(|k| u[k].conj() * v[k]).collect();
            let aw = a.matvec(&w);
            let g: Vec<Complex64> = (0..p).map(|k| u[k] * aw[k]).collect();
            let gnorm: f64 = g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if gnorm < 1e-14 {
                break;
            }
            let mut improved = false;
            while step > opts.tol {
                let mut trial: Vec<Complex64> =
                    (0..p).map(|k| v[k] - g[k] * (step / gnorm)).collect();
                normalize(&mut trial);
                let (ft, ut) = objective(&trial);
                if ft < f - 1e-15 {
                    v = trial;
                    f = ft;
                    u = ut;
                    step *= 1.5;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if f < best_f {
            best_f = f;
            best_v = v;
        }
    }
    Ok((-(p as f64) * best_f, best_v))
}

fn normalize(v: &mut [Complex64]) {
    let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    } else {
        v[0] = Complex64::new(1.0, 0.0);
    }
}

/// The five positivity lower-bound components. The theta component is absent
/// when `theta_bar = 1` would divide by zero (empty graph).
#[derive(Debug, Clone, Serialize)]
pub struct TPosLowerComponents {
    pub one: f64,
    pub neg_lambda_min: f64,
    pub per_ordered_edge: f64,
    pub per_eb_upper: f64,
    pub theta: Option<f64>,
}

impl TPosLowerComponents {
    pub fn max(&self) -> f64 {
        [
            self.one,
            self.neg_lambda_min,
            self.per_ordered_edge,
            self.per_eb_upper,
        ]
        .into_iter()
        .chain(self.theta)
        .fold(0.0, f64::max)
    }
}

/// Every threshold and bound for one graph.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    pub p: usize,
    /// Edge count over ordered pairs: both (i,j) and (j,i).
    pub ordered_edge_count: usize,
    pub max_degree: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub t_cp: f64,
    pub t_ppt: f64,
    pub t_eb_upper: f64,
    pub t_pos_lower_components: TPosLowerComponents,
    pub t_pos_lower: f64,
    pub t_pos_numeric: f64,
    pub theta_bar: f64,
    pub ppt_squared_ok: bool,
    /// Which edge-count convention the component bounds use.
    pub edge_convention: &'static str,
}

/// Options for [`thresholds`].
#[derive(Debug, Clone)]
pub struct ThresholdOptions {
    pub theta_iters: usize,
    pub theta_tol: f64,
    pub tpos: TPosOptions,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self {
            theta_iters: 20_000,
            theta_tol: 1e-7,
            tpos: TPosOptions::default(),
        }
    }
}

/// Compute the full threshold report for a graph. For the empty graph every
/// threshold is 0 by convention (`gamma_t = t*delta` is already entanglement
/// breaking for all t >= 0).
pub fn thresholds(g: &Graph, opts: &ThresholdOptions) -> Result<ThresholdReport, ClassifyError> {
    let p = g.vertex_count();
    let report = graph_report(g)?;
    let theta = match lovasz_theta_bar(g, opts.theta_iters, opts.theta_tol) {
        Ok(sol) => sol,
        // A stalled solve still carries a feasible H, hence a valid upper
        // bound; use it rather than failing the whole report.
        Err(GraphError::NoProgress { best, .. }) => *best,
        Err(e) => return Err(e.into()),
    };

    if g.is_empty_graph() {
        return Ok(ThresholdReport {
            p,
            ordered_edge_count: 0,
            max_degree: 0,
            lambda_min: 0.0,
            lambda_max: 0.0,
            t_cp: 0.0,
            t_ppt: 0.0,
            t_eb_upper: 0.0,
            t_pos_lower_components: TPosLowerComponents {
                one: 0.0,
                neg_lambda_min: 0.0,
                per_ordered_edge: 0.0,
                per_eb_upper: 0.0,
                theta: None,
            },
            t_pos_lower: 0.0,
            t_pos_numeric: 0.0,
            theta_bar: theta.value,
            ppt_squared_ok: true,
            edge_convention: "ordered",
        });
    }

    let t_cp = -(p as f64) * report.lambda_min;
    let t_eb_upper = (p * report.max_degree) as f64;
    let components = TPosLowerComponents {
        one: 1.0,
        neg_lambda_min: -report.lambda_min,
        per_ordered_edge: t_cp / report.ordered_edge_count as f64,
        per_eb_upper: t_cp / t_eb_upper,
        theta: (theta.value > 1.0 + 1e-9).then(|| report.lambda_max / (theta.value - 1.0)),
    };
    let (t_pos_numeric, _witness) = t_pos_estimate(&g.adjacency_matrix(), &opts.tpos)?;

    Ok(ThresholdReport {
        p,
        ordered_edge_count: report.ordered_edge_count,
        max_degree: report.max_degree,
        lambda_min: report.lambda_min,
        lambda_max: report.lambda_max,
        t_cp,
        t_ppt: t_cp,
        t_eb_upper,
        t_pos_lower: components.max(),
        t_pos_lower_components: components,
        t_pos_numeric,
        theta_bar: theta.value,
        ppt_squared_ok: t_eb_upper <= t_cp * t_cp,
        edge_convention: "ordered",
    })
}

/// The PPT threshold `-p * lambda_min(A)` (0 for the empty graph).
pub fn t_ppt_of_adjacency(a: &ComplexMatrix) -> Result<f64, ClassifyError> {
    check_adjacency(a)?;
    if a.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let values = herm_eig_values(a)?;
    Ok(-(a.rows() as f64) * values[0])
}

/// Check the PPT-squared behaviour of a concrete pair: compose
/// `gamma_{t1,A}` with `gamma_{t2,B}` (both required to be PPT), confirm the
/// composition is `gamma_{t1*t2, A∘B}`, and certify that it is entanglement
/// breaking — by inspection when `A∘B = 0` (the map is `t1 t2 * delta`), and
/// otherwise through `t1*t2 >= p*d(A∘B)` backed by an exact certificate at
/// the `p*d` level.
pub fn ppt2_verify(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    t1: f64,
    t2: f64,
) -> Result<(bool, bool), ClassifyError> {
    check_adjacency(a)?;
    check_adjacency(b)?;
    let slack = 1e-9;
    let t_ppt_a = t_ppt_of_adjacency(a)?;
    let t_ppt_b = t_ppt_of_adjacency(b)?;
    if t1 < t_ppt_a - slack {
        return Err(ClassifyError::NotPpt {
            t: t1,
            t_ppt: t_ppt_a,
        });
    }
    if t2 < t_ppt_b - slack {
        return Err(ClassifyError::NotPpt {
            t: t2,
            t_ppt: t_ppt_b,
        });
    }

    let p = a.rows();
    let ab = ComplexMatrix::from_fn(p, p, |i, j| a[(i, j)] * b[(i, j)]);
    let composed = compose(&make_gamma(t1, a)?, &make_gamma(t2, b)?)?;
    let target = make_gamma(t1 * t2, &ab)?;
    let composition_is_gamma = composed.choi_distance(&target) <= 1e-10;

    let eb_certified = if ab.max_abs() == 0.0 {
        // Composition is X -> t1 t2 tr(X) I: entanglement breaking by
        // inspection for any nonnegative scale.
        true
    } else {
        let degrees: Vec<usize> = (0..p)
            .map(|i| (0..p).filter(|&j| ab[(i, j)].re == 1.0).count())
            .collect();
        let d = degrees.into_iter().max().unwrap_or(0);
        let threshold_ok = t1 * t2 + slack >= (p * d) as f64;
        let cert_ok = build_certificate(&ab)
            .and_then(|cert| verify_certificate(&cert, &ab))
            .is_ok();
        threshold_ok && cert_ok
    };
    Ok((composition_is_gamma, eb_certified))
}

pub use crate::channel::schur_transpose_choi;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{make_delta, make_schur};
    use crate::graphs::generators;

    fn k2() -> ComplexMatrix {
        generators::complete(2).adjacency_matrix()
    }

    #[test]
    fn is_cp_examples() {
        let d = make_delta(3);
        let (ok, min_eig) = is_cp(&d, 1e-9);
        assert!(ok);
        assert!((min_eig - 1.0 / 3.0).abs() < 1e-12);

        let g1 = make_gamma(1.0, &k2()).unwrap();
        let (ok, min_eig) = is_cp(&g1, 1e-9);
        assert!(!ok);
        assert!((min_eig + 0.5).abs() < 1e-9);

        let g2 = make_gamma(2.0, &k2()).unwrap();
        let (ok, min_eig) = is_cp(&g2, 1e-9);
        assert!(ok);
        assert!(min_eig.abs() < 1e-9);
    }

    #[test]
    fn is_ppt_examples() {
        // S_J for the 2x2 all-ones pattern: CP (J is PSD) but not PPT.
        let ones = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let s = make_schur(&ones).unwrap();
        let (cp, _) = is_cp(&s, 1e-9);
        assert!(cp);
        let (ppt, _) = is_ppt(&s, 1e-9);
        assert!(!ppt);

        // Nonnegative diagonal pattern: PPT.
        let diag = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let (ppt, _) = is_ppt(&make_schur(&diag).unwrap(), 1e-9);
        assert!(ppt);
    }

    #[test]
    fn is_ppt_petersen_boundary() {
        let a = generators::petersen().adjacency_matrix();
        let at_boundary = make_gamma(20.0, &a).unwrap();
        let (ppt, _) = is_ppt(&at_boundary, 1e-9);
        assert!(ppt);
        let below = make_gamma(19.9, &a).unwrap();
        let (ppt, _) = is_ppt(&below, 1e-9);
        assert!(!ppt);
    }

    #[test]
    fn schur_verdicts() {
        let ones = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(schur_ppt_classify(&ones, 1e-9), SchurVerdict::CpNotPpt);

        assert_eq!(
            schur_ppt_classify(&ComplexMatrix::zeros(3, 3), 1e-9),
            SchurVerdict::Ppt
        );

        let indef = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert_eq!(schur_ppt_classify(&indef, 1e-9), SchurVerdict::NotCp);
    }

    #[test]
    fn schur_verdict_agrees_with_channel_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..40 {
            let n = 3;
            let b = ComplexMatrix::from_fn(n, n, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            // Mix PSD, diagonal, and indefinite inputs.
            let pattern = match rng.gen_range(0..3) {
                0 => b.adjoint().matmul(&b),
                1 => ComplexMatrix::from_fn(n, n, |i, j| {
                    if i == j {
                        Complex64::new(rng.gen_range(0.0..2.0), 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                }),
                _ => b.hermitian_part(),
            };
            let verdict = schur_ppt_classify(&pattern, 1e-9);
            let channel = make_schur(&pattern).unwrap();
            let (cp, _) = is_cp(&channel, 1e-9);
            let (ppt, _) = is_ppt(&channel, 1e-9);
            let expected = if !cp {
                SchurVerdict::NotCp
            } else if ppt {
                SchurVerdict::Ppt
            } else {
                SchurVerdict::CpNotPpt
            };
            assert_eq!(verdict, expected);
        }
    }

    #[test]
    fn thresholds_k2() {
        let r = thresholds(&generators::complete(2), &ThresholdOptions::default()).unwrap();
        assert!((r.t_cp - 2.0).abs() < 1e-9);
        assert!((r.t_ppt - 2.0).abs() < 1e-9);
        assert!((r.t_eb_upper - 2.0).abs() < 1e-12);
        assert_eq!(r.ordered_edge_count, 2);
        // theta_bar(K2) = 2, so all five components equal 1.
        assert!((r.theta_bar - 2.0).abs() < 1e-6);
        let c = &r.t_pos_lower_components;
        for component in [
            c.one,
            c.neg_lambda_min,
            c.per_ordered_edge,
            c.per_eb_upper,
            c.theta.unwrap(),
        ] {
            assert!((component - 1.0).abs() < 1e-6, "component {component}");
        }
        assert!((r.t_pos_lower - 1.0).abs() < 1e-6);
        assert!((r.t_pos_numeric - 1.0).abs() < 1e-4);
        assert!(r.ppt_squared_ok);
    }

    #[test]
    fn thresholds_c5() {
        let r = thresholds(&generators::cycle(5), &ThresholdOptions::default()).unwrap();
        let golden_ratio = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((r.t_cp - 5.0 * golden_ratio).abs() < 1e-9);
        assert!((r.t_eb_upper - 10.0).abs() < 1e-12);
        assert!((r.theta_bar - 5f64.sqrt()).abs() < 1e-3);
        assert!(r.t_pos_numeric >= r.t_pos_lower - 1e-6);
        assert!(r.t_pos_numeric <= r.t_cp + 1e-6);
    }

    #[test]
    fn thresholds_petersen() {
        let r = thresholds(
            &generators::petersen(),
            &ThresholdOptions {
                theta_iters: 4000,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((r.t_cp - 20.0).abs() < 1e-9);
        assert!((r.t_eb_upper - 30.0).abs() < 1e-12);
        assert!(r.ppt_squared_ok); // 400 >= 30
    }

    #[test]
    fn thresholds_empty_graph() {
        let r = thresholds(&generators::empty(3), &ThresholdOptions::default()).unwrap();
        assert_eq!(r.t_cp, 0.0);
        assert_eq!(r.t_ppt, 0.0);
        assert_eq!(r.t_eb_upper, 0.0);
        assert_eq!(r.t_pos_lower, 0.0);
        assert_eq!(r.t_pos_numeric, 0.0);
        assert!(r.ppt_squared_ok);
        assert!((r.theta_bar - 1.0).abs() < 1e-6);
        assert!(r.t_pos_lower_components.theta.is_none());
    }

    #[test]
    fn t_pos_estimate_k2() {
        let (estimate, witness) = t_pos_estimate(&k2(), &TPosOptions::default()).unwrap();
        assert!((estimate - 1.0).abs() < 1e-4);
        // Witness is balanced: |v1| = |v2| up to phase.
        assert!((witness[0].norm() - witness[1].norm()).abs() < 1e-3);
    }

    #[test]
    fn t_pos_estimate_k3_brackets_with_grid_oracle() {
        let a = generators::complete(3).adjacency_matrix();
        // Oracle: grid over real unit vectors in dimension 3 (spherical
        // angles), 10^6 samples.
        let n_theta = 1000;
        let n_phi = 1000;
        let mut oracle = f64::INFINITY;
        for it in 0..n_theta {
            let theta = std::f64::consts::PI * (it as f64 + 0.5) / n_theta as f64;
            for ip in 0..n_phi {
                let phi = 2.0 * std::f64::consts::PI * ip as f64 / n_phi as f64;
                let v = [
                    Complex64::new(theta.sin() * phi.cos(), 0.0),
                    Complex64::new(theta.sin() * phi.sin(), 0.0),
                    Complex64::new(theta.cos(), 0.0),
                ];
                let m = ComplexMatrix::from_fn(3, 3, |i, j| a[(i, j)] * v[i] * v[j].conj());
                let vals = herm_eig_values(&m).unwrap();
                oracle = oracle.min(vals[0]);
            }
        }
        let oracle_estimate = -3.0 * oracle;

        let (estimate, _) = t_pos_estimate(&a, &TPosOptions::default()).unwrap();
        // The optimizer roams complex vectors, so it must do at least as well
        // as the real grid, and stay inside [1, t_cp].
        assert!(
            estimate >= oracle_estimate - 1e-4,
            "estimate {estimate} vs oracle {oracle_estimate}"
        );
        assert!(estimate >= 1.0 - 1e-6);
        assert!(estimate <= 3.0 + 1e-6);
    }

    #[test]
    fn t_pos_estimate_star_brackets() {
        let g = generators::star(3);
        let r = thresholds(&g, &ThresholdOptions::default()).unwrap();
        // lambda_min(K_{1,3}) = -sqrt(3).
        assert!((r.lambda_min + 3f64.sqrt()).abs() < 1e-9);
        assert!((r.t_cp - 4.0 * 3f64.sqrt()).abs() < 1e-9);
        assert!(r.t_pos_numeric >= r.t_pos_lower - 1e-6);
        assert!(r.t_pos_numeric <= r.t_cp + 1e-6);
    }

    #[test]
    fn t_pos_estimate_rejects_empty() {
        assert!(matches!(
            t_pos_estimate(&ComplexMatrix::zeros(3, 3), &TPosOptions::default()),
            Err(ClassifyError::EmptyGraph)
        ));
    }

    #[test]
    fn ppt2_k2_pair() {
        let (is_gamma, eb) = ppt2_verify(&k2(), &k2(), 2.0, 2.0).unwrap();
        assert!(is_gamma);
        assert!(eb); // 4 >= t_eb_upper(K2) = 2, certificate checks out
    }

    #[test]
    fn ppt2_path_and_edge() {
        // A = path on 3 vertices, B = single edge {0,1} on 3 vertices.
        let a = generators::path(3).adjacency_matrix();
        let mut bg = crate::graphs::Graph::new(3);
        bg.add_edge(0, 1).unwrap();
        let b = bg.adjacency_matrix();
        let t1 = t_ppt_of_adjacency(&a).unwrap();
        let t2 = t_ppt_of_adjacency(&b).unwrap();
        assert!((t1 - 3.0 * 2f64.sqrt()).abs() < 1e-9); // lambda_min(P3) = -sqrt(2)
        assert!((t2 - 3.0).abs() < 1e-9);
        let (is_gamma, eb) = ppt2_verify(&a, &b, t1, t2).unwrap();
        assert!(is_gamma);
        assert!(eb); // t1 t2 = 9 sqrt(2) >= t_eb_upper(A∘B) = 3
    }

    #[test]
    fn ppt2_disjoint_edges_trace_branch() {
        let mut ga = crate::graphs::Graph::new(4);
        ga.add_edge(0, 1).unwrap();
        let mut gb = crate::graphs::Graph::new(4);
        gb.add_edge(2, 3).unwrap();
        let (is_gamma, eb) =
            ppt2_verify(&ga.adjacency_matrix(), &gb.adjacency_matrix(), 4.0, 4.0).unwrap();
        assert!(is_gamma);
        assert!(eb);
    }

    #[test]
    fn ppt2_rejects_non_ppt_inputs() {
        assert!(matches!(
            ppt2_verify(&k2(), &k2(), 1.0, 2.0),
            Err(ClassifyError::NotPpt { .. })
        ));
    }

    #[test]
    fn schur_transpose_spectrum_in_minus_one_zero_one() {
        for seed in 0..8 {
            let g = generators::random(7, 0.5, seed);
            if g.is_empty_graph() {
                continue;
            }
            let c = schur_transpose_choi(&g.adjacency_matrix()).unwrap();
            let vals = herm_eig_values(&c).unwrap();
            for v in vals {
                let near_set = [-1.0, 0.0, 1.0].iter().any(|s| (v - s).abs() < 1e-9);
                assert!(near_set, "eigenvalue {v} outside {{-1,0,1}}");
            }
            // Its square is a 0/1 diagonal matrix.
            let sq = c.matmul(&c);
            for i in 0..sq.rows() {
                for j in 0..sq.cols() {
                    if i == j {
                        let x = sq[(i, i)].re;
                        assert!((x.abs() < 1e-12) || ((x - 1.0).abs() < 1e-12));
                        assert!(sq[(i, i)].im.abs() < 1e-12);
                    } else {
                        assert!(sq[(i, j)].norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn cp_and_ppt_flip_at_same_threshold() {
        // Bisection on both verdicts over a handful of random graphs; the
        // broader sweep lives in the acceptance suite.
        for seed in [1u64, 5, 9] {
            let g = generators::random(6, 0.5, seed);
            if g.is_empty_graph() {
                continue;
            }
            let a = g.adjacency_matrix();
            let expected = t_ppt_of_adjacency(&a).unwrap();
            let flip_cp = bisect_flip(|t| is_cp(&make_gamma(t, &a).unwrap(), 1e-9).0, expected);
            let flip_ppt = bisect_flip(|t| is_ppt(&make_gamma(t, &a).unwrap(), 1e-9).0, expected);
            assert!((flip_cp - expected).abs() < 1e-6);
            assert!((flip_ppt - flip_cp).abs() < 1e-9 + 2e-6);
        }
    }

    fn bisect_flip(pred: impl Fn(f64) -> bool, hint: f64) -> f64 {
        let mut lo = 0.0;
        let mut hi = (2.0 * hint).max(1.0);
        assert!(
            !pred(lo * 0.0),
            "predicate must be false at 0 for nonempty graphs"
        );
        assert!(pred(hi));
        while hi - lo > 1e-7 {
            let mid = 0.5 * (lo + hi);
            if pred(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn threshold_chain_for_random_graphs() {
        for seed in 0..12 {
            let g = generators::random(2 + (seed as usize % 7), 0.5, 100 + seed);
            if g.is_empty_graph() {
                continue;
            }
            let r = thresholds(
                &g,
                &ThresholdOptions {
                    theta_iters: 2000,
                    tpos: TPosOptions {
                        restarts: 16,
                        iters: 200,
                        ..Default::default()
                    },
                    ..Default::default()
                },
            )
            .unwrap();
            let c = &r.t_pos_lower_components;
            for component in [c.one, c.neg_lambda_min, c.per_ordered_edge, c.per_eb_upper]
                .into_iter()
                .chain(c.theta)
            {
                assert!(component <= r.t_cp + 1e-9);
            }
            assert!(r.t_pos_numeric <= r.t_cp + 1e-6);
            assert!(r.t_cp <= r.t_eb_upper + 1e-9);
            assert!(r.ppt_squared_ok);
        }
    }
}
