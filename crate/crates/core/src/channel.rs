//! Linear maps on matrix spaces held by their Choi matrix, with the transfer
//! matrix (action on column-major vectorizations) derived on demand.
//!
//! The three maps everything else is built from live here: the normalized
//! trace map `delta(X) = tr(X) I_p`, the Schur multiplier `S_P(X) = P ∘ X`,
//! and the graph family `gamma_{t,A} = t*delta + S_A`.

use crate::matcore::{
    self, partial_transpose, unvec_col, vec_col, Complex64, ComplexMatrix, MatError,
};
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum ChannelError {
    #[error("adjacency matrix is invalid: {0}")]
    InvalidAdjacency(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Mat(#[from] MatError),
}

/// A linear map M_p -> M_q represented by its (pq)x(pq) Choi matrix
/// `C = sum_ij E_ij ⊗ phi(E_ij)`.
#[derive(Debug, Clone)]
pub struct Channel {
    p: usize,
    q: usize,
    choi: ComplexMatrix,
    label: String,
    transfer: OnceLock<ComplexMatrix>,
}

impl Channel {
    /// Wrap a Choi matrix. The only structural requirement is the shape.
    pub fn from_choi(
        p: usize,
        q: usize,
        choi: ComplexMatrix,
        label: impl Into<String>,
    ) -> Result<Self, ChannelError> {
        if choi.rows() != p * q || choi.cols() != p * q {
            return Err(ChannelError::DimensionMismatch(format!(
                "Choi matrix must be {n}x{n} for p={p}, q={q}, got {r}x{c}",
                n = p * q,
                r = choi.rows(),
                c = choi.cols()
            )));
        }
        Ok(Self {
            p,
            q,
            choi,
            label: label.into(),
            transfer: OnceLock::new(),
        })
    }

    /// Build a channel from its transfer matrix (q^2 x p^2).
    pub fn from_transfer(
        p: usize,
        q: usize,
        transfer: ComplexMatrix,
        label: impl Into<String>,
    ) -> Result<Self, ChannelError> {
        if transfer.rows() != q * q || transfer.cols() != p * p {
            return Err(ChannelError::DimensionMismatch(format!(
                "transfer matrix must be {}x{} for p={p}, q={q}, got {}x{}",
                q * q,
                p * p,
                transfer.rows(),
                transfer.cols()
            )));
        }
        let choi = reshuffle(&transfer, p, q)?;
        let ch = Self::from_choi(p, q, choi, label)?;
        let _ = ch.transfer.set(transfer);
        Ok(ch)
    }

    pub fn input_dim(&self) -> usize {
        self.p
    }

    pub fn output_dim(&self) -> usize {
        self.q
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Transfer matrix T with vec(phi(X)) = T vec(X); computed once, cached.
    pub fn transfer(&self) -> &ComplexMatrix {
        self.transfer.get_or_init(|| {
            reshuffle(&self.choi, self.p, self.q).expect("choi shape checked at construction")
        })
    }

    /// Apply the map to a p x p matrix.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix, ChannelError> {
        if x.rows() != self.p || x.cols() != self.p {
            return Err(ChannelError::DimensionMismatch(format!(
                "input must be {p}x{p}, got {}x{}",
                x.rows(),
                x.cols(),
                p = self.p
            )));
        }
        let out = self.transfer().matvec(&vec_col(x));
        Ok(unvec_col(&out, self.q, self.q))
    }

    /// The adjoint map with respect to the Frobenius inner product.
    pub fn adjoint(&self) -> Channel {
        let t = self.transfer().adjoint();
        Channel::from_transfer(self.q, self.p, t, format!("adjoint({})", self.label))
            .expect("adjoint shapes are consistent")
    }

    /// Scale by a real factor.
    pub fn scale(&self, factor: f64) -> Channel {
        let ch = Channel::from_choi(
            self.p,
            self.q,
            self.choi.scale_re(factor),
            format!("{}*{}", factor, self.label),
        )
        .expect("same shape");
        if let Some(t) = self.transfer.get() {
            let _ = ch.transfer.set(t.scale_re(factor));
        }
        ch
    }

    /// Entrywise distance between Choi matrices.
    pub fn choi_distance(&self, other: &Channel) -> f64 {
        self.choi.max_abs_diff(&other.choi)
    }
}

/// The normalized-trace map `delta(X) = tr(X) I_p`; Choi matrix (1/p) I_{p^2}.
pub fn make_delta(p: usize) -> Channel {
    assert!(p >= 1, "delta requires p >= 1");
    let choi = ComplexMatrix::identity(p * p).scale_re(1.0 / p as f64);
    Channel::from_choi(p, p, choi, format!("delta({p})")).expect("shape by construction")
}

/// The Schur multiplier `S_P(X) = P ∘ X`; Choi matrix `sum_ij p_ij E_ij ⊗ E_ij`.
pub fn make_schur(pattern: &ComplexMatrix) -> Result<Channel, ChannelError> {
    if !pattern.is_square() {
        return Err(ChannelError::DimensionMismatch(format!(
            "Schur pattern must be square, got {}x{}",
            pattern.rows(),
            pattern.cols()
        )));
    }
    let p = pattern.rows();
    let mut choi = ComplexMatrix::zeros(p * p, p * p);
    for i in 0..p {
        for j in 0..p {
            // E_ij ⊗ E_ij sits at row i*p+i, column j*p+j.
            choi[(i * p + i, j * p + j)] = pattern[(i, j)];
        }
    }
    Channel::from_choi(p, p, choi, format!("schur({p})"))
}

/// Validate a 0/1 symmetric hollow adjacency matrix.
pub fn check_adjacency(a: &ComplexMatrix) -> Result<(), ChannelError> {
    if !a.is_square() {
        return Err(ChannelError::InvalidAdjacency(format!(
            "must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let p = a.rows();
    for i in 0..p {
        if a[(i, i)] != Complex64::new(0.0, 0.0) {
            return Err(ChannelError::InvalidAdjacency(format!(
                "diagonal entry ({i},{i}) is {}, must be 0",
                a[(i, i)]
            )));
        }
        for j in 0..p {
            let z = a[(i, j)];
            if z.im != 0.0 || (z.re != 0.0 && z.re != 1.0) {
                return Err(ChannelError::InvalidAdjacency(format!(
                    "entry ({i},{j}) is {z}, must be 0 or 1"
                )));
            }
            if a[(i, j)] != a[(j, i)] {
                return Err(ChannelError::InvalidAdjacency(format!(
                    "entries ({i},{j}) and ({j},{i}) differ"
                )));
            }
        }
    }
    Ok(())
}

/// The one-parameter family `gamma_{t,A} = t*delta + S_A` for an adjacency
/// matrix A; Choi matrix `(t/p) I_{p^2} + C_{S_A}`.
pub fn make_gamma(t: f64, a: &ComplexMatrix) -> Result<Channel, ChannelError> {
    check_adjacency(a)?;
    let p = a.rows();
    let edges = (0..p)
        .flat_map(|i| (0..p).map(move |j| (i, j)))
        .filter(|&(i, j)| i < j && a[(i, j)].re == 1.0)
        .count();
    let schur = make_schur(a)?;
    let mut choi = schur.choi().clone();
    for k in 0..p * p {
        choi[(k, k)] += Complex64::new(t / p as f64, 0.0);
    }
    debug_assert!(choi.is_hermitian(1e-12));
    Channel::from_choi(p, p, choi, format!("gamma(t={t}, p={p}, edges={edges})"))
}

/// Reshuffle between the Choi and transfer pictures of a map M_p -> M_q.
///
/// For a (pq)x(pq) Choi matrix the result is the q^2 x p^2 transfer matrix
/// (and conversely for a q^2 x p^2 input), via
/// `T[k + q*l, i + p*j] = C[i*q + k, j*q + l]`. For p = q this is an exact
/// entry permutation and an involution.
pub fn reshuffle(m: &ComplexMatrix, p: usize, q: usize) -> Result<ComplexMatrix, MatError> {
    let n = p * q;
    if m.rows() == n && m.cols() == n && (p == q || m.rows() != q * q || m.cols() != p * p) {
        // Choi -> transfer.
        let mut t = ComplexMatrix::zeros(q * q, p * p);
        for i in 0..p {
            for j in 0..p {
                for k in 0..q {
                    for l in 0..q {
                        t[(k + q * l, i + p * j)] = m[(i * q + k, j * q + l)];
                    }
                }
            }
        }
        Ok(t)
    } else if m.rows() == q * q && m.cols() == p * p {
        // Transfer -> Choi.
        let mut c = ComplexMatrix::zeros(n, n);
        for i in 0..p {
            for j in 0..p {
                for k in 0..q {
                    for l in 0..q {
                        c[(i * q + k, j * q + l)] = m[(k + q * l, i + p * j)];
                    }
                }
            }
        }
        Ok(c)
    } else {
        Err(MatError::DimensionMismatch {
            context: format!(
                "reshuffle for p={p}, q={q} needs a {n}x{n} or {}x{} matrix, got {}x{}",
                q * q,
                p * p,
                m.rows(),
                m.cols()
            ),
        })
    }
}

/// Composition `phi ∘ psi` via transfer-matrix multiplication.
pub fn compose(phi: &Channel, psi: &Channel) -> Result<Channel, ChannelError> {
    if psi.q != phi.p {
        return Err(ChannelError::DimensionMismatch(format!(
            "cannot compose: inner dimensions {} (output of psi) vs {} (input of phi)",
            psi.q, phi.p
        )));
    }
    let t = phi.transfer().matmul(psi.transfer());
    Channel::from_transfer(psi.p, phi.q, t, format!("{} . {}", phi.label, psi.label))
}

/// Structural properties: (unital, trace preserving, Hermiticity preserving).
pub fn channel_props(phi: &Channel, tol: f64) -> (bool, bool, bool) {
    assert_eq!(phi.p, phi.q, "channel_props requires p = q");
    let p = phi.p;
    let id = ComplexMatrix::identity(p);
    let unital = phi
        .apply(&id)
        .map(|m| (&m - &id).frobenius_norm() <= tol)
        .unwrap_or(false);
    // Trace preservation is unitality of the adjoint.
    let adj = phi.adjoint();
    let trace_preserving = adj
        .apply(&id)
        .map(|m| (&m - &id).frobenius_norm() <= tol)
        .unwrap_or(false);
    let hermiticity_preserving = phi.choi.is_hermitian(tol);
    (unital, trace_preserving, hermiticity_preserving)
}

/// Identity channel on M_p (Schur multiplier by the all-ones matrix).
pub fn make_identity(p: usize) -> Channel {
    let ones = ComplexMatrix::from_fn(p, p, |_, _| Complex64::new(1.0, 0.0));
    let mut ch = make_schur(&ones).expect("square by construction");
    ch.label = format!("id({p})");
    ch
}

/// Choi matrix of `S_A ∘ T` (Schur multiplier composed with the transpose):
/// `sum_{(i,j)} a_ij E_ji ⊗ E_ij`. Exposed because its spectrum drives the
/// PPT threshold analysis.
pub fn schur_transpose_choi(a: &ComplexMatrix) -> Result<ComplexMatrix, ChannelError> {
    check_adjacency(a)?;
    let schur = make_schur(a)?;
    Ok(partial_transpose(schur.choi(), a.rows(), a.rows())?)
}

pub use matcore::kron;
