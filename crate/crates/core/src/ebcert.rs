//! Exact separability certificates for `gamma_{pd,A} = pd*delta + S_A`.
//!
//! The Choi matrix of that map is `d I ⊗ I + sum_{(i,j) ordered} E_ij ⊗ E_ij`
//! with `d` the maximum degree. Eight times it decomposes into a positive
//! integer combination of tensor products of PSD Gaussian-integer matrices,
//! four per edge plus diagonal padding. Everything here is arbitrary-precision
//! integer arithmetic: a passing verification is an identity, not an
//! approximation.

use crate::channel::{check_adjacency, ChannelError};
use crate::matcore::{Complex64, ComplexMatrix};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CertError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("certificate is for p = {cert}, adjacency is {adj}x{adj}")]
    DimensionMismatch { cert: usize, adj: usize },
    #[error("term {term} has non-positive weight")]
    NonPositiveWeight { term: usize },
    #[error("term {term}, {side} factor is not PSD: {reason}")]
    NonPsdFactor {
        term: usize,
        side: &'static str,
        reason: String,
    },
    #[error("sum differs from {scale}*Choi at position ({row}, {col}): got {got}, want {want}")]
    Mismatch {
        scale: u32,
        row: usize,
        col: usize,
        got: String,
        want: String,
    },
}

/// Gaussian integer: exact complex scalar with big-integer parts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GaussInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussInt {
    pub fn new(re: i64, im: i64) -> Self {
        Self {
            re: BigInt::from(re),
            im: BigInt::from(im),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    fn add(&self, other: &Self) -> Self {
        Self {
            re: &self.re + &other.re,
            im: &self.im + &other.im,
        }
    }

    fn mul(&self, other: &Self) -> Self {
        Self {
            re: &self.re * &other.re - &self.im * &other.im,
            im: &self.re * &other.im + &self.im * &other.re,
        }
    }

    fn scale(&self, k: &BigInt) -> Self {
        Self {
            re: &self.re * k,
            im: &self.im * k,
        }
    }

    fn to_complex(&self) -> Complex64 {
        let re: f64 = self.re.to_string().parse().unwrap_or(f64::NAN);
        let im: f64 = self.im.to_string().parse().unwrap_or(f64::NAN);
        Complex64::new(re, im)
    }
}

impl fmt::Display for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i", self.re, self.im)
    }
}

/// Sparse matrix over the Gaussian integers; absent entries are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussianIntMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), GaussInt>,
}

impl GaussianIntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, i: usize, j: usize, value: GaussInt) {
        assert!(i < self.rows && j < self.cols);
        if value.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), value);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> GaussInt {
        self.entries.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn add_assign_at(&mut self, i: usize, j: usize, value: &GaussInt) {
        let current = self.get(i, j);
        self.set(i, j, current.add(value));
    }

    pub fn nonzeros(&self) -> impl Iterator<Item = (&(usize, usize), &GaussInt)> {
        self.entries.iter()
    }

    pub fn is_hermitian(&self) -> bool {
        self.rows == self.cols
            && self
                .entries
                .iter()
                .all(|(&(i, j), v)| self.get(j, i) == v.conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for (&(i, k), a) in &self.entries {
            for (&(k2, j), b) in &other.entries {
                if k == k2 {
                    out.add_assign_at(i, j, &a.mul(b));
                }
            }
        }
        out
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for (&(i, j), a) in &self.entries {
            for (&(k, l), b) in &other.entries {
                out.set(i * other.rows + k, j * other.cols + l, a.mul(b));
            }
        }
        out
    }

    pub fn scaled(&self, k: &BigInt) -> Self {
        let mut out = Self::zeros(self.rows, self.cols);
        for (&(i, j), v) in &self.entries {
            out.set(i, j, v.scale(k));
        }
        out
    }

    /// Is this `2 Q = Q^2` with Q Hermitian (spectrum in {0, 2}, hence PSD)?
    fn is_doubled_idempotent(&self) -> bool {
        if !self.is_hermitian() {
            return false;
        }
        self.matmul(self) == self.scaled(&BigInt::from(2))
    }

    /// Diagonal with entries in {0, 1}?
    fn is_zero_one_diagonal(&self) -> bool {
        self.rows == self.cols
            && self
                .entries
                .iter()
                .all(|(&(i, j), v)| i == j && v.im.is_zero() && (v.re.is_zero() || v.re.is_one()))
    }

    /// Exact PSD check for the matrix shapes certificates use.
    fn check_psd(&self) -> Result<(), String> {
        if self.is_doubled_idempotent() || self.is_zero_one_diagonal() {
            Ok(())
        } else {
            Err("factor is neither a doubled idempotent nor a 0/1 diagonal".into())
        }
    }

    /// Floating-point image, for cross-checks against the float pipeline.
    pub fn to_complex_matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.rows, self.cols);
        for (&(i, j), v) in &self.entries {
            m[(i, j)] = v.to_complex();
        }
        m
    }
}

/// One summand of a separability certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertTerm {
    /// `weight * (left ⊗ right)` with both factors PSD.
    Product {
        left: GaussianIntMatrix,
        right: GaussianIntMatrix,
        weight: BigInt,
    },
    /// `weight * sum over positions (i,j) of E_ii ⊗ E_jj`.
    Diagonal {
        positions: Vec<(usize, usize)>,
        weight: BigInt,
    },
}

/// Exact decomposition proving `scale * Choi(gamma_{pd,A})` separable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparabilityCertificate {
    pub p: usize,
    pub scale: u32,
    pub terms: Vec<CertTerm>,
}

/// The four PSD block matrices supported on {i,j}: J-like, alternating, and
/// the two imaginary-signed ones. Each satisfies Q^2 = 2Q exactly.
fn edge_q_matrices(p: usize, i: usize, j: usize) -> [GaussianIntMatrix; 4] {
    let mut qs: [GaussianIntMatrix; 4] = std::array::from_fn(|_| GaussianIntMatrix::zeros(p, p));
    for q in &mut qs {
        q.set(i, i, GaussInt::new(1, 0));
        q.set(j, j, GaussInt::new(1, 0));
    }
    qs[0].set(i, j, GaussInt::new(1, 0));
    qs[0].set(j, i, GaussInt::new(1, 0));
    qs[1].set(i, j, GaussInt::new(-1, 0));
    qs[1].set(j, i, GaussInt::new(-1, 0));
    qs[2].set(i, j, GaussInt::new(0, 1));
    qs[2].set(j, i, GaussInt::new(0, -1));
    qs[3].set(i, j, GaussInt::new(0, -1));
    qs[3].set(j, i, GaussInt::new(0, 1));
    qs
}

fn adjacency_degrees(a: &ComplexMatrix) -> Vec<usize> {
    let p = a.rows();
    (0..p)
        .map(|i| (0..p).filter(|&j| a[(i, j)].re == 1.0).count())
        .collect()
}

/// Build the exact certificate for `gamma_{pd,A}`: per undirected edge the
/// four weighted products whose sum is 8 times the edge block, plus diagonal
/// padding lifting every `E_kk ⊗ E_ll` coefficient to `8d`. For the empty
/// graph the certificate degenerates to no terms (the map is `0 * delta`).
pub fn build_certificate(a: &ComplexMatrix) -> Result<SeparabilityCertificate, CertError> {
    check_adjacency(a)?;
    let p = a.rows();
    let degrees = adjacency_degrees(a);
    let d = degrees.iter().copied().max().unwrap_or(0);
    let mut terms = Vec::new();
    if d == 0 {
        return Ok(SeparabilityCertificate { p, scale: 8, terms });
    }

    for i in 0..p {
        for j in (i + 1)..p {
            if a[(i, j)].re != 1.0 {
                continue;
            }
            let [q1, q2, q3, q4] = edge_q_matrices(p, i, j);
            let w = BigInt::from(2);
            terms.push(CertTerm::Product {
                left: q1.clone(),
                right: q1,
                weight: w.clone(),
            });
            terms.push(CertTerm::Product {
                left: q2.clone(),
                right: q2,
                weight: w.clone(),
            });
            terms.push(CertTerm::Product {
                left: q3.clone(),
                right: q4.clone(),
                weight: w.clone(),
            });
            terms.push(CertTerm::Product {
                left: q4,
                right: q3,
                weight: w,
            });
        }
    }

    // Product terms already contribute 8*a_kl at the (k,l) diagonal slot and
    // 8*deg(k) at (k,k); pad every slot up to 8d, grouping equal weights.
    let mut by_weight: BTreeMap<u64, Vec<(usize, usize)>> = BTreeMap::new();
    for k in 0..p {
        for l in 0..p {
            let have = if k == l {
                8 * degrees[k] as u64
            } else if a[(k, l)].re == 1.0 {
                8
            } else {
                0
            };
            let need = 8 * d as u64 - have;
            if need > 0 {
                by_weight.entry(need).or_default().push((k, l));
            }
        }
    }
    for (weight, positions) in by_weight {
        terms.push(CertTerm::Diagonal {
            positions,
            weight: BigInt::from(weight),
        });
    }
    Ok(SeparabilityCertificate { p, scale: 8, terms })
}

/// Exact target: `scale * (d I⊗I + sum_{(i,j) ordered edge} E_ij ⊗ E_ij)`.
fn target_choi_scaled(a: &ComplexMatrix, scale: u32) -> GaussianIntMatrix {
    let p = a.rows();
    let d = adjacency_degrees(a).into_iter().max().unwrap_or(0);
    let mut target = GaussianIntMatrix::zeros(p * p, p * p);
    let s = BigInt::from(scale);
    if d > 0 {
        let sd = &s * BigInt::from(d);
        for k in 0..p {
            for l in 0..p {
                target.set(
                    k * p + l,
                    k * p + l,
                    GaussInt {
                        re: sd.clone(),
                        im: BigInt::zero(),
                    },
                );
            }
        }
    }
    for i in 0..p {
        for j in 0..p {
            if a[(i, j)].re == 1.0 {
                // E_ij ⊗ E_ij sits at (i*p+i, j*p+j).
                target.add_assign_at(
                    i * p + i,
                    j * p + j,
                    &GaussInt {
                        re: s.clone(),
                        im: BigInt::zero(),
                    },
                );
            }
        }
    }
    target
}

/// Sum all certificate terms into one sparse exact matrix.
pub fn certificate_sum(cert: &SeparabilityCertificate) -> GaussianIntMatrix {
    let n = cert.p * cert.p;
    let mut sum = GaussianIntMatrix::zeros(n, n);
    for term in &cert.terms {
        match term {
            CertTerm::Product {
                left,
                right,
                weight,
            } => {
                let prod = left.kron(right).scaled(weight);
                for (&(i, j), v) in prod.nonzeros() {
                    sum.add_assign_at(i, j, v);
                }
            }
            CertTerm::Diagonal { positions, weight } => {
                for &(i, j) in positions {
                    sum.add_assign_at(
                        i * cert.p + j,
                        i * cert.p + j,
                        &GaussInt {
                            re: weight.clone(),
                            im: BigInt::zero(),
                        },
                    );
                }
            }
        }
    }
    sum
}

/// Verify a certificate against an adjacency matrix with exact integer
/// arithmetic: (a) every product factor passes the exact PSD check and every
/// weight is positive, (b) the weighted sum of terms equals
/// `scale * Choi(gamma_{pd,A})` entry for entry. A pass is a complete proof of
/// separability for that Choi matrix.
pub fn verify_certificate(
    cert: &SeparabilityCertificate,
    a: &ComplexMatrix,
) -> Result<(), CertError> {
    check_adjacency(a)?;
    if cert.p != a.rows() {
        return Err(CertError::DimensionMismatch {
            cert: cert.p,
            adj: a.rows(),
        });
    }
    for (idx, term) in cert.terms.iter().enumerate() {
        match term {
            CertTerm::Product {
                left,
                right,
                weight,
            } => {
                if !weight.is_positive() {
                    return Err(CertError::NonPositiveWeight { term: idx });
                }
                left.check_psd().map_err(|reason| CertError::NonPsdFactor {
                    term: idx,
                    side: "left",
                    reason,
                })?;
                right
                    .check_psd()
                    .map_err(|reason| CertError::NonPsdFactor {
                        term: idx,
                        side: "right",
                        reason,
                    })?;
            }
            CertTerm::Diagonal { weight, .. } => {
                if !weight.is_positive() {
                    return Err(CertError::NonPositiveWeight { term: idx });
                }
            }
        }
    }

    let sum = certificate_sum(cert);
    let target = target_choi_scaled(a, cert.scale);
    let n = cert.p * cert.p;
    for i in 0..n {
        for j in 0..n {
            let got = sum.get(i, j);
            let want = target.get(i, j);
            if got != want {
                return Err(CertError::Mismatch {
                    scale: cert.scale,
                    row: i,
                    col: j,
                    got: got.to_string(),
                    want: want.to_string(),
                });
            }
        }
    }
    Ok(())
}

// --- JSON serialization: big integers as decimal strings -------------------

#[derive(Serialize, Deserialize)]
struct GaussIntRepr {
    re: String,
    im: String,
}

#[derive(Serialize, Deserialize)]
struct SparseMatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, GaussIntRepr)>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum TermRepr {
    Product {
        left: SparseMatrixRepr,
        right: SparseMatrixRepr,
        weight: String,
    },
    Diagonal {
        positions: Vec<(usize, usize)>,
        weight: String,
    },
}

#[derive(Serialize, Deserialize)]
struct CertificateRepr {
    p: usize,
    scale: u32,
    terms: Vec<TermRepr>,
}

fn matrix_repr(m: &GaussianIntMatrix) -> SparseMatrixRepr {
    SparseMatrixRepr {
        rows: m.rows,
        cols: m.cols,
        entries: m
            .nonzeros()
            .map(|(&(i, j), v)| {
                (
                    i,
                    j,
                    GaussIntRepr {
                        re: v.re.to_string(),
                        im: v.im.to_string(),
                    },
                )
            })
            .collect(),
    }
}

fn matrix_from_repr(r: SparseMatrixRepr) -> Result<GaussianIntMatrix, String> {
    let mut m = GaussianIntMatrix::zeros(r.rows, r.cols);
    for (i, j, v) in r.entries {
        if i >= r.rows || j >= r.cols {
            return Err(format!("entry ({i},{j}) out of bounds"));
        }
        let re: BigInt = v.re.parse().map_err(|e| format!("bad integer: {e}"))?;
        let im: BigInt = v.im.parse().map_err(|e| format!("bad integer: {e}"))?;
        m.set(i, j, GaussInt { re, im });
    }
    Ok(m)
}

impl Serialize for SeparabilityCertificate {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = CertificateRepr {
            p: self.p,
            scale: self.scale,
            terms: self
                .terms
                .iter()
                .map(|t| match t {
                    CertTerm::Product {
                        left,
                        right,
                        weight,
                    } => TermRepr::Product {
                        left: matrix_repr(left),
                        right: matrix_repr(right),
                        weight: weight.to_string(),
                    },
                    CertTerm::Diagonal { positions, weight } => TermRepr::Diagonal {
                        positions: positions.clone(),
                        weight: weight.to_string(),
                    },
                })
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SeparabilityCertificate {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = CertificateRepr::deserialize(deserializer)?;
        let mut terms = Vec::with_capacity(repr.terms.len());
        for t in repr.terms {
            terms.push(match t {
                TermRepr::Product {
                    left,
                    right,
                    weight,
                } => CertTerm::Product {
                    left: matrix_from_repr(left).map_err(D::Error::custom)?,
                    right: matrix_from_repr(right).map_err(D::Error::custom)?,
                    weight: weight.parse().map_err(D::Error::custom)?,
                },
                TermRepr::Diagonal { positions, weight } => CertTerm::Diagonal {
                    positions,
                    weight: weight.parse().map_err(D::Error::custom)?,
                },
            });
        }
        Ok(SeparabilityCertificate {
            p: repr.p,
            scale: repr.scale,
            terms,
        })
    }
}
