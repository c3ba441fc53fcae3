//! Simple undirected graphs: edge-list ingestion, spectral quantities,
//! complement, and the eigenvalue form of the Lovász theta number of the
//! complement.

use crate::matcore::{herm_eig, herm_eig_values, Complex64, ComplexMatrix, MatError};
use std::collections::BTreeSet;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum GraphError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid edge ({u}, {v}): {message}")]
    Validation { u: usize, v: usize, message: String },
    #[error("theta solver made no progress over the full budget (best value {value})")]
    NoProgress {
        value: f64,
        best: Box<ThetaSolution>,
    },
    #[error(transparent)]
    Mat(#[from] MatError),
}

/// Simple undirected graph on vertices 0..p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    p: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(p: usize) -> Self {
        Self {
            p,
            edges: BTreeSet::new(),
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::Validation {
                u,
                v,
                message: "self-loop".into(),
            });
        }
        if u >= self.p || v >= self.p {
            return Err(GraphError::Validation {
                u,
                v,
                message: format!("vertex out of range (p = {})", self.p),
            });
        }
        let e = (u.min(v), u.max(v));
        if !self.edges.insert(e) {
            return Err(GraphError::Validation {
                u,
                v,
                message: "duplicate edge".into(),
            });
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.p
    }

    /// Undirected edge count.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edge count with both orientations, matching the ordered summations
    /// used throughout the threshold formulas.
    pub fn ordered_edge_count(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn is_empty_graph(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.p * (self.p.saturating_sub(1)) / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.p).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn adjacency_matrix(&self) -> ComplexMatrix {
        let mut a = ComplexMatrix::zeros(self.p, self.p);
        for &(u, v) in &self.edges {
            a[(u, v)] = Complex64::new(1.0, 0.0);
            a[(v, u)] = Complex64::new(1.0, 0.0);
        }
        a
    }

    /// Canonical edge-list serialization: "p m" then one "u v" line per edge
    /// in sorted order.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.p, self.edges.len());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

/// Parse the edge-list format: first line "p m", then m lines "u v"
/// (0-based endpoints, whitespace separated).
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text.lines().enumerate();
    let (header_idx, header) = lines.next().ok_or_else(|| GraphError::Parse {
        line: 1,
        message: "empty input".into(),
    })?;
    let header = header.trim();
    if header.is_empty() {
        return Err(GraphError::Parse {
            line: header_idx + 1,
            message: "expected header \"p m\"".into(),
        });
    }
    let mut it = header.split_whitespace();
    let p = parse_count(it.next(), header_idx + 1, "vertex count")?;
    let m = parse_count(it.next(), header_idx + 1, "edge count")?;
    if it.next().is_some() {
        return Err(GraphError::Parse {
            line: header_idx + 1,
            message: "trailing tokens after header".into(),
        });
    }
    let mut g = Graph::new(p);
    let mut seen = 0usize;
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let u = parse_count(it.next(), idx + 1, "edge endpoint")?;
        let v = parse_count(it.next(), idx + 1, "edge endpoint")?;
        if it.next().is_some() {
            return Err(GraphError::Parse {
                line: idx + 1,
                message: "trailing tokens after edge".into(),
            });
        }
        g.add_edge(u, v)?;
        seen += 1;
    }
    if seen != m {
        return Err(GraphError::Parse {
            line: text.lines().count(),
            message: format!("header promised {m} edges, found {seen}"),
        });
    }
    Ok(g)
}

fn parse_count(tok: Option<&str>, line: usize, what: &str) -> Result<usize, GraphError> {
    let tok = tok.ok_or_else(|| GraphError::Parse {
        line,
        message: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| GraphError::Parse {
        line,
        message: format!("invalid {what}: {tok:?}"),
    })
}

/// Spectral and combinatorial summary of a graph.
#[derive(Debug, Clone)]
pub struct GraphReport {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub max_degree: usize,
    pub ordered_edge_count: usize,
    pub signless_laplacian: ComplexMatrix,
}

pub fn graph_report(g: &Graph) -> Result<GraphReport, GraphError> {
    let a = g.adjacency_matrix();
    let values = herm_eig_values(&a)?;
    let signless_laplacian = {
        let mut l = a.clone();
        for v in 0..g.vertex_count() {
            l[(v, v)] = Complex64::new(g.degree(v) as f64, 0.0);
        }
        l
    };
    Ok(GraphReport {
        lambda_min: values.first().copied().unwrap_or(0.0),
        lambda_max: values.last().copied().unwrap_or(0.0),
        max_degree: g.max_degree(),
        ordered_edge_count: g.ordered_edge_count(),
        signless_laplacian,
    })
}

pub fn complement(g: &Graph) -> Graph {
    let mut out = Graph::new(g.vertex_count());
    for u in 0..g.vertex_count() {
        for v in (u + 1)..g.vertex_count() {
            if !g.has_edge(u, v) {
                out.edges.insert((u, v));
            }
        }
    }
    out
}

/// Feasible point and value for the eigenvalue form of the theta number of
/// the complement: `value = lambda_max(H)` with H fixed to 1 on the diagonal
/// and on edges. Any feasible H certifies the upper bound.
#[derive(Debug, Clone)]
pub struct ThetaSolution {
    pub value: f64,
    pub h: ComplexMatrix,
    pub iterations: usize,
    pub gap_estimate: f64,
}

/// Minimize `lambda_max(H)` over Hermitian H with `H_ij = 1` on the diagonal
/// and on edges of `g` by subgradient descent on the free (non-edge) entries.
/// The minimum is the Lovász theta number of the complement graph; the
/// returned value is always a certified upper bound for it.
///
/// The subgradient at H is the top-eigenvector outer product restricted to
/// free positions; steps are Polyak-style with a diminishing c/sqrt(k)
/// target offset (c = 1/4, tuned on the named-graph oracles). Constrained
/// entries are never touched.
pub fn lovasz_theta_bar(g: &Graph, iters: usize, tol: f64) -> Result<ThetaSolution, GraphError> {
    let p = g.vertex_count();
    let free: Vec<(usize, usize)> = (0..p)
        .flat_map(|i| ((i + 1)..p).map(move |j| (i, j)))
        .filter(|&(i, j)| !g.has_edge(i, j))
        .collect();

    // Start from the constrained pattern with free entries at zero: I + A.
    let mut h = g.adjacency_matrix();
    for i in 0..p {
        h[(i, i)] = Complex64::new(1.0, 0.0);
    }

    let eig = herm_eig(&h)?;
    let mut value = eig.values.last().map(|z| z.re).unwrap_or(0.0);
    let mut top = eig
        .vectors
        .as_ref()
        .map(|v| v.column(p - 1))
        .unwrap_or_default();

    let mut best_value = value;
    let mut best_h = h.clone();
    let initial_value = value;
    let c = 0.25;

    if free.is_empty() || best_value <= 1.0 + tol {
        // Complete graph (nothing to optimize) or provably optimal already:
        // lambda_max(H) >= max_i H_ii = 1 for every feasible H.
        return Ok(ThetaSolution {
            value: best_value,
            h: best_h,
            iterations: 0,
            gap_estimate: 0.0,
        });
    }

    // Subgradient iterates oscillate once the top eigenvalue goes degenerate,
    // so the best candidate is usually a windowed average of iterates
    // (lambda_max is convex; Jensen makes the average at least as good).
    // Windows restart at doubling points to keep the tail dominant.
    let mut window_sum = ComplexMatrix::zeros(p, p);
    let mut window_count = 0usize;
    let pin = |cand: &mut ComplexMatrix| {
        for i in 0..p {
            cand[(i, i)] = Complex64::new(1.0, 0.0);
        }
        for (u, v) in g.edges() {
            cand[(u, v)] = Complex64::new(1.0, 0.0);
            cand[(v, u)] = Complex64::new(1.0, 0.0);
        }
    };
    let consider = |mut cand: ComplexMatrix,
                    best_value: &mut f64,
                    best_h: &mut ComplexMatrix|
     -> Result<(), GraphError> {
        pin(&mut cand);
        let vals = herm_eig_values(&cand)?;
        let v = vals.last().copied().unwrap_or(0.0);
        if v < *best_value {
            *best_value = v;
            *best_h = cand;
        }
        Ok(())
    };

    let mut k = 0usize;
    while k < iters {
        k += 1;
        // Subgradient: top eigenvector outer product on free positions.
        let mut gnorm_sq = 0.0;
        for &(i, j) in &free {
            gnorm_sq += 2.0 * (top[i] * top[j].conj()).norm_sqr();
        }
        if gnorm_sq <= 1e-30 {
            break; // top eigenvector lives on the constrained pattern; stalled
        }
        let offset = c / (k as f64).sqrt();
        let step = (value - (best_value - offset)) / gnorm_sq;
        for &(i, j) in &free {
            let gij = top[i] * top[j].conj();
            h[(i, j)] -= gij * step;
            h[(j, i)] = h[(i, j)].conj();
        }

        let eig = herm_eig(&h)?;
        value = eig.values.last().map(|z| z.re).unwrap_or(0.0);
        top = eig
            .vectors
            .as_ref()
            .map(|v| v.column(p - 1))
            .unwrap_or_default();
        if value < best_value {
            best_value = value;
            best_h = h.clone();
        }

        window_sum = &window_sum + &h;
        window_count += 1;
        let at_boundary = window_count.is_power_of_two() && window_count >= 64;
        if k.is_multiple_of(25) || at_boundary || k == iters {
            let avg = window_sum.scale_re(1.0 / window_count as f64);
            consider(avg, &mut best_value, &mut best_h)?;
        }
        if at_boundary {
            window_sum = ComplexMatrix::zeros(p, p);
            window_count = 0;
        }
        if best_value <= 1.0 + tol {
            break;
        }
    }

    let gap_estimate = c / (k.max(1) as f64).sqrt();
    let solution = ThetaSolution {
        value: best_value,
        h: best_h,
        iterations: k,
        gap_estimate,
    };
    if best_value >= initial_value && initial_value > 1.0 + tol {
        return Err(GraphError::NoProgress {
            value: best_value,
            best: Box::new(solution),
        });
    }
    Ok(solution)
}

/// Named generators used across tests and reports.
pub mod generators {
    use super::Graph;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub fn empty(p: usize) -> Graph {
        Graph::new(p)
    }

    pub fn complete(p: usize) -> Graph {
        let mut g = Graph::new(p);
        for u in 0..p {
            for v in (u + 1)..p {
                g.add_edge(u, v).expect("valid by construction");
            }
        }
        g
    }

    pub fn cycle(p: usize) -> Graph {
        assert!(p >= 3, "a simple cycle needs at least 3 vertices");
        let mut g = Graph::new(p);
        for u in 0..p {
            g.add_edge(u, (u + 1) % p).expect("valid by construction");
        }
        g
    }

    pub fn path(p: usize) -> Graph {
        let mut g = Graph::new(p);
        for u in 0..p.saturating_sub(1) {
            g.add_edge(u, u + 1).expect("valid by construction");
        }
        g
    }

    /// Star K_{1,s} on s+1 vertices, center 0.
    pub fn star(s: usize) -> Graph {
        let mut g = Graph::new(s + 1);
        for v in 1..=s {
            g.add_edge(0, v).expect("valid by construction");
        }
        g
    }

    /// Petersen graph as the Kneser graph K(5,2): vertices are 2-subsets of
    /// {0..4} in lexicographic order, edges join disjoint subsets.
    pub fn petersen() -> Graph {
        let mut subsets = Vec::new();
        for a in 0..5usize {
            for b in (a + 1)..5 {
                subsets.push((a, b));
            }
        }
        let mut g = Graph::new(10);
        for i in 0..subsets.len() {
            for j in (i + 1)..subsets.len() {
                let (a, b) = subsets[i];
                let (c, d) = subsets[j];
                if a != c && a != d && b != c && b != d {
                    g.add_edge(i, j).expect("valid by construction");
                }
            }
        }
        g
    }

    /// Erdős–Rényi G(p, prob) with a fixed seed.
    pub fn random(p: usize, prob: f64, seed: u64) -> Graph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = Graph::new(p);
        for u in 0..p {
            for v in (u + 1)..p {
                if rng.gen_bool(prob) {
                    g.add_edge(u, v).expect("valid by construction");
                }
            }
        }
        g
    }
}
