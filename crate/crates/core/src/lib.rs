//! Channels on matrix spaces built from graphs, and their positivity structure.
//!
//! For a simple graph with adjacency matrix `A` on `p` vertices, the library
//! studies the one-parameter family `gamma_{t,A} = t*delta + S_A`, where
//! `delta(X) = tr(X) I_p` (normalized trace) and `S_A` is the Schur multiplier
//! `X -> A ∘ X`. It computes the parameter thresholds at which the family
//! becomes positive / completely positive / PPT / entanglement breaking,
//! produces exact integer separability certificates at the `p*d` level, and
//! simulates channel iterates to exhibit convergence towards the
//! entanglement-breaking set.

pub mod channel;
pub mod classify;
pub mod dynamics;
pub mod ebcert;
pub mod graphs;
pub mod matcore;
