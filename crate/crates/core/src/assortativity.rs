//! Node assortativity matrix, the node assortativity coefficient (NAC) and
//! the NAC-based choice of γ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{LabelAssignment, SparseUndirectedGraph};
use crate::scalar::Scalar;

/// 2×2 class-mixing matrix normalized to total mass one.
///
/// `c[a][b]` is, for nodes of class `a`, the average fraction of their edge
/// weight that reaches class-`b` neighbors, after rescaling the whole matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssortativityMatrix<T> {
    pub c: [[T; 2]; 2],
}

impl<T: Scalar> AssortativityMatrix<T> {
    /// Row sums.
    pub fn a(&self) -> [T; 2] {
        [self.c[0][0] + self.c[0][1], self.c[1][0] + self.c[1][1]]
    }

    /// Column sums.
    pub fn b(&self) -> [T; 2] {
        [self.c[0][0] + self.c[1][0], self.c[0][1] + self.c[1][1]]
    }

    pub fn trace(&self) -> T {
        self.c[0][0] + self.c[1][1]
    }
}

/// Builds the assortativity matrix of `g` under `labels`.
///
/// Only edges with both endpoints labeled participate. With
/// `restrict_to_labeled == false` every node must carry a label (the
/// full-information mode used for analysis); otherwise unlabeled nodes are
/// simply ignored. A node contributes to its class row only if it has at
/// least one qualifying edge of positive weight.
pub fn assortativity_matrix<T: Scalar>(
    g: &SparseUndirectedGraph<T>,
    labels: &LabelAssignment,
    restrict_to_labeled: bool,
) -> Result<AssortativityMatrix<T>> {
    if labels.len() != g.node_count() {
        return Err(Error::LengthMismatch { expected: g.node_count(), actual: labels.len() });
    }
    if !restrict_to_labeled {
        if let Some(i) = (0..labels.len()).find(|&i| !labels.is_labeled(i)) {
            return Err(Error::NacUndefined(format!("node {i} is unlabeled; full-graph NAC needs every label")));
        }
    }

    let mut rows = [[T::zero(); 2]; 2];
    let mut members = [0usize; 2];
    for i in 0..g.node_count() {
        let Some(ci) = labels.get(i) else { continue };
        let mut to_class = [T::zero(); 2];
        for (j, w) in g.neighbors(i) {
            if let Some(cj) = labels.get(j) {
                to_class[cj.index()] = to_class[cj.index()] + w;
            }
        }
        let total = to_class[0] + to_class[1];
        if total <= T::zero() {
            continue;
        }
        members[ci.index()] += 1;
        for k in 0..2 {
            rows[ci.index()][k] = rows[ci.index()][k] + to_class[k] / total;
        }
    }

    let mut c = [[T::zero(); 2]; 2];
    let mut mass = T::zero();
    for a in 0..2 {
        if members[a] == 0 {
            continue;
        }
        let count = T::from_usize(members[a]).unwrap();
        for b in 0..2 {
            c[a][b] = rows[a][b] / count;
            mass = mass + c[a][b];
        }
    }
    if mass <= T::zero() {
        return Err(Error::NacUndefined("no edge joins two labeled nodes".into()));
    }
    for row in &mut c {
        for v in row.iter_mut() {
            *v = *v / mass;
        }
    }
    Ok(AssortativityMatrix { c })
}

/// `N = (Σ C_ii - Σ a_i b_i) / (1 - Σ a_i b_i)`.
pub fn nac<T: Scalar>(m: &AssortativityMatrix<T>) -> Result<T> {
    let (a, b) = (m.a(), m.b());
    let expected = a[0] * b[0] + a[1] * b[1];
    let denom = T::one() - expected;
    if denom.abs() <= T::lit(1e-15) {
        return Err(Error::NacUndefined("class marginals are degenerate (Σ a_i b_i = 1)".into()));
    }
    Ok((m.trace() - expected) / denom)
}

/// NAC of `g` under `labels`, composing [`assortativity_matrix`] and [`nac`].
pub fn graph_nac<T: Scalar>(
    g: &SparseUndirectedGraph<T>,
    labels: &LabelAssignment,
    restrict_to_labeled: bool,
) -> Result<T> {
    nac(&assortativity_matrix(g, labels, restrict_to_labeled)?)
}

/// `γ = N_S / (N_S - N_D)`.
///
/// Only meaningful when the similar graph is assortative and the dissimilar
/// graph disassortative; otherwise [`Error::FallbackRequired`] tells the
/// caller to pick γ some other way.
pub fn gamma_from_nac<T: Scalar>(n_s: T, n_d: T) -> Result<T> {
    let zero = T::zero();
    if n_s < zero || n_d > zero || (n_s == zero && n_d == zero) {
        return Err(Error::FallbackRequired { n_s: n_s.to_f64_lossy(), n_d: n_d.to_f64_lossy() });
    }
    Ok(n_s / (n_s - n_d))
}
