//! Expansion coefficients as generalized divided differences over the
//! eigenvalues met along an index path.
//!
//! Distinct nodes go through the path recurrence
//! `A(x0, x1, rest) = (A(x0, rest) - A(x1, rest)) / (x0 - x1)`;
//! once any two nodes are confluent the Hermite table over repeated nodes
//! takes over, where a run of `k + 1` equal nodes contributes `f^(k)(x) / k!`.

use crate::error::{Error, Result};
use crate::function::AnalyticFunction;
use crate::scalar::{Real, C};
use crate::spectrum::DiagonalSpectrum;

/// Largest node count accepted by [`divided_difference`].
pub const MAX_NODES: usize = 64;

/// Relative confluence tolerance: nodes merge when
/// `|a - b| <= 1e-10 * max(1, |a|, |b|)`.
pub const CONFLUENCE_RTOL: f64 = 1e-10;

pub fn are_confluent<T: Real>(a: C<T>, b: C<T>) -> bool {
    let scale = T::one().max(a.norm()).max(b.norm());
    (a - b).norm() <= T::lit(CONFLUENCE_RTOL) * scale
}

/// One cluster of numerically coincident nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfluenceGroup<T> {
    /// Mean of the member nodes; every derivative in the group is taken here.
    pub representative: C<T>,
    /// Positions in the original node list.
    pub members: Vec<usize>,
}

/// Nodes `(λ_i, λ_m1, ..., λ_p)` of an index path with their confluence structure.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeList<T> {
    nodes: Vec<C<T>>,
    groups: Vec<ConfluenceGroup<T>>,
}

impl<T: Real> NodeList<T> {
    pub fn new(nodes: Vec<C<T>>) -> Self {
        let groups = cluster(&nodes);
        Self { nodes, groups }
    }

    pub fn from_path(lambda: &DiagonalSpectrum<T>, path: &[usize]) -> Result<Self> {
        Ok(Self::new(lambda.nodes_along(path)?))
    }

    pub fn nodes(&self) -> &[C<T>] {
        &self.nodes
    }

    pub fn groups(&self) -> &[ConfluenceGroup<T>] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_distinct(&self) -> bool {
        self.groups.len() == self.nodes.len()
    }
}

/// Single-link clustering over all pairs (union-find), so the partition does
/// not depend on the input order. Groups come out sorted by representative,
/// lexicographically on (re, im).
fn cluster<T: Real>(nodes: &[C<T>]) -> Vec<ConfluenceGroup<T>> {
    let n = nodes.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if are_confluent(nodes[i], nodes[j]) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut by_root: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match by_root.iter_mut().find(|(root, _)| *root == r) {
            Some((_, m)) => m.push(i),
            None => by_root.push((r, vec![i])),
        }
    }
    let mut groups: Vec<ConfluenceGroup<T>> = by_root
        .into_iter()
        .map(|(_, members)| {
            let sum = members
                .iter()
                .fold(C::new(T::zero(), T::zero()), |acc, &m| acc + nodes[m]);
            ConfluenceGroup {
                representative: sum / T::from_usize_lossy(members.len()),
                members,
            }
        })
        .collect();
    groups.sort_by(|a, b| {
        let (x, y) = (a.representative, b.representative);
        x.re.partial_cmp(&y.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.im.partial_cmp(&y.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    groups
}

/// Generalized divided difference `f[x_0, ..., x_n]`.
pub fn divided_difference<T: Real>(f: &AnalyticFunction<T>, nodes: &NodeList<T>) -> Result<C<T>> {
    if nodes.is_empty() {
        return Err(Error::Dimension("divided difference needs at least one node".into()));
    }
    if nodes.len() > MAX_NODES {
        return Err(Error::Depth {
            nodes: nodes.len(),
            cap: MAX_NODES,
        });
    }
    if nodes.is_distinct() {
        path_recurrence(f, nodes.nodes())
    } else {
        hermite_table(f, nodes.groups())
    }
}

/// `E[a][j] = f[x_a, x_j, x_{j+1}, ..., x_n]` for `a < j <= n + 1`, the
/// empty tail (`j = n + 1`) being `f(x_a)`. The answer is `E[0][1]`.
fn path_recurrence<T: Real>(f: &AnalyticFunction<T>, x: &[C<T>]) -> Result<C<T>> {
    let n = x.len() - 1;
    // table[a][j - a - 1] holds E[a][j]
    let mut table: Vec<Vec<C<T>>> = (0..=n).map(|a| vec![C::new(T::zero(), T::zero()); n + 1 - a]).collect();
    for a in 0..=n {
        table[a][n - a] = f.eval(x[a])?;
    }
    for j in (1..=n).rev() {
        let head = table[j][0];
        for a in 0..j {
            let tail = table[a][j - a];
            table[a][j - a - 1] = (tail - head) / (x[a] - x[j]);
        }
    }
    Ok(table[0][0])
}

fn hermite_table<T: Real>(f: &AnalyticFunction<T>, groups: &[ConfluenceGroup<T>]) -> Result<C<T>> {
    let mut z = Vec::new();
    let mut gid = Vec::new();
    for (g, group) in groups.iter().enumerate() {
        for _ in &group.members {
            z.push(group.representative);
            gid.push(g);
        }
    }
    let n = z.len() - 1;
    let mut col: Vec<C<T>> = z.iter().map(|&zj| f.eval(zj)).collect::<Result<_>>()?;
    for k in 1..=n {
        let mut next = Vec::with_capacity(n + 1 - k);
        for j in 0..=n - k {
            let v = if gid[j] == gid[j + k] {
                f.taylor_coefficient(k as u32, z[j])?
            } else {
                (col[j + 1] - col[j]) / (z[j + k] - z[j])
            };
            next.push(v);
        }
        col = next;
    }
    Ok(col[0])
}

/// First-order coefficient: `(f(a) - f(b)) / (a - b)`, or `f'((a + b) / 2)`
/// when `a` and `b` are confluent.
pub fn coefficient_a1<T: Real>(f: &AnalyticFunction<T>, a: C<T>, b: C<T>) -> Result<C<T>> {
    divided_difference(f, &NodeList::new(vec![a, b]))
}

/// Coefficient `A^(n)` for the index path `(i, m_1, ..., m_{n-1}, p)`.
pub fn coefficient_a<T: Real>(
    f: &AnalyticFunction<T>,
    lambda: &DiagonalSpectrum<T>,
    path: &[usize],
) -> Result<C<T>> {
    if path.len() < 2 {
        return Err(Error::Dimension(format!(
            "coefficient path needs at least two indices, got {}",
            path.len()
        )));
    }
    divided_difference(f, &NodeList::from_path(lambda, path)?)
}
