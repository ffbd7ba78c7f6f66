//! Benchmark unitaries: QFT matrices, Grover-coin walk operators on graphs,
//! Haar-random matrices and random orthogonal matrices with a fixed zero
//! pattern.

use std::collections::{BTreeSet, VecDeque};

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{UnitaryMatrix, C64};

/// `(1/sqrt(n)) w^{jk}` with `w = exp(2 pi i / n)`.
pub fn qft_matrix(n_dims: usize) -> Result<UnitaryMatrix> {
    if n_dims == 0 {
        return Err(Error::Shape("QFT dimension must be positive".into()));
    }
    let norm = 1.0 / (n_dims as f64).sqrt();
    let m = DMatrix::from_fn(n_dims, n_dims, |j, k| {
        // reduce the exponent first so large products keep full precision
        let e = (j * k) % n_dims;
        let angle = std::f64::consts::TAU * e as f64 / n_dims as f64;
        C64::from_polar(norm, angle)
    });
    Ok(UnitaryMatrix::from_checked(m))
}

/// Undirected simple graph on vertices `0..n_vertices`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &(a, b) in &edges {
            if a >= n_vertices || b >= n_vertices {
                return Err(Error::InvalidGraph(format!("edge ({a}, {b}) leaves 0..{n_vertices}")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({a}, {b})")));
            }
        }
        Ok(Self { n_vertices, edges })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbour lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_vertices];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.n_vertices == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.n_vertices];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !std::mem::replace(&mut seen[w], true) {
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Directed arcs `(source, target)`, grouped by source in increasing
    /// vertex order and by target within a source.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        self.adjacency()
            .into_iter()
            .enumerate()
            .flat_map(|(v, nbrs)| nbrs.into_iter().map(move |w| (v, w)))
            .collect()
    }
}

/// `k` leaves joined to one centre. Leaves are vertices `0..k`, the centre is `k`.
pub fn star_graph(k: usize) -> Result<Graph> {
    if k == 0 {
        return Err(Error::InvalidGraph("a star needs at least one leaf".into()));
    }
    Graph::new(k + 1, (0..k).map(|leaf| (leaf, k)).collect())
}

/// Tree in which every interior vertex has `degree` neighbours, grown for
/// `generations` levels from root 0; vertices are numbered level by level.
pub fn cayley_tree(degree: usize, generations: usize) -> Result<Graph> {
    if degree < 2 || generations < 1 {
        return Err(Error::InvalidGraph("need degree >= 2 and generations >= 1".into()));
    }
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    let mut next_id = 1;
    for _ in 0..generations {
        let mut next = Vec::new();
        for &v in &frontier {
            let children = if v == 0 { degree } else { degree - 1 };
            for _ in 0..children {
                edges.push((v, next_id));
                next.push(next_id);
                next_id += 1;
            }
        }
        frontier = next;
    }
    Graph::new(next_id, edges)
}

/// Walk operator `S C` with the Grover coin, on the arc basis of [`Graph::arcs`].
pub fn dtqw_step(g: &Graph) -> Result<UnitaryMatrix> {
    if g.edges.is_empty() {
        return Err(Error::InvalidGraph("graph has no edges".into()));
    }
    if !g.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let arcs = g.arcs();
    let m = arcs.len();
    let index = |a: (usize, usize)| arcs.binary_search(&a).expect("arc exists");
    let mut coin = DMatrix::<f64>::zeros(m, m);
    let mut start = 0;
    while start < m {
        let v = arcs[start].0;
        let end = start + arcs[start..].iter().take_while(|a| a.0 == v).count();
        let d = (end - start) as f64;
        for i in start..end {
            for j in start..end {
                coin[(i, j)] = 2.0 / d - if i == j { 1.0 } else { 0.0 };
            }
        }
        start = end;
    }
    let mut u = DMatrix::<f64>::zeros(m, m);
    for (i, &(v, w)) in arcs.iter().enumerate() {
        // S sends arc (v, w) to (w, v)
        u.row_mut(index((w, v))).copy_from(&coin.row(i));
    }
    Ok(UnitaryMatrix::from_checked(u.map(|x| C64::new(x, 0.0))))
}

/// Haar-random orthogonal matrix.
pub fn random_orthogonal(n_dims: usize, seed: u64) -> Result<UnitaryMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(UnitaryMatrix::from_checked(haar_orthogonal(n_dims, &mut rng)?.map(|x| C64::new(x, 0.0))))
}

/// Haar-random unitary matrix.
pub fn random_unitary(n_dims: usize, seed: u64) -> Result<UnitaryMatrix> {
    if n_dims == 0 {
        return Err(Error::Shape("dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(n_dims, n_dims, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n_dims {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for x in q.column_mut(j).iter_mut() {
            *x *= ph;
        }
    }
    Ok(UnitaryMatrix::from_checked(q))
}

pub(crate) fn haar_orthogonal<R: Rng>(n_dims: usize, rng: &mut R) -> Result<DMatrix<f64>> {
    if n_dims == 0 {
        return Err(Error::Shape("dimension must be positive".into()));
    }
    let g = DMatrix::from_fn(n_dims, n_dims, |_, _| rng.sample::<f64, _>(StandardNormal));
    let (mut q, r) = g.qr().unpack();
    for j in 0..n_dims {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Ok(q)
}

/// Random orthogonal matrix whose zeros include every `false` of `pattern`.
///
/// Starts from a permutation matrix inside the pattern and applies random
/// Givens rotations on row pairs (from the left) and column pairs (from the
/// right) whenever the rotated pair's joint support stays inside the
/// pattern.
pub fn random_orthogonal_sparse(n_dims: usize, pattern: &[Vec<bool>], seed: u64) -> Result<UnitaryMatrix> {
    if n_dims < 2 {
        return Err(Error::Shape("dimension must be at least 2".into()));
    }
    if pattern.len() != n_dims || pattern.iter().any(|r| r.len() != n_dims) {
        return Err(Error::Shape(format!("pattern must be {n_dims}x{n_dims}")));
    }
    let perm = perfect_matching(pattern).ok_or_else(|| {
        Error::InfeasiblePattern("no permutation fits inside the pattern, so every matrix on it is singular".into())
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = DMatrix::<f64>::zeros(n_dims, n_dims);
    for (i, &j) in perm.iter().enumerate() {
        m[(i, j)] = if rng.random::<bool>() { 1.0 } else { -1.0 };
    }
    let allowed = |i: usize, j: usize| pattern[i][j];
    let mut pairs: Vec<(usize, usize)> = (0..n_dims).flat_map(|i| (i + 1..n_dims).map(move |j| (i, j))).collect();
    for _sweep in 0..3 {
        pairs.shuffle(&mut rng);
        for &(a, b) in &pairs {
            let t: f64 = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            let (s, c) = t.sin_cos();
            let rows_ok = (0..n_dims).all(|k| {
                let used = m[(a, k)] != 0.0 || m[(b, k)] != 0.0;
                !used || (allowed(a, k) && allowed(b, k))
            });
            if rows_ok {
                for k in 0..n_dims {
                    let (x, y) = (m[(a, k)], m[(b, k)]);
                    m[(a, k)] = c * x - s * y;
                    m[(b, k)] = s * x + c * y;
                }
            }
            let cols_ok = (0..n_dims).all(|k| {
                let used = m[(k, a)] != 0.0 || m[(k, b)] != 0.0;
                !used || (allowed(k, a) && allowed(k, b))
            });
            if cols_ok {
                for k in 0..n_dims {
                    let (x, y) = (m[(k, a)], m[(k, b)]);
                    m[(k, a)] = c * x - s * y;
                    m[(k, b)] = s * x + c * y;
                }
            }
        }
    }
    Ok(UnitaryMatrix::from_checked(m.map(|x| C64::new(x, 0.0))))
}

/// Row-to-column assignment inside the pattern (augmenting paths).
fn perfect_matching(pattern: &[Vec<bool>]) -> Option<Vec<usize>> {
    let n = pattern.len();
    let mut col_owner: Vec<Option<usize>> = vec![None; n];
    fn augment(r: usize, pattern: &[Vec<bool>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for c in 0..pattern.len() {
            if pattern[r][c] && !seen[c] {
                seen[c] = true;
                if owner[c].is_none_or(|o| augment(o, pattern, seen, owner)) {
                    owner[c] = Some(r);
                    return true;
                }
            }
        }
        false
    }
    for r in 0..n {
        let mut seen = vec![false; n];
        if !augment(r, pattern, &mut seen, &mut col_owner) {
            return None;
        }
    }
    let mut row_to_col = vec![0; n];
    for (c, o) in col_owner.iter().enumerate() {
        row_to_col[o.expect("perfect")] = c;
    }
    Some(row_to_col)
}

/// 8x8 sparse orthogonal test matrix as printed to four decimals.
pub const SPARSE_ORTHOGONAL_8_PRINTED: [[f64; 8]; 8] = [
    [0.0438, 0.0, 0.0, 0.0, 0.9990, 0.0, 0.0, 0.0],
    [0.1297, 0.8689, -0.2956, 0.0, -0.0057, 0.1538, -0.3423, 0.0],
    [-0.2923, 0.0, 0.6661, 0.0, 0.0128, 0.0, -0.6861, 0.0],
    [-0.0061, -0.0412, 0.0140, 0.7058, 0.0003, 0.3008, 0.0162, -0.6397],
    [0.9147, 0.0, 0.4021, 0.0, -0.0401, 0.0, 0.0, 0.0],
    [0.0185, 0.1242, -0.0422, 0.3961, -0.0008, -0.9073, -0.0489, 0.0],
    [0.2424, -0.4762, -0.5524, 0.0, -0.0106, 0.0, -0.6397, 0.0],
    [0.0051, 0.0343, -0.0117, -0.5874, -0.0002, -0.2503, -0.0135, -0.7686],
];

/// The printed 8x8 matrix projected onto the nearest orthogonal matrix
/// (`U V^T` from its SVD); exact zeros stay zero up to rounding, which is
/// then cleared.
pub fn sparse_orthogonal_fixture() -> UnitaryMatrix {
    let a = DMatrix::from_fn(8, 8, |i, j| SPARSE_ORTHOGONAL_8_PRINTED[i][j]);
    let svd = a.svd(true, true);
    let mut q = svd.u.expect("requested") * svd.v_t.expect("requested");
    for i in 0..8 {
        for j in 0..8 {
            if SPARSE_ORTHOGONAL_8_PRINTED[i][j] == 0.0 && q[(i, j)].abs() < 1e-12 {
                q[(i, j)] = 0.0;
            }
        }
    }
    UnitaryMatrix::from_checked(q.map(|x| C64::new(x, 0.0)))
}
