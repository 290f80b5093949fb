use std::collections::VecDeque;

use crate::linalg::sparse::SparseOperator;

/// Reverse Cuthill-McKee ordering of the symmetric sparsity pattern of `op`.
///
/// Returns `perm` with `perm[new] = old`. Ties are broken by index so the
/// result is reproducible.
pub fn reverse_cuthill_mckee(op: &SparseOperator) -> Vec<usize> {
    let n = op.nrows();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (r, c, _) in op.iter() {
        if r != c {
            adj[r].push(c);
            adj[c].push(r);
        }
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    for a in &mut adj {
        a.sort_by_key(|&v| (degree[v], v));
    }

    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (degree[v], v));

    for &seed in &by_degree {
        if visited[seed] {
            continue;
        }
        let start = pseudo_peripheral(seed, &adj, &degree);
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &adj[v] {
                if !visited[w] {
                    visited[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    order.reverse();
    order
}

/// Level structure of a BFS from `root`: (eccentricity, last level).
fn levels(root: usize, adj: &[Vec<usize>]) -> (usize, Vec<usize>) {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[root] = 0;
    let mut queue = VecDeque::from([root]);
    let mut ecc = 0;
    while let Some(v) = queue.pop_front() {
        ecc = ecc.max(dist[v]);
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    let last = (0..adj.len()).filter(|&v| dist[v] == ecc).collect();
    (ecc, last)
}

fn pseudo_peripheral(seed: usize, adj: &[Vec<usize>], degree: &[usize]) -> usize {
    let mut root = seed;
    let (mut ecc, mut last) = levels(root, adj);
    loop {
        let candidate = *last
            .iter()
            .min_by_key(|&&v| (degree[v], v))
            .expect("non-empty level");
        let (e, l) = levels(candidate, adj);
        if e <= ecc {
            return root;
        }
        root = candidate;
        ecc = e;
        last = l;
    }
}
