//! Small multigraph toolkit: CSR adjacency, BFS, union-find and a brute-force
//! two-vertex separator search used as an oracle.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

pub const UNREACHED: u32 = u32::MAX;

/// Undirected multigraph; parallel edges keep their own ids.
#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32)>,
    offsets: Vec<usize>,
    // (neighbor, edge index)
    adj: Vec<(u32, u32)>,
}

impl Graph {
    pub fn from_edges(n: usize, edges: Vec<(u32, u32)>) -> Self {
        let mut deg = vec![0usize; n + 1];
        for &(u, v) in &edges {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + deg[v];
        }
        let mut fill = offsets.clone();
        let mut adj = vec![(0u32, 0u32); offsets[n]];
        for (e, &(u, v)) in edges.iter().enumerate() {
            adj[fill[u as usize]] = (v, e as u32);
            fill[u as usize] += 1;
            adj[fill[v as usize]] = (u, e as u32);
            fill[v as usize] += 1;
        }
        Graph { n, edges, offsets, adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> &[(u32, u32)] {
        &self.adj[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    #[inline]
    pub fn degree(&self, v: u32) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    pub fn bfs(&self, source: u32) -> Vec<u32> {
        self.bfs_avoiding(source, &[])
    }

    fn bfs_avoiding(&self, source: u32, removed: &[u32]) -> Vec<u32> {
        let mut dist = vec![UNREACHED; self.n];
        if removed.contains(&source) {
            return dist;
        }
        dist[source as usize] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let d = dist[v as usize];
            for &(w, _) in self.neighbors(v) {
                if dist[w as usize] == UNREACHED && !removed.contains(&w) {
                    dist[w as usize] = d + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

/// Edges `{u, v}` not touching `source` whose two endpoints together separate
/// `source` from every target other than `u` and `v`. Quadratic; meant as an oracle.
pub fn separating_edges(g: &Graph, source: u32, targets: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if u == source || v == source {
            continue;
        }
        let dist = g.bfs_avoiding(source, &[u, v]);
        let reaches = targets
            .iter()
            .any(|&t| t != u && t != v && dist[t as usize] != UNREACHED);
        if !reaches {
            out.push(e as u32);
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (ka, kb) = (self.rank[ra as usize], self.rank[rb as usize]);
        if ka < kb {
            self.parent[ra as usize] = rb;
        } else {
            self.parent[rb as usize] = ra;
            if ka == kb {
                self.rank[ra as usize] += 1;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_triangles_share_the_cut() {
        // root r = 0, a = 1, b = 2, far vertex c = 3
        let g = Graph::from_edges(4, vec![(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(separating_edges(&g, 0, &[1, 3, 2]), vec![2]);
        assert_eq!(g.bfs(0), vec![0, 1, 1, 2]);
    }

    #[test]
    fn multi_edges_count_in_degree() {
        let g = Graph::from_edges(2, vec![(0, 1), (0, 1)]);
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.neighbors(1).len(), 2);
    }

    #[test]
    fn union_find_components() {
        let mut uf = UnionFind::new(6);
        uf.union(0, 1);
        uf.union(2, 3);
        uf.union(1, 3);
        assert_eq!(uf.find(0), uf.find(2));
        assert_ne!(uf.find(0), uf.find(4));
        assert!(!uf.union(0, 3));
    }
}
