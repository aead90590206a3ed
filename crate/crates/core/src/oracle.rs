//! Exhaustive chromatic-number and independence-number solvers for tiny
//! instances. These exist to cross-check the greedy heuristics and the
//! repair step, so they favour obvious correctness over speed and refuse
//! inputs past a hard size guard.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::hypergraph::{Hypergraph, Vertex};

/// Largest `n` accepted by [`exact_chromatic`].
pub const MAX_CHROMATIC_N: usize = 14;
/// Largest `n` accepted by [`exact_alpha`].
pub const MAX_ALPHA_N: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    /// Instance exceeds the exhaustive-search size guard.
    TooLarge { n: usize, max: usize },
    /// The hypergraph contains a full loop, so no proper coloring exists.
    Uncolorable { edge: usize },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TooLarge { n, max } => write!(f, "n = {n} exceeds oracle guard {max}"),
            Self::Uncolorable { edge } => {
                write!(f, "edge {edge} is a full loop; no proper coloring exists")
            }
        }
    }
}

impl core::error::Error for OracleError {}

/// Minimum palette size admitting a proper coloring, by exhaustive
/// backtracking with first-use symmetry pruning. Requires `n <= 14`.
pub fn exact_chromatic(h: &Hypergraph) -> Result<usize, OracleError> {
    if h.n() > MAX_CHROMATIC_N {
        return Err(OracleError::TooLarge { n: h.n(), max: MAX_CHROMATIC_N });
    }
    if let Some(i) = (0..h.num_edges()).find(|&i| h.edge_is_full_loop(i)) {
        return Err(OracleError::Uncolorable { edge: i });
    }
    if h.num_edges() == 0 {
        return Ok(1);
    }
    let inc = h.incidence();
    for k in 1..=h.n() {
        let mut colors = vec![u32::MAX; h.n()];
        if colorable(h, &inc, &mut colors, 0, k as u32) {
            return Ok(k);
        }
    }
    // Unreachable for loop-free hypergraphs: singleton classes are proper.
    Ok(h.n())
}

fn colorable(h: &Hypergraph, inc: &[Vec<u32>], colors: &mut [u32], v: usize, k: u32) -> bool {
    if v == h.n() {
        return true;
    }
    let max_used = colors[..v].iter().copied().max().map_or(0, |c| c + 1);
    // Trying colors beyond the first unused one only relabels classes.
    let limit = k.min(max_used + 1);
    for c in 0..limit {
        colors[v] = c;
        if !completes_mono_edge(h, inc, colors, v as Vertex, c) {
            if colorable(h, inc, colors, v + 1, k) {
                return true;
            }
        }
    }
    colors[v] = u32::MAX;
    false
}

/// Does assigning `c` to `v` finish an edge whose slots are now all `c`?
/// Vertices are colored in id order, so only fully-assigned edges can fire.
fn completes_mono_edge(h: &Hypergraph, inc: &[Vec<u32>], colors: &[u32], v: Vertex, c: u32) -> bool {
    inc[v as usize].iter().any(|&i| {
        h.edge(i as usize)
            .iter()
            .all(|&w| if w == v { true } else { colors.get(w as usize).is_some_and(|&cw| cw == c) })
    })
}

/// Maximum size of an independent set, by branch and bound over vertex
/// bitmasks. Requires `n <= 20`.
pub fn exact_alpha(h: &Hypergraph) -> Result<usize, OracleError> {
    let n = h.n();
    if n > MAX_ALPHA_N {
        return Err(OracleError::TooLarge { n, max: MAX_ALPHA_N });
    }
    // Distinct-vertex masks; multiplicity is irrelevant for containment.
    let edge_masks: Vec<u32> = h
        .edges()
        .map(|e| e.iter().fold(0u32, |m, &v| m | (1 << v)))
        .collect();
    let mut inc: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (i, e) in h.edges().enumerate() {
        let mut prev = None;
        for &v in e {
            if prev != Some(v) {
                inc[v as usize].push(edge_masks[i]);
                prev = Some(v);
            }
        }
    }
    let mut best = 0usize;
    branch(&inc, n, 0, 0u32, 0, &mut best);
    Ok(best)
}

fn branch(inc: &[Vec<u32>], n: usize, v: usize, set: u32, size: usize, best: &mut usize) {
    if size + (n - v) <= *best {
        return;
    }
    if v == n {
        *best = (*best).max(size);
        return;
    }
    let candidate = set | (1 << v);
    // Feasible iff no edge through v falls entirely inside the new set.
    if inc[v].iter().all(|&mask| mask & !candidate != 0) {
        branch(inc, n, v + 1, candidate, size + 1, best);
    }
    branch(inc, n, v + 1, set, size, best);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(r: usize, n: usize, edges: &[&[Vertex]]) -> Hypergraph {
        Hypergraph::new(r, n, edges.iter().copied()).unwrap()
    }

    fn k4_triples() -> Hypergraph {
        h(3, 4, &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]])
    }

    #[test]
    fn chromatic_edgeless_is_one() {
        assert_eq!(exact_chromatic(&Hypergraph::empty(3, 5).unwrap()).unwrap(), 1);
    }

    #[test]
    fn chromatic_single_edge_is_two() {
        assert_eq!(exact_chromatic(&h(3, 3, &[&[0, 1, 2]])).unwrap(), 2);
    }

    #[test]
    fn chromatic_k4_triples_is_two() {
        // A 2+2 split leaves no monochromatic triple.
        assert_eq!(exact_chromatic(&k4_triples()).unwrap(), 2);
    }

    #[test]
    fn chromatic_rejects_oversize_and_full_loops() {
        let big = Hypergraph::empty(3, 15).unwrap();
        assert_eq!(
            exact_chromatic(&big),
            Err(OracleError::TooLarge { n: 15, max: MAX_CHROMATIC_N })
        );
        let looped = h(3, 2, &[&[1, 1, 1]]);
        assert_eq!(exact_chromatic(&looped), Err(OracleError::Uncolorable { edge: 0 }));
    }

    #[test]
    fn chromatic_partial_loop_acts_like_graph_edge() {
        // {0,0,1} forces distinct colors on 0 and 1.
        assert_eq!(exact_chromatic(&h(3, 2, &[&[0, 0, 1]])).unwrap(), 2);
    }

    #[test]
    fn alpha_edgeless_is_n() {
        assert_eq!(exact_alpha(&Hypergraph::empty(3, 7).unwrap()).unwrap(), 7);
    }

    #[test]
    fn alpha_single_edge() {
        assert_eq!(exact_alpha(&h(3, 3, &[&[0, 1, 2]])).unwrap(), 2);
    }

    #[test]
    fn alpha_k4_triples_is_two() {
        // Any three vertices contain a triple.
        assert_eq!(exact_alpha(&k4_triples()).unwrap(), 2);
    }

    #[test]
    fn alpha_full_loop_excludes_vertex() {
        assert_eq!(exact_alpha(&h(3, 3, &[&[0, 0, 0]])).unwrap(), 2);
    }

    #[test]
    fn alpha_rejects_oversize() {
        let big = Hypergraph::empty(3, 21).unwrap();
        assert_eq!(exact_alpha(&big), Err(OracleError::TooLarge { n: 21, max: MAX_ALPHA_N }));
    }

    #[test]
    fn chromatic_needs_three_colors_sometimes() {
        // Complete 3-uniform hypergraph on 5 vertices: classes of size <= 2
        // are needed, so chi = ceil(5/2) = 3.
        let mut edges = alloc::vec::Vec::new();
        for a in 0..5u32 {
            for b in (a + 1)..5 {
                for c in (b + 1)..5 {
                    edges.push([a, b, c]);
                }
            }
        }
        let g = Hypergraph::new(3, 5, edges).unwrap();
        assert_eq!(exact_chromatic(&g).unwrap(), 3);
        assert_eq!(exact_alpha(&g).unwrap(), 2);
    }
}
