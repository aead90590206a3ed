//! Core hypergraph and coloring types plus the predicates everything else is
//! built on: properness, independence, class profiles, bad-edge scans, and
//! degeneracy orderings.
//!
//! Edges are multisets of exactly `r` vertex ids, stored sorted. Loops (a
//! vertex repeated within an edge) and multi-edges (repeated edges) are
//! representable on purpose: the sampling pipeline produces them as
//! intermediate objects. A *full loop* `{v, v, ..., v}` is monochromatic
//! under every total coloring.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

/// Vertex id. Vertices of a hypergraph on `n` vertices are `0..n`.
pub type Vertex = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HypergraphError {
    /// An edge did not have exactly `r` entries.
    EdgeWrongSize { edge: usize, len: usize, r: usize },
    /// An edge referenced a vertex id `>= n`.
    VertexOutOfRange { edge: usize, vertex: Vertex, n: usize },
    /// The flat edge buffer length is not a multiple of `r`.
    RaggedEdgeBuffer { len: usize, r: usize },
    /// `r < 2` or `n == 0`.
    BadShape { r: usize, n: usize },
    /// An operation requiring a total coloring saw an uncolored vertex.
    PartialColoring { vertex: Vertex },
    /// Coloring length does not match the vertex count.
    ColoringSizeMismatch { expected: usize, got: usize },
    /// A color id `>= palette_size`.
    ColorOutOfPalette { vertex: Vertex, color: u32, palette: u32 },
}

impl fmt::Display for HypergraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EdgeWrongSize { edge, len, r } => {
                write!(f, "edge {edge} has {len} entries, expected r = {r}")
            }
            Self::VertexOutOfRange { edge, vertex, n } => {
                write!(f, "edge {edge} mentions vertex {vertex}, but n = {n}")
            }
            Self::RaggedEdgeBuffer { len, r } => {
                write!(f, "flat edge buffer of length {len} is not a multiple of r = {r}")
            }
            Self::BadShape { r, n } => write!(f, "invalid shape: r = {r}, n = {n}"),
            Self::PartialColoring { vertex } => {
                write!(f, "vertex {vertex} is uncolored but the operation needs a total coloring")
            }
            Self::ColoringSizeMismatch { expected, got } => {
                write!(f, "coloring covers {got} vertices, hypergraph has {expected}")
            }
            Self::ColorOutOfPalette { vertex, color, palette } => {
                write!(f, "vertex {vertex} has color {color} outside palette of size {palette}")
            }
        }
    }
}

impl core::error::Error for HypergraphError {}

/// An r-uniform multi-hypergraph on vertices `0..n`.
///
/// Edges are stored as a flat buffer with stride `r`, each edge sorted
/// ascending. Both loops and duplicate edges are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Hypergraph {
    r: usize,
    n: usize,
    edges: Vec<Vertex>,
}

impl Hypergraph {
    /// Builds a hypergraph from explicit edges, validating shape and range.
    pub fn new<I, E>(r: usize, n: usize, edges: I) -> Result<Self, HypergraphError>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[Vertex]>,
    {
        if r < 2 || n == 0 {
            return Err(HypergraphError::BadShape { r, n });
        }
        let mut flat = Vec::new();
        for (i, e) in edges.into_iter().enumerate() {
            let e = e.as_ref();
            if e.len() != r {
                return Err(HypergraphError::EdgeWrongSize { edge: i, len: e.len(), r });
            }
            for &v in e {
                if v as usize >= n {
                    return Err(HypergraphError::VertexOutOfRange { edge: i, vertex: v, n });
                }
            }
            let start = flat.len();
            flat.extend_from_slice(e);
            flat[start..].sort_unstable();
        }
        Ok(Self { r, n, edges: flat })
    }

    /// Builds from an already-flat buffer (stride `r`); sorts each edge.
    pub fn from_flat(r: usize, n: usize, mut flat: Vec<Vertex>) -> Result<Self, HypergraphError> {
        if r < 2 || n == 0 {
            return Err(HypergraphError::BadShape { r, n });
        }
        if flat.len() % r != 0 {
            return Err(HypergraphError::RaggedEdgeBuffer { len: flat.len(), r });
        }
        for (i, chunk) in flat.chunks_exact_mut(r).enumerate() {
            for &v in chunk.iter() {
                if v as usize >= n {
                    return Err(HypergraphError::VertexOutOfRange { edge: i, vertex: v, n });
                }
            }
            chunk.sort_unstable();
        }
        Ok(Self { r, n, edges: flat })
    }

    /// Edgeless hypergraph.
    pub fn empty(r: usize, n: usize) -> Result<Self, HypergraphError> {
        Self::new(r, n, core::iter::empty::<&[Vertex]>())
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len() / self.r
    }

    /// Edge `i` as a sorted slice of `r` vertex ids.
    pub fn edge(&self, i: usize) -> &[Vertex] {
        &self.edges[i * self.r..(i + 1) * self.r]
    }

    pub fn edges(&self) -> impl Iterator<Item = &[Vertex]> {
        self.edges.chunks_exact(self.r)
    }

    /// Slot degree: the number of edge slots equal to `v`, so a loop
    /// contributes its multiplicity.
    pub fn degree(&self, v: Vertex) -> usize {
        self.edges.iter().filter(|&&w| w == v).count()
    }

    /// All slot degrees at once.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for &v in &self.edges {
            deg[v as usize] += 1;
        }
        deg
    }

    /// Per-vertex lists of incident edge indices (an edge appears once per
    /// vertex it contains, regardless of multiplicity).
    pub fn incidence(&self) -> Vec<Vec<u32>> {
        let mut inc = vec![Vec::new(); self.n];
        for (i, e) in self.edges().enumerate() {
            let mut prev = None;
            for &v in e {
                if prev != Some(v) {
                    inc[v as usize].push(i as u32);
                    prev = Some(v);
                }
            }
        }
        inc
    }

    /// True iff the edge has a repeated vertex.
    pub fn edge_is_loop(&self, i: usize) -> bool {
        self.edge(i).windows(2).any(|w| w[0] == w[1])
    }

    /// True iff all `r` slots of the edge are the same vertex.
    pub fn edge_is_full_loop(&self, i: usize) -> bool {
        let e = self.edge(i);
        e.iter().all(|&v| v == e[0])
    }

    /// No loops and no repeated edges.
    pub fn is_simple(&self) -> bool {
        if (0..self.num_edges()).any(|i| self.edge_is_loop(i)) {
            return false;
        }
        let mut sorted: Vec<&[Vertex]> = self.edges().collect();
        sorted.sort_unstable();
        sorted.windows(2).all(|w| w[0] != w[1])
    }
}

/// A vertex coloring, possibly partial. `None` marks an uncolored vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Coloring {
    assign: Vec<Option<u32>>,
    palette: u32,
}

impl Coloring {
    /// All vertices uncolored.
    pub fn uncolored(n: usize, palette: u32) -> Self {
        Self { assign: vec![None; n], palette }
    }

    /// Total coloring from explicit colors.
    pub fn from_colors(colors: Vec<u32>, palette: u32) -> Result<Self, HypergraphError> {
        for (v, &c) in colors.iter().enumerate() {
            if c >= palette {
                return Err(HypergraphError::ColorOutOfPalette {
                    vertex: v as Vertex,
                    color: c,
                    palette,
                });
            }
        }
        Ok(Self { assign: colors.into_iter().map(Some).collect(), palette })
    }

    /// Possibly-partial coloring from options.
    pub fn from_options(assign: Vec<Option<u32>>, palette: u32) -> Result<Self, HypergraphError> {
        for (v, c) in assign.iter().enumerate() {
            if let Some(c) = c {
                if *c >= palette {
                    return Err(HypergraphError::ColorOutOfPalette {
                        vertex: v as Vertex,
                        color: *c,
                        palette,
                    });
                }
            }
        }
        Ok(Self { assign, palette })
    }

    pub fn len(&self) -> usize {
        self.assign.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assign.is_empty()
    }

    pub fn palette_size(&self) -> u32 {
        self.palette
    }

    pub fn color(&self, v: Vertex) -> Option<u32> {
        self.assign[v as usize]
    }

    pub fn set(&mut self, v: Vertex, c: u32) -> Result<(), HypergraphError> {
        if c >= self.palette {
            return Err(HypergraphError::ColorOutOfPalette { vertex: v, color: c, palette: self.palette });
        }
        self.assign[v as usize] = Some(c);
        Ok(())
    }

    pub fn uncolor(&mut self, v: Vertex) {
        self.assign[v as usize] = None;
    }

    /// Extends the palette without touching assignments.
    pub fn grow_palette(&mut self, extra: u32) {
        self.palette += extra;
    }

    /// Shrinks the palette to `max assigned color + 1` (at least 1).
    pub fn shrink_palette_to_used(&mut self) {
        let used = self.assign.iter().flatten().max().map_or(0, |&c| c + 1);
        self.palette = used.max(1);
    }

    pub fn is_total(&self) -> bool {
        self.assign.iter().all(Option::is_some)
    }

    pub fn uncolored_vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.assign
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_none())
            .map(|(v, _)| v as Vertex)
    }

    pub fn uncolored_count(&self) -> usize {
        self.assign.iter().filter(|c| c.is_none()).count()
    }

    fn check_total_for(&self, h: &Hypergraph) -> Result<(), HypergraphError> {
        if self.assign.len() != h.n() {
            return Err(HypergraphError::ColoringSizeMismatch { expected: h.n(), got: self.assign.len() });
        }
        match self.uncolored_vertices().next() {
            Some(v) => Err(HypergraphError::PartialColoring { vertex: v }),
            None => Ok(()),
        }
    }
}

/// Counts, per color class `A` and `1 <= j <= r-1`, the edges with exactly
/// `j` slots in `A`; monochromatic edges are counted in `bad` instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassProfile {
    r: usize,
    palette: u32,
    counts: Vec<u64>,
    /// Number of monochromatic edges (full loops included).
    pub bad: u64,
}

impl ClassProfile {
    /// `X_{A,j}` for color class `a` and `1 <= j <= r-1`.
    pub fn count(&self, a: u32, j: usize) -> u64 {
        debug_assert!((1..self.r).contains(&j));
        self.counts[a as usize * (self.r - 1) + (j - 1)]
    }

    pub fn palette_size(&self) -> u32 {
        self.palette
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// `sum_{A,j} j * X_{A,j} + r * bad`; equals `r * |edges|` for a total
    /// coloring.
    pub fn slot_mass(&self) -> u64 {
        let mut mass = self.r as u64 * self.bad;
        for a in 0..self.palette {
            for j in 1..self.r {
                mass += j as u64 * self.count(a, j);
            }
        }
        mass
    }
}

/// True iff no edge of `h` is monochromatic under the total coloring `col`.
///
/// A full loop `{v, ..., v}` is monochromatic under any total coloring, so a
/// hypergraph containing one is never properly colorable.
pub fn is_proper(h: &Hypergraph, col: &Coloring) -> Result<bool, HypergraphError> {
    col.check_total_for(h)?;
    Ok(find_bad_edges(h, col).is_empty())
}

/// Indices of monochromatic edges, ascending. An edge with an uncolored
/// vertex is never monochromatic.
pub fn find_bad_edges(h: &Hypergraph, col: &Coloring) -> Vec<usize> {
    let mut bad = Vec::new();
    'edges: for (i, e) in h.edges().enumerate() {
        let first = match col.color(e[0]) {
            Some(c) => c,
            None => continue,
        };
        for &v in &e[1..] {
            match col.color(v) {
                Some(c) if c == first => {}
                _ => continue 'edges,
            }
        }
        bad.push(i);
    }
    bad
}

/// True iff no edge of `h` lies entirely inside `s`.
pub fn is_independent(h: &Hypergraph, s: &[Vertex]) -> bool {
    let mut member = vec![false; h.n()];
    for &v in s {
        member[v as usize] = true;
    }
    !h.edges().any(|e| e.iter().all(|&v| member[v as usize]))
}

/// Full class profile of a total coloring.
pub fn class_profile(h: &Hypergraph, col: &Coloring) -> Result<ClassProfile, HypergraphError> {
    col.check_total_for(h)?;
    let r = h.r();
    let palette = col.palette_size();
    let mut counts = vec![0u64; palette as usize * (r - 1)];
    let mut bad = 0u64;
    let mut per_class: Vec<(u32, usize)> = Vec::with_capacity(r);
    for e in h.edges() {
        per_class.clear();
        for &v in e {
            let c = col.color(v).expect("checked total");
            match per_class.iter_mut().find(|(cc, _)| *cc == c) {
                Some((_, j)) => *j += 1,
                None => per_class.push((c, 1)),
            }
        }
        if per_class.len() == 1 {
            bad += 1;
        } else {
            for &(c, j) in &per_class {
                counts[c as usize * (r - 1) + (j - 1)] += 1;
            }
        }
    }
    Ok(ClassProfile { r, palette, counts, bad })
}

/// Result of the minimum-degree elimination process on a vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegeneracyOrder {
    /// Vertices in removal order.
    pub order: Vec<Vertex>,
    /// Maximum over the process of the minimum induced degree seen.
    pub degeneracy: usize,
}

/// Runs minimum-degree elimination on the sub-hypergraph induced on `s`.
///
/// Only edges with all slots inside the remaining set count, and a vertex's
/// induced degree is the number of such edges containing it (an edge counts
/// once even if it repeats the vertex). Ties break toward the smallest vertex
/// id. Re-inserting vertices in reverse order, each sees at most
/// `degeneracy` induced edges among later-removed vertices, which is what
/// the fresh-palette recoloring in [`crate::pipeline::repair`] relies on.
pub fn degeneracy_order(h: &Hypergraph, s: &[Vertex]) -> DegeneracyOrder {
    let mut in_s = vec![false; h.n()];
    for &v in s {
        in_s[v as usize] = true;
    }
    let members: Vec<Vertex> = (0..h.n() as Vertex).filter(|&v| in_s[v as usize]).collect();

    // Induced edges and the induced (edge-count) degrees.
    let mut degree = vec![0u32; h.n()];
    let mut edge_alive = Vec::new();
    let mut induced: Vec<usize> = Vec::new();
    for (i, e) in h.edges().enumerate() {
        if e.iter().all(|&v| in_s[v as usize]) {
            edge_alive.push(true);
            induced.push(i);
            let mut prev = None;
            for &v in e {
                if prev != Some(v) {
                    degree[v as usize] += 1;
                    prev = Some(v);
                }
            }
        }
    }
    // Incidence restricted to induced edges, indexed into `induced`.
    let mut inc = vec![Vec::new(); h.n()];
    for (k, &i) in induced.iter().enumerate() {
        let mut prev = None;
        for &v in h.edge(i) {
            if prev != Some(v) {
                inc[v as usize].push(k);
                prev = Some(v);
            }
        }
    }

    // Lazy heap of (degree, vertex); stale entries are skipped. Reverse
    // ordering pops the lexicographic minimum, which is exactly
    // "minimum degree, ties by smallest id".
    let mut heap: BinaryHeap<Reverse<(u32, Vertex)>> = members
        .iter()
        .map(|&v| Reverse((degree[v as usize], v)))
        .collect();
    let mut removed = vec![false; h.n()];
    let mut order = Vec::with_capacity(members.len());
    let mut degeneracy = 0usize;

    while let Some(Reverse((dv, v))) = heap.pop() {
        if removed[v as usize] || dv != degree[v as usize] {
            continue;
        }
        removed[v as usize] = true;
        degeneracy = degeneracy.max(dv as usize);
        order.push(v);
        for &k in &inc[v as usize] {
            if !edge_alive[k] {
                continue;
            }
            edge_alive[k] = false;
            let mut prev = None;
            for &w in h.edge(induced[k]) {
                if prev == Some(w) {
                    continue;
                }
                prev = Some(w);
                if w != v && !removed[w as usize] {
                    degree[w as usize] -= 1;
                    heap.push(Reverse((degree[w as usize], w)));
                }
            }
        }
    }
    DegeneracyOrder { order, degeneracy }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(r: usize, n: usize, edges: &[&[Vertex]]) -> Hypergraph {
        Hypergraph::new(r, n, edges.iter().copied()).unwrap()
    }

    fn total(colors: &[u32]) -> Coloring {
        let palette = colors.iter().max().map_or(0, |&c| c + 1).max(1);
        Coloring::from_colors(colors.to_vec(), palette).unwrap()
    }

    #[test]
    fn proper_two_colors_on_one_edge() {
        let g = h(3, 3, &[&[0, 1, 2]]);
        assert!(is_proper(&g, &total(&[0, 0, 1])).unwrap());
        assert!(!is_proper(&g, &total(&[0, 0, 0])).unwrap());
    }

    #[test]
    fn proper_detects_second_mono_edge() {
        let g = h(3, 5, &[&[0, 1, 2], &[2, 3, 4]]);
        assert!(!is_proper(&g, &total(&[0, 0, 1, 1, 1])).unwrap());
    }

    #[test]
    fn proper_rejects_partial() {
        let g = h(3, 3, &[&[0, 1, 2]]);
        let mut col = Coloring::uncolored(3, 2);
        col.set(0, 0).unwrap();
        col.set(1, 1).unwrap();
        assert_eq!(
            is_proper(&g, &col),
            Err(HypergraphError::PartialColoring { vertex: 2 })
        );
    }

    #[test]
    fn full_loop_is_always_monochromatic() {
        let g = h(3, 2, &[&[0, 0, 0]]);
        assert!(!is_proper(&g, &total(&[0, 1])).unwrap());
        assert_eq!(find_bad_edges(&g, &total(&[1, 0])), vec![0]);
    }

    #[test]
    fn independent_examples() {
        let g = h(3, 3, &[&[0, 1, 2]]);
        assert!(is_independent(&g, &[0, 1]));
        assert!(!is_independent(&g, &[0, 1, 2]));
        let empty = Hypergraph::empty(3, 4).unwrap();
        assert!(is_independent(&empty, &[0, 1, 2, 3]));
    }

    #[test]
    fn loop_containment_ignores_multiplicity() {
        let g = h(3, 3, &[&[0, 0, 1]]);
        assert!(!is_independent(&g, &[0, 1]));
        assert!(is_independent(&g, &[0, 2]));
    }

    #[test]
    fn profile_single_edge() {
        let g = h(3, 3, &[&[0, 1, 2]]);
        let p = class_profile(&g, &total(&[0, 0, 1])).unwrap();
        assert_eq!(p.count(0, 2), 1);
        assert_eq!(p.count(1, 1), 1);
        assert_eq!(p.count(0, 1), 0);
        assert_eq!(p.bad, 0);

        let p = class_profile(&g, &total(&[0, 0, 0])).unwrap();
        assert_eq!(p.bad, 1);
        for j in 1..3 {
            assert_eq!(p.count(0, j), 0);
        }
    }

    #[test]
    fn profile_counts_multi_edges_twice() {
        let g = h(3, 3, &[&[0, 1, 2], &[0, 1, 2]]);
        let p = class_profile(&g, &total(&[0, 1, 1])).unwrap();
        assert_eq!(p.count(0, 1), 2);
        assert_eq!(p.count(1, 2), 2);
        assert_eq!(p.slot_mass(), 3 * 2);
    }

    #[test]
    fn bad_edges_ordering_and_cases() {
        let g = h(3, 4, &[&[0, 1, 2], &[1, 2, 3], &[0, 2, 3]]);
        assert!(find_bad_edges(&g, &total(&[0, 1, 0, 1])).is_empty());
        assert_eq!(find_bad_edges(&g, &total(&[0, 0, 0, 0])), vec![0, 1, 2]);
        // Only edge index 1 monochromatic.
        assert_eq!(find_bad_edges(&g, &total(&[1, 0, 0, 0])), vec![1]);
    }

    #[test]
    fn degeneracy_independent_set_is_zero() {
        let g = h(3, 5, &[&[0, 1, 2]]);
        let d = degeneracy_order(&g, &[0, 1, 3]);
        assert_eq!(d.degeneracy, 0);
        assert_eq!(d.order, vec![0, 1, 3]);
    }

    #[test]
    fn degeneracy_single_edge() {
        let g = h(3, 3, &[&[0, 1, 2]]);
        let d = degeneracy_order(&g, &[0, 1, 2]);
        assert_eq!(d.degeneracy, 1);
        assert_eq!(d.order, vec![0, 1, 2]);
    }

    #[test]
    fn degeneracy_k4_triples() {
        // All four triples on four vertices: removing any vertex leaves one
        // surviving edge, so the first removal happens at induced degree 3.
        let g = h(3, 4, &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]]);
        let d = degeneracy_order(&g, &[0, 1, 2, 3]);
        assert_eq!(d.degeneracy, 3);
        assert_eq!(d.order[0], 0);
    }

    #[test]
    fn construction_validates() {
        assert!(matches!(
            Hypergraph::new(3, 3, [[0u32, 1, 5]]),
            Err(HypergraphError::VertexOutOfRange { .. })
        ));
        assert!(matches!(
            Hypergraph::new(3, 3, [vec![0u32, 1]]),
            Err(HypergraphError::EdgeWrongSize { .. })
        ));
        let g = h(3, 3, &[&[2, 0, 1]]);
        assert_eq!(g.edge(0), &[0, 1, 2]);
    }

    #[test]
    fn degrees_count_loop_multiplicity() {
        let g = h(3, 3, &[&[0, 0, 1], &[1, 2, 2]]);
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.degree(1), 2);
        assert_eq!(g.degree(2), 2);
        assert_eq!(g.degrees(), vec![2, 2, 2]);
        assert!(g.edge_is_loop(0));
        assert!(!g.edge_is_full_loop(0));
        assert!(!g.is_simple());
    }
}
