//! Greedy coloring and independent-set heuristics, and the class-profile
//! threshold check.
//!
//! An edge blocks a color for a vertex only when all of its *other* slots
//! already carry that color, so hypergraph first-fit is much laxer than its
//! graph counterpart. A full loop has no other slots: every color is
//! blocked, the vertex is parked on color 0, and the edge surfaces later in
//! the bad-edge list for the repair step to report.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::hypergraph::{class_profile, Coloring, Hypergraph, HypergraphError, Vertex};

/// Vertex processing order for [`greedy_color`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum GreedyOrder {
    /// Uniformly random permutation (seeded by the caller's rng).
    Random,
    /// Slot degree descending, ties by smallest id. Deterministic.
    DegreeDescending,
}

/// First-fit greedy coloring. Always returns a total coloring; proper
/// whenever `h` has no full loops.
pub fn greedy_color<R: Rng + ?Sized>(h: &Hypergraph, order: GreedyOrder, rng: &mut R) -> Coloring {
    let n = h.n();
    let mut vertices: Vec<Vertex> = (0..n as Vertex).collect();
    match order {
        GreedyOrder::Random => vertices.shuffle(rng),
        GreedyOrder::DegreeDescending => {
            let deg = h.degrees();
            vertices.sort_by_key(|&v| (Reverse(deg[v as usize]), v));
        }
    }
    let inc = h.incidence();
    let mut colors: Vec<Option<u32>> = vec![None; n];
    let mut palette = 1u32;
    let mut blocked = vec![false; 2];
    for &v in &vertices {
        for b in blocked.iter_mut() {
            *b = false;
        }
        let mut full_loop = false;
        for &i in &inc[v as usize] {
            match blocking_color(h, &colors, i as usize, v) {
                Blocking::None => {}
                Blocking::Color(c) => blocked[c as usize] = true,
                Blocking::All => {
                    full_loop = true;
                    break;
                }
            }
        }
        let c = if full_loop {
            0
        } else {
            blocked.iter().position(|&b| !b).expect("buffer has a free slot") as u32
        };
        colors[v as usize] = Some(c);
        palette = palette.max(c + 1);
        // Keep one spare slot beyond the palette so first-fit always finds
        // a free color.
        if blocked.len() < palette as usize + 1 {
            blocked.resize(palette as usize + 1, false);
        }
    }
    Coloring::from_options(colors, palette).expect("colors stay within palette")
}

enum Blocking {
    None,
    Color(u32),
    /// Full loop at this vertex: no admissible color exists.
    All,
}

/// Which color does assigning to `v` have to avoid because of edge `i`?
/// Slots equal to `v` take the new color, so only the other slots matter;
/// the edge blocks `c` exactly when they are all colored `c`.
fn blocking_color(h: &Hypergraph, colors: &[Option<u32>], i: usize, v: Vertex) -> Blocking {
    let mut seen: Option<u32> = None;
    let mut has_other = false;
    for &w in h.edge(i) {
        if w == v {
            continue;
        }
        has_other = true;
        match (colors[w as usize], seen) {
            (None, _) => return Blocking::None,
            (Some(c), None) => seen = Some(c),
            (Some(c), Some(s)) if c == s => {}
            _ => return Blocking::None,
        }
    }
    if !has_other {
        Blocking::All
    } else {
        Blocking::Color(seen.expect("has_other implies a seen color"))
    }
}

/// Random-order maximal independent set: vertices are added when doing so
/// completes no edge inside the set. Returned sorted ascending.
pub fn greedy_independent_set<R: Rng + ?Sized>(h: &Hypergraph, rng: &mut R) -> Vec<Vertex> {
    let n = h.n();
    let mut vertices: Vec<Vertex> = (0..n as Vertex).collect();
    vertices.shuffle(rng);
    let inc = h.incidence();
    let mut member = vec![false; n];
    let mut set = Vec::new();
    for &v in &vertices {
        let completes = inc[v as usize].iter().any(|&i| {
            h.edge(i as usize)
                .iter()
                .all(|&w| w == v || member[w as usize])
        });
        if !completes {
            member[v as usize] = true;
            set.push(v);
        }
    }
    set.sort_unstable();
    set
}

/// Checks `X_{A,j} <= slack * kappa[j-1] * n` for every color class `A` and
/// `1 <= j <= r-1`. Monochromatic edges are accounted in `bad`, not in the
/// profile, so they do not trip this check.
pub fn check_profile(
    h: &Hypergraph,
    col: &Coloring,
    kappa: &[f64],
    n: usize,
    slack: f64,
) -> Result<bool, HypergraphError> {
    let profile = class_profile(h, col)?;
    let r = h.r();
    assert!(kappa.len() >= r - 1, "need kappa_j for j = 1..r-1");
    for a in 0..profile.palette_size() {
        for j in 1..r {
            if profile.count(a, j) as f64 > slack * kappa[j - 1] * n as f64 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
