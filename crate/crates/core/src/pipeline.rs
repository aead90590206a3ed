//! Carrying a coloring through the regularisation and repairing it.
//!
//! The upper-bound pipeline colors the stripped simple hypergraph, runs
//! the trim/augment transformation (which reshuffles edges and can create
//! monochromatic ones), collects the bad edges, uncolors one vertex per bad
//! edge, and recolors that set with a small fresh palette in reverse
//! degeneracy order. Fresh colors never collide with old ones, so only
//! edges lying entirely inside the uncolored set constrain the recoloring;
//! it succeeds whenever the induced degeneracy stays below the fresh
//! palette size, and reports a distinct failure otherwise.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

use crate::coloring::{greedy_color, check_profile, GreedyOrder};
use crate::hypergraph::{degeneracy_order, find_bad_edges, is_proper, Coloring, Hypergraph, Vertex};
use crate::sampler::{planned_edge_count, strip, PointSystem, SamplerError};
use crate::theory::{kappa_thresholds, predicted_alpha_frac, predicted_chi, TheoryError};

#[derive(Debug, Clone, PartialEq)]
pub enum PipelineError {
    /// Parameter validation failed before any sampling.
    InvalidParams(&'static str),
    Sampler(SamplerError),
    Theory(TheoryError),
    /// Repair ran out of fresh colors; carries the partial outcome.
    RepairFailed(RepairFailure),
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidParams(msg) => write!(f, "invalid pipeline parameters: {msg}"),
            Self::Sampler(e) => write!(f, "sampling failed: {e}"),
            Self::Theory(e) => write!(f, "theory evaluation failed: {e}"),
            Self::RepairFailed(fail) => write!(
                f,
                "repair exhausted its fresh palette of {} at vertex {} (|U| = {}, degeneracy {})",
                fail.delta, fail.stuck_vertex, fail.u, fail.degeneracy_u
            ),
        }
    }
}

impl core::error::Error for PipelineError {}

impl From<SamplerError> for PipelineError {
    fn from(e: SamplerError) -> Self {
        Self::Sampler(e)
    }
}

impl From<TheoryError> for PipelineError {
    fn from(e: TheoryError) -> Self {
        Self::Theory(e)
    }
}

/// Why and where [`repair`] gave up, plus the context the caller needs to
/// report the failed trial.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RepairFailure {
    pub stuck_vertex: Vertex,
    pub delta: u32,
    pub u: usize,
    pub degeneracy_u: usize,
    /// Filled by the pipeline when the failure happened inside a full run.
    pub colors_initial: u32,
    pub bad_edges: usize,
    pub edges_multi: usize,
    pub edges_stripped: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RepairError {
    /// A bad edge was a full loop: no coloring can fix it.
    FullLoop { edge: usize },
    /// First-fit ran out of fresh colors.
    PaletteExhausted(RepairFailure),
}

impl fmt::Display for RepairError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::FullLoop { edge } => write!(f, "bad edge {edge} is a full loop; unrepairable"),
            Self::PaletteExhausted(fail) => write!(
                f,
                "fresh palette of {} exhausted at vertex {} (degeneracy {})",
                fail.delta, fail.stuck_vertex, fail.degeneracy_u
            ),
        }
    }
}

impl core::error::Error for RepairError {}

/// Runs augmentation to completion while keeping the coloring fixed, then
/// scans the final hypergraph for monochromatic edges.
///
/// Edges deleted by the trim or by part removal only relax constraints;
/// the bad list is exactly the monochromatic edges of the final hypergraph
/// under `col` — newly created monochromatic parts plus any surviving
/// loop/multi-edge parts the stripped coloring never saw.
pub fn transform_and_track<R: Rng + ?Sized>(
    mut ps: PointSystem,
    col: &Coloring,
    d: u32,
    rng: &mut R,
) -> Result<(Hypergraph, Coloring, Vec<usize>), SamplerError> {
    ps.augment_to_regular(d, rng)?;
    let h = ps.to_hypergraph();
    let bad = find_bad_edges(&h, col);
    Ok((h, col.clone(), bad))
}

/// Uncolors the smallest vertex of each bad edge and first-fit recolors
/// that set with the fresh palette `{palette, ..., palette + delta - 1}`
/// in reverse degeneracy order.
///
/// Edges leaving the uncolored set are safe (fresh colors differ from all
/// old colors), so only edges fully inside it are checked. Succeeds with a
/// total proper coloring of at most `palette + delta` colors whenever the
/// induced degeneracy is below `delta`; otherwise reports the exhaustion
/// as a distinct failure rather than overflowing the palette.
pub fn repair(
    h: &Hypergraph,
    col: &Coloring,
    bad: &[usize],
    delta: u32,
) -> Result<Coloring, RepairError> {
    assert!(delta >= 1, "repair needs at least one fresh color");
    if bad.is_empty() {
        return Ok(col.clone());
    }
    let mut in_u = vec![false; h.n()];
    for &i in bad {
        let v = h.edge(i)[0]; // edges are sorted: slot 0 is the minimum
        in_u[v as usize] = true;
    }
    let u_set: Vec<Vertex> = (0..h.n() as Vertex).filter(|&v| in_u[v as usize]).collect();
    let deg_order = degeneracy_order(h, &u_set);

    // Edges fully inside U, indexed per vertex.
    let mut inside: Vec<usize> = Vec::new();
    for (i, e) in h.edges().enumerate() {
        if e.iter().all(|&v| in_u[v as usize]) {
            if h.edge_is_full_loop(i) {
                return Err(RepairError::FullLoop { edge: i });
            }
            inside.push(i);
        }
    }
    let mut inc: Vec<Vec<u32>> = vec![Vec::new(); h.n()];
    for &i in &inside {
        let mut prev = None;
        for &v in h.edge(i) {
            if prev != Some(v) {
                inc[v as usize].push(i as u32);
                prev = Some(v);
            }
        }
    }

    let old_palette = col.palette_size();
    let mut out = col.clone();
    out.grow_palette(delta);
    for &v in &u_set {
        out.uncolor(v);
    }
    let mut blocked = vec![false; delta as usize];
    let mut max_used = old_palette;
    for &v in deg_order.order.iter().rev() {
        for b in blocked.iter_mut() {
            *b = false;
        }
        for &i in &inc[v as usize] {
            // The edge blocks a fresh color only when all other slots
            // already carry it.
            let mut seen: Option<u32> = None;
            let mut uniform = true;
            for &w in h.edge(i as usize) {
                if w == v {
                    continue;
                }
                match (out.color(w), seen) {
                    (None, _) => {
                        uniform = false;
                        break;
                    }
                    (Some(c), None) => seen = Some(c),
                    (Some(c), Some(s)) if c == s => {}
                    _ => {
                        uniform = false;
                        break;
                    }
                }
            }
            if uniform {
                if let Some(c) = seen {
                    if c >= old_palette {
                        blocked[(c - old_palette) as usize] = true;
                    }
                }
            }
        }
        match blocked.iter().position(|&b| !b) {
            Some(slot) => {
                let c = old_palette + slot as u32;
                out.set(v, c).expect("fresh color within grown palette");
                max_used = max_used.max(c + 1);
            }
            None => {
                return Err(RepairError::PaletteExhausted(RepairFailure {
                    stuck_vertex: v,
                    delta,
                    u: u_set.len(),
                    degeneracy_u: deg_order.degeneracy,
                    colors_initial: old_palette,
                    bad_edges: bad.len(),
                    edges_multi: 0,
                    edges_stripped: 0,
                }));
            }
        }
    }
    Ok(out)
}

/// Fresh palette size `max(1, floor((eps/2) * chi_pred(r, d)))`.
pub fn repair_delta(r: u32, d: f64, eps: f64) -> Result<u32, TheoryError> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(TheoryError::EpsOutOfRange { eps });
    }
    let chi = predicted_chi(r, d)?;
    Ok(((eps / 2.0) * chi).floor().max(1.0) as u32)
}

/// Parameters of one upper-bound pipeline trial.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PipelineParams {
    pub n: usize,
    pub d: u32,
    pub r: usize,
    pub eps: f64,
    pub order: GreedyOrder,
}

/// Outcome fields of a successful pipeline trial.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PipelineResult {
    /// Multi-hypergraph edges drawn.
    pub edges_multi: usize,
    /// Edges surviving the strip (the colored hypergraph).
    pub edges_stripped: usize,
    pub loops_removed: usize,
    pub multiedges_removed: usize,
    /// Greedy palette size on the stripped hypergraph.
    pub colors_initial: u32,
    /// Monochromatic edges at repair time.
    pub bad_edges: usize,
    /// Uncolored vertices handed to the repair step.
    pub u: usize,
    /// Degeneracy of the sub-hypergraph induced on the uncolored set.
    pub degeneracy_u: usize,
    /// Fresh palette size.
    pub delta: u32,
    pub colors_final: u32,
    /// Final class profile within twice the kappa thresholds?
    pub profile_ok: bool,
    /// Machine-checked properness of the final coloring.
    pub proper: bool,
}

/// A successful trial: the result record plus the colored hypergraph.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub result: PipelineResult,
    pub hypergraph: Hypergraph,
    pub coloring: Coloring,
}

/// End-to-end chromatic upper-bound pipeline:
/// sample -> strip -> greedy color -> trim -> augment -> repair.
///
/// The final properness assertion is machine-checked; a repair failure is
/// returned as an error carrying the partial diagnostics, never retried.
pub fn pipeline_chi_upper<R: Rng + ?Sized>(
    params: &PipelineParams,
    rng: &mut R,
) -> Result<PipelineRun, PipelineError> {
    let PipelineParams { n, d, r, eps, order } = *params;
    if r < 2 || n == 0 || d < 2 {
        return Err(PipelineError::InvalidParams("need r >= 2, n >= 1, d >= 2"));
    }
    if (n as u64 * d as u64) % r as u64 != 0 {
        return Err(PipelineError::InvalidParams("r must divide n*d"));
    }
    if !(eps > 0.0) {
        return Err(PipelineError::InvalidParams("eps must be positive"));
    }

    let m = planned_edge_count(n, d, r);
    let before = PointSystem::sample_multi(n, m, r, rng)?;
    let (h_simple, strip_stats) = strip(&before.to_hypergraph());
    let col = greedy_color(&h_simple, order, rng);
    debug_assert!(is_proper(&h_simple, &col).unwrap_or(false));
    let colors_initial = col.palette_size();

    let trimmed = before.trim(d);
    let (h_final, col, bad) = transform_and_track(trimmed, &col, d, rng)?;

    let delta = repair_delta(r as u32, d as f64, eps)?;
    // U as repair will see it: the smallest vertex of each bad edge.
    let mut in_u = vec![false; h_final.n()];
    for &i in &bad {
        in_u[h_final.edge(i)[0] as usize] = true;
    }
    let u_set: Vec<Vertex> = (0..h_final.n() as Vertex).filter(|&v| in_u[v as usize]).collect();
    let u = u_set.len();
    let degeneracy_u = degeneracy_order(&h_final, &u_set).degeneracy;

    let final_col = match repair(&h_final, &col, &bad, delta) {
        Ok(c) => c,
        Err(err) => {
            let mut fail = match err {
                RepairError::PaletteExhausted(fail) => fail,
                // A full loop is unrepairable no matter the palette; report
                // it at its own vertex.
                RepairError::FullLoop { edge } => RepairFailure {
                    stuck_vertex: h_final.edge(edge)[0],
                    delta,
                    u,
                    degeneracy_u,
                    colors_initial: 0,
                    bad_edges: 0,
                    edges_multi: 0,
                    edges_stripped: 0,
                },
            };
            fail.colors_initial = colors_initial;
            fail.bad_edges = bad.len();
            fail.edges_multi = m;
            fail.edges_stripped = h_simple.num_edges();
            return Err(PipelineError::RepairFailed(fail));
        }
    };

    let proper = is_proper(&h_final, &final_col).map_err(|_| {
        PipelineError::InvalidParams("repair returned a partial coloring")
    })?;

    let class_frac = (1.0 + eps / 2.0) * predicted_alpha_frac(r as u32, d as f64)?;
    let kappa = kappa_thresholds(r, d as f64, class_frac);
    let profile_ok = check_profile(&h_final, &final_col, &kappa, n, 2.0)
        .map_err(|_| PipelineError::InvalidParams("profile check on partial coloring"))?;

    let mut final_col = final_col;
    final_col.shrink_palette_to_used();
    let colors_final = final_col.palette_size();
    let result = PipelineResult {
        edges_multi: m,
        edges_stripped: h_simple.num_edges(),
        loops_removed: strip_stats.loops_removed,
        multiedges_removed: strip_stats.multiedges_removed,
        colors_initial,
        bad_edges: bad.len(),
        u,
        degeneracy_u,
        delta,
        colors_final,
        profile_ok,
        proper,
    };
    Ok(PipelineRun { result, hypergraph: h_final, coloring: final_col })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn rng(seed: u64) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(seed)
    }

    fn h(r: usize, n: usize, edges: &[&[Vertex]]) -> Hypergraph {
        Hypergraph::new(r, n, edges.iter().copied()).unwrap()
    }

    #[test]
    fn repair_empty_bad_list_is_identity() {
        let g = h(3, 3, &[&[0, 1, 2]]);
        let col = Coloring::from_colors(alloc::vec![0, 0, 1], 2).unwrap();
        let fixed = repair(&g, &col, &[], 1).unwrap();
        assert_eq!(fixed, col);
    }

    #[test]
    fn repair_single_bad_edge_with_one_fresh_color() {
        let g = h(3, 3, &[&[0, 1, 2]]);
        let col = Coloring::from_colors(alloc::vec![0, 0, 0], 1).unwrap();
        let fixed = repair(&g, &col, &[0], 1).unwrap();
        assert!(is_proper(&g, &fixed).unwrap());
        assert_eq!(fixed.color(0), Some(1)); // smallest vertex recolored
        assert_eq!(fixed.color(1), Some(0));
        assert!(fixed.palette_size() <= 2);
    }

    #[test]
    fn repair_shares_uncolored_vertex_across_bad_edges() {
        // Both bad edges have minimum vertex 0, so U = {0}; the edges leave
        // U and a single fresh color fixes both.
        let g = h(3, 3, &[&[0, 1, 2], &[0, 1, 2]]);
        let col = Coloring::from_colors(alloc::vec![0, 0, 0], 1).unwrap();
        let fixed = repair(&g, &col, &[0, 1], 1).unwrap();
        assert!(is_proper(&g, &fixed).unwrap());
        assert_eq!(fixed.color(0), Some(1));
    }

    #[test]
    fn repair_exhausts_on_induced_edge_with_delta_one() {
        // Make U = {0, 1, 2} by giving each vertex its own bad edge, and
        // include an edge fully inside U. delta = 1 must fail.
        let g = h(
            3,
            6,
            &[
                &[0, 3, 3], // bad (mono) edges force 0,1,2 into U
                &[1, 4, 4],
                &[2, 5, 5],
                &[0, 1, 2], // fully inside U
            ],
        );
        // Colors: make edges 0..3 monochromatic: v3=0... edge {0,3,3} mono
        // needs col(0)==col(3).
        let col = Coloring::from_colors(alloc::vec![0, 0, 0, 0, 0, 0], 1).unwrap();
        let bad = find_bad_edges(&g, &col);
        assert_eq!(bad, alloc::vec![0, 1, 2, 3]);
        match repair(&g, &col, &bad, 1) {
            Err(RepairError::PaletteExhausted(fail)) => {
                assert_eq!(fail.u, 3);
                assert!(fail.degeneracy_u >= 1);
            }
            other => panic!("expected exhaustion, got {other:?}"),
        }
        // Two fresh colors are enough.
        let fixed = repair(&g, &col, &bad, 2).unwrap();
        assert!(is_proper(&g, &fixed).unwrap());
        assert!(fixed.palette_size() <= 3);
    }

    #[test]
    fn repair_refuses_full_loops() {
        let g = h(3, 2, &[&[0, 0, 0]]);
        let col = Coloring::from_colors(alloc::vec![0, 1], 2).unwrap();
        assert!(matches!(
            repair(&g, &col, &[0], 3),
            Err(RepairError::FullLoop { edge: 0 })
        ));
    }

    #[test]
    fn transform_without_deficiency_reports_surviving_monos() {
        // All buckets already full: augmentation is a no-op and the bad
        // list is exactly the surviving monochromatic parts.
        let ps = PointSystem::from_parts(
            2,
            3,
            alloc::vec![0, 0, 0, 1, 1, 1],
            alloc::vec![alloc::vec![0, 1, 2], alloc::vec![3, 4, 5]],
        )
        .unwrap();
        let col = Coloring::from_colors(alloc::vec![0, 1], 2).unwrap();
        let (hg, col2, bad) = transform_and_track(ps, &col, 3, &mut rng(0)).unwrap();
        assert_eq!(hg.num_edges(), 2);
        assert_eq!(col2, col);
        // Both parts are full loops on their buckets: {0,0,0} and {1,1,1}.
        assert_eq!(bad, alloc::vec![0, 1]);
    }

    #[test]
    fn repair_delta_formula() {
        // chi_pred(3, 100) = 3.8047..., eps/2 = 0.1: floor(0.38) = 0 -> 1.
        assert_eq!(repair_delta(3, 100.0, 0.2).unwrap(), 1);
        // chi_pred(3, 1000) = 9.8239..., eps = 1.0: floor(4.91) = 4.
        assert_eq!(repair_delta(3, 1000.0, 1.0).unwrap(), 4);
    }

    #[test]
    fn pipeline_small_instance_succeeds_or_reports() {
        let params = PipelineParams {
            n: 60,
            d: 4,
            r: 3,
            eps: 0.5,
            order: GreedyOrder::Random,
        };
        match pipeline_chi_upper(&params, &mut rng(5)) {
            Ok(run) => {
                assert!(run.result.proper);
                assert!(run.result.colors_final <= run.result.colors_initial + run.result.delta);
                assert!(run.result.u <= run.result.bad_edges);
                assert!(is_proper(&run.hypergraph, &run.coloring).unwrap());
                assert!(run.hypergraph.degrees().iter().all(|&deg| deg == 4));
            }
            Err(PipelineError::RepairFailed(fail)) => {
                assert!(fail.degeneracy_u >= fail.delta as usize);
            }
            Err(e) => panic!("unexpected pipeline error: {e}"),
        }
    }

    #[test]
    fn pipeline_rejects_indivisible() {
        let params = PipelineParams { n: 10, d: 5, r: 3, eps: 0.2, order: GreedyOrder::Random };
        assert!(matches!(
            pipeline_chi_upper(&params, &mut rng(0)),
            Err(PipelineError::InvalidParams(_))
        ));
    }
}
