//! The bucket/point sampling pipeline for random r-uniform d-regular
//! hypergraphs, plus binomial and fixed-edge-count models.
//!
//! Vertices are `n` buckets. A [`PointSystem`] holds points with a bucket
//! assignment, a 1-based arrival rank within each bucket, and a partition
//! of the live points into parts of size `r`; each part induces one edge
//! (the multiset of its points' buckets). The regular sampler:
//!
//! 1. draws `m` edges with `r` independent uniform vertices each
//!    ([`PointSystem::sample_multi`]),
//! 2. deletes every part containing a point of rank `> d`
//!    ([`PointSystem::trim`]), so every bucket has at most `d` live points,
//! 3. repeatedly adds `r` fresh points into deficient buckets and
//!    repartitions a `q_k`-distributed neighbourhood of the partition
//!    ([`PointSystem::augment_step`]) until every bucket holds exactly `d`.
//!
//! Each augmentation step preserves the uniform-partition law, so the final
//! edge multiset is a configuration-model draw of the d-regular
//! distribution. Loops and multi-edges are possible in the output;
//! simplicity is *not* enforced. [`sample_regular_simple`] wraps the sampler
//! in rejection for small instances where a simple draw is wanted.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::Distribution;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

use crate::hypergraph::{Hypergraph, Vertex};
use crate::qk::QkSampler;

#[derive(Debug, Clone, PartialEq)]
pub enum SamplerError {
    /// `r < 2`, `n == 0`, or similar shape violations.
    BadShape { r: usize, n: usize },
    /// Regular model requires `r | n d`.
    DegreeNotDivisible { n: usize, d: u32, r: usize },
    /// Augmentation requires the total deficiency to be positive and
    /// divisible by `r`.
    BadDeficiency { deficiency: usize, r: usize },
    /// A bucket holds more than `d` live points, so regularity is
    /// unreachable; trim first.
    OverfullBucket { bucket: Vertex, occupancy: u32, d: u32 },
    /// The two point systems do not share a bucket assignment.
    MismatchedPhi,
    /// Requested more distinct edges than exist.
    TooManyEdges { m: u64, max: u64 },
    /// `binom(n, r)` does not fit the sampling integer width.
    ModelTooLarge { n: usize, r: usize },
    /// Probability outside `[0, 1]`.
    BadProbability { p: f64 },
    /// Invalid explicit part structure.
    BadParts(&'static str),
    /// The `q_k` sampler was built for a different `r`.
    QkMismatch { expected: usize, got: usize },
    /// Rejection budget exhausted (simple-output wrapper).
    RejectionExhausted { attempts: usize },
}

impl fmt::Display for SamplerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BadShape { r, n } => write!(f, "invalid sampler shape: r = {r}, n = {n}"),
            Self::DegreeNotDivisible { n, d, r } => {
                write!(f, "r = {r} must divide n*d = {}", *n as u64 * *d as u64)
            }
            Self::BadDeficiency { deficiency, r } => {
                write!(f, "total deficiency {deficiency} is not a positive multiple of r = {r}")
            }
            Self::OverfullBucket { bucket, occupancy, d } => {
                write!(f, "bucket {bucket} holds {occupancy} > d = {d} live points")
            }
            Self::MismatchedPhi => write!(f, "point systems do not share a bucket assignment"),
            Self::TooManyEdges { m, max } => write!(f, "requested {m} edges, only {max} exist"),
            Self::ModelTooLarge { n, r } => {
                write!(f, "binom({n}, {r}) exceeds the supported sampling range")
            }
            Self::BadProbability { p } => write!(f, "p = {p} is not a probability"),
            Self::BadParts(msg) => write!(f, "invalid parts: {msg}"),
            Self::QkMismatch { expected, got } => {
                write!(f, "q_k sampler built for r = {got}, point system has r = {expected}")
            }
            Self::RejectionExhausted { attempts } => {
                write!(f, "no simple hypergraph within {attempts} attempts")
            }
        }
    }
}

impl core::error::Error for SamplerError {}

/// Bucket/point state of the pipeline. Point ids are stable: trimmed points
/// stay in the arrays with `alive = false`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSystem {
    r: usize,
    n: usize,
    bucket: Vec<Vertex>,
    rank: Vec<u32>,
    alive: Vec<bool>,
    added_by_augment: Vec<bool>,
    occupancy: Vec<u32>,
    /// Live parts, flat with stride `r`; entries are point ids.
    parts: Vec<u32>,
    part_from_augment: Vec<bool>,
    /// First bucket that may still be deficient; occupancy only grows
    /// during augmentation, so the cursor never moves backwards.
    fill_cursor: usize,
}

impl PointSystem {
    /// Draws the multi-hypergraph model: `r m` points in independent
    /// uniform buckets and a uniform partition into `m` parts of size `r`
    /// (shuffle, then consecutive blocks).
    pub fn sample_multi<R: Rng + ?Sized>(n: usize, m: usize, r: usize, rng: &mut R) -> Result<Self, SamplerError> {
        if r < 2 || n == 0 {
            return Err(SamplerError::BadShape { r, n });
        }
        let num_points = r * m;
        let mut bucket = Vec::with_capacity(num_points);
        let mut rank = Vec::with_capacity(num_points);
        let mut occupancy = vec![0u32; n];
        for _ in 0..num_points {
            let b = rng.random_range(0..n) as Vertex;
            occupancy[b as usize] += 1;
            rank.push(occupancy[b as usize]);
            bucket.push(b);
        }
        let mut parts: Vec<u32> = (0..num_points as u32).collect();
        parts.shuffle(rng);
        Ok(Self {
            r,
            n,
            bucket,
            rank,
            alive: vec![true; num_points],
            added_by_augment: vec![false; num_points],
            occupancy,
            parts,
            part_from_augment: vec![false; m],
            fill_cursor: 0,
        })
    }

    /// Builds an explicit state: `bucket_of[p]` is point `p`'s bucket and
    /// `parts` must partition the point ids exactly. Ranks follow point-id
    /// order within each bucket.
    pub fn from_parts(
        n: usize,
        r: usize,
        bucket_of: Vec<Vertex>,
        parts: Vec<Vec<u32>>,
    ) -> Result<Self, SamplerError> {
        if r < 2 || n == 0 {
            return Err(SamplerError::BadShape { r, n });
        }
        let num_points = bucket_of.len();
        if parts.len() * r != num_points {
            return Err(SamplerError::BadParts("parts must cover every point exactly once"));
        }
        let mut seen = vec![false; num_points];
        let mut flat = Vec::with_capacity(num_points);
        for part in &parts {
            if part.len() != r {
                return Err(SamplerError::BadParts("every part must have exactly r points"));
            }
            for &p in part {
                let idx = p as usize;
                if idx >= num_points {
                    return Err(SamplerError::BadParts("part references an unknown point id"));
                }
                if seen[idx] {
                    return Err(SamplerError::BadParts("point appears in two parts"));
                }
                seen[idx] = true;
                flat.push(p);
            }
        }
        let mut occupancy = vec![0u32; n];
        let mut rank = Vec::with_capacity(num_points);
        for &b in &bucket_of {
            if b as usize >= n {
                return Err(SamplerError::BadParts("bucket id out of range"));
            }
            occupancy[b as usize] += 1;
            rank.push(occupancy[b as usize]);
        }
        let num_parts = parts.len();
        Ok(Self {
            r,
            n,
            bucket: bucket_of,
            rank,
            alive: vec![true; num_points],
            added_by_augment: vec![false; num_points],
            occupancy,
            parts: flat,
            part_from_augment: vec![false; num_parts],
            fill_cursor: 0,
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_points(&self) -> usize {
        self.bucket.len()
    }

    pub fn num_live_points(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len() / self.r
    }

    pub fn part(&self, i: usize) -> &[u32] {
        &self.parts[i * self.r..(i + 1) * self.r]
    }

    pub fn parts(&self) -> impl Iterator<Item = &[u32]> {
        self.parts.chunks_exact(self.r)
    }

    /// Was part `i` created by an augmentation step?
    pub fn part_from_augment(&self, i: usize) -> bool {
        self.part_from_augment[i]
    }

    pub fn bucket_of(&self, p: u32) -> Vertex {
        self.bucket[p as usize]
    }

    pub fn rank_of(&self, p: u32) -> u32 {
        self.rank[p as usize]
    }

    pub fn is_alive(&self, p: u32) -> bool {
        self.alive[p as usize]
    }

    pub fn point_from_augment(&self, p: u32) -> bool {
        self.added_by_augment[p as usize]
    }

    /// Live points currently assigned to bucket `v`.
    pub fn occupancy(&self, v: Vertex) -> u32 {
        self.occupancy[v as usize]
    }

    pub fn occupancies(&self) -> &[u32] {
        &self.occupancy
    }

    /// `sum_v max(0, d - occupancy(v))`.
    pub fn total_deficiency(&self, d: u32) -> usize {
        self.occupancy.iter().map(|&o| d.saturating_sub(o) as usize).sum()
    }

    /// One edge per part: the multiset of bucket ids of its points.
    pub fn to_hypergraph(&self) -> Hypergraph {
        let flat: Vec<Vertex> = self.parts.iter().map(|&p| self.bucket[p as usize]).collect();
        Hypergraph::from_flat(self.r, self.n, flat).expect("parts are valid edges")
    }

    /// Deletes every part containing a point of rank `> d` together with
    /// all of its points. Afterwards every bucket holds at most `d` live
    /// points. Pure: returns the trimmed copy.
    pub fn trim(&self, d: u32) -> PointSystem {
        let mut out = self.clone();
        let mut keep_parts: Vec<u32> = Vec::with_capacity(self.parts.len());
        let mut keep_flags: Vec<bool> = Vec::with_capacity(self.num_parts());
        for (i, part) in self.parts().enumerate() {
            if part.iter().any(|&p| self.rank[p as usize] > d) {
                for &p in part {
                    out.alive[p as usize] = false;
                    out.occupancy[self.bucket[p as usize] as usize] -= 1;
                }
            } else {
                keep_parts.extend_from_slice(part);
                keep_flags.push(self.part_from_augment[i]);
            }
        }
        out.parts = keep_parts;
        out.part_from_augment = keep_flags;
        out.fill_cursor = 0;
        out
    }

    /// One augmentation step: add `r` new points into the first deficient
    /// bucket slots (ascending bucket id), draw `K ~ q_K(a)`, remove a
    /// uniform random set of `K-1` parts, and repartition the freed points
    /// together with the new ones into `K` parts, uniformly among the
    /// partitions in which every part contains at least one new point.
    ///
    /// Returns the drawn `K`. The part count always grows by exactly one.
    pub fn augment_step<R: Rng + ?Sized>(
        &mut self,
        d: u32,
        qk: &QkSampler,
        rng: &mut R,
    ) -> Result<usize, SamplerError> {
        if qk.r() != self.r {
            return Err(SamplerError::QkMismatch { expected: self.r, got: qk.r() });
        }
        let deficiency = self.total_deficiency(d);
        if deficiency < self.r || deficiency % self.r != 0 {
            return Err(SamplerError::BadDeficiency { deficiency, r: self.r });
        }

        // r new points into the first unfilled slots, ascending bucket id.
        let first_new = self.bucket.len() as u32;
        for _ in 0..self.r {
            while self.occupancy[self.fill_cursor] >= d {
                self.fill_cursor += 1;
            }
            let b = self.fill_cursor as Vertex;
            self.occupancy[self.fill_cursor] += 1;
            self.bucket.push(b);
            self.rank.push(self.occupancy[self.fill_cursor]);
            self.alive.push(true);
            self.added_by_augment.push(true);
        }

        let a = self.num_parts();
        let k = qk.sample(a, rng);

        // Free K-1 uniformly chosen parts; their points stay alive and keep
        // their buckets, they are only repartitioned.
        let mut free: Vec<u32> = Vec::with_capacity(k * self.r);
        let mut doomed: Vec<usize> = rand::seq::index::sample(rng, a, k - 1).into_vec();
        doomed.sort_unstable_by(|x, y| y.cmp(x));
        for i in doomed {
            free.extend_from_slice(self.part(i));
            self.swap_remove_part(i);
        }
        free.extend(first_new..first_new + self.r as u32);

        // Uniform constrained repartition by rejection: a shuffle cut into
        // blocks is a uniform partition; accept when every block holds a
        // new point.
        loop {
            free.shuffle(rng);
            let ok = free
                .chunks_exact(self.r)
                .all(|chunk| chunk.iter().any(|&p| p >= first_new));
            if ok {
                break;
            }
        }
        self.parts.extend_from_slice(&free);
        self.part_from_augment.extend(core::iter::repeat(true).take(k));
        Ok(k)
    }

    /// Runs augmentation steps until every bucket holds exactly `d` live
    /// points. Returns the number of steps taken.
    pub fn augment_to_regular<R: Rng + ?Sized>(
        &mut self,
        d: u32,
        rng: &mut R,
    ) -> Result<usize, SamplerError> {
        if let Some((b, &occ)) = self.occupancy.iter().enumerate().find(|(_, &o)| o > d) {
            return Err(SamplerError::OverfullBucket { bucket: b as Vertex, occupancy: occ, d });
        }
        let deficiency = self.total_deficiency(d);
        if deficiency % self.r != 0 {
            return Err(SamplerError::BadDeficiency { deficiency, r: self.r });
        }
        let qk = QkSampler::new(self.r);
        let steps = deficiency / self.r;
        for _ in 0..steps {
            self.augment_step(d, &qk, rng)?;
        }
        debug_assert_eq!(self.total_deficiency(d), 0);
        Ok(steps)
    }

    fn swap_remove_part(&mut self, i: usize) {
        let r = self.r;
        let last = self.num_parts() - 1;
        if i != last {
            let (head, tail) = self.parts.split_at_mut(last * r);
            head[i * r..(i + 1) * r].copy_from_slice(&tail[..r]);
        }
        self.parts.truncate(last * r);
        self.part_from_augment.swap_remove(i);
    }
}

/// Edge removal counters from [`strip`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StripStats {
    /// Edges removed for containing a repeated vertex.
    pub loops_removed: usize,
    /// Edges removed because an identical simple edge occurs elsewhere;
    /// every copy of a duplicated edge is removed.
    pub multiedges_removed: usize,
}

/// Removes all loops and all copies of duplicated simple edges.
pub fn strip(h: &Hypergraph) -> (Hypergraph, StripStats) {
    let m = h.num_edges();
    let mut is_loop = vec![false; m];
    let mut simple_idx: Vec<usize> = Vec::with_capacity(m);
    for i in 0..m {
        if h.edge_is_loop(i) {
            is_loop[i] = true;
        } else {
            simple_idx.push(i);
        }
    }
    // Group identical simple edges; content-sorted indices make duplicates
    // adjacent.
    let mut drop = vec![false; m];
    simple_idx.sort_unstable_by(|&a, &b| h.edge(a).cmp(h.edge(b)));
    let mut multi = 0usize;
    let mut i = 0;
    while i < simple_idx.len() {
        let mut j = i + 1;
        while j < simple_idx.len() && h.edge(simple_idx[j]) == h.edge(simple_idx[i]) {
            j += 1;
        }
        if j - i >= 2 {
            for &e in &simple_idx[i..j] {
                drop[e] = true;
            }
            multi += j - i;
        }
        i = j;
    }
    let survivors = (0..m).filter(|&i| !is_loop[i] && !drop[i]);
    let mut flat = Vec::new();
    for i in survivors {
        flat.extend_from_slice(h.edge(i));
    }
    let stripped = Hypergraph::from_flat(h.r(), h.n(), flat).expect("substructure is valid");
    let loops = is_loop.iter().filter(|&&b| b).count();
    (stripped, StripStats { loops_removed: loops, multiedges_removed: multi })
}

/// Bucket-size statistics comparing the pre-trim and post-trim systems.
///
/// `s0` counts buckets with at most `d - 3 sqrt(d) ln d` post-trim points,
/// `s1` those with at most `d - 2 sqrt(d) ln d` pre-trim points, and `s2`
/// those that lost at least `sqrt(d) ln d` points to the trim; set
/// inclusion gives `s0 <= s1 + s2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DegreeDiagnostics {
    pub s0: usize,
    pub s1: usize,
    pub s2: usize,
    /// Edges drawn by the multi-hypergraph stage.
    pub m: usize,
    /// Edges surviving the strip (simple hypergraph size).
    #[cfg_attr(feature = "serde", serde(rename = "M"))]
    pub m_simple: usize,
    pub loops_removed: usize,
    pub multiedges_removed: usize,
}

/// Computes the `S0/S1/S2` bucket counts. Both systems must share the
/// bucket assignment (`after` extends `before`). Strip counters are left
/// zero; [`sample_regular`] fills them.
pub fn degree_diagnostics(
    before: &PointSystem,
    after: &PointSystem,
    d: u32,
) -> Result<DegreeDiagnostics, SamplerError> {
    if before.n != after.n
        || before.r != after.r
        || after.bucket.len() < before.bucket.len()
        || before.bucket[..] != after.bucket[..before.bucket.len()]
    {
        return Err(SamplerError::MismatchedPhi);
    }
    let d = d as f64;
    let spread = d.sqrt() * d.ln();
    let t0 = d - 3.0 * spread;
    let t1 = d - 2.0 * spread;
    let mut before_live = vec![0u32; before.n];
    for (p, &b) in before.bucket.iter().enumerate() {
        if before.alive[p] {
            before_live[b as usize] += 1;
        }
    }
    let mut after_live = vec![0u32; after.n];
    for (p, &b) in after.bucket.iter().enumerate() {
        if after.alive[p] {
            after_live[b as usize] += 1;
        }
    }
    let mut diag = DegreeDiagnostics::default();
    for v in 0..before.n {
        if (after_live[v] as f64) <= t0 {
            diag.s0 += 1;
        }
        if (before_live[v] as f64) <= t1 {
            diag.s1 += 1;
        }
        if before_live[v].saturating_sub(after_live[v]) as f64 >= spread {
            diag.s2 += 1;
        }
    }
    Ok(diag)
}

/// The planned multi-hypergraph size `floor(((d - sqrt(d) ln d) / r) n)`,
/// clamped at zero for small `d`.
pub fn planned_edge_count(n: usize, d: u32, r: usize) -> usize {
    let d = d as f64;
    let t = d - d.sqrt() * d.ln();
    if t <= 0.0 {
        0
    } else {
        (t / r as f64 * n as f64).floor() as usize
    }
}

/// A regular sample: the hypergraph, its pipeline diagnostics, and the
/// final point system (useful for carrying colorings through the
/// transformation).
#[derive(Debug, Clone)]
pub struct RegularSample {
    pub hypergraph: Hypergraph,
    pub diagnostics: DegreeDiagnostics,
    pub points: PointSystem,
}

/// Samples the d-regular model via multi-sample, trim, and augmentation.
/// Requires `r | n d`. Every vertex of the output has degree exactly `d`
/// (slots, with loop multiplicity); loops and multi-edges may occur.
pub fn sample_regular<R: Rng + ?Sized>(
    n: usize,
    d: u32,
    r: usize,
    rng: &mut R,
) -> Result<RegularSample, SamplerError> {
    sample_regular_from_m(n, d, r, planned_edge_count(n, d, r), rng)
}

/// As [`sample_regular`] but with an explicit initial edge count `m`
/// (validation suites force `m = 0` to isolate the augmentation stage).
pub fn sample_regular_from_m<R: Rng + ?Sized>(
    n: usize,
    d: u32,
    r: usize,
    m: usize,
    rng: &mut R,
) -> Result<RegularSample, SamplerError> {
    if r < 2 || n == 0 || d == 0 {
        return Err(SamplerError::BadShape { r, n });
    }
    if (n as u64 * d as u64) % r as u64 != 0 {
        return Err(SamplerError::DegreeNotDivisible { n, d, r });
    }
    let before = PointSystem::sample_multi(n, m, r, rng)?;
    let (_, strip_stats) = strip(&before.to_hypergraph());
    let mut points = before.trim(d);
    let mut diagnostics = degree_diagnostics(&before, &points, d)?;
    diagnostics.m = m;
    diagnostics.m_simple = m - strip_stats.loops_removed - strip_stats.multiedges_removed;
    diagnostics.loops_removed = strip_stats.loops_removed;
    diagnostics.multiedges_removed = strip_stats.multiedges_removed;
    points.augment_to_regular(d, rng)?;
    Ok(RegularSample { hypergraph: points.to_hypergraph(), diagnostics, points })
}

/// Resamples the regular model until the output is simple. Practical only
/// when loops are rare (small `r m / n`); intended for desk-size instances.
pub fn sample_regular_simple<R: Rng + ?Sized>(
    n: usize,
    d: u32,
    r: usize,
    max_attempts: usize,
    rng: &mut R,
) -> Result<RegularSample, SamplerError> {
    for _ in 0..max_attempts {
        let sample = sample_regular(n, d, r, rng)?;
        if sample.hypergraph.is_simple() {
            return Ok(sample);
        }
    }
    Err(SamplerError::RejectionExhausted { attempts: max_attempts })
}

fn binom_u128(n: usize, r: usize) -> Option<u128> {
    if r > n {
        return Some(0);
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128;
    }
    Some(acc)
}

/// `m` distinct r-subsets of `0..n`, uniformly without replacement.
///
/// Subset ranks are drawn without replacement and unranked in colex order,
/// so no rejection loop is needed even for `m` close to `binom(n, r)`.
pub fn sample_uniform_m<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    r: usize,
    rng: &mut R,
) -> Result<Hypergraph, SamplerError> {
    if r < 2 || n == 0 {
        return Err(SamplerError::BadShape { r, n });
    }
    let total = binom_u128(n, r).ok_or(SamplerError::ModelTooLarge { n, r })?;
    if total > usize::MAX as u128 {
        return Err(SamplerError::ModelTooLarge { n, r });
    }
    let total = total as usize;
    if m > total {
        return Err(SamplerError::TooManyEdges { m: m as u64, max: total as u64 });
    }
    let mut ranks = rand::seq::index::sample(rng, total, m).into_vec();
    ranks.sort_unstable();
    let mut flat = Vec::with_capacity(m * r);
    let mut edge = vec![0 as Vertex; r];
    for rank in ranks {
        unrank_colex(rank as u128, n, r, &mut edge);
        flat.extend_from_slice(&edge);
    }
    Hypergraph::from_flat(r, n, flat).map_err(|_| SamplerError::BadShape { r, n })
}

/// Writes the subset with the given colex rank into `edge` (ascending).
fn unrank_colex(mut rank: u128, n: usize, r: usize, edge: &mut [Vertex]) {
    let mut hi = n;
    for i in (1..=r).rev() {
        // Largest v with binom(v, i) <= rank, searched over [i-1, hi).
        let mut lo = i - 1;
        let mut up = hi;
        while up - lo > 1 {
            let mid = (lo + up) / 2;
            if binom_u128(mid, i).expect("within binom(n, r)") <= rank {
                lo = mid;
            } else {
                up = mid;
            }
        }
        edge[i - 1] = lo as Vertex;
        rank -= binom_u128(lo, i).expect("within binom(n, r)");
        hi = lo;
    }
}

/// Binomial model: every r-subset independently with probability `p`,
/// realised by drawing the edge count `Bin(binom(n, r), p)` and then that
/// many distinct subsets uniformly.
pub fn sample_binomial<R: Rng + ?Sized>(
    n: usize,
    p: f64,
    r: usize,
    rng: &mut R,
) -> Result<Hypergraph, SamplerError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(SamplerError::BadProbability { p });
    }
    if r < 2 || n == 0 {
        return Err(SamplerError::BadShape { r, n });
    }
    let total = binom_u128(n, r).ok_or(SamplerError::ModelTooLarge { n, r })?;
    if total > u64::MAX as u128 {
        return Err(SamplerError::ModelTooLarge { n, r });
    }
    let dist = rand_distr::Binomial::new(total as u64, p)
        .map_err(|_| SamplerError::BadProbability { p })?;
    let m = dist.sample(rng) as usize;
    sample_uniform_m(n, m, r, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn rng(seed: u64) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(seed)
    }

    #[test]
    fn forced_single_bucket_loop() {
        let ps = PointSystem::sample_multi(1, 1, 3, &mut rng(0)).unwrap();
        assert_eq!(ps.occupancy(0), 3);
        assert_eq!(ps.num_parts(), 1);
        let h = ps.to_hypergraph();
        assert_eq!(h.edge(0), &[0, 0, 0]);
    }

    #[test]
    fn sample_multi_conservation() {
        let ps = PointSystem::sample_multi(5, 10, 3, &mut rng(7)).unwrap();
        assert_eq!(ps.occupancies().iter().sum::<u32>(), 30);
        assert_eq!(ps.num_parts(), 10);
        assert_eq!(ps.num_live_points(), 30);
        for (v, &o) in ps.occupancies().iter().enumerate() {
            let via_points = (0..30u32).filter(|&p| ps.bucket_of(p) == v as Vertex).count();
            assert_eq!(via_points, o as usize);
        }
    }

    #[test]
    fn ranks_follow_arrival_order() {
        let ps = PointSystem::sample_multi(3, 6, 3, &mut rng(3)).unwrap();
        let mut seen = vec![0u32; 3];
        for p in 0..ps.num_points() as u32 {
            let b = ps.bucket_of(p) as usize;
            seen[b] += 1;
            assert_eq!(ps.rank_of(p), seen[b]);
        }
    }

    #[test]
    fn empty_partition_gives_empty_hypergraph() {
        let ps = PointSystem::sample_multi(4, 0, 3, &mut rng(0)).unwrap();
        assert_eq!(ps.to_hypergraph().num_edges(), 0);
    }

    #[test]
    fn strip_example() {
        let h = Hypergraph::new(3, 5, [[0u32, 1, 2], [0, 1, 2], [3, 3, 4]]).unwrap();
        let (s, stats) = strip(&h);
        assert_eq!(s.num_edges(), 0);
        assert_eq!(stats, StripStats { loops_removed: 1, multiedges_removed: 2 });
    }

    #[test]
    fn strip_keeps_simple_and_is_idempotent() {
        let h = Hypergraph::new(3, 6, [[0u32, 1, 2], [1, 2, 3], [3, 4, 5]]).unwrap();
        let (s, stats) = strip(&h);
        assert_eq!(s, h);
        assert_eq!(stats, StripStats::default());
        let (s2, stats2) = strip(&s);
        assert_eq!(s2, s);
        assert_eq!(stats2, StripStats::default());
    }

    #[test]
    fn trim_is_identity_when_within_degree() {
        let ps = PointSystem::sample_multi(10, 4, 3, &mut rng(11)).unwrap();
        let d = *ps.occupancies().iter().max().unwrap();
        let trimmed = ps.trim(d);
        assert_eq!(trimmed.num_parts(), ps.num_parts());
        assert_eq!(trimmed.num_live_points(), ps.num_live_points());
    }

    #[test]
    fn trim_single_bucket_pigeonhole() {
        // 6 points in one bucket, ranks 1..6; with d = 3 every part holding
        // a rank > 3 point dies, so at least one part dies.
        let ps = PointSystem::sample_multi(1, 2, 3, &mut rng(5)).unwrap();
        let trimmed = ps.trim(3);
        assert!(trimmed.num_parts() < 2);
        assert!(trimmed.occupancy(0) <= 3);
        // Idempotent and deterministic.
        assert_eq!(trimmed.trim(3), trimmed);
    }

    #[test]
    fn trim_never_increases_occupancy() {
        let ps = PointSystem::sample_multi(6, 30, 3, &mut rng(13)).unwrap();
        let trimmed = ps.trim(10);
        for v in 0..6 {
            assert!(trimmed.occupancy(v) <= ps.occupancy(v));
            assert!(trimmed.occupancy(v) <= 10);
        }
        let live = trimmed.num_live_points();
        assert_eq!(trimmed.num_parts() * 3, live);
        assert_eq!(trimmed.occupancies().iter().sum::<u32>() as usize, live);
    }

    #[test]
    fn augment_first_step_forced() {
        let mut ps = PointSystem::sample_multi(2, 0, 3, &mut rng(2)).unwrap();
        let qk = QkSampler::new(3);
        let k = ps.augment_step(3, &qk, &mut rng(2)).unwrap();
        assert_eq!(k, 1);
        assert_eq!(ps.num_parts(), 1);
        let mut part = ps.part(0).to_vec();
        part.sort_unstable();
        assert_eq!(part, alloc::vec![0, 1, 2]);
        assert_eq!(ps.occupancy(0), 3);
    }

    #[test]
    fn augment_part_count_grows_by_one() {
        let mut ps = PointSystem::sample_multi(4, 2, 3, &mut rng(9)).unwrap();
        let d = 6;
        let qk = QkSampler::new(3);
        let mut r = rng(10);
        for _ in 0..5 {
            let before = ps.num_parts();
            let occ_before: u32 = ps.occupancies().iter().sum();
            ps.augment_step(d, &qk, &mut r).unwrap();
            assert_eq!(ps.num_parts(), before + 1);
            assert_eq!(ps.occupancies().iter().sum::<u32>(), occ_before + 3);
        }
    }

    #[test]
    fn augment_rejects_bad_deficiency() {
        // n*d = 4*5 = 20, not a multiple of r = 3.
        let mut ps = PointSystem::sample_multi(4, 0, 3, &mut rng(1)).unwrap();
        let qk = QkSampler::new(3);
        assert!(matches!(
            ps.augment_step(5, &qk, &mut rng(1)),
            Err(SamplerError::BadDeficiency { .. })
        ));
    }

    #[test]
    fn regular_sample_has_exact_degrees() {
        let sample = sample_regular(30, 6, 3, &mut rng(42)).unwrap();
        let h = &sample.hypergraph;
        assert_eq!(h.num_edges(), 30 * 6 / 3);
        assert!(h.degrees().iter().all(|&deg| deg == 6));
        assert_eq!(sample.points.total_deficiency(6), 0);
    }

    #[test]
    fn regular_sample_rejects_indivisible() {
        assert!(matches!(
            sample_regular(10, 5, 3, &mut rng(0)),
            Err(SamplerError::DegreeNotDivisible { .. })
        ));
    }

    #[test]
    fn regular_sampling_is_seed_deterministic() {
        let a = sample_regular(60, 6, 3, &mut rng(77)).unwrap();
        let b = sample_regular(60, 6, 3, &mut rng(77)).unwrap();
        assert_eq!(a.hypergraph, b.hypergraph);
        assert_eq!(a.diagnostics, b.diagnostics);
    }

    #[test]
    fn diagnostics_containment_and_phi_check() {
        let before = PointSystem::sample_multi(50, 120, 3, &mut rng(8)).unwrap();
        let after = before.trim(9);
        let diag = degree_diagnostics(&before, &after, 9).unwrap();
        assert!(diag.s0 <= diag.s1 + diag.s2);

        let other = PointSystem::sample_multi(50, 120, 3, &mut rng(9)).unwrap();
        assert!(matches!(
            degree_diagnostics(&before, &other, 9),
            Err(SamplerError::MismatchedPhi)
        ));
    }

    #[test]
    fn no_trim_means_s2_zero() {
        let before = PointSystem::sample_multi(40, 20, 3, &mut rng(21)).unwrap();
        let d = *before.occupancies().iter().max().unwrap();
        let after = before.trim(d);
        let diag = degree_diagnostics(&before, &after, d).unwrap();
        assert_eq!(diag.s2, 0);
    }

    #[test]
    fn uniform_m_complete_case() {
        let h = sample_uniform_m(5, 10, 3, &mut rng(4)).unwrap();
        assert_eq!(h.num_edges(), 10);
        assert!(h.is_simple());
        let mut edges: Vec<Vec<Vertex>> = h.edges().map(|e| e.to_vec()).collect();
        edges.sort();
        edges.dedup();
        assert_eq!(edges.len(), 10);
        assert!(matches!(
            sample_uniform_m(5, 11, 3, &mut rng(4)),
            Err(SamplerError::TooManyEdges { .. })
        ));
    }

    #[test]
    fn binomial_degenerate_probabilities() {
        let empty = sample_binomial(6, 0.0, 3, &mut rng(5)).unwrap();
        assert_eq!(empty.num_edges(), 0);
        let full = sample_binomial(6, 1.0, 3, &mut rng(5)).unwrap();
        assert_eq!(full.num_edges(), 20);
        assert!(matches!(
            sample_binomial(6, 1.5, 3, &mut rng(5)),
            Err(SamplerError::BadProbability { .. })
        ));
    }

    #[test]
    fn unrank_colex_is_bijective_on_small_case() {
        let n = 7;
        let r = 3;
        let total = binom_u128(n, r).unwrap() as usize;
        let mut edge = vec![0; r];
        let mut seen = alloc::collections::BTreeSet::new();
        for rank in 0..total {
            unrank_colex(rank as u128, n, r, &mut edge);
            assert!(edge.windows(2).all(|w| w[0] < w[1]), "{edge:?}");
            assert!(seen.insert(edge.clone()));
        }
        assert_eq!(seen.len(), total);
    }

    #[test]
    fn from_parts_validates() {
        assert!(PointSystem::from_parts(2, 3, vec![0, 0, 0], vec![vec![0, 1, 2]]).is_ok());
        assert!(matches!(
            PointSystem::from_parts(2, 3, vec![0, 0, 0], vec![vec![0, 1, 1]]),
            Err(SamplerError::BadParts(_))
        ));
        assert!(matches!(
            PointSystem::from_parts(2, 3, vec![0, 0], vec![vec![0, 1]]),
            Err(SamplerError::BadParts(_))
        ));
    }

    #[test]
    fn simple_wrapper_returns_simple() {
        let sample = sample_regular_simple(30, 3, 3, 200, &mut rng(1)).unwrap();
        assert!(sample.hypergraph.is_simple());
        assert!(sample.hypergraph.degrees().iter().all(|&deg| deg == 3));
    }
}
