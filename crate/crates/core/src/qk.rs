//! Exact part-meeting distribution for uniform partitions into r-sets.
//!
//! `q_k(a)` is the probability that a fixed set `Q` of `r` points meets
//! exactly `k` parts in a uniform random partition of `r(a+1)` points into
//! `a+1` parts of size `r`. The augmentation step of the sampler draws its
//! part-replacement count from this distribution, and the uniformity of the
//! whole construction rests on it being exact — everything here is
//! arbitrary-precision rational arithmetic, and sampling compares an
//! integer uniform draw against exact cumulative weights.
//!
//! The counting goes composition-by-composition: split `Q` into `k`
//! nonempty groups, complete each group to an r-set with outside points,
//! and partition the rest. Collecting the `a`-independent factors gives
//!
//! ```text
//! q_k(a) = W_k(r) * (r!)^k * (a+1)(a)...(a-k+2) / [(ra+1)(ra+2)...(ra+r)]
//! ```
//!
//! where `W_k(r)` sums `r! / (prod j_i! * prod mult_s! * prod (r-j_i)!)`
//! over the partitions `j_1 >= ... >= j_k >= 1` of `r`. The falling
//! factorial vanishes for `k > a+1`, matching the support `1 <= k <=
//! min(r, a+1)`.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

/// Exact probabilities `q_1 .. q_{min(r, a+1)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QkDistribution {
    pub r: usize,
    pub a: usize,
    /// `probs[k-1] = q_k`; length `min(r, a+1)`.
    pub probs: Vec<BigRational>,
}

impl QkDistribution {
    pub fn support(&self) -> usize {
        self.probs.len()
    }

    /// `q_k` for `1 <= k`; zero beyond the support.
    pub fn q(&self, k: usize) -> BigRational {
        assert!(k >= 1, "k is 1-based");
        self.probs.get(k - 1).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Exact sum of the probabilities (should be exactly one).
    pub fn total(&self) -> BigRational {
        self.probs.iter().fold(BigRational::zero(), |s, q| s + q)
    }
}

/// Computes `q_k(a)` for all `k`. `r >= 1`.
pub fn qk_distribution(r: usize, a: usize) -> QkDistribution {
    QkSampler::new(r).distribution(a)
}

/// Reusable sampler: caches the `W_k(r)` table so the per-step cost inside
/// the augmentation loop is a handful of big-integer multiplications.
#[derive(Debug, Clone)]
pub struct QkSampler {
    r: usize,
    /// `W_k(r) * (r!)^k` as exact rationals, `k = 1..=r`.
    scaled_w: Vec<BigRational>,
}

impl QkSampler {
    pub fn new(r: usize) -> Self {
        assert!(r >= 1, "r must be at least 1");
        let r_fact = factorial(r);
        let mut scaled_w = Vec::with_capacity(r);
        let mut pow = BigRational::one();
        for k in 1..=r {
            pow *= BigRational::from_integer(r_fact.clone());
            scaled_w.push(w_sum(r, k) * &pow);
        }
        Self { r, scaled_w }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn distribution(&self, a: usize) -> QkDistribution {
        let r = self.r;
        let mut denom = BigInt::one();
        for t in 1..=r {
            denom *= BigInt::from(r as u64 * a as u64 + t as u64);
        }
        let denom = BigRational::from_integer(denom);
        let support = r.min(a + 1);
        let mut probs = Vec::with_capacity(support);
        let mut falling = BigInt::one();
        for k in 1..=support {
            falling *= BigInt::from((a + 1 - (k - 1)) as u64);
            probs.push(&self.scaled_w[k - 1] * BigRational::from_integer(falling.clone()) / &denom);
        }
        QkDistribution { r, a, probs }
    }

    /// Draws `K` with `P[K = k] = q_k(a)` exactly: the unit interval is
    /// scaled by the common denominator and an integer uniform below it
    /// picks the cell.
    pub fn sample<R: Rng + ?Sized>(&self, a: usize, rng: &mut R) -> usize {
        let dist = self.distribution(a);
        if dist.probs.len() == 1 {
            return 1;
        }
        let mut denom = BigInt::one();
        for q in &dist.probs {
            denom = num_integer::lcm(denom, q.denom().clone());
        }
        let denom = denom.to_biguint().expect("positive lcm");
        let draw = uniform_below(&denom, rng);
        let mut acc = BigUint::zero();
        for (i, q) in dist.probs.iter().enumerate() {
            let weight = (q * BigRational::from_integer(BigInt::from(denom.clone())))
                .to_integer()
                .to_biguint()
                .expect("nonnegative weight");
            acc += weight;
            if draw < acc {
                return i + 1;
            }
        }
        // Total mass is exactly the denominator, so the walk always lands.
        unreachable!("q_k distribution does not sum to one")
    }
}

/// Uniform integer in `[0, bound)` by masked rejection on whole bits.
fn uniform_below<R: Rng + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    assert!(!bound.is_zero());
    let bits = bound.bits();
    let limbs = bits.div_ceil(32) as usize;
    let top_bits = bits - 32 * (limbs as u64 - 1);
    let top_mask = if top_bits == 32 { u32::MAX } else { (1u32 << top_bits) - 1 };
    loop {
        let mut digits = Vec::with_capacity(limbs);
        for i in 0..limbs {
            let mut limb = rng.next_u32();
            if i + 1 == limbs {
                limb &= top_mask;
            }
            digits.push(limb);
        }
        let candidate = BigUint::new(digits);
        if &candidate < bound {
            return candidate;
        }
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n as u64).map(BigInt::from).fold(BigInt::one(), |a, b| a * b)
}

/// `W_k(r)`: sum over partitions of `r` into `k` positive parts of
/// `r! / (prod j_i! * prod mult_s! * prod (r - j_i)!)`.
fn w_sum(r: usize, k: usize) -> BigRational {
    let mut total = BigRational::zero();
    let mut parts = Vec::with_capacity(k);
    w_rec(r, k, r, &mut parts, &mut total);
    total
}

fn w_rec(remaining: usize, k: usize, max_part: usize, parts: &mut Vec<usize>, total: &mut BigRational) {
    if k == 0 {
        if remaining == 0 {
            *total += w_term(parts);
        }
        return;
    }
    // Each of the k parts needs at least 1.
    let hi = max_part.min(remaining - (k - 1));
    for j in (1..=hi).rev() {
        parts.push(j);
        w_rec(remaining - j, k - 1, j, parts, total);
        parts.pop();
    }
}

fn w_term(parts: &[usize]) -> BigRational {
    let r: usize = parts.iter().sum();
    let mut denom = BigInt::one();
    let mut run = 0usize;
    let mut prev = usize::MAX;
    for &j in parts {
        denom *= factorial(j) * factorial(r - j);
        if j == prev {
            run += 1;
        } else {
            run = 1;
            prev = j;
        }
        denom *= BigInt::from(run as u64);
    }
    BigRational::new(factorial(r), denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn frac(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn single_part_is_certain() {
        for r in 1..=6 {
            let dist = qk_distribution(r, 0);
            assert_eq!(dist.probs, alloc::vec![BigRational::one()]);
        }
    }

    #[test]
    fn known_small_values() {
        // Enumerations: 10 partitions of 6 points into triples, 3 pairings
        // of 4 points, 280 partitions of 9 points into triples.
        assert_eq!(qk_distribution(3, 1).probs, alloc::vec![frac(1, 10), frac(9, 10)]);
        assert_eq!(qk_distribution(2, 1).probs, alloc::vec![frac(1, 3), frac(2, 3)]);
        assert_eq!(
            qk_distribution(3, 2).probs,
            alloc::vec![frac(1, 28), frac(9, 14), frac(9, 28)]
        );
        assert_eq!(
            qk_distribution(4, 1).probs,
            alloc::vec![frac(1, 35), frac(34, 35)]
        );
    }

    #[test]
    fn support_is_truncated_by_a() {
        let dist = qk_distribution(5, 2);
        assert_eq!(dist.support(), 3);
        assert!(dist.q(4).is_zero());
    }

    #[test]
    fn sums_to_one_exactly() {
        for r in 1..=6 {
            for a in 0..=50 {
                let dist = qk_distribution(r, a);
                assert!(dist.total().is_one(), "r={r} a={a} sum={}", dist.total().to_string());
            }
        }
    }

    #[test]
    fn sampler_matches_distribution_support() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        let sampler = QkSampler::new(3);
        for a in [0usize, 1, 2, 40] {
            let hi = 3.min(a + 1);
            for _ in 0..200 {
                let k = sampler.sample(a, &mut rng);
                assert!((1..=hi).contains(&k));
            }
        }
    }

    #[test]
    fn uniform_below_is_in_range() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(1);
        let bound = BigUint::from(1_000_000_007u64);
        for _ in 0..1000 {
            assert!(uniform_below(&bound, &mut rng) < bound);
        }
        let one = BigUint::from(1u32);
        assert!(uniform_below(&one, &mut rng).is_zero());
    }
}
