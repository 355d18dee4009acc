//! Truncated multidimensional laws of the joint digit-sum differences
//! `(s2(n + l*t + eps_l) - s2(n))_{1 <= l <= m}`.
//!
//! Splitting `n` by parity turns the joint density `delta(k, eps, t)` into a
//! half/half mixture of two densities at step `floor(t/2)`, with the offset
//! vector `eps` absorbing the leftover units:
//!
//! ```text
//! p = t mod 2,  s_l = eps_l + p*l
//! delta(k, eps, t) = 1/2 delta(k - r, eps', floor(t/2))
//!                  + 1/2 delta(k + r, eps'', floor(t/2))
//! r_l = s_l mod 2,  eps'_l = floor(s_l / 2),  eps''_l = floor((s_l + 1) / 2)
//! ```
//!
//! Working at the level of whole distributions (shift both children, then
//! mix) shares all the work across `k`. The recursion grounds out at
//! `delta(., 0, 0)` = unit mass at the origin; the only cycles in the node
//! graph are the `t = 0, eps in {0,1}^m` nodes whose second child is the node
//! itself. Those are resolved in closed form as geometric rays
//! `sum_j 2^-(j+1) shift_{-j*r}(E)`, truncated at a depth that certifies the
//! discarded mass, which is the engine's only source of lost mass.

use crate::dyadic::DyadicRational;
use num_bigint::BigUint;
use num_traits::Zero;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MdError {
    #[error("offset vector must be nonempty")]
    EmptyEps,
    #[error("precision must lie in 1..=60, got {0}")]
    PrecisionRange(u32),
    /// The node graph contained a cycle other than the characterized
    /// self-loops; this signals a violated structural assumption.
    #[error("unexpected cycle at node (eps={eps:?}, t={t})")]
    UnexpectedCycle { eps: Vec<u64>, t: String },
}

type KVec = Vec<i64>;
type NodeKey = (Vec<u64>, BigUint);

#[derive(Debug, Clone, PartialEq, Eq)]
struct NodeDist {
    entries: BTreeMap<KVec, DyadicRational>,
    lost: DyadicRational,
}

/// Truncated joint law with a certified bound on the discarded mass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MdDistribution {
    pub m: usize,
    pub t: BigUint,
    pub eps: Vec<u64>,
    entries: BTreeMap<KVec, DyadicRational>,
    lost_mass_bound: DyadicRational,
}

impl MdDistribution {
    pub fn entries(&self) -> &BTreeMap<KVec, DyadicRational> {
        &self.entries
    }

    pub fn lost_mass_bound(&self) -> &DyadicRational {
        &self.lost_mass_bound
    }

    pub fn value_at(&self, k: &[i64]) -> DyadicRational {
        self.entries.get(k).cloned().unwrap_or_else(DyadicRational::zero)
    }

    /// Sum of the kept entries; at most 1, and at least `1 - lost_mass_bound`.
    pub fn kept_mass(&self) -> DyadicRational {
        self.entries.values().sum()
    }

    /// Law of a single component: sums the kept entries over all others.
    ///
    /// `component` is 1-based. With `eps = 0` the exact marginal is the
    /// one-dimensional law at step `component * t`, so the kept marginal
    /// matches it pointwise within the lost-mass bound.
    pub fn marginal(&self, component: usize) -> BTreeMap<i64, DyadicRational> {
        assert!(component >= 1 && component <= self.m, "component out of range");
        let mut out: BTreeMap<i64, DyadicRational> = BTreeMap::new();
        for (k, v) in &self.entries {
            let key = k[component - 1];
            let acc = out.entry(key).or_insert_with(DyadicRational::zero);
            *acc = &*acc + v;
        }
        out
    }
}

/// Memoizing engine for the joint laws at a fixed certified precision.
///
/// Geometric rays are truncated at depth `precision + 4`, so each resolved
/// self-loop discards at most `2^-(precision+4)` of mass; mixtures only
/// average lost mass, hence every reported bound is at most `2^-precision`.
pub struct MdEngine {
    ray_depth: u64,
    memo: Mutex<HashMap<NodeKey, Arc<NodeDist>>>,
}

impl MdEngine {
    pub fn new(precision: u32) -> Result<Self, MdError> {
        if precision == 0 || precision > 60 {
            return Err(MdError::PrecisionRange(precision));
        }
        Ok(MdEngine {
            ray_depth: precision as u64 + 4,
            memo: Mutex::new(HashMap::new()),
        })
    }

    /// Joint law of the `eps.len()` differences at step `t`.
    pub fn distribution(&self, t: &BigUint, eps: &[u64]) -> Result<MdDistribution, MdError> {
        if eps.is_empty() {
            return Err(MdError::EmptyEps);
        }
        let mut stack = Vec::new();
        let node = self.node(eps, t, &mut stack)?;
        Ok(MdDistribution {
            m: eps.len(),
            t: t.clone(),
            eps: eps.to_vec(),
            entries: node.entries.clone(),
            lost_mass_bound: node.lost.clone(),
        })
    }

    fn node(
        &self,
        eps: &[u64],
        t: &BigUint,
        stack: &mut Vec<NodeKey>,
    ) -> Result<Arc<NodeDist>, MdError> {
        let key: NodeKey = (eps.to_vec(), t.clone());
        if let Some(hit) = self.memo.lock().unwrap().get(&key) {
            return Ok(Arc::clone(hit));
        }
        if t.is_zero() && eps.iter().all(|&e| e == 0) {
            let mut entries = BTreeMap::new();
            entries.insert(vec![0i64; eps.len()], DyadicRational::one());
            let dist = Arc::new(NodeDist { entries, lost: DyadicRational::zero() });
            self.memo.lock().unwrap().insert(key, Arc::clone(&dist));
            return Ok(dist);
        }
        if stack.contains(&key) {
            return Err(MdError::UnexpectedCycle { eps: eps.to_vec(), t: t.to_string() });
        }

        let parity = if t.bit(0) { 1u64 } else { 0u64 };
        let t_child = t >> 1u32;
        let mut shift: KVec = Vec::with_capacity(eps.len());
        let mut eps_lo: Vec<u64> = Vec::with_capacity(eps.len());
        let mut eps_hi: Vec<u64> = Vec::with_capacity(eps.len());
        for (idx, &e) in eps.iter().enumerate() {
            let s = e + parity * (idx as u64 + 1);
            shift.push((s & 1) as i64);
            eps_lo.push(s >> 1);
            eps_hi.push((s + 1) >> 1);
        }

        let lo_key: NodeKey = (eps_lo.clone(), t_child.clone());
        let hi_key: NodeKey = (eps_hi.clone(), t_child.clone());
        if lo_key == key {
            // Unreachable: the floor-halving branch fixes only eps = 0, which
            // the base case intercepts.
            return Err(MdError::UnexpectedCycle { eps: eps.to_vec(), t: t.to_string() });
        }

        let dist = if hi_key == key {
            // Self-loop through the second branch. Structurally these occur
            // exactly at t = 0 with eps in {0,1}^m; anything else means the
            // recurrence shape is violated.
            if !(t.is_zero() && eps.iter().all(|&e| e <= 1)) {
                return Err(MdError::UnexpectedCycle { eps: eps.to_vec(), t: t.to_string() });
            }
            stack.push(key.clone());
            let exit = self.node(&eps_lo, &t_child, stack)?;
            stack.pop();
            self.resolve_ray(&exit, &shift)
        } else {
            stack.push(key.clone());
            let lo = self.node(&eps_lo, &t_child, stack)?;
            let hi = self.node(&eps_hi, &t_child, stack)?;
            stack.pop();
            Self::mixture(&lo, &hi, &shift)
        };

        let dist = Arc::new(dist);
        self.memo
            .lock()
            .unwrap()
            .entry(key)
            .or_insert_with(|| Arc::clone(&dist));
        Ok(dist)
    }

    /// `1/2 shift_{+r}(lo) + 1/2 shift_{-r}(hi)`.
    fn mixture(lo: &NodeDist, hi: &NodeDist, r: &[i64]) -> NodeDist {
        let mut entries: BTreeMap<KVec, DyadicRational> = BTreeMap::new();
        for (k, v) in &lo.entries {
            let shifted: KVec = k.iter().zip(r).map(|(a, b)| a + b).collect();
            let acc = entries.entry(shifted).or_insert_with(DyadicRational::zero);
            *acc = &*acc + &v.div_pow2(1);
        }
        for (k, v) in &hi.entries {
            let shifted: KVec = k.iter().zip(r).map(|(a, b)| a - b).collect();
            let acc = entries.entry(shifted).or_insert_with(DyadicRational::zero);
            *acc = &*acc + &v.div_pow2(1);
        }
        let lost = (&lo.lost + &hi.lost).div_pow2(1);
        NodeDist { entries, lost }
    }

    /// Closed-form solution `D = sum_{j>=0} 2^-(j+1) shift_{-j*r}(E)` of the
    /// self-loop equation `D = 1/2 E + 1/2 shift_{-r}(D)`, where
    /// `E = shift_{+r}(exit)`. Truncating at `ray_depth` terms discards mass
    /// at most `2^-ray_depth`, which is added to the lost-mass bound.
    fn resolve_ray(&self, exit: &NodeDist, r: &[i64]) -> NodeDist {
        let mut entries: BTreeMap<KVec, DyadicRational> = BTreeMap::new();
        for j in 0..self.ray_depth {
            let weight = DyadicRational::new(1, j + 1);
            for (k, v) in &exit.entries {
                // shift by +r, then by -j*r
                let shifted: KVec = k
                    .iter()
                    .zip(r)
                    .map(|(a, b)| a + b - (j as i64) * b)
                    .collect();
                let acc = entries.entry(shifted).or_insert_with(DyadicRational::zero);
                *acc = &*acc + &(v * &weight);
            }
        }
        let lost = &exit.lost + &DyadicRational::new(1, self.ray_depth);
        NodeDist { entries, lost }
    }
}

/// One-shot joint law with lost mass certified below `2^-precision`.
pub fn delta_md(t: &BigUint, eps: &[u64], precision: u32) -> Result<MdDistribution, MdError> {
    MdEngine::new(precision)?.distribution(t, eps)
}

/// Two-sided bounds on
/// `dens{n : s2(n+t) >= s2(n) and s2(n+2t) <= s2(n+t)}`,
/// the kept mass of the pair law over `k1 >= 0, k2 <= k1` plus the lost-mass
/// slack.
pub fn cusick_pair_density(
    engine: &MdEngine,
    t: &BigUint,
) -> Result<(DyadicRational, DyadicRational), MdError> {
    let dist = engine.distribution(t, &[0, 0])?;
    let sum: DyadicRational = dist
        .entries()
        .iter()
        .filter(|(k, _)| k[0] >= 0 && k[1] <= k[0])
        .map(|(_, v)| v)
        .sum();
    let hi = &sum + dist.lost_mass_bound();
    Ok((sum, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density1d::delta_1d;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn dy(num: i64, exp: u64) -> DyadicRational {
        DyadicRational::new(num, exp)
    }

    #[test]
    fn base_point_mass() {
        for m in 1..=3 {
            let d = delta_md(&big(0), &vec![0; m], 30).unwrap();
            assert_eq!(d.entries().len(), 1);
            assert_eq!(d.value_at(&vec![0; m]), DyadicRational::one());
            assert!(d.lost_mass_bound().is_zero());
        }
    }

    #[test]
    fn unit_offset_at_step_zero_is_the_t1_law() {
        // s2(n + 1) - s2(n) with no progression step: same law as t = 1.
        let d = delta_md(&big(0), &[1], 30).unwrap();
        for c in -20..=1i64 {
            assert_eq!(d.value_at(&[c]), dy(1, (2 - c) as u64), "c={c}");
        }
        assert_eq!(d.value_at(&[2]), DyadicRational::zero());
    }

    #[test]
    fn one_dimensional_slice_matches_exact_law() {
        let engine = MdEngine::new(40).unwrap();
        for t in 1u64..=24 {
            let md = engine.distribution(&big(t), &[0]).unwrap();
            let exact = delta_1d(&big(t)).unwrap();
            let bound = md.lost_mass_bound();
            for k in -45..=exact.k_hi() {
                let diff = (&md.value_at(&[k]) - &exact.value_at(k)).abs();
                assert!(diff <= *bound, "t={t} k={k}");
            }
        }
    }

    #[test]
    fn pair_law_at_step_one_matches_hand_count() {
        // Computed by enumeration: the pair (g(n), g(n) + g(n+1)) has mass
        // 1/4 at (1,1) (n = 0 mod 4), 1/4 at (0,1) (n = 1 mod 4),
        // 1/8 at (1,0) (n = 2 mod 8), 1/8 at (-1,0) (n = 3 mod 8),
        // 1/16 at (1,-1) (n = 6 mod 16), and nothing at (0,0).
        let d = delta_md(&big(1), &[0, 0], 30).unwrap();
        assert_eq!(d.value_at(&[1, 1]), dy(1, 2));
        assert_eq!(d.value_at(&[0, 1]), dy(1, 2));
        assert_eq!(d.value_at(&[1, 0]), dy(1, 3));
        assert_eq!(d.value_at(&[-1, 0]), dy(1, 3));
        assert_eq!(d.value_at(&[1, -1]), dy(1, 4));
        assert_eq!(d.value_at(&[0, 0]), DyadicRational::zero());
    }

    #[test]
    fn mass_conservation() {
        let engine = MdEngine::new(30).unwrap();
        let one = DyadicRational::one();
        for (t, eps) in [(0u64, vec![1, 1]), (1, vec![0, 0]), (9, vec![0, 0]), (5, vec![2, 1])] {
            let d = engine.distribution(&big(t), &eps).unwrap();
            let kept = d.kept_mass();
            assert!(kept <= one, "t={t} eps={eps:?}");
            assert!(&kept + d.lost_mass_bound() >= one, "t={t} eps={eps:?}");
        }
    }

    #[test]
    fn doubling_gives_identical_distribution() {
        let engine = MdEngine::new(30).unwrap();
        let d1 = engine.distribution(&big(1), &[0, 0]).unwrap();
        let d2 = engine.distribution(&big(2), &[0, 0]).unwrap();
        assert_eq!(d1.entries(), d2.entries());
        assert_eq!(d1.lost_mass_bound(), d2.lost_mass_bound());
    }

    #[test]
    fn marginals_match_one_dimensional_laws() {
        let engine = MdEngine::new(35).unwrap();
        for (m, t) in [(2usize, 1u64), (2, 6), (3, 5)] {
            let md = engine.distribution(&big(t), &vec![0; m]).unwrap();
            let bound = md.lost_mass_bound();
            for component in 1..=m {
                let exact = delta_1d(&big(component as u64 * t)).unwrap();
                let marg = md.marginal(component);
                for (k, v) in &marg {
                    let diff = (v - &exact.value_at(*k)).abs();
                    assert!(diff <= *bound, "m={m} t={t} l={component} k={k}");
                }
            }
        }
    }

    #[test]
    fn pair_bounds_bracket_one_half_at_step_one() {
        let engine = MdEngine::new(30).unwrap();
        let (lo, hi) = cusick_pair_density(&engine, &big(1)).unwrap();
        let half = DyadicRational::half();
        assert!(lo <= half && half <= hi);
        let (lo2, hi2) = cusick_pair_density(&engine, &big(2)).unwrap();
        assert_eq!((lo, hi), (lo2, hi2));
        let quarter = DyadicRational::new(1, 2);
        let (lo3, _) = cusick_pair_density(&engine, &big(3)).unwrap();
        assert!(lo3 > quarter);
    }

    #[test]
    fn precision_guard() {
        assert!(matches!(MdEngine::new(0), Err(MdError::PrecisionRange(0))));
        assert!(matches!(MdEngine::new(61), Err(MdError::PrecisionRange(61))));
        assert!(MdEngine::new(60).is_ok());
    }

    #[test]
    fn empty_eps_rejected() {
        let engine = MdEngine::new(30).unwrap();
        assert!(matches!(engine.distribution(&big(1), &[]), Err(MdError::EmptyEps)));
    }
}
