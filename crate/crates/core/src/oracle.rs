//! Brute-force ground truth: `C_n(a) − C_n(a)` enumerated exactly at finite depth.
//!
//! All `3ⁿ` intervals `J_s = [−1 + Σ s_i w_i, … + 2d_n]` are generated, sorted and swept into
//! maximal closed components. Endpoints are kept as integer numerators over one common
//! denominator `D` (the lcm of the denominators of `d_0, …, d_n`), so every sum is an exact
//! integer addition; `i128` is used whenever `D` is small enough and `BigInt` otherwise.
//!
//! The codes are split by their leading digits. The sums of the trailing digits are shared by
//! every partition and sorted once, so each partition emits its intervals already in order and
//! reduces them to a local union. Partitions run in parallel and are merged in partition order.

use std::collections::BTreeSet;
use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{classify, VerdictKind};
use crate::gapcalc::{boundary_family, GapRef};
use crate::geometry::{children_of, interval_j, Interval, IntervalUnion, TernaryCode};
use crate::params::{ParamSequence, RankIndex};
use crate::scalar::{int, serde_scalar, Scalar};
use crate::{Error, Result};

/// Largest depth enumerated unless the caller raises it (`3^13 = 1 594 323` codes).
pub const DEFAULT_DEPTH_CAP: usize = 13;

/// How an enumeration is run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub cap: usize,
    /// Fan partitions out over the rayon pool; `false` runs them on the calling thread.
    pub parallel: bool,
    /// Number of leading digits that select a partition (`3^split` partitions).
    pub split: usize,
}

impl Default for Enumeration {
    fn default() -> Self {
        Enumeration { cap: DEFAULT_DEPTH_CAP, parallel: true, split: 4 }
    }
}

impl Enumeration {
    pub fn single_worker() -> Self {
        Enumeration { parallel: false, ..Self::default() }
    }
}

/// `C_n(a) − C_n(a)` at one depth: its closed components over a common denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthSlice {
    pub depth: usize,
    denominator: BigInt,
    parts: Vec<(BigInt, BigInt)>,
}

impl DepthSlice {
    fn scalar(&self, numer: &BigInt) -> Scalar {
        Scalar::new(numer.clone(), self.denominator.clone())
    }

    pub fn part_count(&self) -> usize {
        self.parts.len()
    }

    pub fn gap_count(&self) -> usize {
        self.parts.len().saturating_sub(1)
    }

    /// The maximal closed components, left to right.
    pub fn union(&self) -> IntervalUnion {
        IntervalUnion::from_sorted_pairs(
            self.parts.iter().map(|(l, r)| (self.scalar(l), self.scalar(r))),
        )
    }

    /// The open gaps between consecutive components.
    pub fn gaps(&self) -> Vec<Interval> {
        self.parts
            .windows(2)
            .map(|w| Interval::open(self.scalar(&w[0].1), self.scalar(&w[1].0)))
            .collect()
    }

    /// Total length of the components, `2 − Σ gap widths`.
    pub fn measure(&self) -> Scalar {
        let total: BigInt = self.parts.iter().map(|(l, r)| r - l).sum();
        Scalar::new(total, self.denominator.clone())
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        let scaled = x * Scalar::from_integer(self.denominator.clone());
        let idx = self.parts.partition_point(|(l, _)| Scalar::from_integer(l.clone()) <= scaled);
        idx > 0 && {
            let (_, r) = &self.parts[idx - 1];
            scaled <= Scalar::from_integer(r.clone())
        }
    }

    /// Largest `ε` with `(−ε, ε)` inside the slice: the half-width of the component around 0.
    pub fn origin_interior_radius(&self) -> Scalar {
        let zero = BigInt::zero();
        match self.parts.iter().find(|(l, r)| *l <= zero && *r >= zero) {
            Some((l, r)) => self.scalar(&(-l).min(r.clone())),
            None => Scalar::zero(),
        }
    }
}

impl Serialize for DepthSlice {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire {
            depth: usize,
            #[serde(with = "serde_scalar")]
            measure: Scalar,
            parts: Vec<Interval>,
            gaps: Vec<Interval>,
        }
        Wire {
            depth: self.depth,
            measure: self.measure(),
            parts: self.union().parts().to_vec(),
            gaps: self.gaps(),
        }
        .serialize(serializer)
    }
}

/// Enumerates `C_depth − C_depth` with the default cap, in parallel.
pub fn enumerate_difference(seq: &ParamSequence, depth: usize) -> Result<DepthSlice> {
    enumerate_difference_with(seq, depth, Enumeration::default())
}

pub fn enumerate_difference_with(
    seq: &ParamSequence,
    depth: usize,
    options: Enumeration,
) -> Result<DepthSlice> {
    if depth > options.cap {
        return Err(Error::DepthCapExceeded { depth, cap: options.cap });
    }
    let lengths = seq.lengths_upto(depth)?;
    let denominator = lengths
        .iter()
        .fold(BigInt::one(), |acc, d| acc.lcm(d.denom()));
    let numer = |x: &Scalar| (x * Scalar::from_integer(denominator.clone())).to_integer();
    let weights: Vec<BigInt> = (1..=depth).map(|i| numer(&(&lengths[i - 1] - &lengths[i]))).collect();
    let width = numer(&(&lengths[depth] * int(2)));
    let origin = -denominator.clone();
    let split = options.split.min(depth);

    // |endpoints| ≤ D, and partial sums stay within 2D.
    let fits = (&denominator * 4u32).to_i128().is_some();
    let parts = if fits {
        let small = |x: &BigInt| x.to_i128().expect("checked to fit");
        let weights: Vec<i128> = weights.iter().map(small).collect();
        sweep_partitions(&weights, small(&width), small(&origin), split, options.parallel)
            .into_iter()
            .map(|(l, r)| (BigInt::from(l), BigInt::from(r)))
            .collect()
    } else {
        sweep_partitions(&weights, width, origin, split, options.parallel)
    };
    Ok(DepthSlice { depth, denominator, parts })
}

/// All sums `Σ s_i·w_i` over digits `s ∈ {0,1,2}` for the given weights, in code order.
fn digit_sums<T>(weights: &[T]) -> Vec<T>
where
    T: Clone + Zero + for<'a> Add<&'a T, Output = T>,
{
    let mut sums = vec![T::zero()];
    for w in weights {
        let mut next = Vec::with_capacity(sums.len() * 3);
        for s in &sums {
            let once = s.clone() + w;
            let twice = once.clone() + w;
            next.extend([s.clone(), once, twice]);
        }
        sums = next;
    }
    sums
}

fn sweep_partitions<T>(weights: &[T], width: T, origin: T, split: usize, parallel: bool) -> Vec<(T, T)>
where
    T: Clone + Ord + Zero + Send + Sync + for<'a> Add<&'a T, Output = T>,
{
    let (head, tail) = weights.split_at(split);
    let mut tail_sums = digit_sums(tail);
    tail_sums.sort_unstable();
    tail_sums.dedup();
    let bases: Vec<T> = digit_sums(head).into_iter().map(|b| b + &origin).collect();
    let local = |base: &T| {
        let mut out: Vec<(T, T)> = Vec::new();
        for t in &tail_sums {
            let left = base.clone() + t;
            let right = left.clone() + &width;
            push_merged(&mut out, left, right);
        }
        out
    };
    let partials: Vec<Vec<(T, T)>> = if parallel {
        bases.par_iter().map(local).collect()
    } else {
        bases.iter().map(local).collect()
    };
    let mut all: Vec<(T, T)> = partials.into_iter().flatten().collect();
    all.sort_by(|a, b| a.0.cmp(&b.0));
    let mut merged = Vec::new();
    for (l, r) in all {
        push_merged(&mut merged, l, r);
    }
    merged
}

/// Appends `[left, right]` to a left-sorted component list, joining touching components.
fn push_merged<T: Ord>(out: &mut Vec<(T, T)>, left: T, right: T) {
    if let Some(last) = out.last_mut() {
        if left <= last.1 {
            if right > last.1 {
                last.1 = right;
            }
            return;
        }
    }
    out.push((left, right));
}

/// Whether `x ∈ C_depth − C_depth`, by descending only into intervals `J_{s|r}` containing `x`.
///
/// Codes reaching the same left endpoint at the same depth share their whole subtree, so the
/// frontier is kept as a set of left endpoints.
pub fn contains(seq: &ParamSequence, depth: usize, x: &Scalar) -> Result<bool> {
    let mut frontier: BTreeSet<Scalar> = BTreeSet::new();
    let whole = Interval::closed(-Scalar::one(), Scalar::one());
    if !whole.contains(x) {
        return Ok(false);
    }
    frontier.insert(whole.left);
    for r in 1..=depth {
        let w = seq.weight(r)?;
        let len = seq.d(r)? * int(2);
        let mut next = BTreeSet::new();
        for left in &frontier {
            let mut l = left.clone();
            for _ in 0..3 {
                if l <= *x && *x <= &l + &len {
                    next.insert(l.clone());
                }
                l += &w;
            }
        }
        if next.is_empty() {
            return Ok(false);
        }
        frontier = next;
    }
    Ok(true)
}

/// `ε` at the given depth; see [`DepthSlice::origin_interior_radius`].
pub fn origin_interior_radius(seq: &ParamSequence, depth: usize) -> Result<Scalar> {
    Ok(enumerate_difference(seq, depth)?.origin_interior_radius())
}

fn require_cantorval(seq: &ParamSequence) -> Result<VerdictKind> {
    let verdict = classify(seq)?;
    if verdict.kind != VerdictKind::Cantorval {
        return Err(Error::CertificateMissing);
    }
    Ok(verdict.kind)
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureReport {
    pub rank: usize,
    pub depth: usize,
    /// Measure of the enumerated slice.
    #[serde(with = "serde_scalar")]
    pub oracle: Scalar,
    /// `2 − Σ_{n ≤ rank} 2·3^{n−1}(d_{k_n−1} − 3d_{k_n})`.
    #[serde(with = "serde_scalar")]
    pub formula: Scalar,
    pub agrees: bool,
}

/// The enumerated measure at depth `k_N` next to the partial gap-mass formula.
pub fn measure_at_depth(seq: &ParamSequence, ranks: &RankIndex, rank: usize) -> Result<MeasureReport> {
    require_cantorval(seq)?;
    if ranks.k0 != 0 {
        return Err(Error::FormulaNotApplicable(format!("k0 = {} (needs 0)", ranks.k0)));
    }
    let depth = ranks.k(rank);
    let oracle = enumerate_difference(seq, depth)?.measure();
    let mut formula = int(2);
    let mut power = int(2);
    for n in 1..=rank {
        let kn = ranks.k(n);
        formula -= &power * (seq.d(kn - 1)? - seq.d(kn)? * int(3));
        power *= int(3);
    }
    Ok(MeasureReport { rank, depth, agrees: oracle == formula, oracle, formula })
}

#[derive(Clone, Debug, Serialize)]
pub struct ContainmentReport {
    pub code: TernaryCode,
    pub first_rank: usize,
    pub last_rank: usize,
    pub depth: usize,
    pub removed_gaps: usize,
    /// Pieces of `J_t` minus the family gaps not covered by the depth-`k_N` intervals below `t`.
    pub uncovered: Vec<Interval>,
    pub covered: bool,
}

/// Checks `J_t ∖ (boundary-family gaps of ranks ≤ N) ⊆ ⋃ J_u` over `u ⊐ t`, `|u| = k_N`.
pub fn verify_containment(
    seq: &ParamSequence,
    ranks: &RankIndex,
    t: &TernaryCode,
    rank: usize,
) -> Result<ContainmentReport> {
    require_cantorval(seq)?;
    let first_rank = ranks.rank_containing(t.len()).ok_or_else(|| {
        Error::PreconditionViolated(format!("|t| = {} is below k0 = {}", t.len(), ranks.k0))
    })?;
    if rank < first_rank {
        return Err(Error::RankTooSmall { rank, len: t.len() });
    }
    let depth = ranks.k(rank);
    if depth > DEFAULT_DEPTH_CAP {
        return Err(Error::DepthCapExceeded { depth, cap: DEFAULT_DEPTH_CAP });
    }
    let (left, right) = boundary_family(seq, ranks, t, rank)?;
    let holes: Vec<Interval> = left
        .intervals(seq)?
        .into_iter()
        .chain(right.intervals(seq)?)
        .map(|(_, iv)| iv)
        .collect();
    let root = interval_j(seq, t)?;
    let remaining = IntervalUnion::from_intervals([&root]).minus_open(&holes);

    let mut level = vec![root];
    for r in t.len() + 1..=depth {
        let half = seq.d(r)?;
        let mut next = Vec::with_capacity(level.len() * 3);
        for parent in &level {
            let (a, b, c) = children_of(parent, &half);
            next.extend([a, b, c]);
        }
        next.sort_by(|a, b| a.left.cmp(&b.left));
        next.dedup();
        level = next;
    }
    let cover = IntervalUnion::from_intervals(&level);
    let uncovered = remaining.uncovered_by(&cover);
    Ok(ContainmentReport {
        code: t.clone(),
        first_rank,
        last_rank: rank,
        depth,
        removed_gaps: holes.len(),
        covered: uncovered.is_empty(),
        uncovered,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogReport {
    pub rank: usize,
    pub depth: usize,
    pub expected_count: usize,
    pub oracle_count: usize,
    pub family_count: usize,
    /// Family gaps that are not gaps of the enumerated slice.
    pub missing_from_oracle: Vec<GapRef>,
    /// Enumerated gaps that no family gap accounts for.
    pub unexplained: Vec<Interval>,
    pub matches: bool,
}

impl CatalogReport {
    /// Turns a mismatch into a structural error naming the first offending gap.
    pub fn into_result(self) -> Result<CatalogReport> {
        if self.matches {
            return Ok(self);
        }
        let culprit = match (self.missing_from_oracle.first(), self.unexplained.first()) {
            (Some(g), _) => format!("family gap G^{}_{} (rank {}) is not an oracle gap", g.side, g.code, g.rank),
            (None, Some(iv)) => format!("oracle gap {iv} is not in the family"),
            (None, None) => format!(
                "counts differ: oracle {}, family {}, expected {}",
                self.oracle_count, self.family_count, self.expected_count
            ),
        };
        Err(Error::Structural(culprit))
    }
}

/// Compares the gaps of the slice at depth `k_N` with the boundary family of `J_∅` up to rank `N`.
pub fn gap_catalog_crosscheck(seq: &ParamSequence, ranks: &RankIndex, rank: usize) -> Result<CatalogReport> {
    require_cantorval(seq)?;
    if ranks.k0 != 0 {
        return Err(Error::PreconditionViolated(format!("k0 = {} (needs 0)", ranks.k0)));
    }
    let depth = ranks.k(rank);
    let slice = enumerate_difference(seq, depth)?;
    let oracle: BTreeSet<(Scalar, Scalar)> =
        slice.gaps().into_iter().map(|g| (g.left, g.right)).collect();
    let (left, right) = boundary_family(seq, ranks, &TernaryCode::empty(), rank)?;
    let family: Vec<(GapRef, Interval)> =
        left.intervals(seq)?.into_iter().chain(right.intervals(seq)?).collect();
    let family_set: BTreeSet<(Scalar, Scalar)> =
        family.iter().map(|(_, iv)| (iv.left.clone(), iv.right.clone())).collect();
    let missing_from_oracle: Vec<GapRef> = family
        .iter()
        .filter(|(_, iv)| !oracle.contains(&(iv.left.clone(), iv.right.clone())))
        .map(|(g, _)| g.clone())
        .collect();
    let unexplained: Vec<Interval> = oracle
        .iter()
        .filter(|p| !family_set.contains(p))
        .map(|(l, r)| Interval::open(l.clone(), r.clone()))
        .collect();
    let expected_count = (1..=rank).map(|n| 2 * 3usize.pow(n as u32 - 1)).sum();
    let matches = missing_from_oracle.is_empty()
        && unexplained.is_empty()
        && oracle.len() == expected_count
        && family.len() == expected_count;
    Ok(CatalogReport {
        rank,
        depth,
        expected_count,
        oracle_count: oracle.len(),
        family_count: family.len(),
        missing_from_oracle,
        unexplained,
        matches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::difference_approximant;
    use crate::params::{period_of, rank_indices};
    use crate::scalar::ratio;

    #[test]
    fn constant_third_is_full() {
        let seq = ParamSequence::constant(ratio(1, 3)).unwrap();
        for depth in 0..=5 {
            let slice = enumerate_difference(&seq, depth).unwrap();
            assert_eq!(slice.part_count(), 1);
            assert_eq!(slice.measure(), int(2));
            assert_eq!(slice.origin_interior_radius(), int(1));
        }
    }

    #[test]
    fn half_depth_one() {
        let seq = ParamSequence::constant(ratio(1, 2)).unwrap();
        let slice = enumerate_difference(&seq, 1).unwrap();
        assert_eq!(
            slice.union(),
            IntervalUnion::from_pairs([
                (int(-1), ratio(-1, 2)),
                (ratio(-1, 4), ratio(1, 4)),
                (ratio(1, 2), int(1)),
            ])
        );
        assert_eq!(slice.gaps(), vec![
            Interval::open(ratio(-1, 2), ratio(-1, 4)),
            Interval::open(ratio(1, 4), ratio(1, 2)),
        ]);
        assert_eq!(slice.measure(), ratio(3, 2));
        assert_eq!(origin_interior_radius(&seq, 1).unwrap(), ratio(1, 4));
        // The component around 0 is J_{11…1} = [−d_n, d_n].
        assert_eq!(origin_interior_radius(&seq, 4).unwrap(), ratio(1, 256));
    }

    #[test]
    fn measure_goldens() {
        let golden = period_of(&[(1, 15), (11, 21)]);
        assert_eq!(enumerate_difference(&golden, 2).unwrap().measure(), ratio(26, 15));
        assert_eq!(enumerate_difference(&golden, 8).unwrap().measure(), ratio(130, 81));
        let apex = period_of(&[(1, 35), (7, 17)]);
        assert_eq!(enumerate_difference(&apex, 6).unwrap().measure(), ratio(3114, 1715));
    }

    #[test]
    fn agrees_with_recursive_subdivision() {
        for seq in [
            period_of(&[(1, 15), (11, 21)]),
            period_of(&[(1, 5), (1, 2), (2, 7)]),
            ParamSequence::new(vec![ratio(3, 4)], vec![ratio(1, 10)]).unwrap(),
        ] {
            for depth in 0..=6 {
                let fast = enumerate_difference(&seq, depth).unwrap().union();
                assert_eq!(fast, difference_approximant(&seq, depth).unwrap(), "{seq} depth {depth}");
            }
        }
    }

    #[test]
    fn single_worker_and_splits_agree() {
        let seq = period_of(&[(1, 35), (7, 17)]);
        let reference = enumerate_difference(&seq, 9).unwrap();
        for split in [0, 1, 3, 9] {
            let alt = enumerate_difference_with(&seq, 9, Enumeration { split, parallel: false, ..Enumeration::default() }).unwrap();
            assert_eq!(alt, reference);
        }
    }

    #[test]
    fn large_denominators_use_bigint_path() {
        let seq = period_of(&[(1_000_003, 3_000_017), (2_000_029, 3_000_047)]);
        let slice = enumerate_difference(&seq, 8).unwrap();
        assert_eq!(slice.union(), difference_approximant(&seq, 8).unwrap());
    }

    #[test]
    fn cap_is_enforced() {
        let seq = ParamSequence::constant(ratio(1, 2)).unwrap();
        assert!(matches!(
            enumerate_difference(&seq, 14),
            Err(Error::DepthCapExceeded { depth: 14, cap: 13 })
        ));
    }

    #[test]
    fn membership_examples() {
        let half = ParamSequence::constant(ratio(1, 2)).unwrap();
        assert!(!contains(&half, 3, &ratio(3, 8)).unwrap());
        assert!(contains(&half, 3, &int(1)).unwrap());
        assert!(contains(&half, 3, &Scalar::zero()).unwrap());
        assert!(!contains(&half, 3, &ratio(3, 2)).unwrap());
        let slice = enumerate_difference(&half, 3).unwrap();
        for k in -64..=64 {
            let x = ratio(k, 64);
            assert_eq!(contains(&half, 3, &x).unwrap(), slice.contains(&x), "x = {x}");
        }
    }

    #[test]
    fn origin_radius_apex() {
        let apex = period_of(&[(1, 35), (7, 17)]);
        let radii: Vec<Scalar> = [2, 4, 6, 8].iter().map(|&d| origin_interior_radius(&apex, d).unwrap()).collect();
        assert_eq!(radii, vec![ratio(23, 35), ratio(149, 245), ratio(1031, 1715), ratio(1441, 2401)]);
    }

    #[test]
    fn measure_report_matches_formula() {
        let golden = period_of(&[(1, 15), (11, 21)]);
        let ranks = rank_indices(&golden, 4).unwrap();
        let report = measure_at_depth(&golden, &ranks, 4).unwrap();
        assert_eq!(report.oracle, ratio(130, 81));
        assert!(report.agrees);
        let apex = period_of(&[(1, 35), (7, 17)]);
        let ranks = rank_indices(&apex, 3).unwrap();
        let report = measure_at_depth(&apex, &ranks, 3).unwrap();
        assert_eq!(report.oracle, int(2) - ratio(4, 35) * ratio(79, 49));
        assert!(report.agrees);
    }

    #[test]
    fn catalog_matches_families() {
        let apex = period_of(&[(1, 35), (7, 17)]);
        let ranks = rank_indices(&apex, 3).unwrap();
        let two = gap_catalog_crosscheck(&apex, &ranks, 2).unwrap();
        assert!(two.matches && two.oracle_count == 8);
        let three = gap_catalog_crosscheck(&apex, &ranks, 3).unwrap().into_result().unwrap();
        assert_eq!(three.oracle_count, 26);
        let golden = period_of(&[(1, 15), (11, 21)]);
        let ranks = rank_indices(&golden, 3).unwrap();
        assert_eq!(gap_catalog_crosscheck(&golden, &ranks, 3).unwrap().oracle_count, 26);
        let unknown = period_of(&[(2, 25), (13, 23)]);
        let ranks = rank_indices(&unknown, 3).unwrap();
        assert!(matches!(gap_catalog_crosscheck(&unknown, &ranks, 2), Err(Error::CertificateMissing)));
    }

    #[test]
    fn containment_reports() {
        let apex = period_of(&[(1, 35), (7, 17)]);
        let ranks = rank_indices(&apex, 3).unwrap();
        for t in ["", "1", "02"] {
            let report = verify_containment(&apex, &ranks, &t.parse().unwrap(), 2).unwrap();
            assert!(report.covered, "t = {t}: {:?}", report.uncovered);
        }
        let golden = period_of(&[(1, 15), (11, 21)]);
        let ranks = rank_indices(&golden, 3).unwrap();
        assert!(verify_containment(&golden, &ranks, &TernaryCode::empty(), 3).unwrap().covered);
    }
}
