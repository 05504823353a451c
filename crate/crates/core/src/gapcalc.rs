//! The gap taxonomy of `C(a) − C(a)`.
//!
//! For a code `s` of length `k_n − 1` the interval `J_s` has two gaps `G_s^0`, `G_s^1` of
//! rank `n`. This module names particular gaps (leftmost/rightmost gaps of a rank, the
//! alternating extremal sequences `G^i(s, n)`), grows the recursive gap families rooted at a
//! gap, and pairs each `J_s` with its associated covering interval `J_u`.
//!
//! Families grow as `3^{n−m}` per rank, so every constructor takes an explicit rank cap.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::classify::margin_m;
use crate::geometry::{self, interval_j, Interval, TernaryCode};
use crate::params::{tail_weight_sum, ParamSequence, RankIndex};
use crate::scalar::{int, serde_scalar, Extended, Scalar};
use crate::{Error, Result};

/// A gap `G_code^side` of the given rank (`|code| = k_rank − 1`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GapRef {
    pub code: TernaryCode,
    pub side: u8,
    pub rank: usize,
}

impl GapRef {
    pub fn interval(&self, seq: &ParamSequence) -> Result<Interval> {
        geometry::gap(seq, &self.code, self.side)
    }
}

/// `N(i, s)`: the last position holding a digit `> 0` (`i = 0`) or `< 2` (`i = 1`); 0 if none.
pub fn last_index(s: &TernaryCode, i: u8) -> usize {
    let hit = |d: u8| if i == 0 { d > 0 } else { d < 2 };
    s.digits().iter().rposition(|&d| hit(d)).map_or(0, |p| p + 1)
}

/// The leftmost (`side = 0`) or rightmost (`side = 1`) gap of rank `n` coming from `J_t`.
pub fn extremal_gap(
    seq: &ParamSequence,
    ranks: &RankIndex,
    t: &TernaryCode,
    n: usize,
    side: u8,
) -> Result<GapRef> {
    let _ = seq;
    let kn = ranks.k(n);
    if n == 0 || kn <= t.len() {
        return Err(Error::RankTooSmall { rank: n, len: t.len() });
    }
    Ok(GapRef {
        code: t.padded(2 * side, kn - t.len() - 1),
        side,
        rank: n,
    })
}

/// The family `𝒢^i_s(m..=n)` rooted at `G_s^i`, materialized rank by rank.
#[derive(Clone, Debug, Serialize)]
pub struct GapFamily {
    pub origin: TernaryCode,
    pub side: u8,
    pub root_rank: usize,
    pub by_rank: BTreeMap<usize, BTreeSet<GapRef>>,
}

impl GapFamily {
    pub fn iter(&self) -> impl Iterator<Item = &GapRef> {
        self.by_rank.values().flatten()
    }

    pub fn count(&self) -> usize {
        self.by_rank.values().map(BTreeSet::len).sum()
    }

    pub fn max_rank(&self) -> usize {
        self.by_rank.keys().next_back().copied().unwrap_or(self.root_rank)
    }

    pub fn contains(&self, gap: &GapRef) -> bool {
        self.by_rank.get(&gap.rank).is_some_and(|set| set.contains(gap))
    }

    /// Gap intervals, ordered by rank then code.
    pub fn intervals(&self, seq: &ParamSequence) -> Result<Vec<(GapRef, Interval)>> {
        self.iter()
            .map(|g| g.interval(seq).map(|iv| (g.clone(), iv)))
            .collect()
    }
}

/// Builds `𝒢^i_s(m), …, 𝒢^i_s(up_to)` for `|s| = k_m − 1`.
///
/// Rank `n + 1` holds the extremal gap `Ḡ^i_s(n+1)` plus, for every earlier member `G_t^j`,
/// the two gaps of rank `n + 1` nearest its endpoints: `Ḡ^1_{t^j}(n+1)` and
/// `Ḡ^0_{t^(j+1)}(n+1)`.
pub fn family(
    seq: &ParamSequence,
    ranks: &RankIndex,
    s: &TernaryCode,
    i: u8,
    up_to: usize,
) -> Result<GapFamily> {
    let m = ranks
        .rank_of_code_length(s.len())
        .ok_or(Error::MisalignedCodeLength { len: s.len() })?;
    if up_to < m {
        return Err(Error::RankTooSmall { rank: up_to, len: s.len() });
    }
    let mut by_rank: BTreeMap<usize, BTreeSet<GapRef>> = BTreeMap::new();
    by_rank.insert(m, BTreeSet::from([GapRef { code: s.clone(), side: i, rank: m }]));
    for n in m..up_to {
        let next = n + 1;
        let parents: Vec<&GapRef> = by_rank.values().flatten().collect();
        let spawned: Vec<GapRef> = parents
            .par_iter()
            .flat_map_iter(|g| {
                [
                    extremal_gap(seq, ranks, &g.code.child(g.side), next, 1),
                    extremal_gap(seq, ranks, &g.code.child(g.side + 1), next, 0),
                ]
            })
            .collect::<Result<_>>()?;
        let produced = spawned.len() + 1;
        let mut level: BTreeSet<GapRef> = spawned.into_iter().collect();
        level.insert(extremal_gap(seq, ranks, s, next, i)?);
        let expected = 3usize.pow((next - m) as u32);
        if level.len() != produced || level.len() != expected {
            return Err(Error::Structural(format!(
                "family of G^{i}_{s} at rank {next}: {} distinct gaps from {produced} produced, expected {expected}",
                level.len()
            )));
        }
        by_rank.insert(next, level);
    }
    Ok(GapFamily {
        origin: s.clone(),
        side: i,
        root_rank: m,
        by_rank,
    })
}

/// `𝒢_t`: the families rooted at `t^0^(k_m−k−1)` (left) and `t^2^(k_m−k−1)` (right), where
/// `k = |t|` and `k_{m−1} ≤ k < k_m`.
pub fn boundary_family(
    seq: &ParamSequence,
    ranks: &RankIndex,
    t: &TernaryCode,
    up_to: usize,
) -> Result<(GapFamily, GapFamily)> {
    let k = t.len();
    let m = ranks.rank_containing(k).ok_or_else(|| {
        Error::PreconditionViolated(format!("|t| = {k} is below k0 = {}", ranks.k0))
    })?;
    let pad = ranks.k(m) - k - 1;
    let left = family(seq, ranks, &t.padded(0, pad), 0, up_to)?;
    let right = family(seq, ranks, &t.padded(2, pad), 1, up_to)?;
    Ok((left, right))
}

/// `G^i(s, n)`: starting from `s`, pad with `2i` up to the next rank, then alternate a single
/// `1` with padding blocks until rank `n`.
pub fn extremal_sequence(
    seq: &ParamSequence,
    ranks: &RankIndex,
    s: &TernaryCode,
    i: u8,
    n: usize,
) -> Result<GapRef> {
    let _ = seq;
    let k = s.len();
    let m = ranks.rank_containing(k).ok_or_else(|| {
        Error::PreconditionViolated(format!("|s| = {k} is below k0 = {}", ranks.k0))
    })?;
    if n < m {
        return Err(Error::RankTooSmall { rank: n, len: k });
    }
    let pad = 2 * i;
    let mut code = s.padded(pad, ranks.k(m) - k - 1);
    for j in m + 1..=n {
        code = code.child(1).padded(pad, ranks.k(j) - ranks.k(j - 1) - 1);
    }
    Ok(GapRef { code, side: i, rank: n })
}

/// The interval `J_u` associated with `J_s` (`|s| = k_m − 1`): with `N = N(0, s)`,
/// `u = (s|(N−1)) ^ (s_N − 1) ^ 2^(k_m − N − 1)`.
///
/// `J_u` covers the family `𝒢^0_s` and `J_s` covers `𝒢^1_u`.
pub fn associate(ranks: &RankIndex, s: &TernaryCode) -> Result<TernaryCode> {
    let m = ranks
        .rank_of_code_length(s.len())
        .ok_or(Error::MisalignedCodeLength { len: s.len() })?;
    let n = last_index(s, 0);
    let (lo, hi) = (ranks.k(m - 1) + 1, ranks.k(m) - 1);
    if n < lo || n > hi {
        return Err(Error::NoAssociate { n, lo, hi });
    }
    Ok(s
        .restrict(n - 1)
        .child(s.at(n) - 1)
        .padded(2, ranks.k(m) - n - 1))
}

/// Exact distances and containments for an associated pair `(J_s, J_u)` of rank `n`.
#[derive(Clone, Debug, Serialize)]
pub struct CoveringReport {
    pub rank: usize,
    /// `N = N(0, s) = N(1, u)`.
    pub split_index: usize,
    /// `l(G⁰_s) − r(G¹_u)`.
    #[serde(with = "serde_scalar")]
    pub gap_separation: Scalar,
    /// `r(J_u) − r(G⁰_s)`.
    #[serde(with = "serde_scalar")]
    pub right_clearance: Scalar,
    /// `l(G¹_u) − l(J_s)`.
    #[serde(with = "serde_scalar")]
    pub left_clearance: Scalar,
    pub margin: Extended,
    /// `Σ_{i > n} (d_{k_i−1} − d_{k_i})`.
    #[serde(with = "serde_scalar")]
    pub tail: Scalar,
    /// The three distances are each `≥ m_n`.
    pub distances_bounded: bool,
    /// `m_n ≥ 2·tail`, i.e. the rank-`n` instance of the Cantorval condition.
    pub condition_holds_at_rank: bool,
    /// `G⁰_s ⊂ J_{u^2}`.
    pub gap_in_cover: bool,
    /// `G¹_u ⊂ J_{s^0}`.
    pub cover_gap_in_s: bool,
    /// The distances agree with `3d_N − d_{N−1} − d_{k_n−1} + d_{k_n}` and `4d_{k_n} − (3d_N − d_{N−1})`.
    pub closed_forms_agree: bool,
}

impl CoveringReport {
    pub fn all_ok(&self) -> bool {
        self.distances_bounded && self.gap_in_cover && self.cover_gap_in_s && self.closed_forms_agree
    }
}

pub fn covering_check(
    seq: &ParamSequence,
    ranks: &RankIndex,
    s: &TernaryCode,
    u: &TernaryCode,
) -> Result<CoveringReport> {
    let rank = ranks
        .rank_of_code_length(s.len())
        .ok_or(Error::MisalignedCodeLength { len: s.len() })?;
    if u.len() != s.len() {
        return Err(Error::NotAssociated(format!("lengths {} and {} differ", s.len(), u.len())));
    }
    let split = last_index(s, 0);
    let (lo, hi) = (ranks.k(rank - 1) + 1, ranks.k(rank) - 1);
    let associated = split == last_index(u, 1)
        && (lo..=hi).contains(&split)
        && s.restrict(split - 1) == u.restrict(split - 1)
        && u.at(split) + 1 == s.at(split);
    if !associated {
        return Err(Error::NotAssociated(format!("J_{s} and J_{u}")));
    }

    let g0_s = geometry::gap(seq, s, 0)?;
    let g1_u = geometry::gap(seq, u, 1)?;
    let j_s = interval_j(seq, s)?;
    let j_u = interval_j(seq, u)?;
    let gap_separation = &g0_s.left - &g1_u.right;
    let right_clearance = &j_u.right - &g0_s.right;
    let left_clearance = &g1_u.left - &j_s.left;

    let kn = ranks.k(rank);
    let spread = seq.d(split)? * int(3) - seq.d(split - 1)?;
    let step = seq.weight(kn)?;
    let closed_forms_agree = right_clearance == &spread - &step
        && left_clearance == &spread - &step
        && gap_separation == seq.d(kn)? * int(4) - &spread;

    let margin = margin_m(seq, ranks, rank)?;
    let tail = tail_weight_sum(seq, ranks, rank + 1)?;
    let bounded = |x: &Scalar| Extended::Finite(x.clone()) >= margin;
    let distances_bounded =
        bounded(&gap_separation) && bounded(&right_clearance) && bounded(&left_clearance);
    let condition_holds_at_rank = margin >= Extended::Finite(&tail * int(2));

    let (_, _, u2) = geometry::children(seq, u)?;
    let (s0, _, _) = geometry::children(seq, s)?;
    Ok(CoveringReport {
        rank,
        split_index: split,
        gap_separation,
        right_clearance,
        left_clearance,
        margin,
        tail,
        distances_bounded,
        condition_holds_at_rank,
        gap_in_cover: g0_s.is_subset_of(&u2),
        cover_gap_in_s: g1_u.is_subset_of(&s0),
        closed_forms_agree,
    })
}

/// Every `(s, u)` associated pair at rank `n`, in code order.
pub fn associated_pairs(ranks: &RankIndex, n: usize) -> Vec<(TernaryCode, TernaryCode)> {
    TernaryCode::all(ranks.k(n) - 1)
        .filter_map(|s| associate(ranks, &s).ok().map(|u| (s, u)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{period_of, rank_indices};
    use crate::scalar::ratio;

    fn code(s: &str) -> TernaryCode {
        s.parse().unwrap()
    }

    fn golden_15() -> (ParamSequence, RankIndex) {
        let seq = period_of(&[(1, 15), (11, 21)]);
        let ranks = rank_indices(&seq, 8).unwrap();
        (seq, ranks)
    }

    fn apex() -> (ParamSequence, RankIndex) {
        let seq = period_of(&[(1, 35), (7, 17)]);
        let ranks = rank_indices(&seq, 8).unwrap();
        (seq, ranks)
    }

    #[test]
    fn last_index_examples() {
        assert_eq!(last_index(&code("000"), 0), 0);
        assert_eq!(last_index(&code("102"), 0), 3);
        assert_eq!(last_index(&code("102"), 1), 2);
        assert_eq!(last_index(&code("22"), 1), 0);
    }

    #[test]
    fn extremal_gap_examples() {
        let (seq, ranks) = golden_15();
        let g = extremal_gap(&seq, &ranks, &TernaryCode::empty(), 1, 0).unwrap();
        assert_eq!((g.code, g.side), (code("0"), 0));
        let g = extremal_gap(&seq, &ranks, &TernaryCode::empty(), 2, 1).unwrap();
        assert_eq!((g.code, g.side), (code("222"), 1));
        assert!(extremal_gap(&seq, &ranks, &code("00"), 1, 0).is_err());
        let left = extremal_gap(&seq, &ranks, &code("1"), 2, 0).unwrap().interval(&seq).unwrap();
        let right = extremal_gap(&seq, &ranks, &code("1"), 2, 1).unwrap().interval(&seq).unwrap();
        assert!(left.right < right.left);
    }

    #[test]
    fn family_first_ranks() {
        let (seq, ranks) = golden_15();
        let fam = family(&seq, &ranks, &code("1"), 0, 2).unwrap();
        assert_eq!(fam.by_rank[&1].len(), 1);
        let expected: BTreeSet<GapRef> = [
            GapRef { code: code("100"), side: 0, rank: 2 },
            GapRef { code: code("110"), side: 0, rank: 2 },
            GapRef { code: code("102"), side: 1, rank: 2 },
        ]
        .into();
        assert_eq!(fam.by_rank[&2], expected);
        let deep = family(&seq, &ranks, &code("1"), 0, 5).unwrap();
        for n in 1..=5 {
            assert_eq!(deep.by_rank[&n].len(), 3usize.pow(n as u32 - 1));
        }
        assert!(matches!(
            family(&seq, &ranks, &code("11"), 0, 3),
            Err(Error::MisalignedCodeLength { len: 2 })
        ));
    }

    #[test]
    fn boundary_family_counts_and_mass() {
        let (seq, ranks) = golden_15();
        let (left, right) = boundary_family(&seq, &ranks, &TernaryCode::empty(), 3).unwrap();
        assert_eq!(left.origin, code("0"));
        assert_eq!(right.origin, code("2"));
        for n in 1..=3 {
            assert_eq!(left.by_rank[&n].len() + right.by_rank[&n].len(), 2 * 3usize.pow(n as u32 - 1));
        }
        let mass: Scalar = left
            .intervals(&seq)
            .unwrap()
            .into_iter()
            .chain(right.intervals(&seq).unwrap())
            .map(|(_, iv)| iv.length())
            .sum();
        // 2·(2/15)·(1 + 1/3 + 1/9)
        assert_eq!(mass, ratio(4, 15) * ratio(13, 9));
    }

    #[test]
    fn extremal_sequence_codes_and_endpoints() {
        let (seq, ranks) = apex();
        let s = TernaryCode::empty();
        let g = extremal_sequence(&seq, &ranks, &s, 0, 1).unwrap();
        assert_eq!(g, extremal_gap(&seq, &ranks, &s, 1, 0).unwrap());
        let g3 = extremal_sequence(&seq, &ranks, &s, 0, 3).unwrap();
        assert_eq!(g3.code, code("01010"));
        let right = g3.interval(&seq).unwrap().right;
        let j = interval_j(&seq, &s).unwrap();
        let sum: Scalar = (1..=3).map(|i| seq.weight(ranks.k(i)).unwrap()).sum();
        assert_eq!(&right - &j.left, sum);
        let g1 = extremal_sequence(&seq, &ranks, &s, 1, 3).unwrap();
        assert_eq!(g1.code, code("21212"));
        assert_eq!(&j.right - g1.interval(&seq).unwrap().left, sum);
    }

    #[test]
    fn associate_examples() {
        let (_, ranks) = apex();
        assert_eq!(associate(&ranks, &code("001")).unwrap(), code("000"));
        // N at the band edge k_m − 1: no padding.
        assert_eq!(associate(&ranks, &code("012")).unwrap(), code("011"));
        assert!(matches!(associate(&ranks, &code("100")), Err(Error::NoAssociate { n: 1, .. })));
        assert!(matches!(associate(&ranks, &code("10")), Err(Error::MisalignedCodeLength { .. })));
    }

    #[test]
    fn associate_preserves_split_index_and_is_injective() {
        let (_, ranks) = golden_15();
        for n in 1..=3 {
            let pairs = associated_pairs(&ranks, n);
            let mut images = BTreeSet::new();
            for (s, u) in &pairs {
                assert_eq!(last_index(u, 1), last_index(s, 0));
                assert!(images.insert(u.clone()));
            }
        }
    }

    #[test]
    fn covering_for_apex_sequence() {
        let (seq, ranks) = apex();
        let report = covering_check(&seq, &ranks, &code("001"), &code("000")).unwrap();
        assert!(report.all_ok(), "{report:?}");
        assert!(report.condition_holds_at_rank);
        assert!(covering_check(&seq, &ranks, &code("001"), &code("001")).is_err());
    }

    #[test]
    fn covering_flags_failed_condition() {
        let (seq, ranks) = golden_15();
        let report = covering_check(&seq, &ranks, &code("1"), &code("0")).unwrap();
        assert_eq!(report.margin, Extended::Finite(ratio(2, 45)));
        assert_eq!(report.tail, ratio(2, 45));
        assert!(report.distances_bounded);
        assert!(!report.condition_holds_at_rank);
    }
}
