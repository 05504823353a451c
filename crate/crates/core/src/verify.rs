//! Named property checks: the closed forms of the construction compared against exhaustive
//! enumeration at small depth and rank.
//!
//! Each check returns a [`PropertyResult`]; a failing check carries the first counterexample.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::classify::{classify, VerdictKind};
use crate::gapcalc::{
    associated_pairs, boundary_family, covering_check, extremal_sequence, family, last_index, GapFamily,
};
use crate::geometry::{
    children, difference_approximant, gap, interval_j, overlap, refine_invariance_check,
    sumset_approximant, Interval, TernaryCode,
};
use crate::oracle::enumerate_difference;
use crate::params::{partial_weight_sum, rank_indices, ParamSequence, RankIndex};
use crate::scalar::{int, one_third, Scalar};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub passed: bool,
    /// Number of individual instances checked.
    pub checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl PropertyResult {
    fn new(name: impl Into<String>) -> Self {
        PropertyResult { name: name.into(), passed: true, checked: 0, counterexample: None }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.passed {
            self.passed = false;
            self.counterexample = Some(describe());
        }
    }
}

pub fn all_passed(results: &[PropertyResult]) -> bool {
    results.iter().all(|r| r.passed)
}

fn codes_upto(depth: usize) -> impl Iterator<Item = TernaryCode> {
    (0..=depth).flat_map(TernaryCode::all)
}

/// Structural identities of the intervals `J_s` and their approximants, for codes of length
/// up to `depth`:
///
/// - `interval-length`: `|J_s| = 2 d_{|s|}`.
/// - `padding-endpoints`: appending `0…0`, `1…1`, `2…2` keeps the left end, centre, right end.
/// - `endpoint-differences`: `l(J_s) − l(J_u) = Σ (s_r − u_r)(d_{r−1} − d_r)`.
/// - `gap-widths`: both gaps of `J_s` have width `d_n − 3d_{n+1}` when `a_{n+1} > 1/3`.
/// - `overlap-widths`: both overlaps have width `3d_{n+1} − d_n` when `a_{n+1} ≤ 1/3`.
/// - `refinement-invariance`: the approximant is unchanged across steps with `a ≤ 1/3`.
/// - `nesting`: each approximant lies inside the previous one.
/// - `sumset-shift`: `C_n + C_n = (C_n − C_n) + 1` (checked up to depth 4).
/// - `symmetry`: each approximant is symmetric about 0.
pub fn interval_properties(seq: &ParamSequence, depth: usize) -> Result<Vec<PropertyResult>> {
    let mut length = PropertyResult::new("interval-length");
    let mut padding = PropertyResult::new("padding-endpoints");
    let mut differences = PropertyResult::new("endpoint-differences");
    let mut gaps = PropertyResult::new("gap-widths");
    let mut overlaps = PropertyResult::new("overlap-widths");
    let mut refinement = PropertyResult::new("refinement-invariance");
    let mut nesting = PropertyResult::new("nesting");
    let mut shift = PropertyResult::new("sumset-shift");
    let mut symmetry = PropertyResult::new("symmetry");
    let third = one_third();

    for s in codes_upto(depth) {
        let n = s.len();
        let j = interval_j(seq, &s)?;
        length.check(j.length() == seq.d(n)? * int(2), || format!("J_{s}"));
        for extra in 1..=depth.saturating_sub(n).min(3) {
            let l = interval_j(seq, &s.padded(0, extra))?;
            let c = interval_j(seq, &s.padded(1, extra))?;
            let r = interval_j(seq, &s.padded(2, extra))?;
            padding.check(
                l.left == j.left && c.center() == j.center() && r.right == j.right,
                || format!("J_{s} padded by {extra}"),
            );
        }
        if n < depth {
            let (c0, c1, c2) = children(seq, &s)?;
            let recursive = [c0, c1, c2];
            let closed: Vec<Interval> =
                (0..3).map(|d| interval_j(seq, &s.child(d))).collect::<Result<_>>()?;
            padding.check(recursive[..] == closed[..], || format!("children of J_{s}"));
            let (dn, dn1) = (seq.d(n)?, seq.d(n + 1)?);
            if *seq.ratio_ref(n + 1)? > third {
                let want = &dn - &dn1 * int(3);
                let (g0, g1) = (gap(seq, &s, 0)?, gap(seq, &s, 1)?);
                gaps.check(g0.length() == want && g1.length() == want, || format!("gaps of J_{s}"));
            } else {
                let want = &dn1 * int(3) - &dn;
                let (z0, z1) = (overlap(seq, &s, 0)?, overlap(seq, &s, 1)?);
                overlaps.check(z0.length() == want && z1.length() == want, || format!("overlaps of J_{s}"));
            }
        }
    }

    for n in 1..=depth {
        let lengths = seq.lengths_upto(n)?;
        let codes: Vec<TernaryCode> = TernaryCode::all(n).collect();
        let step = (codes.len() / 40).max(1);
        for s in codes.iter().step_by(step) {
            for u in codes.iter().step_by(step * 3 + 1) {
                let expected: Scalar = (1..=n)
                    .map(|r| (&lengths[r - 1] - &lengths[r]) * int(s.at(r) as i64 - u.at(r) as i64))
                    .sum();
                let got = interval_j(seq, s)?.left - interval_j(seq, u)?.left;
                differences.check(got == expected, || format!("J_{s} vs J_{u}"));
            }
        }
    }

    let slices: Vec<_> = (0..=depth).map(|n| enumerate_difference(seq, n).map(|s| s.union())).collect::<Result<_>>()?;
    for n in 0..depth {
        nesting.check(slices[n + 1].is_subset_of(&slices[n]), || format!("depth {} in {n}", n + 1));
        for k in 1..=depth - n {
            if (n + 1..=n + k).all(|i| seq.ratio_ref(i).map(|a| *a <= third).unwrap_or(false)) {
                refinement.check(refine_invariance_check(seq, n, k)?, || format!("n = {n}, k = {k}"));
            }
        }
    }
    for (n, slice) in slices.iter().enumerate() {
        symmetry.check(slice.negate() == *slice, || format!("depth {n}"));
        padding.check(*slice == difference_approximant(seq, n)?, || format!("recursive approximant at depth {n}"));
        if n <= 4 {
            shift.check(sumset_approximant(seq, n)? == slice.translate(&Scalar::from_integer(1.into())), || {
                format!("depth {n}")
            });
        }
    }

    Ok(vec![length, padding, differences, gaps, overlaps, refinement, nesting, shift, symmetry])
}

/// Gap-taxonomy properties for families rooted at ranks `1..=2`, enumerated `extra` ranks deep:
///
/// - `extremal-monotonicity`: `r(G⁰(s,n))`, `l(G⁰(s,n))` increase and `l(G¹(s,n))`, `r(G¹(s,n))`
///   decrease in `n`.
/// - `extremal-step`: consecutive extremal gaps move by exactly `d_{k_{n+1}−1} − d_{k_{n+1}}`.
/// - `extremal-endpoints`: `r(G⁰(s,n)) = l(J_s) + Σ_{i=m..n} w(k_i)` and
///   `l(G¹(s,n)) = r(J_s) − Σ_{i=m..n} w(k_i)`.
/// - `root-separation`: `r(G¹(s^0,n)) < l(G⁰_s) < r(G⁰_s) < l(G⁰(s,n))` and the mirrored chain
///   `r(G¹(s,n)) < l(G¹_s) < r(G¹_s) < l(G⁰(s^2,n))`.
/// - `family-placement`: each member of `𝒢⁰_s(n)` lies left of `r(G⁰(s^0,n))` or inside
///   `[l(G¹(s^0,n)), r(G⁰(s,n))]`; mirrored for `𝒢¹_s(n)`.
/// - `family-disjoint`: family gaps are pairwise disjoint and inside `J_s`.
/// - `outside-boundary-family`: a rank-`n` gap `G^i_s` below `t` that is not in `𝒢_t` has
///   `N(i,s) > |t|`.
/// - `covering-distances`: associated pairs meet the distance bounds, containments and closed
///   forms.
/// - `covering-disjoint`: families of associated `J_s`, `J_u` do not intersect across the pair
///   (only checked for sequences with a Cantorval certificate).
pub fn gap_properties(seq: &ParamSequence, extra: usize) -> Result<Vec<PropertyResult>> {
    let ranks = rank_indices(seq, 0)?;
    let mut monotone = PropertyResult::new("extremal-monotonicity");
    let mut step = PropertyResult::new("extremal-step");
    let mut endpoints = PropertyResult::new("extremal-endpoints");
    let mut separation = PropertyResult::new("root-separation");
    let mut placement = PropertyResult::new("family-placement");
    let mut disjoint = PropertyResult::new("family-disjoint");
    let mut outside = PropertyResult::new("outside-boundary-family");
    let mut distances = PropertyResult::new("covering-distances");
    let mut cross = PropertyResult::new("covering-disjoint");
    let certified = classify(seq).map(|v| v.kind == VerdictKind::Cantorval).unwrap_or(false);

    for m in 1..=2 {
        let top = m + extra;
        for k in ranks.k(m - 1)..ranks.k(m) {
            for s in TernaryCode::all(k) {
                check_extremal(seq, &ranks, &s, m, top, &mut monotone, &mut step, &mut endpoints)?;
            }
        }
        for s in TernaryCode::all(ranks.k(m) - 1) {
            check_roots(seq, &ranks, &s, m, top, &mut separation, &mut placement, &mut disjoint)?;
        }
        if m == 1 {
            for k in ranks.k0..ranks.k(1) {
                for t in TernaryCode::all(k) {
                    check_outside(seq, &ranks, &t, extra.min(2), &mut outside)?;
                }
            }
        }
        for (s, u) in associated_pairs(&ranks, m) {
            let report = covering_check(seq, &ranks, &s, &u)?;
            distances.check(report.all_ok(), || format!("J_{s}, J_{u}: {report:?}"));
            if certified {
                check_cross(seq, &ranks, &s, &u, top, &mut cross)?;
            }
        }
    }
    Ok(vec![monotone, step, endpoints, separation, placement, disjoint, outside, distances, cross])
}

#[allow(clippy::too_many_arguments)]
fn check_extremal(
    seq: &ParamSequence,
    ranks: &RankIndex,
    s: &TernaryCode,
    m: usize,
    top: usize,
    monotone: &mut PropertyResult,
    step: &mut PropertyResult,
    endpoints: &mut PropertyResult,
) -> Result<()> {
    let j = interval_j(seq, s)?;
    let lo: Vec<Interval> = (m..=top)
        .map(|n| extremal_sequence(seq, ranks, s, 0, n)?.interval(seq))
        .collect::<Result<_>>()?;
    let hi: Vec<Interval> = (m..=top)
        .map(|n| extremal_sequence(seq, ranks, s, 1, n)?.interval(seq))
        .collect::<Result<_>>()?;
    for (idx, n) in (m..=top).enumerate() {
        let sum = partial_weight_sum(seq, ranks, m, n)?;
        endpoints.check(
            lo[idx].right == &j.left + &sum && hi[idx].left == &j.right - &sum,
            || format!("s = {s}, n = {n}"),
        );
        if idx + 1 < lo.len() {
            let w = seq.weight(ranks.k(n + 1))?;
            monotone.check(
                lo[idx + 1].right > lo[idx].right
                    && lo[idx + 1].left > lo[idx].left
                    && hi[idx + 1].left < hi[idx].left
                    && hi[idx + 1].right < hi[idx].right,
                || format!("s = {s}, n = {n}"),
            );
            step.check(
                &lo[idx + 1].right - &lo[idx].right == w && &hi[idx].left - &hi[idx + 1].left == w,
                || format!("s = {s}, n = {n}"),
            );
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn check_roots(
    seq: &ParamSequence,
    ranks: &RankIndex,
    s: &TernaryCode,
    m: usize,
    top: usize,
    separation: &mut PropertyResult,
    placement: &mut PropertyResult,
    disjoint: &mut PropertyResult,
) -> Result<()> {
    let ext = |code: &TernaryCode, side: u8, n: usize| -> Result<Interval> {
        extremal_sequence(seq, ranks, code, side, n)?.interval(seq)
    };
    let (g0, g1) = (gap(seq, s, 0)?, gap(seq, s, 1)?);
    let (s0, s2) = (s.child(0), s.child(2));
    for n in m + 1..=top {
        let l1 = ext(&s0, 1, n)?.right < g0.left && g0.right < ext(s, 0, n)?.left;
        let l2 = ext(s, 1, n)?.right < g1.left && g1.right < ext(&s2, 0, n)?.left;
        separation.check(l1 && l2, || format!("s = {s}, n = {n}"));
    }
    let j = interval_j(seq, s)?;
    for side in 0..2u8 {
        let fam = family(seq, ranks, s, side, top)?;
        check_family_disjoint(seq, &fam, &j, disjoint)?;
        for n in m + 1..=top {
            let (lower, upper) = if side == 0 {
                (ext(&s0, 0, n)?, (ext(&s0, 1, n)?, ext(s, 0, n)?))
            } else {
                (ext(&s2, 1, n)?, (ext(s, 1, n)?, ext(&s2, 0, n)?))
            };
            for g in &fam.by_rank[&n] {
                let iv = g.interval(seq)?;
                let ok = if side == 0 {
                    iv.right <= lower.right || (upper.0.left <= iv.left && iv.right <= upper.1.right)
                } else {
                    iv.left >= lower.left || (upper.0.left <= iv.left && iv.right <= upper.1.right)
                };
                placement.check(ok, || format!("G^{}_{} in family of G^{side}_{s}", g.side, g.code));
            }
        }
    }
    Ok(())
}

fn check_family_disjoint(
    seq: &ParamSequence,
    fam: &GapFamily,
    root: &Interval,
    result: &mut PropertyResult,
) -> Result<()> {
    let mut ivs: Vec<Interval> = fam.intervals(seq)?.into_iter().map(|(_, iv)| iv).collect();
    ivs.sort_by(|a, b| a.left.cmp(&b.left));
    for iv in &ivs {
        result.check(iv.is_subset_of(root), || format!("{iv} outside {root}"));
    }
    for w in ivs.windows(2) {
        result.check(w[0].right <= w[1].left, || format!("{} meets {}", w[0], w[1]));
    }
    Ok(())
}

fn check_outside(
    seq: &ParamSequence,
    ranks: &RankIndex,
    t: &TernaryCode,
    extra: usize,
    result: &mut PropertyResult,
) -> Result<()> {
    let m = ranks.rank_containing(t.len()).expect("t.len() >= k0");
    let (left, right) = boundary_family(seq, ranks, t, m + extra)?;
    for n in m..=m + extra {
        let len = ranks.k(n) - 1;
        for tail in TernaryCode::all(len - t.len()) {
            let s = t.concat(&tail);
            for i in 0..2u8 {
                let g = crate::gapcalc::GapRef { code: s.clone(), side: i, rank: n };
                if !left.contains(&g) && !right.contains(&g) {
                    result.check(last_index(&s, i) > t.len(), || format!("G^{i}_{s} below t = {t}"));
                }
            }
        }
    }
    Ok(())
}

fn check_cross(
    seq: &ParamSequence,
    ranks: &RankIndex,
    s: &TernaryCode,
    u: &TernaryCode,
    top: usize,
    result: &mut PropertyResult,
) -> Result<()> {
    let gather = |code: &TernaryCode, side: u8| -> Result<Vec<Interval>> {
        Ok(family(seq, ranks, code, side, top)?.intervals(seq)?.into_iter().map(|(_, iv)| iv).collect())
    };
    let (g0s, g1s) = (gather(s, 0)?, gather(s, 1)?);
    let (g0u, g1u) = (gather(u, 0)?, gather(u, 1)?);
    for (a, b) in [(&g0s, &g1u), (&g1s, &g1u), (&g0s, &g0u), (&g1s, &g0u)] {
        for x in a {
            for y in b {
                result.check(!x.intersects(y), || format!("{x} meets {y} (J_{s}, J_{u})"));
            }
        }
    }
    Ok(())
}

/// Number of distinct gaps of the slices at depths `k_1, …, k_N`.
pub fn slice_gap_counts(seq: &ParamSequence, ranks: &RankIndex, rank: usize) -> Result<Vec<usize>> {
    (1..=rank)
        .map(|n| {
            let slice = enumerate_difference(seq, ranks.k(n))?;
            let distinct: BTreeSet<_> = slice.gaps().into_iter().map(|g| (g.left, g.right)).collect();
            Ok(distinct.len())
        })
        .collect()
}
