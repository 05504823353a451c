//! Verdicts for the topological type of `C(a) − C(a)`.
//!
//! The difference set is always one of: a finite union of closed intervals, a Cantor set, or a
//! Cantorval. The criteria here are sufficient conditions, decided exactly from
//! `(prefix, period)`:
//!
//! | provenance    | criterion                                                  | verdict |
//! |---------------|------------------------------------------------------------|---------|
//! | `tw1-1`       | every `a_n ≤ 1/3`                                          | `[−1, 1]` |
//! | `tw1-2`       | only finitely many `a_n > 1/3`                             | finite union of intervals |
//! | `sannami`     | every `a_n > 1/3`                                          | Cantor set |
//! | `main-star`   | margin condition `m_n ≥ 2·Σ_{i>n} w(k_i)` for all `n`       | Cantorval |
//! | `fn-equality` | `δ_n = Δ_n = Σ_{i≥n} w(k_i)` and both branches of `m_n` equal `Σ_{i>n} w(k_i)` | Cantorval |
//!
//! where `w(k) = d_{k−1} − d_k`. Anything else is [`VerdictKind::Unknown`].

mod region;

pub use region::{
    apex, boundary_at, boundary_first_branch, boundary_second_branch, region_scan, second_branch_end, GridSpec,
    RegionScan,
};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::params::{rank_indices, tail_weight_sum, ParamSequence, RankIndex};
use crate::scalar::{int, one_third, serde_scalar, Extended, Scalar};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VerdictKind {
    FullInterval,
    FiniteUnionOfIntervals,
    CantorSet,
    Cantorval,
    Unknown,
}

/// The criterion that produced a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    /// Every ratio is at most `1/3`.
    #[serde(rename = "tw1-1")]
    AllAtMostThird,
    /// Only finitely many ratios exceed `1/3`.
    #[serde(rename = "tw1-2")]
    FinitelyManyAboveThird,
    /// Every ratio exceeds `1/3`.
    #[serde(rename = "sannami")]
    AllAboveThird,
    /// The margin condition, see [`condition_star`].
    #[serde(rename = "main-star")]
    MarginCondition,
    /// The tail-equality condition, see [`condition_fn`].
    #[serde(rename = "fn-equality")]
    TailEquality,
    #[serde(rename = "none")]
    None,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub provenance: Provenance,
    /// The condition report behind a Cantorval verdict; for `Unknown`, the failed margin report
    /// when one could be computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ConditionReport>,
}

impl Verdict {
    fn plain(kind: VerdictKind, provenance: Provenance) -> Self {
        Verdict { kind, provenance, witness: None }
    }
}

/// One rank of a condition check. `w = d_{k_n−1} − d_{k_n}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionRow {
    pub n: usize,
    /// `δ_n`.
    pub delta_min: Extended,
    /// `Δ_n`.
    pub delta_max: Extended,
    /// `δ_n − w`.
    pub left_branch: Extended,
    /// `4d_{k_n} − Δ_n`.
    pub right_branch: Extended,
    /// `m_n = min(left_branch, right_branch)`.
    pub m: Extended,
    /// `Σ_{i > n} w(k_i)`.
    #[serde(with = "serde_scalar")]
    pub tail: Scalar,
    /// `m_n − 2·tail`.
    pub margin: Extended,
}

impl ConditionRow {
    fn scaled(&self, factor: &Scalar) -> ConditionRow {
        ConditionRow {
            n: self.n,
            delta_min: self.delta_min.scale(factor),
            delta_max: self.delta_max.scale(factor),
            left_branch: self.left_branch.scale(factor),
            right_branch: self.right_branch.scale(factor),
            m: self.m.scale(factor),
            tail: &self.tail * factor,
            margin: self.margin.scale(factor),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub condition: &'static str,
    /// Ranks `1..=rows.len()`.
    pub rows: Vec<ConditionRow>,
    /// The rows past the preperiod were confirmed to scale by `ρ` per cycle, so the finite
    /// check covers every `n`.
    pub reduced: bool,
    /// Set when the scaling identity failed and only a bounded scan was performed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verified_up_to: Option<usize>,
    pub holds: bool,
}

impl ConditionReport {
    /// `margin_n` for each checked rank.
    pub fn margins(&self) -> impl Iterator<Item = &Extended> {
        self.rows.iter().map(|r| &r.margin)
    }
}

/// `(δ_n, Δ_n)`: min and max of `3d_i − d_{i−1}` over `k_{n−1} < i < k_n`, `(+∞, −∞)` if empty.
pub fn delta_bounds(seq: &ParamSequence, ranks: &RankIndex, n: usize) -> Result<(Extended, Extended)> {
    let mut lo = Extended::PosInf;
    let mut hi = Extended::NegInf;
    for i in ranks.k(n - 1) + 1..ranks.k(n) {
        let v = Extended::Finite(seq.d(i)? * int(3) - seq.d(i - 1)?);
        lo = lo.min(v.clone());
        hi = hi.max(v);
    }
    Ok((lo, hi))
}

/// `m_n = min(δ_n − (d_{k_n−1} − d_{k_n}), 4d_{k_n} − Δ_n)`.
pub fn margin_m(seq: &ParamSequence, ranks: &RankIndex, n: usize) -> Result<Extended> {
    Ok(condition_row(seq, ranks, n)?.m)
}

fn condition_row(seq: &ParamSequence, ranks: &RankIndex, n: usize) -> Result<ConditionRow> {
    let (delta_min, delta_max) = delta_bounds(seq, ranks, n)?;
    let kn = ranks.k(n);
    let w = seq.weight(kn)?;
    let left_branch = delta_min.add(&-&w);
    let right_branch = delta_max.subtracted_from(&(seq.d(kn)? * int(4)));
    let m = left_branch.clone().min(right_branch.clone());
    let tail = tail_weight_sum(seq, ranks, n + 1)?;
    let margin = m.add(&-(&tail * int(2)));
    Ok(ConditionRow {
        n,
        delta_min,
        delta_max,
        left_branch,
        right_branch,
        m,
        tail,
        margin,
    })
}

fn require_both_sides(seq: &ParamSequence) -> Result<()> {
    if !seq.is_eventually_periodic() {
        return Err(Error::NotEventuallyPeriodic);
    }
    if !seq.recurrently_above_third() {
        return Err(Error::HypothesesUnsatisfied("only finitely many a_n > 1/3".into()));
    }
    if !seq.recurrently_at_most_third() {
        return Err(Error::HypothesesUnsatisfied("only finitely many a_n <= 1/3".into()));
    }
    Ok(())
}

/// Evaluates a per-rank predicate for every `n ≥ 1`.
///
/// Ranks `1..=h+1` (with `h` the preperiod rank count) are checked directly; from `h + 2` on,
/// every quantity in a row scales by `ρ` per cycle of `c` ranks, so one cycle decides the rest.
/// The scaling is confirmed on the computed rows; if it ever fails, a bounded scan is reported
/// instead of a definitive answer.
fn check_all_ranks(
    seq: &ParamSequence,
    ranks: &RankIndex,
    condition: &'static str,
    holds_at: impl Fn(&ConditionRow) -> bool,
) -> Result<ConditionReport> {
    let rho = seq.period_factor()?;
    let c = ranks.ranks_per_cycle();
    let last = ranks.preperiod_ranks() + 1 + c;
    let rows = (1..=last)
        .map(|n| condition_row(seq, ranks, n))
        .collect::<Result<Vec<_>>>()?;
    let reduced = (ranks.preperiod_ranks() + 2..=last).try_fold(true, |ok, n| {
        let later = condition_row(seq, ranks, n + c)?;
        let mut predicted = rows[n - 1].scaled(&rho);
        predicted.n = n + c;
        Ok::<_, Error>(ok && later == predicted)
    })?;
    if reduced {
        let holds = rows.iter().all(&holds_at);
        return Ok(ConditionReport { condition, rows, reduced, verified_up_to: None, holds });
    }
    let bound = last + 8 * c;
    let rows = (1..=bound)
        .map(|n| condition_row(seq, ranks, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConditionReport {
        condition,
        rows,
        reduced: false,
        verified_up_to: Some(bound),
        holds: false,
    })
}

/// The margin condition `m_n ≥ 2·Σ_{i>n}(d_{k_i−1} − d_{k_i})` for every `n ≥ 1`.
///
/// Requires infinitely many ratios on each side of `1/3`.
pub fn condition_star(seq: &ParamSequence, ranks: &RankIndex) -> Result<ConditionReport> {
    require_both_sides(seq)?;
    check_all_ranks(seq, ranks, "main-star", |row| row.margin.is_nonnegative())
}

/// The tail-equality condition: for every `n ≥ 1`, `δ_n = Δ_n = Σ_{i≥n} w(k_i)` and
/// `δ_n − w(k_n) = 4d_{k_n} − Δ_n = Σ_{i>n} w(k_i)`.
///
/// Here `m_n` equals the tail exactly, so this never holds together with [`condition_star`].
pub fn condition_fn(seq: &ParamSequence, ranks: &RankIndex) -> Result<ConditionReport> {
    require_both_sides(seq)?;
    check_all_ranks(seq, ranks, "fn-equality", |row| {
        let tail = Extended::Finite(row.tail.clone());
        // δ_n − w(k_n) = Σ_{i>n} already forces δ_n = Σ_{i≥n}.
        row.left_branch == tail && row.right_branch == tail && row.delta_min == row.delta_max
    })
}

/// Decides the structure of `C(a) − C(a)` from the first criterion that applies.
pub fn classify(seq: &ParamSequence) -> Result<Verdict> {
    if !seq.is_eventually_periodic() {
        return Err(Error::NotEventuallyPeriodic);
    }
    if seq.all_at_most_third() {
        return Ok(Verdict::plain(VerdictKind::FullInterval, Provenance::AllAtMostThird));
    }
    if !seq.recurrently_above_third() {
        return Ok(Verdict::plain(
            VerdictKind::FiniteUnionOfIntervals,
            Provenance::FinitelyManyAboveThird,
        ));
    }
    if seq.all_above_third() {
        return Ok(Verdict::plain(VerdictKind::CantorSet, Provenance::AllAboveThird));
    }
    let unknown = |witness| Verdict { kind: VerdictKind::Unknown, provenance: Provenance::None, witness };
    if require_both_sides(seq).is_err() {
        return Ok(unknown(None));
    }
    let ranks = match rank_indices(seq, 0) {
        Ok(r) => r,
        Err(Error::NoK0) => return Ok(unknown(None)),
        Err(e) => return Err(e),
    };
    let star = condition_star(seq, &ranks)?;
    if star.holds {
        return Ok(Verdict {
            kind: VerdictKind::Cantorval,
            provenance: Provenance::MarginCondition,
            witness: Some(star),
        });
    }
    let equality = condition_fn(seq, &ranks)?;
    if equality.holds {
        return Ok(Verdict {
            kind: VerdictKind::Cantorval,
            provenance: Provenance::TailEquality,
            witness: Some(equality),
        });
    }
    Ok(unknown(Some(star)))
}

/// Lebesgue measure `2 − 2·Σ_{n≥1} 3^{n−1}(d_{k_n−1} − 3d_{k_n})` of a certified Cantorval with
/// `k0 = 0`.
///
/// Past the preperiod the summands shrink by `3^c·ρ` per cycle, so the series is summed in
/// closed form.
pub fn cantorval_measure(seq: &ParamSequence, ranks: &RankIndex) -> Result<Scalar> {
    if ranks.k0 != 0 {
        return Err(Error::FormulaNotApplicable(format!("k0 = {} (needs 0)", ranks.k0)));
    }
    let verdict = classify(seq)?;
    if verdict.kind != VerdictKind::Cantorval {
        return Err(Error::FormulaNotApplicable(format!(
            "no Cantorval certificate (verdict {:?})",
            verdict.kind
        )));
    }
    let term = |n: usize| -> Result<Scalar> {
        let kn = ranks.k(n);
        let power = Scalar::from_integer(num_traits::pow(BigInt::from(3), n - 1));
        Ok(power * (seq.d(kn - 1)? - seq.d(kn)? * int(3)))
    };
    let c = ranks.ranks_per_cycle();
    let ratio = Scalar::from_integer(num_traits::pow(BigInt::from(3), c)) * seq.period_factor()?;
    if ratio >= Scalar::one() {
        return Err(Error::DivergentRatio(crate::scalar::format_scalar(&ratio)));
    }
    let head = ranks.preperiod_ranks();
    let mut sum = Scalar::zero();
    for n in 1..=head {
        sum += term(n)?;
    }
    let mut cycle = Scalar::zero();
    for n in head + 1..=head + c {
        cycle += term(n)?;
    }
    sum += cycle / (Scalar::one() - ratio);
    Ok(int(2) - sum * int(2))
}

/// The two sides of the period-2 region system, as `lhs − rhs` for
/// `d_2 + 2d_1 − 1 ≥ 2d_2·S` and `4d_2 − 3d_1 + 1 ≥ 2d_2·S`, where `d_1 = (1 − a_1)/2`,
/// `d_2 = d_1(1 − a_2)/2` and `S = (d_1 − d_2)/(1 − d_2)`.
pub fn corollary_slacks(a1: &Scalar, a2: &Scalar) -> Result<(Scalar, Scalar)> {
    check_region_domain(a1, a2)?;
    let one = Scalar::one();
    let two = int(2);
    let d1 = (&one - a1) / &two;
    let d2 = &d1 * (&one - a2) / &two;
    let s = (&d1 - &d2) / (&one - &d2);
    let rhs = &two * &d2 * s;
    let first = &d2 + &two * &d1 - &one - &rhs;
    let second = int(4) * &d2 - int(3) * &d1 + &one - &rhs;
    Ok((first, second))
}

/// Whether the period `[a1, a2]` lies in the region where the margin condition holds, decided by
/// the exact rational system of [`corollary_slacks`].
///
/// With `a1 = p/q`, `a2 = r/s`, `A = q − p`, `B = s − r`, both inequalities are multiplied by
/// `4qs(4qs − AB) > 0`, leaving integer sign tests:
/// `(AB + 4As − 4qs)(4qs − AB) ≥ 2A²B(2s − B)` and `(4AB − 6As + 4qs)(4qs − AB) ≥ 2A²B(2s − B)`.
pub fn corollary_region(a1: &Scalar, a2: &Scalar) -> Result<bool> {
    check_region_domain(a1, a2)?;
    let (q, s) = (a1.denom(), a2.denom());
    let a = q - a1.numer();
    let b = s - a2.numer();
    let qs4 = q * s * 4u32;
    let scale = &qs4 - &a * &b;
    let rhs = &a * &a * &b * 2u32 * (s * 2u32 - &b);
    let first = (&a * &b + &a * s * 4u32 - &qs4) * &scale;
    let second = (&a * &b * 4u32 - &a * s * 6u32 + &qs4) * &scale;
    Ok(first >= rhs && second >= rhs)
}

fn check_region_domain(a1: &Scalar, a2: &Scalar) -> Result<()> {
    let third = one_third();
    if !a1.is_positive() || *a1 >= third || *a2 <= third || *a2 >= Scalar::one() {
        return Err(Error::DomainViolation(format!(
            "need 0 < a1 < 1/3 < a2 < 1, got a1 = {a1}, a2 = {a2}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::period_of;
    use crate::scalar::ratio;

    fn ranks(seq: &ParamSequence) -> RankIndex {
        rank_indices(seq, 6).unwrap()
    }

    #[test]
    fn delta_bounds_examples() {
        let apex = period_of(&[(1, 35), (7, 17)]);
        let r = ranks(&apex);
        let (lo, hi) = delta_bounds(&apex, &r, 1).unwrap();
        assert_eq!(lo, Extended::Finite(ratio(16, 35)));
        assert_eq!(hi, lo);
        let golden = period_of(&[(1, 15), (11, 21)]);
        assert_eq!(
            delta_bounds(&golden, &ranks(&golden), 1).unwrap().0,
            Extended::Finite(ratio(2, 5))
        );
        let consecutive = ParamSequence::new(vec![ratio(1, 5)], vec![ratio(1, 2)]).unwrap();
        let r = rank_indices(&consecutive, 3).unwrap();
        assert_eq!(r.k(2), r.k(1) + 1);
        assert_eq!(delta_bounds(&consecutive, &r, 2).unwrap(), (Extended::PosInf, Extended::NegInf));
        assert_eq!(margin_m(&consecutive, &r, 2).unwrap(), Extended::PosInf);
    }

    #[test]
    fn margin_examples() {
        let apex = period_of(&[(1, 35), (7, 17)]);
        assert_eq!(margin_m(&apex, &ranks(&apex), 1).unwrap(), Extended::Finite(ratio(4, 35)));
        let golden = period_of(&[(1, 15), (11, 21)]);
        assert_eq!(margin_m(&golden, &ranks(&golden), 1).unwrap(), Extended::Finite(ratio(2, 45)));
    }

    #[test]
    fn star_on_apex_is_tight() {
        let apex = period_of(&[(1, 35), (7, 17)]);
        let report = condition_star(&apex, &ranks(&apex)).unwrap();
        assert!(report.holds && report.reduced);
        assert!(report.margins().all(|m| *m == Extended::Finite(Scalar::zero())));
        assert!(!condition_fn(&apex, &ranks(&apex)).unwrap().holds);
    }

    #[test]
    fn star_fails_and_equality_holds_for_one_ninth() {
        let golden = period_of(&[(1, 15), (11, 21)]);
        let r = ranks(&golden);
        let star = condition_star(&golden, &r).unwrap();
        assert!(!star.holds);
        assert_eq!(star.rows[0].tail, ratio(2, 45));
        assert!(condition_fn(&golden, &r).unwrap().holds);
    }

    #[test]
    fn star_strict_inside_region() {
        let seq = period_of(&[(1, 50), (3, 8)]);
        let report = condition_star(&seq, &ranks(&seq)).unwrap();
        assert!(report.holds);
        assert!(report.margins().all(|m| *m > Extended::Finite(Scalar::zero())));
        let outside = period_of(&[(1, 100), (2, 5)]);
        assert!(!condition_star(&outside, &ranks(&outside)).unwrap().holds);
    }

    #[test]
    fn star_refuses_finitely_many_small_terms() {
        let seq = ParamSequence::new(vec![ratio(1, 10)], vec![ratio(1, 2)]).unwrap();
        let r = rank_indices(&seq, 3).unwrap();
        assert!(matches!(condition_star(&seq, &r), Err(Error::HypothesesUnsatisfied(_))));
        assert_eq!(classify(&seq).unwrap().kind, VerdictKind::Unknown);
    }

    #[test]
    fn classification_goldens() {
        let kind = |seq: &ParamSequence| {
            let v = classify(seq).unwrap();
            (v.kind, v.provenance)
        };
        assert_eq!(
            kind(&ParamSequence::constant(ratio(1, 3)).unwrap()),
            (VerdictKind::FullInterval, Provenance::AllAtMostThird)
        );
        assert_eq!(
            kind(&ParamSequence::constant(ratio(1, 2)).unwrap()),
            (VerdictKind::CantorSet, Provenance::AllAboveThird)
        );
        let finite = ParamSequence::new(vec![ratio(1, 2), ratio(1, 2)], vec![ratio(1, 4)]).unwrap();
        assert_eq!(kind(&finite), (VerdictKind::FiniteUnionOfIntervals, Provenance::FinitelyManyAboveThird));
        assert_eq!(
            kind(&period_of(&[(1, 35), (7, 17)])),
            (VerdictKind::Cantorval, Provenance::MarginCondition)
        );
        assert_eq!(
            kind(&period_of(&[(1, 15), (11, 21)])),
            (VerdictKind::Cantorval, Provenance::TailEquality)
        );
        assert_eq!(kind(&period_of(&[(2, 25), (13, 23)])), (VerdictKind::Unknown, Provenance::None));
        assert!(matches!(
            classify(&ParamSequence::finite(vec![ratio(1, 2)]).unwrap()),
            Err(Error::NotEventuallyPeriodic)
        ));
    }

    #[test]
    fn verdict_json_shape() {
        let v = classify(&ParamSequence::constant(ratio(1, 3)).unwrap()).unwrap();
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"kind":"FullInterval","provenance":"tw1-1"}"#
        );
    }

    #[test]
    fn measure_goldens() {
        let golden = period_of(&[(1, 15), (11, 21)]);
        assert_eq!(cantorval_measure(&golden, &ranks(&golden)).unwrap(), ratio(8, 5));
        let apex = period_of(&[(1, 35), (7, 17)]);
        assert_eq!(cantorval_measure(&apex, &ranks(&apex)).unwrap(), ratio(9, 5));
        let unknown = period_of(&[(2, 25), (13, 23)]);
        assert!(matches!(
            cantorval_measure(&unknown, &ranks(&unknown)),
            Err(Error::FormulaNotApplicable(_))
        ));
    }

    #[test]
    fn corollary_examples() {
        assert_eq!(
            corollary_slacks(&ratio(1, 35), &ratio(7, 17)).unwrap(),
            (Scalar::zero(), Scalar::zero())
        );
        assert!(corollary_region(&ratio(1, 35), &ratio(7, 17)).unwrap());
        assert!(!corollary_region(&ratio(1, 15), &ratio(11, 21)).unwrap());
        assert!(corollary_region(&ratio(1, 35), &(one_third() + ratio(1, 1000))).unwrap());
        assert!(matches!(
            corollary_region(&ratio(1, 3), &ratio(1, 2)),
            Err(Error::DomainViolation(_))
        ));
    }

    #[test]
    fn integer_and_rational_region_tests_agree() {
        for i in 1..40 {
            for j in 1..40 {
                let a1 = ratio(i, 1000);
                let a2 = one_third() + ratio(j, 400);
                let (first, second) = corollary_slacks(&a1, &a2).unwrap();
                let rational = !first.is_negative() && !second.is_negative();
                assert_eq!(corollary_region(&a1, &a2).unwrap(), rational, "({a1}, {a2})");
            }
        }
    }

    #[test]
    fn period_two_margins_scale_by_d2() {
        let seq = period_of(&[(1, 50), (3, 8)]);
        let r = ranks(&seq);
        let d2 = seq.d(2).unwrap();
        let m1 = margin_m(&seq, &r, 1).unwrap();
        for n in 1..=6 {
            let scale = num_traits::pow(d2.clone(), n - 1);
            assert_eq!(margin_m(&seq, &r, n).unwrap(), m1.scale(&scale));
        }
    }
}
