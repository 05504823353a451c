//! Index codes, exact intervals and the interval calculus of `I_t` and `J_s`.
//!
//! `I_t` (for `t ∈ {0,1}ⁿ`) is a construction interval of `C_n(a)`. `J_s` (for
//! `s ∈ {0,1,2}ⁿ`) is the difference `I_t − I_p` with `s_i = t_i − p_i + 1`, so
//! `C_n(a) − C_n(a)` is the union of all `J_s` of length `n`.
//!
//! Endpoints come from the closed forms
//!
//! ```text
//! l(I_t) = Σ t_i (d_{i−1} − d_i),          |I_t| = d_n
//! l(J_s) = −1 + Σ s_i (d_{i−1} − d_i),     |J_s| = 2 d_n
//! ```
//!
//! The recursive child formulas are implemented separately in [`children`] and only used to
//! cross-check the closed forms.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::params::ParamSequence;
use crate::scalar::{int, one_third, serde_scalar, Scalar};
use crate::{Error, Result};

macro_rules! digit_code {
    ($name:ident, $radix:expr, $what:literal) => {
        #[doc = concat!("A finite word over ", $what, ".")]
        #[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(Vec<u8>);

        impl $name {
            pub fn new(digits: Vec<u8>) -> Result<Self> {
                if let Some(d) = digits.iter().find(|&&d| d >= $radix) {
                    return Err(Error::Parse(format!("digit {d} not allowed in {}", stringify!($name))));
                }
                Ok(Self(digits))
            }

            pub fn empty() -> Self {
                Self(Vec::new())
            }

            /// `digit^(count)`.
            pub fn repeat(digit: u8, count: usize) -> Self {
                assert!(digit < $radix);
                Self(vec![digit; count])
            }

            pub fn digits(&self) -> &[u8] {
                &self.0
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            /// `self ^ digit`.
            pub fn child(&self, digit: u8) -> Self {
                assert!(digit < $radix);
                let mut digits = self.0.clone();
                digits.push(digit);
                Self(digits)
            }

            /// `self ^ other`.
            pub fn concat(&self, other: &Self) -> Self {
                let mut digits = self.0.clone();
                digits.extend_from_slice(&other.0);
                Self(digits)
            }

            /// `self ^ digit^(count)`.
            pub fn padded(&self, digit: u8, count: usize) -> Self {
                assert!(digit < $radix);
                let mut digits = self.0.clone();
                digits.extend(std::iter::repeat(digit).take(count));
                Self(digits)
            }

            /// `self | n`.
            pub fn restrict(&self, n: usize) -> Self {
                Self(self.0[..n.min(self.0.len())].to_vec())
            }

            /// `self ≺ other`: `other` extends `self`.
            pub fn is_prefix_of(&self, other: &Self) -> bool {
                other.0.starts_with(&self.0)
            }

            /// All words of length `n` in lexicographic order.
            pub fn all(n: usize) -> impl Iterator<Item = Self> {
                let total = ($radix as usize).pow(n as u32);
                (0..total).map(move |mut index| {
                    let mut digits = vec![0u8; n];
                    for slot in digits.iter_mut().rev() {
                        *slot = (index % $radix as usize) as u8;
                        index /= $radix as usize;
                    }
                    Self(digits)
                })
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                if self.0.is_empty() {
                    return f.write_str("∅");
                }
                for d in &self.0 {
                    write!(f, "{d}")?;
                }
                Ok(())
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(text: &str) -> Result<Self> {
                let text = text.trim();
                if text.is_empty() || text == "∅" {
                    return Ok(Self::empty());
                }
                let digits = text
                    .chars()
                    .map(|c| c.to_digit(10).map(|d| d as u8))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| Error::Parse(format!("not a digit string: {text:?}")))?;
                Self::new(digits)
            }
        }

        impl Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_str(&self.0.iter().map(|d| char::from(b'0' + d)).collect::<String>())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let text = String::deserialize(d)?;
                text.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

digit_code!(BinaryCode, 2u8, "{0,1}, addressing the construction intervals `I_t`");
digit_code!(TernaryCode, 3u8, "{0,1,2}, addressing the difference intervals `J_s`");

impl TernaryCode {
    /// Digit map `s_i ↦ 2 − s_i`, which mirrors `J_s` through the origin.
    pub fn mirrored(&self) -> Self {
        Self(self.0.iter().map(|d| 2 - d).collect())
    }

    /// `s_j` with 1-based `j`.
    pub fn at(&self, j: usize) -> u8 {
        self.0[j - 1]
    }
}

impl BinaryCode {
    /// Digit map `t_i ↦ 1 − t_i`, which mirrors `I_t` through `1/2`.
    pub fn complement(&self) -> Self {
        Self(self.0.iter().map(|d| 1 - d).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntervalKind {
    Closed,
    Open,
}

/// An interval with exact endpoints. Closed intervals may be degenerate; open ones may not.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    #[serde(rename = "l", with = "serde_scalar")]
    pub left: Scalar,
    #[serde(rename = "r", with = "serde_scalar")]
    pub right: Scalar,
    pub kind: IntervalKind,
}

impl Interval {
    pub fn closed(left: Scalar, right: Scalar) -> Self {
        assert!(left <= right, "closed interval needs left <= right");
        Interval { left, right, kind: IntervalKind::Closed }
    }

    pub fn open(left: Scalar, right: Scalar) -> Self {
        assert!(left < right, "open interval needs left < right");
        Interval { left, right, kind: IntervalKind::Open }
    }

    pub fn length(&self) -> Scalar {
        &self.right - &self.left
    }

    pub fn center(&self) -> Scalar {
        (&self.left + &self.right) / int(2)
    }

    pub fn is_closed(&self) -> bool {
        self.kind == IntervalKind::Closed
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        match self.kind {
            IntervalKind::Closed => self.left <= *x && *x <= self.right,
            IntervalKind::Open => self.left < *x && *x < self.right,
        }
    }

    /// Set inclusion `self ⊆ other`, respecting open/closed endpoints.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        match (self.kind, other.kind) {
            (_, IntervalKind::Closed) => other.left <= self.left && self.right <= other.right,
            (IntervalKind::Open, IntervalKind::Open) => {
                other.left <= self.left && self.right <= other.right
            }
            (IntervalKind::Closed, IntervalKind::Open) => {
                other.left < self.left && self.right < other.right
            }
        }
    }

    /// Whether the two sets share a point.
    pub fn intersects(&self, other: &Interval) -> bool {
        let both_closed = self.is_closed() && other.is_closed();
        let (lo, hi) = (
            (&self.left).max(&other.left),
            (&self.right).min(&other.right),
        );
        if both_closed {
            lo <= hi
        } else {
            lo < hi
        }
    }

    pub fn translate(&self, by: &Scalar) -> Interval {
        Interval { left: &self.left + by, right: &self.right + by, kind: self.kind }
    }

    pub fn scale(&self, factor: &Scalar) -> Interval {
        assert!(factor.is_positive());
        Interval { left: &self.left * factor, right: &self.right * factor, kind: self.kind }
    }

    pub fn negate(&self) -> Interval {
        Interval { left: -&self.right, right: -&self.left, kind: self.kind }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            IntervalKind::Closed => write!(f, "[{}, {}]", self.left, self.right),
            IntervalKind::Open => write!(f, "({}, {})", self.left, self.right),
        }
    }
}

/// A finite union of closed intervals in canonical form: sorted, pairwise disjoint and
/// separated by strictly positive gaps. Touching intervals are merged on construction.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IntervalUnion {
    parts: Vec<Interval>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion { parts: Vec::new() }
    }

    /// Merges arbitrary closed intervals (given as endpoint pairs) into canonical form.
    pub fn from_pairs<I: IntoIterator<Item = (Scalar, Scalar)>>(pairs: I) -> Self {
        let mut pairs: Vec<(Scalar, Scalar)> = pairs.into_iter().collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)));
        Self::from_sorted_pairs(pairs)
    }

    /// As [`from_pairs`](Self::from_pairs) for input already sorted by left endpoint.
    pub fn from_sorted_pairs<I: IntoIterator<Item = (Scalar, Scalar)>>(pairs: I) -> Self {
        let mut merged: Vec<(Scalar, Scalar)> = Vec::new();
        for (l, r) in pairs {
            debug_assert!(l <= r);
            match merged.last_mut() {
                Some(last) if l <= last.1 => {
                    if r > last.1 {
                        last.1 = r;
                    }
                }
                _ => merged.push((l, r)),
            }
        }
        IntervalUnion {
            parts: merged.into_iter().map(|(l, r)| Interval::closed(l, r)).collect(),
        }
    }

    pub fn from_intervals<'a, I: IntoIterator<Item = &'a Interval>>(intervals: I) -> Self {
        Self::from_pairs(intervals.into_iter().map(|iv| {
            debug_assert!(iv.is_closed());
            (iv.left.clone(), iv.right.clone())
        }))
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Lebesgue measure.
    pub fn measure(&self) -> Scalar {
        self.parts.iter().map(Interval::length).sum()
    }

    /// The bounded components of the complement, as open intervals.
    pub fn gaps(&self) -> Vec<Interval> {
        self.parts
            .windows(2)
            .map(|w| Interval::open(w[0].right.clone(), w[1].left.clone()))
            .collect()
    }

    fn part_index_at(&self, x: &Scalar) -> Option<usize> {
        let idx = self.parts.partition_point(|p| p.right < *x);
        (idx < self.parts.len() && self.parts[idx].left <= *x).then_some(idx)
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        self.part_index_at(x).is_some()
    }

    /// The component containing `x`, if any.
    pub fn component_at(&self, x: &Scalar) -> Option<&Interval> {
        self.part_index_at(x).map(|i| &self.parts[i])
    }

    /// Whether a closed or open interval lies inside the union.
    pub fn covers(&self, iv: &Interval) -> bool {
        match iv.kind {
            IntervalKind::Closed => self
                .component_at(&iv.left)
                .is_some_and(|p| iv.right <= p.right),
            IntervalKind::Open => {
                let probe = iv.center();
                self.component_at(&probe)
                    .is_some_and(|p| p.left <= iv.left && iv.right <= p.right)
            }
        }
    }

    pub fn is_subset_of(&self, other: &IntervalUnion) -> bool {
        self.parts.iter().all(|p| other.covers(p))
    }

    /// Pieces of `self` not covered by `other`. A piece is reported open when both of its
    /// endpoints are covered, otherwise by its closure.
    pub fn uncovered_by(&self, other: &IntervalUnion) -> Vec<Interval> {
        let mut missing = Vec::new();
        for part in &self.parts {
            let mut cursor = part.left.clone();
            let mut cursor_uncovered = true;
            let start = other.parts.partition_point(|p| p.right < part.left);
            for cover in other.parts[start..].iter().take_while(|c| c.left <= part.right) {
                if cover.left > cursor {
                    missing.push(Interval {
                        left: cursor.clone(),
                        right: cover.left.clone(),
                        kind: if cursor_uncovered { IntervalKind::Closed } else { IntervalKind::Open },
                    });
                }
                if cover.right >= cursor {
                    cursor = cover.right.clone();
                    cursor_uncovered = false;
                }
            }
            if cursor < part.right || (cursor == part.right && cursor_uncovered) {
                missing.push(Interval::closed(cursor, part.right.clone()));
            }
        }
        missing
    }

    /// `self \ ⋃ holes` for open `holes`. Points shared by two adjacent holes survive.
    pub fn minus_open(&self, holes: &[Interval]) -> IntervalUnion {
        let mut holes: Vec<&Interval> = holes.iter().collect();
        holes.sort_by(|a, b| a.left.cmp(&b.left));
        let mut pieces = Vec::new();
        for part in &self.parts {
            let mut cursor = part.left.clone();
            let mut alive = true;
            for hole in holes.iter().filter(|h| h.left < part.right && h.right > part.left) {
                debug_assert_eq!(hole.kind, IntervalKind::Open);
                if hole.left >= cursor {
                    pieces.push((cursor.clone(), hole.left.clone()));
                }
                if hole.right > cursor {
                    cursor = hole.right.clone();
                }
                if cursor > part.right {
                    alive = false;
                    break;
                }
            }
            if alive && cursor <= part.right {
                pieces.push((cursor, part.right.clone()));
            }
        }
        IntervalUnion::from_pairs(pieces)
    }

    pub fn translate(&self, by: &Scalar) -> IntervalUnion {
        IntervalUnion { parts: self.parts.iter().map(|p| p.translate(by)).collect() }
    }

    pub fn scale(&self, factor: &Scalar) -> IntervalUnion {
        IntervalUnion { parts: self.parts.iter().map(|p| p.scale(factor)).collect() }
    }

    pub fn negate(&self) -> IntervalUnion {
        IntervalUnion { parts: self.parts.iter().rev().map(Interval::negate).collect() }
    }

    /// Reflection `x ↦ c − x`.
    pub fn reflect(&self, c: &Scalar) -> IntervalUnion {
        self.negate().translate(c)
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("∅");
        }
        let text: Vec<String> = self.parts.iter().map(ToString::to_string).collect();
        f.write_str(&text.join(" ∪ "))
    }
}

/// `Σ digit_i · (d_{i−1} − d_i)` over the given digits.
fn weighted_offset(seq: &ParamSequence, digits: &[u8]) -> Result<Scalar> {
    if digits.is_empty() {
        return Ok(Scalar::zero());
    }
    let lengths = seq.lengths_upto(digits.len())?;
    Ok(digits
        .iter()
        .enumerate()
        .filter(|(_, &d)| d != 0)
        .map(|(i, &d)| (&lengths[i] - &lengths[i + 1]) * int(d as i64))
        .sum())
}

/// `I_t`: closed, of length `d_{|t|}`, with `I_∅ = [0,1]`.
pub fn interval_i(seq: &ParamSequence, t: &BinaryCode) -> Result<Interval> {
    let left = weighted_offset(seq, t.digits())?;
    let right = &left + seq.d(t.len())?;
    Ok(Interval::closed(left, right))
}

/// `J_s`: closed, of length `2 d_{|s|}`, with `J_∅ = [−1,1]`.
pub fn interval_j(seq: &ParamSequence, s: &TernaryCode) -> Result<Interval> {
    let left = weighted_offset(seq, s.digits())? - Scalar::one();
    let right = &left + seq.d(s.len())? * int(2);
    Ok(Interval::closed(left, right))
}

/// `(J_{s^0}, J_{s^1}, J_{s^2})` from the parent by the child recursion:
/// left-aligned, centred and right-aligned copies of length `2 d_{n+1}`.
pub fn children(seq: &ParamSequence, s: &TernaryCode) -> Result<(Interval, Interval, Interval)> {
    let parent = interval_j(seq, s)?;
    Ok(children_of(&parent, &seq.d(s.len() + 1)?))
}

pub(crate) fn children_of(parent: &Interval, child_half: &Scalar) -> (Interval, Interval, Interval) {
    let twice = child_half * int(2);
    let c = parent.center();
    (
        Interval::closed(parent.left.clone(), &parent.left + &twice),
        Interval::closed(&c - child_half, &c + child_half),
        Interval::closed(&parent.right - &twice, parent.right.clone()),
    )
}

/// The gap `G_s^side`: open, of width `d_n − 3 d_{n+1}`. Requires `a_{n+1} > 1/3`.
pub fn gap(seq: &ParamSequence, s: &TernaryCode, side: u8) -> Result<Interval> {
    assert!(side < 2, "gap side must be 0 or 1");
    if *seq.ratio_ref(s.len() + 1)? <= one_third() {
        return Err(Error::NotAGap { depth: s.len() });
    }
    let (c0, c1, c2) = children(seq, s)?;
    Ok(match side {
        0 => Interval::open(c0.right, c1.left),
        _ => Interval::open(c1.right, c2.left),
    })
}

/// The overlap `Z_s^side`: closed, of width `3 d_{n+1} − d_n`. Requires `a_{n+1} ≤ 1/3`.
///
/// At `a_{n+1} = 1/3` the overlap is a single point.
pub fn overlap(seq: &ParamSequence, s: &TernaryCode, side: u8) -> Result<Interval> {
    assert!(side < 2, "overlap side must be 0 or 1");
    if *seq.ratio_ref(s.len() + 1)? > one_third() {
        return Err(Error::NotAnOverlap { depth: s.len() });
    }
    let (c0, c1, c2) = children(seq, s)?;
    Ok(match side {
        0 => Interval::closed(c1.left, c0.right),
        _ => Interval::closed(c2.left, c1.right),
    })
}

/// `C_n(a) − C_n(a)` built by recursive subdivision through [`children`] (independent of the
/// closed-form endpoints). Sized for small `n`; see [`crate::oracle`] for deep enumeration.
pub fn difference_approximant(seq: &ParamSequence, n: usize) -> Result<IntervalUnion> {
    let mut level = vec![Interval::closed(-Scalar::one(), Scalar::one())];
    for depth in 1..=n {
        let half = seq.d(depth)?;
        let mut next = Vec::with_capacity(level.len() * 3);
        for parent in &level {
            let (a, b, c) = children_of(parent, &half);
            next.extend([a, b, c]);
        }
        // Merge identical children early; they are common once overlaps appear.
        next.sort_by(|a, b| a.left.cmp(&b.left));
        next.dedup();
        level = next;
    }
    Ok(IntervalUnion::from_intervals(&level))
}

/// `C_n(a)` as the union of the `2ⁿ` intervals `I_t`.
pub fn cantor_approximant(seq: &ParamSequence, n: usize) -> Result<IntervalUnion> {
    let len = seq.d(n)?;
    let mut lefts = vec![Scalar::zero()];
    for i in 1..=n {
        let w = seq.weight(i)?;
        lefts = lefts.iter().flat_map(|l| [l.clone(), l + &w]).collect();
    }
    Ok(IntervalUnion::from_pairs(lefts.into_iter().map(|l| {
        let r = &l + &len;
        (l, r)
    })))
}

/// `C_n(a) + C_n(a)` as the union of all `I_t + I_p`.
pub fn sumset_approximant(seq: &ParamSequence, n: usize) -> Result<IntervalUnion> {
    let cn = cantor_approximant_intervals(seq, n)?;
    let mut pairs = Vec::with_capacity(cn.len() * cn.len());
    for a in &cn {
        for b in &cn {
            pairs.push((&a.left + &b.left, &a.right + &b.right));
        }
    }
    Ok(IntervalUnion::from_pairs(pairs))
}

fn cantor_approximant_intervals(seq: &ParamSequence, n: usize) -> Result<Vec<Interval>> {
    BinaryCode::all(n).map(|t| interval_i(seq, &t)).collect()
}

/// Checks that refining from depth `n` to `n + k` leaves the approximant unchanged when the
/// intermediate ratios are all `≤ 1/3`.
pub fn refine_invariance_check(seq: &ParamSequence, n: usize, k: usize) -> Result<bool> {
    let third = one_third();
    for j in n + 1..=n + k {
        if *seq.ratio_ref(j)? > third {
            return Err(Error::PreconditionViolated(format!("a_{j} > 1/3")));
        }
    }
    Ok(difference_approximant(seq, n)? == difference_approximant(seq, n + k)?)
}

/// Orders intervals by left endpoint, then right.
pub fn by_position(a: &Interval, b: &Interval) -> Ordering {
    a.left.cmp(&b.left).then_with(|| a.right.cmp(&b.right))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::period_of;
    use crate::scalar::ratio;

    fn half() -> ParamSequence {
        ParamSequence::constant(ratio(1, 2)).unwrap()
    }

    fn code(s: &str) -> TernaryCode {
        s.parse().unwrap()
    }

    fn closed(l: Scalar, r: Scalar) -> Interval {
        Interval::closed(l, r)
    }

    #[test]
    fn codes_parse_and_print() {
        assert_eq!(code("0211").digits(), &[0, 2, 1, 1]);
        assert_eq!(code("0211").to_string(), "0211");
        assert!("013".parse::<BinaryCode>().is_err());
        assert!("3".parse::<TernaryCode>().is_err());
        assert_eq!(TernaryCode::all(2).count(), 9);
        assert_eq!(code("021").mirrored(), code("201"));
    }

    #[test]
    fn construction_intervals() {
        let seq = half();
        assert_eq!(interval_i(&seq, &BinaryCode::empty()).unwrap(), closed(ratio(0, 1), ratio(1, 1)));
        assert_eq!(interval_i(&seq, &"1".parse().unwrap()).unwrap(), closed(ratio(3, 4), ratio(1, 1)));
        assert_eq!(interval_i(&seq, &"01".parse().unwrap()).unwrap(), closed(ratio(3, 16), ratio(4, 16)));
    }

    #[test]
    fn difference_intervals() {
        let seq = half();
        assert_eq!(interval_j(&seq, &TernaryCode::empty()).unwrap(), closed(ratio(-1, 1), ratio(1, 1)));
        assert_eq!(interval_j(&seq, &code("1")).unwrap(), closed(ratio(-1, 4), ratio(1, 4)));
        assert_eq!(interval_j(&seq, &code("20")).unwrap(), closed(ratio(1, 2), ratio(5, 8)));
    }

    #[test]
    fn children_examples() {
        let (a, b, c) = children(&half(), &TernaryCode::empty()).unwrap();
        assert_eq!(a, closed(ratio(-1, 1), ratio(-1, 2)));
        assert_eq!(b, closed(ratio(-1, 4), ratio(1, 4)));
        assert_eq!(c, closed(ratio(1, 2), ratio(1, 1)));
        let seq = period_of(&[(1, 15), (11, 21)]);
        let (_, mid, _) = children(&seq, &code("1")).unwrap();
        assert_eq!(mid, closed(ratio(-1, 9), ratio(1, 9)));
    }

    #[test]
    fn gaps_and_overlaps() {
        let g = gap(&half(), &TernaryCode::empty(), 0).unwrap();
        assert_eq!(g, Interval::open(ratio(-1, 2), ratio(-1, 4)));
        let seq = period_of(&[(1, 15), (11, 21)]);
        let g = gap(&seq, &code("1"), 1).unwrap();
        assert_eq!(g, Interval::open(ratio(1, 9), ratio(11, 45)));
        assert_eq!(g.length(), ratio(2, 15));
        assert_eq!(gap(&seq, &TernaryCode::empty(), 0), Err(Error::NotAGap { depth: 0 }));

        let third = ParamSequence::constant(one_third()).unwrap();
        let z = overlap(&third, &TernaryCode::empty(), 0).unwrap();
        assert_eq!(z.length(), Scalar::zero());
        let fifth = ParamSequence::constant(ratio(1, 5)).unwrap();
        let z0 = overlap(&fifth, &TernaryCode::empty(), 0).unwrap();
        let z1 = overlap(&fifth, &TernaryCode::empty(), 1).unwrap();
        assert_eq!(z0.length(), ratio(1, 5));
        assert_eq!(z1.length(), ratio(1, 5));
        assert_eq!(overlap(&half(), &TernaryCode::empty(), 0), Err(Error::NotAnOverlap { depth: 0 }));
    }

    #[test]
    fn refinement_invariance() {
        let third = ParamSequence::constant(one_third()).unwrap();
        assert!(refine_invariance_check(&third, 1, 2).unwrap());
        let seq = period_of(&[(1, 15), (11, 21)]);
        assert!(refine_invariance_check(&seq, 2, 1).unwrap());
        assert!(matches!(
            refine_invariance_check(&half(), 1, 1),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn union_merges_touching_parts() {
        let u = IntervalUnion::from_pairs([
            (ratio(1, 2), ratio(1, 1)),
            (ratio(0, 1), ratio(1, 2)),
            (ratio(2, 1), ratio(3, 1)),
        ]);
        assert_eq!(u.len(), 2);
        assert_eq!(u.measure(), ratio(2, 1));
        assert_eq!(u.gaps(), vec![Interval::open(ratio(1, 1), ratio(2, 1))]);
        assert!(u.contains(&ratio(1, 1)) && !u.contains(&ratio(3, 2)));
    }

    #[test]
    fn minus_open_keeps_shared_endpoint() {
        let u = IntervalUnion::from_pairs([(ratio(0, 1), ratio(4, 1))]);
        let holes = [Interval::open(ratio(1, 1), ratio(2, 1)), Interval::open(ratio(2, 1), ratio(3, 1))];
        let rest = u.minus_open(&holes);
        assert_eq!(rest.parts().len(), 3);
        assert_eq!(rest.parts()[1], closed(ratio(2, 1), ratio(2, 1)));
        assert_eq!(rest.measure(), ratio(2, 1));
    }

    #[test]
    fn uncovered_reports_holes() {
        let u = IntervalUnion::from_pairs([(ratio(0, 1), ratio(4, 1))]);
        let cover = IntervalUnion::from_pairs([(ratio(0, 1), ratio(1, 1)), (ratio(2, 1), ratio(4, 1))]);
        let missing = u.uncovered_by(&cover);
        assert_eq!(missing, vec![Interval::open(ratio(1, 1), ratio(2, 1))]);
        assert!(cover.is_subset_of(&u));
        assert!(!u.is_subset_of(&cover));
        assert!(u.uncovered_by(&u).is_empty());
    }
}
