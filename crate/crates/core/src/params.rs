//! The ratio sequence `a` and the scalar streams derived from it.
//!
//! For a ratio `a_n` the construction keeps two intervals of relative length
//! `λ_n = (1 − a_n)/2`, so every interval of step `n` has length
//! `d_n = λ_1 ⋯ λ_n` with `d_0 = 1`. The weights `d_{n−1} − d_n` are the endpoint offsets
//! contributed by digit `n`.

use std::fmt;
use std::sync::RwLock;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::scalar::{one_third, ratio, serde_scalars, Scalar};
use crate::{Error, Result};

/// An eventually periodic ratio sequence `(prefix, period, period, …)` with entries in `(0,1)`.
///
/// An empty period denotes a finite sequence; only depth-bounded operations accept it.
#[derive(Serialize, Deserialize)]
#[serde(try_from = "SequenceSpec", into = "SequenceSpec")]
pub struct ParamSequence {
    prefix: Vec<Scalar>,
    period: Vec<Scalar>,
    lengths: RwLock<Vec<Scalar>>,
}

/// Wire form: `{"prefix": ["1/2"], "period": ["1/15", "11/21"]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SequenceSpec {
    #[serde(default, with = "serde_scalars")]
    pub prefix: Vec<Scalar>,
    #[serde(default, with = "serde_scalars")]
    pub period: Vec<Scalar>,
}

impl TryFrom<SequenceSpec> for ParamSequence {
    type Error = Error;

    fn try_from(spec: SequenceSpec) -> Result<Self> {
        ParamSequence::new(spec.prefix, spec.period)
    }
}

impl From<ParamSequence> for SequenceSpec {
    fn from(seq: ParamSequence) -> Self {
        SequenceSpec {
            prefix: seq.prefix,
            period: seq.period,
        }
    }
}

impl ParamSequence {
    pub fn new(prefix: Vec<Scalar>, period: Vec<Scalar>) -> Result<Self> {
        for x in prefix.iter().chain(&period) {
            if !x.is_positive() || *x >= Scalar::one() {
                return Err(Error::EntryOutOfRange(crate::scalar::format_scalar(x)));
            }
        }
        Ok(ParamSequence {
            prefix,
            period,
            lengths: RwLock::new(vec![Scalar::one()]),
        })
    }

    pub fn periodic(period: Vec<Scalar>) -> Result<Self> {
        Self::new(Vec::new(), period)
    }

    /// The constant sequence `(x, x, …)`.
    pub fn constant(x: Scalar) -> Result<Self> {
        Self::new(Vec::new(), vec![x])
    }

    pub fn finite(terms: Vec<Scalar>) -> Result<Self> {
        Self::new(terms, Vec::new())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn prefix(&self) -> &[Scalar] {
        &self.prefix
    }

    pub fn period(&self) -> &[Scalar] {
        &self.period
    }

    pub fn is_eventually_periodic(&self) -> bool {
        !self.period.is_empty()
    }

    /// Largest supported 1-based index, or `None` when unbounded.
    pub fn max_index(&self) -> Option<usize> {
        self.period.is_empty().then_some(self.prefix.len())
    }

    /// `a_n` (1-based).
    pub fn ratio(&self, n: usize) -> Result<Scalar> {
        self.ratio_ref(n).cloned()
    }

    pub(crate) fn ratio_ref(&self, n: usize) -> Result<&Scalar> {
        if n == 0 {
            return Err(Error::IndexOutOfRange { index: 0, len: self.prefix.len() });
        }
        if n <= self.prefix.len() {
            return Ok(&self.prefix[n - 1]);
        }
        if self.period.is_empty() {
            return Err(Error::IndexOutOfRange { index: n, len: self.prefix.len() });
        }
        Ok(&self.period[(n - self.prefix.len() - 1) % self.period.len()])
    }

    /// `λ_n = (1 − a_n)/2`.
    pub fn lambda(&self, n: usize) -> Result<Scalar> {
        Ok((Scalar::one() - self.ratio_ref(n)?) / Scalar::from_integer(2.into()))
    }

    /// `d_n = ∏_{i ≤ n} (1 − a_i)/2`, with `d_0 = 1`. Memoized.
    pub fn d(&self, n: usize) -> Result<Scalar> {
        {
            let cache = self.lengths.read().unwrap_or_else(|e| e.into_inner());
            if let Some(v) = cache.get(n) {
                return Ok(v.clone());
            }
        }
        if let Some(max) = self.max_index() {
            if n > max {
                return Err(Error::IndexOutOfRange { index: n, len: max });
            }
        }
        let mut cache = self.lengths.write().unwrap_or_else(|e| e.into_inner());
        while cache.len() <= n {
            let i = cache.len();
            let next = &cache[i - 1] * self.lambda(i)?;
            cache.push(next);
        }
        Ok(cache[n].clone())
    }

    /// `d_0, …, d_n` in one pass.
    pub fn lengths_upto(&self, n: usize) -> Result<Vec<Scalar>> {
        self.d(n)?;
        let cache = self.lengths.read().unwrap_or_else(|e| e.into_inner());
        Ok(cache[..=n].to_vec())
    }

    /// `d_{n−1} − d_n`, the endpoint weight of digit `n`.
    pub fn weight(&self, n: usize) -> Result<Scalar> {
        if n == 0 {
            return Err(Error::IndexOutOfRange { index: 0, len: self.prefix.len() });
        }
        Ok(self.d(n - 1)? - self.d(n)?)
    }

    /// `ρ = ∏_{period} (1 − a_j)/2`: the factor by which `d` shrinks per period.
    pub fn period_factor(&self) -> Result<Scalar> {
        if self.period.is_empty() {
            return Err(Error::NotEventuallyPeriodic);
        }
        let two = Scalar::from_integer(2.into());
        Ok(self
            .period
            .iter()
            .map(|a| (Scalar::one() - a) / &two)
            .product())
    }

    fn entries(&self) -> impl Iterator<Item = &Scalar> {
        self.prefix.iter().chain(&self.period)
    }

    /// Every term satisfies `a_n ≤ 1/3`.
    pub fn all_at_most_third(&self) -> bool {
        let third = one_third();
        self.entries().all(|a| *a <= third)
    }

    /// Every term satisfies `a_n > 1/3`.
    pub fn all_above_third(&self) -> bool {
        let third = one_third();
        self.entries().all(|a| *a > third)
    }

    /// Infinitely many terms exceed `1/3`.
    pub fn recurrently_above_third(&self) -> bool {
        let third = one_third();
        self.period.iter().any(|a| *a > third)
    }

    /// Infinitely many terms are at most `1/3`.
    pub fn recurrently_at_most_third(&self) -> bool {
        let third = one_third();
        self.period.iter().any(|a| *a <= third)
    }
}

impl Clone for ParamSequence {
    fn clone(&self) -> Self {
        let lengths = self.lengths.read().unwrap_or_else(|e| e.into_inner()).clone();
        ParamSequence {
            prefix: self.prefix.clone(),
            period: self.period.clone(),
            lengths: RwLock::new(lengths),
        }
    }
}

impl PartialEq for ParamSequence {
    fn eq(&self, other: &Self) -> bool {
        self.prefix == other.prefix && self.period == other.period
    }
}

impl fmt::Debug for ParamSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParamSequence")
            .field("prefix", &self.prefix.iter().map(ToString::to_string).collect::<Vec<_>>())
            .field("period", &self.period.iter().map(ToString::to_string).collect::<Vec<_>>())
            .finish()
    }
}

impl fmt::Display for ParamSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[Scalar]| xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
        write!(f, "[{}]({})", join(&self.prefix), join(&self.period))
    }
}

/// The rank indices: `k0` with `a_{k0+1} < 1/3`, then every later index `k_n` with `a_{k_n} > 1/3`.
///
/// Past the preperiod the ranks repeat with the period: `k_{n+c} = k_n + L` where `c` is the
/// number of period entries above `1/3` and `L` the period length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankIndex {
    pub k0: usize,
    /// The first `count` rank indices `k_1, k_2, …` as requested.
    pub ks: Vec<usize>,
    head: Vec<usize>,
    base: usize,
    period_len: usize,
    offsets: Vec<usize>,
}

impl RankIndex {
    /// `k_n` for any `n ≥ 0` (`k_0` is the anchor index).
    pub fn k(&self, n: usize) -> usize {
        if n == 0 {
            return self.k0;
        }
        if n <= self.head.len() {
            return self.head[n - 1];
        }
        let idx = n - self.head.len() - 1;
        let c = self.offsets.len();
        self.base + (idx / c) * self.period_len + self.offsets[idx % c]
    }

    /// Number of ranks per period (`c`).
    pub fn ranks_per_cycle(&self) -> usize {
        self.offsets.len()
    }

    /// Ranks before the periodic regime starts; for `n > preperiod_ranks()`, `k_{n+c} = k_n + L`.
    pub fn preperiod_ranks(&self) -> usize {
        self.head.len()
    }

    pub fn period_len(&self) -> usize {
        self.period_len
    }

    /// The unique `m ≥ 1` with `k_{m−1} ≤ len < k_m`, or `None` when `len < k0`.
    pub fn rank_containing(&self, len: usize) -> Option<usize> {
        if len < self.k0 {
            return None;
        }
        let mut m = 1;
        while self.k(m) <= len {
            m += 1;
        }
        Some(m)
    }

    /// The rank `m` with `k_m − 1 = len`, if any.
    pub fn rank_of_code_length(&self, len: usize) -> Option<usize> {
        let m = self.rank_containing(len + 1)?;
        (m > 1 && self.k(m - 1) == len + 1).then(|| m - 1)
    }
}

/// Computes `k0` (minimal) and the first `count` ranks.
pub fn rank_indices(seq: &ParamSequence, count: usize) -> Result<RankIndex> {
    if !seq.is_eventually_periodic() {
        return Err(Error::NotEventuallyPeriodic);
    }
    if !seq.recurrently_above_third() {
        return Err(Error::NoIndexAboveOneThird);
    }
    let third = one_third();
    let p = seq.prefix().len();
    let l = seq.period().len();
    let k0 = (0..p + l)
        .find(|&k| seq.ratio_ref(k + 1).map(|a| *a < third).unwrap_or(false))
        .ok_or(Error::NoK0)?;
    let base = k0.max(p);
    let head: Vec<usize> = (k0 + 1..=p)
        .filter(|&j| seq.ratio_ref(j).map(|a| *a > third).unwrap_or(false))
        .collect();
    let offsets: Vec<usize> = (1..=l)
        .filter(|&off| seq.ratio_ref(base + off).map(|a| *a > third).unwrap_or(false))
        .collect();
    let mut ranks = RankIndex {
        k0,
        ks: Vec::new(),
        head,
        base,
        period_len: l,
        offsets,
    };
    ranks.ks = (1..=count).map(|n| ranks.k(n)).collect();
    Ok(ranks)
}

/// `Σ_{i ≥ start} (d_{k_i − 1} − d_{k_i})` in closed form (`start ≥ 1`).
///
/// Past the preperiod the summand shrinks by `ρ` every `c` ranks, so the tail is a finite
/// sum plus one period's worth of terms divided by `1 − ρ`.
pub fn tail_weight_sum(seq: &ParamSequence, ranks: &RankIndex, start: usize) -> Result<Scalar> {
    if start == 0 {
        return Err(Error::PreconditionViolated("tail sums start at rank 1".into()));
    }
    let rho = seq.period_factor()?;
    let first_periodic = start.max(ranks.preperiod_ranks() + 1);
    let mut finite = Scalar::zero();
    for i in start..first_periodic {
        finite += seq.weight(ranks.k(i))?;
    }
    let mut cycle = Scalar::zero();
    for i in first_periodic..first_periodic + ranks.ranks_per_cycle() {
        cycle += seq.weight(ranks.k(i))?;
    }
    Ok(finite + cycle / (Scalar::one() - rho))
}

/// `Σ_{i=from}^{to} (d_{k_i − 1} − d_{k_i})`; zero when `from > to`.
pub fn partial_weight_sum(
    seq: &ParamSequence,
    ranks: &RankIndex,
    from: usize,
    to: usize,
) -> Result<Scalar> {
    let mut total = Scalar::zero();
    for i in from..=to {
        total += seq.weight(ranks.k(i))?;
    }
    Ok(total)
}

/// Convenience constructor for literal sequences in tests and docs: `period_of(&[(1, 15), (11, 21)])`.
pub fn period_of(entries: &[(i64, i64)]) -> ParamSequence {
    ParamSequence::periodic(entries.iter().map(|&(p, q)| ratio(p, q)).collect())
        .expect("entries must lie in (0,1)")
}
