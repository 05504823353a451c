//! Achievement sets of fast convergent series and their central Cantor set form.
//!
//! The achievement set `E(x)` of a positive series is the set of all its subsums. When every
//! term exceeds the sum of all later terms (`x_n > r_n`), `E(x) = r_0·C(a)` with
//! `λ_n = r_n / r_{n−1}` and `a_n = 1 − 2λ_n`; conversely `C(a) = E(x)` for
//! `x_n = d_{n−1} − d_n`.
//!
//! Infinite series are represented as multigeometric sequences `(x_1, …, x_L; q)`: the block
//! repeated and scaled by `q, q², …`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::classify::{classify, Verdict};
use crate::geometry::IntervalUnion;
use crate::params::ParamSequence;
use crate::scalar::{format_scalar, int, ratio, serde_scalar, serde_scalars, Scalar};
use crate::{Error, Result};

/// `(block; q)` with a nonincreasing term sequence `block, q·block, q²·block, …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MultigeometricSpec", into = "MultigeometricSpec")]
pub struct Multigeometric {
    block: Vec<Scalar>,
    q: Scalar,
}

/// Wire form: `{"block": ["3", "2"], "q": "1/9"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultigeometricSpec {
    #[serde(with = "serde_scalars")]
    pub block: Vec<Scalar>,
    #[serde(with = "serde_scalar")]
    pub q: Scalar,
}

impl TryFrom<MultigeometricSpec> for Multigeometric {
    type Error = Error;

    fn try_from(spec: MultigeometricSpec) -> Result<Self> {
        Multigeometric::new(spec.block, spec.q)
    }
}

impl From<Multigeometric> for MultigeometricSpec {
    fn from(mg: Multigeometric) -> Self {
        MultigeometricSpec { block: mg.block, q: mg.q }
    }
}

impl Multigeometric {
    pub fn new(block: Vec<Scalar>, q: Scalar) -> Result<Self> {
        let invalid = |why: String| Err(Error::InvalidMultigeometric(why));
        if block.is_empty() {
            return invalid("empty block".into());
        }
        if !q.is_positive() || q >= Scalar::one() {
            return invalid(format!("q = {} outside (0, 1)", format_scalar(&q)));
        }
        if let Some(x) = block.iter().find(|x| !x.is_positive()) {
            return invalid(format!("nonpositive term {}", format_scalar(x)));
        }
        if block.windows(2).any(|w| w[1] > w[0]) {
            return invalid("block is not nonincreasing".into());
        }
        if block[block.len() - 1] < &block[0] * &q {
            return invalid("terms increase across the block boundary".into());
        }
        Ok(Multigeometric { block, q })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn block(&self) -> &[Scalar] {
        &self.block
    }

    pub fn q(&self) -> &Scalar {
        &self.q
    }

    /// `x_n` for `n ≥ 1`.
    pub fn term(&self, n: usize) -> Scalar {
        assert!(n >= 1, "terms are indexed from 1");
        let len = self.block.len();
        &self.block[(n - 1) % len] * num_traits::pow(self.q.clone(), (n - 1) / len)
    }

    /// `r_n = Σ_{j > n} x_j` in closed form; `r_0` is the sum of the series.
    pub fn remainder(&self, n: usize) -> Scalar {
        let len = self.block.len();
        let (cycles, p) = (n / len, n % len);
        let total: Scalar = self.block.iter().sum();
        let rest: Scalar = self.block[p..].iter().sum();
        let later_blocks = &self.q * total / (Scalar::one() - &self.q);
        num_traits::pow(self.q.clone(), cycles) * (rest + later_blocks)
    }

    /// `x_n > r_n` for every `n`. Remainders scale by `q` per block along with the terms, so the
    /// first block decides it.
    pub fn is_fast_convergent(&self) -> bool {
        (1..=self.block.len()).all(|n| self.term(n) > self.remainder(n))
    }
}

/// `(r_0, a)` with `E(x) = r_0·C(a)`. The returned period is the shortest that repeats.
pub fn series_to_cantor(mg: &Multigeometric) -> Result<(Scalar, ParamSequence)> {
    if !mg.is_fast_convergent() {
        return Err(Error::NotFastConvergent);
    }
    let len = mg.block().len();
    let ratios: Vec<Scalar> = (1..=len)
        .map(|n| Scalar::one() - int(2) * mg.remainder(n) / mg.remainder(n - 1))
        .collect();
    let period = (1..=len)
        .filter(|p| len % p == 0)
        .find(|&p| (p..len).all(|i| ratios[i] == ratios[i - p]))
        .unwrap_or(len);
    let seq = ParamSequence::periodic(ratios[..period].to_vec())?;
    Ok((mg.remainder(0), seq))
}

/// The first `count` terms `x_n = d_{n−1} − d_n` of the series with `E(x) = C(a)` and `r_0 = 1`.
pub fn cantor_to_series(seq: &ParamSequence, count: usize) -> Result<Vec<Scalar>> {
    (1..=count).map(|n| seq.weight(n)).collect()
}

/// For a purely periodic `a` of period `L`: the multigeometric series
/// `(x_1, …, x_L; d_L)` with `E(x) = C(a)`.
pub fn cantor_to_multigeometric(seq: &ParamSequence) -> Result<Multigeometric> {
    if !seq.prefix().is_empty() || !seq.is_eventually_periodic() {
        return Err(Error::PreconditionViolated(
            "a multigeometric form needs a purely periodic sequence".into(),
        ));
    }
    let len = seq.period().len();
    Multigeometric::new(cantor_to_series(seq, len)?, seq.d(len)?)
}

/// The verdict for `E(3,3,2,2; q) − const`, which has the same structure as
/// `C(a) − C(a)` for the Cantor form `a` of `E(3,2; q)`.
pub fn e3322_structure(q: &Scalar) -> Result<Verdict> {
    if !q.is_positive() || *q >= ratio(1, 6) {
        return Err(Error::QOutOfRange(format_scalar(q)));
    }
    let mg = Multigeometric::new(vec![int(3), int(2)], q.clone())?;
    let (_, seq) = series_to_cantor(&mg)?;
    classify(&seq)
}

/// `E_n = ⋃ [σ, σ + tail]` over the subset sums `σ` of `terms`: the finite-stage approximant of
/// an achievement set whose first terms are `terms` and whose remaining sum is `tail`.
pub fn subset_sum_approximant(terms: &[Scalar], tail: &Scalar) -> IntervalUnion {
    let mut sums = vec![Scalar::zero()];
    for x in terms {
        let shifted: Vec<Scalar> = sums.iter().map(|s| s + x).collect();
        sums.extend(shifted);
    }
    IntervalUnion::from_pairs(sums.into_iter().map(|s| {
        let r = &s + tail;
        (s, r)
    }))
}
