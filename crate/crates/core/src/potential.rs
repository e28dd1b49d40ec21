//! Potentials on the shift space. Two certifiable families are supported:
//! window-local potentials (tables over a finite block, coordinate reads)
//! and a geometric-decay family with an explicit variation envelope. Every
//! estimator reports honest lower bounds; the envelopes supply the certified
//! upper bounds used for tail truncation downstream.

use crate::beta_lang::{Language, Word};
use crate::error::Result;
use crate::real::Real;
use crate::shift_space::{FinitePoint, Window};
use num_bigint::BigUint;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq)]
pub enum Potential<F: Real> {
    Zero,
    /// f(x) = x(j).
    Coord { j: i64 },
    /// f(x) = values[x(-p), ..., x(p)], defaulting to 0 for unlisted blocks.
    Table {
        radius: usize,
        values: BTreeMap<Word, F>,
    },
    /// f(x) = sum_{k >= 0} a lambda^k x(k), 0 < lambda < 1.
    GeomDecay { a: F, lambda: F },
}

/// Sites g at which f(T^g x) can differ between two points agreeing off a
/// window [dk, dl].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActiveSites {
    None,
    Finite(i64, i64),
    /// Active for all g <= hi; truncation needs the tail envelope.
    LeftUnbounded(i64),
}

impl<F: Real> Potential<F> {
    pub fn constant(alphabet: u32, value: F) -> Self {
        let values = (0..alphabet).map(|a| (vec![a], value)).collect();
        Potential::Table { radius: 0, values }
    }

    pub fn evaluate(&self, x: &FinitePoint) -> F {
        match self {
            Potential::Zero => F::zero(),
            Potential::Coord { j } => F::from_u32_lossy(x.value(*j)),
            Potential::Table { radius, values } => {
                let p = *radius as i64;
                let block = x.project(Window { k: -p, l: p });
                values.get(&block).copied().unwrap_or_else(F::zero)
            }
            Potential::GeomDecay { a, lambda } => {
                let Some(support) = x.support() else {
                    return F::zero();
                };
                let mut acc = F::zero();
                for k in 0..=support.l.max(0) {
                    let v = x.value(k);
                    if v > 0 {
                        acc = acc + *a * lambda.powi(k as i32) * F::from_u32_lossy(v);
                    }
                }
                acc
            }
        }
    }

    /// f(T^g x) without materializing the shifted point.
    pub fn evaluate_shifted(&self, x: &FinitePoint, g: i64) -> F {
        match self {
            Potential::Zero => F::zero(),
            Potential::Coord { j } => F::from_u32_lossy(x.value(j + g)),
            _ => self.evaluate(&x.shift(g)),
        }
    }

    pub fn active_sites(&self, dk: i64, dl: i64) -> ActiveSites {
        match self {
            Potential::Zero => ActiveSites::None,
            Potential::Coord { j } => ActiveSites::Finite(dk - j, dl - j),
            Potential::Table { radius, .. } => {
                let p = *radius as i64;
                ActiveSites::Finite(dk - p, dl + p)
            }
            Potential::GeomDecay { .. } => ActiveSites::LeftUnbounded(dl),
        }
    }

    /// Certified bound on the sum of |f(T^g x) - f(T^g y)| over the skipped
    /// sites g < g_cut when a left-unbounded range is truncated t sites
    /// below the disagreement window.
    pub fn left_tail_bound(&self, t: usize, alphabet: u32) -> F {
        match self {
            Potential::GeomDecay { a, lambda } => {
                let spread = F::from_u32_lossy(alphabet - 1);
                a.abs() * spread * lambda.powi(t as i32)
                    / ((F::one() - *lambda) * (F::one() - *lambda))
            }
            _ => F::zero(),
        }
    }

    /// Declared envelope: var_n(f) <= this, for pairs agreeing on
    /// [-(n-1), n-1].
    pub fn var_bound(&self, n: usize, alphabet: u32) -> F {
        let m = (n - 1) as i64;
        let spread = F::from_u32_lossy(alphabet - 1);
        match self {
            Potential::Zero => F::zero(),
            Potential::Coord { j } => {
                if -m <= *j && *j <= m {
                    F::zero()
                } else {
                    spread
                }
            }
            Potential::Table { radius, values } => {
                if m >= *radius as i64 {
                    F::zero()
                } else {
                    let mut lo = F::zero();
                    let mut hi = F::zero();
                    for v in values.values() {
                        if *v < lo {
                            lo = *v;
                        }
                        if *v > hi {
                            hi = *v;
                        }
                    }
                    hi - lo
                }
            }
            Potential::GeomDecay { a, lambda } => {
                a.abs() * spread * lambda.powi(n as i32) / (F::one() - *lambda)
            }
        }
    }

    pub fn sup_norm(&self, alphabet: u32) -> F {
        let spread = F::from_u32_lossy(alphabet - 1);
        match self {
            Potential::Zero => F::zero(),
            Potential::Coord { .. } => spread,
            Potential::Table { values, .. } => values
                .values()
                .fold(F::zero(), |acc, v| acc.max(v.abs())),
            Potential::GeomDecay { a, lambda } => a.abs() * spread / (F::one() - *lambda),
        }
    }

    pub fn spec_string(&self) -> String {
        match self {
            Potential::Zero => "zero".into(),
            Potential::Coord { j } => format!("coord:{j}"),
            Potential::Table { radius, values } => {
                let entries: Vec<String> = values
                    .iter()
                    .map(|(w, v)| {
                        let word: String = w.iter().map(|a| a.to_string()).collect();
                        format!("{word}={v}")
                    })
                    .collect();
                format!("table:p={radius}:{}", entries.join(","))
            }
            Potential::GeomDecay { a, lambda } => format!("decay:geom:{a},{lambda}"),
        }
    }
}

/// Birkhoff sum over a window: sum_{j in L} f(T^j x).
pub fn birkhoff<F: Real>(f: &Potential<F>, x: &FinitePoint, window: Window) -> F {
    window.sites().map(|j| f.evaluate_shifted(x, j)).sum()
}

fn collar_depth(lang: &Language, half_inner: i64, budget: usize) -> Result<i64> {
    let mut d = 1i64;
    while d < 4 {
        let len = (2 * (half_inner + d + 1) + 1) as usize;
        if lang.count(len)? > BigUint::from(budget) {
            break;
        }
        d += 1;
    }
    Ok(d)
}

/// Empirical lower bound on var_n over enumerated finitely supported pairs
/// agreeing on [-(n-1), n-1].
pub fn variation<F: Real>(
    f: &Potential<F>,
    lang: &Language,
    n: usize,
    budget: usize,
) -> Result<F> {
    assert!(n >= 1);
    let m = (n - 1) as i64;
    let d = collar_depth(lang, m, budget)?;
    let window = Window { k: -(m + d), l: m + d };
    let words = lang.enumerate(window.len(), budget)?;
    let mut groups: BTreeMap<Word, (F, F)> = BTreeMap::new();
    for w in words {
        let center = w[d as usize..w.len() - d as usize].to_vec();
        let x = FinitePoint::new(window.k, w);
        let v = f.evaluate(&x);
        groups
            .entry(center)
            .and_modify(|(lo, hi)| {
                *lo = lo.min(v);
                *hi = hi.max(v);
            })
            .or_insert((v, v));
    }
    Ok(groups
        .values()
        .map(|(lo, hi)| *hi - *lo)
        .fold(F::zero(), F::max))
}

/// Lower bound on the Bowen constant for the window: max over enumerated
/// pairs with equal projection to L of the Birkhoff-sum difference.
pub fn bowen_defect<F: Real>(
    f: &Potential<F>,
    lang: &Language,
    window: Window,
    depth: usize,
    budget: usize,
) -> Result<F> {
    let ext = window.extend(depth as i64);
    let words = lang.enumerate(ext.len(), budget)?;
    let d = depth;
    let mut groups: BTreeMap<Word, (F, F)> = BTreeMap::new();
    for w in words {
        let center = w[d..w.len() - d].to_vec();
        let x = FinitePoint::new(ext.k, w);
        let v = birkhoff(f, &x, window);
        groups
            .entry(center)
            .and_modify(|(lo, hi)| {
                *lo = lo.min(v);
                *hi = hi.max(v);
            })
            .or_insert((v, v));
    }
    Ok(groups
        .values()
        .map(|(lo, hi)| *hi - *lo)
        .fold(F::zero(), F::max))
}

/// Finite-depth lower estimate of the tail-coupling sum: pairs agreeing off
/// L, sum over sites g outside L with |g| <= depth.
pub fn delta_estimate<F: Real>(
    f: &Potential<F>,
    lang: &Language,
    window: Window,
    depth: usize,
    budget: usize,
) -> Result<F> {
    let ext = window.extend(depth as i64);
    let words = lang.enumerate(ext.len(), budget)?;
    let inner_start = (window.k - ext.k) as usize;
    let inner_len = window.len();
    let mut groups: BTreeMap<Word, Vec<FinitePoint>> = BTreeMap::new();
    for w in words {
        let mut env = w.clone();
        env.drain(inner_start..inner_start + inner_len);
        groups
            .entry(env)
            .or_default()
            .push(FinitePoint::new(ext.k, w));
    }
    let dep = depth as i64;
    let mut best = F::zero();
    for members in groups.values() {
        for (i, x) in members.iter().enumerate() {
            for y in &members[i + 1..] {
                let mut total = F::zero();
                for g in -dep..=dep {
                    if window.contains(g) {
                        continue;
                    }
                    total =
                        total + (f.evaluate_shifted(x, g) - f.evaluate_shifted(y, g)).abs();
                }
                best = best.max(total);
            }
        }
    }
    Ok(best)
}
