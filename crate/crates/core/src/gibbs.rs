//! Finite-volume kernels: the row measures on conjugacy sets, the averaging
//! operator, the tower consistency check, and the weak-dependence probe.

use crate::beta_lang::{Language, Word};
use crate::conformal::cocycle;
use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::real::{log_sum_exp, Real};
use crate::shift_space::{conjugacy_set, FinitePoint, Window};
use std::collections::{BTreeMap, BTreeSet};

pub const TAIL_TOL: f64 = 1e-9;

/// One row of the finite-volume kernel: the probability vector over the
/// conjugacy set of the base point at the window.
#[derive(Clone, Debug)]
pub struct KernelRow<F: Real> {
    pub base: FinitePoint,
    pub window: Window,
    pub support: Vec<FinitePoint>,
    pub weights: Vec<F>,
    /// Largest certified truncation slack among the exponents.
    pub slack: F,
}

impl<F: Real> KernelRow<F> {
    pub fn weight_of(&self, y: &FinitePoint) -> Option<F> {
        self.support
            .iter()
            .position(|z| z == y)
            .map(|i| self.weights[i])
    }
}

pub fn kernel_row<F: Real>(
    f: &Potential<F>,
    lang: &Language,
    x: &FinitePoint,
    window: Window,
    tail_depth: usize,
    budget: usize,
) -> Result<KernelRow<F>> {
    let support = conjugacy_set(lang, x, window, budget)?;
    let mut logs = Vec::with_capacity(support.len());
    let mut slack = F::zero();
    for y in &support {
        let c = cocycle(f, lang, x, y, tail_depth)?;
        let s = c.slack.to_f64().unwrap_or(f64::INFINITY);
        if s > TAIL_TOL {
            return Err(Error::TailTruncationError {
                slack: s,
                tol: TAIL_TOL,
            });
        }
        if c.slack > slack {
            slack = c.slack;
        }
        logs.push(c.value);
    }
    let z = log_sum_exp(&logs);
    let weights = logs.iter().map(|&l| (l - z).exp()).collect();
    Ok(KernelRow {
        base: x.clone(),
        window,
        support,
        weights,
    slack,
    })
}

/// The class average sum_y phi(y) pi(y | x).
pub fn apply_m<F: Real>(
    f: &Potential<F>,
    lang: &Language,
    phi: &dyn Fn(&FinitePoint) -> F,
    window: Window,
    x: &FinitePoint,
    tail_depth: usize,
    budget: usize,
) -> Result<F> {
    let row = kernel_row(f, lang, x, window, tail_depth, budget)?;
    Ok(row
        .support
        .iter()
        .zip(&row.weights)
        .map(|(y, &w)| phi(y) * w)
        .fold(F::zero(), |a, b| a + b))
}

/// Max residual of the tower identity M_{L2}(phi) = M_{L2}(M_L(phi)) over
/// the given points.
pub fn consistency_check<F: Real>(
    f: &Potential<F>,
    lang: &Language,
    phi: &dyn Fn(&FinitePoint) -> F,
    inner: Window,
    outer: Window,
    points: &[FinitePoint],
    tail_depth: usize,
    budget: usize,
) -> Result<F> {
    if !outer.contains_window(&inner) {
        return Err(Error::WindowMismatch {
            expected: (outer.k, outer.l),
            got: (inner.k, inner.l),
        });
    }
    let mut worst = F::zero();
    for x in points {
        let direct = apply_m(f, lang, phi, outer, x, tail_depth, budget)?;
        let smoothed = |y: &FinitePoint| -> F {
            apply_m(f, lang, phi, inner, y, tail_depth, budget).expect("inner average")
        };
        let composed = apply_m(f, lang, &smoothed, outer, x, tail_depth, budget)?;
        let r = (direct - composed).abs();
        if r > worst {
            worst = r;
        }
    }
    Ok(worst)
}

/// Outcome of the finite-depth search for the weak dependence window.
#[derive(Clone, Debug, PartialEq)]
pub enum ProbeOutcome {
    /// No violation found at the tested depth for this enlarged window.
    Witness { bar: Window, depth: usize },
    /// Two points agreeing on the collar whose classes meet different
    /// window cylinders, together with a separating word.
    Violation {
        x: FinitePoint,
        x2: FinitePoint,
        v: Word,
    },
}

fn available_words(
    lang: &Language,
    x: &FinitePoint,
    window: Window,
    words: &[Word],
) -> Result<BTreeSet<Word>> {
    let mut set = BTreeSet::new();
    for v in words {
        if x.substitute(window, v).is_member(lang)? {
            set.insert(v.clone());
        }
    }
    Ok(set)
}

/// Search the enlarged windows L extended by 1..=radius for one on which
/// the cylinder pattern of a class depends only on the collar letters.
/// Tails are varied to the given depth beyond the enlarged window.
pub fn weak_dependence_probe(
    lang: &Language,
    window: Window,
    radius: usize,
    depth: usize,
    budget: usize,
) -> Result<ProbeOutcome> {
    let vs = lang.enumerate(window.len(), budget)?;
    let mut last_violation = None;
    for r in 1..=radius {
        let bar = window.extend(r as i64);
        let outer = bar.extend(depth as i64);
        let collar: Vec<i64> = bar.sites().filter(|k| !window.contains(*k)).collect();
        let words = lang.enumerate(outer.len(), budget)?;
        let mut groups: BTreeMap<Vec<u32>, Vec<(FinitePoint, BTreeSet<Word>)>> = BTreeMap::new();
        let mut violation = None;
        'scan: for w in words {
            let x = FinitePoint::new(outer.k, w);
            let key: Vec<u32> = collar.iter().map(|&k| x.value(k)).collect();
            let avail = available_words(lang, &x, window, &vs)?;
            let bucket = groups.entry(key).or_default();
            for (x2, avail2) in bucket.iter() {
                if avail2 != &avail {
                    let v = avail
                        .symmetric_difference(avail2)
                        .next()
                        .expect("nonempty difference")
                        .clone();
                    violation = Some(ProbeOutcome::Violation {
                        x: x.clone(),
                        x2: x2.clone(),
                        v,
                    });
                    break 'scan;
                }
            }
            bucket.push((x, avail));
        }
        match violation {
            None => return Ok(ProbeOutcome::Witness { bar, depth }),
            Some(v) => last_violation = Some(v),
        }
    }
    Ok(last_violation.expect("radius >= 1"))
}
