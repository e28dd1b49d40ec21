//! Partition functions, pressure, finite-volume measures, Cesaro
//! equilibrium approximants, prefix decay and the margin check.
//!
//! For potentials whose Birkhoff sum over a volume factorizes over single
//! sites (zero, coordinate reads, radius-0 tables, geometric decay) the
//! sums run as a dynamic program over (position, automaton state) in log
//! space. Other potentials fall back to explicit enumeration.

use crate::beta_lang::{word_from_string, word_to_string, Language, Word};
use crate::error::{Error, Result};
use crate::potential::{birkhoff, Potential};
use crate::real::{log_add, log_sum_exp, Real};
use crate::shift_space::{FinitePoint, Window};
use serde_json::json;
use std::collections::BTreeMap;

/// A probability assignment on the cylinders of one window.
#[derive(Clone, Debug)]
pub struct CylinderMeasure<F: Real> {
    window: Window,
    weights: BTreeMap<Word, F>,
}

impl<F: Real> CylinderMeasure<F> {
    pub fn new(lang: &Language, window: Window, weights: BTreeMap<Word, F>) -> Result<Self> {
        let mut total = F::zero();
        for (w, &m) in &weights {
            if w.len() != window.len() {
                return Err(Error::WindowMismatch {
                    expected: (window.k, window.l),
                    got: (window.k, window.k + w.len() as i64 - 1),
                });
            }
            if !lang.is_admissible(w)? {
                return Err(Error::Inadmissible);
            }
            if m < F::zero() {
                return Err(Error::InvalidSpec("negative cylinder weight".into()));
            }
            total = total + m;
        }
        let tol = F::epsilon() * F::from_f64_lossy(1e4);
        if (total - F::one()).abs() > tol {
            return Err(Error::InvalidSpec(format!(
                "cylinder weights sum to {total}, not 1"
            )));
        }
        Ok(CylinderMeasure { window, weights })
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn weight(&self, w: &[u32]) -> F {
        self.weights.get(w).copied().unwrap_or_else(F::zero)
    }

    pub fn weights(&self) -> &BTreeMap<Word, F> {
        &self.weights
    }

    pub fn to_json(&self, beta_spec: &str, f_spec: &str, alphabet: u32) -> serde_json::Value {
        let weights: serde_json::Map<String, serde_json::Value> = self
            .weights
            .iter()
            .map(|(w, m)| {
                (
                    word_to_string(w, alphabet),
                    json!(m.to_f64().unwrap_or(f64::NAN)),
                )
            })
            .collect();
        json!({
            "window": [self.window.k, self.window.l],
            "beta": beta_spec,
            "f": f_spec,
            "weights": weights,
        })
    }

    pub fn from_json(lang: &Language, v: &serde_json::Value) -> Result<Self> {
        let bad = |m: &str| Error::InvalidSpec(format!("bad measure: {m}"));
        let win = v
            .get("window")
            .and_then(|w| w.as_array())
            .ok_or_else(|| bad("missing window"))?;
        let k = win.first().and_then(|x| x.as_i64()).ok_or_else(|| bad("window"))?;
        let l = win.get(1).and_then(|x| x.as_i64()).ok_or_else(|| bad("window"))?;
        let window = Window::new(k, l)?;
        let raw = v
            .get("weights")
            .and_then(|w| w.as_object())
            .ok_or_else(|| bad("missing weights"))?;
        let mut weights = BTreeMap::new();
        for (key, val) in raw {
            let w = word_from_string(key, lang.alphabet_size())?;
            let m = val.as_f64().ok_or_else(|| bad("weight"))?;
            weights.insert(w, F::from_f64_lossy(m));
        }
        CylinderMeasure::new(lang, window, weights)
    }
}

/// Per-site log weights when the Birkhoff sum over the volume splits as
/// sum_i g(i, w(i)); None when the potential does not factorize.
fn site_table<F: Real>(f: &Potential<F>, window: Window, alphabet: u32) -> Option<Vec<Vec<F>>> {
    let mut table = Vec::with_capacity(window.len());
    for site in window.sites() {
        let mut row = Vec::with_capacity(alphabet as usize);
        for a in 0..alphabet {
            let v = match f {
                Potential::Zero => F::zero(),
                Potential::Coord { j } => {
                    if window.contains(site - *j) {
                        F::from_u32_lossy(a)
                    } else {
                        F::zero()
                    }
                }
                Potential::Table { radius: 0, values } => values
                    .get(&vec![a])
                    .copied()
                    .unwrap_or_else(F::zero),
                Potential::Table { .. } => return None,
                Potential::GeomDecay { a: c, lambda } => {
                    // sum over j in the volume of lambda^(site - j), j <= site
                    let e = (site - window.k + 1) as i32;
                    *c * (F::one() - lambda.powi(e)) / (F::one() - *lambda)
                        * F::from_u32_lossy(a)
                }
            };
            row.push(v);
        }
        table.push(row);
    }
    Some(table)
}

/// Log-space forward pass over (position, automaton state). `pins` fixes
/// letters at given position indices. Returns the final per-state log mass.
fn forward_dp<F: Real>(
    lang: &Language,
    table: &[Vec<F>],
    pins: &BTreeMap<usize, u32>,
) -> Result<Vec<F>> {
    let b = lang.alphabet_size();
    let mut cur: Vec<F> = vec![F::zero()];
    for (i, row) in table.iter().enumerate() {
        let mut next = vec![F::neg_infinity(); cur.len() + 1];
        for (state, &lv) in cur.iter().enumerate() {
            if lv == F::neg_infinity() {
                continue;
            }
            for a in 0..b {
                if let Some(&p) = pins.get(&i) {
                    if a != p {
                        continue;
                    }
                }
                if let Some(ns) = lang.step(state, a)? {
                    next[ns] = log_add(next[ns], lv + row[a as usize]);
                }
            }
        }
        cur = next;
    }
    Ok(cur)
}

fn enum_birkhoff_values<F: Real>(
    f: &Potential<F>,
    lang: &Language,
    window: Window,
    budget: usize,
) -> Result<(Vec<Word>, Vec<F>)> {
    let words = lang.enumerate(window.len(), budget)?;
    let vals = words
        .iter()
        .map(|w| birkhoff(f, &FinitePoint::new(window.k, w.clone()), window))
        .collect();
    Ok((words, vals))
}

/// log Xi_L(f): log-sum-exp of zero-padded Birkhoff sums over all
/// admissible words of the window.
pub fn partition_function<F: Real>(
    f: &Potential<F>,
    lang: &Language,
    window: Window,
    budget: usize,
) -> Result<F> {
    if let Some(table) = site_table(f, window, lang.alphabet_size()) {
        let finals = forward_dp(lang, &table, &BTreeMap::new())?;
        Ok(log_sum_exp(&finals))
    } else {
        let (_, vals) = enum_birkhoff_values(f, lang, window, budget)?;
        Ok(log_sum_exp(&vals))
    }
}

/// Same sum restricted to words whose automaton state is 0.
pub fn restricted_partition<F: Real>(
    f: &Potential<F>,
    lang: &Language,
    window: Window,
    budget: usize,
) -> Result<F> {
    if let Some(table) = site_table(f, window, lang.alphabet_size()) {
        let finals = forward_dp(lang, &table, &BTreeMap::new())?;
        Ok(finals[0])
    } else {
        let (words, vals) = enum_birkhoff_values(f, lang, window, budget)?;
        let kept: Vec<F> = words
            .iter()
            .zip(vals)
            .filter(|(w, _)| matches!(lang.state_of(w), Ok(0)))
            .map(|(_, v)| v)
            .collect();
        Ok(log_sum_exp(&kept))
    }
}

/// The finite-volume pressures P_{[-n,n]}(f) for n = 1..n_max.
pub fn pressure_estimate<F: Real>(
    f: &Potential<F>,
    lang: &Language,
    n_max: usize,
    budget: usize,
) -> Result<Vec<F>> {
    (1..=n_max)
        .map(|n| {
            let window = Window::new(-(n as i64), n as i64)?;
            Ok(partition_function(f, lang, window, budget)?
                / F::from_usize_lossy(2 * n + 1))
        })
        .collect()
}

/// mu_L: weight(w) proportional to exp of the zero-padded Birkhoff sum.
pub fn finite_volume_measure<F: Real>(
    f: &Potential<F>,
    lang: &Language,
    window: Window,
    budget: usize,
) -> Result<CylinderMeasure<F>> {
    let (words, vals) = enum_birkhoff_values(f, lang, window, budget)?;
    let log_xi = log_sum_exp(&vals);
    let weights = words
        .into_iter()
        .zip(vals)
        .map(|(w, v)| (w, (v - log_xi).exp()))
        .collect();
    CylinderMeasure::new(lang, window, weights)
}

/// The Cesaro approximant nu_n on the target window: the average over
/// shifts j of the mass mu_{[-n,n]} gives to reading u at the shifted
/// target. Shifts keeping the shifted target inside the volume are used
/// when any exist (no boundary effect); otherwise all j in [-n, n]
/// contribute and sites outside the volume read the zero padding.
pub fn cesaro_equilibrium<F: Real>(
    f: &Potential<F>,
    lang: &Language,
    n: usize,
    target: Window,
    budget: usize,
) -> Result<CylinderMeasure<F>> {
    let volume = Window::new(-(n as i64), n as i64)?;
    if target.len() > 2 * volume.len() {
        return Err(Error::WindowTooLarge);
    }
    let all: Vec<i64> = (-(n as i64)..=n as i64).collect();
    let inside: Vec<i64> = all
        .iter()
        .copied()
        .filter(|&j| volume.contains_window(&target.translate(j)))
        .collect();
    let shifts = if inside.is_empty() { all } else { inside };
    let targets = lang.enumerate(target.len(), budget)?;
    let denom = F::from_usize_lossy(shifts.len());
    let mut weights: BTreeMap<Word, F> =
        targets.iter().map(|u| (u.clone(), F::zero())).collect();

    if let Some(table) = site_table(f, volume, lang.alphabet_size()) {
        let log_xi = log_sum_exp(&forward_dp(lang, &table, &BTreeMap::new())?);
        for u in &targets {
            let mut acc = F::zero();
            'shift: for &j in &shifts {
                let mut pins = BTreeMap::new();
                for (idx, site) in target.translate(j).sites().enumerate() {
                    if volume.contains(site) {
                        pins.insert((site - volume.k) as usize, u[idx]);
                    } else if u[idx] != 0 {
                        continue 'shift;
                    }
                }
                let lm = log_sum_exp(&forward_dp(lang, &table, &pins)?);
                if lm > F::neg_infinity() {
                    acc = acc + (lm - log_xi).exp();
                }
            }
            *weights.get_mut(u).unwrap() = acc / denom;
        }
    } else {
        let (words, vals) = enum_birkhoff_values(f, lang, volume, budget)?;
        let log_xi = log_sum_exp(&vals);
        for (w, lv) in words.iter().zip(&vals) {
            let x = FinitePoint::new(volume.k, w.clone());
            let m = (*lv - log_xi).exp() / denom;
            for &j in &shifts {
                let read = x.project(target.translate(j));
                if let Some(acc) = weights.get_mut(&read) {
                    *acc = *acc + m;
                }
            }
        }
    }
    CylinderMeasure::new(lang, target, weights)
}

#[derive(Clone, Debug)]
pub struct DecayReport<F: Real> {
    /// Least-squares slope of -log mu_{[1,j]}([c_j]) against j.
    pub kappa: F,
    pub points: Vec<(usize, F)>,
    /// Largest absolute deviation of the fitted line on the stable half.
    pub fit_residual: F,
    pub margin: F,
}

/// Decay rate of the mass of digit-prefix cylinders.
pub fn prefix_decay<F: Real>(
    f: &Potential<F>,
    lang: &Language,
    n_max: usize,
    budget: usize,
) -> Result<DecayReport<F>> {
    assert!(n_max >= 2);
    let margin = margin_check(f, lang, n_max, budget)?;
    if margin <= F::zero() {
        return Err(Error::MarginViolated(margin.to_f64().unwrap_or(f64::NAN)));
    }
    let mut points = Vec::with_capacity(n_max);
    for j in 1..=n_max {
        let window = Window::new(1, j as i64)?;
        let cj = lang.expand(j)?;
        let x = FinitePoint::new(1, cj);
        let log_xi = partition_function(f, lang, window, budget)?;
        points.push((j, -(birkhoff(f, &x, window) - log_xi)));
    }
    let lo = (n_max / 2).max(1);
    let data: Vec<(F, F)> = points
        .iter()
        .filter(|(j, _)| *j >= lo)
        .map(|(j, y)| (F::from_usize_lossy(*j), *y))
        .collect();
    let m = F::from_usize_lossy(data.len());
    let sx: F = data.iter().map(|(x, _)| *x).sum();
    let sy: F = data.iter().map(|(_, y)| *y).sum();
    let sxx: F = data.iter().map(|(x, _)| *x * *x).sum();
    let sxy: F = data.iter().map(|(x, y)| *x * *y).sum();
    let kappa = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let intercept = (sy - kappa * sx) / m;
    let fit_residual = data
        .iter()
        .map(|(x, y)| (*y - (kappa * *x + intercept)).abs())
        .fold(F::zero(), F::max);
    Ok(DecayReport {
        kappa,
        points,
        fit_residual,
        margin,
    })
}

/// P_{[-n,n]}(f) minus the depth-n orbit average of f along the digit
/// point (digits on [0, n + horizon), zero elsewhere).
pub fn margin_check<F: Real>(
    f: &Potential<F>,
    lang: &Language,
    n: usize,
    budget: usize,
) -> Result<F> {
    assert!(n >= 1);
    let window = Window::new(-(n as i64), n as i64)?;
    let p = partition_function(f, lang, window, budget)? / F::from_usize_lossy(2 * n + 1);
    let horizon = 48usize;
    let digits = lang.expand(n + horizon)?;
    let c_hat = FinitePoint::new(0, digits);
    let avg = (0..n as i64)
        .map(|k| f.evaluate_shifted(&c_hat, k))
        .sum::<F>()
        / F::from_usize_lossy(n);
    Ok(p - avg)
}
