//! Conformality layer: the cocycle between conjugate points, cylinder-swap
//! involutions, tail classes, the swap trees with their cylinder unions,
//! and the residual checker comparing a measure against the conformality
//! identity.

use crate::beta_lang::{Language, Word};
use crate::error::{Error, Result};
use crate::potential::{birkhoff, ActiveSites, Potential};
use crate::real::Real;
use crate::shift_space::{Cylinder, FinitePoint, Window};
use crate::thermo::CylinderMeasure;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug)]
pub struct CocycleValue<F: Real> {
    pub value: F,
    /// Certified bound on the truncated part of the sum.
    pub slack: F,
}

fn disagreement_hull(x: &FinitePoint, y: &FinitePoint) -> Option<(i64, i64)> {
    let mut bounds: Option<(i64, i64)> = None;
    let windows = [x.support(), y.support()];
    let hull = windows.iter().flatten().fold(None::<(i64, i64)>, |acc, w| {
        Some(match acc {
            None => (w.k, w.l),
            Some((a, b)) => (a.min(w.k), b.max(w.l)),
        })
    })?;
    for k in hull.0..=hull.1 {
        if x.value(k) != y.value(k) {
            bounds = Some(match bounds {
                None => (k, k),
                Some((a, _)) => (a, k),
            });
        }
    }
    bounds
}

/// psi_f(x, y) = sum_g (f(T^g y) - f(T^g x)) for points agreeing outside a
/// finite window, with a certified remainder for the truncated tail.
pub fn cocycle<F: Real>(
    f: &Potential<F>,
    lang: &Language,
    x: &FinitePoint,
    y: &FinitePoint,
    tail_depth: usize,
) -> Result<CocycleValue<F>> {
    let Some((dk, dl)) = disagreement_hull(x, y) else {
        return Ok(CocycleValue {
            value: F::zero(),
            slack: F::zero(),
        });
    };
    let (lo, hi, slack) = match f.active_sites(dk, dl) {
        ActiveSites::None => {
            return Ok(CocycleValue {
                value: F::zero(),
                slack: F::zero(),
            })
        }
        ActiveSites::Finite(lo, hi) => (lo, hi, F::zero()),
        ActiveSites::LeftUnbounded(hi) => (
            dk - tail_depth as i64,
            hi,
            f.left_tail_bound(tail_depth, lang.alphabet_size()),
        ),
    };
    let mut value = F::zero();
    for g in lo..=hi {
        value = value + f.evaluate_shifted(y, g) - f.evaluate_shifted(x, g);
    }
    Ok(CocycleValue { value, slack })
}

/// The cylinder-swap involution for a window and two admissible words.
#[derive(Clone, Debug)]
pub struct Involution {
    pub window: Window,
    pub u: Word,
    pub v: Word,
}

impl Involution {
    pub fn new(lang: &Language, window: Window, u: Word, v: Word) -> Result<Self> {
        for w in [&u, &v] {
            if w.len() != window.len() {
                return Err(Error::WindowMismatch {
                    expected: (window.k, window.l),
                    got: (window.k, window.k + w.len() as i64 - 1),
                });
            }
            if !lang.is_admissible(w)? {
                return Err(Error::Inadmissible);
            }
        }
        Ok(Involution { window, u, v })
    }

    /// Swap the window block u <-> v when the swapped point stays in the
    /// shift space; otherwise fix the point.
    pub fn apply(&self, lang: &Language, x: &FinitePoint) -> Result<FinitePoint> {
        let block = x.project(self.window);
        let target = if block == self.u {
            &self.v
        } else if block == self.v {
            &self.u
        } else {
            return Ok(x.clone());
        };
        let y = x.substitute(self.window, target);
        if y.is_member(lang)? {
            Ok(y)
        } else {
            Ok(x.clone())
        }
    }
}

/// The finite-range surrogate of the cocycle along an involution: the
/// Birkhoff difference over the window extended by r, evaluated on the
/// zero-padded projection to the window extended by t and its swap image.
pub fn truncated_cocycle<F: Real>(
    f: &Potential<F>,
    lang: &Language,
    invol: &Involution,
    x: &FinitePoint,
    r: usize,
    t: usize,
) -> Result<F> {
    if t < r {
        return Err(Error::InvalidSpec(format!(
            "outer depth {t} smaller than inner depth {r}"
        )));
    }
    let inner = invol.window.extend(r as i64);
    let outer = invol.window.extend(t as i64);
    let xt = FinitePoint::new(outer.k, x.project(outer));
    let y = invol.apply(lang, &xt)?;
    Ok(birkhoff(f, &y, inner) - birkhoff(f, &xt, inner))
}

/// Partition of the given points by which window cylinders their conjugacy
/// set meets (the admissible substitutions at the window).
pub fn tail_classes(
    lang: &Language,
    window: Window,
    points: &[FinitePoint],
    budget: usize,
) -> Result<Vec<(Vec<Word>, Vec<FinitePoint>)>> {
    let words = lang.enumerate(window.len(), budget)?;
    let mut groups: BTreeMap<Vec<Word>, Vec<FinitePoint>> = BTreeMap::new();
    for x in points {
        let mut key = Vec::new();
        for w in &words {
            if x.substitute(window, w).is_member(lang)? {
                key.push(w.clone());
            }
        }
        groups.entry(key).or_default().push(x.clone());
    }
    Ok(groups.into_iter().collect())
}

/// Level-by-level collection of the boundary pairs (w-, w+) keeping the
/// central block admissible (for the joint tree: both central blocks).
#[derive(Clone, Debug)]
pub struct TailTree {
    pub window: Window,
    pub u: Word,
    pub v: Option<Word>,
    /// levels[k] holds the pairs with |w-| = |w+| = k; levels[0] is the root.
    pub levels: Vec<Vec<(Word, Word)>>,
}

impl TailTree {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    fn cylinders(&self, lang: &Language, mid: &[u32]) -> Result<Vec<Cylinder>> {
        let n = self.depth();
        let window = self.window.extend(n as i64);
        self.levels[n]
            .iter()
            .map(|(wm, wp)| {
                let mut word = wm.clone();
                word.extend_from_slice(mid);
                word.extend_from_slice(wp);
                Cylinder::new(lang, window, word)
            })
            .collect()
    }

    /// The cylinder union carrying u at depth n.
    pub fn a2(&self, lang: &Language) -> Result<Vec<Cylinder>> {
        self.cylinders(lang, &self.u.clone())
    }

    /// The cylinder union carrying v (defined for joint trees only).
    pub fn b2(&self, lang: &Language) -> Result<Vec<Cylinder>> {
        let v = self
            .v
            .as_ref()
            .ok_or_else(|| Error::InvalidSpec("single tree has no swap side".into()))?
            .clone();
        self.cylinders(lang, &v)
    }
}

pub fn grow_tree(
    lang: &Language,
    window: Window,
    u: &[u32],
    v: Option<&[u32]>,
    depth: usize,
    budget: usize,
) -> Result<TailTree> {
    let admissible_around = |wm: &[u32], mid: &[u32], wp: &[u32]| -> Result<bool> {
        let mut word = wm.to_vec();
        word.extend_from_slice(mid);
        word.extend_from_slice(wp);
        lang.is_admissible(&word)
    };
    for mid in std::iter::once(u).chain(v) {
        if mid.len() != window.len() {
            return Err(Error::WindowMismatch {
                expected: (window.k, window.l),
                got: (window.k, window.k + mid.len() as i64 - 1),
            });
        }
        if !lang.is_admissible(mid)? {
            return Err(Error::Inadmissible);
        }
    }
    let b = lang.alphabet_size();
    let mut levels: Vec<Vec<(Word, Word)>> = vec![vec![(Vec::new(), Vec::new())]];
    let mut total = 1usize;
    for _ in 0..depth {
        let mut next = Vec::new();
        for (wm, wp) in levels.last().unwrap() {
            for a in 0..b {
                let mut wm2 = vec![a];
                wm2.extend_from_slice(wm);
                for c in 0..b {
                    let mut wp2 = wp.clone();
                    wp2.push(c);
                    if !admissible_around(&wm2, u, &wp2)? {
                        continue;
                    }
                    if let Some(v) = v {
                        if !admissible_around(&wm2, v, &wp2)? {
                            continue;
                        }
                    }
                    total += 1;
                    if total > budget {
                        return Err(Error::BudgetExceeded(budget));
                    }
                    next.push((wm2.clone(), wp2));
                }
            }
        }
        levels.push(next);
    }
    Ok(TailTree {
        window,
        u: u.to_vec(),
        v: v.map(|v| v.to_vec()),
        levels,
    })
}

/// Verdict of the finite-depth sufficiency test for extending a swapped
/// block past the tree boundary.
#[derive(Clone, Copy, Debug)]
pub struct SufficiencyVerdict {
    /// |s(a w-)| <= n.
    pub left_ok: bool,
    /// a w- v w+ admissible with |s(a w- v w+)| <= n.
    pub swap_ok: bool,
    pub sufficient: bool,
    /// a w- v w+ b admissible (what sufficiency promises).
    pub conclusion: bool,
}

pub fn sufficiency_filter(
    lang: &Language,
    w_minus: &[u32],
    w_plus: &[u32],
    v: &[u32],
    a: &[u32],
    b: &[u32],
    n: usize,
) -> Result<SufficiencyVerdict> {
    let mut awm = a.to_vec();
    awm.extend_from_slice(w_minus);
    let left_ok = lang.is_admissible(&awm)? && lang.state_of(&awm)? <= n;
    let mut awvw = awm;
    awvw.extend_from_slice(v);
    awvw.extend_from_slice(w_plus);
    let swap_ok = lang.is_admissible(&awvw)? && lang.state_of(&awvw)? <= n;
    let mut full = awvw;
    full.extend_from_slice(b);
    let conclusion = lang.is_admissible(&full)?;
    Ok(SufficiencyVerdict {
        left_ok,
        swap_ok,
        sufficient: left_ok && swap_ok,
        conclusion,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct Residual<F: Real> {
    /// |mu(B2(n)) - sum over A2(n) cylinders of mu(c) exp psi|.
    pub value: F,
    /// Certified contribution of cocycle truncation.
    pub slack: F,
    pub a2_count: usize,
    pub b2_count: usize,
    pub b2_mass: F,
    pub transported_mass: F,
}

/// Tests the conformality identity at depth n: the mass of the swapped
/// cylinder union must equal the cocycle-weighted mass of the original one.
pub fn conformality_residual<F: Real>(
    f: &Potential<F>,
    lang: &Language,
    mu: &CylinderMeasure<F>,
    invol: &Involution,
    n: usize,
    tail_depth: usize,
    budget: usize,
) -> Result<Residual<F>> {
    let big = invol.window.extend(n as i64);
    if mu.window() != big {
        return Err(Error::WindowMismatch {
            expected: (big.k, big.l),
            got: (mu.window().k, mu.window().l),
        });
    }
    let tree = grow_tree(lang, invol.window, &invol.u, Some(&invol.v), n, budget)?;
    let verts = tree.levels.last().unwrap();
    let mut b2_mass = F::zero();
    let mut transported = F::zero();
    let mut slack = F::zero();
    for (wm, wp) in verts {
        let mut wu = wm.clone();
        wu.extend_from_slice(&invol.u);
        wu.extend_from_slice(wp);
        let mut wv = wm.clone();
        wv.extend_from_slice(&invol.v);
        wv.extend_from_slice(wp);
        b2_mass = b2_mass + mu.weight(&wv);
        let m = mu.weight(&wu);
        if m == F::zero() {
            continue;
        }
        let xc = FinitePoint::new(big.k, wu);
        let yc = FinitePoint::new(big.k, wv);
        let c = cocycle(f, lang, &xc, &yc, tail_depth)?;
        let e = c.value.exp();
        transported = transported + m * e;
        slack = slack + m * e * (c.slack.exp() - F::one());
    }
    Ok(Residual {
        value: (b2_mass - transported).abs(),
        slack,
        a2_count: verts.len(),
        b2_count: verts.len(),
        b2_mass,
        transported_mass: transported,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BetaNumber;
    use crate::shift_space::{conjugacy_set, zero_pad};
    use crate::thermo::{cesaro_equilibrium, finite_volume_measure};
    use rand::{Rng, SeedableRng};

    fn golden() -> Language {
        Language::new(BetaNumber::golden()).unwrap()
    }

    fn five_halves() -> Language {
        Language::new(BetaNumber::from_rational(5, 2).unwrap()).unwrap()
    }

    fn win(k: i64, l: i64) -> Window {
        Window::new(k, l).unwrap()
    }

    fn swap01(lang: &Language) -> Involution {
        Involution::new(lang, win(0, 0), vec![0], vec![1]).unwrap()
    }

    fn random_point(lang: &Language, rng: &mut impl Rng, len: usize, span: i64) -> FinitePoint {
        let words = lang.enumerate(len, 10_000_000).unwrap();
        let w = words[rng.gen_range(0..words.len())].clone();
        FinitePoint::new(rng.gen_range(-span..=span), w)
    }

    #[test]
    fn cocycle_examples() {
        let lang = golden();
        let x = FinitePoint::zero();
        let c = cocycle(&Potential::<f64>::Coord { j: 0 }, &lang, &x, &x, 8).unwrap();
        assert_eq!(c.value, 0.0);
        let y = FinitePoint::new(0, vec![1]);
        let c = cocycle(&Potential::<f64>::Coord { j: 0 }, &lang, &x, &y, 8).unwrap();
        assert_eq!(c.value, 1.0);
        assert_eq!(c.slack, 0.0);
    }

    #[test]
    fn cocycle_antisymmetric_and_additive() {
        for lang in [golden(), five_halves()] {
            let f: Potential<f64> = Potential::GeomDecay { a: 1.0, lambda: 0.5 };
            let window = win(-1, 1);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
            let base = random_point(&lang, &mut rng, 5, 3);
            let class = conjugacy_set(&lang, &base, window, 100_000).unwrap();
            for x in &class {
                for y in &class {
                    let xy = cocycle(&f, &lang, x, y, 30).unwrap();
                    let yx = cocycle(&f, &lang, y, x, 30).unwrap();
                    assert!((xy.value + yx.value).abs() <= xy.slack + yx.slack + 1e-12);
                    for z in &class {
                        let yz = cocycle(&f, &lang, y, z, 30).unwrap();
                        let xz = cocycle(&f, &lang, x, z, 30).unwrap();
                        assert!(
                            (xy.value + yz.value - xz.value).abs()
                                <= 2.0 * (xy.slack + yz.slack + xz.slack) + 1e-12
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn involution_examples() {
        let lang = golden();
        let swap = swap01(&lang);
        let zero = FinitePoint::zero();
        let one = FinitePoint::new(0, vec![1]);
        assert_eq!(swap.apply(&lang, &zero).unwrap(), one);
        assert_eq!(swap.apply(&lang, &one).unwrap(), zero);
        // swap would create the forbidden block 11
        let blocked = FinitePoint::new(1, vec![1]);
        assert_eq!(swap.apply(&lang, &blocked).unwrap(), blocked);
        // off-cylinder points are fixed
        let invol = Involution::new(&lang, win(0, 1), vec![1, 0], vec![0, 1]).unwrap();
        let outside = FinitePoint::new(0, vec![0, 0, 1]);
        assert_eq!(invol.apply(&lang, &outside).unwrap(), outside);
    }

    #[test]
    fn involution_is_involutive_on_random_points() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for lang in [golden(), five_halves()] {
            let words2 = lang.enumerate(2, 1000).unwrap();
            for _ in 0..500 {
                let u = words2[rng.gen_range(0..words2.len())].clone();
                let v = words2[rng.gen_range(0..words2.len())].clone();
                let invol = Involution::new(&lang, win(-1, 0), u, v).unwrap();
                let x = random_point(&lang, &mut rng, 6, 4);
                let y = invol.apply(&lang, &x).unwrap();
                assert_eq!(invol.apply(&lang, &y).unwrap(), x);
            }
        }
    }

    #[test]
    fn involution_bijects_conjugacy_sets() {
        let lang = golden();
        let swap = swap01(&lang);
        let outer = win(-1, 1);
        for w in lang.enumerate(3, 1000).unwrap() {
            let x = FinitePoint::new(-1, w);
            let class = conjugacy_set(&lang, &x, outer, 10_000).unwrap();
            let mut image: Vec<FinitePoint> = class
                .iter()
                .map(|y| swap.apply(&lang, y).unwrap())
                .collect();
            image.sort();
            image.dedup();
            assert_eq!(image.len(), class.len());
            for y in &image {
                assert!(class.contains(y));
            }
        }
    }

    #[test]
    fn truncated_cocycle_examples() {
        let lang = golden();
        let swap = swap01(&lang);
        let x = FinitePoint::zero();
        assert_eq!(
            truncated_cocycle(&Potential::<f64>::Zero, &lang, &swap, &x, 2, 4).unwrap(),
            0.0
        );
        // fixed point of the swap: reading neither u nor v is impossible at
        // a single site, so pick a point the swap cannot move
        let blocked = FinitePoint::new(0, vec![1, 0, 1]);
        let invol = Involution::new(&lang, win(1, 1), vec![1], vec![1]).unwrap();
        assert_eq!(
            truncated_cocycle(&Potential::<f64>::Coord { j: 0 }, &lang, &invol, &blocked, 1, 3)
                .unwrap(),
            0.0
        );
        assert!(truncated_cocycle(
            &Potential::<f64>::Zero,
            &lang,
            &swap,
            &x,
            4,
            2
        )
        .is_err());
    }

    #[test]
    fn truncated_cocycle_converges_to_cocycle() {
        let lang = golden();
        let swap = swap01(&lang);
        let f: Potential<f64> = Potential::GeomDecay { a: 1.0, lambda: 0.5 };
        let x = zero_pad(&lang, &[0, 0, 1], win(0, 2)).unwrap();
        let y = swap.apply(&lang, &x).unwrap();
        assert_ne!(x, y);
        let exact = cocycle(&f, &lang, &x, &y, 60).unwrap();
        let mut last_gap = f64::INFINITY;
        for r in [2usize, 6, 12, 24] {
            let t = 2 * r;
            let v = truncated_cocycle(&f, &lang, &swap, &x, r, t).unwrap();
            let gap = (v - exact.value).abs();
            assert!(gap <= last_gap + 1e-12);
            last_gap = gap;
        }
        assert!(last_gap < 1e-6);
    }

    #[test]
    fn tail_classes_examples() {
        let lang = golden();
        let zero = FinitePoint::zero();
        let one = FinitePoint::new(0, vec![1]);
        let far = FinitePoint::new(1, vec![1]);
        let groups =
            tail_classes(&lang, win(0, 0), &[zero.clone(), one.clone(), far.clone()], 1000)
                .unwrap();
        assert_eq!(groups.len(), 2);
        let small = groups.iter().find(|(k, _)| k.len() == 1).unwrap();
        assert_eq!(small.1, vec![far]);
        let big = groups.iter().find(|(k, _)| k.len() == 2).unwrap();
        assert_eq!(big.1.len(), 2);

        assert!(tail_classes(&lang, win(0, 0), &[], 1000).unwrap().is_empty());
    }

    #[test]
    fn grow_tree_examples() {
        let lang = golden();
        let t0 = grow_tree(&lang, win(0, 0), &[0], Some(&[1]), 0, 1000).unwrap();
        assert_eq!(t0.levels, vec![vec![(vec![], vec![])]]);
        let a2 = t0.a2(&lang).unwrap();
        assert_eq!(a2.len(), 1);
        assert_eq!(a2[0].word, vec![0]);
        assert_eq!(a2[0].window, win(0, 0));

        let t1 = grow_tree(&lang, win(0, 0), &[0], Some(&[1]), 1, 1000).unwrap();
        assert_eq!(t1.levels[1], vec![(vec![0], vec![0])]);

        // single tree at depth 1 keeps every pair with w- 0 w+ admissible
        let s1 = grow_tree(&lang, win(0, 0), &[0], None, 1, 1000).unwrap();
        assert_eq!(s1.levels[1].len(), 4);
    }

    #[test]
    fn tree_levels_nest_and_bound_branching() {
        for lang in [golden(), five_halves()] {
            let b2 = (lang.alphabet_size() * lang.alphabet_size()) as usize;
            let words = lang.enumerate(1, 100).unwrap();
            for u in &words {
                for v in &words {
                    let tree =
                        grow_tree(&lang, win(0, 0), u, Some(v), 4, 1_000_000).unwrap();
                    for k in 0..tree.depth() {
                        assert!(tree.levels[k + 1].len() <= b2 * tree.levels[k].len());
                        for (wm, wp) in &tree.levels[k + 1] {
                            let parent = (wm[1..].to_vec(), wp[..k].to_vec());
                            assert!(tree.levels[k].contains(&parent));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn a2_unions_decrease() {
        let lang = golden();
        let deep = grow_tree(&lang, win(0, 0), &[0], Some(&[1]), 5, 1_000_000).unwrap();
        // every depth-(k+1) cylinder is contained in a depth-k cylinder
        for k in 1..=4usize {
            let level = &deep.levels[k + 1];
            for (wm, wp) in level {
                let parent = (wm[1..].to_vec(), wp[..k].to_vec());
                assert!(deep.levels[k].contains(&parent));
            }
        }
    }

    #[test]
    fn sufficiency_examples() {
        let lang = golden();
        let n = 2usize;
        let tree = grow_tree(&lang, win(0, 0), &[0], Some(&[1]), n, 10_000).unwrap();
        for (wm, wp) in &tree.levels[n] {
            // empty boundary words: |w-| = n forces |s(w-)| <= n
            let verdict = sufficiency_filter(&lang, wm, wp, &[1], &[], &[], n).unwrap();
            assert!(verdict.left_ok);
            if verdict.sufficient {
                assert!(verdict.conclusion);
            }
        }
        // a w- spelling a long digit prefix defeats the state bound
        let cj = lang.expand(2 * n).unwrap();
        let (a, wm) = cj.split_at(n);
        let wp = vec![0, 0];
        let verdict = sufficiency_filter(&lang, wm, &wp, &[1], a, &[], n).unwrap();
        assert!(!verdict.left_ok);
    }

    #[test]
    fn sufficiency_implies_conclusion_exhaustively() {
        for lang in [golden(), five_halves()] {
            let n = 2usize;
            let tree = grow_tree(&lang, win(0, 0), &[0], Some(&[1]), n, 100_000).unwrap();
            for a in lang.enumerate(2, 100_000).unwrap() {
                for b in lang.enumerate(2, 100_000).unwrap() {
                    for (wm, wp) in &tree.levels[n] {
                        // only configurations that actually occur
                        let mut whole = a.clone();
                        whole.extend_from_slice(wm);
                        whole.push(0);
                        whole.extend_from_slice(wp);
                        whole.extend_from_slice(&b);
                        if !lang.is_admissible(&whole).unwrap() {
                            continue;
                        }
                        let verdict =
                            sufficiency_filter(&lang, wm, wp, &[1], &a, &b, n).unwrap();
                        if verdict.sufficient {
                            assert!(verdict.conclusion, "a={a:?} wm={wm:?} wp={wp:?} b={b:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn residual_zero_for_uniform_measure_and_zero_potential() {
        let lang = golden();
        let swap = swap01(&lang);
        let n = 3usize;
        let mu = finite_volume_measure(
            &Potential::<f64>::Zero,
            &lang,
            swap.window.extend(n as i64),
            1_000_000,
        )
        .unwrap();
        let res =
            conformality_residual(&Potential::<f64>::Zero, &lang, &mu, &swap, n, 8, 1_000_000)
                .unwrap();
        assert!(res.value < 1e-12);
        assert_eq!(res.a2_count, res.b2_count);
    }

    #[test]
    fn transfer_oracle_measure_is_conformal() {
        let lang = golden();
        let swap = swap01(&lang);
        let n = 4usize;
        let f: Potential<f64> = Potential::Table {
            radius: 1,
            values: [
                (vec![0, 0, 1], 0.4f64),
                (vec![1, 0, 1], -0.3),
                (vec![0, 1, 0], 0.2),
            ]
            .into_iter()
            .collect(),
        };
        let oracle = crate::oracle::TransferOracle::golden(1, |b| {
            match b {
                [0, 0, 1] => 0.4,
                [1, 0, 1] => -0.3,
                [0, 1, 0] => 0.2,
                _ => 0.0,
            }
        });
        let window = swap.window.extend(n as i64);
        let weights = lang
            .enumerate(window.len(), 1_000_000)
            .unwrap()
            .into_iter()
            .map(|w| {
                let m = oracle.cylinder_weight(&w);
                (w, m)
            })
            .collect();
        let mu = CylinderMeasure::new(&lang, window, weights).unwrap();
        let res = conformality_residual(&f, &lang, &mu, &swap, n, 8, 1_000_000).unwrap();
        assert!(res.value <= 1e-9 + res.slack, "residual {}", res.value);
    }

    #[test]
    fn point_mass_violates_conformality() {
        let lang = golden();
        let swap = swap01(&lang);
        let n = 2usize;
        let window = swap.window.extend(n as i64);
        let words = lang.enumerate(window.len(), 10_000).unwrap();
        let weights = words
            .iter()
            .map(|w| {
                let m = if w == &vec![0, 0, 0, 0, 0] { 1.0f64 } else { 0.0 };
                (w.clone(), m)
            })
            .collect();
        let mu = CylinderMeasure::new(&lang, window, weights).unwrap();
        let res = conformality_residual(
            &Potential::<f64>::Coord { j: 0 },
            &lang,
            &mu,
            &swap,
            n,
            8,
            10_000,
        )
        .unwrap();
        assert!(res.value > 0.5);
    }

    #[test]
    fn cesaro_measure_nearly_conformal() {
        let lang = golden();
        let swap = swap01(&lang);
        let n = 4usize;
        let f: Potential<f64> = Potential::Coord { j: 0 };
        let mu = cesaro_equilibrium(&f, &lang, 8, swap.window.extend(n as i64), 1_000_000)
            .unwrap();
        let res = conformality_residual(&f, &lang, &mu, &swap, n, 8, 1_000_000).unwrap();
        assert!(res.value < 0.02, "residual {}", res.value);
    }
}
