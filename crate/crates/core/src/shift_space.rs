//! The two-sided shift space built over the language: windows, zero-padded
//! finitely supported points, projections, the ultrametric, cylinders and
//! finite-depth conjugacy sets.

use crate::beta_lang::{Language, Word};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A finite interval [k, l] of lattice sites.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Window {
    pub k: i64,
    pub l: i64,
}

impl Window {
    pub fn new(k: i64, l: i64) -> Result<Self> {
        if k > l {
            return Err(Error::InvalidSpec(format!("empty window [{k},{l}]")));
        }
        Ok(Window { k, l })
    }

    pub fn len(&self) -> usize {
        (self.l - self.k + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> {
        self.k..=self.l
    }

    pub fn contains(&self, j: i64) -> bool {
        self.k <= j && j <= self.l
    }

    pub fn contains_window(&self, other: &Window) -> bool {
        self.k <= other.k && other.l <= self.l
    }

    /// The window widened by r on both sides.
    pub fn extend(&self, r: i64) -> Window {
        Window {
            k: self.k - r,
            l: self.l + r,
        }
    }

    /// The window translated so that (T^j x) restricted to it reads off x
    /// on the translate.
    pub fn translate(&self, j: i64) -> Window {
        Window {
            k: self.k + j,
            l: self.l + j,
        }
    }
}

/// Metric scale: d(x, y) = eps(m) with m the first symmetric disagreement.
pub fn epsilon(n: usize) -> f64 {
    0.5f64.powi(n as i32)
}

/// Expansive constant for the chosen scale sequence.
pub const EPSILON_STAR: f64 = 0.5;

/// A point of the full two-sided lattice that is 0 outside a finite window.
/// Stored in canonical form: `letters` is empty or starts and ends with a
/// nonzero letter, so coordinatewise equality is structural equality.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FinitePoint {
    offset: i64,
    letters: Word,
}

#[derive(Serialize, Deserialize)]
struct PointRepr {
    window: [i64; 2],
    letters: Vec<u32>,
}

impl FinitePoint {
    pub fn new(offset: i64, letters: impl Into<Word>) -> Self {
        let mut letters: Word = letters.into();
        let mut offset = offset;
        let first = letters.iter().position(|&a| a > 0);
        match first {
            None => {
                letters.clear();
                offset = 0;
            }
            Some(i) => {
                let j = letters.iter().rposition(|&a| a > 0).unwrap();
                letters = letters[i..=j].to_vec();
                offset += i as i64;
            }
        }
        FinitePoint { offset, letters }
    }

    pub fn zero() -> Self {
        FinitePoint {
            offset: 0,
            letters: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn value(&self, j: i64) -> u32 {
        if j < self.offset {
            return 0;
        }
        let idx = (j - self.offset) as usize;
        self.letters.get(idx).copied().unwrap_or(0)
    }

    /// Smallest window carrying all nonzero letters; None for the zero point.
    pub fn support(&self) -> Option<Window> {
        if self.letters.is_empty() {
            None
        } else {
            Some(Window {
                k: self.offset,
                l: self.offset + self.letters.len() as i64 - 1,
            })
        }
    }

    /// The letters from the first to the last nonzero coordinate.
    pub fn support_word(&self) -> &[u32] {
        &self.letters
    }

    /// J_L: the letters of the point on the window L.
    pub fn project(&self, window: Window) -> Word {
        window.sites().map(|j| self.value(j)).collect()
    }

    /// T^j, with (T^j x)(k) = x(k + j).
    pub fn shift(&self, j: i64) -> FinitePoint {
        if self.letters.is_empty() {
            return FinitePoint::zero();
        }
        FinitePoint {
            offset: self.offset - j,
            letters: self.letters.clone(),
        }
    }

    /// Replace the letters on `window` by w, keeping everything else.
    pub fn substitute(&self, window: Window, w: &[u32]) -> FinitePoint {
        debug_assert_eq!(w.len(), window.len());
        let hull_k = window.k.min(self.support().map_or(window.k, |s| s.k));
        let hull_l = window.l.max(self.support().map_or(window.l, |s| s.l));
        let mut letters: Word = (hull_k..=hull_l).map(|j| self.value(j)).collect();
        for (i, &a) in w.iter().enumerate() {
            letters[(window.k - hull_k) as usize + i] = a;
        }
        FinitePoint::new(hull_k, letters)
    }

    /// Membership in the shift space: the support word must be admissible
    /// (zero padding on either side never creates a violation).
    pub fn is_member(&self, lang: &Language) -> Result<bool> {
        lang.is_admissible(&self.letters)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let window = self.support().unwrap_or(Window { k: 0, l: 0 });
        serde_json::to_value(PointRepr {
            window: [window.k, window.l],
            letters: self.project(window),
        })
        .expect("point serialization")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let repr: PointRepr = serde_json::from_value(v.clone())
            .map_err(|e| Error::InvalidSpec(format!("bad point: {e}")))?;
        let window = Window::new(repr.window[0], repr.window[1])?;
        if repr.letters.len() != window.len() {
            return Err(Error::WindowMismatch {
                expected: (window.k, window.l),
                got: (window.k, window.k + repr.letters.len() as i64 - 1),
            });
        }
        Ok(FinitePoint::new(window.k, repr.letters))
    }
}

/// The point w-bar: w on the window, 0 everywhere else.
pub fn zero_pad(lang: &Language, w: &[u32], window: Window) -> Result<FinitePoint> {
    if w.len() != window.len() {
        return Err(Error::WindowMismatch {
            expected: (window.k, window.l),
            got: (window.k, window.k + w.len() as i64 - 1),
        });
    }
    if !lang.is_admissible(w)? {
        return Err(Error::Inadmissible);
    }
    let point = FinitePoint::new(window.k, w.to_vec());
    debug_assert!(point.is_member(lang)?);
    Ok(point)
}

/// d(x, y) = eps(m) with m = min{n : x and y differ at n or -n}; 0 if equal.
pub fn distance(x: &FinitePoint, y: &FinitePoint) -> f64 {
    if x == y {
        return 0.0;
    }
    let mut n = 0i64;
    loop {
        if x.value(n) != y.value(n) || x.value(-n) != y.value(-n) {
            return epsilon(n as usize);
        }
        n += 1;
    }
}

/// A cylinder set: the points reading `word` on `window`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Cylinder {
    pub window: Window,
    pub word: Word,
}

impl Cylinder {
    pub fn new(lang: &Language, window: Window, word: Word) -> Result<Self> {
        if word.len() != window.len() {
            return Err(Error::WindowMismatch {
                expected: (window.k, window.l),
                got: (window.k, window.k + word.len() as i64 - 1),
            });
        }
        if !lang.is_admissible(&word)? {
            return Err(Error::Inadmissible);
        }
        Ok(Cylinder { window, word })
    }

    pub fn contains(&self, x: &FinitePoint) -> bool {
        self.word == x.project(self.window)
    }

    /// The zero-padded representative of the cylinder.
    pub fn representative(&self) -> FinitePoint {
        FinitePoint::new(self.window.k, self.word.clone())
    }
}

/// W_L^x: every point of the shift space agreeing with x off L.
pub fn conjugacy_set(
    lang: &Language,
    x: &FinitePoint,
    window: Window,
    budget: usize,
) -> Result<Vec<FinitePoint>> {
    let mut out = Vec::new();
    for w in lang.enumerate(window.len(), budget)? {
        let y = x.substitute(window, &w);
        if y.is_member(lang)? {
            out.push(y);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BetaNumber;
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

    #[test]
    fn project_examples() {
        let lang = golden();
        let x = zero_pad(&lang, &[1, 0], win(0, 1)).unwrap();
        assert_eq!(x.project(win(0, 1)), vec![1, 0]);
        assert_eq!(x.project(win(5, 7)), vec![0, 0, 0]);
        assert_eq!(x.project(win(-1, 1)), vec![0, 1, 0]);
    }

    #[test]
    fn zero_pad_examples() {
        let lang = golden();
        assert!(zero_pad(&lang, &[1, 0, 1], win(0, 2)).is_ok());
        let z = zero_pad(&lang, &[0, 0, 0], win(0, 2)).unwrap();
        assert!(z.is_zero());
        let lang = five_halves();
        assert!(zero_pad(&lang, &[2, 1], win(-1, 0)).is_ok());
        assert!(matches!(
            zero_pad(&lang, &[2, 1], win(0, 2)),
            Err(Error::WindowMismatch { .. })
        ));
    }

    #[test]
    fn zero_pad_rejects_inadmissible() {
        let lang = golden();
        assert!(matches!(
            zero_pad(&lang, &[1, 1], win(0, 1)),
            Err(Error::Inadmissible)
        ));
    }

    #[test]
    fn distance_examples() {
        let x = FinitePoint::zero();
        assert_eq!(distance(&x, &x), 0.0);
        let y = FinitePoint::new(0, vec![1]);
        assert_eq!(distance(&x, &y), 1.0);
        let y = FinitePoint::new(-3, vec![1]);
        assert_eq!(distance(&x, &y), 0.125);
    }

    #[test]
    fn ultrametric_on_random_triples() {
        let lang = golden();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let words = lang.enumerate(6, 1_000_000).unwrap();
        for _ in 0..2000 {
            let mut pick = || {
                let w = &words[rng.gen_range(0..words.len())];
                FinitePoint::new(rng.gen_range(-4i64..4), w.clone())
            };
            let (x, y, z) = (pick(), pick(), pick());
            let dxz = distance(&x, &z);
            let dxy = distance(&x, &y);
            let dyz = distance(&y, &z);
            assert!(dxz <= dxy.max(dyz) + 1e-15);
        }
    }

    #[test]
    fn every_admissible_word_pads_to_a_member() {
        for lang in [golden(), five_halves()] {
            for n in 1..=8usize {
                for w in lang.enumerate(n, 1_000_000).unwrap() {
                    let x = FinitePoint::new(-(n as i64) / 2, w.clone());
                    assert!(x.is_member(&lang).unwrap(), "{w:?}");
                }
            }
        }
    }

    #[test]
    fn conjugacy_set_examples() {
        let lang = golden();
        let set = conjugacy_set(&lang, &FinitePoint::zero(), win(0, 0), 100).unwrap();
        assert_eq!(
            set,
            vec![FinitePoint::zero(), FinitePoint::new(0, vec![1])]
        );

        let x = FinitePoint::new(1, vec![1]);
        let set = conjugacy_set(&lang, &x, win(0, 0), 100).unwrap();
        assert_eq!(set, vec![x.clone()]);
        assert!(set.contains(&x));
    }

    #[test]
    fn conjugacy_set_is_a_partition() {
        for lang in [golden(), five_halves()] {
            let window = win(0, 1);
            for w in lang.enumerate(4, 1_000_000).unwrap() {
                let x = FinitePoint::new(-1, w);
                let set = conjugacy_set(&lang, &x, window, 10_000).unwrap();
                assert!(set.contains(&x));
                assert!(set.len() <= lang.enumerate(window.len(), 10_000).unwrap().len());
                for y in &set {
                    let set_y = conjugacy_set(&lang, y, window, 10_000).unwrap();
                    assert_eq!(set, set_y);
                }
            }
        }
    }

    #[test]
    fn shift_examples() {
        let x = FinitePoint::new(0, vec![1]);
        assert_eq!(x.shift(0), x);
        assert_eq!(FinitePoint::zero().shift(3), FinitePoint::zero());
        let y = x.shift(1);
        assert_eq!(y.value(-1), 1);
        assert_eq!(y.value(0), 0);
    }

    #[test]
    fn shift_commutes_with_coordinates() {
        let lang = golden();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let words = lang.enumerate(5, 1_000_000).unwrap();
        for _ in 0..500 {
            let w = &words[rng.gen_range(0..words.len())];
            let x = FinitePoint::new(rng.gen_range(-5i64..5), w.clone());
            let j = rng.gen_range(-6i64..6);
            let tx = x.shift(j);
            for k in -12i64..12 {
                assert_eq!(tx.value(k), x.value(k + j));
            }
            assert_eq!(tx.shift(-j), x);
        }
    }

    #[test]
    fn canonical_form_trims_zeros() {
        let a = FinitePoint::new(-2, vec![0, 0, 1, 0, 1, 0]);
        let b = FinitePoint::new(0, vec![1, 0, 1]);
        assert_eq!(a, b);
        assert_eq!(a.support(), Some(win(0, 2)));
    }

    #[test]
    fn cylinder_basics() {
        let lang = golden();
        let c = Cylinder::new(&lang, win(0, 1), vec![1, 0]).unwrap();
        assert!(c.contains(&c.representative()));
        assert!(!c.contains(&FinitePoint::zero()));
        assert!(Cylinder::new(&lang, win(0, 1), vec![1, 1]).is_err());
    }

    #[test]
    fn point_json_round_trip() {
        let x = FinitePoint::new(-1, vec![1, 0, 1]);
        let v = x.to_json();
        assert_eq!(FinitePoint::from_json(&v).unwrap(), x);
        let z = FinitePoint::zero();
        assert_eq!(FinitePoint::from_json(&z.to_json()).unwrap(), z);
    }
}
