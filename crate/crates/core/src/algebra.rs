//! Certified arithmetic for the base `beta`.
//!
//! Every ceiling decision in the digit algorithm is made exactly: rationals
//! are exact, and algebraic numbers are handled with power-basis arithmetic
//! in `Q[x]/(p)` plus interval refinement of the isolating interval. Sign
//! queries terminate: a value that is not zero is eventually separated from
//! zero by refinement, and exact zero is recognized through a gcd with the
//! squarefree part of the defining polynomial.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, Mutex};

pub const MAX_DEGREE: usize = 16;

type Rat = BigRational;
type Poly = Vec<Rat>; // coefficients, low degree first

fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

fn poly_trim(p: &mut Poly) {
    while p.len() > 1 && p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
    if p.is_empty() {
        p.push(Rat::zero());
    }
}

fn poly_is_zero(p: &Poly) -> bool {
    p.iter().all(|c| c.is_zero())
}

fn poly_eval(p: &Poly, x: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn poly_derivative(p: &Poly) -> Poly {
    if p.len() <= 1 {
        return vec![Rat::zero()];
    }
    let mut out = Vec::with_capacity(p.len() - 1);
    for (i, c) in p.iter().enumerate().skip(1) {
        out.push(c * rat_int(i as i64));
    }
    out
}

fn poly_rem(a: &Poly, b: &Poly) -> Poly {
    let mut r = a.clone();
    poly_trim(&mut r);
    let mut bb = b.clone();
    poly_trim(&mut bb);
    let db = bb.len() - 1;
    let lead = bb[db].clone();
    while r.len() - 1 >= db && !poly_is_zero(&r) {
        let dr = r.len() - 1;
        let factor = &r[dr] / &lead;
        for i in 0..=db {
            let idx = dr - db + i;
            let sub = &factor * &bb[i];
            r[idx] = &r[idx] - sub;
        }
        r.pop();
        poly_trim(&mut r);
        if r.len() - 1 < db {
            break;
        }
    }
    r
}

fn poly_monic(p: &Poly) -> Poly {
    let mut q = p.clone();
    poly_trim(&mut q);
    let lead = q.last().unwrap().clone();
    if lead.is_zero() || lead.is_one() {
        return q;
    }
    for c in q.iter_mut() {
        *c = &*c / &lead;
    }
    q
}

fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    let mut x = a.clone();
    let mut y = b.clone();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !poly_is_zero(&y) {
        let r = poly_rem(&x, &y);
        x = y;
        y = r;
        poly_trim(&mut y);
    }
    poly_monic(&x)
}

fn poly_squarefree(p: &Poly) -> Poly {
    let d = poly_derivative(p);
    if poly_is_zero(&d) {
        return p.clone();
    }
    let g = poly_gcd(p, &d);
    if g.len() == 1 {
        return poly_monic(p);
    }
    // divide p by g
    let mut num = p.clone();
    poly_trim(&mut num);
    let mut quot = vec![Rat::zero(); num.len() - g.len() + 1];
    let lead = g.last().unwrap().clone();
    let dg = g.len() - 1;
    while num.len() - 1 >= dg && !poly_is_zero(&num) {
        let dn = num.len() - 1;
        let factor = &num[dn] / &lead;
        quot[dn - dg] = factor.clone();
        for i in 0..=dg {
            let sub = &factor * &g[i];
            num[dn - dg + i] = &num[dn - dg + i] - sub;
        }
        num.pop();
        poly_trim(&mut num);
        if num.len() - 1 < dg {
            break;
        }
    }
    poly_monic(&quot)
}

/// Interval Horner evaluation: encloses p([lo, hi]).
fn poly_eval_interval(p: &Poly, lo: &Rat, hi: &Rat) -> (Rat, Rat) {
    let mut alo = Rat::zero();
    let mut ahi = Rat::zero();
    for c in p.iter().rev() {
        // [alo, ahi] * [lo, hi]
        let p1 = &alo * lo;
        let p2 = &alo * hi;
        let p3 = &ahi * lo;
        let p4 = &ahi * hi;
        let mut mn = p1.clone();
        let mut mx = p1;
        for v in [p2, p3, p4] {
            if v < mn {
                mn = v.clone();
            }
            if v > mx {
                mx = v;
            }
        }
        alo = mn + c;
        ahi = mx + c;
    }
    (alo, ahi)
}

#[derive(Debug)]
enum BetaKind {
    Rational(Rat),
    Algebraic {
        poly: Poly,
        squarefree: Poly,
        degree: usize,
        /// beta^degree expressed in the power basis 1, beta, ..., beta^{d-1}.
        reduction: Vec<Rat>,
    },
}

struct BetaInner {
    kind: BetaKind,
    enclosure: Mutex<(Rat, Rat)>,
    spec_string: String,
}

/// A certified real base `beta > 1`, `beta` not an integer.
#[derive(Clone)]
pub struct BetaNumber(Arc<BetaInner>);

impl fmt::Debug for BetaNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BetaNumber({})", self.0.spec_string)
    }
}

impl BetaNumber {
    pub fn from_rational(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidSpec("zero denominator".into()));
        }
        Self::from_big_rational(Rat::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big_rational(q: Rat) -> Result<Self> {
        if q <= Rat::one() {
            return Err(Error::BetaNotGreaterThanOne);
        }
        if q.is_integer() {
            return Err(Error::IntegerBeta);
        }
        let spec = format!("rational:{}/{}", q.numer(), q.denom());
        Ok(BetaNumber(Arc::new(BetaInner {
            enclosure: Mutex::new((q.clone(), q.clone())),
            kind: BetaKind::Rational(q),
            spec_string: spec,
        })))
    }

    /// Decimal string such as "2.5" or "1.6180339887".
    pub fn from_decimal(s: &str) -> Result<Self> {
        let s = s.trim();
        let (int_part, frac_part) = match s.split_once('.') {
            Some((a, b)) => (a, b),
            None => (s, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(Error::InvalidSpec(format!("bad decimal '{s}'")));
        }
        let digits = format!("{int_part}{frac_part}");
        let num: BigInt = digits
            .parse()
            .map_err(|_| Error::InvalidSpec(format!("bad decimal '{s}'")))?;
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        Self::from_big_rational(Rat::new(num, den))
    }

    /// Algebraic beta: integer (or rational) coefficients c0..cd of
    /// p(x) = c0 + c1 x + ... + cd x^d, together with an isolating interval
    /// [lo, hi] containing exactly one root > 1. The sign change of p at the
    /// endpoints is verified.
    pub fn from_poly(coeffs: &[i64], lo: Rat, hi: Rat) -> Result<Self> {
        let poly: Poly = coeffs.iter().map(|&c| rat_int(c)).collect();
        Self::from_poly_rat(poly, lo, hi)
    }

    pub fn from_poly_rat(mut poly: Poly, mut lo: Rat, mut hi: Rat) -> Result<Self> {
        poly_trim(&mut poly);
        let degree = poly.len() - 1;
        if degree < 1 {
            return Err(Error::InvalidSpec("constant polynomial".into()));
        }
        if degree > MAX_DEGREE {
            return Err(Error::DegreeTooLarge(degree));
        }
        if lo >= hi {
            return Err(Error::InvalidSpec("empty isolating interval".into()));
        }
        let flo = poly_eval(&poly, &lo);
        let fhi = poly_eval(&poly, &hi);
        if flo.is_zero() || fhi.is_zero() {
            // endpoint root: accept only if it is the unique root, i.e. treat
            // as a degenerate rational enclosure
            let root = if flo.is_zero() { lo.clone() } else { hi.clone() };
            return Self::from_big_rational(root);
        }
        if flo.is_positive() == fhi.is_positive() {
            return Err(Error::NoSignChange);
        }
        // reject integer roots inside the interval
        let mut k = lo.ceil().to_integer();
        while Rat::from_integer(k.clone()) <= hi {
            if poly_eval(&poly, &Rat::from_integer(k.clone())).is_zero() {
                return Err(Error::IntegerBeta);
            }
            k += 1;
        }
        // bisect until lo > 1 (the root must be > 1)
        for _ in 0..256 {
            if lo > Rat::one() {
                break;
            }
            let mid = (&lo + &hi) / rat_int(2);
            let fmid = poly_eval(&poly, &mid);
            if fmid.is_zero() {
                return Self::from_big_rational(mid);
            }
            if fmid.is_positive() == flo.is_positive() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if lo <= Rat::one() {
            return Err(Error::BetaNotGreaterThanOne);
        }

        let squarefree = poly_squarefree(&poly);
        // beta^d = -(c0 + c1 b + ... + c_{d-1} b^{d-1}) / cd
        let cd = poly[degree].clone();
        let reduction: Vec<Rat> = (0..degree).map(|i| -&poly[i] / &cd).collect();
        let spec = format!(
            "poly:{}@[{},{}]",
            poly.iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(","),
            lo,
            hi
        );
        Ok(BetaNumber(Arc::new(BetaInner {
            kind: BetaKind::Algebraic {
                poly,
                squarefree,
                degree,
                reduction,
            },
            enclosure: Mutex::new((lo, hi)),
            spec_string: spec,
        })))
    }

    /// The golden ratio, root of x^2 - x - 1 in [1, 2].
    pub fn golden() -> Self {
        Self::from_poly(&[-1, -1, 1], rat_int(1), rat_int(2)).unwrap()
    }

    pub fn spec_string(&self) -> &str {
        &self.0.spec_string
    }

    pub fn degree(&self) -> usize {
        match &self.0.kind {
            BetaKind::Rational(_) => 1,
            BetaKind::Algebraic { degree, .. } => *degree,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(&self.0.kind, BetaKind::Rational(_))
    }

    fn bisect_once(&self) {
        let BetaKind::Algebraic { poly, .. } = &self.0.kind else {
            return;
        };
        let mut enc = self.0.enclosure.lock().unwrap();
        let (lo, hi) = enc.clone();
        if lo == hi {
            return;
        }
        let mid = (&lo + &hi) / rat_int(2);
        let fmid = poly_eval(poly, &mid);
        if fmid.is_zero() {
            *enc = (mid.clone(), mid);
            return;
        }
        let flo = poly_eval(poly, &lo);
        if fmid.is_positive() == flo.is_positive() {
            *enc = (mid, hi);
        } else {
            *enc = (lo, mid);
        }
    }

    /// Enclosure of beta with width at most `width`. Nested in prior calls.
    pub fn refine(&self, width: &Rat) -> (Rat, Rat) {
        assert!(width.is_positive(), "width must be positive");
        loop {
            {
                let enc = self.0.enclosure.lock().unwrap();
                let (lo, hi) = &*enc;
                if hi - lo <= *width {
                    return (lo.clone(), hi.clone());
                }
            }
            self.bisect_once();
        }
    }

    pub fn enclosure(&self) -> (Rat, Rat) {
        self.0.enclosure.lock().unwrap().clone()
    }

    /// Approximate value, for display and report metadata only.
    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.refine(&Rat::new(BigInt::one(), BigInt::from(1u64 << 40)));
        let mid = (lo + hi) / rat_int(2);
        mid.to_f64().unwrap_or(f64::NAN)
    }

    /// Sign of g(beta) where g is given in the power basis (len <= degree).
    fn sign_of_element(&self, coords: &[Rat]) -> Ordering {
        match &self.0.kind {
            BetaKind::Rational(_) => {
                // rational beta reduces every power-basis element to coords[0]
                debug_assert_eq!(coords.len(), 1);
                let v = &coords[0];
                if v.is_zero() {
                    Ordering::Equal
                } else if v.is_positive() {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
            BetaKind::Algebraic { squarefree, .. } => {
                let mut g: Poly = coords.to_vec();
                poly_trim(&mut g);
                if poly_is_zero(&g) {
                    return Ordering::Equal;
                }
                loop {
                    let (lo, hi) = self.enclosure();
                    if lo == hi {
                        // degenerate rational enclosure
                        let v = poly_eval(&g, &lo);
                        return if v.is_zero() {
                            Ordering::Equal
                        } else if v.is_positive() {
                            Ordering::Greater
                        } else {
                            Ordering::Less
                        };
                    }
                    let (vlo, vhi) = poly_eval_interval(&g, &lo, &hi);
                    if vlo.is_positive() {
                        return Ordering::Greater;
                    }
                    if vhi.is_negative() {
                        return Ordering::Less;
                    }
                    let h = poly_gcd(squarefree, &g);
                    if h.len() > 1 {
                        let hlo = poly_eval(&h, &lo);
                        let hhi = poly_eval(&h, &hi);
                        if !hlo.is_zero() && !hhi.is_zero() && hlo.is_positive() != hhi.is_positive()
                        {
                            // beta is the only root of the squarefree defining
                            // polynomial in the enclosure; a sign change of the
                            // common factor pins g(beta) = 0
                            return Ordering::Equal;
                        }
                    }
                    self.bisect_once();
                }
            }
        }
    }

    /// Multiply a power-basis vector by beta, reducing the top coefficient.
    fn mul_basis_by_beta(&self, coords: &[Rat]) -> Vec<Rat> {
        match &self.0.kind {
            BetaKind::Rational(q) => vec![&coords[0] * q],
            BetaKind::Algebraic {
                degree, reduction, ..
            } => {
                let d = *degree;
                let mut out = vec![Rat::zero(); d];
                // shift up
                for i in 0..d - 1 {
                    out[i + 1] = coords[i].clone();
                }
                let top = coords[d - 1].clone();
                if !top.is_zero() {
                    for i in 0..d {
                        let add = &top * &reduction[i];
                        out[i] = &out[i] + add;
                    }
                }
                out
            }
        }
    }

    fn coord_len(&self) -> usize {
        self.degree().max(1)
    }

    pub fn remainder_one(&self) -> ExactRemainder {
        let mut coords = vec![Rat::zero(); self.coord_len()];
        coords[0] = Rat::one();
        ExactRemainder {
            beta: self.clone(),
            coords,
        }
    }

    pub fn remainder_from_rational(&self, q: Rat) -> ExactRemainder {
        let mut coords = vec![Rat::zero(); self.coord_len()];
        coords[0] = q;
        ExactRemainder {
            beta: self.clone(),
            coords,
        }
    }

    /// Beta itself as a field element.
    pub fn beta_remainder(&self) -> ExactRemainder {
        self.remainder_one().mul_beta()
    }

    /// Exact ceiling of beta * r. Errors if r <= 0.
    pub fn certified_ceil(&self, r: &ExactRemainder) -> Result<BigInt> {
        if r.sign() != Ordering::Greater {
            return Err(Error::NonPositiveRemainder);
        }
        let t = r.mul_beta();
        Ok(self.ceil_of_element(&t))
    }

    fn ceil_of_element(&self, t: &ExactRemainder) -> BigInt {
        match &self.0.kind {
            BetaKind::Rational(_) => {
                let v = &t.coords[0];
                v.ceil().to_integer()
            }
            BetaKind::Algebraic { .. } => loop {
                let (lo, hi) = self.enclosure();
                let (vlo, vhi) = if lo == hi {
                    let g: Poly = t.coords.clone();
                    let v = poly_eval(&g, &lo);
                    (v.clone(), v)
                } else {
                    poly_eval_interval(&t.coords.to_vec(), &lo, &hi)
                };
                let clo = vlo.ceil().to_integer();
                let chi = vhi.ceil().to_integer();
                if clo == chi {
                    return clo;
                }
                // the enclosure straddles an integer; if the value is exactly
                // that integer, refinement alone would never separate them
                let mut k = vlo.ceil().to_integer();
                while Rat::from_integer(k.clone()) <= vhi {
                    if t.cmp_integer(&k) == Ordering::Equal {
                        return k;
                    }
                    k += 1;
                }
                self.bisect_once();
            },
        }
    }
}

/// An exact element of the ring generated by beta: rational coordinates in
/// the power basis 1, beta, ..., beta^{d-1}.
#[derive(Clone, Debug)]
pub struct ExactRemainder {
    beta: BetaNumber,
    coords: Vec<Rat>,
}

impl ExactRemainder {
    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn mul_beta(&self) -> Self {
        ExactRemainder {
            beta: self.beta.clone(),
            coords: self.beta.mul_basis_by_beta(&self.coords),
        }
    }

    pub fn sub_integer(&self, k: &BigInt) -> Self {
        let mut coords = self.coords.clone();
        coords[0] = &coords[0] - Rat::from_integer(k.clone());
        ExactRemainder {
            beta: self.beta.clone(),
            coords,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        ExactRemainder {
            beta: self.beta.clone(),
            coords,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect();
        ExactRemainder {
            beta: self.beta.clone(),
            coords,
        }
    }

    pub fn sign(&self) -> Ordering {
        self.beta.sign_of_element(&self.coords)
    }

    pub fn cmp_integer(&self, k: &BigInt) -> Ordering {
        self.sub_integer(k).sign()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Rational enclosure of the value, at the current beta precision.
    pub fn to_f64(&self) -> f64 {
        let width = Rat::new(BigInt::one(), BigInt::from(1u64 << 48));
        let (lo, hi) = self.beta.refine(&width);
        let (vlo, vhi) = poly_eval_interval(&self.coords, &lo, &hi);
        ((vlo + vhi) / rat_int(2)).to_f64().unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn refine_golden_to_width() {
        let beta = BetaNumber::golden();
        let (lo, hi) = beta.refine(&rat(1, 1000));
        assert!(&hi - &lo <= rat(1, 1000));
        // independent bisection oracle: golden ratio in [1.618, 1.6181]
        let phi_lo = rat(1618, 1000);
        let phi_hi = rat(16181, 10000);
        assert!(lo < phi_hi && hi > phi_lo);
    }

    #[test]
    fn refinements_are_nested() {
        let beta = BetaNumber::golden();
        let mut prev = beta.refine(&rat(1, 2));
        for k in 2..12 {
            let cur = beta.refine(&rat(1, 1 << k));
            assert!(cur.0 >= prev.0 && cur.1 <= prev.1);
            prev = cur;
        }
    }

    #[test]
    fn rational_beta_is_exact() {
        let beta = BetaNumber::from_rational(5, 2).unwrap();
        let (lo, hi) = beta.refine(&rat(1, 1_000_000));
        assert_eq!(lo, rat(5, 2));
        assert_eq!(hi, rat(5, 2));
    }

    #[test]
    fn integer_beta_rejected() {
        assert!(matches!(
            BetaNumber::from_rational(3, 1),
            Err(Error::IntegerBeta)
        ));
        // x^2 - 4 on [1, 3] has the integer root 2
        assert!(matches!(
            BetaNumber::from_poly(&[-4, 0, 1], rat(1, 1), rat(3, 1)),
            Err(Error::IntegerBeta)
        ));
    }

    #[test]
    fn degree_cap_enforced() {
        let mut coeffs = vec![0i64; 18];
        coeffs[0] = -2;
        coeffs[17] = 1;
        assert!(matches!(
            BetaNumber::from_poly(&coeffs, rat(1, 1), rat(2, 1)),
            Err(Error::DegreeTooLarge(17))
        ));
    }

    #[test]
    fn no_sign_change_rejected() {
        assert!(matches!(
            BetaNumber::from_poly(&[-1, -1, 1], rat(2, 1), rat(3, 1)),
            Err(Error::NoSignChange)
        ));
    }

    #[test]
    fn golden_ceil_of_one() {
        let beta = BetaNumber::golden();
        let one = beta.remainder_one();
        assert_eq!(beta.certified_ceil(&one).unwrap(), BigInt::from(2));
    }

    #[test]
    fn golden_exact_integer_case() {
        // beta * (beta - 1) = beta^2 - beta = 1 exactly in Q(sqrt 5)
        let beta = BetaNumber::golden();
        let r = beta.beta_remainder().sub_integer(&BigInt::from(1));
        assert_eq!(beta.certified_ceil(&r).unwrap(), BigInt::from(1));
    }

    #[test]
    fn rational_ceil() {
        let beta = BetaNumber::from_rational(5, 2).unwrap();
        let r = beta.remainder_from_rational(rat(1, 2));
        assert_eq!(beta.certified_ceil(&r).unwrap(), BigInt::from(2));
    }

    #[test]
    fn nonpositive_remainder_rejected() {
        let beta = BetaNumber::golden();
        let zero = beta.remainder_from_rational(Rat::zero());
        assert!(matches!(
            beta.certified_ceil(&zero),
            Err(Error::NonPositiveRemainder)
        ));
        let neg = beta.remainder_from_rational(rat(-1, 3));
        assert!(matches!(
            beta.certified_ceil(&neg),
            Err(Error::NonPositiveRemainder)
        ));
    }

    #[test]
    fn ceil_brackets_the_product() {
        // ceil(b r) - 1 < b r <= ceil(b r), checked via the enclosure
        let beta = BetaNumber::golden();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1i64..400);
            let d = rng.gen_range(1i64..100);
            let r = beta.remainder_from_rational(rat(n, d));
            let c = beta.certified_ceil(&r).unwrap();
            let t = r.mul_beta();
            assert_ne!(t.cmp_integer(&(&c - 1)), Ordering::Less); // t > c-1
            assert_ne!(t.cmp_integer(&c), Ordering::Greater); // t <= c
        }
    }

    #[test]
    fn decimal_and_algebraic_agree_on_random_remainders() {
        let exact = BetaNumber::golden();
        let dec =
            BetaNumber::from_decimal("1.6180339887498948482045868343656381177203091798057628621")
                .unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10_000 {
            let n = rng.gen_range(1i64..10_000);
            let d = rng.gen_range(1i64..1000);
            let q = rat(n, d);
            let a = exact
                .certified_ceil(&exact.remainder_from_rational(q.clone()))
                .unwrap();
            let b = dec
                .certified_ceil(&dec.remainder_from_rational(q))
                .unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn reducible_poly_with_rational_root_in_interval() {
        // (2x - 5)(x^2 + 1) = 2x^3 - 5x^2 + 2x - 5 has the single real root 5/2
        let beta = BetaNumber::from_poly(&[-5, 2, -5, 2], rat(2, 1), rat(3, 1)).unwrap();
        let r = beta.remainder_from_rational(rat(1, 2));
        assert_eq!(beta.certified_ceil(&r).unwrap(), BigInt::from(2));
    }
}
