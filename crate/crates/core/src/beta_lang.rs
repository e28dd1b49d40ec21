//! The beta-expansion digit stream, the shift-language automaton, and the
//! word-level combinatorics: membership, enumeration, q(w), s(w), the hat
//! transform and z(w).
//!
//! Automaton states are prefix lengths: state m means the last m letters of
//! the word read so far equal the first m digits of the expansion. From
//! state m on letter a: a < c(m+1) drops to state 0, a = c(m+1) advances to
//! m+1, a > c(m+1) rejects.

use crate::algebra::{BetaNumber, ExactRemainder};
use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use std::sync::{Arc, Mutex};

/// Diagnostic window: the digit stream must show a nonzero digit in every
/// run of this many consecutive digits. The expansion cannot end in zeros,
/// but no effective bound on zero runs is available, so this is a guard,
/// not a theorem.
pub const ZERO_RUN_GUARD: usize = 64;

pub type Word = Vec<u32>;

struct StreamState {
    digits: Vec<u32>,
    remainder: ExactRemainder, // r_i after the last computed digit
    last_nonzero: Option<usize>,
}

/// Lazily extended digit sequence c(1), c(2), ... with exact remainders.
pub struct DigitStream {
    beta: BetaNumber,
    alphabet: u32, // b = ceil(beta)
    state: Mutex<StreamState>,
}

impl DigitStream {
    pub fn new(beta: BetaNumber) -> Result<Self> {
        let one = beta.remainder_one();
        let b = beta
            .certified_ceil(&one)?
            .to_u32()
            .ok_or_else(|| Error::InvalidSpec("beta too large".into()))?;
        Ok(DigitStream {
            beta,
            alphabet: b,
            state: Mutex::new(StreamState {
                digits: Vec::new(),
                remainder: one,
                last_nonzero: None,
            }),
        })
    }

    pub fn beta(&self) -> &BetaNumber {
        &self.beta
    }

    /// Alphabet size b = ceil(beta); letters range over 0..b.
    pub fn alphabet_size(&self) -> u32 {
        self.alphabet
    }

    /// c(i+1), zero-indexed.
    pub fn digit(&self, i: usize) -> Result<u32> {
        let mut st = self.state.lock().unwrap();
        while st.digits.len() <= i {
            let t = st.remainder.mul_beta();
            let c_big: BigInt = self.beta.certified_ceil(&st.remainder)? - 1;
            let c = c_big
                .to_u32()
                .ok_or_else(|| Error::InvalidSpec("digit out of range".into()))?;
            debug_assert!(c < self.alphabet);
            st.remainder = t.sub_integer(&BigInt::from(c));
            let idx = st.digits.len();
            st.digits.push(c);
            if c > 0 {
                st.last_nonzero = Some(idx);
            } else {
                let run = idx - st.last_nonzero.map_or(0, |j| j + 1) + 1;
                if run >= ZERO_RUN_GUARD {
                    return Err(Error::ZeroRunDiagnostic(run));
                }
            }
        }
        Ok(st.digits[i])
    }

    pub fn prefix(&self, n: usize) -> Result<Word> {
        (0..n).map(|i| self.digit(i)).collect()
    }
}

/// Word-level operations over one beta-shift language.
#[derive(Clone)]
pub struct Language {
    stream: Arc<DigitStream>,
}

impl Language {
    pub fn new(beta: BetaNumber) -> Result<Self> {
        Ok(Language {
            stream: Arc::new(DigitStream::new(beta)?),
        })
    }

    pub fn stream(&self) -> &DigitStream {
        &self.stream
    }

    pub fn beta(&self) -> &BetaNumber {
        self.stream.beta()
    }

    pub fn alphabet_size(&self) -> u32 {
        self.stream.alphabet_size()
    }

    /// First n digits of the expansion of 1.
    pub fn expand(&self, n: usize) -> Result<Word> {
        self.stream.prefix(n)
    }

    fn check_letters(&self, w: &[u32]) -> Result<()> {
        let b = self.alphabet_size();
        for &a in w {
            if a >= b {
                return Err(Error::AlphabetError {
                    letter: a,
                    alphabet: b,
                });
            }
        }
        Ok(())
    }

    /// One automaton step; None means rejection.
    pub fn step(&self, state: usize, letter: u32) -> Result<Option<usize>> {
        let c = self.stream.digit(state)?;
        Ok(if letter < c {
            Some(0)
        } else if letter == c {
            Some(state + 1)
        } else {
            None
        })
    }

    /// Runs the automaton from `state`; None on the first violation.
    pub fn run(&self, mut state: usize, w: &[u32]) -> Result<Option<usize>> {
        for &a in w {
            match self.step(state, a)? {
                Some(next) => state = next,
                None => return Ok(None),
            }
        }
        Ok(Some(state))
    }

    pub fn is_admissible(&self, w: &[u32]) -> Result<bool> {
        self.check_letters(w)?;
        Ok(self.run(0, w)?.is_some())
    }

    /// q(w) as a prefix length; equals |s(w)|.
    pub fn state_of(&self, w: &[u32]) -> Result<usize> {
        self.check_letters(w)?;
        self.run(0, w)?.ok_or(Error::Inadmissible)
    }

    /// Splits w = v . s with s the largest suffix of w that is a prefix of
    /// the expansion digits.
    pub fn suffix_decompose(&self, w: &[u32]) -> Result<(Word, Word)> {
        let m = self.state_of(w)?;
        let split = w.len() - m;
        Ok((w[..split].to_vec(), w[split..].to_vec()))
    }

    /// The hat transform: decrements the last nonzero letter of s(w),
    /// producing an admissible word with state 0.
    pub fn hat(&self, w: &[u32]) -> Result<Word> {
        let (v, s) = self.suffix_decompose(w)?;
        if s.is_empty() {
            return Ok(w.to_vec());
        }
        let mut s_hat = s.clone();
        // c(1) > 0 so a nonempty prefix of the digits has a nonzero letter
        let j = s_hat
            .iter()
            .rposition(|&a| a > 0)
            .expect("prefix of digits cannot be all zeros");
        s_hat[j] -= 1;
        let mut out = v;
        out.extend_from_slice(&s_hat);
        debug_assert_eq!(self.state_of(&out)?, 0);
        Ok(out)
    }

    /// Run length of zeros in the digits immediately after the prefix s(w).
    pub fn z_value(&self, w: &[u32]) -> Result<usize> {
        let m = self.state_of(w)?;
        if m == 0 {
            return Ok(0);
        }
        let mut p = 0usize;
        while self.stream.digit(m + p)? == 0 {
            p += 1;
        }
        Ok(p)
    }

    /// True iff w . w2 is admissible.
    pub fn concatenable(&self, w: &[u32], w2: &[u32]) -> Result<bool> {
        let state = self.state_of(w)?;
        self.check_letters(w2)?;
        if self.run(0, w2)?.is_none() {
            return Err(Error::Inadmissible);
        }
        Ok(self.run(state, w2)?.is_some())
    }

    pub fn is_digit_prefix(&self, u: &[u32]) -> Result<bool> {
        for (i, &a) in u.iter().enumerate() {
            if self.stream.digit(i)? != a {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Extends a prefix of the digits on the right by 0.
    pub fn extend_by_zero(&self, u: &[u32]) -> Result<Word> {
        if !self.is_digit_prefix(u)? {
            return Err(Error::NotAPrefix);
        }
        let mut out = u.to_vec();
        out.push(0);
        debug_assert!(self.is_admissible(&out)?);
        Ok(out)
    }

    /// All admissible words of length n, lexicographic, up to `limit`.
    pub fn enumerate(&self, n: usize, limit: usize) -> Result<Vec<Word>> {
        let mut out = Vec::new();
        let mut stack: Vec<(Word, usize)> = vec![(Vec::new(), 0)];
        // depth-first with reversed-letter pushes keeps lexicographic order
        while let Some((w, state)) = stack.pop() {
            if w.len() == n {
                if out.len() >= limit {
                    return Err(Error::BudgetExceeded(limit));
                }
                out.push(w);
                continue;
            }
            for a in (0..self.alphabet_size()).rev() {
                if let Some(next) = self.step(state, a)? {
                    let mut w2 = w.clone();
                    w2.push(a);
                    stack.push((w2, next));
                }
            }
        }
        Ok(out)
    }

    /// |enumerate(n)| by dynamic programming over automaton states.
    pub fn count(&self, n: usize) -> Result<BigUint> {
        let mut cur: Vec<BigUint> = vec![BigUint::from(1u32)];
        for _ in 0..n {
            let mut next: Vec<BigUint> = vec![BigUint::zero(); cur.len() + 1];
            for (state, mult) in cur.iter().enumerate() {
                if mult.is_zero() {
                    continue;
                }
                let c = self.stream.digit(state)?;
                // letters 0..c drop to state 0, letter c advances
                next[0] += mult * BigUint::from(c);
                next[state + 1] += mult;
            }
            cur = next;
        }
        Ok(cur.into_iter().sum())
    }

    /// count(n) as f64 log, for growth-rate probes.
    pub fn log_count(&self, n: usize) -> Result<f64> {
        let c = self.count(n)?;
        Ok(big_ln(&c))
    }
}

/// Words print as plain digit strings for alphabets up to 10 letters and
/// comma-separated otherwise.
pub fn word_to_string(w: &[u32], alphabet: u32) -> String {
    if alphabet <= 10 {
        w.iter().map(|a| a.to_string()).collect()
    } else {
        w.iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

pub fn word_from_string(s: &str, alphabet: u32) -> Result<Word> {
    let parse = |t: &str| -> Result<u32> {
        t.parse::<u32>()
            .map_err(|_| Error::InvalidSpec(format!("bad word '{s}'")))
    };
    let w: Word = if alphabet <= 10 {
        s.chars()
            .map(|c| parse(&c.to_string()))
            .collect::<Result<_>>()?
    } else {
        if s.is_empty() {
            Vec::new()
        } else {
            s.split(',').map(parse).collect::<Result<_>>()?
        }
    };
    for &a in &w {
        if a >= alphabet {
            return Err(Error::AlphabetError {
                letter: a,
                alphabet,
            });
        }
    }
    Ok(w)
}

fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 52 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 52;
    let top = (x >> shift).to_f64().unwrap();
    top.ln() + (shift as f64) * std::f64::consts::LN_2
}
