//! Independent cross-checks used by the test suite.
//!
//! Nothing here shares code paths with the main implementation: admissibility
//! is decided by the lexicographic suffix criterion, the digit stream is
//! validated through the exact remainder identity, and golden-ratio measures
//! come from a transfer matrix on the corresponding finite-type shift.

use crate::algebra::BetaNumber;
use num_bigint::BigInt;
use num_traits::One;
use std::cmp::Ordering;
use std::collections::BTreeMap;

/// Lexicographic criterion: w is admissible iff every suffix of w is
/// lexicographically at most the digit sequence.
pub fn brute_admissible(w: &[u32], digits: &[u32]) -> bool {
    assert!(digits.len() >= w.len(), "need enough digits");
    for start in 0..w.len() {
        for (j, &a) in w[start..].iter().enumerate() {
            match a.cmp(&digits[j]) {
                Ordering::Greater => return false,
                Ordering::Less => break,
                Ordering::Equal => {}
            }
        }
    }
    true
}

/// Length of the largest suffix of w that is a prefix of the digits.
pub fn brute_suffix_prefix_len(w: &[u32], digits: &[u32]) -> usize {
    for m in (0..=w.len()).rev() {
        if w[w.len() - m..] == digits[..m] {
            return m;
        }
    }
    0
}

/// Greedy-expansion invariant: the exact remainders r_i = beta r_{i-1} - c(i)
/// stay in (0, 1].
pub fn expansion_identity_ok(beta: &BetaNumber, digits: &[u32]) -> bool {
    let mut r = beta.remainder_one();
    for &c in digits {
        r = r.mul_beta().sub_integer(&BigInt::from(c));
        if r.sign() != Ordering::Greater || r.cmp_integer(&BigInt::one()) == Ordering::Greater {
            return false;
        }
    }
    true
}

/// Panicking form of the greedy-expansion invariant, for tests.
pub fn check_expansion_identity(beta: &BetaNumber, digits: &[u32]) {
    let mut r = beta.remainder_one();
    for (i, &c) in digits.iter().enumerate() {
        r = r.mul_beta().sub_integer(&BigInt::from(c));
        assert_eq!(r.sign(), Ordering::Greater, "remainder {i} not positive");
        assert_ne!(
            r.cmp_integer(&BigInt::one()),
            Ordering::Greater,
            "remainder {i} above one"
        );
    }
}

/// Exact invariant measure for the golden base and a potential depending on
/// coordinates within radius p, built from the transfer matrix of the
/// no-11 finite-type shift. This measure is exactly conformal for the
/// potential cocycle, which makes it a reference point for the conformality
/// machinery.
pub struct TransferOracle {
    state_len: usize,
    states: Vec<Vec<u32>>,
    index: BTreeMap<Vec<u32>, usize>,
    matrix: Vec<Vec<f64>>, // A[i][j]
    lambda: f64,
    left: Vec<f64>,
    right: Vec<f64>,
}

fn golden_ok(w: &[u32]) -> bool {
    w.iter().all(|&a| a <= 1) && w.windows(2).all(|p| p != [1, 1])
}

impl TransferOracle {
    /// `f` is evaluated on blocks of length 2p + 1 (the coordinates
    /// x_{-p}, ..., x_p around a site).
    pub fn golden(p: usize, f: impl Fn(&[u32]) -> f64) -> Self {
        let state_len = (2 * p).max(1);
        let mut states: Vec<Vec<u32>> = Vec::new();
        let mut stack: Vec<Vec<u32>> = vec![Vec::new()];
        while let Some(w) = stack.pop() {
            if w.len() == state_len {
                states.push(w);
                continue;
            }
            for a in (0..=1u32).rev() {
                let mut w2 = w.clone();
                w2.push(a);
                if golden_ok(&w2) {
                    stack.push(w2);
                }
            }
        }
        states.sort();
        let index: BTreeMap<Vec<u32>, usize> =
            states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let n = states.len();
        let mut matrix = vec![vec![0.0f64; n]; n];
        for (i, u) in states.iter().enumerate() {
            for (j, v) in states.iter().enumerate() {
                if u[1..] != v[..state_len - 1] {
                    continue;
                }
                let mut block = u.clone();
                block.push(v[state_len - 1]);
                if !golden_ok(&block) {
                    continue;
                }
                let fval = if p == 0 {
                    f(&block[1..2])
                } else {
                    f(&block)
                };
                matrix[i][j] = fval.exp();
            }
        }
        let (lambda, right) = perron(&matrix, false);
        let (_, left) = perron(&matrix, true);
        // normalize so that sum_i left[i] right[i] = 1
        let dot: f64 = left.iter().zip(&right).map(|(a, b)| a * b).sum();
        let left: Vec<f64> = left.iter().map(|a| a / dot).collect();
        TransferOracle {
            state_len,
            states,
            index,
            matrix,
            lambda,
            left,
            right,
        }
    }

    pub fn log_lambda(&self) -> f64 {
        self.lambda.ln()
    }

    /// Shift-invariant cylinder mass mu([w]).
    pub fn cylinder_weight(&self, w: &[u32]) -> f64 {
        if !golden_ok(w) {
            return 0.0;
        }
        if w.len() < self.state_len {
            let mut total = 0.0;
            for a in 0..=1u32 {
                let mut w2 = w.to_vec();
                w2.push(a);
                total += self.cylinder_weight(&w2);
            }
            return total;
        }
        let mut acc = {
            let s0 = &w[..self.state_len];
            let i0 = self.index[s0];
            (i0, self.left[i0])
        };
        for t in 1..=(w.len() - self.state_len) {
            let s = &w[t..t + self.state_len];
            let j = self.index[s];
            acc = (j, acc.1 * self.matrix[acc.0][j] / self.lambda);
        }
        acc.1 * self.right[acc.0]
    }

    pub fn states(&self) -> &[Vec<u32>] {
        &self.states
    }
}

fn perron(a: &[Vec<f64>], transpose: bool) -> (f64, Vec<f64>) {
    let n = a.len();
    let mut v = vec![1.0f64; n];
    let mut lambda = 1.0;
    for _ in 0..500 {
        let mut w = vec![0.0f64; n];
        for i in 0..n {
            for j in 0..n {
                if transpose {
                    w[j] += a[i][j] * v[i];
                } else {
                    w[i] += a[i][j] * v[j];
                }
            }
        }
        lambda = w.iter().sum::<f64>() / v.iter().sum::<f64>();
        let norm: f64 = w.iter().sum();
        v = w.iter().map(|x| x / norm).collect();
    }
    (lambda, v)
}
