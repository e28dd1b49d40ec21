//! Text grammars for β and potential specifications, shared by the CLI and
//! config files.
//!
//! β: `rational:<p>/<q>`, `decimal:<string>`, `poly:<c0,...,cd>@[<lo>,<hi>]`.
//! Potential: `zero`, `coord:<j>`, `table:p=<radius>:<word=value,...>`,
//! `decay:geom:<a>,<lambda>`.

use crate::algebra::BetaNumber;
use crate::beta_lang::word_from_string;
use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::real::Real;
use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::BTreeMap;
use std::str::FromStr;

fn bad(spec: &str, what: &str) -> Error {
    Error::InvalidSpec(format!("{what} in '{spec}'"))
}

fn parse_rat(s: &str, spec: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad(spec, "bad numerator"))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad(spec, "bad denominator"))?;
        if q == BigInt::from(0) {
            return Err(bad(spec, "zero denominator"));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let digits = format!("{int}{frac}");
        let p = BigInt::from_str(&digits).map_err(|_| bad(spec, "bad decimal"))?;
        let q = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(BigRational::new(p, q));
    }
    let p = BigInt::from_str(s).map_err(|_| bad(spec, "bad number"))?;
    Ok(BigRational::from_integer(p))
}

pub fn parse_beta(spec: &str) -> Result<BetaNumber> {
    let spec = spec.trim();
    if let Some(body) = spec.strip_prefix("rational:") {
        let (p, q) = body.split_once('/').ok_or_else(|| bad(spec, "expected p/q"))?;
        let p = BigInt::from_str(p.trim()).map_err(|_| bad(spec, "bad numerator"))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad(spec, "bad denominator"))?;
        if q == BigInt::from(0) {
            return Err(bad(spec, "zero denominator"));
        }
        return BetaNumber::from_big_rational(BigRational::new(p, q));
    }
    if let Some(body) = spec.strip_prefix("decimal:") {
        return BetaNumber::from_decimal(body);
    }
    if let Some(body) = spec.strip_prefix("poly:") {
        let (coeffs, range) = body
            .split_once('@')
            .ok_or_else(|| bad(spec, "expected @[lo,hi]"))?;
        let coeffs: Vec<i64> = coeffs
            .split(',')
            .map(|c| c.trim().parse::<i64>().map_err(|_| bad(spec, "bad coefficient")))
            .collect::<Result<_>>()?;
        let range = range
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| bad(spec, "expected [lo,hi]"))?;
        let (lo, hi) = range
            .split_once(',')
            .ok_or_else(|| bad(spec, "expected lo,hi"))?;
        let poly = coeffs
            .into_iter()
            .map(|c| BigRational::from_integer(BigInt::from(c)))
            .collect();
        return BetaNumber::from_poly_rat(poly, parse_rat(lo, spec)?, parse_rat(hi, spec)?);
    }
    Err(bad(spec, "unknown beta grammar"))
}

pub fn parse_potential<F: Real>(spec: &str) -> Result<Potential<F>> {
    let spec = spec.trim();
    if spec == "zero" {
        return Ok(Potential::Zero);
    }
    if let Some(j) = spec.strip_prefix("coord:") {
        let j = j.trim().parse::<i64>().map_err(|_| bad(spec, "bad site"))?;
        return Ok(Potential::Coord { j });
    }
    if let Some(body) = spec.strip_prefix("table:p=") {
        let (radius, entries) = body
            .split_once(':')
            .ok_or_else(|| bad(spec, "expected table:p=<radius>:<entries>"))?;
        let radius: usize = radius
            .trim()
            .parse()
            .map_err(|_| bad(spec, "bad radius"))?;
        let len = 2 * radius + 1;
        let mut values = BTreeMap::new();
        for entry in entries.split(',').filter(|e| !e.trim().is_empty()) {
            let (word, value) = entry
                .split_once('=')
                .ok_or_else(|| bad(spec, "expected word=value"))?;
            let word = word_from_string(word.trim(), 10)?;
            if word.len() != len {
                return Err(bad(spec, "table word of wrong length"));
            }
            let value = value
                .trim()
                .parse::<f64>()
                .map_err(|_| bad(spec, "bad table value"))?;
            values.insert(word, F::from_f64_lossy(value));
        }
        return Ok(Potential::Table { radius, values });
    }
    if let Some(body) = spec.strip_prefix("decay:geom:") {
        let (a, lambda) = body
            .split_once(',')
            .ok_or_else(|| bad(spec, "expected a,lambda"))?;
        let a = a.trim().parse::<f64>().map_err(|_| bad(spec, "bad amplitude"))?;
        let lambda = lambda
            .trim()
            .parse::<f64>()
            .map_err(|_| bad(spec, "bad decay rate"))?;
        if !(0.0 < lambda && lambda < 1.0) {
            return Err(bad(spec, "decay rate outside (0,1)"));
        }
        return Ok(Potential::GeomDecay {
            a: F::from_f64_lossy(a),
            lambda: F::from_f64_lossy(lambda),
        });
    }
    Err(bad(spec, "unknown potential grammar"))
}
