//! Signal mini-grammar:
//!   sinc:a=40
//!   kernel
//!   sobolev:s=1.0,seed=42,kmax=1000
//!   file:PATH
//! so an experiment's input is encoded in a single reproducible token.

use gpswf_core::approx::{
    bessel_kernel_signal, sinc_signal, sobolev_signal, user_samples_signal, Signal,
};
use gpswf_core::{Error, Result};

pub fn parse_signal(spec: &str, alpha: f64, c: f64, default_seed: u64) -> Result<Signal> {
    let (kind, rest) = match spec.split_once(':') {
        Some((k, r)) => (k, Some(r)),
        None => (spec, None),
    };
    match kind {
        "sinc" => {
            let mut a = None;
            for (key, value) in parse_kv(rest.unwrap_or(""))? {
                match key {
                    "a" => a = Some(parse_num(value)?),
                    _ => return Err(Error::Precondition(format!("unknown sinc key '{key}'"))),
                }
            }
            sinc_signal(a.ok_or_else(|| Error::Precondition("sinc needs a=<rate>".into()))?)
        }
        "kernel" => {
            if rest.is_some_and(|r| !r.is_empty()) {
                return Err(Error::Precondition("kernel takes no parameters".into()));
            }
            bessel_kernel_signal(alpha, c)
        }
        "sobolev" => {
            let mut s = None;
            let mut seed = default_seed;
            let mut kmax = 1000usize;
            for (key, value) in parse_kv(rest.unwrap_or(""))? {
                match key {
                    "s" => s = Some(parse_num(value)?),
                    "seed" => {
                        seed = value.parse().map_err(|_| {
                            Error::Precondition(format!("bad sobolev seed '{value}'"))
                        })?
                    }
                    "kmax" => {
                        kmax = value.parse().map_err(|_| {
                            Error::Precondition(format!("bad sobolev kmax '{value}'"))
                        })?
                    }
                    _ => return Err(Error::Precondition(format!("unknown sobolev key '{key}'"))),
                }
            }
            sobolev_signal(
                s.ok_or_else(|| Error::Precondition("sobolev needs s=<exponent>".into()))?,
                seed,
                kmax,
            )
        }
        "file" => {
            let path = rest
                .filter(|r| !r.is_empty())
                .ok_or_else(|| Error::Precondition("file needs a path".into()))?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Precondition(format!("cannot read {path}: {e}")))?;
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                // optional single header line
                if lineno == 0 && line.chars().next().is_some_and(|c| c.is_alphabetic()) {
                    continue;
                }
                let (xs_s, ys_s) = line.split_once(',').ok_or_else(|| {
                    Error::Precondition(format!("line {}: expected 'x,value'", lineno + 1))
                })?;
                xs.push(parse_num(xs_s.trim())?);
                ys.push(parse_num(ys_s.trim())?);
            }
            user_samples_signal(xs, ys)
        }
        other => Err(Error::Precondition(format!(
            "unknown signal kind '{other}' (expected sinc | kernel | sobolev | file)"
        ))),
    }
}

fn parse_kv(s: &str) -> Result<Vec<(&str, &str)>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|item| {
            item.split_once('=')
                .ok_or_else(|| Error::Precondition(format!("expected key=value, got '{item}'")))
        })
        .collect()
}

fn parse_num(s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::Precondition(format!("bad number '{s}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        assert!(matches!(
            parse_signal("sinc:a=40", 0.0, 1.0, 42),
            Ok(Signal::Sinc { a }) if a == 40.0
        ));
        assert!(matches!(
            parse_signal("kernel", 1.0, 50.0, 42),
            Ok(Signal::BesselKernel { alpha, c }) if alpha == 1.0 && c == 50.0
        ));
        match parse_signal("sobolev:s=1.0,seed=7,kmax=100", 0.0, 1.0, 42).unwrap() {
            Signal::Sobolev { s, seed, kmax, .. } => {
                assert_eq!((s, seed, kmax), (1.0, 7, 100));
            }
            other => panic!("wrong kind: {other:?}"),
        }
        // seed defaults to the --seed flag
        match parse_signal("sobolev:s=0.5", 0.0, 1.0, 99).unwrap() {
            Signal::Sobolev { seed, kmax, .. } => {
                assert_eq!(seed, 99);
                assert_eq!(kmax, 1000);
            }
            other => panic!("wrong kind: {other:?}"),
        }
        assert!(parse_signal("sinc", 0.0, 1.0, 42).is_err());
        assert!(parse_signal("warble:x=1", 0.0, 1.0, 42).is_err());
        assert!(parse_signal("sobolev:q=1", 0.0, 1.0, 42).is_err());
    }
}
