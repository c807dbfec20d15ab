//! Textual function specifications.
//!
//! A specification is a base family followed by zero or more modifiers,
//! joined with `|`:
//!
//! ```text
//! power:q=<float>
//! powerlog:q=<float>,r=<float>
//! spline:<path to CSV with columns t,M2>
//! ```
//!
//! with modifiers `|normalize`, `|extend:T=<float>`, `|smooth:c=<float>`.
//! Parse errors carry the byte offset of the offending token inside the
//! specification string.

use std::fs;

use crate::error::{OrliczError, Result};
use crate::function::OrliczFunction;
use crate::smooth::approx_smooth_kink;

/// Parses a function specification like `power:q=1.5|normalize|smooth:c=1.1`.
///
/// The `smooth` modifier rescales the smoothed function so the normalization
/// integral of the input is preserved: a normalized function stays
/// normalized through smoothing, which is what the generation pipelines
/// downstream require. The kink position and the flat second derivative at
/// the kink survive the rescale.
pub fn parse_function(spec: &str) -> Result<OrliczFunction<f64>> {
    let mut segments = split_segments(spec).into_iter();
    let (off, base) = segments.next().expect("split always yields one segment");
    let mut m = parse_base(off, base)?;
    for (off, modifier) in segments {
        m = apply_modifier(m, off, modifier)?;
    }
    Ok(m)
}

fn split_segments(spec: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, b) in spec.bytes().enumerate() {
        if b == b'|' {
            out.push((start, &spec[start..i]));
            start = i + 1;
        }
    }
    out.push((start, &spec[start..]));
    out
}

fn parse_base(off: usize, seg: &str) -> Result<OrliczFunction<f64>> {
    let (head, rest, rest_off) = match seg.find(':') {
        Some(i) => (&seg[..i], &seg[i + 1..], off + i + 1),
        None => (seg, "", off + seg.len()),
    };
    match head {
        "power" => {
            let [q] = parse_named_floats(rest_off, rest, &["q"])?;
            OrliczFunction::power(q)
        }
        "powerlog" => {
            let [q, r] = parse_named_floats(rest_off, rest, &["q", "r"])?;
            OrliczFunction::power_log(q, r)
        }
        "spline" => {
            if rest.is_empty() {
                return Err(OrliczError::Parse {
                    offset: rest_off,
                    message: "expected a CSV path after 'spline:'".into(),
                });
            }
            load_spline(rest_off, rest)
        }
        other => Err(OrliczError::Parse {
            offset: off,
            message: format!(
                "unknown function family '{other}'; expected power, powerlog, or spline"
            ),
        }),
    }
}

fn apply_modifier(
    m: OrliczFunction<f64>,
    off: usize,
    seg: &str,
) -> Result<OrliczFunction<f64>> {
    let (head, rest, rest_off) = match seg.find(':') {
        Some(i) => (&seg[..i], &seg[i + 1..], off + i + 1),
        None => (seg, "", off + seg.len()),
    };
    match head {
        "normalize" => {
            expect_no_args(rest_off, rest, "normalize")?;
            m.normalize()
        }
        "extend" => {
            let [t] = parse_named_floats(rest_off, rest, &["T"])?;
            m.linear_extension(t)
        }
        "smooth" => {
            let [c] = parse_named_floats(rest_off, rest, &["c"])?;
            let target = m.normalization_integral();
            let (n, _delta) = approx_smooth_kink(&m, c)?;
            n.scaled(target / n.normalization_integral())
        }
        other => Err(OrliczError::Parse {
            offset: off,
            message: format!(
                "unknown modifier '{other}'; expected normalize, extend, or smooth"
            ),
        }),
    }
}

fn expect_no_args(off: usize, rest: &str, name: &str) -> Result<()> {
    if rest.is_empty() {
        Ok(())
    } else {
        Err(OrliczError::Parse {
            offset: off,
            message: format!("'{name}' takes no arguments"),
        })
    }
}

/// Parses `k1=v1,k2=v2` with exactly the expected keys in order.
fn parse_named_floats<const N: usize>(
    off: usize,
    text: &str,
    keys: &[&str; N],
) -> Result<[f64; N]> {
    let mut out = [0.0; N];
    let mut pos = off;
    let mut tokens = split_segments_by(text, b',');
    for (i, key) in keys.iter().enumerate() {
        let (tok_off, tok) = match tokens.next() {
            Some((rel, tok)) => (off + rel, tok),
            None => {
                return Err(OrliczError::Parse {
                    offset: pos,
                    message: format!("missing argument '{key}=<float>'"),
                })
            }
        };
        let value = match tok.split_once('=') {
            Some((k, v)) if k == *key => v,
            Some((k, _)) => {
                return Err(OrliczError::Parse {
                    offset: tok_off,
                    message: format!("expected argument '{key}', found '{k}'"),
                })
            }
            None => {
                return Err(OrliczError::Parse {
                    offset: tok_off,
                    message: format!("expected '{key}=<float>', found '{tok}'"),
                })
            }
        };
        let value_off = tok_off + key.len() + 1;
        out[i] = value.parse().map_err(|_| OrliczError::Parse {
            offset: value_off,
            message: format!("cannot parse '{value}' as a number"),
        })?;
        pos = tok_off + tok.len();
    }
    if let Some((rel, tok)) = tokens.next() {
        return Err(OrliczError::Parse {
            offset: off + rel,
            message: format!("unexpected trailing argument '{tok}'"),
        });
    }
    Ok(out)
}

fn split_segments_by(text: &str, sep: u8) -> std::vec::IntoIter<(usize, &str)> {
    let mut cuts = Vec::new();
    if text.is_empty() {
        return cuts.into_iter();
    }
    let mut start = 0;
    for (i, b) in text.bytes().enumerate() {
        if b == sep {
            cuts.push((start, &text[start..i]));
            start = i + 1;
        }
    }
    cuts.push((start, &text[start..]));
    cuts.into_iter()
}

/// Reads a two-column CSV of `(t, M'')` samples; a non-numeric first row is
/// treated as a header, `#` lines and blank lines are skipped.
fn load_spline(off: usize, path: &str) -> Result<OrliczFunction<f64>> {
    let text = fs::read_to_string(path).map_err(|source| OrliczError::Io {
        path: path.to_string(),
        source,
    })?;
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    let mut saw_data = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',');
        let (a, b) = (cols.next().unwrap_or(""), cols.next().unwrap_or(""));
        if cols.next().is_some() {
            return Err(OrliczError::Parse {
                offset: off,
                message: format!("{path} line {}: expected two columns t,M2", lineno + 1),
            });
        }
        match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
            (Ok(t), Ok(v)) => {
                nodes.push(t);
                values.push(v);
                saw_data = true;
            }
            _ if !saw_data => continue, // header row
            _ => {
                return Err(OrliczError::Parse {
                    offset: off,
                    message: format!(
                        "{path} line {}: expected two numeric columns, found '{line}'",
                        lineno + 1
                    ),
                })
            }
        }
    }
    OrliczFunction::from_second_derivative_samples(&nodes, &values)
}
