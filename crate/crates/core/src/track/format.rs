//! Line-oriented text format for measured train tracks.
//!
//! ```text
//! surface auto
//! field 1 -3 1 2 3
//! switch 0
//! switch 1
//! branch 0 (0,L) (1,L)
//! branch 1 (0,SR) (1,SR)
//! branch 2 (0,SL) (1,SL)
//! puncture 0
//! weight 0 0 1
//! weight 1 -1 1
//! weight 2 1
//! ```
//!
//! `field` gives the minimal polynomial (coefficients lowest degree first)
//! followed by the endpoints of an isolating interval; without it weights
//! are rational. A `weight` line lists the coefficients of a polynomial in
//! the chosen root. `puncture` refers to regions in the order of
//! [`TrainTrack::regions`]. Blank lines and `#` comments are ignored.
//! Serialization writes exactly this layout, so parse and serialize are
//! mutually inverse on serializer output.

use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use super::{Port, Slot, TrainTrack};
use crate::algebra::{
    format_rational, parse_rational, AlgebraicNumber, IntPolynomial, NumberField, RatPolynomial,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn perr(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceHeader {
    Auto,
    Explicit { genus: i64, punctures: i64 },
}

/// Contents of a track file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackFile {
    pub surface: SurfaceHeader,
    pub track: TrainTrack,
    pub measure: Option<Vec<AlgebraicNumber>>,
}

impl TrackFile {
    pub fn field(&self) -> Option<&Arc<NumberField>> {
        self.measure
            .as_ref()
            .and_then(|m| m.first())
            .map(|w| w.field())
    }
}

fn parse_port(tok: &str, line: usize) -> Result<Port, ParseError> {
    let inner = tok
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| perr(line, format!("expected (switch,slot), got {:?}", tok)))?;
    let (sw, slot) = inner
        .split_once(',')
        .ok_or_else(|| perr(line, format!("missing comma in {:?}", tok)))?;
    let switch = sw
        .trim()
        .parse()
        .map_err(|_| perr(line, format!("bad switch id {:?}", sw)))?;
    let slot =
        Slot::parse(slot.trim()).ok_or_else(|| perr(line, format!("bad slot {:?}", slot)))?;
    Ok(Port { switch, slot })
}

fn parse_id(tok: Option<&str>, line: usize, what: &str) -> Result<usize, ParseError> {
    let t = tok.ok_or_else(|| perr(line, format!("missing {}", what)))?;
    t.parse()
        .map_err(|_| perr(line, format!("bad {} {:?}", what, t)))
}

pub fn parse_track(text: &str) -> Result<TrackFile, ParseError> {
    let mut surface = None;
    let mut field: Option<Arc<NumberField>> = None;
    let mut switches: Vec<usize> = Vec::new();
    let mut branches: Vec<(usize, [Port; 2], usize)> = Vec::new();
    let mut punctures: Vec<(usize, usize)> = Vec::new();
    let mut weights: Vec<(usize, RatPolynomial, usize)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut toks = body.split_whitespace();
        let kw = toks.next().unwrap();
        match kw {
            "surface" => {
                let rest: Vec<&str> = toks.collect();
                surface = Some(match rest.as_slice() {
                    ["auto"] => SurfaceHeader::Auto,
                    [g, n] => {
                        let genus = g.strip_prefix("g=").and_then(|v| v.parse().ok());
                        let punctures = n.strip_prefix("n=").and_then(|v| v.parse().ok());
                        match (genus, punctures) {
                            (Some(genus), Some(punctures)) => {
                                SurfaceHeader::Explicit { genus, punctures }
                            }
                            _ => {
                                return Err(perr(
                                    ln,
                                    "expected `surface auto` or `surface g=<g> n=<n>`",
                                ))
                            }
                        }
                    }
                    _ => return Err(perr(ln, "expected `surface auto` or `surface g=<g> n=<n>`")),
                });
            }
            "field" => {
                let rest: Vec<&str> = toks.collect();
                if rest.len() < 4 {
                    return Err(perr(ln, "field needs coefficients and an interval"));
                }
                let (coeffs, iv) = rest.split_at(rest.len() - 2);
                let coeffs: Vec<BigInt> = coeffs
                    .iter()
                    .map(|c| {
                        c.parse()
                            .map_err(|_| perr(ln, format!("bad coefficient {:?}", c)))
                    })
                    .collect::<Result<_, _>>()?;
                let lo = parse_rational(iv[0])
                    .ok_or_else(|| perr(ln, format!("bad rational {:?}", iv[0])))?;
                let hi = parse_rational(iv[1])
                    .ok_or_else(|| perr(ln, format!("bad rational {:?}", iv[1])))?;
                let f = NumberField::new(IntPolynomial::new(coeffs), lo, hi)
                    .map_err(|e| perr(ln, e.to_string()))?;
                field = Some(f);
            }
            "switch" => {
                switches.push(parse_id(toks.next(), ln, "switch id")?);
            }
            "branch" => {
                let id = parse_id(toks.next(), ln, "branch id")?;
                let a = parse_port(toks.next().ok_or_else(|| perr(ln, "missing endpoint"))?, ln)?;
                let b = parse_port(toks.next().ok_or_else(|| perr(ln, "missing endpoint"))?, ln)?;
                branches.push((id, [a, b], ln));
            }
            "puncture" => {
                punctures.push((parse_id(toks.next(), ln, "region index")?, ln));
            }
            "weight" => {
                let id = parse_id(toks.next(), ln, "branch id")?;
                let coeffs = toks
                    .map(|c| {
                        parse_rational(c).ok_or_else(|| perr(ln, format!("bad rational {:?}", c)))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if coeffs.is_empty() {
                    return Err(perr(ln, "weight needs coefficients"));
                }
                weights.push((id, RatPolynomial::new(coeffs), ln));
            }
            other => return Err(perr(ln, format!("unknown keyword {:?}", other))),
        }
        if kw != "surface" && surface.is_none() {
            return Err(perr(ln, "file must start with a `surface` header"));
        }
    }
    let last = text.lines().count().max(1);
    let surface = surface.ok_or_else(|| perr(last, "missing `surface` header"))?;

    let mut sorted = switches.clone();
    sorted.sort_unstable();
    if sorted.iter().enumerate().any(|(i, &s)| i != s) {
        return Err(perr(
            last,
            "switch ids must be 0..v without gaps or repeats",
        ));
    }
    let mut ports = vec![None; branches.len()];
    for (id, p, ln) in &branches {
        if *id >= branches.len() || ports[*id].is_some() {
            return Err(perr(
                *ln,
                format!(
                    "branch ids must be 0..e without gaps or repeats (got {})",
                    id
                ),
            ));
        }
        ports[*id] = Some(*p);
    }
    let ports: Vec<[Port; 2]> = ports.into_iter().map(|p| p.unwrap()).collect();
    let mut track =
        TrainTrack::from_branches(switches.len(), &ports).map_err(|e| perr(last, e.to_string()))?;
    for (r, ln) in punctures {
        track.puncture(r).map_err(|e| perr(ln, e.to_string()))?;
    }

    let measure = if weights.is_empty() {
        None
    } else {
        let f = field.unwrap_or_else(NumberField::rationals);
        let mut m = vec![None; track.num_branches()];
        for (id, p, ln) in weights {
            if id >= m.len() || m[id].is_some() {
                return Err(perr(
                    ln,
                    format!("bad or repeated weight for branch {}", id),
                ));
            }
            m[id] = Some(AlgebraicNumber::from_poly(&f, p));
        }
        let mut out = Vec::with_capacity(m.len());
        for (b, w) in m.into_iter().enumerate() {
            out.push(w.ok_or_else(|| perr(last, format!("branch {} has no weight", b)))?);
        }
        Some(out)
    };
    Ok(TrackFile {
        surface,
        track,
        measure,
    })
}

pub fn serialize_track(file: &TrackFile) -> String {
    let mut s = String::new();
    match file.surface {
        SurfaceHeader::Auto => s.push_str("surface auto\n"),
        SurfaceHeader::Explicit { genus, punctures } => {
            let _ = writeln!(s, "surface g={} n={}", genus, punctures);
        }
    }
    if let Some(f) = file.field() {
        let _ = writeln!(s, "field {}", f.descriptor());
    }
    let t = &file.track;
    for v in 0..t.num_switches() {
        let _ = writeln!(s, "switch {}", v);
    }
    for (b, [p, q]) in t.branch_ports().iter().enumerate() {
        let _ = writeln!(
            s,
            "branch {} ({},{}) ({},{})",
            b, p.switch, p.slot, q.switch, q.slot
        );
    }
    for r in t.punctured_regions() {
        let _ = writeln!(s, "puncture {}", r);
    }
    if let Some(m) = &file.measure {
        for (b, w) in m.iter().enumerate() {
            let coeffs = if w.is_zero() {
                "0".to_string()
            } else {
                w.repr()
                    .coeffs()
                    .iter()
                    .map(format_rational)
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let _ = writeln!(s, "weight {} {}", b, coeffs);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const TORUS: &str = "surface auto
field 1 -3 1 2 3
switch 0
switch 1
branch 0 (0,L) (1,L)
branch 1 (0,SR) (1,SR)
branch 2 (0,SL) (1,SL)
puncture 0
weight 0 0 1
weight 1 -1 1
weight 2 1
";

    #[test]
    fn round_trip_is_exact() {
        let f = parse_track(TORUS).unwrap();
        assert_eq!(serialize_track(&f), TORUS);
        assert_eq!(parse_track(&serialize_track(&f)).unwrap(), f);
        let m = f.measure.as_ref().unwrap();
        assert!(f.track.validate_measure(m).is_ok());
        assert_eq!(f.track.validate().unwrap().genus, 1);
    }

    #[test]
    fn comments_and_rational_weights() {
        let text = "# torus\nsurface g=1 n=1\nswitch 0\nswitch 1\nbranch 0 (0,L) (1,L)\n\
                    branch 1 (0,SR) (1,SR)\nbranch 2 (0,SL) (1,SL)  # small\npuncture 0\n\
                    weight 0 5/2\nweight 1 3/2\nweight 2 1\n";
        let f = parse_track(text).unwrap();
        assert_eq!(
            f.surface,
            SurfaceHeader::Explicit {
                genus: 1,
                punctures: 1
            }
        );
        let out = serialize_track(&f);
        assert!(out.contains("weight 0 5/2\n"));
        assert_eq!(parse_track(&out).unwrap(), f);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_track("surface auto\nswitch 0\nbranch 0 (0,X) (0,L)\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_track("surface auto\nfrobnicate\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_track("switch 0\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_track("surface auto\nswitch 0\nbranch 0 (0,L) (0,SL)\n").unwrap_err();
        assert!(e.message.contains("empty"));
    }
}
