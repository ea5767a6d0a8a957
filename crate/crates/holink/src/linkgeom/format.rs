//! Text serialization of string links:
//!
//! ```text
//! link v1 m=<m> t0=<t0> t1=<t1>
//! strand 1: (x,y,z); (x,y,z); ...
//! ...
//! ```
//!
//! Coordinates round-trip exactly (printed with 17 significant digits).

use super::geom::V3;
use super::StringLink;
use crate::diagram::ParseError;

pub fn emit_link(l: &StringLink) -> String {
    let mut out = format!("link v1 m={} t0={} t1={}\n", l.m, l.t0, l.t1);
    for (i, pts) in l.strands.iter().enumerate() {
        out.push_str(&format!("strand {}:", i + 1));
        for (k, p) in pts.iter().enumerate() {
            let sep = if k == 0 { " " } else { "; " };
            out.push_str(&format!("{sep}({:.16e},{:.16e},{:.16e})", p[0], p[1], p[2]));
        }
        out.push('\n');
    }
    out
}

fn err(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError { line, col: 1, msg: msg.into() }
}

fn parse_f64(s: &str, line: usize) -> Result<f64, ParseError> {
    s.trim().parse().map_err(|e| err(line, format!("bad number {s:?}: {e}")))
}

fn parse_point(s: &str, line: usize) -> Result<V3, ParseError> {
    let s = s.trim();
    let inner = s
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| err(line, format!("expected (x,y,z), found {s:?}")))?;
    let parts: Vec<&str> = inner.split(',').collect();
    if parts.len() != 3 {
        return Err(err(line, format!("expected 3 coordinates, found {}", parts.len())));
    }
    Ok([
        parse_f64(parts[0], line)?,
        parse_f64(parts[1], line)?,
        parse_f64(parts[2], line)?,
    ])
}

pub fn parse_link(src: &str) -> Result<StringLink, ParseError> {
    let mut lines = src.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (n0, header) = lines.next().ok_or_else(|| err(1, "empty link file"))?;
    let mut m = None;
    let mut t0 = None;
    let mut t1 = None;
    let mut words = header.split_whitespace();
    if words.next() != Some("link") || words.next() != Some("v1") {
        return Err(err(n0 + 1, "expected header 'link v1 m=<m> t0=<t0> t1=<t1>'"));
    }
    for w in words {
        let (key, val) = w
            .split_once('=')
            .ok_or_else(|| err(n0 + 1, format!("bad header field {w:?}")))?;
        match key {
            "m" => {
                m = Some(val.parse::<usize>().map_err(|e| err(n0 + 1, format!("bad m: {e}")))?)
            }
            "t0" => t0 = Some(parse_f64(val, n0 + 1)?),
            "t1" => t1 = Some(parse_f64(val, n0 + 1)?),
            _ => return Err(err(n0 + 1, format!("unknown header field {key:?}"))),
        }
    }
    let m = m.ok_or_else(|| err(n0 + 1, "missing m"))?;
    let t0 = t0.ok_or_else(|| err(n0 + 1, "missing t0"))?;
    let t1 = t1.ok_or_else(|| err(n0 + 1, "missing t1"))?;
    if !(0.0 < t0 && t0 < t1) {
        return Err(err(n0 + 1, "need 0 < t0 < t1"));
    }
    let mut strands: Vec<Vec<V3>> = Vec::new();
    for (n, line) in lines {
        let rest = line
            .trim()
            .strip_prefix("strand")
            .ok_or_else(|| err(n + 1, "expected 'strand <i>: ...'"))?;
        let (idx, pts) = rest
            .split_once(':')
            .ok_or_else(|| err(n + 1, "expected ':' after strand index"))?;
        let idx: usize = idx
            .trim()
            .parse()
            .map_err(|e| err(n + 1, format!("bad strand index: {e}")))?;
        if idx != strands.len() + 1 {
            return Err(err(n + 1, format!("expected strand {}, found {idx}", strands.len() + 1)));
        }
        let mut points = Vec::new();
        for chunk in pts.split(';') {
            points.push(parse_point(chunk, n + 1)?);
        }
        if points.len() < 2 {
            return Err(err(n + 1, "strand needs at least 2 points"));
        }
        strands.push(points);
    }
    if strands.len() != m {
        return Err(err(1, format!("expected {m} strands, found {}", strands.len())));
    }
    let link = StringLink { m, t0, t1, strands };
    link.check_endpoints().map_err(|e| err(1, e.to_string()))?;
    Ok(link)
}
