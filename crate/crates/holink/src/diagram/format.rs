//! Text format for diagrams: one record per diagram,
//!
//! ```text
//! diagram v1 { m=3 parity=odd seg=[[a],[b],[c]] free=[u]
//!              edges=[mixed(a,u,a->u), mixed(b,u,b->u), mixed(c,u,c->u)] }
//! ```
//!
//! `seg` lists per-segment vertex names in position order, `free` the free
//! vertex names.  Edges are written `kind(x,y)` with an optional third field:
//! the orientation `x->y` for odd-parity edges, or a `+1`/`-1` flag for
//! odd-parity loops.  The emitter produces systematic names (`s1p1`, `u1`,
//! ...); the parser accepts arbitrary identifiers.  Malformed input is
//! rejected with line/column diagnostics.

use super::{Edge, EdgeKind, LinkDiagram, Parity};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

struct Scanner<'a> {
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Scanner<'a> {
    fn new(src: &'a str) -> Self {
        Scanner { src, chars: src.chars().collect(), pos: 0, line: 1, col: 1 }
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError { line: self.line, col: self.col, msg: msg.into() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn expect(&mut self, want: char) -> Result<(), ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.err(format!("expected '{want}', found '{c}'"))),
            None => Err(self.err(format!("expected '{want}', found end of input"))),
        }
    }

    fn eat(&mut self, want: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(want) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let mut s = String::new();
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            Some(c) => return Err(self.err(format!("expected identifier, found '{c}'"))),
            None => return Err(self.err("expected identifier, found end of input")),
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        Ok(s)
    }

    fn keyword(&mut self, want: &str) -> Result<(), ParseError> {
        let got = self.ident()?;
        if got == want {
            Ok(())
        } else {
            Err(self.err(format!("expected '{want}', found '{got}'")))
        }
    }

    fn integer(&mut self) -> Result<usize, ParseError> {
        self.skip_ws();
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if s.is_empty() {
            return Err(self.err("expected integer"));
        }
        s.parse().map_err(|_| self.err("integer out of range"))
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.peek().is_none()
    }
}

fn edge_kind_name(k: EdgeKind) -> &'static str {
    match k {
        EdgeKind::Chord => "chord",
        EdgeKind::Mixed => "mixed",
        EdgeKind::Free => "free",
        EdgeKind::Loop => "loop",
    }
}

/// Systematic vertex name used by the emitter.
fn vertex_name(d: &LinkDiagram, v: usize) -> String {
    if d.is_free_vertex(v) {
        format!("u{}", v - d.n_seg() + 1)
    } else {
        let j = d.segment_of(v).expect("segment vertex");
        let p = v - d.segment_vertices(j).start + 1;
        format!("s{}p{}", j + 1, p)
    }
}

/// Emit the single-line record for a diagram.
pub fn emit_diagram(d: &LinkDiagram) -> String {
    let mut out = format!("diagram v1 {{ m={} parity={} seg=[", d.m, d.parity);
    for j in 0..d.m {
        if j > 0 {
            out.push(',');
        }
        out.push('[');
        for (i, v) in d.segment_vertices(j).enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&vertex_name(d, v));
        }
        out.push(']');
    }
    out.push_str("] free=[");
    for (i, v) in d.free_vertices().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&vertex_name(d, v));
    }
    out.push_str("] edges=[");
    for (i, e) in d.edges.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let kind = d.edge_kind(e);
        let (a, b) = (vertex_name(d, e.lo), vertex_name(d, e.hi));
        out.push_str(&format!("{}({},{}", edge_kind_name(kind), a, b));
        if d.parity == Parity::Odd {
            if e.is_loop() {
                out.push_str(if e.dec >= 0 { ",+1" } else { ",-1" });
            } else if e.dec >= 0 {
                out.push_str(&format!(",{}->{}", a, b));
            } else {
                out.push_str(&format!(",{}->{}", b, a));
            }
        }
        out.push(')');
    }
    out.push_str("] }");
    out
}

fn parse_name_list(s: &mut Scanner) -> Result<Vec<String>, ParseError> {
    let mut names = Vec::new();
    s.expect('[')?;
    if s.eat(']') {
        return Ok(names);
    }
    loop {
        names.push(s.ident()?);
        if s.eat(']') {
            return Ok(names);
        }
        s.expect(',')?;
    }
}

fn parse_record(s: &mut Scanner) -> Result<LinkDiagram, ParseError> {
    s.keyword("diagram")?;
    s.keyword("v1")?;
    s.expect('{')?;

    s.keyword("m")?;
    s.expect('=')?;
    let m = s.integer()?;
    if m == 0 {
        return Err(s.err("m must be positive"));
    }

    s.keyword("parity")?;
    s.expect('=')?;
    let parity = match s.ident()?.as_str() {
        "odd" => Parity::Odd,
        "even" => Parity::Even,
        other => return Err(s.err(format!("parity must be 'odd' or 'even', found '{other}'"))),
    };

    s.keyword("seg")?;
    s.expect('=')?;
    s.expect('[')?;
    let mut seg_names: Vec<Vec<String>> = Vec::new();
    if !s.eat(']') {
        loop {
            seg_names.push(parse_name_list(s)?);
            if s.eat(']') {
                break;
            }
            s.expect(',')?;
        }
    }
    if seg_names.len() != m {
        return Err(s.err(format!("seg lists {} segments, m={}", seg_names.len(), m)));
    }

    s.keyword("free")?;
    s.expect('=')?;
    let free_names = parse_name_list(s)?;

    // Assign dense ids: segment vertices in order, then free vertices.
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut next = 0usize;
    for seg in &seg_names {
        for name in seg {
            if ids.insert(name.clone(), next).is_some() {
                return Err(s.err(format!("duplicate vertex name '{name}'")));
            }
            next += 1;
        }
    }
    let n_seg = next;
    for name in &free_names {
        if ids.insert(name.clone(), next).is_some() {
            return Err(s.err(format!("duplicate vertex name '{name}'")));
        }
        next += 1;
    }

    s.keyword("edges")?;
    s.expect('=')?;
    s.expect('[')?;
    let mut edges = Vec::new();
    if !s.eat(']') {
        loop {
            let kind_name = s.ident()?;
            let kind = match kind_name.as_str() {
                "chord" => EdgeKind::Chord,
                "mixed" => EdgeKind::Mixed,
                "free" => EdgeKind::Free,
                "loop" => EdgeKind::Loop,
                other => return Err(s.err(format!("unknown edge kind '{other}'"))),
            };
            s.expect('(')?;
            let a = s.ident()?;
            s.expect(',')?;
            let b = s.ident()?;
            let &va = ids
                .get(&a)
                .ok_or_else(|| s.err(format!("unknown vertex '{a}'")))?;
            let &vb = ids
                .get(&b)
                .ok_or_else(|| s.err(format!("unknown vertex '{b}'")))?;
            let mut dec: i8 = 0;
            if s.eat(',') {
                s.skip_ws();
                match s.peek() {
                    Some('+') | Some('-') => {
                        let sgn = s.bump().unwrap();
                        let one = s.integer()?;
                        if one != 1 {
                            return Err(s.err("loop flag must be +1 or -1"));
                        }
                        if kind != EdgeKind::Loop {
                            return Err(s.err("numeric flag only allowed on loop edges"));
                        }
                        if parity == Parity::Even {
                            return Err(s.err("even-parity loops carry no flag"));
                        }
                        dec = if sgn == '+' { 1 } else { -1 };
                    }
                    _ => {
                        let x = s.ident()?;
                        s.expect('-')?;
                        s.expect('>')?;
                        let y = s.ident()?;
                        if x == a && y == b {
                            dec = 1;
                        } else if x == b && y == a {
                            dec = -1;
                        } else {
                            return Err(
                                s.err(format!("orientation '{x}->{y}' does not match ({a},{b})"))
                            );
                        }
                        if va == vb {
                            return Err(s.err("loop edges take a +1/-1 flag, not an orientation"));
                        }
                    }
                }
            }
            s.expect(')')?;
            match parity {
                Parity::Odd => {
                    if dec == 0 {
                        return Err(s.err(format!(
                            "odd parity requires an orientation or loop flag on {kind_name}({a},{b})"
                        )));
                    }
                }
                Parity::Even => {
                    if dec != 0 && va != vb {
                        return Err(s.err("even parity edges carry no orientation"));
                    }
                }
            }
            let edge = Edge::new(va, vb, dec);
            edges.push((kind, edge, s.line, s.col));
            if s.eat(']') {
                break;
            }
            s.expect(',')?;
        }
    }
    s.expect('}')?;

    let seg_counts: Vec<usize> = seg_names.iter().map(|v| v.len()).collect();
    let d = LinkDiagram { m, parity, seg_counts, n_free: free_names.len(), edges: Vec::new() };
    let mut final_edges = Vec::with_capacity(edges.len());
    for (kind, e, line, col) in edges {
        let _ = n_seg;
        let actual = d.edge_kind(&e);
        if actual != kind {
            return Err(ParseError {
                line,
                col,
                msg: format!(
                    "edge declared '{}' but endpoints make it '{}'",
                    edge_kind_name(kind),
                    edge_kind_name(actual)
                ),
            });
        }
        final_edges.push(e);
    }
    let d = LinkDiagram { edges: final_edges, ..d };
    let problems = d.validate();
    if !problems.is_empty() {
        return Err(s.err(format!("invalid diagram: {}", problems.join("; "))));
    }
    Ok(d)
}

/// Parse exactly one diagram record, rejecting trailing input.
pub fn parse_diagram(src: &str) -> Result<LinkDiagram, ParseError> {
    let mut s = Scanner::new(src);
    let d = parse_record(&mut s)?;
    if !s.at_end() {
        return Err(s.err("trailing input after diagram record"));
    }
    let _ = s.src;
    Ok(d)
}

/// Parse a sequence of diagram records separated by whitespace/comments.
pub fn parse_diagrams(src: &str) -> Result<Vec<LinkDiagram>, ParseError> {
    let mut s = Scanner::new(src);
    let mut out = Vec::new();
    while !s.at_end() {
        out.push(parse_record(&mut s)?);
    }
    Ok(out)
}

impl fmt::Display for LinkDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&emit_diagram(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{chord_diagram, tripod_diagram};

    #[test]
    fn round_trip_tripod() {
        let t = tripod_diagram(3, Parity::Odd, [1, 2, 3]);
        let text = emit_diagram(&t);
        let back = parse_diagram(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(emit_diagram(&back), text);
    }

    #[test]
    fn round_trip_even_chord() {
        let c = chord_diagram(3, Parity::Even, 1, 3);
        let back = parse_diagram(&emit_diagram(&c)).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn parses_spec_style_record() {
        let src = "diagram v1 { m=3 parity=odd seg=[[a],[b],[c]] free=[u] \
                   edges=[mixed(a,u,a->u), mixed(b,u,b->u), mixed(c,u,c->u)] }";
        let d = parse_diagram(src).unwrap();
        assert_eq!(d, tripod_diagram(3, Parity::Odd, [1, 2, 3]));
    }

    #[test]
    fn reversed_orientation_parses() {
        let src = "diagram v1 { m=2 parity=odd seg=[[a],[b]] free=[] \
                   edges=[chord(a,b,b->a)] }";
        let d = parse_diagram(src).unwrap();
        assert_eq!(d.edges[0].dec, -1);
    }

    #[test]
    fn loop_flag_parses() {
        let src = "diagram v1 { m=1 parity=odd seg=[[a]] free=[] edges=[loop(a,a,-1)] }";
        let d = parse_diagram(src).unwrap();
        assert!(d.edges[0].is_loop());
        assert_eq!(d.edges[0].dec, -1);
    }

    #[test]
    fn errors_carry_position() {
        let err = parse_diagram("diagram v1 { m=2 parity=maybe").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.msg.contains("parity"));
        let err2 = parse_diagram("diagram v1 {\n m=0 parity=odd").unwrap_err();
        assert_eq!(err2.line, 2);
    }

    #[test]
    fn kind_mismatch_rejected() {
        let src = "diagram v1 { m=2 parity=odd seg=[[a],[b]] free=[] \
                   edges=[mixed(a,b,a->b)] }";
        let err = parse_diagram(src).unwrap_err();
        assert!(err.msg.contains("chord"), "{err}");
    }

    #[test]
    fn multiple_records() {
        let a = tripod_diagram(3, Parity::Odd, [1, 2, 3]);
        let b = chord_diagram(3, Parity::Odd, 1, 2);
        let src = format!("# corpus\n{}\n{}\n", emit_diagram(&a), emit_diagram(&b));
        let ds = parse_diagrams(&src).unwrap();
        assert_eq!(ds, vec![a, b]);
    }
}
