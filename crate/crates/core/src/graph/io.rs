//! Text format `sepprof-graph` version 1.
//!
//! ```text
//! #sepprof-graph 1 <vertex_count> <max_degree> <label>
//! I <id>            one line per interior vertex
//! E <u> <v>         one line per edge, u < v
//! ```
//!
//! Optional trailing lines carry generator metadata: `A <ambient_degree>`,
//! `O <origin>` and `X <id> <c_1> ... <c_d>` (lattice coordinates).

use std::fmt::Write as _;

use super::{Graph, GraphError, VertexId};

pub const MAGIC: &str = "#sepprof-graph";
pub const VERSION: u32 = 1;

/// Canonical serialization; equal graphs give byte-identical output.
pub fn write_graph(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "{MAGIC} {VERSION} {} {} {}", g.vertex_count(), g.max_degree(), g.label()).unwrap();
    for v in g.vertices() {
        if g.is_interior(v) {
            writeln!(out, "I {v}").unwrap();
        }
    }
    for (u, v) in g.edges() {
        writeln!(out, "E {u} {v}").unwrap();
    }
    if let Some(a) = g.ambient_degree() {
        writeln!(out, "A {a}").unwrap();
    }
    if let Some(o) = g.origin() {
        writeln!(out, "O {o}").unwrap();
    }
    if g.coord_dim() > 0 {
        for v in g.vertices() {
            out.push_str("X ");
            out.push_str(&v.to_string());
            for c in g.coords(v).unwrap() {
                out.push(' ');
                out.push_str(&c.to_string());
            }
            out.push('\n');
        }
    }
    out
}

fn perr(line: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Parse { line, msg: msg.into() }
}

fn num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, GraphError> {
    tok.ok_or_else(|| perr(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| perr(line, format!("bad {what}")))
}

pub fn read_graph(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| perr(1, "empty input"))?;
    let mut toks = header.splitn(5, ' ');
    if toks.next() != Some(MAGIC) {
        return Err(perr(1, "missing #sepprof-graph header"));
    }
    let version: u32 = num(toks.next(), 1, "version")?;
    if version != VERSION {
        return Err(perr(1, format!("unsupported version {version}")));
    }
    let n: usize = num(toks.next(), 1, "vertex count")?;
    let max_degree: usize = num(toks.next(), 1, "max degree")?;
    let label = toks.next().unwrap_or("").to_string();

    let mut interior = vec![false; n];
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    let mut ambient = None;
    let mut origin = None;
    let mut coords: Vec<Option<Vec<i64>>> = Vec::new();
    let mut dim = None;
    let check = |v: usize, line: usize| -> Result<VertexId, GraphError> {
        if v >= n {
            Err(perr(line, format!("vertex {v} out of range")))
        } else {
            Ok(v as VertexId)
        }
    };
    for (ln, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut t = line.split_ascii_whitespace();
        match t.next() {
            Some("I") => {
                let v = check(num(t.next(), ln, "vertex")?, ln)?;
                if interior[v as usize] {
                    return Err(perr(ln, format!("vertex {v} marked interior twice")));
                }
                interior[v as usize] = true;
            }
            Some("E") => {
                let u = check(num(t.next(), ln, "endpoint")?, ln)?;
                let v = check(num(t.next(), ln, "endpoint")?, ln)?;
                if u >= v {
                    return Err(perr(ln, format!("edge {u} {v} must satisfy u < v")));
                }
                edges.push((u, v));
            }
            Some("A") => ambient = Some(num::<usize>(t.next(), ln, "ambient degree")?),
            Some("O") => origin = Some(check(num(t.next(), ln, "origin")?, ln)?),
            Some("X") => {
                let v = check(num(t.next(), ln, "vertex")?, ln)?;
                let c: Vec<i64> = t.map(|s| s.parse().map_err(|_| perr(ln, "bad coordinate"))).collect::<Result<_, _>>()?;
                if *dim.get_or_insert(c.len()) != c.len() {
                    return Err(perr(ln, "inconsistent coordinate dimension"));
                }
                if coords.is_empty() {
                    coords = vec![None; n];
                }
                coords[v as usize] = Some(c);
            }
            Some(tag) => return Err(perr(ln, format!("unknown record '{tag}'"))),
            None => {}
        }
        if !line.starts_with('X') && line.split_ascii_whitespace().count() > if line.starts_with('E') { 3 } else { 2 } {
            return Err(perr(ln, "trailing tokens"));
        }
    }
    let mut g = Graph::new(n, &edges, max_degree, interior, label)?;
    if let Some(a) = ambient {
        g = g.with_ambient_degree(a)?;
    }
    if let Some(o) = origin {
        g = g.with_origin(o)?;
    }
    if let Some(d) = dim {
        let mut flat = Vec::with_capacity(n * d);
        for (v, c) in coords.into_iter().enumerate() {
            flat.extend(c.ok_or_else(|| perr(0, format!("missing coordinates for vertex {v}")))?);
        }
        g = g.with_coords(d, flat)?;
    }
    Ok(g)
}
