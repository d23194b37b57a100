//! Plain-text hull dump.
//!
//! ```text
//! hull <dim> <vertex_count> <facet_count>
//! v <input_index> <x_1> ... <x_dim>
//! f <input_index_1> ... <input_index_dim>
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Reals use the
//! shortest round-trip representation, so a dump re-reads exactly. Facet
//! normals, offsets and measures are recomputed from the vertices.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::hull::{Facet, Hull, MAX_DIM};
use super::linalg::{cross_normal, dot, factorial};
use crate::error::{Error, Result};

pub fn write_hull_dump(h: &Hull) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "hull {} {} {}",
        h.dim(),
        h.vertex_indices().len(),
        h.facets().len()
    );
    for (&i, v) in h.vertex_indices().iter().zip(h.vertices()) {
        let _ = write!(s, "v {i}");
        for x in v {
            let _ = write!(s, " {x:?}");
        }
        s.push('\n');
    }
    for f in h.facets() {
        s.push('f');
        for i in &f.vertex_indices {
            let _ = write!(s, " {i}");
        }
        s.push('\n');
    }
    s
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_hull_dump(text: &str) -> Result<Hull> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or_else(|| parse_err(0, "empty hull dump"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "hull" {
        return Err(parse_err(hline, "expected `hull <dim> <vertices> <facets>`"));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| parse_err(hline, format!("bad count `{s}`")));
    let (dim, nv, nf) = (num(fields[1])?, num(fields[2])?, num(fields[3])?);
    if dim == 0 || dim > MAX_DIM {
        return Err(parse_err(hline, format!("dimension {dim} outside 1..={MAX_DIM}")));
    }
    if nv < dim + 1 || nf < dim + 1 {
        return Err(parse_err(hline, "too few vertices or facets for a full-dimensional hull"));
    }

    let mut indices = Vec::new();
    let mut coords = Vec::new();
    let mut facet_lists = Vec::new();
    for (ln, line) in lines {
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                if !facet_lists.is_empty() {
                    return Err(parse_err(ln, "vertex after facets"));
                }
                if indices.len() == nv {
                    return Err(parse_err(ln, "more vertices than declared"));
                }
                let idx = parts
                    .next()
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| parse_err(ln, "bad vertex index"))?;
                let xs: Vec<f64> = parts
                    .map(|s| s.parse::<f64>().map_err(|_| parse_err(ln, format!("bad real `{s}`"))))
                    .collect::<Result<_>>()?;
                if xs.len() != dim || xs.iter().any(|x| !x.is_finite()) {
                    return Err(parse_err(ln, format!("vertex needs {dim} finite coordinates")));
                }
                indices.push(idx);
                coords.extend(xs);
            }
            Some("f") => {
                if facet_lists.len() == nf {
                    return Err(parse_err(ln, "more facets than declared"));
                }
                let ids: Vec<usize> = parts
                    .map(|s| s.parse::<usize>().map_err(|_| parse_err(ln, format!("bad index `{s}`"))))
                    .collect::<Result<_>>()?;
                if ids.len() != dim {
                    return Err(parse_err(ln, format!("facet needs {dim} vertex indices")));
                }
                facet_lists.push((ln, ids));
            }
            _ => return Err(parse_err(ln, "expected a `v` or `f` record")),
        }
    }
    if indices.len() != nv || facet_lists.len() != nf {
        return Err(parse_err(hline, "record counts differ from the header"));
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(parse_err(hline, "vertex indices must be strictly ascending"));
    }
    let position: HashMap<usize, usize> = indices.iter().enumerate().map(|(p, &i)| (i, p)).collect();
    let centroid: Vec<f64> = (0..dim)
        .map(|c| coords.iter().skip(c).step_by(dim).sum::<f64>() / nv as f64)
        .collect();
    let scale = coords.iter().fold(0.0f64, |m, x| m.max(x.abs()));

    let mut facets = Vec::with_capacity(nf);
    for (ln, ids) in facet_lists {
        let pts: Vec<&[f64]> = ids
            .iter()
            .map(|i| {
                position
                    .get(i)
                    .map(|&p| &coords[p * dim..(p + 1) * dim])
                    .ok_or_else(|| parse_err(ln, format!("facet references unknown vertex {i}")))
            })
            .collect::<Result<_>>()?;
        let mut normal = vec![0.0; dim];
        let measure = if dim == 1 {
            normal[0] = if pts[0][0] >= centroid[0] { 1.0 } else { -1.0 };
            1.0
        } else {
            cross_normal(&pts, &mut normal);
            let len = dot(&normal, &normal).sqrt();
            if !(len > 1e-300) || !len.is_finite() {
                return Err(parse_err(ln, "degenerate facet"));
            }
            normal.iter_mut().for_each(|x| *x /= len);
            len / factorial(dim - 1)
        };
        let mut offset = dot(&normal, pts[0]);
        if dim > 1 && dot(&normal, &centroid) > offset {
            normal.iter_mut().for_each(|x| *x = -*x);
            offset = -offset;
        }
        if dot(&normal, &centroid) >= offset - 1e-12 * (1.0 + scale) {
            return Err(parse_err(ln, "facet passes through the vertex centroid"));
        }
        facets.push(Facet {
            vertex_indices: ids,
            normal,
            offset,
            measure,
        });
    }
    Ok(Hull::from_parts(dim, indices, coords, facets))
}
