//! Native ASCII mesh format.
//!
//! ```text
//! mesh2d v1
//! nodes N
//! <index> <x> <y>        (N lines, 17 significant digits)
//! tris M
//! <i> <j> <k>            (M lines)
//! bedges K
//! <i> <j> <TAG>          (K lines, TAG ∈ {DIRICHLET, GAMMA_1, GAMMA_2})
//! ```
//!
//! Indices are 0-based and consecutive. The parser is strict and never
//! panics on malformed input.

use std::io::Write;

use crate::error::{Result, RwgError};
use crate::geometry::SegmentTag;
use crate::mesh::{BoundaryEdge, Mesh};

pub fn write_mesh<W: Write>(w: &mut W, mesh: &Mesh) -> Result<()> {
    writeln!(w, "mesh2d v1")?;
    writeln!(w, "nodes {}", mesh.nodes.len())?;
    for (i, p) in mesh.nodes.iter().enumerate() {
        writeln!(w, "{} {:.16e} {:.16e}", i, p[0], p[1])?;
    }
    writeln!(w, "tris {}", mesh.triangles.len())?;
    for t in &mesh.triangles {
        writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(w, "bedges {}", mesh.boundary_edges.len())?;
    for e in &mesh.boundary_edges {
        writeln!(w, "{} {} {}", e.a, e.b, e.tag.as_str())?;
    }
    Ok(())
}

pub fn mesh_to_string(mesh: &Mesh) -> String {
    let mut buf = Vec::new();
    write_mesh(&mut buf, mesh).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("mesh text is ASCII")
}

/// Parses the `mesh2d v1` format. The resulting mesh records its measured
/// longest edge as `h_max` (the format does not carry build parameters) and
/// `gamma_mesh = 0`.
pub fn parse_mesh(text: &str) -> Result<Mesh> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let err = |line: usize, msg: String| RwgError::Format(format!("line {}: {}", line + 1, msg));

    let (ln, header) = lines.next().ok_or_else(|| RwgError::Format("empty mesh file".into()))?;
    if header.trim() != "mesh2d v1" {
        return Err(err(ln, format!("expected header 'mesh2d v1', got '{}'", header.trim())));
    }

    let parse_count = |tok: Option<(usize, &str)>, key: &str| -> Result<(usize, usize)> {
        let (ln, line) = tok.ok_or_else(|| RwgError::Format(format!("missing '{key}' block")))?;
        let mut it = line.split_whitespace();
        match (it.next(), it.next(), it.next()) {
            (Some(k), Some(n), None) if k == key => {
                let n: usize = n
                    .parse()
                    .map_err(|_| err(ln, format!("invalid {key} count '{n}'")))?;
                Ok((ln, n))
            }
            _ => Err(err(ln, format!("expected '{key} <count>', got '{line}'"))),
        }
    };

    let (_, n_nodes) = parse_count(lines.next(), "nodes")?;
    let mut nodes = Vec::with_capacity(n_nodes.min(1 << 22));
    for want in 0..n_nodes {
        let (ln, line) = lines.next().ok_or_else(|| RwgError::Format(format!("truncated nodes block at entry {want}")))?;
        let mut it = line.split_whitespace();
        let idx: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| err(ln, "bad node index".into()))?;
        if idx != want {
            return Err(err(ln, format!("node index {idx} out of order, expected {want}")));
        }
        let x: f64 = it.next().and_then(|s| s.parse().ok()).ok_or_else(|| err(ln, "bad x coordinate".into()))?;
        let y: f64 = it.next().and_then(|s| s.parse().ok()).ok_or_else(|| err(ln, "bad y coordinate".into()))?;
        if it.next().is_some() {
            return Err(err(ln, "trailing tokens on node line".into()));
        }
        if !x.is_finite() || !y.is_finite() {
            return Err(err(ln, "non-finite coordinate".into()));
        }
        nodes.push([x, y]);
    }

    let (_, n_tris) = parse_count(lines.next(), "tris")?;
    let mut triangles = Vec::with_capacity(n_tris.min(1 << 22));
    for want in 0..n_tris {
        let (ln, line) = lines.next().ok_or_else(|| RwgError::Format(format!("truncated tris block at entry {want}")))?;
        let mut it = line.split_whitespace();
        let mut t = [0usize; 3];
        for slot in t.iter_mut() {
            *slot = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err(ln, "bad triangle index".into()))?;
            if *slot >= nodes.len() {
                return Err(err(ln, format!("triangle references node {} of {}", slot, nodes.len())));
            }
        }
        if it.next().is_some() {
            return Err(err(ln, "trailing tokens on triangle line".into()));
        }
        triangles.push(t);
    }

    let (_, n_bed) = parse_count(lines.next(), "bedges")?;
    let mut boundary_edges = Vec::with_capacity(n_bed.min(1 << 22));
    for want in 0..n_bed {
        let (ln, line) = lines.next().ok_or_else(|| RwgError::Format(format!("truncated bedges block at entry {want}")))?;
        let mut it = line.split_whitespace();
        let a: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(|| err(ln, "bad edge index".into()))?;
        let b: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(|| err(ln, "bad edge index".into()))?;
        let tag = it
            .next()
            .and_then(SegmentTag::parse)
            .ok_or_else(|| err(ln, "bad boundary tag".into()))?;
        if it.next().is_some() {
            return Err(err(ln, "trailing tokens on bedge line".into()));
        }
        if a >= nodes.len() || b >= nodes.len() || a == b {
            return Err(err(ln, "boundary edge indices out of range".into()));
        }
        boundary_edges.push(BoundaryEdge { a, b, tag });
    }

    if let Some((ln, line)) = lines.next() {
        return Err(err(ln, format!("unexpected trailing content '{line}'")));
    }

    let mut h = 0.0f64;
    for t in &triangles {
        for i in 0..3 {
            let p = nodes[t[i]];
            let q = nodes[t[(i + 1) % 3]];
            h = h.max(((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt());
        }
    }
    Ok(Mesh { nodes, triangles, boundary_edges, h_max: h, gamma_mesh: 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_resonator, WaveguideGeometry};
    use crate::mesh::triangulate;
    use proptest::prelude::*;

    #[test]
    fn roundtrip_resonator_mesh() {
        let b = build_resonator(&WaveguideGeometry::default()).unwrap();
        let m = triangulate(&b, 0.1, 0.5).unwrap();
        let text = mesh_to_string(&m);
        let back = parse_mesh(&text).unwrap();
        assert_eq!(m.nodes, back.nodes);
        assert_eq!(m.triangles, back.triangles);
        assert_eq!(m.boundary_edges, back.boundary_edges);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_mesh("").is_err());
        assert!(parse_mesh("mesh2d v2\nnodes 0\ntris 0\nbedges 0\n").is_err());
        assert!(parse_mesh("mesh2d v1\nnodes 1\n0 0.0\ntris 0\nbedges 0\n").is_err());
        assert!(parse_mesh("mesh2d v1\nnodes 1\n0 0.0 nan\ntris 0\nbedges 0\n").is_err());
        assert!(parse_mesh("mesh2d v1\nnodes 2\n0 0 0\n1 1 0\ntris 1\n0 1 5\nbedges 0\n").is_err());
        assert!(parse_mesh("mesh2d v1\nnodes 9999999999\n").is_err());
        assert!(parse_mesh("mesh2d v1\nnodes 0\ntris 0\nbedges 0\nextra\n").is_err());
        // bad tag
        assert!(parse_mesh("mesh2d v1\nnodes 2\n0 0 0\n1 1 0\ntris 0\nbedges 1\n0 1 ROBIN\n").is_err());
    }

    proptest! {
        /// 17-significant-digit output reproduces every f64 coordinate exactly.
        #[test]
        fn coordinates_roundtrip_exactly(xs in proptest::collection::vec(-1e12f64..1e12, 1..20)) {
            let nodes: Vec<[f64; 2]> = xs.iter().map(|&x| [x, -x / 3.0]).collect();
            let mesh = Mesh { nodes: nodes.clone(), triangles: vec![], boundary_edges: vec![], h_max: 1.0, gamma_mesh: 0.0 };
            let text = mesh_to_string(&mesh);
            let back = parse_mesh(&text).unwrap();
            prop_assert_eq!(nodes, back.nodes);
        }
    }
}
