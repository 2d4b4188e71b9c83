//! Graph file formats.
//!
//! Text edge list: a header line `n m`, then `m` lines holding one `u v` pair
//! each (0-based, either orientation). Blank lines are not allowed.
//!
//! Binary CSR, all integers little-endian `u64`:
//!
//! | bytes              | content                       |
//! |--------------------|-------------------------------|
//! | 4                  | magic `CBG1`                  |
//! | 8                  | `n`                           |
//! | 8                  | `m` (undirected edges)        |
//! | 8 * (n + 1)        | offsets                       |
//! | 8 * 2m             | neighbors                     |

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::graph::{Graph, GraphError, Vertex};

pub const BINARY_MAGIC: &[u8; 4] = b"CBG1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    Text,
    Binary,
}

impl GraphFormat {
    /// `.txt`, `.el` and `.edges` are text; anything else is binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("txt" | "el" | "edges") => GraphFormat::Text,
            _ => GraphFormat::Binary,
        }
    }
}

/// Parses a text edge list, returning the raw pairs and the vertex count.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<(Vec<(u64, u64)>, usize), GraphError> {
    let mut lines = reader.lines();
    let header = lines.next().ok_or_else(|| GraphError::Parse {
        line: 1,
        msg: "missing `n m` header".into(),
    })??;
    let (n, m) = parse_pair(&header, 1)?;
    let n = usize::try_from(n).map_err(|_| GraphError::Parse {
        line: 1,
        msg: "n too large".into(),
    })?;

    let mut edges = Vec::with_capacity(m.min(1 << 24) as usize);
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line?;
        if line.trim().is_empty() && edges.len() as u64 == m {
            continue;
        }
        let (u, v) = parse_pair(&line, lineno)?;
        if u >= n as u64 || v >= n as u64 {
            return Err(GraphError::Parse {
                line: lineno,
                msg: format!("edge ({u}, {v}) has an endpoint outside [0, {n})"),
            });
        }
        edges.push((u, v));
    }
    if edges.len() as u64 != m {
        return Err(GraphError::Parse {
            line: edges.len() + 2,
            msg: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    Ok((edges, n))
}

fn parse_pair(line: &str, lineno: usize) -> Result<(u64, u64), GraphError> {
    let err = |msg: String| GraphError::Parse { line: lineno, msg };
    let mut fields = line.split_whitespace();
    let mut next = || -> Result<u64, GraphError> {
        let tok = fields
            .next()
            .ok_or_else(|| err(format!("expected two integers in {line:?}")))?;
        tok.parse().map_err(|_| err(format!("invalid integer {tok:?}")))
    };
    let pair = (next()?, next()?);
    if fields.next().is_some() {
        return Err(err(format!("trailing fields in {line:?}")));
    }
    Ok(pair)
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<(Vec<(u64, u64)>, usize), GraphError> {
    parse_edge_list(BufReader::new(File::open(path)?))
}

pub fn format_edge_list<W: Write>(g: &Graph, mut w: W) -> Result<(), GraphError> {
    writeln!(w, "{} {}", g.num_vertices(), g.num_edges())?;
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    format_edge_list(g, BufWriter::new(File::create(path)?))
}

pub fn encode_binary<W: Write>(g: &Graph, mut w: W) -> Result<(), GraphError> {
    w.write_all(BINARY_MAGIC)?;
    w.write_all(&(g.num_vertices() as u64).to_le_bytes())?;
    w.write_all(&(g.num_edges() as u64).to_le_bytes())?;
    for &o in g.offsets() {
        w.write_all(&(o as u64).to_le_bytes())?;
    }
    for &x in g.neighbor_array() {
        w.write_all(&u64::from(x).to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn decode_binary<R: Read>(mut r: R) -> Result<Graph, GraphError> {
    let mut magic = [0u8; 4];
    read_exact(&mut r, &mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(GraphError::Format(format!("bad magic {magic:?}")));
    }
    let n = read_u64(&mut r)?;
    let m = read_u64(&mut r)?;
    if n > u64::from(Vertex::MAX) {
        return Err(GraphError::Format(format!("vertex count {n} too large")));
    }
    let n = n as usize;
    let half = usize::try_from(m).map_err(|_| GraphError::Format("edge count too large".into()))?;
    let offsets = (0..=n)
        .map(|_| read_u64(&mut r).map(|x| x as usize))
        .collect::<Result<Vec<_>, _>>()?;
    let mut neighbors = Vec::with_capacity(half.saturating_mul(2).min(1 << 28));
    for _ in 0..half.saturating_mul(2) {
        let x = read_u64(&mut r)?;
        if x >= n as u64 {
            return Err(GraphError::Format(format!("neighbor id {x} out of range")));
        }
        neighbors.push(x as Vertex);
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(GraphError::Format("trailing bytes after neighbor array".into()));
    }
    Graph::from_csr(offsets, neighbors).map_err(|e| GraphError::Format(e.to_string()))
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<(), GraphError> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => GraphError::Format("truncated file".into()),
        _ => GraphError::Io(e),
    })
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64, GraphError> {
    let mut b = [0u8; 8];
    read_exact(r, &mut b)?;
    Ok(u64::from_le_bytes(b))
}

pub fn write_binary(g: &Graph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    encode_binary(g, BufWriter::new(File::create(path)?))
}

pub fn read_binary(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
    decode_binary(BufReader::new(File::open(path)?))
}

pub fn write_graph(g: &Graph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    let path = path.as_ref();
    match GraphFormat::from_path(path) {
        GraphFormat::Text => write_edge_list(g, path),
        GraphFormat::Binary => write_binary(g, path),
    }
}

/// Reads either format, detected by the leading magic bytes.
pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
    let mut reader = BufReader::new(File::open(path)?);
    if reader.fill_buf()?.starts_with(BINARY_MAGIC) {
        decode_binary(reader)
    } else {
        let (edges, n) = parse_edge_list(reader)?;
        Graph::from_edges(n, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn text_header_and_pairs() {
        let (edges, n) = parse_edge_list("3 1\n0 1\n".as_bytes()).unwrap();
        assert_eq!(n, 3);
        assert_eq!(edges, vec![(0, 1)]);
    }

    #[test]
    fn out_of_range_reports_line() {
        let err = parse_edge_list("3 1\n0 9\n".as_bytes()).unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn malformed_lines() {
        for (text, line) in [
            ("", 1),
            ("3\n", 1),
            ("3 2\n0 1\nx 2\n", 3),
            ("3 2\n0 1\n", 3),
            ("2 1\n0 1 1\n", 2),
        ] {
            match parse_edge_list(text.as_bytes()) {
                Err(GraphError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let mut buf = Vec::new();
        format_edge_list(&k3(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "3 3\n0 1\n0 2\n1 2\n");
        let (edges, n) = parse_edge_list(buf.as_slice()).unwrap();
        assert_eq!(Graph::from_edges(n, edges).unwrap(), k3());
    }

    #[test]
    fn binary_layout() {
        let g = Graph::from_edges(2, [(1, 0)]).unwrap();
        let mut buf = Vec::new();
        encode_binary(&g, &mut buf).unwrap();
        let mut expected = b"CBG1".to_vec();
        for x in [2u64, 1, 0, 1, 2, 1, 0] {
            expected.extend_from_slice(&x.to_le_bytes());
        }
        assert_eq!(buf, expected);
        assert_eq!(decode_binary(buf.as_slice()).unwrap(), g);
    }

    #[test]
    fn binary_rejects_bad_input() {
        assert!(matches!(
            decode_binary(&b"CBG2xxxxxxxx"[..]),
            Err(GraphError::Format(_))
        ));
        let mut buf = Vec::new();
        encode_binary(&k3(), &mut buf).unwrap();
        assert!(matches!(
            decode_binary(&buf[..buf.len() - 3]),
            Err(GraphError::Format(_))
        ));
        buf.push(0);
        assert!(matches!(decode_binary(buf.as_slice()), Err(GraphError::Format(_))));
    }
}
