//! Sequential first-fit coloring and coloring checks.

use thiserror::Error;

use crate::graph::{Graph, Vertex};

/// Color value. Colors are positive; 0 marks an uncolored vertex.
pub type Color = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ColoringError {
    #[error("order is not a permutation of 0..{n}: {reason}")]
    NotPermutation { n: usize, reason: String },
    #[error("coloring is incomplete: vertex {0} is uncolored")]
    Incomplete(Vertex),
}

/// Vertex-indexed colors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coloring(pub Vec<Color>);

impl Coloring {
    pub fn uncolored(n: usize) -> Self {
        Coloring(vec![0; n])
    }

    pub fn as_slice(&self) -> &[Color] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest color used. Fails if any vertex is uncolored; 0 for an empty
    /// graph.
    pub fn num_colors(&self) -> Result<Color, ColoringError> {
        if let Some(v) = self.0.iter().position(|&c| c == 0) {
            return Err(ColoringError::Incomplete(v as Vertex));
        }
        Ok(self.0.iter().copied().max().unwrap_or(0))
    }
}

impl std::ops::Index<Vertex> for Coloring {
    type Output = Color;

    fn index(&self, v: Vertex) -> &Color {
        &self.0[v as usize]
    }
}

/// Scratch array of forbidden colors, labeled by the vertex being colored.
///
/// `marks[c] == v` means color `c` is taken by some neighbor of `v`. Entries
/// left over from earlier vertices carry other labels and so read as free,
/// which is why the array is never cleared between vertices.
#[derive(Clone, Debug)]
pub struct ForbiddenMarks {
    marks: Vec<Vertex>,
}

impl ForbiddenMarks {
    /// Sized `max_degree + 2` so a free color always exists at index
    /// `max_degree + 1` or below. `sentinel` must not be a vertex id.
    pub fn new(max_degree: usize, sentinel: Vertex) -> Self {
        ForbiddenMarks {
            marks: vec![sentinel; max_degree + 2],
        }
    }

    pub fn for_graph(g: &Graph) -> Self {
        Self::new(g.max_degree(), g.num_vertices() as Vertex)
    }

    #[inline]
    pub fn forbid(&mut self, color: Color, v: Vertex) {
        self.marks[color as usize] = v;
    }

    pub fn capacity(&self) -> usize {
        self.marks.len()
    }

    /// Smallest color `c > 0` not marked for `v`.
    #[inline]
    pub fn first_permissible(&self, v: Vertex) -> Color {
        let mut c = 1;
        while self.marks[c] == v {
            c += 1;
        }
        c as Color
    }

    /// Marks the colors of all of `v`'s neighbors, then picks the first free
    /// color. Uncolored neighbors mark the unused slot 0.
    #[inline]
    pub(crate) fn choose<F: Fn(Vertex) -> Color>(&mut self, adj: &[Vertex], v: Vertex, color_of: F) -> Color {
        for &w in adj {
            self.forbid(color_of(w), v);
        }
        self.first_permissible(v)
    }
}

fn check_permutation(n: usize, order: &[Vertex]) -> Result<(), ColoringError> {
    let fail = |reason: String| Err(ColoringError::NotPermutation { n, reason });
    if order.len() != n {
        return fail(format!("length {} != {n}", order.len()));
    }
    let mut seen = vec![false; n];
    for &v in order {
        match seen.get_mut(v as usize) {
            None => return fail(format!("vertex {v} out of range")),
            Some(true) => return fail(format!("vertex {v} repeated")),
            Some(s) => *s = true,
        }
    }
    Ok(())
}

/// First-fit coloring visiting vertices in `order`. Runs in O(n + m).
pub fn greedy_color(g: &Graph, order: &[Vertex]) -> Result<Coloring, ColoringError> {
    check_permutation(g.num_vertices(), order)?;
    Ok(greedy_in_order(g, order.iter().copied()))
}

/// First-fit coloring in increasing vertex order.
pub fn greedy_color_natural(g: &Graph) -> Coloring {
    greedy_in_order(g, g.vertices())
}

fn greedy_in_order(g: &Graph, order: impl Iterator<Item = Vertex>) -> Coloring {
    let mut colors = vec![0 as Color; g.num_vertices()];
    let mut marks = ForbiddenMarks::for_graph(g);
    for v in order {
        let c = marks.choose(g.neighbors(v), v, |w| colors[w as usize]);
        colors[v as usize] = c;
    }
    Coloring(colors)
}

/// Problems found by [`verify_coloring`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Violations {
    /// Edges `(v, w)`, `v < w`, whose endpoints share a nonzero color.
    pub conflicts: Vec<(Vertex, Vertex)>,
    pub uncolored: Vec<Vertex>,
}

impl Violations {
    pub fn is_empty(&self) -> bool {
        self.conflicts.is_empty() && self.uncolored.is_empty()
    }
}

/// Empty result iff `c` is a complete proper coloring of `g`.
pub fn verify_coloring(g: &Graph, c: &Coloring) -> Violations {
    assert_eq!(c.len(), g.num_vertices(), "coloring length must match vertex count");
    let mut out = Violations::default();
    for v in g.vertices() {
        if c[v] == 0 {
            out.uncolored.push(v);
        }
    }
    out.conflicts = g.edges().filter(|&(u, v)| c[u] != 0 && c[u] == c[v]).collect();
    out
}
