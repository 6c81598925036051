//! Immutable undirected simple graphs in compressed adjacency form.
//!
//! Vertices are dense ids `0..n`. Every graph remembers the original id of
//! each vertex; original ids are strictly increasing in dense-id order, so
//! sorting by dense id and sorting by original id agree. Induced subgraphs
//! keep that property because relabeling preserves relative order.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use rayon::prelude::*;

use crate::error::GraphError;

pub type VertexId = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
    orig_ids: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub max_degree: usize,
    /// `degree_histogram[d]` is the number of vertices of degree `d`.
    pub degree_histogram: Option<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct ParseOptions {
    /// Lines whose first non-blank characters match this prefix are skipped.
    pub comment_prefix: String,
    /// Input ids start at 1; they are shifted down so original ids start at 0.
    pub one_based: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            comment_prefix: "#".to_string(),
            one_based: false,
        }
    }
}

impl Graph {
    /// Builds a graph from an edge list over arbitrary ids.
    ///
    /// Self-loops are dropped, duplicate and reversed pairs collapse into
    /// one undirected edge, and ids that touch no remaining edge disappear.
    /// Dense ids follow ascending original id.
    pub fn from_edges<I>(edges: I) -> Result<Graph, GraphError>
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        let mut pairs: Vec<(u64, u64)> = edges
            .into_iter()
            .filter(|(u, v)| u != v)
            .map(|(u, v)| if u < v { (u, v) } else { (v, u) })
            .collect();
        if pairs.is_empty() {
            return Err(GraphError::Empty);
        }
        pairs.par_sort_unstable();
        pairs.dedup();

        let mut ids: Vec<u64> = pairs.iter().flat_map(|&(u, v)| [u, v]).collect();
        ids.par_sort_unstable();
        ids.dedup();
        if ids.len() > VertexId::MAX as usize {
            return Err(GraphError::Parse {
                line: 0,
                msg: format!("{} vertices exceed the 32-bit id space", ids.len()),
            });
        }
        let dense = |x: u64| ids.binary_search(&x).expect("id collected above") as VertexId;
        let dense_pairs: Vec<(VertexId, VertexId)> =
            pairs.par_iter().map(|&(u, v)| (dense(u), dense(v))).collect();
        Ok(Graph::from_sorted_unique_pairs(ids.len(), &dense_pairs, ids))
    }

    /// `pairs` must be sorted, deduplicated, with `u < v < n`.
    fn from_sorted_unique_pairs(n: usize, pairs: &[(VertexId, VertexId)], orig_ids: Vec<u64>) -> Graph {
        let mut degree = vec![0usize; n];
        for &(u, v) in pairs {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut acc = 0;
        for d in &degree {
            acc += d;
            offsets.push(acc);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut neighbors = vec![0 as VertexId; acc];
        // Pairs are sorted by (u, v): each list receives its smaller
        // neighbours (as the `v` side) before its larger ones, in order.
        for &(u, v) in pairs {
            neighbors[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        for &(u, v) in pairs {
            neighbors[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
        }
        debug_assert!((0..n).all(|v| {
            let s = &neighbors[offsets[v]..offsets[v + 1]];
            s.windows(2).all(|w| w[0] < w[1])
        }));
        Graph {
            offsets,
            neighbors,
            orig_ids,
        }
    }

    /// Rebuilds a graph from raw adjacency arrays, checking every invariant.
    pub fn from_raw_parts(
        offsets: Vec<usize>,
        neighbors: Vec<VertexId>,
        orig_ids: Vec<u64>,
    ) -> Result<Graph, String> {
        let n = orig_ids.len();
        if offsets.len() != n + 1 || offsets[0] != 0 || offsets[n] != neighbors.len() {
            return Err("offset array does not match vertex count".into());
        }
        if offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err("offsets are not monotone".into());
        }
        if orig_ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err("original ids are not strictly increasing".into());
        }
        let g = Graph {
            offsets,
            neighbors,
            orig_ids,
        };
        for v in 0..n as VertexId {
            let adj = g.neighbors(v);
            if adj.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("neighbour list of {v} is not strictly sorted"));
            }
            for &u in adj {
                if u as usize >= n || u == v {
                    return Err(format!("bad neighbour {u} of {v}"));
                }
                if g.neighbors(u).binary_search(&v).is_err() {
                    return Err(format!("edge {v}-{u} is not symmetric"));
                }
            }
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.orig_ids.len()
    }

    pub fn m(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.orig_ids.is_empty()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.neighbors[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn orig_id(&self, v: VertexId) -> u64 {
        self.orig_ids[v as usize]
    }

    pub fn orig_ids(&self) -> &[u64] {
        &self.orig_ids
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn adjacency(&self) -> &[VertexId] {
        &self.neighbors
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.n() as VertexId
    }

    pub fn max_degree(&self) -> usize {
        self.offsets
            .windows(2)
            .map(|w| w[1] - w[0])
            .max()
            .unwrap_or(0)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Each undirected edge once as `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats {
            n: self.n(),
            m: self.m(),
            max_degree: self.max_degree(),
            degree_histogram: None,
        }
    }

    pub fn stats_with_histogram(&self) -> GraphStats {
        let mut hist = vec![0usize; self.max_degree() + 1];
        for v in self.vertices() {
            hist[self.degree(v)] += 1;
        }
        GraphStats {
            degree_histogram: Some(hist),
            ..self.stats()
        }
    }

    /// Subgraph induced by the vertices with `keep[v] == true`.
    pub fn induced_subgraph(&self, keep: &[bool]) -> Graph {
        self.induced_subgraph_with_map(keep).0
    }

    /// Like [`Graph::induced_subgraph`], also returning for every new vertex
    /// its dense id in `self`.
    pub fn induced_subgraph_with_map(&self, keep: &[bool]) -> (Graph, Vec<VertexId>) {
        assert_eq!(keep.len(), self.n(), "mask length must equal vertex count");
        let parent: Vec<VertexId> = self
            .vertices()
            .filter(|&v| keep[v as usize])
            .collect();
        let mut new_id = vec![VertexId::MAX; self.n()];
        for (i, &v) in parent.iter().enumerate() {
            new_id[v as usize] = i as VertexId;
        }

        let lists: Vec<Vec<VertexId>> = parent
            .par_iter()
            .map(|&v| {
                self.neighbors(v)
                    .iter()
                    .filter(|&&u| keep[u as usize])
                    .map(|&u| new_id[u as usize])
                    .collect()
            })
            .collect();
        let mut offsets = Vec::with_capacity(parent.len() + 1);
        offsets.push(0);
        for l in &lists {
            offsets.push(offsets.last().unwrap() + l.len());
        }
        let neighbors = lists.concat();
        let orig_ids = parent.iter().map(|&v| self.orig_ids[v as usize]).collect();
        (
            Graph {
                offsets,
                neighbors,
                orig_ids,
            },
            parent,
        )
    }

    /// Number of edges with both endpoints in `set` (dense ids, any order).
    pub fn induced_edge_count(&self, set: &[VertexId]) -> usize {
        let mut mark = vec![false; self.n()];
        for &v in set {
            mark[v as usize] = true;
        }
        set.par_iter()
            .map(|&v| {
                self.neighbors(v)
                    .iter()
                    .filter(|&&u| u > v && mark[u as usize])
                    .count()
            })
            .sum()
    }

    /// Writes one `u v` line per edge using original ids, `u < v`, ascending.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(w, "{} {}", self.orig_id(u), self.orig_id(v))?;
        }
        w.flush()
    }
}

/// Parses a whitespace-separated edge list.
///
/// Only the first two tokens of a line are read, so SNAP files that carry an
/// extra attribute column (such as AS relationship codes) load unchanged.
pub fn parse_edge_list<R: BufRead>(mut reader: R, opts: &ParseOptions) -> Result<Graph, GraphError> {
    let mut pairs = Vec::new();
    let mut line = String::new();
    let mut lineno = 0usize;
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            break;
        }
        lineno += 1;
        let body = line.trim_start();
        if body.is_empty() || (!opts.comment_prefix.is_empty() && body.starts_with(&opts.comment_prefix)) {
            continue;
        }
        let mut tokens = body.split_ascii_whitespace();
        let mut next_id = || -> Result<u64, GraphError> {
            let tok = tokens.next().ok_or_else(|| GraphError::Parse {
                line: lineno,
                msg: "expected two vertex ids".into(),
            })?;
            let id: u64 = tok.parse().map_err(|_| GraphError::Parse {
                line: lineno,
                msg: format!("malformed vertex id {tok:?}"),
            })?;
            if opts.one_based {
                id.checked_sub(1).ok_or_else(|| GraphError::Parse {
                    line: lineno,
                    msg: "id 0 in one-based input".into(),
                })
            } else {
                Ok(id)
            }
        };
        let u = next_id()?;
        let v = next_id()?;
        pairs.push((u, v));
    }
    Graph::from_edges(pairs)
}

/// Opens a text edge list, transparently decompressing gzip input.
pub fn read_edge_list_file(path: &Path, opts: &ParseOptions) -> Result<Graph, GraphError> {
    let mut file = BufReader::new(File::open(path)?);
    let gz = file.fill_buf()?.starts_with(&[0x1f, 0x8b]);
    if gz {
        parse_edge_list(BufReader::new(GzDecoder::new(file)), opts)
    } else {
        parse_edge_list(file, opts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Graph, GraphError> {
        parse_edge_list(s.as_bytes(), &ParseOptions::default())
    }

    #[test]
    fn triangle() {
        let g = parse("0 1\n1 2\n2 0\n").unwrap();
        assert_eq!((g.n(), g.m()), (3, 3));
        assert!(g.vertices().all(|v| g.degree(v) == 2));
    }

    #[test]
    fn cleanup_rules() {
        let g = parse("0 1\n1 0\n3 3\n").unwrap();
        assert_eq!((g.n(), g.m()), (2, 1));
        assert_eq!(g.orig_ids(), &[0, 1]);
    }

    #[test]
    fn comments_blank_lines_and_extra_columns() {
        let g = parse("# header\n\n  # indented comment\n10 20 -1\n20\t30 2\n").unwrap();
        assert_eq!(g.orig_ids(), &[10, 20, 30]);
        assert_eq!(g.m(), 2);
        let g = parse_edge_list(
            "% mm\n1 2\n".as_bytes(),
            &ParseOptions {
                comment_prefix: "%".into(),
                one_based: true,
            },
        )
        .unwrap();
        assert_eq!(g.orig_ids(), &[0, 1]);
    }

    #[test]
    fn malformed_tokens_report_line() {
        match parse("0 1\n1 x\n") {
            Err(GraphError::Parse { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match parse("0 1\n\n7\n") {
            Err(GraphError::Parse { line: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("-1 2\n"), Err(GraphError::Parse { line: 1, .. })));
    }

    #[test]
    fn empty_after_cleanup() {
        assert!(matches!(parse("# nothing\n"), Err(GraphError::Empty)));
        assert!(matches!(parse("4 4\n5 5\n"), Err(GraphError::Empty)));
    }

    #[test]
    fn dense_ids_follow_original_order() {
        let g = parse("900 5\n5 70\n").unwrap();
        assert_eq!(g.orig_ids(), &[5, 70, 900]);
        assert_eq!(g.neighbors(0), &[1, 2]);
    }

    #[test]
    fn induced_subgraphs() {
        let tri = parse("0 1\n1 2\n2 0\n").unwrap();
        let e = tri.induced_subgraph(&[true, true, false]);
        assert_eq!((e.n(), e.m()), (2, 1));

        let k4 = Graph::from_edges([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(k4.induced_subgraph(&[true; 4]), k4);

        let tp = parse("0 1\n1 2\n2 0\n2 3\n").unwrap();
        let (t, parent) = tp.induced_subgraph_with_map(&[true, true, true, false]);
        assert_eq!((t.n(), t.m()), (3, 3));
        assert_eq!(parent, vec![0, 1, 2]);

        let none = tp.induced_subgraph(&[false; 4]);
        assert_eq!((none.n(), none.m()), (0, 0));
    }

    #[test]
    fn induced_subgraph_composes_original_ids() {
        let g = parse("10 20\n20 30\n30 40\n40 10\n").unwrap();
        let h = g.induced_subgraph(&[false, true, true, true]);
        assert_eq!(h.orig_ids(), &[20, 30, 40]);
        let k = h.induced_subgraph(&[false, true, true]);
        assert_eq!(k.orig_ids(), &[30, 40]);
        assert_eq!(k.m(), 1);
    }

    #[test]
    fn stats_examples() {
        let k4 = Graph::from_edges([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let s = k4.stats();
        assert_eq!((s.n, s.m, s.max_degree), (4, 6, 3));
        let star = Graph::from_edges((1..=5).map(|i| (0, i))).unwrap();
        let s = star.stats_with_histogram();
        assert_eq!((s.n, s.m, s.max_degree), (6, 5, 5));
        assert_eq!(s.degree_histogram.unwrap(), vec![0, 5, 0, 0, 0, 1]);
    }

    #[test]
    fn writer_is_canonical() {
        let g = parse("3 1\n1 2\n2 3\n1 3\n").unwrap();
        let mut out = Vec::new();
        g.write_edge_list(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "1 2\n1 3\n2 3\n");
    }

    #[test]
    fn raw_parts_are_validated() {
        let g = parse("0 1\n1 2\n").unwrap();
        let ok = Graph::from_raw_parts(g.offsets.clone(), g.neighbors.clone(), g.orig_ids.clone());
        assert_eq!(ok.unwrap(), g);
        assert!(Graph::from_raw_parts(vec![0, 1, 1, 2], vec![1, 1], vec![0, 1, 2]).is_err());
        assert!(Graph::from_raw_parts(vec![0, 1, 2], vec![1, 0], vec![1, 0]).is_err());
    }
}
