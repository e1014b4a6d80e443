//! Line-oriented text encoding of [`TopoGraph`].
//!
//! ```text
//! topo-graph/1
//! frame planar
//! directed true
//! nodes 2
//! node 0 0.0000000000000000e0 1.0000000000000000e0 2.0000000000000000e0 0 "img/0.jpg"
//! node 1 5.0000000000000000e-1 - - 0 -
//! edges 1
//! edge 0 1 4.0000000000000000e0 temporal
//! ```
//!
//! Reals carry 17 significant digits. Nodes are sorted by id, edges by
//! `(src, dst)`. Lines starting with `#` are comments.

use std::fmt::Write as _;
use std::path::Path;

use super::{Edge, Frame, GraphError, NodeId, ObservationNode, Position, Provenance, TopoGraph};
use crate::scalar::{fmt_real, Scalar};

pub const GRAPH_VERSION: &str = "topo-graph/1";

pub fn render_graph<S: Scalar>(g: &TopoGraph<S>) -> String {
    let mut s = String::new();
    writeln!(s, "{GRAPH_VERSION}").unwrap();
    writeln!(s, "frame {}", g.frame().as_str()).unwrap();
    writeln!(s, "directed {}", g.is_directed()).unwrap();
    writeln!(s, "nodes {}", g.node_count()).unwrap();
    for n in g.nodes() {
        let (a, b) = match &n.position {
            Some(p) => {
                let (a, b) = p.coords();
                (fmt_real(a), fmt_real(b))
            }
            None => ("-".into(), "-".into()),
        };
        let image = match &n.image_ref {
            Some(r) => serde_json::to_string(r).expect("string encodes"),
            None => "-".into(),
        };
        writeln!(s, "node {} {} {a} {b} {} {image}", n.id, fmt_real(n.timestamp), n.trajectory_id).unwrap();
    }
    writeln!(s, "edges {}", g.edge_count()).unwrap();
    for e in g.edges() {
        writeln!(s, "edge {} {} {} {}", e.src, e.dst, fmt_real(e.distance.to_f64_lossless()), e.provenance.as_str()).unwrap();
    }
    s
}

pub fn save_graph<S: Scalar>(g: &TopoGraph<S>, path: impl AsRef<Path>) -> Result<(), GraphError> {
    std::fs::write(path, render_graph(g))?;
    Ok(())
}

pub fn load_graph<S: Scalar>(path: impl AsRef<Path>) -> Result<TopoGraph<S>, GraphError> {
    parse_graph(&std::fs::read_to_string(path)?)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next_record(&mut self) -> Option<&'a str> {
        for (i, l) in self.inner.by_ref() {
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            self.line = i + 1;
            return Some(t);
        }
        None
    }

    fn err(&self, msg: impl Into<String>) -> GraphError {
        GraphError::Format { line: self.line, msg: msg.into() }
    }

    fn expect(&mut self, what: &str) -> Result<&'a str, GraphError> {
        self.next_record().ok_or_else(|| GraphError::Format { line: self.line + 1, msg: format!("expected {what}") })
    }

    fn keyed(&mut self, key: &str) -> Result<&'a str, GraphError> {
        let l = self.expect(key)?;
        match l.split_once(' ') {
            Some((k, v)) if k == key => Ok(v.trim()),
            _ => Err(self.err(format!("expected `{key} <value>`, found `{l}`"))),
        }
    }
}

fn real(lines: &Lines, field: &str, v: &str) -> Result<f64, GraphError> {
    let x: f64 = v.parse().map_err(|_| lines.err(format!("{field}: `{v}` is not a real")))?;
    if !x.is_finite() {
        return Err(lines.err(format!("{field} must be finite")));
    }
    Ok(x)
}

fn int<T: std::str::FromStr>(lines: &Lines, field: &str, v: &str) -> Result<T, GraphError> {
    v.parse().map_err(|_| lines.err(format!("{field}: `{v}` is not an integer")))
}

pub fn parse_graph<S: Scalar>(text: &str) -> Result<TopoGraph<S>, GraphError> {
    let mut lines = Lines { inner: text.lines().enumerate(), line: 0 };
    let version = lines.expect("version")?;
    if version != GRAPH_VERSION {
        return Err(lines.err(format!("unsupported version `{version}`, expected `{GRAPH_VERSION}`")));
    }
    let frame = match lines.keyed("frame")? {
        "planar" => Frame::Planar,
        "geodetic" => Frame::Geodetic,
        other => return Err(lines.err(format!("unknown frame `{other}`"))),
    };
    let directed = match lines.keyed("directed")? {
        "true" => true,
        "false" => false,
        other => return Err(lines.err(format!("directed must be true or false, got `{other}`"))),
    };
    let mut g = TopoGraph::new(frame, directed);

    let count: usize = {
        let v = lines.keyed("nodes")?;
        int(&lines, "nodes", v)?
    };
    let mut last: Option<NodeId> = None;
    for _ in 0..count {
        let l = lines.expect("node record")?;
        let mut parts = l.splitn(7, ' ');
        if parts.next() != Some("node") {
            return Err(lines.err(format!("expected node record, found `{l}`")));
        }
        let mut field = |name: &str| parts.next().ok_or_else(|| lines.err(format!("node record missing {name}")));
        let (id, ts, a, b, traj, image) = (
            field("id")?,
            field("timestamp")?,
            field("position")?,
            field("position")?,
            field("trajectory_id")?,
            field("image_ref")?,
        );
        let id: NodeId = int(&lines, "id", id)?;
        if last.is_some_and(|p| p >= id) {
            let msg = if last == Some(id) { format!("duplicate node id {id}") } else { "nodes not sorted by id".into() };
            return Err(lines.err(msg));
        }
        last = Some(id);
        let position = match (a, b) {
            ("-", "-") => None,
            _ => Some(Position::new(frame, real(&lines, "position", a)?, real(&lines, "position", b)?)),
        };
        let image_ref = match image {
            "-" => None,
            s => Some(serde_json::from_str::<String>(s).map_err(|e| lines.err(format!("image_ref: {e}")))?),
        };
        let node = ObservationNode {
            id,
            timestamp: real(&lines, "timestamp", ts)?,
            position,
            image_ref,
            trajectory_id: int(&lines, "trajectory_id", traj)?,
        };
        g.add_node(node).map_err(|e| lines.err(e.to_string()))?;
    }

    let count: usize = {
        let v = lines.keyed("edges")?;
        int(&lines, "edges", v)?
    };
    let mut last: Option<(NodeId, NodeId)> = None;
    for _ in 0..count {
        let l = lines.expect("edge record")?;
        let f: Vec<&str> = l.split(' ').collect();
        if f.len() != 5 || f[0] != "edge" {
            return Err(lines.err(format!("malformed edge record `{l}`")));
        }
        let key = (int(&lines, "src", f[1])?, int(&lines, "dst", f[2])?);
        if last.is_some_and(|p| p >= key) {
            return Err(lines.err("edges not sorted by (src, dst)"));
        }
        last = Some(key);
        let provenance = match f[4] {
            "temporal" => Provenance::Temporal,
            "learned" => Provenance::Learned,
            other => return Err(lines.err(format!("unknown provenance `{other}`"))),
        };
        let distance = S::of(real(&lines, "distance", f[3])?);
        g.add_edge(Edge { src: key.0, dst: key.1, distance, provenance }).map_err(|e| lines.err(e.to_string()))?;
    }
    if let Some(extra) = lines.next_record() {
        return Err(lines.err(format!("unexpected trailing record `{extra}`")));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> TopoGraph<f64> {
        let mut g = TopoGraph::new(Frame::Planar, true);
        g.add_node(ObservationNode {
            id: 3,
            timestamp: 0.1,
            position: Some(Position::Planar { x: 1.0 / 3.0, y: -2.0 }),
            image_ref: Some("imgs/a b \"c\".jpg".into()),
            trajectory_id: 1,
        })
        .unwrap();
        g.add_node(ObservationNode { id: 7, timestamp: 2.0, position: None, image_ref: None, trajectory_id: 2 }).unwrap();
        g.add_edge(Edge { src: 3, dst: 7, distance: 0.7, provenance: Provenance::Learned }).unwrap();
        g.add_edge(Edge { src: 7, dst: 3, distance: 12.0, provenance: Provenance::Temporal }).unwrap();
        g
    }

    #[test]
    fn round_trip() {
        let g = sample();
        let text = render_graph(&g);
        let back: TopoGraph<f64> = parse_graph(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(render_graph(&back), text);
    }

    #[test]
    fn comments_are_ignored() {
        let text = format!("# generated by test\n{}", render_graph(&sample()));
        assert_eq!(parse_graph::<f64>(&text).unwrap(), sample());
    }

    #[test]
    fn duplicate_node_rejected_with_line() {
        let text = "topo-graph/1\nframe planar\ndirected true\nnodes 2\nnode 1 0 0 0 0 -\nnode 1 0 0 0 0 -\nedges 0\n";
        match parse_graph::<f64>(text) {
            Err(GraphError::Format { line: 6, msg }) => assert!(msg.contains("duplicate"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn schema_errors_name_the_line() {
        let cases = [
            ("topo-graph/2\n", 1),
            ("topo-graph/1\nframe mars\n", 2),
            ("topo-graph/1\nframe planar\ndirected true\nnodes 1\nnode x 0 0 0 0 -\n", 5),
            ("topo-graph/1\nframe planar\ndirected true\nnodes 1\nnode 0 0 0 0 0 -\nedges 1\nedge 0 5 1 learned\n", 7),
            ("topo-graph/1\nframe planar\ndirected true\nnodes 1\nnode 0 0 0 0 0 -\nedges 1\nedge 0 0 1 magic\n", 7),
        ];
        for (text, want) in cases {
            match parse_graph::<f64>(text) {
                Err(GraphError::Format { line, .. }) => assert_eq!(line, want, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn f32_graphs_round_trip() {
        let mut g: TopoGraph<f32> = TopoGraph::new(Frame::Planar, false);
        g.add_node(ObservationNode::planar(0, 0.0, 0.0, 0.0, 0)).unwrap();
        g.add_node(ObservationNode::planar(1, 0.0, 0.0, 0.0, 0)).unwrap();
        g.add_edge(Edge { src: 0, dst: 1, distance: 0.1f32, provenance: Provenance::Learned }).unwrap();
        assert_eq!(parse_graph::<f32>(&render_graph(&g)).unwrap(), g);
    }

    proptest! {
        #[test]
        fn random_graphs_round_trip(
            ts in proptest::collection::vec(0.0..1e6f64, 1..12),
            ws in proptest::collection::vec((0usize..12, 0usize..12, 0.0..1e3f64), 0..30),
        ) {
            let mut g = TopoGraph::new(Frame::Geodetic, true);
            for (i, &t) in ts.iter().enumerate() {
                g.add_node(ObservationNode {
                    id: i as u64 * 3,
                    timestamp: t,
                    position: Some(Position::Geodetic { lat: t / 1e5 - 5.0, lon: t.sqrt() }),
                    image_ref: None,
                    trajectory_id: i as u64 % 2,
                }).unwrap();
            }
            for (a, b, w) in ws {
                let (a, b) = ((a % ts.len()) as u64 * 3, (b % ts.len()) as u64 * 3);
                let _ = g.add_edge(Edge { src: a, dst: b, distance: w, provenance: Provenance::Learned });
            }
            let text = render_graph(&g);
            let back: TopoGraph<f64> = parse_graph(&text).unwrap();
            prop_assert_eq!(&back, &g);
            prop_assert_eq!(render_graph(&back), text);
        }
    }
}
