use std::path::PathBuf;

use clap::Args;
use serde_json::{json, Value};
use topoplan::graph::{NodeId, Position};
use topoplan::Graph;

use super::load_graph;
use crate::failure::{CliResult, Failure};
use crate::stamp::{check_output, read_input, to_json, write_output, Stamp};
use crate::Context;

#[derive(Args, Debug)]
pub struct ExportArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Plan file whose walk is added as a line feature.
    #[arg(long)]
    plan: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

fn coords(p: &Position) -> Value {
    match *p {
        Position::Planar { x, y } => json!([x, y]),
        Position::Geodetic { lat, lon } => json!([lon, lat]),
    }
}

/// GeoJSON of positioned nodes, edges between them and an optional walk.
/// Planar frames are written as-is; geodetic positions as `[lon, lat]`.
pub fn geojson(g: &Graph, walk: Option<&[NodeId]>, stamp: &Stamp) -> Value {
    let pos = |id: NodeId| g.node(id).and_then(|n| n.position.as_ref());
    let mut features = Vec::new();
    for n in g.nodes() {
        if let Some(p) = &n.position {
            features.push(json!({
                "type": "Feature",
                "geometry": { "type": "Point", "coordinates": coords(p) },
                "properties": { "kind": "node", "id": n.id, "timestamp": n.timestamp, "trajectory": n.trajectory_id },
            }));
        }
    }
    for e in g.edges() {
        if let (Some(a), Some(b)) = (pos(e.src), pos(e.dst)) {
            features.push(json!({
                "type": "Feature",
                "geometry": { "type": "LineString", "coordinates": [coords(a), coords(b)] },
                "properties": { "kind": "edge", "src": e.src, "dst": e.dst, "distance": e.distance, "provenance": e.provenance.as_str() },
            }));
        }
    }
    if let Some(w) = walk {
        let line: Vec<Value> = w.iter().filter_map(|&id| pos(id)).map(coords).collect();
        features.push(json!({
            "type": "Feature",
            "geometry": { "type": "LineString", "coordinates": line },
            "properties": { "kind": "walk", "nodes": w },
        }));
    }
    json!({ "type": "FeatureCollection", "features": features, "stamp": stamp })
}

pub fn run(_ctx: &Context, a: ExportArgs) -> CliResult {
    check_output(&a.out)?;
    let mut stamp = Stamp::new("export");
    let graph = load_graph(&mut stamp, &a.graph)?;
    let walk: Option<Vec<NodeId>> = match &a.plan {
        Some(p) => {
            let text = read_input(&mut stamp, "plan", p)?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?;
            let walk =
                serde_json::from_value(v["walk"].clone()).map_err(|e| Failure::input(format!("{}: walk: {e}", p.display())))?;
            Some(walk)
        }
        None => None,
    };
    write_output(&a.out, &to_json(&geojson(&graph, walk.as_deref(), &stamp)))?;
    println!("exported {} nodes, {} edges", graph.node_count(), graph.edge_count());
    Ok(())
}
