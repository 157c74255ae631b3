//! Delimited-text serialization of co-occurrence graphs.
//!
//! The graph-description file is CSV with a one-line header and typed rows:
//! `meta` rows carry the window label and threshold, `node` rows list the
//! node set, `edge` rows the edge list. The plain edge-list format is one
//! `u v` pair per line, lexicographically sorted.

use std::io::{BufRead, Write};

use crate::cooccur::{CoOccurrenceGraph, CoOccurrenceWitness, GraphLabel};
use crate::graph::Graph;
use crate::ids::StudentId;

#[derive(Debug, thiserror::Error)]
pub enum GraphIoError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },
}

/// Parse a window label in its display form (`week:3`, `cumulative:11-15`).
pub fn parse_label(s: &str) -> Option<GraphLabel> {
    let s = s.trim();
    if let Some(w) = s.strip_prefix("week:") {
        return w.parse().ok().map(GraphLabel::Week);
    }
    if let Some(range) = s.strip_prefix("cumulative:") {
        let (from, to) = range.split_once('-')?;
        return Some(GraphLabel::Cumulative {
            from: from.parse().ok()?,
            to: to.parse().ok()?,
        });
    }
    None
}

/// Filesystem-friendly stem for a window label.
pub fn label_file_stem(label: GraphLabel) -> String {
    match label {
        GraphLabel::Week(w) => format!("week_{w:02}"),
        GraphLabel::Cumulative { from, to } => format!("cumulative_{from:02}_{to:02}"),
    }
}

/// Write the structured graph-description file.
pub fn write_graph<W: Write>(cg: &CoOccurrenceGraph, mut w: W) -> std::io::Result<()> {
    writeln!(w, "record,field1,field2")?;
    writeln!(w, "meta,label,{}", cg.label)?;
    writeln!(w, "meta,threshold,{}", cg.threshold)?;
    for node in cg.graph().nodes() {
        writeln!(w, "node,{node},")?;
    }
    for (u, v) in cg.graph().edge_ids() {
        writeln!(w, "edge,{u},{v}")?;
    }
    Ok(())
}

/// Read a graph-description file back.
pub fn read_graph<R: BufRead>(reader: R, source_name: &str) -> Result<CoOccurrenceGraph, GraphIoError> {
    let err = |line: usize, message: String| GraphIoError::Parse {
        source_name: source_name.to_string(),
        line,
        message,
    };
    let mut label: Option<GraphLabel> = None;
    let mut threshold: Option<u64> = None;
    let mut nodes: Vec<StudentId> = Vec::new();
    let mut edges: Vec<(StudentId, StudentId)> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if lineno == 1 {
            if line.trim() != "record,field1,field2" {
                return Err(err(1, "not a graph-description file".to_string()));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.splitn(3, ',').collect();
        if parts.len() != 3 {
            return Err(err(lineno, format!("expected 3 fields, got {}", parts.len())));
        }
        match parts[0] {
            "meta" => match parts[1] {
                "label" => {
                    label = Some(
                        parse_label(parts[2])
                            .ok_or_else(|| err(lineno, format!("bad label {:?}", parts[2])))?,
                    )
                }
                "threshold" => {
                    threshold = Some(
                        parts[2]
                            .trim()
                            .parse()
                            .map_err(|_| err(lineno, format!("bad threshold {:?}", parts[2])))?,
                    )
                }
                other => return Err(err(lineno, format!("unknown meta key {other:?}"))),
            },
            "node" => {
                if parts[1].is_empty() {
                    return Err(err(lineno, "empty node id".to_string()));
                }
                nodes.push(StudentId::from(parts[1]));
            }
            "edge" => {
                if parts[1].is_empty() || parts[2].is_empty() {
                    return Err(err(lineno, "empty edge endpoint".to_string()));
                }
                if parts[1] == parts[2] {
                    return Err(err(lineno, format!("self-loop on {:?}", parts[1])));
                }
                edges.push((StudentId::from(parts[1]), StudentId::from(parts[2])));
            }
            other => return Err(err(lineno, format!("unknown record kind {other:?}"))),
        }
    }
    let label = label.ok_or_else(|| err(0, "missing meta,label row".to_string()))?;
    let threshold = threshold.ok_or_else(|| err(0, "missing meta,threshold row".to_string()))?;
    let graph = Graph::from_edges(edges);
    nodes.sort();
    nodes.dedup();
    if graph.nodes() != nodes.as_slice() {
        return Err(err(
            0,
            "node rows disagree with edge endpoints (isolated nodes are not representable)"
                .to_string(),
        ));
    }
    Ok(CoOccurrenceGraph::new(label, threshold, graph))
}

/// Write the plain edge list, one `u v` pair per line, sorted.
pub fn write_edge_list<W: Write>(g: &Graph, mut w: W) -> std::io::Result<()> {
    for (u, v) in g.edge_ids() {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

/// Write the witness audit table.
pub fn write_witnesses<W: Write>(
    witnesses: &[CoOccurrenceWitness],
    mut w: W,
) -> std::io::Result<()> {
    writeln!(w, "u,v,location,day,t_u,t_v,delta_t")?;
    for x in witnesses {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            x.u,
            x.v,
            x.location,
            x.day,
            x.t_u,
            x.t_v,
            x.delta_t()
        )?;
    }
    Ok(())
}
