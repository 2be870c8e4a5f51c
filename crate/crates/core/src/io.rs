//! Text formats at the boundary: graph JSON, Graphviz DOT, sample CSV, and
//! JSON output with 17 significant digits.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};
use serde_json::Value;

use crate::classes::GraphClassReport;
use crate::error::{Error, Result};
use crate::gaussian::{Provenance, SampleMatrix};
use crate::graph::{EdgeKind, MixedGraph};

#[derive(Debug, Serialize, Deserialize)]
struct GraphJson {
    nodes: Vec<String>,
    edges: Vec<EdgeJson>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeJson {
    u: String,
    v: String,
    #[serde(rename = "type")]
    kind: String,
}

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

/// Reads `{"nodes": [...], "edges": [{"u", "v", "type"}]}`. A directed
/// edge points from `u` to `v`.
pub fn graph_from_json(text: &str) -> Result<MixedGraph> {
    let raw: GraphJson = serde_json::from_str(text).map_err(parse_err)?;
    let edges = raw
        .edges
        .into_iter()
        .map(|e| {
            let kind = EdgeKind::from_symbol(&e.kind).ok_or_else(|| Error::Parse(format!("unknown edge type `{}`", e.kind)))?;
            Ok((e.u, e.v, kind))
        })
        .collect::<Result<Vec<_>>>()?;
    MixedGraph::build(&raw.nodes, &edges)
}

fn graph_json(g: &MixedGraph) -> GraphJson {
    GraphJson {
        nodes: g.labels().to_vec(),
        edges: g.labelled_edges().into_iter().map(|(u, v, k)| EdgeJson { u, v, kind: k.symbol().to_string() }).collect(),
    }
}

pub fn graph_value(g: &MixedGraph) -> Value {
    serde_json::to_value(graph_json(g)).expect("graph JSON is serialisable")
}

pub fn graph_to_json(g: &MixedGraph) -> String {
    to_json(&graph_json(g))
}

fn quote(label: &str) -> String {
    format!("\"{}\"", label.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz digraph. Undirected edges carry no arrowheads and bidirected
/// edges carry one at each end.
pub fn to_dot(g: &MixedGraph) -> String {
    let mut out = String::from("digraph G {\n");
    for l in g.labels() {
        out.push_str(&format!("  {};\n", quote(l)));
    }
    for (u, v, k) in g.labelled_edges() {
        let style = match k {
            EdgeKind::Directed => "",
            EdgeKind::Undirected => " [dir=none]",
            EdgeKind::Bidirected => " [dir=both]",
        };
        out.push_str(&format!("  {} -> {}{};\n", quote(&u), quote(&v), style));
    }
    out.push_str("}\n");
    out
}

/// A float with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty JSON whose floats carry 17 significant digits.
struct Digits17<'a>(PrettyFormatter<'a>);

impl Formatter for Digits17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_f64(value).as_bytes())
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, Digits17(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("serialisation into memory");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Header of labels, then one record per row.
pub fn samples_to_csv(s: &SampleMatrix) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&s.labels).expect("write to memory");
    for r in 0..s.n() {
        w.write_record(s.data.row(r).iter().map(|&x| format_f64(x))).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("CSV is UTF-8")
}

pub fn samples_from_csv(text: &str, provenance: Provenance) -> Result<SampleMatrix> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let labels: Vec<String> = r.headers().map_err(parse_err)?.iter().map(str::to_string).collect();
    let mut values = Vec::new();
    let mut rows = 0;
    for rec in r.records() {
        let rec = rec.map_err(parse_err)?;
        for field in rec.iter() {
            values.push(field.trim().parse::<f64>().map_err(|_| Error::Parse(format!("row {}: `{field}` is not a number", rows + 1)))?);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::TooFewSamples { n: 0, k: 0 });
    }
    Ok(SampleMatrix { data: nalgebra::DMatrix::from_row_slice(rows, labels.len(), &values), labels, provenance })
}

/// The class report with node ids in witnesses replaced by labels.
pub fn class_report_value(g: &MixedGraph, report: &GraphClassReport) -> Value {
    let mut v = serde_json::to_value(report).expect("report is serialisable");
    let label = |x: &Value| x.as_u64().map(|i| Value::String(g.label(i as usize).to_string())).unwrap_or(Value::Null);
    if let Some(Value::Object(ws)) = v.get_mut("witnesses") {
        for w in ws.values_mut().filter_map(Value::as_object_mut) {
            for (key, field) in w.iter_mut() {
                match (key.as_str(), &*field) {
                    ("nodes" | "path", Value::Array(ids)) => *field = Value::Array(ids.iter().map(label).collect()),
                    ("a" | "b" | "c" | "node", _) => *field = label(field),
                    _ => {}
                }
            }
        }
    }
    v
}
