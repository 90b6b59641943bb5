//! Text file formats. Node ids are 0-based; floats are written with six
//! significant digits.
//!
//! | file        | row                         |
//! |-------------|-----------------------------|
//! | edges       | `u\tv\tweight\tkind` (S/D)  |
//! | labels      | `node\tlabel` (+1/-1)       |
//! | labeled set | `node`                      |
//! | features    | `x_1,...,x_d`               |
//! | posteriors  | `node,q1,q2,predicted`      |

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use mixgraph::{build_graph, Class, Distribution, EdgeKind, EdgeSpec, Features, Mixed, NodeId, Sigma};

use crate::error::{CliError, CliResult, Context};

/// `%g`-style formatting with six significant digits.
pub fn fmt_g6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-4..6).contains(&exp) {
        trim_zeros(format!("{x:.*}", (5 - exp) as usize))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `x` rounded to what [`fmt_g6`] prints.
pub fn round6(x: f64) -> f64 {
    fmt_g6(x).parse().unwrap_or(x)
}

pub fn parse_sigma(s: &str) -> Result<Sigma<f64>, String> {
    if s == "auto" {
        return Ok(Sigma::Auto);
    }
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(Sigma::Fixed(v)),
        _ => Err(format!("sigma must be \"auto\" or a positive number, got {s:?}")),
    }
}

pub fn label_text(c: Class) -> &'static str {
    match c {
        Class::One => "+1",
        Class::Two => "-1",
    }
}

fn parse_label(s: &str) -> Option<Class> {
    match s {
        "+1" | "1" => Some(Class::One),
        "-1" => Some(Class::Two),
        _ => None,
    }
}

fn reader(path: &Path, delimiter: u8) -> CliResult<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn writer(path: &Path, delimiter: u8) -> CliResult<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::WriterBuilder::new()
        .delimiter(delimiter)
        .quote_style(csv::QuoteStyle::Never)
        .from_writer(BufWriter::new(file)))
}

/// Iterates non-empty records with their 1-based line numbers.
fn records(path: &Path, delimiter: u8) -> CliResult<Vec<(u64, csv::StringRecord)>> {
    let mut out = Vec::new();
    for record in reader(path, delimiter)?.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::parse(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        out.push((line, record));
    }
    Ok(out)
}

fn expect_fields(path: &Path, line: u64, record: &csv::StringRecord, n: usize) -> CliResult<()> {
    if record.len() != n {
        return Err(CliError::parse(path, line, format!("expected {n} fields, found {}", record.len())));
    }
    Ok(())
}

fn parse_node(path: &Path, line: u64, field: &str, node_count: Option<usize>) -> CliResult<usize> {
    let node: usize = field.parse().map_err(|_| CliError::parse(path, line, format!("invalid node id {field:?}")))?;
    if let Some(n) = node_count {
        if node >= n {
            return Err(CliError::parse(path, line, format!("node {node} out of range for {n} nodes")));
        }
    }
    Ok(node)
}

fn finish<W: Write>(path: &Path, w: csv::Writer<W>) -> CliResult<()> {
    let mut inner = w.into_inner().map_err(|e| CliError::io(path, e.into_error()))?;
    inner.flush().map_err(|e| CliError::io(path, e))
}

/// Reads a labels file. Every node `0..n` must appear exactly once.
pub fn read_labels(path: &Path) -> CliResult<Vec<Class>> {
    let rows = records(path, b'\t')?;
    let n = rows.len();
    let mut labels: Vec<Option<Class>> = vec![None; n];
    for (line, rec) in &rows {
        expect_fields(path, *line, rec, 2)?;
        let node = parse_node(path, *line, &rec[0], Some(n))
            .map_err(|_| CliError::parse(path, *line, format!("node ids must cover 0..{n} exactly once")))?;
        let class = parse_label(&rec[1])
            .ok_or_else(|| CliError::parse(path, *line, format!("label must be +1 or -1, got {:?}", &rec[1])))?;
        if labels[node].replace(class).is_some() {
            return Err(CliError::parse(path, *line, format!("node {node} labeled twice")));
        }
    }
    Ok(labels.into_iter().map(Option::unwrap).collect())
}

pub fn write_labels(path: &Path, labels: &[Class]) -> CliResult<()> {
    let mut w = writer(path, b'\t')?;
    for (i, &c) in labels.iter().enumerate() {
        w.write_record([i.to_string().as_str(), label_text(c)]).map_err(|e| CliError::io(path, e.into()))?;
    }
    finish(path, w)
}

/// Reads a labeled-set file: distinct node ids below `node_count`.
pub fn read_labeled_set(path: &Path, node_count: usize) -> CliResult<Vec<NodeId>> {
    let mut seen = HashSet::new();
    let mut nodes = Vec::new();
    for (line, rec) in records(path, b'\t')? {
        expect_fields(path, line, &rec, 1)?;
        let node = parse_node(path, line, &rec[0], Some(node_count))?;
        if !seen.insert(node) {
            return Err(CliError::parse(path, line, format!("node {node} listed twice")));
        }
        nodes.push(NodeId(node));
    }
    nodes.sort_unstable();
    Ok(nodes)
}

pub fn write_labeled_set(path: &Path, nodes: &[NodeId]) -> CliResult<()> {
    let mut w = writer(path, b'\t')?;
    for n in nodes {
        w.write_record([n.0.to_string()]).map_err(|e| CliError::io(path, e.into()))?;
    }
    finish(path, w)
}

/// Reads an edges file over `node_count` nodes. Either endpoint order is
/// accepted; a pair may appear only once.
pub fn read_edges(path: &Path, node_count: usize) -> CliResult<Mixed> {
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    for (line, rec) in records(path, b'\t')? {
        expect_fields(path, line, &rec, 4)?;
        let u = parse_node(path, line, &rec[0], Some(node_count))?;
        let v = parse_node(path, line, &rec[1], Some(node_count))?;
        if u == v {
            return Err(CliError::parse(path, line, format!("self-loop on node {u}")));
        }
        let weight: f64 = rec[2].parse().ok().filter(|w: &f64| w.is_finite() && *w > 0.0).ok_or_else(|| {
            CliError::parse(path, line, format!("weight must be positive and finite, got {:?}", &rec[2]))
        })?;
        let kind = match &rec[3] {
            "S" => EdgeKind::Similar,
            "D" => EdgeKind::Dissimilar,
            other => return Err(CliError::parse(path, line, format!("edge kind must be S or D, got {other:?}"))),
        };
        let (a, b) = (u.min(v), u.max(v));
        if !seen.insert((a, b)) {
            return Err(CliError::parse(path, line, format!("duplicate edge ({a}, {b})")));
        }
        edges.push(EdgeSpec::new(a, b, weight, kind));
    }
    build_graph(node_count, &edges).context(|| path.display().to_string())
}

/// Writes every edge as `u < v`, sorted by `(u, v)`.
pub fn write_edges(path: &Path, g: &Mixed) -> CliResult<()> {
    let mut w = writer(path, b'\t')?;
    for e in g.tagged_edges() {
        let kind = match e.kind {
            EdgeKind::Similar => "S",
            EdgeKind::Dissimilar => "D",
        };
        w.write_record([e.u.to_string(), e.v.to_string(), fmt_g6(e.weight), kind.to_string()])
            .map_err(|e| CliError::io(path, e.into()))?;
    }
    finish(path, w)
}

pub fn read_features(path: &Path) -> CliResult<Features> {
    let mut rows = Vec::new();
    for (line, rec) in records(path, b',')? {
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| CliError::parse(path, line, "features must be finite numbers"))?;
        if let Some(first) = rows.first() {
            let first: &Vec<f64> = first;
            if row.len() != first.len() {
                return Err(CliError::parse(
                    path,
                    line,
                    format!("expected {} features, found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Invalid(format!("{}: no feature rows", path.display())));
    }
    Features::from_rows(rows).context(|| path.display().to_string())
}

pub fn write_features(path: &Path, x: &Features) -> CliResult<()> {
    let mut w = writer(path, b',')?;
    for i in 0..x.rows() {
        w.write_record(x.row(i).iter().map(|&v| fmt_g6(v))).map_err(|e| CliError::io(path, e.into()))?;
    }
    finish(path, w)
}

pub fn write_posteriors(path: &Path, q: &[Distribution]) -> CliResult<()> {
    let mut w = writer(path, b',')?;
    let io = |e: csv::Error| CliError::io(path, e.into());
    w.write_record(["node", "q1", "q2", "predicted"]).map_err(io)?;
    for (i, d) in q.iter().enumerate() {
        w.write_record([i.to_string(), fmt_g6(d.first()), fmt_g6(d.second()), label_text(d.argmax()).to_string()])
            .map_err(io)?;
    }
    finish(path, w)
}
