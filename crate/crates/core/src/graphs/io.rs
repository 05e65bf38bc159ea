//! On-disk formats: Matrix Market for single layers, a bundle directory for
//! multilayer graphs, CSV for feature matrices.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{FeatureMatrix, MultilayerGraph};
use crate::linalg::SparseSymMatrix;

/// Writes a layer as `matrix coordinate real symmetric`, lower triangle,
/// 1-indexed.
pub fn save_layer(path: &Path, w: &SparseSymMatrix) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let entries: Vec<(usize, usize, f64)> = w.upper_entries().collect();
    writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(out, "{} {} {}", w.n(), w.n(), entries.len())?;
    for (i, j, v) in entries {
        // stored upper (i <= j); symmetric files carry the lower triangle
        writeln!(out, "{} {} {}", j + 1, i + 1, v)?;
    }
    out.flush()?;
    Ok(())
}

pub fn load_layer(path: &Path) -> Result<SparseSymMatrix> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();

    let header = match lines.next() {
        Some(l) => l?,
        None => return Err(parse_err(1, "empty file")),
    };
    let fields: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" {
        return Err(parse_err(1, "expected a MatrixMarket header"));
    }
    if fields[1] != "matrix" || fields[2] != "coordinate" {
        return Err(parse_err(
            1,
            &format!("unsupported object/format '{} {}'", fields[1], fields[2]),
        ));
    }
    if fields[3] != "real" && fields[3] != "integer" {
        return Err(parse_err(
            1,
            &format!("unsupported field type '{}', expected real", fields[3]),
        ));
    }
    if fields[4] != "symmetric" {
        return Err(parse_err(
            1,
            &format!("layer matrices must be symmetric, got '{}'", fields[4]),
        ));
    }

    let mut size: Option<(usize, usize)> = None;
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        let line_no = idx + 2;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        match size {
            None => {
                if toks.len() != 3 {
                    return Err(parse_err(line_no, "size line must be 'rows cols nnz'"));
                }
                let rows: usize = parse_tok(toks[0], line_no)?;
                let cols: usize = parse_tok(toks[1], line_no)?;
                let nnz: usize = parse_tok(toks[2], line_no)?;
                if rows != cols {
                    return Err(parse_err(line_no, "adjacency matrix must be square"));
                }
                size = Some((rows, nnz));
                edges.reserve(nnz);
            }
            Some((n, nnz)) => {
                if edges.len() == nnz {
                    return Err(parse_err(line_no, "more entries than declared"));
                }
                if toks.len() != 3 {
                    return Err(parse_err(line_no, "entry line must be 'i j value'"));
                }
                let i: usize = parse_tok(toks[0], line_no)?;
                let j: usize = parse_tok(toks[1], line_no)?;
                let v: f64 = parse_tok(toks[2], line_no)?;
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(parse_err(
                        line_no,
                        &format!("index ({i}, {j}) outside 1..={n}"),
                    ));
                }
                let (lo, hi) = if i <= j { (i - 1, j - 1) } else { (j - 1, i - 1) };
                edges.push((lo, hi, v));
            }
        }
    }
    let (n, nnz) = size.ok_or_else(|| parse_err(0, "missing size line"))?;
    if edges.len() != nnz {
        return Err(parse_err(
            0,
            &format!("declared {} entries, found {}", nnz, edges.len()),
        ));
    }
    SparseSymMatrix::from_edges(n, &edges)
}

fn parse_tok<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, &format!("cannot parse '{tok}'")))
}

fn parse_err(line: usize, msg: &str) -> Error {
    Error::Parse {
        line,
        msg: msg.to_string(),
    }
}

#[derive(Serialize, Deserialize)]
struct BundleMeta {
    n: usize,
    #[serde(rename = "T")]
    t: usize,
    ground_truth: Option<Vec<usize>>,
}

/// Writes `layer_000.mtx .. layer_{T-1}.mtx` plus `meta.json` into `dir`.
pub fn save_bundle(dir: &Path, graph: &MultilayerGraph, ground_truth: Option<&[usize]>) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (t, layer) in graph.layers().iter().enumerate() {
        save_layer(&dir.join(format!("layer_{t:03}.mtx")), layer)?;
    }
    let meta = BundleMeta {
        n: graph.n(),
        t: graph.t(),
        ground_truth: ground_truth.map(<[usize]>::to_vec),
    };
    let file = BufWriter::new(File::create(dir.join("meta.json"))?);
    serde_json::to_writer_pretty(file, &meta)?;
    Ok(())
}

pub fn load_bundle(dir: &Path) -> Result<(MultilayerGraph, Option<Vec<usize>>)> {
    let meta_file = File::open(dir.join("meta.json"))?;
    let meta: BundleMeta = serde_json::from_reader(BufReader::new(meta_file))?;
    let mut layers = Vec::with_capacity(meta.t);
    for t in 0..meta.t {
        let layer = load_layer(&dir.join(format!("layer_{t:03}.mtx")))?;
        if layer.n() != meta.n {
            return Err(Error::InvalidParameter(format!(
                "layer {t} has {} vertices, meta.json says {}",
                layer.n(),
                meta.n
            )));
        }
        layers.push(layer);
    }
    if let Some(gt) = &meta.ground_truth {
        if gt.len() != meta.n {
            return Err(Error::InvalidParameter(format!(
                "ground truth has {} labels for {} vertices",
                gt.len(),
                meta.n
            )));
        }
    }
    Ok((MultilayerGraph::new(layers)?, meta.ground_truth))
}

/// Reads a feature matrix from CSV: one header row (ignored), then one row of
/// '.'-decimal numbers per sample.
pub fn load_features_csv(path: &Path) -> Result<FeatureMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record =
            record.map_err(|e| parse_err(idx + 2, &format!("malformed CSV record: {e}")))?;
        let mut row = Vec::with_capacity(record.len());
        for field in record.iter() {
            row.push(
                field
                    .parse::<f64>()
                    .map_err(|_| parse_err(idx + 2, &format!("cannot parse '{field}'")))?,
            );
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "{} contains no data rows",
            path.display()
        )));
    }
    FeatureMatrix::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::MultilayerGraph;

    #[test]
    fn layer_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.mtx");
        let w =
            SparseSymMatrix::from_edges(4, &[(0, 1, 1.0), (1, 2, 2.5), (0, 3, 0.125)]).unwrap();
        save_layer(&path, &w).unwrap();
        let back = load_layer(&path).unwrap();
        assert_eq!(w, back);
    }

    #[test]
    fn general_kind_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.mtx");
        std::fs::write(
            &path,
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 1.0\n",
        )
        .unwrap();
        match load_layer(&path) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 1);
                assert!(msg.contains("symmetric"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn bad_entry_line_is_located() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.mtx");
        std::fs::write(
            &path,
            "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 x 1.0\n",
        )
        .unwrap();
        match load_layer(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn out_of_range_index_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.mtx");
        std::fs::write(
            &path,
            "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 3 1.0\n",
        )
        .unwrap();
        assert!(load_layer(&path).is_err());
    }

    #[test]
    fn entry_count_must_match() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.mtx");
        std::fs::write(
            &path,
            "%%MatrixMarket matrix coordinate real symmetric\n3 3 2\n1 2 1.0\n",
        )
        .unwrap();
        assert!(load_layer(&path).is_err());
    }

    #[test]
    fn bundle_round_trip_with_truth() {
        let dir = tempfile::tempdir().unwrap();
        let a = SparseSymMatrix::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let b = SparseSymMatrix::from_edges(3, &[(0, 2, 2.0), (1, 2, 1.0)]).unwrap();
        let g = MultilayerGraph::new(vec![a, b]).unwrap();
        let labels = vec![0usize, 0, 1];
        save_bundle(dir.path(), &g, Some(&labels)).unwrap();
        let (back, gt) = load_bundle(dir.path()).unwrap();
        assert_eq!(back.t(), 2);
        assert_eq!(back.layers()[0], g.layers()[0]);
        assert_eq!(back.layers()[1], g.layers()[1]);
        assert_eq!(gt.unwrap(), labels);
    }

    #[test]
    fn features_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        std::fs::write(&path, "f1,f2,f3\n1.0,2.0,3.0\n4.5,-1.0,0.25\n").unwrap();
        let f = load_features_csv(&path).unwrap();
        assert_eq!(f.rows(), 2);
        assert_eq!(f.cols(), 3);
        assert_eq!(f.row(1), &[4.5, -1.0, 0.25]);
    }

    #[test]
    fn features_csv_bad_number_is_located() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        std::fs::write(&path, "a,b\n1.0,2.0\n1.0,oops\n").unwrap();
        match load_features_csv(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
