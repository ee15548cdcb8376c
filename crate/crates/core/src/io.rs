//! Text file formats and run artifacts.
//!
//! | artifact      | layout                                                        |
//! |---------------|---------------------------------------------------------------|
//! | edge list     | `u v` per line (tab or spaces), `#` comments, optional `N=<n>` |
//! | attributes    | sparse `N d NNZ` header + `i j value` lines, or dense CSV      |
//! | cover         | one community per line, space-separated ascending node ids     |
//! | affiliations  | TSV, N rows x K columns                                        |
//! | checkpoint    | versioned text header followed by W1 and W2                    |
//! | run manifest  | pretty-printed JSON                                            |
//!
//! Every writer goes through [`atomic_write`].

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cover::Cover;
use crate::error::{Error, Result};
use crate::graph::{BuildReport, FeatureMatrix, Graph, InputVariant};
use crate::kernel::DenseMatrix;
use crate::model::{AffiliationMatrix, ModelParams};
use crate::trainer::TrainConfig;

pub const CHECKPOINT_MAGIC: &str = "lqgcn-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Non-blank, non-comment lines with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Writes to a sibling temporary file, syncs it, then renames over `path`.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::invalid(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

// ---------------------------------------------------------------- edges

pub fn parse_edge_list(path: &Path) -> Result<(Graph, BuildReport)> {
    parse_edge_list_str(&read(path)?, path)
}

/// `path` is only used in error messages.
pub fn parse_edge_list_str(text: &str, path: &Path) -> Result<(Graph, BuildReport)> {
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    for (ln, line) in content_lines(text) {
        if let Some(rest) = line.strip_prefix("N=") {
            let n = rest
                .trim()
                .parse()
                .map_err(|_| parse_err(path, ln, format!("bad node-count header {line:?}")))?;
            if declared.replace(n).is_some() {
                return Err(parse_err(path, ln, "repeated N= header"));
            }
            continue;
        }
        let mut tok = line.split_whitespace();
        let (Some(u), Some(v), None) = (tok.next(), tok.next(), tok.next()) else {
            return Err(parse_err(path, ln, format!("expected two node ids, got {line:?}")));
        };
        let id = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| parse_err(path, ln, format!("bad node id {s:?}")))
        };
        let (u, v) = (id(u)?, id(v)?);
        if let Some(n) = declared {
            if u >= n || v >= n {
                return Err(parse_err(path, ln, format!("node id exceeds declared N={n}")));
            }
        }
        edges.push((u, v));
    }
    let inferred = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let n = declared.unwrap_or(inferred);
    if n < inferred {
        return Err(parse_err(path, 0, format!("node id exceeds declared N={n}")));
    }
    Graph::from_edge_list(n, edges)
}

/// Header `N=<n>` followed by each undirected edge once, `u<TAB>v` with `u < v`.
pub fn format_edge_list(g: &Graph) -> String {
    let mut s = format!("N={}\n", g.n_nodes());
    for (u, v) in g.edges() {
        let _ = writeln!(s, "{u}\t{v}");
    }
    s
}

pub fn write_edge_list(path: &Path, g: &Graph) -> Result<()> {
    atomic_write(path, format_edge_list(g).as_bytes())
}

// ----------------------------------------------------------- attributes

pub fn parse_attributes(path: &Path) -> Result<FeatureMatrix> {
    parse_attributes_str(&read(path)?, path)
}

/// Detects the layout from the first content line: a comma means dense CSV,
/// three unsigned integers mean the sparse header.
pub fn parse_attributes_str(text: &str, path: &Path) -> Result<FeatureMatrix> {
    let mut lines = content_lines(text).peekable();
    let Some(&(ln, first)) = lines.peek() else {
        return Err(parse_err(path, 0, "empty attribute file"));
    };
    let tokens: Vec<&str> = first.split_whitespace().collect();
    let sparse_header = tokens.len() == 3 && tokens.iter().all(|t| t.parse::<usize>().is_ok());
    if first.contains(',') || !sparse_header {
        let rows = lines
            .map(|(ln, l)| {
                l.split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| parse_err(path, ln, format!("bad value {t:?}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let m = DenseMatrix::from_rows(&rows).map_err(|e| parse_err(path, ln, e.to_string()))?;
        return FeatureMatrix::new(m).map_err(|e| parse_err(path, ln, e.to_string()));
    }
    lines.next();
    let dims: Vec<usize> = tokens.iter().map(|t| t.parse().unwrap()).collect();
    let (n, d, nnz) = (dims[0], dims[1], dims[2]);
    let mut m = DenseMatrix::zeros(n, d);
    let mut count = 0;
    for (ln, line) in lines {
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 3 {
            return Err(parse_err(path, ln, format!("expected `i j value`, got {line:?}")));
        }
        let i: usize = t[0].parse().map_err(|_| parse_err(path, ln, "bad row index"))?;
        let j: usize = t[1].parse().map_err(|_| parse_err(path, ln, "bad column index"))?;
        let v: f64 = t[2].parse().map_err(|_| parse_err(path, ln, "bad value"))?;
        if i >= n || j >= d {
            return Err(parse_err(path, ln, format!("entry ({i},{j}) outside {n}x{d}")));
        }
        if !v.is_finite() {
            return Err(parse_err(path, ln, "non-finite value"));
        }
        m[(i, j)] = v;
        count += 1;
    }
    if count != nnz {
        return Err(parse_err(path, 0, format!("header declares {nnz} entries, found {count}")));
    }
    FeatureMatrix::new(m)
}

pub fn format_attributes_csv(x: &FeatureMatrix) -> String {
    format_delimited(x.as_dense(), ",")
}

/// Sparse coordinate layout, nonzero entries only.
pub fn format_attributes_sparse(x: &FeatureMatrix) -> String {
    let m = x.as_dense();
    let mut body = String::new();
    let mut nnz = 0;
    for i in 0..m.rows() {
        for (j, &v) in m.row(i).iter().enumerate() {
            if v != 0.0 {
                let _ = writeln!(body, "{i} {j} {v}");
                nnz += 1;
            }
        }
    }
    format!("{} {} {nnz}\n{body}", m.rows(), m.cols())
}

pub fn write_attributes(path: &Path, x: &FeatureMatrix, sparse: bool) -> Result<()> {
    let text = if sparse {
        format_attributes_sparse(x)
    } else {
        format_attributes_csv(x)
    };
    atomic_write(path, text.as_bytes())
}

// --------------------------------------------------------------- covers

/// With `n_nodes = None` the node count is one past the largest id.
pub fn parse_cover(path: &Path, n_nodes: Option<usize>) -> Result<Cover> {
    parse_cover_str(&read(path)?, path, n_nodes)
}

pub fn parse_cover_str(text: &str, path: &Path, n_nodes: Option<usize>) -> Result<Cover> {
    let mut communities = Vec::new();
    for (ln, line) in content_lines(text) {
        let ids = line
            .split_whitespace()
            .map(|t| {
                let id: usize = t.parse().map_err(|_| parse_err(path, ln, format!("bad node id {t:?}")))?;
                match n_nodes {
                    Some(n) if id >= n => Err(parse_err(path, ln, format!("node {id} out of range for N={n}"))),
                    _ => Ok(id),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        communities.push(ids);
    }
    let n = n_nodes.unwrap_or_else(|| {
        communities.iter().flatten().map(|&i| i + 1).max().unwrap_or(0)
    });
    Cover::new(n, communities)
}

/// Empty communities become empty lines, so `K` survives a round trip.
pub fn format_cover(c: &Cover) -> String {
    let mut s = String::new();
    for com in c.communities() {
        let line: Vec<String> = com.iter().map(usize::to_string).collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}

pub fn write_cover(path: &Path, c: &Cover) -> Result<()> {
    atomic_write(path, format_cover(c).as_bytes())
}

// --------------------------------------------------------- affiliations

fn format_delimited(m: &DenseMatrix, sep: &str) -> String {
    let mut s = String::with_capacity(m.rows() * m.cols() * 12);
    for i in 0..m.rows() {
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                s.push_str(sep);
            }
            let _ = write!(s, "{v}");
        }
        s.push('\n');
    }
    s
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_affiliations(f: &AffiliationMatrix) -> String {
    format_delimited(f.as_dense(), "\t")
}

pub fn write_affiliations(path: &Path, f: &AffiliationMatrix) -> Result<()> {
    atomic_write(path, format_affiliations(f).as_bytes())
}

pub fn parse_affiliations(path: &Path) -> Result<AffiliationMatrix> {
    parse_affiliations_str(&read(path)?, path)
}

pub fn parse_affiliations_str(text: &str, path: &Path) -> Result<AffiliationMatrix> {
    let rows = content_lines(text)
        .map(|(ln, l)| {
            l.split('\t')
                .map(|t| t.trim().parse::<f64>().map_err(|_| parse_err(path, ln, format!("bad value {t:?}"))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let m = DenseMatrix::from_rows(&rows).map_err(|e| parse_err(path, 0, e.to_string()))?;
    AffiliationMatrix::new(m)
}

// ----------------------------------------------------------- checkpoint

pub fn format_checkpoint(p: &ModelParams) -> String {
    let mut s = format!("{CHECKPOINT_MAGIC} v{CHECKPOINT_VERSION}\n");
    for (name, m) in [("w1", &p.w1), ("w2", &p.w2)] {
        let _ = writeln!(s, "{name} {} {}", m.rows(), m.cols());
        s.push_str(&format_delimited(m, " "));
    }
    s
}

pub fn write_checkpoint(path: &Path, p: &ModelParams) -> Result<()> {
    atomic_write(path, format_checkpoint(p).as_bytes())
}

pub fn parse_checkpoint(path: &Path) -> Result<ModelParams> {
    parse_checkpoint_str(&read(path)?, path)
}

pub fn parse_checkpoint_str(text: &str, path: &Path) -> Result<ModelParams> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let expected = format!("{CHECKPOINT_MAGIC} v{CHECKPOINT_VERSION}");
    match lines.next() {
        Some((_, h)) if h.trim() == expected => {}
        Some((_, h)) if h.starts_with(CHECKPOINT_MAGIC) => {
            return Err(parse_err(path, 1, format!("unsupported checkpoint version {h:?}")))
        }
        _ => return Err(parse_err(path, 1, "not a checkpoint file")),
    }
    let mut read_matrix = |name: &str| -> Result<DenseMatrix> {
        let (ln, header) = lines.next().ok_or_else(|| parse_err(path, 0, format!("missing {name}")))?;
        let t: Vec<&str> = header.split_whitespace().collect();
        let dims = match t.as_slice() {
            [n, r, c] if *n == name => r.parse::<usize>().ok().zip(c.parse::<usize>().ok()),
            _ => None,
        };
        let (rows, cols) = dims.ok_or_else(|| parse_err(path, ln, format!("expected `{name} <rows> <cols>`")))?;
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let (ln, line) = lines.next().ok_or_else(|| parse_err(path, 0, format!("{name} truncated")))?;
            let before = data.len();
            for tok in line.split_whitespace() {
                data.push(tok.parse::<f64>().map_err(|_| parse_err(path, ln, format!("bad value {tok:?}")))?);
            }
            if data.len() - before != cols {
                return Err(parse_err(path, ln, format!("expected {cols} values")));
            }
        }
        DenseMatrix::from_vec(rows, cols, data)
    };
    let w1 = read_matrix("w1")?;
    let w2 = read_matrix("w2")?;
    if w1.cols() != w2.rows() {
        return Err(Error::shape(format!("w1 is {:?} but w2 is {:?}", w1.shape(), w2.shape())));
    }
    w1.ensure_finite("w1")?;
    w2.ensure_finite("w2")?;
    Ok(ModelParams { w1, w2 })
}

// ------------------------------------------------------------- manifest

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(sha256_hex(&fs::read(path)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub role: String,
    pub path: PathBuf,
    pub sha256: String,
}

/// Everything needed to rerun a training job bit-for-bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub seed: u64,
    pub input_variant: InputVariant,
    pub config: TrainConfig,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    /// Hashes the inputs now, so call this before training.
    pub fn new(
        version: impl Into<String>,
        config: &TrainConfig,
        input_variant: InputVariant,
        inputs: &[(&str, &Path)],
    ) -> Result<Self> {
        let inputs = inputs
            .iter()
            .map(|&(role, path)| {
                Ok(InputDigest {
                    role: role.to_string(),
                    path: path.to_path_buf(),
                    sha256: sha256_file(path)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            version: version.into(),
            seed: config.seed,
            input_variant,
            config: config.clone(),
            inputs,
            outputs: Vec::new(),
        })
    }

    /// Names of inputs whose current contents differ from the recorded digest.
    pub fn changed_inputs(&self) -> Result<Vec<String>> {
        let mut changed = Vec::new();
        for d in &self.inputs {
            if sha256_file(&d.path)? != d.sha256 {
                changed.push(d.role.clone());
            }
        }
        Ok(changed)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        atomic_write(path, self.to_json()?.as_bytes())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&read(path)?)?)
    }
}

// ------------------------------------------------------- dataset shapes

/// Published size of a benchmark dataset, used to sanity-check loaders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetShape {
    pub name: &'static str,
    pub nodes: usize,
    pub edges: usize,
    pub communities: usize,
    pub attributes: usize,
}

pub const KNOWN_DATASETS: &[DatasetShape] = &[
    DatasetShape { name: "facebook-348", nodes: 227, edges: 6384, communities: 14, attributes: 21 },
    DatasetShape { name: "facebook-686", nodes: 170, edges: 3312, communities: 14, attributes: 9 },
    DatasetShape { name: "facebook-1684", nodes: 792, edges: 28048, communities: 17, attributes: 15 },
    DatasetShape { name: "engineering", nodes: 14927, edges: 98610, communities: 16, attributes: 4839 },
    DatasetShape { name: "computer-science", nodes: 21597, edges: 193500, communities: 18, attributes: 7793 },
    DatasetShape { name: "chemistry", nodes: 35409, edges: 314716, communities: 14, attributes: 4877 },
];

pub fn known_dataset(name: &str) -> Option<&'static DatasetShape> {
    KNOWN_DATASETS.iter().find(|d| d.name.eq_ignore_ascii_case(name))
}

/// Edge counts in the table are directed (each undirected edge twice).
pub fn check_dataset_shape(
    shape: &DatasetShape,
    g: &Graph,
    x: &FeatureMatrix,
    truth: &Cover,
) -> Result<()> {
    let got = (g.n_nodes(), 2 * g.n_edges(), truth.len(), x.dim());
    let want = (shape.nodes, shape.edges, shape.communities, shape.attributes);
    if got != want || x.n_rows() != g.n_nodes() {
        return Err(Error::InvalidData(format!(
            "{}: expected (nodes, edges, communities, attributes) = {want:?}, found {got:?}",
            shape.name
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::RngStream;
    use proptest::prelude::*;

    fn p() -> &'static Path {
        Path::new("test")
    }

    #[test]
    fn edge_list_merges_duplicates_and_drops_self_loops() {
        let (g, r) = parse_edge_list_str("0 1\n1\t0\n1 1\n", p()).unwrap();
        assert_eq!((g.n_nodes(), g.n_edges()), (2, 1));
        assert_eq!(r.self_loops, 1);
        assert_eq!(r.duplicates, 1);
    }

    #[test]
    fn edge_list_header_and_comments() {
        let (g, _) = parse_edge_list_str("# nothing\nN=5\n", p()).unwrap();
        assert_eq!((g.n_nodes(), g.n_edges()), (5, 0));
        let (g, _) = parse_edge_list_str("N=4\n# c\n0 3\n", p()).unwrap();
        assert_eq!(g.n_nodes(), 4);
    }

    #[test]
    fn edge_list_errors_carry_line_numbers() {
        match parse_edge_list_str("0 1\n\n2 x\n", p()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse_edge_list_str("0 1 2\n", p()).is_err());
        assert!(parse_edge_list_str("N=3\n0 3\n", p()).is_err());
        assert!(parse_edge_list_str("0 3\nN=3\n", p()).is_err());
    }

    #[test]
    fn sparse_attributes() {
        let x = parse_attributes_str("2 2 1\n0 1 3.0\n", p()).unwrap();
        assert_eq!(x.as_dense().as_slice(), &[0.0, 3.0, 0.0, 0.0]);
        assert!(parse_attributes_str("2 2 2\n0 1 3.0\n", p()).is_err());
        assert!(parse_attributes_str("2 2 1\n2 0 3.0\n", p()).is_err());
        assert!(parse_attributes_str("", p()).is_err());
    }

    #[test]
    fn dense_csv_attributes() {
        let x = parse_attributes_str("1,2\n3,4\n5,6\n", p()).unwrap();
        assert_eq!(x.as_dense().shape(), (3, 2));
        let back = parse_attributes_str(&format_attributes_csv(&x), p()).unwrap();
        assert_eq!(back, x);
        assert!(parse_attributes_str("1,2\n3\n", p()).is_err());
    }

    #[test]
    fn cover_parse_and_canonical_write() {
        let c = parse_cover_str("0 1 2\n# x\n3 2\n", p(), None).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.memberships_per_node()[2], 2);
        assert_eq!(format_cover(&c), "0 1 2\n2 3\n");
        assert!(parse_cover_str("0 5\n", p(), Some(4)).is_err());
    }

    #[test]
    fn checkpoint_round_trip_and_version_check() {
        let params = ModelParams::init(4, 3, 2, &mut RngStream::new(1));
        let text = format_checkpoint(&params);
        assert_eq!(parse_checkpoint_str(&text, p()).unwrap(), params);
        let bumped = text.replacen("v1", "v9", 1);
        assert!(parse_checkpoint_str(&bumped, p()).is_err());
        assert!(parse_checkpoint_str("hello\n", p()).is_err());
    }

    #[test]
    fn atomic_write_replaces_and_leaves_no_temp() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.txt");
        atomic_write(&path, b"one").unwrap();
        atomic_write(&path, b"two").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn manifest_records_digests() {
        let dir = tempfile::tempdir().unwrap();
        let edges = dir.path().join("e.txt");
        fs::write(&edges, "0 1\n").unwrap();
        let cfg = TrainConfig::default();
        let m = RunManifest::new("0.1.0", &cfg, InputVariant::G, &[("edges", &edges)]).unwrap();
        assert_eq!(m.inputs[0].sha256, sha256_hex(b"0 1\n"));
        assert!(m.changed_inputs().unwrap().is_empty());
        let mpath = dir.path().join("manifest.json");
        m.write(&mpath).unwrap();
        assert_eq!(RunManifest::read(&mpath).unwrap(), m);
        fs::write(&edges, "0 2\n").unwrap();
        assert_eq!(m.changed_inputs().unwrap(), vec!["edges".to_string()]);
    }

    #[test]
    fn sha256_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn dataset_shape_check() {
        let shape = DatasetShape { name: "t", nodes: 3, edges: 4, communities: 1, attributes: 2 };
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let x = FeatureMatrix::new(DenseMatrix::zeros(3, 2)).unwrap();
        let c = Cover::new(3, vec![vec![0, 1, 2]]).unwrap();
        check_dataset_shape(&shape, &g, &x, &c).unwrap();
        let x3 = FeatureMatrix::new(DenseMatrix::zeros(3, 3)).unwrap();
        assert!(check_dataset_shape(&shape, &g, &x3, &c).is_err());
        assert_eq!(known_dataset("Chemistry").unwrap().nodes, 35409);
    }

    fn arb_matrix() -> impl Strategy<Value = DenseMatrix> {
        (1usize..6, 1usize..5).prop_flat_map(|(r, c)| {
            prop::collection::vec(0.0f64..1e6, r * c)
                .prop_map(move |v| DenseMatrix::from_vec(r, c, v).unwrap())
        })
    }

    proptest! {
        #[test]
        fn edge_list_round_trip(n in 1usize..30, pairs in prop::collection::vec((0usize..30, 0usize..30), 0..80)) {
            let edges = pairs.into_iter().map(|(u, v)| (u % n, v % n));
            let g = Graph::from_edges(n, edges).unwrap();
            let (back, _) = parse_edge_list_str(&format_edge_list(&g), p()).unwrap();
            prop_assert_eq!(back, g);
        }

        #[test]
        fn affiliation_round_trip(m in arb_matrix()) {
            let f = AffiliationMatrix::new(m).unwrap();
            let back = parse_affiliations_str(&format_affiliations(&f), p()).unwrap();
            prop_assert_eq!(back, f);
        }

        #[test]
        fn attribute_round_trip_both_layouts(m in arb_matrix()) {
            let x = FeatureMatrix::new(m).unwrap();
            prop_assert_eq!(&parse_attributes_str(&format_attributes_csv(&x), p()).unwrap(), &x);
            let sparse = format_attributes_sparse(&x);
            prop_assert_eq!(&parse_attributes_str(&sparse, p()).unwrap(), &x);
        }

        #[test]
        fn cover_round_trip(n in 1usize..40, raw in prop::collection::vec(prop::collection::vec(0usize..40, 1..10), 1..6)) {
            let coms = raw.into_iter().map(|c| c.into_iter().map(|i| i % n).collect()).collect();
            let c = Cover::new(n, coms).unwrap();
            let back = parse_cover_str(&format_cover(&c), p(), Some(n)).unwrap();
            prop_assert_eq!(back, c);
        }
    }
}
