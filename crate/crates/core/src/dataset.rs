//! Enumeration of `(v, u, t)` triples with their surjectivity labels, and
//! the `output.txt` line format.
//!
//! A line looks like
//!
//! ```text
//! ((1, 0, 0, 0, 0), (0, 0, 0, 1, 0), (1, 1, 0, 0, 1)): 1
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::finitefield::{Elem, FieldDesc};
use crate::linalg;
use crate::linsys::{make_plane, fixture_lambda_over, Case, CubicSystem, LinsysError, Plane};
use crate::surjectivity::{label_plane, SurjError};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Surj(#[from] SurjError),
    #[error(transparent)]
    Linsys(#[from] LinsysError),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

/// Which vectors may enter a triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FilterMode {
    /// Each vector has `sum v_i^2 = 1`.
    NormOnly,
    /// Unit norms and pairwise orthogonal.
    StrictOrthonormal,
    None,
}

impl FromStr for FilterMode {
    type Err = String;

    fn from_str(s: &str) -> Result<FilterMode, String> {
        match s {
            "norm" | "norm_only" => Ok(FilterMode::NormOnly),
            "strict" | "strict_orthonormal" => Ok(FilterMode::StrictOrthonormal),
            "none" => Ok(FilterMode::None),
            _ => Err(format!("unknown filter {s:?} (expected norm, strict or none)")),
        }
    }
}

impl FilterMode {
    pub fn name(self) -> &'static str {
        match self {
            FilterMode::NormOnly => "norm",
            FilterMode::StrictOrthonormal => "strict",
            FilterMode::None => "none",
        }
    }
}

#[derive(Clone, Debug)]
pub struct EnumConfig {
    pub system: CubicSystem,
    pub filter: FilterMode,
    pub scan_bound: u32,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl EnumConfig {
    /// The fixture basis of `case` over GF(p), with the default filter.
    pub fn for_case(case: Case, p: u64) -> Result<EnumConfig, LinsysError> {
        let field = FieldDesc::prime(p)?;
        Ok(EnumConfig {
            system: fixture_lambda_over(case, &field)?,
            filter: FilterMode::NormOnly,
            scan_bound: 9,
            jobs: None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DatasetRecord {
    pub v: Vec<u64>,
    pub u: Vec<u64>,
    pub t: Vec<u64>,
    pub label: u8,
}

impl DatasetRecord {
    pub fn triple(&self) -> [&[u64]; 3] {
        [&self.v, &self.u, &self.t]
    }
}

fn dot(f: &FieldDesc, a: &[Elem], b: &[Elem]) -> Elem {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

pub fn passes_filter(f: &FieldDesc, mode: FilterMode, triple: [&[Elem]; 3]) -> bool {
    match mode {
        FilterMode::None => true,
        FilterMode::NormOnly => triple.iter().all(|v| dot(f, v, v) == 1),
        FilterMode::StrictOrthonormal => {
            triple.iter().all(|v| dot(f, v, v) == 1)
                && dot(f, triple[0], triple[1]) == 0
                && dot(f, triple[0], triple[2]) == 0
                && dot(f, triple[1], triple[2]) == 0
        }
    }
}

/// All vectors of GF(p)^dim in lexicographic order, leftmost coordinate
/// most significant.
pub fn all_vectors(p: u64, dim: usize) -> Vec<Vec<Elem>> {
    let n = p.pow(dim as u32);
    (0..n)
        .map(|mut i| {
            let mut v = vec![0; dim];
            for slot in v.iter_mut().rev() {
                *slot = i % p;
                i /= p;
            }
            v
        })
        .collect()
}

/// Runs `work` on a pool of `jobs` threads, or on the global pool.
pub fn with_pool<T: Send>(jobs: Option<usize>, work: impl FnOnce() -> T + Send) -> Result<T, DatasetError> {
    match jobs {
        None => Ok(work()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| DatasetError::Pool(e.to_string()))?;
            Ok(pool.install(work))
        }
    }
}

/// Every triple passing the rank, common-factor and vector filters, in
/// lexicographic `(v, u, t)` order, with its label. Labels depend only on
/// the plane, so each distinct plane is labeled once. The result does not
/// depend on the number of workers.
pub fn enumerate_triples(cfg: &EnumConfig) -> Result<Vec<DatasetRecord>, DatasetError> {
    let sys = &cfg.system;
    let field = sys.field().clone();
    let vectors = all_vectors(field.characteristic(), sys.dim());
    with_pool(cfg.jobs, || {
        let candidates: Vec<(usize, usize, usize)> = {
            let admissible: Vec<usize> = match cfg.filter {
                FilterMode::None => (0..vectors.len()).collect(),
                _ => (0..vectors.len()).filter(|&i| dot(&field, &vectors[i], &vectors[i]) == 1).collect(),
            };
            let mut out = Vec::new();
            for &i in &admissible {
                for &j in &admissible {
                    for &k in &admissible {
                        if passes_filter(&field, cfg.filter, [&vectors[i], &vectors[j], &vectors[k]]) {
                            out.push((i, j, k));
                        }
                    }
                }
            }
            out
        };
        let planes: Vec<Option<Plane>> = candidates
            .par_iter()
            .map(|&(i, j, k)| make_plane(sys, &vectors[i], &vectors[j], &vectors[k]).map(Result::ok))
            .collect::<Result<_, _>>()?;
        let mut keys: HashMap<linalg::Matrix, usize> = HashMap::new();
        let mut distinct: Vec<&Plane> = Vec::new();
        let mut plane_index = Vec::with_capacity(planes.len());
        for plane in &planes {
            plane_index.push(plane.as_ref().map(|pl| {
                *keys.entry(pl.key()).or_insert_with(|| {
                    distinct.push(pl);
                    distinct.len() - 1
                })
            }));
        }
        let labels: Vec<u8> = distinct
            .par_iter()
            .map(|pl| label_plane(pl, cfg.scan_bound).map(|l| l.value))
            .collect::<Result<_, _>>()?;
        Ok(candidates
            .iter()
            .zip(plane_index)
            .filter_map(|(&(i, j, k), idx)| {
                idx.map(|idx| DatasetRecord {
                    v: vectors[i].clone(),
                    u: vectors[j].clone(),
                    t: vectors[k].clone(),
                    label: labels[idx],
                })
            })
            .collect())
    })?
}

/// The distinct planes among the records, each with one representative.
pub fn distinct_planes(sys: &CubicSystem, records: &[DatasetRecord]) -> Result<Vec<Plane>, DatasetError> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for r in records {
        if let Ok(plane) = make_plane(sys, &r.v, &r.u, &r.t)? {
            if seen.insert(plane.key()) {
                out.push(plane);
            }
        }
    }
    Ok(out)
}

fn python_tuple(v: &[u64]) -> String {
    match v {
        [x] => format!("({x},)"),
        _ => {
            let parts: Vec<String> = v.iter().map(u64::to_string).collect();
            format!("({})", parts.join(", "))
        }
    }
}

pub fn format_record(r: &DatasetRecord) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "({}, {}, {}): {}", python_tuple(&r.v), python_tuple(&r.u), python_tuple(&r.t), r.label);
    s
}

pub fn write_records<W: Write>(records: &[DatasetRecord], mut out: W) -> io::Result<()> {
    for r in records {
        out.write_all(format_record(r).as_bytes())?;
    }
    out.flush()
}

pub fn write_output(records: &[DatasetRecord], path: &Path) -> Result<(), DatasetError> {
    let file = fs::File::create(path)?;
    write_records(records, io::BufWriter::new(file))?;
    Ok(())
}

fn parse_tuple(s: &str) -> Result<(Vec<u64>, &str), String> {
    let s = s.strip_prefix('(').ok_or("expected '('")?;
    let end = s.find(')').ok_or("unterminated tuple")?;
    let (body, rest) = (&s[..end], &s[end + 1..]);
    let mut parts: Vec<&str> = body.split(", ").collect();
    if parts.len() == 1 {
        parts[0] = parts[0].strip_suffix(',').ok_or("a one-element tuple needs a trailing comma")?;
    }
    let v = parts
        .iter()
        .map(|p| {
            if p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit()) {
                return Err(format!("bad entry {p:?}"));
            }
            p.parse::<u64>().map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((v, rest))
}

/// Parses one line (without its newline) in the exact format written by
/// [`format_record`].
pub fn parse_record(line: &str) -> Result<DatasetRecord, String> {
    let rest = line.strip_prefix('(').ok_or("expected '(' at start of line")?;
    let (v, rest) = parse_tuple(rest)?;
    let rest = rest.strip_prefix(", ").ok_or("expected ', ' after first vector")?;
    let (u, rest) = parse_tuple(rest)?;
    let rest = rest.strip_prefix(", ").ok_or("expected ', ' after second vector")?;
    let (t, rest) = parse_tuple(rest)?;
    let label = match rest {
        "): 0" => 0,
        "): 1" => 1,
        _ => return Err(format!("expected '): 0' or '): 1', found {rest:?}")),
    };
    if v.len() != u.len() || v.len() != t.len() {
        return Err("vectors have different lengths".into());
    }
    Ok(DatasetRecord { v, u, t, label })
}

pub fn read_records<R: BufRead>(input: R) -> Result<Vec<DatasetRecord>, DatasetError> {
    let mut out = Vec::new();
    for (i, line) in input.split(b'\n').enumerate() {
        let line = line?;
        let text = std::str::from_utf8(&line).map_err(|_| DatasetError::Parse {
            line: i + 1,
            msg: "not valid UTF-8".into(),
        })?;
        out.push(parse_record(text).map_err(|msg| DatasetError::Parse { line: i + 1, msg })?);
    }
    Ok(out)
}

pub fn read_output(path: &Path) -> Result<Vec<DatasetRecord>, DatasetError> {
    let file = fs::File::open(path)?;
    read_records(io::BufReader::new(file))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stats {
    pub count: usize,
    pub positives: usize,
    pub negatives: usize,
    pub positive_rate: f64,
}

pub fn stats(records: &[DatasetRecord]) -> Stats {
    let positives = records.iter().filter(|r| r.label == 1).count();
    let count = records.len();
    Stats {
        count,
        positives,
        negatives: count - positives,
        positive_rate: if count == 0 { 0.0 } else { positives as f64 / count as f64 },
    }
}
