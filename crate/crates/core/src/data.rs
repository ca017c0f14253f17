//! Datasets, delimited-text loading, batch-stream sampling and synthetic data.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use log::warn;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const IRIS_CSV: &str = include_str!("../data/iris.csv");

/// Labelled rows of real-valued features, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    n_features: usize,
    labels: Vec<usize>,
    n_classes: usize,
    column_names: Option<Vec<String>>,
    class_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset from row vectors. Class names default to the indices.
    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        let n_features = rows.first().map_or(0, Vec::len);
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n_features) {
            return Err(Error::InputShape(format!(
                "row {i} has {} features, expected {n_features}",
                row.len()
            )));
        }
        let features = rows.iter().flatten().copied().collect();
        Self::from_flat(features, n_features, labels, n_classes)
    }

    pub fn from_flat(
        features: Vec<f64>,
        n_features: usize,
        labels: Vec<usize>,
        n_classes: usize,
    ) -> Result<Self> {
        if features.len() != labels.len() * n_features {
            return Err(Error::InputShape(format!(
                "{} feature values do not form {} rows of {n_features}",
                features.len(),
                labels.len()
            )));
        }
        if n_classes == 0 {
            return Err(Error::InputShape("n_classes must be positive".into()));
        }
        if let Some(bad) = labels.iter().find(|&&y| y >= n_classes) {
            return Err(Error::InputShape(format!(
                "label {bad} out of range for {n_classes} classes"
            )));
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::InputShape(format!(
                "non-finite feature at row {}, column {}",
                pos / n_features.max(1),
                pos % n_features.max(1)
            )));
        }
        Ok(Dataset {
            features,
            n_features,
            labels,
            n_classes,
            column_names: None,
            class_names: (0..n_classes).map(|c| c.to_string()).collect(),
        })
    }

    /// Convenience for single-feature data.
    pub fn from_column(xs: &[f64], labels: &[usize]) -> Result<Self> {
        let n_classes = labels.iter().max().map_or(1, |m| m + 1);
        Self::from_flat(xs.to_vec(), 1, labels.to_vec(), n_classes)
    }

    /// The 150-row iris dataset bundled with the crate.
    pub fn iris() -> Self {
        parse_delimited(
            IRIS_CSV,
            Path::new("iris.csv"),
            &LoadOptions {
                label: LabelColumn::Last,
                has_header: true,
                delimiter: Delimiter::Comma,
            },
        )
        .expect("bundled iris data is valid")
    }

    pub fn with_column_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_features {
            return Err(Error::InputShape(format!(
                "{} column names for {} features",
                names.len(),
                self.n_features
            )));
        }
        self.column_names = Some(names);
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    #[inline]
    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.features[row * self.n_features + feature]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn column_names(&self) -> Option<&[String]> {
        self.column_names.as_deref()
    }

    /// Original label text for each dense class index.
    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    /// Copies the given rows, in order, into a new dataset with the same schema.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(rows.len() * self.n_features);
        for &i in rows {
            features.extend_from_slice(self.row(i));
        }
        Dataset {
            features,
            n_features: self.n_features,
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
            n_classes: self.n_classes,
            column_names: self.column_names.clone(),
            class_names: self.class_names.clone(),
        }
    }

    pub fn all_rows(&self) -> Vec<usize> {
        (0..self.n_rows()).collect()
    }

    /// Per-class counts over `rows`.
    pub fn class_counts(&self, rows: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &i in rows {
            counts[self.labels[i]] += 1;
        }
        counts
    }
}

/// Most frequent class in `counts`; ties go to the lowest index.
pub fn mode(counts: &[usize]) -> usize {
    let mut best = 0;
    for (c, &n) in counts.iter().enumerate() {
        if n > counts[best] {
            best = c;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
#[derive(Default)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
    #[serde(skip)]
    #[default]
    Last,
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "last" => LabelColumn::Last,
            _ => s
                .parse::<usize>()
                .map(LabelColumn::Index)
                .unwrap_or_else(|_| LabelColumn::Name(s.to_string())),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Delimiter {
    #[default]
    Comma,
    Tab,
    /// Any run of spaces or tabs.
    Whitespace,
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    pub label: LabelColumn,
    pub has_header: bool,
    pub delimiter: Delimiter,
}

/// Loads a delimited text file. Labels are densified to `0..n_classes` in
/// sorted order (numeric when every label parses as a number), and the
/// original text is kept in [`Dataset::class_names`].
pub fn load_csv(path: impl AsRef<Path>, options: &LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_delimited(&text, path, options)
}

fn parse_delimited(text: &str, path: &Path, options: &LoadOptions) -> Result<Dataset> {
    let load_err = |row: usize, column: usize, message: String| Error::Load {
        file: path.to_path_buf(),
        row,
        column,
        message,
    };

    let mut records: Vec<(usize, Vec<String>)> = Vec::new();
    match options.delimiter {
        Delimiter::Whitespace => {
            for (n, line) in text.lines().enumerate() {
                if !line.trim().is_empty() {
                    records.push((n + 1, line.split_whitespace().map(str::to_string).collect()));
                }
            }
        }
        Delimiter::Comma | Delimiter::Tab => {
            let mut reader = csv::ReaderBuilder::new()
                .has_headers(false)
                .delimiter(if options.delimiter == Delimiter::Tab {
                    b'\t'
                } else {
                    b','
                })
                .flexible(true)
                .trim(csv::Trim::All)
                .from_reader(text.as_bytes());
            for (n, rec) in reader.records().enumerate() {
                let rec = rec.map_err(|e| load_err(n + 1, 0, e.to_string()))?;
                if rec.iter().all(str::is_empty) {
                    continue;
                }
                let line = rec.position().map_or(n + 1, |p| p.line() as usize);
                records.push((line, rec.iter().map(str::to_string).collect()));
            }
        }
    }

    let mut records = records.into_iter();
    let header = if options.has_header {
        records.next().map(|(_, h)| h)
    } else {
        None
    };
    let records: Vec<_> = records.collect();
    let width = match (&header, records.first()) {
        (Some(h), _) => h.len(),
        (None, Some((_, r))) => r.len(),
        (None, None) => 0,
    };
    if records.is_empty() || width < 2 {
        return Err(load_err(
            1,
            0,
            "no data rows with at least one feature and a label".into(),
        ));
    }

    let label_col = match &options.label {
        LabelColumn::Last => width - 1,
        LabelColumn::Index(i) if *i < width => *i,
        LabelColumn::Index(i) => {
            return Err(load_err(
                1,
                *i + 1,
                format!("label column {i} out of range ({width} columns)"),
            ))
        }
        LabelColumn::Name(name) => header
            .as_ref()
            .and_then(|h| h.iter().position(|c| c == name))
            .ok_or_else(|| load_err(1, 0, format!("no header column named `{name}`")))?,
    };

    let n_features = width - 1;
    let mut features = Vec::with_capacity(records.len() * n_features);
    let mut raw_labels = Vec::with_capacity(records.len());
    for (line, rec) in &records {
        if rec.len() != width {
            return Err(load_err(
                *line,
                rec.len(),
                format!("expected {width} fields, found {}", rec.len()),
            ));
        }
        for (c, cell) in rec.iter().enumerate() {
            if c == label_col {
                continue;
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| load_err(*line, c + 1, format!("non-numeric feature `{cell}`")))?;
            if !v.is_finite() {
                return Err(load_err(
                    *line,
                    c + 1,
                    format!("non-finite feature `{cell}`"),
                ));
            }
            features.push(v);
        }
        raw_labels.push(rec[label_col].clone());
    }

    let distinct: BTreeSet<&String> = raw_labels.iter().collect();
    let mut class_names: Vec<String> = distinct.into_iter().cloned().collect();
    if class_names.iter().all(|s| s.parse::<f64>().is_ok()) {
        class_names.sort_by(|a, b| {
            a.parse::<f64>()
                .unwrap()
                .total_cmp(&b.parse::<f64>().unwrap())
        });
    }
    let labels = raw_labels
        .iter()
        .map(|l| class_names.iter().position(|c| c == l).unwrap())
        .collect();

    let mut data = Dataset::from_flat(features, n_features, labels, class_names.len())?;
    data.class_names = class_names;
    if let Some(h) = header {
        let names = h
            .into_iter()
            .enumerate()
            .filter(|(c, _)| *c != label_col)
            .map(|(_, n)| n)
            .collect();
        data.column_names = Some(names);
    }
    Ok(data)
}

/// Reproducible description of where a dataset lives and how to parse it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    #[serde(default)]
    pub url: Option<String>,
    /// Relative paths resolve against the manifest's directory.
    pub path: PathBuf,
    #[serde(default)]
    pub label_column: Option<LabelColumn>,
    #[serde(default)]
    pub delimiter: Delimiter,
    #[serde(default)]
    pub has_header: bool,
}

impl DatasetManifest {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut manifest: DatasetManifest =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if manifest.path.is_relative() {
            if let Some(dir) = path.parent() {
                manifest.path = dir.join(&manifest.path);
            }
        }
        Ok(manifest)
    }

    pub fn load_options(&self) -> LoadOptions {
        LoadOptions {
            label: self.label_column.clone().unwrap_or_default(),
            has_header: self.has_header,
            delimiter: self.delimiter,
        }
    }

    pub fn load(&self) -> Result<Dataset> {
        load_csv(&self.path, &self.load_options())
    }
}

/// Disjoint training batches `B_0..B_n` and a held-out test set, as row
/// indices into a source dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchPlan {
    pub batches: Vec<Vec<usize>>,
    pub test: Vec<usize>,
    pub seed: u64,
    pub batch_size: usize,
}

impl BatchPlan {
    pub fn n_batches(&self) -> usize {
        self.batches.len()
    }

    pub fn batch(&self, data: &Dataset, t: usize) -> Dataset {
        data.subset(&self.batches[t])
    }

    /// Row indices of `D_t`, the union of batches `0..=t`.
    pub fn cumulative_rows(&self, t: usize) -> Vec<usize> {
        self.batches[..=t].concat()
    }

    pub fn cumulative(&self, data: &Dataset, t: usize) -> Dataset {
        data.subset(&self.cumulative_rows(t))
    }

    pub fn test_set(&self, data: &Dataset) -> Dataset {
        data.subset(&self.test)
    }
}

/// Seeded generator used for every sampling step: ChaCha8 seeded through
/// `SeedableRng::seed_from_u64`.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform integer in `0..n` from one 64-bit draw by widening multiply.
fn bounded(rng: &mut impl RngCore, n: usize) -> usize {
    ((u128::from(rng.next_u64()) * n as u128) >> 64) as usize
}

/// Fisher-Yates permutation of `0..n`, walking from the last position down.
pub fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = rng_from_seed(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = bounded(&mut rng, i + 1);
        perm.swap(i, j);
    }
    perm
}

/// Shuffles the rows once and cuts the permutation into `n_batches` batches
/// followed by the test set. Short datasets yield fewer batches or a smaller
/// test set, with a warning.
pub fn make_batch_plan(
    data: &Dataset,
    n_batches: usize,
    batch_size: usize,
    test_size: usize,
    seed: u64,
) -> Result<BatchPlan> {
    if batch_size == 0 || n_batches == 0 {
        return Err(Error::Config(
            "n_batches and batch_size must be positive".into(),
        ));
    }
    let n = data.n_rows();
    if n < batch_size {
        return Err(Error::InputShape(format!(
            "dataset has {n} rows, fewer than one batch of {batch_size}"
        )));
    }
    let fitted = n_batches.min(n / batch_size);
    if fitted < n_batches {
        warn!("only {fitted} of {n_batches} batches of {batch_size} fit in {n} rows");
    }
    let train = fitted * batch_size;
    let test_len = test_size.min(n - train);
    if test_len < test_size {
        warn!("test set shrunk from {test_size} to {test_len} rows");
    }

    let perm = permutation(n, seed);
    let batches = perm[..train]
        .chunks(batch_size)
        .map(<[usize]>::to_vec)
        .collect();
    let test = perm[train..train + test_len].to_vec();
    Ok(BatchPlan {
        batches,
        test,
        seed,
        batch_size,
    })
}

/// Axis-aligned box `lower <= x < upper` labelled with `class`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelledBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub class: usize,
}

impl LabelledBox {
    fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&v, (&lo, &hi))| lo <= v && v < hi)
    }
}

/// Recipe for synthetic data: features uniform on `[0, 1)`, the label of the
/// first box containing the row (else `default_class`), then each label is
/// replaced by a different uniformly chosen class with probability
/// `flip_noise`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_rows: usize,
    pub n_features: usize,
    pub n_classes: usize,
    #[serde(default)]
    pub default_class: usize,
    #[serde(default)]
    pub boxes: Vec<LabelledBox>,
    #[serde(default)]
    pub flip_noise: f64,
}

impl SyntheticSpec {
    fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(format!("synthetic: {m}")));
        if self.n_rows == 0 || self.n_features == 0 || self.n_classes == 0 {
            return fail("n_rows, n_features and n_classes must be positive".into());
        }
        if self.default_class >= self.n_classes {
            return fail(format!("default_class {} out of range", self.default_class));
        }
        if !(0.0..=1.0).contains(&self.flip_noise) {
            return fail(format!("flip_noise {} outside [0, 1]", self.flip_noise));
        }
        if self.flip_noise > 0.0 && self.n_classes < 2 {
            return fail("flip noise needs at least two classes".into());
        }
        for (i, b) in self.boxes.iter().enumerate() {
            if b.lower.len() != self.n_features || b.upper.len() != self.n_features {
                return fail(format!("box {i} has wrong dimensionality"));
            }
            if b.class >= self.n_classes {
                return fail(format!("box {i} class {} out of range", b.class));
            }
            if b.lower
                .iter()
                .zip(&b.upper)
                .any(|(l, u)| l.partial_cmp(u).is_none_or(|o| o.is_gt()))
            {
                return fail(format!("box {i} has lower > upper"));
            }
        }
        Ok(())
    }
}

pub fn synthetic(spec: &SyntheticSpec, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = rng_from_seed(seed);
    let mut features = Vec::with_capacity(spec.n_rows * spec.n_features);
    let mut labels = Vec::with_capacity(spec.n_rows);
    for _ in 0..spec.n_rows {
        let start = features.len();
        for _ in 0..spec.n_features {
            features.push(rng.random::<f64>());
        }
        let x = &features[start..];
        let mut y = spec
            .boxes
            .iter()
            .find(|b| b.contains(x))
            .map_or(spec.default_class, |b| b.class);
        if spec.flip_noise > 0.0 && rng.random::<f64>() < spec.flip_noise {
            let shift = 1 + bounded(&mut rng, spec.n_classes - 1);
            y = (y + shift) % spec.n_classes;
        }
        labels.push(y);
    }
    Dataset::from_flat(features, spec.n_features, labels, spec.n_classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_string_labels_densely() {
        let f = write_tmp("x,y,label\n1,2,b\n3,4,a\n5,6,b\n7,8,a\n");
        let d = load_csv(
            f.path(),
            &LoadOptions {
                has_header: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(d.n_rows(), 4);
        assert_eq!(d.n_features(), 2);
        assert_eq!(d.n_classes(), 2);
        assert_eq!(d.labels(), &[1, 0, 1, 0]);
        assert_eq!(d.class_names(), &["a".to_string(), "b".to_string()]);
        assert_eq!(
            d.column_names().unwrap(),
            &["x".to_string(), "y".to_string()]
        );
    }

    #[test]
    fn label_column_by_name_and_index() {
        let f = write_tmp("cls,x\n2,0.5\n1,0.25\n10,1.5\n");
        let by_name = load_csv(
            f.path(),
            &LoadOptions {
                label: LabelColumn::Name("cls".into()),
                has_header: true,
                ..Default::default()
            },
        )
        .unwrap();
        let by_index = load_csv(
            f.path(),
            &LoadOptions {
                label: LabelColumn::Index(0),
                has_header: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(by_name, by_index);
        // numeric labels sort numerically, not lexically
        assert_eq!(by_name.class_names(), &["1", "2", "10"]);
        assert_eq!(by_name.labels(), &[1, 0, 2]);
        assert_eq!(by_name.row(2), &[1.5]);
    }

    #[test]
    fn nan_cell_is_a_load_error_at_that_cell() {
        let f = write_tmp("1,2,a\n3,NaN,b\n");
        match load_csv(f.path(), &LoadOptions::default()) {
            Err(Error::Load { row, column, .. }) => assert_eq!((row, column), (2, 2)),
            other => panic!("expected load error, got {other:?}"),
        }
    }

    #[test]
    fn non_numeric_and_empty_and_missing() {
        let f = write_tmp("1,x,a\n");
        assert!(matches!(
            load_csv(f.path(), &LoadOptions::default()),
            Err(Error::Load {
                row: 1,
                column: 2,
                ..
            })
        ));
        let f = write_tmp("");
        assert!(load_csv(f.path(), &LoadOptions::default()).is_err());
        assert!(matches!(
            load_csv("/nonexistent/file.csv", &LoadOptions::default()),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn whitespace_delimited_skin_layout() {
        // Skin_NonSkin.txt layout: B G R label, tab separated, no header.
        let f = write_tmp("74\t85\t123\t1\n73\t84\t122\t1\n255\t255\t255\t2\n");
        let opts = LoadOptions {
            delimiter: Delimiter::Whitespace,
            ..Default::default()
        };
        let d = load_csv(f.path(), &opts).unwrap();
        assert_eq!((d.n_features(), d.n_classes()), (3, 2));
        assert_eq!(d.labels(), &[0, 0, 1]);
    }

    #[test]
    fn iris_is_bundled() {
        let iris = Dataset::iris();
        assert_eq!(
            (iris.n_rows(), iris.n_features(), iris.n_classes()),
            (150, 4, 3)
        );
        assert_eq!(iris.class_counts(&iris.all_rows()), vec![50, 50, 50]);
    }

    #[test]
    fn iris_tenth_sample() {
        let iris = Dataset::iris();
        let plan = make_batch_plan(&iris, 1, 15, 0, 7).unwrap();
        assert_eq!(plan.batches[0].len(), 15);
        assert!(plan.test.is_empty());
    }

    #[test]
    fn plans_are_deterministic_and_disjoint() {
        let d = synthetic(
            &SyntheticSpec {
                n_rows: 500,
                n_features: 2,
                n_classes: 2,
                default_class: 0,
                boxes: vec![],
                flip_noise: 0.3,
            },
            1,
        )
        .unwrap();
        let a = make_batch_plan(&d, 4, 50, 200, 42).unwrap();
        let b = make_batch_plan(&d, 4, 50, 200, 42).unwrap();
        assert_eq!(a, b);
        let mut seen = BTreeSet::new();
        for r in a.batches.iter().flatten().chain(&a.test) {
            assert!(seen.insert(*r), "row {r} reused");
        }
        assert_eq!(a.cumulative_rows(2).len(), 150);
        assert_ne!(a, make_batch_plan(&d, 4, 50, 200, 43).unwrap());
    }

    #[test]
    fn plan_shrinks_test_set_and_batch_count() {
        let d = Dataset::iris();
        let p = make_batch_plan(&d, 3, 40, 100, 0).unwrap();
        assert_eq!(p.n_batches(), 3);
        assert_eq!(p.test.len(), 30);
        let p = make_batch_plan(&d, 10, 40, 0, 0).unwrap();
        assert_eq!(p.n_batches(), 3);
        assert!(make_batch_plan(&d, 1, 151, 0, 0).is_err());
    }

    #[test]
    fn permutation_is_a_permutation() {
        let mut p = permutation(1000, 9);
        assert_ne!(p, (0..1000).collect::<Vec<_>>());
        p.sort_unstable();
        assert_eq!(p, (0..1000).collect::<Vec<_>>());
    }

    #[test]
    fn synthetic_is_seeded_and_validated() {
        let spec = SyntheticSpec {
            n_rows: 100,
            n_features: 2,
            n_classes: 2,
            default_class: 0,
            boxes: vec![LabelledBox {
                lower: vec![0.2, 0.3],
                upper: vec![0.7, 0.9],
                class: 1,
            }],
            flip_noise: 0.0,
        };
        assert_eq!(synthetic(&spec, 5).unwrap(), synthetic(&spec, 5).unwrap());
        let d = synthetic(&spec, 5).unwrap();
        for i in 0..d.n_rows() {
            let x = d.row(i);
            let inside = (0.2..0.7).contains(&x[0]) && (0.3..0.9).contains(&x[1]);
            assert_eq!(d.label(i), usize::from(inside));
        }
        let bad = SyntheticSpec {
            flip_noise: 1.5,
            ..spec.clone()
        };
        assert!(matches!(synthetic(&bad, 0), Err(Error::Config(_))));
        let bad = SyntheticSpec {
            default_class: 2,
            ..spec
        };
        assert!(synthetic(&bad, 0).is_err());
    }

    #[test]
    fn mode_ties_to_lowest() {
        assert_eq!(mode(&[2, 1]), 0);
        assert_eq!(mode(&[1, 1]), 0);
        assert_eq!(mode(&[0, 0, 3]), 2);
    }

    #[test]
    fn from_flat_validates() {
        assert!(Dataset::from_flat(vec![1.0, f64::NAN], 1, vec![0, 0], 1).is_err());
        assert!(Dataset::from_flat(vec![1.0], 1, vec![2], 2).is_err());
        assert!(Dataset::from_flat(vec![1.0, 2.0, 3.0], 2, vec![0], 1).is_err());
    }
}
