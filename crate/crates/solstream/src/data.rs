//! Dataset ingestion and generation: LIBSVM text parsing, seeded
//! permutations, a controllable synthetic stream generator, and seeded
//! class-imbalanced subsampling.
//!
//! All randomness flows through ChaCha8 seeded explicitly, so every
//! operation here is deterministic under (inputs, seed). File indices are
//! 1-based on disk and 0-based in memory; the conversion happens at the
//! parse/serialize boundary and nowhere else.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::{DenseWeights, SparseVector};

/// Binary class label. Invalid labels are unrepresentable; files map
/// `{0, -1}` to `Neg` and `{1, +1}` to `Pos` at parse time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Pos,
    Neg,
}

impl Label {
    /// Signed value: +1.0 or -1.0.
    pub fn sign(self) -> f64 {
        match self {
            Label::Pos => 1.0,
            Label::Neg => -1.0,
        }
    }

    /// Prediction tie rule: margin >= 0 maps to `Pos`.
    pub fn from_margin(margin: f64) -> Label {
        if margin >= 0.0 {
            Label::Pos
        } else {
            Label::Neg
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Pos => "+1",
            Label::Neg => "-1",
        })
    }
}

/// One labeled example from a stream.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseExample {
    pub y: Label,
    pub x: SparseVector,
}

/// Summary gathered in a single streaming pass over a dataset.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub n_examples: usize,
    /// Max feature index seen plus one (equals the largest 1-based file index).
    pub ambient_dim: usize,
    pub nnz: usize,
    pub positives: usize,
    pub negatives: usize,
}

impl DatasetMeta {
    pub fn record(&mut self, ex: &SparseExample) {
        self.n_examples += 1;
        self.nnz += ex.x.nnz();
        if let Some(max) = ex.x.max_index() {
            self.ambient_dim = self.ambient_dim.max(max + 1);
        }
        match ex.y {
            Label::Pos => self.positives += 1,
            Label::Neg => self.negatives += 1,
        }
    }

    pub fn from_examples<'a>(examples: impl IntoIterator<Item = &'a SparseExample>) -> Self {
        let mut meta = DatasetMeta::default();
        for ex in examples {
            meta.record(ex);
        }
        meta
    }
}

fn parse_label(tok: &str, line: usize) -> Result<Label> {
    let v: f64 = tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("non-numeric label {tok:?}"),
    })?;
    if v == 1.0 {
        Ok(Label::Pos)
    } else if v == -1.0 || v == 0.0 {
        Ok(Label::Neg)
    } else {
        Err(Error::Parse {
            line,
            msg: format!("label {tok:?} is not one of 0, +1, 1, -1"),
        })
    }
}

/// Parses one LIBSVM line: `<label> <index>:<value> ...` with 1-based,
/// strictly increasing indices and an optional `#` comment suffix.
/// Returns `None` for blank or comment-only lines.
pub fn parse_libsvm_line(raw: &str, line: usize) -> Result<Option<SparseExample>> {
    let content = raw.split('#').next().unwrap_or("");
    let mut toks = content.split_whitespace();
    let Some(label_tok) = toks.next() else {
        return Ok(None);
    };
    let y = parse_label(label_tok, line)?;
    let mut entries = Vec::new();
    let mut prev: Option<usize> = None;
    for tok in toks {
        let (idx_s, val_s) = tok.split_once(':').ok_or_else(|| Error::Parse {
            line,
            msg: format!("malformed feature pair {tok:?}"),
        })?;
        let idx: usize = idx_s.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("malformed feature index {idx_s:?}"),
        })?;
        if idx < 1 {
            return Err(Error::Parse {
                line,
                msg: "feature indices are 1-based; got 0".into(),
            });
        }
        let val: f64 = val_s.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("malformed feature value {val_s:?}"),
        })?;
        if !val.is_finite() {
            return Err(Error::Parse {
                line,
                msg: format!("non-finite feature value {val_s:?}"),
            });
        }
        if let Some(p) = prev {
            if idx - 1 <= p {
                return Err(Error::Parse {
                    line,
                    msg: format!("feature indices not strictly increasing at {idx}"),
                });
            }
        }
        prev = Some(idx - 1);
        entries.push((idx - 1, val));
    }
    let x = SparseVector::new(entries).map_err(|e| Error::Parse {
        line,
        msg: e.to_string(),
    })?;
    Ok(Some(SparseExample { y, x }))
}

/// Canonical LIBSVM rendering of an example (1-based indices, shortest
/// round-trip float formatting, no trailing newline).
pub fn serialize_libsvm(ex: &SparseExample) -> String {
    let mut out = ex.y.to_string();
    for (i, v) in ex.x.iter() {
        out.push_str(&format!(" {}:{}", i + 1, v));
    }
    out
}

/// Streaming LIBSVM reader; yields parsed examples in file order.
pub struct LibsvmReader<R> {
    reader: R,
    line: usize,
    buf: String,
}

impl LibsvmReader<BufReader<File>> {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let file = File::open(path.as_ref()).map_err(|e| {
            Error::Data(format!("cannot open {}: {e}", path.as_ref().display()))
        })?;
        Ok(LibsvmReader::new(BufReader::new(file)))
    }
}

impl<R: BufRead> LibsvmReader<R> {
    pub fn new(reader: R) -> Self {
        LibsvmReader {
            reader,
            line: 0,
            buf: String::new(),
        }
    }
}

impl<R: BufRead> Iterator for LibsvmReader<R> {
    type Item = Result<SparseExample>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.reader.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {
                    self.line += 1;
                    match parse_libsvm_line(&self.buf, self.line) {
                        Ok(Some(ex)) => return Some(Ok(ex)),
                        Ok(None) => continue,
                        Err(e) => return Some(Err(e)),
                    }
                }
                Err(e) => return Some(Err(e.into())),
            }
        }
    }
}

/// Loads an entire LIBSVM file into memory.
pub fn read_libsvm(path: impl AsRef<Path>) -> Result<Vec<SparseExample>> {
    LibsvmReader::open(path)?.collect()
}

/// Computes `DatasetMeta` in one streaming pass without retaining examples.
pub fn scan_meta(path: impl AsRef<Path>) -> Result<DatasetMeta> {
    let mut meta = DatasetMeta::default();
    for ex in LibsvmReader::open(path)? {
        meta.record(&ex?);
    }
    Ok(meta)
}

/// Writes examples in canonical LIBSVM form, one per line.
pub fn write_libsvm<'a>(
    path: impl AsRef<Path>,
    examples: impl IntoIterator<Item = &'a SparseExample>,
) -> Result<()> {
    let mut file = std::io::BufWriter::new(File::create(path)?);
    for ex in examples {
        writeln!(file, "{}", serialize_libsvm(ex))?;
    }
    file.flush()?;
    Ok(())
}

/// Deterministic Fisher-Yates permutation of `0..n` driven by ChaCha8.
pub fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    order
}

/// Seeded reordering of a dataset slice; same seed, same order.
pub fn permuted(
    examples: &[SparseExample],
    seed: u64,
) -> impl Iterator<Item = &SparseExample> {
    permutation(examples.len(), seed)
        .into_iter()
        .map(move |i| &examples[i])
}

/// Parameters for the synthetic stream: an effective Gaussian block whose
/// mean vector doubles as the separating plane, plus per-example noise
/// dimensions drawn from the remaining coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_train: usize,
    pub n_test: usize,
    pub ambient_dim: usize,
    pub n_effective: usize,
    pub n_noise: usize,
    pub mean_range: (f64, f64),
    pub var_range: (f64, f64),
    pub noise_var: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    /// Full-scale defaults: 100k/10k examples in R^1000 with a 100-dim
    /// effective block and 200 noise dims of N(0, 100) per example.
    fn default() -> Self {
        SyntheticSpec {
            n_train: 100_000,
            n_test: 10_000,
            ambient_dim: 1000,
            n_effective: 100,
            n_noise: 200,
            mean_range: (-1.0, 1.0),
            var_range: (0.5, 100.0),
            noise_var: 100.0,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    /// Desk-scale variant used by tests and examples.
    pub fn desk(n_train: usize, n_test: usize, seed: u64) -> Self {
        SyntheticSpec {
            n_train,
            n_test,
            ambient_dim: 200,
            n_effective: 20,
            n_noise: 40,
            seed,
            ..SyntheticSpec::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_effective + self.n_noise > self.ambient_dim {
            return Err(Error::Config(format!(
                "n_effective + n_noise = {} exceeds ambient_dim {}",
                self.n_effective + self.n_noise,
                self.ambient_dim
            )));
        }
        if self.n_effective == 0 {
            return Err(Error::Config("n_effective must be positive".into()));
        }
        if self.mean_range.0 > self.mean_range.1 || self.var_range.0 > self.var_range.1 {
            return Err(Error::Config("invalid range bounds".into()));
        }
        if self.var_range.0 < 0.0 || self.noise_var < 0.0 {
            return Err(Error::Config("variances must be non-negative".into()));
        }
        Ok(())
    }
}

/// A generated dataset plus the plane that labels it.
#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub train: Vec<SparseExample>,
    pub test: Vec<SparseExample>,
    /// The mean vector, zero-padded to the ambient dimension.
    pub true_plane: DenseWeights,
}

/// Generates train and test streams from `spec`, deterministically.
///
/// Draw order is fixed: plane means, then per-dimension variances, then for
/// each example (train first, then test) the effective block, the noise
/// index set, and the noise values. Labels come from the noiseless
/// effective block: `y = sign(p . x_eff)` with `sign(0) = +1`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticData> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mean: Vec<f64> = (0..spec.n_effective)
        .map(|_| rng.random_range(spec.mean_range.0..=spec.mean_range.1))
        .collect();
    let var: Vec<f64> = (0..spec.n_effective)
        .map(|_| rng.random_range(spec.var_range.0..=spec.var_range.1))
        .collect();

    let effective_dists: Vec<Normal<f64>> = mean
        .iter()
        .zip(&var)
        .map(|(&m, &v)| Normal::new(m, v.sqrt()).expect("finite std dev"))
        .collect();
    let noise_dist = Normal::new(0.0, spec.noise_var.sqrt()).expect("finite std dev");

    let gen_block = |rng: &mut ChaCha8Rng, n: usize| -> Result<Vec<SparseExample>> {
        (0..n).map(|_| gen_example(spec, rng, &mean, &effective_dists, &noise_dist)).collect()
    };

    let train = gen_block(&mut rng, spec.n_train)?;
    let test = gen_block(&mut rng, spec.n_test)?;

    let mut true_plane = DenseWeights::new();
    for (i, &m) in mean.iter().enumerate() {
        true_plane.set(i, m);
    }
    if spec.ambient_dim > 0 {
        true_plane.set(spec.ambient_dim - 1, 0.0);
    }

    Ok(SyntheticData { train, test, true_plane })
}

fn gen_example(
    spec: &SyntheticSpec,
    rng: &mut ChaCha8Rng,
    mean: &[f64],
    effective_dists: &[Normal<f64>],
    noise_dist: &Normal<f64>,
) -> Result<SparseExample> {
    let mut entries: Vec<(usize, f64)> = Vec::with_capacity(spec.n_effective + spec.n_noise);
    let mut plane_dot = 0.0;
    for (i, dist) in effective_dists.iter().enumerate() {
        let v = dist.sample(rng);
        plane_dot += mean[i] * v;
        entries.push((i, v));
    }
    let y = Label::from_margin(plane_dot);

    if spec.n_noise > 0 {
        let noise_indices = distinct_indices(
            rng,
            spec.n_effective..spec.ambient_dim,
            spec.n_noise,
        );
        let mut noisy: Vec<(usize, f64)> = noise_indices
            .into_iter()
            .map(|i| (i, noise_dist.sample(rng)))
            .collect();
        noisy.sort_unstable_by_key(|&(i, _)| i);
        entries.extend(noisy);
    }

    Ok(SparseExample {
        y,
        x: SparseVector::new(entries)?,
    })
}

/// `k` distinct indices from `range`, uniformly, in draw order.
/// Rejection sampling for sparse draws, partial Fisher-Yates otherwise.
fn distinct_indices(
    rng: &mut ChaCha8Rng,
    range: std::ops::Range<usize>,
    k: usize,
) -> Vec<usize> {
    let span = range.end - range.start;
    assert!(k <= span, "cannot draw {k} distinct indices from a span of {span}");
    if k * 2 <= span {
        let mut seen = std::collections::HashSet::with_capacity(k);
        let mut out = Vec::with_capacity(k);
        while out.len() < k {
            let i = rng.random_range(range.clone());
            if seen.insert(i) {
                out.push(i);
            }
        }
        out
    } else {
        let mut pool: Vec<usize> = range.collect();
        for i in 0..k {
            let j = rng.random_range(i..pool.len());
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}

/// Seeded subsample of `n_pos` positive and `n_neg` negative examples,
/// without replacement, returned in a seeded shuffle of the union.
pub fn subsample_imbalanced(
    examples: &[SparseExample],
    n_pos: usize,
    n_neg: usize,
    seed: u64,
) -> Result<Vec<SparseExample>> {
    let pos_idx: Vec<usize> = examples
        .iter()
        .enumerate()
        .filter(|(_, e)| e.y == Label::Pos)
        .map(|(i, _)| i)
        .collect();
    let neg_idx: Vec<usize> = examples
        .iter()
        .enumerate()
        .filter(|(_, e)| e.y == Label::Neg)
        .map(|(i, _)| i)
        .collect();
    if pos_idx.len() < n_pos {
        return Err(Error::Data(format!(
            "requested {n_pos} positives but only {} available",
            pos_idx.len()
        )));
    }
    if neg_idx.len() < n_neg {
        return Err(Error::Data(format!(
            "requested {n_neg} negatives but only {} available",
            neg_idx.len()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let take = |idx: &[usize], k: usize, rng: &mut ChaCha8Rng| -> Vec<usize> {
        let mut pool = idx.to_vec();
        for i in 0..k {
            let j = rng.random_range(i..pool.len());
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    };
    let mut chosen = take(&pos_idx, n_pos, &mut rng);
    chosen.extend(take(&neg_idx, n_neg, &mut rng));
    for i in (1..chosen.len()).rev() {
        let j = rng.random_range(0..=i);
        chosen.swap(i, j);
    }
    Ok(chosen.into_iter().map(|i| examples[i].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_basic_line() {
        let ex = parse_libsvm_line("+1 3:0.5 7:1.25", 1).unwrap().unwrap();
        assert_eq!(ex.y, Label::Pos);
        let entries: Vec<_> = ex.x.iter().collect();
        assert_eq!(entries, vec![(2, 0.5), (6, 1.25)]);
    }

    #[test]
    fn parse_featureless_example() {
        let ex = parse_libsvm_line("-1", 1).unwrap().unwrap();
        assert_eq!(ex.y, Label::Neg);
        assert!(ex.x.is_empty());
    }

    #[test]
    fn parse_zero_label_maps_to_negative() {
        let ex = parse_libsvm_line("0 1:1", 1).unwrap().unwrap();
        assert_eq!(ex.y, Label::Neg);
    }

    #[test]
    fn parse_skips_comments_and_blanks() {
        assert!(parse_libsvm_line("", 1).unwrap().is_none());
        assert!(parse_libsvm_line("# header", 1).unwrap().is_none());
        let ex = parse_libsvm_line("+1 1:2 # trailing note", 1).unwrap().unwrap();
        assert_eq!(ex.x.iter().collect::<Vec<_>>(), vec![(0, 2.0)]);
    }

    #[test]
    fn parse_error_classes() {
        // malformed pair
        let e = parse_libsvm_line("1 a:b", 3).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        // non-numeric label
        assert!(parse_libsvm_line("spam 1:1", 1).is_err());
        // non-binary label
        assert!(parse_libsvm_line("2 1:1", 1).is_err());
        // non-increasing indices
        assert!(parse_libsvm_line("+1 2:1 2:1", 1).is_err());
        assert!(parse_libsvm_line("+1 3:1 2:1", 1).is_err());
        // 1-based indices: 0 is invalid
        assert!(parse_libsvm_line("+1 0:1", 1).is_err());
        // malformed value
        assert!(parse_libsvm_line("+1 1:x", 1).is_err());
    }

    #[test]
    fn scan_meta_counts() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("toy.svm");
        std::fs::write(&path, "+1 1:1\n-1 2:1\n").unwrap();
        let meta = scan_meta(&path).unwrap();
        assert_eq!(meta.n_examples, 2);
        assert_eq!(meta.ambient_dim, 2);
        assert_eq!(meta.nnz, 2);
        assert_eq!(meta.positives, 1);
        assert_eq!(meta.negatives, 1);
    }

    #[test]
    fn scan_meta_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.svm");
        std::fs::write(&path, "").unwrap();
        let meta = scan_meta(&path).unwrap();
        assert_eq!(meta.n_examples, 0);
        assert_eq!(meta.ambient_dim, 0);
    }

    #[test]
    fn scan_meta_ambient_dim_equals_max_file_index() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("wide.svm");
        std::fs::write(&path, "+1 47152:1.0\n").unwrap();
        assert_eq!(scan_meta(&path).unwrap().ambient_dim, 47152);
    }

    #[test]
    fn permutation_is_deterministic() {
        assert_eq!(permutation(100, 7), permutation(100, 7));
        assert_eq!(permutation(1, 42), vec![0]);
        assert_eq!(permutation(0, 42), Vec::<usize>::new());
    }

    #[test]
    fn permutation_differs_across_seeds() {
        // Overwhelmingly likely for n = 100; allow one retry with a third seed.
        let a = permutation(100, 1);
        if permutation(100, 2) == a {
            assert_ne!(permutation(100, 3), a);
        }
    }

    #[test]
    fn permutation_is_a_bijection() {
        let mut p = permutation(257, 9);
        p.sort_unstable();
        assert_eq!(p, (0..257).collect::<Vec<_>>());
    }

    #[test]
    fn synthetic_support_bounded() {
        let spec = SyntheticSpec {
            n_train: 100,
            n_test: 10,
            ..SyntheticSpec::desk(100, 10, 3)
        };
        let data = generate_synthetic(&spec).unwrap();
        let cap = spec.n_effective + spec.n_noise;
        for ex in data.train.iter().chain(&data.test) {
            assert!(ex.x.nnz() <= cap);
        }
        assert_eq!(data.train.len(), 100);
        assert_eq!(data.test.len(), 10);
    }

    #[test]
    fn synthetic_noiseless_labels_match_plane() {
        let spec = SyntheticSpec {
            n_train: 200,
            n_test: 50,
            n_noise: 0,
            noise_var: 0.0,
            ..SyntheticSpec::desk(200, 50, 11)
        };
        let data = generate_synthetic(&spec).unwrap();
        for ex in data.train.iter().chain(&data.test) {
            let margin = ex.x.dot(&data.true_plane);
            assert_eq!(ex.y, Label::from_margin(margin));
        }
    }

    #[test]
    fn synthetic_is_deterministic() {
        let spec = SyntheticSpec::desk(50, 20, 99);
        let a = generate_synthetic(&spec).unwrap();
        let b = generate_synthetic(&spec).unwrap();
        assert_eq!(a.train, b.train);
        assert_eq!(a.test, b.test);
        assert_eq!(a.true_plane, b.true_plane);
    }

    #[test]
    fn synthetic_rejects_overfull_spec() {
        let spec = SyntheticSpec {
            ambient_dim: 100,
            n_effective: 80,
            n_noise: 30,
            ..SyntheticSpec::default()
        };
        assert!(generate_synthetic(&spec).is_err());
    }

    #[test]
    fn synthetic_effective_coordinate_means() {
        // Empirical mean of each effective coordinate stays within 5
        // standard errors of the plane entry.
        let spec = SyntheticSpec {
            n_train: 10_000,
            n_test: 0,
            ..SyntheticSpec::default()
        };
        let data = generate_synthetic(&spec).unwrap();
        let n = data.train.len() as f64;
        for i in 0..spec.n_effective {
            let mut sum = 0.0;
            let mut sq = 0.0;
            for ex in &data.train {
                let v = ex.x.iter().find(|&(j, _)| j == i).map_or(0.0, |(_, v)| v);
                sum += v;
                sq += v * v;
            }
            let mean = sum / n;
            let var = (sq / n - mean * mean).max(0.0);
            let se = (var / n).sqrt();
            let p = data.true_plane.get(i);
            assert!(
                (mean - p).abs() <= 5.0 * se,
                "coordinate {i}: mean {mean} vs plane {p} (se {se})"
            );
        }
    }

    #[test]
    fn subsample_ratio_and_membership() {
        let spec = SyntheticSpec {
            n_noise: 0,
            noise_var: 0.0,
            ..SyntheticSpec::desk(1000, 0, 5)
        };
        let pool = generate_synthetic(&spec).unwrap().train;
        let sample = subsample_imbalanced(&pool, 1, 99, 17).unwrap();
        assert_eq!(sample.len(), 100);
        assert_eq!(sample.iter().filter(|e| e.y == Label::Pos).count(), 1);
        for ex in &sample {
            assert!(pool.contains(ex), "subsample invented an example");
        }
    }

    #[test]
    fn subsample_insufficient_class_errors() {
        let pool = vec![SparseExample {
            y: Label::Neg,
            x: SparseVector::empty(),
        }];
        let err = subsample_imbalanced(&pool, 1, 0, 0).unwrap_err();
        assert!(err.to_string().contains("positives"), "{err}");
        let err = subsample_imbalanced(&pool, 0, 2, 0).unwrap_err();
        assert!(err.to_string().contains("negatives"), "{err}");
    }

    #[test]
    fn subsample_is_deterministic() {
        let spec = SyntheticSpec::desk(300, 0, 21);
        let pool = generate_synthetic(&spec).unwrap().train;
        let a = subsample_imbalanced(&pool, 10, 50, 4).unwrap();
        let b = subsample_imbalanced(&pool, 10, 50, 4).unwrap();
        assert_eq!(a, b);
    }

    fn arb_example() -> impl Strategy<Value = SparseExample> {
        (
            prop::bool::ANY,
            prop::collection::btree_map(1usize..1000, -100.0f64..100.0, 0..12),
        )
            .prop_map(|(pos, feats)| SparseExample {
                y: if pos { Label::Pos } else { Label::Neg },
                x: SparseVector::new(feats.into_iter().map(|(i, v)| (i - 1, v)).collect())
                    .unwrap(),
            })
    }

    proptest! {
        #[test]
        fn libsvm_round_trip(ex in arb_example()) {
            let line = serialize_libsvm(&ex);
            let back = parse_libsvm_line(&line, 1).unwrap().unwrap();
            prop_assert_eq!(&back, &ex);
            // serialize(parse(line)) is a fixed point
            prop_assert_eq!(serialize_libsvm(&back), line);
        }
    }
}
