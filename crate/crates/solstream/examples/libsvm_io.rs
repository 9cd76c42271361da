//! LIBSVM text IO: parse, serialize, scan, permute, subsample.

use solstream::data::{
    parse_libsvm_line, permutation, read_libsvm, scan_meta, serialize_libsvm,
    subsample_imbalanced, write_libsvm,
};

fn main() -> solstream::Result<()> {
    let dir = std::env::temp_dir().join("solstream_libsvm_example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("tiny.svm");

    // indices are 1-based in the file, 0-based in memory
    let body = "\
+1 1:0.5 3:-1.25 # trailing comment
-1 2:2 4:0.125

0 1:1 5:3.5
";
    std::fs::write(&path, body)?;

    let meta = scan_meta(&path)?;
    println!(
        "{} examples, dim {}, {} nonzeros, {}+ / {}-",
        meta.n_examples, meta.ambient_dim, meta.nnz, meta.positives, meta.negatives
    );

    let examples = read_libsvm(&path)?;
    for ex in &examples {
        println!("  {}", serialize_libsvm(ex));
    }

    // blank lines parse to nothing, bad input to a line-tagged error
    assert!(parse_libsvm_line("", 1)?.is_none());
    let err = parse_libsvm_line("+1 3:1 2:5", 7).unwrap_err();
    println!("error example: {err}");

    // round-trip
    let copy = dir.join("copy.svm");
    write_libsvm(&copy, &examples)?;
    assert_eq!(read_libsvm(&copy)?, examples);

    // deterministic permutation + class-ratio subsampling
    println!("permutation(6, seed 9) = {:?}", permutation(6, 9));
    let one_to_two = subsample_imbalanced(&examples, 1, 2, 0)?;
    println!("subsampled {} of {} examples", one_to_two.len(), examples.len());
    Ok(())
}
