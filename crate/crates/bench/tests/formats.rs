use std::path::Path;

use balbound_bench::mm::{format_matrix, parse_matrix, read_matrix, write_matrix};
use balbound_bench::scenario::load_model;
use nalgebra::DMatrix;

fn parse(text: &str) -> DMatrix<f64> {
    parse_matrix(text, Path::new("inline")).unwrap()
}

#[test]
fn array_general_is_column_major() {
    let m = parse("%%MatrixMarket matrix array real general\n% comment\n2 2\n1\n3\n2\n4\n");
    assert_eq!(m, DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]));
}

#[test]
fn coordinate_and_symmetry_variants() {
    let m = parse("%%MatrixMarket matrix coordinate real general\n2 3 2\n1 3 -1.5\n2 1 2e0\n");
    assert_eq!(
        m,
        DMatrix::from_row_slice(2, 3, &[0.0, 0.0, -1.5, 2.0, 0.0, 0.0])
    );
    let s = parse("%%MatrixMarket matrix coordinate integer symmetric\n2 2 2\n1 1 4\n2 1 1\n");
    assert_eq!(s, DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 0.0]));
    let k = parse("%%MatrixMarket matrix array real skew-symmetric\n3 3\n1\n2\n3\n");
    assert_eq!(
        k,
        DMatrix::from_row_slice(3, 3, &[0.0, -1.0, -2.0, 1.0, 0.0, -3.0, 2.0, 3.0, 0.0])
    );
    let a = parse("%%MatrixMarket matrix array real symmetric\n2 2\n1\n2\n3\n");
    assert_eq!(a, DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 3.0]));
}

#[test]
fn dense_fallback() {
    let m = parse("# A\n-1 0.5\n0, -2D0\n");
    assert_eq!(m, DMatrix::from_row_slice(2, 2, &[-1.0, 0.5, 0.0, -2.0]));
}

#[test]
fn malformed_inputs_are_rejected() {
    for bad in [
        "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n",
        "%%MatrixMarket matrix array real general\n1 1\n1\n2\n",
        "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n",
        "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n",
        "%%MatrixMarket vector array real general\n1\n1\n",
        "1 2\n3\n",
        "",
    ] {
        assert!(parse_matrix(bad, Path::new("inline")).is_err(), "{bad:?}");
    }
}

#[test]
fn write_read_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let m = DMatrix::from_row_slice(
        2,
        3,
        &[1.0 / 3.0, -2.5e-17, std::f64::consts::PI, 0.0, 1e300, -7.0],
    );
    let p = dir.path().join("m.mtx");
    write_matrix(&p, &m).unwrap();
    assert_eq!(read_matrix(&p).unwrap(), m);
    assert!(format_matrix(&m)
        .starts_with("%%MatrixMarket matrix array real general\n2 3\n3.3333333333333331e-1\n"));
}

#[test]
fn mimo_files_reduce_to_selected_channel() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("a.txt"), "-1 0\n0 -2\n").unwrap();
    std::fs::write(d.join("b.txt"), "1 2\n3 4\n").unwrap();
    std::fs::write(d.join("c.txt"), "5 6\n7 8\n").unwrap();
    std::fs::write(d.join("d.txt"), "0 0.1\n0.2 0.3\n").unwrap();
    let m = load_model(
        &d.join("a.txt"),
        &d.join("b.txt"),
        &d.join("c.txt"),
        Some(&d.join("d.txt")),
        1,
        2,
    )
    .unwrap();
    assert_eq!(m.b().as_slice(), &[1.0, 3.0]);
    assert_eq!(m.c().as_slice(), &[7.0, 8.0]);
    assert_eq!(m.d(), 0.2);
    assert!(load_model(
        &d.join("a.txt"),
        &d.join("b.txt"),
        &d.join("c.txt"),
        None,
        3,
        1
    )
    .is_err());
    let missing = load_model(
        &d.join("beam_a.mtx"),
        &d.join("b.txt"),
        &d.join("c.txt"),
        None,
        1,
        1,
    )
    .unwrap_err();
    assert!(missing.to_string().contains("not bundled"));
}
