//! Output formatting: 12 significant digits, header rows, `\n` line endings.

use grisom::io::{format_float, write_float_table, write_tiling};
use grisom::tessellation::{hyperbolic_tiling, SchlaefliSymbol};
use proptest::prelude::*;

#[test]
fn float_formatting_examples() {
    assert_eq!(format_float(0.0), "0");
    assert_eq!(format_float(0.1), "0.1");
    assert_eq!(format_float(-2.5), "-2.5");
    assert_eq!(format_float(1.0 / 3.0), "0.333333333333");
    assert_eq!(format_float(2.0 / 3.0 * 1e5), "66666.6666667");
    assert_eq!(format_float(1e-7), "1e-07");
    assert_eq!(format_float(123_456_789_012_345.0), "1.23456789012e+14");
    assert_eq!(format_float(9.999_999_999_999_995), "10");
    assert_eq!(format_float(0.048), "0.048");
}

#[test]
fn tiling_files_have_headers_and_rows() {
    let t = hyperbolic_tiling(SchlaefliSymbol::new(3, 7).unwrap(), 3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_tiling(dir.path(), &t).unwrap();
    let nodes = std::fs::read_to_string(dir.path().join("nodes.csv")).unwrap();
    assert!(!nodes.contains('\r'));
    assert_eq!(nodes.lines().next().unwrap(), "id,layer,x0,x1");
    assert_eq!(nodes.lines().count(), 1 + 85);
    let edges = std::fs::read_to_string(dir.path().join("edges.csv")).unwrap();
    assert_eq!(edges.lines().count(), 1 + t.adjacency().len());
}

#[test]
fn float_tables_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let rows = vec![vec![0.1, 2.0], vec![-1e-9, 3.25]];
    write_float_table(&path, &["a".to_string(), "b".to_string()], rows.clone()).unwrap();
    let mut reader = csv::Reader::from_path(&path).unwrap();
    let back: Vec<Vec<f64>> =
        reader.records().map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(back, rows);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn formatted_floats_keep_twelve_digits(m in -10.0..10.0f64, e in -20i32..20) {
        let x = m * 10f64.powi(e);
        let s = format_float(x);
        let back: f64 = s.parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-12 * x.abs(), "{} -> {}", x, s);
        let digits = s.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).collect::<String>();
        prop_assert!(digits.trim_start_matches('0').len() <= 12, "{}", s);
    }
}
