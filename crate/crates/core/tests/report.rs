use soliton_entropy::report::{parse_csv_report, run_catalog, write_report, OutputFormat, RunStatus, Tolerances};
use soliton_entropy::{CatalogName, NumericsConfig};

#[test]
fn csv_report_round_trips_exactly() {
    let report = run_catalog(&[CatalogName::Cp1OverCp1xcp2], &NumericsConfig::default(), &Tolerances::default());
    assert_eq!(report.status(), RunStatus::Pass);
    let mut buf = Vec::new();
    write_report(&report, OutputFormat::Csv, &mut buf).unwrap();
    let records = parse_csv_report(buf.as_slice()).unwrap();
    assert_eq!(records.len(), 11);
    for (rec, row) in records.iter().zip(&report.rows) {
        let solved = row.solved.as_ref().unwrap();
        assert_eq!(rec.nu, Some(solved.entropy.nu));
        assert_eq!(rec.constant_value, Some(solved.constant_value()));
        assert_eq!(rec.pass, Some(true));
    }
}

#[test]
fn tight_tolerance_is_a_mismatch() {
    let tol = Tolerances { rtol_significand: 1e-14, atol_constant: Some(1e-14) };
    let report = run_catalog(&[CatalogName::Cp1OverCp1], &NumericsConfig::default(), &tol);
    assert_eq!(report.status(), RunStatus::Mismatch);
    assert_eq!(report.status().exit_code(), 3);
}
