mod common;

use common::*;
use pgw::error::PgwError;
use pgw::io::*;
use pgw::network::Matrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn pm_net_files_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = ChaCha8Rng::seed_from_u64(1);
    for k in 0..5 {
        let nu = prob(&mut r, 1 + k);
        let x = pm_net(&mut r, 2 + k, nu, k % 2 == 0);
        let path = dir.path().join(format!("x{k}.json"));
        write_pm_net(&x, &path).unwrap();
        let y = read_pm_net(&path).unwrap();
        assert_eq!(x.kernels(), y.kernels());
        assert_eq!(x.mu(), y.mu());
        assert_eq!(x.nu(), y.nu());
        assert_eq!(x.labels(), y.labels());
    }
}

#[test]
fn csv_files_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = ChaCha8Rng::seed_from_u64(2);
    let m = kernel(&mut r, 5, false) * 1e-7;
    let path = dir.path().join("m.csv");
    write_csv(&m, &path).unwrap();
    assert_eq!(matrix_from_csv(&std::fs::read_to_string(&path).unwrap()).unwrap(), m);
}

#[test]
fn malformed_files_are_rejected() {
    assert!(matches!(pm_net_from_json("{"), Err(PgwError::Format(_))));
    let bad_mu = r#"{"n":2,"mu":[0.7,0.7],"T":1,"nu":[1],"labels":["a"],"kernels":[[[0,1],[1,0]]]}"#;
    assert!(matches!(pm_net_from_json(bad_mu), Err(PgwError::InvalidInput(_))));
    assert!(read_pm_net(std::path::Path::new("/nonexistent/x.json")).is_err());
}

#[test]
fn heatmaps_have_a_valid_header() {
    let dir = tempfile::tempdir().unwrap();
    let m = Matrix::from_row_slice(2, 3, &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
    let path = dir.path().join("h.pgm");
    write_pgm(&m, &path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    let header = b"P5\n3 2\n255\n";
    assert_eq!(&bytes[..header.len()], header);
    assert_eq!(bytes.len(), header.len() + 6);
    assert_eq!((bytes[header.len()], bytes[bytes.len() - 1]), (0, 255));
}
