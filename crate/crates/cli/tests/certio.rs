use std::f64::consts::PI;
use std::sync::Arc;

use eigenforge::{
    build_grid, verify_certificate, Certificate, DispersionSymbol, Field, FourierGrid,
    RegionSpec, SpectralError,
};
use eigenforge_cli::certio::{load_certificate, save_certificate};
use num_complex::Complex64;
use sha2::{Digest, Sha256};

fn xorshift(state: &mut u64) -> f64 {
    let mut x = *state;
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    *state = x;
    // Uniform in (-1, 1) from the top 53 bits.
    (x >> 11) as f64 / (1u64 << 52) as f64 - 1.0
}

fn synth_field(grid: &Arc<FourierGrid>, seed: u64) -> Field {
    let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).max(1);
    let values: Vec<Complex64> = (0..grid.site_count())
        .map(|_| Complex64::new(xorshift(&mut state), xorshift(&mut state)))
        .collect();
    Field::from_values(grid, values).unwrap()
}

fn synth_cert() -> Certificate {
    let grid = build_grid(2, &[2.0 * PI * 4.0, 2.0 * PI * 3.0], &[27, 15]).unwrap();
    let mut region = RegionSpec::tube(0.3, 1.5);
    region.axis_scale = 1.25;
    region.center = vec![0.5, -0.25];
    Certificate {
        symbol: DispersionSymbol::Laplacian,
        lambda: 1.0,
        eps: 0.3,
        region,
        mu: PI,
        phi: synth_field(&grid, 1),
        psi: synth_field(&grid, 2),
        potential: synth_field(&grid, 3),
        residual: 1.25e-9,
        nodal_fraction: 0.0078125,
        q_norms: vec![(1.0, 3.5), (2.5, 0.7121498)],
    }
}

fn assert_fields_identical(a: &Field, b: &Field) {
    assert_eq!(a.grid().lengths(), b.grid().lengths());
    assert_eq!(a.grid().sizes(), b.grid().sizes());
    for (x, y) in a.values().iter().zip(b.values()) {
        assert_eq!(x.re.to_bits(), y.re.to_bits());
        assert_eq!(x.im.to_bits(), y.im.to_bits());
    }
}

#[test]
fn roundtrip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.crt");
    let cert = synth_cert();
    save_certificate(&cert, &path).unwrap();
    let back = load_certificate(&path).unwrap();

    assert!(matches!(back.symbol, DispersionSymbol::Laplacian));
    assert_eq!(back.lambda.to_bits(), cert.lambda.to_bits());
    assert_eq!(back.eps.to_bits(), cert.eps.to_bits());
    assert_eq!(back.region, cert.region);
    assert_eq!(back.mu.to_bits(), cert.mu.to_bits());
    assert_eq!(back.residual.to_bits(), cert.residual.to_bits());
    assert_eq!(back.nodal_fraction.to_bits(), cert.nodal_fraction.to_bits());
    assert_eq!(back.q_norms, cert.q_norms);
    assert_fields_identical(&back.phi, &cert.phi);
    assert_fields_identical(&back.psi, &cert.psi);
    assert_fields_identical(&back.potential, &cert.potential);

    // Re-verification sees exactly the same object, defects included.
    let a = verify_certificate(&cert, 1e-3).unwrap();
    let b = verify_certificate(&back, 1e-3).unwrap();
    assert_eq!(a.residual.to_bits(), b.residual.to_bits());
    assert_eq!(a.failures, b.failures);
    assert_eq!(a.pass, b.pass);

    // Saving again reproduces the file byte for byte.
    let first = std::fs::read(&path).unwrap();
    save_certificate(&cert, &path).unwrap();
    assert_eq!(first, std::fs::read(&path).unwrap());
}

#[test]
fn fractional_symbol_roundtrips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.crt");
    let mut cert = synth_cert();
    cert.symbol = DispersionSymbol::fractional(1.0).unwrap();
    save_certificate(&cert, &path).unwrap();
    match load_certificate(&path).unwrap().symbol {
        DispersionSymbol::Fractional { s } => assert_eq!(s, 1.0),
        other => panic!("expected the fractional symbol back, got {other:?}"),
    }
}

#[test]
fn save_leaves_no_temp_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.crt");
    save_certificate(&synth_cert(), &path).unwrap();
    let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(entries.len(), 1);
}

#[test]
fn tabulated_symbols_are_not_serializable() {
    let cert = synth_cert();
    let grid = cert.potential.grid().clone();
    let mut cert = cert;
    cert.symbol =
        DispersionSymbol::tabulated(&grid, vec![0.0; grid.site_count()]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    match save_certificate(&cert, &dir.path().join("cert.crt")) {
        Err(SpectralError::Unsupported(_)) => {}
        other => panic!("expected unsupported, got {other:?}"),
    }
}

fn expect_corrupt(bytes: &[u8], needle: &str) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.crt");
    std::fs::write(&path, bytes).unwrap();
    match load_certificate(&path) {
        Err(SpectralError::CorruptCertificate(msg)) => {
            assert!(msg.contains(needle), "message `{msg}` lacks `{needle}`")
        }
        other => panic!("expected corruption error, got {other:?}"),
    }
}

fn saved_bytes() -> Vec<u8> {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.crt");
    save_certificate(&synth_cert(), &path).unwrap();
    std::fs::read(&path).unwrap()
}

#[test]
fn damage_is_detected() {
    let bytes = saved_bytes();

    let mut truncated = bytes.clone();
    truncated.truncate(bytes.len() - 10);
    expect_corrupt(&truncated, "checksum");

    expect_corrupt(&bytes[..20], "framing");
    expect_corrupt(b"FORGE", "framing");

    let mut wrong_magic = bytes.clone();
    wrong_magic[0] = b'X';
    expect_corrupt(&wrong_magic, "magic");

    // One flipped bit deep inside an array.
    let mut flipped = bytes.clone();
    let mid = bytes.len() / 2;
    flipped[mid] ^= 0x40;
    expect_corrupt(&flipped, "checksum");
}

#[test]
fn future_versions_are_refused() {
    let mut bytes = saved_bytes();
    bytes[8] = 2;
    // Re-seal so the version check is what trips, not the checksum.
    let body = bytes.len() - 32;
    let digest = Sha256::digest(&bytes[..body]);
    bytes[body..].copy_from_slice(&digest);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.crt");
    std::fs::write(&path, &bytes).unwrap();
    match load_certificate(&path) {
        Err(SpectralError::Unsupported(msg)) => assert!(msg.contains("version 2")),
        other => panic!("expected unsupported version, got {other:?}"),
    }
}

#[test]
fn missing_files_surface_as_io_errors() {
    match load_certificate(std::path::Path::new("/nonexistent/cert.crt")) {
        Err(SpectralError::Io(_)) => {}
        other => panic!("expected io error, got {other:?}"),
    }
}
