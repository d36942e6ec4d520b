//! Certificate files: a self-describing binary container, written
//! atomically, with an end-to-end checksum.
//!
//! Layout: 8-byte magic, u32 version, u32 header length, a text header of
//! `key = value` lines carrying grid metadata and scalars, the three field
//! arrays as interleaved re/im little-endian f64 in row-major site order,
//! and a SHA-256 of everything before it.  Scalars go through `f64`'s
//! `Display`, which round-trips exactly.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use eigenforge::{
    build_grid, Certificate, DispersionSymbol, Field, FourierGrid, RegionShape, RegionSpec,
    Result, SpectralError,
};
use num_complex::Complex64;
use sha2::{Digest, Sha256};

const MAGIC: &[u8; 8] = b"FORGECRT";
const VERSION: u32 = 1;
const LAYOUT: &str = "interleaved_re_im_f64_le";
const ARRAYS: [&str; 3] = ["phi", "psi", "potential"];

/// Write `bytes` to `path` through a temp file in the same directory plus
/// a rename, so readers never observe a half-written file.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| SpectralError::Io(e.error))?;
    Ok(())
}

fn corrupt(msg: &str) -> SpectralError {
    SpectralError::CorruptCertificate(msg.to_string())
}

fn symbol_descriptor(symbol: &DispersionSymbol) -> Result<String> {
    match symbol {
        DispersionSymbol::Laplacian => Ok("laplacian".to_string()),
        DispersionSymbol::Fractional { s } => Ok(format!("fractional {s}")),
        DispersionSymbol::Tabulated { .. } => Err(SpectralError::Unsupported(
            "tabulated symbols have no stable file descriptor".into(),
        )),
    }
}

fn parse_symbol(text: &str) -> Result<DispersionSymbol> {
    let mut parts = text.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some("laplacian"), None, _) => Ok(DispersionSymbol::Laplacian),
        (Some("fractional"), Some(s), None) => {
            DispersionSymbol::fractional(parse_f64("symbol", s)?)
        }
        _ => Err(corrupt(&format!("unrecognized symbol descriptor `{text}`"))),
    }
}

fn shape_descriptor(shape: &RegionShape) -> &'static str {
    match shape {
        RegionShape::Tube => "tube",
        RegionShape::Ball => "ball",
    }
}

fn parse_shape(text: &str) -> Result<RegionShape> {
    match text {
        "tube" => Ok(RegionShape::Tube),
        "ball" => Ok(RegionShape::Ball),
        other => Err(corrupt(&format!("unrecognized region shape `{other}`"))),
    }
}

fn parse_f64(key: &str, text: &str) -> Result<f64> {
    text.parse()
        .map_err(|_| corrupt(&format!("header key `{key}`: cannot parse `{text}` as a number")))
}

fn parse_f64_list(key: &str, text: &str) -> Result<Vec<f64>> {
    text.split_whitespace().map(|t| parse_f64(key, t)).collect()
}

fn render_header(cert: &Certificate) -> Result<String> {
    let grid = cert.potential.grid();
    let mut h = String::new();
    let lengths: Vec<String> = grid.lengths().iter().map(|l| l.to_string()).collect();
    let sizes: Vec<String> = grid.sizes().iter().map(|n| n.to_string()).collect();
    let center: Vec<String> = cert.region.center.iter().map(|c| c.to_string()).collect();
    let q_norms: Vec<String> = cert
        .q_norms
        .iter()
        .map(|(q, v)| format!("{q}:{v}"))
        .collect();
    h.push_str(&format!("dimension = {}\n", grid.dimension()));
    h.push_str(&format!("lengths = {}\n", lengths.join(" ")));
    h.push_str(&format!("sizes = {}\n", sizes.join(" ")));
    h.push_str(&format!("symbol = {}\n", symbol_descriptor(&cert.symbol)?));
    h.push_str(&format!("lambda = {}\n", cert.lambda));
    h.push_str(&format!("eps = {}\n", cert.eps));
    h.push_str(&format!(
        "region_shape = {}\n",
        shape_descriptor(&cert.region.shape)
    ));
    h.push_str(&format!("region_eps = {}\n", cert.region.eps));
    h.push_str(&format!("region_m = {}\n", cert.region.m));
    h.push_str(&format!("region_center = {}\n", center.join(" ")));
    h.push_str(&format!("region_axis_scale = {}\n", cert.region.axis_scale));
    h.push_str(&format!("mu = {}\n", cert.mu));
    h.push_str(&format!("residual = {}\n", cert.residual));
    h.push_str(&format!("nodal_fraction = {}\n", cert.nodal_fraction));
    h.push_str(&format!("q_norms = {}\n", q_norms.join(" ")));
    h.push_str(&format!("arrays = {}\n", ARRAYS.join(" ")));
    h.push_str(&format!("layout = {LAYOUT}\n"));
    Ok(h)
}

fn push_field(buf: &mut Vec<u8>, f: &Field) {
    for v in f.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
}

/// Serialize the certificate to `path`; the write is atomic.
pub fn save_certificate(cert: &Certificate, path: &Path) -> Result<()> {
    let header = render_header(cert)?;
    let mut buf = Vec::with_capacity(
        MAGIC.len() + 8 + header.len() + 48 * cert.potential.grid().site_count() + 32,
    );
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(header.len() as u32).to_le_bytes());
    buf.extend_from_slice(header.as_bytes());
    push_field(&mut buf, &cert.phi);
    push_field(&mut buf, &cert.psi);
    push_field(&mut buf, &cert.potential);
    let digest = Sha256::digest(&buf);
    buf.extend_from_slice(&digest);
    atomic_write(path, &buf)
}

struct Header {
    keys: Vec<(String, String)>,
}

impl Header {
    fn parse(text: &str) -> Result<Header> {
        let mut keys = Vec::new();
        for line in text.lines() {
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| corrupt(&format!("malformed header line `{line}`")))?;
            let k = k.trim().to_string();
            if keys.iter().any(|(seen, _)| *seen == k) {
                return Err(corrupt(&format!("duplicate header key `{k}`")));
            }
            keys.push((k, v.trim().to_string()));
        }
        Ok(Header { keys })
    }

    fn take(&self, key: &str) -> Result<&str> {
        self.keys
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| corrupt(&format!("header is missing key `{key}`")))
    }
}

fn read_field(
    grid: &Arc<FourierGrid>,
    bytes: &[u8],
    offset: &mut usize,
) -> Result<Field> {
    let sites = grid.site_count();
    let need = sites * 16;
    if bytes.len() < *offset + need {
        return Err(corrupt("array section is truncated"));
    }
    let mut values = Vec::with_capacity(sites);
    for i in 0..sites {
        let at = *offset + 16 * i;
        let re = f64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
        let im = f64::from_le_bytes(bytes[at + 8..at + 16].try_into().unwrap());
        values.push(Complex64::new(re, im));
    }
    *offset += need;
    Field::from_values(grid, values)
}

/// Read a certificate back; checksum, version, and structural damage all
/// surface as errors rather than bad data.
pub fn load_certificate(path: &Path) -> Result<Certificate> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < MAGIC.len() + 8 + 32 {
        return Err(corrupt("file is shorter than the fixed framing"));
    }
    if &bytes[..8] != MAGIC {
        return Err(corrupt("bad magic; not a certificate file"));
    }
    let body_end = bytes.len() - 32;
    let digest = Sha256::digest(&bytes[..body_end]);
    if digest.as_slice() != &bytes[body_end..] {
        return Err(corrupt("checksum mismatch"));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version > VERSION {
        return Err(SpectralError::Unsupported(format!(
            "certificate version {version} is newer than this reader"
        )));
    }
    let header_len = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    if 16 + header_len > body_end {
        return Err(corrupt("declared header overruns the file"));
    }
    let header_text = std::str::from_utf8(&bytes[16..16 + header_len])
        .map_err(|_| corrupt("header is not UTF-8"))?;
    let header = Header::parse(header_text)?;

    let dimension: usize = header
        .take("dimension")?
        .parse()
        .map_err(|_| corrupt("dimension is not an integer"))?;
    let lengths = parse_f64_list("lengths", header.take("lengths")?)?;
    let sizes: Vec<usize> = header
        .take("sizes")?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| corrupt("sizes must be integers")))
        .collect::<Result<_>>()?;
    let grid = build_grid(dimension, &lengths, &sizes)?;

    if header.take("layout")? != LAYOUT {
        return Err(SpectralError::Unsupported(format!(
            "unknown array layout `{}`",
            header.take("layout")?
        )));
    }
    let names: Vec<&str> = header.take("arrays")?.split_whitespace().collect();
    if names != ARRAYS {
        return Err(corrupt(&format!(
            "unexpected array list `{}`",
            header.take("arrays")?
        )));
    }

    let mut offset = 16 + header_len;
    let phi = read_field(&grid, &bytes[..body_end], &mut offset)?;
    let psi = read_field(&grid, &bytes[..body_end], &mut offset)?;
    let potential = read_field(&grid, &bytes[..body_end], &mut offset)?;
    if offset != body_end {
        return Err(corrupt("trailing bytes after the declared arrays"));
    }

    let mut q_norms = Vec::new();
    let q_text = header.take("q_norms")?;
    for pair in q_text.split_whitespace() {
        let (q, v) = pair
            .split_once(':')
            .ok_or_else(|| corrupt(&format!("malformed q_norms entry `{pair}`")))?;
        q_norms.push((parse_f64("q_norms", q)?, parse_f64("q_norms", v)?));
    }

    let region = RegionSpec {
        shape: parse_shape(header.take("region_shape")?)?,
        eps: parse_f64("region_eps", header.take("region_eps")?)?,
        m: parse_f64("region_m", header.take("region_m")?)?,
        center: parse_f64_list("region_center", header.take("region_center")?)?,
        axis_scale: parse_f64("region_axis_scale", header.take("region_axis_scale")?)?,
    };

    Ok(Certificate {
        symbol: parse_symbol(header.take("symbol")?)?,
        lambda: parse_f64("lambda", header.take("lambda")?)?,
        eps: parse_f64("eps", header.take("eps")?)?,
        region,
        mu: parse_f64("mu", header.take("mu")?)?,
        phi,
        psi,
        potential,
        residual: parse_f64("residual", header.take("residual")?)?,
        nodal_fraction: parse_f64("nodal_fraction", header.take("nodal_fraction")?)?,
        q_norms,
    })
}
