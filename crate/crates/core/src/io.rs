//! File formats: sample CSV, a compact binary sample container, and JSON
//! for spectral components, models, and split manifests.
//!
//! Every float written to CSV uses 17 significant digits so a read-back
//! reproduces the exact bit pattern; JSON floats round-trip through the
//! shortest-representation encoder. Writers emit fields in a fixed order,
//! which keeps repeated runs byte-identical.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read as _, Write as _};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::afd::{Approximant, Atom};
use crate::error::{AfdError, Result};
use crate::hardy::{BoundarySamples, OctantSignature, SpectralRep};
use crate::numerics::grid::Grid;

const MAGIC: &[u8; 4] = b"AFDT";
const VERSION: u8 = 1;
const FLAG_REAL: u8 = 1;

/// 17 significant digits: enough to reproduce any f64 exactly.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(field: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|e| AfdError::Parse(format!("bad float {field:?}: {e}")))
}

/// Write a CSV table with the given header; cells are already formatted.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        if row.len() != header.len() {
            return Err(AfdError::InvalidParameter(format!(
                "row has {} cells, header has {}",
                row.len(),
                header.len()
            )));
        }
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

fn sample_header(dim: usize) -> Vec<&'static str> {
    match dim {
        1 => vec!["x1", "re", "im"],
        _ => vec!["x1", "x2", "re", "im"],
    }
}

/// Boundary samples as CSV, row-major with the last axis fastest.
pub fn write_samples_csv(path: &Path, s: &BoundarySamples) -> Result<()> {
    write_grid_values_csv(path, &s.grid, &s.values)
}

/// Any per-grid-point complex values in the sample CSV layout.
pub fn write_grid_values_csv(path: &Path, grid: &Grid, values: &[Complex64]) -> Result<()> {
    if values.len() != grid.len() {
        return Err(AfdError::GridMismatch(format!(
            "{} values for a grid of {} points",
            values.len(),
            grid.len()
        )));
    }
    let dim = grid.dim();
    let mut rows = Vec::with_capacity(values.len());
    for (k, v) in values.iter().enumerate() {
        let idx = grid.unflat(k);
        let mut row: Vec<String> =
            grid.point(&idx).into_iter().map(format_float).collect();
        row.push(format_float(v.re));
        row.push(format_float(v.im));
        rows.push(row);
    }
    write_csv(path, &sample_header(dim), &rows)
}

fn infer_axis(coords: &[f64], axis: usize) -> Result<(f64, f64)> {
    let n = coords.len();
    if n < 2 {
        return Err(AfdError::Parse(format!("axis {axis} needs at least 2 grid points")));
    }
    let x0 = coords[0];
    let dx = (coords[n - 1] - x0) / (n as f64 - 1.0);
    if !(dx.is_finite() && dx > 0.0) {
        return Err(AfdError::Parse(format!("axis {axis} coordinates are not increasing")));
    }
    let scale = coords.iter().fold(1.0f64, |m, c| m.max(c.abs()));
    for (k, &c) in coords.iter().enumerate() {
        let expect = x0 + k as f64 * dx;
        if (c - expect).abs() > 1e-9 * scale {
            return Err(AfdError::Parse(format!(
                "axis {axis} is not uniformly spaced near coordinate {c}"
            )));
        }
    }
    Ok((x0, dx))
}

/// Read boundary samples from CSV. The file must be row-major with the last
/// axis fastest and each axis uniformly spaced.
pub fn read_samples_csv(path: &Path, declared_real: bool) -> Result<BoundarySamples> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| AfdError::Parse(format!("{}: {e}", path.display())))?;
    let header = rdr
        .headers()
        .map_err(|e| AfdError::Parse(e.to_string()))?
        .clone();
    let dim = match header.len() {
        3 => 1,
        4 => 2,
        k => return Err(AfdError::Parse(format!("expected 3 or 4 columns, found {k}"))),
    };
    for (got, want) in header.iter().zip(sample_header(dim)) {
        if !got.eq_ignore_ascii_case(want) {
            return Err(AfdError::Parse(format!("expected column {want:?}, found {got:?}")));
        }
    }

    let mut coords: Vec<Vec<f64>> = Vec::new();
    let mut values: Vec<Complex64> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| AfdError::Parse(e.to_string()))?;
        if record.len() != header.len() {
            return Err(AfdError::Parse(format!(
                "row {} has {} fields",
                values.len() + 2,
                record.len()
            )));
        }
        let mut x = Vec::with_capacity(dim);
        for a in 0..dim {
            x.push(parse_f64(&record[a])?);
        }
        let re = parse_f64(&record[dim])?;
        let im = parse_f64(&record[dim + 1])?;
        coords.push(x);
        values.push(Complex64::new(re, im));
    }
    if values.is_empty() {
        return Err(AfdError::Parse("no data rows".into()));
    }

    let grid = match dim {
        1 => {
            let xs: Vec<f64> = coords.iter().map(|c| c[0]).collect();
            let (x0, dx) = infer_axis(&xs, 0)?;
            Grid::new(vec![xs.len()], vec![x0], vec![dx])?
        }
        _ => {
            let first = coords[0][0];
            let n1 = coords
                .iter()
                .position(|c| c[0] != first)
                .unwrap_or(coords.len());
            if coords.len() % n1 != 0 {
                return Err(AfdError::Parse(format!(
                    "{} rows do not factor over {} inner points",
                    coords.len(),
                    n1
                )));
            }
            let n0 = coords.len() / n1;
            let ax1: Vec<f64> = coords[..n1].iter().map(|c| c[1]).collect();
            let ax0: Vec<f64> = (0..n0).map(|i| coords[i * n1][0]).collect();
            let (o1, d1) = infer_axis(&ax1, 1)?;
            let (o0, d0) = infer_axis(&ax0, 0)?;
            let grid = Grid::new(vec![n0, n1], vec![o0, o1], vec![d0, d1])?;
            for (k, c) in coords.iter().enumerate() {
                let p = grid.point(&grid.unflat(k));
                let ok = p
                    .iter()
                    .zip(c)
                    .all(|(a, b)| (a - b).abs() <= 1e-9 * (1.0 + a.abs()));
                if !ok {
                    return Err(AfdError::Parse(format!(
                        "row {} coordinate {c:?} is off the inferred lattice",
                        k + 2
                    )));
                }
            }
            grid
        }
    };
    BoundarySamples::new(grid, values, declared_real)
}

/// Write samples in the binary container: a 32-byte header (magic,
/// version, flags, dim, per-axis counts, per-axis half-extents) followed by
/// row-major (re, im) pairs of f64, all little-endian. The grid is always
/// centered: `x_k = -L + k * 2L / count`.
pub fn write_samples_binary(path: &Path, s: &BoundarySamples) -> Result<()> {
    let dim = s.grid.dim();
    let counts = s.grid.counts();
    for a in 0..dim {
        let l = s.grid.half_width(a);
        let expect = -l;
        if (s.grid.origins()[a] - expect).abs() > 1e-12 * (1.0 + l) {
            return Err(AfdError::GridMismatch(
                "binary container requires a centered grid".into(),
            ));
        }
    }
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(MAGIC)?;
    out.write_all(&[VERSION, if s.declared_real { FLAG_REAL } else { 0 }])?;
    out.write_all(&(dim as u16).to_le_bytes())?;
    out.write_all(&(counts[0] as u32).to_le_bytes())?;
    let c1 = if dim == 2 { counts[1] as u32 } else { 1 };
    out.write_all(&c1.to_le_bytes())?;
    out.write_all(&s.grid.half_width(0).to_le_bytes())?;
    let e1 = if dim == 2 { s.grid.half_width(1) } else { 0.0 };
    out.write_all(&e1.to_le_bytes())?;
    for v in &s.values {
        out.write_all(&v.re.to_le_bytes())?;
        out.write_all(&v.im.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_samples_binary(path: &Path) -> Result<BoundarySamples> {
    let mut file = BufReader::new(File::open(path)?);
    let mut header = [0u8; 32];
    file.read_exact(&mut header)
        .map_err(|_| AfdError::Parse("file too short for a binary sample header".into()))?;
    if &header[0..4] != MAGIC {
        return Err(AfdError::Parse("bad magic; not a binary sample file".into()));
    }
    if header[4] != VERSION {
        return Err(AfdError::Parse(format!("unsupported container version {}", header[4])));
    }
    let declared_real = header[5] & FLAG_REAL != 0;
    let dim = u16::from_le_bytes([header[6], header[7]]) as usize;
    if dim == 0 || dim > 2 {
        return Err(AfdError::Parse(format!("unsupported dimension {dim}")));
    }
    let c0 = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    let c1 = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
    let e0 = f64::from_le_bytes(header[16..24].try_into().unwrap());
    let e1 = f64::from_le_bytes(header[24..32].try_into().unwrap());

    let grid = if dim == 1 {
        if c1 != 1 {
            return Err(AfdError::Parse(format!("1-d container with inner count {c1}")));
        }
        Grid::centered(&[c0], &[e0])?
    } else {
        Grid::centered(&[c0, c1], &[e0, e1])?
    };

    let mut payload = Vec::new();
    file.read_to_end(&mut payload)?;
    let expect = grid.len() * 16;
    if payload.len() != expect {
        return Err(AfdError::Parse(format!(
            "payload is {} bytes, expected {expect}",
            payload.len()
        )));
    }
    let values: Vec<Complex64> = payload
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[0..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..16].try_into().unwrap()),
            )
        })
        .collect();
    BoundarySamples::new(grid, values, declared_real)
}

/// Read samples from either format, sniffing the binary magic when the
/// extension is ambiguous. `declared_real` tightens the realness contract
/// on top of whatever the file itself declares.
pub fn read_samples(path: &Path, declared_real: bool) -> Result<BoundarySamples> {
    let binary = match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => false,
        Some("afdt") => true,
        _ => {
            let mut head = [0u8; 4];
            let mut f = File::open(path)?;
            matches!(f.read(&mut head), Ok(4)) && &head == MAGIC
        }
    };
    let s = if binary { read_samples_binary(path)? } else { return read_samples_csv(path, declared_real) };
    if declared_real && !s.declared_real {
        BoundarySamples::new(s.grid, s.values, true)
    } else {
        Ok(s)
    }
}

#[derive(Serialize, Deserialize)]
struct AtomDto {
    alpha: Vec<u32>,
    z_re: Vec<f64>,
    z_im: Vec<f64>,
    coeff_re: f64,
    coeff_im: f64,
}

#[derive(Serialize, Deserialize)]
struct ModelDto {
    dim: usize,
    sigma: Vec<i8>,
    atoms: Vec<AtomDto>,
    /// Row-major (re, im) pairs of the m x m basis matrix.
    bmatrix: Vec<[f64; 2]>,
    residual_history: Vec<f64>,
}

pub fn write_model(path: &Path, model: &Approximant) -> Result<()> {
    let dto = ModelDto {
        dim: model.dim(),
        sigma: model.sigma().signs().to_vec(),
        atoms: model
            .atoms()
            .iter()
            .map(|a| AtomDto {
                alpha: a.alpha.clone(),
                z_re: a.z.iter().map(|z| z.re).collect(),
                z_im: a.z.iter().map(|z| z.im).collect(),
                coeff_re: a.coeff.re,
                coeff_im: a.coeff.im,
            })
            .collect(),
        bmatrix: model.bmatrix().iter().map(|b| [b.re, b.im]).collect(),
        residual_history: model.residual_history().to_vec(),
    };
    write_json(path, &dto)
}

pub fn read_model(path: &Path) -> Result<Approximant> {
    let dto: ModelDto = read_json(path)?;
    let sigma = OctantSignature::new(dto.sigma)?;
    if sigma.dim() != dto.dim {
        return Err(AfdError::DimensionMismatch { expected: dto.dim, got: sigma.dim() });
    }
    let atoms = dto
        .atoms
        .into_iter()
        .map(|a| {
            if a.z_re.len() != a.z_im.len() {
                return Err(AfdError::Parse("atom re/im lists differ in length".into()));
            }
            Ok(Atom {
                alpha: a.alpha,
                z: a.z_re
                    .iter()
                    .zip(&a.z_im)
                    .map(|(&re, &im)| Complex64::new(re, im))
                    .collect(),
                coeff: Complex64::new(a.coeff_re, a.coeff_im),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let bmatrix = dto.bmatrix.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
    Approximant::from_parts(sigma, atoms, bmatrix, dto.residual_history)
}

#[derive(Serialize, Deserialize)]
struct ComponentDto {
    dim: usize,
    sigma: Vec<i8>,
    counts: Vec<usize>,
    origins: Vec<f64>,
    spacings: Vec<f64>,
    /// Row-major (re, im) pairs of the spectral density.
    density: Vec<[f64; 2]>,
}

pub fn write_component(path: &Path, rep: &SpectralRep) -> Result<()> {
    let g = rep.grid();
    let dto = ComponentDto {
        dim: rep.dim(),
        sigma: rep.sigma().signs().to_vec(),
        counts: g.counts().to_vec(),
        origins: g.origins().to_vec(),
        spacings: g.spacings().to_vec(),
        density: rep.density().iter().map(|v| [v.re, v.im]).collect(),
    };
    write_json(path, &dto)
}

pub fn read_component(path: &Path) -> Result<SpectralRep> {
    let dto: ComponentDto = read_json(path)?;
    let sigma = OctantSignature::new(dto.sigma)?;
    if sigma.dim() != dto.dim {
        return Err(AfdError::DimensionMismatch { expected: dto.dim, got: sigma.dim() });
    }
    let grid = Grid::new(dto.counts, dto.origins, dto.spacings)?;
    let density = dto.density.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
    SpectralRep::new(sigma, grid, density)
}

/// Sniff whether a JSON input is a spectral component (as opposed to raw
/// samples or a model) without fully parsing it.
pub fn is_component_file(path: &Path) -> bool {
    let Ok(mut f) = File::open(path) else { return false };
    let mut head = [0u8; 512];
    let Ok(k) = f.read(&mut head) else { return false };
    let text = String::from_utf8_lossy(&head[..k]);
    text.trim_start().starts_with('{') && text.contains("\"density\"")
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct ManifestComponent {
    pub sigma: Vec<i8>,
    pub path: String,
    pub norm: f64,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct SplitManifest {
    pub dim: usize,
    pub components: Vec<ManifestComponent>,
    /// Max pointwise reconstruction error against the ingested samples.
    pub reconstruction_error: f64,
}

pub fn write_manifest(path: &Path, m: &SplitManifest) -> Result<()> {
    write_json(path, m)
}

pub fn read_manifest(path: &Path) -> Result<SplitManifest> {
    read_json(path)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)
        .map_err(|e| AfdError::Parse(format!("{}: {e}", path.display())))?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let file = BufReader::new(File::open(path)?);
    serde_json::from_reader(file).map_err(|e| AfdError::Parse(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn tmp(name: &str) -> PathBuf {
        let mut p = std::env::temp_dir();
        p.push(format!("afd-tube-io-{}-{name}", std::process::id()));
        p
    }

    fn samples_1d() -> BoundarySamples {
        let grid = Grid::centered(&[8], &[4.0]).unwrap();
        let values: Vec<Complex64> = (0..8)
            .map(|k| Complex64::new(0.1 * k as f64 - 0.3, (k as f64).sin()))
            .collect();
        BoundarySamples::new(grid, values, false).unwrap()
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let s = samples_1d();
        let p = tmp("roundtrip.csv");
        write_samples_csv(&p, &s).unwrap();
        let r = read_samples_csv(&p, false).unwrap();
        assert_eq!(r.grid.counts(), s.grid.counts());
        assert_eq!(r.grid.origins(), s.grid.origins());
        assert_eq!(r.values, s.values);
        std::fs::remove_file(&p).ok();
    }

    #[test]
    fn csv_roundtrip_is_exact_2d() {
        let grid = Grid::centered(&[8, 8], &[2.0, 4.0]).unwrap();
        let values: Vec<Complex64> = (0..64)
            .map(|k| Complex64::new((k as f64).cos(), 0.25 * k as f64))
            .collect();
        let s = BoundarySamples::new(grid, values, false).unwrap();
        let p = tmp("roundtrip2.csv");
        write_samples_csv(&p, &s).unwrap();
        let r = read_samples_csv(&p, false).unwrap();
        assert_eq!(r.grid.counts(), s.grid.counts());
        assert_eq!(r.grid.spacings(), s.grid.spacings());
        assert_eq!(r.values, s.values);
        std::fs::remove_file(&p).ok();
    }

    #[test]
    fn binary_roundtrip_is_exact() {
        let s = samples_1d();
        let p = tmp("roundtrip.afdt");
        write_samples_binary(&p, &s).unwrap();
        let r = read_samples_binary(&p).unwrap();
        assert_eq!(r.grid.counts(), s.grid.counts());
        assert_eq!(r.values, s.values);
        assert!(!r.declared_real);
        let meta = std::fs::metadata(&p).unwrap();
        assert_eq!(meta.len(), 32 + 8 * 16);
        std::fs::remove_file(&p).ok();
    }

    #[test]
    fn sniffing_dispatches_between_formats() {
        let s = samples_1d();
        let pb = tmp("sniff.dat");
        write_samples_binary(&pb, &s).unwrap();
        let r = read_samples(&pb, false).unwrap();
        assert_eq!(r.values, s.values);
        std::fs::remove_file(&pb).ok();
    }

    #[test]
    fn malformed_csv_is_a_parse_error() {
        let p = tmp("bad.csv");
        std::fs::write(&p, "x1,re,im\n0.0,1.0,0.0\n0.5,zzz,0.0\n").unwrap();
        let err = read_samples_csv(&p, false).unwrap_err();
        assert!(matches!(err, AfdError::Parse(_)), "{err:?}");
        std::fs::write(&p, "x1,re,im\n0.0,1.0,0.0\n0.5,1.0,0.0\n1.7,1.0,0.0\n").unwrap();
        let err = read_samples_csv(&p, false).unwrap_err();
        assert!(matches!(err, AfdError::Parse(_)), "{err:?}");
        std::fs::remove_file(&p).ok();
    }

    #[test]
    fn real_declaration_rejects_complex_data() {
        let s = samples_1d();
        let p = tmp("real.csv");
        write_samples_csv(&p, &s).unwrap();
        assert!(read_samples_csv(&p, true).is_err());
        std::fs::remove_file(&p).ok();
    }
}
