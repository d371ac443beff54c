//! Sampling grids and the on-disk kernel dump.
//!
//! A dump is a pair of files: `<path>.json` (the [`Manifest`]) and
//! `<path>.bin`, little-endian `f64` values laid out as
//! `[basis][point][row][col]`, each entry followed by its imaginary part when
//! the case is complex.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analytic::{analytic_basis, KernelBasisElement};
use crate::error::{invalid, Error, Result};
use crate::groups::{Orbit, OrbitPoint};
use crate::irreps::Field;
use crate::solver::CaseSpec;

/// Bumped on any change of the manifest or payload layout.
pub const FORMAT_VERSION: u32 = 1;

/// Sampling grid on one orbit.
///
/// Point order: angles first, `β` (or the last listed coordinate) varying
/// fastest. Sphere `β_k = π(k + ½)/N_β`; hyperboloid and cone
/// `η_k = η_max·k/(N_η − 1)` (only `η = 0` when `N_η = 1`); cone points are
/// `e^η·(1, n̂)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GridSpec {
    Circle { radius: f64, n: usize },
    Sphere { radius: f64, n_alpha: usize, n_beta: usize },
    Hyperboloid { mass: f64, n_alpha: usize, n_beta: usize, n_eta: usize, eta_max: f64 },
    Cone { n_alpha: usize, n_beta: usize, n_eta: usize, eta_max: f64 },
}

impl GridSpec {
    pub fn orbit(&self) -> Orbit {
        match *self {
            GridSpec::Circle { radius, .. } => Orbit::Circle { radius },
            GridSpec::Sphere { radius, .. } => Orbit::Sphere { radius },
            GridSpec::Hyperboloid { mass, .. } => Orbit::Massive { mass },
            GridSpec::Cone { .. } => Orbit::Null,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.orbit().validate()?;
        let (counts, eta_max): (Vec<usize>, Option<f64>) = match *self {
            GridSpec::Circle { n, .. } => (vec![n], None),
            GridSpec::Sphere { n_alpha, n_beta, .. } => (vec![n_alpha, n_beta], None),
            GridSpec::Hyperboloid { n_alpha, n_beta, n_eta, eta_max, .. } | GridSpec::Cone { n_alpha, n_beta, n_eta, eta_max } => {
                (vec![n_alpha, n_beta, n_eta], Some(eta_max))
            }
        };
        if counts.iter().any(|&c| c == 0) {
            return invalid(format!("grid resolutions must be at least 1: {self:?}"));
        }
        if counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c)).is_none() {
            return invalid("grid is too large");
        }
        if let Some(e) = eta_max {
            if !(e.is_finite() && e > 0.0) {
                return invalid(format!("eta_max must be positive and finite, got {e}"));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        match *self {
            GridSpec::Circle { n, .. } => n,
            GridSpec::Sphere { n_alpha, n_beta, .. } => n_alpha * n_beta,
            GridSpec::Hyperboloid { n_alpha, n_beta, n_eta, .. } | GridSpec::Cone { n_alpha, n_beta, n_eta, .. } => {
                n_alpha * n_beta * n_eta
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Result<Vec<OrbitPoint>> {
        use std::f64::consts::{PI, TAU};
        self.validate()?;
        let alpha = |i: usize, n: usize| TAU * i as f64 / n as f64;
        let beta = |k: usize, n: usize| PI * (k as f64 + 0.5) / n as f64;
        let eta = |k: usize, n: usize, max: f64| if n == 1 { 0.0 } else { max * k as f64 / (n - 1) as f64 };
        let mut v = Vec::with_capacity(self.len());
        match *self {
            GridSpec::Circle { radius, n } => v.extend((0..n).map(|i| OrbitPoint::circle(radius, alpha(i, n)))),
            GridSpec::Sphere { radius, n_alpha, n_beta } => {
                for i in 0..n_alpha {
                    v.extend((0..n_beta).map(|k| OrbitPoint::sphere(radius, alpha(i, n_alpha), beta(k, n_beta))));
                }
            }
            GridSpec::Hyperboloid { mass, n_alpha, n_beta, n_eta, eta_max } => {
                for i in 0..n_alpha {
                    for k in 0..n_beta {
                        v.extend((0..n_eta).map(|e| {
                            OrbitPoint::massive(mass, alpha(i, n_alpha), beta(k, n_beta), eta(e, n_eta, eta_max))
                        }));
                    }
                }
            }
            GridSpec::Cone { n_alpha, n_beta, n_eta, eta_max } => {
                for i in 0..n_alpha {
                    for k in 0..n_beta {
                        v.extend((0..n_eta).map(|e| OrbitPoint::null(alpha(i, n_alpha), beta(k, n_beta), eta(e, n_eta, eta_max))));
                    }
                }
            }
        }
        Ok(v)
    }

    /// Parses `circle:N[:R]`, `sphere:NA,NB[:R]`, `hyperboloid:NA,NB,NE,EMAX[:M]`
    /// or `cone:NA,NB,NE,EMAX`.
    pub fn parse(s: &str) -> Result<GridSpec> {
        let bad = || Error::InvalidInput(format!("cannot parse grid spec '{s}'"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(bad());
        }
        let nums: Vec<&str> = parts[1].split(',').map(str::trim).collect();
        let count = |t: &str| t.parse::<usize>().map_err(|_| bad());
        let real = |t: &str| t.parse::<f64>().map_err(|_| bad());
        let scale = match parts.get(2) {
            Some(t) => real(t)?,
            None => 1.0,
        };
        let g = match (parts[0].to_ascii_lowercase().as_str(), nums.as_slice()) {
            ("circle", [n]) => GridSpec::Circle { radius: scale, n: count(n)? },
            ("sphere", [a, b]) => GridSpec::Sphere { radius: scale, n_alpha: count(a)?, n_beta: count(b)? },
            ("hyperboloid", [a, b, e, m]) => GridSpec::Hyperboloid {
                mass: scale,
                n_alpha: count(a)?,
                n_beta: count(b)?,
                n_eta: count(e)?,
                eta_max: real(m)?,
            },
            ("cone", [a, b, e, m]) if parts.len() == 2 => {
                GridSpec::Cone { n_alpha: count(a)?, n_beta: count(b)?, n_eta: count(e)?, eta_max: real(m)? }
            }
            _ => return Err(bad()),
        };
        g.validate()?;
        Ok(g)
    }
}

/// Fixed description of the conventions a dump was written with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub euler: String,
    pub wigner: String,
    pub real_harmonics: String,
    pub gamma_basis: String,
    pub spinor_storage: String,
    pub section: String,
    pub layout: String,
}

impl Conventions {
    pub fn current() -> Conventions {
        Conventions {
            euler: "ZYZ active, R(a,b,c) = Rz(a) Ry(b) Rz(c)".into(),
            wigner: "D_{m m'} = exp(-i m a) d_{m m'}(b) exp(-i m' c), rows and columns ordered m = l..-l".into(),
            real_harmonics: "Y_l0, then (cos, sin) pairs for m = 1..l".into(),
            gamma_basis: "Weyl basis, gamma0 = [[0,1],[1,0]], C = i gamma2 acting with complex conjugation".into(),
            spinor_storage: "realified [Re; Im] with doubled dimension".into(),
            section: "circle g_phi; sphere g(a,b,0); hyperboloid R(a,b,0) Bz(eta); cone R(a,b,0) Bz(ln x0)".into(),
            layout: "[basis][point][row][col], f64 little endian, (re, im) pairs when complex".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub group: String,
    pub field: String,
    pub case: CaseSpec,
    /// Short label strings as accepted by the CLI.
    pub out: String,
    pub inp: String,
    pub basis_size: usize,
    pub kinds: Vec<String>,
    /// Working-space matrix shape `[rows, cols]`.
    pub dims: [usize; 2],
    pub complex: bool,
    pub grid: GridSpec,
    pub grid_points: usize,
    pub conventions: Conventions,
    /// Sampling is deterministic; kept for layout stability.
    pub seed: Option<u64>,
    pub payload_file: String,
    pub payload_bytes: u64,
    pub sha256: String,
}

impl Manifest {
    pub fn expected_payload_bytes(&self) -> u64 {
        let per = if self.complex { 2 } else { 1 };
        (self.basis_size * self.grid_points * self.dims[0] * self.dims[1] * per * 8) as u64
    }
}

fn with_suffix(base: &Path, ext: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(ext);
    PathBuf::from(s)
}

/// Evaluates every element at every point, in payload order.
pub fn sample_values(elems: &[KernelBasisElement], points: &[OrbitPoint], complex: bool) -> Result<Vec<f64>> {
    let per_element: Result<Vec<Vec<f64>>> = elems
        .iter()
        .map(|e| {
            let chunks: Result<Vec<Vec<f64>>> = points
                .par_iter()
                .map(|x| {
                    let m = e.evaluate(x)?;
                    Ok(m.data().iter().flat_map(|z| if complex { vec![z.re, z.im] } else { vec![z.re] }).collect())
                })
                .collect();
            Ok(chunks?.concat())
        })
        .collect();
    Ok(per_element?.concat())
}

fn encode(values: &[f64]) -> Vec<u8> {
    values.iter().flat_map(|v| v.to_le_bytes()).collect()
}

/// Samples the analytic basis of `case` on `grid` and writes the dump.
pub fn write_dump(base: &Path, case: &CaseSpec, grid: &GridSpec) -> Result<Manifest> {
    grid.validate()?;
    if grid.orbit() != case.orbit {
        return invalid(format!("grid lives on a {} orbit, case on a {} orbit", grid.orbit().name(), case.orbit.name()));
    }
    let elems = analytic_basis(case)?;
    let points = grid.points()?;
    let complex = case.field() == Field::Complex;
    let bytes = encode(&sample_values(&elems, &points, complex)?);
    let bin = with_suffix(base, ".bin");
    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        group: case.group().name().to_string(),
        field: case.field().name().to_string(),
        case: *case,
        out: case.out.short(),
        inp: case.inp.short(),
        basis_size: elems.len(),
        kinds: elems.iter().map(|e| e.kind.clone()).collect(),
        dims: [case.out.working_dim(), case.inp.working_dim()],
        complex,
        grid: *grid,
        grid_points: points.len(),
        conventions: Conventions::current(),
        seed: None,
        payload_file: bin.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
        payload_bytes: bytes.len() as u64,
        sha256: hex::encode(Sha256::digest(&bytes)),
    };
    debug_assert_eq!(manifest.payload_bytes, manifest.expected_payload_bytes());
    fs::write(&bin, &bytes)?;
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Format(e.to_string()))?;
    fs::write(with_suffix(base, ".json"), json + "\n")?;
    Ok(manifest)
}

/// Reads a dump back, checking version, size and checksum.
pub fn read_dump(base: &Path) -> Result<(Manifest, Vec<f64>)> {
    let text = fs::read_to_string(with_suffix(base, ".json"))?;
    let raw: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Format(e.to_string()))?;
    match raw.get("format_version").and_then(|v| v.as_u64()) {
        Some(v) if v == FORMAT_VERSION as u64 => {}
        Some(v) => return Err(Error::Format(format!("unsupported format version {v}"))),
        None => return Err(Error::Format("manifest has no format_version".into())),
    }
    let manifest: Manifest = serde_json::from_value(raw).map_err(|e| Error::Format(e.to_string()))?;
    let dir = base.parent().unwrap_or_else(|| Path::new(""));
    let bytes = fs::read(dir.join(&manifest.payload_file))?;
    if bytes.len() as u64 != manifest.payload_bytes || manifest.payload_bytes != manifest.expected_payload_bytes() {
        return Err(Error::Format(format!(
            "payload has {} bytes, manifest declares {} and layout implies {}",
            bytes.len(),
            manifest.payload_bytes,
            manifest.expected_payload_bytes()
        )));
    }
    let digest = hex::encode(Sha256::digest(&bytes));
    if digest != manifest.sha256 {
        return Err(Error::Format("payload checksum mismatch".into()));
    }
    let values = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect();
    Ok((manifest, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::irreps::IrrepLabel;

    #[test]
    fn grid_shapes() {
        let g = GridSpec::parse("sphere:4,3").unwrap();
        let p = g.points().unwrap();
        assert_eq!(p.len(), 12);
        match p[1] {
            OrbitPoint::Sphere { beta, .. } => assert!((beta - std::f64::consts::PI * 1.5 / 3.0).abs() < 1e-15),
            _ => unreachable!(),
        }
        assert_eq!(GridSpec::parse("hyperboloid:2,2,3,1.5:2").unwrap().points().unwrap().len(), 12);
        assert_eq!(GridSpec::parse("cone:1,1,1,1").unwrap().points().unwrap()[0], OrbitPoint::null(0.0, std::f64::consts::FRAC_PI_2, 0.0));
        for bad in ["circle:0", "sphere:3", "cone:1,1,1,0", "cone:1,1,1,1:2", "torus:3", "circle:x"] {
            assert!(GridSpec::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let base = dir.path().join("k");
        let case = CaseSpec::new(IrrepLabel::So3Complex { l: 1 }, IrrepLabel::So3Complex { l: 2 }, Orbit::Sphere { radius: 1.0 });
        let grid = GridSpec::parse("sphere:5,4").unwrap();
        let m = write_dump(&base, &case, &grid).unwrap();
        assert_eq!(m.payload_bytes, 3 * 20 * 3 * 5 * 2 * 8);
        let (m2, values) = read_dump(&base).unwrap();
        assert_eq!(m, m2);
        let fresh = sample_values(&analytic_basis(&m2.case).unwrap(), &m2.grid.points().unwrap(), true).unwrap();
        assert!(values.iter().zip(&fresh).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn corrupted_dumps_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let base = dir.path().join("k");
        let case = CaseSpec::new(IrrepLabel::So2Real { j: 1 }, IrrepLabel::So2Real { j: 2 }, Orbit::Circle { radius: 1.0 });
        write_dump(&base, &case, &GridSpec::Circle { radius: 1.0, n: 8 }).unwrap();
        let bin = with_suffix(&base, ".bin");
        let mut bytes = fs::read(&bin).unwrap();
        bytes[3] ^= 1;
        fs::write(&bin, &bytes).unwrap();
        assert!(matches!(read_dump(&base), Err(Error::Format(_))));

        write_dump(&base, &case, &GridSpec::Circle { radius: 1.0, n: 8 }).unwrap();
        let json = with_suffix(&base, ".json");
        let text = fs::read_to_string(&json).unwrap().replace("\"format_version\": 1", "\"format_version\": 2");
        fs::write(&json, text).unwrap();
        let err = read_dump(&base).unwrap_err();
        assert!(err.to_string().contains("version 2"), "{err}");
    }

    #[test]
    fn grid_and_case_orbits_must_agree() {
        let case = CaseSpec::new(IrrepLabel::So2Real { j: 1 }, IrrepLabel::So2Real { j: 2 }, Orbit::Circle { radius: 1.0 });
        let dir = tempfile::tempdir().unwrap();
        assert!(write_dump(&dir.path().join("k"), &case, &GridSpec::Circle { radius: 2.0, n: 8 }).is_err());
    }
}
