//! Snapshot files, PGM heatmaps and CSV tables.
//!
//! Snapshot layout (all integers `u32`, all reals `f64`, little endian):
//!
//! ```text
//! "FRRD" | version | dim | dof[0..dim] | species | bc code
//!        | (alpha, kappa) per species | time | species arrays, x fastest
//! ```
//!
//! Only active unknowns are stored; the bc code tells a reader whether the
//! boundary nodes are included (Neumann), wrapped (periodic) or implied zero
//! (Dirichlet).

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use fracrd::grid::{BoundaryCondition, Field, State};
use fracrd::models::Species;

pub const MAGIC: &[u8; 4] = b"FRRD";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotFile {
    pub bc: BoundaryCondition,
    pub shape: Vec<usize>,
    /// `(alpha, kappa)` per species.
    pub species: Vec<(f64, f64)>,
    pub time: f64,
    pub data: Vec<Vec<f64>>,
}

impl SnapshotFile {
    pub fn from_state(state: &State, species: &[Species], time: f64) -> Self {
        SnapshotFile {
            bc: state.grid().bc(),
            shape: state.grid().shape(),
            species: species.iter().map(|s| (s.alpha, s.kappa)).collect(),
            time,
            data: state
                .species()
                .iter()
                .map(|f| f.values().to_vec())
                .collect(),
        }
    }

    pub fn write_to(&self, w: &mut impl Write) -> io::Result<()> {
        let u32le = |w: &mut dyn Write, v: usize| w.write_all(&(v as u32).to_le_bytes());
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        u32le(w, self.shape.len())?;
        for &d in &self.shape {
            u32le(w, d)?;
        }
        u32le(w, self.species.len())?;
        w.write_all(&self.bc.code().to_le_bytes())?;
        for &(a, k) in &self.species {
            w.write_all(&a.to_le_bytes())?;
            w.write_all(&k.to_le_bytes())?;
        }
        w.write_all(&self.time.to_le_bytes())?;
        for arr in &self.data {
            for v in arr {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()
    }

    pub fn read_from(r: &mut impl Read) -> io::Result<Self> {
        fn bad(msg: &str) -> io::Error {
            io::Error::new(io::ErrorKind::InvalidData, msg.to_string())
        }
        fn u32_(r: &mut impl Read) -> io::Result<u32> {
            let mut b = [0u8; 4];
            r.read_exact(&mut b)?;
            Ok(u32::from_le_bytes(b))
        }
        fn f64_(r: &mut impl Read) -> io::Result<f64> {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            Ok(f64::from_le_bytes(b))
        }
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(bad("not a FRRD snapshot"));
        }
        if u32_(r)? != VERSION {
            return Err(bad("unsupported snapshot version"));
        }
        let dim = u32_(r)? as usize;
        if !(1..=3).contains(&dim) {
            return Err(bad("dimension must be 1, 2 or 3"));
        }
        let shape = (0..dim)
            .map(|_| u32_(r).map(|v| v as usize))
            .collect::<io::Result<Vec<_>>>()?;
        let count = u32_(r)? as usize;
        let bc = BoundaryCondition::from_code(u32_(r)?).ok_or_else(|| bad("unknown bc code"))?;
        let species = (0..count)
            .map(|_| Ok((f64_(r)?, f64_(r)?)))
            .collect::<io::Result<Vec<_>>>()?;
        let time = f64_(r)?;
        let len: usize = shape.iter().product();
        let data = (0..count)
            .map(|_| (0..len).map(|_| f64_(r)).collect::<io::Result<Vec<_>>>())
            .collect::<io::Result<Vec<_>>>()?;
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(bad("trailing bytes after payload"));
        }
        Ok(SnapshotFile {
            bc,
            shape,
            species,
            time,
            data,
        })
    }

    pub fn read(path: &Path) -> io::Result<Self> {
        Self::read_from(&mut io::BufReader::new(File::open(path)?))
    }
}

/// 8-bit grayscale image of a field: the `z` mid-plane in 3D, a single row
/// in 1D. Row 0 is the lowest `y`. Dirichlet fields get their zero boundary
/// ring back, so a grid with `N` intervals gives `(N + 1)` pixels per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Heatmap {
    pub fn from_field(field: &Field) -> Self {
        let grid = field.grid();
        let shape = grid.shape3();
        let (nx, ny) = (shape[0], if grid.dim() >= 2 { shape[1] } else { 1 });
        let z = if grid.dim() == 3 { shape[2] / 2 } else { 0 };
        let v = field.values();
        let mut plane: Vec<f64> = (0..nx * ny).map(|i| v[z * nx * ny + i]).collect();
        let (mut w, mut h) = (nx, ny);
        if grid.bc() == BoundaryCondition::Dirichlet {
            let pad_y = grid.dim() >= 2;
            let (pw, ph) = (nx + 2, if pad_y { ny + 2 } else { 1 });
            let mut padded = vec![0.0; pw * ph];
            for j in 0..ny {
                let row = if pad_y { j + 1 } else { 0 };
                padded[row * pw + 1..row * pw + 1 + nx]
                    .copy_from_slice(&plane[j * nx..(j + 1) * nx]);
            }
            plane = padded;
            w = pw;
            h = ph;
        }
        let lo = plane.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = plane.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        let pixels = plane
            .iter()
            .map(|&x| {
                if span > 0.0 {
                    ((x - lo) / span * 255.0).round().clamp(0.0, 255.0) as u8
                } else {
                    0
                }
            })
            .collect();
        Heatmap {
            width: w,
            height: h,
            pixels,
        }
    }

    /// Binary P5 encoding.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        std::fs::write(path, self.to_pgm())
    }
}

/// `time, <s>_min, <s>_max, <s>_mean, …`
pub fn summary_header(species: &[Species]) -> Vec<String> {
    let mut h = vec!["time".to_string()];
    for s in species {
        for stat in ["min", "max", "mean"] {
            h.push(format!("{}_{stat}", s.name));
        }
    }
    h
}

pub fn summary_row(time: f64, state: &State) -> Vec<String> {
    let mut row = vec![format!("{time}")];
    for f in state.species() {
        row.push(format!("{:e}", f.min()));
        row.push(format!("{:e}", f.max()));
        row.push(format!("{:e}", f.mean()));
    }
    row
}
