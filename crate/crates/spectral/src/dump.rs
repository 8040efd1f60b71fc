//! SFLD1 field dumps.
//!
//! One ASCII header line `SFLD1 n=<n> kind=<scalar|vector|matrix> t=<t>\n`,
//! then `n*n` little-endian f64 physical samples per component, each block in
//! grid order (flat index `a*n + b`, `a` along x₁). Vectors write `v¹, v²`;
//! symmetric trace-free matrices write `m11, m12`.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::{Grid, ScalarField, SpectralError, SymMatrixField, VectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Scalar,
    Vector,
    Matrix,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Scalar => "scalar",
            Kind::Vector => "vector",
            Kind::Matrix => "matrix",
        }
    }

    pub fn components(self) -> usize {
        match self {
            Kind::Scalar => 1,
            Kind::Vector | Kind::Matrix => 2,
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "scalar" => Some(Kind::Scalar),
            "vector" => Some(Kind::Vector),
            "matrix" => Some(Kind::Matrix),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dump {
    pub n: usize,
    pub kind: Kind,
    pub t: f64,
    /// One block of `n*n` samples per component.
    pub blocks: Vec<Vec<f64>>,
}

impl Dump {
    pub fn scalar(f: &ScalarField, t: f64) -> Self {
        Self { n: f.n(), kind: Kind::Scalar, t, blocks: vec![f.to_physical()] }
    }

    pub fn vector(v: &VectorField, t: f64) -> Self {
        Self { n: v.grid().n(), kind: Kind::Vector, t, blocks: vec![v.c[0].to_physical(), v.c[1].to_physical()] }
    }

    pub fn matrix(m: &SymMatrixField, t: f64) -> Self {
        Self { n: m.grid().n(), kind: Kind::Matrix, t, blocks: vec![m.m11.to_physical(), m.m12.to_physical()] }
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<(), SpectralError> {
        writeln!(w, "SFLD1 n={} kind={} t={}", self.n, self.kind.name(), self.t)?;
        let mut buf = Vec::with_capacity(self.n * self.n * 8);
        for b in &self.blocks {
            buf.clear();
            for v in b {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), SpectralError> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut f)?;
        f.flush()?;
        Ok(())
    }

    pub fn read_from(r: &mut impl BufRead) -> Result<Self, SpectralError> {
        let bad = |m: &str| SpectralError::Format(m.to_string());
        let mut header = String::new();
        r.read_line(&mut header)?;
        let mut parts = header.trim_end_matches('\n').split(' ');
        if parts.next() != Some("SFLD1") {
            return Err(bad("missing SFLD1 magic"));
        }
        let mut field = |key: &str| -> Result<String, SpectralError> {
            let p = parts.next().ok_or_else(|| bad("truncated header"))?;
            p.strip_prefix(key).map(str::to_string).ok_or_else(|| bad(&format!("expected {key}")))
        };
        let n: usize = field("n=")?.parse().map_err(|_| bad("bad n"))?;
        let kind = Kind::parse(&field("kind=")?).ok_or_else(|| bad("bad kind"))?;
        let t: f64 = field("t=")?.parse().map_err(|_| bad("bad t"))?;
        Grid::new(n)?;
        let mut blocks = Vec::new();
        let mut raw = vec![0u8; n * n * 8];
        for _ in 0..kind.components() {
            r.read_exact(&mut raw).map_err(|_| bad("truncated payload"))?;
            blocks.push(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect());
        }
        let mut extra = [0u8; 1];
        if r.read(&mut extra)? != 0 {
            return Err(bad("trailing bytes"));
        }
        Ok(Self { n, kind, t, blocks })
    }

    pub fn load(path: &Path) -> Result<Self, SpectralError> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::read_from(&mut f)
    }
}
