//! On-disk cache for dependency matrices and PMI blocks.
//!
//! Entries are little-endian binary files named by the SHA-256 of their key:
//! `magic, version, kind, measure, n, tickers, payload`. A file that fails to
//! decode counts as a miss.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use pminet::similarity::{DependencyMatrix, InfluenceMatrix};
use pminet::{Estimator, Measure, PmiBlock, SimilarityMatrix};
use sha2::{Digest, Sha256};

const MAGIC: &[u8; 4] = b"PMNC";
const VERSION: u32 = 1;
const KIND_DISTANCE: u8 = 1;
const KIND_INFLUENCE: u8 = 2;
const KIND_BLOCK: u8 = 3;

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, prefix: &str, key: &[&str]) -> PathBuf {
        self.dir.join(format!("{prefix}-{}.bin", sha256_hex(key.join("\n").as_bytes())))
    }

    pub fn matrix_path(&self, input_digest: &str, measure: Measure, estimator: Estimator, bins: usize) -> PathBuf {
        let (m, b) = (measure.number().to_string(), bins.to_string());
        self.path("matrix", &[input_digest, &m, estimator.tag(), &b])
    }

    pub fn block_path(&self, input_digest: &str, estimator: Estimator, bins: usize) -> PathBuf {
        let b = bins.to_string();
        self.path("pmi-block", &[input_digest, "pmi-block", estimator.tag(), &b])
    }

    pub fn load_matrix(&self, path: &Path) -> Option<DependencyMatrix> {
        load(path, decode_matrix)
    }

    pub fn load_block(&self, path: &Path) -> Option<PmiBlock> {
        load(path, decode_block)
    }

    pub fn store_matrix(&self, path: &Path, matrix: &DependencyMatrix) -> Result<()> {
        store(path, &encode_matrix(matrix))
    }

    pub fn store_block(&self, path: &Path, block: &PmiBlock) -> Result<()> {
        store(path, &encode_block(block))
    }
}

fn load<T>(path: &Path, decode: fn(&[u8]) -> Result<T>) -> Option<T> {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return None,
        Err(e) => {
            log::warn!("cache read {}: {e}", path.display());
            return None;
        }
    };
    match decode(&bytes) {
        Ok(v) => Some(v),
        Err(e) => {
            log::warn!("ignoring corrupt cache entry {}: {e:#}", path.display());
            None
        }
    }
}

fn store(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    // write-then-rename so a crash never leaves a truncated entry behind
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))
}

struct Writer(Vec<u8>);

impl Writer {
    fn header(kind: u8, measure: u8, tickers: &[String]) -> Self {
        let mut w = Writer(Vec::new());
        w.0.extend_from_slice(MAGIC);
        w.u32(VERSION);
        w.0.push(kind);
        w.0.push(measure);
        w.u32(tickers.len() as u32);
        for t in tickers {
            w.str(t);
        }
        w
    }

    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn str(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.0.extend_from_slice(s.as_bytes());
    }

    fn f64s(&mut self, v: &[f64]) {
        for x in v {
            self.0.extend_from_slice(&x.to_le_bytes());
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            bail!("truncated at byte {}", self.pos);
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into()?))
    }

    fn str(&mut self) -> Result<String> {
        let n = self.u32()? as usize;
        Ok(String::from_utf8(self.take(n)?.to_vec())?)
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let bytes = self.take(n.checked_mul(8).context("size overflow")?)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect())
    }

    /// Returns `(kind, measure byte, tickers)`.
    fn header(&mut self) -> Result<(u8, u8, Vec<String>)> {
        if self.take(4)? != MAGIC {
            bail!("bad magic");
        }
        let version = self.u32()?;
        if version != VERSION {
            bail!("unsupported version {version}");
        }
        let kind = self.u8()?;
        let measure = self.u8()?;
        let n = self.u32()? as usize;
        let tickers = (0..n).map(|_| self.str()).collect::<Result<_>>()?;
        Ok((kind, measure, tickers))
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            bail!("{} trailing bytes", self.buf.len() - self.pos);
        }
        Ok(())
    }
}

fn encode_matrix(matrix: &DependencyMatrix) -> Vec<u8> {
    let kind = match matrix {
        DependencyMatrix::Distance(_) => KIND_DISTANCE,
        DependencyMatrix::Influence(_) => KIND_INFLUENCE,
    };
    let mut w = Writer::header(kind, matrix.measure().number(), matrix.tickers());
    w.f64s(matrix.values());
    w.0
}

fn decode_matrix(bytes: &[u8]) -> Result<DependencyMatrix> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let (kind, measure, tickers) = r.header()?;
    let measure = Measure::from_number(measure)?;
    let n = tickers.len();
    let values = r.f64s(n * n)?;
    r.finish()?;
    Ok(match kind {
        KIND_DISTANCE if !measure.is_influence() => DependencyMatrix::Distance(SimilarityMatrix {
            tickers,
            measure,
            values,
        }),
        KIND_INFLUENCE if measure.is_influence() => DependencyMatrix::Influence(InfluenceMatrix {
            tickers,
            measure,
            values,
        }),
        _ => bail!("kind {kind} does not fit measure {measure}"),
    })
}

fn encode_block(block: &PmiBlock) -> Vec<u8> {
    let mut w = Writer::header(KIND_BLOCK, 0, block.tickers());
    w.str(block.estimator().tag());
    w.u32(block.bins() as u32);
    w.u64(block.m() as u64);
    w.f64s(block.h1());
    w.f64s(block.h2());
    w.f64s(block.cube());
    w.0
}

fn decode_block(bytes: &[u8]) -> Result<PmiBlock> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let (kind, _, tickers) = r.header()?;
    if kind != KIND_BLOCK {
        bail!("kind {kind} is not a PMI block");
    }
    let estimator: Estimator = r.str()?.parse()?;
    let bins = r.u32()? as usize;
    let m = r.u64()? as usize;
    let n = tickers.len();
    let h1 = r.f64s(n)?;
    let h2 = r.f64s(n * n)?;
    let cube = r.f64s(n * n * n)?;
    r.finish()?;
    Ok(PmiBlock::from_parts(tickers, estimator, bins, m, h1, h2, cube)?)
}
