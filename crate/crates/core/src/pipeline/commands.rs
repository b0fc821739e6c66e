use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::aes::{Aes128, Nonce};
use crate::bitstream::{scan_annexb, AnnexBStream, BitstreamError};
use crate::harness::{bench, BenchResult};
use crate::selective::{decrypt_stream, encrypt_stream, CipherHeader, EncryptionPolicy};

use super::{derive_key, gen_test_stream, GeneratorConfig, KeySource, PipelineError, StreamReport};

#[derive(Debug, Clone)]
pub struct EncryptRequest {
    pub input: PathBuf,
    pub output: PathBuf,
    pub meta: PathBuf,
    pub key: KeySource,
    pub policy: EncryptionPolicy,
    /// Random when absent.
    pub nonce: Option<Nonce>,
}

#[derive(Debug, Clone)]
pub struct DecryptRequest {
    pub input: PathBuf,
    pub meta: PathBuf,
    pub output: PathBuf,
    pub key: KeySource,
}

fn read(path: &Path) -> Result<Vec<u8>, PipelineError> {
    fs::read(path).map_err(|e| PipelineError::io(path, e))
}

/// Reads and scans an Annex B file. An empty file has no start code.
fn read_stream(path: &Path) -> Result<(Vec<u8>, AnnexBStream), PipelineError> {
    let data = read(path)?;
    if data.is_empty() {
        return Err(BitstreamError::NoStartCode.into());
    }
    let stream = scan_annexb(&data)?;
    Ok((data, stream))
}

/// Temp file in the destination directory, renamed over the target once
/// fully written.
struct StagedFile {
    target: PathBuf,
    tmp: tempfile::NamedTempFile,
}

impl StagedFile {
    fn write(target: &Path, bytes: &[u8]) -> Result<Self, PipelineError> {
        let dir = match target.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| PipelineError::io(dir, e))?;
        tmp.write_all(bytes)
            .and_then(|_| tmp.as_file().sync_all())
            .map_err(|e| PipelineError::io(target, e))?;
        Ok(StagedFile {
            target: target.to_path_buf(),
            tmp,
        })
    }

    fn commit(self) -> Result<(), PipelineError> {
        self.tmp
            .persist(&self.target)
            .map(|_| ())
            .map_err(|e| PipelineError::io(&self.target, e.error))
    }
}

fn size_delta(before: usize, after: usize) -> i64 {
    after as i64 - before as i64
}

pub fn cmd_encrypt(req: &EncryptRequest) -> Result<StreamReport, PipelineError> {
    let (data, stream) = read_stream(&req.input)?;
    let cipher = Aes128::new(&derive_key(&req.key)?)?;
    let nonce = req.nonce.unwrap_or_else(Nonce::random);

    let (nals, header) = encrypt_stream(&stream.nals, &cipher, req.policy, nonce)?;
    let out = AnnexBStream {
        leading: stream.leading.clone(),
        nals,
    }
    .to_bytes()?;

    let staged_out = StagedFile::write(&req.output, &out)?;
    let staged_meta = StagedFile::write(&req.meta, &header.to_bytes()?)?;
    staged_out.commit()?;
    staged_meta.commit()?;

    Ok(StreamReport::build(&stream, data.len() as u64, &header.ordinals)
        .with_size_delta(size_delta(data.len(), out.len())))
}

pub fn cmd_decrypt(req: &DecryptRequest) -> Result<StreamReport, PipelineError> {
    let header = CipherHeader::from_bytes(&read(&req.meta)?)?;
    let (data, stream) = read_stream(&req.input)?;
    let cipher = Aes128::new(&derive_key(&req.key)?)?;

    let nals = decrypt_stream(&stream.nals, &cipher, &header)?;
    let plain = AnnexBStream {
        leading: stream.leading,
        nals,
    };
    let out = plain.to_bytes()?;
    StagedFile::write(&req.output, &out)?.commit()?;

    Ok(StreamReport::build(&plain, out.len() as u64, &header.ordinals)
        .with_size_delta(size_delta(data.len(), out.len())))
}

/// Reads only; nothing is written.
pub fn cmd_inspect(input: &Path) -> Result<StreamReport, PipelineError> {
    let (data, stream) = read_stream(input)?;
    Ok(StreamReport::build(&stream, data.len() as u64, &[]))
}

pub fn cmd_gen_test(output: &Path, cfg: &GeneratorConfig) -> Result<Vec<u8>, PipelineError> {
    let data = gen_test_stream(cfg);
    StagedFile::write(output, &data)?.commit()?;
    Ok(data)
}

pub fn cmd_bench(input: &Path, key: &KeySource, policy: EncryptionPolicy) -> Result<BenchResult, PipelineError> {
    let (_, stream) = read_stream(input)?;
    let cipher = Aes128::new(&derive_key(key)?)?;
    Ok(bench(&stream.nals, &cipher, policy)?)
}
