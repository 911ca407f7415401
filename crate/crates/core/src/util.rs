//! Small shared helpers: seed derivation, content hashing, buffered file access.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// SplitMix64 finalizer. Used to derive independent child seeds from a
/// master seed plus a stream index.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Opens a file for reading, transparently decompressing gzip input
/// (detected by its magic bytes, not the file extension).
pub fn open_maybe_gzip(path: &Path) -> Result<Box<dyn std::io::BufRead>> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut magic = [0u8; 2];
    let n = file.read(&mut magic).map_err(|e| Error::io(path, e))?;
    drop(file);
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    if n == 2 && magic == [0x1f, 0x8b] {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(file))))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

/// Whether the file starts with `magic`.
pub fn has_magic(path: &Path, magic: &[u8; 4]) -> Result<bool> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut head = [0u8; 4];
    let mut filled = 0;
    while filled < 4 {
        let n = file.read(&mut head[filled..]).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            return Ok(false);
        }
        filled += n;
    }
    Ok(&head == magic)
}

pub fn create_file(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn open_file(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

/// Writes `magic` followed by a CBOR encoding of `value`.
pub(crate) fn write_tagged_cbor<T: serde::Serialize>(
    path: &Path,
    magic: &[u8; 4],
    value: &T,
) -> Result<()> {
    use std::io::Write;
    let mut out = create_file(path)?;
    out.write_all(magic).map_err(|e| Error::io(path, e))?;
    ciborium::into_writer(value, &mut out).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn read_tagged_cbor<T: serde::de::DeserializeOwned>(
    path: &Path,
    magic: &[u8; 4],
) -> Result<T> {
    let mut input = open_file(path)?;
    let mut head = [0u8; 4];
    input
        .read_exact(&mut head)
        .map_err(|e| Error::io(path, e))?;
    if &head != magic {
        return Err(Error::Format(format!(
            "{}: expected magic {:?}, found {:?}",
            path.display(),
            String::from_utf8_lossy(magic),
            String::from_utf8_lossy(&head)
        )));
    }
    ciborium::from_reader(input).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}
