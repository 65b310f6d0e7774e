//! Reading and writing graph files.
//!
//! Files use the Gset text format; a name ending in `.gz` is read and written
//! through gzip.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use gdfl_core::graph::{parse_gset, write_gset};
use gdfl_core::Graph;

use crate::BenchError;

fn is_gzip(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "gz")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BenchError + '_ {
    move |source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads a whole text file, decompressing `.gz` names.
pub fn read_text(path: &Path) -> Result<String, BenchError> {
    let file = File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => BenchError::MissingInstance(path.to_path_buf()),
        _ => BenchError::Io {
            path: path.to_path_buf(),
            source: e,
        },
    })?;
    let mut text = String::new();
    if is_gzip(path) {
        GzDecoder::new(file).read_to_string(&mut text)
    } else {
        std::io::BufReader::new(file).read_to_string(&mut text)
    }
    .map_err(io_err(path))?;
    Ok(text)
}

pub fn read_graph(path: &Path) -> Result<Graph, BenchError> {
    let text = read_text(path)?;
    parse_gset(&text).map_err(|source| BenchError::BadFile {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes bytes to `path`, compressing `.gz` names.
pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), BenchError> {
    let file = File::create(path).map_err(io_err(path))?;
    let result = if is_gzip(path) {
        let mut enc = GzEncoder::new(BufWriter::new(file), Compression::default());
        enc.write_all(bytes).and_then(|_| enc.finish()).and_then(|mut w| w.flush())
    } else {
        let mut w = BufWriter::new(file);
        w.write_all(bytes).and_then(|_| w.flush())
    };
    result.map_err(io_err(path))
}

pub fn write_graph(path: &Path, g: &Graph) -> Result<(), BenchError> {
    write_bytes(path, write_gset(g).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_and_gzip_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = Graph::new(4, [(0, 1, 1.0), (1, 2, -1.0), (2, 3, 2.5)]).unwrap();
        for name in ["g.txt", "g.txt.gz"] {
            let path = dir.path().join(name);
            write_graph(&path, &g).unwrap();
            assert_eq!(read_graph(&path).unwrap(), g);
        }
        let raw = std::fs::read(dir.path().join("g.txt.gz")).unwrap();
        assert_eq!(&raw[..2], &[0x1f, 0x8b]);
    }

    #[test]
    fn missing_file_names_the_path() {
        let err = read_graph(Path::new("/nonexistent/G99")).unwrap_err();
        assert!(matches!(err, BenchError::MissingInstance(_)));
        assert!(err.to_string().contains("/nonexistent/G99"));
    }

    #[test]
    fn parse_errors_carry_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad");
        std::fs::write(&path, "2 1\n1 5 1\n").unwrap();
        let err = read_graph(&path).unwrap_err();
        assert!(err.to_string().contains("bad"), "{err}");
    }
}
