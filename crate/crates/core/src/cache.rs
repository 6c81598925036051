//! Binary graph cache.
//!
//! Layout, all integers little-endian `u64`:
//!
//! ```text
//! magic "DSGCACHE" | version | sha256 of source text (32 bytes) | n | m
//! offsets[n + 1] | neighbors[2m] | orig_ids[n]
//! ```
//!
//! The hash ties a cache to the exact bytes of the text file it was built
//! from; loading through [`load_with_cache`] refuses a cache whose hash does
//! not match.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{CacheError, GraphError};
use crate::graph::{read_edge_list_file, Graph, ParseOptions, VertexId};

pub const MAGIC: &[u8; 8] = b"DSGCACHE";
const VERSION: u64 = 1;

pub type ContentHash = [u8; 32];

pub fn hash_hex(h: &ContentHash) -> String {
    h.iter().map(|b| format!("{b:02x}")).collect()
}

/// SHA-256 of the file's raw bytes.
pub fn content_hash(path: &Path) -> io::Result<ContentHash> {
    let mut file = BufReader::new(File::open(path)?);
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let k = file.read(&mut buf)?;
        if k == 0 {
            break;
        }
        hasher.update(&buf[..k]);
    }
    Ok(hasher.finalize().into())
}

/// True if the file starts with the cache magic.
pub fn is_cache_file(path: &Path) -> io::Result<bool> {
    let mut head = [0u8; 8];
    let mut f = File::open(path)?;
    let mut got = 0;
    while got < head.len() {
        let k = f.read(&mut head[got..])?;
        if k == 0 {
            return Ok(false);
        }
        got += k;
    }
    Ok(&head == MAGIC)
}

pub fn write_cache<W: Write>(g: &Graph, source_hash: &ContentHash, w: W) -> io::Result<()> {
    let mut w = BufWriter::new(w);
    w.write_all(MAGIC)?;
    put(&mut w, VERSION)?;
    w.write_all(source_hash)?;
    put(&mut w, g.n() as u64)?;
    put(&mut w, g.m() as u64)?;
    for &o in g.offsets() {
        put(&mut w, o as u64)?;
    }
    for &v in g.adjacency() {
        put(&mut w, v as u64)?;
    }
    for &id in g.orig_ids() {
        put(&mut w, id)?;
    }
    w.flush()
}

pub fn read_cache<R: Read>(r: R) -> Result<(Graph, ContentHash), CacheError> {
    let mut r = BufReader::new(r);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(|_| CacheError::BadMagic)?;
    if &magic != MAGIC {
        return Err(CacheError::BadMagic);
    }
    let version = get(&mut r)?;
    if version != VERSION {
        return Err(CacheError::Corrupt(format!("unsupported version {version}")));
    }
    let mut hash = [0u8; 32];
    r.read_exact(&mut hash).map_err(truncated)?;
    let n = get(&mut r)? as usize;
    let m = get(&mut r)? as usize;
    if n > VertexId::MAX as usize {
        return Err(CacheError::Corrupt(format!("vertex count {n} too large")));
    }
    let offsets = (0..=n)
        .map(|_| get(&mut r).map(|x| x as usize))
        .collect::<Result<Vec<_>, _>>()?;
    let neighbors = (0..2 * m)
        .map(|_| {
            get(&mut r).and_then(|x| {
                VertexId::try_from(x).map_err(|_| CacheError::Corrupt(format!("neighbour id {x}")))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let orig_ids = (0..n).map(|_| get(&mut r)).collect::<Result<Vec<_>, _>>()?;
    let g = Graph::from_raw_parts(offsets, neighbors, orig_ids).map_err(CacheError::Corrupt)?;
    Ok((g, hash))
}

pub fn read_cache_file(path: &Path) -> Result<(Graph, ContentHash), CacheError> {
    read_cache(File::open(path)?)
}

pub fn write_cache_file(g: &Graph, source_hash: &ContentHash, path: &Path) -> io::Result<()> {
    write_cache(g, source_hash, File::create(path)?)
}

/// Errors from [`load_with_cache`].
#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Cache(#[from] CacheError),
}

/// Loads `text` through the cache at `cache`: a present cache must carry the
/// text's content hash; a missing cache is built and written.
pub fn load_with_cache(text: &Path, cache: &Path, opts: &ParseOptions) -> Result<Graph, LoadError> {
    let hash = content_hash(text).map_err(GraphError::Io)?;
    if cache.exists() {
        let (g, found) = read_cache_file(cache)?;
        if found != hash {
            return Err(CacheError::HashMismatch {
                expected: hash_hex(&hash),
                found: hash_hex(&found),
            }
            .into());
        }
        return Ok(g);
    }
    let g = read_edge_list_file(text, opts)?;
    write_cache_file(&g, &hash, cache).map_err(CacheError::Io)?;
    Ok(g)
}

fn put<W: Write>(w: &mut W, x: u64) -> io::Result<()> {
    w.write_all(&x.to_le_bytes())
}

fn get<R: Read>(r: &mut R) -> Result<u64, CacheError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(truncated)?;
    Ok(u64::from_le_bytes(b))
}

fn truncated(e: io::Error) -> CacheError {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        CacheError::Corrupt("unexpected end of file".into())
    } else {
        CacheError::Io(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_edge_list;

    #[test]
    fn roundtrip_preserves_graph_and_hash() {
        let g = parse_edge_list("5 9\n9 12\n12 5\n12 40\n".as_bytes(), &ParseOptions::default()).unwrap();
        let hash = [7u8; 32];
        let mut buf = Vec::new();
        write_cache(&g, &hash, &mut buf).unwrap();
        assert_eq!(&buf[..8], MAGIC);
        // header 8 + 8 + 32 + 8 + 8, then (n+1) + 2m + n words
        assert_eq!(buf.len(), 64 + 8 * (5 + 8 + 4));
        let (h, found) = read_cache(&buf[..]).unwrap();
        assert_eq!(h, g);
        assert_eq!(found, hash);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(read_cache(&b"NOTACACHE......."[..]), Err(CacheError::BadMagic)));
        let g = Graph::from_edges([(0, 1)]).unwrap();
        let mut buf = Vec::new();
        write_cache(&g, &[0; 32], &mut buf).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(matches!(read_cache(&buf[..]), Err(CacheError::Corrupt(_))));
    }

    #[test]
    fn load_with_cache_checks_hash() {
        let dir = tempfile::tempdir().unwrap();
        let text = dir.path().join("g.txt");
        let cache = dir.path().join("g.bin");
        std::fs::write(&text, "0 1\n1 2\n").unwrap();
        let g1 = load_with_cache(&text, &cache, &ParseOptions::default()).unwrap();
        assert!(is_cache_file(&cache).unwrap());
        assert!(!is_cache_file(&text).unwrap());
        let g2 = load_with_cache(&text, &cache, &ParseOptions::default()).unwrap();
        assert_eq!(g1, g2);
        std::fs::write(&text, "0 1\n1 2\n2 0\n").unwrap();
        let err = load_with_cache(&text, &cache, &ParseOptions::default()).unwrap_err();
        assert!(matches!(err, LoadError::Cache(CacheError::HashMismatch { .. })));
    }
}
