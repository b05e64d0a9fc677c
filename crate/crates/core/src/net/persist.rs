//! `HZNET1` parameter files.
//!
//! Layout: the 6-byte magic, then little-endian `u32` shape fields
//! (input size, input channels, conv1 kernel, conv1 maps, group size,
//! scale count, each scale kernel, pool, conv3 kernel), then little-endian
//! `f64` values: per conv weights then biases (conv1, scales, conv3),
//! followed by the BReLU lower and upper bounds.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::net::model::{Architecture, NetParams};

pub const MAGIC: &[u8; 6] = b"HZNET1";

pub fn encode(params: &NetParams) -> Vec<u8> {
    let a = &params.arch;
    let mut shape = vec![
        a.input_size,
        a.in_channels,
        a.conv1_kernel,
        a.conv1_maps,
        a.group_size,
        a.scale_kernels.len(),
    ];
    shape.extend(&a.scale_kernels);
    shape.extend([a.pool, a.conv3_kernel]);

    let mut out = MAGIC.to_vec();
    for v in shape {
        out.extend((v as u32).to_le_bytes());
    }
    for w in params.to_flat().into_iter().chain([params.brelu_lo, params.brelu_hi]) {
        out.extend(w.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or_else(|| {
            Error::Format(format!("truncated parameter file at byte {}", self.pos))
        })?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")) as usize)
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

pub fn decode(bytes: &[u8]) -> Result<NetParams> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::Format("missing HZNET1 magic".into()));
    }
    let mut r = Reader {
        bytes,
        pos: MAGIC.len(),
    };
    let (input_size, in_channels, conv1_kernel, conv1_maps, group_size) =
        (r.u32()?, r.u32()?, r.u32()?, r.u32()?, r.u32()?);
    let n_scales = r.u32()?;
    if n_scales > 64 {
        return Err(Error::Format(format!("implausible scale count {n_scales}")));
    }
    let scale_kernels = (0..n_scales).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
    let (pool, conv3_kernel) = (r.u32()?, r.u32()?);
    let arch = Architecture {
        input_size,
        in_channels,
        conv1_kernel,
        conv1_maps,
        group_size,
        scale_kernels,
        pool,
        conv3_kernel,
    };
    arch.validate()
        .map_err(|e| Error::Format(format!("inconsistent architecture header: {e}")))?;
    let mut params = NetParams::zeros(arch)?;
    let n = params.num_weights();
    let expected = r.pos + (n + 2) * 8;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "parameter file is {} bytes, header implies {expected}",
            bytes.len()
        )));
    }
    let flat = (0..n).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
    if flat.iter().any(|w| !w.is_finite()) {
        return Err(Error::Format("non-finite weight".into()));
    }
    params.set_flat(&flat)?;
    params.brelu_lo = r.f64()?;
    params.brelu_hi = r.f64()?;
    if !(params.brelu_lo < params.brelu_hi) {
        return Err(Error::Format(format!(
            "BReLU bounds [{}, {}] are not increasing",
            params.brelu_lo, params.brelu_hi
        )));
    }
    Ok(params)
}

pub fn save(params: &NetParams, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode(params)).map_err(|e| Error::io(path, e))
}

pub fn load(path: impl AsRef<Path>) -> Result<NetParams> {
    let path = path.as_ref();
    decode(&fs::read(path).map_err(|e| Error::io(path, e))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let p = NetParams::init(Architecture::default(), 1.0, 1).unwrap();
        let bytes = encode(&p);
        assert_eq!(&bytes[..6], b"HZNET1");
        assert_eq!(u32::from_le_bytes(bytes[6..10].try_into().unwrap()), 16);
        // 11 shape fields, then weights and the two bounds
        assert_eq!(bytes.len(), 6 + 11 * 4 + (p.num_weights() + 2) * 8);
        assert_eq!(decode(&bytes).unwrap(), p);
    }

    #[test]
    fn rejects_corruption() {
        let p = NetParams::init(Architecture::default(), 1.0, 2).unwrap();
        let bytes = encode(&p);
        let mut bad_magic = bytes.clone();
        bad_magic[0] = b'X';
        assert!(decode(&bad_magic).is_err());
        assert!(decode(&bytes[..bytes.len() - 1]).is_err());
        let mut bad_shape = bytes.clone();
        bad_shape[6..10].copy_from_slice(&17u32.to_le_bytes());
        assert!(matches!(decode(&bad_shape), Err(Error::Format(_))));
        let mut bad_bounds = bytes.clone();
        let n = bad_bounds.len();
        bad_bounds[n - 8..].copy_from_slice(&(-1.0f64).to_le_bytes());
        assert!(decode(&bad_bounds).is_err());
    }
}
