//! Model checkpoints and training history.
//!
//! Checkpoint layout (version 1):
//!
//! | bytes | content |
//! |---|---|
//! | 8 | magic `SURJNET\0` |
//! | 4 | format version, little-endian `u32` |
//! | 8 | header length `n`, little-endian `u64` |
//! | n | UTF-8 JSON header: architecture, train config, target scaler, Adam step, parameter count |
//! | 24 * count | parameters, then Adam first moments, then second moments, little-endian `f64` |

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::adam::Adam;
use crate::features::TargetScaler;
use crate::network::{Architecture, NetworkParams};
use crate::train::{Model, TrainConfig};
use crate::NetError;

pub const MAGIC: &[u8; 8] = b"SURJNET\0";
pub const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    architecture: Architecture,
    config: TrainConfig,
    target: TargetScaler,
    adam_step: u64,
    param_count: usize,
}

fn write_f64s<W: Write>(out: &mut W, xs: &[f64]) -> io::Result<()> {
    for x in xs {
        out.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

fn read_f64s<R: Read>(input: &mut R, n: usize) -> Result<Vec<f64>, NetError> {
    let mut buf = [0u8; 8];
    (0..n)
        .map(|_| {
            input.read_exact(&mut buf)?;
            Ok(f64::from_le_bytes(buf))
        })
        .collect()
}

fn bad(msg: impl Into<String>) -> NetError {
    NetError::Format(msg.into())
}

pub fn write_model<W: Write>(model: &Model, mut out: W) -> Result<(), NetError> {
    let header = Header {
        architecture: model.params.arch,
        config: model.config,
        target: model.target,
        adam_step: model.adam.step,
        param_count: model.params.values().len(),
    };
    let json = serde_json::to_vec(&header).map_err(|e| bad(e.to_string()))?;
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(json.len() as u64).to_le_bytes())?;
    out.write_all(&json)?;
    write_f64s(&mut out, model.params.values())?;
    write_f64s(&mut out, &model.adam.m)?;
    write_f64s(&mut out, &model.adam.v)?;
    out.flush()?;
    Ok(())
}

pub fn read_model<R: Read>(mut input: R) -> Result<Model, NetError> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(bad("not a model checkpoint"));
    }
    let mut word = [0u8; 4];
    input.read_exact(&mut word)?;
    let version = u32::from_le_bytes(word);
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let mut len = [0u8; 8];
    input.read_exact(&mut len)?;
    let len = u64::from_le_bytes(len);
    if len > 1 << 20 {
        return Err(bad(format!("header of {len} bytes")));
    }
    let mut json = vec![0u8; len as usize];
    input.read_exact(&mut json)?;
    let header: Header = serde_json::from_slice(&json).map_err(|e| bad(e.to_string()))?;
    let arch = Architecture::new(header.architecture.width, header.architecture.filters, header.architecture.hidden)?;
    if header.param_count != arch.param_count() {
        return Err(bad("parameter count does not match architecture"));
    }
    header.config.validate()?;
    let n = header.param_count;
    let params = NetworkParams::from_values(arch, read_f64s(&mut input, n)?)?;
    let mut adam = Adam::new(header.config.adam, n);
    adam.m = read_f64s(&mut input, n)?;
    adam.v = read_f64s(&mut input, n)?;
    adam.step = header.adam_step;
    if input.read(&mut [0u8])? != 0 {
        return Err(bad("trailing bytes"));
    }
    Ok(Model { config: header.config, params, adam, target: header.target })
}

pub fn save_model(model: &Model, path: &Path) -> Result<(), NetError> {
    write_model(model, BufWriter::new(File::create(path)?))
}

pub fn load_model(path: &Path) -> Result<Model, NetError> {
    read_model(BufReader::new(File::open(path)?))
}

/// `epoch,train_mse` lines, epochs counted from 1.
pub fn write_history<W: Write>(history: &[f64], mut out: W) -> io::Result<()> {
    writeln!(out, "epoch,train_mse")?;
    for (i, loss) in history.iter().enumerate() {
        writeln!(out, "{},{}", i + 1, loss)?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adam::AdamConfig;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn model() -> Model {
        let arch = Architecture::new(4, 3, 5).unwrap();
        let params = NetworkParams::glorot(arch, &mut ChaCha8Rng::seed_from_u64(3));
        let mut adam = Adam::new(AdamConfig::default(), arch.param_count());
        let mut p = params.clone();
        adam.update(p.values_mut(), &vec![0.25; arch.param_count()]);
        Model {
            config: TrainConfig { filters: 3, hidden: 5, ..TrainConfig::default() },
            params: p,
            adam,
            target: TargetScaler { mean: 0.125, std: 0.3 },
        }
    }

    #[test]
    fn round_trip() {
        let m = model();
        let mut buf = Vec::new();
        write_model(&m, &mut buf).unwrap();
        assert_eq!(&buf[..8], MAGIC);
        assert_eq!(read_model(&buf[..]).unwrap(), m);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.bin");
        save_model(&m, &path).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), buf);
        assert_eq!(load_model(&path).unwrap(), m);
    }

    #[test]
    fn corrupt_inputs_rejected() {
        let mut buf = Vec::new();
        write_model(&model(), &mut buf).unwrap();
        let mut wrong_magic = buf.clone();
        wrong_magic[0] = b'X';
        assert!(matches!(read_model(&wrong_magic[..]), Err(NetError::Format(_))));
        let mut wrong_version = buf.clone();
        wrong_version[8] = 9;
        assert!(matches!(read_model(&wrong_version[..]), Err(NetError::Format(_))));
        assert!(read_model(&buf[..buf.len() - 1]).is_err());
        let mut trailing = buf.clone();
        trailing.push(0);
        assert!(matches!(read_model(&trailing[..]), Err(NetError::Format(_))));
    }

    #[test]
    fn history_csv() {
        let mut out = Vec::new();
        write_history(&[0.5, 0.25], &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "epoch,train_mse\n1,0.5\n2,0.25\n");
    }
}
