use std::io::{Read, Write};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::LidarError;
use crate::geometry::{Aabb, Pose};

pub const CLOUD_MAGIC: [u8; 4] = *b"PDCL";
pub const CLOUD_VERSION: u16 = 1;
/// Stored source id for points without one.
pub const NO_SOURCE: u32 = u32::MAX;

const FLAG_NORMALIZED: u8 = 1;
const FLAG_SOURCE_IDS: u8 = 2;
const FLAG_SIMULATED: u8 = 4;

/// Coordinate frame of a cloud. `SensorRos` is +x forward, +z up;
/// `SensorBlender` is the same frame turned 180° about z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    SensorRos,
    SensorBlender,
    World,
}

impl Frame {
    fn code(self) -> u8 {
        match self {
            Frame::SensorRos => 0,
            Frame::SensorBlender => 1,
            Frame::World => 2,
        }
    }

    fn from_code(c: u8) -> Option<Self> {
        [Frame::SensorRos, Frame::SensorBlender, Frame::World].get(c as usize).copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Simulated,
    Ingested,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanCloud {
    pub points: Vec<Vector3<f64>>,
    /// Owning scene instance per point; simulated clouds only.
    pub source_ids: Option<Vec<u32>>,
    pub frame: Frame,
    pub normalized: bool,
    pub provenance: Provenance,
}

impl ScanCloud {
    pub fn ingested(points: Vec<Vector3<f64>>, frame: Frame) -> Self {
        Self { points, source_ids: None, frame, normalized: false, provenance: Provenance::Ingested }
    }

    pub fn simulated(points: Vec<Vector3<f64>>, source_ids: Vec<u32>, frame: Frame) -> Self {
        debug_assert_eq!(points.len(), source_ids.len());
        Self { points, source_ids: Some(source_ids), frame, normalized: false, provenance: Provenance::Simulated }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::from_points(&self.points)
    }

    /// Keeps the points at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            points: indices.iter().map(|&i| self.points[i]).collect(),
            source_ids: self.source_ids.as_ref().map(|ids| indices.iter().map(|&i| ids[i]).collect()),
            ..self.clone()
        }
    }

    /// First `n` points (time order for simulated and ingested captures).
    pub fn truncated(&self, n: usize) -> Self {
        let idx: Vec<usize> = (0..n.min(self.len())).collect();
        self.select(&idx)
    }

    /// Applies `motion` to every point and retags the frame.
    pub fn transformed(&self, motion: &Pose, frame: Frame) -> Self {
        Self { points: self.points.iter().map(|p| motion.transform_point(p)).collect(), frame, ..self.clone() }
    }

    /// Hit count per instance id.
    pub fn hit_counts(&self) -> Result<std::collections::BTreeMap<u32, usize>, LidarError> {
        let ids = self.source_ids.as_ref().ok_or(LidarError::MissingSourceIds)?;
        let mut m = std::collections::BTreeMap::new();
        for &id in ids {
            *m.entry(id).or_insert(0) += 1;
        }
        Ok(m)
    }

    /// Little-endian binary: 16-byte header (magic, version u16, frame u8,
    /// flags u8, count u64) then per point x, y, z as f32 and source id u32.
    pub fn write_binary(&self, mut w: impl Write) -> Result<(), LidarError> {
        let mut flags = 0u8;
        if self.normalized {
            flags |= FLAG_NORMALIZED;
        }
        if self.source_ids.is_some() {
            flags |= FLAG_SOURCE_IDS;
        }
        if self.provenance == Provenance::Simulated {
            flags |= FLAG_SIMULATED;
        }
        let mut buf = Vec::with_capacity(16 + 16 * self.len());
        buf.extend_from_slice(&CLOUD_MAGIC);
        buf.extend_from_slice(&CLOUD_VERSION.to_le_bytes());
        buf.push(self.frame.code());
        buf.push(flags);
        buf.extend_from_slice(&(self.len() as u64).to_le_bytes());
        for (i, p) in self.points.iter().enumerate() {
            for c in p.iter() {
                buf.extend_from_slice(&(*c as f32).to_le_bytes());
            }
            let id = self.source_ids.as_ref().map_or(NO_SOURCE, |ids| ids[i]);
            buf.extend_from_slice(&id.to_le_bytes());
        }
        w.write_all(&buf).map_err(|e| LidarError::Io(e.to_string()))
    }

    pub fn read_binary(mut r: impl Read) -> Result<Self, LidarError> {
        let mut data = Vec::new();
        r.read_to_end(&mut data).map_err(|e| LidarError::Io(e.to_string()))?;
        let bad = |m: &str| LidarError::CloudFormat(m.into());
        if data.len() < 16 || data[..4] != CLOUD_MAGIC {
            return Err(bad("missing cloud magic"));
        }
        let version = u16::from_le_bytes([data[4], data[5]]);
        if version != CLOUD_VERSION {
            return Err(LidarError::CloudFormat(format!("unsupported cloud version {version}")));
        }
        let frame = Frame::from_code(data[6]).ok_or_else(|| bad("unknown frame code"))?;
        let flags = data[7];
        let count = u64::from_le_bytes(data[8..16].try_into().expect("8 bytes")) as usize;
        let body = &data[16..];
        if body.len() != count.checked_mul(16).ok_or_else(|| bad("count overflow"))? {
            return Err(LidarError::CloudFormat(format!("expected {count} records, found {} bytes", body.len())));
        }
        let mut points = Vec::with_capacity(count);
        let mut ids = Vec::with_capacity(count);
        for rec in body.chunks_exact(16) {
            let f = |o: usize| f32::from_le_bytes(rec[o..o + 4].try_into().expect("4 bytes")) as f64;
            points.push(Vector3::new(f(0), f(4), f(8)));
            ids.push(u32::from_le_bytes(rec[12..16].try_into().expect("4 bytes")));
        }
        Ok(Self {
            points,
            source_ids: (flags & FLAG_SOURCE_IDS != 0).then_some(ids),
            frame,
            normalized: flags & FLAG_NORMALIZED != 0,
            provenance: if flags & FLAG_SIMULATED != 0 { Provenance::Simulated } else { Provenance::Ingested },
        })
    }

    /// One `x y z` line per point, for viewers.
    pub fn write_xyz(&self, mut w: impl Write) -> Result<(), LidarError> {
        let mut s = String::with_capacity(self.len() * 32);
        for p in &self.points {
            s.push_str(&format!("{} {} {}\n", p.x, p.y, p.z));
        }
        w.write_all(s.as_bytes()).map_err(|e| LidarError::Io(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip() {
        let c = ScanCloud::simulated(vec![Vector3::new(1.5, -2.25, 0.125), Vector3::new(0.0, 3.0, -1.0)], vec![7, NO_SOURCE], Frame::World);
        let mut buf = Vec::new();
        c.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 2 * 16);
        assert_eq!(&buf[..4], b"PDCL");
        assert_eq!(ScanCloud::read_binary(buf.as_slice()).unwrap(), c);

        let ing = ScanCloud::ingested(vec![Vector3::new(1.0, 2.0, 3.0)], Frame::SensorRos);
        let mut buf = Vec::new();
        ing.write_binary(&mut buf).unwrap();
        assert_eq!(ScanCloud::read_binary(buf.as_slice()).unwrap(), ing);
    }

    #[test]
    fn binary_rejects_garbage() {
        assert!(ScanCloud::read_binary(&b"nope"[..]).is_err());
        let mut buf = Vec::new();
        ScanCloud::ingested(vec![Vector3::zeros()], Frame::World).write_binary(&mut buf).unwrap();
        buf.pop();
        assert!(matches!(ScanCloud::read_binary(buf.as_slice()), Err(LidarError::CloudFormat(_))));
    }

    #[test]
    fn xyz_lines() {
        let mut buf = Vec::new();
        ScanCloud::ingested(vec![Vector3::new(1.0, 2.5, -3.0)], Frame::World).write_xyz(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "1 2.5 -3\n");
    }
}
