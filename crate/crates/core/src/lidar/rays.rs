use std::f64::consts::FRAC_PI_2;
use std::io::{Read, Write};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::LidarError;
use crate::geometry::spherical_to_cartesian;

/// One scan ray; angles in radians, sensor frame (+x forward, +z up).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub timestamp: f64,
    pub azimuth: f64,
    pub elevation: f64,
}

impl Ray {
    pub fn direction(&self) -> Vector3<f64> {
        spherical_to_cartesian(self.azimuth, self.elevation)
    }
}

/// Time-ordered ray pattern of the scanner.
#[derive(Clone, Debug, PartialEq)]
pub struct RayTable {
    rows: Vec<Ray>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    timestamp: f64,
    azimuth_deg: f64,
    elevation_deg: f64,
}

impl RayTable {
    pub fn new(rows: Vec<Ray>) -> Result<Self, LidarError> {
        if rows.is_empty() {
            return Err(LidarError::InvalidRayTable { row: 0, message: "ray table is empty".into() });
        }
        let mut prev = f64::NEG_INFINITY;
        for (i, r) in rows.iter().enumerate() {
            let bad = |message: &str| LidarError::InvalidRayTable { row: i + 1, message: message.into() };
            if !(r.timestamp.is_finite() && r.azimuth.is_finite() && r.elevation.is_finite()) {
                return Err(bad("non-finite value"));
            }
            if r.timestamp < prev {
                return Err(bad("timestamps must be non-decreasing"));
            }
            if r.elevation.abs() >= FRAC_PI_2 {
                return Err(bad("elevation must be strictly inside (-90°, 90°)"));
            }
            prev = r.timestamp;
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[Ray] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// First `n` rows in time order (at least one row is kept).
    pub fn truncated(&self, n: usize) -> Self {
        Self { rows: self.rows[..n.clamp(1, self.rows.len())].to_vec() }
    }

    /// Reads `timestamp,azimuth_deg,elevation_deg` CSV with a header row.
    pub fn read_csv(reader: impl Read) -> Result<Self, LidarError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader);
        let mut rows = Vec::new();
        for (i, rec) in rdr.deserialize::<CsvRow>().enumerate() {
            let r = rec.map_err(|e| LidarError::InvalidRayTable { row: i + 1, message: e.to_string() })?;
            rows.push(Ray { timestamp: r.timestamp, azimuth: r.azimuth_deg.to_radians(), elevation: r.elevation_deg.to_radians() });
        }
        Self::new(rows)
    }

    pub fn write_csv(&self, writer: impl Write) -> Result<(), LidarError> {
        let mut w = csv::Writer::from_writer(writer);
        for r in &self.rows {
            w.serialize(CsvRow { timestamp: r.timestamp, azimuth_deg: r.azimuth.to_degrees(), elevation_deg: r.elevation.to_degrees() })
                .map_err(|e| LidarError::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| LidarError::Io(e.to_string()))
    }

    /// Deterministic non-repetitive rosette covering a circular field of
    /// view of `fov_deg` (full angle) around +x, sampled at `rate_hz`.
    ///
    /// The off-axis angle oscillates while the pattern rotates at an
    /// incommensurate rate, so successive petals never retrace each other and
    /// coverage densifies with integration time.
    pub fn rosette(count: usize, fov_deg: f64, rate_hz: f64) -> Result<Self, LidarError> {
        if count == 0 || !(fov_deg > 0.0 && fov_deg < 180.0) || !(rate_hz > 0.0) {
            return Err(LidarError::InvalidRayTable { row: 0, message: "rosette needs count ≥ 1, fov in (0, 180) and rate > 0".into() });
        }
        let half = 0.5 * fov_deg.to_radians();
        // Petal frequency and precession rate in rad/s; their ratio is irrational.
        let w_petal = 2.0 * std::f64::consts::PI * 1_300.0;
        let w_spin = w_petal / (7.0 + 0.5 * (1.0 + 5f64.sqrt()));
        let rows = (0..count)
            .map(|i| {
                let t = i as f64 / rate_hz;
                let theta = half * (w_petal * t).sin().abs();
                let phi = w_spin * t;
                let d = Vector3::new(theta.cos(), theta.sin() * phi.cos(), theta.sin() * phi.sin());
                Ray { timestamp: t, azimuth: d.y.atan2(d.x), elevation: d.z.clamp(-1.0, 1.0).asin() }
            })
            .collect();
        Self::new(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_rows() {
        let r = |t, e| Ray { timestamp: t, azimuth: 0.0, elevation: e };
        assert!(RayTable::new(vec![]).is_err());
        assert!(matches!(RayTable::new(vec![r(1.0, 0.0), r(0.5, 0.0)]), Err(LidarError::InvalidRayTable { row: 2, .. })));
        assert!(RayTable::new(vec![r(0.0, FRAC_PI_2)]).is_err());
        assert!(RayTable::new(vec![r(0.0, f64::NAN)]).is_err());
    }

    #[test]
    fn rosette_stays_in_fov() {
        let t = RayTable::rosette(20_000, 70.4, 100_000.0).unwrap();
        let half = 35.2f64.to_radians();
        let mut max_off = 0.0f64;
        for r in t.rows() {
            let off = r.direction().angle(&Vector3::x());
            assert!(off <= half + 1e-12);
            max_off = max_off.max(off);
        }
        assert!(max_off > 0.99 * half);
    }

    #[test]
    fn csv_round_trip() {
        let t = RayTable::rosette(100, 70.4, 100_000.0).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert!(buf.starts_with(b"timestamp,azimuth_deg,elevation_deg\n"));
        let back = RayTable::read_csv(buf.as_slice()).unwrap();
        for (a, b) in t.rows().iter().zip(back.rows()) {
            assert_eq!(a.timestamp, b.timestamp);
            assert!((a.azimuth - b.azimuth).abs() < 1e-15);
            assert!((a.elevation - b.elevation).abs() < 1e-15);
        }
    }
}
