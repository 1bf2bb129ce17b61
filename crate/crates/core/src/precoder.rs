//! Real orthogonal space-time precoders: algebraic rotations and their
//! embeddings into M-slot cooperation frames.
//!
//! Rotations spread `s` constellation symbols across diversity blocks. The
//! 2x2 rotation is given in closed form; the 4x4 full-diversity rotation is
//! shipped as a checksummed data file (17 significant digits, row major)
//! and validated through its normalized minimum product distance.

use num_complex::Complex64;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::linalg::CMat;

/// Angle of the real 2x2 cyclotomic rotation (radians).
pub const CYCLOTOMIC_2X2_ANGLE: f64 = 4.158_814_61;

/// Normalized minimum product distance of the shipped 4x4 rotation.
pub const KRUSKEMPER_4X4_NMPD: f64 = 0.438_993;

const KRUSKEMPER_4X4_FILE: &str = include_str!("../data/kruskemper4.txt");

#[derive(Debug, Error, PartialEq)]
pub enum PrecoderError {
    #[error("rotation must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("spreading {s} exceeds frame length {m}")]
    SpreadingTooLarge { s: usize, m: usize },
    #[error("spreading {s} does not divide frame length {m}")]
    SpreadingNotDivisor { s: usize, m: usize },
    #[error("rotation data file: {0}")]
    DataFile(String),
    #[error("rotation data checksum mismatch (expected {expected}, got {actual})")]
    Checksum { expected: String, actual: String },
}

/// How a precoder spreads symbols over the frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpreadStrategy {
    Identity,
    Single,
    Multi,
    Full,
}

/// M x M real orthogonal spreading matrix with its declared spreading
/// factor.
#[derive(Clone, Debug, PartialEq)]
pub struct Precoder {
    rows: Vec<Vec<f64>>,
    spreading: usize,
    strategy: SpreadStrategy,
}

impl Precoder {
    pub fn identity(m: usize) -> Self {
        let rows = (0..m)
            .map(|i| (0..m).map(|j| f64::from(i == j)).collect())
            .collect();
        Precoder { rows, spreading: 1, strategy: SpreadStrategy::Identity }
    }

    /// The real 2x2 cyclotomic rotation `[[cos, sin], [sin, -cos]]`.
    pub fn cyclotomic_2x2() -> Self {
        let (sin, cos) = CYCLOTOMIC_2X2_ANGLE.sin_cos();
        Precoder {
            rows: vec![vec![cos, sin], vec![sin, -cos]],
            spreading: 2,
            strategy: SpreadStrategy::Full,
        }
    }

    /// The 4x4 full-diversity rotation loaded from the bundled data file.
    pub fn kruskemper_4x4() -> Result<Self, PrecoderError> {
        let rows = parse_rotation_file(KRUSKEMPER_4X4_FILE, "kruskemper4")?;
        Ok(Precoder { rows, spreading: 4, strategy: SpreadStrategy::Full })
    }

    /// Embed a single s x s rotation into an M x M frame: it acts on
    /// coordinates `{0, M-s+1, ..., M-1}` (the first slot together with the
    /// s-1 last ones), identity elsewhere.
    pub fn embed_single(rotation: &Precoder, m: usize) -> Result<Self, PrecoderError> {
        let s = rotation.dim();
        if s > m {
            return Err(PrecoderError::SpreadingTooLarge { s, m });
        }
        let mut coords = vec![0usize];
        coords.extend(m - s + 1..m);
        let mut rows = Precoder::identity(m).rows;
        for (a, &ca) in coords.iter().enumerate() {
            for (b, &cb) in coords.iter().enumerate() {
                rows[ca][cb] = rotation.rows[a][b];
            }
        }
        Ok(Precoder { rows, spreading: s, strategy: SpreadStrategy::Single })
    }

    /// Embed `M/s` copies of an s x s rotation: the g-th copy couples
    /// coordinate `g` with the `s-1` lowest uncoupled coordinates.
    pub fn embed_multi(rotation: &Precoder, m: usize) -> Result<Self, PrecoderError> {
        let s = rotation.dim();
        if m % s != 0 {
            return Err(PrecoderError::SpreadingNotDivisor { s, m });
        }
        let mut rows = Precoder::identity(m).rows;
        for g in 0..m / s {
            let mut coords = vec![g];
            coords.extend(m - (g + 1) * (s - 1)..m - g * (s - 1));
            for (a, &ca) in coords.iter().enumerate() {
                for (b, &cb) in coords.iter().enumerate() {
                    rows[ca][cb] = rotation.rows[a][b];
                }
            }
        }
        Ok(Precoder { rows, spreading: s, strategy: SpreadStrategy::Multi })
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn spreading(&self) -> usize {
        self.spreading
    }

    pub fn strategy(&self) -> SpreadStrategy {
        self.strategy
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Max |S S^T - I| entry.
    pub fn orthogonality_defect(&self) -> f64 {
        let m = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                let dot: f64 = (0..m).map(|k| self.rows[i][k] * self.rows[j][k]).sum();
                worst = worst.max((dot - f64::from(i == j)).abs());
            }
        }
        worst
    }

    /// Largest number of nonzero entries in any row or column.
    pub fn effective_spreading(&self) -> usize {
        let m = self.dim();
        let row_max = self
            .rows
            .iter()
            .map(|r| r.iter().filter(|&&x| x != 0.0).count())
            .max()
            .unwrap_or(0);
        let col_max = (0..m)
            .map(|j| (0..m).filter(|&i| self.rows[i][j] != 0.0).count())
            .max()
            .unwrap_or(0);
        row_max.max(col_max)
    }

    /// `z * S` (row-vector convention).
    pub fn apply(&self, z: &[Complex64]) -> Vec<Complex64> {
        let m = self.dim();
        assert_eq!(z.len(), m);
        (0..m)
            .map(|j| (0..m).map(|i| z[i] * self.rows[i][j]).sum())
            .collect()
    }

    pub fn to_cmat(&self) -> CMat {
        CMat::from_real_rows(&self.rows)
    }
}

/// Normalized minimum product distance of the rotated integer lattice:
/// n-th root of `min` over nonzero integer vectors `v` (entries in
/// `[-radius, radius]`) of the product of |(vS)_k|.
pub fn min_product_distance(precoder: &Precoder, radius: i32) -> f64 {
    assert!(radius >= 1);
    let n = precoder.dim();
    let span = (2 * radius + 1) as usize;
    let total = span.pow(n as u32);
    let mut best = f64::INFINITY;
    let mut v = vec![0i64; n];
    for idx in 0..total {
        let mut rem = idx;
        let mut all_zero = true;
        for vi in v.iter_mut() {
            let digit = (rem % span) as i64 - radius as i64;
            rem /= span;
            *vi = digit;
            all_zero &= digit == 0;
        }
        if all_zero {
            continue;
        }
        let mut prod = 1.0f64;
        for k in 0..n {
            let comp: f64 = (0..n).map(|i| v[i] as f64 * precoder.rows[i][k]).sum();
            prod *= comp.abs();
        }
        if prod < best {
            best = prod;
        }
    }
    best.powf(1.0 / n as f64)
}

/// Parse a rotation data file: `# rotation: <name>`, `# dim: <n>`,
/// `# sha256: <hex>` header lines followed by row-major decimal entries.
/// The checksum covers the numeric payload.
pub fn parse_rotation_file(text: &str, expected_name: &str) -> Result<Vec<Vec<f64>>, PrecoderError> {
    let mut name = None;
    let mut dim = None;
    let mut sha = None;
    let mut payload = String::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("rotation:") {
                name = Some(v.trim().to_string());
            } else if let Some(v) = rest.strip_prefix("dim:") {
                dim = Some(
                    v.trim()
                        .parse::<usize>()
                        .map_err(|e| PrecoderError::DataFile(format!("bad dim: {e}")))?,
                );
            } else if let Some(v) = rest.strip_prefix("sha256:") {
                sha = Some(v.trim().to_string());
            }
        } else if !line.trim().is_empty() {
            payload.push_str(line);
            payload.push('\n');
        }
    }
    let name = name.ok_or_else(|| PrecoderError::DataFile("missing rotation name".into()))?;
    if name != expected_name {
        return Err(PrecoderError::DataFile(format!(
            "expected rotation '{expected_name}', file contains '{name}'"
        )));
    }
    let dim = dim.ok_or_else(|| PrecoderError::DataFile("missing dim header".into()))?;
    let expected_sha = sha.ok_or_else(|| PrecoderError::DataFile("missing sha256 header".into()))?;
    let actual = hex_digest(payload.as_bytes());
    if actual != expected_sha {
        return Err(PrecoderError::Checksum { expected: expected_sha, actual });
    }
    let rows: Vec<Vec<f64>> = payload
        .lines()
        .map(|line| {
            line.split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|e| PrecoderError::DataFile(format!("bad entry '{t}': {e}")))
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(PrecoderError::NotSquare {
            rows: rows.len(),
            cols: rows.first().map_or(0, Vec::len),
        });
    }
    Ok(rows)
}

fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Radius-4 normalized minimum product distance of the 2x2 cyclotomic
    /// rotation, frozen from an exhaustive high-precision search.
    const CYCLOTOMIC_2X2_NMPD: f64 = 0.668_740_193_583_773_8;

    #[test]
    fn cyclotomic_is_orthogonal_reflection() {
        let s1 = Precoder::cyclotomic_2x2();
        assert!(s1.orthogonality_defect() < 1e-15);
        assert!((s1.entry(0, 0) - CYCLOTOMIC_2X2_ANGLE.cos()).abs() < 1e-15);
        assert_eq!(s1.entry(0, 1), s1.entry(1, 0));
        assert_eq!(s1.entry(1, 1), -s1.entry(0, 0));
    }

    #[test]
    fn cyclotomic_nmpd_regression() {
        let got = min_product_distance(&Precoder::cyclotomic_2x2(), 4);
        assert!((got - CYCLOTOMIC_2X2_NMPD).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn single_embedding_reproduces_4x4_pattern() {
        let s2 = Precoder::embed_single(&Precoder::cyclotomic_2x2(), 4).unwrap();
        let (sin, cos) = CYCLOTOMIC_2X2_ANGLE.sin_cos();
        assert_eq!(s2.entry(0, 0), cos);
        assert_eq!(s2.entry(0, 3), sin);
        assert_eq!(s2.entry(3, 0), sin);
        assert_eq!(s2.entry(3, 3), -cos);
        for k in 1..3 {
            for j in 0..4 {
                assert_eq!(s2.entry(k, j), f64::from(k == j), "row {k} must be identity");
            }
        }
        assert_eq!(s2.spreading(), 2);
        assert!(s2.orthogonality_defect() < 1e-15);
    }

    #[test]
    fn single_embedding_m3() {
        let s = Precoder::embed_single(&Precoder::cyclotomic_2x2(), 3).unwrap();
        assert_eq!(s.entry(1, 1), 1.0);
        assert_ne!(s.entry(0, 2), 0.0);
        assert_ne!(s.entry(2, 0), 0.0);
        assert_eq!(s.effective_spreading(), 2);
    }

    #[test]
    fn multi_embedding_reproduces_pairing() {
        let s3 = Precoder::embed_multi(&Precoder::cyclotomic_2x2(), 4).unwrap();
        let (sin, cos) = CYCLOTOMIC_2X2_ANGLE.sin_cos();
        // pairs {0,3} and {1,2}
        assert_eq!(s3.entry(0, 0), cos);
        assert_eq!(s3.entry(0, 3), sin);
        assert_eq!(s3.entry(1, 1), cos);
        assert_eq!(s3.entry(1, 2), sin);
        assert_eq!(s3.entry(2, 1), sin);
        assert_eq!(s3.entry(2, 2), -cos);
        assert_eq!(s3.entry(3, 3), -cos);
        assert!(s3.orthogonality_defect() < 1e-15);

        let s6 = Precoder::embed_multi(&Precoder::cyclotomic_2x2(), 6).unwrap();
        for (a, b) in [(0usize, 5usize), (1, 4), (2, 3)] {
            assert_ne!(s6.entry(a, b), 0.0, "pair ({a},{b}) must couple");
        }
    }

    #[test]
    fn embedding_errors() {
        let rot = Precoder::cyclotomic_2x2();
        assert!(matches!(
            Precoder::embed_single(&rot, 1),
            Err(PrecoderError::SpreadingTooLarge { .. })
        ));
        assert!(matches!(
            Precoder::embed_multi(&rot, 5),
            Err(PrecoderError::SpreadingNotDivisor { .. })
        ));
    }

    #[test]
    fn full_embedding_equals_rotation() {
        let rot = Precoder::cyclotomic_2x2();
        let single = Precoder::embed_single(&rot, 2).unwrap();
        let multi = Precoder::embed_multi(&rot, 2).unwrap();
        assert_eq!(single.rows(), rot.rows());
        assert_eq!(multi.rows(), rot.rows());
    }

    #[test]
    fn kruskemper_loads_and_validates() {
        let k = Precoder::kruskemper_4x4().unwrap();
        assert_eq!(k.dim(), 4);
        assert!(k.orthogonality_defect() < 1e-12);
        let nmpd = min_product_distance(&k, 3);
        assert!((nmpd - KRUSKEMPER_4X4_NMPD).abs() < 1e-4, "nmpd = {nmpd}");
    }

    #[test]
    fn corrupted_rotation_file_is_rejected() {
        let tampered = KRUSKEMPER_4X4_FILE.replace("0.31208201907947943", "0.31218201907947943");
        assert!(matches!(
            parse_rotation_file(&tampered, "kruskemper4"),
            Err(PrecoderError::Checksum { .. })
        ));
        assert!(parse_rotation_file(KRUSKEMPER_4X4_FILE, "other").is_err());
    }

    #[test]
    fn identity_has_zero_product_distance() {
        assert_eq!(min_product_distance(&Precoder::identity(3), 2), 0.0);
    }

    #[test]
    fn apply_matches_matrix_product() {
        let s = Precoder::embed_single(&Precoder::cyclotomic_2x2(), 3).unwrap();
        let z = vec![
            Complex64::new(1.0, -0.5),
            Complex64::new(0.0, 2.0),
            Complex64::new(-1.0, 1.0),
        ];
        let direct = s.apply(&z);
        let via_mat = s.to_cmat().left_mul_vec(&z);
        for (a, b) in direct.iter().zip(&via_mat) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
