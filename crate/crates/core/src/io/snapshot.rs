//! Binary field snapshots.
//!
//! Layout, all integers and floats little-endian:
//!
//! | bytes | content |
//! |---|---|
//! | 5 | magic `NLKG1` |
//! | 1 | grid kind: 0 radial, 1 periodic box, 2 odd line of a radial run |
//! | 1 | number of components (1 for a field, 2 for a state (u, u̇)) |
//! | 4 | space dimension d (u32) |
//! | 8 | nodes per axis n (u64) |
//! | 8 | values per component: n, or n^d for a box (u64) |
//! | 8 | r_max or the box side (f64) |
//! | 8 · count · components | values in lexicographic lattice order |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use crate::error::{NlkgError, Result};
use crate::evolution::{EvolState, Geometry};
use crate::exec::Exec;
use crate::field::{BoxField, BoxGrid, RadialField, RadialGrid};
use crate::functionals::StatePair;

/// File signature.
pub const MAGIC: &[u8; 5] = b"NLKG1";

/// Which lattice the values live on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// A [`RadialGrid`] (d, r_max, n).
    Radial,
    /// A periodic [`BoxGrid`] (d, side, n per axis).
    Box,
    /// The odd line [-r_max, r_max) of a three-dimensional radial run; the
    /// values are w = r·u.
    Line,
}

impl GridKind {
    fn code(self) -> u8 {
        match self {
            GridKind::Radial => 0,
            GridKind::Box => 1,
            GridKind::Line => 2,
        }
    }

    fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(GridKind::Radial),
            1 => Some(GridKind::Box),
            2 => Some(GridKind::Line),
            _ => None,
        }
    }
}

/// Decoded snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub kind: GridKind,
    pub d: u32,
    pub n: u64,
    /// r_max or box side.
    pub extent: f64,
    /// One or two components of equal length.
    pub components: Vec<Vec<f64>>,
}

fn with_path(path: &Path, e: impl std::fmt::Display) -> NlkgError {
    NlkgError::Io(format!("{}: {e}", path.display()))
}

impl Snapshot {
    pub fn from_radial(phi: &RadialField) -> Self {
        let g = phi.grid();
        Self {
            kind: GridKind::Radial,
            d: g.d() as u32,
            n: g.n() as u64,
            extent: g.r_max(),
            components: vec![phi.values().to_vec()],
        }
    }

    /// Both fields of a radial state; they share one grid.
    pub fn from_state_pair(s: &StatePair) -> Self {
        let mut snap = Self::from_radial(&s.u0);
        snap.components.push(s.u1.values().to_vec());
        snap
    }

    pub fn from_box(u: &BoxField) -> Self {
        let g = u.grid();
        Self { kind: GridKind::Box, d: g.d() as u32, n: g.n() as u64, extent: g.side(), components: vec![u.values().to_vec()] }
    }

    /// The current (u, u̇) of an evolution state.
    pub fn from_evol_state(state: &EvolState) -> Self {
        match state.geometry() {
            Geometry::Box(_) => {
                let (u0, u1) = state.box_fields().expect("box geometry has box fields");
                let mut snap = Self::from_box(&u0);
                snap.components.push(u1.into_values());
                snap
            }
            Geometry::Radial3 { r_max, n } => Self {
                kind: GridKind::Line,
                d: 3,
                n: *n as u64,
                extent: *r_max,
                components: vec![state.w().to_vec(), state.w_t()],
            },
        }
    }

    fn radial_grid(&self) -> Result<Arc<RadialGrid>> {
        if self.kind != GridKind::Radial {
            return Err(NlkgError::Parse("snapshot does not hold a radial field".into()));
        }
        Ok(Arc::new(RadialGrid::new(self.d as usize, self.extent, self.n as usize)?))
    }

    pub fn to_radial(&self) -> Result<RadialField> {
        RadialField::new(self.radial_grid()?, self.components[0].clone())
    }

    /// (u0, u1); a one-component snapshot is taken at rest.
    pub fn to_state_pair(&self) -> Result<StatePair> {
        let grid = self.radial_grid()?;
        let u0 = RadialField::new(grid.clone(), self.components[0].clone())?;
        let u1 = match self.components.get(1) {
            Some(v) => RadialField::new(grid, v.clone())?,
            None => RadialField::zeros(grid),
        };
        StatePair::new(u0, u1)
    }

    /// The state a run can resume from: box and line snapshots map onto
    /// their geometry, radial ones are placed in `radial_geometry`.
    pub fn to_evol_state(&self, radial_geometry: Option<Geometry>, exec: Exec) -> Result<EvolState> {
        let zero = vec![0.0; self.components[0].len()];
        let second = self.components.get(1).unwrap_or(&zero);
        match self.kind {
            GridKind::Box => {
                let grid = Arc::new(BoxGrid::new(self.d as usize, self.n as usize, self.extent)?);
                let u0 = BoxField::new(grid.clone(), self.components[0].clone())?;
                let u1 = BoxField::new(grid, second.clone())?;
                EvolState::from_box(&u0, &u1, exec)
            }
            GridKind::Line => {
                let geometry = Geometry::radial3(self.extent, self.n as usize)?;
                EvolState::from_values(geometry, self.components[0].clone(), second.clone(), exec)
            }
            GridKind::Radial => {
                let geometry = radial_geometry
                    .ok_or_else(|| NlkgError::Parse("a radial snapshot needs a target geometry".into()))?;
                EvolState::from_state_pair(geometry, &self.to_state_pair()?, exec)
            }
        }
    }

    fn expected_count(&self) -> Option<u64> {
        match self.kind {
            GridKind::Box => self.n.checked_pow(self.d),
            _ => Some(self.n),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let count = self.components.first().map_or(0, |c| c.len());
        let mut out = Vec::with_capacity(35 + 8 * count * self.components.len());
        out.extend_from_slice(MAGIC);
        out.push(self.kind.code());
        out.push(self.components.len() as u8);
        out.extend_from_slice(&self.d.to_le_bytes());
        out.extend_from_slice(&self.n.to_le_bytes());
        out.extend_from_slice(&(count as u64).to_le_bytes());
        out.extend_from_slice(&self.extent.to_le_bytes());
        for c in &self.components {
            for v in c {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |what: &str| NlkgError::Parse(format!("bad snapshot: {what}"));
        if bytes.len() < 35 || &bytes[..5] != MAGIC {
            return Err(bad("missing NLKG1 header"));
        }
        let kind = GridKind::from_code(bytes[5]).ok_or_else(|| bad("unknown grid kind"))?;
        let ncomp = bytes[6] as usize;
        if !(1..=2).contains(&ncomp) {
            return Err(bad("component count must be 1 or 2"));
        }
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
        let u64_at = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().expect("8 bytes"));
        let d = u32_at(7);
        let n = u64_at(11);
        let count = u64_at(19);
        let extent = f64::from_le_bytes(bytes[27..35].try_into().expect("8 bytes"));
        let mut snap = Self { kind, d, n, extent, components: Vec::new() };
        if snap.expected_count() != Some(count) {
            return Err(bad("value count does not match the grid"));
        }
        let body = &bytes[35..];
        let need = (count as usize).checked_mul(8 * ncomp).ok_or_else(|| bad("size overflow"))?;
        if body.len() != need {
            return Err(bad(&format!("expected {need} value bytes, found {}", body.len())));
        }
        snap.components = body
            .chunks_exact(8 * count as usize)
            .map(|c| c.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes"))).collect())
            .collect();
        Ok(snap)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| with_path(path, e))?;
        let mut w = BufWriter::new(file);
        w.write_all(&self.to_bytes()).map_err(|e| with_path(path, e))?;
        w.flush().map_err(|e| with_path(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| with_path(path, e))?;
        let mut bytes = Vec::new();
        BufReader::new(file).read_to_end(&mut bytes).map_err(|e| with_path(path, e))?;
        Self::from_bytes(&bytes).map_err(|e| with_path(path, e))
    }
}
