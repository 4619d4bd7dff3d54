//! Bit-exact classical lattice-gas reference models.
//!
//! Cells are occupation bitmasks: bit `i` is the particle with velocity
//! `i`. D1Q3 orders velocities `(+1, 0, -1)` as bits `(0, 1, 2)`; the
//! only collision exchanges the rest particle with an opposite-moving
//! pair, `0b010 <-> 0b101`. FHP lives on a triangular grid with six
//! directions `c_i` at angles `60°·i` and its zero-momentum collisions:
//! a deterministic 180° rotation on {21, 42} and equal-probability
//! 120°/240° rotations on the orbits {9, 18, 36} and {27, 45, 54}.
//! D1Q2 drops the rest particle and is collisionless here.
//!
//! Momentum components are kept exact: x in half-units, y in units of
//! sqrt(3)/2.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Deterministic 180° partner states of the three-body collision.
pub const B3_STATES: [u8; 2] = [0b010101, 0b101010];
/// Two-body collision orbit (single opposite pair).
pub const B2_ORBIT: [u8; 3] = [0b001001, 0b010010, 0b100100];
/// Four-body collision orbit (complement of the two-body orbit).
pub const B4_ORBIT: [u8; 3] = [0b011011, 0b101101, 0b110110];
/// Cells with no asymmetric opposite pair: the stochastic orbits plus the
/// empty and full cells, all of them fixed by a 180° rotation.
pub const ZERO_ASYMMETRIC_CLASS: [u8; 8] = [0, 9, 18, 27, 36, 45, 54, 63];

#[derive(Debug, Error)]
pub enum LgcaError {
    #[error("operation needs model {expected:?}, lattice is {found:?}")]
    WrongModel { expected: Model, found: Model },
    #[error("cell value {value} out of range for {model:?}")]
    CellOutOfRange { value: u32, model: Model },
    #[error("triangular lattice needs an even number of rows, got {0}")]
    OddRowCount(usize),
    #[error("empty lattice")]
    Empty,
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    D1Q3,
    Fhp,
    D1Q2,
}

impl Model {
    pub fn velocities(self) -> usize {
        match self {
            Model::D1Q3 => 3,
            Model::Fhp => 6,
            Model::D1Q2 => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Model::D1Q3 => "d1q3",
            Model::Fhp => "fhp",
            Model::D1Q2 => "d1q2",
        }
    }

    pub fn parse(s: &str) -> Option<Model> {
        match s {
            "d1q3" => Some(Model::D1Q3),
            "fhp" => Some(Model::Fhp),
            "d1q2" => Some(Model::D1Q2),
            _ => None,
        }
    }
}

/// Mass weighting. `PerBit` counts occupation bits; `RestWeighted` gives
/// the D1Q3 rest particle mass 2, which is the convention the collision
/// actually conserves (splitting a rest particle into two movers).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MassConvention {
    #[default]
    PerBit,
    RestWeighted,
}

/// Per-cell (or lattice-total) conserved quantities with exact momentum
/// components: x momentum in half-units, y momentum in sqrt(3)/2 units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct QuantityRecord {
    pub mass: i64,
    pub momentum_x_halves: i64,
    pub momentum_y_root3_halves: i64,
}

impl QuantityRecord {
    pub fn momentum_x(&self) -> f64 {
        self.momentum_x_halves as f64 / 2.0
    }

    pub fn momentum_y(&self) -> f64 {
        self.momentum_y_root3_halves as f64 * 3f64.sqrt() / 2.0
    }

    fn add(&mut self, other: QuantityRecord) {
        self.mass += other.mass;
        self.momentum_x_halves += other.momentum_x_halves;
        self.momentum_y_root3_halves += other.momentum_y_root3_halves;
    }
}

/// Mass of a cell under the given convention.
pub fn cell_mass(cell: u8, model: Model, convention: MassConvention) -> i64 {
    let bits = i64::from(cell.count_ones());
    match (model, convention) {
        (Model::D1Q3, MassConvention::RestWeighted) => bits + i64::from(cell >> 1 & 1),
        _ => bits,
    }
}

/// Per-cell conserved quantities (mass per bit; see [`cell_mass`] for the
/// weighted D1Q3 variant).
pub fn quantities(cell: u8, model: Model) -> QuantityRecord {
    quantities_with(cell, model, MassConvention::PerBit)
}

pub fn quantities_with(cell: u8, model: Model, convention: MassConvention) -> QuantityRecord {
    let bit = |i: usize| i64::from(cell >> i & 1);
    let (px2, py) = match model {
        Model::D1Q3 => (2 * (bit(0) - bit(2)), 0),
        Model::D1Q2 => (2 * (bit(0) - bit(1)), 0),
        Model::Fhp => (
            2 * (bit(0) - bit(3)) + bit(1) + bit(5) - bit(2) - bit(4),
            bit(1) + bit(2) - bit(4) - bit(5),
        ),
    };
    QuantityRecord {
        mass: cell_mass(cell, model, convention),
        momentum_x_halves: px2,
        momentum_y_root3_halves: py,
    }
}

/// Source of single random bits; collisions consume exactly one bit per
/// stochastic cell, which keeps classical/quantum comparisons replayable.
pub trait BitSource {
    fn next_bit(&mut self) -> bool;
}

/// Seeded bit source backed by ChaCha, drawing one bit at a time from a
/// cached word.
pub struct SeededBits {
    rng: ChaCha8Rng,
    cache: u64,
    remaining: u8,
}

impl SeededBits {
    pub fn new(seed: u64) -> Self {
        SeededBits {
            rng: ChaCha8Rng::seed_from_u64(seed),
            cache: 0,
            remaining: 0,
        }
    }
}

impl BitSource for SeededBits {
    fn next_bit(&mut self) -> bool {
        if self.remaining == 0 {
            self.cache = self.rng.next_u64();
            self.remaining = 64;
        }
        let bit = self.cache & 1 == 1;
        self.cache >>= 1;
        self.remaining -= 1;
        bit
    }
}

/// Scripted bit source for tests.
pub struct SliceBits<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl<'a> SliceBits<'a> {
    pub fn new(bits: &'a [bool]) -> Self {
        SliceBits { bits, pos: 0 }
    }
}

impl BitSource for SliceBits<'_> {
    fn next_bit(&mut self) -> bool {
        let bit = self.bits[self.pos];
        self.pos += 1;
        bit
    }
}

// ---------------------------------------------------------------------
// 1D lattices (D1Q3 and D1Q2)
// ---------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice1D {
    model: Model,
    cells: Vec<u8>,
}

impl Lattice1D {
    pub fn new(model: Model, cells: Vec<u8>) -> Result<Self, LgcaError> {
        if cells.is_empty() {
            return Err(LgcaError::Empty);
        }
        let limit = 1u32 << model.velocities();
        for &c in &cells {
            if u32::from(c) >= limit {
                return Err(LgcaError::CellOutOfRange {
                    value: c.into(),
                    model,
                });
            }
        }
        Ok(Lattice1D { model, cells })
    }

    pub fn empty(model: Model, sites: usize) -> Result<Self, LgcaError> {
        Lattice1D::new(model, vec![0; sites])
    }

    pub fn random(model: Model, sites: usize, fill: f64, seed: u64) -> Result<Self, LgcaError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = model.velocities();
        let cells = (0..sites)
            .map(|_| {
                let mut c = 0u8;
                for bit in 0..v {
                    if rng.gen_bool(fill) {
                        c |= 1 << bit;
                    }
                }
                c
            })
            .collect();
        Lattice1D::new(model, cells)
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn total_quantities(&self, convention: MassConvention) -> QuantityRecord {
        let mut total = QuantityRecord::default();
        for &c in &self.cells {
            total.add(quantities_with(c, self.model, convention));
        }
        total
    }
}

/// D1Q3 collision: `0b010 <-> 0b101`, everything else fixed.
pub fn d1q3_collide(cell: u8) -> u8 {
    match cell {
        0b010 => 0b101,
        0b101 => 0b010,
        other => other,
    }
}

fn expect_model(l: &Lattice1D, expected: Model) -> Result<(), LgcaError> {
    if l.model != expected {
        return Err(LgcaError::WrongModel {
            expected,
            found: l.model,
        });
    }
    Ok(())
}

/// Collision half of a D1Q3 step.
pub fn d1q3_collide_lattice(l: &Lattice1D) -> Result<Lattice1D, LgcaError> {
    expect_model(l, Model::D1Q3)?;
    Ok(Lattice1D {
        model: l.model,
        cells: l.cells.iter().map(|&c| d1q3_collide(c)).collect(),
    })
}

/// Streaming half: bit 0 moves right, bit 2 moves left, the rest bit
/// stays; periodic wrap.
pub fn d1q3_stream(l: &Lattice1D) -> Result<Lattice1D, LgcaError> {
    expect_model(l, Model::D1Q3)?;
    let n = l.cells.len();
    let cells = (0..n)
        .map(|x| {
            let right = l.cells[(x + n - 1) % n] & 0b001;
            let rest = l.cells[x] & 0b010;
            let left = l.cells[(x + 1) % n] & 0b100;
            right | rest | left
        })
        .collect();
    Ok(Lattice1D {
        model: l.model,
        cells,
    })
}

/// Full D1Q3 evolution step: collide every cell, then stream.
pub fn d1q3_step(l: &Lattice1D) -> Result<Lattice1D, LgcaError> {
    d1q3_stream(&d1q3_collide_lattice(l)?)
}

/// Collisionless D1Q2 streaming: bit 0 (velocity +1) moves right, bit 1
/// (velocity -1) moves left.
pub fn d1q2_stream(l: &Lattice1D) -> Result<Lattice1D, LgcaError> {
    expect_model(l, Model::D1Q2)?;
    let n = l.cells.len();
    let cells = (0..n)
        .map(|x| {
            let right = l.cells[(x + n - 1) % n] & 0b01;
            let left = l.cells[(x + 1) % n] & 0b10;
            right | left
        })
        .collect();
    Ok(Lattice1D {
        model: l.model,
        cells,
    })
}

/// Per-site mass averaged over a centered window of radius `window` with
/// periodic wrap.
pub fn density_profile(l: &Lattice1D, window: usize) -> Vec<f64> {
    density_profile_with(l, window, MassConvention::PerBit)
}

pub fn density_profile_with(l: &Lattice1D, window: usize, convention: MassConvention) -> Vec<f64> {
    let n = l.cells.len();
    let masses: Vec<i64> = l
        .cells
        .iter()
        .map(|&c| cell_mass(c, l.model, convention))
        .collect();
    (0..n)
        .map(|x| {
            let mut acc = 0i64;
            for d in 0..=2 * window {
                let idx = (x + n + d - window) % n;
                acc += masses[idx];
            }
            acc as f64 / (2 * window + 1) as f64
        })
        .collect()
}

// ---------------------------------------------------------------------
// FHP on the triangular grid
// ---------------------------------------------------------------------

/// Rotates an FHP cell: bit `i` moves to bit `(i + steps) mod 6`, i.e. a
/// rotation by `60°·steps`.
pub fn rotate_fhp_cell(cell: u8, steps: usize) -> u8 {
    let mut out = 0u8;
    for i in 0..6 {
        if cell >> i & 1 == 1 {
            out |= 1 << ((i + steps) % 6);
        }
    }
    out
}

/// FHP zero-momentum collision rule. The 180° pair is deterministic; the
/// stochastic orbits consume one bit choosing between the 120° and 240°
/// rotation.
pub fn fhp_collide(cell: u8, bits: &mut dyn BitSource) -> u8 {
    if B3_STATES.contains(&cell) {
        rotate_fhp_cell(cell, 3)
    } else if B2_ORBIT.contains(&cell) || B4_ORBIT.contains(&cell) {
        let steps = if bits.next_bit() { 4 } else { 2 };
        rotate_fhp_cell(cell, steps)
    } else {
        cell
    }
}

/// Triangular (hexagonal-neighbor) grid with row-parity offset: odd rows
/// sit half a cell to the right, so the six neighbors of `(x, y)` are
///
/// ```text
///   dir 0 E  (x+1, y)        dir 3 W  (x-1, y)
///   dir 1 NE (x+p, y+1)      dir 4 SW (x+p-1, y-1)
///   dir 2 NW (x+p-1, y+1)    dir 5 SE (x+p, y-1)
/// ```
///
/// with `p = y & 1`, all periodic. The row count must be even so wrapping
/// preserves parity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeTri {
    width: usize,
    height: usize,
    cells: Vec<u8>,
}

impl LatticeTri {
    pub fn new(width: usize, height: usize, cells: Vec<u8>) -> Result<Self, LgcaError> {
        if width == 0 || height == 0 {
            return Err(LgcaError::Empty);
        }
        if !height.is_multiple_of(2) {
            return Err(LgcaError::OddRowCount(height));
        }
        if cells.len() != width * height {
            return Err(LgcaError::Parse {
                line: 0,
                column: 0,
                message: format!(
                    "expected {} cells, got {}",
                    width * height,
                    cells.len()
                ),
            });
        }
        for &c in &cells {
            if c >= 64 {
                return Err(LgcaError::CellOutOfRange {
                    value: c.into(),
                    model: Model::Fhp,
                });
            }
        }
        Ok(LatticeTri {
            width,
            height,
            cells,
        })
    }

    pub fn empty(width: usize, height: usize) -> Result<Self, LgcaError> {
        LatticeTri::new(width, height, vec![0; width * height])
    }

    pub fn random(width: usize, height: usize, fill: f64, seed: u64) -> Result<Self, LgcaError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cells = (0..width * height)
            .map(|_| {
                let mut c = 0u8;
                for bit in 0..6 {
                    if rng.gen_bool(fill) {
                        c |= 1 << bit;
                    }
                }
                c
            })
            .collect();
        LatticeTri::new(width, height, cells)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.cells[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, cell: u8) {
        self.cells[y * self.width + x] = cell;
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    /// Destination of a particle leaving `(x, y)` in direction `dir`.
    pub fn neighbor(&self, x: usize, y: usize, dir: usize) -> (usize, usize) {
        let w = self.width as isize;
        let h = self.height as isize;
        let p = (y & 1) as isize;
        let (dx, dy): (isize, isize) = match dir {
            0 => (1, 0),
            1 => (p, 1),
            2 => (p - 1, 1),
            3 => (-1, 0),
            4 => (p - 1, -1),
            _ => (p, -1),
        };
        let nx = (x as isize + dx).rem_euclid(w) as usize;
        let ny = (y as isize + dy).rem_euclid(h) as usize;
        (nx, ny)
    }

    pub fn total_quantities(&self) -> QuantityRecord {
        let mut total = QuantityRecord::default();
        for &c in &self.cells {
            total.add(quantities(c, Model::Fhp));
        }
        total
    }
}

/// FHP evolution step: collide every cell independently (row-major
/// order), then stream each bit to its neighbor.
pub fn fhp_step(l: &LatticeTri, bits: &mut dyn BitSource) -> LatticeTri {
    let mut collided = l.clone();
    for y in 0..l.height {
        for x in 0..l.width {
            collided.set(x, y, fhp_collide(l.get(x, y), bits));
        }
    }
    let mut streamed = LatticeTri {
        width: l.width,
        height: l.height,
        cells: vec![0; l.width * l.height],
    };
    for y in 0..l.height {
        for x in 0..l.width {
            let cell = collided.get(x, y);
            for dir in 0..6 {
                if cell >> dir & 1 == 1 {
                    let (nx, ny) = l.neighbor(x, y, dir);
                    let idx = ny * l.width + nx;
                    streamed.cells[idx] |= 1 << dir;
                }
            }
        }
    }
    streamed
}

// ---------------------------------------------------------------------
// Text format: header `model N [M]`, then one row per line
// ---------------------------------------------------------------------

#[derive(Debug)]
pub enum AnyLattice {
    OneD(Lattice1D),
    Tri(LatticeTri),
}

pub fn write_lattice_1d(l: &Lattice1D) -> String {
    let mut out = format!("{} {}\n", l.model.name(), l.len());
    let row: Vec<String> = l.cells.iter().map(|c| c.to_string()).collect();
    out.push_str(&row.join(" "));
    out.push('\n');
    out
}

pub fn write_lattice_tri(l: &LatticeTri) -> String {
    let mut out = format!("fhp {} {}\n", l.width, l.height);
    for y in 0..l.height {
        let row: Vec<String> = (0..l.width).map(|x| l.get(x, y).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Parses the lattice text format. Comment lines starting with `#` and
/// blank lines are skipped; errors carry 1-based line/column positions.
pub fn parse_lattice(text: &str) -> Result<AnyLattice, LgcaError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (header_no, header) = lines.next().ok_or(LgcaError::Empty)?;
    let mut fields = header.split_whitespace();
    let model_name = fields.next().ok_or_else(|| LgcaError::Parse {
        line: header_no,
        column: 1,
        message: "missing model name".into(),
    })?;
    let model = Model::parse(model_name).ok_or_else(|| LgcaError::Parse {
        line: header_no,
        column: 1,
        message: format!("unknown model {model_name:?}"),
    })?;
    let parse_dim = |field: Option<&str>, what: &str| -> Result<usize, LgcaError> {
        field
            .ok_or_else(|| LgcaError::Parse {
                line: header_no,
                column: header.len(),
                message: format!("missing {what}"),
            })?
            .parse()
            .map_err(|_| LgcaError::Parse {
                line: header_no,
                column: 1,
                message: format!("bad {what}"),
            })
    };
    let n = parse_dim(fields.next(), "site count")?;
    let parse_row = |line_no: usize, line: &str, expected: usize, limit: u32| {
        let mut cells = Vec::with_capacity(expected);
        let mut column = 1usize;
        for tok in line.split_whitespace() {
            let value: u32 = tok.parse().map_err(|_| LgcaError::Parse {
                line: line_no,
                column,
                message: format!("bad cell value {tok:?}"),
            })?;
            if value >= limit {
                return Err(LgcaError::Parse {
                    line: line_no,
                    column,
                    message: format!("cell value {value} out of range"),
                });
            }
            cells.push(value as u8);
            column += tok.len() + 1;
        }
        if cells.len() != expected {
            return Err(LgcaError::Parse {
                line: line_no,
                column,
                message: format!("expected {} cells, got {}", expected, cells.len()),
            });
        }
        Ok(cells)
    };
    match model {
        Model::Fhp => {
            let m = parse_dim(fields.next(), "row count")?;
            let mut cells = Vec::with_capacity(n * m);
            for _ in 0..m {
                let (line_no, line) = lines.next().ok_or_else(|| LgcaError::Parse {
                    line: header_no,
                    column: 1,
                    message: "missing lattice rows".into(),
                })?;
                cells.extend(parse_row(line_no, line, n, 64)?);
            }
            Ok(AnyLattice::Tri(LatticeTri::new(n, m, cells)?))
        }
        _ => {
            let (line_no, line) = lines.next().ok_or_else(|| LgcaError::Parse {
                line: header_no,
                column: 1,
                message: "missing lattice row".into(),
            })?;
            let limit = 1u32 << model.velocities();
            let cells = parse_row(line_no, line, n, limit)?;
            Ok(AnyLattice::OneD(Lattice1D::new(model, cells)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d1q3_collision_rule() {
        assert_eq!(d1q3_collide(0b010), 0b101);
        assert_eq!(d1q3_collide(0b101), 0b010);
        assert_eq!(d1q3_collide(0b000), 0b000);
        assert_eq!(d1q3_collide(0b111), 0b111);
        for c in 0..8u8 {
            assert_eq!(d1q3_collide(d1q3_collide(c)), c, "involution at {c}");
        }
    }

    #[test]
    fn d1q3_evolution_example_row() {
        // Six-site example: [000,101,010,001,110,010].
        let l = Lattice1D::new(Model::D1Q3, vec![0, 5, 2, 1, 6, 2]).unwrap();
        let collided = d1q3_collide_lattice(&l).unwrap();
        assert_eq!(collided.cells(), &[0, 2, 5, 1, 6, 5]);
        let streamed = d1q3_stream(&collided).unwrap();
        // Bit conservation forces 000 at the last site: the three
        // left-movers land at sites 1, 3 and 4.
        assert_eq!(streamed.cells(), &[1, 6, 0, 5, 7, 0]);
        assert_eq!(d1q3_step(&l).unwrap(), streamed);
    }

    #[test]
    fn rest_particle_is_fixed_by_streaming() {
        let l = Lattice1D::new(Model::D1Q3, vec![0, 2, 0, 0]).unwrap();
        assert_eq!(d1q3_stream(&l).unwrap(), l);
    }

    #[test]
    fn d1q3_step_conserves_weighted_mass_and_momentum() {
        let mut l = Lattice1D::random(Model::D1Q3, 33, 0.4, 11).unwrap();
        let before = l.total_quantities(MassConvention::RestWeighted);
        for _ in 0..50 {
            l = d1q3_step(&l).unwrap();
            assert_eq!(l.total_quantities(MassConvention::RestWeighted), before);
        }
    }

    #[test]
    fn fhp_rotations() {
        assert_eq!(rotate_fhp_cell(0b010101, 3), 0b101010);
        assert_eq!(rotate_fhp_cell(0, 2), 0);
        assert_eq!(rotate_fhp_cell(0b001001, 2), 0b100100);
    }

    #[test]
    fn fhp_collision_orbits() {
        let mut bits = SliceBits::new(&[false, true]);
        assert_eq!(fhp_collide(21, &mut bits), 42);
        assert_eq!(fhp_collide(42, &mut bits), 21);
        assert_eq!(fhp_collide(63, &mut bits), 63);
        assert_eq!(fhp_collide(7, &mut bits), 7);
        // Stochastic orbit: 9 goes to 36 on a 120° turn, 18 on a 240° turn.
        let mut bits = SliceBits::new(&[false]);
        assert_eq!(fhp_collide(9, &mut bits), 36);
        let mut bits = SliceBits::new(&[true]);
        assert_eq!(fhp_collide(9, &mut bits), 18);
        // Orbits close.
        for orbit in [B2_ORBIT, B4_ORBIT] {
            for &c in &orbit {
                for scripted in [[false], [true]] {
                    let mut bits = SliceBits::new(&scripted);
                    let out = fhp_collide(c, &mut bits);
                    assert!(orbit.contains(&out) && out != c);
                }
            }
        }
    }

    #[test]
    fn zero_asymmetric_class_matches_definition() {
        let mut class = Vec::new();
        for c in 0..64u8 {
            let asymmetric = (0..3).any(|i| (c >> i & 1) != (c >> (i + 3) & 1));
            if !asymmetric {
                class.push(c);
            }
        }
        assert_eq!(class, ZERO_ASYMMETRIC_CLASS);
        for &c in &ZERO_ASYMMETRIC_CLASS {
            assert_eq!(rotate_fhp_cell(c, 3), c, "180° fixes {c}");
        }
    }

    #[test]
    fn fhp_single_particle_streams_east() {
        let mut l = LatticeTri::empty(5, 4).unwrap();
        l.set(1, 2, 0b000001);
        let mut bits = SeededBits::new(0);
        let next = fhp_step(&l, &mut bits);
        assert_eq!(next.get(2, 2), 0b000001);
        let occupied: usize = next.cells().iter().map(|&c| c.count_ones() as usize).sum();
        assert_eq!(occupied, 1);
    }

    #[test]
    fn fhp_empty_lattice_stays_empty() {
        let l = LatticeTri::empty(4, 4).unwrap();
        let mut bits = SeededBits::new(1);
        assert_eq!(fhp_step(&l, &mut bits), l);
    }

    #[test]
    fn fhp_collision_panel_example() {
        // Five-by-six panel: a six-particle cell, one state from each
        // collision class, and one non-collisional three-particle cell.
        let mut before = LatticeTri::empty(5, 6).unwrap();
        before.set(0, 0, 47);
        before.set(3, 1, 45);
        before.set(2, 3, 18);
        before.set(1, 4, 28);
        before.set(4, 4, 42);
        // Collision resolves 42 -> 21 (deterministic), 18 -> 9 (120°),
        // 45 -> 27 (240°); cells iterate row-major so 45 draws first.
        let mut bits = SliceBits::new(&[true, false]);
        let mut after = before.clone();
        for y in 0..before.height() {
            for x in 0..before.width() {
                after.set(x, y, fhp_collide(before.get(x, y), &mut bits));
            }
        }
        assert_eq!(after.get(0, 0), 47);
        assert_eq!(after.get(3, 1), 27);
        assert_eq!(after.get(2, 3), 9);
        assert_eq!(after.get(1, 4), 28);
        assert_eq!(after.get(4, 4), 21);
    }

    #[test]
    fn fhp_step_conserves_mass_and_momentum() {
        let mut l = LatticeTri::random(8, 8, 0.3, 5).unwrap();
        let mut bits = SeededBits::new(17);
        let before = l.total_quantities();
        for _ in 0..100 {
            l = fhp_step(&l, &mut bits);
            assert_eq!(l.total_quantities(), before);
        }
    }

    #[test]
    fn quantity_examples() {
        assert_eq!(quantities(0b001, Model::D1Q3).mass, 1);
        assert_eq!(quantities(0b101, Model::D1Q3).momentum_x_halves, 0);
        assert_eq!(cell_mass(0b010, Model::D1Q3, MassConvention::RestWeighted), 2);
        assert_eq!(cell_mass(0b111, Model::D1Q3, MassConvention::RestWeighted), 4);
        // Cell 21 occupies directions 0, 2, 4, which sum to zero momentum.
        let q = quantities(21, Model::Fhp);
        assert_eq!((q.momentum_x_halves, q.momentum_y_root3_halves), (0, 0));
        for &c in B2_ORBIT.iter().chain(&B4_ORBIT).chain(&B3_STATES) {
            let q = quantities(c, Model::Fhp);
            assert_eq!((q.momentum_x_halves, q.momentum_y_root3_halves), (0, 0));
        }
    }

    #[test]
    fn d1q2_streaming_translates() {
        let l = Lattice1D::new(Model::D1Q2, vec![1, 0, 0, 0]).unwrap();
        let next = d1q2_stream(&l).unwrap();
        assert_eq!(next.cells(), &[0, 1, 0, 0]);
        // A full lattice is invariant.
        let full = Lattice1D::new(Model::D1Q2, vec![3; 5]).unwrap();
        assert_eq!(d1q2_stream(&full).unwrap(), full);
        // Pure translation returns to start + t.
        let mut moving = Lattice1D::new(Model::D1Q2, {
            let mut cells = vec![0; 64];
            cells[0] = 1;
            cells
        })
        .unwrap();
        for _ in 0..24 {
            moving = d1q2_stream(&moving).unwrap();
        }
        assert_eq!(moving.cells()[24], 1);
        assert_eq!(moving.cells().iter().map(|&c| c as u32).sum::<u32>(), 1);
    }

    #[test]
    fn density_profile_windows() {
        let l = Lattice1D::new(Model::D1Q2, vec![3, 0, 0, 0]).unwrap();
        assert_eq!(density_profile(&l, 0), vec![2.0, 0.0, 0.0, 0.0]);
        let uniform = Lattice1D::new(Model::D1Q2, vec![1; 6]).unwrap();
        for w in 0..3 {
            assert!(density_profile(&uniform, w).iter().all(|&d| d == 1.0));
        }
        // Delta initial condition under streaming: two translating spikes.
        let mut l = Lattice1D::new(Model::D1Q2, {
            let mut cells = vec![0u8; 16];
            cells[8] = 3;
            cells
        })
        .unwrap();
        for _ in 0..3 {
            l = d1q2_stream(&l).unwrap();
        }
        let profile = density_profile(&l, 0);
        assert_eq!(profile[11], 1.0);
        assert_eq!(profile[5], 1.0);
        assert_eq!(profile.iter().sum::<f64>(), 2.0);
    }

    #[test]
    fn streaming_is_a_bijection() {
        use std::collections::HashSet;
        let mut seen = HashSet::new();
        for a in 0..8u8 {
            for b in 0..8u8 {
                let l = Lattice1D::new(Model::D1Q3, vec![a, b]).unwrap();
                let s = d1q3_stream(&l).unwrap();
                assert!(seen.insert(s.cells().to_vec()));
            }
        }
        assert_eq!(seen.len(), 64);
    }

    #[test]
    fn text_format_round_trip() {
        let l = Lattice1D::new(Model::D1Q3, vec![0, 5, 2, 1, 6, 2]).unwrap();
        let text = write_lattice_1d(&l);
        match parse_lattice(&text).unwrap() {
            AnyLattice::OneD(back) => assert_eq!(back, l),
            _ => panic!("expected 1D lattice"),
        }
        let t = LatticeTri::random(4, 4, 0.5, 9).unwrap();
        let text = write_lattice_tri(&t);
        match parse_lattice(&text).unwrap() {
            AnyLattice::Tri(back) => assert_eq!(back, t),
            _ => panic!("expected triangular lattice"),
        }
    }

    #[test]
    fn parse_reports_position() {
        let err = parse_lattice("d1q3 3\n0 9 0\n").unwrap_err();
        match err {
            LgcaError::Parse { line, column, .. } => {
                assert_eq!(line, 2);
                assert_eq!(column, 3);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
