//! The flapped pillow square complex.
//!
//! The pillow is two unit squares (front and back) glued along their
//! boundary; for a subdivision parameter `n` each side splits into `n x n`
//! tiles of side `1/n`. Blowing up a 1-edge glues a stack of flaps into the
//! slit cut along that edge. Every tile carries a chart onto the unit square
//! of its color, and the covering map restricted to a tile is exactly that
//! chart, so glued slots always pair equal chart sides with the identity on
//! the edge parameter.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_internal, input_err, internal_err, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SheetTag {
    Front,
    Back,
    Equator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orient {
    Horizontal,
    Vertical,
}

/// Address of one 1-edge of the subdivided pillow. `i` runs along the edge
/// direction; `j` is the transverse row or column. Front/back addresses name
/// interior edges of one side (`0 < j < n`); equator addresses have
/// `j ∈ {0, n}` and name subsegments of the four pillow edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeAddress {
    pub sheet: SheetTag,
    pub orient: Orient,
    pub i: u32,
    pub j: u32,
}

impl EdgeAddress {
    pub fn validate(&self, n: u32) -> Result<()> {
        if self.i >= n {
            return Err(input_err!("edge {self}: index i out of range for n={n}"));
        }
        match self.sheet {
            SheetTag::Front | SheetTag::Back => {
                if self.j == 0 || self.j >= n {
                    return Err(input_err!(
                        "edge {self}: interior edges need 0 < j < n (n={n})"
                    ));
                }
            }
            SheetTag::Equator => {
                if self.j != 0 && self.j != n {
                    return Err(input_err!("edge {self}: equator edges need j in {{0, {n}}}"));
                }
            }
        }
        Ok(())
    }

    /// The pillow boundary edge this address lies on, for equator addresses.
    pub fn pillow_edge(&self, n: u32) -> Option<PillowEdge> {
        if self.sheet != SheetTag::Equator {
            return None;
        }
        Some(match (self.orient, self.j == n) {
            (Orient::Horizontal, false) => PillowEdge::A,
            (Orient::Horizontal, true) => PillowEdge::C,
            (Orient::Vertical, false) => PillowEdge::D,
            (Orient::Vertical, true) => PillowEdge::B,
        })
    }

    /// Marked pillow vertices that are endpoints of this 1-edge.
    pub fn endpoint_vertices(&self, n: u32) -> Vec<PillowVertex> {
        let mut out = Vec::new();
        if self.sheet != SheetTag::Equator {
            return out;
        }
        let last = self.i == n - 1;
        let first = self.i == 0;
        match self.pillow_edge(n).unwrap() {
            PillowEdge::A => {
                if first {
                    out.push(PillowVertex::A);
                }
                if last {
                    out.push(PillowVertex::B);
                }
            }
            PillowEdge::C => {
                if first {
                    out.push(PillowVertex::D);
                }
                if last {
                    out.push(PillowVertex::C);
                }
            }
            PillowEdge::D => {
                if first {
                    out.push(PillowVertex::A);
                }
                if last {
                    out.push(PillowVertex::D);
                }
            }
            PillowEdge::B => {
                if first {
                    out.push(PillowVertex::B);
                }
                if last {
                    out.push(PillowVertex::C);
                }
            }
        }
        out
    }
}

impl fmt::Display for EdgeAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sheet = match self.sheet {
            SheetTag::Front => "F",
            SheetTag::Back => "B",
            SheetTag::Equator => "E",
        };
        let orient = match self.orient {
            Orient::Horizontal => "h",
            Orient::Vertical => "v",
        };
        write!(f, "{sheet}:{orient}:{}:{}", self.i, self.j)
    }
}

impl FromStr for EdgeAddress {
    type Err = Error;

    fn from_str(text: &str) -> Result<EdgeAddress> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 4 {
            return Err(input_err!(
                "malformed edge address {text:?}: expected sheet:orient:i:j"
            ));
        }
        let sheet = match parts[0] {
            "F" => SheetTag::Front,
            "B" => SheetTag::Back,
            "E" => SheetTag::Equator,
            other => return Err(input_err!("unknown sheet {other:?} in edge address")),
        };
        let orient = match parts[1] {
            "h" => Orient::Horizontal,
            "v" => Orient::Vertical,
            other => return Err(input_err!("unknown orientation {other:?} in edge address")),
        };
        let i: u32 = parts[2]
            .parse()
            .map_err(|_| input_err!("bad index {:?} in edge address", parts[2]))?;
        let j: u32 = parts[3]
            .parse()
            .map_err(|_| input_err!("bad index {:?} in edge address", parts[3]))?;
        Ok(EdgeAddress {
            sheet,
            orient,
            i,
            j,
        })
    }
}

impl Serialize for EdgeAddress {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for EdgeAddress {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct FlapPlacement {
    pub edge: EdgeAddress,
    pub mult: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PillowSpec {
    pub n: u32,
    #[serde(default)]
    pub flaps: Vec<FlapPlacement>,
}

impl PillowSpec {
    pub fn plain(n: u32) -> PillowSpec {
        PillowSpec { n, flaps: vec![] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(input_err!("n must be at least 2, got {}", self.n));
        }
        let mut seen = std::collections::BTreeSet::new();
        for f in &self.flaps {
            f.edge.validate(self.n)?;
            if f.mult == 0 {
                return Err(input_err!("edge {}: multiplicity must be positive", f.edge));
            }
            if !seen.insert(f.edge) {
                return Err(input_err!(
                    "edge {} appears twice; use the multiplicity field instead",
                    f.edge
                ));
            }
        }
        Ok(())
    }

    /// Total multiplicity over horizontal addresses.
    pub fn n_h(&self) -> u32 {
        self.flaps
            .iter()
            .filter(|f| f.edge.orient == Orient::Horizontal)
            .map(|f| f.mult)
            .sum()
    }

    /// Total multiplicity over vertical addresses.
    pub fn n_v(&self) -> u32 {
        self.flaps
            .iter()
            .filter(|f| f.edge.orient == Orient::Vertical)
            .map(|f| f.mult)
            .sum()
    }

    pub fn from_json(text: &str) -> Result<PillowSpec> {
        let spec: PillowSpec =
            serde_json::from_str(text).map_err(|e| input_err!("malformed spec file: {e}"))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialization cannot fail")
    }
}

/// All 1-edge addresses of the n-subdivided pillow, each exactly once.
pub fn list_edges(n: u32) -> Result<Vec<EdgeAddress>> {
    if n < 2 {
        return Err(input_err!("n must be at least 2, got {n}"));
    }
    let mut out = Vec::new();
    for sheet in [SheetTag::Front, SheetTag::Back] {
        for orient in [Orient::Horizontal, Orient::Vertical] {
            for i in 0..n {
                for j in 1..n {
                    out.push(EdgeAddress {
                        sheet,
                        orient,
                        i,
                        j,
                    });
                }
            }
        }
    }
    for orient in [Orient::Horizontal, Orient::Vertical] {
        for i in 0..n {
            for j in [0, n] {
                out.push(EdgeAddress {
                    sheet: SheetTag::Equator,
                    orient,
                    i,
                    j,
                });
            }
        }
    }
    out.sort();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, PartialOrd, Ord)]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub fn opposite(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, PartialOrd, Ord)]
pub enum BaseSheet {
    Front,
    Back,
}

/// The four pillow boundary edges a, b, c, d (bottom, right, top, left).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, PartialOrd, Ord)]
pub enum PillowEdge {
    A,
    B,
    C,
    D,
}

/// The four marked pillow vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, PartialOrd, Ord)]
pub enum PillowVertex {
    A,
    B,
    C,
    D,
}

impl fmt::Display for PillowVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            PillowVertex::A => "A",
            PillowVertex::B => "B",
            PillowVertex::C => "C",
            PillowVertex::D => "D",
        };
        write!(f, "{c}")
    }
}

/// Chart sides of a tile, named by the unit-square side they occupy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, PartialOrd, Ord)]
pub enum Side {
    S,
    E,
    N,
    W,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::S, Side::E, Side::N, Side::W];

    pub fn index(self) -> usize {
        match self {
            Side::S => 0,
            Side::E => 1,
            Side::N => 2,
            Side::W => 3,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::S => Side::N,
            Side::N => Side::S,
            Side::E => Side::W,
            Side::W => Side::E,
        }
    }

    /// The two sides orthogonal to this one.
    pub fn laterals(self) -> [Side; 2] {
        match self {
            Side::S | Side::N => [Side::E, Side::W],
            Side::E | Side::W => [Side::S, Side::N],
        }
    }

    pub fn is_horizontal_type(self) -> bool {
        matches!(self, Side::S | Side::N)
    }
}

/// Chart corners of a tile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, PartialOrd, Ord)]
pub enum Corner {
    SW,
    SE,
    NE,
    NW,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::SW, Corner::SE, Corner::NE, Corner::NW];

    pub fn index(self) -> usize {
        match self {
            Corner::SW => 0,
            Corner::SE => 1,
            Corner::NE => 2,
            Corner::NW => 3,
        }
    }

    pub fn from_bits(x_one: bool, y_one: bool) -> Corner {
        match (x_one, y_one) {
            (false, false) => Corner::SW,
            (true, false) => Corner::SE,
            (true, true) => Corner::NE,
            (false, true) => Corner::NW,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Corner::SW => (false, false),
            Corner::SE => (true, false),
            Corner::NE => (true, true),
            Corner::NW => (false, true),
        }
    }

    /// The pillow vertex a tile corner maps to under the covering.
    pub fn image_vertex(self) -> PillowVertex {
        match self {
            Corner::SW => PillowVertex::A,
            Corner::SE => PillowVertex::B,
            Corner::NE => PillowVertex::C,
            Corner::NW => PillowVertex::D,
        }
    }

    /// The two chart sides meeting at this corner, ordered so that sweeping
    /// through the corner counterclockwise in the chart goes from the first
    /// to the second.
    pub fn sweep_sides(self) -> (Side, Side) {
        match self {
            Corner::SW => (Side::S, Side::W),
            Corner::SE => (Side::E, Side::S),
            Corner::NE => (Side::N, Side::E),
            Corner::NW => (Side::W, Side::N),
        }
    }

    /// Parameter of this corner along one of its sides (0 or 1).
    pub fn param_on(self, side: Side) -> Result<u8> {
        let (x_one, y_one) = self.bits();
        let on = match side {
            Side::S => !y_one,
            Side::N => y_one,
            Side::W => !x_one,
            Side::E => x_one,
        };
        ensure_internal!(on, "corner {self:?} does not lie on side {side:?}");
        let p = match side {
            Side::S | Side::N => x_one,
            Side::E | Side::W => y_one,
        };
        Ok(p as u8)
    }
}

/// One of the eight square symmetries carrying a tile's local chart onto the
/// 0-tile chart of its color. Charts never involve quarter turns, so the two
/// axis reflections suffice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChartSymmetry {
    pub flip_x: bool,
    pub flip_y: bool,
}

impl ChartSymmetry {
    pub const IDENTITY: ChartSymmetry = ChartSymmetry {
        flip_x: false,
        flip_y: false,
    };

    pub fn side(self, side: Side) -> Side {
        match side {
            Side::S | Side::N => {
                if self.flip_y {
                    side.opposite()
                } else {
                    side
                }
            }
            Side::E | Side::W => {
                if self.flip_x {
                    side.opposite()
                } else {
                    side
                }
            }
        }
    }

    pub fn corner(self, corner: Corner) -> Corner {
        let (x, y) = corner.bits();
        Corner::from_bits(x ^ self.flip_x, y ^ self.flip_y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, PartialOrd, Ord, Hash)]
pub enum FlapHalf {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TileKind {
    Base {
        sheet: BaseSheet,
        i: u32,
        j: u32,
    },
    Flap {
        stack: usize,
        layer: u32,
        half: FlapHalf,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct Tile {
    pub id: usize,
    pub color: Color,
    pub kind: TileKind,
    pub chart_symmetry: ChartSymmetry,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Slot {
    pub tile: usize,
    pub side: Side,
}

impl Slot {
    pub fn new(tile: usize, side: Side) -> Slot {
        Slot { tile, side }
    }
}

/// A stack of flaps glued into the slit cut along one blown-up 1-edge.
#[derive(Debug, Clone, Serialize)]
pub struct FlapStack {
    pub id: usize,
    pub edge: EdgeAddress,
    pub multiplicity: u32,
    /// Set when the blown-up edge lies on the pillow equator.
    pub pillow_edge: Option<PillowEdge>,
    /// Chart side label shared by all base/top edges of the stack.
    pub side: Side,
    /// The two base slots that formed the original gluing across the edge.
    pub slot_a: Slot,
    pub slot_b: Slot,
    /// Tile ids in layer order: lower then upper half per layer.
    pub tiles: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VertexInfo {
    pub id: usize,
    /// Tile corners incident to the vertex, in surface-counterclockwise order.
    pub corners: Vec<(usize, Corner)>,
    /// crossed[k] is the slot the corner walk leaves corners[k] through.
    pub crossed: Vec<Slot>,
    pub valence: usize,
    pub maps_to: PillowVertex,
    pub marked: Option<PillowVertex>,
}

impl VertexInfo {
    pub fn local_degree(&self) -> usize {
        self.valence / 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OrbifoldType {
    Parabolic,
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum JuliaType {
    WholeSphere,
    SierpinskiCarpet,
}

#[derive(Debug, Clone)]
pub struct FlappedPillow {
    pub spec: PillowSpec,
    pub n: u32,
    pub tiles: Vec<Tile>,
    gluing: Vec<[Slot; 4]>,
    pub stacks: Vec<FlapStack>,
    pub vertices: Vec<VertexInfo>,
    /// Vertex ids of the marked vertices in order A, B, C, D.
    pub marked_vertices: [usize; 4],
    corner_vertex: Vec<[usize; 4]>,
}

impl FlappedPillow {
    pub fn glue(&self, slot: Slot) -> Slot {
        self.gluing[slot.tile][slot.side.index()]
    }

    pub fn color(&self, tile: usize) -> Color {
        self.tiles[tile].color
    }

    pub fn degree(&self) -> u64 {
        let m: u64 = self.spec.flaps.iter().map(|f| f.mult as u64).sum();
        (self.n as u64) * (self.n as u64) + m
    }

    pub fn stack_of(&self, tile: usize) -> Option<usize> {
        match self.tiles[tile].kind {
            TileKind::Flap { stack, .. } => Some(stack),
            TileKind::Base { .. } => None,
        }
    }

    pub fn sheet_of(&self, tile: usize) -> Option<BaseSheet> {
        match self.tiles[tile].kind {
            TileKind::Base { sheet, .. } => Some(sheet),
            TileKind::Flap { .. } => None,
        }
    }

    pub fn vertex_at(&self, tile: usize, corner: Corner) -> usize {
        self.corner_vertex[tile][corner.index()]
    }

    fn base_tile(&self, sheet: BaseSheet, i: u32, j: u32) -> usize {
        let n = self.n as usize;
        let off = match sheet {
            BaseSheet::Front => 0,
            BaseSheet::Back => n * n,
        };
        off + (j as usize) * n + i as usize
    }

    /// Footprint side of a base tile corresponding to a chart side.
    pub fn footprint_side(&self, tile: usize, chart_side: Side) -> Side {
        self.tiles[tile].chart_symmetry.side(chart_side)
    }

    /// For a base-tile slot: the pillow boundary edge its 1-edge lies on, if
    /// the edge is part of the equator.
    pub fn slot_equator(&self, slot: Slot) -> Option<PillowEdge> {
        let (sheet, i, j) = match self.tiles[slot.tile].kind {
            TileKind::Base { sheet, i, j } => (sheet, i, j),
            TileKind::Flap { .. } => return None,
        };
        let _ = sheet;
        let n = self.n;
        match self.footprint_side(slot.tile, slot.side) {
            Side::S if j == 0 => Some(PillowEdge::A),
            Side::N if j == n - 1 => Some(PillowEdge::C),
            Side::W if i == 0 => Some(PillowEdge::D),
            Side::E if i == n - 1 => Some(PillowEdge::B),
            _ => None,
        }
    }

    /// Address of the 1-edge a base-tile slot lies on.
    pub fn slot_address(&self, slot: Slot) -> Option<EdgeAddress> {
        let (sheet, i, j) = match self.tiles[slot.tile].kind {
            TileKind::Base { sheet, i, j } => (sheet, i, j),
            TileKind::Flap { .. } => return None,
        };
        let n = self.n;
        let tag = match sheet {
            BaseSheet::Front => SheetTag::Front,
            BaseSheet::Back => SheetTag::Back,
        };
        let addr = match self.footprint_side(slot.tile, slot.side) {
            Side::S => {
                if j == 0 {
                    EdgeAddress {
                        sheet: SheetTag::Equator,
                        orient: Orient::Horizontal,
                        i,
                        j: 0,
                    }
                } else {
                    EdgeAddress {
                        sheet: tag,
                        orient: Orient::Horizontal,
                        i,
                        j,
                    }
                }
            }
            Side::N => {
                if j == n - 1 {
                    EdgeAddress {
                        sheet: SheetTag::Equator,
                        orient: Orient::Horizontal,
                        i,
                        j: n,
                    }
                } else {
                    EdgeAddress {
                        sheet: tag,
                        orient: Orient::Horizontal,
                        i,
                        j: j + 1,
                    }
                }
            }
            Side::W => {
                if i == 0 {
                    EdgeAddress {
                        sheet: SheetTag::Equator,
                        orient: Orient::Vertical,
                        i: j,
                        j: 0,
                    }
                } else {
                    EdgeAddress {
                        sheet: tag,
                        orient: Orient::Vertical,
                        i: j,
                        j: i,
                    }
                }
            }
            Side::E => {
                if i == n - 1 {
                    EdgeAddress {
                        sheet: SheetTag::Equator,
                        orient: Orient::Vertical,
                        i: j,
                        j: n,
                    }
                } else {
                    EdgeAddress {
                        sheet: tag,
                        orient: Orient::Vertical,
                        i: j,
                        j: i + 1,
                    }
                }
            }
        };
        Some(addr)
    }

    /// The two slots adjacent to a 1-edge address in the plain complex.
    fn slots_of_address(&self, addr: &EdgeAddress) -> Result<(Slot, Slot)> {
        addr.validate(self.n)?;
        let n = self.n;
        let (t1, f1, t2, f2) = match (addr.sheet, addr.orient) {
            (SheetTag::Equator, Orient::Horizontal) => {
                let row = if addr.j == 0 { 0 } else { n - 1 };
                let fp = if addr.j == 0 { Side::S } else { Side::N };
                (
                    self.base_tile(BaseSheet::Front, addr.i, row),
                    fp,
                    self.base_tile(BaseSheet::Back, addr.i, row),
                    fp,
                )
            }
            (SheetTag::Equator, Orient::Vertical) => {
                let col = if addr.j == 0 { 0 } else { n - 1 };
                let fp = if addr.j == 0 { Side::W } else { Side::E };
                (
                    self.base_tile(BaseSheet::Front, col, addr.i),
                    fp,
                    self.base_tile(BaseSheet::Back, col, addr.i),
                    fp,
                )
            }
            (tag, Orient::Horizontal) => {
                let sheet = if tag == SheetTag::Front {
                    BaseSheet::Front
                } else {
                    BaseSheet::Back
                };
                (
                    self.base_tile(sheet, addr.i, addr.j - 1),
                    Side::N,
                    self.base_tile(sheet, addr.i, addr.j),
                    Side::S,
                )
            }
            (tag, Orient::Vertical) => {
                let sheet = if tag == SheetTag::Front {
                    BaseSheet::Front
                } else {
                    BaseSheet::Back
                };
                (
                    self.base_tile(sheet, addr.j - 1, addr.i),
                    Side::E,
                    self.base_tile(sheet, addr.j, addr.i),
                    Side::W,
                )
            }
        };
        let chart1 = self.tiles[t1].chart_symmetry.side(f1);
        let chart2 = self.tiles[t2].chart_symmetry.side(f2);
        ensure_internal!(
            chart1 == chart2,
            "address {addr}: chart sides disagree across the edge"
        );
        Ok((Slot::new(t1, chart1), Slot::new(t2, chart2)))
    }
}

/// Builds and validates the flapped pillow complex for a spec.
pub fn build_pillow(spec: &PillowSpec) -> Result<FlappedPillow> {
    spec.validate()?;
    let n = spec.n;
    let nn = n as usize;

    let mut tiles = Vec::with_capacity(2 * nn * nn);
    for sheet in [BaseSheet::Front, BaseSheet::Back] {
        for j in 0..n {
            for i in 0..n {
                let parity = (i + j) % 2 == 0;
                let color = match (sheet, parity) {
                    (BaseSheet::Front, true) | (BaseSheet::Back, false) => Color::White,
                    _ => Color::Black,
                };
                tiles.push(Tile {
                    id: tiles.len(),
                    color,
                    kind: TileKind::Base { sheet, i, j },
                    chart_symmetry: ChartSymmetry {
                        flip_x: i % 2 == 1,
                        flip_y: j % 2 == 1,
                    },
                });
            }
        }
    }

    let mut pillow = FlappedPillow {
        spec: spec.clone(),
        n,
        tiles,
        gluing: Vec::new(),
        stacks: Vec::new(),
        vertices: Vec::new(),
        marked_vertices: [0; 4],
        corner_vertex: Vec::new(),
    };

    // Glue the plain subdivided pillow edge by edge.
    let mut gluing: Vec<[Option<Slot>; 4]> = vec![[None; 4]; pillow.tiles.len()];
    let mut set_glue = |gl: &mut Vec<[Option<Slot>; 4]>, s1: Slot, s2: Slot| -> Result<()> {
        ensure_internal!(s1.side == s2.side, "gluing must pair equal chart sides");
        ensure_internal!(s1 != s2, "gluing cannot pair a slot with itself");
        for s in [s1, s2] {
            ensure_internal!(
                gl[s.tile][s.side.index()].is_none(),
                "slot {s:?} glued twice"
            );
        }
        gl[s1.tile][s1.side.index()] = Some(s2);
        gl[s2.tile][s2.side.index()] = Some(s1);
        Ok(())
    };

    for addr in list_edges(n)? {
        let (s1, s2) = pillow.slots_of_address(&addr)?;
        set_glue(&mut gluing, s1, s2)?;
    }

    // Blow up the requested edges, in address order for determinism.
    let mut placements = spec.flaps.clone();
    placements.sort_by_key(|f| f.edge);
    for (stack_id, placement) in placements.iter().enumerate() {
        let (slot_a, slot_b) = pillow.slots_of_address(&placement.edge)?;
        let side = slot_a.side;
        // Cut the pillow open along the edge.
        gluing[slot_a.tile][side.index()] = None;
        gluing[slot_b.tile][side.index()] = None;

        let color_a = pillow.tiles[slot_a.tile].color;
        let mut stack_tiles = Vec::new();
        for layer in 1..=placement.mult {
            for half in [FlapHalf::Lower, FlapHalf::Upper] {
                let color = match half {
                    FlapHalf::Lower => color_a.opposite(),
                    FlapHalf::Upper => color_a,
                };
                let id = pillow.tiles.len();
                pillow.tiles.push(Tile {
                    id,
                    color,
                    kind: TileKind::Flap {
                        stack: stack_id,
                        layer,
                        half,
                    },
                    chart_symmetry: ChartSymmetry::IDENTITY,
                });
                gluing.push([None; 4]);
                stack_tiles.push(id);
            }
        }

        // Chain the layers base-to-base and close each layer along its
        // top and lateral sides.
        let m = placement.mult as usize;
        for k in 0..m {
            let lower = stack_tiles[2 * k];
            let upper = stack_tiles[2 * k + 1];
            set_glue(
                &mut gluing,
                Slot::new(lower, side.opposite()),
                Slot::new(upper, side.opposite()),
            )?;
            for lat in side.laterals() {
                set_glue(&mut gluing, Slot::new(lower, lat), Slot::new(upper, lat))?;
            }
            if k + 1 < m {
                set_glue(
                    &mut gluing,
                    Slot::new(upper, side),
                    Slot::new(stack_tiles[2 * (k + 1)], side),
                )?;
            }
        }
        set_glue(&mut gluing, slot_a, Slot::new(stack_tiles[0], side))?;
        set_glue(
            &mut gluing,
            slot_b,
            Slot::new(stack_tiles[2 * m - 1], side),
        )?;

        pillow.stacks.push(FlapStack {
            id: stack_id,
            edge: placement.edge,
            multiplicity: placement.mult,
            pillow_edge: placement.edge.pillow_edge(n),
            side,
            slot_a,
            slot_b,
            tiles: stack_tiles,
        });
    }

    // Freeze the gluing; every slot must be paired.
    let mut frozen = Vec::with_capacity(gluing.len());
    for (tile, slots) in gluing.iter().enumerate() {
        let mut row = [Slot::new(0, Side::S); 4];
        for side in Side::ALL {
            let partner = slots[side.index()]
                .ok_or_else(|| internal_err!("slot ({tile}, {side:?}) left unglued"))?;
            row[side.index()] = partner;
        }
        frozen.push(row);
    }
    pillow.gluing = frozen;

    validate_pillow(&mut pillow)?;
    Ok(pillow)
}

fn validate_pillow(pillow: &mut FlappedPillow) -> Result<()> {
    let total: u64 = pillow.spec.flaps.iter().map(|f| u64::from(f.mult)).sum();
    let expected = 2 * u64::from(pillow.n) * u64::from(pillow.n) + 2 * total;
    ensure_internal!(
        pillow.tiles.len() as u64 == expected,
        "tile count {} does not match 2n^2 + 2*sum(m) = {expected}",
        pillow.tiles.len()
    );

    for tile in 0..pillow.tiles.len() {
        for side in Side::ALL {
            let slot = Slot::new(tile, side);
            let partner = pillow.glue(slot);
            ensure_internal!(partner != slot, "gluing has a fixed slot {slot:?}");
            ensure_internal!(
                pillow.glue(partner) == slot,
                "gluing is not an involution at {slot:?}"
            );
            ensure_internal!(
                pillow.color(tile) != pillow.color(partner.tile),
                "gluing at {slot:?} pairs two tiles of the same color"
            );
            ensure_internal!(partner.side == side, "gluing at {slot:?} changes chart side");
        }
    }

    // Chart transitions across plain edges: both footprints describe the same
    // geometric 1-edge, and the induced edge-parameter map is the identity
    // (the direction-reversing flag of every pairing is false).
    for tile in 0..pillow.tiles.len() {
        if pillow.stack_of(tile).is_some() {
            continue;
        }
        for side in Side::ALL {
            let slot = Slot::new(tile, side);
            let partner = pillow.glue(slot);
            if pillow.stack_of(partner.tile).is_some() {
                continue;
            }
            let a1 = pillow.slot_address(slot);
            let a2 = pillow.slot_address(partner);
            ensure_internal!(
                a1 == a2 && a1.is_some(),
                "glued base slots disagree on the 1-edge address"
            );
            let rev = gluing_reversal(pillow, slot, partner)?;
            ensure_internal!(!rev, "base gluing at {slot:?} reverses the edge parameter");
        }
    }

    build_vertices(pillow)?;

    // Euler characteristic of the closed complex.
    let v = pillow.vertices.len() as i64;
    let e = (pillow.tiles.len() * 4 / 2) as i64;
    let f = pillow.tiles.len() as i64;
    ensure_internal!(v - e + f == 2, "Euler characteristic is {}", v - e + f);

    let whites = pillow
        .tiles
        .iter()
        .filter(|t| t.color == Color::White)
        .count() as u64;
    ensure_internal!(
        whites == pillow.degree(),
        "white tile count {whites} does not equal the mapping degree {}",
        pillow.degree()
    );
    Ok(())
}

/// Whether the edge-parameter transition of a glued base pair reverses
/// orientation, derived from footprint geometry.
fn gluing_reversal(pillow: &FlappedPillow, s1: Slot, s2: Slot) -> Result<bool> {
    let flip = |slot: Slot| -> Result<bool> {
        let sym = pillow.tiles[slot.tile].chart_symmetry;
        Ok(match slot.side {
            Side::S | Side::N => sym.flip_x,
            Side::E | Side::W => sym.flip_y,
        })
    };
    Ok(flip(s1)? != flip(s2)?)
}

fn build_vertices(pillow: &mut FlappedPillow) -> Result<()> {
    let tile_count = pillow.tiles.len();
    let mut corner_vertex = vec![[usize::MAX; 4]; tile_count];
    let mut vertices: Vec<VertexInfo> = Vec::new();

    for tile in 0..tile_count {
        for corner in Corner::ALL {
            if corner_vertex[tile][corner.index()] != usize::MAX {
                continue;
            }
            let id = vertices.len();
            let mut corners = Vec::new();
            let mut crossed = Vec::new();
            let (mut t, q) = (tile, corner);
            loop {
                ensure_internal!(
                    corner_vertex[t][q.index()] == usize::MAX,
                    "corner walk re-entered a visited corner"
                );
                corner_vertex[t][q.index()] = id;
                corners.push((t, q));
                let (from, to) = q.sweep_sides();
                let to_side = match pillow.color(t) {
                    Color::White => to,
                    Color::Black => from,
                };
                let slot = Slot::new(t, to_side);
                crossed.push(slot);
                t = pillow.glue(slot).tile;
                if (t, q) == (tile, corner) {
                    break;
                }
            }
            let valence = corners.len();
            ensure_internal!(valence % 2 == 0, "odd vertex valence {valence}");
            let maps_to = corner.image_vertex();
            for (_, c) in &corners {
                ensure_internal!(
                    c.image_vertex() == maps_to,
                    "corner orbit mixes image vertices"
                );
            }
            vertices.push(VertexInfo {
                id,
                corners,
                crossed,
                valence,
                maps_to,
                marked: None,
            });
        }
    }

    // Identify the marked vertices from the footprint corners of the four
    // corner tiles on the front side.
    let n = pillow.n;
    let mark = |pillow: &FlappedPillow,
                corner_vertex: &Vec<[usize; 4]>,
                i: u32,
                j: u32,
                fp: Corner|
     -> usize {
        let tile = pillow.base_tile(BaseSheet::Front, i, j);
        let chart = pillow.tiles[tile].chart_symmetry.corner(fp);
        corner_vertex[tile][chart.index()]
    };
    let va = mark(pillow, &corner_vertex, 0, 0, Corner::SW);
    let vb = mark(pillow, &corner_vertex, n - 1, 0, Corner::SE);
    let vc = mark(pillow, &corner_vertex, n - 1, n - 1, Corner::NE);
    let vd = mark(pillow, &corner_vertex, 0, n - 1, Corner::NW);
    let marked = [va, vb, vc, vd];
    let labels = [
        PillowVertex::A,
        PillowVertex::B,
        PillowVertex::C,
        PillowVertex::D,
    ];
    for (v, label) in marked.iter().zip(labels) {
        ensure_internal!(
            vertices[*v].marked.is_none(),
            "two marked vertices share a corner orbit"
        );
        vertices[*v].marked = Some(label);
    }

    pillow.vertices = vertices;
    pillow.corner_vertex = corner_vertex;
    pillow.marked_vertices = marked;
    Ok(())
}

/// Orbifold signature: the complex is parabolic exactly when every 1-vertex
/// is critical (local degree at least two) or marked.
pub fn orbifold_signature(pillow: &FlappedPillow) -> (OrbifoldType, Vec<(usize, usize)>) {
    let mut degrees = Vec::with_capacity(pillow.vertices.len());
    let mut parabolic = true;
    for v in &pillow.vertices {
        degrees.push((v.id, v.local_degree()));
        if v.local_degree() < 2 && v.marked.is_none() {
            parabolic = false;
        }
    }
    let kind = if parabolic {
        OrbifoldType::Parabolic
    } else {
        OrbifoldType::Hyperbolic
    };
    (kind, degrees)
}

/// Julia-set type of the rational map realizing the blown-up complex.
/// Requires at least one horizontal and one vertical flap.
pub fn julia_type(spec: &PillowSpec) -> Result<JuliaType> {
    spec.validate()?;
    if spec.n_h() == 0 || spec.n_v() == 0 {
        return Err(Error::Precondition(
            "julia type requires at least one horizontal and one vertical flap".into(),
        ));
    }
    let mut touched = std::collections::BTreeSet::new();
    for f in &spec.flaps {
        for v in f.edge.endpoint_vertices(spec.n) {
            touched.insert(v);
        }
    }
    let whole = if spec.n % 2 == 0 {
        !touched.contains(&PillowVertex::A)
    } else {
        touched.is_empty()
    };
    Ok(if whole {
        JuliaType::WholeSphere
    } else {
        JuliaType::SierpinskiCarpet
    })
}

/// Debug serialization of a built complex.
#[derive(Debug, Serialize)]
pub struct ComplexDump<'a> {
    pub spec: &'a PillowSpec,
    pub tile_count: usize,
    pub degree: u64,
    pub tiles: &'a [Tile],
    pub gluings: Vec<(Slot, Slot)>,
    pub vertices: Vec<VertexDump>,
    pub equator_flaps: Vec<EdgeAddress>,
}

#[derive(Debug, Serialize)]
pub struct VertexDump {
    pub id: usize,
    pub valence: usize,
    pub local_degree: usize,
    pub maps_to: PillowVertex,
    pub marked: Option<PillowVertex>,
}

pub fn dump_complex(pillow: &FlappedPillow) -> ComplexDump<'_> {
    let mut gluings = Vec::new();
    for tile in 0..pillow.tiles.len() {
        for side in Side::ALL {
            let slot = Slot::new(tile, side);
            let partner = pillow.glue(slot);
            if slot < partner {
                gluings.push((slot, partner));
            }
        }
    }
    let vertices = pillow
        .vertices
        .iter()
        .map(|v| VertexDump {
            id: v.id,
            valence: v.valence,
            local_degree: v.local_degree(),
            maps_to: v.maps_to,
            marked: v.marked,
        })
        .collect();
    let equator_flaps = pillow
        .stacks
        .iter()
        .filter(|s| s.pillow_edge.is_some())
        .map(|s| s.edge)
        .collect();
    ComplexDump {
        spec: &pillow.spec,
        tile_count: pillow.tiles.len(),
        degree: pillow.degree(),
        tiles: &pillow.tiles,
        gluings,
        vertices,
        equator_flaps,
    }
}

/// Collects the distinct used 1-edge valences for tests and reports.
pub fn valence_multiset(pillow: &FlappedPillow) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    for v in &pillow.vertices {
        *out.entry(v.valence).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(text: &str) -> EdgeAddress {
        text.parse().unwrap()
    }

    fn spec(n: u32, flaps: &[(&str, u32)]) -> PillowSpec {
        PillowSpec {
            n,
            flaps: flaps
                .iter()
                .map(|(e, m)| FlapPlacement {
                    edge: edge(e),
                    mult: *m,
                })
                .collect(),
        }
    }

    #[test]
    fn edge_listing_counts() {
        let e2 = list_edges(2).unwrap();
        assert_eq!(e2.len(), 16);
        let horiz = e2
            .iter()
            .filter(|a| a.orient == Orient::Horizontal)
            .count();
        assert_eq!(horiz, 8);
        assert_eq!(list_edges(3).unwrap().len(), 36);
        assert!(list_edges(1).is_err());
    }

    #[test]
    fn plain_two_by_two() {
        let pillow = build_pillow(&PillowSpec::plain(2)).unwrap();
        assert_eq!(pillow.tiles.len(), 8);
        for v in &pillow.vertices {
            assert!(v.valence == 2 || v.valence == 4);
        }
        let (kind, degrees) = orbifold_signature(&pillow);
        assert_eq!(kind, OrbifoldType::Parabolic);
        for v in &pillow.vertices {
            let expected = if v.valence == 4 { 2 } else { 1 };
            assert_eq!(degrees[v.id].1, expected);
            if v.valence == 2 {
                assert!(v.marked.is_some());
            }
        }
    }

    #[test]
    fn tile_count_examples() {
        let p = build_pillow(&spec(4, &[("F:h:1:1", 1), ("F:v:1:1", 1)])).unwrap();
        assert_eq!(p.tiles.len(), 36);
        let p = build_pillow(&spec(2, &[("F:h:0:1", 2)])).unwrap();
        assert_eq!(p.tiles.len(), 12);
    }

    #[test]
    fn flapped_is_hyperbolic() {
        for s in [
            spec(2, &[("E:h:1:0", 1)]),
            spec(3, &[("B:v:0:2", 1), ("F:h:2:1", 2)]),
            spec(4, &[("E:v:3:4", 3)]),
        ] {
            let pillow = build_pillow(&s).unwrap();
            let (kind, _) = orbifold_signature(&pillow);
            assert_eq!(kind, OrbifoldType::Hyperbolic);
        }
    }

    #[test]
    fn julia_examples() {
        // Flaps at the two edges incident to B, away from A.
        let s = spec(2, &[("E:h:1:0", 1), ("E:v:0:2", 1)]);
        assert_eq!(julia_type(&s).unwrap(), JuliaType::WholeSphere);
        let s = spec(2, &[("E:h:0:0", 1), ("E:v:1:2", 1)]);
        assert_eq!(julia_type(&s).unwrap(), JuliaType::SierpinskiCarpet);
        let s = spec(3, &[("E:h:2:0", 1), ("E:v:0:3", 1)]);
        assert_eq!(julia_type(&s).unwrap(), JuliaType::SierpinskiCarpet);
        // Odd n with interior flaps only keeps the sphere.
        let s = spec(3, &[("F:h:1:1", 1), ("F:v:1:1", 1)]);
        assert_eq!(julia_type(&s).unwrap(), JuliaType::WholeSphere);
        assert!(julia_type(&spec(2, &[("E:h:1:0", 1)])).is_err());
    }

    #[test]
    fn build_rejects_bad_specs() {
        assert!(build_pillow(&PillowSpec::plain(1)).is_err());
        assert!(build_pillow(&spec(2, &[("F:h:0:0", 1)])).is_err());
        assert!(build_pillow(&spec(2, &[("F:h:0:1", 1), ("F:h:0:1", 1)])).is_err());
        assert!(build_pillow(&spec(2, &[("F:h:0:1", 0)])).is_err());
        assert!("X:h:0:0".parse::<EdgeAddress>().is_err());
    }

    #[test]
    fn stack_valences() {
        // A multiplicity-2 stack: the blown-up edge endpoints gain two tiles
        // per layer; flap top corners sit in exactly two tiles.
        let pillow = build_pillow(&spec(2, &[("F:h:0:1", 2)])).unwrap();
        let counts = valence_multiset(&pillow);
        assert_eq!(counts.get(&8), Some(&2));
        assert!(counts.get(&2).copied().unwrap_or(0) >= 2);
    }

    #[test]
    fn spec_json_round_trip() {
        let s = spec(3, &[("E:h:2:0", 1), ("E:v:0:3", 1)]);
        let text = s.to_json();
        let back = PillowSpec::from_json(&text).unwrap();
        assert_eq!(s, back);
    }
}
