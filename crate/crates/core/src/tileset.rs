//! Tile catalog and the analytic cost model.
//!
//! Every tile is a rectangular sub-multiplier. Its total cost is its own LUT
//! count plus a compression surrogate of 0.65 LUT per output bit, and its
//! efficiency is covered area per LUT of total cost.

use std::fmt;

use num_rational::Ratio;

use crate::cost::Luts;
use crate::error::{Error, Result};
use crate::lutpack;

pub const MIN_BOOTH_LEVEL: u32 = 3;
pub const MAX_BOOTH_LEVEL: u32 = 6;
pub const DEFAULT_BOOTH_LEVEL: u32 = 4;
pub const DSP_WIDTH: u32 = 24;
pub const DSP_HEIGHT: u32 = 17;

/// Footprint on the board: `width` bits of X by `height` bits of Y.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TileShape {
    pub width: u32,
    pub height: u32,
}

impl TileShape {
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width >= 1 && height >= 1, "tile shape must be non-empty");
        TileShape { width, height }
    }

    pub fn area(&self) -> u32 {
        self.width * self.height
    }

    pub fn transposed(&self) -> Self {
        TileShape { width: self.height, height: self.width }
    }
}

impl fmt::Display for TileShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Normal,
    Transposed,
}

/// Sub-multiplier variant, independent of orientation.
///
/// In normal orientation the fixed LUT tiles are `1x1`, `1x2`, `2x3` and
/// `3x3` (width x height), `Lut2xK` is 2 wide and `k` high, a Booth array is
/// `k` wide with its Booth-encoded operand along Y, and the DSP is 24x17.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Lut1x1,
    Lut1x2,
    Lut2x3,
    Lut3x3,
    Lut2xK { k: u32 },
    BoothArray { levels: u32, k: u32, signed: bool },
    Dsp24x17,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TileKind {
    pub variant: Variant,
    pub orientation: Orientation,
}

/// Signedness of the two operand slices a placed tile multiplies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OperandSigns {
    pub x: bool,
    pub y: bool,
}

impl OperandSigns {
    pub const UNSIGNED: OperandSigns = OperandSigns { x: false, y: false };

    pub fn any(&self) -> bool {
        self.x || self.y
    }

    pub fn swapped(&self) -> Self {
        OperandSigns { x: self.y, y: self.x }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileCost {
    /// LUT6 sites of the sub-multiplier itself.
    pub lut_mult: Luts,
    /// `lut_mult` plus the compression surrogate.
    pub lut_total: Luts,
    pub w_out: u32,
    pub dsp: u32,
    /// Board positions covered per LUT of total cost.
    pub efficiency: Ratio<i64>,
}

impl TileCost {
    fn new(area: u32, lut_mult: u32, w_out: u32, dsp: u32) -> Self {
        let lut_mult = Luts::whole(lut_mult as i64);
        let lut_total = lut_mult + Luts::compression_surrogate(w_out);
        TileCost { lut_mult, lut_total, w_out, dsp, efficiency: Ratio::new(area as i64 * 100, lut_total.hundredths()) }
    }
}

impl Variant {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Variant::Lut2xK { k } if k < 3 => Err(Error::InvalidTile(format!("2xk requires k >= 3, got {k}"))),
            Variant::BoothArray { levels, .. } if !(MIN_BOOTH_LEVEL..=MAX_BOOTH_LEVEL).contains(&levels) => {
                Err(Error::BoothLevel(levels))
            }
            Variant::BoothArray { k, .. } if k < 2 => {
                Err(Error::InvalidTile(format!("booth array requires k >= 2, got {k}")))
            }
            _ => Ok(()),
        }
    }

    /// Shape in normal orientation.
    pub fn base_shape(&self) -> TileShape {
        match *self {
            Variant::Lut1x1 => TileShape::new(1, 1),
            Variant::Lut1x2 => TileShape::new(1, 2),
            Variant::Lut2x3 => TileShape::new(2, 3),
            Variant::Lut3x3 => TileShape::new(3, 3),
            Variant::Lut2xK { k } => TileShape::new(2, k),
            Variant::BoothArray { levels, k, signed } => TileShape::new(k, booth_height(levels, signed)),
            Variant::Dsp24x17 => TileShape::new(DSP_WIDTH, DSP_HEIGHT),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        let s = self.base_shape();
        s.width == s.height
    }

    /// Whether the variant can multiply two's-complement operand slices.
    pub fn sign_capable(&self) -> bool {
        !matches!(self, Variant::Lut2xK { .. })
    }

    pub fn label(&self) -> String {
        match *self {
            Variant::Lut1x1 => "1x1".into(),
            Variant::Lut1x2 => "1x2".into(),
            Variant::Lut2x3 => "2x3".into(),
            Variant::Lut3x3 => "3x3".into(),
            Variant::Lut2xK { k } => format!("2x{k}"),
            Variant::BoothArray { levels, k, signed } => {
                format!("booth{}{levels}x{k}", if signed { "s" } else { "u" })
            }
            Variant::Dsp24x17 => "dsp24x17".into(),
        }
    }
}

/// Y extent of an L-level Booth array: 2L-1 bits unsigned, 2L signed.
pub fn booth_height(levels: u32, signed: bool) -> u32 {
    2 * levels - 1 + signed as u32
}

impl TileKind {
    pub fn new(variant: Variant, orientation: Orientation) -> Result<Self> {
        variant.validate()?;
        Ok(TileKind { variant, orientation })
    }

    pub fn normal(variant: Variant) -> Result<Self> {
        Self::new(variant, Orientation::Normal)
    }

    pub fn shape(&self) -> TileShape {
        let s = self.variant.base_shape();
        match self.orientation {
            Orientation::Normal => s,
            Orientation::Transposed => s.transposed(),
        }
    }

    pub fn transposed(&self) -> Self {
        let orientation = match self.orientation {
            Orientation::Normal => Orientation::Transposed,
            Orientation::Transposed => Orientation::Normal,
        };
        TileKind { variant: self.variant, orientation }
    }

    pub fn label(&self) -> String {
        match self.orientation {
            Orientation::Normal => self.variant.label(),
            Orientation::Transposed => format!("{}T", self.variant.label()),
        }
    }

    /// Cost when placed where its operand slices have signedness `signs`
    /// (given in board X/Y terms). Unsigned placements reproduce the catalog.
    pub fn cost_for(&self, signs: OperandSigns) -> Result<TileCost> {
        self.variant.validate()?;
        let shape = self.shape();
        let area = shape.area();
        // signedness in the variant's own (normal orientation) frame
        let own = match self.orientation {
            Orientation::Normal => signs,
            Orientation::Transposed => signs.swapped(),
        };
        let cost = match self.variant {
            Variant::Lut1x1 | Variant::Lut1x2 | Variant::Lut2x3 | Variant::Lut3x3 => {
                let base = self.variant.base_shape();
                let t = lutpack::small_product(base.width as usize, base.height as usize, own.x, own.y);
                TileCost::new(area, t.lut_count() as u32, t.width() as u32, 0)
            }
            Variant::Lut2xK { k } => {
                if own.any() {
                    return Err(Error::InvalidTile(format!("{} cannot take signed operands", self.label())));
                }
                TileCost::new(area, k + 1, k + 2, 0)
            }
            Variant::BoothArray { levels, k, signed } => {
                if signed && !own.y {
                    return Err(Error::InvalidTile(format!(
                        "{} needs a two's-complement encoded operand",
                        self.label()
                    )));
                }
                TileCost::new(area, levels * (k + 1), k + booth_height(levels, signed), 0)
            }
            Variant::Dsp24x17 => TileCost::new(area, 0, DSP_WIDTH + DSP_HEIGHT, 1),
        };
        Ok(cost)
    }
}

/// Shape and analytic cost of an unsigned tile.
pub fn catalog_entry(kind: &TileKind) -> Result<(TileShape, TileCost)> {
    kind.variant.validate()?;
    let signs = match kind.variant {
        Variant::BoothArray { signed: true, .. } => match kind.orientation {
            Orientation::Normal => OperandSigns { x: false, y: true },
            Orientation::Transposed => OperandSigns { x: true, y: false },
        },
        _ => OperandSigns::UNSIGNED,
    };
    Ok((kind.shape(), kind.cost_for(signs)?))
}

/// Length-parametric tile families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyKind {
    Lut1x1,
    Lut1x2,
    Lut2x3,
    Lut3x3,
    Lut2xK,
    Booth { levels: u32, signed: bool },
    Dsp24x17,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TileFamily {
    pub kind: FamilyKind,
    pub orientation: Orientation,
}

impl FamilyKind {
    pub fn is_parametric(&self) -> bool {
        matches!(self, FamilyKind::Lut2xK | FamilyKind::Booth { .. })
    }

    /// Variant for length `k` (ignored by fixed-size families).
    pub fn instantiate(&self, k: u32) -> Result<Variant> {
        let v = match *self {
            FamilyKind::Lut1x1 => Variant::Lut1x1,
            FamilyKind::Lut1x2 => Variant::Lut1x2,
            FamilyKind::Lut2x3 => Variant::Lut2x3,
            FamilyKind::Lut3x3 => Variant::Lut3x3,
            FamilyKind::Lut2xK => Variant::Lut2xK { k },
            FamilyKind::Booth { levels, signed } => Variant::BoothArray { levels, k, signed },
            FamilyKind::Dsp24x17 => Variant::Dsp24x17,
        };
        v.validate()?;
        Ok(v)
    }

    /// Smallest admissible length of a parametric family.
    pub fn min_length(&self) -> u32 {
        match self {
            FamilyKind::Lut2xK => 3,
            FamilyKind::Booth { .. } => 2,
            _ => 0,
        }
    }

    fn name(&self) -> String {
        match *self {
            FamilyKind::Booth { levels, signed } => format!("booth{}{levels}", if signed { "s" } else { "u" }),
            other => format!("{other:?}"),
        }
    }
}

/// Limit of the efficiency as the length grows without bound.
pub fn efficiency_limit(family: FamilyKind) -> Result<Ratio<i64>> {
    match family {
        // 2k / (1.65k + 2.3)
        FamilyKind::Lut2xK => Ok(Ratio::new(200, 165)),
        // (2L-1)k / ((L + 0.65)k + ...)
        FamilyKind::Booth { levels, signed } => {
            if !(MIN_BOOTH_LEVEL..=MAX_BOOTH_LEVEL).contains(&levels) {
                return Err(Error::BoothLevel(levels));
            }
            let h = booth_height(levels, signed) as i64;
            Ok(Ratio::new(h * 100, levels as i64 * 100 + 65))
        }
        other => Err(Error::NotParametric(other.name())),
    }
}

/// Which tile families a run may use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileSetConfig {
    /// The fixed-size LUT multipliers 1x1, 1x2, 2x3 and 3x3.
    pub small_luts: bool,
    pub two_by_k: bool,
    /// 0 disables Booth arrays, otherwise levels 3..=max are added.
    pub booth_max_level: u32,
    /// Admit signed (2L high) Booth arrays; only useful on signed boards.
    pub booth_signed: bool,
    pub dsp: bool,
}

impl Default for TileSetConfig {
    fn default() -> Self {
        TileSetConfig {
            small_luts: true,
            two_by_k: true,
            booth_max_level: DEFAULT_BOOTH_LEVEL,
            booth_signed: true,
            dsp: true,
        }
    }
}

impl TileSetConfig {
    pub fn none() -> Self {
        TileSetConfig { small_luts: false, two_by_k: false, booth_max_level: 0, booth_signed: false, dsp: false }
    }

    pub fn lut_only() -> Self {
        TileSetConfig { booth_max_level: 0, dsp: false, ..Default::default() }
    }
}

/// Deterministic, de-duplicated family list with both orientations of every
/// asymmetric family.
pub fn build_tile_set(config: &TileSetConfig) -> Result<Vec<TileFamily>> {
    if config.booth_max_level != 0 && !(MIN_BOOTH_LEVEL..=MAX_BOOTH_LEVEL).contains(&config.booth_max_level) {
        return Err(Error::BoothLevel(config.booth_max_level));
    }
    let mut kinds = Vec::new();
    if config.small_luts {
        kinds.extend([FamilyKind::Lut1x1, FamilyKind::Lut1x2, FamilyKind::Lut2x3, FamilyKind::Lut3x3]);
    }
    if config.two_by_k {
        kinds.push(FamilyKind::Lut2xK);
    }
    if config.booth_max_level != 0 {
        for levels in MIN_BOOTH_LEVEL..=config.booth_max_level {
            kinds.push(FamilyKind::Booth { levels, signed: false });
            if config.booth_signed {
                kinds.push(FamilyKind::Booth { levels, signed: true });
            }
        }
    }
    if config.dsp {
        kinds.push(FamilyKind::Dsp24x17);
    }
    let mut out = Vec::new();
    for kind in kinds {
        out.push(TileFamily { kind, orientation: Orientation::Normal });
        let symmetric = matches!(kind, FamilyKind::Lut1x1 | FamilyKind::Lut3x3);
        if !symmetric {
            out.push(TileFamily { kind, orientation: Orientation::Transposed });
        }
    }
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err(Error::EmptyTileSet);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(v: Variant) -> (TileShape, TileCost) {
        catalog_entry(&TileKind::normal(v).unwrap()).unwrap()
    }

    fn approx(r: Ratio<i64>, v: f64) -> bool {
        (*r.numer() as f64 / *r.denom() as f64 - v).abs() <= 0.005
    }

    #[test]
    fn lut3x3_row() {
        let (s, c) = entry(Variant::Lut3x3);
        assert_eq!(s, TileShape::new(3, 3));
        assert_eq!(c.lut_mult, Luts::whole(5));
        assert_eq!(c.lut_total, Luts::from_hundredths(890));
        assert_eq!(c.w_out, 6);
        assert!(approx(c.efficiency, 1.011));
    }

    #[test]
    fn dsp_row() {
        let (s, c) = entry(Variant::Dsp24x17);
        assert_eq!(s.area(), 408);
        assert_eq!(c.lut_mult, Luts::ZERO);
        assert_eq!(c.lut_total, Luts::from_hundredths(2665));
        assert_eq!(c.w_out, 41);
        assert_eq!(c.dsp, 1);
    }

    #[test]
    fn booth_l3_k10() {
        let (s, c) = entry(Variant::BoothArray { levels: 3, k: 10, signed: false });
        assert_eq!(s.area(), 50);
        assert_eq!((s.width, s.height), (10, 5));
        assert_eq!(c.lut_mult, Luts::whole(33));
        assert_eq!(c.lut_total, Luts::from_hundredths(4275));
        assert!(approx(c.efficiency, 1.170));
    }

    #[test]
    fn lut1x1_total() {
        let (_, c) = entry(Variant::Lut1x1);
        assert_eq!(c.lut_total, Luts::from_hundredths(165));
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(TileKind::normal(Variant::Lut2xK { k: 2 }).is_err());
        assert!(TileKind::normal(Variant::BoothArray { levels: 7, k: 4, signed: false }).is_err());
        assert!(TileKind::normal(Variant::BoothArray { levels: 2, k: 4, signed: false }).is_err());
        assert!(TileKind::normal(Variant::BoothArray { levels: 3, k: 1, signed: false }).is_err());
    }

    #[test]
    fn limits() {
        assert!(approx(efficiency_limit(FamilyKind::Lut2xK).unwrap(), 1.21));
        assert!(approx(efficiency_limit(FamilyKind::Booth { levels: 3, signed: false }).unwrap(), 1.37));
        assert!(approx(efficiency_limit(FamilyKind::Booth { levels: 6, signed: false }).unwrap(), 1.65));
        assert!(efficiency_limit(FamilyKind::Lut3x3).is_err());
    }

    #[test]
    fn tile_set_families() {
        let cfg = TileSetConfig { booth_max_level: 0, dsp: false, ..Default::default() };
        let set = build_tile_set(&cfg).unwrap();
        let mut kinds: Vec<_> = set.iter().map(|f| f.kind).collect();
        kinds.dedup();
        assert_eq!(kinds.len(), 5);
        let cfg = TileSetConfig { booth_max_level: 4, booth_signed: false, ..Default::default() };
        let set = build_tile_set(&cfg).unwrap();
        assert!(set.iter().any(|f| f.kind == FamilyKind::Booth { levels: 3, signed: false }));
        assert!(set.iter().any(|f| f.kind == FamilyKind::Booth { levels: 4, signed: false }));
        assert!(!set.iter().any(|f| f.kind == FamilyKind::Booth { levels: 5, signed: false }));
        assert_eq!(build_tile_set(&TileSetConfig::none()), Err(Error::EmptyTileSet));
        let bad = TileSetConfig { booth_max_level: 7, ..Default::default() };
        assert_eq!(build_tile_set(&bad), Err(Error::BoothLevel(7)));
    }

    #[test]
    fn transposition_preserves_cost() {
        for v in [
            Variant::Lut1x2,
            Variant::Lut2x3,
            Variant::Lut2xK { k: 7 },
            Variant::BoothArray { levels: 4, k: 9, signed: false },
            Variant::Dsp24x17,
        ] {
            let n = TileKind::normal(v).unwrap();
            let t = n.transposed();
            let (sn, cn) = catalog_entry(&n).unwrap();
            let (st, ct) = catalog_entry(&t).unwrap();
            assert_eq!(sn.transposed(), st);
            assert_eq!(cn, ct);
        }
    }
}
