//! Reference per-step resources for the periodic honeycomb with
//! `L_x = L_y = L`, `L ∈ {4, 6, …, 18}`, at `U = 4`, `V = 2`, `τ = 1`.
//! Used as the golden data for regression checks and the `table2` report.

use crate::trotterbounds::Model;

/// Linear sizes of the reference sweep.
pub const SIZES: [usize; 8] = [4, 6, 8, 10, 12, 14, 16, 18];

/// Site counts `N = 2L²`.
pub const SITES: [u64; 8] = [32, 72, 128, 200, 288, 392, 512, 648];

pub const W_TILE_HUBBARD: [i64; 8] = [215, 483, 860, 1344, 1934, 2634, 3439, 4353];
pub const W_TILE_EXTENDED: [i64; 8] = [1223, 2752, 4894, 7648, 11011, 14989, 19577, 24778];

/// Phasing ancilla choices, in column order: `0`, `N/4 − 1`, `N/2 − 1`, `N − 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlphaRule {
    Off,
    Quarter,
    Half,
    Full,
}

impl AlphaRule {
    pub const ALL: [AlphaRule; 4] = [AlphaRule::Off, AlphaRule::Quarter, AlphaRule::Half, AlphaRule::Full];

    /// Phasing group size `m = α + 1`.
    pub fn group_size(self, n: u64) -> u64 {
        match self {
            AlphaRule::Off => 1,
            AlphaRule::Quarter => n / 4,
            AlphaRule::Half => n / 2,
            AlphaRule::Full => n,
        }
    }

    pub fn alpha(self, n: u64) -> u64 {
        self.group_size(n) - 1
    }

    pub fn label(self) -> &'static str {
        match self {
            AlphaRule::Off => "0",
            AlphaRule::Quarter => "N/4-1",
            AlphaRule::Half => "N/2-1",
            AlphaRule::Full => "N-1",
        }
    }
}

impl std::str::FromStr for AlphaRule {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s.trim() {
            "0" | "off" => Ok(AlphaRule::Off),
            "N/4-1" | "quarter" => Ok(AlphaRule::Quarter),
            "N/2-1" | "half" => Ok(AlphaRule::Half),
            "N-1" | "full" => Ok(AlphaRule::Full),
            other => Err(crate::Error::InvalidParameter(format!("unknown alpha rule `{other}`"))),
        }
    }
}

/// `(N_Q, N_R, N_T)` per size for one model and phasing choice.
pub type ResourceRow = [(u64, u64, u64); 8];

const HUB_OFF: ResourceRow = [
    (64, 192, 320),
    (144, 432, 720),
    (256, 768, 1280),
    (400, 1200, 2000),
    (576, 1728, 2880),
    (784, 2352, 3920),
    (1024, 3072, 5120),
    (1296, 3888, 6480),
];
const HUB_QUARTER: ResourceRow = [
    (71, 96, 992),
    (161, 120, 2352),
    (287, 144, 4256),
    (449, 144, 6704),
    (647, 168, 9696),
    (881, 168, 13232),
    (1151, 192, 17312),
    (1457, 192, 21936),
];
const HUB_HALF: ResourceRow = [
    (79, 60, 1040),
    (179, 72, 2400),
    (319, 84, 4304),
    (499, 84, 6752),
    (719, 96, 9744),
    (979, 96, 13280),
    (1279, 108, 17360),
    (1619, 108, 21984),
];
const HUB_FULL: ResourceRow = [
    (95, 36, 1064),
    (215, 42, 2424),
    (383, 48, 4328),
    (599, 48, 6776),
    (863, 54, 9768),
    (1175, 54, 13304),
    (1535, 60, 17384),
    (1943, 60, 22008),
];
const EXT_OFF: ResourceRow = [
    (64, 384, 320),
    (144, 864, 720),
    (256, 1536, 1280),
    (400, 2400, 2000),
    (576, 3456, 2880),
    (784, 4704, 3920),
    (1024, 6144, 5120),
    (1296, 7776, 6480),
];
const EXT_QUARTER: ResourceRow = [
    (71, 192, 1664),
    (161, 240, 3984),
    (287, 288, 7232),
    (449, 288, 11408),
    (647, 336, 16512),
    (881, 336, 22544),
    (1151, 384, 29504),
    (1457, 384, 37392),
];
const EXT_HALF: ResourceRow = [
    (79, 120, 1760),
    (179, 144, 4080),
    (319, 168, 7328),
    (499, 168, 11504),
    (719, 192, 16608),
    (979, 192, 22640),
    (1279, 216, 29600),
    (1619, 216, 37488),
];
const EXT_FULL: ResourceRow = [
    (95, 72, 1808),
    (215, 84, 4128),
    (383, 96, 7376),
    (599, 96, 11552),
    (863, 108, 16656),
    (1175, 108, 22688),
    (1535, 120, 29648),
    (1943, 120, 37536),
];

/// Reference resources, or `None` for models without a reference table.
pub fn resources(model: Model, rule: AlphaRule) -> Option<&'static ResourceRow> {
    let row = match (model, rule) {
        (Model::Hubbard, AlphaRule::Off) => &HUB_OFF,
        (Model::Hubbard, AlphaRule::Quarter) => &HUB_QUARTER,
        (Model::Hubbard, AlphaRule::Half) => &HUB_HALF,
        (Model::Hubbard, AlphaRule::Full) => &HUB_FULL,
        (Model::ExtendedHubbard, AlphaRule::Off) => &EXT_OFF,
        (Model::ExtendedHubbard, AlphaRule::Quarter) => &EXT_QUARTER,
        (Model::ExtendedHubbard, AlphaRule::Half) => &EXT_HALF,
        (Model::ExtendedHubbard, AlphaRule::Full) => &EXT_FULL,
        (Model::Ppp, _) => return None,
    };
    Some(row)
}

pub fn w_tile(model: Model) -> Option<&'static [i64; 8]> {
    match model {
        Model::Hubbard => Some(&W_TILE_HUBBARD),
        Model::ExtendedHubbard => Some(&W_TILE_EXTENDED),
        Model::Ppp => None,
    }
}

/// Round half away from zero, the rounding used for comparisons against
/// the integer reference values.
pub fn round_half_away(x: f64) -> i64 {
    x.round() as i64
}
