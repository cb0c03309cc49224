//! Quality indicators and statistics.

mod hypervolume;
mod mann_whitney;
mod quality;

pub use hypervolume::{hv_contributions, hypervolume, hypervolume_min_form, FrontKind, FrontRecord};
pub use mann_whitney::{
    mann_whitney, mann_whitney_with, Alternative, Direction, MannWhitney, TestMethod,
    EXACT_BELOW,
};
pub use quality::{box_stats, delta_d, delta_v, BoxStats, DeltaD};
