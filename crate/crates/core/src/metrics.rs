//! Relative error against best-known values and the published Gset table.

use crate::qubo::Sense;
use crate::{Error, Result};

/// Gap to the best-known value, normalized by it. Clamped at 0 when `ours`
/// beats `best`.
pub fn relative_error(ours: f64, best: f64, sense: Sense) -> Result<f64> {
    if !(best > 0.0) {
        return Err(Error::InvalidParameters(alloc::format!(
            "best-known value must be positive, got {best}"
        )));
    }
    let gap = match sense {
        Sense::Maximize => best - ours,
        Sense::Minimize => ours - best,
    };
    Ok((gap / best).max(0.0))
}

/// One row of the published Gset MaxCut comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ReferenceRow {
    pub instance: &'static str,
    pub nodes: usize,
    pub edges: usize,
    /// Breakout local search; the best-known value.
    pub bls: f64,
    pub dsdp: f64,
    pub khlwg: f64,
    /// `None` where no value was published.
    pub run_csp: Option<f64>,
    pub pi_gnn: f64,
    pub g_dfl4co: f64,
    /// Published relative error in percent, as printed (two decimals).
    pub epsilon_percent: f64,
}

/// Published MaxCut cut sizes on Gset. Used as labels for ε only.
pub const GSET_REFERENCE: [ReferenceRow; 7] = [
    row("G14", 800, 4694, 3064.0, 2922.0, 3061.0, Some(2943.0), 3026.0, 3060.0, 0.13),
    row("G15", 800, 4661, 3050.0, 2938.0, 3050.0, Some(2928.0), 2990.0, 3038.0, 0.39),
    row("G22", 2000, 19990, 13359.0, 12960.0, 13359.0, Some(13028.0), 13181.0, 13333.0, 0.19),
    row("G49", 3000, 6000, 6000.0, 6000.0, 6000.0, Some(6000.0), 5918.0, 6000.0, 0.0),
    row("G50", 3000, 6000, 5880.0, 5880.0, 5880.0, Some(5880.0), 5820.0, 5860.0, 0.34),
    row("G55", 5000, 12468, 10294.0, 9960.0, 10236.0, Some(10116.0), 10138.0, 10162.0, 1.28),
    row("G70", 10000, 9999, 9541.0, 9456.0, 9458.0, None, 9421.0, 9499.0, 0.44),
];

#[allow(clippy::too_many_arguments)]
const fn row(
    instance: &'static str,
    nodes: usize,
    edges: usize,
    bls: f64,
    dsdp: f64,
    khlwg: f64,
    run_csp: Option<f64>,
    pi_gnn: f64,
    g_dfl4co: f64,
    epsilon_percent: f64,
) -> ReferenceRow {
    ReferenceRow {
        instance,
        nodes,
        edges,
        bls,
        dsdp,
        khlwg,
        run_csp,
        pi_gnn,
        g_dfl4co,
        epsilon_percent,
    }
}

/// Best-known MaxCut value for a Gset instance name (case-insensitive).
pub fn best_known(instance: &str) -> Option<&'static ReferenceRow> {
    GSET_REFERENCE
        .iter()
        .find(|r| r.instance.eq_ignore_ascii_case(instance))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn percent_2dp(eps: f64) -> f64 {
        libm::round(eps * 1e4) / 100.0
    }

    #[test]
    fn examples() {
        let e = relative_error(3060.0, 3064.0, Sense::Maximize).unwrap();
        assert_eq!(percent_2dp(e), 0.13);
        let e = relative_error(5860.0, 5880.0, Sense::Maximize).unwrap();
        assert_eq!(percent_2dp(e), 0.34);
        assert_eq!(relative_error(42.0, 42.0, Sense::Maximize).unwrap(), 0.0);
    }

    #[test]
    fn clamps_and_validates() {
        assert_eq!(relative_error(11.0, 10.0, Sense::Maximize).unwrap(), 0.0);
        assert_eq!(relative_error(9.0, 10.0, Sense::Minimize).unwrap(), 0.0);
        assert!((relative_error(12.0, 10.0, Sense::Minimize).unwrap() - 0.2).abs() < 1e-15);
        assert!(relative_error(1.0, 0.0, Sense::Maximize).is_err());
        assert!(relative_error(1.0, -3.0, Sense::Maximize).is_err());
    }

    #[test]
    fn lookup_is_case_insensitive() {
        assert_eq!(best_known("g14").unwrap().bls, 3064.0);
        assert!(best_known("G1").is_none());
        assert_eq!(best_known("G70").unwrap().run_csp, None);
    }
}
