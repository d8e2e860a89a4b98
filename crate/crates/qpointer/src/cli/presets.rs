//! Named parameter presets. Each one pins the base parameters, the sweep
//! axis and the axis range for a plot-ready dataset; panel aliases (for
//! example `fig3b` for `fig3a`) resolve to the same dataset because both
//! observable branches are always emitted.

use super::sweep::{Axis, SweepKind};

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub kind: SweepKind,
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    /// Base parameters, applied through the ordinary `key=value` parser.
    pub sets: &'static [(&'static str, &'static str)],
    /// Deformation values for the distribution preset (one output column
    /// each); empty elsewhere.
    pub q_list: &'static [f64],
    pub summary: &'static str,
}

const SELECTION_NARROW: &[(&str, &str)] = &[
    ("alpha_modulus", "2"),
    ("alpha_phase", "pi/8"),
    ("beta_modulus", "0.5"),
    ("beta_phase", "7pi/8"),
    ("z_phase", "pi/2"),
];

const SELECTION_WIDE: &[(&str, &str)] = &[
    ("alpha_modulus", "4"),
    ("alpha_phase", "pi/3"),
    ("beta_modulus", "0.5"),
    ("beta_phase", "2pi/3"),
    ("z_phase", "pi/2"),
];

const PRESETS: &[Preset] = &[
    Preset {
        name: "fig1",
        kind: SweepKind::WeakValue,
        axis: Axis::Q,
        start: 0.05,
        stop: 1.0,
        count: 96,
        sets: &[
            ("g", "0"),
            ("observable", "x2"),
            ("alpha_modulus", "2"),
            ("alpha_phase", "pi/8"),
            ("beta_modulus", "0.5"),
            ("beta_phase", "7pi/8"),
            ("z_modulus", "1"),
            ("z_phase", "pi/8"),
        ],
        q_list: &[],
        summary: "deformed weak value against the coherent-mean baseline across q",
    },
    Preset {
        name: "fig2",
        kind: SweepKind::PhotonDist,
        axis: Axis::N,
        start: 0.0,
        stop: 40.0,
        count: 41,
        sets: &[
            ("g", "0.3"),
            ("observable", "x2"),
            ("z_modulus", "1.5"),
            ("z_phase", "pi/2"),
            ("alpha_modulus", "2"),
            ("alpha_phase", "pi/2"),
            ("beta_modulus", "1"),
            ("beta_phase", "pi/2"),
        ],
        q_list: &[0.2, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
        summary: "photon number distribution, one column per deformation value",
    },
    Preset {
        name: "fig3a",
        kind: SweepKind::Mandel,
        axis: Axis::ZModulus,
        start: 0.0,
        stop: 1.1,
        count: 23,
        sets: &[("q", "0.2"), ("g", "0.6")],
        q_list: &[],
        summary: "Mandel parameter vs pointer amplitude at strong deformation",
    },
    Preset {
        name: "fig3c",
        kind: SweepKind::Mandel,
        axis: Axis::ZModulus,
        start: 0.0,
        stop: 1.1,
        count: 23,
        sets: &[("q", "0.8"), ("g", "0.6")],
        q_list: &[],
        summary: "Mandel parameter vs pointer amplitude at mild deformation",
    },
    Preset {
        name: "fig4a",
        kind: SweepKind::G2,
        axis: Axis::ZModulus,
        start: 0.0,
        stop: 1.15,
        count: 24,
        sets: &[("q", "0.3"), ("g", "0.2")],
        q_list: &[],
        summary: "second-order coherence vs pointer amplitude",
    },
    Preset {
        name: "fig4c",
        kind: SweepKind::G2,
        axis: Axis::G,
        start: 0.0,
        stop: 1.0,
        count: 21,
        sets: &[("q", "0.3"), ("z_modulus", "0.4"), ("z_phase", "pi/2")],
        q_list: &[],
        summary: "second-order coherence vs coupling strength",
    },
    Preset {
        name: "fig5ab",
        kind: SweepKind::Quadrature,
        axis: Axis::ZModulus,
        start: 0.0,
        stop: 3.0,
        count: 31,
        sets: &[
            ("q", "0.9"),
            ("g", "0.3"),
            ("alpha_modulus", "4"),
            ("alpha_phase", "pi/8"),
            ("beta_modulus", "2"),
            ("beta_phase", "7pi/8"),
            ("z_phase", "pi/2"),
        ],
        q_list: &[],
        summary: "uncertainty products vs pointer amplitude",
    },
    Preset {
        name: "fig5cd",
        kind: SweepKind::Quadrature,
        axis: Axis::ZModulus,
        start: 0.35,
        stop: 1.4,
        count: 22,
        sets: &[("q", "0.5"), ("g", "0.8")],
        q_list: &[],
        summary: "quadrature variances vs pointer amplitude (momentum squeezing window)",
    },
    Preset {
        name: "fig5cd_text",
        kind: SweepKind::Quadrature,
        axis: Axis::ZModulus,
        start: 0.35,
        stop: 1.4,
        count: 22,
        sets: &[("q", "0.5"), ("g", "0.9")],
        q_list: &[],
        summary: "fig5cd variant with the stronger coupling quoted in prose",
    },
    Preset {
        name: "fig5ef",
        kind: SweepKind::Quadrature,
        axis: Axis::ZModulus,
        start: 0.35,
        stop: 1.8,
        count: 30,
        sets: &[("q", "0.7"), ("g", "0.5")],
        q_list: &[],
        summary: "quadrature variances vs pointer amplitude at weaker deformation",
    },
    Preset {
        name: "fig5ef_text",
        kind: SweepKind::Quadrature,
        axis: Axis::ZModulus,
        start: 0.35,
        stop: 1.8,
        count: 30,
        sets: &[("q", "0.8"), ("g", "0.5")],
        q_list: &[],
        summary: "fig5ef variant with the milder deformation quoted in prose",
    },
];

// fig5cd/fig5ef and their *_text variants share the wide selection pair.
const WIDE_SELECTION_PRESETS: &[&str] = &["fig5cd", "fig5cd_text", "fig5ef", "fig5ef_text"];
const NARROW_SELECTION_PRESETS: &[&str] = &["fig3a", "fig3c", "fig4a", "fig4c"];

const ALIASES: &[(&str, &str)] = &[
    ("fig3b", "fig3a"),
    ("fig3d", "fig3c"),
    ("fig4b", "fig4a"),
    ("fig4d", "fig4c"),
];

pub fn all() -> &'static [Preset] {
    PRESETS
}

/// Resolves a preset name (or panel alias) to its definition.
pub fn find(name: &str) -> Option<&'static Preset> {
    let canonical = ALIASES
        .iter()
        .find(|(alias, _)| *alias == name)
        .map(|(_, target)| *target)
        .unwrap_or(name);
    PRESETS.iter().find(|p| p.name == canonical)
}

/// Selection-state assignments shared between preset families; applied
/// before the preset's own `sets` so the latter win.
pub fn shared_sets(name: &'static str) -> &'static [(&'static str, &'static str)] {
    if NARROW_SELECTION_PRESETS.contains(&name) {
        SELECTION_NARROW
    } else if WIDE_SELECTION_PRESETS.contains(&name) {
        SELECTION_WIDE
    } else {
        &[]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_and_aliases() {
        assert_eq!(find("fig1").unwrap().name, "fig1");
        assert_eq!(find("fig3b").unwrap().name, "fig3a");
        assert_eq!(find("fig4d").unwrap().name, "fig4c");
        assert!(find("fig9").is_none());
    }

    #[test]
    fn preset_definitions_parse() {
        use super::super::params::Params;
        for p in all() {
            let mut params = Params::default();
            for (k, v) in shared_sets(p.name).iter().chain(p.sets.iter()) {
                params.set(k, v).unwrap_or_else(|e| panic!("{}: {e}", p.name));
            }
            assert!(p.count >= 1);
            assert!(p.stop >= p.start);
        }
    }
}
