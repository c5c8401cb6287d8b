//! Scenario configurations shipped with the binary.

/// A bundled configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bundled {
    pub name: &'static str,
    pub summary: &'static str,
    pub source: &'static str,
}

/// Bundled scenarios in listing order.
pub const BUNDLED: &[Bundled] = &[
    Bundled {
        name: "heat_clm_demo",
        summary: "heat equation, classical quadratic estimate baseline",
        source: include_str!("../scenarios/heat_clm_demo.toml"),
    },
    Bundled {
        name: "parabolic_demo",
        summary: "reaction-diffusion, truncated functional and L^q estimate",
        source: include_str!("../scenarios/parabolic_demo.toml"),
    },
    Bundled {
        name: "parabolic_2d_demo",
        summary: "reaction-diffusion on the square, cubic nonlinearities",
        source: include_str!("../scenarios/parabolic_2d_demo.toml"),
    },
    Bundled {
        name: "transport_global",
        summary: "transport with bounded speed, global estimates",
        source: include_str!("../scenarios/transport_global.toml"),
    },
    Bundled {
        name: "transport_steady",
        summary: "transport steady state preserved by the upwind scheme",
        source: include_str!("../scenarios/transport_steady.toml"),
    },
    Bundled {
        name: "transport_liss",
        summary: "transport with decreasing speed, local estimate",
        source: include_str!("../scenarios/transport_liss.toml"),
    },
    Bundled {
        name: "wave_finite_time",
        summary: "wave with matched damping, finite-time absorption",
        source: include_str!("../scenarios/wave_finite_time.toml"),
    },
    Bundled {
        name: "wave_disturbed",
        summary: "wave with forcing and boundary disturbance",
        source: include_str!("../scenarios/wave_disturbed.toml"),
    },
];

pub fn find(name: &str) -> Option<&'static Bundled> {
    BUNDLED.iter().find(|b| b.name == name)
}

/// One line per scenario, `name — summary`.
pub fn listing() -> String {
    BUNDLED
        .iter()
        .map(|b| format!("{} — {}\n", b.name, b.summary))
        .collect()
}
