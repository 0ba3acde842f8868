use super::config::ScenarioConfig;
use crate::error::{Error, Result};

const BUILTINS: &[(&str, &str)] = &[
    ("fig2a", include_str!("../../scenarios/fig2a.toml")),
    ("fig2b", include_str!("../../scenarios/fig2b.toml")),
    ("fig2c", include_str!("../../scenarios/fig2c.toml")),
    ("fig2d", include_str!("../../scenarios/fig2d.toml")),
    ("fig2e", include_str!("../../scenarios/fig2e.toml")),
    ("fig3_weak", include_str!("../../scenarios/fig3_weak.toml")),
    ("fig3_moderate", include_str!("../../scenarios/fig3_moderate.toml")),
    ("fig4_shaped", include_str!("../../scenarios/fig4_shaped.toml")),
    ("fig4_emit_only", include_str!("../../scenarios/fig4_emit_only.toml")),
    ("fig5_quadratic", include_str!("../../scenarios/fig5_quadratic.toml")),
    ("fig5_cubic", include_str!("../../scenarios/fig5_cubic.toml")),
    ("fig6_symmetric_packet", include_str!("../../scenarios/fig6_symmetric_packet.toml")),
    ("fig6_rabi", include_str!("../../scenarios/fig6_rabi.toml")),
];

const GROUPS: &[(&str, &[&str])] = &[
    ("fig2", &["fig2a", "fig2b", "fig2c", "fig2d", "fig2e"]),
    ("fig2f", &["fig2d", "fig2e"]),
    ("fig3", &["fig3_weak", "fig3_moderate"]),
    ("fig4", &["fig4_shaped", "fig4_emit_only"]),
    ("fig5", &["fig5_quadratic", "fig5_cubic"]),
    ("fig6", &["fig6_symmetric_packet", "fig6_rabi"]),
];

pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().map(|(n, _)| *n)
}

pub fn builtin_groups() -> impl Iterator<Item = (&'static str, &'static [&'static str])> {
    GROUPS.iter().copied()
}

/// TOML source of a builtin scenario.
pub fn builtin_source(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn builtin(name: &str) -> Result<ScenarioConfig> {
    let src = builtin_source(name).ok_or_else(|| Error::UnknownScenario(name.to_string()))?;
    ScenarioConfig::from_toml(src)
}

/// A scenario name or a group name, expanded to its scenarios.
pub fn resolve_builtin(name: &str) -> Result<Vec<ScenarioConfig>> {
    if let Some((_, members)) = GROUPS.iter().find(|(g, _)| *g == name) {
        return members.iter().map(|m| builtin(m)).collect();
    }
    Ok(vec![builtin(name)?])
}
