//! Instance specifications accepted on the command line.

use crate::error::{Error, Result};
use crate::instances::group::{double_group, group_to_ds, Group};
use crate::instances::{chart_sine, degenerate_plane, euclidean, heisenberg, iso_heisenberg, snowflake};
use crate::structure::Model;

/// Spec strings of the bundled instances.
pub const REGISTRY: &[&str] = &[
    "euclidean:n=3",
    "heisenberg:n=1",
    "iso-heisenberg",
    "snowflake:alpha=0.5",
    "chart-sine:a=0.1",
    "degenerate-plane",
    "double:heisenberg:n=1",
    "double:iso-heisenberg",
];

/// A built instance: the structure, and its group when it has one.
#[derive(Clone)]
pub struct Instance {
    pub spec: String,
    pub ds: Model,
    pub group: Option<Group>,
}

impl Instance {
    fn plain(spec: &str, ds: Model) -> Self {
        Instance {
            spec: spec.to_string(),
            ds,
            group: None,
        }
    }

    fn from_group(spec: &str, g: Group) -> Self {
        Instance {
            spec: spec.to_string(),
            ds: group_to_ds(g.clone()),
            group: Some(g),
        }
    }
}

fn param<T: std::str::FromStr>(spec: &str, rest: &str, key: &str) -> Result<T> {
    rest.strip_prefix(key)
        .and_then(|v| v.strip_prefix('='))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::UnknownInstance(spec.to_string()))
}

fn build_group(spec: &str, body: &str) -> Result<Group> {
    if body == "iso-heisenberg" {
        return Ok(iso_heisenberg());
    }
    if let Some(rest) = body.strip_prefix("heisenberg:") {
        return Ok(heisenberg(param(spec, rest, "n")?)?);
    }
    Err(Error::UnknownInstance(spec.to_string()))
}

/// Parses a spec such as `heisenberg:n=1` or `double:iso-heisenberg`.
pub fn build_instance(spec: &str) -> Result<Instance> {
    let s = spec.trim();
    if let Some(rest) = s.strip_prefix("euclidean:") {
        return Ok(Instance::plain(s, euclidean(param(s, rest, "n")?)?));
    }
    if let Some(rest) = s.strip_prefix("snowflake:") {
        return Ok(Instance::plain(s, snowflake(param(s, rest, "alpha")?)?));
    }
    if let Some(rest) = s.strip_prefix("chart-sine:") {
        return Ok(Instance::plain(s, chart_sine(param(s, rest, "a")?)?));
    }
    if s == "degenerate-plane" {
        return Ok(Instance::plain(s, degenerate_plane()));
    }
    if let Some(rest) = s.strip_prefix("double:") {
        let g: Group = double_group(build_group(s, rest)?);
        return Ok(Instance::from_group(s, g));
    }
    Ok(Instance::from_group(s, build_group(s, s)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_registered_spec_builds() {
        for spec in REGISTRY {
            let inst = build_instance(spec).unwrap();
            assert_eq!(inst.ds.name(), *spec);
        }
    }

    #[test]
    fn unknown_specs_are_rejected() {
        for bad in ["", "euclid", "euclidean:n=x", "heisenberg", "double:euclidean:n=2", "snowflake:beta=1"] {
            assert!(matches!(build_instance(bad), Err(Error::UnknownInstance(_))), "{bad}");
        }
        assert!(matches!(build_instance("euclidean:n=0"), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn groups_are_exposed() {
        assert!(build_instance("heisenberg:n=2").unwrap().group.is_some());
        assert!(build_instance("euclidean:n=2").unwrap().group.is_none());
        assert_eq!(build_instance("double:heisenberg:n=1").unwrap().ds.dim(), 6);
    }
}
