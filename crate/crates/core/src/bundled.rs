//! Example instances shipped with the crate.

use crate::netgraph::NetworkFile;

pub const BUTTERFLY_JSON: &str = include_str!("../data/butterfly.json");
pub const BUTTERFLY_Z4_JSON: &str = include_str!("../data/butterfly_z4.json");
pub const BIT_SPLIT_JSON: &str = include_str!("../data/bit_split.json");
pub const REDUCED_BUTTERFLY_JSON: &str = include_str!("../data/reduced_butterfly.json");

/// Name and JSON text of every bundled instance.
pub const ALL: [(&str, &str); 4] = [
    ("butterfly", BUTTERFLY_JSON),
    ("butterfly_z4", BUTTERFLY_Z4_JSON),
    ("bit_split", BIT_SPLIT_JSON),
    ("reduced_butterfly", REDUCED_BUTTERFLY_JSON),
];

pub fn by_name(name: &str) -> Option<NetworkFile> {
    ALL.iter()
        .find(|(n, _)| *n == name)
        .map(|(_, json)| NetworkFile::from_json(json).expect("bundled files parse"))
}

/// Two sources, two sinks, XOR coding at the bottleneck.
pub fn butterfly() -> NetworkFile {
    by_name("butterfly").unwrap()
}

/// The butterfly coded over Z4; sinks subtract instead of XOR.
pub fn butterfly_z4() -> NetworkFile {
    by_name("butterfly_z4").unwrap()
}

/// One source split into its two bits along two paths with two-to-one
/// maps, plus a constant-output node.
pub fn bit_split() -> NetworkFile {
    by_name("bit_split").unwrap()
}

/// The butterfly without its two side links, with plain routing. Fails the
/// requirement.
pub fn reduced_butterfly() -> NetworkFile {
    by_name("reduced_butterfly").unwrap()
}
