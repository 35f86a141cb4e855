//! Figure presets embedded in the binary; `run fig1` works without the
//! preset files on disk.

pub const PRESETS: &[(&str, &str)] = &[
    ("fig1", include_str!("../../../presets/fig1.json")),
    ("fig2", include_str!("../../../presets/fig2.json")),
    ("fig3", include_str!("../../../presets/fig3.json")),
    ("fig4a", include_str!("../../../presets/fig4a.json")),
    ("fig4b", include_str!("../../../presets/fig4b.json")),
];

pub fn lookup(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}
