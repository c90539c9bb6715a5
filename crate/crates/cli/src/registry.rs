//! Models shipped with the binary.

pub struct Bundled {
    pub name: &'static str,
    pub source: &'static str,
}

pub const BUNDLED: &[Bundled] = &[
    Bundled { name: "nahm", source: include_str!("../models/nahm.ksym") },
    Bundled { name: "free_particle", source: include_str!("../models/free_particle.ksym") },
    Bundled { name: "vibrating_string", source: include_str!("../models/vibrating_string.ksym") },
    Bundled { name: "minimal_surface", source: include_str!("../models/minimal_surface.ksym") },
    Bundled { name: "laplace3", source: include_str!("../models/laplace3.ksym") },
    Bundled { name: "navier", source: include_str!("../models/navier.ksym") },
    Bundled { name: "oscillator_k1", source: include_str!("../models/oscillator_k1.ksym") },
];

/// A bundled model by name, with or without the `.ksym` suffix.
pub fn bundled(name: &str) -> Option<&'static Bundled> {
    let stem = name.strip_suffix(".ksym").unwrap_or(name);
    BUNDLED.iter().find(|b| b.name == stem)
}

/// Resolve `--model`: an existing file path wins over a bundled name.
pub fn read_model(arg: &str) -> std::io::Result<(String, String)> {
    let path = std::path::Path::new(arg);
    if path.is_file() {
        return Ok((arg.to_string(), std::fs::read_to_string(path)?));
    }
    match bundled(arg) {
        Some(b) => Ok((b.name.to_string(), b.source.to_string())),
        None => Err(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("`{arg}` is neither a file nor a bundled model"),
        )),
    }
}

/// First comment line of a model source.
pub fn summary(source: &str) -> &str {
    source.lines().find_map(|l| l.strip_prefix('#')).map(str::trim).unwrap_or("")
}
