//! Numerical defaults, optionally overridden by a `key=value` file named in
//! `CORNER_SPECTRUM_CONFIG`. Command-line flags override both.

use std::path::Path;

use corner_spectrum::{Error, Result};

pub const CONFIG_ENV: &str = "CORNER_SPECTRUM_CONFIG";

#[derive(Debug, Clone, PartialEq)]
pub struct Defaults {
    pub t_min: f64,
    pub t_max: f64,
    pub grid_t: usize,
    pub eta_max: f64,
    pub grid_eta: usize,
    pub grid_theta: usize,
    pub guard: f64,
    pub residue_nodes: usize,
    pub residue_tolerance: f64,
    pub band: [f64; 3],
    pub profile_nodes: usize,
}

impl Default for Defaults {
    fn default() -> Self {
        Self {
            t_min: -12.0,
            t_max: 6.0,
            grid_t: 4096,
            eta_max: 128.0,
            grid_eta: 4096,
            grid_theta: 64,
            guard: 0.01,
            residue_nodes: 128,
            residue_tolerance: 1e-6,
            band: [-1.0, 2.0, 5.0],
            profile_nodes: 512,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Parse(format!("config line {line}: bad value `{value}` for `{key}`")))
}

impl Defaults {
    /// Defaults with the overrides of the configuration file, if any.
    pub fn load() -> Result<Self> {
        match std::env::var_os(CONFIG_ENV) {
            Some(path) => Self::from_file(Path::new(&path)),
            None => Ok(Self::default()),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut d = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected key=value", i + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let n = i + 1;
            match key {
                "t_min" => d.t_min = parse_value(key, value, n)?,
                "t_max" => d.t_max = parse_value(key, value, n)?,
                "grid_t" => d.grid_t = parse_value(key, value, n)?,
                "eta_max" => d.eta_max = parse_value(key, value, n)?,
                "grid_eta" => d.grid_eta = parse_value(key, value, n)?,
                "grid_theta" => d.grid_theta = parse_value(key, value, n)?,
                "guard" => d.guard = parse_value(key, value, n)?,
                "residue_nodes" => d.residue_nodes = parse_value(key, value, n)?,
                "residue_tolerance" => d.residue_tolerance = parse_value(key, value, n)?,
                "band_re_min" => d.band[0] = parse_value(key, value, n)?,
                "band_re_max" => d.band[1] = parse_value(key, value, n)?,
                "band_im_max" => d.band[2] = parse_value(key, value, n)?,
                "profile_nodes" => d.profile_nodes = parse_value(key, value, n)?,
                _ => return Err(Error::Parse(format!("config line {n}: unknown key `{key}`"))),
            }
        }
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_and_comments() {
        let d = Defaults::parse("# grids\ngrid_t = 1024\n\neta_max=64 # shorter\nband_im_max = 3\n").unwrap();
        assert_eq!(d.grid_t, 1024);
        assert_eq!(d.eta_max, 64.0);
        assert_eq!(d.band, [-1.0, 2.0, 3.0]);
        assert_eq!(d.grid_eta, Defaults::default().grid_eta);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(Defaults::parse("grid_q = 3").is_err());
        assert!(Defaults::parse("grid_t = many").is_err());
        assert!(Defaults::parse("grid_t").is_err());
    }
}
