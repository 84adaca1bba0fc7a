//! Run configuration: profile defaults, then the key=value file, then flags.

use std::path::PathBuf;

use btstrata_core::suites::{Profile, SuiteConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Format, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format {s:?} (json or csv)")),
        }
    }
}

pub fn parse_profile(s: &str) -> Result<Profile, String> {
    match s {
        "desk" => Ok(Profile::Desk),
        "deep" => Ok(Profile::Deep),
        _ => Err(format!("unknown profile {s:?} (desk or deep)")),
    }
}

/// Every field is optional so that file values and flags can be layered.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub h: Option<u32>,
    pub p: Option<u32>,
    pub r: Option<u32>,
    pub m_max: Option<u32>,
    pub window: Option<u32>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub profile: Option<Profile>,
}

impl Overrides {
    /// Values set in `top` win.
    pub fn layer(self, top: Overrides) -> Overrides {
        Overrides {
            n: top.n.or(self.n),
            h: top.h.or(self.h),
            p: top.p.or(self.p),
            r: top.r.or(self.r),
            m_max: top.m_max.or(self.m_max),
            window: top.window.or(self.window),
            seed: top.seed.or(self.seed),
            out: top.out.or(self.out),
            format: top.format.or(self.format),
            profile: top.profile.or(self.profile),
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("bad value {v:?} for {key}"))
}

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<Overrides, String> {
    let mut o = Overrides::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", lineno + 1))?;
        let (k, v) = (k.trim(), v.trim());
        match k {
            "n" => o.n = Some(num(k, v)?),
            "h" => o.h = Some(num(k, v)?),
            "p" => o.p = Some(num(k, v)?),
            "r" => o.r = Some(num(k, v)?),
            "mmax" | "m_max" => o.m_max = Some(num(k, v)?),
            "window" => o.window = Some(num(k, v)?),
            "seed" => o.seed = Some(num(k, v)?),
            "out" => o.out = Some(PathBuf::from(v)),
            "format" => o.format = Some(v.parse()?),
            "profile" => o.profile = Some(parse_profile(v)?),
            _ => return Err(format!("line {}: unknown key {k:?}", lineno + 1)),
        }
    }
    Ok(o)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub suite: SuiteConfig,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn resolve(o: Overrides) -> Result<RunConfig, String> {
        let mut suite = match o.profile.unwrap_or(Profile::Desk) {
            Profile::Desk => SuiteConfig::desk(),
            Profile::Deep => SuiteConfig::deep(),
        };
        if let Some(r) = o.r {
            // The lattice side lives over Z_p, so the residue field is F_p.
            if r != 1 {
                return Err(format!("only r = 1 is supported, got r = {r}"));
            }
        }
        suite.n = o.n.or(suite.n);
        suite.h = o.h.or(suite.h);
        suite.p = o.p.unwrap_or(suite.p);
        suite.m_max = o.m_max.unwrap_or(suite.m_max);
        suite.window = o.window.or(suite.window);
        suite.seed = o.seed.unwrap_or(suite.seed);
        suite.validate().map_err(|e| e.to_string())?;
        Ok(RunConfig { suite, out: o.out, format: o.format.unwrap_or(Format::Json) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let file = parse_config_file("# desk run\nn = 4\nh=1\nseed = 7 # trailing\nformat = csv\n").unwrap();
        let flags = Overrides { h: Some(0), ..Overrides::default() };
        let cfg = RunConfig::resolve(file.layer(flags)).unwrap();
        assert_eq!((cfg.suite.n, cfg.suite.h, cfg.suite.seed), (Some(4), Some(0), 7));
        assert_eq!(cfg.format, Format::Csv);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_config_file("n 4").is_err());
        assert!(parse_config_file("colour = red").is_err());
        assert!(parse_config_file("n = four").is_err());
        let pi_modular = Overrides { n: Some(4), h: Some(2), ..Overrides::default() };
        assert!(RunConfig::resolve(pi_modular).unwrap_err().contains("excluded"));
        assert!(RunConfig::resolve(Overrides { r: Some(2), ..Overrides::default() }).is_err());
    }

    #[test]
    fn deep_profile_defaults() {
        let cfg = RunConfig::resolve(Overrides { profile: Some(Profile::Deep), ..Overrides::default() }).unwrap();
        assert_eq!((cfg.suite.n, cfg.suite.m_max), (Some(6), 3));
    }
}
