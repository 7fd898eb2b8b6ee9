use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Input(format!("line {}: expected `key = value`", i + 1)));
        };
        let key = k.trim().replace('-', "_");
        if key.is_empty() {
            return Err(CliError::Input(format!("line {}: empty key", i + 1)));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

pub fn read_kv(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_kv(&text).map_err(|e| match e {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Resolved settings: flag, then config file, then default. Every lookup is
/// recorded for the CSV header.
#[derive(Debug, Default)]
pub struct Settings {
    file: BTreeMap<String, String>,
    used: Vec<(String, String)>,
}

impl Settings {
    pub fn new(file: BTreeMap<String, String>) -> Self {
        Self {
            file,
            used: Vec::new(),
        }
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            Some(p) => Ok(Self::new(read_kv(p)?)),
            None => Ok(Self::default()),
        }
    }

    fn from_file<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        match self.file.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("config key `{key}`: {e}"))),
        }
    }

    pub fn opt<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        let v = match flag {
            Some(v) => Some(v),
            None => self.from_file(key)?,
        };
        if let Some(v) = &v {
            self.used.push((key.to_string(), v.to_string()));
        }
        Ok(v)
    }

    pub fn get<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        match self.opt(key, flag)? {
            Some(v) => Ok(v),
            None => {
                self.used.push((key.to_string(), default.to_string()));
                Ok(default)
            }
        }
    }

    pub fn require<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        self.opt(key, flag)?
            .ok_or_else(|| CliError::Usage(format!("missing required value `{key}` (flag or config file)")))
    }

    /// `key=value` pairs in lookup order.
    pub fn echo(&self) -> String {
        self.used
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// `start:step:stop`, a comma list, or one number.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |m: &str| CliError::Usage(format!("grid `{s}`: {m}"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("not a number"));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, h, b] = parts[..] else {
            return Err(bad("expected start:step:stop"));
        };
        let (start, step, stop) = (num(a)?, num(h)?, num(b)?);
        if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
            return Err(bad("need step > 0 and stop >= start"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize;
        if count > 10_000_000 {
            return Err(bad("too many points"));
        }
        // integer multiples avoid accumulated drift; round away float noise
        Ok((0..=count)
            .map(|i| {
                let v = start + step * i as f64;
                (v * 1e12).round() / 1e12
            })
            .collect())
    } else {
        let v: Vec<f64> = s.split(',').map(num).collect::<Result<_, _>>()?;
        if v.is_empty() {
            return Err(bad("empty"));
        }
        Ok(v)
    }
}

pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("`{s}` is not a list of non-negative integers")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_lines() {
        let m = parse_kv("# header\nn = 128\n\neps-m=1e-5 # trailing\n").unwrap();
        assert_eq!(m["n"], "128");
        assert_eq!(m["eps_m"], "1e-5");
        assert!(parse_kv("novalue\n").is_err());
    }

    #[test]
    fn flags_override_file() {
        let mut s = Settings::new(parse_kv("n = 64\neps = 1e-3").unwrap());
        assert_eq!(s.get("n", Some(128usize), 32).unwrap(), 128);
        assert_eq!(s.get("eps", None, 0.1).unwrap(), 1e-3);
        assert_eq!(s.get("order", None, 64usize).unwrap(), 64);
        assert_eq!(s.echo(), "n=128 eps=0.001 order=64");
        assert!(s.require::<u64>("seed", None).is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:0.25:1").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let g = parse_grid("-2:0.1:8").unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(g[13], -0.7);
        assert_eq!(parse_grid("1,2.5").unwrap(), vec![1.0, 2.5]);
        assert!(parse_grid("1:0:2").is_err());
        assert!(parse_grid("a:b").is_err());
    }
}
