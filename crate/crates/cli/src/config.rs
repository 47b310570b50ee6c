//! Flat `key=value` config files. Keys are the long flag names
//! (`mu`, `iterations`, `grid`, `phi`, `trials`, `seed`, `out`, `full`,
//! `serial`); `#` starts a comment. Flags given on the command line win.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use mbqrw_core::Error;

const KEYS: &[&str] = &["mu", "iterations", "grid", "phi", "trials", "seed", "out", "full", "serial"];

#[derive(Debug, Default, Clone, PartialEq)]
pub struct FileConfig(BTreeMap<String, String>);

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut map = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("config line {}: expected key=value", n + 1)))?;
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(Error::InvalidParameter(format!("config line {}: unknown key '{k}'", n + 1)));
            }
            map.insert(k.to_string(), v.trim().to_string());
        }
        Ok(FileConfig(map))
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, Error> {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| Error::InvalidParameter(format!("config key '{key}': cannot parse '{v}'")))
            })
            .transpose()
    }

    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, Error> {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(|item| {
                        item.trim()
                            .parse::<T>()
                            .map_err(|_| Error::InvalidParameter(format!("config key '{key}': cannot parse '{item}'")))
                    })
                    .collect()
            })
            .transpose()
    }

    pub fn flag(&self, key: &str) -> Result<bool, Error> {
        Ok(self.get::<bool>(key)?.unwrap_or(false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_pairs() {
        let c = FileConfig::parse("# sweep\nmu = 1,10,50\niterations=100\n\nfull=true # big\n").unwrap();
        assert_eq!(c.get_list::<u32>("mu").unwrap(), Some(vec![1, 10, 50]));
        assert_eq!(c.get::<u64>("iterations").unwrap(), Some(100));
        assert!(c.flag("full").unwrap());
        assert!(!c.flag("serial").unwrap());
        assert_eq!(c.get::<u64>("seed").unwrap(), None);
    }

    #[test]
    fn rejects_garbage() {
        assert!(FileConfig::parse("mu").is_err());
        assert!(FileConfig::parse("colour=blue").is_err());
        let c = FileConfig::parse("trials=many").unwrap();
        assert!(c.get::<u64>("trials").is_err());
    }
}
