//! Option resolution: built-in defaults, then the config file section, then
//! flags given on the command line.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;

/// Everything read from `--config`.
#[derive(Default)]
pub struct ConfigFile {
    root: Map<String, Value>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        match serde_json::from_str(&text) {
            Ok(Value::Object(root)) => Ok(ConfigFile { root }),
            Ok(_) => Err(CliError::Usage(format!("{}: config must be a JSON object", path.display())).into()),
            Err(e) => Err(CliError::Usage(format!("{}: {e}", path.display())).into()),
        }
    }

    pub fn seed(&self) -> Result<Option<u64>> {
        match self.root.get("seed") {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(Some)
                .ok_or_else(|| CliError::Usage("config 'seed' must be a non-negative integer".into()).into()),
        }
    }

    pub fn out_dir(&self) -> Option<PathBuf> {
        self.root.get("out_dir").and_then(Value::as_str).map(PathBuf::from)
    }

    fn section(&self, name: &str) -> Option<&Map<String, Value>> {
        self.root.get(name).and_then(Value::as_object)
    }
}

/// Copies non-null entries of `top` over `base`.
fn overlay(base: &mut Map<String, Value>, top: &Map<String, Value>) {
    for (k, v) in top {
        if !v.is_null() {
            base.insert(k.clone(), v.clone());
        }
    }
}

/// Options of one subcommand; `defaults` may depend on `paper_scale`.
pub trait Resolvable: Serialize + DeserializeOwned {
    const SECTION: &'static str;
    fn defaults(paper_scale: bool) -> Self;
}

pub fn resolve<T: Resolvable>(file: &ConfigFile, flags: &impl Serialize) -> Result<T> {
    let Value::Object(flags) = serde_json::to_value(flags)? else { unreachable!("flag structs serialize to objects") };
    let mut given = Map::new();
    if let Some(section) = file.section(T::SECTION) {
        overlay(&mut given, section);
    }
    overlay(&mut given, &flags);
    let paper_scale = given.get("paper_scale").and_then(Value::as_bool).unwrap_or(false);
    let Value::Object(mut merged) = serde_json::to_value(T::defaults(paper_scale))? else {
        unreachable!("option structs serialize to objects")
    };
    for k in given.keys() {
        if !merged.contains_key(k) {
            return Err(CliError::Usage(format!("unknown option '{k}' in section '{}'", T::SECTION)).into());
        }
    }
    overlay(&mut merged, &given);
    serde_json::from_value(Value::Object(merged))
        .map_err(|e| CliError::Usage(format!("invalid '{}' options: {e}", T::SECTION)).into())
}

/// The resolved options of a run, written next to its outputs.
#[derive(Serialize)]
pub struct Echo<'a, T: Serialize> {
    pub command: &'a str,
    pub seed: u64,
    pub options: &'a T,
}

pub fn is_false(b: &bool) -> bool {
    !*b
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Serialize, Deserialize, Debug, PartialEq)]
    struct Opts {
        size: usize,
        name: String,
        paper_scale: bool,
    }

    impl Resolvable for Opts {
        const SECTION: &'static str = "demo";
        fn defaults(paper_scale: bool) -> Self {
            Opts { size: if paper_scale { 100 } else { 10 }, name: "a".into(), paper_scale }
        }
    }

    #[derive(Serialize)]
    struct Flags {
        size: Option<usize>,
        #[serde(skip_serializing_if = "is_false")]
        paper_scale: bool,
    }

    fn file(json: &str) -> ConfigFile {
        let Value::Object(root) = serde_json::from_str(json).unwrap() else { panic!() };
        ConfigFile { root }
    }

    #[test]
    fn precedence() {
        let none = Flags { size: None, paper_scale: false };
        let o: Opts = resolve(&ConfigFile::default(), &none).unwrap();
        assert_eq!(o, Opts { size: 10, name: "a".into(), paper_scale: false });

        let f = file(r#"{"demo": {"size": 20, "name": "b"}}"#);
        let o: Opts = resolve(&f, &none).unwrap();
        assert_eq!((o.size, o.name.as_str()), (20, "b"));
        let o: Opts = resolve(&f, &Flags { size: Some(30), paper_scale: false }).unwrap();
        assert_eq!((o.size, o.name.as_str()), (30, "b"));
    }

    #[test]
    fn paper_scale_changes_defaults_only() {
        let o: Opts = resolve(&ConfigFile::default(), &Flags { size: None, paper_scale: true }).unwrap();
        assert_eq!(o.size, 100);
        let f = file(r#"{"demo": {"paper_scale": true, "size": 7}}"#);
        let o: Opts = resolve(&f, &Flags { size: None, paper_scale: false }).unwrap();
        assert_eq!((o.size, o.paper_scale), (7, true));
    }

    #[test]
    fn bad_input_is_a_usage_error() {
        let none = Flags { size: None, paper_scale: false };
        for json in [r#"{"demo": {"sise": 1}}"#, r#"{"demo": {"size": "big"}}"#] {
            let err = resolve::<Opts>(&file(json), &none).unwrap_err();
            assert!(matches!(err.downcast_ref::<CliError>(), Some(CliError::Usage(_))), "{json}");
        }
        assert!(file(r#"{"seed": -1}"#).seed().is_err());
        assert_eq!(file(r#"{"seed": 4}"#).seed().unwrap(), Some(4));
    }
}
