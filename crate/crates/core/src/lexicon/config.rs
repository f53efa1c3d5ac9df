//! `features.cfg`: feature inventory, aliases, clause flags, extra atoms and
//! morphology routing.
//!
//! ```text
//! feature case nom acc      # attribute and its admissible values
//! feature tense             # no values listed: any value admissible
//! alias mode vform          # tree feature `mode` is stored as `vform`
//! flag INTRANS INTRANSger   # bare clause labels usable as #tags
//! atom VP                   # extend the atom inventory
//! route V num NP0           # morph `num` of a V goes to atom NP0
//! ```

use std::collections::{BTreeMap, BTreeSet};

use crate::category::AtomInventory;

use super::LexiconError;

const DEFAULT_FEATURES: &[(&str, &[&str])] = &[
    ("case", &["nom", "acc", "gen"]),
    ("num", &["sg", "pl"]),
    ("pers", &["1", "2", "3"]),
    ("vform", &["ind", "inf", "ger", "ppart", "base"]),
    ("tense", &["pres", "past"]),
    ("wh", &["+", "-"]),
    ("bar", &["+", "-"]),
    ("comp", &["that", "for", "whether", "none"]),
    ("pron", &["+", "-"]),
    ("refl", &["+", "-"]),
    ("inv", &["+", "-"]),
    ("conj-head", &["and", "or", "but"]),
    ("passive", &["+", "-"]),
];

/// Where a morphological feature lands inside a category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomRef {
    pub label: String,
    pub arg_index: Option<u8>,
}

impl AtomRef {
    pub fn parse(text: &str) -> Option<Self> {
        let (label, arg_index) = match text.chars().last() {
            Some(c) if c.is_ascii_digit() => (&text[..text.len() - 1], Some(c as u8 - b'0')),
            _ => (text, None),
        };
        if label.is_empty() || !label.chars().all(|c| c.is_ascii_alphabetic()) {
            return None;
        }
        Some(AtomRef {
            label: label.to_string(),
            arg_index,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureConfig {
    features: BTreeMap<String, BTreeSet<String>>,
    aliases: BTreeMap<String, String>,
    flags: BTreeSet<String>,
    atoms: AtomInventory,
    routes: BTreeMap<(String, String), AtomRef>,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        let mut cfg = FeatureConfig::empty();
        for (name, values) in DEFAULT_FEATURES {
            cfg.features
                .insert(name.to_string(), values.iter().map(|v| v.to_string()).collect());
        }
        cfg.aliases.insert("mode".into(), "vform".into());
        cfg
    }
}

/// Outcome of reading a `#tag`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TagMeaning {
    Flag(String),
    Feature {
        target: AtomRef,
        attr: String,
        value: String,
    },
}

impl FeatureConfig {
    /// No features, no flags, default atoms.
    pub fn empty() -> Self {
        FeatureConfig {
            features: BTreeMap::new(),
            aliases: BTreeMap::new(),
            flags: BTreeSet::new(),
            atoms: AtomInventory::default(),
            routes: BTreeMap::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut cfg = FeatureConfig::empty();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            let err = |message: String| LexiconError::Features { line: i + 1, message };
            let mut words = line.split_whitespace();
            let Some(key) = words.next() else { continue };
            let rest: Vec<&str> = words.collect();
            match key {
                "feature" => {
                    let (name, values) = rest
                        .split_first()
                        .ok_or_else(|| err("feature needs a name".into()))?;
                    cfg.features
                        .insert(name.to_string(), values.iter().map(|v| v.to_string()).collect());
                }
                "alias" => match rest.as_slice() {
                    [from, to] => {
                        cfg.aliases.insert(from.to_string(), to.to_string());
                    }
                    _ => return Err(err("alias takes two names".into())),
                },
                "flag" => cfg.flags.extend(rest.iter().map(|s| s.to_string())),
                "atom" => {
                    for label in rest {
                        if !label.chars().all(|c| c.is_ascii_alphabetic()) || label.is_empty() {
                            return Err(err(format!("bad atom label '{label}'")));
                        }
                        cfg.atoms.add(label);
                    }
                }
                "route" => match rest.as_slice() {
                    [pos, attr, target] => {
                        let target = AtomRef::parse(target)
                            .ok_or_else(|| err(format!("bad route target '{target}'")))?;
                        cfg.routes.insert((pos.to_string(), attr.to_string()), target);
                    }
                    _ => return Err(err("route takes POS ATTR ATOM".into())),
                },
                other => return Err(err(format!("unknown directive '{other}'"))),
            }
        }
        for (from, to) in &cfg.aliases {
            if !cfg.features.contains_key(to) {
                return Err(LexiconError::Features {
                    line: 0,
                    message: format!("alias '{from}' points at undeclared feature '{to}'"),
                });
            }
        }
        Ok(cfg)
    }

    pub fn atoms(&self) -> &AtomInventory {
        &self.atoms
    }

    pub fn feature_names(&self) -> impl Iterator<Item = &str> {
        self.features.keys().map(String::as_str)
    }

    pub fn feature_count(&self) -> usize {
        self.features.len()
    }

    pub fn is_flag(&self, name: &str) -> bool {
        self.flags.contains(name)
    }

    /// Canonical attribute name after aliasing, if declared.
    pub fn canonical_attr<'a>(&'a self, attr: &'a str) -> Option<&'a str> {
        let name = self.aliases.get(attr).map(String::as_str).unwrap_or(attr);
        self.features.contains_key(name).then_some(name)
    }

    /// True when `value` is admissible for the (canonical) attribute.
    pub fn admits(&self, attr: &str, value: &str) -> bool {
        match self.features.get(attr) {
            Some(values) => values.is_empty() || values.contains(value),
            None => false,
        }
    }

    pub fn route(&self, pos: &str, attr: &str) -> Option<&AtomRef> {
        self.routes.get(&(pos.to_string(), attr.to_string()))
    }

    /// Reads a tag body (without `#`): a declared flag, or
    /// `LABEL[digit]ATTRVALUE` with the attribute taken as the longest
    /// declared feature name that leaves an admissible value.
    pub fn resolve_tag(&self, tag: &str) -> Option<TagMeaning> {
        if self.flags.contains(tag) {
            return Some(TagMeaning::Flag(tag.to_string()));
        }
        let mut labels: Vec<&str> = self.atoms.labels().filter(|l| tag.starts_with(l)).collect();
        labels.sort_by_key(|l| std::cmp::Reverse(l.len()));
        for label in labels {
            let rest = &tag[label.len()..];
            let (arg_index, rest) = match rest.chars().next() {
                Some(c) if c.is_ascii_digit() => (Some(c as u8 - b'0'), &rest[1..]),
                _ => (None, rest),
            };
            let mut names: Vec<&str> = self
                .features
                .keys()
                .chain(self.aliases.keys())
                .map(String::as_str)
                .filter(|n| rest.starts_with(n))
                .collect();
            names.sort_by_key(|n| std::cmp::Reverse(n.len()));
            for name in names {
                let value = &rest[name.len()..];
                let Some(attr) = self.canonical_attr(name) else { continue };
                if !value.is_empty() && self.admits(attr, value) {
                    return Some(TagMeaning::Feature {
                        target: AtomRef {
                            label: label.to_string(),
                            arg_index,
                        },
                        attr: attr.to_string(),
                        value: value.to_string(),
                    });
                }
            }
        }
        None
    }

    /// Writes the config back in its file syntax.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for (name, values) in &self.features {
            let vals: Vec<&str> = values.iter().map(String::as_str).collect();
            out.push_str(format!("feature {name} {}", vals.join(" ")).trim_end());
            out.push('\n');
        }
        for (from, to) in &self.aliases {
            out.push_str(&format!("alias {from} {to}\n"));
        }
        if !self.flags.is_empty() {
            let flags: Vec<&str> = self.flags.iter().map(String::as_str).collect();
            out.push_str(&format!("flag {}\n", flags.join(" ")));
        }
        let defaults = AtomInventory::default();
        for label in self.atoms.labels().filter(|l| !defaults.contains(l)) {
            out.push_str(&format!("atom {label}\n"));
        }
        for ((pos, attr), target) in &self.routes {
            let idx = target.arg_index.map(|i| i.to_string()).unwrap_or_default();
            out.push_str(&format!("route {pos} {attr} {}{idx}\n", target.label));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> FeatureConfig {
        FeatureConfig::parse(
            "feature case nom acc\nfeature conj-head and or\nfeature bar + -\nfeature num sg pl\n\
             alias mode vform\nfeature vform ind inf\nflag INTRANS INTRANSger\nroute V num NP0\n",
        )
        .unwrap()
    }

    #[test]
    fn default_inventory_has_thirteen_features() {
        assert_eq!(FeatureConfig::default().feature_count(), 13);
    }

    #[test]
    fn tags() {
        let c = cfg();
        assert_eq!(c.resolve_tag("INTRANS"), Some(TagMeaning::Flag("INTRANS".into())));
        assert_eq!(
            c.resolve_tag("NP1caseacc"),
            Some(TagMeaning::Feature {
                target: AtomRef {
                    label: "NP".into(),
                    arg_index: Some(1)
                },
                attr: "case".into(),
                value: "acc".into()
            })
        );
        assert_eq!(
            c.resolve_tag("Sbar-"),
            Some(TagMeaning::Feature {
                target: AtomRef {
                    label: "S".into(),
                    arg_index: None
                },
                attr: "bar".into(),
                value: "-".into()
            })
        );
        assert!(matches!(c.resolve_tag("Smodeind"), Some(TagMeaning::Feature { attr, .. }) if attr == "vform"));
        assert!(matches!(c.resolve_tag("Nconj-headand"), Some(TagMeaning::Feature { attr, .. }) if attr == "conj-head"));
        assert_eq!(c.resolve_tag("NP1casedat"), None);
        assert_eq!(c.resolve_tag("TRANS"), None);
    }

    #[test]
    fn routes_and_errors() {
        let c = cfg();
        assert_eq!(
            c.route("V", "num"),
            Some(&AtomRef {
                label: "NP".into(),
                arg_index: Some(0)
            })
        );
        assert!(matches!(
            FeatureConfig::parse("feature a\nbogus x\n"),
            Err(LexiconError::Features { line: 2, .. })
        ));
        assert!(FeatureConfig::parse("alias mode vform\n").is_err());
    }

    #[test]
    fn config_round_trip() {
        let c = cfg();
        assert_eq!(FeatureConfig::parse(&c.to_config_string()).unwrap(), c);
    }
}
