//! Flat morphology table: `surface TAB lemma TAB pos TAB attr=val,...`.

use super::config::FeatureConfig;
use super::LexiconError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphEntry {
    pub surface: String,
    pub lemma: String,
    pub pos: String,
    /// Canonical attribute names, file order.
    pub features: Vec<(String, String)>,
}

pub fn load_morph_db(text: &str, cfg: &FeatureConfig) -> Result<Vec<MorphEntry>, LexiconError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| LexiconError::Morph { line: n, message };
        let fields: Vec<&str> = line.split('\t').collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(err(format!("expected 3 or 4 tab-separated fields, got {}", fields.len())));
        }
        let (surface, lemma, pos) = (fields[0].trim(), fields[1].trim(), fields[2].trim());
        if surface.is_empty() || lemma.is_empty() || pos.is_empty() {
            return Err(err("empty surface, lemma or POS".into()));
        }
        let mut features = Vec::new();
        let feats = fields.get(3).map(|s| s.trim()).unwrap_or("");
        if !feats.is_empty() && feats != "-" {
            for item in feats.split(',') {
                let (attr, value) = item
                    .split_once('=')
                    .ok_or_else(|| err(format!("expected attr=value, got '{item}'")))?;
                let (attr, value) = (attr.trim(), value.trim());
                let canon = cfg
                    .canonical_attr(attr)
                    .ok_or_else(|| err(format!("undeclared feature '{attr}'")))?;
                if !cfg.admits(canon, value) {
                    return Err(err(format!("value '{value}' not admissible for '{canon}'")));
                }
                features.push((canon.to_string(), value.to_string()));
            }
        }
        out.push(MorphEntry {
            surface: surface.to_string(),
            lemma: lemma.to_string(),
            pos: pos.to_string(),
            features,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_rows() {
        let cfg = FeatureConfig::default();
        let m = load_morph_db(
            "# surface lemma pos feats\nsandwiches\tsandwich\tN\tnum=pl\nand\tand\tConj\n\nsaw\tsee\tV\ttense=past,mode=ind\n",
            &cfg,
        )
        .unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m[0].features, [("num".to_string(), "pl".to_string())]);
        assert!(m[1].features.is_empty());
        assert_eq!(m[2].features[1], ("vform".to_string(), "ind".to_string()));
    }

    #[test]
    fn rejects_undeclared_features() {
        let cfg = FeatureConfig::default();
        assert!(matches!(
            load_morph_db("x\tx\tN\tcolour=red\n", &cfg),
            Err(LexiconError::Morph { line: 1, .. })
        ));
        assert!(load_morph_db("x\tx\tN\tnum=dual\n", &cfg).is_err());
        assert!(load_morph_db("x x N\n", &cfg).is_err());
    }
}
