use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::kdd99;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LabelMode {
    #[default]
    Binary,
    Category5,
}

pub const BINARY_CLASSES: [&str; 2] = ["normal", "attack"];
pub const CATEGORY5_CLASSES: [&str; 5] = ["normal", "dos", "probe", "r2l", "u2r"];

/// Strips surrounding whitespace and one trailing period, then lowercases.
pub fn canonical_label(text: &str) -> String {
    let t = text.trim();
    t.strip_suffix('.').unwrap_or(t).to_lowercase()
}

/// Maps raw label text to a class index. Class 0 is always `normal`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelScheme {
    pub mode: LabelMode,
    /// attack name -> category, used by `Category5` only.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attack_map: BTreeMap<String, String>,
}

impl LabelScheme {
    pub fn binary() -> Self {
        LabelScheme {
            mode: LabelMode::Binary,
            attack_map: BTreeMap::new(),
        }
    }

    pub fn category5_kdd99() -> Self {
        Self::category5_from_text(kdd99::ATTACK_CATEGORIES).expect("built-in attack map is valid")
    }

    pub fn for_mode(mode: LabelMode) -> Self {
        match mode {
            LabelMode::Binary => Self::binary(),
            LabelMode::Category5 => Self::category5_kdd99(),
        }
    }

    /// Parses an attack map: one `attack category` pair per line (whitespace
    /// or `,` separated), `#` comments allowed.
    pub fn category5_from_text(text: &str) -> Result<Self> {
        let mut attack_map = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty());
            let (Some(attack), Some(category), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse {
                    row: lineno + 1,
                    message: format!("expected `attack category`, got {line:?}"),
                });
            };
            let category = canonical_label(category);
            if !CATEGORY5_CLASSES[1..].contains(&category.as_str()) {
                return Err(Error::Parse {
                    row: lineno + 1,
                    message: format!("unknown attack category {category:?}"),
                });
            }
            attack_map.insert(canonical_label(attack), category);
        }
        Ok(LabelScheme {
            mode: LabelMode::Category5,
            attack_map,
        })
    }

    pub fn category5_from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::category5_from_text(&text)
    }

    pub fn class_names(&self) -> Vec<String> {
        match self.mode {
            LabelMode::Binary => BINARY_CLASSES.iter().map(|s| s.to_string()).collect(),
            LabelMode::Category5 => CATEGORY5_CLASSES.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn classify(&self, raw: &str) -> Option<usize> {
        let label = canonical_label(raw);
        if label.is_empty() {
            return None;
        }
        if label == "normal" {
            return Some(0);
        }
        match self.mode {
            LabelMode::Binary => Some(1),
            LabelMode::Category5 => {
                let category = self.attack_map.get(&label).map(String::as_str).unwrap_or(label.as_str());
                CATEGORY5_CLASSES.iter().position(|&c| c == category).filter(|&i| i > 0)
            }
        }
    }
}
