use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Entry points of the anatomic search: body parts on the puppet, and the
/// signing aspects shown as buttons below it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionKind {
    Head,
    Face,
    Shoulders,
    Arm,
    Hand,
    Torso,
    Movement,
    Contact,
    Dynamics,
    Punctuation,
}

impl RegionKind {
    pub const ALL: [RegionKind; 10] = [
        RegionKind::Head,
        RegionKind::Face,
        RegionKind::Shoulders,
        RegionKind::Arm,
        RegionKind::Hand,
        RegionKind::Torso,
        RegionKind::Movement,
        RegionKind::Contact,
        RegionKind::Dynamics,
        RegionKind::Punctuation,
    ];

    pub fn is_body_part(self) -> bool {
        !matches!(
            self,
            RegionKind::Movement | RegionKind::Contact | RegionKind::Dynamics | RegionKind::Punctuation
        )
    }

    pub fn tag(self) -> &'static str {
        match self {
            RegionKind::Head => "head",
            RegionKind::Face => "face",
            RegionKind::Shoulders => "shoulders",
            RegionKind::Arm => "arm",
            RegionKind::Hand => "hand",
            RegionKind::Torso => "torso",
            RegionKind::Movement => "movement",
            RegionKind::Contact => "contact",
            RegionKind::Dynamics => "dynamics",
            RegionKind::Punctuation => "punctuation",
        }
    }
}

impl fmt::Display for RegionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for RegionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RegionKind::ALL
            .into_iter()
            .find(|r| r.tag() == s)
            .ok_or_else(|| format!("unknown region {s:?}"))
    }
}

/// A category, or a single group inside a category.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scope {
    Category { category: u8 },
    Group { category: u8, group: u8 },
}

impl Scope {
    pub fn category(&self) -> u8 {
        match *self {
            Scope::Category { category } | Scope::Group { category, .. } => category,
        }
    }

    pub fn covers(&self, category: u8, group: u8) -> bool {
        match *self {
            Scope::Category { category: c } => c == category,
            Scope::Group { category: c, group: g } => c == category && g == group,
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Category { category } => write!(f, "{category}"),
            Scope::Group { category, group } => write!(f, "{category}-{group:02}"),
        }
    }
}

impl FromStr for Scope {
    type Err = String;

    /// `C` or `C-GG`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("bad scope {s:?}");
        match s.split_once('-') {
            None => Ok(Scope::Category {
                category: s.parse().map_err(|_| bad())?,
            }),
            Some((c, g)) => Ok(Scope::Group {
                category: c.parse().map_err(|_| bad())?,
                group: g.parse().map_err(|_| bad())?,
            }),
        }
    }
}

/// A puppet area or aspect button with the catalog scopes it opens.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnatomicRegion {
    pub kind: RegionKind,
    pub linked_scopes: Vec<Scope>,
}

impl AnatomicRegion {
    pub fn links(&self, category: u8, group: u8) -> bool {
        self.linked_scopes.iter().any(|s| s.covers(category, group))
    }
}
