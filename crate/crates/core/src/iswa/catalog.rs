//! Catalog manifest loading and the taxonomy/region indexes built on it.
//!
//! Manifest layout (UTF-8, one record per line, `#` starts a comment):
//!
//! ```text
//! @manifest version=<text> count=<n>
//! @region <tag> <body|aspect> <scope> [<scope> ...]
//! <code>\t<name>\t<region>\t<k=v;k=v | ->\t<asset path>[\texception]
//! ```
//!
//! Scopes are `C` (a category) or `C-GG` (one group). Asset paths are
//! relative to the manifest directory.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::code::{GlyphId, CATEGORY_COUNT};
use super::region::{AnatomicRegion, RegionKind, Scope};
use crate::raster::{BinaryImage, GrayImage};

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("duplicate glyph id {id} (line {line})")]
    DuplicateId { id: GlyphId, line: usize },
    #[error("glyph {id}: asset {asset} not found")]
    DanglingAsset { id: GlyphId, asset: String },
    #[error("manifest declares {declared} glyphs but contains {found}")]
    CountMismatch { declared: usize, found: usize },
    #[error("line {line}: {reason}")]
    InvalidEntry { line: usize, reason: String },
    #[error("unknown scope {0}")]
    UnknownScope(Scope),
    #[error("unknown region {0}")]
    UnknownRegion(RegionKind),
    #[error("attribute {attribute:?} is not a choice box of this region")]
    UnknownAttribute { attribute: String },
    #[error("option {option:?} is not offered by choice box {attribute:?}")]
    UnknownOption { attribute: String, option: String },
}

/// One catalog entry.
#[derive(Clone, Debug, Serialize)]
pub struct GlyphDescriptor {
    pub id: GlyphId,
    pub name: String,
    pub anatomic_tag: RegionKind,
    /// Set when the glyph is deliberately tagged to a region that does not
    /// link its category.
    pub exception: bool,
    pub filter_attributes: BTreeMap<String, String>,
    pub asset_key: String,
    #[serde(skip)]
    pub image: Arc<BinaryImage>,
}

impl GlyphDescriptor {
    pub fn width(&self) -> u32 {
        self.image.width()
    }

    pub fn height(&self) -> u32 {
        self.image.height()
    }
}

/// Single-selection filter control.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoiceBoxSpec {
    pub attribute: String,
    pub options: Vec<String>,
}

/// Chosen options, at most one per box.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterState {
    choices: BTreeMap<String, String>,
}

impl FilterState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Selects `option` in `attribute`, replacing any previous selection in
    /// that box.
    pub fn choose(&mut self, attribute: impl Into<String>, option: impl Into<String>) {
        self.choices.insert(attribute.into(), option.into());
    }

    pub fn with(mut self, attribute: impl Into<String>, option: impl Into<String>) -> Self {
        self.choose(attribute, option);
        self
    }

    pub fn revoke(&mut self, attribute: &str) -> Option<String> {
        self.choices.remove(attribute)
    }

    pub fn choices(&self) -> impl Iterator<Item = (&str, &str)> {
        self.choices.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategorySummary {
    pub category: u8,
    pub groups: Vec<u8>,
    pub glyph_count: usize,
}

type Hierarchy = BTreeMap<u8, BTreeMap<u8, BTreeMap<u16, Vec<GlyphId>>>>;

/// Immutable, fully indexed ISWA catalog.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    version: String,
    declared_count: usize,
    glyphs: BTreeMap<GlyphId, GlyphDescriptor>,
    hierarchy: Hierarchy,
    by_region: BTreeMap<RegionKind, Vec<GlyphId>>,
    regions: BTreeMap<RegionKind, AnatomicRegion>,
}

/// Loads a manifest file and the assets it references.
pub fn load_catalog(path: &Path) -> Result<Catalog, CatalogError> {
    let text = std::fs::read_to_string(path).map_err(|source| CatalogError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let dir = path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();
    Catalog::from_manifest(&text, |asset| {
        let p = dir.join(asset);
        if !p.is_file() {
            return Ok(None);
        }
        GrayImage::open(&p)
            .map(|g| Some(BinaryImage::from_gray(&g)))
            .map_err(|e| e.to_string())
    })
}

struct Header {
    version: String,
    count: usize,
}

fn parse_header(line: &str, lineno: usize) -> Result<Header, CatalogError> {
    let invalid = |reason: String| CatalogError::InvalidEntry {
        line: lineno,
        reason,
    };
    let mut version = None;
    let mut count = None;
    for field in line.split_whitespace().skip(1) {
        match field.split_once('=') {
            Some(("version", v)) => version = Some(v.to_string()),
            Some(("count", n)) => {
                count = Some(n.parse().map_err(|_| invalid(format!("bad count {n:?}")))?)
            }
            _ => return Err(invalid(format!("unexpected header field {field:?}"))),
        }
    }
    Ok(Header {
        version: version.ok_or_else(|| invalid("header lacks version".into()))?,
        count: count.ok_or_else(|| invalid("header lacks count".into()))?,
    })
}

fn parse_region(line: &str, lineno: usize) -> Result<AnatomicRegion, CatalogError> {
    let invalid = |reason: String| CatalogError::InvalidEntry {
        line: lineno,
        reason,
    };
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() < 4 {
        return Err(invalid("region needs a tag, a kind and at least one scope".into()));
    }
    let kind: RegionKind = fields[1].parse().map_err(invalid)?;
    let declared_body = match fields[2] {
        "body" => true,
        "aspect" => false,
        other => return Err(invalid(format!("region kind must be body or aspect, got {other:?}"))),
    };
    if declared_body != kind.is_body_part() {
        return Err(invalid(format!("{kind} declared with the wrong kind")));
    }
    let mut linked_scopes = Vec::new();
    for s in &fields[3..] {
        let scope: Scope = s.parse().map_err(invalid)?;
        if scope.category() == 0 || scope.category() > CATEGORY_COUNT {
            return Err(invalid(format!("scope {s} outside categories 1..=7")));
        }
        linked_scopes.push(scope);
    }
    Ok(AnatomicRegion {
        kind,
        linked_scopes,
    })
}

impl Catalog {
    /// Builds a catalog from manifest text. `assets` resolves an asset path
    /// to its bitmap, `Ok(None)` when the file does not exist.
    pub fn from_manifest(
        text: &str,
        mut assets: impl FnMut(&str) -> Result<Option<BinaryImage>, String>,
    ) -> Result<Catalog, CatalogError> {
        let mut header = None;
        let mut regions = BTreeMap::new();
        let mut pending = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            if line.starts_with("@manifest") {
                if header.is_some() {
                    return Err(CatalogError::InvalidEntry {
                        line: lineno,
                        reason: "duplicate header".into(),
                    });
                }
                header = Some(parse_header(line, lineno)?);
                continue;
            }
            if header.is_none() {
                return Err(CatalogError::InvalidEntry {
                    line: lineno,
                    reason: "record before @manifest header".into(),
                });
            }
            if line.starts_with("@region") {
                let region = parse_region(line, lineno)?;
                if regions.insert(region.kind, region).is_some() {
                    return Err(CatalogError::InvalidEntry {
                        line: lineno,
                        reason: "region declared twice".into(),
                    });
                }
                continue;
            }
            pending.push((lineno, line));
        }

        let header = header.ok_or(CatalogError::InvalidEntry {
            line: 0,
            reason: "missing @manifest header".into(),
        })?;

        let mut catalog = Catalog {
            version: header.version,
            declared_count: header.count,
            regions,
            ..Catalog::default()
        };

        for (lineno, line) in pending {
            let desc = catalog.parse_glyph_line(line, lineno, &mut assets)?;
            let id = desc.id;
            if catalog.glyphs.insert(id, desc).is_some() {
                return Err(CatalogError::DuplicateId { id, line: lineno });
            }
        }

        if catalog.glyphs.len() != catalog.declared_count {
            return Err(CatalogError::CountMismatch {
                declared: catalog.declared_count,
                found: catalog.glyphs.len(),
            });
        }

        catalog.build_indexes();

        for category in catalog.hierarchy.keys() {
            if !catalog
                .regions
                .values()
                .any(|r| r.linked_scopes.iter().any(|s| s.category() == *category))
            {
                return Err(CatalogError::InvalidEntry {
                    line: 0,
                    reason: format!("category {category} is not linked from any region"),
                });
            }
        }
        Ok(catalog)
    }

    fn parse_glyph_line(
        &self,
        line: &str,
        lineno: usize,
        assets: &mut impl FnMut(&str) -> Result<Option<BinaryImage>, String>,
    ) -> Result<GlyphDescriptor, CatalogError> {
        let invalid = |reason: String| CatalogError::InvalidEntry {
            line: lineno,
            reason,
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if !(5..=6).contains(&fields.len()) {
            return Err(invalid(format!(
                "expected 5 or 6 tab-separated fields, got {}",
                fields.len()
            )));
        }
        let id = GlyphId::parse(fields[0]).map_err(|e| invalid(e.to_string()))?;
        let name = fields[1].trim().to_string();
        if name.is_empty() {
            return Err(invalid("empty glyph name".into()));
        }
        let anatomic_tag: RegionKind = fields[2].parse().map_err(invalid)?;
        let mut filter_attributes = BTreeMap::new();
        if fields[3] != "-" {
            for pair in fields[3].split(';') {
                let (k, v) = pair
                    .split_once('=')
                    .filter(|(k, v)| !k.is_empty() && !v.is_empty())
                    .ok_or_else(|| invalid(format!("bad attribute {pair:?}")))?;
                if filter_attributes.insert(k.to_string(), v.to_string()).is_some() {
                    return Err(invalid(format!("attribute {k:?} repeated")));
                }
            }
        }
        let exception = match fields.get(5) {
            None => false,
            Some(&"exception") => true,
            Some(other) => return Err(invalid(format!("unknown flag {other:?}"))),
        };
        let region = self
            .regions
            .get(&anatomic_tag)
            .ok_or_else(|| invalid(format!("region {anatomic_tag} is not declared")))?;
        if !exception && !region.links(id.category, id.group) {
            return Err(invalid(format!(
                "{id} tagged {anatomic_tag} but that region does not link its group"
            )));
        }
        let asset_key = fields[4].to_string();
        let image = assets(&asset_key)
            .map_err(|e| invalid(format!("asset {asset_key}: {e}")))?
            .ok_or_else(|| CatalogError::DanglingAsset {
                id,
                asset: asset_key.clone(),
            })?;
        if image.is_blank() {
            return Err(invalid(format!("asset {asset_key} has no ink")));
        }
        Ok(GlyphDescriptor {
            id,
            name,
            anatomic_tag,
            exception,
            filter_attributes,
            asset_key,
            image: Arc::new(image),
        })
    }

    fn build_indexes(&mut self) {
        for (id, desc) in &self.glyphs {
            self.hierarchy
                .entry(id.category)
                .or_default()
                .entry(id.group)
                .or_default()
                .entry(id.base)
                .or_default()
                .push(*id);
            self.by_region.entry(desc.anatomic_tag).or_default().push(*id);
        }
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn declared_count(&self) -> usize {
        self.declared_count
    }

    pub fn len(&self) -> usize {
        self.glyphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.glyphs.is_empty()
    }

    pub fn get(&self, id: &GlyphId) -> Option<&GlyphDescriptor> {
        self.glyphs.get(id)
    }

    pub fn contains(&self, id: &GlyphId) -> bool {
        self.glyphs.contains_key(id)
    }

    /// All descriptors in ascending code order.
    pub fn iter(&self) -> impl Iterator<Item = &GlyphDescriptor> {
        self.glyphs.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = GlyphId> + '_ {
        self.glyphs.keys().copied()
    }

    /// Categories with their groups, in ascending order.
    pub fn categories(&self) -> Vec<CategorySummary> {
        self.hierarchy
            .iter()
            .map(|(category, groups)| CategorySummary {
                category: *category,
                groups: groups.keys().copied().collect(),
                glyph_count: groups.values().flat_map(|b| b.values()).map(Vec::len).sum(),
            })
            .collect()
    }

    /// Walks the category→group→base index under `scope`.
    pub fn glyphs_in(&self, scope: Scope) -> Result<Vec<&GlyphDescriptor>, CatalogError> {
        let groups = self
            .hierarchy
            .get(&scope.category())
            .ok_or(CatalogError::UnknownScope(scope))?;
        let ids: Vec<GlyphId> = match scope {
            Scope::Category { .. } => groups
                .values()
                .flat_map(|bases| bases.values().flatten().copied())
                .collect(),
            Scope::Group { group, .. } => groups
                .get(&group)
                .ok_or(CatalogError::UnknownScope(scope))?
                .values()
                .flatten()
                .copied()
                .collect(),
        };
        Ok(ids.iter().map(|id| &self.glyphs[id]).collect())
    }

    pub fn region(&self, kind: RegionKind) -> Option<&AnatomicRegion> {
        self.regions.get(&kind)
    }

    /// Regions and aspect buttons that open at least one glyph, body parts
    /// first.
    pub fn regions_for_puppet(&self) -> Vec<AnatomicRegion> {
        self.regions
            .values()
            .filter(|r| {
                r.linked_scopes.iter().any(|s| match *s {
                    Scope::Category { category } => self.hierarchy.contains_key(&category),
                    Scope::Group { category, group } => self
                        .hierarchy
                        .get(&category)
                        .is_some_and(|g| g.contains_key(&group)),
                })
            })
            .cloned()
            .collect()
    }

    /// Glyphs carrying `region` as their anatomic tag, in code order.
    pub fn region_glyphs(&self, region: RegionKind) -> Result<Vec<&GlyphDescriptor>, CatalogError> {
        if !self.regions.contains_key(&region) {
            return Err(CatalogError::UnknownRegion(region));
        }
        Ok(self
            .by_region
            .get(&region)
            .map(|ids| ids.iter().map(|id| &self.glyphs[id]).collect())
            .unwrap_or_default())
    }

    /// One box per attribute occurring among the region's glyphs; options
    /// are the values that actually occur.
    pub fn choice_boxes_for(&self, region: RegionKind) -> Result<Vec<ChoiceBoxSpec>, CatalogError> {
        let mut boxes: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for desc in self.region_glyphs(region)? {
            for (k, v) in &desc.filter_attributes {
                boxes.entry(k).or_default().insert(v);
            }
        }
        Ok(boxes
            .into_iter()
            .map(|(attribute, values)| {
                let mut options: Vec<String> = values.into_iter().map(String::from).collect();
                options.sort_by(|a, b| option_order(a, b));
                ChoiceBoxSpec {
                    attribute: attribute.to_string(),
                    options,
                }
            })
            .collect())
    }

    /// Region glyphs matching every chosen option.
    pub fn filter_glyphs(
        &self,
        region: RegionKind,
        state: &FilterState,
    ) -> Result<Vec<&GlyphDescriptor>, CatalogError> {
        let boxes = self.choice_boxes_for(region)?;
        for (attribute, option) in state.choices() {
            let spec = boxes
                .iter()
                .find(|b| b.attribute == attribute)
                .ok_or_else(|| CatalogError::UnknownAttribute {
                    attribute: attribute.to_string(),
                })?;
            if !spec.options.iter().any(|o| o == option) {
                return Err(CatalogError::UnknownOption {
                    attribute: attribute.to_string(),
                    option: option.to_string(),
                });
            }
        }
        Ok(self
            .region_glyphs(region)?
            .into_iter()
            .filter(|d| {
                state
                    .choices()
                    .all(|(k, v)| d.filter_attributes.get(k).map(String::as_str) == Some(v))
            })
            .collect())
    }
}

/// Numeric options sort numerically and before non-numeric ones.
fn option_order(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        _ => a.cmp(b),
    }
}
