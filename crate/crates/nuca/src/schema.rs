//! JSON files for rule sets, distributions, templates and configurations.

use std::fs;
use std::path::{Path, PathBuf};

use nuca_core::dist::Substitutive;
use nuca_core::rule::{LinearForm, TrackForm};
use nuca_core::{
    Alphabet, Configuration, Distribution, FiniteSupport, LocalRule, Neighborhood, Point, RuleId,
    RuleSet, State, Template,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum SchemaError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: {key}: {message}")]
    Invalid {
        path: PathBuf,
        key: String,
        message: String,
    },
}

fn invalid(path: &Path, key: &str, message: impl ToString) -> SchemaError {
    SchemaError::Invalid {
        path: path.to_path_buf(),
        key: key.to_string(),
        message: message.to_string(),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, SchemaError> {
    let text = fs::read_to_string(path).map_err(|source| SchemaError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_json(path, &text)
}

/// Parse `text` as the file at `path` (used in messages only).
pub fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, SchemaError> {
    serde_json::from_str(text).map_err(|source| SchemaError::Json {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphabetSpec {
    pub tracks: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OffsetSpec {
    Line(i64),
    Plane([i64; 2]),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackSpec {
    pub terms: Vec<[usize; 2]>,
    #[serde(rename = "const", default)]
    pub constant: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LinearSpec {
    Single(TrackSpec),
    Tracks(Vec<TrackSpec>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<State>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear: Option<LinearSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RulesFile {
    pub alphabet: AlphabetSpec,
    pub neighborhood: Vec<OffsetSpec>,
    pub rules: Vec<RuleSpec>,
}

impl RulesFile {
    pub fn to_ruleset(&self, path: &Path) -> Result<RuleSet, SchemaError> {
        let alphabet = Alphabet::new(self.alphabet.tracks.clone())
            .map_err(|e| invalid(path, "alphabet.tracks", e))?;
        let dims: Vec<u8> = self
            .neighborhood
            .iter()
            .map(|o| match o {
                OffsetSpec::Line(_) => 1,
                OffsetSpec::Plane(_) => 2,
            })
            .collect();
        let dim = dims.first().copied().unwrap_or(1);
        if dims.iter().any(|&d| d != dim) {
            return Err(invalid(path, "neighborhood", "mixes 1-D and 2-D offsets"));
        }
        let offsets = self
            .neighborhood
            .iter()
            .map(|o| match *o {
                OffsetSpec::Line(x) => Point::line(x),
                OffsetSpec::Plane([x, y]) => Point::new(x, y),
            })
            .collect();
        let neighborhood = Neighborhood::new(dim, offsets).map_err(|e| invalid(path, "neighborhood", e))?;
        let arity = neighborhood.arity();
        let mut rules = Vec::with_capacity(self.rules.len());
        for (k, spec) in self.rules.iter().enumerate() {
            let rule = match (&spec.table, &spec.linear) {
                (Some(table), None) => LocalRule::from_table(alphabet.clone(), arity, table.clone())
                    .map_err(|e| invalid(path, &format!("rules[{k}].table"), e))?,
                (None, Some(linear)) => {
                    let tracks = match linear {
                        LinearSpec::Single(t) => vec![t.clone()],
                        LinearSpec::Tracks(ts) => ts.clone(),
                    };
                    let mut forms = Vec::with_capacity(tracks.len());
                    for t in tracks {
                        if t.constant > 1 {
                            return Err(invalid(path, &format!("rules[{k}].linear.const"), "must be 0 or 1"));
                        }
                        forms.push(TrackForm::new(
                            t.terms.iter().map(|&[i, u]| (i, u)).collect(),
                            t.constant == 1,
                        ));
                    }
                    LocalRule::from_linear(alphabet.clone(), arity, LinearForm::new(forms))
                        .map_err(|e| invalid(path, &format!("rules[{k}].linear"), e))?
                }
                _ => {
                    return Err(invalid(
                        path,
                        &format!("rules[{k}]"),
                        "exactly one of \"table\" and \"linear\" is required",
                    ))
                }
            };
            rules.push(rule);
        }
        let names = self.rules.iter().map(|r| r.name.clone()).collect();
        RuleSet::new(alphabet, neighborhood, rules, names).map_err(|e| invalid(path, "rules", e))
    }

    /// Linear rules are written as forms, the rest as tables.
    pub fn from_ruleset(rules: &RuleSet) -> Self {
        let neighborhood = rules
            .neighborhood()
            .offsets()
            .iter()
            .map(|p| {
                if rules.neighborhood().dim() == 1 {
                    OffsetSpec::Line(p.x)
                } else {
                    OffsetSpec::Plane([p.x, p.y])
                }
            })
            .collect();
        let specs = rules
            .rules()
            .iter()
            .zip(rules.names())
            .map(|(rule, name)| match rule.linear_form() {
                Some(form) => {
                    let mut tracks: Vec<TrackSpec> = form
                        .tracks
                        .iter()
                        .map(|t| TrackSpec {
                            terms: t.terms.iter().map(|&(i, u)| [i, u]).collect(),
                            constant: t.constant as u8,
                        })
                        .collect();
                    let linear = if tracks.len() == 1 {
                        LinearSpec::Single(tracks.remove(0))
                    } else {
                        LinearSpec::Tracks(tracks)
                    };
                    RuleSpec {
                        name: name.clone(),
                        table: None,
                        linear: Some(linear),
                    }
                }
                None => RuleSpec {
                    name: name.clone(),
                    table: Some(rule.table().to_vec()),
                    linear: None,
                },
            })
            .collect();
        RulesFile {
            alphabet: AlphabetSpec {
                tracks: rules.alphabet().tracks().to_vec(),
            },
            neighborhood,
            rules: specs,
        }
    }
}

/// A rule (or template symbol) given by name or by index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sym {
    Index(RuleId),
    Name(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistKind {
    Periodic,
    EventuallyPeriodic,
    Substitutive,
    Explicit,
    Cyclic,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ruleset: Option<String>,
    /// Template symbols, for files without a rule set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbols: Option<Vec<String>>,
    pub kind: Option<DistKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<Vec<Sym>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<Vec<Sym>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub middle: Option<Vec<Sym>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<Vec<Sym>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub middle_start: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub substitution: Option<Vec<Vec<Sym>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<Sym>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    /// Most cells a substitutive expansion may materialize.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<Sym>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<i64>,
}

/// A distribution file resolved against its rule set (or its own symbols).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadedDist {
    pub path: PathBuf,
    pub rules: Option<RuleSet>,
    pub symbols: Vec<String>,
    pub dist: Distribution,
}

impl LoadedDist {
    pub fn rules(&self) -> Result<&RuleSet, SchemaError> {
        self.rules
            .as_ref()
            .ok_or_else(|| invalid(&self.path, "ruleset", "this command needs a rule set"))
    }

    pub fn template(&self) -> Result<Template, SchemaError> {
        Template::new(self.symbols.clone(), self.dist.clone()).map_err(|e| invalid(&self.path, "kind", e))
    }
}

fn symbols_in_order(file: &DistFile) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let words = [&file.word, &file.left, &file.middle, &file.right];
    let singles = [&file.default, &file.seed];
    let all = words
        .into_iter()
        .flatten()
        .flatten()
        .chain(singles.into_iter().flatten())
        .chain(file.substitution.iter().flatten().flatten());
    for s in all {
        if let Sym::Name(n) = s {
            if !out.contains(n) {
                out.push(n.clone());
            }
        }
    }
    out
}

impl DistFile {
    fn resolve(&self, path: &Path, key: &str, names: &[String], s: &Sym) -> Result<RuleId, SchemaError> {
        match s {
            Sym::Index(i) if (*i as usize) < names.len() => Ok(*i),
            Sym::Index(i) => Err(invalid(path, key, format!("symbol index {i} out of range"))),
            Sym::Name(n) => names
                .iter()
                .position(|m| m == n)
                .map(|i| i as RuleId)
                .ok_or_else(|| invalid(path, key, format!("unknown symbol {n:?}"))),
        }
    }

    fn word(&self, path: &Path, key: &str, names: &[String], w: &Option<Vec<Sym>>) -> Result<Vec<RuleId>, SchemaError> {
        let w = w.as_ref().ok_or_else(|| invalid(path, key, "missing"))?;
        w.iter().map(|s| self.resolve(path, key, names, s)).collect()
    }

    pub fn load(path: &Path, max_cells: usize) -> Result<LoadedDist, SchemaError> {
        let file: DistFile = read_json(path)?;
        file.to_loaded(path, max_cells)
    }

    pub fn to_loaded(&self, path: &Path, max_cells: usize) -> Result<LoadedDist, SchemaError> {
        let rules = match &self.ruleset {
            Some(rel) => {
                let rules_path = path.parent().unwrap_or(Path::new(".")).join(rel);
                let file: RulesFile = read_json(&rules_path)?;
                Some(file.to_ruleset(&rules_path)?)
            }
            None => None,
        };
        let symbols = match (&rules, &self.symbols) {
            (Some(r), None) => r.names().to_vec(),
            (Some(_), Some(_)) => return Err(invalid(path, "symbols", "not allowed next to \"ruleset\"")),
            (None, Some(s)) => s.clone(),
            (None, None) => symbols_in_order(self),
        };
        let names = &symbols;
        let kind = self.kind.ok_or_else(|| invalid(path, "kind", "missing"))?;
        let dist = match kind {
            DistKind::Periodic => Distribution::Periodic {
                word: self.word(path, "word", names, &self.word)?,
                anchor: self.anchor.unwrap_or(0),
            },
            DistKind::Cyclic => Distribution::cyclic(self.word(path, "word", names, &self.word)?),
            DistKind::EventuallyPeriodic => Distribution::eventually_periodic(
                self.word(path, "left", names, &self.left)?,
                self.word(path, "middle", names, &self.middle)?,
                self.word(path, "right", names, &self.right)?,
                self.middle_start.unwrap_or(0),
            ),
            DistKind::Explicit => Distribution::ExplicitWindow {
                window: self.word(path, "word", names, &self.word)?,
                start: self.anchor.unwrap_or(0),
                default: self
                    .default
                    .as_ref()
                    .map(|s| self.resolve(path, "default", names, s))
                    .transpose()?
                    .ok_or_else(|| invalid(path, "default", "missing"))?,
            },
            DistKind::Substitutive => {
                let images = self.substitution.as_ref().ok_or_else(|| invalid(path, "substitution", "missing"))?;
                let images = images
                    .iter()
                    .map(|w| w.iter().map(|s| self.resolve(path, "substitution", names, s)).collect())
                    .collect::<Result<Vec<Vec<RuleId>>, _>>()?;
                let seed = self.seed.as_ref().ok_or_else(|| invalid(path, "seed", "missing"))?;
                let seed = self.resolve(path, "seed", names, seed)?;
                let depth = self.depth.ok_or_else(|| invalid(path, "depth", "missing"))?;
                let cells = self.length.unwrap_or(max_cells);
                Distribution::Substitutive(
                    Substitutive::new(images, seed, depth, self.anchor.unwrap_or(0), cells)
                        .map_err(|e| invalid(path, "substitution", e))?,
                )
            }
        };
        dist.validate(symbols.len()).map_err(|e| invalid(path, "kind", e))?;
        Ok(LoadedDist {
            path: path.to_path_buf(),
            rules,
            symbols,
            dist,
        })
    }

    /// The file for `dist`, naming symbols by `names`.
    pub fn from_dist(dist: &Distribution, names: &[String], ruleset: Option<String>) -> Self {
        let word = |w: &[RuleId]| Some(w.iter().map(|&i| Sym::Name(names[i as usize].clone())).collect());
        let sym = |i: RuleId| Some(Sym::Name(names[i as usize].clone()));
        let mut file = DistFile {
            symbols: if ruleset.is_none() { Some(names.to_vec()) } else { None },
            ruleset,
            ..DistFile::default()
        };
        match dist {
            Distribution::Periodic { word: w, anchor } => {
                file.kind = Some(DistKind::Periodic);
                file.word = word(w);
                file.anchor = Some(*anchor);
            }
            Distribution::Cyclic { word: w } => {
                file.kind = Some(DistKind::Cyclic);
                file.word = word(w);
            }
            Distribution::EventuallyPeriodic {
                left,
                middle,
                right,
                middle_start,
            } => {
                file.kind = Some(DistKind::EventuallyPeriodic);
                file.left = word(left);
                file.middle = word(middle);
                file.right = word(right);
                file.middle_start = Some(*middle_start);
            }
            Distribution::ExplicitWindow { window, start, default } => {
                file.kind = Some(DistKind::Explicit);
                file.word = word(window);
                file.anchor = Some(*start);
                file.default = sym(*default);
            }
            Distribution::Substitutive(s) => {
                file.kind = Some(DistKind::Substitutive);
                file.substitution = Some(
                    s.substitution()
                        .iter()
                        .map(|w| word(w).expect("some"))
                        .collect(),
                );
                file.seed = sym(s.seed());
                file.depth = Some(s.depth());
                file.anchor = Some(s.anchor());
            }
            Distribution::Periodic2 { .. } => unreachable!("no file kind for 2-D distributions"),
        }
        file
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfigKind {
    FiniteSupport,
    Periodic,
    Explicit,
    Cyclic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub kind: ConfigKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub background: Option<State>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<(i64, State)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<Vec<State>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<State>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Configuration, SchemaError> {
        let file: ConfigFile = read_json(path)?;
        file.to_configuration(path)
    }

    pub fn to_configuration(&self, path: &Path) -> Result<Configuration, SchemaError> {
        let word = || self.word.clone().ok_or_else(|| invalid(path, "word", "missing"));
        Ok(match self.kind {
            ConfigKind::FiniteSupport => Configuration::FiniteSupport(FiniteSupport::line(
                self.background.unwrap_or(0),
                self.cells.clone().unwrap_or_default(),
            )),
            ConfigKind::Periodic => Configuration::Periodic {
                word: word()?,
                anchor: self.anchor.unwrap_or(0),
            },
            ConfigKind::Cyclic => Configuration::Cyclic { word: word()? },
            ConfigKind::Explicit => Configuration::ExplicitWindow {
                window: word()?,
                start: self.anchor.unwrap_or(0),
                default: self.default.unwrap_or(0),
            },
        })
    }

    pub fn from_finite_support(c: &FiniteSupport) -> Self {
        ConfigFile {
            kind: ConfigKind::FiniteSupport,
            background: Some(c.background()),
            cells: Some(c.cells().map(|(p, v)| (p.x, v)).collect()),
            word: None,
            anchor: None,
            default: None,
        }
    }
}

pub fn load_rules(path: &Path) -> Result<RuleSet, SchemaError> {
    let file: RulesFile = read_json(path)?;
    file.to_ruleset(path)
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const MOORE: &str = r#"{
        "alphabet": {"tracks": [2]},
        "neighborhood": [-1, 0, 1],
        "rules": [
            {"name": "f", "linear": {"terms": [[0, 0], [1, 0]], "const": 0}},
            {"name": "g", "table": [0, 1, 1, 0, 0, 1, 1, 0]}
        ]
    }"#;

    #[test]
    fn rules_round_trip() {
        let p = Path::new("moore.json");
        let file: RulesFile = parse_json(p, MOORE).unwrap();
        let rules = file.to_ruleset(p).unwrap();
        assert!(rules.is_linear());
        let emitted = RulesFile::from_ruleset(&rules);
        // the table is recognised as linear and written back as a form
        assert!(emitted.rules[1].linear.is_some());
        assert_eq!(emitted.to_ruleset(p).unwrap(), rules);
        let again: RulesFile = parse_json(p, &to_pretty(&emitted)).unwrap();
        assert_eq!(again, emitted);
    }

    #[test]
    fn schema_errors_name_the_key() {
        let p = Path::new("bad.json");
        let short = MOORE.replace("[0, 1, 1, 0, 0, 1, 1, 0]", "[0, 1]");
        let file: RulesFile = parse_json(p, &short).unwrap();
        let err = file.to_ruleset(p).unwrap_err().to_string();
        assert!(err.contains("rules[1].table"), "{err}");
        let err = parse_json::<RulesFile>(p, &MOORE.replace("\"tracks\"", "\"tracs\"")).unwrap_err();
        assert!(err.to_string().contains("tracs"));
        let err = parse_json::<RulesFile>(p, &MOORE[..40]).unwrap_err().to_string();
        assert!(err.contains("line") && err.contains("column"), "{err}");
    }

    #[test]
    fn templates_infer_symbols() {
        let p = Path::new("aba.json");
        let file: DistFile = parse_json(
            p,
            r#"{"kind": "eventually_periodic", "left": ["A"], "middle": ["B"], "right": ["A"], "middle_start": 0}"#,
        )
        .unwrap();
        let d = file.to_loaded(p, 1000).unwrap();
        assert_eq!(d.symbols, ["A", "B"]);
        assert_eq!(d.dist, Distribution::eventually_periodic(vec![0], vec![1], vec![0], 0));
        let back = DistFile::from_dist(&d.dist, &d.symbols, None);
        assert_eq!(back.to_loaded(p, 1000).unwrap(), d);
    }

    #[test]
    fn configurations_round_trip() {
        let c = FiniteSupport::line(0, [(-2, 1), (3, 1)]);
        let file = ConfigFile::from_finite_support(&c);
        let text = to_pretty(&file);
        let back: ConfigFile = parse_json(Path::new("c.json"), &text).unwrap();
        assert_eq!(back.to_configuration(Path::new("c.json")).unwrap(), Configuration::FiniteSupport(c));
    }
}
