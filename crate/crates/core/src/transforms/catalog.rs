use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use super::{BirationalMap, MapKind, ParamMap, TimeMap};
use crate::error::{read_file, Error, Result};
use crate::exactpoly::{parse_rational_function, Rational, RationalFunction, VarTable};
use crate::systems::{ParameterRelation, SystemName};

/// One parsed `.map` file before `after` composition.
#[derive(Debug, Clone)]
pub struct MapFile {
    pub after: Option<String>,
    pub map: BirationalMap,
}

struct Fields {
    name: Option<String>,
    kind: Option<MapKind>,
    after: Option<String>,
    target: Option<SystemName>,
    q: Option<RationalFunction>,
    p: Option<RationalFunction>,
    t: Option<RationalFunction>,
    alpha: Option<Vec<Vec<Rational>>>,
    offset: Option<Vec<Rational>>,
    inv_self: bool,
    inv_q: Option<RationalFunction>,
    inv_p: Option<RationalFunction>,
    inv_t: Option<RationalFunction>,
    inv_alpha: Option<Vec<Vec<Rational>>>,
    inv_offset: Option<Vec<Rational>>,
}

fn parse_row(s: &str, n: usize, bad: &dyn Fn(String) -> Error) -> Result<Vec<Rational>> {
    let row = s
        .split_whitespace()
        .map(|x| Rational::from_str(x).map_err(|_| bad(format!("bad matrix entry `{x}`"))))
        .collect::<Result<Vec<_>>>()?;
    if row.len() != n {
        return Err(bad(format!("expected {n} entries, found {}", row.len())));
    }
    Ok(row)
}

/// Parses the text of a `.map` file for a system with the given relation.
pub fn parse_map(text: &str, origin: &str, relation: &ParameterRelation) -> Result<MapFile> {
    let n = relation.coeffs().len();
    let vars = VarTable::standard(n);
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut f = Fields {
        name: None,
        kind: None,
        after: None,
        target: None,
        q: None,
        p: None,
        t: None,
        alpha: None,
        offset: None,
        inv_self: false,
        inv_q: None,
        inv_p: None,
        inv_t: None,
        inv_alpha: None,
        inv_offset: None,
    };
    let mut k = 0;
    while k < lines.len() {
        let (ln, line) = lines[k];
        let bad = |message: String| Error::Malformed {
            path: origin.to_string(),
            line: ln,
            message,
        };
        k += 1;
        let expr = |s: &str| -> Result<RationalFunction> {
            parse_rational_function(s, &vars).map_err(|e| bad(e.to_string()))
        };
        if let Some((key, value)) = line.split_once('=') {
            let value = value.trim();
            let slot = match key.trim() {
                "Q" => &mut f.q,
                "P" => &mut f.p,
                "T" => &mut f.t,
                "inverse.Q" => &mut f.inv_q,
                "inverse.P" => &mut f.inv_p,
                "inverse.T" => &mut f.inv_t,
                other => return Err(bad(format!("unknown component `{other}`"))),
            };
            *slot = Some(expr(value)?);
            continue;
        }
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match key {
            "name" => f.name = Some(rest.to_string()),
            "kind" => {
                f.kind = Some(MapKind::parse(rest).ok_or_else(|| bad(format!("unknown kind `{rest}`")))?)
            }
            "after" => f.after = Some(rest.to_string()),
            "target" => f.target = Some(SystemName::from_str(rest)?),
            "alpha" | "inverse.alpha" => {
                if lines.len() < k + n {
                    return Err(bad("parameter matrix is truncated".into()));
                }
                let rows = lines[k..k + n]
                    .iter()
                    .map(|(_, l)| parse_row(l, n, &bad))
                    .collect::<Result<Vec<_>>>()?;
                k += n;
                if key == "alpha" {
                    f.alpha = Some(rows);
                } else {
                    f.inv_alpha = Some(rows);
                }
            }
            "offset" => f.offset = Some(parse_row(rest, n, &bad)?),
            "inverse.offset" => f.inv_offset = Some(parse_row(rest, n, &bad)?),
            "inverse" if rest == "self" => f.inv_self = true,
            _ => return Err(bad(format!("unrecognised line `{line}`"))),
        }
    }
    let missing = |what: &str| Error::Malformed {
        path: origin.to_string(),
        line: 0,
        message: format!("missing {what}"),
    };
    let name = f.name.ok_or_else(|| missing("name"))?;
    let params = |m: Option<Vec<Vec<Rational>>>, o: Option<Vec<Rational>>| {
        let mut p = ParamMap::identity(n);
        if let Some(m) = m {
            p.matrix = m;
        }
        if let Some(o) = o {
            p.offset = o;
        }
        p
    };
    let time = match &f.t {
        Some(t) => TimeMap::from_rf(t)?,
        None => TimeMap::identity(),
    };
    let mut map = BirationalMap {
        name: name.clone(),
        kind: f.kind.ok_or_else(|| missing("kind"))?,
        q: f.q.ok_or_else(|| missing("Q"))?,
        p: f.p.ok_or_else(|| missing("P"))?,
        time,
        params: params(f.alpha, f.offset),
        relation: relation.clone(),
        target: f.target,
        inverse: None,
    };
    if !relation.preserved_by(&map.params.matrix, &map.params.offset) {
        return Err(Error::Malformed {
            path: origin.to_string(),
            line: 0,
            message: format!("parameter map of {name} does not preserve the relation"),
        });
    }
    let inverse = if f.inv_self {
        Some(map.clone())
    } else if let (Some(q), Some(p)) = (f.inv_q, f.inv_p) {
        let has_matrix = f.inv_alpha.is_some() || f.inv_offset.is_some();
        Some(BirationalMap {
            name: format!("{name}^-1"),
            q,
            p,
            time: match &f.inv_t {
                Some(t) => TimeMap::from_rf(t)?,
                None => map.time.inverse(),
            },
            params: if has_matrix {
                params(f.inv_alpha, f.inv_offset)
            } else {
                map.params.inverse()?
            },
            target: None,
            inverse: None,
            ..map.clone()
        })
    } else {
        None
    };
    map.inverse = inverse.map(Box::new);
    Ok(MapFile {
        after: f.after,
        map,
    })
}

/// All maps shipped for one system, with two-stage charts composed.
#[derive(Debug, Clone)]
pub struct Catalog {
    system: SystemName,
    maps: BTreeMap<String, BirationalMap>,
}

fn natural_key(name: &str) -> (String, u64) {
    let digits = name.len() - name.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    let (head, tail) = name.split_at(name.len() - digits);
    (head.to_string(), tail.parse().unwrap_or(0))
}

impl Catalog {
    pub fn system(&self) -> SystemName {
        self.system
    }

    pub fn get(&self, name: &str) -> Result<&BirationalMap> {
        self.maps
            .get(name)
            .ok_or_else(|| Error::UnknownMap(format!("{}/{name}", self.system)))
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// Maps in natural name order (`r2` before `r10`).
    pub fn maps(&self) -> Vec<&BirationalMap> {
        let mut v: Vec<&BirationalMap> = self.maps.values().collect();
        v.sort_by_key(|m| natural_key(&m.name));
        v
    }

    pub fn of_kind(&self, kind: MapKind) -> Vec<&BirationalMap> {
        self.maps().into_iter().filter(|m| m.kind == kind).collect()
    }

    pub fn charts(&self) -> Vec<&BirationalMap> {
        self.of_kind(MapKind::Chart)
    }

    /// Generators followed by diagram automorphisms.
    pub fn symmetries(&self) -> Vec<&BirationalMap> {
        let mut v = self.of_kind(MapKind::Generator);
        v.extend(self.of_kind(MapKind::Automorphism));
        v
    }

    pub fn insert(&mut self, map: BirationalMap) {
        self.maps.insert(map.name.clone(), map);
    }
}

pub fn load_catalog(data: &Path, system: SystemName) -> Result<Catalog> {
    let relation = crate::systems::load_relation(data, system)?;
    let dir = data.join("transforms").join(system.as_str());
    let mut files = Vec::new();
    if dir.is_dir() {
        let entries = std::fs::read_dir(&dir).map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?;
        for e in entries {
            let path = e
                .map_err(|source| Error::Io {
                    path: dir.clone(),
                    source,
                })?
                .path();
            if path.extension().is_some_and(|x| x == "map") {
                let text = read_file(&path)?;
                files.push(parse_map(&text, &path.display().to_string(), &relation)?);
            }
        }
    }
    let raw: BTreeMap<String, BirationalMap> = files
        .iter()
        .map(|f| (f.map.name.clone(), f.map.clone()))
        .collect();
    let mut maps = BTreeMap::new();
    for f in files {
        let map = match &f.after {
            None => f.map,
            Some(first) => {
                let base = raw
                    .get(first)
                    .ok_or_else(|| Error::UnknownMap(format!("{system}/{first}")))?;
                let mut composed = f.map.compose(base)?;
                composed.name = f.map.name.clone();
                composed.kind = f.map.kind;
                if let Some(inv) = composed.inverse.as_mut() {
                    inv.name = format!("{}^-1", f.map.name);
                }
                composed
            }
        };
        maps.insert(map.name.clone(), map);
    }
    Ok(Catalog { system, maps })
}
