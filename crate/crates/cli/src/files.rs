//! Measure and cone files.
//!
//! Both are JSON documents whose numbers are strings holding an exact
//! fraction (`"2/5"`) or a decimal (`"0.1"`, read as `1/10`).
//!
//! ```json
//! {"dim": 1, "atoms": [{"x": ["2/5"], "w": "1/10"}, {"x": ["3/5"], "w": "9/10"}]}
//! {"dim": 2, "kind": "generators", "rays": [["1", "0"], ["1", "1"]], "unit": ["2", "1"]}
//! ```

use std::fmt;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use stochdom_core::{rational, Cone, Measure, Point, Rational};

/// An exact number as written in a file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Num(pub Rational);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct NumVisitor;

        impl Visitor<'_> for NumVisitor {
            type Value = Num;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a fraction or decimal string, or an integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
                rational::parse(v).map(Num).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
                Ok(Num(rational::int(v)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
                i64::try_from(v).map(|v| Num(rational::int(v))).map_err(E::custom)
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
                Err(E::custom(format!("float {v} is ambiguous; quote it as a string to read it exactly")))
            }
        }

        d.deserialize_any(NumVisitor)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomFile {
    pub x: Vec<Num>,
    pub w: Num,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    pub dim: usize,
    pub atoms: Vec<AtomFile>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeKind {
    Halfline,
    Orthant,
    Generators,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeFile {
    pub dim: usize,
    pub kind: ConeKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rays: Vec<Vec<Num>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub normals: Vec<Vec<Num>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<Vec<Num>>,
}

fn point(coords: &[Num]) -> Point {
    Point::new(coords.iter().map(|n| n.0.clone()).collect())
}

fn nums(p: &Point) -> Vec<Num> {
    p.coords().iter().cloned().map(Num).collect()
}

impl MeasureFile {
    pub fn to_measure(&self) -> Result<Measure> {
        for (i, a) in self.atoms.iter().enumerate() {
            if a.x.len() != self.dim {
                bail!("atom {i}: expected {} coordinates, found {}", self.dim, a.x.len());
            }
        }
        Ok(Measure::new(self.dim, self.atoms.iter().map(|a| (point(&a.x), a.w.0.clone())))?)
    }

    /// Atoms merged, zero weights dropped, points in lexicographic order.
    pub fn canonical(mu: &Measure) -> MeasureFile {
        MeasureFile {
            dim: mu.dim(),
            atoms: mu.iter().map(|(x, w)| AtomFile { x: nums(x), w: Num(w.clone()) }).collect(),
        }
    }
}

impl ConeFile {
    pub fn to_cone(&self) -> Result<Cone> {
        let unit = self.unit.as_deref().map(point);
        let rays: Vec<Point> = self.rays.iter().map(|r| point(r)).collect();
        let normals: Vec<Point> = self.normals.iter().map(|n| point(n)).collect();
        for p in rays.iter().chain(&normals).chain(&unit) {
            if p.dim() != self.dim {
                bail!("cone of dimension {} has a vector of dimension {}", self.dim, p.dim());
            }
        }
        let cone = match self.kind {
            ConeKind::Halfline => {
                if self.dim != 1 {
                    bail!("a half-line cone has dimension 1");
                }
                Cone::halfline()
            }
            ConeKind::Orthant => Cone::orthant(self.dim)?,
            ConeKind::Generators => {
                let unit = unit.clone().ok_or_else(|| anyhow!("a generated cone needs an order unit"))?;
                return Ok(match (rays.is_empty(), normals.is_empty()) {
                    (false, false) => Cone::from_parts(rays, normals, unit)?,
                    (false, true) => Cone::from_rays(rays, unit)?,
                    (true, false) => Cone::from_normals(normals, unit)?,
                    (true, true) => bail!("a generated cone needs rays or normals"),
                });
            }
        };
        Ok(match unit {
            Some(u) => cone.with_unit(u)?,
            None => cone,
        })
    }

    pub fn canonical(cone: &Cone) -> ConeFile {
        ConeFile {
            dim: cone.dim(),
            kind: ConeKind::Generators,
            rays: cone.rays().iter().map(nums).collect(),
            normals: cone.normals().iter().map(nums).collect(),
            unit: Some(nums(cone.unit())),
        }
    }
}

/// Pretty JSON with a trailing newline; the canonical byte form of a file.
pub fn to_canonical_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("file types serialize");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn parse_measure(text: &str) -> Result<Measure> {
    let file: MeasureFile = serde_json::from_str(text)?;
    file.to_measure()
}

pub fn parse_cone(text: &str) -> Result<Cone> {
    let file: ConeFile = serde_json::from_str(text)?;
    file.to_cone()
}

pub fn load_measure(path: &Path, normalize: bool) -> Result<Measure> {
    let mu = parse_measure(&read(path)?).with_context(|| format!("in measure file {}", path.display()))?;
    Ok(if normalize { mu.normalized()? } else { mu })
}

/// `halfline`, `orthant` (dimension taken from the measures) or a cone file.
pub fn load_cone(arg: &str, dim: usize) -> Result<Cone> {
    let cone = match arg {
        "halfline" => Cone::halfline(),
        "orthant" => Cone::orthant(dim)?,
        path => parse_cone(&read(Path::new(path))?).with_context(|| format!("in cone file {path}"))?,
    };
    if cone.dim() != dim {
        bail!("cone has dimension {} but the measures have dimension {dim}", cone.dim());
    }
    Ok(cone)
}

/// A point given on the command line as comma-separated numbers.
pub fn parse_point(text: &str) -> Result<Point> {
    let coords = text
        .split(',')
        .map(|c| rational::parse(c.trim()).map_err(|e| anyhow!("{c:?}: {e}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Point::new(coords))
}

pub fn parse_number(text: &str) -> Result<Rational> {
    rational::parse(text.trim()).map_err(|e| anyhow!("{text:?}: {e}"))
}
