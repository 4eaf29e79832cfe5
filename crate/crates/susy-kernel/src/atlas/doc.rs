use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::superfn::{ChartMorphism, ChartSpec};

use super::{Atlas, AtlasError};

/// Text form of an atlas: charts, overlap constraints, and pullbacks as
/// grammar strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtlasDoc {
    pub schema: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<String>,
    pub charts: Vec<ChartDoc>,
    pub transitions: Vec<TransitionDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartDoc {
    pub name: String,
    pub even: Vec<String>,
    pub odd: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionDoc {
    pub from: String,
    pub to: String,
    /// Expressions in the source coordinates required to be invertible.
    pub overlap: Vec<String>,
    pub even: Vec<String>,
    pub odd: Vec<String>,
}

impl Atlas {
    pub fn to_doc(&self) -> AtlasDoc {
        let charts = self
            .charts
            .iter()
            .map(|(n, c)| ChartDoc {
                name: n.clone(),
                even: c.even.clone(),
                odd: c.odd.clone(),
            })
            .collect();
        let show =
            |v: &[crate::superfn::SuperFunction]| v.iter().map(ToString::to_string).collect();
        let transitions = self
            .transitions
            .iter()
            .map(|(&(i, j), t)| TransitionDoc {
                from: self.charts[i].0.clone(),
                to: self.charts[j].0.clone(),
                overlap: t.overlap.clone(),
                even: show(&t.map.even),
                odd: show(&t.map.odd),
            })
            .collect();
        AtlasDoc {
            schema: 1,
            name: self.name.clone(),
            params: self.params.clone(),
            charts,
            transitions,
        }
    }

    pub fn from_doc(doc: &AtlasDoc) -> Result<Atlas, AtlasError> {
        if doc.schema != 1 {
            return Err(AtlasError::Doc(format!("unknown schema {}", doc.schema)));
        }
        let charts = doc
            .charts
            .iter()
            .map(|c| {
                Ok((
                    c.name.clone(),
                    ChartSpec::new(c.even.clone(), c.odd.clone())?,
                ))
            })
            .collect::<Result<Vec<_>, AtlasError>>()?;
        let index: BTreeMap<String, usize> = charts
            .iter()
            .enumerate()
            .map(|(i, (n, _))| (n.clone(), i))
            .collect();
        let find = |n: &str| {
            index
                .get(n)
                .copied()
                .ok_or_else(|| AtlasError::Doc(format!("unknown chart '{n}'")))
        };
        let mut atlas = Atlas {
            name: doc.name.clone(),
            params: doc.params.clone(),
            charts,
            transitions: BTreeMap::new(),
        };
        let params: Vec<&str> = doc.params.iter().map(String::as_str).collect();
        for t in &doc.transitions {
            let (i, j) = (find(&t.from)?, find(&t.to)?);
            let even: Vec<&str> = t.even.iter().map(String::as_str).collect();
            let odd: Vec<&str> = t.odd.iter().map(String::as_str).collect();
            let map = ChartMorphism::parse(atlas.chart(i), atlas.chart(j), &even, &odd, &params)?;
            atlas.insert(i, j, t.overlap.clone(), map)?;
        }
        Ok(atlas)
    }

    /// Pretty JSON with a trailing newline; stable for identical atlases.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_doc()).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Atlas, AtlasError> {
        let doc: AtlasDoc =
            serde_json::from_str(text).map_err(|e| AtlasError::Doc(e.to_string()))?;
        Atlas::from_doc(&doc)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{build_pi_line_atlas, build_projective_atlas};
    use super::*;

    #[test]
    fn json_round_trip() {
        for a in [build_projective_atlas(2, 3).unwrap(), build_pi_line_atlas()] {
            let back = Atlas::from_json(&a.to_json()).unwrap();
            assert_eq!(back, a);
        }
    }

    #[test]
    fn rejects_unknown_chart() {
        let mut d = build_pi_line_atlas().to_doc();
        d.transitions[0].to = "V".into();
        assert!(matches!(Atlas::from_doc(&d), Err(AtlasError::Doc(_))));
    }
}
