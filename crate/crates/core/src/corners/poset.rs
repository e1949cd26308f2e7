use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub id: usize,
    pub dim: usize,
    pub codim: usize,
}

/// The face poset of a compact manifold with corners.
///
/// Each face of codimension `k` carries the ordered list of the `k`
/// hyperfaces containing it; position `i` in that list names the `i`-th
/// circle coordinate over the face.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacePoset {
    faces: Vec<Face>,
    index: BTreeMap<usize, usize>,
    covers: Vec<(usize, usize)>,
    hyperfaces: BTreeMap<usize, Vec<usize>>,
    /// `above[i]`: indices of faces `>= faces[i]`.
    above: Vec<BTreeSet<usize>>,
}

/// Exchange form `{faces: [{id, dim, codim}], covers: [[lower, upper]], hyperfaces: {id: [ids]}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PosetJson {
    pub faces: Vec<Face>,
    pub covers: Vec<(usize, usize)>,
    #[serde(default)]
    pub hyperfaces: BTreeMap<usize, Vec<usize>>,
}

impl FacePoset {
    pub fn new(
        faces: Vec<Face>,
        covers: Vec<(usize, usize)>,
        hyperfaces: BTreeMap<usize, Vec<usize>>,
    ) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, f) in faces.iter().enumerate() {
            if index.insert(f.id, i).is_some() {
                return Err(Error::InvalidPoset(format!("face id {} repeated", f.id)));
            }
        }
        if faces.is_empty() {
            return Err(Error::InvalidPoset("no faces".into()));
        }
        let top = faces.iter().map(|f| f.dim + f.codim).max().unwrap_or(0);
        if let Some(f) = faces.iter().find(|f| f.dim + f.codim != top) {
            return Err(Error::InvalidPoset(format!(
                "face {} has dim + codim = {}, expected {top}",
                f.id,
                f.dim + f.codim
            )));
        }
        let mut up: Vec<Vec<usize>> = vec![Vec::new(); faces.len()];
        for &(lo, hi) in &covers {
            let (Some(&a), Some(&b)) = (index.get(&lo), index.get(&hi)) else {
                return Err(Error::InvalidPoset(format!("cover ({lo}, {hi}) names an unknown face")));
            };
            if faces[b].dim != faces[a].dim + 1 {
                return Err(Error::InvalidPoset(format!(
                    "cover ({lo}, {hi}) does not raise the dimension by one"
                )));
            }
            up[a].push(b);
        }
        let above: Vec<BTreeSet<usize>> = (0..faces.len())
            .map(|i| {
                let mut seen = BTreeSet::from([i]);
                let mut queue = VecDeque::from([i]);
                while let Some(x) = queue.pop_front() {
                    for &y in &up[x] {
                        if seen.insert(y) {
                            queue.push_back(y);
                        }
                    }
                }
                seen
            })
            .collect();
        for (i, f) in faces.iter().enumerate() {
            if !above[i].iter().any(|&j| faces[j].codim == 0) {
                return Err(Error::InvalidPoset(format!("face {} lies under no top-dimensional face", f.id)));
            }
        }
        for id in hyperfaces.keys() {
            if !index.contains_key(id) {
                return Err(Error::InvalidPoset(format!("hyperface list for unknown face {id}")));
            }
        }
        let p = FacePoset { faces, index, covers, hyperfaces, above };
        p.check_embedded()?;
        Ok(p)
    }

    fn check_embedded(&self) -> Result<()> {
        for (i, f) in self.faces.iter().enumerate() {
            let listed = self.hyperfaces.get(&f.id).map_or(&[][..], Vec::as_slice);
            let actual: BTreeSet<usize> = self.above[i]
                .iter()
                .filter(|&&j| self.faces[j].codim == 1)
                .map(|&j| self.faces[j].id)
                .collect();
            let listed_set: BTreeSet<usize> = listed.iter().copied().collect();
            if listed_set.len() != listed.len() {
                return Err(Error::NonEmbeddedCorner(format!("face {} lists a hyperface twice", f.id)));
            }
            if listed.len() != f.codim {
                return Err(Error::NonEmbeddedCorner(format!(
                    "face {} of codimension {} lists {} hyperfaces",
                    f.id,
                    f.codim,
                    listed.len()
                )));
            }
            if listed_set != actual {
                return Err(Error::NonEmbeddedCorner(format!(
                    "face {} lists hyperfaces {listed:?} but lies below {actual:?}",
                    f.id
                )));
            }
            let up = self.covers.iter().filter(|(lo, _)| *lo == f.id).count();
            if f.codim > 0 && up != f.codim {
                return Err(Error::NonEmbeddedCorner(format!(
                    "face {} of codimension {} has {up} faces one dimension higher",
                    f.id, f.codim
                )));
            }
        }
        Ok(())
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, id: usize) -> Option<&Face> {
        self.index.get(&id).map(|&i| &self.faces[i])
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn dim(&self) -> usize {
        self.faces.iter().map(|f| f.dim + f.codim).max().unwrap_or(0)
    }

    /// Ordered hyperfaces containing face `id`.
    pub fn hyperfaces_of(&self, id: usize) -> &[usize] {
        self.hyperfaces.get(&id).map_or(&[], Vec::as_slice)
    }

    /// `a <= b` in the face order.
    pub fn le(&self, a: usize, b: usize) -> bool {
        match (self.index.get(&a), self.index.get(&b)) {
            (Some(&i), Some(&j)) => self.above[i].contains(&j),
            _ => false,
        }
    }

    /// Faces covered by `id`, ascending by id.
    pub fn facets_of(&self, id: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.covers.iter().filter(|(_, hi)| *hi == id).map(|(lo, _)| *lo).collect();
        v.sort_unstable();
        v
    }

    /// Minimal elements of the poset, ascending by id.
    pub fn minimal_faces(&self) -> Vec<Face> {
        let mut out: Vec<Face> =
            self.faces.iter().filter(|f| self.facets_of(f.id).is_empty()).copied().collect();
        out.sort_by_key(|f| f.id);
        out
    }

    /// Product poset. The face `(f, g)` gets id `f_index * |Q| + g_index`.
    pub fn product(&self, other: &FacePoset) -> Result<FacePoset> {
        let (p_top, q_top) = (self.single_top()?, other.single_top()?);
        let m = other.faces.len();
        let id = |i: usize, j: usize| i * m + j;
        let mut faces = Vec::new();
        let mut hyperfaces = BTreeMap::new();
        for (i, f) in self.faces.iter().enumerate() {
            for (j, g) in other.faces.iter().enumerate() {
                faces.push(Face { id: id(i, j), dim: f.dim + g.dim, codim: f.codim + g.codim });
                let mut h: Vec<usize> =
                    self.hyperfaces_of(f.id).iter().map(|x| id(self.index[x], q_top)).collect();
                h.extend(other.hyperfaces_of(g.id).iter().map(|y| id(p_top, other.index[y])));
                if !h.is_empty() {
                    hyperfaces.insert(id(i, j), h);
                }
            }
        }
        let mut covers = Vec::new();
        for &(lo, hi) in &self.covers {
            for j in 0..m {
                covers.push((id(self.index[&lo], j), id(self.index[&hi], j)));
            }
        }
        for &(lo, hi) in &other.covers {
            for i in 0..self.faces.len() {
                covers.push((id(i, other.index[&lo]), id(i, other.index[&hi])));
            }
        }
        FacePoset::new(faces, covers, hyperfaces)
    }

    fn single_top(&self) -> Result<usize> {
        let tops: Vec<usize> = (0..self.faces.len()).filter(|&i| self.faces[i].codim == 0).collect();
        match tops.as_slice() {
            [t] => Ok(*t),
            _ => Err(Error::InvalidPoset(format!("{} top-dimensional faces; expected one", tops.len()))),
        }
    }

    pub fn point() -> Self {
        FacePoset::new(vec![Face { id: 0, dim: 0, codim: 0 }], vec![], BTreeMap::new()).expect("point")
    }

    /// `[0, 1]`: endpoints 0 and 1, interior 2.
    pub fn interval() -> Self {
        FacePoset::new(
            vec![
                Face { id: 0, dim: 0, codim: 1 },
                Face { id: 1, dim: 0, codim: 1 },
                Face { id: 2, dim: 1, codim: 0 },
            ],
            vec![(0, 2), (1, 2)],
            BTreeMap::from([(0, vec![0]), (1, vec![1])]),
        )
        .expect("interval")
    }

    /// `[0, 1]^2` as the product of two intervals.
    pub fn square() -> Self {
        Self::interval().product(&Self::interval()).expect("square")
    }
}

impl TryFrom<PosetJson> for FacePoset {
    type Error = Error;
    fn try_from(j: PosetJson) -> Result<Self> {
        FacePoset::new(j.faces, j.covers, j.hyperfaces)
    }
}

impl From<&FacePoset> for PosetJson {
    fn from(p: &FacePoset) -> Self {
        PosetJson { faces: p.faces.clone(), covers: p.covers.clone(), hyperfaces: p.hyperfaces.clone() }
    }
}

impl Serialize for FacePoset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PosetJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for FacePoset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        FacePoset::try_from(PosetJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
