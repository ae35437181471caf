//! Tetrahedral 3-colexes: colored cell complexes whose vertices are qubits,
//! whose cells carry X checks and whose faces carry Z checks.
//!
//! The built-in family lives on the body-centred cubic Delaunay triangulation
//! (in Freudenthal coordinates: the six tetrahedra `v, v+e_a, v+e_a+e_b, v+1`
//! inside each unit cube), four-colored by `(x + y + z) mod 4`. A tetrahedral
//! region bounded by four lattice planes is cut out, and every boundary
//! triangle is coned off to one of four apex points according to the color it
//! is missing. Qubits are the 3-simplices of the coned complex, X checks are
//! the stars of interior lattice points, and Z checks are the stars of edges
//! that do not join two apexes. The four apex stars are the boundary facets.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Color = u8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub color: Color,
    pub vertices: Vec<usize>,
}

/// A face separates two cells, or a cell and a boundary facet; `colors`
/// lists the colors of those two.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub colors: [Color; 2],
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Facet {
    pub missing_color: Color,
    pub vertices: Vec<usize>,
}

/// A tetrahedral 3-colex. Vertex ids are dense `0..vertices.len()`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Colex {
    #[serde(rename = "L")]
    pub l: usize,
    pub vertices: Vec<usize>,
    pub cells: Vec<Cell>,
    pub faces: Vec<Face>,
    pub facets: Vec<Facet>,
}

type Point = [i32; 3];

fn lattice_color(p: &Point) -> Color {
    (p[0] + p[1] + p[2]).rem_euclid(4) as Color
}

/// Plane offsets of the region for edge length `l`.
///
/// Starting from the single-tetrahedron region, each step of two in `l`
/// pushes one plane outwards by one color period, cycling through the planes.
fn region_offsets(l: usize) -> [i32; 4] {
    let mut a = [0, 1, 2, 3];
    for j in 0..(l - 3) / 2 {
        a[3 - (j % 4)] += 4;
    }
    a
}

fn in_region(p: &Point, a: &[i32; 4]) -> bool {
    let [x, y, z] = *p;
    x + y + z <= a[0] && x + y - 3 * z <= a[1] && x - 3 * y + z <= a[2] && -3 * x + y + z <= a[3]
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// A simplex of the coned complex: lattice vertices plus apex colors (bitmask).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Simplex {
    verts: Vec<usize>,
    apex: u8,
}

/// Builds the tetrahedral colex with edge length `l` (odd, at least 3).
pub fn build_tetrahedral_colex(l: usize) -> Result<Colex> {
    if l < 3 || l.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("edge length must be odd and at least 3, got {l}")));
    }
    let a = region_offsets(l);
    let r = 4 * a.iter().copied().max().unwrap_or(0).abs() + 8;
    let mut points: Vec<Point> = Vec::new();
    for x in -r..=r {
        for y in -r..=r {
            for z in -r..=r {
                let p = [x, y, z];
                if in_region(&p, &a) {
                    points.push(p);
                }
            }
        }
    }
    points.sort();
    let index: HashMap<Point, usize> = points.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let colors: Vec<Color> = points.iter().map(lattice_color).collect();

    let mut tets: BTreeSet<[usize; 4]> = BTreeSet::new();
    for p in &points {
        for perm in PERMS {
            let mut path = [*p; 4];
            for s in 0..3 {
                path[s + 1] = path[s];
                path[s + 1][perm[s]] += 1;
            }
            if let (Some(&i1), Some(&i2), Some(&i3)) = (index.get(&path[1]), index.get(&path[2]), index.get(&path[3])) {
                let mut t = [index[p], i1, i2, i3];
                t.sort();
                tets.insert(t);
            }
        }
    }

    let mut tri_count: BTreeMap<[usize; 3], usize> = BTreeMap::new();
    for t in &tets {
        for skip in 0..4 {
            let tri: Vec<usize> = (0..4).filter(|&i| i != skip).map(|i| t[i]).collect();
            *tri_count.entry([tri[0], tri[1], tri[2]]).or_default() += 1;
        }
    }
    let missing = |vs: &[usize]| -> u8 {
        let present: u8 = vs.iter().fold(0, |m, &v| m | (1 << colors[v]));
        !present & 0xF
    };

    let mut simplices: Vec<Simplex> = tets.iter().map(|t| Simplex { verts: t.to_vec(), apex: 0 }).collect();
    let mut edge_labels: BTreeMap<[usize; 2], u8> = BTreeMap::new();
    let mut vert_labels: BTreeMap<usize, u8> = BTreeMap::new();
    for (tri, &cnt) in &tri_count {
        if cnt != 1 {
            continue;
        }
        let label = missing(tri);
        simplices.push(Simplex { verts: tri.to_vec(), apex: label });
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            *edge_labels.entry([tri[i], tri[j]]).or_default() |= label;
        }
        for &v in tri {
            *vert_labels.entry(v).or_default() |= label;
        }
    }
    for (e, &labels) in &edge_labels {
        match labels.count_ones() {
            1 => {}
            2 => simplices.push(Simplex { verts: e.to_vec(), apex: labels }),
            _ => return Err(Error::Invariant(format!("boundary edge {e:?} meets more than two facets"))),
        }
    }
    for (&v, &labels) in &vert_labels {
        match labels.count_ones() {
            1 | 2 => {}
            3 => simplices.push(Simplex { verts: vec![v], apex: labels }),
            _ => return Err(Error::Invariant(format!("boundary vertex {v} meets all four facets"))),
        }
    }
    simplices.sort();
    let n = simplices.len();

    let mut by_vertex: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    for (q, s) in simplices.iter().enumerate() {
        for &v in &s.verts {
            by_vertex[v].push(q);
        }
    }
    let cells: Vec<Cell> = by_vertex
        .iter()
        .enumerate()
        .filter(|(_, qs)| !qs.is_empty())
        .map(|(v, qs)| Cell { color: colors[v], vertices: qs.clone() })
        .collect();

    let mut faces: Vec<Face> = Vec::new();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut edges: BTreeMap<[usize; 2], Vec<usize>> = BTreeMap::new();
    let mut apex_faces: BTreeMap<(usize, Color), Vec<usize>> = BTreeMap::new();
    for (q, s) in simplices.iter().enumerate() {
        for i in 0..s.verts.len() {
            for j in i + 1..s.verts.len() {
                edges.entry([s.verts[i], s.verts[j]]).or_default().push(q);
            }
            for c in 0..4u8 {
                if s.apex & (1 << c) != 0 {
                    apex_faces.entry((s.verts[i], c)).or_default().push(q);
                }
            }
        }
    }
    for ([u, w], qs) in edges {
        if seen.insert(qs.clone()) {
            let mut cs = [colors[u], colors[w]];
            cs.sort();
            faces.push(Face { colors: cs, vertices: qs });
        }
    }
    for ((v, c), qs) in apex_faces {
        if seen.insert(qs.clone()) {
            let mut cs = [colors[v], c];
            cs.sort();
            faces.push(Face { colors: cs, vertices: qs });
        }
    }
    let facets = (0..4u8)
        .map(|c| Facet {
            missing_color: c,
            vertices: (0..n).filter(|&q| simplices[q].apex & (1 << c) != 0).collect(),
        })
        .collect();
    Ok(Colex { l, vertices: (0..n).collect(), cells, faces, facets })
}

/// Result of one validation check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub offenders: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColexReport {
    pub checks: Vec<CheckResult>,
}

impl ColexReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn is_subset(small: &[usize], big: &BTreeSet<usize>) -> bool {
    small.iter().all(|v| big.contains(v))
}

const MAX_OFFENDERS: usize = 20;

fn push_offender(list: &mut Vec<String>, msg: String) {
    if list.len() < MAX_OFFENDERS {
        list.push(msg);
    }
}

/// Checks the colex axioms and structural consistency.
pub fn validate_colex(c: &Colex) -> ColexReport {
    let n = c.vertices.len();
    let cell_sets: Vec<BTreeSet<usize>> = c.cells.iter().map(|x| x.vertices.iter().copied().collect()).collect();
    let facet_sets: Vec<BTreeSet<usize>> = c.facets.iter().map(|x| x.vertices.iter().copied().collect()).collect();
    let mut cells_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, cell) in c.cells.iter().enumerate() {
        for &v in &cell.vertices {
            if v < n {
                cells_of[v].push(i);
            }
        }
    }

    let mut range = Vec::new();
    for (i, cell) in c.cells.iter().enumerate() {
        if cell.color > 3 {
            push_offender(&mut range, format!("cell {i} has color {}", cell.color));
        }
        if cell.vertices.iter().any(|&v| v >= n) {
            push_offender(&mut range, format!("cell {i} references an unknown vertex"));
        }
    }
    for (i, f) in c.faces.iter().enumerate() {
        if f.vertices.iter().any(|&v| v >= n) || f.colors.iter().any(|&x| x > 3) {
            push_offender(&mut range, format!("face {i} is out of range"));
        }
    }
    let mut seen_colors = BTreeSet::new();
    for (i, f) in c.facets.iter().enumerate() {
        if f.vertices.iter().any(|&v| v >= n) || f.missing_color > 3 || !seen_colors.insert(f.missing_color) {
            push_offender(&mut range, format!("facet {i} is out of range or repeats a label"));
        }
    }
    if c.facets.len() != 4 {
        push_offender(&mut range, format!("expected 4 boundary facets, found {}", c.facets.len()));
    }
    let sane = range.is_empty();
    let mut checks = vec![CheckResult { name: "ranges".into(), passed: sane, offenders: range }];
    if !sane {
        return ColexReport { checks };
    }

    // (i) cells sharing a face differ in color
    let mut adjacency = Vec::new();
    let mut containment = Vec::new();
    for (fi, f) in c.faces.iter().enumerate() {
        let Some(&v0) = f.vertices.first() else {
            push_offender(&mut containment, format!("face {fi} is empty"));
            continue;
        };
        let holders: Vec<usize> = cells_of[v0].iter().copied().filter(|&ci| is_subset(&f.vertices, &cell_sets[ci])).collect();
        let facet_holders: Vec<usize> = (0..c.facets.len()).filter(|&k| is_subset(&f.vertices, &facet_sets[k])).collect();
        for i in 0..holders.len() {
            for j in i + 1..holders.len() {
                if c.cells[holders[i]].color == c.cells[holders[j]].color {
                    push_offender(
                        &mut adjacency,
                        format!("cells {} and {} share face {fi} and both have color {}", holders[i], holders[j], c.cells[holders[i]].color),
                    );
                }
            }
        }
        let fset: BTreeSet<usize> = f.vertices.iter().copied().collect();
        let ok = match (holders.len(), facet_holders.len()) {
            (2, 0) => cell_sets[holders[0]].intersection(&cell_sets[holders[1]]).copied().collect::<BTreeSet<_>>() == fset,
            (1, 1) => cell_sets[holders[0]].intersection(&facet_sets[facet_holders[0]]).copied().collect::<BTreeSet<_>>() == fset,
            _ => false,
        };
        if !ok {
            push_offender(
                &mut containment,
                format!("face {fi} lies in {} cells and {} facets or is not their intersection", holders.len(), facet_holders.len()),
            );
        }
    }
    checks.push(CheckResult { name: "axiom_i_adjacent_colors".into(), passed: adjacency.is_empty(), offenders: adjacency });

    // (ii) each facet sees exactly three cell colors, none equal to its label
    let mut facet_colors = Vec::new();
    for (k, f) in c.facets.iter().enumerate() {
        let colors: BTreeSet<Color> =
            f.vertices.iter().flat_map(|&v| cells_of[v].iter().map(|&ci| c.cells[ci].color)).collect();
        if colors.len() != 3 || colors.contains(&f.missing_color) {
            push_offender(&mut facet_colors, format!("facet {k} labeled {} touches cell colors {colors:?}", f.missing_color));
        }
    }
    checks.push(CheckResult { name: "axiom_ii_facet_colors".into(), passed: facet_colors.is_empty(), offenders: facet_colors });

    // (iii) every vertex sees all four colors among its cells and facets
    let mut rainbow = Vec::new();
    for v in 0..n {
        let mut mask = 0u8;
        for &ci in &cells_of[v] {
            mask |= 1 << c.cells[ci].color;
        }
        for (k, f) in c.facets.iter().enumerate() {
            if facet_sets[k].contains(&v) {
                mask |= 1 << f.missing_color;
            }
        }
        if mask != 0xF {
            push_offender(&mut rainbow, format!("vertex {v} sees color mask {mask:04b}"));
        }
    }
    checks.push(CheckResult { name: "axiom_iii_vertex_colors".into(), passed: rainbow.is_empty(), offenders: rainbow });
    checks.push(CheckResult { name: "faces_are_intersections".into(), passed: containment.is_empty(), offenders: containment });

    // facet vertex sets are exactly covered by the faces they contain
    let mut cover = Vec::new();
    for (k, fs) in facet_sets.iter().enumerate() {
        let mut union = BTreeSet::new();
        for f in &c.faces {
            if is_subset(&f.vertices, fs) {
                union.extend(f.vertices.iter().copied());
            }
        }
        if &union != fs {
            push_offender(&mut cover, format!("facet {k} is not the union of its faces"));
        }
    }
    checks.push(CheckResult { name: "facets_covered_by_faces".into(), passed: cover.is_empty(), offenders: cover });
    ColexReport { checks }
}

impl Colex {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn facet(&self, missing_color: Color) -> Option<&Facet> {
        self.facets.iter().find(|f| f.missing_color == missing_color)
    }

    /// Indices of cells that meet the facet with the given label.
    pub fn cells_touching_facet(&self, missing_color: Color) -> Vec<usize> {
        let Some(f) = self.facet(missing_color) else { return Vec::new() };
        let fs: BTreeSet<usize> = f.vertices.iter().copied().collect();
        (0..self.cells.len()).filter(|&i| self.cells[i].vertices.iter().any(|v| fs.contains(v))).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parses a colex file; vertex ids may be any distinct integers and are
    /// renumbered densely in listed order.
    pub fn from_json(text: &str) -> Result<Colex> {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(rename = "L")]
            l: usize,
            vertices: Vec<i64>,
            cells: Vec<RawCell>,
            faces: Vec<RawFace>,
            facets: Vec<RawFacet>,
        }
        #[derive(Deserialize)]
        struct RawCell {
            color: Color,
            vertices: Vec<i64>,
        }
        #[derive(Deserialize)]
        struct RawFace {
            colors: [Color; 2],
            vertices: Vec<i64>,
        }
        #[derive(Deserialize)]
        struct RawFacet {
            missing_color: Color,
            vertices: Vec<i64>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| Error::Parse(format!("colex file: {e}")))?;
        let mut ids: HashMap<i64, usize> = HashMap::new();
        for (i, &v) in raw.vertices.iter().enumerate() {
            if ids.insert(v, i).is_some() {
                return Err(Error::Parse(format!("vertices[{i}]: duplicate vertex id {v}")));
            }
        }
        let map = |field: &str, idx: usize, vs: &[i64]| -> Result<Vec<usize>> {
            vs.iter()
                .enumerate()
                .map(|(j, v)| {
                    ids.get(v).copied().ok_or_else(|| Error::Parse(format!("{field}[{idx}].vertices[{j}]: unknown vertex id {v}")))
                })
                .collect()
        };
        let mut cells = Vec::new();
        for (i, x) in raw.cells.iter().enumerate() {
            cells.push(Cell { color: x.color, vertices: map("cells", i, &x.vertices)? });
        }
        let mut faces = Vec::new();
        for (i, x) in raw.faces.iter().enumerate() {
            faces.push(Face { colors: x.colors, vertices: map("faces", i, &x.vertices)? });
        }
        let mut facets = Vec::new();
        for (i, x) in raw.facets.iter().enumerate() {
            facets.push(Facet { missing_color: x.missing_color, vertices: map("facets", i, &x.vertices)? });
        }
        Ok(Colex { l: raw.l, vertices: (0..raw.vertices.len()).collect(), cells, faces, facets })
    }

    pub fn export(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn import(path: &Path) -> Result<Colex> {
        Colex::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_cycle_through_planes() {
        assert_eq!(region_offsets(3), [0, 1, 2, 3]);
        assert_eq!(region_offsets(5), [0, 1, 2, 7]);
        assert_eq!(region_offsets(11), [4, 5, 6, 7]);
    }

    #[test]
    fn smallest_member() {
        let c = build_tetrahedral_colex(3).unwrap();
        assert_eq!(c.num_vertices(), 15);
        assert_eq!(c.cells.len(), 4);
        assert!(c.facets.iter().all(|f| f.vertices.len() == 7));
        assert!(validate_colex(&c).passed());
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(build_tetrahedral_colex(4).is_err());
        assert!(build_tetrahedral_colex(1).is_err());
    }
}
