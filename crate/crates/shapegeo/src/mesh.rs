//! Closed oriented triangle meshes: construction, validation, topology
//! queries and OFF/OBJ file I/O.
//!
//! A [`TriMesh`] is immutable after construction. All meshes along an
//! optimization path share one topology (face array, edge list, vertex
//! stars) behind an `Arc`; only vertex positions vary.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use nalgebra::{Point3, Vector3};

use crate::error::{Error, Result};
use crate::numerics::Accumulator;

/// Relative area floor below which a triangle counts as degenerate.
pub const DEFAULT_AREA_FLOOR: f64 = 1e-12;

/// Largest accepted icosphere subdivision level (resource guard).
pub const MAX_SUBDIVISION_LEVEL: u32 = 8;

#[derive(Debug)]
struct Topology {
    faces: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    /// Incident faces per vertex, in cyclic order around the outward normal.
    vertex_stars: Vec<Vec<usize>>,
    area_floor_rel: f64,
}

/// Immutable closed oriented triangle mesh.
#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Point3<f64>>,
    topology: Arc<Topology>,
}

impl TriMesh {
    /// Build a mesh and validate all invariants: face indices in range,
    /// no repeated indices, every edge shared by exactly two faces with
    /// opposite orientation, disk-like vertex neighborhoods, and no
    /// triangle below the relative area floor.
    pub fn new(vertices: Vec<Point3<f64>>, faces: Vec<[usize; 3]>) -> Result<Self> {
        Self::with_area_floor(vertices, faces, DEFAULT_AREA_FLOOR)
    }

    /// Like [`TriMesh::new`] with a custom relative area floor.
    pub fn with_area_floor(
        vertices: Vec<Point3<f64>>,
        faces: Vec<[usize; 3]>,
        area_floor_rel: f64,
    ) -> Result<Self> {
        if faces.is_empty() {
            return Err(Error::EmptyMesh);
        }
        let vertex_count = vertices.len();
        for (fi, f) in faces.iter().enumerate() {
            for &i in f {
                if i >= vertex_count {
                    return Err(Error::FaceIndexOutOfRange {
                        face: fi,
                        index: i,
                        vertex_count,
                    });
                }
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::RepeatedFaceIndices {
                    face: fi,
                    indices: *f,
                });
            }
        }

        let edges = check_edges(&faces)?;
        let vertex_stars = build_vertex_stars(vertex_count, &faces)?;

        let topology = Arc::new(Topology {
            faces,
            edges,
            vertex_stars,
            area_floor_rel,
        });
        let mesh = TriMesh { vertices, topology };
        mesh.check_face_areas()?;
        Ok(mesh)
    }

    /// Reuse this mesh's topology with new vertex positions. Only the
    /// area floor is re-checked; the combinatorics are shared.
    pub fn with_positions(&self, vertices: Vec<Point3<f64>>) -> Result<Self> {
        if vertices.len() != self.vertex_count() {
            return Err(Error::CombinatoricsMismatch {
                reason: format!(
                    "expected {} vertices, got {}",
                    self.vertex_count(),
                    vertices.len()
                ),
            });
        }
        let mesh = TriMesh {
            vertices,
            topology: Arc::clone(&self.topology),
        };
        mesh.check_face_areas()?;
        Ok(mesh)
    }

    /// Apply a position map to every vertex, keeping the topology.
    pub fn map_positions<F: FnMut(&Point3<f64>) -> Point3<f64>>(&self, mut f: F) -> Result<Self> {
        self.with_positions(self.vertices.iter().map(|p| f(p)).collect())
    }

    fn check_face_areas(&self) -> Result<()> {
        let faces = &self.topology.faces;
        let mut areas = Vec::with_capacity(faces.len());
        let mut total = Accumulator::new();
        for f in faces {
            let a = self.face_area_from(f);
            total.add(a);
            areas.push(a);
        }
        let floor = self.topology.area_floor_rel * total.total() / faces.len() as f64;
        for (fi, &a) in areas.iter().enumerate() {
            if a <= floor {
                return Err(Error::DegenerateFace {
                    face: fi,
                    area: a,
                    floor,
                });
            }
        }
        Ok(())
    }

    fn face_area_from(&self, f: &[usize; 3]) -> f64 {
        let (p0, p1, p2) = (
            self.vertices[f[0]],
            self.vertices[f[1]],
            self.vertices[f[2]],
        );
        0.5 * (p1 - p0).cross(&(p2 - p0)).norm()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.topology.faces.len()
    }

    pub fn edge_count(&self) -> usize {
        self.topology.edges.len()
    }

    /// V − E + F; equals 2 for the genus-0 meshes used throughout.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn position(&self, vertex: usize) -> Point3<f64> {
        self.vertices[vertex]
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.topology.faces
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.topology.edges
    }

    /// Faces incident to `vertex`, in cyclic order.
    pub fn vertex_star(&self, vertex: usize) -> &[usize] {
        &self.topology.vertex_stars[vertex]
    }

    /// True when both meshes share the same face array and vertex count.
    pub fn shares_combinatorics(&self, other: &TriMesh) -> bool {
        self.vertex_count() == other.vertex_count()
            && (Arc::ptr_eq(&self.topology, &other.topology) || self.faces() == other.faces())
    }

    pub fn face_area(&self, face: usize) -> f64 {
        self.face_area_from(&self.topology.faces[face])
    }

    /// Area-weighted face normal, `area(f) * unit_normal(f)`.
    pub fn face_area_normal(&self, face: usize) -> Vector3<f64> {
        let f = &self.topology.faces[face];
        let (p0, p1, p2) = (
            self.vertices[f[0]],
            self.vertices[f[1]],
            self.vertices[f[2]],
        );
        0.5 * (p1 - p0).cross(&(p2 - p0))
    }

    /// Total surface area (compensated sum over faces).
    pub fn total_area(&self) -> f64 {
        let mut acc = Accumulator::new();
        for f in &self.topology.faces {
            acc.add(self.face_area_from(f));
        }
        acc.total()
    }

    /// Signed enclosed volume by the divergence theorem,
    /// `Σ_f det[p0, p1, p2] / 6`; positive for outward orientation.
    pub fn enclosed_volume(&self) -> f64 {
        let mut acc = Accumulator::new();
        for f in &self.topology.faces {
            let (p0, p1, p2) = (
                self.vertices[f[0]].coords,
                self.vertices[f[1]].coords,
                self.vertices[f[2]].coords,
            );
            acc.add(p0.dot(&p1.cross(&p2)) / 6.0);
        }
        acc.total()
    }

    /// Arithmetic mean of the vertex positions.
    pub fn centroid(&self) -> Point3<f64> {
        let mut acc = crate::numerics::VectorAccumulator::new();
        for p in &self.vertices {
            acc.add(p.coords);
        }
        Point3::from(acc.total() / self.vertex_count() as f64)
    }
}

/// Per-vertex data attached to a mesh: scalars or vectors, one per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexField<S> {
    values: Vec<S>,
}

impl<S> VertexField<S> {
    pub fn new(mesh: &TriMesh, values: Vec<S>) -> Result<Self> {
        if values.len() != mesh.vertex_count() {
            return Err(Error::FieldLengthMismatch {
                got: values.len(),
                expected: mesh.vertex_count(),
            });
        }
        Ok(Self { values })
    }

    pub fn constant(mesh: &TriMesh, value: S) -> Self
    where
        S: Clone,
    {
        Self {
            values: vec![value; mesh.vertex_count()],
        }
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl<S> std::ops::Index<usize> for VertexField<S> {
    type Output = S;
    fn index(&self, i: usize) -> &S {
        &self.values[i]
    }
}

/// Validate edge structure and return the undirected edge list.
fn check_edges(faces: &[[usize; 3]]) -> Result<Vec<[usize; 2]>> {
    let mut directed: HashMap<(usize, usize), u32> = HashMap::with_capacity(faces.len() * 3);
    for f in faces {
        for k in 0..3 {
            let e = (f[k], f[(k + 1) % 3]);
            *directed.entry(e).or_insert(0) += 1;
        }
    }
    let mut edges = Vec::with_capacity(faces.len() * 3 / 2);
    for f in faces {
        for k in 0..3 {
            let (i, j) = (f[k], f[(k + 1) % 3]);
            let fwd = directed[&(i, j)];
            let rev = directed.get(&(j, i)).copied().unwrap_or(0);
            let total = fwd + rev;
            if total > 2 {
                return Err(Error::NonManifoldEdge {
                    a: i.min(j),
                    b: i.max(j),
                    count: total as usize,
                });
            }
            if fwd == 2 {
                return Err(Error::InconsistentOrientation {
                    a: i.min(j),
                    b: i.max(j),
                });
            }
            if rev == 0 {
                return Err(Error::BoundaryEdge { a: i, b: j });
            }
            if i < j {
                edges.push([i, j]);
            }
        }
    }
    Ok(edges)
}

/// For every vertex walk its incident faces into a single cycle. Fails on
/// pinched (non-disk) neighborhoods.
fn build_vertex_stars(vertex_count: usize, faces: &[[usize; 3]]) -> Result<Vec<Vec<usize>>> {
    // For vertex p and an incident face rotated to (p, a, b), walking in
    // cyclic order continues with the face whose rotation is (p, b, _).
    let mut outgoing: Vec<HashMap<usize, (usize, usize)>> = vec![HashMap::new(); vertex_count];
    let mut incident_counts = vec![0usize; vertex_count];
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..3 {
            let (p, a, b) = (f[k], f[(k + 1) % 3], f[(k + 2) % 3]);
            incident_counts[p] += 1;
            if outgoing[p].insert(a, (fi, b)).is_some() {
                return Err(Error::NonManifoldVertex { vertex: p });
            }
        }
    }
    let mut stars = Vec::with_capacity(vertex_count);
    for p in 0..vertex_count {
        let count = incident_counts[p];
        if count == 0 {
            // Isolated vertices never occur in meshes that passed edge
            // checks built from their own face list, but a caller may pass
            // unused vertices; treat as a pinch.
            return Err(Error::NonManifoldVertex { vertex: p });
        }
        let (&start, &(first_face, mut next)) = outgoing[p].iter().min().unwrap();
        let mut star = Vec::with_capacity(count);
        star.push(first_face);
        while next != start {
            match outgoing[p].get(&next) {
                Some(&(face, after)) => {
                    star.push(face);
                    next = after;
                }
                None => return Err(Error::NonManifoldVertex { vertex: p }),
            }
            if star.len() > count {
                return Err(Error::NonManifoldVertex { vertex: p });
            }
        }
        if star.len() != count {
            return Err(Error::NonManifoldVertex { vertex: p });
        }
        stars.push(star);
    }
    Ok(stars)
}

/// Generate an icosphere: the icosahedron subdivided `level` times with
/// every vertex projected to distance `radius` from `center`.
///
/// The result has `20·4^level` faces and `2 + 10·4^level` vertices,
/// outward oriented.
pub fn make_icosphere(level: u32, radius: f64, center: Point3<f64>) -> Result<TriMesh> {
    if level > MAX_SUBDIVISION_LEVEL {
        return Err(Error::SubdivisionTooDeep {
            level,
            max: MAX_SUBDIVISION_LEVEL,
        });
    }
    if radius <= 0.0 {
        return Err(Error::NonpositiveRadius { radius });
    }

    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let mut directions: Vec<Vector3<f64>> = vec![
        Vector3::new(-1.0, phi, 0.0),
        Vector3::new(1.0, phi, 0.0),
        Vector3::new(-1.0, -phi, 0.0),
        Vector3::new(1.0, -phi, 0.0),
        Vector3::new(0.0, -1.0, phi),
        Vector3::new(0.0, 1.0, phi),
        Vector3::new(0.0, -1.0, -phi),
        Vector3::new(0.0, 1.0, -phi),
        Vector3::new(phi, 0.0, -1.0),
        Vector3::new(phi, 0.0, 1.0),
        Vector3::new(-phi, 0.0, -1.0),
        Vector3::new(-phi, 0.0, 1.0),
    ]
    .into_iter()
    .map(|v| v.normalize())
    .collect();

    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..level {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next_faces = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut mids = [0usize; 3];
            for k in 0..3 {
                let (i, j) = (f[k], f[(k + 1) % 3]);
                let key = (i.min(j), i.max(j));
                mids[k] = *midpoints.entry(key).or_insert_with(|| {
                    let m = (directions[i] + directions[j]).normalize();
                    directions.push(m);
                    directions.len() - 1
                });
            }
            next_faces.push([f[0], mids[0], mids[2]]);
            next_faces.push([f[1], mids[1], mids[0]]);
            next_faces.push([f[2], mids[2], mids[1]]);
            next_faces.push([mids[0], mids[1], mids[2]]);
        }
        faces = next_faces;
    }

    let vertices = directions
        .into_iter()
        .map(|d| center + radius * d)
        .collect();
    TriMesh::new(vertices, faces)
}

/// One midpoint subdivision step without projection: each triangle becomes
/// four, positions interpolated linearly. Useful for building refinement
/// families of non-spherical shapes.
pub fn subdivide_midpoint(mesh: &TriMesh) -> Result<TriMesh> {
    let mut vertices = mesh.vertices().to_vec();
    let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
    let mut faces = Vec::with_capacity(mesh.face_count() * 4);
    for f in mesh.faces() {
        let mut mids = [0usize; 3];
        for k in 0..3 {
            let (i, j) = (f[k], f[(k + 1) % 3]);
            let key = (i.min(j), i.max(j));
            mids[k] = *midpoints.entry(key).or_insert_with(|| {
                let m = Point3::from((vertices[i].coords + vertices[j].coords) / 2.0);
                vertices.push(m);
                vertices.len() - 1
            });
        }
        faces.push([f[0], mids[0], mids[2]]);
        faces.push([f[1], mids[1], mids[0]]);
        faces.push([f[2], mids[2], mids[1]]);
        faces.push([mids[0], mids[1], mids[2]]);
    }
    TriMesh::new(vertices, faces)
}

/// Mesh interchange formats. OFF is the canonical format; OBJ is supported
/// for convenience.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Option<MeshFormat> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "off" => Some(MeshFormat::Off),
            "obj" => Some(MeshFormat::Obj),
            _ => None,
        }
    }
}

/// Load and validate a mesh. Orientation problems are reported, not repaired.
pub fn load_mesh(path: &Path, format: MeshFormat) -> Result<TriMesh> {
    let text = fs::read_to_string(path)?;
    match format {
        MeshFormat::Off => parse_off(&text),
        MeshFormat::Obj => parse_obj(&text),
    }
}

/// Write a mesh with 17 significant digits so that loading reproduces the
/// coordinates bit-exactly.
pub fn save_mesh(mesh: &TriMesh, path: &Path, format: MeshFormat) -> Result<()> {
    let text = match format {
        MeshFormat::Off => format_off(mesh),
        MeshFormat::Obj => format_obj(mesh),
    };
    fs::write(path, text)?;
    Ok(())
}

fn format_off(mesh: &TriMesh) -> String {
    let mut out = String::new();
    out.push_str("OFF\n");
    let _ = writeln!(
        out,
        "{} {} {}",
        mesh.vertex_count(),
        mesh.face_count(),
        mesh.edge_count()
    );
    for p in mesh.vertices() {
        let _ = writeln!(out, "{:.16e} {:.16e} {:.16e}", p.x, p.y, p.z);
    }
    for f in mesh.faces() {
        let _ = writeln!(out, "3 {} {} {}", f[0], f[1], f[2]);
    }
    out
}

fn format_obj(mesh: &TriMesh) -> String {
    let mut out = String::new();
    for p in mesh.vertices() {
        let _ = writeln!(out, "v {:.16e} {:.16e} {:.16e}", p.x, p.y, p.z);
    }
    for f in mesh.faces() {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

struct TokenLines<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> TokenLines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            lines: text.lines().enumerate(),
        }
    }

    /// Next non-empty, non-comment line as (1-based line number, tokens).
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (idx, line) in self.lines.by_ref() {
            let stripped = match line.find('#') {
                Some(pos) => &line[..pos],
                None => line,
            };
            let tokens: Vec<&str> = stripped.split_whitespace().collect();
            if !tokens.is_empty() {
                return Some((idx + 1, tokens));
            }
        }
        None
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_f64(line: usize, token: &str) -> Result<f64> {
    token
        .parse::<f64>()
        .map_err(|_| parse_err(line, format!("invalid number {token:?}")))
}

fn parse_usize(line: usize, token: &str) -> Result<usize> {
    token
        .parse::<usize>()
        .map_err(|_| parse_err(line, format!("invalid index {token:?}")))
}

fn parse_off(text: &str) -> Result<TriMesh> {
    let mut lines = TokenLines::new(text);
    let (header_line, mut header) = lines
        .next_tokens()
        .ok_or_else(|| parse_err(1, "empty file"))?;
    if header[0] != "OFF" {
        return Err(parse_err(header_line, "missing OFF header"));
    }
    header.remove(0);
    let (counts_line, counts) = if header.is_empty() {
        lines
            .next_tokens()
            .ok_or_else(|| parse_err(header_line, "missing counts line"))?
    } else {
        (header_line, header)
    };
    if counts.len() < 2 {
        return Err(parse_err(counts_line, "expected vertex and face counts"));
    }
    let vertex_count = parse_usize(counts_line, counts[0])?;
    let face_count = parse_usize(counts_line, counts[1])?;

    let mut vertices = Vec::with_capacity(vertex_count);
    for _ in 0..vertex_count {
        let (line, tokens) = lines
            .next_tokens()
            .ok_or_else(|| parse_err(counts_line, "unexpected end of file in vertex list"))?;
        if tokens.len() < 3 {
            return Err(parse_err(line, "expected three coordinates"));
        }
        vertices.push(Point3::new(
            parse_f64(line, tokens[0])?,
            parse_f64(line, tokens[1])?,
            parse_f64(line, tokens[2])?,
        ));
    }
    let mut faces = Vec::with_capacity(face_count);
    for _ in 0..face_count {
        let (line, tokens) = lines
            .next_tokens()
            .ok_or_else(|| parse_err(counts_line, "unexpected end of file in face list"))?;
        if tokens[0] != "3" {
            return Err(parse_err(line, "only triangular faces are supported"));
        }
        if tokens.len() < 4 {
            return Err(parse_err(line, "expected three vertex indices"));
        }
        faces.push([
            parse_usize(line, tokens[1])?,
            parse_usize(line, tokens[2])?,
            parse_usize(line, tokens[3])?,
        ]);
    }
    TriMesh::new(vertices, faces)
}

fn parse_obj(text: &str) -> Result<TriMesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let mut lines = TokenLines::new(text);
    while let Some((line, tokens)) = lines.next_tokens() {
        match tokens[0] {
            "v" => {
                if tokens.len() < 4 {
                    return Err(parse_err(line, "expected three coordinates"));
                }
                vertices.push(Point3::new(
                    parse_f64(line, tokens[1])?,
                    parse_f64(line, tokens[2])?,
                    parse_f64(line, tokens[3])?,
                ));
            }
            "f" => {
                if tokens.len() != 4 {
                    return Err(parse_err(line, "only triangular faces are supported"));
                }
                let mut f = [0usize; 3];
                for (k, token) in tokens[1..4].iter().enumerate() {
                    let head = token.split('/').next().unwrap_or(token);
                    let idx = parse_usize(line, head)?;
                    if idx == 0 {
                        return Err(parse_err(line, "face indices are 1-based"));
                    }
                    f[k] = idx - 1;
                }
                faces.push(f);
            }
            _ => {}
        }
    }
    TriMesh::new(vertices, faces)
}

/// The twelve-triangle boundary of an axis-aligned box. Used by tests and
/// as a simple closed non-smooth shape.
pub fn make_box(min: Point3<f64>, max: Point3<f64>) -> Result<TriMesh> {
    let (x0, y0, z0) = (min.x, min.y, min.z);
    let (x1, y1, z1) = (max.x, max.y, max.z);
    let vertices = vec![
        Point3::new(x0, y0, z0), // 0
        Point3::new(x1, y0, z0), // 1
        Point3::new(x1, y1, z0), // 2
        Point3::new(x0, y1, z0), // 3
        Point3::new(x0, y0, z1), // 4
        Point3::new(x1, y0, z1), // 5
        Point3::new(x1, y1, z1), // 6
        Point3::new(x0, y1, z1), // 7
    ];
    let faces = vec![
        // bottom (z = z0), outward normal -z
        [0, 2, 1],
        [0, 3, 2],
        // top (z = z1), outward normal +z
        [4, 5, 6],
        [4, 6, 7],
        // front (y = y0), outward normal -y
        [0, 1, 5],
        [0, 5, 4],
        // right (x = x1), outward normal +x
        [1, 2, 6],
        [1, 6, 5],
        // back (y = y1), outward normal +y
        [2, 3, 7],
        [2, 7, 6],
        // left (x = x0), outward normal -x
        [3, 0, 4],
        [3, 4, 7],
    ];
    TriMesh::new(vertices, faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn icosahedron_combinatorics() {
        let mesh = make_icosphere(0, 1.0, Point3::origin()).unwrap();
        assert_eq!(mesh.face_count(), 20);
        assert_eq!(mesh.vertex_count(), 12);
        assert_eq!(mesh.edge_count(), 30);
        assert_eq!(mesh.euler_characteristic(), 2);
    }

    #[test]
    fn icosphere_level_2_matches_published_counts() {
        let mesh = make_icosphere(2, 1.0, Point3::origin()).unwrap();
        assert_eq!(mesh.face_count(), 320);
        assert_eq!(mesh.vertex_count(), 162);
        assert_eq!(mesh.euler_characteristic(), 2);
    }

    #[test]
    fn icosphere_counts_follow_subdivision_law() {
        for level in 0..4 {
            let mesh = make_icosphere(level, 1.0, Point3::origin()).unwrap();
            let quad = 4usize.pow(level);
            assert_eq!(mesh.face_count(), 20 * quad);
            assert_eq!(mesh.edge_count(), 30 * quad);
            assert_eq!(mesh.vertex_count(), 2 + 10 * quad);
        }
    }

    #[test]
    fn icosphere_vertices_at_exact_radius() {
        let center = Point3::new(1.0, 0.0, 0.0);
        let mesh = make_icosphere(1, 2.0, center).unwrap();
        for p in mesh.vertices() {
            assert_relative_eq!((p - center).norm(), 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn icosphere_rejects_deep_subdivision() {
        let err = make_icosphere(9, 1.0, Point3::origin()).unwrap_err();
        assert!(matches!(err, Error::SubdivisionTooDeep { level: 9, .. }));
    }

    #[test]
    fn icosphere_is_outward_oriented() {
        let mesh = make_icosphere(1, 1.0, Point3::origin()).unwrap();
        assert!(mesh.enclosed_volume() > 0.0);
    }

    #[test]
    fn cube_combinatorics_and_volume() {
        let mesh = make_box(Point3::origin(), Point3::new(1.0, 1.0, 1.0)).unwrap();
        assert_eq!(mesh.vertex_count(), 8);
        assert_eq!(mesh.edge_count(), 18);
        assert_eq!(mesh.face_count(), 12);
        assert_eq!(mesh.euler_characteristic(), 2);
        assert_relative_eq!(mesh.enclosed_volume(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn volume_flips_sign_under_orientation_reversal() {
        let mesh = make_box(Point3::origin(), Point3::new(1.0, 1.0, 1.0)).unwrap();
        let reversed: Vec<[usize; 3]> = mesh.faces().iter().map(|f| [f[0], f[2], f[1]]).collect();
        let flipped = TriMesh::new(mesh.vertices().to_vec(), reversed).unwrap();
        assert_relative_eq!(flipped.enclosed_volume(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn icosphere_volume_converges_to_ball_from_below() {
        let ball = 4.0 / 3.0 * std::f64::consts::PI;
        let mut previous = 0.0;
        for level in 1..=4 {
            let v = make_icosphere(level, 1.0, Point3::origin())
                .unwrap()
                .enclosed_volume();
            assert!(v < ball);
            assert!(v > previous);
            previous = v;
        }
        // Level 4 is within one percent of the smooth ball.
        assert!(previous > ball * 0.99);
    }

    /// Independent volume oracle: pyramid decomposition Σ area·distance/3
    /// over face planes, algebraically distinct from the determinant sum.
    #[test]
    fn enclosed_volume_matches_pyramid_decomposition() {
        let mesh = make_icosphere(3, 1.3, Point3::origin()).unwrap();
        let mut oracle = 0.0;
        for fi in 0..mesh.face_count() {
            let f = mesh.faces()[fi];
            let n = mesh.face_area_normal(fi);
            let area = n.norm();
            let unit = n / area;
            let d = unit.dot(&mesh.position(f[0]).coords);
            oracle += area * d / 3.0;
        }
        assert_relative_eq!(mesh.enclosed_volume(), oracle, epsilon = 1e-12);
    }

    #[test]
    fn every_edge_has_two_opposite_faces() {
        let mesh = make_icosphere(2, 1.0, Point3::origin()).unwrap();
        let mut directed: HashMap<(usize, usize), u32> = HashMap::new();
        for f in mesh.faces() {
            for k in 0..3 {
                *directed.entry((f[k], f[(k + 1) % 3])).or_insert(0) += 1;
            }
        }
        for (&(i, j), &count) in &directed {
            assert_eq!(count, 1);
            assert_eq!(directed.get(&(j, i)), Some(&1));
        }
    }

    #[test]
    fn vertex_stars_are_cyclic() {
        let mesh = make_icosphere(1, 1.0, Point3::origin()).unwrap();
        for v in 0..mesh.vertex_count() {
            let star = mesh.vertex_star(v);
            assert!(star.len() == 5 || star.len() == 6);
            for &f in star {
                assert!(mesh.faces()[f].contains(&v));
            }
            // Consecutive star faces share an edge through v.
            for w in 0..star.len() {
                let a = mesh.faces()[star[w]];
                let b = mesh.faces()[star[(w + 1) % star.len()]];
                let shared = a.iter().filter(|i| b.contains(i)).count();
                assert_eq!(shared, 2);
            }
        }
    }

    #[test]
    fn boundary_mesh_is_rejected() {
        let vertices = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
        ];
        let err = TriMesh::new(vertices, vec![[0, 1, 2]]).unwrap_err();
        assert!(matches!(err, Error::BoundaryEdge { .. }));
    }

    #[test]
    fn inconsistent_orientation_is_rejected() {
        let mesh = make_box(Point3::origin(), Point3::new(1.0, 1.0, 1.0)).unwrap();
        let mut faces = mesh.faces().to_vec();
        faces[0] = [faces[0][0], faces[0][2], faces[0][1]];
        let err = TriMesh::new(mesh.vertices().to_vec(), faces).unwrap_err();
        assert!(matches!(
            err,
            Error::InconsistentOrientation { .. } | Error::BoundaryEdge { .. }
        ));
    }

    #[test]
    fn degenerate_face_is_rejected() {
        let mesh = make_icosphere(1, 1.0, Point3::origin()).unwrap();
        let mut vertices = mesh.vertices().to_vec();
        // Collapse vertex 0 onto one of its neighbors.
        let neighbor = mesh.faces()[mesh.vertex_star(0)[0]]
            .iter()
            .copied()
            .find(|&i| i != 0)
            .unwrap();
        vertices[0] = vertices[neighbor];
        let err = TriMesh::new(vertices, mesh.faces().to_vec()).unwrap_err();
        assert!(matches!(err, Error::DegenerateFace { .. }));
    }

    #[test]
    fn off_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ico.off");
        let mesh = make_icosphere(1, 1.0, Point3::origin()).unwrap();
        save_mesh(&mesh, &path, MeshFormat::Off).unwrap();
        let loaded = load_mesh(&path, MeshFormat::Off).unwrap();
        assert_eq!(loaded.vertices(), mesh.vertices());
        assert_eq!(loaded.faces(), mesh.faces());
    }

    #[test]
    fn obj_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ico.obj");
        let mesh = make_icosphere(1, 0.7, Point3::new(0.1, -0.2, 0.3)).unwrap();
        save_mesh(&mesh, &path, MeshFormat::Obj).unwrap();
        let loaded = load_mesh(&path, MeshFormat::Obj).unwrap();
        assert_eq!(loaded.vertices(), mesh.vertices());
        assert_eq!(loaded.faces(), mesh.faces());
    }

    #[test]
    fn off_cube_file_parses() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cube.off");
        let cube = make_box(Point3::origin(), Point3::new(1.0, 1.0, 1.0)).unwrap();
        save_mesh(&cube, &path, MeshFormat::Off).unwrap();
        let loaded = load_mesh(&path, MeshFormat::Off).unwrap();
        assert_eq!(loaded.vertex_count(), 8);
        assert_eq!(loaded.edge_count(), 18);
        assert_eq!(loaded.face_count(), 12);
        assert_eq!(loaded.euler_characteristic(), 2);
    }

    #[test]
    fn non_manifold_edge_is_reported_with_the_edge() {
        // Two triangles stacked on edge (0, 1) plus a third fin.
        let text = "OFF\n5 3 0\n0 0 0\n1 0 0\n0 1 0\n0 -1 0\n0 0 1\n3 0 1 2\n3 1 0 3\n3 0 1 4\n";
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fin.off");
        fs::write(&path, text).unwrap();
        let err = load_mesh(&path, MeshFormat::Off).unwrap_err();
        match err {
            Error::NonManifoldEdge { a, b, count } => {
                assert_eq!((a, b), (0, 1));
                assert_eq!(count, 3);
            }
            other => panic!("expected non-manifold edge error, got {other}"),
        }
    }

    #[test]
    fn malformed_off_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.off");
        fs::write(&path, "OFF\n3 1 0\n0 0 0\n1 0 zebra\n0 1 0\n3 0 1 2\n").unwrap();
        let err = load_mesh(&path, MeshFormat::Off).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn save_to_missing_directory_fails_with_io_error() {
        let mesh = make_icosphere(0, 1.0, Point3::origin()).unwrap();
        let err = save_mesh(
            &mesh,
            Path::new("/nonexistent-shapegeo-dir/mesh.off"),
            MeshFormat::Off,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Io(_)));
    }

    #[test]
    fn with_positions_shares_topology_and_checks_count() {
        let mesh = make_icosphere(1, 1.0, Point3::origin()).unwrap();
        let scaled = mesh.map_positions(|p| Point3::from(p.coords * 2.0)).unwrap();
        assert!(mesh.shares_combinatorics(&scaled));
        let err = mesh.with_positions(vec![Point3::origin(); 3]).unwrap_err();
        assert!(matches!(err, Error::CombinatoricsMismatch { .. }));
    }
}
