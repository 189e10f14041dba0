//! MovingAI grid maps and scenarios, the 4-neighborhood graph built from them,
//! and the square field-of-view function.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense id of a passable cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vertex(pub u32);

impl Vertex {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error)]
pub enum MapError {
    #[error("cannot read map: {0}")]
    Io(#[from] std::io::Error),
    #[error("map line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("map has no passable cells")]
    Empty,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario: {0}")]
    Io(#[from] std::io::Error),
    #[error("scenario line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("scenario line {line}: ({x}, {y}) is not a passable cell")]
    Blocked { line: usize, x: u32, y: u32 },
    #[error("scenario line {line}: declared {width}x{height}, map is {map_width}x{map_height}")]
    DimensionMismatch {
        line: usize,
        width: u32,
        height: u32,
        map_width: u32,
        map_height: u32,
    },
}

const NO_VERTEX: u32 = u32::MAX;

/// Graph of passable grid cells with orthogonal adjacency.
///
/// Coordinates are zero-based: `x` is the column, `y` the row. Immutable after
/// construction.
#[derive(Debug, Clone)]
pub struct GridWorld {
    name: String,
    width: u32,
    height: u32,
    cell_vertex: Vec<u32>,
    coords: Vec<(u32, u32)>,
    adjacency: Vec<Vec<Vertex>>,
}

impl PartialEq for GridWorld {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height && self.cell_vertex == other.cell_vertex
    }
}

impl Eq for GridWorld {}

impl GridWorld {
    /// Builds a world from a passability mask laid out row-major.
    pub fn from_mask(name: &str, width: u32, height: u32, passable: &[bool]) -> Result<Self, MapError> {
        assert_eq!(passable.len(), (width * height) as usize, "mask size mismatch");
        let mut cell_vertex = vec![NO_VERTEX; passable.len()];
        let mut coords = Vec::new();
        for y in 0..height {
            for x in 0..width {
                let cell = (y * width + x) as usize;
                if passable[cell] {
                    cell_vertex[cell] = coords.len() as u32;
                    coords.push((x, y));
                }
            }
        }
        if coords.is_empty() {
            return Err(MapError::Empty);
        }
        let mut world = GridWorld {
            name: name.to_string(),
            width,
            height,
            cell_vertex,
            coords,
            adjacency: Vec::new(),
        };
        world.adjacency = (0..world.coords.len())
            .map(|i| {
                let (x, y) = world.coords[i];
                let mut out = Vec::with_capacity(4);
                let steps: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
                for (dx, dy) in steps {
                    if let Some(v) = world.vertex_at_signed(x as i64 + dx, y as i64 + dy) {
                        out.push(v);
                    }
                }
                out
            })
            .collect();
        Ok(world)
    }

    /// Parses `.map` text. `name` is only used for reporting.
    pub fn parse_map(name: &str, text: &str) -> Result<Self, MapError> {
        let mut lines = text.lines().map(|l| l.trim_end_matches('\r')).enumerate();
        let mut width = None;
        let mut height = None;
        loop {
            let (idx, line) = lines.next().ok_or(MapError::Parse {
                line: 0,
                reason: "missing `map` line".into(),
            })?;
            let line_no = idx + 1;
            let mut parts = line.split_whitespace();
            match (parts.next(), parts.next()) {
                (Some("type"), _) => {}
                (Some("height"), Some(v)) => height = Some(parse_dim(v, line_no)?),
                (Some("width"), Some(v)) => width = Some(parse_dim(v, line_no)?),
                (Some("map"), None) => break,
                _ => {
                    return Err(MapError::Parse {
                        line: line_no,
                        reason: format!("unexpected header line {line:?}"),
                    })
                }
            }
        }
        let (width, height) = match (width, height) {
            (Some(w), Some(h)) => (w, h),
            _ => {
                return Err(MapError::Parse {
                    line: 0,
                    reason: "header lacks width or height".into(),
                })
            }
        };
        let mut passable = Vec::with_capacity((width * height) as usize);
        for row in 0..height {
            let (idx, line) = lines.next().ok_or(MapError::Parse {
                line: 0,
                reason: format!("expected {height} rows, found {row}"),
            })?;
            let line_no = idx + 1;
            if line.chars().count() != width as usize {
                return Err(MapError::Parse {
                    line: line_no,
                    reason: format!("row has {} cells, expected {width}", line.chars().count()),
                });
            }
            for c in line.chars() {
                passable.push(match c {
                    '.' | 'G' | 'S' => true,
                    '@' | 'O' | 'T' | 'W' => false,
                    other => {
                        return Err(MapError::Parse {
                            line: line_no,
                            reason: format!("unknown cell character {other:?}"),
                        })
                    }
                });
            }
        }
        if let Some((idx, extra)) = lines.find(|(_, l)| !l.trim().is_empty()) {
            return Err(MapError::Parse {
                line: idx + 1,
                reason: format!("trailing content {extra:?} after {height} rows"),
            });
        }
        Self::from_mask(name, width, height, &passable)
    }

    pub fn load_map(path: impl AsRef<Path>) -> Result<Self, MapError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Self::parse_map(&name, &text)
    }

    /// Convenience for tests and examples: rows of `.`/`@` characters.
    pub fn from_rows(rows: &[&str]) -> Result<Self, MapError> {
        let height = rows.len() as u32;
        let width = rows.first().map(|r| r.len()).unwrap_or(0) as u32;
        let text = format!("type octile\nheight {height}\nwidth {width}\nmap\n{}\n", rows.join("\n"));
        Self::parse_map("inline", &text)
    }

    /// Open grid without obstacles.
    pub fn open(width: u32, height: u32) -> Self {
        Self::from_mask(
            &format!("empty-{width}-{height}"),
            width,
            height,
            &vec![true; (width * height) as usize],
        )
        .expect("open grid has cells")
    }

    /// Serializes back to `.map` text (`.` passable, `@` blocked).
    pub fn to_map_string(&self) -> String {
        let mut out = format!("type octile\nheight {}\nwidth {}\nmap\n", self.height, self.width);
        for y in 0..self.height {
            for x in 0..self.width {
                out.push(if self.is_passable(x, y) { '.' } else { '@' });
            }
            out.push('\n');
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn num_vertices(&self) -> usize {
        self.coords.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.coords.len() as u32).map(Vertex)
    }

    pub fn coords(&self, v: Vertex) -> (u32, u32) {
        self.coords[v.index()]
    }

    pub fn is_passable(&self, x: u32, y: u32) -> bool {
        self.vertex_at(x, y).is_some()
    }

    pub fn vertex_at(&self, x: u32, y: u32) -> Option<Vertex> {
        if x >= self.width || y >= self.height {
            return None;
        }
        match self.cell_vertex[(y * self.width + x) as usize] {
            NO_VERTEX => None,
            id => Some(Vertex(id)),
        }
    }

    fn vertex_at_signed(&self, x: i64, y: i64) -> Option<Vertex> {
        if x < 0 || y < 0 {
            return None;
        }
        self.vertex_at(x as u32, y as u32)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v.index() < self.coords.len()
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v.index()]
    }

    pub fn are_adjacent(&self, u: Vertex, v: Vertex) -> bool {
        self.neighbors(u).contains(&v)
    }

    /// Chebyshev distance between the cells of two vertices.
    #[inline]
    pub fn chebyshev(&self, u: Vertex, v: Vertex) -> u32 {
        let (ux, uy) = self.coords(u);
        let (vx, vy) = self.coords(v);
        ux.abs_diff(vx).max(uy.abs_diff(vy))
    }

    /// `u ∈ fov(v, r)`. Symmetric in `u` and `v`.
    #[inline]
    pub fn in_fov(&self, v: Vertex, u: Vertex, radius: u32) -> bool {
        self.chebyshev(u, v) <= radius
    }

    /// Passable vertices inside the `(2r+1)`-wide square centred on `v`.
    ///
    /// Walls do not occlude: the square is evaluated literally.
    pub fn fov(&self, v: Vertex, radius: u32) -> Vec<Vertex> {
        let mut out = Vec::new();
        self.for_each_in_fov(v, radius, |u| out.push(u));
        out
    }

    /// Visits `fov(v, r)` without allocating, in row-major order.
    pub fn for_each_in_fov(&self, v: Vertex, radius: u32, mut f: impl FnMut(Vertex)) {
        let (x, y) = self.coords(v);
        let x0 = x.saturating_sub(radius);
        let y0 = y.saturating_sub(radius);
        let x1 = (x + radius).min(self.width - 1);
        let y1 = (y + radius).min(self.height - 1);
        for cy in y0..=y1 {
            for cx in x0..=x1 {
                if let Some(u) = self.vertex_at(cx, cy) {
                    f(u);
                }
            }
        }
    }

    /// True if some vertex of `fov(v, r)` fails `pred`.
    pub fn any_in_fov(&self, v: Vertex, radius: u32, mut pred: impl FnMut(Vertex) -> bool) -> bool {
        let (x, y) = self.coords(v);
        let x0 = x.saturating_sub(radius);
        let y0 = y.saturating_sub(radius);
        let x1 = (x + radius).min(self.width - 1);
        let y1 = (y + radius).min(self.height - 1);
        for cy in y0..=y1 {
            for cx in x0..=x1 {
                if let Some(u) = self.vertex_at(cx, cy) {
                    if pred(u) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// BFS hop counts to `target`; `u32::MAX` marks unreachable vertices.
    pub fn distances_to(&self, target: Vertex) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.num_vertices()];
        let mut queue = std::collections::VecDeque::new();
        dist[target.index()] = 0;
        queue.push_back(target);
        while let Some(v) = queue.pop_front() {
            let d = dist[v.index()] + 1;
            for &u in self.neighbors(v) {
                if dist[u.index()] == u32::MAX {
                    dist[u.index()] = d;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Connected-component label per vertex.
    pub fn components(&self) -> Vec<u32> {
        let mut label = vec![u32::MAX; self.num_vertices()];
        let mut next = 0;
        for root in self.vertices() {
            if label[root.index()] != u32::MAX {
                continue;
            }
            let mut stack = vec![root];
            label[root.index()] = next;
            while let Some(v) = stack.pop() {
                for &u in self.neighbors(v) {
                    if label[u.index()] == u32::MAX {
                        label[u.index()] = next;
                        stack.push(u);
                    }
                }
            }
            next += 1;
        }
        label
    }
}

fn parse_dim(v: &str, line: usize) -> Result<u32, MapError> {
    match v.parse::<u32>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(MapError::Parse {
            line,
            reason: format!("bad dimension {v:?}"),
        }),
    }
}

/// One start/goal task of a scenario file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioEntry {
    pub start: Vertex,
    pub goal: Vertex,
}

/// Parses `.scen` text against `world`, preserving row order.
pub fn parse_scenario(text: &str, world: &GridWorld) -> Result<Vec<ScenarioEntry>, ScenarioError> {
    let mut lines = text.lines().map(|l| l.trim_end_matches('\r')).enumerate();
    match lines.find(|(_, l)| !l.trim().is_empty()) {
        Some((_, l)) if l.trim_start().starts_with("version") => {}
        Some((idx, l)) => {
            return Err(ScenarioError::Parse {
                line: idx + 1,
                reason: format!("expected `version` header, found {l:?}"),
            })
        }
        None => {
            return Err(ScenarioError::Parse {
                line: 0,
                reason: "empty scenario".into(),
            })
        }
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let mut fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 8 {
            fields = line.split_whitespace().collect();
        }
        if fields.len() < 8 {
            return Err(ScenarioError::Parse {
                line: line_no,
                reason: format!("expected at least 8 columns, found {}", fields.len()),
            });
        }
        let num = |i: usize| -> Result<u32, ScenarioError> {
            fields[i].trim().parse::<u32>().map_err(|_| ScenarioError::Parse {
                line: line_no,
                reason: format!("column {} is not an integer: {:?}", i + 1, fields[i]),
            })
        };
        let (w, h) = (num(2)?, num(3)?);
        if w != world.width() || h != world.height() {
            return Err(ScenarioError::DimensionMismatch {
                line: line_no,
                width: w,
                height: h,
                map_width: world.width(),
                map_height: world.height(),
            });
        }
        let cell = |x: u32, y: u32| world.vertex_at(x, y).ok_or(ScenarioError::Blocked { line: line_no, x, y });
        let start = cell(num(4)?, num(5)?)?;
        let goal = cell(num(6)?, num(7)?)?;
        out.push(ScenarioEntry { start, goal });
    }
    Ok(out)
}

pub fn load_scenario(path: impl AsRef<Path>, world: &GridWorld) -> Result<Vec<ScenarioEntry>, ScenarioError> {
    parse_scenario(&fs::read_to_string(path)?, world)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn open_three_by_three() {
        let w = GridWorld::from_rows(&["...", "...", "..."]).unwrap();
        assert_eq!(w.num_vertices(), 9);
        let center = w.vertex_at(1, 1).unwrap();
        assert_eq!(w.neighbors(center).len(), 4);
    }

    #[test]
    fn center_obstacle() {
        let w = GridWorld::from_rows(&["...", ".@.", "..."]).unwrap();
        assert_eq!(w.num_vertices(), 8);
        assert_eq!(w.neighbors(w.vertex_at(0, 0).unwrap()).len(), 2);
        assert!(w.vertex_at(1, 1).is_none());
    }

    #[test]
    fn cell_alphabet() {
        let w = GridWorld::from_rows(&[".GS", "@OT", "W.."]).unwrap();
        assert_eq!(w.num_vertices(), 5);
        let err = GridWorld::from_rows(&["..x"]).unwrap_err();
        assert!(matches!(err, MapError::Parse { line: 5, .. }), "{err}");
    }

    #[test]
    fn malformed_maps() {
        let bad_header = "type octile\nheight x\nwidth 2\nmap\n..\n";
        assert!(matches!(
            GridWorld::parse_map("m", bad_header),
            Err(MapError::Parse { line: 2, .. })
        ));
        let short_row = "type octile\nheight 2\nwidth 3\nmap\n...\n..\n";
        assert!(matches!(GridWorld::parse_map("m", short_row), Err(MapError::Parse { line: 6, .. })));
        let blocked = "type octile\nheight 1\nwidth 2\nmap\n@@\n";
        assert!(matches!(GridWorld::parse_map("m", blocked), Err(MapError::Empty)));
        let missing_rows = "type octile\nheight 3\nwidth 1\nmap\n.\n";
        assert!(GridWorld::parse_map("m", missing_rows).is_err());
    }

    #[test]
    fn crlf_tolerated() {
        let text = "type octile\r\nheight 1\r\nwidth 2\r\nmap\r\n..\r\n";
        assert_eq!(GridWorld::parse_map("m", text).unwrap().num_vertices(), 2);
    }

    #[test]
    fn fov_radius_examples() {
        let w = GridWorld::open(5, 5);
        let interior = w.vertex_at(2, 2).unwrap();
        assert_eq!(w.fov(interior, 0), vec![interior]);
        assert_eq!(w.fov(interior, 1).len(), 9);
        let corner = w.vertex_at(0, 0).unwrap();
        // brute-force enumeration of cells within Chebyshev distance 2 of (0,0)
        let mut expected = 0;
        for y in 0..5i32 {
            for x in 0..5i32 {
                if x.abs().max(y.abs()) <= 2 {
                    expected += 1;
                }
            }
        }
        assert_eq!(expected, 9);
        assert_eq!(w.fov(corner, 2).len(), expected);
    }

    #[test]
    fn fov_skips_blocked_cells() {
        let w = GridWorld::from_rows(&["...", ".@.", "..."]).unwrap();
        assert_eq!(w.fov(w.vertex_at(0, 0).unwrap(), 1).len(), 3);
    }

    #[test]
    fn scenario_rows() {
        let w = GridWorld::open(3, 3);
        let text = "version 1\n0\tm.map\t3\t3\t0\t0\t2\t0\t2.0\n";
        let entries = parse_scenario(text, &w).unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].start, w.vertex_at(0, 0).unwrap());
        assert_eq!(entries[0].goal, w.vertex_at(2, 0).unwrap());
        assert!(parse_scenario("version 1\n", &w).unwrap().is_empty());
    }

    #[test]
    fn scenario_errors() {
        let w = GridWorld::from_rows(&["...", ".@.", "..."]).unwrap();
        let blocked = "version 1\n0\tm\t3\t3\t1\t1\t0\t0\t2\n";
        assert!(matches!(
            parse_scenario(blocked, &w),
            Err(ScenarioError::Blocked { line: 2, x: 1, y: 1 })
        ));
        let dims = "version 1\n0\tm\t4\t3\t0\t0\t0\t1\t1\n";
        assert!(matches!(
            parse_scenario(dims, &w),
            Err(ScenarioError::DimensionMismatch { line: 2, .. })
        ));
    }

    #[test]
    fn distances_and_components() {
        let w = GridWorld::from_rows(&[".@.", ".@.", "..."]).unwrap();
        let d = w.distances_to(w.vertex_at(0, 0).unwrap());
        assert_eq!(d[w.vertex_at(2, 0).unwrap().index()], 6);
        let split = GridWorld::from_rows(&[".@.", ".@.", ".@."]).unwrap();
        let labels = split.components();
        assert_ne!(
            labels[split.vertex_at(0, 0).unwrap().index()],
            labels[split.vertex_at(2, 0).unwrap().index()]
        );
    }
}
