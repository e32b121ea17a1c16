//! Plain-text edge lists.
//!
//! ```text
//! # vertices=7 root=0,1 frontier=3,0,5,6
//! 0 1
//! 0 2
//! ```
//!
//! Vertex ids are creation ordered and one line holds one edge; multi-edges
//! repeat. Other `#` lines are ignored on import.

use std::io::{BufRead, Write};

use peelab_core::graph::Graph;
use peelab_core::map::HalfPlaneMap;

use crate::error::{LabError, LabResult};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeList {
    pub vertices: usize,
    pub root: (u32, u32),
    /// Frontier vertices from left to right.
    pub frontier: Vec<u32>,
    pub edges: Vec<(u32, u32)>,
}

impl EdgeList {
    pub fn from_map(map: &HalfPlaneMap) -> Self {
        EdgeList {
            vertices: map.vertex_count(),
            root: map.root(),
            frontier: map.frontier_vertices(),
            edges: map.revealed_edges().map(|(_, [a, b])| (a, b)).collect(),
        }
    }

    pub fn graph(&self) -> Graph {
        Graph::from_edges(self.vertices, self.edges.clone())
    }

    pub fn write(&self, w: &mut dyn Write) -> std::io::Result<()> {
        let frontier: Vec<String> = self.frontier.iter().map(u32::to_string).collect();
        writeln!(
            w,
            "# vertices={} root={},{} frontier={}",
            self.vertices,
            self.root.0,
            self.root.1,
            frontier.join(",")
        )?;
        for &(u, v) in &self.edges {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn read(r: impl BufRead) -> LabResult<Self> {
        let mut head: Option<(usize, (u32, u32), Vec<u32>)> = None;
        let mut edges = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let n = idx + 1;
            let bad = |msg: &str| LabError::Parse { line: n, msg: msg.to_string() };
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            if let Some(rest) = t.strip_prefix('#') {
                let rest = rest.trim();
                if rest.starts_with("vertices=") {
                    head = Some(parse_header(rest).ok_or_else(|| bad("malformed header"))?);
                }
                continue;
            }
            let (vertices, ..) = head.as_ref().ok_or_else(|| bad("edge before the header"))?;
            let mut it = t.split_whitespace().map(str::parse::<u32>);
            let (u, v) = match (it.next(), it.next(), it.next()) {
                (Some(Ok(u)), Some(Ok(v)), None) => (u, v),
                _ => return Err(bad("expected `u v`")),
            };
            if u == v {
                return Err(bad("self-loop"));
            }
            if u as usize >= *vertices || v as usize >= *vertices {
                return Err(bad("vertex id out of range"));
            }
            edges.push((u, v));
        }
        let (vertices, root, frontier) = head.ok_or(LabError::Parse {
            line: 0,
            msg: "missing header".into(),
        })?;
        Ok(EdgeList {
            vertices,
            root,
            frontier,
            edges,
        })
    }
}

fn parse_header(s: &str) -> Option<(usize, (u32, u32), Vec<u32>)> {
    let (mut vertices, mut root, mut frontier) = (None, None, Vec::new());
    for field in s.split_whitespace() {
        let (k, v) = field.split_once('=')?;
        match k {
            "vertices" => vertices = Some(v.parse().ok()?),
            "root" => {
                let (a, b) = v.split_once(',')?;
                root = Some((a.parse().ok()?, b.parse().ok()?));
            }
            "frontier" if !v.is_empty() => {
                frontier = v.split(',').map(str::parse).collect::<Result<_, _>>().ok()?;
            }
            _ => {}
        }
    }
    Some((vertices?, root?, frontier))
}

#[cfg(test)]
mod tests {
    use super::*;
    use peelab_core::analytic::model_params;
    use peelab_core::map::HoleFill;
    use peelab_core::sampler::{FreeLaw, PeelEvent};
    use peelab_core::RngStream;

    fn text(list: &EdgeList) -> String {
        let mut buf = Vec::new();
        list.write(&mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_map_is_header_only() {
        let s = text(&EdgeList::from_map(&HalfPlaneMap::new()));
        assert_eq!(s.lines().count(), 1);
        assert!(s.starts_with("# vertices="));
    }

    #[test]
    fn one_alpha_step_is_one_triangle() {
        let mut map = HalfPlaneMap::new();
        let free = FreeLaw::new(0.0).unwrap();
        map.apply_step(0, &PeelEvent::AlphaStep, HoleFill::Joint, &free, &mut RngStream::new(1))
            .unwrap();
        let s = text(&EdgeList::from_map(&map));
        assert_eq!(s.lines().count(), 4);
        assert!(s.starts_with("# vertices=3 root=0,1"));
    }

    #[test]
    fn round_trip_preserves_adjacency() {
        let params = model_params(0.4).unwrap();
        let ex = peelab_core::explorer::explore(
            &params,
            &peelab_core::explorer::ExploreConfig::new(6, peelab_core::explorer::Mode::Full),
            &mut RngStream::new(3),
        )
        .unwrap();
        let map = ex.map.unwrap();
        let list = EdgeList::from_map(&map);
        let back = EdgeList::read(std::io::Cursor::new(format!("# peelab x\n{}", text(&list)))).unwrap();
        assert_eq!(back, list);
        let (g, h) = (map.graph(), back.graph());
        for v in 0..g.vertex_count() as u32 {
            let mut a: Vec<u32> = g.neighbors(v).iter().map(|x| x.0).collect();
            let mut b: Vec<u32> = h.neighbors(v).iter().map(|x| x.0).collect();
            a.sort_unstable();
            b.sort_unstable();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn malformed_lines_are_reported() {
        let r = |s: &str| EdgeList::read(std::io::Cursor::new(s.to_string()));
        assert!(matches!(r("0 1\n"), Err(LabError::Parse { line: 1, .. })));
        assert!(matches!(r("# vertices=2 root=0,1\n0 0\n"), Err(LabError::Parse { line: 2, .. })));
        assert!(matches!(r("# vertices=2 root=0,1\n0 5\n"), Err(LabError::Parse { .. })));
        assert!(matches!(r("# vertices=2 root=0,1\n0 x\n"), Err(LabError::Parse { .. })));
    }
}
