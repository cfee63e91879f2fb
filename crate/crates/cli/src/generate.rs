//! Seeded instance generators.
//!
//! A spec string is `family:key=value,key=value,...`:
//!
//! | family    | keys (defaults)                                        |
//! |-----------|--------------------------------------------------------|
//! | `er`      | `n`, `p`, `maxlen=1`, `seed=0`                         |
//! | `cycle`   | `n`, `maxlen=1`, `seed=0`                              |
//! | `layered` | `n`, `layers=3`, `p=0.5`, `maxlen=1`, `seed=0`         |
//! | `grid`    | `rows`, `cols`, `bidir=0`, `maxlen=1`, `seed=0`        |
//!
//! `maxlen = L > 1` draws every length uniformly from the integers `1..=L`;
//! `maxlen = 1` gives unit lengths.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use dirspan::graph::DiGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad generator spec: {0}")]
pub struct BadSpec(pub String);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Er { n: usize, p: f64 },
    Cycle { n: usize },
    Layered { n: usize, layers: usize, p: f64 },
    Grid { rows: usize, cols: usize, bidir: bool },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceSpec {
    pub family: Family,
    pub maxlen: u32,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn er(n: usize, p: f64, maxlen: u32, seed: u64) -> Self {
        InstanceSpec {
            family: Family::Er { n, p },
            maxlen,
            seed,
        }
    }
}

struct Params(BTreeMap<String, String>);

impl Params {
    fn take<T: FromStr>(&mut self, key: &str, default: Option<T>) -> Result<T, BadSpec> {
        match self.0.remove(key) {
            Some(v) => v
                .parse()
                .map_err(|_| BadSpec(format!("cannot parse `{key}={v}`"))),
            None => default.ok_or_else(|| BadSpec(format!("missing `{key}`"))),
        }
    }

    fn finish(self) -> Result<(), BadSpec> {
        match self.0.keys().next() {
            Some(k) => Err(BadSpec(format!("unknown key `{k}`"))),
            None => Ok(()),
        }
    }
}

impl FromStr for InstanceSpec {
    type Err = BadSpec;

    fn from_str(s: &str) -> Result<Self, BadSpec> {
        let (fam, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut map = BTreeMap::new();
        for kv in rest.split(',').filter(|kv| !kv.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| BadSpec(format!("expected key=value, found `{kv}`")))?;
            if map.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(BadSpec(format!("repeated key `{k}`")));
            }
        }
        let mut p = Params(map);
        let family = match fam {
            "er" => Family::Er {
                n: p.take("n", None)?,
                p: p.take("p", None)?,
            },
            "cycle" => Family::Cycle { n: p.take("n", None)? },
            "layered" => Family::Layered {
                n: p.take("n", None)?,
                layers: p.take("layers", Some(3))?,
                p: p.take("p", Some(0.5))?,
            },
            "grid" => Family::Grid {
                rows: p.take("rows", None)?,
                cols: p.take("cols", None)?,
                bidir: p.take::<u8>("bidir", Some(0))? != 0,
            },
            other => return Err(BadSpec(format!("unknown family `{other}`"))),
        };
        let spec = InstanceSpec {
            family,
            maxlen: p.take("maxlen", Some(1))?,
            seed: p.take("seed", Some(0))?,
        };
        p.finish()?;
        Ok(spec)
    }
}

impl fmt::Display for InstanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Er { n, p } => write!(f, "er:n={n},p={p}")?,
            Family::Cycle { n } => write!(f, "cycle:n={n}")?,
            Family::Layered { n, layers, p } => write!(f, "layered:n={n},layers={layers},p={p}")?,
            Family::Grid { rows, cols, bidir } => {
                write!(f, "grid:rows={rows},cols={cols},bidir={}", bidir as u8)?
            }
        }
        write!(f, ",maxlen={},seed={}", self.maxlen, self.seed)
    }
}

fn check_p(p: f64) -> Result<(), BadSpec> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(BadSpec(format!("probability {p} is outside [0, 1]")))
    }
}

pub fn generate_instance(spec: &InstanceSpec) -> Result<DiGraph, BadSpec> {
    if spec.maxlen == 0 {
        return Err(BadSpec("maxlen must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let n = match spec.family {
        Family::Er { n, p } => {
            check_p(p)?;
            for u in 0..n {
                for v in 0..n {
                    if u != v && rng.gen::<f64>() < p {
                        pairs.push((u, v));
                    }
                }
            }
            n
        }
        Family::Cycle { n } => {
            if n < 2 {
                return Err(BadSpec("a cycle needs at least 2 vertices".into()));
            }
            pairs.extend((0..n).map(|i| (i, (i + 1) % n)));
            n
        }
        Family::Layered { n, layers, p } => {
            check_p(p)?;
            if layers == 0 || layers > n.max(1) {
                return Err(BadSpec(format!("cannot split {n} vertices into {layers} layers")));
            }
            // Vertex i sits in layer i * layers / n; an edge spanning d layers
            // is drawn with probability p / d.
            let layer = |v: usize| v * layers / n;
            for u in 0..n {
                for v in 0..n {
                    let (lu, lv) = (layer(u), layer(v));
                    if lv > lu && rng.gen::<f64>() < p / (lv - lu) as f64 {
                        pairs.push((u, v));
                    }
                }
            }
            n
        }
        Family::Grid { rows, cols, bidir } => {
            let id = |r: usize, c: usize| r * cols + c;
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        pairs.push((id(r, c), id(r, c + 1)));
                        if bidir {
                            pairs.push((id(r, c + 1), id(r, c)));
                        }
                    }
                    if r + 1 < rows {
                        pairs.push((id(r, c), id(r + 1, c)));
                        if bidir {
                            pairs.push((id(r + 1, c), id(r, c)));
                        }
                    }
                }
            }
            rows * cols
        }
    };
    let edges: Vec<(usize, usize, f64)> = pairs
        .into_iter()
        .map(|(u, v)| {
            let len = if spec.maxlen == 1 {
                1.0
            } else {
                rng.gen_range(1..=spec.maxlen) as f64
            };
            (u, v, len)
        })
        .collect();
    DiGraph::new(n, &edges).map_err(|e| BadSpec(e.to_string()))
}

/// A random spec from any family with `2..=max_n` vertices, unit lengths or
/// integer lengths up to 4 with equal odds.
pub fn random_small_spec<R: Rng>(rng: &mut R, max_n: usize) -> InstanceSpec {
    assert!(max_n >= 2);
    let n = rng.gen_range(2..=max_n);
    let family = match rng.gen_range(0..4) {
        0 | 1 => Family::Er {
            n,
            p: rng.gen_range(0.2..0.6),
        },
        2 => {
            if rng.gen_bool(0.5) {
                Family::Cycle { n }
            } else {
                Family::Layered {
                    n,
                    layers: rng.gen_range(2..=n.min(4)),
                    p: rng.gen_range(0.4..1.0),
                }
            }
        }
        _ => {
            let rows = rng.gen_range(1..=2.min(n / 2));
            Family::Grid {
                rows,
                cols: n / rows,
                bidir: rng.gen_bool(0.5),
            }
        }
    };
    InstanceSpec {
        family,
        maxlen: if rng.gen_bool(0.5) { 1 } else { 4 },
        seed: rng.gen(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(s: &str) -> DiGraph {
        generate_instance(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn examples() {
        let c = gen("cycle:n=5");
        assert_eq!(c.m(), 5);
        assert!(c.is_unit_length());
        assert_eq!(gen("er:n=10,p=1.0").m(), 90);
        let a = gen("er:n=20,p=0.2,seed=11");
        assert_eq!(a, gen("er:n=20,p=0.2,seed=11"));
        assert_ne!(a, gen("er:n=20,p=0.2,seed=12"));
    }

    #[test]
    fn lengths_in_range() {
        let g = gen("er:n=12,p=0.5,maxlen=4,seed=3");
        assert!(g.edges().iter().all(|e| (1.0..=4.0).contains(&e.len) && e.len.fract() == 0.0));
        assert!(!g.is_unit_length());
    }

    #[test]
    fn layered_is_acyclic_forward() {
        let g = gen("layered:n=12,layers=4,p=1");
        assert!(g.edges().iter().all(|e| e.tail * 4 / 12 < e.head * 4 / 12));
        // Adjacent layers are complete at p = 1.
        assert!(g.find_edge(0, 3).is_some());
    }

    #[test]
    fn grid_shape() {
        assert_eq!(gen("grid:rows=3,cols=4").m(), 3 * 3 + 2 * 4);
        assert_eq!(gen("grid:rows=3,cols=4,bidir=1").m(), 2 * 17);
    }

    #[test]
    fn display_round_trips() {
        for s in ["er:n=7,p=0.25,maxlen=3,seed=9", "grid:rows=2,cols=3,bidir=1", "layered:n=9"] {
            let spec: InstanceSpec = s.parse().unwrap();
            assert_eq!(spec.to_string().parse::<InstanceSpec>().unwrap(), spec);
        }
    }

    #[test]
    fn bad_specs() {
        for s in ["tree:n=3", "er:n=3", "er:n=3,p=2", "cycle:n=1", "er:n=3,p=0.5,q=1", "cycle:n=x", "cycle:n=3,maxlen=0"] {
            let r = s.parse::<InstanceSpec>().and_then(|sp| generate_instance(&sp));
            assert!(r.is_err(), "{s}");
        }
    }
}
