//! Constructors for common diagram families.

use std::collections::HashSet;

use super::{Crossing, Label, TangleDiagram};

fn port_label(id: i64, slot: usize) -> Label {
    Label::Str(format!("x{id}.{slot}"))
}

/// Diagram of a braid on `strands` strands, read bottom to top, where `word`
/// entry `±k` is the generator between strands `k-1` and `k` (1-based) with
/// sign `±`. The rightmost `closed` strands are closed around the right side;
/// the others end on the boundary.
///
/// Boundary order is the bottom endpoints left to right followed by the top
/// endpoints right to left. Crossing ids are `1..=word.len()` in word order.
pub fn braid(strands: usize, word: &[i32], closed: usize) -> TangleDiagram {
    assert!(closed <= strands, "cannot close more strands than exist");
    for &g in word {
        let k = g.unsigned_abs() as usize;
        assert!(
            g != 0 && k < strands,
            "generator {g} out of range for {strands} strands"
        );
    }
    let open = strands - closed;
    let mut boundary = Vec::new();
    let mut connections = Vec::new();
    let mut crossings = Vec::new();

    // What currently dangles at each position: a boundary label, or the
    // start of a closed strand (None).
    let mut dangling: Vec<Option<Label>> = (0..strands)
        .map(|pos| (pos < open).then(|| Label::Str(format!("b{pos}"))))
        .collect();
    boundary.extend((0..open).map(|pos| Label::Str(format!("b{pos}"))));
    let mut first_port: Vec<Option<Label>> = vec![None; strands];
    let mut start_of: Vec<usize> = (0..strands).collect();

    for (n, &g) in word.iter().enumerate() {
        let id = n as i64 + 1;
        let i = g.unsigned_abs() as usize - 1;
        let ports: [Label; 4] = std::array::from_fn(|k| port_label(id, k));
        // bottom-left, bottom-right, top-left, top-right
        let (bl, br, tl, tr) = if g > 0 {
            (
                ports[3].clone(),
                ports[0].clone(),
                ports[2].clone(),
                ports[1].clone(),
            )
        } else {
            (
                ports[0].clone(),
                ports[1].clone(),
                ports[3].clone(),
                ports[2].clone(),
            )
        };
        for (pos, entry) in [(i, bl), (i + 1, br)] {
            match dangling[pos].take() {
                Some(prev) => connections.push((prev, entry)),
                None => first_port[start_of[pos]] = Some(entry),
            }
        }
        dangling[i] = Some(tl);
        dangling[i + 1] = Some(tr);
        start_of.swap(i, i + 1);
        crossings.push(Crossing {
            id,
            ports,
            sign: g.signum() as i8,
        });
    }

    let mut free_circles = 0;
    let mut top = Vec::new();
    for pos in 0..strands {
        if pos < open {
            let label = Label::Str(format!("t{pos}"));
            match dangling[pos].take() {
                Some(prev) => connections.push((prev, label.clone())),
                None => unreachable!("open position lost its strand"),
            }
            top.push(label);
        } else {
            match (dangling[pos].take(), first_port[pos].take()) {
                (Some(end), Some(start)) => connections.push((end, start)),
                (Some(end), None) => {
                    // strand entered from an open start; close onto the
                    // bottom of this position, which is still unconnected
                    unreachable!("closed position {pos} fed by {end}")
                }
                (None, None) => free_circles += 1,
                (None, Some(_)) => unreachable!(),
            }
        }
    }
    boundary.extend(top.into_iter().rev());
    TangleDiagram {
        boundary,
        crossings,
        connections,
        free_circles,
    }
}

/// Insert a Reidemeister I kink into the connection at `index`. A negative
/// kink puts its loop on ports 1-2, a positive one on ports 2-3, so the loop
/// is a separate circle in the 1- and 0-smoothing respectively.
pub fn add_kink(d: &TangleDiagram, index: usize, sign: i8) -> TangleDiagram {
    let mut out = d.clone();
    let id = d.crossings.iter().map(|c| c.id).max().map_or(0, |m| m + 1);
    let taken: HashSet<Label> = d
        .boundary
        .iter()
        .chain(d.crossings.iter().flat_map(|c| c.ports.iter()))
        .cloned()
        .collect();
    let ports: [Label; 4] = std::array::from_fn(|k| {
        let mut name = format!("k{id}.{k}");
        while taken.contains(&Label::Str(name.clone())) {
            name.push('\'');
        }
        Label::Str(name)
    });
    let (x, y) = out.connections.remove(index);
    let [p0, p1, p2, p3] = ports.clone();
    if sign < 0 {
        out.connections.extend([(x, p0), (p1, p2), (p3, y)]);
    } else {
        out.connections.extend([(x, p0), (p2, p3), (p1, y)]);
    }
    out.crossings.push(Crossing { id, ports, sign });
    out
}

/// Side-by-side union; `b`'s labels are prefixed and its crossing ids moved
/// above `a`'s.
pub fn disjoint_union(a: &TangleDiagram, b: &TangleDiagram) -> TangleDiagram {
    let offset = a.crossings.iter().map(|c| c.id).max().map_or(0, |m| m + 1)
        - b.crossings.iter().map(|c| c.id).min().unwrap_or(0);
    let labels: Vec<String> = a
        .boundary
        .iter()
        .chain(a.crossings.iter().flat_map(|c| c.ports.iter()))
        .map(|l| l.to_string())
        .collect();
    let prefix = (0..)
        .map(|k| if k == 0 { "u:".to_string() } else { format!("u{k}:") })
        .find(|p| !labels.iter().any(|l| l.starts_with(p.as_str())))
        .expect("unbounded search");
    let rename = |l: &Label| Label::Str(format!("{prefix}{l}"));
    let mut out = a.clone();
    out.boundary.extend(b.boundary.iter().map(rename));
    out.crossings.extend(b.crossings.iter().map(|c| Crossing {
        id: c.id + offset,
        ports: std::array::from_fn(|k| rename(&c.ports[k])),
        sign: c.sign,
    }));
    out.connections
        .extend(b.connections.iter().map(|(x, y)| (rename(x), rename(y))));
    out.free_circles += b.free_circles;
    out
}

/// Mirror image: every crossing changes sign and its ports rotate by one slot.
pub fn mirror(d: &TangleDiagram) -> TangleDiagram {
    let mut out = d.clone();
    for c in &mut out.crossings {
        c.ports.rotate_left(1);
        c.sign = -c.sign;
    }
    out
}
