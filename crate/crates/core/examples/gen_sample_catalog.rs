//! Regenerates the bundled sample catalog:
//!
//!     cargo run -p sword-core --example gen_sample_catalog -- data/sample-catalog
//!
//! Glyphs are drawn from vector primitives, cropped to their ink and written
//! as PNG files named after their code. Near-duplicate shapes are rejected.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use sword_core::iswa::GlyphId;
use sword_core::ogr::{extract_components, group_blobs, normalized_grid, similarity};
use sword_core::raster::{BinaryImage, Canvas};

const MAX_SIMILARITY: f64 = 0.82;
const T: f64 = 3.0;

#[derive(Clone)]
enum Prim {
    Line(f64, f64, f64, f64, f64),
    Disc(f64, f64, f64),
    Ring(f64, f64, f64, f64),
    Poly(Vec<(f64, f64)>),
    Arc(f64, f64, f64, f64, f64, f64),
}

fn rot(p: (f64, f64), deg: f64) -> (f64, f64) {
    let (s, c) = (deg * PI / 180.0).sin_cos();
    (p.0 * c - p.1 * s, p.0 * s + p.1 * c)
}

fn draw(prims: &[Prim], deg: f64) -> BinaryImage {
    const C: f64 = 40.0;
    let mut cv = Canvas::new(80, 80);
    for p in prims {
        match p {
            Prim::Line(x0, y0, x1, y1, t) => {
                let (a, b) = (rot((*x0, *y0), deg), rot((*x1, *y1), deg));
                cv.line(a.0 + C, a.1 + C, b.0 + C, b.1 + C, *t);
            }
            Prim::Disc(x, y, r) => {
                let a = rot((*x, *y), deg);
                cv.disc(a.0 + C, a.1 + C, *r);
            }
            Prim::Ring(x, y, ro, ri) => {
                let a = rot((*x, *y), deg);
                cv.ring(a.0 + C, a.1 + C, *ro, *ri);
            }
            Prim::Poly(pts) => {
                let pts: Vec<_> = pts.iter().map(|p| rot(*p, deg)).map(|(x, y)| (x + C, y + C)).collect();
                cv.polygon(&pts);
            }
            Prim::Arc(x, y, r, from, to, t) => {
                let a = rot((*x, *y), deg);
                let mut lo = (from + deg).rem_euclid(360.0);
                if lo >= 180.0 {
                    lo -= 360.0;
                }
                cv.arc(a.0 + C, a.1 + C, *r, lo, lo + (to - from), *t);
            }
        }
    }
    cv.into_image().trimmed()
}

fn rect_outline(x0: f64, y0: f64, x1: f64, y1: f64, t: f64) -> Vec<Prim> {
    vec![
        Prim::Line(x0, y0, x1, y0, t),
        Prim::Line(x1, y0, x1, y1, t),
        Prim::Line(x1, y1, x0, y1, t),
        Prim::Line(x0, y1, x0, y0, t),
    ]
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Prim {
    Prim::Poly(vec![(x0, y0), (x1, y0), (x1, y1), (x0, y1)])
}

/// Arrowhead pointing along `dir` (degrees, 0 = up) with its tip at `tip`.
fn head(tip: (f64, f64), dir: f64, style: u8) -> Vec<Prim> {
    let place = |p: (f64, f64)| {
        let r = rot(p, dir);
        (r.0 + tip.0, r.1 + tip.1)
    };
    let (l, r, t) = (place((-7.0, 10.0)), place((7.0, 10.0)), place((0.0, 0.0)));
    match style {
        1 => vec![Prim::Poly(vec![t, l, r])],
        2 => vec![Prim::Line(t.0, t.1, l.0, l.1, 2.5), Prim::Line(l.0, l.1, r.0, r.1, 2.5), Prim::Line(r.0, r.1, t.0, t.1, 2.5)],
        _ => vec![Prim::Line(t.0, t.1, l.0, l.1, T), Prim::Line(t.0, t.1, r.0, r.1, T)],
    }
}

struct Glyph {
    id: GlyphId,
    name: String,
    region: &'static str,
    attrs: Vec<(&'static str, String)>,
    exception: bool,
    image: BinaryImage,
}

#[derive(Default)]
struct Builder {
    glyphs: Vec<Glyph>,
    rejected: Vec<(GlyphId, GlyphId, f64)>,
}

impl Builder {
    #[allow(clippy::too_many_arguments)]
    fn add(
        &mut self,
        code: (u8, u8, u16, u8, u8, u8),
        name: String,
        region: &'static str,
        attrs: Vec<(&'static str, String)>,
        prims: &[Prim],
        deg: f64,
    ) {
        let id = GlyphId::new(code.0, code.1, code.2, code.3, code.4, code.5).expect("valid code");
        let image = draw(prims, deg);
        // pieces must sit close enough to be read back as one glyph
        let blobs = extract_components(&image, 4);
        if blobs.len() != extract_components(&image, 1).len() {
            panic!("{id} {name}: speck below min area");
        }
        if group_blobs(&blobs, 4, u32::MAX).len() != 1 {
            panic!("{id} {name}: pieces too far apart");
        }
        self.glyphs.push(Glyph { id, name, region, attrs, exception: false, image });
    }
}

const DIRS8: [&str; 8] = ["up", "up-right", "right", "down-right", "down", "down-left", "left", "up-left"];

fn hands(b: &mut Builder) {
    let families: [(&str, &[usize], bool); 6] = [
        ("index", &[0], false),
        ("index-middle", &[0, 1], false),
        ("l-shape", &[0], true),
        ("flat", &[0, 1, 2, 3], false),
        ("five", &[0, 1, 2, 3], true),
        ("fist", &[], false),
    ];
    let slot_angle = [-30.0, -10.0, 10.0, 30.0];
    for (g, (family, slots, thumb)) in families.iter().enumerate() {
        for base in 1..=3u16 {
            for fill in 1..=3u8 {
                let mut prims = Vec::new();
                match fill {
                    1 => prims.extend(rect_outline(-7.0, 0.0, 7.0, 14.0, T)),
                    2 => {
                        prims.extend(rect_outline(-7.0, 0.0, 7.0, 14.0, T));
                        prims.push(rect(-7.0, 0.0, 0.0, 14.0));
                    }
                    _ => prims.push(rect(-8.5, -1.5, 8.5, 15.5)),
                }
                let (bend, fingers) = if slots.is_empty() {
                    let kind = ["closed", "thumb-up", "thumb-side"][base as usize - 1];
                    match base {
                        2 => prims.push(Prim::Line(-6.0, -1.0, -6.0, -10.0, T)),
                        3 => prims.push(Prim::Line(-8.0, 3.0, -17.0, 3.0, T)),
                        _ => {}
                    }
                    (kind, 0)
                } else {
                    let kind = ["straight", "bent", "curved"][base as usize - 1];
                    for &s in slots.iter() {
                        let a = if slots.len() == 1 { 0.0 } else { slot_angle[s] };
                        let foot = (-4.5 + 3.0 * s as f64, -1.0);
                        let top = rot((0.0, -15.0), a);
                        let tip = (foot.0 + top.0, foot.1 + top.1);
                        match base {
                            1 => prims.push(Prim::Line(foot.0, foot.1, tip.0, tip.1, T)),
                            2 => {
                                let mid = rot((0.0, -10.0), a);
                                let mid = (foot.0 + mid.0, foot.1 + mid.1);
                                let hook = rot((6.0, 0.0), a);
                                prims.push(Prim::Line(foot.0, foot.1, mid.0, mid.1, T));
                                prims.push(Prim::Line(mid.0, mid.1, mid.0 + hook.0, mid.1 + hook.1, T));
                            }
                            _ => {
                                let c = rot((5.0, -9.0), a);
                                let (cx, cy) = (foot.0 + c.0, foot.1 + c.1);
                                let s = rot((7.0, 0.0), 150.0 + a);
                                prims.push(Prim::Line(foot.0, foot.1, cx + s.0, cy + s.1, T));
                                prims.push(Prim::Arc(cx, cy, 7.0, 150.0 + a, 300.0 + a, T));
                            }
                        }
                    }
                    if *thumb {
                        prims.push(Prim::Line(-8.0, 4.0, -17.0, -4.0, T));
                    }
                    (kind, slots.len() + *thumb as usize)
                };
                for (r, dir) in [(1u8, "up"), (3, "right"), (5, "down"), (7, "left")] {
                    let palm = ["facing", "side", "back"][fill as usize - 1];
                    b.add(
                        (1, g as u8 + 1, base, 1, fill, r),
                        format!("{family} {bend} palm-{palm} {dir}"),
                        "hand",
                        vec![
                            ("handshape-family", family.to_string()),
                            ("fingers", fingers.to_string()),
                            (if slots.is_empty() { "thumb" } else { "bend" }, bend.to_string()),
                            ("palm", palm.to_string()),
                            ("direction", dir.to_string()),
                        ],
                        &prims,
                        (r as f64 - 1.0) * 45.0,
                    );
                }
            }
        }
    }
}

fn movement(b: &mut Builder) {
    // contact marks
    let star = |n: usize| -> Vec<Prim> {
        (0..n)
            .map(|i| {
                let (x, y) = rot((0.0, -8.0), 180.0 / n as f64 * i as f64);
                Prim::Line(-x, -y, x, y, T)
            })
            .collect()
    };
    let contacts: Vec<(&str, Vec<Prim>, &[u8])> = vec![
        ("touch", star(3), &[1]),
        ("grasp", star(2), &[1, 2]),
        ("strike", vec![Prim::Line(-3.5, -9.0, -3.5, 9.0, T), Prim::Line(3.5, -9.0, 3.5, 9.0, T), Prim::Line(-9.0, -3.5, 9.0, -3.5, T), Prim::Line(-9.0, 3.5, 9.0, 3.5, T)], &[1, 2]),
        ("brush", vec![Prim::Disc(0.0, 0.0, 6.0)], &[1]),
        ("rub", vec![Prim::Arc(0.0, 0.0, 8.0, -90.0, 200.0, T), Prim::Disc(0.0, 0.0, 2.5)], &[1]),
        ("between", vec![Prim::Ring(0.0, 0.0, 8.0, 5.0), Prim::Line(0.0, -12.0, 0.0, 12.0, T)], &[1]),
    ];
    for (i, (name, prims, rots)) in contacts.iter().enumerate() {
        for &r in *rots {
            b.add((2, 1, i as u16 + 1, 1, 1, r), format!("contact {name}"), "contact",
                vec![("contact", name.to_string())], prims, (r as f64 - 1.0) * 45.0);
        }
    }
    // finger movement: small ticks
    for base in 1..=2u16 {
        let mut prims = vec![Prim::Line(0.0, -6.0, 0.0, 6.0, T), Prim::Disc(0.0, 9.5, 2.5)];
        if base == 2 {
            prims.push(Prim::Line(6.0, -6.0, 6.0, 6.0, T));
        }
        for r in 1..=4u8 {
            b.add((2, 2, base, 1, 1, r), format!("finger movement {} {}", ["single", "double"][base as usize - 1], DIRS8[r as usize - 1]),
                "movement", vec![("movement", "finger".into()), ("count", base.to_string()), ("direction", DIRS8[r as usize - 1].into())],
                &prims, (r as f64 - 1.0) * 45.0);
        }
    }
    // straight arrows
    for base in 1..=3u16 {
        for fill in 1..=3u8 {
            let mut prims = match base {
                1 => vec![Prim::Line(0.0, 14.0, 0.0, -10.0, T)],
                2 => vec![Prim::Line(-3.5, 14.0, -3.5, -8.0, T), Prim::Line(3.5, 14.0, 3.5, -8.0, T)],
                _ => vec![Prim::Line(0.0, 14.0, 0.0, -10.0, T), Prim::Line(-6.0, 14.0, 6.0, 14.0, T)],
            };
            prims.extend(head((0.0, -16.0), 0.0, fill));
            for r in 1..=8u8 {
                let stem = ["single", "double", "tailed"][base as usize - 1];
                let hd = ["filled", "hollow", "open"][fill as usize - 1];
                b.add((2, 3, base, 1, fill, r), format!("arrow {stem} {hd} {}", DIRS8[r as usize - 1]), "movement",
                    vec![("movement", "straight".into()), ("stem", stem.into()), ("arrowhead", hd.into()), ("direction", DIRS8[r as usize - 1].into())],
                    &prims, (r as f64 - 1.0) * 45.0);
            }
        }
    }
    // curved arrows
    for base in 1..=2u16 {
        for fill in 1..=2u8 {
            let span = [180.0, 90.0][base as usize - 1];
            let mut prims = vec![Prim::Arc(0.0, 0.0, 13.0, 180.0, 180.0 + span, T)];
            let end = rot((13.0, 0.0), 180.0 + span);
            let tip = rot((0.0, 8.0), 180.0 + span);
            prims.extend(head((end.0 + tip.0 * 0.9, end.1 + tip.1 * 0.9), span, fill));
            for r in 1..=8u8 {
                let arc = ["half", "quarter"][base as usize - 1];
                let hd = ["filled", "hollow"][fill as usize - 1];
                b.add((2, 4, base, 1, fill, r), format!("curve {arc} {hd} {}", DIRS8[r as usize - 1]), "movement",
                    vec![("movement", "curved".into()), ("arc", arc.into()), ("arrowhead", hd.into()), ("direction", DIRS8[r as usize - 1].into())],
                    &prims, (r as f64 - 1.0) * 45.0);
            }
        }
    }
    // circles
    for base in 1..=2u16 {
        for fill in 1..=2u8 {
            let mut prims = vec![Prim::Arc(0.0, 0.0, 12.0, -60.0, 210.0, T)];
            let (ang, dir) = if base == 1 { (210.0, 180.0 + 210.0) } else { (-60.0, -60.0) };
            let end = rot((12.0, 0.0), ang);
            let step = rot((0.0, if base == 1 { 7.0 } else { -7.0 }), ang);
            prims.extend(head((end.0 + step.0, end.1 + step.1), dir, fill));
            for r in [1u8, 3, 5, 7] {
                let sense = ["clockwise", "counter-clockwise"][base as usize - 1];
                let hd = ["filled", "hollow"][fill as usize - 1];
                b.add((2, 5, base, 1, fill, r), format!("circle {sense} {hd} {}", DIRS8[r as usize - 1]), "movement",
                    vec![("movement", "circle".into()), ("sense", sense.into()), ("arrowhead", hd.into()), ("direction", DIRS8[r as usize - 1].into())],
                    &prims, (r as f64 - 1.0) * 45.0);
            }
        }
    }
}

fn dynamics(b: &mut Builder) {
    let zigzag = |n: usize| -> Vec<Prim> {
        let w = 6.0;
        let x0 = -(n as f64) * w / 2.0;
        (0..n)
            .map(|i| {
                let (xa, xb) = (x0 + i as f64 * w, x0 + (i + 1) as f64 * w);
                let (ya, yb) = if i % 2 == 0 { (5.0, -5.0) } else { (-5.0, 5.0) };
                Prim::Line(xa, ya, xb, yb, T)
            })
            .collect()
    };
    for base in 1..=3u16 {
        let prims = zigzag(base as usize + 2);
        for r in [1u8, 3] {
            b.add((3, 1, base, 1, 1, r), format!("tension {}", base + 2), "dynamics",
                vec![("dynamics", "tension".into()), ("strokes", (base + 2).to_string())], &prims, (r as f64 - 1.0) * 45.0);
        }
    }
    let timing: Vec<(&str, Vec<Prim>)> = vec![
        ("simultaneous", vec![Prim::Line(-3.5, -9.0, -3.5, 9.0, T), Prim::Line(3.5, -9.0, 3.5, 9.0, T)]),
        ("alternating", vec![Prim::Line(-7.0, 6.0, 0.0, -6.0, T), Prim::Line(1.0, 6.0, 8.0, -6.0, T), Prim::Disc(0.0, 10.0, 2.5)]),
        ("sequential", vec![Prim::Disc(-7.0, 0.0, 3.0), Prim::Disc(0.0, 0.0, 3.0), Prim::Disc(7.0, 0.0, 3.0)]),
        ("fast", vec![Prim::Arc(0.0, 6.0, 9.0, 200.0, 340.0, T), Prim::Arc(0.0, 12.0, 9.0, 200.0, 340.0, T)]),
        ("slow", vec![Prim::Arc(-5.0, 0.0, 5.0, 180.0, 360.0, T), Prim::Arc(5.0, 0.0, 5.0, 0.0, 180.0, T)]),
        ("tense", vec![Prim::Disc(0.0, -2.5, 3.0), Prim::Line(-8.0, 4.0, 8.0, 4.0, T)]),
    ];
    for (i, (name, prims)) in timing.iter().enumerate() {
        b.add((3, 2, i as u16 + 1, 1, 1, 1), format!("timing {name}"), "dynamics",
            vec![("dynamics", name.to_string())], prims, 0.0);
    }
}

fn head_face(b: &mut Builder) {
    let heads: Vec<(&str, Vec<Prim>, &[u8])> = vec![
        ("head", vec![Prim::Ring(0.0, 0.0, 14.0, 11.0)], &[1]),
        ("head with neck", vec![Prim::Ring(0.0, 0.0, 14.0, 11.0), Prim::Line(0.0, 14.0, 0.0, 22.0, T)], &[1, 2, 8]),
        ("hair", vec![Prim::Ring(0.0, 0.0, 14.0, 11.0), Prim::Arc(0.0, 0.0, 17.5, 200.0, 340.0, T)], &[1]),
        ("head top", vec![Prim::Ring(0.0, 0.0, 14.0, 11.0), Prim::Arc(0.0, 0.0, 8.0, 180.0, 360.0, 5.0)], &[1]),
    ];
    for (i, (name, prims, rots)) in heads.iter().enumerate() {
        for &r in *rots {
            b.add((4, 1, i as u16 + 1, 1, 1, r), format!("{name} {}", DIRS8[r as usize - 1]), "head",
                vec![("feature", name.replace(' ', "-")), ("tilt", DIRS8[r as usize - 1].into())], prims, (r as f64 - 1.0) * 45.0);
        }
    }
    let pair = |p: &dyn Fn(f64) -> Vec<Prim>| -> Vec<Prim> {
        let mut v = p(-7.0);
        v.extend(p(7.0));
        v
    };
    let brows: Vec<(&str, Vec<Prim>)> = vec![
        ("raised", pair(&|x| vec![Prim::Arc(x, 5.0, 6.0, 200.0, 340.0, T)])),
        ("lowered", pair(&|x| vec![Prim::Arc(x, -5.0, 6.0, 20.0, 160.0, T)])),
        ("level", pair(&|x| vec![Prim::Line(x - 4.5, 0.0, x + 4.5, 0.0, T)])),
        ("knit", vec![Prim::Line(-12.0, -3.0, -3.0, 3.0, T), Prim::Line(3.0, 3.0, 12.0, -3.0, T)]),
    ];
    let eyes: Vec<(&str, Vec<Prim>)> = vec![
        ("open", pair(&|x| vec![Prim::Ring(x, 0.0, 5.5, 2.5)])),
        ("closed", pair(&|x| vec![Prim::Arc(x, -3.0, 5.5, 20.0, 160.0, T)])),
        ("wide", pair(&|x| vec![Prim::Ring(x, 0.0, 6.0, 3.0), Prim::Disc(x, 0.0, 1.6)])),
        ("squint", pair(&|x| vec![Prim::Line(x - 5.0, 0.0, x + 5.0, 0.0, T)])),
        ("wink", vec![Prim::Ring(-7.0, 0.0, 5.5, 2.5), Prim::Line(2.0, 0.0, 12.0, 0.0, T)]),
    ];
    let mouths: Vec<(&str, Vec<Prim>)> = vec![
        ("closed", vec![Prim::Line(-9.0, 0.0, 9.0, 0.0, T)]),
        ("open", vec![Prim::Ring(0.0, 0.0, 7.0, 4.0)]),
        ("smile", vec![Prim::Arc(0.0, -6.0, 10.0, 30.0, 150.0, T)]),
        ("frown", vec![Prim::Arc(0.0, 6.0, 10.0, 210.0, 330.0, T)]),
        ("teeth", { let mut v = rect_outline(-9.0, -4.0, 9.0, 4.0, 2.5); v.push(Prim::Line(0.0, -4.0, 0.0, 4.0, 2.5)); v }),
        ("tongue", vec![Prim::Line(-9.0, 0.0, 9.0, 0.0, T), Prim::Disc(0.0, 4.5, 3.5)]),
    ];
    let others: Vec<(&str, Vec<Prim>)> = vec![
        ("nose", vec![Prim::Line(0.0, -8.0, 0.0, 6.0, T), Prim::Line(0.0, 6.0, 5.0, 6.0, T)]),
        ("cheeks", vec![Prim::Arc(-3.0, 0.0, 7.0, 110.0, 250.0, T), Prim::Arc(3.0, 0.0, 7.0, -70.0, 70.0, T), Prim::Disc(0.0, 0.0, 2.5)]),
        ("ears", vec![Prim::Arc(-10.0, 0.0, 5.0, 90.0, 270.0, T), Prim::Arc(10.0, 0.0, 5.0, -90.0, 90.0, T), Prim::Line(-10.0, -5.0, 10.0, -5.0, T)]),
    ];
    for (g, (part, list)) in [("eyebrows", brows), ("eyes", eyes), ("mouth", mouths), ("face", others)].into_iter().enumerate() {
        for (i, (name, prims)) in list.iter().enumerate() {
            b.add((4, g as u8 + 2, i as u16 + 1, 1, 1, 1), format!("{part} {name}"), "face",
                vec![("part", part.into()), ("shape", name.to_string())], prims, 0.0);
        }
    }
    // head movement arrows sit with the head glyphs but read as movement
    let mut nod = vec![Prim::Line(0.0, 10.0, 0.0, -6.0, T), Prim::Disc(0.0, 15.0, 3.0)];
    nod.extend(head((0.0, -12.0), 0.0, 1));
    let mut shake = vec![Prim::Line(-10.0, 0.0, 10.0, 0.0, T), Prim::Disc(0.0, 6.0, 3.0)];
    shake.extend(head((-16.0, 0.0), -90.0, 1));
    shake.extend(head((16.0, 0.0), 90.0, 1));
    for (base, name, prims, rots) in [(1u16, "nod", nod, &[1u8, 5][..]), (2, "shake", shake, &[1][..])] {
        for &r in rots {
            b.add((4, 6, base, 1, 1, r), format!("head {name} {}", DIRS8[r as usize - 1]), "movement",
                vec![("movement", "head".into()), ("direction", DIRS8[r as usize - 1].into())], &prims, (r as f64 - 1.0) * 45.0);
            b.glyphs.last_mut().unwrap().exception = true;
        }
    }
}

fn body(b: &mut Builder) {
    let torso = vec![
        Prim::Line(-12.0, -10.0, 12.0, -10.0, T),
        Prim::Line(12.0, -10.0, 8.0, 14.0, T),
        Prim::Line(8.0, 14.0, -8.0, 14.0, T),
        Prim::Line(-8.0, 14.0, -12.0, -10.0, T),
    ];
    let hips = vec![Prim::Line(-12.0, 0.0, 12.0, 0.0, T), Prim::Line(-12.0, 0.0, -12.0, 10.0, T), Prim::Line(12.0, 0.0, 12.0, 10.0, T)];
    let waist = vec![Prim::Line(-12.0, -6.0, 12.0, -6.0, T), Prim::Line(-8.0, 6.0, 8.0, 6.0, T), Prim::Disc(0.0, 0.0, 3.0)];
    for (base, name, prims, rots) in [(1u16, "torso", torso, &[1u8, 2, 8][..]), (2, "hips", hips, &[1][..]), (3, "waist", waist, &[1][..])] {
        for &r in rots {
            b.add((5, 1, base, 1, 1, r), format!("{name} {}", DIRS8[r as usize - 1]), "torso",
                vec![("part", name.into()), ("lean", DIRS8[r as usize - 1].into())], &prims, (r as f64 - 1.0) * 45.0);
        }
    }
    let shoulders: Vec<(&str, Vec<Prim>)> = vec![
        ("level", vec![Prim::Line(-18.0, 0.0, 18.0, 0.0, T), Prim::Disc(-18.0, 0.0, 3.5), Prim::Disc(18.0, 0.0, 3.5)]),
        ("tilted", vec![Prim::Line(-18.0, 6.0, 18.0, -6.0, T), Prim::Disc(-18.0, 6.0, 3.5), Prim::Disc(18.0, -6.0, 3.5)]),
        ("raised", vec![Prim::Arc(0.0, 14.0, 20.0, 215.0, 325.0, T), Prim::Disc(-16.4, 2.5, 3.5), Prim::Disc(16.4, 2.5, 3.5)]),
        ("forward", vec![Prim::Line(-18.0, 0.0, 18.0, 0.0, T), Prim::Line(-18.0, 0.0, -18.0, 8.0, T), Prim::Line(18.0, 0.0, 18.0, 8.0, T)]),
    ];
    for (i, (name, prims)) in shoulders.iter().enumerate() {
        b.add((5, 2, i as u16 + 1, 1, 1, 1), format!("shoulders {name}"), "shoulders",
            vec![("shoulders", name.to_string())], prims, 0.0);
    }
    let upper = vec![Prim::Line(0.0, 12.0, 0.0, -12.0, T), Prim::Disc(0.0, -13.0, 3.5)];
    let bent = vec![Prim::Line(0.0, 12.0, 0.0, -4.0, T), Prim::Line(0.0, -4.0, 10.0, -12.0, T), Prim::Disc(0.0, 12.0, 3.5)];
    for (base, name, prims) in [(1u16, "straight", upper), (2, "bent", bent)] {
        for r in [1u8, 3, 5, 7] {
            b.add((5, 3, base, 1, 1, r), format!("arm {name} {}", DIRS8[r as usize - 1]), "arm",
                vec![("arm", name.into()), ("direction", DIRS8[r as usize - 1].into())], &prims, (r as f64 - 1.0) * 45.0);
        }
    }
}

fn locations(b: &mut Builder) {
    let spots = [("centre", 0.0, 0.0), ("upper-left", -5.0, -5.0), ("upper-right", 5.0, -5.0), ("lower-left", -5.0, 5.0), ("lower-right", 5.0, 5.0)];
    for (i, (name, x, y)) in spots.iter().enumerate() {
        let mut prims = rect_outline(-10.0, -10.0, 10.0, 10.0, 2.5);
        prims.push(Prim::Disc(*x, *y, 3.5));
        b.add((6, 1, i as u16 + 1, 1, 1, 1), format!("location {name}"), "torso",
            vec![("location", name.to_string())], &prims, 0.0);
    }
    let marks: Vec<(&str, Vec<Prim>)> = vec![
        ("near", vec![Prim::Line(-8.0, 0.0, 8.0, 0.0, T), Prim::Line(0.0, -8.0, 0.0, 8.0, T), Prim::Ring(0.0, 0.0, 5.0, 2.5)]),
        ("far", vec![Prim::Line(-10.0, 0.0, 10.0, 0.0, T), Prim::Disc(-10.0, 0.0, 3.5), Prim::Disc(10.0, 0.0, 3.5), Prim::Disc(0.0, -7.0, 2.5)]),
    ];
    for (i, (name, prims)) in marks.iter().enumerate() {
        b.add((6, 2, i as u16 + 1, 1, 1, 1), format!("distance {name}"), "torso",
            vec![("distance", name.to_string())], prims, 0.0);
    }
}

fn punctuation(b: &mut Builder) {
    let bars = |n: usize| -> Vec<Prim> {
        (0..n).map(|i| Prim::Line(-12.0, i as f64 * 7.0, 12.0, i as f64 * 7.0, T)).collect()
    };
    let marks: Vec<(&str, Vec<Prim>)> = vec![
        ("period", bars(2)),
        ("comma", bars(1)),
        ("colon", vec![Prim::Disc(0.0, -5.0, 3.5), Prim::Disc(0.0, 5.0, 3.5)]),
        ("parenthesis", vec![Prim::Arc(8.0, 0.0, 12.0, 130.0, 230.0, T), Prim::Arc(-8.0, 0.0, 12.0, -50.0, 50.0, T)]),
        ("semicolon", bars(3)),
    ];
    for (i, (name, prims)) in marks.iter().enumerate() {
        b.add((7, 1, i as u16 + 1, 1, 1, 1), format!("punctuation {name}"), "punctuation",
            vec![("mark", name.to_string())], prims, 0.0);
    }
}

fn main() {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data/sample-catalog".into()));
    let mut b = Builder::default();
    hands(&mut b);
    movement(&mut b);
    dynamics(&mut b);
    head_face(&mut b);
    body(&mut b);
    locations(&mut b);
    punctuation(&mut b);

    let mut kept: Vec<(Glyph, Vec<f32>)> = Vec::new();
    for g in std::mem::take(&mut b.glyphs) {
        let grid = normalized_grid(&g.image);
        let size = g.image.width().max(g.image.height()) as f64;
        let clash = kept.iter().find_map(|(k, kg)| {
            let ks = k.image.width().max(k.image.height()) as f64;
            let s = similarity(&grid, kg) * (size.min(ks) / size.max(ks)).sqrt();
            (s >= MAX_SIMILARITY).then_some((k.id, s))
        });
        match clash {
            Some((other, s)) => b.rejected.push((g.id, other, s)),
            None => kept.push((g, grid)),
        }
    }
    for (id, other, s) in &b.rejected {
        eprintln!("rejected {id}: too close to {other} ({s:.3})");
    }
    kept.sort_by_key(|(g, _)| g.id);

    let assets = out.join("assets");
    std::fs::create_dir_all(&assets).expect("create asset dir");
    let mut manifest = String::new();
    writeln!(manifest, "@manifest version=sample-1 count={}", kept.len()).unwrap();
    for line in [
        "@region head body 4-01",
        "@region face body 4-02 4-03 4-04 4-05",
        "@region shoulders body 5-02",
        "@region arm body 5-03",
        "@region hand body 1",
        "@region torso body 5-01 6",
        "@region movement aspect 2-02 2-03 2-04 2-05",
        "@region contact aspect 2-01",
        "@region dynamics aspect 3",
        "@region punctuation aspect 7",
    ] {
        writeln!(manifest, "{line}").unwrap();
    }
    let mut per_cat: BTreeMap<u8, usize> = BTreeMap::new();
    for (g, _) in &kept {
        *per_cat.entry(g.id.category).or_default() += 1;
        let file = format!("assets/{}.png", g.id);
        g.image.to_gray().save_png(&out.join(&file)).expect("write asset");
        let attrs: Vec<String> = g.attrs.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(manifest, "{}\t{}\t{}\t{}\t{}", g.id, g.name, g.region, attrs.join(";"), file).unwrap();
        if g.exception {
            manifest.push_str("\texception");
        }
        manifest.push('\n');
    }
    std::fs::write(out.join("manifest.txt"), manifest).expect("write manifest");
    eprintln!("{} glyphs written ({} rejected): {:?}", kept.len(), b.rejected.len(), per_cat);
}
