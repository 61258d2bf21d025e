//! RGB <-> HSV conversion using the standard hexcone formulas.
//!
//! The exact formulas are fixed here so that color-dependent code is
//! bit-reproducible across runs:
//!
//! With r, g, b in [0, 1], max = max(r, g, b), min = min(r, g, b),
//! delta = max - min:
//!
//! - value     v = max
//! - saturation s = 0 when max = 0, else delta / max
//! - hue (degrees, [0, 360)):
//!   - 0 when delta = 0
//!   - 60 * ((g - b) / delta mod 6)  when max = r
//!   - 60 * ((b - r) / delta + 2)    when max = g
//!   - 60 * ((r - g) / delta + 4)    when max = b
//!
//! The inverse uses c = v * s, x = c * (1 - |(h / 60) mod 2 - 1|), m = v - c.

/// Convert r, g, b in [0, 1] to (hue degrees in [0, 360), saturation, value).
pub fn rgb_to_hsv(r: f64, g: f64, b: f64) -> (f64, f64, f64) {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;

    let hue = if delta == 0.0 {
        0.0
    } else if max == r {
        60.0 * (((g - b) / delta).rem_euclid(6.0))
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    // rem_euclid can round up to exactly 360.0
    let hue = if hue >= 360.0 { hue - 360.0 } else { hue };

    let saturation = if max == 0.0 { 0.0 } else { delta / max };
    (hue, saturation, max)
}

/// Convert (hue degrees, saturation, value) back to r, g, b in [0, 1].
/// Hue outside [0, 360) is wrapped.
pub fn hsv_to_rgb(hue: f64, saturation: f64, value: f64) -> (f64, f64, f64) {
    let h = hue.rem_euclid(360.0);
    let c = value * saturation;
    let x = c * (1.0 - ((h / 60.0).rem_euclid(2.0) - 1.0).abs());
    let m = value - c;
    let (r1, g1, b1) = match h {
        h if h < 60.0 => (c, x, 0.0),
        h if h < 120.0 => (x, c, 0.0),
        h if h < 180.0 => (0.0, c, x),
        h if h < 240.0 => (0.0, x, c),
        h if h < 300.0 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    (r1 + m, g1 + m, b1 + m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primary_hues() {
        assert_eq!(rgb_to_hsv(1.0, 0.0, 0.0), (0.0, 1.0, 1.0));
        assert_eq!(rgb_to_hsv(0.0, 1.0, 0.0), (120.0, 1.0, 1.0));
        assert_eq!(rgb_to_hsv(0.0, 0.0, 1.0), (240.0, 1.0, 1.0));
    }

    #[test]
    fn gray_has_zero_saturation_and_hue() {
        let (h, s, v) = rgb_to_hsv(0.5, 0.5, 0.5);
        assert_eq!((h, s), (0.0, 0.0));
        assert_eq!(v, 0.5);
    }

    #[test]
    fn round_trip_is_close() {
        for &(r, g, b) in &[
            (0.2, 0.7, 0.3),
            (0.9, 0.1, 0.5),
            (0.0, 0.0, 0.0),
            (1.0, 1.0, 1.0),
            (0.25, 0.5, 0.75),
        ] {
            let (h, s, v) = rgb_to_hsv(r, g, b);
            let (r2, g2, b2) = hsv_to_rgb(h, s, v);
            assert!((r - r2).abs() < 1e-12, "r {r} vs {r2}");
            assert!((g - g2).abs() < 1e-12, "g {g} vs {g2}");
            assert!((b - b2).abs() < 1e-12, "b {b} vs {b2}");
        }
    }

    #[test]
    fn hue_wraps() {
        let (r, g, b) = hsv_to_rgb(480.0, 1.0, 1.0); // 480 mod 360 = 120 -> green
        assert!((r, g, b) == (0.0, 1.0, 0.0));
        let (r, g, b) = hsv_to_rgb(-90.0, 1.0, 1.0); // -> 270
        let (h, _, _) = rgb_to_hsv(r, g, b);
        assert!((h - 270.0).abs() < 1e-9);
    }
}
