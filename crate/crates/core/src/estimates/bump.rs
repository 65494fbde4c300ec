/// `e^{−1/t}` for `t > 0`, else 0.
fn s(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth step `s(t)/(s(t) + s(1−t))`: 0 for `t ≤ 0`, 1 for `t ≥ 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = s(t);
        a / (a + s(1.0 - t))
    }
}

/// Radial profile of [`bump_eta`].
pub fn bump_eta_radial(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        smooth_step(2.0 - r)
    }
}

/// Smooth cutoff equal to 1 on `B₁` and supported in `B₂`.
pub fn bump_eta(x: [f64; 2]) -> f64 {
    bump_eta_radial(x[0].hypot(x[1]))
}

/// Cutoff `η_n ∈ C_c^∞(B₁)`: 1 for `|x| ≤ 1 − 1/n`, 0 for `|x| ≥ 1 − 1/(4n)`.
pub fn cutoff_eta_n(n: u32, x: [f64; 2]) -> f64 {
    let gap = n as f64 * (1.0 - x[0].hypot(x[1]));
    smooth_step((gap - 0.25) / 0.75)
}
