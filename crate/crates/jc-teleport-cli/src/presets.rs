use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use jc_teleport::teleport::Protocol;

use crate::sweep::{Quantity, SweepSpec, TauGrid};

/// How a preset's curves are distinguished in the plot script: the
/// three-series resonance/detuning panels use line dashes, the four-series
/// large-field and small-detuning panels use the fixed color set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesStyle {
    Dashes,
    Colors,
}

/// Line colors for `SeriesStyle::Colors`, in series order.
pub const SERIES_COLORS: [&str; 4] = ["gray", "blue", "red", "black"];

#[derive(Clone, Debug)]
pub struct FigurePreset {
    pub id: &'static str,
    pub style: SeriesStyle,
    pub spec: SweepSpec,
}

pub const PRESET_IDS: [&str; 30] = [
    "fig1a", "fig1b", "fig1c", "fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c", "fig4a",
    "fig4b", "fig4c", "fig5a", "fig5b", "fig5c", "fig6a", "fig6b", "fig6c", "fig7a", "fig7b",
    "fig7c", "fig8a", "fig8b", "fig8c", "fig9a", "fig9b", "fig9c", "fig10a", "fig10b", "fig10c",
];

const RESONANCE_NBARS: [f64; 3] = [2.0, 4.0, 6.0];
const DETUNINGS: [f64; 3] = [0.1, 0.3, 0.5];
const LARGE_NBARS: [f64; 4] = [1000.0, 800.0, 400.0, 100.0];
const SMALL_DETUNINGS: [f64; 4] = [0.001, 0.005, 0.02, 0.05];

/// Panel letter to input angle: (a) pi/4, (b) pi/2, (c) 0.
fn panel_theta(panel: char) -> f64 {
    match panel {
        'a' => FRAC_PI_4,
        'b' => FRAC_PI_2,
        _ => 0.0,
    }
}

fn preset(
    id: &'static str,
    protocol: Protocol,
    quantity: Quantity,
    theta: f64,
    nbar: &[f64],
    delta: &[f64],
    style: SeriesStyle,
) -> FigurePreset {
    FigurePreset {
        id,
        style,
        spec: SweepSpec {
            protocol,
            quantity,
            n: 2,
            nbar: nbar.to_vec(),
            delta: delta.to_vec(),
            tau: TauGrid {
                start: 0.0,
                stop: 20.0,
                count: 2000,
            },
            theta,
            phi: 0.0,
            ..SweepSpec::default()
        },
    }
}

/// Looks a preset up by id (`fig1a` .. `fig10c`).
pub fn resolve(id: &str) -> Option<FigurePreset> {
    if !id.is_ascii() {
        return None;
    }
    let (family, panel) = id.split_at(id.len().checked_sub(1)?);
    let panel = panel.chars().next()?;
    if !matches!(panel, 'a' | 'b' | 'c') {
        return None;
    }
    let theta = panel_theta(panel);
    let full: &'static str = *PRESET_IDS.iter().find(|&&p| p == id)?;
    Some(match family {
        "fig1" => preset(
            full,
            Protocol::Ftp,
            Quantity::FidelityClosed,
            theta,
            &RESONANCE_NBARS,
            &[0.0],
            SeriesStyle::Dashes,
        ),
        "fig2" => preset(
            full,
            Protocol::Ftp,
            Quantity::FidelityClosed,
            theta,
            &[4.0],
            &DETUNINGS,
            SeriesStyle::Dashes,
        ),
        "fig3" => preset(
            full,
            Protocol::Ftp,
            Quantity::QfiTheta,
            theta,
            &RESONANCE_NBARS,
            &[0.0],
            SeriesStyle::Dashes,
        ),
        "fig4" => preset(
            full,
            Protocol::Ftp,
            Quantity::QfiTheta,
            theta,
            &[4.0],
            &DETUNINGS,
            SeriesStyle::Dashes,
        ),
        "fig5" => preset(
            full,
            Protocol::Stp,
            Quantity::FidelityClosed,
            theta,
            &RESONANCE_NBARS,
            &[0.0],
            SeriesStyle::Dashes,
        ),
        "fig6" => preset(
            full,
            Protocol::Stp,
            Quantity::FidelityClosed,
            theta,
            &[4.0],
            &DETUNINGS,
            SeriesStyle::Dashes,
        ),
        "fig7" => preset(
            full,
            Protocol::Stp,
            Quantity::QfiTheta,
            theta,
            &RESONANCE_NBARS,
            &[0.0],
            SeriesStyle::Dashes,
        ),
        "fig8" => preset(
            full,
            Protocol::Stp,
            Quantity::QfiTheta,
            theta,
            &[4.0],
            &DETUNINGS,
            SeriesStyle::Dashes,
        ),
        // Large-field panels: (a) single-copy theta = pi/2, (b) single-copy
        // theta = 0, (c) two-copy theta = pi/2.
        "fig9" => preset(
            full,
            if panel == 'c' {
                Protocol::Stp
            } else {
                Protocol::Ftp
            },
            Quantity::FidelityClosed,
            if panel == 'b' { 0.0 } else { FRAC_PI_2 },
            &LARGE_NBARS,
            &[0.0],
            SeriesStyle::Colors,
        ),
        // Small-detuning panels: (a) single-copy theta = pi/4, (b)
        // single-copy theta = 0, (c) two-copy theta = pi/4.
        "fig10" => preset(
            full,
            if panel == 'c' {
                Protocol::Stp
            } else {
                Protocol::Ftp
            },
            Quantity::FidelityClosed,
            if panel == 'b' { 0.0 } else { FRAC_PI_4 },
            &[4.0],
            &SMALL_DETUNINGS,
            SeriesStyle::Colors,
        ),
        _ => return None,
    })
}
