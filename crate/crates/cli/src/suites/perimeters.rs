//! Fractional perimeters: the interval closed form, scaling, and the
//! sigma -> 1 limit on a disk by seeded Monte-Carlo.

use fracfield_core::energy::{frac_perimeter, frac_perimeter_disk, DomainWindow, MonteCarloSpec};
use fracfield_core::foundations::sphere_measure;
use fracfield_core::geometry::SetDescriptor;

use super::Ctx;
use crate::error::{Annotate, CliError, Result};
use crate::report::{Check, Record, SuiteOutput};

const ID: &str = "AC-11";

/// The smallest centered square containing the disk with a margin of one
/// radius.
fn disk_box(center: &[f64], radius: f64) -> Result<DomainWindow> {
    let m = 2.0 * radius;
    DomainWindow::box2d([center[0] - m, center[1] - m], [center[0] + m, center[1] + m]).during(ID)
}

pub(super) fn perimeters(ctx: &Ctx, out: &mut SuiteOutput) -> Result<()> {
    let cfg = ctx.cfg();
    let spec = ctx.spec();
    let len = cfg.number("length")?;
    let sigma = cfg.number("sigma")?;
    let line = DomainWindow::whole_line();

    // Whole-line Per_sigma((0, L)) = 4 L^{1-sigma} / (sigma (1 - sigma)).
    let interval = SetDescriptor::interval(0.0, len).during(ID)?;
    let per = frac_perimeter(&interval, sigma, &line, &spec).during(ID)?;
    let closed = 4.0 * len.powf(1.0 - sigma) / (sigma * (1.0 - sigma));
    out.record(Record::new(ID, "Per_sigma_interval", per).geometry(&interval).param(sigma));
    out.check(Check::rel(ID, format!("interval (0, {len}), sigma={sigma}: closed form"), per, closed, 1e-12));

    // Per_sigma(lambda E) = lambda^{d - sigma} Per_sigma(E), for the interval
    // by quadrature and for the disk by Monte-Carlo on identical streams.
    let disk = ctx.set("geometry")?;
    let SetDescriptor::Ball { center, radius } = &disk else {
        return Err(CliError::Config(format!("perimeters needs a disk geometry, got {disk}")));
    };
    if center.len() != 2 {
        return Err(CliError::Config("perimeters needs a disk in the plane".into()));
    }
    let mc = MonteCarloSpec {
        seed: cfg.integer("seed")?,
        samples: cfg.integer("samples")? as usize,
        strata: cfg.integer("strata")? as usize,
    };
    let base = frac_perimeter_disk(&disk, sigma, &disk_box(center, *radius)?, &mc).during(ID)?;
    for &lambda in &cfg.numbers("scales")? {
        let big = SetDescriptor::interval(0.0, lambda * len).during(ID)?;
        let scaled = frac_perimeter(&big, sigma, &line, &spec).during(ID)?;
        let factor = lambda.powf(1.0 - sigma);
        out.record(Record::new(ID, "Per_sigma_interval", scaled).geometry(&big).param(sigma));
        out.check(Check::rel(ID, format!("interval scaling by {lambda}"), scaled / per, factor, 1e-12));

        let wide_center: Vec<f64> = center.iter().map(|c| lambda * c).collect();
        let wide = SetDescriptor::ball(wide_center.clone(), lambda * radius).during(ID)?;
        let est = frac_perimeter_disk(&wide, sigma, &disk_box(&wide_center, lambda * radius)?, &mc).during(ID)?;
        out.record(Record::new(ID, "Per_sigma_disk_mc", est.value).geometry(&wide).param(sigma).err(est.half_width));
        let factor = lambda.powf(2.0 - sigma);
        out.check(Check::rel(ID, format!("disk scaling by {lambda}"), est.value / base.value, factor, 1e-10));
    }

    // (1 - sigma) Per_sigma(E) -> (2 |S^{d-2}| / (d - 1)) Per(E) = 8 pi R in the plane.
    let limit = 2.0 * sphere_measure(0) * disk.boundary_measure();
    let window = disk_box(center, *radius)?;
    let mut sigmas = cfg.numbers("mc_sigmas")?;
    sigmas.sort_by(f64::total_cmp);
    let mut gaps = vec![];
    for &sg in &sigmas {
        let est = frac_perimeter_disk(&disk, sg, &window, &mc).during(ID)?;
        let scaled = (1.0 - sg) * est.value;
        out.record(
            Record::new(ID, "one_minus_sigma_Per_sigma_disk", scaled)
                .geometry(&disk)
                .param(sg)
                .err((1.0 - sg) * est.half_width),
        );
        gaps.push((scaled / limit - 1.0).abs());
    }
    let Some(&last) = gaps.last() else {
        return Err(CliError::Config("mc_sigmas must not be empty".into()));
    };
    let towards = gaps.windows(2).all(|w| w[1] < w[0]);
    out.check(Check::holds(ID, "disk: (1 - sigma) Per_sigma approaches the limit monotonically in sigma", towards));
    out.check(Check::at_most(
        ID,
        format!("disk, sigma={}: relative gap of (1 - sigma) Per_sigma to 8 pi R", sigmas[sigmas.len() - 1]),
        last,
        0.10,
    ));
    Ok(())
}
