//! Constants, the half-space identity, the profile, the potential limit and
//! the exact one-dimensional identities.

use std::f64::consts::PI;

use fracfield_core::asymptotics::{
    extrapolate, formula_eta_identity, log_expansion_integral, potential_limit_ratio, FitModel, LogVariant,
};
use fracfield_core::foundations::{gamma_ds, sigma_w, FracOrder, PotentialKind};
use fracfield_core::fraclap::{fraclap_1d, halfspace_quadrature, reduction_kernel, ProfileField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{slope, Ctx};
use crate::error::{Annotate, CliError, Result};
use crate::report::{Check, Record, SuiteOutput};

pub(super) fn constants(ctx: &Ctx, out: &mut SuiteOutput) -> Result<()> {
    const ID: &str = "AC-1";
    let half = FracOrder::from_ratio(1, 2).during(ID)?;
    let potential = ctx.potential()?;
    let g1 = gamma_ds(1, half).during(ID)?;
    let g2 = gamma_ds(2, half).during(ID)?;
    out.record(Record::new(ID, "gamma_1", g1).s(0.5));
    out.record(Record::new(ID, "gamma_2", g2).s(0.5));
    out.check(Check::abs(ID, "gamma_{1,1/2} = 1/pi", g1, 1.0 / PI, 1e-12));
    out.check(Check::abs(ID, "gamma_{2,1/2} = 1/(2 pi)", g2, 1.0 / (2.0 * PI), 1e-12));
    if !matches!(potential.kind(), PotentialKind::Quartic) {
        return Err(CliError::Config("the constants suite checks the quartic potential".into()));
    }
    let sw = sigma_w(&potential, &ctx.spec()).during(ID)?;
    out.record(Record::new(ID, "sigma_W", sw));
    out.check(Check::abs(ID, "sigma_W(quartic) = 4 sqrt(2) / 3", sw, 4.0 * 2f64.sqrt() / 3.0, 1e-10));
    Ok(())
}

pub(super) fn halfspace_identity(ctx: &Ctx, out: &mut SuiteOutput) -> Result<()> {
    const ID: &str = "AC-2";
    let spec = ctx.spec();
    let distances = ctx.cfg().numbers("distances")?;
    for s in ctx.cfg().orders("s")? {
        let sv = s.value();
        let g1 = gamma_ds(1, s).during(ID)?;
        let mut worst = 0.0f64;
        for &d in &distances {
            let quad = halfspace_quadrature(s, d, &spec).during(ID)?;
            let exact = g1 / sv * d.signum() * d.abs().powf(-2.0 * sv);
            let rel = (quad - exact).abs() / exact.abs();
            worst = worst.max(rel);
            out.record(Record::new(ID, "quadrature", quad).s(sv).param(d).geometry("halfspace 1 0 0"));
            out.record(Record::new(ID, "closed_form", exact).s(sv).param(d).geometry("halfspace 1 0 0"));
        }
        out.check(Check::at_most(ID, format!("s={sv}: max relative gap to (gamma_1/s)|d|^(-2s)"), worst, 1e-6));
    }
    Ok(())
}

pub(super) fn profile(ctx: &Ctx, out: &mut SuiteOutput) -> Result<()> {
    const ID: &str = "AC-3";
    let spec = ctx.spec();
    let eps_list = ctx.cfg().numbers("eps")?;
    let points = ctx.cfg().numbers("points")?;
    for s in ctx.cfg().orders("s")? {
        let sv = s.value();
        let p = ctx.profile(s, ID)?;
        let diag = p.verify();
        out.record(Record::new(ID, "residual_sup", diag.residual_sup).s(sv));
        out.record(Record::new(ID, "tail_match", diag.tail_match).s(sv));
        out.record(Record::new(ID, "decay_constant", diag.decay_constant).s(sv));
        out.record(Record::new(ID, "tail_coeff", p.tail_coeff()).s(sv));
        out.check(Check::at_most(ID, format!("s={sv}: residual sup"), diag.residual_sup, 1e-5));
        out.check(Check::at_most(ID, format!("s={sv}: tail match on [Z/2, Z]"), diag.tail_match, 0.05));
        // The epsilon equation (-d_zz)^s w_eps + eps^{-2s} W'(w_eps) = 0 at the
        // images eps z of unit points: its residual scales exactly as eps^{-2s}.
        for &eps in &eps_list {
            let field = ProfileField { profile: p.clone(), eps };
            let mut sup = 0.0f64;
            for &z in &points {
                let x = eps * z;
                let lap = fraclap_1d(&field, s, x, &spec).during(ID)?;
                let r = lap + eps.powf(-2.0 * sv) * p.potential().derivative(p.eval(x, 0, eps));
                sup = sup.max(r.abs());
            }
            let scaled = sup * eps.powf(2.0 * sv);
            out.record(Record::new(ID, "eps_equation_residual_sup", sup).s(sv).eps(eps));
            out.check(Check::at_most(ID, format!("s={sv}, eps={eps}: eps^(2s) x eps-equation residual"), scaled, 1e-5));
        }
    }
    Ok(())
}

pub(super) fn potential_limit(ctx: &Ctx, out: &mut SuiteOutput) -> Result<()> {
    const ID: &str = "AC-4";
    let ladder = ctx.ladder("eps", 4)?;
    let points = ctx.cfg().numbers("points")?;
    for s in ctx.cfg().orders("s")? {
        let sv = s.value();
        let p = ctx.profile(s, ID)?;
        for &z in &points {
            let mut pairs = vec![];
            for &eps in &ladder {
                let ratio = potential_limit_ratio(s, &p, eps, z).during(ID)?;
                let mirrored = potential_limit_ratio(s, &p, eps, -z).during(ID)?;
                out.record(Record::new(ID, "ratio", ratio).s(sv).eps(eps).param(z));
                out.record(Record::new(ID, "ratio_mirrored", mirrored).s(sv).eps(eps).param(-z));
                pairs.push((eps, ratio));
            }
            let fit = extrapolate(&pairs, FitModel::PowerLaw).during(ID)?;
            out.fit(ID, format!("s={sv} z={z} potential ratio"), &fit);
            out.check(Check::abs(ID, format!("s={sv}, z={z}: extrapolated ratio"), fit.extrapolated, 1.0, 0.03));
        }
    }
    Ok(())
}

fn range(ctx: &Ctx, key: &str) -> Result<(f64, f64)> {
    match ctx.cfg().numbers(key)?.as_slice() {
        &[a, b] if a < b => Ok((a, b)),
        _ => Err(CliError::Config(format!("key {key:?} must be [low, high] with low < high"))),
    }
}

pub(super) fn exact_identities(ctx: &Ctx, out: &mut SuiteOutput) -> Result<()> {
    const ID: &str = "AC-5";
    let spec = ctx.spec();
    let cfg = ctx.cfg();

    // Integration by parts against the log kernel, on seeded random inputs.
    let cases = cfg.integer("cases")? as usize;
    let z0_max = cfg.number("z0_max")?;
    let ell_range = range(ctx, "ell_range")?;
    let eps_range = range(ctx, "eps_range")?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.integer("seed")?);
    for s in cfg.orders("s")? {
        let sv = s.value();
        let p = ctx.profile(s, ID)?;
        let mut worst = 0.0f64;
        for k in 0..cases {
            let z0 = rng.gen_range(-z0_max..=z0_max);
            let ell = rng.gen_range(ell_range.0..=ell_range.1);
            let eps = rng.gen_range(eps_range.0..=eps_range.1);
            let (lhs, rhs) = formula_eta_identity(&p, z0, ell, eps, &spec).during(ID)?;
            worst = worst.max((lhs - rhs).abs());
            out.record(Record::new(ID, "formula_eta_gap", lhs - rhs).s(sv).eps(eps).param(k as f64));
        }
        out.check(Check::at_most(ID, format!("s={sv}: formula-eta max |lhs - rhs| over {cases} cases"), worst, 1e-7));
    }

    // Dimensional reduction of the kernel.
    let dims = cfg.numbers("kernel_dims")?;
    let orders = cfg.orders("kernel_s")?;
    let heights = cfg.numbers("kernel_a")?;
    let mut worst = 0.0f64;
    for &d in &dims {
        if d.fract() != 0.0 {
            return Err(CliError::Config("kernel_dims must be integers".into()));
        }
        for &s in &orders {
            for &a in &heights {
                let (closed, quad) = reduction_kernel(d as usize, s, a, &spec).during(ID)?;
                worst = worst.max((quad - closed).abs() / closed.abs());
                out.record(Record::new(ID, format!("reduction_kernel_d{d}"), quad).s(s.value()).param(a));
            }
        }
    }
    out.check(Check::at_most(ID, "reduction kernel: max relative gap quadrature vs closed form", worst, 1e-8));

    // Logarithmic growth: slope in log(delta) against the predicted prefactor.
    let deltas = cfg.numbers("log_deltas")?;
    let alpha = cfg.number("log_alpha")?;
    let half = FracOrder::from_ratio(1, 2).during(ID)?;
    let g1 = gamma_ds(1, half).during(ID)?;
    for (d, variant, expected) in [
        (2usize, LogVariant::Moment2, g1 / gamma_ds(2, half).during(ID)?),
        (3usize, LogVariant::General(alpha), 2.0 * g1 / gamma_ds(3, half).during(ID)?),
    ] {
        let mut logs = vec![];
        let mut values = vec![];
        for &delta in &deltas {
            let v = log_expansion_integral(d, delta, variant, &spec).during(ID)?;
            out.record(Record::new(ID, format!("log_expansion_d{d}"), v).delta(delta));
            logs.push(delta.ln());
            values.push(v);
        }
        let fitted = slope(&logs, &values);
        out.record(Record::new(ID, format!("log_expansion_d{d}_slope"), fitted));
        out.check(Check::rel(ID, format!("d={d}: log-slope vs predicted prefactor"), fitted, expected, 0.02));
    }
    Ok(())
}
