//! Recovery sequences on intervals: the limit of `F_{s,eps}` per unit
//! perimeter, the first-variation energy `G_{s,eps}`, and the one-dimensional
//! reduction estimate below 1/2.

use std::sync::Arc;

use fracfield_core::asymptotics::{claim5_double_integral, extrapolate, FitModel};
use fracfield_core::energy::{
    c_star_recovery, c_star_sweep, f_energy, frac_perimeter, g_energy, n_collar, n_functional,
};
use fracfield_core::foundations::{gamma_ds, FracOrder, Regime};
use fracfield_core::fraclap::{FieldSpec, Transition};
use fracfield_core::geometry::{eta_optimal, ModifiedDistance, SetDescriptor};
use fracfield_core::profile::Profile;

use super::{log_log_slope, Ctx};
use crate::error::{Annotate, CliError, Result};
use crate::report::{Check, Record, SuiteOutput};

pub(super) fn gamma_limsup_d1(ctx: &Ctx, out: &mut SuiteOutput) -> Result<()> {
    let lengths = ctx.cfg().numbers("lengths")?;
    if lengths.is_empty() || lengths.iter().any(|l| !(*l > 0.0)) {
        return Err(CliError::Config("lengths must be positive".into()));
    }
    for s in ctx.cfg().orders("s")? {
        if s.regime() == Regime::Sub {
            perimeter_limit(ctx, out, s, lengths[0])?;
        } else {
            c_star_limit(ctx, out, s, &lengths)?;
        }
    }
    Ok(())
}

/// `s >= 1/2`: the constant per unit perimeter must not depend on the
/// interval, and above 1/2 the optimal modification drives `G` to the
/// collar part `A_delta` of `N_s`, which is linear in `delta`.
fn c_star_limit(ctx: &Ctx, out: &mut SuiteOutput, s: FracOrder, lengths: &[f64]) -> Result<()> {
    const ID: &str = "AC-9";
    let sv = s.value();
    if lengths.len() < 2 {
        return Err(CliError::Config("the c_star comparison needs two interval lengths".into()));
    }
    let spec = ctx.spec();
    let ladder = ctx.ladder("eps", 5)?;
    let p = ctx.profile(s, ID)?;
    let mut constants = vec![];
    for &len in lengths {
        let fit = c_star_sweep(&p, len, &ladder, &spec).during(ID)?;
        for &(eps, v) in &fit.pairs {
            out.record(Record::new(ID, "F_per_perimeter", v).s(sv).eps(eps).geometry(format!("interval 0 {len}")));
        }
        out.fit(ID, format!("s={sv} length={len} F/Per"), &fit);
        constants.push(fit.extrapolated);
    }
    let tolerance = if s.regime() == Regime::Half { 0.10 } else { 0.02 };
    for (len, c) in lengths.iter().zip(&constants).skip(1) {
        out.check(Check::rel(
            ID,
            format!("s={sv}: c_star from length {len} vs length {}", lengths[0]),
            *c,
            constants[0],
            tolerance,
        ));
    }
    // Above 3/4 the collar energy A_delta itself is infinite.
    if s.regime() == Regime::Mid {
        optimal_collar(ctx, out, s, &p, lengths[0])?;
    }
    Ok(())
}

fn optimal_collar(ctx: &Ctx, out: &mut SuiteOutput, s: FracOrder, p: &Arc<Profile>, len: f64) -> Result<()> {
    const ID: &str = "AC-9";
    let cfg = ctx.cfg();
    let sv = s.value();
    let spec = ctx.spec();
    let delta = cfg.number("delta")?;
    let delta_prime = cfg.number("delta_prime")?;
    let ladder = ctx.ladder("g_eps", 4)?;
    // The window of the recovery fields.
    let (_, omega) = c_star_recovery(p.clone(), len, ladder[0]).during(ID)?;
    let set = SetDescriptor::interval(0.0, len).during(ID)?;
    let eta = eta_optimal(&set, s, delta, delta_prime).during(ID)?;
    let modified = ModifiedDistance::new(set.clone(), eta, delta).during(ID)?;
    let mut pairs = vec![];
    for &eps in &ladder {
        let field = FieldSpec::new(p.clone(), Transition::Modified(modified.clone()), eps).during(ID)?;
        let g = g_energy(&field, &omega, &spec).during(ID)?;
        out.record(Record::new(ID, "G_optimal", g.total).s(sv).eps(eps).delta(delta).geometry(&set).err(g.err_est));
        pairs.push((eps, g.total));
    }
    let fit = extrapolate(&pairs, FitModel::PowerLaw).during(ID)?;
    out.fit(ID, format!("s={sv} G with optimal eta"), &fit);
    let plain = Transition::Distance(set.clone());
    let a_delta = n_collar(&plain, s, &omega, delta, &spec).during(ID)?;
    out.record(Record::new(ID, "A_delta", a_delta).s(sv).delta(delta).geometry(&set));
    out.check(Check::rel(
        ID,
        format!("s={sv}: extrapolated G with optimal eta vs A_delta"),
        fit.extrapolated,
        a_delta,
        0.10,
    ));

    let mut rate = vec![];
    for &d in &cfg.numbers("a_deltas")? {
        let a = n_collar(&plain, s, &omega, d, &spec).during(ID)?;
        out.record(Record::new(ID, "A_delta", a).s(sv).delta(d).geometry(&set));
        rate.push((d, a));
    }
    if rate.len() < 2 {
        return Err(CliError::Config("a_deltas needs at least two entries".into()));
    }
    let fitted = log_log_slope(&rate);
    out.check(Check::rel(ID, format!("s={sv}: A_delta proportional to delta (log-log slope)"), fitted, 1.0, 0.10));
    Ok(())
}

/// `s < 1/2`: `F` converges to `gamma_{1,s} Per_{2s}` and `G` to `N_s` of the
/// modified distance, with the reduction estimate decaying like
/// `eps^{min(1-2s, 2s)}`.
fn perimeter_limit(ctx: &Ctx, out: &mut SuiteOutput, s: FracOrder, len: f64) -> Result<()> {
    const ID: &str = "AC-10";
    let sv = s.value();
    let spec = ctx.spec();
    let ladder = ctx.ladder("eps", 4)?;
    let p = ctx.profile(s, ID)?;
    let (mut f_pairs, mut g_pairs) = (vec![], vec![]);
    let mut last = None;
    for &eps in &ladder {
        let (field, omega) = c_star_recovery(p.clone(), len, eps).during(ID)?;
        let f = f_energy(&field, &omega, &spec).during(ID)?;
        let g = g_energy(&field, &omega, &spec).during(ID)?;
        let geometry = field.set().to_string();
        out.record(Record::new(ID, "F", f.total).s(sv).eps(eps).geometry(&geometry).err(f.err_est));
        out.record(Record::new(ID, "G", g.total).s(sv).eps(eps).geometry(&geometry).err(g.err_est));
        f_pairs.push((eps, f.total));
        g_pairs.push((eps, g.total));
        last = Some((field, omega));
    }
    let (field, omega) = last.expect("the ladder is non-empty");
    let f_fit = extrapolate(&f_pairs, FitModel::PowerLaw).during(ID)?;
    let g_fit = extrapolate(&g_pairs, FitModel::PowerLaw).during(ID)?;
    out.fit(ID, format!("s={sv} F"), &f_fit);
    out.fit(ID, format!("s={sv} G"), &g_fit);

    let per = frac_perimeter(field.set(), 2.0 * sv, &omega, &spec).during(ID)?;
    let target_f = gamma_ds(1, s).during(ID)? * per;
    let target_g = n_functional(field.transition(), s, &omega, &spec).during(ID)?;
    out.record(Record::new(ID, "gamma_1_Per_2s", target_f).s(sv).geometry(field.set()));
    out.record(Record::new(ID, "N_s_modified", target_g).s(sv).geometry(field.set()));
    out.check(Check::rel(ID, format!("s={sv}: extrapolated F vs gamma_1 Per_2s"), f_fit.extrapolated, target_f, 0.02));
    out.check(Check::rel(ID, format!("s={sv}: extrapolated G vs N_s(E, beta)"), g_fit.extrapolated, target_g, 0.05));

    let ell = ctx.cfg().number("claim5_ell")?;
    let mut points = vec![];
    for &eps in &ctx.ladder("claim5_eps", 4)? {
        let v = claim5_double_integral(s, &p, eps, ell, &spec).during(ID)?;
        out.record(Record::new(ID, "reduction_double_integral", v).s(sv).eps(eps).param(ell));
        points.push((eps, v));
    }
    let exponent = log_log_slope(&points);
    let expected = (1.0 - 2.0 * sv).min(2.0 * sv);
    out.check(Check::abs(
        ID,
        format!("s={sv}: fitted eps-exponent of the reduction estimate"),
        exponent,
        expected,
        0.1,
    ));
    Ok(())
}
