"""``nls-lab`` command line: figure tables, sweeps, state analysis, validation.

Every table is written with 12 significant digits in scientific notation so
output files are byte-identical across runs and platforms. Paired-attenuation
cells below ``g = 1/tau`` are ``nan`` (``null`` in JSON): the attenuation
factor would have to exceed 1 there.

Exit codes: 0 success, 1 validation failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from nlslab import closed_form as cf
from nlslab.channels import ChannelParams
from nlslab.errors import DomainError, UnphysicalRegimeError
from nlslab.necessity import (
    SuperpositionSpec,
    equal_channel_criterion,
    requires_attenuation,
    witness_gains,
)
from nlslab.protocol import geometric_grid, run, sweep_params
from nlslab.scissors import ratio_surface
from nlslab.states import StateFamily, parse_state_spec

FIGURES = (2, 3, 4, 5, 6, 7)
TAU2 = 0.25
TMSV_GAMMA = 0.2
TMSV_NMAX = 12
TMSV_N = 1

_REASON_TEXT = {
    "vacuum_term": "vacuum term",
    "overdetermined": "overdetermined system",
    "nonpositive_solution_only": "no all-positive solution",
}


def fmt(x):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    if isinstance(x, str):
        return x
    return f"{float(x):.11e}"


@dataclass
class Table:
    header: str
    columns: list
    rows: list

    def to_csv(self):
        lines = [f"# {self.header}", ",".join(self.columns)]
        lines += [",".join(fmt(v) for v in row) for row in self.rows]
        return "\n".join(lines) + "\n"

    def to_json(self):
        def val(v):
            if isinstance(v, str):
                return v
            v = float(v)
            return None if math.isnan(v) else float(fmt(v))

        records = [{c: val(v) for c, v in zip(self.columns, row)} for row in self.rows]
        doc = {"header": self.header, "columns": self.columns, "records": records}
        return json.dumps(doc, indent=1) + "\n"

    def render(self, form):
        return self.to_json() if form == "json" else self.to_csv()


# figure tables --------------------------------------------------------------

def _figure_families():
    return {
        3: StateFamily.w(3),
        4: StateFamily.ghz(3),
        5: StateFamily.tmsv(TMSV_GAMMA, n_max=TMSV_NMAX, amp_cutoff=TMSV_N),
        6: StateFamily.noon(3),
    }


def _point(family, base, g, mode):
    try:
        res = run(family, sweep_params(base, g, mode))
    except UnphysicalRegimeError:
        return math.nan, math.nan
    return res.fidelity, res.success_probability


def _loss_only(family, tau):
    # no filters at all; lift the TMSV amplifier truncation
    cut = None
    if family.kind == "tmsv":
        cut = (family.n_max,) * family.n_modes
    params = ChannelParams((1.0,) * family.n_modes, tau, (1.0,) * family.n_modes, cut)
    return run(family, params).fidelity


def gain_table(family, tau, grid):
    """Rows ``(g, F_loss, F_none, F_paired, Ps_none, Ps_paired)``."""
    base = ChannelParams((1.0,) * family.n_modes, tau, (1.0,) * family.n_modes)
    f_loss = _loss_only(family, tau)
    rows = []
    for g in grid:
        fn, pn = _point(family, base, g, "none")
        fp, pp = _point(family, base, g, "paired")
        rows.append([g, f_loss, fn, fp, pn, pp])
    return rows


GAIN_COLUMNS = ["g", "F_loss", "F_none", "F_paired", "Ps_none", "Ps_paired"]


def figure_table(figure, points=48):
    if figure not in FIGURES:
        raise DomainError(f"unknown figure {figure}; choose from {FIGURES}")
    tau = math.sqrt(TAU2)
    grid = geometric_grid(1.0, 1e3, points)
    if figure == 2:
        taus = [round(0.05 * k, 10) for k in range(1, 21)]
        rows = [list(r) for r in ratio_surface(taus, grid)]
        return Table("figure 2 | sigma/mu, nu=1, identical arms", ["tau", "g", "sigma_over_mu"], rows)
    families = _figure_families()
    if figure == 7:
        rows = []
        for fig in (3, 4, 5, 6):
            fam = families[fig]
            taus = (tau,) * fam.n_modes
            rows += [[fam.kind] + r for r in gain_table(fam, taus, grid)]
        header = f"figure 7 | W M=3, GHZ M=3, TMSV gamma={TMSV_GAMMA:g} N={TMSV_N}, NOON n=3 | tau2={TAU2:g}"
        return Table(header, ["state"] + GAIN_COLUMNS, rows)
    fam = families[figure]
    taus = (tau,) * fam.n_modes
    desc = fam.describe()
    if fam.kind == "tmsv":
        desc += f" N={TMSV_N}"
    return Table(f"figure {figure} | {desc} | tau2={TAU2:g}", GAIN_COLUMNS, gain_table(fam, taus, grid))


def sweep_table(family, tau2, gmin, gmax, points, mode):
    taus = tuple(math.sqrt(t) for t in tau2)
    if len(taus) == 1:
        taus = taus * family.n_modes
    if len(taus) != family.n_modes:
        raise DomainError(f"--tau2 needs 1 or {family.n_modes} values")
    base = ChannelParams((1.0,) * family.n_modes, taus, (1.0,) * family.n_modes)
    rows = []
    for g in geometric_grid(gmin, gmax, points):
        f, p = _point(family, base, g, mode)
        rows.append([g, f, p])
    t2 = ",".join(f"{t:g}" for t in tau2)
    return Table(f"sweep | {family.describe()} | tau2={t2} | attenuation={mode}", ["g", "F", "Ps"], rows)


# analysis -------------------------------------------------------------------

def analysis_report(family, tau=None):
    spec = SuperpositionSpec.from_family(family)
    verdict = requires_attenuation(spec)
    lines = [f"state: {family.describe()}"]
    if verdict.attenuation_required:
        lines.append(f"attenuation required ({_REASON_TEXT[verdict.reason]})")
    else:
        lines.append("attenuation not required")
        taus = tau or (1.0,)
        if len(taus) == 1:
            taus = taus * spec.n_modes
        lines.append("witness x: " + " ".join(f"{x:.6g}" for x in verdict.witness))
        gains = witness_gains(verdict.witness, taus)
        lines.append(
            "witness gains (g_k = exp(x_k)/tau_k, tau=" + ",".join(f"{t:g}" for t in taus) + "): "
            + " ".join(f"{g:.6g}" for g in gains)
        )
    totals = sorted({sum(occ) for occ in spec.occupations()})
    ok = equal_channel_criterion(spec)
    lines.append(
        "equal-channel criterion: " + ("satisfied" if ok else "not satisfied")
        + " (term photon totals " + ",".join(str(t) for t in totals) + ")"
    )
    return "\n".join(lines) + "\n"


# validation -----------------------------------------------------------------

def _formula_w(family, inp):
    return cf.w_formulas(inp)


def _formula_ghz(family, inp):
    return cf.ghz_formulas(inp)


def _formula_noon(family, inp):
    return cf.noon_formulas(inp, family.n)


def _formula_tmsv(family, inp):
    return cf.tmsv_formulas(inp, family.gamma, family.amp_cutoff, family.n_max)


FORMULAS = {"w": _formula_w, "ghz": _formula_ghz, "noon": _formula_noon, "tmsv": _formula_tmsv}


@dataclass
class FamilyCheck:
    name: str
    tolerance: float
    max_dF: float
    max_dPs: float
    points: int
    worst: tuple  # (g, tau, mode) of the largest residual

    @property
    def passed(self):
        return self.max_dF < self.tolerance and self.max_dPs < self.tolerance


def run_validation(tolerance=1e-10, grid=10, tmsv_tolerance=1e-8, formulas=None):
    """Closed forms against the simulator on a ``grid x grid`` (g, tau) mesh per family.

    ``formulas`` overrides entries of :data:`FORMULAS` (family kind -> callable).
    """
    if tolerance <= 0 or tmsv_tolerance <= 0:
        raise DomainError("tolerances must be positive")
    if grid < 2:
        raise DomainError("grid needs at least 2 points")
    table = dict(FORMULAS)
    table.update(formulas or {})
    gains = geometric_grid(1.0, 1e3, grid)
    taus = list(np.linspace(0.3, 1.0, grid))
    checks = []
    for family in _figure_families().values():
        tol = tmsv_tolerance if family.kind == "tmsv" else tolerance
        worst_f = worst_p = 0.0
        worst = None
        n = 0
        for tau in taus:
            base = ChannelParams((1.0,) * family.n_modes, (tau,) * family.n_modes, (1.0,) * family.n_modes)
            for g in gains:
                for mode in ("none", "paired"):
                    try:
                        params = sweep_params(base, g, mode)
                    except UnphysicalRegimeError:
                        continue
                    res = run(family, params)
                    F, P = table[family.kind](family, cf.ClosedFormInput.from_params(params))
                    dF, dP = abs(F - res.fidelity), abs(P - res.success_probability)
                    if worst is None or max(dF, dP) > max(worst_f, worst_p):
                        worst = (g, tau, mode)
                    worst_f, worst_p = max(worst_f, dF), max(worst_p, dP)
                    n += 1
        checks.append(FamilyCheck(family.describe(), tol, worst_f, worst_p, n, worst))
    return checks


def validation_report(checks):
    lines = []
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        line = (
            f"{status} {c.name}: max|dF|={c.max_dF:.3e} max|dPs|={c.max_dPs:.3e} "
            f"tol={c.tolerance:g} points={c.points}"
        )
        if not c.passed:
            g, tau, mode = c.worst
            line += f" worst at g={g:.6g} tau={tau:.6g} attenuation={mode}"
        lines.append(line)
    return "\n".join(lines) + "\n"


# argument handling ----------------------------------------------------------

def read_config(path):
    """``key=value`` lines, ``#`` comment lines; keys may use - or _."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            out[key.strip().replace("-", "_")] = value.strip().strip('"')
    return out


def build_parser():
    parser = argparse.ArgumentParser(prog="nls-lab", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; command-line flags take precedence")
    sub = parser.add_subparsers(dest="command", required=True)

    rep = sub.add_parser("reproduce", parents=[common], help="write the table behind a figure")
    rep.add_argument("--figure", type=int, choices=FIGURES)
    rep.add_argument("--out")
    rep.add_argument("--format", choices=("csv", "json"), default="csv")
    rep.add_argument("--points", type=int, default=48)

    sw = sub.add_parser("sweep", parents=[common], help="fidelity and success probability against gain")
    sw.add_argument("--state")
    sw.add_argument("--tau2", default="0.25", help="tau^2, one value or one per mode (comma separated)")
    sw.add_argument("--gmin", type=float, default=1.0)
    sw.add_argument("--gmax", type=float, default=1e3)
    sw.add_argument("--points", type=int, default=48)
    sw.add_argument("--attenuation", choices=("paired", "none"), default="paired")
    sw.add_argument("--format", choices=("csv", "json"), default="csv")
    sw.add_argument("--out")

    an = sub.add_parser("analyze", parents=[common], help="is noiseless attenuation required?")
    an.add_argument("--state")
    an.add_argument("--tau2", help="tau^2 per mode for the witness gains")

    va = sub.add_parser("validate", parents=[common], help="closed forms against the simulator")
    va.add_argument("--tolerance", type=float, default=1e-10)
    va.add_argument("--tmsv-tolerance", type=float, default=1e-8)
    va.add_argument("--grid", type=int, default=10)
    return parser, {"reproduce": rep, "sweep": sw, "analyze": an, "validate": va}


def parse_args(argv):
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            conf = read_config(args.config)
        except OSError as exc:
            parser.error(f"cannot read config: {exc}")
        except DomainError as exc:
            parser.error(str(exc))
        sp = subs[args.command]
        known = {a.dest for a in sp._actions}
        unknown = sorted(set(conf) - known - {"config", "command"})
        if unknown:
            sp.error(f"unknown config keys: {', '.join(unknown)}")
        conf.pop("command", None)
        conf.pop("config", None)
        sp.set_defaults(**conf)
        args = parser.parse_args(argv)
    return parser, subs[args.command], args


def _floats(text, name, sp):
    try:
        return [float(v) for v in str(text).split(",")]
    except ValueError:
        sp.error(f"--{name} expects comma-separated numbers")


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    parser, sp, args = parse_args(argv)
    try:
        if args.command == "reproduce":
            if args.figure is None:
                sp.error("--figure is required")
            _emit(figure_table(args.figure, args.points).render(args.format), args.out)
        elif args.command == "sweep":
            if not args.state:
                sp.error("--state is required")
            family = parse_state_spec(args.state)
            tau2 = _floats(args.tau2, "tau2", sp)
            if family.kind == "tmsv" and family.amp_cutoff is None:
                family = StateFamily.tmsv(family.gamma, family.n_max, TMSV_N)
            table = sweep_table(family, tau2, args.gmin, args.gmax, args.points, args.attenuation)
            _emit(table.render(args.format), args.out)
        elif args.command == "analyze":
            if not args.state:
                sp.error("--state is required")
            family = parse_state_spec(args.state)
            tau = None
            if args.tau2:
                tau = tuple(math.sqrt(t) for t in _floats(args.tau2, "tau2", sp))
            sys.stdout.write(analysis_report(family, tau))
        else:
            checks = run_validation(args.tolerance, args.grid, args.tmsv_tolerance)
            sys.stdout.write(validation_report(checks))
            return 0 if all(c.passed for c in checks) else 1
    except DomainError as exc:
        print(f"nls-lab {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
