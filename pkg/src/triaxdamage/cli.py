"""Command-line front end.

Subcommands: ``invariants``, ``simulate``, ``yield-surface``, ``locus`` and
``calibrate``.  Exit codes: 0 success, 1 usage or parse error, 2 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys

from . import drivers as dv
from . import io
from . import material_model as mm
from . import tensors as T
from .errors import ConvergenceError, InsufficientDataError, TriaxDamageError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2



class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; this CLI reserves 2 for numerics."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p):
    p.add_argument("--config", metavar="PATH", help="JSON run configuration")
    p.add_argument("--out", metavar="PATH", help="output file (default: standard output)")
    p.add_argument("--format", choices=io.FORMATS, help="output format (default csv)")
    p.add_argument("--preset", metavar="NAME", action="append", default=[],
                   help="material preset (%s) or path preset (%s); may be repeated"
                   % (", ".join(sorted(mm.PRESETS)), ", ".join(dv.PATH_PRESETS)))


def build_parser():
    parser = _Parser(prog="triaxdamage", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log notices to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("invariants", help="stress invariants of one tensor")
    p.add_argument("components", nargs=6, metavar="S",
                   help="s11 s22 s33 s12 s23 s13 in MPa (tensor shear)")

    p = sub.add_parser("simulate", help="drive a material point along a load path")
    _common(p)
    p.add_argument("--steps", type=int, metavar="N", help="override the number of increments")

    p = sub.add_parser("yield-surface", help="normalized yield radius over the Lode parameter")
    _common(p)

    p = sub.add_parser("locus", help="fracture strain over a (triaxiality, Lode) grid")
    _common(p)

    p = sub.add_parser("calibrate", help="fit hardening or damage-locus power law")
    _common(p)
    p.add_argument("--kind", choices=("hardening", "power_law"))
    p.add_argument("--data", metavar="PATH", help="two-column CSV of fit points")
    return parser


# --------------------------------------------------------------------------


def _setup(args):
    cfg = io.load_config(args.config) if args.config else io.RunConfig()
    path_preset = None
    for name in args.preset:
        if name in mm.PRESETS:
            # a command-line preset replaces the config's base material
            cfg.material = mm.PRESETS[name]
        elif name in dv.PATH_PRESETS:
            path_preset = name
        else:
            raise io.ConfigError(f"unknown preset {name!r}")
    if args.format:
        cfg.format = args.format
    if args.out:
        cfg.out = args.out
    return cfg, path_preset


def _emit(cfg, text):
    if cfg.out:
        io.write_text(cfg.out, text)
    else:
        sys.stdout.write(text)


def cmd_invariants(args):
    try:
        comps = [float(c) for c in args.components]
    except ValueError as exc:
        raise UsageError(f"invariants: not a number ({exc})") from exc
    if not all(math.isfinite(c) for c in comps):
        raise UsageError("invariants: components must be finite")
    st = T.stress_state(T.sym(*comps))
    fields = [("sigma_m", st.sigma_m), ("sigma_eq", st.sigma_eq), ("eta", st.eta),
              ("chi", st.chi), ("theta", st.theta), ("theta0", st.theta0)]
    line = ",".join(f"{k}={v:.6g}" for k, v in fields)
    if st.degenerate:
        line += ",degenerate=1"
    print(line)
    return EXIT_OK


def cmd_simulate(args):
    cfg, path_preset = _setup(args)
    path = io.path_from_config(cfg.path, path_preset, args.steps)
    meta = {"path": f"steps={path.steps} modes={','.join(path.modes)} "
                    f"targets={','.join(io.fmt_float(t) for t in path.targets)}"}
    try:
        records = dv.run_path(cfg.material, path)
        failure = None
    except dv.MixedControlError as exc:
        records, failure = exc.records, exc
    text = io.records_text(records, cfg.material, cfg.format,
                           truncated=str(failure) if failure else None, meta=meta)
    _emit(cfg, text)
    summ = dv.summarize(records) if records else None
    if summ:
        ef = "none" if summ.fracture_strain is None else f"{summ.fracture_strain:.6g}"
        print(f"peak_stress={summ.peak_stress:.6g} ebar_p_at_peak={summ.ebar_p_at_peak:.6g} "
              f"fracture_strain={ef} steps={summ.steps}")
    if failure:
        print(f"error: {failure}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_yield_surface(args):
    cfg, _ = _setup(args)
    sw = cfg.sweep
    extra = set(sw) - {"ebar_p", "eta", "samples"}
    if extra:
        raise io.ConfigError(f"yield-surface does not use sweep key(s) {sorted(extra)}")
    ys = dv.yield_surface_sweep(cfg.material, sw.get("ebar_p", 0.0), sw.get("eta"),
                                int(sw.get("samples", 181)))
    rows = [[float(p), float(t), float(r)]
            for p, t, r in zip(ys.phi, ys.polar_theta0, ys.polar_radius)]
    eta = cfg.material.eta0 if sw.get("eta") is None else sw["eta"]
    meta = {"sweep": f"ebar_p={io.fmt_float(sw.get('ebar_p', 0.0))} eta={io.fmt_float(eta)}"}
    _emit(cfg, io.render_table(("phi", "theta0", "radius"), rows, cfg.material,
                               cfg.format, meta))
    return EXIT_OK


def cmd_locus(args):
    cfg, _ = _setup(args)
    sw = dict(cfg.sweep)
    extra = set(sw) - {"mode", "eta_grid", "theta0_grid", "pairs", "d_eps", "max_strain",
                       "workers"}
    if extra:
        raise io.ConfigError(f"locus does not use sweep key(s) {sorted(extra)}")
    kw = {}
    for key in ("eta_grid", "theta0_grid"):
        if key in sw:
            kw[key] = [float(v) for v in sw[key]]
    pairs = sw.get("pairs")
    if pairs is not None:
        try:
            kw["pairs"] = [(float(e), float(t)) for e, t in pairs]
        except (TypeError, ValueError) as exc:
            raise io.ConfigError(f"pairs must be [eta, theta0] lists: {exc}") from exc
    table = dv.damage_locus_sweep(cfg.material, mode=sw.get("mode", "power_law"),
                                  d_eps=float(sw.get("d_eps", 1e-3)),
                                  max_strain=float(sw.get("max_strain", 3.0)),
                                  workers=int(sw.get("workers", 1)), **kw)
    rows = [[r.eta, r.theta0, r.h, r.ebar_f, r.status] for r in table.rows]
    meta = {"locus": f"mode={sw.get('mode', 'power_law')}"}
    _emit(cfg, io.render_table(("eta", "theta0", "h", "ebar_f", "status"), rows, cfg.material,
                               cfg.format, meta))
    return EXIT_OK


def _read_points(path):
    pts = []
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(l for l in fh if not l.startswith("#")) if r]
        if rows:
            try:
                float(rows[0][0])
            except ValueError:
                rows = rows[1:]  # header
        pts = [(float(r[0]), float(r[1])) for r in rows]
    except (OSError, ValueError, IndexError) as exc:
        raise io.ConfigError(f"cannot read fit data {path}: {exc}") from exc
    return pts


def cmd_calibrate(args):
    cfg, _ = _setup(args)
    kind = args.kind or cfg.fit.get("kind", "hardening")
    if kind not in ("hardening", "power_law"):
        raise io.ConfigError(f"unknown fit kind {kind!r}")
    pts = _read_points(args.data) if args.data else cfg.fit.get("points")
    if not pts:
        raise io.ConfigError("no fit points (use --data or fit.points)")
    params = cfg.material
    if kind == "hardening":
        fit = dv.fit_hardening(pts)
        rows = [["a", fit.A], ["b", fit.B], ["n", fit.n], ["rms_residual", fit.residual]]
        params = params.with_(A=fit.A, B=fit.B, n=fit.n)
    else:
        coef, expo = dv.fit_power_law(pts)
        rows = [["coefficient", coef], ["exponent", expo]]
    _emit(cfg, io.render_table(("parameter", "value"), rows, params, cfg.format,
                               {"fit": f"kind={kind} points={len(pts)}"}))
    return EXIT_OK


COMMANDS = {
    "invariants": cmd_invariants,
    "simulate": cmd_simulate,
    "yield-surface": cmd_yield_surface,
    "locus": cmd_locus,
    "calibrate": cmd_calibrate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, io.ConfigError, InsufficientDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, TriaxDamageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
