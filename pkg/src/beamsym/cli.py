"""Command-line front end: ``beamsym <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .beam import BeamProfile, BeamSpecError, dump_beam_spec, read_beam_file
from .equivalence import (EulerMode, LinearBeamMode, UniformMode,
                          UnsupportedClassError, build_transform, pullback_solution,
                          push_point, pushforward_generator)
from .expr import ParseError, unparse
from .gottlieb import GottliebParams, g_expression, make_gottlieb
from .jet import DomainError
from .reduction import (coefficient_table, initial_from_uv, reduce_all, slope_at,
                        stage3_equilibria)
from .spectral import (ClassMismatchError, SpectralError, isospectral_check, richardson,
                       spectrum, uniform_frequencies)
from .symmetry import SymmetryGenerator, SymmetryLabel, classify

SCHEMA = "beamsym.{}/1"


class UsageError(Exception):
    pass


# Report helpers --------------------------------------------------------------


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (Fraction, SymmetryLabel)):
        return str(obj)
    return obj


def render(report: dict, fmt: str) -> str:
    report = _clean(report)
    if fmt == "structured":
        return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    lines: list[str] = []
    _human(report, lines, 0)
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    if isinstance(v, list) and all(not isinstance(e, (dict, list)) for e in v):
        return "[" + ", ".join(_fmt(e) for e in v) + "]"
    return str(v)


def _human(obj, lines, depth):
    pad = "  " * depth
    for key in sorted(obj):
        v = obj[key]
        if isinstance(v, dict):
            lines.append(f"{pad}{key}:")
            _human(v, lines, depth + 1)
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            cols = sorted(v[0])
            lines.append(f"{pad}{key}:")
            lines.append(pad + "  " + "  ".join(f"{c:>14}" for c in cols))
            for row in v:
                lines.append(pad + "  " + "  ".join(f"{_fmt(row[c]):>14}" for c in cols))
        else:
            lines.append(f"{pad}{key}: {_fmt(v)}")


def _profile_doc(p: BeamProfile) -> dict:
    return {"name": p.name, "f": unparse(p.f), "m": unparse(p.m), "domain": list(p.domain)}


def _load_profile(args) -> BeamProfile:
    if getattr(args, "beam", None):
        return read_beam_file(args.beam)
    f = getattr(args, "f", None)
    if f is None:
        raise UsageError("either --beam or --f is required")
    if not getattr(args, "interval", None):
        raise UsageError("--interval is required with --f")
    m = getattr(args, "m", None) or "1"
    return BeamProfile.from_strings("inline", f, m, args.interval)


# Subcommands -----------------------------------------------------------------


def cmd_classify(args) -> tuple[dict, int]:
    p = _load_profile(args)
    c = classify(p, samples=args.samples, tol=args.tol)
    table = [
        {"x": s.x, "g": s.g,
         **{f"H{k}": v for k, v in zip(("11", "12", "21", "22"), s.h)},
         **{f"R{i + 1}": (r if r is not None else "skipped") for i, r in enumerate(s.reduced)}}
        for s in c.samples
    ]
    flags = sorted({fl for s in c.samples for fl in s.flags})
    report = {
        "schema": SCHEMA.format("classify"),
        "profile": _profile_doc(p),
        "label": c.label,
        "tol": c.tol,
        "samples": args.samples,
        "g_shift": c.g_shift,
        "hypothesis_max_residual": c.hypotheses,
        "h_max": dict(zip(("H11", "H12", "H21", "H22"), c.h_max())),
        "reduced_max": {f"R{i + 1}": v for i, v in enumerate(c.reduced_max())},
        "flags": flags,
        "residual_table": table,
    }
    return report, 0


def _modes(label: SymmetryLabel):
    if label is SymmetryLabel.A33_A1:
        return [UniformMode(3.0), UniformMode(4.7)]
    if label is SymmetryLabel.A1_A2:
        return [LinearBeamMode(2.0), LinearBeamMode(5.0, 0.3, 1.0, 0.2)]
    return [EulerMode(2.0), EulerMode(7.5)]


def _mode_name(m) -> str:
    if isinstance(m, UniformMode):
        return f"cos(omega T) sin({m.beta:g} X), omega={m.omega:g}"
    if isinstance(m, EulerMode):
        return f"cos({m.omega:g} T) X^{m.exponent:.12g}"
    return f"cos({m.omega:g} T) phi(X), phi(0..2)=({m.a0:g}, {m.a1:g}, {m.a2:g})"


def pullback_grid(tr, modes, n: int = 16) -> list[float]:
    a, b = tr.valid_domain
    pad = 1e-3 * (b - a)
    xs = np.linspace(a + pad, b - pad, n)
    ts = np.linspace(0.0, 1.0, n)
    return [max(pullback_solution(tr, md, t, x)[1].normalized for t in ts for x in xs)
            for md in modes]


def _image_table(tr):
    """Canonical-coordinate images of the generators, as (text, field(T, X, U))."""
    if tr.label is SymmetryLabel.A33_A1:
        k1, k2, _ = tr.constants
        return {"X1": ("dT", lambda T, X, U: (1, 0, 0)),
                "X2": ("U dU", lambda T, X, U: (0, 0, U)),
                "X3": (f"(4T - {4 * k1:g}) dT + (2X - {2 * k2:g}) dX",
                       lambda T, X, U: (4 * T - 4 * k1, 2 * X - 2 * k2, 0)),
                "X4": ("2 dX", lambda T, X, U: (0, 2, 0))}
    if tr.label is SymmetryLabel.A1_A2:
        return {"X1": ("dT", lambda T, X, U: (1, 0, 0)),
                "X2": ("U dU", lambda T, X, U: (0, 0, U)),
                "X3": ("4T dT + 2X dX - U dU", lambda T, X, U: (4 * T, 2 * X, -U))}
    return {"X1": ("dT", lambda T, X, U: (1, 0, 0)),
            "X2": ("U dU", lambda T, X, U: (0, 0, U)),
            "X4": ("2X dX + 3U dU", lambda T, X, U: (0, 2 * X, 3 * U))}


def _generator_images(tr, pts) -> dict:
    out = {}
    for tag, (text, field) in _image_table(tr).items():
        err = 0.0
        for pt in pts:
            got = pushforward_generator(tr, SymmetryGenerator(tag), pt["t"], pt["x"], pt["u"])
            want = np.array(field(pt["T"], pt["X"], pt["U"]), dtype=float)
            err = max(err, float(np.max(np.abs(got - want)) / (1.0 + np.max(np.abs(want)))))
        out[tag] = {"image": text, "max_deviation": err}
    return out


def cmd_canonicalize(args) -> tuple[dict, int]:
    p = _load_profile(args)
    c = classify(p, samples=args.samples, tol=args.tol)
    if c.label is SymmetryLabel.GENERIC:
        raise UnsupportedClassError("class 2A1 has no canonical point transformation")
    tr = build_transform(p, c, args.constants)
    modes = _modes(c.label)
    res = pullback_grid(tr, modes)
    names = {SymmetryLabel.A33_A1: ("k1", "k2", "k3"), SymmetryLabel.A1_A2: ("l1", "l2", "l3"),
             SymmetryLabel.ABELIAN3: ("m1", "m2", "m3")}[c.label]
    maps = {
        SymmetryLabel.A33_A1: ["T = t + k1", "X = g + k2", "U = k3 u sqrt(f g'^3)"],
        SymmetryLabel.A1_A2: ["T = t + l1 g^2", "X = 2 l2 g", "U = l3 u sqrt(f g'^3 / |g|)"],
        SymmetryLabel.ABELIAN3: ["T = t + m1", "X = m2 exp(g)", "U = m3 u sqrt(f g'^3 exp(3g))"],
    }[c.label]
    a, b = tr.valid_domain
    xs = np.linspace(a, b, 5)[1:-1]
    pts = [dict(zip(("t", "x", "u", "T", "X", "U"), (0.5, x, 1.0, *push_point(tr, 0.5, x, 1.0))))
           for x in xs]
    images = _generator_images(tr, pts)
    report = {
        "schema": SCHEMA.format("canonicalize"),
        "profile": _profile_doc(p),
        "label": c.label,
        "canonical_form": tr.canonical.form,
        "constants": dict(zip(names, tr.constants)),
        "g_shift": tr.g_shift,
        "valid_domain": list(tr.valid_domain),
        "map": maps,
        "sample_points": pts,
        "pullback": {
            "grid": "16x16",
            "modes": [_mode_name(m) for m in modes],
            "max_normalized_residual": res,
            "verified": bool(max(res) < 1e-8),
        },
        "generator_images": images,
    }
    return report, 0


def _parse_mobius(text: str):
    parts = text.split(",")
    if len(parts) != 4:
        raise UsageError("--mobius takes four comma-separated numbers L,M,P,Q")
    try:
        return tuple(float(v) for v in parts)
    except ValueError:
        raise UsageError(f"--mobius: not numbers: {text!r}") from None


def cmd_gottlieb(args) -> tuple[dict, int]:
    try:
        exponent = Fraction(args.exponent)
    except ValueError:
        raise UsageError(f"--exponent: not a rational number: {args.exponent!r}") from None
    L, M, P, Q = _parse_mobius(args.mobius)
    params = GottliebParams(exponent, args.K, args.A, args.B, L, M, P, Q, tuple(args.interval))
    prof = make_gottlieb(params, args.name)
    doc = dump_beam_spec(prof)
    c = classify(prof, samples=args.samples, tol=args.tol)
    report = {
        "schema": SCHEMA.format("gottlieb"),
        "profile": _profile_doc(prof),
        "g": unparse(g_expression(params)),
        "label": c.label,
        "h_max": max(c.h_max()),
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(doc)
        report["beam_file"] = args.out
    else:
        report["beam_spec"] = json.loads(doc)
    return report, 0


def _check_grid(N: int) -> None:
    if N < 256:
        raise ValueError(f"--N must be at least 256 (the coarsest grid N/4 needs 64 cells), got {N}")


def cmd_spectrum(args) -> tuple[dict, int]:
    _check_grid(args.N)
    p = _load_profile(args)
    grids = (args.N // 4, args.N // 2, args.N)
    om = np.array([spectrum(p, n, args.n_modes).omega for n in grids])
    ref = uniform_frequencies(args.n_modes, p.g.total)
    with np.errstate(divide="ignore", invalid="ignore"):
        order = np.log2(np.abs(om[0] - om[1]) / np.abs(om[1] - om[2]))
    lim = richardson(om[1], om[2])
    rows = [{"mode": k + 1, "omega": om[2, k], "omega_reference": ref[k],
             "deviation": abs(om[2, k] - ref[k]) / ref[k], "order": order[k],
             "omega_extrapolated": lim[k]} for k in range(args.n_modes)]
    report = {
        "schema": SCHEMA.format("spectrum"),
        "profile": _profile_doc(p),
        "bc": "clamped-clamped",
        "grids": list(grids),
        "reference": "uniform clamped beam of length g(b) - g(a)",
        "reference_length": p.g.total,
        "modes": rows,
    }
    return report, 0


def cmd_isospectral(args) -> tuple[dict, int]:
    _check_grid(args.N)
    p = _load_profile(args)
    c = classify(p, samples=args.samples)
    try:
        r = isospectral_check(p, args.n_modes, args.N, args.tol, cls=c)
    except ClassMismatchError:
        report = {"schema": SCHEMA.format("isospectral-check"), "profile": _profile_doc(p),
                  "refused": True, "label": c.label,
                  "h_max": dict(zip(("H11", "H12", "H21", "H22"), c.h_max()))}
        return report, 1
    rows = [{"mode": row.mode, "omega": row.omega, "omega_reference": row.reference,
             "deviation": row.deviation, "order_min": min(row.orders),
             "order_max": max(row.orders), "extrapolated_deviation": row.extrapolated_deviation}
            for row in r.rows]
    tr = build_transform(p, c)
    report = {
        "schema": SCHEMA.format("isospectral-check"),
        "profile": _profile_doc(p),
        "label": c.label,
        "constants": dict(zip(("k1", "k2", "k3"), tr.constants)),
        "length": r.length,
        "grids": list(r.grids),
        "tol": r.tol,
        "order_window": list(r.order_window),
        "modes": rows,
        "passed": r.passed,
    }
    return report, 0 if r.passed else 1


def cmd_reduce(args) -> tuple[dict, int]:
    if args.beam:
        prof = read_beam_file(args.beam)
        f, interval = prof.f, args.interval or prof.domain
    elif args.f is not None:
        if not args.interval:
            raise UsageError("--interval is required with --f")
        f, interval = args.f, args.interval
    else:
        raise UsageError("either --beam or --f is required")
    s1, s2, s3 = reduce_all(f, tuple(interval), args.samples)
    stages = {
        f"stage{st.stage}": {"max_derived_residual": st.max_derived,
                             "max_alternative_residual": st.max_alternative}
        for st in (s1, s2, s3)
    }
    # well-definedness: two solutions through the same (u, v)
    rng = np.random.default_rng(args.seed)
    if s3.equilibrium is None:
        u, v = float(s3.columns["u"][0]), float(s3.columns["v"][0])
    else:
        u, v = 0.5, 0.2
    slopes = []
    for _ in range(2):
        f0, f1 = rng.uniform(0.5, 2.0), rng.choice([-1.0, 1.0]) * rng.uniform(0.3, 1.5)
        slopes.append(slope_at(initial_from_uv(u, v, f0, f1), span=0.05)[2])
    report = {
        "schema": SCHEMA.format("reduce"),
        "f": f if isinstance(f, str) else unparse(f),
        "interval": [float(v) for v in interval],
        "samples": args.samples,
        "stages": stages,
        "equilibrium": list(s3.equilibrium) if s3.equilibrium else None,
        "stage3_equilibria_u": [str(q) for q in stage3_equilibria()],
        "well_definedness": {"u": u, "v": v, "dvdu": slopes,
                             "difference": abs(slopes[0] - slopes[1]), "seed": args.seed},
        "coefficients": [{"stage": s, "term": name, "derived": str(d), "alternative": str(pr),
                          "match": d == pr} for s, name, d, pr in coefficient_table()],
    }
    return report, 0


# Parser ------------------------------------------------------------------------


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a {kind.__name__}: {text!r}") from None
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
        return v
    return conv


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        flags = sorted({o for a in self._actions for o in a.option_strings})
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\nvalid flags: {' '.join(flags)}\n")
        raise SystemExit(2)


_SUBPARSERS: dict = {}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "structured"), default="human")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=_positive(float), default=1e-9)
    common.add_argument("--samples", type=_positive(int), default=33)

    beam = argparse.ArgumentParser(add_help=False)
    beam.add_argument("--beam", help="beam-spec file")
    beam.add_argument("--f", help="flexural rigidity expression")
    beam.add_argument("--m", help="mass density expression (default 1)")
    beam.add_argument("--interval", nargs=2, type=float, metavar=("A", "B"))

    report_out = argparse.ArgumentParser(add_help=False)
    report_out.add_argument("--out", help="write the report here instead of stdout")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--N", type=_positive(int), default=2000)
    grid.add_argument("--n-modes", dest="n_modes", type=_positive(int), default=3)

    p = _Parser(prog="beamsym", description="Symmetry classification of variable beams.")
    p.add_argument("--version", action="version", version=f"beamsym {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _SUBPARSERS.clear()

    sp = sub.add_parser("classify", parents=[common, beam, report_out])
    sp.set_defaults(run=cmd_classify)

    sp = sub.add_parser("canonicalize", parents=[common, beam, report_out])
    sp.add_argument("--constants", nargs=3, type=float, metavar=("C1", "C2", "C3"))
    sp.set_defaults(run=cmd_canonicalize)

    sp = sub.add_parser("gottlieb", parents=[common])
    sp.add_argument("--exponent", required=True)
    sp.add_argument("--A", type=float, required=True)
    sp.add_argument("--B", type=float, required=True)
    sp.add_argument("--K", type=float, required=True)
    sp.add_argument("--mobius", required=True, metavar="L,M,P,Q")
    sp.add_argument("--interval", nargs=2, type=float, required=True, metavar=("A", "B"))
    sp.add_argument("--name")
    sp.add_argument("--out", help="beam-spec file to write")
    sp.set_defaults(run=cmd_gottlieb)

    sp = sub.add_parser("spectrum", parents=[common, beam, report_out, grid])
    sp.set_defaults(run=cmd_spectrum)

    sp = sub.add_parser("isospectral-check", parents=[common, beam, report_out, grid])
    sp.set_defaults(run=cmd_isospectral, tol=5e-3)

    sp = sub.add_parser("reduce", parents=[common, beam, report_out])
    sp.set_defaults(run=cmd_reduce)
    _SUBPARSERS.update(sub.choices)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        if extra:
            _SUBPARSERS[args.command].error(f"unrecognized arguments: {' '.join(extra)}")
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report, code = args.run(args)
    except UsageError as exc:
        sys.stderr.write(f"beamsym {args.command}: usage error: {exc}\n")
        return 2
    except FileNotFoundError as exc:
        sys.stderr.write(f"beamsym {args.command}: file not found: {exc.filename}\n")
        return 1
    except (BeamSpecError, ParseError, DomainError, UnsupportedClassError, SpectralError,
            ValueError, OSError) as exc:
        sys.stderr.write(f"beamsym {args.command}: error: {exc}\n")
        return 1
    text = render(report, args.format)
    out = getattr(args, "out", None) if args.command != "gottlieb" else None
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main():
    sys.exit(run())
