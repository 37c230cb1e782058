"""Command-line front end.

Subcommands: expand, classify, admissible, grid (build/info/export-pbm),
table, fit, plot, validate, freq.  Flags override a line-oriented
`key = value` config file, which overrides built-in defaults.  Exit
codes: 0 success, 1 domain or configuration error, 2 internal invariant
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
import time

import numpy as np

from . import __version__
from .core import DomainError, GaussianInt, in_fundamental_domain, is_digit
from .dynamics import (
    DEFAULT_SEED,
    NatExtState,
    check_approximation,
    convergents,
    expand,
    invariance_residual,
)
from .estimator import (
    CoeffTable,
    DensityEvaluator,
    MissingGrid,
    estimate_coeffs_detailed,
    fit_exponential,
    fits_to_json,
    region_frequency,
)
from .pixelgrid import (
    PixelGrid,
    export_pbm,
    fill_mirror,
    fill_neighbors,
    fill_symmetry,
    flood_fill,
    load_grid,
    pixel_center,
    pixel_index,
    pool_rotations,
    populate_boundary,
    populate_many,
    populate_orbit,
    rotate_grid,
    save_grid,
)
from .regions import (
    ALL_REGIONS,
    Digit,
    RegionId,
    classify,
    classify_batch,
    count_orbit_violations,
    successor_set,
)
from .taylor import kernel_matrix_fd_check


class ParseError(ValueError):
    """Unparseable literal on the command line."""


class _CliArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise ParseError(message)


_COMPLEX_RE = re.compile(
    r"""\A\s*
    (?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?
    (?P<im>(?:[+-]\s*(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-]|
        (?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?)
    (?P<isuf>[ij])?
    \s*\Z""",
    re.VERBOSE,
)


def parse_complex(text: str) -> complex:
    """Literal like 0.4-0.2i, -i, 2i, 1+i, 0.25; i or j suffix."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ParseError("empty complex literal")
    m = _COMPLEX_RE.match(s)
    if m and m.group("isuf"):
        re_part = m.group("re") or ""
        im_part = m.group("im") or ""
        if not re_part and not im_part.lstrip("+-"):
            # forms like "i", "-i": at most a sign in front of the suffix
            return complex(0.0, float((im_part or "+") + "1"))
        if re_part and not im_part:
            # forms like "2i": the leading number is the imaginary part
            return complex(0.0, float(re_part))
        if im_part in ("+", "-"):
            im_part += "1"
        try:
            return complex(float(re_part or 0.0), float(im_part))
        except ValueError as exc:
            raise ParseError(f"bad complex literal {text!r}") from exc
    if m and not m.group("isuf") and m.group("re") and not m.group("im"):
        return complex(float(m.group("re")), 0.0)
    try:
        return complex(s.replace("i", "j"))
    except ValueError as exc:
        raise ParseError(f"bad complex literal {text!r}") from exc


def parse_digit(token: str) -> Digit:
    """Digit literal, optionally parenthesized, trailing ' for the mark."""
    s = token.strip()
    marked = s.endswith("'")
    if marked:
        s = s[:-1]
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    z = parse_complex(s)
    if z.real != int(z.real) or z.imag != int(z.imag):
        raise ParseError(f"{token!r} is not a Gaussian integer")
    value = GaussianInt(int(z.real), int(z.imag))
    if not is_digit(value):
        raise ParseError(f"{token!r} is not a valid digit")
    return Digit(value, marked)


def parse_region(text: str) -> RegionId:
    m = re.match(r"\A\s*K?(\d)\s*,\s*(\d)\s*\Z", text)
    if not m:
        raise ParseError(f"bad region {text!r}; expected like 1,1")
    return RegionId(int(m.group(1)), int(m.group(2)))


def parse_base(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ParseError(f"bad base point {text!r}; expected x,y")
    return float(parts[0]), float(parts[1])


def parse_krange(text: str) -> list[int]:
    out: list[int] = []
    for piece in text.split(","):
        piece = piece.strip()
        if ".." in piece:
            lo, hi = piece.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif piece:
            out.append(int(piece))
    if not out or any(not 1 <= k <= 16 for k in out):
        raise ParseError(f"bad k range {text!r}")
    return sorted(set(out))


def parse_count(text: str) -> int:
    return int(float(text))


def read_config(path: str | None) -> dict[str, str]:
    if not path:
        return {}
    cfg: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"{path}:{lineno}: expected key = value")
            key, value = line.split("=", 1)
            cfg[key.strip().replace("-", "_")] = value.strip()
    return cfg


class Settings:
    """Flag > config-file > default resolution for one command.

    Flags and config entries arrive as strings and go through `conv`;
    a typed default is returned as-is.
    """

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config = read_config(getattr(args, "config", None))

    def get(self, dest: str, conv, default):
        raw = getattr(self.args, dest, None)
        if raw is None:
            raw = self.config.get(dest, default)
        if raw is None or conv is None or not isinstance(raw, str):
            return raw
        return conv(raw)


_FILL_CHOICES = ("none", "symmetry", "neighbors", "flood", "flood+symmetry")


def _close_symmetry(g: PixelGrid) -> PixelGrid:
    kind = (g.region.k, g.region.l)
    if kind in ((1, 1), (2, 1)):
        return fill_symmetry(g)
    if kind == (3, 1):
        return fill_mirror(g, "b=0")
    raise DomainError(
        f"{g.region} has no canonical mirror; build rotation 1 and rotate"
    )


def apply_fill(g: PixelGrid, strategy: str) -> PixelGrid:
    if strategy == "none":
        return g
    if strategy == "symmetry":
        return _close_symmetry(g)
    if strategy == "neighbors":
        return fill_neighbors(g)
    if strategy == "flood":
        return flood_fill(g)
    if strategy == "flood+symmetry":
        return flood_fill(_close_symmetry(g))
    raise DomainError(f"unknown fill strategy {strategy!r}")


def build_grid(
    region: RegionId,
    k: int,
    variant: str,
    fill: str,
    iterations: int | None,
    seed: complex,
) -> PixelGrid:
    g = PixelGrid(k, region)
    state = NatExtState(seed, 0j)
    if variant == "boundary":
        populate_boundary(g, state, iterations)
    elif variant == "orbit":
        populate_orbit(g, state, iterations)
    else:
        raise DomainError(f"unknown build variant {variant!r}")
    return apply_fill(g, fill)


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------------------
# Commands.


def cmd_expand(args: argparse.Namespace) -> int:
    z = parse_complex(args.z)
    if not in_fundamental_domain(z):
        raise DomainError(f"{args.z} is outside the fundamental domain")
    steps = expand(z, args.n)
    if not steps:
        print("empty expansion (z = 0)")
        return 0
    digits = [s.digit for s in steps]
    convs = convergents(digits)
    report = check_approximation(z, steps, convs)
    print(f"{'n':>3} {'digit':>8} {'convergent':>28} {'error':>12} {'bound':>12}")
    for step, conv, chk in zip(steps, convs, report.steps):
        approx = f"({conv.p})/({conv.q})"
        print(
            f"{chk.n:>3} {str(step.digit):>8} {approx:>28} "
            f"{chk.error:>12.3e} {chk.error_bound:>12.3e}"
        )
    print(f"error bound satisfied at every step: {report.passed}")
    return 0


def cmd_classify(args: argparse.Namespace) -> int:
    z = parse_complex(args.z)
    r = classify(z)
    print("boundary" if r is None else str(r))
    return 0


def cmd_admissible(args: argparse.Namespace) -> int:
    # accept both whitespace- and comma-separated words; a leading "--"
    # lets digits with a leading minus through argparse
    tokens = [t for raw in args.digits for t in re.split(r"[,\s]+", raw) if t]
    word = [parse_digit(tok) for tok in tokens]
    if len(word) < 2:
        print("admissible (trivially)")
        return 0
    for idx, (prev, cur) in enumerate(zip(word, word[1:]), 1):
        if cur not in successor_set(prev):
            print(f"not admissible: {cur} cannot follow {prev} (position {idx + 1})")
            return 0
    print("admissible")
    return 0


def cmd_grid(args: argparse.Namespace) -> int:
    if args.grid_action == "build":
        s = Settings(args)
        region = s.get("region", parse_region, RegionId(1, 1))
        k = s.get("k", int, 7)
        variant = s.get(
            "variant", None, "boundary" if region == RegionId(1, 1) else "orbit"
        )
        fill = s.get("fill", None, "flood+symmetry")
        iterations = s.get("iterations", parse_count, None)
        seed = s.get("seed", parse_complex, DEFAULT_SEED)
        t0 = time.perf_counter()
        g = build_grid(region, k, variant, fill, iterations, seed)
        _log(
            f"built {g!r} in {time.perf_counter() - t0:.2f}s "
            f"({g._bits.nbytes} packed bytes)"
        )
        save_grid(g, args.out)
        print(args.out)
        return 0
    if args.grid_action == "info":
        g = load_grid(args.path)
        print(
            f"k={g.k} Q={g.Q} region={g.region} occupied={g.count()} "
            f"fraction={g.occupancy():.6f}"
        )
        return 0
    if args.grid_action == "export-pbm":
        export_pbm(load_grid(args.path), args.out)
        print(args.out)
        return 0
    raise DomainError(f"unknown grid action {args.grid_action!r}")


def cmd_table(args: argparse.Namespace) -> int:
    s = Settings(args)
    region = s.get("region", parse_region, RegionId(1, 1))
    base = s.get("base", parse_base, (-0.5, -0.5))
    ks = s.get("k", parse_krange, [7, 8, 9, 10])
    L = s.get("L", int, 8)
    if not 0 <= L <= 12:
        raise DomainError("L must be 0..12")
    variant = s.get(
        "variant", None, "boundary" if region == RegionId(1, 1) else "orbit"
    )
    fill = s.get("fill", None, "flood+symmetry")
    iterations = s.get("iterations", parse_count, None)
    seed = s.get("seed", parse_complex, DEFAULT_SEED)
    workers = s.get("workers", int, None)
    prefix = s.get("out_prefix", None, "hcf")

    table = CoeffTable(base_point=base, region=region, L=L)
    peak_bytes = 0
    t0 = time.perf_counter()
    for k in ks:
        g = build_grid(region, k, variant, fill, iterations, seed)
        peak_bytes = max(peak_bytes, g._bits.nbytes)
        matrix, skipped = estimate_coeffs_detailed(
            g, base[0], base[1], L, workers=workers
        )
        if skipped:
            _log(f"k={k}: skipped {skipped} singular pixels")
        table.add(k, matrix)
        _log(f"k={k}: occupancy {g.occupancy():.4f}, h[0,0]={matrix[0, 0]:.5f}")
    csv_path = f"{prefix}_table.csv"
    table.to_csv(csv_path)
    outputs = [csv_path]
    if len(ks) >= 4:
        fits_path = f"{prefix}_fits.json"
        fits_to_json(table.fit_all(even_only=True), fits_path)
        outputs.append(fits_path)
    else:
        _log("fewer than 4 resolutions; skipping extrapolation fits")
    _log(
        f"wall time {time.perf_counter() - t0:.2f}s, "
        f"peak packed grid {peak_bytes} bytes "
        f"(fills touch ~{peak_bytes * 16} transient bytes)"
    )
    for line in outputs:
        print(line)
    return 0


def cmd_fit(args: argparse.Namespace) -> int:
    series: dict[int, float] = {}
    with open(args.csv) as fh:
        header = fh.readline().strip().split(",")
        idx = {name: i for i, name in enumerate(header)}
        for line in fh:
            parts = line.strip().split(",")
            if not parts or parts == [""]:
                continue
            if int(parts[idx["m"]]) == args.m and int(parts[idx["n"]]) == args.n:
                series[int(parts[idx["k"]])] = float(parts[idx["value"]])
    fr = fit_exponential(series)
    record = {
        "m": args.m,
        "n": args.n,
        "a": fr.a,
        "b": fr.b,
        "c": fr.c,
        "rms": fr.rms_residual,
        "degenerate": fr.degenerate,
    }
    text = json.dumps(record, indent=1, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


_VIRIDIS_ANCHORS = (
    (68, 1, 84),
    (59, 82, 139),
    (33, 145, 140),
    (94, 201, 98),
    (253, 231, 37),
)


def _palette() -> np.ndarray:
    xs = np.linspace(0.0, 1.0, len(_VIRIDIS_ANCHORS))
    grid = np.linspace(0.0, 1.0, 256)
    chans = [
        np.interp(grid, xs, [a[c] for a in _VIRIDIS_ANCHORS]) for c in range(3)
    ]
    return np.clip(np.stack(chans, axis=1).round(), 0, 255).astype(np.uint8)


def _twelve_grids(
    k: int, iterations: int | None, seed: complex, grids_dir: str | None
) -> list[PixelGrid]:
    if grids_dir:
        found: dict[int, PixelGrid] = {}
        for name in sorted(os.listdir(grids_dir)):
            if not name.endswith(".grid"):
                continue
            g = load_grid(os.path.join(grids_dir, name))
            if g.k == k:
                found[g.region.code] = g
        missing = [str(r) for r in ALL_REGIONS if r.code not in found]
        if missing:
            raise MissingGrid(", ".join(missing))
        return [found[r.code] for r in ALL_REGIONS]
    raw = [PixelGrid(k, r) for r in ALL_REGIONS]
    budget = iterations if iterations is not None else 100 * (1 << k) ** 2
    populate_many(raw, NatExtState(seed, 0j), budget)
    out: list[PixelGrid] = []
    for shape in (1, 2, 3):
        family = [g for g in raw if g.region.k == shape]
        canon = pool_rotations(family)
        filled = flood_fill(_close_symmetry(canon))
        out.extend(rotate_grid(filled, j) for j in range(4))
    return out


def cmd_plot(args: argparse.Namespace) -> int:
    s = Settings(args)
    k = s.get("k", int, 8)
    n = s.get("n", int, 256)
    iterations = s.get("iterations", parse_count, None)
    seed = s.get("seed", parse_complex, DEFAULT_SEED)
    out = s.get("out", None, "density.ppm" if args.color else "density.pgm")

    grids = _twelve_grids(k, iterations, seed, getattr(args, "grids_dir", None))
    if args.save_grids:
        os.makedirs(args.save_grids, exist_ok=True)
        for g in grids:
            save_grid(
                g, os.path.join(args.save_grids, f"v{g.region.k}{g.region.l}_k{g.k}.grid")
            )
    # raw scale: the image is min/max stretched, so normalization would
    # only add the mass quadrature's startup cost
    ev = DensityEvaluator(grids, normalized=False)

    xs = (np.arange(n) + 0.5) / n - 0.5
    ys = 0.5 - (np.arange(n) + 0.5) / n
    zs = xs[None, :] + 1j * ys[:, None]
    codes = classify_batch(zs.ravel())
    values = np.zeros(n * n)
    interior = codes >= 0
    if np.any(interior):
        values[interior] = ev.many(zs.ravel()[interior])
    img = values.reshape(n, n)
    lo = float(img[interior.reshape(n, n)].min()) if np.any(interior) else 0.0
    hi = float(img.max())
    scale = (img - lo) / (hi - lo) if hi > lo else np.full_like(img, 0.5)
    gray = np.clip((scale * 255.0).round(), 0, 255).astype(np.uint8)
    gray[~interior.reshape(n, n)] = 0

    with open(out, "wb") as fh:
        if args.color:
            rgb = _palette()[gray]
            rgb[~interior.reshape(n, n)] = 0
            fh.write(f"P6\n{n} {n}\n255\n".encode("ascii"))
            fh.write(rgb.tobytes())
        else:
            fh.write(f"P5\n{n} {n}\n255\n".encode("ascii"))
            fh.write(gray.tobytes())
    print(out)
    return 0


def cmd_freq(args: argparse.Namespace) -> int:
    s = Settings(args)
    region = s.get("region", parse_region, RegionId(1, 1))
    iterations = s.get("iterations", parse_count, 1_000_000)
    seed = s.get("seed", parse_complex, DEFAULT_SEED)
    value = region_frequency(region, NatExtState(seed, 0j), int(iterations))
    print(f"{value:.6f}")
    return 0


def _suite_invariance(rng: np.random.Generator, samples: int) -> dict:
    worst = 0.0
    count = 0
    while count < samples:
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
        w = complex(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7))
        if abs(z) < 1e-3 or abs(w) > 0.95:
            continue
        worst = max(worst, invariance_residual(z, w))
        count += 1
    return {"max_residual": worst, "passed": worst < 1e-10}


def _suite_jets(rng: np.random.Generator) -> dict:
    worst = 0.0
    cases = [(-0.7, -0.2, -0.5, -0.5), (0.0, 0.0, -0.5, -0.5), (0.3, -0.9, -0.5, 0.0)]
    cases += [
        (rng.uniform(-1, 1), rng.uniform(-1, 1), -0.5, -0.5) for _ in range(3)
    ]
    for a, b, x0, y0 in cases:
        worst = max(worst, float(kernel_matrix_fd_check(a, b, x0, y0)))
    return {"max_fd_deviation": worst, "passed": worst < 1e-5}


def _suite_automaton(steps: int) -> dict:
    from .regions import ALL_SUBREGIONS, _reachable_states, _DISCS_BY_STATE

    closure_ok = _reachable_states() == set(_DISCS_BY_STATE.values())
    bad_pairs, bad_geometry = count_orbit_violations(steps=steps)
    return {
        "states": len(ALL_SUBREGIONS),
        "closure_ok": closure_ok,
        "orbit_steps": steps,
        "successor_violations": bad_pairs,
        "geometry_violations": bad_geometry,
        "passed": closure_ok and bad_pairs == 0 and bad_geometry == 0,
    }


def _suite_roundtrip(rng: np.random.Generator, q_sign: int) -> dict:
    import tempfile

    g = PixelGrid(4, RegionId(1, 1))
    bits = rng.integers(0, 256, size=g._bits.shape, dtype=np.uint16)
    g._bits[:] = bits.astype(np.uint8)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "t.grid")
        save_grid(g, path)
        round_ok = load_grid(path) == g
    index_ok = all(
        pixel_index(g, pixel_center(g, i, j)) == (i, j)
        for i in range(1, 2 * g.Q + 1, 5)
        for j in range(1, 2 * g.Q + 1, 5)
    )
    det_ok = True
    for _ in range(200):
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
        if abs(z) < 1e-6 or not in_fundamental_domain(z):
            continue
        digits = [st.digit for st in expand(z, 12)]
        if len(digits) < 2:
            continue
        convs = convergents(digits, _q_sign=q_sign)
        prev = None
        for conv in convs:
            if prev is not None:
                det = conv.p * prev.q - prev.p * conv.q
                if det.norm() != 1:
                    det_ok = False
            prev = conv
        if not det_ok:
            break
    return {
        "grid_roundtrip": round_ok,
        "pixel_index_inverse": index_ok,
        "determinant_identity": det_ok,
        "passed": round_ok and index_ok and det_ok,
    }


def cmd_validate(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(20240817)
    steps = parse_count(args.steps)
    q_sign = -1 if args.debug_flip_q_sign else 1
    suites = {
        "invariance": lambda: _suite_invariance(rng, parse_count(args.samples)),
        "jets": lambda: _suite_jets(rng),
        "automaton": lambda: _suite_automaton(steps),
        "roundtrip": lambda: _suite_roundtrip(rng, q_sign),
    }
    suites["admissible"] = suites["automaton"]
    if args.suite == "all":
        wanted = ["invariance", "jets", "automaton", "roundtrip"]
    else:
        wanted = [args.suite]
    report = []
    for name in wanted:
        result = suites[name]()
        report.append({"suite": name, **result})
    print(json.dumps(report, indent=1, sort_keys=True))
    return 0 if all(r["passed"] for r in report) else 2


# ---------------------------------------------------------------------------
# Wiring.


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--seed", help="orbit seed point (complex literal)")


def build_parser() -> argparse.ArgumentParser:
    parser = _CliArgumentParser(prog="hurwitzcf")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", help="digit expansion of a point")
    p.add_argument("z")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("classify", help="analyticity region of a point")
    p.add_argument("z")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("admissible", help="check a digit word pairwise")
    p.add_argument("digits", nargs="+")
    p.set_defaults(func=cmd_admissible)

    p = sub.add_parser("grid", help="build / inspect / export rasters")
    gsub = p.add_subparsers(dest="grid_action", required=True)
    b = gsub.add_parser("build")
    _add_common(b)
    b.add_argument("--region")
    b.add_argument("--k")
    b.add_argument("--variant", choices=("orbit", "boundary"))
    b.add_argument("--fill", choices=_FILL_CHOICES)
    b.add_argument("--iterations")
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_grid)
    i = gsub.add_parser("info")
    i.add_argument("path")
    i.set_defaults(func=cmd_grid)
    e = gsub.add_parser("export-pbm")
    e.add_argument("path")
    e.add_argument("out")
    e.set_defaults(func=cmd_grid)

    p = sub.add_parser("table", help="derivative table across resolutions")
    _add_common(p)
    p.add_argument("--region")
    p.add_argument("--base")
    p.add_argument("--k")
    p.add_argument("--L")
    p.add_argument("--variant", choices=("orbit", "boundary"))
    p.add_argument("--fill", choices=_FILL_CHOICES)
    p.add_argument("--iterations")
    p.add_argument("--workers")
    p.add_argument("--out-prefix", dest="out_prefix")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("fit", help="exponential extrapolation of one series")
    p.add_argument("--csv", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("plot", help="density heatmap image")
    _add_common(p)
    p.add_argument("--k")
    p.add_argument("--n")
    p.add_argument("--iterations")
    p.add_argument("--out")
    p.add_argument("--color", action="store_true")
    p.add_argument("--grids-dir", dest="grids_dir")
    p.add_argument("--save-grids", dest="save_grids")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("validate", help="cross-module invariant suites")
    p.add_argument(
        "--suite",
        default="all",
        choices=("all", "invariance", "jets", "automaton", "roundtrip", "admissible"),
    )
    p.add_argument("--steps", default="100000")
    p.add_argument("--samples", default="100000")
    p.add_argument("--debug-flip-q-sign", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("freq", help="orbit visit frequency of a region")
    _add_common(p)
    p.add_argument("--region")
    p.add_argument("--iterations")
    p.set_defaults(func=cmd_freq)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (ParseError, DomainError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except AssertionError as exc:
        print(f"internal: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
