"""Command-line driver: ``growthlab {simulate,exact,tw-table,verify,experiment}``.

Exit codes: 0 success, 1 identity failure, 2 usage error, 3 accuracy
failure, 4 statistical threshold exceeded (artifacts are still written).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import ensembles, growth, identities, limits, toeplitz
from .errors import AccuracyError, DomainError, GrowthLabError, PreconditionError, ResourceError
from .rng import SeededStream
from .stats import EmpiricalDistribution, ecdf, format_float, ks_distance

EXIT_OK, EXIT_IDENTITY, EXIT_USAGE, EXIT_ACCURACY, EXIT_STATISTICAL = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    name: str = ""
    seed: int | None = None
    samples: int = 1000
    out: str = "."
    M: int | None = None
    N: int | None = None
    q: float | None = None
    gamma: float = 1.0
    alpha: float | None = None
    n: int | None = None
    k: int | None = None
    xi_min: float = -8.0
    xi_max: float = 4.0
    step: float = 0.1
    method: str | None = None
    workers: int = 1
    threshold: float = 0.05
    continuity: float = 0.0
    extra: dict = field(default_factory=dict)

    def require_seed(self):
        if self.seed is None:
            raise UsageError("a --seed is required (there is no wall-clock seeding)")
        SeededStream(self.seed)
        return self.seed


_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _coerce(key, raw):
    kind = str(_TYPES[key])
    try:
        if "int" in kind:
            return int(raw)
        if "float" in kind:
            return float(raw)
    except ValueError:
        raise UsageError(f"bad value for {key}: {raw!r}") from None
    return raw


def read_config_file(path):
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _TYPES or key == "extra":
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _coerce(key, value)
    return out


def build_config(args, name):
    values = {}
    if args.config:
        values.update(read_config_file(args.config))
    for f in fields(ExperimentConfig):
        v = getattr(args, f.name, None)
        if v is not None and f.name not in ("name", "extra"):
            values[f.name] = v
    values["name"] = name
    return ExperimentConfig(**values)


# --- output helpers ------------------------------------------------------


def _out_dir(cfg):
    p = Path(cfg.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _cell(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format_float(v)


def write_csv(path, header, rows):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")
    return path


def write_json(path, obj):
    with open(path, "w", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def render_svg(series, title, xlabel, ylabel, width=800, height=600):
    """Standalone SVG 1.1 line chart; ``series`` is a list of (label, xs, ys, colour)."""
    left, right, top, bottom = 80, 30, 50, 70
    xs_all = np.concatenate([np.asarray(s[1], float) for s in series])
    ys_all = np.concatenate([np.asarray(s[2], float) for s in series])
    x0, x1 = float(xs_all.min()), float(xs_all.max())
    y0, y1 = min(0.0, float(ys_all.min())), max(1.0, float(ys_all.max()))
    if x1 == x0:
        x1 = x0 + 1.0
    px = lambda x: left + (x - x0) / (x1 - x0) * (width - left - right)
    py = lambda y: height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="30" text-anchor="middle" font-family="sans-serif" '
        f'font-size="18">{title}</text>',
        f'<line x1="{left}" y1="{height - bottom}" x2="{width - right}" y2="{height - bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{height - bottom}" stroke="black"/>',
    ]
    for t in np.linspace(x0, x1, 6):
        out.append(
            f'<text x="{px(t):.1f}" y="{height - bottom + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{t:.3g}</text>'
        )
    for t in np.linspace(y0, y1, 6):
        out.append(
            f'<text x="{left - 8}" y="{py(t) + 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="12">{t:.3g}</text>'
        )
    out.append(
        f'<text x="{width / 2:.1f}" y="{height - 20}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{xlabel}</text>'
    )
    out.append(
        f'<text x="20" y="{height / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14" transform="rotate(-90 20 {height / 2:.1f})">{ylabel}</text>'
    )
    for idx, (label, xs, ys, colour) in enumerate(series):
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="2" points="{pts}"/>')
        ly = top + 20 + 20 * idx
        out.append(f'<line x1="{width - 200}" y1="{ly}" x2="{width - 170}" y2="{ly}" stroke="{colour}" stroke-width="2"/>')
        out.append(
            f'<text x="{width - 162}" y="{ly + 4}" font-family="sans-serif" font-size="12">{label}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


# --- simulate ------------------------------------------------------------


def _png_pair(M, N, q, stream):
    grid = growth.LppGrid.sample(M, N, q, stream)
    a, T = growth.png_nucleations_from_grid(grid)
    h = growth.png_evolve(a, T).height(M - N, M + N - 1)
    return h, growth.lpp_value(grid)


def cmd_simulate(cfg, model):
    seed = cfg.require_seed()
    out = _out_dir(cfg)
    if model == "lpp":
        M, N, q = _need(cfg, "M", "N", "q")
        vals = growth.lpp_samples(M, N, q, seed, cfg.samples, workers=cfg.workers)
        rows = list(enumerate(vals.tolist()))
        header = ["sample_index", "value"]
    elif model == "hammersley":
        (alpha,) = _need(cfg, "alpha")
        vals = growth.hammersley_samples(alpha, seed, cfg.samples, workers=cfg.workers)
        rows = list(enumerate(vals.tolist()))
        header = ["sample_index", "value"]
    elif model == "png":
        M, N, q = _need(cfg, "M", "N", "q")
        rows = [(i, *_png_pair(M, N, q, SeededStream(seed, i))) for i in range(cfg.samples)]
        header = ["sample_index", "h", "G"]
    else:
        raise UsageError(f"unknown model {model!r}; choose lpp, png or hammersley")
    path = write_csv(out / f"simulate_{model}.csv", header, rows)
    print(path)
    return EXIT_OK


def _need(cfg, *names):
    vals = []
    for name in names:
        v = getattr(cfg, name)
        if v is None:
            raise UsageError(f"--{name} is required here")
        vals.append(v)
    return vals


# --- exact ---------------------------------------------------------------


def exact_rows(cfg):
    method = cfg.method or "bessel"
    if method == "meixner":
        M, N, q = _need(cfg, "M", "N", "q")
        weight, ops = ensembles.meixner_ensemble(M, N, q)
        rows = []
        g = 0
        while True:
            a = g + N - 1
            p = ensembles.xmax_cdf_discrete(weight, N, a, ops)
            est = abs(p - ensembles.xmax_cdf_gram(weight, N, a, ops))
            rows.append((g, p, method, est))
            if p > 1 - 1e-12 or a >= weight.size - 1:
                break
            g += 1
        return ["g", "cdf", "method", "est_error"], rows
    if method in ("bessel", "toeplitz"):
        (alpha,) = _need(cfg, "alpha")
        n_max = cfg.n if cfg.n is not None else 10
        rows = []
        for n in range(n_max + 1):
            if method == "bessel":
                rows.append((n, limits.l_alpha_cdf(alpha, n), method, 1e-12))
            else:
                rows.append((n, toeplitz.poissonized_toeplitz(alpha, n), method, 1e-12))
        return ["n", "cdf", "method", "est_error"], rows
    raise UsageError(f"unknown exact method {method!r}; choose meixner, bessel or toeplitz")


def cmd_exact(cfg):
    header, rows = exact_rows(cfg)
    path = write_csv(_out_dir(cfg) / f"exact_{cfg.method or 'bessel'}.csv", header, rows)
    print(path)
    return EXIT_OK


# --- tw-table ------------------------------------------------------------


def cmd_tw_table(cfg):
    method = cfg.method or "both"
    if not (limits.XI_MIN <= cfg.xi_min <= cfg.xi_max <= limits.XI_MAX):
        raise UsageError(f"xi range must lie within [{limits.XI_MIN}, {limits.XI_MAX}]")
    out = _out_dir(cfg)
    if method in ("fredholm", "painleve"):
        table = limits.tw2_table(cfg.xi_min, cfg.xi_max, cfg.step, method)
        path = out / f"tw2_{method}.csv"
        path.write_text(table.to_csv())
        print(path)
        return EXIT_OK
    if method != "both":
        raise UsageError(f"unknown method {method!r}; choose fredholm, painleve or both")
    fr = limits.tw2_table(cfg.xi_min, cfg.xi_max, cfg.step, "fredholm")
    pa = limits.tw2_table(cfg.xi_min, cfg.xi_max, cfg.step, "painleve")
    disc = np.abs(fr.f2_values - pa.f2_values)
    rows = [
        (x, f, p, max(ef, ep), d)
        for x, f, p, ef, ep, d in zip(fr.xi_grid, fr.f2_values, pa.f2_values, fr.est_error, pa.est_error, disc)
    ]
    path = write_csv(out / "tw2_both.csv", ["xi", "f2_fredholm", "f2_painleve", "est_error", "discrepancy"], rows)
    print(path)
    worst = float(disc.max())
    if worst > 1e-6:
        print(f"fredholm/painleve discrepancy {worst:.3g} exceeds 1e-6", file=sys.stderr)
        return EXIT_ACCURACY
    return EXIT_OK


# --- verify --------------------------------------------------------------


def cmd_verify(cfg):
    records = identities.identity_suite()
    failed = [r for r in records if not r["pass"]]
    write_json(_out_dir(cfg) / "verify.json", records)
    for r in failed:
        print(f"FAIL {r['identity']} {json.dumps(r['params'], sort_keys=True)}: "
              f"lhs={r['lhs']} rhs={r['rhs']}", file=sys.stderr)
    print(f"{len(records) - len(failed)}/{len(records)} identity checks passed")
    return EXIT_IDENTITY if failed else EXIT_OK


# --- experiments ---------------------------------------------------------


def _curve_grid():
    return np.round(np.arange(-6.0, 4.0 + 1e-9, 0.05), 10)


def _finish_experiment(cfg, name, raw, centre, scale, summary, threshold):
    """KS on the integer lattice between the samples and ``F2((n + c - centre) / scale)``.

    ``c`` is the optional continuity shift ``cfg.continuity``.
    """
    out = _out_dir(cfg)
    raw = np.asarray(raw)
    shift = cfg.continuity
    rescale = lambda v: (v + shift - centre) / scale
    rescaled = rescale(raw.astype(float))
    ks = ks_distance(
        EmpiricalDistribution(raw, seed_provenance=(cfg.seed, 0, raw.size)),
        lambda n: limits.f2(rescale(n)),
        discrete=True,
    )
    dist = EmpiricalDistribution(rescaled, seed_provenance=(cfg.seed, 0, raw.size))
    grid = _curve_grid()
    emp = ecdf(dist, grid)
    ref = np.array([limits.f2(x) for x in grid])
    write_csv(
        out / f"{name}_samples.csv",
        ["sample_index", "value", "rescaled"],
        [(i, int(r), s) for i, (r, s) in enumerate(zip(raw, rescaled))],
    )
    write_csv(out / f"{name}_curve.csv", ["xi", "ecdf", "f2"], list(zip(grid, emp, ref)))
    svg = render_svg(
        [("empirical", grid, emp, "#1f77b4"), ("F2", grid, ref, "#d62728")],
        f"{name}: rescaled ECDF vs F2", "xi", "probability",
    )
    (out / f"{name}.svg").write_text(svg)
    summary = dict(summary, experiment=name, ks=format_float(ks), threshold=threshold,
                   continuity=shift, samples=int(raw.size), seed=cfg.seed, passed=bool(ks <= threshold))
    write_json(out / f"{name}_summary.json", summary)
    print(f"{name}: KS = {ks:.4f} (threshold {threshold})")
    return EXIT_OK if ks <= threshold else EXIT_STATISTICAL


def run_thm32(cfg):
    seed = cfg.require_seed()
    N = cfg.N if cfg.N is not None else 200
    q = cfg.q if cfg.q is not None else 0.25
    gamma = cfg.gamma
    M = math.floor(gamma * N)
    omega, sigma = limits.thm32_scaling(gamma, q)
    g = growth.lpp_samples(M, N, q, seed, cfg.samples, workers=cfg.workers)
    params = {"gamma": gamma, "q": q, "M": M, "N": N, "omega": format_float(omega), "sigma": format_float(sigma)}
    return _finish_experiment(cfg, "thm32", g, omega * N, sigma * N ** (1 / 3), params, cfg.threshold)


def run_thm33(cfg):
    seed = cfg.require_seed()
    alpha = cfg.alpha if cfg.alpha is not None else 400.0
    L = growth.hammersley_samples(alpha, seed, cfg.samples, workers=cfg.workers)
    return _finish_experiment(cfg, "thm33", L, 2 * math.sqrt(alpha), alpha ** (1 / 6), {"alpha": alpha}, cfg.threshold)


def run_gue_edge(cfg):
    N = cfg.N if cfg.N is not None else 50
    grid = np.round(np.arange(cfg.xi_min, cfg.xi_max + 1e-9, cfg.step), 10)
    gue = np.array([ensembles.gue_xmax_cdf(N, x) for x in grid])
    ref = np.array([limits.f2(x) for x in grid])
    dist = float(np.max(np.abs(gue - ref)))
    out = _out_dir(cfg)
    write_csv(out / "gue_edge_curve.csv", ["xi", "gue_cdf", "f2"], list(zip(grid, gue, ref)))
    svg = render_svg([(f"GUE N={N}", grid, gue, "#1f77b4"), ("F2", grid, ref, "#d62728")],
                     "GUE edge vs F2", "xi", "probability")
    (out / "gue_edge.svg").write_text(svg)
    write_json(out / "gue_edge_summary.json", {
        "experiment": "gue_edge", "N": N, "sup_distance": format_float(dist),
        "threshold": cfg.threshold, "passed": dist <= cfg.threshold,
    })
    print(f"gue_edge: sup |F_N - F2| = {dist:.4f}")
    return EXIT_OK if dist <= cfg.threshold else EXIT_STATISTICAL


def run_transversal(cfg):
    seed = cfg.require_seed()
    q = cfg.q if cfg.q is not None else 0.25
    sizes = [cfg.N] if cfg.N is not None else [64, 128, 256]
    rows, medians = [], {}
    for idx, N in enumerate(sizes):
        d = growth.transversal_samples(N, q, seed, cfg.samples, base=idx * cfg.samples)
        medians[str(N)] = format_float(np.median(d))
        rows.extend((N, i, int(v)) for i, v in enumerate(d))
    out = _out_dir(cfg)
    write_csv(out / "transversal_samples.csv", ["N", "sample_index", "deviation"], rows)
    write_json(out / "transversal_summary.json",
               {"experiment": "transversal", "q": q, "samples": cfg.samples, "seed": seed, "median": medians})
    print("transversal medians: " + ", ".join(f"N={k}: {v}" for k, v in medians.items()))
    return EXIT_OK


EXPERIMENTS = {"thm32": run_thm32, "thm33": run_thm33, "gue_edge": run_gue_edge, "transversal": run_transversal}


# --- argument parsing ----------------------------------------------------


def _u64(text):
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file; command-line flags override it")
    common.add_argument("--seed", type=_u64)
    common.add_argument("--samples", type=int)
    common.add_argument("--out", help="output directory")
    common.add_argument("--M", type=int)
    common.add_argument("--N", type=int)
    common.add_argument("--q", type=float)
    common.add_argument("--gamma", type=float)
    common.add_argument("--alpha", type=float)
    common.add_argument("--n", type=int)
    common.add_argument("--k", type=int)
    common.add_argument("--xi-min", dest="xi_min", type=float)
    common.add_argument("--xi-max", dest="xi_max", type=float)
    common.add_argument("--step", type=float)
    common.add_argument("--method")
    common.add_argument("--workers", type=int)
    common.add_argument("--threshold", type=float, help="KS threshold for experiments")
    common.add_argument("--continuity", type=float, help="shift added to integer samples before rescaling")

    parser = argparse.ArgumentParser(prog="growthlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo samples as CSV")
    p.add_argument("model", choices=["lpp", "png", "hammersley"])
    sub.add_parser("exact", parents=[common], help="exact CDF tables (meixner, bessel, toeplitz)")
    sub.add_parser("tw-table", parents=[common], help="Tracy-Widom F2 table")
    sub.add_parser("verify", parents=[common], help="run the exact identity suite")
    p = sub.add_parser("experiment", parents=[common], help="limit-law experiments")
    p.add_argument("experiment", choices=sorted(EXPERIMENTS))
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            cfg = build_config(args, "simulate")
            return cmd_simulate(cfg, args.model)
        if args.command == "exact":
            return cmd_exact(build_config(args, "exact"))
        if args.command == "tw-table":
            return cmd_tw_table(build_config(args, "tw-table"))
        if args.command == "verify":
            return cmd_verify(build_config(args, "verify"))
        cfg = build_config(args, args.experiment)
        return EXPERIMENTS[args.experiment](cfg)
    except (UsageError, DomainError, PreconditionError, ResourceError) as exc:
        print(f"growthlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AccuracyError as exc:
        print(f"growthlab: accuracy failure: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except GrowthLabError as exc:
        print(f"growthlab: {exc}", file=sys.stderr)
        return EXIT_ACCURACY


if __name__ == "__main__":
    sys.exit(main())
