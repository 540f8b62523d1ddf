"""Command-line surface: match, scan, sample, diag, demo.

Exit codes: 0 success, 2 usage/config error, 3 numerical failure
(blow-up, unsolvable initial shooting).
"""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import io as sio
from .config import RunConfig, config_from_dict, load_config
from .diagnostics import action_histogram, autocorrelation, heatmap, map_estimate
from .errors import (
    BlowUpError,
    ConfigError,
    InvalidInputError,
    SamplerInitError,
    SelmetError,
    SolverFailureError,
)
from .kernels import NuField
from .landscape import GridSpec, find_local_minima, scan_grid
from .presets import preset_names
from .sampler import run_chain
from .shooting import solve_bvp

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

DEMO_N_SAMPLES = 200
DEMO_GRID = dict(x_min=-1.0, x_max=1.0, y_min=-1.0, y_max=1.0, nx=12, ny=12)


def _build_config(args, preset=None):
    if getattr(args, "config", None):
        cfg = load_config(args.config)
    else:
        scenario = preset or getattr(args, "preset", None)
        if scenario is None:
            raise ConfigError(
                f"no scenario: pass --preset ({', '.join(preset_names())}) or --config"
            )
        cfg = config_from_dict({"scenario": scenario})
    if preset is not None and getattr(args, "config", None):
        # demo PRESET overrides whatever scenario the config file names
        d = cfg.to_dict()
        d["scenario"] = preset
        cfg = config_from_dict(d)
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "out", None) is not None:
        cfg.out_dir = args.out
    return cfg


def _out_dir(cfg):
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _run_match(prob, out, name):
    res = solve_bvp(prob)
    path = out / f"{name}.csv"
    sio.write_trajectory(res.trajectory, path)
    print(
        f"{name}: converged={res.converged} residual={res.residual:.3e} "
        f"iterations={res.iterations} action={res.action:.6f} -> {path}"
    )
    return res


def cmd_match(args):
    cfg = _build_config(args)
    out = _out_dir(cfg)
    prob = cfg.shooting_problem()
    if args.lddmm:
        prob.field = NuField.zero()
    _run_match(prob, out, "trajectory")
    return EXIT_OK


def cmd_scan(args):
    cfg = _build_config(args)
    out = _out_dir(cfg)
    workers = args.workers or 1
    scan = scan_grid(cfg.shooting_problem(), cfg.grid, cfg.sigma_nu_sq, workers=workers)
    sio.write_scan(scan, out / "scan.csv")
    minima = find_local_minima(scan)
    sio.write_minima(minima, out / "minima.csv")
    n_conv = int(scan.converged.sum())
    print(
        f"Scan {cfg.grid.nx}x{cfg.grid.ny}: {n_conv} converged cells, "
        f"{len(minima)} local minima -> {out / 'scan.csv'}"
    )
    return EXIT_OK


def cmd_sample(args):
    cfg = _build_config(args)
    out = _out_dir(cfg)
    chain = run_chain(cfg.sampler_config(), cfg.shooting_problem())
    sio.write_chain(chain, out / "chain.csv")
    print(
        f"Chain of {len(chain)} samples, acceptance rate {chain.acceptance_rate:.3f} "
        f"-> {out / 'chain.csv'}"
    )
    return EXIT_OK


def _run_diag(chain, cfg, out):
    n = len(chain)
    actions = chain.actions()
    max_lag = min(500, n - 2)
    if max_lag >= 1:
        acf = autocorrelation(actions, max_lag)
        sio.write_acf(acf, out / "acf.csv")
    cents = chain.centroid_array()
    for k in range(cents.shape[1]):
        hm = heatmap(cents[:, k, :], cfg.grid)
        sio.write_heatmap(hm, out / f"heatmap_{k + 1}.csv")
    hist = action_histogram(chain, n_bins=30)
    sio.write_histogram(hist, out / "histogram.csv")
    best = map_estimate(chain, prior_scale=cfg.prior_scale)
    sio.write_map_estimate(best, out / "map.csv")
    print(f"Diagnostics written to {out}: acf, heatmap, histogram, map")


def cmd_diag(args):
    cfg = _build_config(args, preset=getattr(args, "preset", None) or "crisscross")
    out = _out_dir(cfg)
    chain = sio.read_chain(args.chain)
    _run_diag(chain, cfg, out)
    return EXIT_OK


def cmd_demo(args):
    cfg = _build_config(args, preset=args.preset)
    if not args.config:
        # keep the demo quick; full-size runs go through --config
        cfg.n_samples = DEMO_N_SAMPLES
        cfg.grid = GridSpec(**DEMO_GRID)
    out = _out_dir(cfg)
    prob = cfg.shooting_problem()
    _run_match(prob, out, "trajectory_selective")
    lddmm_prob = cfg.shooting_problem()
    lddmm_prob.field = NuField.zero()
    _run_match(lddmm_prob, out, "trajectory_lddmm")
    scan = scan_grid(prob, cfg.grid, cfg.sigma_nu_sq, workers=args.workers or 1)
    sio.write_scan(scan, out / "scan.csv")
    sio.write_minima(find_local_minima(scan), out / "minima.csv")
    chain = run_chain(cfg.sampler_config(), cfg.shooting_problem())
    sio.write_chain(chain, out / "chain.csv")
    print(f"Chain acceptance rate {chain.acceptance_rate:.3f}")
    _run_diag(chain, cfg, out)
    print(f"Demo outputs in {out}")
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="YAML run configuration")
    common.add_argument("--out", metavar="DIR", help="output directory (default from config)")
    common.add_argument("--seed", type=int, metavar="U64", help="sampler seed override")
    common.add_argument("--workers", type=int, metavar="N", help="parallel workers for scans")

    parser = argparse.ArgumentParser(
        prog="selmet",
        description="Landmark matching with a spatially varying metamorphosis control field.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("match", parents=[common], help="shooting solve; writes a trajectory file")
    p.add_argument("--preset", choices=preset_names(), help="built-in scenario")
    p.add_argument("--lddmm", action="store_true", help="drop the control field (nu == 0)")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("scan", parents=[common], help="action landscape over centroid positions")
    p.add_argument("--preset", choices=preset_names())
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("sample", parents=[common], help="pCN MCMC over centroid positions")
    p.add_argument("--preset", choices=preset_names())
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("diag", parents=[common], help="chain diagnostics from a chain file")
    p.add_argument("chain", metavar="CHAIN", help="chain CSV file")
    p.add_argument("--preset", choices=preset_names())
    p.set_defaults(func=cmd_diag)

    p = sub.add_parser("demo", parents=[common], help="run match + scan + sample + diag")
    p.add_argument("preset", choices=preset_names())
    p.set_defaults(func=cmd_demo)

    return parser


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"selmet: configuration error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidInputError as e:
        print(f"selmet: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (BlowUpError, SolverFailureError, SamplerInitError) as e:
        print(f"selmet: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SelmetError as e:
        print(f"selmet: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
