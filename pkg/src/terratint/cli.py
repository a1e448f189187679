"""Command-line interface.

Subcommands: analyze (image -> color grid JSON + palette strip), transfer
(image + DEM -> midpoint render, tint strip, pareto JSON, manifest),
render (saved solution + DEM -> PNG), oracle (exhaustive tiny-instance
front for testing), serve (HTTP API).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from PIL import Image

from .colors import LabColor
from .grid import identify_dominants, save_grid_json
from .image_colors import DEFAULT_PALETTE_SIZE
from .optimize import (
    OptimizerConfig,
    archive_to_json,
    exhaustive_front,
    save_archive_json,
    solution_from_json,
)
from .pipeline import (
    AnalysisConfig,
    RenderConfig,
    StageError,
    analyze_image,
    manifest_digest,
    palette_strip,
    render_candidate,
    run_transfer,
    tint_strip,
)
from .scoring import ConventionSpec, SchemeMode, ScoringParams, ZoneAreas
from .terrain import classify_zones, hillshade, load_dem, render, sliver_masses, write_png, zone_areas


def _parse_convention(text: str) -> tuple[int, LabColor]:
    try:
        zone_part, color_part = text.split("=", 1)
        L, a, b = (float(v) for v in color_part.split(","))
        return int(zone_part), LabColor(L, a, b)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(
            f"convention must look like ZONE=L,a,b (got {text!r})"
        ) from exc


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=["graded", "continuous"], default="graded")
    p.add_argument("--zones", type=int, default=9, help="elevation zone / anchor count")
    p.add_argument("--k", type=int, choices=[1, 2, 3], default=3, help="continuity fit degree")
    p.add_argument("--t", choices=["+1", "-1"], default="+1", help="+1: higher is lighter")
    p.add_argument("--gamma", type=float, default=10.0, help="convention distance threshold")
    p.add_argument("--alpha", type=float, default=10.0, help="similarity distance threshold")
    p.add_argument(
        "--aerial",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="score and shade with aerial perspective",
    )
    p.add_argument(
        "--convention",
        action="append",
        type=_parse_convention,
        default=[],
        metavar="ZONE=L,a,b",
        help="conventional color for a zone; repeatable",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-size", type=int, default=16)
    p.add_argument("--delta-min", type=float, default=10.0)
    p.add_argument("--palette-size", type=int, default=DEFAULT_PALETTE_SIZE)
    p.add_argument("--population", type=int, default=40)
    p.add_argument("--iterations", type=int, default=500)
    p.add_argument("--out-dir", type=Path, default=Path("."))


def _configs_from_args(args: argparse.Namespace):
    params = ScoringParams(
        k=args.k,
        t=int(args.t),
        gamma=args.gamma,
        alpha=args.alpha,
        aerial_enabled=args.aerial,
    )
    conventions = ConventionSpec(assignments=dict(args.convention))
    opt = OptimizerConfig(
        population=args.population,
        iterations=args.iterations,
        seed=args.seed,
        delta_min=args.delta_min,
    )
    analysis = AnalysisConfig(
        palette_size=args.palette_size, grid_size=args.grid_size, seed=args.seed
    )
    render_cfg = RenderConfig(aerial_shade=args.aerial)
    return params, conventions, opt, analysis, render_cfg


def _cmd_analyze(args: argparse.Namespace) -> int:
    analysis = AnalysisConfig(
        palette_size=args.palette_size, grid_size=args.grid_size, seed=args.seed
    )
    grid = analyze_image(args.image, analysis)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    save_grid_json(grid, args.out_dir / "grid.json")
    strip = palette_strip(identify_dominants(grid))
    Image.fromarray(strip, mode="RGB").save(args.out_dir / "palette_strip.png")
    print(f"wrote {args.out_dir / 'grid.json'} and {args.out_dir / 'palette_strip.png'}")
    return 0


def _cmd_transfer(args: argparse.Namespace) -> int:
    params, conventions, opt, analysis, render_cfg = _configs_from_args(args)
    result = run_transfer(
        args.image,
        args.dem,
        params=params,
        conventions=conventions,
        opt_config=opt,
        mode=SchemeMode(args.mode),
        n=args.zones,
        analysis=analysis,
        render_cfg=render_cfg,
    )
    args.out_dir.mkdir(parents=True, exist_ok=True)
    rendered = render_candidate(result, result.midpoint)
    write_png(rendered, args.out_dir / "midpoint_render.png")
    strip = tint_strip(result.midpoint.scheme)
    Image.fromarray(strip, mode="RGB").save(args.out_dir / "tint_strip.png")
    save_archive_json(result.archive, args.out_dir / "pareto.json")
    manifest_path = args.out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(result.manifest, indent=2, sort_keys=True))
    print(
        f"midpoint scores F_s={result.midpoint.f_s:.4f} F_a={result.midpoint.f_a:.4f}; "
        f"front size {len(result.archive)}; manifest digest {manifest_digest(result.manifest)[:12]}"
    )
    return 0


def _cmd_render(args: argparse.Namespace) -> int:
    doc = json.loads(Path(args.solution).read_text())
    candidate = solution_from_json(doc)
    dem = load_dem(args.dem)
    scheme = candidate.scheme
    zm = (
        classify_zones(dem, scheme.n) if scheme.mode is SchemeMode.GRADED else None
    )
    shade = hillshade(dem)
    rendered = render(dem, zm, scheme, shade)
    write_png(rendered, args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    cfg = json.loads(Path(args.config).read_text())
    analysis = AnalysisConfig(
        palette_size=cfg.get("palette_size", 16),
        grid_size=cfg["grid_size"],
        seed=cfg.get("seed", 0),
    )
    grid = analyze_image(cfg["image"], analysis)
    profile = identify_dominants(grid)
    params = ScoringParams(
        k=cfg.get("k", 3),
        t=cfg.get("t", 1),
        gamma=cfg.get("gamma", 10.0),
        alpha=cfg.get("alpha", 10.0),
        aerial_enabled=cfg.get("aerial", True),
    )
    mode = SchemeMode(cfg.get("mode", "graded"))
    n = cfg["zones"]
    if "dem" in cfg:
        dem = load_dem(cfg["dem"])
        if mode is SchemeMode.GRADED:
            zm = classify_zones(dem, n)
            areas = zone_areas(zm)
            n = zm.n
        else:
            areas = sliver_masses(dem, params.ramp_samples)
    else:
        size = n if mode is SchemeMode.GRADED else params.ramp_samples
        areas = ZoneAreas(proportions=[1.0 / size] * size)
    conventions = ConventionSpec(
        assignments={
            int(e["zone"]): LabColor(e["L"], e["a"], e["b"]) for e in cfg.get("conventions", [])
        }
    )
    front = exhaustive_front(
        grid,
        n,
        profile,
        areas,
        conventions,
        params,
        mode=mode,
        delta_min=cfg.get("delta_min", 10.0),
    )
    out = json.dumps(archive_to_json(front), indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(out)
        print(f"wrote {args.out} ({len(front)} solutions)")
    else:
        print(out)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(static_dir=args.static, persist_dir=args.persist)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="terratint", description="Transfer image colors onto terrain elevation tints."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="extract the color grid from an image")
    p_analyze.add_argument("image", type=Path)
    p_analyze.add_argument("--grid-size", type=int, default=16)
    p_analyze.add_argument("--palette-size", type=int, default=DEFAULT_PALETTE_SIZE)
    p_analyze.add_argument("--seed", type=int, default=0)
    p_analyze.add_argument("--out-dir", type=Path, default=Path("."))
    p_analyze.set_defaults(fn=_cmd_analyze)

    p_transfer = sub.add_parser("transfer", help="full image-to-terrain transfer")
    p_transfer.add_argument("image", type=Path)
    p_transfer.add_argument("dem", type=Path)
    _add_common_flags(p_transfer)
    p_transfer.set_defaults(fn=_cmd_transfer)

    p_render = sub.add_parser("render", help="render a saved solution over a DEM")
    p_render.add_argument("solution", type=Path)
    p_render.add_argument("dem", type=Path)
    p_render.add_argument("--out", type=Path, default=Path("render.png"))
    p_render.set_defaults(fn=_cmd_render)

    p_oracle = sub.add_parser("oracle", help="exhaustive front for a tiny instance")
    p_oracle.add_argument("config", type=Path)
    p_oracle.add_argument("--out", type=Path, default=None)
    p_oracle.set_defaults(fn=_cmd_oracle)

    p_serve = sub.add_parser("serve", help="run the HTTP JSON service")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--static", type=Path, default=None, help="static UI directory")
    p_serve.add_argument("--persist", type=Path, default=None, help="persist job outputs here")
    p_serve.set_defaults(fn=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
