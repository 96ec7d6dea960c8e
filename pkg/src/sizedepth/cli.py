"""Command-line entry points.

Exit codes: 0 success, 1 domain/input error, 2 usage error. Scripted
pipelines rely on the distinction.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import io as sdio
from . import study as sdstudy
from .annotation import PatchGrid, targets_from_annotations
from .crf import CrfConfig, available_backends, solve_map
from .errors import SizeDepthError
from .metrics import evaluate, sample_points
from .raster import DEFAULT_HEIGHT, DEFAULT_WIDTH, compute_intensity, load_and_resize


def _drawn_seed() -> int:
    return int.from_bytes(os.urandom(4), "big")


def _float_list(text: str) -> list[float]:
    values = [t for t in text.split(",") if t.strip()]
    return [float(t) for t in values]


def _load_working_raster(image_path: str, width: int, height: int):
    data = Path(image_path).read_bytes()
    return compute_intensity(load_and_resize(data, target_width=width, target_height=height))


def _targets_for(raster, annotations_path: str):
    doc = sdio.read_annotations(annotations_path)
    rows, cols, focal, annotations = sdio.parse_annotation_doc(doc)
    grid = PatchGrid(
        rows=rows, cols=cols, image_width=raster.width, image_height=raster.height
    )
    return targets_from_annotations(grid, annotations, focal_length=focal)


def _cmd_solve(args) -> int:
    raster = _load_working_raster(args.image, args.width, args.height)
    targets = _targets_for(raster, args.annotations)
    config = CrfConfig(lam=args.lam, beta=args.beta, tol=args.tol, max_iter=args.max_iter)
    field = solve_map(raster, targets, config, backend=args.backend)
    sdio.write_depth(field, args.out)
    if args.preview:
        sdio.write_depth_preview(field.y, args.preview)
    print(
        f"solved {raster.height}x{raster.width} lam={config.lam} beta={config.beta} "
        f"residual={field.residual:.3e} iterations={field.iterations} "
        f"wall_time={field.wall_time_s:.3f}s backend={field.backend} -> {args.out}"
    )
    return 0


def _cmd_sweep(args) -> int:
    lambdas = _float_list(args.lambdas)
    betas = _float_list(args.betas)
    if not lambdas or not betas:
        print("error: --lambdas and --betas must each list at least one value", file=sys.stderr)
        return 2
    raster = _load_working_raster(args.image, args.width, args.height)
    targets = _targets_for(raster, args.annotations)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    for lam in lambdas:
        for beta in betas:
            name = f"depth_lam{lam:g}_beta{beta:g}.pfm"
            try:
                config = CrfConfig(lam=lam, beta=beta, tol=args.tol, max_iter=args.max_iter)
                field = solve_map(raster, targets, config, backend=args.backend)
                sdio.write_depth(field, out_dir / name)
                rows.append(
                    [repr(lam), repr(beta), repr(field.unary_energy), repr(field.binary_energy),
                     repr(field.residual), field.iterations, name, ""]
                )
            except SizeDepthError as exc:
                rows.append([repr(lam), repr(beta), "", "", "", "", name, str(exc)])
    header = ["lambda", "beta", "unary_energy", "binary_energy", "residual", "iterations", "file", "error"]
    sdio.write_csv(out_dir / "energies.csv", header, rows)
    print(f"swept {len(lambdas)}x{len(betas)} cells -> {out_dir / 'energies.csv'}")
    return 0


def _cmd_eval(args) -> int:
    pred = sdio.read_depth(args.pred)
    gt = sdio.read_depth(args.gt)
    if pred.shape != gt.shape:
        print(f"error: shape mismatch {pred.shape} vs {gt.shape}", file=sys.stderr)
        return 1
    h, w = pred.shape
    if args.n > h * w:
        print(f"error: --n {args.n} exceeds pixel count {h * w}", file=sys.stderr)
        return 2
    seed = args.seed
    if seed is None:
        seed = _drawn_seed()
        print(f"seed: {seed}")
    points = sample_points(seed, args.n, width=w, height=h)
    report = evaluate(pred[points[:, 0], points[:, 1]], gt[points[:, 0], points[:, 1]])
    row = sdio.metrics_csv_row(Path(args.pred).stem, report)
    text = sdio.format_csv(sdio.METRICS_CSV_HEADER, [row])
    print(text, end="")
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    return 0


def _cmd_study(args) -> int:
    doc = {}
    if args.config:
        doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
    if "scene_seed" not in doc:
        doc["scene_seed"] = _drawn_seed()
        print(f"scene_seed: {doc['scene_seed']}")
    config = sdstudy.config_from_doc(doc)
    report = sdstudy.run_study(config)
    sdio.write_csv(args.out, sdstudy.STUDY_CSV_HEADER, sdstudy.study_csv_rows(report))
    s = report.summary
    print(
        f"study: {s.n_ok}/{config.trials} trials ok, "
        f"size MSE {s.size_mse_mean:.4f} vs depth MSE {s.depth_mse_mean:.4f}, "
        f"size wins {s.size_win_fraction:.1%} -> {args.out}"
    )
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sizedepth",
        description="Propagate patch-size labels into dense depth maps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common_solve_flags(p):
        p.add_argument("--image", required=True, help="input PNG or JPEG")
        p.add_argument("--annotations", required=True, help="annotation JSON document")
        p.add_argument("--width", type=int, default=DEFAULT_WIDTH, help="working width")
        p.add_argument("--height", type=int, default=DEFAULT_HEIGHT, help="working height")
        p.add_argument("--tol", type=float, default=1e-8, help="relative residual bound")
        p.add_argument("--max-iter", type=int, default=10000)
        p.add_argument("--backend", choices=available_backends(), default=None)

    p_solve = sub.add_parser("solve", help="run the full size-to-depth pipeline")
    add_common_solve_flags(p_solve)
    p_solve.add_argument("--lambda", dest="lam", type=float, default=1.0,
                         help="unary/binary tradeoff")
    p_solve.add_argument("--beta", type=float, default=10.0, help="similarity sharpness")
    p_solve.add_argument("--out", required=True, help="output PFM path")
    p_solve.add_argument("--preview", default=None, help="optional 16-bit PNG preview path")
    p_solve.set_defaults(func=_cmd_solve)

    p_sweep = sub.add_parser("sweep", help="solve a grid of (lambda, beta) cells")
    add_common_solve_flags(p_sweep)
    p_sweep.add_argument("--lambdas", required=True, help="comma-separated lambda values")
    p_sweep.add_argument("--betas", required=True, help="comma-separated beta values")
    p_sweep.add_argument("--out-dir", required=True)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_eval = sub.add_parser("eval", help="score a predicted depth file against ground truth")
    p_eval.add_argument("--pred", required=True, help="predicted depth PFM")
    p_eval.add_argument("--gt", required=True, help="ground-truth depth PFM")
    p_eval.add_argument("--n", type=int, default=10, help="number of sampled points")
    p_eval.add_argument("--seed", type=int, default=None)
    p_eval.add_argument("--out", default=None, help="optional CSV output path")
    p_eval.set_defaults(func=_cmd_eval)

    p_study = sub.add_parser("study", help="run the labeling-noise comparison")
    p_study.add_argument("--config", default=None, help="study config JSON")
    p_study.add_argument("--out", default="study.csv", help="output CSV path")
    p_study.set_defaults(func=_cmd_study)

    p_serve = sub.add_parser("serve", help="launch the annotation HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8008)
    p_serve.add_argument("--ui-dir", default=None, help="static frontend build to serve at /ui")
    p_serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SizeDepthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
