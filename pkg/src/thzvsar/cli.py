"""Command-line front end.

::

    thzvsar run      [--config PATH] [--out DIR] [--method cs|interp|oracle] [--threads N] [--seed N]
    thzvsar simulate [--config PATH] [--out DIR] [--threads N] [--seed N]
    thzvsar focus    [--config PATH] [--out DIR] [--method ...] [--threads N] [--seed N]
    thzvsar analyze  [--config PATH] [--out DIR] [--method ...] [--threads N]
    thzvsar bench    --reps N [--config PATH] [--out DIR] [--seed N]

Files for frame ``k`` (index into the configured azimuth list) are named
``frame_<k>.vsarph1`` and ``frame_<k>_<method>.{vsarim1,pgm,csv,json,png}``.
Exit status: 0 on success, 1 if any frame failed, 2 for usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import statistics
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import dsp, fileio, plotting
from .analysis import QualityReport, locate_peak, oracle_image, profile_cut, quality_report
from .config import ConfigError, ScenarioConfig, load_config
from .echo import PhaseHistory, remove_rvp, simulate
from .geometry import FrameGeometry
from .image import ComplexImage, PixelGrid
from .pfa_cs import cs_pixel_spacing, focus_cs
from .pfa_interp import focus_interp

log = logging.getLogger("thzvsar")

METHODS = ("cs", "interp", "oracle")


@dataclass
class FrameResult:
    index: int
    files: list[Path] = field(default_factory=list)
    report: QualityReport | None = None
    error: str | None = None


def focus(ph: PhaseHistory, cfg: ScenarioConfig, method: str) -> ComplexImage:
    """Form one frame's image with the chosen method and the configured sizes."""
    f = cfg.focus
    if method == "cs":
        return focus_cs(ph, f.out_rows, f.out_cols, support_radius=f.support_radius_m,
                        allow_rvp_free=f.allow_rvp_free_input)
    if method == "interp":
        return focus_interp(ph, f.out_rows, f.out_cols, taps=f.interp_taps, kaiser_beta=f.kaiser_beta)
    if method == "oracle":
        dx, dy = cs_pixel_spacing(ph.params, ph.geom, f.out_rows, f.out_cols)
        return oracle_image(remove_rvp(ph), PixelGrid(f.out_rows, f.out_cols, dx, dy))
    raise ValueError(f"unknown method {method!r}")


def simulate_frame(cfg: ScenarioConfig, k: int, geom: FrameGeometry, seed: int) -> PhaseHistory:
    sim = cfg.simulation
    rng = np.random.default_rng([seed, k]) if sim.snr_db is not None else None
    return simulate(cfg.scene_model(), cfg.radar_params(), geom, sim.mode, snr_db=sim.snr_db, rng=rng)


def _ph_path(out: Path, k: int) -> Path:
    return out / f"frame_{k}.vsarph1"


def _stem(out: Path, k: int, method: str) -> Path:
    return out / f"frame_{k}_{method}"


def _write_image(out: Path, k: int, method: str, img: ComplexImage, cfg: ScenarioConfig) -> list[Path]:
    stem = _stem(out, k, method)
    return [fileio.write_image(stem.with_suffix(".vsarim1"), img),
            fileio.write_pgm(stem.with_suffix(".pgm"), img, cfg.outputs.floor_db)]


def _analyze(out: Path, k: int, method: str, img: ComplexImage, cfg: ScenarioConfig) -> tuple[QualityReport, list[Path]]:
    scene = cfg.scene_model()
    rep = quality_report(img, scene, method, oversample=cfg.focus.oversample,
                         sidelobe_extent=cfg.focus.sidelobe_extent_irw)
    stem = _stem(out, k, method)
    files = [fileio.write_reports_csv(stem.with_suffix(".csv"), rep),
             fileio.write_reports_json(stem.with_suffix(".json"), rep)]
    if cfg.outputs.figures:
        title = f"frame {k}, {method}, theta_k = {np.degrees(img.theta_k):.1f} deg"
        files.append(plotting.save_figure(
            plotting.image_figure(img, scene, floor_db=cfg.outputs.floor_db, title=title),
            stem.with_suffix(".png")))
        ok = [r for r in rep.records if r.ok]
        if ok:
            ref = min(ok, key=lambda r: r.truth_x ** 2 + r.truth_y ** 2)
            peak = locate_peak(img, cfg.focus.oversample, near=(ref.truth_x, ref.truth_y))
            cuts = {axis: profile_cut(img, axis, peak, cfg.focus.oversample) for axis in ("range", "azimuth")}
            files.append(plotting.save_figure(
                plotting.profile_figure(cuts, title=f"{title}, target {ref.target_id}"),
                stem.parent / f"{stem.name}_psf.png"))
    return rep, files


def _frame_job(stage: str, cfg: ScenarioConfig, out: Path, method: str, seed: int):
    def job(item: tuple[int, FrameGeometry]) -> FrameResult:
        k, geom = item
        res = FrameResult(k)
        try:
            if stage in ("simulate", "run"):
                ph = simulate_frame(cfg, k, geom, seed)
                res.files.append(fileio.write_phase_history(_ph_path(out, k), ph))
            elif stage == "focus":
                path = _ph_path(out, k)
                ph = fileio.read_phase_history(path) if path.exists() else simulate_frame(cfg, k, geom, seed)
            if stage in ("focus", "run"):
                img = focus(ph, cfg, method)
                res.files += _write_image(out, k, method, img, cfg)
            elif stage == "analyze":
                img = fileio.read_image(_stem(out, k, method).with_suffix(".vsarim1"))
            if stage in ("analyze", "run"):
                res.report, files = _analyze(out, k, method, img, cfg)
                res.files += files
                failed = [r for r in res.report.records if not r.ok]
                if failed:
                    res.error = "; ".join(f"target {r.target_id}: {r.error}" for r in failed)
        except Exception as exc:  # one bad frame must not stop the others
            log.debug("frame %d failed", k, exc_info=True)
            res.error = f"{type(exc).__name__}: {exc}"
        return res
    return job


def run_frames(stage: str, cfg: ScenarioConfig, out: Path, method: str = "cs", threads: int = 1,
               seed: int = 0) -> list[FrameResult]:
    """Process every configured frame concurrently; results come back in frame order."""
    out.mkdir(parents=True, exist_ok=True)
    items = list(enumerate(cfg.frames()))
    job = _frame_job(stage, cfg, out, method, seed)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        return list(pool.map(job, items))


def _time_method(fn, ph, reps: int) -> dict:
    times, stages, counters = [], [], []
    for _ in range(reps):
        with dsp.count_ops() as c:
            t0 = time.perf_counter()
            fn(ph)
            times.append(time.perf_counter() - t0)
        d = c.as_dict()
        stages.append(d.pop("stage_seconds"))
        counters.append(d)
    names = sorted({n for s in stages for n in s})
    return {
        "median_s": statistics.median(times),
        "spread_s": max(times) - min(times),
        "times_s": times,
        "stage_median_s": {n: statistics.median(s.get(n, 0.0) for s in stages) for n in names},
        "counters": counters[0],
        "counters_stable": all(c == counters[0] for c in counters),
    }


def bench(cfg: ScenarioConfig, reps: int, seed: int = 0) -> dict:
    """Median and spread of focus_cs and focus_interp wall time on the first frame.

    Simulation, analysis and file I/O are outside the timed region.
    """
    if reps < 3:
        raise ValueError(f"bench needs at least 3 repetitions, got {reps}")
    geom = cfg.frames()[0]
    ph = simulate_frame(cfg, 0, geom, seed)
    cs = _time_method(lambda x: focus(x, cfg, "cs"), ph, reps)
    interp = _time_method(lambda x: focus(x, cfg, "interp"), ph, reps)
    return {
        "shape": list(ph.shape),
        "out_shape": [cfg.focus.out_rows, cfg.focus.out_cols],
        "reps": reps,
        "cs": cs,
        "interp": interp,
        "ratio_cs_over_interp": cs["median_s"] / interp["median_s"],
    }


def _reps(text: str) -> int:
    n = int(text)
    if n < 3:
        raise argparse.ArgumentTypeError("repetitions must be at least 3")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="scenario JSON (default: shipped reference scenario)")
    common.add_argument("--out", type=Path, help="output directory (default: outputs.directory)")
    common.add_argument("--threads", type=int, default=1, help="frames processed concurrently")
    common.add_argument("--seed", type=int, default=0, help="noise seed (only used when snr_db is set)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="thzvsar", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="write VSARPH1 phase histories")
    for name, text in (("focus", "form images"), ("analyze", "measure image quality"),
                       ("run", "simulate, focus and analyze")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--method", choices=METHODS, help="focuser (default: focus.method)")
    b = sub.add_parser("bench", parents=[common], help="time cs against interp")
    b.add_argument("--reps", type=_reps, default=5)
    return parser


def _print_results(results: list[FrameResult], cfg: ScenarioConfig) -> None:
    azimuths = cfg.geometry.frame_azimuths_deg
    for res in results:
        status = "ok" if res.error is None else f"FAILED ({res.error})"
        print(f"# frame {res.index} theta_k={azimuths[res.index]:g} deg: {status}")
        if res.report is not None and len(res.report):
            print(plotting.metrics_table(res.report))
        for f in res.files:
            print(f"#   wrote {f}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return 2
    out = args.out if args.out is not None else Path(cfg.outputs.directory)

    if args.command == "bench":
        result = bench(cfg, args.reps, args.seed)
        out.mkdir(parents=True, exist_ok=True)
        path = fileio.atomic_write(out / "bench.json", (json.dumps(result, indent=2) + "\n").encode())
        print("method\tmedian_s\tspread_s\tfft_passes\tmultiply_passes\tinterp_kernel_evals")
        for m in ("cs", "interp"):
            r, c = result[m], result[m]["counters"]
            print(f"{m}\t{r['median_s']:.4f}\t{r['spread_s']:.4f}\t{c['fft_passes']}\t"
                  f"{c['multiply_passes']}\t{c['interp_kernel_evals']}")
        print(f"# cs/interp median ratio {result['ratio_cs_over_interp']:.3f}; wrote {path}")
        return 0

    method = getattr(args, "method", None) or cfg.focus.method
    results = run_frames(args.command, cfg, out, method, args.threads, args.seed)
    _print_results(results, cfg)
    return 0 if all(r.error is None for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
