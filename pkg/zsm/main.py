# zsm/main.py
"""
Command-line interface.

Exit codes: 0 success, 2 input error, 3 empty estimate (the LOS/NLOS
classification is inconsistent with the map).
"""

import logging
import time
from pathlib import Path
from typing import Optional, Tuple

import click
from pydantic import ValidationError

from zsm.core.config import get_settings
from zsm.core.errors import ZsmError
from zsm.core.log import configure_logging
from zsm.models.building import BuildingSet, build_buildings
from zsm.models.mesh import dump_mesh, read_mesh_file, segment_buildings
from zsm.models.scenario import Scenario, load_scenario
from zsm.operations.baseline import run_sm
from zsm.operations.bench import bench_minkowski
from zsm.operations.emulation import emulate_document
from zsm.operations.matching import run_zsm, select_satellites
from zsm.operations.oracle import oracle_check
from zsm.operations.scenes import SCENES, random_scene
from zsm.render import render_svg
from zsm.schemas.cache import BuildingCacheDocument, PreprocessTiming
from zsm.schemas.report import Timings
from zsm.schemas.scenario import EmulationSpec, ScenarioDocument

logger = logging.getLogger(__name__)

EXIT_INPUT = 2
EXIT_INCONSISTENT = 3


class ZsmGroup(click.Group):
    """Maps input errors to exit code 2 with a one-line message."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except ValidationError as e:
            first = e.errors()[0]
            where = ".".join(str(p) for p in first["loc"])
            click.echo(f"Error: invalid document ({where}): {first['msg']}", err=True)
            ctx.exit(EXIT_INPUT)
        except (ZsmError, OSError) as e:
            click.echo(f"Error: {e}", err=True)
            ctx.exit(EXIT_INPUT)


def timing_path(cache: Path) -> Path:
    return cache.with_name(cache.stem + ".timing.json")


def _write_json(path: Path, document) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(document.model_dump_json(indent=2) + "\n")


def _load_buildings(cache: Path) -> BuildingSet:
    return BuildingCacheDocument.model_validate_json(Path(cache).read_text()).to_buildings()


def _offline_seconds(cache: Path) -> float:
    path = timing_path(Path(cache))
    if not path.exists():
        return 0.0
    return PreprocessTiming.model_validate_json(path.read_text()).conversion_s


def _load_inputs(
    cache: Path,
    scenario_path: Path,
    threshold: Optional[float] = None,
    exclude_footprints: Optional[bool] = None,
    min_elevation: Optional[float] = None,
) -> Tuple[BuildingSet, Scenario]:
    buildings = _load_buildings(cache)
    document = ScenarioDocument.model_validate_json(Path(scenario_path).read_text())
    update = {}
    if threshold is not None:
        update["los_threshold"] = threshold
    if min_elevation is not None:
        update["min_elevation_deg"] = min_elevation
    if exclude_footprints is not None:
        update["aoi"] = document.aoi.model_copy(update={"exclude_footprints": exclude_footprints})
    if update:
        document = ScenarioDocument.model_validate({**document.model_dump(), **update})
    return buildings, load_scenario(document, buildings)


epsilon_option = click.option(
    "--epsilon", type=float, default=None, help="Shadow half length in m (default ZSM_EPSILON)."
)
threshold_option = click.option(
    "--threshold", type=float, default=None, help="LOS threshold in dB-Hz (overrides the scenario)."
)
footprints_option = click.option(
    "--exclude-footprints/--keep-footprints",
    default=None,
    help="Subtract building footprints from the AOI (overrides the scenario).",
)
elevation_option = click.option(
    "--min-elevation",
    type=click.FloatRange(0.0, 90.0, max_open=True),
    default=None,
    help="Drop satellites at or below this elevation (deg).",
)
threads_option = click.option(
    "--threads", type=click.IntRange(min=1), default=None, help="Worker threads (default 1)."
)
out_option = click.option(
    "--out",
    "out_dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=Path("."),
    show_default=True,
    help="Output directory.",
)


@click.group(cls=ZsmGroup)
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default=None,
    help="Log level (default from ZSM_LOG).",
)
def cli(log_level: Optional[str]):
    """Zonotope shadow matching for urban GNSS positioning."""
    configure_logging(log_level)


@cli.command()
@click.argument("name", type=click.Choice(sorted([*SCENES, "random"])))
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for the random scene.")
@out_option
def scene(name: str, seed: int, out_dir: Path):
    """Write a fixture map (map.json) and scenario template (template.json)."""
    mesh, template = random_scene(seed) if name == "random" else SCENES[name]()
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "map.json").write_text(dump_mesh(mesh) + "\n")
    _write_json(out_dir / "template.json", template)
    click.echo(f"Wrote {name}: {mesh.n_triangles} triangles, {len(template.satellites)} satellites")


@cli.command()
@click.argument("map_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--merge/--no-merge", default=True, show_default=True, help="One hull per building.")
@click.option(
    "--cache",
    "cache_path",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Buildings cache to write.",
)
def preprocess(map_path: Path, merge: bool, cache_path: Path):
    """Segment a mesh into buildings and convert them to constrained zonotopes."""
    mesh = read_mesh_file(map_path)
    meshes = segment_buildings(mesh)
    started = time.perf_counter()
    buildings = build_buildings(meshes, merge=merge)
    conversion = time.perf_counter() - started
    document = BuildingCacheDocument.from_buildings(buildings, source=map_path.name, merge=merge)
    _write_json(cache_path, document)
    timing = PreprocessTiming(
        triangles=mesh.n_triangles,
        buildings=len(buildings),
        parts=len(buildings.all_parts()),
        conversion_s=conversion,
        cache_bytes=cache_path.stat().st_size,
    )
    _write_json(timing_path(cache_path), timing)
    click.echo(
        f"Cached {len(buildings)} buildings ({timing.parts} parts) in {conversion:.3f} s"
    )


@cli.command()
@click.argument("cache", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("template", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jitter", type=click.FloatRange(0.0, 2.0), default=0.0, show_default=True)
@click.option("--base", "base_cno", type=float, default=45.0, show_default=True)
@click.option("--attenuated", "attenuated_cno", type=float, default=28.0, show_default=True)
@click.option("--threshold", type=float, default=None, help="LOS threshold (default 38 dB-Hz).")
@click.option(
    "--output",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Scenario file to write.",
)
def simulate(cache, template, seed, jitter, base_cno, attenuated_cno, threshold, output):
    """Emulate ideal-classifier C/N0 values at the template's true position."""
    buildings = _load_buildings(cache)
    document = ScenarioDocument.model_validate_json(template.read_text())
    spec = EmulationSpec(
        base_cno=base_cno,
        attenuated_cno=attenuated_cno,
        threshold=get_settings().LOS_THRESHOLD if threshold is None else threshold,
        jitter=jitter,
        seed=seed,
    )
    scenario = load_scenario(document, buildings)
    height = 0.0
    if document.true_position is not None:
        height = scenario.ground.height_at(document.true_position)
    completed = emulate_document(document, buildings, scenario.satellites, spec, height)
    _write_json(output, completed)
    nlos = sum(1 for v in completed.cno.values() if v < spec.threshold)
    click.echo(f"Wrote {output}: {len(completed.cno)} satellites, {nlos} NLOS")


@cli.command("run-zsm")
@click.argument("cache", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("scenario_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@epsilon_option
@threshold_option
@footprints_option
@elevation_option
@click.option(
    "--order", type=click.Choice(["input", "elevation"]), default="input", show_default=True
)
@click.option("--satellites", default=None, help="Comma-separated satellite ids to keep.")
@click.option("--subset", type=click.IntRange(min=1), default=None, help="Random subset size.")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for --subset.")
@threads_option
@out_option
@click.pass_context
def run_zsm_command(
    ctx,
    cache,
    scenario_path,
    epsilon,
    threshold,
    exclude_footprints,
    min_elevation,
    order,
    satellites,
    subset,
    seed,
    threads,
    out_dir,
):
    """Run zonotope shadow matching; writes report.json and estimate.svg."""
    buildings, scenario = _load_inputs(
        cache, scenario_path, threshold, exclude_footprints, min_elevation
    )
    ids = None if satellites is None else [s.strip() for s in satellites.split(",") if s.strip()]
    if ids is not None or subset is not None:
        scenario = select_satellites(scenario, ids=ids, count=subset, seed=seed)
    report = run_zsm(buildings, scenario, epsilon=epsilon, order=order, threads=threads)
    report = report.model_copy(
        update={
            "timings": Timings(offline_s=_offline_seconds(cache), online_s=report.timings.online_s)
        }
    )
    _write_json(out_dir / "report.json", report)
    (out_dir / "estimate.svg").write_text(
        render_svg(
            scenario.ground.aoi,
            estimate=report.region,
            footprints=buildings.footprints,
            truth=scenario.true_position,
            title=scenario.name,
        )
    )
    click.echo(
        f"Estimate: {report.area:.2f} m² in {len(report.components)} components "
        f"({report.timings.online_s:.3f} s)"
    )
    for k, component in enumerate(report.components, start=1):
        flag = " [truth]" if component.contains_truth else ""
        click.echo(
            f"  {k}: centroid ({component.centroid[0]:.2f}, {component.centroid[1]:.2f}) "
            f"widths ({component.widths[0]:.2f}, {component.widths[1]:.2f}){flag}"
        )
    if report.inconsistent:
        click.echo("Estimate is empty: classification inconsistent with the map", err=True)
        ctx.exit(EXIT_INCONSISTENT)


@cli.command("run-sm")
@click.argument("cache", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("scenario_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--grid", "spacing", type=float, default=5.0, show_default=True, help="Grid spacing (m).")
@threshold_option
@footprints_option
@elevation_option
@click.option(
    "--visibility-cache",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="JSON file reused across runs on the same map and grid.",
)
@threads_option
@out_option
def run_sm_command(
    cache,
    scenario_path,
    spacing,
    threshold,
    exclude_footprints,
    min_elevation,
    visibility_cache,
    threads,
    out_dir,
):
    """Run grid shadow matching; writes sm_report.json and sm.svg."""
    buildings, scenario = _load_inputs(
        cache, scenario_path, threshold, exclude_footprints, min_elevation
    )
    report, grid = run_sm(
        buildings, scenario, spacing, cache_path=visibility_cache, threads=threads
    )
    _write_json(out_dir / "sm_report.json", report)
    (out_dir / "sm.svg").write_text(
        render_svg(
            scenario.ground.aoi,
            footprints=buildings.footprints,
            truth=scenario.true_position,
            candidates=grid.candidates,
            highlight=[c.position for c in report.top],
            title=scenario.name,
        )
    )
    click.echo(
        f"{len(grid)} candidates scored; bounds ({report.bounds[0]:.2f}, {report.bounds[1]:.2f}) m"
    )
    for candidate in report.top:
        click.echo(
            f"  ({candidate.position[0]:.2f}, {candidate.position[1]:.2f}) "
            f"score {candidate.score}/{report.n_satellites}"
        )


@cli.command("oracle-check")
@click.argument("cache", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("scenario_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--pitch", type=click.FloatRange(min=0.0, min_open=True), default=0.5, show_default=True)
@epsilon_option
@threads_option
@out_option
def oracle_check_command(cache, scenario_path, pitch, epsilon, threads, out_dir):
    """Compare the ZSM estimate with per-cell occlusion tests; writes oracle.json."""
    buildings, scenario = _load_inputs(cache, scenario_path)
    report = run_zsm(buildings, scenario, epsilon=epsilon, threads=threads)
    result = oracle_check(buildings, scenario, report.region, pitch=pitch, threads=threads)
    _write_json(out_dir / "oracle.json", result)
    click.echo(
        f"Agreement {result.agreement:.4%} over {result.cells_compared} cells "
        f"({result.disagreements} disagree)"
    )
    if result.degenerate:
        click.echo("Estimate is degenerate (smaller than one cell)", err=True)


@cli.command()
@click.option("--trials", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-vertices", type=click.IntRange(min=4), default=100, show_default=True)
@out_option
def bench(trials, seed, max_vertices, out_dir):
    """Time the Minkowski sum with a segment; writes bench.csv and bench.json."""
    result = bench_minkowski(trials=trials, seed=seed, max_vertices=max_vertices)
    out_dir.mkdir(parents=True, exist_ok=True)
    result.write_csv(out_dir / "bench.csv")
    _write_json(out_dir / "bench.json", result.summary)
    summary = result.summary
    click.echo(
        f"conzono median {summary.conzono.median * 1e3:.4f} ms, "
        f"vertex-rep median {summary.vertex_rep.median * 1e3:.4f} ms, ratio {summary.ratio:.1f}"
    )


if __name__ == "__main__":
    cli()
