"""Writers for run artifacts: CSV histories, PGM/PPM density images and markdown tables."""

import csv
import os

import numpy as np

__all__ = [
    "emit_outputs",
    "write_history_csv",
    "write_pgm",
    "write_ppm",
    "write_phase_images",
    "write_table",
    "bench_table_markdown",
    "write_bench_csv",
]

HISTORY_COLUMNS = ("iteration", "compliance", "max_change", "solver_iterations", "seconds")
# phases in order; the last phase (void) is always drawn white
PALETTE = ((255, 0, 0), (0, 255, 0), (0, 0, 255), (255, 255, 0), (255, 0, 255), (0, 255, 255))
VOID_COLOR = (255, 255, 255)


def _to_bytes(values):
    return np.clip(np.floor(255.0 * np.asarray(values) + 0.5), 0, 255).astype(np.uint8)


def _raster(field_xy):
    # image rows run top (largest y) to bottom; columns are x
    return np.asarray(field_xy).T[::-1]


def write_pgm(path, field_xy):
    """Binary 8-bit PGM of an ``(nx, ny)`` field in [0, 1]; image is nx wide, ny tall."""
    img = _to_bytes(_raster(field_xy))
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(img).tobytes())


def write_ppm(path, density):
    """Composite P6 image blending phase colours by their fractions."""
    nx, ny = density.nx, density.ny
    rgb = np.zeros((nx, ny, 3))
    last = density.num_phases - 1
    for phase in range(density.num_phases):
        color = VOID_COLOR if phase == last else PALETTE[phase % len(PALETTE)]
        rgb += density.as_image(phase)[:, :, None] * (np.asarray(color) / 255.0)
    img = _to_bytes(np.transpose(rgb, (1, 0, 2))[::-1])
    with open(path, "wb") as fh:
        fh.write(f"P6\n{nx} {ny}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(img).tobytes())


def write_phase_images(out_dir, density, prefix="phase"):
    paths = []
    for phase in range(density.num_phases):
        path = os.path.join(out_dir, f"{prefix}_{phase}.pgm")
        write_pgm(path, density.as_image(phase))
        paths.append(path)
    path = os.path.join(out_dir, "composite.ppm")
    write_ppm(path, density)
    paths.append(path)
    return paths


def write_history_csv(path, report):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(HISTORY_COLUMNS)
        rows = zip(report.compliance, report.change, report.solver_iterations, report.seconds)
        for i, (c, ch, its, sec) in enumerate(rows):
            writer.writerow([i, repr(float(c)), repr(float(ch)), int(its), f"{sec:.3f}"])


def _cell(row):
    if row.skipped:
        return "no survey", "no survey"
    its = "-" if row.iterations is None else str(row.iterations)
    if not row.converged:
        its += " (not converged)"
    return its, f"{row.seconds:.3f}s"


def bench_table_markdown(matrix):
    """Pivot a BenchMatrix: one row per method/level, an Iter./Time column pair per mesh."""
    meshes, labels = [], []
    cells = {}
    for row in matrix.rows:
        if row.mesh not in meshes:
            meshes.append(row.mesh)
        if row.label not in labels:
            labels.append(row.label)
        cells[(row.label, row.mesh)] = _cell(row)
    header = ["Method"]
    for mesh in meshes:
        header += [f"{mesh} Iter.", f"{mesh} Time"]
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    for label in labels:
        out = [label]
        for mesh in meshes:
            out += list(cells.get((label, mesh), ("", "")))
        lines.append("| " + " | ".join(out) + " |")
    return "\n".join(lines) + "\n"


def write_table(path, matrix):
    with open(path, "w") as fh:
        fh.write(bench_table_markdown(matrix))


def write_bench_csv(path, matrix):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["mesh", "label", "iterations", "seconds", "converged", "skipped",
                         "solver_iterations", "compliance", "error"])
        for r in matrix.rows:
            writer.writerow([r.mesh, r.label, "" if r.iterations is None else r.iterations,
                             f"{r.seconds:.3f}", r.converged, r.skipped,
                             "" if r.solver_iterations is None else r.solver_iterations,
                             "" if r.compliance is None else repr(r.compliance), r.error or ""])


def emit_outputs(report, out_dir, images=True, csv_files=True):
    """Write the artifacts for an OptimReport or a BenchMatrix; returns the paths written."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    if hasattr(report, "rows"):
        path = os.path.join(out_dir, "table.md")
        write_table(path, report)
        paths.append(path)
        if csv_files:
            path = os.path.join(out_dir, "bench.csv")
            write_bench_csv(path, report)
            paths.append(path)
        return paths
    if csv_files:
        path = os.path.join(out_dir, "history.csv")
        write_history_csv(path, report)
        paths.append(path)
    if images:
        paths += write_phase_images(out_dir, report.density)
    return paths
