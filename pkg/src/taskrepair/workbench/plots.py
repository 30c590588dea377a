"""Plot-data emission: grid overlays and trajectory partitions as CSV."""

from __future__ import annotations

from pathlib import Path


def emit_plots(result, grounding, out_dir):
    """Write cell-overlay data and satisfied/failed trajectory point files.

    Everything is plain CSV so any plotting tool can consume it; files are
    written deterministically (fixed ordering, fixed float formatting).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    rows = ["name,kind,params"]
    for name in sorted(grounding.regions):
        region = grounding.regions[name]
        if hasattr(region, "lo"):
            params = " ".join(
                f"{v:.6f}" for v in (list(region.lo) + list(region.hi))
            )
            rows.append(f"{name},box,{params}")
        else:
            params = " ".join(
                f"{v:.6f}" for v in (list(region.center_) + [region.radius])
            )
            rows.append(f"{name},ball,{params}")
    ws = " ".join(
        f"{v:.6f}" for v in (list(grounding.workspace.lo) + list(grounding.workspace.hi))
    )
    rows.append(f"__workspace__,box,{ws}")
    (out / "grid.csv").write_text("\n".join(rows) + "\n")

    for i, dump in enumerate(result.dumps):
        for label, keep in (("satisfied", True), ("failed", False)):
            lines = []
            for b in range(len(dump.paths)):
                if dump.satisfied[b] != keep:
                    continue
                for point in dump.paths[b]:
                    lines.append(",".join(f"{v:.6f}" for v in point))
                lines.append("")  # blank line separates trajectories
            if lines:
                name = f"traj_{i:02d}_{dump.skill}_{dump.kind}_{label}.csv"
                (out / name).write_text("\n".join(lines) + "\n")
    return out
